use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use pantscut::field::harmonic::{
    solve_boundary_aware, solve_harmonic, BoundaryMode, DirichletConstraints, SolveOptions,
};
use pantscut::field::{load_field, ScalarField};
use pantscut::mesh::io::{load_mesh, save_mesh};
use pantscut::noise::add_noise;
use pantscut::reeb::{cut_points, NodeKind, ReebGraph};
use pantscut::{critical_points, decompose, save_outputs, Algorithm, Error, Result, TriMesh};
use serde_json::json;

/// Largest noise amplitude accepted without `--allow-large-noise`.
const NOISE_CAP: f64 = 0.15;

#[derive(Parser)]
#[command(
    name = "pantscut",
    version,
    about = "Pants decomposition of triangle meshes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cut a surface into pairs of pants.
    Decompose {
        mesh: PathBuf,
        #[arg(long, default_value = "reeb")]
        algo: Algorithm,
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        noise: NoiseArgs,
        /// Directory for the segmentation JSON, labelled PLY and per-patch OFF files.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print surface type and critical points.
    Inspect {
        mesh: PathBuf,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print the Reeb graph and its cut points.
    Reeb {
        mesh: PathBuf,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Perturb vertex positions.
    Noise {
        mesh: PathBuf,
        #[command(flatten)]
        noise: NoiseArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a synthetic plate with `genus` holes and `boundaries` open disks.
    Synth {
        #[arg(long, default_value_t = 2)]
        genus: usize,
        #[arg(long, default_value_t = 0)]
        boundaries: usize,
        #[arg(long, default_value_t = 24)]
        res: usize,
        #[command(flatten)]
        noise: NoiseArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct FieldArgs {
    /// `harmonic`, `boundary`, `z`, or a file with one value per vertex.
    #[arg(long, default_value = "harmonic")]
    field: String,
    /// Relative residual tolerance of the harmonic solve.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args)]
struct NoiseArgs {
    /// Noise amplitude as a fraction of the bounding-box diagonal.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    allow_large_noise: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

impl NoiseArgs {
    fn apply(&self, mesh: TriMesh) -> Result<TriMesh> {
        if self.noise == 0.0 {
            return Ok(mesh);
        }
        if !(0.0..=NOISE_CAP).contains(&self.noise) && !self.allow_large_noise {
            return Err(Error::InvalidArgument(format!(
                "noise {} outside [0, {NOISE_CAP}]; pass --allow-large-noise to override",
                self.noise
            )));
        }
        add_noise(&mesh, self.noise, self.seed)
    }
}

impl FieldArgs {
    fn build(&self, mesh: &TriMesh) -> Result<ScalarField> {
        let opts = SolveOptions {
            tol: self.tol,
            ..SolveOptions::default()
        };
        let boundary = || {
            let mode = match mesh.boundary_components().len() {
                0 => return Err(Error::InvalidArgument("mesh has no boundary".into())),
                1 => BoundaryMode::OneBoundary { p_max: None },
                _ => BoundaryMode::MultiBoundary { source: 0 },
            };
            solve_boundary_aware(mesh, mode, opts)
        };
        match self.field.as_str() {
            "z" => Ok(ScalarField::coordinate(mesh, 2)),
            "boundary" => boundary(),
            "harmonic" if mesh.has_boundary() => boundary(),
            "harmonic" => solve_harmonic(mesh, &DirichletConstraints::default_for(mesh)?, opts),
            path => load_field(path, mesh),
        }
    }
}

fn load(path: &Path) -> Result<TriMesh> {
    let mesh = load_mesh(path, None)?;
    info!(
        "loaded {} ({} vertices, {} faces)",
        path.display(),
        mesh.num_vertices(),
        mesh.num_faces()
    );
    Ok(mesh)
}

fn print_json(v: serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(&v).expect("json value serialises")
    );
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Decompose {
            mesh,
            algo,
            field,
            noise,
            out,
            format,
        } => {
            let m = noise.apply(load(&mesh)?)?;
            let t = Instant::now();
            let f = field.build(&m)?;
            let solve = t.elapsed();
            let d = decompose(&m, &f, algo)?;
            if let Some(dir) = &out {
                let stem = mesh.file_stem().and_then(|s| s.to_str()).unwrap_or("mesh");
                for p in save_outputs(&d, dir, stem)? {
                    info!("wrote {}", p.display());
                }
            }
            let tm = d.timings;
            match format {
                Format::Text => {
                    println!("surface: {}", d.source_type);
                    println!("algorithm: {}", d.algorithm);
                    println!("patches: {}, curves: {}", d.patches.len(), d.curves.len());
                    println!(
                        "time: field {solve:.2?}, classify {:.2?}, cut {:.2?}, recursive fields {:.2?}, total {:.2?}",
                        tm.classify, tm.cut, tm.field, tm.total
                    );
                }
                Format::Json => print_json(json!({
                    "surface": {"g": d.source_type.genus, "b": d.source_type.boundary_count},
                    "algorithm": d.algorithm.to_string(),
                    "patches": d.patches.len(),
                    "curves": d.curves.len(),
                    "seconds": {
                        "field": solve.as_secs_f64(),
                        "classify": tm.classify.as_secs_f64(),
                        "cut": tm.cut.as_secs_f64(),
                        "recursive_fields": tm.field.as_secs_f64(),
                        "total": tm.total.as_secs_f64(),
                    },
                })),
            }
        }
        Command::Inspect {
            mesh,
            field,
            format,
        } => {
            let m = load(&mesh)?;
            let st = m.validate()?;
            let f = field.build(&m)?;
            let r = critical_points(&m, &f)?;
            r.check_identity(&m)?;
            match format {
                Format::Text => {
                    println!(
                        "vertices: {}, edges: {}, faces: {}",
                        m.num_vertices(),
                        m.num_edges(),
                        m.num_faces()
                    );
                    println!("surface: {st}");
                    println!(
                        "critical points: {} min, {} saddle (multiplicity sum {}), {} max",
                        r.minima(),
                        r.saddles(),
                        r.multiplicity_sum(),
                        r.maxima()
                    );
                    for p in &r.points {
                        println!("  {} at vertex {} value {}", p.kind, p.vertex, p.value);
                    }
                }
                Format::Json => print_json(json!({
                    "vertices": m.num_vertices(),
                    "edges": m.num_edges(),
                    "faces": m.num_faces(),
                    "surface": {"g": st.genus, "b": st.boundary_count, "chi": st.euler_characteristic},
                    "critical_points": r.points.iter().map(|p| json!({
                        "vertex": p.vertex,
                        "kind": p.kind.to_string(),
                        "value": p.value,
                    })).collect::<Vec<_>>(),
                })),
            }
        }
        Command::Reeb {
            mesh,
            field,
            format,
        } => {
            let m = load(&mesh)?;
            m.validate()?;
            let f = field.build(&m)?;
            let g = ReebGraph::build(&m, &f)?;
            let (_, cuts) = cut_points(&g, &f)?;
            let kind = |k: NodeKind| match k {
                NodeKind::Critical(c) => c.to_string(),
                NodeKind::Boundary { component } => format!("boundary {component}"),
            };
            match format {
                Format::Text => {
                    println!(
                        "nodes: {}, arcs: {}, loop rank: {}",
                        g.nodes.len(),
                        g.arcs.len(),
                        g.loop_rank()
                    );
                    for (i, n) in g.nodes.iter().enumerate() {
                        println!(
                            "  node {i}: {} at vertex {} value {}",
                            kind(n.kind),
                            n.vertex,
                            n.value
                        );
                    }
                    for (i, a) in g.arcs.iter().enumerate() {
                        println!("  arc {i}: {} -> {}", a.lower, a.upper);
                    }
                    for c in &cuts {
                        println!("  cut on arc {} at value {}", c.arc, c.level.value);
                    }
                }
                Format::Json => print_json(json!({
                    "loop_rank": g.loop_rank(),
                    "nodes": g.nodes.iter().map(|n| json!({
                        "kind": kind(n.kind),
                        "vertex": n.vertex,
                        "value": n.value,
                    })).collect::<Vec<_>>(),
                    "arcs": g.arcs.iter().map(|a| [a.lower, a.upper]).collect::<Vec<_>>(),
                    "cuts": cuts.iter().map(|c| json!({"arc": c.arc, "value": c.level.value})).collect::<Vec<_>>(),
                })),
            }
        }
        Command::Noise { mesh, noise, out } => {
            let m = noise.apply(load(&mesh)?)?;
            save_mesh(&m, &out, None)?;
            println!("wrote {}", out.display());
        }
        Command::Synth {
            genus,
            boundaries,
            res,
            noise,
            out,
        } => {
            let m = noise.apply(pantscut::synth::plate(genus, boundaries, res)?)?;
            save_mesh(&m, &out, None)?;
            println!(
                "wrote {} ({} vertices, type {})",
                out.display(),
                m.num_vertices(),
                m.validate()?
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PANTSCUT_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_invalid_input() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
