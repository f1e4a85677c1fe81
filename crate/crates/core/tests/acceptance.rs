//! Acceptance gate: one PASS/FAIL line per criterion.

mod common;

use std::time::{Duration, Instant};

use common::{boundary_field, brute_loop_count, brute_type, harmonic, height};
use pantscut::decompose::{handle_sweep, map_path_into_piece};
use pantscut::field::harmonic::{solve_harmonic, DirichletConstraints, SolveOptions};
use pantscut::field::{Level, ScalarField};
use pantscut::mesh::cut_along_path_loop;
use pantscut::morse::{critical_points, extract_level_set, saddle_loop, Direction};
use pantscut::noise::add_noise;
use pantscut::reeb::ReebGraph;
use pantscut::synth::{plate, tripod};
use pantscut::{decompose, validate_decomposition, Algorithm, CriticalKind, SurfaceType, TriMesh};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

const ALGOS: [Algorithm; 2] = [Algorithm::Handle, Algorithm::Reeb];

fn check_counts(
    mesh: &TriMesh,
    field: &ScalarField,
    st: SurfaceType,
    what: &str,
) -> Result<(), String> {
    for algo in ALGOS {
        let d = decompose(mesh, field, algo).map_err(|e| format!("{what} {algo}: {e}"))?;
        let r = validate_decomposition(&d);
        if !r.is_ok() {
            return Err(format!("{what} {algo}: {}", r.failures.join("; ")));
        }
        if d.patches.len() != st.pants_count() || d.curves.len() != st.curve_count() {
            return Err(format!(
                "{what} {algo}: {} patches / {} curves",
                d.patches.len(),
                d.curves.len()
            ));
        }
        if let Some(p) = d.patches.iter().find(|p| !p.surface_type.is_pants()) {
            return Err(format!("{what} {algo}: patch of type {}", p.surface_type));
        }
    }
    Ok(())
}

fn closed_meshes() -> Vec<(usize, TriMesh)> {
    (2..=5).map(|g| (g, plate(g, 0, 24).unwrap())).collect()
}

fn boundary_meshes() -> Vec<((usize, usize), TriMesh)> {
    [(1, 1), (2, 1), (0, 4), (1, 2)]
        .into_iter()
        .map(|(g, b)| ((g, b), plate(g, b, 24).unwrap()))
        .collect()
}

fn count_law() -> Outcome {
    let start = Instant::now();
    for (g, m) in closed_meshes() {
        let st = SurfaceType::new(g, 0);
        check_counts(&m, &harmonic(&m), st, &format!("g{g} harmonic"))?;
        check_counts(&m, &height(&m), st, &format!("g{g} z"))?;
    }
    let t = start.elapsed();
    if t > Duration::from_secs(30) {
        return Err(format!("took {t:.2?}"));
    }
    Ok(format!("g=2..5, both algorithms, both fields, {t:.2?}"))
}

fn boundary_variants() -> Outcome {
    for ((g, b), m) in boundary_meshes() {
        check_counts(
            &m,
            &boundary_field(&m),
            SurfaceType::new(g, b),
            &format!("({g},{b})"),
        )?;
    }
    Ok("(1,1) (2,1) (0,4) (1,2)".into())
}

fn morse_identity() -> Outcome {
    let mut n = 0;
    let mut cases: Vec<(TriMesh, ScalarField)> = Vec::new();
    for (_, m) in closed_meshes() {
        cases.push((m.clone(), harmonic(&m)));
        cases.push((m.clone(), height(&m)));
    }
    for (_, m) in boundary_meshes() {
        cases.push((m.clone(), boundary_field(&m)));
    }
    for (m, f) in &cases {
        let report = critical_points(m, f).map_err(|e| e.to_string())?;
        report.check_identity(m).map_err(|e| e.to_string())?;
        n += 1;
    }
    Ok(format!("{n} mesh/field pairs"))
}

fn maximum_principle() -> Outcome {
    let base = plate(2, 0, 12).unwrap();
    for seed in 0..100u64 {
        let m = add_noise(&base, 0.05, seed).map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lo = rng.random_range(0..m.num_vertices());
        let hi = loop {
            let v = rng.random_range(0..m.num_vertices());
            if v != lo {
                break v;
            }
        };
        let c = DirichletConstraints::min_max(lo, hi).map_err(|e| e.to_string())?;
        let opts = SolveOptions {
            tol: 1e-10,
            max_iter: None,
        };
        let f = solve_harmonic(&m, &c, opts).map_err(|e| format!("seed {seed}: {e}"))?;
        let r = critical_points(&m, &f).map_err(|e| e.to_string())?;
        let at = |k: CriticalKind| {
            r.points
                .iter()
                .filter(|p| p.kind == k)
                .map(|p| p.vertex)
                .collect::<Vec<_>>()
        };
        if at(CriticalKind::Minimum) != [lo] || at(CriticalKind::Maximum) != [hi] {
            return Err(format!(
                "seed {seed}: minima {:?} maxima {:?}, constrained {lo}/{hi}",
                at(CriticalKind::Minimum),
                at(CriticalKind::Maximum)
            ));
        }
    }
    Ok("100 noisy genus-2 meshes, random constraint pairs".into())
}

fn reeb_rank() -> Outcome {
    for (g, m) in closed_meshes() {
        for (name, f) in [("harmonic", harmonic(&m)), ("z", height(&m))] {
            let r = ReebGraph::build(&m, &f).map_err(|e| e.to_string())?;
            if r.loop_rank() != g {
                return Err(format!("g{g} {name}: loop rank {}", r.loop_rank()));
            }
        }
    }
    Ok("g=2..5, harmonic and z".into())
}

fn handle_closing() -> Outcome {
    let mut detail = Vec::new();
    let m = plate(2, 0, 24).unwrap();
    for (fname, f) in [("harmonic", harmonic(&m)), ("z", height(&m))] {
        let report = critical_points(&m, &f).map_err(|e| e.to_string())?;
        let min = report
            .points
            .iter()
            .find(|p| p.kind == CriticalKind::Minimum)
            .ok_or("no minimum")?
            .vertex;
        let sweep = handle_sweep(&m, &f).map_err(|e| e.to_string())?;
        let piece = sweep
            .pieces
            .iter()
            .find(|p| (0..p.mesh.num_vertices()).any(|v| p.original_vertex(v) == Some(min)))
            .ok_or("no piece holds the minimum")?;
        let st = piece.surface_type().map_err(|e| e.to_string())?;
        if st.is_pants() {
            detail.push(format!("{fname}: (0,3)"));
            continue;
        }
        if st != SurfaceType::new(1, 1) {
            return Err(format!("{fname}: sublevel piece is {st}"));
        }
        let saddle = report
            .points
            .iter()
            .find(|p| p.kind == CriticalKind::Saddle { multiplicity: 1 })
            .ok_or("no simple saddle")?;
        let path =
            saddle_loop(&m, &f, saddle.vertex, Direction::Down).map_err(|e| e.to_string())?;
        let curve = map_path_into_piece(piece, &path.vertices()).ok_or("loop leaves the piece")?;
        let cut =
            cut_along_path_loop(&piece.mesh, &piece.field, &curve).map_err(|e| e.to_string())?;
        let types: Vec<SurfaceType> = cut.iter().map(|p| p.surface_type().unwrap()).collect();
        if types != [SurfaceType::new(0, 3)] {
            return Err(format!("{fname}: cutting (1,1) gave {types:?}"));
        }
        detail.push(format!("{fname}: (1,1) -> (0,3)"));
    }
    Ok(detail.join(", "))
}

fn degenerate_saddle() -> Outcome {
    let (m, lo, hi) = tripod(2).map_err(|e| e.to_string())?;
    let c = DirichletConstraints::min_max(lo, hi).map_err(|e| e.to_string())?;
    let f = solve_harmonic(&m, &c, SolveOptions::default()).map_err(|e| e.to_string())?;
    let report = critical_points(&m, &f).map_err(|e| e.to_string())?;
    let max_mult = report
        .points
        .iter()
        .map(|p| p.multiplicity())
        .max()
        .unwrap_or(0);
    if max_mult < 2 {
        return Err("no degenerate saddle was forced".into());
    }
    check_counts(&m, &f, SurfaceType::new(2, 0), "tripod")?;
    Ok(format!("max multiplicity {max_mult}, both algorithms"))
}

fn noise_robustness() -> Outcome {
    let mut cells = Vec::new();
    for g in [2, 3] {
        let base = plate(g, 0, 24).unwrap();
        for amp in [0.05, 0.10, 0.15] {
            let mut ok = [0usize; 2];
            for seed in 0..10 {
                let m = add_noise(&base, amp, seed).map_err(|e| e.to_string())?;
                let f = harmonic(&m);
                for (i, algo) in ALGOS.into_iter().enumerate() {
                    if decompose(&m, &f, algo).is_ok_and(|d| validate_decomposition(&d).is_ok()) {
                        ok[i] += 1;
                    }
                }
            }
            cells.push(format!("g{g}@{:.0}%: {}/{}", amp * 100.0, ok[0], ok[1]));
            if ok.iter().any(|&k| k < 10) {
                return Err(cells.join(", "));
            }
        }
    }
    Ok(format!("handle/reeb {}", cells.join(", ")))
}

fn relative_performance() -> Outcome {
    let m = plate(4, 0, 120).unwrap();
    if m.num_vertices() < 40_000 {
        return Err(format!("mesh has only {} vertices", m.num_vertices()));
    }
    let f = harmonic(&m);
    let mut t = [Duration::ZERO; 2];
    for (i, algo) in ALGOS.into_iter().enumerate() {
        let d = decompose(&m, &f, algo).map_err(|e| e.to_string())?;
        t[i] = d.timings.total.saturating_sub(d.timings.field);
    }
    let line = format!(
        "V={}, handle {:.2?}, reeb {:.2?}",
        m.num_vertices(),
        t[0],
        t[1]
    );
    if t[1] <= t[0] {
        Ok(line)
    } else {
        Err(line)
    }
}

fn oracle_equivalence() -> Outcome {
    let types = [(2, 0), (3, 0), (1, 1), (0, 3), (2, 1), (1, 2)];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (mut loops, mut patches) = (0usize, 0usize);
    for case in 0..50 {
        let (g, b) = types[rng.random_range(0..types.len())];
        let amp = rng.random_range(0.0..0.1);
        let m =
            add_noise(&plate(g, b, 6).unwrap(), amp, rng.random()).map_err(|e| e.to_string())?;
        if m.num_vertices() > 500 {
            return Err(format!("case {case}: {} vertices", m.num_vertices()));
        }
        let f = boundary_field(&m);
        // Levels must not split a boundary loop, which is constant and so lies in one rank block.
        let blocks: Vec<(usize, usize)> = m
            .boundary_components()
            .iter()
            .map(|l| {
                let r = l.iter().map(|&v| f.rank(v));
                (r.clone().min().unwrap(), r.max().unwrap())
            })
            .collect();
        for _ in 0..4 {
            let r = loop {
                let r = rng.random_range(0..m.num_vertices() - 1);
                if blocks.iter().all(|&(lo, hi)| r < lo || r >= hi) {
                    break r;
                }
            };
            let level = Level::above_rank(&f, r).map_err(|e| e.to_string())?;
            let got = extract_level_set(&m, &f, level)
                .map_err(|e| e.to_string())?
                .len();
            let want = brute_loop_count(&m, &f, level);
            if got != want {
                return Err(format!("case {case}: {got} loops, brute force {want}"));
            }
            loops += 1;
        }
        let algo = ALGOS[case % 2];
        let d =
            decompose(&m, &f, algo).map_err(|e| format!("case {case} ({g},{b}) {algo}: {e}"))?;
        for p in &d.patches {
            let (pg, pb, pc) = brute_type(&p.mesh);
            if pc != 1 || SurfaceType::new(pg, pb) != p.surface_type {
                return Err(format!(
                    "case {case}: patch tagged {}, brute force ({pg},{pb})",
                    p.surface_type
                ));
            }
            patches += 1;
        }
    }
    Ok(format!("50 cases, {loops} level sets, {patches} patches"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("count law", count_law),
        ("boundary variants", boundary_variants),
        ("Morse identity", morse_identity),
        ("maximum principle", maximum_principle),
        ("Reeb rank", reeb_rank),
        ("handle closing", handle_closing),
        ("degenerate saddle", degenerate_saddle),
        ("noise robustness", noise_robustness),
        ("relative performance", relative_performance),
        ("oracle equivalence", oracle_equivalence),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed();
        match outcome {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} [{t:.2?}]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg} [{t:.2?}]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
