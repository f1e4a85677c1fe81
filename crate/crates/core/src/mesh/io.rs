//! ASCII OFF / OBJ readers and writers, plus a labelled PLY writer.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mesh::{Point3, TriMesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "off" => Some(MeshFormat::Off),
            "obj" => Some(MeshFormat::Obj),
            _ => None,
        }
    }
}

impl FromStr for MeshFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "off" => Ok(MeshFormat::Off),
            "obj" => Ok(MeshFormat::Obj),
            other => Err(Error::InvalidArgument(format!(
                "unknown mesh format '{other}'"
            ))),
        }
    }
}

pub fn load_mesh(path: impl AsRef<Path>, format: Option<MeshFormat>) -> Result<TriMesh> {
    let path = path.as_ref();
    let format = match format.or_else(|| MeshFormat::from_path(path)) {
        Some(f) => f,
        None => {
            return Err(Error::InvalidArgument(format!(
                "cannot infer mesh format of {}",
                path.display()
            )))
        }
    };
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    match format {
        MeshFormat::Off => parse_off(&text),
        MeshFormat::Obj => parse_obj(&text),
    }
}

pub fn save_mesh(mesh: &TriMesh, path: impl AsRef<Path>, format: Option<MeshFormat>) -> Result<()> {
    let path = path.as_ref();
    let format = format
        .or_else(|| MeshFormat::from_path(path))
        .unwrap_or(MeshFormat::Off);
    let text = match format {
        MeshFormat::Off => to_off(mesh),
        MeshFormat::Obj => to_obj(mesh),
    };
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_num<T: FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("cannot parse '{tok}'")))
}

pub fn parse_off(text: &str) -> Result<TriMesh> {
    let mut tokens = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = tokens.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let mut head: Vec<&str> = header.split_whitespace().collect();
    if head.first().map(|h| h.ends_with("OFF")) != Some(true) {
        return Err(parse_err(hline, "missing OFF header"));
    }
    head.remove(0);
    let counts_line;
    let counts: Vec<&str> = if head.is_empty() {
        let (l, c) = tokens
            .next()
            .ok_or_else(|| parse_err(hline, "missing element counts"))?;
        counts_line = l;
        c.split_whitespace().collect()
    } else {
        counts_line = hline;
        head
    };
    if counts.len() < 2 {
        return Err(parse_err(counts_line, "expected vertex and face counts"));
    }
    let nv: usize = parse_num(counts[0], counts_line)?;
    let nf: usize = parse_num(counts[1], counts_line)?;

    let mut positions = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (l, row) = tokens
            .next()
            .ok_or_else(|| parse_err(counts_line, "unexpected end of vertex list"))?;
        let f: Vec<&str> = row.split_whitespace().collect();
        if f.len() < 3 {
            return Err(parse_err(l, "vertex needs three coordinates"));
        }
        positions.push([
            parse_num(f[0], l)?,
            parse_num(f[1], l)?,
            parse_num(f[2], l)?,
        ]);
    }
    let mut triangles = Vec::with_capacity(nf);
    for face in 0..nf {
        let (l, row) = tokens
            .next()
            .ok_or_else(|| parse_err(counts_line, "unexpected end of face list"))?;
        let f: Vec<&str> = row.split_whitespace().collect();
        let arity: usize = parse_num(f[0], l)?;
        if arity != 3 {
            return Err(Error::NonTriangleFace { face, arity });
        }
        if f.len() < 4 {
            return Err(parse_err(l, "face lists fewer indices than declared"));
        }
        triangles.push([
            parse_num(f[1], l)?,
            parse_num(f[2], l)?,
            parse_num(f[3], l)?,
        ]);
    }
    TriMesh::new(positions, triangles)
}

pub fn parse_obj(text: &str) -> Result<TriMesh> {
    let mut positions: Vec<Point3> = Vec::new();
    let mut raw_faces: Vec<(usize, Vec<i64>)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let l = i + 1;
        let line = line.split('#').next().unwrap_or("");
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let c: Vec<&str> = it.collect();
                if c.len() < 3 {
                    return Err(parse_err(l, "vertex needs three coordinates"));
                }
                positions.push([
                    parse_num(c[0], l)?,
                    parse_num(c[1], l)?,
                    parse_num(c[2], l)?,
                ]);
            }
            Some("f") => {
                let idx = it
                    .map(|tok| parse_num::<i64>(tok.split('/').next().unwrap_or(""), l))
                    .collect::<Result<Vec<_>>>()?;
                raw_faces.push((l, idx));
            }
            _ => {}
        }
    }
    let n = positions.len() as i64;
    let mut triangles = Vec::with_capacity(raw_faces.len());
    for (face, (l, idx)) in raw_faces.into_iter().enumerate() {
        if idx.len() != 3 {
            return Err(Error::NonTriangleFace {
                face,
                arity: idx.len(),
            });
        }
        let mut t = [0usize; 3];
        for k in 0..3 {
            let v = match idx[k] {
                0 => return Err(parse_err(l, "OBJ indices are 1-based")),
                i if i > 0 => i - 1,
                i => n + i,
            };
            if v < 0 || v >= n {
                return Err(Error::IndexOutOfRange {
                    face,
                    vertex: v.max(0) as usize,
                    count: n as usize,
                });
            }
            t[k] = v as usize;
        }
        triangles.push(t);
    }
    TriMesh::new(positions, triangles)
}

pub fn to_off(mesh: &TriMesh) -> String {
    let mut s = String::with_capacity(32 * (mesh.num_vertices() + mesh.num_faces()));
    s.push_str("OFF\n");
    s.push_str(&format!("{} {} 0\n", mesh.num_vertices(), mesh.num_faces()));
    for p in mesh.positions() {
        s.push_str(&format!("{} {} {}\n", p[0], p[1], p[2]));
    }
    for t in mesh.triangles() {
        s.push_str(&format!("3 {} {} {}\n", t[0], t[1], t[2]));
    }
    s
}

pub fn to_obj(mesh: &TriMesh) -> String {
    let mut s = String::with_capacity(32 * (mesh.num_vertices() + mesh.num_faces()));
    for p in mesh.positions() {
        s.push_str(&format!("v {} {} {}\n", p[0], p[1], p[2]));
    }
    for t in mesh.triangles() {
        s.push_str(&format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
    }
    s
}

/// ASCII PLY with an integer `label` property per face.
pub fn save_labelled_ply(mesh: &TriMesh, labels: &[usize], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if labels.len() != mesh.num_faces() {
        return Err(Error::InvalidArgument(format!(
            "{} labels for {} faces",
            labels.len(),
            mesh.num_faces()
        )));
    }
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    write!(
        w,
        "ply\nformat ascii 1.0\nelement vertex {}\nproperty double x\nproperty double y\nproperty double z\nelement face {}\nproperty list uchar int vertex_indices\nproperty int label\nend_header\n",
        mesh.num_vertices(),
        mesh.num_faces()
    )
    .map_err(io)?;
    for p in mesh.positions() {
        writeln!(w, "{} {} {}", p[0], p[1], p[2]).map_err(io)?;
    }
    for (t, l) in mesh.triangles().iter().zip(labels) {
        writeln!(w, "3 {} {} {} {}", t[0], t[1], t[2], l).map_err(io)?;
    }
    w.flush().map_err(io)
}
