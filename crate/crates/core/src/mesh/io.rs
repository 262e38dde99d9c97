//! Plain-text mesh format: a header line `nv nt`, then `nv` lines `x y`, then `nt`
//! lines `i j k` with 0-based vertex indices.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{Mesh, MeshError, Point};

pub fn write_mesh<W: Write>(mesh: &Mesh, mut out: W) -> Result<(), MeshError> {
    writeln!(out, "{} {}", mesh.num_vertices(), mesh.num_triangles())?;
    for p in mesh.vertices() {
        writeln!(out, "{} {}", p[0], p[1])?;
    }
    for t in mesh.triangles() {
        writeln!(out, "{} {} {}", t[0], t[1], t[2])?;
    }
    Ok(())
}

pub fn write_mesh_file(mesh: &Mesh, path: &Path) -> Result<(), MeshError> {
    let mut buf = Vec::new();
    write_mesh(mesh, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn read_mesh<R: Read>(input: R) -> Result<Mesh, MeshError> {
    let mut lines = BufReader::new(input)
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty() && !s.trim_start().starts_with('#')));

    let mut next_fields = |what: &str, n: usize| -> Result<(usize, Vec<String>), MeshError> {
        let (line, text) = lines.next().ok_or_else(|| MeshError::Parse { line: 0, msg: format!("unexpected end of file, expected {what}") })?;
        let text = text?;
        let fields: Vec<String> = text.split_whitespace().map(str::to_owned).collect();
        if fields.len() != n {
            return Err(MeshError::Parse { line, msg: format!("expected {n} fields for {what}, found {}", fields.len()) });
        }
        Ok((line, fields))
    };

    let (line, header) = next_fields("header `nv nt`", 2)?;
    let parse_usize = |s: &str, line: usize| s.parse::<usize>().map_err(|e| MeshError::Parse { line, msg: format!("{s:?}: {e}") });
    let parse_f64 = |s: &str, line: usize| s.parse::<f64>().map_err(|e| MeshError::Parse { line, msg: format!("{s:?}: {e}") });
    let nv = parse_usize(&header[0], line)?;
    let nt = parse_usize(&header[1], line)?;

    let mut vertices: Vec<Point> = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (line, f) = next_fields("vertex `x y`", 2)?;
        vertices.push([parse_f64(&f[0], line)?, parse_f64(&f[1], line)?]);
    }
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (line, f) = next_fields("triangle `i j k`", 3)?;
        triangles.push([parse_usize(&f[0], line)?, parse_usize(&f[1], line)?, parse_usize(&f[2], line)?]);
    }
    Mesh::new(vertices, triangles)
}

pub fn read_mesh_file(path: &Path) -> Result<Mesh, MeshError> {
    read_mesh(fs::File::open(path)?)
}
