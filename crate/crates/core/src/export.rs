//! Convergence tables and legacy VTK output.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::adapt::AdaptiveRecord;
use crate::assembly::{CoupledState, Discretization};
use crate::estimator::IndicatorField;
use crate::mesh::{Mesh, MeshError};

pub const CSV_HEADER: &str = "iter,ndof,est_heat,est_curl,est_pressure,est_total,picard_iters,elements";

pub fn write_csv<W: Write>(records: &[AdaptiveRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{:e},{:e},{:e},{:e},{},{}",
            r.iter, r.ndof, r.est_heat, r.est_curl, r.est_pressure, r.est_total, r.picard_iters, r.elements
        )?;
    }
    Ok(())
}

pub fn write_csv_file(records: &[AdaptiveRecord], path: &Path) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_csv(records, &mut w)?;
    w.flush()
}

fn write_mesh_part<W: Write>(mesh: &Mesh, out: &mut W, title: &str) -> io::Result<()> {
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "{title}")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {} double", mesh.num_vertices())?;
    for v in mesh.vertices() {
        writeln!(out, "{:e} {:e} 0", v[0], v[1])?;
    }
    let nt = mesh.num_triangles();
    writeln!(out, "CELLS {} {}", nt, 4 * nt)?;
    for t in mesh.triangles() {
        writeln!(out, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    writeln!(out, "CELL_TYPES {nt}")?;
    for _ in 0..nt {
        writeln!(out, "5")?;
    }
    Ok(())
}

fn write_scalars<W: Write>(out: &mut W, name: &str, values: &[f64]) -> io::Result<()> {
    writeln!(out, "SCALARS {name} double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for v in values {
        writeln!(out, "{v:e}")?;
    }
    Ok(())
}

/// Mesh only, as an unstructured grid of triangles.
pub fn write_vtk_mesh<W: Write>(mesh: &Mesh, mut out: W) -> io::Result<()> {
    write_mesh_part(mesh, &mut out, "mesh")
}

/// Mesh with point temperature, cell velocity at barycenters, cell pressure and
/// the four indicator fields.
pub fn write_vtk_solution<W: Write>(disc: &Discretization, state: &CoupledState, indicators: &IndicatorField, mut out: W) -> io::Result<()> {
    let mesh = &disc.mesh;
    write_mesh_part(mesh, &mut out, "solution")?;
    writeln!(out, "POINT_DATA {}", mesh.num_vertices())?;
    write_scalars(&mut out, "temperature", &disc.layout.nodal_temperature(&state.temperature))?;
    writeln!(out, "CELL_DATA {}", mesh.num_triangles())?;
    writeln!(out, "VECTORS velocity double")?;
    for k in 0..mesh.num_triangles() {
        let u = disc.geometry(k).eval_rt0(&disc.layout.local_velocity(mesh, k, &state.velocity), mesh.barycenter(k));
        writeln!(out, "{:e} {:e} 0", u[0], u[1])?;
    }
    write_scalars(&mut out, "pressure", &state.pressure)?;
    write_scalars(&mut out, "est_heat", &indicators.heat)?;
    write_scalars(&mut out, "est_curl", &indicators.curl)?;
    write_scalars(&mut out, "est_pressure", &indicators.pressure)?;
    write_scalars(&mut out, "est_total", &indicators.total)?;
    Ok(())
}

fn create(path: &Path) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

pub fn write_vtk_mesh_file(mesh: &Mesh, path: &Path) -> io::Result<()> {
    let mut w = create(path)?;
    write_vtk_mesh(mesh, &mut w)?;
    w.flush()
}

pub fn write_vtk_solution_file(disc: &Discretization, state: &CoupledState, indicators: &IndicatorField, path: &Path) -> io::Result<()> {
    let mut w = create(path)?;
    write_vtk_solution(disc, state, indicators, &mut w)?;
    w.flush()
}

/// Reads back the points and triangles of a file written by this module.
pub fn read_vtk_mesh(path: &Path) -> Result<Mesh, MeshError> {
    let reader = BufReader::new(File::open(path)?);
    let mut tokens = Vec::new();
    for line in reader.lines() {
        tokens.extend(line?.split_whitespace().map(str::to_owned));
    }
    let parse_err = |msg: &str| MeshError::Parse { line: 0, msg: msg.to_owned() };
    let find = |key: &str| tokens.iter().position(|t| t == key).ok_or_else(|| parse_err(&format!("missing {key}")));
    let num = |i: usize| -> Result<f64, MeshError> {
        tokens.get(i).and_then(|t| t.parse().ok()).ok_or_else(|| parse_err("bad number"))
    };
    let ip = find("POINTS")?;
    let np = num(ip + 1)? as usize;
    let vertices = (0..np).map(|i| Ok([num(ip + 3 + 3 * i)?, num(ip + 4 + 3 * i)?])).collect::<Result<Vec<_>, MeshError>>()?;
    let ic = find("CELLS")?;
    let nc = num(ic + 1)? as usize;
    let mut triangles = Vec::with_capacity(nc);
    for c in 0..nc {
        let base = ic + 3 + 4 * c;
        if num(base)? as usize != 3 {
            return Err(parse_err("only triangle cells are supported"));
        }
        triangles.push([num(base + 1)? as usize, num(base + 2)? as usize, num(base + 3)? as usize]);
    }
    Mesh::new(vertices, triangles)
}
