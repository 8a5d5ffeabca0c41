//! Deterministic file output: CSV with a fixed column order and full-precision
//! floats, so reruns are byte-identical.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use memdd::mesh::Mesh;
use memdd::model::State;

/// Full-precision, locale-free float formatting used everywhere.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> io::Result<()> {
    let mut buf = String::new();
    buf.push_str(&header.join(","));
    buf.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        buf.push_str(&row.join(","));
        buf.push('\n');
    }
    fs::write(path, buf)
}

/// Cell-centered fields as `x,y,n,p,d,v` rows in mesh order.
pub fn write_snapshot(path: &Path, mesh: &Mesh, state: &State) -> io::Result<()> {
    let mut buf = String::from("x,y,n,p,d,v\n");
    for (i, cell) in mesh.cells().iter().enumerate() {
        let row = [
            cell.center[0],
            cell.center[1],
            state.n[i],
            state.p[i],
            state.d[i],
            state.v[i],
        ];
        let cols: Vec<String> = row.iter().map(|&x| fmt_f(x)).collect();
        buf.push_str(&cols.join(","));
        buf.push('\n');
    }
    fs::write(path, buf)
}

pub fn write_summary(path: &Path, lines: &[String]) -> io::Result<()> {
    let mut f = fs::File::create(path)?;
    for line in lines {
        writeln!(f, "{line}")?;
    }
    Ok(())
}
