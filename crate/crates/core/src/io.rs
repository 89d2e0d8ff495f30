//! Plain-text artifacts: nodal field files, iteration traces and summary
//! rows. Numbers are written with Rust's shortest round-trip formatting, so
//! parsing a file back reproduces every value bit for bit.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::discretization::{Mesh, MeshFunction};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::solvers::SolveOutcome;

pub const FIELD_HEADER: &str = "# vertex,x,y,value";
pub const TRACE_HEADER: &str = "# iteration,energy,residual";
pub const SUMMARY_HEADER: &str = "kind,energy,residual,iterations,seed,converged";

pub fn field_to_text<T: Scalar>(u: &MeshFunction<T>) -> String {
    let mut s = String::with_capacity(48 * u.values().len());
    s.push_str(FIELD_HEADER);
    s.push('\n');
    for (i, (x, v)) in u.mesh().vertices().iter().zip(u.values()).enumerate() {
        let _ = writeln!(s, "{i},{},{},{}", x[0], x[1], v);
    }
    s
}

/// Reads a field file written for `mesh`. Vertex coordinates must agree
/// with the mesh to a relative `1e-9`.
pub fn field_from_text<T: Scalar>(mesh: Arc<Mesh<T>>, text: &str) -> Result<MeshFunction<T>> {
    let bad = |line: usize, msg: &str| Error::InvalidArgument(format!("field file line {}: {msg}", line + 1));
    let mut values = vec![None; mesh.num_vertices()];
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 4 {
            return Err(bad(ln, "expected vertex,x,y,value"));
        }
        let idx: usize = parts[0].trim().parse().map_err(|_| bad(ln, "bad vertex index"))?;
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(ln, "bad number"));
        let (x, y, v) = (num(parts[1])?, num(parts[2])?, num(parts[3])?);
        let Some(p) = mesh.vertices().get(idx) else {
            return Err(bad(ln, "vertex index out of range"));
        };
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0);
        if !close(x, p[0].as_f64()) || !close(y, p[1].as_f64()) {
            return Err(bad(ln, "coordinates do not match the mesh"));
        }
        values[idx] = Some(T::lit(v));
    }
    let values: Vec<T> = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Error::InvalidArgument(format!("field file has no row for vertex {i}"))))
        .collect::<Result<_>>()?;
    MeshFunction::from_values(mesh, values)
}

pub fn trace_to_text<T: Scalar>(trace: &[(T, T)]) -> String {
    let mut s = String::from(TRACE_HEADER);
    s.push('\n');
    for (i, (e, r)) in trace.iter().enumerate() {
        let _ = writeln!(s, "{i},{e},{r}");
    }
    s
}

/// One CSV row matching [`SUMMARY_HEADER`].
pub fn summary_row<T: Scalar>(o: &SolveOutcome<T>) -> String {
    let seed = o.seed.map(|s| s.to_string()).unwrap_or_default();
    format!(
        "{},{},{},{},{},{}",
        o.kind.name(),
        o.energy,
        o.residual_norm,
        o.iterations,
        seed,
        o.converged
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_round_trip_is_exact() {
        let mesh = Arc::new(Mesh::<f64>::unit_square(5).unwrap());
        let u = MeshFunction::from_fn(mesh.clone(), |x| (x[0] * 3.1).sin() * x[1] / 7.0);
        let text = field_to_text(&u);
        assert!(text.starts_with("# vertex,x,y,value\n"));
        let back = field_from_text(mesh, &text).unwrap();
        assert_eq!(back.values(), u.values());
    }

    #[test]
    fn missing_rows_are_reported() {
        let mesh = Arc::new(Mesh::<f64>::unit_square(3).unwrap());
        let err = field_from_text(mesh, "# vertex,x,y,value\n0,0,0,0\n").unwrap_err();
        assert!(err.to_string().contains("vertex 1"));
    }
}
