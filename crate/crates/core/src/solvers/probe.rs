//! Growth of `φ` along members of `M` with growing norm.
//!
//! Projection onto `M` is invariant under `u ↦ c·u`, so amplitude alone
//! cannot move along `M`. Each scale instead selects an oscillation mode
//! `sin(2kπx̂) sin(πŷ)` with `k` the rounded scale; finer modes project to
//! members of larger norm.

use super::nodal::nodal_start;
use crate::energy::Functional;
use crate::nehari::{project_to_m, ProjectionOptions};
use crate::sampling;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct CoercivityRow<T> {
    pub scale: T,
    /// Number of sign lobes in `x`.
    pub mode: usize,
    /// `‖projected‖`.
    pub norm: T,
    pub plus_norm: T,
    pub minus_norm: T,
    /// `φ(projected)`.
    pub energy: T,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct CoercivityTable<T> {
    pub rows: Vec<CoercivityRow<T>>,
    /// Energy of the last successful row exceeds the first, and increases
    /// outnumber decreases between consecutive rows.
    pub trend_increasing: bool,
}

impl<T: Scalar> CoercivityTable<T> {
    /// Smallest part norm over successful rows.
    pub fn min_part_norm(&self) -> T {
        self.rows
            .iter()
            .filter(|r| r.error.is_none())
            .fold(T::infinity(), |m, r| m.min(r.plus_norm).min(r.minus_norm))
    }
}

pub fn coercivity_probe<T: Scalar>(functional: &Functional<T>, scales: &[T], opts: &ProjectionOptions<T>) -> CoercivityTable<T> {
    let mesh = functional.mesh();
    let rows: Vec<CoercivityRow<T>> = scales
        .iter()
        .map(|&scale| {
            let k = scale.as_f64().round().max(1.0) as usize;
            let mode = 2 * k;
            let mut row = CoercivityRow {
                scale,
                mode,
                norm: T::nan(),
                plus_norm: T::nan(),
                minus_norm: T::nan(),
                energy: T::nan(),
                error: None,
            };
            if 2 * mode > mesh.nx() {
                row.error = Some(format!("mode {mode} is too fine for nx = {}", mesh.nx()));
                return row;
            }
            let u = sampling::separate_supports(&sampling::sine_mode(mesh, mode, 1).scale(scale));
            let u = if u.is_sign_changing() { u } else { nodal_start(mesh, k as u64) };
            let result = project_to_m(functional, &u, opts).and_then(|pair| {
                let (p, m) = pair.projected.split_parts();
                Ok((functional.norm(&pair.projected)?, functional.norm(&p)?, functional.norm(&m)?, functional.phi(&pair.projected).phi))
            });
            match result {
                Ok((n, np, nm, e)) => {
                    row.norm = n;
                    row.plus_norm = np;
                    row.minus_norm = nm;
                    row.energy = e;
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            row
        })
        .collect();
    let ok: Vec<&CoercivityRow<T>> = rows.iter().filter(|r| r.error.is_none()).collect();
    let trend_increasing = ok.len() >= 2 && {
        let ups = ok.windows(2).filter(|w| w[1].energy > w[0].energy).count();
        let downs = ok.windows(2).count() - ups;
        ok[ok.len() - 1].energy > ok[0].energy && ups >= downs
    };
    CoercivityTable { rows, trend_increasing }
}
