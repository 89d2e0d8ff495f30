//! Least-energy sign-changing solution: preconditioned descent on
//! `u ↦ φ(α_u u⁺ − β_u u⁻)` with reprojection onto `M` after every step.
//!
//! At `u ∈ M` the derivative of the reduced functional along `v` equals
//! `⟨φ′(u), v⟩` (the scaling terms drop because `Λ_u(1, 1) = 0`), so the
//! ordinary residual is the descent direction.

use std::sync::Arc;

use rayon::prelude::*;

use super::mountain_pass::{energy_noise, flat_accept};
use super::{SolutionKind, SolveOutcome, SolverOptions};
use crate::discretization::{Mesh, MeshFunction};
use crate::energy::Functional;
use crate::error::Result;
use crate::linalg::Preconditioner;
use crate::nehari::{project_fiber, project_to_m, rescale_near_m, Fiber, ProjectionOptions};
use crate::sampling;
use crate::scalar::Scalar;

/// Smooth random start with a forced sign change and separated supports.
pub fn nodal_start<T: Scalar>(mesh: &Arc<Mesh<T>>, seed: u64) -> MeshFunction<T> {
    sampling::random_sign_changing(mesh, &mut sampling::rng(seed))
}

/// Trial reprojection accuracy. Projection error feeds straight into the
/// residual, so the default projection tolerance leaves a floor near `1e-6`.
const REPROJECT_TOL: f64 = 1e-11;

fn descend<T: Scalar>(
    functional: &Functional<T>,
    start: &MeshFunction<T>,
    seed: u64,
    opts: &SolverOptions<T>,
    precond: &Preconditioner<T>,
) -> Result<SolveOutcome<T>> {
    let mesh = functional.mesh().clone();
    let proj = ProjectionOptions {
        start: None,
        tol: opts.projection.tol.min(T::lit(REPROJECT_TOL)),
        ..opts.projection
    };
    let mut u = project_to_m(functional, start, &proj)?.projected;
    let mut energy = functional.phi(&u).phi;
    let mut trace = Vec::new();
    let mut step = T::one();
    let mut converged = false;
    let mut iterations = 0;
    let max_step = T::lit(1e8);
    let min_step = T::lit(1e-14);
    let mut residual_norm;
    loop {
        let r = functional.residual(&u, None)?;
        residual_norm = r.norm;
        trace.push((energy, r.norm));
        if r.norm <= opts.tol {
            converged = true;
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }
        let d = precond.apply(functional, &u, &r.values)?;
        let slope: T = r.values.iter().zip(&d).map(|(&a, &b)| a * b).sum();
        let interior = u.interior_values();
        let mut accepted = false;
        while step >= min_step {
            let trial: Vec<T> = interior.iter().zip(&d).map(|(&x, &dx)| x - step * dx).collect();
            let v = MeshFunction::from_interior(mesh.clone(), &trial)?;
            if let Some((w, ev)) = reproject(functional, &v, &proj) {
                let ok = if (ev - energy).abs() <= energy_noise(energy) {
                    let rw = functional.residual(&w, None)?;
                    let slope_w: T = rw.values.iter().zip(&d).map(|(&a, &b)| a * b).sum();
                    flat_accept(slope, slope_w, opts.armijo)
                } else {
                    ev <= energy - opts.armijo * step * slope
                };
                if ok {
                    u = w;
                    energy = ev;
                    accepted = true;
                    break;
                }
            }
            step = step * opts.backtrack;
        }
        iterations += 1;
        if !accepted {
            break;
        }
        step = (step / opts.backtrack).min(max_step);
    }
    // the accepted iterate lies on M, so this pair is (1, 1) up to the
    // projection tolerance; it certifies the final bracket
    let pair = project_to_m(functional, &u, &proj)?;
    Ok(SolveOutcome {
        solution: u,
        kind: SolutionKind::Nodal,
        energy,
        residual_norm,
        iterations,
        trace,
        pair: Some(pair),
        seed: Some(seed),
        converged,
    })
}

/// Projection of a descent trial: Newton from `(1, 1)` first, the full
/// bracketed solve if that fails. Returns the projected function and its
/// energy.
fn reproject<T: Scalar>(functional: &Functional<T>, v: &MeshFunction<T>, opts: &ProjectionOptions<T>) -> Option<(MeshFunction<T>, T)> {
    let fiber = Fiber::new(functional, v).ok()?;
    if let Some((a, b, point)) = rescale_near_m(&fiber, (T::one(), T::one()), opts) {
        return Some((fiber.combine(a, b), point.energy));
    }
    let pair = project_fiber(&fiber, opts).ok()?;
    let e = fiber.upsilon(pair.alpha, pair.beta);
    Some((pair.projected, e))
}

/// One descent per start, seeds `seed, seed + 1, …`, run concurrently.
/// Results come back in seed order.
pub fn nodal_runs<T: Scalar>(functional: &Functional<T>, opts: &SolverOptions<T>) -> Result<Vec<Result<SolveOutcome<T>>>> {
    let precond = Preconditioner::new(opts.preconditioner_for(SolutionKind::Nodal), functional.mesh())?;
    Ok((0..opts.starts.max(1) as u64)
        .into_par_iter()
        .map(|i| {
            let seed = opts.seed.wrapping_add(i);
            let start = nodal_start(functional.mesh(), seed);
            descend(functional, &start, seed, opts, &precond)
        })
        .collect())
}

/// Lowest-energy converged outcome over all starts, ties broken by seed
/// order. Without any converged start, the lowest-energy unconverged
/// outcome is returned with `converged = false`; its energy bounds the
/// discrete `m₀` from above.
pub fn minimize_over_m<T: Scalar>(functional: &Functional<T>, opts: &SolverOptions<T>) -> Result<SolveOutcome<T>> {
    let runs = nodal_runs(functional, opts)?;
    let mut best: Option<SolveOutcome<T>> = None;
    let mut first_err = None;
    for run in runs {
        match run {
            Ok(o) => {
                let better = match &best {
                    None => true,
                    Some(b) => (o.converged && !b.converged) || (o.converged == b.converged && o.energy < b.energy),
                };
                if better {
                    best = Some(o);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    match best {
        Some(b) => Ok(b),
        None => Err(first_err.expect("at least one start")),
    }
}
