//! Mountain-pass iteration for the truncated functionals `φ±`.
//!
//! Paths from `0` to a far endpoint are rays through the current iterate.
//! Each iteration moves the ray's peak one preconditioned descent step and
//! re-maximizes along the new ray, so the path maximum decreases
//! monotonically until the peak is a critical point.

use rand::Rng;

use super::{SolutionKind, SolveOutcome, SolverOptions};
use crate::discretization::MeshFunction;
use crate::energy::{Functional, Sign};
use crate::error::{invalid, Error, Result};
use crate::linalg::Preconditioner;
use crate::roots::bracketed_root;
use crate::sampling;
use crate::scalar::Scalar;

/// Discretized path from `0` to a point of negative truncated energy.
#[derive(Debug, Clone)]
pub struct MountainPassPath<T> {
    pub nodes: Vec<MeshFunction<T>>,
    pub energies: Vec<T>,
}

impl<T: Scalar> MountainPassPath<T> {
    pub fn peak_index(&self) -> usize {
        let mut best = 0;
        for (i, e) in self.energies.iter().enumerate() {
            if *e > self.energies[best] {
                best = i;
            }
        }
        best
    }

    /// First node is `0` and the last has negative energy.
    pub fn is_valid(&self) -> bool {
        self.nodes.first().is_some_and(|n| n.is_zero()) && self.energies.last().is_some_and(|e| *e < T::zero())
    }
}

fn sign_kind(sign: Sign) -> SolutionKind {
    match sign {
        Sign::Plus => SolutionKind::Positive,
        Sign::Minus => SolutionKind::Negative,
    }
}

/// `t·direction` with `t = 2ᵏ` the first doubling where `φ±` drops below
/// `−1`. `direction` is nonnegative; for `Sign::Minus` it is negated.
pub fn find_far_endpoint<T: Scalar>(
    functional: &Functional<T>,
    sign: Sign,
    direction: &MeshFunction<T>,
) -> Result<(T, MeshFunction<T>)> {
    if direction.min_value() < T::zero() || direction.is_zero() {
        return Err(invalid("direction must be nonnegative and nonzero"));
    }
    let dir = direction.scale(sign.factor());
    let mut t = T::one();
    for _ in 0..=60 {
        let e = dir.scale(t);
        if functional.energy(&e, Some(sign)) < -T::one() {
            return Ok((t, e));
        }
        t = t * T::lit(2.0);
    }
    Err(Error::Configuration(format!(
        "energy along the ray stays above -1 up to t = {}: the nonlinearity is not superlinear on this mesh",
        t.as_f64()
    )))
}

/// Maximizer `t*` of `t ↦ φ±(t·dir)` and the peak value.
pub fn ray_peak<T: Scalar>(functional: &Functional<T>, sign: Sign, dir: &MeshFunction<T>) -> Result<(T, T)> {
    let slope = |t: T| functional.directional(&dir.scale(t), dir, Some(sign));
    let two = T::lit(2.0);
    let (mut lo, mut hi) = (T::one(), T::one());
    if slope(T::one()) > T::zero() {
        for _ in 0..200 {
            hi = hi * two;
            let s = slope(hi);
            if !s.is_finite() {
                break;
            }
            if s <= T::zero() {
                break;
            }
            lo = hi;
        }
    } else {
        for _ in 0..200 {
            lo = lo / two;
            if slope(lo) > T::zero() {
                break;
            }
            hi = lo;
        }
    }
    let t = bracketed_root(slope, lo, hi, T::lit(1e-13))
        .map_err(|e| Error::Configuration(format!("no energy peak along the ray: {e}")))?;
    Ok((t, functional.energy(&dir.scale(t), Some(sign))))
}

/// Uniform ray `0 → t_far·u` with the peak `u` itself inserted in order.
fn ray_path<T: Scalar>(functional: &Functional<T>, sign: Sign, peak: &MeshFunction<T>, n: usize) -> Result<MountainPassPath<T>> {
    let mut t_far = T::lit(2.0);
    while functional.energy(&peak.scale(t_far), Some(sign)) >= T::zero() {
        t_far = t_far * T::lit(2.0);
        if t_far > T::lit(1e18) {
            return Err(Error::Configuration("path endpoint not found".into()));
        }
    }
    let n = n.max(3);
    let mut ts: Vec<T> = (0..n).map(|i| t_far * T::lit(i as f64 / (n - 1) as f64)).collect();
    if !ts.contains(&T::one()) {
        ts.push(T::one());
        ts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    }
    let nodes: Vec<MeshFunction<T>> = ts.iter().map(|&t| peak.scale(t)).collect();
    let energies = nodes.iter().map(|u| functional.energy(u, Some(sign))).collect();
    Ok(MountainPassPath { nodes, energies })
}

/// Energy differences below this are roundoff.
pub(crate) fn energy_noise<T: Scalar>(energy: T) -> T {
    T::lit(64.0) * T::epsilon() * energy.abs().max(T::one())
}

/// Sufficient decrease judged from slopes when the energy change is lost in
/// roundoff (the approximate Armijo condition of Hager and Zhang): along the
/// move, the derivative at the trial may not fall below `−(1 − 2c)` times the
/// initial one. `slope0` and `slope_trial` are residuals paired with the move.
pub(crate) fn flat_accept<T: Scalar>(slope0: T, slope_trial: T, c: T) -> bool {
    slope0 > T::zero() && slope_trial >= -(T::one() - T::lit(2.0) * c) * slope0
}

fn clamp_to_cone<T: Scalar>(sign: Sign, x: T) -> T {
    match sign {
        Sign::Plus => x.max(T::zero()),
        Sign::Minus => x.min(T::zero()),
    }
}

pub fn mountain_pass<T: Scalar>(functional: &Functional<T>, sign: Sign, opts: &SolverOptions<T>) -> Result<SolveOutcome<T>> {
    mountain_pass_with_path(functional, sign, opts).map(|(o, _)| o)
}

/// Runs the iteration from the sine bump and returns the outcome with the
/// last path. Budget exhaustion yields `converged = false` with the best
/// (last) iterate.
pub fn mountain_pass_with_path<T: Scalar>(
    functional: &Functional<T>,
    sign: Sign,
    opts: &SolverOptions<T>,
) -> Result<(SolveOutcome<T>, MountainPassPath<T>)> {
    let mesh = functional.mesh().clone();
    let bump = sampling::sine_bump(&mesh);
    let (t_far, _) = find_far_endpoint(functional, sign, &bump)?;
    let dir = bump.scale(sign.factor::<T>() * t_far);
    let (t, _) = ray_peak(functional, sign, &dir)?;
    let mut u = dir.scale(t);
    let mut path = ray_path(functional, sign, &u, opts.path_nodes)?;
    let precond = Preconditioner::new(opts.preconditioner_for(sign_kind(sign)), &mesh)?;

    let mut trace = Vec::new();
    let mut energy = functional.energy(&u, Some(sign));
    let mut step = T::one();
    let mut converged = false;
    let mut iterations = 0;
    let max_step = T::lit(1e8);
    let min_step = T::lit(1e-14);
    while iterations < opts.max_iter {
        let r = functional.residual(&u, Some(sign))?;
        trace.push((energy, r.norm));
        if r.norm <= opts.tol {
            converged = true;
            break;
        }
        let d = precond.apply(functional, &u, &r.values)?;
        let interior = u.interior_values();
        let mut accepted = false;
        while step >= min_step {
            let trial: Vec<T> = interior
                .iter()
                .zip(&d)
                .map(|(&x, &dx)| clamp_to_cone(sign, x - step * dx))
                .collect();
            let v = MeshFunction::from_interior(mesh.clone(), &trial)?;
            if !v.is_zero() {
                let decrease: T = r.values.iter().zip(interior.iter().zip(&trial)).map(|(&ri, (&a, &b))| ri * (a - b)).sum();
                if let Ok((tv, ev)) = ray_peak(functional, sign, &v) {
                    let w = v.scale(tv);
                    let ok = if (ev - energy).abs() <= energy_noise(energy) {
                        let rw = functional.residual(&w, Some(sign))?;
                        let slope_w: T = rw.values.iter().zip(interior.iter().zip(&trial)).map(|(&ri, (&a, &b))| ri * (a - b)).sum();
                        flat_accept(decrease, slope_w, opts.armijo)
                    } else {
                        ev <= energy - opts.armijo * decrease
                    };
                    if ok {
                        u = w;
                        energy = ev;
                        accepted = true;
                        break;
                    }
                }
            }
            step = step * opts.backtrack;
        }
        iterations += 1;
        if !accepted {
            break;
        }
        step = (step / opts.backtrack).min(max_step);
        if opts.reequidistribute > 0 && iterations % opts.reequidistribute == 0 {
            path = ray_path(functional, sign, &u, opts.path_nodes)?;
        }
    }
    if path.nodes.iter().all(|n| n.values() != u.values()) {
        path = ray_path(functional, sign, &u, opts.path_nodes)?;
    }
    let full = functional.residual(&u, None)?;
    let outcome = SolveOutcome {
        energy: functional.phi(&u).phi,
        residual_norm: full.norm,
        solution: u,
        kind: sign_kind(sign),
        iterations,
        trace,
        pair: None,
        seed: None,
        converged,
    };
    Ok((outcome, path))
}

/// Largest `φ±` over `samples` random constant-sign functions on the
/// sphere `‖u‖ = radius`. The mountain-pass level must exceed it.
pub fn small_sphere_level<T: Scalar>(
    functional: &Functional<T>,
    sign: Sign,
    radius: T,
    samples: usize,
    seed: u64,
) -> Result<T> {
    let mut rng = sampling::rng(seed);
    let mut best = T::neg_infinity();
    for _ in 0..samples {
        let dir = if rng.gen_bool(0.5) {
            sampling::random_positive(functional.mesh(), &mut rng)
        } else {
            sampling::random_smooth(functional.mesh(), &mut rng, 4).map(|x| x.abs())
        };
        let n = functional.norm(&dir)?;
        if n == T::zero() {
            continue;
        }
        let u = dir.scale(sign.factor::<T>() * radius / n);
        best = best.max(functional.energy(&u, Some(sign)));
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationVerdict<T> {
    /// `ρ_H` of the gradient of the part that should vanish.
    pub wrong_part_modular: T,
    pub holds: bool,
}

/// Checks that the wrong-sign part of a constant-sign outcome has
/// vanishing modular (at most `1e-10`).
pub fn truncation_consistency<T: Scalar>(functional: &Functional<T>, outcome: &SolveOutcome<T>) -> Result<TruncationVerdict<T>> {
    let (plus, minus) = outcome.solution.split_parts();
    let wrong = match outcome.kind {
        SolutionKind::Positive => minus,
        SolutionKind::Negative => plus,
        SolutionKind::Nodal => return Err(invalid("truncation consistency applies to constant-sign outcomes")),
    };
    let m = functional.modular(&wrong);
    Ok(TruncationVerdict {
        wrong_part_modular: m,
        holds: m <= T::lit(1e-10),
    })
}
