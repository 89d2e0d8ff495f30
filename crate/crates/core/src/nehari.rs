//! The constraint set `M` of sign-changing functions `u` with
//! `⟨φ′(u), u⁺⟩ = 0 = ⟨φ′(u), −u⁻⟩`, reached by rescaling the two parts.
//!
//! For fixed `u` the map `Λ_u(α, β) = (⟨φ′(w), αu⁺⟩, ⟨φ′(w), −βu⁻⟩)` with
//! `w = αu⁺ − βu⁻` has a unique zero in the open quadrant. It is located by
//! a damped Newton iteration inside a sign-validated box, with a quad-tree
//! box bisection as fallback.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::discretization::MeshFunction;
use crate::energy::Functional;
use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Everything `Λ_u` and `Υ_u` need from `u`, with the parts pre-split so
/// that each evaluation is a single pass over triangles and quadrature
/// nodes.
pub struct Fiber<'a, T> {
    functional: &'a Functional<T>,
    plus: MeshFunction<T>,
    minus: MeshFunction<T>,
    grad_plus: Vec<[T; 2]>,
    grad_minus: Vec<[T; 2]>,
    qp_plus: Vec<T>,
    qp_minus: Vec<T>,
}

/// `Λ_u`, `Υ_u` and the tolerance scale `ψ(Φ_H(∇w))·ρ_H(∇w)` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberPoint<T> {
    pub g_plus: T,
    pub g_minus: T,
    pub energy: T,
    pub scale: T,
    /// `g±` divided by the sum of the magnitudes of its operator and load
    /// terms: same zeros, values in `[−1, 1]`.
    pub n_plus: T,
    pub n_minus: T,
}

impl<'a, T: Scalar> Fiber<'a, T> {
    pub fn new(functional: &'a Functional<T>, u: &MeshFunction<T>) -> Result<Self> {
        let (plus, minus) = u.split_parts();
        if plus.is_zero() || minus.is_zero() {
            return Err(invalid("u must be sign-changing"));
        }
        let grad_plus = plus.gradient().values().to_vec();
        let grad_minus = minus.gradient().values().to_vec();
        let table = functional.table();
        let mesh = functional.mesh();
        let mut qp_plus = Vec::with_capacity(table.per_triangle() * mesh.num_triangles());
        let mut qp_minus = Vec::with_capacity(qp_plus.capacity());
        for t in 0..mesh.num_triangles() {
            for k in table.range(t) {
                qp_plus.push(plus.eval_bary(t, table.bary(k)));
                qp_minus.push(minus.eval_bary(t, table.bary(k)));
            }
        }
        Ok(Self {
            functional,
            plus,
            minus,
            grad_plus,
            grad_minus,
            qp_plus,
            qp_minus,
        })
    }

    pub fn functional(&self) -> &Functional<T> {
        self.functional
    }

    /// `u⁺`.
    pub fn plus(&self) -> &MeshFunction<T> {
        &self.plus
    }

    /// `u⁻ = max(−u, 0)`.
    pub fn minus(&self) -> &MeshFunction<T> {
        &self.minus
    }

    /// `αu⁺ − βu⁻`.
    pub fn combine(&self, alpha: T, beta: T) -> MeshFunction<T> {
        self.plus.combine(alpha, &self.minus, -beta)
    }

    pub fn eval(&self, alpha: T, beta: T) -> FiberPoint<T> {
        let f = self.functional;
        let spec = f.spec();
        let mesh = f.mesh();
        let (p, q) = (spec.exps.p, spec.exps.q);
        let mu = f.space().mu_cell();
        let areas = mesh.areas();

        let mut big_phi = T::zero();
        let mut modular = T::zero();
        let mut pair_plus = T::zero();
        let mut pair_minus = T::zero();
        for t in 0..mesh.num_triangles() {
            let (gp, gm) = (self.grad_plus[t], self.grad_minus[t]);
            let g = [alpha * gp[0] - beta * gm[0], alpha * gp[1] - beta * gm[1]];
            let m = (g[0] * g[0] + g[1] * g[1]).sqrt();
            let (mp, mq) = (m.pow_real(p), mu[t] * m.pow_real(q));
            big_phi += areas[t] * (mp / p + mq / q);
            modular += areas[t] * (mp + mq);
            let c = areas[t] * f.flux_coefficient(g, mu[t]);
            pair_plus += c * alpha * (g[0] * gp[0] + g[1] * gp[1]);
            pair_minus -= c * beta * (g[0] * gm[0] + g[1] * gm[1]);
        }
        let psi = spec.kirchhoff.psi_unchecked(big_phi);
        let (a_term, b_term) = spec.kirchhoff.big_psi_terms(big_phi);

        let table = f.table();
        let nl = &spec.f;
        let mut load_plus = T::zero();
        let mut load_minus = T::zero();
        let mut potential = T::zero();
        for (k, (&up, &um)) in self.qp_plus.iter().zip(&self.qp_minus).enumerate() {
            let w = alpha * up - beta * um;
            let wt = table.weight(k);
            let fw = nl.f_raw(w);
            load_plus += wt * fw * alpha * up;
            load_minus -= wt * fw * beta * um;
            potential += wt * nl.primitive_raw(w);
        }
        let normalized = |op: T, load: T| {
            let d = op.abs() + load.abs();
            if d > T::zero() {
                (op - load) / d
            } else {
                T::zero()
            }
        };
        FiberPoint {
            g_plus: psi * pair_plus - load_plus,
            g_minus: psi * pair_minus - load_minus,
            energy: a_term + b_term - potential,
            scale: psi * modular,
            n_plus: normalized(psi * pair_plus, load_plus),
            n_minus: normalized(psi * pair_minus, load_minus),
        }
    }

    /// `Λ_u(α, β)`.
    pub fn lambda(&self, alpha: T, beta: T) -> (T, T) {
        let e = self.eval(alpha, beta);
        (e.g_plus, e.g_minus)
    }

    /// `Υ_u(α, β) = φ(αu⁺ − βu⁻)`.
    pub fn upsilon(&self, alpha: T, beta: T) -> T {
        self.eval(alpha, beta).energy
    }
}

/// `Λ_u(α, β)` for a sign-changing `u`.
pub fn lambda_map<T: Scalar>(functional: &Functional<T>, u: &MeshFunction<T>, alpha: T, beta: T) -> Result<(T, T)> {
    if alpha < T::zero() || beta < T::zero() {
        return Err(invalid("alpha and beta must be nonnegative"));
    }
    Ok(Fiber::new(functional, u)?.lambda(alpha, beta))
}

/// Square `[η₁, η₂]²` on whose faces `Λ_u` has the Poincaré–Miranda sign
/// pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket<T> {
    pub eta1: T,
    pub eta2: T,
    /// Expansion rounds used.
    pub rounds: usize,
}

impl<T: Scalar> Bracket<T> {
    pub fn contains(&self, alpha: T, beta: T) -> bool {
        alpha >= self.eta1 && alpha <= self.eta2 && beta >= self.eta1 && beta <= self.eta2
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionOptions<T> {
    /// `‖Λ_u‖_∞ ≤ tol·ψ(Φ_H(∇w))·ρ_H(∇w)` at the accepted pair.
    pub tol: T,
    /// Samples per bracket face.
    pub face_samples: usize,
    pub max_rounds: usize,
    pub max_newton: usize,
    /// Relative finite-difference step for the Jacobian.
    pub fd_step: T,
    pub bisection_depth: usize,
    /// `false` skips Newton and goes straight to box bisection.
    pub newton: bool,
    /// Newton start; defaults to `(1, 1)` when inside the bracket, else the
    /// bracket's geometric center.
    pub start: Option<(T, T)>,
}

impl<T: Scalar> Default for ProjectionOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-9),
            face_samples: 16,
            max_rounds: 60,
            max_newton: 100,
            fd_step: T::lit(1e-6),
            bisection_depth: 60,
            newton: true,
            start: None,
        }
    }
}

/// The unique pair `(α_u, β_u)` and the projected function `α_u u⁺ − β_u u⁻ ∈ M`.
#[derive(Debug, Clone)]
pub struct NehariPair<T> {
    pub alpha: T,
    pub beta: T,
    pub bracket: Bracket<T>,
    /// `Λ_u(α_u, β_u)`.
    pub residual: (T, T),
    /// `ψ(Φ_H)·ρ_H` of the projected function.
    pub scale: T,
    pub projected: MeshFunction<T>,
    pub newton_iterations: usize,
    pub used_fallback: bool,
}

impl<T: Scalar> NehariPair<T> {
    /// `max(|g⁺|, |g⁻|) / scale`.
    pub fn relative_residual(&self) -> T {
        self.residual.0.abs().max(self.residual.1.abs()) / self.scale
    }
}

fn linspace<T: Scalar>(lo: T, hi: T, n: usize) -> impl Iterator<Item = T> {
    let n = n.max(2);
    (0..n).map(move |i| lo + (hi - lo) * T::lit(i as f64 / (n - 1) as f64))
}

/// Which faces of `[a0,a1]×[b0,b1]` keep their sign: `(inner, outer)` where
/// inner means `g⁺ > 0` on `α = a0` and `g⁻ > 0` on `β = b0`.
fn face_signs<T: Scalar>(fiber: &Fiber<T>, a: (T, T), b: (T, T), k: usize) -> (bool, bool) {
    let inner = linspace(b.0, b.1, k).all(|beta| fiber.lambda(a.0, beta).0 > T::zero())
        && linspace(a.0, a.1, k).all(|alpha| fiber.lambda(alpha, b.0).1 > T::zero());
    let outer = linspace(b.0, b.1, k).all(|beta| fiber.lambda(a.1, beta).0 < T::zero())
        && linspace(a.0, a.1, k).all(|alpha| fiber.lambda(alpha, b.1).1 < T::zero());
    (inner, outer)
}

fn initial_bracket<T: Scalar>(fiber: &Fiber<T>) -> (T, T) {
    let f = fiber.functional();
    let spec = f.spec();
    let rho = f.space().modular(&fiber.combine(T::one(), T::one()).gradient());
    let gap = spec.f.growth() - spec.q_theta();
    let mut scale = if gap > T::zero() && rho > T::zero() {
        rho.powf(-T::one() / gap)
    } else {
        T::one()
    };
    if !scale.is_finite() || scale <= T::zero() {
        scale = T::one();
    }
    (T::lit(0.5) * scale.min(T::one()), T::lit(2.0) * scale.max(T::one()))
}

/// Expands `[η₁, η₂]²` geometrically until every sampled face carries the
/// required sign.
pub fn find_bracket_fiber<T: Scalar>(fiber: &Fiber<T>, opts: &ProjectionOptions<T>) -> Result<Bracket<T>> {
    let (mut eta1, mut eta2) = initial_bracket(fiber);
    let two = T::lit(2.0);
    for rounds in 0..=opts.max_rounds {
        let (inner, outer) = face_signs(fiber, (eta1, eta2), (eta1, eta2), opts.face_samples);
        if inner && outer {
            return Ok(Bracket { eta1, eta2, rounds });
        }
        if rounds == opts.max_rounds {
            let face = match (inner, outer) {
                (false, false) => "inner and outer faces",
                (false, true) => "inner face",
                _ => "outer face",
            };
            return Err(Error::BracketFailure {
                rounds,
                eta1: eta1.as_f64(),
                eta2: eta2.as_f64(),
                detail: format!("no sign change on the {face}"),
            });
        }
        if !inner {
            eta1 = eta1 / two;
        }
        if !outer {
            eta2 = eta2 * two;
        }
    }
    unreachable!()
}

pub fn find_bracket<T: Scalar>(
    functional: &Functional<T>,
    u: &MeshFunction<T>,
    opts: &ProjectionOptions<T>,
) -> Result<Bracket<T>> {
    find_bracket_fiber(&Fiber::new(functional, u)?, opts)
}

fn converged<T: Scalar>(e: &FiberPoint<T>, tol: T) -> bool {
    e.g_plus.abs().max(e.g_minus.abs()) <= tol * e.scale
}

struct NewtonResult<T> {
    alpha: T,
    beta: T,
    point: FiberPoint<T>,
    iterations: usize,
}

/// Damped Newton on the normalized `Λ_u` in logarithmic coordinates, which
/// keeps both scalings positive and makes the difference step relative.
/// The raw map grows by orders of magnitude between `(1, 1)` and a distant
/// root, so it is useless as a merit function; the normalized one is not.
fn newton<T: Scalar>(fiber: &Fiber<T>, start: (T, T), opts: &ProjectionOptions<T>) -> Option<NewtonResult<T>> {
    let (mut x, mut y) = (start.0.ln(), start.1.ln());
    let mut e = fiber.eval(start.0, start.1);
    let h = opts.fd_step;
    let merit = |e: &FiberPoint<T>| (e.n_plus * e.n_plus + e.n_minus * e.n_minus).sqrt();
    for it in 0..=opts.max_newton {
        if !e.g_plus.is_finite() || !e.g_minus.is_finite() {
            return None;
        }
        if converged(&e, opts.tol) {
            return Some(NewtonResult {
                alpha: x.exp(),
                beta: y.exp(),
                point: e,
                iterations: it,
            });
        }
        if it == opts.max_newton {
            break;
        }
        let ex = fiber.eval((x + h).exp(), y.exp());
        let ey = fiber.eval(x.exp(), (y + h).exp());
        let j11 = (ex.n_plus - e.n_plus) / h;
        let j21 = (ex.n_minus - e.n_minus) / h;
        let j12 = (ey.n_plus - e.n_plus) / h;
        let j22 = (ey.n_minus - e.n_minus) / h;
        let det = j11 * j22 - j12 * j21;
        if det == T::zero() || !det.is_finite() {
            return None;
        }
        let dx = -(j22 * e.n_plus - j12 * e.n_minus) / det;
        let dy = -(-j21 * e.n_plus + j11 * e.n_minus) / det;
        // far from the root the normalized map saturates and the raw step
        // explodes; at most a factor e² per iteration
        let cap = T::lit(2.0) / dx.abs().max(dy.abs()).max(T::lit(2.0));
        let (dx, dy) = (dx * cap, dy * cap);
        let m0 = merit(&e);
        let mut lambda = T::one();
        let mut accepted = false;
        for _ in 0..40 {
            let (nx, ny) = (x + lambda * dx, y + lambda * dy);
            let trial = fiber.eval(nx.exp(), ny.exp());
            let m1 = merit(&trial);
            if m1.is_finite() && m1 < (T::one() - T::lit(1e-4) * lambda) * m0 {
                x = nx;
                y = ny;
                e = trial;
                accepted = true;
                break;
            }
            lambda = lambda * T::lit(0.5);
        }
        if !accepted {
            return None;
        }
    }
    None
}

/// Newton from `start` with no bracket: cheap rescaling of a function
/// that is already close to `M`. Returns `(α, β, Λ and Υ at the root)`.
pub fn rescale_near_m<T: Scalar>(
    fiber: &Fiber<T>,
    start: (T, T),
    opts: &ProjectionOptions<T>,
) -> Option<(T, T, FiberPoint<T>)> {
    newton(fiber, start, opts).map(|r| (r.alpha, r.beta, r.point))
}

/// Quad-tree Poincaré–Miranda bisection: keeps a child box whose sampled
/// faces retain the sign pattern. When sampling cannot certify any child,
/// the one whose center has the smallest relative residual is kept.
fn bisect<T: Scalar>(fiber: &Fiber<T>, bracket: &Bracket<T>, opts: &ProjectionOptions<T>) -> (T, T) {
    let (mut a, mut b) = ((bracket.eta1, bracket.eta2), (bracket.eta1, bracket.eta2));
    let half = T::lit(0.5);
    let rel = |e: &FiberPoint<T>| e.g_plus.abs().max(e.g_minus.abs()) / e.scale;
    for _ in 0..opts.bisection_depth {
        let am = half * (a.0 + a.1);
        let bm = half * (b.0 + b.1);
        if converged(&fiber.eval(am, bm), opts.tol) {
            break;
        }
        let children = [((a.0, am), (b.0, bm)), ((am, a.1), (b.0, bm)), ((a.0, am), (bm, b.1)), ((am, a.1), (bm, b.1))];
        let certified = children
            .iter()
            .find(|(ca, cb)| face_signs(fiber, *ca, *cb, opts.face_samples) == (true, true));
        let next = match certified {
            Some(c) => *c,
            None => *children
                .iter()
                .min_by(|(ca, cb), (da, db)| {
                    let ec = rel(&fiber.eval(half * (ca.0 + ca.1), half * (cb.0 + cb.1)));
                    let ed = rel(&fiber.eval(half * (da.0 + da.1), half * (db.0 + db.1)));
                    ec.partial_cmp(&ed).unwrap_or(std::cmp::Ordering::Equal)
                })
                .expect("four children"),
        };
        a = next.0;
        b = next.1;
    }
    (half * (a.0 + a.1), half * (b.0 + b.1))
}

/// Solves `Λ_u(α, β) = 0` inside a validated bracket.
pub fn project_fiber<T: Scalar>(fiber: &Fiber<T>, opts: &ProjectionOptions<T>) -> Result<NehariPair<T>> {
    let bracket = find_bracket_fiber(fiber, opts)?;
    let start = opts.start.unwrap_or_else(|| {
        if bracket.contains(T::one(), T::one()) {
            (T::one(), T::one())
        } else {
            let c = (bracket.eta1 * bracket.eta2).sqrt();
            (c, c)
        }
    });
    let finish = |r: NewtonResult<T>, used_fallback: bool| NehariPair {
        alpha: r.alpha,
        beta: r.beta,
        bracket,
        residual: (r.point.g_plus, r.point.g_minus),
        scale: r.point.scale,
        projected: fiber.combine(r.alpha, r.beta),
        newton_iterations: r.iterations,
        used_fallback,
    };
    if opts.newton {
        if let Some(r) = newton(fiber, start, opts) {
            if bracket.contains(r.alpha, r.beta) {
                return Ok(finish(r, false));
            }
        }
    }
    let center = bisect(fiber, &bracket, opts);
    if let Some(r) = newton(fiber, center, opts) {
        if bracket.contains(r.alpha, r.beta) {
            return Ok(finish(r, true));
        }
    }
    let e = fiber.eval(center.0, center.1);
    if converged(&e, opts.tol) {
        return Ok(finish(
            NewtonResult {
                alpha: center.0,
                beta: center.1,
                point: e,
                iterations: 0,
            },
            true,
        ));
    }
    Err(Error::ProjectionFailure(format!(
        "no root of Lambda_u in [{}, {}]^2: best ({}, {}) with residual ({}, {}) against scale {}",
        bracket.eta1.as_f64(),
        bracket.eta2.as_f64(),
        center.0.as_f64(),
        center.1.as_f64(),
        e.g_plus.as_f64(),
        e.g_minus.as_f64(),
        e.scale.as_f64()
    )))
}

/// Projects a sign-changing `u` onto `M`.
pub fn project_to_m<T: Scalar>(
    functional: &Functional<T>,
    u: &MeshFunction<T>,
    opts: &ProjectionOptions<T>,
) -> Result<NehariPair<T>> {
    project_fiber(&Fiber::new(functional, u)?, opts)
}

/// Runs the projection from several Newton starts concurrently.
pub fn project_from_starts<T: Scalar>(
    functional: &Functional<T>,
    u: &MeshFunction<T>,
    starts: &[(T, T)],
    opts: &ProjectionOptions<T>,
) -> Result<Vec<NehariPair<T>>> {
    let fiber = Fiber::new(functional, u)?;
    starts
        .par_iter()
        .map(|&s| {
            let o = ProjectionOptions { start: Some(s), ..*opts };
            project_fiber(&fiber, &o)
        })
        .collect()
}

/// `Υ_u` sampled on a rectangular `(α, β)` grid, stored row-major in `α`.
#[derive(Debug, Clone)]
pub struct FiberSample<T> {
    pub alphas: Vec<T>,
    pub betas: Vec<T>,
    pub values: Vec<T>,
}

impl<T: Scalar> FiberSample<T> {
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.betas.len() + j]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Grid rows `alpha,beta,value` under a `# alpha,beta,value` header.
    pub fn to_text(&self) -> String {
        let mut s = String::from("# alpha,beta,value\n");
        for (i, a) in self.alphas.iter().enumerate() {
            for (j, b) in self.betas.iter().enumerate() {
                let _ = writeln!(s, "{},{},{}", a, b, self.get(i, j));
            }
        }
        s
    }
}

/// Outcome of [`fiber_max_check`].
#[derive(Debug, Clone)]
pub struct FiberReport<T> {
    pub sample: FiberSample<T>,
    /// Grid indices of `(α_u, β_u)`, which are exact grid nodes.
    pub pair_index: (usize, usize),
    pub argmax: (usize, usize),
    pub max_value: T,
    pub pair_value: T,
    /// `Υ_u(α_u, β_u)` dominates every sample up to `1e-10` slack.
    pub max_at_pair: bool,
    /// Largest value on the axes `α = 0` and `β = 0`.
    pub boundary_max: T,
    pub boundary_below: bool,
    /// Radius at which the outer shell was found negative (or given up).
    pub shell_radius: T,
    pub shell_max: T,
    pub shell_negative: bool,
}

/// `n` nodes on `[0, top]` containing `pivot` exactly: linear up to the
/// pivot, geometric beyond.
fn hybrid_axis<T: Scalar>(pivot: T, top: T, n: usize) -> (Vec<T>, usize) {
    let n = n.max(4);
    let n_lin = n / 2 + 1;
    let n_geo = n - n_lin;
    let mut axis: Vec<T> = (0..n_lin)
        .map(|i| pivot * T::lit(i as f64 / (n_lin - 1) as f64))
        .collect();
    axis[n_lin - 1] = pivot;
    let ratio = top / pivot;
    for k in 1..=n_geo {
        axis.push(pivot * ratio.powf(T::lit(k as f64 / n_geo as f64)));
    }
    (axis, n_lin - 1)
}

/// Samples `Υ_u` on a `grid_n × grid_n` hybrid grid over `[0, 3η₂]²` and
/// checks that its maximum sits at `(α_u, β_u)`. The outer shell radius is
/// doubled until `Υ_u` is negative there.
pub fn fiber_max_check<T: Scalar>(
    functional: &Functional<T>,
    u: &MeshFunction<T>,
    pair: &NehariPair<T>,
    grid_n: usize,
) -> Result<FiberReport<T>> {
    let fiber = Fiber::new(functional, u)?;
    let top = T::lit(3.0) * pair.bracket.eta2;
    let (alphas, ia) = hybrid_axis(pair.alpha, top, grid_n);
    let (betas, jb) = hybrid_axis(pair.beta, top, grid_n);
    let nb = betas.len();
    let values: Vec<T> = (0..alphas.len() * nb)
        .into_par_iter()
        .map(|k| fiber.upsilon(alphas[k / nb], betas[k % nb]))
        .collect();
    let sample = FiberSample { alphas, betas, values };
    if !sample.is_finite() {
        return Err(Error::NumericDomain("non-finite fiber energy on the sample grid".into()));
    }
    let mut argmax = (0, 0);
    let mut max_value = T::neg_infinity();
    for i in 0..sample.alphas.len() {
        for j in 0..nb {
            let v = sample.get(i, j);
            if v > max_value {
                max_value = v;
                argmax = (i, j);
            }
        }
    }
    let pair_value = sample.get(ia, jb);
    let slack = T::lit(1e-10) * pair_value.abs().max(T::one());
    let mut boundary_max = T::neg_infinity();
    for i in 0..sample.alphas.len() {
        boundary_max = boundary_max.max(sample.get(i, 0));
    }
    for j in 0..nb {
        boundary_max = boundary_max.max(sample.get(0, j));
    }

    let mut radius = top;
    let mut shell_max = T::infinity();
    for _ in 0..=60 {
        shell_max = linspace(T::zero(), radius, grid_n)
            .flat_map(|s| [fiber.upsilon(radius, s), fiber.upsilon(s, radius)])
            .fold(T::neg_infinity(), |m, v| if v.is_nan() { T::infinity() } else { m.max(v) });
        if shell_max < T::zero() {
            break;
        }
        radius = radius * T::lit(2.0);
    }
    Ok(FiberReport {
        pair_index: (ia, jb),
        argmax,
        max_value,
        pair_value,
        max_at_pair: pair_value >= max_value - slack,
        boundary_max,
        boundary_below: boundary_max < pair_value,
        shell_radius: radius,
        shell_max,
        shell_negative: shell_max < T::zero(),
        sample,
    })
}

/// The four sign regions of `Λ_u` around `(1, 1)` for `u ∈ M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignCase {
    /// `α > 1`, `0 < β ≤ α`: `g⁺ < 0`.
    I,
    /// `α < 1`, `0 < α ≤ β`: `g⁺ > 0`.
    II,
    /// `β > 1`, `0 < α ≤ β`: `g⁻ < 0`.
    III,
    /// `β < 1`, `0 < β ≤ α`: `g⁻ > 0`.
    IV,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignCaseCheck<T> {
    pub case: SignCase,
    /// Signed distance from failure: positive when the strict sign holds.
    pub margin: T,
    pub holds: bool,
}

#[derive(Debug, Clone)]
pub struct SignCaseReport<T> {
    pub alpha: T,
    pub beta: T,
    pub g_plus: T,
    pub g_minus: T,
    /// Every region containing `(α, β)`; empty on region boundaries.
    pub checks: Vec<SignCaseCheck<T>>,
}

impl<T: Scalar> SignCaseReport<T> {
    pub fn skipped(&self) -> bool {
        self.checks.is_empty()
    }

    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

/// Evaluates `Λ_u(α, β)` for `u ∈ M` and checks the strict sign prescribed
/// by whichever regions `(α, β)` falls into.
pub fn sign_case_check<T: Scalar>(
    functional: &Functional<T>,
    u: &MeshFunction<T>,
    alpha: T,
    beta: T,
) -> Result<SignCaseReport<T>> {
    let (g_plus, g_minus) = lambda_map(functional, u, alpha, beta)?;
    let one = T::one();
    let zero = T::zero();
    let mut checks = Vec::new();
    let mut push = |case, margin: T| checks.push(SignCaseCheck { case, margin, holds: margin > zero });
    if alpha > zero && beta > zero {
        if alpha > one && beta <= alpha {
            push(SignCase::I, -g_plus);
        }
        if alpha < one && alpha <= beta {
            push(SignCase::II, g_plus);
        }
        if beta > one && alpha <= beta {
            push(SignCase::III, -g_minus);
        }
        if beta < one && beta <= alpha {
            push(SignCase::IV, g_minus);
        }
    }
    Ok(SignCaseReport {
        alpha,
        beta,
        g_plus,
        g_minus,
        checks,
    })
}
