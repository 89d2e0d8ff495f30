//! Problem data and a sampling-based checker for the structural hypotheses
//! on exponents, the Kirchhoff function and the nonlinearity.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::discretization::{Mesh, QuadratureRule, QuadratureTable, Rect};
use crate::error::{invalid, Error, Result};
use crate::orlicz::{Exponents, Weight};
use crate::scalar::Scalar;

/// Coefficients of `ψ(s) = a₀ + b₀ s^{ϑ−1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KirchhoffCoeffs<T> {
    pub a0: T,
    pub b0: T,
    pub theta: T,
}

impl<T: Scalar> KirchhoffCoeffs<T> {
    pub fn new(a0: T, b0: T, theta: T) -> Result<Self> {
        let k = Self { a0, b0, theta };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a0 >= T::zero()) {
            return Err(invalid(format!("a0 must be >= 0, got {}", self.a0)));
        }
        if !(self.b0 > T::zero()) {
            return Err(invalid(format!("b0 must be > 0, got {}", self.b0)));
        }
        if !(self.theta >= T::one()) {
            return Err(invalid(format!("theta must be >= 1, got {}", self.theta)));
        }
        Ok(())
    }

    /// `ψ(s)`, with `ψ(0) = a₀ + b₀` when `ϑ = 1`.
    pub fn psi(&self, s: T) -> Result<T> {
        if !(s >= T::zero()) {
            return Err(invalid(format!("psi needs s >= 0, got {s}")));
        }
        Ok(self.psi_unchecked(s))
    }

    pub(crate) fn psi_unchecked(&self, s: T) -> T {
        if self.theta == T::one() {
            self.a0 + self.b0
        } else if s == T::zero() {
            self.a0
        } else {
            self.a0 + self.b0 * s.pow_real(self.theta - T::one())
        }
    }

    /// `Ψ(s) = ∫₀^s ψ = a₀ s + (b₀/ϑ) s^ϑ`, split into its two terms.
    pub fn big_psi_terms(&self, s: T) -> (T, T) {
        (self.a0 * s, self.b0 / self.theta * s.pow_real(self.theta))
    }
}

/// One term `c·|s|^{r−2}s` of the power-sum nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm<T> {
    pub c: T,
    pub r: T,
}

/// `f(x, s) = Σᵢ cᵢ |s|^{rᵢ−2} s` with primitive `F(x, s) = Σᵢ (cᵢ/rᵢ)|s|^{rᵢ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Nonlinearity<T> {
    terms: Vec<PowerTerm<T>>,
}

impl<T: Scalar> Nonlinearity<T> {
    pub fn power_sum(terms: Vec<PowerTerm<T>>) -> Result<Self> {
        if terms.is_empty() {
            return Err(invalid("nonlinearity needs at least one term"));
        }
        for t in &terms {
            if !(t.c > T::zero()) || !(t.r > T::one()) || !t.r.is_finite() {
                return Err(invalid(format!("power term needs c > 0 and r > 1, got c = {}, r = {}", t.c, t.r)));
            }
        }
        Ok(Self { terms })
    }

    /// `f(s) = |s|^{r−2}s`.
    pub fn pure_power(r: T) -> Result<Self> {
        Self::power_sum(vec![PowerTerm { c: T::one(), r }])
    }

    pub fn terms(&self) -> &[PowerTerm<T>] {
        &self.terms
    }

    /// Largest exponent: the growth rate `r`.
    pub fn growth(&self) -> T {
        self.terms.iter().map(|t| t.r).fold(T::neg_infinity(), T::max)
    }

    pub fn smallest_exponent(&self) -> T {
        self.terms.iter().map(|t| t.r).fold(T::infinity(), T::min)
    }

    /// Every term is odd, hence `f(−s) = −f(s)`.
    pub fn is_odd(&self) -> bool {
        true
    }

    pub(crate) fn f_raw(&self, s: T) -> T {
        if s == T::zero() {
            return T::zero();
        }
        let a = s.abs();
        let v: T = self.terms.iter().map(|t| t.c * a.pow_real(t.r - T::one())).sum();
        if s < T::zero() {
            -v
        } else {
            v
        }
    }

    pub(crate) fn primitive_raw(&self, s: T) -> T {
        if s == T::zero() {
            return T::zero();
        }
        let a = s.abs();
        self.terms.iter().map(|t| t.c / t.r * a.pow_real(t.r)).sum()
    }

    /// `f(x, s)`; the built-in family does not depend on `x`.
    pub fn eval_f(&self, _x: [T; 2], s: T) -> Result<T> {
        check_finite("f", s, self.f_raw(s))
    }

    /// `F(x, s) = ∫₀^s f(x, t) dt`.
    pub fn eval_primitive(&self, _x: [T; 2], s: T) -> Result<T> {
        check_finite("F", s, self.primitive_raw(s))
    }
}

fn check_finite<T: Scalar>(what: &str, s: T, v: T) -> Result<T> {
    if !s.is_finite() {
        return Err(invalid(format!("{what} evaluated at non-finite s")));
    }
    if !v.is_finite() {
        return Err(Error::NumericDomain(format!("{what}({}) overflows", s.as_f64())));
    }
    Ok(v)
}

/// Complete problem description over a mesh.
#[derive(Debug, Clone)]
pub struct ProblemSpec<T> {
    pub exps: Exponents<T>,
    pub mu: Weight<T>,
    pub kirchhoff: KirchhoffCoeffs<T>,
    pub f: Nonlinearity<T>,
    pub mesh: Arc<Mesh<T>>,
    pub quadrature: QuadratureRule,
}

impl<T: Scalar> ProblemSpec<T> {
    /// Desk-scale configuration: `p = 1.5`, `q = 2`, `ϑ = 1.5`, `b₀ = 1`,
    /// `f = |s|²s`, `μ(x) = x₁` on the unit square with `n × n` cells.
    pub fn desk_default(n: usize, a0: T) -> Result<Self> {
        Ok(Self {
            exps: Exponents::new(T::lit(1.5), T::lit(2.0))?,
            mu: Weight::Linear {
                base: T::zero(),
                slope: T::one(),
            },
            kirchhoff: KirchhoffCoeffs::new(a0, T::one(), T::lit(1.5))?,
            f: Nonlinearity::pure_power(T::lit(4.0))?,
            mesh: Arc::new(Mesh::unit_square(n)?),
            quadrature: QuadratureRule::Midpoint,
        })
    }

    pub fn with_kirchhoff(mut self, a0: T, b0: T, theta: T) -> Result<Self> {
        self.kirchhoff = KirchhoffCoeffs::new(a0, b0, theta)?;
        Ok(self)
    }

    pub fn with_weight(mut self, mu: Weight<T>) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_nonlinearity(mut self, f: Nonlinearity<T>) -> Self {
        self.f = f;
        self
    }

    pub fn with_mesh(mut self, mesh: Arc<Mesh<T>>) -> Self {
        self.mesh = mesh;
        self
    }

    pub fn q_theta(&self) -> T {
        self.exps.q * self.kirchhoff.theta
    }

    /// Checks every component invariant and the composite constraint
    /// `qϑ < rᵢ < p*`.
    pub fn validate(&self) -> Result<()> {
        self.exps.validate()?;
        self.kirchhoff.validate()?;
        self.mu.validate(self.mesh.rect())?;
        let (qt, ps) = (self.q_theta(), self.exps.p_star());
        if !(qt < ps) {
            return Err(invalid(format!("need q·theta < p*, got {qt} >= {ps}")));
        }
        for t in self.f.terms() {
            if !(t.r > qt && t.r < ps) {
                return Err(invalid(format!("need q·theta < r < p*, got r = {} (q·theta = {qt}, p* = {ps})", t.r)));
            }
        }
        Ok(())
    }
}

/// Outcome of one sampled hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// No violation on the sample grid.
    Consistent,
    /// Violated, at grid point `at` when the failure is local.
    Violated { at: Option<f64>, detail: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisItem {
    pub id: &'static str,
    pub description: &'static str,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct HypothesisReport {
    pub items: Vec<HypothesisItem>,
}

impl HypothesisReport {
    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|i| i.verdict == Verdict::Consistent)
    }

    pub fn get(&self, id: &str) -> Option<&HypothesisItem> {
        self.items.iter().find(|i| i.id == id)
    }

    pub fn passes(&self, id: &str) -> bool {
        self.get(id).is_some_and(|i| i.verdict == Verdict::Consistent)
    }

    pub fn failed_ids(&self) -> Vec<&'static str> {
        self.items
            .iter()
            .filter(|i| i.verdict != Verdict::Consistent)
            .map(|i| i.id)
            .collect()
    }

    /// Key-value header followed by `id,status,at,detail` rows.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# hypotheses all_pass={}", self.all_pass());
        let _ = writeln!(s, "# id,status,at,description,detail");
        for i in &self.items {
            let (status, at, detail) = match &i.verdict {
                Verdict::Consistent => ("consistent", String::new(), String::new()),
                Verdict::Violated { at, detail } => (
                    "violated",
                    at.map(|a| a.to_string()).unwrap_or_default(),
                    detail.replace(',', ";"),
                ),
            };
            let _ = writeln!(s, "{},{status},{at},{},{detail}", i.id, i.description);
        }
        s
    }
}

/// Symmetric grid: `0`, and `±` log-spaced magnitudes on `[1e-8, 1e4]`.
pub fn default_sample_grid() -> Vec<f64> {
    let n = 241;
    let (lo, hi) = (-8.0_f64, 4.0_f64);
    let mags: Vec<f64> = (0..n)
        .map(|k| 10f64.powf(lo + (hi - lo) * k as f64 / (n - 1) as f64))
        .collect();
    let mut grid: Vec<f64> = mags.iter().rev().map(|m| -m).collect();
    grid.push(0.0);
    grid.extend(mags);
    grid
}

const SPAN: f64 = 1e3;

/// Evaluates each structural hypothesis on `grid` and on the mesh's
/// quadrature nodes (for `μ`). Verdicts are "consistent on the grid" or
/// "violated at s", never proofs.
pub fn check_hypotheses<T: Scalar>(spec: &ProblemSpec<T>, grid: &[f64]) -> Result<HypothesisReport> {
    if grid.is_empty() {
        return Err(invalid("empty sample grid"));
    }
    let lo = grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo > -SPAN || hi < SPAN {
        return Err(invalid(format!("sample grid must span [-{SPAN}, {SPAN}], got [{lo}, {hi}]")));
    }

    let p = spec.exps.p.as_f64();
    let q = spec.exps.q.as_f64();
    let ps = spec.exps.p_star().as_f64();
    let a0 = spec.kirchhoff.a0.as_f64();
    let b0 = spec.kirchhoff.b0.as_f64();
    let theta = spec.kirchhoff.theta.as_f64();
    let qt = q * theta;
    let r = spec.f.growth().as_f64();
    let f = |s: f64| spec.f.f_raw(T::lit(s)).as_f64();
    let big_f = |s: f64| spec.f.primitive_raw(T::lit(s)).as_f64();

    let mut pos: Vec<f64> = grid.iter().copied().filter(|&s| s > 0.0).collect();
    let mut neg: Vec<f64> = grid.iter().copied().filter(|&s| s < 0.0).map(|s| -s).collect();
    pos.sort_by(f64::total_cmp);
    pos.dedup();
    neg.sort_by(f64::total_cmp);
    neg.dedup();

    let mut items = Vec::new();
    let mut push = |id, description, verdict| items.push(HypothesisItem { id, description, verdict });
    let violated = |at: Option<f64>, detail: String| Verdict::Violated { at, detail };

    // (H1)
    let mut h1 = Verdict::Consistent;
    if !(p > 1.0 && p < 2.0) {
        h1 = violated(None, format!("need 1 < p < N = 2, got p = {p}"));
    } else if !(q > p && q < ps) {
        h1 = violated(None, format!("need p < q < p* = {ps}, got q = {q}"));
    } else {
        let rect = spec.mesh.rect();
        let bound = spec.mu.bound(rect).as_f64();
        let table = QuadratureTable::new(&spec.mesh, spec.quadrature);
        let samples = (0..spec.mesh.num_triangles() * table.per_triangle()).map(|k| table.point(k));
        let corners = corner_points(rect).into_iter();
        for x in samples.chain(corners) {
            let m = spec.mu.eval(x).as_f64();
            if !(m >= 0.0) || !(m <= bound * (1.0 + 1e-12)) {
                h1 = violated(Some(m), format!("mu = {m} outside [0, {bound}] at ({}, {})", x[0].as_f64(), x[1].as_f64()));
                break;
            }
        }
    }
    push("H1", "1<p<N; p<q<p*; 0<=mu in L^inf", h1);

    // (H2)
    let h2 = if !(a0 >= 0.0 && b0 > 0.0 && theta >= 1.0) {
        violated(None, format!("need a0 >= 0, b0 > 0, theta >= 1, got ({a0}, {b0}, {theta})"))
    } else if !(qt < ps) {
        violated(None, format!("need q*theta < p*, got {qt} >= {ps}"))
    } else {
        Verdict::Consistent
    };
    push("H2", "psi(s)=a0+b0 s^(theta-1); q*theta<p*", h2);

    // (H3)(i): subcritical growth, f(0) = 0 and a fitted growth exponent.
    let h3i = if !(r < ps) {
        violated(None, format!("growth exponent r = {r} is not below p* = {ps}"))
    } else if f(0.0) != 0.0 {
        violated(Some(0.0), "f(x,0) != 0".into())
    } else {
        let tail = &pos[pos.len().saturating_sub(2)..];
        let slope = if tail.len() == 2 {
            (f(tail[1]).abs().ln() - f(tail[0]).abs().ln()) / (tail[1].ln() - tail[0].ln())
        } else {
            f64::NAN
        };
        if !(slope <= r - 1.0 + 1e-6) {
            violated(tail.last().copied(), format!("fitted growth exponent {slope} exceeds r-1 = {}", r - 1.0))
        } else {
            Verdict::Consistent
        }
    };
    push("H3i", "|f(x,s)| <= c(1+|s|^(r-1)), r<p*", h3i);

    // Remark: (i) and (ii) force q·ϑ < r.
    let rem = if qt < r {
        Verdict::Consistent
    } else {
        violated(None, format!("q*theta = {qt} is not below r = {r}"))
    };
    push("R1.1", "q*theta < r", rem);

    // (H3)(ii): f(s)/(|s|^{qϑ−2}s) strictly increasing toward +∞ on both tails.
    let tail_len = (pos.len() / 4).max(2);
    let h3ii = {
        let quotient = |s: f64| f(s) / (s.abs().powf(qt - 2.0) * s);
        let mut verdict = Verdict::Consistent;
        for (sign, mags) in [(1.0, &pos), (-1.0, &neg)] {
            let tail = &mags[mags.len().saturating_sub(tail_len)..];
            if let Some(at) = first_non_increase(tail, |m| quotient(sign * m)) {
                verdict = violated(Some(sign * at), format!("f(s)/|s|^(q*theta-2)s does not grow at s = {}", sign * at));
                break;
            }
        }
        verdict
    };
    push("H3ii", "f(x,s)/|s|^(q*theta-2)s -> +inf as s -> +-inf", h3ii);

    // (H3)(iii): f(s)/(|s|^{e−2}s) strictly decreasing as |s| ↓ 0, with
    // e = p (a₀ > 0) or e = pϑ (a₀ = 0).
    let e = if a0 > 0.0 { p } else { p * theta };
    let h3iii = {
        let quotient = |s: f64| (f(s) / (s.abs().powf(e - 2.0) * s)).abs();
        let mut verdict = Verdict::Consistent;
        for (sign, mags) in [(1.0, &pos), (-1.0, &neg)] {
            let head = &mags[..tail_len.min(mags.len())];
            if let Some(at) = first_non_increase(head, |m| quotient(sign * m)) {
                verdict = violated(Some(sign * at), format!("f(s)/|s|^({e}-2)s does not decay near 0 at s = {}", sign * at));
                break;
            }
        }
        verdict
    };
    push("H3iii", "f(x,s)/|s|^(p-2)s -> 0 (a0>0) or /|s|^(p*theta-2)s -> 0 (a0=0)", h3iii);

    // (H3)(iv): s ↦ f(s)s − qϑF(s) nondecreasing on [0, ∞), nonincreasing on (−∞, 0].
    let h3iv = {
        let h = |s: f64| f(s) * s - qt * big_f(s);
        let mut verdict = Verdict::Consistent;
        for (sign, mags) in [(1.0, &pos), (-1.0, &neg)] {
            let mut prev = h(0.0);
            for &m in mags.iter() {
                let cur = h(sign * m);
                if cur < prev - 1e-12 * cur.abs().max(prev.abs()) {
                    verdict = violated(Some(sign * m), format!("f(s)s - q*theta*F(s) decreases in |s| at s = {}", sign * m));
                    break;
                }
                prev = cur;
            }
            if verdict != Verdict::Consistent {
                break;
            }
        }
        verdict
    };
    push("H3iv", "f(x,s)s - q*theta*F(x,s) monotone on each half-line", h3iv);

    // (H3)(v): s ↦ f(s)/|s|^{qϑ−1} strictly increasing on (−∞, 0) and (0, ∞).
    let h3v = {
        let g = |s: f64| f(s) / s.abs().powf(qt - 1.0);
        let mut verdict = Verdict::Consistent;
        if let Some(at) = first_non_increase(&pos, g) {
            verdict = violated(Some(at), format!("f(s)/|s|^(q*theta-1) not increasing at s = {at}"));
        } else {
            // on the negative half-line increase in s means decrease in |s|
            let mut neg_desc: Vec<f64> = neg.iter().rev().copied().collect();
            neg_desc.iter_mut().for_each(|m| *m = -*m);
            if let Some(at) = first_non_increase(&neg_desc, g) {
                verdict = violated(Some(at), format!("f(s)/|s|^(q*theta-1) not increasing at s = {at}"));
            }
        }
        verdict
    };
    push("H3v", "f(x,s)/|s|^(q*theta-1) strictly increasing on each half-line", h3v);

    Ok(HypothesisReport { items })
}

/// First sample at which `g` fails to increase strictly along `xs`.
fn first_non_increase(xs: &[f64], g: impl Fn(f64) -> f64) -> Option<f64> {
    let mut prev = None;
    for &x in xs {
        let v = g(x);
        if !v.is_finite() {
            return Some(x);
        }
        if let Some(pv) = prev {
            if !(v > pv) {
                return Some(x);
            }
        }
        prev = Some(v);
    }
    None
}

fn corner_points<T: Scalar>(r: &Rect<T>) -> [[T; 2]; 4] {
    [[r.x0, r.y0], [r.x1, r.y0], [r.x0, r.y1], [r.x1, r.y1]]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> ProblemSpec<f64> {
        ProblemSpec::desk_default(4, 1.0).unwrap()
    }

    #[test]
    fn psi_values() {
        let k = KirchhoffCoeffs::new(1.0, 2.0, 2.0).unwrap();
        assert_eq!(k.psi(3.0).unwrap(), 7.0);
        assert_eq!(k.psi(0.0).unwrap(), 1.0);
        assert!(k.psi(-1.0).is_err());
        let flat = KirchhoffCoeffs::new(0.5, 2.0, 1.0).unwrap();
        assert_eq!(flat.psi(0.0).unwrap(), 2.5);
        assert_eq!(flat.psi(10.0).unwrap(), 2.5);
        let degenerate = KirchhoffCoeffs::new(0.0, 1.0, 1.5).unwrap();
        assert_eq!(degenerate.psi(0.0).unwrap(), 0.0);
        assert!(KirchhoffCoeffs::new(-1.0, 1.0, 1.0).is_err());
        assert!(KirchhoffCoeffs::new(0.0, 0.0, 1.0).is_err());
        assert!(KirchhoffCoeffs::new(0.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn power_values() {
        let f = Nonlinearity::<f64>::pure_power(4.0).unwrap();
        assert_eq!(f.eval_f([0.0, 0.0], 0.0).unwrap(), 0.0);
        assert_eq!(f.eval_primitive([0.0, 0.0], 0.0).unwrap(), 0.0);
        assert_eq!(f.eval_f([0.0, 0.0], 2.0).unwrap(), 8.0);
        assert_eq!(f.eval_primitive([0.0, 0.0], 2.0).unwrap(), 4.0);
        assert!(matches!(f.eval_f([0.0, 0.0], 1e200), Err(Error::NumericDomain(_))));
        assert!(Nonlinearity::<f64>::power_sum(vec![]).is_err());
        assert!(Nonlinearity::power_sum(vec![PowerTerm { c: -1.0, r: 3.0 }]).is_err());
    }

    #[test]
    fn default_spec_passes() {
        let s = spec();
        s.validate().unwrap();
        let report = check_hypotheses(&s, &default_sample_grid()).unwrap();
        assert!(report.all_pass(), "{}", report.to_text());
        let degenerate = s.with_kirchhoff(0.0, 1.0, 1.5).unwrap();
        assert!(check_hypotheses(&degenerate, &default_sample_grid()).unwrap().all_pass());
    }

    #[test]
    fn sub_q_theta_power_fails_superlinearity() {
        // f = |s|^{p-2}s with p < qϑ
        let s = spec().with_nonlinearity(Nonlinearity::pure_power(1.5).unwrap());
        let report = check_hypotheses(&s, &default_sample_grid()).unwrap();
        assert!(!report.passes("H3ii"));
        assert!(!report.passes("H3v"));
        assert!(!report.all_pass());
    }

    #[test]
    fn critical_growth_fails_subcriticality() {
        let s = spec().with_nonlinearity(Nonlinearity::pure_power(6.0).unwrap());
        let report = check_hypotheses(&s, &default_sample_grid()).unwrap();
        assert!(!report.passes("H3i"));
        assert!(s.validate().is_err());
    }

    #[test]
    fn q_theta_equal_r_is_not_superlinear() {
        let s = spec().with_nonlinearity(Nonlinearity::pure_power(3.0).unwrap());
        let report = check_hypotheses(&s, &default_sample_grid()).unwrap();
        assert!(!report.passes("H3ii"));
        assert!(!report.passes("R1.1"));
    }

    #[test]
    fn degenerate_branch_uses_p_theta() {
        // r = 2 > p = 1.5 but r < pϑ = 2.25: (iii) holds for a₀ > 0 only.
        let f = Nonlinearity::power_sum(vec![PowerTerm { c: 1.0, r: 2.0 }, PowerTerm { c: 1.0, r: 4.0 }]).unwrap();
        let nondeg = spec().with_nonlinearity(f.clone());
        assert!(check_hypotheses(&nondeg, &default_sample_grid()).unwrap().passes("H3iii"));
        let deg = nondeg.with_kirchhoff(0.0, 1.0, 1.5).unwrap();
        assert!(!check_hypotheses(&deg, &default_sample_grid()).unwrap().passes("H3iii"));
    }

    #[test]
    fn grid_preconditions() {
        assert!(check_hypotheses(&spec(), &[]).is_err());
        assert!(check_hypotheses(&spec(), &[-1.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn report_text_has_one_row_per_item() {
        let report = check_hypotheses(&spec(), &default_sample_grid()).unwrap();
        let text = report.to_text();
        assert_eq!(text.lines().count(), report.items.len() + 2);
        assert!(text.starts_with("# hypotheses all_pass=true"));
    }
}
