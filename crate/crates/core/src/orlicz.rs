//! Musielak–Orlicz quantities of the double phase integrand
//! `H(x, t) = t^p + μ(x) t^q`: the modular, the Luxemburg norm and the
//! `L^p` / weighted `L^q_μ` pieces it is built from.

use std::sync::Arc;

use crate::discretization::{CellField, Mesh, MeshFunction, QuadratureRule, QuadratureTable, Rect};
use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Spatial dimension of the discretization.
pub const DIM: usize = 2;

/// Growth exponents `1 < p < N`, `p < q < p* = Np/(N − p)` with `N = 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponents<T> {
    pub p: T,
    pub q: T,
}

impl<T: Scalar> Exponents<T> {
    pub fn new(p: T, q: T) -> Result<Self> {
        let e = Self::unchecked(p, q);
        e.validate()?;
        Ok(e)
    }

    /// Skips validation so that a hypothesis checker can report the violation.
    pub fn unchecked(p: T, q: T) -> Self {
        Self { p, q }
    }

    pub fn validate(&self) -> Result<()> {
        let n = T::lit(DIM as f64);
        if !(self.p > T::one() && self.p < n) {
            return Err(invalid(format!("need 1 < p < {DIM}, got p = {}", self.p)));
        }
        if !(self.q > self.p && self.q < self.p_star()) {
            return Err(invalid(format!(
                "need p < q < p* = {}, got q = {}",
                self.p_star(),
                self.q
            )));
        }
        Ok(())
    }

    /// Critical Sobolev exponent `Np/(N − p)`; infinite when `p ≥ N`.
    pub fn p_star(&self) -> T {
        let n = T::lit(DIM as f64);
        if self.p >= n {
            T::infinity()
        } else {
            n * self.p / (n - self.p)
        }
    }
}

/// Nonnegative bounded weight `μ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weight<T> {
    Constant(T),
    /// `base + slope·x₁`.
    Linear { base: T, slope: T },
    /// `high` on cells of the `period`-lattice with even index sum, `low` elsewhere.
    Checkerboard { low: T, high: T, period: T },
}

impl<T: Scalar> Weight<T> {
    pub fn eval(&self, x: [T; 2]) -> T {
        match *self {
            Self::Constant(c) => c,
            Self::Linear { base, slope } => base + slope * x[0],
            Self::Checkerboard { low, high, period } => {
                let i = (x[0] / period).floor().to_i64().unwrap_or(0);
                let j = (x[1] / period).floor().to_i64().unwrap_or(0);
                if (i + j).rem_euclid(2) == 0 {
                    high
                } else {
                    low
                }
            }
        }
    }

    /// `L^∞` bound on `rect`.
    pub fn bound(&self, rect: &Rect<T>) -> T {
        match *self {
            Self::Constant(c) => c.abs(),
            Self::Linear { base, slope } => (base + slope * rect.x0).abs().max((base + slope * rect.x1).abs()),
            Self::Checkerboard { low, high, .. } => low.abs().max(high.abs()),
        }
    }

    /// Smallest value on `rect` (exact for the built-in families).
    pub fn infimum(&self, rect: &Rect<T>) -> T {
        match *self {
            Self::Constant(c) => c,
            Self::Linear { base, slope } => (base + slope * rect.x0).min(base + slope * rect.x1),
            Self::Checkerboard { low, high, .. } => low.min(high),
        }
    }

    pub fn validate(&self, rect: &Rect<T>) -> Result<()> {
        if let Self::Checkerboard { period, .. } = self {
            if !(*period > T::zero()) {
                return Err(invalid("checkerboard period must be positive"));
            }
        }
        let lo = self.infimum(rect);
        if !(lo >= T::zero()) || !self.bound(rect).is_finite() {
            return Err(invalid(format!("weight must be nonnegative and bounded, infimum is {lo}")));
        }
        Ok(())
    }

    /// Is `μ(x₀ + x₁ − x, y) = μ(x, y)` on `rect`?
    pub fn is_mirror_symmetric(&self, rect: &Rect<T>) -> bool {
        match *self {
            Self::Constant(_) => true,
            Self::Linear { slope, .. } => slope == T::zero(),
            Self::Checkerboard { period, .. } => {
                let cells = rect.width() / period;
                let shift = rect.x0 / period;
                cells.fract() == T::zero() && shift.fract() == T::zero()
            }
        }
    }

    /// Per-triangle mean of `μ` using the nodes of `table`.
    pub fn cell_means(&self, mesh: &Mesh<T>, table: &QuadratureTable<T>) -> Vec<T> {
        (0..mesh.num_triangles())
            .map(|t| {
                let s: T = table.range(t).map(|k| table.weight(k) * self.eval(table.point(k))).sum();
                s / mesh.areas()[t]
            })
            .collect()
    }
}

/// Outcome of checking the norm–modular relations on one field.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularRelations<T> {
    pub norm: T,
    pub modular: T,
    /// `sign(‖g‖ − 1) = sign(ρ(g) − 1)`.
    pub sign_consistent: bool,
    pub lower: T,
    pub upper: T,
    /// `min(ρ − lower, upper − ρ)`; negative when a bound is violated.
    pub slack: T,
    pub holds: bool,
}

/// The space `L^H` over a fixed mesh: exponents plus the per-triangle means
/// of `μ`. Integrals of piecewise-constant gradients against `μ` are exact
/// whenever the quadrature integrates `μ` exactly on each triangle.
#[derive(Debug, Clone)]
pub struct DoublePhaseSpace<T> {
    mesh: Arc<Mesh<T>>,
    exps: Exponents<T>,
    mu_cell: Vec<T>,
}

const RELATION_TOL: f64 = 1e-10;

impl<T: Scalar> DoublePhaseSpace<T> {
    pub fn new(mesh: Arc<Mesh<T>>, exps: Exponents<T>, mu: &Weight<T>, rule: QuadratureRule) -> Self {
        let table = QuadratureTable::new(&mesh, rule);
        let mu_cell = mu.cell_means(&mesh, &table);
        Self { mesh, exps, mu_cell }
    }

    pub(crate) fn from_parts(mesh: Arc<Mesh<T>>, exps: Exponents<T>, mu_cell: Vec<T>) -> Self {
        Self { mesh, exps, mu_cell }
    }

    pub fn mesh(&self) -> &Arc<Mesh<T>> {
        &self.mesh
    }

    pub fn exponents(&self) -> &Exponents<T> {
        &self.exps
    }

    pub fn mu_cell(&self) -> &[T] {
        &self.mu_cell
    }

    /// `(∫|g|^p, ∫μ|g|^q)`.
    pub fn components(&self, g: &CellField<T>) -> (T, T) {
        let (p, q) = (self.exps.p, self.exps.q);
        let mut a = T::zero();
        let mut b = T::zero();
        for ((gv, &area), &mu) in g.values().iter().zip(self.mesh.areas()).zip(&self.mu_cell) {
            let m = gv[0].hypot(gv[1]);
            if m > T::zero() {
                a += area * m.pow_real(p);
                b += area * mu * m.pow_real(q);
            }
        }
        (a, b)
    }

    /// `ρ_H(g) = ∫ (|g|^p + μ|g|^q)`.
    pub fn modular(&self, g: &CellField<T>) -> T {
        let (a, b) = self.components(g);
        a + b
    }

    /// `‖g‖_p`.
    pub fn p_norm(&self, g: &CellField<T>) -> T {
        self.components(g).0.powf(T::one() / self.exps.p)
    }

    /// `‖g‖_{q,μ}`.
    pub fn weighted_q_seminorm(&self, g: &CellField<T>) -> T {
        self.components(g).1.powf(T::one() / self.exps.q)
    }

    /// Luxemburg norm `inf{τ > 0 : ρ_H(g/τ) ≤ 1}`.
    pub fn luxemburg_norm(&self, g: &CellField<T>) -> Result<T> {
        let (a, b) = self.components(g);
        luxemburg_from_components(a, b, &self.exps, g.max_abs() * self.mesh.measure())
    }

    /// `‖u‖ = ‖∇u‖_H`, the norm of `W₀^{1,H}`.
    pub fn sobolev_norm(&self, u: &MeshFunction<T>) -> Result<T> {
        self.luxemburg_norm(&u.gradient())
    }

    pub fn check_modular_relations(&self, g: &CellField<T>) -> Result<ModularRelations<T>> {
        let norm = self.luxemburg_norm(g)?;
        if norm == T::zero() {
            return Err(invalid("modular relations need a nonzero field"));
        }
        let modular = self.modular(g);
        let (p, q) = (self.exps.p, self.exps.q);
        let tol = T::lit(RELATION_TOL);
        let side = |x: T| {
            if (x - T::one()).abs() <= tol {
                0
            } else if x < T::one() {
                -1
            } else {
                1
            }
        };
        let sign_consistent = side(norm) == side(modular);
        let (lower, upper) = if norm < T::one() {
            (norm.powf(q), norm.powf(p))
        } else {
            (norm.powf(p), norm.powf(q))
        };
        let slack = (modular - lower).min(upper - modular);
        let holds = sign_consistent && slack >= -tol * modular.max(T::one());
        Ok(ModularRelations {
            norm,
            modular,
            sign_consistent,
            lower,
            upper,
            slack,
            holds,
        })
    }
}

/// Solves `a·τ^{−p} + b·τ^{−q} = 1` for `τ` by bracketed bisection.
pub(crate) fn luxemburg_from_components<T: Scalar>(a: T, b: T, exps: &Exponents<T>, hint: T) -> Result<T> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::NumericDomain(format!(
            "modular is not finite (∫|g|^p = {}, ∫μ|g|^q = {})",
            a.as_f64(),
            b.as_f64()
        )));
    }
    if a + b == T::zero() {
        return Ok(T::zero());
    }
    let rho = |tau: T| a * tau.powf(-exps.p) + b * tau.powf(-exps.q);
    let two = T::lit(2.0);
    let mut lo = T::lit(1e-3).min(T::one());
    let mut hi = T::one().max(hint);
    let mut rounds = 0;
    while rho(lo) < T::one() {
        lo = lo / two;
        rounds += 1;
        if rounds > 2000 || lo == T::zero() {
            return Err(Error::NumericDomain("Luxemburg bracket underflow".into()));
        }
    }
    while rho(hi) > T::one() {
        hi = hi * two;
        rounds += 1;
        if rounds > 2000 || !hi.is_finite() {
            return Err(Error::NumericDomain("Luxemburg bracket overflow".into()));
        }
    }
    let tol = T::lit(1e-12).max(T::epsilon() * T::lit(4.0));
    for _ in 0..400 {
        let mid = (lo + hi) / two;
        if mid <= lo || mid >= hi || hi - lo <= tol * hi {
            break;
        }
        if rho(mid) > T::one() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / two)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(mu: Weight<f64>) -> DoublePhaseSpace<f64> {
        let mesh = Arc::new(Mesh::unit_square(4).unwrap());
        DoublePhaseSpace::new(mesh, Exponents::new(1.5, 2.5).unwrap(), &mu, QuadratureRule::Midpoint)
    }

    fn constant_field(s: &DoublePhaseSpace<f64>, v: [f64; 2]) -> CellField<f64> {
        CellField::new(s.mesh().clone(), vec![v; s.mesh().num_triangles()]).unwrap()
    }

    #[test]
    fn exponent_ranges() {
        assert!(Exponents::new(1.5, 2.0).is_ok());
        assert!(Exponents::new(1.0, 2.0).is_err());
        assert!(Exponents::new(2.0, 3.0).is_err());
        assert!(Exponents::new(1.5, 1.4).is_err());
        assert!(Exponents::new(1.5, 6.0).is_err());
        assert_eq!(Exponents::new(1.5, 2.0).unwrap().p_star(), 6.0);
    }

    #[test]
    fn zero_field() {
        let s = space(Weight::Constant(1.0));
        let g = constant_field(&s, [0.0, 0.0]);
        assert_eq!(s.modular(&g), 0.0);
        assert_eq!(s.luxemburg_norm(&g).unwrap(), 0.0);
        assert_eq!(s.p_norm(&g), 0.0);
        assert_eq!(s.weighted_q_seminorm(&g), 0.0);
    }

    #[test]
    fn unit_magnitude_field() {
        let s = space(Weight::Constant(1.0));
        let g = constant_field(&s, [0.6, 0.8]);
        assert!((s.modular(&g) - 2.0).abs() < 1e-14);
        assert!((s.p_norm(&g) - 1.0).abs() < 1e-14);
        assert!((s.weighted_q_seminorm(&g) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_weight_reduces_to_lp() {
        let s = space(Weight::Constant(0.0));
        let g = CellField::new(
            s.mesh().clone(),
            (0..s.mesh().num_triangles()).map(|t| [t as f64 * 0.1, 1.0]).collect(),
        )
        .unwrap();
        let n = s.luxemburg_norm(&g).unwrap();
        assert!((n - s.p_norm(&g)).abs() < 1e-11 * n);
    }

    #[test]
    fn checkerboard_and_linear_weights() {
        let cb = Weight::Checkerboard { low: 0.5, high: 2.0, period: 0.5 };
        assert_eq!(cb.eval([0.1, 0.1]), 2.0);
        assert_eq!(cb.eval([0.6, 0.1]), 0.5);
        assert!(cb.is_mirror_symmetric(&Rect::unit()));
        let lin = Weight::Linear { base: 0.0, slope: 1.0 };
        assert_eq!(lin.bound(&Rect::unit()), 1.0);
        assert!(lin.validate(&Rect::unit()).is_ok());
        assert!(Weight::Linear { base: -0.5, slope: 1.0 }.validate(&Rect::unit()).is_err());
        assert!(!lin.is_mirror_symmetric(&Rect::unit()));
    }

    #[test]
    fn relations_at_scaled_norms() {
        let s = space(Weight::Linear { base: 0.0, slope: 1.0 });
        let g = CellField::new(
            s.mesh().clone(),
            (0..s.mesh().num_triangles()).map(|t| [(t as f64).sin(), (t as f64 * 0.3).cos()]).collect(),
        )
        .unwrap();
        let n = s.luxemburg_norm(&g).unwrap();
        for target in [0.5, 1.0, 2.0] {
            let r = s.check_modular_relations(&g.scale(target / n)).unwrap();
            assert!(r.holds, "{r:?}");
            assert!((r.norm - target).abs() < 1e-10);
        }
        let unit = s.check_modular_relations(&g.scale(1.0 / n)).unwrap();
        assert!((unit.modular - 1.0).abs() < 1e-10);
    }
}
