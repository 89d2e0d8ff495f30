//! The energy `φ(u) = Ψ[Φ_H(∇u)] − ∫F(x, u)`, its truncations `φ±` and the
//! weak-form derivative `v ↦ ⟨φ′(u), v⟩`.
//!
//! The Kirchhoff prefactor `ψ(Φ_H(∇u))` is always evaluated on the whole
//! argument and shared by every test direction.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::discretization::{CellField, Mesh, MeshFunction, QuadratureTable};
use crate::error::{Error, Result};
use crate::orlicz::DoublePhaseSpace;
use crate::problem::ProblemSpec;
use crate::scalar::Scalar;

/// Which truncated functional to use: `φ₊` keeps `F(x, u⁺)`, `φ₋` keeps `F(x, −u⁻)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn truncate<T: Scalar>(self, s: T) -> T {
        match self {
            Self::Plus => s.max(T::zero()),
            Self::Minus => s.min(T::zero()),
        }
    }

    pub fn factor<T: Scalar>(self) -> T {
        match self {
            Self::Plus => T::one(),
            Self::Minus => -T::one(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Plus => "+",
            Self::Minus => "-",
        }
    }
}

/// Value of `φ` with its additive pieces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport<T> {
    pub phi: T,
    /// `a₀·Φ_H`.
    pub a0_term: T,
    /// `(b₀/ϑ)·Φ_H^ϑ`.
    pub b0_term: T,
    /// `∫F(x, u)`.
    pub potential_term: T,
    /// `Φ_H(∇u)`.
    pub phi_h: T,
}

impl<T: Scalar> EnergyReport<T> {
    pub const CSV_HEADER: &'static str = "phi,a0_term,b0_term,potential_term,phi_h";

    pub fn csv_row(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "{},{},{},{},{}",
            self.phi, self.a0_term, self.b0_term, self.potential_term, self.phi_h
        );
        s
    }
}

/// Discrete derivative: `values[i] = ⟨φ′(u), eᵢ⟩` for every interior hat
/// function `eᵢ` (in [`Mesh::interior`] order).
#[derive(Debug, Clone)]
pub struct Residual<T> {
    pub values: Vec<T>,
    /// `‖values‖₂ / √(number of interior vertices)`.
    pub norm: T,
}

impl<T: Scalar> Residual<T> {
    /// `⟨φ′(u), v⟩` for an admissible P1 field `v`.
    pub fn dot(&self, v: &MeshFunction<T>) -> T {
        v.mesh()
            .interior()
            .iter()
            .zip(&self.values)
            .map(|(&vid, &r)| r * v.values()[vid])
            .sum()
    }

    pub fn to_mesh_function(&self, mesh: Arc<Mesh<T>>) -> Result<MeshFunction<T>> {
        MeshFunction::from_interior(mesh, &self.values)
    }
}

/// Regularization of `|∇u|^{s−2}` for exponents `s < 2` in derivative assembly.
pub const FLUX_REGULARIZATION: f64 = 1e-10;

/// Energy functional bound to a problem: caches the quadrature nodes and the
/// per-triangle means of `μ`.
#[derive(Debug, Clone)]
pub struct Functional<T> {
    spec: ProblemSpec<T>,
    space: DoublePhaseSpace<T>,
    table: QuadratureTable<T>,
    eps2: T,
}

impl<T: Scalar> Functional<T> {
    /// Validates the exponents, `ψ` and `μ`. The composite constraint on the
    /// nonlinearity is left to [`ProblemSpec::validate`] and the hypothesis
    /// checker so that deliberately bad nonlinearities can still be evaluated.
    pub fn new(spec: ProblemSpec<T>) -> Result<Self> {
        spec.exps.validate()?;
        spec.kirchhoff.validate()?;
        spec.mu.validate(spec.mesh.rect())?;
        let table = QuadratureTable::new(&spec.mesh, spec.quadrature);
        let mu_cell = spec.mu.cell_means(&spec.mesh, &table);
        let space = DoublePhaseSpace::from_parts(spec.mesh.clone(), spec.exps, mu_cell);
        let eps = T::lit(FLUX_REGULARIZATION);
        Ok(Self {
            spec,
            space,
            table,
            eps2: eps * eps,
        })
    }

    pub fn spec(&self) -> &ProblemSpec<T> {
        &self.spec
    }

    pub fn space(&self) -> &DoublePhaseSpace<T> {
        &self.space
    }

    pub fn mesh(&self) -> &Arc<Mesh<T>> {
        &self.spec.mesh
    }

    pub fn table(&self) -> &QuadratureTable<T> {
        &self.table
    }

    /// `ψ(s)`.
    pub fn psi(&self, s: T) -> Result<T> {
        self.spec.kirchhoff.psi(s)
    }

    /// `Φ_H` of a gradient field: `(1/p)‖g‖_p^p + (1/q)‖g‖_{q,μ}^q`.
    pub fn phi_h_cells(&self, g: &CellField<T>) -> T {
        let (a, b) = self.space.components(g);
        a / self.spec.exps.p + b / self.spec.exps.q
    }

    /// `Φ_H(∇u)`.
    pub fn phi_h(&self, u: &MeshFunction<T>) -> T {
        self.phi_h_cells(&u.gradient())
    }

    /// `ρ_H(∇u)`.
    pub fn modular(&self, u: &MeshFunction<T>) -> T {
        self.space.modular(&u.gradient())
    }

    /// `‖u‖ = ‖∇u‖_H`.
    pub fn norm(&self, u: &MeshFunction<T>) -> Result<T> {
        self.space.sobolev_norm(u)
    }

    /// `∫F(x, s(u))` where `s` is the identity or a truncation.
    pub fn potential(&self, u: &MeshFunction<T>, sign: Option<Sign>) -> T {
        let f = &self.spec.f;
        let mesh = self.mesh();
        let mut total = T::zero();
        for t in 0..mesh.num_triangles() {
            for k in self.table.range(t) {
                let mut s = u.eval_bary(t, self.table.bary(k));
                if let Some(sg) = sign {
                    s = sg.truncate(s);
                }
                total += self.table.weight(k) * f.primitive_raw(s);
            }
        }
        total
    }

    pub fn phi(&self, u: &MeshFunction<T>) -> EnergyReport<T> {
        self.report(u, None)
    }

    /// `φ±(u) = Ψ[Φ_H(∇u)] − ∫F(x, ±u±)`.
    pub fn phi_truncated(&self, u: &MeshFunction<T>, sign: Sign) -> T {
        self.report(u, Some(sign)).phi
    }

    /// `φ` (sign `None`) or `φ±` with its pieces.
    pub fn report(&self, u: &MeshFunction<T>, sign: Option<Sign>) -> EnergyReport<T> {
        let phi_h = self.phi_h(u);
        let (a0_term, b0_term) = self.spec.kirchhoff.big_psi_terms(phi_h);
        let potential_term = self.potential(u, sign);
        EnergyReport {
            phi: a0_term + b0_term - potential_term,
            a0_term,
            b0_term,
            potential_term,
            phi_h,
        }
    }

    /// Scalar energy, `φ` or `φ±`.
    pub fn energy(&self, u: &MeshFunction<T>, sign: Option<Sign>) -> T {
        self.report(u, sign).phi
    }

    /// `(|g|² + ε²)^{(p−2)/2} + μ_t (|g|² + ε²)^{(q−2)/2}`, the flux
    /// coefficient of `A` on a triangle; the regularization only enters for
    /// exponents below 2.
    pub(crate) fn flux_coefficient(&self, g: [T; 2], mu: T) -> T {
        let m2 = g[0] * g[0] + g[1] * g[1];
        let two = T::lit(2.0);
        let pow = |s: T| {
            if s < two {
                (m2 + self.eps2).pow_real((s - two) / two)
            } else if s == two {
                T::one()
            } else {
                m2.pow_real((s - two) / two)
            }
        };
        pow(self.spec.exps.p) + mu * pow(self.spec.exps.q)
    }

    /// Kirchhoff prefactor `ψ(Φ_H(∇u))` for a gradient field.
    pub(crate) fn kirchhoff_factor(&self, g: &CellField<T>) -> T {
        self.spec.kirchhoff.psi_unchecked(self.phi_h_cells(g))
    }

    /// `⟨A(u), v⟩ = ∫(|∇u|^{p−2} + μ|∇u|^{q−2})∇u·∇v`.
    pub fn operator_pairing(&self, u: &MeshFunction<T>, v: &MeshFunction<T>) -> T {
        let gu = u.gradient();
        let gv = v.gradient();
        let mesh = self.mesh();
        let mut total = T::zero();
        for t in 0..mesh.num_triangles() {
            let a = gu.values()[t];
            let b = gv.values()[t];
            let c = self.flux_coefficient(a, self.space.mu_cell()[t]);
            total += mesh.areas()[t] * c * (a[0] * b[0] + a[1] * b[1]);
        }
        total
    }

    /// `⟨φ′(u), v⟩` (or `⟨φ±′(u), v⟩`) assembled directly.
    pub fn directional(&self, u: &MeshFunction<T>, v: &MeshFunction<T>, sign: Option<Sign>) -> T {
        let gu = u.gradient();
        let psi = self.kirchhoff_factor(&gu);
        let psi_term = psi * self.operator_pairing(u, v);
        let mesh = self.mesh();
        let f = &self.spec.f;
        let mut load = T::zero();
        for t in 0..mesh.num_triangles() {
            for k in self.table.range(t) {
                let b = self.table.bary(k);
                let mut s = u.eval_bary(t, b);
                if let Some(sg) = sign {
                    s = sg.truncate(s);
                }
                load += self.table.weight(k) * f.f_raw(s) * v.eval_bary(t, b);
            }
        }
        psi_term - load
    }

    /// `(⟨φ′(u), u⁺⟩, ⟨φ′(u), −u⁻⟩)` with the prefactor of the whole `u`.
    pub fn pairings(&self, u: &MeshFunction<T>) -> (T, T) {
        let (plus, minus) = u.split_parts();
        (
            self.directional(u, &plus, None),
            self.directional(u, &minus.scale(-T::one()), None),
        )
    }

    /// Assembles `⟨φ′(u), eᵢ⟩` (or the truncated version) for every
    /// interior vertex.
    pub fn residual(&self, u: &MeshFunction<T>, sign: Option<Sign>) -> Result<Residual<T>> {
        let mesh = self.mesh();
        let gu = u.gradient();
        let psi = self.kirchhoff_factor(&gu);
        let f = &self.spec.f;
        let mut full = vec![T::zero(); mesh.num_vertices()];
        for (t, tri) in mesh.triangles().iter().enumerate() {
            let g = gu.values()[t];
            let c = psi * self.flux_coefficient(g, self.space.mu_cell()[t]) * mesh.areas()[t];
            let basis = mesh.basis_gradients(t);
            for k in 0..3 {
                full[tri[k]] += c * (g[0] * basis[k][0] + g[1] * basis[k][1]);
            }
            for qk in self.table.range(t) {
                let b = self.table.bary(qk);
                let mut s = u.eval_bary(t, b);
                if let Some(sg) = sign {
                    s = sg.truncate(s);
                }
                let w = self.table.weight(qk) * f.f_raw(s);
                for k in 0..3 {
                    full[tri[k]] -= w * b[k];
                }
            }
        }
        let values: Vec<T> = mesh.interior().iter().map(|&v| full[v]).collect();
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            let vertex = mesh.interior()[i];
            return Err(Error::NonFiniteVertex {
                vertex,
                detail: format!("residual entry {} at u = {}", values[i].as_f64(), u.values()[vertex].as_f64()),
            });
        }
        let n = T::lit(values.len().max(1) as f64);
        let norm = values.iter().map(|&x| x * x).sum::<T>().sqrt() / n.sqrt();
        Ok(Residual { values, norm })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn functional(a0: f64) -> Functional<f64> {
        Functional::new(ProblemSpec::desk_default(6, a0).unwrap()).unwrap()
    }

    fn bump(f: &Functional<f64>, amp: f64) -> MeshFunction<f64> {
        MeshFunction::from_fn(f.mesh().clone(), |x| {
            amp * (std::f64::consts::PI * x[0]).sin() * (std::f64::consts::PI * x[1]).sin()
        })
    }

    #[test]
    fn zero_function() {
        let f = functional(1.0);
        let z = MeshFunction::zeros(f.mesh().clone());
        let r = f.phi(&z);
        assert_eq!(r.phi, 0.0);
        assert_eq!(f.phi_h(&z), 0.0);
        let res = f.residual(&z, None).unwrap();
        assert!(res.values.iter().all(|&x| x == 0.0));
        assert_eq!(res.norm, 0.0);
    }

    #[test]
    fn report_pieces_add_up() {
        let f = functional(1.0);
        let u = bump(&f, 2.0);
        let r = f.phi(&u);
        assert!((r.phi - (r.a0_term + r.b0_term - r.potential_term)).abs() <= 1e-13 * r.phi.abs().max(1.0));
        assert!((r.b0_term - r.phi_h.powf(1.5) / 1.5).abs() < 1e-14);
        let g = u.gradient();
        let s = f.space();
        let direct = s.p_norm(&g).powf(1.5) / 1.5 + s.weighted_q_seminorm(&g).powi(2) / 2.0;
        assert!((r.phi_h - direct).abs() < 1e-13 * direct);
    }

    #[test]
    fn truncations_on_nonnegative_input() {
        let f = functional(0.0);
        let u = bump(&f, 1.5);
        assert_eq!(f.phi_truncated(&u, Sign::Plus), f.phi(&u).phi);
        let big_psi = f.phi(&u).a0_term + f.phi(&u).b0_term;
        assert_eq!(f.phi_truncated(&u, Sign::Minus), big_psi);
        let (_, gm) = f.pairings(&u);
        assert_eq!(gm, 0.0);
    }

    #[test]
    fn residual_matches_directional() {
        let f = functional(1.0);
        let u = bump(&f, 1.2);
        let v = MeshFunction::from_fn(f.mesh().clone(), |x| x[0] * x[1] - 0.3);
        let r = f.residual(&u, None).unwrap();
        let d = f.directional(&u, &v, None);
        assert!((r.dot(&v) - d).abs() < 1e-14 * d.abs().max(1.0));
    }

    #[test]
    fn overflow_names_a_vertex() {
        let f = functional(1.0);
        let u = bump(&f, 1e120);
        assert!(matches!(f.residual(&u, None), Err(Error::NonFiniteVertex { .. })));
    }
}
