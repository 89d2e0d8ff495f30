//! Banded SPD factorization and the stiffness preconditioners used by the
//! descent solvers.

use crate::discretization::{Mesh, MeshFunction};
use crate::energy::Functional;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Symmetric banded matrix stored by lower band rows: entry `(i, j)` with
/// `i − bw ≤ j ≤ i` lives at `data[i·(bw+1) + (j + bw − i)]`.
#[derive(Debug, Clone)]
pub struct BandMatrix<T> {
    n: usize,
    bw: usize,
    data: Vec<T>,
}

impl<T: Scalar> BandMatrix<T> {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![T::zero(); n * (bw + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bw);
        i * (self.bw + 1) + (j + self.bw - i)
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        if i - j > self.bw {
            T::zero()
        } else {
            self.data[self.slot(i, j)]
        }
    }

    /// Adds `v` to entry `(i, j)` (and, implicitly, `(j, i)`).
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        assert!(i - j <= self.bw, "entry ({i}, {j}) outside band {}", self.bw);
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.n];
        for i in 0..self.n {
            for j in i.saturating_sub(self.bw)..=i {
                let a = self.data[self.slot(i, j)];
                y[i] += a * x[j];
                if j != i {
                    y[j] += a * x[i];
                }
            }
        }
        y
    }

    /// In-place Cholesky `A = L Lᵀ`; fails on a non-positive pivot.
    pub fn cholesky(mut self) -> Result<BandCholesky<T>> {
        let bw = self.bw;
        for i in 0..self.n {
            for j in i.saturating_sub(bw)..=i {
                let mut s = self.data[self.slot(i, j)];
                for k in i.saturating_sub(bw).max(j.saturating_sub(bw))..j {
                    s -= self.data[self.slot(i, k)] * self.data[self.slot(j, k)];
                }
                if i == j {
                    if !(s > T::zero()) {
                        return Err(Error::LinearAlgebra(format!("non-positive pivot {} at row {i}", s.as_f64())));
                    }
                    let d = self.slot(i, i);
                    self.data[d] = s.sqrt();
                } else {
                    let l = s / self.data[self.slot(j, j)];
                    let d = self.slot(i, j);
                    self.data[d] = l;
                }
            }
        }
        Ok(BandCholesky { l: self })
    }
}

/// Cholesky factor of a [`BandMatrix`].
#[derive(Debug, Clone)]
pub struct BandCholesky<T> {
    l: BandMatrix<T>,
}

impl<T: Scalar> BandCholesky<T> {
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let l = &self.l;
        let n = l.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in i.saturating_sub(l.bw)..i {
                s -= l.data[l.slot(i, k)] * y[k];
            }
            y[i] = s / l.data[l.slot(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..(i + l.bw + 1).min(n) {
                s -= l.data[l.slot(k, i)] * y[k];
            }
            y[i] = s / l.data[l.slot(i, i)];
        }
        y
    }
}

/// Largest index distance between interior unknowns sharing a triangle.
pub fn interior_bandwidth<T: Scalar>(mesh: &Mesh<T>) -> usize {
    let mut bw = 0;
    for tri in mesh.triangles() {
        for &a in tri {
            for &b in tri {
                if let (Some(i), Some(j)) = (mesh.interior_index(a), mesh.interior_index(b)) {
                    bw = bw.max(i.abs_diff(j));
                }
            }
        }
    }
    bw
}

/// `K_ij = Σ_t c_t |t| ∇λ_i·∇λ_j` over interior unknowns.
pub fn weighted_stiffness<T: Scalar>(mesh: &Mesh<T>, coef: &[T]) -> BandMatrix<T> {
    let mut k = BandMatrix::zeros(mesh.num_interior(), interior_bandwidth(mesh));
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let g = mesh.basis_gradients(t);
        let w = coef[t] * mesh.areas()[t];
        for a in 0..3 {
            let Some(i) = mesh.interior_index(tri[a]) else { continue };
            for b in 0..=a {
                let Some(j) = mesh.interior_index(tri[b]) else { continue };
                let v = w * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
                if a == b {
                    k.add(i, i, v);
                } else {
                    k.add(i, j, v);
                }
            }
        }
    }
    k
}

/// Metric in which descent directions are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PreconditionerKind {
    /// Raw residual in nodal coordinates.
    Identity,
    /// Discrete Dirichlet Laplacian (an `H¹₀` gradient).
    #[default]
    Laplacian,
    /// Stiffness matrix weighted by the current flux coefficient
    /// `ψ·(|∇u|^{p−2} + μ|∇u|^{q−2})`, refactored at every call.
    Weighted,
}

impl PreconditionerKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Identity => "identity",
            Self::Laplacian => "laplacian",
            Self::Weighted => "weighted",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "identity" | "none" => Some(Self::Identity),
            "laplacian" => Some(Self::Laplacian),
            "weighted" => Some(Self::Weighted),
            _ => None,
        }
    }
}

/// Maps a residual (dual vector) to a primal descent direction.
#[derive(Debug, Clone)]
pub struct Preconditioner<T> {
    kind: PreconditionerKind,
    laplacian: Option<BandCholesky<T>>,
}

impl<T: Scalar> Preconditioner<T> {
    pub fn new(kind: PreconditionerKind, mesh: &Mesh<T>) -> Result<Self> {
        let laplacian = match kind {
            PreconditionerKind::Laplacian => {
                Some(weighted_stiffness(mesh, &vec![T::one(); mesh.num_triangles()]).cholesky()?)
            }
            _ => None,
        };
        Ok(Self { kind, laplacian })
    }

    pub fn kind(&self) -> PreconditionerKind {
        self.kind
    }

    /// Direction `d` (interior values) with `K d = residual`.
    pub fn apply(&self, functional: &Functional<T>, u: &MeshFunction<T>, residual: &[T]) -> Result<Vec<T>> {
        match self.kind {
            PreconditionerKind::Identity => Ok(residual.to_vec()),
            PreconditionerKind::Laplacian => Ok(self.laplacian.as_ref().expect("factored").solve(residual)),
            PreconditionerKind::Weighted => {
                let g = u.gradient();
                let psi = functional.kirchhoff_factor(&g);
                // ψ vanishes at u = 0 in the degenerate case; keep the metric definite
                let psi = if psi > T::zero() { psi } else { T::one() };
                let mu = functional.space().mu_cell();
                let coef: Vec<T> = g
                    .values()
                    .iter()
                    .zip(mu)
                    .map(|(gv, &m)| psi * functional.flux_coefficient(*gv, m))
                    .collect();
                Ok(weighted_stiffness(functional.mesh(), &coef).cholesky()?.solve(residual))
            }
        }
    }
}
