use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

use super::{Mesh, MeshFunction};

/// Per-triangle quadrature rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuadratureRule {
    /// Vertex average: exact for P1 integrands.
    VertexAverage,
    /// Edge midpoints: exact for P2 integrands.
    #[default]
    Midpoint,
}

impl QuadratureRule {
    /// Barycentric points and weights (weights sum to one).
    pub fn points<T: Scalar>(self) -> Vec<([T; 3], T)> {
        let (z, h, o) = (T::zero(), T::lit(0.5), T::one());
        let w = T::one() / T::lit(3.0);
        match self {
            Self::VertexAverage => vec![([o, z, z], w), ([z, o, z], w), ([z, z, o], w)],
            Self::Midpoint => vec![([h, h, z], w), ([z, h, h], w), ([h, z, h], w)],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::VertexAverage => "vertex",
            Self::Midpoint => "midpoint",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "vertex" | "vertex-average" => Some(Self::VertexAverage),
            "midpoint" => Some(Self::Midpoint),
            _ => None,
        }
    }
}

/// Quadrature nodes of a whole mesh, flattened triangle by triangle.
#[derive(Debug, Clone)]
pub struct QuadratureTable<T> {
    rule: QuadratureRule,
    per_triangle: usize,
    bary: Vec<[T; 3]>,
    points: Vec<[T; 2]>,
    /// Rule weight times triangle area.
    weights: Vec<T>,
}

impl<T: Scalar> QuadratureTable<T> {
    pub fn new(mesh: &Mesh<T>, rule: QuadratureRule) -> Self {
        let local = rule.points::<T>();
        let n = mesh.num_triangles() * local.len();
        let mut bary = Vec::with_capacity(n);
        let mut points = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for (t, &area) in mesh.areas().iter().enumerate() {
            for &(b, w) in &local {
                bary.push(b);
                points.push(mesh.point_in(t, b));
                weights.push(w * area);
            }
        }
        Self {
            rule,
            per_triangle: local.len(),
            bary,
            points,
            weights,
        }
    }

    pub fn rule(&self) -> QuadratureRule {
        self.rule
    }

    pub fn per_triangle(&self) -> usize {
        self.per_triangle
    }

    /// Index range of the nodes belonging to triangle `t`.
    pub fn range(&self, t: usize) -> std::ops::Range<usize> {
        t * self.per_triangle..(t + 1) * self.per_triangle
    }

    pub fn bary(&self, k: usize) -> [T; 3] {
        self.bary[k]
    }

    pub fn point(&self, k: usize) -> [T; 2] {
        self.points[k]
    }

    pub fn weight(&self, k: usize) -> T {
        self.weights[k]
    }
}

/// `Σ_t w_t·|t|` for a piecewise-constant integrand.
pub fn integrate_cells<T: Scalar>(mesh: &Mesh<T>, w: &[T]) -> Result<T> {
    if w.len() != mesh.num_triangles() {
        return Err(invalid(format!(
            "cell integrand has {} entries, mesh has {} triangles",
            w.len(),
            mesh.num_triangles()
        )));
    }
    Ok(w.iter().zip(mesh.areas()).map(|(&a, &b)| a * b).sum())
}

/// Integral of `g(x, u(x))` over the mesh by `table`.
pub fn integrate_nodal<T, G>(u: &MeshFunction<T>, table: &QuadratureTable<T>, g: G) -> Result<T>
where
    T: Scalar,
    G: Fn([T; 2], T) -> T,
{
    let mesh = u.mesh();
    let mut total = T::zero();
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let vals = tri.map(|v| u.values()[v]);
        for k in table.range(t) {
            let b = table.bary(k);
            let s = b[0] * vals[0] + b[1] * vals[1] + b[2] * vals[2];
            let gv = g(table.point(k), s);
            if !gv.is_finite() {
                return Err(Error::NonFiniteTriangle {
                    triangle: t,
                    detail: format!("integrand {} at u = {}", gv.as_f64(), s.as_f64()),
                });
            }
            total += table.weight(k) * gv;
        }
    }
    Ok(total)
}
