use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::scalar::Scalar;

use super::Mesh;

/// Nodal P1 field on a mesh.
///
/// Fields built through [`MeshFunction::zeros`], [`MeshFunction::from_fn`] and
/// [`MeshFunction::from_values`] vanish on the boundary. The
/// [`MeshFunction::unconstrained`] constructor skips that check and is meant
/// for interpolation tests only.
#[derive(Debug, Clone)]
pub struct MeshFunction<T> {
    mesh: Arc<Mesh<T>>,
    values: Vec<T>,
}

/// One gradient vector per triangle.
#[derive(Debug, Clone)]
pub struct CellField<T> {
    mesh: Arc<Mesh<T>>,
    values: Vec<[T; 2]>,
}

impl<T: Scalar> MeshFunction<T> {
    pub fn zeros(mesh: Arc<Mesh<T>>) -> Self {
        let values = vec![T::zero(); mesh.num_vertices()];
        Self { mesh, values }
    }

    /// Interpolates `f` at the vertices and zeroes the boundary.
    pub fn from_fn(mesh: Arc<Mesh<T>>, f: impl Fn([T; 2]) -> T) -> Self {
        let values = mesh
            .vertices()
            .iter()
            .enumerate()
            .map(|(v, &p)| if mesh.is_boundary(v) { T::zero() } else { f(p) })
            .collect();
        Self { mesh, values }
    }

    pub fn from_values(mesh: Arc<Mesh<T>>, values: Vec<T>) -> Result<Self> {
        let u = Self::unconstrained(mesh, values)?;
        if let Some(v) = (0..u.values.len()).find(|&v| u.mesh.is_boundary(v) && u.values[v] != T::zero()) {
            return Err(invalid(format!("vertex {v} lies on the boundary but has a nonzero value")));
        }
        Ok(u)
    }

    /// Field with arbitrary boundary values.
    pub fn unconstrained(mesh: Arc<Mesh<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != mesh.num_vertices() {
            return Err(invalid(format!(
                "{} values for {} vertices",
                values.len(),
                mesh.num_vertices()
            )));
        }
        Ok(Self { mesh, values })
    }

    /// Scatters interior unknowns (in [`Mesh::interior`] order) into a field.
    pub fn from_interior(mesh: Arc<Mesh<T>>, interior: &[T]) -> Result<Self> {
        if interior.len() != mesh.num_interior() {
            return Err(invalid("interior vector length mismatch"));
        }
        let mut values = vec![T::zero(); mesh.num_vertices()];
        for (&v, &x) in mesh.interior().iter().zip(interior) {
            values[v] = x;
        }
        Ok(Self { mesh, values })
    }

    pub fn mesh(&self) -> &Arc<Mesh<T>> {
        &self.mesh
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn interior_values(&self) -> Vec<T> {
        self.mesh.interior().iter().map(|&v| self.values[v]).collect()
    }

    pub fn is_admissible(&self) -> bool {
        self.values
            .iter()
            .enumerate()
            .all(|(v, &x)| !self.mesh.is_boundary(v) || x == T::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&x| x == T::zero())
    }

    pub fn min_value(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max_value(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            mesh: self.mesh.clone(),
            values: self.values.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|x| c * x)
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Self {
        debug_assert!(Arc::ptr_eq(&self.mesh, &other.mesh) || self.values.len() == other.values.len());
        Self {
            mesh: self.mesh.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&x, &y)| a * x + b * y)
                .collect(),
        }
    }

    /// Nodal truncations `(u⁺, u⁻)` with `u = u⁺ − u⁻` and `u⁺·u⁻ = 0`.
    pub fn split_parts(&self) -> (Self, Self) {
        let plus = self.map(|x| if x > T::zero() { x } else { T::zero() });
        let minus = self.map(|x| if x < T::zero() { -x } else { T::zero() });
        (plus, minus)
    }

    pub fn positive_part(&self) -> Self {
        self.split_parts().0
    }

    pub fn negative_part(&self) -> Self {
        self.split_parts().1
    }

    /// Both nodal parts are nonzero.
    pub fn is_sign_changing(&self) -> bool {
        self.values.iter().any(|&x| x > T::zero()) && self.values.iter().any(|&x| x < T::zero())
    }

    /// Elementwise constant gradient of the P1 interpolant.
    pub fn gradient(&self) -> CellField<T> {
        let values = self
            .mesh
            .triangles()
            .iter()
            .enumerate()
            .map(|(t, tri)| {
                let g = self.mesh.basis_gradients(t);
                let mut out = [T::zero(); 2];
                for k in 0..3 {
                    let u = self.values[tri[k]];
                    out[0] += u * g[k][0];
                    out[1] += u * g[k][1];
                }
                out
            })
            .collect();
        CellField {
            mesh: self.mesh.clone(),
            values,
        }
    }

    /// Value of the interpolant at barycentric point `bary` of triangle `t`.
    pub fn eval_bary(&self, t: usize, bary: [T; 3]) -> T {
        let tri = self.mesh.triangles()[t];
        bary[0] * self.values[tri[0]] + bary[1] * self.values[tri[1]] + bary[2] * self.values[tri[2]]
    }

    /// Exact `∫ u v` of the P1 interpolants (local mass matrix).
    pub fn l2_inner(&self, other: &Self) -> T {
        let twelfth = T::one() / T::lit(12.0);
        let mut total = T::zero();
        for (t, tri) in self.mesh.triangles().iter().enumerate() {
            let a = tri.map(|v| self.values[v]);
            let b = tri.map(|v| other.values[v]);
            let sa = a[0] + a[1] + a[2];
            let sb = b[0] + b[1] + b[2];
            let diag = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
            total += self.mesh.areas()[t] * twelfth * (sa * sb + diag);
        }
        total
    }

    pub fn l2_norm(&self) -> T {
        self.l2_inner(self).max(T::zero()).sqrt()
    }
}

impl<T: Scalar> CellField<T> {
    pub fn new(mesh: Arc<Mesh<T>>, values: Vec<[T; 2]>) -> Result<Self> {
        if values.len() != mesh.num_triangles() {
            return Err(invalid(format!(
                "{} cell vectors for {} triangles",
                values.len(),
                mesh.num_triangles()
            )));
        }
        Ok(Self { mesh, values })
    }

    pub fn mesh(&self) -> &Arc<Mesh<T>> {
        &self.mesh
    }

    pub fn values(&self) -> &[[T; 2]] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Euclidean length per triangle.
    pub fn magnitudes(&self) -> Vec<T> {
        self.values.iter().map(|g| g[0].hypot(g[1])).collect()
    }

    pub fn scale(&self, c: T) -> Self {
        Self {
            mesh: self.mesh.clone(),
            values: self.values.iter().map(|g| [c * g[0], c * g[1]]).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            mesh: self.mesh.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| [a[0] + b[0], a[1] + b[1]])
                .collect(),
        }
    }

    pub fn max_abs(&self) -> T {
        self.magnitudes().into_iter().fold(T::zero(), T::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mesh(n: usize) -> Arc<Mesh<f64>> {
        Arc::new(Mesh::unit_square(n).unwrap())
    }

    #[test]
    fn zero_has_zero_gradient() {
        let u = MeshFunction::zeros(mesh(3));
        assert!(u.gradient().values().iter().all(|g| g == &[0.0, 0.0]));
    }

    #[test]
    fn affine_interpolant_is_exact() {
        let m = mesh(5);
        let u = MeshFunction::unconstrained(m.clone(), m.vertices().iter().map(|p| p[0]).collect()).unwrap();
        for g in u.gradient().values() {
            assert!((g[0] - 1.0).abs() < 1e-13 && g[1].abs() < 1e-13);
        }
        let w = MeshFunction::unconstrained(m.clone(), m.vertices().iter().map(|p| 2.0 - 3.0 * p[1] + 0.5 * p[0]).collect()).unwrap();
        for g in w.gradient().values() {
            assert!((g[0] - 0.5).abs() < 1e-13 && (g[1] + 3.0).abs() < 1e-13);
        }
    }

    #[test]
    fn boundary_check() {
        let m = mesh(3);
        let mut vals = vec![0.0; m.num_vertices()];
        vals[0] = 1.0;
        assert!(MeshFunction::from_values(m.clone(), vals.clone()).is_err());
        assert!(!MeshFunction::unconstrained(m.clone(), vals).unwrap().is_admissible());
        assert!(MeshFunction::from_values(m, vec![0.0; 3]).is_err());
    }

    #[test]
    fn parts_of_nonnegative_field() {
        let m = mesh(4);
        let u = MeshFunction::from_fn(m, |p| p[0] * p[1]);
        let (plus, minus) = u.split_parts();
        assert_eq!(plus.values(), u.values());
        assert!(minus.is_zero());
        let (p2, m2) = u.scale(-1.0).split_parts();
        assert_eq!(m2.values(), plus.values());
        assert!(p2.is_zero());
    }

    #[test]
    fn l2_matches_quadrature() {
        let m = mesh(4);
        let u = MeshFunction::from_fn(m.clone(), |p| (3.0 * p[0]).sin() * p[1]);
        let table = super::super::QuadratureTable::new(&m, super::super::QuadratureRule::Midpoint);
        let q = super::super::integrate_nodal(&u, &table, |_, s| s * s).unwrap();
        assert!((u.l2_norm().powi(2) - q).abs() < 1e-15);
    }
}
