#![allow(dead_code)]

use std::sync::Arc;

use kirchhoff_core::{Functional, Mesh, MeshFunction, ProblemSpec, Weight};

pub fn desk(n: usize, a0: f64) -> Functional<f64> {
    Functional::new(ProblemSpec::desk_default(n, a0).unwrap()).unwrap()
}

/// Desk problem with `ϑ` replaced.
pub fn desk_theta(n: usize, a0: f64, theta: f64) -> Functional<f64> {
    let spec = ProblemSpec::desk_default(n, a0).unwrap().with_kirchhoff(a0, 1.0, theta).unwrap();
    Functional::new(spec).unwrap()
}

/// `ϑ = 1`, `a₀ = 0`, `μ ≡ 0`: the Kirchhoff factor is identically one and
/// the `q`-phase is switched off.
pub fn decoupled(n: usize) -> Functional<f64> {
    let spec = ProblemSpec::desk_default(n, 0.0)
        .unwrap()
        .with_kirchhoff(0.0, 1.0, 1.0)
        .unwrap()
        .with_weight(Weight::Constant(0.0));
    Functional::new(spec).unwrap()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Triangle gradient from vertex coordinates by Cramer's rule.
pub fn oracle_gradient(mesh: &Mesh<f64>, u: &MeshFunction<f64>, t: usize) -> [f64; 2] {
    let [a, b, c] = mesh.triangles()[t];
    let (pa, pb, pc) = (mesh.vertices()[a], mesh.vertices()[b], mesh.vertices()[c]);
    let (ua, ub, uc) = (u.values()[a], u.values()[b], u.values()[c]);
    let (m11, m12, m21, m22) = (pb[0] - pa[0], pb[1] - pa[1], pc[0] - pa[0], pc[1] - pa[1]);
    let (r1, r2) = (ub - ua, uc - ua);
    let det = m11 * m22 - m12 * m21;
    [(r1 * m22 - m12 * r2) / det, (m11 * r2 - r1 * m21) / det]
}

pub fn oracle_area(mesh: &Mesh<f64>, t: usize) -> f64 {
    let [a, b, c] = mesh.triangles()[t];
    let (pa, pb, pc) = (mesh.vertices()[a], mesh.vertices()[b], mesh.vertices()[c]);
    0.5 * ((pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1])).abs()
}

pub fn oracle_centroid(mesh: &Mesh<f64>, t: usize) -> [f64; 2] {
    let [a, b, c] = mesh.triangles()[t];
    let v = mesh.vertices();
    [(v[a][0] + v[b][0] + v[c][0]) / 3.0, (v[a][1] + v[b][1] + v[c][1]) / 3.0]
}

/// Compensated summation.
pub fn kahan(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0_f64, 0.0_f64);
    for x in xs {
        let y = x - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Seven-point degree-5 Gauss rule on a triangle: barycentric points and
/// weights summing to one.
pub fn gauss7() -> Vec<([f64; 3], f64)> {
    let s15 = 15f64.sqrt();
    let (a1, b1) = ((9.0 - 2.0 * s15) / 21.0, (6.0 + s15) / 21.0);
    let (a2, b2) = ((9.0 + 2.0 * s15) / 21.0, (6.0 - s15) / 21.0);
    let (w1, w2) = ((155.0 + s15) / 1200.0, (155.0 - s15) / 1200.0);
    let third = 1.0 / 3.0;
    vec![
        ([third, third, third], 0.225),
        ([a1, b1, b1], w1),
        ([b1, a1, b1], w1),
        ([b1, b1, a1], w1),
        ([a2, b2, b2], w2),
        ([b2, a2, b2], w2),
        ([b2, b2, a2], w2),
    ]
}

pub fn mesh(n: usize) -> Arc<Mesh<f64>> {
    Arc::new(Mesh::unit_square(n).unwrap())
}
