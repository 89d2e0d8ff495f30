//! Seeded random test fields: smooth bumps, sign-changing fields with
//! separated supports, and random cell fields.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::discretization::{CellField, Mesh, MeshFunction};
use crate::scalar::Scalar;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Coordinates mapped to `[0, 1]²`.
fn unit_coords<T: Scalar>(mesh: &Mesh<T>, x: [T; 2]) -> (f64, f64) {
    let r = mesh.rect();
    (
        ((x[0] - r.x0) / r.width()).as_f64(),
        ((x[1] - r.y0) / r.height()).as_f64(),
    )
}

/// `sin(πx̂) sin(πŷ)`, the first Dirichlet eigenfunction of the rectangle.
pub fn sine_bump<T: Scalar>(mesh: &Arc<Mesh<T>>) -> MeshFunction<T> {
    let m = mesh.clone();
    MeshFunction::from_fn(mesh.clone(), move |x| {
        let (s, t) = unit_coords(&m, x);
        T::lit((std::f64::consts::PI * s).sin() * (std::f64::consts::PI * t).sin())
    })
}

/// Product mode `sin(kπx̂) sin(lπŷ)`.
pub fn sine_mode<T: Scalar>(mesh: &Arc<Mesh<T>>, k: usize, l: usize) -> MeshFunction<T> {
    let m = mesh.clone();
    MeshFunction::from_fn(mesh.clone(), move |x| {
        let (s, t) = unit_coords(&m, x);
        let pi = std::f64::consts::PI;
        T::lit((k as f64 * pi * s).sin() * (l as f64 * pi * t).sin())
    })
}

/// Smooth random field: a few low sine modes with decaying random amplitudes.
pub fn random_smooth<T: Scalar, R: Rng>(mesh: &Arc<Mesh<T>>, rng: &mut R, modes: usize) -> MeshFunction<T> {
    let coeffs: Vec<(f64, f64, f64)> = (0..modes.max(1))
        .map(|_| {
            let k = rng.gen_range(1..=4) as f64;
            let l = rng.gen_range(1..=4) as f64;
            let a = rng.gen_range(-1.0..1.0) / (k * k + l * l);
            (k, l, a)
        })
        .collect();
    let m = mesh.clone();
    MeshFunction::from_fn(mesh.clone(), move |x| {
        let (s, t) = unit_coords(&m, x);
        let pi = std::f64::consts::PI;
        T::lit(coeffs.iter().map(|&(k, l, a)| a * (k * pi * s).sin() * (l * pi * t).sin()).sum())
    })
}

/// Nonnegative random field: a positive Gaussian bump times the boundary
/// profile, plus a small nonnegative perturbation.
pub fn random_positive<T: Scalar, R: Rng>(mesh: &Arc<Mesh<T>>, rng: &mut R) -> MeshFunction<T> {
    let c: [f64; 2] = [rng.gen_range(0.25..0.75), rng.gen_range(0.25..0.75)];
    let width = rng.gen_range(0.15..0.35);
    let amp = rng.gen_range(0.5..2.0);
    let m = mesh.clone();
    MeshFunction::from_fn(mesh.clone(), move |x| {
        let (s, t) = unit_coords(&m, x);
        let d2 = (s - c[0]).powi(2) + (t - c[1]).powi(2);
        let profile = (std::f64::consts::PI * s).sin() * (std::f64::consts::PI * t).sin();
        T::lit(amp * profile * ((-d2 / (2.0 * width * width)).exp() + 0.1))
    })
}

/// Zeroes every positive vertex of a triangle that also has a negative
/// vertex. Afterwards no triangle sees both signs, so `∇u⁺` and `∇u⁻` have
/// disjoint supports and the energy splits exactly across the two parts.
pub fn separate_supports<T: Scalar>(u: &MeshFunction<T>) -> MeshFunction<T> {
    let mesh = u.mesh();
    let mut vals = u.values().to_vec();
    for tri in mesh.triangles() {
        let has_neg = tri.iter().any(|&v| u.values()[v] < T::zero());
        if has_neg {
            for &v in tri {
                if u.values()[v] > T::zero() {
                    vals[v] = T::zero();
                }
            }
        }
    }
    MeshFunction::from_values(mesh.clone(), vals).expect("boundary stays zero")
}

/// Sign-changing field whose parts have separated supports: a positive and
/// a negative Gaussian bump at random centers plus smooth random modes.
pub fn random_sign_changing<T: Scalar, R: Rng>(mesh: &Arc<Mesh<T>>, rng: &mut R) -> MeshFunction<T> {
    for _ in 0..1000 {
        let cp: [f64; 2] = [rng.gen_range(0.2..0.8), rng.gen_range(0.2..0.8)];
        let mut cn: [f64; 2] = [rng.gen_range(0.2..0.8), rng.gen_range(0.2..0.8)];
        if (cp[0] - cn[0]).hypot(cp[1] - cn[1]) < 0.3 {
            cn = [1.0 - cp[0], 1.0 - cp[1]];
        }
        let wp = rng.gen_range(0.12..0.3);
        let wn = rng.gen_range(0.12..0.3);
        let ap = rng.gen_range(0.5..2.0);
        let an = rng.gen_range(0.5..2.0);
        let noise = random_smooth::<T, R>(mesh, rng, 3);
        let m = mesh.clone();
        let base = MeshFunction::from_fn(mesh.clone(), move |x| {
            let (s, t) = unit_coords(&m, x);
            let g = |c: [f64; 2], w: f64| (-((s - c[0]).powi(2) + (t - c[1]).powi(2)) / (2.0 * w * w)).exp();
            let profile = (std::f64::consts::PI * s).sin() * (std::f64::consts::PI * t).sin();
            T::lit(profile * (ap * g(cp, wp) - an * g(cn, wn)))
        });
        let u = separate_supports(&base.combine(T::one(), &noise, T::lit(0.3)));
        if u.is_sign_changing() {
            return u;
        }
    }
    panic!("mesh too coarse to host a separated sign-changing field");
}

/// Random piecewise-constant vector field with magnitudes spread over
/// `[0, 2·scale]`.
pub fn random_cell_field<T: Scalar, R: Rng>(mesh: &Arc<Mesh<T>>, rng: &mut R, scale: f64) -> CellField<T> {
    let values = (0..mesh.num_triangles())
        .map(|_| {
            let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let m: f64 = rng.gen_range(0.0..2.0) * scale;
            [T::lit(m * angle.cos()), T::lit(m * angle.sin())]
        })
        .collect();
    CellField::new(mesh.clone(), values).expect("length matches")
}
