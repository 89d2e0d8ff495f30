mod common;

use common::*;
use kirchhoff_core::nehari::{
    fiber_max_check, lambda_map, project_from_starts, project_to_m, sign_case_check, Fiber, SignCase,
};
use kirchhoff_core::{sampling, Functional, MeshFunction, NehariPair, ProjectionOptions};

fn opts() -> ProjectionOptions<f64> {
    ProjectionOptions::default()
}

fn sign_changing(f: &Functional<f64>, seed: u64) -> MeshFunction<f64> {
    sampling::random_sign_changing(f.mesh(), &mut sampling::rng(seed))
}

fn member(f: &Functional<f64>, seed: u64) -> (MeshFunction<f64>, NehariPair<f64>) {
    let u = sign_changing(f, seed);
    let pair = project_to_m(f, &u, &opts()).unwrap();
    (u, pair)
}

#[test]
fn decomposition_is_strict_with_kirchhoff_growth() {
    for a0 in [0.0, 1.0] {
        let f = desk_theta(16, a0, 1.5);
        for seed in 0..10 {
            let u = sign_changing(&f, seed).scale(3.0);
            let (plus, minus) = u.split_parts();
            let neg = minus.scale(-1.0);
            let whole = f.phi(&u).phi;
            let parts = f.phi(&plus).phi + f.phi(&neg).phi;
            assert!(whole > parts, "a0={a0} seed={seed}: {whole} <= {parts}");
            assert!(f.directional(&u, &plus, None) > f.directional(&plus, &plus, None));
            assert!(f.directional(&u, &neg, None) > f.directional(&neg, &neg, None));
        }
    }
}

#[test]
fn decomposition_is_exact_without_kirchhoff_growth() {
    let f = desk_theta(16, 0.0, 1.0);
    for seed in 0..10 {
        let u = sign_changing(&f, seed).scale(3.0);
        let (plus, minus) = u.split_parts();
        let neg = minus.scale(-1.0);
        let whole = f.phi(&u).phi;
        let parts = f.phi(&plus).phi + f.phi(&neg).phi;
        assert!((whole - parts).abs() <= 1e-10 * whole.abs().max(1.0));
        let (a, b) = (f.directional(&u, &plus, None), f.directional(&plus, &plus, None));
        assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
    }
}

#[test]
fn projection_matches_closed_form_when_decoupled() {
    let f = decoupled(16);
    let m = f.mesh().clone();
    let (p, r) = (1.5, 4.0);
    let closed = |w: &MeshFunction<f64>| {
        let grad = kahan((0..m.num_triangles()).map(|t| {
            let g = oracle_gradient(&m, w, t);
            oracle_area(&m, t) * (g[0] * g[0] + g[1] * g[1]).sqrt().powf(p)
        }));
        let pot = kahan(m.triangles().iter().enumerate().flat_map(|(t, tri)| {
            let v = tri.map(|k| w.values()[k]);
            let area = oracle_area(&m, t);
            [(0, 1), (1, 2), (0, 2)].map(|(i, j)| area / 3.0 * (0.5 * (v[i] + v[j])).abs().powf(r))
        }));
        (grad / pot).powf(1.0 / (r - p))
    };
    for seed in 0..5 {
        let u = sign_changing(&f, 50 + seed);
        let (plus, minus) = u.split_parts();
        let pair = project_to_m(&f, &u, &opts()).unwrap();
        assert!(rel_err(pair.alpha, closed(&plus)) < 1e-8, "seed {seed}");
        assert!(rel_err(pair.beta, closed(&minus)) < 1e-8, "seed {seed}");
    }
}

#[test]
fn projection_is_start_independent_and_idempotent() {
    let f = desk(16, 1.0);
    let starts = [(1.0, 1.0), (0.1, 0.1), (10.0, 10.0), (0.2, 5.0), (5.0, 0.2), (50.0, 1.0), (1.0, 50.0), (3.0, 3.0)];
    for seed in 0..4 {
        let u = sign_changing(&f, seed);
        let pairs = project_from_starts(&f, &u, &starts, &opts()).unwrap();
        let (a0, b0) = (pairs[0].alpha, pairs[0].beta);
        for q in &pairs {
            assert!(q.bracket.contains(q.alpha, q.beta));
            assert!(rel_err(q.alpha, a0) < 1e-6 && rel_err(q.beta, b0) < 1e-6);
        }
        let again = project_to_m(&f, &pairs[0].projected, &opts()).unwrap();
        assert!((again.alpha - 1.0).abs() < 1e-6 && (again.beta - 1.0).abs() < 1e-6);
    }
}

#[test]
fn lambda_reparametrizes_under_scaling() {
    let f = desk(12, 1.0);
    let u = sign_changing(&f, 3);
    for c in [0.1, 2.0, 37.0] {
        for (a, b) in [(1.0, 1.0), (0.3, 2.0), (5.0, 0.7)] {
            let (x1, y1) = lambda_map(&f, &u.scale(c), a, b).unwrap();
            let (x2, y2) = lambda_map(&f, &u, c * a, c * b).unwrap();
            assert!(rel_err(x1, x2) < 1e-10 && rel_err(y1, y2) < 1e-10);
        }
    }
}

#[test]
fn projection_ordering_follows_pairing_signs() {
    let f = desk(16, 0.0);
    let (mut below, mut above) = (0, 0);
    for seed in 0..4 {
        let u = sign_changing(&f, 20 + seed);
        for c in [1e-2, 1.0, 1e2, 1e3] {
            let w = u.scale(c);
            let (gp, gm) = f.pairings(&w);
            let pair = project_to_m(&f, &w, &opts()).unwrap();
            if gp <= 0.0 && gm <= 0.0 {
                assert!(pair.alpha <= 1.0 + 1e-8 && pair.beta <= 1.0 + 1e-8);
                below += 1;
            }
            if gp >= 0.0 && gm >= 0.0 {
                assert!(pair.alpha >= 1.0 - 1e-8 && pair.beta >= 1.0 - 1e-8);
                above += 1;
            }
        }
    }
    assert!(below > 0 && above > 0, "{below} {above}");
}

#[test]
fn sign_cases_hold_around_members() {
    let f = desk(16, 1.0);
    let (_, pair) = member(&f, 11);
    let y = pair.projected;
    let mut seen = [0usize; 4];
    for &(a, b) in &[(1.5, 1.0), (3.0, 0.5), (0.5, 0.8), (0.2, 3.0), (1.0, 1.7), (0.4, 6.0), (0.9, 0.3), (2.0, 0.1)] {
        let rep = sign_case_check(&f, &y, a, b).unwrap();
        assert!(!rep.skipped() && rep.all_hold(), "({a}, {b}): {rep:?}");
        for c in &rep.checks {
            seen[match c.case {
                SignCase::I => 0,
                SignCase::II => 1,
                SignCase::III => 2,
                SignCase::IV => 3,
            }] += 1;
        }
    }
    assert!(seen.iter().all(|&n| n > 0), "{seen:?}");
}

#[test]
fn fiber_peaks_at_the_projection() {
    let f = desk(16, 1.0);
    for seed in [5, 6] {
        let (_, pair) = member(&f, seed);
        let y = pair.projected.clone();
        let own = project_to_m(&f, &y, &opts()).unwrap();
        let rep = fiber_max_check(&f, &y, &own, 21).unwrap();
        assert!(rep.max_at_pair && rep.boundary_below && rep.shell_negative, "{:?}", (rep.argmax, rep.pair_index));
        let fiber = Fiber::new(&f, &y).unwrap();
        assert!((fiber.upsilon(1.0, 1.0) - f.phi(&y).phi).abs() <= 1e-10 * f.phi(&y).phi);
    }
}

#[test]
fn constant_sign_input_has_no_projection() {
    let f = desk(8, 1.0);
    assert!(project_to_m(&f, &sampling::sine_bump(f.mesh()), &opts()).is_err());
}
