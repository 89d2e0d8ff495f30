//! Acceptance suite: nine criteria at desk scale (unit square, 33×33
//! vertices), one PASS/FAIL line each. Exits nonzero when any fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use kirchhoff_core::nehari::{fiber_max_check, project_from_starts, project_to_m, sign_case_check, SignCase};
use kirchhoff_core::solvers::{minimize_over_m, mountain_pass};
use kirchhoff_core::{
    sampling, Functional, Mesh, MeshFunction, ProblemSpec, ProjectionOptions, Sign, SolverOptions, Weight,
};

const N: usize = 32;

type Verdict = Result<String, String>;

fn desk(a0: f64, theta: f64) -> Functional<f64> {
    let spec = ProblemSpec::desk_default(N, a0).unwrap().with_kirchhoff(a0, 1.0, theta).unwrap();
    Functional::new(spec).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sign_changing(f: &Functional<f64>, seed: u64) -> MeshFunction<f64> {
    sampling::random_sign_changing(f.mesh(), &mut sampling::rng(seed))
}

fn modular_norm_suite() -> Verdict {
    let f = desk(1.0, 1.5);
    let space = f.space();
    let fields: Vec<_> = (0..100u64)
        .map(|k| {
            let g = sampling::random_cell_field(f.mesh(), &mut sampling::rng(k), 1.0);
            let target = 10f64.powf(-2.0 + 4.0 * k as f64 / 99.0);
            g.scale(target / space.luxemburg_norm(&g).unwrap())
        })
        .collect();
    let mut worst_lux = 0.0_f64;
    for (k, g) in fields.iter().enumerate() {
        let r = space.check_modular_relations(g).map_err(|e| e.to_string())?;
        ensure(r.holds, || format!("field {k}: relations fail {r:?}"))?;
        let tau = r.norm;
        let res = (space.modular(&g.scale(1.0 / tau)) - 1.0).abs();
        worst_lux = worst_lux.max(res);
        ensure(res <= 1e-10, || format!("field {k}: Luxemburg residual {res:e}"))?;
        for lambda in [-3.7, 0.25, 10.0] {
            let lhs = space.luxemburg_norm(&g.scale(lambda)).unwrap();
            let rhs = lambda.abs() * tau;
            ensure((lhs - rhs).abs() <= 1e-10 * rhs, || format!("field {k}: homogeneity {lhs} vs {rhs}"))?;
        }
        let h = &fields[(k + 1) % fields.len()];
        let nh = space.luxemburg_norm(h).unwrap();
        let sum = space.luxemburg_norm(&g.add(h)).unwrap();
        ensure(sum <= tau + nh + 1e-10 * (tau + nh), || format!("field {k}: triangle {sum} > {tau} + {nh}"))?;
    }
    let (lo, hi) = fields
        .iter()
        .map(|g| space.luxemburg_norm(g).unwrap())
        .fold((f64::INFINITY, 0.0_f64), |(a, b), n| (a.min(n), b.max(n)));
    Ok(format!("100 fields, norms {lo:.3e}..{hi:.3e}, worst Luxemburg residual {worst_lux:.1e}"))
}

fn gradient_consistency() -> Verdict {
    let mut worst = 0.0_f64;
    for a0 in [0.0, 1.0] {
        let f = desk(a0, 1.5);
        for k in 0..20u64 {
            let mut rng = sampling::rng(2000 + k);
            let u = sampling::random_smooth(f.mesh(), &mut rng, 4).scale(2.0);
            let v = sampling::random_smooth(f.mesh(), &mut rng, 4);
            let d = |h: f64| (f.phi(&u.combine(1.0, &v, h)).phi - f.phi(&u.combine(1.0, &v, -h)).phi) / (2.0 * h);
            let h = 1e-3;
            let fd = (4.0 * d(h / 2.0) - d(h)) / 3.0;
            let an = f.residual(&u, None).map_err(|e| e.to_string())?.dot(&v);
            let e = rel(an, fd);
            worst = worst.max(e);
            ensure(e < 1e-5, || format!("a0={a0} pair {k}: {an} vs {fd} (rel {e:e})"))?;
        }
    }
    Ok(format!("40 pairs, worst relative error {worst:.1e}"))
}

fn decomposition_inequalities() -> Verdict {
    let strict = desk(1.0, 1.5);
    let mut min_gap = f64::INFINITY;
    for k in 0..50u64 {
        let u = sign_changing(&strict, 3000 + k).scale(3.0);
        let (plus, minus) = u.split_parts();
        let neg = minus.scale(-1.0);
        let gap = strict.phi(&u).phi - strict.phi(&plus).phi - strict.phi(&neg).phi;
        min_gap = min_gap.min(gap);
        ensure(gap > 0.0, || format!("u {k}: energy gap {gap}"))?;
        let (a, b) = (strict.directional(&u, &plus, None), strict.directional(&plus, &plus, None));
        ensure(a > b, || format!("u {k}: pairing {a} <= {b}"))?;
    }
    let flat = desk(0.0, 1.0);
    let mut worst = 0.0_f64;
    for k in 0..50u64 {
        let u = sign_changing(&flat, 3000 + k).scale(3.0);
        let (plus, minus) = u.split_parts();
        let neg = minus.scale(-1.0);
        let whole = flat.phi(&u).phi;
        let parts = flat.phi(&plus).phi + flat.phi(&neg).phi;
        let (a, b) = (flat.directional(&u, &plus, None), flat.directional(&plus, &plus, None));
        let e = ((whole - parts).abs() / whole.abs().max(1.0)).max((a - b).abs() / a.abs().max(1.0));
        worst = worst.max(e);
        ensure(e <= 1e-10, || format!("u {k}: equality off by {e:e}"))?;
    }
    Ok(format!("50+50 fields, smallest strict gap {min_gap:.3e}, worst equality defect {worst:.1e}"))
}

/// Twelve probe points inside each sign region.
fn probe_points() -> Vec<(SignCase, f64, f64)> {
    let mut pts = Vec::new();
    for a in [1.05, 1.5, 3.0, 10.0] {
        for r in [0.1, 0.5, 1.0] {
            pts.push((SignCase::I, a, r * a));
            pts.push((SignCase::III, r * a, a));
        }
    }
    for a in [0.05, 0.3, 0.6, 0.95] {
        for r in [1.0, 2.0, 10.0] {
            pts.push((SignCase::II, a, r * a));
            pts.push((SignCase::IV, r * a, a));
        }
    }
    pts
}

fn projection_suite() -> Verdict {
    let f = desk(1.0, 1.5);
    let opts = ProjectionOptions::default();
    let starts = [(1.0, 1.0), (0.1, 0.1), (10.0, 10.0), (0.2, 5.0), (5.0, 0.2), (50.0, 1.0), (1.0, 50.0), (300.0, 300.0)];
    let probes = probe_points();
    let (mut spread, mut idem, mut min_margin) = (0.0_f64, 0.0_f64, f64::INFINITY);
    let (mut below, mut above) = (0, 0);
    for k in 0..20u64 {
        let u = sign_changing(&f, 4000 + k);
        let pairs = project_from_starts(&f, &u, &starts, &opts).map_err(|e| format!("u {k}: {e}"))?;
        let p0 = &pairs[0];
        for p in &pairs {
            ensure(p.bracket.contains(p.alpha, p.beta), || format!("u {k}: pair outside its bracket"))?;
            let s = rel(p.alpha, p0.alpha).max(rel(p.beta, p0.beta));
            spread = spread.max(s);
            ensure(s <= 1e-6, || format!("u {k}: starts disagree by {s:e}"))?;
        }
        let y = &p0.projected;
        let again = project_to_m(&f, y, &opts).map_err(|e| e.to_string())?;
        let d = (again.alpha - 1.0).abs().max((again.beta - 1.0).abs());
        idem = idem.max(d);
        ensure(d <= 1e-6, || format!("u {k}: reprojection moved by {d:e}"))?;
        for &(case, a, b) in &probes {
            let rep = sign_case_check(&f, y, a, b).map_err(|e| e.to_string())?;
            let c = rep.checks.iter().find(|c| c.case == case).ok_or_else(|| format!("({a}, {b}) not in {case:?}"))?;
            ensure(rep.all_hold(), || format!("u {k}: sign case fails at ({a}, {b}): {rep:?}"))?;
            min_margin = min_margin.min(c.margin);
        }
        for c in [1e-2, 1.0, 1e3] {
            let w = u.scale(c);
            let (gp, gm) = f.pairings(&w);
            let p = project_to_m(&f, &w, &opts).map_err(|e| e.to_string())?;
            if gp <= 0.0 && gm <= 0.0 {
                below += 1;
                ensure(p.alpha <= 1.0 + 1e-8 && p.beta <= 1.0 + 1e-8, || format!("u {k} c {c}: ordering (<=)"))?;
            }
            if gp >= 0.0 && gm >= 0.0 {
                above += 1;
                ensure(p.alpha >= 1.0 - 1e-8 && p.beta >= 1.0 - 1e-8, || format!("u {k} c {c}: ordering (>=)"))?;
            }
        }
    }
    ensure(below > 0 && above > 0, || format!("ordering exercised {below}/{above} times"))?;
    Ok(format!(
        "20 fields, start spread {spread:.1e}, idempotence {idem:.1e}, 48 probes each (min margin {min_margin:.2e}), ordering cases {below}/{above}"
    ))
}

fn fiber_maximum() -> Verdict {
    let f = desk(1.0, 1.5);
    let opts = ProjectionOptions::default();
    for k in 0..10u64 {
        let u = sign_changing(&f, 5000 + k);
        let y = project_to_m(&f, &u, &opts).map_err(|e| e.to_string())?.projected;
        let own = project_to_m(&f, &y, &opts).map_err(|e| e.to_string())?;
        let rep = fiber_max_check(&f, &y, &own, 41).map_err(|e| e.to_string())?;
        ensure(rep.max_at_pair, || format!("member {k}: grid max at {:?}, pair at {:?}", rep.argmax, rep.pair_index))?;
        ensure(rep.shell_negative, || format!("member {k}: shell max {}", rep.shell_max))?;
    }
    Ok("10 members, 41x41 grids peak at the projection, outer shell negative".into())
}

/// `(‖∇w‖_p^p / ∫w^r)^{1/(r−p)}` with the mesh's own midpoint rule.
fn closed_form_root(mesh: &Mesh<f64>, w: &MeshFunction<f64>, p: f64, r: f64) -> f64 {
    let (mut grad, mut pot) = (0.0, 0.0);
    for tri in mesh.triangles() {
        let [a, b, c] = *tri;
        let (pa, pb, pc) = (mesh.vertices()[a], mesh.vertices()[b], mesh.vertices()[c]);
        let (wa, wb, wc) = (w.values()[a], w.values()[b], w.values()[c]);
        let (m11, m12, m21, m22) = (pb[0] - pa[0], pb[1] - pa[1], pc[0] - pa[0], pc[1] - pa[1]);
        let det = m11 * m22 - m12 * m21;
        let gx = ((wb - wa) * m22 - m12 * (wc - wa)) / det;
        let gy = (m11 * (wc - wa) - (wb - wa) * m21) / det;
        let area = 0.5 * det.abs();
        grad += area * (gx * gx + gy * gy).sqrt().powf(p);
        for (s, t) in [(wa, wb), (wb, wc), (wa, wc)] {
            pot += area / 3.0 * (0.5 * (s + t)).abs().powf(r);
        }
    }
    (grad / pot).powf(1.0 / (r - p))
}

fn closed_form() -> Verdict {
    let spec = ProblemSpec::desk_default(N, 0.0)
        .unwrap()
        .with_kirchhoff(0.0, 1.0, 1.0)
        .unwrap()
        .with_weight(Weight::Constant(0.0));
    let f = Functional::new(spec).unwrap();
    let mut worst = 0.0_f64;
    for k in 0..10u64 {
        let u = sign_changing(&f, 6000 + k);
        let (plus, minus) = u.split_parts();
        let pair = project_to_m(&f, &u, &ProjectionOptions::default()).map_err(|e| e.to_string())?;
        let ea = rel(pair.alpha, closed_form_root(f.mesh(), &plus, 1.5, 4.0));
        let eb = rel(pair.beta, closed_form_root(f.mesh(), &minus, 1.5, 4.0));
        worst = worst.max(ea).max(eb);
        ensure(ea.max(eb) < 1e-8, || format!("u {k}: alpha off by {ea:e}, beta by {eb:e}"))?;
    }
    Ok(format!("10 fields, worst relative error {worst:.1e}"))
}

fn constant_sign() -> Verdict {
    let opts = SolverOptions::default();
    let mut notes = Vec::new();
    for a0 in [1.0, 0.0] {
        let t = Instant::now();
        let f = desk(a0, 1.5);
        let u0 = mountain_pass(&f, Sign::Plus, &opts).map_err(|e| e.to_string())?;
        let v0 = mountain_pass(&f, Sign::Minus, &opts).map_err(|e| e.to_string())?;
        for (name, o) in [("u0", &u0), ("v0", &v0)] {
            ensure(o.converged, || format!("a0={a0}: {name} did not converge (residual {:e})", o.residual_norm))?;
            ensure(o.residual_norm <= 1e-6, || format!("a0={a0}: {name} residual {:e}", o.residual_norm))?;
            ensure(o.energy > 0.0, || format!("a0={a0}: {name} energy {}", o.energy))?;
        }
        let (u_plus, u_minus) = u0.solution.split_parts();
        let (v_plus, _) = v0.solution.split_parts();
        ensure(u0.solution.min_value() >= -1e-10, || format!("a0={a0}: u0 min {}", u0.solution.min_value()))?;
        ensure(v0.solution.max_value() <= 1e-10, || format!("a0={a0}: v0 max {}", v0.solution.max_value()))?;
        ensure(f.modular(&u_minus) <= 1e-10 && f.modular(&v_plus) <= 1e-10, || format!("a0={a0}: wrong-sign part"))?;
        ensure(!u_plus.is_zero(), || "u0 vanishes".into())?;
        let sym = u0.solution.combine(1.0, &v0.solution, 1.0).l2_norm();
        ensure(sym <= 1e-4, || format!("a0={a0}: |v0 + u0| = {sym:e}"))?;
        let took = t.elapsed();
        ensure(took < Duration::from_secs(300), || format!("a0={a0}: took {took:?}"))?;
        notes.push(format!(
            "a0={a0}: m+={:.6} ({} its), m-={:.6}, |v0+u0|={sym:.1e}, {:.1}s",
            u0.energy,
            u0.iterations,
            v0.energy,
            took.as_secs_f64()
        ));
    }
    Ok(notes.join("; "))
}

fn nodal() -> Verdict {
    let opts = SolverOptions::default();
    let f = desk(1.0, 1.5);
    let y0 = minimize_over_m(&f, &opts).map_err(|e| e.to_string())?;
    ensure(y0.converged && y0.residual_norm <= 1e-6, || format!("residual {:e}", y0.residual_norm))?;
    let (plus, minus) = y0.solution.split_parts();
    let (np, nm) = (f.norm(&plus).unwrap(), f.norm(&minus).unwrap());
    ensure(np >= 1e-8 && nm >= 1e-8, || format!("part norms {np:e}, {nm:e}"))?;
    ensure(y0.energy > 0.0, || format!("m0 = {}", y0.energy))?;
    let proj = ProjectionOptions::default();
    let mut lowest = f64::INFINITY;
    for k in 0..50u64 {
        let u = sign_changing(&f, 7000 + k);
        let y = project_to_m(&f, &u, &proj).map_err(|e| e.to_string())?.projected;
        let e = f.phi(&y).phi;
        lowest = lowest.min(e);
        ensure(y0.energy <= e + 1e-8, || format!("candidate {k} has energy {e} < m0 = {}", y0.energy))?;
    }
    Ok(format!(
        "m0={:.6} (seed {:?}, residual {:.1e}), part norms {np:.3}/{nm:.3}, lowest of 50 candidates {lowest:.3}",
        y0.energy, y0.seed, y0.residual_norm
    ))
}

const MODES: [&str; 7] = ["check", "solve-positive", "solve-negative", "solve-nodal", "sweep", "fiber-plot", "report"];

fn artifacts(mode: &str) -> Vec<&'static str> {
    match mode {
        "check" => vec!["hypotheses.txt"],
        "solve-positive" => vec!["summary-positive.csv", "field-positive.csv", "trace-positive.csv"],
        "solve-negative" => vec!["summary-negative.csv", "field-negative.csv", "trace-negative.csv"],
        "solve-nodal" => vec!["summary-nodal.csv", "field-nodal.csv", "trace-nodal.csv"],
        "sweep" => vec!["sweep.csv"],
        "fiber-plot" => vec!["fiber.csv", "fiber-summary.txt"],
        "report" => vec!["report.txt"],
        _ => unreachable!(),
    }
}

fn run_all_modes(dir: &Path) -> Result<(), String> {
    for mode in MODES {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_kirchhoff"));
        cmd.args(["--mode", mode, "--seed", "42"]);
        // the environment default is exercised once
        if mode == "check" {
            cmd.env("KIRCHHOFF_OUT", dir);
        } else {
            cmd.arg("--out").arg(dir);
        }
        let out = cmd.output().map_err(|e| e.to_string())?;
        ensure(out.status.code() == Some(0), || {
            format!("mode {mode} exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr))
        })?;
        for a in artifacts(mode) {
            ensure(dir.join(a).is_file(), || format!("mode {mode} did not write {a}"))?;
        }
    }
    let report = std::fs::read_to_string(dir.join("report.txt")).map_err(|e| e.to_string())?;
    ensure(report.contains("m0 > 0: PASS"), || "report lacks m0 > 0: PASS".into())?;
    Ok(())
}

fn summary_rows(dir: &Path) -> Vec<String> {
    let mut rows = Vec::new();
    for name in ["summary-positive.csv", "summary-negative.csv", "summary-nodal.csv", "sweep.csv"] {
        let text = std::fs::read_to_string(dir.join(name)).unwrap_or_default();
        rows.extend(text.lines().filter(|l| !l.starts_with('#')).map(str::to_owned));
    }
    rows
}

fn end_to_end() -> Verdict {
    let first = tempfile::tempdir().map_err(|e| e.to_string())?;
    let second = tempfile::tempdir().map_err(|e| e.to_string())?;
    run_all_modes(first.path())?;
    run_all_modes(second.path())?;
    let (a, b) = (summary_rows(first.path()), summary_rows(second.path()));
    ensure(!a.is_empty() && a == b, || format!("summary rows differ:\n{a:?}\n{b:?}"))?;
    let sweep_rows = std::fs::read_to_string(first.path().join("sweep.csv")).unwrap().lines().count() - 1;
    ensure(sweep_rows == 3, || format!("sweep has {sweep_rows} rows"))?;
    Ok(format!("7 modes twice, exit 0, {} identical summary rows", a.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict, u64); 9] = [
        ("modular/norm suite", modular_norm_suite, 10),
        ("gradient consistency", gradient_consistency, 30),
        ("decomposition inequalities", decomposition_inequalities, 20),
        ("projection suite", projection_suite, 120),
        ("fiber maximum", fiber_maximum, 120),
        ("closed-form cross-check", closed_form, 10),
        ("constant-sign solutions", constant_sign, 600),
        ("nodal solution", nodal, 600),
        ("end-to-end CLI", end_to_end, 900),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let mut verdict = check();
        let took = t.elapsed().as_secs_f64();
        if verdict.is_ok() && took > *budget as f64 {
            verdict = Err(format!("runtime {took:.1}s over the {budget}s budget"));
        }
        match verdict {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}; {took:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why}; {took:.1}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
