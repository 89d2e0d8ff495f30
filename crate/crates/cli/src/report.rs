//! One-page text summary of an output directory. Missing or unreadable
//! artifacts are listed as warnings and the rest is still reported.

use std::fmt::Write as _;
use std::path::Path;

use kirchhoff_core::io::SUMMARY_HEADER;
use kirchhoff_core::SolutionKind;

use crate::run::{field_file, summary_file, trace_file, FIBER_SUMMARY_FILE, HYPOTHESES_FILE, SWEEP_FILE};

const KINDS: [(SolutionKind, &str); 3] = [
    (SolutionKind::Positive, "m+"),
    (SolutionKind::Negative, "m-"),
    (SolutionKind::Nodal, "m0"),
];

/// Rows of the invariant matrix, in display order.
const CHECKS: [&str; 7] = [
    "converged",
    "residual_within_tol",
    "energy_positive",
    "sign_invariant",
    "truncation",
    "above_small_sphere",
    "trace_present",
];

#[derive(Debug, Default)]
struct Summary {
    meta: Vec<(String, String)>,
    row: Vec<String>,
}

impl Summary {
    fn parse(text: &str) -> Option<Self> {
        let mut s = Self::default();
        let mut lines = text.lines();
        for line in lines.by_ref() {
            if line == SUMMARY_HEADER {
                break;
            }
            let (k, v) = line.strip_prefix("# ")?.split_once('=')?;
            s.meta.push((k.into(), v.into()));
        }
        s.row = lines.next()?.split(',').map(str::to_owned).collect();
        (s.row.len() == SUMMARY_HEADER.split(',').count()).then_some(s)
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn energy(&self) -> Option<f64> {
        self.row.get(1)?.parse().ok()
    }

    fn residual(&self) -> Option<f64> {
        self.row.get(2)?.parse().ok()
    }
}

fn read(dir: &Path, name: &str, warnings: &mut Vec<String>) -> Option<String> {
    match std::fs::read_to_string(dir.join(name)) {
        Ok(t) => Some(t),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            warnings.push(format!("missing {name}"));
            None
        }
        Err(e) => {
            warnings.push(format!("unreadable {name}: {e}"));
            None
        }
    }
}

pub fn render_report(dir: &Path) -> String {
    let mut warnings = Vec::new();
    let mut out = String::new();
    let _ = writeln!(out, "Kirchhoff double phase run report");
    let _ = writeln!(out, "directory: {}", dir.display());

    let _ = writeln!(out, "\n[hypotheses]");
    match read(dir, HYPOTHESES_FILE, &mut warnings) {
        Some(text) => {
            let failed: Vec<&str> = text
                .lines()
                .filter(|l| !l.starts_with('#'))
                .filter_map(|l| {
                    let mut cols = l.split(',');
                    let id = cols.next()?;
                    (cols.next()? == "violated").then_some(id)
                })
                .collect();
            if failed.is_empty() {
                let _ = writeln!(out, "all pass");
            } else {
                let _ = writeln!(out, "failed: {}", failed.join(" "));
            }
        }
        None => {
            let _ = writeln!(out, "(no report)");
        }
    }

    let mut summaries: Vec<Option<Summary>> = Vec::new();
    for (kind, _) in KINDS {
        let name = summary_file(kind);
        let s = read(dir, &name, &mut warnings).and_then(|t| {
            let parsed = Summary::parse(&t);
            if parsed.is_none() {
                warnings.push(format!("malformed {name}"));
            }
            parsed
        });
        if s.is_some() {
            for file in [field_file(kind), trace_file(kind)] {
                if !dir.join(&file).is_file() {
                    warnings.push(format!("missing {file}"));
                }
            }
        }
        summaries.push(s);
    }

    let _ = writeln!(out, "\n[energies]");
    for ((_, label), s) in KINDS.iter().zip(&summaries) {
        match s.as_ref().and_then(|s| Some((s.energy()?, s.residual()?, s))) {
            Some((e, r, s)) => {
                let conv = s.get("converged").unwrap_or("?");
                let _ = writeln!(out, "{label} = {e}  (residual {r:e}, converged {conv})");
            }
            None => {
                let _ = writeln!(out, "{label} = n/a");
            }
        }
    }
    for ((_, label), s) in KINDS.iter().zip(&summaries) {
        let v = match s.as_ref().and_then(Summary::energy) {
            Some(e) if e > 0.0 => "PASS",
            Some(_) => "FAIL",
            None => "MISSING",
        };
        let _ = writeln!(out, "{label} > 0: {v}");
    }
    if let [Some(p), Some(m), Some(z)] = &summaries[..] {
        if let (Some(ep), Some(em), Some(ez)) = (p.energy(), m.energy(), z.energy()) {
            let _ = writeln!(out, "m0 - (m+ + m-) = {}", ez - (ep + em));
        }
    }

    let _ = writeln!(out, "\n[invariants]");
    let _ = writeln!(out, "{:<22}{:<10}{:<10}nodal", "check", "positive", "negative");
    for check in CHECKS {
        let mut line = format!("{check:<22}");
        for ((kind, _), s) in KINDS.iter().zip(&summaries) {
            let cell = match s {
                None => "n/a",
                Some(_) if check == "trace_present" => {
                    if dir.join(trace_file(*kind)).is_file() {
                        "PASS"
                    } else {
                        "FAIL"
                    }
                }
                Some(s) => s.get(check).unwrap_or("-"),
            };
            let _ = write!(line, "{cell:<10}");
        }
        let _ = writeln!(out, "{}", line.trim_end());
    }

    let _ = writeln!(out, "\n[sweep]");
    if let Some(text) = read(dir, SWEEP_FILE, &mut warnings) {
        let rows = text.lines().count().saturating_sub(1);
        let _ = writeln!(out, "{rows} rows");
        out.push_str(&text);
    }

    let _ = writeln!(out, "\n[fiber]");
    if let Some(text) = read(dir, FIBER_SUMMARY_FILE, &mut warnings) {
        for key in ["alpha", "beta", "max_at_pair", "boundary_below", "shell_negative"] {
            if let Some(v) = text.lines().find_map(|l| l.strip_prefix(key)?.strip_prefix('=')) {
                let _ = writeln!(out, "{key}: {v}");
            }
        }
    }

    let _ = writeln!(out, "\n[warnings]");
    if warnings.is_empty() {
        let _ = writeln!(out, "none");
    }
    for w in &warnings {
        let _ = writeln!(out, "WARNING: {w}");
    }
    out
}
