//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run alone with `cargo test -p qmorph --test acceptance`.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use qmorph::campaigns::{cross_validate, gluing_fuzz, triangle_fuzz};
use qmorph::commands::dimension_table;
use qmorph_core::axioms::{axiom_suite, conjugation_smoke, AxiomConfig};
use qmorph_core::hamiltonian::{HamiltonianSpec, TrigPoly};
use qmorph_core::homogenize::{counterexample, limsup_of, sigma_terms, Property, DEFAULT_CLUSTER_TOL};
use qmorph_core::indexcalc::product_degree;
use qmorph_core::spectral::ProfileOptions;
use qmorph_core::viterbo::{golden_point, orbit_experiment};
use qmorph_core::ConormalTarget;
use rand::{Rng, SeedableRng};

const SEED: u64 = 20_240_601;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Check {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn golden_case() -> Check {
    let h = HamiltonianSpec::lifted_safe(TrigPoly::cosine(), 40);
    let opts = ProfileOptions { grid: 4096, step: 0.01 };
    let at = |x: f64| sigma_terms(&h, &ConormalTarget::point(x).unwrap(), 40, opts).unwrap();
    let min_terms = at(0.5);
    let max_terms = at(0.0);
    let s_min = limsup_of(&min_terms.ratios, DEFAULT_CLUSTER_TOL).value;
    let s_max = limsup_of(&max_terms.ratios, DEFAULT_CLUSTER_TOL).value;
    // ℓ₊ at the point is n·f(x₁) = −n.
    let worst = min_terms
        .ratios
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let n = (k + 1) as f64;
            (r * n + n).abs() / n
        })
        .fold(0.0, f64::max);
    ensure(
        (s_min + 1.0).abs() <= 1e-5 && (s_max - 1.0).abs() <= 1e-5 && worst <= 1e-6,
        format!("sigma(0.5) = {s_min:.9}, sigma(0) = {s_max:.9}, max |ell_n + n|/n = {worst:.2e}"),
    )
}

fn viterbo_gap() -> Check {
    let x1 = golden_point();
    let f = TrigPoly::shifted_cosine(x1.value());
    let e = orbit_experiment(&f, x1, 10_000, SEED).map_err(|e| e.to_string())?;
    ensure(
        e.rhs_sup >= 0.995 && (e.lhs + 1.0).abs() <= 1e-12 && (e.lhs_oracle + 1.0).abs() <= 1e-6 && e.gap >= 1.99,
        format!(
            "rhs sup = {:.6}, lhs = {} (oracle {:.9}), gap = {:.6}",
            e.rhs_sup, e.lhs, e.lhs_oracle, e.gap
        ),
    )
}

fn counterexample_clusters() -> Check {
    let ce = counterexample(1_000_000, 1.0 / 3.0, 0.5, 10_000, SEED, DEFAULT_CLUSTER_TOL).map_err(|e| e.to_string())?;
    let p1 = ce.properties.get(Property::P1);
    let rest_exhaustive = [Property::P2, Property::P3, Property::P4, Property::P5]
        .iter()
        .all(|&p| ce.properties.get(p).exhaustive);
    let l = &ce.limsup;
    let hi = l.highest().map_or(f64::NAN, |c| c.center);
    let lo = l.lowest().map_or(f64::NAN, |c| c.center);
    ensure(
        ce.properties.all_pass()
            && p1.evaluated == 10_000
            && rest_exhaustive
            && l.accumulation_points.len() >= 2
            && hi >= 0.48
            && lo <= 0.35,
        format!(
            "P1-P5 pass: {}, {} clusters, highest {hi:.4}, lowest {lo:.4}",
            ce.properties.all_pass(),
            l.accumulation_points.len()
        ),
    )
}

fn triangle() -> Check {
    let rows = triangle_fuzz(SEED, 200, ProfileOptions { grid: 1024, step: 0.05 }, 1e-5).map_err(|e| e.to_string())?;
    let kinds: BTreeMap<String, usize> = rows.iter().fold(BTreeMap::new(), |mut m, r| {
        let key = if r.target_kind.starts_with("arc") { "arc".to_string() } else { r.target_kind.clone() };
        *m.entry(key).or_default() += 1;
        m
    });
    let worst = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    ensure(
        rows.len() == 600 && kinds.values().all(|&c| c == 200) && worst >= -1e-5,
        format!("{} checks over {kinds:?}, worst margin {worst:.3e}", rows.len()),
    )
}

fn axioms() -> Check {
    let cfg = AxiomConfig::default();
    let reports = axiom_suite(SEED, 200, &cfg);
    let smoke = conjugation_smoke(SEED, &cfg);
    let evaluated: Vec<_> = reports.iter().filter(|r| r.skipped.is_none()).collect();
    let skipped: Vec<&str> = reports
        .iter()
        .filter(|r| r.skipped.is_some())
        .map(|r| r.id.as_str())
        .collect();
    let failing: Vec<String> = evaluated
        .iter()
        .filter(|r| !(r.trials == 200 && r.refused == 0 && r.passed(1e-5)))
        .map(|r| format!("{} ({:.2e})", r.id, r.worst_margin))
        .collect();
    let worst = evaluated.iter().map(|r| r.worst_margin).fold(f64::INFINITY, f64::min);
    let never_silent = reports.iter().filter(|r| r.skipped.is_some()).all(|r| !r.passed(1e-5));
    ensure(
        failing.is_empty() && smoke.passed(0.0) && !skipped.is_empty() && never_silent,
        format!(
            "{} clauses, worst margin {worst:.2e}, failing {failing:?}, smoke worst {:.2e}, skipped {skipped:?}",
            evaluated.len(),
            smoke.worst_margin
        ),
    )
}

fn index_calculus() -> Check {
    let g = gluing_fuzz(SEED, 10_000);
    let table = dimension_table();
    let table_ok = table.iter().all(|e| e.matches());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(SEED);
    let shift_ok = (0..1000).all(|_| {
        let (r, s, dm) = (rng.gen_range(-50..50), rng.gen_range(-50..50), rng.gen_range(0..=10));
        product_degree(r, s, dm) - (r + s) == -dm
    });
    ensure(
        g.trials == 10_000 && g.failures == 0 && g.closed_form_mismatches == 0 && table_ok && shift_ok,
        format!(
            "{} gluing failures in {} tuples, {} of {} table entries match, product shift ok: {shift_ok}",
            g.failures,
            g.trials,
            table.iter().filter(|e| e.matches()).count(),
            table.len()
        ),
    )
}

fn cross_validation() -> Check {
    let rows = cross_validate(SEED, 50, ProfileOptions { grid: 2048, step: 0.05 }).map_err(|e| e.to_string())?;
    let profiles = rows.iter().map(|r| r.profile).max().map_or(0, |m| m + 1);
    let disagree = rows.iter().filter(|r| !r.agrees).count();
    let not_spectral = rows.iter().filter(|r| !r.spectral).count();
    let worst_ratio = rows
        .iter()
        .filter_map(|r| r.difference.map(|d| d / (2.0 * r.error_bound)))
        .fold(0.0, f64::max);
    ensure(
        profiles == 50 && disagree == 0 && not_spectral == 0,
        format!(
            "{profiles} profiles, {} values, {disagree} outside 2*error_bound (worst {worst_ratio:.3} of the band), {not_spectral} non-spectral",
            rows.len()
        ),
    )
}

fn csv_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|e| e == "csv") {
                let rel = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn determinism() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = tmp.path().join("report.json");
    std::fs::write(&config, r#"{"trials": 3, "pairs": 10, "profiles": 5}"#).unwrap();
    let run = |name: &str| {
        let out = tmp.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_qmorph"))
            .args(["report", "--seed", "7", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .output()
            .expect("binary runs");
        (status.status.code(), csv_files(&out))
    };
    let (code_a, a) = run("a");
    let (code_b, b) = run("b");
    let differing: Vec<&String> = a.keys().filter(|k| b.get(*k) != a.get(*k)).collect();
    ensure(
        code_a == Some(0) && code_b == Some(0) && a.len() >= 20 && a.keys().eq(b.keys()) && differing.is_empty(),
        format!("{} CSV files per run, exit codes {code_a:?}/{code_b:?}, differing {differing:?}", a.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Check, Duration); 8] = [
        ("1 golden case", golden_case, Duration::from_secs(60)),
        ("2 rescaling gap", viterbo_gap, Duration::from_secs(10)),
        ("3 counterexample", counterexample_clusters, Duration::from_secs(5)),
        ("4 triangle fuzz", triangle, Duration::from_secs(120)),
        ("5 axiom suites", axioms, Duration::from_secs(300)),
        ("6 index calculus", index_calculus, Duration::from_secs(1)),
        ("7 cross-validation", cross_validation, Duration::from_secs(60)),
        ("8 determinism", determinism, Duration::from_secs(600)),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, f, budget) in criteria {
        if !filter.is_empty() && !filter.iter().any(|p| name.contains(p.as_str())) {
            continue;
        }
        let t = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = t.elapsed();
        let in_time = elapsed <= budget;
        let (ok, detail) = match result {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {name}: {detail} [{:.2}s of {}s{}]",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if in_time { "" } else { ", over budget" }
        );
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
