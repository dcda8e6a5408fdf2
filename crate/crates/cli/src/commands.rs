//! One function per subcommand. Each writes its artifacts under the output
//! directory and returns printable lines, violations and named metrics.

use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use num_rational::Rational64;
use qmorph_core::axioms::{axiom_suite, conjugation_smoke, AxiomConfig};
use qmorph_core::geometry::ConormalTarget;
use qmorph_core::hamiltonian::{HamiltonianSpec, TrigPoly};
use qmorph_core::homogenize::{
    auto_cutoff, build_sequences, check_properties, counterexample as hold_increment, fekete_limit, limsup_of,
    limsup_ratio, LimsupEstimate, PropertyReport, Which, DEFAULT_CLUSTER_TOL,
};
use qmorph_core::indexcalc::{
    check_dims, check_grading, dim_half_strip, dim_pants, dim_whole_strip, formula_table, gluing_sides,
    intersection_degree, product_degree, Side,
};
use qmorph_core::spectral::{ell_plus, persistence, plus_class, ActionProfile, ProfileOptions, SPECTRALITY_TOL};
use qmorph_core::viterbo::{golden_point, orbit_experiment};
use qmorph_core::BasePoint;
use serde::Serialize;

use crate::campaigns::{cross_validate, gluing_fuzz, triangle_fuzz};
use crate::config::{ExperimentConfig, GradingInput};
use crate::output::{decimate, write_csv};
use crate::plot::{barcode, line_chart};
use crate::{CliError, Outcome};

pub const DEFAULT_OUT: &str = "qmorph-out";
/// Rows kept from very long sequences.
const MAX_ROWS: usize = 10_000;

fn default_hamiltonian() -> HamiltonianSpec {
    HamiltonianSpec::lifted_safe(TrigPoly::cosine(), 1)
}

fn default_target() -> ConormalTarget {
    ConormalTarget::point(0.5).expect("valid point")
}

fn centers(l: &LimsupEstimate) -> String {
    l.accumulation_points
        .iter()
        .map(|c| format!("{}", c.center))
        .collect::<Vec<_>>()
        .join(";")
}

fn svg(out: &Path, name: &str) -> std::path::PathBuf {
    out.join(name)
}

#[derive(Serialize)]
struct SpectralRow {
    n: usize,
    target: String,
    class: String,
    ell: f64,
    ratio: f64,
    error_bound: f64,
    step: f64,
    witness_action: f64,
    witness_distance: f64,
    spectral: bool,
}

#[derive(Serialize)]
struct SigmaRow {
    target: String,
    class: String,
    sigma: f64,
    tail_window: usize,
    clusters: usize,
    centers: String,
    converged: bool,
    error_bound: f64,
    step: f64,
}

#[derive(Serialize)]
struct ProfileRow {
    q: f64,
    action: f64,
    error_bound: f64,
    step: f64,
}

/// `ℓ₊^N(φⁿ)` with witnesses for `n ≤ n_max`, then `σᴺ(φ)`.
pub fn spectral(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let h = cfg.hamiltonian.clone().unwrap_or_else(default_hamiltonian);
    let target = cfg.target.unwrap_or_else(default_target);
    target.validate()?;
    let n_max = cfg.n_max_or(40)?;
    let opts = ProfileOptions {
        grid: cfg.grid_or(4096)?,
        step: cfg.step_or(0.01)?,
    };
    let tol = cfg.tol_or(SPECTRALITY_TOL)?;
    let cluster_tol = cfg.cluster_tol.unwrap_or(DEFAULT_CLUSTER_TOL);
    let out = cfg.out_or(DEFAULT_OUT);
    let h = auto_cutoff(&h, n_max);
    let class = plus_class(&target);
    let mut rows = Vec::with_capacity(n_max);
    let mut first = None;
    for (k, prof) in ActionProfile::build_iterates(&h, n_max, opts)?.into_iter().enumerate() {
        let prof = prof?;
        let n = k + 1;
        let r = ell_plus(&prof, &target, class)?;
        rows.push(SpectralRow {
            n,
            target: target.to_string(),
            class: class.to_string(),
            ell: r.value,
            ratio: r.value / n as f64,
            error_bound: r.error_bound,
            step: opts.step,
            witness_action: r.witness.action,
            witness_distance: r.witness.distance,
            spectral: r.spectral(tol),
        });
        if first.is_none() {
            first = Some(prof);
        }
    }
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let est = limsup_of(&ratios, cluster_tol);
    let max_eb = rows.iter().map(|r| r.error_bound).fold(0.0, f64::max);
    write_csv(&out, "spectral.csv", &rows)?;
    write_csv(
        &out,
        "sigma.csv",
        &[SigmaRow {
            target: target.to_string(),
            class: class.to_string(),
            sigma: est.value,
            tail_window: est.tail_window,
            clusters: est.accumulation_points.len(),
            centers: centers(&est),
            converged: est.converged,
            error_bound: max_eb,
            step: opts.step,
        }],
    )?;

    let first = first.expect("n_max >= 1");
    let prim = first.primitive().expect("built profiles are graphical");
    let samples: Vec<ProfileRow> = prim
        .samples()
        .map(|(q, action)| ProfileRow {
            q,
            action,
            error_bound: first.error_bound(),
            step: opts.step,
        })
        .collect();
    write_csv(&out, "action_profile.csv", &samples)?;
    line_chart(
        &svg(&out, "action_profile.svg"),
        "action profile of the time-one map",
        &[("S", samples.iter().map(|r| (r.q, r.action)).collect())],
    )?;
    line_chart(
        &svg(&out, "ratios.svg"),
        &format!("ell(phi^n)/n at {target}"),
        &[("ratio", rows.iter().map(|r| (r.n as f64, r.ratio)).collect())],
    )?;
    let bar_target = match target {
        ConormalTarget::Point { .. } => ConormalTarget::Whole,
        t => t,
    };
    let diag = persistence(&first, &bar_target)?;
    barcode(
        &svg(&out, "persistence.svg"),
        &format!("sublevel persistence on {bar_target}"),
        &diag.bars,
        &[diag.essential_0_birth, diag.essential_1_birth],
    )?;

    let mut o = Outcome::default();
    o.say(format!(
        "sigma at {target} = {} ({} cluster(s), converged: {}), error bound {max_eb:.3e}, step {}",
        est.value,
        est.accumulation_points.len(),
        est.converged,
        opts.step
    ));
    o.metric("sigma", est.value);
    o.metric("max_error_bound", max_eb);
    if let (HamiltonianSpec::Lifted { f, .. }, ConormalTarget::Point { x }) = (&h, &target) {
        let fx = f.eval(x.value());
        let dev = rows.iter().map(|r| (r.ell - r.n as f64 * fx).abs() / r.n as f64).fold(0.0, f64::max);
        o.say(format!("max |ell(phi^n) - n f(x)| / n = {dev:.3e}"));
        o.metric("closed_form_deviation", dev);
    }
    for r in rows.iter().filter(|r| !r.spectral) {
        o.violate(format!("n = {}: ell {} is {} from the nearest chord action", r.n, r.ell, r.witness_distance));
    }
    Ok(o)
}

#[derive(Serialize)]
struct SequenceRow {
    n: usize,
    #[serde(rename = "ell_N")]
    ell_n: f64,
    #[serde(rename = "ell_M")]
    ell_m: f64,
    a_n: f64,
    b_n: f64,
    a_ratio: f64,
    b_ratio: f64,
    error_bound: f64,
    step: f64,
}

#[derive(Serialize)]
struct PropertyRow {
    property: String,
    pass: bool,
    worst_margin: f64,
    witness_n: usize,
    witness_m: usize,
    evaluated: usize,
    exhaustive: bool,
    tol: f64,
    error_bound: f64,
    step: f64,
}

fn property_rows(r: &PropertyReport, error_bound: f64, step: f64) -> Vec<PropertyRow> {
    r.checks
        .iter()
        .map(|c| PropertyRow {
            property: c.property.to_string(),
            pass: c.pass,
            worst_margin: c.worst_margin,
            witness_n: c.witness.0,
            witness_m: c.witness.1,
            evaluated: c.evaluated,
            exhaustive: c.exhaustive,
            tol: r.tol,
            error_bound,
            step,
        })
        .collect()
}

#[derive(Serialize)]
struct LimsupRow {
    sequence: String,
    value: f64,
    tail_window: usize,
    clusters: usize,
    centers: String,
    converged: bool,
    cluster_tol: f64,
    error_bound: f64,
    step: f64,
}

fn limsup_row(name: &str, l: &LimsupEstimate, error_bound: f64, step: f64) -> LimsupRow {
    LimsupRow {
        sequence: name.into(),
        value: l.value,
        tail_window: l.tail_window,
        clusters: l.accumulation_points.len(),
        centers: centers(l),
        converged: l.converged,
        cluster_tol: l.cluster_tol,
        error_bound,
        step,
    }
}

#[derive(Serialize)]
struct FeketeRow {
    inf_prefix: Option<f64>,
    final_ratio: Option<f64>,
    pairs_checked: Option<usize>,
    exhaustive: Option<bool>,
    subadditive: bool,
    error_bound: f64,
    step: f64,
}

/// Oracle sequences `aₙ, bₙ`, properties (P1)–(P5) and limsup estimates.
pub fn homogenize(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let h = cfg.hamiltonian.clone().unwrap_or_else(default_hamiltonian);
    let target = cfg.target.unwrap_or_else(default_target);
    target.validate()?;
    let n_max = cfg.n_max_or(40)?;
    let opts = ProfileOptions {
        grid: cfg.grid_or(4096)?,
        step: cfg.step_or(0.01)?,
    };
    let tol = cfg.tol_or(1e-5)?;
    let seed = cfg.seed_or(0);
    let cluster_tol = cfg.cluster_tol.unwrap_or(DEFAULT_CLUSTER_TOL);
    let out = cfg.out_or(DEFAULT_OUT);

    let s = build_sequences(&h, &target, n_max, opts)?;
    let terms = s.oracle.as_ref().expect("oracle sequences carry their terms");
    let max_eb = terms.error_bounds.iter().cloned().fold(0.0, f64::max);
    // Each inequality mixes at most four oracle values.
    let eff_tol = tol + 4.0 * max_eb;
    let (ar, br) = (s.a_ratios(), s.b_ratios());
    let rows: Vec<SequenceRow> = (0..n_max)
        .map(|k| SequenceRow {
            n: k + 1,
            ell_n: terms.ell_target[k],
            ell_m: terms.ell_whole[k],
            a_n: s.a[k],
            b_n: s.b[k],
            a_ratio: ar[k],
            b_ratio: br[k],
            error_bound: terms.error_bounds[k],
            step: opts.step,
        })
        .collect();
    write_csv(&out, "homogenize.csv", &rows)?;
    let props = check_properties(&s, cfg.sample_pairs.unwrap_or(10_000), seed, eff_tol);
    write_csv(&out, "properties.csv", &property_rows(&props, max_eb, opts.step))?;
    let la = limsup_ratio(&s, Which::A, cluster_tol);
    let lb = limsup_ratio(&s, Which::B, cluster_tol);
    write_csv(
        &out,
        "limsup.csv",
        &[limsup_row("a", &la, max_eb, opts.step), limsup_row("b", &lb, max_eb, opts.step)],
    )?;
    let fekete = fekete_limit(&s.b, eff_tol);
    let fekete_row = match &fekete {
        Ok(f) => FeketeRow {
            inf_prefix: Some(f.inf_prefix),
            final_ratio: Some(f.final_ratio),
            pairs_checked: Some(f.pairs_checked),
            exhaustive: Some(f.exhaustive),
            subadditive: true,
            error_bound: max_eb,
            step: opts.step,
        },
        Err(_) => FeketeRow {
            inf_prefix: None,
            final_ratio: None,
            pairs_checked: None,
            exhaustive: None,
            subadditive: false,
            error_bound: max_eb,
            step: opts.step,
        },
    };
    write_csv(&out, "fekete.csv", &[fekete_row])?;
    line_chart(
        &svg(&out, "ratios.svg"),
        &format!("a_n/n and b_n/n at {target}"),
        &[
            ("a_n/n", rows.iter().map(|r| (r.n as f64, r.a_ratio)).collect()),
            ("b_n/n", rows.iter().map(|r| (r.n as f64, r.b_ratio)).collect()),
        ],
    )?;

    let mut o = Outcome::default();
    o.say(format!("limsup a_n/n = {}, limsup b_n/n = {}", la.value, lb.value));
    for c in &props.checks {
        o.say(format!("{}: {} (worst margin {:.3e})", c.property, if c.pass { "pass" } else { "FAIL" }, c.worst_margin));
        if !c.pass {
            o.violate(format!("{} at {:?}", c.property, c.witness));
        }
    }
    if let Err(e) = fekete {
        o.violate(e.to_string());
    }
    o.metric("limsup_a", la.value);
    o.metric("limsup_b", lb.value);
    Ok(o)
}

#[derive(Serialize)]
struct CounterRow {
    n: usize,
    a_n: f64,
    b_n: f64,
    a_ratio: f64,
    error_bound: f64,
    step: f64,
}

#[derive(Serialize)]
struct PhaseRow {
    kind: String,
    start: usize,
    len: usize,
}

#[derive(Serialize)]
struct ClusterRow {
    center: f64,
    count: usize,
    lo: f64,
    hi: f64,
    error_bound: f64,
    step: f64,
}

/// The hold/increment sequence. Exact integer data: error bounds and steps
/// are reported as zero.
pub fn counterexample(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let n_max = cfg.n_max_or(1_000_000)?;
    let low = cfg.theta_low.unwrap_or(1.0 / 3.0);
    let high = cfg.theta_high.unwrap_or(0.5);
    let seed = cfg.seed_or(0);
    let out = cfg.out_or(DEFAULT_OUT);
    let ce = hold_increment(
        n_max,
        low,
        high,
        cfg.sample_pairs.unwrap_or(10_000),
        seed,
        cfg.cluster_tol.unwrap_or(DEFAULT_CLUSTER_TOL),
    )?;
    let s = &ce.sequences;
    let rows: Vec<CounterRow> = decimate(n_max, MAX_ROWS)
        .into_iter()
        .map(|k| CounterRow {
            n: k + 1,
            a_n: s.a[k],
            b_n: s.b[k],
            a_ratio: s.a[k] / (k + 1) as f64,
            error_bound: 0.0,
            step: 0.0,
        })
        .collect();
    write_csv(&out, "counterexample.csv", &rows)?;
    let phases: Vec<PhaseRow> = ce
        .phases
        .iter()
        .map(|p| PhaseRow {
            kind: format!("{:?}", p.kind).to_lowercase(),
            start: p.start,
            len: p.len,
        })
        .collect();
    write_csv(&out, "phases.csv", &phases)?;
    write_csv(&out, "properties.csv", &property_rows(&ce.properties, 0.0, 0.0))?;
    let clusters: Vec<ClusterRow> = ce
        .limsup
        .accumulation_points
        .iter()
        .map(|c| ClusterRow {
            center: c.center,
            count: c.count,
            lo: c.lo,
            hi: c.hi,
            error_bound: 0.0,
            step: 0.0,
        })
        .collect();
    write_csv(&out, "clusters.csv", &clusters)?;
    line_chart(
        &svg(&out, "ratios.svg"),
        "a_n/n for the hold/increment sequence",
        &[("a_n/n", rows.iter().map(|r| (r.n as f64, r.a_ratio)).collect())],
    )?;

    let mut o = Outcome::default();
    let l = &ce.limsup;
    o.say(format!(
        "{} phases, limsup a_n/n = {}, {} accumulation cluster(s) at [{}]",
        ce.phases.len(),
        l.value,
        l.accumulation_points.len(),
        centers(l).replace(';', ", ")
    ));
    for c in &ce.properties.checks {
        o.say(format!("{}: {} over {} evaluations", c.property, if c.pass { "pass" } else { "FAIL" }, c.evaluated));
        if !c.pass {
            o.violate(format!("{} at {:?}", c.property, c.witness));
        }
    }
    o.metric("clusters", l.accumulation_points.len() as f64);
    o.metric("highest_center", l.highest().map_or(f64::NAN, |c| c.center));
    o.metric("lowest_center", l.lowest().map_or(f64::NAN, |c| c.center));
    o.metric("properties_pass", if ce.properties.all_pass() { 1.0 } else { 0.0 });
    Ok(o)
}

#[derive(Serialize)]
struct AxiomRow {
    id: String,
    statement: String,
    status: String,
    trials: usize,
    refused: usize,
    worst_margin: f64,
    error_bound: f64,
    step: f64,
    grid: usize,
    tol: f64,
    note: String,
}

#[derive(Serialize)]
struct WitnessRow {
    id: String,
    trial: usize,
    margin: f64,
    detail: String,
}

/// Every clause campaign plus the conjugation smoke tests.
pub fn axioms(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let config = AxiomConfig {
        n_max: cfg.n_max_or(40)?,
        grid: cfg.grid_or(256)?,
        step: cfg.step_or(0.1)?,
        tol: cfg.tol_or(1e-5)?,
        ..AxiomConfig::default()
    };
    ProfileOptions {
        grid: config.grid,
        step: config.step,
    }
    .validate()?;
    let trials = cfg.trials.unwrap_or(200);
    let seed = cfg.seed_or(0);
    let out = cfg.out_or(DEFAULT_OUT);
    let mut reports: Vec<(_, f64)> = axiom_suite(seed, trials, &config)
        .into_iter()
        .map(|r| (r, config.tol))
        .collect();
    // Smoke margins already carry each case's own tolerance.
    reports.push((conjugation_smoke(seed, &config), 0.0));

    let mut o = Outcome::default();
    let mut rows = Vec::new();
    let mut witnesses = Vec::new();
    let (mut failed, mut skipped) = (0, 0);
    for (r, tol) in &reports {
        let status = if r.skipped.is_some() {
            skipped += 1;
            "skipped"
        } else if r.passed(*tol) {
            "pass"
        } else {
            failed += 1;
            o.violate(format!("{} worst margin {}", r.id, r.worst_margin));
            "fail"
        };
        o.say(format!("{:<24} {:<8} worst margin {:.3e}", r.id, status, r.worst_margin));
        let note = match &r.skipped {
            Some(why) => why.clone(),
            None => r.notes.join("; "),
        };
        rows.push(AxiomRow {
            id: r.id.clone(),
            statement: r.statement.clone(),
            status: status.into(),
            trials: r.trials,
            refused: r.refused,
            worst_margin: r.worst_margin,
            error_bound: r.max_error_bound,
            step: config.step,
            grid: config.grid,
            tol: *tol,
            note,
        });
        witnesses.extend(r.witnesses.iter().map(|w| WitnessRow {
            id: r.id.clone(),
            trial: w.trial,
            margin: w.margin,
            detail: w.detail.clone(),
        }));
    }
    write_csv(&out, "axioms.csv", &rows)?;
    write_csv(&out, "witnesses.csv", &witnesses)?;
    o.metric("failed", failed as f64);
    o.metric("skipped", skipped as f64);
    o.metric(
        "worst_margin",
        reports
            .iter()
            .filter(|(r, _)| r.skipped.is_none() && r.id != "qm.conjugation-smoke")
            .map(|(r, _)| r.worst_margin)
            .fold(f64::INFINITY, f64::min),
    );
    Ok(o)
}

/// A reference value of a dimension formula.
#[derive(Debug, Clone, PartialEq)]
pub struct TableEntry {
    pub formula: &'static str,
    pub inputs: String,
    pub expected: Rational64,
    pub computed: Rational64,
}

impl TableEntry {
    pub fn matches(&self) -> bool {
        self.expected == self.computed
    }
}

/// Worked values of each formula, evaluated exactly.
pub fn dimension_table() -> Vec<TableEntry> {
    let r = Rational64::new;
    let z = || r(0, 1);
    let i = Rational64::from_integer;
    let mut t = Vec::new();
    let mut add = |formula, inputs: &str, expected, computed| {
        t.push(TableEntry {
            formula,
            inputs: inputs.into(),
            expected,
            computed,
        })
    };
    add("pants", "mu = (0, 0, 0), dim M = 1, dim N = 0", i(-1), dim_pants(z(), z(), z(), 1, 0));
    add("pants", "mu = (0, 0, 0), dim M = 2, dim N = 2", i(-1), dim_pants(z(), z(), z(), 2, 2));
    add("pants", "mu = (0, 0, 0), dim M = 0, dim N = 0", i(0), dim_pants(z(), z(), z(), 0, 0));
    add("half strip, incoming", "mu = 0, dim N = 2", i(1), dim_half_strip(z(), 2, Side::Incoming));
    add("half strip, outgoing", "mu = 1/2, dim N = 1", i(1), dim_half_strip(r(1, 2), 1, Side::Outgoing));
    add("half strip, incoming", "mu = 0, dim N = 0", i(0), dim_half_strip(z(), 0, Side::Incoming));
    add("whole strip", "mu = (3/2, 3/2), dim M = 4, dim N = 4", i(0), dim_whole_strip(r(3, 2), r(3, 2), 4, 4));
    add("whole strip", "mu = (1, 0), dim M = 2, dim N = 1", i(0), dim_whole_strip(i(1), z(), 2, 1));
    add("whole strip", "mu = (0, 0), dim M = 1, dim N = 0", i(-1), dim_whole_strip(z(), z(), 1, 0));
    add("product degree", "r = 1, s = 1, dim M = 1", i(1), i(product_degree(1, 1, 1)));
    add("product degree", "r = 4, s = -2, dim M = 0", i(2), i(product_degree(4, -2, 0)));
    add("intersection degree", "r = 1, s = 2, dim N = 1", i(2), i(intersection_degree(1, 2, 1)));
    t
}

fn parse_mu(name: &str, s: &str) -> Result<Rational64, CliError> {
    let mu = Rational64::from_str(s.trim()).map_err(|e| CliError::Config(format!("{name} = {s:?}: {e}")))?;
    check_grading(mu).map_err(|e| CliError::Config(format!("{name}: {e}")))?;
    Ok(mu)
}

#[derive(Serialize)]
struct FormulaRow {
    formula: String,
    expression: String,
    inputs: String,
    value: String,
    error_bound: f64,
    step: f64,
}

#[derive(Serialize)]
struct TableRow {
    formula: String,
    inputs: String,
    expected: String,
    computed: String,
    matches: bool,
}

#[derive(Serialize)]
struct GluingRow {
    seed: u64,
    trials: usize,
    failures: usize,
    closed_form_mismatches: usize,
    first_failure: Option<String>,
    error_bound: f64,
    step: f64,
}

/// Exact formulas at the configured gradings, the reference table and the
/// gluing fuzz.
pub fn dimension(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let g = cfg.grading.clone().unwrap_or(GradingInput {
        mu1: "0".into(),
        mu2: "0".into(),
        mu_out: "0".into(),
        mu_x: "0".into(),
        mu_y: "0".into(),
        dim_m: 1,
        dim_n: 0,
    });
    let (mu1, mu2, mu_out) = (parse_mu("mu1", &g.mu1)?, parse_mu("mu2", &g.mu2)?, parse_mu("mu_out", &g.mu_out)?);
    let (mu_x, mu_y) = (parse_mu("mu_x", &g.mu_x)?, parse_mu("mu_y", &g.mu_y)?);
    check_dims(g.dim_m, g.dim_n).map_err(|e| CliError::Config(e.to_string()))?;
    let (dm, dn) = (g.dim_m, g.dim_n);
    let trials = cfg.trials.unwrap_or(10_000);
    let seed = cfg.seed_or(0);
    let out = cfg.out_or(DEFAULT_OUT);

    let sides = gluing_sides(mu1, mu2, mu_out, mu_x, mu_y, dm, dn);
    let expr: std::collections::BTreeMap<&str, &str> = formula_table().into_iter().collect();
    let dims = format!("dim M = {dm}, dim N = {dn}");
    let values = [
        ("pants", format!("mu = ({mu1}, {mu2}, {mu_out})"), dim_pants(mu1, mu2, mu_out, dm, dn)),
        ("half strip, incoming", format!("mu = {mu_x}"), dim_half_strip(mu_x, dn, Side::Incoming)),
        ("half strip, outgoing", format!("mu = {mu_y}"), dim_half_strip(mu_y, dn, Side::Outgoing)),
        ("whole strip", format!("mu = ({mu_x}, {mu_y})"), dim_whole_strip(mu_x, mu_y, dm, dn)),
        ("gluing, both sides", "pants side".into(), sides.pants_side),
        ("gluing, both sides", "strip side".into(), sides.strip_side),
    ];
    let rows: Vec<FormulaRow> = values
        .into_iter()
        .map(|(name, inputs, v)| FormulaRow {
            formula: name.into(),
            expression: expr[name].into(),
            inputs: format!("{inputs}, {dims}"),
            value: v.to_string(),
            error_bound: 0.0,
            step: 0.0,
        })
        .collect();
    write_csv(&out, "dimension.csv", &rows)?;
    let table = dimension_table();
    let table_rows: Vec<TableRow> = table
        .iter()
        .map(|e| TableRow {
            formula: e.formula.into(),
            inputs: e.inputs.clone(),
            expected: e.expected.to_string(),
            computed: e.computed.to_string(),
            matches: e.matches(),
        })
        .collect();
    write_csv(&out, "table.csv", &table_rows)?;
    let fuzz = gluing_fuzz(seed, trials);
    write_csv(
        &out,
        "gluing.csv",
        &[GluingRow {
            seed,
            trials,
            failures: fuzz.failures,
            closed_form_mismatches: fuzz.closed_form_mismatches,
            first_failure: fuzz.first_failure.clone(),
            error_bound: 0.0,
            step: 0.0,
        }],
    )?;

    let mut o = Outcome::default();
    for r in &rows {
        o.say(format!("{:<22} {:<40} = {}", r.formula, r.inputs, r.value));
    }
    let mismatches = table.iter().filter(|e| !e.matches()).count();
    o.say(format!("reference table: {} of {} entries match", table.len() - mismatches, table.len()));
    o.say(format!("gluing identity: {} failures in {trials} random tuples", fuzz.failures));
    if sides.pants_side != sides.strip_side {
        o.violate(format!("gluing sides differ: {} vs {}", sides.pants_side, sides.strip_side));
    }
    for e in table.iter().filter(|e| !e.matches()) {
        o.violate(format!("{} at {}: expected {}, got {}", e.formula, e.inputs, e.expected, e.computed));
    }
    if let Some(f) = &fuzz.first_failure {
        o.violate(format!("gluing identity fails at {f}"));
    }
    o.metric("table_mismatches", mismatches as f64);
    o.metric("gluing_failures", (fuzz.failures + fuzz.closed_form_mismatches) as f64);
    Ok(o)
}

#[derive(Serialize)]
struct OrbitRow {
    n: usize,
    rhs: f64,
    running_sup: f64,
    lhs: f64,
    error_bound: f64,
    step: f64,
}

#[derive(Serialize)]
struct SpotRow {
    n: usize,
    oracle: f64,
    closed_form: f64,
    difference: f64,
    error_bound: f64,
    step: f64,
}

#[derive(Serialize)]
struct ViterboSummary {
    x1: f64,
    n_max: usize,
    lhs: f64,
    lhs_oracle: f64,
    rhs_sup: f64,
    max_f: f64,
    gap: f64,
    gap_to_max: f64,
    error_bound: f64,
    step: f64,
}

/// `(1/n)ℓ₊(φⁿ)` against the rescaled sequence `f(n·x₁ mod 1)`.
pub fn viterbo(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let (f, x1) = match (&cfg.f, cfg.x1) {
        (None, None) => {
            let x1 = golden_point();
            (TrigPoly::shifted_cosine(x1.value()), x1)
        }
        (None, Some(x)) => (TrigPoly::shifted_cosine(golden_point().value()), BasePoint::new(x)?),
        (Some(f), Some(x)) => (f.clone(), BasePoint::new(x)?),
        (Some(f), None) => (f.clone(), BasePoint::new(f.min().q)?),
    };
    let n_max = cfg.n_max_or(10_000)?;
    let seed = cfg.seed_or(0);
    let out = cfg.out_or(DEFAULT_OUT);
    let e = orbit_experiment(&f, x1, n_max, seed)?;
    let rows: Vec<OrbitRow> = (0..n_max)
        .map(|k| OrbitRow {
            n: k + 1,
            rhs: e.rhs_sequence[k],
            running_sup: e.rhs_running_sup[k],
            lhs: e.lhs,
            error_bound: 0.0,
            step: 0.0,
        })
        .collect();
    write_csv(&out, "viterbo.csv", &rows)?;
    let spots: Vec<SpotRow> = e
        .spot_checks
        .iter()
        .map(|s| SpotRow {
            n: s.n,
            oracle: s.oracle,
            closed_form: s.closed_form,
            difference: (s.oracle - s.closed_form).abs(),
            error_bound: s.error_bound,
            step: s.step,
        })
        .collect();
    write_csv(&out, "spot_checks.csv", &spots)?;
    let eb = e.spot_checks.iter().map(|s| s.error_bound).fold(0.0, f64::max);
    let step = e.spot_checks.first().map_or(0.0, |s| s.step);
    write_csv(
        &out,
        "summary.csv",
        &[ViterboSummary {
            x1: x1.value(),
            n_max,
            lhs: e.lhs,
            lhs_oracle: e.lhs_oracle,
            rhs_sup: e.rhs_sup,
            max_f: e.max_f,
            gap: e.gap,
            gap_to_max: e.gap_to_max,
            error_bound: eb,
            step,
        }],
    )?;
    let kept = decimate(n_max, 2_000);
    line_chart(
        &svg(&out, "running_sup.svg"),
        "f(n x1 mod 1) and its running supremum",
        &[
            ("f(n x1)", kept.iter().map(|&k| ((k + 1) as f64, e.rhs_sequence[k])).collect()),
            ("running sup", kept.iter().map(|&k| ((k + 1) as f64, e.rhs_running_sup[k])).collect()),
            ("(1/n) ell(phi^n)", vec![(1.0, e.lhs), (n_max as f64, e.lhs)]),
        ],
    )?;

    let mut o = Outcome::default();
    o.say(format!(
        "(1/n) ell(phi^n) = {} (oracle {}), sup f(n x1) over n <= {n_max} = {}, gap {}",
        e.lhs, e.lhs_oracle, e.rhs_sup, e.gap
    ));
    o.metric("lhs", e.lhs);
    o.metric("lhs_oracle", e.lhs_oracle);
    o.metric("rhs_sup", e.rhs_sup);
    o.metric("gap", e.gap);
    Ok(o)
}

#[derive(Serialize)]
struct SummaryRow {
    criterion: usize,
    check: String,
    measured: f64,
    threshold: String,
    pass: bool,
}

/// Runs the whole experiment set into subdirectories of the output directory
/// and writes `summary.csv`. Campaign sizes come from `trials`, `pairs` and
/// `profiles`; everything else runs at its reference size.
pub fn report(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let out = cfg.out_or(DEFAULT_OUT);
    let seed = cfg.seed_or(0);
    let sub = |dir: &str| ExperimentConfig {
        seed: Some(seed),
        out: Some(out.join(dir)),
        ..Default::default()
    };
    let mut o = Outcome::default();
    let mut rows: Vec<SummaryRow> = Vec::new();
    let mut check = |o: &mut Outcome, criterion: usize, check: &str, measured: f64, threshold: &str, pass: bool| {
        o.say(format!(
            "[{}] criterion {criterion}: {check} = {measured} ({threshold})",
            if pass { "PASS" } else { "FAIL" }
        ));
        if !pass {
            o.violate(format!("criterion {criterion}: {check} = {measured}, needs {threshold}"));
        }
        rows.push(SummaryRow {
            criterion,
            check: check.into(),
            measured,
            threshold: threshold.into(),
            pass,
        });
    };
    let timed = |o: &mut Outcome, label: &str, t: Instant| o.say(format!("  {label} took {:.2}s", t.elapsed().as_secs_f64()));

    let t = Instant::now();
    let at_min = spectral(&ExperimentConfig {
        target: Some(default_target()),
        ..sub("golden-min")
    })?;
    let at_max = spectral(&ExperimentConfig {
        target: Some(ConormalTarget::point(0.0)?),
        ..sub("golden-max")
    })?;
    let s_min = at_min.metrics["sigma"];
    let s_max = at_max.metrics["sigma"];
    let dev = at_min.metrics["closed_form_deviation"];
    check(&mut o, 1, "sigma at Point(0.5)", s_min, "-1 within 1e-5", (s_min + 1.0).abs() <= 1e-5);
    check(&mut o, 1, "sigma at Point(0)", s_max, "+1 within 1e-5", (s_max - 1.0).abs() <= 1e-5);
    check(&mut o, 1, "max |ell + n| / n at Point(0.5)", dev, "<= 1e-6", dev <= 1e-6);
    timed(&mut o, "golden case", t);

    let t = Instant::now();
    let v = viterbo(&sub("viterbo"))?;
    check(&mut o, 2, "running sup of f(n x1)", v.metrics["rhs_sup"], ">= 0.995", v.metrics["rhs_sup"] >= 0.995);
    check(&mut o, 2, "(1/n) ell(phi^n)", v.metrics["lhs"], "= -1", (v.metrics["lhs"] + 1.0).abs() <= 1e-12);
    check(&mut o, 2, "gap", v.metrics["gap"], ">= 1.99", v.metrics["gap"] >= 1.99);
    timed(&mut o, "rescaling comparison", t);

    let t = Instant::now();
    let ce = counterexample(&sub("counterexample"))?;
    let m = &ce.metrics;
    check(&mut o, 3, "properties P1-P5", m["properties_pass"], "all pass", m["properties_pass"] == 1.0);
    check(&mut o, 3, "accumulation clusters", m["clusters"], ">= 2", m["clusters"] >= 2.0);
    check(&mut o, 3, "highest cluster center", m["highest_center"], ">= 0.48", m["highest_center"] >= 0.48);
    check(&mut o, 3, "lowest cluster center", m["lowest_center"], "<= 0.35", m["lowest_center"] <= 0.35);
    timed(&mut o, "counterexample", t);

    let t = Instant::now();
    let opts = ProfileOptions { grid: 1024, step: 0.05 };
    let tri = triangle_fuzz(seed, cfg.pairs.unwrap_or(200), opts, 1e-5)?;
    write_csv(&out.join("triangle"), "triangle.csv", &tri)?;
    let worst = tri.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    check(&mut o, 4, "worst triangle margin", worst, ">= -1e-5", worst >= -1e-5);
    timed(&mut o, "triangle fuzz", t);

    let t = Instant::now();
    let ax = axioms(&ExperimentConfig {
        trials: Some(cfg.trials.unwrap_or(200)),
        ..sub("axioms")
    })?;
    check(&mut o, 5, "failed clauses", ax.metrics["failed"], "= 0", ax.metrics["failed"] == 0.0);
    check(&mut o, 5, "worst clause margin", ax.metrics["worst_margin"], ">= -1e-5", ax.metrics["worst_margin"] >= -1e-5);
    check(&mut o, 5, "skipped clauses listed", ax.metrics["skipped"], ">= 1", ax.metrics["skipped"] >= 1.0);
    timed(&mut o, "axiom campaigns", t);

    let t = Instant::now();
    let dim = dimension(&sub("dimension"))?;
    check(&mut o, 6, "gluing failures", dim.metrics["gluing_failures"], "= 0", dim.metrics["gluing_failures"] == 0.0);
    check(&mut o, 6, "table mismatches", dim.metrics["table_mismatches"], "= 0", dim.metrics["table_mismatches"] == 0.0);
    timed(&mut o, "index calculus", t);

    let t = Instant::now();
    let cross = cross_validate(seed, cfg.profiles.unwrap_or(50), ProfileOptions { grid: 2048, step: 0.05 })?;
    write_csv(&out.join("crossval"), "crossval.csv", &cross)?;
    let disagree = cross.iter().filter(|r| !r.agrees).count();
    let not_spectral = cross.iter().filter(|r| !r.spectral).count();
    check(&mut o, 7, "persistence disagreements", disagree as f64, "= 0", disagree == 0);
    check(&mut o, 7, "non-spectral values", not_spectral as f64, "= 0", not_spectral == 0);
    timed(&mut o, "cross-validation", t);

    write_csv(&out, "summary.csv", &rows)?;
    Ok(o)
}
