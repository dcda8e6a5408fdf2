//! Randomized checks of the partial quasi-morphism properties of `σᴺ` and
//! the partial quasi-state properties of `ζᴺ(H) = σᴺ(φ_H)` over the
//! catalog.
//!
//! Each clause draws random lifted trigonometric polynomials, targets,
//! scalars and fiber-displaced bumps, evaluates both sides through the
//! spectral oracle and records the slack of the tested relation.
//! Equalities report `−|lhs − rhs|`. Oracle refusals are counted as refused
//! trials, never as passes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::{ArcSign, ConormalTarget, PhasePoint};
use crate::hamiltonian::{compose, evaluate, inverse, iterate, CutoffSpec, HamiltonianSpec, TrigPoly};
use crate::homogenize::{limsup_of, sigma_terms, DEFAULT_CLUSTER_TOL};
use crate::numerics::{golden_max, golden_min};
use crate::spectral::ProfileOptions;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxiomConfig {
    pub n_max: usize,
    pub grid: usize,
    pub step: f64,
    pub max_degree: usize,
    pub max_coeff: f64,
    /// Resolution per axis of the phase-space extremum search.
    pub phase_grid: usize,
    pub tol: f64,
}

impl Default for AxiomConfig {
    fn default() -> Self {
        Self {
            n_max: 40,
            grid: 256,
            step: 0.1,
            max_degree: 4,
            max_coeff: 1.0,
            phase_grid: 256,
            tol: 1e-5,
        }
    }
}

impl AxiomConfig {
    fn options(&self) -> ProfileOptions {
        ProfileOptions {
            grid: self.grid,
            step: self.step,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub trial: usize,
    pub margin: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub id: String,
    pub statement: String,
    pub trials: usize,
    /// Trials where the oracle refused (non-graphical or blown-up flow).
    pub refused: usize,
    pub worst_margin: f64,
    /// Largest oracle error bound met by any evaluated trial.
    pub max_error_bound: f64,
    /// Up to five worst failing trials.
    pub witnesses: Vec<Witness>,
    /// Reason the clause was not evaluated at all.
    pub skipped: Option<String>,
    pub notes: Vec<String>,
}

impl AxiomReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.skipped.is_none() && self.trials > self.refused && self.worst_margin >= -tol
    }

    fn skipped(id: &str, statement: &str, reason: &str) -> Self {
        Self {
            id: id.into(),
            statement: statement.into(),
            trials: 0,
            refused: 0,
            worst_margin: f64::NAN,
            max_error_bound: f64::NAN,
            witnesses: Vec::new(),
            skipped: Some(reason.into()),
            notes: Vec::new(),
        }
    }
}

type TrialResult = Result<(f64, String), String>;

/// Running maximum of the oracle error bounds seen during one trial.
#[derive(Default)]
struct Bound(f64);

struct Clause {
    id: &'static str,
    statement: &'static str,
    run: fn(&mut ChaCha8Rng, &AxiomConfig, &mut Bound) -> TrialResult,
}

const CLAUSES: &[Clause] = &[
    Clause {
        id: "qm.homogeneity",
        statement: "sigma(phi^l) = l * sigma(phi)",
        run: qm_homogeneity,
    },
    Clause {
        id: "qm.stability",
        statement: "min(f - g) <= sigma(phi_f) - sigma(phi_g) <= max(f - g)",
        run: qm_stability,
    },
    Clause {
        id: "qm.stability-reduction",
        statement: "phase-space extrema of H - K on the cutoff-free region equal base extrema of f - g",
        run: qm_stability_reduction,
    },
    Clause {
        id: "qm.vanishing",
        statement: "sigma(phi) = 0 for phi supported away from the zero section and the conormal",
        run: qm_vanishing,
    },
    Clause {
        id: "qm.triangle",
        statement: "sigma^N(phi psi) <= sigma^M(phi) + sigma^N(psi) for commuting phi, psi",
        run: qm_triangle,
    },
    Clause {
        id: "qs.normalization",
        statement: "zeta(0) = 0",
        run: qs_normalization,
    },
    Clause {
        id: "qs.stability",
        statement: "min(H - K) <= zeta(H) - zeta(K) <= max(H - K) over phase space",
        run: qs_stability,
    },
    Clause {
        id: "qs.monotonicity",
        statement: "H <= K implies zeta(H) <= zeta(K)",
        run: qs_monotonicity,
    },
    Clause {
        id: "qs.homogeneity",
        statement: "zeta(sH) = s * zeta(H) for s >= 0",
        run: qs_homogeneity,
    },
    Clause {
        id: "qs.vanishing",
        statement: "zeta(H) = 0 for H supported away from the zero section and the conormal",
        run: qs_vanishing,
    },
    Clause {
        id: "qs.additivity",
        statement: "zeta(H + K) = zeta(H) for K Poisson-commuting with H and displaced support",
        run: qs_additivity,
    },
];

/// Clauses outside the reach of the graphical oracle.
const SKIPPED: &[(&str, &str, &str)] = &[
    (
        "qm.conjugation",
        "sigma(phi) = sigma(psi phi psi^-1)",
        "general conjugations leave the graphical regime; see conjugation_smoke for the degenerate cases",
    ),
    (
        "qm.fragmentation",
        "fragmentation-norm bound",
        "requires fragmentation norms and displacement energies",
    ),
    (
        "qs.invariance",
        "zeta invariant under all of Ham(T*M)",
        "only catalog conjugations are available",
    ),
];

fn trial_rng(seed: u64, clause: usize, trial: usize) -> ChaCha8Rng {
    let mixed = seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((clause as u64) << 32)
        .wrapping_add(trial as u64);
    ChaCha8Rng::seed_from_u64(mixed)
}

fn collect(id: &str, statement: &str, results: Vec<(TrialResult, f64)>, tol: f64) -> AxiomReport {
    let trials = results.len();
    let max_error_bound = results.iter().map(|(_, b)| *b).fold(0.0, f64::max);
    let mut refused = 0;
    let mut worst = f64::INFINITY;
    let mut failures: Vec<Witness> = Vec::new();
    let mut notes = Vec::new();
    for (trial, (r, _)) in results.into_iter().enumerate() {
        match r {
            Ok((margin, detail)) => {
                worst = worst.min(margin);
                if !(margin >= -tol) {
                    failures.push(Witness { trial, margin, detail });
                }
            }
            Err(reason) => {
                refused += 1;
                if notes.len() < 5 {
                    notes.push(format!("trial {trial} refused: {reason}"));
                }
            }
        }
    }
    failures.sort_by(|l, r| l.margin.total_cmp(&r.margin).then(l.trial.cmp(&r.trial)));
    failures.truncate(5);
    AxiomReport {
        id: id.into(),
        statement: statement.into(),
        trials,
        refused,
        worst_margin: if trials > refused { worst } else { f64::NAN },
        max_error_bound,
        witnesses: failures,
        skipped: None,
        notes,
    }
}

/// Runs every clause for `trials` trials; reports come back in a fixed order
/// followed by the skipped clauses.
pub fn axiom_suite(seed: u64, trials: usize, config: &AxiomConfig) -> Vec<AxiomReport> {
    let mut reports: Vec<AxiomReport> = CLAUSES
        .iter()
        .enumerate()
        .map(|(ci, clause)| {
            let results: Vec<(TrialResult, f64)> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut b = Bound::default();
                    let r = (clause.run)(&mut trial_rng(seed, ci, t), config, &mut b);
                    (r, b.0)
                })
                .collect();
            collect(clause.id, clause.statement, results, config.tol)
        })
        .collect();
    reports.extend(SKIPPED.iter().map(|(id, st, why)| AxiomReport::skipped(id, st, why)));
    reports
}

/// Conjugation invariance in the degenerate cases the oracle can see:
/// `ψ = id`, `ψ = φ²` and `ψ` a bump displaced away from everything `φ`
/// moves the zero section through.
pub fn conjugation_smoke(seed: u64, config: &AxiomConfig) -> AxiomReport {
    let mut rng = trial_rng(seed, usize::MAX >> 1, 0);
    let cases = 3 * 4;
    let mut results = Vec::with_capacity(cases);
    for case in 0..cases {
        let f = random_poly(&mut rng, config);
        let h = lifted(&f, config);
        let target = random_target(&mut rng);
        let r1 = match &h {
            HamiltonianSpec::Lifted { cutoff, .. } => cutoff.r1,
            _ => unreachable!("lifted spec"),
        };
        let (psi, label, tol) = match case % 3 {
            0 => (HamiltonianSpec::Zero, "identity", 0.0),
            1 => (iterate(h.clone(), 2).expect("n = 2"), "phi^2", 1e-8),
            _ => (disjoint_bump(&mut rng, r1), "displaced bump", 1e-6),
        };
        let conj = compose(psi.clone(), compose(h.clone(), inverse(psi)));
        let mut b = Bound::default();
        let r = (|| -> TrialResult {
            let lhs = sigma_of(&h, &target, config, &mut b)?;
            let rhs = sigma_of(&conj, &target, config, &mut b)?;
            // Slack against the case's own tolerance; the identity must be exact.
            Ok((tol - (lhs - rhs).abs(), format!("psi = {label}, target {target}, f = {f:?}")))
        })();
        results.push((r, b.0));
    }
    let mut report = collect(
        "qm.conjugation-smoke",
        "sigma(phi) = sigma(psi phi psi^-1) for psi = id, phi^2, displaced bump",
        results,
        0.0,
    );
    report.notes.push("general conjugations skipped: they leave the graphical regime".into());
    report
}

fn sigma_of(h: &HamiltonianSpec, target: &ConormalTarget, config: &AxiomConfig, b: &mut Bound) -> Result<f64, String> {
    let terms = sigma_terms(h, target, config.n_max, config.options()).map_err(|e| e.to_string())?;
    b.0 = b.0.max(terms.max_error_bound());
    Ok(limsup_of(&terms.ratios, DEFAULT_CLUSTER_TOL).value)
}

fn random_poly(rng: &mut ChaCha8Rng, config: &AxiomConfig) -> TrigPoly {
    let d = rng.gen_range(1..=config.max_degree.max(1));
    let c = config.max_coeff;
    let cos: Vec<f64> = (0..=d).map(|_| rng.gen_range(-c..=c)).collect();
    let sin: Vec<f64> = (0..d).map(|_| rng.gen_range(-c..=c)).collect();
    TrigPoly::new(cos, sin).expect("degree within cap")
}

fn random_target(rng: &mut ChaCha8Rng) -> ConormalTarget {
    let a: f64 = rng.gen_range(0.0..1.0);
    let len: f64 = rng.gen_range(0.05..0.95);
    match rng.gen_range(0..4) {
        0 => ConormalTarget::point(a),
        1 => Ok(ConormalTarget::Whole),
        2 => ConormalTarget::arc(a, a + len, ArcSign::Minus),
        _ => ConormalTarget::arc(a, a + len, ArcSign::Plus),
    }
    .expect("valid random target")
}

fn lifted(f: &TrigPoly, config: &AxiomConfig) -> HamiltonianSpec {
    HamiltonianSpec::lifted_safe(f.clone(), config.n_max as u32)
}

/// Bump living in `p ∈ (r1 + 1, r1 + 2)`, beyond the reach of every flow
/// started on the zero section.
fn disjoint_bump(rng: &mut ChaCha8Rng, r1: f64) -> HamiltonianSpec {
    let q0 = rng.gen_range(0.0..1.0);
    let rq = rng.gen_range(0.05..=0.5);
    let amplitude = rng.gen_range(-5.0..=5.0);
    HamiltonianSpec::bump(q0, r1 + 1.5, rq, 0.45, amplitude).expect("valid bump")
}

fn cutoff_of(h: &HamiltonianSpec) -> CutoffSpec {
    match h {
        HamiltonianSpec::Lifted { cutoff, .. } => *cutoff,
        _ => unreachable!("lifted spec"),
    }
}

fn equality(lhs: f64, rhs: f64, detail: String) -> TrialResult {
    Ok((-(lhs - rhs).abs(), detail))
}

fn qm_homogeneity(rng: &mut ChaCha8Rng, c: &AxiomConfig, b: &mut Bound) -> TrialResult {
    let f = random_poly(rng, c);
    let l = [1u32, 2, 3, 5][rng.gen_range(0..4)];
    let target = random_target(rng);
    let h = lifted(&f, c);
    let lhs = sigma_of(&iterate(h.clone(), l).expect("l >= 1"), &target, c, b)?;
    let rhs = l as f64 * sigma_of(&h, &target, c, b)?;
    equality(lhs, rhs, format!("l = {l}, target {target}, f = {f:?}"))
}

fn qm_stability(rng: &mut ChaCha8Rng, c: &AxiomConfig, b: &mut Bound) -> TrialResult {
    let f = random_poly(rng, c);
    let g = random_poly(rng, c);
    let target = random_target(rng);
    let d = f.sub(&g);
    let (lo, hi) = (d.min().value, d.max().value);
    let diff = sigma_of(&lifted(&f, c), &target, c, b)? - sigma_of(&lifted(&g, c), &target, c, b)?;
    Ok(((diff - lo).min(hi - diff), format!("target {target}, f = {f:?}, g = {g:?}")))
}

/// Extrema of `H − K` over `[0, 1) × [−r, r]`: an `n × (n+1)` grid search,
/// then coordinate-wise golden refinement around every grid local extremum
/// of the column-wise extreme profile.
fn phase_extrema(h: &HamiltonianSpec, k: &HamiltonianSpec, r: f64, n: usize) -> (f64, f64) {
    let d = |q: f64, p: f64| -> f64 {
        let z = PhasePoint::new(q, p).expect("finite point");
        evaluate(h, z, 0.0) - evaluate(k, z, 0.0)
    };
    let fiber = |j: usize| -r + 2.0 * r * j as f64 / n as f64;
    // Per column q_i: (argmin p, min, argmax p, max) over the fiber grid.
    let columns: Vec<(f64, f64, f64, f64)> = (0..n)
        .map(|i| {
            let q = i as f64 / n as f64;
            (0..=n).fold((0.0, f64::INFINITY, 0.0, f64::NEG_INFINITY), |acc, j| {
                let p = fiber(j);
                let v = d(q, p);
                let lo = if v < acc.1 { (p, v) } else { (acc.0, acc.1) };
                let hi = if v > acc.3 { (p, v) } else { (acc.2, acc.3) };
                (lo.0, lo.1, hi.0, hi.1)
            })
        })
        .collect();
    let (hq, hp) = (1.0 / n as f64, 2.0 * r / n as f64);
    let refine = |q: f64, p: f64, v: f64, maximize: bool| -> f64 {
        let search = |g: &dyn Fn(f64) -> f64, a: f64, b: f64| {
            if maximize {
                golden_max(g, a, b, 1e-12)
            } else {
                golden_min(g, a, b, 1e-12)
            }
        };
        let (q1, _) = search(&|x| d(x, p), q - hq, q + hq);
        let (_, v2) = search(&|y| d(q1, y), (p - hp).max(-r), (p + hp).min(r));
        if maximize {
            v.max(v2)
        } else {
            v.min(v2)
        }
    };
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let (prev, next) = (columns[(i + n - 1) % n], columns[(i + 1) % n]);
        let c = columns[i];
        let q = i as f64 / n as f64;
        if c.1 <= prev.1 && c.1 <= next.1 {
            lo = lo.min(refine(q, c.0, c.1, false));
        }
        if c.3 >= prev.3 && c.3 >= next.3 {
            hi = hi.max(refine(q, c.2, c.3, true));
        }
    }
    (lo, hi)
}

fn qm_stability_reduction(rng: &mut ChaCha8Rng, c: &AxiomConfig, _: &mut Bound) -> TrialResult {
    let f = random_poly(rng, c);
    let g = random_poly(rng, c);
    let (hf, hg) = (lifted(&f, c), lifted(&g, c));
    let r = cutoff_of(&hf).r0.min(cutoff_of(&hg).r0);
    let (lo, hi) = phase_extrema(&hf, &hg, r, c.phase_grid);
    let d = f.sub(&g);
    let margin = -(lo - d.min().value).abs().max((hi - d.max().value).abs());
    Ok((margin, format!("f = {f:?}, g = {g:?}")))
}

fn qm_vanishing(rng: &mut ChaCha8Rng, c: &AxiomConfig, b: &mut Bound) -> TrialResult {
    let f = random_poly(rng, c);
    let r1 = cutoff_of(&lifted(&f, c)).r1;
    let bump = disjoint_bump(rng, r1);
    let target = random_target(rng);
    let s = sigma_of(&bump, &target, c, b)?;
    equality(s, 0.0, format!("target {target}, bump {bump:?}"))
}

fn qm_triangle(rng: &mut ChaCha8Rng, c: &AxiomConfig, b: &mut Bound) -> TrialResult {
    let f = random_poly(rng, c);
    let hf = lifted(&f, c);
    let target = random_target(rng);
    let (phi, psi, label) = if rng.gen_bool(0.5) {
        let g = random_poly(rng, c);
        let hg = lifted(&g, c);
        if rng.gen_bool(0.5) {
            (hf, hg, format!("lifted f = {f:?} then lifted g = {g:?}"))
        } else {
            (hg, hf, format!("lifted g = {g:?} then lifted f = {f:?}"))
        }
    } else {
        let bump = disjoint_bump(rng, cutoff_of(&hf).r1);
        if rng.gen_bool(0.5) {
            (hf, bump, format!("lifted f = {f:?} with displaced bump"))
        } else {
            (bump, hf, format!("displaced bump with lifted f = {f:?}"))
        }
    };
    let lhs = sigma_of(&compose(phi.clone(), psi.clone()), &target, c, b)?;
    let whole = sigma_of(&phi, &ConormalTarget::Whole, c, b)?;
    let rhs = sigma_of(&psi, &target, c, b)?;
    Ok((whole + rhs - lhs, format!("target {target}, {label}")))
}

fn qs_normalization(rng: &mut ChaCha8Rng, c: &AxiomConfig, b: &mut Bound) -> TrialResult {
    let target = random_target(rng);
    equality(sigma_of(&HamiltonianSpec::Zero, &target, c, b)?, 0.0, format!("target {target}"))
}

fn qs_stability(rng: &mut ChaCha8Rng, c: &AxiomConfig, b: &mut Bound) -> TrialResult {
    let f = random_poly(rng, c);
    let g = random_poly(rng, c);
    let target = random_target(rng);
    let (hf, hg) = (lifted(&f, c), lifted(&g, c));
    let r = cutoff_of(&hf).r1.max(cutoff_of(&hg).r1) + 0.5;
    let (lo, hi) = phase_extrema(&hf, &hg, r, c.phase_grid);
    let diff = sigma_of(&hf, &target, c, b)? - sigma_of(&hg, &target, c, b)?;
    Ok(((diff - lo).min(hi - diff), format!("target {target}, f = {f:?}, g = {g:?}")))
}

fn qs_monotonicity(rng: &mut ChaCha8Rng, c: &AxiomConfig, b: &mut Bound) -> TrialResult {
    let f = random_poly(rng, c);
    let w = random_poly(rng, c);
    // w shifted by its coefficient sum is non-negative everywhere.
    let mass: f64 = w.cos_coeffs()[1..].iter().chain(w.sin_coeffs()).map(|x| x.abs()).sum();
    let shift = mass - w.cos_coeffs()[0] + rng.gen_range(0.0..1.0);
    let bump_up = w.add(&TrigPoly::constant(shift));
    let g = f.add(&bump_up);
    let cutoff = CutoffSpec::safe_for(c.n_max as f64 * f.slope_bound().max(g.slope_bound()));
    let target = random_target(rng);
    let lhs = sigma_of(&HamiltonianSpec::lifted(f.clone(), cutoff), &target, c, b)?;
    let rhs = sigma_of(&HamiltonianSpec::lifted(g, cutoff), &target, c, b)?;
    Ok((rhs - lhs, format!("target {target}, f = {f:?}, h = {bump_up:?}")))
}

fn qs_homogeneity(rng: &mut ChaCha8Rng, c: &AxiomConfig, b: &mut Bound) -> TrialResult {
    let f = random_poly(rng, c);
    let s = rng.gen_range(0.0..=4.0);
    let target = random_target(rng);
    let h = lifted(&f, c);
    let lhs = sigma_of(&HamiltonianSpec::scale(s, h.clone()), &target, c, b)?;
    let rhs = s * sigma_of(&h, &target, c, b)?;
    equality(lhs, rhs, format!("s = {s}, target {target}, f = {f:?}"))
}

fn qs_vanishing(rng: &mut ChaCha8Rng, c: &AxiomConfig, b: &mut Bound) -> TrialResult {
    let r1 = rng.gen_range(1.0..20.0);
    let bump = disjoint_bump(rng, r1);
    let s = rng.gen_range(0.0..=4.0);
    let target = random_target(rng);
    let h = HamiltonianSpec::scale(s, bump);
    equality(sigma_of(&h, &target, c, b)?, 0.0, format!("target {target}, H = {h:?}"))
}

fn qs_additivity(rng: &mut ChaCha8Rng, c: &AxiomConfig, b: &mut Bound) -> TrialResult {
    let f = random_poly(rng, c);
    let hf = lifted(&f, c);
    let bump = disjoint_bump(rng, cutoff_of(&hf).r1);
    let target = random_target(rng);
    let sum = HamiltonianSpec::sum(vec![hf.clone(), bump]).map_err(|e| e.to_string())?;
    let lhs = sigma_of(&sum, &target, c, b)?;
    let rhs = sigma_of(&hf, &target, c, b)?;
    equality(lhs, rhs, format!("target {target}, f = {f:?}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> AxiomConfig {
        AxiomConfig {
            n_max: 12,
            grid: 128,
            phase_grid: 64,
            ..AxiomConfig::default()
        }
    }

    #[test]
    fn suite_passes_small_campaign() {
        let cfg = quick();
        let reports = axiom_suite(11, 6, &cfg);
        assert_eq!(reports.len(), CLAUSES.len() + SKIPPED.len());
        for r in &reports {
            if r.skipped.is_some() {
                assert!(!r.passed(cfg.tol));
                continue;
            }
            assert_eq!(r.refused, 0, "{}: {:?}", r.id, r.notes);
            assert!(r.passed(cfg.tol), "{} worst {} {:?}", r.id, r.worst_margin, r.witnesses);
        }
    }

    #[test]
    fn suite_is_deterministic() {
        let cfg = quick();
        // Skipped reports carry NaN margins, so compare the rendered form.
        let render = |r: Vec<AxiomReport>| format!("{r:?}");
        assert_eq!(render(axiom_suite(5, 3, &cfg)), render(axiom_suite(5, 3, &cfg)));
    }

    #[test]
    fn normalization_is_exact() {
        let cfg = quick();
        let r = collect(
            "n",
            "",
            (0..5)
                .map(|t| (qs_normalization(&mut trial_rng(1, 0, t), &cfg, &mut Bound::default()), 0.0))
                .collect(),
            0.0,
        );
        assert_eq!(r.worst_margin, 0.0);
    }

    #[test]
    fn scaling_by_two_at_a_point() {
        let cfg = quick();
        let f = TrigPoly::new(vec![0.1, -0.4], vec![0.7]).unwrap();
        let x = ConormalTarget::point(0.3).unwrap();
        let h = lifted(&f, &cfg);
        let one = sigma_of(&h, &x, &cfg, &mut Bound::default()).unwrap();
        let two = sigma_of(&HamiltonianSpec::scale(2.0, h), &x, &cfg, &mut Bound::default()).unwrap();
        assert!((one - f.eval(0.3)).abs() < 1e-6);
        assert!((two - 2.0 * f.eval(0.3)).abs() < 1e-6);
    }

    #[test]
    fn additivity_with_displaced_bump() {
        let cfg = quick();
        let f = TrigPoly::cosine();
        let hf = lifted(&f, &cfg);
        let bump = HamiltonianSpec::bump(0.4, cutoff_of(&hf).r1 + 1.5, 0.3, 0.45, 3.0).unwrap();
        let sum = HamiltonianSpec::sum(vec![hf.clone(), bump]).unwrap();
        for t in [ConormalTarget::Whole, ConormalTarget::point(0.25).unwrap()] {
            let a = sigma_of(&sum, &t, &cfg, &mut Bound::default()).unwrap();
            let b = sigma_of(&hf, &t, &cfg, &mut Bound::default()).unwrap();
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn phase_extrema_include_cutoff_region() {
        let cfg = quick();
        let f = TrigPoly::new(vec![2.0, 0.5], vec![]).unwrap();
        let hf = lifted(&f, &cfg);
        let (lo, hi) = phase_extrema(&hf, &HamiltonianSpec::Zero, cutoff_of(&hf).r1 + 0.5, 64);
        // f > 0 everywhere, but H vanishes beyond the cutoff.
        assert!(lo.abs() < 1e-12);
        assert!((hi - 2.5).abs() < 1e-9);
    }

    #[test]
    fn conjugation_cases_hold() {
        let cfg = quick();
        let r = conjugation_smoke(3, &cfg);
        assert_eq!(r.refused, 0, "{:?}", r.notes);
        assert!(r.worst_margin >= 0.0, "{:?}", r.witnesses);
        assert!(r.passed(0.0));
    }
}
