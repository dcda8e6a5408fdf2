//! The sequences `aₙ = n·ℓ₊^M(φ⁻¹) + ℓ₊^N(φⁿ)` and
//! `bₙ = n·ℓ₊^M(φ⁻¹) + ℓ₊^M(φⁿ)`, their structural properties (P1)–(P5),
//! limsup and Fekete estimates, and the hold/increment counterexample showing
//! that (P1)–(P5) do not force `aₙ/n` to converge.
//!
//! Properties checked:
//! - (P1) `a_{m+n} ≤ aₙ + b_m`
//! - (P2) `aₙ, bₙ ≥ 0`
//! - (P3) `aₙ ≤ bₙ`
//! - (P4) `a_{n+1} − aₙ ≥ 0`
//! - (P5) `a_{n+1} − aₙ ≤ C`

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{ClassLabel, ConormalTarget};
use crate::hamiltonian::{inverse, HamiltonianSpec};
use crate::spectral::{plus_class, spectral_value, ActionProfile, ProfileOptions, SpectralError};

/// Cluster tolerance tuned to the `1/3 … 1/2` counterexample scale.
pub const DEFAULT_CLUSTER_TOL: f64 = 1.0 / 24.0;
/// Pair budget of the subadditivity check.
const EXHAUSTIVE_PAIRS: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HomogenizeError {
    #[error("spectral oracle failed at n = {n}: {source}")]
    Partial { n: usize, source: SpectralError },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("n_max must be positive")]
    EmptySequence,
    #[error("thresholds must satisfy 0 < low < high < 1, got {low} and {high}")]
    InvalidThresholds { low: f64, high: f64 },
    #[error("sequence is not subadditive: b[{m}+{n}] exceeds b[{m}] + b[{n}] by {excess}")]
    NotSubadditive { m: usize, n: usize, excess: f64 },
}

/// Sequences `a`, `b` indexed from `n = 1` (`a[0]` is `a₁`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequencePair {
    pub n_max: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// Increment bound used by (P5).
    pub c: f64,
    /// Oracle ingredients, absent for synthetic sequences.
    pub oracle: Option<OracleTerms>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleTerms {
    pub target: ConormalTarget,
    /// `ℓ₊^M(φ⁻¹)`.
    pub inverse_whole: f64,
    /// `ℓ₊^N(φⁿ)`.
    pub ell_target: Vec<f64>,
    /// `ℓ₊^M(φⁿ)`.
    pub ell_whole: Vec<f64>,
    pub error_bounds: Vec<f64>,
}

impl SequencePair {
    /// Synthetic pair; `a` and `b` must have equal positive length.
    pub fn from_values(a: Vec<f64>, b: Vec<f64>, c: f64) -> Result<Self, HomogenizeError> {
        if a.is_empty() || a.len() != b.len() {
            return Err(HomogenizeError::EmptySequence);
        }
        Ok(Self {
            n_max: a.len(),
            a,
            b,
            c,
            oracle: None,
        })
    }

    pub fn a_ratios(&self) -> Vec<f64> {
        ratios(&self.a)
    }

    pub fn b_ratios(&self) -> Vec<f64> {
        ratios(&self.b)
    }

    pub fn ratios(&self, which: Which) -> Vec<f64> {
        match which {
            Which::A => self.a_ratios(),
            Which::B => self.b_ratios(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    A,
    B,
}

fn ratios(xs: &[f64]) -> Vec<f64> {
    xs.iter().enumerate().map(|(i, x)| x / (i + 1) as f64).collect()
}

/// Builds `aₙ, bₙ` for `n ≤ n_max` from the spectral oracle. Lifted cutoffs
/// are widened so that all iterates stay graphical when possible.
pub fn build_sequences(
    h: &HamiltonianSpec,
    target: &ConormalTarget,
    n_max: usize,
    options: ProfileOptions,
) -> Result<SequencePair, HomogenizeError> {
    if n_max == 0 {
        return Err(HomogenizeError::EmptySequence);
    }
    let h = auto_cutoff(h, n_max);
    let inv = ActionProfile::build(&inverse(h.clone()), options)?;
    let inverse_whole = spectral_value(&inv, &ConormalTarget::Whole, ClassLabel::FundamentalN)?;
    let (ell_target, ell_whole, error_bounds) = oracle_terms(&h, target, n_max, options)?;
    let a: Vec<f64> = (0..n_max)
        .map(|k| (k + 1) as f64 * inverse_whole + ell_target[k])
        .collect();
    let b: Vec<f64> = (0..n_max)
        .map(|k| (k + 1) as f64 * inverse_whole + ell_whole[k])
        .collect();
    let step = std::iter::once(ell_target[0].abs())
        .chain(ell_target.windows(2).map(|w| (w[1] - w[0]).abs()))
        .fold(0.0, f64::max);
    Ok(SequencePair {
        n_max,
        a,
        b,
        c: inverse_whole.abs() + step,
        oracle: Some(OracleTerms {
            target: *target,
            inverse_whole,
            ell_target,
            ell_whole,
            error_bounds,
        }),
    })
}

/// `h` with lifted cutoffs widened out of reach of the first `n_max`
/// iterates, or `h` itself when widening would make it illegal.
pub fn auto_cutoff(h: &HamiltonianSpec, n_max: usize) -> HamiltonianSpec {
    let widened = h.with_safe_cutoffs(n_max.min(u32::MAX as usize) as u32);
    if widened.validate().is_ok() {
        widened
    } else {
        h.clone()
    }
}

type Terms = (Vec<f64>, Vec<f64>, Vec<f64>);

fn oracle_terms(
    h: &HamiltonianSpec,
    target: &ConormalTarget,
    n_max: usize,
    options: ProfileOptions,
) -> Result<Terms, HomogenizeError> {
    let profiles = ActionProfile::build_iterates(h, n_max, options)?;
    let mut ell_target = Vec::with_capacity(n_max);
    let mut ell_whole = Vec::with_capacity(n_max);
    let mut bounds = Vec::with_capacity(n_max);
    for (k, prof) in profiles.into_iter().enumerate() {
        let n = k + 1;
        let partial = |source| HomogenizeError::Partial { n, source };
        let prof = prof.map_err(partial)?;
        ell_target.push(spectral_value(&prof, target, plus_class(target)).map_err(partial)?);
        ell_whole.push(spectral_value(&prof, &ConormalTarget::Whole, ClassLabel::FundamentalN).map_err(partial)?);
        bounds.push(prof.error_bound());
    }
    Ok((ell_target, ell_whole, bounds))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Property {
    P1,
    P2,
    P3,
    P4,
    P5,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Property::P1 => "P1 a[m+n] <= a[n] + b[m]",
            Property::P2 => "P2 a[n], b[n] >= 0",
            Property::P3 => "P3 a[n] <= b[n]",
            Property::P4 => "P4 a[n+1] >= a[n]",
            Property::P5 => "P5 a[n+1] - a[n] <= C",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub property: Property,
    pub pass: bool,
    /// Smallest slack found; negative means violated.
    pub worst_margin: f64,
    /// Indices `(n, m)` (1-based) attaining the worst margin; `m = 0` when
    /// the property involves a single index.
    pub witness: (usize, usize),
    pub evaluated: usize,
    pub exhaustive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub checks: Vec<PropertyCheck>,
    pub tol: f64,
}

impl PropertyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, p: Property) -> &PropertyCheck {
        self.checks.iter().find(|c| c.property == p).expect("all properties checked")
    }
}

struct Worst {
    margin: f64,
    witness: (usize, usize),
    evaluated: usize,
}

impl Worst {
    fn new() -> Self {
        Self {
            margin: f64::INFINITY,
            witness: (0, 0),
            evaluated: 0,
        }
    }

    fn see(&mut self, margin: f64, witness: (usize, usize)) {
        self.evaluated += 1;
        if margin < self.margin {
            self.margin = margin;
            self.witness = witness;
        }
    }

    fn finish(self, property: Property, tol: f64, exhaustive: bool) -> PropertyCheck {
        PropertyCheck {
            property,
            pass: self.margin >= -tol,
            worst_margin: self.margin,
            witness: self.witness,
            evaluated: self.evaluated,
            exhaustive,
        }
    }
}

/// Pairs `(m, n)` with `m, n ≥ 1`, `m + n ≤ n_max`: all of them when there
/// are at most `sample_pairs`, otherwise `sample_pairs` seeded draws.
fn index_pairs(n_max: usize, sample_pairs: usize, seed: u64) -> (Vec<(usize, usize)>, bool) {
    let total = if n_max < 2 { 0 } else { (n_max - 1) * n_max / 2 };
    if total <= sample_pairs {
        let mut pairs = Vec::with_capacity(total);
        for m in 1..n_max {
            for n in 1..=(n_max - m) {
                pairs.push((m, n));
            }
        }
        return (pairs, true);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = (0..sample_pairs)
        .map(|_| {
            let m = rng.gen_range(1..n_max);
            let n = rng.gen_range(1..=(n_max - m));
            (m, n)
        })
        .collect();
    (pairs, false)
}

/// (P1) on `sample_pairs` seeded random pairs (exhaustive when the pair
/// count is small), (P2)–(P5) exhaustively.
pub fn check_properties(s: &SequencePair, sample_pairs: usize, seed: u64, tol: f64) -> PropertyReport {
    let (a, b) = (&s.a, &s.b);
    let n_max = s.n_max;
    let mut p1 = Worst::new();
    let (pairs, exhaustive) = index_pairs(n_max, sample_pairs, seed);
    for (m, n) in pairs {
        p1.see(a[n - 1] + b[m - 1] - a[m + n - 1], (n, m));
    }
    let mut p2 = Worst::new();
    let mut p3 = Worst::new();
    for k in 0..n_max {
        p2.see(a[k].min(b[k]), (k + 1, 0));
        p3.see(b[k] - a[k], (k + 1, 0));
    }
    let mut p4 = Worst::new();
    let mut p5 = Worst::new();
    for k in 0..n_max.saturating_sub(1) {
        let inc = a[k + 1] - a[k];
        p4.see(inc, (k + 1, 0));
        p5.see(s.c - inc, (k + 1, 0));
    }
    PropertyReport {
        checks: vec![
            p1.finish(Property::P1, tol, exhaustive),
            p2.finish(Property::P2, tol, true),
            p3.finish(Property::P3, tol, true),
            p4.finish(Property::P4, tol, true),
            p5.finish(Property::P5, tol, true),
        ],
        tol,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    pub center: f64,
    pub count: usize,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimsupEstimate {
    /// Supremum of the ratios over the final `tail_window` indices.
    pub value: f64,
    pub tail_window: usize,
    /// Clusters of the ratio sequence's turning values over the last three
    /// quarters of the indices, plus its final value.
    pub accumulation_points: Vec<Cluster>,
    pub converged: bool,
    pub cluster_tol: f64,
}

impl LimsupEstimate {
    pub fn highest(&self) -> Option<&Cluster> {
        self.accumulation_points.last()
    }

    pub fn lowest(&self) -> Option<&Cluster> {
        self.accumulation_points.first()
    }
}

pub fn limsup_ratio(s: &SequencePair, which: Which, cluster_tol: f64) -> LimsupEstimate {
    limsup_of(&s.ratios(which), cluster_tol)
}

/// Limsup estimate for a ratio sequence `r₁, …, r_N`.
pub fn limsup_of(ratios: &[f64], cluster_tol: f64) -> LimsupEstimate {
    let n = ratios.len();
    if n == 0 {
        return LimsupEstimate {
            value: f64::NAN,
            tail_window: 0,
            accumulation_points: Vec::new(),
            converged: false,
            cluster_tol,
        };
    }
    let tail_window = n.div_ceil(10);
    let value = ratios[n - tail_window..].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let start = (n / 4).max(1);
    let mut points: Vec<f64> = (start..n.saturating_sub(1))
        .filter(|&i| {
            let (l, c, r) = (ratios[i - 1], ratios[i], ratios[i + 1]);
            (c > l && c >= r) || (c < l && c <= r)
        })
        .map(|i| ratios[i])
        .collect();
    points.push(ratios[n - 1]);
    let accumulation_points = cluster_1d(points, cluster_tol);
    LimsupEstimate {
        value,
        tail_window,
        converged: accumulation_points.len() == 1,
        accumulation_points,
        cluster_tol,
    }
}

/// Single-linkage clustering on the line: split wherever consecutive sorted
/// values are more than `tol` apart.
fn cluster_1d(mut xs: Vec<f64>, tol: f64) -> Vec<Cluster> {
    xs.sort_by(f64::total_cmp);
    let mut out: Vec<Cluster> = Vec::new();
    let mut group: Vec<f64> = Vec::new();
    let flush = |group: &mut Vec<f64>, out: &mut Vec<Cluster>| {
        if group.is_empty() {
            return;
        }
        let count = group.len();
        out.push(Cluster {
            center: group.iter().sum::<f64>() / count as f64,
            count,
            lo: group[0],
            hi: group[count - 1],
        });
        group.clear();
    };
    for x in xs {
        if let Some(&last) = group.last() {
            if x - last > tol {
                flush(&mut group, &mut out);
            }
        }
        group.push(x);
    }
    flush(&mut group, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeketeEstimate {
    /// `inf bₙ/n` over the available prefix.
    pub inf_prefix: f64,
    pub final_ratio: f64,
    pub pairs_checked: usize,
    pub exhaustive: bool,
}

/// Fekete limit of a subadditive sequence, after checking subadditivity
/// within `tol` on all pairs (or a seeded sample for long sequences).
pub fn fekete_limit(b: &[f64], tol: f64) -> Result<FeketeEstimate, HomogenizeError> {
    if b.is_empty() {
        return Err(HomogenizeError::EmptySequence);
    }
    let (pairs, exhaustive) = index_pairs(b.len(), EXHAUSTIVE_PAIRS, 0x5eed);
    let mut worst: Option<(usize, usize, f64)> = None;
    for &(m, n) in &pairs {
        let excess = b[m + n - 1] - b[m - 1] - b[n - 1];
        if excess > tol && worst.is_none_or(|w| excess > w.2) {
            worst = Some((m, n, excess));
        }
    }
    if let Some((m, n, excess)) = worst {
        return Err(HomogenizeError::NotSubadditive { m, n, excess });
    }
    let r = ratios(b);
    Ok(FeketeEstimate {
        inf_prefix: r.iter().cloned().fold(f64::INFINITY, f64::min),
        final_ratio: r[r.len() - 1],
        pairs_checked: pairs.len(),
        exhaustive,
    })
}

/// `σᴺ(φ) = limsup ℓ₊^N(φⁿ)/n`, estimated from `n ≤ n_max`.
pub fn sigma(
    h: &HamiltonianSpec,
    target: &ConormalTarget,
    n_max: usize,
    options: ProfileOptions,
    cluster_tol: f64,
) -> Result<LimsupEstimate, HomogenizeError> {
    Ok(limsup_of(&sigma_ratios(h, target, n_max, options)?, cluster_tol))
}

/// The ratios `ℓ₊^N(φⁿ)/n` for `n = 1..=n_max`.
pub fn sigma_ratios(
    h: &HamiltonianSpec,
    target: &ConormalTarget,
    n_max: usize,
    options: ProfileOptions,
) -> Result<Vec<f64>, HomogenizeError> {
    Ok(sigma_terms(h, target, n_max, options)?.ratios)
}

/// Ratios `ℓ₊^N(φⁿ)/n` together with the oracle error bound of each term.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaTerms {
    pub ratios: Vec<f64>,
    /// Bound on `|ℓ₊^N(φⁿ)|` error, before division by `n`.
    pub error_bounds: Vec<f64>,
    pub step: f64,
}

impl SigmaTerms {
    pub fn max_error_bound(&self) -> f64 {
        self.error_bounds.iter().cloned().fold(0.0, f64::max)
    }
}

pub fn sigma_terms(
    h: &HamiltonianSpec,
    target: &ConormalTarget,
    n_max: usize,
    options: ProfileOptions,
) -> Result<SigmaTerms, HomogenizeError> {
    if n_max == 0 {
        return Err(HomogenizeError::EmptySequence);
    }
    let h = auto_cutoff(h, n_max);
    let profiles = ActionProfile::build_iterates(&h, n_max, options)?;
    let mut ratios = Vec::with_capacity(n_max);
    let mut error_bounds = Vec::with_capacity(n_max);
    for (k, prof) in profiles.into_iter().enumerate() {
        let n = k + 1;
        let partial = |source| HomogenizeError::Partial { n, source };
        let prof = prof.map_err(partial)?;
        ratios.push(spectral_value(&prof, target, plus_class(target)).map_err(partial)? / n as f64);
        error_bounds.push(prof.error_bound());
    }
    Ok(SigmaTerms {
        ratios,
        error_bounds,
        step: options.step,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseKind {
    Hold,
    Increment,
}

/// Maximal run of indices `n ∈ [start, start + len)` whose successor is
/// produced by the same rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Phase {
    pub kind: PhaseKind,
    pub start: usize,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub sequences: SequencePair,
    pub phases: Vec<Phase>,
    pub properties: PropertyReport,
    pub limsup: LimsupEstimate,
    pub theta_low: f64,
    pub theta_high: f64,
}

/// Hold/increment sequence: `a₁ = 1`; hold `a_{n+1} = aₙ` until
/// `aₙ/n < low`, then increment `a_{n+1} = aₙ + 1` until `aₙ/n > high`, and
/// repeat. Paired with `bₙ = n` and `C = 1`, which satisfy (P1)–(P5).
pub fn counterexample(
    n_max: usize,
    theta_low: f64,
    theta_high: f64,
    sample_pairs: usize,
    seed: u64,
    cluster_tol: f64,
) -> Result<Counterexample, HomogenizeError> {
    if n_max == 0 {
        return Err(HomogenizeError::EmptySequence);
    }
    if !(0.0 < theta_low && theta_low < theta_high && theta_high < 1.0) {
        return Err(HomogenizeError::InvalidThresholds {
            low: theta_low,
            high: theta_high,
        });
    }
    let (values, phases) = hold_increment(n_max, theta_low, theta_high);
    let a: Vec<f64> = values.iter().map(|&v| v as f64).collect();
    let b: Vec<f64> = (1..=n_max).map(|n| n as f64).collect();
    let sequences = SequencePair::from_values(a, b, 1.0)?;
    let properties = check_properties(&sequences, sample_pairs, seed, 0.0);
    let limsup = limsup_ratio(&sequences, Which::A, cluster_tol);
    Ok(Counterexample {
        sequences,
        phases,
        properties,
        limsup,
        theta_low,
        theta_high,
    })
}

fn hold_increment(n_max: usize, low: f64, high: f64) -> (Vec<u64>, Vec<Phase>) {
    let mut a = Vec::with_capacity(n_max);
    let mut phases: Vec<Phase> = Vec::new();
    let mut kind = PhaseKind::Hold;
    let mut cur: u64 = 1;
    a.push(cur);
    phases.push(Phase {
        kind,
        start: 1,
        len: 0,
    });
    for n in 1..=n_max {
        let ratio = cur as f64 / n as f64;
        let switch = match kind {
            PhaseKind::Hold => ratio < low,
            PhaseKind::Increment => ratio > high,
        };
        if switch {
            kind = match kind {
                PhaseKind::Hold => PhaseKind::Increment,
                PhaseKind::Increment => PhaseKind::Hold,
            };
            phases.push(Phase { kind, start: n, len: 0 });
        }
        phases.last_mut().expect("non-empty").len += 1;
        if n == n_max {
            break;
        }
        if kind == PhaseKind::Increment {
            cur += 1;
        }
        a.push(cur);
    }
    (a, phases)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::TrigPoly;

    fn opts() -> ProfileOptions {
        ProfileOptions { grid: 512, step: 1e-2 }
    }

    fn cos() -> HamiltonianSpec {
        HamiltonianSpec::lifted_safe(TrigPoly::cosine(), 1)
    }

    #[test]
    fn cosine_sequences_at_minimum() {
        let x = ConormalTarget::point(0.5).unwrap();
        let s = build_sequences(&cos(), &x, 50, opts()).unwrap();
        for (k, (ra, rb)) in s.a_ratios().iter().zip(s.b_ratios()).enumerate() {
            assert!(ra.abs() < 1e-6, "a ratio at {}: {ra}", k + 1);
            assert!((rb - 2.0).abs() < 1e-6);
        }
        let report = check_properties(&s, 500, 1, 1e-6);
        assert!(report.all_pass(), "{report:?}");
        let oracle = s.oracle.as_ref().unwrap();
        assert!((oracle.inverse_whole - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_sequences() {
        let s = build_sequences(&HamiltonianSpec::Zero, &ConormalTarget::point(0.2).unwrap(), 12, opts()).unwrap();
        assert!(s.a.iter().chain(&s.b).all(|v| *v == 0.0));
    }

    #[test]
    fn whole_target_gives_equal_sequences() {
        let f = TrigPoly::new(vec![0.0, 0.3, 0.2], vec![-0.4]).unwrap();
        let h = HamiltonianSpec::lifted_safe(f, 1);
        let s = build_sequences(&h, &ConormalTarget::Whole, 10, opts()).unwrap();
        assert_eq!(s.a, s.b);
    }

    #[test]
    fn p3_failure_detected() {
        let a: Vec<f64> = (1..=10).map(|n| n as f64).collect();
        let s = SequencePair::from_values(a, vec![1.0; 10], 1.0).unwrap();
        let r = check_properties(&s, 100, 0, 0.0);
        let p3 = r.get(Property::P3);
        assert!(!p3.pass);
        assert_eq!(p3.witness.0, 10);
        // First failing index is n = 2.
        assert!(s.b[1] < s.a[1] && s.b[0] >= s.a[0]);
    }

    #[test]
    fn hand_traced_counterexample() {
        let ce = counterexample(10, 1.0 / 3.0, 0.5, 100, 0, DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(ce.sequences.a, vec![1.0, 1.0, 1.0, 1.0, 2.0, 3.0, 4.0, 4.0, 4.0, 4.0]);
        assert!(ce.properties.all_pass(), "{:?}", ce.properties);
        let kinds: Vec<(PhaseKind, usize, usize)> = ce.phases.iter().map(|p| (p.kind, p.start, p.len)).collect();
        assert_eq!(
            kinds,
            vec![
                (PhaseKind::Hold, 1, 3),
                (PhaseKind::Increment, 4, 3),
                (PhaseKind::Hold, 7, 4)
            ]
        );
    }

    #[test]
    fn counterexample_alternates_at_scale() {
        let ce = counterexample(1_000_000, 1.0 / 3.0, 0.5, 10_000, 3, DEFAULT_CLUSTER_TOL).unwrap();
        assert!(ce.phases.len() >= 10);
        assert!(ce.properties.all_pass());
        let l = &ce.limsup;
        assert!(!l.converged);
        assert!(l.highest().unwrap().center >= 0.48);
        assert!(l.lowest().unwrap().center <= 0.35);
        assert!(l.highest().unwrap().center - l.lowest().unwrap().center >= 1.0 / 6.0 - 0.04);
    }

    #[test]
    fn constant_ratios_converge() {
        let l = limsup_of(&[0.7; 100], DEFAULT_CLUSTER_TOL);
        assert_eq!(l.value, 0.7);
        assert!(l.converged);
        assert_eq!(l.tail_window, 10);
    }

    #[test]
    fn lifted_limsup_at_minimum_is_zero() {
        let s = build_sequences(&cos(), &ConormalTarget::point(0.5).unwrap(), 20, opts()).unwrap();
        let l = limsup_ratio(&s, Which::A, DEFAULT_CLUSTER_TOL);
        assert!(l.value.abs() < 1e-6 && l.converged);
    }

    #[test]
    fn fekete_examples() {
        let lin: Vec<f64> = (1..=200).map(|n| n as f64).collect();
        let e = fekete_limit(&lin, 0.0).unwrap();
        assert_eq!((e.inf_prefix, e.final_ratio), (1.0, 1.0));
        let log: Vec<f64> = (1..=400).map(|n| n as f64 + ((n + 1) as f64).ln()).collect();
        let e = fekete_limit(&log, 1e-12).unwrap();
        let direct = 1.0 + 401f64.ln() / 400.0;
        assert!((e.final_ratio - direct).abs() < 1e-12);
        assert!(e.inf_prefix > 1.0 && e.inf_prefix <= e.final_ratio);
        let sq: Vec<f64> = (1..=20).map(|n| (n * n) as f64).collect();
        assert!(matches!(fekete_limit(&sq, 0.0), Err(HomogenizeError::NotSubadditive { .. })));
    }

    #[test]
    fn fekete_on_oracle_b() {
        let s = build_sequences(&cos(), &ConormalTarget::point(0.1).unwrap(), 15, opts()).unwrap();
        let e = fekete_limit(&s.b, 1e-6).unwrap();
        assert!((e.final_ratio - 2.0).abs() < 1e-6);
    }

    #[test]
    fn sigma_examples() {
        let at_min = sigma(&cos(), &ConormalTarget::point(0.5).unwrap(), 20, opts(), DEFAULT_CLUSTER_TOL).unwrap();
        assert!((at_min.value + 1.0).abs() < 1e-6);
        let at_max = sigma(&cos(), &ConormalTarget::point(0.0).unwrap(), 20, opts(), DEFAULT_CLUSTER_TOL).unwrap();
        assert!((at_max.value - 1.0).abs() < 1e-6);
        let zero = sigma(&HamiltonianSpec::Zero, &ConormalTarget::Whole, 10, opts(), DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(zero.value, 0.0);
    }

    #[test]
    fn invalid_thresholds() {
        assert!(matches!(
            counterexample(10, 0.6, 0.5, 10, 0, DEFAULT_CLUSTER_TOL),
            Err(HomogenizeError::InvalidThresholds { .. })
        ));
    }
}
