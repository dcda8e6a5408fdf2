//! Homogenized conormal invariants against base rescaling.
//!
//! For lifted `f` and a point target `x₁`, `(1/n)·ℓ₊^{x₁}(φⁿ) = f(x₁)` for
//! every `n`, while the time-one map of `Hₙ(q, p) = H(n·q, p)` has
//! `ℓ₊^{x₁} = f(n·x₁ mod 1)`. For irrational `x₁` the orbit `n·x₁` is dense,
//! so the supremum of the second sequence climbs to `max f`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{circle_reduce, BasePoint, ClassLabel, ConormalTarget};
use crate::hamiltonian::{viterbo_rescale, CutoffSpec, HamiltonianError, HamiltonianSpec, TrigPoly};
use crate::spectral::{spectral_value, ActionProfile, ProfileOptions, SpectralError};

/// Agreement required between oracle and closed form.
pub const CLOSED_FORM_TOL: f64 = 1e-6;
/// Number of oracle spot checks per orbit experiment.
pub const SPOT_CHECKS: usize = 10;
/// Largest `n` drawn for a spot check.
pub const SPOT_CHECK_MAX_N: usize = 200;
/// Integration step for lifted flows (exact for any step on the cutoff-free
/// region).
const LIFTED_STEP: f64 = 0.25;

/// Golden-ratio conjugate `(√5 − 1)/2`.
pub fn golden_point() -> BasePoint {
    BasePoint::new((5f64.sqrt() - 1.0) / 2.0).expect("in [0, 1)")
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ViterboError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error("oracle {oracle} and closed form {closed_form} disagree at n = {n}")]
    Mismatch { n: usize, oracle: f64, closed_form: f64 },
    #[error("n must be positive")]
    ZeroPower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpotCheck {
    pub n: usize,
    pub oracle: f64,
    pub closed_form: f64,
    pub error_bound: f64,
    pub step: f64,
}

/// Profile grid resolving `f(n·q)` well enough for a point evaluation.
fn grid_for(n: usize) -> usize {
    4096.max(64 * n)
}

/// `ℓ₊^{x₁}` of the time-one map of `Hₙ`, by the oracle, checked against
/// `f(n·x₁ mod 1)`.
pub fn rescaled_spectral(f: &TrigPoly, x1: BasePoint, n: usize) -> Result<SpotCheck, ViterboError> {
    if n == 0 {
        return Err(ViterboError::ZeroPower);
    }
    let cutoff = CutoffSpec::safe_for(n as f64 * f.slope_bound());
    let spec = viterbo_rescale(HamiltonianSpec::lifted(f.clone(), cutoff), n as u32)?;
    let profile = ActionProfile::build(
        &spec,
        ProfileOptions {
            grid: grid_for(n),
            step: LIFTED_STEP,
        },
    )?;
    let target = ConormalTarget::Point { x: x1 };
    let oracle = spectral_value(&profile, &target, ClassLabel::FundamentalN)?;
    let closed_form = f.eval(orbit_point(x1, n).value());
    if !((oracle - closed_form).abs() <= CLOSED_FORM_TOL) {
        return Err(ViterboError::Mismatch { n, oracle, closed_form });
    }
    Ok(SpotCheck {
        n,
        oracle,
        closed_form,
        error_bound: profile.error_bound(),
        step: profile.step(),
    })
}

fn orbit_point(x1: BasePoint, n: usize) -> BasePoint {
    circle_reduce(n as f64 * x1.value()).expect("finite")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitExperiment {
    pub f: TrigPoly,
    pub x1: BasePoint,
    pub n_max: usize,
    /// `(1/n)·ℓ₊^{x₁}(φⁿ)`, the same for every `n`: `f(x₁)`.
    pub lhs: f64,
    /// Oracle value of the left side at `n = 1`.
    pub lhs_oracle: f64,
    /// `f(n·x₁ mod 1)` for `n = 1..=n_max`.
    pub rhs_sequence: Vec<f64>,
    /// Running supremum of `rhs_sequence`.
    pub rhs_running_sup: Vec<f64>,
    pub rhs_sup: f64,
    pub max_f: f64,
    /// `max f − rhs_sup`.
    pub gap_to_max: f64,
    /// `|lhs − rhs_sup|`.
    pub gap: f64,
    pub spot_checks: Vec<SpotCheck>,
}

/// Runs the comparison up to `n_max`, with oracle spot checks at
/// [`SPOT_CHECKS`] seeded random `n ≤ min(n_max, SPOT_CHECK_MAX_N)`.
pub fn orbit_experiment(f: &TrigPoly, x1: BasePoint, n_max: usize, seed: u64) -> Result<OrbitExperiment, ViterboError> {
    if n_max == 0 {
        return Err(ViterboError::ZeroPower);
    }
    let rhs_sequence: Vec<f64> = (1..=n_max).map(|n| f.eval(orbit_point(x1, n).value())).collect();
    let rhs_running_sup: Vec<f64> = rhs_sequence
        .iter()
        .scan(f64::NEG_INFINITY, |acc, v| {
            *acc = acc.max(*v);
            Some(*acc)
        })
        .collect();
    let rhs_sup = *rhs_running_sup.last().expect("n_max >= 1");
    let lhs = f.eval(x1.value());
    let lhs_oracle = rescaled_spectral(f, x1, 1)?.oracle;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = n_max.min(SPOT_CHECK_MAX_N);
    let spot_checks = (0..SPOT_CHECKS)
        .map(|_| rescaled_spectral(f, x1, rng.gen_range(1..=top)))
        .collect::<Result<Vec<_>, _>>()?;
    let max_f = f.max().value;
    Ok(OrbitExperiment {
        f: f.clone(),
        x1,
        n_max,
        lhs,
        lhs_oracle,
        rhs_sequence,
        rhs_running_sup,
        rhs_sup,
        max_f,
        gap_to_max: max_f - rhs_sup,
        gap: (lhs - rhs_sup).abs(),
        spot_checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bp(x: f64) -> BasePoint {
        BasePoint::new(x).unwrap()
    }

    #[test]
    fn rescaled_examples() {
        let cos = TrigPoly::cosine();
        let f = TrigPoly::new(vec![0.2, -0.5, 0.3], vec![0.4, 0.1]).unwrap();
        assert!((rescaled_spectral(&f, bp(0.37), 1).unwrap().oracle - f.eval(0.37)).abs() < 1e-6);
        assert!((rescaled_spectral(&cos, bp(0.5), 2).unwrap().oracle - 1.0).abs() < 1e-6);
        assert!((rescaled_spectral(&cos, bp(0.25), 2).unwrap().oracle + 1.0).abs() < 1e-6);
        assert!(matches!(rescaled_spectral(&cos, bp(0.25), 0), Err(ViterboError::ZeroPower)));
    }

    #[test]
    fn rational_fixed_point() {
        let f = TrigPoly::new(vec![0.0, 0.5], vec![0.3]).unwrap();
        let e = orbit_experiment(&f, bp(0.0), 50, 1).unwrap();
        assert!(e.rhs_sequence.iter().all(|v| *v == f.eval(0.0)));
        assert_eq!(e.rhs_sup, f.eval(0.0));
    }

    #[test]
    fn rational_orbit_stabilizes() {
        let f = TrigPoly::new(vec![0.0, 0.5, -0.2], vec![0.3]).unwrap();
        let e = orbit_experiment(&f, bp(2.0 / 7.0), 60, 2).unwrap();
        let finite_max = (1..=7).map(|k| f.eval(k as f64 / 7.0)).fold(f64::NEG_INFINITY, f64::max);
        assert!((e.rhs_running_sup[6] - finite_max).abs() < 1e-12);
        assert!(e.rhs_running_sup[6..].iter().all(|v| *v == e.rhs_running_sup[6]));
    }

    #[test]
    fn golden_orbit_reaches_max() {
        let x1 = golden_point();
        let f = TrigPoly::shifted_cosine(x1.value());
        let e = orbit_experiment(&f, x1, 10_000, 7).unwrap();
        assert!((e.lhs + 1.0).abs() < 1e-12);
        assert!((e.lhs_oracle + 1.0).abs() < 1e-6);
        assert!(e.rhs_sup >= 0.995);
        assert!(e.gap >= 1.99);
        assert!(e.rhs_running_sup.windows(2).all(|w| w[0] <= w[1]));
        assert!(e.rhs_sup <= e.max_f + 1e-15);
        assert_eq!(e.spot_checks.len(), SPOT_CHECKS);
    }
}
