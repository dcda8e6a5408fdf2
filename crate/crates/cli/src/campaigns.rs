//! Seeded random campaigns shared by `report` and the acceptance suite.

use num_rational::Rational64;
use qmorph_core::geometry::{ArcSign, ClassLabel, ConormalTarget};
use qmorph_core::hamiltonian::{compose, iterate, CutoffSpec, HamiltonianSpec, TrigPoly};
use qmorph_core::indexcalc::{gluing_sides, verify_gluing};
use qmorph_core::spectral::{
    ell_plus, persistence, triangle_from_profiles, ActionProfile, ProfileOptions,
    SpectralError, SPECTRALITY_TOL,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

fn rng_for(seed: u64, stream: u64, i: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(
        seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(stream << 40)
            .wrapping_add(i as u64),
    )
}

/// Degree 1 to 4, coefficients in `[-1, 1]`.
pub fn random_poly(rng: &mut ChaCha8Rng) -> TrigPoly {
    let d = rng.gen_range(1..=4);
    let cos = (0..=d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let sin = (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    TrigPoly::new(cos, sin).expect("degree within cap")
}

fn random_arc(rng: &mut ChaCha8Rng, sign: ArcSign) -> ConormalTarget {
    let a: f64 = rng.gen_range(0.0..1.0);
    let len: f64 = rng.gen_range(0.05..0.95);
    ConormalTarget::arc(a, a + len, sign).expect("non-degenerate arc")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TriangleRow {
    pub pair: usize,
    pub target_kind: String,
    pub target: String,
    pub composite: f64,
    pub whole_h: f64,
    pub target_k: f64,
    pub margin: f64,
    pub holds: bool,
    pub error_bound: f64,
    pub step: f64,
}

/// `ℓ₊^N(φψ) ≤ ℓ₊^M(φ) + ℓ₊^N(ψ)` for random lifted `φ, ψ` against a point,
/// the whole circle and an arc of random sign.
pub fn triangle_fuzz(seed: u64, pairs: usize, options: ProfileOptions, tol: f64) -> Result<Vec<TriangleRow>, SpectralError> {
    let per_pair: Vec<Result<Vec<TriangleRow>, SpectralError>> = (0..pairs)
        .into_par_iter()
        .map(|pair| {
            let mut rng = rng_for(seed, 1, pair);
            let f = random_poly(&mut rng);
            let g = random_poly(&mut rng);
            let cutoff = CutoffSpec::safe_for(f.slope_bound() + g.slope_bound());
            let h = HamiltonianSpec::lifted(f, cutoff);
            let k = HamiltonianSpec::lifted(g, cutoff);
            let p_h = ActionProfile::build(&h, options)?;
            let p_k = ActionProfile::build(&k, options)?;
            let p_hk = ActionProfile::build(&compose(h, k), options)?;
            let error_bound = p_h.error_bound() + p_k.error_bound() + p_hk.error_bound();
            let sign = if rng.gen_bool(0.5) { ArcSign::Minus } else { ArcSign::Plus };
            let targets = [
                ConormalTarget::point(rng.gen_range(0.0..1.0))?,
                ConormalTarget::Whole,
                random_arc(&mut rng, sign),
            ];
            targets
                .iter()
                .map(|t| {
                    let r = triangle_from_profiles(&p_hk, &p_h, &p_k, t, tol)?;
                    Ok(TriangleRow {
                        pair,
                        target_kind: t.kind_tag(),
                        target: t.to_string(),
                        composite: r.composite,
                        whole_h: r.whole_h,
                        target_k: r.target_k,
                        margin: r.margin,
                        holds: r.holds,
                        error_bound,
                        step: options.step,
                    })
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::with_capacity(3 * pairs);
    for r in per_pair {
        rows.extend(r?);
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossRow {
    pub profile: usize,
    pub power: u32,
    pub target: String,
    pub class: String,
    pub direct: f64,
    /// Persistence birth, absent for point targets.
    pub persistence: Option<f64>,
    pub difference: Option<f64>,
    pub error_bound: f64,
    pub agrees: bool,
    pub witness_action: f64,
    pub witness_distance: f64,
    pub spectral: bool,
    pub step: f64,
}

/// Direct extremum values against sublevel persistence births, plus the
/// spectrality check on each reported value, over random iterated lifts.
pub fn cross_validate(seed: u64, profiles: usize, options: ProfileOptions) -> Result<Vec<CrossRow>, SpectralError> {
    let per_profile: Vec<Result<Vec<CrossRow>, SpectralError>> = (0..profiles)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, 2, i);
            let f = random_poly(&mut rng);
            let power: u32 = rng.gen_range(1..=4);
            let h = iterate(HamiltonianSpec::lifted_safe(f, power), power)?;
            let prof = ActionProfile::build(&h, options)?;
            let eb = prof.error_bound();
            let arc_a = random_arc(&mut rng, ArcSign::Minus);
            let ConormalTarget::Arc { a, b, .. } = arc_a else {
                unreachable!("random_arc returns an arc")
            };
            let arc_b = ConormalTarget::Arc {
                a,
                b,
                sign: ArcSign::Plus,
            };
            let whole_diag = persistence(&prof, &ConormalTarget::Whole)?;
            let minus_diag = persistence(&prof, &arc_a)?;
            let plus_diag = persistence(&prof, &arc_b)?;
            let cases = [
                (ConormalTarget::Whole, ClassLabel::FundamentalN, Some(whole_diag.essential_1_birth)),
                (ConormalTarget::Whole, ClassLabel::PointClass, Some(whole_diag.essential_0_birth)),
                (arc_a, ClassLabel::FundamentalN, Some(minus_diag.essential_1_birth)),
                (arc_b, ClassLabel::PointClass, Some(plus_diag.essential_0_birth)),
                (ConormalTarget::point(rng.gen_range(0.0..1.0))?, ClassLabel::FundamentalN, None),
            ];
            cases
                .into_iter()
                .map(|(t, class, pers)| {
                    let report = ell_plus(&prof, &t, class)?;
                    let difference = pers.map(|p| (report.value - p).abs());
                    Ok(CrossRow {
                        profile: i,
                        power,
                        target: t.to_string(),
                        class: class.to_string(),
                        direct: report.value,
                        persistence: pers,
                        difference,
                        error_bound: eb,
                        agrees: difference.is_none_or(|d| d <= 2.0 * eb),
                        witness_action: report.witness.action,
                        witness_distance: report.witness.distance,
                        spectral: report.spectral(SPECTRALITY_TOL),
                        step: options.step,
                    })
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::with_capacity(5 * profiles);
    for r in per_profile {
        rows.extend(r?);
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GluingFuzz {
    pub trials: usize,
    pub failures: usize,
    /// First failing tuple `(μ₁, μ₂, μ_out, μ_x, μ_y, dim M, dim N)`, rendered.
    pub first_failure: Option<String>,
    /// Trials whose pants side differs from `2·dim N − dim M`.
    pub closed_form_mismatches: usize,
}

/// The gluing identity on random half-integer gradings in `[-20, 20]` with
/// `0 ≤ dim N ≤ dim M ≤ 10`, compared with zero tolerance.
pub fn gluing_fuzz(seed: u64, trials: usize) -> GluingFuzz {
    let mut rng = rng_for(seed, 3, 0);
    let mut failures = 0;
    let mut first_failure = None;
    let mut closed_form_mismatches = 0;
    for _ in 0..trials {
        let mu: Vec<Rational64> = (0..5).map(|_| Rational64::new(rng.gen_range(-40..=40), 2)).collect();
        let dim_m = rng.gen_range(0..=10i64);
        let dim_n = rng.gen_range(0..=dim_m);
        if !verify_gluing(mu[0], mu[1], mu[2], mu[3], mu[4], dim_m, dim_n) {
            failures += 1;
            first_failure.get_or_insert_with(|| format!("{mu:?}, dim M = {dim_m}, dim N = {dim_n}"));
        }
        let s = gluing_sides(mu[0], mu[1], mu[2], mu[3], mu[4], dim_m, dim_n);
        if s.pants_side != Rational64::from_integer(2 * dim_n - dim_m) {
            closed_form_mismatches += 1;
        }
    }
    GluingFuzz {
        trials,
        failures,
        first_failure,
        closed_form_mismatches,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> ProfileOptions {
        ProfileOptions { grid: 512, step: 0.05 }
    }

    #[test]
    fn triangle_small() {
        let rows = triangle_fuzz(1, 4, opts(), 1e-5).unwrap();
        assert_eq!(rows.len(), 12);
        assert!(rows.iter().all(|r| r.holds), "{rows:?}");
        assert_eq!(rows, triangle_fuzz(1, 4, opts(), 1e-5).unwrap());
    }

    #[test]
    fn cross_validation_small() {
        let rows = cross_validate(2, 4, opts()).unwrap();
        assert_eq!(rows.len(), 20);
        assert!(rows.iter().all(|r| r.agrees && r.spectral), "{rows:?}");
    }

    #[test]
    fn gluing_small() {
        let g = gluing_fuzz(3, 500);
        assert_eq!((g.failures, g.closed_form_mismatches), (0, 0));
    }
}
