//! Spectral numbers `ℓ(α; o_M, ν*N : H)` read off graphical action profiles.
//!
//! For a graphical image `φ(o_M) = graph(−dŜ)` the filtered Floer theory of
//! the pair `(o_M, ν*N)` reduces to Morse theory of `Ŝ` restricted to `N`, so
//! spectral numbers are extrema of `Ŝ`. The [`persistence`] module computes
//! the same minimax values through a sublevel filtration, independently of
//! the extremum search.

pub mod persistence;
mod profile;

pub use persistence::{persistence, PersistenceDiagram};
pub use profile::{ActionProfile, Primitive, ProfileOptions, DEFAULT_GRID, GRAPHICAL_MARGIN, REFINE_TOL};

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{wrap_unit, ArcSign, BasePoint, ClassLabel, ConormalTarget, GeometryError, PhasePoint};
use crate::hamiltonian::{compose, FlowError, HamiltonianError, HamiltonianSpec, IterateState};

/// Default tolerance of the spectrality check.
pub const SPECTRALITY_TOL: f64 = 1e-5;
/// Slack on the endpoint sign condition of arc targets.
const BOUNDARY_SLACK: f64 = 1e-9;
/// Critical brackets refined when searching for a witness.
const WITNESS_CANDIDATES: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("grid size {0} too small (need at least 8 seeds)")]
    InvalidGrid(usize),
    #[error("oracle unavailable: image of the zero section under power {power} is not graphical")]
    OracleUnavailable { power: usize },
    #[error("flow failed at power {power}: {source}")]
    Flow { power: usize, source: FlowError },
    #[error(transparent)]
    Integrator(#[from] FlowError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("class {class} is not exposed on target {target}")]
    UnsupportedCombination { target: String, class: ClassLabel },
    #[error("persistence needs a Whole or Arc target, got {0}")]
    UnsupportedTarget(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    DirectExtremum,
    Persistence,
}

/// Closest actual Hamiltonian chord from `o_M` to `ν*N` found for a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralWitness {
    pub action: f64,
    pub distance: f64,
    pub location: PhasePoint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub value: f64,
    pub target: ConormalTarget,
    pub class_label: ClassLabel,
    pub witness: SpectralWitness,
    pub graphical: bool,
    pub method: Method,
    pub error_bound: f64,
}

impl SpectralReport {
    pub fn spectral(&self, tol: f64) -> bool {
        self.witness.distance <= tol
    }
}

/// The class used by `ℓ₊^N`: `[N]` for points, the circle and `−` arcs, the
/// point class for `+` arcs.
pub fn plus_class(target: &ConormalTarget) -> ClassLabel {
    match target {
        ConormalTarget::Arc {
            sign: ArcSign::Plus, ..
        } => ClassLabel::PointClass,
        _ => ClassLabel::FundamentalN,
    }
}

/// Classes with an exposed spectral number on `target`.
pub fn supported_classes(target: &ConormalTarget) -> &'static [ClassLabel] {
    match target {
        ConormalTarget::Point { .. } | ConormalTarget::Whole => {
            &[ClassLabel::FundamentalN, ClassLabel::PointClass]
        }
        ConormalTarget::Arc {
            sign: ArcSign::Minus, ..
        } => &[ClassLabel::FundamentalN],
        ConormalTarget::Arc { sign: ArcSign::Plus, .. } => &[ClassLabel::PointClass],
    }
}

/// `ℓ(class; o_M, ν*N : H)` by direct extremum search on `Ŝ`.
pub fn ell_plus(
    profile: &ActionProfile,
    target: &ConormalTarget,
    class_label: ClassLabel,
) -> Result<SpectralReport, SpectralError> {
    let value = spectral_value(profile, target, class_label)?;
    let witness = witness(profile, target, value)?;
    Ok(SpectralReport {
        value,
        target: *target,
        class_label,
        witness,
        graphical: true,
        method: Method::DirectExtremum,
        error_bound: profile.error_bound(),
    })
}

/// The value of [`ell_plus`] without the witness search (no re-flows).
pub fn spectral_value(
    profile: &ActionProfile,
    target: &ConormalTarget,
    class_label: ClassLabel,
) -> Result<f64, SpectralError> {
    target.validate()?;
    let prim = profile.require_primitive()?;
    if !supported_classes(target).contains(&class_label) {
        return Err(SpectralError::UnsupportedCombination {
            target: target.to_string(),
            class: class_label,
        });
    }
    Ok(match target {
        ConormalTarget::Point { x } => prim.eval(x.value()),
        ConormalTarget::Whole => match class_label {
            ClassLabel::FundamentalN => prim.max().1,
            ClassLabel::PointClass => prim.min().1,
        },
        ConormalTarget::Arc { a, b, .. } => {
            let lo = a.value();
            let hi = lo + a.ccw_offset_to(*b);
            prim.extremum(lo, hi, class_label == ClassLabel::FundamentalN).1
        }
    })
}

/// `ℓ₊^N`, the spectral number of the class returned by [`plus_class`].
pub fn ell_plus_default(profile: &ActionProfile, target: &ConormalTarget) -> Result<SpectralReport, SpectralError> {
    ell_plus(profile, target, plus_class(target))
}

fn to_witness(state: IterateState, value: f64) -> Result<SpectralWitness, SpectralError> {
    Ok(SpectralWitness {
        action: state.action,
        distance: (state.action - value).abs(),
        location: PhasePoint::new(state.q_lift, state.p)?,
    })
}

/// Re-flows seeds to locate actual chords: the fiber intersection for a
/// point target, refined critical points of `Ŝ` (plus admissible endpoint
/// chords for arcs) otherwise. The chord whose action is closest wins.
fn witness(profile: &ActionProfile, target: &ConormalTarget, value: f64) -> Result<SpectralWitness, SpectralError> {
    if let ConormalTarget::Point { x } = target {
        return to_witness(profile.fiber_intersection(x.value())?, value);
    }
    let mut candidates: Vec<IterateState> = Vec::new();
    let mut brackets = profile.critical_brackets();
    let actions = profile.actions();
    brackets.sort_by(|l, r| {
        let dl = (actions[l.0] - value).abs();
        let dr = (actions[r.0] - value).abs();
        dl.total_cmp(&dr)
    });
    for bracket in brackets {
        if candidates.len() >= WITNESS_CANDIDATES {
            break;
        }
        let state = profile.refine_critical(bracket)?;
        let inside = target.contains(BasePoint::new(wrap_unit(state.q_lift))?, 1e-12)?;
        if inside {
            candidates.push(state);
        }
    }
    if let ConormalTarget::Arc { a, b, sign } = target {
        let (a_ok, b_ok): (fn(f64) -> bool, fn(f64) -> bool) = match sign {
            ArcSign::Minus => (|p| p >= -BOUNDARY_SLACK, |p| p <= BOUNDARY_SLACK),
            ArcSign::Plus => (|p| p <= BOUNDARY_SLACK, |p| p >= -BOUNDARY_SLACK),
        };
        let sa = profile.fiber_intersection(a.value())?;
        if a_ok(sa.p) {
            candidates.push(sa);
        }
        let sb = profile.fiber_intersection(b.value())?;
        if b_ok(sb.p) {
            candidates.push(sb);
        }
    }
    if candidates.is_empty() {
        // No sign change anywhere: fall back to the seed nearest in action.
        let best = (0..actions.len())
            .min_by(|&i, &j| (actions[i] - value).abs().total_cmp(&(actions[j] - value).abs()))
            .expect("non-empty grid");
        candidates.push(profile.flow_seed(profile.seed(best))?);
    }
    let best = candidates
        .into_iter()
        .min_by(|l, r| (l.action - value).abs().total_cmp(&(r.action - value).abs()))
        .expect("non-empty candidates");
    to_witness(best, value)
}

/// Outcome of one triangle-inequality check
/// `ℓ₊^N(φψ) ≤ ℓ₊^M(φ) + ℓ₊^N(ψ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TriangleReport {
    pub target: ConormalTarget,
    pub composite: f64,
    pub whole_h: f64,
    pub target_k: f64,
    pub margin: f64,
    pub holds: bool,
}

pub fn check_triangle(
    h: &HamiltonianSpec,
    k: &HamiltonianSpec,
    target: &ConormalTarget,
    tol: f64,
    options: ProfileOptions,
) -> Result<TriangleReport, SpectralError> {
    let hk = compose(h.clone(), k.clone());
    let p_hk = ActionProfile::build(&hk, options)?;
    let p_h = ActionProfile::build(h, options)?;
    let p_k = ActionProfile::build(k, options)?;
    triangle_from_profiles(&p_hk, &p_h, &p_k, target, tol)
}

/// Triangle check from prebuilt profiles of `φψ`, `φ` and `ψ`.
pub fn triangle_from_profiles(
    composite: &ActionProfile,
    h: &ActionProfile,
    k: &ActionProfile,
    target: &ConormalTarget,
    tol: f64,
) -> Result<TriangleReport, SpectralError> {
    let lhs = spectral_value(composite, target, plus_class(target))?;
    let whole_h = spectral_value(h, &ConormalTarget::Whole, ClassLabel::FundamentalN)?;
    let target_k = spectral_value(k, target, plus_class(target))?;
    let margin = whole_h + target_k - lhs;
    Ok(TriangleReport {
        target: *target,
        composite: lhs,
        whole_h,
        target_k,
        margin,
        holds: margin >= -tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassBoundEntry {
    pub class_label: ClassLabel,
    pub value: f64,
    pub holds: bool,
}

/// Outcome of `ℓ(β; o_M, ν*N : H) ≤ ℓ([M]; o_M, o_M : H)` over every exposed
/// class `β`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassBoundReport {
    pub target: ConormalTarget,
    pub bound: f64,
    pub entries: Vec<ClassBoundEntry>,
    pub holds: bool,
}

pub fn check_class_bound(
    h: &HamiltonianSpec,
    target: &ConormalTarget,
    tol: f64,
    options: ProfileOptions,
) -> Result<ClassBoundReport, SpectralError> {
    let profile = ActionProfile::build(h, options)?;
    class_bound_from_profile(&profile, target, tol)
}

pub fn class_bound_from_profile(
    profile: &ActionProfile,
    target: &ConormalTarget,
    tol: f64,
) -> Result<ClassBoundReport, SpectralError> {
    let bound = spectral_value(profile, &ConormalTarget::Whole, ClassLabel::FundamentalN)?;
    let entries = supported_classes(target)
        .iter()
        .map(|&c| {
            let value = spectral_value(profile, target, c)?;
            Ok(ClassBoundEntry {
                class_label: c,
                value,
                holds: value <= bound + tol,
            })
        })
        .collect::<Result<Vec<_>, SpectralError>>()?;
    let holds = entries.iter().all(|e| e.holds);
    Ok(ClassBoundReport {
        target: *target,
        bound,
        entries,
        holds,
    })
}
