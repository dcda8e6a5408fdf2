//! The closed catalog of compactly supported Hamiltonians on `T*S¹`.
//!
//! Every catalog member is either *autonomous* (lifted Morse functions, bumps,
//! and their scalings, sums, inverses, iterates and base rescalings) or a
//! time-concatenation of autonomous pieces produced by [`compose`],
//! [`inverse`] and [`iterate`]. A spec therefore compiles to a
//! [`Schedule`]: a list of time segments, each driven by a constant multiple
//! of one autonomous generator. The flow integrator in [`flow`](mod@flow)
//! walks that schedule.

mod flow;
mod trig;

pub use flow::{
    flow, flow_iterates, time_one_map, FlowError, FlowOptions, FlowSample, FlowTrajectory,
    IterateState, DEFAULT_STEP,
};
pub(crate) use flow::Integrator;
pub use trig::{CutoffSpec, Extremum, TrigPoly, MAX_DEGREE};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{wrap_unit, PhasePoint};
use trig::bump_profile;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HamiltonianError {
    #[error("trigonometric degree {0} exceeds the cap of {MAX_DEGREE}")]
    DegreeTooHigh(usize),
    #[error("invalid trigonometric polynomial: {0}")]
    InvalidTrigPoly(String),
    #[error("invalid cutoff radii r0={r0}, r1={r1} (need 0 < r0 < r1)")]
    InvalidCutoff { r0: f64, r1: f64 },
    #[error("invalid bump: {0}")]
    InvalidBump(String),
    #[error("illegal sum: members {0} and {1} neither Poisson-commute nor have disjoint supports")]
    IllegalSum(usize, usize),
    #[error("{0} requires an autonomous Hamiltonian")]
    NotAutonomous(&'static str),
    #[error("power must be a positive integer")]
    ZeroPower,
    #[error("non-finite parameter {0}")]
    NonFinite(&'static str),
}

/// A catalog Hamiltonian. Unit-time specs generate their time-one map on
/// `t ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HamiltonianSpec {
    /// `H ≡ 0`.
    Zero,
    /// `f(q)·χ(|p|)`: the lift `f∘π` cut off outside `|p| ≤ r1`.
    Lifted { f: TrigPoly, cutoff: CutoffSpec },
    /// `A·φ(Δq/r_q)·φ((p − p₀)/r_p)` with the standard smooth bump `φ`.
    Bump {
        q0: f64,
        p0: f64,
        rq: f64,
        rp: f64,
        amplitude: f64,
    },
    Scale { s: f64, inner: Box<HamiltonianSpec> },
    /// Pointwise sum of pairwise Poisson-commuting or support-disjoint
    /// autonomous members.
    Sum { terms: Vec<HamiltonianSpec> },
    /// Generates `φ_left ∘ φ_right`: `right` runs first on `[0, ½]`, `left`
    /// on `[½, 1]`, both at double speed.
    Compose {
        left: Box<HamiltonianSpec>,
        right: Box<HamiltonianSpec>,
    },
    /// Generates `φ⁻¹` through `-H(z, 1 - t)`.
    Inverse { inner: Box<HamiltonianSpec> },
    /// Generates `φⁿ` by running `inner` `n` times at `n`-fold speed.
    Iterate { inner: Box<HamiltonianSpec>, n: u32 },
    /// `H(n·q mod 1, p)`.
    ViterboRescale { inner: Box<HamiltonianSpec>, n: u32 },
}

impl HamiltonianSpec {
    pub fn lifted(f: TrigPoly, cutoff: CutoffSpec) -> Self {
        HamiltonianSpec::Lifted { f, cutoff }
    }

    /// Lifted `f` with the cutoff pushed out of reach of the first `n_max`
    /// iterates started on the zero section.
    pub fn lifted_safe(f: TrigPoly, n_max: u32) -> Self {
        let cutoff = CutoffSpec::safe_for(n_max as f64 * f.slope_bound());
        HamiltonianSpec::Lifted { f, cutoff }
    }

    pub fn bump(q0: f64, p0: f64, rq: f64, rp: f64, amplitude: f64) -> Result<Self, HamiltonianError> {
        let b = HamiltonianSpec::Bump {
            q0,
            p0,
            rq,
            rp,
            amplitude,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn scale(s: f64, inner: HamiltonianSpec) -> Self {
        HamiltonianSpec::Scale {
            s,
            inner: Box::new(inner),
        }
    }

    pub fn sum(terms: Vec<HamiltonianSpec>) -> Result<Self, HamiltonianError> {
        let s = HamiltonianSpec::Sum { terms };
        s.validate()?;
        Ok(s)
    }

    /// Structural checks for the whole tree.
    pub fn validate(&self) -> Result<(), HamiltonianError> {
        use HamiltonianSpec::*;
        match self {
            Zero => Ok(()),
            Lifted { f, cutoff } => {
                if f.degree() > MAX_DEGREE {
                    return Err(HamiltonianError::DegreeTooHigh(f.degree()));
                }
                cutoff.validate()
            }
            Bump {
                q0,
                p0,
                rq,
                rp,
                amplitude,
            } => {
                if ![*q0, *p0, *rq, *rp, *amplitude].iter().all(|v| v.is_finite()) {
                    return Err(HamiltonianError::NonFinite("bump parameter"));
                }
                if !(*rq > 0.0 && *rq <= 0.5) {
                    return Err(HamiltonianError::InvalidBump(format!(
                        "base radius {rq} outside (0, 1/2]"
                    )));
                }
                if !(*rp > 0.0) {
                    return Err(HamiltonianError::InvalidBump(format!(
                        "fiber radius {rp} must be positive"
                    )));
                }
                Ok(())
            }
            Scale { s, inner } => {
                if !s.is_finite() {
                    return Err(HamiltonianError::NonFinite("scale factor"));
                }
                inner.validate()
            }
            Sum { terms } => {
                for t in terms {
                    t.validate()?;
                    if !t.is_autonomous() {
                        return Err(HamiltonianError::NotAutonomous("sum member"));
                    }
                }
                for i in 0..terms.len() {
                    for j in i + 1..terms.len() {
                        let commute = terms[i].is_base_only() && terms[j].is_base_only();
                        if !commute && !supports_disjoint(&terms[i], &terms[j]) {
                            return Err(HamiltonianError::IllegalSum(i, j));
                        }
                    }
                }
                Ok(())
            }
            Compose { left, right } => {
                left.validate()?;
                right.validate()
            }
            Inverse { inner } => inner.validate(),
            Iterate { inner, n } => {
                if *n == 0 {
                    return Err(HamiltonianError::ZeroPower);
                }
                inner.validate()
            }
            ViterboRescale { inner, n } => {
                if *n == 0 {
                    return Err(HamiltonianError::ZeroPower);
                }
                if !inner.is_autonomous() {
                    return Err(HamiltonianError::NotAutonomous("Viterbo rescaling"));
                }
                inner.validate()
            }
        }
    }

    pub fn is_autonomous(&self) -> bool {
        use HamiltonianSpec::*;
        match self {
            Zero | Lifted { .. } | Bump { .. } => true,
            Sum { terms } => terms.iter().all(|t| t.is_autonomous()),
            Scale { inner, .. }
            | Inverse { inner }
            | Iterate { inner, .. }
            | ViterboRescale { inner, .. } => inner.is_autonomous(),
            Compose { .. } => false,
        }
    }

    /// True when, on the region where every cutoff is identically one, the
    /// Hamiltonian depends on the base coordinate only. Any two such specs
    /// Poisson-commute there.
    pub fn is_base_only(&self) -> bool {
        use HamiltonianSpec::*;
        match self {
            Zero | Lifted { .. } => true,
            Bump { .. } | Compose { .. } => false,
            Sum { terms } => terms.iter().all(|t| t.is_base_only()),
            Scale { inner, .. }
            | Inverse { inner }
            | Iterate { inner, .. }
            | ViterboRescale { inner, .. } => inner.is_base_only(),
        }
    }

    /// Closed interval of fiber values outside of which the Hamiltonian vanishes,
    /// or `None` when it vanishes identically.
    pub fn fiber_support(&self) -> Option<(f64, f64)> {
        use HamiltonianSpec::*;
        let hull = |a: Option<(f64, f64)>, b: Option<(f64, f64)>| match (a, b) {
            (Some(x), Some(y)) => Some((x.0.min(y.0), x.1.max(y.1))),
            (x, None) | (None, x) => x,
        };
        match self {
            Zero => None,
            Lifted { cutoff, .. } => Some((-cutoff.r1, cutoff.r1)),
            Bump {
                p0, rp, amplitude, ..
            } => (*amplitude != 0.0).then_some((p0 - rp, p0 + rp)),
            Scale { s, inner } => {
                if *s == 0.0 {
                    None
                } else {
                    inner.fiber_support()
                }
            }
            Sum { terms } => terms.iter().map(|t| t.fiber_support()).fold(None, hull),
            Compose { left, right } => hull(left.fiber_support(), right.fiber_support()),
            Inverse { inner } | Iterate { inner, .. } | ViterboRescale { inner, .. } => {
                inner.fiber_support()
            }
        }
    }

    /// Upper bound on the fiber drift `|Δp|` of one unit-time run caused by
    /// the lifted members, ignoring bumps.
    pub fn base_slope_budget(&self) -> f64 {
        use HamiltonianSpec::*;
        match self {
            Zero | Bump { .. } => 0.0,
            Lifted { f, .. } => f.slope_bound(),
            Scale { s, inner } => s.abs() * inner.base_slope_budget(),
            Sum { terms } => terms.iter().map(|t| t.base_slope_budget()).sum(),
            Compose { left, right } => left.base_slope_budget() + right.base_slope_budget(),
            Inverse { inner } => inner.base_slope_budget(),
            Iterate { inner, n } | ViterboRescale { inner, n } => *n as f64 * inner.base_slope_budget(),
        }
    }

    /// Copy with every lifted cutoff widened (never narrowed) so that `n`
    /// runs started on the zero section stay where all cutoffs equal one.
    pub fn with_safe_cutoffs(&self, n: u32) -> HamiltonianSpec {
        let need = CutoffSpec::safe_for(n as f64 * self.base_slope_budget());
        self.widen_cutoffs(need)
    }

    fn widen_cutoffs(&self, need: CutoffSpec) -> HamiltonianSpec {
        use HamiltonianSpec::*;
        let b = |h: &HamiltonianSpec| Box::new(h.widen_cutoffs(need));
        match self {
            Zero | Bump { .. } => self.clone(),
            Lifted { f, cutoff } => Lifted {
                f: f.clone(),
                cutoff: if cutoff.r0 >= need.r0 { *cutoff } else { need },
            },
            Scale { s, inner } => Scale { s: *s, inner: b(inner) },
            Sum { terms } => Sum {
                terms: terms.iter().map(|t| t.widen_cutoffs(need)).collect(),
            },
            Compose { left, right } => Compose {
                left: b(left),
                right: b(right),
            },
            Inverse { inner } => Inverse { inner: b(inner) },
            Iterate { inner, n } => Iterate { inner: b(inner), n: *n },
            ViterboRescale { inner, n } => ViterboRescale { inner: b(inner), n: *n },
        }
    }

    /// Autonomous value and gradient `(H, ∂H/∂q, ∂H/∂p)` at `(q, p)`, with `q`
    /// any real lift of the base point.
    ///
    /// Only meaningful for autonomous specs; composites are evaluated through
    /// their [`Schedule`].
    #[inline]
    pub(crate) fn eval_autonomous(&self, q: f64, p: f64) -> (f64, f64, f64) {
        use HamiltonianSpec::*;
        match self {
            Zero => (0.0, 0.0, 0.0),
            Lifted { f, cutoff } => {
                let (chi, dchi) = cutoff.eval_d1(p);
                if chi == 0.0 {
                    return (0.0, 0.0, 0.0);
                }
                let (fv, df) = f.eval_d1(q);
                (fv * chi, df * chi, fv * dchi)
            }
            Bump {
                q0,
                p0,
                rq,
                rp,
                amplitude,
            } => {
                if *amplitude == 0.0 {
                    return (0.0, 0.0, 0.0);
                }
                let (bp, dbp) = bump_profile((p - p0) / rp);
                if bp == 0.0 {
                    return (0.0, 0.0, 0.0);
                }
                let dq = wrap_unit(q - q0 + 0.5) - 0.5;
                let (bq, dbq) = bump_profile(dq / rq);
                (
                    amplitude * bq * bp,
                    amplitude * dbq / rq * bp,
                    amplitude * bq * dbp / rp,
                )
            }
            Scale { s, inner } => {
                let (h, a, b) = inner.eval_autonomous(q, p);
                (s * h, s * a, s * b)
            }
            Sum { terms } => terms.iter().fold((0.0, 0.0, 0.0), |acc, t| {
                let (h, a, b) = t.eval_autonomous(q, p);
                (acc.0 + h, acc.1 + a, acc.2 + b)
            }),
            Inverse { inner } => {
                let (h, a, b) = inner.eval_autonomous(q, p);
                (-h, -a, -b)
            }
            Iterate { inner, n } => {
                let k = *n as f64;
                let (h, a, b) = inner.eval_autonomous(q, p);
                (k * h, k * a, k * b)
            }
            ViterboRescale { inner, n } => {
                let k = *n as f64;
                let (h, a, b) = inner.eval_autonomous(k * q, p);
                (h, k * a, b)
            }
            Compose { .. } => unreachable!("composite specs are evaluated through their schedule"),
        }
    }

    /// Flattens the Hamiltonian into autonomous time segments covering `[0, 1]`.
    pub fn schedule(&self) -> Schedule<'_> {
        let mut segments = Vec::new();
        self.push_segments(1.0, 1.0, false, &mut segments);
        // Merge neighbours driven by the same generator at the same speed.
        let mut merged: Vec<Segment<'_>> = Vec::with_capacity(segments.len());
        for seg in segments {
            match merged.last_mut() {
                Some(last)
                    if std::ptr::eq(last.generator, seg.generator) && last.speed == seg.speed =>
                {
                    last.duration += seg.duration;
                }
                _ => merged.push(seg),
            }
        }
        Schedule { segments: merged }
    }

    fn push_segments<'a>(
        &'a self,
        duration: f64,
        speed: f64,
        reversed: bool,
        out: &mut Vec<Segment<'a>>,
    ) {
        use HamiltonianSpec::*;
        if self.is_autonomous() {
            out.push(Segment {
                duration,
                speed,
                generator: self,
            });
            return;
        }
        match self {
            Scale { s, inner } => inner.push_segments(duration, speed * s, reversed, out),
            Compose { left, right } => {
                let (first, second) = if reversed {
                    (left, right)
                } else {
                    (right, left)
                };
                first.push_segments(duration / 2.0, speed * 2.0, reversed, out);
                second.push_segments(duration / 2.0, speed * 2.0, reversed, out);
            }
            Inverse { inner } => inner.push_segments(duration, -speed, !reversed, out),
            Iterate { inner, n } => {
                let k = *n as f64;
                for _ in 0..*n {
                    inner.push_segments(duration / k, speed * k, reversed, out);
                }
            }
            // Sums and rescalings only take autonomous members (checked in validate).
            Sum { .. } | ViterboRescale { .. } | Zero | Lifted { .. } | Bump { .. } => {
                unreachable!("autonomous specs handled above")
            }
        }
    }
}

/// One autonomous piece of a schedule: on a window of length `duration` the
/// generator is `speed · generator`.
#[derive(Debug, Clone, Copy)]
pub struct Segment<'a> {
    pub duration: f64,
    pub speed: f64,
    pub generator: &'a HamiltonianSpec,
}

#[derive(Debug, Clone)]
pub struct Schedule<'a> {
    pub segments: Vec<Segment<'a>>,
}

impl<'a> Schedule<'a> {
    /// Segment active at unit time `t` (right-continuous; `t = 1` maps to
    /// the last segment).
    pub fn segment_at(&self, t: f64) -> &Segment<'a> {
        let mut start = 0.0;
        for seg in &self.segments {
            if t < start + seg.duration {
                return seg;
            }
            start += seg.duration;
        }
        self.segments.last().expect("schedules are never empty")
    }
}

fn supports_disjoint(a: &HamiltonianSpec, b: &HamiltonianSpec) -> bool {
    match (a.fiber_support(), b.fiber_support()) {
        (Some(x), Some(y)) => x.1 <= y.0 || y.1 <= x.0,
        _ => true,
    }
}

/// `H(z, t)` for a unit-time spec.
pub fn evaluate(spec: &HamiltonianSpec, z: PhasePoint, t: f64) -> f64 {
    let schedule = spec.schedule();
    let seg = schedule.segment_at(t);
    seg.speed * seg.generator.eval_autonomous(z.q.value(), z.p).0
}

/// Spec generating `φ_H ∘ φ_K`.
/// The identity factor is dropped: `compose(0, K)` is `K`.
pub fn compose(h: HamiltonianSpec, k: HamiltonianSpec) -> HamiltonianSpec {
    match (h, k) {
        (HamiltonianSpec::Zero, k) => k,
        (h, HamiltonianSpec::Zero) => h,
        (h, k) => HamiltonianSpec::Compose {
            left: Box::new(h),
            right: Box::new(k),
        },
    }
}

/// Spec generating `φ_H⁻¹`.
pub fn inverse(h: HamiltonianSpec) -> HamiltonianSpec {
    match h {
        HamiltonianSpec::Zero => HamiltonianSpec::Zero,
        h => HamiltonianSpec::Inverse { inner: Box::new(h) },
    }
}

/// Spec generating `φ_Hⁿ`; `iterate(H, 1)` is `H` itself.
pub fn iterate(h: HamiltonianSpec, n: u32) -> Result<HamiltonianSpec, HamiltonianError> {
    match n {
        0 => Err(HamiltonianError::ZeroPower),
        1 => Ok(h),
        _ => Ok(HamiltonianSpec::Iterate {
            inner: Box::new(h),
            n,
        }),
    }
}

/// `Hₙ(q, p) = H(n·q, p)`; `viterbo_rescale(H, 1)` is `H` itself.
pub fn viterbo_rescale(h: HamiltonianSpec, n: u32) -> Result<HamiltonianSpec, HamiltonianError> {
    if n == 0 {
        return Err(HamiltonianError::ZeroPower);
    }
    if !h.is_autonomous() {
        return Err(HamiltonianError::NotAutonomous("Viterbo rescaling"));
    }
    Ok(if n == 1 {
        h
    } else {
        HamiltonianSpec::ViterboRescale {
            inner: Box::new(h),
            n,
        }
    })
}

/// Radius `R` with `H ≡ 0` outside `|p| ≤ R`.
pub fn support_radius(spec: &HamiltonianSpec) -> f64 {
    spec.fiber_support()
        .map(|(lo, hi)| lo.abs().max(hi.abs()))
        .unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cos_lifted() -> HamiltonianSpec {
        HamiltonianSpec::lifted(TrigPoly::cosine(), CutoffSpec::new(10.0, 12.0).unwrap())
    }

    fn pt(q: f64, p: f64) -> PhasePoint {
        PhasePoint::new(q, p).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert!((evaluate(&cos_lifted(), pt(0.5, 0.0), 0.0) + 1.0).abs() < 1e-15);
        let zero_bump = HamiltonianSpec::bump(0.3, 0.0, 0.2, 1.0, 0.0).unwrap();
        assert_eq!(evaluate(&zero_bump, pt(0.3, 0.0), 0.4), 0.0);
        let scaled = HamiltonianSpec::scale(2.0, cos_lifted());
        assert_eq!(evaluate(&scaled, pt(0.0, 0.0), 0.0), 2.0);
        // Lifted equals f on |p| <= r0.
        assert_eq!(evaluate(&cos_lifted(), pt(0.0, 9.5), 0.7), 1.0);
        assert_eq!(evaluate(&cos_lifted(), pt(0.0, 12.5), 0.7), 0.0);
    }

    #[test]
    fn composite_evaluation_follows_schedule() {
        let g = HamiltonianSpec::lifted(
            TrigPoly::constant(3.0),
            CutoffSpec::new(10.0, 12.0).unwrap(),
        );
        let c = compose(cos_lifted(), g);
        // Right factor first, at double speed.
        assert_eq!(evaluate(&c, pt(0.0, 0.0), 0.2), 6.0);
        assert_eq!(evaluate(&c, pt(0.0, 0.0), 0.7), 2.0);
        let inv = inverse(c);
        assert_eq!(evaluate(&inv, pt(0.0, 0.0), 0.2), -2.0);
        assert_eq!(evaluate(&inv, pt(0.0, 0.0), 0.7), -6.0);
    }

    #[test]
    fn support_radius_examples() {
        let lifted = HamiltonianSpec::lifted(TrigPoly::cosine(), CutoffSpec::new(5.0, 12.0).unwrap());
        assert_eq!(support_radius(&lifted), 12.0);
        let bump = HamiltonianSpec::bump(0.2, 20.0, 0.1, 1.0, 1.0).unwrap();
        assert_eq!(support_radius(&bump), 21.0);
        let sum = HamiltonianSpec::sum(vec![lifted, bump]).unwrap();
        assert_eq!(support_radius(&sum), 21.0);
        assert_eq!(support_radius(&HamiltonianSpec::Zero), 0.0);
    }

    #[test]
    fn sum_legality() {
        let l1 = cos_lifted();
        let l2 = HamiltonianSpec::lifted(TrigPoly::constant(1.0), CutoffSpec::new(1.0, 2.0).unwrap());
        assert!(HamiltonianSpec::sum(vec![l1.clone(), l2]).is_ok());
        let overlapping = HamiltonianSpec::bump(0.2, 3.0, 0.1, 1.0, 1.0).unwrap();
        assert_eq!(
            HamiltonianSpec::sum(vec![l1.clone(), overlapping]),
            Err(HamiltonianError::IllegalSum(0, 1))
        );
        let far = HamiltonianSpec::bump(0.2, 14.0, 0.1, 1.0, 1.0).unwrap();
        assert!(HamiltonianSpec::sum(vec![l1.clone(), far]).is_ok());
        let composite = compose(l1.clone(), l1);
        assert!(matches!(
            HamiltonianSpec::sum(vec![composite]),
            Err(HamiltonianError::NotAutonomous(_))
        ));
    }

    #[test]
    fn operator_edge_cases() {
        assert_eq!(iterate(cos_lifted(), 1).unwrap(), cos_lifted());
        assert_eq!(viterbo_rescale(cos_lifted(), 1).unwrap(), cos_lifted());
        assert_eq!(iterate(cos_lifted(), 0), Err(HamiltonianError::ZeroPower));
        assert!(matches!(
            viterbo_rescale(compose(cos_lifted(), cos_lifted()), 3),
            Err(HamiltonianError::NotAutonomous(_))
        ));
        assert!(HamiltonianSpec::bump(0.0, 0.0, 0.7, 1.0, 1.0).is_err());
        assert_eq!(compose(HamiltonianSpec::Zero, cos_lifted()), cos_lifted());
        assert_eq!(inverse(HamiltonianSpec::Zero), HamiltonianSpec::Zero);
    }

    #[test]
    fn schedule_shapes() {
        let h = cos_lifted();
        let with_idle = HamiltonianSpec::Compose {
            left: Box::new(h.clone()),
            right: Box::new(HamiltonianSpec::Zero),
        };
        let it = iterate(with_idle.clone(), 3).unwrap();
        let sched = it.schedule();
        assert_eq!(sched.segments.len(), 6);
        let total: f64 = sched.segments.iter().map(|s| s.duration).sum();
        assert!((total - 1.0).abs() < 1e-15);
        assert!(sched.segments.iter().all(|s| s.speed == 6.0));
        // Iterate of an autonomous spec stays a single segment.
        assert_eq!(iterate(h.clone(), 7).unwrap().schedule().segments.len(), 1);
        // Inverse of a composite reverses the order and the sign.
        let inv = inverse(with_idle);
        let s = inv.schedule();
        assert!(matches!(s.segments[0].generator, HamiltonianSpec::Lifted { .. }));
        assert_eq!(s.segments[0].speed, -2.0);
        assert!(matches!(s.segments[1].generator, HamiltonianSpec::Zero));
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = compose(
            HamiltonianSpec::lifted_safe(TrigPoly::cosine(), 4),
            inverse(HamiltonianSpec::bump(0.1, 30.0, 0.2, 1.0, 2.0).unwrap()),
        );
        let json = serde_json::to_string(&spec).unwrap();
        let back: HamiltonianSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        assert!(serde_json::from_str::<HamiltonianSpec>(r#"{"kind":"scale","s":1,"inner":{"kind":"zero"},"extra":1}"#).is_err());
    }

    #[test]
    fn safe_cutoffs_widen_only() {
        let narrow = HamiltonianSpec::lifted(TrigPoly::cosine(), CutoffSpec::new(2.0, 3.0).unwrap());
        let spec = compose(narrow.clone(), HamiltonianSpec::scale(2.0, narrow));
        let budget = spec.base_slope_budget();
        assert!((budget - 6.0 * std::f64::consts::PI).abs() < 1e-12);
        let wide = spec.with_safe_cutoffs(3);
        match wide {
            HamiltonianSpec::Compose { left, .. } => match *left {
                HamiltonianSpec::Lifted { cutoff, .. } => assert!((cutoff.r0 - (1.0 + 3.0 * budget)).abs() < 1e-12),
                _ => unreachable!(),
            },
            _ => unreachable!(),
        }
        let huge = HamiltonianSpec::lifted(TrigPoly::cosine(), CutoffSpec::new(500.0, 501.0).unwrap());
        assert_eq!(huge.with_safe_cutoffs(2), huge);
    }
}
