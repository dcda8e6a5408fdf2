//! Circle arithmetic, phase-space points and conormal targets.
//!
//! The circle is modelled as `[0, 1)` with mod-1 arithmetic. A point of the
//! cotangent bundle `T*S¹` is a base angle together with a fiber coordinate.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("non-finite coordinate {0}")]
    NonFinite(f64),
    #[error("degenerate arc: endpoints coincide at {0}")]
    DegenerateArc(f64),
    #[error("negative tolerance {0}")]
    NegativeTolerance(f64),
}

/// A point of `S¹ = [0,1]/{0,1}`, always reduced into `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct BasePoint(f64);

impl BasePoint {
    pub const ZERO: BasePoint = BasePoint(0.0);

    pub fn new(x: f64) -> Result<Self, GeometryError> {
        circle_reduce(x)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Wraparound distance, at most `1/2`.
    pub fn distance(self, other: BasePoint) -> f64 {
        let d = (self.0 - other.0).abs();
        d.min(1.0 - d)
    }

    /// Counterclockwise offset from `self` to `other`, in `[0, 1)`.
    pub fn ccw_offset_to(self, other: BasePoint) -> f64 {
        wrap_unit(other.0 - self.0)
    }

    pub fn rotate(self, offset: f64) -> BasePoint {
        BasePoint(wrap_unit(self.0 + offset))
    }
}

impl TryFrom<f64> for BasePoint {
    type Error = GeometryError;

    fn try_from(x: f64) -> Result<Self, Self::Error> {
        circle_reduce(x)
    }
}

impl From<BasePoint> for f64 {
    fn from(q: BasePoint) -> f64 {
        q.0
    }
}

impl fmt::Display for BasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Reduces a finite real mod 1 into `[0, 1)`.
pub fn circle_reduce(x: f64) -> Result<BasePoint, GeometryError> {
    if !x.is_finite() {
        return Err(GeometryError::NonFinite(x));
    }
    Ok(BasePoint(wrap_unit(x)))
}

// rem_euclid can round up to exactly 1.0 for tiny negative inputs.
pub(crate) fn wrap_unit(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub q: BasePoint,
    pub p: f64,
}

impl PhasePoint {
    pub fn new(q: f64, p: f64) -> Result<Self, GeometryError> {
        if !p.is_finite() {
            return Err(GeometryError::NonFinite(p));
        }
        Ok(Self {
            q: circle_reduce(q)?,
            p,
        })
    }

    pub fn on_zero_section(q: BasePoint) -> Self {
        Self { q, p: 0.0 }
    }
}

/// Boundary convention of an arc target: the half-fibers over the endpoints
/// satisfying `±p(n) ≤ 0` for the inner normal `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArcSign {
    Plus,
    Minus,
}

impl fmt::Display for ArcSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArcSign::Plus => f.write_str("+"),
            ArcSign::Minus => f.write_str("-"),
        }
    }
}

/// The submanifold `N ⊂ S¹` whose conormal bundle is the second boundary
/// condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ConormalTarget {
    Point { x: BasePoint },
    Whole,
    /// Closed arc traversed counterclockwise from `a` to `b`.
    Arc {
        a: BasePoint,
        b: BasePoint,
        sign: ArcSign,
    },
}

impl ConormalTarget {
    pub fn point(x: f64) -> Result<Self, GeometryError> {
        Ok(ConormalTarget::Point { x: circle_reduce(x)? })
    }

    pub fn arc(a: f64, b: f64, sign: ArcSign) -> Result<Self, GeometryError> {
        let a = circle_reduce(a)?;
        let b = circle_reduce(b)?;
        if a == b {
            return Err(GeometryError::DegenerateArc(a.value()));
        }
        Ok(ConormalTarget::Arc { a, b, sign })
    }

    /// Rejects arcs whose endpoints coincide; needed after deserialization.
    pub fn validate(&self) -> Result<(), GeometryError> {
        match self {
            ConormalTarget::Arc { a, b, .. } if a == b => {
                Err(GeometryError::DegenerateArc(a.value()))
            }
            _ => Ok(()),
        }
    }

    /// Counterclockwise length of an arc; `None` for other targets.
    pub fn arc_length(&self) -> Option<f64> {
        match self {
            ConormalTarget::Arc { a, b, .. } => Some(a.ccw_offset_to(*b)),
            _ => None,
        }
    }

    pub fn contains(&self, x: BasePoint, tol: f64) -> Result<bool, GeometryError> {
        if !(tol >= 0.0) {
            return Err(GeometryError::NegativeTolerance(tol));
        }
        Ok(match self {
            ConormalTarget::Whole => true,
            ConormalTarget::Point { x: y } => y.distance(x) <= tol,
            ConormalTarget::Arc { a, b, .. } => {
                let len = a.ccw_offset_to(*b);
                let off = a.ccw_offset_to(x);
                off <= len || off >= 1.0 - tol || off - len <= tol
            }
        })
    }

    /// Short tag used in tables: `point`, `whole`, `arc-` or `arc+`.
    pub fn kind_tag(&self) -> String {
        match self {
            ConormalTarget::Point { .. } => "point".into(),
            ConormalTarget::Whole => "whole".into(),
            ConormalTarget::Arc { sign, .. } => format!("arc{sign}"),
        }
    }
}

impl fmt::Display for ConormalTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConormalTarget::Point { x } => write!(f, "Point({x})"),
            ConormalTarget::Whole => f.write_str("Whole"),
            ConormalTarget::Arc { a, b, sign } => write!(f, "Arc({a},{b},{sign})"),
        }
    }
}

/// Homology class on `N` whose spectral number is requested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassLabel {
    /// `[N]`, or the relative fundamental class for an arc.
    FundamentalN,
    PointClass,
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassLabel::FundamentalN => f.write_str("fundamental"),
            ClassLabel::PointClass => f.write_str("point"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reduce_examples() {
        assert_eq!(circle_reduce(1.25).unwrap().value(), 0.25);
        assert_eq!(circle_reduce(0.0).unwrap().value(), 0.0);
        assert!((circle_reduce(-0.3).unwrap().value() - 0.7).abs() < 1e-15);
        assert_eq!(circle_reduce(-1e-18).unwrap().value(), 0.0);
        assert!(circle_reduce(f64::NAN).is_err());
        assert!(circle_reduce(f64::INFINITY).is_err());
    }

    #[test]
    fn contains_examples() {
        let q = |x| BasePoint::new(x).unwrap();
        assert!(ConormalTarget::Whole.contains(q(0.42), 0.0).unwrap());
        let pt = ConormalTarget::point(0.5).unwrap();
        assert!(pt.contains(q(0.5), 0.0).unwrap());
        assert!(!pt.contains(q(0.51), 0.0).unwrap());
        assert!(pt.contains(q(0.51), 0.02).unwrap());
        let arc = ConormalTarget::arc(0.1, 0.4, ArcSign::Minus).unwrap();
        assert!(!arc.contains(q(0.7), 0.0).unwrap());
        assert!(arc.contains(q(0.1), 0.0).unwrap());
        assert!(arc.contains(q(0.4), 0.0).unwrap());
        assert!(arc.contains(q(0.405), 0.01).unwrap());
        assert!(arc.contains(q(0.095), 0.01).unwrap());
        assert!(pt.contains(q(0.5), -1.0).is_err());
    }

    #[test]
    fn wrapping_arc() {
        let arc = ConormalTarget::arc(0.9, 0.1, ArcSign::Plus).unwrap();
        let q = |x| BasePoint::new(x).unwrap();
        assert!(arc.contains(q(0.95), 0.0).unwrap());
        assert!(arc.contains(q(0.0), 0.0).unwrap());
        assert!(!arc.contains(q(0.5), 0.0).unwrap());
        assert!((arc.arc_length().unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn degenerate_arc_rejected() {
        assert!(matches!(
            ConormalTarget::arc(0.25, 1.25, ArcSign::Minus),
            Err(GeometryError::DegenerateArc(_))
        ));
    }

    #[test]
    fn distance_is_wraparound() {
        let a = BasePoint::new(0.05).unwrap();
        let b = BasePoint::new(0.95).unwrap();
        assert!((a.distance(b) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn target_json_shape() {
        let t: ConormalTarget =
            serde_json::from_str(r#"{"kind":"arc","a":0.1,"b":1.4,"sign":"minus"}"#).unwrap();
        assert_eq!(t.kind_tag(), "arc-");
        assert!(serde_json::from_str::<ConormalTarget>(r#"{"kind":"point","x":0.1,"y":1}"#).is_err());
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent(x in -1e6f64..1e6) {
            let once = circle_reduce(x).unwrap();
            let twice = circle_reduce(once.value()).unwrap();
            prop_assert_eq!(once, twice);
            prop_assert!((0.0..1.0).contains(&once.value()));
        }

        #[test]
        fn arc_membership_is_rotation_invariant(
            a in 0.0f64..1.0, len in 0.01f64..0.98, x in 0.0f64..1.0, shift in -3.0f64..3.0,
        ) {
            // Keep x away from the endpoints so rounding in the rotation cannot flip it.
            let arc = ConormalTarget::arc(a, a + len, ArcSign::Minus).unwrap();
            let xb = BasePoint::new(x).unwrap();
            let off = arc_offset(&arc, xb);
            prop_assume!((off - len).abs() > 1e-9 && off > 1e-9 && off < 1.0 - 1e-9);
            let rotated = ConormalTarget::arc(a + shift, a + len + shift, ArcSign::Minus).unwrap();
            prop_assert_eq!(
                arc.contains(xb, 0.0).unwrap(),
                rotated.contains(xb.rotate(shift), 0.0).unwrap()
            );
        }
    }

    fn arc_offset(arc: &ConormalTarget, x: BasePoint) -> f64 {
        match arc {
            ConormalTarget::Arc { a, .. } => a.ccw_offset_to(x),
            _ => unreachable!(),
        }
    }
}
