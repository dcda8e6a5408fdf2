//! Building blocks of the catalog: trigonometric polynomials on the circle,
//! the fiber cutoff, and the compactly supported bump profile.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::HamiltonianError;
use crate::numerics::{golden_max, golden_min};

pub const MAX_DEGREE: usize = 32;

/// `f(q) = c₀ + Σₖ cₖ cos(2πkq) + sₖ sin(2πkq)` for `k = 1..=K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTrigPoly", into = "RawTrigPoly")]
pub struct TrigPoly {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrigPoly {
    cos: Vec<f64>,
    #[serde(default)]
    sin: Vec<f64>,
}

impl TryFrom<RawTrigPoly> for TrigPoly {
    type Error = HamiltonianError;

    fn try_from(raw: RawTrigPoly) -> Result<Self, Self::Error> {
        TrigPoly::new(raw.cos, raw.sin)
    }
}

impl From<TrigPoly> for RawTrigPoly {
    fn from(f: TrigPoly) -> Self {
        RawTrigPoly {
            cos: f.cos,
            sin: f.sin,
        }
    }
}

/// A critical value together with where it is attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub q: f64,
    pub value: f64,
}

impl TrigPoly {
    /// `cos` holds `c₀..c_K`; `sin` holds `s₁..s_K` and is zero-padded if shorter.
    pub fn new(cos: Vec<f64>, mut sin: Vec<f64>) -> Result<Self, HamiltonianError> {
        if cos.is_empty() {
            return Err(HamiltonianError::InvalidTrigPoly("no constant term".into()));
        }
        let degree = (cos.len() - 1).max(sin.len());
        if degree > MAX_DEGREE {
            return Err(HamiltonianError::DegreeTooHigh(degree));
        }
        if cos.iter().chain(&sin).any(|c| !c.is_finite()) {
            return Err(HamiltonianError::InvalidTrigPoly("non-finite coefficient".into()));
        }
        let mut cos = cos;
        cos.resize(degree + 1, 0.0);
        sin.resize(degree, 0.0);
        Ok(Self { cos, sin })
    }

    pub fn constant(c: f64) -> Self {
        Self {
            cos: vec![c],
            sin: vec![],
        }
    }

    /// `cos(2πq)`: minimum `-1` at `q = 1/2`, maximum `+1` at `q = 0`.
    pub fn cosine() -> Self {
        Self {
            cos: vec![0.0, 1.0],
            sin: vec![0.0],
        }
    }

    /// `cos(2π(q − x_min + 1/2))`, whose unique minimum `-1` sits at `x_min`.
    pub fn shifted_cosine(x_min: f64) -> Self {
        let theta = TAU * (x_min - 0.5);
        Self {
            cos: vec![0.0, theta.cos()],
            sin: vec![theta.sin()],
        }
    }

    pub fn degree(&self) -> usize {
        self.sin.len()
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin
    }

    /// Returns `(f(q), f'(q))`.
    #[inline]
    pub fn eval_d1(&self, q: f64) -> (f64, f64) {
        let (s1, c1) = (TAU * q).sin_cos();
        let (mut ck, mut sk) = (c1, s1);
        let mut f = self.cos[0];
        let mut df = 0.0;
        for k in 1..=self.degree() {
            let (a, b) = (self.cos[k], self.sin[k - 1]);
            f += a * ck + b * sk;
            df += TAU * k as f64 * (b * ck - a * sk);
            let next_c = ck * c1 - sk * s1;
            sk = sk * c1 + ck * s1;
            ck = next_c;
        }
        (f, df)
    }

    pub fn eval(&self, q: f64) -> f64 {
        self.eval_d1(q).0
    }

    pub fn derivative(&self, q: f64) -> f64 {
        self.eval_d1(q).1
    }

    pub fn second_derivative(&self, q: f64) -> f64 {
        (1..=self.degree())
            .map(|k| {
                let w = TAU * k as f64;
                let (s, c) = (w * q).sin_cos();
                -w * w * (self.cos[k] * c + self.sin[k - 1] * s)
            })
            .sum()
    }

    /// Coefficient-sum bound on `max |f'|`.
    pub fn slope_bound(&self) -> f64 {
        (1..=self.degree())
            .map(|k| TAU * k as f64 * (self.cos[k].abs() + self.sin[k - 1].abs()))
            .sum()
    }

    /// Coefficient-sum bound on `max |f|`.
    pub fn sup_bound(&self) -> f64 {
        self.cos.iter().chain(&self.sin).map(|c| c.abs()).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            cos: self.cos.iter().map(|c| s * c).collect(),
            sin: self.sin.iter().map(|c| s * c).collect(),
        }
    }

    pub fn add(&self, other: &TrigPoly) -> Self {
        let degree = self.degree().max(other.degree());
        let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
        Self {
            cos: (0..=degree)
                .map(|i| get(&self.cos, i) + get(&other.cos, i))
                .collect(),
            sin: (0..degree)
                .map(|i| get(&self.sin, i) + get(&other.sin, i))
                .collect(),
        }
    }

    pub fn sub(&self, other: &TrigPoly) -> Self {
        self.add(&other.scaled(-1.0))
    }

    pub fn max(&self) -> Extremum {
        let (q, value) = self.refine_extremum(true);
        Extremum { q, value }
    }

    pub fn min(&self) -> Extremum {
        let (q, value) = self.refine_extremum(false);
        Extremum { q, value }
    }

    fn refine_extremum(&self, maximize: bool) -> (f64, f64) {
        let n = 256 * (self.degree() + 1);
        let h = 1.0 / n as f64;
        let sign = if maximize { 1.0 } else { -1.0 };
        let best = (0..n)
            .map(|i| i as f64 * h)
            .map(|q| (q, sign * self.eval(q)))
            .fold((0.0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
        let (q, v) = if maximize {
            golden_max(|q| self.eval(q), best.0 - h, best.0 + h, 1e-13)
        } else {
            golden_min(|q| self.eval(q), best.0 - h, best.0 + h, 1e-13)
        };
        (crate::geometry::wrap_unit(q), v)
    }
}

/// Fiber cutoff `χ(|p|)`: identically `1` on `|p| ≤ r0`, identically `0` on
/// `|p| ≥ r1`, smooth and monotone in between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutoffSpec {
    pub r0: f64,
    pub r1: f64,
}

impl CutoffSpec {
    pub fn new(r0: f64, r1: f64) -> Result<Self, HamiltonianError> {
        let c = Self { r0, r1 };
        c.validate()?;
        Ok(c)
    }

    /// Inner radius `1 + slope_budget`, transition width 1: flows whose fiber
    /// excursion stays below `slope_budget` never see the cutoff.
    pub fn safe_for(slope_budget: f64) -> Self {
        let r0 = 1.0 + slope_budget.abs();
        Self { r0, r1: r0 + 1.0 }
    }

    pub fn validate(&self) -> Result<(), HamiltonianError> {
        if !(self.r0 > 0.0 && self.r1 > self.r0 && self.r1.is_finite()) {
            return Err(HamiltonianError::InvalidCutoff {
                r0: self.r0,
                r1: self.r1,
            });
        }
        Ok(())
    }

    /// Returns `(χ(|p|), d/dp χ(|p|))`.
    #[inline]
    pub fn eval_d1(&self, p: f64) -> (f64, f64) {
        let r = p.abs();
        if r <= self.r0 {
            return (1.0, 0.0);
        }
        if r >= self.r1 {
            return (0.0, 0.0);
        }
        let w = self.r1 - self.r0;
        let t = (r - self.r0) / w;
        let (s, ds) = smooth_step(t);
        (1.0 - s, -ds / w * p.signum())
    }
}

// s(t) = h(t) / (h(t) + h(1 - t)) with h(x) = exp(-1/x); s(0) = 0, s(1) = 1.
fn smooth_step(t: f64) -> (f64, f64) {
    let h = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    let dh = |x: f64| if x > 0.0 { (-1.0 / x).exp() / (x * x) } else { 0.0 };
    let (a, b) = (h(t), h(1.0 - t));
    let den = a + b;
    let s = a / den;
    let ds = (dh(t) * b + a * dh(1.0 - t)) / (den * den);
    (s, ds)
}

/// `exp(1 − 1/(1 − x²))` on `|x| < 1`, zero elsewhere; equals 1 at the origin.
#[inline]
pub(crate) fn bump_profile(x: f64) -> (f64, f64) {
    let u = 1.0 - x * x;
    if u <= 0.0 {
        return (0.0, 0.0);
    }
    let v = (1.0 - 1.0 / u).exp();
    (v, v * (-2.0 * x / (u * u)))
}
