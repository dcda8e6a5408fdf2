//! Exact grading arithmetic for strips and pairs of pants with conormal
//! boundary conditions.
//!
//! Gradings `μ_N(x)` are half-integers, so everything runs over `Rational64`.

use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndexError {
    #[error("grading {0} is not a half-integer")]
    NotHalfInteger(Rational64),
    #[error("need 0 <= dim N <= dim M, got dim M = {dim_m}, dim N = {dim_n}")]
    InvalidDimensions { dim_m: i64, dim_n: i64 },
}

/// A grading together with the ambient and target dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexData {
    pub mu: Rational64,
    pub dim_m: i64,
    pub dim_n: i64,
}

impl IndexData {
    pub fn new(mu: Rational64, dim_m: i64, dim_n: i64) -> Result<Self, IndexError> {
        check_grading(mu)?;
        check_dims(dim_m, dim_n)?;
        Ok(Self { mu, dim_m, dim_n })
    }
}

pub fn check_grading(mu: Rational64) -> Result<(), IndexError> {
    if (mu * 2).is_integer() {
        Ok(())
    } else {
        Err(IndexError::NotHalfInteger(mu))
    }
}

pub fn check_dims(dim_m: i64, dim_n: i64) -> Result<(), IndexError> {
    if dim_m >= 0 && (0..=dim_m).contains(&dim_n) {
        Ok(())
    } else {
        Err(IndexError::InvalidDimensions { dim_m, dim_n })
    }
}

fn half(d: i64) -> Rational64 {
    Rational64::new(d, 2)
}

fn int(d: i64) -> Rational64 {
    Rational64::from_integer(d)
}

/// Dimension of pants with two incoming ends `x₁⁻, x₂⁻` and one outgoing
/// end `x⁺`: `μ₁ + μ₂ − μ_out + ½·dim N − dim M`.
pub fn dim_pants(mu1: Rational64, mu2: Rational64, mu_out: Rational64, dim_m: i64, dim_n: i64) -> Rational64 {
    mu1 + mu2 - mu_out + half(dim_n) - int(dim_m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Incoming,
    Outgoing,
}

/// Half strip ending at `x`: `½·dim N − μ` incoming, `½·dim N + μ` outgoing.
pub fn dim_half_strip(mu: Rational64, dim_n: i64, side: Side) -> Rational64 {
    match side {
        Side::Incoming => half(dim_n) - mu,
        Side::Outgoing => half(dim_n) + mu,
    }
}

/// Strip from `x` to `y`: `μ_x − μ_y − dim M + dim N`.
pub fn dim_whole_strip(mu_x: Rational64, mu_y: Rational64, dim_m: i64, dim_n: i64) -> Rational64 {
    mu_x - mu_y - int(dim_m) + int(dim_n)
}

/// Both sides of the gluing relation: the pants glued to three half strips,
/// and a half strip, a whole strip and a half strip glued in a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GluingSides {
    pub pants_side: Rational64,
    pub strip_side: Rational64,
}

pub fn gluing_sides(
    mu1: Rational64,
    mu2: Rational64,
    mu_out: Rational64,
    mu_x: Rational64,
    mu_y: Rational64,
    dim_m: i64,
    dim_n: i64,
) -> GluingSides {
    let pants_side = dim_half_strip(mu1, dim_n, Side::Incoming)
        + dim_half_strip(mu2, dim_n, Side::Incoming)
        + dim_pants(mu1, mu2, mu_out, dim_m, dim_n)
        + dim_half_strip(mu_out, dim_n, Side::Outgoing);
    let strip_side = dim_half_strip(mu_x, dim_n, Side::Incoming)
        + dim_whole_strip(mu_x, mu_y, dim_m, dim_n)
        + dim_half_strip(mu_y, dim_n, Side::Outgoing);
    GluingSides { pants_side, strip_side }
}

pub fn verify_gluing(
    mu1: Rational64,
    mu2: Rational64,
    mu_out: Rational64,
    mu_x: Rational64,
    mu_y: Rational64,
    dim_m: i64,
    dim_n: i64,
) -> bool {
    let s = gluing_sides(mu1, mu2, mu_out, mu_x, mu_y, dim_m, dim_n);
    (s.pants_side - s.strip_side).is_zero()
}

/// Degree of the pair-of-pants product `HF_r ⊗ HF_s → HF_{r+s−dim M}`.
pub fn product_degree(r: i64, s: i64, dim_m: i64) -> i64 {
    r + s - dim_m
}

/// Degree of the intersection product `H_r(N) ⊗ H_s(N) → H_{r+s−dim N}(N)`.
pub fn intersection_degree(r: i64, s: i64, dim_n: i64) -> i64 {
    r + s - dim_n
}

/// Output grading forced by a rigid (zero-dimensional) pants:
/// `μ_out = μ₁ + μ₂ + ½·dim N − dim M`.
pub fn rigid_output_grading(mu1: Rational64, mu2: Rational64, dim_m: i64, dim_n: i64) -> Rational64 {
    mu1 + mu2 + half(dim_n) - int(dim_m)
}

/// The dimension formulas in display form.
pub fn formula_table() -> Vec<(&'static str, &'static str)> {
    vec![
        ("pants", "mu(x1-) + mu(x2-) - mu(x+) + dim N / 2 - dim M"),
        ("half strip, incoming", "dim N / 2 - mu(x)"),
        ("half strip, outgoing", "dim N / 2 + mu(x)"),
        ("whole strip", "mu(x) - mu(y) - dim M + dim N"),
        ("gluing, both sides", "2 dim N - dim M"),
        ("product degree", "r + s - dim M"),
        ("intersection degree", "r + s - dim N"),
    ]
}
