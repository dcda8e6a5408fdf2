//! Action profile of the flowed zero section and its primitive `Ŝ`.
//!
//! Seeds `q₀` on the zero section are flowed to `(b(q₀), p₁(q₀))` with
//! accumulated action `a(q₀)`. When `b` is a strictly increasing circle map
//! the image is the graph of `p = −Ŝ'(b)` with `Ŝ(b(q₀)) = a(q₀)`, and `Ŝ` is
//! interpolated by cubic Hermite pieces using the exact slopes `−p₁`.

use rayon::prelude::*;

use super::SpectralError;
use crate::geometry::wrap_unit;
use crate::hamiltonian::{FlowError, HamiltonianSpec, Integrator, IterateState, DEFAULT_STEP};
use crate::numerics::{bisect, golden_max, golden_min};

pub const DEFAULT_GRID: usize = 4096;
/// Minimum gap between consecutive endpoint bases for the image to count as
/// graphical.
pub const GRAPHICAL_MARGIN: f64 = 1e-9;
/// Angle resolution of extremum refinement.
pub const REFINE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileOptions {
    pub grid: usize,
    pub step: f64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            grid: DEFAULT_GRID,
            step: DEFAULT_STEP,
        }
    }
}

impl ProfileOptions {
    pub fn validate(&self) -> Result<(), SpectralError> {
        if self.grid < 8 {
            return Err(SpectralError::InvalidGrid(self.grid));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(FlowError::InvalidStep(self.step).into());
        }
        Ok(())
    }
}

/// Sampled image `φⁿ(o_M)` of the zero section, `n = power`.
#[derive(Debug, Clone)]
pub struct ActionProfile {
    spec: HamiltonianSpec,
    power: usize,
    step: f64,
    end_lift: Vec<f64>,
    fiber: Vec<f64>,
    actions: Vec<f64>,
    integrator_error: f64,
    primitive: Option<Primitive>,
    error_bound: f64,
}

impl ActionProfile {
    /// Profile of the time-one map of `spec`.
    pub fn build(spec: &HamiltonianSpec, options: ProfileOptions) -> Result<Self, SpectralError> {
        let mut all = Self::build_iterates(spec, 1, options)?;
        all.pop().expect("one power requested")
    }

    /// Profiles of `φ¹, …, φⁿ` from a single pass over every seed. Entry
    /// `k` is an error if any seed blew up before reaching power `k + 1`.
    pub fn build_iterates(
        spec: &HamiltonianSpec,
        n_max: usize,
        options: ProfileOptions,
    ) -> Result<Vec<Result<Self, SpectralError>>, SpectralError> {
        options.validate()?;
        spec.validate()?;
        let integrator = Integrator::new(spec, options.step)?;
        let g = options.grid;
        let runs: Vec<(Vec<IterateState>, Option<FlowError>)> = (0..g)
            .into_par_iter()
            .map(|i| integrator.iterates_partial(i as f64 / g as f64, 0.0, n_max))
            .collect();
        let reached = runs.iter().map(|r| r.0.len()).min().unwrap_or(0);
        let first_error = runs.iter().find_map(|r| r.1.clone());
        let mut out = Vec::with_capacity(n_max);
        for k in 0..n_max {
            if k >= reached {
                let err = first_error.clone().expect("short run implies an error");
                out.push(Err(SpectralError::Flow { power: k + 1, source: err }));
                continue;
            }
            let states: Vec<IterateState> = runs.iter().map(|r| r.0[k]).collect();
            out.push(Ok(Self::from_states(spec, k + 1, options.step, &states)));
        }
        Ok(out)
    }

    fn from_states(spec: &HamiltonianSpec, power: usize, step: f64, states: &[IterateState]) -> Self {
        let end_lift: Vec<f64> = states.iter().map(|s| s.q_lift).collect();
        let fiber: Vec<f64> = states.iter().map(|s| s.p).collect();
        let actions: Vec<f64> = states.iter().map(|s| s.action).collect();
        let integrator_error = states.iter().map(|s| s.error).fold(0.0, f64::max);
        let graphical = is_strictly_monotone(&end_lift);
        let primitive = graphical.then(|| Primitive::new(&end_lift, &actions, &fiber));
        let error_bound = integrator_error
            + primitive
                .as_ref()
                .map(|p| p.sampling_error() + p.interpolation_error())
                .unwrap_or(f64::INFINITY);
        Self {
            spec: spec.clone(),
            power,
            step,
            end_lift,
            fiber,
            actions,
            integrator_error,
            primitive,
            error_bound,
        }
    }

    pub fn spec(&self) -> &HamiltonianSpec {
        &self.spec
    }

    pub fn power(&self) -> usize {
        self.power
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn grid_size(&self) -> usize {
        self.actions.len()
    }

    pub fn seed(&self, i: usize) -> f64 {
        i as f64 / self.grid_size() as f64
    }

    /// Endpoint base coordinates (lifted, continuous in the seed).
    pub fn end_lift(&self) -> &[f64] {
        &self.end_lift
    }

    pub fn fiber(&self) -> &[f64] {
        &self.fiber
    }

    pub fn actions(&self) -> &[f64] {
        &self.actions
    }

    pub fn graphical(&self) -> bool {
        self.primitive.is_some()
    }

    pub fn primitive(&self) -> Option<&Primitive> {
        self.primitive.as_ref()
    }

    pub(crate) fn require_primitive(&self) -> Result<&Primitive, SpectralError> {
        self.primitive
            .as_ref()
            .ok_or(SpectralError::OracleUnavailable { power: self.power })
    }

    pub fn integrator_error(&self) -> f64 {
        self.integrator_error
    }

    /// Combined integrator, sampling and interpolation error estimate;
    /// infinite for non-graphical profiles.
    pub fn error_bound(&self) -> f64 {
        self.error_bound
    }

    /// Re-flows a single seed (any real lift) under `φ^power`.
    pub(crate) fn flow_seed(&self, q0: f64) -> Result<IterateState, SpectralError> {
        let integrator = Integrator::new(&self.spec, self.step)?;
        let (states, err) = integrator.iterates_partial(q0, 0.0, self.power);
        match err {
            Some(e) => Err(SpectralError::Flow {
                power: self.power,
                source: e,
            }),
            None => Ok(*states.last().expect("power >= 1")),
        }
    }

    /// Exact intersection point of the image with the fiber over `x`:
    /// bisects the seed until its endpoint lands on `x`.
    pub(crate) fn fiber_intersection(&self, x: f64) -> Result<IterateState, SpectralError> {
        let prim = self.require_primitive()?;
        let g = self.grid_size();
        let target = prim.unwrap_near_start(x);
        let i = prim.cell_index(target);
        let target = target + prim.shift;
        let lo = self.seed(i);
        let hi = lo + 1.0 / g as f64;
        let integrator = Integrator::new(&self.spec, self.step)?;
        let end = |q0: f64| -> f64 {
            integrator
                .iterates_partial(q0, 0.0, self.power)
                .0
                .last()
                .map(|s| s.q_lift)
                .unwrap_or(f64::NAN)
        };
        let q0 = bisect(|q0| end(q0) - target, lo, hi, 1e-14);
        self.flow_seed(q0)
    }

    /// Seeds around which `p₁` changes sign (critical points of `Ŝ`), as
    /// seed-index brackets `(i, i+1)`; exact zeros give `(i, i)`.
    pub(crate) fn critical_brackets(&self) -> Vec<(usize, usize)> {
        let g = self.grid_size();
        (0..g)
            .filter_map(|i| {
                let (a, b) = (self.fiber[i], self.fiber[(i + 1) % g]);
                if a == 0.0 {
                    Some((i, i))
                } else if (a < 0.0) != (b < 0.0) && b != 0.0 {
                    Some((i, i + 1))
                } else {
                    None
                }
            })
            .collect()
    }

    /// Refines a critical bracket to an actual zero of the fiber coordinate.
    pub(crate) fn refine_critical(&self, bracket: (usize, usize)) -> Result<IterateState, SpectralError> {
        let (i, j) = bracket;
        if i == j {
            return self.flow_seed(self.seed(i));
        }
        let integrator = Integrator::new(&self.spec, self.step)?;
        let fiber = |q0: f64| -> f64 {
            integrator
                .iterates_partial(q0, 0.0, self.power)
                .0
                .last()
                .map(|s| s.p)
                .unwrap_or(f64::NAN)
        };
        let g = self.grid_size() as f64;
        let q0 = bisect(fiber, i as f64 / g, j as f64 / g, 1e-14);
        self.flow_seed(q0)
    }
}

fn is_strictly_monotone(end_lift: &[f64]) -> bool {
    let g = end_lift.len();
    end_lift.windows(2).all(|w| w[1] - w[0] > GRAPHICAL_MARGIN)
        && end_lift[0] + 1.0 - end_lift[g - 1] > GRAPHICAL_MARGIN
}

/// Periodic cubic Hermite interpolant of `Ŝ` through the image samples.
#[derive(Debug, Clone)]
pub struct Primitive {
    /// Integer offset between the raw endpoint lifts and `nodes`.
    shift: f64,
    nodes: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl Primitive {
    fn new(end_lift: &[f64], actions: &[f64], fiber: &[f64]) -> Self {
        // Normalize the lift so that the first node sits in [0, 1).
        let shift = end_lift[0] - wrap_unit(end_lift[0]);
        Self {
            shift,
            nodes: end_lift.iter().map(|b| b - shift).collect(),
            values: actions.to_vec(),
            slopes: fiber.iter().map(|p| -p).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node `j` of the periodic extension: `(x, Ŝ, Ŝ')`.
    fn node(&self, j: isize) -> (f64, f64, f64) {
        let g = self.len() as isize;
        let k = j.div_euclid(g);
        let i = j.rem_euclid(g) as usize;
        (self.nodes[i] + k as f64, self.values[i], self.slopes[i])
    }

    /// Sample nodes as base points with values, in image order.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().zip(&self.values).map(|(x, v)| (wrap_unit(*x), *v))
    }

    fn start(&self) -> f64 {
        self.nodes[0]
    }

    /// Lift of `x` into `[nodes[0], nodes[0] + 1)`.
    pub(crate) fn unwrap_near_start(&self, x: f64) -> f64 {
        self.start() + wrap_unit(x - self.start())
    }

    /// Index `i` with `node(i) ≤ t < node(i+1)`, for `t` in the fundamental window.
    pub(crate) fn cell_index(&self, t: f64) -> usize {
        match self.nodes.binary_search_by(|n| n.partial_cmp(&t).expect("finite")) {
            Ok(i) => i,
            Err(i) => i - 1,
        }
    }

    fn eval_cell(&self, j: isize, t: f64) -> f64 {
        let (x0, y0, m0) = self.node(j);
        let (x1, y1, m1) = self.node(j + 1);
        let h = x1 - x0;
        let s = (t - x0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * h * m0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * h * m1
    }

    /// `Ŝ(x)` for any real `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let t = self.unwrap_near_start(x);
        let i = self.cell_index(t);
        self.eval_cell(i as isize, t)
    }

    /// Evaluation at an already-lifted coordinate near the node range.
    fn eval_lifted(&self, t: f64) -> f64 {
        self.eval(t)
    }

    /// Extremum of `Ŝ` over `[lo, hi]` (lifted, `hi − lo ≤ 1`): best node
    /// or endpoint, then golden-section refinement in its neighbourhood.
    pub(crate) fn extremum(&self, lo: f64, hi: f64, maximize: bool) -> (f64, f64) {
        let sign = if maximize { 1.0 } else { -1.0 };
        let better = |a: f64, b: f64| sign * a > sign * b;
        let mut best = (lo, self.eval_lifted(lo));
        let end = (hi, self.eval_lifted(hi));
        if better(end.1, best.1) {
            best = end;
        }
        let mut best_node: Option<isize> = None;
        let g = self.len() as isize;
        let t0 = self.unwrap_near_start(lo);
        let offset = lo - t0;
        let mut j = self.cell_index(t0) as isize;
        for _ in 0..=g {
            let (x, v, _) = self.node(j);
            let x = x + offset;
            if x > hi {
                break;
            }
            if x >= lo && better(v, best.1) {
                best = (x, v);
                best_node = Some(j);
            }
            j += 1;
        }
        // Refine over the cells adjacent to the best sample, clipped to [lo, hi].
        let (a, b) = match best_node {
            Some(j) => (self.node(j - 1).0 + offset, self.node(j + 1).0 + offset),
            None => {
                let t = self.unwrap_near_start(best.0);
                let i = self.cell_index(t) as isize;
                let shift = best.0 - t;
                (self.node(i - 1).0 + shift, self.node(i + 1).0 + shift)
            }
        };
        let (a, b) = (a.max(lo), b.min(hi));
        let refined = if maximize {
            golden_max(|x| self.eval_lifted(x), a, b, REFINE_TOL)
        } else {
            golden_min(|x| self.eval_lifted(x), a, b, REFINE_TOL)
        };
        if better(refined.1, best.1) {
            refined
        } else {
            best
        }
    }

    pub fn max(&self) -> (f64, f64) {
        let lo = self.start();
        let (x, v) = self.extremum(lo, lo + 1.0, true);
        (wrap_unit(x), v)
    }

    pub fn min(&self) -> (f64, f64) {
        let lo = self.start();
        let (x, v) = self.extremum(lo, lo + 1.0, false);
        (wrap_unit(x), v)
    }

    /// `max_cell h² · max |Ŝ''| / 8`: how far a sampled extremum can sit
    /// below the continuous one.
    pub fn sampling_error(&self) -> f64 {
        let g = self.len() as isize;
        let mut h_max: f64 = 0.0;
        let mut curv: f64 = 0.0;
        for j in 0..g {
            let (x0, _, m0) = self.node(j);
            let (x1, _, m1) = self.node(j + 1);
            let h = x1 - x0;
            h_max = h_max.max(h);
            curv = curv.max((m1 - m0).abs() / h);
        }
        h_max * h_max * curv / 8.0
    }

    /// `h⁴/384 · |Ŝ⁗|` with the fourth derivative estimated from jumps of
    /// the cubic pieces' third derivatives.
    pub fn interpolation_error(&self) -> f64 {
        let g = self.len() as isize;
        let third = |j: isize| {
            let (x0, y0, m0) = self.node(j);
            let (x1, y1, m1) = self.node(j + 1);
            let h = x1 - x0;
            6.0 * ((m0 + m1) / (h * h) - 2.0 * (y1 - y0) / (h * h * h))
        };
        let mut worst: f64 = 0.0;
        for j in 0..g {
            let h = self.node(j + 1).0 - self.node(j).0;
            let d4 = (third(j + 1) - third(j)).abs() / h;
            worst = worst.max(h.powi(4) / 384.0 * d4);
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{iterate, CutoffSpec, TrigPoly};

    fn cos_spec() -> HamiltonianSpec {
        HamiltonianSpec::lifted(TrigPoly::cosine(), CutoffSpec::new(10.0, 12.0).unwrap())
    }

    #[test]
    fn lifted_cosine_profile() {
        let prof = ActionProfile::build(&cos_spec(), ProfileOptions::default()).unwrap();
        assert!(prof.graphical());
        assert!(prof.error_bound() < 1e-6, "error bound {}", prof.error_bound());
        let f = TrigPoly::cosine();
        let prim = prof.primitive().unwrap();
        for i in 0..prof.grid_size() {
            let q = prof.seed(i);
            assert!((prim.eval(q) - f.eval(q)).abs() <= 1e-6);
            let mid = q + 0.5 / prof.grid_size() as f64;
            assert!((prim.eval(mid) - f.eval(mid)).abs() <= 1e-6);
        }
        let (xmax, vmax) = prim.max();
        assert!((vmax - 1.0).abs() < 1e-9 && xmax.min(1.0 - xmax) < 1e-4);
        let (xmin, vmin) = prim.min();
        assert!((vmin + 1.0).abs() < 1e-9 && (xmin - 0.5).abs() < 1e-4);
    }

    #[test]
    fn zero_profile() {
        let prof = ActionProfile::build(&HamiltonianSpec::Zero, ProfileOptions { grid: 64, step: 1e-2 }).unwrap();
        assert!(prof.graphical());
        assert!(prof.actions().iter().all(|a| *a == 0.0));
        assert_eq!(prof.primitive().unwrap().eval(0.3), 0.0);
    }

    #[test]
    fn iterated_profile_scales() {
        let f = TrigPoly::new(vec![0.0, 0.4, -0.3], vec![0.2, 0.1]).unwrap();
        let n = 5;
        let spec = HamiltonianSpec::lifted_safe(f.clone(), n);
        let it = iterate(spec.clone(), n).unwrap();
        let opts = ProfileOptions { grid: 1024, step: 1e-2 };
        let prof = ActionProfile::build(&it, opts).unwrap();
        let seq = ActionProfile::build_iterates(&spec, n as usize, opts).unwrap();
        let last = seq.last().unwrap().as_ref().unwrap();
        for i in (0..1024).step_by(37) {
            let q = prof.seed(i);
            assert!((prof.actions()[i] - n as f64 * f.eval(q)).abs() < 1e-9);
            assert!((last.actions()[i] - prof.actions()[i]).abs() < 1e-9);
        }
        assert_eq!(last.power(), n as usize);
    }

    #[test]
    fn non_graphical_profile_detected() {
        // A bump straddling the zero section with a large fiber amplitude
        // drags base points far enough to fold the image.
        let spec = HamiltonianSpec::bump(0.5, 0.0, 0.3, 2.0, 5.0).unwrap();
        let prof = ActionProfile::build(&spec, ProfileOptions { grid: 512, step: 1e-3 }).unwrap();
        assert!(!prof.graphical());
        assert!(prof.error_bound().is_infinite());
        assert!(matches!(
            prof.require_primitive(),
            Err(SpectralError::OracleUnavailable { power: 1 })
        ));
    }

    #[test]
    fn grid_validation() {
        assert!(matches!(
            ActionProfile::build(&cos_spec(), ProfileOptions { grid: 2, step: 1e-3 }),
            Err(SpectralError::InvalidGrid(2))
        ));
    }
}
