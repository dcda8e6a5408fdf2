//! Fixed-step RK4 integration of Hamiltonian flows on `T*S¹`, accumulating
//! the action integrand `−p·q̇ + H` alongside the trajectory.
//!
//! Each autonomous window of a schedule is integrated twice, with `m` and
//! `m/2` steps; their difference divided by `2⁴ − 1` is the error estimate.

use thiserror::Error;

use super::{support_radius, HamiltonianSpec};
use crate::geometry::{circle_reduce, PhasePoint};

pub const DEFAULT_STEP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("integrator step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("flow duration must be non-negative and finite, got {0}")]
    InvalidDuration(f64),
    #[error("integrator blow-up at t={t}: |p|={p} exceeds {limit}")]
    BlowUp { t: f64, p: f64, limit: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    /// Step length per unit of effective (speed-weighted) time.
    pub step: f64,
    pub record_samples: bool,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            step: DEFAULT_STEP,
            record_samples: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowSample {
    pub t: f64,
    pub point: PhasePoint,
    /// Action accumulated on `[0, t]`.
    pub action: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrajectory {
    pub start: PhasePoint,
    pub duration: f64,
    pub samples: Vec<FlowSample>,
    pub end: PhasePoint,
    /// Real lift of the end base coordinate, continuous from `start.q`.
    pub end_q_lift: f64,
    pub action: f64,
    pub error_estimate: f64,
    pub step: f64,
}

/// Integrator state: lifted base coordinate, fiber, accumulated action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterateState {
    pub q_lift: f64,
    pub p: f64,
    pub action: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
struct Window<'a> {
    generator: &'a HamiltonianSpec,
    speed: f64,
    duration: f64,
    steps: usize,
}

/// Precompiled unit-time schedule, reusable across many start points.
#[derive(Debug, Clone)]
pub(crate) struct Integrator<'a> {
    windows: Vec<Window<'a>>,
    limit: f64,
    step: f64,
}

impl<'a> Integrator<'a> {
    pub(crate) fn new(spec: &'a HamiltonianSpec, step: f64) -> Result<Self, FlowError> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(FlowError::InvalidStep(step));
        }
        let windows = spec
            .schedule()
            .segments
            .into_iter()
            .map(|seg| Window {
                generator: seg.generator,
                speed: seg.speed,
                duration: seg.duration,
                steps: steps_for(seg.speed * seg.duration, step),
            })
            .collect();
        Ok(Self {
            windows,
            limit: 10.0 * support_radius(spec).max(1.0),
            step,
        })
    }

    /// Runs the unit-time schedule `reps` times, reporting the state after
    /// each repetition.
    pub(crate) fn iterates(
        &self,
        q_lift: f64,
        p: f64,
        reps: usize,
    ) -> Result<Vec<IterateState>, FlowError> {
        match self.iterates_partial(q_lift, p, reps) {
            (states, None) => Ok(states),
            (_, Some(err)) => Err(err),
        }
    }

    /// Like [`Self::iterates`], but keeps the repetitions completed before a
    /// blow-up.
    pub(crate) fn iterates_partial(
        &self,
        q_lift: f64,
        p: f64,
        reps: usize,
    ) -> (Vec<IterateState>, Option<FlowError>) {
        let mut state = IterateState {
            q_lift,
            p,
            action: 0.0,
            error: 0.0,
        };
        let mut out = Vec::with_capacity(reps);
        for rep in 0..reps {
            let mut t = rep as f64;
            for w in &self.windows {
                state = match self.window(w, state, w.duration, t, None) {
                    Ok(s) => s,
                    Err(e) => return (out, Some(e)),
                };
                t += w.duration;
            }
            out.push(state);
        }
        (out, None)
    }

    /// Runs for total unit-time `duration`, cycling through the schedule.
    fn run(
        &self,
        start: IterateState,
        duration: f64,
        mut samples: Option<&mut Vec<FlowSample>>,
    ) -> Result<IterateState, FlowError> {
        let mut state = start;
        let mut t = 0.0;
        'outer: loop {
            for w in &self.windows {
                let remaining = duration - t;
                if remaining <= 1e-15 {
                    break 'outer;
                }
                let span = w.duration.min(remaining);
                state = self.window(w, state, span, t, samples.as_deref_mut())?;
                t += span;
            }
        }
        Ok(state)
    }

    fn window(
        &self,
        w: &Window<'_>,
        start: IterateState,
        span: f64,
        t0: f64,
        samples: Option<&mut Vec<FlowSample>>,
    ) -> Result<IterateState, FlowError> {
        let steps = if span == w.duration {
            w.steps
        } else {
            steps_for(w.speed * span, self.step)
        };
        let fine = self.rk4(w, start, span, steps, t0, samples)?;
        let coarse = self.rk4(w, start, span, steps / 2, t0, None)?;
        let diff = (fine.q_lift - coarse.q_lift)
            .abs()
            .max((fine.p - coarse.p).abs())
            .max((fine.action - coarse.action).abs());
        Ok(IterateState {
            error: fine.error + diff / 15.0,
            ..fine
        })
    }

    fn rk4(
        &self,
        w: &Window<'_>,
        start: IterateState,
        span: f64,
        steps: usize,
        t0: f64,
        mut samples: Option<&mut Vec<FlowSample>>,
    ) -> Result<IterateState, FlowError> {
        let gen = w.generator;
        let speed = w.speed;
        let field = |q: f64, p: f64| {
            let (h, hq, hp) = gen.eval_autonomous(q, p);
            (speed * hp, -speed * hq, speed * (h - p * hp))
        };
        let h = span / steps as f64;
        let (mut q, mut p, mut a) = (start.q_lift, start.p, start.action);
        for i in 0..steps {
            let k1 = field(q, p);
            let k2 = field(q + 0.5 * h * k1.0, p + 0.5 * h * k1.1);
            let k3 = field(q + 0.5 * h * k2.0, p + 0.5 * h * k2.1);
            let k4 = field(q + h * k3.0, p + h * k3.1);
            q += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            p += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
            a += h / 6.0 * (k1.2 + 2.0 * k2.2 + 2.0 * k3.2 + k4.2);
            let t = t0 + (i + 1) as f64 * h;
            if !(p.abs() <= self.limit) || !q.is_finite() {
                return Err(FlowError::BlowUp {
                    t,
                    p,
                    limit: self.limit,
                });
            }
            if let Some(out) = samples.as_deref_mut() {
                out.push(FlowSample {
                    t,
                    point: PhasePoint {
                        q: circle_reduce(q).expect("finite"),
                        p,
                    },
                    action: a,
                });
            }
        }
        Ok(IterateState {
            q_lift: q,
            p,
            action: a,
            error: start.error,
        })
    }
}

// Even and at least 2, so the coarse pass has a whole number of steps.
fn steps_for(effective_time: f64, step: f64) -> usize {
    let half = (effective_time.abs() / (2.0 * step)).ceil() as usize;
    2 * half.max(1)
}

/// Integrates `H` from `z` for unit-time `duration`; durations beyond one
/// cycle through the schedule again, so `duration = n` yields `φⁿ(z)`.
pub fn flow(
    spec: &HamiltonianSpec,
    z: PhasePoint,
    duration: f64,
    options: FlowOptions,
) -> Result<FlowTrajectory, FlowError> {
    if !(duration >= 0.0 && duration.is_finite()) {
        return Err(FlowError::InvalidDuration(duration));
    }
    let integrator = Integrator::new(spec, options.step)?;
    let start = IterateState {
        q_lift: z.q.value(),
        p: z.p,
        action: 0.0,
        error: 0.0,
    };
    let mut samples = Vec::new();
    if options.record_samples {
        samples.push(FlowSample {
            t: 0.0,
            point: z,
            action: 0.0,
        });
    }
    let end = integrator.run(
        start,
        duration,
        options.record_samples.then_some(&mut samples),
    )?;
    Ok(FlowTrajectory {
        start: z,
        duration,
        samples,
        end: PhasePoint {
            q: circle_reduce(end.q_lift).expect("finite"),
            p: end.p,
        },
        end_q_lift: end.q_lift,
        action: end.action,
        error_estimate: end.error,
        step: options.step,
    })
}

/// Endpoints and actions of `φ¹(z), …, φⁿ(z)` from a single pass.
pub fn flow_iterates(
    spec: &HamiltonianSpec,
    z: PhasePoint,
    n: usize,
    step: f64,
) -> Result<Vec<IterateState>, FlowError> {
    Integrator::new(spec, step)?.iterates(z.q.value(), z.p, n)
}

pub fn time_one_map(spec: &HamiltonianSpec, z: PhasePoint, step: f64) -> Result<PhasePoint, FlowError> {
    let end = flow(
        spec,
        z,
        1.0,
        FlowOptions {
            step,
            record_samples: false,
        },
    )?;
    Ok(end.end)
}
