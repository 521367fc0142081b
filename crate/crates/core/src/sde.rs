//! Euler–Maruyama simulation of reflected diffusions on the half-line and
//! the random time change between the unit-noise and accelerated processes.
//!
//! One step from state `x` over `h` is `x⁺ = x + drift(x)h + σ(x)√h ξ` with
//! `ξ` standard normal. Reflected processes map `x⁺ < 0` back into the
//! half-line (by `|x⁺|` by default, which mirrors the symmetric-extension
//! construction of the accelerated process) and accumulate the reflection
//! correction as discrete local time. The affine-drift process instead
//! clamps at zero and counts clamps.

use std::ops::ControlFlow;
use std::sync::Arc;

use crate::construct::{Boundary, ProcessSpec, SpeedFunction};
use crate::error::{AbortKind, Error, Result};
use crate::rng::{Stream, StreamId};

/// Hard floor on step sizes. Speed-adaptive steps shrink like
/// `κ(1+x)^{-m-1}` far out, so a floor high enough to be "safe-looking"
/// would abort legitimate starts at x ~ 1e3; actual clock stalls are caught
/// separately by the `t + h == t` check (the clock value grows in step with
/// the fall from a far start, so stalls cannot occur there).
pub const STEP_FLOOR: f64 = 1e-26;

/// States beyond this magnitude abort the path as an overflow.
pub const OVERFLOW_GUARD: f64 = 1e30;

/// Coefficient values at one state, evaluated together so the speed factor
/// is computed once per step.
#[derive(Debug, Clone, Copy)]
pub struct StepSample {
    pub drift: f64,
    pub sigma: f64,
    /// Speed factor for the adaptive step rule, if the process has one.
    pub speed_f2: Option<f64>,
}

/// Drift/diffusion pair the integrator can drive.
///
/// Implemented by [`ProcessSpec`]; test code substitutes degenerate
/// coefficient pairs directly.
pub trait SdeCoefficients {
    fn drift(&self, x: f64) -> f64;
    fn sigma(&self, x: f64) -> f64;
    fn boundary(&self) -> Boundary;
    /// Speed factor for the adaptive step rule, if the process has one.
    fn adaptive_speed_f2(&self, x: f64) -> Option<f64>;

    /// Combined per-step evaluation; override when the coefficients share
    /// common work.
    #[inline]
    fn sample(&self, x: f64) -> StepSample {
        StepSample {
            drift: self.drift(x),
            sigma: self.sigma(x),
            speed_f2: self.adaptive_speed_f2(x),
        }
    }
}

impl SdeCoefficients for ProcessSpec {
    #[inline]
    fn drift(&self, x: f64) -> f64 {
        ProcessSpec::drift(self, x)
    }
    #[inline]
    fn sigma(&self, x: f64) -> f64 {
        ProcessSpec::sigma(self, x)
    }
    fn boundary(&self) -> Boundary {
        ProcessSpec::boundary(self)
    }
    #[inline]
    fn adaptive_speed_f2(&self, x: f64) -> Option<f64> {
        self.speed().map(|sf| sf.f2(x))
    }
    #[inline]
    fn sample(&self, x: f64) -> StepSample {
        if let Some(sf) = self.speed() {
            let f2 = sf.f2(x);
            StepSample {
                drift: f2 * crate::construct::drift_b(self.density(), x),
                sigma: f2.sqrt(),
                speed_f2: Some(f2),
            }
        } else {
            StepSample { drift: self.drift(x), sigma: self.sigma(x), speed_f2: None }
        }
    }
}

/// How reflected processes map a negative proposal back into the half-line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReflectionScheme {
    /// `x⁺ ← |x⁺|`, local time increment `|x⁺| - x⁺`.
    #[default]
    AbsoluteValue,
    /// `x⁺ ← max(0, x⁺)`, local time increment `-x⁺` (sensitivity studies).
    Projection,
}

impl ReflectionScheme {
    pub fn name(self) -> &'static str {
        match self {
            ReflectionScheme::AbsoluteValue => "absolute",
            ReflectionScheme::Projection => "projection",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum StepMode {
    Uniform { h: f64 },
    AdaptiveSpeed { kappa: f64 },
}

/// Step-size policy. Steps are always in `(0, h_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPolicy {
    h_max: f64,
    mode: StepMode,
    reflection: ReflectionScheme,
}

impl StepPolicy {
    /// Fixed step `h`.
    pub fn uniform(h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::invalid(format!("uniform step h = {h} must be positive")));
        }
        Ok(StepPolicy { h_max: h, mode: StepMode::Uniform { h }, reflection: Default::default() })
    }

    /// Speed-adaptive step `h(x) = min(h_max, κ/f²(x))`.
    ///
    /// Requires the process to carry a speed function. With `h_max >= κ` the
    /// accelerated integrator is step-for-step the uniform-step unit-noise
    /// integrator seen through the time change.
    pub fn adaptive_speed(h_max: f64, kappa: f64) -> Result<Self> {
        if !(h_max > 0.0 && h_max.is_finite()) || !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::invalid(format!(
                "adaptive policy needs positive h_max and kappa, got {h_max}, {kappa}"
            )));
        }
        Ok(StepPolicy {
            h_max,
            mode: StepMode::AdaptiveSpeed { kappa },
            reflection: Default::default(),
        })
    }

    pub fn with_reflection(mut self, scheme: ReflectionScheme) -> Self {
        self.reflection = scheme;
        self
    }

    pub fn reflection(&self) -> ReflectionScheme {
        self.reflection
    }

    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    pub fn is_adaptive(&self) -> bool {
        matches!(self.mode, StepMode::AdaptiveSpeed { .. })
    }

    pub fn kappa(&self) -> Option<f64> {
        match self.mode {
            StepMode::AdaptiveSpeed { kappa } => Some(kappa),
            StepMode::Uniform { .. } => None,
        }
    }

    #[inline]
    fn step_size(&self, speed_f2: Option<f64>) -> Result<f64> {
        match self.mode {
            StepMode::Uniform { h } => Ok(h),
            StepMode::AdaptiveSpeed { kappa } => {
                let f2 = speed_f2.ok_or_else(|| {
                    Error::invalid(
                        "adaptive-speed stepping requires a process with a speed function",
                    )
                })?;
                Ok(self.h_max.min(kappa / f2))
            }
        }
    }
}

/// One simulated trajectory.
#[derive(Debug, Clone)]
pub struct Path {
    /// Strictly increasing grid times starting at 0 (process time).
    pub times: Vec<f64>,
    /// States, all non-negative.
    pub states: Vec<f64>,
    /// Accumulated reflection corrections (discrete local time at zero).
    pub local_time: Vec<f64>,
    /// RNG stream that drove the path.
    pub seed_id: StreamId,
    /// Safeguard clamps applied at the natural boundary (affine-drift model).
    pub boundary_clamps: u64,
}

impl Path {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn duration(&self) -> f64 {
        *self.times.last().expect("paths are non-empty") - self.times[0]
    }

    /// State at time `t` under the cadlag (left-constant) convention.
    pub fn state_at(&self, t: f64) -> f64 {
        match self.times.binary_search_by(|v| v.partial_cmp(&t).expect("finite times")) {
            Ok(i) => self.states[i],
            Err(0) => self.states[0],
            Err(i) => self.states[i - 1],
        }
    }

    /// Check the structural invariants (increasing grid, positivity,
    /// monotone local time).
    pub fn check_invariants(&self) -> Result<()> {
        if self.times.len() < 2 || self.times.len() != self.states.len()
            || self.times.len() != self.local_time.len()
        {
            return Err(Error::invalid("path arrays must align and hold at least two points"));
        }
        for w in self.times.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::invalid(format!("times not strictly increasing at {}", w[1])));
            }
        }
        if self.states.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(Error::invalid("states must be finite and non-negative"));
        }
        for w in self.local_time.windows(2) {
            if w[1] < w[0] {
                return Err(Error::invalid("local time must be non-decreasing"));
            }
        }
        Ok(())
    }
}

/// Summary returned by the streaming driver.
#[derive(Debug, Clone, Copy)]
pub struct SimSummary {
    pub steps: usize,
    pub final_time: f64,
    pub final_state: f64,
    pub local_time: f64,
    pub boundary_clamps: u64,
    /// True if a visitor stopped the simulation before the horizon.
    pub stopped_early: bool,
}

/// Streaming observer of a simulation; return `Break` to stop the path.
pub trait PathVisitor {
    fn visit(&mut self, t: f64, x: f64, local_time: f64) -> ControlFlow<()>;
}

impl<F: FnMut(f64, f64, f64) -> ControlFlow<()>> PathVisitor for F {
    #[inline]
    fn visit(&mut self, t: f64, x: f64, local_time: f64) -> ControlFlow<()> {
        self(t, x, local_time)
    }
}

/// Drive one path to the first grid time `>= horizon`, calling the visitor
/// at the initial point and after every step.
///
/// `snap_times` must be strictly increasing; the stepper shortens steps to
/// land exactly on each of them (checkpoint sampling). Aborts with
/// [`Error::PathAborted`] on non-finite states, overflow past 1e30, a step
/// below [`STEP_FLOOR`], or a step too small to advance the clock.
pub fn simulate_visit<C: SdeCoefficients, V: PathVisitor>(
    coeffs: &C,
    x0: f64,
    horizon: f64,
    policy: &StepPolicy,
    stream: &mut Stream,
    snap_times: &[f64],
    visitor: &mut V,
) -> Result<SimSummary> {
    if !(x0 >= 0.0 && x0.is_finite()) {
        return Err(Error::invalid(format!("initial state {x0} outside the half-line")));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::invalid(format!("horizon {horizon} must be positive and finite")));
    }
    debug_assert!(snap_times.windows(2).all(|w| w[1] > w[0]));

    let boundary = coeffs.boundary();
    let reflection = policy.reflection();
    let mut t = 0.0f64;
    let mut x = x0;
    let mut phi = 0.0f64;
    let mut clamps = 0u64;
    let mut steps = 0usize;
    let mut snap_idx = snap_times.partition_point(|&s| s <= 0.0);

    let mut stopped_early = false;
    if visitor.visit(t, x, phi).is_break() {
        stopped_early = true;
    }

    while !stopped_early && t < horizon {
        let sample = coeffs.sample(x);
        let mut h = policy.step_size(sample.speed_f2)?;
        if h < STEP_FLOOR {
            return Err(Error::PathAborted { kind: AbortKind::StepUnderflow, t, step: steps, state: x });
        }
        // Land exactly on the next snap time when the raw step would cross it.
        let mut snapped_to = None;
        if snap_idx < snap_times.len() {
            let s = snap_times[snap_idx];
            if t + h >= s {
                h = s - t;
                snapped_to = Some(s);
                snap_idx += 1;
            }
        }
        if h <= 0.0 || t + h == t {
            return Err(Error::PathAborted { kind: AbortKind::StepUnderflow, t, step: steps, state: x });
        }

        let z = stream.standard_normal();
        let mut xp = x + sample.drift * h + sample.sigma * h.sqrt() * z;
        if !xp.is_finite() {
            return Err(Error::PathAborted { kind: AbortKind::NonFinite, t, step: steps, state: x });
        }
        if xp < 0.0 {
            match boundary {
                Boundary::Reflect => match reflection {
                    ReflectionScheme::AbsoluteValue => {
                        phi += -2.0 * xp;
                        xp = -xp;
                    }
                    ReflectionScheme::Projection => {
                        phi += -xp;
                        xp = 0.0;
                    }
                },
                Boundary::Clamp => {
                    clamps += 1;
                    xp = 0.0;
                }
            }
        }
        if xp > OVERFLOW_GUARD {
            return Err(Error::PathAborted { kind: AbortKind::Overflow, t, step: steps, state: xp });
        }

        t = snapped_to.unwrap_or(t + h);
        x = xp;
        steps += 1;
        if visitor.visit(t, x, phi).is_break() {
            stopped_early = true;
        }
    }

    Ok(SimSummary {
        steps,
        final_time: t,
        final_state: x,
        local_time: phi,
        boundary_clamps: clamps,
        stopped_early,
    })
}

/// Simulate one full path of length `>= 2` ending at the first grid time
/// `>= horizon`.
pub fn simulate_path<C: SdeCoefficients>(
    coeffs: &C,
    x0: f64,
    horizon: f64,
    policy: &StepPolicy,
    stream: &mut Stream,
) -> Result<Path> {
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut local_time = Vec::new();
    let mut rec = |t: f64, x: f64, phi: f64| -> ControlFlow<()> {
        times.push(t);
        states.push(x);
        local_time.push(phi);
        ControlFlow::Continue(())
    };
    let id = stream.id();
    let summary = simulate_visit(coeffs, x0, horizon, policy, stream, &[], &mut rec)?;
    Ok(Path { times, states, local_time, seed_id: id, boundary_clamps: summary.boundary_clamps })
}

// ---------------------------------------------------------------------------
// Random time change
// ---------------------------------------------------------------------------

/// The random clock `χ_t = ∫₀^t f^{-2}(Y_s) ds` of a driving path and its
/// generalized inverse `β`, both piecewise linear on the path grid.
#[derive(Debug, Clone)]
pub struct TimeChange {
    times: Vec<f64>,
    chi: Vec<f64>,
    max_slope: f64,
}

impl TimeChange {
    /// Per-step trapezoid accumulation of `f^{-2}` along the path.
    pub fn from_path(y: &Path, sf: &SpeedFunction) -> Self {
        let n = y.times.len();
        let mut chi = Vec::with_capacity(n);
        let mut max_slope = 0.0f64;
        chi.push(0.0);
        let mut g_prev = sf.inv_f2(y.states[0]);
        let mut acc = 0.0;
        for i in 1..n {
            let g = sf.inv_f2(y.states[i]);
            let dt = y.times[i] - y.times[i - 1];
            let slope = 0.5 * (g_prev + g);
            acc += slope * dt;
            chi.push(acc);
            max_slope = max_slope.max(slope);
            g_prev = g;
        }
        TimeChange { times: y.times.clone(), chi, max_slope }
    }

    pub fn chi_end(&self) -> f64 {
        *self.chi.last().expect("non-empty")
    }

    /// Largest per-step slope of `χ` (bounded by `a^{-1}` for a valid speed
    /// envelope constant `a`).
    pub fn max_slope(&self) -> f64 {
        self.max_slope
    }

    /// `χ(t)`, piecewise linear.
    pub fn chi(&self, t: f64) -> f64 {
        piecewise_linear(&self.times, &self.chi, t)
    }

    /// `β(u) = χ^{-1}(u)`, piecewise linear on the same grid.
    pub fn beta(&self, u: f64) -> f64 {
        piecewise_linear(&self.chi, &self.times, u)
    }
}

fn piecewise_linear(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    let n = xs.len();
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let i = match xs.binary_search_by(|v| v.partial_cmp(&x).expect("finite")) {
        Ok(i) => return ys[i],
        Err(i) => i - 1,
    };
    let w = xs[i + 1] - xs[i];
    if w <= 0.0 {
        return ys[i + 1];
    }
    let f = (x - xs[i]) / w;
    ys[i] + f * (ys[i + 1] - ys[i])
}

/// `χ` at the end of a driving path.
pub fn chi_end(y: &Path, sf: &SpeedFunction) -> f64 {
    TimeChange::from_path(y, sf).chi_end()
}

/// Map a unit-noise path onto the accelerated clock: the returned path has
/// times `χ(t_i)` (truncated at the first image time `>= t_new`) and the same
/// states and local time.
///
/// Fails with [`Error::HorizonExhausted`] when `χ` at the end of the driving
/// path is still below `t_new`.
pub fn time_change_path(y: &Path, sf: &SpeedFunction, t_new: f64) -> Result<Path> {
    if !(t_new > 0.0 && t_new.is_finite()) {
        return Err(Error::invalid(format!("target horizon {t_new} must be positive")));
    }
    let tc = TimeChange::from_path(y, sf);
    if tc.chi_end() < t_new {
        return Err(Error::HorizonExhausted { available: tc.chi_end(), required: t_new });
    }
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut local_time = Vec::new();
    for i in 0..tc.chi.len() {
        let ct = tc.chi[i];
        // The accelerated clock can stall at f64 resolution during extreme
        // excursions; keep the rightmost sample of such an instant.
        if let Some(&last) = times.last() {
            if ct <= last {
                let k = times.len() - 1;
                states[k] = y.states[i];
                local_time[k] = y.local_time[i];
                if ct >= t_new {
                    break;
                }
                continue;
            }
        }
        times.push(ct);
        states.push(y.states[i]);
        local_time.push(y.local_time[i]);
        if ct >= t_new {
            break;
        }
    }
    Ok(Path {
        times,
        states,
        local_time,
        seed_id: y.seed_id,
        boundary_clamps: y.boundary_clamps,
    })
}

/// Reproducible streams for an ensemble; stream `i` depends only on
/// `(master_seed, i)`.
pub use crate::rng::make_streams;

/// Convenience constructor used across the diagnostics layer.
pub fn langevin_spec(density: &Arc<crate::density::TargetDensity>) -> ProcessSpec {
    ProcessSpec::langevin(Arc::clone(density))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{bibby_coefficients, speed_function};
    use crate::density::{make_density, DensityModel};
    use crate::rng::NormalMethod;
    use proptest::prelude::*;

    struct Degenerate {
        drift: f64,
        sigma: f64,
    }

    impl SdeCoefficients for Degenerate {
        fn drift(&self, _x: f64) -> f64 {
            self.drift
        }
        fn sigma(&self, _x: f64) -> f64 {
            self.sigma
        }
        fn boundary(&self) -> Boundary {
            Boundary::Reflect
        }
        fn adaptive_speed_f2(&self, _x: f64) -> Option<f64> {
            None
        }
    }

    fn stream(i: u64) -> Stream {
        Stream::new(4242, i, NormalMethod::InverseCdf)
    }

    #[test]
    fn degenerate_coefficients_give_constant_path() {
        let c = Degenerate { drift: 0.0, sigma: 0.0 };
        let policy = StepPolicy::uniform(0.3).unwrap();
        let p = simulate_path(&c, 3.0, 1.0, &policy, &mut stream(0)).unwrap();
        p.check_invariants().unwrap();
        assert!(p.len() >= 2);
        assert!(p.states.iter().all(|&x| x == 3.0));
        assert!(p.local_time.iter().all(|&v| v == 0.0));
        // Ends at the first grid time >= horizon.
        let end = *p.times.last().unwrap();
        assert!(end >= 1.0 && end < 1.0 + 0.3 + 1e-12);
    }

    #[test]
    fn reflection_keeps_positivity_and_counts_local_time() {
        let c = Degenerate { drift: 0.0, sigma: 1.0 };
        let policy = StepPolicy::uniform(0.01).unwrap();
        let p = simulate_path(&c, 0.05, 5.0, &policy, &mut stream(1)).unwrap();
        p.check_invariants().unwrap();
        assert!(*p.local_time.last().unwrap() > 0.0, "a path hugging zero must reflect");

        // Far from the boundary the local time stays exactly zero.
        let p = simulate_path(&c, 50.0, 1.0, &policy, &mut stream(2)).unwrap();
        assert_eq!(*p.local_time.last().unwrap(), 0.0);

        // Projection variant also stays on the half-line.
        let policy = policy.with_reflection(ReflectionScheme::Projection);
        let p = simulate_path(&c, 0.05, 5.0, &policy, &mut stream(3)).unwrap();
        p.check_invariants().unwrap();
    }

    #[test]
    fn snap_times_are_hit_exactly() {
        let c = Degenerate { drift: 0.0, sigma: 1.0 };
        let policy = StepPolicy::uniform(0.037).unwrap();
        let snaps = [0.5, 1.0, 1.7];
        let mut seen = Vec::new();
        let mut v = |t: f64, _x: f64, _p: f64| {
            if snaps.contains(&t) {
                seen.push(t);
            }
            ControlFlow::Continue(())
        };
        simulate_visit(&c, 1.0, 2.0, &policy, &mut stream(4), &snaps, &mut v).unwrap();
        assert_eq!(seen, snaps);
    }

    #[test]
    fn aborts_are_reported() {
        let c = Degenerate { drift: 1e29, sigma: 0.0 };
        let policy = StepPolicy::uniform(10.0).unwrap();
        let err = simulate_path(&c, 1.0, 100.0, &policy, &mut stream(5)).unwrap_err();
        assert!(matches!(err, Error::PathAborted { kind: AbortKind::Overflow, .. }), "{err}");

        let c = Degenerate { drift: f64::NAN, sigma: 0.0 };
        let err = simulate_path(&c, 1.0, 1.0, &policy, &mut stream(6)).unwrap_err();
        assert!(matches!(err, Error::PathAborted { kind: AbortKind::NonFinite, .. }));

        // Adaptive stepping without a speed function is a configuration error.
        let d = Arc::new(make_density(DensityModel::ParetoShifted { m: 5.0 }).unwrap());
        let spec = ProcessSpec::langevin(Arc::clone(&d));
        let policy = StepPolicy::adaptive_speed(0.1, 1e-3).unwrap();
        assert!(matches!(
            simulate_path(&spec, 1.0, 1.0, &policy, &mut stream(7)),
            Err(Error::InvalidParameter(_))
        ));

        // A kappa small enough to underflow the step floor aborts.
        let sf = Arc::new(speed_function(&d, 1.0, 1.0).unwrap());
        let spec = ProcessSpec::accelerated(sf);
        let policy = StepPolicy::adaptive_speed(0.1, 1e-25).unwrap();
        let err = simulate_path(&spec, 5.0, 1.0, &policy, &mut stream(8)).unwrap_err();
        assert!(matches!(err, Error::PathAborted { kind: AbortKind::StepUnderflow, .. }));
    }

    #[test]
    fn bibby_clamps_are_counted_not_reflected() {
        let d = Arc::new(make_density(DensityModel::ParetoShifted { m: 5.0 }).unwrap());
        let bc = Arc::new(bibby_coefficients(&d).unwrap());
        let spec = ProcessSpec::bibby(bc);
        let policy = StepPolicy::uniform(0.05).unwrap();
        let p = simulate_path(&spec, 0.01, 50.0, &policy, &mut stream(9)).unwrap();
        p.check_invariants().unwrap();
        assert_eq!(*p.local_time.last().unwrap(), 0.0, "no local time for the clamped model");
    }

    #[test]
    fn identity_time_change_preserves_the_clock() {
        let d = Arc::new(make_density(DensityModel::ParetoShifted { m: 5.0 }).unwrap());
        // c₂ → 0 emulates constant unit speed.
        let sf = speed_function(&d, 1.0, 1e-14).unwrap();
        let y = simulate_path(
            &ProcessSpec::langevin(Arc::clone(&d)),
            1.0,
            2.0,
            &StepPolicy::uniform(0.01).unwrap(),
            &mut stream(10),
        )
        .unwrap();
        let x = time_change_path(&y, &sf, chi_end(&y, &sf)).unwrap();
        assert_eq!(x.states.len(), x.times.len());
        for (ty, tx) in y.times.iter().zip(x.times.iter()) {
            assert!((ty - tx).abs() < 1e-8, "{ty} vs {tx}");
        }
    }

    #[test]
    fn constant_path_time_change_is_exact() {
        let d = Arc::new(make_density(DensityModel::ParetoShifted { m: 5.0 }).unwrap());
        let sf = speed_function(&d, 1.0, 1.0).unwrap();
        let id = stream(0).id();
        // Constant path at zero: χ slope is f^{-2}(0) = 1.
        let y = Path {
            times: vec![0.0, 0.5, 1.0, 1.5],
            states: vec![0.0; 4],
            local_time: vec![0.0; 4],
            seed_id: id,
            boundary_clamps: 0,
        };
        let x = time_change_path(&y, &sf, 1.5).unwrap();
        for (a, b) in y.times.iter().zip(x.times.iter()) {
            assert!((a - b).abs() < 1e-15);
        }

        // Constant path at the state where f² = 3.625: χ(t) = t/3.625
        // exactly under the trapezoid rule.
        let z = 1.0;
        assert!((sf.f2(z) - 3.625).abs() < 1e-12);
        let y = Path {
            times: vec![0.0, 1.0, 2.0],
            states: vec![z; 3],
            local_time: vec![0.0; 3],
            seed_id: id,
            boundary_clamps: 0,
        };
        let tc = TimeChange::from_path(&y, &sf);
        assert!((tc.chi_end() - 2.0 / 3.625).abs() < 1e-15);
        // Single-point path has zero elapsed clock.
        let y1 = Path {
            times: vec![0.0],
            states: vec![z],
            local_time: vec![0.0],
            seed_id: id,
            boundary_clamps: 0,
        };
        assert_eq!(chi_end(&y1, &sf), 0.0);
    }

    #[test]
    fn chi_slope_and_inverse_bounds() {
        let d = Arc::new(make_density(DensityModel::ParetoShifted { m: 5.0 }).unwrap());
        let sf = speed_function(&d, 1.0, 1.0).unwrap();
        let y = simulate_path(
            &ProcessSpec::langevin(Arc::clone(&d)),
            2.0,
            10.0,
            &StepPolicy::uniform(5e-3).unwrap(),
            &mut stream(11),
        )
        .unwrap();
        let tc = TimeChange::from_path(&y, &sf);
        let inv_a = 1.0 / sf.a_env();
        assert!(tc.max_slope() <= inv_a + 1e-12, "slope {} vs {}", tc.max_slope(), inv_a);
        assert!(tc.chi_end() <= inv_a * y.duration() + 1e-12);
        // β inverts χ on the grid.
        for &t in y.times.iter().step_by(97) {
            let u = tc.chi(t);
            assert!((tc.beta(u) - t).abs() < 1e-9);
        }
    }

    #[test]
    fn horizon_exhausted_is_explicit() {
        let d = Arc::new(make_density(DensityModel::ParetoShifted { m: 5.0 }).unwrap());
        let sf = speed_function(&d, 1.0, 1.0).unwrap();
        let y = simulate_path(
            &ProcessSpec::langevin(Arc::clone(&d)),
            5.0,
            0.5,
            &StepPolicy::uniform(0.01).unwrap(),
            &mut stream(12),
        )
        .unwrap();
        let need = chi_end(&y, &sf) * 10.0;
        match time_change_path(&y, &sf, need) {
            Err(Error::HorizonExhausted { available, required }) => {
                assert!(available < required);
            }
            other => panic!("expected horizon exhaustion, got {other:?}"),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn positivity_and_monotone_local_time(
            seed in 0u64..1000,
            x0 in 0.0f64..20.0,
            h in 1e-3f64..0.05,
        ) {
            let d = Arc::new(make_density(DensityModel::ParetoShifted { m: 5.0 }).unwrap());
            let spec = ProcessSpec::langevin(d);
            let mut s = Stream::new(seed, 0, NormalMethod::InverseCdf);
            let p = simulate_path(&spec, x0, 0.5, &StepPolicy::uniform(h).unwrap(), &mut s).unwrap();
            p.check_invariants().unwrap();
        }
    }
}
