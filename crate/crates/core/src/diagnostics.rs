//! Monte-Carlo measurement layer: binned total-variation curves, hitting-time
//! statistics, time-average (law-of-large-numbers) checks, and
//! convergence-rate fits.
//!
//! Total variation against the target is estimated on a fixed histogram
//! whose interior bins carry equal mass under `π` (mass-uniform binning;
//! width-uniform bins either waste resolution or truncate heavy tails) plus
//! one tail bin. The reported quantity is the binned TV
//! `½ Σ |p̂_b - π_b|`, a lower bound for the continuous TV, with a bootstrap
//! standard error from path resampling.

use std::ops::ControlFlow;
use std::sync::Arc;

use rayon::prelude::*;

use crate::construct::ProcessSpec;
use crate::density::TargetDensity;
use crate::error::{Error, Result};
use crate::numerics::quad;
use crate::rng::{NormalMethod, Stream};
use crate::sde::{simulate_visit, StepPolicy};
use crate::stats::{self, OlsFit};

// ---------------------------------------------------------------------------
// Seeding
// ---------------------------------------------------------------------------

/// Stream addressing for one ensemble: path `i` of block `b` uses stream
/// index `(b << 32) | i`, so sub-experiments sharing a master seed stay
/// independent.
#[derive(Debug, Clone, Copy)]
pub struct Seeding {
    pub master_seed: u64,
    pub block: u32,
    pub method: NormalMethod,
}

impl Seeding {
    pub fn new(master_seed: u64) -> Self {
        Seeding { master_seed, block: 0, method: NormalMethod::InverseCdf }
    }

    pub fn with_block(mut self, block: u32) -> Self {
        self.block = block;
        self
    }

    pub fn with_method(mut self, method: NormalMethod) -> Self {
        self.method = method;
        self
    }

    pub fn path_stream(&self, i: usize) -> Stream {
        assert!(i < u32::MAX as usize, "path index exceeds the stream block");
        Stream::new(self.master_seed, ((self.block as u64) << 32) | i as u64, self.method)
    }

    /// Stream reserved for bootstrap resampling within this block.
    fn bootstrap_stream(&self) -> Stream {
        Stream::new(
            self.master_seed,
            ((self.block as u64) << 32) | u32::MAX as u64,
            self.method,
        )
    }
}

/// Initial-condition policy for an ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum X0Policy {
    Fixed(f64),
    /// Draw the initial state from `π` by inverse CDF (stationary start).
    Stationary,
}

impl X0Policy {
    fn describe(&self) -> String {
        match self {
            X0Policy::Fixed(x) => format!("fixed({x})"),
            X0Policy::Stationary => "stationary".to_string(),
        }
    }

    fn draw(&self, density: &TargetDensity, stream: &mut Stream) -> Result<f64> {
        match *self {
            X0Policy::Fixed(x) => Ok(x),
            X0Policy::Stationary => density.quantile(stream.uniform_open()),
        }
    }
}

// ---------------------------------------------------------------------------
// Mass-uniform histogram
// ---------------------------------------------------------------------------

/// Histogram with `interior` equal-mass bins on `[0, q(level)]` plus one
/// tail bin.
#[derive(Debug, Clone)]
pub struct PiHistogram {
    /// Interior bin edges, length `interior + 1`, from 0 to the quantile.
    pub edges: Vec<f64>,
    /// Target mass per bin, length `interior + 1` (last entry = tail bin).
    pub masses: Vec<f64>,
    pub quantile_level: f64,
}

impl PiHistogram {
    /// Build with `interior` bins below the `level`-quantile. The achieved
    /// masses are recomputed from the CDF so edge rounding cannot bias the
    /// TV estimate.
    pub fn new(density: &TargetDensity, interior: usize, level: f64) -> Result<Self> {
        if interior < 2 || !(0.5 < level && level < 1.0) {
            return Err(Error::invalid(format!(
                "histogram needs >= 2 interior bins and level in (0.5, 1), got {interior}, {level}"
            )));
        }
        let mut edges = Vec::with_capacity(interior + 1);
        edges.push(0.0);
        for j in 1..=interior {
            edges.push(density.quantile(level * j as f64 / interior as f64)?);
        }
        let mut masses = Vec::with_capacity(interior + 1);
        for w in edges.windows(2) {
            masses.push(density.cdf(w[1]) - density.cdf(w[0]));
        }
        masses.push(1.0 - density.cdf(*edges.last().expect("non-empty")));
        Ok(PiHistogram { edges, masses, quantile_level: level })
    }

    /// Total number of bins including the tail bin.
    pub fn bins(&self) -> usize {
        self.masses.len()
    }

    #[inline]
    pub fn bin_index(&self, x: f64) -> usize {
        // edges[0] = 0 <= x always; the tail bin catches everything beyond.
        match self.edges.binary_search_by(|e| e.partial_cmp(&x).expect("finite")) {
            Ok(i) => i.min(self.bins() - 1),
            Err(i) => i - 1,
        }
    }

    /// Binned TV `½ Σ |count_b/n - π_b|`.
    pub fn tv_from_counts(&self, counts: &[u32], n: usize) -> f64 {
        debug_assert_eq!(counts.len(), self.bins());
        let nf = n as f64;
        0.5 * counts
            .iter()
            .zip(self.masses.iter())
            .map(|(&c, &p)| (c as f64 / nf - p).abs())
            .sum::<f64>()
    }
}

/// Analytic noise floor of the binned TV estimator: `√(2B/(π·n))`.
pub fn tv_noise_floor(bins: usize, ensemble: usize) -> f64 {
    (2.0 * bins as f64 / (std::f64::consts::PI * ensemble as f64)).sqrt()
}

// ---------------------------------------------------------------------------
// TV curves
// ---------------------------------------------------------------------------

/// Behavior when the ensemble is too small for the requested binning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SparseBinPolicy {
    /// Reduce the bin count / retract the tail quantile until every bin
    /// expects at least five hits.
    #[default]
    Coarsen,
    Error,
}

/// Options for TV-curve estimation.
#[derive(Debug, Clone, Copy)]
pub struct TvOptions {
    pub interior_bins: usize,
    pub quantile_level: f64,
    pub bootstrap: usize,
    pub sparse: SparseBinPolicy,
}

impl Default for TvOptions {
    fn default() -> Self {
        TvOptions {
            interior_bins: 64,
            quantile_level: 0.999,
            bootstrap: 200,
            sparse: SparseBinPolicy::default(),
        }
    }
}

/// Estimated binned-TV trajectory of an ensemble.
#[derive(Debug, Clone)]
pub struct TvCurve {
    pub checkpoints: Vec<f64>,
    pub tv: Vec<f64>,
    pub se: Vec<f64>,
    pub ensemble_size: usize,
    /// Total bins including the tail bin.
    pub bins: usize,
    pub quantile_level: f64,
    pub x0_policy: String,
}

impl TvCurve {
    /// Curve from externally computed values (synthetic fits, file reload).
    pub fn from_values(checkpoints: Vec<f64>, tv: Vec<f64>, bins: usize, ensemble: usize) -> Self {
        let n = checkpoints.len();
        assert_eq!(tv.len(), n);
        TvCurve {
            checkpoints,
            tv,
            se: vec![0.0; n],
            ensemble_size: ensemble,
            bins,
            quantile_level: f64::NAN,
            x0_policy: "synthetic".to_string(),
        }
    }

    pub fn noise_floor(&self) -> f64 {
        tv_noise_floor(self.bins, self.ensemble_size)
    }
}

fn effective_binning(opts: &TvOptions, ensemble: usize) -> Result<(usize, f64)> {
    let mut interior = opts.interior_bins;
    let mut level = opts.quantile_level;
    let enough = |interior: usize, level: f64| {
        let head = ensemble as f64 * level / interior as f64;
        let tail = ensemble as f64 * (1.0 - level);
        head >= 5.0 && tail >= 5.0
    };
    if enough(interior, level) {
        return Ok((interior, level));
    }
    match opts.sparse {
        SparseBinPolicy::Error => Err(Error::invalid(format!(
            "ensemble {ensemble} too small for {interior} bins at level {level} \
             (expected count below 5)"
        ))),
        SparseBinPolicy::Coarsen => {
            while !enough(interior, level) && interior > 8 {
                interior /= 2;
            }
            while !enough(interior, level) && level > 0.6 {
                level = 1.0 - 2.0 * (1.0 - level);
            }
            if !enough(interior, level) {
                return Err(Error::invalid(format!(
                    "ensemble {ensemble} too small even for {interior} bins at level {level}"
                )));
            }
            Ok((interior, level))
        }
    }
}

/// Simulate an ensemble and collect raw states at every checkpoint.
///
/// Returned matrix is indexed `[checkpoint][path]`. Aborted paths surface as
/// errors; completing the whole ensemble is part of the non-explosion
/// contract.
pub fn ensemble_checkpoint_states(
    spec: &ProcessSpec,
    x0: X0Policy,
    checkpoints: &[f64],
    ensemble: usize,
    policy: &StepPolicy,
    seeding: Seeding,
) -> Result<Vec<Vec<f64>>> {
    if checkpoints.is_empty() || checkpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("checkpoints must be non-empty and strictly increasing"));
    }
    if !(checkpoints[0] > 0.0) {
        return Err(Error::invalid("checkpoints must be positive"));
    }
    let horizon = *checkpoints.last().expect("non-empty");
    let density = spec.density();

    let per_path: Vec<Vec<f64>> = (0..ensemble)
        .into_par_iter()
        .map(|i| -> Result<Vec<f64>> {
            let mut stream = seeding.path_stream(i);
            let start = x0.draw(density, &mut stream)?;
            let mut states = Vec::with_capacity(checkpoints.len());
            let mut next = 0usize;
            let mut visitor = |t: f64, x: f64, _phi: f64| -> ControlFlow<()> {
                while next < checkpoints.len() && t >= checkpoints[next] {
                    states.push(x);
                    next += 1;
                }
                if next == checkpoints.len() {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            };
            simulate_visit(spec, start, horizon, policy, &mut stream, checkpoints, &mut visitor)?;
            if states.len() != checkpoints.len() {
                return Err(Error::InsufficientData(format!(
                    "path {i} ended before the last checkpoint"
                )));
            }
            Ok(states)
        })
        .collect::<Result<Vec<_>>>()?;

    // Transpose to [checkpoint][path] in deterministic path order.
    let mut out = vec![vec![0.0; ensemble]; checkpoints.len()];
    for (i, row) in per_path.iter().enumerate() {
        for (c, &x) in row.iter().enumerate() {
            out[c][i] = x;
        }
    }
    Ok(out)
}

/// States of the accelerated process at the checkpoints, obtained by driving
/// the unit-noise process and reading it through the random clock
/// `χ_t = ∫ f^{-2}(Y_s) ds` (the construction `X_t = Y_{β_t}` at path level).
///
/// The driving horizon extends itself (deterministically, same streams)
/// until every path's clock covers the last checkpoint.
pub fn time_changed_checkpoint_states(
    sf: &Arc<crate::construct::SpeedFunction>,
    x0: X0Policy,
    checkpoints: &[f64],
    ensemble: usize,
    policy: &StepPolicy,
    seeding: Seeding,
) -> Result<Vec<Vec<f64>>> {
    if checkpoints.is_empty() || checkpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("checkpoints must be non-empty and strictly increasing"));
    }
    let density = sf.density();
    let y_spec = ProcessSpec::langevin(Arc::clone(density));
    let target = *checkpoints.last().expect("non-empty");

    let per_path: Vec<Vec<f64>> = (0..ensemble)
        .into_par_iter()
        .map(|i| -> Result<Vec<f64>> {
            let mut horizon = 4.0 * target;
            for _attempt in 0..8 {
                let mut stream = seeding.path_stream(i);
                let start = x0.draw(density, &mut stream)?;
                let mut states = Vec::with_capacity(checkpoints.len());
                let mut next = 0usize;
                let mut chi = 0.0f64;
                let mut prev: Option<(f64, f64, f64)> = None; // (t, x, g)
                let mut visitor = |t: f64, x: f64, _phi: f64| -> ControlFlow<()> {
                    let g = sf.inv_f2(x);
                    if let Some((tp, xp, gp)) = prev {
                        let chi_new = chi + 0.5 * (gp + g) * (t - tp);
                        // Left-constant sampling on the accelerated clock.
                        while next < checkpoints.len() && chi_new >= checkpoints[next] {
                            states.push(if chi < checkpoints[next] { xp } else { x });
                            next += 1;
                        }
                        chi = chi_new;
                    }
                    prev = Some((t, x, g));
                    if next == checkpoints.len() {
                        ControlFlow::Break(())
                    } else {
                        ControlFlow::Continue(())
                    }
                };
                simulate_visit(&y_spec, start, horizon, policy, &mut stream, &[], &mut visitor)?;
                if states.len() == checkpoints.len() {
                    return Ok(states);
                }
                horizon *= 2.0;
            }
            Err(Error::HorizonExhausted { available: 0.0, required: target })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut out = vec![vec![0.0; ensemble]; checkpoints.len()];
    for (i, row) in per_path.iter().enumerate() {
        for (c, &x) in row.iter().enumerate() {
            out[c][i] = x;
        }
    }
    Ok(out)
}

/// Bin checkpoint states and estimate the binned TV curve with bootstrap
/// standard errors.
pub fn tv_curve_from_states(
    density: &TargetDensity,
    states: &[Vec<f64>],
    checkpoints: &[f64],
    opts: &TvOptions,
    seeding: Seeding,
    x0_desc: String,
) -> Result<TvCurve> {
    let ensemble = states.first().map(|s| s.len()).unwrap_or(0);
    if ensemble == 0 {
        return Err(Error::InsufficientData("empty ensemble".into()));
    }
    let (interior, level) = effective_binning(opts, ensemble)?;
    let hist = PiHistogram::new(density, interior, level)?;
    let bins = hist.bins();

    // Precompute bin indices per checkpoint and path.
    let idx: Vec<Vec<u32>> = states
        .par_iter()
        .map(|row| row.iter().map(|&x| hist.bin_index(x) as u32).collect())
        .collect();

    let mut tv = Vec::with_capacity(checkpoints.len());
    for row in &idx {
        let mut counts = vec![0u32; bins];
        for &b in row {
            counts[b as usize] += 1;
        }
        tv.push(hist.tv_from_counts(&counts, ensemble));
    }

    // Bootstrap over paths, jointly across checkpoints.
    let mut se = vec![0.0; checkpoints.len()];
    if opts.bootstrap >= 8 {
        let mut boot = seeding.bootstrap_stream();
        let mut acc: Vec<(f64, f64)> = vec![(0.0, 0.0); checkpoints.len()];
        for _ in 0..opts.bootstrap {
            let resample: Vec<u32> = (0..ensemble)
                .map(|_| (boot.uniform_open() * ensemble as f64) as u32)
                .collect();
            for (c, row) in idx.iter().enumerate() {
                let mut counts = vec![0u32; bins];
                for &r in &resample {
                    counts[row[r as usize] as usize] += 1;
                }
                let v = hist.tv_from_counts(&counts, ensemble);
                acc[c].0 += v;
                acc[c].1 += v * v;
            }
        }
        let reps = opts.bootstrap as f64;
        for (c, &(s, s2)) in acc.iter().enumerate() {
            let mean = s / reps;
            se[c] = ((s2 / reps - mean * mean).max(0.0) * reps / (reps - 1.0)).sqrt();
        }
    }

    Ok(TvCurve {
        checkpoints: checkpoints.to_vec(),
        tv,
        se,
        ensemble_size: ensemble,
        bins,
        quantile_level: level,
        x0_policy: x0_desc,
    })
}

/// Full TV-curve pipeline: simulate, bin, bootstrap.
pub fn tv_curve(
    spec: &ProcessSpec,
    x0: X0Policy,
    checkpoints: &[f64],
    ensemble: usize,
    policy: &StepPolicy,
    seeding: Seeding,
    opts: &TvOptions,
) -> Result<TvCurve> {
    if ensemble < 100 {
        return Err(Error::invalid(format!("ensemble {ensemble} is too small to bin")));
    }
    let states = ensemble_checkpoint_states(spec, x0, checkpoints, ensemble, policy, seeding)?;
    tv_curve_from_states(spec.density(), &states, checkpoints, opts, seeding, x0.describe())
}

// ---------------------------------------------------------------------------
// Hitting-time statistics
// ---------------------------------------------------------------------------

/// Monte-Carlo samples of the hitting time `γ = inf{t: X_t <= K}` and the
/// derived moment estimates.
#[derive(Debug, Clone)]
pub struct HittingStats {
    pub k_threshold: f64,
    pub x0: f64,
    pub horizon: f64,
    pub samples: Vec<f64>,
    pub censored: usize,
    /// `v̂_q = mean(γ^q)` with standard errors, `q = 1..=q_max`.
    pub moments: Vec<stats::MeanSe>,
    /// `Ê e^{αγ}` with standard errors, per requested `α`.
    pub exp_moments: Vec<(f64, stats::MeanSe)>,
}

/// Estimate hitting-time moments from `ensemble` paths started at `x0`.
///
/// Fails when more than `censor_limit` (default 1%) of the paths have not
/// hit `[0, K]` by the horizon, since censoring biases the exponential
/// moment.
#[allow(clippy::too_many_arguments)]
pub fn hitting_stats(
    spec: &ProcessSpec,
    x0: f64,
    k: f64,
    alphas: &[f64],
    q_max: usize,
    ensemble: usize,
    horizon: f64,
    policy: &StepPolicy,
    seeding: Seeding,
) -> Result<HittingStats> {
    if !(k > 0.0) || x0 < k {
        return Err(Error::invalid(format!("need x0 >= K > 0, got x0 = {x0}, K = {k}")));
    }
    let censor_limit = 0.01;
    let hits: Vec<Option<f64>> = (0..ensemble)
        .into_par_iter()
        .map(|i| -> Result<Option<f64>> {
            let mut stream = seeding.path_stream(i);
            let mut hit: Option<f64> = None;
            let mut visitor = |t: f64, x: f64, _phi: f64| -> ControlFlow<()> {
                if x <= k {
                    hit = Some(t);
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            };
            simulate_visit(spec, x0, horizon, policy, &mut stream, &[], &mut visitor)?;
            Ok(hit)
        })
        .collect::<Result<Vec<_>>>()?;

    let samples: Vec<f64> = hits.iter().filter_map(|h| *h).collect();
    let censored = ensemble - samples.len();
    let fraction = censored as f64 / ensemble as f64;
    if fraction >= censor_limit {
        return Err(Error::CensoringTooHigh { fraction, limit: censor_limit });
    }

    let mut moments = Vec::with_capacity(q_max);
    for q in 1..=q_max {
        let powered: Vec<f64> = samples.iter().map(|&g| g.powi(q as i32)).collect();
        moments.push(stats::mean_se(&powered));
    }
    let mut exp_moments = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let exps: Vec<f64> = samples.iter().map(|&g| (alpha * g).exp()).collect();
        exp_moments.push((alpha, stats::mean_se(&exps)));
    }

    Ok(HittingStats { k_threshold: k, x0, horizon, samples, censored, moments, exp_moments })
}

// ---------------------------------------------------------------------------
// Law-of-large-numbers check
// ---------------------------------------------------------------------------

/// Bounded test functions for the time-average check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GFunction {
    /// `g(r) = (1+r)^{-m-1}` with the density's own exponent.
    PowerTail,
    /// `g(r) = 1/(1+r²)`.
    InverseQuadratic,
    /// `g ≡ 1`, the degenerate control.
    Constant,
}

impl GFunction {
    pub fn name(self) -> &'static str {
        match self {
            GFunction::PowerTail => "power_tail",
            GFunction::InverseQuadratic => "inverse_quadratic",
            GFunction::Constant => "constant",
        }
    }

    fn eval(self, m: f64, r: f64) -> f64 {
        match self {
            GFunction::PowerTail => (1.0 + r).powf(-m - 1.0),
            GFunction::InverseQuadratic => 1.0 / (1.0 + r * r),
            GFunction::Constant => 1.0,
        }
    }
}

/// Result of the time-average check at increasing horizons.
#[derive(Debug, Clone)]
pub struct LlnTable {
    /// Stationary average `a_g = ∫ g π`.
    pub a_g: f64,
    pub epsilon: f64,
    /// Rows `(T, fraction of paths with |time-average - a_g| > ε)`.
    pub rows: Vec<(f64, f64)>,
}

/// Fraction of unit-noise paths whose running time-average of `g` stays
/// outside the `ε`-band around `∫ g dπ`, per horizon in `t_list`.
#[allow(clippy::too_many_arguments)]
pub fn lln_check(
    density: &Arc<TargetDensity>,
    g: GFunction,
    t_list: &[f64],
    ensemble: usize,
    x0: f64,
    epsilon_fraction: f64,
    policy: &StepPolicy,
    seeding: Seeding,
) -> Result<LlnTable> {
    if t_list.is_empty() || t_list.windows(2).any(|w| w[1] <= w[0]) || t_list[0] <= 0.0 {
        return Err(Error::invalid("horizons must be positive and strictly increasing"));
    }
    let m = density.tail_exponent();
    let a_g = match g {
        GFunction::Constant => 1.0,
        _ => {
            let head = quad::integrate(
                |r| g.eval(m, r) * density.pi(r),
                0.0,
                density.tail_cutoff(),
                1e-12,
                0.0,
            )?;
            // The integrand tail is below (1+x)^{-m} * g(cutoff); negligible
            // mass by the same argument as the normalization tail.
            head.value + g.eval(m, density.tail_cutoff()) * density.tail_mass(density.tail_cutoff())
        }
    };
    let epsilon = epsilon_fraction * a_g;
    let horizon = *t_list.last().expect("non-empty");
    let spec = ProcessSpec::langevin(Arc::clone(density));

    let averages: Vec<Vec<f64>> = (0..ensemble)
        .into_par_iter()
        .map(|i| -> Result<Vec<f64>> {
            let mut stream = seeding.path_stream(i);
            let mut acc = 0.0f64;
            let mut out = Vec::with_capacity(t_list.len());
            let mut next = 0usize;
            let mut prev: Option<(f64, f64)> = None; // (t, g(x))
            let mut visitor = |t: f64, x: f64, _phi: f64| -> ControlFlow<()> {
                let gv = g.eval(m, x);
                if let Some((tp, gp)) = prev {
                    acc += 0.5 * (gp + gv) * (t - tp);
                }
                prev = Some((t, gv));
                while next < t_list.len() && t >= t_list[next] {
                    out.push(acc / t_list[next]);
                    next += 1;
                }
                if next == t_list.len() {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            };
            simulate_visit(&spec, x0, horizon, policy, &mut stream, t_list, &mut visitor)?;
            if out.len() != t_list.len() {
                return Err(Error::InsufficientData(format!("path {i} missed a horizon")));
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    let rows = t_list
        .iter()
        .enumerate()
        .map(|(c, &t)| {
            let exceed = averages.iter().filter(|row| (row[c] - a_g).abs() > epsilon).count();
            (t, exceed as f64 / ensemble as f64)
        })
        .collect();
    Ok(LlnTable { a_g, epsilon, rows })
}

// ---------------------------------------------------------------------------
// Rate fits
// ---------------------------------------------------------------------------

/// Convergence-rate model for TV-curve fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModel {
    /// `TV(t) = C e^{-λt}`: least squares on `(t, ln TV)`.
    Exponential,
    /// `TV(t) = C t^{-k}`: least squares on `(ln t, ln TV)`.
    Polynomial,
}

impl FitModel {
    pub fn name(self) -> &'static str {
        match self {
            FitModel::Exponential => "exponential",
            FitModel::Polynomial => "polynomial",
        }
    }
}

/// Window of checkpoints used in a rate fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitWindow {
    /// From the first checkpoint with `TV < 0.5` (past the transport
    /// transient) to the last with `TV >= 3x` the noise floor.
    Auto,
    Range(f64, f64),
}

/// A fitted convergence rate.
#[derive(Debug, Clone)]
pub struct RateFit {
    pub model: FitModel,
    /// Decay rate: `λ` (exponential) or `k` (polynomial); positive when the
    /// curve decays.
    pub rate: f64,
    pub rate_ci95: f64,
    /// Fitted prefactor `C`.
    pub amplitude: f64,
    pub r2: f64,
    pub window: (f64, f64),
    pub n_points: usize,
    pub ols: OlsFit,
}

/// Fit a decay model to a TV curve over a window of usable checkpoints.
pub fn rate_fit(curve: &TvCurve, model: FitModel, window: FitWindow) -> Result<RateFit> {
    let floor = 3.0 * curve.noise_floor();
    let (lo, hi) = match window {
        FitWindow::Range(lo, hi) => (lo, hi),
        FitWindow::Auto => {
            let start = curve
                .checkpoints
                .iter()
                .zip(curve.tv.iter())
                .find(|(_, &tv)| tv < 0.5)
                .map(|(&t, _)| t)
                .ok_or_else(|| {
                    Error::InsufficientData("curve never drops below the burn-in level".into())
                })?;
            let end = curve
                .checkpoints
                .iter()
                .zip(curve.tv.iter())
                .filter(|&(&t, &tv)| t >= start && tv > floor)
                .map(|(&t, _)| t)
                .last()
                .ok_or_else(|| {
                    Error::InsufficientData("no checkpoints above the noise floor".into())
                })?;
            (start, end)
        }
    };

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, &t) in curve.checkpoints.iter().enumerate() {
        let tv = curve.tv[i];
        if t < lo || t > hi || !(tv > 0.0) {
            continue;
        }
        if matches!(window, FitWindow::Auto) && tv <= floor {
            continue;
        }
        match model {
            FitModel::Exponential => {
                xs.push(t);
                ys.push(tv.ln());
            }
            FitModel::Polynomial => {
                xs.push(t.ln());
                ys.push(tv.ln());
            }
        }
    }
    if xs.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "only {} usable checkpoints in the fit window [{lo}, {hi}]",
            xs.len()
        )));
    }
    let fit = stats::ols(&xs, &ys)?;
    Ok(RateFit {
        model,
        rate: -fit.slope,
        rate_ci95: fit.slope_ci95(),
        amplitude: fit.intercept.exp(),
        r2: fit.r2,
        window: (lo, hi),
        n_points: xs.len(),
        ols: fit,
    })
}

// ---------------------------------------------------------------------------
// Initial-condition sweep
// ---------------------------------------------------------------------------

/// Per-start TV curves plus the final-checkpoint uniformity statistic.
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub x0_list: Vec<f64>,
    pub curves: Vec<TvCurve>,
    /// Max-over-starts TV at each checkpoint.
    pub max_tv: Vec<f64>,
    /// Spread (max - min) of TV at the final checkpoint.
    pub final_spread: f64,
    /// Pooled standard error of the two extreme curves at the final
    /// checkpoint.
    pub final_pooled_se: f64,
    /// Whether the final spread is below 3x the pooled standard error.
    pub collapsed: bool,
}

/// Run one TV curve per starting point and report whether the curves
/// collapse at the final checkpoint.
pub fn initial_condition_sweep(
    spec: &ProcessSpec,
    x0_list: &[f64],
    checkpoints: &[f64],
    ensemble: usize,
    policy: &StepPolicy,
    seeding: Seeding,
    opts: &TvOptions,
) -> Result<SweepReport> {
    if x0_list.is_empty() {
        return Err(Error::invalid("sweep needs at least one starting point"));
    }
    let mut curves = Vec::with_capacity(x0_list.len());
    for (j, &x0) in x0_list.iter().enumerate() {
        let block_seeding = seeding.with_block(seeding.block + j as u32 + 1);
        curves.push(tv_curve(
            spec,
            X0Policy::Fixed(x0),
            checkpoints,
            ensemble,
            policy,
            block_seeding,
            opts,
        )?);
    }
    let last = checkpoints.len() - 1;
    let max_tv: Vec<f64> = (0..checkpoints.len())
        .map(|c| curves.iter().map(|cv| cv.tv[c]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let (mut i_max, mut i_min) = (0usize, 0usize);
    for (j, cv) in curves.iter().enumerate() {
        if cv.tv[last] > curves[i_max].tv[last] {
            i_max = j;
        }
        if cv.tv[last] < curves[i_min].tv[last] {
            i_min = j;
        }
    }
    let final_spread = curves[i_max].tv[last] - curves[i_min].tv[last];
    let final_pooled_se =
        (curves[i_max].se[last].powi(2) + curves[i_min].se[last].powi(2)).sqrt();
    Ok(SweepReport {
        x0_list: x0_list.to_vec(),
        curves,
        max_tv,
        final_spread,
        final_pooled_se,
        collapsed: final_spread <= 3.0 * final_pooled_se,
    })
}
