//! Coefficient construction for the three diffusions and numerical checks of
//! the identities that make the target density stationary.
//!
//! For a target `π` with Langevin drift `b = ½(ln π)'`:
//!
//! * `LangevinY`: drift `b`, unit noise, reflected at zero.
//! * `AcceleratedX`: drift `f²·b`, noise `f`, reflected at zero, where
//!   `f²(z) = c₁ + c₂ ∫₀^z dy/π(y)` grows like `(1+z)^{m+1}` and is pinned by
//!   `(f²)'·π ≡ c₂`.
//! * `BibbyZ`: drift `-(z-μ)`, noise `√v(z)` with
//!   `v(z) = 2·π(z)^{-1} ∫₀^z (μ-s)π(s) ds`, the half-line form of the
//!   affine-drift construction.

use std::sync::Arc;

use crate::density::TargetDensity;
use crate::error::{Error, Result};
use crate::numerics::{fd, grid, interp::CubicHermite, quad};

/// Langevin drift `b(x) = ½ (ln π)'(x)`.
#[inline]
pub fn drift_b(density: &TargetDensity, x: f64) -> f64 {
    0.5 * density.log_pi_prime(x)
}

// ---------------------------------------------------------------------------
// Speed function
// ---------------------------------------------------------------------------

/// Relative accuracy target for the cached cumulative integral of `1/π`.
const SPEED_CACHE_REL_TOL: f64 = 1e-12;

/// The speed factor `f²(z) = c₁ + c₂ ∫₀^z dy/π(y)` of the accelerated
/// process.
///
/// Immutable after construction. Evaluation uses the model's closed form
/// when available and a cumulative cache (geometric grid, exact node slopes)
/// otherwise.
#[derive(Debug, Clone)]
pub struct SpeedFunction {
    density: Arc<TargetDensity>,
    c1: f64,
    c2: f64,
    /// Envelope constant: `a(1+z)^{m+1} <= f²(z) <= a^{-1}(1+z)^{m+1}`.
    a_env: f64,
    cache: Option<CubicHermite>,
    /// Cached integral value at the end of the grid.
    cache_end_value: f64,
    /// `lim π(x)(1+x)^m`, used for the analytic extension beyond the cache.
    tail_coeff: f64,
}

impl SpeedFunction {
    pub fn density(&self) -> &Arc<TargetDensity> {
        &self.density
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    /// Stored envelope constant `a ∈ (0, 1]`.
    pub fn a_env(&self) -> f64 {
        self.a_env
    }

    /// Cumulative integral `∫₀^z dy/π(y)`.
    #[inline]
    pub fn integral_inv_pi(&self, z: f64) -> f64 {
        if let Some(g) = self.density.closed_form_inv_pi_integral(z) {
            return g;
        }
        let cache = self.cache.as_ref().expect("cache built when no closed form");
        if z <= cache.max_x() {
            cache.eval(z)
        } else {
            // 1/π(y) ~ (1+y)^m / tail_coeff beyond the cache.
            let m = self.density.tail_exponent();
            let ext = ((1.0 + z).powf(m + 1.0) - (1.0 + cache.max_x()).powf(m + 1.0))
                / (self.tail_coeff * (m + 1.0));
            self.cache_end_value + ext
        }
    }

    /// `f²(z)`.
    #[inline]
    pub fn f2(&self, z: f64) -> f64 {
        self.c1 + self.c2 * self.integral_inv_pi(z)
    }

    /// `f(z) = √(f²(z))`.
    #[inline]
    pub fn f(&self, z: f64) -> f64 {
        self.f2(z).sqrt()
    }

    /// `1/f²(z)`, the integrand of the time change.
    #[inline]
    pub fn inv_f2(&self, z: f64) -> f64 {
        1.0 / self.f2(z)
    }

    /// Exact derivative `(f²)'(z) = c₂/π(z)`.
    #[inline]
    pub fn f2_prime(&self, z: f64) -> f64 {
        self.c2 / self.density.pi(z)
    }
}

/// Build the speed function for `(c₁, c₂)`; defaults in the experiments are
/// `(1, 1)`.
pub fn speed_function(
    density: &Arc<TargetDensity>,
    c1: f64,
    c2: f64,
) -> Result<SpeedFunction> {
    if !(c1 > 0.0 && c1.is_finite()) || !(c2 > 0.0 && c2.is_finite()) {
        return Err(Error::invalid(format!(
            "speed constants must be positive and finite, got c1 = {c1}, c2 = {c2}"
        )));
    }
    let mut sf = SpeedFunction {
        density: Arc::clone(density),
        c1,
        c2,
        a_env: f64::NAN,
        cache: None,
        cache_end_value: 0.0,
        tail_coeff: density.tail_coefficient(),
    };

    if !density.has_closed_form_speed_integral() {
        // Geometric nodes up to the density's tail cutoff; the node ratio
        // keeps the cubic Hermite error of the (1+z)^{m+1}-type integral
        // below the 1e-10 relative target. Beyond the cutoff the integral
        // continues with the analytic power-law tail of 1/π.
        let nodes = grid::geometric(0.0, density.tail_cutoff(), 3200);
        let mut values = Vec::with_capacity(nodes.len());
        let mut slopes = Vec::with_capacity(nodes.len());
        values.push(0.0);
        slopes.push(1.0 / density.pi(0.0));
        let mut acc = 0.0;
        for w in nodes.windows(2) {
            let cell =
                quad::integrate(|y| 1.0 / density.pi(y), w[0], w[1], SPEED_CACHE_REL_TOL, 0.0)?;
            acc += cell.value;
            values.push(acc);
            slopes.push(1.0 / density.pi(w[1]));
        }
        sf.cache_end_value = acc;
        sf.cache = Some(CubicHermite::with_slopes(nodes, values, slopes));
    }

    sf.a_env = envelope_a(&sf);
    Ok(sf)
}

/// Envelope constant for `f²` against `(1+z)^{m+1}`.
fn envelope_a(sf: &SpeedFunction) -> f64 {
    let d = sf.density.as_ref();
    let m = d.tail_exponent();
    if d.has_closed_form_speed_integral() {
        // For the pure power law the ratio f²(z)(1+z)^{-m-1} moves
        // monotonically between c₁ at zero and c₂/((m-1)(m+1)) at infinity,
        // so the envelope constant is exact up to an ulp cushion.
        let r0 = sf.c1;
        let rinf = sf.c2 / ((m - 1.0) * (m + 1.0));
        let lo = r0.min(rinf);
        let hi = r0.max(rinf);
        return lo.min(1.0 / hi).min(1.0) * (1.0 - 1e-12);
    }
    let scan = grid::geometric(0.0, 1e4, 1000);
    let mut r_min = f64::INFINITY;
    let mut r_max = 0.0f64;
    for &z in &scan {
        let r = sf.f2(z) * (1.0 + z).powf(-m - 1.0);
        r_min = r_min.min(r);
        r_max = r_max.max(r);
    }
    // Limit ratio at infinity from the analytic tail of 1/π.
    let rinf = sf.c2 / (sf.tail_coeff * (m + 1.0));
    r_min = r_min.min(rinf);
    r_max = r_max.max(rinf);
    0.99 * r_min.min(1.0 / r_max).min(1.0)
}

// ---------------------------------------------------------------------------
// Affine-drift (Bibby) coefficients
// ---------------------------------------------------------------------------

/// Coefficients of the affine-drift diffusion: the stationary mean `μ` and
/// the diffusion coefficient `v(z) = 2·π(z)^{-1} W(z)` with
/// `W(z) = ∫₀^z (μ-s)π(s) ds`.
#[derive(Debug, Clone)]
pub struct BibbyCoefficients {
    density: Arc<TargetDensity>,
    mu: f64,
    /// `W(z) = ∫_z^∞ (s-μ)π ds` tabulated on a geometric grid (the two forms
    /// of `W` agree because the full integral of `(μ-s)π` vanishes; the tail
    /// form accumulates without cancellation for z beyond μ).
    w_cache: CubicHermite,
    /// Analytic `W` beyond the cache end.
    cache_end: f64,
}

impl BibbyCoefficients {
    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn density(&self) -> &Arc<TargetDensity> {
        &self.density
    }

    /// `W(z) = ∫₀^z (μ-s)π(s) ds`, evaluated through the tail form.
    pub fn w(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 0.0;
        }
        if z >= self.cache_end {
            self.w_tail_analytic(z)
        } else {
            self.w_cache.eval(z)
        }
    }

    /// High-accuracy `W(z)` by direct adaptive quadrature of the tail form;
    /// used by the stationarity residual, not by the simulation path.
    pub fn w_precise(&self, z: f64) -> Result<f64> {
        if z >= self.cache_end {
            return Ok(self.w_tail_analytic(z));
        }
        let d = self.density.as_ref();
        let mu = self.mu;
        let head =
            quad::integrate(|s| (s - mu) * d.pi(s), z, self.cache_end, 1e-13, 1e-300)?;
        Ok(head.value + self.w_tail_analytic(self.cache_end))
    }

    fn w_tail_analytic(&self, z: f64) -> f64 {
        // ∫_z^∞ (s-μ)π ds from the model's analytic tail integrals.
        let d = self.density.as_ref();
        let first = d.tail_first_moment(z);
        first - self.mu * d.tail_mass(z)
    }

    /// Diffusion coefficient `v(z) >= 0`; tiny negative interpolation noise
    /// is clamped to zero.
    #[inline]
    pub fn v(&self, z: f64) -> f64 {
        (2.0 * self.w(z) / self.density.pi(z)).max(0.0)
    }

    /// `v` without the clamp, for the nonnegativity diagnostics.
    pub fn v_unclamped(&self, z: f64) -> f64 {
        2.0 * self.w(z) / self.density.pi(z)
    }
}

/// Build the affine-drift coefficients `(μ, v)` for a target density.
///
/// Fails if the computed `v` dips below `-1e-9` anywhere on the audit grid,
/// which would indicate a construction bug rather than rounding.
pub fn bibby_coefficients(density: &Arc<TargetDensity>) -> Result<BibbyCoefficients> {
    let d = density.as_ref();
    let mu = d.mean();
    let cache_end = d.tail_cutoff();
    let nodes = grid::geometric(0.0, cache_end, 3200);

    // Suffix accumulation from the analytic tail downwards: every cell
    // integral beyond μ is positive, so no cancellation builds up where W is
    // small relative to the summands.
    let n = nodes.len();
    let mut values = vec![0.0; n];
    let mut slopes = vec![0.0; n];
    let tail = d.tail_first_moment(cache_end) - mu * d.tail_mass(cache_end);
    values[n - 1] = tail;
    for i in (0..n - 1).rev() {
        let cell = quad::integrate(
            |s| (s - mu) * d.pi(s),
            nodes[i],
            nodes[i + 1],
            1e-13,
            1e-300,
        )?;
        values[i] = values[i + 1] + cell.value;
    }
    for i in 0..n {
        // W'(z) = (μ - z)π(z) exactly.
        slopes[i] = (mu - nodes[i]) * d.pi(nodes[i]);
    }
    // W(0) = 0 by definition; the accumulated value differs only by the
    // quadrature residue of the vanishing full integral.
    let residue = values[0];
    if residue.abs() > 1e-9 {
        return Err(Error::Quadrature(format!(
            "cumulative first-moment integral does not close: residue {residue:.3e}"
        )));
    }
    values[0] = 0.0;

    let coeffs = BibbyCoefficients {
        density: Arc::clone(density),
        mu,
        w_cache: CubicHermite::with_slopes(nodes, values, slopes),
        cache_end,
    };

    // Nonnegativity audit on the standard diagnostic range.
    for &z in &grid::geometric(0.0, 1e3, 800) {
        let v = coeffs.v_unclamped(z);
        if v < -1e-9 {
            return Err(Error::NegativeDiffusion { z, value: v });
        }
    }
    Ok(coeffs)
}

// ---------------------------------------------------------------------------
// Process specifications
// ---------------------------------------------------------------------------

/// Which of the three diffusions a specification describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProcessKind {
    LangevinY,
    AcceleratedX,
    BibbyZ,
}

impl ProcessKind {
    pub fn name(self) -> &'static str {
        match self {
            ProcessKind::LangevinY => "langevin_y",
            ProcessKind::AcceleratedX => "accelerated_x",
            ProcessKind::BibbyZ => "bibby_z",
        }
    }
}

/// Boundary behavior at zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Non-sticky reflection (discretized by a reflection map per step).
    Reflect,
    /// Natural boundary with a safeguard clamp to zero (affine-drift model,
    /// whose diffusion coefficient vanishes at zero).
    Clamp,
}

/// Drift/diffusion coefficient pair plus boundary rule for one diffusion.
#[derive(Debug, Clone)]
pub struct ProcessSpec {
    kind: ProcessKind,
    density: Arc<TargetDensity>,
    speed: Option<Arc<SpeedFunction>>,
    bibby: Option<Arc<BibbyCoefficients>>,
}

impl ProcessSpec {
    /// Reflected Langevin diffusion: drift `b`, unit noise.
    pub fn langevin(density: Arc<TargetDensity>) -> Self {
        ProcessSpec { kind: ProcessKind::LangevinY, density, speed: None, bibby: None }
    }

    /// Speed-accelerated diffusion: drift `f²b`, noise `f`.
    pub fn accelerated(speed: Arc<SpeedFunction>) -> Self {
        let density = Arc::clone(speed.density());
        ProcessSpec { kind: ProcessKind::AcceleratedX, density, speed: Some(speed), bibby: None }
    }

    /// Affine-drift diffusion: drift `-(z-μ)`, noise `√v(z)`.
    pub fn bibby(coeffs: Arc<BibbyCoefficients>) -> Self {
        let density = Arc::clone(coeffs.density());
        ProcessSpec { kind: ProcessKind::BibbyZ, density, speed: None, bibby: Some(coeffs) }
    }

    pub fn kind(&self) -> ProcessKind {
        self.kind
    }

    pub fn density(&self) -> &Arc<TargetDensity> {
        &self.density
    }

    pub fn speed(&self) -> Option<&Arc<SpeedFunction>> {
        self.speed.as_ref()
    }

    pub fn bibby_coefficients(&self) -> Option<&Arc<BibbyCoefficients>> {
        self.bibby.as_ref()
    }

    pub fn boundary(&self) -> Boundary {
        match self.kind {
            ProcessKind::LangevinY | ProcessKind::AcceleratedX => Boundary::Reflect,
            ProcessKind::BibbyZ => Boundary::Clamp,
        }
    }

    /// Drift coefficient at `x`.
    #[inline]
    pub fn drift(&self, x: f64) -> f64 {
        match self.kind {
            ProcessKind::LangevinY => drift_b(&self.density, x),
            ProcessKind::AcceleratedX => {
                let sf = self.speed.as_ref().expect("accelerated spec has a speed function");
                sf.f2(x) * drift_b(&self.density, x)
            }
            ProcessKind::BibbyZ => {
                let c = self.bibby.as_ref().expect("bibby spec has coefficients");
                c.mu() - x
            }
        }
    }

    /// Diffusion coefficient (noise multiplier) at `x`.
    #[inline]
    pub fn sigma(&self, x: f64) -> f64 {
        match self.kind {
            ProcessKind::LangevinY => 1.0,
            ProcessKind::AcceleratedX => {
                self.speed.as_ref().expect("accelerated spec has a speed function").f(x)
            }
            ProcessKind::BibbyZ => {
                self.bibby.as_ref().expect("bibby spec has coefficients").v(x).sqrt()
            }
        }
    }

    /// `σ²(x)`, avoiding the square root round trip.
    #[inline]
    pub fn sigma_sq(&self, x: f64) -> f64 {
        match self.kind {
            ProcessKind::LangevinY => 1.0,
            ProcessKind::AcceleratedX => {
                self.speed.as_ref().expect("accelerated spec has a speed function").f2(x)
            }
            ProcessKind::BibbyZ => {
                self.bibby.as_ref().expect("bibby spec has coefficients").v(x)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Identity residuals
// ---------------------------------------------------------------------------

/// Cross-check of the identity `(f²)'·π ≡ c₂`.
///
/// The analytic derivative is `c₂/π` by construction, so this operation
/// differentiates the *evaluated* `f²` (closed form or cache) by finite
/// differences and reports `max |FD[f²](x)·π(x) - c₂|` over the grid. It
/// validates the cache and interpolation, not the algebra.
pub fn key_identity_residual(
    density: &TargetDensity,
    sf: &SpeedFunction,
    grid_points: &[f64],
) -> Result<f64> {
    if !grid::is_valid_half_line_grid(grid_points) {
        return Err(Error::invalid("identity grid must be increasing and non-negative"));
    }
    let mut worst: f64 = 0.0;
    for &x in grid_points {
        let h = 1e-6 * (1.0 + x);
        let fd_deriv = if x < h {
            fd::d1_right(|y| sf.f2(y), x, h)
        } else {
            fd::d1(|y| sf.f2(y), x, h)
        };
        worst = worst.max((fd_deriv * density.pi(x) - sf.c2()).abs());
    }
    Ok(worst)
}

/// Max relative residual of the adjoint-generator identity
/// `L*π = ½(σ²π)'' - (drift·π)' = 0` over a grid, by centered finite
/// differences.
///
/// The residual at `x` is normalized by the natural local magnitude
/// `(|σ²π| + (1+x)|drift·π|)/(1+x)²` of the differentiated products.
pub fn stationarity_residual(spec: &ProcessSpec, grid_points: &[f64]) -> Result<f64> {
    if !grid::is_valid_half_line_grid(grid_points) {
        return Err(Error::invalid("residual grid must be increasing and non-negative"));
    }
    match spec.kind() {
        ProcessKind::BibbyZ => {
            let c = spec.bibby_coefficients().expect("bibby spec has coefficients");
            let d = spec.density().as_ref();
            let mu = c.mu();
            let mut worst: f64 = 0.0;
            for &x in grid_points {
                let h = fd_step(x);
                if x - h <= 0.0 {
                    continue;
                }
                // σ²π = 2W; build the FD stencil from one anchor plus local
                // increments so the d² differences see only local quadrature
                // error (the anchor offset cancels in the second difference).
                let w0 = c.w_precise(x)?;
                let dl = quad::integrate(|s| (s - mu) * d.pi(s), x - h, x, 1e-13, 1e-300)?.value;
                let dr = quad::integrate(|s| (s - mu) * d.pi(s), x, x + h, 1e-13, 1e-300)?.value;
                let a_m = 2.0 * (w0 + dl);
                let a_0 = 2.0 * w0;
                let a_p = 2.0 * (w0 - dr);
                let half_a2 = 0.5 * (a_p - 2.0 * a_0 + a_m) / (h * h);
                let b1 = fd::d1(|y| (mu - y) * d.pi(y), x, h);
                let resid = half_a2 - b1;
                let scale = local_scale(a_0, (mu - x) * d.pi(x), x);
                worst = worst.max(resid.abs() / scale);
            }
            Ok(worst)
        }
        ProcessKind::AcceleratedX if !spec.density().has_closed_form_speed_integral() => {
            // For cached speed functions the interpolation curvature would
            // swamp the second difference, so the stencil values of f² are
            // rebuilt from local quadrature increments of c₂/π around the
            // cache anchor (an anchor offset is linear across the stencil
            // and cancels in the second difference up to the π product).
            let sf = spec.speed().expect("accelerated spec has a speed function");
            let d = spec.density().as_ref();
            let c2 = sf.c2();
            let mut worst: f64 = 0.0;
            for &x in grid_points {
                let h = fd_step(x);
                if x - h <= 0.0 {
                    continue;
                }
                let f2_0 = sf.f2(x);
                let il = quad::integrate(|y| 1.0 / d.pi(y), x - h, x, 1e-13, 1e-300)?.value;
                let ir = quad::integrate(|y| 1.0 / d.pi(y), x, x + h, 1e-13, 1e-300)?.value;
                let f2_m = f2_0 - c2 * il;
                let f2_p = f2_0 + c2 * ir;
                let a_m = f2_m * d.pi(x - h);
                let a_0 = f2_0 * d.pi(x);
                let a_p = f2_p * d.pi(x + h);
                let half_a2 = 0.5 * (a_p - 2.0 * a_0 + a_m) / (h * h);
                let b_m = f2_m * drift_b(d, x - h) * d.pi(x - h);
                let b_p = f2_p * drift_b(d, x + h) * d.pi(x + h);
                let b1 = (b_p - b_m) / (2.0 * h);
                let resid = half_a2 - b1;
                let scale = local_scale(a_0, f2_0 * drift_b(d, x) * d.pi(x), x);
                worst = worst.max(resid.abs() / scale);
            }
            Ok(worst)
        }
        _ => {
            let a_fn = |y: f64| spec.sigma_sq(y) * spec.density().pi(y);
            let b_fn = |y: f64| spec.drift(y) * spec.density().pi(y);
            generator_adjoint_residual(&a_fn, &b_fn, grid_points)
        }
    }
}

/// FD residual of `½A'' - B'` relative to the local magnitude of `A`, `B`.
///
/// Exposed for direct checks with arbitrary coefficient pairs (for constant
/// `A` and zero `B` the residual is identically zero).
pub fn generator_adjoint_residual<FA, FB>(a_fn: &FA, b_fn: &FB, grid_points: &[f64]) -> Result<f64>
where
    FA: Fn(f64) -> f64,
    FB: Fn(f64) -> f64,
{
    if !grid::is_valid_half_line_grid(grid_points) {
        return Err(Error::invalid("residual grid must be increasing and non-negative"));
    }
    let mut worst: f64 = 0.0;
    for &x in grid_points {
        let h = fd_step(x);
        if x - h <= 0.0 {
            continue;
        }
        let resid = 0.5 * fd::d2(a_fn, x, h) - fd::d1(b_fn, x, h);
        let scale = local_scale(a_fn(x), b_fn(x), x);
        worst = worst.max(resid.abs() / scale);
    }
    Ok(worst)
}

/// FD step: proportional to the coordinate scale but capped at the unit
/// oscillation scale of the perturbed models.
fn fd_step(x: f64) -> f64 {
    (1e-4 * (1.0 + x)).min(1e-3)
}

fn local_scale(a: f64, b: f64, x: f64) -> f64 {
    let opx = 1.0 + x;
    ((a.abs() + opx * b.abs()) / (opx * opx)).max(1e-300)
}

// ---------------------------------------------------------------------------
// Mixing-exponent probe
// ---------------------------------------------------------------------------

/// Probe of the polynomial mixing exponent `r = -liminf x·b(x)`.
#[derive(Debug, Clone)]
pub struct MixingExponentEstimate {
    /// `-min x·b(x)` over the outermost probes.
    pub r_estimate: f64,
    /// All probed `(x, x·b(x))` pairs.
    pub probes: Vec<(f64, f64)>,
}

/// Estimate `r = -liminf x·b(x)` from probe points far out in the tail.
///
/// Diagnostic only: the unit-noise diffusion mixes no faster than
/// polynomially when `r` is finite, and the plain construction needs
/// `r > 3/2`, which `m > 3` guarantees for the built-in models.
pub fn mixing_exponent_r(
    density: &TargetDensity,
    probe_points: &[f64],
) -> Result<MixingExponentEstimate> {
    if !grid::is_valid_half_line_grid(probe_points) {
        return Err(Error::invalid("probe points must be increasing and non-negative"));
    }
    let max_x = *probe_points.last().expect("non-empty grid");
    if max_x < 1e3 {
        return Err(Error::invalid(format!(
            "largest probe {max_x} is below the required 1e3"
        )));
    }
    let probes: Vec<(f64, f64)> =
        probe_points.iter().map(|&x| (x, x * drift_b(density, x))).collect();
    let cutoff = max_x / 10.0;
    let r_estimate = -probes
        .iter()
        .filter(|(x, _)| *x >= cutoff)
        .map(|&(_, xb)| xb)
        .fold(f64::INFINITY, f64::min);
    Ok(MixingExponentEstimate { r_estimate, probes })
}
