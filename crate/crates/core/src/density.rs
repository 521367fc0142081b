//! Target densities on the half-line with polynomial tail decay.
//!
//! Every built-in model carries its unnormalized form, a closed-form
//! `(ln π)'`, and analytic tail integrals beyond a cutoff `X_cut`. Adaptive
//! quadrature certifies the head of the mass; the tail is completed
//! analytically because no quadrature rule can certify the mass of a
//! polynomial tail from samples alone.

use crate::error::{Error, Result};
use crate::numerics::{grid, interp::CubicHermite, quad};

/// Cutoff beyond which integrals of the density switch to the analytic tail.
pub const DEFAULT_TAIL_CUTOFF: f64 = 1e4;

/// Relative tolerance for the normalization constant and cached integrals.
const NORM_REL_TOL: f64 = 1e-12;

/// Built-in density families.
///
/// All decay like `(1+x)^{-m}`; `m > 3` is required throughout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityModel {
    /// `π(x) = (m-1)(1+x)^{-m}`: exact power law, all closed forms available.
    ParetoShifted { m: f64 },
    /// `π(x) ∝ (1 + (x/s)²)^{-m/2}` restricted to the half-line.
    HalfStudentLike { m: f64, s: f64 },
    /// Pareto modulated by `1 + ε·sin(x)/(1+x)`: the envelope holds but the
    /// tail is not monotone. Requires `|ε| < 1/2`.
    PerturbedPareto { m: f64, eps: f64 },
}

impl DensityModel {
    pub fn tail_exponent(&self) -> f64 {
        match *self {
            DensityModel::ParetoShifted { m }
            | DensityModel::HalfStudentLike { m, .. }
            | DensityModel::PerturbedPareto { m, .. } => m,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DensityModel::ParetoShifted { .. } => "pareto_shifted",
            DensityModel::HalfStudentLike { .. } => "half_student_like",
            DensityModel::PerturbedPareto { .. } => "perturbed_pareto",
        }
    }

    fn validate(&self) -> Result<()> {
        let m = self.tail_exponent();
        if !(m > 3.0) {
            return Err(Error::invalid(format!(
                "tail exponent m = {m} violates the requirement m > 3"
            )));
        }
        match *self {
            DensityModel::HalfStudentLike { s, .. } if !(s > 0.0 && s.is_finite()) => Err(
                Error::invalid(format!("scale s = {s} must be positive and finite")),
            ),
            DensityModel::PerturbedPareto { eps, .. } if !(eps.abs() < 0.5) => Err(
                Error::invalid(format!("perturbation eps = {eps} must satisfy |eps| < 1/2")),
            ),
            _ => Ok(()),
        }
    }

    /// Unnormalized density value.
    fn unnorm(&self, x: f64, m_int: Option<i32>) -> f64 {
        match *self {
            DensityModel::ParetoShifted { m } => pow_decay(1.0 + x, m, m_int),
            DensityModel::HalfStudentLike { m, s } => {
                let t = x / s;
                (1.0 + t * t).powf(-0.5 * m)
            }
            DensityModel::PerturbedPareto { m, eps } => {
                pow_decay(1.0 + x, m, m_int) * (1.0 + eps * x.sin() / (1.0 + x))
            }
        }
    }

    /// Closed-form derivative of `ln π` (normalization-free).
    fn log_density_slope(&self, x: f64) -> f64 {
        match *self {
            DensityModel::ParetoShifted { m } => -m / (1.0 + x),
            DensityModel::HalfStudentLike { m, s } => -m * x / (s * s + x * x),
            DensityModel::PerturbedPareto { m, eps } => {
                let opx = 1.0 + x;
                let g = 1.0 + eps * x.sin() / opx;
                let gp = eps * (x.cos() * opx - x.sin()) / (opx * opx);
                -m / opx + gp / g
            }
        }
    }

    /// `∫_X^∞` of the unnormalized density, analytically.
    fn unnorm_tail_mass(&self, x_from: f64) -> f64 {
        match *self {
            DensityModel::ParetoShifted { m } => (1.0 + x_from).powf(1.0 - m) / (m - 1.0),
            DensityModel::HalfStudentLike { m, s } => {
                // Asymptotic expansion of s∫_T^∞ (1+t²)^{-m/2} dt, T = X/s.
                let t = x_from / s;
                let a = 0.5 * m;
                let c1 = -a;
                let c2 = 0.5 * a * (a + 1.0);
                let c3 = -a * (a + 1.0) * (a + 2.0) / 6.0;
                let ti = 1.0 / (t * t);
                s * t.powf(1.0 - m)
                    * (1.0 / (m - 1.0)
                        + ti * (c1 / (m + 1.0)
                            + ti * (c2 / (m + 3.0) + ti * c3 / (m + 5.0))))
            }
            DensityModel::PerturbedPareto { m, eps } => {
                (1.0 + x_from).powf(1.0 - m) / (m - 1.0) + eps * sin_tail(m + 1.0, x_from)
            }
        }
    }

    /// `∫_X^∞ x·(unnormalized)` analytically.
    fn unnorm_tail_first_moment(&self, x_from: f64) -> f64 {
        match *self {
            DensityModel::ParetoShifted { m } => {
                let opx = 1.0 + x_from;
                opx.powf(2.0 - m) / (m - 2.0) - opx.powf(1.0 - m) / (m - 1.0)
            }
            DensityModel::HalfStudentLike { m, s } => {
                // Exact: s²(1+T²)^{(2-m)/2}/(m-2), T = X/s.
                let t = x_from / s;
                s * s * (1.0 + t * t).powf(0.5 * (2.0 - m)) / (m - 2.0)
            }
            DensityModel::PerturbedPareto { m, eps } => {
                let opx = 1.0 + x_from;
                let lead = opx.powf(2.0 - m) / (m - 2.0) - opx.powf(1.0 - m) / (m - 1.0);
                lead + eps * (sin_tail(m, x_from) - sin_tail(m + 1.0, x_from))
            }
        }
    }

    /// Build the density, computing the normalization and envelope constant.
    pub fn build(self) -> Result<TargetDensity> {
        TargetDensity::new(self, DEFAULT_TAIL_CUTOFF)
    }
}

/// Two-term integration-by-parts tail of `∫_X^∞ sin(x)(1+x)^{-p} dx`.
///
/// The dropped remainder is below `p(p+1)(1+X)^{-p-2}`, negligible at the
/// cutoffs used here.
fn sin_tail(p: f64, x_from: f64) -> f64 {
    let opx = 1.0 + x_from;
    x_from.cos() * opx.powf(-p) + p * x_from.sin() * opx.powf(-p - 1.0)
}

/// `(base)^{-m}` with an integer fast path for the hot simulation loops.
#[inline]
fn pow_decay(base: f64, m: f64, m_int: Option<i32>) -> f64 {
    match m_int {
        Some(mi) => base.powi(-mi),
        None => base.powf(-m),
    }
}

/// Report from an envelope scan: the tightest constants on the given grid.
#[derive(Debug, Clone, Copy)]
pub struct EnvelopeReport {
    /// `min π(x)(1+x)^m` over the grid.
    pub c_low: f64,
    /// `max π(x)(1+x)^m` over the grid.
    pub c_high: f64,
    /// Whether the density's stored constant `c` satisfies
    /// `c <= c_low` and `c_high <= 1/c`.
    pub pass: bool,
}

/// A normalized target density `π` on `[0, ∞)` with tail exponent `m > 3`.
///
/// Immutable after construction; all evaluation methods are pure.
#[derive(Debug, Clone)]
pub struct TargetDensity {
    model: DensityModel,
    m: f64,
    m_int: Option<i32>,
    /// Total unnormalized mass (head quadrature plus analytic tail).
    z_norm: f64,
    /// Envelope constant: `c(1+x)^{-m} <= π(x) <= c^{-1}(1+x)^{-m}`.
    c_env: f64,
    /// Stationary mean `∫ x π dx`.
    mean: f64,
    /// `lim` (or range midpoint) of `π(x)(1+x)^m` as `x → ∞`.
    tail_coeff: f64,
    x_cut: f64,
    /// Cached CDF on `[0, x_cut]` for models without a closed form.
    cdf_cache: Option<CubicHermite>,
}

impl TargetDensity {
    fn new(model: DensityModel, x_cut: f64) -> Result<Self> {
        model.validate()?;
        let m = model.tail_exponent();
        let m_int = if m.fract() == 0.0 && m.abs() < 1e6 { Some(m as i32) } else { None };

        // Normalization: exact for the pure power law, otherwise adaptive
        // quadrature on [0, x_cut] with the analytic tail beyond.
        let z_norm = if let DensityModel::ParetoShifted { m } = model {
            1.0 / (m - 1.0)
        } else {
            let head = quad::integrate(|x| model.unnorm(x, m_int), 0.0, x_cut, NORM_REL_TOL, 0.0)?;
            head.value + model.unnorm_tail_mass(x_cut)
        };
        if !(z_norm.is_finite() && z_norm > 0.0) {
            return Err(Error::invalid(format!(
                "density is not normalizable (mass = {z_norm})"
            )));
        }

        // Stationary mean, closed form where the model admits one.
        let mean = match model {
            DensityModel::ParetoShifted { m } => 1.0 / (m - 2.0),
            DensityModel::HalfStudentLike { m, s } => s * s / ((m - 2.0) * z_norm),
            DensityModel::PerturbedPareto { .. } => {
                let head =
                    quad::integrate(|x| x * model.unnorm(x, m_int), 0.0, x_cut, NORM_REL_TOL, 0.0)?;
                (head.value + model.unnorm_tail_first_moment(x_cut)) / z_norm
            }
        };

        let mut density = TargetDensity {
            model,
            m,
            m_int,
            z_norm,
            c_env: f64::NAN,
            mean,
            tail_coeff: f64::NAN,
            x_cut,
            cdf_cache: None,
        };

        density.tail_coeff = match model {
            DensityModel::ParetoShifted { m } => m - 1.0,
            DensityModel::HalfStudentLike { m, s } => s.powf(m) / z_norm,
            DensityModel::PerturbedPareto { .. } => 1.0 / z_norm,
        };
        density.c_env = density.envelope_constant();

        if !matches!(model, DensityModel::ParetoShifted { .. }) {
            density.cdf_cache = Some(density.build_cdf_cache()?);
        }
        Ok(density)
    }

    /// Envelope constant: exact for the pure power law, grid scan with a
    /// small safety margin otherwise.
    fn envelope_constant(&self) -> f64 {
        if let DensityModel::ParetoShifted { m } = self.model {
            // The ratio is identically m-1; shave a few ulps so that the
            // envelope inequality survives floating-point evaluation.
            let r = m - 1.0;
            return r.min(1.0 / r).min(1.0) * (1.0 - 1e-12);
        }
        let scan = grid::geometric(0.0, 1e3, 2000);
        let mut r_min = f64::INFINITY;
        let mut r_max = 0.0f64;
        for &x in &scan {
            let r = self.pi(x) * (1.0 + x).powf(self.m);
            r_min = r_min.min(r);
            r_max = r_max.max(r);
        }
        // The limit ratio at infinity, including the oscillation band of the
        // perturbed model.
        match self.model {
            DensityModel::PerturbedPareto { eps, .. } => {
                r_min = r_min.min((1.0 - eps.abs()) / self.z_norm);
                r_max = r_max.max((1.0 + eps.abs()) / self.z_norm);
            }
            _ => {
                r_min = r_min.min(self.tail_coeff);
                r_max = r_max.max(self.tail_coeff);
            }
        }
        0.995 * r_min.min(1.0 / r_max).min(1.0)
    }

    fn build_cdf_cache(&self) -> Result<CubicHermite> {
        let nodes = grid::geometric(0.0, self.x_cut, 2400);
        let mut values = Vec::with_capacity(nodes.len());
        let mut slopes = Vec::with_capacity(nodes.len());
        let mut acc = 0.0;
        values.push(0.0);
        slopes.push(self.pi(0.0));
        for w in nodes.windows(2) {
            let cell = quad::integrate(|x| self.pi(x), w[0], w[1], 1e-12, 0.0)?;
            acc += cell.value;
            values.push(acc);
            slopes.push(self.pi(w[1]));
        }
        Ok(CubicHermite::with_slopes(nodes, values, slopes))
    }

    pub fn model(&self) -> DensityModel {
        self.model
    }

    /// Tail exponent `m`.
    pub fn tail_exponent(&self) -> f64 {
        self.m
    }

    /// Envelope constant `c ∈ (0, 1]`.
    pub fn envelope_c(&self) -> f64 {
        self.c_env
    }

    /// Stationary mean `μ = ∫ x π dx`.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// `lim π(x)(1+x)^m` (band midpoint for the oscillating model), used for
    /// analytic tail extension of integrals of `1/π`.
    pub fn tail_coefficient(&self) -> f64 {
        self.tail_coeff
    }

    pub fn tail_cutoff(&self) -> f64 {
        self.x_cut
    }

    /// Density value `π(x)`.
    #[inline]
    pub fn pi(&self, x: f64) -> f64 {
        self.model.unnorm(x, self.m_int) / self.z_norm
    }

    /// Closed-form `(ln π)'(x)`.
    #[inline]
    pub fn log_pi_prime(&self, x: f64) -> f64 {
        self.model.log_density_slope(x)
    }

    /// Cumulative mass `∫_0^z π`.
    pub fn cdf(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 0.0;
        }
        match self.model {
            DensityModel::ParetoShifted { m } => 1.0 - (1.0 + z).powf(1.0 - m),
            _ => {
                if z >= self.x_cut {
                    1.0 - self.model.unnorm_tail_mass(z) / self.z_norm
                } else {
                    self.cdf_cache.as_ref().expect("cache built for non-closed-form models").eval(z)
                }
            }
        }
    }

    /// Mass of the tail `(z, ∞)` computed analytically for `z >= x_cut` and
    /// as `1 - cdf` below.
    pub fn tail_mass(&self, z: f64) -> f64 {
        if z >= self.x_cut {
            self.model.unnorm_tail_mass(z) / self.z_norm
        } else {
            1.0 - self.cdf(z)
        }
    }

    /// `∫_z^∞ s·π(s) ds` from the analytic tail expansion.
    ///
    /// Valid for `z >= tail_cutoff()`, where the asymptotic tail forms hold.
    pub fn tail_first_moment(&self, z: f64) -> f64 {
        debug_assert!(z >= self.x_cut);
        self.model.unnorm_tail_first_moment(z) / self.z_norm
    }

    /// Quantile `F^{-1}(p)` for `p ∈ [0, 1)`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::invalid(format!("quantile level {p} outside [0, 1)")));
        }
        if p == 0.0 {
            return Ok(0.0);
        }
        if let DensityModel::ParetoShifted { m } = self.model {
            return Ok((1.0 - p).powf(-1.0 / (m - 1.0)) - 1.0);
        }
        // Bisection on the monotone cached CDF, finished with Newton steps.
        let mut lo = 0.0f64;
        let mut hi = self.x_cut;
        if self.cdf(hi) < p {
            // Invert the analytic tail: 1 - tail(z) = p.
            let mut z = hi;
            for _ in 0..200 {
                let f = self.tail_mass(z) - (1.0 - p);
                if f.abs() < 1e-15 {
                    break;
                }
                z += f / self.pi(z);
            }
            return Ok(z);
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut z = 0.5 * (lo + hi);
        for _ in 0..4 {
            z -= (self.cdf(z) - p) / self.pi(z);
            z = z.clamp(lo - 1.0, hi + 1.0).max(0.0);
        }
        Ok(z)
    }

    /// Closed-form `∫_0^z dy/π(y)` where the model admits one.
    #[inline]
    pub fn closed_form_inv_pi_integral(&self, z: f64) -> Option<f64> {
        match self.model {
            DensityModel::ParetoShifted { m } => {
                let grown = match self.m_int {
                    Some(mi) => (1.0 + z).powi(mi + 1),
                    None => (1.0 + z).powf(m + 1.0),
                };
                Some((grown - 1.0) / ((m - 1.0) * (m + 1.0)))
            }
            _ => None,
        }
    }

    /// Whether `∫ dy/π` has a closed form (drives cache construction).
    pub fn has_closed_form_speed_integral(&self) -> bool {
        matches!(self.model, DensityModel::ParetoShifted { .. })
    }
}

/// Build a target density from a model description.
pub fn make_density(model: DensityModel) -> Result<TargetDensity> {
    model.build()
}

/// Scan the polynomial envelope `π(x)(1+x)^m` over a grid.
///
/// Returns the tightest empirical constants and whether the stored `c`
/// passes. Pure evaluation; the grid must be strictly increasing and
/// non-negative.
pub fn verify_envelope(density: &TargetDensity, grid_points: &[f64]) -> Result<EnvelopeReport> {
    if !grid::is_valid_half_line_grid(grid_points) {
        return Err(Error::invalid(
            "envelope grid must be non-empty, strictly increasing, and within [0, inf)",
        ));
    }
    let m = density.tail_exponent();
    let mut c_low = f64::INFINITY;
    let mut c_high = 0.0f64;
    for &x in grid_points {
        let r = density.pi(x) * (1.0 + x).powf(m);
        c_low = c_low.min(r);
        c_high = c_high.max(r);
    }
    let c = density.envelope_c();
    Ok(EnvelopeReport { c_low, c_high, pass: c_low >= c && c_high <= 1.0 / c })
}
