//! Samplers for heavy-tailed target densities on the half-line.
//!
//! Given a target density `π` on `[0, ∞)` with polynomial tail decay
//! `π(x) ≍ (1+x)^{-m}`, `m > 3`, this crate builds three diffusions that
//! leave `π` invariant:
//!
//! * the reflected Langevin diffusion `dY = b(Y)dt + dW + dφ` with
//!   `b = ½(ln π)'` (unit noise, polynomial convergence),
//! * a speed-accelerated diffusion `dX = f²(X)b(X)dt + f(X)dW + dφ` with
//!   `f²(z) = c₁ + c₂∫₀^z dy/π(y)` (exponential convergence, uniform in the
//!   starting point), and
//! * an affine-drift diffusion `dZ = -(Z-μ)dt + √v(Z) dW` with `v` built from
//!   the cumulative first-moment integral of `π`.
//!
//! Around the constructions sit quadrature oracles for hitting-time moments
//! (boundary-value problems on `[K, N]`, the moment ladder `v_q ≤ q!·C^q`,
//! exponential-moment bounds) and Monte-Carlo diagnostics (binned
//! total-variation curves, hitting-time statistics, law-of-large-numbers
//! checks, convergence-rate fits).
//!
//! Simulation is Euler–Maruyama with reflection by absolute value, optional
//! speed-adaptive steps, and reproducible counter-split RNG streams.

pub mod analysis;
pub mod construct;
pub mod density;
pub mod diagnostics;
pub mod error;
pub mod numerics;
pub mod rng;
pub mod sde;
pub mod stats;

pub use error::{Error, Result};
