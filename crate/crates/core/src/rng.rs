//! Reproducible, splittable random number streams.
//!
//! Streams are derived from a 64-bit master seed by counter-based splitting:
//! every `(master_seed, index)` pair names one ChaCha12 keystream, so stream
//! `i` of a split of size `n` is identical for every `n` (prefix stability)
//! and across runs (bit reproducibility).

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Identity of one stream, recorded in simulation output for audits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamId {
    pub master_seed: u64,
    pub index: u64,
}

/// How standard normal variates are produced from the uniform stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormalMethod {
    /// One uniform per normal through the inverse normal CDF.
    #[default]
    InverseCdf,
    /// Marsaglia polar rejection; the spare variate is kept.
    Polar,
}

impl NormalMethod {
    pub fn name(self) -> &'static str {
        match self {
            NormalMethod::InverseCdf => "inverse_cdf",
            NormalMethod::Polar => "polar",
        }
    }
}

/// A deterministic stream of uniforms and normals.
#[derive(Debug, Clone)]
pub struct Stream {
    id: StreamId,
    rng: ChaCha12Rng,
    method: NormalMethod,
    spare: Option<f64>,
}

impl Stream {
    pub fn new(master_seed: u64, index: u64, method: NormalMethod) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
        rng.set_stream(index);
        Stream { id: StreamId { master_seed, index }, rng, method, spare: None }
    }

    pub fn id(&self) -> StreamId {
        self.id
    }

    /// Uniform on the open interval (0, 1): 53 random bits centered in their
    /// half-ulp cell, so 0 and 1 are unreachable.
    #[inline]
    pub fn uniform_open(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9007199254740992.0)
    }

    /// Uniform on (-1, 1).
    #[inline]
    fn uniform_symmetric(&mut self) -> f64 {
        2.0 * self.uniform_open() - 1.0
    }

    /// One standard normal variate.
    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        match self.method {
            NormalMethod::InverseCdf => normal_ppf(self.uniform_open()),
            NormalMethod::Polar => {
                if let Some(z) = self.spare.take() {
                    return z;
                }
                loop {
                    let u = self.uniform_symmetric();
                    let v = self.uniform_symmetric();
                    let s = u * u + v * v;
                    if s > 0.0 && s < 1.0 {
                        let f = (-2.0 * s.ln() / s).sqrt();
                        self.spare = Some(v * f);
                        return u * f;
                    }
                }
            }
        }
    }
}

/// Split `n` independent streams off a master seed.
pub fn make_streams(master_seed: u64, n: usize, method: NormalMethod) -> Vec<Stream> {
    (0..n as u64).map(|i| Stream::new(master_seed, i, method)).collect()
}

/// Inverse standard normal CDF.
#[inline]
pub fn normal_ppf(u: f64) -> f64 {
    crate::numerics::special::norm_ppf(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitting_is_deterministic_and_prefix_stable() {
        let take = |s: &mut Stream, k: usize| -> Vec<f64> {
            (0..k).map(|_| s.standard_normal()).collect()
        };
        let mut a = make_streams(42, 2, NormalMethod::InverseCdf);
        let mut b = make_streams(42, 5, NormalMethod::InverseCdf);
        for i in 0..2 {
            assert_eq!(take(&mut a[i], 64), take(&mut b[i], 64), "stream {i}");
        }
        let mut c = make_streams(42, 2, NormalMethod::InverseCdf);
        let mut d = make_streams(43, 2, NormalMethod::InverseCdf);
        assert_ne!(take(&mut c[0], 8), take(&mut d[0], 8));
    }

    #[test]
    fn streams_are_uncorrelated() {
        let mut s = make_streams(7, 2, NormalMethod::InverseCdf);
        let n = 10_000;
        let xs: Vec<f64> = (0..n).map(|_| s[0].standard_normal()).collect();
        let ys: Vec<f64> = (0..n).map(|_| s[1].standard_normal()).collect();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let (mx, my) = (mean(&xs), mean(&ys));
        let mut num = 0.0;
        let mut dx = 0.0;
        let mut dy = 0.0;
        for i in 0..n {
            num += (xs[i] - mx) * (ys[i] - my);
            dx += (xs[i] - mx).powi(2);
            dy += (ys[i] - my).powi(2);
        }
        let rho = num / (dx.sqrt() * dy.sqrt());
        assert!(rho.abs() < 0.05, "cross-correlation {rho}");
    }

    #[test]
    fn normal_ppf_reference_values() {
        assert!((normal_ppf(0.5)).abs() < 1e-15);
        assert!((normal_ppf(0.975) - 1.959963984540054).abs() < 1e-12);
        assert!((normal_ppf(0.025) + 1.959963984540054).abs() < 1e-12);
        assert!((normal_ppf(0.9986501019683699) - 3.0).abs() < 1e-10);
    }

    #[test]
    fn both_normal_methods_have_unit_moments() {
        for method in [NormalMethod::InverseCdf, NormalMethod::Polar] {
            let mut s = Stream::new(11, 0, method);
            let n = 200_000;
            let mut sum = 0.0;
            let mut sum2 = 0.0;
            for _ in 0..n {
                let z = s.standard_normal();
                sum += z;
                sum2 += z * z;
            }
            let mean = sum / n as f64;
            let var = sum2 / n as f64 - mean * mean;
            assert!(mean.abs() < 0.01, "{method:?} mean {mean}");
            assert!((var - 1.0).abs() < 0.02, "{method:?} var {var}");
        }
    }
}
