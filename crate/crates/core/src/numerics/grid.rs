//! Grid builders for half-line quantities.
//!
//! Heavy-tailed densities and the speed function vary over many decades, so
//! most tabulations here are geometric in `1 + x` rather than uniform in `x`.

/// `n` points from `lo` to `hi` inclusive, geometrically spaced in `1 + x`.
///
/// Requires `lo >= 0`, `hi > lo`, `n >= 2`. The first and last points are
/// exactly `lo` and `hi`.
pub fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo >= 0.0 && hi > lo && n >= 2, "invalid geometric grid spec");
    let la = (1.0 + lo).ln();
    let lb = (1.0 + hi).ln();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let f = i as f64 / (n - 1) as f64;
        out.push((la + f * (lb - la)).exp() - 1.0);
    }
    out[0] = lo;
    let last = out.last_mut().expect("n >= 2");
    *last = hi;
    out
}

/// `n` points from `lo` to `hi` inclusive, uniformly spaced.
pub fn uniform(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(hi > lo && n >= 2, "invalid uniform grid spec");
    let mut out = Vec::with_capacity(n);
    let step = (hi - lo) / (n - 1) as f64;
    for i in 0..n {
        out.push(lo + i as f64 * step);
    }
    let last = out.last_mut().expect("n >= 2");
    *last = hi;
    out
}

/// True if `grid` is non-empty, strictly increasing, and non-negative.
pub fn is_valid_half_line_grid(grid: &[f64]) -> bool {
    if grid.is_empty() || grid[0] < 0.0 || !grid[0].is_finite() {
        return false;
    }
    grid.windows(2).all(|w| w[1].is_finite() && w[1] > w[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_endpoints_and_monotone() {
        let g = geometric(0.0, 1e4, 1000);
        assert_eq!(g.len(), 1000);
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 1e4);
        assert!(is_valid_half_line_grid(&g));
        // Ratio in 1+x is constant.
        let r0 = (1.0 + g[1]) / (1.0 + g[0]);
        let r500 = (1.0 + g[501]) / (1.0 + g[500]);
        assert!((r0 - r500).abs() < 1e-9);
    }

    #[test]
    fn uniform_grid_basics() {
        let g = uniform(0.1, 50.0, 400);
        assert_eq!(g.len(), 400);
        assert!((g[0] - 0.1).abs() < 1e-15);
        assert_eq!(*g.last().unwrap(), 50.0);
        assert!(is_valid_half_line_grid(&g));
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(!is_valid_half_line_grid(&[]));
        assert!(!is_valid_half_line_grid(&[-0.1, 0.5]));
        assert!(!is_valid_half_line_grid(&[0.0, 0.0]));
        assert!(!is_valid_half_line_grid(&[0.0, 2.0, 1.0]));
    }
}
