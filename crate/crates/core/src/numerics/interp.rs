//! Piecewise-cubic Hermite interpolation on increasing grids.
//!
//! Two slope sources are supported: exact analytic slopes supplied by the
//! caller (used by the cumulative-integral caches, where the integrand is the
//! derivative and is known exactly at the nodes), and Fritsch–Carlson
//! monotone slopes estimated from the data alone (used for tabulated ladder
//! functions, where monotonicity of the interpolant must be preserved).

/// A cubic Hermite interpolant over a strictly increasing grid.
#[derive(Debug, Clone)]
pub struct CubicHermite {
    x: Vec<f64>,
    y: Vec<f64>,
    slope: Vec<f64>,
}

impl CubicHermite {
    /// Build from nodes, values, and exact slopes at the nodes.
    pub fn with_slopes(x: Vec<f64>, y: Vec<f64>, slope: Vec<f64>) -> Self {
        assert!(x.len() >= 2 && x.len() == y.len() && x.len() == slope.len());
        debug_assert!(x.windows(2).all(|w| w[1] > w[0]));
        CubicHermite { x, y, slope }
    }

    /// Build with Fritsch–Carlson slopes; the interpolant is monotone on
    /// every interval where the data are monotone.
    pub fn monotone(x: Vec<f64>, y: Vec<f64>) -> Self {
        let slope = fritsch_carlson_slopes(&x, &y);
        Self::with_slopes(x, y, slope)
    }

    pub fn min_x(&self) -> f64 {
        self.x[0]
    }

    pub fn max_x(&self) -> f64 {
        *self.x.last().expect("non-empty")
    }

    pub fn nodes(&self) -> (&[f64], &[f64]) {
        (&self.x, &self.y)
    }

    fn cell(&self, xq: f64) -> usize {
        match self.x.binary_search_by(|v| v.partial_cmp(&xq).expect("finite grid")) {
            Ok(i) => i.min(self.x.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.x.len() - 2),
        }
    }

    /// Evaluate at `xq`; clamps to the grid range.
    pub fn eval(&self, xq: f64) -> f64 {
        let xq = xq.clamp(self.min_x(), self.max_x());
        let i = self.cell(xq);
        let h = self.x[i + 1] - self.x[i];
        let t = (xq - self.x[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[i] + h10 * h * self.slope[i] + h01 * self.y[i + 1] + h11 * h * self.slope[i + 1]
    }

    /// Derivative of the interpolant at `xq`.
    pub fn eval_derivative(&self, xq: f64) -> f64 {
        let xq = xq.clamp(self.min_x(), self.max_x());
        let i = self.cell(xq);
        let h = self.x[i + 1] - self.x[i];
        let t = (xq - self.x[i]) / h;
        let t2 = t * t;
        let d00 = (6.0 * t2 - 6.0 * t) / h;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = (-6.0 * t2 + 6.0 * t) / h;
        let d11 = 3.0 * t2 - 2.0 * t;
        d00 * self.y[i] + d10 * self.slope[i] + d01 * self.y[i + 1] + d11 * self.slope[i + 1]
    }
}

/// Fritsch–Carlson monotone slope limiter.
fn fritsch_carlson_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    assert!(n >= 2);
    let mut d = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        d.push((y[i + 1] - y[i]) / (x[i + 1] - x[i]));
    }
    let mut m = vec![0.0; n];
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for i in 1..n - 1 {
        if d[i - 1] * d[i] <= 0.0 {
            m[i] = 0.0;
        } else {
            // Harmonic mean weighted by interval lengths keeps the slopes in
            // the monotone region without a separate projection step.
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            let w1 = 2.0 * h1 + h0;
            let w2 = h1 + 2.0 * h0;
            m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    // Endpoint safeguard against overshoot on the first/last cell.
    for (i, di) in [(0usize, 0usize), (n - 1, n - 2)] {
        if m[i] * d[di] <= 0.0 {
            m[i] = 0.0;
        } else if m[i].abs() > 3.0 * d[di].abs() {
            m[i] = 3.0 * d[di];
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_nodes_and_cubics() {
        let x: Vec<f64> = (0..20).map(|i| i as f64 * 0.37).collect();
        let f = |t: f64| t * t * t - 2.0 * t + 1.0;
        let df = |t: f64| 3.0 * t * t - 2.0;
        let y: Vec<f64> = x.iter().map(|&t| f(t)).collect();
        let s: Vec<f64> = x.iter().map(|&t| df(t)).collect();
        let h = CubicHermite::with_slopes(x.clone(), y, s);
        // Exact for cubics with exact slopes.
        for &t in &[0.01, 1.234, 3.7, 6.9] {
            assert!((h.eval(t) - f(t)).abs() < 1e-10, "at {t}");
            assert!((h.eval_derivative(t) - df(t)).abs() < 1e-9, "d at {t}");
        }
        for &t in &x {
            assert!((h.eval(t) - f(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn monotone_data_stays_monotone() {
        // Step-like monotone data is the classic case where plain cubic
        // splines overshoot.
        let x = vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        let y = vec![0.0, 0.01, 0.02, 5.0, 5.01, 5.02];
        let h = CubicHermite::monotone(x, y);
        let mut prev = h.eval(0.0);
        for i in 1..=500 {
            let t = 5.0 * i as f64 / 500.0;
            let v = h.eval(t);
            assert!(v >= prev - 1e-12, "non-monotone at {t}: {v} < {prev}");
            prev = v;
        }
    }

    #[test]
    fn clamps_outside_range() {
        let h = CubicHermite::monotone(vec![0.0, 1.0], vec![3.0, 4.0]);
        assert_eq!(h.eval(-5.0), 3.0);
        assert_eq!(h.eval(9.0), 4.0);
    }
}
