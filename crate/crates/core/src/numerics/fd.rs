//! Centered finite differences used by the residual cross-checks.

/// Centered first derivative with step `h`.
pub fn d1<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Centered second derivative with step `h`.
pub fn d2<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

/// Second-order one-sided (right) first derivative for boundary points.
pub fn d1_right<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_of_exp() {
        let f = |x: f64| x.exp();
        let x = 0.7;
        assert!((d1(f, x, 1e-5) - x.exp()).abs() < 1e-9);
        assert!((d2(f, x, 1e-4) - x.exp()).abs() < 1e-6);
        assert!((d1_right(f, x, 1e-5) - x.exp()).abs() < 1e-8);
    }
}
