//! Quadrature and reduction helpers: Gauss-Legendre rules and pairwise
//! (tree) summation.

/// Gauss-Legendre nodes and weights on [-1, 1].
///
/// Nodes are found by Newton iteration on the Legendre polynomial with the
/// Chebyshev-angle initial guess; accurate to machine precision for the
/// orders used here (up to a few hundred).
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "quadrature order must be at least 1");
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n(x) and P_n'(x) by recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            dp = (n as f64) * (x * p - if n == 1 { 1.0 } else { p0 }) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss-Legendre rule mapped to [a, b].
pub fn gauss_legendre_on(order: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(order);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|wi| wi * half).collect(),
    )
}

/// Pairwise (tree) summation. Fixed association order, so reductions are
/// reproducible to rounding regardless of how the inputs were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BASE: usize = 32;
    if values.len() <= BASE {
        let mut acc = 0.0;
        for v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials_exactly() {
        // Order-n GL is exact for degree 2n-1.
        let (x, w) = gauss_legendre(5);
        let val: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(8)).sum();
        assert!((val - 2.0 / 9.0).abs() < 1e-14, "got {val}");
        let odd: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(9)).sum();
        assert!(odd.abs() < 1e-15);
    }

    #[test]
    fn gl_weights_sum_to_interval_length() {
        for order in [1, 2, 3, 8, 64, 200] {
            let (_, w) = gauss_legendre_on(order, 0.0, 1.0);
            let total: f64 = w.iter().sum();
            assert!((total - 1.0).abs() < 1e-13, "order {order}: {total}");
        }
    }

    #[test]
    fn gl_integrates_oscillation() {
        // \int_0^1 cos(20 t) dt = sin(20)/20.
        let (x, w) = gauss_legendre_on(48, 0.0, 1.0);
        let val: f64 = x.iter().zip(&w).map(|(t, wi)| wi * (20.0 * t).cos()).sum();
        assert!((val - (20.0f64).sin() / 20.0).abs() < 1e-13);
    }

    #[test]
    fn pairwise_matches_naive_on_benign_data() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-9);
    }
}
