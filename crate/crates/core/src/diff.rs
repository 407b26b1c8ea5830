//! Second-order finite differences on a uniform grid.

use alloc::vec::Vec;

/// Centered differences in the interior, one-sided second-order stencils at
/// both ends. Requires at least three samples.
pub fn gradient(values: &[f64], dx: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 3, "gradient needs at least three samples");
    let mut out = Vec::with_capacity(n);
    let inv2 = 0.5 / dx;
    out.push((-3.0 * values[0] + 4.0 * values[1] - values[2]) * inv2);
    for i in 1..n - 1 {
        out.push((values[i + 1] - values[i - 1]) * inv2);
    }
    out.push((3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) * inv2);
    out
}

/// Largest |gradient| without allocating.
pub fn max_abs_gradient(values: &[f64], dx: f64) -> f64 {
    let n = values.len();
    assert!(n >= 3, "gradient needs at least three samples");
    let inv2 = 0.5 / dx;
    let mut m = crate::num::abs((-3.0 * values[0] + 4.0 * values[1] - values[2]) * inv2);
    for i in 1..n - 1 {
        m = m.max(crate::num::abs((values[i + 1] - values[i - 1]) * inv2));
    }
    m.max(crate::num::abs(
        (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) * inv2,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_quadratics() {
        let dx = 0.1;
        let f: Vec<f64> = (0..10)
            .map(|i| {
                let x = i as f64 * dx;
                3.0 * x * x - x + 2.0
            })
            .collect();
        let g = gradient(&f, dx);
        for (i, gi) in g.iter().enumerate() {
            let x = i as f64 * dx;
            assert!((gi - (6.0 * x - 1.0)).abs() < 1e-12, "{i}: {gi}");
        }
        assert!((max_abs_gradient(&f, dx) - 6.0 * 0.9 + 1.0).abs() < 1e-12);
    }
}
