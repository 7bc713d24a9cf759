use crate::error::{Error, Result};

/// Quadrature rule on the reference interval [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadRule {
    pub fn order(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }

    /// Integrates `f` over `[a, b]` with the rule mapped affinely.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let h = b - a;
        self.iter().map(|(t, w)| w * f(a + h * t)).sum::<f64>() * h
    }
}

/// Gauss-Legendre rule with `order` points mapped to [0, 1]; exact for
/// polynomials of degree `2 order - 1`.
pub fn gauss_rule(order: usize) -> Result<QuadRule> {
    if order == 0 {
        return Err(Error::InvalidSpec("quadrature order must be at least 1".into()));
    }
    let n = order;
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    // Roots are symmetric; Newton on P_n from the Tricomi initial guess.
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 {
                let (_, d) = legendre_with_derivative(n, z);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        // z is the i-th largest root on [-1, 1].
        points[i] = 0.5 * (1.0 - z);
        points[n - 1 - i] = 0.5 * (1.0 + z);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    if n % 2 == 1 {
        points[n / 2] = 0.5;
    }
    Ok(QuadRule { points, weights })
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}
