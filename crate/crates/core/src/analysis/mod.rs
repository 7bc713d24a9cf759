//! Error metrics, slope fitting and sign alignment.

mod interp;
mod study;

pub(crate) use study::fmt_f64;

pub use interp::{interp_rate_study, InterpRow, InterpStudy};
pub use study::{
    convergence_study, EpsilonStudy, ErrorRecord, ModeError, ReferenceSolution, StudyConfig, StudyReport,
    StudyRow,
};

use serde::{Deserialize, Serialize};

use crate::element::gauss_rule;
use crate::error::{Error, Result};
use crate::fe::{union_breakpoints, Evaluable};

/// Points with `|u_ref| < MAX_NORM_FLOOR * max |u_ref|` are skipped by the
/// discrete max-norm error.
pub const MAX_NORM_FLOOR: f64 = 1e-8;

/// Default samples per region for the discrete max-norm error.
pub const DEFAULT_POINTS_PER_REGION: usize = 1000;

/// `sum over union subintervals` of a Gauss rule with `order` points.
pub fn integrate_union<F: FnMut(f64) -> f64>(breaks: &[f64], order: usize, mut f: F) -> Result<f64> {
    let rule = gauss_rule(order)?;
    Ok(breaks
        .windows(2)
        .map(|w| rule.integrate(w[0], w[1], &mut f))
        .sum())
}

fn union_of(u: &dyn Evaluable, v: &dyn Evaluable) -> Vec<f64> {
    union_breakpoints(u.breakpoints(), v.breakpoints())
}

/// Squared energy norm `eps^2 |v|_2^2 + |v|_1^2 + ||v||_0^2` of `v = u - w`
/// (`w = None` for the norm of `u` itself).
fn energy_sq(u: &dyn Evaluable, w: Option<&dyn Evaluable>, epsilon: f64, breaks: &[f64], order: usize) -> Result<f64> {
    let eps2 = epsilon * epsilon;
    integrate_union(breaks, order, |x| {
        let d = |k: usize| u.eval(x, k) - w.map_or(0.0, |w| w.eval(x, k));
        let (v0, v1, v2) = (d(0), d(1), d(2));
        eps2 * v2 * v2 + v1 * v1 + v0 * v0
    })
}

/// `<u, v>` in L2 by union-mesh quadrature.
pub fn l2_inner(u: &dyn Evaluable, v: &dyn Evaluable, order: usize) -> Result<f64> {
    integrate_union(&union_of(u, v), order, |x| u.eval(x, 0) * v.eval(x, 0))
}

/// `100 ||u_h - u_ref||_E / ||u_ref||_E`, integrating with `order` Gauss points
/// per subinterval of the union of both breakpoint sets. Requires
/// `<u_h, u_ref> >= 0`.
pub fn energy_norm_error(u_h: &dyn Evaluable, u_ref: &dyn Evaluable, epsilon: f64, order: usize) -> Result<f64> {
    if l2_inner(u_h, u_ref, order)? < 0.0 {
        return Err(Error::SignNotAligned);
    }
    let breaks = union_of(u_h, u_ref);
    let denom = energy_sq(u_ref, None, epsilon, &breaks, order)?;
    if !(denom > 0.0) {
        return Err(Error::ZeroVector);
    }
    let num = energy_sq(u_h, Some(u_ref), epsilon, &breaks, order)?;
    Ok(100.0 * (num / denom).sqrt())
}

/// `100 max ||u_ref^(d)(x)| - |u_h^(d)(x)|| / |u_ref^(d)(x)|` over
/// `n_per_region` equispaced points in each of `[0, w]`, `(w, 1 - w)` and
/// `[1 - w, 1]`, skipping points where the reference is negligible.
pub fn discrete_max_error(
    u_h: &dyn Evaluable,
    u_ref: &dyn Evaluable,
    layer_width: f64,
    n_per_region: usize,
    deriv: usize,
) -> Result<f64> {
    if !(layer_width > 0.0 && layer_width < 0.5) {
        return Err(Error::InvalidLayerWidth(layer_width));
    }
    if n_per_region == 0 {
        return Err(Error::InvalidSpec("need at least one sample per region".into()));
    }
    let w = layer_width;
    let span = |a: f64, b: f64, open: bool| -> Vec<f64> {
        if open {
            // Interior points of (a, b).
            (1..=n_per_region)
                .map(|i| a + (b - a) * i as f64 / (n_per_region + 1) as f64)
                .collect()
        } else if n_per_region == 1 {
            vec![0.5 * (a + b)]
        } else {
            (0..n_per_region)
                .map(|i| a + (b - a) * i as f64 / (n_per_region - 1) as f64)
                .collect()
        }
    };
    let xs: Vec<f64> = span(0.0, w, false)
        .into_iter()
        .chain(span(w, 1.0 - w, true))
        .chain(span(1.0 - w, 1.0, false))
        .collect();
    let refs: Vec<f64> = xs.iter().map(|&x| u_ref.eval(x, deriv)).collect();
    let top = refs.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    if top == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mut worst: f64 = 0.0;
    for (&x, &r) in xs.iter().zip(&refs) {
        if r.abs() < MAX_NORM_FLOOR * top {
            continue;
        }
        let rel = (r.abs() - u_h.eval(x, deriv).abs()).abs() / r.abs();
        worst = worst.max(rel);
    }
    Ok(100.0 * worst)
}

/// Least-squares line through `(log x, log y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit in natural-log units.
    pub residual: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
}

/// Fits `log y = slope * log x + intercept`.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints(points.len()));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::NonpositiveError);
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidSpec("slope fit needs distinct abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (logs
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(SlopeFit {
        slope,
        intercept,
        residual,
        x_min: points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min),
        x_max: points.iter().map(|p| p.0).fold(0.0, f64::max),
        points: points.len(),
    })
}

/// Fit residual above which the coarsest point is treated as pre-asymptotic.
pub const ASYMPTOTIC_RESIDUAL: f64 = 0.1;

/// Like [`fit_slope`], but drops the coarsest points (smallest x) while the fit
/// residual exceeds [`ASYMPTOTIC_RESIDUAL`] and more than three points remain.
pub fn fit_slope_asymptotic(points: &[(f64, f64)]) -> Result<SlopeFit> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut start = 0;
    loop {
        let fit = fit_slope(&sorted[start..])?;
        if fit.residual <= ASYMPTOTIC_RESIDUAL || sorted.len() - start <= 3 {
            return Ok(fit);
        }
        start += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Relative size of `<u_h, u_ref>` below which the pair counts as orthogonal.
pub const AMBIGUOUS_OVERLAP: f64 = 1e-8;

/// The sign `s` maximizing `<s u_h, u_ref>`.
pub fn align_sign(u_h: &dyn Evaluable, u_ref: &dyn Evaluable, order: usize) -> Result<Sign> {
    let nh = l2_inner(u_h, u_h, order)?.sqrt();
    let nr = l2_inner(u_ref, u_ref, order)?.sqrt();
    if nh == 0.0 || nr == 0.0 {
        return Err(Error::ZeroVector);
    }
    let ip = l2_inner(u_h, u_ref, order)?;
    if ip.abs() <= AMBIGUOUS_OVERLAP * nh * nr {
        return Err(Error::Ambiguous);
    }
    Ok(if ip > 0.0 { Sign::Plus } else { Sign::Minus })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::fe::ExactFunction;

    fn sine() -> ExactFunction {
        ExactFunction::new(|x, d| match d {
            0 => (PI * x).sin(),
            1 => PI * (PI * x).cos(),
            _ => -PI * PI * (PI * x).sin(),
        })
    }

    #[test]
    fn slope_of_exact_power_law() {
        let pts: Vec<(f64, f64)> = [10.0, 20.0, 40.0, 80.0].iter().map(|&x: &f64| (x, 3.0 * x.powi(-4))).collect();
        let fit = fit_slope(&pts).unwrap();
        assert!((fit.slope + 4.0).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
        let flat = fit_slope(&[(10.0, 1.0), (100.0, 1.0), (1000.0, 1.0)]).unwrap();
        assert!(flat.slope.abs() < 1e-15);
        assert!(matches!(fit_slope(&pts[..2]), Err(Error::TooFewPoints(2))));
        assert!(matches!(
            fit_slope(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]),
            Err(Error::NonpositiveError)
        ));
    }

    #[test]
    fn asymptotic_fit_drops_preasymptotic_point() {
        let mut pts: Vec<(f64, f64)> = [16.0, 32.0, 64.0, 128.0].iter().map(|&x: &f64| (x, x.powi(-4))).collect();
        pts[0].1 *= 50.0;
        let fit = fit_slope_asymptotic(&pts).unwrap();
        assert_eq!(fit.points, 3);
        assert!((fit.slope + 4.0).abs() < 1e-12);
    }

    #[test]
    fn energy_error_of_identical_functions_is_zero() {
        let s = sine();
        assert_eq!(energy_norm_error(&s, &s, 1.0, 6).unwrap(), 0.0);
        let zero = ExactFunction::new(|_, _| 0.0);
        assert!(energy_norm_error(&s, &zero, 1.0, 6).is_err());
        let neg = ExactFunction::new(|x, d| -sine().eval(x, d));
        assert!(matches!(energy_norm_error(&neg, &s, 1.0, 6), Err(Error::SignNotAligned)));
    }

    #[test]
    fn max_error_scaling() {
        let s = sine().with_breakpoints(vec![0.0, 1.0]);
        let scaled = ExactFunction::new(|x, d| 1.01 * sine().eval(x, d));
        let e = discrete_max_error(&scaled, &s, 0.1, 50, 0).unwrap();
        assert!((e - 1.0).abs() < 1e-10);
        assert_eq!(discrete_max_error(&s, &s, 0.1, 50, 1).unwrap(), 0.0);
        assert!(matches!(
            discrete_max_error(&s, &s, 0.5, 50, 0),
            Err(Error::InvalidLayerWidth(_))
        ));
    }

    #[test]
    fn sign_alignment() {
        let s = sine();
        let neg = ExactFunction::new(|x, d| -sine().eval(x, d));
        let orth = ExactFunction::new(|x, _| (2.0 * PI * x).sin());
        assert_eq!(align_sign(&s, &s, 6).unwrap(), Sign::Plus);
        assert_eq!(align_sign(&neg, &s, 6).unwrap(), Sign::Minus);
        let fine = orth.with_breakpoints((0..=64).map(|i| i as f64 / 64.0).collect());
        assert!(matches!(align_sign(&fine, &s, 6), Err(Error::Ambiguous)));
    }
}
