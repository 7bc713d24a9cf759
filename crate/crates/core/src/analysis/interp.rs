use serde::{Deserialize, Serialize};

use super::{fit_slope, SlopeFit};
use crate::element::{eval_layer_function, gauss_rule, hermite_interpolant, HermiteData, LayerSide};
use crate::error::{Error, Result};
use crate::mesh::{build_exp_mesh, MeshKind, MeshSpec};

/// Samples per element for the max-norm errors, endpoints included.
const SAMPLES_PER_ELEMENT: usize = 33;
/// Gauss points per element for the H2 seminorm.
const H2_ORDER: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpRow {
    pub n: usize,
    /// `max |u - u^I|`.
    pub max_err_0: f64,
    /// `max |(u - u^I)'|`.
    pub max_err_1: f64,
    /// `eps^{1/2} |u - u^I|_2`.
    pub h2_scaled: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpStudy {
    pub epsilon: f64,
    pub beta: f64,
    pub p: usize,
    pub rows: Vec<InterpRow>,
    /// Fits of the errors against N; the decay order is `-slope`.
    pub fit_0: SlopeFit,
    pub fit_1: SlopeFit,
    pub fit_h2: SlopeFit,
}

impl InterpStudy {
    pub fn order_0(&self) -> f64 {
        -self.fit_0.slope
    }

    pub fn order_1(&self) -> f64 {
        -self.fit_1.slope
    }

    pub fn order_h2(&self) -> f64 {
        -self.fit_h2.slope
    }
}

/// Interpolates `exp(-beta x / eps)` on eXp meshes with piecewise Hermite
/// polynomials of degree `p` (groups of `(p - 1) / 2` intervals) and measures
/// the interpolation errors. `p` must be odd.
pub fn interp_rate_study(epsilon: f64, beta: f64, p: usize, n_list: &[usize]) -> Result<InterpStudy> {
    if p < 3 {
        return Err(Error::DegreeTooLow(p));
    }
    if p.is_multiple_of(2) {
        return Err(Error::InvalidSpec(format!(
            "Hermite interpolants have odd degree; p = {p} is even"
        )));
    }
    if let Some(&n) = n_list.iter().find(|&&n| epsilon >= 1.0 / n as f64) {
        return Err(Error::AssumptionViolated { epsilon, n });
    }
    let group = (p - 1) / 2;
    let f = |x: f64, d: u32| eval_layer_function(x, epsilon, beta, LayerSide::Left, d);
    let rule = gauss_rule(H2_ORDER)?;

    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let mesh = build_exp_mesh(&MeshSpec::new(MeshKind::Exp, epsilon, beta, p, n))?;
        let data = HermiteData::sample(mesh.nodes(), |x| f(x, 0), |x| f(x, 1))?;
        let interp = hermite_interpolant(&data, group)?;
        let (mut e0, mut e1, mut h2) = (0.0f64, 0.0f64, 0.0);
        for w in mesh.nodes().windows(2) {
            let (a, b) = (w[0], w[1]);
            for i in 0..SAMPLES_PER_ELEMENT {
                let x = a + (b - a) * i as f64 / (SAMPLES_PER_ELEMENT - 1) as f64;
                e0 = e0.max((f(x, 0) - interp.eval(x, 0)).abs());
                e1 = e1.max((f(x, 1) - interp.eval(x, 1)).abs());
            }
            h2 += rule.integrate(a, b, |x| (f(x, 2) - interp.eval(x, 2)).powi(2));
        }
        rows.push(InterpRow {
            n,
            max_err_0: e0,
            max_err_1: e1,
            h2_scaled: epsilon.sqrt() * h2.sqrt(),
        });
    }
    let fit = |get: fn(&InterpRow) -> f64| {
        fit_slope(&rows.iter().map(|r| (r.n as f64, get(r))).collect::<Vec<_>>())
    };
    Ok(InterpStudy {
        epsilon,
        beta,
        p,
        fit_0: fit(|r| r.max_err_0)?,
        fit_1: fit(|r| r.max_err_1)?,
        fit_h2: fit(|r| r.h2_scaled)?,
        rows,
    })
}
