use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Number of equispaced samples used to certify the coefficient bounds.
const FLOOR_SAMPLES: usize = 2001;

/// Coefficients `a`, `b` and `eps` of the bilinear form
/// `eps^2 <u'', v''> + <a u', v'> + <b u, v>`.
#[derive(Clone)]
pub struct CoefficientSet {
    a: ScalarFn,
    b: ScalarFn,
    epsilon: f64,
    a_floor: f64,
    checked: bool,
}

impl fmt::Debug for CoefficientSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientSet")
            .field("epsilon", &self.epsilon)
            .field("a_floor", &self.a_floor)
            .field("checked", &self.checked)
            .finish_non_exhaustive()
    }
}

impl CoefficientSet {
    /// Builds a checked coefficient set. The floor `a_0` is the minimum of `a`
    /// over an equispaced sampling of [0, 1]; it must be positive and `b` must
    /// be nonnegative on the same samples.
    pub fn new(epsilon: f64, a: ScalarFn, b: ScalarFn) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidSpec(format!(
                "epsilon = {epsilon} must lie in (0, 1]"
            )));
        }
        let mut a_floor = f64::INFINITY;
        for i in 0..FLOOR_SAMPLES {
            let x = i as f64 / (FLOOR_SAMPLES - 1) as f64;
            let (av, bv) = (a(x), b(x));
            if !(av > 0.0 && av.is_finite()) || !(bv >= 0.0 && bv.is_finite()) {
                return Err(Error::CoefficientViolation {
                    x,
                    a: av,
                    b: bv,
                    a_floor: 0.0,
                });
            }
            a_floor = a_floor.min(av);
        }
        Ok(CoefficientSet {
            a,
            b,
            epsilon,
            a_floor,
            checked: true,
        })
    }

    /// A coefficient set that skips positivity checks, so that single terms of
    /// the bilinear form can be isolated (`a = 0` or `eps = 0`). Only for
    /// verification; such forms need not be coercive.
    pub fn unchecked(epsilon: f64, a: ScalarFn, b: ScalarFn) -> Self {
        CoefficientSet {
            a,
            b,
            epsilon,
            a_floor: 0.0,
            checked: false,
        }
    }

    pub fn constant(epsilon: f64, a: f64, b: f64) -> Result<Self> {
        Self::new(epsilon, Arc::new(move |_| a), Arc::new(move |_| b))
    }

    /// Same coefficients with a different perturbation parameter.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        if self.checked && !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidSpec(format!(
                "epsilon = {epsilon} must lie in (0, 1]"
            )));
        }
        Ok(CoefficientSet {
            epsilon,
            ..self.clone()
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn a_floor(&self) -> f64 {
        self.a_floor
    }

    pub fn is_checked(&self) -> bool {
        self.checked
    }

    pub fn a(&self, x: f64) -> f64 {
        (self.a)(x)
    }

    pub fn b(&self, x: f64) -> f64 {
        (self.b)(x)
    }

    /// Default layer exponent `sqrt(a_0)`.
    pub fn default_beta(&self) -> f64 {
        self.a_floor.sqrt()
    }

    /// Evaluates `(a(x), b(x))`, enforcing `a > 0`, `b >= 0` when checked.
    pub(crate) fn sample(&self, x: f64) -> Result<(f64, f64)> {
        let (a, b) = (self.a(x), self.b(x));
        if self.checked && !(a > 0.0 && a.is_finite() && b >= 0.0 && b.is_finite()) {
            return Err(Error::CoefficientViolation {
                x,
                a,
                b,
                a_floor: self.a_floor,
            });
        }
        Ok((a, b))
    }
}
