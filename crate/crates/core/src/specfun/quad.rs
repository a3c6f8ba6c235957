//! Adaptive Gauss–Kronrod quadrature (7-point Gauss, 15-point Kronrod) with
//! global bisection of the panel carrying the largest error estimate.

use alloc::vec::Vec;

use crate::math;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SemiInfiniteTransform {
    /// `x = a + scale · t/(1 − t)` for `t ∈ [0, 1)`.
    Rational { scale: f64 },
}

impl Default for SemiInfiniteTransform {
    fn default() -> Self {
        SemiInfiniteTransform::Rational { scale: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub transform: SemiInfiniteTransform,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_subdivisions: 200,
            transform: SemiInfiniteTransform::default(),
        }
    }
}

impl QuadratureSpec {
    /// Tolerances for an integral nested inside one evaluated with `self`.
    pub fn inner(&self) -> Self {
        Self {
            rel_tol: self.rel_tol / 10.0,
            abs_tol: self.abs_tol / 10.0,
            ..*self
        }
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    fn target(&self, value: f64) -> f64 {
        (self.rel_tol * math::abs(value)).max(self.abs_tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Finite { a: f64, b: f64 },
    SemiInfinite { a: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureEstimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum QuadratureError {
    #[error("quadrature did not converge after {subdivisions} subdivisions: estimate {estimate}, error bound {error_bound}")]
    NotConverged {
        estimate: f64,
        error_bound: f64,
        subdivisions: usize,
    },
    #[error("integrand is not finite at x = {at}")]
    NonFinite { at: f64 },
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> Result<Panel, QuadratureError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |f: &mut dyn FnMut(f64) -> f64, x: f64| {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(QuadratureError::NonFinite { at: x })
        }
    };

    let fc = eval(f, center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = math::abs(kronrod);
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval(f, center - dx)?;
        let f2 = eval(f, center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (math::abs(f1) + math::abs(f2));
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * math::abs(fc - mean);
    for j in 0..7 {
        asc += WGK[j] * (math::abs(fv1[j] - mean) + math::abs(fv2[j] - mean));
    }

    let h = math::abs(half);
    let value = kronrod * half;
    let abs_sum = abs_sum * h;
    let asc = asc * h;
    let mut error = math::abs((kronrod - gauss) * half);
    if asc != 0.0 && error != 0.0 {
        error = asc * libm::pow(200.0 * error / asc, 1.5).min(1.0);
    }
    if abs_sum > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_sum);
    }
    Ok(Panel { a, b, value, error })
}

/// Integrates `f` over `domain`.
///
/// A non-finite integrand value aborts with [`QuadratureError::NonFinite`];
/// callers that need to surface their own errors from inside `f` can stash
/// the error and return `NaN`.
pub fn integrate(
    mut f: impl FnMut(f64) -> f64,
    domain: Domain,
    spec: &QuadratureSpec,
) -> Result<QuadratureEstimate, QuadratureError> {
    match domain {
        Domain::Finite { a, b } => adapt(&mut f, a, b, spec),
        Domain::SemiInfinite { a } => {
            let SemiInfiniteTransform::Rational { scale } = spec.transform;
            let mut g = |t: f64| {
                let om = 1.0 - t;
                let y = f(a + scale * t / om);
                if y == 0.0 {
                    0.0
                } else {
                    y * scale / (om * om)
                }
            };
            adapt(&mut g, 0.0, 1.0, spec)
        }
    }
}

/// Convenience wrapper for `[a, ∞)` returning only the value.
pub fn integrate_semi_infinite(
    f: impl FnMut(f64) -> f64,
    a: f64,
    spec: &QuadratureSpec,
) -> Result<f64, QuadratureError> {
    integrate(f, Domain::SemiInfinite { a }, spec).map(|e| e.value)
}

pub fn integrate_finite(
    f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<f64, QuadratureError> {
    integrate(f, Domain::Finite { a, b }, spec).map(|e| e.value)
}

fn adapt(
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureEstimate, QuadratureError> {
    if a == b {
        return Ok(QuadratureEstimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
            subdivisions: 0,
        });
    }
    let first = gk15(f, a, b)?;
    let mut panels: Vec<Panel> = Vec::with_capacity(spec.max_subdivisions.max(1) + 1);
    panels.push(first);
    let mut evaluations = 15;
    let mut value = first.value;
    let mut error = first.error;

    loop {
        if error <= spec.target(value) {
            break;
        }
        if panels.len() > spec.max_subdivisions {
            return Err(QuadratureError::NotConverged {
                estimate: value,
                error_bound: error,
                subdivisions: panels.len() - 1,
            });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, be), (i, p)| {
                if p.error > be {
                    (i, p.error)
                } else {
                    (bi, be)
                }
            });
        let p = panels[worst];
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a.min(p.b) || mid >= p.a.max(p.b) {
            return Err(QuadratureError::NotConverged {
                estimate: value,
                error_bound: error,
                subdivisions: panels.len() - 1,
            });
        }
        let left = gk15(f, p.a, mid)?;
        let right = gk15(f, mid, p.b)?;
        evaluations += 30;
        panels[worst] = left;
        panels.push(right);
        // Re-summing avoids drift from repeated subtraction.
        value = panels.iter().map(|p| p.value).sum();
        error = panels.iter().map(|p| p.error).sum();
    }

    Ok(QuadratureEstimate {
        value,
        error,
        evaluations,
        subdivisions: panels.len() - 1,
    })
}
