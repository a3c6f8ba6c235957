//! Special functions and quadrature.
//!
//! `F(x, y) = ₂F₁(1, 1 − 2/x; 2 − 2/x; −y)` appears in every interference
//! transform. With `b = 1 − 2/x` it has the integral form
//! `F = b ∫₀¹ t^{b−1}/(1 + y t) dt`, which drives the three evaluation branches:
//! the Gauss series for small `y`, the Pfaff transform `−y → y/(1+y)` for
//! moderate `y`, and an expansion about `y = ∞` for large `y`.

mod quad;

use alloc::format;

use crate::math::{self, PI};
use crate::Error;

pub use quad::{
    integrate, integrate_finite, integrate_semi_infinite, Domain, QuadratureError, QuadratureEstimate,
    QuadratureSpec, SemiInfiniteTransform,
};

const SERIES_LIMIT: f64 = 0.5;
const PFAFF_LIMIT: f64 = 3.0;
const MAX_TERMS: usize = 4000;

/// `F(x, y)` with domain checks: `x > 2`, `y ≥ 0` and finite.
pub fn hyp_f(x: f64, y: f64) -> Result<f64, Error> {
    if !(x > 2.0) || !x.is_finite() {
        return Err(Error::domain("hyp_f", format!("exponent must exceed 2, got {x}")));
    }
    if !(y >= 0.0) || !y.is_finite() {
        return Err(Error::domain("hyp_f", format!("argument must be finite and non-negative, got {y}")));
    }
    Ok(hyp_f_unchecked(x, y))
}

/// `F(x, y)` without argument validation.
pub fn hyp_f_unchecked(x: f64, y: f64) -> f64 {
    let b = 1.0 - 2.0 / x;
    if y == 0.0 {
        1.0
    } else if y < SERIES_LIMIT {
        gauss_series(b, y)
    } else if y <= PFAFF_LIMIT {
        pfaff_series(b, y)
    } else {
        large_argument(b, y)
    }
}

/// `y · F(x, y)`, which is 0 at `y = 0` and grows like `y^{2/x}`.
pub fn hyp_f_times(x: f64, y: f64) -> f64 {
    if y == 0.0 {
        0.0
    } else {
        y * hyp_f_unchecked(x, y)
    }
}

/// `1 / sin(2π/α)` for `α > 2`.
pub fn csc2pi_over(alpha: f64) -> Result<f64, Error> {
    if !(alpha > 2.0) || !alpha.is_finite() {
        return Err(Error::domain("csc2pi_over", format!("alpha must exceed 2, got {alpha}")));
    }
    Ok(csc2pi_unchecked(alpha))
}

pub(crate) fn csc2pi_unchecked(alpha: f64) -> f64 {
    // sin(2π/α) = sin(π − 2π/α) keeps precision near α = 2.
    1.0 / math::sin(PI * (alpha - 2.0) / alpha)
}

/// [`integrate`] for integrands that can fail. The first error stops the
/// integration and is returned unchanged.
pub fn integrate_fallible(
    mut f: impl FnMut(f64) -> Result<f64, Error>,
    domain: Domain,
    spec: &QuadratureSpec,
) -> Result<QuadratureEstimate, Error> {
    let mut failure = None;
    let result = integrate(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        domain,
        spec,
    );
    match failure {
        Some(e) => Err(e),
        None => result.map_err(Error::from),
    }
}

/// `Σ b/(b+n) (−y)ⁿ`.
fn gauss_series(b: f64, y: f64) -> f64 {
    let mut sum = 1.0;
    let mut power = 1.0;
    for n in 1..MAX_TERMS {
        power *= -y;
        let term = b / (b + n as f64) * power;
        sum += term;
        if math::abs(term) <= f64::EPSILON * 0.25 * math::abs(sum) {
            break;
        }
    }
    sum
}

/// `(1+y)⁻¹ Σ n!/(1+b)ₙ wⁿ` with `w = y/(1+y)`.
fn pfaff_series(b: f64, y: f64) -> f64 {
    let w = y / (1.0 + y);
    let c = 1.0 + b;
    let mut sum = 1.0;
    let mut term = 1.0;
    for n in 0..MAX_TERMS {
        let n = n as f64;
        term *= (n + 1.0) / (c + n) * w;
        sum += term;
        if term <= f64::EPSILON * 0.25 * sum {
            break;
        }
    }
    sum / (1.0 + y)
}

/// `b y^{−b} [π/sin(πb) − ∫_y^∞ s^{b−1}/(1+s) ds]`, the tail expanded in
/// `ε = 1/(1+y)`.
fn large_argument(b: f64, y: f64) -> f64 {
    let eps = 1.0 / (1.0 + y);
    let a = 1.0 - b;
    let mut coef = 1.0;
    let mut power = 1.0;
    let mut tail = 1.0 / a;
    for n in 1..MAX_TERMS {
        let nf = n as f64;
        coef *= (a + nf - 1.0) / nf;
        power *= eps;
        let term = coef * power / (nf + a);
        tail += term;
        if term <= f64::EPSILON * 0.25 * tail {
            break;
        }
    }
    let tail = math::powf(eps, a) * tail;
    b * math::powf(y, -b) * (PI / math::sin(PI * b) - tail)
}
