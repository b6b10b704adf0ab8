//! Special-function helpers shared by the density and tail modules.

use statrs::distribution::{Continuous, ContinuousCDF, Normal, StudentsT};
use statrs::function::gamma::ln_gamma;

/// Standard normal density.
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    Normal::standard().cdf(x)
}

/// log of the standard normal CDF, stable far into the left tail.
///
/// Below x = -12 the CDF underflows long before the log does, so we switch
/// to the Mills-ratio asymptotic series
/// `Phi(x) = phi(x)/(-x) * (1 - 1/x^2 + 3/x^4 - 15/x^6 + 105/x^8 - ...)`.
pub fn norm_ln_cdf(x: f64) -> f64 {
    if x > -12.0 {
        norm_cdf(x).ln()
    } else {
        let inv2 = 1.0 / (x * x);
        let series = 1.0
            + inv2 * (-1.0 + inv2 * (3.0 + inv2 * (-15.0 + inv2 * (105.0 - inv2 * 945.0))));
        -0.5 * x * x - 0.5 * (2.0 * std::f64::consts::PI).ln() - (-x).ln() + series.ln()
    }
}

/// Student-t CDF with real degrees of freedom.
pub fn t_cdf(x: f64, df: f64) -> f64 {
    StudentsT::new(0.0, 1.0, df)
        .expect("positive degrees of freedom")
        .cdf(x)
}

/// Student-t density with real degrees of freedom.
pub fn t_pdf(x: f64, df: f64) -> f64 {
    StudentsT::new(0.0, 1.0, df)
        .expect("positive degrees of freedom")
        .pdf(x)
}

/// Beta function B(a, b).
pub fn beta(a: f64, b: f64) -> f64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

/// Closed form of the half-line power integral
/// `∫_{-∞}^{b} (r^2 + c)^{-alpha} dr`, valid for `c > 0`, `alpha > 1/2`.
///
/// Substituting r = s * sqrt(c / (2*alpha - 1)) turns the integrand into a
/// Student-t kernel with 2*alpha - 1 degrees of freedom:
/// `c^{1/2-alpha} B(1/2, alpha-1/2) T_{2a-1}(b sqrt((2a-1)/c))`.
pub fn power_halfline(b: f64, c: f64, alpha: f64) -> f64 {
    debug_assert!(c > 0.0 && alpha > 0.5);
    let df = 2.0 * alpha - 1.0;
    c.powf(0.5 - alpha) * beta(0.5, alpha - 0.5) * t_cdf(b * (df / c).sqrt(), df)
}

/// Normalized increasing-ordinate trapezoid-free least squares slope of
/// y over x (used by the numeric regular-variation index estimator).
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        num += (xi - mx) * (yi - my);
        den += (xi - mx) * (xi - mx);
    }
    num / den
}
