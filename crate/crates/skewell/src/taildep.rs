//! Bivariate tail-dependence parameters.
//!
//! Three routes to b(1,1): the polar-coordinate integral of the skew-t
//! tail density split at zeta = arctan(a2^{1/nu}), 2-D quadrature of the
//! copula tail density over the unit square, and a rank-based empirical
//! estimator on samples.

use crate::error::{Error, Result};
use crate::linalg::DispersionMatrix;
use crate::quad;
use crate::special::t_cdf;
use crate::tail::{CopulaTailDensity, Orientation};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailDepMethod {
    PolarClosedForm,
    CubeQuadrature,
    Empirical,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailDepParams {
    pub b_upper: f64,
    pub b_lower: f64,
    pub method: TailDepMethod,
    pub error_estimate: f64,
}

/// Bivariate skew-t parameter set.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SkewTParams {
    pub nu: f64,
    pub rho: f64,
    pub delta1: f64,
    pub delta2: f64,
}

impl SkewTParams {
    pub fn new(nu: f64, rho: f64, delta1: f64, delta2: f64) -> Result<Self> {
        if nu.is_nan() || nu <= 0.0 || nu.is_infinite() {
            return Err(Error::ConfigError {
                detail: format!("nu must be positive, got {nu}"),
            });
        }
        if rho.is_nan() || rho.abs() >= 1.0 {
            return Err(Error::ConfigError {
                detail: format!("|rho| must be below 1, got {rho}"),
            });
        }
        // delta compatible with rho iff the extended dispersion is PD
        let sigma = DispersionMatrix::correlation2(rho)?;
        if delta1.abs() >= 1.0 || delta2.abs() >= 1.0 {
            return Err(Error::IncompatibleSkewness {
                detail: format!("|delta| must be below 1, got ({delta1}, {delta2})"),
            });
        }
        let q = sigma.inv_quad(&[delta1, delta2])?;
        if q >= 1.0 {
            return Err(Error::IncompatibleSkewness {
                detail: format!("delta Sigma^-1 delta' = {q} >= 1"),
            });
        }
        Ok(Self {
            nu,
            rho,
            delta1,
            delta2,
        })
    }

    pub fn reflected(&self) -> Self {
        Self {
            delta1: -self.delta1,
            delta2: -self.delta2,
            ..*self
        }
    }

    /// theta via the bivariate closed form (delta_i - rho delta_j) / D.
    pub fn theta(&self) -> (f64, f64) {
        let r2 = 1.0 - self.rho * self.rho;
        let d = (r2
            * (r2 - self.delta1 * self.delta1 - self.delta2 * self.delta2
                + 2.0 * self.delta1 * self.delta2 * self.rho))
            .sqrt();
        (
            (self.delta1 - self.rho * self.delta2) / d,
            (self.delta2 - self.rho * self.delta1) / d,
        )
    }

    pub fn theta_bar(&self) -> (f64, f64) {
        (
            self.delta1 / (1.0 - self.delta1 * self.delta1).sqrt(),
            self.delta2 / (1.0 - self.delta2 * self.delta2).sqrt(),
        )
    }

    /// a2 = T_{nu+1}(tb2 sqrt(nu+1)) / T_{nu+1}(tb1 sqrt(nu+1)).
    pub fn a2(&self) -> f64 {
        let (tb1, tb2) = self.theta_bar();
        let s = (self.nu + 1.0).sqrt();
        t_cdf(tb2 * s, self.nu + 1.0) / t_cdf(tb1 * s, self.nu + 1.0)
    }

    /// K* = (1-rho^2)^{(nu+1)/2} nu^2 Γ(nu/2) /
    ///      (2 sqrt(pi) Γ((nu+1)/2) T_{nu+1}(tb1 sqrt(nu+1))).
    pub fn k_star(&self) -> f64 {
        let (tb1, _) = self.theta_bar();
        let nu = self.nu;
        let ln = 0.5 * (nu + 1.0) * (1.0 - self.rho * self.rho).ln() + 2.0 * nu.ln()
            + ln_gamma(nu / 2.0)
            - 2.0f64.ln()
            - 0.5 * PI.ln()
            - ln_gamma((nu + 1.0) / 2.0);
        ln.exp() / t_cdf(tb1 * (nu + 1.0).sqrt(), nu + 1.0)
    }
}

/// The polar profile h(omega) of the skew-t tail density,
/// lambda(r cos w, r sin w) = h(w) r^{-(nu+2)}.
pub fn skew_t_h(omega: f64, p: &SkewTParams) -> f64 {
    let (th1, th2) = p.theta();
    let s = 1.0 - 2.0 * p.rho * omega.cos() * omega.sin();
    let arg = (th1 * omega.cos() + th2 * omega.sin())
        * ((p.nu + 2.0) * (1.0 - p.rho * p.rho)).sqrt()
        / s.sqrt();
    p.k_star() * s.powf(-(p.nu + 2.0) / 2.0) * t_cdf(arg, p.nu + 2.0)
}

fn polar_b(p: &SkewTParams) -> Result<(f64, f64)> {
    let nu = p.nu;
    let a2 = p.a2();
    let zeta = a2.powf(1.0 / nu).atan();
    let piece1 = quad::adaptive(
        &|om: f64| skew_t_h(om, p) * om.sin().powf(nu),
        0.0,
        zeta,
        1e-10,
        1e-10,
    )?;
    let piece2 = quad::adaptive(
        &|om: f64| skew_t_h(om, p) * om.cos().powf(nu),
        zeta,
        PI / 2.0,
        1e-10,
        1e-10,
    )?;
    let b = piece1.value / (a2 * nu) + piece2.value / nu;
    let err = piece1.abs_error / (a2 * nu) + piece2.abs_error / nu;
    Ok((b, err))
}

/// Upper and lower tail-dependence parameters b(1,1) by the polar integral;
/// the lower parameter reuses the formula with (delta, theta) negated.
pub fn skew_t_taildep(p: &SkewTParams) -> Result<TailDepParams> {
    let (bu, eu) = polar_b(p)?;
    let (bl, el) = polar_b(&p.reflected())?;
    Ok(TailDepParams {
        b_upper: bu,
        b_lower: bl,
        method: TailDepMethod::PolarClosedForm,
        error_estimate: eu.max(el),
    })
}

/// b(1,1) = ∫_0^1 ∫_0^1 lambda_U dw for a tail-order-1 copula tail density.
pub fn cube_b(ctd: &CopulaTailDensity) -> Result<(f64, f64)> {
    if (ctd.kappa - 1.0).abs() > 1e-12 {
        return Err(Error::WrongRegime { expected: "heavy" });
    }
    if ctd.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: ctd.dim(),
        });
    }
    let r = quad::adaptive_2d(
        &|w1: f64, w2: f64| ctd.eval(&[w1, w2]).unwrap_or(f64::NAN),
        0.0,
        1.0,
        0.0,
        1.0,
        1e-9,
        1e-9,
    )?;
    Ok((r.value, r.abs_error))
}

/// Tail-dependence record from cube quadrature of the upper and lower
/// copula tail densities.
pub fn cube_taildep(
    upper: &CopulaTailDensity,
    lower: &CopulaTailDensity,
) -> Result<TailDepParams> {
    if upper.orientation != Orientation::Upper || lower.orientation != Orientation::Lower {
        return Err(Error::ConfigError {
            detail: "cube_taildep expects an (upper, lower) pair".into(),
        });
    }
    let (bu, eu) = cube_b(upper)?;
    let (bl, el) = cube_b(lower)?;
    Ok(TailDepParams {
        b_upper: bu,
        b_lower: bl,
        method: TailDepMethod::CubeQuadrature,
        error_estimate: eu.max(el),
    })
}

/// Rank-based empirical estimate: the share of the top-k (bottom-k) joint
/// exceedances among k = n u, with a binomial standard error.
pub fn empirical_taildep(samples: &DMatrix<f64>, u: f64) -> Result<TailDepParams> {
    let n = samples.nrows();
    if samples.ncols() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: samples.ncols(),
        });
    }
    if n < 10_000 {
        return Err(Error::TooFewSamples {
            got: n,
            required: 10_000,
        });
    }
    if u.is_nan() || u <= 0.0 || u >= 0.5 {
        return Err(Error::ConfigError {
            detail: format!("threshold u = {u} outside (0, 0.5)"),
        });
    }
    let k = ((n as f64 * u).round() as usize).max(1);

    let rank_of = |col: usize| -> Vec<usize> {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| {
            samples[(a, col)]
                .partial_cmp(&samples[(b, col)])
                .expect("finite samples")
        });
        let mut ranks = vec![0usize; n];
        for (r, &i) in idx.iter().enumerate() {
            ranks[i] = r;
        }
        ranks
    };
    let r1 = rank_of(0);
    let r2 = rank_of(1);

    let mut top = 0usize;
    let mut bottom = 0usize;
    for i in 0..n {
        if r1[i] >= n - k && r2[i] >= n - k {
            top += 1;
        }
        if r1[i] < k && r2[i] < k {
            bottom += 1;
        }
    }
    let denom = n as f64 * u;
    let se = |count: usize| {
        let p = count as f64 / n as f64;
        (p * (1.0 - p) / n as f64).sqrt() / u
    };
    Ok(TailDepParams {
        b_upper: top as f64 / denom,
        b_lower: bottom as f64 / denom,
        method: TailDepMethod::Empirical,
        error_estimate: se(top).max(se(bottom)),
    })
}

/// Classical symmetric-t tail dependence
/// `2 T_{nu+1}(-sqrt((nu+1)(1-rho)/(1+rho)))`; the delta = 0 oracle.
pub fn symmetric_t_taildep(nu: f64, rho: f64) -> f64 {
    2.0 * t_cdf(-((nu + 1.0) * (1.0 - rho) / (1.0 + rho)).sqrt(), nu + 1.0)
}
