//! Tail densities lambda(w), copula tail densities lambda_U / lambda_L,
//! tail orders and tail-equivalence constants for the heavy (Frechet) and
//! light (Gumbel) generator classes.
//!
//! Heavy regime (g_{d+1} regularly varying with index -alpha, alpha > (d+1)/2):
//!   lambda(w)  = 2K |Sigma|^{-1/2} ∫_{-∞}^{w theta'} (r² + w Sigma^{-1} w')^{-alpha} dr,
//!   kappa = 1, gamma = 2 alpha - d - 1,
//!   a_i = ∫_{-∞}^{tb_i}(r²+1)^{-alpha_m} dr / ∫_{-∞}^{tb_1}(r²+1)^{-alpha_m} dr,
//! with alpha_m = alpha - (d-1)/2 the index of the bivariate marginal
//! generator that governs the univariate margins.
//!
//! Light regime (Gumbel-quadratic generator):
//!   lambda(w) = c |Sigma|^{-1/2} exp(-w Sigma^{-1} 1'),  c in {1, 2},
//!   kappa = 1 Sigma^{-1} 1'.
//!
//! The copula tail density follows by the homeomorphic transforms
//! y_i = a_i^{1/gamma} w_i^{-1/gamma} (heavy) and y_i = -ln(w_i / a_i)
//! (light), each with its Jacobian.

use crate::error::{Error, Result};
use crate::generators::{DensityGenerator, ScalarFn, TailKind};
use crate::linalg::DispersionMatrix;
use crate::model::{MixtureSkewNormal2, ModelFamily, SkewEllipticalModel};
use crate::quad;
use crate::special::{norm_ln_cdf, power_halfline, t_cdf};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Heavy,
    Light,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Upper,
    Lower,
}

#[derive(Clone)]
enum LambdaKernel {
    Heavy {
        k: f64,
        alpha: f64,
        /// +1 for the upper tail, -1 for the lower (flips the integral limit)
        sign: f64,
        theta: DVector<f64>,
        sigma: DispersionMatrix,
        g_full: DensityGenerator,
    },
    Light {
        c: f64,
        sigma: DispersionMatrix,
        inv_one: DVector<f64>,
        one_theta: f64,
        gd: DensityGenerator,
        g_full: DensityGenerator,
    },
    MixtureLight {
        rho: f64,
    },
}

/// Tail order, tail-equivalence constants and an evaluable lambda(w).
#[derive(Clone)]
pub struct TailDensityResult {
    pub regime: Regime,
    pub orientation: Orientation,
    pub kappa: f64,
    /// tail-equivalence constants, a_1 = 1
    pub a: Vec<f64>,
    /// gamma = 2 alpha - d - 1 (heavy regime only)
    pub gamma: Option<f64>,
    /// normalizing constant in the lambda display (heavy regime only)
    pub k_const: Option<f64>,
    /// description of the normalizing function V(t)
    pub v_description: String,
    aux_m: Option<ScalarFn>,
    kernel: LambdaKernel,
    dim: usize,
}

impl std::fmt::Debug for TailDensityResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "TailDensityResult({:?}/{:?}, kappa={}, a={:?}, gamma={:?})",
            self.regime, self.orientation, self.kappa, self.a, self.gamma
        )
    }
}

impl TailDensityResult {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Auxiliary self-neglecting function m(t) (light regime).
    pub fn aux_m(&self) -> Option<&ScalarFn> {
        self.aux_m.as_ref()
    }

    /// Evaluate lambda(w). Heavy-regime lambda lives on w > 0; the
    /// light-regime exponential form extends to all of R^d, which the
    /// copula transform relies on.
    pub fn lambda(&self, w: &[f64]) -> Result<f64> {
        if w.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: w.len(),
            });
        }
        match &self.kernel {
            LambdaKernel::Heavy {
                k,
                alpha,
                sign,
                theta,
                sigma,
                ..
            } => {
                if w.iter().any(|&x| x.is_nan() || x <= 0.0) {
                    return Err(Error::DomainError {
                        detail: "heavy-regime lambda requires w > 0".into(),
                    });
                }
                let q = sigma.inv_quad(w)?;
                let upper = sign * theta.dot(&DVector::from_column_slice(w));
                Ok(2.0 * k * (-0.5 * sigma.ln_det()).exp() * power_halfline(upper, q, *alpha))
            }
            LambdaKernel::Light {
                c, sigma, inv_one, ..
            } => {
                let w = DVector::from_column_slice(w);
                Ok(c * (-0.5 * sigma.ln_det()).exp() * (-w.dot(inv_one)).exp())
            }
            LambdaKernel::MixtureLight { rho } => {
                let det = 1.0 - rho * rho;
                Ok(det.powf(-0.5) * (-(w[0] + w[1]) / (1.0 + rho.abs())).exp())
            }
        }
    }

    /// log of the family normalizer the tail limit divides by:
    /// ln V(t) with V(t) = t^{d+1} g_{d+1}(t²)/K in the heavy regime, and
    /// ln G(t) in the light regime (G(t) = g_d(t² kappa) when 1 theta' >= 0,
    /// the t-dependent half-line integral when 1 theta' < 0).
    pub fn ln_normalizer(&self, t: f64) -> f64 {
        match &self.kernel {
            LambdaKernel::Heavy { k, g_full, .. } => {
                let d1 = g_full.dim() as f64;
                d1 * t.ln() + g_full.ln_eval(t * t) - k.ln()
            }
            LambdaKernel::Light {
                one_theta,
                gd,
                g_full,
                ..
            } => {
                let q = t * t * self.kappa;
                if *one_theta >= 0.0 {
                    gd.ln_eval(q)
                } else {
                    let b = t * one_theta;
                    match g_full.family() {
                        crate::generators::GeneratorFamily::Normal => {
                            // ∫_{-∞}^{b} g_{d+1}(r²+q) dr = g_d(q) Phi(b) for the
                            // normal generator
                            gd.ln_eval(q) + norm_ln_cdf(b)
                        }
                        _ => quad::integral_below(
                            &|r: f64| g_full.eval(r * r + q),
                            b,
                            1e-300,
                            1e-10,
                        )
                        .map(|r| r.value.ln())
                        .unwrap_or(f64::NAN),
                    }
                }
            }
            LambdaKernel::MixtureLight { rho } => {
                let kappa = 2.0 / (1.0 + rho.abs());
                2.0f64.ln() - (2.0 * PI).ln() - 0.5 * t * t * kappa
            }
        }
    }

    fn light_c(&self) -> Option<f64> {
        match &self.kernel {
            LambdaKernel::Light { c, .. } => Some(*c),
            LambdaKernel::MixtureLight { .. } => Some(1.0),
            _ => None,
        }
    }

    /// Prefactor c of the light-regime limit (2 when 1 theta' != 0).
    pub fn light_prefactor(&self) -> Option<f64> {
        self.light_c()
    }
}

/// The constant of Eq-type K1: the reciprocal of the marginal survival
/// normalization lim t^nu F-bar_1(t) of a skew-t margin,
/// `Γ(ν/2) √π / (2 Γ((ν+1)/2) ν^{(ν-2)/2} T_{ν+1}(tb1 √(ν+1)))`.
pub fn k1_constant(nu: f64, theta_bar1: f64) -> f64 {
    let ln_num = ln_gamma(nu / 2.0) + 0.5 * PI.ln();
    let ln_den = 2.0f64.ln() + ln_gamma((nu + 1.0) / 2.0) + 0.5 * (nu - 2.0) * nu.ln();
    (ln_num - ln_den).exp() / t_cdf(theta_bar1 * (nu + 1.0).sqrt(), nu + 1.0)
}

fn require_heavy(model: &SkewEllipticalModel) -> Result<f64> {
    let class = model.generator().classify_tail()?;
    let alpha = match class.kind {
        TailKind::RegularlyVarying { alpha } => alpha,
        TailKind::GumbelQuadratic { .. } => return Err(Error::WrongRegime { expected: "heavy" }),
    };
    let d = model.dim() as f64;
    if alpha <= (d + 1.0) / 2.0 {
        return Err(Error::ClassMismatch {
            detail: format!("RV index {alpha} must exceed (d+1)/2 = {}", (d + 1.0) / 2.0),
        });
    }
    if !model.sigma().is_unit_diag() {
        return Err(Error::SigmaNotNormalized);
    }
    Ok(alpha)
}

/// Default K for the heavy-regime lambda display: the value that makes
/// V(t) = t^{d+1} g_{d+1}(t²)/K tail-equivalent to the relevant tail of
/// margin 1 (slowly varying factor 1); the lower tail normalizes against
/// the reflected margin. Closed form for the Student-t family; 1 for
/// generic RV generators, overridable by the caller.
fn default_heavy_k(model: &SkewEllipticalModel, sign: f64) -> f64 {
    match model.family() {
        ModelFamily::StudentT { nu } => {
            crate::generators::student_t_constant(nu, model.dim() + 1)
                * k1_constant(nu, sign * model.theta_bar()[0])
        }
        _ => 1.0,
    }
}

fn heavy_equivalence_constants(alpha: f64, d: usize, theta_bar: &[f64], sign: f64) -> Vec<f64> {
    let alpha_m = alpha - (d as f64 - 1.0) / 2.0;
    let base = power_halfline(sign * theta_bar[0], 1.0, alpha_m);
    theta_bar
        .iter()
        .map(|&tb| power_halfline(sign * tb, 1.0, alpha_m) / base)
        .collect()
}

fn heavy_result(
    model: &SkewEllipticalModel,
    k: Option<f64>,
    orientation: Orientation,
) -> Result<TailDensityResult> {
    let alpha = require_heavy(model)?;
    let d = model.dim();
    let sign = match orientation {
        Orientation::Upper => 1.0,
        Orientation::Lower => -1.0,
    };
    let gamma = 2.0 * alpha - d as f64 - 1.0;
    let k = k.unwrap_or_else(|| default_heavy_k(model, sign));
    let a = heavy_equivalence_constants(alpha, d, model.theta_bar(), sign);
    Ok(TailDensityResult {
        regime: Regime::Heavy,
        orientation,
        kappa: 1.0,
        a,
        gamma: Some(gamma),
        k_const: Some(k),
        v_description: format!(
            "V(t) = t^{} g_{}(t^2) / K, regularly varying with index -{gamma}",
            d + 1,
            d + 1
        ),
        aux_m: None,
        kernel: LambdaKernel::Heavy {
            k,
            alpha,
            sign,
            theta: DVector::from_column_slice(model.theta()),
            sigma: model.sigma().clone(),
            g_full: model.generator().clone(),
        },
        dim: d,
    })
}

/// Upper tail density of a heavy-regime model. `k` overrides the
/// normalizing constant; `None` selects the survival-normalized default.
pub fn heavy_tail_density(model: &SkewEllipticalModel, k: Option<f64>) -> Result<TailDensityResult> {
    heavy_result(model, k, Orientation::Upper)
}

/// Lower tail density: same form with the integral limit at -w theta' and
/// equivalence constants taken at -theta_bar.
pub fn heavy_lower_tail_density(
    model: &SkewEllipticalModel,
    k: Option<f64>,
) -> Result<TailDensityResult> {
    heavy_result(model, k, Orientation::Lower)
}

fn light_equivalence_constants(theta_bar: &[f64]) -> Result<Vec<f64>> {
    let eps = 1e-15;
    let all_nonneg = theta_bar.iter().all(|&t| t >= -eps);
    let all_neg = theta_bar.iter().all(|&t| t < -eps);
    if all_nonneg {
        let first_zero = theta_bar[0].abs() <= eps;
        Ok(theta_bar
            .iter()
            .map(|&tb| {
                let zero = tb.abs() <= eps;
                match (first_zero, zero) {
                    (true, true) => 1.0,
                    (true, false) => 2.0,
                    (false, true) => 0.5,
                    (false, false) => 1.0,
                }
            })
            .collect())
    } else if all_neg {
        let equal = theta_bar
            .iter()
            .all(|&t| (t - theta_bar[0]).abs() <= 1e-12 * theta_bar[0].abs());
        if !equal {
            return Err(Error::MixedSignSkewness {
                detail: "all-negative marginal skewness must be equal across margins".into(),
            });
        }
        Ok(vec![1.0; theta_bar.len()])
    } else {
        Err(Error::MixedSignSkewness {
            detail: format!("mixed-sign theta_bar {theta_bar:?} is not supported"),
        })
    }
}

fn light_result(
    model: &SkewEllipticalModel,
    theta_bar_for_a: &[f64],
    one_theta: f64,
    orientation: Orientation,
) -> Result<TailDensityResult> {
    let class = model.generator().classify_tail()?;
    let m = match class.kind {
        TailKind::GumbelQuadratic { m } => m,
        TailKind::RegularlyVarying { .. } => return Err(Error::WrongRegime { expected: "light" }),
    };
    if !model.sigma().is_unit_diag() {
        return Err(Error::SigmaNotNormalized);
    }
    let a = light_equivalence_constants(theta_bar_for_a)?;
    let kappa = model.sigma().one_inv_one();
    let c = if one_theta.abs() > 1e-12 { 2.0 } else { 1.0 };
    let v_description = if one_theta >= -1e-12 {
        format!("V(t) = m(t)^{{d/kappa}} g_d(t^2 kappa)^{{1/kappa}}, kappa = {kappa}")
    } else {
        format!(
            "V(t) = m(t)^{{d/kappa}} G(t)^{{1/kappa}} with the t-dependent half-line integral \
             G(t) = int_(-inf)^(t 1 theta') g_(d+1)(r^2 + t^2 kappa) dr, kappa = {kappa}"
        )
    };
    Ok(TailDensityResult {
        regime: Regime::Light,
        orientation,
        kappa,
        a,
        gamma: None,
        k_const: None,
        v_description,
        aux_m: Some(m),
        kernel: LambdaKernel::Light {
            c,
            sigma: model.sigma().clone(),
            inv_one: model.sigma().inv_one(),
            one_theta,
            gd: model.marginal_generator().clone(),
            g_full: model.generator().clone(),
        },
        dim: model.dim(),
    })
}

/// Upper tail density of a light-regime (Gumbel-quadratic) model.
///
/// Requires theta_bar all >= 0, or all < 0 and equal; mixed signs need
/// orthogonal transforms that are out of scope.
pub fn light_tail_density(model: &SkewEllipticalModel) -> Result<TailDensityResult> {
    let one_theta: f64 = model.theta().iter().sum();
    light_result(model, model.theta_bar(), one_theta, Orientation::Upper)
}

/// Lower tail density: left-tail equivalence constants are the right-tail
/// constants of the reflected model, and the normalizing integral runs to
/// -t 1 theta'.
pub fn light_lower_tail_density(model: &SkewEllipticalModel) -> Result<TailDensityResult> {
    let reflected_tb: Vec<f64> = model.theta_bar().iter().map(|t| -t).collect();
    let one_theta: f64 = -model.theta().iter().sum::<f64>();
    light_result(model, &reflected_tb, one_theta, Orientation::Lower)
}

/// Copula tail density with an evaluable map on w > 0.
#[derive(Clone)]
pub struct CopulaTailDensity {
    pub orientation: Orientation,
    pub kappa: f64,
    pub slowly_varying: String,
    base: TailDensityResult,
}

impl std::fmt::Debug for CopulaTailDensity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "CopulaTailDensity({:?}, kappa={}, base={:?})",
            self.orientation, self.kappa, self.base
        )
    }
}

impl CopulaTailDensity {
    pub fn dim(&self) -> usize {
        self.base.dim
    }

    pub fn base(&self) -> &TailDensityResult {
        &self.base
    }

    /// lambda_{U/L}(w; kappa) for w > 0.
    pub fn eval(&self, w: &[f64]) -> Result<f64> {
        if w.len() != self.base.dim {
            return Err(Error::DimensionMismatch {
                expected: self.base.dim,
                got: w.len(),
            });
        }
        if w.iter().any(|&x| x.is_nan() || x <= 0.0) {
            return Err(Error::DomainError {
                detail: "copula tail density requires w > 0".into(),
            });
        }
        match self.base.regime {
            Regime::Heavy => {
                let gamma = self.base.gamma.expect("heavy result carries gamma");
                let mut jac = 1.0;
                let mut y = Vec::with_capacity(w.len());
                for (&wi, &ai) in w.iter().zip(&self.base.a) {
                    let ag = ai.powf(1.0 / gamma);
                    y.push(ag * wi.powf(-1.0 / gamma));
                    jac *= (ag / gamma) * wi.powf(-1.0 / gamma - 1.0);
                }
                Ok(self.base.lambda(&y)? * jac)
            }
            Regime::Light => {
                let mut jac = 1.0;
                let mut x = Vec::with_capacity(w.len());
                for (&wi, &ai) in w.iter().zip(&self.base.a) {
                    x.push(-(wi / ai).ln());
                    jac /= wi;
                }
                Ok(self.base.lambda(&x)? * jac)
            }
        }
    }
}

/// Transform a heavy-regime tail density into the copula tail density
/// (tail order 1) via y_i = a_i^{1/gamma} w_i^{-1/gamma}.
pub fn copula_tail_density_heavy(tdr: &TailDensityResult) -> Result<CopulaTailDensity> {
    if tdr.regime != Regime::Heavy {
        return Err(Error::WrongRegime { expected: "heavy" });
    }
    Ok(CopulaTailDensity {
        orientation: tdr.orientation,
        kappa: 1.0,
        slowly_varying: "1".into(),
        base: tdr.clone(),
    })
}

/// Transform a light-regime tail density into the copula tail density
/// (tail order 1 Sigma^{-1} 1') via y_i = -ln(w_i / a_i).
pub fn copula_tail_density_light(tdr: &TailDensityResult) -> Result<CopulaTailDensity> {
    if tdr.regime != Regime::Light {
        return Err(Error::WrongRegime { expected: "light" });
    }
    let slowly_varying = if tdr.v_description.contains("half-line") {
        "absorbed into V(t)".to_string()
    } else {
        "1".to_string()
    };
    Ok(CopulaTailDensity {
        orientation: tdr.orientation,
        kappa: tdr.kappa,
        slowly_varying,
        base: tdr.clone(),
    })
}

/// Lower copula tail density of a light-regime model.
pub fn lower_copula_tail_light(model: &SkewEllipticalModel) -> Result<CopulaTailDensity> {
    copula_tail_density_light(&light_lower_tail_density(model)?)
}

/// Tail density and copula tail density of the bivariate mixture family:
/// lambda(w) = (1-rho^2)^{-1/2} exp(-(w1+w2)/(1+|rho|)),
/// kappa = 2/(1+|rho|),
/// lambda_U(w; kappa) = (1-rho^2)^{-1/2} (w1 w2)^{-|rho|/(1+|rho|)}.
pub fn mixture_tail_density(
    m: &MixtureSkewNormal2,
) -> Result<(TailDensityResult, CopulaTailDensity)> {
    if m.eta == 0.0 {
        // symmetric normal path
        let sigma = DispersionMatrix::correlation2(m.rho)?;
        let model = SkewEllipticalModel::skew_normal(sigma, &[0.0, 0.0])?;
        let tdr = light_tail_density(&model)?;
        let ctd = copula_tail_density_light(&tdr)?;
        return Ok((tdr, ctd));
    }
    let kappa = 2.0 / (1.0 + m.rho.abs());
    let tdr = TailDensityResult {
        regime: Regime::Light,
        orientation: Orientation::Upper,
        kappa,
        a: vec![1.0, 1.0],
        gamma: None,
        k_const: None,
        v_description: format!(
            "V(t) = m(t)^{{2/kappa}} (2 g_2(t^2 kappa))^{{1/kappa}}, kappa = {kappa}"
        ),
        aux_m: Some(Arc::new(|t: f64| 1.0 / t)),
        kernel: LambdaKernel::MixtureLight { rho: m.rho },
        dim: 2,
    };
    let ctd = copula_tail_density_light(&tdr)?;
    Ok((tdr, ctd))
}

/// Write an evaluation grid as CSV with header `w_1,...,w_d,lambda`,
/// 17 significant digits.
pub fn export_lambda_grid<W: std::io::Write>(
    eval: impl Fn(&[f64]) -> Result<f64>,
    points: &[Vec<f64>],
    dim: usize,
    out: &mut W,
) -> Result<()> {
    let io_err = |e: std::io::Error| Error::ConfigError {
        detail: format!("write failed: {e}"),
    };
    let header: Vec<String> = (1..=dim).map(|i| format!("w_{i}")).collect();
    writeln!(out, "{},lambda", header.join(",")).map_err(io_err)?;
    for p in points {
        let v = eval(p)?;
        let coords: Vec<String> = p.iter().map(|x| format!("{x:.16e}")).collect();
        writeln!(out, "{},{v:.16e}", coords.join(",")).map_err(io_err)?;
    }
    Ok(())
}
