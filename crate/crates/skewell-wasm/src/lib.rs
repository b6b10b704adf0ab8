//! Browser bindings for the demo page: density heatmaps, copula tail
//! density fields and tail-dependence parameters. Everything is a pure
//! function of its arguments, so the page needs no state beyond sliders.

use skewell::tail::{
    copula_tail_density_heavy, copula_tail_density_light, heavy_lower_tail_density,
    heavy_tail_density, light_lower_tail_density, light_tail_density, mixture_tail_density,
    CopulaTailDensity, Orientation,
};
use skewell::taildep::{skew_t_taildep, SkewTParams};
use skewell::{parse_model, AnyModel, Error, Regime, TailKind};
use wasm_bindgen::prelude::*;

fn js_err(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

fn parse2(model: &str) -> Result<AnyModel, JsError> {
    let m = parse_model(model).map_err(js_err)?;
    if m.dim() != 2 {
        return Err(JsError::new("the demo works with bivariate models"));
    }
    Ok(m)
}

fn orient(text: &str) -> Result<Orientation, JsError> {
    match text {
        "upper" => Ok(Orientation::Upper),
        "lower" => Ok(Orientation::Lower),
        other => Err(JsError::new(&format!("orientation '{other}'"))),
    }
}

/// Joint density of a bivariate model on an n-by-n grid over [lo, hi]^2,
/// row-major with y_2 varying fastest.
#[wasm_bindgen]
pub fn pdf_grid(model: &str, lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, JsError> {
    let m = parse2(model)?;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let y1 = lo + (hi - lo) * i as f64 / (n - 1).max(1) as f64;
        for j in 0..n {
            let y2 = lo + (hi - lo) * j as f64 / (n - 1).max(1) as f64;
            out.push(m.pdf(&[y1, y2]).map_err(js_err)?);
        }
    }
    Ok(out)
}

fn copula_density(model: &AnyModel, orientation: Orientation) -> Result<CopulaTailDensity, Error> {
    match model {
        AnyModel::Mixture(m) => {
            if orientation == Orientation::Lower {
                return Err(Error::ConfigError {
                    detail: "the mixture family exposes the upper tail only".into(),
                });
            }
            Ok(mixture_tail_density(m)?.1)
        }
        AnyModel::Skew(m) => match m.generator().classify_tail()?.kind {
            TailKind::RegularlyVarying { .. } => {
                let tdr = match orientation {
                    Orientation::Upper => heavy_tail_density(m, None)?,
                    Orientation::Lower => heavy_lower_tail_density(m, None)?,
                };
                copula_tail_density_heavy(&tdr)
            }
            TailKind::GumbelQuadratic { .. } => {
                let tdr = match orientation {
                    Orientation::Upper => light_tail_density(m)?,
                    Orientation::Lower => light_lower_tail_density(m)?,
                };
                copula_tail_density_light(&tdr)
            }
        },
    }
}

/// Copula tail density lambda_U / lambda_L on an n-by-n grid over
/// (0, 1]^2 (cell midpoints), row-major with w_2 varying fastest.
#[wasm_bindgen]
pub fn copula_tail_grid(model: &str, orientation: &str, n: usize) -> Result<Vec<f64>, JsError> {
    let m = parse2(model)?;
    let ctd = copula_density(&m, orient(orientation)?).map_err(js_err)?;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let w1 = (i as f64 + 0.5) / n as f64;
        for j in 0..n {
            let w2 = (j as f64 + 0.5) / n as f64;
            out.push(ctd.eval(&[w1, w2]).map_err(js_err)?);
        }
    }
    Ok(out)
}

/// Tail order, tail-equivalence constants and regime of a model, as JSON:
/// `{"regime", "kappa", "gamma", "a", "theta", "theta_bar", "lambda_11"}`.
#[wasm_bindgen]
pub fn tail_summary(model: &str, orientation: &str) -> Result<String, JsError> {
    let m = parse2(model)?;
    let orientation = orient(orientation)?;
    let (tdr, theta, theta_bar) = match &m {
        AnyModel::Mixture(mm) => (mixture_tail_density(mm).map_err(js_err)?.0, vec![], vec![]),
        AnyModel::Skew(sm) => {
            let tdr = match sm.generator().classify_tail().map_err(js_err)?.kind {
                TailKind::RegularlyVarying { .. } => match orientation {
                    Orientation::Upper => heavy_tail_density(sm, None).map_err(js_err)?,
                    Orientation::Lower => heavy_lower_tail_density(sm, None).map_err(js_err)?,
                },
                TailKind::GumbelQuadratic { .. } => match orientation {
                    Orientation::Upper => light_tail_density(sm).map_err(js_err)?,
                    Orientation::Lower => light_lower_tail_density(sm).map_err(js_err)?,
                },
            };
            (tdr, sm.theta().to_vec(), sm.theta_bar().to_vec())
        }
    };
    let lambda_11 = tdr.lambda(&[1.0, 1.0]).map_err(js_err)?;
    let v = serde_json::json!({
        "regime": match tdr.regime { Regime::Heavy => "heavy", Regime::Light => "light" },
        "kappa": tdr.kappa,
        "gamma": tdr.gamma,
        "a": tdr.a,
        "theta": theta,
        "theta_bar": theta_bar,
        "lambda_11": lambda_11,
    });
    Ok(v.to_string())
}

/// Bivariate skew-t tail-dependence parameters by the polar integral, as
/// JSON: `{"b_upper", "b_lower", "a2", "kstar", "error"}`.
#[wasm_bindgen]
pub fn taildep_json(nu: f64, rho: f64, delta1: f64, delta2: f64) -> Result<String, JsError> {
    let p = SkewTParams::new(nu, rho, delta1, delta2).map_err(js_err)?;
    let td = skew_t_taildep(&p).map_err(js_err)?;
    let v = serde_json::json!({
        "b_upper": td.b_upper,
        "b_lower": td.b_lower,
        "a2": p.a2(),
        "kstar": p.k_star(),
        "error": td.error_estimate,
    });
    Ok(v.to_string())
}
