//! Text forms of models: family shorthands like
//! `skew-t(nu=4,rho=0.5,delta=[0.3,0.3])` and JSON model specs.

use crate::error::{Error, Result};
use crate::linalg::DispersionMatrix;
use crate::model::{MixtureSkewNormal2, ModelSpec, SkewEllipticalModel};

/// A parsed model: the skew-elliptical law or the bivariate mixture family.
#[allow(clippy::large_enum_variant)] // constructed once per command
pub enum AnyModel {
    Skew(SkewEllipticalModel),
    Mixture(MixtureSkewNormal2),
}

impl AnyModel {
    pub fn dim(&self) -> usize {
        match self {
            AnyModel::Skew(m) => m.dim(),
            AnyModel::Mixture(_) => 2,
        }
    }

    pub fn pdf(&self, y: &[f64]) -> Result<f64> {
        match self {
            AnyModel::Skew(m) => m.pdf(y),
            AnyModel::Mixture(m) => Ok(m.pdf(y[0], y[1])),
        }
    }
}

fn config_err(detail: impl Into<String>) -> Error {
    Error::ConfigError {
        detail: detail.into(),
    }
}

fn parse_kv_args(body: &str) -> Result<Vec<(String, String)>> {
    // split on commas not inside brackets
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in body.chars() {
        match ch {
            '[' => {
                depth += 1;
                cur.push(ch);
            }
            ']' => {
                depth = depth.saturating_sub(1);
                cur.push(ch);
            }
            ',' if depth == 0 => {
                parts.push(std::mem::take(&mut cur));
            }
            _ => cur.push(ch),
        }
    }
    if !cur.is_empty() {
        parts.push(cur);
    }
    parts
        .into_iter()
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| config_err(format!("expected key=value, got '{p}'")))?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

pub(crate) fn parse_f64(v: &str, what: &str) -> Result<f64> {
    v.parse::<f64>()
        .map_err(|_| config_err(format!("invalid {what}: '{v}'")))
}

fn parse_vec(v: &str, what: &str) -> Result<Vec<f64>> {
    let inner = v
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| config_err(format!("{what} must look like [a,b,...], got '{v}'")))?;
    inner
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_f64(s.trim(), what))
        .collect()
}

/// Parse `skew-normal(rho=...,delta=[...])`,
/// `skew-t(nu=...,rho=...,delta=[...])`, `mixture(rho=...,eta=...)`, or a
/// JSON model spec (anything starting with `{`).
pub fn parse_model(text: &str) -> Result<AnyModel> {
    let text = text.trim();
    if text.starts_with('{') {
        let spec: ModelSpec = serde_json::from_str(text)
            .map_err(|e| config_err(format!("invalid model JSON: {e}")))?;
        return Ok(AnyModel::Skew(spec.build()?));
    }
    let open = text
        .find('(')
        .ok_or_else(|| config_err(format!("unrecognized model '{text}'")))?;
    if !text.ends_with(')') {
        return Err(config_err(format!("unbalanced parentheses in '{text}'")));
    }
    let family = &text[..open];
    let kv = parse_kv_args(&text[open + 1..text.len() - 1])?;
    let get = |key: &str| kv.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());

    match family {
        "skew-normal" | "skew-t" => {
            let delta = parse_vec(
                get("delta").ok_or_else(|| config_err("missing delta=[...]"))?,
                "delta",
            )?;
            let d = delta.len();
            if d == 0 {
                return Err(config_err("delta must be non-empty"));
            }
            let sigma = match get("rho") {
                Some(r) => {
                    let rho = parse_f64(r, "rho")?;
                    DispersionMatrix::equicorrelation(d, rho)?
                }
                None => DispersionMatrix::identity(d),
            };
            let model = if family == "skew-normal" {
                SkewEllipticalModel::skew_normal(sigma, &delta)?
            } else {
                let nu = parse_f64(
                    get("nu").ok_or_else(|| config_err("skew-t requires nu=..."))?,
                    "nu",
                )?;
                SkewEllipticalModel::skew_t(nu, sigma, &delta)?
            };
            let model = match get("mu") {
                Some(m) => model.with_location(&parse_vec(m, "mu")?)?,
                None => model,
            };
            Ok(AnyModel::Skew(model))
        }
        "mixture" => {
            let rho = parse_f64(
                get("rho").ok_or_else(|| config_err("mixture requires rho=..."))?,
                "rho",
            )?;
            let eta = parse_f64(
                get("eta").ok_or_else(|| config_err("mixture requires eta=..."))?,
                "eta",
            )?;
            Ok(AnyModel::Mixture(MixtureSkewNormal2::new(rho, eta)?))
        }
        other => Err(config_err(format!("unknown family '{other}'"))),
    }
}
