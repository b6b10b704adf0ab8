//! Skew-elliptical distributions and their tail behaviour.
//!
//! The crate builds the skew-elliptical law SE_d(mu, Sigma, g_{d+1}, delta)
//! from a density generator, evaluates exact densities and marginals,
//! samples exactly, and derives the analytic tail machinery: tail densities
//! lambda(w), copula tail densities lambda_U / lambda_L with their tail
//! orders, tail-equivalence constants, and bivariate tail-dependence
//! parameters. A validation suite re-derives every analytic limit
//! numerically at desk scale.

// quadrature node tables and frozen oracle values keep full-precision digits
#![allow(clippy::excessive_precision)]

pub mod error;
pub mod generators;
pub mod linalg;
pub mod model;
pub mod parse;
pub mod quad;
pub mod report;
pub mod special;
pub mod tail;
pub mod taildep;
pub mod validate;

pub use error::{Error, Result};
pub use generators::{DensityGenerator, GeneratorFamily, TailClass, TailKind};
pub use linalg::{build_dispersion, extended_dispersion, quad_form, DispersionMatrix};
pub use parse::{parse_model, AnyModel};
pub use model::{
    mixture_pdf, theta, MixtureSkewNormal2, ModelFamily, ModelSpec, SkewEllipticalModel,
};
pub use report::ValidationReport;
pub use tail::{
    copula_tail_density_heavy, copula_tail_density_light, heavy_lower_tail_density,
    heavy_tail_density, k1_constant, light_lower_tail_density, light_tail_density,
    lower_copula_tail_light, mixture_tail_density, CopulaTailDensity, Orientation, Regime,
    TailDensityResult,
};
pub use taildep::{
    cube_b, cube_taildep, empirical_taildep, skew_t_h, skew_t_taildep, SkewTParams, TailDepMethod,
    TailDepParams,
};
pub use validate::{
    default_suite, probe_copula_density_limit, probe_heavy_limit, probe_light_limit,
    probe_marginal_equivalence, run_suite, CheckConfig, SuiteConfig,
};
