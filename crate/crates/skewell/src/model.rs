//! The skew-elliptical law SE_d(mu, Sigma, g_{d+1}, delta): the distribution
//! of [X | X_0 > 0] where (X_0, X - mu) is centered (d+1)-dimensional
//! elliptical with block dispersion [[1, delta], [delta', Sigma]].
//!
//! Densities come in two routes everywhere: the defining one-dimensional
//! integral evaluated by adaptive quadrature, and closed forms for the
//! normal and Student-t families. Tests hold the two routes against each
//! other.

use crate::error::{Error, Result};
use crate::generators::{DensityGenerator, GeneratorFamily};
use crate::linalg::{extended_dispersion, DispersionMatrix};
use crate::quad;
use crate::special::{norm_cdf, norm_ln_cdf, t_cdf};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const LN_2: f64 = std::f64::consts::LN_2;

/// Family tag used for closed forms and the exact sampler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelFamily {
    Normal,
    StudentT { nu: f64 },
    Custom,
}

/// The skewness transform theta = delta Sigma^{-1} / (1 - delta Sigma^{-1} delta')^{1/2}.
pub fn theta(delta: &[f64], sigma: &DispersionMatrix) -> Result<Vec<f64>> {
    let q = sigma.inv_quad(delta)?;
    if q >= 1.0 {
        return Err(Error::SkewnessTooLarge { quad_form: q });
    }
    let v = sigma.inv_mul(delta)?;
    let scale = (1.0 - q).sqrt();
    Ok(v.iter().map(|x| x / scale).collect())
}

#[derive(Clone)]
pub struct SkewEllipticalModel {
    mu: DVector<f64>,
    sigma: DispersionMatrix,
    delta: DVector<f64>,
    generator: DensityGenerator,
    family: ModelFamily,
    /// marginal generators along the dimension chain
    gd: DensityGenerator,
    g2: DensityGenerator,
    g1: DensityGenerator,
    theta: DVector<f64>,
    theta_bar: DVector<f64>,
    delta_quad: f64,
    star: DispersionMatrix,
}

impl std::fmt::Debug for SkewEllipticalModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "SkewEllipticalModel(d={}, family={:?}, delta={:?})",
            self.dim(),
            self.family,
            self.delta.as_slice()
        )
    }
}

impl SkewEllipticalModel {
    pub fn new(
        mu: &[f64],
        sigma: DispersionMatrix,
        delta: &[f64],
        generator: DensityGenerator,
    ) -> Result<Self> {
        let d = sigma.dim();
        if mu.len() != d || delta.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: if mu.len() != d { mu.len() } else { delta.len() },
            });
        }
        if generator.dim() != d + 1 {
            return Err(Error::DimensionMismatch {
                expected: d + 1,
                got: generator.dim(),
            });
        }
        for (i, &di) in delta.iter().enumerate() {
            if di * di >= sigma.entry(i, i) {
                return Err(Error::IncompatibleSkewness {
                    detail: format!("|delta_{i}| = {} must be below sigma_ii^1/2", di.abs()),
                });
            }
        }
        // equivalent to positive definiteness of the (d+1)-dim block matrix
        let star = extended_dispersion(&sigma, delta)?;
        let delta_quad = sigma.inv_quad(delta)?;

        if matches!(
            generator.family(),
            GeneratorFamily::CustomRv { .. } | GeneratorFamily::CustomGumbel { .. }
        ) {
            let residual = generator.normalization_residual()?;
            if residual > 1e-6 {
                return Err(Error::ClassMismatch {
                    detail: format!("generator normalization residual {residual:.3e} > 1e-6"),
                });
            }
        }

        let family = match generator.family() {
            GeneratorFamily::Normal => ModelFamily::Normal,
            GeneratorFamily::StudentT { nu } => ModelFamily::StudentT { nu: *nu },
            _ => ModelFamily::Custom,
        };

        let mut gd = generator.clone();
        while gd.dim() > d {
            gd = gd.marginalize()?;
        }
        let mut g2 = generator.clone();
        while g2.dim() > 2 {
            g2 = g2.marginalize()?;
        }
        let g1 = g2.marginalize()?;

        let theta_v = theta(delta, &sigma)?;
        let theta_bar = DVector::from_iterator(
            d,
            delta.iter().enumerate().map(|(i, &di)| {
                let s = sigma.entry(i, i);
                (di / s) / (1.0 - di * di / s).sqrt()
            }),
        );

        Ok(Self {
            mu: DVector::from_column_slice(mu),
            sigma,
            delta: DVector::from_column_slice(delta),
            generator,
            family,
            gd,
            g2,
            theta: DVector::from_vec(theta_v),
            theta_bar,
            delta_quad,
            star,
            g1,
        })
    }

    /// Centered skew-normal model with a correlation-normalized Sigma.
    pub fn skew_normal(sigma: DispersionMatrix, delta: &[f64]) -> Result<Self> {
        let d = sigma.dim();
        Self::new(&vec![0.0; d], sigma, delta, DensityGenerator::normal(d + 1))
    }

    /// Centered skew-t model.
    pub fn skew_t(nu: f64, sigma: DispersionMatrix, delta: &[f64]) -> Result<Self> {
        let d = sigma.dim();
        let g = DensityGenerator::student_t(d + 1, nu)?;
        Self::new(&vec![0.0; d], sigma, delta, g)
    }

    pub fn with_location(mut self, mu: &[f64]) -> Result<Self> {
        if mu.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: mu.len(),
            });
        }
        self.mu = DVector::from_column_slice(mu);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.sigma.dim()
    }

    pub fn mu(&self) -> &[f64] {
        self.mu.as_slice()
    }

    pub fn sigma(&self) -> &DispersionMatrix {
        &self.sigma
    }

    pub fn delta(&self) -> &[f64] {
        self.delta.as_slice()
    }

    pub fn generator(&self) -> &DensityGenerator {
        &self.generator
    }

    pub fn marginal_generator(&self) -> &DensityGenerator {
        &self.gd
    }

    pub fn bivariate_generator(&self) -> &DensityGenerator {
        &self.g2
    }

    pub fn family(&self) -> ModelFamily {
        self.family
    }

    pub fn theta(&self) -> &[f64] {
        self.theta.as_slice()
    }

    pub fn theta_bar(&self) -> &[f64] {
        self.theta_bar.as_slice()
    }

    pub fn delta_quad(&self) -> f64 {
        self.delta_quad
    }

    /// Model with delta (hence theta) negated; upper-tail results of the
    /// reflected model are the lower-tail results of the original.
    pub fn reflected(&self) -> Self {
        let neg: Vec<f64> = self.delta.iter().map(|d| -d).collect();
        Self::new(
            self.mu.as_slice(),
            self.sigma.clone(),
            &neg,
            self.generator.clone(),
        )
        .expect("reflection preserves validity")
    }

    fn centered(&self, y: &[f64]) -> Result<DVector<f64>> {
        if y.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: y.len(),
            });
        }
        Ok(DVector::from_column_slice(y) - &self.mu)
    }

    /// Density by the defining one-dimensional integral, adaptive
    /// quadrature, any generator family.
    pub fn pdf_quadrature(&self, y: &[f64]) -> Result<f64> {
        let c = self.centered(y)?;
        let q = self.sigma.inv_quad(c.as_slice())?;
        let upper = self.theta.dot(&c);
        let f = |r: f64| self.generator.eval(r * r + q);
        // integrand peaks at r = 0; split there when the upper limit allows
        let integral = if upper > 0.0 {
            quad::integral_below(&f, 0.0, 1e-300, 1e-10)?.value
                + quad::adaptive(&f, 0.0, upper, 1e-300, 1e-10)?.value
        } else {
            quad::integral_below(&f, upper, 1e-300, 1e-10)?.value
        };
        Ok(2.0 * (-0.5 * self.sigma.ln_det()).exp() * integral)
    }

    /// Density; closed form for the normal and Student-t families,
    /// quadrature otherwise.
    pub fn pdf(&self, y: &[f64]) -> Result<f64> {
        match self.family {
            ModelFamily::Custom => self.pdf_quadrature(y),
            _ => Ok(self.log_pdf(y)?.exp()),
        }
    }

    /// log density, stable far into the tails for the closed-form families.
    pub fn log_pdf(&self, y: &[f64]) -> Result<f64> {
        let c = self.centered(y)?;
        let q = self.sigma.inv_quad(c.as_slice())?;
        let s = self.theta.dot(&c);
        let base = LN_2 - 0.5 * self.sigma.ln_det() + self.gd.ln_eval(q);
        match self.family {
            ModelFamily::Normal => Ok(base + norm_ln_cdf(s)),
            ModelFamily::StudentT { nu } => {
                let d = self.dim() as f64;
                let arg = s * ((nu + d) / (nu + q)).sqrt();
                Ok(base + t_cdf(arg, nu + d).ln())
            }
            ModelFamily::Custom => {
                let v = self.pdf_quadrature(y)?;
                Ok(v.ln())
            }
        }
    }

    fn marginal_scale(&self, i: usize) -> f64 {
        self.sigma.entry(i, i).sqrt()
    }

    /// Marginal density of coordinate `i` (0-based) at `t`, quadrature route.
    pub fn marginal_pdf_quadrature(&self, i: usize, t: f64) -> Result<f64> {
        self.check_margin(i)?;
        let s = self.marginal_scale(i);
        let x = (t - self.mu[i]) / s;
        let tb = self.theta_bar[i];
        let f = |r: f64| self.g2.eval(r * r + x * x);
        let upper = tb * x;
        let integral = if upper > 0.0 {
            quad::integral_below(&f, 0.0, 1e-300, 1e-10)?.value
                + quad::adaptive(&f, 0.0, upper, 1e-300, 1e-10)?.value
        } else {
            quad::integral_below(&f, upper, 1e-300, 1e-10)?.value
        };
        Ok(2.0 * integral / s)
    }

    /// Marginal density; closed form where the family has one.
    pub fn marginal_pdf(&self, i: usize, t: f64) -> Result<f64> {
        match self.family {
            ModelFamily::Custom => self.marginal_pdf_quadrature(i, t),
            _ => Ok(self.marginal_log_pdf(i, t)?.exp()),
        }
    }

    pub fn marginal_log_pdf(&self, i: usize, t: f64) -> Result<f64> {
        self.check_margin(i)?;
        let s = self.marginal_scale(i);
        let x = (t - self.mu[i]) / s;
        let tb = self.theta_bar[i];
        let base = LN_2 + self.g1.ln_eval(x * x) - s.ln();
        match self.family {
            ModelFamily::Normal => Ok(base + norm_ln_cdf(tb * x)),
            ModelFamily::StudentT { nu } => {
                let arg = tb * x * ((nu + 1.0) / (nu + x * x)).sqrt();
                Ok(base + t_cdf(arg, nu + 1.0).ln())
            }
            ModelFamily::Custom => Ok(self.marginal_pdf_quadrature(i, t)?.ln()),
        }
    }

    /// Marginal CDF by quadrature of the marginal density.
    pub fn marginal_cdf(&self, i: usize, t: f64) -> Result<f64> {
        self.check_margin(i)?;
        let v = quad::integral_below(
            &|x: f64| self.marginal_pdf(i, x).unwrap_or(f64::NAN),
            t,
            1e-13,
            1e-10,
        )?;
        Ok(v.value.clamp(0.0, 1.0))
    }

    /// Marginal quantile by bisection on the quadrature CDF, to 1e-10 in
    /// probability.
    pub fn marginal_quantile(&self, i: usize, p: f64) -> Result<f64> {
        if p.is_nan() || p <= 0.0 || p >= 1.0 {
            return Err(Error::QuantileFailure {
                detail: format!("p = {p} outside (0, 1)"),
            });
        }
        self.check_margin(i)?;
        let mut lo = self.mu[i] - 1.0;
        let mut hi = self.mu[i] + 1.0;
        let mut grow = 1.0;
        for _ in 0..80 {
            if self.marginal_cdf(i, lo)? < p {
                break;
            }
            grow *= 2.0;
            lo -= grow;
        }
        let mut grow = 1.0;
        for _ in 0..80 {
            if self.marginal_cdf(i, hi)? > p {
                break;
            }
            grow *= 2.0;
            hi += grow;
        }
        if !(self.marginal_cdf(i, lo)? < p && self.marginal_cdf(i, hi)? > p) {
            return Err(Error::QuantileFailure {
                detail: format!("failed to bracket p = {p}"),
            });
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let f = self.marginal_cdf(i, mid)?;
            if (f - p).abs() <= 1e-10 {
                return Ok(mid);
            }
            if f < p {
                lo = mid;
            } else {
                hi = mid;
            }
            if (hi - lo).abs() < 1e-13 * (1.0 + mid.abs()) {
                return Ok(mid);
            }
        }
        Ok(0.5 * (lo + hi))
    }

    fn check_margin(&self, i: usize) -> Result<()> {
        if i >= self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: i,
            });
        }
        Ok(())
    }

    /// Exact sampler: draw (X_0, X) from the (d+1)-dimensional elliptical
    /// law and reflect X through mu when X_0 <= 0. Since (-X_0, -(X - mu))
    /// has the same centered law, every draw is accepted.
    pub fn sample(&self, n: usize, seed: u64) -> Result<DMatrix<f64>> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        self.sample_with(n, &mut rng, false)
    }

    /// Naive rejection sampler (discard draws with X_0 <= 0); kept as a
    /// distribution oracle for the sign-flip sampler.
    pub fn sample_naive_rejection(&self, n: usize, seed: u64) -> Result<DMatrix<f64>> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        self.sample_with(n, &mut rng, true)
    }

    fn sample_with(&self, n: usize, rng: &mut ChaCha12Rng, rejection: bool) -> Result<DMatrix<f64>> {
        let d = self.dim();
        let chi = match self.family {
            ModelFamily::Normal => None,
            ModelFamily::StudentT { nu } => Some(ChiSquared::new(nu).map_err(|e| {
                Error::ConfigError {
                    detail: format!("chi-squared sampler: {e}"),
                }
            })?),
            ModelFamily::Custom => return Err(Error::UnsupportedGenerator),
        };
        let l = self.star.cholesky_lower();
        let mut out = DMatrix::zeros(n, d);
        let mut z = DVector::zeros(d + 1);
        let mut row = 0;
        while row < n {
            for k in 0..=d {
                z[k] = StandardNormal.sample(rng);
            }
            let mut u = l * &z;
            if let Some(chi) = &chi {
                let nu = match self.family {
                    ModelFamily::StudentT { nu } => nu,
                    _ => unreachable!(),
                };
                let c: f64 = chi.sample(rng);
                u *= (nu / c).sqrt();
            }
            let x0 = u[0];
            if rejection && x0 <= 0.0 {
                continue;
            }
            let flip = if x0 > 0.0 { 1.0 } else { -1.0 };
            for j in 0..d {
                out[(row, j)] = self.mu[j] + flip * u[j + 1];
            }
            row += 1;
        }
        Ok(out)
    }

    pub fn to_spec(&self) -> Result<ModelSpec> {
        let generator = match self.family {
            ModelFamily::Normal => GeneratorSpec::Normal,
            ModelFamily::StudentT { nu } => GeneratorSpec::StudentT { nu },
            ModelFamily::Custom => {
                return Err(Error::ConfigError {
                    detail: "custom generators have no serialized form".into(),
                })
            }
        };
        let d = self.dim();
        let mut sigma = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                sigma.push(self.sigma.entry(i, j));
            }
        }
        Ok(ModelSpec {
            d,
            mu: self.mu.as_slice().to_vec(),
            sigma,
            delta: self.delta.as_slice().to_vec(),
            generator,
            family_tag: match self.family {
                ModelFamily::Normal => "skew-normal".into(),
                ModelFamily::StudentT { .. } => "skew-t".into(),
                ModelFamily::Custom => unreachable!(),
            },
        })
    }
}

/// Serialized model: JSON with row-major sigma.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelSpec {
    pub d: usize,
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
    pub delta: Vec<f64>,
    pub generator: GeneratorSpec,
    pub family_tag: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Normal,
    StudentT { nu: f64 },
}

impl ModelSpec {
    pub fn build(&self) -> Result<SkewEllipticalModel> {
        let expected_tag = match self.generator {
            GeneratorSpec::Normal => "skew-normal",
            GeneratorSpec::StudentT { .. } => "skew-t",
        };
        if self.family_tag != expected_tag {
            return Err(Error::ConfigError {
                detail: format!(
                    "family_tag '{}' does not match generator family '{expected_tag}'",
                    self.family_tag
                ),
            });
        }
        let sigma = DispersionMatrix::new(&self.sigma, self.d, false)?;
        let generator = match self.generator {
            GeneratorSpec::Normal => DensityGenerator::normal(self.d + 1),
            GeneratorSpec::StudentT { nu } => DensityGenerator::student_t(self.d + 1, nu)?,
        };
        SkewEllipticalModel::new(&self.mu, sigma, &self.delta, generator)
    }
}

/// The bivariate mixture-of-skew-normals family with common marginal
/// skewness eta >= 0 and correlation rho.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MixtureSkewNormal2 {
    pub rho: f64,
    pub eta: f64,
}

impl MixtureSkewNormal2 {
    pub fn new(rho: f64, eta: f64) -> Result<Self> {
        if rho.is_nan() || rho.abs() >= 1.0 {
            return Err(Error::ConfigError {
                detail: format!("|rho| must be below 1, got {rho}"),
            });
        }
        if !eta.is_finite() || eta < 0.0 {
            return Err(Error::ConfigError {
                detail: format!("eta must be nonnegative, got {eta}"),
            });
        }
        Ok(Self { rho, eta })
    }

    fn binormal_pdf(&self, y1: f64, y2: f64) -> f64 {
        let det = 1.0 - self.rho * self.rho;
        let q = (y1 * y1 - 2.0 * self.rho * y1 * y2 + y2 * y2) / det;
        (-0.5 * q).exp() / (2.0 * PI * det.sqrt())
    }

    /// Joint density
    /// `2 φ₂(y₁,y₂;ρ) Φ(η min{y₁,y₂}) + 2 φ₂(y₁,−y₂;ρ) (Φ(ηy₁)+Φ(ηy₂)−1) 1{ηy₁+ηy₂>0}`.
    pub fn pdf(&self, y1: f64, y2: f64) -> f64 {
        let eta = self.eta;
        let t1 = 2.0 * self.binormal_pdf(y1, y2) * norm_cdf(eta * y1.min(y2));
        // strict inequality in the indicator, as defined
        let t2 = if eta * y1 + eta * y2 > 0.0 {
            2.0 * self.binormal_pdf(y1, -y2) * (norm_cdf(eta * y1) + norm_cdf(eta * y2) - 1.0)
        } else {
            0.0
        };
        t1 + t2
    }

    /// Common marginal density 2 φ(y) Φ(η y).
    pub fn marginal_pdf(&self, y: f64) -> f64 {
        2.0 * crate::special::norm_pdf(y) * norm_cdf(self.eta * y)
    }

    pub fn marginal_cdf(&self, t: f64) -> Result<f64> {
        let v = quad::integral_below(&|x: f64| self.marginal_pdf(x), t, 1e-13, 1e-10)?;
        Ok(v.value.clamp(0.0, 1.0))
    }

    pub fn marginal_quantile(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p <= 0.0 || p >= 1.0 {
            return Err(Error::QuantileFailure {
                detail: format!("p = {p} outside (0, 1)"),
            });
        }
        let (mut lo, mut hi) = (-40.0, 40.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let f = self.marginal_cdf(mid)?;
            if (f - p).abs() <= 1e-10 {
                return Ok(mid);
            }
            if f < p {
                lo = mid;
            } else {
                hi = mid;
            }
            if (hi - lo).abs() < 1e-13 * (1.0 + mid.abs()) {
                return Ok(mid);
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Spec-level pdf entry point for the mixture family.
pub fn mixture_pdf(m: &MixtureSkewNormal2, y1: f64, y2: f64) -> f64 {
    m.pdf(y1, y2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::norm_pdf;
    use rand::Rng;

    fn skew_t_model(nu: f64, rho: f64, d1: f64, d2: f64) -> SkewEllipticalModel {
        SkewEllipticalModel::skew_t(nu, DispersionMatrix::correlation2(rho).unwrap(), &[d1, d2])
            .unwrap()
    }

    #[test]
    fn theta_examples() {
        let eye = DispersionMatrix::identity(2);
        assert_eq!(theta(&[0.0, 0.0], &eye).unwrap(), vec![0.0, 0.0]);
        let th = theta(&[0.5, 0.5], &eye).unwrap();
        let expect = 0.5 / 0.5f64.sqrt();
        assert!((th[0] - expect).abs() < 1e-15 && (th[1] - expect).abs() < 1e-15);
        assert!(matches!(
            theta(&[0.8, 0.8], &eye),
            Err(Error::SkewnessTooLarge { .. })
        ));
    }

    #[test]
    fn theta_bivariate_closed_form() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..200 {
            let rho: f64 = rng.random_range(-0.85..0.85);
            let d1: f64 = rng.random_range(-0.6..0.6);
            let d2: f64 = rng.random_range(-0.6..0.6);
            let sigma = DispersionMatrix::correlation2(rho).unwrap();
            if sigma.inv_quad(&[d1, d2]).unwrap() >= 1.0 {
                continue;
            }
            let th = theta(&[d1, d2], &sigma).unwrap();
            let disc = (1.0 - rho * rho) * (1.0 - rho * rho - d1 * d1 - d2 * d2 + 2.0 * d1 * d2 * rho);
            let dd = disc.sqrt();
            assert!((th[0] - (d1 - rho * d2) / dd).abs() < 1e-12, "theta1");
            assert!((th[1] - (d2 - rho * d1) / dd).abs() < 1e-12, "theta2");
        }
    }

    #[test]
    fn univariate_skew_normal_at_zero() {
        let m = SkewEllipticalModel::skew_normal(DispersionMatrix::identity(1), &[0.7]).unwrap();
        // 2 phi(0) Phi(0) = phi(0)
        assert!((m.pdf(&[0.0]).unwrap() - norm_pdf(0.0)).abs() < 1e-14);
    }

    #[test]
    fn zero_skewness_reduces_to_elliptical() {
        let sigma = DispersionMatrix::correlation2(0.4).unwrap();
        let m = SkewEllipticalModel::skew_t(3.0, sigma.clone(), &[0.0, 0.0]).unwrap();
        let inv_sqrt_det = (-0.5 * sigma.ln_det()).exp();
        for &y in &[[0.0, 0.0], [1.0, -0.5], [2.5, 2.0], [-3.0, 1.0]] {
            let q = sigma.inv_quad(&y).unwrap();
            let expect = inv_sqrt_det * m.marginal_generator().eval(q);
            assert!((m.pdf(&y).unwrap() - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let m = skew_t_model(4.0, 0.5, 0.3, 0.3);
        for &y in &[[1.0, 1.0], [0.0, 0.0], [-1.0, 2.0], [3.0, -0.5]] {
            let a = m.pdf(&y).unwrap();
            let b = m.pdf_quadrature(&y).unwrap();
            assert!((a - b).abs() <= 1e-8 * a.abs(), "y={y:?}: {a} vs {b}");
        }
        let n = SkewEllipticalModel::skew_normal(
            DispersionMatrix::correlation2(-0.3).unwrap(),
            &[0.5, -0.2],
        )
        .unwrap();
        for &y in &[[0.5, 0.5], [-2.0, 1.0]] {
            let a = n.pdf(&y).unwrap();
            let b = n.pdf_quadrature(&y).unwrap();
            assert!((a - b).abs() <= 1e-8 * a.abs());
        }
    }

    #[test]
    fn reflection_identity() {
        let m = skew_t_model(4.0, 0.5, 0.3, 0.5);
        let r = m.reflected();
        for &y in &[[1.0, 2.0], [-0.7, 0.1], [2.0, -2.0]] {
            let a = m.pdf(&y).unwrap();
            let b = r.pdf(&[-y[0], -y[1]]).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs());
        }
    }

    #[test]
    fn marginal_reduces_to_symmetric() {
        let m = SkewEllipticalModel::skew_normal(DispersionMatrix::identity(2), &[0.0, 0.6]).unwrap();
        for &t in &[-2.0, 0.0, 1.5] {
            assert!((m.marginal_pdf(0, t).unwrap() - norm_pdf(t)).abs() < 1e-12);
        }
        // skewed margin matches its quadrature route
        for &t in &[-1.0, 0.5, 2.5] {
            let a = m.marginal_pdf(1, t).unwrap();
            let b = m.marginal_pdf_quadrature(1, t).unwrap();
            assert!((a - b).abs() <= 1e-8 * a.abs());
        }
    }

    #[test]
    fn skew_normal_marginal_tail_doubles() {
        // tb > 0: f(t) ~ 2 phi(t) far out; tb = 0 stays phi(t)
        let m = SkewEllipticalModel::skew_normal(DispersionMatrix::identity(2), &[0.6, 0.0])
            .unwrap();
        let t = 12.0;
        let r0 = (m.marginal_log_pdf(0, t).unwrap() - norm_pdf(t).ln()).exp();
        assert!((r0 - 2.0).abs() < 1e-10, "skewed margin ratio {r0}");
        let r1 = (m.marginal_log_pdf(1, t).unwrap() - norm_pdf(t).ln()).exp();
        assert!((r1 - 1.0).abs() < 1e-12, "symmetric margin ratio {r1}");
    }

    #[test]
    fn skew_t_marginal_tail_estimate() {
        // f_i(t) ~ 2 [Γ((ν+1)/2) ν^{(ν-2)/2} / (Γ(ν/2) √π)] ν t^{-(ν+1)}
        //          T_{ν+1}(tb_i √(ν+1)); ratio -> 1 within 2% at t = 1e3
        use crate::special::t_cdf;
        use statrs::function::gamma::ln_gamma;
        let nu = 4.0;
        let m = skew_t_model(nu, 0.5, 0.3, 0.6);
        let t: f64 = 1e3;
        for i in 0..2 {
            let tb = m.theta_bar()[i];
            let c = 2.0
                * (ln_gamma((nu + 1.0) / 2.0) - ln_gamma(nu / 2.0)
                    + 0.5 * (nu - 2.0) * nu.ln()
                    - 0.5 * PI.ln())
                .exp()
                * nu;
            let estimate = c * t.powf(-(nu + 1.0)) * t_cdf(tb * (nu + 1.0).sqrt(), nu + 1.0);
            let ratio = m.marginal_pdf(i, t).unwrap() / estimate;
            assert!((ratio - 1.0).abs() < 0.02, "i={i}: ratio {ratio}");
        }
    }

    #[test]
    fn marginal_cdf_and_quantile_invert() {
        let m = skew_t_model(3.0, 0.2, 0.4, 0.1);
        for &p in &[0.05, 0.5, 0.95] {
            let q = m.marginal_quantile(1, p).unwrap();
            let back = m.marginal_cdf(1, q).unwrap();
            assert!((back - p).abs() < 1e-9, "p={p}: got {back}");
        }
    }

    #[test]
    fn sampler_matches_first_moment() {
        let m = SkewEllipticalModel::skew_normal(DispersionMatrix::identity(1), &[0.5]).unwrap();
        let n = 200_000;
        let s = m.sample(n, 42).unwrap();
        let mean = s.column(0).sum() / n as f64;
        let expect = (2.0 / PI).sqrt() * 0.5;
        let sd = (1.0 - expect * expect).sqrt() / (n as f64).sqrt();
        assert!(
            (mean - expect).abs() < 4.0 * sd,
            "mean {mean} vs {expect} (sd {sd})"
        );
        // determinism under a fixed seed
        let s2 = m.sample(16, 42).unwrap();
        for j in 0..16 {
            assert_eq!(s[(j, 0)], s2[(j, 0)]);
        }
    }

    #[test]
    fn misnormalized_custom_generator_rejected_at_binding() {
        // scaling the eval breaks the normalization integral; the model
        // constructor is where that gate lives
        let base = DensityGenerator::student_t(2, 3.0).unwrap();
        let eval: crate::generators::ScalarFn =
            std::sync::Arc::new(move |s| 1.7 * base.eval(s));
        let g = DensityGenerator::custom_rv(2, 2.5, eval, "scaled").unwrap();
        let err = SkewEllipticalModel::new(&[0.0], DispersionMatrix::identity(1), &[0.3], g);
        assert!(matches!(err, Err(Error::ClassMismatch { .. })));
    }

    #[test]
    fn custom_generator_has_no_sampler() {
        let base = DensityGenerator::student_t(2, 3.0).unwrap();
        let eval: crate::generators::ScalarFn = std::sync::Arc::new(move |s| base.eval(s));
        let g = DensityGenerator::custom_rv(2, 2.5, eval, "wrapped").unwrap();
        let m = SkewEllipticalModel::new(&[0.0], DispersionMatrix::identity(1), &[0.3], g).unwrap();
        assert!(matches!(m.sample(10, 1), Err(Error::UnsupportedGenerator)));
    }

    #[test]
    fn spec_round_trip() {
        let m = skew_t_model(4.0, 0.5, 0.25, -0.125);
        let spec = m.to_spec().unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        let back: ModelSpec = serde_json::from_str(&json).unwrap();
        let rebuilt = back.build().unwrap();
        assert_eq!(rebuilt.delta(), m.delta());
        assert_eq!(rebuilt.sigma().entry(0, 1), 0.5);
        let y = [0.3, 0.9];
        assert_eq!(rebuilt.pdf(&y).unwrap(), m.pdf(&y).unwrap());
    }

    #[test]
    fn mixture_pdf_cases() {
        let sym = MixtureSkewNormal2::new(0.4, 0.0).unwrap();
        for &(y1, y2) in &[(0.0, 0.0), (1.0, -1.0), (2.0, 0.5)] {
            assert!((sym.pdf(y1, y2) - sym.binormal_pdf(y1, y2)).abs() < 1e-14);
        }
        let m = MixtureSkewNormal2::new(0.4, 1.5).unwrap();
        // at the origin the indicator is strictly off and Phi(0) = 1/2
        assert!((m.pdf(0.0, 0.0) - m.binormal_pdf(0.0, 0.0)).abs() < 1e-14);
        // integrates to one
        let total = quad::adaptive_2d(&|a, b| m.pdf(a, b), -9.0, 9.0, -9.0, 9.0, 1e-9, 1e-9)
            .unwrap()
            .value;
        assert!((total - 1.0).abs() < 1e-6, "total mass {total}");
    }
}
