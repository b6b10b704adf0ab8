//! Density generators, their tail classification and the marginalization
//! recursion g_{k+1} -> g_k.
//!
//! A generator g_k defines a k-dimensional elliptical density
//! `|Sigma|^{-1/2} g_k(q)` through the quadratic form q and is normalized by
//! `∫_0^∞ r^{k/2-1} g_k(r) dr = Γ(k/2) / π^{k/2}`.

use crate::error::{Error, Result};
use crate::linalg::DispersionMatrix;
use crate::quad;
use crate::report::ValidationReport;
use crate::special::ls_slope;
use statrs::function::gamma::ln_gamma;
use std::f64::consts::PI;
use std::sync::Arc;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Student-t generator constant k(nu, m) = Γ((ν+m)/2) ν^{ν/2} / (Γ(ν/2) π^{m/2}).
pub fn student_t_constant(nu: f64, dim: usize) -> f64 {
    let m = dim as f64;
    (ln_gamma((nu + m) / 2.0) - ln_gamma(nu / 2.0) + 0.5 * nu * nu.ln() - 0.5 * m * PI.ln()).exp()
}

#[derive(Clone)]
pub enum GeneratorFamily {
    Normal,
    StudentT { nu: f64 },
    /// Regularly varying generator with declared tail index `alpha`.
    CustomRv { alpha: f64, eval: ScalarFn, label: String },
    /// Gumbel-quadratic generator with declared auxiliary function `m`.
    CustomGumbel { m: ScalarFn, eval: ScalarFn, label: String },
}

impl std::fmt::Debug for GeneratorFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GeneratorFamily::Normal => write!(f, "Normal"),
            GeneratorFamily::StudentT { nu } => write!(f, "StudentT(nu={nu})"),
            GeneratorFamily::CustomRv { alpha, label, .. } => {
                write!(f, "CustomRv(alpha={alpha}, {label})")
            }
            GeneratorFamily::CustomGumbel { label, .. } => write!(f, "CustomGumbel({label})"),
        }
    }
}

/// Tail classification of a generator.
#[derive(Clone)]
pub enum TailKind {
    RegularlyVarying { alpha: f64 },
    GumbelQuadratic { m: ScalarFn },
}

#[derive(Clone)]
pub struct TailClass {
    pub kind: TailKind,
    /// Description of the slowly varying factor; constant 1 throughout.
    pub slowly_varying: String,
}

/// A density generator g_k.
#[derive(Clone)]
pub struct DensityGenerator {
    dim: usize,
    family: GeneratorFamily,
}

impl std::fmt::Debug for DensityGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DensityGenerator(dim={}, {:?})", self.dim, self.family)
    }
}

fn spot_check_pure(eval: &ScalarFn) -> Result<()> {
    for &s in &[0.3, 1.7, 42.0] {
        let a = eval(s);
        let b = eval(s);
        if a.to_bits() != b.to_bits() {
            return Err(Error::ClassMismatch {
                detail: format!("generator eval is not pure at s={s}"),
            });
        }
        if !a.is_finite() || a < 0.0 {
            return Err(Error::DomainError {
                detail: format!("generator eval non-finite or negative at s={s}: {a}"),
            });
        }
    }
    Ok(())
}

fn spot_check_eventually_nonincreasing(eval: &dyn Fn(f64) -> f64) -> Result<()> {
    // log grid; require non-increasing from some grid point onward
    let grid: Vec<f64> = (0..=16).map(|i| 10f64.powf(i as f64 * 0.5)).collect();
    let vals: Vec<f64> = grid.iter().map(|&s| eval(s)).collect();
    let mut onset = None;
    'outer: for start in 0..vals.len() - 1 {
        for w in vals[start..].windows(2) {
            if w[1] > w[0] * (1.0 + 1e-12) + 1e-300 {
                continue 'outer;
            }
        }
        onset = Some(start);
        break;
    }
    match onset {
        Some(_) => Ok(()),
        None => Err(Error::ClassMismatch {
            detail: "generator is not eventually non-increasing on the spot-check grid".into(),
        }),
    }
}

impl DensityGenerator {
    pub fn normal(dim: usize) -> Self {
        assert!(dim >= 1);
        Self {
            dim,
            family: GeneratorFamily::Normal,
        }
    }

    pub fn student_t(dim: usize, nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu <= 0.0 {
            return Err(Error::ConfigError {
                detail: format!("degrees of freedom must be positive, got {nu}"),
            });
        }
        assert!(dim >= 1);
        Ok(Self {
            dim,
            family: GeneratorFamily::StudentT { nu },
        })
    }

    /// Custom regularly-varying generator with a declared tail index.
    pub fn custom_rv(dim: usize, alpha: f64, eval: ScalarFn, label: &str) -> Result<Self> {
        spot_check_pure(&eval)?;
        spot_check_eventually_nonincreasing(&|s| eval(s))?;
        Ok(Self {
            dim,
            family: GeneratorFamily::CustomRv {
                alpha,
                eval,
                label: label.to_string(),
            },
        })
    }

    /// Custom Gumbel-quadratic generator with a declared auxiliary function.
    pub fn custom_gumbel(dim: usize, m: ScalarFn, eval: ScalarFn, label: &str) -> Result<Self> {
        spot_check_pure(&eval)?;
        spot_check_eventually_nonincreasing(&|s| eval(s))?;
        Ok(Self {
            dim,
            family: GeneratorFamily::CustomGumbel {
                m,
                eval,
                label: label.to_string(),
            },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn family(&self) -> &GeneratorFamily {
        &self.family
    }

    pub fn eval(&self, s: f64) -> f64 {
        match &self.family {
            GeneratorFamily::Normal => {
                let k = self.dim as f64;
                (-0.5 * s - 0.5 * k * (2.0 * PI).ln()).exp()
            }
            GeneratorFamily::StudentT { nu } => {
                student_t_constant(*nu, self.dim) * (nu + s).powf(-(nu + self.dim as f64) / 2.0)
            }
            GeneratorFamily::CustomRv { eval, .. } | GeneratorFamily::CustomGumbel { eval, .. } => {
                eval(s)
            }
        }
    }

    /// log of the generator; exact for the closed-form families so that tail
    /// probes can work far past linear-space underflow.
    pub fn ln_eval(&self, s: f64) -> f64 {
        match &self.family {
            GeneratorFamily::Normal => {
                let k = self.dim as f64;
                -0.5 * s - 0.5 * k * (2.0 * PI).ln()
            }
            GeneratorFamily::StudentT { nu } => {
                let k = self.dim as f64;
                student_t_constant(*nu, self.dim).ln() - 0.5 * (nu + k) * (nu + s).ln()
            }
            _ => self.eval(s).ln(),
        }
    }

    /// The marginalization recursion g_k(s) = 2 ∫_0^∞ g_{k+1}(r² + s) dr.
    ///
    /// Closed under the Normal and Student-t families; custom generators get
    /// a quadrature-backed eval and the RV index drops by 1/2.
    pub fn marginalize(&self) -> Result<DensityGenerator> {
        if self.dim < 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: self.dim,
            });
        }
        let dim = self.dim - 1;
        match &self.family {
            GeneratorFamily::Normal => Ok(Self::normal(dim)),
            GeneratorFamily::StudentT { nu } => Self::student_t(dim, *nu),
            GeneratorFamily::CustomRv { alpha, eval, label } => {
                let parent = eval.clone();
                let marg: ScalarFn = Arc::new(move |s: f64| {
                    match quad::integral_above(&|r: f64| parent(r * r + s), 0.0, 1e-280, 1e-11) {
                        Ok(q) => 2.0 * q.value,
                        Err(_) => f64::NAN,
                    }
                });
                // eager probe so a divergent tail surfaces here, not later
                if !marg(1.0).is_finite() {
                    return Err(Error::QuadratureFailure {
                        detail: "marginalization integral did not converge".into(),
                    });
                }
                Ok(Self {
                    dim,
                    family: GeneratorFamily::CustomRv {
                        alpha: alpha - 0.5,
                        eval: marg,
                        label: format!("marginalized({label})"),
                    },
                })
            }
            GeneratorFamily::CustomGumbel { m, eval, label } => {
                let parent = eval.clone();
                let marg: ScalarFn = Arc::new(move |s: f64| {
                    match quad::integral_above(&|r: f64| parent(r * r + s), 0.0, 1e-280, 1e-11) {
                        Ok(q) => 2.0 * q.value,
                        Err(_) => f64::NAN,
                    }
                });
                if !marg(1.0).is_finite() {
                    return Err(Error::QuadratureFailure {
                        detail: "marginalization integral did not converge".into(),
                    });
                }
                Ok(Self {
                    dim,
                    family: GeneratorFamily::CustomGumbel {
                        m: m.clone(),
                        eval: marg,
                        label: format!("marginalized({label})"),
                    },
                })
            }
        }
    }

    /// Tail classification: Normal is Gumbel-quadratic with m(t) = 1/t,
    /// Student-t with k dimensions is RV_{-(ν+k)/2}; declared custom classes
    /// are verified numerically.
    pub fn classify_tail(&self) -> Result<TailClass> {
        let slowly_varying = "1".to_string();
        match &self.family {
            GeneratorFamily::Normal => Ok(TailClass {
                kind: TailKind::GumbelQuadratic {
                    m: Arc::new(|t: f64| 1.0 / t),
                },
                slowly_varying,
            }),
            GeneratorFamily::StudentT { nu } => Ok(TailClass {
                kind: TailKind::RegularlyVarying {
                    alpha: (nu + self.dim as f64) / 2.0,
                },
                slowly_varying,
            }),
            GeneratorFamily::CustomRv { alpha, eval, .. } => {
                let measured = measure_rv_index(&**eval)?;
                if (measured - alpha).abs() > RV_INDEX_TOL {
                    return Err(Error::ClassMismatch {
                        detail: format!(
                            "declared RV index {alpha}, measured {measured:.4} (tolerance {RV_INDEX_TOL})"
                        ),
                    });
                }
                Ok(TailClass {
                    kind: TailKind::RegularlyVarying { alpha: *alpha },
                    slowly_varying,
                })
            }
            GeneratorFamily::CustomGumbel { m, .. } => {
                check_self_neglecting(&**m)?;
                Ok(TailClass {
                    kind: TailKind::GumbelQuadratic { m: m.clone() },
                    slowly_varying,
                })
            }
        }
    }

    /// Relative residual of the normalization integral
    /// `∫_0^∞ r^{k/2-1} g(r) dr - Γ(k/2)/π^{k/2}`.
    ///
    /// Evaluated as `2 ∫_0^∞ u^{k-1} g(u²) du` so the k = 1 endpoint
    /// singularity never appears.
    pub fn normalization_residual(&self) -> Result<f64> {
        let k = self.dim as f64;
        let target = (ln_gamma(k / 2.0) - 0.5 * k * PI.ln()).exp();
        let integral =
            quad::integral_above(&|u: f64| 2.0 * u.powf(k - 1.0) * self.eval(u * u), 0.0, 1e-280, 1e-9)?;
        Ok((integral.value - target).abs() / target)
    }
}

const RV_INDEX_TOL: f64 = 0.05;

/// Least-squares slope of log g over log t on t in [1e2, 1e6].
fn measure_rv_index(eval: &dyn Fn(f64) -> f64) -> Result<f64> {
    let n = 17;
    let mut lx = Vec::with_capacity(n);
    let mut ly = Vec::with_capacity(n);
    for i in 0..n {
        let t = 10f64.powf(2.0 + 4.0 * i as f64 / (n - 1) as f64);
        let g = eval(t);
        if !g.is_finite() || g <= 0.0 {
            return Err(Error::ClassMismatch {
                detail: format!("generator not positive at t={t}; cannot estimate RV index"),
            });
        }
        lx.push(t.ln());
        ly.push(g.ln());
    }
    Ok(-ls_slope(&lx, &ly))
}

/// Numeric self-neglect check m(t + m(t) x) / m(t) -> 1.
fn check_self_neglecting(m: &dyn Fn(f64) -> f64) -> Result<()> {
    let ts = [3.0, 10.0, 30.0, 100.0, 300.0];
    let mut devs = Vec::new();
    for &t in &ts {
        let mt = m(t);
        if !mt.is_finite() || mt <= 0.0 {
            return Err(Error::ClassMismatch {
                detail: format!("auxiliary function not positive at t={t}"),
            });
        }
        let mut worst = 0.0f64;
        for &x in &[0.5, 1.0, 2.0] {
            worst = worst.max((m(t + mt * x) / mt - 1.0).abs());
        }
        devs.push(worst);
    }
    let last = *devs.last().unwrap();
    if last > 0.05 || last > devs[0] + 1e-12 {
        return Err(Error::ClassMismatch {
            detail: format!("auxiliary function fails self-neglect check: deviations {devs:?}"),
        });
    }
    Ok(())
}

/// Verify the quadratic Gumbel max-domain scaling
/// `g([t1 + m(t)x] Q [t1 + m(t)x]') / g(t² 1Q1') -> exp(-x Q 1')`
/// along `t_grid`; the ratio is formed in log space.
pub fn gumbel_scaling_check(
    g: &DensityGenerator,
    q: &DispersionMatrix,
    x: &[f64],
    t_grid: &[f64],
) -> Result<ValidationReport> {
    let class = g.classify_tail()?;
    let m = match &class.kind {
        TailKind::GumbelQuadratic { m } => m.clone(),
        TailKind::RegularlyVarying { .. } => {
            return Err(Error::WrongRegime { expected: "light" })
        }
    };
    if x.len() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.dim(),
            got: x.len(),
        });
    }
    let ones = vec![1.0; q.dim()];
    let one_q_one = q.quad(&ones)?;
    let x_q_one: f64 = {
        let qx = q.matrix() * nalgebra::DVector::from_column_slice(x);
        qx.sum()
    };
    let target = (-x_q_one).exp();

    let mut ratios = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let mt = m(t);
        let shifted: Vec<f64> = x.iter().map(|&xi| t + mt * xi).collect();
        let a = q.quad(&shifted)?;
        let b = t * t * one_q_one;
        ratios.push((g.ln_eval(a) - g.ln_eval(b)).exp());
    }
    let estimate = *ratios.last().expect("non-empty t_grid");
    let deviation = (estimate - target).abs();
    Ok(ValidationReport::evaluate(
        "gumbel_scaling",
        target,
        estimate,
        0.02,
        format!(
            "deviation {deviation:.3e} at t={}; ratios {ratios:?}",
            t_grid.last().unwrap()
        ),
    ))
}
