//! Small dense symmetric positive-definite matrices and their quadratic forms.
//!
//! Everything downstream (densities, tail orders, samplers) runs through a
//! validated [`DispersionMatrix`]: symmetry is checked then enforced by
//! averaging, positive definiteness is decided by a Cholesky factorization
//! with a scale-aware pivot threshold, and the factor, inverse and
//! determinant are cached.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Dimension cap; the quadrature cost of everything downstream grows with d.
pub const DEFAULT_MAX_DIM: usize = 16;

const SYMMETRY_RTOL: f64 = 1e-12;
const PIVOT_RTOL: f64 = 1e-12;

/// A validated symmetric positive-definite dispersion matrix with cached
/// Cholesky factor, inverse and determinant.
#[derive(Debug, Clone)]
pub struct DispersionMatrix {
    dim: usize,
    mat: DMatrix<f64>,
    chol_lower: DMatrix<f64>,
    inv: DMatrix<f64>,
    det: f64,
    unit_diag: bool,
}

/// A quadratic form value together with the inputs that produced it.
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    pub value: f64,
    pub vector: Vec<f64>,
    pub matrix_dim: usize,
}

/// Lower-triangular Cholesky with pivot threshold `PIVOT_RTOL * max|entry|`.
fn cholesky_with_threshold(mat: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let d = mat.nrows();
    let scale = mat.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let threshold = PIVOT_RTOL * scale;
    let mut l = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..=i {
            let mut s = mat[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if s <= threshold {
                    return Err(Error::NotPositiveDefinite { row: i, pivot: s });
                }
                l[(i, i)] = s.sqrt();
            } else {
                l[(i, j)] = s / l[(j, j)];
            }
        }
    }
    Ok(l)
}

fn solve_lower(l: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let d = l.nrows();
    let mut x = b.clone();
    for i in 0..d {
        for k in 0..i {
            let v = x[k];
            x[i] -= l[(i, k)] * v;
        }
        x[i] /= l[(i, i)];
    }
    x
}

fn solve_upper_t(l: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    // solves L^T x = b
    let d = l.nrows();
    let mut x = b.clone();
    for i in (0..d).rev() {
        for k in (i + 1)..d {
            let v = x[k];
            x[i] -= l[(k, i)] * v;
        }
        x[i] /= l[(i, i)];
    }
    x
}

impl DispersionMatrix {
    /// Validate and cache a dispersion matrix from row-major entries.
    pub fn new(entries: &[f64], dim: usize, require_unit_diag: bool) -> Result<Self> {
        Self::with_max_dim(entries, dim, require_unit_diag, DEFAULT_MAX_DIM)
    }

    /// As [`new`](Self::new) with an explicit dimension cap.
    pub fn with_max_dim(
        entries: &[f64],
        dim: usize,
        require_unit_diag: bool,
        max_dim: usize,
    ) -> Result<Self> {
        if dim == 0 || dim > max_dim || entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::DomainError {
                detail: "non-finite matrix entry".into(),
            });
        }
        let raw = DMatrix::from_row_slice(dim, dim, entries);
        let scale = raw.iter().fold(0.0f64, |m, &v| m.max(v.abs()));

        let mut max_asym = 0.0f64;
        for i in 0..dim {
            for j in (i + 1)..dim {
                max_asym = max_asym.max((raw[(i, j)] - raw[(j, i)]).abs());
            }
        }
        if max_asym > SYMMETRY_RTOL * scale.max(1.0) {
            return Err(Error::NotSymmetric { max_asym });
        }
        // remove benign input noise deterministically
        let mat = 0.5 * (&raw + raw.transpose());

        if require_unit_diag {
            for i in 0..dim {
                if (mat[(i, i)] - 1.0).abs() > SYMMETRY_RTOL {
                    return Err(Error::DiagNotUnit {
                        row: i,
                        value: mat[(i, i)],
                    });
                }
            }
        }
        let unit_diag = (0..dim).all(|i| (mat[(i, i)] - 1.0).abs() <= SYMMETRY_RTOL);

        let chol_lower = cholesky_with_threshold(&mat)?;
        let det = (0..dim).map(|i| chol_lower[(i, i)]).product::<f64>().powi(2);

        let mut inv = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            let e = DVector::from_fn(dim, |i, _| if i == j { 1.0 } else { 0.0 });
            let col = solve_upper_t(&chol_lower, &solve_lower(&chol_lower, &e));
            inv.set_column(j, &col);
        }
        // re-symmetrize the inverse
        let inv = 0.5 * (&inv + inv.transpose());

        Ok(Self {
            dim,
            mat,
            chol_lower,
            inv,
            det,
            unit_diag,
        })
    }

    /// d-dimensional identity.
    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1.0;
        }
        Self::new(&entries, dim, true).expect("identity is PD")
    }

    /// Bivariate correlation matrix [[1, rho], [rho, 1]].
    pub fn correlation2(rho: f64) -> Result<Self> {
        Self::new(&[1.0, rho, rho, 1.0], 2, true)
    }

    /// Equicorrelation matrix of the given dimension.
    pub fn equicorrelation(dim: usize, rho: f64) -> Result<Self> {
        let mut entries = vec![rho; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1.0;
        }
        Self::new(&entries, dim, true)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn ln_det(&self) -> f64 {
        2.0 * (0..self.dim).map(|i| self.chol_lower[(i, i)].ln()).sum::<f64>()
    }

    pub fn is_unit_diag(&self) -> bool {
        self.unit_diag
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inv
    }

    pub fn cholesky_lower(&self) -> &DMatrix<f64> {
        &self.chol_lower
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.mat[(i, j)]
    }

    fn check_dim(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// v M v' with the matrix itself.
    pub fn quad(&self, v: &[f64]) -> Result<f64> {
        self.check_dim(v)?;
        let v = DVector::from_column_slice(v);
        Ok((v.transpose() * &self.mat * &v)[(0, 0)])
    }

    /// v M^{-1} v', computed as |L^{-1} v|^2 so it is nonnegative by
    /// construction.
    pub fn inv_quad(&self, v: &[f64]) -> Result<f64> {
        self.check_dim(v)?;
        let z = solve_lower(&self.chol_lower, &DVector::from_column_slice(v));
        Ok(z.norm_squared())
    }

    /// u M^{-1} v'.
    pub fn inv_bilinear(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        self.check_dim(u)?;
        self.check_dim(v)?;
        let zu = solve_lower(&self.chol_lower, &DVector::from_column_slice(u));
        let zv = solve_lower(&self.chol_lower, &DVector::from_column_slice(v));
        Ok(zu.dot(&zv))
    }

    /// M^{-1} v' as a vector.
    pub fn inv_mul(&self, v: &[f64]) -> Result<DVector<f64>> {
        self.check_dim(v)?;
        let z = solve_lower(&self.chol_lower, &DVector::from_column_slice(v));
        Ok(solve_upper_t(&self.chol_lower, &z))
    }

    /// 1 M^{-1} 1' (the light-regime tail order).
    pub fn one_inv_one(&self) -> f64 {
        let ones = vec![1.0; self.dim];
        self.inv_quad(&ones).expect("dimension matches")
    }

    /// M^{-1} 1'.
    pub fn inv_one(&self) -> DVector<f64> {
        let ones = vec![1.0; self.dim];
        self.inv_mul(&ones).expect("dimension matches")
    }
}

/// Validated construction from row-major entries.
pub fn build_dispersion(entries: &[f64], dim: usize, require_unit_diag: bool) -> Result<DispersionMatrix> {
    DispersionMatrix::new(entries, dim, require_unit_diag)
}

/// The (d+1)-dimensional block matrix [[1, delta], [delta', Sigma]].
///
/// Positive definiteness of the block matrix is equivalent to
/// `delta Sigma^{-1} delta' < 1`, which is checked explicitly so the caller
/// gets the skewness diagnosis rather than a generic Cholesky failure.
pub fn extended_dispersion(sigma: &DispersionMatrix, delta: &[f64]) -> Result<DispersionMatrix> {
    let d = sigma.dim();
    if delta.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: delta.len(),
        });
    }
    let q = sigma.inv_quad(delta)?;
    if q >= 1.0 {
        return Err(Error::SkewnessTooLarge { quad_form: q });
    }
    let n = d + 1;
    let mut entries = vec![0.0; n * n];
    entries[0] = 1.0;
    for j in 0..d {
        entries[j + 1] = delta[j];
        entries[(j + 1) * n] = delta[j];
        for i in 0..d {
            entries[(i + 1) * n + (j + 1)] = sigma.entry(i, j);
        }
    }
    DispersionMatrix::new(&entries, n, false)
}

/// v Sigma^{-1} v' with an audit record.
pub fn quad_form(v: &[f64], sigma: &DispersionMatrix) -> Result<QuadraticForm> {
    let value = sigma.inv_quad(v)?;
    Ok(QuadraticForm {
        value,
        vector: v.to_vec(),
        matrix_dim: sigma.dim(),
    })
}
