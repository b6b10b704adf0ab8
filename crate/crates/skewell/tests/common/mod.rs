#![allow(dead_code)] // shared by several integration-test binaries

//! Statistical oracles for the acceptance suite: a two-sample
//! Kolmogorov-Smirnov test and a chi-square grid test of samples against a
//! density.

use nalgebra::DMatrix;
use skewell::quad;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} e^{-2 k^2 lambda^2}.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample KS test; returns (D, p-value).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(|p, q| p.partial_cmp(q).unwrap());
    xb.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (na, nb) = (xa.len(), xb.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < na && j < nb {
        let x = xa[i].min(xb[j]);
        while i < na && xa[i] <= x {
            i += 1;
        }
        while j < nb && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let ne = (na as f64 * nb as f64) / (na as f64 + nb as f64);
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    (d, kolmogorov_q(lambda))
}

/// Chi-square test of bivariate samples against a density on a grid over
/// [lo, hi]^2 with `bins` bins per axis plus one outside bin. Cells with
/// expected count below 5 are pooled. Returns (chi2, dof, p-value).
pub fn chi_square_grid(
    samples: &DMatrix<f64>,
    pdf: impl Fn(f64, f64) -> f64,
    lo: f64,
    hi: f64,
    bins: usize,
) -> (f64, usize, f64) {
    let n = samples.nrows();
    let width = (hi - lo) / bins as f64;

    let mut observed = vec![0u64; bins * bins + 1];
    for r in 0..n {
        let (x, y) = (samples[(r, 0)], samples[(r, 1)]);
        if x < lo || x >= hi || y < lo || y >= hi {
            observed[bins * bins] += 1;
            continue;
        }
        let i = ((x - lo) / width) as usize;
        let j = ((y - lo) / width) as usize;
        observed[i * bins + j] += 1;
    }

    let mut expected = vec![0.0f64; bins * bins + 1];
    let mut inside_mass = 0.0;
    for i in 0..bins {
        for j in 0..bins {
            let mass = quad::adaptive_2d(
                &|x, y| pdf(x, y),
                lo + i as f64 * width,
                lo + (i + 1) as f64 * width,
                lo + j as f64 * width,
                lo + (j + 1) as f64 * width,
                1e-10,
                1e-8,
            )
            .expect("cell quadrature")
            .value;
            expected[i * bins + j] = mass * n as f64;
            inside_mass += mass;
        }
    }
    expected[bins * bins] = (1.0 - inside_mass).max(0.0) * n as f64;

    // pool low-expectation cells
    let mut chi2 = 0.0;
    let mut dof = 0usize;
    let mut pool_obs = 0.0f64;
    let mut pool_exp = 0.0f64;
    for (o, e) in observed.iter().zip(&expected) {
        if *e >= 5.0 {
            chi2 += (*o as f64 - e).powi(2) / e;
            dof += 1;
        } else {
            pool_obs += *o as f64;
            pool_exp += e;
        }
    }
    if pool_exp >= 5.0 {
        chi2 += (pool_obs - pool_exp).powi(2) / pool_exp;
        dof += 1;
    }
    let dof = dof.saturating_sub(1);
    let p = 1.0 - ChiSquared::new(dof as f64).unwrap().cdf(chi2);
    (chi2, dof, p)
}
