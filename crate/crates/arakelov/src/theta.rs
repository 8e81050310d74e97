//! Numerical evaluation of the Riemann theta function in genus 1 and 2,
//! with a rigorous truncation bound, and of its analytic norm
//!
//!   ‖θ‖(z) = det(Im τ)^(1/4) · exp(−π yᵀ(Im τ)⁻¹y) · |θ(z)|,  y = Im z,
//!
//! which is invariant under translations by the period lattice Z^g + τZ^g.
//!
//! Truncation: the series θ(z) = Σ_m exp(iπ mᵀτm + 2iπ mᵀz) is summed over
//! ‖m‖∞ ≤ R. Term magnitudes are exp(−π mᵀYm − 2π mᵀy) ≤ exp(−πλk² + bk)
//! for ‖m‖∞ = k, with λ = λ_min(Im τ) and b = 2π√g‖y‖₂. With
//! N_g(k) = (2k+1)^g − (2k−1)^g shells per radius, the tail beyond R is at
//! most Σ_{k>R} N_g(k)·exp(−πλk² + bk); once consecutive-term ratios drop
//! below 1/2 this is bounded by twice the first tail term, which is the
//! reported error estimate. Double precision; no exactness claims.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ThetaError {
    #[error("only genus 1 and 2 are supported, got {0}")]
    UnsupportedGenus(usize),
    #[error("period matrix is not symmetric")]
    NotSymmetric,
    #[error("imaginary part of the period matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("truncation radius cap {0} exceeded before reaching the tolerance")]
    TailBoundFailure(u32),
    #[error("tolerance must be positive")]
    BadTolerance,
}

const RADIUS_CAP: u32 = 1000;

/// A point τ of Siegel's upper half-space in genus 1 or 2: symmetric with
/// positive-definite imaginary part (leading principal minors above 1e−12).
#[derive(Debug, Clone)]
pub struct PeriodMatrix {
    pub g: usize,
    tau: Vec<Complex64>, // row-major g×g
}

const PD_TOLERANCE: f64 = 1e-12;

impl PeriodMatrix {
    pub fn new(g: usize, entries: &[Complex64]) -> Result<Self, ThetaError> {
        if g != 1 && g != 2 {
            return Err(ThetaError::UnsupportedGenus(g));
        }
        if entries.len() != g * g {
            return Err(ThetaError::NotSymmetric);
        }
        let tau = entries.to_vec();
        if g == 2 {
            let diff = tau[1] - tau[2];
            if diff.norm() > 1e-12 * (1.0 + tau[1].norm()) {
                return Err(ThetaError::NotSymmetric);
            }
        }
        let pm = PeriodMatrix { g, tau };
        let y = pm.im();
        // leading principal minors
        if y[0] <= PD_TOLERANCE {
            return Err(ThetaError::NotPositiveDefinite);
        }
        if g == 2 && y[0] * y[3] - y[1] * y[2] <= PD_TOLERANCE {
            return Err(ThetaError::NotPositiveDefinite);
        }
        Ok(pm)
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.tau[i * self.g + j]
    }

    fn im(&self) -> Vec<f64> {
        self.tau.iter().map(|z| z.im).collect()
    }

    fn det_im(&self) -> f64 {
        let y = self.im();
        match self.g {
            1 => y[0],
            _ => y[0] * y[3] - y[1] * y[2],
        }
    }

    fn lambda_min_im(&self) -> f64 {
        let y = self.im();
        match self.g {
            1 => y[0],
            _ => {
                let tr = y[0] + y[3];
                let det = y[0] * y[3] - y[1] * y[2];
                let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
                tr / 2.0 - disc
            }
        }
    }

    /// yᵀ(Im τ)⁻¹ y for a real vector y.
    fn im_inverse_quadratic(&self, y: &[f64]) -> f64 {
        let im = self.im();
        match self.g {
            1 => y[0] * y[0] / im[0],
            _ => {
                let det = im[0] * im[3] - im[1] * im[2];
                // inverse = (1/det)·[[im33, −im12],[−im21, im00]]
                (im[3] * y[0] * y[0] - (im[1] + im[2]) * y[0] * y[1] + im[0] * y[1] * y[1])
                    / det
            }
        }
    }

    /// τ·n for an integer vector n.
    fn mul_int(&self, n: &[i64]) -> Vec<Complex64> {
        (0..self.g)
            .map(|i| {
                (0..self.g)
                    .map(|j| self.entry(i, j) * n[j] as f64)
                    .sum::<Complex64>()
            })
            .collect()
    }
}

/// Result of a theta evaluation: the value, its analytic norm, the
/// truncation radius used, and the proven tail bound.
#[derive(Debug, Clone)]
pub struct ThetaValue {
    pub value: Complex64,
    pub norm_an: f64,
    pub truncation_radius: u32,
    pub error_estimate: f64,
}

fn shell_count(g: usize, k: u32) -> f64 {
    let k = k as f64;
    match g {
        1 => 2.0,
        _ => 8.0 * k,
    }
}

/// Tail term at radius k: N_g(k)·exp(−πλk² + bk).
fn tail_term(g: usize, lambda: f64, b: f64, k: u32) -> f64 {
    let kf = k as f64;
    shell_count(g, k) * (-std::f64::consts::PI * lambda * kf * kf + b * kf).exp()
}

/// Pick the smallest truncation radius whose geometric tail bound is below
/// the tolerance; the bound 2·t(R+1) is valid once t(k+1)/t(k) ≤ 1/2 holds
/// from k = R+1 on.
fn truncation_radius(g: usize, lambda: f64, b: f64, tol: f64) -> Result<(u32, f64), ThetaError> {
    let pi = std::f64::consts::PI;
    for r in 1..=RADIUS_CAP {
        let k = (r + 1) as f64;
        // ratio bound: shells grow by ≤ (k+1)/k ≤ 2, exponent falls by
        // πλ(2k+1) − b per step
        let ratio = 2.0 * (-(pi * lambda * (2.0 * k + 1.0)) + b).exp();
        if ratio > 0.5 {
            continue;
        }
        let bound = 2.0 * tail_term(g, lambda, b, r + 1);
        if bound < tol {
            return Ok((r, bound));
        }
    }
    Err(ThetaError::TailBoundFailure(RADIUS_CAP))
}

/// θ(z) = Σ_{‖m‖∞ ≤ R} exp(iπ mᵀτm + 2iπ mᵀz) with R chosen so the
/// neglected tail is provably below `tol`, together with the analytic norm.
pub fn theta_eval(
    tau: &PeriodMatrix,
    z: &[Complex64],
    tol: f64,
) -> Result<ThetaValue, ThetaError> {
    if z.len() != tau.g {
        return Err(ThetaError::UnsupportedGenus(z.len()));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(ThetaError::BadTolerance);
    }
    let g = tau.g;
    let lambda = tau.lambda_min_im();
    let y: Vec<f64> = z.iter().map(|w| w.im).collect();
    let y_norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let b = 2.0 * std::f64::consts::PI * (g as f64).sqrt() * y_norm;
    let (radius, error_estimate) = truncation_radius(g, lambda, b, tol)?;

    let r = radius as i64;
    let pi = std::f64::consts::PI;
    let i_pi = Complex64::new(0.0, pi);
    let two_i_pi = Complex64::new(0.0, 2.0 * pi);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut m = vec![-r; g];
    loop {
        // exponent iπ mᵀτm + 2iπ mᵀz
        let mut quad = Complex64::new(0.0, 0.0);
        for i in 0..g {
            for j in 0..g {
                quad += tau.entry(i, j) * (m[i] * m[j]) as f64;
            }
        }
        let mut lin = Complex64::new(0.0, 0.0);
        for i in 0..g {
            lin += z[i] * m[i] as f64;
        }
        sum += (i_pi * quad + two_i_pi * lin).exp();

        // odometer over the box [−r, r]^g
        let mut pos = 0;
        loop {
            if pos == g {
                break;
            }
            m[pos] += 1;
            if m[pos] <= r {
                break;
            }
            m[pos] = -r;
            pos += 1;
        }
        if pos == g {
            break;
        }
    }

    let norm_an =
        tau.det_im().powf(0.25) * (-pi * tau.im_inverse_quadratic(&y)).exp() * sum.norm();
    Ok(ThetaValue {
        value: sum,
        norm_an,
        truncation_radius: radius,
        error_estimate,
    })
}

/// |‖θ‖(z + m + τn) − ‖θ‖(z)| for an integer lattice vector m + τn; the
/// exponential prefactor of the norm compensates the quasi-periodicity
/// factor exactly, so the residual is pure numerical error.
pub fn norm_invariance_check(
    tau: &PeriodMatrix,
    z: &[Complex64],
    m: &[i64],
    n: &[i64],
    tol: f64,
) -> Result<f64, ThetaError> {
    if m.len() != tau.g || n.len() != tau.g {
        return Err(ThetaError::UnsupportedGenus(m.len().max(n.len())));
    }
    let base = theta_eval(tau, z, tol)?;
    let tau_n = tau.mul_int(n);
    let shifted: Vec<Complex64> = (0..tau.g)
        .map(|i| z[i] + Complex64::new(m[i] as f64, 0.0) + tau_n[i])
        .collect();
    let moved = theta_eval(tau, &shifted, tol)?;
    Ok((moved.norm_an - base.norm_an).abs())
}
