//! Dominant eigenvalues of assembled matrices.
//!
//! For nonnegative matrices the power method is run from the all-ones vector
//! and stopped on the Collatz–Wielandt width: every iterate `v > 0` gives
//! `min_i (Mv)_i / v_i <= r(M) <= max_i (Mv)_i / v_i`. Signed matrices from
//! the higher-order spaces use a residual-monitored variant instead.

use serde::{Deserialize, Serialize};

use crate::assembly::SparseRowMatrix;
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    pub lambda: f64,
    /// Nonnegative, sup-norm 1.
    pub vector: Vec<f64>,
    pub cw_lower: f64,
    pub cw_upper: f64,
    pub iterations: usize,
    /// `max_i |(Mv)_i - λ v_i|`.
    pub residual: f64,
}

/// Collatz–Wielandt ratios of `w = Mv` against `v`, over `v_i > 0`. An
/// index with `v_i = 0 < w_i` makes the upper ratio infinite.
fn cw_bounds(v: &[f64], w: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for (&vi, &wi) in v.iter().zip(w) {
        if vi > 0.0 {
            let r = wi / vi;
            lo = lo.min(r);
            hi = hi.max(r);
        } else if wi > 0.0 {
            hi = f64::INFINITY;
        }
    }
    (lo, hi)
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn residual(v: &[f64], w: &[f64], lambda: f64) -> f64 {
    v.iter()
        .zip(w)
        .fold(0.0f64, |m, (&vi, &wi)| m.max((wi - lambda * vi).abs()))
}

/// Power iteration from the all-ones vector. `trace`, when given, receives
/// `(cw_lower, cw_upper)` after every iteration.
pub fn power_method_traced(
    m: &SparseRowMatrix,
    tol: f64,
    max_iter: usize,
    mut trace: Option<&mut Vec<(f64, f64)>>,
) -> Result<SpectralResult> {
    if !m.is_nonnegative() {
        return Err(Error::InvalidParameter(
            "power_method needs a nonnegative matrix".into(),
        ));
    }
    if !(tol >= 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be >= 0")));
    }
    let n = m.n();
    let mut v = vec![1.0; n];
    let mut w = vec![0.0; n];
    let mut width = f64::INFINITY;
    for it in 1..=max_iter {
        m.apply_into(&v, &mut w)?;
        let (lo, hi) = cw_bounds(&v, &w);
        if let Some(t) = trace.as_deref_mut() {
            t.push((lo, hi));
        }
        width = hi - lo;
        if width <= tol * lo {
            let lambda = 0.5 * (lo + hi);
            // The tested vector `v` is returned, not `w`: rescaling would
            // perturb the ratios that were just certified.
            let res = residual(&v, &w, lambda);
            return Ok(SpectralResult {
                lambda,
                vector: v,
                cw_lower: lo,
                cw_upper: hi,
                iterations: it,
                residual: res,
            });
        }
        let norm = sup_norm(&w);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NoConvergence {
                iterations: it,
                width,
            });
        }
        for (vi, &wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm;
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        width,
    })
}

pub fn power_method(m: &SparseRowMatrix, tol: f64, max_iter: usize) -> Result<SpectralResult> {
    power_method_traced(m, tol, max_iter, None)
}

/// Dominant eigenpair of a possibly signed matrix whose dominant eigenvalue
/// is real and simple. Stops once `‖Mv - λv‖∞ <= tol |λ| ‖v‖∞` with `λ` the
/// Rayleigh quotient.
pub fn dominant_eigen_general(
    m: &SparseRowMatrix,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, Vec<f64>)> {
    let n = m.n();
    // A slightly uneven start avoids beginning on a symmetric eigenvector.
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.25 * ((i as f64 + 1.0) * 0.618).sin()).collect();
    let mut w = vec![0.0; n];
    let mut prev: Vec<f64> = Vec::new();
    let mut res = f64::INFINITY;
    for it in 1..=max_iter {
        m.apply_into(&v, &mut w)?;
        let vw: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let vv: f64 = v.iter().map(|a| a * a).sum();
        let lambda = vw / vv;
        res = residual(&v, &w, lambda);
        if res <= tol * lambda.abs() * sup_norm(&v) {
            return Ok((lambda, v));
        }
        let pivot = w
            .iter()
            .copied()
            .fold(0.0f64, |p, x| if x.abs() > p.abs() { x } else { p });
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::NoConvergence {
                iterations: it,
                width: res,
            });
        }
        let prev2 = std::mem::replace(&mut prev, std::mem::take(&mut v));
        v = w.iter().map(|x| x / pivot).collect();
        if it > 20 && prev2.len() == n {
            let d = |a: &[f64], b: &[f64]| {
                a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
            };
            if d(&v, &prev2) <= 1e-12 && d(&v, &prev) > 1e-6 {
                return Err(Error::OscillationDetected { iterations: it });
            }
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        width: res,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// `Mv <= v`: certifies `r(M) <= 1`.
    UpperDominates,
    /// `Mv >= v`: certifies `r(M) >= 1`.
    LowerDominates,
}

/// Componentwise test of `Mv <= (1 + slack) v` or `Mv >= (1 - slack) v`.
/// Vectors with a nonpositive or non-finite entry never pass.
pub fn verify_certificate(m: &SparseRowMatrix, v: &[f64], direction: Direction, slack: f64) -> bool {
    if v.len() != m.n() || v.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return false;
    }
    let Ok(w) = m.apply(v) else {
        return false;
    };
    match direction {
        Direction::UpperDominates => w.iter().zip(v).all(|(&wi, &vi)| wi <= (1.0 + slack) * vi),
        Direction::LowerDominates => w.iter().zip(v).all(|(&wi, &vi)| wi >= (1.0 - slack) * vi),
    }
}
