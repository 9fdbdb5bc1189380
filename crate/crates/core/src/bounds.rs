//! Derivative-ratio bounds for the positive eigenfunction and the
//! interpolation-error correction factors built from them.
//!
//! With `G(u, v; s) = (u^2 + v^2)^{-s}`, the `j`-th partial in `u` satisfies
//! `D_u^j G(u, v; s) = P_j(u, v; s) G(u, v; s + j)`, and by symmetry
//! `D_v^j G(u, v; s) = P_j(v, u; s) G(u, v; s + j)`. Bounds on the ratios
//! `P_j / (u^2 + v^2)^j` over `u >= γ` transfer to the eigenfunction and
//! control bilinear interpolation error.

use crate::error::{Error, Result};

/// `P_j(u, v; s)` for `1 <= j <= 4`, in closed form.
pub fn pj_polynomial(j: u32, u: f64, v: f64, s: f64) -> Result<f64> {
    let (u2, v2) = (u * u, v * v);
    let t = 2.0 * s;
    Ok(match j {
        1 => -t * u,
        2 => t * (t + 1.0) * u2 - t * v2,
        3 => -t * (t + 1.0) * (t + 2.0) * u2 * u + t * (t + 2.0) * 3.0 * u * v2,
        4 => {
            t * (t + 2.0)
                * ((t + 1.0) * (t + 3.0) * u2 * u2 - 6.0 * (t + 3.0) * u2 * v2 + 3.0 * v2 * v2)
        }
        _ => {
            return Err(Error::InvalidParameter(format!(
                "derivative order {j} outside 1..=4"
            )))
        }
    })
}

/// `Q_j(u, v; s) = P_j(v, u; s)`, the polynomial for `D_v^j`.
pub fn qj_polynomial(j: u32, u: f64, v: f64, s: f64) -> Result<f64> {
    pj_polynomial(j, v, u, s)
}

/// Which variable a derivative ratio is taken in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Closed interval `[lo, hi]` containing `D^j G / G` for every `u >= γ`.
pub fn ratio_interval(axis: Axis, j: u32, s: f64, gamma: f64) -> Result<(f64, f64)> {
    let t = 2.0 * s;
    let g = gamma;
    let fourth = (-t * (s + 1.0) * (t + 2.0) * 3.0 / g.powi(4),
        t * (t + 1.0) * (t + 2.0) * (t + 3.0) / g.powi(4));
    Ok(match (axis, j) {
        (Axis::X, 1) => (-t / g, 0.0),
        (Axis::X, 2) => (-s / (4.0 * g * g * (s + 1.0)), t * (t + 1.0) / (g * g)),
        (Axis::X, 3) => (
            -t * (t + 1.0) * (t + 2.0) / g.powi(3),
            t * (t + 2.0) / (g.powi(3) * (s + 2.0).powi(2)),
        ),
        (Axis::Y, 1) => (-s / g, s / g),
        (Axis::Y, 2) => (-t / (g * g), t * (t + 1.0) / (4.0 * g * g)),
        (Axis::Y, 3) => {
            let m = t * (t + 2.0) / g.powi(3)
                * f64::max(25.0 * 5f64.sqrt() / 72.0, (t + 1.0) / 8.0);
            (-m, m)
        }
        (_, 4) => fourth,
        _ => {
            return Err(Error::InvalidParameter(format!(
                "derivative order {j} outside 1..=4"
            )))
        }
    })
}

/// `(2s)(2s+1)...(2s+j-1) / γ^j`, a common bound on `|D^j G| / G`.
pub fn generic_ratio_bound(j: u32, s: f64, gamma: f64) -> f64 {
    (0..j).map(|i| 2.0 * s + i as f64).product::<f64>() / gamma.powi(j as i32)
}

/// Constants bounding derivatives of the positive eigenfunction relative to
/// its value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConstants {
    pub s: f64,
    pub gamma: f64,
    pub dxx_lower: f64,
    pub dxx_upper: f64,
    pub dyy_lower: f64,
    pub dyy_upper: f64,
    /// Lipschitz constant of `log w` in any direction.
    pub lip_xy: f64,
    pub lip_x: f64,
    pub lip_y: f64,
}

impl BoundConstants {
    pub fn new(s: f64, gamma: f64) -> Result<Self> {
        check_s_gamma(s, gamma)?;
        let g2 = gamma * gamma;
        Ok(Self {
            s,
            gamma,
            dxx_lower: -s / (4.0 * g2 * (s + 1.0)),
            dxx_upper: 2.0 * s * (2.0 * s + 1.0) / g2,
            dyy_lower: -2.0 * s / g2,
            dyy_upper: 2.0 * s * (2.0 * s + 1.0) / (4.0 * g2),
            lip_xy: 5f64.sqrt() * s / gamma,
            lip_x: 2.0 * s / gamma,
            lip_y: s / gamma,
        })
    }

    pub fn generic(&self, j: u32) -> f64 {
        generic_ratio_bound(j, self.s, self.gamma)
    }
}

/// Per-bracket multipliers of the lower (`err1`) and upper (`err2`)
/// interpolation corrections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrFactors {
    pub s: f64,
    pub err1_coeff: f64,
    pub err2_coeff: f64,
}

impl ErrFactors {
    pub fn new(s: f64, gamma: f64, h: f64) -> Result<Self> {
        check_s_gamma(s, gamma)?;
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!("mesh width h = {h} must be positive")));
        }
        let growth = (10f64.sqrt() * s * h / gamma).exp();
        let g2 = gamma * gamma;
        Ok(Self {
            s,
            err1_coeff: s * (2.0 * s + 1.0) / g2 * growth,
            err2_coeff: s / g2 * ((9.0 + 8.0 * s) / (8.0 + 8.0 * s)) * growth,
        })
    }

    /// `(err1, err2)` for an interpolation bracket.
    pub fn values(&self, bracket: f64) -> Result<(f64, f64)> {
        let err1 = bracket * self.err1_coeff;
        if err1 >= 1.0 {
            return Err(Error::CorrectionTooLarge { err1, s: self.s });
        }
        Ok((err1, bracket * self.err2_coeff))
    }
}

fn check_s_gamma(s: f64, gamma: f64) -> Result<()> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameter(format!("s = {s} must be positive")));
    }
    if !(gamma >= 1.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} must be >= 1")));
    }
    Ok(())
}
