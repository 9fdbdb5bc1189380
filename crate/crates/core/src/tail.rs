//! Bounds on the discarded tail `Σ_{|b| > R} |z+b|^{-2s} v_s(θ_b(z))`
//! relative to `v_s(0)`, for the infinite digit sets.
//!
//! `delta_upper` over-counts the tail and `eta_lower` under-counts it; they
//! enter the truncated operator as the rank-one weight `α f(0)`.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfiniteSet {
    I1,
    I2,
}

impl InfiniteSet {
    pub fn name(self) -> &'static str {
        match self {
            InfiniteSet::I1 => "I1",
            InfiniteSet::I2 => "I2",
        }
    }
}

fn check(s: f64, radius: f64) -> Result<()> {
    if !(s > 1.0 && s.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "tail bounds need s > 1 (got {s})"
        )));
    }
    if !(radius > 2.0 && radius.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "tail bounds need R > 2 (got {radius})"
        )));
    }
    Ok(())
}

/// `exp(s / sqrt(R^2 - R)) (R / (R - 1))^s`.
fn upper_prefactor(s: f64, r: f64) -> f64 {
    (s / (r * r - r).sqrt()).exp() * (r / (r - 1.0)).powf(s)
}

/// `C(R, s) = exp(-sqrt(5) s / sqrt(R^2 - R)) (R / (R + sqrt(5) + 5/(4R)))^s`.
fn lower_prefactor(s: f64, r: f64) -> f64 {
    let sqrt5 = 5f64.sqrt();
    (-sqrt5 * s / (r * r - r).sqrt()).exp() * (r / (r + sqrt5 + 5.0 / (4.0 * r))).powf(s)
}

/// Integral-comparison bounds `(upper, lower)` on `Σ_{b ∈ set, |b| > R} |b|^{-2s}`.
pub fn lattice_tail_sums(set: InfiniteSet, s: f64, radius: f64) -> Result<(f64, f64)> {
    check(s, radius)?;
    let r = radius;
    let quadrant = (PI / 4.0) / (s - 1.0) * (r - SQRT_2).powf(2.0 - 2.0 * s);
    let upper = match set {
        InfiniteSet::I1 => (r - 1.0).powf(1.0 - 2.0 * s) / (2.0 * s - 1.0) + 2.0 * quadrant,
        InfiniteSet::I2 => quadrant,
    };
    let theta = (1.0 / (r + SQRT_2)).asin();
    let angle = match set {
        InfiniteSet::I1 => PI - 2.0 * theta,
        InfiniteSet::I2 => PI / 2.0 - 2.0 * theta,
    };
    let lower = angle / (2.0 * s - 2.0) * (r + SQRT_2).powf(2.0 - 2.0 * s);
    Ok((upper, lower))
}

/// Upper bound `δ_{s,R}` on the tail ratio.
pub fn delta_upper(set: InfiniteSet, s: f64, radius: f64) -> Result<f64> {
    let (upper, _) = lattice_tail_sums(set, s, radius)?;
    Ok(upper_prefactor(s, radius) * upper)
}

/// Lower bound `η_{s,R}` on the tail ratio.
pub fn eta_lower(set: InfiniteSet, s: f64, radius: f64) -> Result<f64> {
    let (_, lower) = lattice_tail_sums(set, s, radius)?;
    Ok(lower_prefactor(s, radius) * lower)
}

/// `(δ, η)` for an infinite subset of `I1` whose tail sums
/// `Σ_{|b| > R} |b|^{-2s}` are bounded above and below by the caller.
pub fn tail_sum_bound(tail_upper: f64, tail_lower: f64, s: f64, radius: f64) -> Result<(f64, f64)> {
    check(s, radius)?;
    if !(tail_upper >= 0.0 && tail_lower >= 0.0) || tail_lower > tail_upper {
        return Err(Error::InvalidParameter(format!(
            "tail sums must satisfy 0 <= lower <= upper (got {tail_lower}, {tail_upper})"
        )));
    }
    Ok((
        upper_prefactor(s, radius) * tail_upper,
        lower_prefactor(s, radius) * tail_lower,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_to(x: f64, places: i32) -> f64 {
        let f = 10f64.powi(places);
        (x * f).round() / f
    }

    #[test]
    fn printed_values() {
        use InfiniteSet::*;
        let d = |set, s, r| delta_upper(set, s, r).unwrap();
        let e = |set, s, r| eta_lower(set, s, r).unwrap();
        assert_eq!(round_to(d(I1, 1.86, 100.0), 5), 0.00071);
        assert_eq!(round_to(d(I1, 1.86, 200.0), 5), 0.00021);
        assert_eq!(round_to(d(I1, 1.86, 300.0), 5), 0.00010);
        assert_eq!(round_to(e(I1, 1.86, 100.0), 5), 0.00059);
        assert_eq!(round_to(e(I1, 1.86, 200.0), 5), 0.00019);
        assert_eq!(round_to(e(I1, 1.86, 300.0), 6), 0.000096);
        assert_eq!(round_to(d(I2, 1.49, 100.0), 4), 0.0184);
        assert_eq!(round_to(d(I2, 1.49, 200.0), 4), 0.0091);
        assert_eq!(round_to(d(I2, 1.49, 300.0), 4), 0.0061);
        assert_eq!(round_to(e(I2, 1.49, 100.0), 4), 0.0160);
        assert_eq!(round_to(e(I2, 1.49, 200.0), 4), 0.0085);
        assert_eq!(round_to(e(I2, 1.49, 300.0), 4), 0.0058);
    }

    #[test]
    fn rejects_invalid_ranges() {
        assert!(delta_upper(InfiniteSet::I1, 1.0, 100.0).is_err());
        assert!(delta_upper(InfiniteSet::I1, 1.5, 2.0).is_err());
        assert!(eta_lower(InfiniteSet::I2, 0.9, 100.0).is_err());
        assert!(tail_sum_bound(-1.0, 0.0, 1.5, 10.0).is_err());
        assert!(tail_sum_bound(1.0, 2.0, 1.5, 10.0).is_err());
    }

    #[test]
    fn generic_path_matches_closed_forms() {
        assert_eq!(tail_sum_bound(0.0, 0.0, 1.5, 10.0).unwrap(), (0.0, 0.0));
        for set in [InfiniteSet::I1, InfiniteSet::I2] {
            let (up, lo) = lattice_tail_sums(set, 1.7, 150.0).unwrap();
            let (d, e) = tail_sum_bound(up, lo, 1.7, 150.0).unwrap();
            assert_eq!(d, delta_upper(set, 1.7, 150.0).unwrap());
            assert_eq!(e, eta_lower(set, 1.7, 150.0).unwrap());
        }
        let (d, _) = tail_sum_bound(1e-4, 0.0, 1.86, 100.0).unwrap();
        let expected = 1e-4 * (1.86 / 9900f64.sqrt()).exp() * (100.0f64 / 99.0).powf(1.86);
        assert!((d - expected).abs() <= 1e-14 * expected);
        assert!((d - 1.0381e-4).abs() < 1e-8);
    }

    #[test]
    fn monotone_in_radius_and_s() {
        for set in [InfiniteSet::I1, InfiniteSet::I2] {
            for f in [delta_upper, eta_lower] {
                let radii = [50.0, 100.0, 200.0, 400.0];
                for i in 0..=18 {
                    let s = 1.1 + 0.05 * i as f64;
                    let vals: Vec<f64> = radii.iter().map(|&r| f(set, s, r).unwrap()).collect();
                    assert!(vals.windows(2).all(|w| w[1] < w[0]));
                    assert!(vals.iter().all(|&v| v > 0.0));
                    if i > 0 {
                        for &r in &radii {
                            assert!(f(set, s, r).unwrap() < f(set, s - 0.05, r).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn eta_below_delta() {
        for set in [InfiniteSet::I1, InfiniteSet::I2] {
            for r in [3.0, 10.0, 100.0, 1000.0] {
                for s in [1.05, 1.3, 1.5, 1.86, 2.5] {
                    let d = delta_upper(set, s, r).unwrap();
                    let e = eta_lower(set, s, r).unwrap();
                    assert!(0.0 < e && e <= d, "{set:?} s={s} R={r}: {e} > {d}");
                }
            }
        }
    }

    /// Brute-force envelopes for the tail ratio at `z = 0`. Eigenfunction
    /// regularity gives `exp(-sqrt(5) s |w|) <= v(w)/v(0) <= exp(s |w|)` for
    /// images `w = 1/b`; digits with `R < |b| <= 10R` are summed exactly
    /// and the remainder uses the bounds at radius `10R`.
    #[test]
    fn bounds_bracket_brute_force_envelopes() {
        let sqrt5 = 5f64.sqrt();
        for (set, s) in [(InfiniteSet::I1, 1.86), (InfiniteSet::I2, 1.49), (InfiniteSet::I1, 1.3)] {
            for r in [20.0, 100.0] {
                let outer = 10.0 * r;
                let top = outer as i64;
                let (mut hi, mut lo) = (0.0, 0.0);
                for m in 1..=top {
                    let n_max = if set == InfiniteSet::I2 { -1 } else { top };
                    for n in -top..=n_max {
                        let mod2 = (m * m + n * n) as f64;
                        let modulus = mod2.sqrt();
                        if modulus <= r || modulus > outer {
                            continue;
                        }
                        let w = mod2.powf(-s);
                        hi += w * (s / modulus).exp();
                        lo += w * (-sqrt5 * s / modulus).exp();
                    }
                }
                hi += delta_upper(set, s, outer).unwrap();
                lo += eta_lower(set, s, outer).unwrap();
                assert!(hi <= delta_upper(set, s, r).unwrap(), "{set:?} R={r}");
                assert!(lo >= eta_lower(set, s, r).unwrap(), "{set:?} R={r}");
            }
        }
    }
}
