//! Root search in `s` for `r(A_s) = 1` and `r(B_s) = 1`.
//!
//! `s ↦ log r(M_s)` is convex and strictly decreasing, so secant steps from
//! either side undershoot the root and the iteration converges without
//! oscillating. The upper dimension bound is the first `s` at which `B_s`
//! admits a vector with `B_s w <= w`; the lower bound is an `s` at which
//! `A_s u >= u`.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::assembly::{assemble, Correction, OperatorSpec, SparseRowMatrix, WeightFamily};
use crate::error::{Error, Result};
use crate::higher_order::TensorSpace;
use crate::maps::{Alphabet, AlphabetKind};
use crate::mesh::{MeshDomain, Region};
use crate::spectral::{
    dominant_eigen_general, power_method, verify_certificate, Direction, SpectralResult,
    DEFAULT_MAX_ITER, DEFAULT_TOL,
};
use crate::tail::{delta_upper, eta_lower, InfiniteSet};

pub const DEFAULT_TOL_ROOT: f64 = 1e-5;
const MAX_NUDGES: usize = 5;
/// Largest single secant step in `s`.
const MAX_STEP: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub alphabet: Alphabet,
    /// Mesh resolution, `h = 1/N`.
    pub n: i64,
    /// Truncation radius; `f64::INFINITY` for finite alphabets.
    pub radius: f64,
    /// Relative Collatz–Wielandt width at which the power method stops.
    pub tol_eig: f64,
    /// Width of the landing window for `log r` at either end of the bracket.
    pub tol_root: f64,
    pub max_secant: usize,
    pub max_power_iter: usize,
    /// Two starting abscissae for the search.
    pub s_init: (f64, f64),
}

impl SolveConfig {
    pub fn new(alphabet: Alphabet, n: i64, radius: f64) -> Self {
        let s_init = if alphabet.is_finite() { (1.0, 1.1) } else { (1.5, 1.6) };
        Self {
            alphabet,
            n,
            radius,
            tol_eig: DEFAULT_TOL,
            tol_root: DEFAULT_TOL_ROOT,
            max_secant: 60,
            max_power_iter: DEFAULT_MAX_ITER,
            s_init,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol_root > 0.0 && self.tol_eig > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        let floor = self.s_floor();
        if !(self.s_init.0 > floor && self.s_init.1 > floor && self.s_init.0 != self.s_init.1) {
            return Err(Error::InvalidParameter(format!(
                "initial abscissae {:?} must be distinct and exceed {floor}",
                self.s_init
            )));
        }
        if !self.alphabet.is_finite() && !(self.radius.is_finite() && self.radius > 2.0) {
            return Err(Error::InvalidParameter(
                "infinite alphabets need a finite truncation radius R > 2".into(),
            ));
        }
        Ok(())
    }

    /// Every trial `s` must exceed this value.
    pub fn s_floor(&self) -> f64 {
        if self.alphabet.is_finite() {
            self.alphabet.tau()
        } else {
            self.alphabet.tau().max(1.0)
        }
    }

    fn infinite_set(&self) -> Option<InfiniteSet> {
        match self.alphabet.kind() {
            AlphabetKind::I1 => Some(InfiniteSet::I1),
            AlphabetKind::I2 => Some(InfiniteSet::I2),
            _ => None,
        }
    }

    /// Tail weights `(η, δ)` for the lower and upper matrices at `s`.
    pub fn alphas(&self, s: f64) -> Result<(f64, f64)> {
        match self.infinite_set() {
            Some(set) => Ok((eta_lower(set, s, self.radius)?, delta_upper(set, s, self.radius)?)),
            None => Ok((0.0, 0.0)),
        }
    }

    pub fn mesh(&self) -> Result<MeshDomain> {
        MeshDomain::build(self.n, Region::HalfDisk)
    }

    fn spec(&self, s: f64, alpha: f64, correction: Correction) -> OperatorSpec {
        OperatorSpec::new(self.alphabet.clone(), s, self.radius, alpha, correction)
    }
}

/// Spectral data of `A_s` and `B_s` at one `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusBounds {
    pub s: f64,
    pub alpha_lower: f64,
    pub alpha_upper: f64,
    pub lower: SpectralResult,
    pub upper: SpectralResult,
}

impl RadiusBounds {
    pub fn r_lower(&self) -> f64 {
        self.lower.lambda
    }

    pub fn r_upper(&self) -> f64 {
        self.upper.lambda
    }
}

/// One corrected matrix at one `s`, with its power-method result.
struct Trial {
    s: f64,
    alpha: f64,
    matrix: SparseRowMatrix,
    spectral: SpectralResult,
}

fn evaluate(cfg: &SolveConfig, mesh: &MeshDomain, s: f64, correction: Correction) -> Result<Trial> {
    let (eta, delta) = cfg.alphas(s)?;
    let alpha = match correction {
        Correction::Lower => eta,
        Correction::Upper => delta,
        Correction::None => 0.0,
    };
    let matrix = assemble(mesh, &cfg.spec(s, alpha, correction))?;
    let spectral = power_method(&matrix, cfg.tol_eig, cfg.max_power_iter)?;
    Ok(Trial {
        s,
        alpha,
        matrix,
        spectral,
    })
}

pub fn radius_bounds(cfg: &SolveConfig, s: f64) -> Result<RadiusBounds> {
    let mesh = cfg.mesh()?;
    radius_bounds_on(cfg, &mesh, s)
}

pub fn radius_bounds_on(cfg: &SolveConfig, mesh: &MeshDomain, s: f64) -> Result<RadiusBounds> {
    if !(s > cfg.s_floor()) {
        return Err(Error::InvalidParameter(format!(
            "s = {s} must exceed {}",
            cfg.s_floor()
        )));
    }
    let a = evaluate(cfg, mesh, s, Correction::Lower)?;
    let b = evaluate(cfg, mesh, s, Correction::Upper)?;
    Ok(RadiusBounds {
        s,
        alpha_lower: a.alpha,
        alpha_upper: b.alpha,
        lower: a.spectral,
        upper: b.spectral,
    })
}

/// Spectral radius of the uncorrected matrix `M_s` (with `α = 0`).
pub fn plain_radius(cfg: &SolveConfig, mesh: &MeshDomain, s: f64) -> Result<f64> {
    Ok(evaluate(cfg, mesh, s, Correction::None)?.spectral.lambda)
}

/// Result of a root search: the accepted abscissa, the payload computed
/// there and the last secant slope of `log r`.
struct Root<T> {
    s: f64,
    payload: T,
    slope: f64,
}

/// Secant iteration for `phi(s) = target` on a decreasing convex `phi`,
/// accepting the first iterate with `|phi(s) - target| <= half_window`.
fn secant_search<T>(
    mut phi: impl FnMut(f64) -> Result<(f64, T)>,
    s_init: (f64, f64),
    floor: f64,
    target: f64,
    half_window: f64,
    max_iter: usize,
) -> Result<Root<T>> {
    let (mut s0, mut s1) = s_init;
    let (v0, _) = phi(s0)?;
    let mut g0 = v0 - target;
    let (v1, mut p1) = phi(s1)?;
    let mut g1 = v1 - target;
    // Largest abscissa with phi above target, smallest with phi below.
    let mut above: Option<f64> = None;
    let mut below: Option<f64> = None;
    let note = |s: f64, g: f64, above: &mut Option<f64>, below: &mut Option<f64>| {
        if g > 0.0 {
            *above = Some(above.map_or(s, |a: f64| a.max(s)));
        } else {
            *below = Some(below.map_or(s, |b: f64| b.min(s)));
        }
    };
    note(s0, g0, &mut above, &mut below);
    note(s1, g1, &mut above, &mut below);
    let mut slope = (g1 - g0) / (s1 - s0);
    for _ in 0..max_iter {
        if g1.abs() <= half_window {
            return Ok(Root {
                s: s1,
                payload: p1,
                slope,
            });
        }
        slope = (g1 - g0) / (s1 - s0);
        let mut next = if slope < 0.0 && slope.is_finite() {
            s1 - g1 / slope
        } else if g1 > 0.0 {
            s1 + MAX_STEP
        } else {
            s1 - MAX_STEP
        };
        next = next.clamp(s1 - MAX_STEP, s1 + MAX_STEP);
        if let (Some(a), Some(b)) = (above, below) {
            if !(next > a && next < b) {
                next = 0.5 * (a + b);
            }
        }
        if next <= floor {
            let lowest = below.map_or(s1, |b| b.min(s1)).min(above.unwrap_or(s1));
            next = 0.5 * (floor + lowest);
        }
        if next == s1 {
            break;
        }
        let (v, p) = phi(next)?;
        (s0, g0) = (s1, g1);
        s1 = next;
        g1 = v - target;
        p1 = p;
        note(s1, g1, &mut above, &mut below);
    }
    if above.is_none() || below.is_none() {
        return Err(Error::NoBracket {
            s: s1,
            log_r: g1 + target,
        });
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        width: g1.abs(),
    })
}

/// Certified enclosure of the dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionBracket {
    pub set: String,
    /// Digits of a custom alphabet, so the bracket can be re-verified.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub digits: Option<Vec<(f64, f64)>>,
    pub n: i64,
    pub h: f64,
    /// Truncation radius; absent for finite alphabets.
    #[serde(rename = "R")]
    pub radius: Option<f64>,
    pub s_lower: f64,
    pub s_upper: f64,
    /// Collatz–Wielandt lower bound of `r(A_{s_lower})`.
    pub r_at_lower: f64,
    /// Collatz–Wielandt upper bound of `r(B_{s_upper})`.
    pub r_at_upper: f64,
    pub alpha_lower: f64,
    pub alpha_upper: f64,
    pub dof: usize,
    pub runtime_s: f64,
    /// `u > 0` with `A_{s_lower} u >= u`.
    pub certificate_lower: Vec<f64>,
    /// `w > 0` with `B_{s_upper} w <= w`.
    pub certificate_upper: Vec<f64>,
}

impl DimensionBracket {
    pub fn width(&self) -> f64 {
        self.s_upper - self.s_lower
    }

    /// Alphabet and configuration that produced this bracket.
    pub fn config(&self) -> Result<SolveConfig> {
        let alphabet = match (self.set.as_str(), &self.digits) {
            ("I1", _) => Alphabet::i1(),
            ("I2", _) => Alphabet::i2(),
            ("I3", _) => Alphabet::i3(),
            (_, Some(d)) => Alphabet::custom(d.clone())?,
            (other, None) => {
                return Err(Error::InvalidParameter(format!("unknown set {other}")))
            }
        };
        Ok(SolveConfig::new(
            alphabet,
            self.n,
            self.radius.unwrap_or(f64::INFINITY),
        ))
    }

    /// Rebuilds `A_{s_lower}` and `B_{s_upper}`. Assembly is deterministic,
    /// so these are the matrices the certificates were checked against.
    pub fn matrices(&self) -> Result<(SparseRowMatrix, SparseRowMatrix)> {
        let cfg = self.config()?;
        let mesh = cfg.mesh()?;
        let (eta, _) = cfg.alphas(self.s_lower)?;
        let (_, delta) = cfg.alphas(self.s_upper)?;
        let a = assemble(&mesh, &cfg.spec(self.s_lower, eta, Correction::Lower))?;
        let b = assemble(&mesh, &cfg.spec(self.s_upper, delta, Correction::Upper))?;
        Ok((a, b))
    }

    /// Re-checks both stored certificates against freshly assembled
    /// matrices. Returns `(lower_ok, upper_ok)`.
    pub fn verify_with_slack(&self, slack: f64) -> Result<(bool, bool)> {
        let (a, b) = self.matrices()?;
        Ok((
            verify_certificate(&a, &self.certificate_lower, Direction::LowerDominates, slack),
            verify_certificate(&b, &self.certificate_upper, Direction::UpperDominates, slack),
        ))
    }

    /// [`verify_with_slack`](Self::verify_with_slack) with zero slack.
    pub fn verify(&self) -> Result<(bool, bool)> {
        self.verify_with_slack(0.0)
    }
}

/// Drives one corrected family into its landing window and certifies it.
fn land(
    cfg: &SolveConfig,
    mesh: &MeshDomain,
    correction: Correction,
    s_init: (f64, f64),
) -> Result<Trial> {
    let (target, direction, side) = match correction {
        Correction::Upper => (-0.5 * cfg.tol_root, Direction::UpperDominates, "upper"),
        _ => (0.5 * cfg.tol_root, Direction::LowerDominates, "lower"),
    };
    // The window is tested on the certified side of the CW interval.
    let certified_log = |t: &SpectralResult| match correction {
        Correction::Upper => t.cw_upper.ln(),
        _ => t.cw_lower.ln(),
    };
    let root = secant_search(
        |s| {
            let t = evaluate(cfg, mesh, s, correction)?;
            Ok((certified_log(&t.spectral), t))
        },
        s_init,
        cfg.s_floor(),
        target,
        0.5 * cfg.tol_root,
        cfg.max_secant,
    )?;
    let step = cfg.tol_root / root.slope.abs().max(f64::MIN_POSITIVE);
    let mut trial = root.payload;
    for _ in 0..=MAX_NUDGES {
        if verify_certificate(&trial.matrix, &trial.spectral.vector, direction, 0.0) {
            return Ok(trial);
        }
        let s = match correction {
            Correction::Upper => trial.s + step,
            _ => trial.s - step,
        };
        trial = evaluate(cfg, mesh, s, correction)?;
    }
    Err(Error::CertificateFailure {
        side,
        s: trial.s,
        retries: MAX_NUDGES,
    })
}

/// Certified bracket `[s_lower, s_upper]` around the dimension.
pub fn bracket_dimension(cfg: &SolveConfig) -> Result<DimensionBracket> {
    cfg.validate()?;
    let start = Instant::now();
    let mesh = cfg.mesh()?;
    let upper = land(cfg, &mesh, Correction::Upper, cfg.s_init)?;
    // r(A_s) <= r(B_s), so the lower root sits just left of the upper one.
    let floor = cfg.s_floor();
    let probe = (upper.s - 1e-3).max(0.5 * (floor + upper.s));
    let lower = land(cfg, &mesh, Correction::Lower, (probe, upper.s))?;
    let digits = match cfg.alphabet.kind() {
        AlphabetKind::CustomFinite(d) => Some(d.clone()),
        _ => None,
    };
    Ok(DimensionBracket {
        set: cfg.alphabet.label(),
        digits,
        n: cfg.n,
        h: mesh.h(),
        radius: cfg.radius.is_finite().then_some(cfg.radius),
        s_lower: lower.s,
        s_upper: upper.s,
        r_at_lower: lower.spectral.cw_lower,
        r_at_upper: upper.spectral.cw_upper,
        alpha_lower: lower.alpha,
        alpha_upper: upper.alpha,
        dof: mesh.len(),
        runtime_s: start.elapsed().as_secs_f64(),
        certificate_lower: lower.spectral.vector,
        certificate_upper: upper.spectral.vector,
    })
}

/// Alphabet `{1±i, 2±i, 3±i}` of the example with a known eigenfunction.
pub fn special_example_alphabet() -> Alphabet {
    let digits = (1..=3)
        .flat_map(|m| [(m as f64, -1.0), (m as f64, 1.0)])
        .collect();
    Alphabet::custom(digits).expect("valid alphabet")
}

/// Root of `log r(M_s) = 0` for the uncorrected degree-`d` collocation
/// matrix. No bound is claimed for the result.
pub fn solve_uncorrected(cfg: &SolveConfig, degree: u32, weights: WeightFamily) -> Result<f64> {
    cfg.validate()?;
    let mesh = cfg.mesh()?;
    let space = TensorSpace::new(&mesh, degree)?;
    let tol_eig = 1e-14;
    let root = secant_search(
        |s| {
            let m = space.assemble(&cfg.alphabet, cfg.radius, weights, s)?;
            let (lambda, _) = dominant_eigen_general(&m, tol_eig, cfg.max_power_iter)?;
            if !(lambda > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "dominant eigenvalue {lambda} at s = {s} is not positive"
                )));
            }
            Ok((lambda.ln(), ()))
        },
        cfg.s_init,
        cfg.s_floor(),
        0.0,
        1e-12,
        cfg.max_secant,
    );
    match root {
        Ok(r) => Ok(r.s),
        Err(e) => Err(e),
    }
}
