//! Digit alphabets and the Möbius maps `θ_b(z) = 1/(z + b)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for images that should lie in the closed upper half-plane.
pub const SYMMETRY_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AlphabetKind {
    /// `{m + ni : m >= 1, n ∈ Z}`
    I1,
    /// `{m + ni : m >= 1, n <= -1}`
    I2,
    /// `{m + ni : m ∈ {1, 2}, n ∈ {0, ±1, ±2}}`
    I3,
    CustomFinite(Vec<(f64, f64)>),
}

/// How images of the upper half mesh are brought back onto it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Symmetry {
    /// Closed under conjugation: images below the axis are reflected.
    ConjugationSymmetric,
    /// Every digit has `Im(b) <= -1`, so images already lie in `Im >= 0`.
    MapsToUpperHalf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Alphabet {
    kind: AlphabetKind,
    gamma: f64,
    symmetry: Symmetry,
    tau: f64,
}

impl Alphabet {
    pub fn i1() -> Self {
        Self {
            kind: AlphabetKind::I1,
            gamma: 1.0,
            symmetry: Symmetry::ConjugationSymmetric,
            tau: 1.0,
        }
    }

    pub fn i2() -> Self {
        Self {
            kind: AlphabetKind::I2,
            gamma: 1.0,
            symmetry: Symmetry::MapsToUpperHalf,
            tau: 1.0,
        }
    }

    pub fn i3() -> Self {
        Self {
            kind: AlphabetKind::I3,
            gamma: 1.0,
            symmetry: Symmetry::ConjugationSymmetric,
            tau: 0.0,
        }
    }

    /// A finite digit set. Every digit needs `Re(b) >= 1`, and the set must
    /// either be closed under conjugation or satisfy `Im(b) <= -1` throughout.
    pub fn custom(digits: Vec<(f64, f64)>) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::InvalidParameter("empty alphabet".into()));
        }
        if let Some(&(re, im)) = digits
            .iter()
            .find(|(re, im)| !(re.is_finite() && im.is_finite()) || *re < 1.0)
        {
            return Err(Error::InvalidParameter(format!(
                "digit {re}{im:+}i must satisfy Re(b) >= 1"
            )));
        }
        let mut digits = digits;
        sort_digits(&mut digits);
        digits.dedup();
        let closed = digits
            .iter()
            .all(|&(re, im)| digits.iter().any(|&(r2, i2)| r2 == re && i2 == -im));
        let symmetry = if closed {
            Symmetry::ConjugationSymmetric
        } else if digits.iter().all(|&(_, im)| im <= -1.0) {
            Symmetry::MapsToUpperHalf
        } else {
            return Err(Error::InvalidParameter(
                "custom alphabet must be conjugation-closed or have Im(b) <= -1 for every digit"
                    .into(),
            ));
        };
        let gamma = digits
            .iter()
            .map(|d| d.0)
            .fold(f64::INFINITY, f64::min);
        Ok(Self {
            kind: AlphabetKind::CustomFinite(digits),
            gamma,
            symmetry,
            tau: 0.0,
        })
    }

    pub fn kind(&self) -> &AlphabetKind {
        &self.kind
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self.kind, AlphabetKind::I1 | AlphabetKind::I2)
    }

    /// Short label used in reports.
    pub fn label(&self) -> String {
        match &self.kind {
            AlphabetKind::I1 => "I1".into(),
            AlphabetKind::I2 => "I2".into(),
            AlphabetKind::I3 => "I3".into(),
            AlphabetKind::CustomFinite(d) => format!("custom[{}]", d.len()),
        }
    }

    /// Digits with `|b| <= radius`, ordered by real then imaginary part.
    ///
    /// Finite alphabets accept `radius = f64::INFINITY`; the infinite sets
    /// need a finite radius.
    pub fn enumerate_truncated(&self, radius: f64) -> Result<Vec<Complex64>> {
        if radius.is_nan() || radius <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "truncation radius {radius} must be positive"
            )));
        }
        let r2 = radius * radius;
        let lattice = |neg_only: bool| -> Result<Vec<Complex64>> {
            if !radius.is_finite() {
                return Err(Error::InvalidParameter(
                    "infinite alphabets need a finite truncation radius".into(),
                ));
            }
            let top = radius.floor() as i64;
            let mut out = Vec::new();
            for m in 1..=top {
                let n_hi = if neg_only { -1 } else { top };
                for n in -top..=n_hi {
                    if ((m * m + n * n) as f64) <= r2 {
                        out.push(Complex64::new(m as f64, n as f64));
                    }
                }
            }
            Ok(out)
        };
        match &self.kind {
            AlphabetKind::I1 => lattice(false),
            AlphabetKind::I2 => lattice(true),
            AlphabetKind::I3 => Ok((1..=2)
                .flat_map(|m| (-2..=2).map(move |n| Complex64::new(m as f64, n as f64)))
                .filter(|b| b.norm_sqr() <= r2)
                .collect()),
            AlphabetKind::CustomFinite(d) => Ok(d
                .iter()
                .map(|&(re, im)| Complex64::new(re, im))
                .filter(|b| b.norm_sqr() <= r2)
                .collect()),
        }
    }
}

fn sort_digits(d: &mut [(f64, f64)]) {
    d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
}

/// `θ_b(z) = 1/(z + b)`.
#[inline]
pub fn apply_map(b: Complex64, z: Complex64) -> Complex64 {
    (z + b).inv()
}

/// `|θ_b'(z)|^s = |z + b|^{-2s}`.
#[inline]
pub fn weight(b: Complex64, z: Complex64, s: f64) -> f64 {
    (-s * (z + b).norm_sqr().ln()).exp()
}

/// Brings an image point back to the upper half mesh.
pub fn fold_to_upper(x: f64, y: f64, symmetry: Symmetry) -> Result<(f64, f64)> {
    match symmetry {
        Symmetry::ConjugationSymmetric => Ok((x, y.abs())),
        Symmetry::MapsToUpperHalf if y < -SYMMETRY_EPS => Err(Error::SymmetryViolation { x, y }),
        Symmetry::MapsToUpperHalf => Ok((x, y)),
    }
}

/// A finite composition `θ_{b1} ∘ θ_{b2} ∘ ... ∘ θ_{bn}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Word(Vec<Complex64>);

impl Word {
    pub fn new(digits: Vec<Complex64>) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::InvalidParameter("a word needs at least one digit".into()));
        }
        Ok(Self(digits))
    }

    pub fn digits(&self) -> &[Complex64] {
        &self.0
    }
}

/// Continuant form `(A_{n-1} z + A_n) / (B_{n-1} z + B_n)` of a word.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    pub a_prev: Complex64,
    pub a: Complex64,
    pub b_prev: Complex64,
    pub b: Complex64,
}

impl Mobius {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.a_prev * z + self.a) / (self.b_prev * z + self.b)
    }

    pub fn det(&self) -> Complex64 {
        self.a_prev * self.b - self.a * self.b_prev
    }

    /// `|d/dz|^s = |B_{n-1}|^{-2s} |z + B_n/B_{n-1}|^{-2s}`.
    pub fn derivative_power(&self, z: Complex64, s: f64) -> f64 {
        let q = self.b / self.b_prev;
        (-s * (self.b_prev.norm_sqr() * (z + q).norm_sqr()).ln()).exp()
    }
}

/// Continuant recursion `A_{j+1} = A_{j-1} + b_{j+1} A_j` (same for `B`),
/// starting from `A_0 = 0, A_1 = 1, B_0 = 1, B_1 = b_1`.
pub fn compose_word(word: &Word) -> Mobius {
    let d = word.digits();
    let mut m = Mobius {
        a_prev: Complex64::new(0.0, 0.0),
        a: Complex64::new(1.0, 0.0),
        b_prev: Complex64::new(1.0, 0.0),
        b: d[0],
    };
    for &bj in &d[1..] {
        m = Mobius {
            a_prev: m.a,
            a: m.a_prev + bj * m.a,
            b_prev: m.b,
            b: m.b_prev + bj * m.b,
        };
    }
    m
}
