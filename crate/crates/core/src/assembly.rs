//! Collocation matrices of the truncated transfer operator
//! `(L f)(z) = Σ_{|b| <= R} g_b(z)^s f(θ_b(z)) + α f(0)` on a mesh.
//!
//! Row `i` collocates at mesh point `z_i`: each digit scatters its weight
//! onto the interpolation stencil of the (folded) image point. The lower and
//! upper matrices scale each digit's contribution by `1 - err1` and
//! `1 + err2` respectively, which makes them bracket the operator's spectral
//! radius.
//!
//! Rows are independent and may be built on any number of threads; within a
//! row the digits are visited in canonical order, so the result does not
//! depend on scheduling.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::ErrFactors;
use crate::error::{Error, Result};
use crate::maps::{fold_to_upper, Alphabet, Symmetry};
use crate::mesh::{MeshDomain, Region};

/// Row-compressed sparse matrix. Columns within a row are strictly
/// increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRowMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl SparseRowMatrix {
    /// Builds a square matrix from per-row entry lists. Duplicate columns
    /// are summed in the order given.
    pub fn from_rows(n: usize, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        if rows.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: rows.len(),
            });
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for mut row in rows {
            if let Some(&(c, _)) = row.iter().find(|(c, _)| *c >= n) {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: c + 1,
                });
            }
            row.sort_by_key(|&(c, _)| c);
            let start = cols.len();
            for (c, v) in row {
                if cols.len() > start && *cols.last().unwrap() == c as u32 {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(c as u32);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Ok(Self {
            n,
            row_ptr,
            cols,
            vals,
        })
    }

    fn from_compressed(n: usize, rows: Vec<Vec<(u32, f64)>>) -> Self {
        let nnz = rows.iter().map(Vec::len).sum();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.cols[r.clone()], &self.vals[r])
    }

    /// Stored value at `(i, j)`, zero when absent.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&(j as u32)) {
            Ok(p) => vals[p],
            Err(_) => 0.0,
        }
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.row(i).1.iter().sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.vals.iter().all(|&v| v >= 0.0)
    }

    /// `(row, col, value)` in storage order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (c, v) = self.row(i);
            c.iter().zip(v).map(move |(&c, &v)| (i, c as usize, v))
        })
    }

    /// `y = M x`, each row summed in stored order.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.n];
        self.apply_into(x, &mut y)?;
        Ok(y)
    }

    pub fn apply_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        if y.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: y.len(),
            });
        }
        y.par_iter_mut().enumerate().with_min_len(256).for_each(|(i, yi)| {
            let (cols, vals) = self.row(i);
            *yi = cols
                .iter()
                .zip(vals)
                .fold(0.0, |acc, (&c, &v)| acc + v * x[c as usize]);
        });
        Ok(())
    }
}

/// Which interpolation-error correction to apply to every digit term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Correction {
    /// Scale by `1 - err1`: the matrix `A_s`.
    Lower,
    /// Scale by `1 + err2`: the matrix `B_s`.
    Upper,
    /// Plain collocation: the matrix `M_s`.
    None,
}

/// Per-digit weight `g_b(z)` raised to the power `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightFamily {
    /// `g_b(z) = |z + b|^{-2}`, i.e. `|θ_b'(z)|`.
    MobiusDerivative,
    /// `g_b(z) = (1/6) |(z+b+1)/(z+b)|^2 |1/(z+1)|^2`, whose operator at
    /// `s = 1` fixes `|1/(z+1)|^2`.
    SpecialExample,
}

impl WeightFamily {
    #[inline]
    pub fn eval(self, b: Complex64, z: Complex64, s: f64) -> f64 {
        let w = z + b;
        match self {
            WeightFamily::MobiusDerivative => (-s * w.norm_sqr().ln()).exp(),
            WeightFamily::SpecialExample => {
                let g = (w + 1.0).norm_sqr() / w.norm_sqr() / (z + 1.0).norm_sqr() / 6.0;
                g.powf(s)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec {
    pub alphabet: Alphabet,
    pub s: f64,
    /// Truncation radius; `f64::INFINITY` keeps every digit of a finite set.
    pub radius: f64,
    /// Rank-one weight on `f(0)`.
    pub alpha: f64,
    pub correction: Correction,
    pub weights: WeightFamily,
}

impl OperatorSpec {
    pub fn new(alphabet: Alphabet, s: f64, radius: f64, alpha: f64, correction: Correction) -> Self {
        Self {
            alphabet,
            s,
            radius,
            alpha,
            correction,
            weights: WeightFamily::MobiusDerivative,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.s > self.alphabet.tau() && self.s.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "s = {} must exceed the summability threshold {}",
                self.s,
                self.alphabet.tau()
            )));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "alpha = {} must be a nonnegative real",
                self.alpha
            )));
        }
        if self.correction != Correction::None && self.weights != WeightFamily::MobiusDerivative {
            return Err(Error::InvalidParameter(
                "error-corrected matrices are only defined for Möbius derivative weights".into(),
            ));
        }
        Ok(())
    }
}

/// Image of `z` under `θ_b`, folded back onto the mesh region.
#[inline]
pub(crate) fn folded_image(
    b: Complex64,
    z: Complex64,
    region: Region,
    symmetry: Symmetry,
) -> Result<(f64, f64)> {
    let w = z + b;
    let d = w.norm_sqr();
    let (x, y) = (w.re / d, -w.im / d);
    match region {
        Region::HalfDisk => fold_to_upper(x, y, symmetry),
        Region::FullDisk => Ok((x, y)),
    }
}

/// Dense row accumulator reused across the rows handled by one worker.
pub(crate) struct RowScratch {
    buf: Vec<f64>,
    seen: Vec<bool>,
    touched: Vec<u32>,
}

impl RowScratch {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            buf: vec![0.0; n],
            seen: vec![false; n],
            touched: Vec::new(),
        }
    }

    #[inline]
    pub(crate) fn add(&mut self, col: usize, v: f64) {
        if !self.seen[col] {
            self.seen[col] = true;
            self.touched.push(col as u32);
        }
        self.buf[col] += v;
    }

    fn drain(&mut self) -> Vec<(u32, f64)> {
        self.touched.sort_unstable();
        let out = self
            .touched
            .iter()
            .map(|&c| {
                self.seen[c as usize] = false;
                (c, std::mem::take(&mut self.buf[c as usize]))
            })
            .collect();
        self.touched.clear();
        out
    }
}

/// Builds one matrix row per node with `fill`, in parallel.
pub(crate) fn build_rows<F>(n: usize, fill: F) -> Result<SparseRowMatrix>
where
    F: Fn(usize, &mut RowScratch) -> Result<()> + Sync,
{
    let rows: Vec<Vec<(u32, f64)>> = (0..n)
        .into_par_iter()
        .with_min_len(16)
        .map_init(
            || RowScratch::new(n),
            |scratch, i| {
                fill(i, scratch)?;
                Ok(scratch.drain())
            },
        )
        .collect::<Result<_>>()?;
    Ok(SparseRowMatrix::from_compressed(n, rows))
}

/// Assembles `A_s`, `B_s` or `M_s` for the bilinear space on `mesh`.
pub fn assemble(mesh: &MeshDomain, spec: &OperatorSpec) -> Result<SparseRowMatrix> {
    spec.validate()?;
    let digits = spec.alphabet.enumerate_truncated(spec.radius)?;
    let factors = match spec.correction {
        Correction::None => None,
        _ => Some(ErrFactors::new(spec.s, spec.alphabet.gamma(), mesh.h())?),
    };
    let symmetry = spec.alphabet.symmetry();
    let region = mesh.region();
    let origin = mesh.origin_index();
    build_rows(mesh.len(), |i, acc| {
        let (x, y) = mesh.point(i);
        let z = Complex64::new(x, y);
        for &b in &digits {
            let (px, py) = folded_image(b, z, region, symmetry)?;
            let st = mesh.bilinear_weights(px, py)?;
            let mut factor = spec.weights.eval(b, z, spec.s);
            if let Some(f) = &factors {
                let (err1, err2) = f.values(st.bracket)?;
                factor *= match spec.correction {
                    Correction::Lower => 1.0 - err1,
                    Correction::Upper => 1.0 + err2,
                    Correction::None => 1.0,
                };
            }
            for (&c, &w) in st.corners.iter().zip(&st.weights) {
                if w != 0.0 {
                    acc.add(c, factor * w);
                }
            }
        }
        if spec.alpha > 0.0 {
            acc.add(origin, spec.alpha);
        }
        Ok(())
    })
}
