//! Continuous piecewise tensor-product Lagrange spaces of degree `d` on a
//! mesh, and the plain collocation matrix of the transfer operator on them.
//!
//! Each mesh square carries the uniform `(d+1) x (d+1)` node grid; nodes on
//! shared edges and corners are shared, so the nodes form a subset of the
//! lattice of spacing `h/d`. These matrices have signed entries for `d >= 2`
//! and come with no error correction.

use num_complex::Complex64;

use crate::assembly::{build_rows, folded_image, SparseRowMatrix, WeightFamily};
use crate::error::{Error, Result};
use crate::maps::Alphabet;
use crate::mesh::{MeshDomain, NodeSet};

pub const MAX_DEGREE: u32 = 4;

/// Values of the `d + 1` Lagrange basis polynomials on the nodes
/// `0, 1/d, ..., 1` at local coordinate `t`.
pub fn lagrange_basis(degree: u32, t: f64) -> Vec<f64> {
    let d = degree as i64;
    let dt = degree as f64 * t;
    (0..=d)
        .map(|a| {
            (0..=d)
                .filter(|&m| m != a)
                .fold(1.0, |acc, m| acc * (dt - m as f64) / (a - m) as f64)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorSpace {
    mesh: MeshDomain,
    degree: u32,
    nodes: NodeSet,
}

impl TensorSpace {
    pub fn new(mesh: &MeshDomain, degree: u32) -> Result<Self> {
        if !(1..=MAX_DEGREE).contains(&degree) {
            return Err(Error::InvalidParameter(format!(
                "degree {degree} outside 1..={MAX_DEGREE}"
            )));
        }
        let d = degree as i64;
        let mut lattice = Vec::with_capacity(mesh.squares().len() * ((d + 1) * (d + 1)) as usize);
        for &(j, k) in mesh.squares() {
            for a in 0..=d {
                for c in 0..=d {
                    lattice.push((j * d + a, k * d + c));
                }
            }
        }
        Ok(Self {
            mesh: mesh.clone(),
            degree,
            nodes: NodeSet::from_lattice(mesh.resolution() * d, lattice),
        })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn mesh(&self) -> &MeshDomain {
        &self.mesh
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    /// Number of degrees of freedom.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node ordinals and basis values of every basis function that can be
    /// nonzero at `(x, y)`, in local dictionary order.
    pub fn basis_at(&self, x: f64, y: f64) -> Result<Vec<(usize, f64)>> {
        let p = self.mesh.locate(x, y)?;
        let d = self.degree as i64;
        let lx = lagrange_basis(self.degree, p.tx);
        let ly = lagrange_basis(self.degree, p.ty);
        let (j, k) = p.square;
        let mut out = Vec::with_capacity(lx.len() * ly.len());
        for (a, &wx) in lx.iter().enumerate() {
            for (c, &wy) in ly.iter().enumerate() {
                let ord = self
                    .nodes
                    .index_of(j * d + a as i64, k * d + c as i64)
                    .expect("nodes of a mesh square belong to the space");
                out.push((ord, wx * wy));
            }
        }
        Ok(out)
    }

    /// Interpolates `f` on the nodes.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        self.nodes.iter_coords().map(|(x, y)| f(x, y)).collect()
    }

    /// Collocation matrix of `Σ_{|b| <= radius} g_b(z)^s f(θ_b(z))`.
    pub fn assemble(
        &self,
        alphabet: &Alphabet,
        radius: f64,
        weights: WeightFamily,
        s: f64,
    ) -> Result<SparseRowMatrix> {
        if !(s > alphabet.tau() && s.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "s = {s} must exceed the summability threshold {}",
                alphabet.tau()
            )));
        }
        let digits = alphabet.enumerate_truncated(radius)?;
        let symmetry = alphabet.symmetry();
        let region = self.mesh.region();
        build_rows(self.len(), |i, acc| {
            let (x, y) = self.nodes.coords(i);
            let z = Complex64::new(x, y);
            for &b in &digits {
                let (px, py) = folded_image(b, z, region, symmetry)?;
                let factor = weights.eval(b, z, s);
                for (col, w) in self.basis_at(px, py)? {
                    if w != 0.0 {
                        acc.add(col, factor * w);
                    }
                }
            }
            Ok(())
        })
    }
}
