//! Square mesh domains covering the (half) disk `|z - 1/2| <= 1/2`.
//!
//! A mesh of resolution `N` uses squares of width `h = 1/N` with integer
//! corner indices `(j, k)`, i.e. `[jh, (j+1)h] x [kh, (k+1)h]`. A square is
//! kept when it meets the interior of the region. All geometry is decided in
//! integer arithmetic, so the point set and its ordering are exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack (in units of one square width) allowed when placing a point on a
/// square. Absorbs rounding in the complex division that produced the point.
const LOCATE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    /// `D+ = {(x, y) : (x - 1/2)^2 + y^2 <= 1/4, y >= 0}`
    HalfDisk,
    /// `D = {(x, y) : (x - 1/2)^2 + y^2 <= 1/4}`
    FullDisk,
}

/// Dictionary-ordered set of lattice nodes `(i/M, l/M)` with a dense index.
///
/// For bilinear meshes `M = N`; the tensor-product Lagrange spaces of degree
/// `d` use `M = d N`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    scale: i64,
    nodes: Vec<(i64, i64)>,
    x_min: i64,
    y_min: i64,
    width: usize,
    height: usize,
    grid: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl NodeSet {
    /// Builds a node set from lattice coordinates. Duplicates are merged and
    /// the result is sorted in dictionary order.
    pub fn from_lattice(scale: i64, mut nodes: Vec<(i64, i64)>) -> Self {
        nodes.sort_unstable();
        nodes.dedup();
        let x_min = nodes.iter().map(|p| p.0).min().unwrap_or(0);
        let x_max = nodes.iter().map(|p| p.0).max().unwrap_or(0);
        let y_min = nodes.iter().map(|p| p.1).min().unwrap_or(0);
        let y_max = nodes.iter().map(|p| p.1).max().unwrap_or(0);
        let width = (x_max - x_min + 1) as usize;
        let height = (y_max - y_min + 1) as usize;
        let mut grid = vec![ABSENT; width * height];
        for (ord, &(i, l)) in nodes.iter().enumerate() {
            grid[(i - x_min) as usize * height + (l - y_min) as usize] = ord as u32;
        }
        Self {
            scale,
            nodes,
            x_min,
            y_min,
            width,
            height,
            grid,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Lattice denominator `M`: node `(i, l)` sits at `(i/M, l/M)`.
    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn lattice(&self) -> &[(i64, i64)] {
        &self.nodes
    }

    /// Floating coordinates of node `ord`.
    pub fn coords(&self, ord: usize) -> (f64, f64) {
        let (i, l) = self.nodes[ord];
        let m = self.scale as f64;
        (i as f64 / m, l as f64 / m)
    }

    pub fn iter_coords(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.nodes.len()).map(|ord| self.coords(ord))
    }

    /// Ordinal of the lattice node `(i, l)`, if present.
    pub fn index_of(&self, i: i64, l: i64) -> Option<usize> {
        let dx = i - self.x_min;
        let dy = l - self.y_min;
        if dx < 0 || dy < 0 || dx as usize >= self.width || dy as usize >= self.height {
            return None;
        }
        match self.grid[dx as usize * self.height + dy as usize] {
            ABSENT => None,
            ord => Some(ord as usize),
        }
    }
}

/// Bilinear stencil of a point inside one mesh square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilWeights {
    /// Corner ordinals in dictionary order: `(j,k), (j,k+1), (j+1,k), (j+1,k+1)`.
    pub corners: [usize; 4],
    pub weights: [f64; 4],
    /// `(x_{j+1} - x)(x - x_j) + (y_{k+1} - y)(y - y_k)`.
    pub bracket: f64,
}

/// Position of a point relative to the square that contains it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalPoint {
    pub square: (i64, i64),
    /// Local coordinates in `[0, 1]`.
    pub tx: f64,
    pub ty: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshDomain {
    n: i64,
    h: f64,
    region: Region,
    squares: Vec<(i64, i64)>,
    k_min: i64,
    k_count: usize,
    square_present: Vec<bool>,
    points: NodeSet,
    origin_index: usize,
}

impl MeshDomain {
    /// Builds the union of the `h = 1/N` squares that meet the interior of
    /// `region`.
    pub fn build(n: i64, region: Region) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::InvalidResolution(n));
        }
        let c = n / 2;
        let (k_min, k_max) = match region {
            Region::HalfDisk => (0, c - 1),
            Region::FullDisk => (-c, c - 1),
        };
        let k_count = (k_max - k_min + 1) as usize;
        let mut squares = Vec::new();
        let mut square_present = vec![false; n as usize * k_count];
        for j in 0..n {
            for k in k_min..=k_max {
                if square_meets_open_disk(j, k, c) {
                    squares.push((j, k));
                    square_present[j as usize * k_count + (k - k_min) as usize] = true;
                }
            }
        }
        let corners = squares
            .iter()
            .flat_map(|&(j, k)| [(j, k), (j, k + 1), (j + 1, k), (j + 1, k + 1)])
            .collect();
        let points = NodeSet::from_lattice(n, corners);
        let origin_index = points
            .index_of(0, 0)
            .expect("origin is a corner of the first square column");
        Ok(Self {
            n,
            h: 1.0 / n as f64,
            region,
            squares,
            k_min,
            k_count,
            square_present,
            points,
            origin_index,
        })
    }

    pub fn resolution(&self) -> i64 {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn region(&self) -> Region {
        self.region
    }

    pub fn squares(&self) -> &[(i64, i64)] {
        &self.squares
    }

    pub fn points(&self) -> &NodeSet {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, ord: usize) -> (f64, f64) {
        self.points.coords(ord)
    }

    pub fn origin_index(&self) -> usize {
        self.origin_index
    }

    pub fn has_square(&self, j: i64, k: i64) -> bool {
        if j < 0 || j >= self.n || k < self.k_min || k >= self.k_min + self.k_count as i64 {
            return false;
        }
        self.square_present[j as usize * self.k_count + (k - self.k_min) as usize]
    }

    /// Square containing `(x, y)`: the floor square when present, otherwise
    /// the first present neighbour whose closed square holds the point.
    pub fn locate_square(&self, x: f64, y: f64) -> Result<(i64, i64)> {
        self.locate(x, y).map(|p| p.square)
    }

    pub fn locate(&self, x: f64, y: f64) -> Result<LocalPoint> {
        let fx = x * self.n as f64;
        let fy = y * self.n as f64;
        if !(fx.is_finite() && fy.is_finite()) {
            return Err(Error::OutOfDomain { x, y });
        }
        let j0 = fx.floor() as i64;
        let k0 = fy.floor() as i64;
        const ORDER: [(i64, i64); 9] = [
            (0, 0),
            (-1, 0),
            (0, -1),
            (-1, -1),
            (1, 0),
            (0, 1),
            (1, 1),
            (1, -1),
            (-1, 1),
        ];
        for (dj, dk) in ORDER {
            let (j, k) = (j0 + dj, k0 + dk);
            if !self.has_square(j, k) {
                continue;
            }
            let tx = fx - j as f64;
            let ty = fy - k as f64;
            let inside = |t: f64| (-LOCATE_SLACK..=1.0 + LOCATE_SLACK).contains(&t);
            if inside(tx) && inside(ty) {
                return Ok(LocalPoint {
                    square: (j, k),
                    tx: tx.clamp(0.0, 1.0),
                    ty: ty.clamp(0.0, 1.0),
                });
            }
        }
        Err(Error::OutOfDomain { x, y })
    }

    pub fn bilinear_weights(&self, x: f64, y: f64) -> Result<StencilWeights> {
        let LocalPoint {
            square: (j, k),
            tx,
            ty,
        } = self.locate(x, y)?;
        let corner = |a: i64, b: i64| {
            self.points
                .index_of(a, b)
                .expect("corners of a mesh square are mesh points")
        };
        let (sx, sy) = (1.0 - tx, 1.0 - ty);
        Ok(StencilWeights {
            corners: [
                corner(j, k),
                corner(j, k + 1),
                corner(j + 1, k),
                corner(j + 1, k + 1),
            ],
            weights: [sx * sy, sx * ty, tx * sy, tx * ty],
            bracket: self.h * self.h * (tx * sx + ty * sy),
        })
    }
}

/// Whether `[j, j+1] x [k, k+1]` meets the open disk of radius `c` centred at
/// `(c, 0)` (all in units of `h`). For the half disk the caller restricts to
/// `k >= 0`, so the square also meets `y > 0`.
fn square_meets_open_disk(j: i64, k: i64, c: i64) -> bool {
    let cx = c.clamp(j, j + 1) - c;
    let cy = 0i64.clamp(k, k + 1);
    cx * cx + cy * cy < c * c
}
