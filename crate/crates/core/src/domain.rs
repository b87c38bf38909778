//! Box grids in one or two dimensions, nodal fields `u: Ω → R^d`, forward
//! difference gradients and midpoint quadrature.
//!
//! Nodes are numbered row-major with the first axis fastest. Cell `c` has
//! base node `(i, j)`; its gradient uses the forward differences
//! `(u(i+1, j) - u(i, j)) / h₁` and `(u(i, j+1) - u(i, j)) / h₂`, and its
//! value at the cell center is the mean of its `2^N` corners.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{fabs, sqrt, NeumaierSum};

/// A point of `R^N`, `N ≤ 2`; the unused coordinate is zero.
pub type Point = [f64; 2];

/// Largest supported codomain dimension `d`.
pub const MAX_CODOMAIN: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    lower: [f64; 2],
    upper: [f64; 2],
    cells: [usize; 2],
}

impl Grid {
    pub fn new(lower: &[f64], upper: &[f64], cells: &[usize]) -> Result<Self> {
        let dim = lower.len();
        if !(1..=2).contains(&dim) || upper.len() != dim || cells.len() != dim {
            return Err(Error::InvalidArgument(alloc::format!(
                "grid needs matching lower/upper/cells of length 1 or 2, got {}/{}/{}",
                lower.len(),
                upper.len(),
                cells.len()
            )));
        }
        let mut grid = Grid {
            dim,
            lower: [0.0; 2],
            upper: [1.0; 2],
            cells: [1; 2],
        };
        for axis in 0..dim {
            if !(lower[axis].is_finite() && upper[axis].is_finite()) || upper[axis] <= lower[axis] {
                return Err(Error::InvalidArgument(alloc::format!(
                    "axis {axis}: empty or non-finite extent [{}, {}]",
                    lower[axis],
                    upper[axis]
                )));
            }
            if cells[axis] < 2 {
                return Err(Error::InvalidArgument(alloc::format!(
                    "axis {axis}: need at least 2 cells, got {}",
                    cells[axis]
                )));
            }
            grid.lower[axis] = lower[axis];
            grid.upper[axis] = upper[axis];
            grid.cells[axis] = cells[axis];
        }
        Ok(grid)
    }

    pub fn interval(a: f64, b: f64, cells: usize) -> Result<Self> {
        Self::new(&[a], &[b], &[cells])
    }

    pub fn rectangle(lower: [f64; 2], upper: [f64; 2], cells: [usize; 2]) -> Result<Self> {
        Self::new(&lower, &upper, &cells)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower[..self.dim]
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper[..self.dim]
    }

    pub fn cells_per_axis(&self) -> &[usize] {
        &self.cells[..self.dim]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.upper[axis] - self.lower[axis]) / self.cells[axis] as f64
    }

    pub fn cell_measure(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing(a)).product()
    }

    /// `|Ω|`, computed from the extent rather than by summing cells.
    pub fn measure(&self) -> f64 {
        (0..self.dim)
            .map(|a| self.upper[a] - self.lower[a])
            .product()
    }

    pub fn diameter(&self) -> f64 {
        sqrt(
            (0..self.dim)
                .map(|a| {
                    let w = self.upper[a] - self.lower[a];
                    w * w
                })
                .sum(),
        )
    }

    pub fn cell_count(&self) -> usize {
        self.cells[..self.dim].iter().product()
    }

    pub fn nodes_per_axis(&self, axis: usize) -> usize {
        self.cells[axis] + 1
    }

    pub fn node_count(&self) -> usize {
        (0..self.dim).map(|a| self.nodes_per_axis(a)).product()
    }

    fn cell_multi_index(&self, cell: usize) -> [usize; 2] {
        [cell % self.cells[0], cell / self.cells[0]]
    }

    fn node_multi_index(&self, node: usize) -> [usize; 2] {
        let n0 = self.nodes_per_axis(0);
        [node % n0, node / n0]
    }

    fn node_index(&self, idx: [usize; 2]) -> usize {
        idx[0] + idx[1] * self.nodes_per_axis(0)
    }

    pub fn cell_center(&self, cell: usize) -> Point {
        let idx = self.cell_multi_index(cell);
        let mut p = [0.0; 2];
        for (a, coord) in p.iter_mut().enumerate().take(self.dim) {
            *coord = self.lower[a] + (idx[a] as f64 + 0.5) * self.spacing(a);
        }
        p
    }

    pub fn cell_centers(&self) -> Vec<Point> {
        (0..self.cell_count())
            .map(|c| self.cell_center(c))
            .collect()
    }

    pub fn node_coords(&self, node: usize) -> Point {
        let idx = self.node_multi_index(node);
        let mut p = [0.0; 2];
        for (a, coord) in p.iter_mut().enumerate().take(self.dim) {
            *coord = if idx[a] == self.cells[a] {
                self.upper[a]
            } else {
                self.lower[a] + idx[a] as f64 * self.spacing(a)
            };
        }
        p
    }

    pub fn is_boundary_node(&self, node: usize) -> bool {
        let idx = self.node_multi_index(node);
        (0..self.dim).any(|a| idx[a] == 0 || idx[a] == self.cells[a])
    }

    /// Corner nodes of a cell: base node first, then `+e₁`, and in 2D `+e₂`
    /// and `+e₁+e₂`.
    pub fn cell_corners(&self, cell: usize) -> [usize; 4] {
        let [i, j] = self.cell_multi_index(cell);
        let base = self.node_index([i, j]);
        if self.dim == 1 {
            [base, base + 1, usize::MAX, usize::MAX]
        } else {
            let up = self.node_index([i, j + 1]);
            [base, base + 1, up, up + 1]
        }
    }

    pub fn corners_per_cell(&self) -> usize {
        1 << self.dim
    }

    fn check_cell_field(&self, g: &[f64]) -> Result<()> {
        if g.len() != self.cell_count() {
            return Err(Error::InvalidArgument(alloc::format!(
                "cell field has {} entries, grid has {} cells",
                g.len(),
                self.cell_count()
            )));
        }
        Ok(())
    }

    /// Midpoint rule `Σ g(cell) · |cell|`; `+∞` if any cell is `+∞`.
    pub fn integrate(&self, g: &[f64]) -> Result<f64> {
        self.check_cell_field(g)?;
        let mut acc = NeumaierSum::default();
        let mut infinite = false;
        for &v in g {
            if v.is_nan() || v == f64::NEG_INFINITY {
                return Err(Error::NonFinite {
                    what: "integrand field",
                });
            }
            if v == f64::INFINITY {
                infinite = true;
            } else {
                acc.add(v);
            }
        }
        if infinite {
            return Ok(f64::INFINITY);
        }
        Ok(acc.total() * self.cell_measure())
    }

    /// Discrete essential supremum: the maximum over cells.
    pub fn sup_cellwise(&self, g: &[f64]) -> Result<f64> {
        self.check_cell_field(g)?;
        let mut max = f64::NEG_INFINITY;
        for &v in g {
            if v.is_nan() {
                return Err(Error::NonFinite { what: "sup field" });
            }
            max = max.max(v);
        }
        Ok(max)
    }

    /// Evaluate `f` at every cell center.
    pub fn sample_cells(&self, mut f: impl FnMut(Point) -> f64) -> Vec<f64> {
        (0..self.cell_count())
            .map(|c| f(self.cell_center(c)))
            .collect()
    }
}

/// Nodal values of `u: Ω → R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    codomain_dim: usize,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, codomain_dim: usize, values: Vec<f64>) -> Result<Self> {
        if codomain_dim == 0 || codomain_dim > MAX_CODOMAIN {
            return Err(Error::InvalidArgument(alloc::format!(
                "codomain dimension {codomain_dim} not in 1..={MAX_CODOMAIN}"
            )));
        }
        if values.len() != grid.node_count() * codomain_dim {
            return Err(Error::InvalidArgument(alloc::format!(
                "expected {} nodal values, got {}",
                grid.node_count() * codomain_dim,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "grid function values",
            });
        }
        Ok(GridFunction {
            grid,
            codomain_dim,
            values,
        })
    }

    pub fn zeros(grid: Grid, codomain_dim: usize) -> Result<Self> {
        Self::new(
            grid,
            codomain_dim,
            vec![0.0; grid.node_count() * codomain_dim],
        )
    }

    /// Fill from `f(x, out)` where `out` has length `d`.
    pub fn from_fn(
        grid: Grid,
        codomain_dim: usize,
        mut f: impl FnMut(Point, &mut [f64]),
    ) -> Result<Self> {
        let mut values = vec![0.0; grid.node_count() * codomain_dim];
        for (node, chunk) in values.chunks_mut(codomain_dim).enumerate() {
            f(grid.node_coords(node), chunk);
        }
        Self::new(grid, codomain_dim, values)
    }

    /// Scalar field from a closure.
    pub fn scalar(grid: Grid, mut f: impl FnMut(Point) -> f64) -> Result<Self> {
        Self::from_fn(grid, 1, |x, out| out[0] = f(x))
    }

    /// `u(x) = A·x + b` with `A` stored row-major as `d × N`.
    pub fn affine(grid: Grid, a: &[f64], b: &[f64]) -> Result<Self> {
        let n = grid.dim();
        let d = b.len();
        if a.len() != n * d {
            return Err(Error::InvalidArgument(alloc::format!(
                "affine matrix needs {} entries, got {}",
                n * d,
                a.len()
            )));
        }
        Self::from_fn(grid, d, |x, out| {
            for k in 0..d {
                out[k] = b[k] + (0..n).map(|j| a[k * n + j] * x[j]).sum::<f64>();
            }
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn codomain_dim(&self) -> usize {
        self.codomain_dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn node_value(&self, node: usize) -> &[f64] {
        let d = self.codomain_dim;
        &self.values[node * d..(node + 1) * d]
    }

    /// Mean of the cell's corner values.
    pub fn cell_value(&self, cell: usize) -> [f64; MAX_CODOMAIN] {
        let corners = self.grid.cell_corners(cell);
        let count = self.grid.corners_per_cell();
        let mut out = [0.0; MAX_CODOMAIN];
        for &node in &corners[..count] {
            for (k, o) in out.iter_mut().enumerate().take(self.codomain_dim) {
                *o += self.values[node * self.codomain_dim + k];
            }
        }
        for o in out.iter_mut() {
            *o /= count as f64;
        }
        out
    }

    /// Pointwise Euclidean magnitude at cell centers.
    pub fn cell_magnitudes(&self) -> Vec<f64> {
        (0..self.grid.cell_count())
            .map(|c| {
                let v = self.cell_value(c);
                sqrt(v[..self.codomain_dim].iter().map(|x| x * x).sum())
            })
            .collect()
    }

    /// `∫ |u - v|` on the cell-center lattice.
    pub fn l1_distance(&self, other: &GridFunction) -> Result<f64> {
        if self.grid != other.grid || self.codomain_dim != other.codomain_dim {
            return Err(Error::GridMismatch);
        }
        let d = self.codomain_dim;
        let diffs: Vec<f64> = (0..self.grid.cell_count())
            .map(|c| {
                let a = self.cell_value(c);
                let b = other.cell_value(c);
                sqrt((0..d).map(|k| (a[k] - b[k]) * (a[k] - b[k])).sum())
            })
            .collect();
        self.grid.integrate(&diffs)
    }

    /// Largest absolute nodal difference.
    pub fn max_abs_difference(&self, other: &GridFunction) -> Result<f64> {
        if self.grid != other.grid || self.codomain_dim != other.codomain_dim {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| fabs(a - b))
            .fold(0.0, f64::max))
    }
}

/// Per-cell `d × N` matrices of forward differences, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    grid: Grid,
    codomain_dim: usize,
    values: Vec<f64>,
}

impl GradientField {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn codomain_dim(&self) -> usize {
        self.codomain_dim
    }

    /// Entries per cell, `N·d`.
    pub fn block_len(&self) -> usize {
        self.grid.dim() * self.codomain_dim
    }

    pub fn cell(&self, cell: usize) -> &[f64] {
        let b = self.block_len();
        &self.values[cell * b..(cell + 1) * b]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Frobenius norm per cell.
    pub fn magnitudes(&self) -> Vec<f64> {
        (0..self.grid.cell_count())
            .map(|c| sqrt(self.cell(c).iter().map(|x| x * x).sum()))
            .collect()
    }
}

/// Forward differences of nodal values, scaled by the spacing.
pub fn gradient(u: &GridFunction) -> GradientField {
    let grid = u.grid;
    let n = grid.dim();
    let d = u.codomain_dim;
    let mut values = vec![0.0; grid.cell_count() * n * d];
    for (cell, block) in values.chunks_mut(n * d).enumerate() {
        forward_differences(&grid, d, cell, |node, k| u.values[node * d + k], block);
    }
    GradientField {
        grid,
        codomain_dim: d,
        values,
    }
}

/// Fill `out` (`d × N`, row-major) with the forward differences of one cell.
pub(crate) fn forward_differences(
    grid: &Grid,
    d: usize,
    cell: usize,
    value: impl Fn(usize, usize) -> f64,
    out: &mut [f64],
) {
    let n = grid.dim();
    let corners = grid.cell_corners(cell);
    let base = corners[0];
    // +e₁ is corner 1, +e₂ is corner 2
    let neighbours = [corners[1], corners[2]];
    for k in 0..d {
        for axis in 0..n {
            out[k * n + axis] = (value(neighbours[axis], k) - value(base, k)) / grid.spacing(axis);
        }
    }
}
