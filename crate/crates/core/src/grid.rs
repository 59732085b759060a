//! Tensor-product grids on boxes in ℝᴺ, `N ∈ {1, 2, 3}`.
//!
//! Unknowns live on nodes; differences and fluxes live on the edges joining
//! neighbouring nodes along one axis. Quadrature uses the dual-cell (nodal
//! control volume) weights, so boundary nodes carry half a cell per boundary
//! axis and the weights of all nodes sum to `|Ω|`. Edge weights are chosen so
//! that [`divergence`] is exactly the negative adjoint of [`forward_diff`] on
//! fields that vanish on the boundary.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

#[derive(Debug, PartialEq)]
struct GridData {
    dim: usize,
    cells: [usize; MAX_DIM],
    lower: [f64; MAX_DIM],
    upper: [f64; MAX_DIM],
    spacing: [f64; MAX_DIM],
    /// node strides; axis 0 is fastest
    strides: [usize; MAX_DIM],
    node_count: usize,
    node_weights: Vec<f64>,
    boundary: Vec<bool>,
    /// per axis: low node of every edge
    edge_low: Vec<Vec<usize>>,
    edge_weights: Vec<Vec<f64>>,
}

/// Box grid with `cells[i]` uniform cells along axis `i`.
///
/// Cheap to clone; clones share the same node tables.
#[derive(Debug, Clone)]
pub struct Grid(Arc<GridData>);

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Grid {
    /// Grid on `Π [bounds[i].0, bounds[i].1]` with `cells[i] ≥ 2`.
    pub fn new(cells: &[usize], bounds: &[(f64, f64)]) -> Result<Self> {
        let dim = cells.len();
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidGrid(format!("dimension must be 1..=3, got {dim}")));
        }
        if bounds.len() != dim {
            return Err(Error::InvalidGrid(format!(
                "{dim} cell counts but {} box intervals",
                bounds.len()
            )));
        }
        let mut c = [1usize; MAX_DIM];
        let mut lower = [0.0; MAX_DIM];
        let mut upper = [0.0; MAX_DIM];
        let mut spacing = [1.0; MAX_DIM];
        for i in 0..dim {
            if cells[i] < 2 {
                return Err(Error::InvalidGrid(format!(
                    "axis {i} needs at least 2 cells, got {}",
                    cells[i]
                )));
            }
            let (a, b) = bounds[i];
            if !(a.is_finite() && b.is_finite() && b > a) {
                return Err(Error::InvalidGrid(format!("axis {i} has empty interval [{a}, {b}]")));
            }
            c[i] = cells[i];
            lower[i] = a;
            upper[i] = b;
            spacing[i] = (b - a) / cells[i] as f64;
        }
        let mut strides = [0usize; MAX_DIM];
        let mut node_count = 1usize;
        for i in 0..dim {
            strides[i] = node_count;
            node_count *= c[i] + 1;
        }
        let cell_volume: f64 = spacing[..dim].iter().product();

        let mut node_weights = vec![0.0; node_count];
        let mut boundary = vec![false; node_count];
        for idx in 0..node_count {
            let mut w = cell_volume;
            let mut on_boundary = false;
            for i in 0..dim {
                let k = (idx / strides[i]) % (c[i] + 1);
                if k == 0 || k == c[i] {
                    w *= 0.5;
                    on_boundary = true;
                }
            }
            node_weights[idx] = w;
            boundary[idx] = on_boundary;
        }

        let mut edge_low = Vec::with_capacity(dim);
        let mut edge_weights = Vec::with_capacity(dim);
        for axis in 0..dim {
            let mut extents = [1usize; MAX_DIM];
            for j in 0..dim {
                extents[j] = if j == axis { c[j] } else { c[j] + 1 };
            }
            let count: usize = extents[..dim].iter().product();
            let mut lows = Vec::with_capacity(count);
            let mut weights = Vec::with_capacity(count);
            let mut multi = [0usize; MAX_DIM];
            for _ in 0..count {
                let mut node = 0;
                let mut w = cell_volume;
                for j in 0..dim {
                    node += multi[j] * strides[j];
                    if j != axis && (multi[j] == 0 || multi[j] == c[j]) {
                        w *= 0.5;
                    }
                }
                lows.push(node);
                weights.push(w);
                for j in 0..dim {
                    multi[j] += 1;
                    if multi[j] < extents[j] {
                        break;
                    }
                    multi[j] = 0;
                }
            }
            edge_low.push(lows);
            edge_weights.push(weights);
        }

        Ok(Grid(Arc::new(GridData {
            dim,
            cells: c,
            lower,
            upper,
            spacing,
            strides,
            node_count,
            node_weights,
            boundary,
            edge_low,
            edge_weights,
        })))
    }

    /// Unit box `[0, 1]ᴺ`.
    pub fn unit(cells: &[usize]) -> Result<Self> {
        let bounds = vec![(0.0, 1.0); cells.len()];
        Self::new(cells, &bounds)
    }

    /// Same box with every cell count multiplied by `factor`.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        let cells: Vec<usize> = self.cells().iter().map(|&n| n * factor).collect();
        self.with_cells(&cells)
    }

    /// Same box with new cell counts.
    pub fn with_cells(&self, cells: &[usize]) -> Result<Self> {
        let bounds: Vec<(f64, f64)> = (0..self.dim()).map(|i| (self.0.lower[i], self.0.upper[i])).collect();
        Self::new(cells, &bounds)
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn cells(&self) -> &[usize] {
        &self.0.cells[..self.0.dim]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.0.spacing[axis]
    }

    pub fn bounds(&self, axis: usize) -> (f64, f64) {
        (self.0.lower[axis], self.0.upper[axis])
    }

    /// Largest spacing over all axes.
    pub fn max_spacing(&self) -> f64 {
        self.0.spacing[..self.dim()].iter().fold(0.0, |a, &b| a.max(b))
    }

    pub fn cell_volume(&self) -> f64 {
        self.0.spacing[..self.dim()].iter().product()
    }

    /// `|Ω|`.
    pub fn measure(&self) -> f64 {
        (0..self.dim()).map(|i| self.0.upper[i] - self.0.lower[i]).product()
    }

    pub fn node_count(&self) -> usize {
        self.0.node_count
    }

    pub fn interior_count(&self) -> usize {
        self.cells().iter().map(|&n| n - 1).product()
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.0.strides[axis]
    }

    pub fn node_index(&self, multi: &[usize]) -> usize {
        multi
            .iter()
            .zip(&self.0.strides[..self.dim()])
            .map(|(k, s)| k * s)
            .sum()
    }

    /// Per-axis integer coordinates of a node; unused axes are zero.
    pub fn multi_index(&self, idx: usize) -> [usize; MAX_DIM] {
        let mut m = [0; MAX_DIM];
        for i in 0..self.dim() {
            m[i] = (idx / self.0.strides[i]) % (self.0.cells[i] + 1);
        }
        m
    }

    /// Physical coordinates of a node; unused axes are zero.
    pub fn coordinates(&self, idx: usize) -> [f64; MAX_DIM] {
        let m = self.multi_index(idx);
        let mut x = [0.0; MAX_DIM];
        for i in 0..self.dim() {
            x[i] = self.0.lower[i] + m[i] as f64 * self.0.spacing[i];
        }
        x
    }

    pub fn is_boundary(&self, idx: usize) -> bool {
        self.0.boundary[idx]
    }

    pub fn node_weight(&self, idx: usize) -> f64 {
        self.0.node_weights[idx]
    }

    pub fn node_weights(&self) -> &[f64] {
        &self.0.node_weights
    }

    pub fn edge_count(&self, axis: usize) -> usize {
        self.0.edge_low[axis].len()
    }

    /// Nodes joined by edge `e` of `axis`, low end first.
    #[inline]
    pub fn edge_nodes(&self, axis: usize, e: usize) -> (usize, usize) {
        let lo = self.0.edge_low[axis][e];
        (lo, lo + self.0.strides[axis])
    }

    pub fn edge_weights(&self, axis: usize) -> &[f64] {
        &self.0.edge_weights[axis]
    }

    pub fn edge_midpoint(&self, axis: usize, e: usize) -> [f64; MAX_DIM] {
        let mut x = self.coordinates(self.0.edge_low[axis][e]);
        x[axis] += 0.5 * self.0.spacing[axis];
        x
    }

    /// Interior node indices in increasing order.
    pub fn interior_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.node_count()).filter(move |&i| !self.is_boundary(i))
    }
}

/// Real value per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::InvalidGrid(format!(
                "expected {} nodal values, got {}",
                grid.node_count(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::param(format!("non-finite value at node {i}")));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn zeros(grid: &Grid) -> Self {
        GridFunction {
            values: vec![0.0; grid.node_count()],
            grid: grid.clone(),
        }
    }

    pub fn constant(grid: &Grid, c: f64) -> Self {
        GridFunction {
            values: vec![c; grid.node_count()],
            grid: grid.clone(),
        }
    }

    /// Samples `f` at every node, boundary included.
    pub fn from_fn(grid: &Grid, mut f: impl FnMut(&[f64]) -> f64) -> Self {
        let dim = grid.dim();
        let values = (0..grid.node_count()).map(|i| f(&grid.coordinates(i)[..dim])).collect();
        GridFunction {
            grid: grid.clone(),
            values,
        }
    }

    /// Samples `f` at interior nodes and sets boundary values to zero.
    pub fn dirichlet_from_fn(grid: &Grid, mut f: impl FnMut(&[f64]) -> f64) -> Self {
        let dim = grid.dim();
        let values = (0..grid.node_count())
            .map(|i| {
                if grid.is_boundary(i) {
                    0.0
                } else {
                    f(&grid.coordinates(i)[..dim])
                }
            })
            .collect();
        GridFunction {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Boundary values are exactly zero.
    pub fn is_dirichlet(&self) -> bool {
        self.values
            .iter()
            .enumerate()
            .all(|(i, &v)| !self.grid.is_boundary(i) || v == 0.0)
    }

    pub fn enforce_dirichlet(&mut self) {
        for i in 0..self.values.len() {
            if self.grid.is_boundary(i) {
                self.values[i] = 0.0;
            }
        }
    }

    /// Nodewise application of `f`, keeping the grid.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> GridFunction {
        GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Nodewise combination of two fields on the same grid.
    pub fn zip_map(&self, other: &GridFunction, mut f: impl FnMut(f64, f64) -> f64) -> Result<GridFunction> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `max |self − other|`.
    pub fn max_abs_diff(&self, other: &GridFunction) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }
}

/// Apply a scalar map nodewise.
pub fn apply_pointwise(u: &GridFunction, f: impl FnMut(f64) -> f64) -> GridFunction {
    u.map(f)
}

/// Edge-centred values, one array per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeField {
    grid: Grid,
    axes: Vec<Vec<f64>>,
}

impl EdgeField {
    pub fn new(grid: &Grid, axes: Vec<Vec<f64>>) -> Result<Self> {
        if axes.len() != grid.dim() {
            return Err(Error::InvalidGrid(format!(
                "edge field needs {} axes, got {}",
                grid.dim(),
                axes.len()
            )));
        }
        for (i, a) in axes.iter().enumerate() {
            if a.len() != grid.edge_count(i) {
                return Err(Error::InvalidGrid(format!(
                    "axis {i} needs {} edge values, got {}",
                    grid.edge_count(i),
                    a.len()
                )));
            }
        }
        Ok(EdgeField {
            grid: grid.clone(),
            axes,
        })
    }

    pub fn zeros(grid: &Grid) -> Self {
        EdgeField {
            grid: grid.clone(),
            axes: (0..grid.dim()).map(|i| vec![0.0; grid.edge_count(i)]).collect(),
        }
    }

    /// Samples `f(axis, midpoint)` on every edge.
    pub fn from_fn(grid: &Grid, mut f: impl FnMut(usize, &[f64]) -> f64) -> Self {
        let dim = grid.dim();
        let axes = (0..dim)
            .map(|axis| {
                (0..grid.edge_count(axis))
                    .map(|e| f(axis, &grid.edge_midpoint(axis, e)[..dim]))
                    .collect()
            })
            .collect();
        EdgeField {
            grid: grid.clone(),
            axes,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn axis(&self, i: usize) -> &[f64] {
        &self.axes[i]
    }

    pub fn axis_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.axes[i]
    }
}

/// `(u(node + e_axis) − u(node)) / h_axis` on every edge of `axis`.
pub fn forward_diff(u: &GridFunction, axis: usize) -> Vec<f64> {
    let g = u.grid();
    let h = g.spacing(axis);
    let v = u.values();
    (0..g.edge_count(axis))
        .map(|e| {
            let (a, b) = g.edge_nodes(axis, e);
            (v[b] - v[a]) / h
        })
        .collect()
}

/// Discrete gradient: [`forward_diff`] along every axis.
pub fn gradient(u: &GridFunction) -> EdgeField {
    EdgeField {
        grid: u.grid().clone(),
        axes: (0..u.grid().dim()).map(|i| forward_diff(u, i)).collect(),
    }
}

/// Discrete divergence at interior nodes (zero on the boundary):
/// `Σ_i (F_i(e⁺) − F_i(e⁻)) / h_i`, so that
/// `⟨−div F, v⟩ = Σ_i ⟨F_i, ∂_i v⟩` for every `v` vanishing on the boundary.
pub fn divergence(field: &EdgeField) -> GridFunction {
    let g = field.grid();
    let mut out = vec![0.0; g.node_count()];
    for axis in 0..g.dim() {
        let h = g.spacing(axis);
        for (e, &flux) in field.axis(axis).iter().enumerate() {
            let (a, b) = g.edge_nodes(axis, e);
            out[a] += flux / h;
            out[b] -= flux / h;
        }
    }
    for (i, v) in out.iter_mut().enumerate() {
        if g.is_boundary(i) {
            *v = 0.0;
        }
    }
    GridFunction {
        grid: g.clone(),
        values: out,
    }
}

/// `∫_Ω u` with dual-cell weights.
pub fn integrate(u: &GridFunction) -> f64 {
    u.values().iter().zip(u.grid().node_weights()).map(|(v, w)| v * w).sum()
}

/// Weighted nodal inner product `⟨u, v⟩`.
pub fn inner(u: &GridFunction, v: &GridFunction) -> Result<f64> {
    if u.grid() != v.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(u.values()
        .iter()
        .zip(v.values())
        .zip(u.grid().node_weights())
        .map(|((a, b), w)| a * b * w)
        .sum())
}

/// Weighted edge inner product `Σ_i ⟨F_i, G_i⟩`.
pub fn edge_inner(f: &EdgeField, g: &EdgeField) -> Result<f64> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = f.grid();
    Ok((0..grid.dim())
        .map(|i| {
            f.axis(i)
                .iter()
                .zip(g.axis(i))
                .zip(grid.edge_weights(i))
                .map(|((a, b), w)| a * b * w)
                .sum::<f64>()
        })
        .sum())
}

/// `|{|u| ≥ l}|`: total dual-cell weight of the nodes with `|u| ≥ l`.
pub fn level_set_measure(u: &GridFunction, l: f64) -> f64 {
    u.values()
        .iter()
        .zip(u.grid().node_weights())
        .filter(|(v, _)| v.abs() >= l)
        .fold(0.0, |acc, (_, w)| acc + w)
}

fn check_exponent(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("norm exponent must be >= 1, got {p}")))
    }
}

#[inline]
pub(crate) fn abs_pow(x: f64, p: f64) -> f64 {
    let a = x.abs();
    if p == 1.0 {
        a
    } else if p == 2.0 {
        a * a
    } else {
        libm::pow(a, p)
    }
}

fn weighted_lp(values: &[f64], weights: &[f64], p: f64) -> f64 {
    let s: f64 = values.iter().zip(weights).map(|(v, w)| w * abs_pow(*v, p)).sum();
    if p == 1.0 {
        s
    } else {
        libm::pow(s, 1.0 / p)
    }
}

/// Discrete `L^p` norm of a nodal field.
pub fn lp_norm(u: &GridFunction, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(weighted_lp(u.values(), u.grid().node_weights(), p))
}

/// Discrete `L^p` norm of one axis of an edge field.
pub fn edge_lp_norm(field: &EdgeField, axis: usize, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(weighted_lp(field.axis(axis), field.grid().edge_weights(axis), p))
}

/// `‖∂_axis u‖_{L^p}`.
pub fn derivative_norm(u: &GridFunction, axis: usize, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let d = forward_diff(u, axis);
    Ok(weighted_lp(&d, u.grid().edge_weights(axis), p))
}

/// Anisotropic norm `‖u‖_{L¹} + Σ_i ‖∂_i u‖_{L^{p_i}}`.
pub fn aniso_norm(u: &GridFunction, p: &[f64]) -> Result<f64> {
    if p.len() != u.grid().dim() {
        return Err(Error::param(format!(
            "{} exponents for a {}-dimensional grid",
            p.len(),
            u.grid().dim()
        )));
    }
    let mut total = lp_norm(u, 1.0)?;
    for (i, &pi) in p.iter().enumerate() {
        total += derivative_norm(u, i, pi)?;
    }
    Ok(total)
}

/// Largest deviation between the piecewise-linear reconstruction of `u` and
/// `exact`, sampled at the nodes and at every edge midpoint.
pub fn reconstruction_error(u: &GridFunction, mut exact: impl FnMut(&[f64]) -> f64) -> f64 {
    let g = u.grid();
    let dim = g.dim();
    let v = u.values();
    let mut err: f64 = 0.0;
    for i in 0..g.node_count() {
        err = err.max((v[i] - exact(&g.coordinates(i)[..dim])).abs());
    }
    for axis in 0..dim {
        for e in 0..g.edge_count(axis) {
            let (a, b) = g.edge_nodes(axis, e);
            let mid = 0.5 * (v[a] + v[b]);
            err = err.max((mid - exact(&g.edge_midpoint(axis, e)[..dim])).abs());
        }
    }
    err
}
