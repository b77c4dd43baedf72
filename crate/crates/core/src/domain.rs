//! Box domains, tensor grids, cell sets and step functions.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util::csum;

/// Relative tolerance (w.r.t. axis length) for matching points against breakpoints.
pub const ALIGN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxDomain {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::InvalidDomain(format!(
                "bounds of length {} and {}",
                lo.len(),
                hi.len()
            )));
        }
        for (i, (a, b)) in lo.iter().zip(&hi).enumerate() {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::InvalidDomain(format!("axis {i}: [{a}, {b}]")));
            }
        }
        let d = Self { lo, hi };
        let vol = d.volume();
        if !(vol.is_finite() && vol > 0.0) {
            return Err(Error::InvalidDomain(format!("volume {vol}")));
        }
        Ok(d)
    }

    pub fn unit(dim: usize) -> Self {
        Self { lo: vec![0.0; dim], hi: vec![1.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn side(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|i| self.side(i)).product()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter().enumerate().all(|(i, &v)| {
                let tol = ALIGN_TOL * self.side(i);
                v >= self.lo[i] - tol && v <= self.hi[i] + tol
            })
    }

    /// Equality up to the alignment tolerance.
    pub fn approx_eq(&self, other: &Self) -> bool {
        self.dim() == other.dim()
            && (0..self.dim()).all(|i| {
                let tol = ALIGN_TOL * self.side(i);
                (self.lo[i] - other.lo[i]).abs() <= tol && (self.hi[i] - other.hi[i]).abs() <= tol
            })
    }
}

/// Tensor-product grid: one strictly increasing breakpoint list per axis.
/// Cells are numbered row-major, last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorGrid {
    domain: BoxDomain,
    breakpoints: Vec<Vec<f64>>,
    shape: Vec<usize>,
    strides: Vec<usize>,
    measures: Vec<f64>,
}

impl TensorGrid {
    pub fn new(breakpoints: Vec<Vec<f64>>) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::InvalidGrid("no axes".into()));
        }
        for (axis, b) in breakpoints.iter().enumerate() {
            if b.len() < 2 {
                return Err(Error::InvalidGrid(format!("axis {axis} has fewer than 2 breakpoints")));
            }
            if b.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidGrid(format!("axis {axis} has a non-finite breakpoint")));
            }
            if let Some(w) = b.windows(2).find(|w| w[1] <= w[0]) {
                return Err(Error::InvalidGrid(format!(
                    "axis {axis}: breakpoints {} and {} leave a cell of non-positive width",
                    w[0], w[1]
                )));
            }
        }
        let domain = BoxDomain::new(
            breakpoints.iter().map(|b| b[0]).collect(),
            breakpoints.iter().map(|b| b[b.len() - 1]).collect(),
        )?;
        let shape: Vec<usize> = breakpoints.iter().map(|b| b.len() - 1).collect();
        let mut strides = vec![1usize; shape.len()];
        for i in (0..shape.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * shape[i + 1];
        }
        let n: usize = shape.iter().product();
        let widths: Vec<Vec<f64>> =
            breakpoints.iter().map(|b| b.windows(2).map(|w| w[1] - w[0]).collect()).collect();
        let measures = (0..n)
            .map(|c| {
                widths.iter().enumerate().map(|(axis, w)| w[(c / strides[axis]) % shape[axis]]).product()
            })
            .collect();
        Ok(Self { domain, breakpoints, shape, strides, measures })
    }

    /// `cells[i]` equal cells along axis `i`.
    pub fn uniform(domain: &BoxDomain, cells: &[usize]) -> Result<Self> {
        if cells.len() != domain.dim() {
            return Err(Error::DimensionMismatch { expected: domain.dim(), found: cells.len() });
        }
        let bps = cells
            .iter()
            .enumerate()
            .map(|(axis, &n)| {
                if n == 0 {
                    return Err(Error::InvalidGrid(format!("axis {axis} has zero cells")));
                }
                let (lo, hi) = (domain.lo()[axis], domain.hi()[axis]);
                Ok((0..=n)
                    .map(|k| if k == n { hi } else { lo + (hi - lo) * k as f64 / n as f64 })
                    .collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(bps)
    }

    /// Breakpoints `lo + L 2^{-j}`, `j = levels..0`, on every axis: dyadically refined towards the lower corner.
    pub fn dyadic(domain: &BoxDomain, levels: u32) -> Result<Self> {
        Self::dyadic_uniform(domain, levels, 1)
    }

    /// Union of a dyadic corner refinement and a uniform subdivision into `cells` per axis.
    pub fn dyadic_uniform(domain: &BoxDomain, levels: u32, cells: usize) -> Result<Self> {
        let bps = (0..domain.dim())
            .map(|axis| {
                let (lo, hi) = (domain.lo()[axis], domain.hi()[axis]);
                let len = hi - lo;
                let mut b: Vec<f64> = std::iter::once(lo)
                    .chain((0..=levels).rev().map(|j| lo + len * 0.5f64.powi(j as i32)))
                    .chain((1..cells.max(1)).map(|k| lo + len * k as f64 / cells as f64))
                    .collect();
                b.push(hi);
                merge_sorted(b, ALIGN_TOL * len)
            })
            .collect();
        Self::new(bps)
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn n_cells(&self) -> usize {
        self.measures.len()
    }

    pub fn breakpoints(&self, axis: usize) -> &[f64] {
        &self.breakpoints[axis]
    }

    pub fn all_breakpoints(&self) -> &[Vec<f64>] {
        &self.breakpoints
    }

    pub fn cell_measure(&self, cell: usize) -> f64 {
        self.measures[cell]
    }

    pub fn cell_measures(&self) -> &[f64] {
        &self.measures
    }

    /// Compensated sum of all cell measures.
    pub fn total_measure(&self) -> f64 {
        csum(self.measures.iter().copied())
    }

    pub fn volume(&self) -> f64 {
        self.domain.volume()
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    pub fn axis_index(&self, cell: usize, axis: usize) -> usize {
        (cell / self.strides[axis]) % self.shape[axis]
    }

    pub fn multi_index(&self, cell: usize) -> Vec<usize> {
        (0..self.dim()).map(|a| self.axis_index(cell, a)).collect()
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn axis_cell_bounds(&self, axis: usize, i: usize) -> (f64, f64) {
        (self.breakpoints[axis][i], self.breakpoints[axis][i + 1])
    }

    pub fn axis_cell_center(&self, axis: usize, i: usize) -> f64 {
        let (a, b) = self.axis_cell_bounds(axis, i);
        0.5 * (a + b)
    }

    pub fn cell_center(&self, cell: usize) -> Vec<f64> {
        (0..self.dim()).map(|a| self.axis_cell_center(a, self.axis_index(cell, a))).collect()
    }

    /// Index of the breakpoint matching `x` within the alignment tolerance.
    pub fn find_breakpoint(&self, axis: usize, x: f64) -> Option<usize> {
        let b = &self.breakpoints[axis];
        let tol = ALIGN_TOL * self.domain.side(axis);
        let i = b.partition_point(|&v| v < x - tol);
        (i < b.len() && (b[i] - x).abs() <= tol).then_some(i)
    }

    /// Cell along `axis` containing `x` (the last cell owns the upper boundary).
    pub fn locate(&self, axis: usize, x: f64) -> usize {
        let b = &self.breakpoints[axis];
        b.partition_point(|&v| v <= x).saturating_sub(1).min(self.shape[axis] - 1)
    }

    /// Half-open range of cells along `axis` whose centers lie in `[a, b]`.
    pub fn center_range(&self, axis: usize, a: f64, b: f64) -> (usize, usize) {
        let n = self.shape[axis];
        let first = |pred: &dyn Fn(f64) -> bool| {
            let (mut lo, mut hi) = (0usize, n);
            while lo < hi {
                let mid = (lo + hi) / 2;
                if pred(self.axis_cell_center(axis, mid)) {
                    lo = mid + 1;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        let start = first(&|c| c < a);
        let end = first(&|c| c <= b);
        (start, end.max(start))
    }

    pub fn same_breakpoints(&self, other: &Self) -> bool {
        self.breakpoints == other.breakpoints
    }

    /// Grid on the union of both breakpoint sets.
    pub fn merged(&self, other: &Self) -> Result<Self> {
        if !self.domain.approx_eq(&other.domain) {
            return Err(Error::DomainMismatch);
        }
        let bps = (0..self.dim())
            .map(|a| {
                let mut b: Vec<f64> = self.breakpoints[a].iter().chain(&other.breakpoints[a]).copied().collect();
                b.sort_by(f64::total_cmp);
                merge_sorted(b, ALIGN_TOL * self.domain.side(a))
            })
            .collect();
        Self::new(bps)
    }

    /// Grid with extra breakpoints inserted (points outside the domain are dropped).
    ///
    /// Points within the alignment tolerance of each other are merged.
    pub fn refined_with(&self, extra: &[Vec<f64>]) -> Result<Self> {
        self.refine(extra, |a, _, _| ALIGN_TOL * self.domain.side(a))
    }

    /// As [`refined_with`](Self::refined_with), but only points a few ulps apart are merged,
    /// so arbitrarily fine nested cells survive.
    pub fn refined_exact(&self, extra: &[Vec<f64>]) -> Result<Self> {
        self.refine(extra, |_, p, x| 4.0 * f64::EPSILON * p.abs().max(x.abs()))
    }

    fn refine(&self, extra: &[Vec<f64>], tol: impl Fn(usize, f64, f64) -> f64) -> Result<Self> {
        if extra.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: extra.len() });
        }
        let bps = (0..self.dim())
            .map(|a| {
                let (lo, hi) = (self.domain.lo()[a], self.domain.hi()[a]);
                let b: Vec<f64> = self.breakpoints[a]
                    .iter()
                    .chain(extra[a].iter().filter(|&&x| x > lo && x < hi))
                    .copied()
                    .collect();
                merge_sorted_by(b, |p, x| tol(a, p, x))
            })
            .collect();
        Self::new(bps)
    }
}

/// Drops points closer than `tol` to their predecessor; keeps the last point exact.
fn merge_sorted(b: Vec<f64>, tol: f64) -> Vec<f64> {
    merge_sorted_by(b, |_, _| tol)
}

fn merge_sorted_by(mut b: Vec<f64>, tol: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    b.sort_by(f64::total_cmp);
    let last = *b.last().expect("non-empty");
    let mut out: Vec<f64> = Vec::with_capacity(b.len());
    for x in b {
        match out.last() {
            Some(&p) if x - p <= tol(p, x) => {}
            _ => out.push(x),
        }
    }
    let tol = tol(last, last);
    if let Some(l) = out.last_mut() {
        if (*l - last).abs() <= tol {
            *l = last;
        }
    }
    out
}

/// A union of grid cells.
#[derive(Debug, Clone)]
pub struct CellSet {
    grid: Arc<TensorGrid>,
    cells: Vec<usize>,
    measure: f64,
}

impl CellSet {
    pub fn new(grid: Arc<TensorGrid>, mut cells: Vec<usize>) -> Result<Self> {
        cells.sort_unstable();
        cells.dedup();
        if let Some(&c) = cells.last() {
            if c >= grid.n_cells() {
                return Err(Error::InvalidValues(format!("cell index {c} out of range")));
            }
        }
        let measure = csum(cells.iter().map(|&c| grid.cell_measure(c)));
        Ok(Self { grid, cells, measure })
    }

    /// Product of per-axis half-open cell index ranges.
    pub fn from_ranges(grid: Arc<TensorGrid>, ranges: &[(usize, usize)]) -> Result<Self> {
        if ranges.len() != grid.dim() {
            return Err(Error::DimensionMismatch { expected: grid.dim(), found: ranges.len() });
        }
        let mut cells = vec![0usize];
        for (axis, &(a, b)) in ranges.iter().enumerate() {
            let b = b.min(grid.shape()[axis]);
            let s = grid.stride(axis);
            cells = cells.iter().flat_map(|&c| (a..b).map(move |i| c + i * s)).collect();
        }
        Self::new(grid, cells)
    }

    pub fn grid(&self) -> &Arc<TensorGrid> {
        &self.grid
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.measure
    }

    pub fn contains(&self, cell: usize) -> bool {
        self.cells.binary_search(&cell).is_ok()
    }

    pub fn indicator(&self) -> StepFunction {
        let mut values = vec![0.0; self.grid.n_cells()];
        for &c in &self.cells {
            values[c] = 1.0;
        }
        StepFunction { grid: self.grid.clone(), values }
    }
}

/// Cells whose centers lie in the closed cube of the given side length centered at `center`.
pub fn make_cube_set(grid: &Arc<TensorGrid>, center: &[f64], sidelength: f64) -> Result<CellSet> {
    if center.len() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), found: center.len() });
    }
    if !(sidelength > 0.0) {
        return Err(Error::InvalidValues(format!("side length {sidelength}")));
    }
    let h = 0.5 * sidelength;
    let ranges: Vec<_> =
        center.iter().enumerate().map(|(a, &c)| grid.center_range(a, c - h, c + h)).collect();
    let set = CellSet::from_ranges(grid.clone(), &ranges)?;
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(set)
}

/// Cube `B_r(x0)`: side length `2r`.
pub fn ball(grid: &Arc<TensorGrid>, x0: &[f64], radius: f64) -> Result<CellSet> {
    make_cube_set(grid, x0, 2.0 * radius)
}

/// Indicator of a product of grid-aligned intervals.
pub fn product_indicator(grid: &Arc<TensorGrid>, intervals: &[(f64, f64)]) -> Result<StepFunction> {
    if intervals.len() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), found: intervals.len() });
    }
    let ranges = intervals
        .iter()
        .enumerate()
        .map(|(axis, &(a, b))| {
            if !(a < b) {
                return Err(Error::InvalidValues(format!("empty interval [{a}, {b}] on axis {axis}")));
            }
            let i = grid.find_breakpoint(axis, a).ok_or(Error::AlignmentError { axis, value: a })?;
            let j = grid.find_breakpoint(axis, b).ok_or(Error::AlignmentError { axis, value: b })?;
            Ok((i, j))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CellSet::from_ranges(grid.clone(), &ranges)?.indicator())
}

/// Nonnegative piecewise-constant function, one value per grid cell.
#[derive(Debug, Clone)]
pub struct StepFunction {
    grid: Arc<TensorGrid>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(grid: Arc<TensorGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_cells() {
            return Err(Error::DimensionMismatch { expected: grid.n_cells(), found: values.len() });
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidValues(format!("value {v} is not a finite nonnegative number")));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: Arc<TensorGrid>, c: f64) -> Result<Self> {
        let n = grid.n_cells();
        Self::new(grid, vec![c; n])
    }

    /// Samples `f` at cell centers.
    pub fn from_fn(grid: Arc<TensorGrid>, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..grid.n_cells()).map(|c| f(&grid.cell_center(c))).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<TensorGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn support_measure(&self) -> f64 {
        csum(self.values.iter().zip(self.grid.cell_measures()).filter(|(v, _)| **v > 0.0).map(|(_, m)| *m))
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.grid.clone(), self.values.iter().map(|v| v * c).collect())
    }

    /// Pointwise sum on a common refinement.
    pub fn add(&self, other: &Self) -> Result<Self> {
        let (a, b) = refine_common(self, other)?;
        let values = a.values.iter().zip(&b.values).map(|(x, y)| x + y).collect();
        Self::new(a.grid, values)
    }

    pub fn support(&self) -> CellSet {
        let cells = (0..self.values.len()).filter(|&c| self.values[c] > 0.0).collect();
        CellSet::new(self.grid.clone(), cells).expect("indices in range")
    }

    /// Cells with value `>= level`.
    pub fn superlevel_closed(&self, level: f64) -> CellSet {
        let cells = (0..self.values.len()).filter(|&c| self.values[c] >= level).collect();
        CellSet::new(self.grid.clone(), cells).expect("indices in range")
    }

    /// Re-expresses the function on a finer grid over the same domain.
    pub fn resample(&self, target: &Arc<TensorGrid>) -> Result<Self> {
        if Arc::ptr_eq(&self.grid, target) || self.grid.same_breakpoints(target) {
            return Ok(Self { grid: target.clone(), values: self.values.clone() });
        }
        if !self.grid.domain().approx_eq(target.domain()) {
            return Err(Error::DomainMismatch);
        }
        let maps: Vec<Vec<usize>> = (0..target.dim())
            .map(|a| {
                (0..target.shape()[a]).map(|i| self.grid.locate(a, target.axis_cell_center(a, i))).collect()
            })
            .collect();
        let values = (0..target.n_cells())
            .map(|c| {
                let src: usize =
                    (0..target.dim()).map(|a| maps[a][target.axis_index(c, a)] * self.grid.stride(a)).sum();
                self.values[src]
            })
            .collect();
        Ok(Self { grid: target.clone(), values })
    }

    pub fn to_data(&self) -> StepFunctionData {
        StepFunctionData {
            dim: self.dim(),
            breakpoints: self.grid.all_breakpoints().to_vec(),
            values: self.values.clone(),
            role: None,
        }
    }

    pub fn from_data(data: StepFunctionData) -> Result<Self> {
        if data.breakpoints.len() != data.dim {
            return Err(Error::DimensionMismatch { expected: data.dim, found: data.breakpoints.len() });
        }
        let grid = Arc::new(TensorGrid::new(data.breakpoints)?);
        Self::new(grid, data.values)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_data()).expect("plain data serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let data: StepFunctionData = serde_json::from_str(s).map_err(|e| Error::Serialization(e.to_string()))?;
        Self::from_data(data)
    }
}

/// JSON carrier: `{dim, breakpoints, values}` with values in row-major cell order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepFunctionData {
    pub dim: usize,
    pub breakpoints: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<String>,
}

/// Both functions on the merged breakpoint grid.
pub fn refine_common(f: &StepFunction, g: &StepFunction) -> Result<(StepFunction, StepFunction)> {
    if Arc::ptr_eq(f.grid(), g.grid()) || f.grid().same_breakpoints(g.grid()) {
        let g2 = StepFunction { grid: f.grid.clone(), values: g.values.clone() };
        return Ok((f.clone(), g2));
    }
    let merged = Arc::new(f.grid().merged(g.grid())?);
    Ok((f.resample(&merged)?, g.resample(&merged)?))
}
