//! Uniform periodic sampling lattices in one to three dimensions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::GridError;

/// Largest supported dimensionality.
pub const MAX_DIMS: usize = 3;

/// A uniform periodic grid.
///
/// Axis `d` holds `n[d]` samples at `origin[d] + j * spacing[d]`, and the
/// lattice wraps with period `n[d] * spacing[d]`. Storage of anything laid
/// out on a grid is row-major with axis order (x, y, z), so the last axis
/// varies fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct Grid {
    n: Vec<usize>,
    spacing: Vec<f64>,
    origin: Vec<f64>,
}

/// Wire form of a [`Grid`]: `{dims, n, spacing, origin}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dims: usize,
    pub n: Vec<usize>,
    pub spacing: Vec<f64>,
    pub origin: Vec<f64>,
}

impl TryFrom<GridSpec> for Grid {
    type Error = GridError;

    fn try_from(spec: GridSpec) -> Result<Self, Self::Error> {
        Grid::new(spec.dims, &spec.n, &spec.spacing, &spec.origin)
    }
}

impl From<Grid> for GridSpec {
    fn from(grid: Grid) -> Self {
        GridSpec {
            dims: grid.dims(),
            n: grid.n,
            spacing: grid.spacing,
            origin: grid.origin,
        }
    }
}

impl Grid {
    /// Validates and builds a grid. Errors name the offending axis.
    pub fn new(
        dims: usize,
        n: &[usize],
        spacing: &[f64],
        origin: &[f64],
    ) -> Result<Self, GridError> {
        if !(1..=MAX_DIMS).contains(&dims) {
            return Err(GridError::Dims(dims));
        }
        for (what, len) in [
            ("n", n.len()),
            ("spacing", spacing.len()),
            ("origin", origin.len()),
        ] {
            if len != dims {
                return Err(GridError::ArrayLength {
                    what,
                    expected: dims,
                    got: len,
                });
            }
        }
        for axis in 0..dims {
            if n[axis] < 2 {
                return Err(GridError::TooFewSamples { axis, n: n[axis] });
            }
            if !(spacing[axis].is_finite() && spacing[axis] > 0.0) {
                return Err(GridError::Spacing {
                    axis,
                    spacing: spacing[axis],
                });
            }
            if !origin[axis].is_finite() {
                return Err(GridError::Origin {
                    axis,
                    origin: origin[axis],
                });
            }
        }
        Ok(Grid {
            n: n.to_vec(),
            spacing: spacing.to_vec(),
            origin: origin.to_vec(),
        })
    }

    /// One-dimensional grid with `n` samples covering `[start, end)`.
    pub fn interval(n: usize, start: f64, end: f64) -> Result<Self, GridError> {
        let spacing = (end - start) / n as f64;
        Grid::new(1, &[n], &[spacing], &[start])
    }

    pub fn dims(&self) -> usize {
        self.n.len()
    }

    pub fn n(&self) -> &[usize] {
        &self.n
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    /// Total sample count.
    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Physical period along `axis`.
    pub fn period(&self, axis: usize) -> f64 {
        self.n[axis] as f64 * self.spacing[axis]
    }

    /// Volume of one cell: the trapezoidal weight on a periodic grid.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub(crate) fn check_axis(&self, axis: usize) -> Result<(), GridError> {
        if axis < self.dims() {
            Ok(())
        } else {
            Err(GridError::AxisOutOfRange {
                axis,
                dims: self.dims(),
            })
        }
    }

    /// Sample coordinates along `axis`.
    pub fn coordinates(&self, axis: usize) -> Result<Vec<f64>, GridError> {
        self.check_axis(axis)?;
        let (o, h) = (self.origin[axis], self.spacing[axis]);
        Ok((0..self.n[axis]).map(|j| o + j as f64 * h).collect())
    }

    /// Angular wavenumbers along `axis` in DFT index order:
    /// `2*pi*m / (n*h)` with `m = j` for `j <= n/2` and `m = j - n` otherwise.
    pub fn wavenumbers(&self, axis: usize) -> Result<Vec<f64>, GridError> {
        self.check_axis(axis)?;
        let n = self.n[axis];
        let period = self.period(axis);
        Ok((0..n)
            .map(|j| 2.0 * PI * signed_mode(j, n) as f64 / period)
            .collect())
    }

    /// Splits a row-major flat index into per-axis indices.
    pub fn unravel(&self, mut flat: usize) -> [usize; MAX_DIMS] {
        let mut idx = [0; MAX_DIMS];
        for axis in (0..self.dims()).rev() {
            idx[axis] = flat % self.n[axis];
            flat /= self.n[axis];
        }
        idx
    }

    /// Row-major flat index of a per-axis index tuple.
    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.n).fold(0, |acc, (&i, &n)| acc * n + i)
    }

    /// Physical position of the sample at `flat`.
    pub fn point(&self, flat: usize) -> [f64; MAX_DIMS] {
        let idx = self.unravel(flat);
        let mut p = [0.0; MAX_DIMS];
        for axis in 0..self.dims() {
            p[axis] = self.origin[axis] + idx[axis] as f64 * self.spacing[axis];
        }
        p
    }

    /// Distance between consecutive samples along `axis` in flat storage.
    pub(crate) fn stride(&self, axis: usize) -> usize {
        self.n[axis + 1..].iter().product()
    }

    pub(crate) fn ensure_same(&self, other: &Grid) -> Result<(), GridError> {
        if self == other {
            Ok(())
        } else {
            Err(GridError::Mismatch)
        }
    }

    pub(crate) fn ensure_1d(&self) -> Result<(), GridError> {
        if self.dims() == 1 {
            Ok(())
        } else {
            Err(GridError::NotOneDimensional(self.dims()))
        }
    }
}

/// Signed mode number of DFT index `j` on an axis of `n` samples.
pub fn signed_mode(j: usize, n: usize) -> i64 {
    if j <= n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// True when `j` is the unpaired Nyquist index of an even-length axis.
pub fn is_nyquist(j: usize, n: usize) -> bool {
    n.is_multiple_of(2) && j == n / 2
}
