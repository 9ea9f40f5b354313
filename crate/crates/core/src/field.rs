//! Complex fields on grids and their discrete Fourier transforms.
//!
//! The forward transform is the plain sum `sum_j c_j exp(-i k . x_j)` taken
//! relative to the grid origin; the inverse divides by the total sample
//! count. Multipliers are convention-free because the two are always paired.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{GridError, SampleError};
use crate::grid::Grid;
use crate::symbol::{field_vars, parse, Bindings, SymbolExpr, Variable};

/// Complex samples on a [`Grid`], row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<Complex64>,
}

impl Field {
    /// Builds a field, rejecting wrong lengths and non-finite values.
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self, GridError> {
        check_values(&grid, &values)?;
        Ok(Field { grid, values })
    }

    pub fn from_real(grid: Grid, values: &[f64]) -> Result<Self, GridError> {
        Field::new(
            grid,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn zeros(grid: Grid) -> Self {
        let n = grid.len();
        Field {
            grid,
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// Fills a field from a function of the sample position.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(&[f64]) -> Complex64) -> Result<Self, GridError> {
        let dims = grid.dims();
        let values = (0..grid.len())
            .map(|flat| f(&grid.point(flat)[..dims]))
            .collect();
        Field::new(grid, values)
    }

    pub(crate) fn from_parts_unchecked(grid: Grid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(grid.len(), values.len());
        Field { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Arithmetic mean of the samples.
    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest pointwise distance to `other`; `None` when grids differ.
    pub fn max_abs_diff(&self, other: &Field) -> Option<f64> {
        (self.grid == other.grid).then(|| {
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
        })
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Field {
        Field::from_parts_unchecked(
            self.grid.clone(),
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }

    /// `self - mean(self)`.
    pub fn mean_removed(&self) -> Field {
        let m = self.mean();
        self.map(|v| v - m)
    }

    /// `a * self + b * other` on a shared grid.
    pub fn combine(&self, a: Complex64, other: &Field, b: Complex64) -> Result<Field, GridError> {
        self.grid.ensure_same(&other.grid)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(Field::from_parts_unchecked(self.grid.clone(), values))
    }
}

fn check_values(grid: &Grid, values: &[Complex64]) -> Result<(), GridError> {
    if values.len() != grid.len() {
        return Err(GridError::ValueCount {
            expected: grid.len(),
            got: values.len(),
        });
    }
    match values
        .iter()
        .position(|v| !(v.re.is_finite() && v.im.is_finite()))
    {
        Some(index) => Err(GridError::NonFinite { index }),
        None => Ok(()),
    }
}

/// DFT coefficients of a field, in DFT index order on every axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self, GridError> {
        check_values(&grid, &coeffs)?;
        Ok(SpectralField { grid, coeffs })
    }

    pub(crate) fn from_parts_unchecked(grid: Grid, coeffs: Vec<Complex64>) -> Self {
        SpectralField { grid, coeffs }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }
}

// In-place transform along every axis; lines are gathered into a scratch buffer.
fn transform(grid: &Grid, data: &mut [Complex64], direction: FftDirection) {
    let mut planner = FftPlanner::new();
    let total = grid.len();
    for axis in 0..grid.dims() {
        let n = grid.n()[axis];
        let stride = grid.stride(axis);
        let fft = planner.plan_fft(n, direction);
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let block = n * stride;
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let start = outer + inner;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + j * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, v) in line.iter().enumerate() {
                    data[start + j * stride] = *v;
                }
            }
        }
    }
}

/// Forward DFT, unnormalized.
pub fn dft_forward(field: &Field) -> SpectralField {
    let mut coeffs = field.values.clone();
    transform(&field.grid, &mut coeffs, FftDirection::Forward);
    SpectralField::from_parts_unchecked(field.grid.clone(), coeffs)
}

/// Inverse DFT, divided by the sample count.
pub fn dft_inverse(spec: &SpectralField) -> Field {
    let mut values = spec.coeffs.clone();
    transform(&spec.grid, &mut values, FftDirection::Inverse);
    let scale = 1.0 / spec.grid.len() as f64;
    values.iter_mut().for_each(|v| *v *= scale);
    Field::from_parts_unchecked(spec.grid.clone(), values)
}

/// Evaluates a coordinate expression at every grid point.
pub fn sample_field(expr: &SymbolExpr, grid: &Grid) -> Result<Field, SampleError> {
    let dims = grid.dims();
    let mut values = Vec::with_capacity(grid.len());
    let mut bindings = Bindings::new();
    for flat in 0..grid.len() {
        let p = grid.point(flat);
        for (axis, coord) in p.iter().enumerate().take(dims) {
            let var = Variable::for_axis(axis).expect("at most three axes");
            bindings.set(var, Complex64::new(*coord, 0.0));
        }
        let v = expr.eval(&bindings).map_err(|source| SampleError::Eval {
            index: grid.unravel(flat)[..dims].to_vec(),
            source,
        })?;
        values.push(v);
    }
    Ok(Field::from_parts_unchecked(grid.clone(), values))
}

/// Parses a coordinate expression for `grid` and samples it.
pub fn sample_text(text: &str, grid: &Grid) -> Result<Field, SampleError> {
    let expr = parse(text, field_vars(grid.dims()))?;
    sample_field(&expr, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::EvalError;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_field_spectrum() {
        let g = Grid::new(1, &[4], &[1.0], &[0.0]).unwrap();
        let f = Field::from_real(g, &[1.0; 4]).unwrap();
        let s = dft_forward(&f);
        assert_eq!(
            s.coeffs(),
            &[c(4.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]
        );
        let back = dft_inverse(&s);
        assert_eq!(back.values(), &[c(1.0, 0.0); 4]);
    }

    #[test]
    fn single_mode_spectrum() {
        let g = Grid::new(1, &[8], &[2.0 * PI / 8.0], &[0.0]).unwrap();
        let f = Field::from_fn(g, |x| Complex64::from_polar(1.0, x[0])).unwrap();
        let s = dft_forward(&f);
        for (m, v) in s.coeffs().iter().enumerate() {
            let want = if m == 1 { c(8.0, 0.0) } else { c(0.0, 0.0) };
            assert!((v - want).norm() < 1e-12, "m={m} {v}");
        }
    }

    #[test]
    fn zero_spectrum_inverts_to_zero() {
        let g = Grid::new(2, &[4, 3], &[1.0, 1.0], &[0.0, 0.0]).unwrap();
        let s = SpectralField::new(g.clone(), vec![c(0.0, 0.0); 12]).unwrap();
        assert_eq!(dft_inverse(&s), Field::zeros(g));
    }

    #[test]
    fn construction_checks() {
        let g = Grid::new(1, &[4], &[1.0], &[0.0]).unwrap();
        assert!(matches!(
            Field::new(g.clone(), vec![c(0.0, 0.0); 3]),
            Err(GridError::ValueCount {
                expected: 4,
                got: 3
            })
        ));
        let mut v = vec![c(0.0, 0.0); 4];
        v[2] = c(f64::NAN, 0.0);
        assert!(matches!(
            Field::new(g, v),
            Err(GridError::NonFinite { index: 2 })
        ));
    }

    #[test]
    fn sampling_expressions() {
        let g = Grid::interval(16, 0.0, 2.0 * PI).unwrap();
        let f = sample_text("sin(x)", &g).unwrap();
        for (x, v) in g.coordinates(0).unwrap().iter().zip(f.values()) {
            assert!((v.re - x.sin()).abs() < 1e-15 && v.im == 0.0);
        }
        let g = Grid::interval(256, -8.0, 8.0).unwrap();
        let f = sample_text("exp(-x^2)", &g).unwrap();
        assert!((f.values()[128].re - 1.0).abs() < 1e-15);

        let g = Grid::interval(4, -1.0, 1.0).unwrap();
        match sample_text("1/x", &g) {
            Err(SampleError::Eval { index, source }) => {
                assert_eq!(index, vec![2]);
                assert!(matches!(source, EvalError::Domain(_)));
            }
            other => panic!("unexpected {other:?}"),
        }
        let g2 = Grid::new(2, &[2, 3], &[1.0, 1.0], &[0.0, 0.0]).unwrap();
        let f = sample_text("x + 10*y", &g2).unwrap();
        assert_eq!(f.values()[5], c(21.0, 0.0));
        assert!(matches!(sample_text("z", &g2), Err(SampleError::Parse(_))));
    }

    fn random_field(dims: usize, n: usize, seed: u64) -> Field {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = Grid::new(dims, &vec![n; dims], &vec![0.3; dims], &vec![-1.0; dims]).unwrap();
        let values = (0..g.len())
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        Field::new(g, values).unwrap()
    }

    #[test]
    fn round_trip_parseval_linearity() {
        for dims in 1..=3 {
            for n in [2usize, 8, 64, 256] {
                if n.pow(dims as u32) > 1 << 18 {
                    continue;
                }
                let f = random_field(dims, n, (dims * 1000 + n) as u64);
                let scale = f.max_abs();
                let spec = dft_forward(&f);
                let back = dft_inverse(&spec);
                assert!(
                    back.max_abs_diff(&f).unwrap() <= 1e-12 * scale,
                    "round trip dims={dims} n={n}"
                );

                let energy: f64 = f.values().iter().map(|v| v.norm_sqr()).sum();
                let spec_energy: f64 =
                    spec.coeffs().iter().map(|v| v.norm_sqr()).sum::<f64>() / f.grid().len() as f64;
                assert!(
                    (energy - spec_energy).abs() <= 1e-12 * energy,
                    "parseval dims={dims} n={n}"
                );

                let g = random_field(dims, n, 7 + n as u64);
                let (a, b) = (c(0.3, -1.2), c(2.0, 0.5));
                let lhs = dft_forward(&f.combine(a, &g, b).unwrap());
                let (sf, sg) = (dft_forward(&f), dft_forward(&g));
                let norm = lhs.coeffs().iter().map(|v| v.norm()).fold(0.0, f64::max);
                for ((l, x), y) in lhs.coeffs().iter().zip(sf.coeffs()).zip(sg.coeffs()) {
                    assert!(
                        (l - (a * x + b * y)).norm() <= 1e-12 * norm,
                        "linearity dims={dims} n={n}"
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn round_trip_random_odd_and_even(n in 2usize..40, seed in 0u64..1000) {
            let f = random_field(1, n, seed);
            let back = dft_inverse(&dft_forward(&f));
            prop_assert!(back.max_abs_diff(&f).unwrap() <= 1e-12 * f.max_abs());
        }
    }
}
