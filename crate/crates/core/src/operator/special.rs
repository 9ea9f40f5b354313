//! Operators with closed-form kernels, each with a real-space quadrature
//! or a dedicated spectral rule.

use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::erf::erfc;

use super::diagnostics::{Diagnosed, Warning};
use super::{apply_multiplier, apply_operator, shift_field, OperatorSpec, SpectralMultiplier};
use crate::error::OperatorError;
use crate::field::Field;
use crate::symbol::{SymbolExpr, Variable};

/// Heat-kernel mass allowed beyond half a period before warning.
pub const PERIODIZATION_THRESHOLD: f64 = 1e-6;

/// Boundary-to-peak magnitude ratio a field must stay under for
/// infinite-line quadratures to be truncated to the grid.
pub const DECAY_THRESHOLD: f64 = 1e-8;

/// Points in the interpolation stencil of the cumulative quadrature.
const STENCIL: usize = 8;

fn check_beta(beta: Complex64) -> Result<(), OperatorError> {
    if beta == Complex64::new(0.0, 0.0) || !(beta.re.is_finite() && beta.im.is_finite()) {
        Err(OperatorError::ZeroBeta)
    } else {
        Ok(())
    }
}

fn decay_warning(field: &Field) -> Option<Warning> {
    let v = field.values();
    let peak = field.max_abs();
    let edge = v[0].norm().max(v[v.len() - 1].norm());
    (peak > 0.0 && edge >= DECAY_THRESHOLD * peak).then(|| Warning::SlowDecay {
        boundary_ratio: edge / peak,
    })
}

/// Convolution with the periodized heat kernel `(4 pi alpha)^(-d/2) exp(-|r|^2 / 4 alpha)`.
///
/// The kernel is separable, so each axis is convolved in turn with the 1D
/// periodized Gaussian sampled at the grid offsets. Weights are scaled to
/// unit discrete mass, which keeps the `alpha -> 0` limit an exact identity
/// when the Gaussian is narrower than a cell.
pub fn heat_smooth_realspace(field: &Field, alpha: f64) -> Result<Diagnosed<Field>, OperatorError> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(OperatorError::Alpha(alpha));
    }
    let grid = field.grid().clone();
    let mut warnings = Vec::new();
    let mut data = field.values().to_vec();
    let total = grid.len();
    for axis in 0..grid.dims() {
        let n = grid.n()[axis];
        let h = grid.spacing()[axis];
        let period = grid.period(axis);

        let mass_fraction = erfc(0.5 * period / (2.0 * alpha.sqrt()));
        if mass_fraction > PERIODIZATION_THRESHOLD {
            warnings.push(Warning::PeriodizationOverlap {
                axis,
                mass_fraction,
            });
        }

        // exp(-745) underflows; images farther than that contribute nothing.
        let reach = (4.0 * alpha * 745.0).sqrt();
        let images = (reach / period).ceil() as i64 + 1;
        let mut weights: Vec<f64> = (0..n)
            .map(|d| {
                (-images..=images)
                    .map(|m| {
                        let r = d as f64 * h + m as f64 * period;
                        (-r * r / (4.0 * alpha)).exp()
                    })
                    .sum()
            })
            .collect();
        let mass: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= mass);

        let stride = grid.stride(axis);
        let block = n * stride;
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let start = outer + inner;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + j * stride];
                }
                for i in 0..n {
                    data[start + i * stride] = line
                        .iter()
                        .enumerate()
                        .map(|(j, v)| v * weights[(i + n - j) % n])
                        .sum();
                }
            }
        }
    }
    Ok(Diagnosed::new(
        Field::from_parts_unchecked(grid, data),
        warnings,
    ))
}

/// Spectral inverse of `beta d/dx` with the zero mode set to zero.
///
/// Returns the mean-zero antiderivative of `field - mean(field)`, divided by
/// `beta`. Applying `beta d/dx` to the result gives back `field - mean(field)`.
pub fn inverse_derivative(field: &Field, beta: Complex64) -> Result<Field, OperatorError> {
    field.grid().ensure_1d()?;
    check_beta(beta)?;
    let mult = SpectralMultiplier::tabulate_with(field.grid(), true, |k| {
        Ok(if k[0] == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            1.0 / (Complex64::new(0.0, k[0]) * beta)
        })
    })?;
    apply_multiplier(&mult, field)
}

/// Weights `w[p]` with `\int_offset^{offset+1} q(t) dt = sum_p w[p] q(p)` for
/// every polynomial `q` of degree below `points`.
fn cell_weights(points: usize, offset: usize) -> Vec<f64> {
    (0..points)
        .map(|p| {
            // Lagrange basis polynomial for node p, as ascending coefficients.
            let mut coeffs = vec![1.0];
            let mut denom = 1.0;
            for r in (0..points).filter(|&r| r != p) {
                let mut next = vec![0.0; coeffs.len() + 1];
                for (i, c) in coeffs.iter().enumerate() {
                    next[i + 1] += c;
                    next[i] -= c * r as f64;
                }
                coeffs = next;
                denom *= p as f64 - r as f64;
            }
            let (a, b) = (offset as f64, offset as f64 + 1.0);
            coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c * (b.powi(i as i32 + 1) - a.powi(i as i32 + 1)) / (i as f64 + 1.0))
                .sum::<f64>()
                / denom
        })
        .collect()
}

/// Running integrals `I_j = \int_{x_0}^{x_j} c` using a local interpolating
/// polynomial per cell (centred where possible, one-sided at the ends).
fn cumulative_integral(values: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = values.len();
    let points = STENCIL.min(n);
    let table: Vec<Vec<f64>> = (0..points - 1).map(|o| cell_weights(points, o)).collect();
    let mut out = Vec::with_capacity(n);
    let mut acc = Complex64::new(0.0, 0.0);
    out.push(acc);
    for cell in 0..n - 1 {
        let start = cell.saturating_sub(points / 2 - 1).min(n - points);
        let w = &table[cell - start];
        let integral: Complex64 = (0..points).map(|p| values[start + p] * w[p]).sum();
        acc += integral * h;
        out.push(acc);
    }
    out
}

/// `(1/2beta) [ \int_{-inf}^x c - \int_x^inf c ]`, with the infinite line
/// truncated to the grid's first and last samples.
pub fn sgn_kernel_apply(field: &Field, beta: Complex64) -> Result<Diagnosed<Field>, OperatorError> {
    let grid = field.grid();
    grid.ensure_1d()?;
    check_beta(beta)?;
    let warnings = decay_warning(field).into_iter().collect();
    let running = cumulative_integral(field.values(), grid.spacing()[0]);
    let total = running[running.len() - 1];
    let scale = 1.0 / (2.0 * beta);
    let values = running
        .iter()
        .map(|&left| (left - (total - left)) * scale)
        .collect();
    Ok(Diagnosed::new(
        Field::from_parts_unchecked(grid.clone(), values),
        warnings,
    ))
}

/// `[beta c'](x + beta)`: spectral derivative followed by a band-limited shift.
pub fn shifted_derivative_apply(field: &Field, beta: f64) -> Result<Field, OperatorError> {
    field.grid().ensure_1d()?;
    let derivative = OperatorSpec::dot_gradient(
        SymbolExpr::var(Variable::Z),
        vec![Complex64::new(beta, 0.0)],
    )?;
    shift_field(&apply_operator(&derivative, field)?, &[beta])
}

/// Direct quadrature of `cos((beta d/dx)^2) c` against its real-space kernel
/// `cos((x-x')^2/(4 beta^2) - pi/4) / (sqrt(4 pi) beta)` over the grid.
pub fn fresnel_cos_apply(field: &Field, beta: f64) -> Result<Diagnosed<Field>, OperatorError> {
    let grid = field.grid();
    grid.ensure_1d()?;
    if !(beta.is_finite() && beta > 0.0) {
        return Err(OperatorError::ZeroBeta);
    }
    let n = grid.n()[0];
    let h = grid.spacing()[0];
    let mut warnings: Vec<Warning> = decay_warning(field).into_iter().collect();
    let half_width = 0.5 * grid.period(0);
    let limit = beta * beta * 2.0 * PI / half_width;
    if h > limit {
        warnings.push(Warning::UnresolvedOscillation { spacing: h, limit });
    }

    let norm = h / ((4.0 * PI).sqrt() * beta);
    let kernel: Vec<f64> = (0..n)
        .map(|d| {
            let r = d as f64 * h;
            (r * r / (4.0 * beta * beta) - PI / 4.0).cos() * norm
        })
        .collect();
    let c = field.values();
    let values = (0..n)
        .map(|i| (0..n).map(|j| c[j] * kernel[i.abs_diff(j)]).sum())
        .collect();
    Ok(Diagnosed::new(
        Field::from_parts_unchecked(grid.clone(), values),
        warnings,
    ))
}
