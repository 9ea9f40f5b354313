//! Real-space kernels `K(rho) = (1/2pi) \int dk e^{i k rho} f(i k beta)`.
//!
//! The symbol is sampled on the grid's own band `|k| <= pi/h` at a k-spacing
//! [`KERNEL_OVERSAMPLING`] times finer than the grid's, tapered by a raised
//! cosine over the outer [`KERNEL_TAPER_FRACTION`] of the band, and inverse
//! transformed. The finer k-spacing pushes the periodic images of the kernel
//! out to `KERNEL_OVERSAMPLING` grid periods; the taper suppresses the ringing
//! of a hard band edge. The table keeps every offset of the inverse transform,
//! `j h` for `j` in `-4N..4N`, so it spans eight grid periods around zero.
//! Convolution folds the table onto one period, which makes it the exact
//! periodic counterpart of the spectral path (apart from the taper).

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{check_symbol, StabilityReport, AMPLIFICATION_LIMIT};
use crate::error::{EvalError, GridError, OperatorError};
use crate::field::Field;
use crate::grid::{signed_mode, Grid};
use crate::symbol::{BinaryOp, Function, SymbolExpr, Variable};

pub const KERNEL_OVERSAMPLING: usize = 8;
pub const KERNEL_TAPER_FRACTION: f64 = 0.1;

/// A tabulated kernel on uniformly spaced offsets.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel1D {
    offsets: Vec<f64>,
    values: Vec<Complex64>,
    beta: Complex64,
}

impl Kernel1D {
    /// Validates that offsets are strictly increasing and uniformly spaced.
    pub fn new(
        offsets: Vec<f64>,
        values: Vec<Complex64>,
        beta: Complex64,
    ) -> Result<Self, GridError> {
        if offsets.len() != values.len() {
            return Err(GridError::ValueCount {
                expected: offsets.len(),
                got: values.len(),
            });
        }
        if offsets.len() < 2 {
            return Err(GridError::TooFewSamples {
                axis: 0,
                n: offsets.len(),
            });
        }
        let step = offsets[1] - offsets[0];
        let uniform = offsets
            .windows(2)
            .all(|w| w[1] > w[0] && ((w[1] - w[0]) - step).abs() <= 1e-9 * step);
        if !(step > 0.0 && uniform) {
            return Err(GridError::Spacing {
                axis: 0,
                spacing: step,
            });
        }
        Ok(Kernel1D {
            offsets,
            values,
            beta,
        })
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn spacing(&self) -> f64 {
        (self.offsets[self.offsets.len() - 1] - self.offsets[0]) / (self.offsets.len() - 1) as f64
    }

    /// `sum K(rho) * spacing`, the kernel's action on a constant.
    pub fn mass(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.spacing()
    }

    /// The part of the table with `lo <= rho < hi`, e.g. one grid period.
    pub fn within(&self, lo: f64, hi: f64) -> Result<Kernel1D, GridError> {
        let (offsets, values) = self
            .offsets
            .iter()
            .zip(&self.values)
            .filter(|(r, _)| **r >= lo && **r < hi)
            .map(|(r, v)| (*r, *v))
            .unzip();
        Kernel1D::new(offsets, values, self.beta)
    }

    /// Offsets covering one period of `grid` centred on zero: `j h` for `j` in `-n/2..n - n/2`.
    pub fn central_period(&self, grid: &Grid) -> Result<Kernel1D, GridError> {
        grid.ensure_1d()?;
        let h = grid.spacing()[0];
        let first = -((grid.n()[0] / 2) as f64) * h;
        self.within(first - 0.5 * h, first + grid.period(0) - 0.5 * h)
    }
}

/// Raised-cosine taper on `a = |k| / k_nyquist`.
fn taper(a: f64) -> f64 {
    let start = 1.0 - KERNEL_TAPER_FRACTION;
    if a <= start {
        1.0
    } else if a >= 1.0 {
        0.0
    } else {
        0.5 * (1.0 + (PI * (a - start) / KERNEL_TAPER_FRACTION).cos())
    }
}

/// Tabulates the real-space kernel of `f(beta d/dx)` on the offsets of a 1D grid.
pub fn extract_kernel_1d(
    symbol: &SymbolExpr,
    beta: Complex64,
    grid: &Grid,
) -> Result<Kernel1D, OperatorError> {
    grid.ensure_1d()?;
    check_symbol(symbol)?;
    let n = grid.n()[0];
    let h = grid.spacing()[0];
    let m_total = KERNEL_OVERSAMPLING * n;
    let dk = 2.0 * PI / (m_total as f64 * h);
    let k_nyquist = PI / h;

    let mut samples = Vec::with_capacity(m_total);
    let mut peak = (0.0, 0.0);
    for idx in 0..m_total {
        let k = signed_mode(idx, m_total) as f64 * dk;
        let w = taper(k.abs() / k_nyquist);
        let v = if w == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            let z = Complex64::new(0.0, k) * beta;
            match symbol.eval_z(z) {
                Ok(v) => v * w,
                Err(EvalError::Overflow) => {
                    return Err(OperatorError::Amplification {
                        report: StabilityReport {
                            max_magnitude: f64::INFINITY,
                            argmax_k: vec![k],
                            flagged: true,
                        },
                        limit: AMPLIFICATION_LIMIT,
                    })
                }
                Err(source) => return Err(OperatorError::Domain { k: vec![k], source }),
            }
        };
        if v.norm() > peak.0 {
            peak = (v.norm(), k);
        }
        samples.push(v);
    }
    if peak.0 > AMPLIFICATION_LIMIT {
        return Err(OperatorError::Amplification {
            report: StabilityReport {
                max_magnitude: peak.0,
                argmax_k: vec![peak.1],
                flagged: true,
            },
            limit: AMPLIFICATION_LIMIT,
        });
    }

    FftPlanner::new()
        .plan_fft_inverse(m_total)
        .process(&mut samples);
    let norm = 1.0 / (m_total as f64 * h);
    let first = -((m_total / 2) as i64);
    let (offsets, values) = (0..m_total as i64)
        .map(|q| {
            let j = first + q;
            (
                j as f64 * h,
                samples[j.rem_euclid(m_total as i64) as usize] * norm,
            )
        })
        .unzip();
    Ok(Kernel1D::new(offsets, values, beta)?)
}

/// Periodic convolution `sum_{x'} K_L(x - x') c(x') h`, where `K_L` is the
/// kernel table folded onto the grid period `L`. The kernel spacing must
/// equal the grid spacing and its offsets must be whole multiples of it.
pub fn convolve_kernel(kernel: &Kernel1D, field: &Field) -> Result<Field, OperatorError> {
    let grid = field.grid();
    grid.ensure_1d()?;
    let n = grid.n()[0];
    let h = grid.spacing()[0];
    let misaligned = OperatorError::KernelAlignment {
        kernel: kernel.spacing(),
        grid: h,
    };
    if (kernel.spacing() - h).abs() > 1e-12 * h {
        return Err(misaligned);
    }
    let start = kernel.offsets[0] / h;
    if (start - start.round()).abs() > 1e-9 {
        return Err(misaligned);
    }
    let start = start.round() as i64;
    let mut folded = vec![Complex64::new(0.0, 0.0); n];
    for (q, v) in kernel.values.iter().enumerate() {
        folded[(start + q as i64).rem_euclid(n as i64) as usize] += v;
    }
    let c = field.values();
    let values = (0..n)
        .map(|i| {
            let sum: Complex64 = (0..n).map(|ip| folded[(i + n - ip) % n] * c[ip]).sum();
            sum * h
        })
        .collect();
    Ok(Field::from_parts_unchecked(grid.clone(), values))
}

/// Kernels with a known closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    /// `cos((beta d/dx)^2)`: `cos(rho^2/(4 beta^2) - pi/4) / (sqrt(4 pi) beta)`.
    FresnelCosine { beta: f64 },
    /// `exp(a (beta d/dx)^2)`, a heat kernel with `alpha = a beta^2`.
    Gaussian { alpha: f64 },
    /// `1/(beta d/dx)`: `sgn(rho) / (2 beta)`.
    Sign { beta: f64 },
}

impl ClosedForm {
    /// Matches `cos(z^2)`, `exp(z^2)`, `exp(a*z^2)`, `exp(z^2*a)` and `1/z`
    /// for real `beta`.
    pub fn recognize(symbol: &SymbolExpr, beta: Complex64) -> Option<Self> {
        if beta.im != 0.0 || beta.re == 0.0 {
            return None;
        }
        let b = beta.re;
        let is_z = |e: &SymbolExpr| *e == SymbolExpr::Var(Variable::Z);
        let is_z_squared = |e: &SymbolExpr| {
            matches!(e, SymbolExpr::Binary(BinaryOp::Pow, base, exp)
                if is_z(base) && **exp == SymbolExpr::Number(2.0))
        };
        match symbol {
            SymbolExpr::Call(Function::Cos, arg) if is_z_squared(arg) && b > 0.0 => {
                Some(ClosedForm::FresnelCosine { beta: b })
            }
            SymbolExpr::Call(Function::Exp, arg) => {
                let coeff = match &**arg {
                    e if is_z_squared(e) => Some(1.0),
                    SymbolExpr::Binary(BinaryOp::Mul, l, r) => match (&**l, &**r) {
                        (SymbolExpr::Number(a), e) | (e, SymbolExpr::Number(a))
                            if is_z_squared(e) =>
                        {
                            Some(*a)
                        }
                        _ => None,
                    },
                    _ => None,
                }?;
                (coeff > 0.0).then_some(ClosedForm::Gaussian {
                    alpha: coeff * b * b,
                })
            }
            SymbolExpr::Binary(BinaryOp::Div, num, den)
                if **num == SymbolExpr::Number(1.0) && is_z(den) =>
            {
                Some(ClosedForm::Sign { beta: b })
            }
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ClosedForm::FresnelCosine { .. } => "fresnel-cosine",
            ClosedForm::Gaussian { .. } => "gaussian",
            ClosedForm::Sign { .. } => "sign",
        }
    }

    pub fn eval(&self, rho: f64) -> f64 {
        match *self {
            ClosedForm::FresnelCosine { beta } => {
                (rho * rho / (4.0 * beta * beta) - PI / 4.0).cos() / ((4.0 * PI).sqrt() * beta)
            }
            ClosedForm::Gaussian { alpha } => {
                (-rho * rho / (4.0 * alpha)).exp() / (4.0 * PI * alpha).sqrt()
            }
            ClosedForm::Sign { beta } => {
                let s = if rho > 0.0 {
                    1.0
                } else if rho < 0.0 {
                    -1.0
                } else {
                    0.0
                };
                s / (2.0 * beta)
            }
        }
    }

    /// Tabulates the closed form on the offsets of `like`.
    pub fn tabulate(&self, like: &Kernel1D) -> Kernel1D {
        let values = like
            .offsets
            .iter()
            .map(|&r| Complex64::new(self.eval(r), 0.0))
            .collect();
        Kernel1D {
            offsets: like.offsets.clone(),
            values,
            beta: like.beta,
        }
    }

    /// Tabulates on the offsets a kernel extracted on `grid` would have.
    pub fn tabulate_on(&self, grid: &Grid, beta: Complex64) -> Result<Kernel1D, GridError> {
        grid.ensure_1d()?;
        let n = grid.n()[0];
        let h = grid.spacing()[0];
        let first = -((n / 2) as i64);
        let offsets: Vec<f64> = (0..n as i64).map(|q| (first + q) as f64 * h).collect();
        let values = offsets
            .iter()
            .map(|&r| Complex64::new(self.eval(r), 0.0))
            .collect();
        Kernel1D::new(offsets, values, beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sample_text;
    use crate::operator::{apply_operator, shift_field, OperatorSpec};
    use crate::symbol::{parse, SYMBOL_VARS};

    fn sym(text: &str) -> SymbolExpr {
        parse(text, SYMBOL_VARS).unwrap()
    }

    fn real(b: f64) -> Complex64 {
        Complex64::new(b, 0.0)
    }

    #[test]
    fn taper_shape() {
        assert_eq!(taper(0.0), 1.0);
        assert_eq!(taper(0.9), 1.0);
        assert!((taper(0.95) - 0.5).abs() < 1e-12);
        assert_eq!(taper(1.0), 0.0);
    }

    #[test]
    fn identity_symbol_gives_discrete_delta() {
        let g = Grid::interval(128, -4.0, 4.0).unwrap();
        let h = g.spacing()[0];
        let k = extract_kernel_1d(&sym("1"), real(1.0), &g).unwrap();
        assert_eq!(k.offsets().len(), KERNEL_OVERSAMPLING * 128);
        let zero = k.offsets().iter().position(|&r| r == 0.0).unwrap();
        // Unit mass; the peak height is the mean of the taper over the band,
        // and the taper ringing dies off within a few dozen samples.
        assert!((k.mass() - real(1.0)).norm() < 1e-12);
        assert!((k.values()[zero].re * h - 0.95).abs() < 1e-3);
        let peak = k
            .values()
            .iter()
            .map(|v| v.norm())
            .enumerate()
            .fold((0, 0.0), |b, (i, m)| if m > b.1 { (i, m) } else { b });
        assert_eq!(peak.0, zero);
        let far = k
            .values()
            .iter()
            .enumerate()
            .filter(|(i, _)| i.abs_diff(zero) >= 32)
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max);
        assert!(far * h < 1e-3, "{far}");

        let f = sample_text("exp(-x^2)*(1 + i*sin(x))", &g).unwrap();
        let out = convolve_kernel(&k, &f).unwrap();
        assert!(out.max_abs_diff(&f).unwrap() <= 1e-3);

        let period = k.central_period(&g).unwrap();
        assert_eq!(period.offsets().len(), 128);
        assert_eq!(period.offsets()[0], -4.0);
        assert!(
            convolve_kernel(&period, &f)
                .unwrap()
                .max_abs_diff(&f)
                .unwrap()
                <= 1e-3
        );
    }

    #[test]
    fn fresnel_kernel_matches_closed_form() {
        let g = Grid::interval(256, -8.0, 8.0).unwrap();
        let k = extract_kernel_1d(&sym("cos(z^2)"), real(0.5), &g).unwrap();
        let closed = ClosedForm::recognize(&sym("cos(z^2)"), real(0.5)).unwrap();
        let reach = 0.4 * g.period(0);
        let err = k
            .offsets()
            .iter()
            .zip(k.values())
            .filter(|(r, _)| r.abs() <= reach)
            .map(|(r, v)| (v - real(closed.eval(*r))).norm())
            .fold(0.0, f64::max);
        assert!(err <= 1e-3, "{err}");
    }

    #[test]
    fn exponential_kernel_is_a_shift() {
        let g = Grid::interval(64, -8.0, 8.0).unwrap();
        let h = g.spacing()[0];
        let beta = 5.0 * h;
        let k = extract_kernel_1d(&sym("exp(z)"), real(beta), &g).unwrap();
        let peak = k
            .values()
            .iter()
            .map(|v| v.norm())
            .enumerate()
            .fold((0, 0.0), |b, (i, m)| if m > b.1 { (i, m) } else { b });
        assert!((k.offsets()[peak.0] + beta).abs() < 1e-12);

        let f = sample_text("exp(-x^2)", &g).unwrap();
        let via_kernel = convolve_kernel(&k, &f).unwrap();
        let shifted = shift_field(&f, &[beta]).unwrap();
        assert!(via_kernel.max_abs_diff(&shifted).unwrap() <= 1e-3);
    }

    #[test]
    fn kernel_path_matches_spectral_path() {
        let g = Grid::interval(256, -8.0, 8.0).unwrap();
        let f = sample_text("exp(-x^2)", &g).unwrap();
        for (symbol, beta) in [
            ("cos(z^2)", 0.5),
            ("exp(z)*z", 0.7),
            ("1+z/2", 1.3),
            ("exp(0.3*z^2)", 1.0),
        ] {
            let k = extract_kernel_1d(&sym(symbol), real(beta), &g).unwrap();
            let via_kernel = convolve_kernel(&k, &f).unwrap();
            let spectral =
                apply_operator(&OperatorSpec::parse_1d(symbol, beta).unwrap(), &f).unwrap();
            let err = via_kernel.max_abs_diff(&spectral).unwrap();
            assert!(err <= 1e-3, "{symbol}: {err}");
        }
        let g = Grid::interval(64, 0.0, 2.0 * PI).unwrap();
        let sine = sample_text("sin(x)", &g).unwrap();
        let k = extract_kernel_1d(&sym("cos(z^2)"), real(0.5), &g).unwrap();
        let want = sine.map(|v| v * 0.25f64.cos());
        assert!(
            convolve_kernel(&k, &sine)
                .unwrap()
                .max_abs_diff(&want)
                .unwrap()
                <= 1e-3
        );
    }

    #[test]
    fn zero_kernel_gives_zero() {
        let g = Grid::interval(16, 0.0, 1.0).unwrap();
        let k = extract_kernel_1d(&sym("0"), real(1.0), &g).unwrap();
        let f = sample_text("sin(x)", &g).unwrap();
        assert_eq!(convolve_kernel(&k, &f).unwrap(), Field::zeros(g));
    }

    #[test]
    fn extraction_errors() {
        let g = Grid::interval(16, 0.0, 1.0).unwrap();
        assert!(matches!(
            extract_kernel_1d(&sym("1/z"), real(1.0), &g),
            Err(OperatorError::Domain { .. })
        ));
        let g3 = Grid::new(3, &[4, 4, 4], &[1.0; 3], &[0.0; 3]).unwrap();
        assert!(matches!(
            extract_kernel_1d(&sym("cos(z^2)"), real(1.0), &g3),
            Err(OperatorError::Grid(GridError::NotOneDimensional(3)))
        ));
        assert!(matches!(
            extract_kernel_1d(
                &sym("exp(-z^2)"),
                real(1.0),
                &Grid::interval(64, 0.0, 2.0 * PI).unwrap()
            ),
            Err(OperatorError::Amplification { .. })
        ));
    }

    #[test]
    fn convolution_rejects_misaligned_kernels() {
        let g = Grid::interval(16, 0.0, 1.0).unwrap();
        let k = extract_kernel_1d(&sym("1"), real(1.0), &g).unwrap();
        let other = Grid::interval(16, 0.0, 2.0).unwrap();
        assert!(matches!(
            convolve_kernel(&k, &Field::zeros(other)),
            Err(OperatorError::KernelAlignment { .. })
        ));
        let shifted = Kernel1D::new(
            k.offsets().iter().map(|r| r + 0.01).collect(),
            k.values().to_vec(),
            real(1.0),
        )
        .unwrap();
        assert!(convolve_kernel(&shifted, &Field::zeros(g)).is_err());
        assert!(Kernel1D::new(vec![0.0, 1.0, 1.5], vec![real(0.0); 3], real(1.0)).is_err());
    }

    #[test]
    fn closed_form_recognition() {
        assert_eq!(
            ClosedForm::recognize(&sym("cos(z^2)"), real(0.5)),
            Some(ClosedForm::FresnelCosine { beta: 0.5 })
        );
        assert_eq!(
            ClosedForm::recognize(&sym("exp(0.5*z^2)"), real(2.0)),
            Some(ClosedForm::Gaussian { alpha: 2.0 })
        );
        assert_eq!(
            ClosedForm::recognize(&sym("exp(z^2*2)"), real(1.0)),
            Some(ClosedForm::Gaussian { alpha: 2.0 })
        );
        assert_eq!(
            ClosedForm::recognize(&sym("1/z"), real(3.0)),
            Some(ClosedForm::Sign { beta: 3.0 })
        );
        assert_eq!(ClosedForm::recognize(&sym("exp(-z^2)"), real(1.0)), None);
        assert_eq!(
            ClosedForm::recognize(&sym("cos(z^2)"), Complex64::new(0.5, 0.1)),
            None
        );
        assert_eq!(ClosedForm::Sign { beta: 0.5 }.eval(-2.0), -1.0);
    }

    #[test]
    fn gaussian_kernel_matches_heat_kernel() {
        let g = Grid::interval(256, -8.0, 8.0).unwrap();
        let k = extract_kernel_1d(&sym("exp(z^2)"), real(0.8), &g).unwrap();
        let closed = ClosedForm::Gaussian { alpha: 0.64 }.tabulate(&k);
        let err = k
            .values()
            .iter()
            .zip(closed.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err <= 1e-3, "{err}");
    }
}
