//! Fourier-multiplier application of operator symbols.
//!
//! A symbol `f(z)` becomes the diagonal multiplier `f(i k . beta)` for the
//! dot-gradient kind or `f(-|k|^2)` for the Laplacian kind, applied between
//! a forward and an inverse DFT. Real-space kernels and the closed-form
//! special operators live in the submodules.

mod diagnostics;
mod kernel;
mod special;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{EvalError, OperatorError};
use crate::field::{dft_forward, dft_inverse, Field};
use crate::grid::{is_nyquist, Grid};
use crate::symbol::{parse, Function, SymbolExpr, Variable, SYMBOL_VARS};

pub use diagnostics::{Diagnosed, Warning};
pub use kernel::{
    convolve_kernel, extract_kernel_1d, ClosedForm, Kernel1D, KERNEL_OVERSAMPLING,
    KERNEL_TAPER_FRACTION,
};
pub use special::{
    fresnel_cos_apply, heat_smooth_realspace, inverse_derivative, sgn_kernel_apply,
    shifted_derivative_apply, DECAY_THRESHOLD, PERIODIZATION_THRESHOLD,
};

/// Default ceiling on `max |m(k)|`; beyond it results are rounding noise.
pub const AMPLIFICATION_LIMIT: f64 = 1e12;

/// How the symbol argument is formed from the wavenumber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    /// `f(beta . grad)`: argument `i k . beta`.
    DotGradient,
    /// `f(laplacian)`: argument `-|k|^2`; beta is ignored.
    Laplacian,
}

/// A symbol in `z` together with how it is lifted to an operator.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec {
    symbol: SymbolExpr,
    beta: Vec<Complex64>,
    kind: OperatorKind,
}

fn check_symbol(symbol: &SymbolExpr) -> Result<(), OperatorError> {
    match symbol.variables().into_iter().find(|v| *v != Variable::Z) {
        Some(v) => Err(OperatorError::SymbolVariable(v)),
        None => Ok(()),
    }
}

impl OperatorSpec {
    pub fn dot_gradient(symbol: SymbolExpr, beta: Vec<Complex64>) -> Result<Self, OperatorError> {
        check_symbol(&symbol)?;
        Ok(OperatorSpec {
            symbol,
            beta,
            kind: OperatorKind::DotGradient,
        })
    }

    pub fn laplacian(symbol: SymbolExpr) -> Result<Self, OperatorError> {
        check_symbol(&symbol)?;
        Ok(OperatorSpec {
            symbol,
            beta: Vec::new(),
            kind: OperatorKind::Laplacian,
        })
    }

    /// Parses `text` as a symbol in `z` and builds the spec.
    pub fn parse(
        text: &str,
        kind: OperatorKind,
        beta: Vec<Complex64>,
    ) -> Result<Self, OperatorError> {
        let symbol = parse(text, SYMBOL_VARS)?;
        match kind {
            OperatorKind::DotGradient => Self::dot_gradient(symbol, beta),
            OperatorKind::Laplacian => Self::laplacian(symbol),
        }
    }

    /// 1D dot-gradient spec with a real beta.
    pub fn parse_1d(text: &str, beta: f64) -> Result<Self, OperatorError> {
        Self::parse(
            text,
            OperatorKind::DotGradient,
            vec![Complex64::new(beta, 0.0)],
        )
    }

    pub fn symbol(&self) -> &SymbolExpr {
        &self.symbol
    }

    pub fn beta(&self) -> &[Complex64] {
        &self.beta
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    /// Symbol argument at wavenumber `k`.
    fn argument(&self, k: &[f64]) -> Complex64 {
        match self.kind {
            OperatorKind::DotGradient => {
                let dot: Complex64 = k.iter().zip(&self.beta).map(|(k, b)| b * *k).sum();
                Complex64::i() * dot
            }
            OperatorKind::Laplacian => Complex64::new(-k.iter().map(|k| k * k).sum::<f64>(), 0.0),
        }
    }
}

/// Largest multiplier magnitude and where it occurs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// `null` in JSON when the symbol overflowed outright.
    #[serde(with = "magnitude_or_null")]
    pub max_magnitude: f64,
    pub argmax_k: Vec<f64>,
    pub flagged: bool,
}

mod magnitude_or_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// Tabulated multiplier in DFT index order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMultiplier {
    grid: Grid,
    values: Vec<Complex64>,
    stability: f64,
    argmax: usize,
}

impl SpectralMultiplier {
    /// Evaluates `f` at every wavenumber of `grid`, without the amplification
    /// guard. Eval overflows still fail, since no finite table exists.
    ///
    /// With `symmetrize`, entries on an even-length axis's Nyquist index are
    /// the average of `f` over both signs of that wavenumber component (all
    /// sign combinations when several axes are at Nyquist). This keeps the
    /// multiplier conjugate-symmetric, so real fields stay real.
    pub fn tabulate_with(
        grid: &Grid,
        symmetrize: bool,
        mut f: impl FnMut(&[f64]) -> Result<Complex64, EvalError>,
    ) -> Result<Self, OperatorError> {
        let dims = grid.dims();
        let wavenumbers: Vec<Vec<f64>> = (0..dims)
            .map(|d| grid.wavenumbers(d))
            .collect::<Result<_, _>>()?;
        let mut values = Vec::with_capacity(grid.len());
        let mut k = vec![0.0; dims];
        let mut nyquist_axes = Vec::with_capacity(dims);
        for flat in 0..grid.len() {
            let idx = grid.unravel(flat);
            nyquist_axes.clear();
            for d in 0..dims {
                k[d] = wavenumbers[d][idx[d]];
                if symmetrize && is_nyquist(idx[d], grid.n()[d]) {
                    nyquist_axes.push(d);
                }
            }
            let fail = |k: &[f64], source: EvalError| match source {
                EvalError::Overflow => OperatorError::Amplification {
                    report: StabilityReport {
                        max_magnitude: f64::INFINITY,
                        argmax_k: k.to_vec(),
                        flagged: true,
                    },
                    limit: AMPLIFICATION_LIMIT,
                },
                source => OperatorError::Domain {
                    k: k.to_vec(),
                    source,
                },
            };
            let value = if nyquist_axes.is_empty() {
                f(&k).map_err(|e| fail(&k, e))?
            } else {
                let combos = 1usize << nyquist_axes.len();
                let mut sum = Complex64::new(0.0, 0.0);
                for mask in 0..combos {
                    let mut kk = k.clone();
                    for (bit, &d) in nyquist_axes.iter().enumerate() {
                        if mask & (1 << bit) != 0 {
                            kk[d] = -kk[d];
                        }
                    }
                    sum += f(&kk).map_err(|e| fail(&kk, e))?;
                }
                sum / combos as f64
            };
            values.push(value);
        }
        let (argmax, stability) =
            values
                .iter()
                .map(|v| v.norm())
                .enumerate()
                .fold(
                    (0, 0.0),
                    |best, (i, m)| if m > best.1 { (i, m) } else { best },
                );
        Ok(SpectralMultiplier {
            grid: grid.clone(),
            values,
            stability,
            argmax,
        })
    }

    /// Tabulates `spec` on `grid` without the amplification guard.
    pub fn tabulate(spec: &OperatorSpec, grid: &Grid) -> Result<Self, OperatorError> {
        if spec.kind == OperatorKind::DotGradient && spec.beta.len() != grid.dims() {
            return Err(OperatorError::BetaLength {
                dims: grid.dims(),
                got: spec.beta.len(),
            });
        }
        let symmetrize = spec.kind == OperatorKind::DotGradient;
        Self::tabulate_with(grid, symmetrize, |k| spec.symbol.eval_z(spec.argument(k)))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Maximum entry magnitude.
    pub fn stability(&self) -> f64 {
        self.stability
    }

    /// Wavenumber vector of entry `flat`.
    pub fn wavenumber(&self, flat: usize) -> Vec<f64> {
        let idx = self.grid.unravel(flat);
        (0..self.grid.dims())
            .map(|d| self.grid.wavenumbers(d).expect("axis in range")[idx[d]])
            .collect()
    }

    pub fn report(&self, limit: f64) -> StabilityReport {
        StabilityReport {
            max_magnitude: self.stability,
            argmax_k: self.wavenumber(self.argmax),
            flagged: self.stability > limit,
        }
    }

    fn guard(self, limit: f64) -> Result<Self, OperatorError> {
        if self.stability > limit {
            Err(OperatorError::Amplification {
                report: self.report(limit),
                limit,
            })
        } else {
            Ok(self)
        }
    }
}

/// Max `|m(k)|`, its wavenumber, and whether it exceeds [`AMPLIFICATION_LIMIT`].
pub fn stability_report(mult: &SpectralMultiplier) -> StabilityReport {
    mult.report(AMPLIFICATION_LIMIT)
}

/// Tabulates and guards the multiplier of `spec` on `grid`.
pub fn build_multiplier(
    spec: &OperatorSpec,
    grid: &Grid,
) -> Result<SpectralMultiplier, OperatorError> {
    build_multiplier_with_limit(spec, grid, AMPLIFICATION_LIMIT)
}

pub fn build_multiplier_with_limit(
    spec: &OperatorSpec,
    grid: &Grid,
    limit: f64,
) -> Result<SpectralMultiplier, OperatorError> {
    match SpectralMultiplier::tabulate(spec, grid) {
        Err(OperatorError::Amplification { report, .. }) => {
            Err(OperatorError::Amplification { report, limit })
        }
        other => other?.guard(limit),
    }
}

/// `dft_inverse(mult * dft_forward(field))`.
pub fn apply_multiplier(mult: &SpectralMultiplier, field: &Field) -> Result<Field, OperatorError> {
    mult.grid.ensure_same(field.grid())?;
    let mut spec = dft_forward(field);
    spec.coeffs_mut()
        .iter_mut()
        .zip(&mult.values)
        .for_each(|(c, m)| *c *= m);
    Ok(dft_inverse(&spec))
}

pub fn apply_operator(spec: &OperatorSpec, field: &Field) -> Result<Field, OperatorError> {
    apply_multiplier(&build_multiplier(spec, field.grid())?, field)
}

/// Band-limited translation: the result at `r` is the trigonometric
/// interpolant of `field` evaluated at `r + beta`.
pub fn shift_field(field: &Field, beta: &[f64]) -> Result<Field, OperatorError> {
    let spec = OperatorSpec::dot_gradient(
        SymbolExpr::call(Function::Exp, SymbolExpr::var(Variable::Z)),
        beta.iter().map(|&b| Complex64::new(b, 0.0)).collect(),
    )?;
    apply_operator(&spec, field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sample_text;
    use crate::symbol::BinaryOp;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn periodic(n: usize) -> Grid {
        Grid::interval(n, 0.0, 2.0 * PI).unwrap()
    }

    #[test]
    fn derivative_multiplier_with_nyquist_rule() {
        let g = Grid::new(1, &[4], &[1.0], &[0.0]).unwrap();
        let m = build_multiplier(&OperatorSpec::parse_1d("z", 1.0).unwrap(), &g).unwrap();
        let want = [
            c(0.0, 0.0),
            c(0.0, PI / 2.0),
            c(0.0, 0.0),
            c(0.0, -PI / 2.0),
        ];
        for (v, w) in m.values().iter().zip(want) {
            assert!((v - w).norm() < 1e-15, "{v} vs {w}");
        }
    }

    #[test]
    fn identity_multiplier() {
        let g = periodic(16);
        for kind in [OperatorKind::DotGradient, OperatorKind::Laplacian] {
            let m = build_multiplier(
                &OperatorSpec::parse("1", kind, vec![c(1.0, 0.0)]).unwrap(),
                &g,
            )
            .unwrap();
            assert!(m.values().iter().all(|v| *v == c(1.0, 0.0)));
        }
        let f = sample_text("exp(-x)*sin(3*x) + i*cos(x)", &g).unwrap();
        let out = apply_operator(&OperatorSpec::parse_1d("1", 0.3).unwrap(), &f).unwrap();
        assert!(out.max_abs_diff(&f).unwrap() <= 1e-12);
    }

    #[test]
    fn pole_is_reported_at_zero_wavenumber() {
        let err = build_multiplier(&OperatorSpec::parse_1d("1/z", 1.0).unwrap(), &periodic(8))
            .unwrap_err();
        match &err {
            OperatorError::Domain {
                k,
                source: EvalError::Domain(_),
            } => assert_eq!(k, &vec![0.0]),
            other => panic!("unexpected {other:?}"),
        }
        assert!(err.to_string().contains("pole at k = 0"));
        assert!(err.to_string().contains("inverse-derivative"));
    }

    #[test]
    fn spec_validation() {
        let bad = crate::symbol::parse("x", crate::symbol::field_vars(1)).unwrap();
        assert_eq!(
            OperatorSpec::laplacian(bad),
            Err(OperatorError::SymbolVariable(Variable::X))
        );
        let spec = OperatorSpec::parse("z", OperatorKind::DotGradient, vec![c(1.0, 0.0)]).unwrap();
        let g2 = Grid::new(2, &[4, 4], &[1.0, 1.0], &[0.0, 0.0]).unwrap();
        assert_eq!(
            build_multiplier(&spec, &g2),
            Err(OperatorError::BetaLength { dims: 2, got: 1 })
        );
        let f = Field::zeros(periodic(8));
        let m = build_multiplier(&spec, &periodic(16)).unwrap();
        assert!(matches!(
            apply_multiplier(&m, &f),
            Err(OperatorError::Grid(_))
        ));
    }

    #[test]
    fn derivative_of_sine() {
        let g = periodic(64);
        let f = sample_text("sin(x)", &g).unwrap();
        let out = apply_operator(&OperatorSpec::parse_1d("z", 1.0).unwrap(), &f).unwrap();
        let want = sample_text("cos(x)", &g).unwrap();
        assert!(out.max_abs_diff(&want).unwrap() <= 1e-10);
    }

    #[test]
    fn shift_examples() {
        let g = periodic(64);
        let f = sample_text("sin(x)", &g).unwrap();
        let spec = OperatorSpec::parse_1d("exp(z)", PI / 2.0).unwrap();
        let want = sample_text("cos(x)", &g).unwrap();
        assert!(
            apply_operator(&spec, &f)
                .unwrap()
                .max_abs_diff(&want)
                .unwrap()
                <= 1e-10
        );
        assert!(
            shift_field(&f, &[PI / 2.0])
                .unwrap()
                .max_abs_diff(&want)
                .unwrap()
                <= 1e-10
        );

        // Whole-step shifts are exact index rotations.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let values: Vec<Complex64> = (0..32).map(|_| c(rng.random(), rng.random())).collect();
        let g = Grid::new(1, &[32], &[0.25], &[0.0]).unwrap();
        let f = Field::new(g.clone(), values.clone()).unwrap();
        let out = shift_field(&f, &[3.0 * 0.25]).unwrap();
        for j in 0..32 {
            assert!((out.values()[j] - values[(j + 3) % 32]).norm() <= 1e-12);
        }
    }

    #[test]
    fn shift_matches_trigonometric_interpolant() {
        // Band-limited random field: top third of the spectrum zeroed.
        let n = 48;
        let h = 0.2;
        let g = Grid::new(1, &[n], &[h], &[0.0]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let kmax = n / 3;
        let modes: Vec<(i64, Complex64)> = (-(kmax as i64)..=kmax as i64)
            .map(|m| {
                (
                    m,
                    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                )
            })
            .collect();
        let period = n as f64 * h;
        let interp = |x: f64| -> Complex64 {
            modes
                .iter()
                .map(|(m, a)| a * Complex64::from_polar(1.0, 2.0 * PI * *m as f64 * x / period))
                .sum()
        };
        let f = Field::from_fn(g.clone(), |p| interp(p[0])).unwrap();
        let beta = 0.3 * h;
        let out = shift_field(&f, &[beta]).unwrap();
        let want = Field::from_fn(g, |p| interp(p[0] + beta)).unwrap();
        assert!(out.max_abs_diff(&want).unwrap() <= 1e-10);
    }

    #[test]
    fn plane_wave_eigenrelation_examples() {
        let g = periodic(64);
        let wave = sample_text("exp(i*x)", &g).unwrap();
        // Laplacian symbol exp(0.5 z): multiplier exp(-0.5 k^2) at k = 1.
        let spec = OperatorSpec::parse("exp(0.5*z)", OperatorKind::Laplacian, vec![]).unwrap();
        let out = apply_operator(&spec, &wave).unwrap();
        let want = wave.map(|v| v * (-0.5f64).exp());
        assert!(out.max_abs_diff(&want).unwrap() <= 1e-10);
        assert!(((-0.5f64).exp() - 0.6065307).abs() < 1e-7);

        // cos((beta d/dx)^2) on sin(x): multiplier cos(beta^2 k^2) at k = +-1.
        let f = sample_text("sin(x)", &g).unwrap();
        let out = apply_operator(&OperatorSpec::parse_1d("cos(z^2)", 0.5).unwrap(), &f).unwrap();
        let want = f.map(|v| v * 0.25f64.cos());
        assert!(out.max_abs_diff(&want).unwrap() <= 1e-10);
        assert!((0.25f64.cos() - 0.9689124).abs() < 1e-7);
    }

    #[test]
    fn stability_reports() {
        let g = periodic(64);
        let m = SpectralMultiplier::tabulate(&OperatorSpec::parse_1d("exp(z)", 1.3).unwrap(), &g)
            .unwrap();
        let r = stability_report(&m);
        assert!((r.max_magnitude - 1.0).abs() < 1e-15 && !r.flagged);

        let m =
            SpectralMultiplier::tabulate(&OperatorSpec::parse_1d("1", 1.0).unwrap(), &g).unwrap();
        let r = stability_report(&m);
        assert_eq!(
            (r.max_magnitude, r.flagged, r.argmax_k.clone()),
            (1.0, false, vec![0.0])
        );

        // exp(z^2) at z = ik decays as exp(-k^2): not flagged.
        let m = SpectralMultiplier::tabulate(&OperatorSpec::parse_1d("exp(z^2)", 1.0).unwrap(), &g)
            .unwrap();
        assert!(!stability_report(&m).flagged);

        // exp(-z^2) grows as exp(k^2); k_max = 8 gives e^64, finite but flagged.
        let g16 = periodic(16);
        let m =
            SpectralMultiplier::tabulate(&OperatorSpec::parse_1d("exp(-z^2)", 1.0).unwrap(), &g16)
                .unwrap();
        let r = stability_report(&m);
        assert!(r.flagged);
        assert!((r.max_magnitude / 64f64.exp() - 1.0).abs() < 1e-12);
        assert_eq!(r.argmax_k.len(), 1);
        assert!((r.argmax_k[0].abs() - 8.0).abs() < 1e-12);
        assert!(matches!(
            build_multiplier(&OperatorSpec::parse_1d("exp(-z^2)", 1.0).unwrap(), &g16),
            Err(OperatorError::Amplification { .. })
        ));

        // At k_max = 32 the value e^1024 overflows f64: still an amplification failure.
        match build_multiplier(&OperatorSpec::parse_1d("exp(-z^2)", 1.0).unwrap(), &g) {
            Err(OperatorError::Amplification { report, limit }) => {
                assert!(report.flagged && report.max_magnitude.is_infinite());
                assert_eq!(limit, AMPLIFICATION_LIMIT);
                let json = serde_json::to_string(&report).unwrap();
                assert!(json.starts_with(r#"{"max_magnitude":null"#), "{json}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn report_json_shape() {
        let r = StabilityReport {
            max_magnitude: 2.5,
            argmax_k: vec![1.0, -2.0],
            flagged: false,
        };
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(
            json,
            r#"{"max_magnitude":2.5,"argmax_k":[1.0,-2.0],"flagged":false}"#
        );
        assert_eq!(serde_json::from_str::<StabilityReport>(&json).unwrap(), r);
    }

    #[test]
    fn nyquist_rule_in_two_dimensions_preserves_real_fields() {
        let g = Grid::new(2, &[8, 6], &[0.4, 0.5], &[0.0, 0.0]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let values: Vec<f64> = (0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f = Field::from_real(g, &values).unwrap();
        let spec = OperatorSpec::parse(
            "z^3 + exp(z) - 2*z",
            OperatorKind::DotGradient,
            vec![c(0.7, 0.0), c(-0.3, 0.0)],
        )
        .unwrap();
        let out = apply_operator(&spec, &f).unwrap();
        let max_im = out.values().iter().map(|v| v.im.abs()).fold(0.0, f64::max);
        assert!(max_im <= 1e-12 * out.max_abs(), "{max_im}");
    }

    fn random_field(n: usize, rng: &mut impl Rng) -> Field {
        let values = (0..n)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        Field::new(periodic(n), values).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn linearity(seed in 0u64..10_000, beta in 0.1..2.0f64, ar in -2.0..2.0f64, bi in -2.0..2.0f64) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let (f1, f2) = (random_field(32, &mut rng), random_field(32, &mut rng));
            let (a, b) = (c(ar, 0.5), c(1.0, bi));
            let spec = OperatorSpec::parse_1d("cos(z^2) + 1/(2+z)", beta).unwrap();
            let lhs = apply_operator(&spec, &f1.combine(a, &f2, b).unwrap()).unwrap();
            let rhs = apply_operator(&spec, &f1).unwrap().combine(a, &apply_operator(&spec, &f2).unwrap(), b).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12 * lhs.max_abs().max(1.0));
        }

        #[test]
        fn shift_group_law(seed in 0u64..10_000, b1 in -3.0..3.0f64, b2 in -3.0..3.0f64) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            // Odd n: the symmetrized Nyquist entry is not multiplicative.
            let f = random_field(33, &mut rng);
            let twice = shift_field(&shift_field(&f, &[b1]).unwrap(), &[b2]).unwrap();
            let once = shift_field(&f, &[b1 + b2]).unwrap();
            prop_assert!(twice.max_abs_diff(&once).unwrap() <= 1e-10);
        }

        #[test]
        fn polynomial_composition(seed in 0u64..10_000, beta in 0.1..1.0f64) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let f = random_field(33, &mut rng);
            let p = crate::symbol::parse("1 + z/2", SYMBOL_VARS).unwrap();
            let q = crate::symbol::parse("z^2 - 3*z", SYMBOL_VARS).unwrap();
            let pq = SymbolExpr::binary(BinaryOp::Mul, p.clone(), q.clone());
            let b = vec![c(beta, 0.0)];
            let both = apply_operator(&OperatorSpec::dot_gradient(pq, b.clone()).unwrap(), &f).unwrap();
            let inner = apply_operator(&OperatorSpec::dot_gradient(q, b.clone()).unwrap(), &f).unwrap();
            let seq = apply_operator(&OperatorSpec::dot_gradient(p, b).unwrap(), &inner).unwrap();
            prop_assert!(both.max_abs_diff(&seq).unwrap() <= 1e-10 * both.max_abs().max(1.0));
        }
    }
}
