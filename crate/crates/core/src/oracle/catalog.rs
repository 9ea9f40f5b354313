use std::f64::consts::PI;

use num_complex::Complex64;

use super::{Expected, Operation, OracleCase};
use crate::grid::Grid;
use crate::operator::OperatorKind;

fn periodic(n: usize) -> Grid {
    Grid::interval(n, 0.0, 2.0 * PI).expect("valid grid")
}

fn line() -> Grid {
    Grid::interval(512, -16.0, 16.0).expect("valid grid")
}

fn real(b: f64) -> Complex64 {
    Complex64::new(b, 0.0)
}

fn case(
    name: &str,
    field: &str,
    grid: Grid,
    operation: Operation,
    expected: Expected,
    tolerance: f64,
    provenance: &str,
) -> OracleCase {
    OracleCase {
        name: name.into(),
        field: field.into(),
        grid,
        operation,
        expected,
        tolerance,
        mean_aligned: false,
        provenance: provenance.into(),
    }
}

/// Cases with independently known answers.
pub fn closed_form_catalog() -> Vec<OracleCase> {
    let heat_spectral = Operation::Apply {
        symbol: "exp(0.5*z)".into(),
        kind: OperatorKind::Laplacian,
        beta: vec![],
    };
    let mut erf_spectral = case(
        "inverse-derivative-erf",
        "exp(-x^2)",
        line(),
        Operation::InverseDerivative { beta: real(1.0) },
        Expected::Erf {
            scale: PI.sqrt() / 2.0,
            remove_input_mean: true,
        },
        1e-6,
        "periodic antiderivative of c - mean(c): (sqrt(pi)/2) erf(x) - mean(c) x up to a constant",
    );
    erf_spectral.mean_aligned = true;
    let mut reverify = case(
        "inverse-derivative-reverify",
        "exp(-x^2)",
        line(),
        Operation::InverseDerivativeReverify { beta: real(1.0) },
        Expected::Path(Operation::Apply {
            symbol: "1".into(),
            kind: OperatorKind::DotGradient,
            beta: vec![real(1.0)],
        }),
        1e-8,
        "re-applying the derivative recovers the input up to its mean",
    );
    reverify.mean_aligned = true;

    vec![
        case(
            "shift-sine",
            "sin(x)",
            periodic(64),
            Operation::apply_1d("exp(z)", PI / 2.0),
            Expected::Expression("cos(x)".into()),
            1e-10,
            "translation by the exponential of the derivative: sin(x + pi/2) = cos(x)",
        ),
        case(
            "shift-builtin-sine",
            "sin(x)",
            periodic(64),
            Operation::Shift {
                beta: vec![PI / 2.0],
            },
            Expected::Expression("cos(x)".into()),
            1e-10,
            "band-limited shift: sin(x + pi/2) = cos(x)",
        ),
        case(
            "derivative-sine",
            "sin(3*x)",
            periodic(64),
            Operation::apply_1d("z", 0.5),
            Expected::Expression("1.5*cos(3*x)".into()),
            1e-10,
            "0.5 d/dx sin(3x) = 1.5 cos(3x)",
        ),
        case(
            "plane-wave-fresnel",
            "exp(2*i*x)",
            periodic(64),
            Operation::apply_1d("cos(z^2)", 0.7),
            Expected::Expression("cos(4*0.49)*exp(2*i*x)".into()),
            1e-10,
            "eigenrelation f(i k beta) e^{ikx} with k = 2, beta = 0.7",
        ),
        case(
            "fresnel-sine",
            "sin(x)",
            periodic(64),
            Operation::apply_1d("cos(z^2)", 0.5),
            Expected::Expression("cos(0.25)*sin(x)".into()),
            1e-10,
            "cos((beta d/dx)^2) on a single mode: multiplier cos(beta^2) at k = 1",
        ),
        case(
            "heat-plane-wave",
            "exp(i*x) + exp(-3*i*x)",
            periodic(32),
            heat_spectral.clone(),
            Expected::Expression("exp(-0.5)*exp(i*x) + exp(-4.5)*exp(-3*i*x)".into()),
            1e-12,
            "heat semigroup exp(alpha Laplacian) damps mode k by exp(-alpha k^2)",
        ),
        case(
            "heat-gaussian-spectral",
            "exp(-x^2/2)",
            line(),
            heat_spectral.clone(),
            Expected::Expression("exp(-x^2/4)/sqrt(2)".into()),
            1e-6,
            "Gaussian of variance 1 smoothed for alpha = 0.5 has variance 2",
        ),
        case(
            "heat-gaussian-realspace",
            "exp(-x^2/2)",
            line(),
            Operation::HeatRealspace { alpha: 0.5 },
            Expected::Expression("exp(-x^2/4)/sqrt(2)".into()),
            1e-6,
            "Gaussian heat-kernel convolution, alpha = 0.5",
        ),
        case(
            "heat-dual-path",
            "exp(-x^2/2)",
            line(),
            Operation::HeatRealspace { alpha: 0.5 },
            Expected::Path(heat_spectral),
            1e-6,
            "real-space heat kernel vs the exp(-alpha k^2) multiplier",
        ),
        case(
            "sgn-kernel-gaussian",
            "exp(-x^2)",
            line(),
            Operation::SgnKernel { beta: real(1.0) },
            Expected::Erf {
                scale: PI.sqrt() / 2.0,
                remove_input_mean: false,
            },
            1e-8,
            "(1/2) integral of sgn(x - x') exp(-x'^2) = (sqrt(pi)/2) erf(x)",
        ),
        erf_spectral,
        reverify,
        case(
            "inverse-derivative-cosine",
            "cos(x)",
            periodic(64),
            Operation::InverseDerivative { beta: real(2.0) },
            Expected::Expression("sin(x)/2".into()),
            1e-10,
            "antiderivative of cos(x)/2",
        ),
        case(
            "shifted-derivative-gaussian",
            "exp(-x^2)",
            line(),
            Operation::ShiftedDerivative { beta: 0.5 },
            Expected::Expression("-(x+0.5)*exp(-(x+0.5)^2)".into()),
            1e-8,
            "derivative composed with a shift: [beta c'](x + beta)",
        ),
        case(
            "shifted-derivative-symbol",
            "exp(-x^2)",
            line(),
            Operation::apply_1d("exp(z)*z", 0.5),
            Expected::Expression("-(x+0.5)*exp(-(x+0.5)^2)".into()),
            1e-8,
            "the symbol exp(z) z gives the same shifted derivative",
        ),
        case(
            "fresnel-quadrature-vs-spectral",
            "exp(-x^2)",
            line(),
            Operation::FresnelQuadrature { beta: 0.5 },
            Expected::Path(Operation::apply_1d("cos(z^2)", 0.5)),
            1e-4,
            "oscillatory Fresnel-cosine kernel quadrature vs the cos(z^2) multiplier",
        ),
        case(
            "kernel-convolution-fresnel",
            "exp(-x^2)",
            Grid::interval(256, -8.0, 8.0).expect("valid grid"),
            Operation::KernelConvolution {
                symbol: "cos(z^2)".into(),
                beta: real(0.5),
            },
            Expected::Path(Operation::apply_1d("cos(z^2)", 0.5)),
            1e-3,
            "extracted real-space kernel convolution vs the spectral path",
        ),
        case(
            "brute-force-vs-fast",
            "exp(-x^2)*(1 + i*sin(3*x))",
            Grid::interval(64, -4.0, 4.0).expect("valid grid"),
            Operation::BruteForce {
                symbol: "cos(z^2)".into(),
                beta: real(0.3),
            },
            Expected::Path(Operation::apply_1d("cos(z^2)", 0.3)),
            1e-10,
            "direct double sum over grid points and modes vs FFT",
        ),
    ]
}
