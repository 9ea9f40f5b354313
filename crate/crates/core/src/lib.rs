//! Scalar functions of constant-coefficient differential operators,
//! `f(beta . grad)` and `f(laplacian)`, applied to sampled fields.
//!
//! The fast path multiplies DFT coefficients by `f(i k . beta)`; an
//! independent real-space path convolves with the tabulated kernel
//! `(1/2pi) \int dk e^{i k rho} f(i k beta)`. Closed-form operators (inverse
//! derivative, shifted derivative, Fresnel cosine, heat kernel) and a
//! brute-force O(N^2) oracle cross-check both.
//!
//! ```
//! use specgrad::field::sample_text;
//! use specgrad::grid::Grid;
//! use specgrad::operator::{apply_operator, OperatorSpec};
//!
//! let grid = Grid::interval(64, 0.0, 2.0 * std::f64::consts::PI).unwrap();
//! let sine = sample_text("sin(x)", &grid).unwrap();
//! // exp(beta d/dx) shifts by beta.
//! let spec = OperatorSpec::parse_1d("exp(z)", std::f64::consts::FRAC_PI_2).unwrap();
//! let shifted = apply_operator(&spec, &sine).unwrap();
//! let cosine = sample_text("cos(x)", &grid).unwrap();
//! assert!(shifted.max_abs_diff(&cosine).unwrap() < 1e-10);
//! ```

pub mod error;
pub mod field;
pub mod grid;
pub mod io;
pub mod operator;
pub mod oracle;
pub mod symbol;

pub use error::{
    EvalError, GridError, IoError, OperatorError, OracleError, ParseError, SampleError,
};
pub use field::{dft_forward, dft_inverse, sample_field, Field, SpectralField};
pub use grid::Grid;
pub use symbol::{parse, SymbolExpr};
