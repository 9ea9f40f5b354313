use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{EvalError, OperatorError, OracleError};
use crate::field::Field;
use crate::symbol::SymbolExpr;

/// Largest grid the O(N^2) oracle accepts.
pub const BRUTE_FORCE_LIMIT: usize = 512;

/// Direct double sum over source points and discrete wavenumbers:
///
/// `out(x_j) = sum_{j'} c(x_{j'}) (h/L) sum_m exp(i k_m (x_j - x_{j'})) f(i k_m beta)`
///
/// with `k_m = 2 pi m / L` over the grid's DFT modes and the Nyquist mode
/// (even `n`) averaged over `+-k`. No FFT is involved; the inner sum depends
/// only on `j - j'`, so it is tabulated once per offset.
pub fn brute_force_apply(
    symbol: &SymbolExpr,
    beta: Complex64,
    field: &Field,
) -> Result<Field, OracleError> {
    let grid = field.grid();
    grid.ensure_1d()?;
    let n = grid.n()[0];
    if n > BRUTE_FORCE_LIMIT {
        return Err(OracleError::TooLarge {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let period = grid.period(0);
    let eval = |k: f64| -> Result<Complex64, OracleError> {
        symbol
            .eval_z(Complex64::new(0.0, k) * beta)
            .map_err(|source: EvalError| OperatorError::Domain { k: vec![k], source }.into())
    };

    let mut modes = Vec::with_capacity(n);
    for idx in 0..n {
        let m = if 2 * idx <= n {
            idx as i64
        } else {
            idx as i64 - n as i64
        };
        let k = 2.0 * PI * m as f64 / period;
        let value = if 2 * idx == n {
            (eval(k)? + eval(-k)?) * 0.5
        } else {
            eval(k)?
        };
        modes.push((m, value));
    }

    let weight = grid.spacing()[0] / period;
    let kernel: Vec<Complex64> = (0..n as i64)
        .map(|d| {
            modes
                .iter()
                .map(|(m, f)| {
                    let phase = 2.0 * PI * (m * d).rem_euclid(n as i64) as f64 / n as f64;
                    f * Complex64::from_polar(1.0, phase)
                })
                .sum::<Complex64>()
                * weight
        })
        .collect();

    let c = field.values();
    let values = (0..n)
        .map(|j| (0..n).map(|jp| c[jp] * kernel[(j + n - jp) % n]).sum())
        .collect();
    Ok(Field::new(grid.clone(), values)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sample_text;
    use crate::grid::Grid;
    use crate::operator::{apply_operator, OperatorSpec};
    use crate::symbol::{parse, SYMBOL_VARS};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn sym(text: &str) -> SymbolExpr {
        parse(text, SYMBOL_VARS).unwrap()
    }

    fn random_field(n: usize, seed: u64) -> Field {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = Grid::interval(n, 0.0, 2.0 * PI).unwrap();
        let values = (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        Field::new(g, values).unwrap()
    }

    #[test]
    fn agrees_with_fast_path() {
        let f = random_field(64, 1);
        let fast = apply_operator(&OperatorSpec::parse_1d("cos(z^2)", 0.7).unwrap(), &f).unwrap();
        let slow = brute_force_apply(&sym("cos(z^2)"), Complex64::new(0.7, 0.0), &f).unwrap();
        assert!(slow.max_abs_diff(&fast).unwrap() <= 1e-10);
    }

    #[test]
    fn identity_and_derivative() {
        let f = random_field(32, 2);
        let out = brute_force_apply(&sym("1"), Complex64::new(1.0, 0.0), &f).unwrap();
        assert!(out.max_abs_diff(&f).unwrap() <= 1e-12);

        let g = Grid::interval(64, 0.0, 2.0 * PI).unwrap();
        let sine = sample_text("sin(x)", &g).unwrap();
        let out = brute_force_apply(&sym("z"), Complex64::new(1.0, 0.0), &sine).unwrap();
        assert!(
            out.max_abs_diff(&sample_text("cos(x)", &g).unwrap())
                .unwrap()
                <= 1e-10
        );
    }

    #[test]
    fn guards() {
        let f = random_field(520, 3);
        assert_eq!(
            brute_force_apply(&sym("z"), Complex64::new(1.0, 0.0), &f),
            Err(OracleError::TooLarge {
                n: 520,
                limit: BRUTE_FORCE_LIMIT
            })
        );
        let f = random_field(8, 3);
        assert!(brute_force_apply(&sym("1/z"), Complex64::new(1.0, 0.0), &f).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn translation_equivariant(seed in 0u64..1000, shift in 0usize..16, beta in 0.1..2.0f64) {
            let n = 16;
            let f = random_field(n, seed);
            let rotated: Vec<Complex64> = (0..n).map(|j| f.values()[(j + shift) % n]).collect();
            let rotated = Field::new(f.grid().clone(), rotated).unwrap();
            let s = sym("exp(z) + z^2");
            let b = Complex64::new(beta, 0.0);
            let out = brute_force_apply(&s, b, &f).unwrap();
            let out_rot = brute_force_apply(&s, b, &rotated).unwrap();
            for j in 0..n {
                prop_assert!((out_rot.values()[j] - out.values()[(j + shift) % n]).norm() <= 1e-12);
            }
        }
    }
}
