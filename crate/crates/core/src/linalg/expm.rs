//! Matrix exponential by scaling and squaring with a degree-13 Padé approximant.
//!
//! No eigendecomposition is involved, so defective matrices are handled
//! exactly like diagonalizable ones.

use super::lu::solve;
use super::matrix::{ComplexMatrix, C64};
use super::LinalgError;

/// Largest 1-norm accepted by [`expm`].
pub const EXPM_MAX_NORM: f64 = 1.0e4;

/// 1-norm up to which the degree-13 approximant is accurate to unit roundoff.
const THETA_13: f64 = 5.371_920_351_148_152;

const PADE_13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

fn combine(terms: &[(f64, &ComplexMatrix)], identity_coef: f64) -> ComplexMatrix {
    let n = terms[0].1.dim();
    let mut out = ComplexMatrix::identity(n).scale_real(identity_coef);
    for &(c, m) in terms {
        out = &out + &m.scale_real(c);
    }
    out
}

pub fn expm(m: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    if !m.is_finite() {
        return Err(LinalgError::NonFinite { row: 0, col: 0 });
    }
    let norm = m.norm_one();
    if norm > EXPM_MAX_NORM {
        return Err(LinalgError::OverflowRisk {
            norm,
            limit: EXPM_MAX_NORM,
        });
    }
    let n = m.dim();
    if norm == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = m.scale_real(2f64.powi(-squarings));
    let b = &PADE_13;
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_inner = &a6 * &combine(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)], 0.0);
    let u_poly = &u_inner + &combine(&[(b[7], &a6), (b[5], &a4), (b[3], &a2)], b[1]);
    let u = &a * &u_poly;

    let v_inner = &a6 * &combine(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)], 0.0);
    let v = &v_inner + &combine(&[(b[6], &a6), (b[4], &a4), (b[2], &a2)], b[0]);

    let numer = &v + &u;
    let denom = &v - &u;
    let mut r = solve(&denom, &numer).map_err(|_| LinalgError::OverflowRisk {
        norm,
        limit: EXPM_MAX_NORM,
    })?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    if !r.is_finite() {
        return Err(LinalgError::OverflowRisk {
            norm,
            limit: EXPM_MAX_NORM,
        });
    }
    Ok(r)
}

/// `exp(s * M)` for a complex scalar `s`.
pub fn expm_scaled(m: &ComplexMatrix, s: C64) -> Result<ComplexMatrix, LinalgError> {
    expm(&m.scale(s))
}
