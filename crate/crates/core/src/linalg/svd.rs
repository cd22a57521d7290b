//! Singular values by one-sided (Hestenes) Jacobi rotations.

use super::matrix::{vec_dot, ComplexMatrix, C64};

const MAX_SWEEPS: usize = 80;

/// Singular values of the matrix whose columns are `cols`, in descending order.
///
/// The columns may have any common length; the result has one entry per column.
pub fn singular_values_of_columns(mut cols: Vec<Vec<C64>>) -> Vec<f64> {
    let k = cols.len();
    let tol = f64::EPSILON;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..k {
            for j in i + 1..k {
                let alpha: f64 = cols[i].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum();
                let gamma = vec_dot(&cols[i], &cols[j]);
                let g = gamma.norm();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // phase-rotate column j so that <a_i, a_j> becomes real and positive
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(j);
                let (ci, cj) = (&mut left[i], &mut right[0]);
                for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
                    let b = *y * phase;
                    let a = *x;
                    *x = a * c - b * s;
                    *y = a * s + b * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    singular_values_of_columns((0..m.dim()).map(|j| m.column(j)).collect())
}

/// `sigma_max / sigma_min`, or `f64::INFINITY` when `sigma_min` is at the
/// rounding floor `n * eps * sigma_max`.
pub fn condition_number(m: &ComplexMatrix) -> f64 {
    let sv = singular_values(m);
    let max = sv[0];
    let min = *sv.last().expect("dim >= 1");
    if max == 0.0 || min <= max * f64::EPSILON * m.dim() as f64 {
        f64::INFINITY
    } else {
        max / min
    }
}
