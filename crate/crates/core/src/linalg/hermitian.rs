//! Cyclic Jacobi eigensolver for Hermitian matrices.

use super::matrix::{ComplexMatrix, C64};
use super::LinalgError;

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `A = U diag(w) U^H` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Unitary; column `k` belongs to `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `U f(diag(w)) U^H`
    pub fn apply_function<F: Fn(f64) -> f64>(&self, f: F) -> ComplexMatrix {
        let n = self.values.len();
        let u = &self.vectors;
        let mut out = ComplexMatrix::zeros(n);
        for (k, &w) in self.values.iter().enumerate() {
            let fw = f(w);
            for i in 0..n {
                let uik = u[(i, k)] * fw;
                for j in 0..n {
                    out[(i, j)] += uik * u[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Rejects inputs whose anti-Hermitian part exceeds `tol * ||A||_F`.
pub fn hermitian_eigen(a: &ComplexMatrix, tol: f64) -> Result<HermitianEigen, LinalgError> {
    let norm = a.frobenius_norm();
    let defect = a.hermiticity_defect();
    if defect > tol * norm.max(f64::MIN_POSITIVE) {
        return Err(LinalgError::NotHermitian {
            residual: defect / norm.max(f64::MIN_POSITIVE),
        });
    }
    let n = a.dim();
    let mut m = a.hermitian_part();
    let mut u = ComplexMatrix::identity(n);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * norm * 1e-2 || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let g = apq.norm();
                if g == 0.0 {
                    continue;
                }
                // D = diag(.., e^{-i phi} at q) makes the (p, q) entry real
                let phase = apq.conj() / g;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let theta = (aqq - app) / (2.0 * g);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // combined column transform: col_p' = c col_p - s e^{-i phi} col_q,
                // col_q' = s col_p + c e^{-i phi} col_q, where e^{-i phi} = conj(apq)/|apq|
                let w = phase;
                for i in 0..n {
                    let xp = m[(i, p)];
                    let xq = m[(i, q)] * w;
                    m[(i, p)] = xp * c - xq * s;
                    m[(i, q)] = xp * s + xq * c;
                }
                for j in 0..n {
                    let xp = m[(p, j)];
                    let xq = m[(q, j)] * w.conj();
                    m[(p, j)] = xp * c - xq * s;
                    m[(q, j)] = xp * s + xq * c;
                }
                m[(p, q)] = C64::new(0.0, 0.0);
                m[(q, p)] = C64::new(0.0, 0.0);
                for i in 0..n {
                    let xp = u[(i, p)];
                    let xq = u[(i, q)] * w;
                    u[(i, p)] = xp * c - xq * s;
                    u[(i, q)] = xp * s + xq * c;
                }
            }
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let cols: Vec<Vec<C64>> = order.iter().map(|&k| u.column(k)).collect();
    let vectors = ComplexMatrix::from_columns(&cols)?;
    Ok(HermitianEigen { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_hermitian_2x2() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3
        let a = ComplexMatrix::from_rows(&[
            [C64::new(2.0, 0.0), C64::new(0.0, 1.0)],
            [C64::new(0.0, -1.0), C64::new(2.0, 0.0)],
        ])
        .unwrap();
        let e = hermitian_eigen(&a, 1e-12).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] - 3.0).abs() < 1e-14);
        let recon = e.apply_function(|w| w);
        assert!((&recon - &a).frobenius_norm() < 1e-14);
        let uu = &e.vectors.adjoint() * &e.vectors;
        assert!((&uu - &ComplexMatrix::identity(2)).frobenius_norm() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = ComplexMatrix::from_real_rows(&[[1.0, 2.0], [0.0, 1.0]]).unwrap();
        assert!(matches!(
            hermitian_eigen(&a, 1e-12),
            Err(LinalgError::NotHermitian { .. })
        ));
    }
}
