use super::matrix::{ComplexMatrix, C64};
use super::LinalgError;

/// LU factorization with partial pivoting, `P A = L U`, packed in one matrix.
pub struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn new(a: &ComplexMatrix) -> Result<Self, LinalgError> {
        let n = a.dim();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs();
        if scale == 0.0 {
            return Err(LinalgError::Singular);
        }
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            if pmax <= scale * f64::EPSILON * 1e-3 {
                return Err(LinalgError::Singular);
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve_vec(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.dim();
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    pub fn solve(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let n = b.dim();
        let cols: Vec<Vec<C64>> = (0..n).map(|j| self.solve_vec(&b.column(j))).collect();
        let mut out = ComplexMatrix::zeros(n);
        for (j, col) in cols.iter().enumerate() {
            for (i, &z) in col.iter().enumerate() {
                out[(i, j)] = z;
            }
        }
        out
    }
}

pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let x = Lu::new(a)?.solve(b);
    if x.is_finite() {
        Ok(x)
    } else {
        Err(LinalgError::Singular)
    }
}

pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    solve(a, &ComplexMatrix::identity(a.dim()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_small_matrix() {
        let a = ComplexMatrix::from_rows(&[
            [C64::new(2.0, 1.0), C64::new(0.0, -1.0)],
            [C64::new(1.0, 0.0), C64::new(3.0, 0.5)],
        ])
        .unwrap();
        let inv = inverse(&a).unwrap();
        let prod = &a * &inv;
        assert!((&prod - &ComplexMatrix::identity(2)).frobenius_norm() < 1e-14);
    }

    #[test]
    fn singular_is_reported() {
        let a = ComplexMatrix::from_real_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        assert!(matches!(inverse(&a), Err(LinalgError::Singular)));
    }
}
