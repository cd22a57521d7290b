//! Complex Schur factorization and eigenvector extraction.
//!
//! The matrix is reduced to upper Hessenberg form with Householder
//! reflectors, then driven to upper triangular form by single-shift QR
//! sweeps (Wilkinson shift, Givens rotations). Eigenvectors come from back
//! substitution on the triangular factor; a vanishing pivot `t_jj - t_kk` is
//! replaced by `eps * ||T||`, so defective blocks yield (nearly) parallel
//! eigenvectors instead of a division by zero.

use std::cmp::Ordering;

use super::lu::Lu;
use super::matrix::{vec_norm, ComplexMatrix, C64};
use super::svd::condition_number;
use super::LinalgError;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// QR iterations allowed per eigenvalue before giving up.
const MAX_ITER_PER_EIGENVALUE: usize = 60;

/// Gram blocks worse conditioned than this are treated as defective.
const GRAM_COND_CEILING: f64 = 1e12;

/// Left vectors longer than this after rescaling (eigenvalue condition
/// numbers beyond `1/sqrt(eps)`) mark the basis as numerically defective.
const LEFT_NORM_CEILING: f64 = 1e8;

/// `A = Q T Q^H` with `Q` unitary and `T` upper triangular.
#[derive(Clone, Debug)]
pub struct Schur {
    pub q: ComplexMatrix,
    pub t: ComplexMatrix,
}

/// Eigenvalues with matched right (column) and left (row) eigenvectors.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    /// Sorted by nonincreasing real part, ties by nonincreasing imaginary part.
    pub eigenvalues: Vec<C64>,
    /// `right[n]` satisfies `M v = λ_n v` and has unit Euclidean norm.
    pub right: Vec<Vec<C64>>,
    /// `left[n]` satisfies `u M = λ_n u`. When `biorthogonal` is set,
    /// `left[m] · right[n] = δ_mn`; otherwise the rows have unit norm.
    pub left: Vec<Vec<C64>>,
    /// max over n of the relative eigen-equation residuals of both vector sets.
    pub residual: f64,
    pub biorthogonal: bool,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Matrix with the right eigenvectors as columns.
    pub fn right_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_columns(&self.right).expect("eigenvectors are finite")
    }

    /// Matrix with the left eigenvectors as rows.
    pub fn left_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_rows(&self.left).expect("eigenvectors are finite")
    }

    /// Condition number of the right eigenvector matrix.
    pub fn eigenvector_condition(&self) -> f64 {
        condition_number(&self.right_matrix())
    }
}

/// Householder reduction to upper Hessenberg form, accumulating the unitary factor.
fn hessenberg(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.dim();
    let mut h = a.clone();
    let mut q = ComplexMatrix::identity(n);
    if n < 3 {
        return (h, q);
    }
    for j in 0..n - 2 {
        let mut v: Vec<C64> = (j + 1..n).map(|i| h[(i, j)]).collect();
        let xnorm = vec_norm(&v);
        if xnorm == 0.0 {
            continue;
        }
        let x0 = v[0];
        let phase = if x0.norm() == 0.0 {
            ONE
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vv == 0.0 {
            continue;
        }
        for col in j..n {
            let s: C64 = v
                .iter()
                .enumerate()
                .map(|(i, vi)| vi.conj() * h[(j + 1 + i, col)])
                .sum();
            let f = s * (2.0 / vv);
            for (i, vi) in v.iter().enumerate() {
                h[(j + 1 + i, col)] -= f * vi;
            }
        }
        for m in [&mut h, &mut q] {
            for row in 0..n {
                let s: C64 = v
                    .iter()
                    .enumerate()
                    .map(|(i, vi)| m[(row, j + 1 + i)] * vi)
                    .sum();
                let f = s * (2.0 / vv);
                for (i, vi) in v.iter().enumerate() {
                    m[(row, j + 1 + i)] -= f * vi.conj();
                }
            }
        }
        h[(j + 1, j)] = alpha;
        for i in j + 2..n {
            h[(i, j)] = ZERO;
        }
    }
    (h, q)
}

/// Rotation `[c, s; -conj(s), c]` mapping `(x, y)` to `(r, 0)`.
fn givens(x: C64, y: C64) -> (f64, C64, C64) {
    if y == ZERO {
        return (1.0, ZERO, x);
    }
    if x == ZERO {
        let ay = y.norm();
        return (0.0, y.conj() / ay, C64::new(ay, 0.0));
    }
    let ax = x.norm();
    let nrm = ax.hypot(y.norm());
    let phase = x / ax;
    (ax / nrm, phase * y.conj() / nrm, phase * nrm)
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let bc = b * c;
    let disc = (half * half + bc).sqrt();
    let sgn = if (half.conj() * disc).re >= 0.0 {
        1.0
    } else {
        -1.0
    };
    let denom = half + disc * sgn;
    if denom == ZERO {
        d
    } else {
        d - bc / denom
    }
}

/// Complex Schur factorization.
pub fn schur(a: &ComplexMatrix) -> Result<Schur, LinalgError> {
    if !a.is_finite() {
        return Err(LinalgError::NonFinite { row: 0, col: 0 });
    }
    let n = a.dim();
    let (mut h, mut q) = hessenberg(a);
    let norm = h.frobenius_norm();
    if n == 1 || norm == 0.0 {
        return Ok(Schur { q, t: h });
    }
    let eps = f64::EPSILON;
    let small = f64::MIN_POSITIVE * (n as f64) / eps;
    let max_total = MAX_ITER_PER_EIGENVALUE * n;
    let mut total = 0usize;
    let mut iter = 0usize;
    let mut hi = n - 1;
    let mut rots: Vec<(usize, f64, C64)> = Vec::with_capacity(n);

    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let mut tst = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if tst == 0.0 {
                tst = norm;
            }
            if sub <= eps * tst || sub <= small {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_total {
            return Err(LinalgError::ConvergenceFailure {
                residual: h[(hi, hi - 1)].norm() / norm,
                tol: eps,
            });
        }

        let d = h[(hi, hi)];
        let mu = if iter.is_multiple_of(10) {
            // exceptional shift to break cycles
            d + h[(hi, hi - 1)].norm() * 0.75
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], d)
        };

        for i in l..=hi {
            h[(i, i)] -= mu;
        }
        rots.clear();
        for k in l..hi {
            let (c, s, r) = givens(h[(k, k)], h[(k + 1, k)]);
            h[(k, k)] = r;
            h[(k + 1, k)] = ZERO;
            for col in k + 1..n {
                let x = h[(k, col)];
                let y = h[(k + 1, col)];
                h[(k, col)] = x * c + s * y;
                h[(k + 1, col)] = -s.conj() * x + y * c;
            }
            rots.push((k, c, s));
        }
        for &(k, c, s) in &rots {
            for row in 0..=(k + 1) {
                let x = h[(row, k)];
                let y = h[(row, k + 1)];
                h[(row, k)] = x * c + s.conj() * y;
                h[(row, k + 1)] = -s * x + y * c;
            }
            for row in 0..n {
                let x = q[(row, k)];
                let y = q[(row, k + 1)];
                q[(row, k)] = x * c + s.conj() * y;
                q[(row, k + 1)] = -s * x + y * c;
            }
        }
        for i in l..=hi {
            h[(i, i)] += mu;
        }
    }

    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = ZERO;
        }
    }
    if !h.is_finite() || !q.is_finite() {
        return Err(LinalgError::ConvergenceFailure {
            residual: f64::INFINITY,
            tol: eps,
        });
    }
    Ok(Schur { q, t: h })
}

/// Smith's complex division, safe for denominators near the underflow threshold.
fn cdiv(a: C64, b: C64) -> C64 {
    if b.re.abs() >= b.im.abs() {
        let r = b.im / b.re;
        let den = b.re + b.im * r;
        C64::new((a.re + a.im * r) / den, (a.im - a.re * r) / den)
    } else {
        let r = b.re / b.im;
        let den = b.re * r + b.im;
        C64::new((a.re * r + a.im) / den, (a.im * r - a.re) / den)
    }
}

/// Eigenvectors of an upper triangular matrix, in the triangular basis.
fn triangular_eigenvectors(t: &ComplexMatrix) -> Vec<Vec<C64>> {
    let n = t.dim();
    let smin = (f64::EPSILON * t.frobenius_norm()).max(f64::MIN_POSITIVE);
    (0..n)
        .map(|k| {
            let mut y = vec![ZERO; n];
            y[k] = ONE;
            let tkk = t[(k, k)];
            for j in (0..k).rev() {
                let s: C64 = (j + 1..=k).map(|l| t[(j, l)] * y[l]).sum();
                let mut d = t[(j, j)] - tkk;
                if d.norm() < smin {
                    d = C64::new(smin, 0.0);
                }
                y[j] = -cdiv(s, d);
                let big = y[j].norm();
                if big > 1e100 {
                    for z in y.iter_mut().take(k + 1).skip(j) {
                        *z /= big;
                    }
                }
            }
            y
        })
        .collect()
}

fn normalize(mut v: Vec<C64>) -> Vec<C64> {
    let nrm = vec_norm(&v);
    if nrm > 0.0 {
        for z in v.iter_mut() {
            *z /= nrm;
        }
    }
    v
}

/// Right eigenpairs from a Schur factorization, unsorted.
fn right_pairs(a: &ComplexMatrix) -> Result<(Vec<C64>, Vec<Vec<C64>>), LinalgError> {
    let Schur { q, t } = schur(a)?;
    let values = t.diagonal();
    let vectors = triangular_eigenvectors(&t)
        .into_iter()
        .map(|y| normalize(q.matvec(&y)))
        .collect();
    Ok((values, vectors))
}

/// Permutation sorting by nonincreasing real part; real parts within
/// `tie` of the first member of a run are ordered by nonincreasing imaginary part.
pub(crate) fn spectral_order(values: &[C64], tie: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| values[j].re.total_cmp(&values[i].re).then(i.cmp(&j)));
    let mut start = 0;
    while start < idx.len() {
        let lead = values[idx[start]].re;
        let mut end = start + 1;
        while end < idx.len() && lead - values[idx[end]].re <= tie {
            end += 1;
        }
        idx[start..end].sort_by(|&i, &j| {
            values[j]
                .im
                .total_cmp(&values[i].im)
                .then_with(|| values[j].re.total_cmp(&values[i].re))
                .then(i.cmp(&j))
        });
        start = end;
    }
    idx
}

/// Eigenvalues only, in spectral order. No residual check.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<C64>, LinalgError> {
    let t = schur(a)?.t;
    let values = t.diagonal();
    let tie = 1e-10 * a.frobenius_norm();
    Ok(spectral_order(&values, tie)
        .into_iter()
        .map(|i| values[i])
        .collect())
}

fn dot_rows(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Groups indices whose eigenvalues lie within `radius` of each other (single linkage).
fn clusters(values: &[C64], radius: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= radius {
                let (ri, rj) = (find(&mut label, i), find(&mut label, j));
                if ri != rj {
                    label[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut label, i);
        match root_of[r] {
            Some(g) => groups[g].push(i),
            None => {
                root_of[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }
    groups
}

/// Rescales left rows so that `left · right = I` block by block over
/// eigenvalue clusters. Returns false if some block is numerically singular.
fn biorthonormalize(values: &[C64], right: &[Vec<C64>], left: &mut [Vec<C64>], scale: f64) -> bool {
    let radius = f64::EPSILON.sqrt() * scale;
    let mut ok = true;
    for group in clusters(values, radius) {
        let k = group.len();
        let mut gram = ComplexMatrix::zeros(k);
        for (a, &m) in group.iter().enumerate() {
            for (b, &n) in group.iter().enumerate() {
                gram[(a, b)] = dot_rows(&left[m], &right[n]);
            }
        }
        if gram.max_abs() == 0.0 || condition_number(&gram) > GRAM_COND_CEILING {
            ok = false;
            continue;
        }
        // rows of G^{-1} L_group: solve G X = L_group column by column
        let lu = match Lu::new(&gram) {
            Ok(lu) => lu,
            Err(_) => {
                ok = false;
                continue;
            }
        };
        let dim = left[group[0]].len();
        let mut new_rows = vec![vec![ZERO; dim]; k];
        for c in 0..dim {
            let rhs: Vec<C64> = group.iter().map(|&m| left[m][c]).collect();
            let x = lu.solve_vec(&rhs);
            for (a, xa) in x.into_iter().enumerate() {
                new_rows[a][c] = xa;
            }
        }
        for (a, &m) in group.iter().enumerate() {
            left[m] = std::mem::take(&mut new_rows[a]);
            if vec_norm(&left[m]) > LEFT_NORM_CEILING {
                ok = false;
            }
        }
    }
    ok
}

/// Full eigensystem with residual guarantee `residual <= tol` (relative to `||M||_F`).
pub fn eig(m: &ComplexMatrix, tol: f64) -> Result<EigenSystem, LinalgError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(LinalgError::InvalidTolerance(tol));
    }
    let n = m.dim();
    let norm = m.frobenius_norm();
    let scale = if norm > 0.0 { norm } else { 1.0 };

    let (values, vectors) = right_pairs(m)?;
    let (adj_values, adj_vectors) = right_pairs(&m.adjoint())?;

    let order = spectral_order(&values, 1e-10 * scale);
    let eigenvalues: Vec<C64> = order.iter().map(|&i| values[i]).collect();
    let right: Vec<Vec<C64>> = order.iter().map(|&i| vectors[i].clone()).collect();

    // pair each eigenvalue λ with the adjoint eigenvector whose eigenvalue is closest to conj(λ)
    let mut used = vec![false; n];
    let mut left: Vec<Vec<C64>> = Vec::with_capacity(n);
    for lam in &eigenvalues {
        let target = lam.conj();
        let best = (0..n)
            .filter(|&j| !used[j])
            .min_by(|&i, &j| {
                (adj_values[i] - target)
                    .norm()
                    .partial_cmp(&(adj_values[j] - target).norm())
                    .unwrap_or(Ordering::Equal)
            })
            .expect("as many adjoint eigenvectors as eigenvalues");
        used[best] = true;
        left.push(adj_vectors[best].iter().map(|z| z.conj()).collect());
    }

    let biorthogonal = biorthonormalize(&eigenvalues, &right, &mut left, scale);

    let mut residual: f64 = 0.0;
    for (k, lam) in eigenvalues.iter().enumerate() {
        let mv = m.matvec(&right[k]);
        let r: Vec<C64> = mv.iter().zip(&right[k]).map(|(a, b)| a - lam * b).collect();
        residual = residual.max(vec_norm(&r) / scale);

        let lnorm = vec_norm(&left[k]);
        if lnorm > 0.0 {
            let um = m.vecmat(&left[k]);
            let r: Vec<C64> = um.iter().zip(&left[k]).map(|(a, b)| a - lam * b).collect();
            residual = residual.max(vec_norm(&r) / (scale * lnorm));
        }
    }
    let finite = right
        .iter()
        .chain(left.iter())
        .flatten()
        .all(|z| z.is_finite());
    if !finite || !residual.is_finite() || residual > tol {
        return Err(LinalgError::ConvergenceFailure { residual, tol });
    }
    Ok(EigenSystem {
        eigenvalues,
        right,
        left,
        residual,
        biorthogonal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: &[[f64; 2]]) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(rows).unwrap()
    }

    #[test]
    fn schur_is_unitary_similarity() {
        let a = ComplexMatrix::from_rows(&[
            [C64::new(1.0, 2.0), C64::new(-0.5, 0.1), C64::new(0.3, 0.0)],
            [C64::new(0.2, -1.0), C64::new(2.0, 0.0), C64::new(1.0, 1.0)],
            [C64::new(0.0, 0.7), C64::new(-3.0, 0.2), C64::new(0.5, -0.5)],
        ])
        .unwrap();
        let Schur { q, t } = schur(&a).unwrap();
        let recon = &(&q * &t) * &q.adjoint();
        assert!((&recon - &a).frobenius_norm() < 1e-13 * a.frobenius_norm());
        let qq = &q.adjoint() * &q;
        assert!((&qq - &ComplexMatrix::identity(3)).frobenius_norm() < 1e-14);
    }

    #[test]
    fn diagonal_input() {
        let sys = eig(&real(&[[2.0, 0.0], [0.0, -1.0]]), 1e-10).unwrap();
        assert_eq!(
            sys.eigenvalues,
            vec![C64::new(2.0, 0.0), C64::new(-1.0, 0.0)]
        );
        assert!((sys.right[0][0].norm() - 1.0).abs() < 1e-15);
        assert!((sys.right[1][1].norm() - 1.0).abs() < 1e-15);
        assert!(sys.biorthogonal);
    }

    #[test]
    fn toy_unbroken_and_broken() {
        let s = 0.75f64.sqrt();
        let sys = eig(&real(&[[1.0, 0.5], [-0.5, -1.0]]), 1e-10).unwrap();
        assert!((sys.eigenvalues[0] - C64::new(s, 0.0)).norm() < 1e-14);
        assert!((sys.eigenvalues[1] - C64::new(-s, 0.0)).norm() < 1e-14);

        let r = 3f64.sqrt();
        let sys = eig(&real(&[[1.0, 2.0], [-2.0, -1.0]]), 1e-10).unwrap();
        assert!((sys.eigenvalues[0] - C64::new(0.0, r)).norm() < 1e-14);
        assert!((sys.eigenvalues[1] - C64::new(0.0, -r)).norm() < 1e-14);
    }

    #[test]
    fn left_right_biorthonormal() {
        let m = real(&[[1.0, 0.5], [-0.5, -1.0]]);
        let sys = eig(&m, 1e-10).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let d = dot_rows(&sys.left[a], &sys.right[b]);
                let expected = if a == b { ONE } else { ZERO };
                assert!((d - expected).norm() < 1e-13, "{a} {b} {d}");
            }
        }
    }

    #[test]
    fn jordan_block_gives_parallel_vectors() {
        let sys = eig(&real(&[[1.0, 1.0], [-1.0, -1.0]]), 1e-10).unwrap();
        let overlap = super::super::matrix::vec_dot(&sys.right[0], &sys.right[1]).norm();
        assert!(overlap > 1.0 - 1e-10);
        assert!(!sys.biorthogonal);
    }

    #[test]
    fn ordering_breaks_real_ties_by_imaginary_part() {
        let vals = [
            C64::new(0.0, -1.0),
            C64::new(1e-17, 1.0),
            C64::new(2.0, 0.0),
            C64::new(-1.0, 0.0),
        ];
        let order = spectral_order(&vals, 1e-12);
        assert_eq!(order, vec![2, 1, 0, 3]);
    }

    #[test]
    fn identity_is_handled() {
        let sys = eig(&ComplexMatrix::identity(3), 1e-10).unwrap();
        assert!(sys.biorthogonal);
        let v = sys.right_matrix();
        let l = sys.left_matrix();
        assert!((&(&l * &v) - &ComplexMatrix::identity(3)).frobenius_norm() < 1e-14);
    }
}
