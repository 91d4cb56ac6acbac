//! Dense matrix helpers for the small systems this library works with:
//! symmetric eigenvalues via cyclic Jacobi sweeps, induced 2-norms through the
//! Gram matrix, and a steady-state (Lyapunov) solver built on a Kronecker
//! expansion. Everything is sized for state dimensions up to [`MAX_DIM`]; none
//! of it is meant for large-scale work.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported dimension for eigenvalue and steady-state solves.
pub const MAX_DIM: usize = 16;

/// Relative entry tolerance when checking that a matrix is symmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// The Jacobi iteration stops once the off-diagonal Frobenius mass drops
/// below this fraction of the original matrix norm.
const JACOBI_TOL: f64 = 1e-14;

/// Jacobi sweeps needed in practice: a handful. This cap only catches bugs.
const MAX_JACOBI_SWEEPS: usize = 100;

/// Euclidean norm of a slice.
pub fn vec_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Row-major dense matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from nested rows; every row must have the same length.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::DimensionMismatch("matrix needs at least one row".into()));
        }
        let cols = rows[0].len();
        if cols == 0 {
            return Err(Error::DimensionMismatch("matrix rows must be non-empty".into()));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "row {} has {} entries, expected {}",
                bad,
                rows[bad].len(),
                cols
            )));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product into a caller-provided buffer.
    pub fn mul_vec_into(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for i in 0..self.rows {
            let mut acc = 0.0;
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        Ok(out)
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= c;
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        vec_norm(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// The quadratic form `v' M v`; dimensions are the caller's contract.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        debug_assert!(self.is_square() && v.len() == self.rows);
        let mut acc = 0.0;
        for i in 0..self.rows {
            let mut row = 0.0;
            for j in 0..self.cols {
                row += self[(i, j)] * v[j];
            }
            acc += v[i] * row;
        }
        acc
    }

    pub fn check_finite(&self, context: &str) -> Result<()> {
        if self.data.iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite { context: context.into() })
        }
    }

    /// Verifies near-symmetry: each skew pair must agree to
    /// [`SYMMETRY_TOL`] relative to the largest entry magnitude.
    pub fn check_symmetric(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "expected a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let tol = SYMMETRY_TOL * self.max_abs().max(1.0);
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let delta = (self[(i, j)] - self[(j, i)]).abs();
                if delta > tol {
                    return Err(Error::NotSymmetric { row: i, col: j, delta, tol });
                }
            }
        }
        Ok(())
    }

    /// `(M + M') / 2`, the canonical cleanup after a symmetry check passes.
    pub fn symmetrized(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let avg = 0.5 * (self[(i, j)] + self[(j, i)]);
                out[(i, j)] = avg;
                out[(j, i)] = avg;
            }
        }
        out
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

// Serialized as nested row arrays so TOML configs read like the math.
impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            let row: Vec<f64> = (0..self.cols).map(|j| self[(i, j)]).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(deserializer)?;
        Matrix::from_rows(rows).map_err(de::Error::custom)
    }
}

/// All eigenvalues of a symmetric matrix, ascending.
///
/// Runs cyclic Jacobi rotations until the off-diagonal mass is negligible
/// relative to the input norm. Exact symmetry is enforced first (within
/// [`SYMMETRY_TOL`]) and the iteration works on the symmetrized copy.
pub fn sym_eigenvalues(m: &Matrix) -> Result<Vec<f64>> {
    m.check_finite("eigenvalue input")?;
    m.check_symmetric()?;
    if m.rows() > MAX_DIM {
        return Err(Error::DimensionMismatch(format!(
            "eigenvalue solve supports up to {}x{}, got {}x{}",
            MAX_DIM,
            MAX_DIM,
            m.rows(),
            m.cols()
        )));
    }
    jacobi_eigenvalues(&m.symmetrized())
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn sym_eig_min(m: &Matrix) -> Result<f64> {
    Ok(sym_eigenvalues(m)?[0])
}

/// Largest eigenvalue of a symmetric matrix.
pub fn sym_eig_max(m: &Matrix) -> Result<f64> {
    Ok(*sym_eigenvalues(m)?.last().expect("eigenvalue list is never empty"))
}

fn jacobi_eigenvalues(m: &Matrix) -> Result<Vec<f64>> {
    let n = m.rows();
    let norm = m.frobenius_norm();
    let mut a = m.clone();
    if norm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += 2.0 * a[(i, j)] * a[(i, j)];
            }
        }
        if off.sqrt() <= JACOBI_TOL * norm {
            let mut eigs: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
            eigs.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
            return Ok(eigs);
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                // Classic rotation choice: the smaller root of t^2 + 2t*theta - 1,
                // which keeps the rotation angle at most pi/4.
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for i in 0..n {
                    if i == p || i == q {
                        continue;
                    }
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = c * aip - s * aiq;
                    a[(p, i)] = a[(i, p)];
                    a[(i, q)] = s * aip + c * aiq;
                    a[(q, i)] = a[(i, q)];
                }
            }
        }
    }
    Err(Error::NumericalFailure(format!(
        "Jacobi iteration did not converge in {MAX_JACOBI_SWEEPS} sweeps"
    )))
}

/// Induced 2-norm (largest singular value) of a possibly rectangular matrix,
/// computed as the square root of the top eigenvalue of `M' M`.
pub fn induced_two_norm(m: &Matrix) -> Result<f64> {
    m.check_finite("norm input")?;
    if m.rows() > MAX_DIM || m.cols() > MAX_DIM {
        return Err(Error::DimensionMismatch(format!(
            "norm supports up to {}x{}, got {}x{}",
            MAX_DIM,
            MAX_DIM,
            m.rows(),
            m.cols()
        )));
    }
    if m.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let gram = m.transpose().mul(m)?.symmetrized();
    let top = *jacobi_eigenvalues(&gram)?.last().expect("gram has eigenvalues");
    Ok(top.max(0.0).sqrt())
}

/// Solves `A' P + P A = -Q` for symmetric positive definite `P`.
///
/// `Q` must be symmetric positive definite. The equation is expanded into an
/// `n^2 x n^2` linear system through Kronecker products and solved by Gaussian
/// elimination with partial pivoting. A pivot collapse means some eigenvalue
/// pair of `A` satisfies `lambda_i + lambda_j = 0` and the equation is
/// singular; a solution that is not positive definite certifies that `A` is
/// not Hurwitz. The result is validated against the residual
/// `||A'P + PA + Q||_F <= 1e-10 ||Q||_F` before it is returned.
pub fn solve_lyapunov(a: &Matrix, q: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "system matrix must be square, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    if n > MAX_DIM {
        return Err(Error::DimensionMismatch(format!(
            "steady-state solve supports up to {MAX_DIM}x{MAX_DIM}, got {n}x{n}"
        )));
    }
    if q.rows() != n || q.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side is {}x{}, expected {n}x{n}",
            q.rows(),
            q.cols()
        )));
    }
    a.check_finite("steady-state system matrix")?;
    q.check_finite("steady-state right-hand side")?;
    q.check_symmetric()?;
    let q_min = sym_eig_min(q)?;
    if q_min <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            context: "steady-state right-hand side".into(),
            lambda_min: q_min,
        });
    }

    // Column-major vectorization turns A'P + PA = -Q into
    // (I kron A' + A' kron I) vec(P) = -vec(Q).
    let dim = n * n;
    let mut sys = vec![0.0; dim * dim];
    let mut rhs = vec![0.0; dim];
    let col_idx = |i: usize, j: usize| j * n + i;
    for i in 0..n {
        for j in 0..n {
            let r = col_idx(i, j);
            rhs[r] = -q[(i, j)];
            for k in 0..n {
                // From the A'P term: coefficient of P[k][j].
                sys[r * dim + col_idx(k, j)] += a[(k, i)];
                // From the PA term: coefficient of P[i][k].
                sys[r * dim + col_idx(i, k)] += a[(k, j)];
            }
        }
    }

    let vec_p = gauss_solve(&mut sys, &mut rhs, dim)?;
    let mut p = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            p[(i, j)] = vec_p[col_idx(i, j)];
        }
    }
    let p = p.symmetrized();

    let residual = a.transpose().mul(&p)?.add(&p.mul(a)?)?.add(q)?;
    let limit = 1e-10 * q.frobenius_norm();
    if residual.frobenius_norm() > limit {
        return Err(Error::NumericalFailure(format!(
            "steady-state residual {:.3e} exceeds {:.3e}",
            residual.frobenius_norm(),
            limit
        )));
    }
    let p_min = sym_eig_min(&p)?;
    if p_min <= 0.0 {
        return Err(Error::NotHurwitz);
    }
    Ok(p)
}

/// In-place Gaussian elimination with partial pivoting on a dense
/// `dim x dim` system stored row-major.
fn gauss_solve(sys: &mut [f64], rhs: &mut [f64], dim: usize) -> Result<Vec<f64>> {
    let scale = sys.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    let tiny = 1e-12 * scale;
    for col in 0..dim {
        let pivot_row = (col..dim)
            .max_by(|&r1, &r2| {
                sys[r1 * dim + col]
                    .abs()
                    .partial_cmp(&sys[r2 * dim + col].abs())
                    .expect("pivot entries are finite")
            })
            .expect("column range is non-empty");
        if sys[pivot_row * dim + col].abs() <= tiny {
            return Err(Error::SingularSystem(format!(
                "pivot {:.3e} in column {col} is negligible (eigenvalue pair summing to zero?)",
                sys[pivot_row * dim + col]
            )));
        }
        if pivot_row != col {
            for j in 0..dim {
                sys.swap(col * dim + j, pivot_row * dim + j);
            }
            rhs.swap(col, pivot_row);
        }
        let pivot = sys[col * dim + col];
        for row in (col + 1)..dim {
            let factor = sys[row * dim + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            sys[row * dim + col] = 0.0;
            for j in (col + 1)..dim {
                sys[row * dim + j] -= factor * sys[col * dim + j];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0; dim];
    for row in (0..dim).rev() {
        let mut acc = rhs[row];
        for j in (row + 1)..dim {
            acc -= sys[row * dim + j] * x[j];
        }
        x[row] = acc / sys[row * dim + row];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn weight_m() -> Matrix {
        mat(&[&[1.0, 0.25], &[0.25, 1.0]])
    }

    fn decay_q() -> Matrix {
        mat(&[&[0.5, 0.25], &[0.25, 1.5]])
    }

    #[test]
    fn eig_identity_is_one() {
        for n in 1..=4 {
            let eigs = sym_eigenvalues(&Matrix::identity(n)).unwrap();
            assert!(eigs.iter().all(|&l| (l - 1.0).abs() < 1e-14));
        }
    }

    #[test]
    fn eig_weight_matrix() {
        let m = weight_m();
        assert!((sym_eig_min(&m).unwrap() - 0.75).abs() < 1e-12);
        assert!((sym_eig_max(&m).unwrap() - 1.25).abs() < 1e-12);
    }

    #[test]
    fn eig_decay_matrix() {
        let expected = 1.0 - 0.3125f64.sqrt();
        assert!((sym_eig_min(&decay_q()).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn eig_known_three_by_three() {
        // Block diagonal: the 2x2 block has eigenvalues 1 and 3.
        let m = mat(&[&[2.0, 1.0, 0.0], &[1.0, 2.0, 0.0], &[0.0, 0.0, 5.0]]);
        let eigs = sym_eigenvalues(&m).unwrap();
        assert!((eigs[0] - 1.0).abs() < 1e-12);
        assert!((eigs[1] - 3.0).abs() < 1e-12);
        assert!((eigs[2] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn eig_sum_of_squares_matches_frobenius() {
        let m = mat(&[
            &[4.0, 1.0, -2.0, 0.5],
            &[1.0, 3.0, 0.0, -1.0],
            &[-2.0, 0.0, 2.5, 0.75],
            &[0.5, -1.0, 0.75, 1.0],
        ]);
        let eigs = sym_eigenvalues(&m).unwrap();
        let sum_sq: f64 = eigs.iter().map(|l| l * l).sum();
        let frob = m.frobenius_norm();
        assert!((sum_sq - frob * frob).abs() < 1e-10 * frob * frob);
    }

    #[test]
    fn eig_rejects_asymmetry_and_nan() {
        let skew = mat(&[&[1.0, 2.0], &[1.0, 1.0]]);
        assert!(matches!(sym_eig_min(&skew), Err(Error::NotSymmetric { .. })));
        let nan = mat(&[&[f64::NAN, 0.0], &[0.0, 1.0]]);
        assert!(matches!(sym_eig_min(&nan), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn eig_accepts_rounding_level_asymmetry() {
        let m = mat(&[&[1.0, 0.25 + 1e-13], &[0.25, 1.0]]);
        assert!((sym_eig_min(&m).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn eig_rejects_oversized_input() {
        let m = Matrix::identity(MAX_DIM + 1);
        assert!(matches!(sym_eigenvalues(&m), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn norm_examples() {
        assert!((induced_two_norm(&Matrix::identity(3)).unwrap() - 1.0).abs() < 1e-12);
        assert!((induced_two_norm(&weight_m()).unwrap() - 1.25).abs() < 1e-10);
        // Product of the gain path P*B*K for the linear experiment.
        let pbk = mat(&[&[0.25, -1.0], &[1.0, -4.0]]);
        assert!((induced_two_norm(&pbk).unwrap() - 4.25).abs() < 1e-10);
    }

    #[test]
    fn norm_of_row_vector_is_euclidean() {
        let v = mat(&[&[3.0, 4.0]]);
        assert!((induced_two_norm(&v).unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(induced_two_norm(&Matrix::zeros(2, 3)).unwrap(), 0.0);
    }

    #[test]
    fn norm_scales_linearly() {
        let m = mat(&[&[1.0, -2.0], &[0.5, 3.0]]);
        let base = induced_two_norm(&m).unwrap();
        let scaled = induced_two_norm(&m.scale(-2.5)).unwrap();
        assert!((scaled - 2.5 * base).abs() < 1e-10 * base);
    }

    #[test]
    fn lyapunov_reproduces_known_pair() {
        // Closed loop [[0,1],[-1,-1]] with the decay matrix gives the weight
        // matrix back exactly.
        let a = mat(&[&[0.0, 1.0], &[-1.0, -1.0]]);
        let p = solve_lyapunov(&a, &decay_q()).unwrap();
        let expected = weight_m();
        for i in 0..2 {
            for j in 0..2 {
                assert!(
                    (p[(i, j)] - expected[(i, j)]).abs() < 1e-10,
                    "P[{i}][{j}] = {}",
                    p[(i, j)]
                );
            }
        }
    }

    #[test]
    fn lyapunov_diagonal_case() {
        let a = Matrix::identity(2).scale(-1.0);
        let p = solve_lyapunov(&a, &Matrix::identity(2).scale(2.0)).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((p[(i, j)] - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lyapunov_flags_unstable_matrix() {
        let a = Matrix::identity(2);
        assert!(matches!(
            solve_lyapunov(&a, &Matrix::identity(2)),
            Err(Error::NotHurwitz)
        ));
    }

    #[test]
    fn lyapunov_flags_singular_spectrum() {
        // Eigenvalues +1 and -1 sum to zero, so the expanded system is singular.
        let a = mat(&[&[1.0, 0.0], &[0.0, -1.0]]);
        assert!(matches!(
            solve_lyapunov(&a, &Matrix::identity(2)),
            Err(Error::SingularSystem(_))
        ));
    }

    #[test]
    fn lyapunov_requires_positive_definite_rhs() {
        let a = mat(&[&[0.0, 1.0], &[-1.0, -1.0]]);
        let q = mat(&[&[1.0, 0.0], &[0.0, -1.0]]);
        assert!(matches!(
            solve_lyapunov(&a, &q),
            Err(Error::NotPositiveDefinite { .. })
        ));
        let skew = mat(&[&[1.0, 0.5], &[0.0, 1.0]]);
        assert!(matches!(solve_lyapunov(&a, &skew), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn lyapunov_residual_on_three_by_three() {
        let a = mat(&[
            &[-3.0, 1.0, 0.5],
            &[0.0, -2.0, 1.0],
            &[0.25, -0.5, -4.0],
        ]);
        let q = Matrix::identity(3);
        let p = solve_lyapunov(&a, &q).unwrap();
        let residual = a.transpose().mul(&p).unwrap().add(&p.mul(&a).unwrap()).unwrap().add(&q).unwrap();
        assert!(residual.frobenius_norm() <= 1e-10 * q.frobenius_norm());
        assert!(sym_eig_min(&p).unwrap() > 0.0);
    }

    #[test]
    fn quad_form_and_vec_norm() {
        let m = weight_m();
        let x = [2.0, -1.0];
        // 2^2*1 + 2*2*(-1)*0.25 + 1*1 = 4 - 1 + 1.
        assert!((m.quad_form(&x) - 4.0).abs() < 1e-14);
        assert!((vec_norm(&[3.0, 4.0]) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn serde_round_trip_via_nested_arrays() {
        #[derive(Serialize, Deserialize)]
        struct Holder {
            m: Matrix,
        }
        let holder = Holder { m: weight_m() };
        let text = toml::to_string(&holder).unwrap();
        let back: Holder = toml::from_str(&text).unwrap();
        assert_eq!(back.m, holder.m);
        let ragged: std::result::Result<Holder, _> = toml::from_str("m = [[1.0, 2.0], [3.0]]");
        assert!(ragged.is_err());
    }
}
