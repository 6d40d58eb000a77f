//! Dense complex linear algebra for small Hermitian problems.
//!
//! Everything the estimators and the signal model consume lives here:
//! row-major complex matrices, a cyclic-Jacobi Hermitian eigensolver,
//! Givens rotation machinery, null-space projectors and circularly
//! symmetric Gaussian sampling. Dimensions in this crate stay small
//! (receive arrays of 8–16 elements), so the Jacobi sweeps are both
//! robust and fast enough; no external LAPACK is involved.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// A complex column vector.
pub type ComplexVector = Vec<Complex64>;

/// Errors from the numerical kernels.
#[derive(Debug, Error)]
pub enum NumericsError {
    /// Jacobi sweeps did not reach the off-diagonal energy target.
    #[error("eigensolver did not converge: residual off-diagonal energy {residual:.3e} after {sweeps} sweeps")]
    NonConvergence { residual: f64, sweeps: usize },
    /// Input violated the Hermitian symmetry tolerance.
    #[error("matrix is not Hermitian: max |a_ij - conj(a_ji)| = {max_asymmetry:.3e}")]
    NotHermitian { max_asymmetry: f64 },
    /// Columns were linearly dependent where independence was required.
    #[error("rank-deficient input: effective rank {rank} < {expected}")]
    RankDeficient { rank: usize, expected: usize },
}

// ── vector helpers ───────────────────────────────────────────────────────

/// Inner product `a^H b`.
pub fn vdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    assert_eq!(a.len(), b.len(), "vdot length mismatch");
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Squared Euclidean norm.
pub fn vnorm_sq(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// Euclidean norm.
pub fn vnorm(a: &[Complex64]) -> f64 {
    vnorm_sq(a).sqrt()
}

/// Draws `n` i.i.d. circularly symmetric complex Gaussian entries with the
/// given total per-entry variance (real and imaginary parts carry half each).
pub fn sample_complex_gaussian<R: Rng + ?Sized>(n: usize, variance: f64, rng: &mut R) -> ComplexVector {
    assert!(
        variance >= 0.0 && variance.is_finite(),
        "variance must be finite and nonnegative, got {variance}"
    );
    if variance == 0.0 {
        return vec![Complex64::new(0.0, 0.0); n];
    }
    let sigma = (variance / 2.0).sqrt();
    (0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(sigma * re, sigma * im)
        })
        .collect()
}

// ── matrices ─────────────────────────────────────────────────────────────

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds a matrix from rows of real numbers (imaginary parts zero).
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        Self::from_fn(r, c, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    pub fn col(&self, j: usize) -> ComplexVector {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[Complex64]) {
        assert_eq!(v.len(), self.rows);
        for (i, &x) in v.iter().enumerate() {
            self.set(i, j, x);
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn mul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex64]) -> ComplexVector {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| v.iter().enumerate().map(|(j, x)| self.get(i, j) * x).sum())
            .collect()
    }

    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, factor: f64) -> ComplexMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= factor;
        }
        out
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sq().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Orthonormalizes the columns in place via modified Gram-Schmidt.
    /// Fails if a column falls below `1e-10` of its original norm after
    /// projection, i.e. the columns were (numerically) dependent.
    pub fn orthonormalize_columns(mut self) -> Result<ComplexMatrix, NumericsError> {
        for j in 0..self.cols {
            let mut v = self.col(j);
            let orig = vnorm(&v).max(f64::MIN_POSITIVE);
            for k in 0..j {
                let u = self.col(k);
                let proj = vdot(&u, &v);
                for (vi, ui) in v.iter_mut().zip(&u) {
                    *vi -= proj * ui;
                }
            }
            let n = vnorm(&v);
            if n <= 1e-10 * orig {
                return Err(NumericsError::RankDeficient { rank: j, expected: self.cols });
            }
            for vi in v.iter_mut() {
                *vi /= n;
            }
            self.set_col(j, &v);
        }
        Ok(self)
    }
}

/// Hermitian matrix; construction symmetrizes exactly so that
/// `a_ij == conj(a_ji)` holds bit-for-bit and diagonal imaginary parts
/// are exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    mat: ComplexMatrix,
}

impl HermitianMatrix {
    /// Hermitian symmetry tolerance for construction from a general matrix.
    pub const SYMMETRY_TOL: f64 = 1e-12;

    /// Wraps a square matrix, verifying Hermitian symmetry relative to the
    /// largest entry, then enforcing it exactly.
    pub fn new(mat: ComplexMatrix) -> Result<Self, NumericsError> {
        assert_eq!(mat.rows(), mat.cols(), "Hermitian matrix must be square");
        let scale = mat.max_abs_entry().max(1.0);
        let mut max_asym = 0.0f64;
        for i in 0..mat.rows() {
            for j in i..mat.cols() {
                let d = (mat.get(i, j) - mat.get(j, i).conj()).norm();
                max_asym = max_asym.max(d);
            }
        }
        if max_asym > Self::SYMMETRY_TOL * scale {
            return Err(NumericsError::NotHermitian { max_asymmetry: max_asym });
        }
        let mut m = mat;
        Self::symmetrize(&mut m);
        Ok(Self { mat: m })
    }

    fn symmetrize(m: &mut ComplexMatrix) {
        for i in 0..m.rows() {
            let d = m.get(i, i);
            m.set(i, i, Complex64::new(d.re, 0.0));
            for j in (i + 1)..m.cols() {
                let avg = (m.get(i, j) + m.get(j, i).conj()) * 0.5;
                m.set(i, j, avg);
                m.set(j, i, avg.conj());
            }
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { mat: ComplexMatrix::zeros(dim, dim) }
    }

    /// Diagonal matrix from real entries.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = ComplexMatrix::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, Complex64::new(d, 0.0));
        }
        Self { mat: m }
    }

    /// Scaled identity.
    pub fn scaled_identity(dim: usize, value: f64) -> Self {
        Self::from_diagonal(&vec![value; dim])
    }

    /// `A B A^H` for a general `B` Hermitian -- used for covariances of
    /// linearly transformed signals.
    pub fn congruence(a: &ComplexMatrix, b: &HermitianMatrix) -> Self {
        let prod = a.mul(b.as_matrix()).mul(&a.adjoint());
        let mut m = prod;
        Self::symmetrize(&mut m);
        Self { mat: m }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.mat.get(i, j)
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    /// Adds `weight * v v^H` in place.
    pub fn accumulate_outer(&mut self, v: &[Complex64], weight: f64) {
        assert_eq!(v.len(), self.dim());
        let n = self.dim();
        for i in 0..n {
            let vi = v[i];
            for (j, x) in v.iter().enumerate() {
                let upd = self.mat.get(i, j) + weight * vi * x.conj();
                self.mat.set(i, j, upd);
            }
        }
        Self::symmetrize(&mut self.mat);
    }

    /// Adds `value` to every diagonal entry.
    pub fn add_diagonal(&self, value: f64) -> HermitianMatrix {
        let mut out = self.clone();
        for i in 0..out.dim() {
            let d = out.mat.get(i, i);
            out.mat.set(i, i, Complex64::new(d.re + value, 0.0));
        }
        out
    }

    pub fn scale(&self, factor: f64) -> HermitianMatrix {
        Self { mat: self.mat.scale(factor) }
    }

    pub fn sub(&self, other: &HermitianMatrix) -> HermitianMatrix {
        Self { mat: self.mat.sub(&other.mat) }
    }

    pub fn add(&self, other: &HermitianMatrix) -> HermitianMatrix {
        Self { mat: self.mat.add(&other.mat) }
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.mat.frobenius_norm_sq()
    }

    /// In-place Givens similarity transform `A <- N A N^H`.
    pub fn rotate(&mut self, rot: &GivensRotation) {
        rotate_hermitian_inplace(&mut self.mat, rot);
    }

    /// Quadratic form `u^H A u`, real for Hermitian `A`.
    pub fn quadratic_form(&self, u: &[Complex64]) -> f64 {
        self.mat
            .matvec(u)
            .iter()
            .zip(u)
            .map(|(av, ui)| (ui.conj() * av).re)
            .sum()
    }
}

/// Sum of squared magnitudes of the off-diagonal entries (the joint
/// diagonalization objective for a single matrix).
pub fn off_diagonal_energy(a: &HermitianMatrix) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a.get(i, j).norm_sqr();
            }
        }
    }
    acc
}

// ── Givens rotations ─────────────────────────────────────────────────────

/// Unitary plane rotation differing from identity only in the `(i, j)`
/// block `[[c, s], [-conj(s), c]]` with real `c >= 0` and `c^2 + |s|^2 = 1`.
#[derive(Debug, Clone, Copy)]
pub struct GivensRotation {
    pub i: usize,
    pub j: usize,
    pub c: f64,
    pub s: Complex64,
}

impl GivensRotation {
    pub fn new(i: usize, j: usize, c: f64, s: Complex64) -> Self {
        assert!(i < j, "rotation indices must satisfy i < j");
        let unit = c * c + s.norm_sqr();
        assert!(
            (unit - 1.0).abs() <= 1e-12,
            "rotation parameters violate c^2 + |s|^2 = 1: got {unit}"
        );
        Self { i, j, c, s }
    }

    pub fn identity(i: usize, j: usize) -> Self {
        Self::new(i, j, 1.0, Complex64::new(0.0, 0.0))
    }

    /// The full-size rotation matrix `N(i, j)`.
    pub fn embed(&self, dim: usize) -> ComplexMatrix {
        assert!(self.j < dim, "rotation index out of range for dim {dim}");
        let mut n = ComplexMatrix::identity(dim);
        n.set(self.i, self.i, Complex64::new(self.c, 0.0));
        n.set(self.i, self.j, self.s);
        n.set(self.j, self.i, -self.s.conj());
        n.set(self.j, self.j, Complex64::new(self.c, 0.0));
        n
    }
}

/// In-place similarity transform `A <- N A N^H` touching only rows and
/// columns `i`, `j`; Hermitian symmetry of the touched entries is restored
/// exactly afterwards.
fn rotate_hermitian_inplace(m: &mut ComplexMatrix, rot: &GivensRotation) {
    let n = m.rows();
    let (i, j) = (rot.i, rot.j);
    assert!(j < n, "rotation index {j} out of range for dim {n}");
    let c = Complex64::new(rot.c, 0.0);
    let s = rot.s;
    // rows: A <- N A
    for k in 0..n {
        let a = m.get(i, k);
        let b = m.get(j, k);
        m.set(i, k, c * a + s * b);
        m.set(j, k, -s.conj() * a + c * b);
    }
    // columns: A <- A N^H
    for k in 0..n {
        let a = m.get(k, i);
        let b = m.get(k, j);
        m.set(k, i, a * c + b * s.conj());
        m.set(k, j, -a * s + b * c);
    }
    // restore exact symmetry on the touched rows/columns
    for k in 0..n {
        for &p in &[i, j] {
            if k == p {
                continue;
            }
            let avg = (m.get(p, k) + m.get(k, p).conj()) * 0.5;
            m.set(p, k, avg);
            m.set(k, p, avg.conj());
        }
    }
    let dii = m.get(i, i);
    m.set(i, i, Complex64::new(dii.re, 0.0));
    let djj = m.get(j, j);
    m.set(j, j, Complex64::new(djj.re, 0.0));
}

/// Returns `N A N^H` for a Hermitian `A`.
pub fn apply_givens(a: &HermitianMatrix, rot: &GivensRotation) -> HermitianMatrix {
    let mut m = a.as_matrix().clone();
    rotate_hermitian_inplace(&mut m, rot);
    HermitianMatrix { mat: m }
}

/// Accumulates `U <- U N^H` on the two affected columns.
fn accumulate_basis_inplace(u: &mut ComplexMatrix, rot: &GivensRotation) {
    let n = u.rows();
    let (i, j) = (rot.i, rot.j);
    let c = Complex64::new(rot.c, 0.0);
    let s = rot.s;
    for k in 0..n {
        let a = u.get(k, i);
        let b = u.get(k, j);
        u.set(k, i, a * c + b * s.conj());
        u.set(k, j, -a * s + b * c);
    }
}

/// Rotation angle that zeroes `a_pq` of a Hermitian matrix: the classic
/// Jacobi choice |theta| <= pi/4 extended to complex entries through the
/// phase of `a_pq`.
fn jacobi_rotation(m: &ComplexMatrix, p: usize, q: usize) -> GivensRotation {
    let apq = m.get(p, q);
    let mag = apq.norm();
    if mag == 0.0 {
        return GivensRotation::identity(p, q);
    }
    let app = m.get(p, p).re;
    let aqq = m.get(q, q).re;
    let tau = (app - aqq) / (2.0 * mag);
    // smaller root of t^2 + 2 tau t - 1 = 0
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let sigma = t * c;
    let s = apq * (sigma / mag);
    GivensRotation::new(p, q, c, s)
}

// ── eigendecomposition ───────────────────────────────────────────────────

/// Spectral decomposition `A = U diag(eigenvalues) U^H` with eigenvalues
/// sorted descending and `U` unitary.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// Rebuilds `U diag(lambda) U^H`.
    pub fn reconstruct(&self) -> HermitianMatrix {
        let n = self.eigenvalues.len();
        let u = &self.eigenvectors;
        let mut m = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            let lk = self.eigenvalues[k];
            if lk == 0.0 {
                continue;
            }
            for i in 0..n {
                let uik = u.get(i, k);
                for j in 0..n {
                    let v = m.get(i, j) + lk * uik * u.get(j, k).conj();
                    m.set(i, j, v);
                }
            }
        }
        HermitianMatrix::symmetrize(&mut m);
        HermitianMatrix { mat: m }
    }

    /// Rank-limited reconstruction from the leading eigenpairs, with
    /// negative coefficients clipped at zero.
    pub fn reconstruct_truncated(&self, rank: usize, shift: f64) -> HermitianMatrix {
        let n = self.eigenvalues.len();
        let mut out = HermitianMatrix::zeros(n);
        for k in 0..rank.min(n) {
            let coeff = (self.eigenvalues[k] - shift).max(0.0);
            if coeff > 0.0 {
                let col = self.eigenvectors.col(k);
                out.accumulate_outer(&col, coeff);
            }
        }
        out
    }
}

/// Maximum cyclic Jacobi sweeps before the eigensolver reports failure.
const EVD_MAX_SWEEPS: usize = 100;
/// Convergence target: off-diagonal energy relative to the squared
/// Frobenius norm of the input.
const EVD_TOL: f64 = 1e-24;

/// Full Hermitian eigendecomposition via cyclic Jacobi sweeps.
///
/// Eigenvalues come out descending; each eigenvector column is phase-fixed
/// so its first component of non-negligible modulus is real positive.
pub fn hermitian_evd(a: &HermitianMatrix) -> Result<EigenDecomposition, NumericsError> {
    let n = a.dim();
    let mut w = a.as_matrix().clone();
    let mut u = ComplexMatrix::identity(n);
    let norm_sq = w.frobenius_norm_sq();
    let target = EVD_TOL * norm_sq;

    let mut converged = norm_sq == 0.0;
    let mut sweeps = 0;
    while !converged && sweeps < EVD_MAX_SWEEPS {
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                if w.get(p, q).norm_sqr() <= target / (n * n) as f64 {
                    continue;
                }
                let rot = jacobi_rotation(&w, p, q);
                rotate_hermitian_inplace(&mut w, &rot);
                accumulate_basis_inplace(&mut u, &rot);
            }
        }
        sweeps += 1;
        let off: f64 = {
            let mut acc = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    acc += 2.0 * w.get(i, j).norm_sqr();
                }
            }
            acc
        };
        converged = off <= target;
        if !converged && sweeps == EVD_MAX_SWEEPS {
            return Err(NumericsError::NonConvergence { residual: off, sweeps });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| w.get(i, i).re).collect();
    order.sort_by(|&a, &b| diag[b].partial_cmp(&diag[a]).unwrap());

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvalues.push(diag[src]);
        let mut col = u.col(src);
        fix_column_phase(&mut col);
        eigenvectors.set_col(dst, &col);
    }
    Ok(EigenDecomposition { eigenvalues, eigenvectors })
}

/// Multiplies a unit column by a phase so its first component with modulus
/// above `1e-9` becomes real positive.
fn fix_column_phase(col: &mut [Complex64]) {
    if let Some(lead) = col.iter().find(|x| x.norm() > 1e-9) {
        let phase = lead / lead.norm();
        let corr = phase.conj();
        for x in col.iter_mut() {
            *x *= corr;
        }
    }
}

// ── rotation from pair statistics ────────────────────────────────────────

/// Extracts the `(c, s)` rotation parameters from the 2x2 or 3x3 real
/// symmetric accumulator of pair statistics: `v` is the unit eigenvector of
/// the largest eigenvalue, mapped through `c = sqrt((x+1)/2)`,
/// `s = (y1 + i y2) / (2c)`, preserving the sign of the off-diagonal
/// statistic. The degenerate `x = -1` pole returns the quarter-turn
/// rotation `c = 0, s = 1`.
pub fn givens_from_stats(gacc: &HermitianMatrix) -> Result<(f64, Complex64), NumericsError> {
    let dim = gacc.dim();
    assert!(dim == 2 || dim == 3, "pair-statistics accumulator must be 2x2 or 3x3");
    let evd = hermitian_evd(gacc)?;
    let mut v: Vec<f64> = evd.eigenvectors.col(0).iter().map(|z| z.re).collect();
    // top eigenvector of a real symmetric matrix is real up to the solver's
    // phase convention; flip so the first non-negligible component is positive
    if let Some(&lead) = v.iter().find(|x| x.abs() > 1e-12) {
        if lead < 0.0 {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
    }
    let x = v[0];
    let y1 = v[1];
    let y2 = if dim == 3 { v[2] } else { 0.0 };
    if x + 1.0 <= 1e-12 {
        return Ok((0.0, Complex64::new(1.0, 0.0)));
    }
    let c = ((x + 1.0) / 2.0).sqrt();
    let s = Complex64::new(y1, y2) / (2.0 * c);
    Ok((c, s))
}

// ── null-space projector ─────────────────────────────────────────────────

/// Orthogonal projector onto the null space of `A`, together with the
/// effective row rank that was projected out. `Q` is Hermitian, idempotent
/// and satisfies `A Q = 0`; rank-deficient inputs are handled by counting
/// only eigenvalues above `1e-10` of the largest.
pub fn null_space_projector(a: &ComplexMatrix) -> Result<(ComplexMatrix, usize), NumericsError> {
    let gram = HermitianMatrix::new(a.adjoint().mul(a)).expect("A^H A is Hermitian by construction");
    let evd = hermitian_evd(&gram)?;
    let lmax = evd.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let rank = evd
        .eigenvalues
        .iter()
        .filter(|&&l| l > 1e-10 * lmax && l > 0.0)
        .count();
    let n = a.cols();
    let mut q = ComplexMatrix::identity(n);
    for k in 0..rank {
        let u = evd.eigenvectors.col(k);
        for i in 0..n {
            for j in 0..n {
                let v = q.get(i, j) - u[i] * u[j].conj();
                q.set(i, j, v);
            }
        }
    }
    Ok((q, rank))
}
