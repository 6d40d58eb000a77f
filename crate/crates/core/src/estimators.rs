//! Interference covariance estimators.
//!
//! Four estimators map slot-1 snapshots (plus a rank) to a Hermitian
//! positive-semidefinite estimate of the jamming covariance:
//!
//! - [`scm`] -- the plain sample covariance matrix (maximum likelihood,
//!   unstructured),
//! - [`evd_truncate`] -- rank-r truncation of the SCM spectrum, no noise
//!   correction,
//! - [`pca_evd`] -- rank-r truncation with the noise floor (mean of the
//!   trailing eigenvalues) subtracted from the kept eigenvalues,
//! - [`jd`] -- joint diagonalization of the cumulative noise-corrected
//!   sample covariances through Givens rotation sweeps, followed by a
//!   rank-r diagonal reassembly.
//!
//! The joint-diagonalization core [`joint_diagonalize`] works on any
//! family of Hermitian matrices and is exposed for direct use.

use num_complex::Complex64;
use std::fmt;

use crate::numerics::{
    givens_from_stats, hermitian_evd, off_diagonal_energy, ComplexMatrix, ComplexVector,
    GivensRotation, HermitianMatrix,
};
use crate::rank::tail_noise_estimate;

/// Which estimator produced a covariance estimate. `Ideal` marks the
/// population ground truth used as a performance ceiling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Scm,
    Evd,
    PcaEvd,
    Jd,
    Ideal,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Scm, Method::Evd, Method::PcaEvd, Method::Jd, Method::Ideal];

    /// Column-friendly lowercase key.
    pub fn key(&self) -> &'static str {
        match self {
            Method::Scm => "scm",
            Method::Evd => "evd",
            Method::PcaEvd => "pca_evd",
            Method::Jd => "jd",
            Method::Ideal => "ideal",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "scm" => Some(Method::Scm),
            "evd" => Some(Method::Evd),
            "pca_evd" | "pcaevd" => Some(Method::PcaEvd),
            "jd" => Some(Method::Jd),
            "ideal" => Some(Method::Ideal),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Method::Scm => "SCM",
            Method::Evd => "EVD",
            Method::PcaEvd => "PCA-EVD",
            Method::Jd => "JD",
            Method::Ideal => "ideal",
        };
        write!(f, "{name}")
    }
}

/// A Hermitian PSD covariance estimate tagged with its provenance.
#[derive(Debug, Clone)]
pub struct CovarianceEstimate {
    pub matrix: HermitianMatrix,
    pub method: Method,
    /// Rank the estimator used (and, for the beamformer, the dimension of
    /// the interference subspace to null).
    pub rank_used: usize,
    /// Noise power estimate that was subtracted, if any.
    pub noise_var_hat: f64,
}

/// Cumulative noise-corrected sample covariances `R_k`, `k = r+1 ..= L`.
#[derive(Debug, Clone)]
pub struct ScmSequence {
    pub matrices: Vec<HermitianMatrix>,
    /// Sample count of the first matrix (`r + 1`).
    pub first_k: usize,
}

/// Plain sample covariance `(1/L) sum y_k y_k^H`.
pub fn scm(samples: &[ComplexVector]) -> CovarianceEstimate {
    assert!(!samples.is_empty(), "scm needs at least one sample");
    let dim = samples[0].len();
    let mut acc = HermitianMatrix::zeros(dim);
    let w = 1.0 / samples.len() as f64;
    for y in samples {
        acc.accumulate_outer(y, w);
    }
    CovarianceEstimate {
        matrix: acc,
        method: Method::Scm,
        rank_used: samples.len().min(dim),
        noise_var_hat: 0.0,
    }
}

/// SCM with a known noise floor removed: eigenvalues of `SCM - sigma_b2 I`
/// are clipped at zero so the estimate stays PSD. The nulling rank is
/// supplied by the caller (the SCM itself is full rank for `L >= dim`).
pub fn scm_debiased(samples: &[ComplexVector], sigma_b2: f64, nulling_rank: usize) -> CovarianceEstimate {
    let base = scm(samples);
    let evd = hermitian_evd(&base.matrix).expect("SCM eigendecomposition");
    let dim = base.matrix.dim();
    let matrix = evd.reconstruct_truncated(dim, sigma_b2);
    CovarianceEstimate {
        matrix,
        method: Method::Scm,
        rank_used: nulling_rank,
        noise_var_hat: sigma_b2,
    }
}

/// Rank-r truncation of a covariance spectrum without noise subtraction.
pub fn evd_truncate_cov(cov: &HermitianMatrix, r: usize) -> CovarianceEstimate {
    assert!(r >= 1 && r < cov.dim(), "rank {r} out of range for dim {}", cov.dim());
    let evd = hermitian_evd(cov).expect("covariance eigendecomposition");
    CovarianceEstimate {
        matrix: evd.reconstruct_truncated(r, 0.0),
        method: Method::Evd,
        rank_used: r,
        noise_var_hat: 0.0,
    }
}

/// Rank-r truncation of the SCM without noise subtraction.
pub fn evd_truncate(samples: &[ComplexVector], r: usize) -> CovarianceEstimate {
    evd_truncate_cov(&scm(samples).matrix, r)
}

/// PCA-style reconstruction from a covariance matrix: estimate the noise
/// power as the mean of the trailing `dim - r` eigenvalues, subtract it
/// from the kept eigenvalues (clipping at zero) and rebuild rank r.
pub fn pca_evd_cov(cov: &HermitianMatrix, r: usize) -> CovarianceEstimate {
    assert!(r >= 1 && r < cov.dim(), "rank {r} out of range for dim {}", cov.dim());
    let evd = hermitian_evd(cov).expect("covariance eigendecomposition");
    let sigma2 = tail_noise_estimate(&evd.eigenvalues, r);
    CovarianceEstimate {
        matrix: evd.reconstruct_truncated(r, sigma2),
        method: Method::PcaEvd,
        rank_used: r,
        noise_var_hat: sigma2,
    }
}

/// PCA-EVD estimator from snapshots.
pub fn pca_evd(samples: &[ComplexVector], r: usize) -> CovarianceEstimate {
    pca_evd_cov(&scm(samples).matrix, r)
}

/// Cumulative sample covariances of the first `k` snapshots minus the
/// supplied noise floor, for `k = r+1 ..= L`, built in one pass over the
/// running sum.
pub fn cumulative_scms(samples: &[ComplexVector], r: usize, sigma_b2_hat: f64) -> ScmSequence {
    let l = samples.len();
    assert!(l > r, "need more samples than the rank: L = {l}, r = {r}");
    let dim = samples[0].len();
    let mut running = HermitianMatrix::zeros(dim);
    let mut matrices = Vec::with_capacity(l - r);
    for (idx, y) in samples.iter().enumerate() {
        running.accumulate_outer(y, 1.0);
        let k = idx + 1;
        if k > r {
            let rk = running.scale(1.0 / k as f64).add_diagonal(-sigma_b2_hat);
            matrices.push(rk);
        }
    }
    ScmSequence { matrices, first_k: r + 1 }
}

/// Outcome of the Givens-rotation sweeps.
#[derive(Debug, Clone)]
pub struct JointDiagResult {
    /// Unitary matrix such that `t^H R_k t` is (approximately) diagonal
    /// for every input matrix.
    pub t: ComplexMatrix,
    /// The transformed matrices `t^H R_k t`.
    pub rotated: Vec<HermitianMatrix>,
    pub converged: bool,
    pub sweeps: usize,
    /// Summed off-diagonal energy after each sweep; entry 0 is the
    /// starting value.
    pub off_history: Vec<f64>,
}

const JD_MAX_SWEEPS: usize = 50;
const JD_REL_DECREASE: f64 = 1e-10;

/// Pair statistic `g(R) = [r_ii - r_jj, 2 Re r_ij, 2 Im r_ij]` -- all real
/// for Hermitian input. The third component extends the real-symmetric
/// two-vector form to complex Hermitian matrices; it vanishes on real input.
fn pair_statistic(m: &HermitianMatrix, i: usize, j: usize) -> [f64; 3] {
    let rij = m.get(i, j);
    [m.get(i, i).re - m.get(j, j).re, 2.0 * rij.re, 2.0 * rij.im]
}

/// Jointly diagonalizes a family of Hermitian matrices by cyclic sweeps of
/// Givens rotations. Each pair visit rebuilds the 3x3 accumulator of pair
/// statistics from the currently rotated matrices, takes its top
/// eigenvector and applies the induced rotation to the whole family.
/// Sweeps stop when the summed off-diagonal energy stops decreasing
/// (relative change below `1e-10`) or after 50 sweeps.
pub fn joint_diagonalize(mats: &[HermitianMatrix]) -> JointDiagResult {
    assert!(!mats.is_empty(), "need at least one matrix");
    let dim = mats[0].dim();
    assert!(mats.iter().all(|m| m.dim() == dim), "dimension mismatch in family");

    let mut work: Vec<HermitianMatrix> = mats.to_vec();
    // accumulated rotations W with R' = W R W^H; the diagonalizer is T = W^H
    let mut w = ComplexMatrix::identity(dim);
    let total_off = |family: &[HermitianMatrix]| family.iter().map(off_diagonal_energy).sum::<f64>();
    let norm_floor: f64 = 1e-24 * mats.iter().map(HermitianMatrix::frobenius_norm_sq).sum::<f64>();

    let mut off_history = vec![total_off(&work)];
    let mut converged = off_history[0] <= norm_floor;
    let mut sweeps = 0;
    let scale = 1.0 / mats.len() as f64;

    while !converged && sweeps < JD_MAX_SWEEPS {
        for i in 0..dim - 1 {
            for j in (i + 1)..dim {
                let mut gacc = ComplexMatrix::zeros(3, 3);
                for m in &work {
                    let g = pair_statistic(m, i, j);
                    for a in 0..3 {
                        for b in 0..3 {
                            let v = gacc.get(a, b) + Complex64::new(scale * g[a] * g[b], 0.0);
                            gacc.set(a, b, v);
                        }
                    }
                }
                let gacc = HermitianMatrix::new(gacc).expect("pair accumulator is real symmetric");
                let (c, s) = givens_from_stats(&gacc).expect("3x3 eigensolver on pair statistics");
                if (c - 1.0).abs() < 1e-15 && s.norm_sqr() < 1e-30 {
                    continue;
                }
                let rot = GivensRotation::new(i, j, c, s);
                for m in work.iter_mut() {
                    m.rotate(&rot);
                }
                // W <- N W (left multiplication on the affected rows)
                let cc = Complex64::new(rot.c, 0.0);
                for k in 0..dim {
                    let a = w.get(i, k);
                    let b = w.get(j, k);
                    w.set(i, k, cc * a + rot.s * b);
                    w.set(j, k, -rot.s.conj() * a + cc * b);
                }
            }
        }
        sweeps += 1;
        let off = total_off(&work);
        let prev = *off_history.last().unwrap();
        off_history.push(off);
        converged = off <= norm_floor || (prev - off) <= JD_REL_DECREASE * prev.max(norm_floor);
    }

    JointDiagResult {
        t: w.adjoint(),
        rotated: work,
        converged,
        sweeps,
        off_history,
    }
}

/// Joint-diagonalization estimate plus convergence diagnostics.
#[derive(Debug, Clone)]
pub struct JdEstimate {
    pub estimate: CovarianceEstimate,
    pub converged: bool,
    pub sweeps: usize,
}

/// Joint-diagonalization estimator: noise floor from the full-SCM spectrum,
/// cumulative covariance family, Givens sweeps, then a rank-r diagonal
/// reassembly from the rotated final matrix (entries sorted descending,
/// clipped at zero).
pub fn jd(samples: &[ComplexVector], r: usize) -> JdEstimate {
    let l = samples.len();
    let dim = samples[0].len();
    assert!(l > r, "need more samples than the rank: L = {l}, r = {r}");
    assert!(r >= 1 && r < dim, "rank {r} out of range for dim {dim}");

    let base = scm(samples);
    let spectrum = hermitian_evd(&base.matrix).expect("SCM eigendecomposition");
    let sigma2 = tail_noise_estimate(&spectrum.eigenvalues, r);

    let seq = cumulative_scms(samples, r, sigma2);
    let res = joint_diagonalize(&seq.matrices);

    let last = res.rotated.last().expect("non-empty family");
    let mut order: Vec<usize> = (0..dim).collect();
    let diag: Vec<f64> = (0..dim).map(|i| last.get(i, i).re).collect();
    order.sort_by(|&a, &b| diag[b].partial_cmp(&diag[a]).unwrap());

    let mut matrix = HermitianMatrix::zeros(dim);
    for &col_idx in order.iter().take(r) {
        let lambda = diag[col_idx].max(0.0);
        if lambda > 0.0 {
            matrix.accumulate_outer(&res.t.col(col_idx), lambda);
        }
    }

    JdEstimate {
        estimate: CovarianceEstimate {
            matrix,
            method: Method::Jd,
            rank_used: r,
            noise_var_hat: sigma2,
        },
        converged: res.converged,
        sweeps: res.sweeps,
    }
}

/// Ground-truth estimate wrapper for the ideal-covariance baseline.
pub fn ideal_estimate(truth: &HermitianMatrix, rank: usize) -> CovarianceEstimate {
    CovarianceEstimate {
        matrix: truth.clone(),
        method: Method::Ideal,
        rank_used: rank,
        noise_var_hat: 0.0,
    }
}

// re-export used by tests and the beamformer
pub use crate::numerics::NumericsError;
