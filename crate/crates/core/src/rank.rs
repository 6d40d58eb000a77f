//! AIC-based detection of the interference rank.
//!
//! Bob hypothesizes a rank `k`, models the received covariance as `k`
//! spikes over an isotropic noise floor, and scores each hypothesis with
//! the Akaike information criterion built from the sample eigenvalues:
//!
//! ```text
//! AIC(k) = 2 N (sum_{i<=k} ln lambda_i + (N_b - k) ln sigma_k^2)
//!          + 2 K(k) N / (N - K(k) - 1)
//! ```
//!
//! where `sigma_k^2` is the mean of the trailing eigenvalues and
//! `K(k) = k (2 N_b - k) + 1` counts the estimable parameters of the
//! rank-`k` model (spike eigenvalues, their eigenvector degrees of
//! freedom, and the noise power). Counting only the eigenvalues would make
//! the penalty step (2 per rank) smaller than the likelihood gain of
//! splitting one more noise eigenvalue off the tail -- an O(1) statistic
//! with mean near the eigenvector degrees of freedom -- so such a detector
//! always drifts to the maximum hypothesis; the full count is what makes
//! the minimum land on the spike count. The `N / (N - K - 1)` factor is
//! the small-sample bias correction of the same criterion; without it the
//! residual overfit probability keeps the detector just under reliable at
//! a hundred snapshots.
//!
//! The product form of the likelihood is evaluated in the log domain;
//! eigenvalues are floored at `1e-12` of the largest so rank-deficient
//! sample covariances (noiseless snapshots, or fewer samples than
//! antennas) stay finite.

use crate::estimators::scm;
use crate::numerics::{hermitian_evd, ComplexVector};

/// Relative floor applied to eigenvalues before logarithms.
pub const EIGENVALUE_FLOOR: f64 = 1e-12;

/// One scored rank hypothesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AicScore {
    pub k: usize,
    pub score: f64,
    pub sigma2_hat: f64,
    pub log_lik: f64,
}

/// Mean of the trailing `len - k` eigenvalues (the hypothesized noise power).
pub fn tail_noise_estimate(eigenvalues: &[f64], k: usize) -> f64 {
    assert!(
        k >= 1 && k < eigenvalues.len(),
        "need 1 <= k < {}, got {k}",
        eigenvalues.len()
    );
    let tail = &eigenvalues[k..];
    tail.iter().sum::<f64>() / tail.len() as f64
}

/// Estimable parameters of the rank-`k` spiked model in dimension `nb`.
pub fn parameter_count(k: usize, nb: usize) -> usize {
    k * (2 * nb - k) + 1
}

/// Bias-correction term of the score. The plain `2K` penalty is inflated
/// by the finite-sample factor `n / (n - K - 1)`; a hypothesis with at
/// least as many parameters as samples is not estimable and scores
/// infinitely bad.
pub fn penalty(k: usize, nb: usize, n: usize) -> f64 {
    let kp = parameter_count(k, nb) as f64;
    let n = n as f64;
    if n > kp + 1.0 {
        2.0 * kp * n / (n - kp - 1.0)
    } else {
        f64::INFINITY
    }
}

/// AIC score of the rank-`k` hypothesis for a descending spectrum estimated
/// from `n` samples. Eigenvalues must already be floored positive.
pub fn aic_score(eigenvalues: &[f64], k: usize, n: usize) -> AicScore {
    let nb = eigenvalues.len();
    assert!(k >= 1 && k < nb, "hypothesized rank {k} out of range");
    assert!(n >= 1, "need at least one sample");
    assert!(
        eigenvalues.iter().all(|&l| l > 0.0),
        "eigenvalues must be positive after flooring"
    );
    let sigma2 = tail_noise_estimate(eigenvalues, k);
    let head_log: f64 = eigenvalues[..k].iter().map(|l| l.ln()).sum();
    let log_lik = -(n as f64) * (head_log + (nb - k) as f64 * sigma2.ln());
    let score = -2.0 * log_lik + penalty(k, nb, n);
    AicScore { k, score, sigma2_hat: sigma2, log_lik }
}

/// Floors a descending spectrum at `EIGENVALUE_FLOOR` of its largest entry
/// (or at an absolute tiny value when the spectrum is all zero).
pub fn floor_spectrum(eigenvalues: &[f64]) -> Vec<f64> {
    let lmax = eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let floor = if lmax > 0.0 { EIGENVALUE_FLOOR * lmax } else { f64::MIN_POSITIVE };
    eigenvalues.iter().map(|&l| l.max(floor)).collect()
}

/// Detects the interference rank from slot-1 snapshots: forms the sample
/// covariance, floors its spectrum and returns the `k` minimizing
/// [`aic_score`] over `k in 1 ..= dim - 2`; ties break toward smaller `k`.
pub fn detect_rank(samples: &[ComplexVector]) -> usize {
    assert!(samples.len() >= 2, "need at least two samples to detect rank");
    let est = scm(samples);
    let evd = hermitian_evd(&est.matrix).expect("SCM eigendecomposition");
    let spectrum = floor_spectrum(&evd.eigenvalues);
    detect_rank_from_spectrum(&spectrum, samples.len())
}

/// Rank detection on an already-floored descending spectrum. When the
/// sample count is too small for any hypothesis to be estimable (every
/// corrected score infinite), the uncorrected `2K` penalties order the
/// hypotheses instead so the detector still returns an in-range answer.
pub fn detect_rank_from_spectrum(spectrum: &[f64], n: usize) -> usize {
    let nb = spectrum.len();
    assert!(nb >= 3, "need at least three eigenvalues for a hypothesis range");
    let k_max = nb - 2;
    let argmin = |pen: &dyn Fn(usize) -> f64| {
        let mut best = 1;
        let mut best_score = f64::INFINITY;
        for k in 1..=k_max {
            let s = aic_score(spectrum, k, n).log_lik * -2.0 + pen(k);
            if s < best_score {
                best_score = s;
                best = k;
            }
        }
        (best, best_score)
    };
    let (best, score) = argmin(&|k| penalty(k, nb, n));
    if score.is_finite() {
        best
    } else {
        argmin(&|k| 2.0 * parameter_count(k, nb) as f64).0
    }
}
