//! Receive beamforming against the estimated interference, and the
//! performance metrics reported by the simulator.
//!
//! The zero-forcing-constrained receive beamformer projects Bob's desired
//! effective channel onto the orthogonal complement of the estimated
//! interference subspace. Metrics are always scored against the true
//! jamming covariance, even when the beamformer was built from an
//! estimate.

use num_complex::Complex64;
use rand::Rng;

use crate::estimators::CovarianceEstimate;
use crate::numerics::{
    hermitian_evd, sample_complex_gaussian, vdot, vnorm, ComplexMatrix, ComplexVector,
    HermitianMatrix,
};
use crate::system::{constellation, population_interference_cov, ChannelSet, SystemConfig};

/// Unit-norm receive combining vector.
#[derive(Debug, Clone)]
pub struct Beamformer {
    pub u: ComplexVector,
    /// Set when the desired channel fell inside the interference subspace
    /// and the combiner fell back to the least-interfered eigenvector.
    pub degraded: bool,
}

/// Per-trial metrics for one estimation method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRecord {
    pub nmse: f64,
    pub sjnr: f64,
    pub secrecy_rate: f64,
    pub flops: u64,
}

/// Zero-forcing-constrained receive beamformer: removes the projection of
/// `h_eff` onto the estimate's leading `rank_used`-dimensional eigenspace
/// and normalizes. Eigendirections with negligible eigenvalue are not
/// nulled, so a zero estimate degenerates to the matched filter.
pub fn zfc_rbf(estimate: &CovarianceEstimate, h_eff: &[Complex64]) -> Beamformer {
    let dim = estimate.matrix.dim();
    assert_eq!(h_eff.len(), dim, "channel/covariance dimension mismatch");
    let evd = hermitian_evd(&estimate.matrix).expect("estimate eigendecomposition");
    let lmax = evd.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let significant = evd
        .eigenvalues
        .iter()
        .filter(|&&l| l > 1e-12 * lmax && l > 0.0)
        .count();
    let null_rank = estimate.rank_used.min(significant).min(dim);

    let mut u: ComplexVector = h_eff.to_vec();
    for k in 0..null_rank {
        let col = evd.eigenvectors.col(k);
        let coeff = vdot(&col, &u);
        for (ui, ci) in u.iter_mut().zip(&col) {
            *ui -= coeff * ci;
        }
    }
    let norm = vnorm(&u);
    if norm <= 1e-10 * vnorm(h_eff) {
        // desired channel lives inside the interference subspace: fall back
        // to the least-interfered direction
        let fallback = evd.eigenvectors.col(dim - 1);
        return Beamformer { u: fallback, degraded: true };
    }
    for x in u.iter_mut() {
        *x /= norm;
    }
    Beamformer { u, degraded: false }
}

/// Post-combining signal-to-jamming-plus-noise ratio for the activated
/// antenna, evaluated against the true jamming covariance:
/// `beta P |u^H h_n|^2 / (u^H (R_JJ + sigma_B^2 I) u)`.
pub fn sjnr(
    bf: &Beamformer,
    cfg: &SystemConfig,
    ch: &ChannelSet,
    true_rjj: &HermitianMatrix,
    antenna: usize,
) -> f64 {
    let h_eff = ch.hs().col(antenna);
    let signal = cfg.beta * cfg.p * vdot(&bf.u, &h_eff).norm_sqr();
    let denom = true_rjj.quadratic_form(&bf.u) + cfg.sigma_b2 * vnorm(&bf.u).powi(2);
    if denom <= 0.0 {
        return f64::INFINITY;
    }
    signal / denom
}

/// Squared-Frobenius estimation error normalized by the truth.
pub fn nmse(estimate: &HermitianMatrix, truth: &HermitianMatrix) -> f64 {
    assert_eq!(estimate.dim(), truth.dim(), "dimension mismatch");
    let denom = truth.frobenius_norm_sq();
    assert!(denom > 0.0, "NMSE against a zero truth is undefined");
    estimate.sub(truth).frobenius_norm_sq() / denom
}

/// Default Monte Carlo draw count for the mutual-information expectation.
pub const DEFAULT_MI_DRAWS: usize = 2000;

/// Exponents below this threshold are dropped from the log-sum; with at
/// least one zero exponent always present (the true hypothesis), the
/// resulting error in the sum is below `K * exp(-30)`.
const MI_EXP_CUTOFF: f64 = -30.0;

/// Mutual information in bits of a uniform discrete input over `hyps`
/// observed through additive CN(0, I) noise (unit variance per complex
/// dimension), by Monte Carlo averaging over noise draws.
///
/// For each anchor hypothesis the pairwise differences are kept sorted by
/// distance, so a draw can stop scanning once
/// `|d|^2 - 2 |d| |w| > -MI_EXP_CUTOFF` -- every remaining term underflows
/// the cutoff. Well-separated constellations then cost almost nothing per
/// draw.
fn mi_discrete_gaussian<R: Rng + ?Sized>(hyps: &[ComplexVector], rng: &mut R, draws: usize) -> f64 {
    let k = hyps.len();
    assert!(k >= 1 && draws >= 1);
    let dim = hyps[0].len();
    // per anchor: pairwise differences sorted by squared distance
    let mut diffs: Vec<Vec<(f64, ComplexVector)>> = Vec::with_capacity(k);
    for a in hyps {
        let mut row: Vec<(f64, ComplexVector)> = hyps
            .iter()
            .map(|b| {
                let d: ComplexVector = a.iter().zip(b).map(|(x, y)| x - y).collect();
                (d.iter().map(|z| z.norm_sqr()).sum(), d)
            })
            .collect();
        row.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        diffs.push(row);
    }
    let ln2 = std::f64::consts::LN_2;
    let mut acc = 0.0;
    for _ in 0..draws {
        let w = sample_complex_gaussian(dim, 1.0, rng);
        let w_norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for row in &diffs {
            let mut sum = 0.0;
            for (dsq, d) in row {
                if dsq - 2.0 * dsq.sqrt() * w_norm > -MI_EXP_CUTOFF {
                    break;
                }
                // |d + w|^2 - |w|^2 = |d|^2 + 2 Re(d^H w)
                let cross: f64 = d.iter().zip(&w).map(|(di, wi)| (di.conj() * wi).re).sum();
                let expo = -(dsq + 2.0 * cross);
                if expo > MI_EXP_CUTOFF {
                    sum += expo.exp();
                }
            }
            acc += sum.max(1.0).ln() / ln2;
        }
    }
    let penalty = acc / (k * draws) as f64;
    ((k as f64).log2() - penalty).max(0.0)
}

/// Secrecy rate in bits per channel use: Bob's mutual information after the
/// receive combiner minus Mallory's, floored at zero.
///
/// Both sides see the same discrete alphabet of `nt * mod_order` equiprobable
/// spatial-modulation hypotheses. Bob observes the scalar channel
/// `u^H H S e_n s_m` with Gaussian residual `u^H (R_JJ + sigma_B^2 I) u`
/// (the artificial noise cancels at Bob by construction). Mallory observes
/// the vector channel `G S e_n s_m` whitened by its own interference-plus-
/// noise covariance: artificial noise, residual self-interference and
/// thermal noise.
pub fn secrecy_rate<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    bf: &Beamformer,
    rng: &mut R,
    mi_draws: usize,
) -> f64 {
    let points = constellation(cfg.mod_order);
    let amp = (cfg.beta * cfg.p).sqrt();
    let rjj = population_interference_cov(cfg, ch);

    // Bob: scalar hypotheses whitened by the residual standard deviation
    let hs = ch.hs();
    let bob_var = rjj.quadratic_form(&bf.u) + cfg.sigma_b2;
    let bob_gains: Vec<Complex64> = (0..cfg.nt).map(|n| vdot(&bf.u, &hs.col(n))).collect();
    let peak = bob_gains.iter().map(|g| g.norm_sqr()).fold(0.0, f64::max) * amp * amp;
    let bob_sigma = bob_var.max(1e-30 * (1.0 + peak)).sqrt();
    let bob_hyps: Vec<ComplexVector> = (0..cfg.nt)
        .flat_map(|n| {
            let g = bob_gains[n];
            points.iter().map(move |s| vec![amp * g * s / bob_sigma]).collect::<Vec<_>>()
        })
        .collect();
    let i_bob = mi_discrete_gaussian(&bob_hyps, rng, mi_draws);

    // Mallory: colored interference-plus-noise covariance, then whitening
    let gs = ch.gs();
    let gstan = gs.mul(&ch.t_an);
    let mpj = ch.m_self.mul(&ch.p_j);
    let an_cov = HermitianMatrix::congruence(
        &gstan,
        &HermitianMatrix::scaled_identity(cfg.nt, (1.0 - cfg.beta) * cfg.p * cfg.sigma_a2),
    );
    let si_cov = HermitianMatrix::congruence(
        &mpj,
        &HermitianMatrix::scaled_identity(cfg.nm_prime, cfg.p_m * cfg.sigma_m2),
    );
    let r_mal = an_cov.add(&si_cov).add_diagonal(cfg.sigma_mrx2);
    let evd = hermitian_evd(&r_mal).expect("Mallory noise covariance eigendecomposition");
    let lmax = evd.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let floor = (1e-12 * lmax).max(1e-30);
    let mut whiten = ComplexMatrix::zeros(cfg.nm, cfg.nm);
    for k in 0..cfg.nm {
        let scale = 1.0 / evd.eigenvalues[k].max(floor).sqrt();
        let col = evd.eigenvectors.col(k);
        for i in 0..cfg.nm {
            for j in 0..cfg.nm {
                let v = whiten.get(i, j) + scale * col[i] * col[j].conj();
                whiten.set(i, j, v);
            }
        }
    }
    let mal_hyps: Vec<ComplexVector> = (0..cfg.nt)
        .flat_map(|n| {
            let wg = whiten.matvec(&gs.col(n));
            points
                .iter()
                .map(|s| wg.iter().map(|x| amp * x * s).collect::<ComplexVector>())
                .collect::<Vec<_>>()
        })
        .collect();
    let i_mal = mi_discrete_gaussian(&mal_hyps, rng, mi_draws);

    (i_bob - i_mal).max(0.0)
}

/// Closed-form floating-point operation counts per estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlopCounts {
    pub scm: u64,
    pub pca_evd: u64,
    pub jd: u64,
}

/// Evaluates the complexity polynomials for `k_samples` snapshots of
/// dimension `nr`, rank `r`, with `nb` receive antennas driving the
/// rotation-pair count. Exact integer arithmetic throughout.
pub fn flop_counts(k_samples: u64, nr: u64, r: u64, nb: u64) -> FlopCounts {
    assert!(k_samples >= 1 && nr >= 1 && nb >= 1);
    assert!(r >= 1 && r < nr, "rank must satisfy 1 <= r < nr");
    assert!(k_samples >= r, "sample count below rank");
    let nr2 = nr * nr;
    let nr3 = nr2 * nr;
    let scm = 6 * k_samples * nr2;
    let pca_evd = 126 * nr3 + (8 * k_samples + 6 * r - 2) * nr2;
    // the bracket 126*2^3 + 24 (K - r) is always even, so halving the
    // product with (nb - 1)^2 stays exact in integers
    let pair_term = (nb - 1) * (nb - 1) * (126 * 8 + 24 * (k_samples - r)) / 2;
    let jd = (158 + 8 * k_samples - 8 * r) * nr3 + pair_term + (8 * r + 4 * k_samples - 8) * nr2;
    FlopCounts { scm, pca_evd, jd }
}
