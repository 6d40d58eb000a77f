//! Scenario generation for the secure spatial-modulation link.
//!
//! One realization consists of the four channel matrices (Alice→Bob,
//! Alice→Mallory, Mallory→Bob, Mallory's self-interference loop), the
//! antenna-selection matrix, the artificial-noise projector and Mallory's
//! jamming beamforming matrix. The two-slot protocol is: slot 1, Alice is
//! silent and Bob records jamming-plus-noise samples for covariance
//! estimation; slot 2, Alice transmits and Bob applies the estimate.

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::numerics::{
    null_space_projector, sample_complex_gaussian, ComplexMatrix, ComplexVector, HermitianMatrix,
};

#[derive(Debug, Error)]
pub enum SystemError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("SINR target {target_db:.2} dB unreachable: maximum with nonnegative jamming power is {max_db:.2} dB")]
    UnreachableSinr { target_db: f64, max_db: f64 },
    #[error("channel draw produced a rank-deficient realization repeatedly")]
    DegenerateChannels,
}

/// All scenario scalars.
///
/// Powers are in watts, variances are per complex dimension. `nt` must be
/// the largest power of two not exceeding `nx`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Transmit array size at Alice.
    pub nx: usize,
    /// Activated antennas (power of two, `<= nx`).
    pub nt: usize,
    /// Bob antenna count.
    pub nb: usize,
    /// Mallory antenna count.
    pub nm: usize,
    /// Jamming stream count (`< nm`).
    pub nm_prime: usize,
    /// Power-allocation fraction for the confidential signal, in [0, 1].
    pub beta: f64,
    /// Confidential transmit power.
    pub p: f64,
    /// Jamming transmit power.
    pub p_m: f64,
    /// Artificial-noise source variance.
    pub sigma_a2: f64,
    /// Jamming source variance per stream.
    pub sigma_m2: f64,
    /// Receiver noise variance at Bob.
    pub sigma_b2: f64,
    /// Receiver noise variance at Mallory.
    pub sigma_mrx2: f64,
    /// Constellation size (power of two).
    pub mod_order: usize,
    /// Sample count for covariance estimation (slot-1 snapshots).
    pub samples: usize,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            nx: 16,
            nt: 16,
            nb: 8,
            nm: 6,
            nm_prime: 3,
            beta: 0.3,
            p: 10.0,
            p_m: 1.0,
            sigma_a2: 1.0,
            sigma_m2: 1.0,
            sigma_b2: 0.1,
            sigma_mrx2: 0.1,
            mod_order: 4,
            samples: 8,
        }
    }
}

impl SystemConfig {
    /// Largest power of two not exceeding `nx`.
    pub fn derived_nt(nx: usize) -> usize {
        assert!(nx >= 1);
        1usize << (usize::BITS - 1 - nx.leading_zeros())
    }

    pub fn validate(&self) -> Result<(), SystemError> {
        let fail = |msg: String| Err(SystemError::InvalidConfig(msg));
        if self.nx < 1 || self.nb < 2 || self.nm < 2 {
            return fail(format!("array sizes too small: nx={}, nb={}, nm={}", self.nx, self.nb, self.nm));
        }
        if self.nt != Self::derived_nt(self.nx) {
            return fail(format!(
                "nt must be the largest power of two <= nx: expected {}, got {}",
                Self::derived_nt(self.nx),
                self.nt
            ));
        }
        if self.nm_prime == 0 || self.nm_prime >= self.nm {
            return fail(format!("need 0 < nm_prime < nm, got nm_prime={}, nm={}", self.nm_prime, self.nm));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return fail(format!("beta must be in [0, 1], got {}", self.beta));
        }
        for (name, v) in [
            ("p", self.p),
            ("p_m", self.p_m),
            ("sigma_a2", self.sigma_a2),
            ("sigma_m2", self.sigma_m2),
            ("sigma_b2", self.sigma_b2),
            ("sigma_mrx2", self.sigma_mrx2),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return fail(format!("{name} must be finite and nonnegative, got {v}"));
            }
        }
        if self.mod_order < 2 || !self.mod_order.is_power_of_two() {
            return fail(format!("mod_order must be a power of two >= 2, got {}", self.mod_order));
        }
        if self.samples == 0 {
            return fail("samples must be >= 1".into());
        }
        Ok(())
    }
}

/// One spatial-modulation symbol: an activated antenna plus a constellation
/// point, both zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransmitSymbol {
    pub antenna: usize,
    pub symbol: usize,
}

impl TransmitSymbol {
    pub fn new(cfg: &SystemConfig, antenna: usize, symbol: usize) -> Self {
        assert!(antenna < cfg.nt, "antenna index {antenna} out of range");
        assert!(symbol < cfg.mod_order, "symbol index {symbol} out of range");
        Self { antenna, symbol }
    }

    pub fn random<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> Self {
        Self {
            antenna: rng.gen_range(0..cfg.nt),
            symbol: rng.gen_range(0..cfg.mod_order),
        }
    }
}

/// Unit-average-energy M-PSK constellation; for M = 4 this is the diagonal
/// QPSK set (±1 ± i)/sqrt(2).
pub fn constellation(mod_order: usize) -> Vec<Complex64> {
    assert!(mod_order >= 2 && mod_order.is_power_of_two());
    (0..mod_order)
        .map(|m| {
            let phase = (2 * m + 1) as f64 * std::f64::consts::PI / mod_order as f64;
            Complex64::new(phase.cos(), phase.sin())
        })
        .collect()
}

/// One channel realization plus the derived transmit-side structures.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// Alice→Bob, `nb x nx`.
    pub h: ComplexMatrix,
    /// Alice→Mallory, `nm x nt`.
    pub g: ComplexMatrix,
    /// Mallory→Bob, `nb x nm`.
    pub f_ch: ComplexMatrix,
    /// Mallory self-interference loop, `nm x nm`.
    pub m_self: ComplexMatrix,
    /// Antenna selection, `nx x nt`, one 1 per column.
    pub s: ComplexMatrix,
    /// Artificial-noise projector, `nt x nt`, range inside null(H S),
    /// scaled so `E || t_an n_a ||^2 = 1` under the configured AN variance.
    pub t_an: ComplexMatrix,
    /// Jamming beamforming matrix, `nm x nm_prime`, orthonormal columns.
    pub p_j: ComplexMatrix,
}

impl ChannelSet {
    /// Effective Alice→Bob channel over the activated antennas, `nb x nt`.
    pub fn hs(&self) -> ComplexMatrix {
        self.h.mul(&self.s)
    }

    /// Effective Alice→Mallory channel over the activated antennas.
    pub fn gs(&self) -> ComplexMatrix {
        self.g.mul(&self.s)
    }

    /// Effective jamming channel into Bob, `nb x nm_prime`.
    pub fn f_pj(&self) -> ComplexMatrix {
        self.f_ch.mul(&self.p_j)
    }
}

fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let data = sample_complex_gaussian(rows * cols, 1.0, rng);
    ComplexMatrix::from_fn(rows, cols, |i, j| data[i * cols + j])
}

/// Draws one scenario realization. All channel entries are i.i.d. unit
/// variance circularly symmetric Gaussian; the selection matrix activates
/// the first `nt` antennas; `t_an` spans null(H S); `p_j` is a uniformly
/// random semi-unitary matrix (only the product `F p_j` enters Bob's
/// estimation problem). Degenerate draws are retried.
pub fn draw_channels<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> Result<ChannelSet, SystemError> {
    cfg.validate()?;
    let s = ComplexMatrix::from_fn(cfg.nx, cfg.nt, |i, j| {
        Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)
    });
    for _ in 0..8 {
        let h = gaussian_matrix(cfg.nb, cfg.nx, rng);
        let g = gaussian_matrix(cfg.nm, cfg.nt, rng);
        let f_ch = gaussian_matrix(cfg.nb, cfg.nm, rng);
        let m_self = gaussian_matrix(cfg.nm, cfg.nm, rng);

        let hs = h.mul(&s);
        let (q, rank) = match null_space_projector(&hs) {
            Ok(v) => v,
            Err(_) => continue,
        };
        if rank != cfg.nb.min(cfg.nt) {
            continue;
        }
        let null_dim = cfg.nt - rank;
        let t_an = if null_dim > 0 && cfg.sigma_a2 > 0.0 {
            q.scale(1.0 / (cfg.sigma_a2 * null_dim as f64).sqrt())
        } else {
            ComplexMatrix::zeros(cfg.nt, cfg.nt)
        };

        let p_j = match gaussian_matrix(cfg.nm, cfg.nm_prime, rng).orthonormalize_columns() {
            Ok(m) => m,
            Err(_) => continue,
        };

        return Ok(ChannelSet { h, g, f_ch, m_self, s, t_an, p_j });
    }
    Err(SystemError::DegenerateChannels)
}

/// Alice's transmitted vector (length `nt`): confidential symbol on the
/// activated antenna plus artificial noise in null(H S).
pub fn alice_signal<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    sym: TransmitSymbol,
    rng: &mut R,
) -> ComplexVector {
    let points = constellation(cfg.mod_order);
    let sm = points[sym.symbol];
    let cm_gain = (cfg.beta * cfg.p).sqrt();
    let an_gain = ((1.0 - cfg.beta) * cfg.p).sqrt();
    let n_a = sample_complex_gaussian(cfg.nt, cfg.sigma_a2, rng);
    let an = ch.t_an.matvec(&n_a);
    (0..cfg.nt)
        .map(|i| {
            let cm = if i == sym.antenna { cm_gain * sm } else { Complex64::new(0.0, 0.0) };
            cm + an_gain * an[i]
        })
        .collect()
}

/// Mallory's transmitted jamming vector (length `nm`).
pub fn mallory_signal<R: Rng + ?Sized>(cfg: &SystemConfig, ch: &ChannelSet, rng: &mut R) -> ComplexVector {
    let n_m = sample_complex_gaussian(cfg.nm_prime, cfg.sigma_m2, rng);
    let mut v = ch.p_j.matvec(&n_m);
    let gain = cfg.p_m.sqrt();
    for x in v.iter_mut() {
        *x *= gain;
    }
    v
}

/// Slot-1 snapshot at Bob: jamming through the Mallory→Bob channel plus
/// receiver noise. These are the samples every covariance estimator sees.
pub fn jamming_only_sample<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    rng: &mut R,
) -> ComplexVector {
    let x_m = mallory_signal(cfg, ch, rng);
    let mut y = ch.f_ch.matvec(&x_m);
    let n_b = sample_complex_gaussian(cfg.nb, cfg.sigma_b2, rng);
    for (yi, ni) in y.iter_mut().zip(&n_b) {
        *yi += ni;
    }
    y
}

/// Slot-2 observation at Bob: confidential signal, (nulled) artificial
/// noise, jamming and receiver noise.
pub fn receive_bob<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    sym: TransmitSymbol,
    rng: &mut R,
) -> ComplexVector {
    let x_a = alice_signal(cfg, ch, sym, rng);
    let mut y = ch.hs().matvec(&x_a);
    let jam = jamming_only_sample(cfg, ch, rng);
    for (yi, ji) in y.iter_mut().zip(&jam) {
        *yi += ji;
    }
    y
}

/// Slot-2 observation at Mallory: confidential signal, artificial noise
/// (not nulled for Mallory), residual self-interference and receiver noise.
pub fn receive_mallory<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    sym: TransmitSymbol,
    rng: &mut R,
) -> ComplexVector {
    let x_a = alice_signal(cfg, ch, sym, rng);
    let mut y = ch.gs().matvec(&x_a);
    let x_m = mallory_signal(cfg, ch, rng);
    let self_int = ch.m_self.matvec(&x_m);
    let n_m = sample_complex_gaussian(cfg.nm, cfg.sigma_mrx2, rng);
    for i in 0..cfg.nm {
        y[i] += self_int[i] + n_m[i];
    }
    y
}

/// Ground-truth covariance of the jamming component at Bob:
/// `p_m sigma_m2 (F p_j)(F p_j)^H`, rank `nm_prime` for generic channels.
pub fn population_interference_cov(cfg: &SystemConfig, ch: &ChannelSet) -> HermitianMatrix {
    let eff = ch.f_pj();
    HermitianMatrix::congruence(&eff, &HermitianMatrix::scaled_identity(cfg.nm_prime, cfg.p_m * cfg.sigma_m2))
}

/// Jamming power that places the pre-combining ratio
/// `beta P / (p_m sigma_m2 nm_prime + sigma_b2)` at the requested target.
pub fn sinr_to_jamming_power(cfg: &SystemConfig, target_sinr_db: f64) -> Result<f64, SystemError> {
    assert!(target_sinr_db.is_finite(), "SINR target must be finite");
    let target = 10f64.powf(target_sinr_db / 10.0);
    let desired = cfg.beta * cfg.p;
    let denom_needed = desired / target;
    let p_m = (denom_needed - cfg.sigma_b2) / (cfg.sigma_m2 * cfg.nm_prime as f64);
    if p_m < -1e-12 * cfg.sigma_b2.max(1.0) {
        let max_db = 10.0 * (desired / cfg.sigma_b2).log10();
        return Err(SystemError::UnreachableSinr { target_db: target_sinr_db, max_db });
    }
    Ok(p_m.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::scm;
    use crate::numerics::{hermitian_evd, vnorm, vnorm_sq};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> SystemConfig {
        SystemConfig::default()
    }

    #[test]
    fn config_default_is_valid() {
        cfg().validate().unwrap();
    }

    #[test]
    fn config_rejects_bad_nt() {
        let mut c = cfg();
        c.nt = 12;
        assert!(c.validate().is_err());
        c.nt = 16;
        c.nx = 15;
        assert!(c.validate().is_err()); // 2^floor(lg 15) = 8
    }

    #[test]
    fn constellation_is_unit_energy_qpsk() {
        let pts = constellation(4);
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(pts[0].re, inv, epsilon = 1e-15);
        assert_abs_diff_eq!(pts[0].im, inv, epsilon = 1e-15);
        for p in &pts {
            assert_abs_diff_eq!(p.norm(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn an_projector_annihilates_bob_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = cfg();
        let ch = draw_channels(&c, &mut rng).unwrap();
        let hs_tan = ch.hs().mul(&ch.t_an);
        assert!(hs_tan.frobenius_norm() <= 1e-10 * ch.hs().frobenius_norm());
        // rank of t_an equals nt - nb = 8
        let gram = HermitianMatrix::new(ch.t_an.mul(&ch.t_an.adjoint())).unwrap();
        let evd = hermitian_evd(&gram).unwrap();
        let lmax = evd.eigenvalues[0];
        let rank = evd.eigenvalues.iter().filter(|&&l| l > 1e-10 * lmax).count();
        assert_eq!(rank, c.nt - c.nb);
    }

    #[test]
    fn selection_matrix_picks_leading_antennas() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = cfg();
        let ch = draw_channels(&c, &mut rng).unwrap();
        for k in 0..c.nt {
            let col = ch.s.col(k);
            for (i, x) in col.iter().enumerate() {
                let expect = if i == k { 1.0 } else { 0.0 };
                assert_eq!(x.re, expect);
                assert_eq!(x.im, 0.0);
            }
        }
    }

    #[test]
    fn jamming_beamformer_has_orthonormal_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ch = draw_channels(&cfg(), &mut rng).unwrap();
        let gram = ch.p_j.adjoint().mul(&ch.p_j);
        let err = gram.sub(&ComplexMatrix::identity(cfg().nm_prime)).frobenius_norm();
        assert!(err <= 1e-10);
    }

    #[test]
    fn channels_reproducible_from_seed() {
        let a = draw_channels(&cfg(), &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = draw_channels(&cfg(), &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn alice_pure_confidential_when_beta_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut c = cfg();
        c.beta = 1.0;
        let ch = draw_channels(&c, &mut rng).unwrap();
        let sym = TransmitSymbol::new(&c, 3, 1);
        let x = alice_signal(&c, &ch, sym, &mut rng);
        let pts = constellation(c.mod_order);
        for (i, xi) in x.iter().enumerate() {
            if i == 3 {
                let expect = c.p.sqrt() * pts[1];
                assert!((xi - expect).norm() <= 1e-12);
            } else {
                assert_eq!(xi.norm(), 0.0);
            }
        }
    }

    #[test]
    fn alice_pure_an_is_invisible_to_bob() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut c = cfg();
        c.beta = 0.0;
        let ch = draw_channels(&c, &mut rng).unwrap();
        let sym = TransmitSymbol::new(&c, 0, 0);
        let x = alice_signal(&c, &ch, sym, &mut rng);
        let at_bob = ch.hs().matvec(&x);
        assert!(vnorm(&at_bob) <= 1e-8 * vnorm(&x).max(1.0));
    }

    #[test]
    fn alice_power_budget_monte_carlo() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut c = cfg();
        c.beta = 0.5;
        let ch = draw_channels(&c, &mut rng).unwrap();
        let draws = 100_000;
        let mut acc = 0.0;
        for _ in 0..draws {
            let sym = TransmitSymbol::random(&c, &mut rng);
            acc += vnorm_sq(&alice_signal(&c, &ch, sym, &mut rng));
        }
        let mean = acc / draws as f64;
        assert!((mean - c.p).abs() <= 0.02 * c.p, "E||x_a||^2 = {mean}, expected {}", c.p);
    }

    #[test]
    fn mallory_signal_power_and_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let c = cfg();
        let ch = draw_channels(&c, &mut rng).unwrap();

        let mut zero_cfg = c.clone();
        zero_cfg.p_m = 0.0;
        let z = mallory_signal(&zero_cfg, &ch, &mut rng);
        assert!(z.iter().all(|x| x.norm() == 0.0));

        let mut jam_cfg = c.clone();
        jam_cfg.p_m = 2.5;
        let draws = 100_000;
        let mut acc = 0.0;
        for _ in 0..draws {
            acc += vnorm_sq(&mallory_signal(&jam_cfg, &ch, &mut rng));
        }
        let mean = acc / draws as f64;
        let expect = jam_cfg.p_m * jam_cfg.sigma_m2 * jam_cfg.nm_prime as f64;
        assert!((mean - expect).abs() <= 0.02 * expect, "E||x_m||^2 = {mean}, expected {expect}");
    }

    #[test]
    fn single_stream_jamming_spans_fixed_line() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut c = cfg();
        c.nm_prime = 1;
        let ch = draw_channels(&c, &mut rng).unwrap();
        let dir = ch.p_j.col(0);
        for _ in 0..20 {
            let x = mallory_signal(&c, &ch, &mut rng);
            // x is a complex multiple of the single beam column
            let coeff = crate::numerics::vdot(&dir, &x);
            let recon: Vec<_> = dir.iter().map(|d| d * coeff).collect();
            let err: f64 = x.iter().zip(&recon).map(|(a, b)| (a - b).norm_sqr()).sum();
            assert!(err <= 1e-20 * vnorm_sq(&x).max(1e-30));
        }
    }

    #[test]
    fn noise_only_slot_has_identity_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut c = cfg();
        c.p_m = 0.0;
        c.sigma_b2 = 1.0;
        let ch = draw_channels(&c, &mut rng).unwrap();
        let samples: Vec<_> = (0..100_000).map(|_| jamming_only_sample(&c, &ch, &mut rng)).collect();
        let est = scm(&samples);
        let eye = HermitianMatrix::scaled_identity(c.nb, 1.0);
        let rel = est.matrix.sub(&eye).frobenius_norm_sq().sqrt() / eye.frobenius_norm_sq().sqrt();
        assert!(rel <= 0.02, "relative error {rel}");
    }

    #[test]
    fn noiseless_samples_confined_to_jamming_subspace() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut c = cfg();
        c.sigma_b2 = 0.0;
        let ch = draw_channels(&c, &mut rng).unwrap();
        // complement of col span(F p_j) = null space of (F p_j)^H
        let (q_perp, rank) = null_space_projector(&ch.f_pj().adjoint()).unwrap();
        assert_eq!(rank, c.nm_prime);
        for _ in 0..20 {
            let y = jamming_only_sample(&c, &ch, &mut rng);
            let out = q_perp.matvec(&y);
            assert!(vnorm(&out) <= 1e-9 * vnorm(&y).max(1e-30));
        }
    }

    #[test]
    fn bob_noiseless_reception_is_exact_column() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut c = cfg();
        c.beta = 1.0;
        c.p_m = 0.0;
        c.sigma_b2 = 0.0;
        let ch = draw_channels(&c, &mut rng).unwrap();
        let sym = TransmitSymbol::new(&c, 5, 2);
        let y = receive_bob(&c, &ch, sym, &mut rng);
        let pts = constellation(c.mod_order);
        let expect: Vec<_> = ch.hs().col(5).iter().map(|h| c.p.sqrt() * h * pts[2]).collect();
        let err: f64 = y.iter().zip(&expect).map(|(a, b)| (a - b).norm_sqr()).sum();
        assert!(err <= 1e-20 * vnorm_sq(&expect));
    }

    #[test]
    fn bob_interference_covariance_matches_population() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let mut c = cfg();
        c.beta = 1.0; // signal term is deterministic given the symbol
        c.p_m = 1.5;
        c.sigma_b2 = 0.4;
        let ch = draw_channels(&c, &mut rng).unwrap();
        let sym = TransmitSymbol::new(&c, 2, 0);
        let pts = constellation(c.mod_order);
        let signal: Vec<_> = ch.hs().col(2).iter().map(|h| (c.beta * c.p).sqrt() * h * pts[0]).collect();
        let resid: Vec<Vec<_>> = (0..100_000)
            .map(|_| {
                receive_bob(&c, &ch, sym, &mut rng)
                    .iter()
                    .zip(&signal)
                    .map(|(y, s)| y - s)
                    .collect()
            })
            .collect();
        let est = scm(&resid);
        let expect = population_interference_cov(&c, &ch).add_diagonal(c.sigma_b2);
        let rel = est.matrix.sub(&expect).frobenius_norm_sq().sqrt() / expect.frobenius_norm_sq().sqrt();
        assert!(rel <= 0.03, "relative error {rel}");
    }

    #[test]
    fn mallory_sees_confidential_column_when_unjammed() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let mut c = cfg();
        c.beta = 1.0;
        c.p_m = 0.0;
        c.sigma_mrx2 = 0.0;
        let ch = draw_channels(&c, &mut rng).unwrap();
        let sym = TransmitSymbol::new(&c, 1, 3);
        let y = receive_mallory(&c, &ch, sym, &mut rng);
        let pts = constellation(c.mod_order);
        let expect: Vec<_> = ch.gs().col(1).iter().map(|g| c.p.sqrt() * g * pts[3]).collect();
        let err: f64 = y.iter().zip(&expect).map(|(a, b)| (a - b).norm_sqr()).sum();
        assert!(err <= 1e-20 * vnorm_sq(&expect));
    }

    #[test]
    fn artificial_noise_reaches_mallory() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let mut c = cfg();
        c.beta = 0.0;
        c.p_m = 0.0;
        c.sigma_mrx2 = 0.0;
        let ch = draw_channels(&c, &mut rng).unwrap();
        let sym = TransmitSymbol::new(&c, 0, 0);
        let y = receive_mallory(&c, &ch, sym, &mut rng);
        assert!(vnorm(&y) > 1e-3, "AN should be generically visible at Mallory");
    }

    #[test]
    fn mallory_power_audit() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut c = cfg();
        c.beta = 0.6;
        c.p_m = 2.0;
        c.sigma_mrx2 = 0.3;
        let ch = draw_channels(&c, &mut rng).unwrap();
        let sym = TransmitSymbol::new(&c, 4, 1);
        let gs = ch.gs();
        let gstan = gs.mul(&ch.t_an);
        let mpj = ch.m_self.mul(&ch.p_j);
        let analytic = c.beta * c.p * vnorm_sq(&gs.col(4))
            + (1.0 - c.beta) * c.p * c.sigma_a2 * gstan.frobenius_norm_sq()
            + c.p_m * c.sigma_m2 * mpj.frobenius_norm_sq()
            + c.sigma_mrx2 * c.nm as f64;
        let draws = 100_000;
        let mut acc = 0.0;
        for _ in 0..draws {
            acc += vnorm_sq(&receive_mallory(&c, &ch, sym, &mut rng));
        }
        let mean = acc / draws as f64;
        assert!((mean - analytic).abs() <= 0.02 * analytic, "E||y_m||^2 = {mean}, analytic {analytic}");
    }

    #[test]
    fn population_covariance_zero_without_jamming() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        let mut c = cfg();
        c.p_m = 0.0;
        let ch = draw_channels(&c, &mut rng).unwrap();
        assert_eq!(population_interference_cov(&c, &ch).frobenius_norm_sq(), 0.0);
    }

    #[test]
    fn population_covariance_spectrum_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let c = cfg();
        let ch = draw_channels(&c, &mut rng).unwrap();
        let rjj = population_interference_cov(&c, &ch);
        let evd_jj = hermitian_evd(&rjj).unwrap();
        // rank nm_prime: trailing eigenvalues negligible
        assert!(evd_jj.eigenvalues[c.nm_prime] <= 1e-10 * evd_jj.eigenvalues[0]);
        let ryy = rjj.add_diagonal(c.sigma_b2);
        let evd_yy = hermitian_evd(&ryy).unwrap();
        for i in 0..c.nb {
            let expect = if i < c.nm_prime {
                evd_jj.eigenvalues[i] + c.sigma_b2
            } else {
                c.sigma_b2
            };
            assert_abs_diff_eq!(evd_yy.eigenvalues[i], expect, epsilon = 1e-9 * evd_yy.eigenvalues[0]);
        }
    }

    #[test]
    fn scm_of_many_samples_recovers_population() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let mut c = cfg();
        c.p_m = 2.0;
        c.sigma_b2 = 0.5;
        let ch = draw_channels(&c, &mut rng).unwrap();
        let samples: Vec<_> = (0..1_000_000).map(|_| jamming_only_sample(&c, &ch, &mut rng)).collect();
        let est = scm(&samples);
        let rjj = population_interference_cov(&c, &ch);
        let noise_removed = est.matrix.sub(&HermitianMatrix::scaled_identity(c.nb, c.sigma_b2));
        let rel = noise_removed.sub(&rjj).frobenius_norm_sq().sqrt() / rjj.frobenius_norm_sq().sqrt();
        assert!(rel <= 0.01, "relative error {rel}");
    }

    #[test]
    fn scm_error_halves_per_sample_doubling() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let c = cfg();
        let ch = draw_channels(&c, &mut rng).unwrap();
        let ryy = population_interference_cov(&c, &ch).add_diagonal(c.sigma_b2);
        let denom = ryy.frobenius_norm_sq();
        let mut nmse = [0.0f64; 2];
        let trials = 500;
        for (slot, l) in [256usize, 512].iter().enumerate() {
            let mut acc = 0.0;
            for _ in 0..trials {
                let samples: Vec<_> = (0..*l).map(|_| jamming_only_sample(&c, &ch, &mut rng)).collect();
                let est = scm(&samples);
                acc += est.matrix.sub(&ryy).frobenius_norm_sq() / denom;
            }
            nmse[slot] = acc / trials as f64;
        }
        let ratio = nmse[0] / nmse[1];
        assert!((1.5..=2.5).contains(&ratio), "halving ratio {ratio}");
    }

    #[test]
    fn sinr_boundary_gives_zero_jamming_power() {
        let c = cfg();
        let max_db = 10.0 * (c.beta * c.p / c.sigma_b2).log10();
        let p_m = sinr_to_jamming_power(&c, max_db).unwrap();
        assert!(p_m.abs() <= 1e-9, "expected 0 at the boundary, got {p_m}");
        assert!(sinr_to_jamming_power(&c, max_db + 0.1).is_err());
    }

    #[test]
    fn sinr_solves_printed_example() {
        let mut c = cfg();
        c.beta = 1.0;
        c.p = 10.0;
        c.sigma_b2 = 1.0;
        c.sigma_m2 = 1.0;
        c.nm_prime = 3;
        let p_m = sinr_to_jamming_power(&c, 0.0).unwrap();
        assert_abs_diff_eq!(p_m, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn sinr_round_trips() {
        let c = cfg();
        for target in [-10.0, -5.0, 0.0, 7.5] {
            let p_m = sinr_to_jamming_power(&c, target).unwrap();
            let sinr = c.beta * c.p / (p_m * c.sigma_m2 * c.nm_prime as f64 + c.sigma_b2);
            assert_abs_diff_eq!(10.0 * sinr.log10(), target, epsilon = 1e-12);
        }
    }
}
