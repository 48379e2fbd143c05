//! Joint-sparse ground truth and noisy linear measurements.
//!
//! `L` nodes share one sparse support of size `k` in dimension `n`; each node
//! holds its own signal `x_j` (independent nonzero coefficients), its own
//! sensing matrix `Phi_j` (Gaussian, unit-norm columns), and a noisy
//! observation `y_j = Phi_j x_j + w_j`.

use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{norm2, Cholesky, DMat};
use crate::{real, Error, Real, Result};

/// Noise variance assigned when noiseless measurements are requested, so that
/// downstream thresholds of the form `4 * sigma^2` stay well defined.
pub const NOISE_FLOOR: f64 = 1e-12;

/// Distribution of the nonzero signal coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffDist {
    /// `+1` or `-1` with equal probability.
    Rademacher,
    /// Standard normal.
    Gaussian,
}

/// `L` jointly sparse ground-truth vectors with a common support.
#[derive(Debug, Clone)]
pub struct SparseEnsemble<T> {
    /// Signal dimension.
    pub n: usize,
    /// Support size.
    pub k: usize,
    /// Number of nodes.
    pub num_nodes: usize,
    /// Common support, sorted ascending.
    pub support: Vec<usize>,
    /// One length-`n` signal per node; zero outside `support`.
    pub signals: Vec<Vec<T>>,
    /// Distribution the nonzeros were drawn from.
    pub coeff_dist: CoeffDist,
}

impl<T: Real> SparseEnsemble<T> {
    /// Per-node prior variance of the nonzero coefficients (1 for both
    /// supported distributions), used by the support-aware LMMSE benchmark.
    pub fn signal_variance(&self) -> T {
        T::one()
    }
}

/// One node's sensing matrix, observation, and noise level.
#[derive(Debug, Clone)]
pub struct NodeMeasurement<T> {
    /// `m x n` sensing matrix with unit-norm columns.
    pub phi: DMat<T>,
    /// Length-`m` observation.
    pub y: Vec<T>,
    /// Measurement noise variance `sigma_j^2 > 0`.
    pub noise_var: T,
}

/// Measurements for the whole network.
#[derive(Debug, Clone)]
pub struct MeasurementSet<T> {
    /// Measurements per node.
    pub m: usize,
    /// Signal dimension.
    pub n: usize,
    pub nodes: Vec<NodeMeasurement<T>>,
}

impl<T> MeasurementSet<T> {
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }
}

// RNG stream layout: one root seed, split into independent ChaCha streams so
// per-node generation is order independent. The purpose tag occupies the high
// bits and the node index the low bits.
const STREAM_SUPPORT: u64 = 1 << 48;
const STREAM_SIGNAL: u64 = 2 << 48;
const STREAM_SENSING: u64 = 3 << 48;

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws the common support and the per-node signals.
///
/// Deterministic for a fixed seed; each node's coefficients come from an
/// independent stream keyed by the node index.
pub fn generate_ensemble<T>(
    n: usize,
    k: usize,
    num_nodes: usize,
    dist: CoeffDist,
    seed: u64,
) -> Result<SparseEnsemble<T>>
where
    T: Real,
    StandardNormal: Distribution<T>,
{
    if k < 1 || k > n {
        return Err(Error::invalid(format!(
            "support size k={k} must satisfy 1 <= k <= n={n}"
        )));
    }
    if num_nodes < 1 {
        return Err(Error::invalid("need at least one node"));
    }

    let mut support_rng = stream_rng(seed, STREAM_SUPPORT);
    let mut support: Vec<usize> = rand::seq::index::sample(&mut support_rng, n, k).into_vec();
    support.sort_unstable();

    let signals = (0..num_nodes)
        .map(|j| {
            let mut rng = stream_rng(seed, STREAM_SIGNAL | j as u64);
            let mut x = vec![T::zero(); n];
            for &i in &support {
                x[i] = match dist {
                    CoeffDist::Rademacher => {
                        if rng.random_bool(0.5) {
                            T::one()
                        } else {
                            -T::one()
                        }
                    }
                    CoeffDist::Gaussian => rng.sample(StandardNormal),
                };
            }
            x
        })
        .collect();

    Ok(SparseEnsemble {
        n,
        k,
        num_nodes,
        support,
        signals,
        coeff_dist: dist,
    })
}

/// Draws a Gaussian sensing matrix with unit-norm columns and checks that it
/// has full row rank (via the Cholesky factor of `Phi Phi^T`).
fn draw_sensing_matrix<T>(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Result<DMat<T>>
where
    T: Real,
    StandardNormal: Distribution<T>,
{
    for _attempt in 0..2 {
        let mut phi = DMat::zeros(m, n);
        for i in 0..m {
            for v in phi.row_mut(i) {
                *v = rng.sample(StandardNormal);
            }
        }
        for j in 0..n {
            let norm = norm2(&phi.col(j));
            if norm == T::zero() {
                continue;
            }
            for i in 0..m {
                phi[(i, j)] /= norm;
            }
        }
        let gram_rows = phi.transpose().gram(); // Phi Phi^T, m x m
        if Cholesky::new(&gram_rows).is_ok() {
            return Ok(phi);
        }
    }
    Err(Error::numeric(
        "sensing matrix rank deficient after regeneration",
    ))
}

/// Generates `{y_j, Phi_j, sigma_j^2}` for every node.
///
/// The per-node noise variance is set so that `||Phi_j x_j||^2 / (m sigma_j^2)`
/// equals the requested SNR. Passing `snr_db = +inf` produces noiseless
/// observations with `noise_var = NOISE_FLOOR`.
pub fn generate_measurements<T>(
    ens: &SparseEnsemble<T>,
    m: usize,
    snr_db: T,
    seed: u64,
) -> Result<MeasurementSet<T>>
where
    T: Real,
    StandardNormal: Distribution<T>,
{
    if m < 1 {
        return Err(Error::invalid("need at least one measurement per node"));
    }
    if m > ens.n {
        return Err(Error::invalid(format!(
            "m={m} measurements exceed the signal dimension n={}",
            ens.n
        )));
    }

    let mut nodes = Vec::with_capacity(ens.num_nodes);
    for (j, x) in ens.signals.iter().enumerate() {
        let mut rng = stream_rng(seed, STREAM_SENSING | j as u64);
        let phi = draw_sensing_matrix::<T>(&mut rng, m, ens.n)?;
        let clean = phi.matvec(x);
        let signal_power = crate::linalg::dot(&clean, &clean);

        let (noise_var, y) = if snr_db.is_infinite() && snr_db > T::zero() {
            (real::<T>(NOISE_FLOOR), clean)
        } else {
            if signal_power == T::zero() {
                return Err(Error::DegenerateSnr(format!(
                    "node {j} has a zero observation; finite SNR {snr_db} dB is unattainable"
                )));
            }
            let snr_lin = real::<T>(10.0).powf(snr_db / real::<T>(10.0));
            let noise_var = signal_power / (real::<T>(m as f64) * snr_lin);
            let sigma = noise_var.sqrt();
            let y = clean
                .iter()
                .map(|&c| c + sigma * rng.sample::<T, _>(StandardNormal))
                .collect();
            (noise_var, y)
        };

        nodes.push(NodeMeasurement { phi, y, noise_var });
    }

    Ok(MeasurementSet { m, n: ens.n, nodes })
}
