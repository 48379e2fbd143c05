//! Centralized M-SBL: EM estimation of the shared prior variances `gamma`.
//!
//! Every coefficient `x_j(i)` is modeled as zero-mean Gaussian with variance
//! `gamma(i)` shared across nodes; maximizing the marginal likelihood of the
//! observations over `gamma` drives the variances of inactive coefficients to
//! zero, which is what recovers the common support. The E-step computes the
//! per-node posterior mean/covariance diagonal, the M-step averages the
//! posterior second moments across nodes.
//!
//! The E-step works on the `m x m` system `S = sigma^2 I + Phi Gamma Phi^T`,
//! which stays well defined when entries of `gamma` are exactly zero (the
//! information-form expression `(Gamma^{-1} + ...)^{-1}` does not).

use std::collections::BTreeSet;

use crate::linalg::{dot, norm2, sub, Cholesky, DMat};
use crate::model::{MeasurementSet, NodeMeasurement};
use crate::{real, Error, Real, Result};

/// Shared prior variances, one per coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperParams<T> {
    pub gamma: Vec<T>,
}

/// Posterior statistics of one node after an E-step.
#[derive(Debug, Clone)]
pub struct NodePosterior<T> {
    /// Posterior mean of `x_j`.
    pub mu: Vec<T>,
    /// Diagonal of the posterior covariance.
    pub sigma_diag: Vec<T>,
    /// Elementwise posterior second moment `sigma_diag + mu^2` (the quantity
    /// the M-step averages).
    pub second_moment: Vec<T>,
    /// This node's contribution to the log marginal likelihood.
    pub log_likelihood: T,
}

/// EM loop controls.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig<T> {
    /// Stop when the hyperparameter change drops to this 2-norm.
    pub epsilon: T,
    /// Outer iteration cap.
    pub max_outer_iters: usize,
    /// Support threshold is `threshold_multiplier * noise_var`.
    pub threshold_multiplier: T,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        SolverConfig {
            epsilon: real(1e-6),
            max_outer_iters: 200,
            threshold_multiplier: real(4.0),
        }
    }
}

/// Initial hyperparameter value: small but nonzero so every coefficient can
/// enter the model.
pub const GAMMA_INIT: f64 = 1e-3;

/// Per-iteration solver diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct IterStats<T> {
    /// Log marginal likelihood at the hyperparameters entering the iteration.
    pub log_likelihood: T,
    /// `||gamma_new - gamma_old||_2` after the M-step.
    pub delta_gamma: T,
}

/// Result of the centralized EM solve.
#[derive(Debug, Clone)]
pub struct MsblOutcome<T> {
    pub hyper: HyperParams<T>,
    /// Per-node MAP estimates at the final hyperparameters.
    pub estimates: Vec<Vec<T>>,
    pub trace: Vec<IterStats<T>>,
    pub iters: usize,
    pub converged: bool,
}

fn check_gamma<T: Real>(gamma: &[T], n: usize) -> Result<()> {
    if gamma.len() != n {
        return Err(Error::invalid(format!(
            "gamma has length {} but the signal dimension is {n}",
            gamma.len()
        )));
    }
    for (i, &g) in gamma.iter().enumerate() {
        if !g.is_finite() || g < T::zero() {
            return Err(Error::invalid(format!(
                "gamma({i}) = {g} must be finite and nonnegative"
            )));
        }
    }
    Ok(())
}

/// One node's E-step: posterior mean, covariance diagonal, second moment, and
/// log-likelihood contribution at the prior variances `gamma`.
pub fn e_step<T: Real>(meas: &NodeMeasurement<T>, gamma: &[T]) -> Result<NodePosterior<T>> {
    let m = meas.phi.rows();
    let n = meas.phi.cols();
    check_gamma(gamma, n)?;
    if meas.noise_var <= T::zero() {
        return Err(Error::invalid("noise variance must be positive"));
    }
    if !meas.phi.is_finite() || meas.y.iter().any(|v| !v.is_finite()) {
        return Err(Error::numeric("non-finite measurement data"));
    }
    if meas.y.len() != m {
        return Err(Error::invalid(
            "observation length does not match the sensing matrix",
        ));
    }

    // S = sigma^2 I + Phi Gamma Phi^T, accumulated as rank-one updates over
    // the active coefficients.
    let mut s = DMat::zeros(m, m);
    for i in 0..m {
        s[(i, i)] = meas.noise_var;
    }
    for i in 0..n {
        let g = gamma[i];
        if g == T::zero() {
            continue;
        }
        let col = meas.phi.col(i);
        for p in 0..m {
            let gp = g * col[p];
            for q in p..m {
                s[(p, q)] += gp * col[q];
            }
        }
    }
    for p in 0..m {
        for q in 0..p {
            s[(p, q)] = s[(q, p)];
        }
    }

    let chol = Cholesky::new(&s)?;
    let v = chol.solve(&meas.y); // S^{-1} y

    let mut mu = vec![T::zero(); n];
    let mut sigma_diag = vec![T::zero(); n];
    let mut second_moment = vec![T::zero(); n];
    for i in 0..n {
        let g = gamma[i];
        if g == T::zero() {
            continue;
        }
        let col = meas.phi.col(i);
        mu[i] = g * dot(&col, &v);
        // phi_i^T S^{-1} phi_i via the triangular factor.
        let mut w = col;
        chol.solve_lower_in_place(&mut w);
        let t = dot(&w, &w);
        sigma_diag[i] = (g * (T::one() - g * t)).max(T::zero());
        second_moment[i] = sigma_diag[i] + mu[i] * mu[i];
    }

    let two_pi = real::<T>(2.0) * T::PI();
    let half = real::<T>(0.5);
    let log_likelihood =
        -half * (real::<T>(m as f64) * two_pi.ln() + chol.log_det() + dot(&meas.y, &v));

    Ok(NodePosterior {
        mu,
        sigma_diag,
        second_moment,
        log_likelihood,
    })
}

/// Exact M-step: averages the posterior second moments across nodes.
pub fn m_step_centralized<T: Real>(stats: &[NodePosterior<T>]) -> Result<HyperParams<T>> {
    if stats.is_empty() {
        return Err(Error::invalid("M-step needs at least one node"));
    }
    let n = stats[0].second_moment.len();
    let mut gamma = vec![T::zero(); n];
    for s in stats {
        if s.second_moment.len() != n {
            return Err(Error::invalid(
                "posterior statistics disagree on the dimension",
            ));
        }
        for (g, &a) in gamma.iter_mut().zip(&s.second_moment) {
            *g += a;
        }
    }
    let inv_l = T::one() / real::<T>(stats.len() as f64);
    for g in &mut gamma {
        *g *= inv_l;
    }
    Ok(HyperParams { gamma })
}

/// The (sign-flipped) M-step objective
/// `sum_j sum_i (log gamma(i) + a_j(i) / gamma(i))`; the M-step update is its
/// unconstrained minimizer. Used by tests.
pub fn m_step_cost<T: Real>(gamma: &[T], stats: &[NodePosterior<T>]) -> Result<T> {
    if gamma.iter().any(|&g| g <= T::zero()) {
        return Err(Error::invalid(
            "the M-step cost needs strictly positive gamma",
        ));
    }
    let mut cost = T::zero();
    for s in stats {
        for (i, &g) in gamma.iter().enumerate() {
            cost += g.ln() + s.second_moment[i] / g;
        }
    }
    Ok(cost)
}

/// Runs the EM loop to convergence (or the iteration cap) and returns the
/// learned hyperparameters, per-node MAP estimates, and the likelihood trace.
pub fn msbl_solve<T: Real>(
    meas: &MeasurementSet<T>,
    cfg: &SolverConfig<T>,
) -> Result<MsblOutcome<T>> {
    if meas.nodes.is_empty() {
        return Err(Error::invalid("measurement set has no nodes"));
    }
    let n = meas.n;
    let mut gamma = vec![real::<T>(GAMMA_INIT); n];
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iters = 0;

    for _k in 0..cfg.max_outer_iters {
        let stats: Vec<NodePosterior<T>> = meas
            .nodes
            .iter()
            .map(|node| e_step(node, &gamma))
            .collect::<Result<_>>()?;
        let log_likelihood = stats.iter().map(|s| s.log_likelihood).sum();
        let next = m_step_centralized(&stats)?.gamma;
        let delta_gamma = norm2(&sub(&next, &gamma));
        trace.push(IterStats {
            log_likelihood,
            delta_gamma,
        });
        gamma = next;
        iters += 1;
        if delta_gamma <= cfg.epsilon {
            converged = true;
            break;
        }
    }

    let estimates: Vec<Vec<T>> = meas
        .nodes
        .iter()
        .map(|node| map_estimate(&gamma, node))
        .collect::<Result<_>>()?;

    Ok(MsblOutcome {
        hyper: HyperParams { gamma },
        estimates,
        trace,
        iters,
        converged,
    })
}

/// MAP estimate of one node's signal at fixed hyperparameters (the posterior
/// mean).
pub fn map_estimate<T: Real>(gamma: &[T], meas: &NodeMeasurement<T>) -> Result<Vec<T>> {
    Ok(e_step(meas, gamma)?.mu)
}

/// Support estimate: indices with `gamma(i) > 4 * noise_var` (strict).
pub fn threshold_support<T: Real>(gamma: &[T], noise_var: T) -> BTreeSet<usize> {
    threshold_support_with(gamma, noise_var, real(4.0))
}

/// Support estimate with an explicit threshold multiplier.
pub fn threshold_support_with<T: Real>(
    gamma: &[T],
    noise_var: T,
    multiplier: T,
) -> BTreeSet<usize> {
    let thr = multiplier * noise_var;
    gamma
        .iter()
        .enumerate()
        .filter(|&(_, &g)| g > thr)
        .map(|(i, _)| i)
        .collect()
}

/// Support-aware LMMSE estimate: the posterior mean with prior variance
/// `signal_var` on the true support and zero elsewhere. Sets the MSE benchmark
/// for the support-agnostic solvers.
pub fn genie_lmmse<T: Real>(
    meas: &NodeMeasurement<T>,
    support: &[usize],
    signal_var: T,
) -> Result<Vec<T>> {
    let n = meas.phi.cols();
    if signal_var <= T::zero() {
        return Err(Error::invalid("signal variance must be positive"));
    }
    let mut gamma = vec![T::zero(); n];
    for &i in support {
        if i >= n {
            return Err(Error::invalid(format!("support index {i} out of range")));
        }
        gamma[i] = signal_var;
    }
    map_estimate(&gamma, meas)
}
