//! Closed-form convergence-rate constants for the consensus ADMM iterations.
//!
//! For a strongly convex objective (constant `m_f`, gradient Lipschitz
//! constant `M_f`) and a constraint system with eigen-extremes
//! `sigma2_min/sigma2_max` of `E1^T E1`, the iterates contract in a weighted
//! norm with a rate constant `delta`. `delta` is the best lower bound
//! obtained from a three-term minimum over two free parameters `mu, nu > 1`,
//! and both the maximizing penalty parameter `rho_opt` and the resulting
//! `delta_opt` have closed forms.

use crate::{real, Error, Real, Result};

/// Rate constants for a given objective and constraint spectrum.
#[derive(Debug, Clone, Copy)]
pub struct RateConstants<T> {
    /// Strong-convexity constant `m_f` of the objective.
    pub strong_convexity: T,
    /// Gradient Lipschitz constant `M_f`.
    pub grad_lipschitz: T,
    /// Objective condition number `kappa_f = M_f / m_f`.
    pub kappa_f: T,
    /// Constraint condition number `kappa = sigma2_max / sigma2_min`.
    pub kappa: T,
    /// Penalty parameter maximizing the contraction constant.
    pub rho_opt: T,
    /// Contraction constant achieved at `rho_opt`.
    pub delta_opt: T,
}

impl<T: Real> RateConstants<T> {
    /// Computes `rho_opt` and `delta_opt` from the objective constants and the
    /// constraint spectrum.
    ///
    /// For the quadratic consensus objective used in the decentralized M-step
    /// (`m_f = M_f = 2`) this reduces to `rho_opt = 2 / sigma2_min` and
    /// `delta_opt = 1 / (kappa + 1)`.
    pub fn optimal(
        strong_convexity: T,
        grad_lipschitz: T,
        sigma2_min: T,
        sigma2_max: T,
    ) -> Result<Self> {
        if strong_convexity <= T::zero()
            || grad_lipschitz <= T::zero()
            || sigma2_min <= T::zero()
            || sigma2_max <= T::zero()
        {
            return Err(Error::invalid(
                "rate constants need strictly positive inputs",
            ));
        }
        if grad_lipschitz < strong_convexity {
            return Err(Error::invalid(
                "gradient Lipschitz constant cannot be below the strong-convexity constant",
            ));
        }
        if sigma2_max < sigma2_min {
            return Err(Error::invalid("sigma2_max cannot be below sigma2_min"));
        }
        let kappa = sigma2_max / sigma2_min;
        let kappa_f = grad_lipschitz / strong_convexity;
        let four = real::<T>(4.0);
        let km1 = kappa - T::one();
        let s = (km1 * km1 + four * kappa * kappa_f * kappa_f).sqrt();
        let rho_opt = grad_lipschitz / (sigma2_max.sqrt() * sigma2_min.sqrt())
            * ((s + km1) / (s - km1)).sqrt();
        let delta_opt = real::<T>(2.0) / (kappa + T::one() + s);
        Ok(RateConstants {
            strong_convexity,
            grad_lipschitz,
            kappa_f,
            kappa,
            rho_opt,
            delta_opt,
        })
    }

    /// Rate constants for the decentralized M-step objective
    /// `sum_j ||gamma_j - a_j||^2`, which has `m_f = M_f = 2`.
    pub fn for_consensus_mstep(sigma2_min: T, sigma2_max: T) -> Result<Self> {
        Self::optimal(real(2.0), real(2.0), sigma2_min, sigma2_max)
    }
}

/// Evaluates the contraction constant candidate at a specific `(mu, nu, rho)`:
/// the minimum of
///
/// * `f1 = 2 m_f / (nu M_f^2 / (rho (nu - 1) sigma2_min) + mu rho sigma2_max)`
/// * `f2 = sigma2_min / (nu sigma2_max)`
/// * `f3 = (mu - 1) / mu`
///
/// The supremum of this expression over `mu, nu > 1` and `rho > 0` is
/// `delta_opt`.
#[allow(clippy::too_many_arguments)]
pub fn delta_general<T: Real>(
    mu: T,
    nu: T,
    rho: T,
    strong_convexity: T,
    grad_lipschitz: T,
    sigma2_min: T,
    sigma2_max: T,
) -> Result<T> {
    if mu <= T::one() || nu <= T::one() {
        return Err(Error::invalid("mu and nu must be strictly greater than 1"));
    }
    if rho <= T::zero() {
        return Err(Error::invalid("rho must be positive"));
    }
    if sigma2_min <= T::zero() || sigma2_max <= T::zero() {
        return Err(Error::invalid("constraint spectrum must be positive"));
    }
    let two = real::<T>(2.0);
    let f1 = two * strong_convexity
        / (nu * grad_lipschitz * grad_lipschitz / (rho * (nu - T::one()) * sigma2_min)
            + mu * rho * sigma2_max);
    let f2 = sigma2_min / (nu * sigma2_max);
    let f3 = (mu - T::one()) / mu;
    Ok(f1.min(f2).min(f3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unit_spectrum_quadratic_objective_closed_form() {
        let rc = RateConstants::optimal(2.0, 2.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(rc.rho_opt, 2.0, max_relative = 1e-12);
        assert_relative_eq!(rc.delta_opt, 0.5, max_relative = 1e-12);
    }

    #[test]
    fn consensus_mstep_reduces_to_two_over_sigma2_min() {
        // kappa = 3: rho_opt = 2 / sigma2_min, delta_opt = 1 / (kappa + 1).
        let rc = RateConstants::for_consensus_mstep(1.0, 3.0).unwrap();
        assert_relative_eq!(rc.rho_opt, 2.0, max_relative = 1e-12);
        assert_relative_eq!(rc.delta_opt, 0.25, max_relative = 1e-12);
    }

    #[test]
    fn ill_conditioned_objective_direct_evaluation() {
        // m_f = 1, M_f = 2, kappa = 1, kappa_f = 2: delta_opt = 2 / (2 + 4).
        let rc = RateConstants::optimal(1.0, 2.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(rc.delta_opt, 1.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(rc.rho_opt, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn f3_dominates_when_it_is_the_minimum() {
        // mu = 2 pins f3 = 1/2; a tiny Lipschitz constant and small rho keep
        // f1 ~ 17.9 and nu = 1.2 keeps f2 ~ 0.83, so the minimum is f3.
        let d = delta_general(2.0, 1.2, 0.05, 10.0, 0.1, 10.0, 10.0).unwrap();
        assert_relative_eq!(d, 0.5, max_relative = 1e-12);
    }

    #[test]
    fn large_nu_drives_delta_to_zero() {
        let d = delta_general(2.0, 1e9, 1.0, 2.0, 2.0, 1.0, 1.0).unwrap();
        assert!(d < 1e-8);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(delta_general(1.0, 2.0, 1.0, 2.0, 2.0, 1.0, 1.0).is_err());
        assert!(delta_general(2.0, 1.0, 1.0, 2.0, 2.0, 1.0, 1.0).is_err());
        assert!(delta_general(2.0, 2.0, 0.0, 2.0, 2.0, 1.0, 1.0).is_err());
        assert!(RateConstants::optimal(0.0, 2.0, 1.0, 1.0).is_err());
        assert!(RateConstants::optimal(2.0, 1.0, 1.0, 1.0).is_err());
    }

    /// Grid oracle: maximize `delta_general` over a log-spaced grid (the
    /// maximizer hugs the lower end of every axis), refining the box around
    /// the best cell each pass. Independent of the closed forms it checks.
    fn grid_max_delta(m_f: f64, big_m_f: f64, s2min: f64, s2max: f64, rho_hint: f64) -> f64 {
        // mu = 1 + e^u, nu = 1 + e^v, rho = e^w over mu, nu in (1, 100],
        // rho in (0, 100 rho_hint].
        let full_lo = [(1e-7f64).ln(), (1e-7f64).ln(), (1e-7 * rho_hint).ln()];
        let full_hi = [(99.0f64).ln(), (99.0f64).ln(), (100.0 * rho_hint).ln()];
        let mut lo = full_lo;
        let mut hi = full_hi;
        let pts = 25;
        let mut best = 0.0f64;
        for _pass in 0..10 {
            let mut pass_best = f64::NEG_INFINITY;
            let mut best_idx = [0usize; 3];
            for i in 0..pts {
                let mu = 1.0 + (lo[0] + (hi[0] - lo[0]) * i as f64 / (pts - 1) as f64).exp();
                for j in 0..pts {
                    let nu = 1.0 + (lo[1] + (hi[1] - lo[1]) * j as f64 / (pts - 1) as f64).exp();
                    for k in 0..pts {
                        let rho = (lo[2] + (hi[2] - lo[2]) * k as f64 / (pts - 1) as f64).exp();
                        let d = delta_general(mu, nu, rho, m_f, big_m_f, s2min, s2max).unwrap();
                        if d > pass_best {
                            pass_best = d;
                            best_idx = [i, j, k];
                        }
                    }
                }
            }
            best = best.max(pass_best);
            for dim in 0..3 {
                let step = (hi[dim] - lo[dim]) / (pts - 1) as f64;
                let center = lo[dim] + step * best_idx[dim] as f64;
                lo[dim] = (center - 2.0 * step).max(full_lo[dim]);
                hi[dim] = (center + 2.0 * step).min(full_hi[dim]);
            }
        }
        best
    }

    #[test]
    fn grid_search_approaches_the_closed_form_optimum() {
        let rc = RateConstants::optimal(2.0, 2.0, 1.0, 2.0).unwrap();
        let best = grid_max_delta(2.0, 2.0, 1.0, 2.0, rc.rho_opt);
        assert!(
            best <= rc.delta_opt + 1e-9,
            "grid {best} exceeds closed form {}",
            rc.delta_opt
        );
        assert!(
            best >= rc.delta_opt - 1e-3,
            "grid {best} below closed form {}",
            rc.delta_opt
        );
    }
}
