//! Decentralized M-step: bridge-node consensus ADMM.
//!
//! Each node holds a local copy `gamma_j` of the hyperparameters and a
//! multiplier `lambda_j^b` per connected bridge; each bridge holds an
//! auxiliary variable `gamma_b`. One iteration performs, in order,
//!
//! 1. `gamma_j <- (2 a_j + sum_b (rho gamma_b - lambda_j^b)) / (2 + rho |B_j|)`
//! 2. `gamma_b <- mean over j in N_b of gamma_j` (the multiplier terms cancel
//!    because they sum to zero around every bridge)
//! 3. `lambda_j^b <- lambda_j^b + rho (gamma_j - gamma_b)`
//!
//! with fresh values used downstream within the iteration (Gauss-Seidel
//! order). The fixed point is network-wide consensus on the average of the
//! `a_j`, i.e. the exact centralized M-step.
//!
//! The nonnegativity constraint on `gamma` is intentionally not enforced
//! here; iterates are driven toward a nonnegative average and are clamped at
//! zero only when fed back into the E-step.

use crate::graph::{ConstraintMatrices, NetworkTopology};
use crate::linalg::{dot, jacobi_eigh, norm_inf, pinv_apply, sub, DMat};
use crate::sbl::GAMMA_INIT;
use crate::{real, Error, Real, Result};

/// Stacked primal and dual iterates plus the penalty parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmmState<T> {
    /// Per-node hyperparameter copies `gamma_j` (L vectors of length n).
    pub gamma_nodes: Vec<Vec<T>>,
    /// Per-bridge variables `gamma_b`, in bridge-slot order.
    pub gamma_bridges: Vec<Vec<T>>,
    /// Multipliers, one per constraint row, in constraint order.
    pub lambda: Vec<Vec<T>>,
    /// Augmented-Lagrangian parameter (also the dual step size).
    pub rho: T,
    /// Completed iterations.
    pub iter: usize,
}

impl<T: Real> AdmmState<T> {
    /// Standard initialization: `gamma_j = GAMMA_INIT * 1`, `gamma_b = 0`,
    /// `lambda = 0`.
    pub fn init(cons: &ConstraintMatrices, rho: T) -> Result<Self> {
        if rho <= T::zero() {
            return Err(Error::invalid("rho must be positive"));
        }
        Ok(AdmmState {
            gamma_nodes: vec![vec![real(GAMMA_INIT); cons.n]; cons.num_nodes],
            gamma_bridges: vec![vec![T::zero(); cons.n]; cons.num_bridges],
            lambda: vec![vec![T::zero(); cons.n]; cons.n_constraints()],
            rho,
            iter: 0,
        })
    }
}

/// Closed-form node update. `bridge_gammas` and `lambdas` list the incoming
/// bridge variables and this node's multipliers in the same (ascending
/// bridge-id) order.
pub fn gamma_node_update<T: Real>(
    a_j: &[T],
    bridge_gammas: &[&[T]],
    lambdas: &[&[T]],
    rho: T,
) -> Vec<T> {
    debug_assert_eq!(bridge_gammas.len(), lambdas.len());
    debug_assert!(!bridge_gammas.is_empty());
    let denom = real::<T>(2.0) + rho * real::<T>(bridge_gammas.len() as f64);
    let two = real::<T>(2.0);
    let mut out: Vec<T> = a_j.iter().map(|&a| two * a).collect();
    for (gb, lam) in bridge_gammas.iter().zip(lambdas) {
        for ((o, &g), &l) in out.iter_mut().zip(gb.iter()).zip(lam.iter()) {
            *o += rho * g - l;
        }
    }
    for o in &mut out {
        *o /= denom;
    }
    out
}

/// Bridge update: plain average of the connected nodes' fresh `gamma_j`
/// (callers pass them in ascending node-id order for determinism).
pub fn gamma_bridge_update<T: Real>(member_gammas: &[&[T]]) -> Vec<T> {
    debug_assert!(!member_gammas.is_empty());
    let n = member_gammas[0].len();
    let mut out = vec![T::zero(); n];
    for g in member_gammas {
        for (o, &v) in out.iter_mut().zip(g.iter()) {
            *o += v;
        }
    }
    let inv = T::one() / real::<T>(member_gammas.len() as f64);
    for o in &mut out {
        *o *= inv;
    }
    out
}

/// Dual ascent step for one constraint: `lambda += rho (gamma_j - gamma_b)`.
pub fn lambda_update<T: Real>(lambda: &mut [T], gamma_j: &[T], gamma_b: &[T], rho: T) {
    for ((l, &gj), &gb) in lambda.iter_mut().zip(gamma_j).zip(gamma_b) {
        *l += rho * (gj - gb);
    }
}

/// Executes one full ADMM iteration on the stacked state.
pub fn admm_step<T: Real>(
    state: &mut AdmmState<T>,
    a: &[Vec<T>],
    topo: &NetworkTopology,
    cons: &ConstraintMatrices,
) {
    let rho = state.rho;

    // 1. Node updates (read old gamma_bridges and lambda only).
    for j in 0..cons.num_nodes {
        let rows = cons.node_rows(j);
        let bridge_gammas: Vec<&[T]> = cons.rows[rows.clone()]
            .iter()
            .map(|row| state.gamma_bridges[row.bridge_slot].as_slice())
            .collect();
        let lambdas: Vec<&[T]> = rows.clone().map(|r| state.lambda[r].as_slice()).collect();
        state.gamma_nodes[j] = gamma_node_update(&a[j], &bridge_gammas, &lambdas, rho);
    }

    // 2. Bridge updates (read fresh gamma_nodes; members come sorted).
    for slot in 0..cons.num_bridges {
        let members: Vec<&[T]> = topo
            .bridge_members(slot)
            .iter()
            .map(|&j| state.gamma_nodes[j].as_slice())
            .collect();
        state.gamma_bridges[slot] = gamma_bridge_update(&members);
    }

    // 3. Dual updates (fresh primal values on both sides).
    for (r, row) in cons.rows.iter().enumerate() {
        let (gj, gb) = (
            &state.gamma_nodes[row.node],
            &state.gamma_bridges[row.bridge_slot],
        );
        let mut lam = std::mem::take(&mut state.lambda[r]);
        lambda_update(&mut lam, gj, gb, rho);
        state.lambda[r] = lam;
    }

    state.iter += 1;
}

/// Number of real values exchanged per ADMM iteration:
/// `2 n N_C = 2 n sum_j |B_j|` (each constraint moves one length-`n` vector in
/// each direction).
pub fn messages_per_iteration(cons: &ConstraintMatrices) -> u64 {
    2 * cons.n as u64 * cons.n_constraints() as u64
}

/// Runs `r_max` iterations and returns the number of reals exchanged.
pub fn admm_mstep<T: Real>(
    state: &mut AdmmState<T>,
    a: &[Vec<T>],
    topo: &NetworkTopology,
    cons: &ConstraintMatrices,
    r_max: usize,
) -> u64 {
    for _ in 0..r_max {
        admm_step(state, a, topo, cons);
    }
    messages_per_iteration(cons) * r_max as u64
}

/// The exact optimum the iterations converge to, for diagnostics.
#[derive(Debug, Clone)]
pub struct KktReference<T> {
    /// Consensus value: the average of the `a_j`.
    pub gamma_bar: Vec<T>,
    /// Optimal multipliers per constraint row: the minimum-norm solution of
    /// the stationarity system, which is the limit of the dual iterates when
    /// they start from zero.
    pub lambda: Vec<Vec<T>>,
}

/// Solves the optimality system directly: the primal optimum is the plain
/// average of the `a_j`; the multipliers solve
/// `sum_{b in B_j} lambda_j^b = 2 (a_j - gamma_bar)` per node with
/// `sum_{j in N_b} lambda_j^b = 0` per bridge, taken in minimum norm.
///
/// Intended for small diagnostic instances; the dense eigen-solve is
/// `O((L + |B|)^3)`.
pub fn solve_reference<T: Real>(
    a: &[Vec<T>],
    cons: &ConstraintMatrices,
) -> Result<KktReference<T>> {
    let l = cons.num_nodes;
    if a.len() != l {
        return Err(Error::invalid("one a_j vector per node is required"));
    }
    let n = cons.n;
    let num_cols = l + cons.num_bridges;
    let nc = cons.n_constraints();

    let mut gamma_bar = vec![T::zero(); n];
    for aj in a {
        if aj.len() != n {
            return Err(Error::invalid("a_j dimension mismatch"));
        }
        for (g, &v) in gamma_bar.iter_mut().zip(aj) {
            *g += v;
        }
    }
    let inv_l = T::one() / real::<T>(l as f64);
    for g in &mut gamma_bar {
        *g *= inv_l;
    }

    // Stacked system A^T lambda = c with A = [C1 C2]; the Kronecker structure
    // decouples it per coordinate, so one eigendecomposition of A^T A serves
    // all n right-hand sides.
    let mut stacked = DMat::zeros(nc, num_cols);
    for (r, row) in cons.rows.iter().enumerate() {
        stacked[(r, row.node)] = T::one();
        stacked[(r, l + row.bridge_slot)] = -T::one();
    }
    let gram = stacked.gram();
    let (eigvals, eigvecs) = jacobi_eigh(&gram)?;

    let two = real::<T>(2.0);
    let mut lambda = vec![vec![T::zero(); n]; nc];
    for coord in 0..n {
        let mut c = vec![T::zero(); num_cols];
        for (j, aj) in a.iter().enumerate() {
            // Stationarity: grad f + E1^T lambda = 0 with grad_j f = 2 (gamma - a_j).
            c[j] = two * (aj[coord] - gamma_bar[coord]);
        }
        let z = pinv_apply(&eigvals, &eigvecs, &c);
        let lam = stacked.matvec(&z);
        // Verify A^T lam = c; an inconsistent system means the constraint
        // structure is broken.
        let resid = sub(&stacked.tr_matvec(&lam), &c);
        let scale = T::one().max(norm_inf(&c));
        if norm_inf(&resid) > real::<T>(1e-10) * scale {
            return Err(Error::numeric(format!(
                "optimality system residual {} at coordinate {coord}",
                norm_inf(&resid)
            )));
        }
        for (r, l_row) in lambda.iter_mut().enumerate() {
            l_row[coord] = lam[r];
        }
    }

    Ok(KktReference { gamma_bar, lambda })
}

/// Weighted distance to the reference optimum:
/// `sqrt(rho ||E2 (gamma_B - gamma_B*)||^2 + ||lambda - lambda*||^2 / rho)`.
///
/// This is the norm in which the iterates contract Q-linearly.
pub fn gnorm_gap<T: Real>(
    state: &AdmmState<T>,
    reference: &KktReference<T>,
    cons: &ConstraintMatrices,
) -> T {
    let mut bridge_term = T::zero();
    for row in &cons.rows {
        let gb = &state.gamma_bridges[row.bridge_slot];
        let d = sub(gb, &reference.gamma_bar);
        bridge_term += dot(&d, &d);
    }
    let mut dual_term = T::zero();
    for (lam, lam_star) in state.lambda.iter().zip(&reference.lambda) {
        let d = sub(lam, lam_star);
        dual_term += dot(&d, &d);
    }
    (state.rho * bridge_term + dual_term / state.rho).sqrt()
}

/// Euclidean distance of the stacked node variables to consensus at the
/// optimum.
pub fn primal_gap<T: Real>(state: &AdmmState<T>, reference: &KktReference<T>) -> T {
    let mut acc = T::zero();
    for gj in &state.gamma_nodes {
        let d = sub(gj, &reference.gamma_bar);
        acc += dot(&d, &d);
    }
    acc.sqrt()
}

/// Records the per-iteration distances to the reference optimum.
#[derive(Debug, Clone)]
pub struct GNormMonitor<T> {
    pub reference: KktReference<T>,
    pub gnorm_history: Vec<T>,
    pub primal_gap_history: Vec<T>,
}

impl<T: Real> GNormMonitor<T> {
    pub fn new(reference: KktReference<T>) -> Self {
        GNormMonitor {
            reference,
            gnorm_history: Vec::new(),
            primal_gap_history: Vec::new(),
        }
    }

    pub fn record(&mut self, state: &AdmmState<T>, cons: &ConstraintMatrices) {
        self.gnorm_history
            .push(gnorm_gap(state, &self.reference, cons));
        self.primal_gap_history
            .push(primal_gap(state, &self.reference));
    }
}

/// Sum of multipliers around each bridge; zero after every iteration when the
/// duals start from zero.
pub fn bridge_multiplier_sums<T: Real>(
    state: &AdmmState<T>,
    cons: &ConstraintMatrices,
) -> Vec<Vec<T>> {
    let mut sums = vec![vec![T::zero(); cons.n]; cons.num_bridges];
    for (r, row) in cons.rows.iter().enumerate() {
        for (s, &l) in sums[row.bridge_slot].iter_mut().zip(&state.lambda[r]) {
            *s += l;
        }
    }
    sums
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::rate::RateConstants;
    use crate::graph::{build_constraints, generate_erdos_renyi, select_bridges, NetworkTopology};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn path3() -> (NetworkTopology, ConstraintMatrices) {
        let mut topo = NetworkTopology::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        topo.set_bridges([1]).unwrap();
        let cons = build_constraints(&topo, 1).unwrap();
        (topo, cons)
    }

    fn random_instance(
        seed: u64,
        l: usize,
        n: usize,
    ) -> (NetworkTopology, ConstraintMatrices, Vec<Vec<f64>>) {
        let mut topo = generate_erdos_renyi(l, 0.6, seed).unwrap();
        let b = select_bridges(&topo);
        topo.set_bridges(b).unwrap();
        let cons = build_constraints(&topo, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xABCD);
        let a = (0..l)
            .map(|_| (0..n).map(|_| rng.random::<f64>() * 5.0).collect())
            .collect();
        (topo, cons, a)
    }

    #[test]
    fn node_update_fixed_point_at_consensus() {
        // lambda = 0 and gamma_b = a_j for every bridge leaves gamma_j = a_j.
        let a = vec![1.0, -2.0, 3.0];
        let zeros = vec![0.0; 3];
        let out = gamma_node_update(&a, &[&a, &a], &[&zeros, &zeros], 1.7);
        for (o, &ai) in out.iter().zip(&a) {
            assert_relative_eq!(o, &ai, max_relative = 1e-14);
        }
    }

    #[test]
    fn node_update_scalar_example() {
        // a = 4, one bridge with gamma_b = 0, lambda = 0, rho = 2: (8+0)/(2+2).
        let out = gamma_node_update(&[4.0], &[&[0.0][..]], &[&[0.0][..]], 2.0);
        assert_relative_eq!(out[0], 2.0, max_relative = 1e-14);
    }

    #[test]
    fn node_update_large_rho_approaches_bridge_mean() {
        let a = vec![100.0];
        let g1 = vec![1.0];
        let g2 = vec![3.0];
        let lam = vec![0.5];
        let out = gamma_node_update(&a, &[&g1, &g2], &[&lam, &lam], 1e12);
        assert_relative_eq!(out[0], 2.0, epsilon = 1e-9);
    }

    #[test]
    fn bridge_update_is_the_average() {
        let g1 = vec![1.0, 2.0];
        let g2 = vec![3.0, 4.0];
        assert_eq!(gamma_bridge_update(&[&g1, &g2]), vec![2.0, 3.0]);
        let c = vec![7.0, 7.0];
        assert_eq!(gamma_bridge_update(&[&c, &c, &c]), c);
    }

    #[test]
    fn bridge_update_matches_unsimplified_form_under_zero_sum() {
        // (rho sum gamma_j + sum lambda_j^b) / (rho |N_b|) reduces to the
        // plain average exactly when the multipliers sum to zero.
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..10 {
            let rho: f64 = rng.random::<f64>() * 3.0 + 0.1;
            let n = 3;
            let members = 4;
            let gammas: Vec<Vec<f64>> = (0..members)
                .map(|_| (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect())
                .collect();
            // Multipliers with zero sum across members.
            let mut lambdas: Vec<Vec<f64>> = (0..members - 1)
                .map(|_| (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect())
                .collect();
            let last: Vec<f64> = (0..n)
                .map(|i| -lambdas.iter().map(|l| l[i]).sum::<f64>())
                .collect();
            lambdas.push(last);

            let refs: Vec<&[f64]> = gammas.iter().map(|g| g.as_slice()).collect();
            let simple = gamma_bridge_update(&refs);
            for i in 0..n {
                let full: f64 = gammas.iter().map(|g| rho * g[i]).sum::<f64>()
                    + lambdas.iter().map(|l| l[i]).sum::<f64>();
                assert_relative_eq!(simple[i], full / (rho * members as f64), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn lambda_update_examples() {
        let mut lam = vec![0.0];
        lambda_update(&mut lam, &[3.0], &[1.0], 2.0);
        assert_eq!(lam, vec![4.0]);
        // Zero residual leaves the multiplier unchanged.
        let mut lam = vec![0.7];
        lambda_update(&mut lam, &[2.0], &[2.0], 5.0);
        assert_eq!(lam, vec![0.7]);
    }

    #[test]
    fn multipliers_sum_to_zero_after_every_iteration() {
        let (topo, cons, a) = random_instance(3, 8, 4);
        let rc = RateConstants::for_consensus_mstep(cons.sigma2_min, cons.sigma2_max).unwrap();
        let mut state = AdmmState::init(&cons, rc.rho_opt).unwrap();
        for _ in 0..30 {
            admm_step(&mut state, &a, &topo, &cons);
            for sums in bridge_multiplier_sums(&state, &cons) {
                assert!(norm_inf(&sums) <= 1e-10, "multiplier sum {:?}", sums);
            }
        }
    }

    #[test]
    fn iterations_converge_to_the_centralized_average() {
        for seed in [1u64, 4, 9] {
            let (topo, cons, a) = random_instance(seed, 7, 3);
            let rc = RateConstants::for_consensus_mstep(cons.sigma2_min, cons.sigma2_max).unwrap();
            let mut state = AdmmState::init(&cons, rc.rho_opt).unwrap();
            let msgs = admm_mstep(&mut state, &a, &topo, &cons, 500);
            assert_eq!(msgs, 500 * messages_per_iteration(&cons));

            let mut avg = vec![0.0; 3];
            for aj in &a {
                for (g, &v) in avg.iter_mut().zip(aj) {
                    *g += v / 7.0;
                }
            }
            for gj in &state.gamma_nodes {
                assert!(norm_inf(&sub(gj, &avg)) <= 1e-6, "seed {seed}");
            }
        }
    }

    #[test]
    fn single_node_fixed_point_is_its_own_average() {
        let mut topo = NetworkTopology::from_edges(1, &[]).unwrap();
        topo.set_bridges([0]).unwrap();
        let cons = build_constraints(&topo, 2).unwrap();
        let a = vec![vec![2.5, -1.0]];
        let mut state = AdmmState::init(&cons, 2.0).unwrap();
        admm_mstep(&mut state, &a, &topo, &cons, 200);
        assert!(norm_inf(&sub(&state.gamma_nodes[0], &a[0])) < 1e-12);
    }

    #[test]
    fn warm_start_at_the_fixed_point_stays_put() {
        let (topo, cons, a) = random_instance(11, 6, 2);
        let reference = solve_reference(&a, &cons).unwrap();
        let mut state = AdmmState::init(&cons, 1.3).unwrap();
        state.gamma_nodes = vec![reference.gamma_bar.clone(); cons.num_nodes];
        state.gamma_bridges = vec![reference.gamma_bar.clone(); cons.num_bridges];
        state.lambda = reference.lambda.clone();
        let before = state.clone();
        admm_step(&mut state, &a, &topo, &cons);
        for (x, y) in state.gamma_nodes.iter().zip(&before.gamma_nodes) {
            assert!(norm_inf(&sub(x, y)) < 1e-12);
        }
        for (x, y) in state.lambda.iter().zip(&before.lambda) {
            assert!(norm_inf(&sub(x, y)) < 1e-12);
        }
    }

    #[test]
    fn reference_solution_matches_hand_solved_path() {
        // Path 0-1-2 with bridge {1}, a = (1, 2, 3): gamma* = 2 and
        // lambda = (-2, 0, 2) from 2 (gamma* - a_j) + lambda_j = 0.
        let (_topo, cons) = path3();
        let a = vec![vec![1.0], vec![2.0], vec![3.0]];
        let reference = solve_reference(&a, &cons).unwrap();
        assert_relative_eq!(reference.gamma_bar[0], 2.0, max_relative = 1e-12);
        assert_relative_eq!(reference.lambda[0][0], -2.0, epsilon = 1e-10);
        assert_relative_eq!(reference.lambda[1][0], 0.0, epsilon = 1e-10);
        assert_relative_eq!(reference.lambda[2][0], 2.0, epsilon = 1e-10);
    }

    #[test]
    fn identical_inputs_give_zero_multipliers() {
        let (_topo, cons) = path3();
        let c: Vec<Vec<f64>> = vec![vec![4.2], vec![4.2], vec![4.2]];
        let reference = solve_reference(&c, &cons).unwrap();
        assert_relative_eq!(reference.gamma_bar[0], 4.2, max_relative = 1e-12);
        for lam in &reference.lambda {
            assert!(lam[0].abs() < 1e-12);
        }
    }

    #[test]
    fn reference_satisfies_the_optimality_equations() {
        let (_, cons, a) = random_instance(23, 9, 3);
        let reference = solve_reference(&a, &cons).unwrap();
        // Per node: sum_b lambda_j^b = 2 (a_j - gamma_bar).
        for j in 0..cons.num_nodes {
            for coord in 0..cons.n {
                let sum: f64 = cons.node_rows(j).map(|r| reference.lambda[r][coord]).sum();
                let target = 2.0 * (a[j][coord] - reference.gamma_bar[coord]);
                assert_relative_eq!(sum, target, epsilon = 1e-10);
            }
        }
        // Per bridge: multipliers sum to zero.
        for slot in 0..cons.num_bridges {
            for coord in 0..cons.n {
                let sum: f64 = cons
                    .bridge_rows(slot)
                    .iter()
                    .map(|&r| reference.lambda[r][coord])
                    .sum();
                assert!(sum.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn gnorm_gap_is_zero_at_the_reference() {
        let (_, cons, a) = random_instance(31, 5, 2);
        let reference = solve_reference(&a, &cons).unwrap();
        let mut state = AdmmState::init(&cons, 2.0).unwrap();
        state.gamma_bridges = vec![reference.gamma_bar.clone(); cons.num_bridges];
        state.lambda = reference.lambda.clone();
        assert!(gnorm_gap(&state, &reference, &cons) < 1e-12);
    }

    #[test]
    fn gnorm_gap_contracts_at_the_optimal_rate() {
        for seed in [2u64, 6, 14] {
            let (topo, cons, a) = random_instance(seed, 8, 3);
            let rc = RateConstants::for_consensus_mstep(cons.sigma2_min, cons.sigma2_max).unwrap();
            let reference = solve_reference(&a, &cons).unwrap();
            let mut state = AdmmState::init(&cons, rc.rho_opt).unwrap();
            let mut monitor = GNormMonitor::new(reference);
            monitor.record(&state, &cons);
            for _ in 0..80 {
                admm_step(&mut state, &a, &topo, &cons);
                monitor.record(&state, &cons);
            }
            let bound = 1.0 / (1.0 + rc.delta_opt);
            for w in monitor.gnorm_history.windows(2) {
                assert!(
                    w[1] <= bound * w[0] + 1e-9,
                    "seed {seed}: gap {} -> {} violates factor {bound}",
                    w[0],
                    w[1]
                );
            }
            // Primal gap is controlled by the G-norm gap (m_f = 2).
            for (r, w) in monitor.gnorm_history.windows(2).enumerate() {
                let pg = monitor.primal_gap_history[r + 1];
                assert!(pg * pg <= w[0] * w[0] / 4.0 + 1e-9, "seed {seed} iter {r}");
            }
        }
    }

    #[test]
    fn mstep_is_bit_deterministic() {
        let (topo, cons, a) = random_instance(40, 6, 4);
        let mut s1 = AdmmState::init(&cons, 1.5).unwrap();
        let mut s2 = AdmmState::init(&cons, 1.5).unwrap();
        admm_mstep(&mut s1, &a, &topo, &cons, 37);
        admm_mstep(&mut s2, &a, &topo, &cons, 37);
        assert_eq!(s1, s2);
    }
}
