//! Synchronous-round network simulator for the decentralized solver (CB-DSBL).
//!
//! Each node owns its measurements privately: nothing but hyperparameter
//! vectors (`gamma_j` upstream, `gamma_b` downstream) ever crosses a node
//! boundary, and a [`NodeRuntime`] never holds a reference to another node.
//! The simulator moves those vectors between nodes at round barriers, counts
//! every transmitted real in a [`MessageLedger`], and can kill nodes mid-run
//! from a [`FailureSchedule`].
//!
//! The outer loop is EM: a standalone E-step per node, then `r_max` consensus
//! ADMM iterations as the decentralized M-step (state warm-starts across EM
//! iterations), stopping when the stacked hyperparameters move less than
//! `epsilon` or the iteration cap is reached.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};

use crate::admm::{gamma_bridge_update, gamma_node_update, lambda_update};
use crate::graph::rate::RateConstants;
use crate::graph::{build_constraints, validate_bridges, NetworkTopology};
use crate::linalg::{dot, norm2, norm_inf, sub};
use crate::model::{MeasurementSet, NodeMeasurement, SparseEnsemble};
use crate::sbl::{self, threshold_support_with};
use crate::{real, Error, Real, Result};

/// How the penalty parameter is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoMode<T> {
    /// Closed-form optimum from the constraint spectrum.
    Auto,
    Explicit(T),
}

/// What happens to a node whose bridges have all failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrphanPolicy {
    /// The node freezes its hyperparameters and still reports an estimate.
    Freeze,
    /// The node is excluded from outputs and metrics.
    Drop,
}

/// Solver controls for one decentralized run.
#[derive(Debug, Clone, Copy)]
pub struct CbdsblConfig<T> {
    /// ADMM iterations per M-step.
    pub r_max: usize,
    /// EM iteration cap.
    pub max_outer_iters: usize,
    /// Stop when the stacked hyperparameter change drops to this 2-norm.
    pub epsilon: T,
    pub rho: RhoMode<T>,
    /// Support threshold is `threshold_multiplier * noise_var`.
    pub threshold_multiplier: T,
    pub orphan_policy: OrphanPolicy,
}

impl<T: Real> Default for CbdsblConfig<T> {
    fn default() -> Self {
        CbdsblConfig {
            r_max: 2,
            max_outer_iters: 200,
            epsilon: real(1e-6),
            rho: RhoMode::Auto,
            threshold_multiplier: real(4.0),
            orphan_policy: OrphanPolicy::Freeze,
        }
    }
}

/// Per-node failure rounds, counted in global ADMM iterations.
#[derive(Debug, Clone)]
pub struct FailureSchedule {
    /// `fail_round[j] = Some(r)`: node `j` is dead from the start of global
    /// ADMM iteration `r` on and never transmits again.
    pub fail_round: Vec<Option<usize>>,
}

impl FailureSchedule {
    pub fn none(num_nodes: usize) -> Self {
        FailureSchedule {
            fail_round: vec![None; num_nodes],
        }
    }

    pub fn at_rounds(num_nodes: usize, failures: &[(usize, usize)]) -> Self {
        let mut fail_round = vec![None; num_nodes];
        for &(node, round) in failures {
            fail_round[node] = Some(round);
        }
        FailureSchedule { fail_round }
    }

    /// Every node fails independently with probability `prob` per ADMM round;
    /// the first failing round is geometric.
    pub fn iid_per_round(num_nodes: usize, prob: f64, seed: u64) -> Self {
        if prob <= 0.0 {
            return Self::none(num_nodes);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let geo = Geometric::new(prob.min(1.0)).expect("probability in (0, 1]");
        let fail_round = (0..num_nodes)
            .map(|_| Some(geo.sample(&mut rng) as usize))
            .collect();
        FailureSchedule { fail_round }
    }

    pub fn is_empty(&self) -> bool {
        self.fail_round.iter().all(|f| f.is_none())
    }
}

/// Reals transmitted during one ADMM iteration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RoundMessages {
    pub node_to_bridge: u64,
    pub bridge_to_node: u64,
}

/// Per-round and cumulative message counts.
#[derive(Debug, Clone, Default)]
pub struct MessageLedger {
    pub rounds: Vec<RoundMessages>,
    pub total_node_to_bridge: u64,
    pub total_bridge_to_node: u64,
}

impl MessageLedger {
    fn record(&mut self, round: RoundMessages) {
        self.total_node_to_bridge += round.node_to_bridge;
        self.total_bridge_to_node += round.bridge_to_node;
        self.rounds.push(round);
    }

    pub fn total(&self) -> u64 {
        self.total_node_to_bridge + self.total_bridge_to_node
    }
}

/// One virtual node. Measurements and posterior statistics stay private to
/// the node; only `gamma` vectors are handed to the round loop.
#[derive(Debug, Clone)]
pub struct NodeRuntime<T> {
    id: usize,
    meas: NodeMeasurement<T>,
    /// Local hyperparameter copy (raw ADMM iterate, may dip below zero).
    gamma: Vec<T>,
    /// Bridge ids in this node's neighborhood, ascending.
    bridge_ids: Vec<usize>,
    /// One multiplier per entry of `bridge_ids`.
    lambda: Vec<Vec<T>>,
    /// Last received `gamma_b` per entry of `bridge_ids` (starts at zero).
    bridge_cache: Vec<Vec<T>>,
    /// Bridge variable, present when this node is a bridge.
    bridge_var: Option<Vec<T>>,
    /// Posterior mean from the latest E-step.
    mu: Vec<T>,
    /// Posterior second moment from the latest E-step (the `a_j` the M-step
    /// consumes).
    second_moment: Vec<T>,
    alive: bool,
    frozen: bool,
}

impl<T: Real> NodeRuntime<T> {
    fn new(id: usize, meas: NodeMeasurement<T>, topo: &NetworkTopology) -> Self {
        let n = meas.phi.cols();
        let bridge_ids = topo.bridge_nbrs(id).to_vec();
        let is_bridge = topo.bridge_slot(id).is_some();
        NodeRuntime {
            id,
            meas,
            gamma: vec![real(sbl::GAMMA_INIT); n],
            lambda: vec![vec![T::zero(); n]; bridge_ids.len()],
            bridge_cache: vec![vec![T::zero(); n]; bridge_ids.len()],
            bridge_ids,
            bridge_var: is_bridge.then(|| vec![T::zero(); n]),
            mu: vec![T::zero(); n],
            second_moment: vec![T::zero(); n],
            alive: true,
            frozen: false,
        }
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn is_alive(&self) -> bool {
        self.alive
    }

    /// Local hyperparameter vector; this is the only node state other nodes
    /// may see (relayed by the simulator).
    pub fn gamma(&self) -> &[T] {
        &self.gamma
    }

    /// Latest local signal estimate, read by the harness for metrics only.
    pub fn current_estimate(&self) -> &[T] {
        &self.mu
    }

    fn clamped_gamma(&self) -> Vec<T> {
        self.gamma.iter().map(|&g| g.max(T::zero())).collect()
    }

    fn local_estep(&mut self) -> Result<()> {
        let post = sbl::e_step(&self.meas, &self.clamped_gamma())?;
        self.mu = post.mu;
        self.second_moment = post.second_moment;
        Ok(())
    }

    /// Step 1: closed-form `gamma_j` update over the still-alive bridges.
    fn update_gamma(&mut self, bridge_alive: &[bool], rho: T) {
        let mut gammas: Vec<&[T]> = Vec::new();
        let mut lambdas: Vec<&[T]> = Vec::new();
        for (idx, &b) in self.bridge_ids.iter().enumerate() {
            if bridge_alive[b] {
                gammas.push(&self.bridge_cache[idx]);
                lambdas.push(&self.lambda[idx]);
            }
        }
        if gammas.is_empty() {
            return;
        }
        self.gamma = gamma_node_update(&self.second_moment, &gammas, &lambdas, rho);
    }

    /// Step 3: bridge-side average of the received `gamma_j` messages.
    fn update_bridge_var(&mut self, member_gammas: &[&[T]]) {
        self.bridge_var = Some(gamma_bridge_update(member_gammas));
    }

    /// Step 5: cache the fresh `gamma_b` and take the dual step.
    fn receive_bridge_var(&mut self, bridge: usize, payload: &[T], rho: T) {
        let idx = self
            .bridge_ids
            .binary_search(&bridge)
            .expect("message from a known bridge");
        self.bridge_cache[idx] = payload.to_vec();
        lambda_update(&mut self.lambda[idx], &self.gamma, payload, rho);
    }
}

/// Max over alive node pairs of the infinity-norm difference of their
/// hyperparameter vectors.
pub fn consensus_gap<T: Real>(gammas: &[Vec<T>], alive: &[bool]) -> T {
    let idx: Vec<usize> = (0..gammas.len()).filter(|&j| alive[j]).collect();
    let mut gap = T::zero();
    for (p, &i) in idx.iter().enumerate() {
        for &j in &idx[p + 1..] {
            gap = gap.max(norm_inf(&sub(&gammas[i], &gammas[j])));
        }
    }
    gap
}

/// One row of the per-iteration trace.
#[derive(Debug, Clone, Copy)]
pub struct TraceRow<T> {
    pub outer_iter: usize,
    pub consensus_gap: T,
    /// Mean NMSE over alive nodes, in dB; present when ground truth was
    /// supplied.
    pub mean_nmse_db: Option<T>,
    pub messages_cumulative: u64,
}

impl<T: Real> TraceRow<T> {
    pub fn csv_header() -> &'static str {
        "outer_iter,consensus_gap,mean_nmse_db,messages_cumulative"
    }

    pub fn to_csv(&self) -> String {
        let nmse = match self.mean_nmse_db {
            Some(v) => format!("{v}"),
            None => "NaN".to_string(),
        };
        format!(
            "{},{},{},{}",
            self.outer_iter, self.consensus_gap, nmse, self.messages_cumulative
        )
    }
}

/// Everything a decentralized run produces.
#[derive(Debug, Clone)]
pub struct CbdsblOutcome<T> {
    /// Final per-node hyperparameters, clamped at zero. Dead nodes keep their
    /// last value.
    pub node_gammas: Vec<Vec<T>>,
    /// Per-node MAP estimates; `None` for dead nodes (and for orphaned nodes
    /// under [`OrphanPolicy::Drop`]).
    pub estimates: Vec<Option<Vec<T>>>,
    /// Per-node thresholded supports, same availability as `estimates`.
    pub supports: Vec<Option<BTreeSet<usize>>>,
    pub alive: Vec<bool>,
    pub iters: usize,
    pub converged: bool,
    pub trace: Vec<TraceRow<T>>,
    pub ledger: MessageLedger,
    /// The penalty parameter actually used.
    pub rho: T,
}

fn mean_nmse_db<T: Real>(truth: &SparseEnsemble<T>, nodes: &[NodeRuntime<T>]) -> Option<T> {
    let mut acc = T::zero();
    let mut count = 0usize;
    for node in nodes.iter().filter(|nd| nd.alive) {
        let x = &truth.signals[node.id];
        let err = sub(x, node.current_estimate());
        let p = dot(x, x);
        if p == T::zero() {
            continue;
        }
        acc += dot(&err, &err) / p;
        count += 1;
    }
    if count == 0 {
        return None;
    }
    let nmse = acc / real::<T>(count as f64);
    Some(real::<T>(10.0) * nmse.log10())
}

/// Runs the decentralized solver end to end.
///
/// `ground_truth`, when supplied, is used by the harness for the per-iteration
/// NMSE column of the trace; nodes never see it.
pub fn run_cbdsbl<T: Real>(
    meas: &MeasurementSet<T>,
    topo: &NetworkTopology,
    cfg: &CbdsblConfig<T>,
    failures: &FailureSchedule,
    ground_truth: Option<&SparseEnsemble<T>>,
) -> Result<CbdsblOutcome<T>> {
    let l = topo.num_nodes();
    if meas.num_nodes() != l {
        return Err(Error::invalid(
            "one measurement per topology node is required",
        ));
    }
    if failures.fail_round.len() != l {
        return Err(Error::invalid(
            "failure schedule length must match the node count",
        ));
    }
    if cfg.r_max == 0 {
        return Err(Error::invalid("r_max must be at least 1"));
    }
    let (ok, violations) = validate_bridges(topo);
    if !ok {
        return Err(Error::invalid(format!(
            "bridge set is not valid: {violations:?}"
        )));
    }
    let cons = build_constraints(topo, meas.n)?;
    let rho = match cfg.rho {
        RhoMode::Auto => {
            RateConstants::for_consensus_mstep(
                real::<T>(cons.sigma2_min),
                real::<T>(cons.sigma2_max),
            )?
            .rho_opt
        }
        RhoMode::Explicit(r) => {
            if r <= T::zero() {
                return Err(Error::invalid("rho must be positive"));
            }
            r
        }
    };

    let mut nodes: Vec<NodeRuntime<T>> = meas
        .nodes
        .iter()
        .enumerate()
        .map(|(j, m)| NodeRuntime::new(j, m.clone(), topo))
        .collect();

    let mut ledger = MessageLedger::default();
    let mut trace = Vec::new();
    let mut global_round = 0usize;
    let mut converged = false;
    let mut iters = 0usize;
    let n = meas.n;
    let mut prev_stack: Vec<T> = nodes
        .iter()
        .flat_map(|nd| nd.gamma.iter().copied())
        .collect();

    for k in 0..cfg.max_outer_iters {
        // E-step: standalone, per alive (non-frozen) node.
        for node in nodes.iter_mut().filter(|nd| nd.alive && !nd.frozen) {
            node.local_estep()?;
        }

        // Decentralized M-step: r_max synchronous ADMM iterations.
        for _r in 0..cfg.r_max {
            // Apply scheduled failures for this round.
            for (node, fail) in nodes.iter_mut().zip(&failures.fail_round) {
                if node.alive && matches!(fail, Some(t) if *t <= global_round) {
                    node.alive = false;
                }
            }
            let bridge_alive: Vec<bool> = (0..l)
                .map(|j| topo.bridge_slot(j).is_some() && nodes[j].alive)
                .collect();
            // Freeze nodes whose bridges are all gone; bail out when nobody
            // can participate any more.
            let mut any_active = false;
            for node in nodes.iter_mut().filter(|nd| nd.alive) {
                let has_bridge = node.bridge_ids.iter().any(|&b| bridge_alive[b]);
                if !has_bridge {
                    node.frozen = true;
                } else {
                    any_active = true;
                }
            }
            if !any_active {
                return Err(Error::ConsensusImpossible(format!(
                    "no alive node has an alive bridge at round {global_round}"
                )));
            }

            let mut round = RoundMessages::default();

            // Step 1: local gamma updates.
            for node in nodes.iter_mut().filter(|nd| nd.alive && !nd.frozen) {
                node.update_gamma(&bridge_alive, rho);
            }

            // Step 2: node -> bridge transmissions; bridges collect messages
            // in ascending sender order.
            let mut inboxes: Vec<Vec<(usize, Vec<T>)>> = vec![Vec::new(); l];
            for j in 0..l {
                if !(nodes[j].alive && !nodes[j].frozen) {
                    continue;
                }
                let payload = nodes[j].gamma().to_vec();
                for &b in &nodes[j].bridge_ids {
                    if bridge_alive[b] {
                        inboxes[b].push((j, payload.clone()));
                        round.node_to_bridge += n as u64;
                    }
                }
            }

            // Step 3: bridge averages (an alive bridge always heard at least
            // itself).
            for b in 0..l {
                if !bridge_alive[b] || inboxes[b].is_empty() {
                    continue;
                }
                let members: Vec<&[T]> = inboxes[b].iter().map(|(_, g)| g.as_slice()).collect();
                nodes[b].update_bridge_var(&members);
            }

            // Steps 4 and 5: bridge -> node broadcasts, then dual updates at
            // the receivers.
            let mut broadcasts: Vec<(usize, Vec<T>)> = Vec::new();
            for b in 0..l {
                if !bridge_alive[b] {
                    continue;
                }
                if let Some(gb) = nodes[b].bridge_var.clone() {
                    broadcasts.push((b, gb));
                }
            }
            for (b, payload) in &broadcasts {
                let slot = topo.bridge_slot(*b).expect("broadcast comes from a bridge");
                for &j in topo.bridge_members(slot) {
                    if nodes[j].alive && !nodes[j].frozen {
                        nodes[j].receive_bridge_var(*b, payload, rho);
                        round.bridge_to_node += n as u64;
                    }
                }
            }

            ledger.record(round);
            global_round += 1;
        }

        iters = k + 1;
        let stack: Vec<T> = nodes
            .iter()
            .flat_map(|nd| nd.gamma.iter().copied())
            .collect();
        let delta = norm2(&sub(&stack, &prev_stack));
        prev_stack = stack;

        let gammas: Vec<Vec<T>> = nodes.iter().map(|nd| nd.gamma.clone()).collect();
        let alive: Vec<bool> = nodes.iter().map(|nd| nd.alive).collect();
        trace.push(TraceRow {
            outer_iter: k,
            consensus_gap: consensus_gap(&gammas, &alive),
            mean_nmse_db: ground_truth.and_then(|t| mean_nmse_db(t, &nodes)),
            messages_cumulative: ledger.total(),
        });

        if delta <= cfg.epsilon {
            converged = true;
            break;
        }
    }

    // Finalization: each surviving node computes its MAP estimate and support
    // from its own hyperparameters.
    let mut node_gammas = Vec::with_capacity(l);
    let mut estimates = Vec::with_capacity(l);
    let mut supports = Vec::with_capacity(l);
    for node in &nodes {
        let gamma = node.clamped_gamma();
        let reportable = node.alive && !(node.frozen && cfg.orphan_policy == OrphanPolicy::Drop);
        if reportable {
            let mu = sbl::map_estimate(&gamma, &node.meas)?;
            let support =
                threshold_support_with(&gamma, node.meas.noise_var, cfg.threshold_multiplier);
            estimates.push(Some(mu));
            supports.push(Some(support));
        } else {
            estimates.push(None);
            supports.push(None);
        }
        node_gammas.push(gamma);
    }

    Ok(CbdsblOutcome {
        node_gammas,
        estimates,
        supports,
        alive: nodes.iter().map(|nd| nd.alive).collect(),
        iters,
        converged,
        trace,
        ledger,
        rho,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admm::{admm_mstep, AdmmState};
    use crate::graph::select_bridges;
    use crate::model::{generate_ensemble, generate_measurements, CoeffDist};
    use crate::sbl::{e_step, msbl_solve, SolverConfig};

    fn default_problem(
        seed: u64,
        l: usize,
    ) -> (SparseEnsemble<f64>, MeasurementSet<f64>, NetworkTopology) {
        let ens = generate_ensemble::<f64>(50, 5, l, CoeffDist::Rademacher, seed).unwrap();
        let meas = generate_measurements(&ens, 10, 20.0, seed ^ 0xF00D).unwrap();
        let mut topo = crate::graph::generate_erdos_renyi(l, 0.8, seed ^ 0xBEEF).unwrap();
        let b = select_bridges(&topo);
        topo.set_bridges(b).unwrap();
        (ens, meas, topo)
    }

    fn single_node_problem(
        seed: u64,
    ) -> (SparseEnsemble<f64>, MeasurementSet<f64>, NetworkTopology) {
        let ens = generate_ensemble::<f64>(30, 3, 1, CoeffDist::Rademacher, seed).unwrap();
        let meas = generate_measurements(&ens, 12, 25.0, seed ^ 1).unwrap();
        let mut topo = NetworkTopology::from_edges(1, &[]).unwrap();
        topo.set_bridges([0]).unwrap();
        (ens, meas, topo)
    }

    #[test]
    fn single_node_run_matches_centralized_solver() {
        let (_, meas, topo) = single_node_problem(5);
        let cfg = CbdsblConfig {
            r_max: 500,
            ..CbdsblConfig::default()
        };
        let out = run_cbdsbl(&meas, &topo, &cfg, &FailureSchedule::none(1), None).unwrap();
        let central = msbl_solve(&meas, &SolverConfig::default()).unwrap();
        assert_eq!(out.iters, central.iters);
        let est = out.estimates[0].as_ref().unwrap();
        for (a, b) in est.iter().zip(&central.estimates[0]) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
        for (a, b) in out.node_gammas[0].iter().zip(&central.hyper.gamma) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn simulator_is_a_faithful_transport_layer() {
        // One EM iteration through the simulator must replay admm_mstep bit
        // for bit.
        let (_, meas, topo) = default_problem(10, 6);
        let cons = build_constraints(&topo, meas.n).unwrap();
        let rho = 1.7;
        let cfg = CbdsblConfig {
            r_max: 57,
            max_outer_iters: 1,
            rho: RhoMode::Explicit(rho),
            ..CbdsblConfig::default()
        };
        let out = run_cbdsbl(&meas, &topo, &cfg, &FailureSchedule::none(6), None).unwrap();

        let gamma0 = vec![crate::sbl::GAMMA_INIT; meas.n];
        let a: Vec<Vec<f64>> = meas
            .nodes
            .iter()
            .map(|node| e_step(node, &gamma0).unwrap().second_moment)
            .collect();
        let mut state = AdmmState::init(&cons, rho).unwrap();
        admm_mstep(&mut state, &a, &topo, &cons, 57);

        for (sim_gamma, direct) in out.node_gammas.iter().zip(&state.gamma_nodes) {
            let clamped: Vec<f64> = direct.iter().map(|&g| g.max(0.0)).collect();
            assert_eq!(sim_gamma, &clamped);
        }
    }

    #[test]
    fn ledger_counts_exact_message_totals() {
        let (_, meas, topo) = default_problem(3, 5);
        let cfg = CbdsblConfig {
            max_outer_iters: 4,
            ..CbdsblConfig::default()
        };
        let out = run_cbdsbl(&meas, &topo, &cfg, &FailureSchedule::none(5), None).unwrap();
        let per_iter: u64 = 2
            * meas.n as u64
            * (0..5)
                .map(|j| topo.bridge_nbrs(j).len() as u64)
                .sum::<u64>();
        assert_eq!(out.ledger.rounds.len(), out.iters * cfg.r_max);
        for round in &out.ledger.rounds {
            assert_eq!(round.node_to_bridge + round.bridge_to_node, per_iter);
            assert_eq!(round.node_to_bridge, round.bridge_to_node);
        }
        assert_eq!(
            out.ledger.total(),
            per_iter * (out.iters * cfg.r_max) as u64
        );
    }

    #[test]
    fn empty_schedule_matches_no_failure_run() {
        let (_, meas, topo) = default_problem(8, 5);
        let cfg = CbdsblConfig {
            max_outer_iters: 20,
            ..CbdsblConfig::default()
        };
        let a = run_cbdsbl(&meas, &topo, &cfg, &FailureSchedule::none(5), None).unwrap();
        let b = run_cbdsbl(
            &meas,
            &topo,
            &cfg,
            &FailureSchedule::at_rounds(5, &[]),
            None,
        )
        .unwrap();
        assert_eq!(a.node_gammas, b.node_gammas);
        assert_eq!(a.ledger.total(), b.ledger.total());
    }

    #[test]
    fn run_is_bit_deterministic() {
        let (ens, meas, topo) = default_problem(12, 6);
        let cfg = CbdsblConfig::default();
        let a = run_cbdsbl(&meas, &topo, &cfg, &FailureSchedule::none(6), Some(&ens)).unwrap();
        let b = run_cbdsbl(&meas, &topo, &cfg, &FailureSchedule::none(6), Some(&ens)).unwrap();
        assert_eq!(a.node_gammas, b.node_gammas);
        assert_eq!(a.iters, b.iters);
        for (ra, rb) in a.trace.iter().zip(&b.trace) {
            assert_eq!(ra.consensus_gap, rb.consensus_gap);
            assert_eq!(ra.mean_nmse_db, rb.mean_nmse_db);
            assert_eq!(ra.messages_cumulative, rb.messages_cumulative);
        }
    }

    #[test]
    fn survivors_reach_consensus_after_a_leaf_failure() {
        let (_, meas, topo) = default_problem(21, 10);
        // Kill a non-bridge node early.
        let victim = (0..10).find(|j| topo.bridge_slot(*j).is_none()).unwrap();
        let schedule = FailureSchedule::at_rounds(10, &[(victim, 1)]);
        let cfg = CbdsblConfig {
            max_outer_iters: 300,
            ..CbdsblConfig::default()
        };
        let out = run_cbdsbl(&meas, &topo, &cfg, &schedule, None).unwrap();
        assert!(!out.alive[victim]);
        assert_eq!(out.alive.iter().filter(|&&a| a).count(), 9);
        let gap = consensus_gap(&out.node_gammas, &out.alive);
        assert!(gap < 1e-4, "survivor consensus gap {gap}");
        assert!(out.estimates[victim].is_none());
    }

    #[test]
    fn losing_every_bridge_is_fatal() {
        let mut topo = NetworkTopology::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        topo.set_bridges([1]).unwrap();
        let ens = generate_ensemble::<f64>(20, 2, 3, CoeffDist::Rademacher, 2).unwrap();
        let meas = generate_measurements(&ens, 8, 20.0, 3).unwrap();
        let schedule = FailureSchedule::at_rounds(3, &[(1, 2)]);
        let err = run_cbdsbl(&meas, &topo, &CbdsblConfig::default(), &schedule, None);
        assert!(matches!(err, Err(Error::ConsensusImpossible(_))));
    }

    #[test]
    fn path_graph_moves_three_hundred_reals_per_iteration() {
        // Path 0-1-2 with bridge {1} and n = 50: every node has one bridge,
        // so one ADMM iteration moves 2 * 50 * 3 = 300 reals.
        let mut topo = NetworkTopology::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        topo.set_bridges([1]).unwrap();
        let ens = generate_ensemble::<f64>(50, 5, 3, CoeffDist::Rademacher, 4).unwrap();
        let meas = generate_measurements(&ens, 10, 20.0, 5).unwrap();
        let cfg = CbdsblConfig {
            max_outer_iters: 2,
            ..CbdsblConfig::default()
        };
        let out = run_cbdsbl(&meas, &topo, &cfg, &FailureSchedule::none(3), None).unwrap();
        for round in &out.ledger.rounds {
            assert_eq!(round.node_to_bridge + round.bridge_to_node, 300);
        }
    }

    #[test]
    fn consensus_gap_examples() {
        assert_eq!(consensus_gap(&[vec![1.0], vec![3.0]], &[true, true]), 2.0);
        assert_eq!(consensus_gap(&[vec![5.0], vec![5.0]], &[true, true]), 0.0);
        // Dead nodes are excluded.
        assert_eq!(consensus_gap(&[vec![1.0], vec![9.0]], &[true, false]), 0.0);
    }

    #[test]
    fn trace_reports_progress_and_messages() {
        let (ens, meas, topo) = default_problem(30, 8);
        let cfg = CbdsblConfig {
            max_outer_iters: 3000,
            ..CbdsblConfig::default()
        };
        let out = run_cbdsbl(&meas, &topo, &cfg, &FailureSchedule::none(8), Some(&ens)).unwrap();
        assert_eq!(out.trace.len(), out.iters);
        let last = out.trace.last().unwrap();
        assert!(
            last.consensus_gap < 1e-4,
            "gap {} iters {} conv {}",
            last.consensus_gap,
            out.iters,
            out.converged
        );
        // The gap trends down over the run (the per-iteration sequence is not
        // strictly monotone).
        assert!(last.consensus_gap < out.trace[4].consensus_gap / 10.0);
        assert!(last.mean_nmse_db.unwrap() < -15.0);
        assert_eq!(last.messages_cumulative, out.ledger.total());
        // Trace rows serialize into the documented CSV schema.
        assert_eq!(TraceRow::<f64>::csv_header().split(',').count(), 4);
        assert_eq!(last.to_csv().split(',').count(), 4);
    }
}
