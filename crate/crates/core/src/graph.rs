//! Network topology, bridge-node selection, and consensus constraint matrices.
//!
//! Consensus is enforced through a designated bridge set `B`: every node must
//! see at least one bridge in its closed single-hop neighborhood, and the two
//! endpoints of every edge must share a bridge. Under those two conditions the
//! per-bridge equality constraints `gamma_j = gamma_b` force network-wide
//! agreement on a connected graph.
//!
//! Neighborhoods are closed: a bridge node serves itself. This keeps the star
//! graph well posed (the center alone is a valid bridge set) and minimizes the
//! number of bridges the greedy selector needs.

use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::DMat;
use crate::{Error, Real, Result};

pub mod rate;

/// Maximum number of redraws when a random graph comes out disconnected.
pub const CONNECTIVITY_RETRIES: usize = 100;

/// Undirected communication graph with an optional bridge set.
#[derive(Debug, Clone)]
pub struct NetworkTopology {
    num_nodes: usize,
    /// Unordered edges stored as `(lo, hi)`, sorted.
    edges: Vec<(usize, usize)>,
    /// Open single-hop neighborhoods, sorted.
    nbrs: Vec<Vec<usize>>,
    /// Bridge node ids, sorted.
    bridges: Vec<usize>,
    /// `B_j`: bridges in node `j`'s closed neighborhood, sorted.
    bridge_nbrs: Vec<Vec<usize>>,
    /// `N_b`: nodes in the closed neighborhood of `bridges[slot]`, sorted.
    bridge_members: Vec<Vec<usize>>,
}

impl NetworkTopology {
    /// Builds a topology from an edge list. Duplicate edges collapse;
    /// self-loops are rejected. The bridge set starts empty.
    pub fn from_edges(num_nodes: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if num_nodes == 0 {
            return Err(Error::invalid("topology needs at least one node"));
        }
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a == b {
                return Err(Error::invalid(format!("self-loop at node {a}")));
            }
            if a >= num_nodes || b >= num_nodes {
                return Err(Error::invalid(format!(
                    "edge ({a}, {b}) references a node outside 0..{num_nodes}"
                )));
            }
            set.insert((a.min(b), a.max(b)));
        }
        let edges: Vec<(usize, usize)> = set.into_iter().collect();
        let mut nbrs = vec![Vec::new(); num_nodes];
        for &(a, b) in &edges {
            nbrs[a].push(b);
            nbrs[b].push(a);
        }
        for list in &mut nbrs {
            list.sort_unstable();
        }
        let mut topo = NetworkTopology {
            num_nodes,
            edges,
            nbrs,
            bridges: Vec::new(),
            bridge_nbrs: vec![Vec::new(); num_nodes],
            bridge_members: Vec::new(),
        };
        topo.rebuild_bridge_data();
        Ok(topo)
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, j: usize) -> &[usize] {
        &self.nbrs[j]
    }

    pub fn degree(&self, j: usize) -> usize {
        self.nbrs[j].len()
    }

    pub fn bridges(&self) -> &[usize] {
        &self.bridges
    }

    /// `B_j`: bridge nodes in `j`'s closed neighborhood.
    pub fn bridge_nbrs(&self, j: usize) -> &[usize] {
        &self.bridge_nbrs[j]
    }

    /// `N_b` for the bridge stored at `slot` in [`Self::bridges`].
    pub fn bridge_members(&self, slot: usize) -> &[usize] {
        &self.bridge_members[slot]
    }

    /// Position of bridge node `b` within the sorted bridge list.
    pub fn bridge_slot(&self, b: usize) -> Option<usize> {
        self.bridges.binary_search(&b).ok()
    }

    /// Total number of consensus constraints `N_C = sum_j |B_j|`.
    pub fn n_constraints(&self) -> usize {
        self.bridge_nbrs.iter().map(|b| b.len()).sum()
    }

    /// Installs a bridge set (any subset of nodes; validity is checked
    /// separately by [`validate_bridges`]).
    pub fn set_bridges(&mut self, bridges: impl IntoIterator<Item = usize>) -> Result<()> {
        let set: BTreeSet<usize> = bridges.into_iter().collect();
        if let Some(&bad) = set.iter().find(|&&b| b >= self.num_nodes) {
            return Err(Error::invalid(format!("bridge id {bad} out of range")));
        }
        self.bridges = set.into_iter().collect();
        self.rebuild_bridge_data();
        Ok(())
    }

    fn rebuild_bridge_data(&mut self) {
        let bridge_set: BTreeSet<usize> = self.bridges.iter().copied().collect();
        for (j, out) in self.bridge_nbrs.iter_mut().enumerate() {
            out.clear();
            if bridge_set.contains(&j) {
                out.push(j);
            }
            for &nb in &self.nbrs[j] {
                if bridge_set.contains(&nb) {
                    out.push(nb);
                }
            }
            out.sort_unstable();
        }
        self.bridge_members = self
            .bridges
            .iter()
            .map(|&b| {
                let mut members = vec![b];
                members.extend_from_slice(&self.nbrs[b]);
                members.sort_unstable();
                members
            })
            .collect();
    }

    pub fn is_connected(&self) -> bool {
        if self.num_nodes == 0 {
            return false;
        }
        let mut seen = vec![false; self.num_nodes];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(j) = queue.pop_front() {
            for &nb in &self.nbrs[j] {
                if !seen[nb] {
                    seen[nb] = true;
                    count += 1;
                    queue.push_back(nb);
                }
            }
        }
        count == self.num_nodes
    }
}

/// A broken bridge-set condition, naming the offending node or edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BridgeViolation {
    /// Node has no bridge in its closed neighborhood.
    NodeUncovered(usize),
    /// The edge's endpoints share no bridge.
    EdgeUncovered(usize, usize),
}

/// Checks the two bridge-set conditions: every node sees a bridge, and the two
/// endpoints of every edge share one. Returns all violations found.
pub fn validate_bridges(topo: &NetworkTopology) -> (bool, Vec<BridgeViolation>) {
    let mut violations = Vec::new();
    for j in 0..topo.num_nodes() {
        if topo.bridge_nbrs(j).is_empty() {
            violations.push(BridgeViolation::NodeUncovered(j));
        }
    }
    for &(a, b) in topo.edges() {
        let shared = topo
            .bridge_nbrs(a)
            .iter()
            .any(|x| topo.bridge_nbrs(b).binary_search(x).is_ok());
        if !shared {
            violations.push(BridgeViolation::EdgeUncovered(a, b));
        }
    }
    (violations.is_empty(), violations)
}

/// Greedy bridge selection: sort nodes by descending degree (ties broken by
/// lower id) and take the shortest prefix that satisfies both bridge-set
/// conditions. The full node set always qualifies, so this terminates.
pub fn select_bridges(topo: &NetworkTopology) -> Vec<usize> {
    select_bridges_with_min(topo, 0)
}

/// Same greedy rule, but keeps adding nodes until at least `min_count`
/// bridges are selected (used to trade communication for failure robustness).
pub fn select_bridges_with_min(topo: &NetworkTopology, min_count: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..topo.num_nodes()).collect();
    order.sort_by_key(|&j| (std::cmp::Reverse(topo.degree(j)), j));
    let mut probe = topo.clone();
    for prefix in 1..=topo.num_nodes() {
        probe
            .set_bridges(order[..prefix].iter().copied())
            .expect("node ids come from the topology itself");
        let (ok, _) = validate_bridges(&probe);
        if ok && prefix >= min_count {
            let mut bridges = order[..prefix].to_vec();
            bridges.sort_unstable();
            return bridges;
        }
    }
    let mut all: Vec<usize> = (0..topo.num_nodes()).collect();
    all.sort_unstable();
    all
}

/// Samples a connected Erdos-Renyi graph: each pair is an edge independently
/// with probability `p`; disconnected draws are retried up to
/// [`CONNECTIVITY_RETRIES`] times (`p = 0` therefore always exhausts the
/// retries). The bridge set is left empty.
pub fn generate_erdos_renyi(num_nodes: usize, p: f64, seed: u64) -> Result<NetworkTopology> {
    if num_nodes < 2 {
        return Err(Error::invalid("random graph needs at least two nodes"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!(
            "connection probability {p} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..CONNECTIVITY_RETRIES {
        let mut edges = Vec::new();
        for a in 0..num_nodes {
            for b in a + 1..num_nodes {
                if rng.random::<f64>() < p {
                    edges.push((a, b));
                }
            }
        }
        let topo = NetworkTopology::from_edges(num_nodes, &edges)?;
        if topo.is_connected() {
            return Ok(topo);
        }
    }
    Err(Error::TopologyGeneration(format!(
        "no connected draw in {CONNECTIVITY_RETRIES} attempts (p = {p}, L = {num_nodes})"
    )))
}

/// One consensus constraint `gamma_node = gamma_bridge`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstraintRow {
    pub node: usize,
    /// Bridge node id.
    pub bridge: usize,
    /// Index of `bridge` in the topology's sorted bridge list.
    pub bridge_slot: usize,
}

/// Consensus constraint system for a given topology and signal dimension.
///
/// The full constraint matrices are Kronecker products `C ⊗ I_n`; only the
/// row structure of `C1`/`C2` is stored, and dense versions can be
/// materialized for small-instance checks. The extreme eigenvalues of
/// `E1^T E1` equal the min/max number of bridge connections per node, so the
/// spectrum fields come straight from the bridge-neighborhood counts.
#[derive(Debug, Clone)]
pub struct ConstraintMatrices {
    /// Signal dimension `n` (block size of the Kronecker factor).
    pub n: usize,
    /// Number of primal node variables (`L`).
    pub num_nodes: usize,
    /// Number of bridge variables (`|B|`).
    pub num_bridges: usize,
    /// Constraint rows in lexicographic `(node, bridge)` order.
    pub rows: Vec<ConstraintRow>,
    /// Smallest eigenvalue of `E1^T E1` (= min_j |B_j|).
    pub sigma2_min: f64,
    /// Largest eigenvalue of `E1^T E1` (= max_j |B_j|).
    pub sigma2_max: f64,
    /// `sigma2_max / sigma2_min`.
    pub kappa: f64,
    /// Start offset of each node's contiguous row block (length `L + 1`).
    node_row_offsets: Vec<usize>,
    /// Row indices touching each bridge slot.
    bridge_row_ids: Vec<Vec<usize>>,
}

impl ConstraintMatrices {
    /// Row range owned by node `j` (its `(j, b)` constraints are contiguous).
    pub fn node_rows(&self, j: usize) -> std::ops::Range<usize> {
        self.node_row_offsets[j]..self.node_row_offsets[j + 1]
    }

    /// Rows whose bridge is `bridges[slot]`.
    pub fn bridge_rows(&self, slot: usize) -> &[usize] {
        &self.bridge_row_ids[slot]
    }

    pub fn n_constraints(&self) -> usize {
        self.rows.len()
    }

    /// Dense `C1` (`N_C x L`, one `+1` per row).
    pub fn dense_c1<T: Real>(&self) -> DMat<T> {
        let mut c1 = DMat::zeros(self.rows.len(), self.num_nodes);
        for (i, row) in self.rows.iter().enumerate() {
            c1[(i, row.node)] = T::one();
        }
        c1
    }

    /// Dense `C2` (`N_C x |B|`, one `-1` per row).
    pub fn dense_c2<T: Real>(&self) -> DMat<T> {
        let mut c2 = DMat::zeros(self.rows.len(), self.num_bridges);
        for (i, row) in self.rows.iter().enumerate() {
            c2[(i, row.bridge_slot)] = -T::one();
        }
        c2
    }

    /// Dense `E1 = C1 ⊗ I_n` for small-instance oracles.
    pub fn dense_e1<T: Real>(&self) -> DMat<T> {
        kron_with_identity(&self.dense_c1::<T>(), self.n)
    }

    /// Dense `E2 = C2 ⊗ I_n` for small-instance oracles.
    pub fn dense_e2<T: Real>(&self) -> DMat<T> {
        kron_with_identity(&self.dense_c2::<T>(), self.n)
    }
}

fn kron_with_identity<T: Real>(c: &DMat<T>, n: usize) -> DMat<T> {
    let mut out = DMat::zeros(c.rows() * n, c.cols() * n);
    for i in 0..c.rows() {
        for j in 0..c.cols() {
            let v = c[(i, j)];
            if v == T::zero() {
                continue;
            }
            for k in 0..n {
                out[(i * n + k, j * n + k)] = v;
            }
        }
    }
    out
}

/// Builds the constraint system for a topology with a valid bridge set.
pub fn build_constraints(topo: &NetworkTopology, n: usize) -> Result<ConstraintMatrices> {
    let (ok, violations) = validate_bridges(topo);
    if !ok {
        return Err(Error::invalid(format!(
            "bridge set violates the coverage conditions: {violations:?}"
        )));
    }
    if n == 0 {
        return Err(Error::invalid("signal dimension must be positive"));
    }
    let num_nodes = topo.num_nodes();
    let mut rows = Vec::with_capacity(topo.n_constraints());
    let mut node_row_offsets = Vec::with_capacity(num_nodes + 1);
    for j in 0..num_nodes {
        node_row_offsets.push(rows.len());
        for &b in topo.bridge_nbrs(j) {
            let bridge_slot = topo
                .bridge_slot(b)
                .expect("bridge id is in the bridge list");
            rows.push(ConstraintRow {
                node: j,
                bridge: b,
                bridge_slot,
            });
        }
    }
    node_row_offsets.push(rows.len());

    let mut bridge_row_ids = vec![Vec::new(); topo.bridges().len()];
    for (i, row) in rows.iter().enumerate() {
        bridge_row_ids[row.bridge_slot].push(i);
    }

    let counts: Vec<usize> = (0..num_nodes).map(|j| topo.bridge_nbrs(j).len()).collect();
    let min = *counts.iter().min().expect("at least one node") as f64;
    let max = *counts.iter().max().expect("at least one node") as f64;

    Ok(ConstraintMatrices {
        n,
        num_nodes,
        num_bridges: topo.bridges().len(),
        rows,
        sigma2_min: min,
        sigma2_max: max,
        kappa: max / min,
        node_row_offsets,
        bridge_row_ids,
    })
}

/// Serializes a topology to the edge-list text format: the node count, one
/// `j k` pair per line, then a `bridges:` line. Node ids are 1-based in the
/// file.
pub fn topology_to_text(topo: &NetworkTopology) -> String {
    let mut out = String::new();
    out.push_str(&format!("{}\n", topo.num_nodes()));
    for &(a, b) in topo.edges() {
        out.push_str(&format!("{} {}\n", a + 1, b + 1));
    }
    let bridges: Vec<String> = topo
        .bridges()
        .iter()
        .map(|&b| (b + 1).to_string())
        .collect();
    out.push_str(&format!("bridges: {}\n", bridges.join(" ")));
    out
}

/// Parses the edge-list text format produced by [`topology_to_text`].
pub fn topology_from_text(text: &str) -> Result<NetworkTopology> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let num_nodes: usize = lines
        .next()
        .ok_or_else(|| Error::invalid("empty topology file"))?
        .parse()
        .map_err(|e| Error::invalid(format!("bad node count: {e}")))?;
    let mut edges = Vec::new();
    let mut bridges = Vec::new();
    for line in lines {
        if let Some(rest) = line.strip_prefix("bridges:") {
            for tok in rest.split_whitespace() {
                let b: usize = tok
                    .parse()
                    .map_err(|e| Error::invalid(format!("bad bridge id {tok}: {e}")))?;
                if b == 0 {
                    return Err(Error::invalid("node ids in topology files are 1-based"));
                }
                bridges.push(b - 1);
            }
            continue;
        }
        let mut parts = line.split_whitespace();
        let a: usize = parts
            .next()
            .ok_or_else(|| Error::invalid(format!("bad edge line: {line}")))?
            .parse()
            .map_err(|e| Error::invalid(format!("bad edge line {line}: {e}")))?;
        let b: usize = parts
            .next()
            .ok_or_else(|| Error::invalid(format!("bad edge line: {line}")))?
            .parse()
            .map_err(|e| Error::invalid(format!("bad edge line {line}: {e}")))?;
        if parts.next().is_some() {
            return Err(Error::invalid(format!(
                "trailing tokens on edge line: {line}"
            )));
        }
        if a == 0 || b == 0 {
            return Err(Error::invalid("node ids in topology files are 1-based"));
        }
        edges.push((a - 1, b - 1));
    }
    let mut topo = NetworkTopology::from_edges(num_nodes, &edges)?;
    topo.set_bridges(bridges)?;
    Ok(topo)
}
