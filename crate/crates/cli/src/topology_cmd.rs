//! `topology` subcommand: deterministic topology report with the constraint
//! spectrum and the closed-form penalty parameter.

use cbdsbl_core::graph::rate::RateConstants;
use cbdsbl_core::graph::{
    build_constraints, generate_erdos_renyi, select_bridges, topology_to_text,
};

pub fn cmd_topology(num_nodes: usize, connection_prob: f64, seed: u64) -> anyhow::Result<()> {
    if num_nodes < 2 {
        anyhow::bail!("nodes: need at least two nodes, got {num_nodes}");
    }
    if !(connection_prob > 0.0 && connection_prob <= 1.0) {
        anyhow::bail!("prob: connection probability {connection_prob} outside (0, 1]");
    }
    let mut topo = generate_erdos_renyi(num_nodes, connection_prob, seed)?;
    let bridges = select_bridges(&topo);
    topo.set_bridges(bridges)?;
    // Spectrum fields do not depend on the signal dimension; use n = 1.
    let cons = build_constraints(&topo, 1)?;
    let rc = RateConstants::for_consensus_mstep(cons.sigma2_min, cons.sigma2_max)?;

    print!("{}", topology_to_text(&topo));
    println!("n_constraints: {}", cons.n_constraints());
    println!("sigma2_min: {}", cons.sigma2_min);
    println!("sigma2_max: {}", cons.sigma2_max);
    println!("kappa: {}", cons.kappa);
    println!("rho_opt: {}", rc.rho_opt);
    println!("delta_opt: {}", rc.delta_opt);
    Ok(())
}
