//! `run` subcommand: a set of Monte-Carlo trials at one configuration,
//! emitting a per-trial report CSV, the first trial's iteration trace, and a
//! reproducibility manifest.

use std::time::Instant;

use anyhow::Context;
use rayon::prelude::*;

use cbdsbl_core::bench::{nmse, nser, to_db};
use cbdsbl_core::graph::{
    generate_erdos_renyi, select_bridges_with_min, validate_bridges, NetworkTopology,
};
use cbdsbl_core::mix_seed;
use cbdsbl_core::model::{generate_ensemble, generate_measurements};
use cbdsbl_core::sbl::{msbl_solve, threshold_support_with, SolverConfig};
use cbdsbl_core::sim::{run_cbdsbl, FailureSchedule, TraceRow};

use crate::config::ExperimentConfig;
use crate::output::{manifest, write_atomic, write_manifest};

struct TrialRow {
    trial: usize,
    seed: u64,
    nmse_db: f64,
    nser: f64,
    exact_support: bool,
    iters: usize,
    converged: bool,
    messages: u64,
    wall_secs: f64,
    centralized: Option<(f64, f64)>,
    trace: Vec<TraceRow<f64>>,
}

fn fixed_topology(cfg: &ExperimentConfig) -> anyhow::Result<Option<NetworkTopology>> {
    let Some(seed) = cfg.topology.seed else {
        return Ok(None);
    };
    let l = cfg.problem.num_nodes;
    let mut topo = if l == 1 {
        NetworkTopology::from_edges(1, &[])?
    } else {
        generate_erdos_renyi(l, cfg.topology.connection_prob, seed)?
    };
    if let Some(bridges) = &cfg.topology.bridges {
        let zero_based: Vec<usize> = bridges.iter().map(|&b| b - 1).collect();
        topo.set_bridges(zero_based)?;
        let (ok, violations) = validate_bridges(&topo);
        if !ok {
            anyhow::bail!(
                "topology.bridges: bridge set violates the coverage conditions: {violations:?}"
            );
        }
    } else {
        let min = (cfg.topology.bridge_fraction * l as f64).ceil() as usize;
        let bridges = select_bridges_with_min(&topo, min);
        topo.set_bridges(bridges)?;
    }
    Ok(Some(topo))
}

fn one_trial(
    cfg: &ExperimentConfig,
    trial: usize,
    seed: u64,
    fixed: Option<&NetworkTopology>,
    compare: bool,
) -> anyhow::Result<TrialRow> {
    let start = Instant::now();
    let p = &cfg.problem;
    let ens =
        generate_ensemble::<f64>(p.n, p.k, p.num_nodes, cfg.coeff_dist()?, mix_seed(seed, 1))?;
    let meas = generate_measurements(&ens, p.m, p.snr_db, mix_seed(seed, 2))?;

    let topo = match fixed {
        Some(t) => t.clone(),
        None => {
            let mut t = if p.num_nodes == 1 {
                NetworkTopology::from_edges(1, &[])?
            } else {
                generate_erdos_renyi(p.num_nodes, cfg.topology.connection_prob, mix_seed(seed, 3))?
            };
            let min = (cfg.topology.bridge_fraction * p.num_nodes as f64).ceil() as usize;
            let b = select_bridges_with_min(&t, min);
            t.set_bridges(b)?;
            t
        }
    };

    let failures = if cfg.run.failure_rate > 0.0 {
        FailureSchedule::iid_per_round(p.num_nodes, cfg.run.failure_rate, mix_seed(seed, 4))
    } else {
        FailureSchedule::none(p.num_nodes)
    };

    let out = run_cbdsbl(&meas, &topo, &cfg.solver_config()?, &failures, Some(&ens))?;

    let mut truth = Vec::new();
    let mut estimates = Vec::new();
    let mut supports = Vec::new();
    for j in 0..p.num_nodes {
        if let (Some(est), Some(sup)) = (&out.estimates[j], &out.supports[j]) {
            truth.push(ens.signals[j].clone());
            estimates.push(est.clone());
            supports.push(sup.clone());
        }
    }
    let nmse_db = to_db(nmse(&truth, &estimates)?);
    let nser_val = nser::<f64>(&ens.support, &supports)?;
    let exact = supports
        .iter()
        .all(|s| s.iter().copied().eq(ens.support.iter().copied()));

    let centralized = if compare {
        let cen_cfg = SolverConfig {
            epsilon: cfg.solver.epsilon,
            max_outer_iters: cfg.solver.max_outer_iters,
            threshold_multiplier: cfg.solver.threshold_multiplier,
        };
        let cen = msbl_solve(&meas, &cen_cfg)?;
        let cen_nmse = to_db(nmse(&ens.signals, &cen.estimates)?);
        let cen_supports: Vec<_> = meas
            .nodes
            .iter()
            .map(|node| {
                threshold_support_with(
                    &cen.hyper.gamma,
                    node.noise_var,
                    cfg.solver.threshold_multiplier,
                )
            })
            .collect();
        let cen_nser = nser::<f64>(&ens.support, &cen_supports)?;
        Some((cen_nmse, cen_nser))
    } else {
        None
    };

    Ok(TrialRow {
        trial,
        seed,
        nmse_db,
        nser: nser_val,
        exact_support: exact,
        iters: out.iters,
        converged: out.converged,
        messages: out.ledger.total(),
        wall_secs: start.elapsed().as_secs_f64(),
        centralized,
        trace: out.trace,
    })
}

pub fn cmd_run(cfg: &ExperimentConfig, compare: bool) -> anyhow::Result<()> {
    let compare = compare || cfg.run.compare_centralized;
    let fixed = fixed_topology(cfg)?;
    let trial_seeds: Vec<u64> = (0..cfg.run.trials)
        .map(|t| mix_seed(cfg.root_seed, t as u64))
        .collect();

    let rows: Vec<TrialRow> = trial_seeds
        .par_iter()
        .enumerate()
        .map(|(t, &seed)| one_trial(cfg, t, seed, fixed.as_ref(), compare))
        .collect::<anyhow::Result<_>>()?;

    let dir = &cfg.output.dir;

    let mut report = String::new();
    report.push_str("trial,seed,nmse_db,nser,exact_support,iters,converged,messages,wall_secs");
    if compare {
        report.push_str(",nmse_db_centralized,nser_centralized");
    }
    report.push('\n');
    for row in &rows {
        report.push_str(&format!(
            "{},{},{},{},{},{},{},{},{:.6}",
            row.trial,
            row.seed,
            row.nmse_db,
            row.nser,
            row.exact_support,
            row.iters,
            row.converged,
            row.messages,
            row.wall_secs
        ));
        if let Some((cen_nmse, cen_nser)) = row.centralized {
            report.push_str(&format!(",{cen_nmse},{cen_nser}"));
        } else if compare {
            report.push_str(",,");
        }
        report.push('\n');
    }
    write_atomic(&dir.join("report.csv"), &report)?;

    let mut trace = String::from(TraceRow::<f64>::csv_header());
    trace.push('\n');
    if let Some(first) = rows.first() {
        for row in &first.trace {
            trace.push_str(&row.to_csv());
            trace.push('\n');
        }
    }
    write_atomic(&dir.join("trace.csv"), &trace)?;

    let m = manifest("run", cfg, trial_seeds)?;
    write_manifest(&dir.join("manifest.toml"), &m).context("writing manifest")?;

    let mean_nmse = rows
        .iter()
        .map(|r| 10f64.powf(r.nmse_db / 10.0))
        .sum::<f64>()
        / rows.len() as f64;
    println!(
        "ran {} trial(s): mean NMSE {:.2} dB, exact support in {}/{} trials; outputs in {}",
        rows.len(),
        10.0 * mean_nmse.log10(),
        rows.iter().filter(|r| r.exact_support).count(),
        rows.len(),
        dir.display()
    );
    Ok(())
}
