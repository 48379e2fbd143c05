//! `sweep` subcommand: a parameter grid of Monte-Carlo trials, a results CSV,
//! the phase-transition boundary when the grid is two-dimensional, and
//! optional SVG plots.

use anyhow::Context;

use cbdsbl_core::bench::{
    phase_boundary, run_sweep, sweep_csv_header, sweep_csv_row, SweepParam, SweepResults,
};
use cbdsbl_core::mix_seed;

use crate::config::ExperimentConfig;
use crate::output::{manifest, write_atomic, write_manifest};
use crate::plot;

pub fn cmd_sweep(cfg: &ExperimentConfig, dry_run: bool, plot_flag: bool) -> anyhow::Result<()> {
    if cfg.topology.seed.is_some() {
        anyhow::bail!("topology.seed: sweeps draw a fresh topology per trial; a fixed topology is only supported by `run`");
    }
    let grid = cfg.sweep_grid()?;
    let base = cfg.trial_setup()?;

    if dry_run {
        println!(
            "sweep grid: {} cell(s) x {} trial(s) = {} runs across {} axis/axes ({})",
            grid.num_cells(),
            grid.trials,
            grid.num_cells() * grid.trials,
            grid.axes.len(),
            grid.axes
                .iter()
                .map(|a| format!("{}[{}]", a.param.name(), a.values.len()))
                .collect::<Vec<_>>()
                .join(", ")
        );
        return Ok(());
    }

    let results = run_sweep(&base, &grid, cfg.root_seed);
    let dir = &cfg.output.dir;

    let mut csv = sweep_csv_header(&results);
    csv.push('\n');
    let sweep_id = cfg.sweep.preset.clone().unwrap_or_else(|| "custom".into());
    for cell in &results.cells {
        csv.push_str(&sweep_csv_row(&sweep_id, cell));
        csv.push('\n');
    }
    write_atomic(&dir.join("sweep.csv"), &csv)?;

    if results.axes.len() == 2 {
        let x = results.axes[1].param;
        let col = results.axes[0].param;
        let boundary = phase_boundary(&results, x, col);
        let mut btext = format!("{},first_passing_{}\n", col.name(), x.name());
        for (cv, bx) in &boundary {
            btext.push_str(&format!(
                "{cv},{}\n",
                bx.map(|v| v.to_string()).unwrap_or_default()
            ));
        }
        write_atomic(&dir.join("boundary.csv"), &btext)?;
    }

    if plot_flag {
        render_plots(&results, dir)?;
    }

    let cell_seeds: Vec<u64> = (0..grid.num_cells())
        .map(|c| mix_seed(cfg.root_seed, c as u64))
        .collect();
    let m = manifest("sweep", cfg, cell_seeds)?;
    write_manifest(&dir.join("manifest.toml"), &m).context("writing manifest")?;

    println!(
        "swept {} cell(s) x {} trial(s); {}/{} cells passed; outputs in {}",
        results.cells.len(),
        grid.trials,
        results.cells.iter().filter(|c| c.passed).count(),
        results.cells.len(),
        dir.display()
    );
    Ok(())
}

fn render_plots(results: &SweepResults, dir: &std::path::Path) -> anyhow::Result<()> {
    match results.axes.len() {
        1 => {
            let param = results.axes[0].param;
            let x_log2 = param == SweepParam::RhoScale;
            let nmse_series: Vec<(f64, f64)> = results
                .cells
                .iter()
                .map(|c| (c.params[0].1, c.mean_nmse_db))
                .collect();
            let iter_series: Vec<(f64, f64)> = results
                .cells
                .iter()
                .map(|c| (c.params[0].1, c.mean_iters_to_target))
                .collect();

            let marker = if x_log2 {
                // Highlight the scale with the fewest iterations to target;
                // scale 1 is the closed-form optimum.
                iter_series
                    .iter()
                    .cloned()
                    .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                    .map(|(x, y)| (x, y, "minimum".to_string()))
            } else {
                None
            };
            let x_label = if x_log2 {
                "rho scale factor"
            } else {
                param.name()
            };
            write_atomic(
                &dir.join("nmse.svg"),
                &plot::line_plot(
                    "mean NMSE",
                    x_label,
                    "NMSE (dB)",
                    &[("CB-DSBL".into(), nmse_series)],
                    x_log2,
                    None,
                ),
            )?;
            write_atomic(
                &dir.join("iterations.svg"),
                &plot::line_plot(
                    "mean iterations to the NMSE target",
                    x_label,
                    "iterations",
                    &[("CB-DSBL".into(), iter_series)],
                    x_log2,
                    marker,
                ),
            )?;
        }
        2 => {
            let row_axis = &results.axes[0];
            let col_axis = &results.axes[1];
            let mut values = vec![vec![f64::NAN; col_axis.values.len()]; row_axis.values.len()];
            for cell in &results.cells {
                let rv = cell.params[0].1;
                let cv = cell.params[1].1;
                let i = row_axis.values.iter().position(|&v| v == rv).unwrap();
                let j = col_axis.values.iter().position(|&v| v == cv).unwrap();
                values[i][j] = cell.mean_nmse_db;
            }
            let boundary: Vec<(f64, f64)> = phase_boundary(results, col_axis.param, row_axis.param)
                .into_iter()
                .filter_map(|(row_v, x)| x.map(|xv| (xv, row_v)))
                .collect();
            write_atomic(
                &dir.join("phase.svg"),
                &plot::heatmap(
                    "mean NMSE (dB) with pass boundary",
                    col_axis.param.name(),
                    row_axis.param.name(),
                    &col_axis.values,
                    &row_axis.values,
                    &values,
                    &boundary,
                ),
            )?;
        }
        _ => {
            eprintln!(
                "note: plots are rendered for 1- and 2-axis sweeps; this grid has {} axes",
                results.axes.len()
            );
        }
    }
    Ok(())
}
