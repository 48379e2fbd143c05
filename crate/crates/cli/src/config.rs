//! TOML experiment configuration: strict parsing (unknown keys rejected),
//! validation with field-anchored messages, and resolution into solver types.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use cbdsbl_core::bench::{PassRule, SolverKind, SweepAxis, SweepGrid, SweepParam, TrialSetup};
use cbdsbl_core::model::CoeffDist;
use cbdsbl_core::sim::{CbdsblConfig, OrphanPolicy, RhoMode};

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
#[derive(Default)]
pub struct ExperimentConfig {
    #[serde(default = "default_root_seed")]
    pub root_seed: u64,
    #[serde(default)]
    pub problem: ProblemConfig,
    #[serde(default)]
    pub topology: TopologyConfig,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn default_root_seed() -> u64 {
    0
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub num_nodes: usize,
    pub snr_db: f64,
    pub coeff_dist: String,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        ProblemConfig {
            n: 50,
            m: 10,
            k: 5,
            num_nodes: 10,
            snr_db: 20.0,
            coeff_dist: "rademacher".into(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyConfig {
    pub connection_prob: f64,
    /// Fix the topology across trials by drawing it from this seed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Explicit bridge set (1-based node ids); requires a fixed topology seed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bridges: Option<Vec<usize>>,
    /// Minimum bridge count as a fraction of the node count (0 keeps the
    /// greedy minimum).
    #[serde(default)]
    pub bridge_fraction: f64,
}

impl Default for TopologyConfig {
    fn default() -> Self {
        TopologyConfig {
            connection_prob: 0.8,
            seed: None,
            bridges: None,
            bridge_fraction: 0.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub r_max: usize,
    pub max_outer_iters: usize,
    pub epsilon: f64,
    /// `"auto"` or a positive number.
    pub rho: toml::Value,
    pub threshold_multiplier: f64,
    /// `"freeze"` or `"drop"`: what orphaned nodes do after bridge failures.
    pub orphan_policy: String,
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            r_max: 2,
            max_outer_iters: 200,
            epsilon: 1e-6,
            rho: toml::Value::String("auto".into()),
            threshold_multiplier: 4.0,
            orphan_policy: "freeze".into(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub trials: usize,
    pub compare_centralized: bool,
    /// Per-round i.i.d. node failure probability.
    pub failure_rate: f64,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            trials: 10,
            compare_centralized: false,
            failure_rate: 0.0,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// One of `rho`, `phase`, `snr`, `measurement_rate`, `bridge_failure`;
    /// alternative to explicit `axes`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default)]
    pub axes: Vec<AxisConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// `"nmse"` or `"support"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass_rule: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass_nmse_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass_support_prob: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub param: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let cfg: ExperimentConfig =
            toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        let p = &self.problem;
        if p.n == 0 {
            bail!("problem.n: signal dimension must be positive");
        }
        if p.k == 0 || p.k > p.n {
            bail!(
                "problem.k: support size {} must satisfy 1 <= k <= n = {}",
                p.k,
                p.n
            );
        }
        if p.m == 0 || p.m > p.n {
            bail!(
                "problem.m: measurement count {} must satisfy 1 <= m <= n = {}",
                p.m,
                p.n
            );
        }
        if p.num_nodes == 0 {
            bail!("problem.num_nodes: need at least one node");
        }
        self.coeff_dist()?;
        let t = &self.topology;
        if !(t.connection_prob > 0.0 && t.connection_prob <= 1.0) {
            bail!(
                "topology.connection_prob: {} outside (0, 1]",
                t.connection_prob
            );
        }
        if !(0.0..=1.0).contains(&t.bridge_fraction) {
            bail!(
                "topology.bridge_fraction: {} outside [0, 1]",
                t.bridge_fraction
            );
        }
        if t.bridges.is_some() && t.seed.is_none() {
            bail!("topology.bridges: an explicit bridge set requires topology.seed");
        }
        if let Some(bridges) = &t.bridges {
            if bridges.is_empty() {
                bail!("topology.bridges: bridge set cannot be empty");
            }
            for &b in bridges {
                if b == 0 || b > p.num_nodes {
                    bail!("topology.bridges: node id {b} outside 1..={}", p.num_nodes);
                }
            }
        }
        let s = &self.solver;
        if s.r_max == 0 {
            bail!("solver.r_max: at least one ADMM iteration per M-step is required");
        }
        if s.max_outer_iters == 0 {
            bail!("solver.max_outer_iters: must be positive");
        }
        if s.epsilon <= 0.0 || s.epsilon.is_nan() {
            bail!("solver.epsilon: must be positive");
        }
        if s.threshold_multiplier < 0.0 {
            bail!("solver.threshold_multiplier: must be nonnegative");
        }
        self.rho_mode()?;
        self.orphan_policy()?;
        if self.run.trials == 0 {
            bail!("run.trials: must be positive");
        }
        if !(0.0..=1.0).contains(&self.run.failure_rate) {
            bail!("run.failure_rate: {} outside [0, 1]", self.run.failure_rate);
        }
        if self.sweep.trials == Some(0) {
            bail!("sweep.trials: must be positive");
        }
        for axis in &self.sweep.axes {
            if SweepParam::parse(&axis.param).is_none() {
                bail!(
                    "sweep.axes.param: unknown parameter {:?} (expected one of m_over_n, \
                     k_over_n, num_nodes, snr_db, rho_scale, bridge_fraction, failure_rate)",
                    axis.param
                );
            }
            if axis.values.is_empty() {
                bail!("sweep.axes.values: axis {:?} has no values", axis.param);
            }
        }
        if let Some(preset) = &self.sweep.preset {
            if !["rho", "phase", "snr", "measurement_rate", "bridge_failure"]
                .contains(&preset.as_str())
            {
                bail!("sweep.preset: unknown preset {preset:?}");
            }
            if !self.sweep.axes.is_empty() {
                bail!("sweep.preset: give either a preset or explicit axes, not both");
            }
        }
        if let Some(rule) = &self.sweep.pass_rule {
            if !["nmse", "support"].contains(&rule.as_str()) {
                bail!("sweep.pass_rule: expected \"nmse\" or \"support\", got {rule:?}");
            }
        }
        Ok(())
    }

    pub fn coeff_dist(&self) -> anyhow::Result<CoeffDist> {
        match self.problem.coeff_dist.as_str() {
            "rademacher" => Ok(CoeffDist::Rademacher),
            "gaussian" => Ok(CoeffDist::Gaussian),
            other => {
                bail!("problem.coeff_dist: expected \"rademacher\" or \"gaussian\", got {other:?}")
            }
        }
    }

    pub fn rho_mode(&self) -> anyhow::Result<RhoMode<f64>> {
        match &self.solver.rho {
            toml::Value::String(s) if s == "auto" => Ok(RhoMode::Auto),
            toml::Value::Float(f) if *f > 0.0 => Ok(RhoMode::Explicit(*f)),
            toml::Value::Integer(i) if *i > 0 => Ok(RhoMode::Explicit(*i as f64)),
            other => bail!("solver.rho: expected \"auto\" or a positive number, got {other:?}"),
        }
    }

    pub fn orphan_policy(&self) -> anyhow::Result<OrphanPolicy> {
        match self.solver.orphan_policy.as_str() {
            "freeze" => Ok(OrphanPolicy::Freeze),
            "drop" => Ok(OrphanPolicy::Drop),
            other => bail!("solver.orphan_policy: expected \"freeze\" or \"drop\", got {other:?}"),
        }
    }

    pub fn solver_config(&self) -> anyhow::Result<CbdsblConfig<f64>> {
        Ok(CbdsblConfig {
            r_max: self.solver.r_max,
            max_outer_iters: self.solver.max_outer_iters,
            epsilon: self.solver.epsilon,
            rho: self.rho_mode()?,
            threshold_multiplier: self.solver.threshold_multiplier,
            orphan_policy: self.orphan_policy()?,
        })
    }

    /// Base trial setup for the sweep harness.
    pub fn trial_setup(&self) -> anyhow::Result<TrialSetup<f64>> {
        Ok(TrialSetup {
            n: self.problem.n,
            m: self.problem.m,
            k: self.problem.k,
            num_nodes: self.problem.num_nodes,
            snr_db: self.problem.snr_db,
            coeff_dist: self.coeff_dist()?,
            connection_prob: self.topology.connection_prob,
            solver: self.solver_config()?,
            kind: SolverKind::CbDsbl,
            bridge_fraction: self.topology.bridge_fraction,
            failure_rate: self.run.failure_rate,
            rho_scale: 1.0,
            nmse_target_db: -20.0,
        })
    }

    /// Resolves the sweep section (preset or explicit axes) into a grid.
    pub fn sweep_grid(&self) -> anyhow::Result<SweepGrid> {
        let axes: Vec<SweepAxis> = if let Some(preset) = &self.sweep.preset {
            match preset.as_str() {
                "rho" => vec![SweepAxis {
                    param: SweepParam::RhoScale,
                    values: vec![0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0],
                }],
                "phase" => vec![
                    SweepAxis {
                        param: SweepParam::SparsityRate,
                        values: (1..=5).map(|i| i as f64 / 10.0).collect(),
                    },
                    SweepAxis {
                        param: SweepParam::MeasurementRate,
                        values: (1..=9).map(|i| i as f64 / 10.0).collect(),
                    },
                ],
                "snr" => vec![SweepAxis {
                    param: SweepParam::SnrDb,
                    values: vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
                }],
                "measurement_rate" => vec![SweepAxis {
                    param: SweepParam::MeasurementRate,
                    values: (1..=9).map(|i| i as f64 / 10.0).collect(),
                }],
                "bridge_failure" => vec![
                    SweepAxis {
                        param: SweepParam::BridgeFraction,
                        values: vec![0.0, 0.2, 0.4, 0.6, 0.8],
                    },
                    SweepAxis {
                        param: SweepParam::FailureRate,
                        values: vec![0.0, 0.0005, 0.001, 0.002, 0.005],
                    },
                ],
                other => bail!("sweep.preset: unknown preset {other:?}"),
            }
        } else {
            if self.sweep.axes.is_empty() {
                bail!("sweep: either a preset or at least one axis is required");
            }
            self.sweep
                .axes
                .iter()
                .map(|a| {
                    Ok(SweepAxis {
                        param: SweepParam::parse(&a.param).ok_or_else(|| {
                            anyhow::anyhow!("unknown sweep parameter {:?}", a.param)
                        })?,
                        values: a.values.clone(),
                    })
                })
                .collect::<anyhow::Result<_>>()?
        };
        let pass = match self.sweep.pass_rule.as_deref() {
            Some("support") => {
                PassRule::ExactSupportProbAtLeast(self.sweep.pass_support_prob.unwrap_or(0.9))
            }
            _ => PassRule::MeanNmseDbAtMost(self.sweep.pass_nmse_db.unwrap_or(-20.0)),
        };
        Ok(SweepGrid {
            axes,
            trials: self.sweep.trials.unwrap_or(100),
            pass,
        })
    }
}
