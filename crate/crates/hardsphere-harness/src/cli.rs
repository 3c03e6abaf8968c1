//! Command-line interface. Flags override config-file values; exit code 0
//! means every verdict passed, 1 is a verdict or runtime failure, 2 a usage
//! error.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hardsphere_core::bounds::bounds_table;
use hardsphere_core::percolation::{critical_intensity_sweep, crossing_estimate, fit_decay};
use hardsphere_core::sampling::RngStream;

use crate::config::{parse_box, parse_points, ExperimentConfig};
use crate::experiments::{
    self, describe_fit, generate_couples, generate_samples, SampleKind,
};
use crate::io;
use crate::{HarnessError, Result};

#[derive(Parser, Debug)]
#[command(
    name = "hardsphere",
    about = "Hard-sphere model samplers, couplings, and percolation experiments",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default, Clone)]
struct CommonArgs {
    /// Flat key=value config file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Box as lo:hi per dimension, comma-separated (e.g. 0:1,0:1).
    #[arg(long = "box", allow_hyphen_values = true)]
    box_spec: Option<String>,
    /// Boundary condition points, colon-separated coords, ';'-separated.
    #[arg(long, allow_hyphen_values = true)]
    bc1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    bc2: Option<String>,
    /// Observation window, same syntax as --box.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    /// Comma-separated distances for decay scans.
    #[arg(long, allow_hyphen_values = true)]
    distances: Option<String>,
    /// Comma-separated box sides for sweeps.
    #[arg(long, allow_hyphen_values = true)]
    box_sides: Option<String>,
    /// Comma-separated intensity grid for sweeps.
    #[arg(long, allow_hyphen_values = true)]
    alpha_grid: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicas: Option<u64>,
    /// Monte Carlo draws per thinning decision (0 = exact 1D estimator).
    #[arg(long)]
    n_mc: Option<u32>,
    #[arg(long)]
    max_attempts: Option<u64>,
    /// Worker threads (default: all cores). Results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CommonArgs {
    fn into_config(self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::parse_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = self.dim {
            cfg.dim = v;
        }
        if let Some(v) = self.radius {
            cfg.radius = v;
        }
        if let Some(v) = self.lambda {
            cfg.lambda = v;
        }
        if let Some(v) = self.alpha {
            cfg.alpha = Some(v);
        }
        if let Some(v) = &self.box_spec {
            cfg.box_spec = parse_box(v)?;
        }
        if let Some(v) = &self.bc1 {
            cfg.boundary1 = parse_points(v)?;
        }
        if let Some(v) = &self.bc2 {
            cfg.boundary2 = parse_points(v)?;
        }
        if let Some(v) = &self.window {
            cfg.window = Some(parse_box(v)?);
        }
        if let Some(v) = &self.distances {
            cfg.set("distances", v)?;
        }
        if let Some(v) = &self.box_sides {
            cfg.set("box_sides", v)?;
        }
        if let Some(v) = &self.alpha_grid {
            cfg.set("alpha_grid", v)?;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.replicas {
            cfg.replicas = v;
        }
        if let Some(v) = self.n_mc {
            cfg.n_mc = v;
        }
        if let Some(v) = self.max_attempts {
            cfg.max_attempts = v;
        }
        if let Some(v) = self.threads {
            cfg.threads = Some(v);
        }
        if let Some(v) = self.out {
            cfg.out = Some(v);
        }
        Ok(cfg)
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SamplerArg {
    Poisson,
    HsRejection,
    HsThinning,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CoupleArg {
    Twisted,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PercolationArg {
    Sweep,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ExperimentArg {
    Marginal,
    Disagreement,
    Sensitivity,
    Uniqueness,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw configurations and write them as line records.
    Sample {
        #[arg(value_enum)]
        sampler: SamplerArg,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Draw twisted-coupling triples and write them as line records.
    Couple {
        #[arg(value_enum)]
        construction: CoupleArg,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Spanning-probability sweeps over box sides and intensities.
    Percolation {
        #[arg(value_enum)]
        action: PercolationArg,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Fit an exponential decay to rows of (distance, value, std_error).
    Decay {
        /// Must be `fit`.
        action: String,
        /// CSV input path.
        #[arg(long)]
        input: PathBuf,
    },
    /// Print the critical-intensity / cluster-expansion constants table.
    Bounds {
        /// Must be `table`.
        action: String,
        #[arg(long, default_value_t = 2)]
        dim: u32,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// Emit CSV instead of aligned text.
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named experiment and verdict it against its tolerances.
    Verify {
        #[arg(value_enum)]
        experiment: ExperimentArg,
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

/// Run the CLI; the returned code is the process exit status.
pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Sample { sampler, common } => {
            let cfg = common.into_config()?;
            let kind = match sampler {
                SamplerArg::Poisson => SampleKind::Poisson,
                SamplerArg::HsRejection => SampleKind::HsRejection,
                SamplerArg::HsThinning => SampleKind::HsThinning,
            };
            let records = generate_samples(&cfg, kind)?;
            let mut buf = Vec::new();
            io::write_sample_records(&mut buf, &records)?;
            write_output(&cfg.out, &String::from_utf8_lossy(&buf))?;
            Ok(0)
        }
        Command::Couple { construction: CoupleArg::Twisted, common } => {
            let cfg = common.into_config()?;
            let records = generate_couples(&cfg)?;
            let mut buf = Vec::new();
            io::write_couple_records(&mut buf, &records)?;
            write_output(&cfg.out, &String::from_utf8_lossy(&buf))?;
            Ok(0)
        }
        Command::Percolation { action: PercolationArg::Sweep, common } => {
            let cfg = common.into_config()?;
            if cfg.box_sides.is_empty() || cfg.alpha_grid.is_empty() {
                return Err(HarnessError::Parse(
                    "percolation sweep needs --box-sides and --alpha-grid".into(),
                ));
            }
            let mut rng = RngStream::new(cfg.seed, 0);
            let rows = critical_intensity_sweep(
                cfg.dim as u32,
                cfg.interaction_radius()?,
                &cfg.box_sides,
                &cfg.alpha_grid,
                cfg.replicas,
                &mut rng,
            )?;
            let mut text = io::render_sweep_csv(&rows)?;
            let largest = cfg.box_sides.iter().cloned().fold(f64::MIN, f64::max);
            match crossing_estimate(&rows, largest) {
                Ok(x) => text.push_str(&format!("# crossing_estimate_side_{largest} = {x:.4}\n")),
                Err(e) => text.push_str(&format!("# crossing_estimate_side_{largest} = n/a ({e})\n")),
            }
            write_output(&cfg.out, &text)?;
            Ok(0)
        }
        Command::Decay { action, input } => {
            if action != "fit" {
                return Err(HarnessError::Parse(format!("unknown decay action '{action}'")));
            }
            let text = std::fs::read_to_string(&input)?;
            let rows = io::parse_decay_csv(&text)?;
            let fit = fit_decay(&rows)?;
            let mut out = describe_fit(&fit);
            if !fit.is_decaying() {
                out.push_str("\nnon-decaying: 95% CI of kappa includes 0");
            }
            out.push('\n');
            write_output(&None, &out)?;
            Ok(0)
        }
        Command::Bounds { action, dim, radius, csv, out } => {
            if action != "table" {
                return Err(HarnessError::Parse(format!("unknown bounds action '{action}'")));
            }
            let rows = bounds_table(dim, radius)?;
            let text = if csv {
                io::render_bounds_csv(&rows)
            } else {
                io::render_bounds_text(&rows)
            };
            write_output(&out, &text)?;
            Ok(0)
        }
        Command::Verify { experiment, common } => {
            let cfg = common.into_config()?;
            let report = match experiment {
                ExperimentArg::Marginal => experiments::run_marginal_test(&cfg)?,
                ExperimentArg::Disagreement => experiments::run_disagreement_bound_test(&cfg)?,
                ExperimentArg::Sensitivity => experiments::run_sensitivity_decay(&cfg)?,
                ExperimentArg::Uniqueness => experiments::run_uniqueness_sweep(&cfg)?,
            };
            let text = report.render();
            write_output(&cfg.out, &text)?;
            Ok(if report.passed() { 0 } else { 1 })
        }
    }
}
