use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use overlay_heal_cli::config::{self, Settings};
use overlay_heal_cli::runner;

/// Simulates self-healing protocols on P2P overlay networks under churn
/// and writes per-run, averaged and comparative CSV metrics.
#[derive(Parser, Debug)]
#[command(name = "overlay-heal", version)]
struct Cli {
    /// Named experiment preset (fig-uniform-evolution, fig-clustered-targeted, ...)
    #[arg(long)]
    preset: Option<String>,
    /// Flat key=value config file; flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    /// uniform | clustered | scale-free-acl | scale-free-pa
    #[arg(long)]
    topology: Option<String>,
    /// Node count (uniform and scale-free-pa)
    #[arg(long)]
    n: Option<usize>,
    /// Degree of the uniform topology
    #[arg(long)]
    d: Option<usize>,
    /// Cluster count (clustered)
    #[arg(long)]
    clusters: Option<usize>,
    /// Nodes per cluster (clustered)
    #[arg(long)]
    cluster_size: Option<usize>,
    /// Intra-cluster link probability (clustered)
    #[arg(long)]
    gamma: Option<f64>,
    /// Per-node inter-cluster link probability (clustered)
    #[arg(long)]
    omega: Option<f64>,
    /// Power-law scale parameter (scale-free-acl)
    #[arg(long)]
    acl_a: Option<f64>,
    /// Power-law exponent (scale-free-acl)
    #[arg(long)]
    acl_b: Option<f64>,
    /// Links per joining node (scale-free-pa)
    #[arg(long)]
    pa_m: Option<usize>,
    /// none | p2n | pecc
    #[arg(long, conflicts_with = "compare")]
    protocol: Option<String>,
    /// Comma-separated protocol list to run side by side
    #[arg(long)]
    compare: Option<String>,
    /// evolution | targeted-degree | targeted-betweenness | failures-only
    #[arg(long)]
    mode: Option<String>,
    /// Simulation steps per run
    #[arg(long)]
    steps: Option<u32>,
    /// Independent runs to average over
    #[arg(long)]
    runs: Option<u32>,
    /// Base RNG seed (falls back to $OVERLAY_HEAL_SEED, then 42)
    #[arg(long)]
    seed: Option<u64>,
    /// Node failures injected per step
    #[arg(long)]
    fails_per_step: Option<u32>,
    /// Degree cap consulted by the healing protocols
    #[arg(long)]
    threshold_degree: Option<usize>,
    /// Enable the periodic link-reduction pass
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    link_reduction: Option<bool>,
    /// ECC threshold above which link reduction may remove an edge
    #[arg(long)]
    t_ecc: Option<f64>,
    /// Maximum links removed per link-reduction pass
    #[arg(long)]
    r: Option<usize>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Cli {
    fn into_settings(self) -> (Settings, Option<PathBuf>) {
        let settings = Settings {
            preset: self.preset,
            topology: self.topology,
            n: self.n,
            d: self.d,
            clusters: self.clusters,
            cluster_size: self.cluster_size,
            gamma: self.gamma,
            omega: self.omega,
            acl_a: self.acl_a,
            acl_b: self.acl_b,
            pa_m: self.pa_m,
            protocol: self.protocol,
            compare: self.compare,
            mode: self.mode,
            steps: self.steps,
            runs: self.runs,
            seed: self.seed,
            fails_per_step: self.fails_per_step,
            threshold_degree: self.threshold_degree,
            link_reduction: self.link_reduction,
            t_ecc: self.t_ecc,
            r: self.r,
            out: self.out,
        };
        (settings, self.config)
    }
}

fn main() -> ExitCode {
    let (flags, config_path) = Cli::parse().into_settings();
    let cfg = match config::resolve(&flags, config_path.as_deref()) {
        Ok(cfg) => cfg,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::FAILURE;
        }
    };
    match runner::execute(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
