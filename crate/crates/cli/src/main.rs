//! Command-line front end: bound calculators, subset-sum solvers, density
//! tables, Monte Carlo sweeps, constant calibration, network pruning, and
//! the second-moment diagnostic, all seeded and manifest-replayable.

mod commands;
mod manifest;

use clap::{Parser, Subcommand};
use commands::*;
use manifest::{load_manifest, OutputWriter};
use rfss_core::bounds::{self, BoundInputs, ConstantsConfig};
use rfss_core::slth::{build_target, NetworkFile};
use rfss_core::solver::InstanceFile;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "rfss",
    version,
    about = "Fixed-size subset sum laboratory: solvers, bounds, Monte Carlo experiments, and sparse network pruning"
)]
struct Cli {
    /// Master seed (required for stochastic commands)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (output is identical for any value)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for output files and the run manifest
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Replay a recorded run instead of giving a subcommand
    #[arg(long, global = true)]
    from_manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form and implicit bound calculators
    Bounds {
        #[command(subcommand)]
        sub: BoundsCmd,
    },
    /// Solve one instance file with a named strategy
    Solve {
        /// Instance JSON: {values, k, z, epsilon, seed, spec}
        #[arg(long)]
        instance: PathBuf,
        /// bruteforce | mitm | heuristic
        #[arg(long, default_value = "mitm")]
        solver: String,
    },
    /// Success probability versus sample count at fixed k and epsilon
    Sweep {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        epsilon: f64,
        /// Inclusive range start:end:step
        #[arg(long)]
        n: String,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        /// Mixture weight of the Uniform[-1,1] component (default: pure uniform)
        #[arg(long)]
        mix_p: Option<f64>,
    },
    /// Sum-density tables, scaled envelopes, unimodality and domination checks
    Density {
        #[arg(long, default_value_t = 50)]
        n_max: u32,
        #[arg(long, default_value_t = 1024)]
        resolution: u32,
        #[arg(long, default_value_t = 10_000)]
        domination_grid: usize,
    },
    /// Prune a random overparameterized network down to a sparse approximant
    Prune {
        /// Target network JSON ({widths, weights, seed}); or use --target-widths
        #[arg(long)]
        target: Option<PathBuf>,
        /// Build a fresh norm-bounded target with these widths (e.g. 2,2)
        #[arg(long)]
        target_widths: Option<String>,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        gamma_prime: f64,
        /// Subset strategy for the per-group searches
        #[arg(long, default_value = "heuristic")]
        solver: String,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        /// Resample-and-retry count after a failed construction
        #[arg(long, default_value_t = 0)]
        retries: u64,
        #[arg(long, default_value_t = 1000)]
        verify_inputs: usize,
        #[arg(long, default_value_t = 1.0)]
        c_amp: f64,
    },
    /// Calibrate the bound constants empirically over a (k, eps) grid
    Calibrate {
        /// Comma-separated k:eps pairs, e.g. 2:0.1,4:0.05,8:0.02
        #[arg(long)]
        grid: String,
        #[arg(long, default_value_t = 500)]
        trials: u64,
        #[arg(long, default_value_t = 0.95)]
        confidence: f64,
        #[arg(long)]
        mix_p: Option<f64>,
    },
    /// Second-moment diagnostic: subset-count moments versus positivity
    Diagnose {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.0)]
        z: f64,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
}

#[derive(Subcommand)]
enum BoundsCmd {
    /// Binary entropy H2(x)
    Entropy {
        #[arg(long)]
        x: f64,
    },
    /// Minimal n for the fixed-target guarantee
    Rfss {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 1.0)]
        c_hyp: f64,
    },
    /// Minimal n for the all-targets guarantee
    Amp {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 1.0)]
        c_amp: f64,
    },
    /// Simplified large-k variant of the all-targets bound
    AmpSimplified {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 1.0)]
        c_amp: f64,
    },
    /// Per-layer replica count (implicit fixed point and explicit seed)
    Replicas {
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        d_in: u64,
        #[arg(long)]
        d_out: u64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        gamma_prime: f64,
        #[arg(long, default_value_t = 1.0)]
        c_amp: f64,
    },
    /// Parameter-count lower bound for the linear family
    Lower {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        epsilon: f64,
    },
    /// Pigeonhole coverage infeasibility test
    Coverage {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        epsilon: f64,
    },
    /// Smallest retained fraction satisfying the subnetwork counting bound
    TicketSize {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        d: u64,
    },
    /// Density-versus-overparameterization curve (CSV)
    Curve {
        #[arg(long)]
        m_target: u64,
        #[arg(long)]
        epsilon: f64,
        /// Linear grid lo:hi:steps
        #[arg(long, default_value = "0.01:0.5:50")]
        gamma_grid: String,
        #[arg(long, default_value_t = 1.0)]
        c_amp: f64,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // worker count never changes results; this only caps parallelism
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .ok();
    }
    match dispatch(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn require_seed(seed: Option<u64>) -> Result<u64> {
    seed.ok_or_else(|| CliError::Usage("this command is stochastic; pass --seed".into()))
}

fn dispatch(mut cli: Cli) -> Result<()> {
    if let Some(path) = &cli.from_manifest {
        if cli.command.is_some() {
            return Err(CliError::Usage(
                "--from-manifest replaces the subcommand".into(),
            ));
        }
        let manifest = load_manifest(path)?;
        rerun(&manifest, OutputWriter::new(&cli.out_dir)?)?;
        return Ok(());
    }
    let Some(command) = cli.command.take() else {
        return Err(CliError::Usage(
            "give a subcommand or --from-manifest (see --help)".into(),
        ));
    };
    match command {
        Cmd::Bounds { sub } => run_bounds(sub, &cli),
        Cmd::Solve { instance, solver } => {
            let body = std::fs::read_to_string(&instance)?;
            let instance: InstanceFile = serde_json::from_str(&body)?;
            let cfg = SolveConfig {
                instance,
                solver,
                seed: cli.seed,
            };
            run_solve(&cfg, OutputWriter::new(&cli.out_dir)?)?;
            Ok(())
        }
        Cmd::Sweep {
            k,
            epsilon,
            n,
            trials,
            mix_p,
        } => {
            let cfg = SweepConfig {
                k,
                epsilon,
                n_values: parse_range(&n)?,
                trials,
                seed: require_seed(cli.seed)?,
                mix_p,
            };
            run_sweep(&cfg, OutputWriter::new(&cli.out_dir)?)?;
            Ok(())
        }
        Cmd::Density {
            n_max,
            resolution,
            domination_grid,
        } => {
            let cfg = DensityConfig {
                n_max,
                resolution,
                domination_grid,
            };
            run_density(&cfg, OutputWriter::new(&cli.out_dir)?)?;
            Ok(())
        }
        Cmd::Prune {
            target,
            target_widths,
            epsilon,
            gamma_prime,
            solver,
            budget,
            retries,
            verify_inputs,
            c_amp,
        } => {
            let seed = require_seed(cli.seed)?;
            let target_file = match (target, target_widths) {
                (Some(path), None) => {
                    let body = std::fs::read_to_string(&path)?;
                    serde_json::from_str::<NetworkFile>(&body)?
                }
                (None, Some(widths)) => {
                    let widths = parse_widths(&widths)?;
                    let target_seed = rfss_core::rng::trial_seed(seed, 0x7A96E7);
                    let net = build_target(&widths, target_seed)?;
                    NetworkFile::from_net(&net, target_seed)
                }
                _ => {
                    return Err(CliError::Usage(
                        "give exactly one of --target or --target-widths".into(),
                    ))
                }
            };
            let cfg = PruneConfig {
                target: target_file,
                epsilon,
                gamma_prime,
                seed,
                solver,
                budget,
                retries,
                verify_inputs,
                c_amp,
            };
            run_prune(&cfg, OutputWriter::new(&cli.out_dir)?)?;
            Ok(())
        }
        Cmd::Calibrate {
            grid,
            trials,
            confidence,
            mix_p,
        } => {
            let cfg = CalibrateConfig {
                grid: parse_grid(&grid)?,
                trials,
                confidence,
                seed: require_seed(cli.seed)?,
                mix_p,
            };
            run_calibrate(&cfg, OutputWriter::new(&cli.out_dir)?)?;
            Ok(())
        }
        Cmd::Diagnose {
            n,
            k,
            epsilon,
            z,
            trials,
        } => {
            let cfg = DiagnoseConfig {
                n,
                k,
                epsilon,
                z,
                trials,
                seed: require_seed(cli.seed)?,
            };
            run_diagnose(&cfg, OutputWriter::new(&cli.out_dir)?)?;
            Ok(())
        }
    }
}

fn run_bounds(sub: BoundsCmd, cli: &Cli) -> Result<()> {
    match sub {
        BoundsCmd::Entropy { x } => {
            println!("{:?}", bounds::binary_entropy(x)?);
        }
        BoundsCmd::Rfss { k, epsilon, c_hyp } => {
            let constants = ConstantsConfig {
                c_hyp,
                ..Default::default()
            };
            println!(
                "{}",
                bounds::rfss_min_n(&BoundInputs::subset(k, epsilon), &constants)?
            );
        }
        BoundsCmd::Amp { k, epsilon, c_amp } => {
            let constants = ConstantsConfig {
                c_amp,
                ..Default::default()
            };
            println!(
                "{}",
                bounds::amp_min_n(&BoundInputs::subset(k, epsilon), &constants)?
            );
        }
        BoundsCmd::AmpSimplified { k, epsilon, c_amp } => {
            let constants = ConstantsConfig {
                c_amp,
                ..Default::default()
            };
            println!(
                "{}",
                bounds::amp_min_n_simplified(&BoundInputs::subset(k, epsilon), &constants)?
            );
        }
        BoundsCmd::Replicas {
            ell,
            d_in,
            d_out,
            epsilon,
            gamma_prime,
            c_amp,
        } => {
            let constants = ConstantsConfig {
                c_amp,
                ..Default::default()
            };
            let inputs = BoundInputs::layer(ell, d_in, d_out, epsilon, gamma_prime);
            let fixed = bounds::replica_count_fixed_point(&inputs, &constants)?;
            let explicit = bounds::replica_count_explicit(&inputs, &constants)?;
            println!(
                "n_star {} (converged in {} iterations; explicit form {})",
                fixed.n_star, fixed.iterations, explicit
            );
        }
        BoundsCmd::Lower { d, k, epsilon } => {
            println!("{}", bounds::lower_bound_min_n(d, k, epsilon)?);
        }
        BoundsCmd::Coverage { n, k, epsilon } => {
            println!("{}", bounds::coverage_infeasible(n, k, epsilon));
        }
        BoundsCmd::TicketSize { m, epsilon, d } => {
            println!("{:?}", bounds::ticket_size_bound(m, epsilon, d)?);
        }
        BoundsCmd::Curve {
            m_target,
            epsilon,
            gamma_grid,
            c_amp,
        } => {
            let cfg = CurveConfig {
                m_target,
                epsilon,
                gamma_grid: parse_float_grid(&gamma_grid)?,
                c_amp,
            };
            run_curve(&cfg, OutputWriter::new(&cli.out_dir)?)?;
            println!("wrote curve.csv to {}", cli.out_dir.display());
        }
    }
    Ok(())
}
