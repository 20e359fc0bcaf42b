//! Command-line front end. Every subcommand is a thin wrapper over the
//! library: parse, load, call, write. Exit codes: 0 on success, 2 when the
//! problem itself is infeasible (no connected draw, no feasible placement),
//! 3 on invalid input or malformed files.

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use uasn::baselines::{lsrnp_run, ra_run};
use uasn::harness::{generate_deployment, run_experiment, Case, Method, Scenario};
use uasn::io;
use uasn::model::{network_lifetime, validate_rate_array, Deployment, EnergyModel, RateArray};
use uasn::orns::{orns_run, DeployOutcome, OrnsSettings};
use uasn::rnmi::{select_relays, SelectionMode, SelectionProblem, SelectionSettings};
use uasn::routing::{build_initial_rate_array, RoutingPolicy};
use uasn::{Error, Result, SimConfig};

#[derive(Parser)]
#[command(name = "uasn", version, about = "Relay planning for underwater acoustic sensor networks")]
struct Cli {
    /// TOML parameter file; built-in defaults apply when omitted.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a random connected deployment and write it as JSON.
    Deploy {
        /// Sensor count.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Residual-energy factor applied to the initially critical node.
        #[arg(long, default_value_t = 1.0)]
        rf: f64,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Also write the initial rate array.
        #[arg(long, value_name = "FILE")]
        rate_out: Option<PathBuf>,
    },
    /// Route all traffic to the buoy and write the rate array as CSV.
    Route {
        #[arg(long, value_name = "FILE")]
        deployment: PathBuf,
        /// min-energy or min-hop.
        #[arg(long, default_value = "min-energy", value_parser = parse_policy)]
        policy: RoutingPolicy,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Place relays for the current bottleneck until the budget runs out.
    Place {
        /// orns, ra or lsrnp.
        #[arg(long, value_parser = parse_place_method)]
        method: Method,
        #[arg(long, value_name = "FILE")]
        deployment: PathBuf,
        #[arg(long, value_name = "FILE")]
        rate: PathBuf,
        /// Maximum relays to deploy.
        #[arg(long)]
        budget: usize,
        /// Anchor-draw seed; only the ra method reads it.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Placement log, one JSON record per iteration.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Deployment with the placed relays appended.
        #[arg(long, value_name = "FILE")]
        deployment_out: Option<PathBuf>,
        /// Rate array after the reroutes.
        #[arg(long, value_name = "FILE")]
        rate_out: Option<PathBuf>,
        /// Positions table for scatter plots.
        #[arg(long, value_name = "FILE")]
        positions_out: Option<PathBuf>,
    },
    /// Drop relays the lifetime floor does not need; write the report.
    Select {
        #[arg(long, value_name = "FILE")]
        deployment: PathBuf,
        #[arg(long, value_name = "FILE")]
        rate: PathBuf,
        /// Lifetime floor in seconds; defaults to the current network
        /// lifetime, i.e. selection may not cost any lifetime at all.
        #[arg(long)]
        tau_star: Option<f64>,
        /// auto, exact or greedy.
        #[arg(long, default_value = "auto", value_parser = parse_mode)]
        mode: SelectionMode,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Rate array with the dropped relays spliced out.
        #[arg(long, value_name = "FILE")]
        rate_out: Option<PathBuf>,
    },
    /// Run a seeded scenario sweep and write reports plus plot tables.
    Experiment {
        /// A, B, C or D.
        #[arg(long, value_parser = parse_case)]
        case: Case,
        /// Sensor count.
        #[arg(long)]
        n: usize,
        /// Number of seeds; they run as 0..K.
        #[arg(long, value_name = "K")]
        seeds: usize,
        /// Restrict to one method (repeatable); all four when omitted.
        #[arg(long = "method", value_parser = parse_method)]
        methods: Vec<Method>,
        /// Deploy the full budget and keep it; skip the pruning step.
        #[arg(long)]
        no_selection: bool,
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
    },
    /// Rebuild the plot-ready CSV tables from experiment reports.
    Metrics {
        /// Report JSON written by `experiment`.
        #[arg(long, value_name = "FILE")]
        report: PathBuf,
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
    },
}

fn parse_case(s: &str) -> std::result::Result<Case, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_place_method(s: &str) -> std::result::Result<Method, String> {
    match parse_method(s)? {
        Method::NoRelay => Err("place needs one of orns, ra, lsrnp".into()),
        m => Ok(m),
    }
}

fn parse_policy(s: &str) -> std::result::Result<RoutingPolicy, String> {
    match s {
        "min-energy" => Ok(RoutingPolicy::MinEnergyPath),
        "min-hop" => Ok(RoutingPolicy::MinHopPath),
        other => Err(format!("unknown policy {other:?}; use min-energy or min-hop")),
    }
}

fn parse_mode(s: &str) -> std::result::Result<SelectionMode, String> {
    match s {
        "auto" => Ok(SelectionMode::Auto),
        "exact" => Ok(SelectionMode::Exact),
        "greedy" => Ok(SelectionMode::Greedy),
        other => Err(format!("unknown mode {other:?}; use auto, exact or greedy")),
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<SimConfig> {
    match path {
        Some(p) => SimConfig::load(p),
        None => Ok(SimConfig::default()),
    }
}

/// Builds the link model, warning once when the carrier sits below the
/// trusted range of the absorption fit.
fn model_from(cfg: &SimConfig) -> Result<EnergyModel> {
    let model = EnergyModel::from_config(cfg)?;
    if !model.frequency_within_thorp_validity() {
        eprintln!(
            "warning: {} kHz is below the {} kHz validity floor of Thorp's fit; \
             absorption numbers are extrapolated",
            model.frequency_khz(),
            uasn::model::THORP_MIN_VALID_KHZ
        );
    }
    Ok(model)
}

fn load_pair(deployment: &Path, rate: &Path) -> Result<(Deployment, RateArray)> {
    let d = io::load_deployment(deployment)?;
    let r = io::load_rate(rate)?;
    if r.len() != d.len() {
        return Err(Error::InvalidRateArray(format!(
            "rate array covers {} nodes but the deployment has {}",
            r.len(),
            d.len()
        )));
    }
    Ok((d, r))
}

fn run(cli: Cli) -> Result<()> {
    let cfg = load_config(&cli.config)?;
    cfg.validate()?;
    match cli.command {
        Command::Deploy {
            n,
            seed,
            rf,
            out,
            rate_out,
        } => {
            let (deployment, rate) = generate_deployment(&cfg, n, rf, seed)?;
            io::save_deployment(&out, &deployment)?;
            if let Some(p) = rate_out {
                io::save_rate(&p, &rate)?;
            }
            let model = model_from(&cfg)?;
            println!(
                "deployed {n} sensors (seed {seed}); initial lifetime {:.3e} s",
                network_lifetime(&rate, &deployment, &model)
            );
        }
        Command::Route {
            deployment,
            policy,
            out,
        } => {
            let d = io::load_deployment(&deployment)?;
            let model = model_from(&cfg)?;
            let rate = build_initial_rate_array(&d, &model, policy)?;
            let violations = validate_rate_array(&rate, &d, &model, cfg.tolerances.balance_abs)?;
            if !violations.is_empty() {
                return Err(Error::InvalidRateArray(format!(
                    "routing produced {} constraint violations",
                    violations.len()
                )));
            }
            io::save_rate(&out, &rate)?;
            println!(
                "routed {} nodes; network lifetime {:.3e} s",
                d.len(),
                network_lifetime(&rate, &d, &model)
            );
        }
        Command::Place {
            method,
            deployment,
            rate,
            budget,
            seed,
            out,
            deployment_out,
            rate_out,
            positions_out,
        } => {
            let (d, r) = load_pair(&deployment, &rate)?;
            let model = model_from(&cfg)?;
            let settings = OrnsSettings::from_config(&cfg);
            let before = network_lifetime(&r, &d, &model);
            let outcome: DeployOutcome = match method {
                Method::Orns => orns_run(&d, &r, &model, budget, &settings)?,
                Method::Ra => ra_run(&d, &r, &model, budget, &settings, seed)?,
                Method::Lsrnp => lsrnp_run(&d, &r, &model, budget, &settings)?,
                Method::NoRelay => unreachable!("rejected at parse time"),
            };
            io::save_placement_log(&out, &outcome.records)?;
            if let Some(p) = deployment_out {
                io::save_deployment(&p, &outcome.deployment)?;
            }
            if let Some(p) = rate_out {
                io::save_rate(&p, &outcome.rate)?;
            }
            if let Some(p) = positions_out {
                io::save_positions_csv(&p, &outcome.deployment)?;
            }
            let placed = outcome.records.iter().filter(|r| !r.skipped).count();
            println!(
                "{method}: placed {placed} of {budget}; lifetime {before:.3e} -> {:.3e} s",
                outcome.network_lifetime
            );
        }
        Command::Select {
            deployment,
            rate,
            tau_star,
            mode,
            out,
            rate_out,
        } => {
            let (d, r) = load_pair(&deployment, &rate)?;
            let model = model_from(&cfg)?;
            let floor = tau_star.unwrap_or_else(|| network_lifetime(&r, &d, &model));
            let eta = (cfg.eta > 0.0).then_some(cfg.eta);
            let problem = SelectionProblem::from_network(&d, &r, &model, floor, cfg.omega1, eta)?;
            let settings = SelectionSettings {
                mode,
                ..SelectionSettings::from_config(&cfg)
            };
            let result = select_relays(&problem, &d, &r, &model, &settings)?;
            io::save_selection_report(&out, &io::SelectionReport::from(&result))?;
            if let Some(p) = rate_out {
                io::save_rate(&p, &result.rate)?;
            }
            println!(
                "kept {} of {} relays; lifetime {:.3e} s against a floor of {:.3e} s{}",
                result.kept.len(),
                result.per_relay.len(),
                result.achieved_lifetime,
                result.tau_star,
                if result.constraint_relaxed {
                    " (floor unreachable, kept everything)"
                } else {
                    ""
                }
            );
        }
        Command::Experiment {
            case,
            n,
            seeds,
            methods,
            no_selection,
            out_dir,
        } => {
            let methods = if methods.is_empty() {
                Method::ALL.to_vec()
            } else {
                methods
            };
            std::fs::create_dir_all(&out_dir)?;
            let seed_list: Vec<u64> = (0..seeds as u64).collect();
            let mut reports = Vec::with_capacity(methods.len());
            for method in methods {
                let scenario = Scenario {
                    case,
                    n,
                    method,
                    selection: !no_selection,
                    seeds: seed_list.clone(),
                };
                let report = run_experiment(&scenario, &cfg)?;
                println!(
                    "case {case} {method} n={n}: mean lifetime {} over {} seeds ({} failed)",
                    report
                        .mean_lifetime_s
                        .map(|v| format!("{v:.3e} s"))
                        .unwrap_or_else(|| "n/a".into()),
                    seeds,
                    report.failed_seeds
                );
                reports.push(report);
            }
            io::save_reports(&out_dir.join("report.json"), &reports)?;
            io::save_lifetime_csv(&out_dir.join("lifetime.csv"), &reports)?;
            io::save_iec_csv(&out_dir.join("iec.csv"), &reports)?;
            println!("wrote report.json, lifetime.csv, iec.csv to {}", out_dir.display());
        }
        Command::Metrics { report, out_dir } => {
            let reports = io::load_reports(&report)?;
            std::fs::create_dir_all(&out_dir)?;
            io::save_lifetime_csv(&out_dir.join("lifetime.csv"), &reports)?;
            io::save_iec_csv(&out_dir.join("iec.csv"), &reports)?;
            println!(
                "wrote lifetime.csv and iec.csv for {} scenario(s) to {}",
                reports.len(),
                out_dir.display()
            );
        }
    }
    Ok(())
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return;
        }
        Err(e) => {
            let _ = e.print();
            std::process::exit(3);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(i32::from(e.exit_code()));
    }
}
