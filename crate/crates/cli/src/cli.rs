//! The `bmgame` command line.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use bmgame_core::dynamics::{run_dynamics, CycleCheck, Policy, ScanOrder, Termination};
use bmgame_core::model::{baker_deviation, coverage, is_nash_equilibrium, miller_deviation, welfare};
use bmgame_core::oracle::{self, DEFAULT_BUDGET};
use bmgame_core::solver::compute_equilibrium;
use bmgame_core::{Agent, Deviation, Instance, StrategyProfile};
use clap::{Parser, Subcommand, ValueEnum};

use crate::generate::{generate, GenerateArgs, FAMILIES};
use crate::io::{self, ParsedInstance};

pub const BUDGET_VAR: &str = "ORACLE_BUDGET";

#[derive(Debug, Parser)]
#[command(name = "bmgame", version, about = "Equilibria of the Bakers and Millers Game")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a pure Nash equilibrium.
    Solve {
        instance: PathBuf,
        /// Also write the profile to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the equilibrium conditions of a profile.
    Verify { instance: PathBuf, profile: PathBuf },
    /// Enumerate all equilibria and the optimum (budget: ORACLE_BUDGET).
    Oracle { instance: PathBuf },
    /// Run improving-move dynamics.
    Dynamics {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = PolicyArg::First, conflicts_with = "script")]
        policy: PolicyArg,
        /// Scripted moves instead of a policy.
        #[arg(long)]
        script: Option<PathBuf>,
        /// Maximum number of moves.
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        /// Start profile (default: each baker on her first location, millers on the first location).
        #[arg(long)]
        profile: Option<PathBuf>,
        /// How revisited states are recognized.
        #[arg(long, value_enum, default_value_t = CycleArg::Relabel)]
        cycle: CycleArg,
        /// Write one line per move: kind id from to u_before u_after.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Print a generated instance.
    #[command(after_help = format!("families: {FAMILIES}"))]
    Generate {
        family: String,
        params: Vec<usize>,
        /// Sets for the coverage reductions, e.g. "1 2; 2 3; 3".
        #[arg(long)]
        sets: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        bakers: Option<usize>,
        #[arg(long)]
        locations: Option<usize>,
        #[arg(long)]
        millers: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write instance.toml, one <name>.profile.toml per named profile and
        /// script.toml (if any) here instead of printing the instance.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Coverage and utility sums of a profile.
    Welfare { instance: PathBuf, profile: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    /// First improving move, bakers scanned before millers.
    First,
    /// First improving move, millers scanned before bakers.
    FirstMillers,
    /// Largest utility gain.
    Best,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CycleArg {
    Exact,
    Relabel,
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_instance(path: &Path) -> anyhow::Result<ParsedInstance> {
    io::parse_instance(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_unweighted(path: &Path, command: &str) -> anyhow::Result<Instance> {
    match load_instance(path)? {
        ParsedInstance::Unweighted(instance) => Ok(instance),
        ParsedInstance::Weighted(_) => bail!("{command} does not support weighted instances"),
    }
}

fn load_profile(path: &Path, instance: &Instance) -> anyhow::Result<StrategyProfile> {
    io::parse_profile(&read(path)?, instance).with_context(|| format!("parsing {}", path.display()))
}

fn names(instance: &Instance, locations: &[usize]) -> String {
    locations.iter().map(|&l| instance.location_name(l)).collect::<Vec<_>>().join(" ")
}

fn describe(instance: &Instance, profile: &StrategyProfile) -> String {
    format!("bakers {} | millers {}", names(instance, &profile.bakers), names(instance, &profile.millers))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn describe_deviation(instance: &Instance, d: &Deviation) -> String {
    let agent = match d.agent {
        Agent::Baker(b) => format!("baker {b}"),
        Agent::Miller(m) => format!("miller {m}"),
    };
    format!(
        "{agent} {} -> {}: {} -> {}",
        instance.location_name(d.from),
        instance.location_name(d.to),
        d.before,
        d.after
    )
}

pub fn oracle_budget() -> anyhow::Result<u128> {
    match std::env::var(BUDGET_VAR) {
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_BUDGET),
        Err(e) => bail!("{BUDGET_VAR}: {e}"),
        Ok(v) => match v.trim().parse::<u128>() {
            Ok(n) if n > 0 => Ok(n),
            _ => bail!("{BUDGET_VAR} must be a positive integer, got {v:?}"),
        },
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> anyhow::Result<()> {
    match cli.command {
        Command::Solve { instance, out: profile_out } => {
            let instance = load_unweighted(&instance, "solve")?;
            let report = compute_equilibrium(&instance);
            writeln!(out, "greedy order: {}", names(&instance, &report.order.locations))?;
            let counts: Vec<String> = report.order.counts.iter().map(ToString::to_string).collect();
            writeln!(out, "bakers in range: {}", counts.join(" "))?;
            writeln!(out, "concentrated bakers: {}", names(&instance, &report.concentrated))?;
            writeln!(out, "potential before rebalance: {}", report.potential_before)?;
            writeln!(out, "potential after rebalance: {}", report.potential_after)?;
            writeln!(out, "bakers: {}", names(&instance, &report.profile.bakers))?;
            writeln!(out, "millers: {}", names(&instance, &report.profile.millers))?;
            writeln!(out, "coverage: {}", report.coverage)?;
            writeln!(out, "nash equilibrium: {}", yes_no(is_nash_equilibrium(&instance, &report.profile)))?;
            if let Some(path) = profile_out {
                std::fs::write(&path, io::serialize_profile(&instance, &report.profile))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Verify { instance, profile } => {
            let instance = load_unweighted(&instance, "verify")?;
            let profile = load_profile(&profile, &instance)?;
            let baker = baker_deviation(&instance, &profile);
            let miller = miller_deviation(&instance, &profile);
            for (side, dev) in [("baker", &baker), ("miller", &miller)] {
                writeln!(out, "{side} equilibrium: {}", yes_no(dev.is_none()))?;
                if let Some(d) = dev {
                    writeln!(out, "  witness: {}", describe_deviation(&instance, d))?;
                }
            }
            writeln!(out, "nash equilibrium: {}", yes_no(baker.is_none() && miller.is_none()))?;
        }
        Command::Oracle { instance } => {
            let instance = load_unweighted(&instance, "oracle")?;
            let report = oracle::report(&instance, oracle_budget()?)?;
            writeln!(out, "digest: {:016x}", report.digest)?;
            writeln!(out, "profiles examined: {}", report.profiles_examined)?;
            writeln!(out, "equilibria: {}", report.equilibria.len())?;
            for ne in &report.equilibria {
                writeln!(out, "  {} | coverage {}", describe(&instance, ne), coverage(&instance, ne))?;
            }
            for (label, w) in [
                ("optimum", &report.optimum),
                ("best equilibrium", &report.best_equilibrium),
                ("worst equilibrium", &report.worst_equilibrium),
            ] {
                writeln!(out, "{label}: {} ({})", w.coverage, describe(&instance, &w.profile))?;
            }
            writeln!(out, "price of anarchy: {}", report.price_of_anarchy)?;
            writeln!(out, "price of stability: {}", report.price_of_stability)?;
        }
        Command::Dynamics { instance, policy, script, budget, profile, cycle, trace } => {
            let weighted = load_instance(&instance)?.to_weighted();
            let inst = weighted.instance();
            let start = match profile {
                Some(p) => load_profile(&p, inst)?,
                None => StrategyProfile::new(
                    (0..inst.num_bakers()).map(|b| inst.range(b)[0]).collect(),
                    vec![0; inst.num_millers()],
                ),
            };
            let policy = match script {
                Some(path) => Policy::Scripted(
                    io::parse_script(&read(&path)?, inst).with_context(|| format!("parsing {}", path.display()))?,
                ),
                None => match policy {
                    PolicyArg::First => Policy::FirstImproving(ScanOrder::BakersFirst),
                    PolicyArg::FirstMillers => Policy::FirstImproving(ScanOrder::MillersFirst),
                    PolicyArg::Best => Policy::BestImproving,
                },
            };
            let check = match cycle {
                CycleArg::Exact => CycleCheck::Exact,
                CycleArg::Relabel => CycleCheck::UpToRelabeling,
            };
            let result = run_dynamics(&weighted, &start, &policy, budget, check)?;
            let lines = io::format_trace(inst, &result);
            write!(out, "{lines}")?;
            if let Some(path) = trace {
                std::fs::write(&path, &lines).with_context(|| format!("writing {}", path.display()))?;
            }
            writeln!(out, "moves: {}", result.moves.len())?;
            let status = match &result.status {
                Termination::Converged => "converged".to_string(),
                Termination::BudgetExhausted => "budget exhausted".to_string(),
                Termination::ScriptEnded => "script ended".to_string(),
                Termination::Cycle { revisit, relabeling: None } => {
                    format!("cycle: revisits the state after {revisit} moves")
                }
                Termination::Cycle { revisit, relabeling: Some(p) } => {
                    let map: Vec<String> = (0..p.len())
                        .map(|l| format!("{}->{}", inst.location_name(l), inst.location_name(p[l])))
                        .collect();
                    format!("cycle: revisits the state after {revisit} moves up to relabeling {}", map.join(" "))
                }
            };
            writeln!(out, "status: {status}")?;
            writeln!(out, "final: {}", describe(inst, &result.terminal))?;
        }
        Command::Generate { family, params, sets, k, bakers, locations, millers, seed, out_dir } => {
            let args = GenerateArgs { params, sets, k, bakers, locations, millers, seed };
            let generated = generate(&family, &args)?;
            let text = io::serialize_instance(&generated.instance);
            match out_dir {
                None => write!(out, "{text}")?,
                Some(dir) => {
                    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
                    let inst = generated.instance.instance();
                    let mut files = vec![("instance.toml".to_string(), text)];
                    for (name, profile) in &generated.profiles {
                        files.push((format!("{name}.profile.toml"), io::serialize_profile(inst, profile)));
                    }
                    if let Some(script) = &generated.script {
                        files.push(("script.toml".into(), io::serialize_script(inst, script)));
                    }
                    for (name, body) in files {
                        let path = dir.join(&name);
                        std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
                        writeln!(out, "{}", path.display())?;
                    }
                }
            }
        }
        Command::Welfare { instance, profile } => {
            let instance = load_unweighted(&instance, "welfare")?;
            let profile = load_profile(&profile, &instance)?;
            let w = welfare(&instance, &profile);
            writeln!(out, "coverage: {}", w.coverage)?;
            writeln!(out, "baker utility sum: {}", w.bakers)?;
            writeln!(out, "miller utility sum: {}", w.millers)?;
            writeln!(out, "total: {}", w.total())?;
        }
    }
    Ok(())
}
