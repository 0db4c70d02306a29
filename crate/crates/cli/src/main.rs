//! `strahler`: exact tables, sampling, enumeration and experiments from the
//! command line.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use strahler_core::exactdist::{self, DEFAULT_PRECISION_BITS};
use strahler_core::mc::{self, ExperimentConfig};
use strahler_core::rng::replicate_rng;
use strahler_core::sampler::{
    sample_conditional, sample_kesten_truncated, sample_unconditional, SampleBudget, DEFAULT_MAX_NODES,
};
use strahler_core::strahler::{strahler_per_node, Statistic, Variant};
use strahler_core::tree::{enumerate_trees, write_enumeration_csv, write_tree, DegreeTree, TreeFormat};
use strahler_core::{DistSpec, Error, OffspringDistribution, Result};

#[derive(Parser)]
#[command(name = "strahler", version, about = "Horton-Strahler numbers of Galton-Watson trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact tail table of hs, rigid or kary:K for the unconditional tree
    Exact(ExactArgs),
    /// Sample trees and print their statistics, one row per tree
    Sample(SampleArgs),
    /// Exact law of a statistic on trees with exactly N nodes
    Enumerate(EnumerateArgs),
    /// Run a Monte Carlo experiment described by a TOML or JSON file
    Experiment(ExperimentArgs),
    /// Print mean, variance, period, d and gamma of a distribution
    Constants(ConstantsArgs),
}

#[derive(Args)]
struct ExactArgs {
    /// Builtin name (catalan, full-binary, geometric-half, poisson1, binomial:K) or pmf:P0,P1,...
    #[arg(long)]
    dist: String,
    /// hs, rigid or kary:K (K >= 3)
    #[arg(long)]
    stat: String,
    /// Largest value tabulated
    #[arg(long, default_value_t = 40)]
    xmax: usize,
    /// Mantissa precision in bits
    #[arg(long, default_value_t = DEFAULT_PRECISION_BITS)]
    bits: usize,
    /// Output CSV path, `-` for stdout; a file also gets a .json metadata sidecar
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplerArg {
    Conditional,
    Unconditional,
    Kesten,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Binary,
}

#[derive(Args)]
struct SampleArgs {
    /// Builtin name or pmf:P0,P1,...
    #[arg(long)]
    dist: String,
    /// Tree size (conditional sampler)
    #[arg(long)]
    n: Option<u64>,
    /// Spine length (kesten sampler)
    #[arg(long)]
    ell: Option<usize>,
    /// Tree law: conditioned on --n nodes, unconditional, or Kesten tree cut at --ell
    #[arg(long, value_enum, default_value = "conditional")]
    sampler: SamplerArg,
    /// Number of trees
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Master seed; tree i draws from its own derived stream
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated statistics: hs, french, canadian, rigid, kary:K, hsstar
    #[arg(long, default_value = "hs")]
    stats: String,
    /// Node cap per tree
    #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
    max_nodes: u64,
    /// Output CSV path, `-` for stdout
    #[arg(long, default_value = "-")]
    out: String,
    /// Also write the sampled degree sequences here
    #[arg(long)]
    trees: Option<PathBuf>,
    /// Framing of the --trees file
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Write per-node values of this variant (hs, french, canadian, rigid)
    #[arg(long, requires = "per_node_out")]
    per_node: Option<String>,
    /// Destination of the per-node CSV
    #[arg(long, requires = "per_node")]
    per_node_out: Option<PathBuf>,
}

#[derive(Args)]
struct EnumerateArgs {
    /// Builtin name or pmf:P0,P1,...
    #[arg(long)]
    dist: String,
    /// Tree size (at most 16)
    #[arg(long)]
    n: usize,
    /// Statistic to tabulate
    #[arg(long, default_value = "hs")]
    stat: String,
    /// Also list every tree with its log-probability to this file
    #[arg(long)]
    trees: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment file (.toml or .json)
    #[arg(long)]
    config: PathBuf,
    /// Worker threads (default: all cores); STRAHLER_THREADS takes precedence
    #[arg(long)]
    threads: Option<usize>,
    /// Output CSV path, overriding the config; `-` for stdout
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct ConstantsArgs {
    /// Builtin name or pmf:P0,P1,...
    #[arg(long)]
    dist: String,
}

fn dist_from(text: &str) -> Result<OffspringDistribution> {
    text.parse::<DistSpec>()?.build()
}

/// Opens `-` as stdout, anything else as a file.
fn open_out(path: &str) -> Result<Box<dyn Write>> {
    Ok(if path == "-" {
        Box::new(BufWriter::new(io::stdout().lock()))
    } else {
        Box::new(BufWriter::new(File::create(path)?))
    })
}

fn exact(args: ExactArgs) -> Result<()> {
    let dist = dist_from(&args.dist)?;
    let stat: Statistic = args.stat.parse()?;
    let table = exactdist::tail_table(&dist, stat, args.xmax, args.bits)?;
    let mut out = open_out(&args.out)?;
    table.write_csv(&mut out)?;
    out.flush()?;
    if args.out != "-" {
        let sidecar = mc::sidecar_path(Path::new(&args.out));
        std::fs::write(sidecar, serde_json::to_string_pretty(&table.metadata_json())?)?;
    }
    Ok(())
}

fn sample(args: SampleArgs) -> Result<()> {
    let dist = dist_from(&args.dist)?;
    let stats: Vec<Statistic> = args.stats.split(',').map(str::parse).collect::<Result<_>>()?;
    let per_node: Option<Variant> = args.per_node.as_deref().map(str::parse).transpose()?;
    let budget = SampleBudget { max_nodes: args.max_nodes, max_rejections: None };
    let missing = |flag: &str| Error::InvalidConfig(format!("this sampler needs --{flag}"));

    let mut out = open_out(&args.out)?;
    let mut trees_out = match &args.trees {
        Some(p) => Some(BufWriter::new(File::create(p)?)),
        None => None,
    };
    let mut per_node_out = match &args.per_node_out {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            writeln!(w, "tree,preorder_index,value")?;
            Some(w)
        }
        None => None,
    };
    let format = match args.format {
        FormatArg::Csv => TreeFormat::Csv,
        FormatArg::Binary => TreeFormat::Binary,
    };

    let names: Vec<String> = stats.iter().map(Statistic::to_string).collect();
    writeln!(out, "tree,n,{}", names.join(","))?;
    for i in 0..args.count {
        let mut rng = replicate_rng(args.seed, 0, i as u64);
        let tree: DegreeTree = match args.sampler {
            SamplerArg::Conditional => {
                sample_conditional(&dist, args.n.ok_or_else(|| missing("n"))?, &mut rng, &budget)?
            }
            SamplerArg::Unconditional => sample_unconditional(&dist, &mut rng, &budget)?,
            SamplerArg::Kesten => {
                sample_kesten_truncated(&dist, args.ell.ok_or_else(|| missing("ell"))?, &mut rng, &budget)?
                    .tree
            }
        };
        let values: Vec<String> =
            stats.iter().map(|s| s.evaluate(&tree).map(|v| v.to_string())).collect::<Result<_>>()?;
        writeln!(out, "{i},{},{}", tree.len(), values.join(","))?;
        if let Some(w) = trees_out.as_mut() {
            write_tree(w, &tree, format)?;
        }
        if let (Some(variant), Some(w)) = (per_node, per_node_out.as_mut()) {
            for (j, v) in strahler_per_node(&tree, variant).iter().enumerate() {
                writeln!(w, "{i},{j},{v}")?;
            }
        }
    }
    out.flush()?;
    if let Some(mut w) = trees_out {
        w.flush()?;
    }
    if let Some(mut w) = per_node_out {
        w.flush()?;
    }
    Ok(())
}

fn enumerate(args: EnumerateArgs) -> Result<()> {
    let dist = dist_from(&args.dist)?;
    let stat: Statistic = args.stat.parse()?;
    let pmf = exactdist::conditional_bruteforce(&dist, args.n, stat)?;
    let mut out = open_out("-")?;
    writeln!(out, "value,probability")?;
    for (v, p) in pmf {
        writeln!(out, "{v},{p}")?;
    }
    out.flush()?;
    if let Some(path) = args.trees {
        write_enumeration_csv(BufWriter::new(File::create(path)?), enumerate_trees(&dist, args.n)?)?;
    }
    Ok(())
}

fn experiment(args: ExperimentArgs) -> Result<()> {
    let config = ExperimentConfig::from_path(&args.config)?;
    let threads = match std::env::var("STRAHLER_THREADS") {
        Ok(v) => Some(v.trim().parse().map_err(|_| Error::InvalidConfig(format!("STRAHLER_THREADS=`{v}`")))?),
        Err(_) => args.threads,
    };
    let result = mc::run_experiment(&config, threads)?;
    let target = args.out.or_else(|| config.output.as_ref().map(|p| p.display().to_string()));
    match target.as_deref() {
        None | Some("-") => {
            let mut out = open_out("-")?;
            result.write_csv(&mut out)?;
            out.flush()?;
        }
        Some(path) => {
            result.write_files(Path::new(path))?;
        }
    }
    Ok(())
}

fn constants(args: ConstantsArgs) -> Result<()> {
    let dist = dist_from(&args.dist)?;
    let rigid = exactdist::rigid_constants(&dist).ok();
    let opt = |v: Option<String>| v.unwrap_or_default();
    let mut out = open_out("-")?;
    writeln!(out, "mean,variance,period,d,gamma")?;
    writeln!(
        out,
        "{},{},{},{},{}",
        dist.mean(),
        dist.variance(),
        dist.period(),
        opt(rigid.map(|r| r.d.to_string())),
        opt(rigid.and_then(|r| r.gamma).map(|g| g.to_string()))
    )?;
    out.flush()?;
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        e if e.is_runtime_budget() => 3,
        Error::Io(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Exact(a) => exact(a),
        Command::Sample(a) => sample(a),
        Command::Enumerate(a) => enumerate(a),
        Command::Experiment(a) => experiment(a),
        Command::Constants(a) => constants(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
