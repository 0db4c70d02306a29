//! Monte Carlo experiments: many independent trees per size, one statistic,
//! summary rows.
//!
//! Each replicate owns a generator seeded from `(master_seed, size_index,
//! replicate_index)`, and results are stored by replicate index, so output is
//! identical for any number of worker threads.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::offspring::{DistSpec, OffspringDistribution};
use crate::rng::replicate_rng;
use crate::sampler::{
    sample_conditional_counted, sample_kesten_truncated, sample_unconditional, SampleBudget,
    DEFAULT_MAX_NODES,
};
use crate::strahler::{rotational_max, strahler_number, Statistic, Variant, MAX_ROTATIONAL_SIZE};

/// Fraction of capped replicates above which a run is abandoned.
pub const MAX_FAILURE_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    /// Trees conditioned on `n` nodes.
    #[default]
    Conditional,
    /// Unconditional trees; the row size is the node cap.
    Unconditional,
    /// Truncated Kesten trees; the row size is the spine length `ℓ`.
    Kesten,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    #[default]
    Log2n,
    Log2log2n,
    None,
}

impl Normalization {
    fn divisor(self, n: u64) -> f64 {
        match self {
            Normalization::Log2n => (n as f64).log2(),
            Normalization::Log2log2n => (n as f64).log2().log2(),
            Normalization::None => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dist: DistSpec,
    pub statistic: Statistic,
    #[serde(default)]
    pub sampler: SamplerKind,
    pub sizes: Vec<u64>,
    pub replicates: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub normalization: Normalization,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_nodes: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_rejections: Option<u64>,
    /// Also evaluate HS* on every replicate and check `HS ≤ HS*`.
    #[serde(default)]
    pub verify_hs_star: bool,
}

impl ExperimentConfig {
    /// Reads TOML or JSON, chosen by extension (TOML unless `.json`).
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    fn budget(&self) -> SampleBudget {
        SampleBudget {
            max_nodes: self.max_nodes.unwrap_or(DEFAULT_MAX_NODES),
            max_rejections: self.max_rejections,
        }
    }

    /// Checks the config and builds the offspring law.
    pub fn validate(&self) -> Result<OffspringDistribution> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.replicates == 0 {
            return bad("replicates must be at least 1".into());
        }
        if self.sizes.is_empty() {
            return bad("sizes must not be empty".into());
        }
        if self.max_nodes == Some(0) || self.max_rejections == Some(0) {
            return bad("budget caps must be positive".into());
        }
        let dist = self.dist.build()?;
        dist.require_critical()?;
        let min_size = match self.normalization {
            Normalization::Log2n => 2,
            Normalization::Log2log2n => 3,
            Normalization::None => 0,
        };
        for &n in &self.sizes {
            if n < min_size {
                return bad(format!("size {n} is too small for {:?} normalization", self.normalization));
            }
            match self.sampler {
                SamplerKind::Conditional if !dist.is_feasible_size(n) => {
                    return Err(Error::InfeasibleSize { n });
                }
                SamplerKind::Unconditional if n == 0 => return bad("node cap must be positive".into()),
                _ => {}
            }
        }
        if self.verify_hs_star || self.statistic == Statistic::HsStar {
            if self.sampler != SamplerKind::Conditional {
                return bad("HS* needs the conditional sampler".into());
            }
            if let Some(&n) = self.sizes.iter().find(|&&n| n > MAX_ROTATIONAL_SIZE as u64) {
                return Err(Error::TooLarge { n: n as usize, max: MAX_ROTATIONAL_SIZE });
            }
        }
        Ok(dist)
    }
}

/// Summary of one sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Unbiased sample variance (0 for a single sample).
    pub variance: f64,
    pub stderr: f64,
    pub min: f64,
    pub max: f64,
    pub q05: f64,
    pub q50: f64,
    pub q95: f64,
}

/// Mean, unbiased variance, standard error and nearest-rank quantiles.
pub fn summarize(samples: &[f64]) -> Result<Summary> {
    let n = samples.len();
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let variance = if n > 1 {
        samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = |p: f64| sorted[((p * n as f64).ceil() as usize).clamp(1, n) - 1];
    Ok(Summary {
        count: n,
        mean,
        variance,
        stderr: (variance / n as f64).sqrt(),
        min: sorted[0],
        max: sorted[n - 1],
        q05: rank(0.05),
        q50: rank(0.50),
        q95: rank(0.95),
    })
}

/// One output row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeResult {
    pub n: u64,
    pub summary: Summary,
    pub normalized_mean: f64,
    pub failures: usize,
    /// Conditional sampler only: accepted blocks over blocks drawn.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub acceptance_rate: Option<f64>,
    /// Replicates where `HS > HS*` (always 0 unless the bound is violated).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hs_star_violations: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub version: &'static str,
    pub rows: Vec<SizeResult>,
}

struct Replicate {
    value: u32,
    attempts: u64,
    hs_star_violation: bool,
}

fn run_replicate(
    config: &ExperimentConfig,
    dist: &OffspringDistribution,
    budget: &SampleBudget,
    size_index: usize,
    replicate_index: usize,
) -> Result<Replicate> {
    let n = config.sizes[size_index];
    let mut rng = replicate_rng(config.master_seed, size_index as u64, replicate_index as u64);
    let (tree, attempts) = match config.sampler {
        SamplerKind::Conditional => sample_conditional_counted(dist, n, &mut rng, budget)?,
        SamplerKind::Unconditional => {
            let capped = SampleBudget { max_nodes: n.min(budget.max_nodes), ..*budget };
            (sample_unconditional(dist, &mut rng, &capped)?, 1)
        }
        SamplerKind::Kesten => (sample_kesten_truncated(dist, n as usize, &mut rng, budget)?.tree, 1),
    };
    let value = config.statistic.evaluate(&tree)?;
    let hs_star_violation =
        config.verify_hs_star && strahler_number(&tree, Variant::Hs) > rotational_max(tree.degrees())?;
    Ok(Replicate { value, attempts, hs_star_violation })
}

/// Runs every size of the experiment on a pool of `threads` workers
/// (`None`: all cores).
pub fn run_experiment(config: &ExperimentConfig, threads: Option<usize>) -> Result<ExperimentResult> {
    let dist = config.validate()?;
    let budget = config.budget();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t.max(1));
    }
    let pool = builder.build().map_err(|e| Error::InvalidConfig(e.to_string()))?;

    let mut rows = Vec::with_capacity(config.sizes.len());
    for (size_index, &n) in config.sizes.iter().enumerate() {
        let outcomes: Vec<Result<Replicate>> = pool.install(|| {
            (0..config.replicates)
                .into_par_iter()
                .map(|r| run_replicate(config, &dist, &budget, size_index, r))
                .collect()
        });

        let mut values = Vec::with_capacity(config.replicates);
        let mut attempts = 0u64;
        let mut violations = 0;
        let mut failures = Vec::new();
        for (r, outcome) in outcomes.into_iter().enumerate() {
            match outcome {
                Ok(rep) => {
                    values.push(rep.value as f64);
                    attempts += rep.attempts;
                    violations += rep.hs_star_violation as usize;
                }
                Err(e) if e.is_runtime_budget() => failures.push((r, e)),
                Err(e) => return Err(Error::Replicate { n, replicate: r, source: Box::new(e) }),
            }
        }
        if failures.len() as f64 > MAX_FAILURE_FRACTION * config.replicates as f64 || values.is_empty() {
            let (r, e) = failures.swap_remove(0);
            return Err(Error::Replicate { n, replicate: r, source: Box::new(e) });
        }
        let summary = summarize(&values)?;
        let conditional = config.sampler == SamplerKind::Conditional;
        rows.push(SizeResult {
            n,
            normalized_mean: summary.mean / config.normalization.divisor(n),
            summary,
            failures: failures.len(),
            acceptance_rate: conditional.then(|| values.len() as f64 / attempts as f64),
            hs_star_violations: config.verify_hs_star.then_some(violations),
        });
    }
    Ok(ExperimentResult { config: config.clone(), version: env!("CARGO_PKG_VERSION"), rows })
}

impl ExperimentResult {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "n,stat,mean,stderr,q05,q50,q95,normalized_mean,replicates,failures")?;
        for row in &self.rows {
            let s = &row.summary;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                row.n,
                self.config.statistic,
                s.mean,
                s.stderr,
                s.q05,
                s.q50,
                s.q95,
                row.normalized_mean,
                s.count,
                row.failures
            )?;
        }
        Ok(())
    }

    pub fn metadata_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("result serializes")
    }

    /// Writes the CSV to `path` and the JSON sidecar next to it.
    pub fn write_files(&self, path: &Path) -> Result<PathBuf> {
        let mut csv = Vec::new();
        self.write_csv(&mut csv)?;
        fs::write(path, csv)?;
        let sidecar = sidecar_path(path);
        fs::write(&sidecar, serde_json::to_string_pretty(&self.metadata_json())?)?;
        Ok(sidecar)
    }
}

/// `results.csv` → `results.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}
