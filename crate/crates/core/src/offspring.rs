//! Offspring distributions of a Galton-Watson process.

use std::fmt;
use std::str::FromStr;

use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mass below which the tail of a parametric law is cut off.
pub const TRUNCATION_TAIL: f64 = 1e-15;
/// Tolerance for the criticality flag.
pub const CRITICAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistKind {
    Finite,
    Catalan,
    FullBinary,
    GeometricHalf,
    Poisson1,
    Binomial(u32),
}

/// Precomputed Walker/Vose alias table over `0..len`.
///
/// A draw consumes exactly one `u64`: the high part of `u * len` selects the
/// column and the low part is compared against a 64-bit threshold.
#[derive(Debug, Clone)]
pub struct AliasTable {
    threshold: Vec<u64>,
    alias: Vec<u32>,
}

impl AliasTable {
    pub fn new(weights: &[f64]) -> Self {
        let len = weights.len();
        assert!(len > 0 && len <= u32::MAX as usize);
        let total: f64 = weights.iter().sum();
        let mut scaled: Vec<f64> = weights.iter().map(|w| w / total * len as f64).collect();
        let mut threshold = vec![u64::MAX; len];
        let mut alias: Vec<u32> = (0..len as u32).collect();
        let mut small: Vec<usize> = Vec::new();
        let mut large: Vec<usize> = Vec::new();
        for (i, &s) in scaled.iter().enumerate() {
            if s < 1.0 {
                small.push(i);
            } else {
                large.push(i);
            }
        }
        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            threshold[s] = to_threshold(scaled[s]);
            alias[s] = l as u32;
            scaled[l] -= 1.0 - scaled[s];
            if scaled[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        // Leftovers are full columns up to rounding.
        for i in small.into_iter().chain(large) {
            threshold[i] = u64::MAX;
            alias[i] = i as u32;
        }
        AliasTable { threshold, alias }
    }

    #[inline]
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> u32 {
        let wide = rng.next_u64() as u128 * self.threshold.len() as u128;
        let col = (wide >> 64) as usize;
        let frac = wide as u64;
        if frac < self.threshold[col] {
            col as u32
        } else {
            self.alias[col]
        }
    }

    pub fn len(&self) -> usize {
        self.threshold.len()
    }

    pub fn is_empty(&self) -> bool {
        self.threshold.is_empty()
    }
}

fn to_threshold(p: f64) -> u64 {
    if p <= 0.0 {
        0
    } else if p >= 1.0 {
        u64::MAX
    } else {
        (p * 18_446_744_073_709_551_616.0) as u64
    }
}

/// Anything that can draw a number of children.
pub trait DegreeSampler {
    fn sample_degree<R: RngCore + ?Sized>(&self, rng: &mut R) -> u32;
}

/// Law of the offspring count, stored as a finite pmf `p_0..p_max`.
#[derive(Debug, Clone)]
pub struct OffspringDistribution {
    pmf: Vec<f64>,
    kind: DistKind,
    mean: f64,
    variance: f64,
    period: u32,
    d: Option<u32>,
    truncation_mass: f64,
    alias: AliasTable,
}

impl OffspringDistribution {
    /// Validates and normalizes an arbitrary finite pmf.
    pub fn new_finite(pmf: &[f64]) -> Result<Self> {
        Self::build(pmf, DistKind::Finite, 0.0)
    }

    fn build(raw: &[f64], kind: DistKind, truncation_mass: f64) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::NotAProbability("empty pmf".into()));
        }
        if let Some(bad) = raw.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::NotAProbability(format!("entry {bad} is not a nonnegative real")));
        }
        let total: f64 = raw.iter().sum();
        if total <= 0.0 {
            return Err(Error::NotAProbability("total mass is zero".into()));
        }
        let mut pmf: Vec<f64> = raw.iter().map(|p| p / total).collect();
        while pmf.len() > 1 && *pmf.last().unwrap() == 0.0 {
            pmf.pop();
        }
        let mean: f64 = pmf.iter().enumerate().map(|(i, p)| i as f64 * p).sum();
        let variance: f64 = pmf.iter().enumerate().map(|(i, p)| (i as f64 - mean).powi(2) * p).sum();
        // A point mass at 0 is allowed: it is the trivial (subcritical) law.
        if variance <= 0.0 && pmf.len() > 1 {
            return Err(Error::DegenerateVariance);
        }
        let period = pmf
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, p)| **p > 0.0)
            .fold(0u32, |g, (i, _)| gcd(g, i as u32))
            .max(1);
        let d = pmf.iter().enumerate().skip(2).find(|(_, p)| **p > 0.0).map(|(i, _)| i as u32);
        let alias = AliasTable::new(&pmf);
        Ok(OffspringDistribution { pmf, kind, mean, variance, period, d, truncation_mass, alias })
    }

    /// Built-in critical laws. `param` is only used by `binomial`.
    pub fn builtin(name: &str, param: Option<u32>) -> Result<Self> {
        match name {
            "catalan" => Self::build(&[0.25, 0.5, 0.25], DistKind::Catalan, 0.0),
            "full-binary" => Self::build(&[0.5, 0.0, 0.5], DistKind::FullBinary, 0.0),
            "geometric-half" => {
                let (pmf, cut) = truncate_tail(|i, prev| if i == 0 { 0.5 } else { prev * 0.5 });
                Self::build(&pmf, DistKind::GeometricHalf, cut)
            }
            "poisson1" => {
                let e_inv = (-1.0f64).exp();
                let (pmf, cut) = truncate_tail(|i, prev| if i == 0 { e_inv } else { prev / i as f64 });
                Self::build(&pmf, DistKind::Poisson1, cut)
            }
            "binomial" => {
                let k = param.ok_or_else(|| Error::BadParam("binomial needs k".into()))?;
                if k < 2 {
                    return Err(Error::BadParam(format!("binomial k must be >= 2, got {k}")));
                }
                let p = 1.0 / k as f64;
                let pmf: Vec<f64> = (0..=k)
                    .map(|i| binomial(k, i) * p.powi(i as i32) * (1.0 - p).powi((k - i) as i32))
                    .collect();
                Self::build(&pmf, DistKind::Binomial(k), 0.0)
            }
            other => Err(Error::UnknownName(other.to_string())),
        }
    }

    /// Law of the offspring count with single children removed (`p_1 = 0`,
    /// other masses rescaled by `1/(1 - p_1)`).
    pub fn remove_single_child(&self) -> Result<Self> {
        let p1 = self.p(1);
        if p1 >= 1.0 {
            return Err(Error::DegenerateVariance);
        }
        if p1 == 0.0 {
            return Ok(self.clone());
        }
        let pmf: Vec<f64> =
            self.pmf.iter().enumerate().map(|(i, &p)| if i == 1 { 0.0 } else { p / (1.0 - p1) }).collect();
        Self::build(&pmf, DistKind::Finite, self.truncation_mass)
    }

    /// Size-biased law `P{ζ = i} = i p_i`, the spine law of the Kesten tree.
    pub fn size_biased(&self) -> Result<SizeBiasedDistribution> {
        self.require_critical()?;
        let pmf: Vec<f64> = self.pmf.iter().enumerate().map(|(i, p)| i as f64 * p / self.mean).collect();
        let alias = AliasTable::new(&pmf);
        Ok(SizeBiasedDistribution { pmf, alias })
    }

    /// `f(s)`, `f'(s)` or `f''(s)` for the generating function `f(s) = Σ p_i s^i`.
    pub fn pgf_eval(&self, s: f64, order: u32) -> f64 {
        let mut acc = 0.0;
        for (i, &p) in self.pmf.iter().enumerate().rev() {
            let i = i as u32;
            if i < order {
                continue;
            }
            let falling: f64 = (0..order).map(|j| (i - j) as f64).product();
            acc += p * falling * s.powi((i - order) as i32);
        }
        acc
    }

    /// Descending moment `E{ξ(ξ-1)...(ξ-r+1)}`.
    pub fn factorial_moment(&self, r: u32) -> f64 {
        self.pgf_eval(1.0, r)
    }

    pub fn require_critical(&self) -> Result<()> {
        if self.is_critical() {
            Ok(())
        } else {
            Err(Error::NotCritical { mean: self.mean })
        }
    }

    /// Whether a tree with exactly `n` nodes has positive probability.
    pub fn is_feasible_size(&self, n: u64) -> bool {
        if n == 0 || self.p(0) == 0.0 {
            return false;
        }
        let target = n - 1;
        if target == 0 {
            return true;
        }
        let steps: Vec<u64> = self.support().filter(|&i| i > 0).map(u64::from).collect();
        if steps.is_empty() || !target.is_multiple_of(self.period as u64) {
            return false;
        }
        // Past the Frobenius number every multiple of the period is reachable.
        let max = *steps.last().unwrap();
        if target > max * max {
            return true;
        }
        let mut reach = vec![false; target as usize + 1];
        reach[0] = true;
        for v in 1..=target as usize {
            reach[v] = steps.iter().any(|&s| s as usize <= v && reach[v - s as usize]);
        }
        reach[target as usize]
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// `p_i`, zero outside the stored range.
    pub fn p(&self, i: usize) -> f64 {
        self.pmf.get(i).copied().unwrap_or(0.0)
    }

    /// Degrees with positive mass, ascending.
    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        self.pmf.iter().enumerate().filter(|(_, p)| **p > 0.0).map(|(i, _)| i as u32)
    }

    pub fn max_degree(&self) -> u32 {
        self.pmf.len() as u32 - 1
    }

    pub fn kind(&self) -> DistKind {
        self.kind
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn period(&self) -> u32 {
        self.period
    }

    /// Smallest `i > 1` with `p_i > 0`.
    pub fn d(&self) -> Option<u32> {
        self.d
    }

    pub fn truncation_mass(&self) -> f64 {
        self.truncation_mass
    }

    pub fn is_critical(&self) -> bool {
        (self.mean - 1.0).abs() <= CRITICAL_TOL
    }

    /// Short label used in file metadata.
    pub fn label(&self) -> String {
        match self.kind {
            DistKind::Finite => {
                let parts: Vec<String> = self.pmf.iter().map(|p| p.to_string()).collect();
                format!("pmf:{}", parts.join(","))
            }
            DistKind::Catalan => "catalan".into(),
            DistKind::FullBinary => "full-binary".into(),
            DistKind::GeometricHalf => "geometric-half".into(),
            DistKind::Poisson1 => "poisson1".into(),
            DistKind::Binomial(k) => format!("binomial:{k}"),
        }
    }
}

impl DegreeSampler for OffspringDistribution {
    #[inline]
    fn sample_degree<R: RngCore + ?Sized>(&self, rng: &mut R) -> u32 {
        self.alias.sample(rng)
    }
}

/// Size-biased spine law; index `i` holds `i p_i`.
#[derive(Debug, Clone)]
pub struct SizeBiasedDistribution {
    pmf: Vec<f64>,
    alias: AliasTable,
}

impl SizeBiasedDistribution {
    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }
}

impl DegreeSampler for SizeBiasedDistribution {
    #[inline]
    fn sample_degree<R: RngCore + ?Sized>(&self, rng: &mut R) -> u32 {
        self.alias.sample(rng)
    }
}

/// Generates terms with `next(i, previous)` until they are negligible, then
/// keeps the shortest prefix whose discarded tail is below [`TRUNCATION_TAIL`].
fn truncate_tail(next: impl Fn(usize, f64) -> f64) -> (Vec<f64>, f64) {
    let mut terms = Vec::new();
    let mut prev = 0.0;
    for i in 0.. {
        prev = next(i, prev);
        terms.push(prev);
        if prev < 1e-40 || i > 10_000 {
            break;
        }
    }
    let mut tail = 0.0;
    let mut keep = terms.len();
    for (i, &t) in terms.iter().enumerate().rev() {
        if tail + t >= TRUNCATION_TAIL {
            keep = i + 1;
            break;
        }
        tail += t;
    }
    terms.truncate(keep);
    (terms, tail)
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// A distribution as written in configs and on the command line.
///
/// Config form is `{ "builtin": "catalan" }`, `{ "builtin": "binomial", "k": 3 }`,
/// `{ "pmf": [0.25, 0.5, 0.25] }` or any string form. The string form is
/// `catalan`, `binomial:3` or `pmf:0.25,0.5,0.25` (entries may be fractions
/// like `2/3`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DistSpec {
    Builtin {
        builtin: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<u32>,
    },
    Pmf {
        pmf: Vec<f64>,
    },
    Text(String),
}

impl DistSpec {
    pub fn build(&self) -> Result<OffspringDistribution> {
        match self {
            DistSpec::Pmf { pmf } => OffspringDistribution::new_finite(pmf),
            DistSpec::Text(text) => text.parse::<DistSpec>()?.build(),
            DistSpec::Builtin { builtin, k } => {
                // Accept `binomial:3` inside configs too.
                match builtin.split_once(':') {
                    Some((name, param)) if k.is_none() => {
                        let k =
                            param.parse().map_err(|_| Error::BadParam(format!("bad parameter `{param}`")))?;
                        OffspringDistribution::builtin(name, Some(k))
                    }
                    _ => OffspringDistribution::builtin(builtin, *k),
                }
            }
        }
    }
}

impl FromStr for DistSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(list) = s.strip_prefix("pmf:") {
            let pmf = list.split(',').map(parse_real).collect::<Result<Vec<f64>>>()?;
            return Ok(DistSpec::Pmf { pmf });
        }
        match s.split_once(':') {
            Some((name, param)) => {
                let k = param.parse().map_err(|_| Error::BadParam(format!("bad parameter `{param}`")))?;
                Ok(DistSpec::Builtin { builtin: name.to_string(), k: Some(k) })
            }
            None => Ok(DistSpec::Builtin { builtin: s.to_string(), k: None }),
        }
    }
}

impl fmt::Display for DistSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistSpec::Builtin { builtin, k: Some(k) } => write!(f, "{builtin}:{k}"),
            DistSpec::Builtin { builtin, k: None } => write!(f, "{builtin}"),
            DistSpec::Text(text) => write!(f, "{text}"),
            DistSpec::Pmf { pmf } => {
                let parts: Vec<String> = pmf.iter().map(|p| p.to_string()).collect();
                write!(f, "pmf:{}", parts.join(","))
            }
        }
    }
}

/// Parses `0.25` or `1/4`.
fn parse_real(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad probability `{s}`"));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            if b == 0.0 {
                return Err(bad());
            }
            Ok(a / b)
        }
        None => s.parse().map_err(|_| bad()),
    }
}
