//! Horton-Strahler type statistics.
//!
//! Every statistic is a symmetric function of the children's values with
//! leaves scoring 0. (The register-function convention scores leaves 1; add
//! one to convert.) Evaluation is a single left-to-right pass over the preorder
//! degree sequence with an explicit stack of open frames, so memory is
//! O(height) and deep trees cannot overflow the call stack.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::DegreeTree;

/// Largest input accepted by [`rotational_max`].
pub const MAX_ROTATIONAL_SIZE: usize = 10_000;

/// The four single-number variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Hs,
    French,
    Canadian,
    Rigid,
}

/// Every statistic the crate can evaluate on a tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Statistic {
    Hs,
    French,
    Canadian,
    Rigid,
    Kary(usize),
    /// Maximum of HS over the first trees of all rotations.
    HsStar,
}

impl Statistic {
    pub fn evaluate(&self, tree: &DegreeTree) -> Result<u32> {
        Ok(match *self {
            Statistic::Hs => strahler_number(tree, Variant::Hs),
            Statistic::French => strahler_number(tree, Variant::French),
            Statistic::Canadian => strahler_number(tree, Variant::Canadian),
            Statistic::Rigid => strahler_number(tree, Variant::Rigid),
            Statistic::Kary(k) => k_register(tree, k)?,
            Statistic::HsStar => rotational_max(tree.degrees())?,
        })
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "hs" => Ok(Statistic::Hs),
            "french" | "fr" => Ok(Statistic::French),
            "canadian" | "can" => Ok(Statistic::Canadian),
            "rigid" | "rig" => Ok(Statistic::Rigid),
            "hsstar" | "hs*" => Ok(Statistic::HsStar),
            other => match other.strip_prefix("kary:") {
                Some(k) => {
                    let k: usize = k.parse().map_err(|_| Error::Parse(format!("bad k in `{other}`")))?;
                    if k < 2 {
                        return Err(Error::BadK { k, min: 2 });
                    }
                    Ok(Statistic::Kary(k))
                }
                None => Err(Error::UnsupportedStatistic(other.to_string())),
            },
        }
    }
}

impl TryFrom<String> for Statistic {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Statistic> for String {
    fn from(s: Statistic) -> String {
        s.to_string()
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistic::Hs => write!(f, "hs"),
            Statistic::French => write!(f, "french"),
            Statistic::Canadian => write!(f, "canadian"),
            Statistic::Rigid => write!(f, "rigid"),
            Statistic::Kary(k) => write!(f, "kary:{k}"),
            Statistic::HsStar => write!(f, "hsstar"),
        }
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.parse::<Statistic>()? {
            Statistic::Hs => Ok(Variant::Hs),
            Statistic::French => Ok(Variant::French),
            Statistic::Canadian => Ok(Variant::Canadian),
            Statistic::Rigid => Ok(Variant::Rigid),
            other => Err(Error::UnsupportedStatistic(other.to_string())),
        }
    }
}

/// Folds child values into a parent value.
trait Combine {
    fn push(&mut self, v: u32);
    fn finish(&self) -> u32;
}

#[derive(Default)]
struct HsAcc {
    max: u32,
    at_max: u32,
}

impl Combine for HsAcc {
    #[inline]
    fn push(&mut self, v: u32) {
        if v > self.max || self.at_max == 0 {
            self.max = v;
            self.at_max = 1;
        } else if v == self.max {
            self.at_max += 1;
        }
    }
    #[inline]
    fn finish(&self) -> u32 {
        self.max + (self.at_max >= 2) as u32
    }
}

#[derive(Default)]
struct CanadianAcc(HsAcc);

impl Combine for CanadianAcc {
    #[inline]
    fn push(&mut self, v: u32) {
        self.0.push(v)
    }
    #[inline]
    fn finish(&self) -> u32 {
        self.0.max + self.0.at_max - 1
    }
}

#[derive(Default)]
struct RigidAcc {
    max: u32,
    count: u32,
    all_equal: bool,
}

impl Combine for RigidAcc {
    #[inline]
    fn push(&mut self, v: u32) {
        if self.count == 0 {
            self.max = v;
            self.all_equal = true;
        } else if v != self.max {
            self.all_equal = false;
            self.max = self.max.max(v);
        }
        self.count += 1;
    }
    #[inline]
    fn finish(&self) -> u32 {
        self.max + (self.count >= 2 && self.all_equal) as u32
    }
}

/// Value -> multiplicity; values never exceed the height so this stays small.
#[derive(Default)]
struct FrenchAcc(BTreeMap<u32, u32>);

impl Combine for FrenchAcc {
    fn push(&mut self, v: u32) {
        *self.0.entry(v).or_insert(0) += 1;
    }
    /// `max_v (v + #{children ≥ v} − 1)`, which equals `max_i (F_i + i − 1)`
    /// over the values sorted in decreasing order.
    fn finish(&self) -> u32 {
        let mut at_least = 0;
        let mut best = 0;
        for (&v, &c) in self.0.iter().rev() {
            at_least += c;
            best = best.max(v + at_least - 1);
        }
        best
    }
}

/// Keeps the `k` largest child values in decreasing order.
struct KaryAcc {
    k: usize,
    top: Vec<u32>,
    count: usize,
}

impl Combine for KaryAcc {
    fn push(&mut self, v: u32) {
        self.count += 1;
        let pos = self.top.partition_point(|&x| x >= v);
        if pos < self.k {
            self.top.insert(pos, v);
            self.top.truncate(self.k);
        }
    }
    fn finish(&self) -> u32 {
        if self.count >= self.k {
            self.top[0].max(self.top[self.k - 1] + 1)
        } else {
            self.top[0]
        }
    }
}

struct Frame<A> {
    node: usize,
    remaining: u32,
    acc: A,
}

/// Evaluates the first tree spanned by `degrees`. Returns the root value and
/// the tree size, or `None` if the sequence ends first. When `per_node` is
/// given, the value of preorder node `i` is written to `per_node[i]`.
fn fold_tree<A: Combine>(
    degrees: impl IntoIterator<Item = u32>,
    make: impl Fn() -> A,
    mut per_node: Option<&mut Vec<u32>>,
) -> Option<(u32, usize)> {
    let mut stack: Vec<Frame<A>> = Vec::new();
    for (idx, d) in degrees.into_iter().enumerate() {
        if let Some(out) = per_node.as_deref_mut() {
            out.push(0);
        }
        if d > 0 {
            stack.push(Frame { node: idx, remaining: d, acc: make() });
            continue;
        }
        let mut value = 0;
        loop {
            let Some(top) = stack.last_mut() else {
                return Some((value, idx + 1));
            };
            top.acc.push(value);
            top.remaining -= 1;
            if top.remaining > 0 {
                break;
            }
            let done = stack.pop().unwrap();
            value = done.acc.finish();
            if let Some(out) = per_node.as_deref_mut() {
                out[done.node] = value;
            }
        }
    }
    None
}

fn fold_variant(
    degrees: impl IntoIterator<Item = u32>,
    variant: Variant,
    per_node: Option<&mut Vec<u32>>,
) -> Option<(u32, usize)> {
    match variant {
        Variant::Hs => fold_tree(degrees, HsAcc::default, per_node),
        Variant::French => fold_tree(degrees, FrenchAcc::default, per_node),
        Variant::Canadian => fold_tree(degrees, CanadianAcc::default, per_node),
        Variant::Rigid => fold_tree(degrees, RigidAcc::default, per_node),
    }
}

/// Root value of the selected variant.
pub fn strahler_number(tree: &DegreeTree, variant: Variant) -> u32 {
    fold_variant(tree.degrees().iter().copied(), variant, None).expect("a DegreeTree is always complete").0
}

/// Values at every node, indexed by preorder position.
pub fn strahler_per_node(tree: &DegreeTree, variant: Variant) -> Vec<u32> {
    let mut out = Vec::with_capacity(tree.len());
    fold_variant(tree.degrees().iter().copied(), variant, Some(&mut out));
    out
}

/// Height of the largest complete `k`-ary tree embedded in `tree`.
pub fn k_register(tree: &DegreeTree, k: usize) -> Result<u32> {
    if k < 2 {
        return Err(Error::BadK { k, min: 2 });
    }
    let make = || KaryAcc { k, top: Vec::with_capacity(k), count: 0 };
    Ok(fold_tree(tree.degrees().iter().copied(), make, None).expect("a DegreeTree is always complete").0)
}

/// HS*: the maximum over all rotations `i` of the HS number of the first tree
/// in the rotated sequence (0 when that tree is unfinished). It is invariant
/// under rotation and bounds HS of the valid rotation from above.
pub fn rotational_max(seq: &[u32]) -> Result<u32> {
    let n = seq.len();
    let sum: u64 = seq.iter().map(|&d| d as u64).sum();
    if n == 0 || sum != n as u64 - 1 {
        return Err(Error::SumMismatch { sum, expected: (n as u64).saturating_sub(1) });
    }
    if n > MAX_ROTATIONAL_SIZE {
        return Err(Error::TooLarge { n, max: MAX_ROTATIONAL_SIZE });
    }
    let best = (0..n)
        .filter(|&i| seq[i] > 0)
        .filter_map(|i| {
            let rotated = seq[i..].iter().chain(&seq[..i]).copied();
            fold_tree(rotated, HsAcc::default, None).map(|(v, _)| v)
        })
        .max()
        .unwrap_or(0);
    Ok(best)
}

/// All statistics of one tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrahlerValues {
    pub hs: u32,
    pub french: u32,
    pub canadian: u32,
    pub rigid: u32,
    pub kary: BTreeMap<usize, u32>,
    pub per_node: Option<(Variant, Vec<u32>)>,
}

impl StrahlerValues {
    pub fn compute(tree: &DegreeTree, ks: &[usize], per_node: Option<Variant>) -> Result<Self> {
        let kary = ks.iter().map(|&k| Ok((k, k_register(tree, k)?))).collect::<Result<BTreeMap<_, _>>>()?;
        Ok(StrahlerValues {
            hs: strahler_number(tree, Variant::Hs),
            french: strahler_number(tree, Variant::French),
            canadian: strahler_number(tree, Variant::Canadian),
            rigid: strahler_number(tree, Variant::Rigid),
            kary,
            per_node: per_node.map(|v| (v, strahler_per_node(tree, v))),
        })
    }

    /// `french ≥ canadian ≥ hs ≥ rigid`.
    pub fn is_ordered(&self) -> bool {
        self.french >= self.canadian && self.canadian >= self.hs && self.hs >= self.rigid
    }
}

/// Writes `preorder_index,value` rows.
pub fn write_per_node_csv<W: Write>(mut out: W, values: &[u32]) -> io::Result<()> {
    writeln!(out, "preorder_index,value")?;
    for (i, v) in values.iter().enumerate() {
        writeln!(out, "{i},{v}")?;
    }
    Ok(())
}
