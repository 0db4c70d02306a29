//! Ordered trees stored as preorder degree sequences.
//!
//! A sequence `ξ_1..ξ_n` encodes a single tree exactly when its Łukasiewicz
//! walk `W_t = Σ_{i≤t} (ξ_i − 1)` stays nonnegative for `t < n` and first
//! reaches −1 at `t = n`.

use std::io::{self, BufRead, Write};

use crate::error::{Error, Result};
use crate::offspring::OffspringDistribution;

/// Largest size accepted by [`enumerate_trees`].
pub const MAX_ENUMERATION_SIZE: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DegreeTree {
    degrees: Vec<u32>,
}

impl DegreeTree {
    /// Accepts the sequence iff it is exactly one complete tree.
    pub fn from_degree_sequence(degrees: Vec<u32>) -> Result<Self> {
        match tree_size_prefix(&degrees) {
            Some(n) if n == degrees.len() => Ok(DegreeTree { degrees }),
            Some(n) => Err(Error::TreeCompletesEarly { at: n, len: degrees.len() }),
            None => Err(Error::TreeUnfinished),
        }
    }

    /// Wraps a sequence already known to be valid (debug-checked).
    pub(crate) fn from_valid(degrees: Vec<u32>) -> Self {
        debug_assert_eq!(tree_size_prefix(&degrees), Some(degrees.len()));
        DegreeTree { degrees }
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn into_degrees(self) -> Vec<u32> {
        self.degrees
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    /// Always false; a tree has at least its root.
    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn leaf() -> Self {
        DegreeTree { degrees: vec![0] }
    }

    /// Edges on the longest root-to-leaf path.
    pub fn height(&self) -> usize {
        let mut pending: Vec<u32> = Vec::new();
        let mut best = 0;
        for &d in &self.degrees {
            best = best.max(pending.len());
            if d > 0 {
                pending.push(d);
                continue;
            }
            while let Some(top) = pending.last_mut() {
                *top -= 1;
                if *top > 0 {
                    break;
                }
                pending.pop();
            }
        }
        best
    }

    /// Comma-separated degrees.
    pub fn to_csv_line(&self) -> String {
        let parts: Vec<String> = self.degrees.iter().map(u32::to_string).collect();
        parts.join(",")
    }

    pub fn parse_csv_line(line: &str) -> Result<Self> {
        let degrees = line
            .trim()
            .split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad degree `{t}`"))))
            .collect::<Result<Vec<u32>>>()?;
        Self::from_degree_sequence(degrees)
    }
}

/// Length of the first tree spanned by `seq`, or `None` if the sequence ends
/// before that tree is finished.
pub fn tree_size_prefix(seq: &[u32]) -> Option<usize> {
    tree_size_prefix_iter(seq.iter().copied())
}

pub(crate) fn tree_size_prefix_iter(seq: impl IntoIterator<Item = u32>) -> Option<usize> {
    let mut pending: i64 = 1;
    for (t, d) in seq.into_iter().enumerate() {
        pending += d as i64 - 1;
        if pending == 0 {
            return Some(t + 1);
        }
    }
    None
}

/// Cycle lemma: for a sequence summing to `n − 1`, returns the 0-based start
/// of the unique rotation that encodes a tree. That rotation begins right
/// after the first position where the walk attains its minimum.
pub fn rotate_to_valid(seq: &[u32]) -> Result<usize> {
    let n = seq.len() as u64;
    let sum: u64 = seq.iter().map(|&d| d as u64).sum();
    if n == 0 || sum != n - 1 {
        return Err(Error::SumMismatch { sum, expected: n.saturating_sub(1) });
    }
    let mut walk: i64 = 0;
    let mut min = i64::MAX;
    let mut arg = 0;
    for (t, &d) in seq.iter().enumerate() {
        walk += d as i64 - 1;
        if walk < min {
            min = walk;
            arg = t;
        }
    }
    Ok((arg + 1) % seq.len())
}

/// Rotates `seq` in place into its tree rotation.
pub fn rotate_into_tree(mut seq: Vec<u32>) -> Result<DegreeTree> {
    let start = rotate_to_valid(&seq)?;
    seq.rotate_left(start);
    Ok(DegreeTree::from_valid(seq))
}

/// A tree together with its Galton-Watson probability.
#[derive(Debug, Clone)]
pub struct WeightedTree {
    pub tree: DegreeTree,
    /// `Σ_v log p_{ξ_v}`.
    pub log_weight: f64,
    /// `Π_v p_{ξ_v}`, kept alongside to avoid a lossy `exp`.
    pub weight: f64,
}

/// Streams every tree of size `n` whose degrees lie in the support of `dist`,
/// in lexicographic order of the degree sequence.
pub fn enumerate_trees(dist: &OffspringDistribution, n: usize) -> Result<TreeEnumerator> {
    if n > MAX_ENUMERATION_SIZE {
        return Err(Error::TooLarge { n, max: MAX_ENUMERATION_SIZE });
    }
    if n == 0 {
        return Err(Error::InfeasibleSize { n: 0 });
    }
    Ok(TreeEnumerator {
        support: dist.support().collect(),
        pmf: dist.pmf().to_vec(),
        n,
        choice: Vec::with_capacity(n),
        started: false,
        done: false,
    })
}

pub struct TreeEnumerator {
    support: Vec<u32>,
    pmf: Vec<f64>,
    n: usize,
    /// Index into `support` for each filled position.
    choice: Vec<usize>,
    started: bool,
    done: bool,
}

impl TreeEnumerator {
    fn pending_after(&self, upto: usize) -> i64 {
        1 + self.choice[..upto].iter().map(|&c| self.support[c] as i64 - 1).sum::<i64>()
    }

    /// Whether support index `c` may be placed at position `pos` given the
    /// walk before it.
    fn admissible(&self, pos: usize, pending: i64, c: usize) -> bool {
        let next = pending + self.support[c] as i64 - 1;
        if pos + 1 == self.n {
            next == 0
        } else {
            next >= 1 && next <= (self.n - pos - 1) as i64
        }
    }

    /// Fills positions from `self.choice.len()` onwards with the smallest
    /// admissible choices; returns false on a dead end.
    fn fill(&mut self) -> bool {
        while self.choice.len() < self.n {
            let pos = self.choice.len();
            let pending = self.pending_after(pos);
            match (0..self.support.len()).find(|&c| self.admissible(pos, pending, c)) {
                Some(c) => self.choice.push(c),
                None => return false,
            }
        }
        true
    }

    /// Advances the deepest position that has a larger admissible choice.
    fn bump(&mut self) -> bool {
        while let Some(last) = self.choice.pop() {
            let pos = self.choice.len();
            let pending = self.pending_after(pos);
            if let Some(c) = (last + 1..self.support.len()).find(|&c| self.admissible(pos, pending, c)) {
                self.choice.push(c);
                return true;
            }
        }
        false
    }

    fn emit(&self) -> WeightedTree {
        let degrees: Vec<u32> = self.choice.iter().map(|&c| self.support[c]).collect();
        let weight: f64 = degrees.iter().map(|&d| self.pmf[d as usize]).product();
        let log_weight: f64 = degrees.iter().map(|&d| self.pmf[d as usize].ln()).sum();
        WeightedTree { tree: DegreeTree::from_valid(degrees), log_weight, weight }
    }
}

impl Iterator for TreeEnumerator {
    type Item = WeightedTree;

    fn next(&mut self) -> Option<WeightedTree> {
        if self.done {
            return None;
        }
        let mut ok = if self.started {
            self.bump() && self.fill()
        } else {
            self.started = true;
            self.fill()
        };
        while !ok {
            if !self.bump() {
                self.done = true;
                return None;
            }
            ok = self.fill();
        }
        Some(self.emit())
    }
}

/// Writes `degrees,log_weight` rows; degrees are space-separated inside the
/// first field so the row stays two columns.
pub fn write_enumeration_csv<W: Write>(
    mut out: W,
    trees: impl IntoIterator<Item = WeightedTree>,
) -> io::Result<()> {
    writeln!(out, "degrees,log_weight")?;
    for t in trees {
        let deg: Vec<String> = t.tree.degrees().iter().map(u32::to_string).collect();
        writeln!(out, "{},{}", deg.join(" "), t.log_weight)?;
    }
    Ok(())
}

/// On-disk framing of a tree stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeFormat {
    /// One comma-separated degree sequence per line.
    Csv,
    /// `u32` length followed by that many `u32` degrees, little-endian.
    Binary,
}

impl std::str::FromStr for TreeFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(TreeFormat::Csv),
            "binary" => Ok(TreeFormat::Binary),
            other => Err(Error::Parse(format!("unknown tree format `{other}`"))),
        }
    }
}

pub fn write_tree<W: Write>(out: &mut W, tree: &DegreeTree, format: TreeFormat) -> io::Result<()> {
    match format {
        TreeFormat::Csv => writeln!(out, "{}", tree.to_csv_line()),
        TreeFormat::Binary => {
            out.write_all(&(tree.len() as u32).to_le_bytes())?;
            for &d in tree.degrees() {
                out.write_all(&d.to_le_bytes())?;
            }
            Ok(())
        }
    }
}

/// Reads every tree in a stream written by [`write_tree`].
pub fn read_trees<R: BufRead>(mut input: R, format: TreeFormat) -> Result<Vec<DegreeTree>> {
    let mut trees = Vec::new();
    match format {
        TreeFormat::Csv => {
            for line in input.lines() {
                let line = line?;
                if !line.trim().is_empty() {
                    trees.push(DegreeTree::parse_csv_line(&line)?);
                }
            }
        }
        TreeFormat::Binary => {
            let mut word = [0u8; 4];
            loop {
                match input.read_exact(&mut word) {
                    Ok(()) => {}
                    Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => break,
                    Err(e) => return Err(e.into()),
                }
                let len = u32::from_le_bytes(word) as usize;
                let mut degrees = Vec::with_capacity(len);
                for _ in 0..len {
                    input.read_exact(&mut word)?;
                    degrees.push(u32::from_le_bytes(word));
                }
                trees.push(DegreeTree::from_degree_sequence(degrees)?);
            }
        }
    }
    Ok(trees)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cat() -> OffspringDistribution {
        OffspringDistribution::builtin("catalan", None).unwrap()
    }

    #[test]
    fn from_degree_sequence_examples() {
        assert_eq!(DegreeTree::from_degree_sequence(vec![2, 0, 0]).unwrap().len(), 3);
        assert!(matches!(
            DegreeTree::from_degree_sequence(vec![1, 2, 0, 0, 0]),
            Err(Error::TreeCompletesEarly { at: 4, len: 5 })
        ));
        assert!(matches!(DegreeTree::from_degree_sequence(vec![1, 1, 1]), Err(Error::TreeUnfinished)));
    }

    #[test]
    fn prefix_examples() {
        assert_eq!(tree_size_prefix(&[0, 5, 5]), Some(1));
        assert_eq!(tree_size_prefix(&[2, 0, 0, 1, 0]), Some(3));
        assert_eq!(tree_size_prefix(&[2, 2, 0]), None);
    }

    #[test]
    fn rotation_examples() {
        assert_eq!(rotate_to_valid(&[0, 2, 0]).unwrap(), 1);
        assert_eq!(rotate_to_valid(&[2, 0, 0]).unwrap(), 0);
        assert_eq!(rotate_to_valid(&[0, 0, 2]).unwrap(), 2);
        assert_eq!(rotate_into_tree(vec![0, 2, 0]).unwrap().degrees(), &[2, 0, 0]);
        assert!(matches!(rotate_to_valid(&[1, 1]), Err(Error::SumMismatch { sum: 2, expected: 1 })));
    }

    #[test]
    fn height_examples() {
        assert_eq!(DegreeTree::leaf().height(), 0);
        assert_eq!(DegreeTree::from_degree_sequence(vec![1, 1, 0]).unwrap().height(), 2);
        assert_eq!(DegreeTree::from_degree_sequence(vec![2, 0, 0]).unwrap().height(), 1);
        assert_eq!(DegreeTree::from_degree_sequence(vec![2, 0, 1, 1, 0]).unwrap().height(), 3);
    }

    #[test]
    fn enumerate_catalan_three() {
        let trees: Vec<WeightedTree> = enumerate_trees(&cat(), 3).unwrap().collect();
        assert_eq!(trees.len(), 2);
        assert_eq!(trees[0].tree.degrees(), &[1, 1, 0]);
        assert_eq!(trees[0].weight, 1.0 / 16.0);
        assert_eq!(trees[1].tree.degrees(), &[2, 0, 0]);
        assert_eq!(trees[1].weight, 1.0 / 64.0);
        let total: f64 = trees.iter().map(|t| t.log_weight.exp()).sum();
        assert!((total - 5.0 / 64.0).abs() < 1e-15);
    }

    #[test]
    fn enumerate_edge_cases() {
        let leaf: Vec<_> = enumerate_trees(&cat(), 1).unwrap().collect();
        assert_eq!(leaf.len(), 1);
        assert_eq!(leaf[0].weight, 0.25);
        let fb = OffspringDistribution::builtin("full-binary", None).unwrap();
        assert_eq!(enumerate_trees(&fb, 2).unwrap().count(), 0);
        assert_eq!(enumerate_trees(&fb, 4).unwrap().count(), 0);
        assert!(matches!(enumerate_trees(&fb, 17), Err(Error::TooLarge { n: 17, .. })));
    }

    #[test]
    fn enumeration_counts_match_catalan_numbers() {
        // Unrestricted plane trees with n nodes are counted by Catalan(n-1);
        // Motzkin trees (degrees <= 2) by the Motzkin numbers.
        let geo = OffspringDistribution::builtin("geometric-half", None).unwrap();
        let catalan = [1, 1, 2, 5, 14, 42, 132, 429, 1430];
        for (n, &c) in catalan.iter().enumerate() {
            assert_eq!(enumerate_trees(&geo, n + 1).unwrap().count(), c, "n = {}", n + 1);
        }
        let motzkin = [1, 1, 2, 4, 9, 21, 51, 127, 323];
        for (n, &m) in motzkin.iter().enumerate() {
            assert_eq!(enumerate_trees(&cat(), n + 1).unwrap().count(), m);
        }
    }

    #[test]
    fn enumerated_trees_respect_height_bound() {
        let geo = OffspringDistribution::builtin("geometric-half", None).unwrap();
        for n in 1..=9 {
            for t in enumerate_trees(&geo, n).unwrap() {
                assert!(t.tree.height() < n);
                assert_eq!(tree_size_prefix(t.tree.degrees()), Some(n));
            }
        }
    }

    #[test]
    fn csv_and_binary_streams() {
        let trees = vec![DegreeTree::from_degree_sequence(vec![2, 0, 1, 0]).unwrap(), DegreeTree::leaf()];
        for format in [TreeFormat::Csv, TreeFormat::Binary] {
            let mut buf = Vec::new();
            for t in &trees {
                write_tree(&mut buf, t, format).unwrap();
            }
            assert_eq!(read_trees(&buf[..], format).unwrap(), trees);
        }
        let mut buf = Vec::new();
        write_tree(&mut buf, &trees[0], TreeFormat::Binary).unwrap();
        assert_eq!(&buf[..8], &[4, 0, 0, 0, 2, 0, 0, 0]);
    }

    #[test]
    fn enumeration_csv_dump() {
        let mut buf = Vec::new();
        write_enumeration_csv(&mut buf, enumerate_trees(&cat(), 3).unwrap()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "degrees,log_weight");
        assert!(lines[1].starts_with("1 1 0,"));
        assert!(lines[2].starts_with("2 0 0,"));
    }

    proptest! {
        #[test]
        fn exactly_one_rotation_is_a_tree(raw in prop::collection::vec(0u32..4, 1..12)) {
            // Force the sum to n - 1 by trimming from the front of the budget.
            let n = raw.len();
            let mut seq = raw.clone();
            let mut sum: i64 = seq.iter().map(|&d| d as i64).sum();
            let target = n as i64 - 1;
            let mut i = 0;
            while sum > target {
                if seq[i % n] > 0 { seq[i % n] -= 1; sum -= 1; }
                i += 1;
            }
            i = 0;
            while sum < target { seq[i % n] += 1; sum += 1; i += 1; }

            let valid: Vec<usize> = (0..n)
                .filter(|&r| {
                    let mut rot = seq.clone();
                    rot.rotate_left(r);
                    DegreeTree::from_degree_sequence(rot).is_ok()
                })
                .collect();
            prop_assert_eq!(valid.len(), 1);
            prop_assert_eq!(valid[0], rotate_to_valid(&seq).unwrap());
        }
    }
}
