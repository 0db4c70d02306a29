//! Random Galton-Watson trees: unconditional, conditioned on size, and the
//! truncated Kesten limit tree.

use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::offspring::{DegreeSampler, OffspringDistribution, CRITICAL_TOL};
use crate::rng::uniform_below;
use crate::tree::{rotate_into_tree, DegreeTree};

pub const DEFAULT_MAX_NODES: u64 = 10_000_000;

/// Resource caps for a single sampled tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleBudget {
    pub max_nodes: u64,
    /// `None` means `ceil(10^4 √n)`.
    pub max_rejections: Option<u64>,
}

impl Default for SampleBudget {
    fn default() -> Self {
        SampleBudget { max_nodes: DEFAULT_MAX_NODES, max_rejections: None }
    }
}

impl SampleBudget {
    pub fn rejection_cap(&self, n: u64) -> u64 {
        self.max_rejections.unwrap_or_else(|| (1e4 * (n as f64).sqrt()).ceil() as u64)
    }

    fn validate(&self) -> Result<()> {
        if self.max_nodes == 0 || self.max_rejections == Some(0) {
            return Err(Error::InvalidConfig("budget caps must be positive".into()));
        }
        Ok(())
    }
}

/// Appends one unconditional tree in preorder to `out`, failing once `out`
/// would hold more than `cap` entries.
fn grow_into<R: RngCore + ?Sized>(
    dist: &OffspringDistribution,
    rng: &mut R,
    out: &mut Vec<u32>,
    cap: u64,
) -> Result<()> {
    let mut pending: u64 = 1;
    while pending > 0 {
        if out.len() as u64 >= cap {
            return Err(Error::BudgetExceeded(format!("tree exceeds {cap} nodes")));
        }
        let d = dist.sample_degree(rng);
        out.push(d);
        pending = pending - 1 + d as u64;
    }
    Ok(())
}

/// An unconditional Galton-Watson tree.
///
/// Subcritical laws are accepted as well (the tree is then even smaller);
/// supercritical ones are rejected since their trees may be infinite.
pub fn sample_unconditional<R: RngCore + ?Sized>(
    dist: &OffspringDistribution,
    rng: &mut R,
    budget: &SampleBudget,
) -> Result<DegreeTree> {
    budget.validate()?;
    if dist.mean() > 1.0 + CRITICAL_TOL {
        return Err(Error::NotCritical { mean: dist.mean() });
    }
    let mut out = Vec::new();
    grow_into(dist, rng, &mut out, budget.max_nodes)?;
    Ok(DegreeTree::from_valid(out))
}

/// A tree conditioned on having `n` nodes. See [`sample_conditional_counted`].
pub fn sample_conditional<R: RngCore + Clone>(
    dist: &OffspringDistribution,
    n: u64,
    rng: &mut R,
    budget: &SampleBudget,
) -> Result<DegreeTree> {
    sample_conditional_counted(dist, n, rng, budget).map(|(t, _)| t)
}

/// Rejection sampler for the conditioned tree; also returns the number of
/// i.i.d. blocks drawn (accepted one included).
///
/// Draw `n` i.i.d. degrees until they sum to `n − 1`, then rotate the block
/// into its unique tree rotation. A first pass only accumulates the sum (and
/// gives up as soon as it overshoots); the accepted block is replayed from a
/// saved generator state, so rejected blocks never touch memory.
pub fn sample_conditional_counted<R: RngCore + Clone>(
    dist: &OffspringDistribution,
    n: u64,
    rng: &mut R,
    budget: &SampleBudget,
) -> Result<(DegreeTree, u64)> {
    budget.validate()?;
    dist.require_critical()?;
    if !dist.is_feasible_size(n) {
        return Err(Error::InfeasibleSize { n });
    }
    if n > budget.max_nodes {
        return Err(Error::BudgetExceeded(format!("n = {n} exceeds {} nodes", budget.max_nodes)));
    }
    let target = n - 1;
    let cap = budget.rejection_cap(n);
    for attempt in 1..=cap {
        let saved = rng.clone();
        let mut sum = 0u64;
        let mut i = 0;
        while i < n && sum <= target {
            sum += dist.sample_degree(rng) as u64;
            i += 1;
        }
        if i == n && sum == target {
            let mut replay = saved;
            let seq: Vec<u32> = (0..n).map(|_| dist.sample_degree(&mut replay)).collect();
            debug_assert_eq!(replay.next_u64(), rng.clone().next_u64());
            return Ok((rotate_into_tree(seq)?, attempt));
        }
    }
    Err(Error::BudgetExceeded(format!("{cap} rejections without a tree of size {n}")))
}

/// `T^∞_ℓ`: the Kesten tree cut below spine level `ℓ`, as one finite tree.
#[derive(Debug, Clone)]
pub struct KestenTruncatedTree {
    pub tree: DegreeTree,
    /// `ζ_0..ζ_ℓ` (the level-`ℓ` node keeps only `ζ_ℓ − 1` children).
    pub spine_degrees: Vec<u32>,
    /// Preorder indices of the spine nodes.
    pub spine_positions: Vec<usize>,
    /// `Σ (ζ_i − 1)`.
    pub hanging_count: u64,
}

/// Builds `T^∞_ℓ` in canonical preorder: each spine node's children are laid
/// out left to right, with the spine child at a uniform position and
/// independent unconditional trees everywhere else.
pub fn sample_kesten_truncated<R: RngCore + ?Sized>(
    dist: &OffspringDistribution,
    ell: usize,
    rng: &mut R,
    budget: &SampleBudget,
) -> Result<KestenTruncatedTree> {
    budget.validate()?;
    let spine_law = dist.size_biased()?;
    let cap = budget.max_nodes;
    let mut out = Vec::new();
    let mut spine_degrees = Vec::with_capacity(ell + 1);
    let mut spine_positions = Vec::with_capacity(ell + 1);
    // hanging trees still owed to the right of each spine child
    let mut right_of_spine = Vec::with_capacity(ell);

    for level in 0..=ell {
        if out.len() as u64 >= cap {
            return Err(Error::BudgetExceeded(format!("tree exceeds {cap} nodes")));
        }
        let zeta = spine_law.sample_degree(rng);
        spine_degrees.push(zeta);
        spine_positions.push(out.len());
        if level < ell {
            let j = uniform_below(rng, zeta as u64) as u32;
            out.push(zeta);
            for _ in 0..j {
                grow_into(dist, rng, &mut out, cap)?;
            }
            right_of_spine.push(zeta - 1 - j);
        } else {
            out.push(zeta - 1);
            for _ in 1..zeta {
                grow_into(dist, rng, &mut out, cap)?;
            }
        }
    }
    while let Some(owed) = right_of_spine.pop() {
        for _ in 0..owed {
            grow_into(dist, rng, &mut out, cap)?;
        }
    }

    let hanging_count = spine_degrees.iter().map(|&z| z as u64 - 1).sum();
    Ok(KestenTruncatedTree {
        tree: DegreeTree::from_valid(out),
        spine_degrees,
        spine_positions,
        hanging_count,
    })
}

/// Asymptotic probability that `n` i.i.d. degrees sum to `n − 1`:
/// `h / (σ √(2πn))` on the lattice `n ≡ 1 (mod h)`, zero elsewhere.
pub fn kolchin_rate(dist: &OffspringDistribution, n: u64) -> f64 {
    let h = dist.period() as u64;
    if n == 0 || !(n - 1).is_multiple_of(h) {
        return 0.0;
    }
    h as f64 / (dist.variance().sqrt() * (2.0 * std::f64::consts::PI * n as f64).sqrt())
}
