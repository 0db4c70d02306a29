//! Horton-Strahler numbers of Galton-Watson trees: samplers, streaming
//! statistics, exact tail recursions in extended precision, and a Monte Carlo
//! harness.

pub mod error;
pub mod exactdist;
pub mod mc;
pub mod offspring;
pub mod rng;
pub mod sampler;
pub mod strahler;
pub mod tree;

pub use error::{Error, Result};
pub use exactdist::{
    conditional_bruteforce, hs_tail_table, kary_tail_table, rigid_constants, rigid_tail_table, tail_table,
    RigidConstants, TailTable,
};
pub use mc::{
    run_experiment, summarize, ExperimentConfig, ExperimentResult, Normalization, SamplerKind, Summary,
};
pub use offspring::{DegreeSampler, DistKind, DistSpec, OffspringDistribution, SizeBiasedDistribution};
pub use rng::{mix_seed, replicate_rng, rng_from_seed, GwRng};
pub use sampler::{
    kolchin_rate, sample_conditional, sample_conditional_counted, sample_kesten_truncated,
    sample_unconditional, KestenTruncatedTree, SampleBudget,
};
pub use strahler::{
    k_register, rotational_max, strahler_number, strahler_per_node, Statistic, StrahlerValues, Variant,
};
pub use tree::{enumerate_trees, rotate_to_valid, tree_size_prefix, DegreeTree, TreeFormat, WeightedTree};
