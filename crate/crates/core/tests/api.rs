use std::io::Cursor;

use proptest::prelude::*;

use strahler_core::mc::{run_experiment, ExperimentConfig};
use strahler_core::tree::{read_trees, write_tree};
use strahler_core::{
    replicate_rng, rotate_to_valid, sample_conditional, sample_kesten_truncated, strahler_number,
    tree_size_prefix, DegreeTree, DistSpec, OffspringDistribution, SampleBudget, StrahlerValues, TreeFormat,
    Variant,
};

fn dist(name: &str) -> OffspringDistribution {
    name.parse::<DistSpec>().and_then(|s| s.build()).unwrap()
}

#[test]
fn tree_streams_round_trip() {
    let d = dist("geometric-half");
    let trees: Vec<DegreeTree> = (0..50)
        .map(|i| {
            sample_conditional(&d, 1 + i * 7, &mut replicate_rng(5, 0, i), &SampleBudget::default()).unwrap()
        })
        .collect();
    for format in [TreeFormat::Csv, TreeFormat::Binary] {
        let mut buf = Vec::new();
        for t in &trees {
            write_tree(&mut buf, t, format).unwrap();
        }
        assert_eq!(read_trees(Cursor::new(buf), format).unwrap(), trees);
    }
}

#[test]
fn truncated_binary_stream_is_an_error() {
    let mut buf = Vec::new();
    write_tree(&mut buf, &DegreeTree::from_degree_sequence(vec![2, 0, 0]).unwrap(), TreeFormat::Binary)
        .unwrap();
    buf.pop();
    assert!(read_trees(Cursor::new(buf), TreeFormat::Binary).is_err());
}

#[test]
fn experiment_from_toml_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.toml");
    let out = dir.path().join("out.csv");
    std::fs::write(
        &cfg_path,
        format!(
            "dist = \"pmf:2/3,0,0,1/3\"\nstatistic = \"rigid\"\nsizes = [64, 256]\nreplicates = 50\n\
             master_seed = 3\nnormalization = \"log2log2n\"\noutput = {:?}\n",
            out.display().to_string()
        ),
    )
    .unwrap();
    let config = ExperimentConfig::from_path(&cfg_path).unwrap();
    let result = run_experiment(&config, Some(1)).unwrap();
    let sidecar = result.write_files(config.output.as_ref().unwrap()).unwrap();
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("n,stat,mean"));
    assert!(std::fs::read_to_string(sidecar).unwrap().contains("\"replicates\""));
    // Same seed, other thread count: identical rows.
    assert_eq!(run_experiment(&config, Some(2)).unwrap().rows, result.rows);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let text = "dist = \"catalan\"\nstatistic = \"hs\"\nsizes = [9]\nreplicates = 1\ncolour = 3\n";
    assert!(ExperimentConfig::from_toml(text).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conditional_trees_have_requested_size(n in 1u64..300, seed: u64) {
        let t = sample_conditional(&dist("catalan"), n, &mut replicate_rng(seed, n, 0), &SampleBudget::default()).unwrap();
        prop_assert_eq!(t.len() as u64, n);
        prop_assert_eq!(tree_size_prefix(t.degrees()), Some(t.len()));
    }

    #[test]
    fn statistics_are_ordered(ell in 1usize..20, seed: u64) {
        let k = sample_kesten_truncated(&dist("poisson1"), ell, &mut replicate_rng(seed, 0, 0), &SampleBudget::default());
        prop_assume!(k.is_ok());
        let t = k.unwrap().tree;
        let v = StrahlerValues::compute(&t, &[2, 3], None).unwrap();
        prop_assert!(v.is_ordered());
        prop_assert_eq!(v.kary[&2], v.hs);
        prop_assert!(v.kary[&3] <= v.hs);
    }

    #[test]
    fn rotation_recovers_a_tree(seq in prop::collection::vec(0u32..4, 1..60), shift in 0usize..60) {
        // Pad with leaves so the total degree is len − 1.
        let mut seq = seq;
        let excess = seq.iter().map(|&d| d as i64).sum::<i64>() - (seq.len() as i64 - 1);
        prop_assume!(excess >= 0);
        seq.extend(std::iter::repeat_n(0, excess as usize));
        let shift = shift % seq.len();
        seq.rotate_left(shift);
        let r = rotate_to_valid(&seq).unwrap();
        seq.rotate_left(r);
        let t = DegreeTree::from_degree_sequence(seq).unwrap();
        prop_assert!(strahler_number(&t, Variant::Hs) <= strahler_number(&t, Variant::French));
    }
}
