mod common;

use std::fs::File;
use std::io::BufReader;

use spmttkrp::oracle::{dense_khatri_rao_mttkrp, oracle_mttkrp};
use spmttkrp::{
    build_mode_plans, mttkrp_all_modes, parse_frostt, write_frostt_string, ExecConfig, FactorMatrix,
    ParseOptions, SparseTensor, Strategy,
};

use common::fixture;

fn load<T: spmttkrp::Scalar>(name: &str) -> SparseTensor<T> {
    let file = BufReader::new(File::open(fixture(name)).unwrap());
    parse_frostt(file, &ParseOptions::default()).unwrap().0
}

fn load_factors(name: &str) -> Vec<FactorMatrix<f64>> {
    serde_json::from_reader(File::open(fixture(name)).unwrap()).unwrap()
}

#[test]
fn duplicate_fixture_merges() {
    let file = BufReader::new(File::open(fixture("duplicates.tns")).unwrap());
    let (t, stats) = parse_frostt::<f64, _>(file, &ParseOptions::default()).unwrap();
    assert_eq!(t.nnz(), 3);
    assert_eq!(stats.duplicates_merged, 1);
    assert_eq!(t.value(0), 5.0);
    assert_eq!(t.shape().dims(), &[3, 2, 2]);

    let file = BufReader::new(File::open(fixture("duplicates.tns")).unwrap());
    assert!(parse_frostt::<f64, _>(file, &ParseOptions::strict()).is_err());
}

#[test]
fn chicago_like_fixture_shape() {
    let t: SparseTensor<f32> = load("chicago_like.tns");
    assert_eq!(t.shape().dims(), &[900, 24, 77, 32]);
    assert_eq!(t.nnz(), 6);
}

#[test]
fn fixtures_round_trip() {
    for name in ["tiny3.tns", "diag222.tns", "duplicates.tns", "chicago_like.tns"] {
        let t: SparseTensor<f64> = load(name);
        let text = write_frostt_string(&t);
        let back: SparseTensor<f64> = spmttkrp::parse_frostt_str(&text, &ParseOptions::strict()).unwrap();
        assert_eq!(t, back, "{name}");
    }
}

#[test]
fn identity_factors_reproduce_identity() {
    let t: SparseTensor<f64> = load("diag222.tns");
    let factors = load_factors("diag222_identity_factors.json");
    let plans = build_mode_plans(&t, 2, Strategy::Cyclic).unwrap();
    let config = ExecConfig { kappa: 2, batch: 1, rank: 2, deterministic: false };
    let out = mttkrp_all_modes(&plans, &factors, &config, false).unwrap();
    for (d, m) in out.iter().enumerate() {
        assert_eq!(m, &factors[d]);
    }
}

#[test]
fn tiny_fixture_matches_frozen_values() {
    let t: SparseTensor<f64> = load("tiny3.tns");
    let factors = load_factors("tiny3_factors.json");
    let expected = load_factors("tiny3_expected.json");
    for kappa in [1, 2, 3] {
        let plans = build_mode_plans(&t, kappa, Strategy::LeastLoaded).unwrap();
        let config = ExecConfig { kappa, batch: 2, rank: 2, deterministic: false };
        let out = mttkrp_all_modes(&plans, &factors, &config, false).unwrap();
        assert_eq!(out, expected, "kappa {kappa}");
    }
    for (d, want) in expected.iter().enumerate() {
        assert_eq!(&oracle_mttkrp(&t, &factors, d).unwrap(), want);
        assert_eq!(&dense_khatri_rao_mttkrp(&t, &factors, d).unwrap(), want);
    }
}
