use proptest::prelude::*;
use synthaudit::dataio::{read_embeddings, write_embeddings};
use synthaudit::memaudit::{audit, pair_distance};
use synthaudit::nnsearch::{nearest_neighbor, AllowAll};
use synthaudit::stats::{bootstrap_auroc_diff, macro_auroc, BootstrapOptions};
use synthaudit::{AuditConfig, EmbeddingMatrix, NeighborPair, RasterImage, ScoredPredictions};

fn matrix(prefix: &str, rows: &[Vec<f32>]) -> EmbeddingMatrix {
    let ids: Vec<String> = (0..rows.len()).map(|i| format!("{prefix}{i:03}")).collect();
    EmbeddingMatrix::from_rows(ids, rows).unwrap()
}

#[test]
fn embeddings_survive_a_file_round_trip_and_search() {
    let rows: Vec<Vec<f32>> = (0..20).map(|i| (0..8).map(|k| ((i * 7 + k * 3) % 11) as f32 - 5.0).collect()).collect();
    let corpus = matrix("r", &rows);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("corpus.emb");
    write_embeddings(&corpus, &path).unwrap();
    let back = read_embeddings(&path).unwrap();
    assert_eq!(back.ids(), corpus.ids());
    assert!(back.data().iter().zip(corpus.data()).all(|(a, b)| a.to_bits() == b.to_bits()));

    let queries = matrix("q", &rows[3..5]);
    let found = nearest_neighbor(&queries, &back, &AllowAll, 0).unwrap();
    assert_eq!(found[0].cosine, 1.0);
    assert_eq!(found[1].cosine, 1.0);
}

#[test]
fn audit_flags_copies_but_not_inverted_images() {
    let a = RasterImage::new(512, 512, 1, (0..512 * 512).map(|i| (i % 251) as u8).collect()).unwrap();
    let inverted = RasterImage::new(512, 512, 1, a.pixels().iter().map(|&p| 255 - p).collect()).unwrap();
    let cfg = AuditConfig::default();
    let pair = |q: &str| NeighborPair { query_id: q.into(), neighbor_id: "r".into(), cosine: 0.99 };
    let out = audit(&[(a.clone(), a.clone(), pair("copy")), (inverted.clone(), a.clone(), pair("inv"))], &cfg).unwrap();
    assert!(out[0].flagged);
    assert!(!out[1].flagged);
    assert!(pair_distance(&inverted, &a, &cfg).unwrap() > 0.15);
}

fn predictions(scores: Vec<f64>, labels: Vec<bool>) -> ScoredPredictions {
    ScoredPredictions::binary("c", scores, labels).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn search_ignores_corpus_order(
        rows in prop::collection::vec(prop::collection::vec(-4i8..4, 6), 2..30),
        rot in 0usize..30,
    ) {
        let rows: Vec<Vec<f32>> = rows.into_iter().map(|r| r.into_iter().map(f32::from).collect()).collect();
        prop_assume!(rows.iter().all(|r| r.iter().any(|&v| v != 0.0)));
        let corpus = matrix("r", &rows);
        let mut ids = corpus.ids().to_vec();
        let mut shuffled = rows.clone();
        let k = rot % rows.len();
        ids.rotate_left(k);
        shuffled.rotate_left(k);
        let rotated = EmbeddingMatrix::from_rows(ids, &shuffled).unwrap();
        let queries = matrix("q", &rows[..2]);
        let a = nearest_neighbor(&queries, &corpus, &AllowAll, 1).unwrap();
        let b = nearest_neighbor(&queries, &rotated, &AllowAll, 2).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn bootstrap_interval_stays_within_unit_range(
        seed in any::<u64>(),
        data in prop::collection::vec((0u8..20, 0u8..20, any::<bool>()), 10..60),
    ) {
        let labels: Vec<bool> = data.iter().map(|d| d.2).collect();
        prop_assume!(labels.iter().any(|&l| l) && labels.iter().any(|&l| !l));
        let a = predictions(data.iter().map(|d| d.0 as f64).collect(), labels.clone());
        let b = predictions(data.iter().map(|d| d.1 as f64).collect(), labels);
        let ci = bootstrap_auroc_diff(&a, &b, BootstrapOptions { resamples: 50, seed, workers: 1 }).unwrap();
        let point = macro_auroc(&a).unwrap() - macro_auroc(&b).unwrap();
        prop_assert_eq!(ci.point_estimate, point);
        prop_assert!(-1.0 <= ci.lo && ci.lo <= ci.hi && ci.hi <= 1.0);
    }
}
