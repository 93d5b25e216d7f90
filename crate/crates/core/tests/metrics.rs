mod common;

use std::collections::HashMap;

use backrank::corpus::RankedList;
use backrank::metrics::{
    arab, bias_report, evaluate_effectiveness, mrr_at_k, ndcg_at_k, rab, GenderLexicon, MagnitudeOptions, Qrels, Variant,
};
use backrank::numkernel::SplitMix64;
use common::{arab_direct, mrr_direct, ndcg_direct, random_doc, rab_direct};
use indexmap::IndexMap;
use proptest::prelude::*;

fn slices(docs: &[Vec<String>]) -> Vec<&[String]> {
    docs.iter().map(Vec::as_slice).collect()
}

#[test]
fn bias_matches_direct_evaluation_on_random_lists() {
    let lex = GenderLexicon::default();
    let opts = MagnitudeOptions::default();
    let mut rng = SplitMix64::new(2024);
    for _ in 0..200 {
        let len = 1 + rng.below(30);
        let docs: Vec<Vec<String>> = (0..len).map(|_| random_doc(&mut rng)).collect();
        let refs = slices(&docs);
        for t in [1, 5, 10, 20, 40] {
            for (variant, boolean) in [(Variant::Tf, false), (Variant::Bool, true)] {
                assert_eq!(rab(&refs, t, &lex, variant, &opts).unwrap(), rab_direct(&docs, t, boolean));
                assert_eq!(arab(&refs, t, &lex, variant, &opts).unwrap(), arab_direct(&docs, t, boolean));
            }
        }
    }
}

#[test]
fn swapping_the_lexicon_negates_bias() {
    let lex = GenderLexicon::default();
    let swapped = lex.swapped();
    let opts = MagnitudeOptions::default();
    let mut rng = SplitMix64::new(7);
    for _ in 0..200 {
        let docs: Vec<Vec<String>> = (0..15).map(|_| random_doc(&mut rng)).collect();
        let refs = slices(&docs);
        for variant in Variant::ALL {
            let a = arab(&refs, 10, &lex, variant, &opts).unwrap();
            let b = arab(&refs, 10, &swapped, variant, &opts).unwrap();
            assert_eq!(a, -b);
        }
    }
}

#[test]
fn arab_extends_its_prefix() {
    let lex = GenderLexicon::default();
    let opts = MagnitudeOptions::default();
    let mut rng = SplitMix64::new(8);
    for _ in 0..100 {
        let docs: Vec<Vec<String>> = (0..12).map(|_| random_doc(&mut rng)).collect();
        let refs = slices(&docs);
        for t in 1..12 {
            let next = arab(&refs, t + 1, &lex, Variant::Tf, &opts).unwrap();
            let prev = arab(&refs, t, &lex, Variant::Tf, &opts).unwrap();
            let rab_next = rab(&refs, t + 1, &lex, Variant::Tf, &opts).unwrap();
            let expected = (prev * t as f64 + rab_next) / (t + 1) as f64;
            assert!((next - expected).abs() < 1e-12);
        }
    }
}

#[test]
fn three_document_fixture() {
    let lex = GenderLexicon::default();
    let opts = MagnitudeOptions::default();
    let docs: Vec<Vec<String>> = ["her her her cat", "he he man", "tree"]
        .iter()
        .map(|s| s.split_whitespace().map(str::to_string).collect())
        .collect();
    let refs = slices(&docs);
    // Biases: ln 3, -ln 2, 0.
    let (l3, l2) = (3f64.ln(), 2f64.ln());
    let r = rab(&refs, 3, &lex, Variant::Tf, &opts).unwrap();
    assert!((r - (l3 - l2) / 3.0).abs() < 1e-15);
    let a = arab(&refs, 3, &lex, Variant::Tf, &opts).unwrap();
    let expected = (l3 + (l3 - l2) / 2.0 + (l3 - l2) / 3.0) / 3.0;
    assert!((a - expected).abs() < 1e-15);
    assert!((a - 0.4788).abs() < 1e-4);
    assert_eq!(rab(&refs, 3, &lex, Variant::Bool, &opts).unwrap(), 0.0);
    assert!((arab(&refs, 3, &lex, Variant::Bool, &opts).unwrap() - (1.0 + 0.0 + 0.0) / 3.0).abs() < 1e-15);
}

#[test]
fn effectiveness_matches_direct_evaluation() {
    let mut rng = SplitMix64::new(31);
    for _ in 0..200 {
        let n = 1 + rng.below(25);
        let mut ids: Vec<String> = (0..n).map(|i| format!("d{i}")).collect();
        rng.shuffle(&mut ids);
        let mut judged: IndexMap<String, u32> = IndexMap::new();
        for id in &ids {
            if rng.bernoulli(0.6) {
                judged.insert(id.clone(), rng.below(4) as u32);
            }
        }
        let ranked: Vec<&str> = ids.iter().map(String::as_str).collect();
        let grades: HashMap<&str, u32> = judged.iter().map(|(d, &g)| (d.as_str(), g)).collect();
        let relevant: Vec<&str> = judged.iter().filter(|(_, &g)| g > 0).map(|(d, _)| d.as_str()).collect();
        for k in [1, 3, 10, 20] {
            assert_eq!(mrr_at_k(&ranked, Some(&judged), k), mrr_direct(&ranked, &relevant, k));
            let got = ndcg_at_k(&ranked, Some(&judged), k);
            assert!((got - ndcg_direct(&ranked, &grades, k)).abs() < 1e-12);
        }
    }
}

#[test]
fn report_averages_in_query_order() {
    let lex = GenderLexicon::default();
    let docs: HashMap<String, Vec<String>> = [("a", "she she"), ("b", "he"), ("c", "tree")]
        .iter()
        .map(|(id, t)| (id.to_string(), t.split_whitespace().map(str::to_string).collect()))
        .collect();
    let lists = vec![
        RankedList { query_id: "2".into(), entries: vec![("b".into(), 1.0), ("a".into(), 0.5)] },
        RankedList { query_id: "1".into(), entries: vec![("a".into(), 1.0), ("c".into(), 0.5)] },
    ];
    let report = bias_report(&lists, |d| docs.get(d).map(Vec::as_slice), &lex, &[1, 2], &Default::default()).unwrap();
    assert_eq!(report.queries, 2);
    let l2 = 2f64.ln();
    // Query 1 top-1 bias ln 2, query 2 top-1 bias 0.
    assert!((report.rows[0].rab_tf - l2 / 2.0).abs() < 1e-15);
    assert!((report.rows[0].rab_bool - 0.0).abs() < 1e-15);
    assert!((report.rows[1].rab_tf - (l2 / 2.0 + l2 / 2.0) / 2.0).abs() < 1e-15);

    let missing = vec![RankedList { query_id: "9".into(), entries: vec![("zz".into(), 1.0)] }];
    assert!(bias_report(&missing, |d| docs.get(d).map(Vec::as_slice), &lex, &[1], &Default::default()).is_err());

    let mut qrels = Qrels::new();
    qrels.insert("1", "a", 1);
    qrels.insert("2", "a", 1);
    let eff = evaluate_effectiveness(&lists, &qrels, &[10]);
    assert_eq!(eff[0].queries, 2);
    assert!((eff[0].mrr - 0.75).abs() < 1e-15);
}

proptest! {
    #[test]
    fn metrics_stay_in_range(grades in prop::collection::vec(0u32..3, 1..30), k in 1usize..40) {
        let ranked: Vec<String> = (0..grades.len()).map(|i| format!("d{i}")).collect();
        let judged: IndexMap<String, u32> = ranked.iter().cloned().zip(grades.iter().copied()).collect();
        let m = mrr_at_k(&ranked, Some(&judged), k);
        let n = ndcg_at_k(&ranked, Some(&judged), k);
        prop_assert!((0.0..=1.0).contains(&m));
        prop_assert!((0.0..=1.0 + 1e-12).contains(&n));
    }

    #[test]
    fn bool_bias_is_bounded(seed in any::<u64>(), t in 1usize..20) {
        let mut rng = SplitMix64::new(seed);
        let docs: Vec<Vec<String>> = (0..15).map(|_| random_doc(&mut rng)).collect();
        let refs = slices(&docs);
        let lex = GenderLexicon::default();
        let r = rab(&refs, t, &lex, Variant::Bool, &Default::default()).unwrap();
        let a = arab(&refs, t, &lex, Variant::Bool, &Default::default()).unwrap();
        prop_assert!((-1.0..=1.0).contains(&r) && (-1.0..=1.0).contains(&a));
    }
}
