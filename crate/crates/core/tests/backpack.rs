mod common;

use backrank::backpack::{pack_pair, Backpack, BackpackConfig, Checkpoint, ContextWeights, Pooling};
use backrank::corpus::Vocab;
use backrank::numkernel::{SplitMix64, Tensor};
use backrank::senses::{build_sense_map, AttributeScores, SenseMap};
use backrank::{Backpack32, Error};
use common::{forward_triple_loop, random_tokens, small_model};
use proptest::prelude::*;

const V: usize = 20;

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn unit_weights_reproduce_forward_exactly() {
    let mut rng = SplitMix64::new(1);
    for seed in 0..40 {
        let model = small_model(seed, V, 8, 1 + rng.below(4), rng.bernoulli(0.5));
        let k = model.config().num_senses;
        let n = 1 + rng.below(10);
        let tokens = random_tokens(&mut rng, V, n);
        let plain = model.forward(&tokens).unwrap();
        let scores = AttributeScores::new((0..k).map(|_| rng.next_f64() - 0.5).collect()).unwrap();
        for map in [SenseMap::identity(k), build_sense_map(&scores, 1.0, k.min(2)).unwrap()] {
            assert_eq!(model.forward_reweighted(&tokens, &map).unwrap(), plain);
        }
    }
}

#[test]
fn forward_matches_triple_loop_for_tiny_configs() {
    let mut rng = SplitMix64::new(2);
    for d in 1..=4 {
        for k in 1..=2 {
            for n in 1..=3 {
                for rep in 0..10 {
                    let model = small_model(rep * 100 + (d * 10 + k) as u64, V, d, k, rep % 2 == 0);
                    let tokens = random_tokens(&mut rng, V, n);
                    let got = model.forward(&tokens).unwrap();
                    let want: Vec<f64> = forward_triple_loop(&model, &tokens, None).concat();
                    assert!(max_diff(got.data(), &want) < 1e-12, "d={d} k={k} n={n}");

                    let w: Vec<f64> = (0..k).map(|_| 0.1 + rng.next_f64()).collect();
                    let map = SenseMap::from_weights(w.clone()).unwrap();
                    let got = model.forward_reweighted(&tokens, &map).unwrap();
                    let want: Vec<f64> = forward_triple_loop(&model, &tokens, Some(&w)).concat();
                    assert!(max_diff(got.data(), &want) < 1e-12);
                }
            }
        }
    }
}

#[test]
fn causal_outputs_ignore_later_tokens() {
    let mut rng = SplitMix64::new(3);
    for seed in 0..20 {
        let model = small_model(seed, V, 8, 3, true);
        let mut tokens = random_tokens(&mut rng, V, 6);
        let before = model.forward(&tokens).unwrap();
        tokens[4] = 3 + (tokens[4] + 1 - 3) % (V - 3);
        tokens[5] = 3 + (tokens[5] + 5 - 3) % (V - 3);
        let after = model.forward(&tokens).unwrap();
        assert_eq!(&before.data()[..4 * 8], &after.data()[..4 * 8]);
    }
    // Bidirectional contextualization does look ahead.
    let model = small_model(0, V, 8, 3, false);
    let a = model.forward(&[3, 4, 5]).unwrap();
    let b = model.forward(&[3, 4, 9]).unwrap();
    assert_ne!(a.row(0), b.row(0));
}

#[test]
fn reweighting_is_linear_in_the_weights() {
    let mut rng = SplitMix64::new(4);
    let model = small_model(7, V, 8, 3, true);
    for _ in 0..20 {
        let tokens = random_tokens(&mut rng, V, 5);
        let a = SenseMap::from_weights((0..3).map(|_| 0.2 + rng.next_f64()).collect()).unwrap();
        let b = SenseMap::from_weights((0..3).map(|_| 0.2 + rng.next_f64()).collect()).unwrap();
        let ab = a.compose(&b).unwrap();
        let direct = model.forward_reweighted(&tokens, &ab).unwrap();
        let loops: Vec<f64> = forward_triple_loop(&model, &tokens, Some(ab.weights())).concat();
        assert!(max_diff(direct.data(), &loops) < 1e-12);

        let c = 0.3 + rng.next_f64();
        let scaled = model.forward_reweighted(&tokens, &SenseMap::from_weights(vec![c; 3]).unwrap()).unwrap();
        let plain = model.forward(&tokens).unwrap();
        let expect: Vec<f64> = plain.data().iter().map(|v| v * c).collect();
        assert!(max_diff(scaled.data(), &expect) < 1e-12);
    }
}

#[test]
fn external_weights_drive_the_aggregation() {
    let model = small_model(5, V, 4, 2, true);
    let tokens = [3, 7, 11];
    let alpha = model.contextualize(&tokens).unwrap();
    assert_eq!(model.forward_with_alpha(&tokens, &alpha, None).unwrap(), model.forward(&tokens).unwrap());

    // Attending only to the first token copies its senses into every row.
    let mut one_hot = Tensor::zeros(&[2, 3, 3]);
    for l in 0..2 {
        for i in 0..3 {
            one_hot.data_mut()[l * 9 + i * 3] = 1.0;
        }
    }
    let out = model.forward_with_alpha(&tokens, &ContextWeights::new(one_hot).unwrap(), None).unwrap();
    let c = model.sense_vectors(3).unwrap();
    for i in 0..3 {
        for e in 0..4 {
            assert!((out.get(&[i, e]) - (c.get(&[e, 0]) + c.get(&[e, 1]))).abs() < 1e-12);
        }
    }
    let wrong = ContextWeights::new(Tensor::zeros(&[2, 2, 2])).unwrap();
    assert!(matches!(model.forward_with_alpha(&tokens, &wrong, None), Err(Error::Shape(_))));
}

#[test]
fn maps_of_the_wrong_size_are_rejected() {
    let model = small_model(1, V, 4, 2, true);
    let map = SenseMap::identity(3);
    assert!(matches!(model.forward_reweighted(&[3, 4], &map), Err(Error::Domain(_))));
}

#[test]
fn scores_lie_in_the_unit_interval_and_pooling_matters() {
    let mut rng = SplitMix64::new(6);
    let mut config = BackpackConfig::toy(V);
    let mean = Backpack::<f64>::new(config.clone(), 3).unwrap();
    config.pooling = Pooling::Last;
    let last = Backpack::<f64>::new(config, 3).unwrap();
    for _ in 0..20 {
        let q = random_tokens(&mut rng, V, 3);
        let d = random_tokens(&mut rng, V, 10);
        let s = mean.relevance_score(&q, &d, None).unwrap();
        assert!(s > 0.0 && s < 1.0);
        let packed = pack_pair(&q, &d, 32);
        assert_ne!(mean.relevance_logit(&packed, None).unwrap(), last.relevance_logit(&packed, None).unwrap());
    }
}

#[test]
fn single_precision_tracks_double() {
    let model = small_model(9, V, 8, 3, true);
    let single: Backpack32 = model.cast();
    let tokens = [3, 4, 5, 6, 7];
    let a = model.forward(&tokens).unwrap();
    let b = single.forward(&tokens).unwrap();
    for (x, y) in a.data().iter().zip(b.data()) {
        assert!((x - *y as f64).abs() < 1e-4);
    }
    let p = single.lm_distribution(&tokens).unwrap();
    assert!((p.row(4).iter().sum::<f32>() - 1.0).abs() < 1e-5);
}

#[test]
fn checkpoints_reload_to_identical_scores() {
    let dir = tempfile::tempdir().unwrap();
    let vocab = Vocab::from_tokens((0..V - 3).map(|i| format!("w{i}")));
    let model = small_model(11, vocab.len(), 8, 4, true);
    let mut ckpt = Checkpoint::new(model, vocab).unwrap();
    ckpt.epochs_trained = 2;
    ckpt.loss_history = vec![2.0, 1.9637056647714954, 0.1 + 0.2];
    let path = dir.path().join("m.ckpt");
    ckpt.save(&path).unwrap();
    let back = Checkpoint::<f64>::load(&path).unwrap();
    assert_eq!(back.epochs_trained, 2);
    assert_eq!(back.loss_history, ckpt.loss_history);
    let mut rng = SplitMix64::new(12);
    for _ in 0..20 {
        let tokens = random_tokens(&mut rng, V, 8);
        let a = ckpt.model.relevance_logit(&tokens, None).unwrap();
        let b = back.model.relevance_logit(&tokens, None).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
    std::fs::write(&path, b"not a checkpoint").unwrap();
    assert!(matches!(Checkpoint::<f64>::load(&path), Err(Error::Checkpoint(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lm_rows_are_distributions(seed in 0u64..1000, n in 1usize..8) {
        let model = small_model(seed, V, 4, 2, true);
        let mut rng = SplitMix64::new(seed);
        let p = model.lm_distribution(&random_tokens(&mut rng, V, n)).unwrap();
        for i in 0..n {
            prop_assert!((p.row(i).iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(p.row(i).iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn alpha_rows_are_distributions(seed in 0u64..1000, n in 1usize..8, causal: bool) {
        let model = small_model(seed, V, 4, 3, causal);
        let mut rng = SplitMix64::new(seed);
        let a = model.contextualize(&random_tokens(&mut rng, V, n)).unwrap();
        for l in 0..3 {
            for i in 0..n {
                let s: f64 = (0..n).map(|j| a.get(l, i, j)).sum();
                prop_assert!((s - 1.0).abs() < 1e-12);
                prop_assert!((0..n).all(|j| a.get(l, i, j) >= 0.0));
            }
        }
    }
}
