//! Acceptance suite: each test verifies one end-to-end guarantee of the
//! library at a stated tolerance and runtime bound, and prints a single
//! PASS line with the measured quantities (visible with `--nocapture`).

use std::collections::HashSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use relex::config::ModelConfig;
use relex::embedding::{EmbeddingMatrix, SparseVector};
use relex::evaluation::{
    area_under_pr, precision_at_recall, precision_recall_curve, GoldSet,
};
use relex::extractor::{extract_all, sort_extractions, ExtractOptions, FusionMode, ScoredExtraction};
use relex::ingest::mentions::{encode_mentions, NA_LABEL};
use relex::ingest::synth::{generate_planted_kb, generate_synthetic, SynthConfig};
use relex::ingest::triples::{filter_kb_by_test_pairs, Triple, TripleStore};
use relex::ingest::vocab::{
    build_feature_vocabulary, build_relation_vocabulary, Vocabulary,
};
use relex::kbembed::{
    hinge_grads_kb, hinge_loss_kb, train_kb, CalibrationDirection, KBModel, KBParam,
    KBTrainOptions,
};
use relex::mention2rel::{
    hinge_grads_m2r, hinge_loss_m2r, train_m2r, M2RModel, M2RParam, M2RTrainOptions,
};

fn assert_within(elapsed: Duration, bound_secs: u64, what: &str) {
    assert!(
        elapsed < Duration::from_secs(bound_secs),
        "{what} took {elapsed:.2?}, bound is {bound_secs}s"
    );
}

fn ids(n: usize, prefix: &str) -> Vocabulary {
    Vocabulary::from_tokens((0..n).map(|i| format!("{prefix}{i}"))).unwrap()
}

// ---------------------------------------------------------------------------
// 1. Analytic gradients of both ranking objectives match central finite
//    differences (h = 1e-5) to relative error < 1e-4 at 100 active,
//    non-kink sample points each.
// ---------------------------------------------------------------------------

fn max_rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1.0)
}

#[test]
fn gradients_match_finite_differences() {
    let start = Instant::now();
    let h = 1e-5;
    let margin = 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let mut worst: f64 = 0.0;

    // Mention scorer: the loss is piecewise linear in every parameter, so
    // away from the kink the central difference is exact up to rounding.
    let (n_f, n_r, k) = (30, 6, 5);
    let mut checked = 0;
    while checked < 100 {
        let weights = EmbeddingMatrix::init_uniform(n_f, k, &mut rng);
        let relations = EmbeddingMatrix::init_uniform(n_r, k, &mut rng);
        let model = M2RModel::new(ids(n_f, "f"), ids(n_r, "r"), weights, relations).unwrap();
        let mention = |rng: &mut ChaCha8Rng| {
            let len = rng.random_range(1..4);
            let mut idx: Vec<usize> = (0..n_f).collect();
            idx.shuffle(rng);
            SparseVector::new(idx[..len].to_vec())
        };
        let pos = (mention(&mut rng), rng.random_range(0..n_r));
        let neg_rel = (pos.1 + rng.random_range(1..n_r)) % n_r;
        let neg = (mention(&mut rng), neg_rel);
        let loss =
            hinge_loss_m2r(&model, (&pos.0, pos.1), (&neg.0, neg.1), margin).unwrap();
        if loss <= 1e-3 {
            continue; // inactive or too close to the kink
        }
        let grads =
            hinge_grads_m2r(&model, (&pos.0, pos.1), (&neg.0, neg.1), margin).unwrap();
        assert!(!grads.is_empty());
        for (param, grad) in &grads {
            for d in 0..k {
                let probe = |delta: f64| {
                    let mut m = model.clone();
                    match param {
                        M2RParam::Weight(i) => m.weights_mut().row_mut(*i)[d] += delta,
                        M2RParam::Relation(j) => m.relations_mut().row_mut(*j)[d] += delta,
                    }
                    hinge_loss_m2r(&m, (&pos.0, pos.1), (&neg.0, neg.1), margin).unwrap()
                };
                let numeric = (probe(h) - probe(-h)) / (2.0 * h);
                worst = worst.max(max_rel_err(grad[d], numeric));
            }
        }
        checked += 1;
    }

    // KB scorer: quadratic in every parameter; corruptions share two slots
    // with the positive, so accumulation across shared rows is exercised.
    let (n_e, n_r, k) = (8, 5, 5);
    let mut checked = 0;
    while checked < 100 {
        let entities = EmbeddingMatrix::init_uniform(n_e, k, &mut rng);
        let relations = EmbeddingMatrix::init_uniform(n_r, k, &mut rng);
        let model = KBModel::new(ids(n_e, "e"), ids(n_r, "r"), entities, relations).unwrap();
        let pos = Triple {
            head: rng.random_range(0..n_e),
            relation: rng.random_range(0..n_r),
            tail: rng.random_range(0..n_e),
        };
        let mut neg = pos;
        match rng.random_range(0..3) {
            0 => neg.head = (pos.head + rng.random_range(1..n_e)) % n_e,
            1 => neg.relation = (pos.relation + rng.random_range(1..n_r)) % n_r,
            _ => neg.tail = (pos.tail + rng.random_range(1..n_e)) % n_e,
        }
        let loss = hinge_loss_kb(&model, &pos, &neg, margin).unwrap();
        if loss <= 1e-3 {
            continue;
        }
        let grads = hinge_grads_kb(&model, &pos, &neg, margin).unwrap();
        assert!(!grads.is_empty());
        for (param, grad) in &grads {
            for d in 0..k {
                let probe = |delta: f64| {
                    let mut m = model.clone();
                    match param {
                        KBParam::Entity(i) => m.entities_mut().row_mut(*i)[d] += delta,
                        KBParam::Relation(j) => m.relations_mut().row_mut(*j)[d] += delta,
                    }
                    hinge_loss_kb(&m, &pos, &neg, margin).unwrap()
                };
                let numeric = (probe(h) - probe(-h)) / (2.0 * h);
                worst = worst.max(max_rel_err(grad[d], numeric));
            }
        }
        checked += 1;
    }

    assert!(worst < 1e-4, "max relative gradient error {worst:.3e}");
    assert_within(start.elapsed(), 10, "gradient checks");
    println!(
        "PASS gradients-match-finite-differences: max rel err {worst:.3e} over 2x100 points ({:.2?})",
        start.elapsed()
    );
}

// ---------------------------------------------------------------------------
// 2. After training, every embedding row of both models sits inside the
//    unit ball (norm ≤ 1 + 1e-9).
// ---------------------------------------------------------------------------

#[test]
fn training_respects_unit_norm_constraints() {
    let start = Instant::now();
    let data = generate_synthetic(&SynthConfig::new(40, 5, 150, 1500, 0.1, 5)).unwrap();
    let feature_vocab = build_feature_vocabulary(&data.train_mentions, 100_000);
    let relation_vocab = build_relation_vocabulary(&data.train_mentions);
    let records = encode_mentions(&data.train_mentions, &feature_vocab, &relation_vocab).unwrap();

    let mut config = ModelConfig::m2r_defaults();
    config.dim = 16;
    config.epochs = 5;
    config.seed = 5;
    let (m2r, _) = train_m2r(
        &records,
        feature_vocab,
        relation_vocab,
        &config,
        &M2RTrainOptions::default(),
    )
    .unwrap();
    let m2r_worst = m2r
        .weights()
        .max_row_norm()
        .max(m2r.relations().max_row_norm());

    let mut config = ModelConfig::kb_defaults();
    config.dim = 16;
    config.epochs = 5;
    config.seed = 5;
    let (kb, _) = train_kb(
        &data.kb,
        data.entity_vocab.clone(),
        data.kb_relation_vocab.clone(),
        &config,
        &KBTrainOptions::default(),
    )
    .unwrap();
    let kb_worst = kb
        .entities()
        .max_row_norm()
        .max(kb.relations().max_row_norm());

    let bound = 1.0 + 1e-9;
    assert!(m2r_worst <= bound, "mention model row norm {m2r_worst}");
    assert!(kb_worst <= bound, "KB model row norm {kb_worst}");
    assert_within(start.elapsed(), 30, "norm-constraint training");
    println!(
        "PASS training-respects-unit-norms: max norms {m2r_worst:.12} / {kb_worst:.12} ({:.2?})",
        start.elapsed()
    );
}

// ---------------------------------------------------------------------------
// 3. Trained on 90% of a 1000-triple knowledge base with planted structure
//    (100 entities, 10 relationships), the translation model puts the true
//    relationship of ≥ 90% of held-out triples in its top 2.
// ---------------------------------------------------------------------------

#[test]
fn kb_training_recovers_heldout_relationships() {
    let start = Instant::now();
    let (store, entity_vocab, relation_vocab) = generate_planted_kb(100, 10, 1000, 77).unwrap();
    let mut order: Vec<usize> = (0..store.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(78);
    order.shuffle(&mut rng);
    let n_test = store.len() / 10;
    let test: Vec<Triple> = order[..n_test].iter().map(|&i| store.triples()[i]).collect();
    let train: Vec<Triple> = order[n_test..].iter().map(|&i| store.triples()[i]).collect();
    let train_store =
        TripleStore::from_triples(train, store.n_entities(), store.n_relations()).unwrap();

    let config = ModelConfig {
        dim: 10,
        margin: 1.0,
        learning_rate: 0.1,
        epochs: 200,
        seed: 79,
        calibration_threshold: 10,
    };
    let (model, _) = train_kb(
        &train_store,
        entity_vocab,
        relation_vocab,
        &config,
        &KBTrainOptions::default(),
    )
    .unwrap();

    let mut hits = 0;
    for triple in &test {
        // Brute-force oracle: enumerate all relationship scores and count
        // how many strictly beat the true one.
        let own = model.score(triple).unwrap();
        let beaten_by = (0..train_store.n_relations())
            .filter(|&r| r != triple.relation)
            .filter(|&r| {
                model
                    .score(&Triple {
                        relation: r,
                        ..*triple
                    })
                    .unwrap()
                    > own
            })
            .count();
        let in_top_2 = beaten_by < 2;
        // The calibrated score must agree with the oracle at threshold 2.
        let calibrated = model
            .calibrated_score(triple, 2, CalibrationDirection::TopRank)
            .unwrap();
        assert_eq!(calibrated == 1.0, in_top_2);
        if in_top_2 {
            hits += 1;
        }
    }
    let accuracy = hits as f64 / test.len() as f64;
    assert!(
        accuracy >= 0.9,
        "top-2 accuracy {accuracy:.3} on {} held-out triples",
        test.len()
    );
    assert_within(start.elapsed(), 120, "KB recovery");
    println!(
        "PASS kb-recovers-heldout-relationships: top-2 accuracy {accuracy:.3} on {} triples ({:.2?})",
        test.len(),
        start.elapsed()
    );
}

// ---------------------------------------------------------------------------
// 4. Relationship ranks and calibrated scores agree exactly with an
//    independent enumeration on 1000 random models.
// ---------------------------------------------------------------------------

#[test]
fn rank_and_calibration_match_enumeration() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4004);
    for _ in 0..1000 {
        let k = rng.random_range(2..6);
        let n_e = rng.random_range(2..12);
        let n_r = rng.random_range(2..51);
        let entities = EmbeddingMatrix::init_uniform(n_e, k, &mut rng);
        let relations = EmbeddingMatrix::init_uniform(n_r, k, &mut rng);
        let model = KBModel::new(ids(n_e, "e"), ids(n_r, "r"), entities, relations).unwrap();
        let triple = Triple {
            head: rng.random_range(0..n_e),
            relation: rng.random_range(0..n_r),
            tail: rng.random_range(0..n_e),
        };
        let threshold = rng.random_range(1..=n_r);

        // Independent enumeration straight from the embedding rows.
        let local_score = |relation: usize| -> f64 {
            let h = model.entities().row(triple.head);
            let r = model.relations().row(relation);
            let t = model.entities().row(triple.tail);
            -(0..k).map(|d| (h[d] + r[d] - t[d]).powi(2)).sum::<f64>()
        };
        let own = local_score(triple.relation);
        let others = (0..n_r).filter(|&r| r != triple.relation);
        let beats = others.clone().filter(|&r| own > local_score(r)).count();
        let beaten_by = others.filter(|&r| local_score(r) > own).count();

        assert_eq!(model.rank_relation(&triple).unwrap(), beats);
        assert_eq!(
            model
                .calibrated_score(&triple, threshold, CalibrationDirection::TopRank)
                .unwrap(),
            if beaten_by < threshold { 1.0 } else { 0.0 }
        );
        assert_eq!(
            model
                .calibrated_score(&triple, threshold, CalibrationDirection::Literal)
                .unwrap(),
            if beats < threshold { 1.0 } else { 0.0 }
        );
    }
    assert_within(start.elapsed(), 30, "rank/calibration enumeration");
    println!(
        "PASS rank-and-calibration-match-enumeration: 1000 instances exact ({:.2?})",
        start.elapsed()
    );
}

// ---------------------------------------------------------------------------
// 5. End-to-end on synthetic data (20 relationships plus the no-relation
//    label, 500 features, 5000 mentions, 20% noisy), aggregate extraction
//    reaches precision ≥ 0.8 at recall 0.5.
// ---------------------------------------------------------------------------

/// Test-split mention labels play no part in scoring; fold any label the
/// training vocabulary lacks into the no-relation bucket before encoding.
fn encode_test_split(
    mut raws: Vec<relex::ingest::mentions::RawMention>,
    model: &M2RModel,
) -> Vec<relex::ingest::mentions::MentionRecord> {
    for m in raws.iter_mut() {
        if model.relation_vocab().id(&m.label).is_none() {
            m.label = NA_LABEL.to_string();
        }
    }
    encode_mentions(&raws, model.feature_vocab(), model.relation_vocab()).unwrap()
}

fn gold_set(facts: &[(String, String, String)]) -> GoldSet {
    GoldSet::from_facts(facts.iter().map(|(h, r, t)| (h.as_str(), r.as_str(), t.as_str())))
        .unwrap()
}

#[test]
fn pipeline_reaches_precision_at_recall_half() {
    let start = Instant::now();
    let data = generate_synthetic(&SynthConfig::new(80, 20, 500, 5000, 0.2, 11)).unwrap();
    let feature_vocab = build_feature_vocabulary(&data.train_mentions, 100_000);
    let relation_vocab = build_relation_vocabulary(&data.train_mentions);
    assert_eq!(relation_vocab.len(), 21, "20 relationships plus NA");
    let records = encode_mentions(&data.train_mentions, &feature_vocab, &relation_vocab).unwrap();

    let mut config = ModelConfig::m2r_defaults();
    config.seed = 11;
    let (model, _) = train_m2r(
        &records,
        feature_vocab,
        relation_vocab,
        &config,
        &M2RTrainOptions::default(),
    )
    .unwrap();

    let test_records = encode_test_split(data.test_mentions.clone(), &model);
    let extractions =
        extract_all(&model, None, &test_records, &ExtractOptions::default()).unwrap();
    let curve = precision_recall_curve(&extractions, &gold_set(&data.gold)).unwrap();
    let precision = precision_at_recall(&curve, 0.5)
        .expect("extraction never reached recall 0.5");
    assert!(precision >= 0.8, "precision {precision:.3} at recall 0.5");
    assert_within(start.elapsed(), 120, "end-to-end pipeline");
    println!(
        "PASS pipeline-precision-at-recall-half: precision {precision:.3} ({:.2?})",
        start.elapsed()
    );
}

// ---------------------------------------------------------------------------
// 6. With 40% mention noise and a KB corroborating 60% of the gold facts,
//    fusing the calibrated KB score lifts the area under the
//    precision/recall curve up to recall 0.1 by at least 0.05.
// ---------------------------------------------------------------------------

#[test]
fn kb_fusion_lifts_early_auc() {
    let start = Instant::now();
    let mut synth = SynthConfig::new(80, 20, 500, 5000, 0.4, 13);
    synth.kb_corroboration = 0.6;
    let data = generate_synthetic(&synth).unwrap();
    let feature_vocab = build_feature_vocabulary(&data.train_mentions, 100_000);
    let relation_vocab = build_relation_vocabulary(&data.train_mentions);
    let records = encode_mentions(&data.train_mentions, &feature_vocab, &relation_vocab).unwrap();

    let mut config = ModelConfig::m2r_defaults();
    config.seed = 13;
    let (m2r, _) = train_m2r(
        &records,
        feature_vocab,
        relation_vocab,
        &config,
        &M2RTrainOptions::default(),
    )
    .unwrap();

    let mut config = ModelConfig::kb_defaults();
    config.epochs = 50;
    config.seed = 13;
    let (kb, _) = train_kb(
        &data.kb,
        data.entity_vocab.clone(),
        data.kb_relation_vocab.clone(),
        &config,
        &KBTrainOptions::default(),
    )
    .unwrap();

    let test_records = encode_test_split(data.test_mentions.clone(), &m2r);
    let gold = gold_set(&data.gold);

    let plain =
        extract_all(&m2r, None, &test_records, &ExtractOptions::default()).unwrap();
    let auc_plain =
        area_under_pr(&precision_recall_curve(&plain, &gold).unwrap(), 0.1).unwrap();

    // Threshold 2 of 20 relationships keeps the indicator selective.
    let options = ExtractOptions {
        fusion: FusionMode::MentionPlusKb,
        threshold: 2,
        direction: CalibrationDirection::TopRank,
    };
    let fused = extract_all(&m2r, Some(&kb), &test_records, &options).unwrap();
    let auc_fused =
        area_under_pr(&precision_recall_curve(&fused, &gold).unwrap(), 0.1).unwrap();

    assert!(
        auc_fused >= auc_plain + 0.05,
        "fusion lift too small: {auc_fused:.3} vs {auc_plain:.3}"
    );
    assert_within(start.elapsed(), 180, "fusion comparison");
    println!(
        "PASS kb-fusion-lifts-early-auc: auc@0.1 {auc_fused:.3} fused vs {auc_plain:.3} plain ({:.2?})",
        start.elapsed()
    );
}

// ---------------------------------------------------------------------------
// 7. The precision/recall curve and its area match hand-computed values
//    and an independent oracle on 100 random instances.
// ---------------------------------------------------------------------------

#[test]
fn pr_curve_matches_hand_and_random_oracles() {
    let start = Instant::now();

    let extraction = |h: &str, r: &str, t: &str, score: f64| ScoredExtraction {
        head: h.into(),
        relation: r.into(),
        tail: t.into(),
        score,
        num_mentions: 1,
    };
    // Two gold facts; ranked list hits, misses, hits.
    let ranked = vec![
        extraction("a", "r", "b", 3.0),
        extraction("x", "r", "y", 2.0),
        extraction("c", "r", "d", 1.0),
    ];
    let gold = GoldSet::from_facts([("a", "r", "b"), ("c", "r", "d")]).unwrap();
    let curve = precision_recall_curve(&ranked, &gold).unwrap();
    let expected = [(0.5, 1.0), (0.5, 0.5), (1.0, 2.0 / 3.0)];
    for (point, (recall, precision)) in curve.iter().zip(expected) {
        assert!((point.recall - recall).abs() < 1e-12);
        assert!((point.precision - precision).abs() < 1e-12);
    }
    // Trapezoids under (0,1)→(0.5,1)→(0.5,0.5)→(1,2/3).
    let by_hand = 0.5 + 0.5 * (0.5 + 2.0 / 3.0) / 2.0;
    assert!((area_under_pr(&curve, 1.0).unwrap() - by_hand).abs() < 1e-12);
    assert!((area_under_pr(&curve, 0.1).unwrap() - 1.0).abs() < 1e-12);

    // Random instances against a second implementation.
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    for _ in 0..100 {
        let n = rng.random_range(1..40);
        let mut extractions = Vec::new();
        let mut gold = GoldSet::new();
        for _ in 0..n {
            let head = format!("h{}", rng.random_range(0..8));
            let tail = format!("t{}", rng.random_range(0..8));
            let relation = format!("r{}", rng.random_range(0..4));
            if rng.random::<f64>() < 0.5 {
                gold.insert(&head, &relation, &tail).unwrap();
            }
            extractions.push(extraction(&head, &relation, &tail, rng.random_range(-2.0..2.0)));
        }
        if gold.is_empty() {
            gold.insert("pad", "r0", "pad").unwrap();
        }
        let curve = precision_recall_curve(&extractions, &gold).unwrap();

        let mut ranked = extractions.clone();
        sort_extractions(&mut ranked);
        let mut correct = 0;
        for (i, e) in ranked.iter().enumerate() {
            if gold.contains(&e.head, &e.relation, &e.tail) {
                correct += 1;
            }
            assert!((curve[i].recall - correct as f64 / gold.len() as f64).abs() < 1e-12);
            assert!((curve[i].precision - correct as f64 / (i + 1) as f64).abs() < 1e-12);
        }

        // Trapezoid oracle for the area, including the ceiling crossing.
        let ceiling = rng.random_range(0.05..1.0);
        let mut pts = vec![(0.0, curve[0].precision)];
        pts.extend(curve.iter().map(|p| (p.recall, p.precision)));
        let mut oracle = 0.0;
        for w in pts.windows(2) {
            let ((r0, p0), (r1, p1)) = (w[0], w[1]);
            if r0 >= ceiling {
                break;
            }
            if r1 <= ceiling {
                oracle += (r1 - r0) * (p0 + p1) / 2.0;
            } else {
                let pc = p0 + (p1 - p0) * (ceiling - r0) / (r1 - r0);
                oracle += (ceiling - r0) * (p0 + pc) / 2.0;
            }
        }
        oracle /= ceiling;
        assert!((area_under_pr(&curve, ceiling).unwrap() - oracle).abs() < 1e-12);
    }
    assert_within(start.elapsed(), 5, "PR-curve oracle comparison");
    println!(
        "PASS pr-curve-matches-oracles: hand case exact, 100 random instances ({:.2?})",
        start.elapsed()
    );
}

// ---------------------------------------------------------------------------
// 8. Test-pair filtering removes exactly the triples touching a test pair,
//    in either orientation, on randomized stores.
// ---------------------------------------------------------------------------

#[test]
fn test_pair_filtering_is_complete() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    for _ in 0..200 {
        let n_e = rng.random_range(4..12);
        let n_r = rng.random_range(2..5);
        let vocab = ids(n_e, "e");
        let mut store = TripleStore::new(n_e, n_r);
        for _ in 0..40 {
            store
                .insert(Triple {
                    head: rng.random_range(0..n_e),
                    relation: rng.random_range(0..n_r),
                    tail: rng.random_range(0..n_e),
                })
                .unwrap();
        }
        let mut pairs = Vec::new();
        for _ in 0..rng.random_range(0..5) {
            pairs.push((
                format!("e{}", rng.random_range(0..n_e)),
                format!("e{}", rng.random_range(0..n_e)),
            ));
        }
        if rng.random::<f64>() < 0.3 {
            pairs.push(("unknown_entity".to_string(), "e0".to_string()));
        }

        let filtered = filter_kb_by_test_pairs(&store, &pairs, &vocab).unwrap();

        let mut banned: HashSet<(usize, usize)> = HashSet::new();
        for (h, t) in &pairs {
            if let (Some(h), Some(t)) = (vocab.id(h), vocab.id(t)) {
                banned.insert((h, t));
                banned.insert((t, h));
            }
        }
        let kept: HashSet<Triple> = filtered.triples().iter().copied().collect();
        for t in filtered.triples() {
            assert!(
                !banned.contains(&(t.head, t.tail)) && !banned.contains(&(t.tail, t.head)),
                "kept a banned triple {t:?}"
            );
        }
        for t in store.triples() {
            let touches = banned.contains(&(t.head, t.tail));
            assert_eq!(
                !kept.contains(t),
                touches,
                "triple {t:?} filtered incorrectly"
            );
        }
    }
    assert_within(start.elapsed(), 5, "filter brute force");
    println!(
        "PASS test-pair-filtering-complete: 200 randomized stores exact ({:.2?})",
        start.elapsed()
    );
}

// ---------------------------------------------------------------------------
// 9. The CLI pipeline is reproducible: two runs with the same seeds, in
//    different directories, write byte-identical extraction and curve files.
// ---------------------------------------------------------------------------

#[test]
fn cli_reruns_are_byte_identical() {
    let start = Instant::now();
    let run_pipeline = |dir: &Path| -> (Vec<u8>, Vec<u8>) {
        let s = |p: &Path| p.to_str().unwrap().to_string();
        let run = |args: &[&str]| {
            let out = Command::new(env!("CARGO_BIN_EXE_relex"))
                .args(args)
                .output()
                .unwrap();
            assert!(
                out.status.success(),
                "{args:?}: {}",
                String::from_utf8_lossy(&out.stderr)
            );
        };
        let data = dir.join("data");
        run(&[
            "gen-synth",
            "--entities",
            "40",
            "--relations",
            "4",
            "--features",
            "120",
            "--mentions",
            "1200",
            "--noise",
            "0.2",
            "--seed",
            "19",
            "--out-dir",
            &s(&data),
        ]);
        let m2r = dir.join("m2r");
        run(&[
            "train-m2r",
            "--mentions",
            &s(&data.join("train_mentions.tsv")),
            "--dim",
            "16",
            "--epochs",
            "5",
            "--seed",
            "23",
            "--out",
            &s(&m2r),
        ]);
        let kb = dir.join("kb");
        run(&[
            "train-kb",
            "--triples",
            &s(&data.join("kb.tsv")),
            "--dim",
            "16",
            "--epochs",
            "10",
            "--seed",
            "23",
            "--out",
            &s(&kb),
        ]);
        let ext = dir.join("ext.tsv");
        run(&[
            "extract",
            "--mentions",
            &s(&data.join("test_mentions.tsv")),
            "--m2r",
            &s(&m2r),
            "--kb",
            &s(&kb),
            "--fusion",
            "m2r+kb",
            "--calib-threshold",
            "2",
            "--out",
            &s(&ext),
        ]);
        let curve = dir.join("curve.tsv");
        run(&[
            "eval",
            "--extractions",
            &s(&ext),
            "--gold",
            &s(&data.join("gold.tsv")),
            "--out",
            &s(&curve),
        ]);
        (
            std::fs::read(&ext).unwrap(),
            std::fs::read(&curve).unwrap(),
        )
    };

    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let (ext_a, curve_a) = run_pipeline(dir_a.path());
    let (ext_b, curve_b) = run_pipeline(dir_b.path());
    assert_eq!(ext_a, ext_b, "extraction files differ between reruns");
    assert_eq!(curve_a, curve_b, "curve files differ between reruns");
    assert!(!ext_a.is_empty() && !curve_a.is_empty());
    assert_within(start.elapsed(), 60, "CLI reproduction");
    println!(
        "PASS cli-reruns-byte-identical: {} extraction bytes, {} curve bytes ({:.2?})",
        ext_a.len(),
        curve_a.len(),
        start.elapsed()
    );
}
