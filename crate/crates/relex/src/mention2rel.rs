//! The mention→relationship scorer: a bilinear model scoring how well a
//! mention's summed feature embeddings align with a relationship embedding,
//! trained with a margin ranking loss under unit-norm constraints.
//!
//! For a mention m with binary feature vector Φ(m), the score of
//! relationship r is `f(m)·r` where `f(m)` sums the rows of the feature
//! embedding matrix W selected by Φ(m). Training samples, per positive
//! `(m, r)`, one negative relationship (and in cross-mention mode a negative
//! mention) and applies an SGD step on
//!
//! ```text
//! max(0, margin − S(m, r) + S(m', r'))
//! ```
//!
//! After every violating step the touched rows of W and the relationship
//! matrix are projected back onto the unit ball, keeping every row norm ≤ 1.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{EpochStats, ModelConfig};
use crate::embedding::{dot, sparse_project, EmbeddingMatrix, SparseVector};
use crate::error::{RelexError, Result};
use crate::ingest::mentions::{MentionRecord, RawMention, NA_LABEL};
use crate::ingest::vocab::Vocabulary;
use crate::model_io::{load_model, save_model, MatrixKind};

/// File suffix for the feature embedding matrix of a saved model.
pub const FEATURES_SUFFIX: &str = "features";
/// File suffix for the relationship embedding matrix of a saved model.
pub const RELATIONS_SUFFIX: &str = "relations";

/// Which ranking constraints to sample during training.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintMode {
    /// The negative reuses the positive's mention: rank the true
    /// relationship above others for the same mention.
    PerMention,
    /// The negative draws its own mention, so scores are comparable across
    /// mentions — the calibration needed for aggregate ranking.
    CrossMention,
}

/// Training options beyond the numeric hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct M2RTrainOptions {
    pub mode: ConstraintMode,
    /// In cross-mention mode, probability of reusing the positive's mention
    /// for the negative instead of sampling an independent one.
    pub same_mention_negative_prob: f64,
}

impl Default for M2RTrainOptions {
    fn default() -> Self {
        M2RTrainOptions {
            mode: ConstraintMode::CrossMention,
            same_mention_negative_prob: 0.0,
        }
    }
}

/// A trained mention→relationship model: embeddings plus the vocabularies
/// that give row indices their meaning.
#[derive(Debug, Clone)]
pub struct M2RModel {
    feature_vocab: Vocabulary,
    relation_vocab: Vocabulary,
    weights: EmbeddingMatrix,
    relations: EmbeddingMatrix,
}

/// Identifies one embedding row of an [`M2RModel`] for gradient bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum M2RParam {
    /// Row of the feature matrix W.
    Weight(usize),
    /// Row of the relationship matrix.
    Relation(usize),
}

impl M2RModel {
    /// Assembles a model from parts, validating shape agreement.
    pub fn new(
        feature_vocab: Vocabulary,
        relation_vocab: Vocabulary,
        weights: EmbeddingMatrix,
        relations: EmbeddingMatrix,
    ) -> Result<Self> {
        if weights.dim() != relations.dim() {
            return Err(RelexError::DimensionMismatch {
                expected: weights.dim(),
                got: relations.dim(),
            });
        }
        if weights.rows() != feature_vocab.len() {
            return Err(RelexError::DimensionMismatch {
                expected: feature_vocab.len(),
                got: weights.rows(),
            });
        }
        if relations.rows() != relation_vocab.len() {
            return Err(RelexError::DimensionMismatch {
                expected: relation_vocab.len(),
                got: relations.rows(),
            });
        }
        Ok(M2RModel {
            feature_vocab,
            relation_vocab,
            weights,
            relations,
        })
    }

    pub fn dim(&self) -> usize {
        self.weights.dim()
    }

    pub fn n_features(&self) -> usize {
        self.weights.rows()
    }

    pub fn n_relations(&self) -> usize {
        self.relations.rows()
    }

    pub fn feature_vocab(&self) -> &Vocabulary {
        &self.feature_vocab
    }

    pub fn relation_vocab(&self) -> &Vocabulary {
        &self.relation_vocab
    }

    pub fn weights(&self) -> &EmbeddingMatrix {
        &self.weights
    }

    pub fn relations(&self) -> &EmbeddingMatrix {
        &self.relations
    }

    /// Mutable access for experiments that perturb parameters directly
    /// (e.g. finite-difference checks).
    pub fn weights_mut(&mut self) -> &mut EmbeddingMatrix {
        &mut self.weights
    }

    pub fn relations_mut(&mut self) -> &mut EmbeddingMatrix {
        &mut self.relations
    }

    /// Id of the no-relation label, if the vocabulary has one.
    pub fn na_id(&self) -> Option<usize> {
        self.relation_vocab.id(NA_LABEL)
    }

    /// Encodes a raw mention against this model's vocabularies.
    pub fn encode(&self, raw: &RawMention) -> Result<MentionRecord> {
        crate::ingest::mentions::encode_mention(raw, &self.feature_vocab, &self.relation_vocab)
    }

    /// Computes f(m): the summed feature embeddings of the mention.
    pub fn project(&self, mention: &SparseVector) -> Result<Vec<f64>> {
        sparse_project(mention, &self.weights)
    }

    /// Scores one relationship for a mention: `f(m)·r`.
    pub fn score(&self, mention: &SparseVector, relation: usize) -> Result<f64> {
        Ok(self.score_projected(&self.project(mention)?, relation)?)
    }

    /// Scores one relationship given a precomputed f(m).
    pub fn score_projected(&self, projected: &[f64], relation: usize) -> Result<f64> {
        if relation >= self.n_relations() {
            return Err(RelexError::InvalidArgument(format!(
                "relation id {relation} out of range ({} relationships)",
                self.n_relations()
            )));
        }
        if projected.len() != self.dim() {
            return Err(RelexError::DimensionMismatch {
                expected: self.dim(),
                got: projected.len(),
            });
        }
        Ok(dot(projected, self.relations.row(relation)))
    }

    /// Scores every relationship (no-relation included) for a mention.
    pub fn scores(&self, mention: &SparseVector) -> Result<Vec<f64>> {
        let f = self.project(mention)?;
        Ok((0..self.n_relations())
            .map(|r| dot(&f, self.relations.row(r)))
            .collect())
    }

    /// The highest-scoring relationship for a mention; ties go to the
    /// lowest id.
    pub fn predict(&self, mention: &SparseVector) -> Result<usize> {
        let scores = self.scores(mention)?;
        if scores.is_empty() {
            return Err(RelexError::EmptyDataset("relationship vocabulary"));
        }
        Ok(argmax_lowest(&scores))
    }

    /// Writes `<prefix>.features` and `<prefix>.relations`.
    pub fn save(&self, prefix: &Path) -> Result<()> {
        save_model(
            &with_suffix(prefix, FEATURES_SUFFIX),
            MatrixKind::Features,
            &self.weights,
            self.feature_vocab.tokens(),
        )?;
        save_model(
            &with_suffix(prefix, RELATIONS_SUFFIX),
            MatrixKind::Relationships,
            &self.relations,
            self.relation_vocab.tokens(),
        )
    }

    /// Loads a model saved by [`M2RModel::save`].
    pub fn load(prefix: &Path) -> Result<Self> {
        let features = load_model(&with_suffix(prefix, FEATURES_SUFFIX))?;
        let relations = load_model(&with_suffix(prefix, RELATIONS_SUFFIX))?;
        expect_kind(&features, MatrixKind::Features)?;
        expect_kind(&relations, MatrixKind::Relationships)?;
        M2RModel::new(
            Vocabulary::from_tokens(features.symbols)?,
            Vocabulary::from_tokens(relations.symbols)?,
            features.matrix,
            relations.matrix,
        )
    }
}

pub(crate) fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{}.{suffix}", prefix.display()))
}

pub(crate) fn expect_kind(
    persisted: &crate::model_io::PersistedMatrix,
    expected: MatrixKind,
) -> Result<()> {
    if persisted.kind != expected {
        return Err(RelexError::InvalidArgument(format!(
            "expected a matrix of kind {}, found {}",
            expected, persisted.kind
        )));
    }
    Ok(())
}

/// Index of the maximum score; equal scores resolve to the lowest index.
pub(crate) fn argmax_lowest(scores: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..scores.len() {
        if scores[i].total_cmp(&scores[best]) == std::cmp::Ordering::Greater {
            best = i;
        }
    }
    best
}

/// Margin ranking loss of one sampled constraint:
/// `max(0, margin − S(m_pos, r_pos) + S(m_neg, r_neg))`.
pub fn hinge_loss_m2r(
    model: &M2RModel,
    positive: (&SparseVector, usize),
    negative: (&SparseVector, usize),
    margin: f64,
) -> Result<f64> {
    let s_pos = model.score(positive.0, positive.1)?;
    let s_neg = model.score(negative.0, negative.1)?;
    Ok((margin - s_pos + s_neg).max(0.0))
}

/// Gradients of the hinge at the current parameters, keyed by touched row.
/// Empty when the margin is satisfied (the kink resolves to the zero
/// branch). Rows appearing on both sides accumulate their contributions.
pub fn hinge_grads_m2r(
    model: &M2RModel,
    positive: (&SparseVector, usize),
    negative: (&SparseVector, usize),
    margin: f64,
) -> Result<BTreeMap<M2RParam, Vec<f64>>> {
    let mut grads: BTreeMap<M2RParam, Vec<f64>> = BTreeMap::new();
    if hinge_loss_m2r(model, positive, negative, margin)? <= 0.0 {
        return Ok(grads);
    }
    let k = model.dim();
    let f_pos = model.project(positive.0)?;
    let f_neg = model.project(negative.0)?;

    // ∂loss/∂r_pos = −f(m_pos), ∂loss/∂r_neg = +f(m_neg)
    for (slot, value) in [(positive.1, -1.0), (negative.1, 1.0)] {
        let g = grads
            .entry(M2RParam::Relation(slot))
            .or_insert_with(|| vec![0.0; k]);
        let f = if value < 0.0 { &f_pos } else { &f_neg };
        for d in 0..k {
            g[d] += value * f[d];
        }
    }
    // ∂loss/∂W_u = −r_pos for u ∈ Φ(m_pos), +r_neg for u ∈ Φ(m_neg).
    for (mention, relation, sign) in [
        (positive.0, positive.1, -1.0),
        (negative.0, negative.1, 1.0),
    ] {
        let r = model.relations.row(relation).to_vec();
        for &u in mention.indices() {
            let g = grads
                .entry(M2RParam::Weight(u))
                .or_insert_with(|| vec![0.0; k]);
            for d in 0..k {
                g[d] += sign * r[d];
            }
        }
    }
    Ok(grads)
}

/// One SGD step on a sampled ranking constraint. Returns the hinge loss at
/// the pre-step parameters. A violated margin updates the two relationship
/// rows and every W row of either mention, then projects each touched row
/// back onto the unit ball; a satisfied margin changes nothing.
pub fn sgd_step_m2r(
    model: &mut M2RModel,
    positive: (&SparseVector, usize),
    negative: (&SparseVector, usize),
    margin: f64,
    learning_rate: f64,
) -> Result<f64> {
    if positive.1 == negative.1 {
        return Err(RelexError::InvalidArgument(
            "the negative relationship must differ from the positive".into(),
        ));
    }
    let loss = hinge_loss_m2r(model, positive, negative, margin)?;
    if loss <= 0.0 {
        return Ok(loss);
    }
    let grads = hinge_grads_m2r(model, positive, negative, margin)?;
    for (param, grad) in &grads {
        let row = match *param {
            M2RParam::Weight(u) => model.weights.row_mut(u),
            M2RParam::Relation(r) => model.relations.row_mut(r),
        };
        for (x, g) in row.iter_mut().zip(grad) {
            *x -= learning_rate * g;
        }
        match *param {
            M2RParam::Weight(u) => model.weights.project_row(u),
            M2RParam::Relation(r) => model.relations.project_row(r),
        }
    }
    Ok(loss)
}

/// Trains a mention→relationship model by SGD over the records. Each epoch
/// shuffles the mentions, samples one negative relationship (and, in
/// cross-mention mode, one negative mention) per positive, and reports the
/// mean hinge and the number of margin violations.
pub fn train_m2r(
    records: &[MentionRecord],
    feature_vocab: Vocabulary,
    relation_vocab: Vocabulary,
    config: &ModelConfig,
    options: &M2RTrainOptions,
) -> Result<(M2RModel, Vec<EpochStats>)> {
    config.validate()?;
    if records.is_empty() {
        return Err(RelexError::EmptyDataset("mention records"));
    }
    let n_relations = relation_vocab.len();
    if n_relations < 2 {
        return Err(RelexError::InvalidArgument(
            "need at least 2 relationships to sample ranking negatives".into(),
        ));
    }
    if !(0.0..=1.0).contains(&options.same_mention_negative_prob) {
        return Err(RelexError::InvalidArgument(format!(
            "same-mention negative probability {} outside [0, 1]",
            options.same_mention_negative_prob
        )));
    }
    for record in records {
        if record.label >= n_relations {
            return Err(RelexError::InvalidArgument(format!(
                "mention {:?} has label id {} outside the relationship vocabulary",
                record.id, record.label
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let weights = EmbeddingMatrix::init_uniform(feature_vocab.len(), config.dim, &mut rng);
    let relations = EmbeddingMatrix::init_uniform(n_relations, config.dim, &mut rng);
    let mut model = M2RModel::new(feature_vocab, relation_vocab, weights, relations)?;

    let mut order: Vec<usize> = (0..records.len()).collect();
    let mut stats = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut hinge_sum = 0.0;
        let mut violations = 0usize;
        for (step, &idx) in order.iter().enumerate() {
            let positive = &records[idx];
            let mut r_neg = rng.random_range(0..n_relations - 1);
            if r_neg >= positive.label {
                r_neg += 1;
            }
            let neg_idx = match options.mode {
                ConstraintMode::PerMention => idx,
                ConstraintMode::CrossMention => {
                    if options.same_mention_negative_prob > 0.0
                        && rng.random::<f64>() < options.same_mention_negative_prob
                    {
                        idx
                    } else {
                        rng.random_range(0..records.len())
                    }
                }
            };
            let negative = &records[neg_idx];
            let loss = sgd_step_m2r(
                &mut model,
                (&positive.features, positive.label),
                (&negative.features, r_neg),
                config.margin,
                config.learning_rate,
            )?;
            if !loss.is_finite() {
                return Err(RelexError::NonFiniteLoss { epoch, step });
            }
            hinge_sum += loss;
            if loss > 0.0 {
                violations += 1;
            }
        }
        stats.push(EpochStats {
            epoch,
            mean_hinge: hinge_sum / records.len() as f64,
            violations,
        });
    }
    Ok((model, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::vocab::Vocabulary;

    fn vocab(tokens: &[&str]) -> Vocabulary {
        Vocabulary::from_tokens(tokens.iter().map(|s| s.to_string())).unwrap()
    }

    /// 2-feature, 2-relation model with hand-set embeddings.
    fn toy_model(w: Vec<f64>, r: Vec<f64>) -> M2RModel {
        M2RModel::new(
            vocab(&["w0", "w1"]),
            vocab(&["r0", "r1"]),
            EmbeddingMatrix::from_data(2, 2, w).unwrap(),
            EmbeddingMatrix::from_data(2, 2, r).unwrap(),
        )
        .unwrap()
    }

    fn record(id: &str, label: usize, features: &[usize]) -> MentionRecord {
        MentionRecord {
            id: id.into(),
            head: "h".into(),
            tail: "t".into(),
            label,
            features: SparseVector::new(features.to_vec()),
        }
    }

    #[test]
    fn empty_mention_scores_zero() {
        let m = toy_model(vec![1.0, 0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0, 1.0]);
        assert_eq!(m.score(&SparseVector::empty(), 0).unwrap(), 0.0);
        assert_eq!(m.score(&SparseVector::empty(), 1).unwrap(), 0.0);
    }

    #[test]
    fn aligned_unit_vectors_score_one() {
        // W row 0 = r0 = e_x: one-hot mention of w0 scores u·u = 1.
        let m = toy_model(vec![1.0, 0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0, 1.0]);
        let phi = SparseVector::new(vec![0]);
        assert_eq!(m.score(&phi, 0).unwrap(), 1.0);
        // Orthogonal relationship embedding scores 0.
        assert_eq!(m.score(&phi, 1).unwrap(), 0.0);
    }

    #[test]
    fn score_rejects_bad_relation_id() {
        let m = toy_model(vec![1.0, 0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0, 1.0]);
        assert!(m.score(&SparseVector::empty(), 2).is_err());
    }

    #[test]
    fn satisfied_margin_changes_nothing() {
        // S(pos) = 2 pre-projection is impossible under unit norms, so use
        // S(pos) = 1, S(neg) = -1: 1 - 1 + (-1) < 0, margin satisfied.
        let mut m = toy_model(vec![1.0, 0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0, -1.0]);
        let before = m.clone();
        let phi = SparseVector::new(vec![0]);
        let psi = SparseVector::new(vec![1]);
        let loss = sgd_step_m2r(&mut m, (&phi, 0), (&psi, 1), 1.0, 0.5).unwrap();
        assert_eq!(loss, 0.0);
        assert_eq!(m.weights().data(), before.weights().data());
        assert_eq!(m.relations().data(), before.relations().data());
    }

    #[test]
    fn zero_scores_yield_unit_loss_and_an_update() {
        let mut m = toy_model(vec![0.0; 4], vec![0.0; 4]);
        let phi = SparseVector::new(vec![0]);
        let loss = sgd_step_m2r(&mut m, (&phi, 0), (&phi, 1), 1.0, 0.5).unwrap();
        assert_eq!(loss, 1.0);
        // W row 0 moved by -lr * (-r0 + r1) = 0 here (both relations zero),
        // but the relation rows moved by ∓lr·f(m) = ∓0.5·W_0 = 0 too; with
        // all-zero parameters the gradient is zero although the loss is 1.
        // Use nonzero parameters to see an actual movement:
        let mut m = toy_model(vec![0.6, 0.0, 0.0, 0.6], vec![0.0, 0.6, 0.6, 0.0]);
        let before = m.clone();
        let loss = sgd_step_m2r(&mut m, (&phi, 0), (&phi, 1), 1.0, 0.5).unwrap();
        assert!(loss > 0.0);
        assert_ne!(m.relations().data(), before.relations().data());
    }

    #[test]
    fn negative_relation_must_differ() {
        let mut m = toy_model(vec![0.0; 4], vec![0.0; 4]);
        let phi = SparseVector::new(vec![0]);
        assert!(sgd_step_m2r(&mut m, (&phi, 0), (&phi, 0), 1.0, 0.1).is_err());
    }

    #[test]
    fn gradients_match_finite_differences() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let k = 5;
        let h = 1e-5;
        let mut checked = 0;
        while checked < 20 {
            let w = EmbeddingMatrix::init_uniform(4, k, &mut rng);
            let r = EmbeddingMatrix::init_uniform(3, k, &mut rng);
            let model = M2RModel::new(
                vocab(&["a", "b", "c", "d"]),
                vocab(&["r0", "r1", "r2"]),
                w,
                r,
            )
            .unwrap();
            let phi = SparseVector::new(vec![0, 2]);
            let psi = SparseVector::new(vec![1, 2]);
            let pos = (&phi, 0usize);
            let neg = (&psi, 1usize);
            let margin = 1.0;
            // Stay on the active side, away from the kink, so the loss is
            // differentiable at this point.
            let loss = hinge_loss_m2r(&model, pos, neg, margin).unwrap();
            if loss <= 1e-3 {
                continue;
            }
            checked += 1;
            let grads = hinge_grads_m2r(&model, pos, neg, margin).unwrap();
            for (param, grad) in &grads {
                for d in 0..k {
                    let mut plus = model.clone();
                    let mut minus = model.clone();
                    for (m, delta) in [(&mut plus, h), (&mut minus, -h)] {
                        let row = match *param {
                            M2RParam::Weight(u) => m.weights_mut().row_mut(u),
                            M2RParam::Relation(j) => m.relations_mut().row_mut(j),
                        };
                        row[d] += delta;
                    }
                    let fd = (hinge_loss_m2r(&plus, pos, neg, margin).unwrap()
                        - hinge_loss_m2r(&minus, pos, neg, margin).unwrap())
                        / (2.0 * h);
                    let denom = fd.abs().max(grad[d].abs()).max(1e-8);
                    assert!(
                        ((fd - grad[d]) / denom).abs() < 1e-4,
                        "{param:?}[{d}]: analytic {} vs fd {}",
                        grad[d],
                        fd
                    );
                }
            }
        }
    }

    #[test]
    fn training_keeps_rows_inside_the_unit_ball() {
        let records: Vec<MentionRecord> = (0..30)
            .map(|i| record(&format!("m{i}"), i % 3, &[i % 5, (i + 1) % 5]))
            .collect();
        let fv = vocab(&["f0", "f1", "f2", "f3", "f4"]);
        let rv = vocab(&["r0", "r1", "r2", "NA"]);
        let mut config = ModelConfig::m2r_defaults();
        config.dim = 4;
        config.epochs = 5;
        config.learning_rate = 0.5; // large steps stress the projection
        let (model, stats) =
            train_m2r(&records, fv, rv, &config, &M2RTrainOptions::default()).unwrap();
        assert!(model.weights().max_row_norm() <= 1.0 + 1e-9);
        assert!(model.relations().max_row_norm() <= 1.0 + 1e-9);
        assert_eq!(stats.len(), 5);
        assert!(stats.iter().all(|s| s.mean_hinge.is_finite()));
    }

    #[test]
    fn separable_toy_set_reaches_full_training_accuracy() {
        // Three labels, each with its own disjoint indicative feature.
        let records: Vec<MentionRecord> = (0..30)
            .map(|i| record(&format!("m{i}"), i % 3, &[i % 3]))
            .collect();
        let fv = vocab(&["f0", "f1", "f2"]);
        let rv = vocab(&["r0", "r1", "r2", "NA"]);
        let mut config = ModelConfig::m2r_defaults();
        config.dim = 10;
        config.epochs = 50;
        config.learning_rate = 0.1;
        let (model, _) =
            train_m2r(&records, fv, rv, &config, &M2RTrainOptions::default()).unwrap();
        for r in &records {
            assert_eq!(model.predict(&r.features).unwrap(), r.label);
        }
    }

    #[test]
    fn per_mention_mode_also_learns_the_toy_set() {
        let records: Vec<MentionRecord> = (0..30)
            .map(|i| record(&format!("m{i}"), i % 3, &[i % 3]))
            .collect();
        let fv = vocab(&["f0", "f1", "f2"]);
        let rv = vocab(&["r0", "r1", "r2", "NA"]);
        let mut config = ModelConfig::m2r_defaults();
        config.dim = 10;
        config.epochs = 50;
        config.learning_rate = 0.1;
        let options = M2RTrainOptions {
            mode: ConstraintMode::PerMention,
            ..M2RTrainOptions::default()
        };
        let (model, _) = train_m2r(&records, fv, rv, &config, &options).unwrap();
        for r in &records {
            assert_eq!(model.predict(&r.features).unwrap(), r.label);
        }
    }

    #[test]
    fn all_zero_weights_predict_the_lowest_id() {
        let m = toy_model(vec![0.0; 4], vec![0.0; 4]);
        let phi = SparseVector::new(vec![0, 1]);
        assert_eq!(m.predict(&phi).unwrap(), 0);
    }

    #[test]
    fn scoring_is_bilinear_in_the_feature_row() {
        // Pre-projection: doubling W row 0 doubles the score of a mention
        // containing only feature 0.
        let m = toy_model(vec![0.3, 0.1, 0.0, 1.0], vec![0.5, 0.2, 0.0, 1.0]);
        let phi = SparseVector::new(vec![0]);
        let base = m.score(&phi, 0).unwrap();
        let mut doubled = m.clone();
        for v in doubled.weights_mut().row_mut(0) {
            *v *= 2.0;
        }
        let twice = doubled.score(&phi, 0).unwrap();
        assert!((twice - 2.0 * base).abs() < 1e-12);
    }

    #[test]
    fn training_is_deterministic_given_the_seed() {
        let records: Vec<MentionRecord> = (0..20)
            .map(|i| record(&format!("m{i}"), i % 2, &[i % 4]))
            .collect();
        let fv = vocab(&["f0", "f1", "f2", "f3"]);
        let rv = vocab(&["r0", "r1", "NA"]);
        let mut config = ModelConfig::m2r_defaults();
        config.dim = 4;
        config.epochs = 3;
        let run = || {
            train_m2r(
                &records,
                fv.clone(),
                rv.clone(),
                &config,
                &M2RTrainOptions::default(),
            )
            .unwrap()
        };
        let (a, stats_a) = run();
        let (b, stats_b) = run();
        assert_eq!(a.weights().data(), b.weights().data());
        assert_eq!(a.relations().data(), b.relations().data());
        assert_eq!(stats_a, stats_b);
    }

    #[test]
    fn save_load_round_trip_preserves_predictions() {
        let records: Vec<MentionRecord> = (0..12)
            .map(|i| record(&format!("m{i}"), i % 2, &[i % 3]))
            .collect();
        let fv = vocab(&["f0", "f1", "f2"]);
        let rv = vocab(&["r0", "r1", "NA"]);
        let mut config = ModelConfig::m2r_defaults();
        config.dim = 4;
        config.epochs = 2;
        let (model, _) =
            train_m2r(&records, fv, rv, &config, &M2RTrainOptions::default()).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let prefix = dir.path().join("m2r");
        model.save(&prefix).unwrap();
        let loaded = M2RModel::load(&prefix).unwrap();
        assert_eq!(loaded.weights().data(), model.weights().data());
        assert_eq!(loaded.relations().data(), model.relations().data());
        assert_eq!(loaded.na_id(), model.na_id());
        for r in &records {
            assert_eq!(
                loaded.predict(&r.features).unwrap(),
                model.predict(&r.features).unwrap()
            );
        }
    }

    #[test]
    fn empty_dataset_is_rejected() {
        let config = ModelConfig::m2r_defaults();
        assert!(matches!(
            train_m2r(
                &[],
                vocab(&["f0"]),
                vocab(&["r0", "NA"]),
                &config,
                &M2RTrainOptions::default()
            ),
            Err(RelexError::EmptyDataset(_))
        ));
    }

    #[test]
    fn single_relation_vocabulary_is_rejected() {
        let records = vec![record("m0", 0, &[0])];
        let config = ModelConfig::m2r_defaults();
        assert!(train_m2r(
            &records,
            vocab(&["f0"]),
            vocab(&["r0"]),
            &config,
            &M2RTrainOptions::default()
        )
        .is_err());
    }
}
