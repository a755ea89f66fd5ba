//! The translation-based knowledge-base scorer and its rank calibration.
//!
//! Entities and relationships embed into the same k-dimensional space and a
//! triple (h, r, t) is scored by how well the relationship translates the
//! head onto the tail:
//!
//! ```text
//! S(h, r, t) = −‖h + r − t‖²
//! ```
//!
//! Training ranks true triples above corruptions that replace one slot
//! (head, relationship or tail) with a uniformly sampled alternative, via
//! the same margin hinge and per-step unit-ball projection as the mention
//! model. Because raw scores of such a model are not comparable across
//! entity pairs, downstream fusion uses a calibrated binary signal instead:
//! whether the relationship ranks within the top `threshold` relationships
//! for the pair.

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{EpochStats, ModelConfig};
use crate::embedding::EmbeddingMatrix;
use crate::error::{RelexError, Result};
use crate::ingest::triples::{Triple, TripleStore};
use crate::ingest::vocab::Vocabulary;
use crate::mention2rel::{expect_kind, with_suffix};
use crate::model_io::{load_model, save_model, MatrixKind};

/// File suffix for the entity embedding matrix of a saved model.
pub const ENTITIES_SUFFIX: &str = "entities";
/// File suffix for the relationship embedding matrix of a saved model.
pub const KB_RELATIONS_SUFFIX: &str = "relations";

/// A trained translation model over a knowledge base.
#[derive(Debug, Clone)]
pub struct KBModel {
    entity_vocab: Vocabulary,
    relation_vocab: Vocabulary,
    entities: EmbeddingMatrix,
    relations: EmbeddingMatrix,
}

/// Identifies one embedding row of a [`KBModel`] for gradient bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum KBParam {
    Entity(usize),
    Relation(usize),
}

/// Which slot of a triple a corruption replaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorruptionMode {
    Head,
    Relation,
    Tail,
}

/// How the binary calibration reads the relationship ranking.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CalibrationDirection {
    /// Fire when fewer than `threshold` relationships strictly beat r —
    /// i.e. r sits in the top `threshold`. Ties never count against r.
    TopRank,
    /// Fire when r strictly beats fewer than `threshold` relationships —
    /// the indicator applied directly to the beats-count. Kept for
    /// comparison experiments.
    Literal,
}

impl KBModel {
    pub fn new(
        entity_vocab: Vocabulary,
        relation_vocab: Vocabulary,
        entities: EmbeddingMatrix,
        relations: EmbeddingMatrix,
    ) -> Result<Self> {
        if entities.dim() != relations.dim() {
            return Err(RelexError::DimensionMismatch {
                expected: entities.dim(),
                got: relations.dim(),
            });
        }
        if entities.rows() != entity_vocab.len() {
            return Err(RelexError::DimensionMismatch {
                expected: entity_vocab.len(),
                got: entities.rows(),
            });
        }
        if relations.rows() != relation_vocab.len() {
            return Err(RelexError::DimensionMismatch {
                expected: relation_vocab.len(),
                got: relations.rows(),
            });
        }
        Ok(KBModel {
            entity_vocab,
            relation_vocab,
            entities,
            relations,
        })
    }

    pub fn dim(&self) -> usize {
        self.entities.dim()
    }

    pub fn n_entities(&self) -> usize {
        self.entities.rows()
    }

    pub fn n_relations(&self) -> usize {
        self.relations.rows()
    }

    pub fn entity_vocab(&self) -> &Vocabulary {
        &self.entity_vocab
    }

    pub fn relation_vocab(&self) -> &Vocabulary {
        &self.relation_vocab
    }

    pub fn entities(&self) -> &EmbeddingMatrix {
        &self.entities
    }

    pub fn relations(&self) -> &EmbeddingMatrix {
        &self.relations
    }

    /// Mutable access for experiments that perturb parameters directly
    /// (e.g. finite-difference checks).
    pub fn entities_mut(&mut self) -> &mut EmbeddingMatrix {
        &mut self.entities
    }

    pub fn relations_mut(&mut self) -> &mut EmbeddingMatrix {
        &mut self.relations
    }

    fn check_ids(&self, triple: &Triple) -> Result<()> {
        if triple.head >= self.n_entities() || triple.tail >= self.n_entities() {
            return Err(RelexError::InvalidArgument(format!(
                "entity id out of range in {triple:?} ({} entities)",
                self.n_entities()
            )));
        }
        if triple.relation >= self.n_relations() {
            return Err(RelexError::InvalidArgument(format!(
                "relation id out of range in {triple:?} ({} relationships)",
                self.n_relations()
            )));
        }
        Ok(())
    }

    /// Plausibility of a triple: `−‖h + r − t‖²`, always ≤ 0 and equal to 0
    /// exactly when the relationship translates the head onto the tail.
    pub fn score(&self, triple: &Triple) -> Result<f64> {
        self.check_ids(triple)?;
        let h = self.entities.row(triple.head);
        let r = self.relations.row(triple.relation);
        let t = self.entities.row(triple.tail);
        let mut sq = 0.0;
        for d in 0..self.dim() {
            let diff = h[d] + r[d] - t[d];
            sq += diff * diff;
        }
        Ok(-sq)
    }

    /// Number of relationships r′ ≠ r that the triple's relationship
    /// strictly beats for the same entity pair. Range [0, n_r − 1];
    /// higher is better.
    pub fn rank_relation(&self, triple: &Triple) -> Result<usize> {
        let own = self.score(triple)?;
        let mut beats = 0;
        for r in 0..self.n_relations() {
            if r == triple.relation {
                continue;
            }
            let other = self.score(&Triple { relation: r, ..*triple })?;
            if own > other {
                beats += 1;
            }
        }
        Ok(beats)
    }

    /// Binary top-rank indicator. In the default [`CalibrationDirection::TopRank`]
    /// reading, computes the number of relationships strictly beating r
    /// (ties do not count against r) and fires iff that count is below
    /// `threshold` — r is within the top `threshold` relationships for the
    /// pair.
    pub fn calibrated_score(
        &self,
        triple: &Triple,
        threshold: usize,
        direction: CalibrationDirection,
    ) -> Result<f64> {
        if threshold == 0 {
            return Err(RelexError::InvalidArgument(
                "calibration threshold must be ≥ 1".into(),
            ));
        }
        let x = match direction {
            CalibrationDirection::TopRank => {
                let own = self.score(triple)?;
                let mut beaten_by = 0;
                for r in 0..self.n_relations() {
                    if r == triple.relation {
                        continue;
                    }
                    let other = self.score(&Triple { relation: r, ..*triple })?;
                    if other > own {
                        beaten_by += 1;
                    }
                }
                beaten_by
            }
            CalibrationDirection::Literal => self.rank_relation(triple)?,
        };
        Ok(if x < threshold { 1.0 } else { 0.0 })
    }

    /// Writes `<prefix>.entities` and `<prefix>.relations`.
    pub fn save(&self, prefix: &Path) -> Result<()> {
        save_model(
            &with_suffix(prefix, ENTITIES_SUFFIX),
            MatrixKind::Entities,
            &self.entities,
            self.entity_vocab.tokens(),
        )?;
        save_model(
            &with_suffix(prefix, KB_RELATIONS_SUFFIX),
            MatrixKind::Relationships,
            &self.relations,
            self.relation_vocab.tokens(),
        )
    }

    /// Loads a model saved by [`KBModel::save`].
    pub fn load(prefix: &Path) -> Result<Self> {
        let entities = load_model(&with_suffix(prefix, ENTITIES_SUFFIX))?;
        let relations = load_model(&with_suffix(prefix, KB_RELATIONS_SUFFIX))?;
        expect_kind(&entities, MatrixKind::Entities)?;
        expect_kind(&relations, MatrixKind::Relationships)?;
        KBModel::new(
            Vocabulary::from_tokens(entities.symbols)?,
            Vocabulary::from_tokens(relations.symbols)?,
            entities.matrix,
            relations.matrix,
        )
    }
}

/// Replaces the chosen slot with a uniformly sampled different id. The
/// sampled triple always differs from the original in that slot; it is not
/// checked against the store, so it may coincide with another true triple.
pub fn sample_corruption(
    store: &TripleStore,
    triple: &Triple,
    mode: CorruptionMode,
    rng: &mut impl Rng,
) -> Result<Triple> {
    let (size, original) = match mode {
        CorruptionMode::Head => (store.n_entities(), triple.head),
        CorruptionMode::Relation => (store.n_relations(), triple.relation),
        CorruptionMode::Tail => (store.n_entities(), triple.tail),
    };
    if size < 2 {
        return Err(RelexError::InvalidArgument(format!(
            "cannot corrupt {mode:?}: need at least 2 candidates, have {size}"
        )));
    }
    // Sample uniformly over the n−1 alternatives without rejection.
    let mut alt = rng.random_range(0..size - 1);
    if alt >= original {
        alt += 1;
    }
    Ok(match mode {
        CorruptionMode::Head => Triple { head: alt, ..*triple },
        CorruptionMode::Relation => Triple { relation: alt, ..*triple },
        CorruptionMode::Tail => Triple { tail: alt, ..*triple },
    })
}

/// Margin ranking loss of one (positive, corruption) pair:
/// `max(0, margin − S(pos) + S(neg))`.
pub fn hinge_loss_kb(
    model: &KBModel,
    positive: &Triple,
    negative: &Triple,
    margin: f64,
) -> Result<f64> {
    let s_pos = model.score(positive)?;
    let s_neg = model.score(negative)?;
    Ok((margin - s_pos + s_neg).max(0.0))
}

/// Gradients of the hinge at the current parameters, keyed by touched row.
/// Empty when the margin is satisfied. With d = h + r − t, the positive
/// triple contributes ∂loss/∂h = ∂loss/∂r = 2d and ∂loss/∂t = −2d; the
/// corruption contributes the opposite signs with its own d. Slots shared
/// between the two triples accumulate both contributions.
pub fn hinge_grads_kb(
    model: &KBModel,
    positive: &Triple,
    negative: &Triple,
    margin: f64,
) -> Result<BTreeMap<KBParam, Vec<f64>>> {
    let mut grads: BTreeMap<KBParam, Vec<f64>> = BTreeMap::new();
    if hinge_loss_kb(model, positive, negative, margin)? <= 0.0 {
        return Ok(grads);
    }
    let k = model.dim();
    let mut add = |param: KBParam, scale: f64, diff: &[f64]| {
        let g = grads.entry(param).or_insert_with(|| vec![0.0; k]);
        for d in 0..k {
            g[d] += scale * diff[d];
        }
    };
    for (triple, sign) in [(positive, 1.0), (negative, -1.0)] {
        let h = model.entities.row(triple.head);
        let r = model.relations.row(triple.relation);
        let t = model.entities.row(triple.tail);
        let diff: Vec<f64> = (0..k).map(|d| h[d] + r[d] - t[d]).collect();
        // −S = ‖d‖² enters the loss with `sign`; ∂‖d‖²/∂h = 2d etc.
        add(KBParam::Entity(triple.head), 2.0 * sign, &diff);
        add(KBParam::Relation(triple.relation), 2.0 * sign, &diff);
        add(KBParam::Entity(triple.tail), -2.0 * sign, &diff);
    }
    Ok(grads)
}

/// One SGD step on a (positive, corruption) pair. Returns the hinge loss at
/// the pre-step parameters; a violated margin updates and projects every
/// touched row.
pub fn sgd_step_kb(
    model: &mut KBModel,
    positive: &Triple,
    negative: &Triple,
    margin: f64,
    learning_rate: f64,
) -> Result<f64> {
    let loss = hinge_loss_kb(model, positive, negative, margin)?;
    if loss <= 0.0 {
        return Ok(loss);
    }
    let grads = hinge_grads_kb(model, positive, negative, margin)?;
    for (param, grad) in &grads {
        let row = match *param {
            KBParam::Entity(e) => model.entities.row_mut(e),
            KBParam::Relation(r) => model.relations.row_mut(r),
        };
        for (x, g) in row.iter_mut().zip(grad) {
            *x -= learning_rate * g;
        }
        match *param {
            KBParam::Entity(e) => model.entities.project_row(e),
            KBParam::Relation(r) => model.relations.project_row(r),
        }
    }
    Ok(loss)
}

/// Training options beyond the numeric hyperparameters.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KBTrainOptions {
    /// Stop after this many seconds, finishing the current epoch. The model
    /// trained so far is returned. `None` runs all configured epochs.
    pub max_seconds: Option<f64>,
}

/// Trains a translation model by SGD over the store. Each epoch shuffles
/// the triples; each positive draws one corruption with the slot chosen
/// uniformly among head, relationship and tail.
pub fn train_kb(
    store: &TripleStore,
    entity_vocab: Vocabulary,
    relation_vocab: Vocabulary,
    config: &ModelConfig,
    options: &KBTrainOptions,
) -> Result<(KBModel, Vec<EpochStats>)> {
    config.validate()?;
    if store.is_empty() {
        return Err(RelexError::EmptyDataset("knowledge-base triples"));
    }
    if entity_vocab.len() != store.n_entities() || relation_vocab.len() != store.n_relations() {
        return Err(RelexError::InvalidArgument(
            "vocabulary sizes disagree with the triple store".into(),
        ));
    }
    if store.n_entities() < 2 || store.n_relations() < 2 {
        return Err(RelexError::InvalidArgument(
            "need at least 2 entities and 2 relationships to sample corruptions".into(),
        ));
    }

    let started = std::time::Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let entities = EmbeddingMatrix::init_uniform(entity_vocab.len(), config.dim, &mut rng);
    let relations = EmbeddingMatrix::init_uniform(relation_vocab.len(), config.dim, &mut rng);
    let mut model = KBModel::new(entity_vocab, relation_vocab, entities, relations)?;

    let mut order: Vec<usize> = (0..store.len()).collect();
    let mut stats = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut hinge_sum = 0.0;
        let mut violations = 0usize;
        for (step, &idx) in order.iter().enumerate() {
            let positive = store.triples()[idx];
            let mode = match rng.random_range(0..3) {
                0 => CorruptionMode::Head,
                1 => CorruptionMode::Relation,
                _ => CorruptionMode::Tail,
            };
            let negative = sample_corruption(store, &positive, mode, &mut rng)?;
            let loss = sgd_step_kb(
                &mut model,
                &positive,
                &negative,
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
            mean_hinge: hinge_sum / store.len() as f64,
            violations,
        });
        if let Some(budget) = options.max_seconds {
            if started.elapsed().as_secs_f64() >= budget {
                break;
            }
        }
    }
    Ok((model, stats))
}
