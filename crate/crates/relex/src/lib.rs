//! Weakly supervised relation extraction with embedding models.
//!
//! The library scores candidate (head, relationship, tail) facts from two
//! signals and fuses them:
//!
//! * a mention scorer that embeds the sparse binary features of a text
//!   mention and ranks relationships by dot product, trained with a margin
//!   ranking loss under unit-norm constraints;
//! * a translation-based knowledge-base scorer that embeds entities and
//!   relationships so that `head + relationship ≈ tail` for true facts,
//!   whose output is calibrated into a binary top-rank indicator;
//! * an extractor that aggregates mention scores per entity pair, optionally
//!   adds the calibrated KB score, and emits ranked extractions evaluated by
//!   aggregate precision/recall curves.
//!
//! Everything is deterministic given a seed, and all model artifacts persist
//! to plain-text files that round-trip exactly.

pub mod config;
pub mod embedding;
pub mod error;
pub mod evaluation;
pub mod extractor;
pub mod ingest;
pub mod kbembed;
pub mod manifest;
pub mod mention2rel;
pub mod model_io;

pub use config::{EpochStats, ModelConfig};
pub use embedding::{project_to_unit_ball, sparse_project, EmbeddingMatrix, SparseVector};
pub use error::{RelexError, Result};
pub use evaluation::{
    area_under_pr, precision_at_recall, precision_recall_curve, save_curve, GoldSet, PrPoint,
};
pub use extractor::{
    aggregate_predict, composite_score, extract_all, group_mentions, sort_extractions,
    ExtractOptions, FusionMode, ScoredExtraction,
};
pub use ingest::mentions::{MentionRecord, RawMention, NA_LABEL};
pub use ingest::synth::{generate_planted_kb, generate_synthetic, SynthConfig, SynthDataset};
pub use ingest::triples::{Triple, TripleStore, VocabPolicy};
pub use ingest::vocab::Vocabulary;
pub use kbembed::{
    hinge_grads_kb, hinge_loss_kb, sample_corruption, sgd_step_kb, train_kb,
    CalibrationDirection, CorruptionMode, KBModel, KBParam, KBTrainOptions,
};
pub use manifest::{file_sha256, manifest_path, FileDigest, Manifest};
pub use mention2rel::{
    hinge_grads_m2r, hinge_loss_m2r, sgd_step_m2r, train_m2r, ConstraintMode, M2RModel,
    M2RParam, M2RTrainOptions,
};
pub use model_io::{load_model, save_model, MatrixKind, PersistedMatrix};
