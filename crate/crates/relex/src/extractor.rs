//! Turning per-mention scores into ranked relation extractions.
//!
//! All test mentions of an ordered entity pair are pooled; the predicted
//! relationship for the pair is the argmax — over the full vocabulary, the
//! no-relation label included — of the SUM of per-mention scores. Pairs
//! predicted no-relation are omitted. In fused mode the aggregate mention
//! score gains the binary calibrated KB score of the predicted fact, so
//! predictions the KB corroborates rank above equally-scored ones it does
//! not.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::embedding::dot;
use crate::error::{RelexError, Result};
use crate::ingest::mentions::MentionRecord;
use crate::ingest::triples::Triple;
use crate::kbembed::{CalibrationDirection, KBModel};
use crate::mention2rel::{argmax_lowest, M2RModel};

/// One extraction candidate: a scored (head, relationship, tail) fact.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredExtraction {
    pub head: String,
    pub tail: String,
    /// Relationship token; never the no-relation label.
    pub relation: String,
    pub score: f64,
    /// Number of test mentions of this pair that contributed to the score.
    pub num_mentions: usize,
}

/// Whether extraction scores use mentions alone or add the calibrated KB
/// signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FusionMode {
    MentionOnly,
    MentionPlusKb,
}

/// Extraction-time options; `threshold` and `direction` configure the
/// calibrated KB score and are ignored in mention-only mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractOptions {
    pub fusion: FusionMode,
    pub threshold: usize,
    pub direction: CalibrationDirection,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            fusion: FusionMode::MentionOnly,
            threshold: 10,
            direction: CalibrationDirection::TopRank,
        }
    }
}

/// Partitions mentions by ordered (head, tail) pair, preserving input order
/// within each pair. The map is ordered for deterministic iteration.
pub fn group_mentions(
    mentions: &[MentionRecord],
) -> BTreeMap<(&str, &str), Vec<&MentionRecord>> {
    let mut groups: BTreeMap<(&str, &str), Vec<&MentionRecord>> = BTreeMap::new();
    for m in mentions {
        groups
            .entry((m.head.as_str(), m.tail.as_str()))
            .or_default()
            .push(m);
    }
    groups
}

/// Predicts the relationship for one entity pair: the argmax, over all
/// relationships including no-relation, of the summed per-mention scores.
/// Returns the winning relationship id and its aggregate score; ties go to
/// the lowest id.
pub fn aggregate_predict(model: &M2RModel, mentions: &[&MentionRecord]) -> Result<(usize, f64)> {
    if mentions.is_empty() {
        return Err(RelexError::EmptyDataset("mentions of an entity pair"));
    }
    // Summing f(m) over mentions and taking one dot product per relationship
    // equals summing per-mention scores, since the score is linear in f(m).
    let mut pooled = vec![0.0; model.dim()];
    for m in mentions {
        let f = model.project(&m.features)?;
        for (p, v) in pooled.iter_mut().zip(&f) {
            *p += v;
        }
    }
    let scores: Vec<f64> = (0..model.n_relations())
        .map(|r| dot(&pooled, model.relations().row(r)))
        .collect();
    if scores.is_empty() {
        return Err(RelexError::EmptyDataset("relationship vocabulary"));
    }
    let best = argmax_lowest(&scores);
    Ok((best, scores[best]))
}

/// Adds the calibrated KB score of the predicted fact to the aggregate
/// mention score. Heads, tails or relationships unknown to the KB model
/// contribute 0 — an unknown fact is simply not corroborated. The
/// no-relation label is rejected: such pairs never reach fusion.
pub fn composite_score(
    kb: &KBModel,
    head: &str,
    relation: &str,
    tail: &str,
    mention_score: f64,
    threshold: usize,
    direction: CalibrationDirection,
) -> Result<f64> {
    if relation == crate::ingest::mentions::NA_LABEL {
        return Err(RelexError::InvalidArgument(
            "the no-relation label has no composite score".into(),
        ));
    }
    let ids = (
        kb.entity_vocab().id(head),
        kb.relation_vocab().id(relation),
        kb.entity_vocab().id(tail),
    );
    let kb_term = match ids {
        (Some(h), Some(r), Some(t)) => {
            kb.calibrated_score(&Triple { head: h, relation: r, tail: t }, threshold, direction)?
        }
        _ => 0.0,
    };
    Ok(mention_score + kb_term)
}

/// Sorts extractions by score descending; ties break lexicographically by
/// (head, relation, tail).
pub fn sort_extractions(extractions: &mut [ScoredExtraction]) {
    extractions.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.head.cmp(&b.head))
            .then_with(|| a.relation.cmp(&b.relation))
            .then_with(|| a.tail.cmp(&b.tail))
    });
}

/// Runs extraction over a set of test mentions: one candidate per entity
/// pair whose aggregate argmax is a real relationship, scored per the fusion
/// mode, sorted by score descending with deterministic tie-breaks.
///
/// `kb` may be `None` only in mention-only mode.
pub fn extract_all(
    m2r: &M2RModel,
    kb: Option<&KBModel>,
    mentions: &[MentionRecord],
    options: &ExtractOptions,
) -> Result<Vec<ScoredExtraction>> {
    if options.fusion == FusionMode::MentionPlusKb && kb.is_none() {
        return Err(RelexError::InvalidArgument(
            "fused extraction requires a KB model".into(),
        ));
    }
    let na = m2r.na_id();
    let mut extractions = Vec::new();
    for ((head, tail), group) in group_mentions(mentions) {
        let (relation_id, mention_score) = aggregate_predict(m2r, &group)?;
        if Some(relation_id) == na {
            continue;
        }
        let relation = m2r.relation_vocab().token(relation_id).to_string();
        let score = match options.fusion {
            FusionMode::MentionOnly => mention_score,
            FusionMode::MentionPlusKb => composite_score(
                kb.unwrap(),
                head,
                &relation,
                tail,
                mention_score,
                options.threshold,
                options.direction,
            )?,
        };
        extractions.push(ScoredExtraction {
            head: head.to_string(),
            tail: tail.to_string(),
            relation,
            score,
            num_mentions: group.len(),
        });
    }
    sort_extractions(&mut extractions);
    Ok(extractions)
}

/// Writes extractions as TSV `head\trelation\ttail\tscore\tnum_mentions`,
/// in list order. Scores use shortest round-trip formatting, so a
/// save/load cycle reproduces them exactly.
pub fn save_extractions(path: &Path, extractions: &[ScoredExtraction]) -> Result<()> {
    let file = File::create(path).map_err(|e| RelexError::io(path, e))?;
    let mut out = BufWriter::new(file);
    for e in extractions {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            e.head, e.relation, e.tail, e.score, e.num_mentions
        )
        .map_err(|err| RelexError::io(path, err))?;
    }
    out.flush().map_err(|e| RelexError::io(path, e))
}

/// Reads a file written by [`save_extractions`].
pub fn load_extractions(path: &Path) -> Result<Vec<ScoredExtraction>> {
    let file = File::open(path).map_err(|e| RelexError::io(path, e))?;
    let mut extractions = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| RelexError::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 5 {
            return Err(RelexError::parse(
                path,
                line_no,
                "expected `head\\trelation\\ttail\\tscore\\tnum_mentions`",
            ));
        }
        let score: f64 = fields[3].parse().map_err(|_| {
            RelexError::parse(path, line_no, format!("invalid score {:?}", fields[3]))
        })?;
        let num_mentions: usize = fields[4].parse().map_err(|_| {
            RelexError::parse(
                path,
                line_no,
                format!("invalid mention count {:?}", fields[4]),
            )
        })?;
        extractions.push(ScoredExtraction {
            head: fields[0].to_string(),
            relation: fields[1].to_string(),
            tail: fields[2].to_string(),
            score,
            num_mentions,
        });
    }
    Ok(extractions)
}
