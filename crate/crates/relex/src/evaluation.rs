//! Aggregate precision/recall evaluation of ranked extractions.
//!
//! Extractions are compared as whole (head, relationship, tail) facts
//! against a gold set. Walking the list in rank order, each prefix yields
//! one curve point: precision is the fraction of the prefix that is correct
//! and recall is the fraction of the gold set recovered so far. The area
//! under the curve, optionally restricted to a recall ceiling, condenses
//! the low-recall regime — where high-precision extraction matters — into
//! one number.

use std::collections::HashMap;
use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{RelexError, Result};
use crate::extractor::{sort_extractions, ScoredExtraction};
use crate::ingest::mentions::NA_LABEL;

/// The gold (head, relationship, tail) facts of a test split. Never
/// contains the no-relation label; duplicates collapse.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GoldSet {
    facts: HashSet<(String, String, String)>,
}

impl GoldSet {
    pub fn new() -> Self {
        GoldSet::default()
    }

    /// Adds one fact; returns whether it was new.
    pub fn insert(&mut self, head: &str, relation: &str, tail: &str) -> Result<bool> {
        if relation == NA_LABEL {
            return Err(RelexError::InvalidArgument(
                "the no-relation label cannot be a gold fact".into(),
            ));
        }
        Ok(self
            .facts
            .insert((head.to_string(), relation.to_string(), tail.to_string())))
    }

    pub fn from_facts<'a>(
        facts: impl IntoIterator<Item = (&'a str, &'a str, &'a str)>,
    ) -> Result<Self> {
        let mut gold = GoldSet::new();
        for (h, r, t) in facts {
            gold.insert(h, r, t)?;
        }
        Ok(gold)
    }

    /// Loads a TSV of `head\trelation\ttail` token facts.
    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| RelexError::io(path, e))?;
        let mut gold = GoldSet::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line_no = idx + 1;
            let line = line.map_err(|e| RelexError::io(path, e))?;
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 || fields.iter().any(|f| f.is_empty()) {
                return Err(RelexError::parse(
                    path,
                    line_no,
                    "expected `head\\trelation\\ttail`",
                ));
            }
            gold.insert(fields[0], fields[1], fields[2])
                .map_err(|_| {
                    RelexError::parse(
                        path,
                        line_no,
                        "the NA label cannot appear in a gold fact",
                    )
                })?;
        }
        Ok(gold)
    }

    /// Rewrites relation tokens through `mapping`; colliding facts merge.
    pub fn with_remapped_relations(&self, mapping: &HashMap<String, String>) -> Result<GoldSet> {
        let mut out = GoldSet::new();
        for (h, r, t) in &self.facts {
            let r = mapping.get(r).unwrap_or(r);
            out.insert(h, r, t)?;
        }
        Ok(out)
    }

    pub fn contains(&self, head: &str, relation: &str, tail: &str) -> bool {
        self.facts
            .contains(&(head.to_string(), relation.to_string(), tail.to_string()))
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }
}

/// One point of the aggregate precision/recall curve: the state after
/// admitting the extraction at `rank` (1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct PrPoint {
    pub rank: usize,
    pub recall: f64,
    pub precision: f64,
    /// Whether the extraction at this rank is a gold fact.
    pub correct: bool,
    pub head: String,
    pub relation: String,
    pub tail: String,
}

/// Computes the aggregate precision/recall curve: one point per rank of the
/// score-sorted extraction list. The input is re-sorted internally with the
/// deterministic tie rule, so callers need not pre-sort.
pub fn precision_recall_curve(
    extractions: &[ScoredExtraction],
    gold: &GoldSet,
) -> Result<Vec<PrPoint>> {
    if gold.is_empty() {
        return Err(RelexError::EmptyGold);
    }
    let mut ranked = extractions.to_vec();
    sort_extractions(&mut ranked);
    let mut correct_so_far = 0usize;
    let mut curve = Vec::with_capacity(ranked.len());
    for (i, e) in ranked.iter().enumerate() {
        let correct = gold.contains(&e.head, &e.relation, &e.tail);
        if correct {
            correct_so_far += 1;
        }
        curve.push(PrPoint {
            rank: i + 1,
            recall: correct_so_far as f64 / gold.len() as f64,
            precision: correct_so_far as f64 / (i + 1) as f64,
            correct,
            head: e.head.clone(),
            relation: e.relation.clone(),
            tail: e.tail.clone(),
        });
    }
    Ok(curve)
}

/// Trapezoidal area under the curve restricted to recall ≤ `ceiling`,
/// normalized by the ceiling so the result lies in [0, 1]. The polyline is
/// anchored at (0, first precision); if it crosses the ceiling, precision
/// is interpolated linearly at the crossing; if it ends short of the
/// ceiling, the uncovered recall contributes nothing. An empty curve has
/// area 0.
pub fn area_under_pr(curve: &[PrPoint], ceiling: f64) -> Result<f64> {
    if !(ceiling > 0.0 && ceiling <= 1.0) {
        return Err(RelexError::InvalidArgument(format!(
            "recall ceiling {ceiling} outside (0, 1]"
        )));
    }
    if curve.is_empty() {
        return Ok(0.0);
    }
    let mut points = Vec::with_capacity(curve.len() + 1);
    points.push((0.0, curve[0].precision));
    points.extend(curve.iter().map(|p| (p.recall, p.precision)));

    let mut area = 0.0;
    for w in points.windows(2) {
        let (r0, p0) = w[0];
        let (r1, p1) = w[1];
        if r1 <= ceiling {
            area += (r1 - r0) * (p0 + p1) / 2.0;
        } else if r0 < ceiling {
            let pc = p0 + (p1 - p0) * (ceiling - r0) / (r1 - r0);
            area += (ceiling - r0) * (p0 + pc) / 2.0;
            break;
        } else {
            break;
        }
    }
    Ok(area / ceiling)
}

/// Precision at the first rank whose recall reaches `target`; `None` if the
/// curve never gets there.
pub fn precision_at_recall(curve: &[PrPoint], target: f64) -> Option<f64> {
    curve
        .iter()
        .find(|p| p.recall >= target)
        .map(|p| p.precision)
}

/// Writes the curve as TSV `rank\trecall\tprecision\tcorrect\thead\trelation\ttail`
/// followed by a summary line with the areas at recall ceilings 0.1 and 1.0.
pub fn save_curve(path: &Path, curve: &[PrPoint]) -> Result<()> {
    let auc_01 = area_under_pr(curve, 0.1)?;
    let auc_10 = area_under_pr(curve, 1.0)?;
    let file = File::create(path).map_err(|e| RelexError::io(path, e))?;
    let mut out = BufWriter::new(file);
    for p in curve {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            p.rank,
            p.recall,
            p.precision,
            if p.correct { 1 } else { 0 },
            p.head,
            p.relation,
            p.tail
        )
        .map_err(|e| RelexError::io(path, e))?;
    }
    writeln!(out, "# auc@0.1={auc_01} auc@1.0={auc_10}")
        .map_err(|e| RelexError::io(path, e))?;
    out.flush().map_err(|e| RelexError::io(path, e))
}
