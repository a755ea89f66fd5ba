//! Relation-mention corpora: parsing, encoding and label remapping.
//!
//! A mention file is UTF-8 TSV with one mention per line:
//!
//! ```text
//! mention_id\thead_token\ttail_token\tlabel\tfeat1 feat2 ...
//! ```
//!
//! The label is a relationship token or the literal `NA` when the sentence
//! expresses no relation between the pair. The feature column may be empty.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::embedding::SparseVector;
use crate::error::{RelexError, Result};
use crate::ingest::vocab::Vocabulary;

/// Distinguished "no relation" label. Trained like any other relationship
/// but never emitted as an extraction and never part of the KB vocabularies.
pub const NA_LABEL: &str = "NA";

/// A mention as parsed from disk, before vocabulary encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawMention {
    pub id: String,
    pub head: String,
    pub tail: String,
    pub label: String,
    pub features: Vec<String>,
}

/// A mention encoded against the feature and relationship vocabularies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MentionRecord {
    pub id: String,
    pub head: String,
    pub tail: String,
    /// Relationship id in the relationship vocabulary (NA included).
    pub label: usize,
    /// Sorted distinct in-vocabulary feature ids (binary representation).
    pub features: SparseVector,
}

/// Parses one mention line. `line_no` is 1-based and only used in errors.
pub fn parse_mention_line(line: &str, path: &Path, line_no: usize) -> Result<RawMention> {
    let mut fields = line.splitn(5, '\t');
    let id = fields.next().unwrap_or("");
    let (head, tail, label) = match (fields.next(), fields.next(), fields.next()) {
        (Some(h), Some(t), Some(l)) => (h, t, l),
        _ => {
            return Err(RelexError::parse(
                path,
                line_no,
                "expected `mention_id\\thead\\ttail\\tlabel[\\tfeatures]`",
            ))
        }
    };
    for (name, value) in [("mention_id", id), ("head", head), ("tail", tail), ("label", label)] {
        if value.is_empty() {
            return Err(RelexError::parse(path, line_no, format!("empty {name} field")));
        }
    }
    let features = fields
        .next()
        .map(|col| col.split(' ').filter(|f| !f.is_empty()).map(String::from).collect())
        .unwrap_or_default();
    Ok(RawMention {
        id: id.to_string(),
        head: head.to_string(),
        tail: tail.to_string(),
        label: label.to_string(),
        features,
    })
}

/// Loads a whole mention file; blank lines are skipped.
pub fn load_mentions(path: &Path) -> Result<Vec<RawMention>> {
    let file = File::open(path).map_err(|e| RelexError::io(path, e))?;
    let mut mentions = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| RelexError::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        mentions.push(parse_mention_line(&line, path, idx + 1)?);
    }
    Ok(mentions)
}

/// Writes mentions in the TSV layout accepted by [`load_mentions`].
pub fn save_mentions(path: &Path, mentions: &[RawMention]) -> Result<()> {
    let file = File::create(path).map_err(|e| RelexError::io(path, e))?;
    let mut out = BufWriter::new(file);
    for m in mentions {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            m.id,
            m.head,
            m.tail,
            m.label,
            m.features.join(" ")
        )
        .map_err(|e| RelexError::io(path, e))?;
    }
    out.flush().map_err(|e| RelexError::io(path, e))
}

/// Encodes a raw mention: out-of-vocabulary features are dropped, duplicates
/// collapse to a single index, and the label must be a known relationship.
pub fn encode_mention(
    raw: &RawMention,
    feature_vocab: &Vocabulary,
    relation_vocab: &Vocabulary,
) -> Result<MentionRecord> {
    let label = relation_vocab.id(&raw.label).ok_or_else(|| {
        RelexError::InvalidArgument(format!(
            "mention {:?} has label {:?} outside the relationship vocabulary",
            raw.id, raw.label
        ))
    })?;
    let indices: Vec<usize> = raw
        .features
        .iter()
        .filter_map(|f| feature_vocab.id(f))
        .collect();
    Ok(MentionRecord {
        id: raw.id.clone(),
        head: raw.head.clone(),
        tail: raw.tail.clone(),
        label,
        features: SparseVector::new(indices),
    })
}

/// Encodes every mention in `raws`; fails on the first unknown label.
pub fn encode_mentions(
    raws: &[RawMention],
    feature_vocab: &Vocabulary,
    relation_vocab: &Vocabulary,
) -> Result<Vec<MentionRecord>> {
    raws.iter()
        .map(|raw| encode_mention(raw, feature_vocab, relation_vocab))
        .collect()
}

/// Rewrites mention labels through `mapping`; labels not present in the
/// mapping pass through unchanged.
pub fn remap_mention_labels(mentions: &mut [RawMention], mapping: &HashMap<String, String>) {
    for m in mentions.iter_mut() {
        if let Some(new) = mapping.get(&m.label) {
            m.label = new.clone();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::vocab::Vocabulary;
    use std::path::PathBuf;

    fn p() -> PathBuf {
        PathBuf::from("mentions.tsv")
    }

    #[test]
    fn parses_full_line() {
        let m = parse_mention_line("m1\te_ford\te_detroit\t/business/company/founded\tw1 w2", &p(), 1)
            .unwrap();
        assert_eq!(m.id, "m1");
        assert_eq!(m.head, "e_ford");
        assert_eq!(m.tail, "e_detroit");
        assert_eq!(m.label, "/business/company/founded");
        assert_eq!(m.features, vec!["w1", "w2"]);
    }

    #[test]
    fn parses_line_without_features() {
        let m = parse_mention_line("m1\th\tt\tNA", &p(), 1).unwrap();
        assert_eq!(m.label, NA_LABEL);
        assert!(m.features.is_empty());
    }

    #[test]
    fn rejects_missing_fields_with_line_number() {
        match parse_mention_line("m1\thead_only", &p(), 7) {
            Err(RelexError::Parse { line, .. }) => assert_eq!(line, 7),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_mention_line("m1\t\tt\tr", &p(), 1).is_err());
    }

    #[test]
    fn encode_collapses_duplicates_and_drops_oov() {
        let fv = Vocabulary::from_tokens(["w1", "w2"].map(String::from)).unwrap();
        let rv = Vocabulary::from_tokens(["r1", "NA"].map(String::from)).unwrap();

        let raw = parse_mention_line("m1\th\tt\tr1\tw1 w2 w1", &p(), 1).unwrap();
        let rec = encode_mention(&raw, &fv, &rv).unwrap();
        assert_eq!(rec.features.indices(), &[0, 1]);
        assert_eq!(rec.label, 0);

        let raw = parse_mention_line("m2\th\tt\tNA\tw9", &p(), 2).unwrap();
        let rec = encode_mention(&raw, &fv, &rv).unwrap();
        assert!(rec.features.is_empty());
        assert_eq!(rec.label, 1);
    }

    #[test]
    fn encode_rejects_unknown_label() {
        let fv = Vocabulary::new();
        let rv = Vocabulary::from_tokens(["r1"].map(String::from)).unwrap();
        let raw = parse_mention_line("m1\th\tt\tr2", &p(), 1).unwrap();
        assert!(encode_mention(&raw, &fv, &rv).is_err());
    }

    #[test]
    fn mention_file_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mentions.tsv");
        let mentions = vec![
            parse_mention_line("m1\th\tt\tr1\tw1 w2", &p(), 1).unwrap(),
            parse_mention_line("m2\th2\tt2\tNA", &p(), 2).unwrap(),
        ];
        save_mentions(&path, &mentions).unwrap();
        assert_eq!(load_mentions(&path).unwrap(), mentions);
    }

    #[test]
    fn remap_rewrites_only_mapped_labels() {
        let mut mentions = vec![
            parse_mention_line("m1\th\tt\t/p/business/company/place_founded", &p(), 1).unwrap(),
            parse_mention_line("m2\th\tt\t/people/person/nationality", &p(), 2).unwrap(),
        ];
        let mapping: HashMap<String, String> = [(
            "/p/business/company/place_founded".to_string(),
            "/organization/organization/place_founded".to_string(),
        )]
        .into();
        remap_mention_labels(&mut mentions, &mapping);
        assert_eq!(mentions[0].label, "/organization/organization/place_founded");
        assert_eq!(mentions[1].label, "/people/person/nationality");
    }
}
