//! Symbol tables mapping tokens to contiguous ids.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{RelexError, Result};
use crate::ingest::mentions::{RawMention, NA_LABEL};

/// Bidirectional token <-> id table. Ids are dense and start at 0.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    token_to_id: HashMap<String, usize>,
    id_to_token: Vec<String>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Vocabulary::default()
    }

    /// Builds a vocabulary from tokens in order; duplicates are an error.
    pub fn from_tokens(tokens: impl IntoIterator<Item = String>) -> Result<Self> {
        let mut v = Vocabulary::new();
        for token in tokens {
            if v.token_to_id.contains_key(&token) {
                return Err(RelexError::InvalidArgument(format!(
                    "duplicate vocabulary token {token:?}"
                )));
            }
            v.push(token);
        }
        Ok(v)
    }

    /// Returns the id of `token`, inserting it at the end if absent.
    pub fn get_or_insert(&mut self, token: &str) -> usize {
        if let Some(&id) = self.token_to_id.get(token) {
            return id;
        }
        let id = self.id_to_token.len();
        self.push(token.to_string());
        id
    }

    fn push(&mut self, token: String) {
        self.token_to_id
            .insert(token.clone(), self.id_to_token.len());
        self.id_to_token.push(token);
    }

    pub fn id(&self, token: &str) -> Option<usize> {
        self.token_to_id.get(token).copied()
    }

    pub fn token(&self, id: usize) -> &str {
        &self.id_to_token[id]
    }

    pub fn len(&self) -> usize {
        self.id_to_token.len()
    }

    pub fn is_empty(&self) -> bool {
        self.id_to_token.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.id_to_token
    }

    pub fn contains(&self, token: &str) -> bool {
        self.token_to_id.contains_key(token)
    }
}

/// Selects the most frequent feature tokens across `mentions` and assigns
/// ids in order of decreasing mention count. A feature occurring several
/// times inside one mention is counted once. Ties break lexicographically
/// by token, and at most `max_features` tokens are kept.
pub fn build_feature_vocabulary(mentions: &[RawMention], max_features: usize) -> Vocabulary {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    let mut seen_in_mention: Vec<&str> = Vec::new();
    for mention in mentions {
        seen_in_mention.clear();
        seen_in_mention.extend(mention.features.iter().map(String::as_str));
        seen_in_mention.sort_unstable();
        seen_in_mention.dedup();
        for feat in &seen_in_mention {
            *counts.entry(feat).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<(&str, u64)> = counts.into_iter().collect();
    ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.truncate(max_features);

    let mut vocab = Vocabulary::new();
    for (token, _) in ranked {
        vocab.push(token.to_string());
    }
    vocab
}

/// Assigns relationship ids by first appearance in `mentions` and appends
/// the artificial no-relation label if it never occurred, so that it is
/// always trainable and predictable.
pub fn build_relation_vocabulary(mentions: &[RawMention]) -> Vocabulary {
    let mut vocab = Vocabulary::new();
    for mention in mentions {
        vocab.get_or_insert(&mention.label);
    }
    if !vocab.contains(NA_LABEL) {
        vocab.push(NA_LABEL.to_string());
    }
    vocab
}

/// Writes one token per line, in id order.
pub fn save_vocab(path: &Path, vocab: &Vocabulary) -> Result<()> {
    let file = File::create(path).map_err(|e| RelexError::io(path, e))?;
    let mut out = BufWriter::new(file);
    for token in vocab.tokens() {
        writeln!(out, "{token}").map_err(|e| RelexError::io(path, e))?;
    }
    out.flush().map_err(|e| RelexError::io(path, e))
}

/// Reads a vocabulary written by [`save_vocab`]; line number = id.
pub fn load_vocab(path: &Path) -> Result<Vocabulary> {
    let file = File::open(path).map_err(|e| RelexError::io(path, e))?;
    let mut vocab = Vocabulary::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let token = line.map_err(|e| RelexError::io(path, e))?;
        if token.is_empty() {
            continue;
        }
        if vocab.contains(&token) {
            return Err(RelexError::parse(
                path,
                idx + 1,
                format!("duplicate vocabulary token {token:?}"),
            ));
        }
        vocab.push(token);
    }
    Ok(vocab)
}
