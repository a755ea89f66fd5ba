//! Knowledge-base triples: loading, deduplication, relation remapping and
//! the test-pair filtering protocol.
//!
//! A triple file is UTF-8 TSV, one `head\trelation\ttail` per line. Triples
//! are stored with dense vocabulary ids and deduplicated. The no-relation
//! label is rejected here: it exists only for mention corpora.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{RelexError, Result};
use crate::ingest::mentions::NA_LABEL;
use crate::ingest::vocab::Vocabulary;

/// One knowledge-base fact, as vocabulary ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub head: usize,
    pub relation: usize,
    pub tail: usize,
}

/// Deduplicated set of triples plus the vocabulary sizes needed to sample
/// corruptions over all entities and relations.
#[derive(Debug, Clone)]
pub struct TripleStore {
    triples: Vec<Triple>,
    set: HashSet<Triple>,
    pair_index: HashMap<(usize, usize), Vec<usize>>,
    n_entities: usize,
    n_relations: usize,
}

impl TripleStore {
    pub fn new(n_entities: usize, n_relations: usize) -> Self {
        TripleStore {
            triples: Vec::new(),
            set: HashSet::new(),
            pair_index: HashMap::new(),
            n_entities,
            n_relations,
        }
    }

    pub fn from_triples(
        triples: impl IntoIterator<Item = Triple>,
        n_entities: usize,
        n_relations: usize,
    ) -> Result<Self> {
        let mut store = TripleStore::new(n_entities, n_relations);
        for t in triples {
            store.insert(t)?;
        }
        Ok(store)
    }

    /// Inserts a triple; duplicates are silently ignored.
    pub fn insert(&mut self, t: Triple) -> Result<()> {
        if t.head >= self.n_entities || t.tail >= self.n_entities {
            return Err(RelexError::InvalidArgument(format!(
                "entity id out of range in triple {t:?} (entities: {})",
                self.n_entities
            )));
        }
        if t.relation >= self.n_relations {
            return Err(RelexError::InvalidArgument(format!(
                "relation id out of range in triple {t:?} (relations: {})",
                self.n_relations
            )));
        }
        if self.set.insert(t) {
            self.pair_index
                .entry((t.head, t.tail))
                .or_default()
                .push(self.triples.len());
            self.triples.push(t);
        }
        Ok(())
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.set.contains(t)
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn triples_for_pair(&self, head: usize, tail: usize) -> impl Iterator<Item = &Triple> {
        self.pair_index
            .get(&(head, tail))
            .into_iter()
            .flatten()
            .map(|&i| &self.triples[i])
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn n_entities(&self) -> usize {
        self.n_entities
    }

    pub fn n_relations(&self) -> usize {
        self.n_relations
    }
}

/// Whether unseen tokens extend a vocabulary or are an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VocabPolicy {
    /// New tokens get fresh ids at the end of the vocabulary.
    Extend,
    /// New tokens are rejected with the offending line number.
    Validate,
}

fn resolve_token(
    token: &str,
    vocab: &mut Vocabulary,
    policy: VocabPolicy,
    path: &Path,
    line_no: usize,
) -> Result<usize> {
    match policy {
        VocabPolicy::Extend => Ok(vocab.get_or_insert(token)),
        VocabPolicy::Validate => vocab.id(token).ok_or_else(|| RelexError::UnknownToken {
            token: token.to_string(),
            path: path.to_path_buf(),
            line: line_no,
        }),
    }
}

/// Loads a triple file against the given vocabularies. With
/// [`VocabPolicy::Extend`] the vocabularies grow as new tokens appear, in
/// file order; with [`VocabPolicy::Validate`] unknown tokens are errors.
pub fn load_triples(
    path: &Path,
    entity_vocab: &mut Vocabulary,
    relation_vocab: &mut Vocabulary,
    policy: VocabPolicy,
) -> Result<TripleStore> {
    let file = File::open(path).map_err(|e| RelexError::io(path, e))?;
    let mut parsed = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| RelexError::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let (head, relation, tail) = match (fields.next(), fields.next(), fields.next()) {
            (Some(h), Some(r), Some(t)) if fields.next().is_none() => (h, r, t),
            _ => {
                return Err(RelexError::parse(
                    path,
                    line_no,
                    "expected `head\\trelation\\ttail`",
                ))
            }
        };
        if head.is_empty() || relation.is_empty() || tail.is_empty() {
            return Err(RelexError::parse(path, line_no, "empty field"));
        }
        if relation == NA_LABEL {
            return Err(RelexError::parse(
                path,
                line_no,
                "the NA label cannot appear in a knowledge-base triple",
            ));
        }
        let h = resolve_token(head, entity_vocab, policy, path, line_no)?;
        let r = resolve_token(relation, relation_vocab, policy, path, line_no)?;
        let t = resolve_token(tail, entity_vocab, policy, path, line_no)?;
        parsed.push(Triple {
            head: h,
            relation: r,
            tail: t,
        });
    }
    TripleStore::from_triples(parsed, entity_vocab.len(), relation_vocab.len())
}

/// Writes triples as TSV tokens, in store order.
pub fn save_triples(
    path: &Path,
    store: &TripleStore,
    entity_vocab: &Vocabulary,
    relation_vocab: &Vocabulary,
) -> Result<()> {
    let file = File::create(path).map_err(|e| RelexError::io(path, e))?;
    let mut out = BufWriter::new(file);
    for t in store.triples() {
        writeln!(
            out,
            "{}\t{}\t{}",
            entity_vocab.token(t.head),
            relation_vocab.token(t.relation),
            entity_vocab.token(t.tail)
        )
        .map_err(|e| RelexError::io(path, e))?;
    }
    out.flush().map_err(|e| RelexError::io(path, e))
}

/// Reads `old_token\tnew_token` lines; a repeated old token is an error
/// because the mapping must be a function.
pub fn load_relation_mapping(path: &Path) -> Result<HashMap<String, String>> {
    let file = File::open(path).map_err(|e| RelexError::io(path, e))?;
    let mut mapping = HashMap::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| RelexError::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let (old, new) = line.split_once('\t').ok_or_else(|| {
            RelexError::parse(path, line_no, "expected `old_token\\tnew_token`")
        })?;
        if old.is_empty() || new.is_empty() {
            return Err(RelexError::parse(path, line_no, "empty field"));
        }
        if mapping.insert(old.to_string(), new.to_string()).is_some() {
            return Err(RelexError::parse(
                path,
                line_no,
                format!("old token {old:?} mapped twice"),
            ));
        }
    }
    Ok(mapping)
}

/// Reads `head_token\ttail_token` lines.
pub fn load_test_pairs(path: &Path) -> Result<Vec<(String, String)>> {
    let file = File::open(path).map_err(|e| RelexError::io(path, e))?;
    let mut pairs = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| RelexError::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let (head, tail) = line.split_once('\t').ok_or_else(|| {
            RelexError::parse(path, idx + 1, "expected `head_token\\ttail_token`")
        })?;
        if head.is_empty() || tail.is_empty() {
            return Err(RelexError::parse(path, idx + 1, "empty field"));
        }
        pairs.push((head.to_string(), tail.to_string()));
    }
    Ok(pairs)
}

/// Rewrites relation tokens of a store through `mapping`, merging ids where
/// the mapping makes tokens collide and deduplicating the resulting triples.
/// Returns the rewritten store together with its new relation vocabulary.
pub fn remap_relations(
    store: &TripleStore,
    relation_vocab: &Vocabulary,
    mapping: &HashMap<String, String>,
) -> Result<(TripleStore, Vocabulary)> {
    let mut new_vocab = Vocabulary::new();
    let mut id_map = Vec::with_capacity(relation_vocab.len());
    for token in relation_vocab.tokens() {
        let target = mapping.get(token).map(String::as_str).unwrap_or(token);
        id_map.push(new_vocab.get_or_insert(target));
    }
    let mut out = TripleStore::new(store.n_entities(), new_vocab.len());
    for t in store.triples() {
        out.insert(Triple {
            head: t.head,
            relation: id_map[t.relation],
            tail: t.tail,
        })?;
    }
    Ok((out, new_vocab))
}

/// Removes every triple whose entity pair appears in `pairs` in either
/// orientation, regardless of the relationship. Pairs naming entities
/// outside the vocabulary cannot match and are skipped.
pub fn filter_kb_by_test_pairs(
    store: &TripleStore,
    pairs: &[(String, String)],
    entity_vocab: &Vocabulary,
) -> Result<TripleStore> {
    let mut banned: HashSet<(usize, usize)> = HashSet::new();
    for (head, tail) in pairs {
        if let (Some(h), Some(t)) = (entity_vocab.id(head), entity_vocab.id(tail)) {
            banned.insert((h, t));
            banned.insert((t, h));
        }
    }
    let kept = store
        .triples()
        .iter()
        .copied()
        .filter(|t| !banned.contains(&(t.head, t.tail)));
    TripleStore::from_triples(kept, store.n_entities(), store.n_relations())
}
