//! Deterministic synthetic datasets for desk-scale experiments.
//!
//! The generator plants a translation-consistent structure: entities are
//! partitioned into groups and every relationship links one ordered group
//! pair, so each entity pair admits at most one true relationship and a
//! translation model can learn the structure. Each relationship also owns a
//! set of indicative feature tokens. Mentions of a related pair carry
//! indicative tokens of the true relationship, except that with probability
//! `noise` a mention instead carries indicative tokens of a fixed "confuser"
//! relationship for that pair — while keeping the weakly-supervised label of
//! the true relationship. No-relation pairs draw background tokens only
//! (plus a stray indicative token with probability `noise`).
//!
//! All randomness flows from one seeded generator, so equal configurations
//! produce byte-identical datasets.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{RelexError, Result};
use crate::ingest::mentions::{RawMention, NA_LABEL};
use crate::ingest::triples::{Triple, TripleStore};
use crate::ingest::vocab::Vocabulary;

/// Shape of a synthetic dataset. [`SynthConfig::new`] fills the secondary
/// knobs with workable defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    /// Number of entities (tokens `e0..`).
    pub entities: usize,
    /// Number of relationships excluding the no-relation label (tokens `r0..`).
    pub relations: usize,
    /// Total feature vocabulary size, indicative plus background tokens.
    pub features: usize,
    /// Total number of mentions generated across the train and test splits.
    pub mentions: usize,
    /// Probability that a mention misrepresents its pair, in [0, 1).
    pub noise: f64,
    pub seed: u64,
    /// Number of entity groups; 0 picks the smallest g with g(g-1) ≥ relations.
    pub groups: usize,
    /// Indicative feature tokens owned by each relationship.
    pub indicative_per_relation: usize,
    /// Mentions per entity pair are drawn uniformly from 1..=this.
    pub max_mentions_per_pair: usize,
    /// Fraction of entity pairs planted with no relation.
    pub na_fraction: f64,
    /// Fraction of entity pairs assigned to the test split.
    pub test_fraction: f64,
    /// Fraction of gold test facts that also appear as KB triples.
    pub kb_corroboration: f64,
    /// Additional KB triples per relationship beyond the train-pair facts.
    pub kb_extra_per_relation: usize,
}

impl SynthConfig {
    pub fn new(
        entities: usize,
        relations: usize,
        features: usize,
        mentions: usize,
        noise: f64,
        seed: u64,
    ) -> Self {
        SynthConfig {
            entities,
            relations,
            features,
            mentions,
            noise,
            seed,
            groups: 0,
            indicative_per_relation: 3,
            max_mentions_per_pair: 3,
            na_fraction: 0.25,
            test_fraction: 0.3,
            kb_corroboration: 0.6,
            kb_extra_per_relation: 20,
        }
    }

    /// The group count actually used: explicit, or the smallest g with
    /// g(g-1) ≥ relations so every relationship gets a distinct group pair.
    pub fn resolved_groups(&self) -> usize {
        if self.groups > 0 {
            return self.groups;
        }
        let mut g = 2;
        while g * (g - 1) < self.relations {
            g += 1;
        }
        g
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(RelexError::InvalidArgument(m));
        if self.entities == 0 || self.relations == 0 || self.features == 0 || self.mentions == 0 {
            return err("entities, relations, features and mentions must all be ≥ 1".into());
        }
        if !(0.0..1.0).contains(&self.noise) {
            return err(format!("noise rate {} outside [0, 1)", self.noise));
        }
        if !(0.0..1.0).contains(&self.na_fraction) {
            return err(format!("na fraction {} outside [0, 1)", self.na_fraction));
        }
        if !(0.0..1.0).contains(&self.test_fraction) {
            return err(format!("test fraction {} outside [0, 1)", self.test_fraction));
        }
        if !(0.0..=1.0).contains(&self.kb_corroboration) {
            return err(format!(
                "kb corroboration {} outside [0, 1]",
                self.kb_corroboration
            ));
        }
        if self.indicative_per_relation == 0 || self.max_mentions_per_pair == 0 {
            return err("indicative_per_relation and max_mentions_per_pair must be ≥ 1".into());
        }
        let indicative = self.relations * self.indicative_per_relation;
        if self.features < indicative + 1 {
            return err(format!(
                "need at least {} features: {} indicative plus one background token",
                indicative + 1,
                indicative
            ));
        }
        let g = self.resolved_groups();
        if g < 2 || g * (g - 1) < self.relations {
            return err(format!(
                "{} groups cannot host {} relationships on distinct ordered group pairs",
                g, self.relations
            ));
        }
        if self.entities < g {
            return err(format!("{} entities cannot fill {} groups", self.entities, g));
        }
        Ok(())
    }
}

/// Everything a synthetic experiment needs: weakly labeled mention splits,
/// a KB consistent with the planted structure, the gold facts for the test
/// split, and the vocabularies that give ids their meaning.
#[derive(Debug, Clone)]
pub struct SynthDataset {
    pub train_mentions: Vec<RawMention>,
    pub test_mentions: Vec<RawMention>,
    pub kb: TripleStore,
    pub entity_vocab: Vocabulary,
    pub kb_relation_vocab: Vocabulary,
    /// Gold (head, relation, tail) token facts: one per related test pair.
    pub gold: Vec<(String, String, String)>,
    /// All (head, tail) token pairs of the test split, no-relation included.
    pub test_pairs: Vec<(String, String)>,
}

struct PlannedPair {
    head: usize,
    tail: usize,
    relation: Option<usize>,
    confuser: usize,
    mentions: usize,
    is_test: bool,
}

fn pick(members: &[usize], rng: &mut ChaCha8Rng) -> usize {
    members[rng.random_range(0..members.len())]
}

/// Samples `count` distinct values from `0..n`.
fn distinct_sample(n: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(rng);
    all.truncate(count.min(n));
    all
}

pub fn generate_synthetic(cfg: &SynthConfig) -> Result<SynthDataset> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let g = cfg.resolved_groups();

    let entity_tokens: Vec<String> = (0..cfg.entities).map(|i| format!("e{i}")).collect();
    let relation_tokens: Vec<String> = (0..cfg.relations).map(|r| format!("r{r}")).collect();
    let mut group_members: Vec<Vec<usize>> = vec![Vec::new(); g];
    for e in 0..cfg.entities {
        group_members[e % g].push(e);
    }

    // Assign each relationship a distinct ordered group pair; remaining
    // pairs host the no-relation entity pairs.
    let mut candidate_pairs: Vec<(usize, usize)> = Vec::new();
    for a in 0..g {
        for b in 0..g {
            if a != b {
                candidate_pairs.push((a, b));
            }
        }
    }
    candidate_pairs.shuffle(&mut rng);
    let rel_groups: Vec<(usize, usize)> = candidate_pairs[..cfg.relations].to_vec();
    let na_groups: Vec<(usize, usize)> = candidate_pairs[cfg.relations..].to_vec();

    let ind = cfg.indicative_per_relation;
    let n_background = cfg.features - cfg.relations * ind;
    let indicative_token = |r: usize, s: usize| format!("f_r{r}i{s}");
    let background_token = |i: usize| format!("f_bg{i}");

    // Plan entity pairs until the mention budget is exactly consumed.
    let mut used_pairs: HashSet<(usize, usize)> = HashSet::new();
    let mut planned: Vec<PlannedPair> = Vec::new();
    let mut remaining = cfg.mentions;
    let mut attempts = 0usize;
    let max_attempts = 200 * cfg.mentions + 1000;
    while remaining > 0 {
        attempts += 1;
        if attempts > max_attempts {
            return Err(RelexError::InvalidArgument(
                "mention budget too large for the available entity-pair space".into(),
            ));
        }
        let is_na = rng.random::<f64>() < cfg.na_fraction;
        let (groups, relation) = if is_na {
            let (a, b) = if na_groups.is_empty() {
                // Every group pair hosts a relationship; fall back to any
                // cross-group pair and simply plant no fact for it.
                rel_groups[rng.random_range(0..rel_groups.len())]
            } else {
                na_groups[rng.random_range(0..na_groups.len())]
            };
            ((a, b), None)
        } else {
            let r = rng.random_range(0..cfg.relations);
            (rel_groups[r], Some(r))
        };
        let head = pick(&group_members[groups.0], &mut rng);
        let tail = pick(&group_members[groups.1], &mut rng);
        if !used_pairs.insert((head, tail)) {
            continue;
        }
        let confuser = match relation {
            Some(r) if cfg.relations > 1 => {
                let mut c = rng.random_range(0..cfg.relations - 1);
                if c >= r {
                    c += 1;
                }
                c
            }
            Some(r) => r,
            None => rng.random_range(0..cfg.relations),
        };
        let mentions = rng.random_range(1..=cfg.max_mentions_per_pair).min(remaining);
        remaining -= mentions;
        planned.push(PlannedPair {
            head,
            tail,
            relation,
            confuser,
            mentions,
            is_test: rng.random::<f64>() < cfg.test_fraction,
        });
    }

    // Materialize mentions, gold facts and the test-pair list.
    let mut train_mentions = Vec::new();
    let mut test_mentions = Vec::new();
    let mut gold = Vec::new();
    let mut test_pairs = Vec::new();
    let mut mention_counter = 0usize;
    for pp in &planned {
        let head_tok = entity_tokens[pp.head].clone();
        let tail_tok = entity_tokens[pp.tail].clone();
        if pp.is_test {
            test_pairs.push((head_tok.clone(), tail_tok.clone()));
            if let Some(r) = pp.relation {
                gold.push((head_tok.clone(), relation_tokens[r].clone(), tail_tok.clone()));
            }
        }
        let label = match pp.relation {
            Some(r) => relation_tokens[r].clone(),
            None => NA_LABEL.to_string(),
        };
        for _ in 0..pp.mentions {
            let noisy = rng.random::<f64>() < cfg.noise;
            let mut features: Vec<String> = Vec::new();
            match (pp.relation, noisy) {
                (Some(r), false) => {
                    let count = rng.random_range(1..=ind);
                    for s in distinct_sample(ind, count, &mut rng) {
                        features.push(indicative_token(r, s));
                    }
                }
                (Some(_), true) => {
                    let count = rng.random_range(1..=ind);
                    for s in distinct_sample(ind, count, &mut rng) {
                        features.push(indicative_token(pp.confuser, s));
                    }
                }
                (None, false) => {}
                (None, true) => {
                    features.push(indicative_token(pp.confuser, rng.random_range(0..ind)));
                }
            }
            let bg_count = rng.random_range(2..=3).min(n_background);
            for i in distinct_sample(n_background, bg_count, &mut rng) {
                features.push(background_token(i));
            }
            features.shuffle(&mut rng);
            let mention = RawMention {
                id: format!("m{mention_counter}"),
                head: head_tok.clone(),
                tail: tail_tok.clone(),
                label: label.clone(),
                features,
            };
            mention_counter += 1;
            if pp.is_test {
                test_mentions.push(mention);
            } else {
                train_mentions.push(mention);
            }
        }
    }

    // KB: facts for related train pairs, an exact fraction of the gold test
    // facts, and extra structure triples that avoid the test pairs.
    let entity_vocab = Vocabulary::from_tokens(entity_tokens.iter().cloned())?;
    let kb_relation_vocab = Vocabulary::from_tokens(relation_tokens.iter().cloned())?;
    let mut kb = TripleStore::new(entity_vocab.len(), kb_relation_vocab.len());
    for pp in planned.iter().filter(|p| !p.is_test) {
        if let Some(r) = pp.relation {
            kb.insert(Triple { head: pp.head, relation: r, tail: pp.tail })?;
        }
    }
    let gold_pairs: Vec<&PlannedPair> = planned
        .iter()
        .filter(|p| p.is_test && p.relation.is_some())
        .collect();
    let corroborated = (cfg.kb_corroboration * gold_pairs.len() as f64).round() as usize;
    for &i in distinct_sample(gold_pairs.len(), corroborated, &mut rng).iter() {
        let pp = gold_pairs[i];
        kb.insert(Triple {
            head: pp.head,
            relation: pp.relation.unwrap(),
            tail: pp.tail,
        })?;
    }
    let test_pair_ids: HashSet<(usize, usize)> = planned
        .iter()
        .filter(|p| p.is_test)
        .map(|p| (p.head, p.tail))
        .collect();
    for (r, &(a, b)) in rel_groups.iter().enumerate() {
        for _ in 0..cfg.kb_extra_per_relation {
            for _attempt in 0..50 {
                let head = pick(&group_members[a], &mut rng);
                let tail = pick(&group_members[b], &mut rng);
                if !test_pair_ids.contains(&(head, tail)) {
                    kb.insert(Triple { head, relation: r, tail })?;
                    break;
                }
            }
        }
    }

    Ok(SynthDataset {
        train_mentions,
        test_mentions,
        kb,
        entity_vocab,
        kb_relation_vocab,
        gold,
        test_pairs,
    })
}

/// Generates a KB whose triples follow the planted group-translation
/// structure only — no mention corpus. Useful for link-prediction
/// experiments on their own.
pub fn generate_planted_kb(
    entities: usize,
    relations: usize,
    n_triples: usize,
    seed: u64,
) -> Result<(TripleStore, Vocabulary, Vocabulary)> {
    if entities == 0 || relations == 0 || n_triples == 0 {
        return Err(RelexError::InvalidArgument(
            "entities, relations and triples must all be ≥ 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = 2;
    while g * (g - 1) < relations {
        g += 1;
    }
    if entities < g {
        return Err(RelexError::InvalidArgument(format!(
            "{entities} entities cannot fill {g} groups"
        )));
    }
    let mut group_members: Vec<Vec<usize>> = vec![Vec::new(); g];
    for e in 0..entities {
        group_members[e % g].push(e);
    }
    let mut candidate_pairs: Vec<(usize, usize)> = Vec::new();
    for a in 0..g {
        for b in 0..g {
            if a != b {
                candidate_pairs.push((a, b));
            }
        }
    }
    candidate_pairs.shuffle(&mut rng);

    let entity_vocab = Vocabulary::from_tokens((0..entities).map(|i| format!("e{i}")))?;
    let relation_vocab = Vocabulary::from_tokens((0..relations).map(|r| format!("r{r}")))?;
    let mut kb = TripleStore::new(entities, relations);
    let mut attempts = 0usize;
    let max_attempts = 200 * n_triples + 1000;
    while kb.len() < n_triples {
        attempts += 1;
        if attempts > max_attempts {
            return Err(RelexError::InvalidArgument(
                "triple budget too large for the planted structure".into(),
            ));
        }
        let r = rng.random_range(0..relations);
        let (a, b) = candidate_pairs[r];
        let head = pick(&group_members[a], &mut rng);
        let tail = pick(&group_members[b], &mut rng);
        kb.insert(Triple { head, relation: r, tail })?;
    }
    Ok((kb, entity_vocab, relation_vocab))
}
