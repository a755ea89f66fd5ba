//! Corpus and knowledge-base ingestion: parsing, vocabularies, the
//! experimental filtering protocol, and synthetic dataset generation.

pub mod mentions;
pub mod synth;
pub mod triples;
pub mod vocab;
