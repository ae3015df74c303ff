//! Maximum matchings, Gallai–Edmonds decompositions and the round-labeled
//! clique analysis used by the three-round bounds.

mod decomp;
mod labeled;
mod lemmas;
mod matching;

use thiserror::Error;

pub use decomp::{gallai_edmonds, specific_decomposition, GEDecomposition, SpecificDecomposition};
pub use labeled::{
    canonical_matching, free_edge_count, signature, CanonicalMatching, DecompSignature, Frac, FreeEdgeCount,
    RoundLabeledClique, MAX_CANONICAL_K,
};
pub use lemmas::{check_free_edge_lemmas, check_unmatched_edges, verify_structure_lemmas, Lemma, LemmaCheck, LemmaInstance};
pub use matching::{has_augmenting_path, matching_number, maximum_matching, Matching};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchError {
    #[error("not a matching: {0}")]
    NotAMatching(String),
    #[error("matching is not maximum (an augmenting path exists)")]
    NotMaximum,
    #[error("matching is not perfect on the clique")]
    NotPerfect,
    #[error("clique size k = {0} is odd")]
    OddClique(usize),
    #[error("clique size k = {0} exceeds the exact solver limit {1}")]
    TooLarge(usize, usize),
    #[error("invalid input: {0}")]
    Input(String),
}
