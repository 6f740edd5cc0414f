//! Exchangeable sequences through the lens of the composition walk.
//!
//! Counting the symbols of an exchangeable sequence over `{0, ..., d-1}` gives
//! a Markov chain on weak compositions with the cotransitions of the uniform
//! walk, hence an h-transform of it. Its boundary limit `Y_n / n` is the
//! directing measure. Sequences over `[0, 1)` are reduced to the finite case
//! through their binary digits.
//!
//! Symbols are 0-based throughout.

mod counting;
mod estimate;
mod lift;
mod source;

pub use counting::{
    counting_chain, counting_chain_law, counting_chain_path, counting_h_recovery, verify_counting_cotransitions,
    verify_counting_markov, CountingMarkovReport, TransitionEntry,
};
pub use estimate::{
    cluster_summary, definetti_identity_check, estimate_directing_measure, ks_distance, path_boundary_limit, polya_marginal_cdf,
    polya_moment_check, Cluster, ClusterSummary, DirectingEstimate, DirectingLaw, IdentityReport,
};
pub use lift::{
    binary_digits, binary_digits_exact, lift_sequence, projection_consistency_check, reconstruct_exact,
    reconstruct_real, BinaryDigits, CubeLaw, DiscreteMeasure, RealMixtureSource,
};
pub use source::{
    all_sequences, exchangeability_check, null_symbols, source_cylinder_law, source_cylinder_law_with_budget,
    ExchangeableSource, MarkovSource, SequenceLaw, SequenceSource,
};
