//! Statistical harness: deterministic parallel ensembles, goodness-of-fit
//! machinery, exact tiny-instance oracles, and named pass/fail diagnostics
//! built on all three.

pub mod checks;
pub mod ensemble;
pub mod oracle;
pub mod stats;

pub use checks::{
    graph_urn_equivalence, hitting_law_check, increment_law_check, jump_decay_check,
    mean_decay_check, stream_independence_check, variance_profile_check, HittingCheckReport,
    JumpDecayReport, MeanDecayReport, StreamIndependenceReport, VarianceProfileReport,
};
pub use ensemble::{run_ensemble, EnsembleConfig, EnsembleSummary, RecordSet, SimParams};
pub use oracle::{exact_small_graph_law, SmallGraphLaw};
pub use stats::{chi_square_compare, ks_compare, ks_two_sample, GofReport, StatName};
