//! Membership inference against released dataset marginals when the
//! population is a discrete Bayesian network.
//!
//! The main entry points are [`posterior_ratio`] for the exact Bayesian
//! attack, the population-marginal attacks in [`attacks`], and
//! [`run_experiment`] for ROC/AUC evaluation over repeated trials.

pub mod attacks;
pub mod bn;
pub mod error;
pub mod format;
pub mod harness;
pub mod inference;
pub mod learning;
pub mod networks;
pub mod populations;
pub mod verify;

pub use attacks::{
    bayes_score, choose_side, decide, inner_product_score, lrt_clipped_score, lrt_score,
    AttackKind, AttackScore, ClipRange, Label, SideChoice,
};
pub use bn::{
    BayesianNetwork, Dataset, EncodedVector, Encoding, NodeSpec, Record, ReleasedCounts, Violation,
};
pub use error::{Error, ParseError, Result};
pub use format::{emit_sexpr, parse_bif_subset, parse_sexpr, NetworkDocument, NetworkFormat};
pub use harness::{
    bench_posterior, roc_and_auc, run_experiment, run_trial, AttackSpec, BenchRow,
    ExperimentConfig, ExperimentReport, PopulationSpec, RocResult, Threat,
};
pub use inference::{
    brute_force_posterior, closed_form_product_ratio, posterior_ratio, sum_count_prob,
    PosteriorEngine, PosteriorResult, SupportDistribution,
};
pub use learning::{chow_liu_fit, empirical_marginals, mle_fit, ProxyDataset};
pub use networks::{builtin_network, load_network};
pub use populations::{
    make_cancer, make_half_repeated, make_lr_repeated, make_lr_repeated_fixed_side, make_product,
    Side, ToyKind,
};
pub use verify::{verify_all, SuiteReport, VerificationReport};
