//! Launch/roll-back decisions for randomized experiments.
//!
//! The pipeline is:
//!
//! 1. [`bootstrap`] turns unit-level outcomes into an effect estimate `x` with covariance `Sigma`.
//! 2. [`registry`] stores completed experiments in time order.
//! 3. [`prior`] pools earlier experiments through a hierarchical normal model with
//!    between-experiment covariance `Gamma = k * Theta_hat`.
//! 4. [`posterior`] combines that prior with the current experiment's likelihood.
//! 5. [`risk`] compares the expected risks of launching and rolling back under a trade-off vector.
//!
//! [`sim`] scores the whole pipeline on permutation nulls and synthetic hierarchies, and
//! [`analysis`] bundles the registry-level entry points used by the CLI and HTTP service.
//!
//! Runnable walkthroughs live in this crate's `examples/` directory:
//!
//! ```bash
//! cargo run -p launch-decision --example tradeoff_weights
//! cargo run -p launch-decision --example bootstrap_ingest
//! cargo run -p launch-decision --example hierarchical_prior
//! cargo run -p launch-decision --example posterior_by_k
//! cargo run -p launch-decision --example launch_decision
//! cargo run -p launch-decision --example decision_space
//! cargo run -p launch-decision --example null_simulation
//! cargo run -p launch-decision --example significance_flips
//! ```

pub mod analysis;
pub mod bootstrap;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod posterior;
pub mod prior;
pub mod registry;
pub mod risk;
pub mod sampling;
pub mod sim;
pub mod units;

pub use bootstrap::{bootstrap_sigma, estimate_effects, BootstrapConfig};
pub use error::{Error, Result};
pub use experiment::{
    validate_record, Arm, ExperimentRecord, Gaussian, MetricSchema, Provenance, UnitOutcomes,
};
pub use posterior::{joint_success_probability, posterior_update, summarize, PosteriorSummary};
pub use prior::{build_prior, empirical_theta, HierParams, Prior, ShrinkageLevel};
pub use registry::{Registry, RegistryStore};
pub use risk::{
    decision_space, expected_risks, g_transform, guardrail, DecisionReport, LossSpec,
    Recommendation,
};
pub use sim::{flip_report, run_simulation, SimConfig, SimReport};
