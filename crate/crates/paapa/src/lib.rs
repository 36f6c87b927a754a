//! Simulator and exact-theory toolkit for dynamic random multigraphs grown
//! by a per-step mixture of preferential and anti-preferential attachment.
//!
//! The graph starts as one vertex with `m` self-loops; each step adds a
//! vertex and `m` edges whose targets are drawn, with probability `p`, from
//! an anti-preferential rule favoring low degrees, and otherwise from the
//! classical preferential rule. A second variant measures anti-preferential
//! weights against the current maximum degree instead of the theoretical
//! maximum.
//!
//! The crate pairs the simulator with exact evaluators for the model's
//! analytic quantities — limiting degree law, expected degree, per-vertex
//! degree-law dynamic programming, growth normalizers — so simulation output
//! can be validated against theory at desk scale:
//!
//! ```
//! use paapa::{grow, histogram, limit_law_table, tv_distance, ModelParams, Variant};
//! use paapa::seed::replica_rng;
//!
//! let params = ModelParams::new(2, 1.0, Variant::PaApa, 20_000, 7);
//! let graph = grow(&params, &mut replica_rng(params.seed, 0))?;
//! let law = limit_law_table(params.m, params.p, 200)?;
//! let tv = tv_distance(&histogram(&graph), &law)?;
//! assert!(tv < 0.05);
//! # Ok::<(), paapa::Error>(())
//! ```

pub mod error;
pub mod graph;
pub mod io;
pub mod params;
pub mod replica;
pub mod sampler;
pub mod seed;
pub mod stats;
pub mod theory;

pub use error::{Error, Result};
pub use graph::{grow, grow_observed, EdgeRecord, FnObserver, GraphState, Observer, VertexId};
pub use params::{ModelParams, Variant};
pub use sampler::{
    attach_probability, check_weight_sums, sample_antipreferential, sample_preferential,
    sample_target, AttachmentRule,
};
pub use stats::{
    assortativity, assortativity_of, chi_square_gof, detect_peak, growth_regression, histogram,
    tail_fit, tv_between, tv_distance, DegreeHistogram, FitReport, GofReport, GrowthMode, Peak,
};
pub use theory::{
    apa_growth_normalizer, apa_growth_normalizer_trajectory, apa_normalizer_lower_bracket,
    degree_law_dp, degree_law_evolve, expected_degree, expected_degree_envelope,
    expected_degree_pa_closed, expected_degree_trajectory, limit_law_table, limit_pk,
    limit_pk_recursive, mixed_attach_prob, mixture_pkt, q_degree_m, step_scalars, tail_exponent,
    DegreeLaw, StepScalars, TruncatedLaw,
};
