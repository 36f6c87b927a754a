//! Exact attachment-rule samplers and per-vertex attachment probabilities.
//!
//! All weights are exact integers; division only happens when a probability
//! is finally reported. The preferential rule is sampled by a uniform draw
//! over the endpoint array (each vertex appears once per unit of degree).
//! The anti-preferential rules are sampled by rejection: propose a uniform
//! vertex, accept with probability `(C - d) / C` where `C` is the envelope
//! constant (`2mt + 1` or `M_t + 1`), which is proportional to the target
//! weight `C - d`. Acceptance weights stay >= 1, so the loop terminates with
//! probability one.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{GraphState, VertexId};

/// The three attachment distributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttachmentRule {
    /// Weight `d(v_i, t)`, normalizer `2mt`.
    Preferential,
    /// Weight `2mt + 1 - d(v_i, t)`, normalizer `t(2mt + 1 - 2m)`.
    AntiPreferential,
    /// Weight `M_t + 1 - d(v_i, t)`, normalizer `t(M_t + 1 - 2m)`. Only used
    /// by the current-maximum variant of the model.
    AntiPreferentialMaxDeg,
}

impl AttachmentRule {
    /// Envelope constant `C`: the exclusive upper bound on any vertex degree
    /// under this rule, plus one. `None` for the preferential rule.
    fn envelope(self, state: &GraphState) -> Option<u64> {
        match self {
            AttachmentRule::Preferential => None,
            AttachmentRule::AntiPreferential => Some(state.total_degree() + 1),
            AttachmentRule::AntiPreferentialMaxDeg => Some(state.max_degree() as u64 + 1),
        }
    }
}

/// Exact attachment probability of `vertex` under `rule`, given the current
/// state. Numerator and denominator are exact integers; the only floating
/// operation is the final division.
pub fn attach_probability(state: &GraphState, vertex: VertexId, rule: AttachmentRule) -> Result<f64> {
    let t = state.time();
    if vertex == 0 || vertex as u64 > t {
        return Err(Error::VertexOutOfRange { vertex, max: t });
    }
    let d = state.degree(vertex) as u64;
    let (num, den) = match rule {
        AttachmentRule::Preferential => (d, state.total_degree()),
        rule => {
            let c = rule.envelope(state).expect("anti rules have an envelope");
            (c - d, t * (c - 2 * state.m() as u64))
        }
    };
    debug_assert!(den > 0, "normalizer vanished at t={t}");
    Ok(num as f64 / den as f64)
}

/// Samples one target under the preferential rule: a uniform entry of the
/// endpoint array. O(1).
pub fn sample_preferential<R: Rng + ?Sized>(state: &GraphState, rng: &mut R) -> VertexId {
    let endpoints = state.endpoints();
    endpoints[rng.random_range(0..endpoints.len())]
}

/// Samples one target under an anti-preferential rule by exact integer
/// rejection. Expected acceptance is `1 - 2m/C`; for the current-maximum
/// envelope under strong homogenization this can fall to order `1/(2m + 1)`,
/// i.e. about `2m` proposals per draw in the worst case.
pub fn sample_antipreferential<R: Rng + ?Sized>(
    state: &GraphState,
    rule: AttachmentRule,
    rng: &mut R,
) -> Result<VertexId> {
    let c = rule.envelope(state).ok_or_else(|| {
        Error::invalid("rule", "sample_antipreferential requires an anti-preferential rule")
    })?;
    let t = state.time();
    loop {
        let candidate = rng.random_range(0..t) as u32 + 1;
        let weight = c - state.degree(candidate) as u64;
        if rng.random_range(0..c) < weight {
            return Ok(candidate);
        }
    }
}

/// Dispatches to the sampler for `rule`.
pub fn sample_target<R: Rng + ?Sized>(state: &GraphState, rule: AttachmentRule, rng: &mut R) -> VertexId {
    match rule {
        AttachmentRule::Preferential => sample_preferential(state, rng),
        rule => sample_antipreferential(state, rule, rng).expect("anti rule"),
    }
}

/// Exact integer weight-sum identities for all three rules:
/// `sum d = 2mt`, `sum (2mt+1-d) = t(2mt+1-2m)`, `sum (M+1-d) = t(M+1-2m)`.
/// These are the rules' normalizers, so each probability vector sums to one
/// exactly. Returns an error naming the first identity that fails.
pub fn check_weight_sums(state: &GraphState) -> Result<()> {
    let t = state.time();
    let m = state.m() as u64;
    let big_m = state.max_degree() as u64;
    let degree_sum: u64 = state.degrees().iter().map(|&d| d as u64).sum();
    if degree_sum != 2 * m * t {
        return Err(Error::invalid("weights", "preferential weight sum != 2mt"));
    }
    let anti_sum: u64 = state.degrees().iter().map(|&d| 2 * m * t + 1 - d as u64).sum();
    if anti_sum != t * (2 * m * t + 1 - 2 * m) {
        return Err(Error::invalid("weights", "anti-preferential weight sum mismatch"));
    }
    let anti_max_sum: u64 = state.degrees().iter().map(|&d| big_m + 1 - d as u64).sum();
    if anti_max_sum != t * (big_m + 1 - 2 * m) {
        return Err(Error::invalid("weights", "max-degree anti weight sum mismatch"));
    }
    Ok(())
}
