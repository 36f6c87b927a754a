//! Multigraph state and growth dynamics.
//!
//! The graph starts as a single vertex carrying `m` self-loops and gains one
//! vertex with `m` edges per step. A single Bernoulli(`p`) draw per step
//! selects the regime for all `m` edges of that step: preferential attachment
//! (probability `1 - p`) or anti-preferential attachment (probability `p`).
//! Within a step the `m` targets are drawn i.i.d. from the weights of the
//! *pre-step* state; degree updates are applied only after all targets are
//! chosen, so sibling draws never see each other's effect.

use rand::Rng;

use crate::error::{Error, Result};
use crate::params::{ModelParams, Variant};
use crate::sampler::{sample_target, AttachmentRule};

/// Vertex ids are 1-based insertion times: vertex `i` joined the graph at
/// time `i`, so the id doubles as the vertex's age rank.
pub type VertexId = u32;

/// One edge of the multigraph, in creation order.
///
/// `source` is the vertex added at `step`; `target` the sampled older vertex.
/// The initial self-loops are the only records with `source == target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeRecord {
    pub step: u64,
    pub source: VertexId,
    pub target: VertexId,
}

/// The evolving multigraph.
///
/// `endpoints` stores the flat list of edge endpoints in creation order
/// (edge `j` occupies positions `2j` and `2j + 1`), so every vertex appears
/// exactly `degree` times and uniform draws over the array realize the
/// preferential rule in O(1).
#[derive(Debug, Clone)]
pub struct GraphState {
    m: u32,
    degrees: Vec<u32>,
    endpoints: Vec<VertexId>,
    max_degree: u32,
    regime_log: Option<Vec<bool>>,
}

impl GraphState {
    /// The time-1 graph: one vertex with `m` self-loops.
    pub fn init(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let m = params.m;
        Ok(GraphState {
            m,
            degrees: vec![2 * m],
            endpoints: vec![1; 2 * m as usize],
            max_degree: 2 * m,
            regime_log: Some(Vec::new()),
        })
    }

    /// Current time `t` = number of vertices.
    pub fn time(&self) -> u64 {
        self.degrees.len() as u64
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Degree of vertex `v` (1-based). Panics if `v` is not in the graph.
    pub fn degree(&self, v: VertexId) -> u32 {
        self.degrees[(v - 1) as usize]
    }

    /// Degrees indexed by `vertex - 1`.
    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    /// Maximum degree `M_t`, maintained incrementally.
    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    /// Flat endpoint array of length `2mt`.
    pub fn endpoints(&self) -> &[VertexId] {
        &self.endpoints
    }

    /// Total degree `2mt`.
    pub fn total_degree(&self) -> u64 {
        2 * self.m as u64 * self.time()
    }

    /// Realized regime draws `Y_2..Y_t` (`true` = anti-preferential), if
    /// recording is enabled.
    pub fn regimes(&self) -> Option<&[bool]> {
        self.regime_log.as_deref()
    }

    /// Drops the regime log and stops recording it.
    pub fn disable_regime_log(&mut self) {
        self.regime_log = None;
    }

    /// Edges in creation order.
    pub fn edges(&self) -> impl Iterator<Item = EdgeRecord> + '_ {
        let m = self.m as u64;
        self.endpoints.chunks_exact(2).enumerate().map(move |(j, pair)| EdgeRecord {
            step: j as u64 / m + 1,
            source: pair[0],
            target: pair[1],
        })
    }

    /// Grows the graph by one step: adds vertex `t + 1` and `m` edges.
    ///
    /// Consumes exactly one Bernoulli draw followed by the target draws, in
    /// that order.
    pub fn step<R: Rng + ?Sized>(&mut self, p: f64, variant: Variant, rng: &mut R) {
        let anti = rng.random_bool(p);
        let rule = if anti {
            match variant {
                Variant::PaApa => AttachmentRule::AntiPreferential,
                Variant::PaApa2 => AttachmentRule::AntiPreferentialMaxDeg,
            }
        } else {
            AttachmentRule::Preferential
        };

        let m = self.m as usize;
        let mut targets = [0u32; 8];
        let mut targets_vec;
        // Buffer the m targets before any state update: selection weights
        // stay frozen at their pre-step values for all sibling draws.
        let targets: &mut [u32] = if m <= targets.len() {
            &mut targets[..m]
        } else {
            targets_vec = vec![0u32; m];
            &mut targets_vec
        };
        for slot in targets.iter_mut() {
            *slot = sample_target(self, rule, rng);
        }

        let new_vertex = (self.degrees.len() + 1) as VertexId;
        self.degrees.push(self.m);
        self.endpoints.reserve(2 * m);
        for &target in targets.iter() {
            self.endpoints.push(new_vertex);
            self.endpoints.push(target);
            let d = &mut self.degrees[(target - 1) as usize];
            *d += 1;
            if *d > self.max_degree {
                self.max_degree = *d;
            }
        }
        if let Some(log) = &mut self.regime_log {
            log.push(anti);
        }
    }

    /// Exhaustive consistency check: degree sum, endpoint multiplicities,
    /// maintained maximum, lower bounds. Exact integer comparisons; O(t + mt).
    pub fn check_invariants(&self) -> Result<()> {
        let t = self.time();
        let m = self.m as u64;
        let degree_sum: u64 = self.degrees.iter().map(|&d| d as u64).sum();
        if degree_sum != 2 * m * t {
            return Err(Error::invalid("degrees", format!("sum {} != 2mt = {}", degree_sum, 2 * m * t)));
        }
        if self.endpoints.len() as u64 != 2 * m * t {
            return Err(Error::invalid(
                "endpoints",
                format!("length {} != 2mt = {}", self.endpoints.len(), 2 * m * t),
            ));
        }
        let mut multiplicity = vec![0u32; self.degrees.len()];
        for &v in &self.endpoints {
            multiplicity[(v - 1) as usize] += 1;
        }
        if multiplicity != self.degrees {
            return Err(Error::invalid("endpoints", "multiplicities disagree with degrees"));
        }
        let true_max = self.degrees.iter().copied().max().unwrap_or(0);
        if true_max != self.max_degree {
            return Err(Error::invalid(
                "max_degree",
                format!("maintained {} != recomputed {}", self.max_degree, true_max),
            ));
        }
        if self.degrees[0] < 2 * self.m {
            return Err(Error::invalid("degrees", "vertex 1 below 2m"));
        }
        if self.degrees.iter().skip(1).any(|&d| d < self.m) {
            return Err(Error::invalid("degrees", "vertex below m"));
        }
        Ok(())
    }
}

/// An observation hook: receives read-only snapshots at the times named by
/// its schedule.
pub trait Observer {
    /// Strictly increasing observation times, each within `1..=horizon`.
    fn schedule(&self) -> &[u64];

    /// Called once per scheduled time, after the step completing that time.
    fn observe(&mut self, state: &GraphState);
}

/// Adapter running a closure at the given times.
pub struct FnObserver<F: FnMut(&GraphState)> {
    times: Vec<u64>,
    f: F,
}

impl<F: FnMut(&GraphState)> FnObserver<F> {
    pub fn new(times: Vec<u64>, f: F) -> Self {
        FnObserver { times, f }
    }
}

impl<F: FnMut(&GraphState)> Observer for FnObserver<F> {
    fn schedule(&self) -> &[u64] {
        &self.times
    }

    fn observe(&mut self, state: &GraphState) {
        (self.f)(state)
    }
}

fn validate_schedule(times: &[u64], horizon: u64) -> Result<()> {
    let mut prev = 0u64;
    for &time in times {
        if time == 0 || time > horizon || time <= prev {
            return Err(Error::InvalidObservationTime { time, horizon });
        }
        prev = time;
    }
    Ok(())
}

/// Runs the growth process from `t = 1` to `t = horizon` on the given stream.
///
/// Deterministic given the stream: identical `(params, seed)` yield
/// bit-identical edge streams.
pub fn grow<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> Result<GraphState> {
    grow_observed(params, &mut [], rng)
}

/// [`grow`] with observation hooks. Each observer's schedule is validated
/// against the horizon up front; hooks run synchronously in the growth
/// thread.
pub fn grow_observed<R: Rng + ?Sized>(
    params: &ModelParams,
    observers: &mut [&mut dyn Observer],
    rng: &mut R,
) -> Result<GraphState> {
    for obs in observers.iter() {
        validate_schedule(obs.schedule(), params.horizon)?;
    }
    let mut cursors = vec![0usize; observers.len()];
    let mut state = GraphState::init(params)?;
    let notify = |state: &GraphState, observers: &mut [&mut dyn Observer], cursors: &mut [usize]| {
        let t = state.time();
        for (obs, cursor) in observers.iter_mut().zip(cursors.iter_mut()) {
            if *cursor < obs.schedule().len() && obs.schedule()[*cursor] == t {
                obs.observe(state);
                *cursor += 1;
            }
        }
    };
    notify(&state, observers, &mut cursors);
    for _ in 1..params.horizon {
        state.step(params.p, params.variant, rng);
        notify(&state, observers, &mut cursors);
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::replica_rng;

    fn params(m: u32, p: f64, horizon: u64) -> ModelParams {
        ModelParams::new(m, p, Variant::PaApa, horizon, 11)
    }

    #[test]
    fn init_single_self_looped_vertex() {
        let state = GraphState::init(&params(1, 0.0, 1)).unwrap();
        assert_eq!(state.degrees(), &[2]);
        assert_eq!(state.endpoints(), &[1, 1]);

        let state = GraphState::init(&params(3, 0.0, 1)).unwrap();
        assert_eq!(state.degrees(), &[6]);
        assert_eq!(state.total_degree(), 2 * 3);

        let state = GraphState::init(&params(100, 0.0, 1)).unwrap();
        assert_eq!(state.max_degree(), 200);
        let records: Vec<_> = state.edges().collect();
        assert_eq!(records.len(), 100);
        assert!(records.iter().all(|e| e.step == 1 && e.source == 1 && e.target == 1));
    }

    #[test]
    fn init_rejects_zero_m() {
        assert!(GraphState::init(&params(0, 0.0, 1)).is_err());
    }

    #[test]
    fn first_step_connects_to_the_only_candidate() {
        for p in [0.0, 0.3, 1.0] {
            let mut state = GraphState::init(&params(1, p, 2)).unwrap();
            let mut rng = replica_rng(5, 0);
            state.step(p, Variant::PaApa, &mut rng);
            assert_eq!(state.degrees(), &[3, 1]);
            assert_eq!(state.max_degree(), 3);
            state.check_invariants().unwrap();
        }
    }

    #[test]
    fn horizon_one_returns_init_unchanged() {
        let p = params(2, 0.5, 1);
        let mut rng = replica_rng(9, 0);
        let grown = grow(&p, &mut rng).unwrap();
        let init = GraphState::init(&p).unwrap();
        assert_eq!(grown.degrees(), init.degrees());
        assert_eq!(grown.endpoints(), init.endpoints());
    }

    #[test]
    fn replays_are_bit_identical() {
        let p = params(3, 0.4, 400);
        let a = grow(&p, &mut replica_rng(p.seed, 0)).unwrap();
        let b = grow(&p, &mut replica_rng(p.seed, 0)).unwrap();
        assert_eq!(a.endpoints(), b.endpoints());
        assert_eq!(a.regimes(), b.regimes());
        let c = grow(&p, &mut replica_rng(p.seed, 1)).unwrap();
        assert_ne!(a.endpoints(), c.endpoints());
    }

    #[test]
    fn invariants_hold_along_a_run() {
        for variant in [Variant::PaApa, Variant::PaApa2] {
            let mut params = params(2, 0.7, 1);
            params.variant = variant;
            let mut state = GraphState::init(&params).unwrap();
            let mut rng = replica_rng(3, 0);
            let mut previous = state.degrees().to_vec();
            for _ in 1..300 {
                state.step(params.p, variant, &mut rng);
                state.check_invariants().unwrap();
                // Old vertices never lose degree and gain at most m per step;
                // the newcomer enters with exactly m.
                for (v, (&now, &before)) in state.degrees().iter().zip(previous.iter()).enumerate() {
                    assert!(now >= before, "vertex {} lost degree", v + 1);
                    assert!(now - before <= params.m);
                }
                assert_eq!(*state.degrees().last().unwrap(), params.m);
                previous = state.degrees().to_vec();
            }
        }
    }

    #[test]
    fn edge_records_keep_creation_order_and_self_loop_rule() {
        let p = params(2, 0.5, 50);
        let state = grow(&p, &mut replica_rng(p.seed, 0)).unwrap();
        for (j, edge) in state.edges().enumerate() {
            assert_eq!(edge.step, j as u64 / 2 + 1);
            assert!(edge.target <= edge.source);
            if edge.step >= 2 {
                assert!(edge.target < edge.source, "self-loop after t=1");
                assert_eq!(edge.source as u64, edge.step);
            }
        }
    }

    #[test]
    fn observers_fire_at_scheduled_times() {
        let p = params(1, 0.0, 30);
        let mut seen = Vec::new();
        let mut obs = FnObserver::new(vec![1, 10, 30], |s: &GraphState| seen.push(s.time()));
        {
            let mut hooks: Vec<&mut dyn Observer> = vec![&mut obs];
            grow_observed(&p, &mut hooks, &mut replica_rng(1, 0)).unwrap();
        }
        assert_eq!(seen, vec![1, 10, 30]);
    }

    #[test]
    fn observer_rejects_times_beyond_horizon() {
        let p = params(1, 0.0, 10);
        let mut obs = FnObserver::new(vec![11], |_: &GraphState| {});
        let mut hooks: Vec<&mut dyn Observer> = vec![&mut obs];
        let err = grow_observed(&p, &mut hooks, &mut replica_rng(1, 0));
        assert!(matches!(err, Err(Error::InvalidObservationTime { .. })));
    }

    #[test]
    fn regime_log_matches_p_extremes() {
        let mut p = params(1, 0.0, 50);
        let state = grow(&p, &mut replica_rng(2, 0)).unwrap();
        assert!(state.regimes().unwrap().iter().all(|&anti| !anti));
        p.p = 1.0;
        let state = grow(&p, &mut replica_rng(2, 0)).unwrap();
        assert!(state.regimes().unwrap().iter().all(|&anti| anti));
        assert_eq!(state.regimes().unwrap().len(), 49);
    }
}
