//! Exact per-vertex degree law via forward dynamic programming.
//!
//! Conditional on the state at time `t`, the degree increment of a fixed
//! vertex over one step is binomial with `m` trials and success probability
//! given by its current degree alone, so the degree process is a
//! time-inhomogeneous Markov chain. The DP pushes the exact law forward one
//! step at a time over the vertex's finite support; no probabilistic
//! truncation happens here.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::theory::{check_mp, mixed_attach_prob, TruncatedLaw};

/// Exact probability vector for one vertex's degree at one time.
#[derive(Debug, Clone)]
pub struct DegreeLaw {
    pub vertex: u64,
    pub time: u64,
    pub m: u32,
    pub p: f64,
    min_degree: u64,
    probs: Vec<f64>,
}

impl DegreeLaw {
    /// Probability of degree exactly `k`; zero outside the support.
    pub fn prob(&self, k: u64) -> f64 {
        if k < self.min_degree {
            return 0.0;
        }
        self.probs.get((k - self.min_degree) as usize).copied().unwrap_or(0.0)
    }

    /// Inclusive support bounds `[m, (t-i+1)m]`, or `[2m, (t+1)m]` for the
    /// initial vertex.
    pub fn support(&self) -> (u64, u64) {
        (self.min_degree, self.min_degree + (self.probs.len() as u64 - 1))
    }

    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(j, &q)| (self.min_degree + j as u64) as f64 * q)
            .sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// `(degree, probability)` pairs in degree order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.probs.iter().enumerate().map(|(j, &q)| (self.min_degree + j as u64, q))
    }
}

/// Pascal row `binom(m, 0..=m)` in f64.
fn binomial_row(m: u32) -> Vec<f64> {
    let mut row = vec![1.0];
    for j in 0..m as u64 {
        let last = *row.last().expect("nonempty");
        row.push(last * (m as u64 - j) as f64 / (j + 1) as f64);
    }
    row
}

/// Runs the DP for vertex `i` from time `i` to `t`, invoking `visit` with
/// `(time, min_degree, probs)` at every time in `i..=t` (including the
/// initial point mass). Only the theoretical-maximum model has this chain
/// structure; the current-maximum variant's increment law depends on the
/// random `M_t` and admits no such per-vertex DP.
pub fn degree_law_evolve(
    m: u32,
    p: f64,
    i: u64,
    t: u64,
    visit: &mut dyn FnMut(u64, u64, &[f64]),
) -> Result<()> {
    check_mp(m, p)?;
    if i == 0 || t < i {
        return Err(Error::invalid("t", format!("need t >= i >= 1, got i={i}, t={t}")));
    }
    let min_degree = if i == 1 { 2 * m as u64 } else { m as u64 };
    let mut probs = vec![1.0];
    visit(i, min_degree, &probs);

    let binom = binomial_row(m);
    let mu = m as usize;
    let mut h_pow = vec![0.0; mu + 1];
    let mut q_pow = vec![0.0; mu + 1];
    for s in i..t {
        let mut next = vec![0.0; probs.len() + mu];
        for (idx, &mass) in probs.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let k = min_degree + idx as u64;
            let h = mixed_attach_prob(m, p, k, s);
            let q = 1.0 - h;
            h_pow[0] = 1.0;
            q_pow[0] = 1.0;
            for j in 1..=mu {
                h_pow[j] = h_pow[j - 1] * h;
                q_pow[j] = q_pow[j - 1] * q;
            }
            for j in 0..=mu {
                next[idx + j] += mass * binom[j] * h_pow[j] * q_pow[mu - j];
            }
        }
        probs = next;
        visit(s + 1, min_degree, &probs);
    }
    Ok(())
}

/// Exact law of `d(v_i, t)` for the theoretical-maximum model.
pub fn degree_law_dp(m: u32, p: f64, i: u64, t: u64) -> Result<DegreeLaw> {
    let mut law = None;
    degree_law_evolve(m, p, i, t, &mut |time, min_degree, probs| {
        if time == t {
            law = Some(DegreeLaw {
                vertex: i,
                time: t,
                m,
                p,
                min_degree,
                probs: probs.to_vec(),
            });
        }
    })?;
    Ok(law.expect("visit fires at t"))
}

/// Exact expected degree proportions `P(k, t)`: the average of the
/// per-vertex laws over all `t` vertices, truncated at `kmax` with the
/// dropped mass reported.
pub fn mixture_pkt(m: u32, p: f64, t: u64, kmax: u64) -> Result<TruncatedLaw> {
    check_mp(m, p)?;
    if t == 0 {
        return Err(Error::invalid("t", "need t >= 1"));
    }
    let mut acc: BTreeMap<u64, f64> = BTreeMap::new();
    let mut truncated = 0.0;
    let weight = 1.0 / t as f64;
    for i in 1..=t {
        let law = degree_law_dp(m, p, i, t)?;
        for (k, prob) in law.iter() {
            if k <= kmax {
                *acc.entry(k).or_insert(0.0) += prob * weight;
            } else {
                truncated += prob * weight;
            }
        }
    }
    Ok(TruncatedLaw {
        probs: acc,
        truncated_mass: truncated,
    })
}
