//! Exact evaluation of the model's analytic objects: limiting degree law,
//! expected-degree formula, recurrences, growth normalizers and envelopes.
//!
//! Everything here is a pure function of its arguments. Gamma-ratio
//! evaluations run in log-Gamma space with a single final exponential, so
//! degrees and times up to 10^6 stay inside double range.

mod degree_law;

pub use degree_law::{degree_law_dp, degree_law_evolve, mixture_pkt, DegreeLaw};

use std::collections::BTreeMap;

use statrs::function::gamma::{digamma, ln_gamma};

use crate::error::{Error, Result};

/// Per-step scalar coefficients of the expected-degree recursions:
/// `c = (2ml+1)/(l(2ml+1-2m))`, `e = m/(l(2ml+1-2m))` and the one-step
/// growth factor `1 + (1-p)/(2l) - p e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepScalars {
    pub c: f64,
    pub e: f64,
    pub growth: f64,
}

/// Scalars at step `l >= 1` for a model with parameters `(m, p)`.
pub fn step_scalars(m: u32, p: f64, l: u64) -> StepScalars {
    debug_assert!(m >= 1 && l >= 1);
    let m = m as u64;
    let den = (l * (2 * m * l + 1 - 2 * m)) as f64;
    let c = (2 * m * l + 1) as f64 / den;
    let e = m as f64 / den;
    StepScalars {
        c,
        e,
        growth: 1.0 + (1.0 - p) / (2 * l) as f64 - p * e,
    }
}

/// Unconditional probability that one target draw in the step from `t` to
/// `t + 1` lands on a given vertex of degree `k`: the Bernoulli mixture of
/// the preferential and anti-preferential rules. Requires `m <= k <= 2mt`.
pub fn mixed_attach_prob(m: u32, p: f64, k: u64, t: u64) -> f64 {
    let m = m as u64;
    debug_assert!(t >= 1 && k >= m && k <= 2 * m * t, "degree {k} impossible at time {t}");
    let anti = (2 * m * t + 1 - k) as f64 / (t * (2 * m * t + 1 - 2 * m)) as f64;
    let pref = k as f64 / (2 * m * t) as f64;
    p * anti + (1.0 - p) * pref
}

/// A probability table over degrees, truncated at some maximum degree, with
/// the dropped mass reported explicitly.
#[derive(Debug, Clone)]
pub struct TruncatedLaw {
    pub probs: BTreeMap<u64, f64>,
    pub truncated_mass: f64,
}

impl TruncatedLaw {
    pub fn prob(&self, k: u64) -> f64 {
        self.probs.get(&k).copied().unwrap_or(0.0)
    }

    pub fn retained_mass(&self) -> f64 {
        self.probs.values().sum()
    }
}

fn check_mp(m: u32, p: f64) -> Result<()> {
    if m == 0 {
        return Err(Error::invalid("m", "must be >= 1"));
    }
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::invalid("p", format!("must lie in [0, 1], got {p}")));
    }
    Ok(())
}

/// Limiting degree-law value `P(k)` in closed form.
///
/// For `p < 1` this is `2/(2+m+mp) * xi(k)/xi(m)` with
/// `xi(k) = Gamma(k + 2mp/(1-p)) / Gamma(k + 1 + 2(mp+1)/(1-p))`, evaluated
/// in log-Gamma space; for `p = 1` the geometric law
/// `(1/(m+1)) (m/(m+1))^(k-m)`.
pub fn limit_pk(m: u32, p: f64, k: u64) -> Result<f64> {
    check_mp(m, p)?;
    if k < m as u64 {
        return Err(Error::invalid("k", format!("must be >= m = {m}, got {k}")));
    }
    let mf = m as f64;
    if p == 1.0 {
        // Dispatched before any 1/(1-p): geometric regime.
        let ratio = mf / (mf + 1.0);
        return Ok(ratio.powi((k - m as u64) as i32) / (mf + 1.0));
    }
    let a = 2.0 * mf * p / (1.0 - p);
    let b = 2.0 * (mf * p + 1.0) / (1.0 - p);
    let kf = k as f64;
    let log = (2.0 / (2.0 + mf + mf * p)).ln() + ln_gamma(kf + a) - ln_gamma(mf + a)
        + ln_gamma(mf + 1.0 + b)
        - ln_gamma(kf + 1.0 + b);
    Ok(log.exp())
}

/// Limiting degree-law value `P(k)` by iterating the exact ratio recursion
/// `P(k) = [2mp + (1-p)(k-1)] / [2 + 2mp + (1-p)k] * P(k-1)` from
/// `P(m) = 2/(2+m+mp)`. Independent route to [`limit_pk`].
pub fn limit_pk_recursive(m: u32, p: f64, k: u64) -> Result<f64> {
    check_mp(m, p)?;
    if k < m as u64 {
        return Err(Error::invalid("k", format!("must be >= m = {m}, got {k}")));
    }
    let mf = m as f64;
    let mut value = 2.0 / (2.0 + mf + mf * p);
    for j in (m as u64 + 1)..=k {
        let jf = j as f64;
        value *= (2.0 * mf * p + (1.0 - p) * (jf - 1.0)) / (2.0 + 2.0 * mf * p + (1.0 - p) * jf);
    }
    Ok(value)
}

/// The limiting law tabulated over `m..=kmax`, with the tail mass beyond
/// `kmax` reported as truncated.
pub fn limit_law_table(m: u32, p: f64, kmax: u64) -> Result<TruncatedLaw> {
    check_mp(m, p)?;
    if kmax < m as u64 {
        return Err(Error::invalid("kmax", format!("must be >= m = {m}")));
    }
    let mf = m as f64;
    let mut probs = BTreeMap::new();
    let mut value = 2.0 / (2.0 + mf + mf * p);
    let mut total = 0.0;
    for k in m as u64..=kmax {
        if k > m as u64 {
            let kf = k as f64;
            value *= (2.0 * mf * p + (1.0 - p) * (kf - 1.0)) / (2.0 + 2.0 * mf * p + (1.0 - p) * kf);
        }
        probs.insert(k, value);
        total += value;
    }
    Ok(TruncatedLaw {
        probs,
        truncated_mass: (1.0 - total).max(0.0),
    })
}

/// Tail exponent `(p-3)/(1-p)` of the limiting power law, for `p in [0, 1)`.
/// At `p = 1` the law is geometric and no power-law exponent exists.
pub fn tail_exponent(p: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) || p.is_nan() {
        return Err(Error::invalid("p", format!("power-law regime requires p in [0, 1), got {p}")));
    }
    Ok((p - 3.0) / (1.0 - p))
}

/// Exact expected degree `E[d(v_i, t)]`, `t >= i >= 1`.
///
/// Runs the one-step conditional-expectation recursion
/// `E(l+1) = E(l) * growth(l) + p m c_l` from `E(i) = (1 + [i = 1]) m`;
/// empty products/sums conventions make `E(i)` the `t = i` value.
pub fn expected_degree(m: u32, p: f64, i: u64, t: u64) -> Result<f64> {
    check_mp(m, p)?;
    if i == 0 || t < i {
        return Err(Error::invalid("t", format!("need t >= i >= 1, got i={i}, t={t}")));
    }
    let mut value = initial_expected(m, i);
    for l in i..t {
        let s = step_scalars(m, p, l);
        value = value * s.growth + p * m as f64 * s.c;
    }
    Ok(value)
}

fn initial_expected(m: u32, i: u64) -> f64 {
    if i == 1 {
        2.0 * m as f64
    } else {
        m as f64
    }
}

/// [`expected_degree`] evaluated along ascending `times` in one pass.
pub fn expected_degree_trajectory(m: u32, p: f64, i: u64, times: &[u64]) -> Result<Vec<f64>> {
    check_mp(m, p)?;
    if i == 0 {
        return Err(Error::invalid("i", "must be >= 1"));
    }
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("times", "must be strictly increasing"));
    }
    if times.first().is_some_and(|&first| first < i) {
        return Err(Error::invalid("times", format!("all times must be >= i = {i}")));
    }
    let mut out = Vec::with_capacity(times.len());
    let mut value = initial_expected(m, i);
    let mut next = times.iter().peekable();
    let last = match times.last() {
        Some(&last) => last,
        None => return Ok(out),
    };
    for l in i..=last {
        while next.peek() == Some(&&l) {
            out.push(value);
            next.next();
        }
        if l < last {
            let s = step_scalars(m, p, l);
            value = value * s.growth + p * m as f64 * s.c;
        }
    }
    Ok(out)
}

/// Closed-form expected degree in the pure preferential regime:
/// `(1 + [i = 1]) m * Gamma(i) Gamma(t + 1/2) / (Gamma(i + 1/2) Gamma(t))`,
/// via log-Gamma.
pub fn expected_degree_pa_closed(m: u32, i: u64, t: u64) -> Result<f64> {
    if m == 0 || i == 0 || t < i {
        return Err(Error::invalid("t", format!("need t >= i >= 1 and m >= 1, got i={i}, t={t}")));
    }
    let (ti, tf) = (i as f64, t as f64);
    let log = ln_gamma(ti) + ln_gamma(tf + 0.5) - ln_gamma(ti + 0.5) - ln_gamma(tf);
    Ok(initial_expected(m, i) * log.exp())
}

/// Expected fraction of non-initial vertices sitting at the minimum degree
/// `m` at time `t`, by iterating
/// `Q(m, t) = ((t-2)/(t-1)) K(m, t)^m Q(m, t-1) + 1/(t-1)` from `Q(m, 2) = 1`.
pub fn q_degree_m(m: u32, p: f64, t: u64) -> Result<f64> {
    check_mp(m, p)?;
    if t < 2 {
        return Err(Error::invalid("t", format!("need t >= 2, got {t}")));
    }
    let mut q = 1.0;
    for s in 3..=t {
        let survive = 1.0 - mixed_attach_prob(m, p, m as u64, s - 1);
        q = (s - 2) as f64 / (s - 1) as f64 * survive.powi(m as i32) * q + 1.0 / (s - 1) as f64;
    }
    Ok(q)
}

/// Denominator of the pure anti-preferential growth law:
/// `sum_{l=i}^{t-1} ln(1 + c_l) prod_{h=l+1}^{t-1} (1 - e_h)`, accumulated
/// forward in O(t). Requires `i >= 2`, `t >= i + 1`.
pub fn apa_growth_normalizer(m: u32, i: u64, t: u64) -> Result<f64> {
    if m == 0 || i < 2 || t < i + 1 {
        return Err(Error::invalid("t", format!("need i >= 2 and t >= i + 1, got i={i}, t={t}")));
    }
    let mut acc = 0.0;
    for l in i..t {
        let s = step_scalars(m, 1.0, l);
        acc = acc * (1.0 - s.e) + s.c.ln_1p();
    }
    Ok(acc)
}

/// [`apa_growth_normalizer`] along ascending `times` in one pass.
pub fn apa_growth_normalizer_trajectory(m: u32, i: u64, times: &[u64]) -> Result<Vec<f64>> {
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("times", "must be strictly increasing"));
    }
    let mut out = Vec::with_capacity(times.len());
    let Some(&last) = times.last() else {
        return Ok(out);
    };
    if m == 0 || i < 2 || times[0] < i + 1 {
        return Err(Error::invalid("times", format!("need i >= 2 and times >= i + 1 = {}", i + 1)));
    }
    let mut acc = 0.0;
    let mut next = times.iter().peekable();
    for l in i..last {
        let s = step_scalars(m, 1.0, l);
        acc = acc * (1.0 - s.e) + s.c.ln_1p();
        while next.peek() == Some(&&(l + 1)) {
            out.push(acc);
            next.next();
        }
    }
    Ok(out)
}

/// Lower bracketing constant of the normalizer-to-`ln t` ratio: the
/// convergent infinite product `prod_{h=i}^{inf} (1 - e_h)`. Summed to a
/// cutoff with the exact digamma tail correction for the remainder.
pub fn apa_normalizer_lower_bracket(m: u32, i: u64) -> Result<f64> {
    if m == 0 || i < 2 {
        return Err(Error::invalid("i", "need m >= 1 and i >= 2"));
    }
    const CUTOFF: u64 = 1_000_000;
    let mut log_sum = 0.0;
    for h in i..=CUTOFF {
        log_sum += (-step_scalars(m, 1.0, h).e).ln_1p();
    }
    // Tail of sum e_h via partial fractions: e_l = (m/b)(1/l - 1/(l + b/2m)),
    // b = 1 - 2m, so the remainder telescopes to a digamma difference.
    // Beyond the cutoff ln(1 - e) = -e up to O(e^2) ~ 1e-25.
    let mf = m as f64;
    let b = 1.0 - 2.0 * mf;
    let c = b / (2.0 * mf);
    let start = (CUTOFF + 1) as f64;
    let tail = mf / b * (digamma(start + c) - digamma(start));
    Ok((log_sum - tail).exp())
}

/// Growth envelope `t^((1-p)/2) (ln t)^p` controlling the mixed-regime
/// expected degree; defined for `p in (0, 1)` and `t >= 2`.
pub fn expected_degree_envelope(p: f64, t: u64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid("p", format!("envelope requires p in (0, 1), got {p}")));
    }
    if t < 2 {
        return Err(Error::invalid("t", "need t >= 2"));
    }
    let tf = t as f64;
    Ok(tf.powf((1.0 - p) / 2.0) * tf.ln().powf(p))
}
