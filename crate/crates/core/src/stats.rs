//! Distribution distances, the batched likelihood-ratio Bernoulli test, and a
//! contract-level simulation of square-root amplitude estimation.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::error::{Error, Result};

const NORMALIZATION_TOL: f64 = 1e-9;

fn check_distribution(p: &[f64]) -> Result<()> {
    let total: f64 = p.iter().sum();
    if p.iter().any(|x| !(*x >= -NORMALIZATION_TOL)) || (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::InvalidInput(format!(
            "not a probability distribution (sum {total})"
        )));
    }
    Ok(())
}

fn check_pair(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(format!(
            "supports of size {} and {}",
            p.len(),
            q.len()
        )));
    }
    check_distribution(p)?;
    check_distribution(q)
}

/// `d_H = √(1 − Σ√(pᵢqᵢ))`.
pub fn hellinger(p: &[f64], q: &[f64]) -> Result<f64> {
    check_pair(p, q)?;
    let bc: f64 = p
        .iter()
        .zip(q)
        .map(|(a, b)| (a.max(0.0) * b.max(0.0)).sqrt())
        .sum();
    Ok((1.0 - bc).clamp(0.0, 1.0).sqrt())
}

/// `½ Σ|pᵢ − qᵢ|`.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(format!(
            "supports of size {} and {}",
            p.len(),
            q.len()
        )));
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Large,
    Small,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TestVerdict {
    pub label: Verdict,
    pub samples_used: u64,
    pub queries_used: u64,
}

/// Source of i.i.d. Bernoulli samples.
pub trait BitSource {
    fn next_bit(&mut self) -> Result<bool>;

    /// Number of ones among the next `len` samples.
    fn count_ones(&mut self, len: u64) -> Result<u64> {
        let mut k = 0;
        for _ in 0..len {
            k += self.next_bit()? as u64;
        }
        Ok(k)
    }
}

/// Bernoulli(`p`) samples drawn directly from an RNG.
pub struct ExactBernoulli<'a, R: Rng> {
    pub p: f64,
    pub rng: &'a mut R,
}

impl<R: Rng> BitSource for ExactBernoulli<'_, R> {
    fn next_bit(&mut self) -> Result<bool> {
        Ok(self.rng.random::<f64>() < self.p)
    }

    fn count_ones(&mut self, len: u64) -> Result<u64> {
        binomial(len, self.p, self.rng)
    }
}

pub(crate) fn binomial(len: u64, p: f64, rng: &mut impl Rng) -> Result<u64> {
    let d = Binomial::new(len, p.clamp(0.0, 1.0))
        .map_err(|e| Error::InvalidInput(format!("binomial: {e}")))?;
    Ok(d.sample(rng))
}

/// Likelihood comparisons per voting round.
pub const COMPARISONS_PER_ROUND: u64 = 36;

/// Sample schedule of [`bernoulli_test`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BernoulliPlan {
    pub batch: u64,
    pub comparisons_per_round: u64,
    pub rounds: u64,
}

impl BernoulliPlan {
    pub fn new(a: f64, b: f64, delta: f64) -> Result<Self> {
        if !(0.0 <= b && b < a && a <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "need 0 ≤ b < a ≤ 1, got a={a}, b={b}"
            )));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidInput(format!(
                "failure probability {delta} outside (0,1)"
            )));
        }
        let gap = a.sqrt() - b.sqrt();
        let batch = (4.0 / (gap * gap)).ceil() as u64;
        let rounds = 2 * (1.0 / delta).log2().ceil() as u64;
        Ok(Self {
            batch,
            comparisons_per_round: COMPARISONS_PER_ROUND,
            rounds: rounds.max(1),
        })
    }

    pub fn samples(&self) -> u64 {
        self.batch * self.comparisons_per_round * self.rounds
    }
}

fn log_likelihood(k: u64, len: u64, p: f64) -> f64 {
    let ones = if k > 0 { k as f64 * p.ln() } else { 0.0 };
    let zeros = if len > k {
        (len - k) as f64 * (1.0 - p).ln()
    } else {
        0.0
    };
    ones + zeros
}

/// `a^k(1−a)^{ℓ−k} ≥ b^k(1−b)^{ℓ−k}`.
pub fn favors_large(k: u64, len: u64, a: f64, b: f64) -> bool {
    log_likelihood(k, len, a) >= log_likelihood(k, len, b)
}

/// Decides `p ≥ a` versus `p ≤ b` by majority over rounds of batched likelihood comparisons.
pub fn bernoulli_test(
    sampler: &mut impl BitSource,
    a: f64,
    b: f64,
    delta: f64,
) -> Result<TestVerdict> {
    let plan = BernoulliPlan::new(a, b, delta)?;
    let mut round_means = 0.0;
    for _ in 0..plan.rounds {
        let mut wins = 0u64;
        for _ in 0..plan.comparisons_per_round {
            let k = sampler.count_ones(plan.batch)?;
            wins += favors_large(k, plan.batch, a, b) as u64;
        }
        round_means += wins as f64 / plan.comparisons_per_round as f64;
    }
    let label = if round_means / plan.rounds as f64 > 0.5 {
        Verdict::Large
    } else {
        Verdict::Small
    };
    Ok(TestVerdict {
        label,
        samples_used: plan.samples(),
        queries_used: 0,
    })
}

/// Receives the query and measurement charges of amplitude estimation.
pub trait QueryLedger {
    fn charge_queries(&mut self, count: u64) -> Result<()>;
    fn charge_measurements(&mut self, count: u64) -> Result<()>;
}

/// Plain counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueryCounter {
    pub queries: u64,
    pub measurements: u64,
}

impl QueryLedger for QueryCounter {
    fn charge_queries(&mut self, count: u64) -> Result<()> {
        self.queries += count;
        Ok(())
    }
    fn charge_measurements(&mut self, count: u64) -> Result<()> {
        self.measurements += count;
        Ok(())
    }
}

/// Output on the failure branch of the estimator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureOutput {
    Uniform,
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AmpEstConfig {
    /// Query constant in `⌈C_q ln(1/δ)/ε⌉`.
    pub c_q: f64,
    pub failure: FailureOutput,
}

impl Default for AmpEstConfig {
    fn default() -> Self {
        Self {
            c_q: 8.0,
            failure: FailureOutput::Uniform,
        }
    }
}

impl AmpEstConfig {
    pub fn queries(&self, eps: f64, delta: f64) -> u64 {
        (self.c_q * (1.0 / delta).ln() / eps).ceil() as u64
    }

    pub fn measurements(eps: f64, delta: f64) -> u64 {
        ((1.0 / eps).log2() + (1.0 / delta).log2()).ceil().max(0.0) as u64
    }
}

/// Estimate `μ` of `√p`: within `ε` with probability `1−δ`, otherwise arbitrary.
pub fn sqrt_amp_est_sim(
    p_true: f64,
    eps: f64,
    delta: f64,
    ledger: &mut impl QueryLedger,
    rng: &mut impl Rng,
    cfg: &AmpEstConfig,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_true) {
        return Err(Error::InvalidInput(format!(
            "probability {p_true} outside [0,1]"
        )));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidInput(format!(
            "precision {eps} must be positive"
        )));
    }
    if !(delta > 0.0 && delta < 1.0 / 3.0) {
        return Err(Error::InvalidInput(format!(
            "failure probability {delta} outside (0,1/3)"
        )));
    }
    ledger.charge_queries(cfg.queries(eps, delta))?;
    ledger.charge_measurements(AmpEstConfig::measurements(eps, delta))?;
    let good = rng.random::<f64>() >= delta;
    let mu = if good {
        let s = p_true.sqrt();
        let (lo, hi) = ((s - eps).max(0.0), (s + eps).min(1.0));
        lo + (hi - lo) * rng.random::<f64>()
    } else {
        match cfg.failure {
            FailureOutput::Uniform => rng.random::<f64>(),
            FailureOutput::Fixed(v) => v,
        }
    };
    Ok(mu)
}

/// Decides `√p ≥ a` versus `√p ≤ b` with one estimate at precision `(a−b)/3`.
pub fn amp_test(
    p_true: f64,
    a: f64,
    b: f64,
    delta: f64,
    ledger: &mut impl QueryLedger,
    rng: &mut impl Rng,
    cfg: &AmpEstConfig,
) -> Result<TestVerdict> {
    if !(0.0 <= b && b < a && a <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "need 0 ≤ b < a ≤ 1, got a={a}, b={b}"
        )));
    }
    let eps = (a - b) / 3.0;
    let mu = sqrt_amp_est_sim(p_true, eps, delta, ledger, rng, cfg)?;
    let label = if mu >= (a + b) / 2.0 {
        Verdict::Large
    } else {
        Verdict::Small
    };
    Ok(TestVerdict {
        label,
        samples_used: AmpEstConfig::measurements(eps, delta),
        queries_used: cfg.queries(eps, delta),
    })
}
