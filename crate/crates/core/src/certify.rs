//! Certification entry points: robust coherent certification through amplitude
//! encoding, its one-sided and norm-family variants, and the ancilla-free
//! stabilizer certifier.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::amplitude::{hae_signal_amplitude, HaeMode, ResidualBudget};
use crate::error::{Error, Result};
use crate::evolution::{choose_trotter_steps, EvolutionAccess, LedgerSnapshot};
use crate::hamiltonian::PauliHamiltonian;
use crate::sampling::hss_batch_probability;
use crate::stabilizer::GroupKind;
use crate::stats::{
    amp_test, bernoulli_test, AmpEstConfig, BernoulliPlan, ExactBernoulli, QueryLedger, Verdict,
};

pub const SCHEMA_VERSION: &str = "v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Accept,
    Reject,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rchc,
    Chc,
    Shc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormFamily {
    Frobenius,
    Pauli,
    Schatten,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Params {
    pub m: usize,
    pub bound: f64,
    pub eps1: Option<f64>,
    pub eps2: Option<f64>,
    pub eps: Option<f64>,
    pub delta: f64,
    pub norm: NormFamily,
    pub p: Option<f64>,
}

/// One threshold test inside a certification run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub round: Option<GroupKind>,
    /// Binary-check index; `0` is the final check.
    pub j: Option<u32>,
    pub b: Option<f64>,
    pub t: f64,
    pub r: u64,
    pub threshold_large: f64,
    pub threshold_small: f64,
    pub label: Verdict,
    #[serde(flatten)]
    pub ledger: LedgerSnapshot,
}

/// Flat record: ledger and parameters sit beside the verdict; `trace` lists the individual checks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificationReport {
    pub schema_version: &'static str,
    pub method: Method,
    pub verdict: Decision,
    #[serde(flatten)]
    pub ledger: LedgerSnapshot,
    #[serde(flatten)]
    pub params: Params,
    pub trace: Vec<CheckRecord>,
    pub seed: u64,
}

impl CertificationReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// `(c₁, c₂)` for `η = (ε₂ − ε₁)/ε₁`.
pub fn rchc_constants(eta: f64) -> (f64, f64) {
    if eta <= 1.0 {
        (
            eta + 0.32 * eta * eta,
            eta + 0.68 * eta * eta - 0.32 * eta.powi(3),
        )
    } else {
        (1.32, 0.68 + 0.68 * eta)
    }
}

/// Scale applied to the amplitude thresholds `cᵢε₁/(m₀^{3/2}B₀)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdScale {
    /// Nominal `cᵢε₁/(m₀^{3/2}B₀)`, without the factor `½` carried by `t`.
    Literal,
    /// Multiplied by `½`, matching the signal at `t = ξ/(2m₀^{3/2}B₀)`.
    Halved,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RchcOptions {
    pub mode: HaeMode,
    pub amp: AmpEstConfig,
    pub thresholds: ThresholdScale,
}

impl Default for RchcOptions {
    fn default() -> Self {
        Self {
            mode: HaeMode::Pauli,
            amp: AmpEstConfig::default(),
            thresholds: ThresholdScale::Halved,
        }
    }
}

/// Derived schedule of a robust coherent run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RchcPlan {
    pub m0: f64,
    pub b0: f64,
    pub eta: f64,
    pub xi: f64,
    pub c1: f64,
    pub c2: f64,
    pub t: f64,
    pub r: u64,
    /// Large side, `c₂ε₁/(m₀^{3/2}B₀)` times the threshold scale.
    pub a: f64,
    /// Small side, `c₁ε₁/(m₀^{3/2}B₀)` times the threshold scale.
    pub b: f64,
}

pub fn rchc_plan(
    h0: &PauliHamiltonian<f64>,
    m: usize,
    bound: f64,
    eps1: f64,
    eps2: f64,
    scale: ThresholdScale,
) -> Result<RchcPlan> {
    if m == 0 || !(bound > 0.0) {
        return Err(Error::InvalidInput(format!(
            "need m ≥ 1 and B > 0, got m={m}, B={bound}"
        )));
    }
    if !(0.0 < eps1 && eps1 < eps2 && eps2 < 1.0) {
        return Err(Error::InvalidInput(format!(
            "need 0 < ε₁ < ε₂ < 1, got {eps1}, {eps2}"
        )));
    }
    let m0 = 2.0 * m as f64;
    let b0 = 2.0 * bound;
    let eta = (eps2 - eps1) / eps1;
    let xi = eta.min(1.0);
    let (c1, c2) = rchc_constants(eta);
    let scale_m = m0.powf(1.5);
    let t = xi / (2.0 * scale_m * b0);
    let target = xi * xi / 64.0 / (2.0 * scale_m);
    let r = choose_trotter_steps(m0, b0, h0.l1_norm(), t, target)?;
    let k = match scale {
        ThresholdScale::Literal => 1.0,
        ThresholdScale::Halved => 0.5,
    };
    let a = k * c2 * eps1 / (scale_m * b0);
    let b = k * c1 * eps1 / (scale_m * b0);
    Ok(RchcPlan {
        m0,
        b0,
        eta,
        xi,
        c1,
        c2,
        t,
        r,
        a,
        b,
    })
}

/// Charges amplitude-estimation queries as encoding-circuit runs; the first run is the one
/// already built to read the amplitude.
struct CircuitQueries<'a, O> {
    oracle: &'a mut O,
    t: f64,
    r: u64,
    prepaid: u64,
}

impl<O: EvolutionAccess<f64>> QueryLedger for CircuitQueries<'_, O> {
    fn charge_queries(&mut self, count: u64) -> Result<()> {
        let used = count.min(self.prepaid);
        self.prepaid -= used;
        if count > used {
            self.oracle
                .evolve_repeated(self.t / self.r as f64, true, (count - used) * self.r)?;
        }
        Ok(())
    }

    fn charge_measurements(&mut self, count: u64) -> Result<()> {
        self.oracle.record_measurements(count);
        Ok(())
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 1.0 / 3.0) {
        return Err(Error::InvalidInput(format!(
            "failure probability {delta} outside (0,1/3]"
        )));
    }
    Ok(())
}

fn check_oracle(h0: &PauliHamiltonian<f64>, o: &impl EvolutionAccess<f64>) -> Result<()> {
    if h0.n() != o.n() {
        return Err(Error::DimensionMismatch(format!(
            "H₀ on {} qubits, oracle on {}",
            h0.n(),
            o.n()
        )));
    }
    Ok(())
}

/// Robust coherent certification with default options.
#[allow(clippy::too_many_arguments)]
pub fn rchc(
    h0: &PauliHamiltonian<f64>,
    o: &mut impl EvolutionAccess<f64>,
    m: usize,
    bound: f64,
    eps1: f64,
    eps2: f64,
    delta: f64,
    seed: u64,
) -> Result<CertificationReport> {
    rchc_with(
        h0,
        o,
        m,
        bound,
        eps1,
        eps2,
        delta,
        seed,
        &RchcOptions::default(),
    )
}

#[allow(clippy::too_many_arguments)]
pub fn rchc_with(
    h0: &PauliHamiltonian<f64>,
    o: &mut impl EvolutionAccess<f64>,
    m: usize,
    bound: f64,
    eps1: f64,
    eps2: f64,
    delta: f64,
    seed: u64,
    opts: &RchcOptions,
) -> Result<CertificationReport> {
    check_delta(delta)?;
    check_oracle(h0, o)?;
    let plan = rchc_plan(h0, m, bound, eps1, eps2, opts.thresholds)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = o.ledger().snapshot();
    let budget = ResidualBudget {
        m0: plan.m0,
        b0: plan.b0,
    };
    let hae = hae_signal_amplitude(h0, o, plan.t, plan.r, opts.mode, budget)?;
    let p = (hae.p1 * hae.p1).min(1.0);
    let mut queries = CircuitQueries {
        oracle: o,
        t: plan.t,
        r: plan.r,
        prepaid: 1,
    };
    let verdict = amp_test(p, plan.a, plan.b, delta, &mut queries, &mut rng, &opts.amp)?;
    let ledger = o.ledger().snapshot().since(&start);
    let record = CheckRecord {
        round: None,
        j: None,
        b: None,
        t: plan.t,
        r: plan.r,
        threshold_large: plan.a,
        threshold_small: plan.b,
        label: verdict.label,
        ledger,
    };
    Ok(CertificationReport {
        schema_version: SCHEMA_VERSION,
        method: Method::Rchc,
        verdict: if verdict.label == Verdict::Large {
            Decision::Reject
        } else {
            Decision::Accept
        },
        ledger,
        params: Params {
            m,
            bound,
            eps1: Some(eps1),
            eps2: Some(eps2),
            eps: None,
            delta,
            norm: NormFamily::Frobenius,
            p: None,
        },
        trace: vec![record],
        seed,
    })
}

/// One-sided coherent certification: robust certification at `(ε/2, ε)`.
#[allow(clippy::too_many_arguments)]
pub fn chc(
    h0: &PauliHamiltonian<f64>,
    o: &mut impl EvolutionAccess<f64>,
    m: usize,
    bound: f64,
    eps: f64,
    delta: f64,
    seed: u64,
) -> Result<CertificationReport> {
    chc_with(h0, o, m, bound, eps, delta, seed, &RchcOptions::default())
}

#[allow(clippy::too_many_arguments)]
pub fn chc_with(
    h0: &PauliHamiltonian<f64>,
    o: &mut impl EvolutionAccess<f64>,
    m: usize,
    bound: f64,
    eps: f64,
    delta: f64,
    seed: u64,
    opts: &RchcOptions,
) -> Result<CertificationReport> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidInput(format!("ε = {eps} outside (0,1)")));
    }
    let mut report = rchc_with(h0, o, m, bound, eps / 2.0, eps, delta, seed, opts)?;
    report.method = Method::Chc;
    report.params.eps = Some(eps);
    Ok(report)
}

/// Threshold handed to [`chc`] when certifying in the Pauli `p`-norm.
pub fn pauli_norm_threshold(p: f64, m: usize, eps: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidInput(format!("Pauli norm index {p} below 1")));
    }
    Ok(if p >= 2.0 {
        eps
    } else {
        (m as f64).powf(0.5 - 1.0 / p) * eps
    })
}

#[allow(clippy::too_many_arguments)]
pub fn certify_pauli_norm(
    p: f64,
    h0: &PauliHamiltonian<f64>,
    o: &mut impl EvolutionAccess<f64>,
    m: usize,
    bound: f64,
    eps: f64,
    delta: f64,
    seed: u64,
) -> Result<CertificationReport> {
    let inner = pauli_norm_threshold(p, m, eps)?;
    let mut report = chc(h0, o, m, bound, inner, delta, seed)?;
    report.params.norm = NormFamily::Pauli;
    report.params.p = Some(p);
    report.params.eps = Some(eps);
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
pub fn certify_schatten_norm(
    p: f64,
    h0: &PauliHamiltonian<f64>,
    o: &mut impl EvolutionAccess<f64>,
    m: usize,
    bound: f64,
    eps: f64,
    delta: f64,
    seed: u64,
) -> Result<CertificationReport> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidInput(format!(
            "Schatten norm index {p} below 1"
        )));
    }
    if p > 2.0 {
        return Err(Error::Unsupported(format!(
            "Schatten {p}-norm certification"
        )));
    }
    let mut report = chc(h0, o, m, bound, eps, delta, seed)?;
    report.params.norm = NormFamily::Schatten;
    report.params.p = Some(p);
    Ok(report)
}

/// One binary or final check of the stabilizer certifier.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShcCheck {
    pub round: GroupKind,
    pub j: u32,
    pub b: Option<f64>,
    pub t: f64,
    pub r: u64,
    pub threshold_large: f64,
    pub threshold_small: f64,
    pub delta: f64,
    pub plan: BernoulliPlan,
}

/// Full check schedule in execution order.
pub fn shc_schedule(
    h0: &PauliHamiltonian<f64>,
    m: usize,
    bound: f64,
    eps: f64,
    delta: f64,
) -> Result<Vec<ShcCheck>> {
    if m == 0 || !(bound > 0.0) {
        return Err(Error::InvalidInput(format!(
            "need m ≥ 1 and B > 0, got m={m}, B={bound}"
        )));
    }
    if !(eps > 0.0 && eps < 0.25) {
        return Err(Error::InvalidInput(format!("ε = {eps} outside (0,1/4)")));
    }
    check_delta(delta)?;
    let m0 = 2.0 * m as f64;
    let b0 = 2.0 * bound;
    let m3 = m0.powi(3);
    let k = (bound / eps).log2().ceil().max(0.0) as u32;
    let delta_check = delta / (2.0 * (k as f64 + 1.0));
    let target = 0.001 / (m3 * b0);
    let norm_h0 = h0.l1_norm();
    let mut out = Vec::new();
    for round in [GroupKind::AllZ, GroupKind::AllX] {
        for j in (1..=k).rev() {
            let b = 2f64.powi(j as i32 + 1) * eps;
            let t = 1.0 / (2.0 * m0.powf(1.5) * b);
            let (hi, lo) = (0.025 / m3, 0.02 / m3);
            out.push(ShcCheck {
                round,
                j,
                b: Some(b),
                t,
                r: choose_trotter_steps(m0, b0, norm_h0, t, target)?,
                threshold_large: hi,
                threshold_small: lo,
                delta: delta_check,
                plan: BernoulliPlan::new(hi, lo, delta_check)?,
            });
        }
        let t = 1.0 / (4.0 * m0.powf(1.5) * eps);
        let (hi, lo) = (0.12 / m3, 0.09 / m3);
        out.push(ShcCheck {
            round,
            j: 0,
            b: None,
            t,
            r: choose_trotter_steps(m0, b0, norm_h0, t, target)?,
            threshold_large: hi,
            threshold_small: lo,
            delta: delta_check,
            plan: BernoulliPlan::new(hi, lo, delta_check)?,
        });
    }
    Ok(out)
}

/// Stabilizer certification using only positive-time, uncontrolled oracle calls.
#[allow(clippy::too_many_arguments)]
pub fn shc(
    h0: &PauliHamiltonian<f64>,
    o: &mut impl EvolutionAccess<f64>,
    m: usize,
    bound: f64,
    eps: f64,
    delta: f64,
    seed: u64,
) -> Result<CertificationReport> {
    check_oracle(h0, o)?;
    let schedule = shc_schedule(h0, m, bound, eps, delta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = o.ledger().snapshot();
    let mut trace = Vec::new();
    let mut verdict = Decision::Accept;
    for check in schedule {
        let before = o.ledger().snapshot();
        let g = check.round.group(h0.n());
        let p = hss_batch_probability(&g, h0, o, check.t, check.r, check.plan.samples())?;
        let mut bits = ExactBernoulli { p, rng: &mut rng };
        let v = bernoulli_test(
            &mut bits,
            check.threshold_large,
            check.threshold_small,
            check.delta,
        )?;
        trace.push(CheckRecord {
            round: Some(check.round),
            j: Some(check.j),
            b: check.b,
            t: check.t,
            r: check.r,
            threshold_large: check.threshold_large,
            threshold_small: check.threshold_small,
            label: v.label,
            ledger: o.ledger().snapshot().since(&before),
        });
        if v.label == Verdict::Large {
            verdict = Decision::Reject;
            break;
        }
    }
    Ok(CertificationReport {
        schema_version: SCHEMA_VERSION,
        method: Method::Shc,
        verdict,
        ledger: o.ledger().snapshot().since(&start),
        params: Params {
            m,
            bound,
            eps1: None,
            eps2: None,
            eps: Some(eps),
            delta,
            norm: NormFamily::Frobenius,
            p: None,
        },
        trace,
        seed,
    })
}
