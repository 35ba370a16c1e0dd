//! The black-box evolution oracle, its resource ledger, second-order Trotter
//! composition and Trotter error bounds.

use std::ops::Add;
use std::path::Path;

use num_traits::{FromPrimitive, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::dense::{hermitian_expm, DenseOperator, HermitianEigen};
use crate::error::{Error, Result};
use crate::hamiltonian::PauliHamiltonian;
use crate::scalar::{lit, to_f64, Real};

/// Running totals of queried evolution time, oracle calls and measurements.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeLedger<D> {
    total_time: D,
    queries: u64,
    controlled_queries: u64,
    negative_time_queries: u64,
    measurements: u64,
}

impl<D> Default for TimeLedger<D>
where
    D: Clone + Zero + Signed + PartialOrd + FromPrimitive,
{
    fn default() -> Self {
        Self::new()
    }
}

impl<D> TimeLedger<D>
where
    D: Clone + Zero + Signed + PartialOrd + FromPrimitive,
{
    pub fn new() -> Self {
        Self {
            total_time: D::zero(),
            queries: 0,
            controlled_queries: 0,
            negative_time_queries: 0,
            measurements: 0,
        }
    }

    /// Charges one call of duration `t`.
    pub fn record_call(&mut self, t: D, controlled: bool) {
        self.record_calls(t, controlled, 1);
    }

    /// Charges `count` identical calls of duration `t`.
    pub fn record_calls(&mut self, t: D, controlled: bool, count: u64) {
        if count == 0 {
            return;
        }
        if t.is_negative() {
            self.negative_time_queries += count;
        }
        let k = D::from_u64(count).expect("call count representable");
        self.total_time = self.total_time.clone() + k * t.abs();
        self.queries += count;
        if controlled {
            self.controlled_queries += count;
        }
    }

    pub fn record_measurements(&mut self, count: u64) {
        self.measurements += count;
    }

    /// Field-wise sum with another ledger.
    pub fn merge(&mut self, other: &Self) {
        self.total_time = self.total_time.clone() + other.total_time.clone();
        self.queries += other.queries;
        self.controlled_queries += other.controlled_queries;
        self.negative_time_queries += other.negative_time_queries;
        self.measurements += other.measurements;
    }

    pub fn total_time(&self) -> D {
        self.total_time.clone()
    }
    pub fn queries(&self) -> u64 {
        self.queries
    }
    pub fn controlled_queries(&self) -> u64 {
        self.controlled_queries
    }
    pub fn negative_time_queries(&self) -> u64 {
        self.negative_time_queries
    }
    pub fn measurements(&self) -> u64 {
        self.measurements
    }
}

impl<T: Real> TimeLedger<T> {
    pub fn snapshot(&self) -> LedgerSnapshot {
        LedgerSnapshot {
            total_time: to_f64(self.total_time),
            queries: self.queries,
            controlled_queries: self.controlled_queries,
            negative_time_queries: self.negative_time_queries,
            measurements: self.measurements,
        }
    }
}

/// Plain-number view of a ledger for reports.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LedgerSnapshot {
    pub total_time: f64,
    pub queries: u64,
    pub controlled_queries: u64,
    pub negative_time_queries: u64,
    pub measurements: u64,
}

impl LedgerSnapshot {
    /// Field-wise difference `self − earlier`.
    pub fn since(&self, earlier: &LedgerSnapshot) -> LedgerSnapshot {
        LedgerSnapshot {
            total_time: self.total_time - earlier.total_time,
            queries: self.queries - earlier.queries,
            controlled_queries: self.controlled_queries - earlier.controlled_queries,
            negative_time_queries: self.negative_time_queries - earlier.negative_time_queries,
            measurements: self.measurements - earlier.measurements,
        }
    }
}

impl Add for LedgerSnapshot {
    type Output = LedgerSnapshot;
    fn add(self, o: LedgerSnapshot) -> LedgerSnapshot {
        LedgerSnapshot {
            total_time: self.total_time + o.total_time,
            queries: self.queries + o.queries,
            controlled_queries: self.controlled_queries + o.controlled_queries,
            negative_time_queries: self.negative_time_queries + o.negative_time_queries,
            measurements: self.measurements + o.measurements,
        }
    }
}

/// Everything certifier code may do with the unknown Hamiltonian.
pub trait EvolutionAccess<T: Real> {
    fn n(&self) -> usize;

    /// One call: `e^{−iHt}`, or `|0⟩⟨0|⊗I + |1⟩⟨1|⊗e^{−iHt}` with the control as the first qubit.
    fn evolve(&mut self, t: T, controlled: bool) -> Result<DenseOperator<T>> {
        self.evolve_repeated(t, controlled, 1)
    }

    /// `count` identical calls; returns the unitary of a single call.
    fn evolve_repeated(&mut self, t: T, controlled: bool, count: u64) -> Result<DenseOperator<T>>;

    fn record_measurements(&mut self, count: u64);

    fn ledger(&self) -> &TimeLedger<T>;
}

struct Sealed<T: Real> {
    eigen: HermitianEigen<T>,
}

/// Time-evolution oracle for a hidden Hamiltonian.
pub struct EvolutionOracle<T: Real> {
    sealed: Sealed<T>,
    n: usize,
    ledger: TimeLedger<T>,
    max_duration: Option<T>,
}

impl<T: Real> EvolutionOracle<T> {
    /// Seals `h`; the terms are not retained.
    pub fn new(h: PauliHamiltonian<T>) -> Result<Self> {
        let eigen = HermitianEigen::new(&h.to_dense()?)?;
        Ok(Self {
            sealed: Sealed { eigen },
            n: h.n(),
            ledger: TimeLedger::new(),
            max_duration: None,
        })
    }

    /// Reads the hidden Hamiltonian from a file and seals it.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::new(PauliHamiltonian::read(path)?)
    }

    /// Caps `|t|` for a single call.
    pub fn with_max_duration(mut self, max: T) -> Self {
        self.max_duration = Some(max);
        self
    }
}

impl<T: Real> EvolutionAccess<T> for EvolutionOracle<T> {
    fn n(&self) -> usize {
        self.n
    }

    fn evolve_repeated(&mut self, t: T, controlled: bool, count: u64) -> Result<DenseOperator<T>> {
        if !t.is_finite() {
            return Err(Error::InvalidInput(format!("duration {t}")));
        }
        if let Some(max) = self.max_duration {
            if t.abs() > max {
                return Err(Error::Config(format!(
                    "duration {t} exceeds the per-call cap {max}"
                )));
            }
        }
        let u = self.sealed.eigen.exp_neg_i(t);
        self.ledger.record_calls(t, controlled, count);
        Ok(if controlled {
            controlled_unitary(&u)
        } else {
            u
        })
    }

    fn record_measurements(&mut self, count: u64) {
        self.ledger.record_measurements(count);
    }

    fn ledger(&self) -> &TimeLedger<T> {
        &self.ledger
    }
}

/// `|0⟩⟨0|⊗I + |1⟩⟨1|⊗U` with the control as the most significant qubit.
pub fn controlled_unitary<T: Real>(u: &DenseOperator<T>) -> DenseOperator<T> {
    let d = u.dim();
    DenseOperator::from_fn(2 * d, |i, j| match (i < d, j < d) {
        (true, true) => {
            if i == j {
                num_traits::One::one()
            } else {
                Zero::zero()
            }
        }
        (false, false) => u.get(i - d, j - d),
        _ => Zero::zero(),
    })
}

pub fn oracle_apply<T: Real>(
    o: &mut impl EvolutionAccess<T>,
    t: T,
    controlled: bool,
) -> Result<DenseOperator<T>> {
    o.evolve(t, controlled)
}

/// `(e^{iH₀t/2r} 𝒪_H(t/r) e^{iH₀t/2r})^r`, approximating `e^{−i(H−H₀)t}`.
pub fn trotter_u2<T: Real>(
    h0: &PauliHamiltonian<T>,
    o: &mut impl EvolutionAccess<T>,
    t: T,
    r: u64,
) -> Result<DenseOperator<T>> {
    trotter_u2_repeated(h0, o, t, r, 1)
}

/// As [`trotter_u2`], charging the ledger for `reps` executions of the circuit.
pub fn trotter_u2_repeated<T: Real>(
    h0: &PauliHamiltonian<T>,
    o: &mut impl EvolutionAccess<T>,
    t: T,
    r: u64,
    reps: u64,
) -> Result<DenseOperator<T>> {
    if r == 0 {
        return Err(Error::InvalidInput(
            "Trotter steps must be at least 1".into(),
        ));
    }
    if h0.n() != o.n() {
        return Err(Error::DimensionMismatch(format!(
            "H₀ on {} qubits, oracle on {}",
            h0.n(),
            o.n()
        )));
    }
    let dt = t / lit(r as f64);
    let half = hermitian_expm(&h0.to_dense()?, -dt / lit(2.0))?;
    let step = o.evolve_repeated(dt, false, r * reps)?;
    Ok(half.mul(&step)?.mul(&half)?.pow(r))
}

/// `(e^{−iBδ/2} e^{−iAδ} e^{−iBδ/2})^r` with `δ = t/r`.
pub fn strang_product<T: Real>(
    a: &DenseOperator<T>,
    b: &DenseOperator<T>,
    t: T,
    r: u64,
) -> Result<DenseOperator<T>> {
    let dt = t / lit(r as f64);
    let half = hermitian_expm(b, dt / lit(2.0))?;
    let mid = hermitian_expm(a, dt)?;
    Ok(half.mul(&mid)?.mul(&half)?.pow(r))
}

/// `t³/(12r²)‖[A,[A,B]]‖ + t³/(24r²)‖[B,[B,A]]‖` for the product in [`strang_product`].
pub fn trotter_error_bound<T: Real>(
    a: &PauliHamiltonian<T>,
    b: &PauliHamiltonian<T>,
    t: T,
    r: u64,
) -> Result<T> {
    trotter_error_bound_dense(&a.to_dense()?, &b.to_dense()?, t, r)
}

pub fn trotter_error_bound_dense<T: Real>(
    a: &DenseOperator<T>,
    b: &DenseOperator<T>,
    t: T,
    r: u64,
) -> Result<T> {
    let aab = a.commutator(&a.commutator(b)?)?.operator_norm();
    let bba = b.commutator(&b.commutator(a)?)?.operator_norm();
    let t3 = t.abs().powi(3);
    let r2: T = lit((r as f64).powi(2));
    Ok(t3 / (lit::<T>(12.0) * r2) * aab + t3 / (lit::<T>(24.0) * r2) * bba)
}

/// Worst-case Trotter error of [`trotter_u2`] from certifier-visible quantities: a residual of
/// at most `m0` terms with largest coefficient `s`, and `‖H₀‖ ≤ norm_h0`.
pub fn residual_trotter_bound(m0: f64, s: f64, norm_h0: f64, t: f64, r: u64) -> f64 {
    let res = m0 * s;
    let t3 = t.abs().powi(3) / (r as f64).powi(2);
    t3 * res * norm_h0 * ((norm_h0 + res) / 3.0 + norm_h0 / 6.0)
}

/// Smallest `r` with `residual_trotter_bound(m0, B0, ‖H₀‖, t, r)/B0 ≤ target_coefficient`.
pub fn choose_trotter_steps(
    m0: f64,
    b0: f64,
    norm_h0: f64,
    t: f64,
    target_coefficient: f64,
) -> Result<u64> {
    const MAX_STEPS: u64 = 1 << 40;
    let per_unit = |r: u64| {
        if b0 == 0.0 {
            0.0
        } else {
            residual_trotter_bound(m0, b0, norm_h0, t, r) / b0
        }
    };
    if target_coefficient.is_nan() {
        return Err(Error::Config("Trotter target is NaN".into()));
    }
    if per_unit(1) <= target_coefficient {
        return Ok(1);
    }
    if target_coefficient <= 0.0 {
        return Err(Error::Config(format!(
            "Trotter target {target_coefficient} is unreachable"
        )));
    }
    let mut hi = 2u64;
    while per_unit(hi) > target_coefficient {
        if hi >= MAX_STEPS {
            return Err(Error::Config(format!(
                "Trotter target {target_coefficient} needs more than {MAX_STEPS} steps"
            )));
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if per_unit(mid) <= target_coefficient {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `‖e^{−iH_res t} − U₂‖` for a known residual; analysis only.
pub fn measured_trotter_error<T: Real>(
    h: &PauliHamiltonian<T>,
    h0: &PauliHamiltonian<T>,
    t: T,
    r: u64,
) -> Result<T> {
    let res = crate::hamiltonian::residual(h, h0)?;
    let exact = hermitian_expm(&res.to_dense()?, t)?;
    let approx = strang_product(
        &h.to_dense()?,
        &h0.to_dense()?.scale(crate::scalar::cre(-T::one())),
        t,
        r,
    )?;
    crate::dense::operator_norm_distance(&exact, &approx)
}
