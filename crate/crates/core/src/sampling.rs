//! Stabilizer Bernoulli sampling of a unitary and its Hamiltonian variant built on the
//! Trotterized residual evolution.

use rand::Rng;
use serde::Serialize;

use crate::dense::{hermitian_expm, DenseOperator};
use crate::error::{Error, Result};
use crate::evolution::{trotter_u2_repeated, EvolutionAccess};
use crate::hamiltonian::{remainder_r, PauliHamiltonian};
use crate::pauli::{apply_pauli, pauli_decompose, PauliString};
use crate::scalar::{lit, to_f64, Real};
use crate::stabilizer::{
    anticommutant_representative, sample_index, stabilizer_state, syndrome_distribution,
    syndrome_of, MaximalStabilizerGroup, Syndrome,
};

/// Unitarity slack in units of the scalar's machine epsilon, floored at `1e-9`.
const UNITARY_ULPS: f64 = 1e4;
const UNITARY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SbsOutcome {
    pub z: bool,
    pub theta: PauliString,
    pub syndrome: Syndrome,
}

/// Exact per-`θ` syndrome distributions of `U P_θ|ψ₀⟩`, from which samples are drawn.
pub struct SbsSampler {
    n: usize,
    thetas: Vec<PauliString>,
    distributions: Vec<Vec<f64>>,
}

impl SbsSampler {
    pub fn new<T: Real>(u: &DenseOperator<T>, g: &MaximalStabilizerGroup) -> Result<Self> {
        check_inputs(u, g)?;
        let n = g.n();
        let psi0 = stabilizer_state::<T>(g)?;
        let mut thetas = Vec::with_capacity(1 << n);
        let mut distributions = Vec::with_capacity(1 << n);
        for bits in 0..1u64 << n {
            let theta = anticommutant_representative(g, &Syndrome::new(n, bits))?;
            let psi = u.apply(&apply_pauli(&theta, &psi0)?)?;
            distributions.push(
                syndrome_distribution(&psi, g)?
                    .into_iter()
                    .map(to_f64)
                    .collect(),
            );
            thetas.push(theta);
        }
        Ok(Self {
            n,
            thetas,
            distributions,
        })
    }

    /// One run: uniform `θ`, then a syndrome from the exact distribution.
    pub fn sample(&self, rng: &mut impl Rng) -> SbsOutcome {
        let k = rng.random_range(0..self.thetas.len());
        let observed = Syndrome::new(self.n, sample_index(&self.distributions[k], rng) as u64);
        SbsOutcome {
            z: observed.bits() != k as u64,
            theta: self.thetas[k],
            syndrome: observed,
        }
    }

    /// `Pr(Z=1)` averaged over every `θ`.
    pub fn exhaustive_probability(&self) -> f64 {
        let miss: f64 = self
            .distributions
            .iter()
            .enumerate()
            .map(|(k, d)| 1.0 - d[k])
            .sum();
        miss / self.distributions.len() as f64
    }

    /// `Pr(Z=1)` with `θ` fixed to the representative of syndrome `bits`.
    pub fn fixed_theta_probability(&self, bits: u64) -> f64 {
        1.0 - self.distributions[bits as usize][bits as usize]
    }
}

fn check_inputs<T: Real>(u: &DenseOperator<T>, g: &MaximalStabilizerGroup) -> Result<()> {
    if !g.is_product_form() {
        return Err(Error::InvalidGroup(
            "sampling needs a product-form group".into(),
        ));
    }
    if u.dim() != 1usize << g.n() {
        return Err(Error::DimensionMismatch(format!(
            "operator dim {} for {} qubits",
            u.dim(),
            g.n()
        )));
    }
    let tol = UNITARY_TOL.max(UNITARY_ULPS * to_f64(T::default_epsilon()));
    if !u.is_unitary(lit(tol)) {
        return Err(Error::InvalidInput("operator is not unitary".into()));
    }
    Ok(())
}

pub fn sbs_sample<T: Real>(
    u: &DenseOperator<T>,
    g: &MaximalStabilizerGroup,
    rng: &mut impl Rng,
) -> Result<SbsOutcome> {
    Ok(SbsSampler::new(u, g)?.sample(rng))
}

/// `‖u⃗[𝖯ⁿ∖G]‖₂²`.
pub fn sbs_signal_probability_exact<T: Real>(
    u: &DenseOperator<T>,
    g: &MaximalStabilizerGroup,
) -> Result<T> {
    check_inputs(u, g)?;
    Ok(pauli_decompose(u)?.mass_where(|p| !g.contains(p)))
}

/// Runs the sampling circuit on `U = trotter_u2(H₀, 𝒪, t, r)` and charges one measurement.
pub fn hss_sample<T: Real>(
    g: &MaximalStabilizerGroup,
    h0: &PauliHamiltonian<T>,
    o: &mut impl EvolutionAccess<T>,
    t: T,
    r: u64,
    rng: &mut impl Rng,
) -> Result<SbsOutcome> {
    let u = trotter_u2_repeated(h0, o, t, r, 1)?;
    let out = sbs_sample(&u, g, rng)?;
    o.record_measurements(1);
    Ok(out)
}

/// Exact signal probability of one circuit built on `trotter_u2(H₀, 𝒪, t, r)`.
pub fn hss_signal_probability_exact<T: Real>(
    g: &MaximalStabilizerGroup,
    h0: &PauliHamiltonian<T>,
    o: &mut impl EvolutionAccess<T>,
    t: T,
    r: u64,
) -> Result<T> {
    let u = trotter_u2_repeated(h0, o, t, r, 1)?;
    sbs_signal_probability_exact(&u, g)
}

/// Exact signal probability for a batch of `samples` runs; charges their queries and measurements.
pub fn hss_batch_probability<T: Real>(
    g: &MaximalStabilizerGroup,
    h0: &PauliHamiltonian<T>,
    o: &mut impl EvolutionAccess<T>,
    t: T,
    r: u64,
    samples: u64,
) -> Result<T> {
    let u = trotter_u2_repeated(h0, o, t, r, samples)?;
    o.record_measurements(samples);
    sbs_signal_probability_exact(&u, g)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HssBounds {
    pub lower: f64,
    pub upper: f64,
    /// `R = (e^{m₀St} − 1 − m₀St)/m₀`.
    pub remainder: f64,
}

/// Signal-probability window for a known residual with at most `m0` terms, given the
/// Trotter contribution `eps_diamond`; analysis only.
pub fn hss_signal_bounds<T: Real>(
    h_res: &PauliHamiltonian<T>,
    g: &MaximalStabilizerGroup,
    t: f64,
    m0: usize,
    eps_diamond: f64,
) -> Result<HssBounds> {
    if h_res.n() != g.n() {
        return Err(Error::DimensionMismatch(format!(
            "{} vs {} qubits",
            h_res.n(),
            g.n()
        )));
    }
    let s = to_f64(h_res.max_coeff());
    let r = to_f64(remainder_r(m0, lit::<f64>(s), t).value);
    let outside: Vec<f64> = h_res
        .terms()
        .filter(|(p, _)| !g.contains(p))
        .map(|(_, c)| to_f64(*c).abs())
        .collect();
    let norm = outside.iter().map(|c| c * c).sum::<f64>().sqrt();
    let lower = (norm * t.abs() - (m0 as f64).sqrt() * r).max(0.0).powi(2) - eps_diamond;
    let spare = (m0 as f64 - outside.len() as f64).max(0.0);
    let upper = outside
        .iter()
        .map(|c| (c * t.abs() + r).powi(2))
        .sum::<f64>()
        + spare * r * r
        + eps_diamond;
    Ok(HssBounds {
        lower,
        upper,
        remainder: r,
    })
}

/// Signal probability under exact evolution by a known residual; analysis only.
pub fn exact_evolution_signal_probability<T: Real>(
    h_res: &PauliHamiltonian<T>,
    g: &MaximalStabilizerGroup,
    t: T,
) -> Result<T> {
    let u = hermitian_expm(&h_res.to_dense()?, t)?;
    sbs_signal_probability_exact(&u, g)
}

/// Syndrome of `θ` against `g`.
pub fn theta_syndrome(g: &MaximalStabilizerGroup, theta: &PauliString) -> Syndrome {
    syndrome_of(g, theta)
}
