//! Hamiltonian amplitude encoding: Bell-pair preparation, the Trotterized
//! residual evolution and the marking unitary that flags non-identity Bell
//! components on an ancilla.
//!
//! Register order is ancilla, system `A` (n qubits), reference `B` (n qubits),
//! with the ancilla as the most significant bit.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::dense::{DenseOperator, StateVector};
use crate::error::{Error, Result};
use crate::evolution::{residual_trotter_bound, trotter_u2, EvolutionAccess};
use crate::hamiltonian::PauliHamiltonian;
use crate::pauli::{apply_pauli, pauli_decompose, PauliString, PauliVector, DENSE_CEILING};
use crate::scalar::{cre, lit, to_f64, Real, C};

/// `|Φ⁺⟩ = 2^{−n/2} Σ_j |j⟩_A|j⟩_B`.
pub fn bell_prep<T: Real>(n: usize) -> Result<StateVector<T>> {
    if 2 * n > DENSE_CEILING {
        return Err(Error::InvalidInput(format!(
            "2n = {} exceeds dense ceiling",
            2 * n
        )));
    }
    let d = 1usize << n;
    let a: T = lit((d as f64).sqrt().recip());
    let mut amps = vec![C::<T>::zero(); d * d];
    for j in 0..d {
        amps[(j << n) | j] = cre(a);
    }
    StateVector::from_amplitudes(amps)
}

/// `|Φ_α⟩ = (P_α ⊗ I)|Φ⁺⟩`.
pub fn bell_state<T: Real>(alpha: &PauliString) -> Result<StateVector<T>> {
    let n = alpha.n();
    let padded = PauliString::new(2 * n, alpha.x_bits() << n, alpha.z_bits() << n)?;
    apply_pauli(&padded, &bell_prep(n)?)
}

/// `u_α = ⟨Φ_α|(U⊗I)|Φ⁺⟩` for every `α`.
pub fn bell_overlaps<T: Real>(u: &DenseOperator<T>) -> Result<PauliVector<T>> {
    let n = u.qubits();
    let psi = u
        .kron(&DenseOperator::identity(1 << n))
        .apply(&bell_prep(n)?)?;
    let mut out = PauliVector::new(n);
    for alpha in PauliString::all(n) {
        out.set(alpha, bell_state::<T>(&alpha)?.inner(&psi));
    }
    Ok(out)
}

/// `V = I⊗|Φ⁺⟩⟨Φ⁺| + X⊗Σ_{α≠I}|Φ_α⟩⟨Φ_α|`.
pub fn marking_unitary<T: Real>(n: usize) -> Result<DenseOperator<T>> {
    if 2 * n + 1 > DENSE_CEILING {
        return Err(Error::InvalidInput(format!(
            "2n+1 = {} exceeds dense ceiling",
            2 * n + 1
        )));
    }
    let big = 1usize << (2 * n);
    let keep = bell_prep::<T>(n)?.projector();
    let mut flip = DenseOperator::zeros(big);
    for alpha in PauliString::all(n).skip(1) {
        flip = flip.add(&bell_state::<T>(&alpha)?.projector())?;
    }
    Ok(DenseOperator::from_fn(2 * big, |i, j| {
        let (ai, aj) = (i / big, j / big);
        let (ri, rj) = (i % big, j % big);
        if ai == aj {
            keep.get(ri, rj)
        } else {
            flip.get(ri, rj)
        }
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HaeMode {
    /// Read the amplitude off the Pauli decomposition of the evolution.
    Pauli,
    /// Simulate the full ancilla + Bell-pair circuit.
    Statevector,
}

/// Certifier-visible worst-case residual size: at most `m0` terms, each of modulus at most `b0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResidualBudget {
    pub m0: f64,
    pub b0: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HaeResult<T: Real> {
    /// Ancilla-one amplitude.
    pub p1: T,
    /// Coefficient of `|0⟩|Φ⁺⟩`.
    pub p0: C<T>,
    pub trotter_bound: T,
}

/// `(p₁, p₀)` for the encoding circuit built around a given unitary.
pub fn hae_amplitudes<T: Real>(u: &DenseOperator<T>, mode: HaeMode) -> Result<(T, C<T>)> {
    match mode {
        HaeMode::Pauli => {
            let v = pauli_decompose(u)?;
            let p0 = v.get(&PauliString::identity(u.qubits()));
            Ok((v.mass_where(|p| !p.is_identity()).sqrt(), p0))
        }
        HaeMode::Statevector => {
            let n = u.qubits();
            let bell = bell_prep::<T>(n)?;
            let evolved = u.kron(&DenseOperator::identity(1 << n)).apply(&bell)?;
            let zero_anc = StateVector::from_amplitudes(vec![C::one(), C::zero()])?;
            let out = marking_unitary::<T>(n)?.apply(&zero_anc.kron(&evolved))?;
            let half = bell.dim();
            let amps = out.amplitudes();
            let p1 = amps[half..]
                .iter()
                .fold(T::zero(), |a, c| a + c.norm_sqr())
                .sqrt();
            let p0 = bell
                .amplitudes()
                .iter()
                .zip(&amps[..half])
                .fold(C::zero(), |a, (b, o)| a + b.conj() * o);
            Ok((p1, p0))
        }
    }
}

/// Signal amplitude of the encoding circuit with `U = trotter_u2(H₀, 𝒪, t, r)`.
pub fn hae_signal_amplitude<T: Real>(
    h0: &PauliHamiltonian<T>,
    o: &mut impl EvolutionAccess<T>,
    t: T,
    r: u64,
    mode: HaeMode,
    budget: ResidualBudget,
) -> Result<HaeResult<T>> {
    let u = trotter_u2(h0, o, t, r)?;
    let (p1, p0) = hae_amplitudes(&u, mode)?;
    let bound = residual_trotter_bound(budget.m0, budget.b0, to_f64(h0.l1_norm()), to_f64(t), r);
    Ok(HaeResult {
        p1,
        p0,
        trotter_bound: lit(bound),
    })
}
