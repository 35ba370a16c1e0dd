//! Maximal stabilizer groups, error syndromes and syndrome measurement.

use std::fmt;

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dense::StateVector;
use crate::error::{Error, Result};
use crate::pauli::{apply_pauli, multiply, symplectic, PauliString};
use crate::scalar::{cre, lit, to_f64, Real, C};

/// Config descriptor for the two product-form groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupKind {
    /// `⟨I,Z⟩^⊗n`
    AllZ,
    /// `⟨I,X⟩^⊗n`
    AllX,
}

impl GroupKind {
    pub fn group(self, n: usize) -> MaximalStabilizerGroup {
        match self {
            GroupKind::AllZ => MaximalStabilizerGroup::all_z(n),
            GroupKind::AllX => MaximalStabilizerGroup::all_x(n),
        }
    }
}

/// Syndrome bits; generator `i` maps to bit `n-1-i` so the text form reads left to right.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Syndrome {
    n: u8,
    bits: u64,
}

impl Syndrome {
    pub fn new(n: usize, bits: u64) -> Self {
        debug_assert!(n == 64 || bits >> n == 0);
        Self { n: n as u8, bits }
    }
    pub fn zero(n: usize) -> Self {
        Self::new(n, 0)
    }
    pub fn bits(&self) -> u64 {
        self.bits
    }
    pub fn n(&self) -> usize {
        self.n as usize
    }
    pub fn bit(&self, i: usize) -> bool {
        self.bits >> (self.n() - 1 - i) & 1 == 1
    }
    pub fn xor(&self, other: &Syndrome) -> Syndrome {
        Syndrome::new(self.n(), self.bits ^ other.bits)
    }
}

impl serde::Serialize for Syndrome {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n() {
            write!(f, "{}", if self.bit(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaximalStabilizerGroup {
    n: usize,
    generators: Vec<PauliString>,
    product_form: bool,
}

impl MaximalStabilizerGroup {
    /// Validates commutation and independence of `n` generators.
    pub fn new(generators: Vec<PauliString>) -> Result<Self> {
        let n = generators
            .first()
            .map(|g| g.n())
            .ok_or_else(|| Error::InvalidGroup("no generators".into()))?;
        if generators.len() != n || generators.iter().any(|g| g.n() != n) {
            return Err(Error::InvalidGroup(format!(
                "need exactly {n} generators on {n} qubits"
            )));
        }
        for (i, a) in generators.iter().enumerate() {
            for b in &generators[i + 1..] {
                if symplectic(a, b) != 0 {
                    return Err(Error::InvalidGroup(format!("{a} and {b} anticommute")));
                }
            }
        }
        if gf2_rank(&generators) != n {
            return Err(Error::InvalidGroup("generators are dependent".into()));
        }
        let mut covered = 0u64;
        let mut product_form = true;
        for g in &generators {
            let support = g.x_bits() | g.z_bits();
            if support.count_ones() != 1 || covered & support != 0 {
                product_form = false;
            }
            covered |= support;
        }
        Ok(Self {
            n,
            generators,
            product_form,
        })
    }

    pub fn all_z(n: usize) -> Self {
        let gens = (0..n)
            .map(|q| PauliString::single(n, q, 'Z').expect("in range"))
            .collect();
        Self::new(gens).expect("valid group")
    }

    pub fn all_x(n: usize) -> Self {
        let gens = (0..n)
            .map(|q| PauliString::single(n, q, 'X').expect("in range"))
            .collect();
        Self::new(gens).expect("valid group")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn is_product_form(&self) -> bool {
        self.product_form
    }

    fn require_product_form(&self) -> Result<()> {
        if !self.product_form {
            return Err(Error::Unsupported(
                "only product-form stabilizer groups are supported here".into(),
            ));
        }
        Ok(())
    }

    /// All `2^n` phase-free group elements, indexed by generator subsets.
    pub fn elements(&self) -> Vec<PauliString> {
        (0..1u64 << self.n)
            .map(|mask| {
                self.generators
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .fold(PauliString::identity(self.n), |acc, (_, g)| acc.xor(g))
            })
            .collect()
    }

    /// Membership test for phase-free Paulis.
    pub fn contains(&self, p: &PauliString) -> bool {
        syndrome_of(self, p).bits == 0
    }
}

fn gf2_rank(rows: &[PauliString]) -> usize {
    let mut v: Vec<u128> = rows
        .iter()
        .map(|p| ((p.x_bits() as u128) << 64) | p.z_bits() as u128)
        .collect();
    let mut rank = 0;
    for bit in (0..128).rev() {
        let Some(pivot) = (rank..v.len()).find(|&i| v[i] >> bit & 1 == 1) else {
            continue;
        };
        v.swap(rank, pivot);
        for i in 0..v.len() {
            if i != rank && v[i] >> bit & 1 == 1 {
                v[i] ^= v[rank];
            }
        }
        rank += 1;
    }
    rank
}

pub fn syndrome(g: &MaximalStabilizerGroup, p: &PauliString) -> Result<Syndrome> {
    if p.n() != g.n {
        return Err(Error::DimensionMismatch(format!(
            "{} vs {} qubits",
            p.n(),
            g.n
        )));
    }
    Ok(syndrome_of(g, p))
}

pub(crate) fn syndrome_of(g: &MaximalStabilizerGroup, p: &PauliString) -> Syndrome {
    let n = g.n;
    let bits = g.generators.iter().enumerate().fold(0u64, |acc, (i, gi)| {
        acc | (symplectic(p, gi) as u64) << (n - 1 - i)
    });
    Syndrome::new(n, bits)
}

/// Canonical Pauli with syndrome `s`: `X` against `Z`/`Y` generators, `Z` against `X` generators.
pub fn anticommutant_representative(
    g: &MaximalStabilizerGroup,
    s: &Syndrome,
) -> Result<PauliString> {
    g.require_product_form()?;
    if s.n() != g.n {
        return Err(Error::DimensionMismatch(format!(
            "syndrome of {} bits for {} qubits",
            s.n(),
            g.n
        )));
    }
    let (mut x, mut z) = (0u64, 0u64);
    for (i, gi) in g.generators.iter().enumerate() {
        if !s.bit(i) {
            continue;
        }
        if gi.z_bits() != 0 {
            x |= gi.x_bits() | gi.z_bits();
        } else {
            z |= gi.x_bits();
        }
    }
    PauliString::new(g.n, x, z)
}

/// All `2^n` canonical representatives, indexed by syndrome bits.
pub fn representatives(g: &MaximalStabilizerGroup) -> Result<Vec<PauliString>> {
    (0..1u64 << g.n)
        .map(|b| anticommutant_representative(g, &Syndrome::new(g.n, b)))
        .collect()
}

/// `P_α = i^k P_β P_γ` with `β` the canonical representative of `σ(α)` and `γ ∈ G`.
pub fn unique_decompose(
    g: &MaximalStabilizerGroup,
    alpha: &PauliString,
) -> Result<(u8, PauliString, PauliString)> {
    let s = syndrome(g, alpha)?;
    let beta = anticommutant_representative(g, &s)?;
    let gamma = alpha.xor(&beta);
    debug_assert!(g.contains(&gamma));
    let prod = multiply(&beta, &gamma);
    Ok(((4 - prod.phase_exp) & 3, beta, gamma))
}

/// The unique `+1` eigenstate of every generator.
pub fn stabilizer_state<T: Real>(g: &MaximalStabilizerGroup) -> Result<StateVector<T>> {
    g.require_product_form()?;
    let h: T = lit(std::f64::consts::FRAC_1_SQRT_2);
    let mut letters = vec!['I'; g.n];
    for gi in &g.generators {
        let q = (0..g.n).find(|&q| gi.letter(q) != 'I').expect("weight one");
        letters[q] = gi.letter(q);
    }
    let mut state = StateVector::from_amplitudes(vec![C::<T>::one()])?;
    for l in letters {
        let local = match l {
            'Z' => vec![C::one(), C::zero()],
            'X' => vec![cre(h), cre(h)],
            _ => vec![cre(h), Complex::new(T::zero(), h)],
        };
        state = state.kron(&StateVector::from_amplitudes(local)?);
    }
    Ok(state)
}

/// Exact syndrome distribution `Pr(b) = ‖Π_b ψ‖²`, indexed by syndrome bits.
pub fn syndrome_distribution<T: Real>(
    psi: &StateVector<T>,
    g: &MaximalStabilizerGroup,
) -> Result<Vec<T>> {
    if psi.dim() != 1usize << g.n {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} for {} qubits",
            psi.dim(),
            g.n
        )));
    }
    let half = cre(lit::<T>(0.5));
    let mut branches = vec![psi.clone()];
    for gi in &g.generators {
        let mut next = Vec::with_capacity(branches.len() * 2);
        for v in &branches {
            let gv = apply_pauli(gi, v)?;
            next.push(v.add(&gv).scale(half));
            next.push(v.add(&gv.scale(cre(-T::one()))).scale(half));
        }
        branches = next;
    }
    Ok(branches.iter().map(|b| b.norm() * b.norm()).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub enum SyndromeOutcome<T: Real> {
    Distribution(Vec<T>),
    Sampled(Syndrome),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasurementMode {
    Exact,
    Sample,
}

pub fn syndrome_measurement<T: Real>(
    psi: &StateVector<T>,
    g: &MaximalStabilizerGroup,
    mode: MeasurementMode,
    rng: &mut impl Rng,
) -> Result<SyndromeOutcome<T>> {
    let dist = syndrome_distribution(psi, g)?;
    Ok(match mode {
        MeasurementMode::Exact => SyndromeOutcome::Distribution(dist),
        MeasurementMode::Sample => {
            SyndromeOutcome::Sampled(Syndrome::new(g.n, sample_index(&dist, rng) as u64))
        }
    })
}

pub(crate) fn sample_index<T: Real>(weights: &[T], rng: &mut impl Rng) -> usize {
    let total: f64 = weights.iter().map(|w| to_f64(*w)).sum();
    let mut u = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        u -= to_f64(*w);
        if u < 0.0 {
            return i;
        }
    }
    weights.iter().rposition(|w| !w.is_zero()).unwrap_or(0)
}
