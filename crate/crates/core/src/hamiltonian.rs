//! Sparse traceless Pauli-sum Hamiltonians, residuals, the remainder term and
//! seeded instance generators.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dense::DenseOperator;
use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliVector, DENSE_CEILING};
use crate::scalar::{lit, to_f64, Real};
use crate::stabilizer::GroupKind;

/// `H = Σ_α s_α P_α` with real coefficients and a declared bound `B ≥ max|s_α|`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliHamiltonian<T: Real> {
    n: usize,
    terms: BTreeMap<PauliString, T>,
    bound: T,
}

impl<T: Real> PauliHamiltonian<T> {
    /// Zero coefficients are dropped; identity terms and coefficients above the bound are rejected.
    pub fn new(
        n: usize,
        terms: impl IntoIterator<Item = (PauliString, T)>,
        bound: T,
    ) -> Result<Self> {
        if !(bound >= T::zero()) {
            return Err(Error::InvalidInput(format!(
                "bound {bound} must be nonnegative"
            )));
        }
        let mut map = BTreeMap::new();
        for (p, c) in terms {
            if p.n() != n {
                return Err(Error::DimensionMismatch(format!(
                    "term {p} on {} qubits, expected {n}",
                    p.n()
                )));
            }
            if p.is_identity() {
                return Err(Error::InvalidInput(
                    "identity term in a traceless Hamiltonian".into(),
                ));
            }
            if !c.is_finite() || c.abs() > bound {
                return Err(Error::InvalidInput(format!(
                    "coefficient {c} of {p} exceeds bound {bound}"
                )));
            }
            if map.insert(p, c).is_some() {
                return Err(Error::InvalidInput(format!("duplicate term {p}")));
            }
        }
        map.retain(|_, c| !c.is_zero());
        Ok(Self {
            n,
            terms: map,
            bound,
        })
    }

    pub fn zero(n: usize, bound: T) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
            bound,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bound(&self) -> T {
        self.bound
    }

    /// Number of terms.
    pub fn m(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &T)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &PauliString> {
        self.terms.keys()
    }

    pub fn coeff(&self, p: &PauliString) -> T {
        self.terms.get(p).copied().unwrap_or_else(T::zero)
    }

    /// Largest coefficient modulus `S`.
    pub fn max_coeff(&self) -> T {
        self.terms.values().fold(T::zero(), |a, c| a.max(c.abs()))
    }

    /// `‖s‖₂`, equal to the normalized Frobenius norm.
    pub fn l2_norm(&self) -> T {
        self.terms
            .values()
            .fold(T::zero(), |a, c| a + *c * *c)
            .sqrt()
    }

    /// `‖s‖₁`, an upper bound on the spectral norm.
    pub fn l1_norm(&self) -> T {
        self.terms.values().fold(T::zero(), |a, c| a + c.abs())
    }

    pub fn scaled(&self, c: T) -> Self {
        Self {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(p, v)| (*p, *v * c))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
            bound: self.bound * c.abs(),
        }
    }

    /// Sum of two Hamiltonians; the bound is the sum of the bounds.
    pub fn plus(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "{} vs {} qubits",
                self.n, other.n
            )));
        }
        let mut terms = self.terms.clone();
        for (p, c) in &other.terms {
            *terms.entry(*p).or_insert_with(T::zero) += *c;
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(Self {
            n: self.n,
            terms,
            bound: self.bound + other.bound,
        })
    }

    pub fn to_pauli_vector(&self) -> PauliVector<T> {
        let mut v = PauliVector::new(self.n);
        for (p, c) in &self.terms {
            v.set(*p, Complex::new(*c, T::zero()));
        }
        v
    }

    pub fn to_dense(&self) -> Result<DenseOperator<T>> {
        if self.n > DENSE_CEILING {
            return Err(Error::InvalidInput(format!(
                "{} qubits exceeds dense ceiling",
                self.n
            )));
        }
        let d = 1usize << self.n;
        let mut m = DenseOperator::zeros(d);
        for (p, c) in &self.terms {
            for j in 0..d as u64 {
                let row = (j ^ p.x_bits()) as usize;
                let v = m.get(row, j as usize) + crate::scalar::i_pow::<T>(p.column_phase(j)) * *c;
                m.set(row, j as usize, v);
            }
        }
        Ok(m)
    }

    /// Converts the scalar type.
    pub fn cast<U: Real>(&self) -> PauliHamiltonian<U> {
        PauliHamiltonian {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(p, c)| (*p, lit::<U>(to_f64(*c))))
                .collect(),
            bound: lit(to_f64(self.bound)),
        }
    }
}

/// `H − H₀`, keeping every term that does not cancel exactly.
pub fn residual<T: Real>(
    h: &PauliHamiltonian<T>,
    h0: &PauliHamiltonian<T>,
) -> Result<PauliHamiltonian<T>> {
    h.plus(&h0.scaled(-T::one()))
}

/// `R = (e^{mSt} − 1 − mSt)/m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RemainderTerm<T: Real> {
    pub m: usize,
    pub s: T,
    pub t: T,
    pub value: T,
}

pub fn remainder_r<T: Real>(m: usize, s: T, t: T) -> RemainderTerm<T> {
    let value = if m == 0 {
        T::zero()
    } else {
        let x = lit::<T>(m as f64) * s * t.abs();
        let e = lit::<T>(to_f64(x).exp_m1());
        ((e - x) / lit(m as f64)).max(T::zero())
    };
    RemainderTerm { m, s, t, value }
}

/// Uniform nonzero coefficient with modulus in `[0.01B, B]`.
fn dead_zone_coeff(bound: f64, rng: &mut impl Rng) -> f64 {
    let mag = bound * (0.01 + 0.99 * rng.random::<f64>());
    if rng.random::<bool>() {
        mag
    } else {
        -mag
    }
}

fn distinct_paulis(n: usize, m: usize, rng: &mut impl Rng) -> Result<Vec<PauliString>> {
    let total = (1u64 << (2 * n)) - 1;
    if m as u64 > total {
        return Err(Error::InvalidInput(format!(
            "m={m} exceeds {total} non-identity Paulis"
        )));
    }
    Ok(sample(rng, total as usize, m)
        .into_iter()
        .map(|i| PauliString::from_index(n, i as u64 + 1))
        .collect())
}

/// `m` distinct non-identity terms with coefficients uniform on `[−B,B]` outside `|s| < 0.01B`.
pub fn random_hamiltonian<T: Real>(
    n: usize,
    m: usize,
    bound: f64,
    seed: u64,
) -> Result<PauliHamiltonian<T>> {
    random_hamiltonian_with(n, m, bound, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_hamiltonian_with<T: Real>(
    n: usize,
    m: usize,
    bound: f64,
    rng: &mut impl Rng,
) -> Result<PauliHamiltonian<T>> {
    if n == 0 || 2 * n >= 64 {
        return Err(Error::InvalidInput(format!("unsupported qubit count {n}")));
    }
    let support = distinct_paulis(n, m, rng)?;
    let terms: Vec<_> = support
        .into_iter()
        .map(|p| (p, lit::<T>(dead_zone_coeff(bound, rng))))
        .collect();
    PauliHamiltonian::new(n, terms, lit(bound))
}

/// Where a planted residual may live.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResidualSupport {
    Any,
    /// Only non-identity elements of the given stabilizer group.
    InGroup(GroupKind),
}

/// A pair `(H₀, H)` with `‖H − H₀‖_F` equal to `residual_norm`, both with at most `m` terms
/// and coefficients bounded by `bound`.
pub fn planted_instance<T: Real>(
    n: usize,
    m: usize,
    bound: f64,
    residual_norm: f64,
    support: ResidualSupport,
    rng: &mut impl Rng,
) -> Result<(PauliHamiltonian<T>, PauliHamiltonian<T>)> {
    if m == 0 || residual_norm < 0.0 || residual_norm >= bound {
        return Err(Error::InvalidInput(format!(
            "need m ≥ 1 and 0 ≤ residual norm {residual_norm} < bound {bound}"
        )));
    }
    let allowed: Vec<PauliString> = match support {
        ResidualSupport::Any => PauliString::all(n).skip(1).collect(),
        ResidualSupport::InGroup(kind) => kind
            .group(n)
            .elements()
            .into_iter()
            .filter(|p| !p.is_identity())
            .collect(),
    };
    let k = rng.random_range(1..=m.min(allowed.len()));
    let residual_support: Vec<PauliString> = sample(rng, allowed.len(), k)
        .into_iter()
        .map(|i| allowed[i])
        .collect();
    let mut others: Vec<PauliString> = PauliString::all(n)
        .skip(1)
        .filter(|p| !residual_support.contains(p))
        .collect();
    let extra = (m - k).min(others.len());
    let picks: Vec<usize> = sample(rng, others.len(), extra).into_vec();
    let mut union: Vec<PauliString> = residual_support.clone();
    union.extend(picks.iter().map(|&i| others[i]));
    others.clear();

    let h0_cap = bound - residual_norm;
    let mut h0_terms = Vec::new();
    for p in &union {
        let in_residual = residual_support.contains(p);
        if in_residual && rng.random::<bool>() {
            continue;
        }
        h0_terms.push((*p, dead_zone_coeff(h0_cap, rng)));
    }
    let mut dir: Vec<f64> = residual_support
        .iter()
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    let nrm = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
    dir.iter_mut().for_each(|d| *d *= residual_norm / nrm);

    let mut h_terms: BTreeMap<PauliString, f64> = h0_terms.iter().copied().collect();
    for (p, d) in residual_support.iter().zip(&dir) {
        *h_terms.entry(*p).or_insert(0.0) += d;
    }
    let h0 = PauliHamiltonian::new(
        n,
        h0_terms.into_iter().map(|(p, c)| (p, lit::<T>(c))),
        lit(bound),
    )?;
    let h = PauliHamiltonian::new(
        n,
        h_terms.into_iter().map(|(p, c)| (p, lit::<T>(c))),
        lit(bound),
    )?;
    Ok((h0, h))
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    pauli: PauliString,
    coeff: Coeff,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Coeff {
    Text(String),
    Number(f64),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HamiltonianRecord {
    n: usize,
    bound: f64,
    terms: Vec<TermRecord>,
}

impl<T: Real> PauliHamiltonian<T> {
    /// Serializes to the JSON file format with coefficients as decimal strings.
    pub fn to_json(&self) -> String {
        let rec = HamiltonianRecord {
            n: self.n,
            bound: to_f64(self.bound),
            terms: self
                .terms
                .iter()
                .map(|(p, c)| TermRecord {
                    pauli: *p,
                    coeff: Coeff::Text(format!("{}", to_f64(*c))),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&rec).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rec: HamiltonianRecord = serde_json::from_str(text)?;
        let mut terms = Vec::with_capacity(rec.terms.len());
        for t in rec.terms {
            let c = match t.coeff {
                Coeff::Text(s) => s
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("coefficient {s:?}: {e}")))?,
                Coeff::Number(x) => x,
            };
            terms.push((t.pauli, lit::<T>(c)));
        }
        Self::new(rec.n, terms, lit(rec.bound))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}
