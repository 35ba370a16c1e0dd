//! Pauli strings in binary symplectic form, phased products and Pauli
//! coefficient vectors.
//!
//! Qubit 1 is the leftmost character of the text form and the most
//! significant bit of the computational basis index. The bit masks stored in
//! [`PauliString`] follow the basis-index convention, so `x_bits() >> (n - 1)`
//! is the X part on qubit 1.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dense::{DenseOperator, StateVector};
use crate::error::{Error, Result};
use crate::scalar::{cabs, i_pow, lit, Real, C};

/// Largest qubit count a [`PauliString`] can hold.
pub const MAX_QUBITS: usize = 63;

/// Largest qubit count for which dense matrices are built.
pub const DENSE_CEILING: usize = 12;

/// Phase-free Pauli operator `P_α = i^{α_x·α_z} X[α_x] Z[α_z]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: u8,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn new(n: usize, x_bits: u64, z_bits: u64) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::InvalidPauliString(format!(
                "{n} qubits exceeds {MAX_QUBITS}"
            )));
        }
        let mask = mask(n);
        if x_bits & !mask != 0 || z_bits & !mask != 0 {
            return Err(Error::InvalidPauliString(format!("bits exceed {n} qubits")));
        }
        Ok(Self {
            n: n as u8,
            x: x_bits,
            z: z_bits,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(n, 0, 0).expect("qubit count within range")
    }

    /// Single-qubit Pauli `letter` on `qubit` (0-based from the left).
    pub fn single(n: usize, qubit: usize, letter: char) -> Result<Self> {
        if qubit >= n {
            return Err(Error::InvalidPauliString(format!(
                "qubit {qubit} out of range for n={n}"
            )));
        }
        let bit = 1u64 << (n - 1 - qubit);
        let (x, z) = match letter {
            'I' => (0, 0),
            'X' => (bit, 0),
            'Y' => (bit, bit),
            'Z' => (0, bit),
            c => return Err(Error::InvalidPauliString(format!("unknown letter {c:?}"))),
        };
        Self::new(n, x, z)
    }

    /// Pauli with index `idx` in lexicographic `(x_bits, z_bits)` order.
    pub fn from_index(n: usize, idx: u64) -> Self {
        let m = mask(n);
        Self::new(n, (idx >> n) & m, idx & m).expect("index within range")
    }

    pub fn index(&self) -> u64 {
        (self.x << self.n) | self.z
    }

    /// All `4^n` Paulis in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = PauliString> {
        assert!(2 * n < 64, "too many qubits to enumerate");
        (0..1u64 << (2 * n)).map(move |i| PauliString::from_index(n, i))
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }
    pub fn x_bits(&self) -> u64 {
        self.x
    }
    pub fn z_bits(&self) -> u64 {
        self.z
    }
    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }
    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    /// Letter acting on `qubit` (0-based from the left).
    pub fn letter(&self, qubit: usize) -> char {
        let bit = 1u64 << (self.n() - 1 - qubit);
        match (self.x & bit != 0, self.z & bit != 0) {
            (false, false) => 'I',
            (true, false) => 'X',
            (true, true) => 'Y',
            (false, true) => 'Z',
        }
    }

    /// Bitwise product ignoring phase.
    pub fn xor(&self, other: &PauliString) -> PauliString {
        debug_assert_eq!(self.n, other.n);
        PauliString {
            n: self.n,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        }
    }

    /// Matrix element data: `P|j⟩ = phase(j) |j ⊕ x⟩`, returned as an `i` exponent.
    #[inline]
    pub fn column_phase(&self, j: u64) -> u8 {
        let k = (self.x & self.z).count_ones() + 2 * (self.z & j).count_ones();
        (k & 3) as u8
    }

    pub fn to_dense<T: Real>(&self) -> Result<DenseOperator<T>> {
        to_dense(self)
    }
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn check_n(a: &PauliString, b: &PauliString) -> Result<()> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch(format!(
            "{} vs {} qubits",
            a.n, b.n
        )));
    }
    Ok(())
}

/// `0` if the two Paulis commute, `1` if they anticommute.
pub fn symplectic_product(a: &PauliString, b: &PauliString) -> Result<u8> {
    check_n(a, b)?;
    Ok(symplectic(a, b))
}

#[inline]
pub(crate) fn symplectic(a: &PauliString, b: &PauliString) -> u8 {
    (((a.x & b.z).count_ones() + (a.z & b.x).count_ones()) & 1) as u8
}

/// `P|ψ⟩` without building the dense matrix.
pub fn apply_pauli<T: Real>(p: &PauliString, psi: &StateVector<T>) -> Result<StateVector<T>> {
    let d = psi.dim();
    if d != 1usize << p.n() {
        return Err(Error::DimensionMismatch(format!(
            "{} qubits vs state dim {d}",
            p.n()
        )));
    }
    let mut out = vec![C::<T>::zero(); d];
    for (j, a) in psi.amplitudes().iter().enumerate() {
        out[j ^ p.x as usize] = *a * i_pow::<T>(p.column_phase(j as u64));
    }
    StateVector::from_amplitudes(out)
}

/// Pauli group element `i^phase_exp · body`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PhasedPauli {
    pub phase_exp: u8,
    pub body: PauliString,
}

impl PhasedPauli {
    pub fn to_dense<T: Real>(&self) -> Result<DenseOperator<T>> {
        Ok(self.body.to_dense::<T>()?.scale(i_pow(self.phase_exp)))
    }
}

/// `P_α P_β = i^k P_{α⊕β}`.
pub fn pauli_multiply(a: &PauliString, b: &PauliString) -> Result<PhasedPauli> {
    check_n(a, b)?;
    Ok(multiply(a, b))
}

pub(crate) fn multiply(a: &PauliString, b: &PauliString) -> PhasedPauli {
    let c = a.xor(b);
    let k = (a.x & a.z).count_ones() as i64
        + (b.x & b.z).count_ones() as i64
        + 2 * (a.z & b.x).count_ones() as i64
        - (c.x & c.z).count_ones() as i64;
    PhasedPauli {
        phase_exp: k.rem_euclid(4) as u8,
        body: c,
    }
}

/// Dense matrix of a Pauli string.
pub fn to_dense<T: Real>(p: &PauliString) -> Result<DenseOperator<T>> {
    let n = p.n();
    if n > DENSE_CEILING {
        return Err(Error::InvalidInput(format!(
            "{n} qubits exceeds dense ceiling {DENSE_CEILING}"
        )));
    }
    let d = 1usize << n;
    let mut m = DenseOperator::zeros(d);
    for j in 0..d as u64 {
        let row = (j ^ p.x) as usize;
        m.set(row, j as usize, i_pow(p.column_phase(j)));
    }
    Ok(m)
}

/// Pauli coefficients `s_α = Tr(P_α A)/2^n` of a dense operator.
pub fn pauli_decompose<T: Real>(a: &DenseOperator<T>) -> Result<PauliVector<T>> {
    let d = a.dim();
    let n = d.trailing_zeros() as usize;
    if n > DENSE_CEILING {
        return Err(Error::InvalidInput(format!(
            "{n} qubits exceeds dense ceiling"
        )));
    }
    let scale: T = lit(1.0 / d as f64);
    let mut out = PauliVector::new(n);
    let mut buf = vec![C::<T>::zero(); d];
    for x in 0..d as u64 {
        for (j, slot) in buf.iter_mut().enumerate() {
            *slot = a.get((j as u64 ^ x) as usize, j);
        }
        walsh_hadamard(&mut buf);
        for z in 0..d as u64 {
            let v = buf[z as usize];
            if v.is_zero() {
                continue;
            }
            let p = PauliString::new(n, x, z).expect("in range");
            let k = (x & z).count_ones() + 2 * (x & z).count_ones();
            out.entries.insert(p, v * i_pow::<T>((k & 3) as u8) * scale);
        }
    }
    Ok(out)
}

/// In-place unnormalized transform `f(z) ← Σ_j (−1)^{|z∧j|} f(j)`.
fn walsh_hadamard<T: Real>(f: &mut [C<T>]) {
    let mut h = 1;
    while h < f.len() {
        for block in f.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*a, *b);
                *a = u + v;
                *b = u - v;
            }
        }
        h *= 2;
    }
}

/// The `2n+1` pairwise anticommuting Paulis `X₁, Y₁, Z₁X₂, Z₁Y₂, …, Z₁⋯Z_n`.
pub fn anticommuting_chain(n: usize) -> Vec<PauliString> {
    let mut out = Vec::with_capacity(2 * n + 1);
    let mut zprefix = 0u64;
    for q in 0..n {
        let bit = 1u64 << (n - 1 - q);
        out.push(PauliString::new(n, bit, zprefix).expect("in range"));
        out.push(PauliString::new(n, bit, zprefix | bit).expect("in range"));
        zprefix |= bit;
    }
    out.push(PauliString::new(n, 0, zprefix).expect("in range"));
    out
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n() {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.chars().count();
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::InvalidPauliString(format!("bad length in {s:?}")));
        }
        let (mut x, mut z) = (0u64, 0u64);
        for (q, c) in s.chars().enumerate() {
            let bit = 1u64 << (n - 1 - q);
            match c {
                'I' => {}
                'X' => x |= bit,
                'Y' => {
                    x |= bit;
                    z |= bit
                }
                'Z' => z |= bit,
                _ => {
                    return Err(Error::InvalidPauliString(format!(
                        "unknown letter {c:?} in {s:?}"
                    )))
                }
            }
        }
        PauliString::new(n, x, z)
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Sparse complex Pauli coefficient vector; absent entries are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliVector<T: Real> {
    n: usize,
    entries: BTreeMap<PauliString, C<T>>,
}

impl<T: Real> PauliVector<T> {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            entries: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, p: &PauliString) -> C<T> {
        self.entries.get(p).copied().unwrap_or_else(C::zero)
    }

    /// Sets an entry; zero removes it.
    pub fn set(&mut self, p: PauliString, v: C<T>) {
        if v.is_zero() {
            self.entries.remove(&p);
        } else {
            self.entries.insert(p, v);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &C<T>)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Squared ℓ₂ mass over the entries selected by `keep`.
    pub fn mass_where(&self, mut keep: impl FnMut(&PauliString) -> bool) -> T {
        self.entries
            .iter()
            .filter(|(p, _)| keep(p))
            .fold(T::zero(), |acc, (_, v)| acc + v.norm_sqr())
    }

    pub fn norm_sqr(&self) -> T {
        self.mass_where(|_| true)
    }

    /// Largest absolute difference to another vector over the union of supports.
    pub fn max_abs_diff(&self, other: &PauliVector<T>) -> T {
        let mut worst = T::zero();
        for (p, v) in self.entries.iter() {
            worst = worst.max(cabs(*v - other.get(p)));
        }
        for (p, v) in other.entries.iter() {
            worst = worst.max(cabs(*v - self.get(p)));
        }
        worst
    }

    pub fn scale(&self, c: C<T>) -> Self {
        let mut out = Self::new(self.n);
        for (p, v) in self.iter() {
            out.set(*p, *v * c);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (p, v) in other.iter() {
            out.set(*p, out.get(p) + *v);
        }
        out
    }

    pub fn to_dense(&self) -> Result<DenseOperator<T>> {
        let d = 1usize << self.n;
        let mut acc = DenseOperator::zeros(d);
        for (p, v) in self.iter() {
            acc = acc.add(&to_dense::<T>(p)?.scale(*v))?;
        }
        Ok(acc)
    }
}

impl<T: Real> FromIterator<(PauliString, C<T>)> for PauliVector<T> {
    fn from_iter<I: IntoIterator<Item = (PauliString, C<T>)>>(iter: I) -> Self {
        let mut out: Option<Self> = None;
        for (p, v) in iter {
            let pv = out.get_or_insert_with(|| Self::new(p.n()));
            pv.set(p, pv.get(&p) + v);
        }
        out.unwrap_or_else(|| Self::new(0))
    }
}

#[cfg(test)]
pub(crate) fn complex<T: Real>(re: f64, im: f64) -> C<T> {
    num_complex::Complex::new(lit(re), lit(im))
}
