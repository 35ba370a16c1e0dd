//! Pauli coefficients of `e^{−iHt}`: exact vectors, Taylor-order partitions,
//! the dimension-free ℓ₂ bounds and a brute-force check of the associated
//! constrained maximization.

use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::Zero;

use crate::dense::hermitian_expm;
use crate::error::{Error, Result};
use crate::hamiltonian::{remainder_r, PauliHamiltonian};
use crate::pauli::{multiply, pauli_decompose, PauliString, PauliVector};
use crate::scalar::{cabs, i_pow, lit, Real, C};
use crate::stabilizer::MaximalStabilizerGroup;

/// Enumeration budget shared by the brute-force routines.
pub const BRUTE_FORCE_BUDGET: u64 = 1_000_000;

/// Coefficients `v_α` of `e^{−iHt}`.
pub fn evolution_pauli_vector<T: Real>(h: &PauliHamiltonian<T>, t: T) -> Result<PauliVector<T>> {
    pauli_decompose(&hermitian_expm(&h.to_dense()?, t)?)
}

/// `H^k = Σ_ℓ a_{k,ℓ} P_ℓ`, grouped by which Pauli each of the `m^k` index tuples lands on.
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorPartition<T: Real> {
    pub k: u32,
    pub m: usize,
    pub counts: BTreeMap<PauliString, u64>,
    pub coefficients: BTreeMap<PauliString, C<T>>,
}

pub fn taylor_partition<T: Real>(h: &PauliHamiltonian<T>, k: u32) -> Result<TaylorPartition<T>> {
    let terms: Vec<(PauliString, T)> = h.terms().map(|(p, c)| (*p, *c)).collect();
    let m = terms.len();
    let total = (m as u64)
        .checked_pow(k)
        .filter(|t| *t <= BRUTE_FORCE_BUDGET);
    let Some(total) = total else {
        return Err(Error::InvalidInput(format!(
            "m^k = {m}^{k} exceeds the enumeration budget"
        )));
    };
    let mut counts = BTreeMap::new();
    let mut coefficients: BTreeMap<PauliString, C<T>> = BTreeMap::new();
    if m == 0 {
        return Ok(TaylorPartition {
            k,
            m,
            counts,
            coefficients,
        });
    }
    let mut idx = vec![0usize; k as usize];
    for _ in 0..total {
        let mut body = PauliString::identity(h.n());
        let mut phase = 0u8;
        let mut weight = T::one();
        for &i in &idx {
            let prod = multiply(&body, &terms[i].0);
            phase = (phase + prod.phase_exp) & 3;
            body = prod.body;
            weight *= terms[i].1;
        }
        *counts.entry(body).or_insert(0) += 1;
        *coefficients.entry(body).or_insert_with(C::zero) += i_pow::<T>(phase) * weight;
        for slot in idx.iter_mut().rev() {
            *slot += 1;
            if *slot < m {
                break;
            }
            *slot = 0;
        }
    }
    Ok(TaylorPartition {
        k,
        m,
        counts,
        coefficients,
    })
}

/// `𝖯ⁿ ∖ {I}`.
pub fn non_identity_set(n: usize) -> Vec<PauliString> {
    PauliString::all(n).skip(1).collect()
}

/// `𝖯ⁿ ∖ G`.
pub fn outside_group_set(g: &MaximalStabilizerGroup) -> Vec<PauliString> {
    PauliString::all(g.n()).filter(|p| !g.contains(p)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundCheck<T> {
    pub lhs: T,
    pub rhs: T,
    pub holds: bool,
}

struct BoundInputs<T: Real> {
    v: PauliVector<T>,
    in_x: Vec<T>,
    m: usize,
    r: T,
    t: T,
}

fn bound_inputs<T: Real>(
    h: &PauliHamiltonian<T>,
    t: T,
    x: &[PauliString],
) -> Result<BoundInputs<T>> {
    if x.iter().any(|p| p.is_identity() || p.n() != h.n()) {
        return Err(Error::InvalidInput(
            "X must hold non-identity Paulis on the same qubits".into(),
        ));
    }
    let m = h.m();
    if x.len() < m {
        return Err(Error::InvalidInput(format!(
            "|X| = {} is smaller than m = {m}",
            x.len()
        )));
    }
    let v = evolution_pauli_vector(h, t)?;
    let in_x = h
        .terms()
        .filter(|(p, _)| x.contains(p))
        .map(|(_, c)| c.abs())
        .collect();
    let r = remainder_r(m, h.max_coeff(), t).value;
    Ok(BoundInputs {
        v,
        in_x,
        m,
        r,
        t: t.abs(),
    })
}

fn mass_on<T: Real>(v: &PauliVector<T>, x: &[PauliString]) -> T {
    x.iter().fold(T::zero(), |acc, p| acc + v.get(p).norm_sqr())
}

/// `‖v[X]‖₂ ≥ ‖s[𝒮∩X]‖₂ t − √m R`.
pub fn l2_lower_bound<T: Real>(
    h: &PauliHamiltonian<T>,
    t: T,
    x: &[PauliString],
) -> Result<BoundCheck<T>> {
    let b = bound_inputs(h, t, x)?;
    let lhs = mass_on(&b.v, x).sqrt();
    let s_norm = b.in_x.iter().fold(T::zero(), |a, s| a + *s * *s).sqrt();
    let rhs = s_norm * b.t - lit::<T>(b.m as f64).sqrt() * b.r;
    Ok(BoundCheck {
        lhs,
        rhs,
        holds: lhs >= rhs - lit(1e-12),
    })
}

/// `‖v[X]‖₂² ≤ Σ_{𝒮∩X}(|s_β|t + R)² + (m − |𝒮∩X|)R²`, reported as squares.
pub fn l2_upper_bound<T: Real>(
    h: &PauliHamiltonian<T>,
    t: T,
    x: &[PauliString],
) -> Result<BoundCheck<T>> {
    let b = bound_inputs(h, t, x)?;
    let lhs = mass_on(&b.v, x);
    let mut rhs = b
        .in_x
        .iter()
        .fold(T::zero(), |a, s| a + (*s * b.t + b.r).powi(2));
    rhs += lit::<T>((b.m - b.in_x.len()) as f64) * b.r * b.r;
    Ok(BoundCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + lit(1e-12),
    })
}

/// `‖v[𝒮] − (−it)s[𝒮]‖₂`, the first-order deviation on the support.
pub fn first_order_deviation<T: Real>(h: &PauliHamiltonian<T>, t: T) -> Result<T> {
    let v = evolution_pauli_vector(h, t)?;
    let mut acc = T::zero();
    for (p, c) in h.terms() {
        let lin = Complex::new(T::zero(), -t * *c);
        acc += (v.get(p) - lin).norm_sqr();
    }
    Ok(acc.sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptCheck {
    pub brute_max: f64,
    pub structured_max: f64,
    pub agree: bool,
}

fn objective(b: &[f64], c: &[f64], a: &[Vec<u64>]) -> f64 {
    (0..b.len())
        .map(|j| {
            let col: f64 = c.iter().zip(a).map(|(ck, ak)| ck * ak[j] as f64).sum();
            (b[j] + col).powi(2)
        })
        .sum()
}

/// All `a ∈ [0, cap]^N` with `Σ a ≤ total`.
fn rows(n: usize, cap: u64, total: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = vec![0u64; n];
    fn rec(i: usize, used: u64, cap: u64, total: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..=cap.min(total - used) {
            cur[i] = v;
            rec(i + 1, used + v, cap, total, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, 0, cap, total, &mut cur, &mut out);
    out
}

/// Compares the exhaustive maximum of `Σ_j (b_j + Σ_k c_k a_{kj})²` over integer
/// `0 ≤ a_{kj} ≤ m^{k−1}`, `Σ_j a_{kj} ≤ m^k` with the value at `a_{kj} = m^{k−1}`
/// on the `m` largest coordinates of `b`.
pub fn opt_max_check(b: &[f64], c: &[f64], m: u64, r: usize) -> Result<OptCheck> {
    let n = b.len();
    if c.len() != r || m == 0 || n == 0 {
        return Err(Error::InvalidInput("need |c| = r, m ≥ 1 and N ≥ 1".into()));
    }
    let raw = (1..=r as u32).try_fold(1u64, |acc, k| {
        (m.checked_pow(k - 1)? + 1)
            .checked_pow(n as u32)
            .and_then(|c| acc.checked_mul(c))
    });
    if raw.is_none_or(|s| s > 100 * BRUTE_FORCE_BUDGET) {
        return Err(Error::InvalidInput(
            "search space exceeds the enumeration budget".into(),
        ));
    }
    let layer_rows: Vec<Vec<Vec<u64>>> = (1..=r as u32)
        .map(|k| rows(n, m.pow(k - 1), m.pow(k)))
        .collect();
    let space = layer_rows
        .iter()
        .try_fold(1u64, |acc, l| acc.checked_mul(l.len() as u64));
    if space.is_none_or(|s| s > BRUTE_FORCE_BUDGET) {
        return Err(Error::InvalidInput(
            "search space exceeds the enumeration budget".into(),
        ));
    }
    let mut brute = f64::NEG_INFINITY;
    let mut choice = vec![0usize; r];
    'outer: loop {
        let a: Vec<Vec<u64>> = choice
            .iter()
            .enumerate()
            .map(|(k, &i)| layer_rows[k][i].clone())
            .collect();
        brute = brute.max(objective(b, c, &a));
        for k in (0..r).rev() {
            choice[k] += 1;
            if choice[k] < layer_rows[k].len() {
                continue 'outer;
            }
            choice[k] = 0;
        }
        break;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| b[j].total_cmp(&b[i]));
    let top: Vec<usize> = order.into_iter().take(m as usize).collect();
    let structured: Vec<Vec<u64>> = (1..=r as u32)
        .map(|k| {
            (0..n)
                .map(|j| if top.contains(&j) { m.pow(k - 1) } else { 0 })
                .collect()
        })
        .collect();
    let structured_max = objective(b, c, &structured);
    Ok(OptCheck {
        brute_max: brute,
        structured_max,
        agree: brute <= structured_max + 1e-12,
    })
}

/// Largest entry modulus of `v − w` restricted to `support`.
pub fn restricted_diff<T: Real>(
    v: &PauliVector<T>,
    w: &PauliVector<T>,
    support: &[PauliString],
) -> T {
    support
        .iter()
        .fold(T::zero(), |a, p| a.max(cabs(v.get(p) - w.get(p))))
}
