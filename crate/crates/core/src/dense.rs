//! Dense complex operators and states, Hermitian exponentials and the
//! normalized norm families.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;
use num_traits::{One, Zero};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::pauli::pauli_decompose;
use crate::scalar::{cabs, cre, lit, Real, C};

/// Square complex matrix of power-of-two dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator<T: Real> {
    m: DMatrix<C<T>>,
}

impl<T: Real> DenseOperator<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            m: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_matrix(m: DMatrix<C<T>>) -> Result<Self> {
        if m.nrows() != m.ncols() || !m.nrows().is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} is not a qubit operator",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Self { m })
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C<T>) -> Self {
        Self {
            m: DMatrix::from_fn(dim, dim, f),
        }
    }

    /// Diagonal operator from real entries.
    pub fn diagonal(diag: &[T]) -> Self {
        Self::from_fn(
            diag.len(),
            |i, j| if i == j { cre(diag[i]) } else { C::zero() },
        )
    }

    pub fn matrix(&self) -> &DMatrix<C<T>> {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn get(&self, i: usize, j: usize) -> C<T> {
        self.m[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C<T>) {
        self.m[(i, j)] = v;
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self {
            m: &self.m + &other.m,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self {
            m: &self.m - &other.m,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self {
            m: &self.m * &other.m,
        })
    }

    pub fn scale(&self, c: C<T>) -> Self {
        Self { m: &self.m * c }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            m: self.m.adjoint(),
        }
    }

    pub fn trace(&self) -> C<T> {
        self.m.trace()
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            m: self.m.kronecker(&other.m),
        }
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.m.iter().fold(T::zero(), |acc, v| acc.max(cabs(*v)))
    }

    pub fn apply(&self, psi: &StateVector<T>) -> Result<StateVector<T>> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "operator {} vs state {}",
                self.dim(),
                psi.dim()
            )));
        }
        Ok(StateVector {
            v: &self.m * &psi.v,
        })
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        let scale = T::one().max(self.max_abs());
        (&self.m - self.m.adjoint())
            .iter()
            .all(|v| cabs(*v) <= tol * scale)
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        let prod = self.m.adjoint() * &self.m;
        (prod - DMatrix::<C<T>>::identity(self.dim(), self.dim()))
            .iter()
            .all(|v| cabs(*v) <= tol)
    }

    /// `A^k` by repeated squaring.
    pub fn pow(&self, mut k: u64) -> Self {
        let mut base = self.m.clone();
        let mut acc = DMatrix::<C<T>>::identity(self.dim(), self.dim());
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        Self { m: acc }
    }

    pub fn singular_values(&self) -> Vec<T> {
        self.m.clone().singular_values().iter().copied().collect()
    }

    /// Spectral norm.
    pub fn operator_norm(&self) -> T {
        self.singular_values()
            .into_iter()
            .fold(T::zero(), |a, s| a.max(s))
    }
}

/// Eigendecomposition `H = V diag(λ) V†` of a Hermitian operator.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T: Real> {
    pub eigenvalues: Vec<T>,
    vectors: DMatrix<C<T>>,
}

impl<T: Real> HermitianEigen<T> {
    pub fn new(h: &DenseOperator<T>) -> Result<Self> {
        if !h.is_hermitian(lit(1e-9)) {
            return Err(Error::NotHermitian(format!(
                "{}-dimensional operator",
                h.dim()
            )));
        }
        let e = SymmetricEigen::new(h.m.clone());
        Ok(Self {
            eigenvalues: e.eigenvalues.iter().copied().collect(),
            vectors: e.eigenvectors,
        })
    }

    /// `e^{−iHt}`.
    pub fn exp_neg_i(&self, t: T) -> DenseOperator<T> {
        let mut scaled = self.vectors.clone();
        for (j, lam) in self.eigenvalues.iter().enumerate() {
            let ph = -*lam * t;
            let c = Complex::new(ph.cos(), ph.sin());
            scaled.column_mut(j).iter_mut().for_each(|x| *x *= c);
        }
        DenseOperator {
            m: scaled * self.vectors.adjoint(),
        }
    }

    pub fn spectral_radius(&self) -> T {
        self.eigenvalues
            .iter()
            .fold(T::zero(), |a, l| a.max(l.abs()))
    }
}

/// `e^{−iHt}` for Hermitian `H`.
pub fn hermitian_expm<T: Real>(h: &DenseOperator<T>, t: T) -> Result<DenseOperator<T>> {
    Ok(HermitianEigen::new(h)?.exp_neg_i(t))
}

fn check_p(p: f64, lo: f64) -> Result<()> {
    if p.is_nan() || p < lo {
        return Err(Error::InvalidInput(format!("norm index p={p} below {lo}")));
    }
    Ok(())
}

/// Normalized Schatten norm `(Tr|A|^p / d)^{1/p}`; `p = ∞` gives the operator norm.
pub fn schatten_norm<T: Real>(a: &DenseOperator<T>, p: f64) -> Result<T> {
    check_p(p, 1.0)?;
    let sv = a.singular_values();
    if p.is_infinite() {
        return Ok(sv.into_iter().fold(T::zero(), |x, s| x.max(s)));
    }
    Ok(lp(&sv, p, a.dim()))
}

/// Pauli norm `(Σ|s_α|^p)^{1/p}`; `p = 0` counts nonzero coefficients and
/// `p = ∞` gives the largest modulus.
pub fn pauli_norm<T: Real>(a: &DenseOperator<T>, p: f64) -> Result<T> {
    check_p(p, 0.0)?;
    let mags: Vec<T> = pauli_decompose(a)?.iter().map(|(_, v)| cabs(*v)).collect();
    pauli_norm_of(&mags, p)
}

/// Pauli norm of an explicit coefficient magnitude list.
pub fn pauli_norm_of<T: Real>(mags: &[T], p: f64) -> Result<T> {
    check_p(p, 0.0)?;
    let top = mags.iter().fold(T::zero(), |x, s| x.max(*s));
    if p == 0.0 {
        let floor = top * lit(1e-12);
        return Ok(lit(mags.iter().filter(|s| **s > floor).count() as f64));
    }
    if p.is_infinite() {
        return Ok(top);
    }
    Ok(lp(mags, p, 1))
}

fn lp<T: Real>(vals: &[T], p: f64, d: usize) -> T {
    let pt: T = lit(p);
    let sum = vals.iter().fold(T::zero(), |acc, s| acc + s.abs().powf(pt));
    (sum / lit(d as f64)).powf(T::one() / pt)
}

/// Normalized Frobenius norm, equal to the Pauli 2-norm.
pub fn frobenius_norm<T: Real>(a: &DenseOperator<T>) -> T {
    let d: T = lit(a.dim() as f64);
    (a.m.iter().fold(T::zero(), |acc, v| acc + v.norm_sqr()) / d).sqrt()
}

/// `‖U − V‖` in the spectral norm.
pub fn operator_norm_distance<T: Real>(u: &DenseOperator<T>, v: &DenseOperator<T>) -> Result<T> {
    Ok(u.sub(v)?.operator_norm())
}

/// Haar-random unitary on `n` qubits (QR of a Ginibre matrix with phase fix).
pub fn random_unitary<T: Real>(n: usize, rng: &mut impl Rng) -> DenseOperator<T> {
    let d = 1usize << n;
    let g = DMatrix::<C<T>>::from_fn(d, d, |_, _| gaussian(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let rjj = r[(j, j)];
        let ph = if cabs(rjj) > T::zero() {
            rjj / cre(cabs(rjj))
        } else {
            C::one()
        };
        q.column_mut(j).iter_mut().for_each(|x| *x *= ph);
    }
    DenseOperator { m: q }
}

/// Random Hermitian operator from the Gaussian unitary ensemble, scaled to unit spectral norm.
pub fn random_hermitian<T: Real>(n: usize, rng: &mut impl Rng) -> DenseOperator<T> {
    let d = 1usize << n;
    let g = DMatrix::<C<T>>::from_fn(d, d, |_, _| gaussian(rng));
    let h = DenseOperator {
        m: (&g + g.adjoint()) * cre(lit(0.5)),
    };
    let nrm = h.operator_norm();
    h.scale(cre(T::one() / nrm))
}

fn gaussian<T: Real>(rng: &mut impl Rng) -> C<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(lit(re), lit(im))
}

/// Pure state on `log2(dim)` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T: Real> {
    v: DVector<C<T>>,
}

impl<T: Real> StateVector<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            v: DVector::zeros(dim),
        }
    }

    pub fn basis(dim: usize, j: usize) -> Self {
        let mut s = Self::zeros(dim);
        s.v[j] = C::one();
        s
    }

    pub fn from_amplitudes(amps: Vec<C<T>>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "state length {}",
                amps.len()
            )));
        }
        Ok(Self {
            v: DVector::from_vec(amps),
        })
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn amp(&self, j: usize) -> C<T> {
        self.v[j]
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        self.v.as_slice()
    }

    pub fn norm(&self) -> T {
        self.v.norm()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - T::one()).abs() <= lit(1e-9)
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self {
            v: &self.v * cre(T::one() / n),
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C<T> {
        self.v.dotc(&other.v)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            v: &self.v + &other.v,
        }
    }

    pub fn scale(&self, c: C<T>) -> Self {
        Self { v: &self.v * c }
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            v: self.v.kronecker(&other.v),
        }
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.v.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Projector `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> DenseOperator<T> {
        DenseOperator {
            m: &self.v * self.v.adjoint(),
        }
    }
}
