//! Independent reference computations shared by the integration tests.

#![allow(dead_code)]

use hamcert::dense::DenseOperator;
use hamcert::pauli::PauliString;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Dense Pauli built as a Kronecker product of 2×2 letter matrices.
pub fn letter_dense(p: &PauliString) -> DMatrix<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut out = DMatrix::from_element(1, 1, one);
    for q in 0..p.n() {
        let m = match p.letter(q) {
            'I' => DMatrix::from_row_slice(2, 2, &[one, zero, zero, one]),
            'X' => DMatrix::from_row_slice(2, 2, &[zero, one, one, zero]),
            'Y' => DMatrix::from_row_slice(2, 2, &[zero, -i, i, zero]),
            _ => DMatrix::from_row_slice(2, 2, &[one, zero, zero, -one]),
        };
        out = out.kronecker(&m);
    }
    out
}

/// `Tr(P_α A)/2ⁿ` for every `α`, by explicit traces.
pub fn trace_coefficients(a: &DenseOperator<f64>) -> Vec<(PauliString, Complex64)> {
    let n = a.qubits();
    let d = a.dim() as f64;
    PauliString::all(n)
        .map(|p| (p, (letter_dense(&p) * a.matrix()).trace() / d))
        .collect()
}

pub fn max_entry_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().fold(0.0, |m, v| m.max(v.norm()))
}

/// Wilson score lower bound at 95% confidence.
pub fn wilson_lower(successes: usize, trials: usize) -> f64 {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z = 1.959_963_984_540_054f64;
    let z2 = z * z;
    (p + z2 / (2.0 * n) - z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt()) / (1.0 + z2 / n)
}

/// `(e^x − 1 − x)/m` with `x = m S t`, from the series.
pub fn remainder_series(m: usize, s: f64, t: f64) -> f64 {
    let x = m as f64 * s * t.abs();
    let mut term = x * x / 2.0;
    let mut acc: f64 = 0.0;
    let mut k = 2.0;
    while term > 1e-18 * acc.max(1e-300) && k < 200.0 {
        acc += term;
        k += 1.0;
        term *= x / k;
    }
    acc / m as f64
}
