//! Exact checks of the total-variation bounds on experiment outcome
//! distributions, anticommuting hypothesis pairs, and log-log scaling fits of
//! certifier evolution time.
//!
//! Register layout of an experiment: qubit 0 is the control, qubits `1..=n`
//! carry the system, the rest are ancillas.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::certify::{rchc, shc, Decision};
use crate::dense::{random_unitary, DenseOperator, HermitianEigen, StateVector};
use crate::error::{Error, Result};
use crate::evolution::{controlled_unitary, EvolutionOracle};
use crate::hamiltonian::{random_hamiltonian, residual, PauliHamiltonian};
use crate::pauli::{anticommuting_chain, DENSE_CEILING};
use crate::stats::tv_distance;

const POVM_TOL: f64 = 1e-9;
const TV_SLACK: f64 = 1e-10;

/// One prepare, interleave, measure experiment.
#[derive(Clone, Debug)]
pub struct SingleExperiment {
    n_system: usize,
    initial: StateVector<f64>,
    unitaries: Vec<DenseOperator<f64>>,
    durations: Vec<f64>,
    controlled: Vec<bool>,
    povm: Vec<DenseOperator<f64>>,
}

impl SingleExperiment {
    pub fn new(
        n_system: usize,
        initial: StateVector<f64>,
        unitaries: Vec<DenseOperator<f64>>,
        durations: Vec<f64>,
        controlled: Vec<bool>,
        povm: Vec<DenseOperator<f64>>,
    ) -> Result<Self> {
        let dim = initial.dim();
        let total = dim.trailing_zeros() as usize;
        if !dim.is_power_of_two() || total < n_system + 1 || total > DENSE_CEILING {
            return Err(Error::InvalidInput(format!(
                "{total} qubits cannot host a {n_system}-qubit system plus control"
            )));
        }
        if unitaries.len() != durations.len() + 1 || controlled.len() != durations.len() {
            return Err(Error::InvalidInput(
                "need D+1 unitaries and D durations".into(),
            ));
        }
        if unitaries.iter().chain(&povm).any(|u| u.dim() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "operators must act on dimension {dim}"
            )));
        }
        let mut sum = DenseOperator::zeros(dim);
        for m in &povm {
            let eig = HermitianEigen::new(m)?;
            if eig.eigenvalues.iter().any(|l| *l < -POVM_TOL) {
                return Err(Error::InvalidInput(
                    "POVM element is not positive semidefinite".into(),
                ));
            }
            sum = sum.add(m)?;
        }
        if sum.sub(&DenseOperator::identity(dim))?.max_abs() > POVM_TOL {
            return Err(Error::InvalidInput(
                "POVM elements do not sum to the identity".into(),
            ));
        }
        Ok(Self {
            n_system,
            initial,
            unitaries,
            durations,
            controlled,
            povm,
        })
    }

    pub fn n_system(&self) -> usize {
        self.n_system
    }

    pub fn depth(&self) -> usize {
        self.durations.len()
    }

    pub fn outcomes(&self) -> usize {
        self.povm.len()
    }

    /// `t(E) = Σ|tᵢ|`.
    pub fn total_time(&self) -> f64 {
        self.durations.iter().map(|t| t.abs()).sum()
    }

    /// Copy with every duration multiplied by `c`.
    pub fn rescaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.durations.iter_mut().for_each(|t| *t *= c);
        out
    }
}

fn embedded_call(
    e: &HermitianEigen<f64>,
    t: f64,
    controlled: bool,
    n_system: usize,
    total: usize,
) -> DenseOperator<f64> {
    let anc = DenseOperator::identity(1 << (total - 1 - n_system));
    let u = e.exp_neg_i(t).kron(&anc);
    if controlled {
        controlled_unitary(&u)
    } else {
        DenseOperator::identity(2).kron(&u)
    }
}

/// Outcome probabilities `⟨ψ|Mᵢ|ψ⟩` of the composed circuit.
pub fn experiment_distribution(
    e: &SingleExperiment,
    h: &PauliHamiltonian<f64>,
) -> Result<Vec<f64>> {
    if h.n() != e.n_system {
        return Err(Error::DimensionMismatch(format!(
            "H on {} qubits, experiment system {}",
            h.n(),
            e.n_system
        )));
    }
    let total = e.initial.dim().trailing_zeros() as usize;
    let eig = HermitianEigen::new(&h.to_dense()?)?;
    let mut psi = e.unitaries[0].apply(&e.initial)?;
    for (i, (&t, &c)) in e.durations.iter().zip(&e.controlled).enumerate() {
        psi = embedded_call(&eig, t, c, e.n_system, total).apply(&psi)?;
        psi = e.unitaries[i + 1].apply(&psi)?;
    }
    Ok(e.povm
        .iter()
        .map(|m| {
            psi.inner(&m.apply(&psi).expect("dimension checked"))
                .re
                .max(0.0)
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TvCheck {
    pub tv: f64,
    pub bound: f64,
    pub holds: bool,
}

fn tv_bound(h1: &PauliHamiltonian<f64>, h2: &PauliHamiltonian<f64>, time: f64) -> Result<f64> {
    let diff = residual(h1, h2)?.to_dense()?.operator_norm();
    Ok((2.0 * diff * time).min(1.0))
}

/// `d_TV ≤ min(2‖H₁ − H₂‖ t(E), 1)`.
pub fn tv_bound_check(
    e: &SingleExperiment,
    h1: &PauliHamiltonian<f64>,
    h2: &PauliHamiltonian<f64>,
) -> Result<TvCheck> {
    let tv = tv_distance(
        &experiment_distribution(e, h1)?,
        &experiment_distribution(e, h2)?,
    )?;
    let bound = tv_bound(h1, h2, e.total_time())?;
    Ok(TvCheck {
        tv,
        bound,
        holds: tv <= bound + TV_SLACK,
    })
}

/// Projective measurement onto the columns of a Haar-random unitary, grouped into `k` outcomes.
pub fn random_povm(qubits: usize, k: usize, rng: &mut impl Rng) -> Result<Vec<DenseOperator<f64>>> {
    let dim = 1usize << qubits;
    if k == 0 || k > dim {
        return Err(Error::InvalidInput(format!(
            "{k} outcomes on dimension {dim}"
        )));
    }
    let basis = random_unitary::<f64>(qubits, rng);
    let mut out = vec![DenseOperator::zeros(dim); k];
    for j in 0..dim {
        let col = StateVector::from_amplitudes((0..dim).map(|i| basis.get(i, j)).collect())?;
        let slot = if j < k { j } else { rng.random_range(0..k) };
        out[slot] = out[slot].add(&col.projector())?;
    }
    Ok(out)
}

/// Random experiment on `1 + n + ancillas` qubits starting from `|0…0⟩`, durations in `[−1, 1]`.
pub fn random_experiment(
    n: usize,
    ancillas: usize,
    depth: usize,
    outcomes: usize,
    rng: &mut impl Rng,
) -> Result<SingleExperiment> {
    let total = 1 + n + ancillas;
    let unitaries = (0..=depth)
        .map(|_| random_unitary::<f64>(total, rng))
        .collect();
    let durations = (0..depth).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let controlled = (0..depth).map(|_| rng.random::<bool>()).collect();
    let povm = random_povm(total, outcomes, rng)?;
    SingleExperiment::new(
        n,
        StateVector::basis(1 << total, 0),
        unitaries,
        durations,
        controlled,
        povm,
    )
}

/// Adaptive sequence of experiments: after each outcome the matching child runs next.
#[derive(Clone, Debug)]
pub struct AdaptiveTree {
    pub experiment: SingleExperiment,
    /// Empty at a leaf; otherwise one subtree per outcome.
    pub children: Vec<AdaptiveTree>,
}

impl AdaptiveTree {
    pub fn new(experiment: SingleExperiment, children: Vec<AdaptiveTree>) -> Result<Self> {
        if !children.is_empty() && children.len() != experiment.outcomes() {
            return Err(Error::InvalidInput(
                "one subtree per outcome required".into(),
            ));
        }
        Ok(Self {
            experiment,
            children,
        })
    }

    /// Number of measurement levels.
    pub fn levels(&self) -> usize {
        1 + self.children.iter().map(|c| c.levels()).max().unwrap_or(0)
    }

    /// Largest total evolution time along any outcome path.
    pub fn max_path_time(&self) -> f64 {
        self.experiment.total_time()
            + self
                .children
                .iter()
                .map(|c| c.max_path_time())
                .fold(0.0, f64::max)
    }

    /// Probabilities of complete outcome paths, in depth-first order.
    pub fn path_distribution(&self, h: &PauliHamiltonian<f64>) -> Result<Vec<f64>> {
        let top = experiment_distribution(&self.experiment, h)?;
        if self.children.is_empty() {
            return Ok(top);
        }
        let mut out = Vec::new();
        for (p, child) in top.iter().zip(&self.children) {
            out.extend(child.path_distribution(h)?.into_iter().map(|q| p * q));
        }
        Ok(out)
    }
}

/// Random tree with `levels` measurement levels and `branching` outcomes per node.
pub fn random_tree(
    n: usize,
    ancillas: usize,
    levels: usize,
    max_depth: usize,
    branching: usize,
    rng: &mut impl Rng,
) -> Result<AdaptiveTree> {
    let depth = rng.random_range(0..=max_depth);
    let experiment = random_experiment(n, ancillas, depth, branching, rng)?;
    let children = if levels > 1 {
        (0..branching)
            .map(|_| random_tree(n, ancillas, levels - 1, max_depth, branching, rng))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    AdaptiveTree::new(experiment, children)
}

/// Path-level `d_TV ≤ min(2‖H₁ − H₂‖T, 1)` with `T` the largest path time.
pub fn tree_tv_bound_check(
    t: &AdaptiveTree,
    h1: &PauliHamiltonian<f64>,
    h2: &PauliHamiltonian<f64>,
) -> Result<TvCheck> {
    let tv = tv_distance(&t.path_distribution(h1)?, &t.path_distribution(h2)?)?;
    let bound = tv_bound(h1, h2, t.max_path_time())?;
    Ok(TvCheck {
        tv,
        bound,
        holds: tv <= bound + TV_SLACK,
    })
}

/// `H_i = Σ_{α ∈ chain[0..m)} (ε_i/m^{1/p}) P_α`; `p = ∞` gives unscaled coefficients.
pub fn hypothesis_instances(
    p: f64,
    m: usize,
    eps1: f64,
    eps2: f64,
    n: usize,
) -> Result<(PauliHamiltonian<f64>, PauliHamiltonian<f64>)> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidInput(format!("norm index {p} below 1")));
    }
    if m == 0 || m > 2 * n + 1 {
        return Err(Error::InvalidInput(format!(
            "m = {m} outside 1..={}",
            2 * n + 1
        )));
    }
    if !(eps1 >= 0.0 && eps2 >= 0.0) {
        return Err(Error::InvalidInput("thresholds must be nonnegative".into()));
    }
    let chain = anticommuting_chain(n);
    let scale = (m as f64).powf(-1.0 / p);
    let bound = eps1.max(eps2) * scale;
    let build =
        |eps: f64| PauliHamiltonian::new(n, chain[..m].iter().map(|a| (*a, eps * scale)), bound);
    Ok((build(eps1)?, build(eps2)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Witness {
    /// Best success probability over the family and all decision rules, equal priors.
    pub max_success: f64,
    /// `2‖H₁ − H₂‖T` with `T` the largest experiment time in the family.
    pub budget: f64,
    pub holds: bool,
}

/// Searches decision rules `S ⊆ outcomes` (guess `H₁` on `S`) over a family of experiments.
pub fn indistinguishability_witness(
    h1: &PauliHamiltonian<f64>,
    h2: &PauliHamiltonian<f64>,
    family: &[SingleExperiment],
) -> Result<Witness> {
    let diff = residual(h1, h2)?.to_dense()?.operator_norm();
    let mut best: f64 = 0.5;
    let mut time: f64 = 0.0;
    for e in family {
        if e.outcomes() > 16 {
            return Err(Error::InvalidInput(
                "decision search limited to 16 outcomes".into(),
            ));
        }
        time = time.max(e.total_time());
        let p = experiment_distribution(e, h1)?;
        let q = experiment_distribution(e, h2)?;
        for s in 0u32..1 << p.len() {
            let (mut ps, mut qc) = (0.0, 0.0);
            for i in 0..p.len() {
                if s >> i & 1 == 1 {
                    ps += p[i];
                } else {
                    qc += q[i];
                }
            }
            best = best.max(0.5 * (ps + qc));
        }
    }
    let budget = 2.0 * diff * time;
    Ok(Witness {
        max_success: best,
        budget,
        holds: budget >= 1.0 / 3.0 || best <= 2.0 / 3.0 + TV_SLACK,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingTarget {
    /// Robust coherent certification over the gap `ε₂ − ε₁` with `ε₂ = 3ε₁`.
    Rchc,
    /// Stabilizer certification over the term count `m` at `ε = 0.05`.
    Shc,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalingRow {
    pub grid_value: f64,
    pub total_time: f64,
    pub queries: f64,
    pub measurements: f64,
    pub accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingResult {
    pub target: ScalingTarget,
    pub rows: Vec<ScalingRow>,
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
}

impl ScalingResult {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row).map_err(|e| Error::Parse(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }
}

pub const SCALING_QUBITS: usize = 2;
pub const SCALING_DELTA: f64 = 0.1;
pub const SHC_SCALING_EPS: f64 = 0.05;

/// Ordinary least squares `y = slope·x + intercept` with residuals.
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<(f64, f64, Vec<f64>)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidInput(
            "need at least two paired points".into(),
        ));
    }
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("degenerate abscissae".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let res = x
        .iter()
        .zip(y)
        .map(|(a, b)| b - (slope * a + intercept))
        .collect();
    Ok((slope, intercept, res))
}

/// Runs the certifier on `H = H₀` across the grid and fits `log T` against `log(grid)`.
pub fn scaling_experiment(
    target: ScalingTarget,
    grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<ScalingResult> {
    if grid.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "grid of {} points; at least 3 required",
            grid.len()
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidInput("at least one trial required".into()));
    }
    let mut rows = Vec::with_capacity(grid.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &g in grid {
        let (mut time, mut queries, mut meas, mut correct) = (0.0, 0.0, 0.0, 0usize);
        for _ in 0..trials {
            let trial_seed = rng.random::<u64>();
            let report = match target {
                ScalingTarget::Rchc => {
                    let h0 = random_hamiltonian::<f64>(SCALING_QUBITS, 2, 1.0, trial_seed)?;
                    let mut o = EvolutionOracle::new(h0.clone())?;
                    rchc(
                        &h0,
                        &mut o,
                        2,
                        1.0,
                        g / 2.0,
                        1.5 * g,
                        SCALING_DELTA,
                        trial_seed,
                    )?
                }
                ScalingTarget::Shc => {
                    if g < 1.0 || g.fract() != 0.0 {
                        return Err(Error::InvalidInput(format!(
                            "term count {g} is not a positive integer"
                        )));
                    }
                    let m = g as usize;
                    let h0 = random_hamiltonian::<f64>(SCALING_QUBITS, m, 1.0, trial_seed)?;
                    let mut o = EvolutionOracle::new(h0.clone())?;
                    shc(
                        &h0,
                        &mut o,
                        m,
                        1.0,
                        SHC_SCALING_EPS,
                        SCALING_DELTA,
                        trial_seed,
                    )?
                }
            };
            time += report.ledger.total_time;
            queries += report.ledger.queries as f64;
            meas += report.ledger.measurements as f64;
            correct += (report.verdict == Decision::Accept) as usize;
        }
        let k = trials as f64;
        rows.push(ScalingRow {
            grid_value: g,
            total_time: time / k,
            queries: queries / k,
            measurements: meas / k,
            accuracy: correct as f64 / k,
        });
    }
    let x: Vec<f64> = rows.iter().map(|r| r.grid_value.ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.total_time.ln()).collect();
    let (slope, intercept, residuals) = fit_line(&x, &y)?;
    Ok(ScalingResult {
        target,
        rows,
        slope,
        intercept,
        residuals,
    })
}
