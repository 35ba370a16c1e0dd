//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hamcert::amplitude::{bell_overlaps, hae_signal_amplitude, HaeMode, ResidualBudget};
use hamcert::certify::{
    rchc, rchc_plan, shc, shc_schedule, CertificationReport, Decision, ThresholdScale,
};
use hamcert::coeff::{
    l2_lower_bound, l2_upper_bound, non_identity_set, outside_group_set, taylor_partition,
};
use hamcert::dense::{
    hermitian_expm, operator_norm_distance, random_hermitian, random_unitary, DenseOperator,
};
use hamcert::error::Result;
use hamcert::evolution::{
    strang_product, trotter_error_bound_dense, EvolutionAccess, EvolutionOracle, TimeLedger,
};
use hamcert::hamiltonian::{
    planted_instance, random_hamiltonian_with, PauliHamiltonian, ResidualSupport,
};
use hamcert::lowerbound::{
    hypothesis_instances, random_experiment, random_tree, scaling_experiment, tree_tv_bound_check,
    tv_bound_check, ScalingTarget,
};
use hamcert::pauli::{pauli_decompose, pauli_multiply, symplectic_product, PauliString};
use hamcert::sampling::{hss_signal_probability_exact, sbs_signal_probability_exact, SbsSampler};
use hamcert::stabilizer::{
    stabilizer_state, syndrome, unique_decompose, GroupKind, MaximalStabilizerGroup,
};
use hamcert::stats::{
    amp_test, bernoulli_test, AmpEstConfig, BernoulliPlan, ExactBernoulli, QueryCounter, Verdict,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{letter_dense, max_entry_diff, trace_coefficients, wilson_lower};

const TOL: f64 = 1e-10;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn i_pow(k: u8) -> Complex64 {
    [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ][(k & 3) as usize]
}

fn random_pauli(n: usize, r: &mut impl Rng) -> PauliString {
    PauliString::from_index(n, r.random_range(0..1u64 << (2 * n)))
}

fn algebra_case(
    a: &PauliString,
    b: &PauliString,
    groups: &[MaximalStabilizerGroup],
) -> Result<bool> {
    let (da, db) = (letter_dense(a), letter_dense(b));
    let prod = pauli_multiply(a, b)?;
    let mut ok = max_entry_diff(
        &(&da * &db),
        &(letter_dense(&prod.body) * i_pow(prod.phase_exp)),
    ) < TOL;
    let commute = max_entry_diff(&(&da * &db), &(&db * &da)) < TOL;
    ok &= (symplectic_product(a, b)? == 0) == commute;
    for g in groups {
        let s = syndrome(g, a)?;
        for (i, gi) in g.generators().iter().enumerate() {
            let dg = letter_dense(gi);
            let anti = max_entry_diff(&(&da * &dg), &(-(&dg * &da))) < TOL;
            ok &= s.bit(i) == anti;
        }
        let (k, beta, gamma) = unique_decompose(g, a)?;
        ok &= max_entry_diff(
            &da,
            &(letter_dense(&beta) * letter_dense(&gamma) * i_pow(k)),
        ) < TOL;
        let psi = stabilizer_state::<f64>(g)?;
        let v = DMatrix::from_column_slice(psi.dim(), 1, psi.amplitudes());
        ok &= max_entry_diff(&(letter_dense(&gamma) * &v), &v) < TOL;
        ok &= syndrome(g, &beta)? == s;
    }
    Ok(ok)
}

fn criterion_1() -> Result<Outcome> {
    let start = Instant::now();
    let (mut cases, mut bad) = (0usize, 0usize);
    for n in 1..=2 {
        let groups = [
            MaximalStabilizerGroup::all_z(n),
            MaximalStabilizerGroup::all_x(n),
        ];
        for a in PauliString::all(n) {
            for b in PauliString::all(n) {
                cases += 1;
                bad += !algebra_case(&a, &b, &groups)? as usize;
            }
        }
    }
    let groups = [
        MaximalStabilizerGroup::all_z(3),
        MaximalStabilizerGroup::all_x(3),
    ];
    let mut r = rng(1);
    for _ in 0..500 {
        let (a, b) = (random_pauli(3, &mut r), random_pauli(3, &mut r));
        cases += 1;
        bad += !algebra_case(&a, &b, &groups)? as usize;
    }
    let el = start.elapsed();
    Ok(outcome(
        bad == 0 && el < Duration::from_secs(10),
        format!("{cases} cases, {bad} mismatches, {:.2?}", el),
    ))
}

fn criterion_2() -> Result<Outcome> {
    let mut r = rng(2);
    let mut violations = 0;
    for i in 0..100 {
        let n = 1 + i % 3;
        let a =
            random_hermitian::<f64>(n, &mut r).scale(Complex64::new(r.random_range(0.2..2.0), 0.0));
        let b =
            random_hermitian::<f64>(n, &mut r).scale(Complex64::new(r.random_range(0.2..2.0), 0.0));
        let t = r.random_range(0.1..2.0);
        let steps = r.random_range(1..=20u64);
        let exact = hermitian_expm(&a.add(&b)?, t)?;
        let err = operator_norm_distance(&exact, &strang_product(&a, &b, t, steps)?)?;
        violations += (err > trotter_error_bound_dense(&a, &b, t, steps)? + 1e-12) as usize;
    }
    let a = random_hermitian::<f64>(2, &mut r);
    let b = random_hermitian::<f64>(2, &mut r);
    let exact = hermitian_expm(&a.add(&b)?, 1.0)?;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for steps in [8u64, 16, 32, 64, 128] {
        xs.push((steps as f64).ln());
        ys.push(operator_norm_distance(&exact, &strang_product(&a, &b, 1.0, steps)?)?.ln());
    }
    let (slope, _, _) = hamcert::lowerbound::fit_line(&xs, &ys)?;
    Ok(outcome(
        violations == 0 && (slope + 2.0).abs() <= 0.1,
        format!("100 instances, {violations} violations, convergence slope {slope:.4}"),
    ))
}

fn coefficient_mass(h: &PauliHamiltonian<f64>, t: f64, x: &[PauliString]) -> Result<f64> {
    let u = hermitian_expm(&h.to_dense()?, t)?;
    Ok(trace_coefficients(&u)
        .into_iter()
        .filter(|(p, _)| x.contains(p))
        .map(|(_, c)| c.norm_sqr())
        .sum())
}

fn criterion_3() -> Result<Outcome> {
    let mut r = rng(3);
    let (mut lower_bad, mut upper_bad) = (0, 0);
    let (mut lower_n, mut upper_n) = (0, 0);
    let mut i = 0usize;
    while lower_n < 500 || upper_n < 500 {
        i += 1;
        let n = 1 + i % 4;
        let max_m = 8.min((1 << (2 * n)) - 1);
        let m = r.random_range(1..=max_m);
        let h = random_hamiltonian_with::<f64>(n, m, 1.0, &mut r)?;
        let t = r.random_range(0.0..=1.0) / (m as f64 * h.max_coeff());
        let x = if r.random::<bool>() {
            non_identity_set(n)
        } else {
            let kind = if r.random::<bool>() {
                GroupKind::AllZ
            } else {
                GroupKind::AllX
            };
            outside_group_set(&kind.group(n))
        };
        if x.len() < m {
            continue;
        }
        let mass = coefficient_mass(&h, t, &x)?;
        let in_x: Vec<f64> = h
            .terms()
            .filter(|(p, _)| x.contains(p))
            .map(|(_, c)| c.abs())
            .collect();
        let rem = common::remainder_series(m, h.max_coeff(), t);
        if lower_n < 500 && (i.is_multiple_of(2) || upper_n >= 500) {
            lower_n += 1;
            let chk = l2_lower_bound(&h, t, &x)?;
            let rhs = in_x.iter().map(|s| s * s).sum::<f64>().sqrt() * t - (m as f64).sqrt() * rem;
            lower_bad += !(chk.holds
                && mass.sqrt() >= rhs - 1e-12
                && (chk.lhs - mass.sqrt()).abs() < 1e-10) as usize;
        } else {
            upper_n += 1;
            let chk = l2_upper_bound(&h, t, &x)?;
            let rhs = in_x.iter().map(|s| (s * t + rem).powi(2)).sum::<f64>()
                + (m - in_x.len()) as f64 * rem * rem;
            upper_bad +=
                !(chk.holds && mass <= rhs + 1e-12 && (chk.lhs - mass).abs() < 1e-10) as usize;
        }
    }
    let mut partition_bad = 0;
    let mut pr = rng(33);
    for m in 1..=3usize {
        for k in 1..=4u32 {
            let h = random_hamiltonian_with::<f64>(2, m, 1.0, &mut pr)?;
            let part = taylor_partition(&h, k)?;
            let total: u64 = part.counts.values().sum();
            let cap = (m as u64).pow(k - 1);
            partition_bad +=
                !(total == (m as u64).pow(k) && part.counts.values().all(|c| *c <= cap)) as usize;
        }
    }
    Ok(outcome(
        lower_bad + upper_bad + partition_bad == 0,
        format!("500+500 instances, {lower_bad} lower / {upper_bad} upper violations, {partition_bad} partition failures"),
    ))
}

fn criterion_4() -> Result<Outcome> {
    let mut r = rng(4);
    let mut bell_err: f64 = 0.0;
    for n in 1..=3 {
        for _ in 0..10 {
            let u = random_unitary::<f64>(n, &mut r);
            bell_err = bell_err.max(bell_overlaps(&u)?.max_abs_diff(&pauli_decompose(&u)?));
        }
    }
    let mut sbs_err: f64 = 0.0;
    for i in 0..100 {
        let n = 1 + i % 3;
        let g = if i % 2 == 0 {
            MaximalStabilizerGroup::all_z(n)
        } else {
            MaximalStabilizerGroup::all_x(n)
        };
        let u = random_unitary::<f64>(n, &mut r);
        let reference: f64 = trace_coefficients(&u)
            .into_iter()
            .filter(|(p, _)| !g.contains(p))
            .map(|(_, c)| c.norm_sqr())
            .sum();
        let ex = SbsSampler::new(&u, &g)?.exhaustive_probability();
        let exact = sbs_signal_probability_exact(&u, &g)?;
        sbs_err = sbs_err
            .max((ex - reference).abs())
            .max((exact - reference).abs());
    }
    Ok(outcome(
        bell_err < TOL && sbs_err < TOL,
        format!("Bell extraction max error {bell_err:.2e}, exhaustive sampling max error {sbs_err:.2e} over 100 unitaries"),
    ))
}

/// Residual with the given terms added to a random `H₀`.
fn with_residual(
    h0: &PauliHamiltonian<f64>,
    res: &[(PauliString, f64)],
) -> Result<PauliHamiltonian<f64>> {
    let mut terms: std::collections::BTreeMap<PauliString, f64> =
        h0.terms().map(|(p, c)| (*p, *c)).collect();
    for (p, c) in res {
        *terms.entry(*p).or_insert(0.0) += c;
    }
    let cap = terms.values().fold(h0.bound(), |a, c| a.max(c.abs()));
    PauliHamiltonian::new(h0.n(), terms, cap)
}

fn random_residual(
    n: usize,
    count: usize,
    mags: impl Fn(&mut ChaCha8Rng) -> f64,
    keep: impl Fn(&PauliString) -> bool,
    r: &mut ChaCha8Rng,
) -> Vec<(PauliString, f64)> {
    let pool: Vec<PauliString> = PauliString::all(n).skip(1).filter(|p| keep(p)).collect();
    let picks = rand::seq::index::sample(r, pool.len(), count.min(pool.len()));
    picks
        .into_iter()
        .map(|i| {
            (
                pool[i],
                mags(r) * if r.random::<bool>() { 1.0 } else { -1.0 },
            )
        })
        .collect()
}

fn norm_of(res: &[(PauliString, f64)], keep: impl Fn(&PauliString) -> bool) -> f64 {
    res.iter()
        .filter(|(p, _)| keep(p))
        .map(|(_, c)| c * c)
        .sum::<f64>()
        .sqrt()
}

fn rescale(res: &mut [(PauliString, f64)], target: f64) {
    let nrm = norm_of(res, |_| true);
    res.iter_mut().for_each(|(_, c)| *c *= target / nrm);
}

#[derive(Default)]
struct HssTally {
    instances: usize,
    violations: usize,
}

fn hss_cases() -> Result<[HssTally; 4]> {
    let (eps, bound) = (0.05, 1.0);
    let mut out: [HssTally; 4] = Default::default();
    let mut r = rng(55);
    for (case, tally) in out.iter_mut().enumerate() {
        while tally.instances < 50 {
            let n = 2 + r.random_range(0..2);
            let m = r.random_range(1..=4usize);
            let m0 = 2 * m;
            let m3 = (m0 as f64).powi(3);
            let h0 = random_hamiltonian_with::<f64>(n, m, bound, &mut r)?;
            let kind = if r.random::<bool>() {
                GroupKind::AllZ
            } else {
                GroupKind::AllX
            };
            let g = kind.group(n);
            let sched: Vec<_> = shc_schedule(&h0, m, bound, eps, 0.1)?
                .into_iter()
                .filter(|c| c.round == kind)
                .collect();
            let iterative: Vec<_> = sched.iter().filter(|c| c.j > 0).collect();
            let last = sched.last().expect("final check");
            let count = r.random_range(1..=m0);
            let (check, res, upper, thr) = match case {
                0 | 2 => {
                    let mut res =
                        random_residual(n, count, |r| r.random_range(0.01..1.0), |_| true, &mut r);
                    rescale(&mut res, eps * r.random_range(0.05..=1.0));
                    let check = if case == 0 {
                        iterative[r.random_range(0..iterative.len())]
                    } else {
                        last
                    };
                    let thr = if case == 0 { 0.02 / m3 } else { 0.09 / m3 };
                    (check, res, true, thr)
                }
                1 => {
                    let check = iterative[r.random_range(0..iterative.len())];
                    let b = check.b.expect("iterative");
                    if b / 2.0 >= 2.0 * bound {
                        continue;
                    }
                    let s = r.random_range(b / 2.0..=b.min(2.0 * bound));
                    let mut res =
                        random_residual(n, count, |r| r.random_range(0.0..=1.0), |_| true, &mut r);
                    if let Some(first_out) = res.iter().position(|(p, _)| !g.contains(p)) {
                        res.iter_mut().for_each(|(_, c)| *c *= s);
                        res[first_out].1 = s;
                    } else {
                        continue;
                    }
                    if norm_of(&res, |p| !g.contains(p)) < norm_of(&res, |p| g.contains(p)) {
                        continue;
                    }
                    (check, res, false, 0.025 / m3)
                }
                _ => {
                    let target = 2.0 * eps * r.random_range(1.0..1.4);
                    let mut res = random_residual(
                        n,
                        count.max(2),
                        |r| r.random_range(0.2..1.0),
                        |p| !g.contains(p),
                        &mut r,
                    );
                    rescale(&mut res, target);
                    if res.iter().any(|(_, c)| c.abs() > 2.0 * eps) {
                        continue;
                    }
                    (last, res, false, 0.12 / m3)
                }
            };
            let h = with_residual(&h0, &res)?;
            let mut o = EvolutionOracle::new(h)?;
            let p = hss_signal_probability_exact(&g, &h0, &mut o, check.t, check.r)?;
            tally.instances += 1;
            tally.violations += if upper { p > thr } else { p < thr } as usize;
        }
    }
    Ok(out)
}

fn criterion_5() -> Result<Outcome> {
    let mut r = rng(5);
    let bound = 1.0;
    let (mut lit_acc, mut lit_rej, mut half_acc, mut half_rej) = (0, 0, 0, 0);
    for i in 0..200 {
        let accept = i < 100;
        let (eps1, eps2) = if i % 2 == 0 {
            (0.05, 0.15)
        } else {
            (0.1, 0.15)
        };
        let n = 2 + i % 3;
        let m = r.random_range(1..=4usize);
        let norm = if accept {
            eps1 * r.random_range(0.05..=1.0)
        } else {
            eps2 * r.random_range(1.0..1.5)
        };
        let (h0, h) = planted_instance::<f64>(n, m, bound, norm, ResidualSupport::Any, &mut r)?;
        let lit = rchc_plan(&h0, m, bound, eps1, eps2, ThresholdScale::Literal)?;
        let half = rchc_plan(&h0, m, bound, eps1, eps2, ThresholdScale::Halved)?;
        let mut o = EvolutionOracle::new(h)?;
        let budget = ResidualBudget {
            m0: lit.m0,
            b0: lit.b0,
        };
        let p1 = hae_signal_amplitude(&h0, &mut o, lit.t, lit.r, HaeMode::Pauli, budget)?.p1;
        if accept {
            lit_acc += (p1 > lit.b) as usize;
            half_acc += (p1 > half.b) as usize;
        } else {
            lit_rej += (p1 < lit.a) as usize;
            half_rej += (p1 < half.a) as usize;
        }
    }
    let hss = hss_cases()?;
    let hss_bad: usize = hss.iter().map(|c| c.violations).sum();
    let detail = format!(
        "signal amplitude vs cᵢε₁/(m₀^{{3/2}}B₀): {lit_acc}/100 accept and {lit_rej}/100 reject violations; \
         with the ½ carried by t: {half_acc}/100 and {half_rej}/100; stabilizer cases (iter small, iter large, \
         final small, final large) violations {}/{}/{}/{} of 50 each",
        hss[0].violations, hss[1].violations, hss[2].violations, hss[3].violations
    );
    Ok(outcome(lit_acc + lit_rej + hss_bad == 0, detail))
}

struct Rates {
    accept_ok: usize,
    reject_ok: usize,
}

fn end_to_end(method: &str, seed: u64) -> Result<Rates> {
    let mut r = rng(seed);
    let (mut accept_ok, mut reject_ok) = (0, 0);
    let (n, bound, delta) = (3, 1.0, 0.1);
    for i in 0..400 {
        let accept = i % 2 == 0;
        let m = r.random_range(1..=4usize);
        let (lo, hi) = if method == "rchc" {
            (0.05, 0.15)
        } else {
            (0.05, 0.2)
        };
        let norm = if accept {
            lo * r.random_range(0.0..=1.0)
        } else {
            hi * r.random_range(1.0..1.5)
        };
        let (h0, h) = planted_instance::<f64>(n, m, bound, norm, ResidualSupport::Any, &mut r)?;
        let mut o = EvolutionOracle::new(h)?;
        let rep = if method == "rchc" {
            rchc(&h0, &mut o, m, bound, lo, hi, delta, seed + i as u64)?
        } else {
            shc(&h0, &mut o, m, bound, lo, delta, seed + i as u64)?
        };
        match (accept, rep.verdict) {
            (true, Decision::Accept) => accept_ok += 1,
            (false, Decision::Reject) => reject_ok += 1,
            _ => {}
        }
    }
    Ok(Rates {
        accept_ok,
        reject_ok,
    })
}

fn criterion_6() -> Result<Outcome> {
    let start = Instant::now();
    let floor = 1.0 - 0.1 - 0.03;
    let mut pass = true;
    let mut parts = Vec::new();
    for (method, seed) in [("rchc", 600), ("shc", 700)] {
        let rates = end_to_end(method, seed)?;
        let (la, lr) = (
            wilson_lower(rates.accept_ok, 200),
            wilson_lower(rates.reject_ok, 200),
        );
        pass &= la > floor && lr > floor;
        parts.push(format!(
            "{method}: accept {}/200 (lower {la:.3}), reject {}/200 (lower {lr:.3})",
            rates.accept_ok, rates.reject_ok
        ));
    }
    let el = start.elapsed();
    pass &= el < Duration::from_secs(600);
    Ok(outcome(pass, format!("{}; {:.1?}", parts.join("; "), el)))
}

fn criterion_7() -> Result<Outcome> {
    let gap = scaling_experiment(ScalingTarget::Rchc, &[0.2, 0.1, 0.05, 0.025], 2, 7)?;
    let terms = scaling_experiment(ScalingTarget::Shc, &[1.0, 2.0, 4.0, 8.0], 1, 8)?;
    Ok(outcome(
        (gap.slope + 1.0).abs() <= 0.15 && (1.3..=1.7).contains(&terms.slope),
        format!(
            "slope vs ε₂−ε₁ {:.4}, slope vs m {:.4}",
            gap.slope, terms.slope
        ),
    ))
}

fn criterion_8() -> Result<Outcome> {
    let mut r = rng(8);
    let m3 = 2f64.powi(3);
    let mut worst: f64 = 0.0;
    let mut count_ok = true;
    let trials = 2000;
    for (a, b, delta) in [(0.3, 0.1, 0.05), (0.025 / m3, 0.02 / m3, 0.1)] {
        let plan = BernoulliPlan::new(a, b, delta)?;
        let batch = (4.0 / (f64::sqrt(a) - f64::sqrt(b)).powi(2)).ceil() as u64;
        let expected = batch * 36 * 2 * (1.0 / delta).log2().ceil() as u64;
        for (p, want) in [(a, Verdict::Large), (b, Verdict::Small)] {
            let mut fails = 0;
            for _ in 0..trials {
                let v = bernoulli_test(&mut ExactBernoulli { p, rng: &mut r }, a, b, delta)?;
                fails += (v.label != want) as usize;
                count_ok &= v.samples_used == expected && plan.samples() == expected;
            }
            worst = worst.max(fails as f64 / trials as f64 / delta);
        }
        for (sqrt_p, want) in [(a, Verdict::Large), (b, Verdict::Small)] {
            let mut fails = 0;
            for _ in 0..trials {
                let mut led = QueryCounter::default();
                let v = amp_test(
                    sqrt_p * sqrt_p,
                    a,
                    b,
                    delta,
                    &mut led,
                    &mut r,
                    &AmpEstConfig::default(),
                )?;
                fails += (v.label != want) as usize;
                count_ok &= v.queries_used == led.queries && v.samples_used == led.measurements;
            }
            worst = worst.max(fails as f64 / trials as f64 / delta);
        }
    }
    Ok(outcome(
        worst <= 1.0 && count_ok,
        format!("{trials} trials per case, worst failure rate {worst:.3}·δ, sample counts exact: {count_ok}"),
    ))
}

fn criterion_9() -> Result<Outcome> {
    let mut r = rng(9);
    let mut single_bad = 0;
    for _ in 0..200 {
        let n = r.random_range(1..=2);
        let ancillas = r.random_range(0..=1);
        let depth = r.random_range(0..=3);
        let e = random_experiment(n, ancillas, depth, r.random_range(2..=4), &mut r)?;
        let m = r.random_range(1..=3);
        let h1 = random_hamiltonian_with::<f64>(n, m, 1.0, &mut r)?;
        let h2 =
            random_hamiltonian_with::<f64>(n, m, 1.0, &mut r)?.scaled(r.random_range(0.0..0.2));
        let h2 = h1
            .plus(&h2)
            .or_else(|_| Ok::<_, hamcert::Error>(h1.clone()))?;
        single_bad += !tv_bound_check(&e, &h1, &h2)?.holds as usize;
    }
    let mut tree_bad = 0;
    for i in 0..60 {
        let n = r.random_range(1..=2);
        let levels = if i < 50 { 2 } else { 3 };
        let tree = random_tree(n, 0, levels, 2, r.random_range(2..=4), &mut r)?;
        let h1 = random_hamiltonian_with::<f64>(n, 2, 1.0, &mut r)?;
        let h2 = h1.scaled(1.0 + r.random_range(-0.1..0.1));
        tree_bad += !tree_tv_bound_check(&tree, &h1, &h2)?.holds as usize;
    }
    let mut dist_err: f64 = 0.0;
    for (p, m, n) in [
        (2.0, 1, 1),
        (1.0, 4, 2),
        (1.5, 5, 2),
        (f64::INFINITY, 3, 1),
        (3.0, 7, 3),
    ] {
        let (e1, e2) = (0.1, 0.35);
        let (h1, h2) = hypothesis_instances(p, m, e1, e2, n)?;
        let d = hamcert::hamiltonian::residual(&h2, &h1)?
            .to_dense()?
            .operator_norm();
        dist_err = dist_err.max((d - (e2 - e1) * (m as f64).powf(0.5 - 1.0 / p)).abs());
    }
    Ok(outcome(
        single_bad + tree_bad == 0 && dist_err < TOL,
        format!(
            "200 single experiments {single_bad} violations, 50 two-level + 10 three-level trees {tree_bad} violations, \
             hypothesis distance max error {dist_err:.2e}"
        ),
    ))
}

/// Forwards every call to an inner oracle; certifiers see only the access trait.
struct Relay<O>(O);

impl<O: EvolutionAccess<f64>> EvolutionAccess<f64> for Relay<O> {
    fn n(&self) -> usize {
        self.0.n()
    }
    fn evolve_repeated(
        &mut self,
        t: f64,
        controlled: bool,
        count: u64,
    ) -> Result<DenseOperator<f64>> {
        self.0.evolve_repeated(t, controlled, count)
    }
    fn record_measurements(&mut self, count: u64) {
        self.0.record_measurements(count)
    }
    fn ledger(&self) -> &TimeLedger<f64> {
        self.0.ledger()
    }
}

fn report_pair(seed: u64, relay: bool) -> Result<(CertificationReport, CertificationReport)> {
    let mut r = rng(100);
    let (h0, h) = planted_instance::<f64>(2, 3, 1.0, 0.3, ResidualSupport::Any, &mut r)?;
    let mut o1 = EvolutionOracle::new(h.clone())?;
    let mut o2 = EvolutionOracle::new(h)?;
    if relay {
        Ok((
            rchc(&h0, &mut Relay(o1), 3, 1.0, 0.05, 0.15, 0.1, seed)?,
            shc(&h0, &mut Relay(o2), 3, 1.0, 0.05, 0.1, seed)?,
        ))
    } else {
        Ok((
            rchc(&h0, &mut o1, 3, 1.0, 0.05, 0.15, 0.1, seed)?,
            shc(&h0, &mut o2, 3, 1.0, 0.05, 0.1, seed)?,
        ))
    }
}

fn criterion_10() -> Result<Outcome> {
    let (a1, b1) = report_pair(42, false)?;
    let (a2, b2) = report_pair(42, false)?;
    let (a3, b3) = report_pair(42, true)?;
    let same = a1.to_json()? == a2.to_json()? && b1.to_json()? == b2.to_json()?;
    let relayed = a1.to_json()? == a3.to_json()? && b1.to_json()? == b3.to_json()?;
    let source = include_str!("../src/evolution.rs");
    let oracle_impl = source
        .split("impl<T: Real> EvolutionOracle<T> {")
        .nth(1)
        .and_then(|s| s.split("\n}\n").next());
    let public: Vec<&str> = oracle_impl
        .map(|s| {
            s.lines()
                .filter_map(|l| l.trim().strip_prefix("pub fn "))
                .map(|l| l.split('(').next().unwrap_or(""))
                .collect()
        })
        .unwrap_or_default();
    let no_accessor = public == ["new", "from_file", "with_max_duration"];
    let certifier_sources = [
        include_str!("../src/certify.rs"),
        include_str!("../src/sampling.rs"),
        include_str!("../src/amplitude.rs"),
    ];
    let library_parts = certifier_sources
        .iter()
        .map(|s| s.split("#[cfg(test)]").next().unwrap_or(s));
    let trait_only = library_parts
        .clone()
        .all(|s| !s.contains("EvolutionOracle") && !s.contains("sealed"));
    Ok(outcome(
        same && relayed && no_accessor && trait_only,
        format!(
            "byte-identical reports: {same}; relayed oracle identical: {relayed}; oracle public API {public:?}; \
             certifier code trait-only: {trait_only}"
        ),
    ))
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("Pauli and stabilizer algebra exactness", criterion_1),
        ("Trotter error bound and order-2 convergence", criterion_2),
        (
            "Pauli coefficient bounds and Taylor partitions",
            criterion_3,
        ),
        (
            "Bell dispersion and stabilizer sampling exactness",
            criterion_4,
        ),
        ("signal gaps", criterion_5),
        ("end-to-end certifier correctness", criterion_6),
        ("evolution-time scaling", criterion_7),
        ("Bernoulli and amplitude test contracts", criterion_8),
        ("total-variation lower-bound inequalities", criterion_9),
        ("determinism and oracle barrier", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += !pass as usize;
        println!(
            "{} criterion {}: {name} ({detail}) [{:.1?}]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
