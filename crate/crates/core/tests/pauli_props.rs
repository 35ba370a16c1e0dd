mod common;

use hamcert::dense::{random_unitary, DenseOperator};
use hamcert::pauli::{
    anticommuting_chain, pauli_decompose, pauli_multiply, symplectic_product, PauliString,
};
use hamcert::stabilizer::{syndrome, unique_decompose, GroupKind, MaximalStabilizerGroup};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{letter_dense, max_entry_diff};

fn pauli(n: usize) -> impl Strategy<Value = PauliString> {
    (0..1u64 << (2 * n)).prop_map(move |i| PauliString::from_index(n, i))
}

fn pair() -> impl Strategy<Value = (PauliString, PauliString)> {
    (1usize..=3).prop_flat_map(|n| (pauli(n), pauli(n)))
}

fn group(n: usize, x: bool) -> MaximalStabilizerGroup {
    if x {
        GroupKind::AllX.group(n)
    } else {
        GroupKind::AllZ.group(n)
    }
}

proptest! {
    #[test]
    fn symplectic_is_symmetric((a, b) in pair()) {
        prop_assert_eq!(symplectic_product(&a, &b).unwrap(), symplectic_product(&b, &a).unwrap());
    }

    #[test]
    fn product_body_is_xor((a, b) in pair()) {
        let prod = pauli_multiply(&a, &b).unwrap();
        prop_assert_eq!(prod.body, a.xor(&b));
        let swapped = pauli_multiply(&b, &a).unwrap();
        let expected = (prod.phase_exp + 2 * symplectic_product(&a, &b).unwrap()) & 3;
        prop_assert_eq!(swapped.phase_exp, expected);
    }

    #[test]
    fn text_round_trip(a in (1usize..=5).prop_flat_map(pauli)) {
        let text = a.to_string();
        prop_assert_eq!(text.parse::<PauliString>().unwrap(), a);
        prop_assert_eq!(text.chars().filter(|c| *c != 'I').count() as u32, a.weight());
    }

    #[test]
    fn dense_matches_letters(a in (1usize..=3).prop_flat_map(pauli)) {
        let d = a.to_dense::<f64>().unwrap();
        prop_assert!(max_entry_diff(d.matrix(), &letter_dense(&a)) < 1e-14);
    }

    #[test]
    fn syndrome_is_linear((a, b) in pair(), x in any::<bool>()) {
        let g = group(a.n(), x);
        let sa = syndrome(&g, &a).unwrap();
        let sb = syndrome(&g, &b).unwrap();
        prop_assert_eq!(syndrome(&g, &a.xor(&b)).unwrap(), sa.xor(&sb));
    }

    #[test]
    fn decomposition_recomposes((a, _) in pair(), x in any::<bool>()) {
        let g = group(a.n(), x);
        let (k, beta, gamma) = unique_decompose(&g, &a).unwrap();
        prop_assert!(g.contains(&gamma));
        let prod = pauli_multiply(&beta, &gamma).unwrap();
        prop_assert_eq!(prod.body, a);
        prop_assert_eq!((prod.phase_exp + k) & 3, 0);
    }

    #[test]
    fn decompose_round_trip(seed in any::<u64>(), n in 1usize..=3) {
        let u: DenseOperator<f64> = random_unitary(n, &mut ChaCha8Rng::seed_from_u64(seed));
        let v = pauli_decompose(&u).unwrap();
        prop_assert!(v.to_dense().unwrap().sub(&u).unwrap().max_abs() < 1e-12);
        prop_assert!((v.norm_sqr() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn chain_pairwise_anticommutes() {
    for n in 1..=5 {
        let chain = anticommuting_chain(n);
        assert_eq!(chain.len(), 2 * n + 1);
        for (i, a) in chain.iter().enumerate() {
            for b in &chain[i + 1..] {
                assert_eq!(symplectic_product(a, b).unwrap(), 1, "{a} {b}");
            }
        }
    }
}

#[test]
fn group_elements_commute() {
    for n in 1..=3 {
        for g in [GroupKind::AllZ.group(n), GroupKind::AllX.group(n)] {
            let el = g.elements();
            assert_eq!(el.len(), 1 << n);
            for a in &el {
                for b in &el {
                    assert_eq!(symplectic_product(a, b).unwrap(), 0);
                }
            }
        }
    }
}

#[test]
fn invalid_group_rejected() {
    let gens = vec!["XI".parse().unwrap(), "ZI".parse().unwrap()];
    assert!(MaximalStabilizerGroup::new(gens).is_err());
    let gens = vec!["ZI".parse().unwrap(), "ZI".parse().unwrap()];
    assert!(MaximalStabilizerGroup::new(gens).is_err());
}
