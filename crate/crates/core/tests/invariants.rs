use std::collections::BTreeMap;
use std::sync::OnceLock;

use hyperbolic_vinberg::coxeter::{
    classify_subdiagram, diagram_automorphism_order, CoxeterDiagram, SubdiagramAnalysis, SubdiagramKind,
};
use hyperbolic_vinberg::covolume::orbifold_euler_characteristic;
use hyperbolic_vinberg::forms::{
    candidate_root_norms, conjugate_signature_pair, discriminant_exponent, signature, QuadRingElement, QuadRingForm,
    QuadraticForm,
};
use hyperbolic_vinberg::roots::{default_controlling_vector, reflect, run_vinberg, VinbergLimits, VinbergState};
use hyperbolic_vinberg::table::component_form;
use hyperbolic_vinberg::{BigInt, BigRational};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn states() -> &'static [VinbergState] {
    static STATES: OnceLock<Vec<VinbergState>> = OnceLock::new();
    STATES.get_or_init(|| {
        (0..5)
            .map(|j| {
                let form = component_form(j).unwrap();
                let v0 = default_controlling_vector(&form).unwrap();
                run_vinberg(&form, &v0, &VinbergLimits::default()).unwrap()
            })
            .collect()
    })
}

fn diagrams() -> &'static [CoxeterDiagram] {
    static DIAGRAMS: OnceLock<Vec<CoxeterDiagram>> = OnceLock::new();
    DIAGRAMS.get_or_init(|| states().iter().map(|s| s.diagram().unwrap()).collect())
}

fn ints(xs: &[i64]) -> Vec<BigInt> {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}

/// Product of elementary matrices described by `(kind, i, j, c)`.
fn unimodular(n: usize, ops: &[(u8, usize, usize, i64)]) -> Vec<Vec<BigInt>> {
    let mut u: Vec<Vec<BigInt>> = (0..n).map(|i| (0..n).map(|j| BigInt::from(u8::from(i == j))).collect()).collect();
    for &(kind, i, j, c) in ops {
        let (i, j) = (i % n, j % n);
        match kind % 3 {
            0 if i != j => {
                for row in u.iter_mut() {
                    let add = &row[j] * c;
                    row[i] += add;
                }
            }
            1 => u.iter_mut().for_each(|row| row.swap(i, j)),
            _ => u.iter_mut().for_each(|row| row[i] = -&row[i]),
        }
    }
    u
}

fn rank(rows: &[Vec<BigInt>]) -> usize {
    let mut m: Vec<Vec<BigRational>> =
        rows.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let pivot = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = &row[c] / &pivot[c];
                for (x, p) in row.iter_mut().zip(&pivot) {
                    *x -= &f * p;
                }
            }
        }
        r += 1;
    }
    r
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

fn ops() -> impl Strategy<Value = Vec<(u8, usize, usize, i64)>> {
    proptest::collection::vec((0u8..3, 0usize..5, 0usize..5, -4i64..=4), 0..20)
}

fn nonzero_diagonal(len: usize) -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::vec(prop_oneof![-12i64..=-1, 1i64..=12], len)
}

proptest! {
    #[test]
    fn signature_is_a_congruence_invariant(j in 0usize..5, ops in ops()) {
        let form = component_form(j).unwrap();
        let moved = form.transform(&unimodular(5, &ops)).unwrap();
        prop_assert_eq!(signature(moved.gram()).unwrap(), form.signature());
    }

    #[test]
    fn signature_counts_every_dimension(diag in nonzero_diagonal(5), ops in ops()) {
        let form = QuadraticForm::diagonal(&diag).unwrap().transform(&unimodular(5, &ops)).unwrap();
        let sig = form.signature();
        prop_assert_eq!(sig.positive + sig.negative, 5);
        prop_assert_eq!(sig.negative, diag.iter().filter(|&&d| d < 0).count());
    }

    #[test]
    fn candidate_norms_divide_twice_the_exponent(diag in nonzero_diagonal(4), ops in ops()) {
        let form = QuadraticForm::diagonal(&diag).unwrap().transform(&unimodular(4, &ops)).unwrap();
        let two_e = discriminant_exponent(&form) * BigInt::from(2);
        let norms = candidate_root_norms(&form);
        prop_assert!(norms.contains(&two_e));
        for k in norms {
            prop_assert!(k.is_positive() && (&two_e % &k).is_zero());
        }
    }

    #[test]
    fn conjugating_swaps_the_signature_pair(entries in proptest::collection::vec((-5i64..=5, -5i64..=5), 5)) {
        prop_assume!(entries.iter().all(|&(a, b)| a != 0 || b != 0));
        let form = QuadRingForm::diagonal(entries.iter().map(|&(a, b)| QuadRingElement::new(a, b)).collect()).unwrap();
        let (p, m) = conjugate_signature_pair(&form);
        prop_assert_eq!(conjugate_signature_pair(&form.conjugate()), (m, p));
        prop_assert_eq!(form.conjugate().conjugate(), form);
    }

    #[test]
    fn reflections_preserve_the_form(j in 0usize..5, idx in 0usize..8, x in proptest::collection::vec(-500i64..=500, 5)) {
        let state = &states()[j];
        let root = &state.accepted[idx % state.accepted.len()].root;
        let x = ints(&x);
        let y = reflect(&state.form, root, &x);
        prop_assert_eq!(state.form.norm(&y), state.form.norm(&x));
        prop_assert_eq!(reflect(&state.form, root, &y), x);
    }
}

#[test]
fn accepted_roots_are_admissible() {
    for state in states() {
        let norms = candidate_root_norms(&state.form);
        let vectors: Vec<Vec<BigInt>> = state.accepted.iter().map(|a| a.root.vector.clone()).collect();
        for (i, a) in state.accepted.iter().enumerate() {
            assert!(norms.contains(&a.root.norm), "{}", a.root);
            assert!(!a.inner_with_v0.is_positive());
            for b in &state.accepted[i + 1..] {
                assert!(!state.form.inner(&a.root.vector, &b.root.vector).is_positive());
            }
        }
        assert_eq!(rank(&vectors), 5);
        assert!(state.complete);
    }
}

#[test]
fn reruns_are_identical() {
    let again: Vec<VinbergState> = (0..5)
        .map(|j| {
            let form = component_form(j).unwrap();
            run_vinberg(&form, &default_controlling_vector(&form).unwrap(), &VinbergLimits::default()).unwrap()
        })
        .collect();
    assert_eq!(again.as_slice(), states());
}

#[test]
fn labels_rebuild_from_g2() {
    for d in diagrams() {
        let g2 = d.g2_table().expect("crystallographic diagrams carry g^2");
        let rebuilt = CoxeterDiagram::from_g2_table(d.norms().to_vec(), &g2).unwrap();
        assert_eq!(&rebuilt, d);
    }
}

#[test]
fn elliptic_subdiagrams_are_hereditary() {
    for d in diagrams() {
        for e in SubdiagramAnalysis::new(d).elliptic_subsets() {
            let nodes: Vec<usize> = (0..d.len()).filter(|&i| e.mask >> i & 1 == 1).collect();
            for sub in 0u32..(1 << nodes.len()) {
                let subset: Vec<usize> =
                    nodes.iter().enumerate().filter(|(b, _)| sub >> b & 1 == 1).map(|(_, &i)| i).collect();
                assert_eq!(classify_subdiagram(d, &subset).kind, SubdiagramKind::Elliptic, "{subset:?}");
            }
        }
    }
}

#[test]
fn automorphism_orders_are_bounded() {
    for d in diagrams() {
        let order = diagram_automorphism_order(d);
        let mut classes: BTreeMap<&BigInt, usize> = BTreeMap::new();
        for k in d.norms() {
            *classes.entry(k).or_default() += 1;
        }
        let bound: u64 = classes.values().map(|&c| factorial(c)).product();
        assert_eq!(bound % order, 0);
        assert!(order == 1 || order == 2);
    }
}

#[test]
fn four_dimensional_euler_characteristics_are_positive() {
    for d in diagrams() {
        assert!(orbifold_euler_characteristic(d) > BigRational::zero());
    }
    let total: BigRational = diagrams()
        .iter()
        .map(|d| orbifold_euler_characteristic(d) / BigRational::from_integer(diagram_automorphism_order(d).into()))
        .fold(BigRational::zero(), |s, x| s + x);
    assert_eq!(total, BigRational::new(37.into(), 1440.into()));
}
