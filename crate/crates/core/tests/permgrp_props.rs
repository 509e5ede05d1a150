use std::collections::HashSet;

use cycpres_core::permgrp::{embed_in_alternating, GroupTable};
use cycpres_core::{PermGroup, Permutation};
use num_bigint::BigUint;
use proptest::prelude::*;

fn permutation(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::new(v).unwrap())
}

/// Closure under right multiplication by generators, as a plain set.
fn closure(degree: usize, gens: &[Permutation]) -> HashSet<Permutation> {
    let mut seen = HashSet::from([Permutation::identity(degree)]);
    let mut frontier = vec![Permutation::identity(degree)];
    while let Some(p) = frontier.pop() {
        for g in gens {
            let q = p.compose(g);
            if seen.insert(q.clone()) {
                frontier.push(q);
            }
        }
    }
    seen
}

proptest! {
    #[test]
    fn sifting_agrees_with_enumeration(gens in prop::collection::vec(permutation(6), 0..3), probe in permutation(6)) {
        let group = PermGroup::new(6, gens.clone()).unwrap();
        let elements = closure(6, &gens);
        prop_assert_eq!(group.order(), BigUint::from(elements.len()));
        prop_assert_eq!(group.contains(&probe).unwrap(), elements.contains(&probe));
    }

    #[test]
    fn composition_is_associative_with_inverse(a in permutation(7), b in permutation(7), c in permutation(7)) {
        prop_assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
        prop_assert!(a.compose(&a.inverse()).is_identity());
        prop_assert_eq!(a.pow(a.order() as i64), Permutation::identity(7));
    }

    #[test]
    fn cycle_notation_round_trips(a in permutation(8)) {
        prop_assert_eq!(Permutation::parse_cycles(8, &a.to_string()).unwrap(), a);
    }
}

fn fixtures() -> Vec<(String, GroupTable)> {
    let mut out: Vec<(String, GroupTable)> = (1..=24)
        .map(|n| (format!("C{n}"), GroupTable::cyclic(n).unwrap()))
        .collect();
    for n in 3..=12 {
        out.push((
            format!("D{n}"),
            GroupTable::from_perm_group(&PermGroup::dihedral(n).unwrap()),
        ));
    }
    out.push((
        "S3".into(),
        GroupTable::from_perm_group(&PermGroup::symmetric(3)),
    ));
    out.push((
        "A4".into(),
        GroupTable::from_perm_group(&PermGroup::alternating(4)),
    ));
    out.push((
        "S4".into(),
        GroupTable::from_perm_group(&PermGroup::symmetric(4)),
    ));
    out.push(("Q8".into(), GroupTable::quaternion()));
    out
}

#[test]
fn embeddings_are_injective_even_homomorphisms() {
    for (name, g) in fixtures() {
        let e = embed_in_alternating(&g);
        let n = g.order();
        assert!(
            e.images.iter().all(Permutation::is_even),
            "{name}: odd image"
        );
        assert_eq!(
            e.images.iter().collect::<HashSet<_>>().len(),
            n,
            "{name}: not injective"
        );
        for a in 0..n {
            for b in 0..n {
                assert_eq!(
                    e.images[a].compose(&e.images[b]),
                    e.images[g.mul(a, b)],
                    "{name}: not a homomorphism"
                );
            }
        }
    }
}
