use cycpres_core::homsearch::{enumerate_homs, evaluate, find_surjection, quotient_scan};
use cycpres_core::present::h_n_presentation;
use cycpres_core::{CyclicWordFamily, Naming, PermGroup, Permutation, Presentation};

fn family(text: &str) -> CyclicWordFamily {
    let naming = Naming::infer(&[text], false).unwrap();
    CyclicWordFamily::from_word(&naming.parse(text).unwrap(), None).unwrap()
}

fn targets() -> Vec<PermGroup> {
    ["A5", "S4", "D4", "C6"]
        .iter()
        .map(|n| PermGroup::from_name(n).unwrap())
        .collect()
}

/// Product of images letter by letter, without the run-power shortcut.
fn evaluate_by_letters(p: &Presentation, images: &[Permutation], r: usize) -> Permutation {
    let degree = images[0].degree();
    p.relators()[r]
        .letters()
        .fold(Permutation::identity(degree), |acc, (g, e)| {
            let x = &images[g.index()];
            acc.compose(&if e > 0 { x.clone() } else { x.inverse() })
        })
}

#[test]
fn emitted_homomorphisms_reverify() {
    let words = ["x1 x0 x1^-1 x0^-2", "x3 x0^-1", "x0^2 x1^-3", "x0 x1 x2^-1"];
    for w in words {
        let wt = family(w).v_to_w();
        for n in 2..=4 {
            let p = h_n_presentation(&wt, n).unwrap();
            for t in [
                PermGroup::symmetric(3),
                PermGroup::cyclic(4).unwrap(),
                PermGroup::dihedral(4).unwrap(),
            ] {
                for hom in enumerate_homs(&p, &t, 10_000_000).unwrap() {
                    for r in 0..p.relators().len() {
                        assert!(evaluate_by_letters(&p, hom.images(), r).is_identity());
                        assert!(evaluate(&p.relators()[r], hom.images()).is_identity());
                    }
                }
            }
        }
    }
}

#[test]
fn enumeration_matches_brute_force_count() {
    let p = h_n_presentation(&family("x0^2 x1^-3").v_to_w(), 3).unwrap();
    let s3 = PermGroup::symmetric(3);
    let elements = s3.elements();
    let mut brute = 0;
    for a in &elements {
        for b in &elements {
            let images = [a.clone(), b.clone()];
            if (0..p.relators().len()).all(|r| evaluate_by_letters(&p, &images, r).is_identity()) {
                brute += 1;
            }
        }
    }
    assert_eq!(enumerate_homs(&p, &s3, 1_000_000).unwrap().len(), brute);
}

#[test]
fn free_group_onto_a5_surjections() {
    let f2 = Presentation::free("x", 2).unwrap();
    let a5 = PermGroup::alternating(5);
    let report = quotient_scan(&f2, &a5, 1_000_000).unwrap();
    assert_eq!(report.hom_count, 3600);
    // |Epi(F_2, A_5)| = 19 · |Aut(A_5)| = 19 · 120.
    assert_eq!(report.surjection_count, 2280);
}

#[test]
fn baumslag_gersten_quotients_are_cyclic_with_trivial_x() {
    let w = family("x1 x0 x1^-1 x0^-2").v_to_w();
    for n in 1..=6 {
        let p = h_n_presentation(&w, n).unwrap();
        for t in targets() {
            for hom in enumerate_homs(&p, &t, 100_000_000).unwrap() {
                assert!(
                    hom.images()[0].is_identity(),
                    "n = {n}, {}: x survives",
                    t.name()
                );
                assert!(hom.image_group().is_cyclic());
            }
        }
    }
}

#[test]
fn homomorphisms_lift_along_divisibility() {
    let words = ["x3 x0^-1", "x0^2 x1^-3", "x1 x0 x1^-1 x0^-2"];
    let small = [
        PermGroup::symmetric(3),
        PermGroup::cyclic(6).unwrap(),
        PermGroup::dihedral(4).unwrap(),
    ];
    for w in words {
        let wt = family(w).v_to_w();
        for (n, m) in [(2, 4), (3, 6)] {
            let pn = h_n_presentation(&wt, n).unwrap();
            let pm = h_n_presentation(&wt, m).unwrap();
            for t in &small {
                let low = enumerate_homs(&pn, t, 10_000_000).unwrap();
                let high = enumerate_homs(&pm, t, 10_000_000).unwrap();
                for h in &low {
                    assert!(high.iter().any(|g| g.images() == h.images()));
                }
                let surj = |hs: &[cycpres_core::Homomorphism]| {
                    hs.iter().filter(|h| h.is_surjective()).count()
                };
                assert!(surj(&high) >= surj(&low));
            }
        }
    }
}

#[test]
fn first_surjection_is_canonically_least() {
    let p = h_n_presentation(&family("x3 x0^-1").v_to_w(), 3).unwrap();
    let s3 = PermGroup::symmetric(3);
    let first = find_surjection(&p, &s3, 1_000_000).unwrap().unwrap();
    let all: Vec<_> = enumerate_homs(&p, &s3, 1_000_000)
        .unwrap()
        .into_iter()
        .filter(|h| h.is_surjective())
        .collect();
    assert_eq!(first.images(), all[0].images());
}
