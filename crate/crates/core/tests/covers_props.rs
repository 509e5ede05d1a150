use cycpres_core::covers::{free_surjection, simple_quotient_schedule, SemidirectOverZ};
use cycpres_core::homsearch::{enumerate_homs, evaluate};
use cycpres_core::{CyclicWordFamily, Naming, PermGroup, Presentation, Word};

fn family(text: &str) -> CyclicWordFamily {
    let naming = Naming::infer(&[text], false).unwrap();
    CyclicWordFamily::from_word(&naming.parse(text).unwrap(), None).unwrap()
}

const FBC_WORDS: [&str; 4] = [
    "x3 x0^-1",
    "x0 x1 x2^-1",
    "x0 x1^2 x2 x1^-1 x3^-1",
    "x1 x0^-1",
];

#[test]
fn periods_are_minimal() {
    let targets = [
        PermGroup::symmetric(3),
        PermGroup::cyclic(4).unwrap(),
        PermGroup::dihedral(4).unwrap(),
    ];
    for w in FBC_WORDS {
        let fbc = family(w).fiber_automorphism().unwrap();
        let g = SemidirectOverZ::from_fiber(&fbc).unwrap();
        for t in &targets {
            let free = Presentation::free("y", fbc.rank).unwrap();
            for phi in enumerate_homs(&free, t, 10_000_000)
                .unwrap()
                .into_iter()
                .filter(|h| h.is_surjective())
                .step_by(7)
                .take(12)
            {
                let period = g.cover_degree_for_target(&phi).unwrap();
                // Apply α^j as a word map, then evaluate under φ.
                let mut images: Vec<Word> = (0..fbc.rank)
                    .map(|i| Word::generator(fbc.rank, i).unwrap())
                    .collect();
                for j in 1..=period {
                    images = images.iter().map(|w| fbc.alpha.apply(w).unwrap()).collect();
                    let composed: Vec<_> =
                        images.iter().map(|w| evaluate(w, phi.images())).collect();
                    assert_eq!(
                        composed == phi.images(),
                        j == period,
                        "{w} into {}: j = {j}",
                        t.name()
                    );
                }
            }
        }
    }
}

#[test]
fn schedules_use_common_multiples_and_verify() {
    let targets = [
        PermGroup::alternating(5),
        PermGroup::symmetric(3),
        PermGroup::cyclic(2).unwrap(),
    ];
    for w in ["x3 x0^-1", "x0 x1 x2^-1", "x0 x1^2 x2 x1^-1 x3^-1"] {
        let fam = family(w);
        let fbc = fam.fiber_automorphism().unwrap();
        let schedule = simple_quotient_schedule(&fam, &fbc, &targets, 100_000_000).unwrap();
        assert!(schedule.n >= fam.d() as u64);
        for (s, t) in schedule.surjections.iter().zip(&targets) {
            assert_eq!(schedule.n % s.period, 0);
            assert_eq!(schedule.lcm % s.period, 0);
            s.verify(&fam, &fbc, t).unwrap();
        }
        for k in 1..=2 {
            let n = schedule.member(k);
            for (s, t) in schedule
                .lift_at(&fam, &fbc, &targets, n)
                .unwrap()
                .iter()
                .zip(&targets)
            {
                s.verify(&fam, &fbc, t).unwrap();
            }
        }
    }
}

#[test]
fn lift_images_factor_through_period() {
    let fam = family("x0 x1^2 x2 x1^-1 x3^-1");
    let fbc = fam.fiber_automorphism().unwrap();
    let g = SemidirectOverZ::from_fiber(&fbc).unwrap();
    let t = PermGroup::alternating(5);
    let phi = free_surjection(fbc.rank, &t, 100_000_000).unwrap();
    let period = g.cover_degree_for_target(&phi).unwrap() as usize;
    let orbit = g.precomposition_orbit(phi.images(), 3 * period);
    for i in 0..2 * period {
        assert_eq!(orbit[i], orbit[i + period]);
    }
}
