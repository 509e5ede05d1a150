//! Semidirect products `F_r ⋊_α Z`, their cyclic covers, and explicit
//! surjections from cyclically presented groups onto finite groups.
//!
//! A surjection `φ: F_r ↠ T` has a period: the least `p > 0` with
//! `φ∘α^p = φ`. It exists because precomposition with the automorphism `α`
//! permutes the finite set `Hom(F_r, T)`. For every multiple `n ≥ d` of the
//! period, `x_i ↦ φ(α^i(y_0))` defines a surjection `G_n(v) ↠ T`.

use std::ops::ControlFlow;

use num_bigint::BigUint;
use num_integer::Integer;
use serde::Serialize;

use crate::homsearch::{self, evaluate, Homomorphism};
use crate::permgrp::{PermGroup, Permutation};
use crate::present::{CyclicWordFamily, FreeByCyclicData, Presentation};
use crate::words::{Endomorphism, Naming, Word};
use crate::{Error, Result};

/// Default bound on the number of precomposition steps when computing a period.
pub const DEFAULT_PERIOD_BOUND: u64 = 1_000_000;

/// Longest fiber word expanded when re-checking `φ(α^{i+n}(y_0)) = φ(α^i(y_0))`.
const EXPANSION_LIMIT: u64 = 1 << 16;

/// `F_r ⋊_α Z` with `t y_i t⁻¹ = α(y_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemidirectOverZ {
    alpha: Endomorphism,
    alpha_inverse: Endomorphism,
}

impl SemidirectOverZ {
    /// Checks that the two maps are mutually inverse.
    pub fn new(alpha: Endomorphism, alpha_inverse: Endomorphism) -> Result<SemidirectOverZ> {
        if alpha.rank() != alpha_inverse.rank() {
            return Err(Error::RankMismatch {
                expected: alpha.rank(),
                found: alpha_inverse.rank(),
            });
        }
        if !alpha.compose(&alpha_inverse)?.is_identity()
            || !alpha_inverse.compose(&alpha)?.is_identity()
        {
            return Err(Error::Verification(
                "the given maps are not mutually inverse".into(),
            ));
        }
        Ok(SemidirectOverZ {
            alpha,
            alpha_inverse,
        })
    }

    pub fn from_fiber(fbc: &FreeByCyclicData) -> Result<SemidirectOverZ> {
        SemidirectOverZ::new(fbc.alpha.clone(), fbc.alpha_inverse.clone())
    }

    pub fn rank(&self) -> usize {
        self.alpha.rank()
    }

    pub fn alpha(&self) -> &Endomorphism {
        &self.alpha
    }

    pub fn alpha_inverse(&self) -> &Endomorphism {
        &self.alpha_inverse
    }

    fn naming(&self, stable: &str) -> Result<Naming> {
        let mut names: Vec<String> = (0..self.rank()).map(|i| format!("y{i}")).collect();
        names.push(stable.to_string());
        Naming::new(names)
    }

    fn conjugation_presentation(
        &self,
        automorphism: &Endomorphism,
        stable: &str,
    ) -> Result<Presentation> {
        let r = self.rank();
        let s = Word::generator(r + 1, r)?;
        let relators = (0..r)
            .map(|i| {
                let y = Word::generator(r + 1, i)?;
                let image = automorphism.image(i).with_rank(r + 1)?;
                Ok(y.conjugate_by(&s).mul(&image.inverse()))
            })
            .collect::<Result<Vec<_>>>()?;
        Presentation::new(self.naming(stable)?, relators)
    }

    /// `⟨y_0, …, y_{r-1}, t | t y_i t⁻¹ = α(y_i)⟩`.
    pub fn presentation(&self) -> Result<Presentation> {
        self.conjugation_presentation(&self.alpha, "t")
    }

    /// The exponent sum of `t` in a word over `y_0, …, y_{r-1}, t`.
    pub fn chi(&self, word: &Word) -> Result<i64> {
        if word.rank() != self.rank() + 1 {
            return Err(Error::RankMismatch {
                expected: self.rank() + 1,
                found: word.rank(),
            });
        }
        Ok(word.exponent_sum(self.rank()))
    }

    /// The index-`n` cover `⟨F_r, s⟩` with `s = tⁿ`, so `s y_i s⁻¹ = αⁿ(y_i)`.
    pub fn cover_presentation(&self, n: u64) -> Result<Presentation> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "cover degree must be at least 1".into(),
            ));
        }
        self.conjugation_presentation(&self.alpha.pow(n), "s")
    }

    /// One precomposition step: `ψ ↦ ψ∘α` on generator-image lists.
    pub fn precompose(&self, images: &[Permutation]) -> Vec<Permutation> {
        self.alpha
            .images()
            .iter()
            .map(|w| evaluate(w, images))
            .collect()
    }

    /// The least `p > 0` with `φ∘α^p = φ`, found by iterating precomposition.
    pub fn period_of_images(&self, phi: &[Permutation], bound: u64) -> Result<u64> {
        if phi.len() != self.rank() {
            return Err(Error::ArityMismatch {
                expected: self.rank(),
                found: phi.len(),
            });
        }
        let mut current = self.precompose(phi);
        let mut steps = 1;
        while current.as_slice() != phi {
            if steps >= bound {
                return Err(Error::BoundExceeded {
                    bound,
                    context: "period of φ under precomposition by α".into(),
                });
            }
            current = self.precompose(&current);
            steps += 1;
        }
        Ok(steps)
    }

    /// The period of a surjection `φ: F_r ↠ T`; every multiple also works.
    pub fn cover_degree_for_target(&self, phi: &Homomorphism) -> Result<u64> {
        if phi.images().len() != self.rank() {
            return Err(Error::ArityMismatch {
                expected: self.rank(),
                found: phi.images().len(),
            });
        }
        if !phi.is_surjective() {
            return Err(Error::NotSurjective(format!(
                "φ does not generate {}",
                phi.target().name()
            )));
        }
        self.period_of_images(phi.images(), DEFAULT_PERIOD_BOUND)
    }

    /// `φ∘α^i` for `i = 0, …, count - 1`.
    pub fn precomposition_orbit(&self, phi: &[Permutation], count: usize) -> Vec<Vec<Permutation>> {
        let mut out = Vec::with_capacity(count);
        let mut current = phi.to_vec();
        for _ in 0..count {
            let next = self.precompose(&current);
            out.push(std::mem::replace(&mut current, next));
        }
        out
    }
}

/// A verified surjection `G_n(v) ↠ T` built from `φ: F_r ↠ T`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverSurjection {
    pub n: u64,
    pub period: u64,
    /// The common degree step this lift was scheduled with (the period itself
    /// for a standalone lift).
    pub lcm: u64,
    pub target: String,
    #[serde(serialize_with = "serialize_biguint")]
    pub target_order: BigUint,
    /// Images of `y_0, …, y_{r-1}`.
    pub phi: Vec<Permutation>,
    /// Images of `x_0, …, x_{n-1}`.
    pub images: Vec<Permutation>,
}

fn serialize_biguint<S: serde::Serializer>(
    v: &BigUint,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match u64::try_from(v) {
        Ok(x) => s.serialize_u64(x),
        Err(_) => s.serialize_str(&v.to_string()),
    }
}

impl CoverSurjection {
    /// Re-checks the surjection independently of how it was built: every
    /// relator of `G_n(v)`, the order of the image, and agreement of
    /// `φ(α^i(y_0))` (by word expansion) with the stored images, including
    /// wraparound at `i + n`.
    pub fn verify(
        &self,
        family: &CyclicWordFamily,
        fbc: &FreeByCyclicData,
        target: &PermGroup,
    ) -> Result<()> {
        let n =
            usize::try_from(self.n).map_err(|_| Error::InvalidArgument("n too large".into()))?;
        let p = family.cyclic_presentation(n)?;
        let hom = homsearch::verify_hom(&p, target, self.images.clone())?.ok_or_else(|| {
            Error::Verification(format!(
                "a relator of G_{n}(v) does not vanish in {}",
                self.target
            ))
        })?;
        if !hom.is_surjective() {
            return Err(Error::NotSurjective(format!(
                "images do not generate {}",
                self.target
            )));
        }
        if !self.n.is_multiple_of(self.period) {
            return Err(Error::Verification(format!(
                "period {} does not divide n = {n}",
                self.period
            )));
        }
        let mut word = Word::generator(fbc.rank, 0)?;
        for i in 0..n + fbc.rank {
            if word.len() > EXPANSION_LIMIT {
                break;
            }
            if evaluate(&word, &self.phi) != self.images[i % n] {
                return Err(Error::Verification(format!(
                    "φ(α^{i}(y_0)) disagrees with the image of x_{}",
                    i % n
                )));
            }
            word = fbc.alpha.apply(&word)?;
        }
        Ok(())
    }
}

/// Lifts `φ: F_r ↠ T` to `G_n(v) ↠ T` via `x_i ↦ φ(α^i(y_0))`.
pub fn lift_to_cyclic_presentation(
    family: &CyclicWordFamily,
    fbc: &FreeByCyclicData,
    phi: &Homomorphism,
    n: u64,
) -> Result<CoverSurjection> {
    let semidirect = SemidirectOverZ::from_fiber(fbc)?;
    let period = semidirect.cover_degree_for_target(phi)?;
    lift_with_period(
        family,
        &semidirect,
        phi.images(),
        phi.target(),
        period,
        period,
        n,
    )
}

fn lift_with_period(
    family: &CyclicWordFamily,
    semidirect: &SemidirectOverZ,
    phi: &[Permutation],
    target: &PermGroup,
    period: u64,
    lcm: u64,
    n: u64,
) -> Result<CoverSurjection> {
    if n < family.d() as u64 {
        return Err(Error::InvalidArgument(format!(
            "n = {n} is below d = {}",
            family.d()
        )));
    }
    if !n.is_multiple_of(period) {
        return Err(Error::InvalidArgument(format!(
            "n = {n} is not a multiple of the period {period}"
        )));
    }
    let count = usize::try_from(n).map_err(|_| Error::InvalidArgument("n too large".into()))?;
    let images: Vec<Permutation> = semidirect
        .precomposition_orbit(phi, count)
        .into_iter()
        .map(|psi| psi[0].clone())
        .collect();

    let p = family.cyclic_presentation(count)?;
    for (j, r) in p.relators().iter().enumerate() {
        if !evaluate(r, &images).is_identity() {
            return Err(Error::Verification(format!(
                "relator {j} of G_{n}(v) survives the lift to {}; the fiber data is inconsistent",
                target.name()
            )));
        }
    }
    let order = target.order();
    if PermGroup::new(target.degree(), images.clone())?.order() != order {
        return Err(Error::NotSurjective(format!(
            "the lift to G_{n}(v) does not generate {}",
            target.name()
        )));
    }
    Ok(CoverSurjection {
        n,
        period,
        lcm,
        target: target.name().to_string(),
        target_order: order,
        phi: phi.to_vec(),
        images,
    })
}

/// A common degree `n` with one verified surjection per target, and the
/// progression `{n + k·lcm : k ≥ 0}` of further valid degrees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientSchedule {
    pub word: String,
    pub d: usize,
    pub rank: usize,
    /// False for rank-1 fibers, which lie outside the theorem's hypothesis.
    pub within_hypothesis: bool,
    pub lcm: u64,
    pub n: u64,
    pub surjections: Vec<CoverSurjection>,
}

impl QuotientSchedule {
    /// The `k`-th member `n + k·lcm` of the progression.
    pub fn member(&self, k: u64) -> u64 {
        self.n + k * self.lcm
    }

    /// Lifts every stored `φ` again at another member of the progression.
    pub fn lift_at(
        &self,
        family: &CyclicWordFamily,
        fbc: &FreeByCyclicData,
        targets: &[PermGroup],
        n: u64,
    ) -> Result<Vec<CoverSurjection>> {
        if n < self.n || !(n - self.n).is_multiple_of(self.lcm) {
            return Err(Error::InvalidArgument(format!(
                "{n} is not in the progression {} + k·{}",
                self.n, self.lcm
            )));
        }
        let semidirect = SemidirectOverZ::from_fiber(fbc)?;
        self.surjections
            .iter()
            .zip(targets)
            .map(|(s, t)| lift_with_period(family, &semidirect, &s.phi, t, s.period, self.lcm, n))
            .collect()
    }
}

/// The first surjection `F_r ↠ T` in canonical order.
pub fn free_surjection(rank: usize, target: &PermGroup, budget: u64) -> Result<Homomorphism> {
    let free = Presentation::free("y", rank)?;
    homsearch::find_surjection(&free, target, budget)?.ok_or_else(|| Error::NoSurjection {
        target: target.name().to_string(),
    })
}

/// Smallest multiple of `step` that is at least `floor`.
pub fn smallest_multiple_at_least(step: u64, floor: u64) -> u64 {
    floor.div_ceil(step).max(1) * step
}

pub fn simple_quotient_schedule(
    family: &CyclicWordFamily,
    fbc: &FreeByCyclicData,
    targets: &[PermGroup],
    budget: u64,
) -> Result<QuotientSchedule> {
    let semidirect = SemidirectOverZ::from_fiber(fbc)?;
    let mut phis = Vec::with_capacity(targets.len());
    let mut lcm = 1u64;
    for target in targets {
        let phi = free_surjection(fbc.rank, target, budget)?;
        let period = semidirect.cover_degree_for_target(&phi)?;
        lcm = lcm.lcm(&period);
        phis.push((phi, period));
    }
    let d = family.d() as u64;
    let n = if targets.is_empty() {
        d
    } else {
        smallest_multiple_at_least(lcm, d)
    };
    let surjections = phis
        .iter()
        .zip(targets)
        .map(|((phi, period), t)| {
            lift_with_period(family, &semidirect, phi.images(), t, *period, lcm, n)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QuotientSchedule {
        word: family.v().to_string(),
        d: family.d(),
        rank: fbc.rank,
        within_hypothesis: fbc.rank >= 2,
        lcm,
        n,
        surjections,
    })
}

/// Counts `φ: F_r → T` with `φ∘α = φ`, for diagnostics on small targets.
pub fn count_alpha_fixed_homs(
    semidirect: &SemidirectOverZ,
    target: &PermGroup,
    budget: u64,
) -> Result<u64> {
    let free = Presentation::free("y", semidirect.rank())?;
    let mut count = 0;
    homsearch::for_each_hom(&free, target, budget, |images| {
        if semidirect.precompose(images) == images {
            count += 1;
        }
        ControlFlow::Continue(())
    })?;
    Ok(count)
}
