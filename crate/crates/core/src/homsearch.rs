//! Homomorphisms from finite presentations into permutation groups:
//! verification, exhaustive backtracking enumeration, and surjection search.
//!
//! Enumeration order is lexicographic in the indices of the generator images,
//! where the target's elements are sorted by their image arrays and the first
//! generator is the most significant. The budget counts relator evaluations
//! plus one unit per complete assignment, so relator-free searches are
//! bounded too.

use std::ops::ControlFlow;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::Serialize;

use crate::permgrp::{PermGroup, Permutation};
use crate::present::Presentation;
use crate::words::Word;
use crate::{Error, Result};

/// Evaluates `word` with generator `i` sent to `images[i]`.
pub fn evaluate(word: &Word, images: &[Permutation]) -> Permutation {
    let degree = images.first().map_or(0, Permutation::degree);
    let mut acc = Permutation::identity(degree);
    for &(g, e) in word.runs() {
        acc = acc.compose(&images[g.index()].pow(e));
    }
    acc
}

/// A generator-image map under which every relator evaluates to the identity.
#[derive(Clone, Debug)]
pub struct Homomorphism {
    source: Arc<Presentation>,
    target: Arc<PermGroup>,
    images: Vec<Permutation>,
}

impl Homomorphism {
    pub fn source(&self) -> &Presentation {
        &self.source
    }

    pub fn target(&self) -> &PermGroup {
        &self.target
    }

    pub fn images(&self) -> &[Permutation] {
        &self.images
    }

    pub fn apply(&self, word: &Word) -> Permutation {
        evaluate(word, &self.images)
    }

    pub fn image_group(&self) -> PermGroup {
        PermGroup::new(self.target.degree(), self.images.clone())
            .expect("images share the target degree")
    }

    pub fn is_surjective(&self) -> bool {
        self.image_group().order() == self.target.order()
    }

    /// Re-evaluates every relator independently of the search path.
    pub fn recheck(&self) -> bool {
        self.source
            .relators()
            .iter()
            .all(|r| self.apply(r).is_identity())
    }
}

/// Returns the homomorphism if all relators vanish, `None` otherwise.
pub fn verify_hom(
    p: &Presentation,
    target: &PermGroup,
    images: Vec<Permutation>,
) -> Result<Option<Homomorphism>> {
    if images.len() != p.num_generators() {
        return Err(Error::ArityMismatch {
            expected: p.num_generators(),
            found: images.len(),
        });
    }
    for g in &images {
        if !target.contains(g)? {
            return Err(Error::InvalidArgument(format!(
                "{g} is not an element of the target"
            )));
        }
    }
    let hom = Homomorphism {
        source: Arc::new(p.clone()),
        target: Arc::new(target.clone()),
        images,
    };
    Ok(hom.recheck().then_some(hom))
}

/// Counters from one search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub evaluations: u64,
    pub homomorphisms: u64,
}

struct Search<'a> {
    elements: &'a [Permutation],
    by_depth: Vec<Vec<&'a Word>>,
    budget: u64,
    stats: SearchStats,
    assignment: Vec<usize>,
    images: Vec<Permutation>,
}

impl Search<'_> {
    fn charge(&mut self) -> Result<()> {
        self.stats.evaluations += 1;
        if self.stats.evaluations > self.budget {
            return Err(Error::BudgetExceeded {
                budget: self.budget,
            });
        }
        Ok(())
    }

    fn run<F>(&mut self, depth: usize, visit: &mut F) -> Result<ControlFlow<()>>
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        if depth == self.by_depth.len() {
            self.charge()?;
            self.stats.homomorphisms += 1;
            return Ok(visit(&self.assignment));
        }
        for idx in 0..self.elements.len() {
            self.assignment.push(idx);
            self.images.push(self.elements[idx].clone());
            let mut ok = true;
            for k in 0..self.by_depth[depth].len() {
                self.charge()?;
                let relator = self.by_depth[depth][k];
                if !evaluate(relator, &self.images).is_identity() {
                    ok = false;
                    break;
                }
            }
            if ok {
                if let ControlFlow::Break(()) = self.run(depth + 1, visit)? {
                    return Ok(ControlFlow::Break(()));
                }
            }
            self.assignment.pop();
            self.images.pop();
        }
        Ok(ControlFlow::Continue(()))
    }
}

/// Visits every homomorphism `p → target` in canonical order.
///
/// Refuses up front when the presentation has more than two generators and
/// `|target|^generators` exceeds the budget; otherwise refuses as soon as the
/// running count of evaluations passes the budget.
pub fn for_each_hom<F>(
    p: &Presentation,
    target: &PermGroup,
    budget: u64,
    mut visit: F,
) -> Result<SearchStats>
where
    F: FnMut(&[Permutation]) -> ControlFlow<()>,
{
    let order = target.order();
    let gens = p.num_generators();
    if gens > 2 && order.pow(gens as u32) > BigUint::from(budget) {
        return Err(Error::BudgetExceeded { budget });
    }
    if order > BigUint::from(budget) {
        return Err(Error::BudgetExceeded { budget });
    }
    let elements = target.elements();
    let mut by_depth: Vec<Vec<&Word>> = vec![Vec::new(); gens];
    for r in p.relators() {
        if let Some(g) = r.max_generator() {
            by_depth[g.index()].push(r);
        }
    }
    let mut search = Search {
        elements: &elements,
        by_depth,
        budget,
        stats: SearchStats::default(),
        assignment: Vec::new(),
        images: Vec::new(),
    };
    let mut adapter = |assignment: &[usize]| {
        let images: Vec<Permutation> = assignment.iter().map(|&i| elements[i].clone()).collect();
        visit(&images)
    };
    let _ = search.run(0, &mut adapter)?;
    Ok(search.stats)
}

/// All homomorphisms `p → target` in canonical order.
pub fn enumerate_homs(
    p: &Presentation,
    target: &PermGroup,
    budget: u64,
) -> Result<Vec<Homomorphism>> {
    let source = Arc::new(p.clone());
    let tgt = Arc::new(target.clone());
    let mut out = Vec::new();
    for_each_hom(p, target, budget, |images| {
        out.push(Homomorphism {
            source: source.clone(),
            target: tgt.clone(),
            images: images.to_vec(),
        });
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// The first surjection `p ↠ target` in canonical order.
pub fn find_surjection(
    p: &Presentation,
    target: &PermGroup,
    budget: u64,
) -> Result<Option<Homomorphism>> {
    let order = target.order();
    let degree = target.degree();
    let mut found = None;
    for_each_hom(p, target, budget, |images| {
        let image = PermGroup::new(degree, images.to_vec()).expect("same degree");
        if image.order() == order {
            found = Some(images.to_vec());
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(found.map(|images| Homomorphism {
        source: Arc::new(p.clone()),
        target: Arc::new(target.clone()),
        images,
    }))
}

/// Summary of an exhaustive scan of `Hom(p, target)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientReport {
    pub target: String,
    #[serde(serialize_with = "serialize_biguint")]
    pub target_order: BigUint,
    pub generators: Vec<String>,
    pub hom_count: u64,
    pub surjection_count: u64,
    /// Images of the generators under the first surjection, in cycle notation.
    pub sample_surjection: Option<Vec<String>>,
    pub all_images_cyclic: bool,
    /// Generators sent to the identity by every homomorphism.
    pub always_trivial_generators: Vec<String>,
    pub evaluations: u64,
    pub budget: u64,
    pub note: String,
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

pub fn quotient_scan(p: &Presentation, target: &PermGroup, budget: u64) -> Result<QuotientReport> {
    let order = target.order();
    let degree = target.degree();
    let gens = p.num_generators();
    let mut hom_count = 0;
    let mut surjection_count = 0;
    let mut sample = None;
    let mut all_cyclic = true;
    let mut always_trivial = vec![true; gens];
    let stats = for_each_hom(p, target, budget, |images| {
        hom_count += 1;
        for (flag, g) in always_trivial.iter_mut().zip(images) {
            *flag &= g.is_identity();
        }
        let image = PermGroup::new(degree, images.to_vec()).expect("same degree");
        if image.order() == order {
            surjection_count += 1;
            if sample.is_none() {
                sample = Some(images.iter().map(ToString::to_string).collect());
            }
        }
        if all_cyclic && !image.is_cyclic() {
            all_cyclic = false;
        }
        ControlFlow::Continue(())
    })?;
    let note = if surjection_count == 0 {
        "exhaustive for this target only; other finite quotients remain possible, so absence here is evidence, not proof".to_string()
    } else {
        "exhaustive scan".to_string()
    };
    Ok(QuotientReport {
        target: target.name().to_string(),
        target_order: order,
        generators: p.naming().names().to_vec(),
        hom_count,
        surjection_count,
        sample_surjection: sample,
        all_images_cyclic: all_cyclic,
        always_trivial_generators: (0..gens)
            .filter(|&i| always_trivial[i])
            .map(|i| p.naming().name(i).to_string())
            .collect(),
        evaluations: stats.evaluations,
        budget,
        note,
    })
}
