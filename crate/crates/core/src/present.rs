//! Finite presentations, the cyclically presented groups `G_n(v)`, the
//! two-generator groups `H_n(w) = ⟨x, t | w, tⁿ⟩`, and the free-by-cyclic
//! criterion with its fiber automorphism.

use serde::{Deserialize, Serialize};

use crate::words::{Endomorphism, Generator, Naming, Word};
use crate::{Error, Result};

/// A finite presentation `⟨generators | relators⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    naming: Naming,
    relators: Vec<Word>,
}

/// On-disk form: `{"generators": ["x0", ...], "relators": ["<word>", ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationFile {
    pub generators: Vec<String>,
    pub relators: Vec<String>,
}

impl Presentation {
    pub fn new(naming: Naming, relators: Vec<Word>) -> Result<Presentation> {
        if naming.rank() == 0 {
            return Err(Error::InvalidArgument(
                "a presentation needs at least one generator".into(),
            ));
        }
        for r in &relators {
            if r.rank() != naming.rank() {
                return Err(Error::RankMismatch {
                    expected: naming.rank(),
                    found: r.rank(),
                });
            }
        }
        Ok(Presentation { naming, relators })
    }

    /// The free group on `rank` generators named with `prefix`.
    pub fn free(prefix: &str, rank: usize) -> Result<Presentation> {
        Presentation::new(Naming::with_prefix(prefix, rank), Vec::new())
    }

    pub fn num_generators(&self) -> usize {
        self.naming.rank()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn naming(&self) -> &Naming {
        &self.naming
    }

    pub fn to_file(&self) -> PresentationFile {
        PresentationFile {
            generators: self.naming.names().to_vec(),
            relators: self
                .relators
                .iter()
                .map(|r| self.naming.format(r))
                .collect(),
        }
    }

    pub fn from_file(file: &PresentationFile) -> Result<Presentation> {
        let naming = Naming::new(file.generators.iter().cloned())?;
        let relators = file
            .relators
            .iter()
            .map(|r| naming.parse(r))
            .collect::<Result<Vec<_>>>()?;
        Presentation::new(naming, relators)
    }
}

/// Adds `k` to every generator index modulo `n`; the word must live in `F_n`.
pub fn rotate(word: &Word, k: usize, n: usize) -> Result<Word> {
    if word.rank() != n {
        return Err(Error::RankMismatch {
            expected: n,
            found: word.rank(),
        });
    }
    word.map_generators(n, |i| (i + k) % n)
}

/// A cyclically reduced word `v ∈ F_d` defining the family `{G_n(v) : n ≥ d}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicWordFamily {
    v: Word,
    d: usize,
}

impl CyclicWordFamily {
    /// `v` must be cyclically reduced and use only `x_0, …, x_{d-1}`.
    pub fn new(v: &Word, d: usize) -> Result<CyclicWordFamily> {
        if d == 0 {
            return Err(Error::InvalidArgument(
                "ambient rank d must be at least 1".into(),
            ));
        }
        if !v.is_cyclically_reduced() {
            return Err(Error::InvalidArgument(format!(
                "{v} is not cyclically reduced"
            )));
        }
        Ok(CyclicWordFamily {
            v: v.with_rank(d)?,
            d,
        })
    }

    /// Cyclically reduces `v` (conjugation does not change any `G_n(v)`) and
    /// takes `d` to be one more than the largest index, unless given.
    pub fn from_word(v: &Word, d: Option<usize>) -> Result<CyclicWordFamily> {
        let (reduced, _) = v.cyclic_reduce();
        let d = d.unwrap_or_else(|| reduced.max_generator().map_or(1, |g| g.0 + 1));
        CyclicWordFamily::new(&reduced, d)
    }

    pub fn v(&self) -> &Word {
        &self.v
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `π_n^k(v)`, i.e. `v` with `k` added to every index modulo `n`.
    pub fn shifted(&self, k: usize, n: usize) -> Result<Word> {
        if n < self.d {
            return Err(Error::InvalidArgument(format!(
                "n = {n} is below d = {}",
                self.d
            )));
        }
        rotate(&self.v.with_rank(n)?, k % n, n)
    }

    /// The deficiency-zero presentation of `G_n(v)`: relator `i` is `π_n^i(v)`.
    pub fn cyclic_presentation(&self, n: usize) -> Result<Presentation> {
        if n < self.d {
            return Err(Error::InvalidArgument(format!(
                "G_n(v) is only defined for n >= d = {}, got n = {n}",
                self.d
            )));
        }
        let relators = (0..n)
            .map(|i| self.shifted(i, n))
            .collect::<Result<Vec<_>>>()?;
        Presentation::new(Naming::indexed(n), relators)
    }

    /// `w(x, t) = v(x, t x t⁻¹, …, t^{d-1} x t^{-(d-1)})` in `F(x, t)`.
    pub fn v_to_w(&self) -> Word {
        let images: Vec<Word> = (0..self.d)
            .map(|i| Word::reduce(2, [(1, i as i64), (0, 1), (1, -(i as i64))]).expect("rank 2"))
            .collect();
        self.v.substitute(&images).expect("d images of rank 2")
    }

    /// The extreme-index single-occurrence test.
    ///
    /// Returns `None` when the smallest or largest occurring generator occurs
    /// more than once, or when only one generator occurs.
    pub fn free_by_cyclic_check(&self) -> Result<Option<FreeByCyclicData>> {
        let (Some(s), Some(l)) = (self.v.min_generator(), self.v.max_generator()) else {
            return Err(Error::InvalidArgument(
                "the empty word has no free-by-cyclic structure".into(),
            ));
        };
        if s == l || self.v.occurrences(s.0) != 1 || self.v.occurrences(l.0) != 1 {
            return Ok(None);
        }
        self.build_fiber(s, l).map(Some)
    }

    pub fn fiber_automorphism(&self) -> Result<FreeByCyclicData> {
        self.free_by_cyclic_check()?.ok_or_else(|| {
            Error::NotFreeByCyclic(format!("{} fails the single-occurrence test", self.v))
        })
    }

    fn build_fiber(&self, s: Generator, l: Generator) -> Result<FreeByCyclicData> {
        let r = l.0 - s.0;
        // Shift so that the smallest index is 0; the word then lives on y_0..y_r.
        let normalized = self.v.map_generators(r + 1, |i| i - s.0)?;
        debug_assert_eq!(normalized.exponent_sum(0).abs(), 1);
        debug_assert_eq!(normalized.exponent_sum(r).abs(), 1);

        // v(y_0, …, y_r) = 1 solved for y_r gives α(y_{r-1}) = y_r.
        let top = solve_for_single(&normalized, r, |i| i)?;
        let mut images: Vec<Word> = (1..r)
            .map(|i| Word::generator(r, i))
            .collect::<Result<_>>()?;
        images.push(top);
        let alpha = Endomorphism::new(images)?;

        // v(y_{-1}, …, y_{r-1}) = 1 solved for y_{-1} gives α⁻¹(y_0) = y_{-1}.
        let bottom = solve_for_single(&normalized, 0, |i| i - 1)?;
        let mut inv_images = vec![bottom];
        inv_images.extend(
            (0..r - 1)
                .map(|i| Word::generator(r, i))
                .collect::<Result<Vec<_>>>()?,
        );
        let alpha_inverse = Endomorphism::new(inv_images)?;

        if !alpha.compose(&alpha_inverse)?.is_identity()
            || !alpha_inverse.compose(&alpha)?.is_identity()
        {
            return Err(Error::Verification(format!(
                "fiber map of {} is not inverted by its candidate inverse",
                self.v
            )));
        }
        Ok(FreeByCyclicData {
            s: s.0,
            l: l.0,
            rank: r,
            alpha,
            alpha_inverse,
            normalized,
        })
    }
}

/// Splits `relation = A · y^ε · B` at the single occurrence of `y = y_pivot`
/// and returns `y = (A⁻¹ B⁻¹)^ε`, re-indexing the other letters by `reindex`
/// into a free group of rank `relation.rank() - 1`.
fn solve_for_single<F>(relation: &Word, pivot: usize, reindex: F) -> Result<Word>
where
    F: Fn(usize) -> usize,
{
    let rank = relation.rank() - 1;
    let runs = relation.runs();
    let pos = runs
        .iter()
        .position(|&(g, _)| g.0 == pivot)
        .ok_or_else(|| Error::NotFreeByCyclic(format!("generator {pivot} does not occur")))?;
    let sign = runs[pos].1;
    let part = |slice: &[(Generator, i64)]| {
        Word::reduce(rank, slice.iter().map(|&(g, e)| (reindex(g.0), e)))
    };
    let before = part(&runs[..pos])?;
    let after = part(&runs[pos + 1..])?;
    Ok(before.inverse().mul(&after.inverse()).pow(sign))
}

/// Structure of `⟨x, t | w⟩ ≅ F_r ⋊_α Z` for a free-by-cyclic word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeByCyclicData {
    /// Smallest generator index occurring in `v`.
    pub s: usize,
    /// Largest generator index occurring in `v`.
    pub l: usize,
    /// Fiber rank `r = l - s`.
    pub rank: usize,
    /// Conjugation by `t` on the basis `y_i = tⁱ x t⁻ⁱ`, `0 ≤ i < r`.
    pub alpha: Endomorphism,
    pub alpha_inverse: Endomorphism,
    /// `v` shifted down by `s`, as a word in `y_0, …, y_r`.
    pub normalized: Word,
}

/// `⟨x, t | w, tⁿ⟩`; `w` must be a word in `F(x, t)` with `x = 0`, `t = 1`.
pub fn h_n_presentation(w: &Word, n: usize) -> Result<Presentation> {
    if w.rank() != 2 {
        return Err(Error::RankMismatch {
            expected: 2,
            found: w.rank(),
        });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("H_n(w) needs n >= 1".into()));
    }
    let t_power = Word::power_of(2, 1, n as i64)?;
    Presentation::new(Naming::two_generator(), vec![w.clone(), t_power])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn family(text: &str) -> CyclicWordFamily {
        let naming = Naming::infer(&[text], false).unwrap();
        CyclicWordFamily::from_word(&naming.parse(text).unwrap(), None).unwrap()
    }

    fn two_gen(text: &str) -> Word {
        Naming::two_generator().parse(text).unwrap()
    }

    #[test]
    fn cyclic_presentation_examples() {
        let p = family("x3 x0^-1").cyclic_presentation(6).unwrap();
        let n = Naming::indexed(6);
        for i in 0..6 {
            let expected = n.parse(&format!("x{} x{}^-1", (i + 3) % 6, i)).unwrap();
            assert_eq!(p.relators()[i], expected);
        }

        let p = family("x0").cyclic_presentation(3).unwrap();
        assert_eq!(
            p.relators()
                .iter()
                .map(|r| r.to_string())
                .collect::<Vec<_>>(),
            ["x0", "x1", "x2"]
        );

        let p = family("x0^2 x1^-3").cyclic_presentation(2).unwrap();
        let n = Naming::indexed(2);
        assert_eq!(
            p.relators(),
            &[
                n.parse("x0^2 x1^-3").unwrap(),
                n.parse("x1^2 x0^-3").unwrap()
            ]
        );

        assert!(family("x3 x0^-1").cyclic_presentation(3).is_err());
    }

    #[test]
    fn v_to_w_examples() {
        assert_eq!(family("x3 x0^-1").v_to_w(), two_gen("t^3 x t^-3 x^-1"));
        assert_eq!(
            family("x1 x0 x1^-1 x0^-2").v_to_w(),
            two_gen("t x t^-1 x t x^-1 t^-1 x^-2")
        );
        assert_eq!(family("x0").v_to_w(), two_gen("x"));
    }

    #[test]
    fn h_n_examples() {
        let w = family("x3 x0^-1").v_to_w();
        let p = h_n_presentation(&w, 6).unwrap();
        assert_eq!(p.relators(), &[two_gen("t^3 x t^-3 x^-1"), two_gen("t^6")]);

        let p = h_n_presentation(&two_gen("x"), 5).unwrap();
        assert_eq!(p.to_file().relators, ["x", "t^5"]);

        let bg = family("x1 x0 x1^-1 x0^-2").v_to_w();
        let p = h_n_presentation(&bg, 4).unwrap();
        assert_eq!(p.to_file().relators, ["t x t^-1 x t x^-1 t^-1 x^-2", "t^4"]);
        assert!(h_n_presentation(&bg, 0).is_err());
    }

    #[test]
    fn free_by_cyclic_examples() {
        let data = family("x3 x0^-1").free_by_cyclic_check().unwrap().unwrap();
        assert_eq!(data.rank, 3);
        let y = Naming::with_prefix("y", 3);
        assert_eq!(
            data.alpha,
            y.parse_endomorphism("y0->y1; y1->y2; y2->y0").unwrap()
        );

        assert!(family("x0^2 x1^-3")
            .free_by_cyclic_check()
            .unwrap()
            .is_none());
        assert!(family("x1 x0 x1^-1 x0^-2")
            .free_by_cyclic_check()
            .unwrap()
            .is_none());

        let data = family("x1 x0^-1").fiber_automorphism().unwrap();
        assert_eq!(data.rank, 1);
        assert!(data.alpha.is_identity());

        let empty = CyclicWordFamily::new(&Word::identity(2), 2).unwrap();
        assert!(empty.free_by_cyclic_check().is_err());
        assert!(matches!(
            family("x0^2 x1^-3").fiber_automorphism(),
            Err(Error::NotFreeByCyclic(_))
        ));
    }

    #[test]
    fn fiber_automorphism_after_index_normalization() {
        // x_2 x_4 x_3^-1 : s = 2, l = 4, r = 2
        let data = family("x2 x4 x3^-1").fiber_automorphism().unwrap();
        assert_eq!((data.s, data.l, data.rank), (2, 4, 2));
        let y = Naming::with_prefix("y", 2);
        // y0 y2 y1^-1 = 1  =>  y2 = y0^-1 y1
        assert_eq!(
            data.alpha,
            y.parse_endomorphism("y0->y1; y1->y0^-1 y1").unwrap()
        );
        assert!(data
            .alpha
            .compose(&data.alpha_inverse)
            .unwrap()
            .is_identity());
    }

    #[test]
    fn family_rejects_non_cyclically_reduced() {
        let n = Naming::indexed(2);
        assert!(CyclicWordFamily::new(&n.parse("x0 x1 x0^-1").unwrap(), 2).is_err());
        let f = CyclicWordFamily::from_word(&n.parse("x0 x1 x0^-1").unwrap(), None).unwrap();
        assert_eq!(f.v().to_string(), "x1");
    }

    #[test]
    fn presentation_file_round_trip() {
        let p = family("x1 x0 x1^-1 x0^-2").cyclic_presentation(4).unwrap();
        let file = p.to_file();
        assert_eq!(Presentation::from_file(&file).unwrap(), p);
    }
}
