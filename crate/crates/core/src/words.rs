//! Reduced words in finitely generated free groups, endomorphisms given by
//! generator images, and the textual word grammar shared by the CLI and the
//! JSON file formats.
//!
//! Words are stored as runs `(generator, exponent)` with no zero exponents and
//! no two adjacent runs on the same generator, which is exactly the freely
//! reduced normal form.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A free generator `x_index`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Generator(pub usize);

impl Generator {
    pub fn index(self) -> usize {
        self.0
    }
}

/// A freely reduced word of a free group of known rank.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    rank: usize,
    runs: Vec<(Generator, i64)>,
}

impl Word {
    pub fn identity(rank: usize) -> Word {
        Word {
            rank,
            runs: Vec::new(),
        }
    }

    pub fn generator(rank: usize, index: usize) -> Result<Word> {
        Word::power_of(rank, index, 1)
    }

    pub fn power_of(rank: usize, index: usize, exponent: i64) -> Result<Word> {
        Word::reduce(rank, [(index, exponent)])
    }

    /// Freely reduces a sequence of `(generator index, exponent)` letters.
    ///
    /// Exponents may be any integer, so a letter `(g, 3)` stands for `g g g`.
    pub fn reduce<I>(rank: usize, letters: I) -> Result<Word>
    where
        I: IntoIterator<Item = (usize, i64)>,
    {
        let mut word = Word::identity(rank);
        for (index, exponent) in letters {
            if index >= rank {
                return Err(Error::GeneratorOutOfRange { index, rank });
            }
            word.push_run(Generator(index), exponent);
        }
        Ok(word)
    }

    fn push_run(&mut self, generator: Generator, exponent: i64) {
        if exponent == 0 {
            return;
        }
        match self.runs.last_mut() {
            Some((last, e)) if *last == generator => {
                *e += exponent;
                if *e == 0 {
                    self.runs.pop();
                }
            }
            _ => self.runs.push((generator, exponent)),
        }
    }

    /// Appends `other` in place, cancelling across the junction.
    pub fn append(&mut self, other: &Word) {
        assert_eq!(self.rank, other.rank, "rank mismatch in word product");
        for &(g, e) in &other.runs {
            self.push_run(g, e);
        }
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.clone();
        out.append(other);
        out
    }

    pub fn inverse(&self) -> Word {
        Word {
            rank: self.rank,
            runs: self.runs.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    pub fn pow(&self, exponent: i64) -> Word {
        let base = if exponent < 0 {
            self.inverse()
        } else {
            self.clone()
        };
        let mut k = exponent.unsigned_abs();
        let mut acc = Word::identity(self.rank);
        let mut square = base;
        while k > 0 {
            if k & 1 == 1 {
                acc.append(&square);
            }
            k >>= 1;
            if k > 0 {
                square = square.mul(&square);
            }
        }
        acc
    }

    /// `conjugator · self · conjugator⁻¹`
    pub fn conjugate_by(&self, conjugator: &Word) -> Word {
        conjugator.mul(self).mul(&conjugator.inverse())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn runs(&self) -> &[(Generator, i64)] {
        &self.runs
    }

    pub fn is_identity(&self) -> bool {
        self.runs.is_empty()
    }

    /// Number of letters, counting `x^k` as `|k|` letters.
    pub fn len(&self) -> u64 {
        self.runs.iter().map(|&(_, e)| e.unsigned_abs()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    /// Expands the runs into single letters `(generator, ±1)`.
    pub fn letters(&self) -> impl Iterator<Item = (Generator, i64)> + '_ {
        self.runs
            .iter()
            .flat_map(|&(g, e)| std::iter::repeat_n((g, e.signum()), e.unsigned_abs() as usize))
    }

    /// Re-homes the word in a free group of a different rank.
    pub fn with_rank(&self, rank: usize) -> Result<Word> {
        if let Some(g) = self.max_generator() {
            if g.0 >= rank {
                return Err(Error::GeneratorOutOfRange { index: g.0, rank });
            }
        }
        Ok(Word {
            rank,
            runs: self.runs.clone(),
        })
    }

    /// Applies an index map to every letter and re-reduces.
    pub fn map_generators<F>(&self, rank: usize, mut f: F) -> Result<Word>
    where
        F: FnMut(usize) -> usize,
    {
        Word::reduce(rank, self.runs.iter().map(|&(g, e)| (f(g.0), e)))
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.runs.first(), self.runs.last()) {
            (Some(first), Some(last)) => self.runs.len() == 1 || first.0 != last.0,
            _ => true,
        }
    }

    /// Returns `(r, c)` with `r` cyclically reduced and `self = c · r · c⁻¹`.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let mut runs: std::collections::VecDeque<(Generator, i64)> =
            self.runs.iter().copied().collect();
        let mut conjugator = Word::identity(self.rank);
        while runs.len() >= 2 {
            let (g, a) = runs[0];
            let (h, b) = runs[runs.len() - 1];
            if g != h {
                break;
            }
            // g^a u g^b = g^a (u g^{a+b}) g^{-a}
            runs.pop_front();
            runs.pop_back();
            conjugator.push_run(g, a);
            if a + b != 0 {
                runs.push_back((g, a + b));
                break;
            }
        }
        let mut reduced = Word::identity(self.rank);
        for (g, e) in runs {
            reduced.push_run(g, e);
        }
        (reduced, conjugator)
    }

    /// Exponent-sum vector of length `rank`.
    pub fn abelianize(&self) -> Vec<i64> {
        let mut v = vec![0i64; self.rank];
        for &(g, e) in &self.runs {
            v[g.0] += e;
        }
        v
    }

    pub fn exponent_sum(&self, generator: usize) -> i64 {
        self.runs
            .iter()
            .filter(|(g, _)| g.0 == generator)
            .map(|&(_, e)| e)
            .sum()
    }

    /// Number of letters `x_g^{±1}` in the word.
    pub fn occurrences(&self, generator: usize) -> u64 {
        self.runs
            .iter()
            .filter(|(g, _)| g.0 == generator)
            .map(|&(_, e)| e.unsigned_abs())
            .sum()
    }

    pub fn min_generator(&self) -> Option<Generator> {
        self.runs.iter().map(|&(g, _)| g).min()
    }

    pub fn max_generator(&self) -> Option<Generator> {
        self.runs.iter().map(|&(g, _)| g).max()
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.runs.iter().map(|&(g, _)| g.0).collect()
    }

    /// Replaces each generator `x_i` by `images[i]`.
    ///
    /// All images must share a rank, which becomes the rank of the result.
    pub fn substitute(&self, images: &[Word]) -> Result<Word> {
        if images.len() != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: images.len(),
            });
        }
        let target_rank = images.first().map_or(0, Word::rank);
        if let Some(bad) = images.iter().find(|w| w.rank != target_rank) {
            return Err(Error::RankMismatch {
                expected: target_rank,
                found: bad.rank,
            });
        }
        let mut out = Word::identity(target_rank);
        for &(g, e) in &self.runs {
            out.append(&images[g.0].pow(e));
        }
        Ok(out)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word[{}]({})", self.rank, self)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.runs.is_empty() {
            return f.write_str("1");
        }
        for (i, &(g, e)) in self.runs.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "x{}", g.0)?;
            if e != 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// An endomorphism of `F_rank`, given by the images of the free generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Endomorphism {
    rank: usize,
    images: Vec<Word>,
}

impl Endomorphism {
    pub fn new(images: Vec<Word>) -> Result<Endomorphism> {
        let rank = images.len();
        if let Some(bad) = images.iter().find(|w| w.rank() != rank) {
            return Err(Error::RankMismatch {
                expected: rank,
                found: bad.rank(),
            });
        }
        Ok(Endomorphism { rank, images })
    }

    pub fn identity(rank: usize) -> Endomorphism {
        let images = (0..rank)
            .map(|i| Word::generator(rank, i).expect("index < rank"))
            .collect();
        Endomorphism { rank, images }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, generator: usize) -> &Word {
        &self.images[generator]
    }

    pub fn apply(&self, word: &Word) -> Result<Word> {
        if word.rank() != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: word.rank(),
            });
        }
        word.substitute(&self.images)
    }

    /// `self ∘ inner`: apply `inner` first, then `self`.
    pub fn compose(&self, inner: &Endomorphism) -> Result<Endomorphism> {
        if inner.rank != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: inner.rank,
            });
        }
        let images = inner
            .images
            .iter()
            .map(|w| self.apply(w))
            .collect::<Result<Vec<_>>>()?;
        Ok(Endomorphism {
            rank: self.rank,
            images,
        })
    }

    pub fn pow(&self, n: u64) -> Endomorphism {
        let mut acc = Endomorphism::identity(self.rank);
        let mut square = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.compose(&square).expect("equal ranks");
            }
            k >>= 1;
            if k > 0 {
                square = square.compose(&square).expect("equal ranks");
            }
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, w)| w.runs() == [(Generator(i), 1)])
    }
}

/// Generator names used to print and parse words.
///
/// The word grammar: terms separated by whitespace or `*`; each term is a
/// generator name optionally followed by `^` and a signed integer. The lone
/// term `1` denotes the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Naming {
    names: Vec<String>,
    lookup: HashMap<String, usize>,
}

impl Naming {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Naming> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut lookup = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if !is_identifier(name) {
                return Err(Error::Parse(format!("invalid generator name {name:?}")));
            }
            if lookup.insert(name.clone(), i).is_some() {
                return Err(Error::Parse(format!("duplicate generator name {name:?}")));
            }
        }
        Ok(Naming { names, lookup })
    }

    /// `x0, …, x{rank-1}`
    pub fn indexed(rank: usize) -> Naming {
        Naming::with_prefix("x", rank)
    }

    pub fn with_prefix(prefix: &str, rank: usize) -> Naming {
        Naming::new((0..rank).map(|i| format!("{prefix}{i}"))).expect("valid generated names")
    }

    /// `x, t` with `x` as generator 0 and the stable letter `t` as generator 1.
    pub fn two_generator() -> Naming {
        Naming::new(["x", "t"]).expect("valid names")
    }

    /// Infers a naming from the names used in `texts`.
    ///
    /// Names of the form `x<k>` give the indexed naming of rank `max k + 1`.
    /// Otherwise every name must be a single lowercase letter; the distinct
    /// letters are numbered in alphabetical order. With `stable_letter`, the
    /// letter `t` is excluded from that numbering and placed last.
    pub fn infer(texts: &[&str], stable_letter: bool) -> Result<Naming> {
        let mut names = BTreeSet::new();
        for text in texts {
            for token in tokenize(text) {
                let (name, _) = split_term(token)?;
                if let Some(name) = name {
                    names.insert(name.to_string());
                }
            }
        }
        let indexed: Option<Vec<usize>> = names.iter().map(|n| indexed_name(n)).collect();
        if let Some(indices) = indexed {
            if !names.is_empty() {
                let rank = indices.into_iter().max().map_or(0, |m| m + 1);
                return Ok(Naming::indexed(rank));
            }
        }
        let mut letters = Vec::new();
        let mut has_t = false;
        for name in &names {
            let mut chars = name.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) if c.is_ascii_lowercase() => {
                    if stable_letter && c == 't' {
                        has_t = true;
                    } else {
                        letters.push(c.to_string());
                    }
                }
                _ => {
                    return Err(Error::Parse(format!(
                        "cannot mix name {name:?} with single-letter or x<k> generators"
                    )))
                }
            }
        }
        if stable_letter && has_t {
            letters.push("t".to_string());
        }
        Naming::new(letters)
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.lookup.get(name).copied()
    }

    /// Extends the naming by one extra generator (typically a stable letter).
    pub fn extended(&self, name: &str) -> Result<Naming> {
        Naming::new(
            self.names
                .iter()
                .cloned()
                .chain(std::iter::once(name.to_string())),
        )
    }

    pub fn parse(&self, text: &str) -> Result<Word> {
        let mut letters = Vec::new();
        for token in tokenize(text) {
            let (name, exponent) = split_term(token)?;
            let Some(name) = name else { continue };
            let index = self
                .index_of(name)
                .ok_or_else(|| Error::Parse(format!("unknown generator {name:?} in {text:?}")))?;
            letters.push((index, exponent));
        }
        Word::reduce(self.rank(), letters)
    }

    pub fn format(&self, word: &Word) -> String {
        if word.is_identity() {
            return "1".to_string();
        }
        let mut out = String::new();
        for (i, &(g, e)) in word.runs().iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(self.name(g.0));
            if e != 1 {
                out.push('^');
                out.push_str(&e.to_string());
            }
        }
        out
    }

    /// Parses `a->b; b->a^2` style endomorphism text. Every generator of the
    /// naming must receive exactly one image.
    pub fn parse_endomorphism(&self, text: &str) -> Result<Endomorphism> {
        let mut images: Vec<Option<Word>> = vec![None; self.rank()];
        for clause in text
            .split([';', ','])
            .map(str::trim)
            .filter(|c| !c.is_empty())
        {
            let (lhs, rhs) = clause
                .split_once("->")
                .ok_or_else(|| Error::Parse(format!("expected `name->word` in {clause:?}")))?;
            let lhs = lhs.trim();
            let index = self
                .index_of(lhs)
                .ok_or_else(|| Error::Parse(format!("unknown generator {lhs:?}")))?;
            if images[index].is_some() {
                return Err(Error::Parse(format!("generator {lhs:?} given twice")));
            }
            images[index] = Some(self.parse(rhs)?);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, w)| {
                w.ok_or_else(|| Error::Parse(format!("missing image for {}", self.name(i))))
            })
            .collect::<Result<Vec<_>>>()?;
        Endomorphism::new(images)
    }

    pub fn format_endomorphism(&self, endo: &Endomorphism) -> String {
        endo.images()
            .iter()
            .enumerate()
            .map(|(i, w)| format!("{}->{}", self.name(i), self.format(w)))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// Infers the generator naming of an endomorphism text (`a->b; b->a^2`).
pub fn infer_endomorphism_naming(text: &str) -> Result<Naming> {
    let mut pieces = Vec::new();
    for clause in text.split([';', ',']) {
        match clause.split_once("->") {
            Some((lhs, rhs)) => {
                pieces.push(lhs);
                pieces.push(rhs);
            }
            None if clause.trim().is_empty() => {}
            None => return Err(Error::Parse(format!("expected `name->word` in {clause:?}"))),
        }
    }
    Naming::infer(&pieces, false)
}

fn tokenize(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| c.is_whitespace() || c == '*')
        .filter(|t| !t.is_empty())
}

fn split_term(token: &str) -> Result<(Option<&str>, i64)> {
    if token == "1" {
        return Ok((None, 0));
    }
    let (name, exponent) = match token.split_once('^') {
        Some((name, exp)) => {
            let exp = exp.trim_start_matches('+');
            let exponent: i64 = exp
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in term {token:?}")))?;
            (name, exponent)
        }
        None => (token, 1),
    };
    if !is_identifier(name) {
        return Err(Error::Parse(format!(
            "bad generator name in term {token:?}"
        )));
    }
    Ok((Some(name), exponent))
}

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn indexed_name(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(text: &str, rank: usize) -> Word {
        Naming::indexed(rank).parse(text).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert!(w("x0 x0^-1", 1).is_identity());
        assert_eq!(w("x1 x0 x0^-1 x1", 2).runs(), &[(Generator(1), 2)]);
        assert_eq!(w("x3 x0^-1", 4).to_string(), "x3 x0^-1");
        assert_eq!(
            Word::reduce(2, [(2, 1)]),
            Err(Error::GeneratorOutOfRange { index: 2, rank: 2 })
        );
    }

    #[test]
    fn cyclic_reduce_examples() {
        let (r, c) = w("x0 x1 x0^-1", 2).cyclic_reduce();
        assert_eq!(r, w("x1", 2));
        assert_eq!(c, w("x0", 2));

        let (r, c) = Word::identity(3).cyclic_reduce();
        assert!(r.is_identity() && c.is_identity());

        let bg = w("x1 x0 x1^-1 x0^-2", 2);
        let (r, c) = bg.cyclic_reduce();
        assert_eq!(r, bg);
        assert!(c.is_identity());
    }

    #[test]
    fn cyclic_reduce_merges_wrapping_powers() {
        let word = w("x0^2 x1 x0", 2);
        let (r, c) = word.cyclic_reduce();
        assert!(r.is_cyclically_reduced());
        assert_eq!(r.conjugate_by(&c), word);
        assert_eq!(r.len(), 4);
    }

    #[test]
    fn apply_endo_examples() {
        let names = Naming::new(["a", "b"]).unwrap();
        let theta = names.parse_endomorphism("a->b; b->a^2").unwrap();
        assert_eq!(
            theta.apply(&names.parse("a b").unwrap()).unwrap(),
            names.parse("b a^2").unwrap()
        );
        assert_eq!(
            theta.apply(&names.parse("a b a^-1").unwrap()).unwrap(),
            names.parse("b a^2 b^-1").unwrap()
        );
        let any = names.parse("a^3 b^-2 a").unwrap();
        assert_eq!(Endomorphism::identity(2).apply(&any).unwrap(), any);
        assert!(matches!(
            theta.apply(&Word::identity(3)),
            Err(Error::RankMismatch { .. })
        ));
    }

    #[test]
    fn compose_examples() {
        let names = Naming::new(["a", "b"]).unwrap();
        let theta = names.parse_endomorphism("a->b; b->a^2").unwrap();
        assert_eq!(theta.compose(&Endomorphism::identity(2)).unwrap(), theta);
        assert_eq!(
            theta.compose(&theta).unwrap(),
            names.parse_endomorphism("a->a^2; b->b^2").unwrap()
        );
        let y = Naming::with_prefix("y", 3);
        let shift = y.parse_endomorphism("y0->y1; y1->y2; y2->y0").unwrap();
        assert!(shift.pow(3).is_identity());
        assert!(!shift.pow(2).is_identity());
        assert!(theta.compose(&Endomorphism::identity(3)).is_err());
    }

    #[test]
    fn abelianize_examples() {
        assert_eq!(w("x3 x0^-1", 4).abelianize(), vec![-1, 0, 0, 1]);
        assert_eq!(Word::identity(3).abelianize(), vec![0, 0, 0]);
        assert_eq!(w("x1 x0 x1^-1 x0^-2", 2).abelianize(), vec![-1, 0]);
    }

    #[test]
    fn grammar_accepts_star_and_signed_exponents() {
        let n = Naming::indexed(3);
        assert_eq!(
            n.parse("x0*x1^+2 * x2^-1").unwrap(),
            n.parse("x0 x1 x1 x2^-1").unwrap()
        );
        assert!(n.parse("1").unwrap().is_identity());
        assert!(n.parse("").unwrap().is_identity());
        assert!(n.parse("x3").is_err());
        assert!(n.parse("x0^").is_err());
        assert!(n.parse("x0^a").is_err());
    }

    #[test]
    fn infer_naming() {
        let n = Naming::infer(&["x3 x0^-1"], false).unwrap();
        assert_eq!(n.rank(), 4);
        let n = Naming::infer(&["t a t^-1 a^-1", "b"], true).unwrap();
        assert_eq!(n.names(), &["a", "b", "t"]);
        let n = infer_endomorphism_naming("a->a c a; c->d c; d->c").unwrap();
        assert_eq!(n.names(), &["a", "c", "d"]);
        assert!(Naming::infer(&["x0 a"], false).is_err());
    }

    #[test]
    fn occurrences_count_letters() {
        let v = w("x1 x0 x1^-1 x0^-2", 2);
        assert_eq!(v.occurrences(0), 3);
        assert_eq!(v.occurrences(1), 2);
        assert_eq!(v.exponent_sum(1), 0);
    }
}
