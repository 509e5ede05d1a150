//! Permutation groups with deterministic Schreier–Sims stabilizer chains,
//! named target groups, and the embedding of a finite group into an
//! alternating group by its regular representation.
//!
//! Permutations act on the right: `p.compose(q)` applies `p` first, then `q`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::One;

use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Permutation> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidArgument(format!(
                    "{images:?} is not a permutation"
                )));
            }
        }
        Ok(Permutation { images })
    }

    pub fn identity(degree: usize) -> Permutation {
        Permutation {
            images: (0..degree).collect(),
        }
    }

    /// Builds a permutation from disjoint or overlapping cycles, composed left to right.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Permutation> {
        let mut acc = Permutation::identity(degree);
        for cycle in cycles {
            let mut images: Vec<usize> = (0..degree).collect();
            for (k, &p) in cycle.iter().enumerate() {
                let q = cycle[(k + 1) % cycle.len()];
                if p >= degree || q >= degree {
                    return Err(Error::InvalidArgument(format!(
                        "cycle point out of range for degree {degree}"
                    )));
                }
                images[p] = q;
            }
            acc = acc.compose(&Permutation::new(images)?);
        }
        Ok(acc)
    }

    /// Parses cycle notation such as `(0 1 2)(3 4)`; `()` is the identity.
    pub fn parse_cycles(degree: usize, text: &str) -> Result<Permutation> {
        let mut cycles = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .and_then(|r| r.split_once(')'))
                .ok_or_else(|| Error::Parse(format!("bad cycle notation {text:?}")))?;
            let points = body
                .0
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad point {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if !points.is_empty() {
                cycles.push(points);
            }
            rest = body.1.trim_start();
        }
        Permutation::from_cycles(degree, &cycles)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, point: usize) -> usize {
        self.images[point]
    }

    /// `self` then `other`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(
            self.degree(),
            other.degree(),
            "degree mismatch in permutation product"
        );
        Permutation {
            images: self.images.iter().map(|&i| other.images[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        Permutation { images }
    }

    pub fn pow(&self, exponent: i64) -> Permutation {
        let base = if exponent < 0 {
            self.inverse()
        } else {
            self.clone()
        };
        let mut k = exponent.unsigned_abs();
        let mut acc = Permutation::identity(self.degree());
        let mut square = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.compose(&square);
            }
            k >>= 1;
            if k > 0 {
                square = square.compose(&square);
            }
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut p = self.images[start];
            while p != start {
                seen[p] = true;
                cycle.push(p);
                p = self.images[p];
            }
            out.push(cycle);
        }
        out
    }

    pub fn is_even(&self) -> bool {
        self.cycles().iter().map(|c| c.len() - 1).sum::<usize>() % 2 == 0
    }

    pub fn order(&self) -> u64 {
        self.cycles()
            .iter()
            .fold(1u64, |acc, c| num_integer::lcm(acc, c.len() as u64))
    }

    pub fn first_moved_point(&self) -> Option<usize> {
        self.images
            .iter()
            .enumerate()
            .find(|&(i, &j)| i != j)
            .map(|(i, _)| i)
    }

    /// The same permutation acting on `degree ≥ self.degree()` points.
    pub fn extended(&self, degree: usize) -> Permutation {
        assert!(degree >= self.degree());
        let mut images = self.images.clone();
        images.extend(self.degree()..degree);
        Permutation { images }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(ToString::to_string).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

impl serde::Serialize for Permutation {
    /// Cycle notation, matching [`Permutation::parse_cycles`].
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{self}")
    }
}

#[derive(Clone, Debug)]
struct Level {
    base: usize,
    generators: Vec<Permutation>,
    orbit: Vec<usize>,
    /// `transversal[b]` maps the base point to `b`.
    transversal: HashMap<usize, Permutation>,
    checked: HashSet<(usize, usize)>,
}

impl Level {
    fn new(base: usize, degree: usize) -> Level {
        let mut transversal = HashMap::new();
        transversal.insert(base, Permutation::identity(degree));
        Level {
            base,
            generators: Vec::new(),
            orbit: vec![base],
            transversal,
            checked: HashSet::new(),
        }
    }

    fn add_generator(&mut self, g: Permutation) {
        self.generators.push(g);
        self.extend_orbit();
    }

    fn extend_orbit(&mut self) {
        let mut queue: VecDeque<usize> = self.orbit.iter().copied().collect();
        while let Some(b) = queue.pop_front() {
            for s in &self.generators {
                let c = s.apply(b);
                if !self.transversal.contains_key(&c) {
                    let u = self.transversal[&b].compose(s);
                    self.transversal.insert(c, u);
                    self.orbit.push(c);
                    queue.push_back(c);
                }
            }
        }
    }
}

/// Base and strong generating set.
#[derive(Clone, Debug)]
pub struct StabChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabChain {
    pub fn new(degree: usize, generators: &[Permutation]) -> StabChain {
        let mut chain = StabChain {
            degree,
            levels: Vec::new(),
        };
        let strong: Vec<Permutation> = generators
            .iter()
            .filter(|g| !g.is_identity())
            .cloned()
            .collect();
        for g in &strong {
            if chain.levels.iter().all(|l| g.apply(l.base) == l.base) {
                let base = g.first_moved_point().expect("non-identity");
                chain.levels.push(Level::new(base, degree));
            }
        }
        for g in &strong {
            for i in 0..chain.levels.len() {
                chain.levels[i].generators.push(g.clone());
                if g.apply(chain.levels[i].base) != chain.levels[i].base {
                    break;
                }
            }
        }
        for level in &mut chain.levels {
            level.extend_orbit();
        }
        chain.complete();
        chain
    }

    fn complete(&mut self) {
        let mut i = self.levels.len() as isize - 1;
        while i >= 0 {
            let level = i as usize;
            match self.check_level(level) {
                Some(restart) => i = restart as isize,
                None => i -= 1,
            }
        }
    }

    /// Sifts Schreier generators of `level`; on failure adds the residue and
    /// returns the level to resume from.
    fn check_level(&mut self, level: usize) -> Option<usize> {
        let mut idx = 0;
        while idx < self.levels[level].orbit.len() {
            let b = self.levels[level].orbit[idx];
            for s_idx in 0..self.levels[level].generators.len() {
                if !self.levels[level].checked.insert((b, s_idx)) {
                    continue;
                }
                let lv = &self.levels[level];
                let s = &lv.generators[s_idx];
                let bs = s.apply(b);
                let h = lv.transversal[&b]
                    .compose(s)
                    .compose(&lv.transversal[&bs].inverse());
                if h.is_identity() {
                    continue;
                }
                let (residue, depth) = self.sift(h, level + 1);
                if residue.is_identity() {
                    continue;
                }
                if depth == self.levels.len() {
                    let base = residue.first_moved_point().expect("non-identity");
                    self.levels.push(Level::new(base, self.degree));
                }
                for l in level + 1..=depth {
                    self.levels[l].add_generator(residue.clone());
                }
                return Some(depth);
            }
            idx += 1;
        }
        None
    }

    /// Returns the residue and the level at which sifting stopped.
    fn sift(&self, mut g: Permutation, from: usize) -> (Permutation, usize) {
        for (j, level) in self.levels.iter().enumerate().skip(from) {
            let b = g.apply(level.base);
            match level.transversal.get(&b) {
                Some(u) => g = g.compose(&u.inverse()),
                None => return (g, j),
            }
        }
        (g, self.levels.len())
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .map(|l| BigUint::from(l.orbit.len()))
            .product()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        self.sift(g.clone(), 0).0.is_identity()
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }
}

/// A permutation group given by generators; the stabilizer chain is built
/// once on first use (or by [`PermGroup::finalize`]) and then shared.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    name: String,
    chain: OnceLock<StabChain>,
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<PermGroup> {
        PermGroup::named(degree, generators, String::new())
    }

    pub fn named(
        degree: usize,
        generators: Vec<Permutation>,
        name: impl Into<String>,
    ) -> Result<PermGroup> {
        if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
            return Err(Error::DegreeMismatch {
                expected: degree,
                found: g.degree(),
            });
        }
        Ok(PermGroup {
            degree,
            generators,
            name: name.into(),
            chain: OnceLock::new(),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Builds the stabilizer chain; later calls are free.
    pub fn finalize(&self) -> &StabChain {
        self.chain
            .get_or_init(|| StabChain::new(self.degree, &self.generators))
    }

    pub fn order(&self) -> BigUint {
        self.finalize().order()
    }

    pub fn contains(&self, g: &Permutation) -> Result<bool> {
        if g.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: g.degree(),
            });
        }
        Ok(self.finalize().contains(g))
    }

    /// The subgroup generated by `generators` (same degree).
    pub fn subgroup(&self, generators: Vec<Permutation>) -> Result<PermGroup> {
        PermGroup::new(self.degree, generators)
    }

    /// All elements in lexicographic order of their image arrays.
    pub fn elements(&self) -> Vec<Permutation> {
        let mut seen: HashSet<Permutation> = HashSet::new();
        let id = Permutation::identity(self.degree);
        let mut queue = VecDeque::from([id.clone()]);
        seen.insert(id);
        while let Some(p) = queue.pop_front() {
            for g in &self.generators {
                let q = p.compose(g);
                if seen.insert(q.clone()) {
                    queue.push_back(q);
                }
            }
        }
        let mut out: Vec<Permutation> = seen.into_iter().collect();
        out.sort();
        out
    }

    pub fn is_cyclic(&self) -> bool {
        let order = self.order();
        self.elements()
            .iter()
            .any(|g| BigUint::from(g.order()) == order)
    }

    pub fn trivial(degree: usize) -> PermGroup {
        PermGroup::named(degree, vec![], "C1").expect("no generators")
    }

    pub fn symmetric(n: usize) -> PermGroup {
        let name = format!("S{n}");
        if n < 2 {
            return PermGroup::named(n, vec![], name).expect("no generators");
        }
        let t = Permutation::from_cycles(n, &[vec![0, 1]]).expect("valid");
        let c = Permutation::from_cycles(n, &[(0..n).collect()]).expect("valid");
        PermGroup::named(n, vec![t, c], name).expect("same degree")
    }

    pub fn alternating(n: usize) -> PermGroup {
        let name = format!("A{n}");
        if n < 3 {
            return PermGroup::named(n, vec![], name).expect("no generators");
        }
        let three = Permutation::from_cycles(n, &[vec![0, 1, 2]]).expect("valid");
        let long: Vec<usize> = if n % 2 == 1 {
            (0..n).collect()
        } else {
            (1..n).collect()
        };
        let long = Permutation::from_cycles(n, &[long]).expect("valid");
        PermGroup::named(n, vec![three, long], name).expect("same degree")
    }

    /// `C_n` acting regularly on `n` points.
    pub fn cyclic(n: usize) -> Result<PermGroup> {
        if n == 0 {
            return Err(Error::InvalidArgument("C0 is not a finite group".into()));
        }
        let c = Permutation::from_cycles(n, &[(0..n).collect()])?;
        PermGroup::named(n, vec![c], format!("C{n}"))
    }

    /// Dihedral group of order `2n` acting on the vertices of an `n`-gon.
    pub fn dihedral(n: usize) -> Result<PermGroup> {
        if n < 3 {
            return Err(Error::InvalidArgument(
                "dihedral groups need n >= 3 for the n-gon action".into(),
            ));
        }
        let rotation = Permutation::new((0..n).map(|i| (i + 1) % n).collect())?;
        let reflection = Permutation::new((0..n).map(|i| (n - i) % n).collect())?;
        PermGroup::named(n, vec![rotation, reflection], format!("D{n}"))
    }

    /// `PSL(2, p)` acting on the projective line `{0, …, p-1, ∞ = p}`.
    pub fn psl2(p: usize) -> Result<PermGroup> {
        if p < 2
            || !(2..p)
                .take_while(|k| k * k <= p)
                .all(|k| !p.is_multiple_of(k))
        {
            return Err(Error::InvalidArgument(format!(
                "PSL2_{p}: {p} is not prime"
            )));
        }
        let inf = p;
        let translate = Permutation::new(
            (0..=p)
                .map(|x| if x == inf { inf } else { (x + 1) % p })
                .collect(),
        )?;
        let invert = Permutation::new(
            (0..=p)
                .map(|x| {
                    if x == inf {
                        0
                    } else if x == 0 {
                        inf
                    } else {
                        // -1/x
                        let inv = (1..p).find(|y| (x * y) % p == 1).expect("prime field");
                        (p - inv) % p
                    }
                })
                .collect(),
        )?;
        PermGroup::named(p + 1, vec![translate, invert], format!("PSL2_{p}"))
    }

    /// Parses target names such as `A5`, `S6`, `C12`, `D4`, `PSL2_7`.
    pub fn from_name(name: &str) -> Result<PermGroup> {
        let name = name.trim();
        let bad = || Error::Parse(format!("unknown target group {name:?}"));
        let number = |s: &str| s.parse::<usize>().map_err(|_| bad());
        if let Some(p) = name.strip_prefix("PSL2_") {
            return PermGroup::psl2(number(p)?);
        }
        let (head, tail) = name.split_at(name.chars().next().map_or(0, char::len_utf8));
        match head {
            "A" => Ok(PermGroup::alternating(number(tail)?)),
            "S" => Ok(PermGroup::symmetric(number(tail)?)),
            "C" => PermGroup::cyclic(number(tail)?),
            "D" => PermGroup::dihedral(number(tail)?),
            _ => Err(bad()),
        }
    }
}

/// Multiplication table of a finite group: `table[a][b]` is the index of `a·b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupTable {
    table: Vec<Vec<usize>>,
    identity: usize,
}

impl GroupTable {
    /// Checks closure, identity, inverses and associativity.
    pub fn new(table: Vec<Vec<usize>>) -> Result<GroupTable> {
        let n = table.len();
        if n == 0
            || table
                .iter()
                .any(|r| r.len() != n || r.iter().any(|&x| x >= n))
        {
            return Err(Error::InvalidArgument(
                "multiplication table must be square over 0..n".into(),
            ));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| Error::InvalidArgument("table has no identity".into()))?;
        for a in 0..n {
            if !(0..n).any(|b| table[a][b] == identity) {
                return Err(Error::InvalidArgument(format!(
                    "element {a} has no inverse"
                )));
            }
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidArgument("table is not associative".into()));
                    }
                }
            }
        }
        Ok(GroupTable { table, identity })
    }

    pub fn cyclic(n: usize) -> Result<GroupTable> {
        GroupTable::new(
            (0..n)
                .map(|a| (0..n).map(|b| (a + b) % n).collect())
                .collect(),
        )
    }

    /// `Q_8 = {±1, ±i, ±j, ±k}`, indexed `1, i, j, k, -1, -i, -j, -k`.
    pub fn quaternion() -> GroupTable {
        // unit products on {1, i, j, k}: (index, sign)
        const UNIT: [[(usize, bool); 4]; 4] = [
            [(0, false), (1, false), (2, false), (3, false)],
            [(1, false), (0, true), (3, false), (2, true)],
            [(2, false), (3, true), (0, true), (1, false)],
            [(3, false), (2, false), (1, true), (0, true)],
        ];
        let table = (0..8)
            .map(|a| {
                (0..8)
                    .map(|b| {
                        let (u, neg) = UNIT[a % 4][b % 4];
                        let neg = neg ^ (a >= 4) ^ (b >= 4);
                        u + if neg { 4 } else { 0 }
                    })
                    .collect()
            })
            .collect();
        GroupTable::new(table).expect("Q8 is a group")
    }

    /// Table of a permutation group over its elements in canonical order.
    pub fn from_perm_group(group: &PermGroup) -> GroupTable {
        let elements = group.elements();
        let index: HashMap<&Permutation, usize> =
            elements.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let table = elements
            .iter()
            .map(|a| elements.iter().map(|b| index[&a.compose(b)]).collect())
            .collect();
        GroupTable::new(table).expect("closed under composition")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }
}

/// An injective homomorphism from a finite group into `A_degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlternatingEmbedding {
    pub degree: usize,
    /// Image of each element, indexed like the source table.
    pub images: Vec<Permutation>,
}

/// Right regular representation, made even by adding a transposition on two
/// extra points to every odd image whenever some image is odd.
pub fn embed_in_alternating(group: &GroupTable) -> AlternatingEmbedding {
    let n = group.order();
    let regular: Vec<Permutation> = (0..n)
        .map(|g| Permutation {
            images: (0..n).map(|x| group.mul(x, g)).collect(),
        })
        .collect();
    if regular.iter().all(Permutation::is_even) {
        return AlternatingEmbedding {
            degree: n,
            images: regular,
        };
    }
    let degree = n + 2;
    let swap = Permutation::from_cycles(degree, &[vec![n, n + 1]]).expect("valid");
    let images = regular
        .into_iter()
        .map(|p| {
            let odd = !p.is_even();
            let p = p.extended(degree);
            if odd {
                p.compose(&swap)
            } else {
                p
            }
        })
        .collect();
    AlternatingEmbedding { degree, images }
}

/// `n! / 2` for `n ≥ 2`.
pub fn alternating_order(n: usize) -> BigUint {
    let fact: BigUint = (1..=n).map(BigUint::from).product();
    if n >= 2 {
        fact / 2u32
    } else {
        BigUint::one()
    }
}
