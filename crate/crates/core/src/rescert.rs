//! Finite-index subgroups of free groups as coset tables, their preimages
//! under endomorphisms, the determinant test for ascending HNN extensions,
//! truncated Magnus expansions, and residual-finiteness certificates.
//!
//! Coset tables act on the right with basepoint 0: `tables[g][c]` is the
//! coset `c·x_g`. A word `u` lies in the subgroup iff `0·u = 0`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::abelian::{serialize_big, smith_normal_form, IntMatrix};
use crate::words::{Endomorphism, Naming, Word};
use crate::{Error, Result};

/// Default bound on the number of subgroups visited by [`pullback_orbit`].
pub const DEFAULT_ORBIT_BOUND: usize = 10_000;
/// Default largest truncation degree tried by [`separating_degree`].
pub const DEFAULT_MAX_DEGREE: usize = 16;
/// Longest fiber word produced while rewriting a witness.
pub const REWRITE_LENGTH_BOUND: u64 = 1 << 16;

/// A finite-index subgroup of `F_r`, stored as the transitive right action
/// of the generators on its cosets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteIndexSubgroup {
    tables: Vec<Vec<usize>>,
    index: usize,
}

/// JSON form: `{"index": m, "tables": {"a": [...], "b": [...]}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupFile {
    pub index: usize,
    pub tables: BTreeMap<String, Vec<usize>>,
}

impl FiniteIndexSubgroup {
    /// Each table must be a permutation of `0..index` and together they must
    /// act transitively.
    pub fn new(index: usize, tables: Vec<Vec<usize>>) -> Result<FiniteIndexSubgroup> {
        if index == 0 {
            return Err(Error::InvalidArgument(
                "a coset table needs at least one coset".into(),
            ));
        }
        for (g, t) in tables.iter().enumerate() {
            let mut seen = vec![false; index];
            if t.len() != index
                || !t
                    .iter()
                    .all(|&c| c < index && !std::mem::replace(&mut seen[c], true))
            {
                return Err(Error::InvalidArgument(format!(
                    "table {g} is not a permutation of 0..{index}"
                )));
            }
        }
        let subgroup = FiniteIndexSubgroup { tables, index };
        if subgroup.orbit_of_basepoint().len() != index {
            return Err(Error::InvalidArgument(
                "coset tables do not act transitively".into(),
            ));
        }
        Ok(subgroup)
    }

    /// `F_r` itself.
    pub fn whole(rank: usize) -> FiniteIndexSubgroup {
        FiniteIndexSubgroup {
            tables: vec![vec![0]; rank],
            index: 1,
        }
    }

    /// The kernel of `x_i ↦ weights[i]` into `Z/m`.
    pub fn kernel_of_functional(weights: &[u64], m: usize) -> Result<FiniteIndexSubgroup> {
        if m == 0 {
            return Err(Error::InvalidArgument("modulus must be positive".into()));
        }
        let tables: Vec<Vec<usize>> = weights
            .iter()
            .map(|&w| (0..m).map(|c| (c + (w % m as u64) as usize) % m).collect())
            .collect();
        let orbit = FiniteIndexSubgroup { tables, index: m }.orbit_of_basepoint();
        let tables = weights
            .iter()
            .map(|&w| {
                let pos: HashMap<usize, usize> =
                    orbit.iter().enumerate().map(|(i, &c)| (c, i)).collect();
                orbit
                    .iter()
                    .map(|&c| pos[&((c + (w % m as u64) as usize) % m)])
                    .collect()
            })
            .collect();
        Ok(FiniteIndexSubgroup {
            tables,
            index: orbit.len(),
        }
        .canonical())
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn rank(&self) -> usize {
        self.tables.len()
    }

    pub fn tables(&self) -> &[Vec<usize>] {
        &self.tables
    }

    fn inverse_tables(&self) -> Vec<Vec<usize>> {
        self.tables
            .iter()
            .map(|t| {
                let mut inv = vec![0; self.index];
                for (c, &d) in t.iter().enumerate() {
                    inv[d] = c;
                }
                inv
            })
            .collect()
    }

    fn orbit_of_basepoint(&self) -> Vec<usize> {
        let mut seen = vec![false; self.index];
        seen[0] = true;
        let mut order = vec![0];
        let mut k = 0;
        while k < order.len() {
            let c = order[k];
            for t in &self.tables {
                if !std::mem::replace(&mut seen[t[c]], true) {
                    order.push(t[c]);
                }
            }
            k += 1;
        }
        order
    }

    /// Coset reached from `coset` by reading `word`.
    pub fn act(&self, coset: usize, word: &Word) -> usize {
        let inverse = self.inverse_tables();
        word.letters().fold(coset, |c, (g, e)| {
            if e > 0 {
                self.tables[g.index()][c]
            } else {
                inverse[g.index()][c]
            }
        })
    }

    pub fn contains(&self, word: &Word) -> Result<bool> {
        if word.rank() != self.rank() {
            return Err(Error::RankMismatch {
                expected: self.rank(),
                found: word.rank(),
            });
        }
        Ok(self.act(0, word) == 0)
    }

    /// Breadth-first relabeling from the basepoint, visiting `x_0, x_0⁻¹,
    /// x_1, x_1⁻¹, …` in that order. Two tables describe the same subgroup
    /// iff their canonical forms are equal.
    pub fn canonical(&self) -> FiniteIndexSubgroup {
        let inverse = self.inverse_tables();
        let mut label = vec![usize::MAX; self.index];
        let mut order = vec![0];
        label[0] = 0;
        let mut queue = VecDeque::from([0]);
        while let Some(c) = queue.pop_front() {
            for (table, inv) in self.tables.iter().zip(&inverse) {
                for d in [table[c], inv[c]] {
                    if label[d] == usize::MAX {
                        label[d] = order.len();
                        order.push(d);
                        queue.push_back(d);
                    }
                }
            }
        }
        let tables = self
            .tables
            .iter()
            .map(|t| order.iter().map(|&c| label[t[c]]).collect())
            .collect();
        FiniteIndexSubgroup {
            tables,
            index: self.index,
        }
    }

    pub fn same_subgroup(&self, other: &FiniteIndexSubgroup) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn to_file(&self, naming: &Naming) -> SubgroupFile {
        SubgroupFile {
            index: self.index,
            tables: self
                .tables
                .iter()
                .enumerate()
                .map(|(g, t)| (naming.name(g).to_string(), t.clone()))
                .collect(),
        }
    }

    pub fn from_file(file: &SubgroupFile, naming: &Naming) -> Result<FiniteIndexSubgroup> {
        let tables = naming
            .names()
            .iter()
            .map(|name| {
                file.tables
                    .get(name)
                    .cloned()
                    .ok_or_else(|| Error::Parse(format!("no table for generator {name}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(extra) = file.tables.keys().find(|k| naming.index_of(k).is_none()) {
            return Err(Error::Parse(format!("table for unknown generator {extra}")));
        }
        FiniteIndexSubgroup::new(file.index, tables)
    }
}

/// `θ⁻¹(H)`: the stabilizer of the basepoint under `c ↦ c·θ(x_i)`,
/// restricted to the basepoint orbit.
pub fn preimage_subgroup(
    theta: &Endomorphism,
    h: &FiniteIndexSubgroup,
) -> Result<FiniteIndexSubgroup> {
    let composed = composed_action(theta, h)?;
    let orbit = composed.orbit_of_basepoint();
    let mut label = vec![usize::MAX; h.index];
    for (i, &c) in orbit.iter().enumerate() {
        label[c] = i;
    }
    let tables = composed
        .tables
        .iter()
        .map(|t| orbit.iter().map(|&c| label[t[c]]).collect())
        .collect();
    Ok(FiniteIndexSubgroup {
        tables,
        index: orbit.len(),
    }
    .canonical())
}

/// The action of `θ(x_i)` on all cosets of `H`; transitive iff
/// `[F : θ⁻¹(H)] = [F : H]`.
pub fn composed_action(
    theta: &Endomorphism,
    h: &FiniteIndexSubgroup,
) -> Result<FiniteIndexSubgroup> {
    if theta.rank() != h.rank() {
        return Err(Error::RankMismatch {
            expected: h.rank(),
            found: theta.rank(),
        });
    }
    let tables = theta
        .images()
        .iter()
        .map(|w| (0..h.index).map(|c| h.act(c, w)).collect())
        .collect();
    Ok(FiniteIndexSubgroup {
        tables,
        index: h.index,
    })
}

pub fn is_composed_action_transitive(
    theta: &Endomorphism,
    h: &FiniteIndexSubgroup,
) -> Result<bool> {
    let composed = composed_action(theta, h)?;
    Ok(composed.orbit_of_basepoint().len() == h.index)
}

/// `θ^{-k}(H) = θ^{-k-l}(H)` with `k` and `l > 0` minimal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PullbackOrbit {
    pub preperiod: usize,
    pub period: usize,
    /// Canonical tables of `θ^{-j}(H)` for `j < preperiod + period`.
    pub chain: Vec<FiniteIndexSubgroup>,
}

pub fn pullback_orbit(
    theta: &Endomorphism,
    h: &FiniteIndexSubgroup,
    bound: usize,
) -> Result<PullbackOrbit> {
    if theta.rank() != h.rank() {
        return Err(Error::RankMismatch {
            expected: h.rank(),
            found: theta.rank(),
        });
    }
    let mut seen: HashMap<FiniteIndexSubgroup, usize> = HashMap::new();
    let mut chain = Vec::new();
    let mut current = h.canonical();
    loop {
        if let Some(&first) = seen.get(&current) {
            return Ok(PullbackOrbit {
                preperiod: first,
                period: chain.len() - first,
                chain,
            });
        }
        if chain.len() >= bound {
            return Err(Error::BoundExceeded {
                bound: bound as u64,
                context: "pullback orbit".into(),
            });
        }
        seen.insert(current.clone(), chain.len());
        let next = preimage_subgroup(theta, &current)?;
        chain.push(std::mem::replace(&mut current, next));
    }
}

/// The least `l > 0` with `θ^{-l}(H) = H`, if the orbit has no preperiod.
pub fn prop61_check(
    theta: &Endomorphism,
    h: &FiniteIndexSubgroup,
    bound: usize,
) -> Result<Option<usize>> {
    let orbit = pullback_orbit(theta, h, bound)?;
    Ok((orbit.preperiod == 0).then_some(orbit.period))
}

/// All subgroups of `F_rank` of index exactly `index`, canonical and sorted.
///
/// Brute force over tuples of permutations; refuses when `(index!)^rank`
/// exceeds ten million.
pub fn enumerate_subgroups(rank: usize, index: usize) -> Result<Vec<FiniteIndexSubgroup>> {
    if index == 0 {
        return Ok(Vec::new());
    }
    let perms = permutations(index);
    let total = (perms.len() as f64).powi(rank as i32);
    if total > 1e7 {
        return Err(Error::BoundExceeded {
            bound: 10_000_000,
            context: format!("tuples of index-{index} tables"),
        });
    }
    let mut found = BTreeSet::new();
    let mut choice = vec![0usize; rank];
    loop {
        let tables: Vec<Vec<usize>> = choice.iter().map(|&i| perms[i].clone()).collect();
        let candidate = FiniteIndexSubgroup { tables, index };
        if candidate.orbit_of_basepoint().len() == index {
            found.insert(candidate.canonical());
        }
        let mut k = 0;
        loop {
            if k == rank {
                return Ok(found.into_iter().collect());
            }
            choice[k] += 1;
            if choice[k] < perms.len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// All subgroups of index at most `max_index`.
pub fn subgroups_up_to_index(rank: usize, max_index: usize) -> Result<Vec<FiniteIndexSubgroup>> {
    let mut out = Vec::new();
    for m in 1..=max_index {
        out.extend(enumerate_subgroups(rank, m)?);
    }
    Ok(out)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// `θ̄` with column `i` the exponent vector of `θ(x_i)`, and its determinant.
pub fn abelianized_matrix(theta: &Endomorphism) -> (IntMatrix, BigInt) {
    let r = theta.rank();
    let columns: Vec<Vec<i64>> = theta.images().iter().map(Word::abelianize).collect();
    let m = IntMatrix::from_fn(r, r, |i, j| columns[j][i]);
    let det = m.determinant();
    (m, det)
}

fn is_prime(p: u64) -> bool {
    p >= 2
        && (2..)
            .take_while(|d| d * d <= p)
            .all(|d| !p.is_multiple_of(d))
}

/// The smallest prime not dividing `det`.
pub fn choose_prime(det: &BigInt) -> Result<u64> {
    if det.is_zero() {
        return Err(Error::SingularAbelianization {
            invariant_factors: Vec::new(),
        });
    }
    let p = (2u64..)
        .filter(|&p| is_prime(p))
        .find(|&p| !det.is_multiple_of(&BigInt::from(p)))
        .expect("primes are unbounded");
    Ok(p)
}

/// `θ̄` reduced mod `p`: determinant residue and a kernel basis written as
/// words.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModPAnalysis {
    pub prime: u64,
    pub det_mod_p: u64,
    pub invertible: bool,
    pub kernel: Vec<Vec<u64>>,
    pub kernel_words: Vec<String>,
}

pub fn mod_p_analysis(theta: &Endomorphism, naming: &Naming, p: u64) -> Result<ModPAnalysis> {
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    let (m, det) = abelianized_matrix(theta);
    let det_mod_p = det
        .mod_floor(&BigInt::from(p))
        .to_u64()
        .expect("residue fits");
    let kernel = m.kernel_mod_p(p);
    let kernel_words = kernel
        .iter()
        .map(|v| {
            let letters = v
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != 0)
                .map(|(i, &e)| (i, e as i64));
            Word::reduce(theta.rank(), letters).map(|w| naming.format(&w))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ModPAnalysis {
        prime: p,
        det_mod_p,
        invertible: det_mod_p != 0,
        kernel,
        kernel_words,
    })
}

/// An element of the free associative algebra over `F_p` in `X_0, X_1, …`,
/// truncated below degree `D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    prime: u64,
    degree: usize,
    coefficients: BTreeMap<Vec<usize>, u64>,
}

impl TruncatedSeries {
    pub fn one(prime: u64, degree: usize) -> TruncatedSeries {
        let mut coefficients = BTreeMap::new();
        if degree > 0 {
            coefficients.insert(Vec::new(), 1 % prime);
        }
        TruncatedSeries {
            prime,
            degree,
            coefficients,
        }
    }

    /// `(1 + X_g)^e`, for any integer `e`.
    pub fn generator_power(g: usize, e: i64, prime: u64, degree: usize) -> TruncatedSeries {
        // Coefficients of (1 + X)^e in F_p[X]/(X^D), by binary exponentiation.
        let p = prime as u128;
        let mul = |a: &[u128], b: &[u128]| {
            let mut c = vec![0u128; degree];
            for (i, &x) in a.iter().enumerate() {
                for (j, &y) in b.iter().enumerate().take(degree - i) {
                    c[i + j] = (c[i + j] + x * y) % p;
                }
            }
            c
        };
        let mut base = vec![0u128; degree];
        base[0] = 1 % p;
        if degree > 1 {
            if e >= 0 {
                base[1] = 1 % p;
            } else {
                // (1 + X)^{-1} = Σ (-1)^k X^k.
                for (k, b) in base.iter_mut().enumerate() {
                    *b = if k % 2 == 0 { 1 % p } else { p - 1 };
                }
            }
        }
        let mut acc = vec![0u128; degree];
        acc[0] = 1 % p;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = mul(&acc, &base);
            }
            base = mul(&base, &base);
            k >>= 1;
        }
        let coefficients = acc
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c != 0)
            .map(|(k, c)| (vec![g; k], c as u64))
            .collect();
        TruncatedSeries {
            prime,
            degree,
            coefficients,
        }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficient(&self, monomial: &[usize]) -> u64 {
        self.coefficients.get(monomial).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], u64)> {
        self.coefficients.iter().map(|(m, &c)| (m.as_slice(), c))
    }

    pub fn is_one(&self) -> bool {
        *self == TruncatedSeries::one(self.prime, self.degree)
    }

    /// Lowest positive degree with a nonzero coefficient.
    pub fn lowest_nontrivial_degree(&self) -> Option<usize> {
        self.coefficients
            .keys()
            .map(Vec::len)
            .filter(|&k| k > 0)
            .min()
    }

    pub fn mul(&self, other: &TruncatedSeries) -> TruncatedSeries {
        assert_eq!(
            (self.prime, self.degree),
            (other.prime, other.degree),
            "incompatible series"
        );
        let p = self.prime as u128;
        let mut out: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
        for (a, &x) in &self.coefficients {
            for (b, &y) in &other.coefficients {
                if a.len() + b.len() >= self.degree {
                    continue;
                }
                let mut m = a.clone();
                m.extend_from_slice(b);
                let entry = out.entry(m).or_insert(0);
                *entry = ((*entry as u128 + x as u128 * y as u128) % p) as u64;
            }
        }
        out.retain(|_, c| *c != 0);
        TruncatedSeries {
            prime: self.prime,
            degree: self.degree,
            coefficients: out,
        }
    }

    /// Inverse of a series with constant term 1: `Σ_{k<D} (1 - s)^k`.
    pub fn inverse(&self) -> Option<TruncatedSeries> {
        if self.coefficient(&[]) != 1 % self.prime {
            return None;
        }
        let one = TruncatedSeries::one(self.prime, self.degree);
        let mut nilpotent = self.clone();
        nilpotent.coefficients.remove(&Vec::new());
        for c in nilpotent.coefficients.values_mut() {
            *c = (self.prime - *c) % self.prime;
        }
        let mut acc = one.clone();
        let mut power = one;
        for _ in 1..self.degree {
            power = power.mul(&nilpotent);
            acc = acc.add(&power);
        }
        Some(acc)
    }

    fn add(&self, other: &TruncatedSeries) -> TruncatedSeries {
        let mut out = self.coefficients.clone();
        for (m, &c) in &other.coefficients {
            let entry = out.entry(m.clone()).or_insert(0);
            *entry = (*entry + c) % self.prime;
        }
        out.retain(|_, c| *c != 0);
        TruncatedSeries {
            prime: self.prime,
            degree: self.degree,
            coefficients: out,
        }
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficients.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .coefficients
            .iter()
            .map(|(m, &c)| {
                let mono: String = m.iter().map(|g| format!("X{g}")).collect();
                match (c, mono.is_empty()) {
                    (_, true) => c.to_string(),
                    (1, false) => mono,
                    _ => format!("{c}{mono}"),
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// The image of `g` under `x_i ↦ 1 + X_i` in the truncated algebra.
pub fn magnus_expand(g: &Word, prime: u64, degree: usize) -> Result<TruncatedSeries> {
    if !is_prime(prime) {
        return Err(Error::InvalidArgument(format!("{prime} is not prime")));
    }
    if degree < 2 {
        return Err(Error::InvalidArgument(
            "truncation degree must be at least 2".into(),
        ));
    }
    Ok(g.runs()
        .iter()
        .fold(TruncatedSeries::one(prime, degree), |acc, &(x, e)| {
            acc.mul(&TruncatedSeries::generator_power(
                x.index(),
                e,
                prime,
                degree,
            ))
        }))
}

/// The least `D` with `magnus_expand(g, p, D) ≠ 1`.
pub fn separating_degree(g: &Word, prime: u64, max_degree: usize) -> Result<usize> {
    if g.is_identity() {
        return Err(Error::IdentityWitness(g.to_string()));
    }
    for d in 2..=max_degree {
        if !magnus_expand(g, prime, d)?.is_one() {
            return Ok(d);
        }
    }
    Err(Error::BoundExceeded {
        bound: max_degree as u64,
        context: format!("no truncation degree up to {max_degree} separates {g} mod {prime}"),
    })
}

/// How one witness is separated from the identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessSeparation {
    /// Nonzero `t`-exponent: detected in `Z/modulus` through `t ↦ 1`.
    Cyclic { t_exponent: i64, modulus: u64 },
    /// `t^M g t^{-M}` lies in the fiber and survives truncation degree `D`.
    Fiber {
        conjugator_exponent: u64,
        fiber_word: String,
        degree: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessRecord {
    pub witness: String,
    #[serde(flatten)]
    pub separation: WitnessSeparation,
}

/// Data instantiating the determinant criterion for `F_r *_θ`, with one
/// separation record per witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RFCertificate {
    pub endomorphism: String,
    /// Rows of `θ̄`; column `i` is the exponent vector of `θ(x_i)`.
    pub matrix: Vec<Vec<i64>>,
    #[serde(serialize_with = "serialize_big")]
    pub determinant: BigInt,
    pub prime: u64,
    /// Smaller primes dividing the determinant.
    pub excluded_primes: Vec<u64>,
    pub det_mod_p: u64,
    pub invertible_mod_p: bool,
    pub witnesses: Vec<WitnessRecord>,
}

/// Conjugates a `t`-exponent-zero word over `x_0, …, x_{r-1}, t` into the
/// fiber: returns `(M, f)` with `t^M g t^{-M} = f ∈ F_r`.
pub fn rewrite_into_fiber(theta: &Endomorphism, g: &Word) -> Result<(u64, Word)> {
    let r = theta.rank();
    if g.rank() != r + 1 {
        return Err(Error::RankMismatch {
            expected: r + 1,
            found: g.rank(),
        });
    }
    if g.exponent_sum(r) != 0 {
        return Err(Error::InvalidArgument(format!(
            "{g} has nonzero t-exponent"
        )));
    }
    // g = Π t^{h_j} u_j t^{-h_j}, with h_j the t-exponent before fiber piece u_j.
    let mut pieces: Vec<(i64, Vec<(usize, i64)>)> = vec![(0, Vec::new())];
    let mut h = 0;
    for &(x, e) in g.runs() {
        if x.index() == r {
            h += e;
            pieces.push((h, Vec::new()));
        } else {
            pieces.last_mut().expect("nonempty").1.push((x.index(), e));
        }
    }
    let shift = (-pieces.iter().map(|&(h, _)| h).min().unwrap_or(0)).max(0);
    let mut fiber = Word::identity(r);
    for (h, letters) in pieces {
        if letters.is_empty() {
            continue;
        }
        let mut piece = Word::reduce(r, letters)?;
        for _ in 0..(h + shift) {
            piece = theta.apply(&piece)?;
            if piece.len() > REWRITE_LENGTH_BOUND {
                return Err(Error::BoundExceeded {
                    bound: REWRITE_LENGTH_BOUND,
                    context: "witness rewriting".into(),
                });
            }
        }
        fiber = fiber.mul(&piece);
        if fiber.len() > REWRITE_LENGTH_BOUND {
            return Err(Error::BoundExceeded {
                bound: REWRITE_LENGTH_BOUND,
                context: "witness rewriting".into(),
            });
        }
    }
    Ok((shift as u64, fiber))
}

/// Builds the certificate; `naming` names `x_0, …, x_{r-1}` and the
/// witnesses are words over those generators followed by `t`.
pub fn rf_certificate(
    theta: &Endomorphism,
    naming: &Naming,
    witnesses: &[Word],
) -> Result<RFCertificate> {
    rf_certificate_with_prime(theta, naming, witnesses, None)
}

/// As [`rf_certificate`], but with a caller-chosen prime, which must not
/// divide the determinant.
pub fn rf_certificate_with_prime(
    theta: &Endomorphism,
    naming: &Naming,
    witnesses: &[Word],
    prime: Option<u64>,
) -> Result<RFCertificate> {
    let r = theta.rank();
    let (m, det) = abelianized_matrix(theta);
    if det.is_zero() {
        let form = smith_normal_form(&m);
        return Err(Error::SingularAbelianization {
            invariant_factors: form
                .invariant_factors
                .iter()
                .map(ToString::to_string)
                .collect(),
        });
    }
    let prime = match prime {
        Some(p) if !is_prime(p) => return Err(Error::InvalidArgument(format!("{p} is not prime"))),
        Some(p) => p,
        None => choose_prime(&det)?,
    };
    let excluded_primes = (2..prime)
        .filter(|&q| is_prime(q) && det.is_multiple_of(&BigInt::from(q)))
        .collect();
    let det_mod_p = det
        .mod_floor(&BigInt::from(prime))
        .to_u64()
        .expect("residue fits");
    let invertible_mod_p = m.kernel_mod_p(prime).is_empty();
    if det_mod_p == 0 || !invertible_mod_p {
        return Err(Error::Verification(format!(
            "θ̄ is not invertible mod {prime}"
        )));
    }
    let full = naming.extended("t")?;
    let records = witnesses
        .iter()
        .map(|w| {
            if w.rank() != r + 1 {
                return Err(Error::RankMismatch {
                    expected: r + 1,
                    found: w.rank(),
                });
            }
            if w.is_identity() {
                return Err(Error::IdentityWitness(full.format(w)));
            }
            let t_exponent = w.exponent_sum(r);
            let separation = if t_exponent != 0 {
                let modulus = (2..)
                    .find(|&q: &u64| t_exponent.unsigned_abs() % q != 0)
                    .expect("some modulus");
                WitnessSeparation::Cyclic {
                    t_exponent,
                    modulus,
                }
            } else {
                let (shift, fiber) = rewrite_into_fiber(theta, w)?;
                if fiber.is_identity() {
                    return Err(Error::IdentityWitness(full.format(w)));
                }
                let degree = separating_degree(&fiber, prime, DEFAULT_MAX_DEGREE)?;
                WitnessSeparation::Fiber {
                    conjugator_exponent: shift,
                    fiber_word: naming.format(&fiber),
                    degree,
                }
            };
            Ok(WitnessRecord {
                witness: full.format(w),
                separation,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RFCertificate {
        endomorphism: naming.format_endomorphism(theta),
        matrix: (0..r)
            .map(|i| {
                m.row(i)
                    .iter()
                    .map(|x| x.to_i64().expect("exponent sums fit"))
                    .collect()
            })
            .collect(),
        determinant: det.clone(),
        prime,
        excluded_primes,
        det_mod_p,
        invertible_mod_p,
        witnesses: records,
    })
}

impl RFCertificate {
    /// Re-derives every field from `θ` along independent paths: cofactor
    /// determinant, trial division for the prime, and direct Magnus
    /// expansion of each fiber word.
    pub fn recheck(&self, theta: &Endomorphism, naming: &Naming) -> Result<()> {
        let r = theta.rank();
        for (j, image) in theta.images().iter().enumerate() {
            for i in 0..r {
                if self.matrix[i][j] != image.exponent_sum(i) {
                    return Err(Error::Verification(format!("matrix entry ({i}, {j})")));
                }
            }
        }
        if cofactor_determinant(&self.matrix) != self.determinant {
            return Err(Error::Verification("determinant".into()));
        }
        let d = self.determinant.abs();
        let expected: Vec<u64> = (2..self.prime)
            .filter(|&q| is_prime(q) && d.is_multiple_of(&BigInt::from(q)))
            .collect();
        if !is_prime(self.prime)
            || d.is_multiple_of(&BigInt::from(self.prime))
            || self.excluded_primes != expected
        {
            return Err(Error::Verification("prime choice".into()));
        }
        for record in &self.witnesses {
            if let WitnessSeparation::Fiber {
                fiber_word, degree, ..
            } = &record.separation
            {
                let f = naming.parse(fiber_word)?;
                let ok = !magnus_expand(&f, self.prime, *degree)?.is_one()
                    && (*degree == 2 || magnus_expand(&f, self.prime, degree - 1)?.is_one());
                if !ok {
                    return Err(Error::Verification(format!(
                        "separating degree of {fiber_word}"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn cofactor_determinant(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    (0..n).fold(BigInt::zero(), |acc, j| {
        let minor: Vec<Vec<i64>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, &x)| x)
                    .collect()
            })
            .collect();
        let term = BigInt::from(m[0][j]) * cofactor_determinant(&minor);
        if j % 2 == 0 {
            acc + term
        } else {
            acc - term
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Naming {
        Naming::new(["a", "b"]).unwrap()
    }

    fn theta() -> Endomorphism {
        ab().parse_endomorphism("a->b; b->a^2").unwrap()
    }

    #[test]
    fn preimage_examples() {
        let h = FiniteIndexSubgroup::kernel_of_functional(&[1, 0], 3).unwrap();
        assert!(preimage_subgroup(&Endomorphism::identity(2), &h)
            .unwrap()
            .same_subgroup(&h));
        let pre = preimage_subgroup(&theta(), &h).unwrap();
        assert_eq!(
            pre,
            FiniteIndexSubgroup::kernel_of_functional(&[0, 2], 3).unwrap()
        );
        assert_ne!(pre, h);
        assert_eq!(preimage_subgroup(&theta(), &pre).unwrap(), h);
    }

    #[test]
    fn pullback_examples() {
        let h = FiniteIndexSubgroup::kernel_of_functional(&[1, 0], 3).unwrap();
        let orbit = pullback_orbit(&theta(), &h, DEFAULT_ORBIT_BOUND).unwrap();
        assert_eq!((orbit.preperiod, orbit.period), (0, 2));
        let orbit = pullback_orbit(&Endomorphism::identity(2), &h, DEFAULT_ORBIT_BOUND).unwrap();
        assert_eq!((orbit.preperiod, orbit.period), (0, 1));
        let swap = ab().parse_endomorphism("a->b; b->a").unwrap();
        let h2 = FiniteIndexSubgroup::kernel_of_functional(&[1, 0], 2).unwrap();
        let orbit = pullback_orbit(&swap, &h2, DEFAULT_ORBIT_BOUND).unwrap();
        assert_eq!((orbit.preperiod, orbit.period), (0, 2));
        assert_eq!(
            prop61_check(&theta(), &h, DEFAULT_ORBIT_BOUND).unwrap(),
            Some(2)
        );
    }

    #[test]
    fn strict_preperiod_exists() {
        let all = subgroups_up_to_index(2, 4).unwrap();
        let strict = all
            .iter()
            .filter(|h| {
                prop61_check(&theta(), h, DEFAULT_ORBIT_BOUND)
                    .unwrap()
                    .is_none()
            })
            .count();
        assert!(strict > 0);
    }

    #[test]
    fn subgroup_counts() {
        let counts: Vec<usize> = (1..=4)
            .map(|m| enumerate_subgroups(2, m).unwrap().len())
            .collect();
        assert_eq!(counts, [1, 3, 13, 71]);
    }

    #[test]
    fn determinant_examples() {
        let (m, det) = abelianized_matrix(&theta());
        assert_eq!(m, IntMatrix::from_rows(&[vec![0, 2], vec![1, 0]]));
        assert_eq!(det, BigInt::from(-2));
        assert_eq!(
            abelianized_matrix(&Endomorphism::identity(3)).1,
            BigInt::from(1)
        );
        assert_eq!(choose_prime(&BigInt::from(-2)).unwrap(), 3);
        assert_eq!(choose_prime(&BigInt::from(1)).unwrap(), 2);
        assert_eq!(choose_prime(&BigInt::from(-30)).unwrap(), 7);
        assert!(choose_prime(&BigInt::from(0)).is_err());
    }

    #[test]
    fn grigorchuk_mod_two() {
        let naming = Naming::new(["a", "c", "d"]).unwrap();
        let sigma = naming.parse_endomorphism("a->a c a; c->d c; d->c").unwrap();
        let analysis = mod_p_analysis(&sigma, &naming, 2).unwrap();
        assert!(!analysis.invertible);
        assert_eq!(analysis.kernel, [vec![1, 0, 1]]);
        assert_eq!(analysis.kernel_words, ["a d"]);
    }

    #[test]
    fn magnus_examples() {
        let n = Naming::indexed(2);
        let x0 = magnus_expand(&n.parse("x0").unwrap(), 3, 4).unwrap();
        assert_eq!(x0.to_string(), "1 + X0");
        assert!(magnus_expand(&n.parse("x0 x0^-1").unwrap(), 3, 4)
            .unwrap()
            .is_one());
        let c = magnus_expand(&n.parse("x0 x1 x0^-1 x1^-1").unwrap(), 3, 3).unwrap();
        assert_eq!(c.coefficient(&[0, 1]), 1);
        assert_eq!(c.coefficient(&[1, 0]), 2);
        assert_eq!(c.terms().count(), 3);
    }

    #[test]
    fn separating_examples() {
        let n = Naming::indexed(2);
        let deg = |s: &str| separating_degree(&n.parse(s).unwrap(), 3, 16).unwrap();
        assert_eq!(deg("x0"), 2);
        assert_eq!(deg("x0 x1 x0^-1 x1^-1"), 3);
        assert_eq!(deg("x0 x1 x0^-1 x1^-1 x0 x1 x0 x1^-1 x0^-2"), 4);
    }

    #[test]
    fn certificate_examples() {
        let full = ab().extended("t").unwrap();
        let w = |s: &str| full.parse(s).unwrap();
        let cert = rf_certificate(&theta(), &ab(), &[w("t"), w("a"), w("t a t^-1 a^-1")]).unwrap();
        assert_eq!(cert.determinant, BigInt::from(-2));
        assert_eq!(cert.prime, 3);
        assert_eq!(
            cert.witnesses[0].separation,
            WitnessSeparation::Cyclic {
                t_exponent: 1,
                modulus: 2
            }
        );
        assert_eq!(
            cert.witnesses[1].separation,
            WitnessSeparation::Fiber {
                conjugator_exponent: 0,
                fiber_word: "a".into(),
                degree: 2
            }
        );
        assert_eq!(
            cert.witnesses[2].separation,
            WitnessSeparation::Fiber {
                conjugator_exponent: 0,
                fiber_word: "b a^-1".into(),
                degree: 2
            }
        );
        cert.recheck(&theta(), &ab()).unwrap();
        assert!(matches!(
            rf_certificate(&theta(), &ab(), &[w("1")]),
            Err(Error::IdentityWitness(_))
        ));
    }

    #[test]
    fn negative_conjugator() {
        let full = ab().extended("t").unwrap();
        let (shift, fiber) =
            rewrite_into_fiber(&theta(), &full.parse("t^-1 a t").unwrap()).unwrap();
        assert_eq!(shift, 1);
        assert_eq!(ab().format(&fiber), "a");
    }

    #[test]
    fn subgroup_file_round_trip() {
        let h = FiniteIndexSubgroup::kernel_of_functional(&[1, 2], 3).unwrap();
        let file = h.to_file(&ab());
        assert_eq!(FiniteIndexSubgroup::from_file(&file, &ab()).unwrap(), h);
    }
}
