//! Integer polynomials: associated polynomials of cyclic words, cyclotomic
//! polynomials, cyclotomic-type classification and resultants against `tⁿ - 1`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::abelian::IntMatrix;
use crate::present::CyclicWordFamily;

/// Dense integer polynomial, constant term first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coefficients: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coefficients: Vec<BigInt>) -> IntPolynomial {
        while coefficients.last().is_some_and(Zero::is_zero) {
            coefficients.pop();
        }
        IntPolynomial { coefficients }
    }

    pub fn from_i64(coefficients: &[i64]) -> IntPolynomial {
        IntPolynomial::new(coefficients.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> IntPolynomial {
        IntPolynomial::default()
    }

    pub fn one() -> IntPolynomial {
        IntPolynomial::from_i64(&[1])
    }

    /// `c · t^k`
    pub fn monomial(k: usize, c: BigInt) -> IntPolynomial {
        let mut coefficients = vec![BigInt::zero(); k];
        coefficients.push(c);
        IntPolynomial::new(coefficients)
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    pub fn coefficient(&self, i: usize) -> BigInt {
        self.coefficients.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coefficients.last()
    }

    pub fn is_unit(&self) -> bool {
        self.coefficients.len() == 1 && self.coefficients[0].abs().is_one()
    }

    pub fn mul(&self, other: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || other.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coefficients.len() + other.coefficients.len() - 1];
        for (i, a) in self.coefficients.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coefficients.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }

    pub fn add(&self, other: &IntPolynomial) -> IntPolynomial {
        let len = self.coefficients.len().max(other.coefficients.len());
        IntPolynomial::new(
            (0..len)
                .map(|i| self.coefficient(i) + other.coefficient(i))
                .collect(),
        )
    }

    pub fn neg(&self) -> IntPolynomial {
        IntPolynomial {
            coefficients: self.coefficients.iter().map(|c| -c).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> IntPolynomial {
        (0..k).fold(IntPolynomial::one(), |acc, _| acc.mul(self))
    }

    /// Exact quotient by a divisor whose leading coefficient is `±1`;
    /// `None` if the division leaves a remainder.
    pub fn div_exact(&self, divisor: &IntPolynomial) -> Option<IntPolynomial> {
        let dd = divisor.degree()?;
        let lead = divisor.leading()?;
        assert!(lead.abs().is_one(), "division by a non-monic polynomial");
        if self.is_zero() {
            return Some(IntPolynomial::zero());
        }
        let sd = self.degree()?;
        if sd < dd {
            return None;
        }
        let mut rem = self.coefficients.clone();
        let mut quotient = vec![BigInt::zero(); sd - dd + 1];
        for k in (0..=sd - dd).rev() {
            let q = &rem[k + dd] * lead;
            if q.is_zero() {
                continue;
            }
            for (j, c) in divisor.coefficients.iter().enumerate() {
                rem[k + j] -= &q * c;
            }
            quotient[k] = q;
        }
        rem.iter()
            .all(Zero::is_zero)
            .then(|| IntPolynomial::new(quotient))
    }

    /// Index of the lowest nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coefficients.iter().position(|c| !c.is_zero())
    }

    fn shift_down(&self, k: usize) -> IntPolynomial {
        IntPolynomial::new(self.coefficients[k..].to_vec())
    }
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPolynomial({self})")
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coefficients.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative();
            let abs = c.abs();
            if first {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            first = false;
            let show_coeff = i == 0 || !abs.is_one();
            if show_coeff {
                write!(f, "{abs}")?;
            }
            match i {
                0 => {}
                1 => f.write_str("t")?,
                _ => write!(f, "t^{i}")?,
            }
        }
        Ok(())
    }
}

/// `a_i` = exponent sum of `x_i` in `v`, for `0 ≤ i < d`.
pub fn associated_polynomial(family: &CyclicWordFamily) -> IntPolynomial {
    IntPolynomial::from_i64(&family.v().abelianize())
}

/// Euler's totient.
pub fn totient(m: u64) -> u64 {
    let mut n = m;
    let mut result = m;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Cache of cyclotomic polynomials built by exact division.
#[derive(Default)]
pub struct CyclotomicCache {
    known: HashMap<u64, IntPolynomial>,
}

impl CyclotomicCache {
    /// `Φ_m = (t^m - 1) / ∏_{k | m, k < m} Φ_k`
    pub fn get(&mut self, m: u64) -> IntPolynomial {
        assert!(m >= 1, "cyclotomic index must be positive");
        if let Some(p) = self.known.get(&m) {
            return p.clone();
        }
        let mut phi =
            IntPolynomial::monomial(m as usize, BigInt::one()).add(&IntPolynomial::from_i64(&[-1]));
        for k in (1..m).filter(|k| m.is_multiple_of(*k)) {
            let divisor = self.get(k);
            phi = phi
                .div_exact(&divisor)
                .expect("Φ_k divides t^m - 1 for k | m");
        }
        self.known.insert(m, phi.clone());
        phi
    }
}

pub fn cyclotomic_polynomial(m: u64) -> IntPolynomial {
    CyclotomicCache::default().get(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CyclotomicKind {
    Zero,
    UnitMonomial,
    CyclotomicType,
    Other,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CyclotomicFactor {
    pub m: u64,
    pub multiplicity: u32,
}

/// `f = sign · t^shift · ∏ Φ_m^multiplicity` when `kind` is
/// `unit_monomial` (empty product) or `cyclotomic_type`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CyclotomicClassification {
    pub kind: CyclotomicKind,
    pub sign: i8,
    pub shift: usize,
    pub factors: Vec<CyclotomicFactor>,
}

impl CyclotomicClassification {
    /// Rebuilds `sign · t^shift · ∏ Φ_m^k`; `None` for `zero` and `other`.
    pub fn reconstruct(&self) -> Option<IntPolynomial> {
        match self.kind {
            CyclotomicKind::Zero | CyclotomicKind::Other => None,
            CyclotomicKind::UnitMonomial | CyclotomicKind::CyclotomicType => {
                let mut cache = CyclotomicCache::default();
                let mut acc = IntPolynomial::monomial(self.shift, BigInt::from(self.sign));
                for f in &self.factors {
                    acc = acc.mul(&cache.get(f.m).pow(f.multiplicity));
                }
                Some(acc)
            }
        }
    }
}

/// Decides whether `f` is `±tⁱ` times a product of cyclotomic polynomials.
///
/// Candidates are all `m ≤ 3·deg²` with `φ(m) ≤ deg`, tried in increasing
/// order with backtracking.
pub fn classify_cyclotomic_type(f: &IntPolynomial) -> CyclotomicClassification {
    let other = |shift| CyclotomicClassification {
        kind: CyclotomicKind::Other,
        sign: 0,
        shift,
        factors: vec![],
    };
    let Some(shift) = f.valuation() else {
        return CyclotomicClassification {
            kind: CyclotomicKind::Zero,
            sign: 0,
            shift: 0,
            factors: vec![],
        };
    };
    let g = f.shift_down(shift);
    let sign: i8 = if g.leading().expect("nonzero").is_negative() {
        -1
    } else {
        1
    };
    if g.is_unit() {
        return CyclotomicClassification {
            kind: CyclotomicKind::UnitMonomial,
            sign,
            shift,
            factors: vec![],
        };
    }
    // Every Φ_m is monic with constant term ±1.
    if !g.leading().expect("nonzero").abs().is_one() || !g.coefficient(0).abs().is_one() {
        return other(shift);
    }
    let deg = g.degree().expect("nonzero") as u64;
    let bound = 3 * deg * deg;
    let candidates: Vec<u64> = (1..=bound.max(1)).filter(|&m| totient(m) <= deg).collect();
    let mut cache = CyclotomicCache::default();
    let mut chosen = Vec::new();
    if !divide_out(&g, &candidates, 0, &mut cache, &mut chosen) {
        return other(shift);
    }
    let mut factors: Vec<CyclotomicFactor> = Vec::new();
    for m in chosen {
        match factors.last_mut() {
            Some(last) if last.m == m => last.multiplicity += 1,
            _ => factors.push(CyclotomicFactor { m, multiplicity: 1 }),
        }
    }
    let result = CyclotomicClassification {
        kind: CyclotomicKind::CyclotomicType,
        sign,
        shift,
        factors,
    };
    debug_assert_eq!(result.reconstruct().as_ref(), Some(f));
    result
}

fn divide_out(
    rem: &IntPolynomial,
    candidates: &[u64],
    start: usize,
    cache: &mut CyclotomicCache,
    chosen: &mut Vec<u64>,
) -> bool {
    if rem.is_unit() {
        return true;
    }
    let deg = rem.degree().unwrap_or(0) as u64;
    for (idx, &m) in candidates.iter().enumerate().skip(start) {
        if totient(m) > deg {
            continue;
        }
        let Some(quotient) = rem.div_exact(&cache.get(m)) else {
            continue;
        };
        chosen.push(m);
        if divide_out(&quotient, candidates, idx, cache, chosen) {
            return true;
        }
        chosen.pop();
        // Φ_m is irreducible and divides rem, so any factorization of rem
        // into cyclotomics uses it; skipping m cannot succeed.
        return false;
    }
    false
}

/// `Res(f, tⁿ - 1)` as the determinant of the Sylvester matrix.
pub fn resultant_with_cyclic(f: &IntPolynomial, n: usize) -> BigInt {
    assert!(n >= 1, "resultant with t^0 - 1 is undefined");
    let mut g = vec![BigInt::zero(); n + 1];
    g[0] = BigInt::from(-1);
    g[n] = BigInt::one();
    resultant(f, &IntPolynomial::new(g))
}

/// Resultant of two integer polynomials via the Sylvester determinant.
pub fn resultant(f: &IntPolynomial, g: &IntPolynomial) -> BigInt {
    let (Some(m), Some(n)) = (f.degree(), g.degree()) else {
        return BigInt::zero();
    };
    if m == 0 {
        return num_traits::pow(f.coefficient(0), n);
    }
    if n == 0 {
        return num_traits::pow(g.coefficient(0), m);
    }
    let size = m + n;
    let mut s = IntMatrix::zeros(size, size);
    for row in 0..n {
        for (k, c) in f.coefficients().iter().rev().enumerate() {
            s[(row, row + k)] = c.clone();
        }
    }
    for row in 0..m {
        for (k, c) in g.coefficients().iter().rev().enumerate() {
            s[(n + row, row + k)] = c.clone();
        }
    }
    s.determinant()
}

/// `|Res(f, tⁿ - 1)|` as a machine integer, when it fits.
pub fn resultant_magnitude_u64(f: &IntPolynomial, n: usize) -> Option<u64> {
    resultant_with_cyclic(f, n).abs().to_u64()
}
