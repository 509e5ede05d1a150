//! Exact integer matrices, Smith normal form with unimodular transforms, and
//! abelianizations of finite presentations.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::present::Presentation;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_fn<F, T>(rows: usize, cols: usize, mut f: F) -> IntMatrix
    where
        F: FnMut(usize, usize) -> T,
        T: Into<BigInt>,
    {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j).into());
            }
        }
        IntMatrix { rows, cols, data }
    }

    /// Panics if the rows have different lengths.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> IntMatrix {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        IntMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> IntMatrix {
        IntMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(
            self.cols, other.rows,
            "dimension mismatch in matrix product"
        );
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Fraction-free (Bareiss) determinant. Panics on non-square input.
    pub fn determinant(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                let Some(swap) = (k + 1..n).find(|&i| !a[(i, k)].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap_rows(k, swap);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                    a[(i, j)] = v / &prev;
                }
                a[(i, k)] = BigInt::zero();
            }
            prev = a[(k, k)].clone();
        }
        sign * &a[(n - 1, n - 1)]
    }

    /// Circulant whose row `i` holds the coefficients of `tⁱ · f(t) mod (tⁿ - 1)`.
    pub fn circulant(coefficients: &[BigInt], n: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(n, n);
        if n == 0 {
            return m;
        }
        for i in 0..n {
            for (k, c) in coefficients.iter().enumerate() {
                m[(i, (k + i) % n)] += c;
            }
        }
        m
    }

    /// Basis of the right kernel of the matrix over `F_p`, entries in `0..p`.
    pub fn kernel_mod_p(&self, p: u64) -> Vec<Vec<u64>> {
        let pb = BigInt::from(p);
        let mut a: Vec<Vec<u64>> = (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|x| x.mod_floor(&pb).to_u64().expect("residue fits"))
                    .collect()
            })
            .collect();
        let mut pivot_cols = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            let Some(pr) = (r..self.rows).find(|&i| a[i][c] != 0) else {
                continue;
            };
            a.swap(r, pr);
            let inv = mod_inverse(a[r][c], p);
            for x in a[r].iter_mut() {
                *x = *x * inv % p;
            }
            for i in 0..self.rows {
                if i != r && a[i][c] != 0 {
                    let f = a[i][c];
                    let pivot_row = a[r].clone();
                    for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                        *x = (*x + p * p - f * y % p) % p;
                    }
                }
            }
            pivot_cols.push(c);
            r += 1;
            if r == self.rows {
                break;
            }
        }
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_cols.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![0u64; self.cols];
                v[fc] = 1;
                for (row, &pc) in pivot_cols.iter().enumerate() {
                    v[pc] = (p - a[row][fc] % p) % p;
                }
                v
            })
            .collect()
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// row_dst += factor · row_src
    fn add_row(&mut self, dst: usize, src: usize, factor: &BigInt) {
        for c in 0..self.cols {
            let v = &self[(src, c)] * factor;
            self[(dst, c)] += v;
        }
    }

    /// col_dst += factor · col_src
    fn add_col(&mut self, dst: usize, src: usize, factor: &BigInt) {
        for r in 0..self.rows {
            let v = &self[(r, src)] * factor;
            self[(r, dst)] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.cols {
            let v = -&self[(i, c)];
            self[(i, c)] = v;
        }
    }
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    let e = BigInt::from(a).extended_gcd(&BigInt::from(p));
    e.x.mod_floor(&BigInt::from(p))
        .to_u64()
        .expect("residue fits")
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.rows).map(|i| {
                self.row(i)
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
            }))
            .finish()
    }
}

/// `U · M · V = D` with `U`, `V` unimodular and `D` diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    /// Diagonal of `D`, length `min(rows, cols)`, non-negative, each dividing
    /// the next (zeros last).
    pub invariant_factors: Vec<BigInt>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.invariant_factors
            .iter()
            .filter(|d| !d.is_zero())
            .count()
    }
}

/// Smith normal form by elementary operations with transform accumulation.
///
/// Pivots are the entry of smallest nonzero absolute value in the remaining
/// block, ties broken row-major. The result is checked by exact
/// multiplication before it is returned.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        let Some((pi, pj)) =
            smallest_entry(&a, (t..rows).flat_map(|i| (t..cols).map(move |j| (i, j))))
        else {
            break;
        };
        move_to_pivot(&mut a, &mut u, &mut v, t, pi, pj);
        loop {
            let pivot = a[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = -a[(i, t)].div_floor(&pivot);
                a.add_row(i, t, &q);
                u.add_row(i, t, &q);
                clean &= a[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = -a[(t, j)].div_floor(&pivot);
                a.add_col(j, t, &q);
                v.add_col(j, t, &q);
                clean &= a[(t, j)].is_zero();
            }
            if !clean {
                let cross = (t..rows)
                    .map(|i| (i, t))
                    .chain((t + 1..cols).map(|j| (t, j)));
                let (pi, pj) = smallest_entry(&a, cross).expect("pivot row/column is nonzero");
                move_to_pivot(&mut a, &mut u, &mut v, t, pi, pj);
                continue;
            }
            let offender =
                (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[(i, j)].is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    a.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
    }

    let invariant_factors = (0..rows.min(cols)).map(|i| a[(i, i)].clone()).collect();
    assert_eq!(
        u.mul(m).mul(&v),
        a,
        "Smith normal form transforms do not reproduce D"
    );
    SmithForm {
        d: a,
        u,
        v,
        invariant_factors,
    }
}

fn smallest_entry<I>(a: &IntMatrix, cells: I) -> Option<(usize, usize)>
where
    I: Iterator<Item = (usize, usize)>,
{
    let mut best: Option<((usize, usize), BigInt)> = None;
    for (i, j) in cells {
        let x = a[(i, j)].abs();
        if x.is_zero() {
            continue;
        }
        if best.as_ref().is_none_or(|(_, b)| x < *b) {
            best = Some(((i, j), x));
        }
    }
    best.map(|(pos, _)| pos)
}

fn move_to_pivot(
    a: &mut IntMatrix,
    u: &mut IntMatrix,
    v: &mut IntMatrix,
    t: usize,
    i: usize,
    j: usize,
) {
    a.swap_rows(t, i);
    u.swap_rows(t, i);
    a.swap_cols(t, j);
    v.swap_cols(t, j);
}

/// Relator-by-generator matrix of exponent sums.
pub fn relation_matrix(p: &Presentation) -> IntMatrix {
    let rows: Vec<Vec<i64>> = p.relators().iter().map(|r| r.abelianize()).collect();
    if rows.is_empty() {
        return IntMatrix::zeros(0, p.num_generators());
    }
    IntMatrix::from_rows(&rows)
}

/// `Z^free_rank ⊕ Z/d_1 ⊕ … ⊕ Z/d_k` with `1 < d_1 | d_2 | … | d_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbelianGroupStructure {
    pub free_rank: usize,
    #[serde(serialize_with = "serialize_big_list")]
    pub torsion: Vec<BigInt>,
}

impl AbelianGroupStructure {
    pub fn from_smith(form: &SmithForm, generators: usize) -> AbelianGroupStructure {
        let rank = form.rank();
        let torsion = form
            .invariant_factors
            .iter()
            .filter(|d| !d.is_zero() && !d.is_one())
            .cloned()
            .collect();
        AbelianGroupStructure {
            free_rank: generators - rank,
            torsion,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Order of the group, or `None` when it is infinite.
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.torsion.iter().product())
    }

    pub fn is_cyclic(&self) -> bool {
        self.free_rank + self.torsion.len() <= 1
    }
}

impl fmt::Display for AbelianGroupStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// Serializes integers as JSON numbers when they fit in 64 bits and as
/// decimal strings otherwise.
pub fn serialize_big_list<S: Serializer>(
    values: &[BigInt],
    serializer: S,
) -> Result<S::Ok, S::Error> {
    let mut seq = serializer.serialize_seq(Some(values.len()))?;
    for v in values {
        if let Some(x) = v.to_i64() {
            seq.serialize_element(&x)?;
        } else {
            seq.serialize_element(&v.to_string())?;
        }
    }
    seq.end()
}

pub fn serialize_big<S: Serializer>(value: &BigInt, serializer: S) -> Result<S::Ok, S::Error> {
    match value.to_i64() {
        Some(x) => serializer.serialize_i64(x),
        None => serializer.serialize_str(&value.to_string()),
    }
}

pub fn abelianization(p: &Presentation) -> AbelianGroupStructure {
    let m = relation_matrix(p);
    AbelianGroupStructure::from_smith(&smith_normal_form(&m), p.num_generators())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::present::{h_n_presentation, CyclicWordFamily};
    use crate::words::Naming;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn family(text: &str) -> CyclicWordFamily {
        let naming = Naming::infer(&[text], false).unwrap();
        CyclicWordFamily::from_word(&naming.parse(text).unwrap(), None).unwrap()
    }

    #[test]
    fn snf_examples() {
        let f = smith_normal_form(&IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(f.invariant_factors, big(&[1, 6]));

        let f = smith_normal_form(&IntMatrix::zeros(3, 2));
        assert_eq!(f.d, IntMatrix::zeros(3, 2));
        assert_eq!(f.invariant_factors, big(&[0, 0]));

        let f = smith_normal_form(&IntMatrix::from_rows(&[vec![2, -3], vec![-3, 2]]));
        assert_eq!(f.invariant_factors, big(&[1, 5]));
        assert!(f.u.determinant().abs().is_one());
        assert!(f.v.determinant().abs().is_one());
    }

    #[test]
    fn snf_handles_rectangular_and_empty() {
        let f = smith_normal_form(&IntMatrix::from_rows(&[vec![4, 6, 8]]));
        assert_eq!(f.invariant_factors, big(&[2]));
        let f = smith_normal_form(&IntMatrix::zeros(0, 3));
        assert!(f.invariant_factors.is_empty());
        let f = smith_normal_form(&IntMatrix::from_rows(&[vec![6, 4], vec![4, 6], vec![2, 2]]));
        assert_eq!(f.invariant_factors, big(&[2, 2]));
    }

    #[test]
    fn relation_matrix_examples() {
        let m = relation_matrix(&family("x0^2 x1^-3").cyclic_presentation(2).unwrap());
        assert_eq!(m, IntMatrix::from_rows(&[vec![2, -3], vec![-3, 2]]));

        let fam = family("x3 x0^-1");
        let m = relation_matrix(&fam.cyclic_presentation(6).unwrap());
        assert_eq!(m, IntMatrix::circulant(&big(&[-1, 0, 0, 1]), 6));

        let p = h_n_presentation(&fam.v_to_w(), 7).unwrap();
        let m = relation_matrix(&p);
        assert_eq!(
            (m[(0, 1)].clone(), m[(1, 1)].clone()),
            (BigInt::zero(), BigInt::from(7))
        );
    }

    #[test]
    fn abelianization_examples() {
        let ab = abelianization(&family("x0^2 x1^-3").cyclic_presentation(2).unwrap());
        assert_eq!(
            ab,
            AbelianGroupStructure {
                free_rank: 0,
                torsion: big(&[5])
            }
        );

        let ab = abelianization(&family("x3 x0^-1").cyclic_presentation(6).unwrap());
        assert_eq!(
            ab,
            AbelianGroupStructure {
                free_rank: 3,
                torsion: vec![]
            }
        );

        let bg = family("x1 x0 x1^-1 x0^-2");
        for n in 2..=12 {
            assert!(
                abelianization(&bg.cyclic_presentation(n).unwrap()).is_trivial(),
                "n = {n}"
            );
        }
    }

    #[test]
    fn determinant_matches_hand_values() {
        assert_eq!(
            IntMatrix::from_rows(&[vec![0, 2], vec![1, 0]]).determinant(),
            BigInt::from(-2)
        );
        assert_eq!(
            IntMatrix::from_rows(&[vec![2, 0, 0], vec![1, 1, 1], vec![0, 1, 0]]).determinant(),
            BigInt::from(-2)
        );
        assert_eq!(IntMatrix::zeros(0, 0).determinant(), BigInt::one());
        assert!(IntMatrix::from_rows(&[vec![1, 2], vec![2, 4]])
            .determinant()
            .is_zero());
    }

    #[test]
    fn kernel_mod_two_of_grigorchuk_matrix() {
        // columns: a -> (2,1,0), c -> (0,1,1), d -> (0,1,0)
        let m = IntMatrix::from_rows(&[vec![2, 0, 0], vec![1, 1, 1], vec![0, 1, 0]]);
        assert_eq!(m.kernel_mod_p(2), vec![vec![1, 0, 1]]);
        assert!(m.kernel_mod_p(3).is_empty());
    }

    #[test]
    fn structure_display_and_json() {
        let s = AbelianGroupStructure {
            free_rank: 2,
            torsion: big(&[2, 4]),
        };
        assert_eq!(s.to_string(), "Z^2 + Z/2 + Z/4");
        assert_eq!(
            serde_json::to_string(&s).unwrap(),
            r#"{"free_rank":2,"torsion":[2,4]}"#
        );
        let huge = AbelianGroupStructure {
            free_rank: 0,
            torsion: vec![BigInt::from(u64::MAX) * 4],
        };
        assert_eq!(
            serde_json::to_string(&huge).unwrap(),
            r#"{"free_rank":0,"torsion":["73786976294838206460"]}"#
        );
    }
}
