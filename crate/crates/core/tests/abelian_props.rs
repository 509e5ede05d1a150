use cycpres_core::abelian::{smith_normal_form, IntMatrix};
use cycpres_core::intpoly::{
    classify_cyclotomic_type, cyclotomic_polynomial, resultant, resultant_with_cyclic,
    CyclotomicKind,
};
use cycpres_core::IntPolynomial;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn matrix(max: usize) -> impl Strategy<Value = IntMatrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec(-9i64..=9, r * c)
            .prop_map(move |v| IntMatrix::from_fn(r, c, |i, j| v[i * c + j]))
    })
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// `d_k` = gcd of all `k × k` minors; invariant factors are `d_k / d_{k-1}`.
fn invariant_factors_by_minors(m: &IntMatrix) -> Vec<BigInt> {
    let mut prev = BigInt::one();
    let mut out = Vec::new();
    for k in 1..=m.rows().min(m.cols()) {
        let mut g = BigInt::zero();
        for rows in subsets(m.rows(), k) {
            for cols in subsets(m.cols(), k) {
                let minor = IntMatrix::from_fn(k, k, |i, j| m[(rows[i], cols[j])].clone());
                g = g.gcd(&minor.determinant());
            }
        }
        if g.is_zero() {
            break;
        }
        out.push(&g / &prev);
        prev = g;
    }
    out
}

fn unimodular(m: &IntMatrix) -> bool {
    m.determinant().abs().is_one()
}

proptest! {
    #[test]
    fn smith_form_is_certified(m in matrix(6)) {
        let form = smith_normal_form(&m);
        prop_assert_eq!(form.u.mul(&m).mul(&form.v), form.d.clone());
        prop_assert!(unimodular(&form.u) && unimodular(&form.v));
        let factors = &form.invariant_factors;
        for w in factors.windows(2) {
            prop_assert!(w[1].is_multiple_of(&w[0]));
        }
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if i != j {
                    prop_assert!(form.d[(i, j)].is_zero());
                }
            }
        }
    }

    #[test]
    fn smith_form_matches_determinantal_divisors(m in matrix(4)) {
        let form = smith_normal_form(&m);
        let nonzero: Vec<BigInt> = form.invariant_factors.iter().filter(|x| !x.is_zero()).cloned().collect();
        prop_assert_eq!(nonzero, invariant_factors_by_minors(&m));
    }

    #[test]
    fn resultant_is_circulant_determinant(coeffs in prop::collection::vec(-4i64..=4, 1..5), n in 1usize..9) {
        let f = IntPolynomial::from_i64(&coeffs);
        prop_assume!(f.degree().is_some_and(|d| d < n));
        let padded: Vec<BigInt> = (0..n).map(|i| f.coefficient(i)).collect();
        let det = IntMatrix::circulant(&padded, n).determinant();
        prop_assert_eq!(resultant_with_cyclic(&f, n).abs(), det.abs());
    }

    #[test]
    fn resultant_is_multiplicative(a in prop::collection::vec(-3i64..=3, 1..4), b in prop::collection::vec(-3i64..=3, 1..4), n in 1usize..7) {
        let f = IntPolynomial::from_i64(&a);
        let g = IntPolynomial::from_i64(&b);
        let t_n = {
            let mut c = vec![BigInt::zero(); n + 1];
            c[0] = BigInt::from(-1);
            c[n] = BigInt::one();
            IntPolynomial::new(c)
        };
        prop_assert_eq!(resultant(&f.mul(&g), &t_n), resultant(&f, &t_n) * resultant(&g, &t_n));
    }

    #[test]
    fn cyclotomic_products_are_recognized(
        ms in prop::collection::vec(1u64..=12, 0..4),
        shift in 0usize..3,
        negative in any::<bool>(),
    ) {
        let mut f = IntPolynomial::monomial(shift, BigInt::from(if negative { -1 } else { 1 }));
        for &m in &ms {
            f = f.mul(&cyclotomic_polynomial(m));
        }
        let c = classify_cyclotomic_type(&f);
        let expected = if ms.is_empty() { CyclotomicKind::UnitMonomial } else { CyclotomicKind::CyclotomicType };
        prop_assert_eq!(c.kind, expected);
        prop_assert_eq!(c.reconstruct(), Some(f));
        let count: u32 = c.factors.iter().map(|x| x.multiplicity).sum();
        prop_assert_eq!(count as usize, ms.len());
    }

    #[test]
    fn classification_reconstructs_when_positive(coeffs in prop::collection::vec(-2i64..=2, 1..6)) {
        let f = IntPolynomial::from_i64(&coeffs);
        let c = classify_cyclotomic_type(&f);
        if let Some(g) = c.reconstruct() {
            prop_assert_eq!(g, f);
        }
    }
}
