use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use framelab::complex::SimComplex;
use framelab::counts::{d_count, d_rad, euler_frame, frame_count, identity_suite, iso_count, qpow};
use framelab::field::{FieldElem, FieldTable, SUPPORTED_Q};
use framelab::garland::{general_bound, lambda_min_link, p_bound, q2_bound, vanishing_prediction};
use framelab::homology::betti;
use framelab::linalg::{bareiss_rank, engine_registry, rank_mod_p, smith_form, SparseMatrix, PRIME_A};
use framelab::poset::FinPoset;

fn any_q() -> impl Strategy<Value = u32> {
    prop::sample::select(SUPPORTED_Q.to_vec())
}

fn elem(f: &FieldTable, code: usize) -> FieldElem {
    f.from_code(code % f.order())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_axioms(q in any_q(), a in 0usize..256, b in 0usize..256, c in 0usize..256) {
        let f = FieldTable::new(q).unwrap();
        let (a, b, c) = (elem(&f, a), elem(&f, b), elem(&f, c));
        prop_assert_eq!(f.add(a, f.add(b, c)), f.add(f.add(a, b), c));
        prop_assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), FieldElem::ZERO);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElem::ONE);
        }
        // τ is an involutive automorphism and the norm lands in the fixed field
        prop_assert_eq!(f.frobenius(f.frobenius(a)), a);
        prop_assert_eq!(f.frobenius(f.mul(a, b)), f.mul(f.frobenius(a), f.frobenius(b)));
        prop_assert_eq!(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
        prop_assert!(f.is_fixed(f.norm(a)));
        prop_assert!(f.is_fixed(f.trace(a)));
        prop_assert_eq!(f.norm(f.mul(a, b)), f.mul(f.norm(a), f.norm(b)));
    }

    #[test]
    fn count_identities(q in any_q(), n in 3u32..=24) {
        for c in identity_suite(n, q).unwrap() {
            prop_assert!(c.holds(), "{} at n={} q={}", c.name, n, q);
        }
    }

    #[test]
    fn frame_counts_are_consistent(q in any_q(), n in 1u32..=16) {
        prop_assert_eq!(frame_count(n, q, 0).unwrap(), BigInt::one());
        prop_assert_eq!(frame_count(n, q, 1).unwrap(), d_count(n + 1, q));
        // each m-frame extends to (m+1)-frames through the lines of its complement
        for m in 0..n {
            let lhs = frame_count(n, q, m + 1).unwrap() * BigInt::from(m + 1);
            let rhs = frame_count(n, q, m).unwrap() * d_count(n - m + 1, q);
            prop_assert_eq!(lhs, rhs);
        }
        let chi: BigInt = (0..=n)
            .map(|m| {
                let f = frame_count(n, q, m).unwrap();
                if m % 2 == 0 { -f } else { f }
            })
            .sum();
        prop_assert_eq!(chi, euler_frame(n, q));
    }

    #[test]
    fn isotropic_and_radical(q in any_q(), n in 1u32..=14, r in 0u32..=3) {
        prop_assume!(r <= n);
        // every non-zero vector is isotropic or spans one of q² − 1 scalings of a line
        let lines = d_rad(n, q, r).unwrap();
        let total = qpow(q, 2 * n) - 1;
        prop_assert_eq!(iso_count(n, q, r).unwrap() + lines * (qpow(q, 2) - 1), total);
    }

    #[test]
    fn garland_monotone(q in any_q(), n in 4u32..=30) {
        if q == 2 {
            for i in 0..n - 4 {
                prop_assert!(q2_bound(n, i).unwrap() >= q2_bound(n, i + 1).unwrap());
            }
        } else {
            for i in 0..n - 3 {
                prop_assert!(general_bound(n, q, i).unwrap() > general_bound(n, q, i + 1).unwrap());
                prop_assert!(lambda_min_link(n, q, i).is_ok());
            }
        }
        let jmin = if q == 2 { 4 } else { 3 };
        for j in jmin..20 {
            prop_assert!(p_bound(j, q).unwrap() <= p_bound(j + 1, q).unwrap());
        }
        // predictions never reach the top dimension
        let p = vanishing_prediction(n, q);
        prop_assert!(p.degrees.iter().all(|&d| d + 1 < n));
    }

    #[test]
    fn ranks_agree(rows in prop::collection::vec(prop::collection::vec(-3i64..=3, 6), 1..7)) {
        let m = SparseMatrix::from_dense(&rows);
        let r = bareiss_rank(&m);
        prop_assert_eq!(rank_mod_p(&m, PRIME_A), r);
        prop_assert_eq!(rank_mod_p(&m.transpose(), PRIME_A), r);
        let s = smith_form(&m).unwrap();
        prop_assert_eq!(s.rank, r);
        prop_assert!(s.torsion.iter().all(|d| d.is_positive()));
    }

    #[test]
    fn smith_determinant(rows in prop::collection::vec(prop::collection::vec(-4i64..=4, 4), 4)) {
        let det = det_oracle(&rows);
        let m = SparseMatrix::from_dense(&rows);
        let s = smith_form(&m).unwrap();
        if det.is_zero() {
            prop_assert!(s.rank < 4);
        } else {
            prop_assert_eq!(s.rank, 4);
            let prod: BigInt = s.torsion.iter().product();
            prop_assert_eq!(prod, det.abs());
        }
    }

    #[test]
    fn complexes_from_random_facets(facets in prop::collection::vec(prop::collection::btree_set(0u32..7, 1..5), 1..8)) {
        let facets: Vec<Vec<u32>> = facets.into_iter().map(|s| s.into_iter().collect()).collect();
        let k = SimComplex::from_facets(&facets);
        prop_assert!(k.is_closed());
        let b = k.boundaries();
        for w in b.windows(2) {
            prop_assert!(w[0].product_is_zero(&w[1]));
        }
        let reg = engine_registry();
        let bq = betti(&k, reg.get("rational").unwrap().as_ref()).unwrap();
        let b2 = betti(&k, reg.get("gf2").unwrap().as_ref()).unwrap();
        let chi: BigInt = bq
            .iter()
            .enumerate()
            .map(|(i, &x)| if i % 2 == 0 { BigInt::from(x) } else { -BigInt::from(x) })
            .sum();
        prop_assert_eq!(chi, k.euler_reduced());
        // universal coefficients: field homology only grows in characteristic 2
        for (x, y) in bq.iter().zip(&b2) {
            prop_assert!(x <= y);
        }
    }

    #[test]
    fn poset_euler_matches_order_complex(edges in prop::collection::vec((0u32..7, 0u32..7), 0..14)) {
        // a < b whenever a < b numerically and some chain of chosen edges connects them
        let mut reach = [[false; 7]; 7];
        for (a, b) in edges {
            if a < b {
                reach[a as usize][b as usize] = true;
            }
        }
        for k in 0..7 {
            for i in 0..7 {
                for j in 0..7 {
                    if reach[i][k] && reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
        let keys = (0..7).map(|i| i.to_string()).collect();
        let p = FinPoset::from_relation(keys, |i, j| reach[i][j]).unwrap();
        let oc = p.order_complex(100_000).unwrap();
        prop_assert_eq!(p.euler_reduced(), oc.euler_reduced());
        prop_assert_eq!(p.dual().euler_reduced(), p.euler_reduced());
    }
}

/// Fraction-free determinant, independent of the library's elimination code.
fn det_oracle(rows: &[Vec<i64>]) -> BigInt {
    let n = rows.len();
    let mut a: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}
