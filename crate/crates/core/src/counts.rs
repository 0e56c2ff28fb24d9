//! Closed-form counts for unitary spaces over GF(q²), in exact integers.
//!
//! Every division is checked to be exact; a non-zero remainder panics
//! since it can only come from a wrong formula.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub fn big(x: u64) -> BigInt {
    BigInt::from(x)
}

/// q^e as a big integer.
pub fn qpow(q: u32, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(q), e as usize)
}

/// (−1)^e.
pub fn sign(e: u32) -> BigInt {
    if e % 2 == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

pub fn exact_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (quot, rem) = a.div_rem(b);
    assert!(rem.is_zero(), "inexact division {a} / {b}");
    quot
}

pub fn factorial(m: u32) -> BigInt {
    (1..=m).fold(BigInt::one(), |acc, k| acc * k)
}

/// |GU_n(q)| = q^C(n,2) Π_{i=1..n} (q^i − (−1)^i).
pub fn gu_order(n: u32, q: u32) -> BigInt {
    let mut r = qpow(q, n * n.saturating_sub(1) / 2);
    for i in 1..=n {
        r *= qpow(q, i) - sign(i);
    }
    r
}

/// d_n: non-degenerate lines in a non-degenerate space of dimension n − 1.
pub fn d_count(n: u32, q: u32) -> BigInt {
    if n < 2 {
        return BigInt::zero();
    }
    exact_div(
        &(qpow(q, n - 2) * (qpow(q, n - 1) - sign(n - 1))),
        &big(q as u64 + 1),
    )
}

/// d^R_{m+1} = q^{2R}·d_{m−R+1}: non-degenerate lines in an m-dimensional
/// space whose radical has dimension R. The case m = 0, R = 1 is 0 by convention.
pub fn d_rad(m: u32, q: u32, r: u32) -> Result<BigInt> {
    if m == 0 && r == 1 {
        return Ok(BigInt::zero());
    }
    if r > m {
        return Err(Error::InvalidRadicalDim {
            dim: m as usize,
            radical: r as usize,
        });
    }
    Ok(qpow(q, 2 * r) * d_count(m - r + 1, q))
}

/// I^R_n: non-zero isotropic vectors in an n-dimensional space with radical of dimension R.
pub fn iso_count(n: u32, q: u32, r: u32) -> Result<BigInt> {
    if r > n {
        return Err(Error::InvalidRadicalDim {
            dim: n as usize,
            radical: r as usize,
        });
    }
    Ok(qpow(q, 2 * n) - 1 - d_rad(n, q, r)? * (qpow(q, 2) - 1))
}

/// I_n = I^0_n.
pub fn iso(n: u32, q: u32) -> BigInt {
    iso_count(n, q, 0).expect("R = 0 is always valid")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub lhs: BigInt,
    pub rhs: BigInt,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// The eight identities between the line and isotropic-vector counts, for n ≥ 3.
/// Entry (iii) contributes two checks, one per equality.
pub fn identity_suite(n: u32, q: u32) -> Result<Vec<IdentityCheck>> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("identity suite needs n ≥ 3, got {n}")));
    }
    let d = |k: u32| d_count(k, q);
    let d1 = |m: u32| d_rad(m, q, 1).expect("valid radical");
    let s = sign(n);
    let qq1 = qpow(q, 2) - 1;
    let mut out = Vec::new();
    for k in 0..=1 {
        out.push(IdentityCheck {
            name: if k == 0 { "i(k=0)" } else { "i(k=1)" },
            lhs: iso_count(n, q, k)?,
            rhs: qpow(q, 2 * n) - 1 - d_rad(n, q, k)? * &qq1,
        });
    }
    out.push(IdentityCheck {
        name: "ii",
        lhs: iso(n - 2, q),
        rhs: qpow(q, 2 * n - 5) - 1 + (big(q as u64) - 1) * qpow(q, n - 3) * &s,
    });
    let lhs3 = exact_div(&(iso(n - 1, q) - iso(n - 2, q)), &qq1);
    out.push(IdentityCheck {
        name: "iii(a)",
        lhs: lhs3.clone(),
        rhs: qpow(q, 2 * n - 5) - qpow(q, n - 3) * &s,
    });
    out.push(IdentityCheck {
        name: "iii(b)",
        lhs: lhs3,
        rhs: d(n - 1) * (q + 1),
    });
    out.push(IdentityCheck {
        name: "iv",
        lhs: exact_div(&(iso(n - 1, q) - iso_count(n - 2, q, 1)?), &qq1),
        rhs: qpow(q, 2 * n - 5),
    });
    // d¹_{n−1} lives in dimension n − 2
    out.push(IdentityCheck {
        name: "v",
        lhs: d1(n - 2),
        rhs: d(n) - qpow(q, 2 * n - 4) + qpow(q, 2 * n - 5),
    });
    out.push(IdentityCheck {
        name: "vi",
        lhs: d(n),
        rhs: qpow(q, 2 * n - 4) - d(n - 1) * q,
    });
    out.push(IdentityCheck {
        name: "vii",
        lhs: d(n) - d(n - 1),
        rhs: qpow(q, 2 * n - 4) - qpow(q, 2 * n - 5) + qpow(q, n - 3) * &s,
    });
    out.push(IdentityCheck {
        name: "viii",
        lhs: d1(n - 2) - d(n - 1),
        rhs: qpow(q, n - 3) * &s,
    });
    Ok(out)
}

/// Number of m-frames (sets of m pairwise orthogonal non-degenerate lines) in dimension n.
pub fn frame_count(n: u32, q: u32, m: u32) -> Result<BigInt> {
    if m > n {
        return Err(Error::InvalidParameter(format!("frame size {m} exceeds dimension {n}")));
    }
    let den = num_traits::pow(big(q as u64 + 1), m as usize) * factorial(m) * gu_order(n - m, q);
    Ok(exact_div(&gu_order(n, q), &den))
}

/// Reduced Euler characteristic of the frame complex F(V).
pub fn euler_frame(n: u32, q: u32) -> BigInt {
    (0..=n)
        .map(|m| sign(m + 1) * frame_count(n, q, m).expect("m ≤ n"))
        .sum()
}

/// Spheres in the wedge decomposition of F(V) for n = 3, q ≥ 3.
pub fn wedge_count_dim3(q: u32) -> Result<BigInt> {
    if q < 3 {
        return Err(Error::InvalidParameter("wedge count for n = 3 needs q ≥ 3".into()));
    }
    let p = |e| qpow(q, e);
    let num = p(6) - p(5) * 2 - p(4) + p(3) * 2 - p(2) * 3 + 3;
    Ok(exact_div(&num, &big(3)))
}

/// Points of F(V) for n = 2, i.e. the number of 2-frames.
pub fn points_dim2(q: u32) -> BigInt {
    exact_div(&(big(q as u64) * (q - 1)), &big(2))
}

/// Non-degenerate m-dimensional subspaces of a non-degenerate n-dimensional space.
pub fn subspace_count(n: u32, m: u32, q: u32) -> Result<BigInt> {
    if m > n {
        return Err(Error::InvalidParameter(format!("subspace dimension {m} exceeds {n}")));
    }
    Ok(exact_div(
        &gu_order(n, q),
        &(gu_order(m, q) * gu_order(n - m, q)),
    ))
}

/// χ̃ of the poset of proper non-zero non-degenerate subspaces, by summing over dimension chains.
pub fn euler_nondeg_poset(n: u32, q: u32) -> BigInt {
    let mut total = -BigInt::one();
    if n < 2 {
        return total;
    }
    let inner = n - 1;
    for mask in 1u64..(1u64 << inner) {
        let dims: Vec<u32> = (0..inner).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect();
        let k = dims.len() as u32;
        let mut term = sign(k - 1);
        for (i, &m) in dims.iter().enumerate() {
            let above = dims.get(i + 1).copied().unwrap_or(n);
            term *= subspace_count(above, m, q).expect("m < above");
        }
        total += term;
    }
    total
}

/// A multiset of positive parts, stored in non-increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartitionType(Vec<u32>);

impl PartitionType {
    pub fn new(mut parts: Vec<u32>) -> Result<PartitionType> {
        if parts.contains(&0) {
            return Err(Error::InvalidParameter("partition parts must be positive".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(PartitionType(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn merged(&self, other: &PartitionType) -> PartitionType {
        let mut parts = self.0.clone();
        parts.extend_from_slice(&other.0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        PartitionType(parts)
    }

    /// Multiplicity of each part size.
    fn multiplicities(&self) -> BTreeMap<u32, u32> {
        let mut m = BTreeMap::new();
        for &p in &self.0 {
            *m.entry(p).or_insert(0) += 1;
        }
        m
    }
}

impl std::fmt::Display for PartitionType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All partitions of n, finest first.
pub fn partitions(n: u32) -> Vec<PartitionType> {
    fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<PartitionType>) {
        if rest == 0 {
            out.push(PartitionType(cur.clone()));
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    out
}

/// Orthogonal decompositions of an n-dimensional non-degenerate space with block dimensions T.
pub fn decomp_type_count(n: u32, q: u32, t: &PartitionType) -> Result<BigInt> {
    if t.total() != n {
        return Err(Error::InvalidParameter(format!("{t} does not partition {n}")));
    }
    let mut den = BigInt::one();
    for &p in t.parts() {
        den *= gu_order(p, q);
    }
    for (_, mult) in t.multiplicities() {
        den *= factorial(mult);
    }
    Ok(exact_div(&gu_order(n, q), &den))
}

/// For a fixed decomposition of type T, the number of its refinements of each type
/// (including T itself, reached only by the trivial refinement).
pub fn refinement_counts(q: u32, t: &PartitionType) -> BTreeMap<PartitionType, BigInt> {
    let mut state: BTreeMap<PartitionType, BigInt> = BTreeMap::new();
    state.insert(PartitionType(Vec::new()), BigInt::one());
    for &block in t.parts() {
        let mut next: BTreeMap<PartitionType, BigInt> = BTreeMap::new();
        for tau in partitions(block) {
            let ways = decomp_type_count(block, q, &tau).expect("tau partitions block");
            for (acc, count) in &state {
                *next.entry(acc.merged(&tau)).or_insert_with(BigInt::zero) += count * &ways;
            }
        }
        state = next;
    }
    state
}

/// f(T) = μ(0̂, π) for a decomposition π of type T, in D(V) with a formal bottom.
pub fn decomp_mobius_table(n: u32, q: u32) -> BTreeMap<PartitionType, BigInt> {
    let mut f: BTreeMap<PartitionType, BigInt> = BTreeMap::new();
    // finest types first, so every strict refinement is already known
    for t in partitions(n) {
        let mut val = -BigInt::one();
        for (finer, count) in refinement_counts(q, &t) {
            if finer != t {
                val -= count * &f[&finer];
            }
        }
        f.insert(t, val);
    }
    f
}

/// χ̃ of the poset of proper orthogonal decompositions, f((n)).
pub fn euler_decomp_poset(n: u32, q: u32) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let top = PartitionType(vec![n]);
    Ok(decomp_mobius_table(n, q).remove(&top).expect("(n) is a partition"))
}

/// A formula value paired with an optional independent computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountReport {
    pub name: String,
    pub n: u32,
    pub q: u32,
    pub extra: Vec<(String, String)>,
    pub formula_value: BigInt,
    pub oracle_value: Option<BigInt>,
}

impl CountReport {
    pub fn new(name: impl Into<String>, n: u32, q: u32, formula_value: BigInt) -> CountReport {
        CountReport {
            name: name.into(),
            n,
            q,
            extra: Vec::new(),
            formula_value,
            oracle_value: None,
        }
    }

    pub fn with_oracle(mut self, oracle: BigInt) -> CountReport {
        self.oracle_value = Some(oracle);
        self
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> CountReport {
        self.extra.push((key.to_string(), value.to_string()));
        self
    }

    /// True when no oracle was run or it agrees.
    pub fn consistent(&self) -> bool {
        self.oracle_value.as_ref().is_none_or(|o| *o == self.formula_value)
    }
}
