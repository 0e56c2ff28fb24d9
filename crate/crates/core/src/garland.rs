//! Spectral-gap bounds on links and the homology vanishing they predict.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::counts::{d_count, exact_div, qpow, sign};
use crate::error::{Error, Result};
use crate::graph::expected_connectivity;
use crate::registry::Registry;

/// Smallest positive normalized-Laplacian eigenvalue of the 1-skeleton of the
/// link of a partial i-frame, a frame complex of dimension n − i.
pub fn lambda_min_link(n: u32, q: u32, i: u32) -> Result<BigRational> {
    // the smallest link dimension reported on is 3 for q = 2 and 2 otherwise
    let min_link = if q == 2 { 3 } else { 2 };
    if n < min_link || i > n - min_link {
        return Err(Error::InvalidParameter(format!(
            "link of a {i}-frame in dimension {n} over q = {q} is outside the Garland range"
        )));
    }
    let m = n - i;
    let conn = expected_connectivity(m, q);
    if !conn.connected {
        return Err(Error::LinkDisconnected(format!(
            "frame complex of dimension {m} over q = {q} has {} components",
            conn.components.map_or("several".to_string(), |c| c.to_string())
        )));
    }
    let d = BigRational::from_integer(d_count(m, q));
    let mu = if q != 2 {
        qpow(q, m - 2)
    } else if m % 2 == 0 {
        qpow(q, m - 3)
    } else {
        qpow(q, m - 2)
    };
    Ok(BigRational::one() - BigRational::from_integer(mu) / d)
}

/// One application of the spectral criterion in degree i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GarlandVerdict {
    pub n: u32,
    pub q: u32,
    pub i: u32,
    pub lambda_min: BigRational,
    pub threshold: BigRational,
    pub passes: bool,
    pub predicted_vanishing: Vec<u32>,
}

/// λ_min > i/(i+1), decided exactly.
pub fn garland_verdict(n: u32, q: u32, i: u32) -> Result<GarlandVerdict> {
    let lambda_min = lambda_min_link(n, q, i)?;
    let threshold = BigRational::new(BigInt::from(i), BigInt::from(i + 1));
    let passes = lambda_min > threshold;
    Ok(GarlandVerdict {
        n,
        q,
        i,
        lambda_min,
        threshold,
        passes,
        predicted_vanishing: if passes { vec![i] } else { Vec::new() },
    })
}

/// P_j(q): for q ≠ 2 the quantity (q^{j−1} − (−1)^{j−1})/(q+1) + j − 1; for q = 2
/// the parity-split variant, so that P_j(2) = P_{j+1}(2) for even j.
pub fn p_bound(j: u32, q: u32) -> Result<BigInt> {
    if j < 3 || (q == 2 && j < 4) {
        return Err(Error::InvalidParameter(format!("P_j needs j >= 3 (j >= 4 when q = 2), got {j}")));
    }
    let q1 = BigInt::from(q + 1);
    let jm1 = BigInt::from(j - 1);
    Ok(if q != 2 {
        exact_div(&(qpow(q, j - 1) - sign(j - 1)), &q1) + jm1
    } else if j % 2 == 0 {
        exact_div(&(BigInt::from(q) * (qpow(q, j - 1) + 1)), &q1) + jm1
    } else {
        exact_div(&(qpow(q, j - 1) - 1), &q1) + jm1
    })
}

/// Q_n(2, i), positive exactly when the criterion passes in degree i.
pub fn q2_bound(n: u32, i: u32) -> Result<BigInt> {
    if n < 4 || i > n - 4 {
        return Err(Error::InvalidParameter(format!("Q_n(2,i) needs n >= 4 and i <= n-4, got n={n}, i={i}")));
    }
    let q = 2;
    let m = n - i;
    let i1 = BigInt::from(i + 1);
    Ok(if m % 2 == 0 {
        exact_div(&(BigInt::from(q) * (qpow(q, m - 1) + 1)), &BigInt::from(q + 1)) - i1
    } else {
        exact_div(&(qpow(q, m - 1) - 1), &BigInt::from(q + 1)) - i1
    })
}

/// The q ≠ 2 criterion value (q^{n−i−1} − (−1)^{n−i−1})/(q+1) − i − 1.
pub fn general_bound(n: u32, q: u32, i: u32) -> Result<BigInt> {
    if n < 3 || i > n - 3 {
        return Err(Error::InvalidParameter(format!("bound needs i <= n-3, got n={n}, i={i}")));
    }
    let e = n - i - 1;
    Ok(exact_div(&(qpow(q, e) - sign(e)), &BigInt::from(q + 1)) - BigInt::from(i + 1))
}

/// A vanishing statement for reduced rational homology with its hypothesis.
pub trait VanishingRule: Send + Sync {
    fn name(&self) -> &str;
    fn hypothesis(&self) -> &str;
    /// Degrees predicted to vanish, or None when the hypothesis fails.
    fn degrees(&self, n: u32, q: u32) -> Option<BTreeSet<u32>>;
}

fn upto(top: i64) -> BTreeSet<u32> {
    (0..=top).map(|d| d as u32).collect()
}

struct SmallN;
impl VanishingRule for SmallN {
    fn name(&self) -> &str {
        "small-n"
    }
    fn hypothesis(&self) -> &str {
        "2 <= n < q+1"
    }
    fn degrees(&self, n: u32, q: u32) -> Option<BTreeSet<u32>> {
        (n >= 2 && n < q + 1).then(|| upto(n as i64 - 3))
    }
}

struct CodimFour;
impl VanishingRule for CodimFour {
    fn name(&self) -> &str {
        "codim-four"
    }
    fn hypothesis(&self) -> &str {
        "q >= 3 and 4 <= n < q^2-q+4"
    }
    fn degrees(&self, n: u32, q: u32) -> Option<BTreeSet<u32>> {
        (q >= 3 && n >= 4 && n < q * q - q + 4).then(|| upto(n as i64 - 4))
    }
}

struct LowDims;
impl VanishingRule for LowDims {
    fn name(&self) -> &str {
        "low-dims"
    }
    fn hypothesis(&self) -> &str {
        "q >= 3 and n in {4,5,6}"
    }
    fn degrees(&self, n: u32, q: u32) -> Option<BTreeSet<u32>> {
        if q < 3 || !(4..=6).contains(&n) {
            return None;
        }
        Some(if n <= q { upto(n as i64 - 3) } else { upto(n as i64 - 4) })
    }
}

struct Half;
impl VanishingRule for Half {
    fn name(&self) -> &str {
        "half"
    }
    fn hypothesis(&self) -> &str {
        "q >= 3 and n >= 7"
    }
    fn degrees(&self, n: u32, q: u32) -> Option<BTreeSet<u32>> {
        (q >= 3 && n >= 7).then(|| upto(n as i64 / 2))
    }
}

struct TwoParity;
impl VanishingRule for TwoParity {
    fn name(&self) -> &str {
        "q2-parity"
    }
    fn hypothesis(&self) -> &str {
        "q = 2, n >= 4, some 4 <= j <= n with P_j(2) > n (even j) or P_{j-1}(2) > n (odd j)"
    }
    fn degrees(&self, n: u32, q: u32) -> Option<BTreeSet<u32>> {
        if q != 2 || n < 4 {
            return None;
        }
        let nb = BigInt::from(n);
        let mut out: Option<BTreeSet<u32>> = None;
        for j in 4..=n {
            let top = if j % 2 == 0 {
                (p_bound(j, 2).ok()? > nb).then_some(n as i64 - j as i64)
            } else {
                (p_bound(j - 1, 2).ok()? > nb).then_some(n as i64 - j as i64 + 1)
            };
            if let Some(t) = top {
                out.get_or_insert_with(BTreeSet::new).extend(upto(t));
            }
        }
        out
    }
}

struct TwoMonotone;
impl VanishingRule for TwoMonotone {
    fn name(&self) -> &str {
        "q2-monotone"
    }
    fn hypothesis(&self) -> &str {
        "q = 2, n >= 4, Q_n(2,j) > 0 for some 0 <= j <= n-4"
    }
    fn degrees(&self, n: u32, q: u32) -> Option<BTreeSet<u32>> {
        if q != 2 || n < 4 {
            return None;
        }
        let best = (0..=n - 4).rev().find(|&j| q2_bound(n, j).is_ok_and(|v| v > BigInt::from(0)))?;
        Some(upto(best as i64))
    }
}

struct Spectral;
impl VanishingRule for Spectral {
    fn name(&self) -> &str {
        "garland-spectral"
    }
    fn hypothesis(&self) -> &str {
        "connected links with lambda_min > i/(i+1), checked degree by degree"
    }
    fn degrees(&self, n: u32, q: u32) -> Option<BTreeSet<u32>> {
        let set: BTreeSet<u32> = (0..n)
            .filter(|&i| garland_verdict(n, q, i).is_ok_and(|v| v.passes))
            .collect();
        (!set.is_empty()).then_some(set)
    }
}

pub fn rule_registry() -> Registry<dyn VanishingRule> {
    let mut reg: Registry<dyn VanishingRule> = Registry::new("vanishing rule");
    reg.register("small-n", Arc::new(SmallN));
    reg.register("codim-four", Arc::new(CodimFour));
    reg.register("low-dims", Arc::new(LowDims));
    reg.register("half", Arc::new(Half));
    reg.register("q2-parity", Arc::new(TwoParity));
    reg.register("q2-monotone", Arc::new(TwoMonotone));
    reg.register("garland-spectral", Arc::new(Spectral));
    reg
}

/// The rules that fired for an instance and the union of their degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prediction {
    pub n: u32,
    pub q: u32,
    pub degrees: BTreeSet<u32>,
    /// (rule, hypothesis, degrees) for each rule whose hypothesis held.
    pub fired: Vec<(String, String, BTreeSet<u32>)>,
}

impl Prediction {
    /// No predicted degree carries a non-zero rational Betti number.
    pub fn consistent_with(&self, betti: &[usize]) -> bool {
        self.degrees.iter().all(|&d| betti.get(d as usize).is_none_or(|&b| b == 0))
    }
}

/// Union over all registered rules.
pub fn vanishing_prediction(n: u32, q: u32) -> Prediction {
    vanishing_prediction_with(&rule_registry(), n, q)
}

pub fn vanishing_prediction_with(reg: &Registry<dyn VanishingRule>, n: u32, q: u32) -> Prediction {
    let mut degrees = BTreeSet::new();
    let mut fired = Vec::new();
    for (name, rule) in reg.iter() {
        if let Some(d) = rule.degrees(n, q) {
            degrees.extend(d.iter().copied());
            fired.push((name.to_string(), rule.hypothesis().to_string(), d));
        }
    }
    Prediction { n, q, degrees, fired }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::laplacian_gap;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn set(v: &[u32]) -> BTreeSet<u32> {
        v.iter().copied().collect()
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_min_link(4, 3, 0).unwrap(), r(6, 7));
        let v = garland_verdict(4, 3, 1).unwrap();
        assert_eq!(v.lambda_min, r(1, 2));
        assert_eq!(v.threshold, r(1, 2));
        assert!(!v.passes);
        let v = garland_verdict(5, 4, 2).unwrap();
        assert_eq!(v.lambda_min, r(2, 3));
        assert!(!v.passes);
        assert!(matches!(lambda_min_link(4, 3, 2), Err(Error::LinkDisconnected(_))));
        assert!(matches!(lambda_min_link(5, 2, 2), Err(Error::LinkDisconnected(_))));
        assert!(matches!(lambda_min_link(4, 3, 3), Err(Error::InvalidParameter(_))));
        assert!(matches!(lambda_min_link(2, 2, 0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn lambda_matches_spectrum() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            for n in 3..=10 {
                for i in 0..n {
                    if let Ok(l) = lambda_min_link(n, q, i) {
                        assert_eq!(l, laplacian_gap(n - i, q).unwrap(), "({n},{q},{i})");
                    }
                }
            }
        }
    }

    #[test]
    fn p_values() {
        assert_eq!(p_bound(4, 3).unwrap(), BigInt::from(10));
        let twos: Vec<BigInt> = (4..=11).map(|j| p_bound(j, 2).unwrap()).collect();
        let expect = [9, 9, 27, 27, 93, 93, 351, 351].map(BigInt::from);
        assert_eq!(twos, expect.to_vec());
        for q in [3, 4, 5, 7, 8, 9, 11, 13, 16] {
            for j in 3..20 {
                assert!(p_bound(j, q).unwrap() < p_bound(j + 1, q).unwrap());
            }
        }
    }

    #[test]
    fn monotone_in_degree() {
        for q in [3, 4, 5, 7] {
            for n in 3..=12 {
                for i in 0..n - 3 {
                    assert!(general_bound(n, q, i).unwrap() > general_bound(n, q, i + 1).unwrap());
                }
            }
        }
        for n in 4..=14 {
            for i in 0..n - 4 {
                assert!(q2_bound(n, i).unwrap() >= q2_bound(n, i + 1).unwrap());
            }
        }
    }

    #[test]
    fn criterion_agrees_with_bounds() {
        for q in [3, 4, 5] {
            for n in 3..=9 {
                for i in 0..=n - 3 {
                    let v = garland_verdict(n, q, i).unwrap();
                    assert_eq!(v.passes, general_bound(n, q, i).unwrap() > BigInt::from(0));
                }
            }
        }
        for n in 4..=12 {
            for i in 0..=n - 4 {
                let v = garland_verdict(n, 2, i).unwrap();
                assert_eq!(v.passes, q2_bound(n, i).unwrap() > BigInt::from(0), "({n},{i})");
            }
        }
    }

    #[test]
    fn prediction_examples() {
        assert_eq!(vanishing_prediction(4, 5).degrees, set(&[0, 1]));
        assert_eq!(vanishing_prediction(4, 3).degrees, set(&[0]));
        assert_eq!(vanishing_prediction(6, 2).degrees, set(&[0, 1, 2]));
        assert_eq!(vanishing_prediction(4, 2).degrees, set(&[0]));
        assert_eq!(vanishing_prediction(3, 3).degrees, set(&[0]));
        assert!(vanishing_prediction(3, 2).degrees.is_empty());
        // the q = 2 corollary: half connectivity for n >= 11 and n = 7, 8
        for n in [7, 8, 11, 12, 13] {
            let p = vanishing_prediction(n, 2);
            assert!((0..=n / 2).all(|d| p.degrees.contains(&d)), "n={n}");
        }
        let p = vanishing_prediction(4, 3);
        assert!(p.fired.iter().any(|(name, _, _)| name == "codim-four"));
    }
}
