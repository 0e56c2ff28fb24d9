//! Adjacency spectrum of the orthogonality graph, checked exactly.
//!
//! The spectrum is known in closed form, so nothing here uses floating point:
//! the quartic annihilator is evaluated on A entrywise and multiplicities come
//! from ranks of A − μI.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::counts::{d_count, qpow, sign};
use crate::error::{Error, Result};
use crate::graph::{adjacency_powers, OrthGraph};
use crate::linalg::{RankEngine, SparseMatrix};

/// Largest graph accepted by the rank-based multiplicity check.
pub const RANK_VERTEX_LIMIT: usize = 700;

/// Coefficients c₀..c₄ of the quartic annihilator, lowest degree first.
/// Its roots are d_n, ±q^{n−2} and (−1)ⁿq^{n−3}.
pub fn minpoly_coeffs(n: u32, q: u32) -> Result<[BigInt; 5]> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("quartic annihilator needs n >= 3, got {n}")));
    }
    let d = d_count(n, q);
    let s = sign(n);
    let c0 = -(&d * qpow(q, 3 * n - 7) * &s);
    let c1 = &d * qpow(q, 2 * n - 4) + qpow(q, 3 * n - 7) * &s;
    let c2 = &d * qpow(q, n - 3) * &s - qpow(q, 2 * n - 4);
    let c3 = -&d - qpow(q, n - 3) * &s;
    Ok([c0, c1, c2, c3, BigInt::one()])
}

/// The four candidate eigenvalues μ₁..μ₄.
pub fn mu_values(n: u32, q: u32) -> [BigInt; 4] {
    let mu2 = if n >= 2 { qpow(q, n - 2) } else { BigInt::zero() };
    let mu3 = if n >= 3 { sign(n) * qpow(q, n - 3) } else { BigInt::zero() };
    [d_count(n, q), mu2.clone(), mu3, -mu2]
}

/// Distinct eigenvalues, largest (the degree) first.
pub fn eigen_list(n: u32, q: u32) -> Result<Vec<BigInt>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("spectrum needs n >= 2, got {n}")));
    }
    let [m1, m2, m3, m4] = mu_values(n, q);
    Ok(match (n, q) {
        (2, _) => vec![m1, m4],
        (3, 2) => vec![m1, m3],
        (_, 2) if n % 2 == 0 => vec![m1, m3, m4],
        (_, 2) => vec![m1, m3, m2],
        _ => vec![m1, m2, m3, m4],
    })
}

fn ratio_to_int(x: BigRational) -> BigInt {
    assert!(x.is_integer(), "multiplicity {x} is not an integer");
    x.to_integer()
}

/// α₂, α₃, α₄ as exact integers.
fn alphas(n: u32, q: u32) -> (BigInt, BigInt, BigInt) {
    let r = |x: BigInt| BigRational::from_integer(x);
    let dn = r(d_count(n, q));
    let dn1 = r(d_count(n + 1, q));
    let dm1 = r(d_count(n - 1, q));
    let qq = BigInt::from(q);
    let qm1 = r(&qq - 1);
    let base = r(&qq * &qq - &qq - 1);
    let sgn = r(sign(n));
    let two_q = r(BigInt::from(2) * qpow(q, 2 * n - 3));
    let a2 = &dn * &dn1 / &two_q * (&base - &sgn) / &qm1;
    let a4 = &dn * &dn1 / &two_q * (&base + &sgn) / &qm1;
    // q^{2n−8} has a negative exponent at n = 3
    let scale = if 2 * n >= 8 {
        r(qpow(q, 2 * n - 8))
    } else {
        r(BigInt::one()) / r(qpow(q, 8 - 2 * n))
    };
    let a3 = &dn * &dm1 / scale / &qm1;
    (ratio_to_int(a2), ratio_to_int(a3), ratio_to_int(a4))
}

/// Closed-form multiplicities aligned with [`eigen_list`].
pub fn multiplicities_formula(n: u32, q: u32) -> Result<Vec<BigInt>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("spectrum needs n >= 2, got {n}")));
    }
    if n == 2 {
        let half = BigInt::from(q * (q - 1) / 2);
        return Ok(vec![half.clone(), half]);
    }
    let (a2, a3, a4) = alphas(n, q);
    Ok(match (n, q) {
        (3, 2) => vec![BigInt::one() + &a2 + &a4, a3],
        (_, 2) => vec![BigInt::one(), a3, a2 + a4],
        _ => vec![BigInt::one(), a2, a3, a4],
    })
}

/// True iff Σ cₖAᵏ vanishes entrywise; `coeffs` lowest degree first.
pub fn annihilates(g: &OrthGraph, coeffs: &[BigInt]) -> bool {
    if coeffs.is_empty() {
        return true;
    }
    let powers = adjacency_powers(g, coeffs.len() - 1);
    let entries = g.vertex_count() * g.vertex_count();
    (0..entries).into_par_iter().all(|e| {
        let mut acc = BigInt::zero();
        for (c, p) in coeffs.iter().zip(&powers) {
            if !c.is_zero() {
                acc += c * BigInt::from(p[e].clone());
            }
        }
        acc.is_zero()
    })
}

/// Checks the quartic annihilator (X² − 1 when n = 2).
pub fn verify_annihilation(g: &OrthGraph) -> Result<bool> {
    let n = g.n() as u32;
    let coeffs: Vec<BigInt> = if n == 2 {
        vec![BigInt::from(-1), BigInt::zero(), BigInt::one()]
    } else {
        minpoly_coeffs(n, g.q())?.to_vec()
    };
    Ok(annihilates(g, &coeffs))
}

/// A − μI as a sparse integer matrix.
pub fn shifted_adjacency(g: &OrthGraph, mu: i64) -> SparseMatrix {
    let cols = (0..g.vertex_count())
        .map(|j| {
            let mut col: Vec<(u32, i64)> = g.neighbors(j).iter().map(|&i| (i, 1)).collect();
            if mu != 0 {
                col.push((j as u32, -mu));
                col.sort_unstable_by_key(|e| e.0);
            }
            col
        })
        .collect();
    SparseMatrix::new(g.vertex_count(), cols)
}

/// Multiplicities of every root of the annihilator, as V − rank(A − μI).
///
/// Any prime field is sound here: rank mod p never exceeds the rational rank,
/// so each value is at least the true multiplicity, and A is symmetric with all
/// eigenvalues among the roots, so the true values sum to V. A total of V
/// therefore certifies every entry.
pub fn multiplicities_rank(g: &OrthGraph, engine: &dyn RankEngine) -> Result<Vec<(BigInt, BigInt)>> {
    let v = g.vertex_count();
    if v > RANK_VERTEX_LIMIT {
        return Err(Error::InstanceTooLarge(format!(
            "{v} vertices exceeds the multiplicity limit {RANK_VERTEX_LIMIT}"
        )));
    }
    let n = g.n() as u32;
    let mut roots: Vec<BigInt> = if n == 2 {
        vec![BigInt::one(), BigInt::from(-1)]
    } else {
        mu_values(n, g.q()).to_vec()
    };
    roots.sort_by(|a, b| b.cmp(a));
    roots.dedup();
    let mults: Vec<Result<BigInt>> = roots
        .par_iter()
        .map(|mu| {
            let mu = mu.to_i64().ok_or(Error::Overflow("eigenvalue"))?;
            let rank = engine.rank(&shifted_adjacency(g, mu))?;
            Ok(BigInt::from(v - rank))
        })
        .collect();
    let mut out = Vec::with_capacity(roots.len());
    let mut total = BigInt::zero();
    for (mu, m) in roots.into_iter().zip(mults) {
        let m = m?;
        total += &m;
        out.push((mu, m));
    }
    if total != BigInt::from(v) {
        return Err(Error::PrimeCollision(format!(
            "multiplicities over {} sum to {total}, not {v}",
            engine.name()
        )));
    }
    Ok(out)
}

/// Normalized-Laplacian eigenvalues 1 − μ/d_n aligned with [`eigen_list`]; ascending order
/// is the reverse of the eigenvalue order.
pub fn laplacian_spectrum(n: u32, q: u32) -> Result<Vec<BigRational>> {
    let d = BigRational::from_integer(d_count(n, q));
    Ok(eigen_list(n, q)?
        .into_iter()
        .map(|mu| BigRational::one() - BigRational::from_integer(mu) / &d)
        .collect())
}

/// Smallest positive normalized-Laplacian eigenvalue.
pub fn laplacian_gap(n: u32, q: u32) -> Result<BigRational> {
    laplacian_spectrum(n, q)?
        .into_iter()
        .filter(|x| x.is_positive())
        .min()
        .ok_or_else(|| Error::InvalidParameter("no positive eigenvalue".into()))
}

/// Common-neighbour counts over adjacent and over distinct non-adjacent pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborCensus {
    pub adjacent: BTreeSet<u32>,
    pub nonadjacent: BTreeSet<u32>,
}

impl NeighborCensus {
    /// Regularity is assumed; the graph is strongly regular iff both sets are singletons.
    pub fn strongly_regular(&self) -> bool {
        self.adjacent.len() <= 1 && self.nonadjacent.len() <= 1
    }
}

pub fn neighbor_census(g: &OrthGraph) -> NeighborCensus {
    let v = g.vertex_count();
    (0..v)
        .into_par_iter()
        .map(|i| {
            let mut c = NeighborCensus {
                adjacent: BTreeSet::new(),
                nonadjacent: BTreeSet::new(),
            };
            for j in i + 1..v {
                let k = g.common_neighbors(i, j);
                if g.adjacent(i, j) {
                    c.adjacent.insert(k);
                } else {
                    c.nonadjacent.insert(k);
                }
            }
            c
        })
        .reduce(
            || NeighborCensus {
                adjacent: BTreeSet::new(),
                nonadjacent: BTreeSet::new(),
            },
            |mut a, b| {
                a.adjacent.extend(b.adjacent);
                a.nonadjacent.extend(b.nonadjacent);
                a
            },
        )
}

/// Power sums Σ mult·μᵏ for k = 0, 1, 2 against V, 0 and V·d_n.
pub fn trace_identities(n: u32, q: u32, eig: &[BigInt], mult: &[BigInt]) -> [bool; 3] {
    let v = d_count(n + 1, q);
    let d = d_count(n, q);
    let s0: BigInt = mult.iter().sum();
    let s1: BigInt = eig.iter().zip(mult).map(|(e, m)| e * m).sum();
    let s2: BigInt = eig.iter().zip(mult).map(|(e, m)| e * e * m).sum();
    [s0 == v, s1.is_zero(), s2 == &v * &d]
}

/// Spectrum of one instance with the checks that accompany it.
#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub n: u32,
    pub q: u32,
    pub eigenvalues: Vec<BigInt>,
    pub multiplicities: Vec<BigInt>,
    /// Empty when n = 2, where the annihilator is X² − 1.
    pub minpoly_coeffs: Vec<BigInt>,
    pub annihilation_ok: bool,
    /// Rank-based multiplicities, when the graph was small enough.
    pub rank_multiplicities: Option<Vec<BigInt>>,
    pub trace_ok: bool,
    pub laplacian: Vec<BigRational>,
    pub strongly_regular: bool,
}

impl SpectrumReport {
    pub fn consistent(&self) -> bool {
        self.annihilation_ok
            && self.trace_ok
            && self
                .rank_multiplicities
                .as_ref()
                .is_none_or(|r| *r == self.multiplicities)
    }
}

/// Full spectrum check for a built graph.
pub fn spectrum_report(g: &OrthGraph, engine: &dyn RankEngine) -> Result<SpectrumReport> {
    let (n, q) = (g.n() as u32, g.q());
    let eigenvalues = eigen_list(n, q)?;
    let multiplicities = multiplicities_formula(n, q)?;
    let minpoly = if n >= 3 { minpoly_coeffs(n, q)?.to_vec() } else { Vec::new() };
    let annihilation_ok = verify_annihilation(g)?;
    let rank_multiplicities = if g.vertex_count() <= RANK_VERTEX_LIMIT {
        let by_root = multiplicities_rank(g, engine)?;
        Some(
            eigenvalues
                .iter()
                .map(|e| {
                    by_root
                        .iter()
                        .find(|(mu, _)| mu == e)
                        .map(|(_, m)| m.clone())
                        .unwrap_or_default()
                })
                .collect(),
        )
    } else {
        None
    };
    let trace_ok = trace_identities(n, q, &eigenvalues, &multiplicities)
        .iter()
        .all(|&b| b);
    Ok(SpectrumReport {
        n,
        q,
        laplacian: laplacian_spectrum(n, q)?,
        strongly_regular: neighbor_census(g).strongly_regular(),
        eigenvalues,
        multiplicities,
        minpoly_coeffs: minpoly,
        annihilation_ok,
        rank_multiplicities,
        trace_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::linalg::{bareiss_rank, engine_registry, prime_engine};

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn coefficient_examples() {
        let c = minpoly_coeffs(3, 3).unwrap();
        assert_eq!(c[3], BigInt::from(-5));
        assert_eq!(minpoly_coeffs(4, 2).unwrap()[2], BigInt::from(8));
        assert!(minpoly_coeffs(2, 3).is_err());
    }

    #[test]
    fn list_examples() {
        assert_eq!(eigen_list(4, 2).unwrap(), ints(&[12, 2, -4]));
        assert_eq!(multiplicities_formula(4, 2).unwrap(), ints(&[1, 24, 15]));
        assert_eq!(eigen_list(3, 3).unwrap(), ints(&[6, 3, -1, -3]));
        assert_eq!(multiplicities_formula(3, 3).unwrap(), ints(&[1, 21, 27, 14]));
        assert_eq!(eigen_list(2, 3).unwrap(), ints(&[1, -1]));
        assert_eq!(multiplicities_formula(2, 3).unwrap(), ints(&[3, 3]));
        assert_eq!(multiplicities_formula(3, 2).unwrap(), ints(&[4, 8]));
    }

    #[test]
    fn formula_traces_hold_widely() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            for n in 2..=9 {
                let e = eigen_list(n, q).unwrap();
                let m = multiplicities_formula(n, q).unwrap();
                assert_eq!(trace_identities(n, q, &e, &m), [true; 3], "({n},{q})");
            }
        }
    }

    #[test]
    fn annihilation_and_quadratic() {
        for (n, q) in [(3, 2), (3, 3), (4, 2)] {
            let g = build_graph(n, q).unwrap();
            assert!(verify_annihilation(&g).unwrap(), "({n},{q})");
        }
        let g = build_graph(3, 2).unwrap();
        // (X − 2)(X + 1)
        assert!(annihilates(&g, &ints(&[-2, -1, 1])));
        // the cubic without the −1 factor does not annihilate
        assert!(!annihilates(&g, &ints(&[-2, 1])));
        let g = build_graph(2, 3).unwrap();
        assert!(verify_annihilation(&g).unwrap());
    }

    #[test]
    fn rank_multiplicities_match() {
        let reg = engine_registry();
        for (n, q) in [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2)] {
            let g = build_graph(n, q).unwrap();
            let r = spectrum_report(&g, reg.get("modp").unwrap().as_ref()).unwrap();
            assert!(r.consistent(), "({n},{q})");
            assert_eq!(r.rank_multiplicities.unwrap(), r.multiplicities);
        }
        let g = build_graph(3, 2).unwrap();
        // roots collide mod 2, so the certificate must reject the result
        assert!(multiplicities_rank(&g, reg.get("gf2").unwrap().as_ref()).is_err());
        let m = multiplicities_rank(&g, prime_engine(5).unwrap().as_ref()).unwrap();
        // μ₁ = μ₂ = 2 here
        let expected = [(2, 4), (-1, 8), (-2, 0)].map(|(a, b)| (BigInt::from(a), BigInt::from(b)));
        assert_eq!(m, expected.to_vec());
    }

    #[test]
    fn fraction_free_oracle_agrees() {
        let g = build_graph(3, 3).unwrap();
        let e = eigen_list(3, 3).unwrap();
        let m = multiplicities_formula(3, 3).unwrap();
        for (mu, mult) in e.iter().zip(&m) {
            let r = bareiss_rank(&shifted_adjacency(&g, mu.to_i64().unwrap()));
            assert_eq!(BigInt::from(g.vertex_count() - r), *mult);
        }
    }

    #[test]
    fn laplacian_examples() {
        let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert_eq!(laplacian_gap(4, 3).unwrap(), r(6, 7));
        assert_eq!(laplacian_gap(3, 3).unwrap(), r(1, 2));
        for (n, q) in [(2, 3), (3, 2), (5, 4)] {
            assert!(laplacian_spectrum(n, q).unwrap().contains(&BigRational::zero()));
        }
    }

    #[test]
    fn strong_regularity_census() {
        assert!(neighbor_census(&build_graph(4, 2).unwrap()).strongly_regular());
        let c = neighbor_census(&build_graph(3, 3).unwrap());
        assert!(!c.strongly_regular());
        // d_{n−1} and d¹_{n−1} at n = 3: 1 and q^2·d_1... both realised
        assert_eq!(c.nonadjacent.len(), 2);
    }
}
