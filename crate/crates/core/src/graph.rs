//! The orthogonality graph G(V) on non-degenerate lines, walk counts and connectivity.

use std::collections::VecDeque;
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::counts::{d_count, d_rad, iso, qpow, sign};
use crate::error::{Error, Result};
use crate::hermitian::{HermSpace, Line, Position};

/// Default cap on the number of vertices of a graph we are willing to build.
pub const MAX_VERTICES: usize = 100_000;

#[derive(Clone, Debug)]
pub struct OrthGraph {
    space: HermSpace,
    vertices: Vec<Line>,
    words: usize,
    bits: Vec<u64>,
    neighbors: Vec<Vec<u32>>,
}

/// G(V) for the standard form on GF(q²)^n.
pub fn build_graph(n: usize, q: u32) -> Result<OrthGraph> {
    if n < 1 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    OrthGraph::build(HermSpace::standard(q, n)?, MAX_VERTICES)
}

impl OrthGraph {
    /// Builds G(V) for an arbitrary (possibly degenerate) space, refusing more than `cap` vertices.
    pub fn build(space: HermSpace, cap: usize) -> Result<OrthGraph> {
        let n = space.dim() as u32;
        let expected = d_rad(n, space.q(), space.rad_dim() as u32)?;
        if expected > BigInt::from(cap) {
            return Err(Error::InstanceTooLarge(format!(
                "{expected} vertices exceed the cap of {cap}"
            )));
        }
        let vertices = space.enum_lines();
        let count = vertices.len();
        let words = count.div_ceil(64).max(1);
        let duals: Vec<_> = vertices.iter().map(|l| space.dual(&l.rep)).collect();
        let neighbors: Vec<Vec<u32>> = (0..count)
            .into_par_iter()
            .map(|i| {
                (0..count)
                    .filter(|&j| j != i && space.dot(&vertices[i].rep, &duals[j]).is_zero())
                    .map(|j| j as u32)
                    .collect()
            })
            .collect();
        let mut bits = vec![0u64; count * words];
        for (i, nb) in neighbors.iter().enumerate() {
            for &j in nb {
                bits[i * words + j as usize / 64] |= 1u64 << (j % 64);
            }
        }
        Ok(OrthGraph {
            space,
            vertices,
            words,
            bits,
            neighbors,
        })
    }

    pub fn space(&self) -> &HermSpace {
        &self.space
    }

    pub fn n(&self) -> usize {
        self.space.dim()
    }

    pub fn q(&self) -> u32 {
        self.space.q()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Line] {
        &self.vertices
    }

    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.neighbors[i]
    }

    /// Packed adjacency row of vertex i, `words_per_row` u64 words.
    pub fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    pub fn words_per_row(&self) -> usize {
        self.words
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// The common degree, if the graph is regular.
    pub fn degree(&self) -> Option<usize> {
        let d = self.neighbors.first().map_or(0, Vec::len);
        self.neighbors.iter().all(|nb| nb.len() == d).then_some(d)
    }

    pub fn common_neighbors(&self, i: usize, j: usize) -> u32 {
        self.row(i)
            .iter()
            .zip(self.row(j))
            .map(|(a, b)| (a & b).count_ones())
            .sum()
    }

    pub fn position(&self, i: usize, j: usize) -> Position {
        self.space.position(&self.vertices[i], &self.vertices[j])
    }

    /// Position classes of all ordered pairs, row-major.
    pub fn class_matrix(&self) -> Vec<Position> {
        let v = self.vertex_count();
        (0..v)
            .into_par_iter()
            .flat_map_iter(|i| (0..v).map(move |j| (i, j)))
            .map(|(i, j)| self.position(i, j))
            .collect()
    }

    /// Connected components as sorted vertex lists, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<u32>> {
        let v = self.vertex_count();
        let mut label = vec![usize::MAX; v];
        let mut comps = Vec::new();
        for start in 0..v {
            if label[start] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut members = vec![start as u32];
            label[start] = id;
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                for &y in &self.neighbors[x] {
                    if label[y as usize] == usize::MAX {
                        label[y as usize] = id;
                        members.push(y);
                        queue.push_back(y as usize);
                    }
                }
            }
            members.sort_unstable();
            comps.push(members);
        }
        comps
    }

    fn eccentricity(&self, start: usize) -> u32 {
        let mut dist = vec![u32::MAX; self.vertex_count()];
        dist[start] = 0;
        let mut queue = VecDeque::from([start]);
        let mut far = 0;
        while let Some(x) = queue.pop_front() {
            far = far.max(dist[x]);
            for &y in &self.neighbors[x] {
                if dist[y as usize] == u32::MAX {
                    dist[y as usize] = dist[x] + 1;
                    queue.push_back(y as usize);
                }
            }
        }
        far
    }

    /// Diameter of each component, in the order of [`OrthGraph::components`].
    pub fn diameters(&self) -> Vec<u32> {
        self.components()
            .iter()
            .map(|c| {
                c.par_iter()
                    .map(|&x| self.eccentricity(x as usize))
                    .max()
                    .unwrap_or(0)
            })
            .collect()
    }

    /// Edge list with a one-line header; vertices are 0-based indices.
    pub fn edge_list(&self) -> String {
        let mut out = format!(
            "# n={} q={} vertices={} degree={}\n",
            self.n(),
            self.q(),
            self.vertex_count(),
            self.degree().map_or("irregular".to_string(), |d| d.to_string())
        );
        for (i, nb) in self.neighbors.iter().enumerate() {
            for &j in nb.iter().filter(|&&j| j as usize > i) {
                writeln!(out, "{i} {j}").unwrap();
            }
        }
        out
    }

    /// Adjacency matrix in MatrixMarket coordinate format, 1-based.
    pub fn matrix_market(&self) -> String {
        let v = self.vertex_count();
        let nnz: usize = self.neighbors.iter().map(Vec::len).sum();
        let mut out = format!("%%MatrixMarket matrix coordinate integer general\n{v} {v} {nnz}\n");
        for (i, nb) in self.neighbors.iter().enumerate() {
            for &j in nb {
                writeln!(out, "{} {} 1", i + 1, j + 1).unwrap();
            }
        }
        out
    }
}

/// Entry type for adjacency powers: a fixed-width fast path with a big-integer fallback.
trait WalkScalar: Clone + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn checked_add(&self, other: &Self) -> Option<Self>;
    fn to_big(&self) -> BigUint;
}

impl WalkScalar for u128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn checked_add(&self, other: &Self) -> Option<Self> {
        u128::checked_add(*self, *other)
    }
    fn to_big(&self) -> BigUint {
        BigUint::from(*self)
    }
}

impl WalkScalar for BigUint {
    fn zero() -> Self {
        <BigUint as Zero>::zero()
    }
    fn one() -> Self {
        BigUint::from(1u32)
    }
    fn checked_add(&self, other: &Self) -> Option<Self> {
        Some(self + other)
    }
    fn to_big(&self) -> BigUint {
        self.clone()
    }
}

/// A^0, …, A^kmax; A^k = A·A^{k−1} as sums of rows since A is 0/1.
fn powers_in<T: WalkScalar>(g: &OrthGraph, kmax: usize) -> Option<Vec<Vec<T>>> {
    let v = g.vertex_count();
    let mut id = vec![T::zero(); v * v];
    for i in 0..v {
        id[i * v + i] = T::one();
    }
    let mut out = vec![id];
    for _ in 0..kmax {
        let prev = out.last().unwrap();
        let rows: Option<Vec<Vec<T>>> = (0..v)
            .into_par_iter()
            .map(|i| {
                let mut row = vec![T::zero(); v];
                for &t in g.neighbors(i) {
                    let src = &prev[t as usize * v..(t as usize + 1) * v];
                    for (acc, x) in row.iter_mut().zip(src) {
                        *acc = acc.checked_add(x)?;
                    }
                }
                Some(row)
            })
            .collect();
        out.push(rows?.concat());
    }
    Some(out)
}

/// Exact adjacency powers A^0..=A^kmax, row-major.
pub fn adjacency_powers(g: &OrthGraph, kmax: usize) -> Vec<Vec<BigUint>> {
    match powers_in::<u128>(g, kmax) {
        Some(p) => p
            .into_iter()
            .map(|m| m.iter().map(WalkScalar::to_big).collect())
            .collect(),
        None => powers_in::<BigUint>(g, kmax).expect("big integers never overflow"),
    }
}

/// Walk counts of one length, one value per position class; None marks an empty class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkTable {
    pub k: usize,
    pub values: [Option<BigInt>; 4],
}

impl WalkTable {
    pub fn get(&self, c: Position) -> Option<&BigInt> {
        self.values[c.index()].as_ref()
    }
}

fn table_from_power(power: &[BigUint], classes: &[Position], k: usize) -> Result<WalkTable> {
    let mut values: [Option<BigInt>; 4] = Default::default();
    for (x, &c) in power.iter().zip(classes) {
        let x = BigInt::from(x.clone());
        match &values[c.index()] {
            None => values[c.index()] = Some(x),
            Some(prev) if *prev != x => {
                return Err(Error::ClassNotConstant(format!("{} at length {k}", c.label())))
            }
            Some(_) => {}
        }
    }
    Ok(WalkTable { k, values })
}

/// Walk tables for every length 0..=kmax from exact adjacency powers.
pub fn walk_tables(g: &OrthGraph, kmax: usize) -> Result<Vec<WalkTable>> {
    if kmax > 4 {
        return Err(Error::InvalidParameter("walk length is capped at 4".into()));
    }
    let classes = g.class_matrix();
    adjacency_powers(g, kmax)
        .iter()
        .enumerate()
        .map(|(k, p)| table_from_power(p, &classes, k))
        .collect()
}

pub fn walks_matrix(g: &OrthGraph, k: usize) -> Result<WalkTable> {
    Ok(walk_tables(g, k)?.pop().expect("kmax + 1 tables"))
}

/// (η0, η1, η2, η3) for a pair in class c, in dimension n ≥ 3.
pub fn eta_formula(n: u32, q: u32, c: Position) -> Result<[BigInt; 4]> {
    if n < 3 {
        return Err(Error::InvalidParameter("eta values need n ≥ 3".into()));
    }
    let d = |k| d_count(k, q);
    let d1 = d_rad(n - 2, q, 1)?;
    let qb = BigInt::from(q);
    let (e1, e2, e3) = match c {
        Position::Equal => (d(n), BigInt::zero(), BigInt::zero()),
        Position::Perp => (d(n - 1), d(n) - d(n - 1) - iso(n - 2, q) - 1, iso(n - 2, q)),
        Position::NonDegenerate => (
            d(n - 1),
            d(n) - d(n - 1) * (&qb + 2),
            d(n - 1) * (&qb + 1),
        ),
        Position::Degenerate => (
            d1,
            qpow(q, 2 * n - 4) - qpow(q, 2 * n - 5) * 2,
            qpow(q, 2 * n - 5),
        ),
    };
    Ok([d(n) - &e3, e1, e2, e3])
}

fn l3_raw(n: u32, q: u32, c: Position) -> BigInt {
    let base = d_count(n, q) * d_count(n - 1, q);
    let t = || qpow(q, 3 * n - 8) * sign(n);
    match c {
        Position::Equal => base,
        Position::Perp => base + t() - qpow(q, 2 * n - 6) + qpow(q, 2 * n - 4),
        Position::NonDegenerate => base + t() - qpow(q, 2 * n - 6),
        Position::Degenerate => base + t(),
    }
}

/// Closed-form walk counts. The ND class is empty for q = 2 and reported as 0.
pub fn walks_formula(n: u32, q: u32, k: u32, c: Position) -> Result<BigInt> {
    if q == 2 && c == Position::NonDegenerate && k >= 1 {
        return Ok(BigInt::zero());
    }
    if n < 2 {
        return Err(Error::InvalidParameter("walk formulas need n ≥ 2".into()));
    }
    let d = |k| d_count(k, q);
    // d¹_{n−1}: lines of an (n−2)-space with a 1-dimensional radical
    let d1 = || d_rad(n - 2, q, 1).expect("n ≥ 2");
    Ok(match k {
        0 => BigInt::from((c == Position::Equal) as u32),
        1 => BigInt::from((c == Position::Perp) as u32),
        2 => match c {
            Position::Equal => d(n),
            Position::Perp | Position::NonDegenerate => d(n - 1),
            Position::Degenerate => d1(),
        },
        3 | 4 if n < 3 => {
            return Err(Error::InvalidParameter("walks of length 3 and 4 need n ≥ 3".into()))
        }
        3 => l3_raw(n, q, c),
        4 => {
            // the q = 2 ND value enters only with a vanishing coefficient
            let perp = l3_raw(n, q, Position::Perp);
            let nd = l3_raw(n, q, Position::NonDegenerate);
            let dg = l3_raw(n, q, Position::Degenerate);
            let i2 = iso(n - 2, q);
            match c {
                Position::Equal => d(n) * &perp,
                Position::Perp => {
                    (d(n) + &perp) * d(n - 1) + &nd * (d(n) - d(n - 1) - &i2 - 1) + &dg * &i2
                }
                Position::NonDegenerate => {
                    &perp * d(n - 1)
                        + &nd * (d(n) - d(n - 1))
                        + (&dg - &nd) * d(n - 1) * (q + 1)
                }
                Position::Degenerate => {
                    &perp * d1() + &nd * (d(n) - d1()) + (&dg - &nd) * qpow(q, 2 * n - 5)
                }
            }
        }
        _ => return Err(Error::InvalidParameter("walk length must be at most 4".into())),
    })
}

/// Walk counts from the one-step recursion over the η values, for n ≥ 3.
pub fn walks_recursion(n: u32, q: u32, kmax: u32) -> Result<Vec<[BigInt; 4]>> {
    let etas: Vec<[BigInt; 4]> = Position::ALL
        .iter()
        .map(|&c| eta_formula(n, q, c))
        .collect::<Result<_>>()?;
    let mut cur: [BigInt; 4] = std::array::from_fn(|i| BigInt::from((i == 0) as u32));
    let mut out = vec![cur.clone()];
    for _ in 0..kmax {
        let next: [BigInt; 4] = std::array::from_fn(|ci| {
            let e = &etas[ci];
            let back = if ci == Position::Perp.index() {
                cur[0].clone()
            } else {
                BigInt::zero()
            };
            back + &e[1] * &cur[1] + &e[2] * &cur[2] + &e[3] * &cur[3]
        });
        cur = next;
        out.push(cur.clone());
    }
    Ok(out)
}

/// What the connectivity theorem predicts for the standard space of dimension n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectivityExpectation {
    pub connected: bool,
    /// Component count when disconnected and known.
    pub components: Option<u64>,
    /// Diameter when connected.
    pub diameter: Option<u32>,
}

pub fn expected_connectivity(n: u32, q: u32) -> ConnectivityExpectation {
    match (n, q) {
        (1, _) => ConnectivityExpectation {
            connected: true,
            components: Some(1),
            diameter: Some(0),
        },
        (2, 2) => ConnectivityExpectation {
            connected: true,
            components: Some(1),
            diameter: Some(1),
        },
        (2, _) => ConnectivityExpectation {
            connected: false,
            components: crate::counts::points_dim2(q).to_u64(),
            diameter: None,
        },
        (3, 2) => ConnectivityExpectation {
            connected: false,
            components: Some(4),
            diameter: None,
        },
        // finite fields always have isotropic vectors in dimension ≥ 2
        (3, _) => ConnectivityExpectation {
            connected: true,
            components: Some(1),
            diameter: Some(3),
        },
        _ => ConnectivityExpectation {
            connected: true,
            components: Some(1),
            diameter: Some(2),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldElem;
    use crate::hermitian::Subspace;
    use num_bigint::BigInt;

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn small_graphs() {
        let g = build_graph(3, 2).unwrap();
        assert_eq!((g.vertex_count(), g.degree()), (12, Some(2)));
        let g = build_graph(4, 2).unwrap();
        assert_eq!((g.vertex_count(), g.degree()), (40, Some(12)));
        let g = build_graph(2, 2).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 1));
        for i in 0..g.vertex_count() {
            assert!(!g.adjacent(i, i));
        }
    }

    #[test]
    fn walk_examples() {
        let g = build_graph(3, 2).unwrap();
        let t2 = walks_matrix(&g, 2).unwrap();
        assert_eq!(t2.get(Position::Equal), Some(&b(2)));
        assert_eq!(t2.get(Position::Degenerate), Some(&b(0)));
        let t3 = walks_matrix(&g, 3).unwrap();
        assert_eq!(t3.get(Position::Perp), Some(&b(3)));
        assert_eq!(walks_formula(4, 3, 3, Position::Equal).unwrap(), b(378));
        assert_eq!(walks_formula(4, 2, 3, Position::Degenerate).unwrap(), b(40));
    }

    #[test]
    fn formulas_match_matrix_and_recursion() {
        for (n, q) in [(3, 2), (3, 3), (4, 2), (3, 4)] {
            let g = build_graph(n, q).unwrap();
            let tables = walk_tables(&g, 4).unwrap();
            let rec = walks_recursion(n as u32, q, 4).unwrap();
            for (k, t) in tables.iter().enumerate() {
                for c in Position::ALL {
                    let f = walks_formula(n as u32, q, k as u32, c).unwrap();
                    if let Some(v) = t.get(c) {
                        assert_eq!(v, &f, "n={n} q={q} k={k} {c:?}");
                    }
                    if !(q == 2 && c == Position::NonDegenerate) {
                        assert_eq!(rec[k][c.index()], f, "recursion n={n} q={q} k={k} {c:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn eta_brute_matches_table() {
        for (n, q) in [(3, 2), (3, 3), (4, 2)] {
            let g = build_graph(n, q).unwrap();
            let sp = g.space();
            let lines = g.vertices();
            for s in lines {
                for w in lines {
                    let c = sp.position(s, w);
                    let eta = sp.eta_counts(lines, s, w);
                    let f = eta_formula(n as u32, q, c).unwrap();
                    for i in 0..4 {
                        assert_eq!(b(eta[i] as i64), f[i], "n={n} q={q} {c:?} eta{i}");
                    }
                    let perp = (c == Position::Perp) as u64;
                    assert_eq!(eta[0] + eta[3], d_count(n as u32, q).to_u64().unwrap());
                    assert_eq!(eta[0], eta[1] + eta[2] + perp);
                }
            }
        }
        let sp = HermSpace::standard(3, 4).unwrap();
        let lines = sp.enum_lines();
        let s = &lines[0];
        let w = lines
            .iter()
            .find(|w| sp.position(s, w) == Position::NonDegenerate)
            .unwrap();
        assert_eq!(sp.eta_brute(3, s, w).unwrap(), 24);
    }

    #[test]
    fn two_walks_count_complement_lines() {
        let g = build_graph(4, 3).unwrap();
        let sp = g.space();
        let f = sp.field_arc().clone();
        let p2 = &adjacency_powers(&g, 2)[2];
        let v = g.vertex_count();
        for i in (0..v).step_by(37) {
            for j in (0..v).step_by(11) {
                let sum = Subspace::span(
                    &f,
                    4,
                    &[g.vertices()[i].rep.clone(), g.vertices()[j].rep.clone()],
                );
                let perp = sp.orth_complement(&sum).unwrap();
                let inner = sp.restrict(&perp).unwrap();
                let count = inner.enum_lines().len();
                assert_eq!(p2[i * v + j], BigUint::from(count));
            }
        }
    }

    #[test]
    fn length_three_positivity() {
        for (n, q) in [(3, 2), (3, 3), (4, 2)] {
            let g = build_graph(n, q).unwrap();
            let p3 = &adjacency_powers(&g, 3)[3];
            let v = g.vertex_count();
            for i in 0..v {
                for j in 0..v {
                    let nondeg_sum = g.position(i, j) != Position::Degenerate;
                    let positive = !p3[i * v + j].is_zero();
                    assert_eq!(positive, (n, q) != (3, 2) || nondeg_sum);
                }
            }
        }
    }

    #[test]
    fn connectivity_cases() {
        for (n, q) in [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2)] {
            let g = build_graph(n, q).unwrap();
            let exp = expected_connectivity(n as u32, q);
            let comps = g.components();
            assert_eq!(comps.len() == 1, exp.connected);
            assert_eq!(Some(comps.len() as u64), exp.components);
            if exp.connected {
                assert_eq!(g.diameters(), vec![exp.diameter.unwrap()]);
            }
        }
    }

    #[test]
    fn degenerate_reduction() {
        // corank-1 forms: connectivity matches the quotient of dimension n − 1
        for (n, q) in [(3, 2), (3, 3), (4, 2), (4, 3)] {
            let f = std::sync::Arc::new(crate::field::FieldTable::new(q).unwrap());
            let gram: Vec<Vec<FieldElem>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| if i == j && i + 1 < n { FieldElem::ONE } else { FieldElem::ZERO })
                        .collect()
                })
                .collect();
            let sp = HermSpace::new(f, gram).unwrap();
            assert_eq!(sp.rad_dim(), 1);
            let g = OrthGraph::build(sp, MAX_VERTICES).unwrap();
            assert_eq!(
                BigInt::from(g.vertex_count()),
                d_rad(n as u32, q, 1).unwrap()
            );
            let quotient = build_graph(n - 1, q).unwrap();
            assert_eq!(
                g.components().len() == 1,
                quotient.components().len() == 1,
                "n={n} q={q}"
            );
        }
    }

    #[test]
    fn too_large_is_refused() {
        let sp = HermSpace::standard(3, 4).unwrap();
        assert!(matches!(OrthGraph::build(sp, 100), Err(Error::InstanceTooLarge(_))));
    }

    #[test]
    fn exports() {
        let g = build_graph(2, 2).unwrap();
        assert_eq!(g.edge_list(), "# n=2 q=2 vertices=2 degree=1\n0 1\n");
        assert!(g.matrix_market().starts_with("%%MatrixMarket matrix coordinate integer general\n2 2 2\n"));
    }
}
