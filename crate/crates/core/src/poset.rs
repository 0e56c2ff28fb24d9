//! Finite posets attached to a unitary space: non-degenerate subspaces,
//! orthogonal decompositions and frame posets, with their order complexes.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::complex::{clique_complex, SimComplex, Simplices, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::graph::OrthGraph;
use crate::hermitian::Subspace;

/// Largest poset any builder here will produce.
pub const MAX_ELEMENTS: usize = 200_000;

/// A finite poset with the strict order stored as down-sets.
#[derive(Clone, Debug)]
pub struct FinPoset {
    keys: Vec<String>,
    /// Elements strictly below each element, sorted.
    below: Vec<Vec<u32>>,
}

impl FinPoset {
    /// `below[i]` lists every element strictly below i; it must be transitively closed.
    pub fn new(keys: Vec<String>, mut below: Vec<Vec<u32>>) -> Result<FinPoset> {
        assert_eq!(keys.len(), below.len());
        for b in &mut below {
            b.sort_unstable();
            b.dedup();
        }
        let p = FinPoset { keys, below };
        for (i, b) in p.below.iter().enumerate() {
            for &j in b {
                if j as usize == i || p.less(i, j as usize) {
                    return Err(Error::InvalidParameter(format!("relation has a cycle through {i}")));
                }
                if !p.below[j as usize].iter().all(|k| b.binary_search(k).is_ok()) {
                    return Err(Error::InvalidParameter(format!("relation not transitive at {i}")));
                }
            }
        }
        Ok(p)
    }

    /// Builds from a strict order predicate, checking every pair.
    pub fn from_relation(keys: Vec<String>, less: impl Fn(usize, usize) -> bool) -> Result<FinPoset> {
        let n = keys.len();
        let below = (0..n)
            .map(|j| (0..n).filter(|&i| i != j && less(i, j)).map(|i| i as u32).collect())
            .collect();
        FinPoset::new(keys, below)
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn key(&self, i: usize) -> &str {
        &self.keys[i]
    }

    pub fn index_of(&self, key: &str) -> Option<usize> {
        self.keys.iter().position(|k| k == key)
    }

    /// i < j.
    pub fn less(&self, i: usize, j: usize) -> bool {
        self.below[j].binary_search(&(i as u32)).is_ok()
    }

    pub fn below(&self, i: usize) -> &[u32] {
        &self.below[i]
    }

    pub fn above(&self) -> Vec<Vec<u32>> {
        let mut up = vec![Vec::new(); self.len()];
        for (j, b) in self.below.iter().enumerate() {
            for &i in b {
                up[i as usize].push(j as u32);
            }
        }
        up
    }

    /// Covering pairs (a, b) with a ⋖ b.
    pub fn covers(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for (j, b) in self.below.iter().enumerate() {
            for &i in b {
                if !b.iter().any(|&k| self.less(i as usize, k as usize)) {
                    out.push((i, j as u32));
                }
            }
        }
        out
    }

    /// Elements listed so that everything below an element comes before it.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&i| self.below[i].len());
        order
    }

    /// The induced subposet on `elements`, in the given order.
    pub fn subposet(&self, elements: &[usize]) -> FinPoset {
        let pos: HashMap<usize, u32> = elements.iter().enumerate().map(|(a, &e)| (e, a as u32)).collect();
        let keys = elements.iter().map(|&e| self.keys[e].clone()).collect();
        let below = elements
            .iter()
            .map(|&e| self.below[e].iter().filter_map(|i| pos.get(&(*i as usize)).copied()).collect())
            .collect();
        FinPoset::new(keys, below).expect("induced order")
    }

    pub fn dual(&self) -> FinPoset {
        let keys = self.keys.clone();
        FinPoset::new(keys, self.above()).expect("dual order")
    }

    /// μ(0̂, x) in the poset with a bottom adjoined, for every x. This equals the
    /// reduced Euler characteristic of the order complex of the down-set below x.
    pub fn mobius_from_bottom(&self) -> Vec<BigInt> {
        let mut mu = vec![BigInt::zero(); self.len()];
        for x in self.linear_extension() {
            let mut m = BigInt::from(-1);
            for &y in &self.below[x] {
                m -= &mu[y as usize];
            }
            mu[x] = m;
        }
        mu
    }

    /// Reduced Euler characteristic of the order complex, via the Möbius function.
    pub fn euler_reduced(&self) -> BigInt {
        let mut m = BigInt::from(-1);
        for x in self.mobius_from_bottom() {
            m -= x;
        }
        m
    }

    /// Maximal chains all have the same length.
    pub fn is_graded(&self) -> bool {
        self.order_complex(DEFAULT_BUDGET).map(|k| k.is_pure()).unwrap_or(false)
    }

    /// Order complex: one vertex per element, one simplex per chain.
    pub fn order_complex(&self, budget: usize) -> Result<SimComplex> {
        let up = self.above();
        let mut levels: Vec<Vec<Vec<u32>>> = Vec::new();
        let mut frontier: Vec<Vec<u32>> = (0..self.len() as u32).map(|i| vec![i]).collect();
        while !frontier.is_empty() {
            if frontier.len() > budget {
                return Err(Error::InstanceTooLarge(format!(
                    "{} chains of length {} exceeds budget {budget}",
                    frontier.len(),
                    levels.len() + 1
                )));
            }
            let mut next = Vec::new();
            for c in &frontier {
                for &y in &up[*c.last().unwrap() as usize] {
                    let mut d = c.clone();
                    d.push(y);
                    next.push(d);
                }
            }
            levels.push(std::mem::replace(&mut frontier, next));
        }
        Ok(SimComplex::from_levels(
            levels
                .into_iter()
                .enumerate()
                .map(|(k, t)| Simplices::from_tuples(k + 1, t))
                .collect(),
        ))
    }

    /// "element <id> <key>" lines, then "cover <a> <b>" lines.
    pub fn export(&self) -> String {
        let mut out = String::new();
        for (i, k) in self.keys.iter().enumerate() {
            writeln!(out, "element {i} {k}").unwrap();
        }
        let mut covers = self.covers();
        covers.sort_unstable();
        for (a, b) in covers {
            writeln!(out, "cover {a} {b}").unwrap();
        }
        out
    }
}

/// Whether two posets are isomorphic, by backtracking over elements matched on
/// the sizes of their down-sets and up-sets.
pub fn isomorphic(a: &FinPoset, b: &FinPoset) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let (ua, ub) = (a.above(), b.above());
    let sig = |p: &FinPoset, up: &[Vec<u32>], i: usize| (p.below[i].len(), up[i].len());
    let sa: Vec<_> = (0..a.len()).map(|i| sig(a, &ua, i)).collect();
    let sb: Vec<_> = (0..b.len()).map(|i| sig(b, &ub, i)).collect();
    let order = a.linear_extension();
    {
        let (mut x, mut y) = (sa.clone(), sb.clone());
        x.sort_unstable();
        y.sort_unstable();
        if x != y {
            return false;
        }
    }
    let mut map = vec![usize::MAX; a.len()];
    let mut used = vec![false; b.len()];
    #[allow(clippy::too_many_arguments)]
    fn go(
        k: usize,
        order: &[usize],
        a: &FinPoset,
        b: &FinPoset,
        sa: &[(usize, usize)],
        sb: &[(usize, usize)],
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        let Some(&x) = order.get(k) else { return true };
        for y in 0..b.len() {
            if used[y] || sa[x] != sb[y] {
                continue;
            }
            // relations with already-mapped elements must match both ways
            let ok = order[..k].iter().all(|&z| {
                let w = map[z];
                a.less(z, x) == b.less(w, y) && a.less(x, z) == b.less(y, w)
            });
            if !ok {
                continue;
            }
            map[x] = y;
            used[y] = true;
            if go(k + 1, order, a, b, sa, sb, map, used) {
                return true;
            }
            used[y] = false;
        }
        map[x] = usize::MAX;
        false
    }
    go(0, &order, a, b, &sa, &sb, &mut map, &mut used)
}

/// Set partitions of 0..r as block-label vectors (restricted growth strings).
pub fn set_partitions(r: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, r: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if i == r {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max {
            cur.push(b);
            rec(i + 1, r, cur, max.max(b + 1), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if r == 0 {
        out.push(Vec::new());
    } else {
        rec(0, r, &mut Vec::new(), 0, &mut out);
    }
    out
}

/// The lattice Π_r of set partitions of an r-set ordered by refinement.
pub fn partition_lattice(r: usize) -> FinPoset {
    let parts = set_partitions(r);
    let keys = parts.iter().map(|p| format!("{p:?}")).collect();
    // finer ≤ coarser: same block in the finer means same block in the coarser
    let refines = |f: &Vec<usize>, c: &Vec<usize>| {
        (0..r).all(|i| (0..r).all(|j| f[i] != f[j] || c[i] == c[j]))
    };
    FinPoset::from_relation(keys, |i, j| refines(&parts[i], &parts[j]) && parts[i] != parts[j]).expect("Π_r")
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:x}")).collect()
}

fn subspace_key(s: &Subspace) -> String {
    hex(&s.key())
}

/// Vertices of the graph lying in `w`.
fn lines_in(g: &OrthGraph, w: &Subspace) -> Vec<u32> {
    let f = g.space().field();
    (0..g.vertex_count() as u32)
        .filter(|&i| w.contains(f, &g.vertices()[i as usize].rep))
        .collect()
}

/// Frames of a non-degenerate subspace: cliques of size dim w among its lines.
pub fn frames_in(g: &OrthGraph, w: &Subspace) -> Vec<Vec<u32>> {
    let cand = lines_in(g, w);
    let target = w.dim();
    let mut out = Vec::new();
    fn rec(g: &OrthGraph, cand: &[u32], start: usize, cur: &mut Vec<u32>, target: usize, out: &mut Vec<Vec<u32>>) {
        if cur.len() == target {
            out.push(cur.clone());
            return;
        }
        for i in start..cand.len() {
            let v = cand[i];
            if cur.iter().all(|&u| g.adjacent(u as usize, v as usize)) {
                cur.push(v);
                rec(g, cand, i + 1, cur, target, out);
                cur.pop();
            }
        }
    }
    rec(g, &cand, 0, &mut Vec::new(), target, &mut out);
    out
}

fn span_of_lines(g: &OrthGraph, lines: &[u32]) -> Subspace {
    let vecs: Vec<_> = lines.iter().map(|&i| g.vertices()[i as usize].rep.clone()).collect();
    Subspace::span(g.space().field(), g.n(), &vecs)
}

/// The poset S̊(V) of proper non-zero non-degenerate subspaces, with the subspaces.
pub fn build_nondeg_poset(g: &OrthGraph) -> Result<(FinPoset, Vec<Subspace>)> {
    let n = g.n();
    let k = clique_complex(g, n.saturating_sub(2), DEFAULT_BUDGET)?;
    let mut index: HashMap<Subspace, usize> = HashMap::new();
    let mut subs: Vec<Subspace> = Vec::new();
    // every non-degenerate subspace has an orthogonal basis of non-degenerate lines
    for level in k.levels() {
        for s in level.iter() {
            let w = span_of_lines(g, s);
            if !index.contains_key(&w) {
                index.insert(w.clone(), subs.len());
                subs.push(w);
            }
            if subs.len() > MAX_ELEMENTS {
                return Err(Error::InstanceTooLarge(format!("more than {MAX_ELEMENTS} subspaces")));
            }
        }
    }
    let mut order: Vec<usize> = (0..subs.len()).collect();
    order.sort_by(|&a, &b| (subs[a].dim(), &subs[a]).cmp(&(subs[b].dim(), &subs[b])));
    let subs: Vec<Subspace> = order.into_iter().map(|i| subs[i].clone()).collect();
    let f = g.space().field();
    let keys = subs.iter().map(subspace_key).collect();
    let p = FinPoset::from_relation(keys, |i, j| subs[i].dim() < subs[j].dim() && subs[i].is_subspace_of(f, &subs[j]))?;
    Ok((p, subs))
}

/// An orthogonal decomposition: blocks sorted, so equal decompositions compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Decomposition(Vec<Subspace>);

impl Decomposition {
    pub fn new(mut blocks: Vec<Subspace>) -> Decomposition {
        blocks.sort();
        Decomposition(blocks)
    }

    pub fn blocks(&self) -> &[Subspace] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn key(&self) -> String {
        self.0.iter().map(subspace_key).collect::<Vec<_>>().join("|")
    }

    /// Every block of self lies in a block of `coarse`.
    pub fn refines(&self, g: &OrthGraph, coarse: &Decomposition) -> bool {
        let f = g.space().field();
        self.0.iter().all(|b| coarse.0.iter().any(|c| b.is_subspace_of(f, c)))
    }
}

/// All coarsenings of a decomposition, one per set partition of its blocks.
fn coarsenings(g: &OrthGraph, d: &Decomposition) -> Vec<Decomposition> {
    let f = g.space().field();
    set_partitions(d.len())
        .into_iter()
        .map(|labels| {
            let nb = labels.iter().max().map_or(0, |m| m + 1);
            let blocks = (0..nb)
                .map(|b| {
                    let mut s = Subspace::zero(g.n());
                    for (i, &l) in labels.iter().enumerate() {
                        if l == b {
                            s = s.sum(f, &d.0[i]);
                        }
                    }
                    s
                })
                .collect();
            Decomposition::new(blocks)
        })
        .collect()
}

/// D(W) for a non-degenerate subspace W, including the trivial decomposition {W}.
pub fn build_decomp_poset_of(g: &OrthGraph, w: &Subspace) -> Result<(FinPoset, Vec<Decomposition>)> {
    let mut index: HashMap<Decomposition, usize> = HashMap::new();
    let mut elems: Vec<Decomposition> = Vec::new();
    // every decomposition coarsens a frame of W
    for frame in frames_in(g, w) {
        let lines: Vec<Subspace> = frame.iter().map(|&v| span_of_lines(g, &[v])).collect();
        for c in coarsenings(g, &Decomposition::new(lines)) {
            if !index.contains_key(&c) {
                index.insert(c.clone(), elems.len());
                elems.push(c);
                if elems.len() > MAX_ELEMENTS {
                    return Err(Error::InstanceTooLarge(format!("more than {MAX_ELEMENTS} decompositions")));
                }
            }
        }
    }
    // finest first, then canonical order
    let mut order: Vec<usize> = (0..elems.len()).collect();
    order.sort_by(|&a, &b| (std::cmp::Reverse(elems[a].len()), &elems[a]).cmp(&(std::cmp::Reverse(elems[b].len()), &elems[b])));
    let elems: Vec<Decomposition> = order.into_iter().map(|i| elems[i].clone()).collect();
    let index: HashMap<&Decomposition, usize> = elems.iter().enumerate().map(|(i, d)| (d, i)).collect();
    let mut below: Vec<Vec<u32>> = vec![Vec::new(); elems.len()];
    for (i, d) in elems.iter().enumerate() {
        for c in coarsenings(g, d) {
            let j = index[&c];
            if j != i {
                below[j].push(i as u32);
            }
        }
    }
    let keys = elems.iter().map(Decomposition::key).collect();
    Ok((FinPoset::new(keys, below)?, elems))
}

/// D(V) of the whole space; the last element is the trivial decomposition {V}.
pub fn build_decomp_poset(g: &OrthGraph) -> Result<(FinPoset, Vec<Decomposition>)> {
    build_decomp_poset_of(g, &Subspace::full(g.n()))
}

/// The decomposition map on a chain S_0 < … < S_r of non-degenerate subspaces.
pub fn decomposition_map(g: &OrthGraph, chain: &[Subspace]) -> Result<Decomposition> {
    let space = g.space();
    let f = space.field();
    for s in chain {
        if s.dim() == 0 || s.dim() == g.n() || !space.is_nondegenerate(s)? {
            return Err(Error::DegenerateMember);
        }
    }
    for w in chain.windows(2) {
        if w[0].dim() >= w[1].dim() || !w[0].is_subspace_of(f, &w[1]) {
            return Err(Error::NotAChain);
        }
    }
    let mut blocks = Vec::with_capacity(chain.len() + 1);
    let mut prev: Option<&Subspace> = None;
    let full = Subspace::full(g.n());
    for s in chain.iter().chain(std::iter::once(&full)) {
        blocks.push(match prev {
            None => s.clone(),
            Some(p) => space.orth_complement(p)?.intersection(f, s),
        });
        prev = Some(s);
    }
    Ok(Decomposition::new(blocks))
}

/// S_π: proper non-empty sums of blocks of π.
pub fn s_pi(g: &OrthGraph, pi: &Decomposition) -> Vec<Subspace> {
    let f = g.space().field();
    let r = pi.len();
    (1..(1u32 << r) - 1)
        .map(|mask| {
            let mut s = Subspace::zero(g.n());
            for i in 0..r {
                if mask >> i & 1 == 1 {
                    s = s.sum(f, &pi.blocks()[i]);
                }
            }
            s
        })
        .collect()
}

/// Outcome of checking the decomposition map on every chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberReport {
    pub chains: usize,
    pub order_reversing: bool,
    /// Proper decompositions whose fiber equals the order complex of S_π.
    pub fibers_ok: usize,
    pub fibers_total: usize,
}

impl FiberReport {
    pub fn passes(&self) -> bool {
        self.order_reversing && self.fibers_ok == self.fibers_total
    }
}

/// Enumerates all chains of S̊(V), checks that the decomposition map reverses
/// inclusion, and that the chains over D̊_{≥π} are exactly the chains of S_π.
pub fn fiber_check(g: &OrthGraph) -> Result<FiberReport> {
    let (s, subs) = build_nondeg_poset(g)?;
    let (d, decs) = build_decomp_poset(g)?;
    let oc = s.order_complex(DEFAULT_BUDGET)?;
    let mut images: HashMap<Vec<u32>, usize> = HashMap::new();
    let dindex: HashMap<&Decomposition, usize> = decs.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let mut chains = 0;
    for level in oc.levels() {
        for c in level.iter() {
            // vertices are sorted by dimension, so the tuple is already a chain in order
            let chain: Vec<Subspace> = c.iter().map(|&i| subs[i as usize].clone()).collect();
            let img = decomposition_map(g, &chain)?;
            images.insert(c.to_vec(), dindex[&img]);
            chains += 1;
        }
    }
    let mut order_reversing = true;
    for (c, &img) in &images {
        for i in 0..c.len() {
            if c.len() > 1 {
                let face = crate::complex::remove_at(c, i);
                let fimg = images[&face];
                // a longer chain maps to a finer decomposition
                if !(fimg == img || d.less(img, fimg)) {
                    order_reversing = false;
                }
            }
        }
    }
    let top = decs.len() - 1;
    let mut fibers_ok = 0;
    for (pi_idx, pi) in decs.iter().enumerate() {
        if pi_idx == top {
            continue;
        }
        let spi = s_pi(g, pi);
        let in_spi = |i: u32| spi.iter().any(|x| *x == subs[i as usize]);
        let ok = images.iter().all(|(c, &img)| {
            let over = img == pi_idx || d.less(pi_idx, img);
            over == c.iter().all(|&v| in_spi(v))
        });
        // sanity: S_π really consists of elements of S̊
        let members = spi.iter().all(|x| g.space().is_nondegenerate(x).unwrap_or(false) && x.dim() > 0 && x.dim() < g.n());
        if ok && members {
            fibers_ok += 1;
        }
    }
    Ok(FiberReport {
        chains,
        order_reversing,
        fibers_ok,
        fibers_total: top,
    })
}

/// Results of the interval structure checks on D(V).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalReport {
    pub elements: usize,
    pub upper_ok: usize,
    pub lower_ok: usize,
}

impl IntervalReport {
    pub fn passes(&self) -> bool {
        self.upper_ok == self.elements && self.lower_ok == self.elements
    }
}

/// Product of posets, ordered componentwise.
pub fn product(parts: &[FinPoset]) -> FinPoset {
    let mut keys: Vec<Vec<usize>> = vec![Vec::new()];
    for p in parts {
        keys = keys
            .into_iter()
            .flat_map(|k| {
                (0..p.len()).map(move |i| {
                    let mut k = k.clone();
                    k.push(i);
                    k
                })
            })
            .collect();
    }
    let le = |a: &Vec<usize>, b: &Vec<usize>| parts.iter().enumerate().all(|(t, p)| a[t] == b[t] || p.less(a[t], b[t]));
    let names = keys.iter().map(|k| format!("{k:?}")).collect();
    FinPoset::from_relation(names, |i, j| i != j && le(&keys[i], &keys[j])).expect("product order")
}

/// For every π ∈ D(V): D_{≥π} ≅ Π_|π| and D_{≤π} ≅ Π D(V_i) over its blocks.
pub fn interval_checks(g: &OrthGraph) -> Result<IntervalReport> {
    let (d, decs) = build_decomp_poset(g)?;
    let up = d.above();
    let mut lattices: HashMap<usize, FinPoset> = HashMap::new();
    let mut block_posets: HashMap<Subspace, FinPoset> = HashMap::new();
    let (mut upper_ok, mut lower_ok) = (0, 0);
    for (i, pi) in decs.iter().enumerate() {
        let mut upper: Vec<usize> = vec![i];
        upper.extend(up[i].iter().map(|&j| j as usize));
        let lat = lattices.entry(pi.len()).or_insert_with(|| partition_lattice(pi.len()));
        if isomorphic(&d.subposet(&upper), lat) {
            upper_ok += 1;
        }
        let mut lower: Vec<usize> = d.below(i).iter().map(|&j| j as usize).collect();
        lower.push(i);
        let mut factors = Vec::new();
        for b in pi.blocks() {
            if !block_posets.contains_key(b) {
                block_posets.insert(b.clone(), build_decomp_poset_of(g, b)?.0);
            }
            factors.push(block_posets[b].clone());
        }
        if isomorphic(&d.subposet(&lower), &product(&factors)) {
            lower_ok += 1;
        }
    }
    Ok(IntervalReport {
        elements: decs.len(),
        upper_ok,
        lower_ok,
    })
}

/// Both sides of the wedge decomposition at the level of Euler characteristics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WedgeCheck {
    pub lhs: BigInt,
    pub rhs: BigInt,
}

impl WedgeCheck {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// χ̃(S̊(V)) against Σ_{π∈D(V)} −(−1)^{|π|} χ̃(D(V)_{<π}), both from explicit posets.
pub fn wedge_identity_check(g: &OrthGraph) -> Result<WedgeCheck> {
    let (s, _) = build_nondeg_poset(g)?;
    let (d, decs) = build_decomp_poset(g)?;
    let lhs = s.euler_reduced();
    // μ(0̂, π) is χ̃ of the open down-set, −1 when it is empty
    let mu = d.mobius_from_bottom();
    let mut rhs = BigInt::zero();
    for (pi, m) in decs.iter().zip(&mu) {
        if pi.len() % 2 == 0 {
            rhs -= m;
        } else {
            rhs += m;
        }
    }
    Ok(WedgeCheck { lhs, rhs })
}

/// Non-empty partial frames whose size is not in `excluded`, ordered by inclusion.
/// Excluding {n−1} gives F̂(V); excluding {n−1, n−2} gives the q = 2 double-hat poset.
pub fn frame_poset(g: &OrthGraph, excluded: &[usize]) -> Result<FinPoset> {
    let k = clique_complex(g, g.n().saturating_sub(1), DEFAULT_BUDGET)?;
    let mut elems: Vec<Vec<u32>> = Vec::new();
    for level in k.levels() {
        if excluded.contains(&level.width()) {
            continue;
        }
        elems.extend(level.iter().map(<[u32]>::to_vec));
    }
    if elems.len() > MAX_ELEMENTS {
        return Err(Error::InstanceTooLarge(format!("{} frames", elems.len())));
    }
    let index: HashMap<&[u32], u32> = elems.iter().enumerate().map(|(i, e)| (e.as_slice(), i as u32)).collect();
    let below = elems
        .iter()
        .map(|e| {
            let r = e.len();
            (1..(1u64 << r) - 1)
                .filter_map(|mask| {
                    let sub: Vec<u32> = (0..r).filter(|&i| mask >> i & 1 == 1).map(|i| e[i]).collect();
                    index.get(sub.as_slice()).copied()
                })
                .collect()
        })
        .collect();
    let keys = elems
        .iter()
        .map(|e| e.iter().map(u32::to_string).collect::<Vec<_>>().join(","))
        .collect();
    FinPoset::new(keys, below)
}

/// F̂(V): partial frames of every size except n − 1.
pub fn hat_poset(g: &OrthGraph) -> Result<FinPoset> {
    frame_poset(g, &[g.n().saturating_sub(1)])
}

/// The double-hat poset: sizes n − 1 and n − 2 removed; only homotopy equivalent to F(V) when q = 2.
pub fn doublehat_poset(g: &OrthGraph) -> Result<FinPoset> {
    if g.q() != 2 {
        return Err(Error::InvalidParameter("double-hat poset needs q = 2".into()));
    }
    frame_poset(g, &[g.n().saturating_sub(1), g.n().saturating_sub(2)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counts::{euler_decomp_poset, euler_nondeg_poset, frame_count};
    use crate::graph::build_graph;
    use crate::homology::betti;
    use crate::linalg::engine_registry;

    fn rational_betti(k: &SimComplex) -> Vec<usize> {
        betti(k, engine_registry().get("rational").unwrap().as_ref()).unwrap()
    }

    #[test]
    fn chain_poset_is_a_simplex() {
        let p = FinPoset::from_relation(vec!["a".into(), "b".into(), "c".into()], |i, j| i < j).unwrap();
        let k = p.order_complex(100).unwrap();
        assert_eq!(k.f_vector(), vec![3, 3, 1]);
        assert_eq!(p.euler_reduced(), BigInt::zero());
        assert_eq!(k.euler_reduced(), BigInt::zero());
        assert_eq!(p.covers(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn cyclic_relations_are_rejected() {
        assert!(FinPoset::new(vec!["a".into(), "b".into()], vec![vec![1], vec![0]]).is_err());
    }

    #[test]
    fn partition_lattices() {
        assert_eq!(set_partitions(3).len(), 5);
        assert_eq!(set_partitions(4).len(), 15);
        let p3 = partition_lattice(3);
        assert_eq!(p3.len(), 5);
        // proper part of Π_3 is three points
        assert_eq!(p3.euler_reduced(), BigInt::zero());
        assert!(isomorphic(&p3, &partition_lattice(3)));
        assert!(!isomorphic(&p3, &FinPoset::from_relation((0..5).map(|i| i.to_string()).collect(), |i, j| i < j).unwrap()));
    }

    #[test]
    fn nondeg_poset_counts() {
        let g = build_graph(3, 2).unwrap();
        let (s, _) = build_nondeg_poset(&g).unwrap();
        assert_eq!(s.len(), 24);
        assert_eq!(s.euler_reduced(), euler_nondeg_poset(3, 2));
        let k = s.order_complex(DEFAULT_BUDGET).unwrap();
        assert_eq!(k.euler_reduced(), BigInt::from(-1));
        assert_eq!(rational_betti(&k), vec![3, 4]);
        for (n, q) in [(3, 3), (4, 2)] {
            let g = build_graph(n, q).unwrap();
            let (s, _) = build_nondeg_poset(&g).unwrap();
            assert_eq!(s.euler_reduced(), euler_nondeg_poset(n as u32, q));
            let b = rational_betti(&s.order_complex(DEFAULT_BUDGET).unwrap());
            assert_eq!(b[0], 0, "connected at ({n},{q})");
        }
    }

    #[test]
    fn decomp_poset_counts() {
        let g = build_graph(3, 2).unwrap();
        let (d, decs) = build_decomp_poset(&g).unwrap();
        assert_eq!(d.len(), 17);
        assert_eq!(decs.iter().filter(|x| x.len() == 3).count(), 4);
        assert_eq!(decs.iter().filter(|x| x.len() == 2).count(), 12);
        let top = decs.len() - 1;
        assert_eq!(decs[top].len(), 1);
        let proper: Vec<usize> = (0..top).collect();
        let dd = d.subposet(&proper);
        assert_eq!(dd.euler_reduced(), euler_decomp_poset(3, 2).unwrap());
        assert_eq!(dd.order_complex(DEFAULT_BUDGET).unwrap().euler_reduced(), BigInt::from(3));
        let g = build_graph(2, 2).unwrap();
        let (d, _) = build_decomp_poset(&g).unwrap();
        assert_eq!(d.len(), 2);
        for (n, q) in [(2, 3), (3, 3), (4, 2)] {
            let g = build_graph(n, q).unwrap();
            let (d, decs) = build_decomp_poset(&g).unwrap();
            let proper: Vec<usize> = (0..decs.len() - 1).collect();
            assert_eq!(d.subposet(&proper).euler_reduced(), euler_decomp_poset(n as u32, q).unwrap(), "({n},{q})");
            // purity of the order complex of D(V): maximal chains have n elements
            assert!(d.is_graded());
            assert_eq!(d.order_complex(DEFAULT_BUDGET).unwrap().dim(), n as isize - 1);
        }
    }

    #[test]
    fn decomposition_map_examples() {
        let g = build_graph(3, 2).unwrap();
        let (_, subs) = build_nondeg_poset(&g).unwrap();
        let line = subs.iter().find(|s| s.dim() == 1).unwrap().clone();
        let d = decomposition_map(&g, std::slice::from_ref(&line)).unwrap();
        let perp = g.space().orth_complement(&line).unwrap();
        assert_eq!(d, Decomposition::new(vec![line.clone(), perp.clone()]));
        // a full flag from a frame gives the frame
        let frame = &frames_in(&g, &Subspace::full(3))[0];
        let l0 = span_of_lines(&g, &frame[..1]);
        let p01 = span_of_lines(&g, &frame[..2]);
        let d = decomposition_map(&g, &[l0, p01]).unwrap();
        let lines: Vec<Subspace> = frame.iter().map(|&v| span_of_lines(&g, &[v])).collect();
        assert_eq!(d, Decomposition::new(lines));
        assert!(matches!(decomposition_map(&g, &[perp, line]), Err(Error::NotAChain)));
    }

    #[test]
    fn fibers_at_3_2() {
        let g = build_graph(3, 2).unwrap();
        let r = fiber_check(&g).unwrap();
        assert!(r.passes(), "{r:?}");
        assert_eq!(r.fibers_total, 16);
    }

    #[test]
    fn intervals() {
        for (n, q) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
            let g = build_graph(n, q).unwrap();
            assert!(interval_checks(&g).unwrap().passes(), "({n},{q})");
        }
    }

    #[test]
    fn wedge_identity() {
        for (n, q) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
            let g = build_graph(n, q).unwrap();
            let w = wedge_identity_check(&g).unwrap();
            assert!(w.holds(), "({n},{q}) {w:?}");
        }
        let w = wedge_identity_check(&build_graph(3, 2).unwrap()).unwrap();
        assert_eq!(w.lhs, BigInt::from(-1));
    }

    #[test]
    fn hat_posets_keep_homology() {
        for (n, q) in [(3, 2), (3, 3), (4, 2)] {
            let g = build_graph(n, q).unwrap();
            let full = clique_complex(&g, n - 1, DEFAULT_BUDGET).unwrap();
            let b = rational_betti(&full);
            let hat = hat_poset(&g).unwrap().order_complex(DEFAULT_BUDGET).unwrap();
            assert_eq!(hat.dim(), n as isize - 2);
            let mut bh = rational_betti(&hat);
            bh.resize(b.len(), 0);
            assert_eq!(bh, b, "({n},{q})");
            if q == 2 {
                let dh = doublehat_poset(&g).unwrap().order_complex(DEFAULT_BUDGET).unwrap();
                let mut bd = rational_betti(&dh);
                bd.resize(b.len(), 0);
                assert_eq!(bd, b);
            }
            // barycentric subdivision keeps the Euler characteristic
            let all = frame_poset(&g, &[]).unwrap();
            assert_eq!(all.euler_reduced(), full.euler_reduced());
            assert_eq!(BigInt::from(all.len()), (1..=n as u32).map(|m| frame_count(n as u32, q, m).unwrap()).sum::<BigInt>());
        }
    }

    #[test]
    fn export_lists_elements_and_covers() {
        let p = partition_lattice(2);
        let text = p.export();
        assert!(text.starts_with("element 0 [0, 0]\nelement 1 [0, 1]\n"));
        assert!(text.contains("cover 1 0"));
    }
}
