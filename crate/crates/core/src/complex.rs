//! Simplicial complexes stored level by level, the clique complex of the
//! orthogonality graph, boundary matrices and elementary collapses.

use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::OrthGraph;
use crate::linalg::SparseMatrix;
use crate::registry::Registry;

/// Default cap on the number of simplices of any one dimension.
pub const DEFAULT_BUDGET: usize = 2_000_000;

/// Simplices of one dimension as a flat array of sorted vertex tuples, in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Simplices {
    width: usize,
    data: Vec<u32>,
}

impl Simplices {
    pub fn new(width: usize) -> Simplices {
        Simplices {
            width,
            data: Vec::new(),
        }
    }

    /// Builds from arbitrary tuples; each is sorted and the list deduplicated.
    pub fn from_tuples(width: usize, mut tuples: Vec<Vec<u32>>) -> Simplices {
        for t in &mut tuples {
            assert_eq!(t.len(), width, "simplex width");
            t.sort_unstable();
        }
        tuples.sort_unstable();
        tuples.dedup();
        Simplices {
            width,
            data: tuples.concat(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.width).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, i: usize) -> &[u32] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> {
        self.data.chunks_exact(self.width.max(1))
    }

    pub fn index_of(&self, s: &[u32]) -> Option<usize> {
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.get(mid).cmp(s) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    fn retain(&self, keep: &[bool]) -> Simplices {
        let mut data = Vec::with_capacity(self.data.len());
        for (i, s) in self.iter().enumerate() {
            if keep[i] {
                data.extend_from_slice(s);
            }
        }
        Simplices {
            width: self.width,
            data,
        }
    }
}

/// A finite simplicial complex; `levels[k]` holds the k-simplices.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SimComplex {
    levels: Vec<Simplices>,
}

impl SimComplex {
    /// Trailing empty levels are dropped.
    pub fn from_levels(mut levels: Vec<Simplices>) -> SimComplex {
        while levels.last().is_some_and(Simplices::is_empty) {
            levels.pop();
        }
        SimComplex { levels }
    }

    /// Closure of a set of simplices under taking faces.
    pub fn from_facets(facets: &[Vec<u32>]) -> SimComplex {
        let top = facets.iter().map(Vec::len).max().unwrap_or(0);
        let mut tuples: Vec<Vec<Vec<u32>>> = vec![Vec::new(); top];
        for f in facets {
            let mut f = f.clone();
            f.sort_unstable();
            let k = f.len();
            for mask in 1u64..(1 << k) {
                let face: Vec<u32> = (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| f[i]).collect();
                tuples[face.len() - 1].push(face);
            }
        }
        SimComplex::from_levels(
            tuples
                .into_iter()
                .enumerate()
                .map(|(k, t)| Simplices::from_tuples(k + 1, t))
                .collect(),
        )
    }

    /// −1 for the empty complex.
    pub fn dim(&self) -> isize {
        self.levels.len() as isize - 1
    }

    pub fn level(&self, k: usize) -> &Simplices {
        &self.levels[k]
    }

    pub fn levels(&self) -> &[Simplices] {
        &self.levels
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.levels.iter().map(Simplices::len).collect()
    }

    /// Reduced Euler characteristic −1 + Σ (−1)^k f_k.
    pub fn euler_reduced(&self) -> BigInt {
        let mut chi = BigInt::from(-1);
        for (k, l) in self.levels.iter().enumerate() {
            if k % 2 == 0 {
                chi += l.len();
            } else {
                chi -= l.len();
            }
        }
        chi
    }

    /// Every face of every simplex is present.
    pub fn is_closed(&self) -> bool {
        (1..self.levels.len()).all(|k| {
            self.levels[k].iter().all(|s| {
                (0..s.len()).all(|i| {
                    let face: Vec<u32> = remove_at(s, i);
                    self.levels[k - 1].index_of(&face).is_some()
                })
            })
        })
    }

    /// The k-skeleton.
    pub fn skeleton(&self, k: usize) -> SimComplex {
        SimComplex::from_levels(self.levels.iter().take(k + 1).cloned().collect())
    }

    /// ∂_k from k-simplices to (k−1)-simplices; face i carries sign (−1)^i.
    pub fn boundary(&self, k: usize) -> SparseMatrix {
        assert!(k >= 1 && k < self.levels.len(), "boundary degree {k}");
        let faces = &self.levels[k - 1];
        let cols: Vec<Vec<(u32, i64)>> = (0..self.levels[k].len())
            .into_par_iter()
            .map(|j| {
                let s = self.levels[k].get(j);
                let mut col: Vec<(u32, i64)> = (0..s.len())
                    .map(|i| {
                        let r = faces.index_of(&remove_at(s, i)).expect("complex is closed");
                        (r as u32, if i % 2 == 0 { 1 } else { -1 })
                    })
                    .collect();
                col.sort_unstable_by_key(|e| e.0);
                col
            })
            .collect();
        SparseMatrix::new(faces.len(), cols)
    }

    /// ∂_1, …, ∂_dim.
    pub fn boundaries(&self) -> Vec<SparseMatrix> {
        (1..self.levels.len()).map(|k| self.boundary(k)).collect()
    }

    /// Number of (k+1)-simplices containing each k-simplex.
    pub fn coface_counts(&self, k: usize) -> Vec<u32> {
        let mut counts = vec![0u32; self.levels[k].len()];
        if let Some(up) = self.levels.get(k + 1) {
            for s in up.iter() {
                for i in 0..s.len() {
                    counts[self.levels[k].index_of(&remove_at(s, i)).expect("closed")] += 1;
                }
            }
        }
        counts
    }

    /// Maximal simplices all of one dimension.
    pub fn is_pure(&self) -> bool {
        let top = self.levels.len();
        (0..top.saturating_sub(1)).all(|k| self.coface_counts(k).iter().all(|&c| c > 0))
    }

    /// "dim k count m" header, then one simplex per line.
    pub fn export(&self) -> String {
        let mut out = String::new();
        for (k, l) in self.levels.iter().enumerate() {
            writeln!(out, "dim {k} count {}", l.len()).unwrap();
            for s in l.iter() {
                let words: Vec<String> = s.iter().map(u32::to_string).collect();
                writeln!(out, "{}", words.join(" ")).unwrap();
            }
        }
        out
    }
}

pub(crate) fn remove_at(s: &[u32], i: usize) -> Vec<u32> {
    let mut v = Vec::with_capacity(s.len() - 1);
    v.extend_from_slice(&s[..i]);
    v.extend_from_slice(&s[i + 1..]);
    v
}

/// Candidate extensions of a clique: common neighbours above its last vertex.
fn extension_mask(g: &OrthGraph, s: &[u32], mask: &mut [u64]) {
    let w = g.words_per_row();
    mask.copy_from_slice(g.row(s[0] as usize));
    for &v in &s[1..] {
        for (m, r) in mask.iter_mut().zip(g.row(v as usize)) {
            *m &= r;
        }
    }
    let last = *s.last().unwrap() as usize + 1;
    let (word, bit) = (last / 64, last % 64);
    for m in mask.iter_mut().take(word.min(w)) {
        *m = 0;
    }
    if word < w {
        mask[word] &= !0u64 << bit;
    }
}

/// Clique complex of the graph through dimension `max_dim`.
pub fn clique_complex(g: &OrthGraph, max_dim: usize, budget: usize) -> Result<SimComplex> {
    let v = g.vertex_count();
    if v > budget {
        return Err(Error::InstanceTooLarge(format!("{v} vertices exceeds budget {budget}")));
    }
    let mut levels = vec![Simplices {
        width: 1,
        data: (0..v as u32).collect(),
    }];
    let w = g.words_per_row();
    for k in 1..=max_dim {
        let prev = &levels[k - 1];
        let total: usize = (0..prev.len())
            .into_par_iter()
            .map_init(
                || vec![0u64; w],
                |mask, i| {
                    extension_mask(g, prev.get(i), mask);
                    mask.iter().map(|m| m.count_ones() as usize).sum::<usize>()
                },
            )
            .sum();
        if total > budget {
            return Err(Error::InstanceTooLarge(format!(
                "{total} simplices in dimension {k} exceeds budget {budget}"
            )));
        }
        if total == 0 {
            break;
        }
        let chunks: Vec<Vec<u32>> = (0..prev.len())
            .into_par_iter()
            .map_init(
                || vec![0u64; w],
                |mask, i| {
                    let s = prev.get(i);
                    extension_mask(g, s, mask);
                    let mut out = Vec::new();
                    for (wi, &m) in mask.iter().enumerate() {
                        let mut m = m;
                        while m != 0 {
                            let b = m.trailing_zeros() as usize;
                            m &= m - 1;
                            out.extend_from_slice(s);
                            out.push((wi * 64 + b) as u32);
                        }
                    }
                    out
                },
            )
            .collect();
        levels.push(Simplices {
            width: k + 1,
            data: chunks.concat(),
        });
    }
    Ok(SimComplex::from_levels(levels))
}

/// Applies a list of elementary collapses (free face, unique coface), checking
/// freeness before each one against the current complex.
pub fn elementary_collapses(k: &SimComplex, pairs: &[(Vec<u32>, Vec<u32>)]) -> Result<SimComplex> {
    let mut removed: Vec<Vec<bool>> = k.levels.iter().map(|l| vec![false; l.len()]).collect();
    // computed on first use, then kept current
    let mut counts: Vec<Option<Vec<u32>>> = vec![None; k.levels.len()];
    for (face, coface) in pairs {
        if face.is_empty() {
            return Err(Error::NotCollapsible("the empty face is never collapsed".into()));
        }
        let d = face.len() - 1;
        if coface.len() != face.len() + 1 || d + 1 >= k.levels.len() {
            return Err(Error::NotCollapsible(format!("{face:?} is not a facet of {coface:?}")));
        }
        let fi = k.levels[d]
            .index_of(face)
            .ok_or_else(|| Error::NotCollapsible(format!("{face:?} missing")))?;
        let ci = k.levels[d + 1]
            .index_of(coface)
            .ok_or_else(|| Error::NotCollapsible(format!("{coface:?} missing")))?;
        if removed[d][fi] || removed[d + 1][ci] {
            return Err(Error::NotCollapsible(format!("{face:?} or {coface:?} already removed")));
        }
        let c = counts[d].get_or_insert_with(|| live_coface_counts(k, d, &removed[d + 1]));
        if c[fi] != 1 {
            return Err(Error::NotCollapsible(format!("{face:?} has {} cofaces", c[fi])));
        }
        if let Some(c2) = counts.get_mut(d + 1).and_then(Option::as_mut) {
            if c2[ci] != 0 {
                return Err(Error::NotCollapsible(format!("{coface:?} is not maximal")));
            }
        } else if d + 2 < k.levels.len() {
            let up = live_coface_counts(k, d + 1, &removed[d + 2]);
            if up[ci] != 0 {
                return Err(Error::NotCollapsible(format!("{coface:?} is not maximal")));
            }
            counts[d + 1] = Some(up);
        }
        removed[d][fi] = true;
        removed[d + 1][ci] = true;
        counts[d].as_mut().unwrap()[fi] = 0;
        // faces of the removed coface and of the removed face lose a coface
        for i in 0..coface.len() {
            let g = remove_at(coface, i);
            if let Some(c) = counts[d].as_mut() {
                let gi = k.levels[d].index_of(&g).expect("closed");
                c[gi] = c[gi].saturating_sub(1);
            }
        }
        if d >= 1 {
            if let Some(c) = counts[d - 1].as_mut() {
                for i in 0..face.len() {
                    let gi = k.levels[d - 1].index_of(&remove_at(face, i)).expect("closed");
                    c[gi] -= 1;
                }
            }
        }
    }
    let levels = k
        .levels
        .iter()
        .zip(&removed)
        .map(|(l, r)| {
            let keep: Vec<bool> = r.iter().map(|&x| !x).collect();
            l.retain(&keep)
        })
        .collect();
    Ok(SimComplex::from_levels(levels))
}

/// Coface counts of level `d`, ignoring removed simplices of level d + 1.
fn live_coface_counts(k: &SimComplex, d: usize, removed_up: &[bool]) -> Vec<u32> {
    let mut counts = vec![0u32; k.levels[d].len()];
    if let Some(up) = k.levels.get(d + 1) {
        for (j, s) in up.iter().enumerate() {
            if removed_up[j] {
                continue;
            }
            for i in 0..s.len() {
                counts[k.levels[d].index_of(&remove_at(s, i)).expect("closed")] += 1;
            }
        }
    }
    counts
}

/// Pairs each top simplex with the facet omitting its last vertex. In a frame
/// complex every codimension-one face of a full frame lies in that frame only.
pub fn collapse_hat(k: &SimComplex) -> Result<SimComplex> {
    if k.dim() < 1 {
        return Err(Error::NotCollapsible("hat collapse needs dimension >= 1".into()));
    }
    let top = k.dim() as usize;
    let pairs: Vec<(Vec<u32>, Vec<u32>)> = k.levels[top]
        .iter()
        .map(|t| (t[..t.len() - 1].to_vec(), t.to_vec()))
        .collect();
    elementary_collapses(k, &pairs)
}

/// Over GF(4) two further steps are possible: after τ ↘ τ∖{v₁}, each τ∖{v_i}
/// is free and collapses onto τ∖{v₁, v_i}.
pub fn collapse_doublehat(k: &SimComplex, q: u32) -> Result<SimComplex> {
    if q != 2 {
        return Err(Error::NotCollapsible(format!("double-hat collapse needs q = 2, got {q}")));
    }
    // in dimension 1 the second round would remove vertices
    if k.dim() < 2 {
        return Err(Error::NotCollapsible("double-hat collapse needs dimension >= 2".into()));
    }
    let top = k.dim() as usize;
    let mut first = Vec::new();
    let mut second = Vec::new();
    for t in k.levels[top].iter() {
        first.push((t[1..].to_vec(), t.to_vec()));
        for i in 1..t.len() {
            let fi = remove_at(t, i);
            second.push((fi[1..].to_vec(), fi));
        }
    }
    // the second round needs the counts after the first round
    let once = elementary_collapses(k, &first)?;
    elementary_collapses(&once, &second)
}

/// A homotopy-preserving reduction applied before homology.
pub trait CollapseStrategy: Send + Sync {
    fn name(&self) -> &str;
    /// `full` says whether `k` is the whole frame complex, not a skeleton.
    fn apply(&self, k: &SimComplex, q: u32, full: bool) -> Result<SimComplex>;
}

struct NoCollapse;
struct Hat;
struct DoubleHat;
struct Auto;

impl CollapseStrategy for NoCollapse {
    fn name(&self) -> &str {
        "none"
    }
    fn apply(&self, k: &SimComplex, _q: u32, _full: bool) -> Result<SimComplex> {
        Ok(k.clone())
    }
}

impl CollapseStrategy for Hat {
    fn name(&self) -> &str {
        "hat"
    }
    fn apply(&self, k: &SimComplex, _q: u32, full: bool) -> Result<SimComplex> {
        if !full {
            return Err(Error::NotCollapsible("hat collapse needs the full complex".into()));
        }
        collapse_hat(k)
    }
}

impl CollapseStrategy for DoubleHat {
    fn name(&self) -> &str {
        "doublehat"
    }
    fn apply(&self, k: &SimComplex, q: u32, full: bool) -> Result<SimComplex> {
        if !full {
            return Err(Error::NotCollapsible("double-hat collapse needs the full complex".into()));
        }
        collapse_doublehat(k, q)
    }
}

impl CollapseStrategy for Auto {
    fn name(&self) -> &str {
        "auto"
    }
    fn apply(&self, k: &SimComplex, q: u32, full: bool) -> Result<SimComplex> {
        match (full, q, k.dim()) {
            (false, _, _) | (_, _, ..=0) => Ok(k.clone()),
            (true, 2, 2..) => collapse_doublehat(k, q),
            (true, _, _) => collapse_hat(k),
        }
    }
}

pub fn collapse_registry() -> Registry<dyn CollapseStrategy> {
    let mut reg: Registry<dyn CollapseStrategy> = Registry::new("collapse");
    reg.register("auto", Arc::new(Auto));
    reg.register("none", Arc::new(NoCollapse));
    reg.register("hat", Arc::new(Hat));
    reg.register("doublehat", Arc::new(DoubleHat));
    reg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counts::{euler_frame, frame_count};
    use crate::graph::build_graph;

    #[test]
    fn f_vectors_match_frame_counts() {
        for (n, q) in [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2), (3, 4)] {
            let g = build_graph(n, q).unwrap();
            let k = clique_complex(&g, n, DEFAULT_BUDGET).unwrap();
            assert_eq!(k.dim(), n as isize - 1, "purity of dimension at ({n},{q})");
            for (m, f) in k.f_vector().iter().enumerate() {
                assert_eq!(BigInt::from(*f), frame_count(n as u32, q, m as u32 + 1).unwrap());
            }
            assert_eq!(k.euler_reduced(), euler_frame(n as u32, q));
            assert!(k.is_closed() && k.is_pure());
        }
        let k = clique_complex(&build_graph(3, 2).unwrap(), 5, DEFAULT_BUDGET).unwrap();
        assert_eq!(k.f_vector(), vec![12, 12, 4]);
        let k = clique_complex(&build_graph(4, 2).unwrap(), 5, DEFAULT_BUDGET).unwrap();
        assert_eq!(k.f_vector(), vec![40, 240, 160, 40]);
        let k = clique_complex(&build_graph(2, 2).unwrap(), 5, DEFAULT_BUDGET).unwrap();
        assert_eq!(k.f_vector(), vec![2, 1]);
    }

    #[test]
    fn boundary_squares_to_zero() {
        let k = clique_complex(&build_graph(4, 2).unwrap(), 3, DEFAULT_BUDGET).unwrap();
        let b = k.boundaries();
        for w in b.windows(2) {
            assert!(w[0].product_is_zero(&w[1]));
        }
    }

    #[test]
    fn collapses_shrink_dimension_and_keep_euler() {
        let k = clique_complex(&build_graph(3, 2).unwrap(), 3, DEFAULT_BUDGET).unwrap();
        let dh = collapse_doublehat(&k, 2).unwrap();
        assert_eq!(dh.f_vector(), vec![4]);
        let k = clique_complex(&build_graph(4, 2).unwrap(), 4, DEFAULT_BUDGET).unwrap();
        let dh = collapse_doublehat(&k, 2).unwrap();
        assert_eq!(dh.dim(), 1);
        assert_eq!(dh.euler_reduced(), BigInt::from(-81));
        let h = collapse_hat(&k).unwrap();
        assert_eq!(h.dim(), 2);
        assert_eq!(h.euler_reduced(), BigInt::from(-81));
        let k = clique_complex(&build_graph(3, 3).unwrap(), 3, DEFAULT_BUDGET).unwrap();
        let h = collapse_hat(&k).unwrap();
        assert_eq!(h.dim(), 1);
        assert_eq!(h.euler_reduced(), BigInt::from(-64));
        assert!(h.is_closed());
        assert!(collapse_doublehat(&k, 3).is_err());
        // an edge stays an edge under the automatic choice
        let k = clique_complex(&build_graph(2, 2).unwrap(), 1, DEFAULT_BUDGET).unwrap();
        assert!(collapse_doublehat(&k, 2).is_err());
        let auto = collapse_registry().get("auto").unwrap().apply(&k, 2, true).unwrap();
        assert_eq!(auto.f_vector(), vec![1]);
    }

    #[test]
    fn non_free_faces_are_rejected() {
        // a filled triangle with a pendant edge: {0,1} is free, vertex 2 is not,
        // and a coface cannot be used twice
        let k = SimComplex::from_facets(&[vec![0, 1, 2], vec![2, 3]]);
        assert!(elementary_collapses(&k, &[(vec![0, 1], vec![0, 1, 2])]).is_ok());
        assert!(matches!(
            elementary_collapses(&k, &[(vec![2], vec![2, 3])]),
            Err(Error::NotCollapsible(_))
        ));
        assert!(elementary_collapses(&k, &[(vec![1, 2], vec![0, 1, 2]), (vec![0, 1], vec![0, 1, 2])]).is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let g = build_graph(4, 2).unwrap();
        assert!(matches!(clique_complex(&g, 3, 100), Err(Error::InstanceTooLarge(_))));
    }

    #[test]
    fn export_format() {
        let k = SimComplex::from_facets(&[vec![0, 1]]);
        assert_eq!(k.export(), "dim 0 count 2\n0\n1\ndim 1 count 1\n0 1\n");
    }
}
