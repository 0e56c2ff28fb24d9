//! Exact linear algebra for sparse integer matrices: ranks over prime fields,
//! fraction-free rational ranks, and Smith normal form.

use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::registry::Registry;

/// The two primes behind rational ranks; both just below 2^62.
pub const PRIME_A: u64 = 4_611_686_018_427_387_847;
pub const PRIME_B: u64 = 4_611_686_018_427_387_817;

/// Column-major sparse integer matrix; row indices strictly increasing within a column.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparseMatrix {
    nrows: usize,
    cols: Vec<Vec<(u32, i64)>>,
}

impl SparseMatrix {
    pub fn new(nrows: usize, cols: Vec<Vec<(u32, i64)>>) -> SparseMatrix {
        debug_assert!(cols.iter().all(|c| c.windows(2).all(|w| w[0].0 < w[1].0)));
        debug_assert!(cols.iter().flatten().all(|&(r, v)| (r as usize) < nrows && v != 0));
        SparseMatrix { nrows, cols }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> SparseMatrix {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let cols = (0..ncols)
            .map(|j| {
                (0..nrows)
                    .filter(|&i| rows[i][j] != 0)
                    .map(|i| (i as u32, rows[i][j]))
                    .collect()
            })
            .collect();
        SparseMatrix { nrows, cols }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn column(&self, j: usize) -> &[(u32, i64)] {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[Vec<(u32, i64)>] {
        &self.cols
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut cols: Vec<Vec<(u32, i64)>> = vec![Vec::new(); self.nrows];
        for (j, col) in self.cols.iter().enumerate() {
            for &(r, v) in col {
                cols[r as usize].push((j as u32, v));
            }
        }
        SparseMatrix {
            nrows: self.cols.len(),
            cols,
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut rows = vec![vec![0i64; self.ncols()]; self.nrows];
        for (j, col) in self.cols.iter().enumerate() {
            for &(r, v) in col {
                rows[r as usize][j] = v;
            }
        }
        rows
    }

    /// True when self · rhs = 0; used for ∂∘∂ = 0.
    pub fn product_is_zero(&self, rhs: &SparseMatrix) -> bool {
        assert_eq!(self.ncols(), rhs.nrows(), "inner dimensions");
        let mut acc = vec![0i64; self.nrows];
        let mut touched = Vec::new();
        for col in &rhs.cols {
            for &(k, v) in col {
                for &(r, w) in &self.cols[k as usize] {
                    if acc[r as usize] == 0 {
                        touched.push(r);
                    }
                    acc[r as usize] += v * w;
                }
            }
            let zero = touched.iter().all(|&r| acc[r as usize] == 0);
            for &r in &touched {
                acc[r as usize] = 0;
            }
            touched.clear();
            if !zero {
                return false;
            }
        }
        true
    }

    /// MatrixMarket coordinate text, 1-based indices.
    pub fn matrix_market(&self) -> String {
        let mut out = format!(
            "%%MatrixMarket matrix coordinate integer general\n{} {} {}\n",
            self.nrows,
            self.ncols(),
            self.nnz()
        );
        for (j, col) in self.cols.iter().enumerate() {
            for &(r, v) in col {
                writeln!(out, "{} {} {}", r + 1, j + 1, v).unwrap();
            }
        }
        out
    }
}

/// Arithmetic in GF(p) for p < 2^63.
#[derive(Copy, Clone, Debug)]
pub struct Zp {
    p: u64,
}

impl Zp {
    pub fn new(p: u64) -> Zp {
        assert!((2..1 << 63).contains(&p));
        Zp { p }
    }

    pub fn modulus(self) -> u64 {
        self.p
    }

    #[inline]
    pub fn from_i64(self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        if self.p == 2 {
            return a & b;
        }
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    pub fn inv(self, a: u64) -> u64 {
        assert!(a != 0, "inverse of zero");
        self.pow(a, self.p - 2)
    }
}

/// Outcome of a column reduction: the rank and the pivot row of each independent column.
#[derive(Clone, Debug, Default)]
pub struct Reduction {
    pub rank: usize,
    pub pivot_rows: Vec<u32>,
}

/// work ← work − factor·pivot, both sorted by row.
fn axpy(z: Zp, work: &mut Vec<(u32, u64)>, factor: u64, pivot: &[(u32, u64)], buf: &mut Vec<(u32, u64)>) {
    buf.clear();
    let (mut i, mut j) = (0, 0);
    while i < work.len() && j < pivot.len() {
        let (ra, va) = work[i];
        let (rb, vb) = pivot[j];
        if ra < rb {
            buf.push((ra, va));
            i += 1;
        } else if rb < ra {
            buf.push((rb, z.sub(0, z.mul(factor, vb))));
            j += 1;
        } else {
            let v = z.sub(va, z.mul(factor, vb));
            if v != 0 {
                buf.push((ra, v));
            }
            i += 1;
            j += 1;
        }
    }
    buf.extend_from_slice(&work[i..]);
    for &(rb, vb) in &pivot[j..] {
        buf.push((rb, z.sub(0, z.mul(factor, vb))));
    }
    std::mem::swap(work, buf);
}

/// Standard column reduction over GF(p), pivoting on the largest row index.
/// Columns flagged in `skip` are known to reduce to zero and are not processed.
pub fn reduce_mod_p(m: &SparseMatrix, p: u64, skip: Option<&[bool]>) -> Reduction {
    let z = Zp::new(p);
    let mut pivot_of_row = vec![u32::MAX; m.nrows()];
    let mut stored: Vec<Vec<(u32, u64)>> = Vec::new();
    let mut pivot_rows = Vec::new();
    let mut work: Vec<(u32, u64)> = Vec::new();
    let mut buf = Vec::new();
    for (j, col) in m.columns().iter().enumerate() {
        if skip.is_some_and(|s| s[j]) {
            continue;
        }
        work.clear();
        work.extend(col.iter().map(|&(r, v)| (r, z.from_i64(v))).filter(|&(_, v)| v != 0));
        while let Some(&(low, lead)) = work.last() {
            let owner = pivot_of_row[low as usize];
            if owner == u32::MAX {
                let inv = z.inv(lead);
                let normalized: Vec<(u32, u64)> = work.iter().map(|&(r, v)| (r, z.mul(v, inv))).collect();
                pivot_of_row[low as usize] = stored.len() as u32;
                stored.push(normalized);
                pivot_rows.push(low);
                break;
            }
            axpy(z, &mut work, lead, &stored[owner as usize], &mut buf);
        }
    }
    Reduction {
        rank: stored.len(),
        pivot_rows,
    }
}

/// Rank over GF(p).
pub fn rank_mod_p(m: &SparseMatrix, p: u64) -> usize {
    reduce_mod_p(m, p, None).rank
}

/// Order in which the ranks of a chain of boundary maps are computed, so that
/// pivots of one map clear columns of the next.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Sweep {
    /// Highest boundary first, reducing ∂_k.
    Homology,
    /// Lowest coboundary first, reducing δ^k = ∂_{k+1}ᵀ.
    Cohomology,
}

/// Ranks of ∂_1, …, ∂_m over GF(p); `boundaries[k−1]` is ∂_k.
pub fn chain_ranks_mod_p(boundaries: &[SparseMatrix], p: u64, sweep: Sweep) -> Vec<usize> {
    let m = boundaries.len();
    let mut ranks = vec![0; m];
    match sweep {
        Sweep::Homology => {
            let mut cleared: Option<Vec<bool>> = None;
            for k in (0..m).rev() {
                let red = reduce_mod_p(&boundaries[k], p, cleared.as_deref());
                ranks[k] = red.rank;
                let mut next = vec![false; boundaries[k].nrows()];
                for r in red.pivot_rows {
                    next[r as usize] = true;
                }
                cleared = Some(next);
            }
        }
        Sweep::Cohomology => {
            let mut cleared: Option<Vec<bool>> = None;
            for k in 0..m {
                let co = boundaries[k].transpose();
                let red = reduce_mod_p(&co, p, cleared.as_deref());
                ranks[k] = red.rank;
                let mut next = vec![false; co.nrows()];
                for r in red.pivot_rows {
                    next[r as usize] = true;
                }
                cleared = Some(next);
            }
        }
    }
    ranks
}

/// Rank over Q by fraction-free (Bareiss) elimination on a dense copy.
pub fn bareiss_rank(m: &SparseMatrix) -> usize {
    let mut a: Vec<Vec<BigInt>> = m
        .to_dense()
        .into_iter()
        .map(|r| r.into_iter().map(BigInt::from).collect())
        .collect();
    let nrows = a.len();
    let ncols = m.ncols();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(piv) = (rank..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(rank, piv);
        for i in rank + 1..nrows {
            for j in c + 1..ncols {
                let v = &a[rank][c] * &a[i][j] - &a[i][c] * &a[rank][j];
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
    }
    rank
}

/// Smith normal form data: rank and the invariant factors greater than 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

/// Largest dense core accepted after unit-pivot elimination.
pub const SMITH_DENSE_LIMIT: usize = 4_000_000;

/// Smith normal form by sparse elimination on unit pivots, then dense elimination
/// of whatever core is left.
pub fn smith_form(m: &SparseMatrix) -> Result<SmithForm> {
    let mut cols: Vec<Vec<(u32, i64)>> = m.columns().to_vec();
    let mut alive = vec![true; cols.len()];
    let mut row_alive = vec![true; m.nrows()];
    let mut row_cols: Vec<Vec<u32>> = vec![Vec::new(); m.nrows()];
    for (j, col) in cols.iter().enumerate() {
        for &(r, _) in col {
            row_cols[r as usize].push(j as u32);
        }
    }
    let mut rank = 0usize;
    let mut order: Vec<usize> = (0..cols.len()).collect();
    loop {
        // shortest live columns first; among their unit entries pick the sparsest row
        order.retain(|&j| alive[j] && !cols[j].is_empty());
        order.sort_by_key(|&j| cols[j].len());
        let mut best: Option<(usize, u32, usize)> = None;
        for &j in order.iter().take(64) {
            for &(r, v) in &cols[j] {
                if v.abs() == 1 {
                    let live = row_cols[r as usize]
                        .iter()
                        .filter(|&&c| alive[c as usize])
                        .count();
                    let cost = (live - 1) * (cols[j].len() - 1);
                    if best.is_none_or(|(_, _, b)| cost < b) {
                        best = Some((j, r, cost));
                    }
                }
            }
            if best.is_some_and(|(_, _, b)| b == 0) {
                break;
            }
        }
        let Some((pc, pr, _)) = best else { break };
        let pv = cols[pc]
            .iter()
            .find(|&&(r, _)| r == pr)
            .map(|&(_, v)| v)
            .expect("pivot entry");
        let pivot_col = cols[pc].clone();
        let others: Vec<u32> = row_cols[pr as usize]
            .iter()
            .copied()
            .filter(|&c| c as usize != pc && alive[c as usize])
            .collect();
        for j in others {
            let j = j as usize;
            let Some(a) = cols[j].iter().find(|&&(r, _)| r == pr).map(|&(_, v)| v) else {
                continue;
            };
            // a / pv is exact since pv = ±1
            let factor = a * pv;
            let mut merged = Vec::with_capacity(cols[j].len() + pivot_col.len());
            let (mut x, mut y) = (0, 0);
            let cj = &cols[j];
            while x < cj.len() || y < pivot_col.len() {
                let take_left = y == pivot_col.len() || (x < cj.len() && cj[x].0 < pivot_col[y].0);
                let take_right = x == cj.len() || (y < pivot_col.len() && pivot_col[y].0 < cj[x].0);
                if take_left {
                    merged.push(cj[x]);
                    x += 1;
                } else if take_right {
                    let v = pivot_col[y]
                        .1
                        .checked_mul(factor)
                        .and_then(i64::checked_neg)
                        .ok_or(Error::Overflow("smith elimination"))?;
                    merged.push((pivot_col[y].0, v));
                    row_cols[pivot_col[y].0 as usize].push(j as u32);
                    y += 1;
                } else {
                    let v = pivot_col[y]
                        .1
                        .checked_mul(factor)
                        .and_then(|t| cj[x].1.checked_sub(t))
                        .ok_or(Error::Overflow("smith elimination"))?;
                    if v != 0 {
                        merged.push((cj[x].0, v));
                    }
                    x += 1;
                    y += 1;
                }
            }
            cols[j] = merged;
        }
        alive[pc] = false;
        row_alive[pr as usize] = false;
        rank += 1;
        // the pivot row is now zero outside the pivot column; drop it from every column
        for j in row_cols[pr as usize].drain(..) {
            cols[j as usize].retain(|&(r, _)| r != pr);
        }
    }

    // dense core
    let core_cols: Vec<usize> = (0..cols.len()).filter(|&j| alive[j] && !cols[j].is_empty()).collect();
    let mut core_rows: Vec<u32> = core_cols.iter().flat_map(|&j| cols[j].iter().map(|&(r, _)| r)).collect();
    core_rows.sort_unstable();
    core_rows.dedup();
    if core_rows.len() * core_cols.len() > SMITH_DENSE_LIMIT {
        return Err(Error::InstanceTooLarge(format!(
            "Smith core {}x{} after unit elimination",
            core_rows.len(),
            core_cols.len()
        )));
    }
    let mut dense = vec![vec![BigInt::zero(); core_cols.len()]; core_rows.len()];
    for (cj, &j) in core_cols.iter().enumerate() {
        for &(r, v) in &cols[j] {
            let ri = core_rows.binary_search(&r).expect("row collected");
            dense[ri][cj] = BigInt::from(v);
        }
    }
    let diag = dense_smith_diagonal(dense);
    let mut torsion = Vec::new();
    for d in diag {
        rank += 1;
        if !d.is_one() {
            torsion.push(d);
        }
    }
    torsion.sort();
    Ok(SmithForm { rank, torsion })
}

/// Non-zero diagonal of the Smith form of a dense integer matrix, as absolute values.
pub fn dense_smith_diagonal(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < nrows.min(ncols) {
        // smallest non-zero entry of the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..nrows {
            for j in t..ncols {
                if !a[i][j].is_zero()
                    && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap(t, bi);
        for row in a.iter_mut() {
            row.swap(t, bj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..nrows {
                if a[i][t].is_zero() {
                    continue;
                }
                let f = a[i][t].div_floor(&a[t][t]);
                for j in t..ncols {
                    let v = &a[t][j] * &f;
                    a[i][j] -= v;
                }
                if !a[i][t].is_zero() {
                    a.swap(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..ncols {
                if a[t][j].is_zero() {
                    continue;
                }
                let f = a[t][j].div_floor(&a[t][t]);
                for row in a.iter_mut().skip(t) {
                    let v = &row[t] * &f;
                    row[j] -= v;
                }
                if !a[t][j].is_zero() {
                    for row in a.iter_mut() {
                        row.swap(t, j);
                    }
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // divisibility of the rest by the pivot
            let piv = a[t][t].clone();
            let bad = (t + 1..nrows).find(|&i| (t + 1..ncols).any(|j| !(&a[i][j] % &piv).is_zero()));
            match bad {
                Some(i) => {
                    for j in t..ncols {
                        let v = a[i][j].clone();
                        a[t][j] += v;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

/// Coefficient domain of a rank engine.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Coefficients {
    Rational,
    Prime(u64),
}

/// A way of computing exact ranks of integer matrices over a fixed coefficient field.
pub trait RankEngine: Send + Sync {
    fn name(&self) -> &str;
    fn coefficients(&self) -> Coefficients;
    fn rank(&self, m: &SparseMatrix) -> Result<usize>;
    /// Ranks of ∂_1, …, ∂_m; `boundaries[k−1]` is ∂_k.
    fn chain_ranks(&self, boundaries: &[SparseMatrix]) -> Result<Vec<usize>> {
        boundaries.iter().map(|b| self.rank(b)).collect()
    }
}

/// Sparse elimination over one prime field.
pub struct ModPrime {
    name: String,
    p: u64,
    sweep: Sweep,
}

impl ModPrime {
    pub fn new(name: impl Into<String>, p: u64, sweep: Sweep) -> ModPrime {
        ModPrime {
            name: name.into(),
            p,
            sweep,
        }
    }
}

impl RankEngine for ModPrime {
    fn name(&self) -> &str {
        &self.name
    }
    fn coefficients(&self) -> Coefficients {
        Coefficients::Prime(self.p)
    }
    fn rank(&self, m: &SparseMatrix) -> Result<usize> {
        Ok(rank_mod_p(m, self.p))
    }
    fn chain_ranks(&self, boundaries: &[SparseMatrix]) -> Result<Vec<usize>> {
        Ok(chain_ranks_mod_p(boundaries, self.p, self.sweep))
    }
}

/// Dense fraction-free elimination over Q, for small matrices.
pub struct Bareiss {
    pub max_entries: usize,
}

impl RankEngine for Bareiss {
    fn name(&self) -> &str {
        "bareiss"
    }
    fn coefficients(&self) -> Coefficients {
        Coefficients::Rational
    }
    fn rank(&self, m: &SparseMatrix) -> Result<usize> {
        if m.nrows() * m.ncols() > self.max_entries {
            return Err(Error::InstanceTooLarge(format!(
                "dense {}x{} exceeds the fraction-free limit",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(bareiss_rank(m))
    }
}

/// Rational rank as the common rank modulo two large primes; disagreement
/// falls back to fraction-free elimination when the matrix is small enough.
pub struct TwoPrimes {
    pub primes: (u64, u64),
    pub sweep: Sweep,
    pub fallback: Bareiss,
}

impl RankEngine for TwoPrimes {
    fn name(&self) -> &str {
        "two-primes"
    }
    fn coefficients(&self) -> Coefficients {
        Coefficients::Rational
    }
    fn rank(&self, m: &SparseMatrix) -> Result<usize> {
        let (a, b) = rayon::join(|| rank_mod_p(m, self.primes.0), || rank_mod_p(m, self.primes.1));
        if a == b {
            return Ok(a);
        }
        self.fallback
            .rank(m)
            .map_err(|_| Error::PrimeCollision(format!("ranks {a} and {b} differ")))
    }
    fn chain_ranks(&self, boundaries: &[SparseMatrix]) -> Result<Vec<usize>> {
        let (a, b) = rayon::join(
            || chain_ranks_mod_p(boundaries, self.primes.0, self.sweep),
            || chain_ranks_mod_p(boundaries, self.primes.1, self.sweep),
        );
        a.iter()
            .zip(&b)
            .zip(boundaries)
            .map(|((&x, &y), m)| {
                if x == y {
                    Ok(x)
                } else {
                    self.fallback
                        .rank(m)
                        .map_err(|_| Error::PrimeCollision(format!("ranks {x} and {y} differ")))
                }
            })
            .collect()
    }
}

/// Engines available by name. `rational` is the default for Betti numbers over Q.
pub fn engine_registry() -> Registry<dyn RankEngine> {
    let mut reg: Registry<dyn RankEngine> = Registry::new("rank engine");
    reg.register(
        "rational",
        Arc::new(TwoPrimes {
            primes: (PRIME_A, PRIME_B),
            sweep: Sweep::Cohomology,
            fallback: Bareiss { max_entries: 250_000 },
        }),
    );
    reg.register(
        "rational-homology-sweep",
        Arc::new(TwoPrimes {
            primes: (PRIME_A, PRIME_B),
            sweep: Sweep::Homology,
            fallback: Bareiss { max_entries: 250_000 },
        }),
    );
    reg.register("bareiss", Arc::new(Bareiss { max_entries: 250_000 }));
    reg.register("gf2", Arc::new(ModPrime::new("gf2", 2, Sweep::Cohomology)));
    reg.register("gf3", Arc::new(ModPrime::new("gf3", 3, Sweep::Cohomology)));
    reg.register("modp", Arc::new(ModPrime::new("modp", PRIME_A, Sweep::Cohomology)));
    reg
}

/// An engine over GF(p) for an arbitrary prime p.
pub fn prime_engine(p: u64) -> Result<Arc<dyn RankEngine>> {
    if !is_prime(p) {
        return Err(Error::InvalidParameter(format!("{p} is not prime")));
    }
    Ok(Arc::new(ModPrime::new(format!("gf{p}"), p, Sweep::Cohomology)))
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let z = Zp { p: n };
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = z.pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = z.mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Converts an exact big integer to i64 if it fits.
pub fn small(x: &BigInt) -> Option<i64> {
    x.to_i64()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> SparseMatrix {
        SparseMatrix::from_dense(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn primes_are_prime() {
        assert!(is_prime(PRIME_A) && is_prime(PRIME_B));
        assert!(!is_prime(PRIME_A - 2));
        assert!(is_prime(2) && is_prime(3) && !is_prime(1) && !is_prime(91));
    }

    #[test]
    fn ranks_depend_on_characteristic() {
        // determinant 2
        let a = m(&[&[1, 1], &[1, -1]]);
        assert_eq!(rank_mod_p(&a, 2), 1);
        assert_eq!(rank_mod_p(&a, 3), 2);
        assert_eq!(bareiss_rank(&a), 2);
        let s = smith_form(&a).unwrap();
        assert_eq!(s.rank, 2);
        assert_eq!(s.torsion, vec![BigInt::from(2)]);
    }

    #[test]
    fn smith_of_dense_examples() {
        let a = m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let d = dense_smith_diagonal(
            a.to_dense()
                .into_iter()
                .map(|r| r.into_iter().map(BigInt::from).collect())
                .collect(),
        );
        assert_eq!(d, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        let s = smith_form(&a).unwrap();
        assert_eq!(s.rank, 3);
        assert_eq!(s.torsion, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
    }

    #[test]
    fn registry_lookup() {
        let reg = engine_registry();
        assert!(reg.get("rational").is_ok());
        assert!(matches!(reg.get("nope"), Err(Error::UnknownStrategy { .. })));
        assert_eq!(reg.get("gf2").unwrap().coefficients(), Coefficients::Prime(2));
    }

    #[test]
    fn transpose_round_trip() {
        let a = m(&[&[1, 0, 2], &[0, 3, 0]]);
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.transpose().to_dense(), vec![vec![1, 0], vec![0, 3], vec![2, 0]]);
    }
}
