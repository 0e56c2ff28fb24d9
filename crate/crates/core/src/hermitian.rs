//! Vectors, subspaces and lines of a space with a Hermitian form over GF(q²).
//!
//! The form is Ψ(v, w) = Σ v_i G_ij τ(w_j), linear in v and τ-semilinear in w.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldTable};

pub type Vec2q = Vec<FieldElem>;

/// A non-degenerate line, stored by its canonical generator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Line {
    /// First non-zero coordinate is 1.
    pub rep: Vec2q,
    /// Ψ(rep, rep), never zero.
    pub norm_value: FieldElem,
}

/// Relative position of two non-degenerate lines S and W.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Position {
    /// S = W.
    Equal,
    /// S ⊥ W.
    Perp,
    /// S ≠ W, not orthogonal, S + W non-degenerate.
    NonDegenerate,
    /// S + W degenerate.
    Degenerate,
}

impl Position {
    pub const ALL: [Position; 4] = [
        Position::Equal,
        Position::Perp,
        Position::NonDegenerate,
        Position::Degenerate,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Position::Equal => "eq",
            Position::Perp => "perp",
            Position::NonDegenerate => "nd",
            Position::Degenerate => "d",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Row-reduces `rows` in place-free fashion; returns the non-zero rows of the reduced echelon form.
pub fn rref(f: &FieldTable, rows: &[Vec2q]) -> Vec<Vec2q> {
    let mut m: Vec<Vec2q> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..ncols {
        let Some(piv) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, piv);
        let inv = f.inv(m[r][c]).expect("pivot is non-zero");
        for x in m[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c];
                for j in 0..ncols {
                    let t = f.mul(factor, m[r][j]);
                    m[i][j] = f.sub(m[i][j], t);
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    m
}

/// Basis of {x : Σ_j row_j x_j = 0 for every row}, in an n-dimensional space.
pub fn null_space(f: &FieldTable, rows: &[Vec2q], n: usize) -> Vec<Vec2q> {
    let red = rref(f, rows);
    let pivots: Vec<usize> = red
        .iter()
        .map(|row| row.iter().position(|x| !x.is_zero()).expect("non-zero row"))
        .collect();
    let mut basis = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = vec![FieldElem::ZERO; n];
        v[free] = FieldElem::ONE;
        for (row, &pc) in red.iter().zip(&pivots) {
            v[pc] = f.neg(row[free]);
        }
        basis.push(v);
    }
    basis
}

/// A subspace in reduced row echelon form; equal subspaces have equal representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    n: usize,
    rows: Vec<Vec2q>,
}

impl Subspace {
    pub fn span(f: &FieldTable, n: usize, vectors: &[Vec2q]) -> Subspace {
        Subspace {
            n,
            rows: rref(f, vectors),
        }
    }

    pub fn zero(n: usize) -> Subspace {
        Subspace { n, rows: Vec::new() }
    }

    pub fn full(n: usize) -> Subspace {
        let rows = (0..n)
            .map(|i| {
                let mut v = vec![FieldElem::ZERO; n];
                v[i] = FieldElem::ONE;
                v
            })
            .collect();
        Subspace { n, rows }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec2q] {
        &self.rows
    }

    /// Canonical byte key: the flattened echelon basis.
    pub fn key(&self) -> Vec<u8> {
        self.rows.iter().flatten().map(|x| x.0).collect()
    }

    pub fn contains(&self, f: &FieldTable, v: &[FieldElem]) -> bool {
        let mut rows = self.rows.clone();
        rows.push(v.to_vec());
        rref(f, &rows).len() == self.rows.len()
    }

    pub fn is_subspace_of(&self, f: &FieldTable, other: &Subspace) -> bool {
        self.rows.iter().all(|r| other.contains(f, r))
    }

    pub fn sum(&self, f: &FieldTable, other: &Subspace) -> Subspace {
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Subspace::span(f, self.n, &rows)
    }

    /// Annihilator under the standard bilinear pairing.
    fn annihilator(&self, f: &FieldTable) -> Vec<Vec2q> {
        null_space(f, &self.rows, self.n)
    }

    pub fn intersection(&self, f: &FieldTable, other: &Subspace) -> Subspace {
        let mut ann = self.annihilator(f);
        ann.extend(other.annihilator(f));
        Subspace::span(f, self.n, &null_space(f, &ann, self.n))
    }
}

/// An n-dimensional GF(q²)-space with a τ-Hermitian Gram matrix.
#[derive(Clone, Debug)]
pub struct HermSpace {
    field: Arc<FieldTable>,
    n: usize,
    gram: Vec<FieldElem>,
    rad_dim: usize,
    identity: bool,
}

impl HermSpace {
    /// The standard form Σ v_i τ(w_i).
    pub fn standard(q: u32, n: usize) -> Result<HermSpace> {
        let field = Arc::new(FieldTable::new(q)?);
        Ok(HermSpace::standard_over(field, n))
    }

    pub fn standard_over(field: Arc<FieldTable>, n: usize) -> HermSpace {
        let mut gram = vec![FieldElem::ZERO; n * n];
        for i in 0..n {
            gram[i * n + i] = FieldElem::ONE;
        }
        HermSpace {
            field,
            n,
            gram,
            rad_dim: 0,
            identity: true,
        }
    }

    pub fn new(field: Arc<FieldTable>, gram: Vec<Vec<FieldElem>>) -> Result<HermSpace> {
        let n = gram.len();
        for row in &gram {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
        }
        for i in 0..n {
            for j in 0..n {
                if gram[i][j] != field.frobenius(gram[j][i]) {
                    return Err(Error::NotHermitian);
                }
            }
        }
        let rank = rref(&field, &gram).len();
        let identity = (0..n).all(|i| {
            (0..n).all(|j| gram[i][j] == if i == j { FieldElem::ONE } else { FieldElem::ZERO })
        });
        Ok(HermSpace {
            field,
            n,
            gram: gram.into_iter().flatten().collect(),
            rad_dim: n - rank,
            identity,
        })
    }

    pub fn field(&self) -> &FieldTable {
        &self.field
    }

    pub fn field_arc(&self) -> &Arc<FieldTable> {
        &self.field
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn gram(&self, i: usize, j: usize) -> FieldElem {
        self.gram[i * self.n + j]
    }

    /// n − rank(G), computed once at construction.
    pub fn rad_dim(&self) -> usize {
        self.rad_dim
    }

    pub fn is_nondegenerate_space(&self) -> bool {
        self.rad_dim == 0
    }

    /// The coefficient vector c with Ψ(v, w) = Σ v_i c_i.
    pub fn dual(&self, w: &[FieldElem]) -> Vec2q {
        let f = &*self.field;
        if self.identity {
            return w.iter().map(|&x| f.frobenius(x)).collect();
        }
        (0..self.n)
            .map(|i| {
                (0..self.n).fold(FieldElem::ZERO, |acc, j| {
                    f.add(acc, f.mul(self.gram(i, j), f.frobenius(w[j])))
                })
            })
            .collect()
    }

    /// Σ a_i b_i.
    pub fn dot(&self, a: &[FieldElem], b: &[FieldElem]) -> FieldElem {
        let f = &*self.field;
        a.iter()
            .zip(b)
            .fold(FieldElem::ZERO, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
    }

    fn form(&self, v: &[FieldElem], w: &[FieldElem]) -> FieldElem {
        self.dot(v, &self.dual(w))
    }

    pub fn form_eval(&self, v: &[FieldElem], w: &[FieldElem]) -> Result<FieldElem> {
        for x in [v, w] {
            if x.len() != self.n {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    got: x.len(),
                });
            }
        }
        Ok(self.form(v, w))
    }

    /// |v| = Ψ(v, v).
    pub fn sq_norm(&self, v: &[FieldElem]) -> FieldElem {
        self.form(v, v)
    }

    /// Scales v so its first non-zero coordinate is 1; None for the zero vector.
    pub fn canonical(&self, v: &[FieldElem]) -> Option<Vec2q> {
        let f = &*self.field;
        let lead = *v.iter().find(|x| !x.is_zero())?;
        let inv = f.inv(lead).ok()?;
        Some(v.iter().map(|&x| f.mul(x, inv)).collect())
    }

    pub fn line_of(&self, v: &[FieldElem]) -> Option<Line> {
        let rep = self.canonical(v)?;
        let norm_value = self.sq_norm(&rep);
        (!norm_value.is_zero()).then_some(Line { rep, norm_value })
    }

    fn for_each_canonical(&self, mut visit: impl FnMut(&[FieldElem])) {
        let qq = self.field.order();
        let n = self.n;
        let mut v = vec![FieldElem::ZERO; n];
        for lead in 0..n {
            v.iter_mut().for_each(|x| *x = FieldElem::ZERO);
            v[lead] = FieldElem::ONE;
            let tail = n - lead - 1;
            let total = qq.pow(tail as u32);
            for code in 0..total {
                let mut c = code;
                for pos in (lead + 1..n).rev() {
                    v[pos] = FieldElem((c % qq) as u8);
                    c /= qq;
                }
                visit(&v);
            }
        }
    }

    /// Every non-degenerate line once, sorted by canonical representative.
    pub fn enum_lines(&self) -> Vec<Line> {
        let mut lines = Vec::new();
        self.for_each_canonical(|v| {
            let norm_value = self.sq_norm(v);
            if !norm_value.is_zero() {
                lines.push(Line {
                    rep: v.to_vec(),
                    norm_value,
                });
            }
        });
        lines.sort();
        lines
    }

    /// Number of non-zero isotropic vectors.
    pub fn enum_isotropic(&self) -> u64 {
        let mut lines = 0u64;
        self.for_each_canonical(|v| {
            if self.sq_norm(v).is_zero() {
                lines += 1;
            }
        });
        lines * (self.field.order() as u64 - 1)
    }

    pub fn position(&self, s: &Line, w: &Line) -> Position {
        if s.rep == w.rep {
            return Position::Equal;
        }
        let f = &*self.field;
        let sw = self.form(&s.rep, &w.rep);
        if sw.is_zero() {
            return Position::Perp;
        }
        // Gram determinant of the pair; Ψ(w, s) = τ(Ψ(s, w)).
        let det = f.sub(f.mul(s.norm_value, w.norm_value), f.norm(sw));
        if det.is_zero() {
            Position::Degenerate
        } else {
            Position::NonDegenerate
        }
    }

    /// Classifies a pair of lines; requires a non-degenerate space.
    pub fn rel_position(&self, s: &Line, w: &Line) -> Result<Position> {
        if !self.is_nondegenerate_space() {
            return Err(Error::InvalidParameter("rel_position needs a non-degenerate space".into()));
        }
        Ok(self.position(s, w))
    }

    /// |E_0|, …, |E_3| for the pair (S, W), by enumerating lines T ⊥ S.
    pub fn eta_counts(&self, lines: &[Line], s: &Line, w: &Line) -> [u64; 4] {
        let mut eta = [0u64; 4];
        let ds = self.dual(&s.rep);
        for t in lines {
            if !self.dot(&t.rep, &ds).is_zero() {
                continue;
            }
            match self.position(t, w) {
                Position::Equal => eta[0] += 1,
                Position::Perp => {
                    eta[0] += 1;
                    eta[1] += 1
                }
                Position::NonDegenerate => {
                    eta[0] += 1;
                    eta[2] += 1
                }
                Position::Degenerate => eta[3] += 1,
            }
        }
        eta
    }

    pub fn eta_brute(&self, i: usize, s: &Line, w: &Line) -> Result<u64> {
        if i > 3 {
            return Err(Error::InvalidParameter(format!("eta index {i} not in 0..=3")));
        }
        if self.n < 3 || !self.is_nondegenerate_space() {
            return Err(Error::InvalidParameter(
                "eta_brute needs a non-degenerate space of dimension ≥ 3".into(),
            ));
        }
        Ok(self.eta_counts(&self.enum_lines(), s, w)[i])
    }

    fn check_ambient(&self, s: &Subspace) -> Result<()> {
        if s.ambient_dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: s.ambient_dim(),
            });
        }
        Ok(())
    }

    /// S^⊥ = {v : Ψ(v, s) = 0 for all s ∈ S}.
    pub fn orth_complement(&self, s: &Subspace) -> Result<Subspace> {
        self.check_ambient(s)?;
        let duals: Vec<Vec2q> = s.basis().iter().map(|b| self.dual(b)).collect();
        let basis = null_space(&self.field, &duals, self.n);
        Ok(Subspace::span(&self.field, self.n, &basis))
    }

    /// Rad(S) = S ∩ S^⊥.
    pub fn radical(&self, s: &Subspace) -> Result<Subspace> {
        let perp = self.orth_complement(s)?;
        Ok(s.intersection(&self.field, &perp))
    }

    /// Gram matrix of the form restricted to the echelon basis of S.
    pub fn restricted_gram(&self, s: &Subspace) -> Vec<Vec<FieldElem>> {
        let b = s.basis();
        b.iter()
            .map(|x| b.iter().map(|y| self.form(x, y)).collect())
            .collect()
    }

    pub fn is_nondegenerate(&self, s: &Subspace) -> Result<bool> {
        self.check_ambient(s)?;
        let g = self.restricted_gram(s);
        Ok(rref(&self.field, &g).len() == s.dim())
    }

    /// S with the restricted form, in coordinates of its echelon basis.
    pub fn restrict(&self, s: &Subspace) -> Result<HermSpace> {
        self.check_ambient(s)?;
        HermSpace::new(self.field.clone(), self.restricted_gram(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(f: &FieldTable, xs: &[i64]) -> Vec2q {
        xs.iter().map(|&x| f.from_int(x)).collect()
    }

    #[test]
    fn standard_form_examples() {
        let sp = HermSpace::standard(2, 3).unwrap();
        let f = sp.field();
        let e1 = v(f, &[1, 0, 0]);
        let e2 = v(f, &[0, 1, 0]);
        let all = v(f, &[1, 1, 1]);
        assert_eq!(sp.form_eval(&e1, &e1).unwrap(), FieldElem::ONE);
        assert_eq!(sp.form_eval(&e1, &e2).unwrap(), FieldElem::ZERO);
        assert_eq!(sp.form_eval(&all, &all).unwrap(), FieldElem::ONE);
        assert!(matches!(
            sp.form_eval(&e1, &v(f, &[1, 0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn radical_example() {
        let sp = HermSpace::standard(2, 3).unwrap();
        let f = sp.field();
        let s = Subspace::span(f, 3, &[v(f, &[1, 0, 0]), v(f, &[0, 1, 1])]);
        let rad = sp.radical(&s).unwrap();
        assert_eq!(rad.dim(), 1);
        assert!(rad.contains(f, &v(f, &[0, 1, 1])));
        assert!(!sp.is_nondegenerate(&s).unwrap());

        let full = Subspace::full(3);
        assert_eq!(sp.radical(&full).unwrap().dim(), 0);
        assert_eq!(sp.orth_complement(&full).unwrap().dim(), 0);
    }

    #[test]
    fn line_and_isotropic_counts() {
        assert_eq!(HermSpace::standard(2, 3).unwrap().enum_lines().len(), 12);
        let sp = HermSpace::standard(3, 2).unwrap();
        assert_eq!(sp.enum_lines().len(), 6);
        assert_eq!(sp.enum_isotropic(), 32);
        for q in [2, 3, 4] {
            let sp = HermSpace::standard(q, 1).unwrap();
            assert_eq!(sp.enum_lines().len(), 1);
            assert_eq!(sp.enum_isotropic(), 0);
        }
    }

    #[test]
    fn positions() {
        let sp = HermSpace::standard(2, 3).unwrap();
        let f = sp.field().clone();
        let s = sp.line_of(&v(&f, &[1, 0, 0])).unwrap();
        let w = sp.line_of(&v(&f, &[1, 1, 1])).unwrap();
        assert_eq!(sp.rel_position(&s, &s).unwrap(), Position::Equal);
        assert_eq!(sp.rel_position(&s, &w).unwrap(), Position::Degenerate);

        let sp = HermSpace::standard(3, 3).unwrap();
        let f = sp.field().clone();
        let s = sp.line_of(&v(&f, &[1, 0, 0])).unwrap();
        let w = sp.line_of(&v(&f, &[1, 1, 0])).unwrap();
        assert_eq!(sp.rel_position(&s, &w).unwrap(), Position::NonDegenerate);
    }

    #[test]
    fn positions_agree_with_radical_of_sum() {
        for (q, n) in [(2, 3), (3, 3), (2, 4)] {
            let sp = HermSpace::standard(q, n).unwrap();
            let f = sp.field().clone();
            let lines = sp.enum_lines();
            for s in lines.iter().step_by(3) {
                for w in &lines {
                    let pos = sp.position(s, w);
                    assert_eq!(pos, sp.position(w, s));
                    let sum = Subspace::span(&f, n, &[s.rep.clone(), w.rep.clone()]);
                    let degenerate = sp.radical(&sum).unwrap().dim() > 0;
                    assert_eq!(pos == Position::Degenerate, degenerate);
                    if q == 2 {
                        assert_ne!(pos, Position::NonDegenerate);
                    }
                }
            }
        }
    }

    #[test]
    fn complement_properties() {
        let sp = HermSpace::standard(3, 4).unwrap();
        let f = sp.field().clone();
        let lines = sp.enum_lines();
        for pair in lines.chunks(7).take(20) {
            let s = Subspace::span(&f, 4, &[pair[0].rep.clone(), pair[pair.len() - 1].rep.clone()]);
            let perp = sp.orth_complement(&s).unwrap();
            assert_eq!(perp.dim(), 4 - s.dim());
            assert_eq!(sp.orth_complement(&perp).unwrap(), s);
            assert_eq!(sp.radical(&perp).unwrap(), sp.radical(&s).unwrap());
            if sp.is_nondegenerate(&s).unwrap() {
                assert_eq!(s.intersection(&f, &perp).dim(), 0);
                assert!(sp.is_nondegenerate(&perp).unwrap());
            }
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let f = Arc::new(FieldTable::new(2).unwrap());
        let a = f.primitive_power(1);
        let gram = vec![vec![FieldElem::ONE, a], vec![a, FieldElem::ONE]];
        assert_eq!(HermSpace::new(f.clone(), gram).unwrap_err(), Error::NotHermitian);
        let gram = vec![
            vec![FieldElem::ONE, FieldElem::ZERO],
            vec![FieldElem::ZERO, FieldElem::ZERO],
        ];
        assert_eq!(HermSpace::new(f, gram).unwrap().rad_dim(), 1);
    }
}
