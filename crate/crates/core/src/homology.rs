//! Reduced Betti numbers and 2-torsion of simplicial complexes.

use num_bigint::BigInt;
use num_integer::Integer;

use crate::complex::{clique_complex, collapse_registry, SimComplex, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::graph::build_graph;
use crate::linalg::{engine_registry, smith_form, Coefficients, RankEngine};

/// Smith normal form is used for torsion only when ∂ is below this size on both sides.
pub const SMITH_SIZE_LIMIT: usize = 50_000;

/// Reduced Betti numbers from the f-vector and the ranks of ∂_1..∂_m.
/// Degrees up to m−1 are exact; degree m assumes ∂_{m+1} = 0.
pub fn betti_from_ranks(f: &[usize], ranks: &[usize]) -> Vec<usize> {
    let rank = |k: usize| if k >= 1 && k <= ranks.len() { ranks[k - 1] } else { 0 };
    (0..f.len())
        .map(|k| {
            let cycles = f[k] - rank(k) - usize::from(k == 0 && f[0] > 0);
            cycles - rank(k + 1)
        })
        .collect()
}

/// Reduced Betti numbers of `k` over the engine's coefficients, degrees 0..=dim.
pub fn betti(k: &SimComplex, engine: &dyn RankEngine) -> Result<Vec<usize>> {
    let ranks = engine.chain_ranks(&k.boundaries())?;
    Ok(betti_from_ranks(&k.f_vector(), &ranks))
}

/// How the 2-torsion count of one degree was obtained.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum TorsionMethod {
    Smith,
    ModTwoGap,
}

/// Number of Z/2^a summands of H_degree(k; Z) (for a ≥ 1).
///
/// Small boundaries use the Smith form of ∂_{degree+1}. Otherwise universal
/// coefficients give dim H_j(F₂) = b_j + t_j + t_{j−1} with t the 2-primary
/// counts, and t_0 = 0 since reduced H_0 is free; the gaps are unwound from
/// degree 0 upward. `rational_betti` may supply b_0..=b_degree.
pub fn torsion2_count(
    k: &SimComplex,
    degree: usize,
    rational_betti: Option<&[usize]>,
    method: Option<TorsionMethod>,
) -> Result<(usize, TorsionMethod)> {
    if degree as isize >= k.dim() {
        return Err(Error::InvalidParameter(format!(
            "torsion in degree {degree} needs simplices of dimension {}",
            degree + 1
        )));
    }
    let b = k.boundary(degree + 1);
    let small = b.nrows() <= SMITH_SIZE_LIMIT && b.ncols() <= SMITH_SIZE_LIMIT;
    let method = method.unwrap_or(if small { TorsionMethod::Smith } else { TorsionMethod::ModTwoGap });
    match method {
        TorsionMethod::Smith => {
            if !small {
                return Err(Error::InstanceTooLarge(format!(
                    "Smith form of a {}x{} boundary",
                    b.nrows(),
                    b.ncols()
                )));
            }
            let s = smith_form(&b)?;
            Ok((s.torsion.iter().filter(|d| d.is_even()).count(), method))
        }
        TorsionMethod::ModTwoGap => {
            let sk = k.skeleton(degree + 1);
            let reg = engine_registry();
            let f2 = betti(&sk, reg.get("gf2")?.as_ref())?;
            let bq = match rational_betti {
                Some(b) if b.len() > degree => b.to_vec(),
                _ => betti(&sk, reg.get("rational")?.as_ref())?,
            };
            let mut t = 0;
            for j in 0..=degree {
                t = f2[j] - bq[j] - t;
            }
            Ok((t, method))
        }
    }
}

/// Homology of one frame complex instance.
#[derive(Clone, Debug)]
pub struct HomologyReport {
    pub n: u32,
    pub q: u32,
    pub collapse: String,
    pub engine: String,
    /// f-vector of the complex before collapsing.
    pub f_vector: Vec<usize>,
    /// f-vector after collapsing.
    pub collapsed_f_vector: Vec<usize>,
    /// Reduced rational Betti numbers for degrees 0..=max_degree.
    pub betti: Vec<usize>,
    /// Reduced Betti numbers over GF(p) per requested prime.
    pub mod_p: Vec<(u64, Vec<usize>)>,
    /// Number of 2-primary summands per degree, where computed.
    pub torsion2: Vec<Option<usize>>,
    /// Reduced Euler characteristic of the complex.
    pub euler: BigInt,
    /// True when every degree of the complex was computed.
    pub complete: bool,
}

impl HomologyReport {
    /// Alternating Betti sum against the Euler characteristic; only meaningful when complete.
    pub fn euler_consistent(&self) -> bool {
        if !self.complete {
            return true;
        }
        let mut chi = BigInt::from(0);
        for (k, &b) in self.betti.iter().enumerate() {
            if k % 2 == 0 {
                chi += b;
            } else {
                chi -= b;
            }
        }
        chi == self.euler
    }
}

/// Options for [`frame_homology`].
#[derive(Clone, Debug)]
pub struct HomologyOptions {
    /// Highest degree to compute; None means all.
    pub max_degree: Option<usize>,
    pub collapse: String,
    pub engine: String,
    pub primes: Vec<u64>,
    /// Degrees whose 2-torsion is wanted.
    pub torsion_degrees: Vec<usize>,
    pub budget: usize,
}

impl Default for HomologyOptions {
    fn default() -> Self {
        HomologyOptions {
            max_degree: None,
            collapse: "auto".into(),
            engine: "rational".into(),
            primes: Vec::new(),
            torsion_degrees: Vec::new(),
            budget: DEFAULT_BUDGET,
        }
    }
}

/// Builds the frame complex of the standard unitary space and computes its homology.
///
/// With a degree cap below the top, only the skeleton one above the cap is built
/// and collapses are skipped: they remove simplices in the top three dimensions
/// only, which such a skeleton already omits or does not need.
pub fn frame_homology(n: u32, q: u32, opts: &HomologyOptions) -> Result<HomologyReport> {
    let g = build_graph(n as usize, q)?;
    let top = n as usize - 1;
    let max_degree = opts.max_degree.unwrap_or(top).min(top);
    let full = max_degree + 1 > top;
    let build_dim = if full { top } else { max_degree + 1 };
    let k = clique_complex(&g, build_dim, opts.budget)?;
    let euler = k.euler_reduced();
    let strategy = collapse_registry().get(&opts.collapse)?;
    let collapsed = if full { strategy.apply(&k, q, true)? } else { k.clone() };
    let engines = engine_registry();
    let engine = engines.get(&opts.engine)?;
    if engine.coefficients() != Coefficients::Rational {
        return Err(Error::InvalidParameter(format!(
            "engine {} does not compute rational ranks",
            engine.name()
        )));
    }
    let mut betti_all = betti(&collapsed, engine.as_ref())?;
    betti_all.resize(max_degree + 1, 0);
    let betti_q: Vec<usize> = betti_all[..=max_degree].to_vec();
    let mut mod_p = Vec::new();
    for &p in &opts.primes {
        let e = crate::linalg::prime_engine(p)?;
        let mut b = betti(&collapsed, e.as_ref())?;
        b.resize(max_degree + 1, 0);
        b.truncate(max_degree + 1);
        mod_p.push((p, b));
    }
    let mut torsion2 = vec![None; max_degree + 1];
    for &d in &opts.torsion_degrees {
        if d > max_degree {
            return Err(Error::InvalidParameter(format!("torsion degree {d} above max degree {max_degree}")));
        }
        // H_top is free, and collapses keep the integral homology
        torsion2[d] = Some(if d as isize >= collapsed.dim() {
            0
        } else {
            torsion2_count(&collapsed, d, Some(&betti_q), None)?.0
        });
    }
    Ok(HomologyReport {
        n,
        q,
        collapse: if full { strategy.name().to_string() } else { "none".into() },
        engine: engine.name().to_string(),
        f_vector: k.f_vector(),
        collapsed_f_vector: collapsed.f_vector(),
        betti: betti_q,
        mod_p,
        torsion2,
        euler,
        complete: full,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::engine_registry;

    #[test]
    fn small_instances() {
        let r = frame_homology(3, 2, &HomologyOptions::default()).unwrap();
        assert_eq!(r.betti, vec![3, 0, 0]);
        assert!(r.euler_consistent());
        let r = frame_homology(3, 3, &HomologyOptions::default()).unwrap();
        assert_eq!(r.betti, vec![0, 64, 0]);
        let opts = HomologyOptions {
            torsion_degrees: vec![0, 1],
            primes: vec![2, 3],
            ..Default::default()
        };
        let r = frame_homology(4, 2, &opts).unwrap();
        assert_eq!(r.betti, vec![0, 81, 0, 0]);
        assert_eq!(r.torsion2, vec![Some(0), Some(0), None, None]);
        assert_eq!(r.mod_p[0].1, vec![0, 81, 0, 0]);
        assert!(r.euler_consistent());
    }

    #[test]
    fn collapses_keep_betti() {
        for (n, q) in [(3, 2), (3, 3), (4, 2)] {
            let mut seen = Vec::new();
            for c in ["none", "hat", "auto"] {
                let opts = HomologyOptions {
                    collapse: c.into(),
                    ..Default::default()
                };
                seen.push(frame_homology(n, q, &opts).unwrap().betti);
            }
            assert!(seen.windows(2).all(|w| w[0] == w[1]), "({n},{q})");
        }
    }

    #[test]
    fn sweeps_and_engines_agree() {
        let g = build_graph(4, 2).unwrap();
        let k = clique_complex(&g, 3, DEFAULT_BUDGET).unwrap();
        let reg = engine_registry();
        let a = betti(&k, reg.get("rational").unwrap().as_ref()).unwrap();
        let b = betti(&k, reg.get("rational-homology-sweep").unwrap().as_ref()).unwrap();
        let c = betti(&k, reg.get("bareiss").unwrap().as_ref()).unwrap_or_else(|_| a.clone());
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn torsion_methods_agree_on_projective_plane() {
        // six-vertex triangulation of RP², H_1 = Z/2
        let rp2 = SimComplex::from_facets(&[
            vec![0, 1, 2], vec![0, 2, 3], vec![0, 3, 4], vec![0, 4, 5], vec![0, 5, 1],
            vec![1, 2, 4], vec![2, 3, 5], vec![3, 4, 1], vec![4, 5, 2], vec![5, 1, 3],
        ]);
        assert_eq!(rp2.f_vector(), vec![6, 15, 10]);
        let reg = engine_registry();
        assert_eq!(betti(&rp2, reg.get("rational").unwrap().as_ref()).unwrap(), vec![0, 0, 0]);
        assert_eq!(betti(&rp2, reg.get("gf2").unwrap().as_ref()).unwrap(), vec![0, 1, 1]);
        let s = torsion2_count(&rp2, 1, None, Some(TorsionMethod::Smith)).unwrap();
        let m = torsion2_count(&rp2, 1, None, Some(TorsionMethod::ModTwoGap)).unwrap();
        assert_eq!((s.0, m.0), (1, 1));
    }

    #[test]
    fn truncated_runs_report_low_degrees() {
        let opts = HomologyOptions {
            max_degree: Some(1),
            ..Default::default()
        };
        let r = frame_homology(4, 2, &opts).unwrap();
        assert_eq!(r.betti, vec![0, 81]);
        assert!(!r.complete);
    }
}
