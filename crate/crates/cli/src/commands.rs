//! One function per subcommand; each builds a [`RunReport`] and never prints.

use std::collections::BTreeSet;
use std::time::Instant;

use num_bigint::BigInt;

use framelab::complex::{clique_complex, DEFAULT_BUDGET};
use framelab::counts::{
    d_count, euler_decomp_poset, euler_frame, euler_nondeg_poset, frame_count, identity_suite, iso,
};
use framelab::field::FieldTable;
use framelab::garland::{garland_verdict, p_bound, q2_bound, vanishing_prediction};
use framelab::graph::{build_graph, expected_connectivity, walk_tables, walks_formula, OrthGraph};
use framelab::hermitian::{HermSpace, Position};
use framelab::homology::{betti, frame_homology, HomologyOptions};
use framelab::linalg::engine_registry;
use framelab::poset::{
    build_decomp_poset, build_nondeg_poset, fiber_check, hat_poset, interval_checks, wedge_identity_check,
};
use framelab::spectrum::{self, RANK_VERTEX_LIMIT};
use framelab::{Error, Result};

use crate::report::{list, Check, RunReport};

/// Largest graph on which enumeration oracles run (the vertex bound of the count oracle).
pub const ORACLE_VERTEX_LIMIT: u64 = 600;
/// Largest graph whose exact adjacency powers are formed.
pub const MATRIX_VERTEX_LIMIT: u64 = 1_000;
/// Largest space whose vectors are enumerated for the isotropic count.
pub const VECTOR_ENUM_LIMIT: u64 = 20_000_000;

pub mod refs {
    pub const LINES: &str = "closed form: non-degenerate line count";
    pub const ISOTROPIC: &str = "closed form: isotropic vector count";
    pub const FRAMES: &str = "closed form: frame count from unitary group orders";
    pub const EULER_FRAME: &str = "Euler characteristic of the frame complex";
    pub const EULER_NONDEG: &str = "Euler characteristic of the non-degenerate subspace poset";
    pub const EULER_DECOMP: &str = "Euler characteristic of the decomposition poset";
    pub const IDENTITIES: &str = "identities between line and isotropic counts";
    pub const WALKS: &str = "walk counts by relative position";
    pub const MINPOLY: &str = "quartic annihilator of the adjacency matrix";
    pub const MULTIPLICITIES: &str = "eigenvalue multiplicity table";
    pub const TRACES: &str = "trace identities for the spectrum";
    pub const LAPLACIAN: &str = "normalized Laplacian spectrum";
    pub const CONNECTIVITY: &str = "connectivity and diameter of the orthogonality graph";
    pub const HOMOLOGY: &str = "homology of small frame complexes";
    pub const TORSION: &str = "2-torsion in the frame complex for q = 2";
    pub const GARLAND: &str = "spectral vanishing criterion on links";
    pub const P_BOUND: &str = "P_j bounds and their q = 2 values";
    pub const VANISHING: &str = "predicted vanishing of rational homology";
    pub const WEDGE: &str = "wedge decomposition of the subspace poset";
    pub const FIBERS: &str = "fibers of the decomposition map";
    pub const INTERVALS: &str = "intervals of the decomposition poset";
    pub const HAT: &str = "frame poset without top frames";
}

/// Published reduced Betti numbers, degree 0 first.
pub fn known_betti(n: u32, q: u32) -> Option<&'static [usize]> {
    Some(match (n, q) {
        (3, 2) => &[3, 0, 0],
        (3, 3) => &[0, 64, 0],
        (4, 2) => &[0, 81, 0, 0],
        (4, 3) => &[0, 70, 9114, 0],
        _ => return None,
    })
}

/// Rejects unsupported fields and dimensions before any work.
pub fn validate(n: u32, q: u32) -> Result<()> {
    FieldTable::new(q)?;
    if n < 1 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    if n > 64 {
        return Err(Error::InvalidParameter(format!("dimension {n} is above 64")));
    }
    Ok(())
}

/// Vertex count of the orthogonality graph in dimension n.
pub fn vertex_count(n: u32, q: u32) -> BigInt {
    d_count(n + 1, q)
}

fn fits(n: u32, q: u32, limit: u64) -> bool {
    vertex_count(n, q) <= BigInt::from(limit)
}

#[derive(Clone, Debug, Default)]
pub struct CountOptions {
    pub euler_decomp: bool,
    /// Compare against enumeration when the instance is small enough.
    pub oracle: bool,
}

pub fn count(n: u32, q: u32, opts: &CountOptions) -> Result<RunReport> {
    validate(n, q)?;
    let mut r = RunReport::new("count").param("n", n).param("q", q);
    let start = Instant::now();
    let small = opts.oracle && fits(n, q, ORACLE_VERTEX_LIMIT);
    let g = if small { Some(build_graph(n as usize, q)?) } else { None };
    let k = match &g {
        Some(g) => Some(clique_complex(g, n as usize - 1, DEFAULT_BUDGET)?),
        None => None,
    };
    let skip = |id: &str| Check::skipped(id, "oracle not requested or instance above the enumeration limit");

    let lines = vertex_count(n, q);
    r.push(match &g {
        Some(g) => Check::equal("lines", g.vertex_count(), &lines),
        None => skip("lines").value("formula", &lines),
    }
    .reference(refs::LINES));

    let iso_n = iso(n, q);
    let vectors = BigInt::from(q).pow(2 * n);
    r.push(if opts.oracle && vectors <= BigInt::from(VECTOR_ENUM_LIMIT) {
        Check::equal("isotropic", HermSpace::standard(q, n as usize)?.enum_isotropic(), &iso_n)
    } else {
        skip("isotropic").value("formula", &iso_n)
    }
    .reference(refs::ISOTROPIC));

    for m in 0..=n {
        let f = frame_count(n, q, m)?;
        let id = format!("frames.m{m}");
        let c = match &k {
            // the empty frame is the single (−1)-simplex
            Some(_) if m == 0 => Check::equal(id, 1, &f),
            Some(k) => Check::equal(id, k.f_vector().get(m as usize - 1).copied().unwrap_or(0), &f),
            None => Check::new(id).value("formula", &f),
        };
        r.push(c.reference(refs::FRAMES));
    }

    let chi = euler_frame(n, q);
    r.push(match &k {
        Some(k) => Check::equal("euler_frame", k.euler_reduced(), &chi),
        None => Check::new("euler_frame").value("formula", &chi),
    }
    .reference(refs::EULER_FRAME));
    r.push(Check::new("euler_nondeg_poset").value("formula", euler_nondeg_poset(n, q)).reference(refs::EULER_NONDEG));
    if opts.euler_decomp {
        r.push(Check::new("euler_decomp_poset").value("formula", euler_decomp_poset(n, q)?).reference(refs::EULER_DECOMP));
    }
    if n >= 3 {
        for c in identity_suite(n, q)? {
            r.push(
                Check::new(format!("identity.{}", c.name))
                    .value("lhs", &c.lhs)
                    .value("rhs", &c.rhs)
                    .require(c.holds(), "identity fails")
                    .reference(refs::IDENTITIES),
            );
        }
    }
    r.time("count", start.elapsed());
    Ok(r)
}

/// Walk formulas for k ≤ `kmax`, checked against exact adjacency powers on small graphs.
pub fn walks(n: u32, q: u32, kmax: u32) -> Result<RunReport> {
    validate(n, q)?;
    if kmax > 4 {
        return Err(Error::InvalidParameter("walk length is capped at 4".into()));
    }
    let mut r = RunReport::new("walks").param("n", n).param("q", q).param("kmax", kmax);
    let start = Instant::now();
    let tables = if fits(n, q, MATRIX_VERTEX_LIMIT) {
        Some(walk_tables(&build_graph(n as usize, q)?, kmax as usize))
    } else {
        None
    };
    if let Some(Err(e)) = &tables {
        r.push(Check::new("class-constant").require(false, e.to_string()).reference(refs::WALKS));
    }
    for k in 0..=kmax {
        for c in Position::ALL {
            let id = format!("walks.k{k}.{}", c.label());
            let formula = walks_formula(n, q, k, c);
            let observed = match &tables {
                Some(Ok(t)) => Some(t[k as usize].get(c).cloned()),
                _ => None,
            };
            let check = match (formula, observed) {
                // the class has no pairs in this space
                (_, Some(None)) => Check::skipped(id, "position class is empty"),
                (Ok(f), Some(Some(m))) => Check::equal(id, m, f),
                (Ok(f), None) => Check::new(id).value("formula", f),
                (Err(e), Some(Some(m))) => Check::skipped(id, e.to_string()).value("matrix", m),
                (Err(e), None) => Check::skipped(id, e.to_string()),
            };
            r.push(check.reference(refs::WALKS));
        }
    }
    r.time("walks", start.elapsed());
    Ok(r)
}

pub fn spectrum(n: u32, q: u32, engine: &str) -> Result<RunReport> {
    validate(n, q)?;
    if n < 2 {
        return Err(Error::InvalidParameter("spectrum needs n >= 2".into()));
    }
    let eng = engine_registry().get(engine)?;
    let mut r = RunReport::new("spectrum").param("n", n).param("q", q).param("engine", eng.name());
    let start = Instant::now();
    let eig = spectrum::eigen_list(n, q)?;
    let mult = spectrum::multiplicities_formula(n, q)?;
    r.push(
        Check::new("eigenvalues")
            .value("eigenvalues", list(&eig))
            .value("multiplicities", list(&mult))
            .reference(refs::MULTIPLICITIES),
    );
    if n >= 3 {
        r.push(Check::new("minpoly").value("coefficients", list(&spectrum::minpoly_coeffs(n, q)?)).reference(refs::MINPOLY));
    }
    let traces = spectrum::trace_identities(n, q, &eig, &mult);
    r.push(
        Check::new("traces")
            .value("tr_I", traces[0])
            .value("tr_A", traces[1])
            .value("tr_A2", traces[2])
            .require(traces.iter().all(|&b| b), "a trace identity fails")
            .reference(refs::TRACES),
    );
    r.push(Check::new("laplacian").value("eigenvalues", list(&spectrum::laplacian_spectrum(n, q)?)).reference(refs::LAPLACIAN));
    if fits(n, q, RANK_VERTEX_LIMIT as u64) {
        let g = build_graph(n as usize, q)?;
        let rep = spectrum::spectrum_report(&g, eng.as_ref())?;
        r.push(Check::new("annihilation").require(rep.annihilation_ok, "polynomial does not annihilate A").reference(refs::MINPOLY));
        let rank = rep.rank_multiplicities.clone().unwrap_or_default();
        r.push(Check::equal("rank-multiplicities", list(&rank), list(&mult)).reference(refs::MULTIPLICITIES));
        r.push(Check::new("strongly-regular").value("value", rep.strongly_regular));
    } else {
        for id in ["annihilation", "rank-multiplicities"] {
            r.push(Check::skipped(id, format!("more than {RANK_VERTEX_LIMIT} vertices")));
        }
    }
    r.time("spectrum", start.elapsed());
    Ok(r)
}

/// Components and diameters by BFS against the connectivity theorem.
pub fn connectivity(g: &OrthGraph) -> Vec<Check> {
    let (n, q) = (g.n() as u32, g.q());
    let exp = expected_connectivity(n, q);
    let comps = g.components().len();
    let mut out = vec![Check::new("components")
        .value("got", comps)
        .value("expected", exp.components.map_or("?".into(), |c| c.to_string()))
        .require(exp.components.is_none_or(|c| c == comps as u64), "component count differs")
        .require((comps == 1) == exp.connected, "connectedness differs")
        .reference(refs::CONNECTIVITY)];
    if let Some(d) = exp.diameter {
        out.push(Check::equal("diameter", list(&g.diameters()), list(&[d])).reference(refs::CONNECTIVITY));
    }
    out
}

/// Degrees to compute torsion for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TorsionSpec {
    None,
    All,
    Degrees(Vec<usize>),
}

#[derive(Clone, Debug)]
pub struct HomologyArgs {
    pub max_dim: Option<usize>,
    pub torsion: TorsionSpec,
    pub collapse: String,
    pub engine: String,
    pub primes: Vec<u64>,
}

impl Default for HomologyArgs {
    fn default() -> Self {
        HomologyArgs {
            max_dim: None,
            torsion: TorsionSpec::None,
            collapse: "auto".into(),
            engine: "rational".into(),
            primes: Vec::new(),
        }
    }
}

/// Homology with its checks; also returns the rational Betti numbers for reuse.
pub fn homology_with_betti(n: u32, q: u32, a: &HomologyArgs) -> Result<(RunReport, Vec<usize>)> {
    validate(n, q)?;
    let top = n as usize - 1;
    let max_degree = a.max_dim.unwrap_or(top).min(top);
    let torsion_degrees = match &a.torsion {
        TorsionSpec::None => Vec::new(),
        TorsionSpec::All => (0..=max_degree).collect(),
        TorsionSpec::Degrees(d) => d.clone(),
    };
    let opts = HomologyOptions {
        max_degree: Some(max_degree),
        collapse: a.collapse.clone(),
        engine: a.engine.clone(),
        primes: a.primes.clone(),
        torsion_degrees,
        budget: DEFAULT_BUDGET,
    };
    let mut r = RunReport::new("homology")
        .param("n", n)
        .param("q", q)
        .param("max_dim", max_degree)
        .param("collapse", &a.collapse)
        .param("engine", &a.engine);
    let start = Instant::now();
    let h = frame_homology(n, q, &opts)?;
    r.time("homology", start.elapsed());
    let mut c = Check::new("betti")
        .value("f_vector", list(&h.f_vector))
        .value("collapsed_f_vector", list(&h.collapsed_f_vector))
        .value("collapse", &h.collapse)
        .value("betti", list(&h.betti));
    for (d, b) in h.betti.iter().enumerate() {
        c = c.value(format!("b{d}"), b);
    }
    if let Some(known) = known_betti(n, q) {
        c = c
            .value("expected", list(&known[..h.betti.len()]))
            .require(h.betti[..] == known[..h.betti.len()], "Betti numbers differ from the published ones");
    }
    r.push(c.reference(refs::HOMOLOGY));
    r.push(if h.complete {
        Check::new("euler")
            .value("euler", &h.euler)
            .value("formula", euler_frame(n, q))
            .require(h.euler_consistent(), "alternating Betti sum differs from the Euler characteristic")
            .require(h.euler == euler_frame(n, q), "complex Euler characteristic differs from the closed form")
            .reference(refs::EULER_FRAME)
    } else {
        Check::skipped("euler", "truncated computation").value("euler_truncated", &h.euler)
    });
    for (p, b) in &h.mod_p {
        r.push(Check::new(format!("mod{p}")).value("betti", list(b)));
    }
    for (d, t) in h.torsion2.iter().enumerate() {
        if let Some(t) = t {
            r.push(Check::new(format!("torsion2.h{d}")).value("summands", t).reference(refs::TORSION));
        }
    }
    let pred = vanishing_prediction(n, q);
    let hits: BTreeSet<u32> = pred.degrees.iter().copied().filter(|&d| (d as usize) <= max_degree).collect();
    r.push(
        Check::new("prediction")
            .value("degrees", list(&hits.iter().collect::<Vec<_>>()))
            .require(pred.consistent_with(&h.betti), "a predicted vanishing degree has non-zero Betti number")
            .reference(refs::VANISHING),
    );
    Ok((r, h.betti))
}

pub fn homology(n: u32, q: u32, a: &HomologyArgs) -> Result<RunReport> {
    homology_with_betti(n, q, a).map(|(r, _)| r)
}

pub fn garland(n: u32, q: u32) -> Result<RunReport> {
    validate(n, q)?;
    let mut r = RunReport::new("garland").param("n", n).param("q", q);
    for i in 0..n {
        let id = format!("link.i{i}");
        r.push(match garland_verdict(n, q, i) {
            Ok(v) => Check::new(id)
                .value("lambda_min", &v.lambda_min)
                .value("threshold", &v.threshold)
                .value("passes", v.passes)
                .reference(refs::GARLAND),
            Err(e @ (Error::LinkDisconnected(_) | Error::InvalidParameter(_))) => Check::skipped(id, e.to_string()),
            Err(e) => return Err(e),
        });
    }
    let jmin = if q == 2 { 4 } else { 3 };
    for j in jmin..=n.max(jmin) {
        let mut c = Check::new(format!("p_bound.j{j}")).value("value", p_bound(j, q)?);
        if q == 2 && n >= 4 && j <= n {
            c = c.value("q2_bound", q2_bound(n, n - j)?);
        }
        r.push(c.reference(refs::P_BOUND));
    }
    let pred = vanishing_prediction(n, q);
    let mut c = Check::new("prediction").value("degrees", list(&pred.degrees.iter().collect::<Vec<_>>()));
    for (name, hyp, d) in &pred.fired {
        c = c.value(format!("rule.{name}"), format!("{} ({hyp})", list(&d.iter().collect::<Vec<_>>())));
    }
    if let Some(b) = known_betti(n, q) {
        c = c.require(pred.consistent_with(b), "prediction contradicts published Betti numbers");
    }
    r.push(c.reference(refs::VANISHING));
    Ok(r)
}

/// Poset layer checks; the instances are small by construction of the posets.
pub fn poset(n: u32, q: u32) -> Result<RunReport> {
    validate(n, q)?;
    if !fits(n, q, ORACLE_VERTEX_LIMIT) {
        return Err(Error::InstanceTooLarge(format!(
            "poset checks enumerate subspaces; {} lines exceed {ORACLE_VERTEX_LIMIT}",
            vertex_count(n, q)
        )));
    }
    let g = build_graph(n as usize, q)?;
    let mut r = RunReport::new("poset").param("n", n).param("q", q);
    let start = Instant::now();
    let (s, _) = build_nondeg_poset(&g)?;
    r.push(Check::new("nondeg.elements").value("count", s.len()));
    let (d, _) = build_decomp_poset(&g)?;
    r.push(Check::new("decomp.elements").value("count", d.len()));
    let w = wedge_identity_check(&g)?;
    r.push(
        Check::new("wedge")
            .value("lhs", &w.lhs)
            .value("rhs", &w.rhs)
            .value("formula", euler_nondeg_poset(n, q))
            .require(w.holds(), "the two sides differ")
            .require(w.lhs == euler_nondeg_poset(n, q), "explicit poset differs from the closed form")
            .reference(refs::WEDGE),
    );
    let f = fiber_check(&g)?;
    r.push(
        Check::new("fibers")
            .value("chains", f.chains)
            .value("order_reversing", f.order_reversing)
            .value("fibers_ok", f.fibers_ok)
            .value("fibers_total", f.fibers_total)
            .require(f.passes(), "decomposition map fiber property fails")
            .reference(refs::FIBERS),
    );
    let iv = interval_checks(&g)?;
    r.push(
        Check::new("intervals")
            .value("elements", iv.elements)
            .value("upper_ok", iv.upper_ok)
            .value("lower_ok", iv.lower_ok)
            .require(iv.passes(), "an interval is not a product of partition lattices")
            .reference(refs::INTERVALS),
    );
    r.push(hat_check(&g)?);
    r.time("poset", start.elapsed());
    Ok(r)
}

/// The order complex of F̂(V) against the frame complex itself.
pub fn hat_check(g: &OrthGraph) -> Result<Check> {
    let engine = engine_registry().get("rational")?;
    let full = clique_complex(g, g.n() - 1, DEFAULT_BUDGET)?;
    let mut b = betti(&full, engine.as_ref())?;
    let hat = hat_poset(g)?.order_complex(DEFAULT_BUDGET)?;
    let mut bh = betti(&hat, engine.as_ref())?;
    let len = b.len().max(bh.len());
    b.resize(len, 0);
    bh.resize(len, 0);
    Ok(Check::equal("hat-betti", list(&bh), list(&b)).reference(refs::HAT))
}
