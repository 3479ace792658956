//! Named catalog of ready-made inputs (groups, matched pairs, covers, ideal
//! families) and the finite circle-fibre bundle over a base complex, with
//! closed-form oracles for its edge set and its connection representative.

use crate::bicross::{self, MatchedPair};
use crate::bundle::{
    bimodule_closure, build_calculus, coact_square, n0_from_connection, tensor_bundle,
    BundleCalculus, BundleConnection, BundleError, HorizontalChoice, UniversalBundle,
    UniversalConnection,
};
use crate::discrete::{CoverDescription, DiscreteComplex};
use crate::hopf::{function_algebra, set_algebra, Group};
use crate::linalg::{tensor_index, LinMap, SVec, Subspace};
use crate::scalars::{Ctx, Scalar};
use crate::qpoly::{monopole_family_generators, NCPoly, QPolyError};
use crate::tensor;

pub const GROUP_NAMES: [&str; 13] = [
    "z2", "z3", "z4", "z5", "z6", "z7", "z8", "z9", "z10", "z11", "z12", "s3", "s3s3",
];
pub const MATCHED_PAIR_NAMES: [&str; 2] = ["z3z2", "z6z6"];
pub const COVER_NAMES: [&str; 3] = ["circle-3", "disk-3", "tetrahedron"];
pub const FAMILY_NAMES: [&str; 4] =
    ["suq2-QP-1-1", "suq2-QP-1-2", "suq2-QP-2-2", "suq2-QP-1-1-0-0"];

pub fn group(name: &str) -> Option<Group> {
    match name {
        "s3" => Some(Group::symmetric_3()),
        "s3s3" => {
            let s3 = Group::symmetric_3();
            Some(Group::direct_product(&s3, &s3))
        }
        _ => name
            .strip_prefix('z')
            .and_then(|t| t.parse::<usize>().ok())
            .filter(|&n| (2..=12).contains(&n))
            .map(Group::cyclic),
    }
}

pub fn matched_pair(name: &str) -> Option<MatchedPair> {
    match name {
        "z3z2" => Some(bicross::z3z2()),
        "z6z6" => Some(bicross::z6z6()),
        _ => None,
    }
}

pub fn cover(name: &str) -> Option<CoverDescription> {
    let patch = |names: &[&str]| names.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    match name {
        "circle-3" => Some(CoverDescription {
            patches: patch(&["U0", "U1", "U2"]),
            pairs: vec![(0, 1), (0, 2), (1, 2)],
            triples: vec![],
        }),
        "disk-3" => Some(CoverDescription {
            patches: patch(&["U0", "U1", "U2"]),
            pairs: vec![(0, 1), (0, 2), (1, 2)],
            triples: vec![(0, 1, 2)],
        }),
        "tetrahedron" => Some(CoverDescription {
            patches: patch(&["U0", "U1", "U2", "U3"]),
            pairs: vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
            triples: vec![(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)],
        }),
        _ => None,
    }
}

/// Parses "suq2-QP-k-l" or "suq2-QP-k-l-r-s" into ideal generators; the
/// two-parameter form uses r = k, s = l.
pub fn monopole_family(name: &str) -> Option<Result<Vec<NCPoly>, QPolyError>> {
    let rest = name.strip_prefix("suq2-QP-")?;
    let parts: Vec<u32> = rest
        .split('-')
        .map(|t| t.parse::<u32>().ok())
        .collect::<Option<Vec<_>>>()?;
    let (k, l, r, s) = match parts[..] {
        [k, l] => (k, l, k, l),
        [k, l, r, s] => (k, l, r, s),
        _ => return None,
    };
    Some(monopole_family_generators(k, l, r, s))
}

pub struct CatalogEntry {
    pub kind: &'static str,
    pub name: &'static str,
    pub summary: String,
}

pub fn catalog() -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    for name in GROUP_NAMES {
        let g = group(name).expect("catalog names resolve");
        out.push(CatalogEntry {
            kind: "group",
            name,
            summary: format!("finite group of order {}", g.order()),
        });
    }
    for name in MATCHED_PAIR_NAMES {
        let mp = matched_pair(name).expect("catalog names resolve");
        out.push(CatalogEntry {
            kind: "matched-pair",
            name,
            summary: format!(
                "factorisation with factors of order {} and {}",
                mp.sigma().order(),
                mp.g().order()
            ),
        });
    }
    for name in COVER_NAMES {
        let c = cover(name).expect("catalog names resolve");
        out.push(CatalogEntry {
            kind: "cover",
            name,
            summary: format!(
                "{} patches, {} overlaps, {} triple overlaps",
                c.patches.len(),
                c.pairs.len(),
                c.triples.len()
            ),
        });
    }
    for name in FAMILY_NAMES {
        let gens = monopole_family(name)
            .expect("catalog names resolve")
            .expect("catalog families are legal");
        out.push(CatalogEntry {
            kind: "ideal-family",
            name,
            summary: format!("quantum-plane ideal with {} generators", gens.len()),
        });
    }
    out
}

#[derive(Debug, thiserror::Error)]
pub enum BuiltinError {
    #[error("unknown builtin {0:?}")]
    Unknown(String),
    #[error("bad gauge data: {0}")]
    BadGauge(String),
    #[error(transparent)]
    Bundle(#[from] BundleError),
}

/// Gauge data for the circle-fibre bundle: one scalar per directed base
/// edge, for each of the two nontrivial fibre levels. Absent entries are
/// zero; diagonal or non-edge entries are rejected.
#[derive(Clone, Debug, Default)]
pub struct GaugePair {
    pub level1: Vec<(usize, usize, Scalar)>,
    pub level2: Vec<(usize, usize, Scalar)>,
}

fn gauge_value<'a>(entries: &'a [(usize, usize, Scalar)], i: usize, j: usize) -> Option<&'a Scalar> {
    entries
        .iter()
        .find(|(a, b, _)| *a == i && *b == j)
        .map(|(_, _, c)| c)
        .filter(|c| !c.is_zero())
}

fn validate_gauge(
    cx: &DiscreteComplex,
    entries: &[(usize, usize, Scalar)],
    which: &str,
) -> Result<(), BuiltinError> {
    let mut seen = std::collections::BTreeSet::new();
    for (i, j, _) in entries {
        if i == j {
            return Err(BuiltinError::BadGauge(format!("{which} has a diagonal entry at {i}")));
        }
        if !cx.has_edge(*i, *j) {
            return Err(BuiltinError::BadGauge(format!(
                "{which} entry ({i},{j}) is not a base edge"
            )));
        }
        if !seen.insert((*i, *j)) {
            return Err(BuiltinError::BadGauge(format!("{which} repeats entry ({i},{j})")));
        }
    }
    Ok(())
}

/// A base complex with a three-point cyclic fibre: the total algebra is the
/// functions on vertices times fibre levels, the fibre ideal is spanned by
/// the delta function at the squared generator, and the gauge data enters
/// through the trivialization.
pub struct CircleBundle {
    pub bundle: UniversalBundle,
    pub trivialization: LinMap,
    pub fibre_ideal: Subspace,
    pub connection_u: UniversalConnection,
    pub calculus: BundleCalculus,
    pub connection: BundleConnection,
    pub n_base: usize,
}

pub const FIBRE_LEVELS: usize = 3;

/// Composite point index for base vertex i at fibre level a.
pub fn point_index(i: usize, a: usize) -> usize {
    tensor_index(i, a % FIBRE_LEVELS, FIBRE_LEVELS)
}

pub fn circle_bundle(
    cx: &DiscreteComplex,
    gauge: &GaugePair,
    ctx: Ctx,
) -> Result<CircleBundle, BuiltinError> {
    validate_gauge(cx, &gauge.level1, "level-1 gauge")?;
    validate_gauge(cx, &gauge.level2, "level-2 gauge")?;
    let n = cx.n_vertices();
    let m = set_algebra(cx.labels(), ctx);
    let h = function_algebra(&Group::cyclic(FIBRE_LEVELS), ctx);
    let (ca, phi) = tensor_bundle(&m, &h)?;
    let b = UniversalBundle::verify(ca)?;
    let np = b.p().dim();
    let inc = |i: usize| -> SVec {
        let mut v = SVec::zero(np, ctx);
        for a in 0..FIBRE_LEVELS {
            v.set(point_index(i, a), Scalar::one(ctx));
        }
        v
    };
    let row_of = |entries: &[(usize, usize, Scalar)]| -> SVec {
        let mut out = SVec::zero(np * np, ctx);
        for (i, j, c) in entries {
            out.add_scaled(&tensor::kron(&inc(*i), &inc(*j)), c);
        }
        out
    };
    let beta_u = LinMap::from_rows(
        FIBRE_LEVELS,
        np * np,
        ctx,
        vec![SVec::zero(np * np, ctx), row_of(&gauge.level1), row_of(&gauge.level2)],
    );
    let (connection_u, _phi_inv) = UniversalConnection::from_beta(&b, &phi, &beta_u)?;
    let mut base_rel = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && !cx.has_edge(i, j) {
                base_rel.push(tensor::kron(&inc(i), &inc(j)));
            }
        }
    }
    let n_m = bimodule_closure(b.p(), base_rel);
    let mut fibre_ideal = Subspace::empty(FIBRE_LEVELS, ctx);
    fibre_ideal.insert(SVec::unit(FIBRE_LEVELS, 2, ctx));
    let n0 = n0_from_connection(&b, &fibre_ideal, &connection_u)?;
    let choice = HorizontalChoice::Explicit(n_m.sum(&n0));
    let (calculus, connection) = build_calculus(&b, &fibre_ideal, &connection_u, choice)?;
    Ok(CircleBundle {
        bundle: b,
        trivialization: phi,
        fibre_ideal,
        connection_u,
        calculus,
        connection,
        n_base: n,
    })
}

fn degenerate_entry(gauge: &GaugePair, i: usize, j: usize, ctx: Ctx) -> bool {
    let mut s = Scalar::zero(ctx);
    if let Some(c) = gauge_value(&gauge.level1, i, j) {
        s = s.add(c);
    }
    if let Some(c) = gauge_value(&gauge.level2, i, j) {
        s = s.add(c);
    }
    s == Scalar::one(ctx)
}

/// The closed-form edge set of the induced total-space calculus: same-level
/// edges over base edges whose level-2 gauge value vanishes, one-step fibre
/// moves at every vertex, and level-raising edges over base edges whose
/// level-1 gauge value vanishes. These three rules require that no base
/// edge has gauge values summing to one; there the level-lowering relation
/// degenerates and extra edges survive, so this oracle refuses to answer.
pub fn circle_bundle_expected_edges(
    cx: &DiscreteComplex,
    gauge: &GaugePair,
    ctx: Ctx,
) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 0..FIBRE_LEVELS {
        for &(i, j) in cx.edges() {
            assert!(
                !degenerate_entry(gauge, i, j, ctx),
                "gauge values at ({i},{j}) sum to one; the three-rule edge set does not apply"
            );
            if gauge_value(&gauge.level2, i, j).is_none() {
                out.push((point_index(i, a), point_index(j, a)));
            }
            if gauge_value(&gauge.level1, i, j).is_none() {
                out.push((point_index(i, a), point_index(j, a + 1)));
            }
        }
        for i in 0..cx.n_vertices() {
            out.push((point_index(i, a), point_index(i, a + 1)));
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// The closed-form representative of the projected connection on the class
/// of the delta function at the fibre generator: gauge-weighted same-level
/// terms where the level-2 value vanishes, plus level-raising terms scaled
/// by one minus the level-2 value where the level-1 value vanishes, plus
/// the vertical level-raising sum.
pub fn circle_bundle_displayed_connection(
    cx: &DiscreteComplex,
    gauge: &GaugePair,
    ctx: Ctx,
) -> SVec {
    let np = cx.n_vertices() * FIBRE_LEVELS;
    let mut out = SVec::zero(np * np, ctx);
    let pair = |u: usize, v: usize| tensor::kron(&SVec::unit(np, u, ctx), &SVec::unit(np, v, ctx));
    for a in 0..FIBRE_LEVELS {
        for &(i, j) in cx.edges() {
            if gauge_value(&gauge.level2, i, j).is_none() {
                if let Some(c) = gauge_value(&gauge.level1, i, j) {
                    out.add_scaled(&pair(point_index(i, a), point_index(j, a)), c);
                }
            }
            if gauge_value(&gauge.level1, i, j).is_none() {
                let mut c = Scalar::one(ctx);
                if let Some(b2) = gauge_value(&gauge.level2, i, j) {
                    c = c.sub(b2);
                }
                out.add_scaled(&pair(point_index(i, a), point_index(j, a + 1)), &c);
            }
        }
        for i in 0..cx.n_vertices() {
            out.add_scaled(
                &pair(point_index(i, a), point_index(i, a + 1)),
                &Scalar::one(ctx),
            );
        }
    }
    out
}

/// The universal connection value on the delta function at fibre level
/// `power` (1 or 2), written out in closed form from the gauge data: the
/// two gauge sums at their shifted levels, plus a unit sum corrected by
/// both gauge values at the remaining level.
pub fn circle_bundle_displayed_universal(
    cx: &DiscreteComplex,
    gauge: &GaugePair,
    power: usize,
    ctx: Ctx,
) -> SVec {
    assert!(power == 1 || power == 2, "only the two nontrivial levels are displayed");
    let n = cx.n_vertices();
    let np = n * FIBRE_LEVELS;
    let mut out = SVec::zero(np * np, ctx);
    let pair = |u: usize, v: usize| tensor::kron(&SVec::unit(np, u, ctx), &SVec::unit(np, v, ctx));
    // level offsets of the two gauge sums and of the unit sum, per power
    let (off1, off2, off_unit) = if power == 1 { (0, 1, 2) } else { (2, 0, 1) };
    for a in 0..FIBRE_LEVELS {
        for (i, j, c) in &gauge.level1 {
            out.add_scaled(&pair(point_index(*i, a + off1), point_index(*j, a)), c);
            out.add_scaled(&pair(point_index(*i, a + off_unit), point_index(*j, a)), &c.neg());
        }
        for (i, j, c) in &gauge.level2 {
            out.add_scaled(&pair(point_index(*i, a + off2), point_index(*j, a)), c);
            out.add_scaled(&pair(point_index(*i, a + off_unit), point_index(*j, a)), &c.neg());
        }
        for i in 0..n {
            for j in 0..n {
                out.add_scaled(
                    &pair(point_index(i, a + off_unit), point_index(j, a)),
                    &Scalar::one(ctx),
                );
            }
        }
    }
    out
}

/// Evaluates both connection axioms directly on an explicit ambient
/// representative claimed for the fibre basis vector `g`: it must split the
/// quotient canonical map there and intertwine the adjoint coaction, with
/// the projected connection supplying the other components.
pub fn connection_axioms_on(
    b: &UniversalBundle,
    bc: &BundleCalculus,
    conn: &BundleConnection,
    g: usize,
    rep: &SVec,
) -> (bool, bool) {
    let p = b.p();
    let h = b.h();
    let nh = h.dim();
    let np = p.dim();
    let ctx = p.ctx();
    let cls = bc.form_coords(rep);
    let split = bc.chi_n().apply(&cls)
        == tensor::kron(p.unit(), bc.fibre().class_map().row(g));
    let coact2 = coact_square(b.comodule());
    let amb = coact2.apply(rep);
    let forms_dim = bc.forms_dim();
    let mut lhs = SVec::zero(forms_dim * nh, ctx);
    for (hh, slice) in tensor::slice_by_leg(&amb, &[np * np, nh], 1) {
        lhs.add_scaled(
            &tensor::kron(&bc.form_coords(&slice), &SVec::unit(nh, hh, ctx)),
            &Scalar::one(ctx),
        );
    }
    let ad = h.adjoint_coaction();
    let rhs = tensor::map_leg(ad.row(g), &[nh, nh], 0, forms_dim, |a| {
        if a == g {
            cls.clone()
        } else {
            conn.omega().row(a).clone()
        }
    });
    (split, lhs == rhs)
}

/// Base complexes for the circle-fibre examples: vertex labels v0..v(n-1)
/// with the given undirected pairs, both directions as edges.
pub fn base_complex(n: usize, pairs: &[(usize, usize)]) -> DiscreteComplex {
    let labels = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for &(i, j) in pairs {
        edges.push((i, j));
        edges.push((j, i));
    }
    DiscreteComplex::new(labels, edges, vec![], vec![]).expect("base pairs are legal")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_resolves_every_name() {
        let entries = catalog();
        assert_eq!(entries.len(), GROUP_NAMES.len() + 2 + 3 + 4);
        assert!(entries.iter().any(|e| e.name == "z6z6" && e.kind == "matched-pair"));
        assert!(entries.iter().any(|e| e.name == "circle-3" && e.kind == "cover"));
        assert!(entries.iter().any(|e| e.name == "suq2-QP-1-1" && e.kind == "ideal-family"));
        assert_eq!(group("z12").unwrap().order(), 12);
        assert_eq!(group("s3s3").unwrap().order(), 36);
        assert!(group("z1").is_none());
        assert!(group("z13").is_none());
        assert!(group("q8").is_none());
        assert!(matched_pair("z2z3").is_none());
        assert!(cover("sphere").is_none());
    }

    #[test]
    fn family_names_parse_and_validate() {
        assert_eq!(monopole_family("suq2-QP-1-1").unwrap().unwrap().len(), 6);
        assert_eq!(monopole_family("suq2-QP-1-1-0-0").unwrap().unwrap().len(), 6);
        assert!(monopole_family("suq2-QP-1").is_none());
        assert!(monopole_family("torus").is_none());
        assert!(monopole_family("suq2-QP-0-1").unwrap().is_err());
    }

    #[test]
    fn cover_nerves_have_expected_cohomology() {
        let ctx = Ctx::Q;
        let h1 = |name: &str| {
            let cx = DiscreteComplex::nerve(&cover(name).unwrap()).unwrap();
            crate::discrete::h1(&cx, ctx).dim
        };
        assert_eq!(h1("circle-3"), 1);
        assert_eq!(h1("disk-3"), 0);
        assert_eq!(h1("tetrahedron"), 0);
    }

    #[test]
    fn circle_bundle_edges_match_the_closed_form() {
        let ctx = Ctx::Q;
        let cx = base_complex(3, &[(0, 1), (1, 2), (0, 2)]);
        let two = Scalar::from_i64(2, ctx);
        let cases = [
            GaugePair::default(),
            GaugePair { level1: vec![(0, 1, two.clone())], level2: vec![] },
            GaugePair { level1: vec![], level2: vec![(1, 2, two.clone())] },
            GaugePair {
                level1: vec![(2, 0, Scalar::one(ctx))],
                level2: vec![(2, 0, two.clone())],
            },
        ];
        for gauge in &cases {
            let cb = circle_bundle(&cx, gauge, ctx).unwrap();
            let got = crate::discrete::edges_from_relations(
                cb.calculus.relations(),
                cb.bundle.p().dim(),
            )
            .unwrap();
            assert_eq!(got, circle_bundle_expected_edges(&cx, gauge, ctx));
        }
    }

    #[test]
    fn displayed_connection_data_match_the_projection() {
        let ctx = Ctx::Q;
        let cx = base_complex(3, &[(0, 1), (1, 2), (0, 2)]);
        let gauge = GaugePair {
            level1: vec![(0, 1, Scalar::from_i64(3, ctx))],
            level2: vec![(1, 2, Scalar::from_i64(2, ctx))],
        };
        let cb = circle_bundle(&cx, &gauge, ctx).unwrap();
        for power in [1usize, 2] {
            let shown = circle_bundle_displayed_universal(&cx, &gauge, power, ctx);
            assert_eq!(shown, *cb.connection_u.map().row(power));
        }
        let rep = circle_bundle_displayed_connection(&cx, &gauge, ctx);
        assert_eq!(cb.calculus.form_coords(&rep), *cb.connection.omega().row(1));
        let (split, covariant) =
            connection_axioms_on(&cb.bundle, &cb.calculus, &cb.connection, 1, &rep);
        assert!(split && covariant);
        // a deliberately wrong representative fails the splitting axiom
        let bad = rep.add(&tensor::kron(
            &SVec::unit(9, 0, ctx),
            &SVec::unit(9, 1, ctx),
        ));
        let (split_bad, _) =
            connection_axioms_on(&cb.bundle, &cb.calculus, &cb.connection, 1, &bad);
        assert!(!split_bad);
    }

    #[test]
    fn gauge_entries_outside_base_edges_are_rejected() {
        let ctx = Ctx::Q;
        let cx = base_complex(3, &[(0, 1), (1, 2)]);
        let bad = GaugePair { level1: vec![(0, 2, Scalar::one(ctx))], level2: vec![] };
        assert!(matches!(circle_bundle(&cx, &bad, ctx), Err(BuiltinError::BadGauge(_))));
        let dup = GaugePair {
            level1: vec![(0, 1, Scalar::one(ctx)), (0, 1, Scalar::from_i64(2, ctx))],
            level2: vec![],
        };
        assert!(matches!(circle_bundle(&cx, &dup, ctx), Err(BuiltinError::BadGauge(_))));
    }

    #[test]
    fn missing_base_edges_shrink_the_edge_set() {
        let ctx = Ctx::Q;
        let cx = base_complex(3, &[(0, 1), (1, 2)]);
        let cb = circle_bundle(&cx, &GaugePair::default(), ctx).unwrap();
        let got =
            crate::discrete::edges_from_relations(cb.calculus.relations(), 9).unwrap();
        let want = circle_bundle_expected_edges(&cx, &GaugePair::default(), ctx);
        assert_eq!(got, want);
        assert!(!want.contains(&(point_index(0, 0), point_index(2, 0))));
        assert!(want.contains(&(point_index(0, 0), point_index(1, 0))));
    }
}
