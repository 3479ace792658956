//! Differential structures on a finite set of points: graded forms over the
//! point algebra, first-order calculi cut down by an edge set, two-step local
//! complexes with their first cohomology, nerves of open covers, and discrete
//! connection data (curvature, gauge transformations, zero-curvature moduli).

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::calculus::{CalculusError, QuotientCalculus};
use crate::hopf::{set_algebra, FinAlgebra};
use crate::linalg::{tensor_index, LinMap, SVec, Subspace};
use crate::scalars::{Ctx, Scalar};

#[derive(Error, Debug)]
pub enum DiscreteError {
    #[error("invalid complex: {0}")]
    Invalid(String),
    #[error("invalid cochain data: {0}")]
    Cochain(String),
    #[error("enumeration needs {needed} candidates, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("gauge value at vertex {0} is not invertible")]
    NotInvertible(usize),
    #[error("curvature and cocycle tests disagree at candidate {0}")]
    CurvatureCocycleMismatch(String),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}

/// Graded forms over the functions on a finite point set. A degree-n form
/// assigns a scalar to each (n+1)-tuple of points with distinct neighbours.
/// The differential inserts the constant function 1 at each slot with
/// alternating signs, so on degree 0 it sends g to the two-index array with
/// entries g_j - g_i. The product concatenates tuples over a shared endpoint:
/// (f * g) at (i_0..i_{n+m}) is f(i_0..i_n) g(i_n..i_{n+m}).
pub struct PointForms {
    n_points: usize,
    ctx: Ctx,
}

impl PointForms {
    pub fn new(n_points: usize, ctx: Ctx) -> PointForms {
        assert!(n_points >= 1);
        PointForms { n_points, ctx }
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn ctx(&self) -> Ctx {
        self.ctx
    }

    /// n (n-1)^degree tuples with distinct adjacent entries.
    pub fn dim(&self, degree: usize) -> usize {
        let n = self.n_points;
        let mut d = n;
        for _ in 0..degree {
            d *= n - 1;
        }
        d
    }

    /// Mixed-radix rank of an adjacency-distinct tuple: the first entry is a
    /// full digit, each later entry a digit in 0..n-1 skipping its
    /// predecessor.
    pub fn tuple_index(&self, t: &[usize]) -> usize {
        assert!(!t.is_empty());
        let n = self.n_points;
        let mut idx = t[0];
        assert!(t[0] < n);
        for w in t.windows(2) {
            let (prev, cur) = (w[0], w[1]);
            assert!(cur < n && cur != prev, "tuple entries must differ from their neighbour");
            let digit = if cur < prev { cur } else { cur - 1 };
            idx = idx * (n - 1) + digit;
        }
        idx
    }

    pub fn tuple_of(&self, degree: usize, idx: usize) -> Vec<usize> {
        let n = self.n_points;
        let mut digits = vec![0usize; degree];
        let mut q = idx;
        for slot in (0..degree).rev() {
            digits[slot] = q % (n - 1);
            q /= n - 1;
        }
        assert!(q < n, "index out of range for degree {degree}");
        let mut t = Vec::with_capacity(degree + 1);
        t.push(q);
        for d in digits {
            let prev = *t.last().unwrap();
            t.push(if d < prev { d } else { d + 1 });
        }
        t
    }

    pub fn tuples(&self, degree: usize) -> Vec<Vec<usize>> {
        (0..self.dim(degree)).map(|i| self.tuple_of(degree, i)).collect()
    }

    pub fn basis_form(&self, t: &[usize]) -> SVec {
        SVec::unit(self.dim(t.len() - 1), self.tuple_index(t), self.ctx)
    }

    pub fn coeff(&self, f: &SVec, t: &[usize]) -> Scalar {
        f.get(self.tuple_index(t))
    }

    /// Differential of a degree-n form: alternating-sign insertion of 1 at
    /// each of the n+2 slots.
    pub fn d(&self, degree: usize, f: &SVec) -> SVec {
        assert_eq!(f.dim(), self.dim(degree));
        let n = self.n_points;
        let mut out = SVec::zero(self.dim(degree + 1), self.ctx);
        for (idx, c) in f.iter() {
            let t = self.tuple_of(degree, idx);
            for p in 0..=t.len() {
                let sign = if p % 2 == 0 { c.clone() } else { c.neg() };
                for v in 0..n {
                    if p > 0 && t[p - 1] == v {
                        continue;
                    }
                    if p < t.len() && t[p] == v {
                        continue;
                    }
                    let mut t2 = t.clone();
                    t2.insert(p, v);
                    let j = self.tuple_index(&t2);
                    let cur = out.get(j);
                    out.set(j, cur.add(&sign));
                }
            }
        }
        out
    }

    /// Concatenation product over a shared endpoint.
    pub fn product(&self, deg_f: usize, f: &SVec, deg_g: usize, g: &SVec) -> SVec {
        assert_eq!(f.dim(), self.dim(deg_f));
        assert_eq!(g.dim(), self.dim(deg_g));
        let mut out = SVec::zero(self.dim(deg_f + deg_g), self.ctx);
        for (fi, fc) in f.iter() {
            let tf = self.tuple_of(deg_f, fi);
            for (gi, gc) in g.iter() {
                let tg = self.tuple_of(deg_g, gi);
                if tf[deg_f] != tg[0] {
                    continue;
                }
                let mut t = tf.clone();
                t.extend_from_slice(&tg[1..]);
                let j = self.tuple_index(&t);
                let cur = out.get(j);
                out.set(j, cur.add(&fc.mul(gc)));
            }
        }
        out
    }

    /// The constant function 1, the unit for the concatenation product.
    pub fn unit(&self) -> SVec {
        let mut u = SVec::zero(self.dim(0), self.ctx);
        for i in 0..self.n_points {
            u.set(i, Scalar::one(self.ctx));
        }
        u
    }
}

/// A two-cell: either a back-and-forth pair (i, j, i) or a linked triple
/// (i, j, k) whose three sides are all edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Cell2 {
    Back(usize, usize),
    Triple(usize, usize, usize),
}

/// Finite point set with a loop-free directed edge set and optional two-cell
/// data. Edges and cells are sorted and deduplicated, so equal inputs give
/// byte-equal structures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteComplex {
    labels: Vec<String>,
    edges: Vec<(usize, usize)>,
    edge_index: BTreeMap<(usize, usize), usize>,
    cells: Vec<Cell2>,
}

impl DiscreteComplex {
    pub fn new(
        labels: Vec<String>,
        edges: Vec<(usize, usize)>,
        backs: Vec<(usize, usize)>,
        triples: Vec<(usize, usize, usize)>,
    ) -> Result<DiscreteComplex, DiscreteError> {
        if labels.is_empty() {
            return Err(DiscreteError::Invalid("need at least one vertex".into()));
        }
        let n = labels.len();
        if labels.iter().collect::<BTreeSet<_>>().len() != n {
            return Err(DiscreteError::Invalid("vertex labels must be distinct".into()));
        }
        let mut e: Vec<(usize, usize)> = edges;
        e.sort_unstable();
        e.dedup();
        for &(i, j) in &e {
            if i >= n || j >= n {
                return Err(DiscreteError::Invalid(format!("edge ({i},{j}) out of range")));
            }
            if i == j {
                return Err(DiscreteError::Invalid(format!("loop edge at vertex {i}")));
            }
        }
        let edge_index: BTreeMap<(usize, usize), usize> =
            e.iter().enumerate().map(|(k, &p)| (p, k)).collect();
        let mut cells = Vec::new();
        let mut b = backs;
        b.sort_unstable();
        b.dedup();
        for &(i, j) in &b {
            if !edge_index.contains_key(&(i, j)) || !edge_index.contains_key(&(j, i)) {
                return Err(DiscreteError::Invalid(format!(
                    "back cell ({i},{j},{i}) needs edges both ways"
                )));
            }
            cells.push(Cell2::Back(i, j));
        }
        let mut t = triples;
        t.sort_unstable();
        t.dedup();
        for &(i, j, k) in &t {
            for pair in [(i, j), (j, k), (i, k)] {
                if !edge_index.contains_key(&pair) {
                    return Err(DiscreteError::Invalid(format!(
                        "triple cell ({i},{j},{k}) needs edge ({},{})",
                        pair.0, pair.1
                    )));
                }
            }
            cells.push(Cell2::Triple(i, j, k));
        }
        Ok(DiscreteComplex { labels, edges: e, edge_index, cells })
    }

    /// Nerve of a cover: both directions of every overlapping pair become
    /// edges, every edge gets a back cell, and every overlapping triple
    /// contributes all six of its orderings.
    pub fn nerve(cover: &CoverDescription) -> Result<DiscreteComplex, DiscreteError> {
        cover.validate()?;
        let mut edges = Vec::new();
        for &(i, j) in &cover.pairs {
            edges.push((i, j));
            edges.push((j, i));
        }
        let backs = edges.clone();
        let mut triples = Vec::new();
        for &(a, b, c) in &cover.triples {
            for (x, y, z) in
                [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)]
            {
                triples.push((x, y, z));
            }
        }
        DiscreteComplex::new(cover.patches.clone(), edges, backs, triples)
    }

    pub fn n_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edge_index.contains_key(&(i, j))
    }

    pub fn edge_idx(&self, i: usize, j: usize) -> Option<usize> {
        self.edge_index.get(&(i, j)).copied()
    }

    pub fn cells(&self) -> &[Cell2] {
        &self.cells
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }
}

/// Which patches of a cover overlap pairwise and threefold. Triples must be
/// supported by their pairs.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CoverDescription {
    pub patches: Vec<String>,
    pub pairs: Vec<(usize, usize)>,
    pub triples: Vec<(usize, usize, usize)>,
}

impl CoverDescription {
    pub fn validate(&self) -> Result<(), DiscreteError> {
        let n = self.patches.len();
        if n == 0 {
            return Err(DiscreteError::Invalid("cover needs at least one patch".into()));
        }
        if self.patches.iter().collect::<BTreeSet<_>>().len() != n {
            return Err(DiscreteError::Invalid("patch labels must be distinct".into()));
        }
        let mut pairset = BTreeSet::new();
        for &(i, j) in &self.pairs {
            if i >= j || j >= n {
                return Err(DiscreteError::Invalid(format!(
                    "cover pair ({i},{j}) must satisfy i < j < {n}"
                )));
            }
            if !pairset.insert((i, j)) {
                return Err(DiscreteError::Invalid(format!("duplicate cover pair ({i},{j})")));
            }
        }
        for &(i, j, k) in &self.triples {
            if !(i < j && j < k && k < n) {
                return Err(DiscreteError::Invalid(format!(
                    "cover triple ({i},{j},{k}) must satisfy i < j < k < {n}"
                )));
            }
            for p in [(i, j), (j, k), (i, k)] {
                if !pairset.contains(&p) {
                    return Err(DiscreteError::Invalid(format!(
                        "cover triple ({i},{j},{k}) lacks pair ({},{})",
                        p.0, p.1
                    )));
                }
            }
        }
        let mut tset = BTreeSet::new();
        for &t in &self.triples {
            if !tset.insert(t) {
                return Err(DiscreteError::Invalid(format!("duplicate cover triple {t:?}")));
            }
        }
        Ok(())
    }
}

/// First-order calculus on the functions on the vertex set, with one basis
/// form per directed edge: the universal calculus modulo the span of the
/// non-edge basis tensors.
pub fn omega1_from_edges(
    cx: &DiscreteComplex,
    ctx: Ctx,
) -> Result<QuotientCalculus, DiscreteError> {
    let alg = set_algebra(cx.labels(), ctx);
    let n = cx.n_vertices();
    let mut relators = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && !cx.has_edge(i, j) {
                relators.push(SVec::unit(n * n, tensor_index(i, j, n), ctx));
            }
        }
    }
    let n_sub = Subspace::span(n * n, ctx, relators);
    Ok(QuotientCalculus::new(alg, n_sub)?)
}

/// Class of the basis tensor delta_i (x) delta_j in the quotient coordinates
/// of an edge calculus. For an edge (i, j) these classes form a basis of the
/// forms.
pub fn edge_form(m: &QuotientCalculus, i: usize, j: usize) -> SVec {
    let n = m.alg().dim();
    m.quo().project(&SVec::unit(n * n, tensor_index(i, j, n), m.alg().ctx()))
}

/// Reads an edge set back off a span of basis tensors inside the universal
/// first-order forms. Fails if the subspace is not spanned by the basis
/// tensors it contains, which is the shape every subbimodule here has.
pub fn edges_from_relations(
    n_sub: &Subspace,
    n_points: usize,
) -> Result<Vec<(usize, usize)>, DiscreteError> {
    assert_eq!(n_sub.ambient(), n_points * n_points);
    let ctx = n_sub.ctx();
    let mut contained = Vec::new();
    let mut edges = Vec::new();
    for i in 0..n_points {
        for j in 0..n_points {
            if i == j {
                continue;
            }
            let t = SVec::unit(n_points * n_points, tensor_index(i, j, n_points), ctx);
            if n_sub.contains(&t) {
                contained.push(t);
            } else {
                edges.push((i, j));
            }
        }
    }
    if &Subspace::span(n_points * n_points, ctx, contained) != n_sub {
        return Err(DiscreteError::Invalid(
            "subspace is not spanned by the basis tensors it contains".into(),
        ));
    }
    Ok(edges)
}

/// The two-step complex functions -> edge forms -> two-cells, with the edge
/// differential (dg)_{ij} = g_j - g_i and the cell differential
/// (df)_{iji} = f_{ij} + f_{ji}, (df)_{ijk} = f_{ij} - f_{ik} + f_{jk}.
pub struct LocalComplex {
    d0: LinMap,
    d1: LinMap,
}

impl LocalComplex {
    pub fn new(cx: &DiscreteComplex, ctx: Ctx) -> LocalComplex {
        let nv = cx.n_vertices();
        let ne = cx.n_edges();
        let nc = cx.n_cells();
        let d0 = LinMap::from_fn(nv, ne, ctx, |v| {
            let mut img = SVec::zero(ne, ctx);
            for (e, &(i, j)) in cx.edges().iter().enumerate() {
                let mut c = Scalar::zero(ctx);
                if j == v {
                    c = c.add(&Scalar::one(ctx));
                }
                if i == v {
                    c = c.sub(&Scalar::one(ctx));
                }
                if !c.is_zero() {
                    img.set(e, c);
                }
            }
            img
        });
        let d1 = LinMap::from_fn(ne, nc, ctx, |e| {
            let (a, b) = cx.edges()[e];
            let mut img = SVec::zero(nc, ctx);
            for (ci, cell) in cx.cells().iter().enumerate() {
                let mut c = Scalar::zero(ctx);
                match *cell {
                    Cell2::Back(i, j) => {
                        if (a, b) == (i, j) || (a, b) == (j, i) {
                            c = Scalar::one(ctx);
                        }
                    }
                    Cell2::Triple(i, j, k) => {
                        if (a, b) == (i, j) {
                            c = c.add(&Scalar::one(ctx));
                        }
                        if (a, b) == (i, k) {
                            c = c.sub(&Scalar::one(ctx));
                        }
                        if (a, b) == (j, k) {
                            c = c.add(&Scalar::one(ctx));
                        }
                    }
                }
                if !c.is_zero() {
                    img.set(ci, c);
                }
            }
            img
        });
        for v in 0..nv {
            assert!(d1.apply(d0.row(v)).is_zero(), "edge and cell differentials must compose to zero");
        }
        LocalComplex { d0, d1 }
    }

    pub fn d0(&self) -> &LinMap {
        &self.d0
    }

    pub fn d1(&self) -> &LinMap {
        &self.d1
    }
}

pub struct H1Outcome {
    pub dim: usize,
    pub representatives: Vec<SVec>,
    pub cocycles: Subspace,
    pub coboundaries: Subspace,
}

/// First cohomology of the two-step complex: closed edge forms modulo
/// differentials of functions, with one canonical edge-form representative
/// per class.
pub fn h1(cx: &DiscreteComplex, ctx: Ctx) -> H1Outcome {
    let lc = LocalComplex::new(cx, ctx);
    let z = lc.d1.kernel();
    let b = lc.d0.image();
    assert!(z.contains_subspace(&b));
    let zp = z.pivots();
    let coords = |v: &SVec| {
        let mut out = SVec::zero(zp.len(), ctx);
        for (slot, &p) in zp.iter().enumerate() {
            let c = v.get(p);
            if !c.is_zero() {
                out.set(slot, c);
            }
        }
        out
    };
    let b_in_z = Subspace::span(zp.len(), ctx, b.rows().iter().map(&coords));
    let quo = b_in_z.quotient();
    let mut representatives = Vec::new();
    for slot in 0..quo.dim() {
        let coord = quo.section(&SVec::unit(quo.dim(), slot, ctx));
        let mut amb = SVec::zero(cx.n_edges(), ctx);
        for (t, c) in coord.iter() {
            amb.add_scaled(&z.rows()[t], c);
        }
        representatives.push(amb);
    }
    H1Outcome { dim: z.dim() - b.dim(), representatives, cocycles: z, coboundaries: b }
}

fn check_edge_data(
    cx: &DiscreteComplex,
    alg: &FinAlgebra,
    beta: &[SVec],
    what: &str,
) -> Result<(), DiscreteError> {
    if beta.len() != cx.n_edges() {
        return Err(DiscreteError::Cochain(format!(
            "{what} has {} entries for {} edges",
            beta.len(),
            cx.n_edges()
        )));
    }
    for v in beta {
        if v.dim() != alg.dim() || v.ctx() != alg.ctx() {
            return Err(DiscreteError::Cochain(format!(
                "{what} entries must live in the coefficient algebra"
            )));
        }
    }
    Ok(())
}

/// Curvature of an algebra-valued edge cochain: on back cells
/// b_{ij} + b_{ji} + b_{ij} b_{ji}, on triples
/// b_{ij} + b_{jk} - b_{ik} + b_{ij} b_{jk}. One value per two-cell, in the
/// complex's cell order.
pub fn curvature(
    cx: &DiscreteComplex,
    alg: &FinAlgebra,
    beta: &[SVec],
) -> Result<Vec<SVec>, DiscreteError> {
    check_edge_data(cx, alg, beta, "connection")?;
    let at = |i: usize, j: usize| &beta[cx.edge_idx(i, j).unwrap()];
    let mut out = Vec::with_capacity(cx.n_cells());
    for cell in cx.cells() {
        let v = match *cell {
            Cell2::Back(i, j) => {
                let f = at(i, j).add(at(j, i));
                f.add(&alg.mul_vec(at(i, j), at(j, i)))
            }
            Cell2::Triple(i, j, k) => {
                let f = at(i, j).add(at(j, k)).sub(at(i, k));
                f.add(&alg.mul_vec(at(i, j), at(j, k)))
            }
        };
        out.push(v);
    }
    Ok(out)
}

/// Whether 1 + beta is a multiplicative cocycle: unit products around back
/// cells and composition across triples.
pub fn multiplicative_cocycle_check(
    cx: &DiscreteComplex,
    alg: &FinAlgebra,
    beta: &[SVec],
) -> Result<bool, DiscreteError> {
    check_edge_data(cx, alg, beta, "connection")?;
    let g = |i: usize, j: usize| alg.unit().add(&beta[cx.edge_idx(i, j).unwrap()]);
    for cell in cx.cells() {
        let ok = match *cell {
            Cell2::Back(i, j) => alg.mul_vec(&g(i, j), &g(j, i)) == *alg.unit(),
            Cell2::Triple(i, j, k) => alg.mul_vec(&g(i, j), &g(j, k)) == g(i, k),
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Gauge transformation by a vertex cochain of invertible algebra elements:
/// b_{ij} goes to g_i^{-1} b_{ij} g_j + g_i^{-1} g_j - 1, so that
/// 1 + b^g_{ij} = g_i^{-1} (1 + b_{ij}) g_j exactly.
pub fn gauge_transform(
    cx: &DiscreteComplex,
    alg: &FinAlgebra,
    beta: &[SVec],
    gamma: &[SVec],
) -> Result<Vec<SVec>, DiscreteError> {
    check_edge_data(cx, alg, beta, "connection")?;
    if gamma.len() != cx.n_vertices() {
        return Err(DiscreteError::Cochain(format!(
            "gauge has {} entries for {} vertices",
            gamma.len(),
            cx.n_vertices()
        )));
    }
    for v in gamma {
        if v.dim() != alg.dim() || v.ctx() != alg.ctx() {
            return Err(DiscreteError::Cochain(
                "gauge entries must live in the coefficient algebra".into(),
            ));
        }
    }
    let mut inv = Vec::with_capacity(gamma.len());
    for (i, v) in gamma.iter().enumerate() {
        inv.push(alg.inverse(v).ok_or(DiscreteError::NotInvertible(i))?);
    }
    let mut out = Vec::with_capacity(cx.n_edges());
    for (e, &(i, j)) in cx.edges().iter().enumerate() {
        let conj = alg.mul_vec(&alg.mul_vec(&inv[i], &beta[e]), &gamma[j]);
        let affine = alg.mul_vec(&inv[i], &gamma[j]).sub(alg.unit());
        out.push(conj.add(&affine));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuliOutcome {
    pub k: u32,
    pub cocycle_count: u64,
    pub coboundary_count: u64,
    pub class_count: u64,
    /// Exponent vectors over the edge list, the minimum of each gauge orbit.
    pub class_representatives: Vec<Vec<u32>>,
    pub candidates_checked: u64,
}

fn root_table(k: u32) -> (Ctx, Vec<Scalar>) {
    if k == 1 {
        (Ctx::Q, vec![Scalar::one(Ctx::Q)])
    } else {
        let ctx = Ctx::Zeta(k);
        (ctx, (0..k).map(|e| Scalar::zeta_pow(k, e as i64)).collect())
    }
}

fn odometer_next(digits: &mut [u32], base: u32) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Zero-curvature connections valued in the k-th roots of unity, counted up
/// to gauge. Every candidate is checked both through the curvature formula in
/// the cyclotomic field and through the exponent cocycle conditions; the two
/// must agree. Classes are counted twice, as cocycles over coboundaries and
/// by orbit search, and both counts must match.
pub fn moduli_zero_curvature(
    cx: &DiscreteComplex,
    k: u32,
    budget: u64,
) -> Result<ModuliOutcome, DiscreteError> {
    assert!(k >= 1);
    let ne = cx.n_edges();
    let nv = cx.n_vertices();
    let mut needed: u128 = 1;
    for _ in 0..ne.max(nv) {
        needed = needed
            .checked_mul(k as u128)
            .ok_or(DiscreteError::BudgetExceeded { needed: u128::MAX, budget })?;
    }
    if needed > budget as u128 {
        return Err(DiscreteError::BudgetExceeded { needed, budget });
    }
    let (ctx, roots) = root_table(k);
    let modk = |x: i64| -> u32 { x.rem_euclid(k as i64) as u32 };
    let one = Scalar::one(ctx);

    // F(beta) in the cyclotomic field for the candidate with the given edge
    // exponents, via the additive curvature formula.
    let beta_of = |e: &[u32]| -> Vec<Scalar> {
        e.iter().map(|&x| roots[x as usize].sub(&one)).collect()
    };
    let curvature_zero = |e: &[u32]| -> bool {
        let beta = beta_of(e);
        let at = |i: usize, j: usize| &beta[cx.edge_idx(i, j).unwrap()];
        cx.cells().iter().all(|cell| {
            let f = match *cell {
                Cell2::Back(i, j) => at(i, j).add(at(j, i)).add(&at(i, j).mul(at(j, i))),
                Cell2::Triple(i, j, k2) => at(i, j)
                    .add(at(j, k2))
                    .sub(at(i, k2))
                    .add(&at(i, j).mul(at(j, k2))),
            };
            f.is_zero()
        })
    };
    let exponent_cocycle = |e: &[u32]| -> bool {
        let at = |i: usize, j: usize| e[cx.edge_idx(i, j).unwrap()] as i64;
        cx.cells().iter().all(|cell| match *cell {
            Cell2::Back(i, j) => modk(at(i, j) + at(j, i)) == 0,
            Cell2::Triple(i, j, k2) => modk(at(i, j) + at(j, k2) - at(i, k2)) == 0,
        })
    };

    let mut z: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut digits = vec![0u32; ne];
    let mut candidates_checked = 0u64;
    loop {
        candidates_checked += 1;
        let mult = exponent_cocycle(&digits);
        let flat = curvature_zero(&digits);
        if mult != flat {
            return Err(DiscreteError::CurvatureCocycleMismatch(format!("{digits:?}")));
        }
        if flat {
            z.insert(digits.clone());
        }
        if !odometer_next(&mut digits, k) {
            break;
        }
    }

    // Coboundaries: edgewise exponent c_j - c_i for a vertex cochain c.
    let coboundary = |c: &[u32]| -> Vec<u32> {
        cx.edges().iter().map(|&(i, j)| modk(c[j] as i64 - c[i] as i64)).collect()
    };
    let mut b: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut vdigits = vec![0u32; nv];
    loop {
        b.insert(coboundary(&vdigits));
        if !odometer_next(&mut vdigits, k) {
            break;
        }
    }
    for cob in &b {
        if !z.contains(cob) {
            return Err(DiscreteError::CurvatureCocycleMismatch(format!(
                "coboundary {cob:?} is not flat"
            )));
        }
    }
    if z.len() % b.len() != 0 {
        return Err(DiscreteError::CurvatureCocycleMismatch(
            "coboundary count does not divide cocycle count".into(),
        ));
    }
    let by_index = (z.len() / b.len()) as u64;

    // Orbit search under single-vertex shifts, cross-checking the quotient.
    let shift = |e: &[u32], v: usize| -> Vec<u32> {
        cx.edges()
            .iter()
            .zip(e)
            .map(|(&(i, j), &x)| {
                let mut y = x as i64;
                if j == v {
                    y += 1;
                }
                if i == v {
                    y -= 1;
                }
                modk(y)
            })
            .collect()
    };
    let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut class_representatives = Vec::new();
    for start in &z {
        if seen.contains(start) {
            continue;
        }
        let mut orbit = BTreeSet::new();
        let mut stack = vec![start.clone()];
        while let Some(cur) = stack.pop() {
            if !orbit.insert(cur.clone()) {
                continue;
            }
            for v in 0..nv {
                stack.push(shift(&cur, v));
            }
        }
        class_representatives.push(orbit.iter().next().unwrap().clone());
        seen.extend(orbit);
    }
    if class_representatives.len() as u64 != by_index {
        return Err(DiscreteError::CurvatureCocycleMismatch(format!(
            "orbit count {} disagrees with index {}",
            class_representatives.len(),
            by_index
        )));
    }
    Ok(ModuliOutcome {
        k,
        cocycle_count: z.len() as u64,
        coboundary_count: b.len() as u64,
        class_count: by_index,
        class_representatives,
        candidates_checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::{group_algebra, Group};
    use crate::linalg::tensor_unindex as unpair;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i}")).collect()
    }

    fn circle3() -> CoverDescription {
        CoverDescription {
            patches: names(3),
            pairs: vec![(0, 1), (0, 2), (1, 2)],
            triples: vec![],
        }
    }

    fn disk3() -> CoverDescription {
        CoverDescription {
            patches: names(3),
            pairs: vec![(0, 1), (0, 2), (1, 2)],
            triples: vec![(0, 1, 2)],
        }
    }

    fn tetrahedron() -> CoverDescription {
        CoverDescription {
            patches: names(4),
            pairs: vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
            triples: vec![(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)],
        }
    }

    fn rand_svec(rng: &mut ChaCha8Rng, dim: usize) -> SVec {
        let mut v = SVec::zero(dim, Ctx::Q);
        for i in 0..dim {
            v.set(i, Scalar::from_i64(rng.gen_range(-3..=3), Ctx::Q));
        }
        v
    }

    #[test]
    fn graded_forms_dims_and_degree_zero_differential() {
        let pf = PointForms::new(3, Ctx::Q);
        assert_eq!(pf.dim(0), 3);
        assert_eq!(pf.dim(1), 6);
        assert_eq!(pf.dim(2), 12);
        assert_eq!(pf.dim(3), 24);
        for deg in 0..3 {
            for idx in 0..pf.dim(deg) {
                let t = pf.tuple_of(deg, idx);
                assert_eq!(pf.tuple_index(&t), idx);
                assert!(t.windows(2).all(|w| w[0] != w[1]));
            }
        }
        let g = pf.basis_form(&[0]);
        let dg = pf.d(0, &g);
        // (dg)_{ij} = g_j - g_i.
        assert!(pf.coeff(&dg, &[1, 0]).is_one());
        assert_eq!(pf.coeff(&dg, &[0, 1]), Scalar::from_i64(-1, Ctx::Q));
        assert!(pf.coeff(&dg, &[2, 0]).is_one());
        assert!(pf.coeff(&dg, &[1, 2]).is_zero());
    }

    #[test]
    fn graded_forms_d_squared_and_leibniz() {
        let pf = PointForms::new(4, Ctx::Q);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..4 {
            let f = rand_svec(&mut rng, pf.dim(0));
            let g = rand_svec(&mut rng, pf.dim(0));
            let w = rand_svec(&mut rng, pf.dim(1));
            let e = rand_svec(&mut rng, pf.dim(1));
            assert!(pf.d(1, &pf.d(0, &f)).is_zero());
            assert!(pf.d(2, &pf.d(1, &w)).is_zero());
            // d is a degree-one derivation for the concatenation product.
            let lhs0 = pf.d(0, &pf.product(0, &f, 0, &g));
            let rhs0 = pf
                .product(1, &pf.d(0, &f), 0, &g)
                .add(&pf.product(0, &f, 1, &pf.d(0, &g)));
            assert_eq!(lhs0, rhs0);
            let lhs1 = pf.d(1, &pf.product(1, &w, 0, &f));
            let rhs1 = pf
                .product(2, &pf.d(1, &w), 0, &f)
                .sub(&pf.product(1, &w, 1, &pf.d(0, &f)));
            assert_eq!(lhs1, rhs1);
            let lhs2 = pf.d(2, &pf.product(1, &w, 1, &e));
            let rhs2 = pf
                .product(2, &pf.d(1, &w), 1, &e)
                .sub(&pf.product(1, &w, 2, &pf.d(1, &e)));
            assert_eq!(lhs2, rhs2);
            let u = pf.unit();
            assert_eq!(pf.product(0, &u, 1, &w), w);
            assert_eq!(pf.product(1, &w, 0, &u), w);
            assert!(pf.d(0, &u).is_zero());
        }
    }

    #[test]
    fn complex_validation_rejects_bad_cells() {
        assert!(DiscreteComplex::new(names(2), vec![(0, 0)], vec![], vec![]).is_err());
        assert!(DiscreteComplex::new(
            names(2),
            vec![(0, 1)],
            vec![(0, 1)],
            vec![]
        )
        .is_err());
        assert!(DiscreteComplex::new(
            names(3),
            vec![(0, 1), (1, 2)],
            vec![],
            vec![(0, 1, 2)]
        )
        .is_err());
        let mut l = names(2);
        l[1] = l[0].clone();
        assert!(DiscreteComplex::new(l, vec![], vec![], vec![]).is_err());
    }

    #[test]
    fn nerve_shape() {
        let cx = DiscreteComplex::nerve(&disk3()).unwrap();
        assert_eq!(cx.n_edges(), 6);
        let backs = cx.cells().iter().filter(|c| matches!(c, Cell2::Back(..))).count();
        let triples = cx.cells().iter().filter(|c| matches!(c, Cell2::Triple(..))).count();
        assert_eq!(backs, cx.n_edges());
        assert_eq!(triples, 6);
        let bad = CoverDescription {
            patches: names(3),
            pairs: vec![(0, 1), (1, 2)],
            triples: vec![(0, 1, 2)],
        };
        assert!(DiscreteComplex::nerve(&bad).is_err());
    }

    #[test]
    fn edge_calculus_dimension_and_bimodule_action() {
        let cx = DiscreteComplex::nerve(&circle3()).unwrap();
        let m = omega1_from_edges(&cx, Ctx::Q).unwrap();
        assert_eq!(m.dim(), 6);
        // delta_a (di dj) = [a=i] di dj and (di dj) delta_b = [j=b] di dj.
        let n = cx.n_vertices();
        for &(i, j) in cx.edges() {
            let ef = edge_form(&m, i, j);
            assert!(m.forms().contains(&ef));
            let amb = m.quo().section(&ef);
            let (ti, tj) = unpair(amb.leading().unwrap().0, n);
            assert_eq!((ti, tj), (i, j));
            for a in 0..n {
                let da = SVec::unit(n, a, Ctx::Q);
                let left = m.left_mult(&da, &ef);
                let right = m.right_mult(&ef, &da);
                if a == i {
                    assert_eq!(left, ef);
                } else {
                    assert!(left.is_zero());
                }
                if a == j {
                    assert_eq!(right, ef);
                } else {
                    assert!(right.is_zero());
                }
            }
        }
        let path = DiscreteComplex::new(
            names(3),
            vec![(0, 1), (1, 0), (1, 2), (2, 1)],
            vec![],
            vec![],
        )
        .unwrap();
        assert_eq!(omega1_from_edges(&path, Ctx::Q).unwrap().dim(), 4);
    }

    #[test]
    fn directed_cycle_base_relations() {
        // Directed 3-cycle: with w = sum of the edge forms, d(delta_a) equals
        // (delta_{a-1} - delta_a) w and w delta_a = delta_{a-1} w.
        let cx = DiscreteComplex::new(
            names(3),
            vec![(0, 1), (1, 2), (2, 0)],
            vec![],
            vec![],
        )
        .unwrap();
        let m = omega1_from_edges(&cx, Ctx::Q).unwrap();
        assert_eq!(m.dim(), 3);
        let mut w = SVec::zero(m.quo().dim(), Ctx::Q);
        for &(i, j) in cx.edges() {
            w = w.add(&edge_form(&m, i, j));
        }
        let delta = |a: usize| SVec::unit(3, a, Ctx::Q);
        for a in 0..3usize {
            let prev = (a + 2) % 3;
            let lhs = m.d(&delta(a));
            let rhs = m.left_mult(&delta(prev).sub(&delta(a)), &w);
            assert_eq!(lhs, rhs);
            assert_eq!(m.right_mult(&w, &delta(a)), m.left_mult(&delta(prev), &w));
        }
    }

    #[test]
    fn h1_of_builtin_shapes() {
        let circle = DiscreteComplex::nerve(&circle3()).unwrap();
        let out = h1(&circle, Ctx::Q);
        assert_eq!(out.dim, 1);
        assert_eq!(out.representatives.len(), 1);
        let rep = &out.representatives[0];
        assert!(out.cocycles.contains(rep));
        assert!(!out.coboundaries.contains(rep));

        let disk = DiscreteComplex::nerve(&disk3()).unwrap();
        assert_eq!(h1(&disk, Ctx::Q).dim, 0);

        let tetra = DiscreteComplex::nerve(&tetrahedron()).unwrap();
        assert_eq!(h1(&tetra, Ctx::Q).dim, 0);

        let point = DiscreteComplex::nerve(&CoverDescription {
            patches: names(1),
            pairs: vec![],
            triples: vec![],
        })
        .unwrap();
        assert_eq!(h1(&point, Ctx::Q).dim, 0);
    }

    #[test]
    fn closed_edge_forms_on_a_nerve_are_antisymmetric() {
        let cx = DiscreteComplex::nerve(&tetrahedron()).unwrap();
        let lc = LocalComplex::new(&cx, Ctx::Q);
        for row in lc.d1().kernel().rows() {
            for (e, &(i, j)) in cx.edges().iter().enumerate() {
                let rev = cx.edge_idx(j, i).unwrap();
                assert_eq!(row.get(e), row.get(rev).neg());
            }
        }
    }

    #[test]
    fn curvature_matches_product_form_and_gauge_is_exact() {
        let cx = DiscreteComplex::nerve(&disk3()).unwrap();
        let hopf = group_algebra(&Group::symmetric_3(), Ctx::Q);
        let alg = hopf.alg().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let beta: Vec<SVec> =
            (0..cx.n_edges()).map(|_| rand_svec(&mut rng, alg.dim())).collect();
        let curv = curvature(&cx, &alg, &beta).unwrap();
        let g = |i: usize, j: usize| alg.unit().add(&beta[cx.edge_idx(i, j).unwrap()]);
        for (cell, f) in cx.cells().iter().zip(&curv) {
            let product_form = match *cell {
                Cell2::Back(i, j) => alg.mul_vec(&g(i, j), &g(j, i)).sub(alg.unit()),
                Cell2::Triple(i, j, k) => {
                    alg.mul_vec(&g(i, j), &g(j, k)).sub(&g(i, k))
                }
            };
            assert_eq!(*f, product_form);
        }

        // Group-like gauge values are invertible; the transported connection
        // satisfies 1 + b^g = g_i^{-1} (1 + b) g_j on each edge.
        let gamma: Vec<SVec> = (0..cx.n_vertices())
            .map(|v| SVec::unit(alg.dim(), v % alg.dim(), Ctx::Q))
            .collect();
        let moved = gauge_transform(&cx, &alg, &beta, &gamma).unwrap();
        for (e, &(i, j)) in cx.edges().iter().enumerate() {
            let gi_inv = alg.inverse(&gamma[i]).unwrap();
            let lhs = alg.unit().add(&moved[e]);
            let rhs = alg.mul_vec(&alg.mul_vec(&gi_inv, &alg.unit().add(&beta[e])), &gamma[j]);
            assert_eq!(lhs, rhs);
        }

        // A pure gauge of the zero connection is flat.
        let zero: Vec<SVec> = (0..cx.n_edges()).map(|_| SVec::zero(alg.dim(), Ctx::Q)).collect();
        let pure = gauge_transform(&cx, &alg, &zero, &gamma).unwrap();
        assert!(curvature(&cx, &alg, &pure).unwrap().iter().all(|f| f.is_zero()));
        assert!(multiplicative_cocycle_check(&cx, &alg, &pure).unwrap());

        // 1 + transposition kills the sign representation, so it has no
        // inverse and the gauge map must refuse it.
        let mut bad = gamma.clone();
        let mut v = SVec::unit(alg.dim(), 0, Ctx::Q);
        v.add_scaled(&SVec::unit(alg.dim(), 1, Ctx::Q), &Scalar::one(Ctx::Q));
        bad[0] = v;
        assert!(matches!(
            gauge_transform(&cx, &alg, &beta, &bad),
            Err(DiscreteError::NotInvertible(0))
        ));
    }

    #[test]
    fn moduli_counts_for_small_shapes() {
        let circle = DiscreteComplex::nerve(&circle3()).unwrap();
        for k in 2..=4u32 {
            let out = moduli_zero_curvature(&circle, k, 1 << 22).unwrap();
            assert_eq!(out.class_count, k as u64);
            assert_eq!(out.cocycle_count, (k as u64).pow(3));
            assert_eq!(out.coboundary_count, (k as u64).pow(2));
            assert_eq!(out.class_representatives.len(), k as usize);
        }
        let disk = DiscreteComplex::nerve(&disk3()).unwrap();
        let out = moduli_zero_curvature(&disk, 3, 1 << 22).unwrap();
        assert_eq!(out.class_count, 1);
        let point = DiscreteComplex::nerve(&CoverDescription {
            patches: names(1),
            pairs: vec![],
            triples: vec![],
        })
        .unwrap();
        assert_eq!(moduli_zero_curvature(&point, 5, 1 << 22).unwrap().class_count, 1);
        assert!(matches!(
            moduli_zero_curvature(&circle, 10, 100),
            Err(DiscreteError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn relations_round_trip_to_edges() {
        let cx = DiscreteComplex::nerve(&circle3()).unwrap();
        let m = omega1_from_edges(&cx, Ctx::Q).unwrap();
        let got = edges_from_relations(m.relations(), cx.n_vertices()).unwrap();
        assert_eq!(got, cx.edges());

        let n = 3;
        let mixed = Subspace::span(
            n * n,
            Ctx::Q,
            vec![SVec::unit(n * n, tensor_index(0, 1, n), Ctx::Q)
                .add(&SVec::unit(n * n, tensor_index(1, 2, n), Ctx::Q))],
        );
        assert!(edges_from_relations(&mixed, n).is_err());
    }
}
