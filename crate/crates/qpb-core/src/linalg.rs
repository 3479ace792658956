//! Exact linear algebra over the scalar fields: sparse vectors, subspaces in
//! reduced row echelon form, linear maps, quotients and operator saturation.
//! Echelon form always picks the leftmost pivot, so every subspace has one
//! canonical basis and equality is row-by-row comparison.

use crate::scalars::{Ctx, Scalar};
use std::collections::BTreeMap;

/// Sparse vector over a fixed scalar context: zero entries are never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SVec {
    dim: usize,
    ctx: Ctx,
    entries: BTreeMap<usize, Scalar>,
}

impl SVec {
    pub fn zero(dim: usize, ctx: Ctx) -> Self {
        SVec {
            dim,
            ctx,
            entries: BTreeMap::new(),
        }
    }

    pub fn unit(dim: usize, i: usize, ctx: Ctx) -> Self {
        let mut v = SVec::zero(dim, ctx);
        v.set(i, Scalar::one(ctx));
        v
    }

    pub fn from_entries(
        dim: usize,
        ctx: Ctx,
        entries: impl IntoIterator<Item = (usize, Scalar)>,
    ) -> Self {
        let mut v = SVec::zero(dim, ctx);
        for (i, c) in entries {
            let merged = v.get(i).add(&c);
            v.set(i, merged);
        }
        v
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ctx(&self) -> Ctx {
        self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> Scalar {
        assert!(i < self.dim, "index {i} out of range {}", self.dim);
        self.entries
            .get(&i)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.ctx))
    }

    pub fn coeff(&self, i: usize) -> Option<&Scalar> {
        self.entries.get(&i)
    }

    pub fn set(&mut self, i: usize, c: Scalar) {
        assert!(i < self.dim, "index {i} out of range {}", self.dim);
        if c.is_zero() {
            self.entries.remove(&i);
        } else {
            assert!(c.ctx() == self.ctx, "scalar context mismatch in vector");
            self.entries.insert(i, c);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.entries.iter().map(|(&i, c)| (i, c))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    /// Index and value of the leftmost nonzero entry.
    pub fn leading(&self) -> Option<(usize, &Scalar)> {
        self.entries.iter().next().map(|(&i, c)| (i, c))
    }

    pub fn add(&self, other: &SVec) -> SVec {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::one(self.ctx));
        out
    }

    pub fn sub(&self, other: &SVec) -> SVec {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::one(self.ctx).neg());
        out
    }

    pub fn neg(&self) -> SVec {
        SVec {
            dim: self.dim,
            ctx: self.ctx,
            entries: self.entries.iter().map(|(&i, c)| (i, c.neg())).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> SVec {
        if c.is_zero() {
            return SVec::zero(self.dim, self.ctx);
        }
        SVec {
            dim: self.dim,
            ctx: self.ctx,
            entries: self.entries.iter().map(|(&i, v)| (i, v.mul(c))).collect(),
        }
    }

    /// self += c * other, in place.
    pub fn add_scaled(&mut self, other: &SVec, c: &Scalar) {
        assert_eq!(self.dim, other.dim);
        assert!(self.ctx == other.ctx, "scalar context mismatch in vectors");
        if c.is_zero() {
            return;
        }
        for (i, v) in other.iter() {
            let t = v.mul(c);
            let merged = match self.entries.get(&i) {
                None => t,
                Some(cur) => cur.add(&t),
            };
            self.set(i, merged);
        }
    }

    /// Concatenate two sparse vectors (used by the doubled-ambient intersection).
    fn concat(&self, other: &SVec) -> SVec {
        let mut out = SVec::zero(self.dim + other.dim, self.ctx);
        for (i, c) in self.iter() {
            out.set(i, c.clone());
        }
        for (i, c) in other.iter() {
            out.set(self.dim + i, c.clone());
        }
        out
    }

    fn slice(&self, start: usize, len: usize) -> SVec {
        let mut out = SVec::zero(len, self.ctx);
        for (i, c) in self.iter() {
            if i >= start && i < start + len {
                out.set(i - start, c.clone());
            }
        }
        out
    }
}

/// Row-major index of a two-factor tensor basis element: the left factor
/// varies slowest.
pub fn tensor_index(left: usize, right: usize, right_dim: usize) -> usize {
    left * right_dim + right
}

pub fn tensor_unindex(idx: usize, right_dim: usize) -> (usize, usize) {
    (idx / right_dim, idx % right_dim)
}

/// Subspace of a based vector space, stored as reduced row echelon rows with
/// leftmost pivots, ascending. One canonical basis per subspace.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subspace {
    ambient: usize,
    ctx: Ctx,
    rows: Vec<SVec>,
}

impl Subspace {
    pub fn empty(ambient: usize, ctx: Ctx) -> Self {
        Subspace {
            ambient,
            ctx,
            rows: vec![],
        }
    }

    pub fn full(ambient: usize, ctx: Ctx) -> Self {
        let mut s = Subspace::empty(ambient, ctx);
        for i in 0..ambient {
            s.insert(SVec::unit(ambient, i, ctx));
        }
        s
    }

    pub fn span(ambient: usize, ctx: Ctx, vectors: impl IntoIterator<Item = SVec>) -> Self {
        let mut s = Subspace::empty(ambient, ctx);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn ctx(&self) -> Ctx {
        self.ctx
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SVec] {
        &self.rows
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.leading().unwrap().0).collect()
    }

    /// Basis indices of the canonical complement: the non-pivot coordinates.
    pub fn non_pivots(&self) -> Vec<usize> {
        let pivots = self.pivots();
        let mut out = Vec::with_capacity(self.ambient - pivots.len());
        let mut p = 0;
        for i in 0..self.ambient {
            if p < pivots.len() && pivots[p] == i {
                p += 1;
            } else {
                out.push(i);
            }
        }
        out
    }

    /// Residual of v after eliminating all pivot coordinates; zero iff v lies
    /// in the subspace.
    pub fn reduce(&self, v: &SVec) -> SVec {
        assert_eq!(v.dim(), self.ambient);
        let mut w = v.clone();
        for row in &self.rows {
            let p = row.leading().unwrap().0;
            let c = w.get(p);
            if !c.is_zero() {
                w.add_scaled(row, &c.neg());
            }
        }
        w
    }

    pub fn contains(&self, v: &SVec) -> bool {
        self.reduce(v).is_zero()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.rows.iter().all(|r| self.contains(r))
    }

    /// Insert a vector into the span. Returns true when the dimension grew.
    pub fn insert(&mut self, v: SVec) -> bool {
        let mut w = self.reduce(&v);
        let Some((p, lead)) = w.leading().map(|(i, c)| (i, c.clone())) else {
            return false;
        };
        let inv = lead.inv().expect("leading entry is nonzero");
        w = w.scale(&inv);
        for row in &mut self.rows {
            let c = row.get(p);
            if !c.is_zero() {
                row.add_scaled(&w, &c.neg());
            }
        }
        let at = self.rows.partition_point(|r| r.leading().unwrap().0 < p);
        self.rows.insert(at, w);
        true
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        let mut s = self.clone();
        for r in &other.rows {
            s.insert(r.clone());
        }
        s
    }

    /// Intersection via echelon in the doubled ambient: rows (a, a) for a in
    /// self and (b, 0) for b in other; rows with vanishing first half carry
    /// intersection vectors in the second half.
    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        let n = self.ambient;
        let mut work = Subspace::empty(2 * n, self.ctx);
        for a in &self.rows {
            work.insert(a.concat(a));
        }
        for b in &other.rows {
            work.insert(b.concat(&SVec::zero(n, self.ctx)));
        }
        let mut out = Subspace::empty(n, self.ctx);
        for row in &work.rows {
            if row.leading().unwrap().0 >= n {
                out.insert(row.slice(n, n));
            }
        }
        out
    }

    /// Quotient by this subspace: coset representatives are the non-pivot
    /// coordinates. Projection of the section is the identity.
    pub fn quotient(&self) -> QuotientSpace {
        let non_pivots = self.non_pivots();
        QuotientSpace {
            subspace: self.clone(),
            non_pivots,
        }
    }

    /// Smallest subspace containing `self` that is stable under every
    /// operator. Operators are applied to each vector admitted to the span.
    pub fn saturate(&self, operators: &[&dyn LinOp]) -> Subspace {
        let mut out = Subspace::empty(self.ambient, self.ctx);
        let mut pending: Vec<SVec> = self.rows.clone();
        while let Some(v) = pending.pop() {
            if out.insert(v.clone()) {
                for op in operators {
                    pending.push(op.apply(&v));
                }
            }
        }
        out
    }
}

/// Quotient of the ambient space by a subspace N, with canonical basis given
/// by the non-pivot coordinates of N.
#[derive(Clone, Debug)]
pub struct QuotientSpace {
    subspace: Subspace,
    non_pivots: Vec<usize>,
}

impl QuotientSpace {
    pub fn dim(&self) -> usize {
        self.non_pivots.len()
    }

    pub fn ambient(&self) -> usize {
        self.subspace.ambient()
    }

    pub fn ctx(&self) -> Ctx {
        self.subspace.ctx()
    }

    pub fn subspace(&self) -> &Subspace {
        &self.subspace
    }

    pub fn non_pivots(&self) -> &[usize] {
        &self.non_pivots
    }

    /// Class of an ambient vector in quotient coordinates.
    pub fn project(&self, v: &SVec) -> SVec {
        let reduced = self.subspace.reduce(v);
        let mut out = SVec::zero(self.non_pivots.len(), self.subspace.ctx());
        for (slot, &amb) in self.non_pivots.iter().enumerate() {
            let c = reduced.get(amb);
            if !c.is_zero() {
                out.set(slot, c);
            }
        }
        out
    }

    /// Canonical representative of a quotient vector.
    pub fn section(&self, v: &SVec) -> SVec {
        assert_eq!(v.dim(), self.non_pivots.len());
        let mut out = SVec::zero(self.subspace.ambient(), self.subspace.ctx());
        for (slot, c) in v.iter() {
            out.set(self.non_pivots[slot], c.clone());
        }
        out
    }
}

/// A linear operator given by its action on vectors; used for saturation and
/// for building maps lazily on large ambients.
pub trait LinOp {
    fn apply(&self, v: &SVec) -> SVec;
}

impl<F: Fn(&SVec) -> SVec> LinOp for F {
    fn apply(&self, v: &SVec) -> SVec {
        self(v)
    }
}

/// Linear map between based spaces, stored as the images of the source basis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinMap {
    source_dim: usize,
    target_dim: usize,
    ctx: Ctx,
    rows: Vec<SVec>,
}

impl LinMap {
    pub fn from_rows(source_dim: usize, target_dim: usize, ctx: Ctx, rows: Vec<SVec>) -> Self {
        assert_eq!(rows.len(), source_dim);
        for r in &rows {
            assert_eq!(r.dim(), target_dim);
        }
        LinMap {
            source_dim,
            target_dim,
            ctx,
            rows,
        }
    }

    pub fn from_fn(
        source_dim: usize,
        target_dim: usize,
        ctx: Ctx,
        f: impl Fn(usize) -> SVec,
    ) -> Self {
        let rows = (0..source_dim).map(f).collect();
        LinMap::from_rows(source_dim, target_dim, ctx, rows)
    }

    pub fn identity(dim: usize, ctx: Ctx) -> Self {
        LinMap::from_fn(dim, dim, ctx, |i| SVec::unit(dim, i, ctx))
    }

    pub fn zero(source_dim: usize, target_dim: usize, ctx: Ctx) -> Self {
        LinMap::from_fn(source_dim, target_dim, ctx, |_| {
            SVec::zero(target_dim, ctx)
        })
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn ctx(&self) -> Ctx {
        self.ctx
    }

    pub fn row(&self, i: usize) -> &SVec {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[SVec] {
        &self.rows
    }

    pub fn apply(&self, v: &SVec) -> SVec {
        assert_eq!(v.dim(), self.source_dim);
        let mut out = SVec::zero(self.target_dim, self.ctx);
        for (i, c) in v.iter() {
            out.add_scaled(&self.rows[i], c);
        }
        out
    }

    /// other after self: (self.then(other))(v) = other(self(v)).
    pub fn then(&self, other: &LinMap) -> LinMap {
        assert_eq!(self.target_dim, other.source_dim);
        LinMap::from_fn(self.source_dim, other.target_dim, self.ctx, |i| {
            other.apply(&self.rows[i])
        })
    }

    pub fn add(&self, other: &LinMap) -> LinMap {
        assert_eq!(self.source_dim, other.source_dim);
        assert_eq!(self.target_dim, other.target_dim);
        LinMap::from_fn(self.source_dim, self.target_dim, self.ctx, |i| {
            self.rows[i].add(&other.rows[i])
        })
    }

    pub fn sub(&self, other: &LinMap) -> LinMap {
        assert_eq!(self.source_dim, other.source_dim);
        assert_eq!(self.target_dim, other.target_dim);
        LinMap::from_fn(self.source_dim, self.target_dim, self.ctx, |i| {
            self.rows[i].sub(&other.rows[i])
        })
    }

    pub fn image(&self) -> Subspace {
        Subspace::span(self.target_dim, self.ctx, self.rows.iter().cloned())
    }

    pub fn kernel(&self) -> Subspace {
        let mut solver = Solver::new(self.target_dim, self.source_dim, self.ctx);
        for (i, r) in self.rows.iter().enumerate() {
            solver.feed(r.clone(), SVec::unit(self.source_dim, i, self.ctx));
        }
        solver.kernel()
    }

    pub fn rank(&self) -> usize {
        self.image().dim()
    }

    /// Some x with x applied through the map equal to target, if any.
    pub fn solve(&self, target: &SVec) -> Option<SVec> {
        let mut solver = Solver::new(self.target_dim, self.source_dim, self.ctx);
        for (i, r) in self.rows.iter().enumerate() {
            solver.feed(r.clone(), SVec::unit(self.source_dim, i, self.ctx));
        }
        solver.solve(target)
    }

    /// Restrict to a subspace of the source expressed in its canonical basis.
    pub fn restrict(&self, source: &Subspace) -> LinMap {
        assert_eq!(source.ambient(), self.source_dim);
        LinMap::from_fn(source.dim(), self.target_dim, self.ctx, |i| {
            self.apply(&source.rows()[i])
        })
    }
}

impl LinOp for LinMap {
    fn apply(&self, v: &SVec) -> SVec {
        LinMap::apply(self, v)
    }
}

/// Echelon accumulator over pairs (image, tag): reduces image parts to RREF
/// while carrying tags, so kernels and linear solves fall out of one pass.
pub struct Solver {
    img_dim: usize,
    tag_dim: usize,
    ctx: Ctx,
    rows: Vec<(SVec, SVec)>,
    kernel_rows: Vec<SVec>,
}

impl Solver {
    pub fn new(img_dim: usize, tag_dim: usize, ctx: Ctx) -> Self {
        Solver {
            img_dim,
            tag_dim,
            ctx,
            rows: vec![],
            kernel_rows: vec![],
        }
    }

    pub fn feed(&mut self, mut img: SVec, mut tag: SVec) {
        assert_eq!(img.dim(), self.img_dim);
        assert_eq!(tag.dim(), self.tag_dim);
        for (r_img, r_tag) in &self.rows {
            let p = r_img.leading().unwrap().0;
            let c = img.get(p);
            if !c.is_zero() {
                let nc = c.neg();
                img.add_scaled(r_img, &nc);
                tag.add_scaled(r_tag, &nc);
            }
        }
        match img.leading().map(|(i, c)| (i, c.clone())) {
            None => {
                self.kernel_rows.push(tag);
            }
            Some((p, lead)) => {
                let inv = lead.inv().expect("nonzero leading entry");
                img = img.scale(&inv);
                tag = tag.scale(&inv);
                for (r_img, r_tag) in &mut self.rows {
                    let c = r_img.get(p);
                    if !c.is_zero() {
                        let nc = c.neg();
                        r_img.add_scaled(&img, &nc);
                        r_tag.add_scaled(&tag, &nc);
                    }
                }
                let at = self
                    .rows
                    .partition_point(|(r, _)| r.leading().unwrap().0 < p);
                self.rows.insert(at, (img, tag));
            }
        }
    }

    /// Tags of the rows whose image part vanished: a spanning set of the
    /// kernel of the fed family.
    pub fn kernel(&self) -> Subspace {
        Subspace::span(self.tag_dim, self.ctx, self.kernel_rows.iter().cloned())
    }

    /// Combination x of the fed tags with image equal to target, if any.
    pub fn solve(&self, target: &SVec) -> Option<SVec> {
        let mut w = target.clone();
        let mut acc = SVec::zero(self.tag_dim, self.ctx);
        for (r_img, r_tag) in &self.rows {
            let p = r_img.leading().unwrap().0;
            let c = w.get(p);
            if !c.is_zero() {
                w.add_scaled(r_img, &c.neg());
                acc.add_scaled(r_tag, &c);
            }
        }
        if w.is_zero() {
            Some(acc)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Scalar;

    fn s(v: i64) -> Scalar {
        Scalar::from_i64(v, Ctx::Q)
    }

    fn vec_of(dim: usize, entries: &[(usize, i64)]) -> SVec {
        SVec::from_entries(dim, Ctx::Q, entries.iter().map(|&(i, v)| (i, s(v))))
    }

    #[test]
    fn echelon_is_canonical() {
        let a = Subspace::span(
            3,
            Ctx::Q,
            [vec_of(3, &[(0, 1), (1, 2)]), vec_of(3, &[(1, 1), (2, 1)])],
        );
        let b = Subspace::span(
            3,
            Ctx::Q,
            [
                vec_of(3, &[(0, 2), (1, 5), (2, 1)]),
                vec_of(3, &[(0, 1), (1, 3), (2, 1)]),
            ],
        );
        assert_eq!(a, b);
        assert_eq!(a.pivots(), vec![0, 1]);
        assert_eq!(a.non_pivots(), vec![2]);
    }

    #[test]
    fn mixed_context_vectors_work() {
        let z = Scalar::zeta(3);
        let v = SVec::from_entries(2, Ctx::Zeta(3), [(1, z.clone())]);
        let w = SVec::from_entries(2, Ctx::Zeta(3), [(0, Scalar::one(Ctx::Zeta(3)))]);
        let sum = v.add(&w);
        assert_eq!(sum.get(1), z);
        assert!(sum.get(0).is_one());
    }

    #[test]
    fn rank_nullity() {
        // 3x3 map of rank 2
        let m = LinMap::from_rows(
            3,
            3,
            Ctx::Q,
            vec![
                vec_of(3, &[(0, 1), (1, 1)]),
                vec_of(3, &[(1, 1), (2, 1)]),
                vec_of(3, &[(0, 1), (2, -1)]),
            ],
        );
        let k = m.kernel();
        let im = m.image();
        assert_eq!(k.dim() + im.dim(), 3);
        assert_eq!(im.dim(), 2);
        for r in k.rows() {
            assert!(m.apply(r).is_zero());
        }
    }

    #[test]
    fn quotient_projection_section() {
        let n = Subspace::span(4, Ctx::Q, [vec_of(4, &[(0, 1), (2, 1)])]);
        let q = n.quotient();
        assert_eq!(q.dim(), 3);
        let v = vec_of(4, &[(0, 2), (1, 3)]);
        let class = q.project(&v);
        // projection kills the subspace
        assert!(q.project(&n.rows()[0]).is_zero());
        // projection of the section is the identity
        assert_eq!(q.project(&q.section(&class)), class);
        // v - section(project(v)) lies in N
        let diff = v.sub(&q.section(&class));
        assert!(n.contains(&diff));
    }

    #[test]
    fn grassmann_identity() {
        let a = Subspace::span(
            4,
            Ctx::Q,
            [vec_of(4, &[(0, 1), (1, 1)]), vec_of(4, &[(2, 1)])],
        );
        let b = Subspace::span(
            4,
            Ctx::Q,
            [vec_of(4, &[(0, 1), (1, 1)]), vec_of(4, &[(3, 1)])],
        );
        let sum = a.sum(&b);
        let meet = a.intersect(&b);
        assert_eq!(sum.dim() + meet.dim(), a.dim() + b.dim());
        assert!(a.contains_subspace(&meet));
        assert!(b.contains_subspace(&meet));
        assert!(sum.contains_subspace(&a));
        assert!(sum.contains_subspace(&b));
    }

    #[test]
    fn saturation_under_shift() {
        // cyclic shift on 4 coordinates: the orbit of e_0 spans everything
        let shift = |v: &SVec| {
            let mut out = SVec::zero(4, Ctx::Q);
            for (i, c) in v.iter() {
                out.set((i + 1) % 4, c.clone());
            }
            out
        };
        let seed = Subspace::span(4, Ctx::Q, [SVec::unit(4, 0, Ctx::Q)]);
        let sat = seed.saturate(&[&shift]);
        assert_eq!(sat.dim(), 4);
        // a shift-invariant seed saturates to itself
        let inv = Subspace::span(4, Ctx::Q, [vec_of(4, &[(0, 1), (1, 1), (2, 1), (3, 1)])]);
        let sat2 = inv.saturate(&[&shift]);
        assert_eq!(sat2, inv);
    }

    #[test]
    fn solve_finds_preimage() {
        let m = LinMap::from_rows(
            2,
            3,
            Ctx::Q,
            vec![vec_of(3, &[(0, 1), (1, 1)]), vec_of(3, &[(1, 1), (2, 1)])],
        );
        let target = vec_of(3, &[(0, 1), (1, 2), (2, 1)]);
        let x = m.solve(&target).unwrap();
        assert_eq!(m.apply(&x), target);
        assert!(m.solve(&vec_of(3, &[(0, 1)])).is_none());
    }

    #[test]
    fn tensor_indexing_row_major() {
        assert_eq!(tensor_index(0, 0, 3), 0);
        assert_eq!(tensor_index(1, 0, 3), 3);
        assert_eq!(tensor_index(2, 1, 3), 7);
        assert_eq!(tensor_unindex(7, 3), (2, 1));
    }
}
