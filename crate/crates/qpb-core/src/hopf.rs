//! Finite groups, finite-dimensional algebras and Hopf algebras by structure
//! constants, comodule algebras, integrals and convolution inverses. All
//! structures are validated eagerly; axiom failures carry a witness.

use crate::linalg::{LinMap, SVec, Solver, Subspace};
use crate::scalars::{Ctx, Scalar};
use crate::tensor;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum HopfError {
    #[error("invalid group: {0}")]
    Group(String),
    #[error("invalid algebra: {0}")]
    Algebra(String),
    #[error("axiom {axiom} fails at {witness}")]
    Axiom { axiom: String, witness: String },
    #[error("{0}")]
    Other(String),
}

fn axiom_err(axiom: &str, witness: String) -> HopfError {
    HopfError::Axiom {
        axiom: axiom.to_string(),
        witness,
    }
}

/// Finite group with labelled elements and a full multiplication table.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Group {
    labels: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct GroupJson {
    elements: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
}

impl Group {
    pub fn from_table(
        labels: Vec<String>,
        table: Vec<Vec<usize>>,
        identity: usize,
    ) -> Result<Group, HopfError> {
        let n = labels.len();
        if n == 0 {
            return Err(HopfError::Group("empty element list".into()));
        }
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(HopfError::Group(format!("table must be {n}x{n}")));
        }
        if table.iter().flatten().any(|&v| v >= n) {
            return Err(HopfError::Group("table entry out of range".into()));
        }
        if identity >= n {
            return Err(HopfError::Group("identity index out of range".into()));
        }
        for i in 0..n {
            if table[identity][i] != i || table[i][identity] != i {
                return Err(HopfError::Group(format!(
                    "identity law fails at {}",
                    labels[i]
                )));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(HopfError::Group(format!(
                            "associativity fails at ({}, {}, {})",
                            labels[a], labels[b], labels[c]
                        )));
                    }
                }
            }
        }
        let mut inverses = vec![usize::MAX; n];
        for a in 0..n {
            for b in 0..n {
                if table[a][b] == identity && table[b][a] == identity {
                    inverses[a] = b;
                }
            }
            if inverses[a] == usize::MAX {
                return Err(HopfError::Group(format!("no inverse for {}", labels[a])));
            }
        }
        Ok(Group {
            labels,
            table,
            identity,
            inverses,
        })
    }

    pub fn from_json(text: &str) -> Result<Group, HopfError> {
        let parsed: GroupJson =
            serde_json::from_str(text).map_err(|e| HopfError::Group(format!("bad JSON: {e}")))?;
        Group::from_table(parsed.elements, parsed.table, parsed.identity)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&GroupJson {
            elements: self.labels.clone(),
            table: self.table.clone(),
            identity: self.identity,
        })
        .expect("group serializes")
    }

    pub fn cyclic(n: usize) -> Group {
        assert!(n >= 1);
        let labels = (0..n)
            .map(|k| match k {
                0 => "e".to_string(),
                1 => "g".to_string(),
                _ => format!("g^{k}"),
            })
            .collect();
        let table = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        Group::from_table(labels, table, 0).expect("cyclic group is valid")
    }

    /// Symmetric group on three points, generated by the transposition a and
    /// the 3-cycle b; element order e, a, b, b^2, ab, ab^2.
    pub fn symmetric_3() -> Group {
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [0, 2, 1],
            [2, 1, 0],
        ];
        let labels = ["e", "a", "b", "b^2", "ab", "ab^2"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let compose = |p: &[usize; 3], q: &[usize; 3]| [p[q[0]], p[q[1]], p[q[2]]];
        let table = perms
            .iter()
            .map(|p| {
                perms
                    .iter()
                    .map(|q| {
                        let pq = compose(p, q);
                        perms.iter().position(|r| *r == pq).unwrap()
                    })
                    .collect()
            })
            .collect();
        Group::from_table(labels, table, 0).expect("symmetric group is valid")
    }

    pub fn direct_product(a: &Group, b: &Group) -> Group {
        let n = a.order();
        let m = b.order();
        let mut labels = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                labels.push(format!("({},{})", a.labels[i], b.labels[j]));
            }
        }
        let table = (0..n * m)
            .map(|x| {
                let (xi, xj) = (x / m, x % m);
                (0..n * m)
                    .map(|y| {
                        let (yi, yj) = (y / m, y % m);
                        a.table[xi][yi] * m + b.table[xj][yj]
                    })
                    .collect()
            })
            .collect();
        Group::from_table(table_labels(labels), table, a.identity * m + b.identity)
            .expect("direct product is valid")
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn pow(&self, a: usize, k: i64) -> usize {
        let base = if k < 0 { self.inv(a) } else { a };
        let mut acc = self.identity;
        for _ in 0..k.unsigned_abs() {
            acc = self.mul(acc, base);
        }
        acc
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Indices of the subgroup generated by the given elements, ascending.
    pub fn subgroup_closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[self.identity] = true;
        let mut stack = vec![self.identity];
        while let Some(x) = stack.pop() {
            for &g in gens {
                for y in [self.mul(x, g), self.mul(x, self.inv(g))] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        (0..self.order()).filter(|&i| seen[i]).collect()
    }
}

fn table_labels(labels: Vec<String>) -> Vec<String> {
    labels
}

/// Finite-dimensional unital associative algebra by structure constants.
/// Associativity and the unit laws are verified on construction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FinAlgebra {
    ctx: Ctx,
    labels: Vec<String>,
    unit: SVec,
    /// Flat (i, j) -> product of basis vectors i and j, row-major.
    mult: Vec<SVec>,
}

impl FinAlgebra {
    pub fn new(
        ctx: Ctx,
        labels: Vec<String>,
        unit: SVec,
        mult: Vec<SVec>,
    ) -> Result<FinAlgebra, HopfError> {
        let n = labels.len();
        if unit.dim() != n || mult.len() != n * n || mult.iter().any(|v| v.dim() != n) {
            return Err(HopfError::Algebra("structure constant shape mismatch".into()));
        }
        let alg = FinAlgebra {
            ctx,
            labels,
            unit,
            mult,
        };
        for i in 0..n {
            let e = SVec::unit(n, i, ctx);
            if alg.mul_vec(&alg.unit, &e) != e || alg.mul_vec(&e, &alg.unit) != e {
                return Err(HopfError::Algebra(format!(
                    "unit law fails at {}",
                    alg.labels[i]
                )));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = alg.mul_basis(a, b).clone();
                for c in 0..n {
                    let left = alg.mul_vec(&ab, &SVec::unit(n, c, ctx));
                    let right = alg.mul_vec(&SVec::unit(n, a, ctx), alg.mul_basis(b, c));
                    if left != right {
                        return Err(HopfError::Algebra(format!(
                            "associativity fails at ({}, {}, {})",
                            alg.labels[a], alg.labels[b], alg.labels[c]
                        )));
                    }
                }
            }
        }
        Ok(alg)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn ctx(&self) -> Ctx {
        self.ctx
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn unit(&self) -> &SVec {
        &self.unit
    }

    pub fn mul_basis(&self, i: usize, j: usize) -> &SVec {
        &self.mult[i * self.dim() + j]
    }

    pub fn mul_vec(&self, a: &SVec, b: &SVec) -> SVec {
        let mut out = SVec::zero(self.dim(), self.ctx);
        for (i, c) in a.iter() {
            for (j, d) in b.iter() {
                out.add_scaled(self.mul_basis(i, j), &c.mul(d));
            }
        }
        out
    }

    /// Two-sided multiplicative inverse of `v`, if it has one.
    pub fn inverse(&self, v: &SVec) -> Option<SVec> {
        let n = self.dim();
        let right = LinMap::from_fn(n, n, self.ctx, |i| {
            self.mul_vec(&SVec::unit(n, i, self.ctx), v)
        });
        let x = right.solve(self.unit())?;
        if self.mul_vec(v, &x) != self.unit {
            return None;
        }
        Some(x)
    }

    /// Label of a vector as a sum of scalar-weighted basis labels.
    pub fn describe(&self, v: &SVec) -> String {
        describe_in_basis(v, &self.labels)
    }
}

pub fn describe_in_basis(v: &SVec, labels: &[String]) -> String {
    if v.is_zero() {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for (i, c) in v.iter() {
        parts.push(format!("({})*{}", c.serialize(), labels[i]));
    }
    parts.join(" + ")
}

/// Finite-dimensional Hopf algebra. Construction verifies every axiom:
/// coassociativity, counit, comultiplication and counit being algebra maps,
/// and the antipode law.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FinHopf {
    alg: FinAlgebra,
    /// Image of each basis vector in the tensor square, row-major.
    delta: Vec<SVec>,
    counit: Vec<Scalar>,
    antipode: Vec<SVec>,
}

impl FinHopf {
    pub fn new(
        alg: FinAlgebra,
        delta: Vec<SVec>,
        counit: Vec<Scalar>,
        antipode: Vec<SVec>,
    ) -> Result<FinHopf, HopfError> {
        let n = alg.dim();
        if delta.len() != n
            || counit.len() != n
            || antipode.len() != n
            || delta.iter().any(|v| v.dim() != n * n)
            || antipode.iter().any(|v| v.dim() != n)
        {
            return Err(HopfError::Algebra("coalgebra shape mismatch".into()));
        }
        let h = FinHopf {
            alg,
            delta,
            counit,
            antipode,
        };
        h.check_axioms()?;
        Ok(h)
    }

    /// Run every Hopf axiom; the first failure is reported with a witness.
    pub fn check_axioms(&self) -> Result<(), HopfError> {
        for (name, result) in self.axiom_report() {
            if let Err(witness) = result {
                return Err(axiom_err(&name, witness));
            }
        }
        Ok(())
    }

    /// Per-axiom pass/fail map with witnesses, in a fixed order.
    pub fn axiom_report(&self) -> Vec<(String, Result<(), String>)> {
        let n = self.dim();
        let ctx = self.ctx();
        let mut out = Vec::new();

        let coassoc = (0..n).find_map(|i| {
            let d = &self.delta[i];
            let lhs = tensor::map_leg(d, &[n, n], 0, n * n, |k| self.delta[k].clone());
            let rhs = tensor::map_leg(d, &[n, n], 1, n * n, |k| self.delta[k].clone());
            if lhs != rhs {
                Some(format!("basis {}", self.label(i)))
            } else {
                None
            }
        });
        out.push(("coassociativity".to_string(), coassoc.map_or(Ok(()), Err)));

        let counit_law = (0..n).find_map(|i| {
            let d = &self.delta[i];
            let left = tensor::contract_leg(d, &[n, n], 0, |k| self.counit[k].clone());
            let right = tensor::contract_leg(d, &[n, n], 1, |k| self.counit[k].clone());
            let e = SVec::unit(n, i, ctx);
            if left != e || right != e {
                Some(format!("basis {}", self.label(i)))
            } else {
                None
            }
        });
        out.push(("counit".to_string(), counit_law.map_or(Ok(()), Err)));

        let mut delta_alg = None;
        'outer: for a in 0..n {
            for b in 0..n {
                let lhs = self.delta_vec(self.alg.mul_basis(a, b));
                let rhs = self.mul_tensor_square(&self.delta[a], &self.delta[b]);
                if lhs != rhs {
                    delta_alg = Some(format!(
                        "pair ({}, {})",
                        self.label(a),
                        self.label(b)
                    ));
                    break 'outer;
                }
            }
        }
        if delta_alg.is_none() {
            let unit_img = self.delta_vec(self.alg.unit());
            let unit_sq = tensor::kron(self.alg.unit(), self.alg.unit());
            if unit_img != unit_sq {
                delta_alg = Some("unit".to_string());
            }
        }
        out.push((
            "comultiplication is an algebra map".to_string(),
            delta_alg.map_or(Ok(()), Err),
        ));

        let mut counit_alg = None;
        'outer2: for a in 0..n {
            for b in 0..n {
                let lhs = self.counit_vec(self.alg.mul_basis(a, b));
                let rhs = self.counit[a].mul(&self.counit[b]);
                if lhs != rhs {
                    counit_alg = Some(format!("pair ({}, {})", self.label(a), self.label(b)));
                    break 'outer2;
                }
            }
        }
        if counit_alg.is_none() && !self.counit_vec(self.alg.unit()).is_one() {
            counit_alg = Some("unit".to_string());
        }
        out.push((
            "counit is an algebra map".to_string(),
            counit_alg.map_or(Ok(()), Err),
        ));

        let antipode = (0..n).find_map(|i| {
            let d = &self.delta[i];
            let left_s = tensor::map_leg(d, &[n, n], 0, n, |k| self.antipode[k].clone());
            let left = tensor::map_pair(&left_s, &[n, n], 0, n, |a, b| {
                self.alg.mul_basis(a, b).clone()
            });
            let right_s = tensor::map_leg(d, &[n, n], 1, n, |k| self.antipode[k].clone());
            let right = tensor::map_pair(&right_s, &[n, n], 0, n, |a, b| {
                self.alg.mul_basis(a, b).clone()
            });
            let target = self.alg.unit().scale(&self.counit[i]);
            if left != target || right != target {
                Some(format!("basis {}", self.label(i)))
            } else {
                None
            }
        });
        out.push(("antipode".to_string(), antipode.map_or(Ok(()), Err)));

        out
    }

    pub fn alg(&self) -> &FinAlgebra {
        &self.alg
    }

    pub fn dim(&self) -> usize {
        self.alg.dim()
    }

    pub fn ctx(&self) -> Ctx {
        self.alg.ctx()
    }

    pub fn label(&self, i: usize) -> &str {
        self.alg.label(i)
    }

    pub fn labels(&self) -> &[String] {
        self.alg.labels()
    }

    pub fn delta(&self, i: usize) -> &SVec {
        &self.delta[i]
    }

    pub fn delta_vec(&self, v: &SVec) -> SVec {
        let n = self.dim();
        let mut out = SVec::zero(n * n, self.ctx());
        for (i, c) in v.iter() {
            out.add_scaled(&self.delta[i], c);
        }
        out
    }

    pub fn counit(&self, i: usize) -> &Scalar {
        &self.counit[i]
    }

    pub fn counit_vec(&self, v: &SVec) -> Scalar {
        let mut out = Scalar::zero(self.ctx());
        for (i, c) in v.iter() {
            out = out.add(&self.counit[i].mul(c));
        }
        out
    }

    pub fn antipode(&self, i: usize) -> &SVec {
        &self.antipode[i]
    }

    pub fn antipode_vec(&self, v: &SVec) -> SVec {
        let n = self.dim();
        let mut out = SVec::zero(n, self.ctx());
        for (i, c) in v.iter() {
            out.add_scaled(&self.antipode[i], c);
        }
        out
    }

    /// Multiply two elements of the tensor square componentwise.
    pub fn mul_tensor_square(&self, x: &SVec, y: &SVec) -> SVec {
        let n = self.dim();
        let mut out = SVec::zero(n * n, self.ctx());
        for (ix, cx) in x.iter() {
            let (a1, a2) = crate::linalg::tensor_unindex(ix, n);
            for (iy, cy) in y.iter() {
                let (b1, b2) = crate::linalg::tensor_unindex(iy, n);
                let left = self.alg.mul_basis(a1, b1);
                let right = self.alg.mul_basis(a2, b2);
                let c = cx.mul(cy);
                for (l, cl) in left.iter() {
                    for (r, cr) in right.iter() {
                        let idx = crate::linalg::tensor_index(l, r, n);
                        let merged = out.get(idx).add(&c.mul(cl).mul(cr));
                        out.set(idx, merged);
                    }
                }
            }
        }
        out
    }

    /// Kernel of the counit as a subspace of the underlying vector space.
    pub fn counit_kernel(&self) -> Subspace {
        let n = self.dim();
        let mut solver = Solver::new(1, n, self.ctx());
        for i in 0..n {
            let mut img = SVec::zero(1, self.ctx());
            img.set(0, self.counit[i].clone());
            solver.feed(img, SVec::unit(n, i, self.ctx()));
        }
        solver.kernel()
    }

    /// Right adjoint coaction h -> h_(2) tensor (S h_(1)) h_(3).
    pub fn adjoint_coaction(&self) -> LinMap {
        let n = self.dim();
        LinMap::from_fn(n, n * n, self.ctx(), |i| {
            // expand to h_(1) x h_(2) x h_(3)
            let d2 = tensor::map_leg(&self.delta[i], &[n, n], 1, n * n, |k| self.delta[k].clone());
            // antipode on the first leg, then multiply legs 1 and 3 into the right slot
            let s1 = tensor::map_leg(&d2, &[n, n, n], 0, n, |k| self.antipode[k].clone());
            // reorder (1,2,3) -> (2,1,3) then fuse legs (1,3) at positions 1,2
            let sw = tensor::swap_legs(&s1, &[n, n, n], 0, 1);
            tensor::map_pair(&sw, &[n, n, n], 1, n, |a, b| self.alg.mul_basis(a, b).clone())
        })
    }

    pub fn describe(&self, v: &SVec) -> String {
        self.alg.describe(v)
    }

    pub fn describe_tensor_square(&self, v: &SVec) -> String {
        let labels = tensor::tensor_labels(self.labels(), self.labels());
        describe_in_basis(v, &labels)
    }
}

/// Functions on a finite set: pointwise product of point evaluations.
pub fn set_algebra(point_labels: &[String], ctx: Ctx) -> FinAlgebra {
    let n = point_labels.len();
    let labels: Vec<String> = point_labels.iter().map(|l| format!("d:{l}")).collect();
    let unit = SVec::from_entries(n, ctx, (0..n).map(|i| (i, Scalar::one(ctx))));
    let mut mult = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            mult.push(if i == j {
                SVec::unit(n, i, ctx)
            } else {
                SVec::zero(n, ctx)
            });
        }
    }
    FinAlgebra::new(ctx, labels, unit, mult).expect("set algebra is valid")
}

/// Functions on a finite group: basis of point evaluations, prefix "d:".
pub fn function_algebra(group: &Group, ctx: Ctx) -> FinHopf {
    let n = group.order();
    let labels: Vec<String> = group.labels().iter().map(|l| format!("d:{l}")).collect();
    let unit = SVec::from_entries(n, ctx, (0..n).map(|i| (i, Scalar::one(ctx))));
    let mut mult = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            mult.push(if i == j {
                SVec::unit(n, i, ctx)
            } else {
                SVec::zero(n, ctx)
            });
        }
    }
    let alg = FinAlgebra::new(ctx, labels, unit, mult).expect("function algebra is valid");
    let delta = (0..n)
        .map(|g| {
            let mut d = SVec::zero(n * n, ctx);
            for a in 0..n {
                for b in 0..n {
                    if group.mul(a, b) == g {
                        d.set(crate::linalg::tensor_index(a, b, n), Scalar::one(ctx));
                    }
                }
            }
            d
        })
        .collect();
    let counit = (0..n)
        .map(|g| {
            if g == group.identity() {
                Scalar::one(ctx)
            } else {
                Scalar::zero(ctx)
            }
        })
        .collect();
    let antipode = (0..n).map(|g| SVec::unit(n, group.inv(g), ctx)).collect();
    FinHopf::new(alg, delta, counit, antipode).expect("function algebra axioms hold")
}

/// Group algebra: group-like basis labelled by the group elements.
pub fn group_algebra(group: &Group, ctx: Ctx) -> FinHopf {
    let n = group.order();
    let labels = group.labels().to_vec();
    let unit = SVec::unit(n, group.identity(), ctx);
    let mut mult = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            mult.push(SVec::unit(n, group.mul(i, j), ctx));
        }
    }
    let alg = FinAlgebra::new(ctx, labels, unit, mult).expect("group algebra is valid");
    let delta = (0..n)
        .map(|g| {
            let mut d = SVec::zero(n * n, ctx);
            d.set(crate::linalg::tensor_index(g, g, n), Scalar::one(ctx));
            d
        })
        .collect();
    let counit = (0..n).map(|_| Scalar::one(ctx)).collect();
    let antipode = (0..n).map(|g| SVec::unit(n, group.inv(g), ctx)).collect();
    FinHopf::new(alg, delta, counit, antipode).expect("group algebra axioms hold")
}

/// Algebra with a right coaction of a Hopf algebra; the coaction is verified
/// to be counital, coassociative and an algebra map.
#[derive(Clone, Debug)]
pub struct ComoduleAlgebra {
    p: FinAlgebra,
    h: FinHopf,
    /// Image of each basis vector of P in P tensor H.
    coaction: Vec<SVec>,
}

impl ComoduleAlgebra {
    pub fn new(
        p: FinAlgebra,
        h: FinHopf,
        coaction: Vec<SVec>,
    ) -> Result<ComoduleAlgebra, HopfError> {
        let np = p.dim();
        let nh = h.dim();
        if coaction.len() != np || coaction.iter().any(|v| v.dim() != np * nh) {
            return Err(HopfError::Algebra("coaction shape mismatch".into()));
        }
        let ca = ComoduleAlgebra { p, h, coaction };
        ca.check()?;
        Ok(ca)
    }

    fn check(&self) -> Result<(), HopfError> {
        let np = self.p.dim();
        let nh = self.h.dim();
        for i in 0..np {
            let c = &self.coaction[i];
            let counited = tensor::contract_leg(c, &[np, nh], 1, |k| self.h.counit(k).clone());
            if counited != SVec::unit(np, i, self.p.ctx()) {
                return Err(axiom_err(
                    "coaction counit law",
                    format!("basis {}", self.p.label(i)),
                ));
            }
            let lhs = tensor::map_leg(c, &[np, nh], 0, np * nh, |k| self.coaction[k].clone());
            let rhs = tensor::map_leg(c, &[np, nh], 1, nh * nh, |k| self.h.delta(k).clone());
            if lhs != rhs {
                return Err(axiom_err(
                    "coaction coassociativity",
                    format!("basis {}", self.p.label(i)),
                ));
            }
        }
        for a in 0..np {
            for b in 0..np {
                let lhs = self.coact_vec(self.p.mul_basis(a, b));
                let rhs = self.mul_tensor(&self.coaction[a], &self.coaction[b]);
                if lhs != rhs {
                    return Err(axiom_err(
                        "coaction is an algebra map",
                        format!("pair ({}, {})", self.p.label(a), self.p.label(b)),
                    ));
                }
            }
        }
        let unit_img = self.coact_vec(self.p.unit());
        if unit_img != tensor::kron(self.p.unit(), self.h.alg().unit()) {
            return Err(axiom_err("coaction is an algebra map", "unit".to_string()));
        }
        Ok(())
    }

    pub fn p(&self) -> &FinAlgebra {
        &self.p
    }

    pub fn h(&self) -> &FinHopf {
        &self.h
    }

    pub fn coaction(&self, i: usize) -> &SVec {
        &self.coaction[i]
    }

    pub fn coact_vec(&self, v: &SVec) -> SVec {
        let np = self.p.dim();
        let nh = self.h.dim();
        let mut out = SVec::zero(np * nh, self.p.ctx());
        for (i, c) in v.iter() {
            out.add_scaled(&self.coaction[i], c);
        }
        out
    }

    /// Product on P tensor H (componentwise).
    pub fn mul_tensor(&self, x: &SVec, y: &SVec) -> SVec {
        let np = self.p.dim();
        let nh = self.h.dim();
        let mut out = SVec::zero(np * nh, self.p.ctx());
        for (ix, cx) in x.iter() {
            let (p1, h1) = crate::linalg::tensor_unindex(ix, nh);
            for (iy, cy) in y.iter() {
                let (p2, h2) = crate::linalg::tensor_unindex(iy, nh);
                let pp = self.p.mul_basis(p1, p2);
                let hh = self.h.alg().mul_basis(h1, h2);
                let c = cx.mul(cy);
                for (l, cl) in pp.iter() {
                    for (r, cr) in hh.iter() {
                        let idx = crate::linalg::tensor_index(l, r, nh);
                        let merged = out.get(idx).add(&c.mul(cl).mul(cr));
                        out.set(idx, merged);
                    }
                }
            }
        }
        out
    }

    /// Coinvariants: kernel of (coaction - id tensor unit), checked to be a
    /// unital subalgebra.
    pub fn invariant_subalgebra(&self) -> Result<Subspace, HopfError> {
        let np = self.p.dim();
        let nh = self.h.dim();
        let map = LinMap::from_fn(np, np * nh, self.p.ctx(), |i| {
            let trivial = tensor::kron(&SVec::unit(np, i, self.p.ctx()), self.h.alg().unit());
            self.coaction[i].sub(&trivial)
        });
        let inv = map.kernel();
        for a in inv.rows() {
            for b in inv.rows() {
                let prod = self.p.mul_vec(a, b);
                if !inv.contains(&prod) {
                    return Err(HopfError::Other(format!(
                        "coinvariants not closed under product at ({}) * ({})",
                        self.p.describe(a),
                        self.p.describe(b)
                    )));
                }
            }
        }
        if !inv.contains(self.p.unit()) {
            return Err(HopfError::Other("coinvariants do not contain 1".into()));
        }
        Ok(inv)
    }
}

/// Convolution product of two linear maps from a Hopf algebra into an algebra.
pub fn convolve(h: &FinHopf, target: &FinAlgebra, f: &LinMap, g: &LinMap) -> LinMap {
    let n = h.dim();
    let m = target.dim();
    assert_eq!(f.source_dim(), n);
    assert_eq!(g.source_dim(), n);
    assert_eq!(f.target_dim(), m);
    assert_eq!(g.target_dim(), m);
    LinMap::from_fn(n, m, h.ctx(), |i| {
        let mut out = SVec::zero(m, h.ctx());
        for (idx, c) in h.delta(i).iter() {
            let (a, b) = crate::linalg::tensor_unindex(idx, n);
            out.add_scaled(&target.mul_vec(f.row(a), g.row(b)), c);
        }
        out
    })
}

/// Unit of the convolution algebra: the counit followed by the target's unit.
pub fn convolution_unit(h: &FinHopf, target: &FinAlgebra) -> LinMap {
    LinMap::from_fn(h.dim(), target.dim(), h.ctx(), |i| {
        target.unit().scale(h.counit(i))
    })
}

/// Convolution inverse of f, found by solving the linear system
/// (g * f) = unit; the two-sided identity is then verified.
pub fn convolution_inverse(h: &FinHopf, target: &FinAlgebra, f: &LinMap) -> Option<LinMap> {
    let n = h.dim();
    let m = target.dim();
    // unknown g as a flat (basis of H) x (basis of A) coordinate block
    let mut solver = Solver::new(n * m, n * m, h.ctx());
    for i in 0..n {
        for k in 0..m {
            // coefficient of the unknown g(e_i) at a_k across all equations
            let mut img = SVec::zero(n * m, h.ctx());
            for hh in 0..n {
                for (idx, c) in h.delta(hh).iter() {
                    let (a, b) = crate::linalg::tensor_unindex(idx, n);
                    if a != i {
                        continue;
                    }
                    let prod = target.mul_vec(&SVec::unit(m, k, h.ctx()), f.row(b));
                    for (t, ct) in prod.iter() {
                        let pos = hh * m + t;
                        let merged = img.get(pos).add(&c.mul(ct));
                        img.set(pos, merged);
                    }
                }
            }
            solver.feed(img, SVec::unit(n * m, i * m + k, h.ctx()));
        }
    }
    let mut rhs = SVec::zero(n * m, h.ctx());
    let e = convolution_unit(h, target);
    for i in 0..n {
        for (t, c) in e.row(i).iter() {
            rhs.set(i * m + t, c.clone());
        }
    }
    let x = solver.solve(&rhs)?;
    let g = LinMap::from_fn(n, m, h.ctx(), |i| {
        let mut row = SVec::zero(m, h.ctx());
        for k in 0..m {
            let c = x.get(i * m + k);
            if !c.is_zero() {
                row.set(k, c);
            }
        }
        row
    });
    if convolve(h, target, &g, f) != e || convolve(h, target, &f, &g) != e {
        return None;
    }
    Some(g)
}

/// Normalized left integral: the functional with values lambda on the basis
/// satisfying lambda(h_(1)) h_(2) = lambda(h) 1 and lambda(1) = 1.
pub fn left_integral(h: &FinHopf) -> Result<SVec, HopfError> {
    let n = h.dim();
    let ctx = h.ctx();
    // equations indexed by (basis element, output coordinate), plus one
    // normalization equation at the end
    let mut solver = Solver::new(n * n + 1, n, ctx);
    for i in 0..n {
        // coefficient of the unknown lambda_i in every equation
        let mut img = SVec::zero(n * n + 1, ctx);
        for m in 0..n {
            // lambda(h_(1)) h_(2) picks the Delta terms with left leg i
            for (idx, c) in h.delta(m).iter() {
                let (a, b) = crate::linalg::tensor_unindex(idx, n);
                if a != i {
                    continue;
                }
                let pos = m * n + b;
                let merged = img.get(pos).add(c);
                img.set(pos, merged);
            }
            // minus lambda(h) 1
            if m == i {
                for (t, c) in h.alg().unit().iter() {
                    let pos = m * n + t;
                    let merged = img.get(pos).sub(c);
                    img.set(pos, merged);
                }
            }
        }
        // normalization: lambda(1) = sum over unit coordinates
        let one_c = h.alg().unit().get(i);
        if !one_c.is_zero() {
            img.set(n * n, one_c);
        }
        solver.feed(img, SVec::unit(n, i, ctx));
    }
    let mut rhs = SVec::zero(n * n + 1, ctx);
    rhs.set(n * n, Scalar::one(ctx));
    solver
        .solve(&rhs)
        .ok_or_else(|| HopfError::Other("no normalized left integral".into()))
}
