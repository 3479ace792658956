//! First-order differential calculi on finite-dimensional algebras: the
//! universal calculus inside the tensor square, quotients by subbimodules,
//! and left-covariant calculi on Hopf algebras cut out by right ideals of the
//! counit kernel.

use crate::hopf::{FinAlgebra, FinHopf, HopfError};
use crate::linalg::{LinMap, SVec, Subspace};
use crate::tensor;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CalculusError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Hopf(#[from] HopfError),
}

/// a * (u tensor v) = au tensor v, inside the tensor square of the algebra.
pub fn left_mult(alg: &FinAlgebra, a: &SVec, w: &SVec) -> SVec {
    let n = alg.dim();
    let t = tensor::kron(a, w);
    tensor::map_pair(&t, &[n, n, n], 0, n, |x, y| alg.mul_basis(x, y).clone())
}

/// (u tensor v) * a = u tensor va.
pub fn right_mult(alg: &FinAlgebra, w: &SVec, a: &SVec) -> SVec {
    let n = alg.dim();
    let t = tensor::kron(w, a);
    tensor::map_pair(&t, &[n, n, n], 1, n, |x, y| alg.mul_basis(x, y).clone())
}

/// Multiplication of the algebra as a linear map out of the tensor square.
pub fn mult_map(alg: &FinAlgebra) -> LinMap {
    let n = alg.dim();
    LinMap::from_fn(n * n, n, alg.ctx(), |idx| {
        let (i, j) = crate::linalg::tensor_unindex(idx, n);
        alg.mul_basis(i, j).clone()
    })
}

/// Universal first-order calculus: the kernel of multiplication with
/// d u = 1 tensor u - u tensor 1.
#[derive(Clone, Debug)]
pub struct UniversalCalculus {
    alg: FinAlgebra,
    omega1: Subspace,
}

impl UniversalCalculus {
    pub fn new(alg: FinAlgebra) -> UniversalCalculus {
        let omega1 = mult_map(&alg).kernel();
        UniversalCalculus { alg, omega1 }
    }

    pub fn alg(&self) -> &FinAlgebra {
        &self.alg
    }

    /// The forms as a subspace of the tensor square.
    pub fn omega1(&self) -> &Subspace {
        &self.omega1
    }

    pub fn d(&self, v: &SVec) -> SVec {
        let n = self.alg.dim();
        let left = tensor::kron(self.alg.unit(), v);
        let right = tensor::kron(v, self.alg.unit());
        debug_assert_eq!(left.dim(), n * n);
        left.sub(&right)
    }

    pub fn left_mult(&self, a: &SVec, w: &SVec) -> SVec {
        left_mult(&self.alg, a, w)
    }

    pub fn right_mult(&self, w: &SVec, a: &SVec) -> SVec {
        right_mult(&self.alg, w, a)
    }
}

/// Quotient of the universal calculus by a subbimodule N. Elements are kept
/// in coordinates of the quotient of the full tensor square by N; the forms
/// are the image of the universal forms in those coordinates.
#[derive(Clone, Debug)]
pub struct QuotientCalculus {
    universal: UniversalCalculus,
    n_sub: Subspace,
    quo: crate::linalg::QuotientSpace,
    forms: Subspace,
}

impl QuotientCalculus {
    /// Verifies that N sits inside the universal forms and is stable under
    /// both module actions, and that products u dv span the quotient forms.
    pub fn new(alg: FinAlgebra, n_sub: Subspace) -> Result<QuotientCalculus, CalculusError> {
        let universal = UniversalCalculus::new(alg);
        let n = universal.alg.dim();
        if n_sub.ambient() != n * n {
            return Err(CalculusError::Invalid(
                "relation space must live in the tensor square".into(),
            ));
        }
        if !universal.omega1.contains_subspace(&n_sub) {
            return Err(CalculusError::Invalid(
                "relation space is not contained in the universal forms".into(),
            ));
        }
        for row in n_sub.rows() {
            for a in 0..n {
                let basis = SVec::unit(n, a, universal.alg.ctx());
                let l = left_mult(&universal.alg, &basis, row);
                if !n_sub.contains(&l) {
                    return Err(CalculusError::Invalid(format!(
                        "relation space is not a left submodule at basis {}",
                        universal.alg.label(a)
                    )));
                }
                let r = right_mult(&universal.alg, row, &basis);
                if !n_sub.contains(&r) {
                    return Err(CalculusError::Invalid(format!(
                        "relation space is not a right submodule at basis {}",
                        universal.alg.label(a)
                    )));
                }
            }
        }
        let quo = n_sub.quotient();
        let mut forms = Subspace::empty(quo.dim(), universal.alg.ctx());
        for row in universal.omega1.rows() {
            forms.insert(quo.project(row));
        }
        let calc = QuotientCalculus {
            universal,
            n_sub,
            quo,
            forms,
        };
        // surjectivity: products u dv span the forms
        let nn = calc.universal.alg.dim();
        let mut span = Subspace::empty(calc.quo.dim(), calc.universal.alg.ctx());
        for u in 0..nn {
            let ub = SVec::unit(nn, u, calc.universal.alg.ctx());
            for v in 0..nn {
                let vb = SVec::unit(nn, v, calc.universal.alg.ctx());
                let w = calc.universal.left_mult(&ub, &calc.universal.d(&vb));
                span.insert(calc.quo.project(&w));
            }
        }
        if span != calc.forms {
            return Err(CalculusError::Invalid(
                "products u dv do not span the quotient forms".into(),
            ));
        }
        Ok(calc)
    }

    pub fn alg(&self) -> &FinAlgebra {
        &self.universal.alg
    }

    pub fn universal(&self) -> &UniversalCalculus {
        &self.universal
    }

    pub fn relations(&self) -> &Subspace {
        &self.n_sub
    }

    /// Coordinates of the ambient quotient (tensor square mod N).
    pub fn quo(&self) -> &crate::linalg::QuotientSpace {
        &self.quo
    }

    /// The forms inside the ambient quotient coordinates.
    pub fn forms(&self) -> &Subspace {
        &self.forms
    }

    pub fn dim(&self) -> usize {
        self.forms.dim()
    }

    pub fn d(&self, v: &SVec) -> SVec {
        self.quo.project(&self.universal.d(v))
    }

    pub fn left_mult(&self, a: &SVec, w: &SVec) -> SVec {
        let ambient = self.quo.section(w);
        self.quo
            .project(&left_mult(&self.universal.alg, a, &ambient))
    }

    pub fn right_mult(&self, w: &SVec, a: &SVec) -> SVec {
        let ambient = self.quo.section(w);
        self.quo
            .project(&right_mult(&self.universal.alg, &ambient, a))
    }
}

/// The bijection g tensor h -> g S(h_(1)) tensor h_(2) of the tensor square
/// of a Hopf algebra.
pub fn theta_map(h: &FinHopf) -> LinMap {
    let n = h.dim();
    LinMap::from_fn(n * n, n * n, h.ctx(), |idx| {
        let (g, k) = crate::linalg::tensor_unindex(idx, n);
        let t = tensor::kron(&SVec::unit(n, g, h.ctx()), h.delta(k));
        let s1 = tensor::map_leg(&t, &[n, n, n], 1, n, |x| h.antipode(x).clone());
        tensor::map_pair(&s1, &[n, n, n], 0, n, |x, y| h.alg().mul_basis(x, y).clone())
    })
}

/// Inverse of theta: u tensor v -> u v_(1) tensor v_(2).
pub fn theta_inv_map(h: &FinHopf) -> LinMap {
    let n = h.dim();
    LinMap::from_fn(n * n, n * n, h.ctx(), |idx| {
        let (u, v) = crate::linalg::tensor_unindex(idx, n);
        let t = tensor::kron(&SVec::unit(n, u, h.ctx()), h.delta(v));
        tensor::map_pair(&t, &[n, n, n], 0, n, |x, y| h.alg().mul_basis(x, y).clone())
    })
}

/// Left-covariant calculus on a Hopf algebra determined by a right ideal of
/// the counit kernel.
#[derive(Clone, Debug)]
pub struct LeftCovariantCalculus {
    hopf: FinHopf,
    q: Subspace,
    calc: QuotientCalculus,
    ker_eps: Subspace,
    inv_quo: crate::linalg::QuotientSpace,
}

impl LeftCovariantCalculus {
    pub fn from_ideal(hopf: &FinHopf, q: Subspace) -> Result<LeftCovariantCalculus, CalculusError> {
        let n = hopf.dim();
        if q.ambient() != n {
            return Err(CalculusError::Invalid("ideal must live in the Hopf algebra".into()));
        }
        let ker_eps = hopf.counit_kernel();
        if !ker_eps.contains_subspace(&q) {
            return Err(CalculusError::Invalid(
                "ideal is not contained in the counit kernel".into(),
            ));
        }
        for row in q.rows() {
            for a in 0..n {
                let prod = hopf.alg().mul_vec(row, &SVec::unit(n, a, hopf.ctx()));
                if !q.contains(&prod) {
                    return Err(CalculusError::Invalid(format!(
                        "not a right ideal: fails under right multiplication by {}",
                        hopf.label(a)
                    )));
                }
            }
        }
        let theta = theta_map(hopf);
        let mut n_rows = Vec::new();
        for g in 0..n {
            let gb = SVec::unit(n, g, hopf.ctx());
            for row in q.rows() {
                n_rows.push(theta.apply(&tensor::kron(&gb, row)));
            }
        }
        let n_sub = Subspace::span(n * n, hopf.ctx(), n_rows);
        // theta is a bijection, so the relation space has dimension |H| dim Q
        if n_sub.dim() != n * q.dim() {
            return Err(CalculusError::Invalid(
                "relation space dimension disagrees with the ideal".into(),
            ));
        }
        let calc = QuotientCalculus::new(hopf.alg().clone(), n_sub)?;
        // express Q inside the counit kernel coordinates
        let pivots = ker_eps.pivots();
        let mut q_in_ker = Subspace::empty(ker_eps.dim(), hopf.ctx());
        for row in q.rows() {
            let mut coords = SVec::zero(ker_eps.dim(), hopf.ctx());
            for (slot, &p) in pivots.iter().enumerate() {
                let c = row.get(p);
                if !c.is_zero() {
                    coords.set(slot, c);
                }
            }
            // reduced-basis coordinates reproduce the row exactly
            let mut check = SVec::zero(n, hopf.ctx());
            for (slot, c) in coords.iter() {
                check.add_scaled(&ker_eps.rows()[slot], c);
            }
            debug_assert_eq!(&check, row);
            q_in_ker.insert(coords);
        }
        let inv_quo = q_in_ker.quotient();
        Ok(LeftCovariantCalculus {
            hopf: hopf.clone(),
            q,
            calc,
            ker_eps,
            inv_quo,
        })
    }

    pub fn hopf(&self) -> &FinHopf {
        &self.hopf
    }

    pub fn ideal(&self) -> &Subspace {
        &self.q
    }

    pub fn calculus(&self) -> &QuotientCalculus {
        &self.calc
    }

    pub fn ker_counit(&self) -> &Subspace {
        &self.ker_eps
    }

    /// Dimension of the space of left-invariant forms.
    pub fn invariant_dim(&self) -> usize {
        self.inv_quo.dim()
    }

    /// Class of an element in the invariant-form space: project to the counit
    /// kernel, then quotient by the ideal.
    pub fn invariant_class(&self, v: &SVec) -> SVec {
        let n = self.hopf.dim();
        let eps = self.hopf.counit_vec(v);
        let mut w = v.clone();
        w.add_scaled(self.hopf.alg().unit(), &eps.neg());
        let mut coords = SVec::zero(self.ker_eps.dim(), self.hopf.ctx());
        for (slot, &p) in self.ker_eps.pivots().iter().enumerate() {
            let c = w.get(p);
            if !c.is_zero() {
                coords.set(slot, c);
            }
        }
        debug_assert!({
            let mut check = SVec::zero(n, self.hopf.ctx());
            for (slot, c) in coords.iter() {
                check.add_scaled(&self.ker_eps.rows()[slot], c);
            }
            check == w
        });
        self.inv_quo.project(&coords)
    }

    /// Maurer-Cartan form: the class of theta(1 tensor v) with the counit
    /// part of v removed, in quotient-calculus coordinates.
    pub fn maurer_cartan(&self, v: &SVec) -> SVec {
        let eps = self.hopf.counit_vec(v);
        let mut w = v.clone();
        w.add_scaled(self.hopf.alg().unit(), &eps.neg());
        let theta = theta_map(&self.hopf);
        let t = theta.apply(&tensor::kron(self.hopf.alg().unit(), &w));
        self.calc.quo().project(&t)
    }

    /// Stability of the ideal under the adjoint coaction, i.e. whether the
    /// calculus is bicovariant: Ad(Q) inside Q tensor H.
    pub fn bicovariance_check(&self) -> Result<(), CalculusError> {
        let n = self.hopf.dim();
        let ad = self.hopf.adjoint_coaction();
        for row in self.q.rows() {
            let img = ad.apply(row);
            for (right_leg, slice) in tensor::slice_by_leg(&img, &[n, n], 1) {
                if !self.q.contains(&slice) {
                    return Err(CalculusError::Invalid(format!(
                        "adjoint coaction leaves the ideal: right leg {} carries {}",
                        self.hopf.label(right_leg),
                        self.hopf.describe(&slice)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Recover the right ideal from a left-covariant relation space: pull back
/// along theta and collect the right-leg slices.
pub fn ideal_from_subbimodule(hopf: &FinHopf, n_sub: &Subspace) -> Subspace {
    let n = hopf.dim();
    let theta_inv = theta_inv_map(hopf);
    let mut q = Subspace::empty(n, hopf.ctx());
    for row in n_sub.rows() {
        let back = theta_inv.apply(row);
        for (_, slice) in tensor::slice_by_leg(&back, &[n, n], 0) {
            q.insert(slice);
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::{function_algebra, group_algebra, Group};
    use crate::scalars::{Ctx, Scalar};

    #[test]
    fn universal_calculus_shape_and_leibniz() {
        let g = Group::cyclic(3);
        let h = function_algebra(&g, Ctx::Q);
        let alg = h.alg().clone();
        let n = alg.dim();
        let uni = UniversalCalculus::new(alg.clone());
        assert_eq!(uni.omega1().dim(), n * n - n);
        // d(1) = 0
        assert!(uni.d(alg.unit()).is_zero());
        for a in 0..n {
            let av = SVec::unit(n, a, Ctx::Q);
            assert!(uni.omega1().contains(&uni.d(&av)));
            for b in 0..n {
                let bv = SVec::unit(n, b, Ctx::Q);
                let dab = uni.d(&alg.mul_vec(&av, &bv));
                let leibniz = uni
                    .left_mult(&av, &uni.d(&bv))
                    .add(&uni.right_mult(&uni.d(&av), &bv));
                assert_eq!(dab, leibniz, "Leibniz at ({a}, {b})");
            }
        }
    }

    #[test]
    fn theta_is_a_bijection() {
        for h in [
            group_algebra(&Group::cyclic(3), Ctx::Q),
            function_algebra(&Group::symmetric_3(), Ctx::Q),
        ] {
            let n = h.dim();
            let t = theta_map(&h);
            let ti = theta_inv_map(&h);
            let round = t.then(&ti);
            assert_eq!(round, LinMap::identity(n * n, h.ctx()));
            let round2 = ti.then(&t);
            assert_eq!(round2, LinMap::identity(n * n, h.ctx()));
        }
    }

    fn standard_cz3_ideal(h: &FinHopf) -> Subspace {
        // span of e + zeta g + zeta^2 g^2 in the group algebra of Z3
        let z = Scalar::zeta(3);
        let v = SVec::from_entries(
            3,
            Ctx::Zeta(3),
            [
                (0, Scalar::one(Ctx::Zeta(3))),
                (1, z.clone()),
                (2, z.mul(&z)),
            ],
        );
        Subspace::span(3, h.ctx(), [v])
    }

    #[test]
    fn cyclic_group_algebra_standard_calculus() {
        let g = Group::cyclic(3);
        let h = group_algebra(&g, Ctx::Zeta(3));
        let q = standard_cz3_ideal(&h);
        let lcc = LeftCovariantCalculus::from_ideal(&h, q.clone()).unwrap();
        assert_eq!(lcc.invariant_dim(), 1);
        assert_eq!(lcc.calculus().dim(), 3);
        assert!(lcc.bicovariance_check().is_ok());
        // the ideal maps to zero in the invariant space
        for row in q.rows() {
            assert!(lcc.invariant_class(row).is_zero());
            assert!(lcc.maurer_cartan(row).is_zero());
        }
        // the relation space returns the ideal
        let q_back = ideal_from_subbimodule(&h, lcc.calculus().relations());
        assert_eq!(q_back, q);
    }

    #[test]
    fn zero_ideal_gives_universal_calculus() {
        let g = Group::cyclic(2);
        let h = group_algebra(&g, Ctx::Q);
        let lcc = LeftCovariantCalculus::from_ideal(&h, Subspace::empty(2, Ctx::Q)).unwrap();
        assert_eq!(lcc.calculus().dim(), 2);
        assert_eq!(lcc.invariant_dim(), 1);
        // maurer-cartan spans the invariant forms
        let mut span = Subspace::empty(lcc.calculus().quo().dim(), Ctx::Q);
        for i in 0..2 {
            span.insert(lcc.maurer_cartan(&SVec::unit(2, i, Ctx::Q)));
        }
        assert_eq!(span.dim(), 1);
    }

    #[test]
    fn non_ideal_is_rejected() {
        let g = Group::cyclic(3);
        let h = group_algebra(&g, Ctx::Q);
        // span{g - e} is in ker eps but (g - e) g = g^2 - g is not in it
        let v = SVec::from_entries(
            3,
            Ctx::Q,
            [(1, Scalar::one(Ctx::Q)), (0, Scalar::one(Ctx::Q).neg())],
        );
        let q = Subspace::span(3, Ctx::Q, [v]);
        assert!(LeftCovariantCalculus::from_ideal(&h, q).is_err());
    }

    #[test]
    fn non_subbimodule_relations_are_rejected() {
        let g = Group::cyclic(3);
        let h = function_algebra(&g, Ctx::Q);
        let alg = h.alg().clone();
        // single basis tensor d_0 x d_1 is in ker mult but not a subbimodule
        // for... actually for a function algebra each d_i x d_j (i != j) IS
        // stable under both actions; take instead a sum that is not closed:
        // d_0 x d_1 + d_1 x d_2, then left action by d_0 picks out d_0 x d_1.
        let w = SVec::from_entries(
            9,
            Ctx::Q,
            [
                (crate::linalg::tensor_index(0, 1, 3), Scalar::one(Ctx::Q)),
                (crate::linalg::tensor_index(1, 2, 3), Scalar::one(Ctx::Q)),
            ],
        );
        let n_sub = Subspace::span(9, Ctx::Q, [w]);
        assert!(QuotientCalculus::new(alg, n_sub).is_err());
    }

    #[test]
    fn quotient_calculus_differential_and_actions() {
        // quotient the universal calculus on functions on Z3 by the relation
        // space spanned by the non-edge tensors of the cycle 0-1-2-0
        let g = Group::cyclic(3);
        let h = function_algebra(&g, Ctx::Q);
        let alg = h.alg().clone();
        // directed edges (i, i+1): keep d_i x d_j for j = i+1 and j = i-1;
        // relations are the tensors d_i x d_j with i = j impossible (not in
        // ker mult)... for |G| = 3 every off-diagonal pair is an edge of the
        // complete graph; quotient by nothing to keep this simple and check
        // d matches the universal one through the projection
        let n_sub = Subspace::empty(9, Ctx::Q);
        let qc = QuotientCalculus::new(alg.clone(), n_sub).unwrap();
        assert_eq!(qc.dim(), 6);
        for i in 0..3 {
            let v = SVec::unit(3, i, Ctx::Q);
            let via_quo = qc.d(&v);
            let direct = qc.quo().project(&qc.universal().d(&v));
            assert_eq!(via_quo, direct);
        }
    }
}
