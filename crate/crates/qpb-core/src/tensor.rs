//! Leg-wise operations on sparse vectors living in tensor products of based
//! spaces. Indexing is row-major throughout: the leftmost factor varies
//! slowest, so adjacent legs can be fused or split without data movement.

use crate::linalg::SVec;
use crate::scalars::Scalar;

/// Decompose a flat basis index into per-leg indices.
pub fn unindex(idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    let mut rest = idx;
    for (k, &d) in dims.iter().enumerate().rev() {
        out[k] = rest % d;
        rest /= d;
    }
    debug_assert_eq!(rest, 0);
    out
}

/// Flatten per-leg indices into one basis index.
pub fn index(indices: &[usize], dims: &[usize]) -> usize {
    debug_assert_eq!(indices.len(), dims.len());
    let mut out = 0;
    for (&i, &d) in indices.iter().zip(dims) {
        debug_assert!(i < d);
        out = out * d + i;
    }
    out
}

pub fn total_dim(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// Apply a basis-indexed linear map to one leg. `f(i)` is the image of the
/// i-th basis vector of that leg, a sparse vector of dimension `out_dim`
/// (which may itself be a fused pair of legs). Returns the new leg layout
/// alongside the mapped vector.
pub fn map_leg(
    v: &SVec,
    dims: &[usize],
    leg: usize,
    out_dim: usize,
    f: impl Fn(usize) -> SVec,
) -> SVec {
    let mut out_dims: Vec<usize> = dims.to_vec();
    out_dims[leg] = out_dim;
    let mut out = SVec::zero(total_dim(&out_dims), v.ctx());
    for (idx, c) in v.iter() {
        let mut parts = unindex(idx, dims);
        let img = f(parts[leg]);
        debug_assert_eq!(img.dim(), out_dim);
        for (j, w) in img.iter() {
            parts[leg] = j;
            let flat = index(&parts, &out_dims);
            let merged = out.get(flat).add(&w.mul(c));
            out.set(flat, merged);
        }
    }
    out
}

/// Apply a map defined on an adjacent pair of legs (leg, leg+1); `f(i, j)` is
/// the image of the pair, a sparse vector of dimension `out_dim` which
/// replaces both legs as a single leg.
pub fn map_pair(
    v: &SVec,
    dims: &[usize],
    leg: usize,
    out_dim: usize,
    f: impl Fn(usize, usize) -> SVec,
) -> SVec {
    assert!(leg + 1 < dims.len());
    let mut out_dims: Vec<usize> = dims.to_vec();
    out_dims[leg] = out_dim;
    out_dims.remove(leg + 1);
    let mut out = SVec::zero(total_dim(&out_dims), v.ctx());
    for (idx, c) in v.iter() {
        let parts = unindex(idx, dims);
        let img = f(parts[leg], parts[leg + 1]);
        debug_assert_eq!(img.dim(), out_dim);
        let mut out_parts: Vec<usize> = parts.clone();
        out_parts.remove(leg + 1);
        for (j, w) in img.iter() {
            out_parts[leg] = j;
            let flat = index(&out_parts, &out_dims);
            let merged = out.get(flat).add(&w.mul(c));
            out.set(flat, merged);
        }
    }
    out
}

/// Swap two legs of a tensor.
pub fn swap_legs(v: &SVec, dims: &[usize], a: usize, b: usize) -> SVec {
    let mut out_dims: Vec<usize> = dims.to_vec();
    out_dims.swap(a, b);
    let mut out = SVec::zero(total_dim(&out_dims), v.ctx());
    for (idx, c) in v.iter() {
        let mut parts = unindex(idx, dims);
        parts.swap(a, b);
        out.set(index(&parts, &out_dims), c.clone());
    }
    out
}

/// Scale-free contraction of one leg against a functional: `f(i)` is the
/// scalar the functional takes on the i-th basis vector of that leg.
pub fn contract_leg(v: &SVec, dims: &[usize], leg: usize, f: impl Fn(usize) -> Scalar) -> SVec {
    let mut out_dims: Vec<usize> = dims.to_vec();
    out_dims.remove(leg);
    let mut out = SVec::zero(total_dim(&out_dims), v.ctx());
    for (idx, c) in v.iter() {
        let mut parts = unindex(idx, dims);
        let s = f(parts[leg]);
        if s.is_zero() {
            continue;
        }
        parts.remove(leg);
        let flat = index(&parts, &out_dims);
        let merged = out.get(flat).add(&s.mul(c));
        out.set(flat, merged);
    }
    out
}

/// Split a tensor along one leg: returns, per leg-basis index, the sparse
/// vector over the remaining legs that multiplies it.
pub fn slice_by_leg(
    v: &SVec,
    dims: &[usize],
    leg: usize,
) -> std::collections::BTreeMap<usize, SVec> {
    let mut out_dims: Vec<usize> = dims.to_vec();
    out_dims.remove(leg);
    let rest_dim = total_dim(&out_dims);
    let mut out: std::collections::BTreeMap<usize, SVec> = std::collections::BTreeMap::new();
    for (idx, c) in v.iter() {
        let mut parts = unindex(idx, dims);
        let key = parts[leg];
        parts.remove(leg);
        let flat = index(&parts, &out_dims);
        out.entry(key)
            .or_insert_with(|| SVec::zero(rest_dim, v.ctx()))
            .set(flat, c.clone());
    }
    out
}

/// Tensor product of two sparse vectors, left factor slowest.
pub fn kron(a: &SVec, b: &SVec) -> SVec {
    let mut out = SVec::zero(a.dim() * b.dim(), a.ctx());
    for (i, c) in a.iter() {
        for (j, d) in b.iter() {
            out.set(i * b.dim() + j, c.mul(d));
        }
    }
    out
}

/// Labels of a tensor basis, joined leg-wise with the tensor glyph.
pub fn tensor_labels(left: &[String], right: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(left.len() * right.len());
    for l in left {
        for r in right {
            out.push(format!("{l}\u{2297}{r}"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{Ctx, Scalar};

    fn s(v: i64) -> Scalar {
        Scalar::from_i64(v, Ctx::Q)
    }

    #[test]
    fn index_round_trip() {
        let dims = [2, 3, 4];
        for idx in 0..24 {
            assert_eq!(index(&unindex(idx, &dims), &dims), idx);
        }
        assert_eq!(unindex(23, &dims), vec![1, 2, 3]);
    }

    #[test]
    fn map_leg_on_middle() {
        // dims (2, 2): map right leg j -> e_j + e_{1-j} in dim 2
        let v = SVec::from_entries(4, Ctx::Q, [(0, s(1)), (3, s(2))]);
        let out = map_leg(&v, &[2, 2], 1, 2, |j| {
            SVec::from_entries(2, Ctx::Q, [(j, s(1)), (1 - j, s(1))])
        });
        // e0x(e0+e1) + 2 e1x(e1+e0) = (1,1,2,2)
        assert_eq!(out.get(0), s(1));
        assert_eq!(out.get(1), s(1));
        assert_eq!(out.get(2), s(2));
        assert_eq!(out.get(3), s(2));
    }

    #[test]
    fn map_pair_multiplies_out() {
        // fuse two dim-2 legs by "multiplication" e_i e_j = e_{i xor j}
        let v = SVec::from_entries(4, Ctx::Q, [(1, s(1)), (2, s(1)), (3, s(5))]);
        let out = map_pair(&v, &[2, 2], 0, 2, |i, j| SVec::unit(2, i ^ j, Ctx::Q));
        assert_eq!(out.get(0), s(5));
        assert_eq!(out.get(1), s(2));
    }

    #[test]
    fn swap_and_kron() {
        let a = SVec::from_entries(2, Ctx::Q, [(0, s(1)), (1, s(2))]);
        let b = SVec::from_entries(3, Ctx::Q, [(2, s(3))]);
        let t = kron(&a, &b);
        assert_eq!(t.get(2), s(3));
        assert_eq!(t.get(5), s(6));
        let sw = swap_legs(&t, &[2, 3], 0, 1);
        assert_eq!(sw, kron(&b, &a));
    }

    #[test]
    fn contract_against_functional() {
        let v = SVec::from_entries(6, Ctx::Q, [(0, s(1)), (4, s(2))]);
        // legs (2, 3); contract right leg against f(j) = j
        let out = contract_leg(&v, &[2, 3], 1, |j| s(j as i64));
        assert_eq!(out.dim(), 2);
        assert!(out.get(0).is_zero());
        assert_eq!(out.get(1), s(2));
    }
}
