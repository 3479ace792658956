//! Exact coefficient fields: Q, cyclotomic extensions Q(zeta_N), and rational
//! functions Q(q) with q transcendental. All representations are canonical so
//! equality is plain structural comparison.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Mutex;
use thiserror::Error;

pub type Rat = BigRational;

#[derive(Clone, Copy, PartialEq, Eq, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Ctx {
    Q,
    Zeta(u32),
    RatQ,
}

impl fmt::Display for Ctx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ctx::Q => write!(f, "Q"),
            Ctx::Zeta(n) => write!(f, "Q(z{n})"),
            Ctx::RatQ => write!(f, "Q(q)"),
        }
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("mixed scalar contexts {0} and {1} without explicit coercion")]
    ContextMismatch(Ctx, Ctx),
    #[error("no embedding from {0} into {1}")]
    BadCoercion(Ctx, Ctx),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

fn rat_i64(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Dense univariate polynomial over Q, ascending coefficients, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QPoly {
    coeffs: Vec<Rat>,
}

impl QPoly {
    pub fn zero() -> Self {
        QPoly { coeffs: vec![] }
    }

    pub fn constant(c: Rat) -> Self {
        QPoly::from_coeffs(vec![c])
    }

    pub fn one() -> Self {
        QPoly::constant(Rat::one())
    }

    pub fn x() -> Self {
        QPoly::from_coeffs(vec![Rat::zero(), Rat::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree; zero polynomial reports None.
    pub fn deg(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) + other.coeff(k));
        }
        QPoly::from_coeffs(out)
    }

    pub fn sub(&self, other: &QPoly) -> QPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> QPoly {
        QPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        if self.is_zero() || other.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] += a * b;
            }
        }
        QPoly::from_coeffs(out)
    }

    pub fn scale(&self, c: &Rat) -> QPoly {
        if c.is_zero() {
            return QPoly::zero();
        }
        QPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> QPoly {
        let mut base = self.clone();
        let mut acc = QPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Euclidean division; divisor must be nonzero.
    pub fn div_rem(&self, divisor: &QPoly) -> (QPoly, QPoly) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let dd = divisor.deg().unwrap();
        let lead_inv = divisor.leading().unwrap().recip();
        let mut rem = self.coeffs.clone();
        let mut quo = vec![
            Rat::zero();
            self.coeffs.len().saturating_sub(divisor.coeffs.len()) + 1
        ];
        while rem.len() >= divisor.coeffs.len() && !rem.is_empty() {
            let k = rem.len() - 1;
            let c = rem[k].clone() * &lead_inv;
            if !c.is_zero() {
                let shift = k - dd;
                quo[shift] = c.clone();
                for (j, b) in divisor.coeffs.iter().enumerate() {
                    let t = &c * b;
                    rem[shift + j] -= t;
                }
            }
            rem.pop();
        }
        (QPoly::from_coeffs(quo), QPoly::from_coeffs(rem))
    }

    /// Monic gcd via the Euclidean algorithm, remainders kept monic to tame growth.
    pub fn gcd(&self, other: &QPoly) -> QPoly {
        let mut a = self.clone().monic();
        let mut b = other.clone().monic();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        if a.is_zero() {
            QPoly::zero()
        } else {
            a.monic()
        }
    }

    pub fn monic(self) -> QPoly {
        match self.leading() {
            None => self,
            Some(l) if l.is_one() => self,
            Some(l) => {
                let inv = l.recip();
                self.scale(&inv)
            }
        }
    }

    /// Extended gcd: returns (g, s, t) with s*self + t*other = g, g monic.
    pub fn ext_gcd(&self, other: &QPoly) -> (QPoly, QPoly, QPoly) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (QPoly::one(), QPoly::zero());
        let (mut t0, mut t1) = (QPoly::zero(), QPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        match r0.leading() {
            None => (r0, s0, t0),
            Some(l) => {
                let inv = l.recip();
                (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
            }
        }
    }
}

pub fn euler_phi(n: u32) -> u32 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

static PHI_CACHE: Mutex<BTreeMap<u32, Vec<(i64, u32)>>> = Mutex::new(BTreeMap::new());

/// N-th cyclotomic polynomial, computed as (x^N - 1) / prod_{d | N, d < N} Phi_d.
pub fn cyclotomic_poly(n: u32) -> QPoly {
    assert!(n >= 1);
    {
        let cache = PHI_CACHE.lock().unwrap();
        if let Some(c) = cache.get(&n) {
            return QPoly::from_coeffs(c.iter().map(|&(v, _)| rat_i64(v)).collect());
        }
    }
    let mut num = vec![Rat::zero(); n as usize + 1];
    num[0] = -Rat::one();
    num[n as usize] = Rat::one();
    let mut poly = QPoly::from_coeffs(num);
    for d in 1..n {
        if n % d == 0 {
            let (q, r) = poly.div_rem(&cyclotomic_poly(d));
            assert!(r.is_zero(), "cyclotomic division must be exact");
            poly = q;
        }
    }
    let mut cache = PHI_CACHE.lock().unwrap();
    cache.insert(
        n,
        poly.coeffs
            .iter()
            .map(|c| {
                assert!(c.is_integer());
                let v: i64 = c.to_integer().try_into().expect("small cyclotomic coeff");
                (v, 0)
            })
            .collect(),
    );
    poly
}

/// Element of one of the three supported fields, in canonical form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Scalar {
    Rational(Rat),
    /// Coefficient vector of length phi(n) in the power basis of zeta_n mod Phi_n.
    Cyclotomic { n: u32, c: Vec<Rat> },
    /// Reduced fraction with monic denominator.
    RatFunc { num: QPoly, den: QPoly },
}

impl Scalar {
    pub fn ctx(&self) -> Ctx {
        match self {
            Scalar::Rational(_) => Ctx::Q,
            Scalar::Cyclotomic { n, .. } => Ctx::Zeta(*n),
            Scalar::RatFunc { .. } => Ctx::RatQ,
        }
    }

    pub fn zero(ctx: Ctx) -> Scalar {
        Scalar::from_rat(Rat::zero(), ctx)
    }

    pub fn one(ctx: Ctx) -> Scalar {
        Scalar::from_rat(Rat::one(), ctx)
    }

    pub fn from_i64(v: i64, ctx: Ctx) -> Scalar {
        Scalar::from_rat(rat_i64(v), ctx)
    }

    pub fn ratio(n: i64, d: i64, ctx: Ctx) -> Scalar {
        assert!(d != 0);
        Scalar::from_rat(Rat::new(BigInt::from(n), BigInt::from(d)), ctx)
    }

    pub fn from_rat(r: Rat, ctx: Ctx) -> Scalar {
        match ctx {
            Ctx::Q => Scalar::Rational(r),
            Ctx::Zeta(n) => {
                let phi = euler_phi(n) as usize;
                let mut c = vec![Rat::zero(); phi];
                if phi > 0 {
                    c[0] = r;
                }
                Scalar::Cyclotomic { n, c }
            }
            Ctx::RatQ => Scalar::RatFunc {
                num: QPoly::constant(r),
                den: QPoly::one(),
            },
        }
    }

    /// The generator zeta_n of Q(zeta_n).
    pub fn zeta(n: u32) -> Scalar {
        Scalar::zeta_pow(n, 1)
    }

    pub fn zeta_pow(n: u32, k: i64) -> Scalar {
        let phi = euler_phi(n) as usize;
        let kk = k.rem_euclid(n as i64) as usize;
        let mut poly = vec![Rat::zero(); kk + 1];
        poly[kk] = Rat::one();
        let reduced = QPoly::from_coeffs(poly).div_rem(&cyclotomic_poly(n)).1;
        let mut c = vec![Rat::zero(); phi];
        for (i, v) in reduced.coeffs().iter().enumerate() {
            c[i] = v.clone();
        }
        Scalar::Cyclotomic { n, c }
    }

    pub fn q() -> Scalar {
        Scalar::q_pow(1)
    }

    /// q^k for any integer k; negative k produces a monic q-power denominator.
    pub fn q_pow(k: i64) -> Scalar {
        if k >= 0 {
            Scalar::RatFunc {
                num: QPoly::x().pow(k as u32),
                den: QPoly::one(),
            }
        } else {
            Scalar::RatFunc {
                num: QPoly::one(),
                den: QPoly::x().pow((-k) as u32),
            }
        }
    }

    pub fn ratfunc(num: QPoly, den: QPoly) -> Result<Scalar, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar::normalize_ratfunc(num, den))
    }

    fn normalize_ratfunc(num: QPoly, den: QPoly) -> Scalar {
        if num.is_zero() {
            return Scalar::RatFunc {
                num: QPoly::zero(),
                den: QPoly::one(),
            };
        }
        let g = num.gcd(&den);
        let (num, r1) = num.div_rem(&g);
        debug_assert!(r1.is_zero());
        let (den, r2) = den.div_rem(&g);
        debug_assert!(r2.is_zero());
        let lead = den.leading().expect("nonzero denominator").clone();
        let inv = lead.recip();
        Scalar::RatFunc {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Cyclotomic { c, .. } => c.iter().all(|x| x.is_zero()),
            Scalar::RatFunc { num, .. } => num.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        self == &Scalar::one(self.ctx())
    }

    fn require_same_ctx(&self, other: &Scalar) {
        assert!(
            self.ctx() == other.ctx(),
            "mixed scalar contexts {} and {}",
            self.ctx(),
            other.ctx()
        );
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        self.require_same_ctx(other);
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Cyclotomic { n, c: a }, Scalar::Cyclotomic { c: b, .. }) => {
                Scalar::Cyclotomic {
                    n: *n,
                    c: a.iter().zip(b).map(|(x, y)| x + y).collect(),
                }
            }
            (Scalar::RatFunc { num: n1, den: d1 }, Scalar::RatFunc { num: n2, den: d2 }) => {
                let num = n1.mul(d2).add(&n2.mul(d1));
                let den = d1.mul(d2);
                Scalar::normalize_ratfunc(num, den)
            }
            _ => unreachable!(),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Cyclotomic { n, c } => Scalar::Cyclotomic {
                n: *n,
                c: c.iter().map(|x| -x).collect(),
            },
            Scalar::RatFunc { num, den } => Scalar::RatFunc {
                num: num.neg(),
                den: den.clone(),
            },
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        self.require_same_ctx(other);
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Cyclotomic { n, c: a }, Scalar::Cyclotomic { c: b, .. }) => {
                let pa = QPoly::from_coeffs(a.clone());
                let pb = QPoly::from_coeffs(b.clone());
                let red = pa.mul(&pb).div_rem(&cyclotomic_poly(*n)).1;
                let phi = euler_phi(*n) as usize;
                let mut c = vec![Rat::zero(); phi];
                for (i, v) in red.coeffs().iter().enumerate() {
                    c[i] = v.clone();
                }
                Scalar::Cyclotomic { n: *n, c }
            }
            (Scalar::RatFunc { num: n1, den: d1 }, Scalar::RatFunc { num: n2, den: d2 }) => {
                Scalar::normalize_ratfunc(n1.mul(n2), d1.mul(d2))
            }
            _ => unreachable!(),
        }
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(match self {
            Scalar::Rational(a) => Scalar::Rational(a.recip()),
            Scalar::Cyclotomic { n, c } => {
                let p = QPoly::from_coeffs(c.clone());
                let (g, s, _) = p.ext_gcd(&cyclotomic_poly(*n));
                assert!(g.is_one(), "cyclotomic inverse: unit gcd expected");
                let red = s.div_rem(&cyclotomic_poly(*n)).1;
                let phi = euler_phi(*n) as usize;
                let mut cc = vec![Rat::zero(); phi];
                for (i, v) in red.coeffs().iter().enumerate() {
                    cc[i] = v.clone();
                }
                Scalar::Cyclotomic { n: *n, c: cc }
            }
            Scalar::RatFunc { num, den } => Scalar::normalize_ratfunc(den.clone(), num.clone()),
        })
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(self.mul(&other.inv()?))
    }

    /// Integer power; negative exponents require invertibility.
    pub fn pow_i(&self, k: i64) -> Result<Scalar, ScalarError> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Scalar::one(self.ctx());
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        Ok(acc)
    }

    /// Checked binary arithmetic for external callers; internal code uses the
    /// panicking methods because mixed contexts there are programming errors.
    pub fn field_arith(a: &Scalar, b: &Scalar, op: ArithOp) -> Result<Scalar, ScalarError> {
        if a.ctx() != b.ctx() {
            return Err(ScalarError::ContextMismatch(a.ctx(), b.ctx()));
        }
        Ok(match op {
            ArithOp::Add => a.add(b),
            ArithOp::Sub => a.sub(b),
            ArithOp::Mul => a.mul(b),
            ArithOp::Div => a.div(b)?,
        })
    }

    /// Canonical embedding Q -> Q(zeta_N) and Q -> Q(q); everything else is rejected.
    pub fn coerce(&self, target: Ctx) -> Result<Scalar, ScalarError> {
        if self.ctx() == target {
            return Ok(self.clone());
        }
        match self {
            Scalar::Rational(r) => Ok(Scalar::from_rat(r.clone(), target)),
            _ => Err(ScalarError::BadCoercion(self.ctx(), target)),
        }
    }

    /// When the value lies in the prime field, expose it as a rational.
    pub fn as_rational(&self) -> Option<Rat> {
        match self {
            Scalar::Rational(r) => Some(r.clone()),
            Scalar::Cyclotomic { c, .. } => {
                if c.iter().skip(1).all(|x| x.is_zero()) {
                    c.first().cloned().or_else(|| Some(Rat::zero()))
                } else {
                    None
                }
            }
            Scalar::RatFunc { num, den } => {
                if den.is_one() && num.deg().map_or(true, |d| d == 0) {
                    Some(num.coeff(0))
                } else {
                    None
                }
            }
        }
    }

    pub fn serialize(&self) -> String {
        match self {
            Scalar::Rational(r) => rat_to_string(r),
            Scalar::Cyclotomic { n, c } => {
                poly_to_string(&QPoly::from_coeffs(c.clone()), &format!("z{n}"))
            }
            Scalar::RatFunc { num, den } => {
                if den.is_one() {
                    poly_to_string(num, "q")
                } else {
                    format!("({})/({})", poly_to_string(num, "q"), poly_to_string(den, "q"))
                }
            }
        }
    }

    pub fn parse(text: &str, ctx: Ctx) -> Result<Scalar, ScalarError> {
        parse::parse_scalar(text, ctx)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical polynomial rendering: descending powers, no whitespace,
/// coefficient 1 suppressed, e.g. "q^4-2*q+1/2".
fn poly_to_string(p: &QPoly, var: &str) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    let mut first = true;
    for k in (0..p.coeffs().len()).rev() {
        let c = p.coeff(k);
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let mag = c.abs();
        if first {
            if neg {
                out.push('-');
            }
            first = false;
        } else {
            out.push(if neg { '-' } else { '+' });
        }
        let mag_str = rat_to_string(&mag);
        if k == 0 {
            out.push_str(&mag_str);
        } else {
            if !mag.is_one() {
                out.push_str(&mag_str);
                out.push('*');
            }
            out.push_str(var);
            if k > 1 {
                out.push('^');
                out.push_str(&k.to_string());
            }
        }
    }
    out
}

mod parse {
    use super::*;

    #[derive(Debug, Clone, PartialEq)]
    enum Tok {
        Int(BigInt),
        ZGen(u32),
        QGen,
        Plus,
        Minus,
        Star,
        Slash,
        Caret,
        LParen,
        RParen,
    }

    fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ScalarError> {
        let bytes = text.as_bytes();
        let mut out = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let b = bytes[i];
            match b {
                b' ' | b'\t' | b'\n' | b'\r' => i += 1,
                b'+' => {
                    out.push((i, Tok::Plus));
                    i += 1;
                }
                b'-' => {
                    out.push((i, Tok::Minus));
                    i += 1;
                }
                b'*' => {
                    out.push((i, Tok::Star));
                    i += 1;
                }
                b'/' => {
                    out.push((i, Tok::Slash));
                    i += 1;
                }
                b'^' => {
                    out.push((i, Tok::Caret));
                    i += 1;
                }
                b'(' => {
                    out.push((i, Tok::LParen));
                    i += 1;
                }
                b')' => {
                    out.push((i, Tok::RParen));
                    i += 1;
                }
                b'0'..=b'9' => {
                    let start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    let v: BigInt = text[start..i].parse().expect("digits");
                    out.push((start, Tok::Int(v)));
                }
                b'q' => {
                    out.push((i, Tok::QGen));
                    i += 1;
                }
                b'z' => {
                    let start = i;
                    i += 1;
                    let d0 = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    if d0 == i {
                        return Err(ScalarError::Parse {
                            pos: start,
                            msg: "expected digits after 'z'".into(),
                        });
                    }
                    let n: u32 = text[d0..i].parse().map_err(|_| ScalarError::Parse {
                        pos: d0,
                        msg: "cyclotomic index too large".into(),
                    })?;
                    if n == 0 {
                        return Err(ScalarError::Parse {
                            pos: d0,
                            msg: "cyclotomic index must be >= 1".into(),
                        });
                    }
                    out.push((start, Tok::ZGen(n)));
                }
                _ => {
                    return Err(ScalarError::Parse {
                        pos: i,
                        msg: format!("unexpected byte {:?}", b as char),
                    })
                }
            }
        }
        Ok(out)
    }

    struct P<'a> {
        toks: &'a [(usize, Tok)],
        pos: usize,
        ctx: Ctx,
        end: usize,
    }

    impl<'a> P<'a> {
        fn peek(&self) -> Option<&Tok> {
            self.toks.get(self.pos).map(|(_, t)| t)
        }

        fn here(&self) -> usize {
            self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
        }

        fn bump(&mut self) -> Option<Tok> {
            let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
            if t.is_some() {
                self.pos += 1;
            }
            t
        }

        fn err(&self, msg: &str) -> ScalarError {
            ScalarError::Parse {
                pos: self.here(),
                msg: msg.into(),
            }
        }

        fn expr(&mut self) -> Result<Scalar, ScalarError> {
            let mut acc = self.term()?;
            loop {
                match self.peek() {
                    Some(Tok::Plus) => {
                        self.bump();
                        acc = acc.add(&self.term()?);
                    }
                    Some(Tok::Minus) => {
                        self.bump();
                        acc = acc.sub(&self.term()?);
                    }
                    _ => return Ok(acc),
                }
            }
        }

        fn term(&mut self) -> Result<Scalar, ScalarError> {
            let mut negate = false;
            while let Some(Tok::Minus) = self.peek() {
                self.bump();
                negate = !negate;
            }
            let mut acc = self.factor()?;
            loop {
                match self.peek() {
                    Some(Tok::Star) => {
                        self.bump();
                        acc = acc.mul(&self.factor()?);
                    }
                    Some(Tok::Slash) => {
                        self.bump();
                        let rhs = self.factor()?;
                        acc = acc.div(&rhs).map_err(|e| match e {
                            ScalarError::DivisionByZero => self.err("division by zero"),
                            other => other,
                        })?;
                    }
                    _ => break,
                }
            }
            Ok(if negate { acc.neg() } else { acc })
        }

        fn factor(&mut self) -> Result<Scalar, ScalarError> {
            let base = self.atom()?;
            if let Some(Tok::Caret) = self.peek() {
                self.bump();
                match self.bump() {
                    Some(Tok::Int(e)) => {
                        let e: u32 = e.try_into().map_err(|_| self.err("exponent too large"))?;
                        return base.pow_i(e as i64).map_err(|_| self.err("bad power"));
                    }
                    _ => return Err(self.err("expected integer exponent after '^'")),
                }
            }
            Ok(base)
        }

        fn atom(&mut self) -> Result<Scalar, ScalarError> {
            match self.bump() {
                Some(Tok::Int(v)) => Ok(Scalar::from_rat(Rat::from_integer(v), self.ctx)),
                Some(Tok::QGen) => {
                    if self.ctx != Ctx::RatQ {
                        return Err(self.err("'q' only valid in the rational-function context"));
                    }
                    Ok(Scalar::q())
                }
                Some(Tok::ZGen(n)) => match self.ctx {
                    Ctx::Zeta(m) if m == n => Ok(Scalar::zeta(n)),
                    _ => Err(self.err(&format!("'z{n}' not valid in context {}", self.ctx))),
                },
                Some(Tok::LParen) => {
                    let inner = self.expr()?;
                    match self.bump() {
                        Some(Tok::RParen) => Ok(inner),
                        _ => Err(self.err("expected ')'")),
                    }
                }
                _ => Err(self.err("expected a value")),
            }
        }
    }

    pub fn parse_scalar(text: &str, ctx: Ctx) -> Result<Scalar, ScalarError> {
        let toks = lex(text)?;
        let mut p = P {
            toks: &toks,
            pos: 0,
            ctx,
            end: text.len(),
        };
        let v = p.expr()?;
        if p.pos != toks.len() {
            return Err(p.err("trailing input"));
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q_of(s: &str) -> Scalar {
        Scalar::parse(s, Ctx::RatQ).unwrap()
    }

    #[test]
    fn cyclotomic_polynomials_match_hand_table() {
        let table: &[(u32, &[i64])] = &[
            (1, &[-1, 1]),
            (2, &[1, 1]),
            (3, &[1, 1, 1]),
            (4, &[1, 0, 1]),
            (6, &[1, -1, 1]),
            (8, &[1, 0, 0, 0, 1]),
            (12, &[1, 0, -1, 0, 1]),
        ];
        for (n, coeffs) in table {
            let want = QPoly::from_coeffs(coeffs.iter().map(|&v| rat_i64(v)).collect());
            assert_eq!(cyclotomic_poly(*n), want, "Phi_{n}");
        }
    }

    #[test]
    fn rational_arithmetic() {
        let a = Scalar::ratio(1, 2, Ctx::Q);
        let b = Scalar::ratio(1, 3, Ctx::Q);
        assert_eq!(a.add(&b), Scalar::ratio(5, 6, Ctx::Q));
        assert_eq!(a.mul(&b), Scalar::ratio(1, 6, Ctx::Q));
        assert_eq!(a.div(&b).unwrap(), Scalar::ratio(3, 2, Ctx::Q));
    }

    #[test]
    fn zeta_relations() {
        for n in [2u32, 3, 4, 5, 6, 8, 12] {
            let one = Scalar::one(Ctx::Zeta(n));
            assert_eq!(Scalar::zeta(n).pow_i(n as i64).unwrap(), one, "zeta_{n}^{n}");
            let mut sum = Scalar::zero(Ctx::Zeta(n));
            for k in 0..n {
                sum = sum.add(&Scalar::zeta_pow(n, k as i64));
            }
            assert!(sum.is_zero(), "sum of all zeta_{n} powers");
        }
        // 1 + z3 + z3^2 = 0 straight from the parser.
        let v = Scalar::parse("z3^2+z3+1", Ctx::Zeta(3)).unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn cyclotomic_inverse() {
        for n in [3u32, 4, 5, 8, 12] {
            let z = Scalar::zeta(n);
            let w = z.add(&Scalar::from_i64(2, Ctx::Zeta(n)));
            let winv = w.inv().unwrap();
            assert!(w.mul(&winv).is_one());
        }
    }

    #[test]
    fn ratfunc_cancellation() {
        // (q^2 - 1)/(q - 1) = q + 1
        let v = q_of("(q^2-1)/(q-1)");
        assert_eq!(v, q_of("q+1"));
        // monic denominator: (q^4+1)/(2*q^2) has denominator q^2 after normalization
        let w = q_of("(q^4+1)/(2*q^2)");
        match &w {
            Scalar::RatFunc { den, .. } => {
                assert_eq!(den, &QPoly::x().pow(2));
            }
            _ => panic!("wrong variant"),
        }
        assert_eq!(w.serialize(), "(1/2*q^4+1/2)/(q^2)");
    }

    #[test]
    fn q_pow_negative() {
        let v = Scalar::q_pow(-2);
        assert_eq!(v.serialize(), "(1)/(q^2)");
        assert!(v.mul(&Scalar::q_pow(2)).is_one());
    }

    #[test]
    fn serialize_round_trips() {
        let cases = [
            ("0", Ctx::Q),
            ("-3/4", Ctx::Q),
            ("17", Ctx::Q),
            ("z3", Ctx::Zeta(3)),
            ("-z8^3+1/2*z8-2", Ctx::Zeta(8)),
            ("q", Ctx::RatQ),
            ("q^4-2*q+1/2", Ctx::RatQ),
            ("(q^2+1)/(q^3)", Ctx::RatQ),
        ];
        for (text, ctx) in cases {
            let v = Scalar::parse(text, ctx).unwrap();
            assert_eq!(v.serialize(), text, "canonical form of {text}");
            let again = Scalar::parse(&v.serialize(), ctx).unwrap();
            assert_eq!(again, v);
        }
    }

    #[test]
    fn parse_rejects_wrong_context() {
        assert!(Scalar::parse("q", Ctx::Q).is_err());
        assert!(Scalar::parse("z3", Ctx::RatQ).is_err());
        assert!(Scalar::parse("z3", Ctx::Zeta(4)).is_err());
        assert!(Scalar::parse("1/0", Ctx::Q).is_err());
        assert!(Scalar::parse("zx", Ctx::Zeta(3)).is_err());
    }

    #[test]
    fn coercion_rules() {
        let r = Scalar::ratio(2, 3, Ctx::Q);
        let up = r.coerce(Ctx::Zeta(8)).unwrap();
        assert_eq!(up.ctx(), Ctx::Zeta(8));
        assert_eq!(up.as_rational().unwrap(), Rat::new(2.into(), 3.into()));
        let five = Scalar::from_i64(5, Ctx::Q).coerce(Ctx::RatQ).unwrap();
        assert_eq!(five.serialize(), "5");
        assert!(Scalar::zeta(3).coerce(Ctx::RatQ).is_err());
        assert_eq!(
            Scalar::field_arith(&r, &Scalar::q(), ArithOp::Add),
            Err(ScalarError::ContextMismatch(Ctx::Q, Ctx::RatQ))
        );
    }
}
