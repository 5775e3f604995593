use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use crate::int::Int;
use crate::ring::{FieldId, QuadInt};

/// Exact field elements used as matrix coefficients.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; panics on zero.
    fn inv(&self) -> Self;
    fn from_int(i: &Int) -> Self;
    /// Embed a ring element, if it lies in this coefficient field.
    fn from_quad(f: FieldId, x: &QuadInt) -> Option<Self>;
    fn to_rational(&self) -> Option<BigRational>;

    fn from_i64(v: i64) -> Self {
        Self::from_int(&Int::from(v))
    }
    fn is_one(&self) -> bool {
        *self == Self::one()
    }
    fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv())
    }
}

pub type Q = BigRational;

pub fn rational(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int_to_rational(i: &Int) -> Q {
    BigRational::from_integer(i.to_bigint())
}

impl Scalar for BigRational {
    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        assert!(!num_traits::Zero::is_zero(self), "inverse of zero");
        self.recip()
    }
    fn from_int(i: &Int) -> Self {
        int_to_rational(i)
    }
    fn from_quad(_: FieldId, x: &QuadInt) -> Option<Self> {
        x.b.is_zero().then(|| int_to_rational(&x.a))
    }
    fn to_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }
    fn is_one(&self) -> bool {
        num_traits::One::is_one(self)
    }
}

/// An element a + bω of K = Q(√−d) with rational coordinates.
///
/// Elements with b = 0 are field-agnostic (they are produced by `zero`,
/// `one` and `from_int`); any element with b ≠ 0 carries its field.
#[derive(Clone)]
pub struct QuadRat {
    d: i64,
    pub a: Q,
    pub b: Q,
}

impl QuadRat {
    pub fn new(f: FieldId, a: Q, b: Q) -> QuadRat {
        QuadRat { d: f.d(), a, b }
    }

    pub fn field(&self) -> Option<FieldId> {
        FieldId::new(self.d).ok()
    }

    fn common_field(&self, o: &QuadRat) -> i64 {
        match (self.d, o.d) {
            (0, d) | (d, 0) => d,
            (d1, d2) => {
                assert_eq!(d1, d2, "mixing elements of different fields");
                d1
            }
        }
    }

    pub fn conj(&self) -> QuadRat {
        let Some(f) = self.field() else { return self.clone() };
        let t = Q::from_integer(f.omega_trace().into());
        QuadRat { d: self.d, a: &self.a + &(&self.b * &t), b: -&self.b }
    }

    pub fn norm(&self) -> Q {
        let Some(f) = self.field() else { return &self.a * &self.a };
        let t = Q::from_integer(f.omega_trace().into());
        let m = Q::from_integer(f.omega_norm().into());
        &(&self.a * &self.a) + &(&(&t * &self.a) * &self.b) + &(&m * &(&self.b * &self.b))
    }

    pub fn to_complex(&self) -> (f64, f64) {
        use num_traits::ToPrimitive;
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        match self.field() {
            Some(f) => {
                let (wr, wi) = f.omega_complex();
                (a + b * wr, b * wi)
            }
            None => (a, 0.0),
        }
    }
}

impl PartialEq for QuadRat {
    fn eq(&self, o: &QuadRat) -> bool {
        self.a == o.a && self.b == o.b && (self.b.is_zero() || self.d == o.d)
    }
}

impl fmt::Display for QuadRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            let sign = if self.b.is_negative() { '-' } else { '+' };
            write!(f, "{}{}({})w", self.a, sign, self.b.abs())
        }
    }
}

impl fmt::Debug for QuadRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Scalar for QuadRat {
    fn zero() -> Self {
        QuadRat { d: 0, a: Q::zero(), b: Q::zero() }
    }
    fn one() -> Self {
        QuadRat { d: 0, a: Q::one(), b: Q::zero() }
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        QuadRat { d: self.common_field(o), a: &self.a + &o.a, b: &self.b + &o.b }
    }
    fn sub(&self, o: &Self) -> Self {
        QuadRat { d: self.common_field(o), a: &self.a - &o.a, b: &self.b - &o.b }
    }
    fn mul(&self, o: &Self) -> Self {
        let d = self.common_field(o);
        if self.b.is_zero() || o.b.is_zero() {
            return QuadRat { d, a: &self.a * &o.a, b: &(&self.a * &o.b) + &(&self.b * &o.a) };
        }
        let f = FieldId::new(d).expect("element with ω-part carries a field");
        let t = Q::from_integer(f.omega_trace().into());
        let m = Q::from_integer(f.omega_norm().into());
        let bb = &self.b * &o.b;
        QuadRat {
            d,
            a: &(&self.a * &o.a) - &(&m * &bb),
            b: &(&(&self.a * &o.b) + &(&self.b * &o.a)) + &(&t * &bb),
        }
    }
    fn neg(&self) -> Self {
        QuadRat { d: self.d, a: -&self.a, b: -&self.b }
    }
    fn inv(&self) -> Self {
        let n = self.norm();
        assert!(!n.is_zero(), "inverse of zero");
        let c = self.conj();
        QuadRat { d: self.d, a: &c.a / &n, b: &c.b / &n }
    }
    fn from_int(i: &Int) -> Self {
        QuadRat { d: 0, a: int_to_rational(i), b: Q::zero() }
    }
    fn from_quad(f: FieldId, x: &QuadInt) -> Option<Self> {
        let d = if x.b.is_zero() { 0 } else { f.d() };
        Some(QuadRat { d, a: int_to_rational(&x.a), b: int_to_rational(&x.b) })
    }
    fn to_rational(&self) -> Option<BigRational> {
        self.b.is_zero().then(|| self.a.clone())
    }
}
