use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ring::{FieldId, Mat2, QuadInt};

/// A point of P¹(K) as a coprime pair num/den; ∞ is 1/0. Denominators are
/// canonical associates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cusp {
    pub num: QuadInt,
    pub den: QuadInt,
}

impl Cusp {
    pub fn infinity() -> Cusp {
        Cusp { num: QuadInt::one(), den: QuadInt::zero() }
    }

    pub fn zero() -> Cusp {
        Cusp { num: QuadInt::zero(), den: QuadInt::one() }
    }

    pub fn integer(a: QuadInt) -> Cusp {
        Cusp { num: a, den: QuadInt::one() }
    }

    pub fn new(f: FieldId, num: &QuadInt, den: &QuadInt) -> Result<Cusp> {
        if num.is_zero() && den.is_zero() {
            return Err(Error::Precondition("0/0 is not a cusp".into()));
        }
        if den.is_zero() {
            return Ok(Cusp::infinity());
        }
        let g = f.gcd(num, den)?;
        let n = f.div_exact(num, &g).expect("gcd divides");
        let d = f.div_exact(den, &g).expect("gcd divides");
        let (d0, u) = f.canonical_associate(&d);
        let n0 = f.mul(&n, &f.unit_inverse(&u));
        Ok(Cusp { num: n0, den: d0 })
    }

    pub fn is_infinity(&self) -> bool {
        self.den.is_zero()
    }

    /// g·(num/den) for an integral matrix g.
    pub fn act(&self, f: FieldId, g: &Mat2) -> Result<Cusp> {
        let n = &f.mul(&g.a, &self.num) + &f.mul(&g.b, &self.den);
        let d = &f.mul(&g.c, &self.num) + &f.mul(&g.d, &self.den);
        Cusp::new(f, &n, &d)
    }

    /// Parses "oo", "a+bw" or "a+bw/c+dw".
    pub fn parse(f: FieldId, s: &str) -> Result<Cusp> {
        let s = s.trim();
        if s == "oo" || s == "inf" || s == "∞" {
            return Ok(Cusp::infinity());
        }
        match s.split_once('/') {
            Some((a, b)) => Cusp::new(f, &QuadInt::parse(a)?, &QuadInt::parse(b)?),
            None => Cusp::new(f, &QuadInt::parse(s)?, &QuadInt::one()),
        }
    }

    pub fn to_json(&self, f: FieldId) -> Value {
        json!({"num": self.num.to_json(f), "den": self.den.to_json(f)})
    }

    pub fn to_complex(&self, f: FieldId) -> Option<(f64, f64)> {
        if self.is_infinity() {
            return None;
        }
        let (a, b) = f.to_complex(&self.num);
        let (c, d) = f.to_complex(&self.den);
        let n = c * c + d * d;
        Some(((a * c + b * d) / n, (b * c - a * d) / n))
    }
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinity() {
            f.write_str("oo")
        } else if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// The matrix h with h·0 = from and h·∞ = to; its determinant is a unit
/// exactly when the two cusps are adjacent.
pub fn edge_matrix(from: &Cusp, to: &Cusp) -> Mat2 {
    Mat2::new(to.num.clone(), from.num.clone(), to.den.clone(), from.den.clone())
}
