use std::fmt;

use serde_json::{json, Value};

use super::{FieldId, QuadInt};

/// A 2×2 matrix [[a, b], [c, d]] over O.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: QuadInt,
    pub b: QuadInt,
    pub c: QuadInt,
    pub d: QuadInt,
}

impl Mat2 {
    pub fn new(a: QuadInt, b: QuadInt, c: QuadInt, d: QuadInt) -> Mat2 {
        Mat2 { a, b, c, d }
    }

    /// Matrix with rational integer entries.
    pub fn ints(a: i64, b: i64, c: i64, d: i64) -> Mat2 {
        Mat2::new(QuadInt::from_i64(a), QuadInt::from_i64(b), QuadInt::from_i64(c), QuadInt::from_i64(d))
    }

    pub fn identity() -> Mat2 {
        Mat2::ints(1, 0, 0, 1)
    }

    pub fn s() -> Mat2 {
        Mat2::ints(0, -1, 1, 0)
    }

    pub fn ts() -> Mat2 {
        Mat2::ints(1, -1, 1, 0)
    }

    pub fn entries(&self) -> [&QuadInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn mul(&self, f: FieldId, o: &Mat2) -> Mat2 {
        Mat2 {
            a: &f.mul(&self.a, &o.a) + &f.mul(&self.b, &o.c),
            b: &f.mul(&self.a, &o.b) + &f.mul(&self.b, &o.d),
            c: &f.mul(&self.c, &o.a) + &f.mul(&self.d, &o.c),
            d: &f.mul(&self.c, &o.b) + &f.mul(&self.d, &o.d),
        }
    }

    pub fn pow(&self, f: FieldId, e: u32) -> Mat2 {
        (0..e).fold(Mat2::identity(), |acc, _| acc.mul(f, self))
    }

    pub fn det(&self, f: FieldId) -> QuadInt {
        &f.mul(&self.a, &self.d) - &f.mul(&self.b, &self.c)
    }

    /// adj(M) = det(M)·M⁻¹, the Shimura involution M ↦ M̃.
    pub fn adj(&self) -> Mat2 {
        Mat2 { a: self.d.clone(), b: -&self.b, c: -&self.c, d: self.a.clone() }
    }

    /// Inverse of a matrix whose determinant is a unit.
    pub fn unimodular_inverse(&self, f: FieldId) -> Option<Mat2> {
        let det = self.det(f);
        if !f.is_unit(&det) {
            return None;
        }
        let e = f.unit_inverse(&det);
        let adj = self.adj();
        Some(Mat2 {
            a: f.mul(&e, &adj.a),
            b: f.mul(&e, &adj.b),
            c: f.mul(&e, &adj.c),
            d: f.mul(&e, &adj.d),
        })
    }

    pub fn scale(&self, f: FieldId, s: &QuadInt) -> Mat2 {
        Mat2 { a: f.mul(s, &self.a), b: f.mul(s, &self.b), c: f.mul(s, &self.c), d: f.mul(s, &self.d) }
    }

    pub fn to_json(&self, f: FieldId) -> Value {
        json!([
            [self.a.to_json(f), self.b.to_json(f)],
            [self.c.to_json(f), self.d.to_json(f)]
        ])
    }

    pub fn to_strings(&self) -> [[String; 2]; 2] {
        [[self.a.to_string(), self.b.to_string()], [self.c.to_string(), self.d.to_string()]]
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
