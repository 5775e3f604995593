use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::QuadInt;
use crate::error::{Error, Result};

/// Which integral basis generator the field uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OmegaKind {
    /// ω = √−d
    SqrtMinusD,
    /// ω = (1 + √−d)/2
    HalfIntegral,
}

/// One of the five norm-Euclidean imaginary quadratic fields Q(√−d).
///
/// Elements are written a + bω with ω² = tω − m, where t = Tr(ω) and
/// m = N(ω).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct FieldId {
    d: i64,
}

pub const EUCLIDEAN_D: [i64; 5] = [1, 2, 3, 7, 11];

impl FieldId {
    pub fn new(d: i64) -> Result<FieldId> {
        if EUCLIDEAN_D.contains(&d) {
            Ok(FieldId { d })
        } else {
            Err(Error::Precondition(format!(
                "d = {d} is not one of the Euclidean values 1, 2, 3, 7, 11"
            )))
        }
    }

    pub fn all() -> Vec<FieldId> {
        EUCLIDEAN_D.iter().map(|&d| FieldId { d }).collect()
    }

    pub fn d(self) -> i64 {
        self.d
    }

    pub fn omega_kind(self) -> OmegaKind {
        if self.d % 4 == 3 {
            OmegaKind::HalfIntegral
        } else {
            OmegaKind::SqrtMinusD
        }
    }

    /// The field discriminant d_K.
    pub fn disc(self) -> i64 {
        match self.omega_kind() {
            OmegaKind::HalfIntegral => -self.d,
            OmegaKind::SqrtMinusD => -4 * self.d,
        }
    }

    /// Trace of ω.
    pub fn omega_trace(self) -> i64 {
        match self.omega_kind() {
            OmegaKind::HalfIntegral => 1,
            OmegaKind::SqrtMinusD => 0,
        }
    }

    /// Norm of ω.
    pub fn omega_norm(self) -> i64 {
        match self.omega_kind() {
            OmegaKind::HalfIntegral => (1 + self.d) / 4,
            OmegaKind::SqrtMinusD => self.d,
        }
    }

    /// ω as a complex number (real, imaginary).
    pub fn omega_complex(self) -> (f64, f64) {
        let t = self.omega_trace() as f64;
        let m = self.omega_norm() as f64;
        (t / 2.0, (4.0 * m - t * t).sqrt() / 2.0)
    }

    /// The Euclidean contraction constant ε_d.
    pub fn epsilon(self) -> BigRational {
        let d = BigInt::from(self.d);
        match self.omega_kind() {
            OmegaKind::HalfIntegral => {
                let one_d = BigInt::from(1 + self.d);
                BigRational::new(&one_d * &one_d, BigInt::from(16) * d)
            }
            OmegaKind::SqrtMinusD => BigRational::new(BigInt::from(1 + self.d), BigInt::from(4)),
        }
    }

    /// The unit group, listed as powers of the torsion generator.
    pub fn units(self) -> Vec<QuadInt> {
        let gen = self.unit_generator();
        let mut out = vec![QuadInt::one()];
        let mut cur = gen.clone();
        while !cur.is_one() {
            out.push(cur.clone());
            cur = self.mul(&cur, &gen);
        }
        out
    }

    /// Generator of the unit group: i for d = 1, ω (a primitive sixth root
    /// of unity) for d = 3, and −1 otherwise.
    pub fn unit_generator(self) -> QuadInt {
        match self.d {
            1 | 3 => QuadInt::omega(),
            _ => QuadInt::from_i64(-1),
        }
    }

    pub fn num_units(self) -> usize {
        match self.d {
            1 => 4,
            3 => 6,
            _ => 2,
        }
    }

    /// Human-readable tag, e.g. `Q(sqrt(-1))`.
    pub fn tag(self) -> String {
        format!("Q(sqrt(-{}))", self.d)
    }
}

impl TryFrom<i64> for FieldId {
    type Error = Error;
    fn try_from(d: i64) -> Result<FieldId> {
        FieldId::new(d)
    }
}

impl From<FieldId> for i64 {
    fn from(f: FieldId) -> i64 {
        f.d
    }
}

impl fmt::Display for FieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}
