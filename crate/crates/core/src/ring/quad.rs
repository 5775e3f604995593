use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde_json::{json, Value};

use super::FieldId;
use crate::error::{Error, Result};
use crate::int::Int;

/// An element a + bω of the ring of integers. The field is carried
/// separately (see [`FieldId`]); only multiplication-like operations need it.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QuadInt {
    pub a: Int,
    pub b: Int,
}

impl QuadInt {
    pub fn new(a: impl Into<Int>, b: impl Into<Int>) -> QuadInt {
        QuadInt { a: a.into(), b: b.into() }
    }

    pub fn from_i64(a: i64) -> QuadInt {
        QuadInt::new(a, 0)
    }

    pub fn from_int(a: Int) -> QuadInt {
        QuadInt { a, b: Int::ZERO }
    }

    pub fn zero() -> QuadInt {
        QuadInt::new(0, 0)
    }

    pub fn one() -> QuadInt {
        QuadInt::new(1, 0)
    }

    pub fn omega() -> QuadInt {
        QuadInt::new(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn scale(&self, k: &Int) -> QuadInt {
        QuadInt { a: &self.a * k, b: &self.b * k }
    }

    /// Lexicographic comparison on (a, b).
    pub fn lex_cmp(&self, other: &QuadInt) -> Ordering {
        self.a.cmp(&other.a).then_with(|| self.b.cmp(&other.b))
    }

    /// Parse `a+bw` style input: "3-2w", "3-2*w", "w", "-w", "5", "1+1w".
    pub fn parse(s: &str) -> Result<QuadInt> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let s = s.as_str();
        if s.is_empty() {
            return Err(Error::Parse("empty ring element".into()));
        }
        let bad = || Error::Parse(format!("malformed ring element {s:?}; expected a+bw"));
        // Split into signed terms.
        let mut terms: Vec<&str> = Vec::new();
        let mut start = 0;
        for (i, c) in s.char_indices() {
            if (c == '+' || c == '-') && i > start {
                terms.push(&s[start..i]);
                start = i;
            }
        }
        terms.push(&s[start..]);
        let mut a = Int::ZERO;
        let mut b = Int::ZERO;
        let (mut seen_a, mut seen_b) = (false, false);
        for t in terms {
            let (neg, body) = match t.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, t.strip_prefix('+').unwrap_or(t)),
            };
            if body.is_empty() {
                return Err(bad());
            }
            let (is_w, coeff) = if let Some(c) = body.strip_suffix('w') {
                (true, c.strip_suffix('*').unwrap_or(c))
            } else {
                (false, body)
            };
            let mut v = if is_w && coeff.is_empty() {
                Int::ONE
            } else {
                if !coeff.chars().all(|c| c.is_ascii_digit()) || coeff.is_empty() {
                    return Err(bad());
                }
                coeff.parse::<Int>().map_err(|_| bad())?
            };
            if neg {
                v = -v;
            }
            if is_w {
                if seen_b {
                    return Err(bad());
                }
                seen_b = true;
                b = v;
            } else {
                if seen_a {
                    return Err(bad());
                }
                seen_a = true;
                a = v;
            }
        }
        Ok(QuadInt { a, b })
    }

    /// Parse the tagged form `Q(sqrt(-1)):3-2*w`.
    pub fn parse_tagged(s: &str) -> Result<(FieldId, QuadInt)> {
        let (tag, body) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("missing field tag in {s:?}")))?;
        let d = tag
            .trim()
            .strip_prefix("Q(sqrt(-")
            .and_then(|r| r.strip_suffix("))"))
            .ok_or_else(|| Error::Parse(format!("malformed field tag {tag:?}")))?
            .parse::<i64>()
            .map_err(|_| Error::Parse(format!("malformed field tag {tag:?}")))?;
        Ok((FieldId::new(d)?, QuadInt::parse(body)?))
    }

    /// Tagged textual form, e.g. `Q(sqrt(-1)):3-2*w`.
    pub fn tagged(&self, f: FieldId) -> String {
        let sign = if self.b.signum() < 0 { '-' } else { '+' };
        format!("{}:{}{}{}*w", f.tag(), self.a, sign, self.b.abs())
    }

    pub fn to_json(&self, f: FieldId) -> Value {
        json!({"d": f.d(), "a": self.a.to_string(), "b": self.b.to_string()})
    }

    pub fn from_json(v: &Value) -> Result<(FieldId, QuadInt)> {
        let bad = || Error::Parse(format!("malformed ring element JSON {v}"));
        let d = v.get("d").and_then(Value::as_i64).ok_or_else(bad)?;
        let get = |k: &str| -> Result<Int> {
            v.get(k).and_then(Value::as_str).ok_or_else(bad)?.parse::<Int>().map_err(|_| bad())
        };
        Ok((FieldId::new(d)?, QuadInt { a: get("a")?, b: get("b")? }))
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.b.signum() < 0 { '-' } else { '+' };
        write!(f, "{}{}{}w", self.a, sign, self.b.abs())
    }
}

impl fmt::Debug for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add<&QuadInt> for &QuadInt {
    type Output = QuadInt;
    fn add(self, rhs: &QuadInt) -> QuadInt {
        QuadInt { a: &self.a + &rhs.a, b: &self.b + &rhs.b }
    }
}

impl Add for QuadInt {
    type Output = QuadInt;
    fn add(self, rhs: QuadInt) -> QuadInt {
        &self + &rhs
    }
}

impl Sub<&QuadInt> for &QuadInt {
    type Output = QuadInt;
    fn sub(self, rhs: &QuadInt) -> QuadInt {
        QuadInt { a: &self.a - &rhs.a, b: &self.b - &rhs.b }
    }
}

impl Sub for QuadInt {
    type Output = QuadInt;
    fn sub(self, rhs: QuadInt) -> QuadInt {
        &self - &rhs
    }
}

impl Neg for &QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        QuadInt { a: -&self.a, b: -&self.b }
    }
}

impl Neg for QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        -&self
    }
}
