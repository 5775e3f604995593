//! Ring operations that depend on the field: multiplication, norms,
//! Euclidean division, gcds, associates and divisor enumeration.

use std::cmp::Ordering;

use super::{FieldId, QuadInt};
use crate::error::{Error, Result};
use crate::int::Int;

/// How `residues_below` picks representatives. Both conventions give a
/// complete residue system of small norm; they differ as sets, which is used
/// to check that downstream results do not depend on the choice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum ResidueConvention {
    #[default]
    Canonical,
    /// Negated canonical residues.
    Alternate,
}

impl FieldId {
    pub fn mul(self, x: &QuadInt, y: &QuadInt) -> QuadInt {
        // (a + bω)(c + eω) = ac − m·be + (ae + bc + t·be)ω
        let be = &x.b * &y.b;
        let a = &(&x.a * &y.a) - &be.clone().mul_small(self.omega_norm());
        let mut b = &(&x.a * &y.b) + &(&x.b * &y.a);
        if self.omega_trace() != 0 {
            b = &b + &be;
        }
        QuadInt { a, b }
    }

    pub fn sqr(self, x: &QuadInt) -> QuadInt {
        self.mul(x, x)
    }

    pub fn pow(self, x: &QuadInt, e: u32) -> QuadInt {
        let mut acc = QuadInt::one();
        for _ in 0..e {
            acc = self.mul(&acc, x);
        }
        acc
    }

    pub fn conj(self, x: &QuadInt) -> QuadInt {
        // conj(ω) = t − ω
        let a = if self.omega_trace() != 0 { &x.a + &x.b } else { x.a.clone() };
        QuadInt { a, b: -&x.b }
    }

    pub fn norm(self, x: &QuadInt) -> Int {
        let mut n = &(&x.a * &x.a) + &(&x.b * &x.b).mul_small(self.omega_norm());
        if self.omega_trace() != 0 {
            n = &n + &(&x.a * &x.b);
        }
        n
    }

    /// Complex embedding (real, imaginary) as floats.
    pub fn to_complex(self, x: &QuadInt) -> (f64, f64) {
        let (wr, wi) = self.omega_complex();
        let (a, b) = (x.a.to_f64(), x.b.to_f64());
        (a + b * wr, b * wi)
    }

    /// x / y when y divides x exactly.
    pub fn div_exact(self, x: &QuadInt, y: &QuadInt) -> Option<QuadInt> {
        if y.is_zero() {
            return None;
        }
        let n = self.norm(y);
        let p = self.mul(x, &self.conj(y));
        if n.divides(&p.a) && n.divides(&p.b) {
            Some(QuadInt { a: p.a.div_exact(&n), b: p.b.div_exact(&n) })
        } else {
            None
        }
    }

    pub fn divides(self, y: &QuadInt, x: &QuadInt) -> bool {
        if y.is_zero() {
            return x.is_zero();
        }
        self.div_exact(x, y).is_some()
    }

    pub fn is_unit(self, x: &QuadInt) -> bool {
        self.norm(x).is_one()
    }

    pub fn unit_inverse(self, u: &QuadInt) -> QuadInt {
        self.units()
            .into_iter()
            .find(|v| self.mul(u, v).is_one())
            .expect("unit_inverse called on a non-unit")
    }

    /// Euclidean division a = q·b + r. The quotient is the lattice point
    /// nearest to a/b; among equally near points the lexicographically
    /// smallest (q_a, q_b) wins. The nearest point is always a corner of the
    /// lattice cell containing a/b, since the Delaunay triangles of all five
    /// lattices are non-obtuse.
    pub fn euclid_div(self, a: &QuadInt, b: &QuadInt) -> Result<(QuadInt, QuadInt)> {
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm(b);
        let p = self.mul(a, &self.conj(b));
        let fx = p.a.div_floor(&n);
        let fy = p.b.div_floor(&n);
        let mut best: Option<(Int, QuadInt, QuadInt)> = None;
        for i in 0..2i64 {
            for j in 0..2i64 {
                let q = QuadInt { a: &fx + &Int::from(i), b: &fy + &Int::from(j) };
                let r = a - &self.mul(&q, b);
                let nr = self.norm(&r);
                let better = match &best {
                    None => true,
                    Some((bn, bq, _)) => match nr.cmp(bn) {
                        Ordering::Less => true,
                        Ordering::Equal => q.lex_cmp(bq) == Ordering::Less,
                        Ordering::Greater => false,
                    },
                };
                if better {
                    best = Some((nr, q, r));
                }
            }
        }
        let (_, q, r) = best.expect("four candidates examined");
        Ok((q, r))
    }

    /// Representative of the associate class of x: the associate with the
    /// lexicographically largest (a, b). Returns (x₀, u) with x = u·x₀.
    pub fn canonical_associate(self, x: &QuadInt) -> (QuadInt, QuadInt) {
        if x.is_zero() {
            return (QuadInt::zero(), QuadInt::one());
        }
        let mut best: Option<(QuadInt, QuadInt)> = None;
        for u in self.units() {
            let c = self.mul(&u, x);
            if best.as_ref().map_or(true, |(b, _)| c.lex_cmp(b) == Ordering::Greater) {
                best = Some((c, u));
            }
        }
        let (x0, u) = best.expect("unit group is nonempty");
        (x0, self.unit_inverse(&u))
    }

    pub fn canonical(self, x: &QuadInt) -> QuadInt {
        self.canonical_associate(x).0
    }

    pub fn gcd(self, a: &QuadInt, b: &QuadInt) -> Result<QuadInt> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::Precondition("gcd(0, 0) is undefined".into()));
        }
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let (_, r) = self.euclid_div(&x, &y)?;
            x = y;
            y = r;
        }
        Ok(self.canonical(&x))
    }

    /// Extended gcd: returns (g, s, t) with s·a + t·b = g, g canonical.
    pub fn xgcd(self, a: &QuadInt, b: &QuadInt) -> Result<(QuadInt, QuadInt, QuadInt)> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::Precondition("gcd(0, 0) is undefined".into()));
        }
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (QuadInt::one(), QuadInt::zero());
        let (mut t0, mut t1) = (QuadInt::zero(), QuadInt::one());
        while !r1.is_zero() {
            let (q, r) = self.euclid_div(&r0, &r1)?;
            let s2 = &s0 - &self.mul(&q, &s1);
            let t2 = &t0 - &self.mul(&q, &t1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        let (g, u) = self.canonical_associate(&r0);
        let ui = self.unit_inverse(&u);
        Ok((g, self.mul(&s0, &ui), self.mul(&t0, &ui)))
    }

    /// All elements of norm exactly k, sorted lexicographically.
    pub fn elements_of_norm(self, k: &Int) -> Vec<QuadInt> {
        let mut out = Vec::new();
        if k.signum() < 0 {
            return out;
        }
        if k.is_zero() {
            return vec![QuadInt::zero()];
        }
        // N(a + bω) = k  ⇔  (2a + tb)² + |d_K|·b² = 4k
        let dk = Int::from(-self.disc());
        let four_k = k.clone().mul_small(4);
        let bmax = four_k.div_floor(&dk).isqrt();
        let t = Int::from(self.omega_trace());
        let mut b = -&bmax;
        while b <= bmax {
            let rest = &four_k - &(&dk * &(&b * &b));
            if rest.signum() >= 0 {
                let s = rest.isqrt();
                if &s * &s == rest {
                    let tb = &t * &b;
                    for sgn in [-1i64, 1] {
                        let num = &s.clone().mul_small(sgn) - &tb;
                        if num.mod_floor(&Int::from(2)).is_zero() {
                            let a = num.div_floor(&Int::from(2));
                            let x = QuadInt { a, b: b.clone() };
                            if !out.contains(&x) {
                                out.push(x);
                            }
                        }
                    }
                }
            }
            b = &b + &Int::ONE;
        }
        out.sort_by(|x, y| x.lex_cmp(y));
        out
    }

    /// All nonzero elements with norm ≤ bound, ordered by (N, a, b).
    pub fn elements_up_to_norm(self, bound: u64) -> Vec<QuadInt> {
        let mut out = Vec::new();
        for k in 1..=bound {
            out.extend(self.elements_of_norm(&Int::from(k as i64)));
        }
        out
    }

    /// Canonical generators of the nonzero ideals of norm ≤ bound.
    pub fn ideals_up_to_norm(self, bound: u64) -> Vec<QuadInt> {
        let mut out: Vec<QuadInt> = Vec::new();
        for x in self.elements_up_to_norm(bound) {
            let c = self.canonical(&x);
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }

    /// One canonical divisor per associate class, ordered by (N, a, b).
    pub fn divisors_up_to_units(self, eta: &QuadInt) -> Result<Vec<QuadInt>> {
        if eta.is_zero() {
            return Err(Error::Precondition("divisors of zero requested".into()));
        }
        let n = self.norm(eta);
        let mut out: Vec<QuadInt> = Vec::new();
        for k in int_divisors(&n) {
            for x in self.elements_of_norm(&k) {
                if self.divides(&x, eta) {
                    let c = self.canonical(&x);
                    if !out.contains(&c) {
                        out.push(c);
                    }
                }
            }
        }
        out.sort_by(|x, y| self.norm(x).cmp(&self.norm(y)).then_with(|| x.lex_cmp(y)));
        Ok(out)
    }

    pub fn is_prime(self, x: &QuadInt) -> bool {
        !x.is_zero()
            && !self.is_unit(x)
            && self.divisors_up_to_units(x).map(|d| d.len() == 2).unwrap_or(false)
    }

    /// Canonical prime divisors of x (each once).
    pub fn prime_divisors(self, x: &QuadInt) -> Result<Vec<QuadInt>> {
        Ok(self
            .divisors_up_to_units(x)?
            .into_iter()
            .filter(|p| self.is_prime(p))
            .collect())
    }

    /// Representatives S_δ of O/δ, each the remainder of dividing a point of
    /// the standard fundamental box by δ, so every β has N(β) < N(δ).
    pub fn residues_below(self, delta: &QuadInt) -> Result<Vec<QuadInt>> {
        self.residues_below_with(delta, ResidueConvention::Canonical)
    }

    pub fn residues_below_with(
        self,
        delta: &QuadInt,
        conv: ResidueConvention,
    ) -> Result<Vec<QuadInt>> {
        if delta.is_zero() {
            return Err(Error::Precondition("residues modulo zero requested".into()));
        }
        let (a_len, c_len, _) = self.lattice_hnf(delta);
        let mut out = Vec::with_capacity((&a_len * &c_len).to_i64().unwrap_or(0) as usize);
        let mut y = Int::ZERO;
        while y < c_len {
            let mut x = Int::ZERO;
            while x < a_len {
                let (_, r) = self.euclid_div(&QuadInt { a: x.clone(), b: y.clone() }, delta)?;
                out.push(match conv {
                    ResidueConvention::Canonical => r,
                    ResidueConvention::Alternate => -r,
                });
                x = &x + &Int::ONE;
            }
            y = &y + &Int::ONE;
        }
        Ok(out)
    }

    /// Hermite basis of the lattice δO ⊂ Z²: returns (A, C, B) such that δO
    /// is spanned by (A, 0) and (B, C) with A·C = N(δ), 0 ≤ B < A.
    pub fn lattice_hnf(self, delta: &QuadInt) -> (Int, Int, Int) {
        let v1 = delta.clone();
        let v2 = self.mul(delta, &QuadInt::omega());
        let (c, s, t) = int_xgcd(&v1.b, &v2.b);
        let n = self.norm(delta);
        if c.is_zero() {
            // δ is a rational integer times zero ω-part; cannot happen for δ ≠ 0
            // because δω always has nonzero ω-coordinate.
            unreachable!("lattice of a nonzero element is full rank");
        }
        let a_len = n.div_exact(&c);
        let bx = &(&s * &v1.a) + &(&t * &v2.a);
        let b = bx.mod_floor(&a_len);
        (a_len, c, b)
    }
}

/// Positive divisors of a positive integer (trial division).
pub fn int_divisors(n: &Int) -> Vec<Int> {
    let n = n.abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut k = Int::ONE;
    while &k * &k <= n {
        if k.divides(&n) {
            let other = n.div_exact(&k);
            if other != k {
                large.push(other);
            }
            small.push(k.clone());
        }
        k = &k + &Int::ONE;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Extended gcd over Z: (g, s, t) with s·x + t·y = g ≥ 0.
pub fn int_xgcd(x: &Int, y: &Int) -> (Int, Int, Int) {
    let (mut r0, mut r1) = (x.clone(), y.clone());
    let (mut s0, mut s1) = (Int::ONE, Int::ZERO);
    let (mut t0, mut t1) = (Int::ZERO, Int::ONE);
    while !r1.is_zero() {
        let q = r0.div_floor(&r1);
        let r2 = &r0 - &(&q * &r1);
        let s2 = &s0 - &(&q * &s1);
        let t2 = &t0 - &(&q * &t1);
        r0 = std::mem::replace(&mut r1, r2);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.signum() < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

trait MulSmall {
    fn mul_small(self, k: i64) -> Int;
}

impl MulSmall for Int {
    fn mul_small(self, k: i64) -> Int {
        if k == 1 {
            self
        } else {
            &self * &Int::from(k)
        }
    }
}
