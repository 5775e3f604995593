use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::Scalar;
use crate::ring::{FieldId, Mat2, QuadInt};

/// Homogeneous polynomial of degree w = k − 2; `coeffs[i]` multiplies
/// X^{w−i} Y^i.
#[derive(Clone, Debug, PartialEq)]
pub struct HomPoly<F> {
    coeffs: Vec<F>,
}

fn binomials(n: usize) -> Vec<Vec<i64>> {
    let mut rows = vec![vec![1i64]];
    for i in 1..=n {
        let prev = &rows[i - 1];
        let mut row = vec![1i64; i + 1];
        for j in 1..i {
            row[j] = prev[j - 1] + prev[j];
        }
        rows.push(row);
    }
    rows
}

/// Coefficients of (αX + βY)^e, indexed by the power of Y.
fn linear_power<F: Scalar>(alpha: &F, beta: &F, e: usize, binom: &[Vec<i64>]) -> Vec<F> {
    let mut ap = vec![F::one(); e + 1];
    let mut bp = vec![F::one(); e + 1];
    for i in 1..=e {
        ap[i] = ap[i - 1].mul(alpha);
        bp[i] = bp[i - 1].mul(beta);
    }
    (0..=e).map(|j| F::from_i64(binom[e][j]).mul(&ap[e - j]).mul(&bp[j])).collect()
}

impl<F: Scalar> HomPoly<F> {
    /// Polynomial of degree `weight − 2` from its coefficients.
    pub fn new(weight: usize, coeffs: Vec<F>) -> Result<HomPoly<F>> {
        if weight < 2 || coeffs.len() != weight - 1 {
            return Err(Error::Precondition(format!(
                "weight {weight} needs {} coefficients, got {}",
                weight.saturating_sub(1),
                coeffs.len()
            )));
        }
        Ok(HomPoly { coeffs })
    }

    pub fn constant(c: F) -> HomPoly<F> {
        HomPoly { coeffs: vec![c] }
    }

    pub fn monomial(weight: usize, i: usize) -> HomPoly<F> {
        let mut coeffs = vec![F::zero(); weight - 1];
        coeffs[i] = F::one();
        HomPoly { coeffs }
    }

    pub fn zero(weight: usize) -> HomPoly<F> {
        HomPoly { coeffs: vec![F::zero(); weight - 1] }
    }

    pub fn weight(&self) -> usize {
        self.coeffs.len() + 1
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &HomPoly<F>) -> HomPoly<F> {
        assert_eq!(self.coeffs.len(), o.coeffs.len(), "adding polynomials of different degrees");
        HomPoly { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn scale(&self, c: &F) -> HomPoly<F> {
        HomPoly { coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect() }
    }

    pub fn eval(&self, x: &F, y: &F) -> F {
        let w = self.degree();
        let mut acc = F::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut t = c.clone();
            for _ in 0..w - i {
                t = t.mul(x);
            }
            for _ in 0..i {
                t = t.mul(y);
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// P(αX + βY, γX + δY).
    pub fn substitute(&self, m: &[F; 4]) -> HomPoly<F> {
        let w = self.degree();
        if w == 0 {
            return self.clone();
        }
        let binom = binomials(w);
        let mut out = vec![F::zero(); w + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let p1 = linear_power(&m[0], &m[1], w - i, &binom);
            let p2 = linear_power(&m[2], &m[3], i, &binom);
            for (j1, a) in p1.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let ca = c.mul(a);
                for (j2, b) in p2.iter().enumerate() {
                    out[j1 + j2] = out[j1 + j2].add(&ca.mul(b));
                }
            }
        }
        HomPoly { coeffs: out }
    }

    /// P(aX + bY, cX + dY) for an integral matrix.
    pub fn apply(&self, f: FieldId, g: &Mat2) -> Result<HomPoly<F>> {
        if self.degree() == 0 {
            return Ok(self.clone());
        }
        let m = entries::<F>(f, &[g.a.clone(), g.b.clone(), g.c.clone(), g.d.clone()])?;
        Ok(self.substitute(&m))
    }

    /// P|_g = P(dX − bY, −cX + aY). This is a left action:
    /// (P|_g)|_h = P|_{hg}.
    pub fn slash(&self, f: FieldId, g: &Mat2) -> Result<HomPoly<F>> {
        if self.degree() == 0 {
            return Ok(self.clone());
        }
        let m = entries::<F>(f, &[g.d.clone(), -&g.b, -&g.c, g.a.clone()])?;
        Ok(self.substitute(&m))
    }

    /// P|_{h⁻¹} for h with unit determinant e:
    /// e^{−(k−2)}·P(aX + bY, cX + dY).
    pub fn slash_inverse(&self, f: FieldId, h: &Mat2) -> Result<HomPoly<F>> {
        let w = self.degree();
        if w == 0 {
            return Ok(self.clone());
        }
        let e = h.det(f);
        if !f.is_unit(&e) {
            return Err(Error::Precondition(format!("{h} is not invertible over O")));
        }
        let m = entries::<F>(f, &[h.a.clone(), h.b.clone(), h.c.clone(), h.d.clone()])?;
        let einv = F::from_quad(f, &f.unit_inverse(&e)).ok_or_else(|| coefficient_error(f))?;
        let mut s = F::one();
        for _ in 0..w {
            s = s.mul(&einv);
        }
        Ok(self.substitute(&m).scale(&s))
    }
}

fn coefficient_error(f: FieldId) -> Error {
    Error::Precondition(format!(
        "coefficients outside Q arise for d={}; use the quadratic coefficient field",
        f.d()
    ))
}

pub(crate) fn entries<F: Scalar>(f: FieldId, xs: &[QuadInt; 4]) -> Result<[F; 4]> {
    let conv = |x: &QuadInt| F::from_quad(f, x).ok_or_else(|| coefficient_error(f));
    Ok([conv(&xs[0])?, conv(&xs[1])?, conv(&xs[2])?, conv(&xs[3])?])
}

impl<F: Scalar> fmt::Display for HomPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.degree();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            match w - i {
                0 => {}
                1 => f.write_str("X")?,
                e => write!(f, "X^{e}")?,
            }
            match i {
                0 => {}
                1 => f.write_str("Y")?,
                e => write!(f, "Y^{e}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}
