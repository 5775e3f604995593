use std::fmt;

use super::scalar::Scalar;
use super::sparse::SparseMat;

/// Univariate polynomial, coefficients from the constant term upward.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly<F> {
    coeffs: Vec<F>,
}

impl<F: Scalar> UniPoly<F> {
    pub fn new(mut coeffs: Vec<F>) -> UniPoly<F> {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> UniPoly<F> {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> UniPoly<F> {
        UniPoly { coeffs: vec![F::one()] }
    }

    /// x − c
    pub fn linear(c: &F) -> UniPoly<F> {
        UniPoly::new(vec![c.neg(), F::one()])
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports None.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> F {
        self.coeffs.last().cloned().unwrap_or_else(F::zero)
    }

    pub fn eval(&self, x: &F) -> F {
        let mut acc = F::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    pub fn add(&self, o: &UniPoly<F>) -> UniPoly<F> {
        let n = self.coeffs.len().max(o.coeffs.len());
        let get = |p: &UniPoly<F>, i: usize| p.coeffs.get(i).cloned().unwrap_or_else(F::zero);
        UniPoly::new((0..n).map(|i| get(self, i).add(&get(o, i))).collect())
    }

    pub fn sub(&self, o: &UniPoly<F>) -> UniPoly<F> {
        self.add(&o.scale(&F::one().neg()))
    }

    pub fn scale(&self, c: &F) -> UniPoly<F> {
        UniPoly::new(self.coeffs.iter().map(|x| x.mul(c)).collect())
    }

    pub fn mul(&self, o: &UniPoly<F>) -> UniPoly<F> {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![F::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        UniPoly::new(out)
    }

    /// Euclidean division (quotient, remainder); panics on a zero divisor.
    pub fn divrem(&self, d: &UniPoly<F>) -> (UniPoly<F>, UniPoly<F>) {
        let dd = d.degree().expect("polynomial division by zero");
        let inv = d.lead().inv();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (UniPoly::zero(), self.clone());
        }
        let mut q = vec![F::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = r[k + dd].mul(&inv);
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] = r[k + j].sub(&c.mul(dc));
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (UniPoly::new(q), UniPoly::new(r))
    }

    pub fn monic(&self) -> UniPoly<F> {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().inv())
    }

    pub fn gcd(&self, o: &UniPoly<F>) -> UniPoly<F> {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> UniPoly<F> {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.mul(&F::from_i64(i as i64)))
                .collect(),
        )
    }
}

impl<F: Scalar> fmt::Display for UniPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let s = c.to_string();
            let (neg, body) = match s.strip_prefix('-') {
                Some(b) => (true, b.to_string()),
                None => (false, s),
            };
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let show_coeff = i == 0 || body != "1";
            if show_coeff {
                f.write_str(&body)?;
            }
            match i {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Characteristic polynomial det(x·I − M) via reduction to Hessenberg form.
pub fn charpoly<F: Scalar>(m: &SparseMat<F>) -> UniPoly<F> {
    assert!(m.is_square(), "characteristic polynomial of a non-square matrix");
    let n = m.nrows();
    let mut h = m.to_dense();
    for col in 1..n {
        let Some(i) = (col..n).find(|&i| !h[i][col - 1].is_zero()) else { continue };
        if i != col {
            h.swap(i, col);
            for row in h.iter_mut() {
                row.swap(i, col);
            }
        }
        let piv_inv = h[col][col - 1].inv();
        for j in col + 1..n {
            let u = h[j][col - 1].mul(&piv_inv);
            if u.is_zero() {
                continue;
            }
            for k in 0..n {
                let v = h[j][k].sub(&u.mul(&h[col][k]));
                h[j][k] = v;
            }
            for row in h.iter_mut() {
                let v = row[col].add(&u.mul(&row[j]));
                row[col] = v;
            }
        }
    }
    // p_m = (x − h_mm) p_{m−1} − Σ_i (h_{m−i,m} Π h_{j,j−1}) p_{m−i−1}   (1-indexed)
    let mut p: Vec<UniPoly<F>> = vec![UniPoly::one()];
    for mm in 1..=n {
        let mut next = UniPoly::linear(&h[mm - 1][mm - 1]).mul(&p[mm - 1]);
        let mut t = F::one();
        for i in 1..mm {
            t = t.mul(&h[mm - i][mm - i - 1]);
            let c = t.mul(&h[mm - i - 1][mm - 1]);
            if !c.is_zero() {
                next = next.sub(&p[mm - i - 1].scale(&c));
            }
        }
        p.push(next);
    }
    p.pop().expect("nonempty")
}
