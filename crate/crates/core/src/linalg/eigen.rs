//! Rational eigenvalues and eigenspaces of rational matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde_json::{json, Value};

use super::poly::{charpoly, UniPoly};
use super::scalar::{Scalar, Q};
use super::sparse::{kernel, SparseMat, Subspace};
use crate::error::{Error, Result};

/// Polynomial with integer coefficients (constant term first), primitive
/// with positive leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly(pub Vec<BigInt>);

impl IntPoly {
    /// Scale a rational polynomial to a primitive integer polynomial.
    pub fn from_rational(p: &UniPoly<Q>) -> IntPoly {
        if p.is_zero() {
            return IntPoly(Vec::new());
        }
        let lcm = p.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut ints: Vec<BigInt> =
            p.coeffs().iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
        let content = ints.iter().fold(BigInt::from(0), |acc, c| acc.gcd(c));
        let sign = if ints.last().is_some_and(|c| c.is_negative()) { -1 } else { 1 };
        let div = content * BigInt::from(sign);
        for c in ints.iter_mut() {
            *c = &*c / &div;
        }
        IntPoly(ints)
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn to_rational(&self) -> UniPoly<Q> {
        UniPoly::new(self.0.iter().map(|c| BigRational::from_integer(c.clone())).collect())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "coefficients": self.0.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "text": self.to_string(),
        })
    }
}

impl std::fmt::Display for IntPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_rational())
    }
}

/// Sign changes of a Sturm sequence at x.
fn sign_changes(chain: &[UniPoly<Q>], x: &Q) -> usize {
    let mut last = 0i8;
    let mut changes = 0;
    for p in chain {
        let v = p.eval(x);
        let s = if v.is_zero() { 0 } else if v.is_positive() { 1 } else { -1 };
        if s != 0 {
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
    }
    changes
}

/// All distinct rational roots of p, found exactly: integer roots of the
/// monic rescaling are isolated by Sturm sequences and bisection.
pub fn rational_roots(p: &UniPoly<Q>) -> Vec<Q> {
    let Some(deg) = p.degree() else { return Vec::new() };
    if deg == 0 {
        return Vec::new();
    }
    let ip = IntPoly::from_rational(p);
    let lead = ip.0.last().cloned().expect("nonzero");
    // y = lead·x turns p into a monic integer polynomial whose integer roots
    // are exactly lead·(rational roots of p).
    let n = ip.degree();
    let mut mon = Vec::with_capacity(n + 1);
    for (i, c) in ip.0.iter().enumerate() {
        if i == n {
            mon.push(<Q as Scalar>::one());
        } else {
            mon.push(BigRational::from_integer(c * num_traits::pow(lead.clone(), n - 1 - i)));
        }
    }
    let mon = UniPoly::new(mon);
    let sqfree = mon.divrem(&mon.gcd(&mon.derivative())).0.monic();
    let mut chain = vec![sqfree.clone(), sqfree.derivative()];
    while let Some(last) = chain.last() {
        if last.is_zero() || last.degree() == Some(0) {
            break;
        }
        let prev = &chain[chain.len() - 2];
        let (_, r) = prev.divrem(last);
        if r.is_zero() {
            break;
        }
        chain.push(r.scale(&BigRational::from_integer(BigInt::from(-1))));
    }
    let bound = mon
        .coeffs()
        .iter()
        .map(|c| c.abs().ceil().to_integer())
        .max()
        .unwrap_or_else(|| BigInt::from(0))
        + BigInt::one();
    let mut roots = Vec::new();
    let mut stack = vec![(-bound.clone() - BigInt::one(), bound)];
    while let Some((lo, hi)) = stack.pop() {
        let vlo = sign_changes(&chain, &BigRational::from_integer(lo.clone()));
        let vhi = sign_changes(&chain, &BigRational::from_integer(hi.clone()));
        if vlo <= vhi {
            continue;
        }
        if &hi - &lo == BigInt::one() {
            let y = BigRational::from_integer(hi.clone());
            if sqfree.eval(&y).is_zero() {
                roots.push(y / BigRational::from_integer(lead.clone()));
            }
            continue;
        }
        let mid: BigInt = (&lo + &hi).div_floor(&BigInt::from(2));
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    roots.sort();
    roots
}

#[derive(Clone, Debug)]
pub struct EigenPart {
    pub eigenvalue: Q,
    pub algebraic_multiplicity: usize,
    /// Eigenspace in ambient coordinates.
    pub space: Subspace<Q>,
}

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub charpoly: IntPoly,
    pub parts: Vec<EigenPart>,
    /// Characteristic polynomial with all rational roots removed.
    pub residual: IntPoly,
}

/// All rational eigenvalues of m restricted to an invariant subspace, with
/// eigenspaces; the rest of the characteristic polynomial is reported as a
/// residual factor.
pub fn rational_eigensystem(m: &SparseMat<Q>, restrict: &Subspace<Q>) -> Result<EigenDecomposition> {
    if !m.is_square() {
        return Err(Error::Precondition("eigensystem of a non-square matrix".into()));
    }
    let a = restrict.restrict(m)?;
    let cp = charpoly(&a);
    let mut residual = cp.clone();
    let mut parts = Vec::new();
    for lambda in rational_roots(&cp) {
        let lin = UniPoly::linear(&lambda);
        let mut mult = 0;
        loop {
            let (q, r) = residual.divrem(&lin);
            if !r.is_zero() {
                break;
            }
            residual = q;
            mult += 1;
        }
        let shifted = a.sub(&SparseMat::identity(a.nrows()).scale(&lambda));
        let inner = kernel(&shifted);
        parts.push(EigenPart {
            eigenvalue: lambda,
            algebraic_multiplicity: mult,
            space: restrict.embed(&inner),
        });
    }
    for p in &parts {
        for v in p.space.basis() {
            let img: Vec<(usize, Q)> = m.mul_vec(v).into_iter().filter(|(_, x)| !x.is_zero()).collect();
            let expect: Vec<(usize, Q)> = v
                .iter()
                .map(|(i, x)| (*i, x.mul(&p.eigenvalue)))
                .filter(|(_, x)| !x.is_zero())
                .collect();
            if img != expect {
                return Err(Error::Verification("eigenvector check failed".into()));
            }
        }
    }
    Ok(EigenDecomposition {
        charpoly: IntPoly::from_rational(&cp),
        parts,
        residual: IntPoly::from_rational(&residual),
    })
}
