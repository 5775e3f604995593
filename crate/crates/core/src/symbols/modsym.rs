use super::cusp::Cusp;
use super::poly::HomPoly;
use super::space::SymbolSpace;
use crate::error::{Error, Result};
use crate::linalg::{sv_axpy, Scalar, SparseVec};
use crate::ring::{FieldId, Mat2, QuadInt};

/// A formal sum Σ P_j ⊗ {α_j, β_j}.
#[derive(Clone, Debug)]
pub struct ModSym<F> {
    pub weight: usize,
    pub terms: Vec<(HomPoly<F>, Cusp, Cusp)>,
}

impl<F: Scalar> ModSym<F> {
    pub fn new(weight: usize) -> ModSym<F> {
        ModSym { weight, terms: Vec::new() }
    }

    pub fn single(p: HomPoly<F>, alpha: Cusp, beta: Cusp) -> ModSym<F> {
        ModSym { weight: p.weight(), terms: vec![(p, alpha, beta)] }
    }

    pub fn push(&mut self, p: HomPoly<F>, alpha: Cusp, beta: Cusp) {
        self.terms.push((p, alpha, beta));
    }
}

/// The unimodular matrices g_j (det 1) with {∞, α} = Σ_j {g_j·0, g_j·∞},
/// read off from the continued-fraction convergents of α.
pub fn convergent_path(f: FieldId, alpha: &Cusp) -> Result<Vec<Mat2>> {
    let mut out = Vec::new();
    if alpha.is_infinity() {
        return Ok(out);
    }
    let (mut p0, mut q0) = (QuadInt::zero(), QuadInt::one());
    let (mut p1, mut q1) = (QuadInt::one(), QuadInt::zero());
    let (mut x, mut y) = (alpha.num.clone(), alpha.den.clone());
    while !y.is_zero() {
        let (q, r) = f.euclid_div(&x, &y)?;
        let p2 = &f.mul(&q, &p1) + &p0;
        let q2 = &f.mul(&q, &q1) + &q0;
        let mut g = Mat2::new(p2.clone(), p1.clone(), q2.clone(), q1.clone());
        let det = g.det(f);
        if !det.is_one() {
            // det = −1: negate the second column, which fixes both cusps
            debug_assert_eq!(det, QuadInt::from_i64(-1));
            g = Mat2::new(p2.clone(), -&p1, q2.clone(), -&q1);
        }
        out.push(g);
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        x = std::mem::replace(&mut y, r);
    }
    Ok(out)
}

impl<F: Scalar> SymbolSpace<F> {
    /// P ⊗ {g·0, g·∞} = [P|_{g⁻¹}, g] for g ∈ SL₂(O), as generators.
    pub fn symbol_of_edge(&self, p: &HomPoly<F>, g: &Mat2) -> Result<SparseVec<F>> {
        let q = p.slash_inverse(self.level().field, g)?;
        self.symbol_of_matrix(&q, g)
    }

    /// Expresses a modular symbol in Manin generators (unreduced).
    pub fn modular_to_generators(&self, m: &ModSym<F>) -> Result<SparseVec<F>> {
        if m.weight != self.weight() {
            return Err(Error::Precondition("modular symbol weight does not match the space".into()));
        }
        let f = self.level().field;
        let mut acc = Vec::new();
        for (p, alpha, beta) in &m.terms {
            if p.weight() != self.weight() {
                return Err(Error::Precondition("polynomial degree does not match the weight".into()));
            }
            // {α, β} = {∞, β} − {∞, α}
            for (cusp, sign) in [(beta, F::one()), (alpha, F::one().neg())] {
                for g in convergent_path(f, cusp)? {
                    acc = sv_axpy(&acc, &sign, &self.symbol_of_edge(p, &g)?);
                }
            }
        }
        Ok(acc)
    }

    /// Quotient coordinates of a modular symbol.
    pub fn modular_to_manin(&self, m: &ModSym<F>) -> Result<SparseVec<F>> {
        Ok(self.project(&self.modular_to_generators(m)?))
    }

    /// μ∂ of a modular symbol computed directly on cusps:
    /// P ⊗ {α, β} ↦ P(β)[β] − P(α)[α].
    pub fn boundary_of_modular(&self, m: &ModSym<F>) -> Result<SparseVec<F>> {
        let f = self.level().field;
        let mut acc = Vec::new();
        for (p, alpha, beta) in &m.terms {
            for (cusp, sign) in [(beta, F::one()), (alpha, F::one().neg())] {
                let val = if p.degree() == 0 {
                    p.coeffs()[0].mul(&sign)
                } else {
                    let outside = || Error::Precondition("cusp outside the coefficient field".into());
                    let a = F::from_quad(f, &cusp.num).ok_or_else(outside)?;
                    let c = F::from_quad(f, &cusp.den).ok_or_else(outside)?;
                    p.eval(&a, &c).mul(&sign)
                };
                let mut part = Vec::new();
                self.boundary_target().accumulate(&mut part, &val, &cusp.num, &cusp.den);
                acc = sv_axpy(&acc, &F::one(), &crate::linalg::sv_collect(part));
            }
        }
        Ok(acc)
    }
}
