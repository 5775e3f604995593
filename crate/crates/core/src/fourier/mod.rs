//! The Fourier–Bessel expansion of weight-2 cusp forms built from a
//! relation-respecting functional φ and a boundary-free seed x:
//! a_α = Σ_{M∈𝒳_α} φ|_M(x), evaluated on ℍ₃ with K₀, K₁.

mod bessel;
mod series;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde_json::{json, Value};

pub use bessel::{bessel_k, bessel_k01, CROSSOVER};
pub use series::{
    automorphy_residual, eval_series, j_factor, sym2, AutomorphyReport, H3Point, KernelPhase, SeriesValue,
};

use crate::error::{Error, Result};
use crate::hecke::{hecke_on_manin, EigenSystem};
use crate::heilbronn::{generate, FamilyCache, HeilbronnFamily};
use crate::linalg::{kernel, Scalar, SparseMat, SparseVec, Q};
use crate::ring::{FieldId, Mat2, QuadInt, ResidueConvention};
use crate::symbols::{HomPoly, Level, SymbolSpace};

/// A linear functional on ℳ_k, stored by its values on the quotient basis
/// and pulled back to every Manin generator.
#[derive(Clone, Debug)]
pub struct DualFunctional {
    level: Level,
    weight: usize,
    coefficients: Vec<Q>,
    on_generators: Vec<Q>,
}

impl DualFunctional {
    pub fn new(s: &SymbolSpace<Q>, coefficients: Vec<Q>) -> Result<DualFunctional> {
        if coefficients.len() != s.dim() {
            return Err(Error::Precondition(format!(
                "functional has {} coefficients, space has dimension {}",
                coefficients.len(),
                s.dim()
            )));
        }
        let on_generators = (0..s.num_generators())
            .map(|g| {
                s.projection(g).iter().fold(Q::zero(), |acc, (j, c)| acc.add(&c.mul(&coefficients[*j])))
            })
            .collect();
        Ok(DualFunctional { level: s.level().clone(), weight: s.weight(), coefficients, on_generators })
    }

    pub fn level(&self) -> &Level {
        &self.level
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn coefficients(&self) -> &[Q] {
        &self.coefficients
    }

    /// φ on quotient coordinates.
    pub fn eval_quotient(&self, v: &SparseVec<Q>) -> Q {
        v.iter().fold(Q::zero(), |acc, (j, c)| acc.add(&c.mul(&self.coefficients[*j])))
    }

    /// φ on a single Manin generator.
    pub fn eval_generator(&self, g: usize) -> &Q {
        &self.on_generators[g]
    }

    /// φ(x) for a formal sum of generators.
    pub fn eval(&self, x: &[(usize, Q)]) -> Q {
        x.iter().fold(Q::zero(), |acc, (g, c)| acc.add(&c.mul(&self.on_generators[*g])))
    }

    fn check_space(&self, s: &SymbolSpace<Q>) -> Result<()> {
        if self.level != *s.level() || self.weight != s.weight() || self.on_generators.len() != s.num_generators() {
            return Err(Error::Precondition("functional belongs to another space".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "level": self.level.to_json(),
            "weight": self.weight,
            "coefficients": self.coefficients.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// The simultaneous left eigenvector of the operators T_η of an eigensystem,
/// normalized to take the value 1 on the system's first eigenvector.
pub fn eigenfunctional(s: &SymbolSpace<Q>, system: &EigenSystem) -> Result<DualFunctional> {
    let n = s.dim();
    let mut rows: Vec<SparseVec<Q>> = Vec::new();
    for (eta, lambda) in &system.eigenvalues {
        let t = hecke_on_manin(s, eta)?;
        let shifted = t.matrix.transpose().sub(&SparseMat::identity(n).scale(lambda));
        rows.extend(shifted.rows_iter().filter(|r| !r.is_empty()).cloned());
    }
    let ker = kernel(&SparseMat::from_rows(n, rows));
    let target = system
        .vectors
        .first()
        .ok_or_else(|| Error::Precondition("empty eigensystem".into()))?;
    for b in ker.basis() {
        let coeffs = crate::linalg::sv_to_dense(b, n);
        let phi = DualFunctional::new(s, coeffs)?;
        let v = phi.eval_quotient(target);
        if !v.is_zero() {
            let scaled = phi.coefficients.iter().map(|c| c.div(&v)).collect();
            return DualFunctional::new(s, scaled);
        }
    }
    Err(Error::Verification(format!("no left eigenvector pairs nontrivially with {}", system.label)))
}

/// A formal sum x of Manin generators with b(x) = 0.
#[derive(Clone, Debug)]
pub struct SeedElement {
    level: Level,
    terms: SparseVec<Q>,
}

impl SeedElement {
    pub fn new(s: &SymbolSpace<Q>, terms: SparseVec<Q>) -> Result<SeedElement> {
        if let Some((g, _)) = terms.iter().find(|(g, _)| *g >= s.num_generators()) {
            return Err(Error::Precondition(format!("generator index {g} out of range")));
        }
        if !s.boundary_b(&terms).is_empty() {
            return Err(Error::Precondition("seed element has nonzero boundary b(x)".into()));
        }
        Ok(SeedElement { level: s.level().clone(), terms })
    }

    /// The generator combination lifting a cuspidal quotient vector.
    pub fn from_quotient(s: &SymbolSpace<Q>, v: &SparseVec<Q>) -> Result<SeedElement> {
        SeedElement::new(s, s.lift(v))
    }

    pub fn terms(&self) -> &SparseVec<Q> {
        &self.terms
    }

    pub fn scale(&self, c: &Q) -> SeedElement {
        SeedElement { level: self.level.clone(), terms: crate::linalg::sv_scale(&self.terms, c) }
    }

    pub fn to_json(&self, s: &SymbolSpace<Q>) -> Value {
        let f = s.level().field;
        json!(self
            .terms
            .iter()
            .map(|(g, c)| {
                let m = s.generator(*g);
                json!({"monomial_index": m.monomial_index, "point": m.point.to_json(f), "coefficient": c.to_string()})
            })
            .collect::<Vec<_>>())
    }
}

/// φ|_M(x) = Σ c·φ(P(aX + bY, cX + dY)[au + cv, bu + dv]), dropping terms
/// whose image pair is not unimodular modulo n.
pub fn functional_slash(s: &SymbolSpace<Q>, phi: &DualFunctional, m: &Mat2, x: &[(usize, Q)]) -> Result<Q> {
    phi.check_space(s)?;
    let f = s.level().field;
    let table = s.table();
    let n = s.num_points();
    let mut total = Q::zero();
    for (g, coef) in x {
        let (i, p) = (g / n, g % n);
        let pt = table.point(p);
        let u = &f.mul(&m.a, &pt.u) + &f.mul(&m.c, &pt.v);
        let v = &f.mul(&m.b, &pt.u) + &f.mul(&m.d, &pt.v);
        let Some(q) = table.index_of(&u, &v) else { continue };
        let image = HomPoly::<Q>::monomial(s.weight(), i).apply(f, m)?;
        for (l, c) in image.coeffs().iter().enumerate() {
            if !c.is_zero() {
                total = total.add(&coef.mul(&c.mul(phi.eval_generator(l * n + q))));
            }
        }
    }
    Ok(total)
}

/// Σ_{M∈𝒳_α} φ|_M(x) over a Heilbronn–Merel family.
pub fn family_sum(s: &SymbolSpace<Q>, phi: &DualFunctional, fam: &HeilbronnFamily, x: &SeedElement) -> Result<Q> {
    let mut total = Q::zero();
    for hb in fam.matrices() {
        total = total.add(&functional_slash(s, phi, &hb.m, x.terms())?);
    }
    Ok(total)
}

#[derive(Clone, Debug)]
pub struct FourierEntry {
    pub alpha: QuadInt,
    pub exact: Q,
}

/// Coefficients a_α for every nonzero α with N(α) ≤ norm_bound, associates
/// listed separately.
#[derive(Clone, Debug)]
pub struct FourierTable {
    pub level: Level,
    pub norm_bound: u64,
    pub a1: Q,
    pub entries: Vec<FourierEntry>,
    /// whether a_{uα} = a_α held for every unit u and tabulated α
    pub associates_equal: bool,
}

impl FourierTable {
    pub fn empty(level: Level, norm_bound: u64) -> FourierTable {
        FourierTable { level, norm_bound, a1: Q::zero(), entries: Vec::new(), associates_equal: true }
    }

    pub fn field(&self) -> FieldId {
        self.level.field
    }

    pub fn get(&self, alpha: &QuadInt) -> Option<&Q> {
        self.entries.iter().find(|e| e.alpha == *alpha).map(|e| &e.exact)
    }

    /// The same table cut down to N(α) ≤ bound.
    pub fn truncate(&self, bound: u64) -> FourierTable {
        let f = self.field();
        let entries = self
            .entries
            .iter()
            .filter(|e| f.norm(&e.alpha).to_i64().map_or(false, |n| n as u64 <= bound))
            .cloned()
            .collect();
        FourierTable { entries, norm_bound: bound.min(self.norm_bound), ..self.clone() }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "d": self.field().d(),
            "level": self.level.generator.to_string(),
            "weight": 2,
            "norm_bound": self.norm_bound,
            "a1": self.a1.to_string(),
            "associates_equal": self.associates_equal,
            "a": self.entries.iter().map(|e| json!({
                "alpha": e.alpha.to_string(),
                "re": e.exact.to_f64(),
                "im": 0.0,
                "exact": e.exact.to_string(),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<FourierTable> {
        let bad = |what: &str| Error::Parse(format!("Fourier table: {what}"));
        let d = v.get("d").and_then(Value::as_i64).ok_or_else(|| bad("missing d"))?;
        let n = v.get("level").and_then(Value::as_str).ok_or_else(|| bad("missing level"))?;
        let level = Level::new(FieldId::new(d)?, &QuadInt::parse(n)?)?;
        let norm_bound = v.get("norm_bound").and_then(Value::as_u64).ok_or_else(|| bad("missing norm_bound"))?;
        let parse_q = |s: &str| -> Result<Q> { s.parse::<Q>().map_err(|_| bad(&format!("bad rational {s:?}"))) };
        let a1 = match v.get("a1").and_then(Value::as_str) {
            Some(s) => parse_q(s)?,
            None => Q::zero(),
        };
        let mut entries = Vec::new();
        for e in v.get("a").and_then(Value::as_array).ok_or_else(|| bad("missing a"))? {
            let alpha = QuadInt::parse(e.get("alpha").and_then(Value::as_str).ok_or_else(|| bad("entry without alpha"))?)?;
            if alpha.is_zero() {
                return Err(bad("α = 0 has no coefficient"));
            }
            let exact = match e.get("exact").and_then(Value::as_str) {
                Some(s) => parse_q(s)?,
                None => {
                    let re = e.get("re").and_then(Value::as_f64).ok_or_else(|| bad("entry without re"))?;
                    Q::from_float(re).ok_or_else(|| bad("non-finite coefficient"))?
                }
            };
            entries.push(FourierEntry { alpha, exact });
        }
        let associates_equal = v.get("associates_equal").and_then(Value::as_bool).unwrap_or(true);
        Ok(FourierTable { level, norm_bound, a1, entries, associates_equal })
    }
}

/// a_α = Σ_{M∈𝒳_α} φ|_M(x) for all nonzero α with N(α) ≤ norm_bound.
pub fn fourier_coefficients(
    s: &SymbolSpace<Q>,
    phi: &DualFunctional,
    x: &SeedElement,
    norm_bound: u64,
) -> Result<FourierTable> {
    fourier_coefficients_with(s, phi, x, norm_bound, None)
}

pub fn fourier_coefficients_with(
    s: &SymbolSpace<Q>,
    phi: &DualFunctional,
    x: &SeedElement,
    norm_bound: u64,
    cache: Option<&FamilyCache>,
) -> Result<FourierTable> {
    if s.weight() != 2 {
        return Err(Error::Precondition(format!("the Fourier layer is weight 2 only, got k = {}", s.weight())));
    }
    phi.check_space(s)?;
    if x.level != *s.level() {
        return Err(Error::Precondition("seed element belongs to another space".into()));
    }
    let f = s.level().field;
    let alphas: Vec<QuadInt> = f.elements_up_to_norm(norm_bound).into_iter().filter(|a| !a.is_zero()).collect();
    let values: Vec<Result<FourierEntry>> = alphas
        .par_iter()
        .map(|alpha| {
            let fam = match cache {
                Some(c) => c.get(f, alpha, ResidueConvention::Canonical)?,
                None => generate(f, alpha)?,
            };
            Ok(FourierEntry { alpha: alpha.clone(), exact: family_sum(s, phi, &fam, x)? })
        })
        .collect();
    let entries = values.into_iter().collect::<Result<Vec<_>>>()?;
    let a1 = entries.iter().find(|e| e.alpha.is_one()).map(|e| e.exact.clone()).unwrap_or_else(Q::zero);
    let associates_equal = entries.iter().all(|e| {
        let c = f.canonical(&e.alpha);
        entries.iter().find(|o| o.alpha == c).map_or(true, |o| o.exact == e.exact)
    });
    Ok(FourierTable { level: s.level().clone(), norm_bound, a1, entries, associates_equal })
}

/// a_η/a₁ against λ_η for every η of the system that appears in the table.
pub fn check_eigen_consistency(table: &FourierTable, system: &EigenSystem) -> Vec<(QuadInt, bool)> {
    system
        .eigenvalues
        .iter()
        .filter_map(|(eta, lambda)| table.get(eta).map(|a| (eta.clone(), *a == lambda.mul(&table.a1))))
        .collect()
}
