//! Hecke operators T_η on ℳ_k(Γ₁(n)): the Heilbronn–Merel formula on Manin
//! symbols, a coset-representative oracle, commutators and simultaneous
//! rational eigensystems on the cuspidal subspace.

mod eigen;

use rayon::prelude::*;
use serde_json::{json, Value};

pub use eigen::{cuspidal_to_quotient, eigensystems, eigensystems_from, EigenSystem, EigenTable, ResidualFactor};

use crate::error::{Error, Result};
use crate::heilbronn::{generate, HeilbronnFamily};
use crate::linalg::{Scalar, SparseMat, SparseVec};
use crate::ring::{Mat2, QuadInt};
use crate::symbols::{en_normalize, lift_to_sl2, Cusp, HomPoly, Level, ModSym, SymbolSpace};

#[derive(Clone, Debug)]
pub struct HeckeOperator<F> {
    pub eta: QuadInt,
    pub level: Level,
    pub weight: usize,
    /// columns are the images of the quotient basis vectors
    pub matrix: SparseMat<F>,
    /// the restriction to the cuspidal subspace, in its basis
    pub cuspidal_matrix: SparseMat<F>,
}

impl<F: Scalar> HeckeOperator<F> {
    fn new(s: &SymbolSpace<F>, eta: QuadInt, matrix: SparseMat<F>) -> Result<HeckeOperator<F>> {
        let cuspidal_matrix = s.cuspidal().restrict(&matrix).map_err(|_| {
            Error::Verification(format!("T_{eta} does not preserve the cuspidal subspace at {}", s.level()))
        })?;
        Ok(HeckeOperator { eta, level: s.level().clone(), weight: s.weight(), matrix, cuspidal_matrix })
    }

    pub fn apply(&self, x: &SparseVec<F>) -> SparseVec<F> {
        self.matrix.mul_vec(x)
    }

    pub fn to_json(&self, s: &SymbolSpace<F>) -> Value {
        let f = self.level.field;
        json!({
            "eta": self.eta.to_string(),
            "level": self.level.to_json(),
            "weight": self.weight,
            "basis": s.basis_generators().iter().map(|g| {
                let m = s.generator(*g);
                json!({"monomial_index": m.monomial_index, "point": m.point.to_json(f)})
            }).collect::<Vec<_>>(),
            "matrix": self.matrix.to_json(),
            "cuspidal_matrix": self.cuspidal_matrix.to_json(),
            "trace": self.matrix.trace().to_string(),
        })
    }
}

fn check_coprime(level: &Level, eta: &QuadInt) -> Result<()> {
    let f = level.field;
    if eta.is_zero() {
        return Err(Error::Precondition("T_0 is not defined".into()));
    }
    if !f.is_unit(&f.gcd(eta, &level.generator)?) {
        return Err(Error::Precondition(format!("η = {eta} is not coprime to n = {}", level.generator)));
    }
    Ok(())
}

/// T_η by the Manin-symbol formula with the default Heilbronn–Merel family.
pub fn hecke_on_manin<F: Scalar>(s: &SymbolSpace<F>, eta: &QuadInt) -> Result<HeckeOperator<F>> {
    check_coprime(s.level(), eta)?;
    let fam = generate(s.level().field, eta)?;
    hecke_from_family(s, &fam)
}

pub fn hecke_from_family<F: Scalar>(s: &SymbolSpace<F>, fam: &HeilbronnFamily) -> Result<HeckeOperator<F>> {
    let terms: Vec<(i64, Mat2)> = fam.matrices().iter().map(|hb| (1, hb.m.clone())).collect();
    hecke_on_manin_with(s, fam.eta(), &terms)
}

/// T([P, (u, v)]) = Σ_M u_M [P(aX + bY, cX + dY), (au + cv, bu + dv)] over
/// the weighted matrices (u_M, M), skipping images outside E_n.
pub fn hecke_on_manin_with<F: Scalar>(
    s: &SymbolSpace<F>,
    eta: &QuadInt,
    terms: &[(i64, Mat2)],
) -> Result<HeckeOperator<F>> {
    check_coprime(s.level(), eta)?;
    formula_operator(s, eta, terms)
}

/// The Manin-symbol formula with the default family for any η ≠ 0. For η
/// coprime to n this is T_η; otherwise it is the U-type operator of the
/// same family.
pub fn manin_operator<F: Scalar>(s: &SymbolSpace<F>, eta: &QuadInt) -> Result<HeckeOperator<F>> {
    if eta.is_zero() {
        return Err(Error::Precondition("T_0 is not defined".into()));
    }
    let fam = generate(s.level().field, eta)?;
    let terms: Vec<(i64, Mat2)> = fam.matrices().iter().map(|hb| (1, hb.m.clone())).collect();
    formula_operator(s, eta, &terms)
}

fn formula_operator<F: Scalar>(s: &SymbolSpace<F>, eta: &QuadInt, terms: &[(i64, Mat2)]) -> Result<HeckeOperator<F>> {
    let f = s.level().field;
    for (_, m) in terms {
        if m.det(f) != *eta {
            return Err(Error::Precondition(format!("{m} does not have determinant {eta}")));
        }
    }
    let prepared = prepare(s, terms)?;
    let cols: Vec<SparseVec<F>> = s
        .basis_generators()
        .par_iter()
        .map(|g| s.project(&manin_image(s, &prepared, *g)))
        .collect();
    let matrix = SparseMat::from_columns(s.dim(), cols);
    HeckeOperator::new(s, eta.clone(), matrix)
}

pub(crate) struct Prepared<F> {
    point_map: crate::symbols::ReducedMat,
    /// image of monomial i under P ↦ u_M·P(aX + bY, cX + dY)
    images: Vec<Vec<F>>,
}

pub(crate) fn prepare<F: Scalar>(s: &SymbolSpace<F>, terms: &[(i64, Mat2)]) -> Result<Vec<Prepared<F>>> {
    let f = s.level().field;
    let k = s.weight();
    terms
        .iter()
        .map(|(u, m)| {
            let c = F::from_i64(*u);
            let images = (0..k - 1)
                .map(|i| {
                    HomPoly::<F>::monomial(k, i).apply(f, m).map(|p| p.coeffs().iter().map(|x| x.mul(&c)).collect())
                })
                .collect::<Result<Vec<Vec<F>>>>()?;
            Ok(Prepared { point_map: s.table().reduce_mat(m), images })
        })
        .collect()
}

/// Σ_M u_M [P(aX + bY, cX + dY), (u, v)·M] on one generator, unreduced.
pub(crate) fn manin_image<F: Scalar>(s: &SymbolSpace<F>, prepared: &[Prepared<F>], g: usize) -> SparseVec<F> {
    let n = s.num_points();
    let (i, p) = (g / n, g % n);
    let mut acc = Vec::new();
    for t in prepared {
        if let Some(q) = s.table().try_act(p, &t.point_map) {
            for (l, c) in t.images[i].iter().enumerate() {
                if !c.is_zero() {
                    acc.push((l * n + q, c.clone()));
                }
            }
        }
    }
    crate::linalg::sv_collect(acc)
}

/// Representatives of Γ₁(n)\Δ_η: σ_α·[[α, β], [0, η/α]] for α over the
/// divisors of η up to units, β modulo η/α, and σ_α ∈ SL₂(O) with bottom
/// row ≡ (0, α) mod n.
pub fn oracle_representatives(level: &Level, eta: &QuadInt) -> Result<Vec<Mat2>> {
    check_coprime(level, eta)?;
    let f = level.field;
    let mut out = Vec::new();
    for alpha in f.divisors_up_to_units(eta)? {
        let delta = f.div_exact(eta, &alpha).expect("divisor");
        let sigma = lift_to_sl2(&en_normalize(&QuadInt::zero(), &alpha, level)?, level);
        for beta in f.residues_below(&delta)? {
            let upper = Mat2::new(alpha.clone(), beta, QuadInt::zero(), delta.clone());
            let r = sigma.mul(f, &upper);
            if !in_delta(level, eta, &r) {
                return Err(Error::Verification(format!("representative {r} is not in Δ_η")));
            }
            out.push(r);
        }
    }
    Ok(out)
}

/// Membership in Δ_η: det η, c ≡ 0 and a ≡ 1 mod n.
pub fn in_delta(level: &Level, eta: &QuadInt, m: &Mat2) -> bool {
    let f = level.field;
    let n = &level.generator;
    m.det(f) == *eta && f.divides(n, &m.c) && f.divides(n, &(&m.a - &QuadInt::one()))
}

/// Whether δ′δ⁻¹ ∈ Γ₁(n) for δ, δ′ ∈ Δ_η.
pub fn same_gamma1_coset(level: &Level, eta: &QuadInt, d1: &Mat2, d2: &Mat2) -> bool {
    let f = level.field;
    let p = d2.mul(f, &d1.adj());
    let Some(entries) = p
        .entries()
        .iter()
        .map(|x| f.div_exact(x, eta))
        .collect::<Option<Vec<QuadInt>>>()
    else {
        return false;
    };
    let g = Mat2::new(entries[0].clone(), entries[1].clone(), entries[2].clone(), entries[3].clone());
    g.det(f).is_one() && in_delta(level, &QuadInt::one(), &g)
}

/// Default limit on (#representatives × dim ℳ) for the oracle.
pub const ORACLE_BUDGET: usize = 5_000_000;

/// T_η from its definition P ⊗ {α, β} ↦ Σ_δ P|_δ ⊗ {δα, δβ} over
/// Γ₁(n)\Δ_η, applied to each basis symbol [P, g] = P|_g ⊗ {g0, g∞} and
/// converted back to Manin symbols.
pub fn hecke_oracle<F: Scalar>(s: &SymbolSpace<F>, eta: &QuadInt, budget: usize) -> Result<HeckeOperator<F>> {
    let reps = oracle_representatives(s.level(), eta)?;
    if reps.len().saturating_mul(s.dim()) > budget {
        return Err(Error::Budget(format!(
            "oracle needs {} representatives on a space of dimension {}",
            reps.len(),
            s.dim()
        )));
    }
    let f = s.level().field;
    let lifts = s.lifts();
    let cols: Vec<Result<SparseVec<F>>> = s
        .basis_generators()
        .par_iter()
        .map(|g| {
            let m = s.generator(*g);
            let lift = &lifts[*g % s.num_points()];
            let p = HomPoly::<F>::monomial(s.weight(), m.monomial_index).slash(f, lift)?;
            let mut sym = ModSym::new(s.weight());
            for d in &reps {
                let dg = d.mul(f, lift);
                sym.push(p.slash(f, d)?, Cusp::zero().act(f, &dg)?, Cusp::infinity().act(f, &dg)?);
            }
            s.modular_to_manin(&sym)
        })
        .collect();
    let matrix = SparseMat::from_columns(s.dim(), cols.into_iter().collect::<Result<Vec<_>>>()?);
    HeckeOperator::new(s, eta.clone(), matrix)
}

/// The operator of the scalar matrix πI:
/// [P, (u, v)] ↦ P(πX, πY)·[(πu, πv)] = π^{k−2}[P, (πu, πv)].
pub fn diamond<F: Scalar>(s: &SymbolSpace<F>, pi: &QuadInt) -> Result<HeckeOperator<F>> {
    let m = Mat2::new(pi.clone(), QuadInt::zero(), QuadInt::zero(), pi.clone());
    let f = s.level().field;
    hecke_on_manin_with(s, &f.mul(pi, pi), &[(1, m)])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommuteCertificate {
    pub full: bool,
    pub cuspidal: bool,
}

impl CommuteCertificate {
    pub fn ok(&self) -> bool {
        self.full && self.cuspidal
    }
}

pub fn commute_check<F: Scalar>(a: &HeckeOperator<F>, b: &HeckeOperator<F>) -> Result<CommuteCertificate> {
    if a.level != b.level || a.weight != b.weight || a.matrix.nrows() != b.matrix.nrows() {
        return Err(Error::Precondition("operators act on different spaces".into()));
    }
    let full = a.matrix.mul(&b.matrix) == b.matrix.mul(&a.matrix);
    let cuspidal = a.cuspidal_matrix.mul(&b.cuspidal_matrix) == b.cuspidal_matrix.mul(&a.cuspidal_matrix);
    Ok(CommuteCertificate { full, cuspidal })
}

/// How T_{uη} relates to T_η.
#[derive(Clone, Debug, PartialEq)]
pub enum AssociateRelation<F> {
    Equal,
    /// T_{uη} = c·T_η
    Scalar(F),
    Other,
}

pub fn associate_relation<F: Scalar>(a: &HeckeOperator<F>, b: &HeckeOperator<F>) -> AssociateRelation<F> {
    if a.matrix == b.matrix {
        return AssociateRelation::Equal;
    }
    let Some((i, j, x)) = a.matrix.entries().next() else {
        return AssociateRelation::Other;
    };
    let c = b.matrix.get(i, j).div(x);
    if !c.is_zero() && a.matrix.scale(&c) == b.matrix {
        AssociateRelation::Scalar(c)
    } else {
        AssociateRelation::Other
    }
}
