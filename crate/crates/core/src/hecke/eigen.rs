use serde_json::{json, Value};

use super::{hecke_on_manin, HeckeOperator};
use crate::error::{Error, Result};
use crate::linalg::{rational_eigensystem, IntPoly, Scalar, SparseVec, Subspace, Q};
use crate::ring::QuadInt;
use crate::symbols::{Level, SymbolSpace};

/// A simultaneous rational eigenspace of the cuspidal Hecke operators.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub label: String,
    /// (η, λ_η) in the order the operators were processed
    pub eigenvalues: Vec<(QuadInt, Q)>,
    /// the eigenspace in cuspidal coordinates
    pub space: Subspace<Q>,
    /// a basis of the eigenspace in quotient coordinates
    pub vectors: Vec<SparseVec<Q>>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn eigenvalue(&self, eta: &QuadInt) -> Option<&Q> {
        self.eigenvalues.iter().find(|(e, _)| e == eta).map(|(_, l)| l)
    }
}

/// Part of the cuspidal space on which some T_η has no rational eigenvalue.
#[derive(Clone, Debug)]
pub struct ResidualFactor {
    /// eigenvalues fixed before the split failed
    pub prefix: Vec<(QuadInt, Q)>,
    pub eta: QuadInt,
    pub factor: IntPoly,
}

#[derive(Clone, Debug)]
pub struct EigenTable {
    pub level: Level,
    pub weight: usize,
    pub systems: Vec<EigenSystem>,
    pub residual_factors: Vec<ResidualFactor>,
}

impl EigenTable {
    pub fn to_json(&self) -> Value {
        json!({
            "level": self.level.to_json(),
            "weight": self.weight,
            "systems": self.systems.iter().map(|s| json!({
                "label": s.label,
                "dim": s.dim(),
                "eigenvalues": s.eigenvalues.iter().map(|(e, l)| json!({"eta": e.to_string(), "lambda": l.to_string()})).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "residual_factors": self.residual_factors.iter().map(|r| json!({
                "eta": r.eta.to_string(),
                "prefix": r.prefix.iter().map(|(e, l)| json!({"eta": e.to_string(), "lambda": l.to_string()})).collect::<Vec<_>>(),
                "factor": r.factor.to_json(),
                "degree": r.factor.degree(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Builds T_η for each η and splits the cuspidal space by their rational
/// eigenvalues, processing η by increasing norm.
pub fn eigensystems(s: &SymbolSpace<Q>, etas: &[QuadInt]) -> Result<EigenTable> {
    let f = s.level().field;
    let mut sorted = etas.to_vec();
    sorted.sort_by(|x, y| f.norm(x).cmp(&f.norm(y)).then_with(|| x.lex_cmp(y)));
    sorted.dedup();
    let ops = sorted.iter().map(|e| hecke_on_manin(s, e)).collect::<Result<Vec<_>>>()?;
    eigensystems_from(s, &ops)
}

/// Refines with the given operators in order.
pub fn eigensystems_from(s: &SymbolSpace<Q>, ops: &[HeckeOperator<Q>]) -> Result<EigenTable> {
    let cusp_dim = s.cuspidal().dim();
    let mut pieces: Vec<(Subspace<Q>, Vec<(QuadInt, Q)>)> = Vec::new();
    if cusp_dim > 0 {
        pieces.push((Subspace::full(cusp_dim), Vec::new()));
    }
    let mut residual_factors = Vec::new();
    for op in ops {
        if op.level != *s.level() || op.weight != s.weight() {
            return Err(Error::Precondition("operator belongs to another space".into()));
        }
        let mut next = Vec::new();
        for (w, prefix) in pieces {
            let dec = rational_eigensystem(&op.cuspidal_matrix, &w)?;
            for part in dec.parts {
                let mut p = prefix.clone();
                p.push((op.eta.clone(), part.eigenvalue));
                next.push((part.space, p));
            }
            if dec.residual.degree() > 0 {
                residual_factors.push(ResidualFactor { prefix, eta: op.eta.clone(), factor: dec.residual });
            }
        }
        pieces = next;
    }
    let systems = pieces
        .into_iter()
        .enumerate()
        .map(|(i, (space, eigenvalues))| {
            let vectors = space.basis().iter().map(|v| cuspidal_to_quotient(s, v)).collect();
            EigenSystem { label: format!("f{}", i + 1), eigenvalues, space, vectors }
        })
        .collect();
    Ok(EigenTable { level: s.level().clone(), weight: s.weight(), systems, residual_factors })
}

/// Cuspidal coordinates to quotient coordinates.
pub fn cuspidal_to_quotient<F: Scalar>(s: &SymbolSpace<F>, v: &SparseVec<F>) -> SparseVec<F> {
    let coords: Vec<F> = crate::linalg::sv_to_dense(v, s.cuspidal().dim());
    s.cuspidal().combine(&coords)
}
