use rayon::prelude::*;
use serde_json::{json, Value};

use super::boundary::{normalize, BoundaryTarget};
use super::level::{lift_to_sl2, EnPoint, EnTable, Level, ReducedMat};
use super::poly::HomPoly;
use super::relations::{relation_generators, Relation};
use crate::error::{Error, Result};
use crate::linalg::{kernel, sv_axpy, RowReducer, Scalar, SparseMat, SparseVec, Subspace};
use crate::ring::Mat2;

/// The generator [X^{k−2−i} Y^i, g] with g in the coset given by `point`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ManinGen {
    pub monomial_index: usize,
    pub point: EnPoint,
}

/// ℳ_k(Γ₁(n)) as the free module on Manin generators modulo the relations.
/// Quotient coordinates are taken on the free (non-pivot) generators of the
/// reduced relation matrix.
#[derive(Clone, Debug)]
pub struct SymbolSpace<F> {
    level: Level,
    weight: usize,
    table: EnTable,
    relations: Vec<Relation>,
    relation_matrix: SparseMat<F>,
    free: Vec<usize>,
    proj: Vec<SparseVec<F>>,
    boundary: BoundaryTarget<F>,
    boundary_rows: Vec<SparseVec<F>>,
    cuspidal: Subspace<F>,
}

struct PreparedTerm<F> {
    point_map: ReducedMat,
    /// image of monomial i under P ↦ s·P|_{h⁻¹}, as monomial coefficients
    images: Vec<Vec<F>>,
}

pub fn build_space<F: Scalar>(level: &Level, weight: usize) -> Result<SymbolSpace<F>> {
    build_space_with(level, weight, relation_generators(level.field))
}

pub fn build_space_with<F: Scalar>(level: &Level, weight: usize, relations: Vec<Relation>) -> Result<SymbolSpace<F>> {
    if weight < 2 {
        return Err(Error::Precondition(format!("weight must be at least 2, got {weight}")));
    }
    if weight % 2 == 1 && level.contains_minus_identity() {
        return Err(Error::Precondition(format!(
            "odd weight {weight} needs −I ∉ Γ₁(n), which fails for n = {}",
            level.generator
        )));
    }
    let f = level.field;
    let table = EnTable::new(level);
    let npts = table.len();
    let ngens = (weight - 1) * npts;

    let mut prepared: Vec<Vec<PreparedTerm<F>>> = Vec::new();
    for rel in &relations {
        let mut terms = Vec::new();
        for (s, h) in &rel.terms {
            let sign = F::from_i64(*s);
            let images = (0..weight - 1)
                .map(|i| {
                    HomPoly::<F>::monomial(weight, i)
                        .slash_inverse(f, h)
                        .map(|p| p.coeffs().iter().map(|c| c.mul(&sign)).collect())
                })
                .collect::<Result<Vec<Vec<F>>>>()?;
            terms.push(PreparedTerm { point_map: table.reduce_mat(h), images });
        }
        prepared.push(terms);
    }

    let rows: Vec<SparseVec<F>> = prepared
        .par_iter()
        .flat_map_iter(|terms| {
            let table = &table;
            (0..weight - 1).flat_map(move |i| {
                (0..npts).map(move |p| {
                    let mut acc = Vec::new();
                    for t in terms {
                        let q = table.act(p, &t.point_map);
                        for (l, c) in t.images[i].iter().enumerate() {
                            if !c.is_zero() {
                                acc.push((l * npts + q, c.clone()));
                            }
                        }
                    }
                    crate::linalg::sv_collect(acc)
                })
            })
        })
        .collect();
    let relation_matrix = SparseMat::from_rows(ngens, rows);

    let mut red = RowReducer::new(ngens);
    for r in relation_matrix.rows_iter() {
        red.add_row(r);
    }
    let ech = red.finish();
    let free = ech.free_columns();
    let mut free_pos = vec![None; ngens];
    for (j, g) in free.iter().enumerate() {
        free_pos[*g] = Some(j);
    }
    let mut proj: Vec<SparseVec<F>> = vec![Vec::new(); ngens];
    for g in &free {
        proj[*g] = vec![(free_pos[*g].unwrap(), F::one())];
    }
    for (r, p) in ech.pivots.iter().enumerate() {
        proj[*p] = ech
            .rref
            .row(r)
            .iter()
            .filter(|(j, _)| *j != *p)
            .map(|(j, x)| (free_pos[*j].expect("reduced rows meet pivots only on the diagonal"), x.neg()))
            .collect();
    }

    let boundary = BoundaryTarget::new(level, weight)?;
    let mut space = SymbolSpace {
        level: level.clone(),
        weight,
        table,
        relations,
        relation_matrix,
        free,
        proj,
        boundary,
        boundary_rows: Vec::new(),
        cuspidal: Subspace::zero(0),
    };
    space.boundary_rows = (0..ngens).map(|g| space.boundary_b(&[(g, F::one())])).collect();
    for row in space.relation_matrix.rows_iter() {
        if !space.boundary_of_generators(row).is_empty() {
            return Err(Error::Verification("the boundary map does not vanish on a relation".into()));
        }
    }
    let cols: Vec<SparseVec<F>> = space.free.iter().map(|g| space.boundary_rows[*g].clone()).collect();
    let bmat = SparseMat::from_columns(space.boundary.len(), cols);
    space.cuspidal = kernel(&bmat);
    Ok(space)
}

impl<F: Scalar> SymbolSpace<F> {
    pub fn level(&self) -> &Level {
        &self.level
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn table(&self) -> &EnTable {
        &self.table
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn relation_matrix(&self) -> &SparseMat<F> {
        &self.relation_matrix
    }

    pub fn num_points(&self) -> usize {
        self.table.len()
    }

    pub fn num_generators(&self) -> usize {
        self.proj.len()
    }

    pub fn generator(&self, g: usize) -> ManinGen {
        let n = self.num_points();
        ManinGen { monomial_index: g / n, point: self.table.point(g % n) }
    }

    pub fn generators(&self) -> Vec<ManinGen> {
        (0..self.num_generators()).map(|g| self.generator(g)).collect()
    }

    pub fn generator_index(&self, monomial_index: usize, point: usize) -> usize {
        monomial_index * self.num_points() + point
    }

    /// dim ℳ_k.
    pub fn dim(&self) -> usize {
        self.free.len()
    }

    pub fn rank_relations(&self) -> usize {
        self.num_generators() - self.dim()
    }

    /// Generators whose images form the quotient basis.
    pub fn basis_generators(&self) -> &[usize] {
        &self.free
    }

    pub fn cuspidal(&self) -> &Subspace<F> {
        &self.cuspidal
    }

    pub fn boundary_target(&self) -> &BoundaryTarget<F> {
        &self.boundary
    }

    /// Quotient coordinates of a single generator.
    pub fn projection(&self, g: usize) -> &SparseVec<F> {
        &self.proj[g]
    }

    /// Quotient coordinates of a formal sum of generators.
    pub fn project(&self, v: &[(usize, F)]) -> SparseVec<F> {
        let mut acc = Vec::new();
        for (g, c) in v {
            acc = sv_axpy(&acc, c, &self.proj[*g]);
        }
        acc
    }

    /// A formal sum of generators representing quotient coordinates x.
    pub fn lift(&self, x: &[(usize, F)]) -> SparseVec<F> {
        let mut v: Vec<(usize, F)> = x.iter().map(|(j, c)| (self.free[*j], c.clone())).collect();
        v.sort_by_key(|(g, _)| *g);
        v
    }

    /// The formal sum P·[point], expanded in monomials.
    pub fn symbol(&self, p: &HomPoly<F>, point: usize) -> SparseVec<F> {
        let n = self.num_points();
        crate::linalg::sv_collect(
            p.coeffs().iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i * n + point, c.clone())),
        )
    }

    /// [P, g] for a matrix with unit determinant, as a formal sum of
    /// generators at the coset of g's bottom row.
    pub fn symbol_of_matrix(&self, p: &HomPoly<F>, g: &Mat2) -> Result<SparseVec<F>> {
        let point = self
            .table
            .point_of_matrix(g)
            .ok_or_else(|| Error::Precondition(format!("bottom row of {g} is not unimodular mod n")))?;
        Ok(self.symbol(p, point))
    }

    /// The map b on formal sums of generators:
    /// P[u, v] ↦ P(1,0)·[v⁻¹ mod (u, n) at c = u] − P(0,1)·[−u⁻¹ mod (v, n) at c = v].
    pub fn boundary_b(&self, x: &[(usize, F)]) -> SparseVec<F> {
        let n = self.num_points();
        let w = self.weight - 2;
        let ring = self.boundary.ring();
        let mut acc = Vec::new();
        for (g, coef) in x {
            let (i, p) = (g / n, g % n);
            let (ui, vi) = self.table.pair(p);
            if i == 0 {
                let m = self.boundary.gcd_index(ui);
                let sub = self.boundary.subring(m);
                let inv = sub.inv(sub.reduce(&ring.elem(vi))).expect("v is a unit modulo (u, n)");
                if let Some((cls, x)) = self.boundary.class_of_key(ui, &sub.elem(inv)) {
                    acc.push((cls, x.mul(coef)));
                }
            }
            if i == w {
                let m = self.boundary.gcd_index(vi);
                let sub = self.boundary.subring(m);
                let inv = sub.inv(sub.reduce(&ring.elem(ui))).expect("u is a unit modulo (v, n)");
                let a = sub.elem(sub.neg(inv));
                if let Some((cls, x)) = self.boundary.class_of_key(vi, &a) {
                    acc.push((cls, x.mul(coef).neg()));
                }
            }
        }
        normalize(acc)
    }

    /// μ(∂[P, g]) = P(1,0)[Γ(a, c)] − P(0,1)[Γ(b, d)].
    pub fn boundary_mu_del(&self, p: &HomPoly<F>, g: &Mat2) -> Result<SparseVec<F>> {
        if p.weight() != self.weight {
            return Err(Error::Precondition("polynomial degree does not match the weight".into()));
        }
        let (one, zero) = (F::one(), F::zero());
        let mut acc = Vec::new();
        self.boundary.accumulate(&mut acc, &p.eval(&one, &zero), &g.a, &g.c);
        self.boundary.accumulate(&mut acc, &p.eval(&zero, &one).neg(), &g.b, &g.d);
        Ok(normalize(acc))
    }

    /// ∂ on formal sums of generators, through the precomputed rows.
    pub fn boundary_of_generators(&self, x: &[(usize, F)]) -> SparseVec<F> {
        let mut acc = Vec::new();
        for (g, c) in x {
            acc = sv_axpy(&acc, c, &self.boundary_rows[*g]);
        }
        acc
    }

    /// ∂ on quotient coordinates.
    pub fn boundary_of_quotient(&self, x: &[(usize, F)]) -> SparseVec<F> {
        self.boundary_of_generators(&self.lift(x))
    }

    /// Whether every relation row vanishes in the quotient.
    pub fn relations_hold(&self) -> bool {
        self.relation_matrix.rows_iter().all(|r| self.project(r).is_empty())
    }

    /// A lift of each E_n point to SL₂(O).
    pub fn lifts(&self) -> Vec<Mat2> {
        (0..self.num_points()).map(|p| lift_to_sl2(&self.table.point(p), &self.level)).collect()
    }

    pub fn to_json(&self, include_relations: bool) -> Value {
        let f = self.level.field;
        let mut v = json!({
            "level": self.level.to_json(),
            "weight": self.weight,
            "num_points": self.num_points(),
            "num_generators": self.num_generators(),
            "relation_rank": self.rank_relations(),
            "dim": self.dim(),
            "cuspidal_dim": self.cuspidal.dim(),
            "boundary": self.boundary.to_json(),
            "basis_generators": self.free.iter().map(|g| {
                let m = self.generator(*g);
                json!({"monomial_index": m.monomial_index, "point": m.point.to_json(f)})
            }).collect::<Vec<_>>(),
            "cuspidal": self.cuspidal.to_json(),
        });
        if include_relations {
            v["relations"] = Value::Array(self.relations.iter().map(|r| r.to_json(f)).collect());
            v["relation_matrix"] = self.relation_matrix.to_json();
        }
        v
    }

    /// Exactness identity on dimensions: dim ℳ = dim 𝒮 + rank ∂ with
    /// rank ∂ = #classes − 1 in weight 2 and #classes otherwise.
    pub fn exactness_holds(&self) -> bool {
        let expected_rank = if self.weight == 2 { self.boundary.len().saturating_sub(1) } else { self.boundary.len() };
        self.dim() == self.cuspidal.dim() + expected_rank
    }
}
