use serde_json::{json, Value};

use super::cusp::{edge_matrix, Cusp};
use crate::error::{Error, Result};
use crate::ring::{FieldId, Mat2, QuadInt};

/// A Manin relation Σ_j s_j [P|_{h_j⁻¹}, g·h_j] = 0, holding for every P
/// and every g.
#[derive(Clone, Debug, PartialEq)]
pub struct Relation {
    pub name: String,
    pub terms: Vec<(i64, Mat2)>,
}

impl Relation {
    /// I + h + … + h^{order−1}.
    pub fn cyclic(f: FieldId, name: &str, h: &Mat2, order: u32) -> Relation {
        Relation { name: name.into(), terms: (0..order).map(|j| (1, h.pow(f, j))).collect() }
    }

    /// I − h: the symbols [P, g] and [P|_{h⁻¹}, g·h] are identified.
    pub fn identification(name: &str, h: &Mat2) -> Relation {
        Relation { name: name.into(), terms: vec![(1, Mat2::identity()), (-1, h.clone())] }
    }

    /// The relation Σ {α_j, α_{j+1}} = 0 around a closed polygon of cusps
    /// starting 0, ∞, …; consecutive cusps must be adjacent.
    pub fn polygon(f: FieldId, name: &str, cusps: &[Cusp]) -> Result<Relation> {
        if cusps.len() < 2 || cusps[0] != Cusp::zero() || cusps[1] != Cusp::infinity() {
            return Err(Error::Precondition("polygons start with the edge 0 → ∞".into()));
        }
        let mut terms = Vec::with_capacity(cusps.len());
        for j in 0..cusps.len() {
            let h = edge_matrix(&cusps[j], &cusps[(j + 1) % cusps.len()]);
            if !f.is_unit(&h.det(f)) {
                return Err(Error::Precondition(format!(
                    "{} and {} are not adjacent",
                    cusps[j],
                    cusps[(j + 1) % cusps.len()]
                )));
            }
            terms.push((1, h));
        }
        Ok(Relation { name: name.into(), terms })
    }

    pub fn to_json(&self, f: FieldId) -> Value {
        json!({
            "name": self.name,
            "terms": self.terms.iter().map(|(s, h)| json!({"sign": s, "matrix": h.to_json(f)})).collect::<Vec<_>>(),
        })
    }
}

/// Closed cusp polygons supplying the relations beyond S, TS and J. Each
/// list starts with the edge 0 → ∞.
fn extra_polygons(d: i64) -> &'static [&'static [&'static str]] {
    match d {
        2 => &[&["0", "oo", "-w", "1/w"]],
        7 => &[&["0", "oo", "-1+w", "-1/w"]],
        11 => &[&["0", "oo", "-1+w", "-2/w", "-1+w/2", "-1/w"]],
        _ => &[],
    }
}

/// J = diag(ε, 1) with ε a generator of the unit group.
pub fn j_matrix(f: FieldId) -> Mat2 {
    Mat2::new(f.unit_generator(), QuadInt::zero(), QuadInt::zero(), QuadInt::one())
}

/// The extra d = 1 matrix X = [[i, 1], [1, 0]].
pub fn x_matrix() -> Mat2 {
    Mat2::new(QuadInt::omega(), QuadInt::one(), QuadInt::one(), QuadInt::zero())
}

/// The relations generating the relation ideal for the field.
pub fn relation_generators(f: FieldId) -> Vec<Relation> {
    let mut out = vec![
        Relation::cyclic(f, "S", &Mat2::s(), 2),
        Relation::cyclic(f, "TS", &Mat2::ts(), 3),
        Relation::identification("J", &j_matrix(f)),
    ];
    if f.d() == 1 {
        out.push(Relation::cyclic(f, "X", &x_matrix(), 3));
    }
    for (i, poly) in extra_polygons(f.d()).iter().enumerate() {
        let cusps: Vec<Cusp> = poly.iter().map(|s| Cusp::parse(f, s).expect("valid table entry")).collect();
        out.push(Relation::polygon(f, &format!("P{}", i + 1), &cusps).expect("valid table entry"));
    }
    out
}
