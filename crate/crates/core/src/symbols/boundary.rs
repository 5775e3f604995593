//! Boundary symbols. A cusp a/c (coprime) is recorded by its orbit key
//! (c mod n, a mod gcd(c, n)). Scaling (a, c) by a unit λ multiplies the
//! class by λ^{2−k}, and so does replacing a by e·a for a unit e (the
//! identification forced by the J relation). A class is zero when these
//! factors are inconsistent.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde_json::{json, Value};

use super::level::Level;
use crate::linalg::{Scalar, SparseVec};
use crate::ring::{FieldId, QuadInt, ResidueRing};

/// The label [a]_m of a boundary class: m = gcd(c, n) and a mod m. With
/// m = (1) the label is the singleton.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoarseLabel {
    pub m: QuadInt,
    pub a: QuadInt,
}

impl fmt::Display for CoarseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.m.is_one() {
            f.write_str("[*]_1")
        } else {
            write!(f, "[{}]_({})", self.a, self.m)
        }
    }
}

/// A boundary class with a representative primitive vector (a, c).
#[derive(Clone, Debug, PartialEq)]
pub struct CuspClass {
    pub a: QuadInt,
    pub c: QuadInt,
    pub label: CoarseLabel,
}

#[derive(Clone, Debug)]
pub struct BoundaryTarget<F> {
    level: Level,
    weight: usize,
    ring: ResidueRing,
    gcd_of: Vec<QuadInt>,
    subrings: HashMap<QuadInt, ResidueRing>,
    /// key (c index, a index in the subring) ↦ (class, coefficient)
    keys: HashMap<(usize, usize), Option<(usize, F)>>,
    classes: Vec<CuspClass>,
    orbit_count: usize,
}

impl<F: Scalar> BoundaryTarget<F> {
    pub fn new(level: &Level, weight: usize) -> crate::error::Result<BoundaryTarget<F>> {
        let f = level.field;
        let ring = ResidueRing::new(f, &level.generator);
        let n = ring.size();
        let gcd_of: Vec<QuadInt> =
            (0..n).map(|i| f.gcd(&ring.elem(i), &level.generator).expect("n ≠ 0")).collect();
        let mut subrings = HashMap::new();
        for g in &gcd_of {
            subrings.entry(g.clone()).or_insert_with(|| ResidueRing::new(f, g));
        }
        let mut t = BoundaryTarget {
            level: level.clone(),
            weight,
            ring,
            gcd_of,
            subrings,
            keys: HashMap::new(),
            classes: Vec::new(),
            orbit_count: 0,
        };
        t.build(f)?;
        Ok(t)
    }

    fn all_keys(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for ci in 0..self.ring.size() {
            let sub = &self.subrings[&self.gcd_of[ci]];
            for ai in 0..sub.size() {
                if sub.is_unit(ai) {
                    out.push((ci, ai));
                }
            }
        }
        out
    }

    fn key_of(&self, a: &QuadInt, c: &QuadInt) -> (usize, usize) {
        let ci = self.ring.reduce(c);
        let sub = &self.subrings[&self.gcd_of[ci]];
        (ci, sub.reduce(a))
    }

    fn build(&mut self, f: FieldId) -> crate::error::Result<()> {
        let w = self.weight as u32 - 2;
        // λ^{2−k} = (λ⁻¹)^{k−2}
        let units: Vec<(QuadInt, F)> = f
            .units()
            .into_iter()
            .map(|u| {
                let inv = f.unit_inverse(&u);
                let c = F::from_quad(f, &f.pow(&inv, w)).ok_or_else(|| {
                    crate::error::Error::Precondition(format!(
                        "weight {} over d={} needs the quadratic coefficient field",
                        self.weight,
                        f.d()
                    ))
                });
                c.map(|c| (u, c))
            })
            .collect::<crate::error::Result<_>>()?;
        let mut coef: HashMap<(usize, usize), (usize, F)> = HashMap::new();
        let mut roots: Vec<((usize, usize), bool)> = Vec::new();
        for key in self.all_keys() {
            if coef.contains_key(&key) {
                continue;
            }
            let root = roots.len();
            let mut consistent = true;
            coef.insert(key, (root, F::one()));
            let mut queue = VecDeque::from([key]);
            while let Some(k) = queue.pop_front() {
                let (_, ck) = coef[&k].clone();
                let c = self.ring.elem(k.0);
                let a = self.subrings[&self.gcd_of[k.0]].elem(k.1);
                for (u, factor) in &units {
                    let moves = [
                        (f.mul(u, &a), f.mul(u, &c)),
                        (f.mul(u, &a), c.clone()),
                    ];
                    for (na, nc) in moves {
                        let nk = self.key_of(&na, &nc);
                        let nc_coef = ck.mul(factor);
                        match coef.get(&nk) {
                            Some((_, existing)) => {
                                if *existing != nc_coef {
                                    consistent = false;
                                }
                            }
                            None => {
                                coef.insert(nk, (root, nc_coef));
                                queue.push_back(nk);
                            }
                        }
                    }
                }
            }
            roots.push((key, consistent));
        }
        self.orbit_count = roots.len();
        let mut class_of_root = vec![None; roots.len()];
        for (r, (key, consistent)) in roots.iter().enumerate() {
            if *consistent {
                class_of_root[r] = Some(self.classes.len());
                let c = self.ring.elem(key.0);
                let g = self.gcd_of[key.0].clone();
                let a = self.subrings[&g].elem(key.1);
                let label = CoarseLabel { m: g, a: a.clone() };
                self.classes.push(CuspClass { a, c, label });
            }
        }
        for (k, (root, c)) in coef {
            self.keys.insert(k, class_of_root[root].map(|cls| (cls, c)));
        }
        Ok(())
    }

    pub fn level(&self) -> &Level {
        &self.level
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    /// Number of nonzero boundary classes.
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Number of orbits of cusps, including those whose class vanishes in
    /// this weight.
    pub fn orbit_count(&self) -> usize {
        self.orbit_count
    }

    pub fn classes(&self) -> &[CuspClass] {
        &self.classes
    }

    /// The class of the primitive vector (a, c) with its coefficient; None
    /// if the class is zero.
    pub fn class_of(&self, a: &QuadInt, c: &QuadInt) -> Option<(usize, F)> {
        self.keys.get(&self.key_of(a, c)).cloned().expect("every primitive vector has a key")
    }

    /// The class of the key (c, a mod gcd(c, n)) given a as a residue in the
    /// box of gcd(c, n).
    pub(crate) fn class_of_key(&self, ci: usize, a: &QuadInt) -> Option<(usize, F)> {
        let sub = &self.subrings[&self.gcd_of[ci]];
        self.keys.get(&(ci, sub.reduce(a))).cloned().expect("every unit residue has a key")
    }

    pub(crate) fn ring(&self) -> &ResidueRing {
        &self.ring
    }

    pub(crate) fn gcd_index(&self, ci: usize) -> &QuadInt {
        &self.gcd_of[ci]
    }

    pub(crate) fn subring(&self, g: &QuadInt) -> &ResidueRing {
        &self.subrings[g]
    }

    pub fn to_json(&self) -> Value {
        let f = self.level.field;
        json!({
            "orbits": self.orbit_count,
            "classes": self.classes.iter().map(|c| json!({
                "a": c.a.to_json(f),
                "c": c.c.to_json(f),
                "label": c.label.to_string(),
            })).collect::<Vec<_>>(),
        })
    }

    /// Adds coef·[class of (a, c)] to acc.
    pub(crate) fn accumulate(&self, acc: &mut Vec<(usize, F)>, coef: &F, a: &QuadInt, c: &QuadInt) {
        if coef.is_zero() {
            return;
        }
        if let Some((cls, x)) = self.class_of(a, c) {
            acc.push((cls, x.mul(coef)));
        }
    }
}

/// Sums duplicate indices and drops zeros.
pub(crate) fn normalize<F: Scalar>(v: Vec<(usize, F)>) -> SparseVec<F> {
    crate::linalg::sv_collect(v)
}
