use std::collections::HashMap;
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::int::Int;
use crate::ring::{FieldId, Mat2, QuadInt, ResidueRing};

/// The ideal n ⊂ O, stored through its canonical generator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Level {
    pub field: FieldId,
    pub generator: QuadInt,
    pub norm: Int,
}

impl Level {
    pub fn new(field: FieldId, n: &QuadInt) -> Result<Level> {
        if n.is_zero() {
            return Err(Error::Precondition("the level must be a nonzero ideal".into()));
        }
        let generator = field.canonical(n);
        let norm = field.norm(&generator);
        Ok(Level { field, generator, norm })
    }

    pub fn one(field: FieldId) -> Level {
        Level::new(field, &QuadInt::one()).expect("nonzero")
    }

    /// Parses "d=1,n=2+1w".
    pub fn parse(s: &str) -> Result<Level> {
        let mut d = None;
        let mut n = None;
        for part in s.split(',') {
            let (key, val) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value in level {s:?}")))?;
            match key.trim() {
                "d" => {
                    let v: i64 = val.trim().parse().map_err(|_| Error::Parse(format!("bad d in {s:?}")))?;
                    d = Some(FieldId::new(v)?);
                }
                "n" => n = Some(QuadInt::parse(val.trim())?),
                other => return Err(Error::Parse(format!("unknown level key {other:?}"))),
            }
        }
        let f = d.ok_or_else(|| Error::Parse(format!("level {s:?} lacks d=")))?;
        let n = n.ok_or_else(|| Error::Parse(format!("level {s:?} lacks n=")))?;
        Level::new(f, &n)
    }

    pub fn norm_u64(&self) -> u64 {
        self.norm.to_i64().expect("level norm fits a machine word") as u64
    }

    /// Whether −I lies in Γ₁(n), i.e. n | 2.
    pub fn contains_minus_identity(&self) -> bool {
        self.field.divides(&self.generator, &QuadInt::from_i64(2))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "d": self.field.d(),
            "n": self.generator.to_json(self.field),
            "norm": self.norm.to_string(),
        })
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d={},n={}", self.field.d(), self.generator)
    }
}

/// A unimodular pair (u, v) in (O/n)², both coordinates reduced to the
/// residue box of n.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EnPoint {
    pub u: QuadInt,
    pub v: QuadInt,
}

impl fmt::Display for EnPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u, self.v)
    }
}

impl EnPoint {
    pub fn to_json(&self, f: FieldId) -> Value {
        json!([self.u.to_json(f), self.v.to_json(f)])
    }
}

/// E_n with index arithmetic: points are pairs of residue indices, numbered
/// lexicographically.
#[derive(Clone, Debug)]
pub struct EnTable {
    level: Level,
    ring: ResidueRing,
    pairs: Vec<(u32, u32)>,
    lookup: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl EnTable {
    pub fn new(level: &Level) -> EnTable {
        let f = level.field;
        let ring = ResidueRing::new(f, &level.generator);
        let size = ring.size();
        let mut pairs = Vec::new();
        let mut lookup = vec![ABSENT; size * size];
        // gcd(u, n) for each residue u; (u, v) is unimodular iff v is a unit
        // modulo gcd(u, n).
        let gcds: Vec<QuadInt> = (0..size)
            .map(|i| f.gcd(&ring.elem(i), &level.generator).expect("n ≠ 0"))
            .collect();
        let mut subs: HashMap<QuadInt, ResidueRing> = HashMap::new();
        for ui in 0..size {
            let g = &gcds[ui];
            let sub = subs.entry(g.clone()).or_insert_with(|| ResidueRing::new(f, g));
            for vi in 0..size {
                if sub.is_unit(sub.reduce(&ring.elem(vi))) {
                    lookup[ui * size + vi] = pairs.len() as u32;
                    pairs.push((ui as u32, vi as u32));
                }
            }
        }
        EnTable { level: level.clone(), ring, pairs, lookup }
    }

    pub fn level(&self) -> &Level {
        &self.level
    }

    pub fn ring(&self) -> &ResidueRing {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pair(&self, i: usize) -> (usize, usize) {
        let (u, v) = self.pairs[i];
        (u as usize, v as usize)
    }

    pub fn point(&self, i: usize) -> EnPoint {
        let (u, v) = self.pair(i);
        EnPoint { u: self.ring.elem(u), v: self.ring.elem(v) }
    }

    pub fn points(&self) -> Vec<EnPoint> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    pub fn index_of_pair(&self, u: usize, v: usize) -> Option<usize> {
        let k = self.lookup[u * self.ring.size() + v];
        (k != ABSENT).then_some(k as usize)
    }

    /// Index of the point (u, v) mod n; None if the pair is not unimodular.
    pub fn index_of(&self, u: &QuadInt, v: &QuadInt) -> Option<usize> {
        self.index_of_pair(self.ring.reduce(u), self.ring.reduce(v))
    }

    /// The right action (u, v)·g = (ua + vc, ub + vd).
    pub fn act(&self, i: usize, g: &ReducedMat) -> usize {
        let (u, v) = self.pair(i);
        let r = &self.ring;
        let nu = r.add(r.mul(u, g.0[0]), r.mul(v, g.0[2]));
        let nv = r.add(r.mul(u, g.0[1]), r.mul(v, g.0[3]));
        self.index_of_pair(nu, nv).expect("unimodular matrices preserve E_n")
    }

    /// (u, v)·g for an arbitrary integral g; None if the image is not
    /// unimodular.
    pub fn try_act(&self, i: usize, g: &ReducedMat) -> Option<usize> {
        let (u, v) = self.pair(i);
        let r = &self.ring;
        let nu = r.add(r.mul(u, g.0[0]), r.mul(v, g.0[2]));
        let nv = r.add(r.mul(u, g.0[1]), r.mul(v, g.0[3]));
        self.index_of_pair(nu, nv)
    }

    pub fn reduce_mat(&self, g: &Mat2) -> ReducedMat {
        ReducedMat([
            self.ring.reduce(&g.a),
            self.ring.reduce(&g.b),
            self.ring.reduce(&g.c),
            self.ring.reduce(&g.d),
        ])
    }

    /// Index of the point given by the bottom row of g.
    pub fn point_of_matrix(&self, g: &Mat2) -> Option<usize> {
        self.index_of(&g.c, &g.d)
    }
}

/// Matrix entries reduced to residue indices modulo the level.
#[derive(Clone, Copy, Debug)]
pub struct ReducedMat(pub [usize; 4]);

/// All unimodular pairs in (O/n)², ordered lexicographically by residue index.
pub fn enumerate_en(level: &Level) -> Vec<EnPoint> {
    EnTable::new(level).points()
}

/// Reduced representative of (u, v) ∈ E_n.
pub fn en_normalize(u: &QuadInt, v: &QuadInt, level: &Level) -> Result<EnPoint> {
    let f = level.field;
    let ring = ResidueRing::new(f, &level.generator);
    let (ur, vr) = (ring.elem(ring.reduce(u)), ring.elem(ring.reduce(v)));
    let g = f.gcd(&ur, &level.generator)?;
    let g = if vr.is_zero() { g } else { f.gcd(&g, &vr)? };
    if !f.is_unit(&g) {
        return Err(Error::Precondition(format!("({u}, {v}) is not unimodular modulo {}", level.generator)));
    }
    Ok(EnPoint { u: ur, v: vr })
}

/// A matrix in SL₂(O) whose bottom row reduces to the given point.
pub fn lift_to_sl2(p: &EnPoint, level: &Level) -> Mat2 {
    let f = level.field;
    let n = &level.generator;
    let c = if !p.u.is_zero() {
        p.u.clone()
    } else if f.is_unit(&p.v) {
        QuadInt::zero()
    } else {
        n.clone()
    };
    let coprime = |d: &QuadInt| {
        if c.is_zero() && d.is_zero() {
            return false;
        }
        f.gcd(&c, d).map(|g| f.is_unit(&g)).unwrap_or(false)
    };
    let mut d = None;
    if coprime(&p.v) {
        d = Some(p.v.clone());
    }
    let mut bound = 1u64;
    while d.is_none() {
        for t in f.elements_up_to_norm(bound) {
            let cand = &p.v + &f.mul(&t, n);
            if coprime(&cand) {
                d = Some(cand);
                break;
            }
        }
        bound *= 4;
        assert!(bound < 1 << 40, "no coprime lift found for {p}");
    }
    let d = d.expect("found above");
    let (_, s, t) = f.xgcd(&c, &d).expect("not both zero");
    // s·c + t·d = 1
    let g = Mat2::new(t, -&s, c, d);
    debug_assert!(g.det(f).is_one());
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lvl(d: i64, a: i64, b: i64) -> Level {
        Level::new(FieldId::new(d).unwrap(), &QuadInt::new(a, b)).unwrap()
    }

    #[test]
    fn en_examples() {
        let pts = enumerate_en(&lvl(1, 1, 1));
        assert_eq!(pts.len(), 3);
        let set: Vec<String> = pts.iter().map(|p| p.to_string()).collect();
        assert!(set.contains(&"(0+0w, 1+0w)".to_string()));
        assert!(set.contains(&"(1+0w, 0+0w)".to_string()));
        assert!(set.contains(&"(1+0w, 1+0w)".to_string()));
        assert_eq!(enumerate_en(&lvl(1, 1, 0)).len(), 1);
        assert_eq!(enumerate_en(&lvl(1, 2, 0)).len(), 12);
    }

    #[test]
    fn normalize_examples() {
        let n = lvl(1, 2, 0);
        let p = en_normalize(&QuadInt::new(1, 2), &QuadInt::one(), &n).unwrap();
        assert_eq!(p, EnPoint { u: QuadInt::one(), v: QuadInt::one() });
        assert_eq!(en_normalize(&p.u, &p.v, &n).unwrap(), p);
        assert!(en_normalize(&QuadInt::new(1, 1), &QuadInt::zero(), &n).is_err());
    }

    #[test]
    fn lifts() {
        let n = lvl(1, 2, 1);
        let id = lift_to_sl2(&EnPoint { u: QuadInt::zero(), v: QuadInt::one() }, &n);
        assert_eq!(id, Mat2::identity());
        let s = lift_to_sl2(&EnPoint { u: QuadInt::one(), v: QuadInt::zero() }, &n);
        assert_eq!(s, Mat2::s());
        for lv in [lvl(1, 2, 1), lvl(2, 3, 0), lvl(3, 4, 0), lvl(7, 2, 2), lvl(11, 5, 0)] {
            let t = EnTable::new(&lv);
            for i in 0..t.len() {
                let g = lift_to_sl2(&t.point(i), &lv);
                assert!(g.det(lv.field).is_one());
                assert_eq!(t.point_of_matrix(&g), Some(i));
            }
        }
    }
}
