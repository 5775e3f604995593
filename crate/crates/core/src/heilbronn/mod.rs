//! Heilbronn–Merel families: determinant-η matrices from continued-fraction
//! chains, their right SL₂(O)-coset classes and the telescoping certificate.

mod cache;

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde_json::{json, Value};

pub use cache::FamilyCache;

use crate::error::{Error, Result};
use crate::ring::{FieldId, Mat2, QuadInt, ResidueConvention};
use crate::symbols::Cusp;

/// M̃ = adj(M), so that M·M̃ = det(M)·I.
pub fn shimura_tilde(m: &Mat2) -> Mat2 {
    m.adj()
}

/// A family member with the seed (δ, β) and the position of the matrix in
/// its chain (M₁ has index 1).
#[derive(Clone, Debug, PartialEq)]
pub struct HBMatrix {
    pub m: Mat2,
    pub delta: QuadInt,
    pub beta: QuadInt,
    pub index: usize,
}

#[derive(Clone, Debug)]
pub struct HeilbronnFamily {
    field: FieldId,
    eta: QuadInt,
    matrices: Vec<HBMatrix>,
    classes: Vec<Vec<usize>>,
    /// matrices dropped because an earlier seed produced them already
    collisions: usize,
}

/// The telescoped sum Σ_{M∈C}([M∞] − [M0]) of one class.
#[derive(Clone, Debug)]
pub struct ClassCertificate {
    pub class: usize,
    pub chain: Vec<(Cusp, i64)>,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub classes: Vec<ClassCertificate>,
    pub collisions: usize,
}

impl Certificate {
    pub fn ok(&self) -> bool {
        self.classes.iter().all(|c| c.ok)
    }

    pub fn failures(&self) -> Vec<usize> {
        self.classes.iter().filter(|c| !c.ok).map(|c| c.class).collect()
    }

    pub fn to_json(&self, f: FieldId) -> Value {
        json!({
            "ok": self.ok(),
            "collisions": self.collisions,
            "classes": self.classes.iter().map(|c| json!({
                "class": c.class,
                "ok": c.ok,
                "chain": c.chain.iter().map(|(p, k)| json!({"cusp": p.to_string(), "coef": k, "cusp_json": p.to_json(f)})).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// The chain seeded by (δ, β): M₁ = [[δ, β], [0, η/δ]] and
/// M_{i+1} = M_i·[[0, −1], [1, q_i]] until the top-right entry vanishes.
pub fn chain(f: FieldId, eta: &QuadInt, delta: &QuadInt, beta: &QuadInt) -> Result<Vec<Mat2>> {
    let y1 = f
        .div_exact(eta, delta)
        .ok_or_else(|| Error::Precondition(format!("{delta} does not divide {eta}")))?;
    let (mut x0, mut x1) = (delta.clone(), beta.clone());
    let (mut y0, mut y1) = (QuadInt::zero(), y1);
    let mut out = vec![Mat2::new(x0.clone(), x1.clone(), y0.clone(), y1.clone())];
    let eps = f.epsilon();
    while !x1.is_zero() {
        let (q, _) = f.euclid_div(&x0, &x1)?;
        let x2 = &f.mul(&x1, &q) - &x0;
        let y2 = &f.mul(&y1, &q) - &y0;
        let (n1, n2) = (f.norm(&x1).to_bigint(), f.norm(&x2).to_bigint());
        if num_rational::BigRational::from_integer(n2) > eps.clone() * num_rational::BigRational::from_integer(n1) {
            return Err(Error::Verification(format!(
                "chain for (δ, β) = ({delta}, {beta}) does not contract at x = {x1}"
            )));
        }
        x0 = std::mem::replace(&mut x1, x2);
        y0 = std::mem::replace(&mut y1, y2);
        out.push(Mat2::new(x0.clone(), x1.clone(), y0.clone(), y1.clone()));
    }
    for m in &out {
        check_member(f, eta, m)?;
    }
    Ok(out)
}

fn check_member(f: FieldId, eta: &QuadInt, m: &Mat2) -> Result<()> {
    let bad = |why: &str| Err(Error::Verification(format!("Heilbronn matrix {m} for η = {eta}: {why}")));
    if m.det(f) != *eta {
        return bad("determinant differs from η");
    }
    if f.norm(&m.a) <= f.norm(&m.b) {
        return bad("N(a) > N(b) fails");
    }
    if f.norm(&m.d) <= f.norm(&m.c) {
        return bad("N(d) > N(c) fails");
    }
    Ok(())
}

/// Whether M and M′ (both of determinant η) lie in the same right coset
/// M·SL₂(O): (1/η)·adj(M′)·M must be integral.
pub fn same_class(f: FieldId, eta: &QuadInt, m: &Mat2, m2: &Mat2) -> bool {
    let p = shimura_tilde(m2).mul(f, m);
    p.entries().iter().all(|x| f.divides(eta, x))
}

/// A canonical key for the coset M·SL₂(O): the column Hermite form
/// [[g, 0], [x, y]] with g a canonical associate and x reduced modulo y.
pub fn class_key(f: FieldId, m: &Mat2) -> Result<(QuadInt, QuadInt)> {
    let (mut a, mut b, mut c, mut d) = (m.a.clone(), m.b.clone(), m.c.clone(), m.d.clone());
    while !b.is_zero() {
        let (q, _) = f.euclid_div(&a, &b)?;
        // columns (col1 − q·col2, col2), then (col2, −col1)
        let na = &a - &f.mul(&q, &b);
        let nc = &c - &f.mul(&q, &d);
        (a, b, c, d) = (b, -na, d, -nc);
    }
    if a.is_zero() {
        return Err(Error::Precondition(format!("{m} is singular")));
    }
    let (g, u) = f.canonical_associate(&a);
    // a = u·g: scale column 1 by u⁻¹ and column 2 by u
    let x = f.mul(&c, &f.unit_inverse(&u));
    let y = f.mul(&d, &u);
    let (_, r) = f.euclid_div(&x, &y)?;
    Ok((g, r))
}

/// 𝒳_η with the default residue convention.
pub fn generate(f: FieldId, eta: &QuadInt) -> Result<HeilbronnFamily> {
    generate_with(f, eta, ResidueConvention::Canonical)
}

pub fn generate_with(f: FieldId, eta: &QuadInt, conv: ResidueConvention) -> Result<HeilbronnFamily> {
    generate_with_residues(f, eta, &|delta: &QuadInt| f.residues_below_with(delta, conv))
}

/// 𝒳_η with caller-supplied residue systems S_δ. Each S_δ must be a complete
/// system of residues modulo δ of norm below N(δ).
pub fn generate_with_residues(
    f: FieldId,
    eta: &QuadInt,
    residues: &(dyn Fn(&QuadInt) -> Result<Vec<QuadInt>> + Sync),
) -> Result<HeilbronnFamily> {
    if eta.is_zero() {
        return Err(Error::Precondition("Heilbronn family for η = 0 requested".into()));
    }
    let mut seeds = Vec::new();
    for delta in f.divisors_up_to_units(eta)? {
        let s = residues(&delta)?;
        if s.len() as u64 != f.norm(&delta).to_i64().unwrap_or(-1) as u64 {
            return Err(Error::Precondition(format!("residue system modulo {delta} has the wrong size")));
        }
        for beta in s {
            if f.norm(&beta) >= f.norm(&delta) {
                return Err(Error::Precondition(format!("residue {beta} is not below {delta}")));
            }
            seeds.push((delta.clone(), beta));
        }
    }
    let chains: Vec<Result<Vec<Mat2>>> = seeds.par_iter().map(|(d, b)| chain(f, eta, d, b)).collect();
    let mut members = Vec::new();
    for ((delta, beta), ch) in seeds.iter().zip(chains) {
        for (i, m) in ch?.into_iter().enumerate() {
            members.push(HBMatrix { m, delta: delta.clone(), beta: beta.clone(), index: i + 1 });
        }
    }
    HeilbronnFamily::from_members(f, eta.clone(), members)
}

/// Number of coset classes of 𝒳_π for a prime π; equals N(π) + 1.
pub fn class_count_prime(f: FieldId, pi: &QuadInt) -> Result<usize> {
    if !f.is_prime(pi) {
        return Err(Error::Precondition(format!("{pi} is not prime in d={}", f.d())));
    }
    Ok(generate(f, pi)?.classes().len())
}

impl HeilbronnFamily {
    /// Builds a family from explicit members (deduplicated, first occurrence
    /// kept) and partitions it into classes.
    pub fn from_members(f: FieldId, eta: QuadInt, members: Vec<HBMatrix>) -> Result<HeilbronnFamily> {
        let mut seen: HashMap<Mat2Key, ()> = HashMap::new();
        let mut matrices = Vec::with_capacity(members.len());
        let mut collisions = 0;
        for hb in members {
            if seen.insert(Mat2Key::of(&hb.m), ()).is_some() {
                collisions += 1;
            } else {
                matrices.push(hb);
            }
        }
        let mut by_key: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut key_index: HashMap<(QuadInt, QuadInt), usize> = HashMap::new();
        for (i, hb) in matrices.iter().enumerate() {
            let k = class_key(f, &hb.m)?;
            let next = key_index.len();
            let c = *key_index.entry(k).or_insert(next);
            by_key.entry(c).or_default().push(i);
        }
        Ok(HeilbronnFamily { field: f, eta, matrices, classes: by_key.into_values().collect(), collisions })
    }

    pub fn field(&self) -> FieldId {
        self.field
    }

    pub fn eta(&self) -> &QuadInt {
        &self.eta
    }

    pub fn matrices(&self) -> &[HBMatrix] {
        &self.matrices
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn collisions(&self) -> usize {
        self.collisions
    }

    /// The family for u·η, obtained as diag(1, u)·𝒳_η.
    pub fn times_unit(&self, u: &QuadInt) -> HeilbronnFamily {
        let f = self.field;
        let matrices = self
            .matrices
            .iter()
            .map(|hb| HBMatrix {
                m: Mat2::new(hb.m.a.clone(), hb.m.b.clone(), f.mul(u, &hb.m.c), f.mul(u, &hb.m.d)),
                delta: hb.delta.clone(),
                beta: hb.beta.clone(),
                index: hb.index,
            })
            .collect();
        HeilbronnFamily {
            field: f,
            eta: f.mul(u, &self.eta),
            matrices,
            classes: self.classes.clone(),
            collisions: self.collisions,
        }
    }

    /// Checks the HBMatrix invariants of every member.
    pub fn check_invariants(&self) -> Result<()> {
        for hb in &self.matrices {
            check_member(self.field, &self.eta, &hb.m)?;
        }
        Ok(())
    }

    /// The condition C_Δ class by class.
    pub fn verify_c_delta(&self) -> Result<Certificate> {
        let f = self.field;
        let target = vec![(Cusp::infinity(), 1), (Cusp::zero(), -1)];
        let mut classes = Vec::with_capacity(self.classes.len());
        for (ci, members) in self.classes.iter().enumerate() {
            let mut sum: HashMap<Cusp, i64> = HashMap::new();
            for &i in members {
                let m = &self.matrices[i].m;
                *sum.entry(Cusp::new(f, &m.a, &m.c)?).or_default() += 1;
                *sum.entry(Cusp::new(f, &m.b, &m.d)?).or_default() -= 1;
            }
            let mut chain: Vec<(Cusp, i64)> = sum.into_iter().filter(|(_, k)| *k != 0).collect();
            chain.sort_by(|x, y| x.1.cmp(&y.1).reverse().then_with(|| x.0.to_string().cmp(&y.0.to_string())));
            let ok = chain == target;
            classes.push(ClassCertificate { class: ci, chain, ok });
        }
        Ok(Certificate { classes, collisions: self.collisions })
    }

    /// Like `verify_c_delta` but fails on the first bad class.
    pub fn certify(&self) -> Result<Certificate> {
        let cert = self.verify_c_delta()?;
        if let Some(c) = cert.classes.iter().find(|c| !c.ok) {
            return Err(Error::Verification(format!(
                "C_Δ fails for η = {} in class {} ({} members)",
                self.eta,
                c.class,
                self.classes[c.class].len()
            )));
        }
        Ok(cert)
    }

    pub fn to_json(&self, certificate: Option<&Certificate>) -> Value {
        let f = self.field;
        let mut v = json!({
            "d": f.d(),
            "eta": self.eta.to_string(),
            "num_matrices": self.matrices.len(),
            "num_classes": self.classes.len(),
            "collisions": self.collisions,
            "matrices": self.matrices.iter().map(|hb| json!({
                "matrix": hb.m.to_strings(),
                "delta": hb.delta.to_string(),
                "beta": hb.beta.to_string(),
                "index": hb.index,
            })).collect::<Vec<_>>(),
            "classes": self.classes,
        });
        if let Some(c) = certificate {
            v["certificate"] = c.to_json(f);
        }
        v
    }
}

/// Hashable form of a matrix for deduplication.
#[derive(PartialEq, Eq, Hash)]
struct Mat2Key([QuadInt; 4]);

impl Mat2Key {
    fn of(m: &Mat2) -> Mat2Key {
        Mat2Key([m.a.clone(), m.b.clone(), m.c.clone(), m.d.clone()])
    }
}
