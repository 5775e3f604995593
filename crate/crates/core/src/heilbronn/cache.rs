use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::{generate_with, HBMatrix, HeilbronnFamily};
use crate::error::{Error, Result};
use crate::ring::{FieldId, Mat2, QuadInt, ResidueConvention};

/// On-disk store of Heilbronn families keyed by (d, canonical η, residue
/// convention). The family of an associate u·η₀ is diag(1, u)·𝒳_{η₀}.
#[derive(Clone, Debug)]
pub struct FamilyCache {
    dir: PathBuf,
}

impl FamilyCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<FamilyCache> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(FamilyCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, f: FieldId, eta0: &QuadInt, conv: ResidueConvention) -> PathBuf {
        let tag = match conv {
            ResidueConvention::Canonical => "c",
            ResidueConvention::Alternate => "a",
        };
        self.dir.join(format!("heilbronn-d{}-{}_{}-{}.json", f.d(), eta0.a, eta0.b, tag))
    }

    /// Loads the family for η, generating and storing it on a miss.
    pub fn get(&self, f: FieldId, eta: &QuadInt, conv: ResidueConvention) -> Result<HeilbronnFamily> {
        let (eta0, u) = f.canonical_associate(eta);
        let path = self.path(f, &eta0, conv);
        let base = match fs::read_to_string(&path) {
            Ok(text) => decode(f, &eta0, &serde_json::from_str(&text)?)?,
            Err(_) => {
                let fam = generate_with(f, &eta0, conv)?;
                let tmp = path.with_extension("tmp");
                fs::write(&tmp, serde_json::to_string(&encode(&fam))?)?;
                fs::rename(&tmp, &path)?;
                fam
            }
        };
        Ok(if u.is_one() { base } else { base.times_unit(&u) })
    }
}

fn encode(fam: &HeilbronnFamily) -> Value {
    json!({
        "d": fam.field().d(),
        "eta": fam.eta().to_string(),
        "matrices": fam.matrices().iter().map(|hb| json!([
            hb.m.a.to_string(), hb.m.b.to_string(), hb.m.c.to_string(), hb.m.d.to_string(),
            hb.delta.to_string(), hb.beta.to_string(), hb.index,
        ])).collect::<Vec<_>>(),
    })
}

fn decode(f: FieldId, eta0: &QuadInt, v: &Value) -> Result<HeilbronnFamily> {
    let bad = || Error::Parse("malformed Heilbronn cache entry".into());
    if v.get("d").and_then(Value::as_i64) != Some(f.d()) || v.get("eta").and_then(Value::as_str) != Some(&eta0.to_string()) {
        return Err(bad());
    }
    let mut members = Vec::new();
    for row in v.get("matrices").and_then(Value::as_array).ok_or_else(bad)? {
        let row = row.as_array().filter(|r| r.len() == 7).ok_or_else(bad)?;
        let e = |i: usize| -> Result<QuadInt> { QuadInt::parse(row[i].as_str().ok_or_else(bad)?) };
        members.push(HBMatrix {
            m: Mat2::new(e(0)?, e(1)?, e(2)?, e(3)?),
            delta: e(4)?,
            beta: e(5)?,
            index: row[6].as_u64().ok_or_else(bad)? as usize,
        });
    }
    let fam = HeilbronnFamily::from_members(f, eta0.clone(), members)?;
    fam.check_invariants()?;
    Ok(fam)
}
