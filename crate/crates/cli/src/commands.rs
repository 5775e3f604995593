use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde_json::{json, Value};

use bianchi_core::fourier::{
    automorphy_residual, check_eigen_consistency, eigenfunctional, eval_series, fourier_coefficients_with,
    FourierTable, H3Point, KernelPhase, SeedElement,
};
use bianchi_core::hecke::{commute_check, eigensystems, hecke_on_manin, hecke_oracle, HeckeOperator, ORACLE_BUDGET};
use bianchi_core::heilbronn::{generate_with, FamilyCache};
use bianchi_core::linalg::{QuadRat, Scalar, Q};
use bianchi_core::ring::{FieldId, Mat2, QuadInt, ResidueConvention};
use bianchi_core::symbols::{build_space, Level, SymbolSpace};

use crate::{CliError, CliResult, LevelArgs};

pub fn cache(dir: Option<&Path>) -> CliResult<Option<FamilyCache>> {
    Ok(match dir {
        Some(d) => Some(FamilyCache::new(d)?),
        None => None,
    })
}

pub fn level(a: &LevelArgs) -> CliResult<Level> {
    let f = FieldId::new(a.d)?;
    Ok(Level::new(f, &QuadInt::parse(&a.level)?)?)
}

fn eta_list(s: &str) -> CliResult<Vec<QuadInt>> {
    let out = s.split(',').map(|e| QuadInt::parse(e.trim())).collect::<Result<Vec<_>, _>>()?;
    if out.is_empty() {
        return Err(CliError::Input("empty η list".into()));
    }
    Ok(out)
}

fn convention(s: &str) -> CliResult<ResidueConvention> {
    match s {
        "canonical" => Ok(ResidueConvention::Canonical),
        "alternate" => Ok(ResidueConvention::Alternate),
        _ => Err(CliError::Input(format!("unknown convention {s:?} (canonical | alternate)"))),
    }
}

fn space_report<F: Scalar>(lv: &Level, k: usize, relations: bool) -> CliResult<Value> {
    let s: SymbolSpace<F> = build_space(lv, k)?;
    let mut v = s.to_json(relations);
    v["en_size"] = json!(s.num_points());
    v["num_boundary_classes"] = json!(s.boundary_target().len());
    v["exactness_holds"] = json!(s.exactness_holds());
    v["coefficients"] = json!(if k == 2 { "Q" } else { "K" });
    Ok(v)
}

pub fn space(a: &LevelArgs, relations: bool) -> CliResult<Value> {
    let lv = level(a)?;
    if a.weight == 2 {
        space_report::<Q>(&lv, 2, relations)
    } else {
        space_report::<QuadRat>(&lv, a.weight, relations)
    }
}

pub fn heilbronn(d: i64, eta: &str, verify: bool, conv: &str, cache: Option<&FamilyCache>) -> CliResult<Value> {
    let f = FieldId::new(d)?;
    let eta = QuadInt::parse(eta)?;
    let conv = convention(conv)?;
    let fam = match cache {
        Some(c) => c.get(f, &eta, conv)?,
        None => generate_with(f, &eta, conv)?,
    };
    if !verify {
        return Ok(fam.to_json(None));
    }
    fam.check_invariants()?;
    let cert = fam.verify_c_delta()?;
    let v = fam.to_json(Some(&cert));
    if !cert.ok() {
        return Err(CliError::Verification(format!("C_Δ fails in classes {:?}", cert.failures()), Some(v)));
    }
    Ok(v)
}

fn hecke_report<F: Scalar>(lv: &Level, k: usize, etas: &[QuadInt], oracle: bool, others: &[QuadInt]) -> CliResult<Value> {
    let s: SymbolSpace<F> = build_space(lv, k)?;
    let ops = etas.iter().map(|e| hecke_on_manin(&s, e)).collect::<Result<Vec<HeckeOperator<F>>, _>>()?;
    let mut failures = Vec::new();
    let mut oracle_rows = Vec::new();
    if oracle {
        for t in &ops {
            let o = hecke_oracle(&s, &t.eta, ORACLE_BUDGET)?;
            let equal = o.matrix == t.matrix;
            if !equal {
                failures.push(format!("T_{} differs from the oracle", t.eta));
            }
            oracle_rows.push(json!({"eta": t.eta.to_string(), "equal": equal, "representatives": oracle_size(lv, &t.eta)?}));
        }
    }
    let mut commute_rows = Vec::new();
    for e in others {
        let other = hecke_on_manin(&s, e)?;
        for t in &ops {
            let c = commute_check(t, &other)?;
            if !c.ok() {
                failures.push(format!("T_{} and T_{} do not commute", t.eta, e));
            }
            commute_rows.push(json!({"eta": t.eta.to_string(), "with": e.to_string(), "full": c.full, "cuspidal": c.cuspidal}));
        }
    }
    let v = json!({
        "level": lv.to_json(),
        "weight": k,
        "dim": s.dim(),
        "cuspidal_dim": s.cuspidal().dim(),
        "operators": ops.iter().map(|t| t.to_json(&s)).collect::<Vec<_>>(),
        "oracle": oracle_rows,
        "commute": commute_rows,
    });
    if failures.is_empty() {
        Ok(v)
    } else {
        Err(CliError::Verification(failures.join("; "), Some(v)))
    }
}

fn oracle_size(lv: &Level, eta: &QuadInt) -> CliResult<usize> {
    Ok(bianchi_core::hecke::oracle_representatives(lv, eta)?.len())
}

pub fn hecke(a: &LevelArgs, eta: &str, oracle: bool, commute_with: Option<&str>) -> CliResult<Value> {
    let lv = level(a)?;
    let etas = eta_list(eta)?;
    let others = match commute_with {
        Some(s) => eta_list(s)?,
        None => Vec::new(),
    };
    if a.weight == 2 {
        hecke_report::<Q>(&lv, 2, &etas, oracle, &others)
    } else {
        hecke_report::<QuadRat>(&lv, a.weight, &etas, oracle, &others)
    }
}

fn weight_two(a: &LevelArgs, what: &str) -> CliResult<()> {
    if a.weight != 2 {
        return Err(CliError::Input(format!("{what} is implemented for weight 2 only, got --weight {}", a.weight)));
    }
    Ok(())
}

fn hecke_etas(lv: &Level, max_norm: u64, explicit: Option<&str>) -> CliResult<Vec<QuadInt>> {
    let f = lv.field;
    match explicit {
        Some(s) => eta_list(s),
        None => Ok(f
            .ideals_up_to_norm(max_norm)
            .into_iter()
            .filter(|e| !e.is_one() && f.gcd(e, &lv.generator).map(|g| f.is_unit(&g)).unwrap_or(false))
            .collect()),
    }
}

pub fn eigen(a: &LevelArgs, max_norm: u64, eta: Option<&str>) -> CliResult<Value> {
    weight_two(a, "eigen")?;
    let lv = level(a)?;
    let s: SymbolSpace<Q> = build_space(&lv, 2)?;
    let etas = hecke_etas(&lv, max_norm, eta)?;
    let mut v = eigensystems(&s, &etas)?.to_json();
    v["cuspidal_dim"] = json!(s.cuspidal().dim());
    Ok(v)
}

pub fn fourier(
    a: &LevelArgs,
    bound: u64,
    max_norm: u64,
    system: Option<&str>,
    cache: Option<&FamilyCache>,
) -> CliResult<Value> {
    weight_two(a, "the Fourier expansion")?;
    let lv = level(a)?;
    let s: SymbolSpace<Q> = build_space(&lv, 2)?;
    let table = eigensystems(&s, &hecke_etas(&lv, max_norm, None)?)?;
    let sys = match system {
        Some(label) => table.systems.iter().find(|x| x.label == label),
        None => table.systems.iter().find(|x| x.dim() == 1).or(table.systems.first()),
    }
    .ok_or_else(|| CliError::Input(format!("no rational eigensystem{} at {lv}", system.map(|l| format!(" {l}")).unwrap_or_default())))?;
    let phi = eigenfunctional(&s, sys)?;
    let seed = SeedElement::from_quotient(&s, &sys.vectors[0])?;
    eprintln!("tabulating a_α for N(α) ≤ {bound} at {lv}");
    let t = fourier_coefficients_with(&s, &phi, &seed, bound, cache)?;
    let consistency = check_eigen_consistency(&t, sys);
    let mut v = t.to_json();
    v["system"] = json!({
        "label": sys.label,
        "eigenvalues": sys.eigenvalues.iter().map(|(e, l)| json!({"eta": e.to_string(), "lambda": l.to_string()})).collect::<Vec<_>>(),
    });
    v["seed"] = seed.to_json(&s);
    v["eigen_consistency"] = json!(consistency.iter().map(|(e, ok)| json!({"eta": e.to_string(), "ok": ok})).collect::<Vec<_>>());
    if consistency.iter().any(|(_, ok)| !ok) {
        return Err(CliError::Verification("a_η ≠ λ_η·a₁ for some η".into(), Some(v)));
    }
    Ok(v)
}

fn load_table(p: &Path) -> CliResult<FourierTable> {
    let text = std::fs::read_to_string(p).map_err(|e| CliError::Input(format!("cannot read {}: {e}", p.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
    Ok(FourierTable::from_json(&v)?)
}

fn point(z: &str, t: f64) -> CliResult<H3Point> {
    let z = Complex64::from_str(z.trim()).map_err(|_| CliError::Input(format!("cannot parse z = {z:?} (expected x+yi)")))?;
    Ok(H3Point::new(z, t)?)
}

pub fn eval(table: &Path, z: &str, t: f64, phase: &str) -> CliResult<Value> {
    let tab = load_table(table)?;
    let w = point(z, t)?;
    let phase = KernelPhase::parse(phase)?;
    let v = eval_series(&tab, &w, phase);
    Ok(json!({"point": w.to_json(), "phase": phase.name(), "norm_bound": tab.norm_bound, "F": v.to_json()}))
}

fn parse_gamma(s: &str) -> CliResult<Mat2> {
    let e = s.split(',').map(|x| QuadInt::parse(x.trim())).collect::<Result<Vec<_>, _>>()?;
    match <[QuadInt; 4]>::try_from(e) {
        Ok([a, b, c, d]) => Ok(Mat2::new(a, b, c, d)),
        Err(_) => Err(CliError::Input(format!("γ needs four entries \"a,b,c,d\", got {s:?}"))),
    }
}

pub fn verify_automorphy(table: &Path, gamma: &str, z: &str, t: f64, phase: &str) -> CliResult<Value> {
    let tab = load_table(table)?;
    let g = parse_gamma(gamma)?;
    let w = point(z, t)?;
    let phase = KernelPhase::parse(phase)?;
    let r = automorphy_residual(&tab, &g, &w, phase)?;
    let mut v = r.to_json();
    v["gamma"] = json!(g.to_strings());
    v["point"] = w.to_json();
    v["phase"] = json!(phase.name());
    if !r.within_budget() {
        return Err(CliError::Verification(format!("residual {:e} exceeds budget {:e}", r.residual, r.budget), Some(v)));
    }
    Ok(v)
}
