//! Acceptance suite: one PASS/FAIL line per criterion, each with its own
//! oracle and time limit. Exits non-zero if any criterion fails.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use bianchi_core::fourier::*;
use bianchi_core::hecke::*;
use bianchi_core::heilbronn::{generate, HeilbronnFamily};
use bianchi_core::linalg::{int_to_rational, kernel, Scalar, SparseMat, SparseVec, Q};
use bianchi_core::ring::{FieldId, Mat2, QuadInt};
use bianchi_core::symbols::{build_space, enumerate_en, Cusp, HomPoly, Level, SymbolSpace};
use num_complex::Complex64 as C;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Check = Result<String, String>;

fn q(a: i64, b: i64) -> QuadInt {
    QuadInt::new(a, b)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn norm_i64(f: FieldId, x: &QuadInt) -> i64 {
    f.norm(x).to_i64().unwrap()
}

fn coprime(f: FieldId, a: &QuadInt, n: &QuadInt) -> bool {
    f.is_unit(&f.gcd(a, n).unwrap())
}

// ---------------------------------------------------------------- 1

/// (x + yω)·(u + vω) with ω² = tω − m, on machine integers.
fn small_mul(t: i64, m: i64, (x, y): (i64, i64), (u, v): (i64, i64)) -> (i64, i64) {
    (x * u - m * y * v, x * v + y * u + t * y * v)
}

fn small_norm(t: i64, m: i64, (x, y): (i64, i64)) -> i64 {
    x * x + t * x * y + m * y * y
}

fn euclidean_contract() -> Check {
    let mut rng = StdRng::seed_from_u64(0x00e0_c11d);
    let mut random = 0;
    let mut exhaustive = 0;
    for f in FieldId::all() {
        let eps = f.epsilon();
        ensure(eps < Q::one(), || format!("ε_{} = {eps} is not below 1", f.d()))?;
        for _ in 0..10_000 {
            let a = q(rng.random_range(-1_000_000..=1_000_000), rng.random_range(-1_000_000..=1_000_000));
            let b = loop {
                let b = q(rng.random_range(-1000..=1000), rng.random_range(-1000..=1000));
                if !b.is_zero() {
                    break b;
                }
            };
            let (quo, r) = f.euclid_div(&a, &b).map_err(err)?;
            ensure(&f.mul(&quo, &b) + &r == a, || format!("d={}: {a} ≠ {quo}·{b} + {r}", f.d()))?;
            let lhs = int_to_rational(&f.norm(&r));
            let rhs = eps.clone() * int_to_rational(&f.norm(&b));
            ensure(lhs <= rhs, || format!("d={}: N({r}) > ε·N({b}) for a = {a}", f.d()))?;
            random += 1;
        }
        let (t, m) = (f.omega_trace(), f.omega_norm());
        let (wr, wi) = f.omega_complex();
        for _ in 0..500 {
            let a = (rng.random_range(-20..=20i64), rng.random_range(-20..=20i64));
            let b = loop {
                let b = (rng.random_range(-6..=6i64), rng.random_range(-6..=6i64));
                if b != (0, 0) {
                    break b;
                }
            };
            // a/b as a complex number, then in the {1, ω} basis
            let za = C::new(a.0 as f64 + a.1 as f64 * wr, a.1 as f64 * wi);
            let zb = C::new(b.0 as f64 + b.1 as f64 * wr, b.1 as f64 * wi);
            let z = za / zb;
            let y0 = (z.im / wi).round() as i64;
            let x0 = (z.re - y0 as f64 * wr).round() as i64;
            let mut best: Option<(i64, (i64, i64))> = None;
            for x in x0 - 3..=x0 + 3 {
                for y in y0 - 3..=y0 + 3 {
                    let qb = small_mul(t, m, (x, y), b);
                    let n = small_norm(t, m, (a.0 - qb.0, a.1 - qb.1));
                    if best.map_or(true, |(bn, bq)| n < bn || (n == bn && (x, y) < bq)) {
                        best = Some((n, (x, y)));
                    }
                }
            }
            let (bn, (bx, by)) = best.unwrap();
            ensure(bn < small_norm(t, m, b), || format!("d={}: no quotient found for {a:?}/{b:?}", f.d()))?;
            let (quo, _) = f.euclid_div(&q(a.0, a.1), &q(b.0, b.1)).map_err(err)?;
            ensure(quo == q(bx, by), || {
                format!("d={}: {a:?}/{b:?} gives {quo}, exhaustive search gives {bx}+{by}w", f.d())
            })?;
            exhaustive += 1;
        }
    }
    Ok(format!("{random} random divisions within ε_d, {exhaustive} quotients equal the exhaustive search"))
}

// ---------------------------------------------------------------- 2

/// Representatives of O/n found by brute force: the first of each
/// congruence class among x + yω with 0 ≤ x, y < N(n).
fn residues_brute(f: FieldId, n: &QuadInt) -> Vec<QuadInt> {
    let nn = norm_i64(f, n);
    let mut reps: Vec<QuadInt> = Vec::new();
    for x in 0..nn {
        for y in 0..nn {
            let z = q(x, y);
            if !reps.iter().any(|r| f.divides(n, &(&z - r))) {
                reps.push(z);
            }
        }
    }
    reps
}

fn en_counting() -> Check {
    let mut levels = 0;
    for f in FieldId::all() {
        for n in f.ideals_up_to_norm(50) {
            let lv = Level::new(f, &n).map_err(err)?;
            let reps = residues_brute(f, &n);
            let nn = norm_i64(f, &n);
            ensure(reps.len() as i64 == nn, || format!("d={} n={n}: |O/n| = {}", f.d(), reps.len()))?;
            let mut brute = 0usize;
            for u in &reps {
                for v in &reps {
                    let g = f.gcd(u, &f.gcd(v, &n).unwrap()).unwrap();
                    if f.is_unit(&g) {
                        brute += 1;
                    }
                }
            }
            let mut formula = Q::from_i64(nn * nn);
            for p in f.prime_divisors(&n).map_err(err)? {
                let np = Q::from_i64(norm_i64(f, &p));
                formula = formula.mul(&Q::one().sub(&np.mul(&np).inv()));
            }
            let listed = enumerate_en(&lv).len();
            ensure(listed == brute && Q::from_i64(brute as i64) == formula, || {
                format!("d={} n={n}: enumerate {listed}, brute force {brute}, formula {formula}", f.d())
            })?;
            levels += 1;
        }
    }
    Ok(format!("{levels} levels with N(n) ≤ 50 agree with brute force and the product formula"))
}

// ---------------------------------------------------------------- 3, 4

/// Σ_{M∈C}([M∞] − [M0]) for one coset class, tallied independently.
fn telescope(f: FieldId, fam: &HeilbronnFamily, class: &[usize]) -> HashMap<Cusp, i64> {
    let mut tally: HashMap<Cusp, i64> = HashMap::new();
    for &i in class {
        let m = &fam.matrices()[i].m;
        *tally.entry(Cusp::new(f, &m.a, &m.c).unwrap()).or_default() += 1;
        *tally.entry(Cusp::new(f, &m.b, &m.d).unwrap()).or_default() -= 1;
    }
    tally.retain(|_, v| *v != 0);
    tally
}

fn families_up_to_20() -> Result<Vec<HeilbronnFamily>, String> {
    let mut out = Vec::new();
    for f in FieldId::all() {
        for eta in f.elements_up_to_norm(20) {
            out.push(generate(f, &eta).map_err(err)?);
        }
    }
    Ok(out)
}

fn c_delta(fams: &[HeilbronnFamily]) -> Check {
    let want: HashMap<Cusp, i64> = [(Cusp::infinity(), 1), (Cusp::zero(), -1)].into_iter().collect();
    let mut classes = 0;
    for fam in fams {
        let f = fam.field();
        for (i, class) in fam.classes().iter().enumerate() {
            ensure(telescope(f, fam, class) == want, || {
                format!("d={} η={} class {i} does not telescope to [∞] − [0]", f.d(), fam.eta())
            })?;
            classes += 1;
        }
        let cert = fam.verify_c_delta().map_err(err)?;
        ensure(cert.ok(), || format!("d={} η={}: certificate reports a failure", f.d(), fam.eta()))?;
    }
    Ok(format!("{} families, {classes} classes telescope to [∞] − [0]", fams.len()))
}

fn heilbronn_invariants(fams: &[HeilbronnFamily]) -> Check {
    let mut matrices = 0;
    for fam in fams {
        let f = fam.field();
        for hb in fam.matrices() {
            let m = &hb.m;
            let n = |x: &QuadInt| norm_i64(f, x);
            ensure(m.det(f) == *fam.eta(), || format!("d={} det {m} ≠ {}", f.d(), fam.eta()))?;
            ensure(n(&m.a) > n(&m.b) && n(&m.d) > n(&m.c), || format!("d={} η={}: {m} breaks the norm order", f.d(), fam.eta()))?;
            matrices += 1;
        }
    }
    let mut primes = 0;
    for f in FieldId::all() {
        for p in f.ideals_up_to_norm(20) {
            if f.is_prime(&p) {
                let fam = generate(f, &p).map_err(err)?;
                let np = norm_i64(f, &p) as usize;
                ensure(fam.classes().len() == np + 1, || format!("d={} π={p}: {} classes", f.d(), fam.classes().len()))?;
                primes += 1;
            }
        }
    }
    Ok(format!("{matrices} matrices satisfy det = η and the norm order; {primes} primes have N(π) + 1 classes"))
}

// ---------------------------------------------------------------- 5, 6

const HECKE_LEVELS: [&str; 7] =
    ["d=1,n=2+1w", "d=1,n=3", "d=2,n=1+1w", "d=3,n=2+1w", "d=7,n=1+1w", "d=11,n=1-2w", "d=2,n=3"];

fn coprime_etas(lv: &Level, max_norm: u64) -> Vec<QuadInt> {
    let f = lv.field;
    f.ideals_up_to_norm(max_norm).into_iter().filter(|e| !e.is_one() && coprime(f, e, &lv.generator)).collect()
}

fn oracle_equivalence() -> Check {
    let mut pairs = 0;
    let mut fields = std::collections::BTreeSet::new();
    for l in HECKE_LEVELS {
        let lv = Level::parse(l).map_err(err)?;
        ensure(lv.norm_u64() <= 13, || format!("{l} exceeds the norm range"))?;
        let s: SymbolSpace<Q> = build_space(&lv, 2).map_err(err)?;
        for eta in coprime_etas(&lv, 10).into_iter().take(3) {
            let a = hecke_on_manin(&s, &eta).map_err(err)?;
            let b = hecke_oracle(&s, &eta, ORACLE_BUDGET).map_err(err)?;
            ensure(a.matrix == b.matrix, || format!("{l} η={eta}: formula and oracle differ"))?;
            pairs += 1;
            fields.insert(lv.field.d());
        }
    }
    ensure(pairs >= 6 && fields.len() >= 3, || format!("only {pairs} pairs over {} fields", fields.len()))?;
    Ok(format!("{pairs} (n, η) pairs over {} fields: formula = oracle", fields.len()))
}

fn commutativity() -> Check {
    let mut total = 0;
    for l in HECKE_LEVELS {
        let lv = Level::parse(l).map_err(err)?;
        let s: SymbolSpace<Q> = build_space(&lv, 2).map_err(err)?;
        let ops = coprime_etas(&lv, 13)
            .iter()
            .map(|e| hecke_on_manin(&s, e))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        let mut pairs = 0;
        for i in 0..ops.len() {
            for j in i + 1..ops.len() {
                let (a, b) = (&ops[i], &ops[j]);
                ensure(a.matrix.mul(&b.matrix) == b.matrix.mul(&a.matrix), || {
                    format!("{l}: T_{} and T_{} do not commute", a.eta, b.eta)
                })?;
                pairs += 1;
            }
        }
        ensure(pairs >= 10, || format!("{l}: only {pairs} pairs"))?;
        total += pairs;
    }
    Ok(format!("{total} commuting pairs over {} levels (≥ 10 each)", HECKE_LEVELS.len()))
}

// ---------------------------------------------------------------- 7, 8

/// Γ₁(n)-orbits of cusps counted by brute force: primitive pairs (a, c) mod
/// n, keyed by (c mod n, a mod gcd(c, n)), glued under (a, c) ~ (ua, uc)
/// and (a, c) ~ (ua, c) for units u.
fn cusp_classes_brute(f: FieldId, n: &QuadInt) -> usize {
    let reps = residues_brute(f, n);
    let mut pairs: Vec<(QuadInt, QuadInt)> = Vec::new();
    for a in &reps {
        for c in &reps {
            if f.is_unit(&f.gcd(a, &f.gcd(c, n).unwrap()).unwrap()) {
                pairs.push((a.clone(), c.clone()));
            }
        }
    }
    let same = |x: &(QuadInt, QuadInt), y: &(QuadInt, QuadInt)| {
        f.divides(n, &(&x.1 - &y.1)) && f.divides(&f.gcd(&x.1, n).unwrap(), &(&x.0 - &y.0))
    };
    let mut parent: Vec<usize> = (0..pairs.len()).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..pairs.len() {
        for j in 0..i {
            if same(&pairs[i], &pairs[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    for i in 0..pairs.len() {
        let (a, c) = pairs[i].clone();
        for u in f.units() {
            for moved in [(f.mul(&u, &a), f.mul(&u, &c)), (f.mul(&u, &a), c.clone())] {
                let j = pairs.iter().position(|p| same(p, &moved)).unwrap();
                let (x, y) = (find(&mut parent, i), find(&mut parent, j));
                parent[x] = y;
            }
        }
    }
    (0..pairs.len()).filter(|&i| find(&mut parent, i) == i).count()
}

fn exact_sequence() -> Check {
    let mut levels = 0;
    for f in FieldId::all() {
        for n in f.ideals_up_to_norm(20) {
            let lv = Level::new(f, &n).map_err(err)?;
            let s: SymbolSpace<Q> = build_space(&lv, 2).map_err(err)?;
            // 𝒮 as the kernel of ∂ on quotient coordinates, recomputed here
            let cols: Vec<SparseVec<Q>> = (0..s.dim()).map(|j| s.boundary_of_quotient(&[(j, Q::one())])).collect();
            let cusp = kernel(&SparseMat::from_columns(s.boundary_target().len(), cols)).dim();
            let classes = cusp_classes_brute(f, &n);
            ensure(s.boundary_target().len() == classes, || {
                format!("d={} n={n}: {} boundary classes, brute force {classes}", f.d(), s.boundary_target().len())
            })?;
            ensure(s.dim() == cusp + classes - 1 && cusp == s.cuspidal().dim(), || {
                format!("d={} n={n}: dim ℳ = {}, dim 𝒮 = {cusp}, classes = {classes}", f.d(), s.dim())
            })?;
            levels += 1;
        }
    }
    Ok(format!("{levels} levels with N(n) ≤ 20: dim ℳ = dim 𝒮 + #classes − 1"))
}

fn b_bridge() -> Check {
    let mut gens = 0;
    let mut levels = 0;
    for f in FieldId::all() {
        for n in f.ideals_up_to_norm(13) {
            let lv = Level::new(f, &n).map_err(err)?;
            let s: SymbolSpace<Q> = build_space(&lv, 2).map_err(err)?;
            let lifts = s.lifts();
            let mut cols = Vec::new();
            for g in 0..s.num_generators() {
                let m = s.generator(g);
                let p = HomPoly::<Q>::monomial(2, m.monomial_index);
                let b = s.boundary_b(&[(g, Q::one())]);
                let mu = s.boundary_mu_del(&p, &lifts[g % s.num_points()]).map_err(err)?;
                ensure(b == mu, || format!("d={} n={n}: b ≠ μ∂ on generator {g}", f.d()))?;
                cols.push(b);
                gens += 1;
            }
            let ker = kernel(&SparseMat::from_columns(s.boundary_target().len(), cols));
            for v in ker.basis() {
                ensure(s.cuspidal().contains(&s.project(v)), || format!("d={} n={n}: ker b leaves 𝒮", f.d()))?;
            }
            levels += 1;
        }
    }
    Ok(format!("{gens} generators over {levels} levels: b = μ∂∘lift, ker b ↦ 𝒮"))
}

// ---------------------------------------------------------------- 9, 10, 11

struct Form {
    level: Level,
    space: SymbolSpace<Q>,
    systems: Vec<EigenSystem>,
}

fn eigenform() -> Result<Form, String> {
    let level = Level::parse("d=11,n=1-2w").map_err(err)?;
    let space: SymbolSpace<Q> = build_space(&level, 2).map_err(err)?;
    let etas = coprime_etas(&level, 30);
    let systems = eigensystems(&space, &etas).map_err(err)?.systems;
    ensure(!systems.is_empty(), || "no rational eigensystem".into())?;
    Ok(Form { level, space, systems })
}

fn universal_coefficients(form: &Form) -> Check {
    let f = form.level.field;
    let s = &form.space;
    let mut checks = 0;
    for sys in &form.systems {
        let phi = eigenfunctional(s, sys).map_err(err)?;
        let x = SeedElement::from_quotient(s, &sys.vectors[0]).map_err(err)?;
        ensure(s.boundary_b(x.terms()).is_empty(), || "seed has b(x) ≠ 0".into())?;
        let mx = s.project(x.terms());
        for eta in f.elements_up_to_norm(30) {
            let lhs = family_sum(s, &phi, &generate(f, &eta).map_err(err)?, &x).map_err(err)?;
            let rhs = phi.eval_quotient(&manin_operator(s, &eta).map_err(err)?.apply(&mx));
            ensure(lhs == rhs, || format!("η={eta}: Σ φ|_M(x) = {lhs}, φ(T_η m(x)) = {rhs}"))?;
            checks += 1;
        }
    }
    Ok(format!("{checks} identities exact at {} (dim 𝒮 = {})", form.level, s.cuspidal().dim()))
}

fn bessel_accuracy() -> Check {
    // 30-digit reference values
    let (k0, k1) = (0.42102443824070833334, 0.60190723019723457474);
    let (a, b) = (bessel_k(0, 1.0).map_err(err)?, bessel_k(1, 1.0).map_err(err)?);
    ensure((a - k0).abs() < 1e-10 && (b - k1).abs() < 1e-10, || format!("K0(1) = {a}, K1(1) = {b}"))?;
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for x in [0.5, 1.0, 2.0] {
        let d = (bessel_k(0, x + h).map_err(err)? - bessel_k(0, x - h).map_err(err)?) / (2.0 * h);
        worst = worst.max((d + bessel_k(1, x).map_err(err)?).abs());
    }
    ensure(worst < 1e-6, || format!("K0' + K1 residual {worst:e}"))?;
    Ok(format!("|ΔK0(1)| = {:.1e}, |ΔK1(1)| = {:.1e}, max |K0' + K1| = {worst:.1e}", (a - k0).abs(), (b - k1).abs()))
}

fn automorphy(form: &Form) -> Check {
    let s = &form.space;
    let sys = &form.systems[0];
    let phi = eigenfunctional(s, sys).map_err(err)?;
    let x = SeedElement::from_quotient(s, &sys.vectors[0]).map_err(err)?;
    let table = fourier_coefficients(s, &phi, &x, 200).map_err(err)?;
    let one = QuadInt::one();
    let n = form.level.generator.clone();
    let translation = Mat2::new(one.clone(), n.clone(), QuadInt::zero(), one.clone());
    let points = [(0.05, 0.1, 1.2), (0.3, -0.2, 0.8), (-0.11, 0.37, 1.0), (0.42, 0.05, 1.5), (-0.25, -0.33, 2.0)];
    let mut worst: f64 = 0.0;
    for (re, im, t) in points {
        let w = H3Point::new(C::new(re, im), t).map_err(err)?;
        let r = automorphy_residual(&table, &translation, &w, KernelPhase::Unit).map_err(err)?;
        ensure(r.residual < 1e-6, || format!("translation at ({re}+{im}i, {t}): residual {:e}", r.residual))?;
        worst = worst.max(r.residual);
    }
    let generic = Mat2::new(&one + &n, one.clone(), n, one);
    let w = H3Point::new(C::new(0.03, -0.29), 0.302).map_err(err)?;
    let r = automorphy_residual(&table, &generic, &w, KernelPhase::Unit).map_err(err)?;
    ensure(r.within_budget(), || format!("γ = {generic}: residual {:e} above budget {:e}", r.residual, r.budget))?;
    Ok(format!(
        "B = 200; translations max residual {worst:.1e}; γ = {generic}: residual {:.1e} ≤ budget {:.1e}",
        r.residual, r.budget
    ))
}

// ----------------------------------------------------------------

fn run(id: u32, name: &str, limit: Duration, check: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let outcome = check();
    let took = start.elapsed();
    let (ok, detail) = match outcome {
        Ok(d) if took <= limit => (true, d),
        Ok(d) => (false, format!("{d}; took {:.1} s, limit {} s", took.as_secs_f64(), limit.as_secs())),
        Err(e) => (false, e),
    };
    println!("{} [{id:>2}] {name} ({:.2} s): {detail}", if ok { "PASS" } else { "FAIL" }, took.as_secs_f64());
    ok
}

fn main() {
    let secs = Duration::from_secs;
    let mut ok = true;
    ok &= run(1, "Euclidean contract", secs(10), euclidean_contract);
    ok &= run(2, "E_n counting", secs(30), en_counting);
    let start = Instant::now();
    let fams = families_up_to_20();
    let generation = start.elapsed();
    match fams {
        Ok(fams) => {
            ok &= run(3, "C_Δ certification", secs(60).saturating_sub(generation), || c_delta(&fams));
            ok &= run(4, "Heilbronn invariants", secs(60).saturating_sub(generation), || heilbronn_invariants(&fams));
        }
        Err(e) => {
            ok = false;
            println!("FAIL [ 3] C_Δ certification: {e}");
            println!("FAIL [ 4] Heilbronn invariants: {e}");
        }
    }
    ok &= run(5, "Hecke oracle equivalence", secs(300), oracle_equivalence);
    ok &= run(6, "Commutativity", secs(120), commutativity);
    ok &= run(7, "Exact-sequence identity", secs(300), exact_sequence);
    ok &= run(8, "b/∂ bridge", secs(300), b_bridge);
    match eigenform() {
        Ok(form) => {
            ok &= run(9, "Universal-coefficient identity", secs(300), || universal_coefficients(&form));
            ok &= run(10, "Bessel accuracy", secs(10), bessel_accuracy);
            ok &= run(11, "Automorphy residual", secs(600), || automorphy(&form));
        }
        Err(e) => {
            ok = false;
            println!("FAIL [ 9] Universal-coefficient identity: {e}");
            ok &= run(10, "Bessel accuracy", secs(10), bessel_accuracy);
            println!("FAIL [11] Automorphy residual: {e}");
        }
    }
    if !ok {
        std::process::exit(1);
    }
}
