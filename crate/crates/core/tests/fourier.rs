use std::f64::consts::PI;
use std::sync::OnceLock;

use bianchi_core::fourier::*;
use bianchi_core::hecke::*;
use bianchi_core::heilbronn::generate;
use bianchi_core::linalg::{Scalar, Q};
use bianchi_core::ring::{Mat2, QuadInt};
use bianchi_core::symbols::{build_space, Level, SymbolSpace};
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn q(a: i64, b: i64) -> QuadInt {
    QuadInt::new(a, b)
}

struct Ctx {
    level: Level,
    space: SymbolSpace<Q>,
    system: EigenSystem,
    phi: DualFunctional,
    seed: SeedElement,
    table: FourierTable,
}

const BOUND: u64 = 250;

fn ctx() -> &'static Ctx {
    static CTX: OnceLock<Ctx> = OnceLock::new();
    CTX.get_or_init(|| {
        let level = Level::parse("d=11,n=1-2w").unwrap();
        let f = level.field;
        let space: SymbolSpace<Q> = build_space(&level, 2).unwrap();
        let etas: Vec<QuadInt> = f
            .ideals_up_to_norm(30)
            .into_iter()
            .filter(|e| f.is_unit(&f.gcd(e, &level.generator).unwrap()))
            .collect();
        let table = eigensystems(&space, &etas).unwrap();
        assert_eq!(table.systems.len(), 1);
        let system = table.systems[0].clone();
        let phi = eigenfunctional(&space, &system).unwrap();
        let seed = SeedElement::from_quotient(&space, &system.vectors[0]).unwrap();
        let table = fourier_coefficients(&space, &phi, &seed, BOUND).unwrap();
        Ctx { level, space, system, phi, seed, table }
    })
}

fn w(re: f64, im: f64, t: f64) -> H3Point {
    H3Point::new(C::new(re, im), t).unwrap()
}

fn dist(a: &[C; 3], b: &[C; 3]) -> f64 {
    (0..3).map(|i| (a[i] - b[i]).norm_sqr()).sum::<f64>().sqrt()
}

/// K_ν(x) = ∫₀^∞ exp(−x cosh s) cosh(νs) ds by the trapezoid rule, which
/// converges geometrically for this integrand.
fn quadrature_k(nu: f64, x: f64) -> f64 {
    let h: f64 = 0.004;
    let mut total = 0.5 * (-x).exp();
    let mut s: f64 = h;
    loop {
        let e = (-x * s.cosh()).exp() * (nu * s).cosh();
        total += e;
        if e < 1e-18 * total {
            break;
        }
        s += h;
    }
    total * h
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn bessel_matches_frozen_high_precision_values() {
    // 30-digit values computed with an arbitrary-precision library
    let frozen = [
        (0.001, 7.0236888005623813436, 999.99623815608557428),
        (0.1, 2.4270690247020166125, 9.8538447808706061348),
        (0.5, 0.92441907122766586178, 1.6564411200033008937),
        (1.0, 0.42102443824070833334, 0.60190723019723457474),
        (2.0, 0.11389387274953343565, 0.13986588181652242728),
        (2.5, 0.062347553200366186029, 0.073890816347747063649),
        (5.0, 0.0036910983340425942747, 0.0040446134454521642084),
        (10.0, 1.7780062316167651811e-5, 1.8648773453825584597e-5),
        (30.0, 2.1324774964630563712e-14, 2.1677320018915494249e-14),
        (80.0, 2.5251198425054718152e-36, 2.5408531275211700109e-36),
    ];
    for (x, k0, k1) in frozen {
        assert!(rel(bessel_k(0, x).unwrap(), k0) < 1e-12, "K0({x})");
        assert!(rel(bessel_k(1, x).unwrap(), k1) < 1e-12, "K1({x})");
    }
    assert!((bessel_k(0, 1.0).unwrap() - 0.421024438241).abs() < 1e-10);
    assert!((bessel_k(1, 1.0).unwrap() - 0.601907230197).abs() < 1e-10);
}

#[test]
fn bessel_matches_quadrature_across_the_crossover() {
    let mut x = 0.01;
    while x < 60.0 {
        let (k0, k1) = bessel_k01(x);
        assert!(rel(k0, quadrature_k(0.0, x)) < 1e-11, "K0({x})");
        assert!(rel(k1, quadrature_k(1.0, x)) < 1e-11, "K1({x})");
        x *= 1.17;
    }
    for x in [CROSSOVER * (1.0 - 1e-12), CROSSOVER, CROSSOVER * (1.0 + 1e-12)] {
        assert!(rel(bessel_k(0, x).unwrap(), quadrature_k(0.0, x)) < 1e-12);
    }
}

#[test]
fn bessel_derivative_identity() {
    let h = 1e-5;
    for x in [0.5, 1.0, 2.0] {
        let d = (bessel_k(0, x + h).unwrap() - bessel_k(0, x - h).unwrap()) / (2.0 * h);
        assert!((d + bessel_k(1, x).unwrap()).abs() < 1e-6, "x = {x}");
    }
}

#[test]
fn bessel_rejects_bad_arguments() {
    assert!(bessel_k(0, 0.0).is_err());
    assert!(bessel_k(1, -1.0).is_err());
    assert!(bessel_k(2, 1.0).is_err());
    assert!(bessel_k(0, f64::NAN).is_err());
}

#[test]
fn bessel_terms_decay_in_the_norm() {
    let s = 11f64.sqrt();
    for t in [0.5, 1.0, 2.0] {
        let mut prev = (f64::INFINITY, f64::INFINITY);
        for n in 1..=400u32 {
            let (k0, k1) = bessel_k01(4.0 * PI * (n as f64).sqrt() * t / s);
            let cur = (t * t * k0, t * t * k1);
            assert!(cur.0 < prev.0 && cur.1 < prev.1);
            prev = cur;
        }
    }
}

#[test]
fn slash_by_identity_and_zero_seed() {
    let c = ctx();
    let x = c.seed.terms();
    let direct = c.phi.eval(x);
    assert_eq!(functional_slash(&c.space, &c.phi, &Mat2::identity(), x).unwrap(), direct);
    assert_eq!(direct, c.phi.eval_quotient(&c.space.project(x)));
    assert!(functional_slash(&c.space, &c.phi, &Mat2::ints(1, 2, 3, 7), &[]).unwrap().is_zero());
}

#[test]
fn coefficients_equal_the_functional_on_hecke_images() {
    let c = ctx();
    let f = c.level.field;
    let mx = c.space.project(c.seed.terms());
    let mut coprime = 0;
    for eta in f.elements_up_to_norm(30) {
        if eta.is_zero() {
            continue;
        }
        let lhs = family_sum(&c.space, &c.phi, &generate(f, &eta).unwrap(), &c.seed).unwrap();
        let rhs = c.phi.eval_quotient(&manin_operator(&c.space, &eta).unwrap().apply(&mx));
        assert_eq!(lhs, rhs, "η = {eta}");
        assert_eq!(c.table.get(&eta), Some(&lhs));
        if f.is_unit(&f.gcd(&eta, &c.level.generator).unwrap()) {
            let oracle = hecke_oracle(&c.space, &eta, 1 << 20).unwrap();
            assert_eq!(lhs, c.phi.eval_quotient(&oracle.apply(&mx)), "oracle η = {eta}");
            coprime += 1;
        }
    }
    assert!(coprime > 50);
}

#[test]
fn coefficients_follow_the_eigenvalues() {
    let c = ctx();
    let t = &c.table;
    assert_eq!(t.a1, Q::one());
    assert_eq!(t.a1, c.phi.eval_quotient(&c.space.project(c.seed.terms())));
    let checks = check_eigen_consistency(t, &c.system);
    assert!(checks.len() >= 10);
    assert!(checks.iter().all(|(_, ok)| *ok));
    assert!(t.associates_equal);
    for (a, b, v) in [(0, 1, -1), (2, 0, 0), (1, 1, 1), (2, 1, -2), (3, 0, 1), (4, 0, -4), (1, 3, 7), (2, 3, 3)] {
        for u in [1, -1] {
            assert_eq!(t.get(&q(u * a, u * b)), Some(&Q::from_i64(v)), "α = {a}+{b}w");
        }
    }
    // the level itself: a U-type coefficient
    assert_eq!(t.get(&q(1, -2)), Some(&Q::one()));
    assert_eq!(t.entries.len(), c.level.field.elements_up_to_norm(BOUND).len());
}

#[test]
fn doubling_the_seed_doubles_every_coefficient() {
    let c = ctx();
    let two = Q::from_i64(2);
    let doubled = fourier_coefficients(&c.space, &c.phi, &c.seed.scale(&two), 30).unwrap();
    let base = c.table.truncate(30);
    assert_eq!(doubled.entries.len(), base.entries.len());
    for (x, y) in doubled.entries.iter().zip(&base.entries) {
        assert_eq!(x.alpha, y.alpha);
        assert_eq!(x.exact, y.exact.mul(&two));
    }
}

#[test]
fn seed_with_boundary_is_rejected() {
    let c = ctx();
    let bad = (0..c.space.num_generators())
        .map(|g| vec![(g, Q::one())])
        .find(|x| !c.space.boundary_b(x).is_empty())
        .unwrap();
    assert!(SeedElement::new(&c.space, bad).is_err());
    assert!(SeedElement::new(&c.space, vec![(c.space.num_generators(), Q::one())]).is_err());
}

#[test]
fn higher_weight_never_reaches_the_fourier_layer() {
    // rational coefficients exist only in weight 2; the Fourier layer takes rational spaces
    let lv = Level::parse("d=1,n=3").unwrap();
    assert!(build_space::<Q>(&lv, 4).is_err());
    assert!(build_space::<Q>(&Level::parse("d=11,n=1-2w").unwrap(), 3).is_err());
}

#[test]
fn zero_table_and_single_terms() {
    let lv = Level::parse("d=1,n=2+1w").unwrap();
    let empty = FourierTable::empty(lv.clone(), 10);
    let v = eval_series(&empty, &w(0.1, 0.2, 1.0), KernelPhase::Unit);
    assert_eq!(v.value, [C::new(0.0, 0.0); 3]);
    assert_eq!(v.tail_bound, 0.0);

    let one = |alpha: QuadInt| FourierTable {
        entries: vec![FourierEntry { alpha, exact: Q::from_i64(3) }],
        a1: Q::from_i64(3),
        ..FourierTable::empty(lv.clone(), 1)
    };
    let p = w(0.13, -0.4, 0.7);
    for phase in [KernelPhase::Unit, KernelPhase::Literal] {
        let v = eval_series(&one(q(1, 0)), &p, phase).value;
        assert!((v[0] / v[2] + 1.0).norm() < 1e-14);
    }
    // with the unit phase the outer components of α carry α/|α| and its conjugate
    let v = eval_series(&one(q(1, 1)), &p, KernelPhase::Unit).value;
    let unit = C::new(1.0, 1.0) / 2f64.sqrt();
    assert!((v[0] / v[2] + unit / unit.conj()).norm() < 1e-14);
    let v = eval_series(&one(q(1, 1)), &p, KernelPhase::Literal).value;
    assert!((v[0] / v[2] + 1.0).norm() < 1e-14);
}

#[test]
fn truncation_stays_within_the_tail_estimate() {
    let c = ctx();
    let p = w(0.1, 0.2, 1.0);
    let full = eval_series(&c.table, &p, KernelPhase::Unit);
    for b in [5, 10, 20, 40] {
        let cut = eval_series(&c.table.truncate(b), &p, KernelPhase::Unit);
        let diff = dist(&full.value, &cut.value);
        assert!(diff <= cut.tail_bound, "B = {b}: change {diff:e} vs tail {:e}", cut.tail_bound);
    }
    assert!(full.tail_bound < 1e-8);
}

#[test]
fn series_is_periodic_under_the_ring() {
    let c = ctx();
    let f = c.level.field;
    for (re, im, t) in [(0.05, 0.1, 1.2), (-0.3, 0.41, 0.8), (0.2, -0.17, 0.5)] {
        let base = eval_series(&c.table, &w(re, im, t), KernelPhase::Unit);
        for mu in [q(1, 0), q(0, 1), q(1, -2), q(-3, 2)] {
            let (dr, di) = f.to_complex(&mu);
            let moved = eval_series(&c.table, &w(re + dr, im + di, t), KernelPhase::Unit);
            assert!(dist(&base.value, &moved.value) <= 1e-10 * base.norm());
        }
    }
}

#[test]
fn identity_has_zero_residual() {
    let c = ctx();
    let r = automorphy_residual(&c.table, &Mat2::identity(), &w(0.05, 0.1, 1.2), KernelPhase::Unit).unwrap();
    assert_eq!(r.residual, 0.0);
}

#[test]
fn translations_are_automorphic() {
    let c = ctx();
    let one = QuadInt::one();
    let n = c.level.generator.clone();
    let points = [(0.05, 0.1, 1.2), (0.3, -0.2, 0.8), (-0.11, 0.37, 1.0), (0.42, 0.05, 1.5), (-0.25, -0.33, 2.0)];
    for b in [n.clone(), one.clone(), q(0, 1)] {
        let gamma = Mat2::new(one.clone(), b, QuadInt::zero(), one.clone());
        for (re, im, t) in points {
            let r = automorphy_residual(&c.table, &gamma, &w(re, im, t), KernelPhase::Unit).unwrap();
            assert!(r.residual < 1e-6, "γ = {gamma} at ({re}, {im}, {t}): {:e}", r.residual);
        }
    }
}

fn generic_gamma(c: &Ctx) -> Mat2 {
    let one = QuadInt::one();
    let n = c.level.generator.clone();
    Mat2::new(&one + &n, one.clone(), n, one)
}

#[test]
fn generic_gamma_is_within_budget() {
    let c = ctx();
    let gamma = generic_gamma(c);
    for p in [w(0.03, -0.29, 0.302), w(-0.06, -0.31, 0.298)] {
        let r = automorphy_residual(&c.table, &gamma, &p, KernelPhase::Unit).unwrap();
        assert!(r.image.t > 0.25);
        assert!(r.within_budget(), "residual {:e} budget {:e}", r.residual, r.budget);
        assert!(r.residual < 1e-6);
    }
}

#[test]
fn literal_kernel_is_not_automorphic() {
    let c = ctx();
    let r = automorphy_residual(&c.table, &generic_gamma(c), &w(0.03, -0.29, 0.302), KernelPhase::Literal).unwrap();
    assert!(r.residual > 0.1);
    assert!(!r.within_budget());
}

#[test]
fn gamma_outside_the_group_is_rejected() {
    let c = ctx();
    let p = w(0.0, 0.0, 1.0);
    assert!(automorphy_residual(&c.table, &Mat2::s(), &p, KernelPhase::Unit).is_err());
    assert!(automorphy_residual(&c.table, &Mat2::ints(2, 0, 0, 1), &p, KernelPhase::Unit).is_err());
    assert!(H3Point::new(C::new(0.0, 0.0), 0.0).is_err());
    assert!(H3Point::new(C::new(0.0, 0.0), -1.0).is_err());
}

#[test]
fn automorphy_factor_composes() {
    // j(γδ, w) = j(γ, δw)·j(δ, w)
    let g = [C::new(1.0, 1.0), C::new(0.5, -0.3), C::new(2.0, 1.0), C::new(0.0, 0.0)];
    let g = [g[0], g[1], g[2], (C::new(1.0, 0.0) + g[1] * g[2]) / g[0]];
    let h = [C::new(0.2, 0.0), C::new(-1.0, 0.7), C::new(1.0, 0.0), C::new(0.0, 0.0)];
    let h = [h[0], h[1], h[2], (C::new(1.0, 0.0) + h[1] * h[2]) / h[0]];
    let gh = [g[0] * h[0] + g[1] * h[2], g[0] * h[1] + g[1] * h[3], g[2] * h[0] + g[3] * h[2], g[2] * h[1] + g[3] * h[3]];
    let p = w(0.3, 0.2, 0.7);
    let mul = |a: [C; 4], b: [C; 4]| [a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]];
    let lhs = j_factor(&gh, &p);
    let rhs = mul(j_factor(&g, &p.act(&h)), j_factor(&h, &p));
    for i in 0..4 {
        assert!((lhs[i] - rhs[i]).norm() < 1e-12);
    }
    let hp = p.act(&h);
    let ghp = hp.act(&g);
    let direct = p.act(&gh);
    assert!((ghp.z - direct.z).norm() < 1e-12 && (ghp.t - direct.t).abs() < 1e-12);
    let s = sym2(&mul(g, h));
    let (sg, sh) = (sym2(&g), sym2(&h));
    for r in 0..3 {
        for k in 0..3 {
            let prod: C = (0..3).map(|m| sg[r][m] * sh[m][k]).sum();
            assert!((s[r][k] - prod).norm() < 1e-12);
        }
    }
}

#[test]
fn table_json_round_trip() {
    let c = ctx();
    let t = c.table.truncate(20);
    let v = t.to_json();
    assert_eq!(v["d"], 11);
    assert_eq!(v["level"], "1-2w");
    let back = FourierTable::from_json(&v).unwrap();
    assert_eq!(back.entries.len(), t.entries.len());
    for (x, y) in back.entries.iter().zip(&t.entries) {
        assert_eq!((&x.alpha, &x.exact), (&y.alpha, &y.exact));
    }
    assert_eq!(back.a1, t.a1);
    let bad = serde_json::json!({"d": 11, "level": "1-2w", "norm_bound": 1, "a": [{"alpha": "0", "re": 1.0}]});
    assert!(FourierTable::from_json(&bad).is_err());
}

#[test]
fn kernel_phase_names() {
    for p in [KernelPhase::Unit, KernelPhase::Literal] {
        assert_eq!(KernelPhase::parse(p.name()).unwrap(), p);
    }
    assert!(KernelPhase::parse("other").is_err());
    assert_eq!(KernelPhase::default(), KernelPhase::Unit);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bessel_agrees_with_quadrature(x in 0.005f64..70.0) {
        let (k0, k1) = bessel_k01(x);
        prop_assert!(rel(k0, quadrature_k(0.0, x)) < 1e-11);
        prop_assert!(rel(k1, quadrature_k(1.0, x)) < 1e-11);
    }

    #[test]
    fn series_is_linear_in_the_table(re in -1.0f64..1.0, im in -1.0f64..1.0, t in 0.4f64..2.0, k in -5i64..6) {
        let c = ctx();
        let small = c.table.truncate(60);
        let mut scaled = small.clone();
        for e in &mut scaled.entries {
            e.exact = e.exact.mul(&Q::from_i64(k));
        }
        let p = w(re, im, t);
        let a = eval_series(&small, &p, KernelPhase::Unit);
        let b = eval_series(&scaled, &p, KernelPhase::Unit);
        let want = a.value.map(|z| z * k as f64);
        prop_assert!(dist(&b.value, &want) <= 1e-12 * (1.0 + a.norm() * k.abs() as f64));
    }
}
