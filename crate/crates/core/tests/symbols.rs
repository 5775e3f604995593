use std::sync::OnceLock;

use bianchi_core::linalg::{kernel, sv_axpy, sv_scale, QuadRat, Scalar, SparseMat, SparseVec, Q};
use bianchi_core::ring::{FieldId, Mat2, QuadInt};
use bianchi_core::symbols::{
    build_space, lift_to_sl2, relation_generators, x_matrix, Cusp, HomPoly, Level, ModSym, SymbolSpace,
};
use proptest::prelude::*;

fn level(s: &str) -> Level {
    Level::parse(s).unwrap()
}

fn space(s: &str) -> SymbolSpace<Q> {
    build_space(&level(s), 2).unwrap()
}

fn one() -> HomPoly<Q> {
    HomPoly::constant(Q::one())
}

fn modsym(f: FieldId, a: &str, b: &str) -> ModSym<Q> {
    ModSym::single(one(), Cusp::parse(f, a).unwrap(), Cusp::parse(f, b).unwrap())
}

const SMALL_LEVELS: [&str; 10] = [
    "d=1,n=1",
    "d=1,n=1+1w",
    "d=1,n=2",
    "d=1,n=2+1w",
    "d=1,n=3",
    "d=2,n=1+1w",
    "d=3,n=2",
    "d=7,n=1+1w",
    "d=11,n=1+1w",
    "d=11,n=1-2w",
];

#[test]
fn level_one_has_no_cusp_forms() {
    let s = space("d=1,n=1");
    assert_eq!(s.num_points(), 1);
    assert_eq!(s.cuspidal().dim(), 0);
    assert_eq!(s.dim() + s.rank_relations(), s.num_generators());
    assert!(s.exactness_holds());
}

#[test]
fn generator_count_at_one_plus_i() {
    let s = space("d=1,n=1+1w");
    assert_eq!(s.num_generators(), 3);
    assert!(s.relations_hold());
}

#[test]
fn relation_generators_contain_the_standard_words() {
    let f = FieldId::new(1).unwrap();
    let rels = relation_generators(f);
    let names: Vec<&str> = rels.iter().map(|r| r.name.as_str()).collect();
    assert_eq!(&names[..4], &["S", "TS", "J", "X"]);
    assert_eq!(rels[0].terms[1].1, Mat2::s());
    assert_eq!(rels[1].terms[1].1, Mat2::ts());
    assert_eq!(rels[2].terms[1].1, Mat2::new(QuadInt::omega(), QuadInt::zero(), QuadInt::zero(), QuadInt::one()));
    assert_eq!(rels[3].terms.len(), 3);
    assert_eq!(rels[3].terms[1].1, x_matrix());
    // X³ = i·I acts trivially in weight 2
    assert_eq!(x_matrix().pow(f, 3), Mat2::identity().scale(f, &QuadInt::omega()));
    for fld in FieldId::all() {
        for r in relation_generators(fld) {
            for (_, h) in &r.terms {
                assert!(fld.is_unit(&h.det(fld)), "{} in d={}", h, fld.d());
            }
        }
    }
}

#[test]
fn relations_and_exactness_at_small_levels() {
    for l in SMALL_LEVELS {
        let s = space(l);
        assert!(s.relations_hold(), "{l}");
        assert!(s.exactness_holds(), "{l}");
    }
}

#[test]
fn b_of_the_identity_symbol() {
    for l in ["d=1,n=2+1w", "d=3,n=2", "d=7,n=3"] {
        let s = space(l);
        let f = s.level().field;
        let t = s.table();
        let p01 = t.index_of(&QuadInt::zero(), &QuadInt::one()).unwrap();
        let p10 = t.index_of(&QuadInt::one(), &QuadInt::zero()).unwrap();
        let inf = s.boundary_target().class_of(&QuadInt::one(), &QuadInt::zero()).unwrap();
        let zero = s.boundary_target().class_of(&QuadInt::zero(), &QuadInt::one()).unwrap();
        assert_ne!(inf.0, zero.0, "{l}: ∞ and 0 are distinct cusps at nontrivial level");
        let b = s.boundary_b(&[(p01, Q::one())]);
        let expected: SparseVec<Q> = sv_axpy(&vec![(inf.0, inf.1)], &Q::one().neg(), &vec![(zero.0, zero.1)]);
        assert_eq!(b, expected, "{l} in d={}", f.d());
        let both = s.boundary_b(&[(p01, Q::one()), (p10, Q::one())]);
        assert!(both.is_empty(), "{l}");
        assert!(s.boundary_b(&[]).is_empty());
    }
}

#[test]
fn b_matches_mu_del_on_lifts() {
    for l in ["d=1,n=1+1w", "d=1,n=2", "d=1,n=2+1w", "d=2,n=1+1w", "d=3,n=2", "d=11,n=1-2w"] {
        check_bridge(&space(l));
    }
    for (l, k) in [("d=2,n=3", 3), ("d=7,n=2+1w", 4), ("d=1,n=2+1w", 4), ("d=3,n=2+1w", 3)] {
        let s: SymbolSpace<QuadRat> = build_space(&level(l), k).unwrap();
        check_bridge(&s);
    }
}

fn check_bridge<F: Scalar>(s: &SymbolSpace<F>) {
    let f = s.level().field;
    let lifts = s.lifts();
    for g in 0..s.num_generators() {
        let m = s.generator(g);
        let lift = &lifts[g % s.num_points()];
        assert!(lift.det(f).is_one());
        let p = HomPoly::<F>::monomial(s.weight(), m.monomial_index);
        assert_eq!(s.boundary_b(&[(g, F::one())]), s.boundary_mu_del(&p, lift).unwrap(), "{} {}", s.level(), m.point);
    }
}

#[test]
fn kernel_of_b_lands_in_cuspidal_space() {
    for l in ["d=11,n=1-2w", "d=1,n=2+1w", "d=2,n=3"] {
        let s = space(l);
        let cols: Vec<SparseVec<Q>> = (0..s.num_generators()).map(|g| s.boundary_b(&[(g, Q::one())])).collect();
        let bmat = SparseMat::from_columns(s.boundary_target().len(), cols);
        let ker = kernel(&bmat);
        for v in ker.basis() {
            assert!(s.cuspidal().contains(&s.project(v)), "{l}");
        }
        // and every cuspidal class is the image of a kernel vector
        for c in s.cuspidal().basis() {
            assert!(s.boundary_b(&s.lift(c)).is_empty());
        }
    }
}

#[test]
fn odd_weight_rejected_when_minus_identity_is_present() {
    assert!(build_space::<Q>(&level("d=1,n=2"), 3).is_err());
    assert!(build_space::<Q>(&level("d=1,n=1+1w"), 3).is_err());
    assert!(build_space::<QuadRat>(&level("d=2,n=3"), 3).is_ok());
    assert!(build_space::<QuadRat>(&level("d=2,n=3"), 1).is_err());
}

#[test]
fn higher_weight_uses_the_quadratic_field() {
    assert!(build_space::<Q>(&level("d=1,n=2+1w"), 4).is_err());
    let s: SymbolSpace<QuadRat> = build_space(&level("d=1,n=2+1w"), 4).unwrap();
    assert!(s.relations_hold());
    assert!(s.exactness_holds());
    let s: SymbolSpace<QuadRat> = build_space(&level("d=11,n=2"), 4).unwrap();
    assert!(s.exactness_holds());
}

#[test]
fn modular_zero_infinity_is_the_identity_symbol() {
    let s = space("d=1,n=2+1w");
    let f = s.level().field;
    let p01 = s.table().index_of(&QuadInt::zero(), &QuadInt::one()).unwrap();
    let got = s.modular_to_manin(&modsym(f, "0", "oo")).unwrap();
    assert_eq!(got, s.project(&[(p01, Q::one())]));
    assert!(s.modular_to_manin(&modsym(f, "1+1w/3", "1+1w/3")).unwrap().is_empty());
}

#[test]
fn modular_symbol_boundary_agrees_with_direct_boundary() {
    for (l, pairs) in [
        ("d=1,n=2+1w", vec![("0", "1/2"), ("1/2", "1+1w/3"), ("oo", "2+1w/5")]),
        ("d=11,n=1-2w", vec![("0", "1/2"), ("1w/3", "-1/1+1w"), ("0", "3+1w/7")]),
        ("d=3,n=2", vec![("1/3", "2/1w"), ("oo", "0")]),
    ] {
        let s = space(l);
        let f = s.level().field;
        for (a, b) in pairs {
            let m = modsym(f, a, b);
            let coords = s.modular_to_manin(&m).unwrap();
            assert_eq!(s.boundary_of_quotient(&coords), s.boundary_of_modular(&m).unwrap(), "{l} {{{a}, {b}}}");
        }
    }
}

#[test]
fn one_half_uses_two_steps() {
    let f = FieldId::new(1).unwrap();
    let path = bianchi_core::symbols::convergent_path(f, &Cusp::parse(f, "1/2").unwrap()).unwrap();
    assert_eq!(path.len(), 2);
    for g in &path {
        assert!(g.det(f).is_one());
    }
}

fn shared_space() -> &'static SymbolSpace<Q> {
    static S: OnceLock<SymbolSpace<Q>> = OnceLock::new();
    S.get_or_init(|| space("d=1,n=3"))
}

fn shared_space_k4() -> &'static SymbolSpace<QuadRat> {
    static S: OnceLock<SymbolSpace<QuadRat>> = OnceLock::new();
    S.get_or_init(|| build_space(&level("d=2,n=3"), 4).unwrap())
}

fn cusp_strategy(d: i64) -> impl Strategy<Value = Cusp> {
    (-6i64..7, -6i64..7, -6i64..7, -6i64..7).prop_filter_map("cusp", move |(a, b, c, e)| {
        let f = FieldId::new(d).unwrap();
        let num = QuadInt::new(a, b);
        let den = QuadInt::new(c, e);
        if num.is_zero() && den.is_zero() {
            return None;
        }
        Cusp::new(f, &num, &den).ok()
    })
}

fn small_sl2(f: FieldId) -> impl Strategy<Value = Mat2> {
    prop::collection::vec(0usize..4, 1..6).prop_map(move |word| {
        let gens = [
            Mat2::s(),
            Mat2::new(QuadInt::one(), QuadInt::one(), QuadInt::zero(), QuadInt::one()),
            Mat2::new(QuadInt::one(), QuadInt::omega(), QuadInt::zero(), QuadInt::one()),
            Mat2::new(QuadInt::one(), QuadInt::zero(), QuadInt::from_i64(-1), QuadInt::one()),
        ];
        word.iter().fold(Mat2::identity(), |m, i| m.mul(f, &gens[*i]))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn three_term_relation(a in cusp_strategy(1), b in cusp_strategy(1), c in cusp_strategy(1)) {
        let s = shared_space();
        let mut m = ModSym::new(2);
        m.push(one(), a.clone(), b.clone());
        m.push(one(), b, c.clone());
        m.push(one(), c, a);
        prop_assert!(s.modular_to_manin(&m).unwrap().is_empty());
    }

    #[test]
    fn three_term_relation_weight_four(a in cusp_strategy(2), b in cusp_strategy(2), c in cusp_strategy(2), i in 0usize..3) {
        let s = shared_space_k4();
        let p = HomPoly::<QuadRat>::monomial(4, i);
        let mut m = ModSym::new(4);
        m.push(p.clone(), a.clone(), b.clone());
        m.push(p.clone(), b, c.clone());
        m.push(p, c, a);
        prop_assert!(s.modular_to_manin(&m).unwrap().is_empty());
    }

    #[test]
    fn modular_symbols_are_antisymmetric(a in cusp_strategy(1), b in cusp_strategy(1)) {
        let s = shared_space();
        let x = s.modular_to_manin(&ModSym::single(one(), a.clone(), b.clone())).unwrap();
        let y = s.modular_to_manin(&ModSym::single(one(), b, a)).unwrap();
        prop_assert!(sv_axpy(&x, &Q::one(), &y).is_empty());
    }

    #[test]
    fn boundary_of_translated_symbols(g in small_sl2(FieldId::new(1).unwrap()), a in cusp_strategy(1), b in cusp_strategy(1)) {
        let s = shared_space();
        let f = s.level().field;
        let m = ModSym::single(one(), a.act(f, &g).unwrap(), b.act(f, &g).unwrap());
        let coords = s.modular_to_manin(&m).unwrap();
        prop_assert_eq!(s.boundary_of_quotient(&coords), s.boundary_of_modular(&m).unwrap());
    }

    #[test]
    fn right_action_is_consistent(p in 0usize..32, g in small_sl2(FieldId::new(1).unwrap()), h in small_sl2(FieldId::new(1).unwrap())) {
        let s = shared_space();
        let f = s.level().field;
        let t = s.table();
        let p = p % t.len();
        let step = t.act(t.act(p, &t.reduce_mat(&g)), &t.reduce_mat(&h));
        let once = t.act(p, &t.reduce_mat(&g.mul(f, &h)));
        prop_assert_eq!(step, once);
    }

    #[test]
    fn lift_has_the_right_bottom_row(p in 0usize..200) {
        let lv = level("d=7,n=3+1w");
        let t = bianchi_core::symbols::EnTable::new(&lv);
        let p = p % t.len();
        let g = lift_to_sl2(&t.point(p), &lv);
        prop_assert!(g.det(lv.field).is_one());
        prop_assert_eq!(t.point_of_matrix(&g), Some(p));
    }

    #[test]
    fn projection_is_linear(x in prop::collection::vec((0usize..32, -5i64..6), 0..6)) {
        let s = shared_space();
        let v: SparseVec<Q> = bianchi_core::linalg::sv_collect(
            x.iter().map(|(g, c)| (g % s.num_generators(), Q::from_i64(*c))),
        );
        let two = Q::from_i64(2);
        prop_assert_eq!(s.project(&sv_scale(&v, &two)), sv_scale(&s.project(&v), &two));
        prop_assert_eq!(s.project(&s.lift(&s.project(&v))), s.project(&v));
    }
}
