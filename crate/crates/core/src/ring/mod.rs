//! Exact arithmetic in the ring of integers of Q(√−d), d ∈ {1, 2, 3, 7, 11}.

mod arith;
mod field;
mod mat2;
mod quad;
mod residue;

pub use arith::{int_divisors, int_xgcd, ResidueConvention};
pub use field::{FieldId, OmegaKind, EUCLIDEAN_D};
pub use mat2::Mat2;
pub use quad::QuadInt;
pub use residue::ResidueRing;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::int::Int;
    use num_rational::BigRational;

    fn f(d: i64) -> FieldId {
        FieldId::new(d).unwrap()
    }

    fn q(a: i64, b: i64) -> QuadInt {
        QuadInt::new(a, b)
    }

    #[test]
    fn field_data() {
        let discs: Vec<i64> = FieldId::all().iter().map(|f| f.disc()).collect();
        assert_eq!(discs, vec![-4, -8, -3, -7, -11]);
        assert!(FieldId::new(5).is_err());
        for fld in FieldId::all() {
            assert!(fld.epsilon() < BigRational::from_integer(1.into()));
        }
        assert_eq!(f(3).epsilon().to_string(), "1/3");
        assert_eq!(f(11).epsilon().to_string(), "9/11");
        assert_eq!(f(1).epsilon().to_string(), "1/2");
    }

    #[test]
    fn norms() {
        assert_eq!(f(1).norm(&q(1, 1)), Int::from(2));
        assert_eq!(f(3).norm(&q(2, 1)), Int::from(7));
        for fld in FieldId::all() {
            assert!(fld.norm(&QuadInt::zero()).is_zero());
        }
    }

    #[test]
    fn units_are_exact() {
        assert_eq!(f(2).units(), vec![q(1, 0), q(-1, 0)]);
        assert_eq!(f(1).units(), vec![q(1, 0), q(0, 1), q(-1, 0), q(0, -1)]);
        assert_eq!(f(3).units().len(), 6);
        for fld in FieldId::all() {
            let us = fld.units();
            assert_eq!(us.len(), fld.num_units());
            let all_norm_one = fld.elements_of_norm(&Int::ONE);
            assert_eq!(all_norm_one.len(), us.len());
            for u in &us {
                assert!(all_norm_one.contains(u));
            }
        }
    }

    #[test]
    fn division_examples() {
        let (qq, r) = f(1).euclid_div(&q(7, 2), &q(3, 0)).unwrap();
        assert_eq!((qq, r), (q(2, 1), q(1, -1)));
        let (qq, r) = f(3).euclid_div(&q(5, 3), &q(5, 3)).unwrap();
        assert_eq!((qq, r), (q(1, 0), q(0, 0)));
        assert!(f(1).euclid_div(&q(1, 0), &q(0, 0)).is_err());
        // 1/(1+i) = (1−i)/2: four equidistant corners, lexicographically least is −i.
        let (qq, r) = f(1).euclid_div(&q(1, 0), &q(1, 1)).unwrap();
        assert_eq!((qq, r), (q(0, -1), q(0, 1)));
    }

    #[test]
    fn gcd_and_associates() {
        assert_eq!(f(1).gcd(&q(1, 1), &q(2, 0)).unwrap(), q(1, 1));
        assert_eq!(f(1).gcd(&q(-1, 1), &q(0, 0)).unwrap(), q(1, 1));
        assert_eq!(f(2).gcd(&q(3, 1), &q(7, 0)).unwrap(), q(1, 0));
        assert!(f(2).gcd(&q(0, 0), &q(0, 0)).is_err());
        assert_eq!(f(1).canonical_associate(&q(0, 1)), (q(1, 0), q(0, 1)));
        assert_eq!(f(1).canonical_associate(&q(0, 0)), (q(0, 0), q(1, 0)));
        let (x0, u) = f(1).canonical_associate(&q(-1, 1));
        assert_eq!(x0, q(1, 1));
        assert_eq!(f(1).mul(&u, &x0), q(-1, 1));
    }

    #[test]
    fn divisor_examples() {
        assert_eq!(f(1).divisors_up_to_units(&q(1, 1)).unwrap(), vec![q(1, 0), q(1, 1)]);
        assert_eq!(f(1).divisors_up_to_units(&q(0, 1)).unwrap(), vec![q(1, 0)]);
        assert_eq!(
            f(1).divisors_up_to_units(&q(2, 0)).unwrap(),
            vec![q(1, 0), q(1, 1), q(2, 0)]
        );
        assert!(f(3).is_prime(&q(2, 0)));
        assert!(!f(1).is_prime(&q(2, 0)));
        assert!(f(1).is_prime(&q(2, 1)));
    }

    #[test]
    fn residue_examples() {
        let r = f(1).residues_below(&q(1, 1)).unwrap();
        assert_eq!(r, vec![q(0, 0), q(0, 1)]);
        assert_eq!(f(2).residues_below(&q(1, 0)).unwrap(), vec![q(0, 0)]);
        let r = f(1).residues_below(&q(2, 0)).unwrap();
        assert_eq!(r.len(), 4);
        assert!(r.iter().all(|x| f(1).norm(x) < Int::from(4)));
    }

    #[test]
    fn elements_of_norm_match_brute_force() {
        for fld in FieldId::all() {
            for k in 0..40i64 {
                let fast = fld.elements_of_norm(&Int::from(k));
                let mut slow = Vec::new();
                for a in -15..=15 {
                    for b in -15..=15 {
                        let x = q(a, b);
                        if fld.norm(&x) == Int::from(k) {
                            slow.push(x);
                        }
                    }
                }
                slow.sort_by(|x, y| x.lex_cmp(y));
                assert_eq!(fast, slow, "d={} k={}", fld.d(), k);
            }
        }
    }
}
