use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use proptest::prelude::*;

use quatlat::exact::{
    discriminant, factor_mod_p, poly_gcd, resultant, sturm_real_root_count, FpPoly, Poly, Rat,
    RootIsolation,
};

const PRIMES: [u64; 10] = [2, 3, 5, 7, 11, 13, 101, 257, 7919, 1_000_003];

fn monic(coeffs: Vec<i64>) -> Poly {
    let mut c = coeffs;
    c.push(1);
    Poly::from_ints(&c)
}

fn linear(r: i64) -> Poly {
    Poly::from_ints(&[-r, 1])
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, ..ProptestConfig::default() })]

    #[test]
    fn factors_multiply_back(c in prop::collection::vec(-20i64..20, 1..8), pi in 0usize..10, seed in any::<u64>()) {
        let f = monic(c);
        let p = PRIMES[pi];
        let fp = FpPoly::from_poly(&f, p).unwrap();
        let factors = factor_mod_p(&fp, seed).unwrap();
        let mut prod = FpPoly::one(p);
        for (g, e) in &factors {
            prop_assert!(g.is_irreducible());
            prop_assert_eq!(g.leading(), 1);
            for _ in 0..*e {
                prod = prod.mul(g);
            }
        }
        prop_assert_eq!(prod, fp);
        let again = factor_mod_p(&FpPoly::from_poly(&f, p).unwrap(), seed.wrapping_add(1)).unwrap();
        prop_assert_eq!(again, factors);
    }

    #[test]
    fn discriminant_vanishes_iff_repeated_factor(c in prop::collection::vec(-20i64..20, 1..7), pi in 0usize..10) {
        let f = monic(c);
        let p = PRIMES[pi];
        let d = discriminant(&f).unwrap();
        let d = d.numer().clone();
        let factors = factor_mod_p(&FpPoly::from_poly(&f, p).unwrap(), 0).unwrap();
        let repeated = factors.iter().any(|(_, e)| *e > 1);
        prop_assert_eq!(d.mod_floor(&BigInt::from(p)).is_zero(), repeated);
    }

    #[test]
    fn resultant_vanishes_iff_common_factor(a in prop::collection::vec(-6i64..6, 1..5), b in prop::collection::vec(-6i64..6, 1..5), r in -4i64..4) {
        let f = &monic(a) * &linear(r);
        let g = monic(b);
        let common = !poly_gcd(&f, &g).is_constant();
        prop_assert_eq!(resultant(&f, &g).is_zero(), common);
        prop_assert!(resultant(&f, &(&g * &linear(r))).is_zero());
    }

    #[test]
    fn sturm_counts_known_roots(roots in prop::collection::btree_set(-30i64..30, 0..6), pos in prop::collection::btree_set(1i64..9, 0..3)) {
        let mut f = Poly::from_ints(&[1]);
        for &r in &roots {
            f = &f * &linear(r);
        }
        for &c in &pos {
            f = &f * &Poly::from_ints(&[c, 0, 1]);
        }
        prop_assume!(f.degree().unwrap_or(0) > 0);
        prop_assert_eq!(sturm_real_root_count(&f).unwrap(), roots.len());
        let iso = RootIsolation::new(&f).unwrap();
        prop_assert_eq!(iso.count(), roots.len());
        // each half-integer window holds exactly the integer roots inside it
        for &r in &roots {
            let lo = Rat::new(BigInt::from(2 * r - 1), BigInt::from(2));
            let hi = Rat::new(BigInt::from(2 * r + 1), BigInt::from(2));
            prop_assert_eq!(iso.count_in(&lo, &hi), 1);
        }
    }
}
