use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;
use ultradyn::padic::{padic_dist, PAdic, PAdicMap};
use ultradyn::Exact;

const PRIMES: [u32; 4] = [2, 3, 5, 7];
const M: usize = 10;

fn modulus(p: u32) -> BigInt {
    BigInt::from(p).pow(M as u32)
}

fn z(p: u32, n: i64) -> PAdic {
    PAdic::from_int(p, n, M).unwrap()
}

/// `|x|_p` from the integer, by repeated division.
fn norm_of(p: u32, n: &BigInt) -> Exact {
    let pb = BigInt::from(p);
    let m = n.mod_floor(&modulus(p));
    if m == BigInt::from(0) {
        return Exact::zero();
    }
    let mut v = 0i64;
    let mut r = m;
    while r.is_multiple_of(&pb) {
        r /= &pb;
        v += 1;
    }
    Exact::pow(p as u64, -v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ring_laws_match_residues(pi in 0..4usize, a in -100_000i64..100_000, b in -100_000i64..100_000) {
        let p = PRIMES[pi];
        let md = modulus(p);
        let (x, y) = (z(p, a), z(p, b));
        let res = |t: &PAdic| t.truncate(M as i64).to_integer().unwrap();
        prop_assert_eq!(res(&x.add(&y).unwrap()), (BigInt::from(a) + b).mod_floor(&md));
        prop_assert_eq!(res(&x.sub(&y).unwrap()), (BigInt::from(a) - b).mod_floor(&md));
        prop_assert_eq!(res(&x.mul(&y).unwrap()), (BigInt::from(a) * b).mod_floor(&md));
        prop_assert_eq!(res(&x.neg()), (-BigInt::from(a)).mod_floor(&md));
        prop_assert_eq!(x.add(&y).unwrap(), y.add(&x).unwrap());
        prop_assert_eq!(padic_dist(&x, &y).unwrap(), norm_of(p, &(BigInt::from(a) - b)));
    }

    #[test]
    fn strong_triangle(pi in 0..4usize, a in any::<i32>(), b in any::<i32>(), c in any::<i32>()) {
        let p = PRIMES[pi];
        let (x, y, w) = (z(p, a as i64), z(p, b as i64), z(p, c as i64));
        let d = |s: &PAdic, t: &PAdic| padic_dist(s, t).unwrap();
        prop_assert!(d(&x, &w) <= d(&x, &y).max(d(&y, &w)));
        prop_assert_eq!(d(&x, &y), d(&y, &x));
    }

    #[test]
    fn integer_polynomials_are_one_lipschitz(
        pi in 0..4usize,
        coeffs in prop::collection::vec(-20i64..20, 1..5),
        a in any::<i32>(),
        b in any::<i32>(),
    ) {
        let p = PRIMES[pi];
        let f = PAdicMap::Polynomial { coeffs };
        let (x, y) = (z(p, a as i64), z(p, b as i64));
        let (fx, fy) = (f.apply(&x).unwrap(), f.apply(&y).unwrap());
        prop_assert!(padic_dist(&fx, &fy).unwrap() <= padic_dist(&x, &y).unwrap());
    }

    #[test]
    fn digit_shift_scales_close_pairs(pi in 0..4usize, a in 0i64..1_000_000, t in 1i64..1_000_000) {
        let p = PRIMES[pi] as i64;
        let (x, y) = (z(p as u32, a), z(p as u32, a + p * t));
        prop_assume!(padic_dist(&x, &y).unwrap() > Exact::pow(p as u64, -(M as i64 - 2)));
        let f = PAdicMap::DigitShift;
        let (fx, fy) = (f.apply(&x).unwrap(), f.apply(&y).unwrap());
        let n = fx.absolute_precision().min(fy.absolute_precision());
        let ratio = padic_dist(&fx.truncate(n), &fy.truncate(n)).unwrap() / padic_dist(&x, &y).unwrap();
        prop_assert_eq!(ratio, Exact::from_int(p));
    }

    #[test]
    fn literal_round_trip(pi in 0..4usize, a in any::<i32>(), l in -3i64..3) {
        let p = PRIMES[pi];
        let x = z(p, a as i64);
        let text = x.to_string();
        prop_assert_eq!(text.parse::<PAdic>().unwrap(), x);
        let shifted = PAdic::from_digits(p, l, vec![1, 0, 1]).unwrap();
        prop_assert_eq!(shifted.to_string().parse::<PAdic>().unwrap(), shifted);
    }
}
