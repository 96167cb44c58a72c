mod common;

use common::{order_by_definition, LangOracle};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ultradyn::metric::{shadows, MetricSystem};
use ultradyn::symbolic::{
    is_order_p, sample_shift_pseudo_orbit, shadow_point_order_p, CylinderPoint, Shift, ShiftPresentation,
};

fn presentation() -> impl Strategy<Value = (u32, Vec<Vec<u32>>)> {
    (1..=3u32).prop_flat_map(|a| {
        let word = prop::collection::vec(0..a, 1..=3);
        (Just(a), prop::collection::vec(word, 0..=4))
    })
}

fn shift(a: u32, f: &[Vec<u32>]) -> Shift {
    Shift::new(ShiftPresentation::new(a, f.to_vec())).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shift_map_is_two_lipschitz(x in prop::collection::vec(0..3u32, 2..12), y in prop::collection::vec(0..3u32, 2..12)) {
        let n = x.len().min(y.len());
        let (x, y) = (CylinderPoint::new(x[..n].to_vec()), CylinderPoint::new(y[..n].to_vec()));
        let full = shift(3, &[]);
        let before = full.dist(&x, &y).unwrap();
        let after = full.dist(&full.map(&x).unwrap(), &full.map(&y).unwrap()).unwrap();
        prop_assert!(after <= before * ultradyn::Exact::from_int(2));
    }

    #[test]
    fn language_matches_oracle((a, f) in presentation(), n in 0..7usize) {
        let mut oracle = LangOracle::new(a, &f);
        prop_assert_eq!(shift(a, &f).language(n), oracle.language(n));
    }

    #[test]
    fn order_matches_definition((a, f) in presentation(), p in 1..=3usize) {
        let got = is_order_p(&shift(a, &f), p, 10).unwrap().holds();
        prop_assert_eq!(got, order_by_definition(a, &f, p, 10));
    }

    #[test]
    fn language_is_factor_closed((a, f) in presentation(), n in 1..7usize) {
        let x = shift(a, &f);
        for w in x.language(n) {
            for i in 0..n {
                for j in i..=n {
                    prop_assert!(x.contains(&w[i..j]), "{:?} in {:?}", &w[i..j], w);
                }
            }
        }
    }

    #[test]
    fn glued_point_shadows((a, f) in presentation(), extra in 0..2usize, seed in any::<u64>()) {
        let x = shift(a, &f);
        let p = x.max_forbidden_len().max(1);
        let k = p - 1 + extra;
        prop_assume!(!x.language(k + 2).is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let po = sample_shift_pseudo_orbit(&x, k, 15, k + 2, &mut rng).unwrap();
        let z = shadow_point_order_p(&x, p, &po, k).unwrap();
        prop_assert!(shadows(&x, &z, &po, &po.delta).unwrap());
    }
}
