use std::collections::BTreeSet;

use proptest::prelude::*;
use ultradyn::invlim::{check_mittag_leffler, zp_residue_tower, InverseSystem, MlVerdict, Stage};
use ultradyn::metric::MetricSystem;
use ultradyn::Exact;

/// `d(i, j) = max(h_i, h_j)` for `i ≠ j`, an ultrametric bounded by 1.
fn stage(heights: &[u64]) -> Stage {
    let n = heights.len();
    let dist = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Exact::zero() } else { Exact::recip_of(heights[i].min(heights[j])) })
                .collect()
        })
        .collect();
    Stage::from_table((0..n).map(|i| i.to_string()).collect(), dist).unwrap()
}

/// Stage sizes and arbitrary bondings, no self-maps.
fn system() -> impl Strategy<Value = InverseSystem> {
    prop::collection::vec(1..6usize, 2..8)
        .prop_flat_map(|sizes| {
            let heights: Vec<_> = sizes.iter().map(|&s| prop::collection::vec(1..4u64, s)).collect();
            let bondings: Vec<_> =
                (0..sizes.len() - 1).map(|m| prop::collection::vec(0..sizes[m], sizes[m + 1])).collect();
            (heights, bondings)
        })
        .prop_map(|(h, g)| InverseSystem::new(h.iter().map(|x| stage(x)).collect(), g, None).unwrap())
}

fn image(sys: &InverseSystem, from: usize, to: usize) -> BTreeSet<usize> {
    (0..sys.stage(from).size())
        .map(|mut y| {
            for m in (to..from).rev() {
                y = sys.bonding(m)[y];
            }
            y
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn product_metric_is_a_metric(sys in system()) {
        let pts = sys.coherent_points();
        prop_assert_eq!(pts.len(), sys.stage(sys.top()).size());
        for a in &pts {
            prop_assert!(sys.is_coherent(a));
            for b in &pts {
                let dab = sys.product_metric(a, b).unwrap();
                prop_assert_eq!(dab.is_zero(), a == b);
                prop_assert_eq!(&dab, &sys.product_metric(b, a).unwrap());
                for c in &pts {
                    let sum = &dab + &sys.product_metric(b, c).unwrap();
                    prop_assert!(sys.product_metric(a, c).unwrap() <= sum);
                }
            }
        }
    }

    #[test]
    fn ml_verdict_matches_images(sys in system(), n in 0..3usize) {
        let h = sys.top();
        prop_assume!(n < h);
        for j in n..h {
            prop_assert!(image(&sys, j + 1, n).is_subset(&image(&sys, j, n)));
        }
        let last = image(&sys, h, n);
        match check_mittag_leffler(&sys, n, h).unwrap() {
            MlVerdict::HoldsAt { n: n2, k } => {
                prop_assert_eq!(n2, n);
                prop_assert!(n < k && k < h);
                for j in k..=h {
                    prop_assert_eq!(&image(&sys, j, n), &last);
                }
                prop_assert!(k == n + 1 || image(&sys, k - 1, n) != last);
            }
            MlVerdict::FailsToHorizon { .. } => prop_assert!(h == n + 1 || image(&sys, h - 1, n) != last),
        }
    }

    #[test]
    fn induced_map_is_coherent(top in 1..4usize, c in -5i64..5) {
        let sys = zp_residue_tower(3, top, c).unwrap();
        for a in sys.coherent_points() {
            let b = sys.map(&a).unwrap();
            prop_assert!(sys.is_coherent(&b));
            for m in 0..=top {
                prop_assert_eq!(b.coords[m], sys.self_map(m).unwrap()[a.coords[m]]);
            }
        }
    }
}
