//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Exits nonzero when a criterion fails that is not on the known list.

mod common;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ultradyn::counterexamples::{
    build_example_finshadow, build_example_metric_dep, even_shift_witness, metric_dep_pseudo_orbit, paper_delta,
    unbounded_pseudo_orbit, visit_count_shadow,
};
use ultradyn::invlim::{
    check_mittag_leffler, lift_shadow_point, periodic_shift_tower, project_pseudo_orbit, sample_coherent_pseudo_orbit,
    shrinking_chain, stabilized_images, surjective_chain, zp_residue_tower, InverseSystem, Lift, MlVerdict,
};
use ultradyn::metric::{
    brute_force_shadow_search, check_finite_shadowing, gaps, is_pseudo_orbit, shadow_distances, shadow_start_point,
    shadows, two_sided_shadow_point, Enumeration, FiniteShadowingConfig, Search, Verdict,
};
use ultradyn::padic::{ball_partition_zp, classify_map, close_pairs, padic_dist, MapClass, PAdic, PAdicMap, PAdicSystem};
use ultradyn::partitions::{check_shadowreform, induced_ultrametric, DefiningSequence, ShadowreformConfig, ShadowreformVerdict};
use ultradyn::symbolic::{
    golden_mean, is_order_p, sample_shift_pseudo_orbit, shadow_point_order_p, Shift, ShiftPresentation,
};
use ultradyn::Exact;

/// Criteria that cannot pass as stated; see the README.
const KNOWN_UNATTAINABLE: &[&str] = &["12a"];

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn q(n: i64, d: i64) -> Exact {
    Exact::new(n, d)
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

fn c1() -> Outcome {
    let g = Shift::new(golden_mean()).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checked = 0;
    for k in 1..=5 {
        let delta = Exact::recip_of(k as u64 + 1);
        for _ in 0..200 {
            let len = rng.random_range(1..=30);
            let po = sample_shift_pseudo_orbit(&g, k, len, k + 2, &mut rng).map_err(err)?;
            let z = shadow_point_order_p(&g, 2, &po, k).map_err(err)?;
            let ds = shadow_distances(&g, &z, &po).map_err(err)?;
            ensure(ds.iter().all(|d| *d <= delta), || format!("k = {k}: {z:?} misses {:?}", po.points))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} pseudo-orbits, k = 1..5, zero failures"))
}

fn c2() -> Outcome {
    let mut sizes = Vec::new();
    for k in 1..=6 {
        let w = even_shift_witness(4, k, 12, 10).map_err(err)?;
        let shift = Shift::new(ultradyn::symbolic::even_shift(4)).map_err(err)?;
        ensure(w.delta == Exact::recip_of(k as u64 + 1), || format!("k = {k}: delta {}", w.delta))?;
        ensure(is_pseudo_orbit(&shift, &w.pseudo_orbit, &w.delta).map_err(err)?, || format!("k = {k}: not a pseudo-orbit"))?;
        ensure(w.candidate_depth == 10 && w.candidates == shift.cylinders(10).len(), || format!("k = {k}: wrong candidates"))?;
        ensure(w.shadow.is_none(), || format!("k = {k}: shadow {:?}", w.shadow))?;
        sizes.push(w.candidates);
    }
    Ok(format!("k = 1..6, no 1/2-shadow among all {} depth-10 cylinders", sizes[0]))
}

fn c3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut agree = 0;
    for _ in 0..200 {
        let (a, f) = common::random_presentation(&mut rng);
        let x = Shift::new(ShiftPresentation::new(a, f.clone())).map_err(err)?;
        for p in 1..=3 {
            let got = is_order_p(&x, p, 10).map_err(err)?.holds();
            let want = common::order_by_definition(a, &f, p, 10);
            ensure(got == want, || format!("A = {a}, F = {f:?}, p = {p}: {got} vs {want}"))?;
            agree += 1;
        }
    }
    Ok(format!("200 presentations x p = 1..3, {agree} agreements"))
}

fn c4() -> Outcome {
    let sys = PAdicSystem::zp(3, 12, PAdicMap::parse("poly:0,1,1").map_err(err)?).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for m in 1..=6 {
        for _ in 0..100 {
            let po = sys.sample_pseudo_orbit(sys.random_point(&mut rng), 50, m, &mut rng).map_err(err)?;
            let z = shadow_start_point(&sys, &po).map_err(err)?;
            ensure(z == po.points[0], || "start point changed".into())?;
            ensure(shadows(&sys, &z, &po, &po.delta).map_err(err)?, || format!("m = {m}: x_0 fails"))?;
        }
    }
    Ok("600 pseudo-orbits of length 50, delta = 3^-m for m = 1..6".into())
}

fn c5() -> Outcome {
    let sys = PAdicSystem::zp(5, 12, PAdicMap::translation(1)).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..100 {
        let m = 1 + seed % 4;
        let po = sys.sample_two_sided(sys.random_point(&mut rng), 25, m, &mut rng).map_err(err)?;
        let z = two_sided_shadow_point(&sys, &po).map_err(err)?;
        ensure(shadows(&sys, &z, &po, &po.delta).map_err(err)?, || format!("seed {seed}: x_0 fails"))?;
    }
    Ok("100 Z-indexed pseudo-orbits, H = 25".into())
}

fn c6() -> Outcome {
    let f = PAdicMap::DigitShift;
    let c = classify_map(&f, 3, 1, 1, 16, 10_000, 6).map_err(err)?;
    let want = MapClass::LocallyScaling { radius: q(1, 3), factor: Exact::from_int(3) };
    ensure(c.class == want && c.violations == 0 && c.pairs_checked == 10_000, || format!("{c:?}"))?;
    // Independent recount on the same pairs.
    for (x, y) in close_pairs(3, 1, 16, 10_000, 6).map_err(err)? {
        let (fx, fy) = (f.apply(&x).map_err(err)?, f.apply(&y).map_err(err)?);
        let n = fx.absolute_precision().min(fy.absolute_precision());
        let d = padic_dist(&x, &y).map_err(err)?;
        if d > Exact::pow(3, -n) {
            let di = padic_dist(&fx.truncate(n), &fy.truncate(n)).map_err(err)?;
            ensure(di == &d * &Exact::from_int(3), || format!("{x} {y}"))?;
        }
    }
    Ok("10000 pairs, (1/3, 3)-locally scaling, zero violations".into())
}

fn c7() -> Outcome {
    let depth = 7;
    let a = ball_partition_zp(3, depth, depth + 1).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let near = |x: &[u32], rng: &mut ChaCha8Rng| -> Vec<u32> {
        let keep = rng.random_range(0..=depth);
        (0..=depth).map(|i| if i < keep { x[i] } else { rng.random_range(0..3) }).collect()
    };
    let pt = |d: Vec<u32>| PAdic::from_digits(3, 0, d).map_err(err);
    let u = |x: &PAdic, y: &PAdic| induced_ultrametric(&a, x, y).map(|d| d.value).map_err(err);
    for _ in 0..10_000 {
        let xd: Vec<u32> = (0..=depth).map(|_| rng.random_range(0..3)).collect();
        let (yd, wd) = (near(&xd, &mut rng), near(&xd, &mut rng));
        let (x, y, w) = (pt(xd)?, pt(yd)?, pt(wd)?);
        ensure(u(&x, &w)? <= u(&x, &y)?.max(u(&y, &w)?), || format!("{x} {y} {w}"))?;
        let n = rng.random_range(1..=6usize);
        let t = Exact::new(rng.random_range(1..=1000i64), 1000);
        let lo = Exact::recip_of(n as u64 + 1);
        let eps = &lo + &((Exact::recip_of(n as u64) - lo.clone()) * t);
        let in_ball = u(&x, &y)? < eps;
        let same = a.carrier(n - 1, &x).map_err(err)? == a.carrier(n - 1, &y).map_err(err)?;
        ensure(in_ball == same, || format!("n = {n}, eps = {eps}: {x} {y}"))?;
    }
    Ok("10000 triples and ball/cell pairs, n = 1..6".into())
}

fn golden_tower(period: usize, top: usize) -> Result<InverseSystem, String> {
    periodic_shift_tower(&Shift::new(golden_mean()).map_err(err)?, period, top).map_err(err)
}

fn c8() -> Outcome {
    let sys = golden_tower(8, 5)?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..100 {
        let delta = [q(1, 4), q(1, 8), q(1, 12)][i % 3].clone();
        let po = sample_coherent_pseudo_orbit(&sys, 12, &delta, &mut rng).map_err(err)?;
        for m in 0..=sys.top() {
            let proj = project_pseudo_orbit(&sys, &po, m).map_err(err)?;
            let bound = &delta * &Exact::from_int(m as i64 + 1);
            let g = gaps(&sys.stage_system(m), &proj.points).map_err(err)?;
            ensure(g.iter().all(|x| *x < bound), || format!("stage {m} breaks (m+1)delta"))?;
        }
    }
    Ok("100 pseudo-orbits, stages 0..5".into())
}

fn c9() -> Outcome {
    let up = surjective_chain(10).map_err(err)?;
    for n in 0..=8 {
        let v = check_mittag_leffler(&up, n, 10).map_err(err)?;
        ensure(v == MlVerdict::HoldsAt { n, k: n + 1 }, || format!("surjective n = {n}: {v:?}"))?;
    }
    let down = shrinking_chain(10).map_err(err)?;
    for n in 0..10 {
        let v = check_mittag_leffler(&down, n, 10).map_err(err)?;
        ensure(v == MlVerdict::FailsToHorizon { n, horizon: 10 }, || format!("shrinking n = {n}: {v:?}"))?;
    }
    let s = stabilized_images(&up, 10).map_err(err)?;
    for m in 0..=10 {
        ensure(s.kept[m] == (0..up.stage(m).size()).collect::<Vec<_>>(), || format!("stage {m} lost points"))?;
        if m < 10 {
            ensure(s.system.bonding(m) == up.bonding(m), || format!("bonding {m} changed"))?;
        }
    }
    Ok("holds_at(N, N+1) for N <= 8, fails_to_horizon at 10, identity restriction".into())
}

fn c10() -> Outcome {
    // Period-10 stages: the glued word must close up within one period.
    let cases = [
        (golden_tower(10, 1)?, q(1, 4), 7, "golden"),
        (zp_residue_tower(3, 4, 1).map_err(err)?, q(1, 10), 10, "Z_3 translation"),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for (sys, delta, len, name) in &cases {
        for eps in [q(1, 2), q(1, 3)] {
            for seed in 0..50 {
                let po = sample_coherent_pseudo_orbit(sys, *len, delta, &mut rng).map_err(err)?;
                match lift_shadow_point(sys, &po, &eps).map_err(|e| format!("{name}, eps {eps}: {e}"))? {
                    Lift::Lifted { point, .. } => {
                        ensure(shadows(sys, &point, &po, &eps).map_err(err)?, || format!("{name} seed {seed}"))?
                    }
                    l => return Err(format!("{name}, eps {eps}, seed {seed}: {l:?}")),
                }
            }
        }
    }
    Ok("two systems x eps in {1/2, 1/3} x 50 seeds, all lifted and verified".into())
}

fn c11() -> Outcome {
    let n = 2;
    let (euc, dis) = build_example_metric_dep(24).map_err(err)?;
    let half = q(1, 2);
    let cfg = FiniteShadowingConfig {
        eps: half.clone(),
        delta: half.clone(),
        max_len: 8,
        budget: 1_000_000,
        mode: Enumeration::Exhaustive,
    };
    let rep = check_finite_shadowing(&dis, &dis.points(), &cfg).map_err(err)?;
    ensure(rep.verdict == Verdict::HoldsOnSample && rep.complete, || "discrete check failed".into())?;
    let horizon = 4 * n;
    let po = metric_dep_pseudo_orbit(&euc, n, horizon + 1, &half).map_err(err)?;
    let sup = po.points.iter().map(|&i| euc.value(i).clone()).fold(Exact::zero(), Exact::max);
    let starts = euc.starts_for(horizon);
    let s = brute_force_shadow_search(&euc, &po, &half, starts.clone()).map_err(err)?;
    ensure(s.is_absent(), || format!("euclidean search: {s:?}"))?;
    Ok(format!(
        "discrete: {} paths, all shadowed; euclidean: bounded by {sup}, no shadow among {} points",
        rep.examined,
        starts.len()
    ))
}

fn c12a() -> Outcome {
    let sys = build_example_finshadow(8200, 6).map_err(err)?;
    let po = unbounded_pseudo_orbit(&sys, &q(1, 4), 5).map_err(err)?;
    match brute_force_shadow_search(&sys, &po, &q(1, 2), sys.universe().iter().copied()).map_err(err)? {
        Search::Absent => Ok("certified, 5 crossings, no 1/2-shadow".into()),
        Search::Found(z) => Err(format!(
            "pseudo-orbit certified with 5 crossings, but {z:?} 1/2-shadows the finite prefix, as finite shadowing predicts"
        )),
        Search::Vacuous => Err("empty universe".into()),
    }
}

fn c12b() -> Outcome {
    let sys = build_example_finshadow(8200, 6).map_err(err)?;
    let eps = q(1, 2);
    let (n, delta) = paper_delta(&eps).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for i in 0..50 {
        let len = rng.random_range(1..=12);
        let po = sys.sample_pseudo_orbit(len, &delta, &mut rng).map_err(err)?;
        let v = visit_count_shadow(&po, n).map_err(err)?;
        ensure(shadows(&sys, &v.point, &po, &eps).map_err(err)?, || format!("sample {i}: {v:?}"))?;
    }
    Ok(format!("50 pseudo-orbits, delta = {delta}, all shadowed by the constructed point"))
}

fn c13() -> Outcome {
    let sys = PAdicSystem::zp(3, 8, PAdicMap::translation(1)).map_err(err)?;
    for m in 1..=4 {
        let a = ball_partition_zp(3, m + 1, 8).map_err(err)?;
        let cfg = ShadowreformConfig { m, n: m + 1, horizon: 20, paths: 100, seed: 13 };
        let r = check_shadowreform(&a, &sys, &cfg, &[], false).map_err(err)?;
        match r.verdict {
            ShadowreformVerdict::HoldsOnSample { witnesses } => {
                ensure(witnesses.len() == 100, || format!("m = {m}: {} witnesses", witnesses.len()))?
            }
            v => return Err(format!("m = {m}: {}", serde_json::to_string(&v).unwrap_or_default())),
        }
    }
    Ok("m = 1..4, n = m+1, 100/100 witnesses each, horizon 20".into())
}

fn main() {
    let criteria: [Criterion; 14] = [
        ("1", "order-p shadowing on the golden mean", c1),
        ("2", "even shift glued pseudo-orbits have no shadow", c2),
        ("3", "order detection matches the definition", c3),
        ("4", "start-point shadowing, x^2 + x on Z_3", c4),
        ("5", "two-sided shadowing, x + 1 on Z_5", c5),
        ("6", "digit shift locally scaling certificate", c6),
        ("7", "induced ultrametric laws", c7),
        ("8", "stage projection bound", c8),
        ("9", "Mittag-Leffler checker", c9),
        ("10", "shadow lifting", c10),
        ("11", "metric dependence example", c11),
        ("12a", "unbounded pseudo-orbit without shadow", c12a),
        ("12b", "visit-count shadows of sampled pseudo-orbits", c12b),
        ("13", "shadowreform for x + 1 on Z_3", c13),
    ];
    let mut unexpected = Vec::new();
    for (id, title, f) in criteria {
        let t = Instant::now();
        let out = f();
        let ms = t.elapsed().as_millis();
        match out {
            Ok(detail) => println!("PASS {id:>3}  {title}: {detail} [{ms} ms]"),
            Err(why) => {
                let known = KNOWN_UNATTAINABLE.contains(&id);
                println!("FAIL {id:>3}  {title}: {why}{} [{ms} ms]", if known { " (known)" } else { "" });
                if !known {
                    unexpected.push(id);
                }
            }
        }
    }
    if !unexpected.is_empty() {
        println!("unexpected failures: {}", unexpected.join(", "));
        std::process::exit(1);
    }
}
