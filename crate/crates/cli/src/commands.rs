use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use ultradyn::counterexamples::{
    build_example_finshadow, build_example_metric_dep, continuity_modulus, even_shift_witness,
    metric_dep_pseudo_orbit, paper_delta, unbounded_pseudo_orbit, visit_count_shadow, block,
};
use ultradyn::invlim::{
    check_mittag_leffler, lift_shadow_point, periodic_shift_tower, sample_coherent_pseudo_orbit,
    stabilized_images, Lift, MlVerdict,
};
use ultradyn::metric::{
    brute_force_shadow_search, check_finite_shadowing, shadow_start_point, shadows, two_sided_shadow_point,
    Enumeration, FiniteShadowingConfig, MetricSystem, Search, TableSystem, Verdict,
};
use ultradyn::padic::{ball_partition_zp, classify_map, padic_orbit, MapClass, PAdic, PAdicMap, PAdicSystem};
use ultradyn::partitions::{check_shadowreform, DefiningSequence, ShadowreformConfig, ShadowreformReport, ShiftCylinders};
use ultradyn::scalar::Exact;
use ultradyn::symbolic::{
    is_order_p, sample_shift_pseudo_orbit, shadow_point_order_p, Shift, ShiftPresentation,
};

use crate::input::{load, load_inverse_system, load_shift, SystemFile};
use crate::report::{json, Report};
use crate::{Cli, Cmd, Construct, Example, Failure, PadicOp};

const MAX_UNIVERSE: usize = 1 << 16;

pub fn run(cli: &Cli) -> Result<Report, Failure> {
    let g = &cli.global;
    let config = json(cli);
    let name = experiment_name(&cli.cmd);
    let mut r = Report::new(&name, config, g.seed);
    match &cli.cmd {
        Cmd::ShadowCheck { file, eps, delta, sampled } => shadow_check(&mut r, cli, file, eps, delta, *sampled)?,
        Cmd::OrderDetect { file, pmax } => order_detect(&mut r, file, *pmax, g.depth.unwrap_or(12))?,
        Cmd::ShadowConstruct { how } => construct(&mut r, cli, how)?,
        Cmd::Padic { op } => padic(&mut r, cli, op)?,
        Cmd::MlCheck { file, n, stabilize } => ml_check(&mut r, file, *n, g.horizon, *stabilize)?,
        Cmd::Shadowreform { system, m, n, paths } => {
            let n = n.unwrap_or(m + 1);
            let cfg = ShadowreformConfig { m: *m, n, horizon: g.horizon.unwrap_or(20), paths: *paths, seed: g.seed };
            match (&system.map, &system.shift, system.p) {
                (Some(map), None, Some(p)) => {
                    let prec = system.precision.unwrap_or((n + 3).max(8));
                    let sys = PAdicSystem::zp(p, prec, PAdicMap::parse(map)?)?;
                    let a = ball_partition_zp(p, n, prec)?;
                    let rep = check_shadowreform(&a, &sys, &cfg, &[], false)?;
                    let desc = format!("analytic PO table of the p = {p} balls; witnesses tried from cell representatives");
                    reform_report(&mut r, rep, &desc);
                }
                (None, Some(file), _) => {
                    let shift = load_shift(file)?;
                    let depth = g.depth.unwrap_or(cfg.horizon + n + 1);
                    let a = ShiftCylinders::new(shift.clone(), n, depth);
                    let pool = shift.cylinders(depth);
                    let rep = check_shadowreform(&a, &shift, &cfg, &pool, false)?;
                    let desc = format!("all {} depth-{depth} cylinders", pool.len());
                    reform_report(&mut r, rep, &desc);
                }
                _ => return Err(Failure::usage("give either --map with --p, or --shift")),
            }
        }
        Cmd::Repro { example } => repro(&mut r, cli, example)?,
    }
    Ok(r.finish())
}

fn experiment_name(cmd: &Cmd) -> String {
    match cmd {
        Cmd::ShadowCheck { .. } => "shadow-check".into(),
        Cmd::OrderDetect { .. } => "order-detect".into(),
        Cmd::ShadowConstruct { how } => format!(
            "shadow-construct/{}",
            match how {
                Construct::StartPoint { .. } => "start-point",
                Construct::TwoSided { .. } => "two-sided",
                Construct::OrderP { .. } => "order-p",
                Construct::Lift { .. } => "lift",
            }
        ),
        Cmd::Padic { op } => format!(
            "padic/{}",
            match op {
                PadicOp::Orbit { .. } => "orbit",
                PadicOp::Classify { .. } => "classify",
                PadicOp::Partition { .. } => "partition",
            }
        ),
        Cmd::MlCheck { .. } => "ml-check".into(),
        Cmd::Shadowreform { .. } => "shadowreform".into(),
        Cmd::Repro { example } => format!(
            "repro/{}",
            match example {
                Example::MetricDependence { .. } => "metric-dependence",
                Example::FiniteShadowing { .. } => "finite-shadowing",
                Example::EvenShift { .. } => "even-shift",
            }
        ),
    }
}

fn rng(cli: &Cli) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cli.global.seed)
}

fn finite_check<S, F>(
    r: &mut Report,
    sys: &S,
    universe: &[S::Point],
    cfg: &FiniteShadowingConfig,
    show: F,
    desc: &str,
) -> Result<(), Failure>
where
    S: MetricSystem,
    F: Fn(&S::Point) -> Value,
{
    let rep = check_finite_shadowing(sys, universe, cfg)?;
    r.put("examined", &rep.examined);
    r.put("complete", &rep.complete);
    match rep.verdict {
        Verdict::HoldsOnSample => {
            let v = if rep.complete { "holds_to_horizon" } else { "holds_on_sample" };
            r.push("finite_shadowing", v, true).horizon(cfg.max_len).candidates(desc);
        }
        Verdict::Counterexample(po) => {
            let pts: Vec<Value> = po.points.iter().map(show).collect();
            r.push("finite_shadowing", "counterexample", false)
                .horizon(cfg.max_len)
                .candidates(desc)
                .witness(&json!({ "pseudo_orbit": pts, "delta": po.delta }));
        }
    }
    Ok(())
}

fn shadow_check(r: &mut Report, cli: &Cli, file: &Path, eps: &Exact, delta: &Exact, sampled: bool) -> Result<(), Failure> {
    let g = &cli.global;
    let cfg = FiniteShadowingConfig {
        eps: eps.clone(),
        delta: delta.clone(),
        max_len: g.horizon.unwrap_or(8),
        budget: g.budget.unwrap_or(100_000),
        mode: if sampled { Enumeration::Sampled { seed: g.seed } } else { Enumeration::Exhaustive },
    };
    match load::<SystemFile>(file)? {
        SystemFile::Table { dist, map } => {
            let sys = TableSystem::new(dist, map)?;
            let desc = format!("all {} table points", sys.size());
            finite_check(r, &sys, &sys.points(), &cfg, json, &desc)
        }
        SystemFile::Shift { alphabet_size, forbidden, period } => {
            let shift = Shift::new(ShiftPresentation::new(alphabet_size, forbidden))?;
            let period = period.or(g.depth).unwrap_or(6);
            let tower = periodic_shift_tower(&shift, period, 0)?;
            let stage = tower.stage_system(0);
            let labels = tower.stage(0).labels();
            let desc = format!("all {} points of period {period}", labels.len());
            finite_check(r, &stage, &stage.points(), &cfg, |&x| json(&labels[x]), &desc)
        }
        SystemFile::Padic { p, precision, map } => {
            let sys = PAdicSystem::zp(p, precision, PAdicMap::parse(&map)?)?;
            let size = (p as usize).checked_pow(precision as u32).filter(|&s| s <= MAX_UNIVERSE);
            let size = size.ok_or_else(|| Failure::usage(format!("Z/{p}^{precision} exceeds {MAX_UNIVERSE} points")))?;
            let universe: Vec<PAdic> = (0..size as i64).map(|n| sys.point(n)).collect();
            let desc = format!("all {size} residues mod {p}^{precision}");
            finite_check(r, &sys, &universe, &cfg, json, &desc)
        }
    }
}

fn order_detect(r: &mut Report, file: &Path, pmax: usize, depth: usize) -> Result<(), Failure> {
    if pmax == 0 {
        return Err(Failure::usage("--pmax must be positive"));
    }
    let shift = load_shift(file)?;
    let mut rows = Vec::new();
    let mut found = None;
    for p in 1..=pmax.min(depth) {
        let v = is_order_p(&shift, p, depth)?;
        let holds = v.holds();
        rows.push(json!({ "p": p, "result": v }));
        if holds {
            found = Some(p);
            break;
        }
    }
    r.put("orders", &rows);
    r.put("min_order", &found);
    let desc = format!("all words with |u| + |w| + p - 1 ≤ {depth}");
    match found {
        Some(p) => r.push("min_order", &format!("order_{p}"), true).horizon(depth).candidates(desc),
        None => r.push("min_order", "none_up_to_pmax", false).horizon(depth).candidates(desc),
    };
    Ok(())
}

fn tally<T: Serialize>(r: &mut Report, name: &str, horizon: usize, desc: &str, failures: Vec<T>, total: usize) {
    r.put("samples", &total);
    r.put("failures", &failures.len());
    let e = match failures.first() {
        None => r.push(name, "shadowed", true),
        Some(f) => {
            let e = r.push(name, "shadow_failed", false);
            e.witness(f);
            e
        }
    };
    e.horizon(horizon).candidates(desc);
}

fn construct(r: &mut Report, cli: &Cli, how: &Construct) -> Result<(), Failure> {
    let mut rng = rng(cli);
    match how {
        Construct::StartPoint { map, p, precision, m, len, samples } => {
            let sys = PAdicSystem::zp(*p, *precision, PAdicMap::parse(map)?)?;
            let mut failures = Vec::new();
            let mut starts = Vec::new();
            for _ in 0..*samples {
                let po = sys.sample_pseudo_orbit(sys.random_point(&mut rng), *len, *m, &mut rng)?;
                let z = shadow_start_point(&sys, &po)?;
                if !shadows(&sys, &z, &po, &po.delta)? {
                    failures.push(json!({ "pseudo_orbit": po.points, "delta": po.delta }));
                }
                starts.push(z);
            }
            r.put("delta", &Exact::pow(*p as u64, -(*m as i64)));
            r.put("shadows", &starts);
            tally(r, "start_point_shadow", len.saturating_sub(1), "the start point of each pseudo-orbit", failures, *samples);
        }
        Construct::TwoSided { map, p, precision, m, samples } => {
            let sys = PAdicSystem::zp(*p, *precision, PAdicMap::parse(map)?)?;
            let h = cli.global.horizon.unwrap_or(25);
            let mut failures = Vec::new();
            let mut starts = Vec::new();
            for _ in 0..*samples {
                let po = sys.sample_two_sided(sys.random_point(&mut rng), h, *m, &mut rng)?;
                let z = two_sided_shadow_point(&sys, &po)?;
                if !shadows(&sys, &z, &po, &po.delta)? {
                    failures.push(json!({ "pseudo_orbit": po.points, "delta": po.delta }));
                }
                starts.push(z);
            }
            r.put("delta", &Exact::pow(*p as u64, -(*m as i64)));
            r.put("shadows", &starts);
            tally(r, "two_sided_shadow", h, "x_0 of each Z-indexed pseudo-orbit", failures, *samples);
        }
        Construct::OrderP { file, k, len, samples } => {
            let shift = load_shift(file)?;
            let p = shift.max_forbidden_len().max(1);
            let depth = cli.global.depth.unwrap_or(k + 2);
            let mut failures = Vec::new();
            let mut built = Vec::new();
            for _ in 0..*samples {
                let po = sample_shift_pseudo_orbit(&shift, *k, *len, depth, &mut rng)?;
                let z = shadow_point_order_p(&shift, p, &po, *k)?;
                if !shadows(&shift, &z, &po, &po.delta)? {
                    failures.push(json!({ "pseudo_orbit": po.points, "shadow": z }));
                }
                built.push(z);
            }
            r.put("order", &p);
            r.put("delta", &Exact::recip_of(*k as u64 + 1));
            r.put("shadows", &built);
            tally(r, "order_p_shadow", len.saturating_sub(1), "the glued first-symbol point", failures, *samples);
        }
        Construct::Lift { file, eps, delta, len, samples } => {
            let sys = load_inverse_system(file)?;
            let mut failures = Vec::new();
            let mut lifts = Vec::new();
            for _ in 0..*samples {
                let po = sample_coherent_pseudo_orbit(&sys, *len, delta, &mut rng)?;
                let lift = lift_shadow_point(&sys, &po, eps)?;
                if let Lift::NoStageShadow { .. } = lift {
                    failures.push(json!({ "pseudo_orbit": po.points, "lift": lift }));
                }
                lifts.push(lift);
            }
            r.put("lifts", &lifts);
            tally(r, "lifted_shadow", len.saturating_sub(1), "all points of the stage below 1/eps", failures, *samples);
        }
    }
    Ok(())
}

fn parse_point(s: &str, p: u32, prec: usize) -> Result<PAdic, Failure> {
    if s.contains('=') {
        let x: PAdic = s.parse()?;
        if x.prime() != p {
            return Err(Failure::usage(format!("--x0 is a {}-adic literal, --p is {p}", x.prime())));
        }
        return Ok(x);
    }
    let q: Exact = s.parse()?;
    Ok(PAdic::from_exact(p, &q, prec)?)
}

fn padic(r: &mut Report, cli: &Cli, op: &PadicOp) -> Result<(), Failure> {
    let g = &cli.global;
    match op {
        PadicOp::Orbit { map, p, x0, steps, precision } => {
            let f = PAdicMap::parse(map)?;
            let x = parse_point(x0, *p, *precision)?;
            let orbit = padic_orbit(&f, &x, *steps)?;
            let loss: Vec<i64> = orbit.precision.iter().map(|q| orbit.precision[0] - q).collect();
            r.push("orbit", "computed", true).horizon(*steps).candidates("none");
            r.put("orbit", &orbit);
            r.put("precision_loss", &loss);
        }
        PadicOp::Classify { map, p, k, m, precision } => {
            let f = PAdicMap::parse(map)?;
            let c = classify_map(&f, *p, *k, *m, *precision, g.budget.unwrap_or(1000), g.seed)?;
            let verdict = match &c.class {
                MapClass::OneLipschitz => "one_lipschitz",
                MapClass::LocallyScaling { .. } => "locally_scaling",
                MapClass::EventualSimilarity { .. } => "eventual_similarity",
                MapClass::Unknown => "unknown",
            };
            let desc = format!("{} seeded pairs at precision {precision}", c.pairs_checked);
            r.push("classification", verdict, c.class != MapClass::Unknown && c.violations == 0)
                .candidates(desc)
                .witness(&c);
            r.put("certified", &c.certified);
        }
        PadicOp::Partition { p, n, precision } => {
            let a = ball_partition_zp(*p, *n, precision.unwrap_or(*n))?;
            let size = (*p as usize).checked_pow(*n as u32).filter(|&s| s <= g.budget.unwrap_or(4096));
            let size = size.ok_or_else(|| Failure::usage("partition exceeds --budget cells"))?;
            let mut rows = Vec::with_capacity(size);
            let mut consistent = true;
            for cell in a.cells(*n)? {
                let rep = a.representative(*n, &cell)?;
                consistent &= a.carrier(*n, &rep)? == cell;
                rows.push(json!({ "cell": cell, "representative": rep }));
            }
            consistent &= rows.len() == size;
            r.put("radius", &a.ball_radius(*n));
            r.put("cells", &rows);
            r.push("partition", if consistent { "consistent" } else { "inconsistent" }, consistent)
                .horizon(*n)
                .candidates(format!("all {size} digit words of length {n}"));
        }
    }
    Ok(())
}

fn ml_check(r: &mut Report, file: &Path, n: usize, horizon: Option<usize>, stabilize: bool) -> Result<(), Failure> {
    let sys = load_inverse_system(file)?;
    let horizon = horizon.unwrap_or(sys.top());
    let v = check_mittag_leffler(&sys, n, horizon)?;
    let holds = v.holds();
    let verdict = match v {
        MlVerdict::HoldsAt { .. } => "holds_at",
        MlVerdict::FailsToHorizon { .. } => "fails_to_horizon",
    };
    r.push("mittag_leffler", verdict, holds)
        .horizon(horizon)
        .candidates("exact images of every stage up to the horizon")
        .witness(&v);
    if stabilize {
        let s = stabilized_images(&sys, horizon)?;
        r.put("kept", &s.kept);
        r.put("stabilized", &s.stabilized);
        let spec: Value = serde_json::from_str(&s.system.to_json()).expect("system JSON parses");
        r.put("stable_system", &spec);
    }
    Ok(())
}

fn reform_report<C: Serialize, P: Serialize>(r: &mut Report, rep: ShadowreformReport<C, P>, desc: &str) {
    r.put("paths_checked", &rep.paths_checked);
    r.put("table_conclusive", &rep.table_conclusive);
    let holds = rep.verdict.holds();
    let v = json(&rep.verdict);
    let e = if holds {
        let rows = v["witnesses"].as_array().cloned().unwrap_or_default();
        let from_start = rows.iter().filter(|w| w["from_start_cell"] == true).count();
        r.put("witness_rate", &format!("{}/{}", rows.len(), rep.paths_checked));
        r.put("from_start_cell", &from_start);
        let e = r.push("shadowreform", "holds_on_sample", true);
        if let Some(first) = rows.first() {
            e.witness(first);
        }
        e
    } else {
        let e = r.push("shadowreform", "counterexample_candidate", false);
        e.witness(&v);
        e
    };
    e.horizon(rep.horizon).candidates(desc);
}

fn repro(r: &mut Report, cli: &Cli, example: &Example) -> Result<(), Failure> {
    match example {
        Example::MetricDependence { n, delta, eps, range, max_len } => {
            let (euc, dis) = build_example_metric_dep(*range)?;
            let horizon = cli.global.horizon.unwrap_or(4 * n);
            let po = metric_dep_pseudo_orbit(&euc, *n, horizon + 1, delta)?;
            let bound = po.points.iter().map(|&i| euc.value(i).clone()).fold(Exact::zero(), Exact::max);
            let labels: Vec<i64> = po.points.iter().map(|&i| euc.label(i)).collect();
            r.push("euclidean_pseudo_orbit", "bounded_pseudo_orbit_certified", true)
                .horizon(horizon)
                .candidates("none")
                .witness(&json!({ "labels": labels, "delta": delta, "sup": bound }));
            let starts = euc.starts_for(horizon);
            let desc = format!("all {} points whose orbit stays in the truncation to the horizon", starts.len());
            match brute_force_shadow_search(&euc, &po, eps, starts)? {
                Search::Absent => r.push("euclidean_shadow", "no_shadow_found", true),
                Search::Vacuous => r.push("euclidean_shadow", "vacuous", false),
                Search::Found(z) => {
                    let e = r.push("euclidean_shadow", "shadow_found", false);
                    e.witness(&euc.label(z));
                    e
                }
            }
            .horizon(horizon)
            .candidates(desc);
            let cfg = FiniteShadowingConfig {
                eps: eps.clone(),
                delta: delta.clone(),
                max_len: *max_len,
                budget: cli.global.budget.unwrap_or(1_000_000),
                mode: Enumeration::Exhaustive,
            };
            let rep = check_finite_shadowing(&dis, &dis.points(), &cfg)?;
            let desc = format!("all {} points", dis.size());
            match rep.verdict {
                Verdict::HoldsOnSample if rep.complete => r.push("discrete_finite_shadowing", "holds_to_horizon", true),
                Verdict::HoldsOnSample => r.push("discrete_finite_shadowing", "budget_exhausted", false),
                Verdict::Counterexample(po) => {
                    let labels: Vec<i64> = po.points.iter().map(|&i| dis.label(i)).collect();
                    let e = r.push("discrete_finite_shadowing", "counterexample", false);
                    e.witness(&labels);
                    e
                }
            }
            .horizon(*max_len)
            .candidates(desc);
            r.put("discrete_examined", &rep.examined);
        }
        Example::FiniteShadowing { blocks, max_l, delta, eps, crossings, samples, max_len } => {
            let sys = build_example_finshadow(*blocks, *max_l)?;
            let po = unbounded_pseudo_orbit(&sys, delta, *crossings)?;
            let lens: Vec<usize> = po.points.iter().map(|x| block(x.k).len()).collect();
            r.push("unbounded_pseudo_orbit", "certified", true)
                .horizon(*crossings)
                .candidates("none")
                .witness(&json!({ "points": po.points, "block_lengths": lens }));
            // Finite shadowing predicts a shadow for every finite prefix.
            let desc = format!("all {} points of the first {blocks} blocks", sys.universe().len());
            match brute_force_shadow_search(&sys, &po, eps, sys.universe().iter().copied())? {
                Search::Found(z) => {
                    let e = r.push("prefix_shadow", "shadowed", true);
                    e.witness(&json!({ "point": z, "block": block(z.k) }));
                    e
                }
                Search::Absent => r.push("prefix_shadow", "no_shadow_found", false),
                Search::Vacuous => r.push("prefix_shadow", "vacuous", false),
            }
            .horizon(*crossings)
            .candidates(desc);
            let (nn, small) = paper_delta(eps)?;
            let mut rng = rng(cli);
            let mut failures = Vec::new();
            for _ in 0..*samples {
                let len = rng.random_range(1..=*max_len);
                let s = sys.sample_pseudo_orbit(len, &small, &mut rng)?;
                let v = visit_count_shadow(&s, nn)?;
                if !shadows(&sys, &v.point, &s, eps)? {
                    failures.push(json!({ "pseudo_orbit": s.points, "shadow": v }));
                }
            }
            r.put("sample_delta", &small);
            r.put("sample_failures", &failures.len());
            let e = match failures.first() {
                None => r.push("visit_count_shadows", "shadowed", true),
                Some(f) => {
                    let e = r.push("visit_count_shadows", "shadow_failed", false);
                    e.witness(f);
                    e
                }
            };
            e.horizon(*max_len).candidates(format!("{samples} sampled pseudo-orbits, one constructed shadow each"));
            let mut moduli = Vec::new();
            for b in [30u64, 60, 120] {
                let small_sys = build_example_finshadow(b, *max_l)?;
                let m = continuity_modulus(&small_sys, small_sys.universe(), eps)?;
                moduli.push(json!({ "blocks": b, "points": small_sys.universe().len(), "modulus": m }));
            }
            r.put("continuity_moduli", &moduli);
        }
        Example::EvenShift { k_max, truncation, order_depth, candidate_depth } => {
            let mut rows = Vec::new();
            for k in 1..=*k_max {
                let w = even_shift_witness(*truncation, k, *order_depth, *candidate_depth)?;
                let desc = format!("all {} depth-{} cylinders", w.candidates, w.candidate_depth);
                let e = match &w.shadow {
                    None => r.push(&format!("even_shift_k{k}"), "no_shadow_found", true),
                    Some(z) => {
                        let e = r.push(&format!("even_shift_k{k}"), "shadow_found", false);
                        e.witness(z);
                        e
                    }
                };
                e.horizon(w.pseudo_orbit.len().saturating_sub(1)).candidates(desc);
                rows.push(w);
            }
            r.put("glued", &rows);
        }
    }
    Ok(())
}
