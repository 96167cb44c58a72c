//! Metric dynamical systems, pseudo-orbits and shadowing predicates.
//!
//! A [`MetricSystem`] bundles a point type, an exact distance and a self-map.
//! Infinite pseudo-orbits are handled through a finite horizon, so every
//! verdict produced here is "up to horizon H" and, for searches, relative to
//! an explicitly supplied candidate set.

use std::fmt;

use rand::seq::IndexedRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Exact;

/// Structural facts a system declares about itself.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Flags {
    pub is_ultrametric: bool,
    pub lipschitz_bound: Option<Exact>,
    pub is_invertible: bool,
    pub is_isometry: bool,
}

pub trait MetricSystem {
    type Point: Clone + PartialEq + fmt::Debug;

    fn dist(&self, x: &Self::Point, y: &Self::Point) -> Result<Exact>;

    fn map(&self, x: &Self::Point) -> Result<Self::Point>;

    fn flags(&self) -> Flags;

    fn contains(&self, _x: &Self::Point) -> bool {
        true
    }

    fn inverse(&self, _x: &Self::Point) -> Result<Self::Point> {
        Err(Error::Unsupported("system has no inverse".into()))
    }
}

/// Index set of a (truncated) pseudo-orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IndexSet {
    /// `0..len`, a genuinely finite sequence.
    Finite,
    /// `ℕ` cut at `horizon`; points are `x_0..=x_H`.
    Natural { horizon: usize },
    /// `ℤ` cut to `[-H, H]`; points are stored from `x_{-H}` to `x_H`.
    Integer { horizon: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PseudoOrbit<P> {
    pub index: IndexSet,
    pub points: Vec<P>,
    pub delta: Exact,
}

impl<P: Clone> PseudoOrbit<P> {
    pub fn finite(points: Vec<P>, delta: Exact) -> PseudoOrbit<P> {
        PseudoOrbit { index: IndexSet::Finite, points, delta }
    }

    pub fn natural(points: Vec<P>, delta: Exact) -> PseudoOrbit<P> {
        let horizon = points.len().saturating_sub(1);
        PseudoOrbit { index: IndexSet::Natural { horizon }, points, delta }
    }

    /// `points` must have odd length `2H + 1`, listed from `x_{-H}`.
    pub fn integer(points: Vec<P>, delta: Exact) -> Result<PseudoOrbit<P>> {
        if points.len().is_multiple_of(2) {
            return Err(Error::Domain("a Z-indexed orbit needs 2H+1 points".into()));
        }
        let horizon = points.len() / 2;
        Ok(PseudoOrbit { index: IndexSet::Integer { horizon }, points, delta })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Offset of index 0 inside `points`.
    pub fn origin(&self) -> usize {
        match self.index {
            IndexSet::Integer { horizon } => horizon,
            _ => 0,
        }
    }

    /// The point carrying index `n`.
    pub fn at(&self, n: i64) -> Option<&P> {
        let k = n + self.origin() as i64;
        if k < 0 {
            return None;
        }
        self.points.get(k as usize)
    }

    /// Indices covered, in increasing order.
    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        let lo = -(self.origin() as i64);
        lo..=(self.points.len() as i64 - 1 + lo)
    }
}

fn check_members<S: MetricSystem>(sys: &S, seq: &[S::Point]) -> Result<()> {
    for (i, x) in seq.iter().enumerate() {
        if !sys.contains(x) {
            return Err(Error::Domain(format!("point {i} is outside the universe: {x:?}")));
        }
    }
    Ok(())
}

/// The jumps `d(f(x_n), x_{n+1})`.
pub fn gaps<S: MetricSystem>(sys: &S, seq: &[S::Point]) -> Result<Vec<Exact>> {
    check_members(sys, seq)?;
    seq.windows(2)
        .map(|w| sys.dist(&sys.map(&w[0])?, &w[1]))
        .collect()
}

/// True iff every consecutive pair satisfies `d(f(x_n), x_{n+1}) < delta`.
pub fn is_pseudo_orbit<S: MetricSystem>(sys: &S, seq: &[S::Point], delta: &Exact) -> Result<bool> {
    if seq.is_empty() {
        return Err(Error::Domain("empty sequence".into()));
    }
    check_members(sys, seq)?;
    for w in seq.windows(2) {
        if sys.dist(&sys.map(&w[0])?, &w[1])? >= *delta {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Builds a pseudo-orbit after checking the defining inequality.
pub fn checked_pseudo_orbit<S: MetricSystem>(
    sys: &S,
    index: IndexSet,
    points: Vec<S::Point>,
    delta: Exact,
) -> Result<PseudoOrbit<S::Point>> {
    if !is_pseudo_orbit(sys, &points, &delta)? {
        return Err(Error::Precondition(format!("not a {delta}-pseudo-orbit")));
    }
    Ok(PseudoOrbit { index, points, delta })
}

/// Distances `d(f^n(z), x_n)` over the whole index set, in index order.
pub fn shadow_distances<S: MetricSystem>(
    sys: &S,
    z: &S::Point,
    seq: &PseudoOrbit<S::Point>,
) -> Result<Vec<Exact>> {
    let o = seq.origin();
    if o > 0 && !sys.flags().is_invertible {
        return Err(Error::Unsupported("Z-indexed shadowing needs an invertible map".into()));
    }
    let mut out = vec![Exact::zero(); seq.len()];
    let mut y = z.clone();
    for k in o..seq.len() {
        if k > o {
            y = sys.map(&y)?;
        }
        out[k] = sys.dist(&y, &seq.points[k])?;
    }
    let mut y = z.clone();
    for k in (0..o).rev() {
        y = sys.inverse(&y)?;
        out[k] = sys.dist(&y, &seq.points[k])?;
    }
    Ok(out)
}

/// True iff `d(f^n(z), x_n) < eps` for every index of `seq`.
pub fn shadows<S: MetricSystem>(
    sys: &S,
    z: &S::Point,
    seq: &PseudoOrbit<S::Point>,
    eps: &Exact,
) -> Result<bool> {
    if !eps.is_positive() {
        return Err(Error::Precondition("eps must be positive".into()));
    }
    let o = seq.origin();
    if o > 0 && !sys.flags().is_invertible {
        return Err(Error::Unsupported("Z-indexed shadowing needs an invertible map".into()));
    }
    let mut y = z.clone();
    for k in o..seq.len() {
        if k > o {
            y = sys.map(&y)?;
        }
        if sys.dist(&y, &seq.points[k])? >= *eps {
            return Ok(false);
        }
    }
    let mut y = z.clone();
    for k in (0..o).rev() {
        y = sys.inverse(&y)?;
        if sys.dist(&y, &seq.points[k])? >= *eps {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of an exhaustive shadow search.
#[derive(Clone, Debug, PartialEq)]
pub enum Search<P> {
    Found(P),
    /// No candidate shadows; a certificate relative to the candidate set.
    Absent,
    /// The candidate set was empty.
    Vacuous,
}

impl<P> Search<P> {
    pub fn found(&self) -> Option<&P> {
        match self {
            Search::Found(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_absent(&self) -> bool {
        matches!(self, Search::Absent)
    }
}

/// First candidate, in iteration order, that `eps`-shadows `seq`.
pub fn brute_force_shadow_search<S, I>(
    sys: &S,
    seq: &PseudoOrbit<S::Point>,
    eps: &Exact,
    candidates: I,
) -> Result<Search<S::Point>>
where
    S: MetricSystem,
    I: IntoIterator<Item = S::Point>,
{
    let mut seen = false;
    for c in candidates {
        seen = true;
        if shadows(sys, &c, seq, eps)? {
            return Ok(Search::Found(c));
        }
    }
    Ok(if seen { Search::Absent } else { Search::Vacuous })
}

/// Parallel form of [`brute_force_shadow_search`]. The answer is the first
/// candidate in slice order, whatever the worker count.
pub fn brute_force_shadow_search_par<S>(
    sys: &S,
    seq: &PseudoOrbit<S::Point>,
    eps: &Exact,
    candidates: &[S::Point],
    workers: usize,
) -> Result<Search<S::Point>>
where
    S: MetricSystem + Sync,
    S::Point: Send + Sync,
{
    if candidates.is_empty() {
        return Ok(Search::Vacuous);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let hit = pool.install(|| {
        candidates
            .par_iter()
            .position_first(|c| !matches!(shadows(sys, c, seq, eps), Ok(false)))
    });
    match hit {
        None => Ok(Search::Absent),
        Some(i) => {
            // Re-run sequentially so an error surfaces as an error.
            shadows(sys, &candidates[i], seq, eps)?;
            Ok(Search::Found(candidates[i].clone()))
        }
    }
}

/// Start-point shadowing for 1-Lipschitz maps of ultrametric spaces.
///
/// With `d(f^n x_0, x_n) < δ` and `d(f x_n, x_{n+1}) < δ`, the strong
/// triangle inequality and the Lipschitz bound give the same bound at `n+1`,
/// so `x_0` itself shadows.
pub fn shadow_start_point<S: MetricSystem>(sys: &S, seq: &PseudoOrbit<S::Point>) -> Result<S::Point> {
    let fl = sys.flags();
    if !fl.is_ultrametric {
        return Err(Error::Precondition("system is not flagged ultrametric".into()));
    }
    match &fl.lipschitz_bound {
        Some(l) if *l <= Exact::one() => {}
        _ => return Err(Error::Precondition("map is not flagged 1-Lipschitz".into())),
    }
    if matches!(seq.index, IndexSet::Integer { .. }) {
        return Err(Error::Precondition("start-point shadowing expects an N-indexed orbit".into()));
    }
    seq.points
        .first()
        .cloned()
        .ok_or_else(|| Error::Domain("empty pseudo-orbit".into()))
}

/// Two-sided shadowing by `x_0` for surjective isometries of ultrametric spaces.
pub fn two_sided_shadow_point<S: MetricSystem>(
    sys: &S,
    seq: &PseudoOrbit<S::Point>,
) -> Result<S::Point> {
    let fl = sys.flags();
    if !fl.is_invertible {
        return Err(Error::Unsupported("two-sided shadowing needs an invertible map".into()));
    }
    if !fl.is_ultrametric || !fl.is_isometry {
        return Err(Error::Precondition("system is not an ultrametric isometry".into()));
    }
    if !matches!(seq.index, IndexSet::Integer { .. }) {
        return Err(Error::Precondition("expected a Z-indexed pseudo-orbit".into()));
    }
    // Spot-check the isometry flag on the orbit's own points.
    for w in seq.points.windows(2) {
        let before = sys.dist(&w[0], &w[1])?;
        let after = sys.dist(&sys.map(&w[0])?, &sys.map(&w[1])?)?;
        if before != after {
            return Err(Error::Precondition(format!(
                "isometry flag contradicted: {before} became {after}"
            )));
        }
    }
    Ok(seq.points[seq.origin()].clone())
}

/// Draws a pseudo-orbit by repeatedly perturbing the true image.
///
/// `perturb` receives `f(x_n)` and returns `x_{n+1}`; every step is checked
/// against `delta`.
pub fn sample_pseudo_orbit<S, R, F>(
    sys: &S,
    start: S::Point,
    len: usize,
    delta: &Exact,
    rng: &mut R,
    mut perturb: F,
) -> Result<PseudoOrbit<S::Point>>
where
    S: MetricSystem,
    R: Rng,
    F: FnMut(&S::Point, &mut R) -> Result<S::Point>,
{
    if len == 0 {
        return Err(Error::Domain("length must be positive".into()));
    }
    let mut pts = Vec::with_capacity(len);
    pts.push(start);
    while pts.len() < len {
        let fx = sys.map(pts.last().unwrap())?;
        let next = perturb(&fx, rng)?;
        if sys.dist(&fx, &next)? >= *delta {
            return Err(Error::Internal("perturbation left the delta-ball".into()));
        }
        pts.push(next);
    }
    Ok(PseudoOrbit::natural(pts, delta.clone()))
}

/// The points of `universe` strictly within `delta` of `fx`.
pub fn menu<S: MetricSystem>(
    sys: &S,
    universe: &[S::Point],
    fx: &S::Point,
    delta: &Exact,
) -> Result<Vec<S::Point>> {
    let mut out = Vec::new();
    for u in universe {
        if sys.dist(fx, u)? < *delta {
            out.push(u.clone());
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Enumeration {
    /// Every pseudo-orbit through the universe, depth first.
    Exhaustive,
    /// Uniform random walks on the delta-menus.
    Sampled { seed: u64 },
}

#[derive(Clone, Debug)]
pub struct FiniteShadowingConfig {
    pub eps: Exact,
    pub delta: Exact,
    pub max_len: usize,
    /// Upper bound on the number of pseudo-orbits examined.
    pub budget: usize,
    pub mode: Enumeration,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict<P> {
    /// Non-conclusive: every examined pseudo-orbit was shadowed.
    HoldsOnSample,
    Counterexample(PseudoOrbit<P>),
}

#[derive(Clone, Debug)]
pub struct FiniteShadowingReport<P> {
    pub verdict: Verdict<P>,
    pub examined: usize,
    /// The exhaustive enumeration finished inside the budget.
    pub complete: bool,
}

/// Searches for a finite `delta`-pseudo-orbit through `universe` that no
/// point of `universe` `eps`-shadows.
///
/// Only maximal pseudo-orbits are tested: a shadow of an extension also
/// shadows every prefix. Points whose image leaves the universe end a branch.
pub fn check_finite_shadowing<S: MetricSystem>(
    sys: &S,
    universe: &[S::Point],
    cfg: &FiniteShadowingConfig,
) -> Result<FiniteShadowingReport<S::Point>> {
    if !cfg.eps.is_positive() || !cfg.delta.is_positive() {
        return Err(Error::Precondition("eps and delta must be positive".into()));
    }
    if cfg.max_len == 0 {
        return Err(Error::Domain("max_len must be positive".into()));
    }
    let step_menu = |x: &S::Point| -> Result<Vec<S::Point>> {
        match sys.map(x) {
            Ok(fx) => menu(sys, universe, &fx, &cfg.delta),
            Err(Error::Domain(_)) => Ok(Vec::new()),
            Err(e) => Err(e),
        }
    };
    let mut examined = 0usize;
    let test = |pts: &[S::Point]| -> Result<Option<PseudoOrbit<S::Point>>> {
        let po = PseudoOrbit::finite(pts.to_vec(), cfg.delta.clone());
        match brute_force_shadow_search(sys, &po, &cfg.eps, universe.iter().cloned())? {
            Search::Found(_) => Ok(None),
            _ => Ok(Some(po)),
        }
    };
    match &cfg.mode {
        Enumeration::Exhaustive => {
            let mut path: Vec<S::Point> = Vec::new();
            let mut stack: Vec<Vec<S::Point>> = vec![universe.iter().rev().cloned().collect()];
            while let Some(top) = stack.last_mut() {
                let Some(next) = top.pop() else {
                    stack.pop();
                    path.pop();
                    continue;
                };
                path.push(next);
                let children = if path.len() < cfg.max_len {
                    step_menu(path.last().unwrap())?
                } else {
                    Vec::new()
                };
                if children.is_empty() {
                    if examined >= cfg.budget {
                        return Ok(FiniteShadowingReport {
                            verdict: Verdict::HoldsOnSample,
                            examined,
                            complete: false,
                        });
                    }
                    examined += 1;
                    if let Some(po) = test(&path)? {
                        return Ok(FiniteShadowingReport {
                            verdict: Verdict::Counterexample(po),
                            examined,
                            complete: false,
                        });
                    }
                    path.pop();
                } else {
                    stack.push(children.into_iter().rev().collect());
                }
            }
            Ok(FiniteShadowingReport { verdict: Verdict::HoldsOnSample, examined, complete: true })
        }
        Enumeration::Sampled { seed } => {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(*seed);
            for _ in 0..cfg.budget {
                let Some(start) = universe.choose(&mut rng) else { break };
                let len = rng.random_range(1..=cfg.max_len);
                let mut pts = vec![start.clone()];
                while pts.len() < len {
                    let m = step_menu(pts.last().unwrap())?;
                    match m.choose(&mut rng) {
                        Some(p) => pts.push(p.clone()),
                        None => break,
                    }
                }
                examined += 1;
                if let Some(po) = test(&pts)? {
                    return Ok(FiniteShadowingReport {
                        verdict: Verdict::Counterexample(po),
                        examined,
                        complete: false,
                    });
                }
            }
            Ok(FiniteShadowingReport { verdict: Verdict::HoldsOnSample, examined, complete: false })
        }
    }
}

/// A finite system given by an exact distance table and a map table.
#[derive(Clone, Debug)]
pub struct TableSystem {
    dist: Vec<Vec<Exact>>,
    map: Vec<usize>,
    inverse: Option<Vec<usize>>,
    flags: Flags,
}

impl TableSystem {
    /// Validates the tables and derives the flags exhaustively.
    pub fn new(dist: Vec<Vec<Exact>>, map: Vec<usize>) -> Result<TableSystem> {
        let n = dist.len();
        if map.len() != n || dist.iter().any(|r| r.len() != n) {
            return Err(Error::Domain("table sizes disagree".into()));
        }
        for i in 0..n {
            if map[i] >= n {
                return Err(Error::Domain(format!("map sends {i} outside the table")));
            }
            for j in 0..n {
                let d = &dist[i][j];
                if *d != dist[j][i] {
                    return Err(Error::Domain(format!("distance not symmetric at ({i},{j})")));
                }
                if (i == j) != d.is_zero() || *d < Exact::zero() {
                    return Err(Error::Domain(format!("bad distance at ({i},{j}): {d}")));
                }
            }
        }
        let mut lip = Exact::zero();
        for i in 0..n {
            for j in 0..i {
                let r = &dist[map[i]][map[j]] / &dist[i][j];
                lip = lip.max(r);
            }
        }
        let mut seen = vec![false; n];
        for &m in &map {
            seen[m] = true;
        }
        let bijective = seen.iter().all(|&b| b);
        let inverse = bijective.then(|| {
            let mut inv = vec![0; n];
            for (i, &m) in map.iter().enumerate() {
                inv[m] = i;
            }
            inv
        });
        let is_isometry = (0..n).all(|i| (0..n).all(|j| dist[map[i]][map[j]] == dist[i][j]));
        let is_ultrametric = (0..n).all(|i| {
            (0..n).all(|j| (0..n).all(|k| dist[i][k] <= dist[i][j].clone().max(dist[j][k].clone())))
        });
        let flags = Flags {
            is_ultrametric,
            lipschitz_bound: Some(lip),
            is_invertible: bijective,
            is_isometry,
        };
        Ok(TableSystem { dist, map, inverse, flags })
    }

    pub fn size(&self) -> usize {
        self.map.len()
    }

    pub fn points(&self) -> Vec<usize> {
        (0..self.size()).collect()
    }
}

impl MetricSystem for TableSystem {
    type Point = usize;

    fn dist(&self, x: &usize, y: &usize) -> Result<Exact> {
        self.dist
            .get(*x)
            .and_then(|r| r.get(*y))
            .cloned()
            .ok_or_else(|| Error::Domain(format!("no such point: {x} or {y}")))
    }

    fn map(&self, x: &usize) -> Result<usize> {
        self.map.get(*x).copied().ok_or_else(|| Error::Domain(format!("no such point: {x}")))
    }

    fn flags(&self) -> Flags {
        self.flags.clone()
    }

    fn contains(&self, x: &usize) -> bool {
        *x < self.size()
    }

    fn inverse(&self, x: &usize) -> Result<usize> {
        match &self.inverse {
            Some(inv) => inv.get(*x).copied().ok_or_else(|| Error::Domain(format!("no such point: {x}"))),
            None => Err(Error::Unsupported("map is not a bijection".into())),
        }
    }
}
