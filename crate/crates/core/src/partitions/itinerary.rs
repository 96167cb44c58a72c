use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{ancestor, DefiningSequence};
use crate::error::{Error, Result};
use crate::metric::MetricSystem;
use crate::scalar::Exact;
use crate::symbolic::ShiftPresentation;

fn orbit<S: MetricSystem>(sys: &S, x: &S::Point, steps: usize) -> Result<Vec<S::Point>> {
    let mut out = Vec::with_capacity(steps + 1);
    out.push(x.clone());
    for _ in 0..steps {
        let next = sys.map(out.last().unwrap())?;
        out.push(next);
    }
    Ok(out)
}

/// `θ(U_n)(x)` for `n = 0..=levels`, each truncated to `horizon + 1` cells.
pub fn theta_itinerary<A, S>(
    a: &A,
    sys: &S,
    x: &A::Point,
    levels: usize,
    horizon: usize,
) -> Result<Vec<Vec<A::Cell>>>
where
    A: DefiningSequence,
    S: MetricSystem<Point = A::Point>,
{
    if levels > a.depth() {
        return Err(Error::Domain(format!("level {levels} exceeds the depth {}", a.depth())));
    }
    let pts = orbit(sys, x, horizon)?;
    (0..=levels)
        .map(|n| pts.iter().map(|y| a.carrier(n, y)).collect())
        .collect()
}

/// `α(x)`: the carrier of `x` at each level `0..=levels`.
pub fn alpha<A: DefiningSequence>(a: &A, x: &A::Point, levels: usize) -> Result<Vec<A::Cell>> {
    (0..=levels).map(|n| a.carrier(n, x)).collect()
}

/// Heads of a family of itineraries.
pub fn pi0<C: Clone>(family: &[Vec<C>]) -> Vec<C> {
    family.iter().filter_map(|it| it.first().cloned()).collect()
}

/// The inclusion of level-`from` itineraries into level `to ≤ from`.
pub fn embed_itinerary<A: DefiningSequence>(
    a: &A,
    from: usize,
    to: usize,
    it: &[A::Cell],
) -> Result<Vec<A::Cell>> {
    it.iter().map(|c| ancestor(a, from, to, c)).collect()
}

/// Whether `family[n]` is the image of `family[n + 1]` for every `n`.
pub fn is_coherent<A: DefiningSequence>(a: &A, family: &[Vec<A::Cell>]) -> Result<bool> {
    for n in 0..family.len().saturating_sub(1) {
        if embed_itinerary(a, n + 1, n, &family[n + 1])? != family[n] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `PO(U_n)` as a graph on the level cells: `(i, j)` is allowed when some
/// point of cell `i` maps into cell `j`.
#[derive(Clone, Debug, Serialize)]
pub struct PoTable<C, P> {
    pub level: usize,
    /// Symbol `i` of the exported shift is `cells[i]`.
    pub cells: Vec<C>,
    pub allowed: BTreeSet<(usize, usize)>,
    /// A point of cell `i` landing in cell `j`, per allowed pair.
    pub witnesses: BTreeMap<(usize, usize), P>,
    /// Cells were mapped whole from one representative each.
    pub analytic: bool,
    /// Every allowed pair has been found.
    pub conclusive: bool,
}

impl<C: Ord, P> PoTable<C, P> {
    pub fn index_of(&self, cell: &C) -> Option<usize> {
        self.cells.binary_search(cell).ok()
    }

    pub fn successors(&self, i: usize) -> Vec<usize> {
        self.allowed.range((i, 0)..(i + 1, 0)).map(|&(_, j)| j).collect()
    }

    /// The 1-step shift of allowed paths, over cell indices.
    pub fn presentation(&self) -> ShiftPresentation {
        let k = self.cells.len();
        let mut forbidden = Vec::new();
        for i in 0..k {
            for j in 0..k {
                if !self.allowed.contains(&(i, j)) {
                    forbidden.push(vec![i as u32, j as u32]);
                }
            }
        }
        ShiftPresentation { alphabet_size: k as u32, forbidden, declared_order: Some(2) }
    }
}

fn maps_balls_into_balls<A, S>(a: &A, sys: &S, level: usize) -> bool
where
    A: DefiningSequence,
    S: MetricSystem<Point = A::Point>,
{
    let flags = sys.flags();
    flags.is_ultrametric
        && a.ball_radius(level).is_some()
        && flags.lipschitz_bound.as_ref().is_some_and(|l| *l <= Exact::one())
}

/// Builds `PO(U_level)`.
///
/// For an ultrametric 1-Lipschitz map and a level made of balls, each cell
/// maps into a single cell and the table is exact. Otherwise transitions
/// come from the representatives and `sample`; pass `sample_is_universe`
/// when the sample is all of `X`.
pub fn compute_po<A, S>(
    a: &A,
    sys: &S,
    level: usize,
    sample: &[A::Point],
    sample_is_universe: bool,
) -> Result<PoTable<A::Cell, A::Point>>
where
    A: DefiningSequence,
    S: MetricSystem<Point = A::Point>,
{
    let mut cells = a.cells(level)?;
    cells.sort();
    let analytic = maps_balls_into_balls(a, sys, level);
    let mut allowed = BTreeSet::new();
    let mut witnesses = BTreeMap::new();
    let mut record = |x: &A::Point, cells: &[A::Cell]| -> Result<()> {
        let (c, d) = (a.carrier(level, x)?, a.carrier(level, &sys.map(x)?)?);
        let i = cells.binary_search(&c).map_err(|_| Error::Internal(format!("{c:?} is not listed")))?;
        let j = cells.binary_search(&d).map_err(|_| {
            Error::Domain(format!("image cell {d:?} lies outside the listed cells"))
        })?;
        if allowed.insert((i, j)) {
            witnesses.insert((i, j), x.clone());
        }
        Ok(())
    };
    for c in &cells {
        let r = a.representative(level, c)?;
        record(&r, &cells)?;
    }
    if !analytic {
        for x in sample {
            record(x, &cells)?;
        }
    }
    Ok(PoTable { level, cells, allowed, witnesses, analytic, conclusive: analytic || sample_is_universe })
}

/// Level-`level` itineraries of `points` truncated to `horizon + 1` cells,
/// each with the first point realizing it.
pub fn compute_o<A, S>(
    a: &A,
    sys: &S,
    level: usize,
    horizon: usize,
    points: &[A::Point],
) -> Result<BTreeMap<Vec<A::Cell>, A::Point>>
where
    A: DefiningSequence,
    S: MetricSystem<Point = A::Point>,
{
    let mut out = BTreeMap::new();
    for x in points {
        let it = orbit(sys, x, horizon)?
            .iter()
            .map(|y| a.carrier(level, y))
            .collect::<Result<Vec<_>>>()?;
        out.entry(it).or_insert_with(|| x.clone());
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct ShadowreformConfig {
    pub m: usize,
    pub n: usize,
    pub horizon: usize,
    /// Number of sampled `PO(U_n)` paths.
    pub paths: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessRow<C, P> {
    pub path: Vec<C>,
    pub projected: Vec<C>,
    pub witness: P,
    /// The witness is the representative of the path's first cell.
    pub from_start_cell: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ShadowreformVerdict<C, P> {
    HoldsOnSample { witnesses: Vec<WitnessRow<C, P>> },
    /// No candidate realizes the projection of `path`. Not conclusive: the
    /// candidate pool is finite.
    CounterexampleCandidate { path: Vec<C>, projected: Vec<C>, searched: usize },
}

impl<C, P> ShadowreformVerdict<C, P> {
    pub fn holds(&self) -> bool {
        matches!(self, ShadowreformVerdict::HoldsOnSample { .. })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ShadowreformReport<C, P> {
    pub m: usize,
    pub n: usize,
    pub horizon: usize,
    pub paths_checked: usize,
    pub table_conclusive: bool,
    pub verdict: ShadowreformVerdict<C, P>,
}

fn sample_paths<C: Ord, P>(table: &PoTable<C, P>, cfg: &ShadowreformConfig) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let starts: Vec<usize> = (0..table.cells.len()).filter(|&i| !table.successors(i).is_empty()).collect();
    let mut out = Vec::new();
    if starts.is_empty() {
        return out;
    }
    for _ in 0..cfg.paths {
        let mut path = vec![starts[rng.random_range(0..starts.len())]];
        while path.len() <= cfg.horizon {
            let next = table.successors(*path.last().unwrap());
            if next.is_empty() {
                break;
            }
            path.push(next[rng.random_range(0..next.len())]);
        }
        out.push(path);
    }
    out
}

/// Searches `candidates`, after the representative of the first cell, for a
/// point whose level-`m` itinerary is `projected`.
pub fn find_witness<A, S>(
    a: &A,
    sys: &S,
    m: usize,
    start: Option<A::Point>,
    projected: &[A::Cell],
    candidates: &[A::Point],
) -> Result<Option<(A::Point, bool)>>
where
    A: DefiningSequence,
    S: MetricSystem<Point = A::Point>,
{
    let realizes = |x: &A::Point| -> Result<bool> {
        let mut y = x.clone();
        for (i, c) in projected.iter().enumerate() {
            if i > 0 {
                y = sys.map(&y)?;
            }
            if a.carrier(m, &y)? != *c {
                return Ok(false);
            }
        }
        Ok(true)
    };
    if let Some(s) = start {
        if realizes(&s)? {
            return Ok(Some((s, true)));
        }
    }
    for x in candidates {
        if realizes(x)? {
            return Ok(Some((x.clone(), false)));
        }
    }
    Ok(None)
}

/// Samples paths of `PO(U_n)`, projects them to level `m` and looks for an
/// orbit realizing each projection.
pub fn check_shadowreform<A, S>(
    a: &A,
    sys: &S,
    cfg: &ShadowreformConfig,
    sample: &[A::Point],
    sample_is_universe: bool,
) -> Result<ShadowreformReport<A::Cell, A::Point>>
where
    A: DefiningSequence,
    S: MetricSystem<Point = A::Point>,
{
    if cfg.m > cfg.n || cfg.n > a.depth() {
        return Err(Error::Domain(format!("need m ≤ n ≤ {}", a.depth())));
    }
    let table = compute_po(a, sys, cfg.n, sample, sample_is_universe)?;
    let paths = sample_paths(&table, cfg);
    let mut witnesses = Vec::new();
    for p in &paths {
        let path: Vec<A::Cell> = p.iter().map(|&i| table.cells[i].clone()).collect();
        let projected = embed_itinerary(a, cfg.n, cfg.m, &path)?;
        let start = a.representative(cfg.n, &path[0])?;
        match find_witness(a, sys, cfg.m, Some(start), &projected, sample)? {
            Some((witness, from_start_cell)) => {
                witnesses.push(WitnessRow { path, projected, witness, from_start_cell })
            }
            None => {
                return Ok(ShadowreformReport {
                    m: cfg.m,
                    n: cfg.n,
                    horizon: cfg.horizon,
                    paths_checked: witnesses.len() + 1,
                    table_conclusive: table.conclusive,
                    verdict: ShadowreformVerdict::CounterexampleCandidate {
                        path,
                        projected,
                        searched: sample.len() + 1,
                    },
                });
            }
        }
    }
    Ok(ShadowreformReport {
        m: cfg.m,
        n: cfg.n,
        horizon: cfg.horizon,
        paths_checked: witnesses.len(),
        table_conclusive: table.conclusive,
        verdict: ShadowreformVerdict::HoldsOnSample { witnesses },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{ball_partition_zp, PAdic, PAdicMap, PAdicSystem};
    use crate::partitions::ShiftCylinders;
    use crate::symbolic::{even_shift, golden_mean, Shift};

    fn plus_one(prec: usize) -> PAdicSystem {
        PAdicSystem::zp(3, prec, PAdicMap::Polynomial { coeffs: vec![1, 1] }).unwrap()
    }

    #[test]
    fn translation_po_is_a_cycle() {
        let sys = plus_one(6);
        let a = ball_partition_zp(3, 3, 6).unwrap();
        let t = compute_po(&a, &sys, 1, &[], false).unwrap();
        assert!(t.analytic && t.conclusive);
        assert_eq!(t.allowed, [(0, 1), (1, 2), (2, 0)].into_iter().collect());
        let pres = t.presentation();
        assert_eq!(pres.forbidden.len(), 6);
        assert!(pres.forbidden.iter().all(|w| w.len() == 2));
    }

    #[test]
    fn theta_of_zero() {
        let sys = plus_one(6);
        let a = ball_partition_zp(3, 2, 6).unwrap();
        let x = PAdic::from_int(3, 0, 6).unwrap();
        let fam = theta_itinerary(&a, &sys, &x, 2, 5).unwrap();
        let level1: Vec<u32> = fam[1].iter().map(|c| c[0]).collect();
        assert_eq!(level1, vec![0, 1, 2, 0, 1, 2]);
        assert!(is_coherent(&a, &fam).unwrap());
        assert_eq!(pi0(&fam), alpha(&a, &x, 2).unwrap());
        assert_eq!(fam[2][3], vec![0, 1]);
    }

    #[test]
    fn golden_mean_follower_table() {
        let shift = Shift::new(golden_mean()).unwrap();
        let a = ShiftCylinders::new(shift.clone(), 3, 8);
        let sample = shift.cylinders(8);
        let t = compute_po(&a, &shift, 2, &sample, true).unwrap();
        assert!(!t.analytic);
        // cells 00, 01, 10
        assert_eq!(t.cells, vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
        assert_eq!(t.allowed, [(0, 0), (0, 1), (1, 2), (2, 0), (2, 1)].into_iter().collect());
        for (&(i, j), x) in &t.witnesses {
            assert_eq!(a.carrier(2, x).unwrap(), t.cells[i]);
            assert_eq!(a.carrier(2, &shift.map(x).unwrap()).unwrap(), t.cells[j]);
        }
    }

    #[test]
    fn o_is_the_language() {
        let shift = Shift::new(golden_mean()).unwrap();
        let a = ShiftCylinders::new(shift.clone(), 2, 8);
        let o = compute_o(&a, &shift, 1, 4, &shift.cylinders(8)).unwrap();
        let words: Vec<Vec<u32>> = o.keys().map(|it| it.iter().map(|c| c[0]).collect()).collect();
        assert_eq!(words, shift.language(5));
    }

    #[test]
    fn translation_shadowreform() {
        let sys = plus_one(8);
        let a = ball_partition_zp(3, 5, 8).unwrap();
        for m in 1..=4 {
            let cfg = ShadowreformConfig { m, n: m + 1, horizon: 20, paths: 30, seed: 1 };
            let r = check_shadowreform(&a, &sys, &cfg, &[], false).unwrap();
            match r.verdict {
                ShadowreformVerdict::HoldsOnSample { witnesses } => {
                    assert_eq!(witnesses.len(), 30);
                    assert!(witnesses.iter().all(|w| w.from_start_cell && w.path.len() == 21));
                }
                v => panic!("{v:?}"),
            }
        }
    }

    #[test]
    fn even_shift_has_bad_paths() {
        let shift = Shift::new(even_shift(4)).unwrap();
        let (m, n, horizon) = (1, 2, 20);
        let a = ShiftCylinders::new(shift.clone(), n, horizon + n + 1);
        let pool = shift.cylinders(horizon + n + 1);
        let cfg = ShadowreformConfig { m, n, horizon, paths: 50, seed: 7 };
        let r = check_shadowreform(&a, &shift, &cfg, &pool, false).unwrap();
        match r.verdict {
            ShadowreformVerdict::CounterexampleCandidate { projected, .. } => {
                let w: Vec<u32> = projected.iter().map(|c| c[0]).collect();
                assert!(!shift.contains(&w));
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn out_of_range_levels() {
        let sys = plus_one(4);
        let a = ball_partition_zp(3, 2, 4).unwrap();
        let x = PAdic::from_int(3, 0, 4).unwrap();
        assert!(theta_itinerary(&a, &sys, &x, 3, 2).is_err());
        let cfg = ShadowreformConfig { m: 2, n: 1, horizon: 3, paths: 1, seed: 0 };
        assert!(check_shadowreform(&a, &sys, &cfg, &[], false).is_err());
    }
}
