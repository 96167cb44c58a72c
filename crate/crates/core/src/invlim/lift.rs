use num_traits::ToPrimitive;
use rand::Rng;
use serde::Serialize;

use super::system::{CoherentPoint, InverseSystem};
use crate::error::{Error, Result};
use crate::metric::{brute_force_shadow_search, gaps, menu, shadows, IndexSet, MetricSystem, PseudoOrbit, Search};
use crate::scalar::Exact;

fn require_pseudo_orbit(sys: &InverseSystem, seq: &PseudoOrbit<CoherentPoint>) -> Result<()> {
    if matches!(seq.index, IndexSet::Integer { .. }) {
        return Err(Error::Unsupported("inverse-limit orbits are N-indexed".into()));
    }
    if gaps(sys, &seq.points)?.iter().any(|g| *g >= seq.delta) {
        return Err(Error::Precondition(format!("not a {}-pseudo-orbit in the product metric", seq.delta)));
    }
    Ok(())
}

/// The stage-`m` coordinates of a product-metric `δ`-pseudo-orbit, certified
/// as an `(m+1)δ`-pseudo-orbit of `f_m`.
pub fn project_pseudo_orbit(
    sys: &InverseSystem,
    seq: &PseudoOrbit<CoherentPoint>,
    m: usize,
) -> Result<PseudoOrbit<usize>> {
    if m > sys.top() {
        return Err(Error::Domain(format!("no stage {m}")));
    }
    require_pseudo_orbit(sys, seq)?;
    let pts: Vec<usize> = seq.points.iter().map(|x| x.coords[m]).collect();
    let delta = &seq.delta * &Exact::from_int(m as i64 + 1);
    let stage = sys.stage_system(m);
    if gaps(&stage, &pts)?.iter().any(|g| *g >= delta) {
        return Err(Error::Internal(format!("stage-{m} projection breaks the (m+1)δ bound")));
    }
    Ok(PseudoOrbit { index: seq.index, points: pts, delta })
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Lift {
    Lifted {
        point: CoherentPoint,
        /// Stage where the shadow was found.
        k: usize,
        /// Radius needed at stage `k`.
        stage_eps: Exact,
    },
    /// Stage `k` has no `stage_eps`-shadow for the projected orbit.
    NoStageShadow { k: usize, stage_eps: Exact },
}

/// Largest `r` such that `d_k(a, b) < r` forces `d_m(g(a), g(b)) < (m+1)ε` at
/// every stage `m ≤ k`: a modulus of uniform continuity of the bondings,
/// computed over all pairs of `X_k`.
pub fn stage_radius(sys: &InverseSystem, k: usize, eps: &Exact) -> Exact {
    let stage = sys.stage(k);
    let mut r = eps * &Exact::from_int(k as i64 + 1);
    for a in 0..stage.size() {
        for b in a + 1..stage.size() {
            let d = stage.dist(a, b);
            if *d >= r {
                continue;
            }
            let bad = (0..k).any(|m| {
                let bound = eps * &Exact::from_int(m as i64 + 1);
                *sys.stage(m).dist(sys.project(k, m, a), sys.project(k, m, b)) >= bound
            });
            if bad {
                r = d.clone();
            }
        }
    }
    r
}

/// Shadows a product-metric pseudo-orbit by lifting a stage-`k` shadow,
/// `k` the least integer with `1/k < ε` (or the top stage, if lower).
///
/// The stage-`k` search tries the orbit's own start first. Coordinates above
/// `k` take the least preimage. The result is checked
/// with [`shadows`] before it is returned.
pub fn lift_shadow_point(sys: &InverseSystem, seq: &PseudoOrbit<CoherentPoint>, eps: &Exact) -> Result<Lift> {
    if !eps.is_positive() {
        return Err(Error::Precondition("eps must be positive".into()));
    }
    if !sys.has_self_maps() {
        return Err(Error::Unsupported("the system has no self-maps".into()));
    }
    if !sys.all_surjective() {
        return Err(Error::Precondition("lifting needs surjective bondings".into()));
    }
    require_pseudo_orbit(sys, seq)?;
    let k_needed = eps.recip().as_ratio().floor().to_integer().to_usize().unwrap_or(usize::MAX).saturating_add(1);
    let k = k_needed.min(sys.top());
    let stage_eps = stage_radius(sys, k, eps);
    let projected = project_pseudo_orbit(sys, seq, k)?;
    let stage = sys.stage_system(k);
    // The orbit's own start first: it is the answer for genuine orbits.
    let start = projected.points[0];
    let candidates = std::iter::once(start).chain(stage.points().into_iter().filter(|&x| x != start));
    let t_k = match brute_force_shadow_search(&stage, &projected, &stage_eps, candidates)? {
        Search::Found(t) => t,
        _ => return Ok(Lift::NoStageShadow { k, stage_eps }),
    };
    let mut coords = vec![0; sys.top() + 1];
    coords[k] = t_k;
    for m in (0..k).rev() {
        coords[m] = sys.bonding(m)[coords[m + 1]];
    }
    for m in k + 1..=sys.top() {
        coords[m] = sys
            .bonding(m - 1)
            .iter()
            .position(|&x| x == coords[m - 1])
            .ok_or_else(|| Error::Internal(format!("no preimage at stage {m}")))?;
    }
    let point = CoherentPoint { coords };
    if !shadows(sys, &point, seq, eps)? {
        return Err(Error::Internal(format!("lift of stage-{k} shadow fails to {eps}-shadow")));
    }
    Ok(Lift::Lifted { point, k, stage_eps })
}

/// Uniform start, then each point uniform among those within `delta` of the
/// true image.
pub fn sample_coherent_pseudo_orbit<R: Rng>(
    sys: &InverseSystem,
    len: usize,
    delta: &Exact,
    rng: &mut R,
) -> Result<PseudoOrbit<CoherentPoint>> {
    if len == 0 {
        return Err(Error::Domain("length must be positive".into()));
    }
    let universe = sys.coherent_points();
    let mut pts = vec![universe[rng.random_range(0..universe.len())].clone()];
    while pts.len() < len {
        let fx = sys.map(pts.last().unwrap())?;
        let options = menu(sys, &universe, &fx, delta)?;
        pts.push(options[rng.random_range(0..options.len())].clone());
    }
    Ok(PseudoOrbit::finite(pts, delta.clone()))
}
