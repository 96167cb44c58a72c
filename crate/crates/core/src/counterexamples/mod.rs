//! Desk-scale reproductions of the standard counterexamples.

mod finshadow;
mod line;

pub use finshadow::{
    block, build_example_finshadow, continuity_modulus, first_index_after, paper_delta, schedule,
    seq_rank, seq_unrank, unbounded_pseudo_orbit, visit_count_shadow, FinShadow, FsPoint, VisitShadow,
};
pub use line::{build_example_metric_dep, metric_dep_pseudo_orbit, EnumeratedLine, LineMetric};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{brute_force_shadow_search, PseudoOrbit, Search};
use crate::scalar::Exact;
use crate::symbolic::{even_shift, glue_words_pseudo_orbit, is_order_p, CylinderPoint, OrderVerdict, Shift, Word};

/// A glued pseudo-orbit of the even shift with no `1/2`-shadow among the
/// candidate cylinders.
#[derive(Clone, Debug, Serialize)]
pub struct EvenShiftWitness {
    pub k: usize,
    pub u: Word,
    pub v: Word,
    pub w: Word,
    pub pseudo_orbit: Vec<CylinderPoint>,
    pub delta: Exact,
    pub candidate_depth: usize,
    pub candidates: usize,
    pub shadow: Option<CylinderPoint>,
}

/// Takes the order-`(k+2)` counterexample of the even shift truncated at
/// `truncation` forbidden words, glues it into a `1/(k+1)`-pseudo-orbit and
/// searches every depth-`candidate_depth` cylinder for a `1/2`-shadow.
pub fn even_shift_witness(
    truncation: usize,
    k: usize,
    order_depth: usize,
    candidate_depth: usize,
) -> Result<EvenShiftWitness> {
    let x = Shift::new(even_shift(truncation))?;
    let OrderVerdict::Counterexample { u, v, w } = is_order_p(&x, k + 2, order_depth)? else {
        return Err(Error::Config(format!("no order-{} counterexample to depth {order_depth}", k + 2)));
    };
    let po: PseudoOrbit<CylinderPoint> = glue_words_pseudo_orbit(&x, &u, &v, &w, k, k + 2)?;
    if candidate_depth < po.len() + 1 {
        return Err(Error::Config(format!(
            "candidates of depth {candidate_depth} cannot certify an orbit of length {}",
            po.len()
        )));
    }
    let cands = x.cylinders(candidate_depth);
    let n = cands.len();
    let shadow = match brute_force_shadow_search(&x, &po, &Exact::new(1, 2), cands)? {
        Search::Found(z) => Some(z),
        _ => None,
    };
    Ok(EvenShiftWitness {
        k,
        u,
        v,
        w,
        delta: po.delta.clone(),
        pseudo_orbit: po.points,
        candidate_depth,
        candidates: n,
        shadow,
    })
}
