use rand::seq::IndexedRandom;
use rand::Rng;

use super::{CylinderPoint, Shift, ShiftPresentation, Symbol, Word};
use crate::error::{Error, Result};
use crate::metric::{is_pseudo_orbit, PseudoOrbit};
use crate::scalar::Exact;

/// The full shift on `a` symbols.
pub fn full_shift(a: u32) -> ShiftPresentation {
    ShiftPresentation::new(a, Vec::new())
}

/// Binary shift forbidding `11`.
pub fn golden_mean() -> ShiftPresentation {
    let mut p = ShiftPresentation::new(2, vec![vec![1, 1]]);
    p.declared_order = Some(2);
    p
}

/// The even shift cut off after `k` forbidden words: `1 0^{2j+1} 1` for
/// `j < k`. Its language agrees with the even shift up to length `2k + 2`.
pub fn even_shift(k: usize) -> ShiftPresentation {
    let forbidden = (0..k)
        .map(|j| {
            let mut w = vec![1];
            w.extend(std::iter::repeat_n(0, 2 * j + 1));
            w.push(1);
            w
        })
        .collect();
    ShiftPresentation::new(2, forbidden)
}

/// The shadow of a `1/(k+1)`-pseudo-orbit in a shift of order `p ≤ k + 1`:
/// the first symbols `x_{0,0} x_{1,0} ... x_{N-2,0}` followed by all of
/// `x_{N-1}`.
///
/// Consecutive points must satisfy `x_{i,1..=k+1} = x_{i+1,0..=k}`.
pub fn shadow_point_order_p(
    x: &Shift,
    p: usize,
    seq: &PseudoOrbit<CylinderPoint>,
    k: usize,
) -> Result<CylinderPoint> {
    if k + 1 < p {
        return Err(Error::Precondition(format!("k = {k} is below p - 1 = {}", p - 1)));
    }
    if x.max_forbidden_len() > p {
        return Err(Error::Precondition(format!("shift has forbidden words longer than {p}")));
    }
    if seq.origin() != 0 {
        return Err(Error::Precondition("expected an N-indexed pseudo-orbit".into()));
    }
    let pts = &seq.points;
    let Some(last) = pts.last() else {
        return Err(Error::Domain("empty pseudo-orbit".into()));
    };
    for (i, pt) in pts.iter().enumerate() {
        if pt.depth() < k + 2 {
            return Err(Error::Precondition(format!("point {i} is shallower than k + 2")));
        }
        if !x.contains(&pt.prefix) {
            return Err(Error::Domain(format!("point {i} is not in the shift")));
        }
    }
    for (i, w) in pts.windows(2).enumerate() {
        if w[0].prefix[1..=k + 1] != w[1].prefix[..=k] {
            return Err(Error::Precondition(format!(
                "points {i} and {} do not overlap on {} symbols",
                i + 1,
                k + 1
            )));
        }
    }
    let mut z: Word = pts[..pts.len() - 1].iter().map(|pt| pt.prefix[0]).collect();
    z.extend_from_slice(&last.prefix);
    if !x.contains(&z) {
        return Err(Error::Internal("constructed shadow left the shift".into()));
    }
    Ok(CylinderPoint::new(z))
}

/// The glued pseudo-orbit: shifts of a point starting with `uv`, then shifts
/// of a point starting with `vw`. All points have depth `depth`.
///
/// The jump between the blocks agrees on `v`, so the result is a strict
/// `1/(k+1)`-pseudo-orbit when `|v| ≥ k + 1`. Its length is `|uvw|`, which
/// forces every `1/2`-shadow to start with `uvw`.
pub fn glue_words_pseudo_orbit(
    x: &Shift,
    u: &[Symbol],
    v: &[Symbol],
    w: &[Symbol],
    k: usize,
    depth: usize,
) -> Result<PseudoOrbit<CylinderPoint>> {
    if u.is_empty() || w.is_empty() {
        return Err(Error::Domain("u and w must be nonempty".into()));
    }
    if v.len() < k + 1 {
        return Err(Error::Precondition(format!(
            "|v| = {} gives agreement only on {} symbols, need {}",
            v.len(),
            v.len(),
            k + 1
        )));
    }
    if depth < k + 2 {
        return Err(Error::Precondition(format!("depth must be at least {}", k + 2)));
    }
    let uv = [u, v].concat();
    let vw = [v, w].concat();
    if !x.contains(&uv) || !x.contains(&vw) {
        return Err(Error::Domain("uv and vw must both be in the language".into()));
    }
    let head = x
        .least_extension(&uv, u.len() + depth)
        .ok_or_else(|| Error::Internal("uv has no extension".into()))?;
    let tail = x
        .least_extension(&vw, vw.len() + depth)
        .ok_or_else(|| Error::Internal("vw has no extension".into()))?;
    let mut pts: Vec<CylinderPoint> = (0..u.len())
        .map(|i| CylinderPoint::new(head[i..i + depth].to_vec()))
        .collect();
    pts.extend((0..vw.len()).map(|i| CylinderPoint::new(tail[i..i + depth].to_vec())));
    let delta = Exact::recip_of(k as u64 + 1);
    if !is_pseudo_orbit(x, &pts, &delta)? {
        return Err(Error::Internal("glued sequence is not a pseudo-orbit".into()));
    }
    Ok(PseudoOrbit::finite(pts, delta))
}

/// A random `1/(k+1)`-pseudo-orbit of depth-`depth` points: the start is
/// uniform on `L_depth`, and each next point is uniform among the words
/// extending the first `k + 1` symbols of the shifted previous point.
pub fn sample_shift_pseudo_orbit<R: Rng>(
    x: &Shift,
    k: usize,
    len: usize,
    depth: usize,
    rng: &mut R,
) -> Result<PseudoOrbit<CylinderPoint>> {
    if depth < k + 2 {
        return Err(Error::Precondition(format!("depth must be at least {}", k + 2)));
    }
    if len == 0 {
        return Err(Error::Domain("length must be positive".into()));
    }
    let start = x
        .language(depth)
        .choose(rng)
        .cloned()
        .ok_or_else(|| Error::Domain("empty shift".into()))?;
    let mut pts = vec![CylinderPoint::new(start)];
    while pts.len() < len {
        let prev = &pts.last().unwrap().prefix;
        let menu = x.extensions(&prev[1..=k + 1], depth);
        let next = menu
            .choose(rng)
            .cloned()
            .ok_or_else(|| Error::Internal("shifted point has no extension".into()))?;
        pts.push(CylinderPoint::new(next));
    }
    Ok(PseudoOrbit::natural(pts, Exact::recip_of(k as u64 + 1)))
}
