use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{checked_pseudo_orbit, Flags, IndexSet, MetricSystem, PseudoOrbit};
use crate::scalar::Exact;

fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Compositions of `w` into `l` positive parts.
fn compositions(w: u64, l: u64) -> u64 {
    match (w, l) {
        (0, 0) => 1,
        (_, 0) => 0,
        _ if w < l => 0,
        _ => binom(w - 1, l - 1),
    }
}

/// Position of a nonempty positive sequence in the order by sum, then
/// length, then lexicographic.
pub fn seq_rank(s: &[u32]) -> u64 {
    let w: u64 = s.iter().map(|&x| x as u64).sum();
    let len = s.len() as u64;
    let mut rank = (1u64 << (w - 1)) - 1;
    rank += (1..len).map(|l| compositions(w, l)).sum::<u64>();
    let mut rem = w;
    for (i, &x) in s.iter().enumerate() {
        let parts = len - i as u64 - 1;
        for c in 1..x as u64 {
            rank += compositions(rem - c, parts);
        }
        rem -= x as u64;
    }
    rank
}

pub fn seq_unrank(mut r: u64) -> Vec<u32> {
    let mut w = 1u64;
    while r >= 1 << (w - 1) {
        r -= 1 << (w - 1);
        w += 1;
    }
    let mut len = 1u64;
    while r >= compositions(w, len) {
        r -= compositions(w, len);
        len += 1;
    }
    let mut out = Vec::with_capacity(len as usize);
    let mut rem = w;
    for i in 0..len {
        let parts = len - i - 1;
        let mut c = 1u64;
        while r >= compositions(rem - c, parts) {
            r -= compositions(rem - c, parts);
            c += 1;
        }
        out.push(c as u32);
        rem -= c;
    }
    out
}

fn tri(r: u64) -> u64 {
    r * (r + 1) / 2
}

/// The schedule `s_k = e_{τ(k)}`: round `r` lists `e_0, …, e_{r-1}`, so
/// every sequence comes back in every later round.
pub fn schedule(k: u64) -> u64 {
    // Largest r with tri(r) ≤ k.
    let mut r = ((2.0 * k as f64).sqrt() as u64).saturating_sub(1);
    while tri(r + 1) <= k {
        r += 1;
    }
    while tri(r) > k {
        r -= 1;
    }
    k - tri(r)
}

/// The least `k > after` with `τ(k) = rank`.
pub fn first_index_after(rank: u64, after: u64) -> u64 {
    let mut r = rank + 1;
    loop {
        let k = tri(r - 1) + rank;
        if k > after {
            return k;
        }
        r += 1;
    }
}

/// `s_k`.
pub fn block(k: u64) -> Vec<u32> {
    seq_unrank(schedule(k))
}

/// Element `r` of `A_k` in window `t`; the value is `t + 1/j` with
/// `j = cantor(k + 3, r)`, so blocks are disjoint and `j > k + 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FsPoint {
    pub k: u64,
    pub t: u32,
    pub r: u32,
}

impl FsPoint {
    pub fn denominator(&self) -> u128 {
        let a = self.k as u128 + 3;
        let b = self.r as u128;
        (a + b) * (a + b + 1) / 2 + b
    }

    pub fn value(&self) -> Exact {
        Exact::from_int(self.t) + Exact::new(1, BigInt::from(self.denominator()))
    }
}

/// `X = ∪ A_k`, with the points of blocks `k < blocks`, `l(k) ≤ max_l` held
/// as the sampling universe. The map works on every block.
#[derive(Clone, Debug)]
pub struct FinShadow {
    blocks: u64,
    max_l: usize,
    universe: Vec<FsPoint>,
    values: Vec<Exact>,
}

pub fn build_example_finshadow(blocks: u64, max_l: usize) -> Result<FinShadow> {
    if blocks == 0 {
        return Err(Error::Config("need at least one block".into()));
    }
    let mut pts = Vec::new();
    for k in 0..blocks {
        let s = block(k);
        if s.len() > max_l + 1 {
            continue;
        }
        for (t, &n) in s.iter().enumerate() {
            for r in 0..n {
                pts.push(FsPoint { k, t: t as u32, r });
            }
        }
    }
    let mut keyed: Vec<(Exact, FsPoint)> = pts.into_iter().map(|p| (p.value(), p)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    let (values, universe) = keyed.into_iter().unzip();
    Ok(FinShadow { blocks, max_l, universe, values })
}

#[derive(Serialize)]
struct FsRow {
    k: u64,
    window: u32,
    value: Exact,
    image: Option<usize>,
}

impl FinShadow {
    pub fn blocks(&self) -> u64 {
        self.blocks
    }

    pub fn max_l(&self) -> usize {
        self.max_l
    }

    pub fn universe(&self) -> &[FsPoint] {
        &self.universe
    }

    fn in_universe(&self, x: &FsPoint) -> bool {
        x.k < self.blocks && block(x.k).len() <= self.max_l + 1
    }

    /// Universe points strictly within `delta` of `x`, by value.
    pub fn menu(&self, x: &FsPoint, delta: &Exact) -> Vec<FsPoint> {
        let v = x.value();
        let lo = &v - delta;
        let hi = &v + delta;
        let start = self.values.partition_point(|y| *y <= lo);
        let end = self.values.partition_point(|y| *y < hi);
        self.universe[start..end].to_vec()
    }

    /// Uniform start in the universe, uniform choice in each `delta`-menu.
    pub fn sample_pseudo_orbit<R: Rng>(&self, len: usize, delta: &Exact, rng: &mut R) -> Result<PseudoOrbit<FsPoint>> {
        if len == 0 || self.universe.is_empty() {
            return Err(Error::Domain("empty sample".into()));
        }
        let mut pts = vec![self.universe[rng.random_range(0..self.universe.len())]];
        while pts.len() < len {
            let fx = self.map(pts.last().unwrap())?;
            let m = self.menu(&fx, delta);
            pts.push(m[rng.random_range(0..m.len())]);
        }
        checked_pseudo_orbit(self, IndexSet::Finite, pts, delta.clone())
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<FsRow> = self
            .universe
            .iter()
            .zip(&self.values)
            .map(|(p, v)| FsRow {
                k: p.k,
                window: p.t,
                value: v.clone(),
                image: self.map(p).ok().and_then(|q| self.universe.iter().position(|u| *u == q)),
            })
            .collect();
        serde_json::to_string_pretty(&rows).expect("rows serialize")
    }
}

impl MetricSystem for FinShadow {
    type Point = FsPoint;

    fn dist(&self, x: &FsPoint, y: &FsPoint) -> Result<Exact> {
        Ok((x.value() - y.value()).abs())
    }

    /// The next element of `A_k` upward; the largest element is fixed.
    fn map(&self, x: &FsPoint) -> Result<FsPoint> {
        let s = block(x.k);
        let t = x.t as usize;
        if t >= s.len() || x.r >= s[t] {
            return Err(Error::Domain(format!("{x:?} is not a point of A_{}", x.k)));
        }
        Ok(if x.r > 0 {
            FsPoint { r: x.r - 1, ..*x }
        } else if t + 1 < s.len() {
            FsPoint { k: x.k, t: x.t + 1, r: s[t + 1] - 1 }
        } else {
            *x
        })
    }

    fn flags(&self) -> Flags {
        Flags { is_ultrametric: false, lipschitz_bound: None, is_invertible: false, is_isometry: false }
    }

    fn contains(&self, x: &FsPoint) -> bool {
        let s = block(x.k);
        (x.t as usize) < s.len() && x.r < s[x.t as usize]
    }
}

/// The least `N > 2` with `1/N < eps`, and a `δ < 1/N` that isolates every
/// point of `A_0 ∪ … ∪ A_N`.
pub fn paper_delta(eps: &Exact) -> Result<(u64, Exact)> {
    if !eps.is_positive() {
        return Err(Error::Precondition("eps must be positive".into()));
    }
    let n = (eps.recip().as_ratio().floor().to_integer().to_u64())
        .ok_or_else(|| Error::Config("eps is too small".into()))?
        .saturating_add(1)
        .max(3);
    // Other points of the same window sit at 1/j' with j' ≠ j.
    let mut delta = Exact::recip_of(n + 1);
    for k in 0..=n {
        for (t, &cnt) in block(k).iter().enumerate() {
            for r in 0..cnt {
                let j = FsPoint { k, t: t as u32, r }.denominator();
                delta = delta.min(Exact::new(1, BigInt::from(j) * BigInt::from(j + 1)));
            }
        }
    }
    Ok((n, delta))
}

#[derive(Clone, Debug, Serialize)]
pub struct VisitShadow {
    pub point: FsPoint,
    /// Visits per window, from the first window of the pseudo-orbit.
    pub counts: Vec<u32>,
    pub first_window: u32,
    /// The pseudo-orbit lies in `A_0 ∪ … ∪ A_N` and is a true orbit.
    pub low: bool,
}

/// The shadow from the visit-count argument: the least element, in the
/// first window, of the first block `k > N` whose sequence repeats the
/// visit counts (padded with ones in front).
pub fn visit_count_shadow(seq: &PseudoOrbit<FsPoint>, n: u64) -> Result<VisitShadow> {
    let pts = &seq.points;
    let first = *pts.first().ok_or_else(|| Error::Domain("empty pseudo-orbit".into()))?;
    let lows = pts.iter().filter(|p| p.k <= n).count();
    if lows == pts.len() {
        return Ok(VisitShadow { point: first, counts: Vec::new(), first_window: first.t, low: true });
    }
    if lows > 0 {
        return Err(Error::Precondition("pseudo-orbit mixes low and high blocks; delta is too large".into()));
    }
    let mut counts = vec![1u32];
    for w in pts.windows(2) {
        match w[1].t.cmp(&w[0].t) {
            Ordering::Equal => *counts.last_mut().unwrap() += 1,
            Ordering::Greater if w[1].t == w[0].t + 1 => counts.push(1),
            _ => return Err(Error::Precondition("pseudo-orbit skips or revisits a window".into())),
        }
    }
    let mut pattern = vec![1u32; first.t as usize];
    pattern.extend(&counts);
    let k = first_index_after(seq_rank(&pattern), n);
    Ok(VisitShadow {
        point: FsPoint { k, t: first.t, r: counts[0] - 1 },
        counts,
        first_window: first.t,
        low: false,
    })
}

/// `x_i` = largest element of `A_{k_i}` in window `i`, where `k_i > N` is
/// the first universe block with `l(k_i) > i` and `1/N < delta`.
pub fn unbounded_pseudo_orbit(sys: &FinShadow, delta: &Exact, crossings: usize) -> Result<PseudoOrbit<FsPoint>> {
    if !delta.is_positive() {
        return Err(Error::Precondition("delta must be positive".into()));
    }
    let n = delta
        .recip()
        .as_ratio()
        .floor()
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::Config("delta is too small".into()))?
        + 1;
    let mut pts = Vec::with_capacity(crossings + 1);
    for i in 0..=crossings {
        let k = (n + 1..sys.blocks)
            .find(|&k| {
                let p = FsPoint { k, t: 0, r: 0 };
                block(k).len() > i + 1 && sys.in_universe(&p)
            })
            .ok_or_else(|| {
                Error::Config(format!("no block k > {n} with l(k) > {i} among the first {}", sys.blocks))
            })?;
        pts.push(FsPoint { k, t: i as u32, r: 0 });
    }
    checked_pseudo_orbit(sys, IndexSet::Finite, pts, delta.clone())
}

/// Largest `r` with `d(x, y) < r ⇒ d(f x, f y) < eps` over pairs of
/// `points`; `None` when no pair is stretched to `eps`.
pub fn continuity_modulus<S: MetricSystem>(sys: &S, points: &[S::Point], eps: &Exact) -> Result<Option<Exact>> {
    let images = points.iter().map(|x| sys.map(x)).collect::<Result<Vec<_>>>()?;
    let mut best: Option<Exact> = None;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if sys.dist(&images[i], &images[j])? >= *eps {
                let d = sys.dist(&points[i], &points[j])?;
                best = Some(match best {
                    Some(b) => b.min(d),
                    None => d,
                });
            }
        }
    }
    Ok(best)
}
