//! One-sided shift spaces `X_F` over a finite active alphabet `{0..a}`.
//!
//! Membership in the language uses right-extendability: a word belongs to
//! `L(X)` iff it avoids `F` and can be continued forever. That is decided on
//! the graph whose states are the allowed words of length `max|F| - 1`.

mod construct;
mod order;

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{Flags, MetricSystem};
use crate::scalar::Exact;

pub use construct::{
    even_shift, full_shift, glue_words_pseudo_orbit, golden_mean, sample_shift_pseudo_orbit,
    shadow_point_order_p,
};
pub use order::{is_order_p, min_order, OrderVerdict};

pub type Symbol = u32;
pub type Word = Vec<Symbol>;

/// Shift presentation as stored on disk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftPresentation {
    pub alphabet_size: u32,
    pub forbidden: Vec<Word>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_order: Option<usize>,
}

impl ShiftPresentation {
    pub fn new(alphabet_size: u32, forbidden: Vec<Word>) -> ShiftPresentation {
        ShiftPresentation { alphabet_size, forbidden, declared_order: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.alphabet_size == 0 {
            return Err(Error::Domain("empty alphabet".into()));
        }
        for f in &self.forbidden {
            if f.is_empty() {
                return Err(Error::Domain("empty forbidden word".into()));
            }
            if let Some(s) = f.iter().find(|&&s| s >= self.alphabet_size) {
                return Err(Error::Domain(format!("symbol {s} outside the active alphabet")));
            }
            if let Some(p) = self.declared_order {
                if f.len() != p {
                    return Err(Error::Domain(format!(
                        "declared order {p} but forbidden word of length {}",
                        f.len()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A finite-resolution point of a shift: the first `depth` symbols.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CylinderPoint {
    pub prefix: Word,
}

impl CylinderPoint {
    pub fn new(prefix: Word) -> CylinderPoint {
        CylinderPoint { prefix }
    }

    pub fn depth(&self) -> usize {
        self.prefix.len()
    }

    /// Drops the first symbol.
    pub fn shift(&self) -> Option<CylinderPoint> {
        (!self.prefix.is_empty()).then(|| CylinderPoint::new(self.prefix[1..].to_vec()))
    }
}

/// Shift-metric distance between two cylinder points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftDistance {
    pub value: Exact,
    /// The prefixes agree on their whole common depth but the depths differ,
    /// so `value` only bounds the true distance from above.
    pub upper_bound: bool,
}

/// `1/(i+1)` for the first index `i` where `x` and `y` differ.
pub fn shift_metric(x: &CylinderPoint, y: &CylinderPoint) -> ShiftDistance {
    let common = x.depth().min(y.depth());
    match (0..common).find(|&i| x.prefix[i] != y.prefix[i]) {
        Some(i) => ShiftDistance { value: Exact::recip_of(i as u64 + 1), upper_bound: false },
        None if x.depth() == y.depth() => ShiftDistance { value: Exact::zero(), upper_bound: false },
        None => ShiftDistance { value: Exact::recip_of(common as u64 + 1), upper_bound: true },
    }
}

/// A compiled presentation: forbidden-word lookup plus the extendability graph.
#[derive(Clone, Debug)]
pub struct Shift {
    pres: ShiftPresentation,
    forbidden: HashSet<Word>,
    lens: Vec<usize>,
    state_len: usize,
    alive: HashSet<Word>,
}

impl Shift {
    pub fn new(pres: ShiftPresentation) -> Result<Shift> {
        pres.validate()?;
        let forbidden: HashSet<Word> = pres.forbidden.iter().cloned().collect();
        let mut lens: Vec<usize> = forbidden.iter().map(|w| w.len()).collect();
        lens.sort_unstable();
        lens.dedup();
        let max_len = lens.last().copied().unwrap_or(0);
        let state_len = max_len.saturating_sub(1);
        let mut shift = Shift { pres, forbidden, lens, state_len, alive: HashSet::new() };
        shift.alive = shift.alive_states();
        Ok(shift)
    }

    pub fn presentation(&self) -> &ShiftPresentation {
        &self.pres
    }

    pub fn alphabet_size(&self) -> u32 {
        self.pres.alphabet_size
    }

    /// Longest forbidden word, 0 when nothing is forbidden.
    pub fn max_forbidden_len(&self) -> usize {
        self.lens.last().copied().unwrap_or(0)
    }

    /// True iff some factor of `word` ending at position `end` is forbidden.
    fn bad_suffix_at(&self, word: &[Symbol], end: usize) -> bool {
        self.lens
            .iter()
            .take_while(|&&l| l <= end + 1)
            .any(|&l| self.forbidden.contains(&word[end + 1 - l..=end]))
    }

    /// True iff `word` contains no forbidden factor.
    pub fn avoids(&self, word: &[Symbol]) -> bool {
        (0..word.len()).all(|e| !self.bad_suffix_at(word, e))
    }

    fn all_words(&self, len: usize) -> Vec<Word> {
        let a = self.pres.alphabet_size;
        let mut out: Vec<Word> = vec![Vec::new()];
        for _ in 0..len {
            let mut next = Vec::with_capacity(out.len() * a as usize);
            for w in &out {
                for c in 0..a {
                    let mut x = w.clone();
                    x.push(c);
                    if !self.bad_suffix_at(&x, x.len() - 1) {
                        next.push(x);
                    }
                }
            }
            out = next;
        }
        out
    }

    fn successors(&self, state: &[Symbol]) -> Vec<Word> {
        let mut out = Vec::new();
        for c in 0..self.pres.alphabet_size {
            let mut x = state.to_vec();
            x.push(c);
            if !self.bad_suffix_at(&x, x.len() - 1) {
                out.push(x[x.len() - self.state_len..].to_vec());
            }
        }
        out
    }

    /// States that start an infinite path, found by pruning dead ends.
    fn alive_states(&self) -> HashSet<Word> {
        let states = self.all_words(self.state_len);
        let succ: HashMap<Word, Vec<Word>> =
            states.iter().map(|s| (s.clone(), self.successors(s))).collect();
        let mut alive: HashSet<Word> = states.into_iter().collect();
        loop {
            let dead: Vec<Word> = alive
                .iter()
                .filter(|s| !succ[*s].iter().any(|t| alive.contains(t)))
                .cloned()
                .collect();
            if dead.is_empty() {
                return alive;
            }
            for d in dead {
                alive.remove(&d);
            }
        }
    }

    /// Membership of `word` in `L(X)`.
    pub fn contains(&self, word: &[Symbol]) -> bool {
        if word.iter().any(|&s| s >= self.pres.alphabet_size) || !self.avoids(word) {
            return false;
        }
        self.extendable(word)
    }

    /// Assumes `word` avoids `F`.
    fn extendable(&self, word: &[Symbol]) -> bool {
        if word.len() >= self.state_len {
            return self.alive.contains(&word[word.len() - self.state_len..]);
        }
        let mut x = word.to_vec();
        (0..self.pres.alphabet_size).any(|c| {
            x.push(c);
            let ok = !self.bad_suffix_at(&x, x.len() - 1) && self.extendable(&x);
            x.pop();
            ok
        })
    }

    /// `L_n(X)` in lexicographic order.
    pub fn language(&self, n: usize) -> Vec<Word> {
        self.extensions(&[], n)
    }

    /// The words of `L_n(X)` that start with `prefix`, in lexicographic order.
    pub fn extensions(&self, prefix: &[Symbol], n: usize) -> Vec<Word> {
        let mut out = Vec::new();
        if prefix.len() > n || !self.contains(prefix) {
            return out;
        }
        let mut w = prefix.to_vec();
        self.extend_into(&mut w, n, &mut out);
        out
    }

    fn extend_into(&self, w: &mut Word, n: usize, out: &mut Vec<Word>) {
        if w.len() == n {
            out.push(w.clone());
            return;
        }
        for c in 0..self.pres.alphabet_size {
            w.push(c);
            if !self.bad_suffix_at(w, w.len() - 1) && self.extendable(w) {
                self.extend_into(w, n, out);
            }
            w.pop();
        }
    }

    /// The lexicographically least word of `L_n(X)` extending `prefix`.
    pub fn least_extension(&self, prefix: &[Symbol], n: usize) -> Option<Word> {
        if prefix.len() > n || !self.contains(prefix) {
            return None;
        }
        let mut w = prefix.to_vec();
        while w.len() < n {
            let c = (0..self.pres.alphabet_size).find(|&c| {
                w.push(c);
                let ok = !self.bad_suffix_at(&w, w.len() - 1) && self.extendable(&w);
                w.pop();
                ok
            })?;
            w.push(c);
        }
        Some(w)
    }

    /// All depth-`n` cylinder points, in lexicographic order.
    pub fn cylinders(&self, n: usize) -> Vec<CylinderPoint> {
        self.language(n).into_iter().map(CylinderPoint::new).collect()
    }

    /// Words `w` of length `period` with `w^∞` in `X_F`, in lexicographic
    /// order. Each names a periodic point; the list is closed under rotation.
    pub fn periodic_points(&self, period: usize) -> Vec<Word> {
        if period == 0 {
            return Vec::new();
        }
        let reps = 1 + self.max_forbidden_len().saturating_sub(1).div_ceil(period);
        self.all_words(period)
            .into_iter()
            .filter(|w| self.avoids(&w.repeat(reps + 1)))
            .collect()
    }
}

impl MetricSystem for Shift {
    type Point = CylinderPoint;

    /// Exact when the prefixes differ inside their common depth; otherwise
    /// the upper bound of [`shift_metric`].
    fn dist(&self, x: &CylinderPoint, y: &CylinderPoint) -> Result<Exact> {
        Ok(shift_metric(x, y).value)
    }

    fn map(&self, x: &CylinderPoint) -> Result<CylinderPoint> {
        x.shift().ok_or_else(|| Error::Domain("cannot shift a depth-0 cylinder".into()))
    }

    fn flags(&self) -> Flags {
        Flags {
            is_ultrametric: true,
            lipschitz_bound: Some(Exact::from_int(2)),
            is_invertible: false,
            is_isometry: false,
        }
    }

    fn contains(&self, x: &CylinderPoint) -> bool {
        Shift::contains(self, &x.prefix)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(s: &str) -> CylinderPoint {
        CylinderPoint::new(s.bytes().map(|b| (b - b'0') as u32).collect())
    }

    fn words(s: &[&str]) -> Vec<Word> {
        s.iter().map(|w| cp(w).prefix).collect()
    }

    #[test]
    fn golden_mean_periodic_points_are_lucas() {
        let s = Shift::new(construct::golden_mean()).unwrap();
        let counts: Vec<usize> = (1..=10).map(|n| s.periodic_points(n).len()).collect();
        assert_eq!(counts, vec![1, 3, 4, 7, 11, 18, 29, 47, 76, 123]);
        assert_eq!(s.periodic_points(3), words(&["000", "001", "010", "100"]));
        let full = Shift::new(construct::full_shift(2)).unwrap();
        assert_eq!(full.periodic_points(5).len(), 32);
    }

    #[test]
    fn metric_examples() {
        assert_eq!(shift_metric(&cp("011"), &cp("010")).value, Exact::new(1, 3));
        assert_eq!(shift_metric(&cp("0110"), &cp("0110")).value, Exact::zero());
        assert_eq!(shift_metric(&cp("1"), &cp("0")).value, Exact::one());
        let d = shift_metric(&cp("01"), &cp("0110"));
        assert!(d.upper_bound);
        assert_eq!(d.value, Exact::new(1, 3));
    }

    #[test]
    fn golden_mean_language() {
        let g = Shift::new(golden_mean()).unwrap();
        assert_eq!(g.language(2), words(&["00", "01", "10"]));
        assert_eq!(g.language(0), vec![Vec::<u32>::new()]);
        // Fibonacci counts.
        let counts: Vec<usize> = (1..=8).map(|n| g.language(n).len()).collect();
        assert_eq!(counts, vec![2, 3, 5, 8, 13, 21, 34, 55]);
    }

    #[test]
    fn full_shift_language() {
        let f = Shift::new(full_shift(2)).unwrap();
        assert_eq!(f.language(3).len(), 8);
    }

    #[test]
    fn even_shift_language() {
        let e = Shift::new(even_shift(3)).unwrap();
        let l4 = e.language(4);
        assert!(!l4.contains(&cp("1011").prefix));
        assert!(l4.contains(&cp("1001").prefix));
        let expected: Vec<Word> = (0u32..16)
            .map(|n| (0..4).rev().map(|b| (n >> b) & 1).collect::<Word>())
            .filter(|w| !w.windows(3).any(|f| f == [1, 0, 1]))
            .collect();
        assert_eq!(l4, expected);
        assert!(!e.language(3).contains(&cp("101").prefix));
    }

    #[test]
    fn dead_ends_are_excluded() {
        // 0 may only be followed by 0 or 1, 1 only by 2, and 2 by nothing:
        // every word through 1 dies, so L = {0^n}.
        let pres = ShiftPresentation::new(
            3,
            vec![vec![1, 0], vec![1, 1], vec![2, 0], vec![2, 1], vec![2, 2]],
        );
        let s = Shift::new(pres).unwrap();
        assert_eq!(s.language(3), words(&["000"]));
        assert!(s.avoids(&[0, 1, 2]));
        assert!(!s.contains(&[0, 1, 2]));
    }

    #[test]
    fn empty_shift() {
        let s = Shift::new(ShiftPresentation::new(1, vec![vec![0, 0]])).unwrap();
        assert!(s.language(1).is_empty());
        assert!(s.language(0).is_empty());
    }

    #[test]
    fn least_extension_is_first_in_order() {
        let e = Shift::new(even_shift(4)).unwrap();
        let all = e.extensions(&[1, 0], 7);
        assert_eq!(e.least_extension(&[1, 0], 7).as_ref(), all.first());
    }

    #[test]
    fn validation() {
        assert!(Shift::new(ShiftPresentation::new(2, vec![vec![2]])).is_err());
        let mut p = ShiftPresentation::new(2, vec![vec![1, 1]]);
        p.declared_order = Some(3);
        assert!(p.validate().is_err());
    }
}
