use std::fmt::Debug;
use std::hash::Hash;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::MetricSystem;
use crate::scalar::Exact;

/// A nested sequence of partitions, available down to level `depth()`.
///
/// Cells are named by values of `Cell`; each level's cells are finite at
/// the chosen truncation and listed in increasing order.
pub trait DefiningSequence {
    type Point: Clone + Debug;
    type Cell: Clone + Eq + Ord + Hash + Debug + Serialize;

    fn depth(&self) -> usize;

    /// The unique level-`level` cell containing `x`.
    fn carrier(&self, level: usize, x: &Self::Point) -> Result<Self::Cell>;

    /// The level-`level - 1` cell containing a level-`level` cell.
    fn parent(&self, level: usize, cell: &Self::Cell) -> Result<Self::Cell>;

    fn cells(&self, level: usize) -> Result<Vec<Self::Cell>>;

    /// Some point of the cell.
    fn representative(&self, level: usize, cell: &Self::Cell) -> Result<Self::Point>;

    /// Declared diameter bound `S_n`.
    fn diameter_bound(&self, level: usize) -> Exact;

    /// Declared separation `ρ_n`.
    fn separation(&self, level: usize) -> Exact;

    /// `Some(r)` when the level cells are exactly the open `r`-balls of the
    /// ambient metric.
    fn ball_radius(&self, _level: usize) -> Option<Exact> {
        None
    }

    fn is_complete(&self) -> bool {
        true
    }

    fn contains(&self, level: usize, cell: &Self::Cell, x: &Self::Point) -> Result<bool> {
        Ok(self.carrier(level, x)? == *cell)
    }
}

/// The level-`to` ancestor of a level-`from` cell.
pub fn ancestor<A: DefiningSequence>(a: &A, from: usize, to: usize, cell: &A::Cell) -> Result<A::Cell> {
    if to > from {
        return Err(Error::Domain(format!("level {to} is below level {from}")));
    }
    let mut c = cell.clone();
    for lvl in (to + 1..=from).rev() {
        c = a.parent(lvl, &c)?;
    }
    Ok(c)
}

/// `u_A(x, y) = 1/(1 + j)` for the least level `j` where the carriers differ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InducedDistance {
    pub value: Exact,
    /// Carriers agree on every available level; `value` is 0.
    pub equal_to_depth: bool,
}

pub fn induced_ultrametric<A: DefiningSequence>(
    a: &A,
    x: &A::Point,
    y: &A::Point,
) -> Result<InducedDistance> {
    for j in 0..=a.depth() {
        if a.carrier(j, x)? != a.carrier(j, y)? {
            return Ok(InducedDistance { value: Exact::recip_of(j as u64 + 1), equal_to_depth: false });
        }
    }
    Ok(InducedDistance { value: Exact::zero(), equal_to_depth: true })
}

/// Per-level evidence from [`is_tame`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelCertificate {
    pub level: usize,
    pub diameter_bound: Exact,
    pub separation: Exact,
    /// Largest same-cell distance observed.
    pub max_within: Exact,
    /// Smallest cross-cell distance observed, if any cross pair was seen.
    pub min_across: Option<Exact>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Tameness<P> {
    Tame { levels: Vec<LevelCertificate> },
    /// Two points in one cell farther apart than `S_n`, or in distinct cells
    /// closer than `ρ_n`.
    Violation { level: usize, x: P, y: P, distance: Exact, reason: String },
    /// The declared `S_n` fail to decrease strictly.
    NotDecreasing { level: usize },
}

impl<P> Tameness<P> {
    pub fn is_tame(&self) -> bool {
        matches!(self, Tameness::Tame { .. })
    }
}

/// Checks the declared `S_n`, `ρ_n` against the metric on every pair of
/// `sample` points, level by level.
pub fn is_tame<A, S>(a: &A, metric: &S, sample: &[A::Point]) -> Result<Tameness<A::Point>>
where
    A: DefiningSequence,
    S: MetricSystem<Point = A::Point>,
{
    for n in 1..=a.depth() {
        if a.diameter_bound(n) >= a.diameter_bound(n - 1) {
            return Ok(Tameness::NotDecreasing { level: n });
        }
    }
    let mut levels = Vec::new();
    for n in 0..=a.depth() {
        let s = a.diameter_bound(n);
        let rho = a.separation(n);
        if !rho.is_positive() {
            return Ok(Tameness::NotDecreasing { level: n });
        }
        let carriers: Vec<A::Cell> = sample.iter().map(|x| a.carrier(n, x)).collect::<Result<_>>()?;
        let mut max_within = Exact::zero();
        let mut min_across: Option<Exact> = None;
        for i in 0..sample.len() {
            for j in i + 1..sample.len() {
                let d = metric.dist(&sample[i], &sample[j])?;
                if carriers[i] == carriers[j] {
                    if d > s {
                        return Ok(Tameness::Violation {
                            level: n,
                            x: sample[i].clone(),
                            y: sample[j].clone(),
                            distance: d,
                            reason: "diameter bound exceeded".into(),
                        });
                    }
                    max_within = max_within.max(d);
                } else {
                    if d < rho {
                        return Ok(Tameness::Violation {
                            level: n,
                            x: sample[i].clone(),
                            y: sample[j].clone(),
                            distance: d,
                            reason: "cells closer than the separation".into(),
                        });
                    }
                    min_across = Some(match min_across {
                        Some(m) => m.min(d),
                        None => d,
                    });
                }
            }
        }
        levels.push(LevelCertificate { level: n, diameter_bound: s, separation: rho, max_within, min_across });
    }
    Ok(Tameness::Tame { levels })
}
