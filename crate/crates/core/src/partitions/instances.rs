use std::collections::BTreeSet;

use super::DefiningSequence;
use crate::error::{Error, Result};
use crate::metric::{MetricSystem, TableSystem};
use crate::scalar::Exact;
use crate::symbolic::{CylinderPoint, Shift, Word};

/// Cylinders on the first `n` symbols of a shift.
#[derive(Clone, Debug)]
pub struct ShiftCylinders {
    shift: Shift,
    depth: usize,
    rep_depth: usize,
}

impl ShiftCylinders {
    /// Levels `0..=depth`; representatives are extended to `rep_depth`
    /// symbols.
    pub fn new(shift: Shift, depth: usize, rep_depth: usize) -> ShiftCylinders {
        ShiftCylinders { shift, depth, rep_depth: rep_depth.max(depth) }
    }

    pub fn shift(&self) -> &Shift {
        &self.shift
    }
}

impl DefiningSequence for ShiftCylinders {
    type Point = CylinderPoint;
    type Cell = Word;

    fn depth(&self) -> usize {
        self.depth
    }

    fn carrier(&self, level: usize, x: &CylinderPoint) -> Result<Word> {
        if x.depth() < level {
            return Err(Error::Precision(format!(
                "depth-{} point has no level-{level} carrier",
                x.depth()
            )));
        }
        Ok(x.prefix[..level].to_vec())
    }

    fn parent(&self, level: usize, cell: &Word) -> Result<Word> {
        if level == 0 || cell.len() != level {
            return Err(Error::Domain(format!("no level-{level} cell {cell:?}")));
        }
        Ok(cell[..level - 1].to_vec())
    }

    fn cells(&self, level: usize) -> Result<Vec<Word>> {
        Ok(self.shift.language(level))
    }

    fn representative(&self, level: usize, cell: &Word) -> Result<CylinderPoint> {
        if cell.len() != level {
            return Err(Error::Domain(format!("no level-{level} cell {cell:?}")));
        }
        self.shift
            .least_extension(cell, self.rep_depth)
            .map(CylinderPoint::new)
            .ok_or_else(|| Error::Domain(format!("{cell:?} is not in the language")))
    }

    fn diameter_bound(&self, level: usize) -> Exact {
        Exact::recip_of(level as u64 + 1)
    }

    fn separation(&self, level: usize) -> Exact {
        Exact::recip_of(level.max(1) as u64)
    }

    fn ball_radius(&self, level: usize) -> Option<Exact> {
        (level > 0).then(|| Exact::recip_of(level as u64))
    }
}

/// Open balls of radius `1/n` in a finite ultrametric space, level 0 being
/// the whole space. A cell is named by its least point.
#[derive(Clone, Debug)]
pub struct BallSequence {
    sys: TableSystem,
    depth: usize,
    top: Exact,
}

impl BallSequence {
    pub fn new(sys: TableSystem, depth: usize) -> Result<BallSequence> {
        if !sys.flags().is_ultrametric {
            return Err(Error::Precondition("ball partitions need an ultrametric".into()));
        }
        let mut diam = Exact::zero();
        for x in sys.points() {
            for y in sys.points() {
                diam = diam.max(sys.dist(&x, &y)?);
            }
        }
        // Any bound above S_1 = 1 serves at level 0.
        let top = diam.max(Exact::from_int(2));
        Ok(BallSequence { sys, depth, top })
    }

    pub fn system(&self) -> &TableSystem {
        &self.sys
    }
}

impl DefiningSequence for BallSequence {
    type Point = usize;
    type Cell = usize;

    fn depth(&self) -> usize {
        self.depth
    }

    fn carrier(&self, level: usize, x: &usize) -> Result<usize> {
        if *x >= self.sys.size() {
            return Err(Error::Domain(format!("no point {x}")));
        }
        if level == 0 {
            return Ok(0);
        }
        let r = Exact::recip_of(level as u64);
        for y in 0..self.sys.size() {
            if self.sys.dist(x, &y)? < r {
                return Ok(y);
            }
        }
        unreachable!("x lies in its own ball")
    }

    fn parent(&self, level: usize, cell: &usize) -> Result<usize> {
        if level == 0 {
            return Err(Error::Domain("level 0 has no parent".into()));
        }
        self.carrier(level - 1, cell)
    }

    fn cells(&self, level: usize) -> Result<Vec<usize>> {
        let set: BTreeSet<usize> =
            (0..self.sys.size()).map(|x| self.carrier(level, &x)).collect::<Result<_>>()?;
        Ok(set.into_iter().collect())
    }

    fn representative(&self, _level: usize, cell: &usize) -> Result<usize> {
        Ok(*cell)
    }

    fn diameter_bound(&self, level: usize) -> Exact {
        if level == 0 {
            self.top.clone()
        } else {
            Exact::recip_of(level as u64)
        }
    }

    fn separation(&self, level: usize) -> Exact {
        Exact::recip_of(level.max(1) as u64)
    }

    fn ball_radius(&self, level: usize) -> Option<Exact> {
        (level > 0).then(|| Exact::recip_of(level as u64))
    }
}

/// A partition sequence of `0..size` given level by level as cell labels,
/// with declared `S_n`, `ρ_n`.
#[derive(Clone, Debug)]
pub struct TablePartition {
    labels: Vec<Vec<usize>>,
    s: Vec<Exact>,
    rho: Vec<Exact>,
}

impl TablePartition {
    /// `labels[n][x]` is the cell of point `x` at level `n`.
    pub fn new(labels: Vec<Vec<usize>>, s: Vec<Exact>, rho: Vec<Exact>) -> Result<TablePartition> {
        if labels.is_empty() || s.len() != labels.len() || rho.len() != labels.len() {
            return Err(Error::Domain("one label row, S_n and ρ_n per level".into()));
        }
        let size = labels[0].len();
        if labels.iter().any(|l| l.len() != size) {
            return Err(Error::Domain("label rows differ in length".into()));
        }
        if labels[0].iter().any(|&c| c != labels[0][0]) {
            return Err(Error::Domain("level 0 must be a single cell".into()));
        }
        for n in 1..labels.len() {
            for x in 0..size {
                for y in 0..size {
                    if labels[n][x] == labels[n][y] && labels[n - 1][x] != labels[n - 1][y] {
                        return Err(Error::Domain(format!("level {n} does not refine level {}", n - 1)));
                    }
                }
            }
        }
        Ok(TablePartition { labels, s, rho })
    }
}

impl DefiningSequence for TablePartition {
    type Point = usize;
    type Cell = usize;

    fn depth(&self) -> usize {
        self.labels.len() - 1
    }

    fn carrier(&self, level: usize, x: &usize) -> Result<usize> {
        self.labels
            .get(level)
            .and_then(|l| l.get(*x))
            .copied()
            .ok_or_else(|| Error::Domain(format!("no point {x} at level {level}")))
    }

    fn parent(&self, level: usize, cell: &usize) -> Result<usize> {
        let x = self.representative(level, cell)?;
        self.carrier(level - 1, &x)
    }

    fn cells(&self, level: usize) -> Result<Vec<usize>> {
        let set: BTreeSet<usize> = self.labels[level].iter().copied().collect();
        Ok(set.into_iter().collect())
    }

    fn representative(&self, level: usize, cell: &usize) -> Result<usize> {
        self.labels
            .get(level)
            .and_then(|l| l.iter().position(|c| c == cell))
            .ok_or_else(|| Error::Domain(format!("no level-{level} cell {cell}")))
    }

    fn diameter_bound(&self, level: usize) -> Exact {
        self.s[level].clone()
    }

    fn separation(&self, level: usize) -> Exact {
        self.rho[level].clone()
    }
}
