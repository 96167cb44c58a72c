use serde::{Deserialize, Serialize};

use super::number::PAdic;
use crate::error::{Error, Result};
use crate::partitions::DefiningSequence;
use crate::scalar::Exact;

/// `U_n = { Z_p(σ) : σ ∈ A^n }`: cylinders on the first `n` digits.
#[derive(Clone, Debug)]
pub struct ZpBalls {
    p: u32,
    depth: usize,
    prec: usize,
}

/// The ball partitions of `Z_p` through level `n`, with representatives
/// carrying `prec ≥ n` digits.
pub fn ball_partition_zp(p: u32, n: usize, prec: usize) -> Result<ZpBalls> {
    PAdic::zero(p, 1)?;
    if prec < n {
        return Err(Error::Domain(format!("precision {prec} is below the depth {n}")));
    }
    Ok(ZpBalls { p, depth: n, prec })
}

fn words(p: u32, len: usize) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..p).map(move |c| {
                    let mut x = w.clone();
                    x.push(c);
                    x
                })
            })
            .collect();
    }
    out
}

fn check_point(p: u32, x: &PAdic, n: usize) -> Result<()> {
    if x.prime() != p {
        return Err(Error::Domain(format!("point over p = {}, partition over p = {p}", x.prime())));
    }
    if x.absolute_precision() < n as i64 {
        return Err(Error::Precision(format!("carrier at level {n} needs {n} known digits")));
    }
    Ok(())
}

impl DefiningSequence for ZpBalls {
    type Point = PAdic;
    type Cell = Vec<u32>;

    fn depth(&self) -> usize {
        self.depth
    }

    fn carrier(&self, level: usize, x: &PAdic) -> Result<Vec<u32>> {
        check_point(self.p, x, level)?;
        if !x.is_integral() {
            return Err(Error::Domain("point is not in Z_p".into()));
        }
        Ok(x.digits()[..level].to_vec())
    }

    fn parent(&self, level: usize, cell: &Vec<u32>) -> Result<Vec<u32>> {
        if level == 0 || cell.len() != level {
            return Err(Error::Domain(format!("no level-{level} cell {cell:?}")));
        }
        Ok(cell[..level - 1].to_vec())
    }

    fn cells(&self, level: usize) -> Result<Vec<Vec<u32>>> {
        Ok(words(self.p, level))
    }

    fn representative(&self, level: usize, cell: &Vec<u32>) -> Result<PAdic> {
        if cell.len() != level {
            return Err(Error::Domain(format!("no level-{level} cell {cell:?}")));
        }
        let mut d = cell.clone();
        d.resize(self.prec.max(level), 0);
        PAdic::from_digits(self.p, 0, d)
    }

    fn diameter_bound(&self, level: usize) -> Exact {
        Exact::pow(self.p as u64, 1 - level as i64)
    }

    fn separation(&self, level: usize) -> Exact {
        Exact::pow(self.p as u64, 1 - level as i64)
    }

    fn ball_radius(&self, level: usize) -> Option<Exact> {
        Some(Exact::pow(self.p as u64, 1 - level as i64))
    }
}

/// A cell `Z_p(σ) p^j` of `V_n`; `j = n` with empty `σ` is `p^n Z_p`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QpCell {
    pub j: i64,
    pub sigma: Vec<u32>,
}

/// `V_n = { Z_p(σ) p^j : σ ∈ A^{n-j}, σ_0 ≠ 0, j ≤ n }`, restricted to the
/// valuation window `j ≥ l_min`.
#[derive(Clone, Debug)]
pub struct QpBalls {
    p: u32,
    depth: usize,
    l_min: i64,
    prec: usize,
}

pub fn ball_partition_qp(p: u32, n: usize, l_min: i64, prec: usize) -> Result<QpBalls> {
    PAdic::zero(p, 1)?;
    if l_min > 0 {
        return Err(Error::Domain(format!("window [{l_min}, 0] at level 0 is empty")));
    }
    Ok(QpBalls { p, depth: n, l_min, prec: prec.max(1) })
}

impl QpBalls {
    pub fn window_start(&self) -> i64 {
        self.l_min
    }
}

impl DefiningSequence for QpBalls {
    type Point = PAdic;
    type Cell = QpCell;

    fn depth(&self) -> usize {
        self.depth
    }

    fn carrier(&self, level: usize, x: &PAdic) -> Result<QpCell> {
        check_point(self.p, x, level)?;
        let n = level as i64;
        match x.valuation() {
            Some(v) if v < n => {
                if v < self.l_min {
                    return Err(Error::Domain(format!(
                        "valuation {v} lies below the window start {}",
                        self.l_min
                    )));
                }
                let sigma = (v..n).map(|t| x.digit_at(t).unwrap()).collect();
                Ok(QpCell { j: v, sigma })
            }
            _ => Ok(QpCell { j: n, sigma: Vec::new() }),
        }
    }

    fn parent(&self, level: usize, cell: &QpCell) -> Result<QpCell> {
        let n = level as i64;
        if level == 0 || cell.j > n || cell.sigma.len() as i64 != n - cell.j {
            return Err(Error::Domain(format!("no level-{level} cell {cell:?}")));
        }
        if cell.j == n {
            return Ok(QpCell { j: n - 1, sigma: Vec::new() });
        }
        Ok(QpCell { j: cell.j, sigma: cell.sigma[..cell.sigma.len() - 1].to_vec() })
    }

    fn cells(&self, level: usize) -> Result<Vec<QpCell>> {
        let n = level as i64;
        let mut out = Vec::new();
        for j in self.l_min..n {
            for sigma in words(self.p, (n - j) as usize) {
                if sigma[0] != 0 {
                    out.push(QpCell { j, sigma });
                }
            }
        }
        out.push(QpCell { j: n, sigma: Vec::new() });
        Ok(out)
    }

    fn representative(&self, level: usize, cell: &QpCell) -> Result<PAdic> {
        let n = level as i64;
        if cell.sigma.len() as i64 != n - cell.j {
            return Err(Error::Domain(format!("no level-{level} cell {cell:?}")));
        }
        let mut d = cell.sigma.clone();
        let total = (n - cell.j).max(0) as usize + self.prec;
        d.resize(total, 0);
        PAdic::from_digits(self.p, cell.j, d)
    }

    fn diameter_bound(&self, level: usize) -> Exact {
        Exact::pow(self.p as u64, 1 - level as i64)
    }

    fn separation(&self, level: usize) -> Exact {
        Exact::pow(self.p as u64, 1 - level as i64)
    }

    fn ball_radius(&self, level: usize) -> Option<Exact> {
        Some(Exact::pow(self.p as u64, 1 - level as i64))
    }
}
