use super::system::{InverseSystem, Stage};
use crate::error::{Error, Result};
use crate::padic::PAdic;
use crate::scalar::Exact;
use crate::symbolic::Shift;

fn rotation(words: &[Vec<u32>]) -> Vec<usize> {
    words
        .iter()
        .map(|w| {
            let mut r = w[1..].to_vec();
            r.push(w[0]);
            words.binary_search(&r).expect("periodic points are closed under rotation")
        })
        .collect()
}

/// Stages `0..=top` all equal to the period-`period` points of `shift` under
/// the shift metric, identity bondings, the shift as self-map.
pub fn periodic_shift_tower(shift: &Shift, period: usize, top: usize) -> Result<InverseSystem> {
    let words = shift.periodic_points(period);
    if words.is_empty() {
        return Err(Error::Domain(format!("no points of period {period}")));
    }
    let stage = Stage::periodic_words(&words)?;
    let f = rotation(&words);
    let id: Vec<usize> = (0..words.len()).collect();
    InverseSystem::new(vec![stage; top + 1], vec![id; top], Some(vec![f; top + 1]))
}

/// Stage `m` is `Z/p^{m+1}` with the p-adic metric, bondings reduce the
/// modulus and every stage translates by `c`.
pub fn zp_residue_tower(p: u32, top: usize, c: i64) -> Result<InverseSystem> {
    let mut stages = Vec::new();
    let mut bondings = Vec::new();
    let mut maps = Vec::new();
    for m in 0..=top {
        let size = (p as usize).pow(m as u32 + 1);
        let pts = (0..size)
            .map(|x| PAdic::from_int(p, x as i64, m + 1))
            .collect::<Result<Vec<_>>>()?;
        stages.push(Stage::padic(&pts)?);
        maps.push((0..size).map(|x| (x as i64 + c).rem_euclid(size as i64) as usize).collect());
        if m > 0 {
            let below = (p as usize).pow(m as u32);
            bondings.push((0..size).map(|x| x % below).collect());
        }
    }
    InverseSystem::new(stages, bondings, Some(maps))
}

fn discrete(n: usize) -> Result<Stage> {
    let dist = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Exact::zero() } else { Exact::one() }).collect())
        .collect();
    Stage::from_table((0..n).map(|i| i.to_string()).collect(), dist)
}

/// `X_m = {0..=m}` with the discrete metric and `g_m(y) = min(y, m)`: every
/// bonding is onto.
pub fn surjective_chain(top: usize) -> Result<InverseSystem> {
    let stages = (0..=top).map(|m| discrete(m + 1)).collect::<Result<Vec<_>>>()?;
    let bondings = (0..top).map(|m| (0..m + 2).map(|y| y.min(m)).collect()).collect();
    let maps = (0..=top).map(|m| (0..=m).collect()).collect();
    InverseSystem::new(stages, bondings, Some(maps))
}

/// `X_m = {0..=top-m}` with the discrete metric and inclusions as bondings:
/// each image loses its top element.
pub fn shrinking_chain(top: usize) -> Result<InverseSystem> {
    let stages = (0..=top).map(|m| discrete(top - m + 1)).collect::<Result<Vec<_>>>()?;
    let bondings = (0..top).map(|m| (0..top - m).collect()).collect();
    InverseSystem::new(stages, bondings, None)
}
