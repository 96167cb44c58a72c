use serde::{Deserialize, Serialize};

use super::{Shift, Word};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum OrderVerdict {
    HoldsToDepth,
    /// `uv` and `vw` are in the language, `uvw` is not.
    Counterexample { u: Word, v: Word, w: Word },
}

impl OrderVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, OrderVerdict::HoldsToDepth)
    }
}

/// Checks `uv, vw ∈ L ⇒ uvw ∈ L` for `|v| = p - 1` and
/// `|u| + |w| + p - 1 ≤ depth`.
///
/// A minimal violation has `|u|, |w| < max|F|`: a forbidden factor created by
/// the gluing must straddle `v`, and a dead end has to show up in the last
/// `max|F| - 1` symbols. So only those lengths are enumerated, shortest
/// total first.
pub fn is_order_p(x: &Shift, p: usize, depth: usize) -> Result<OrderVerdict> {
    if p == 0 {
        return Err(Error::Domain("order must be at least 1".into()));
    }
    if depth < p {
        return Err(Error::Domain(format!("depth {depth} is below the order {p}")));
    }
    let cap = x.max_forbidden_len().saturating_sub(1).max(1);
    let max_total = (depth + 1 - p).min(2 * cap);
    let vs = x.language(p - 1);
    let by_len: Vec<Vec<Word>> = (0..=cap).map(|n| x.language(n)).collect();
    for total in 2..=max_total {
        for v in &vs {
            for a in total.saturating_sub(cap).max(1)..=cap.min(total - 1) {
                let b = total - a;
                let us: Vec<&Word> = by_len[a]
                    .iter()
                    .filter(|u| x.contains(&[u.as_slice(), v].concat()))
                    .collect();
                if us.is_empty() {
                    continue;
                }
                let ws: Vec<&Word> = by_len[b]
                    .iter()
                    .filter(|w| x.contains(&[v.as_slice(), w].concat()))
                    .collect();
                for u in &us {
                    for w in &ws {
                        if !x.contains(&[u.as_slice(), v, w].concat()) {
                            return Ok(OrderVerdict::Counterexample {
                                u: u.to_vec(),
                                v: v.clone(),
                                w: w.to_vec(),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(OrderVerdict::HoldsToDepth)
}

/// Least `p ≤ p_max` for which [`is_order_p`] holds to `depth`.
pub fn min_order(x: &Shift, p_max: usize, depth: usize) -> Result<Option<usize>> {
    if p_max == 0 {
        return Err(Error::Domain("p_max must be at least 1".into()));
    }
    for p in 1..=p_max.min(depth) {
        if is_order_p(x, p, depth)?.holds() {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{even_shift, full_shift, golden_mean};

    #[test]
    fn golden_mean_is_one_step() {
        let g = Shift::new(golden_mean()).unwrap();
        assert!(is_order_p(&g, 2, 10).unwrap().holds());
        assert_eq!(
            is_order_p(&g, 1, 10).unwrap(),
            OrderVerdict::Counterexample { u: vec![1], v: vec![], w: vec![1] }
        );
        assert_eq!(min_order(&g, 5, 12).unwrap(), Some(2));
    }

    #[test]
    fn full_shift_has_order_one() {
        let f = Shift::new(full_shift(3)).unwrap();
        for p in 1..5 {
            assert!(is_order_p(&f, p, 8).unwrap().holds());
        }
        assert_eq!(min_order(&f, 3, 6).unwrap(), Some(1));
    }

    #[test]
    fn even_shift_counterexample() {
        let e = Shift::new(even_shift(3)).unwrap();
        let OrderVerdict::Counterexample { u, v, w } = is_order_p(&e, 3, 12).unwrap() else {
            panic!("even shift passed p=3");
        };
        assert_eq!(v.len(), 2);
        assert!(e.contains(&[u.clone(), v.clone()].concat()));
        assert!(e.contains(&[v.clone(), w.clone()].concat()));
        assert!(!e.contains(&[u, v, w].concat()));
        assert!(e.contains(&[1, 0, 0, 0]) && e.contains(&[0, 0, 1]));
        assert!(!e.contains(&[1, 0, 0, 0, 1]));
        assert_eq!(min_order(&e, 4, 12).unwrap(), None);
        let e4 = Shift::new(even_shift(4)).unwrap();
        assert_eq!(min_order(&e4, 6, 16).unwrap(), None);
    }

    #[test]
    fn bad_arguments() {
        let g = Shift::new(golden_mean()).unwrap();
        assert!(is_order_p(&g, 0, 4).is_err());
        assert!(is_order_p(&g, 5, 4).is_err());
        assert!(min_order(&g, 0, 4).is_err());
    }
}
