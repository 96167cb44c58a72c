use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use super::system::InverseSystem;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum MlVerdict {
    /// The images of `X_j` in `X_n` agree for every `j ∈ [k, horizon]`.
    HoldsAt { n: usize, k: usize },
    /// The images still changed at the horizon. Says nothing about stages
    /// beyond it.
    FailsToHorizon { n: usize, horizon: usize },
}

impl MlVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, MlVerdict::HoldsAt { .. })
    }
}

/// Looks for the least `k ∈ (n, horizon)` at which the images of `X_j` in
/// `X_n` stop changing up to the horizon. `k = horizon` would be vacuous,
/// so it is not offered.
pub fn check_mittag_leffler(sys: &InverseSystem, n: usize, horizon: usize) -> Result<MlVerdict> {
    if n >= horizon || horizon > sys.top() {
        return Err(Error::Domain(format!("need n < horizon ≤ {}", sys.top())));
    }
    let images: Vec<BTreeSet<usize>> = (n..=horizon).into_par_iter().map(|j| sys.image(j, n)).collect();
    let last = &images[horizon - n];
    for k in n + 1..horizon {
        if images[k - n..].iter().all(|im| im == last) {
            return Ok(MlVerdict::HoldsAt { n, k });
        }
    }
    Ok(MlVerdict::FailsToHorizon { n, horizon })
}

/// The system restricted to `Y_n`, the image of `X_horizon` in each `X_n`.
#[derive(Clone, Debug)]
pub struct Stabilized {
    pub system: InverseSystem,
    /// `kept[n]` lists the original indices of `Y_n`, increasing.
    pub kept: Vec<Vec<usize>>,
    /// Whether the image chain at stage `n` had settled one stage before the
    /// horizon. The top stage carries no evidence and is always `false`.
    pub stabilized: Vec<bool>,
}

pub fn stabilized_images(sys: &InverseSystem, horizon: usize) -> Result<Stabilized> {
    if horizon > sys.top() {
        return Err(Error::Domain(format!("horizon {horizon} exceeds the top stage {}", sys.top())));
    }
    let kept: Vec<Vec<usize>> =
        (0..=horizon).into_par_iter().map(|n| sys.image(horizon, n).into_iter().collect()).collect();
    let stabilized = (0..=horizon)
        .map(|n| n < horizon && sys.image(horizon - 1, n).len() == kept[n].len())
        .collect();
    let index_in = |n: usize, x: usize| -> Result<usize> {
        kept[n]
            .binary_search(&x)
            .map_err(|_| Error::SystemDefect(format!("stage {n} point {x} leaves Y_{n}")))
    };
    let stages = (0..=horizon).map(|n| sys.stage(n).restrict(&kept[n])).collect::<Result<Vec<_>>>()?;
    let bondings = (0..horizon)
        .map(|m| kept[m + 1].iter().map(|&y| index_in(m, sys.bonding(m)[y])).collect())
        .collect::<Result<Vec<_>>>()?;
    let self_maps = if sys.has_self_maps() {
        Some(
            (0..=horizon)
                .map(|m| {
                    let f = sys.self_map(m).unwrap();
                    kept[m].iter().map(|&x| index_in(m, f[x])).collect()
                })
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        None
    };
    Ok(Stabilized { system: InverseSystem::new(stages, bondings, self_maps)?, kept, stabilized })
}
