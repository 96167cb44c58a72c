use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::metric::{Flags, MetricSystem};
use crate::padic::{padic_dist, PAdic};
use crate::scalar::Exact;
use crate::symbolic::Word;

/// A finite stage: labelled points with an exact distance table bounded by 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Stage {
    labels: Vec<String>,
    dist: Vec<Vec<Exact>>,
    ultrametric: bool,
}

fn periodic_dist(a: &[u32], b: &[u32]) -> Exact {
    match a.iter().zip(b).position(|(x, y)| x != y) {
        Some(i) => Exact::recip_of(i as u64 + 1),
        None => Exact::zero(),
    }
}

impl Stage {
    pub fn from_table(labels: Vec<String>, dist: Vec<Vec<Exact>>) -> Result<Stage> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Domain("a stage needs at least one point".into()));
        }
        if dist.len() != n || dist.iter().any(|r| r.len() != n) {
            return Err(Error::Domain(format!("distance table is not {n}x{n}")));
        }
        let one = Exact::one();
        for i in 0..n {
            for j in 0..n {
                let d = &dist[i][j];
                if *d != dist[j][i] {
                    return Err(Error::Domain(format!("d({i},{j}) ≠ d({j},{i})")));
                }
                if (i == j && !d.is_zero()) || (i != j && !d.is_positive()) {
                    return Err(Error::Domain(format!("d({i},{j}) = {d} breaks definiteness")));
                }
                if *d > one {
                    return Err(Error::Domain(format!("d({i},{j}) = {d} exceeds 1")));
                }
            }
        }
        let mut ultrametric = true;
        'outer: for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if dist[i][k] > dist[i][j].clone().max(dist[j][k].clone()) {
                        ultrametric = false;
                        break 'outer;
                    }
                }
            }
        }
        Ok(Stage { labels, dist, ultrametric })
    }

    /// Words of one length read as periodic points `w^∞` under the shift
    /// metric.
    pub fn periodic_words(words: &[Word]) -> Result<Stage> {
        let len = words.first().map_or(0, |w| w.len());
        if words.iter().any(|w| w.len() != len) {
            return Err(Error::Domain("periodic words must share one length".into()));
        }
        let labels = words.iter().map(|w| w.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("")).collect();
        let dist = words.iter().map(|a| words.iter().map(|b| periodic_dist(a, b)).collect()).collect();
        Stage::from_table(labels, dist)
    }

    pub fn padic(points: &[PAdic]) -> Result<Stage> {
        let labels = points.iter().map(|x| x.to_string()).collect();
        let dist = points
            .iter()
            .map(|a| points.iter().map(|b| padic_dist(a, b)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Stage::from_table(labels, dist)
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dist(&self, i: usize, j: usize) -> &Exact {
        &self.dist[i][j]
    }

    pub fn is_ultrametric(&self) -> bool {
        self.ultrametric
    }

    /// The sub-stage on `keep`, in that order.
    pub fn restrict(&self, keep: &[usize]) -> Result<Stage> {
        Stage::from_table(
            keep.iter().map(|&i| self.labels[i].clone()).collect(),
            keep.iter().map(|&i| keep.iter().map(|&j| self.dist[i][j].clone()).collect()).collect(),
        )
    }
}

/// A point of the truncated inverse limit: one coordinate per stage.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoherentPoint {
    pub coords: Vec<usize>,
}

/// Stages `0..=M`, bondings `g_m: X_{m+1} → X_m` and optional self-maps.
#[derive(Clone, Debug, PartialEq)]
pub struct InverseSystem {
    stages: Vec<Stage>,
    bondings: Vec<Vec<usize>>,
    self_maps: Option<Vec<Vec<usize>>>,
}

fn check_table(t: &[usize], from: usize, to: usize, what: &str) -> Result<()> {
    if t.len() != from {
        return Err(Error::Domain(format!("{what} has {} entries for {from} points", t.len())));
    }
    if let Some(&bad) = t.iter().find(|&&y| y >= to) {
        return Err(Error::Domain(format!("{what} sends a point to {bad}, outside 0..{to}")));
    }
    Ok(())
}

impl InverseSystem {
    pub fn new(
        stages: Vec<Stage>,
        bondings: Vec<Vec<usize>>,
        self_maps: Option<Vec<Vec<usize>>>,
    ) -> Result<InverseSystem> {
        if stages.is_empty() || bondings.len() + 1 != stages.len() {
            return Err(Error::Domain("need stages 0..=M and M bondings".into()));
        }
        for (m, g) in bondings.iter().enumerate() {
            check_table(g, stages[m + 1].size(), stages[m].size(), &format!("bonding g_{m}"))?;
        }
        if let Some(fs) = &self_maps {
            if fs.len() != stages.len() {
                return Err(Error::Domain("need one self-map per stage".into()));
            }
            for (m, f) in fs.iter().enumerate() {
                check_table(f, stages[m].size(), stages[m].size(), &format!("self-map f_{m}"))?;
            }
        }
        let sys = InverseSystem { stages, bondings, self_maps };
        if let Some((m, y)) = sys.intertwining_defect() {
            return Err(Error::SystemDefect(format!(
                "f_{m} ∘ g_{m} ≠ g_{m} ∘ f_{} at point {y} of stage {}",
                m + 1,
                m + 1
            )));
        }
        Ok(sys)
    }

    /// The first `(m, y)` with `f_m(g_m(y)) ≠ g_m(f_{m+1}(y))`.
    pub fn intertwining_defect(&self) -> Option<(usize, usize)> {
        let fs = self.self_maps.as_ref()?;
        for (m, g) in self.bondings.iter().enumerate() {
            for y in 0..g.len() {
                if fs[m][g[y]] != g[fs[m + 1][y]] {
                    return Some((m, y));
                }
            }
        }
        None
    }

    /// Index of the last stage.
    pub fn top(&self) -> usize {
        self.stages.len() - 1
    }

    pub fn stage(&self, m: usize) -> &Stage {
        &self.stages[m]
    }

    pub fn bonding(&self, m: usize) -> &[usize] {
        &self.bondings[m]
    }

    pub fn self_map(&self, m: usize) -> Option<&[usize]> {
        self.self_maps.as_ref().map(|f| f[m].as_slice())
    }

    pub fn has_self_maps(&self) -> bool {
        self.self_maps.is_some()
    }

    pub fn is_surjective(&self, m: usize) -> bool {
        let hit: BTreeSet<usize> = self.bondings[m].iter().copied().collect();
        hit.len() == self.stages[m].size()
    }

    pub fn all_surjective(&self) -> bool {
        (0..self.bondings.len()).all(|m| self.is_surjective(m))
    }

    /// `g_to ∘ … ∘ g_{from-1}` applied to a stage-`from` point.
    pub fn project(&self, from: usize, to: usize, y: usize) -> usize {
        (to..from).rev().fold(y, |y, m| self.bondings[m][y])
    }

    /// The image of `X_from` in `X_to`.
    pub fn image(&self, from: usize, to: usize) -> BTreeSet<usize> {
        (0..self.stages[from].size()).map(|y| self.project(from, to, y)).collect()
    }

    /// The coherent point with top coordinate `y`.
    pub fn from_top(&self, y: usize) -> CoherentPoint {
        let m = self.top();
        let mut coords = vec![0; m + 1];
        coords[m] = y;
        for k in (0..m).rev() {
            coords[k] = self.bondings[k][coords[k + 1]];
        }
        CoherentPoint { coords }
    }

    /// Every coherent point; at truncation they are determined by the top
    /// coordinate.
    pub fn coherent_points(&self) -> Vec<CoherentPoint> {
        (0..self.stages[self.top()].size()).map(|y| self.from_top(y)).collect()
    }

    pub fn is_coherent(&self, a: &CoherentPoint) -> bool {
        a.coords.len() == self.stages.len()
            && a.coords.iter().zip(&self.stages).all(|(&x, s)| x < s.size())
            && (0..self.top()).all(|m| self.bondings[m][a.coords[m + 1]] == a.coords[m])
    }

    fn check_point(&self, a: &CoherentPoint) -> Result<()> {
        if self.is_coherent(a) {
            Ok(())
        } else {
            Err(Error::Domain(format!("{:?} is not a coherent point", a.coords)))
        }
    }

    /// `max_m d_m(a_m, b_m) / (m + 1)`.
    pub fn product_metric(&self, a: &CoherentPoint, b: &CoherentPoint) -> Result<Exact> {
        self.check_point(a)?;
        self.check_point(b)?;
        let mut best = Exact::zero();
        for (m, s) in self.stages.iter().enumerate() {
            let d = s.dist(a.coords[m], b.coords[m]);
            if d.is_positive() {
                best = best.max(d / &Exact::from_int(m as i64 + 1));
            }
        }
        Ok(best)
    }

    /// `(f_m)_*`: the self-maps applied coordinatewise.
    pub fn sigma_star(&self, a: &CoherentPoint) -> Result<CoherentPoint> {
        let fs = self
            .self_maps
            .as_ref()
            .ok_or_else(|| Error::Unsupported("the system has no self-maps".into()))?;
        self.check_point(a)?;
        let out = CoherentPoint { coords: a.coords.iter().enumerate().map(|(m, &x)| fs[m][x]).collect() };
        if !self.is_coherent(&out) {
            return Err(Error::SystemDefect(format!(
                "image of {:?} is not coherent; the self-maps do not intertwine",
                a.coords
            )));
        }
        Ok(out)
    }

    /// Stage `m` with its self-map as a metric system on point indices.
    pub fn stage_system(&self, m: usize) -> StageSystem<'_> {
        StageSystem { sys: self, m }
    }

    pub fn to_spec(&self) -> InverseSystemSpec {
        InverseSystemSpec {
            stages: self
                .stages
                .iter()
                .map(|s| StageSpec {
                    points: s.labels.iter().map(|l| Value::String(l.clone())).collect(),
                    metric: "table".into(),
                    dist: Some(s.dist.iter().map(|r| r.iter().map(|d| d.to_string()).collect()).collect()),
                })
                .collect(),
            bondings: self.bondings.clone(),
            self_maps: self.self_maps.clone(),
        }
    }

    pub fn from_json(s: &str) -> Result<InverseSystem> {
        let spec: InverseSystemSpec = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        spec.build()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec()).expect("spec serializes")
    }
}

/// The inverse-system file format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InverseSystemSpec {
    pub stages: Vec<StageSpec>,
    pub bondings: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub self_maps: Option<Vec<Vec<usize>>>,
}

/// `metric` is `"table"` (with `dist` as rational strings), `"shift_metric"`
/// (points are equal-length words read periodically) or `"padic"` (points
/// are p-adic literals).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageSpec {
    pub points: Vec<Value>,
    pub metric: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist: Option<Vec<Vec<String>>>,
}

fn label(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn word(v: &Value) -> Result<Word> {
    match v {
        Value::String(s) => s
            .chars()
            .map(|c| c.to_digit(10).ok_or_else(|| Error::Parse(format!("bad symbol {c:?} in {s:?}"))))
            .collect(),
        Value::Array(xs) => xs
            .iter()
            .map(|x| {
                x.as_u64()
                    .and_then(|n| u32::try_from(n).ok())
                    .ok_or_else(|| Error::Parse(format!("bad symbol {x}")))
            })
            .collect(),
        other => Err(Error::Parse(format!("expected a word, got {other}"))),
    }
}

impl StageSpec {
    pub fn build(&self) -> Result<Stage> {
        match self.metric.as_str() {
            "table" => {
                let dist = self
                    .dist
                    .as_ref()
                    .ok_or_else(|| Error::Config("a table stage needs \"dist\"".into()))?
                    .iter()
                    .map(|r| r.iter().map(|d| d.parse::<Exact>()).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                Stage::from_table(self.points.iter().map(label).collect(), dist)
            }
            "shift_metric" => Stage::periodic_words(&self.points.iter().map(word).collect::<Result<Vec<_>>>()?),
            "padic" => {
                let pts = self
                    .points
                    .iter()
                    .map(|v| label(v).parse::<PAdic>())
                    .collect::<Result<Vec<_>>>()?;
                Stage::padic(&pts)
            }
            other => Err(Error::Config(format!("unknown stage metric {other:?}"))),
        }
    }
}

impl InverseSystemSpec {
    pub fn build(&self) -> Result<InverseSystem> {
        let stages = self.stages.iter().map(StageSpec::build).collect::<Result<Vec<_>>>()?;
        InverseSystem::new(stages, self.bondings.clone(), self.self_maps.clone())
    }
}

impl MetricSystem for InverseSystem {
    type Point = CoherentPoint;

    fn dist(&self, x: &CoherentPoint, y: &CoherentPoint) -> Result<Exact> {
        self.product_metric(x, y)
    }

    fn map(&self, x: &CoherentPoint) -> Result<CoherentPoint> {
        self.sigma_star(x)
    }

    fn flags(&self) -> Flags {
        Flags {
            is_ultrametric: self.stages.iter().all(Stage::is_ultrametric),
            lipschitz_bound: None,
            is_invertible: false,
            is_isometry: false,
        }
    }

    fn contains(&self, x: &CoherentPoint) -> bool {
        self.is_coherent(x)
    }
}

/// One stage of an [`InverseSystem`] as a metric system on point indices.
#[derive(Clone, Copy, Debug)]
pub struct StageSystem<'a> {
    sys: &'a InverseSystem,
    m: usize,
}

impl StageSystem<'_> {
    pub fn points(&self) -> Vec<usize> {
        (0..self.sys.stages[self.m].size()).collect()
    }
}

impl MetricSystem for StageSystem<'_> {
    type Point = usize;

    fn dist(&self, x: &usize, y: &usize) -> Result<Exact> {
        let s = &self.sys.stages[self.m];
        if *x >= s.size() || *y >= s.size() {
            return Err(Error::Domain(format!("no point {} in stage {}", (*x).max(*y), self.m)));
        }
        Ok(s.dist(*x, *y).clone())
    }

    fn map(&self, x: &usize) -> Result<usize> {
        let f = self
            .sys
            .self_map(self.m)
            .ok_or_else(|| Error::Unsupported("the system has no self-maps".into()))?;
        f.get(*x).copied().ok_or_else(|| Error::Domain(format!("no point {x} in stage {}", self.m)))
    }

    fn flags(&self) -> Flags {
        Flags {
            is_ultrametric: self.sys.stages[self.m].is_ultrametric(),
            lipschitz_bound: None,
            is_invertible: false,
            is_isometry: false,
        }
    }

    fn contains(&self, x: &usize) -> bool {
        *x < self.sys.stages[self.m].size()
    }
}
