use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{checked_pseudo_orbit, Flags, IndexSet, MetricSystem, PseudoOrbit};
use crate::scalar::Exact;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LineMetric {
    Euclidean,
    Discrete,
}

/// Finitely many labelled rationals with a map table. A `None` entry means
/// the image lies outside the truncation.
#[derive(Clone, Debug)]
pub struct EnumeratedLine {
    labels: Vec<i64>,
    values: Vec<Exact>,
    map: Vec<Option<usize>>,
    metric: LineMetric,
}

#[derive(Serialize)]
struct LineRow<'a> {
    label: i64,
    value: &'a Exact,
    image: Option<usize>,
}

#[derive(Serialize)]
struct LineTable<'a> {
    metric: LineMetric,
    points: Vec<LineRow<'a>>,
}

impl EnumeratedLine {
    pub fn new(labels: Vec<i64>, values: Vec<Exact>, map: Vec<Option<usize>>, metric: LineMetric) -> Result<Self> {
        let n = labels.len();
        if values.len() != n || map.len() != n {
            return Err(Error::Domain("labels, values and map differ in length".into()));
        }
        if map.iter().flatten().any(|&y| y >= n) {
            return Err(Error::Domain("map table leaves the point list".into()));
        }
        Ok(EnumeratedLine { labels, values, map, metric })
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, i: usize) -> i64 {
        self.labels[i]
    }

    pub fn value(&self, i: usize) -> &Exact {
        &self.values[i]
    }

    pub fn metric(&self) -> LineMetric {
        self.metric
    }

    pub fn index_of(&self, label: i64) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn points(&self) -> Vec<usize> {
        (0..self.size()).collect()
    }

    /// Points whose first `steps` images stay inside the truncation.
    pub fn starts_for(&self, steps: usize) -> Vec<usize> {
        (0..self.size())
            .filter(|&i| {
                let mut x = Some(i);
                for _ in 0..steps {
                    x = x.and_then(|y| self.map[y]);
                }
                x.is_some()
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        let t = LineTable {
            metric: self.metric,
            points: (0..self.size())
                .map(|i| LineRow { label: self.labels[i], value: &self.values[i], image: self.map[i] })
                .collect(),
        };
        serde_json::to_string_pretty(&t).expect("table serializes")
    }
}

impl MetricSystem for EnumeratedLine {
    type Point = usize;

    fn dist(&self, x: &usize, y: &usize) -> Result<Exact> {
        if *x >= self.size() || *y >= self.size() {
            return Err(Error::Domain(format!("no point {}", (*x).max(*y))));
        }
        Ok(match self.metric {
            LineMetric::Euclidean => (&self.values[*x] - &self.values[*y]).abs(),
            LineMetric::Discrete if x == y => Exact::zero(),
            LineMetric::Discrete => Exact::one(),
        })
    }

    fn map(&self, x: &usize) -> Result<usize> {
        self.map
            .get(*x)
            .copied()
            .flatten()
            .ok_or_else(|| Error::Domain(format!("the image of x_{} is outside the truncation", self.labels[*x])))
    }

    fn flags(&self) -> Flags {
        let discrete = self.metric == LineMetric::Discrete;
        Flags {
            is_ultrametric: discrete,
            lipschitz_bound: None,
            is_invertible: true,
            is_isometry: discrete,
        }
    }

    fn inverse(&self, x: &usize) -> Result<usize> {
        self.map
            .iter()
            .position(|&y| y == Some(*x))
            .ok_or_else(|| Error::Domain(format!("the preimage of x_{} is outside the truncation", self.labels[*x])))
    }

    fn contains(&self, x: &usize) -> bool {
        *x < self.size()
    }
}

/// `x_n = n` for `n ≥ 0`, `x_{-n} = n + 1/(n+1)`, `f(x_n) = x_{n+1}`, for
/// `|n| ≤ range`; returned under the euclidean and the discrete metric.
pub fn build_example_metric_dep(range: usize) -> Result<(EnumeratedLine, EnumeratedLine)> {
    if range == 0 {
        return Err(Error::Config("range must be positive".into()));
    }
    let r = range as i64;
    let labels: Vec<i64> = (-r..=r).collect();
    let values = labels
        .iter()
        .map(|&n| if n >= 0 { Exact::from_int(n) } else { Exact::from_int(-n) + Exact::recip_of((1 - n) as u64) })
        .collect::<Vec<_>>();
    let map = (0..labels.len()).map(|i| (i + 1 < labels.len()).then_some(i + 1)).collect::<Vec<_>>();
    Ok((
        EnumeratedLine::new(labels.clone(), values.clone(), map.clone(), LineMetric::Euclidean)?,
        EnumeratedLine::new(labels, values, map, LineMetric::Discrete)?,
    ))
}

/// The bounded pseudo-orbit of period `2n`: `x_0, …, x_{n-1}`, then
/// `x_{-n}, …, x_{-1}`, repeated to `len` points and checked against `delta`.
pub fn metric_dep_pseudo_orbit(
    sys: &EnumeratedLine,
    n: usize,
    len: usize,
    delta: &Exact,
) -> Result<PseudoOrbit<usize>> {
    if n == 0 || len == 0 {
        return Err(Error::Domain("n and len must be positive".into()));
    }
    let n = n as i64;
    let label_at = |i: i64| {
        let r = i % (2 * n);
        if r < n {
            r
        } else {
            -n + (r - n)
        }
    };
    let pts = (0..len as i64)
        .map(|i| {
            let l = label_at(i);
            sys.index_of(l).ok_or_else(|| Error::Config(format!("x_{l} is outside the truncation")))
        })
        .collect::<Result<Vec<_>>>()?;
    checked_pseudo_orbit(sys, IndexSet::Finite, pts, delta.clone())
}
