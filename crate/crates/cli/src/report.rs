use std::time::Instant;

use serde::Serialize;
use serde_json::{Map, Value};

pub const SCHEMA: &str = "ultradyn-report/1";

#[derive(Debug, Serialize)]
pub struct Entry {
    pub name: String,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    pub horizon: Option<usize>,
    pub candidate_set_description: String,
    pub seed: u64,
    pub as_expected: bool,
}

impl Entry {
    pub fn horizon(&mut self, h: usize) -> &mut Entry {
        self.horizon = Some(h);
        self
    }

    pub fn candidates(&mut self, desc: impl Into<String>) -> &mut Entry {
        self.candidate_set_description = desc.into();
        self
    }

    pub fn witness<T: Serialize>(&mut self, w: &T) -> &mut Entry {
        self.witness = Some(json(w));
        self
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub experiment: String,
    pub config: Value,
    pub verdicts: Vec<Entry>,
    pub witnesses: Map<String, Value>,
    /// The only field allowed to differ between runs of the same config.
    pub wall_clock_ms: u64,
    #[serde(skip)]
    seed: u64,
    #[serde(skip)]
    started: Option<Instant>,
}

pub fn json<T: Serialize + ?Sized>(t: &T) -> Value {
    serde_json::to_value(t).expect("report values serialize")
}

impl Report {
    pub fn new(experiment: &str, config: Value, seed: u64) -> Report {
        Report {
            schema: SCHEMA,
            experiment: experiment.to_string(),
            config,
            verdicts: Vec::new(),
            witnesses: Map::new(),
            wall_clock_ms: 0,
            seed,
            started: Some(Instant::now()),
        }
    }

    pub fn push(&mut self, name: &str, verdict: &str, as_expected: bool) -> &mut Entry {
        self.verdicts.push(Entry {
            name: name.to_string(),
            verdict: verdict.to_string(),
            witness: None,
            horizon: None,
            candidate_set_description: String::new(),
            seed: self.seed,
            as_expected,
        });
        self.verdicts.last_mut().unwrap()
    }

    pub fn put<T: Serialize + ?Sized>(&mut self, key: &str, value: &T) {
        self.witnesses.insert(key.to_string(), json(value));
    }

    pub fn finish(mut self) -> Report {
        if let Some(t) = self.started.take() {
            self.wall_clock_ms = t.elapsed().as_millis() as u64;
        }
        self
    }

    /// 0 when every verdict came out as expected, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.verdicts.iter().all(|v| v.as_expected) {
            0
        } else {
            1
        }
    }
}
