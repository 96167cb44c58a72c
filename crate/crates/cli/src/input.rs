use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use ultradyn::invlim::InverseSystem;
use ultradyn::scalar::Exact;
use ultradyn::symbolic::{Shift, ShiftPresentation, Word};

use crate::Failure;

/// `shadow-check` input, tagged by `kind`.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SystemFile {
    /// Exact distance table and map table over points `0..n`.
    Table { dist: Vec<Vec<Exact>>, map: Vec<usize> },
    /// The periodic points of a shift of finite type.
    Shift {
        alphabet_size: u32,
        forbidden: Vec<Word>,
        #[serde(default)]
        period: Option<usize>,
    },
    /// `Z_p / p^precision` under a map in the `poly:`/`affine:`/`shift`/`table:` syntax.
    Padic { p: u32, precision: usize, map: String },
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::usage(format!("malformed {}: {e}", path.display())))
}

pub fn load_shift(path: &Path) -> Result<Shift, Failure> {
    let pres: ShiftPresentation = load(path)?;
    Ok(Shift::new(pres)?)
}

pub fn load_inverse_system(path: &Path) -> Result<InverseSystem, Failure> {
    Ok(InverseSystem::from_json(&read(path)?)?)
}
