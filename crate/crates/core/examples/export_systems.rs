//! Writes the stock inverse systems used by the CLI examples into `data/`.
//!
//!     cargo run -p ultradyn --example export_systems -- data

use std::fs;
use std::path::PathBuf;

use ultradyn::invlim::{periodic_shift_tower, shrinking_chain, surjective_chain, zp_residue_tower};
use ultradyn::symbolic::{golden_mean, Shift};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "data".into()));
    fs::create_dir_all(&dir)?;
    let golden = Shift::new(golden_mean())?;
    let systems = [
        ("golden_tower.json", periodic_shift_tower(&golden, 8, 1)?),
        ("z3_translation_tower.json", zp_residue_tower(3, 3, 1)?),
        ("surjective_chain.json", surjective_chain(10)?),
        ("shrinking_chain.json", shrinking_chain(10)?),
    ];
    for (name, sys) in systems {
        fs::write(dir.join(name), sys.to_json())?;
        println!("{}", dir.join(name).display());
    }
    Ok(())
}
