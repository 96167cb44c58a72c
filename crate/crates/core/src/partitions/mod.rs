//! Defining sequences, the induced ultrametric and itinerary tables.

mod instances;
mod itinerary;
mod sequence;

pub use instances::{BallSequence, ShiftCylinders, TablePartition};
pub use itinerary::{
    alpha, check_shadowreform, compute_o, compute_po, embed_itinerary, find_witness, is_coherent,
    pi0, theta_itinerary, PoTable, ShadowreformConfig, ShadowreformReport, ShadowreformVerdict,
    WitnessRow,
};
pub use sequence::{
    ancestor, induced_ultrametric, is_tame, DefiningSequence, InducedDistance, LevelCertificate,
    Tameness,
};
