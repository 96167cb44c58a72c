//! Finite-stage inverse systems and their truncated limits.

mod builders;
mod lift;
mod ml;
mod system;

pub use builders::{periodic_shift_tower, shrinking_chain, surjective_chain, zp_residue_tower};
pub use lift::{lift_shadow_point, project_pseudo_orbit, sample_coherent_pseudo_orbit, stage_radius, Lift};
pub use ml::{check_mittag_leffler, stabilized_images, MlVerdict, Stabilized};
pub use system::{CoherentPoint, InverseSystem, InverseSystemSpec, Stage, StageSpec, StageSystem};
