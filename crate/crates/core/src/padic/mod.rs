//! `Z_p` and `Q_p` at a fixed working precision.

mod balls;
mod maps;
mod number;

pub use balls::{ball_partition_qp, ball_partition_zp, QpBalls, QpCell, ZpBalls};
pub use maps::{
    classify_map, close_pairs, padic_orbit, Classification, MapClass, Orbit, PAdicMap, PAdicSystem,
};
pub use number::{balanced_integer, is_prime, padic_dist, Norm, PAdic, DEFAULT_PRECISION};
