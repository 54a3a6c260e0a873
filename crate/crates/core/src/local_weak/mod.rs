//! Rooted neighbourhoods, their canonical codes and empirical distributions,
//! and the local weak limit of random lifts.

mod ball;
mod canon;
mod distribution;

pub use ball::{cover_ball, rooted_ball, RootedBall, DEFAULT_SIZE_CAP};
pub use canon::{canonical_code, canonical_code_capped, CanonicalCode};
pub use distribution::{
    ball_codes, ball_distribution, bst_profile, code_digest, lift_depth, lift_limit_distribution, non_tree_fraction,
    tv_distance, BallDistribution,
};
