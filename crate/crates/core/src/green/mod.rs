//! Green functions of finite graphs and of universal covers, and the
//! resolvent-based checks used for random lifts.

mod checks;
mod cover;
mod finite;

pub use checks::{
    admissible_eta, local_km_check, local_km_discrepancy, projector_estimate_check, proximity_bound,
    resolvent_proximity_check, resolvent_proximity_check_at, cover_proximity_check, LocalKm, ProjectorEstimate,
    Proximity,
};
pub use cover::{
    cover_green_root, cover_green_roots, cover_zeta, green_assumption_estimate, green_regularity_region, limit_density,
    limit_measure, limit_spectral_measure, write_density_csv, ConeTypeSystem, DensityPoint, GreenEstimate,
    RegularityRegion, ETA_FLOOR, ZETA_TOL,
};
pub use finite::{finite_resolvent_diag, resolvent_entry, stieltjes, window_bound_check, ResolventDiagonal, WindowBoundCheck};

/// `e^2 pi`.
pub const ZETA: f64 = std::f64::consts::E * std::f64::consts::E * std::f64::consts::PI;
