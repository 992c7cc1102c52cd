//! Uniform linear array model: steering vectors, angular regions, region
//! matrices and beampattern metrics.

mod config;
mod matrices;
mod pattern;
mod region;

pub use config::ArrayConfig;
pub use matrices::{
    build_region_matrices, region_matrix, region_matrix_cos_weighted, RegionMatrices,
    DEFAULT_NODES_PER_DEGREE,
};
pub use pattern::{
    beampattern, half_power_edges, isl_ratio, measure_3db_width, psl_db, radiated_energy, steering,
    BeampatternSamples, CSV_HEADER,
};
pub use region::{deg, AngularRegion, HALF_PI};
