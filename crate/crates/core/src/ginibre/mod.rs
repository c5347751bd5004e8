//! Complex Ginibre ensemble: sampling, mixed matrix moments and their
//! non-crossing-matching limits, exact correlation and eigenvector-overlap
//! densities, edge scalings, constraint checks, and the adiabatic /
//! perturbation-series numerics.

pub mod adiabatic;
pub mod densities;
pub mod moments;
pub mod overlaps;

pub use adiabatic::{adiabatic_main_term, perturbation_series, AdiabaticReport};
pub use densities::{
    cm_bulk_o2_pair, cm_bulk_o2_scaled, constraint_check, edge_scaling, o1_density,
    o1_moment_integral, o1_recursion_report, o2_density_exact, r1_density, r1_normalization,
    r2_density, ConstraintReport, EdgeWhich, Method, O1RecursionReport,
};
pub use moments::{
    limit_moment_matchings, mixed_moment_mc, pinch_recurrence_check, sample_ginibre,
    MomentEstimate, MomentSignature,
};
pub use overlaps::{
    moment_from_overlaps, o1_mc, o2_box_average, o2_mc, overlap_data, BinEstimate, OverlapSample,
    PairEstimate,
};
