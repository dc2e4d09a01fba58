#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod cloud;
pub mod geometry;
pub mod math;
pub mod oracle;
pub mod reconstruct;

pub use cloud::{
    maximal_cloud, maximal_cloud_with, omega_cloud, omega_cloud_with, segment_cloud,
    segment_cloud_with, total_measure_check, Cloud, CloudError, CloudPoint, Pivot, PivotKind,
    TotalMeasureReport,
};
pub use geometry::{
    inscribed_circle, internal_angle, second_circle_intersection, validate_convex,
    wedge_circle_contacts, Angle, Arc, ChordSide, Circle, ConvexPolygon, GeometryError,
    OrientedLine, Point2, Wedge,
};
pub use math::{Config, Tolerances};
pub use oracle::{
    match_clouds, match_polygons, minimal_wedge_at_direction, random_convex_polygon, safe_omega,
    sampled_cloud, MatchReport, OracleError,
};
pub use reconstruct::{
    chain_reconstruct, chain_reconstruct_with, first_pass, first_pass_with, reconstruct_aware,
    reconstruct_aware_with, reconstruct_oblivious, reconstruct_oblivious_with, second_pass,
    second_pass_with, NarrowRecord, ReconstructError, ReconstructionResult, ReconstructionStats,
};
