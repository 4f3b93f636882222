//! Linked triple gear toolkit.
//!
//! Three identical rings, pairwise linked, rotate about their own core
//! circles. This crate finds the thickest symmetric placement, carves
//! mating teeth from the relative motions, builds the helical drive axle
//! and the three-screw demonstration, and exports watertight STL meshes.

pub mod axle;
pub mod carving;
pub mod clearance;
pub mod config;
pub mod design;
pub mod distance;
pub mod error;
pub mod geometry;
pub mod kinematics;
pub mod linking;
pub mod mesh;
mod numeric;
pub mod paradox;
pub mod profile;
pub mod spline;
pub mod stl;

pub use axle::{axle_mesh, carve_axle_section, AxleSpec};
pub use carving::{
    assemble_gear, assemble_triple, carve_flank, flank_surface, smooth_gear, truncate_top_land,
    FlankCurve, GearField, GearPatch, GearSolid, GearSpec,
};
pub use clearance::{Collider, CoreHint};
pub use config::{clearance_csv, contact_csv, read_config, write_config, ConfigDocument};
pub use design::{
    contact_points, maximize_thickness, objective, symmetric_config, DesignConfig, SymmetricParams,
};
pub use distance::{circle_circle_distance, point_circle_distance, DistanceResult, PointCircle};
pub use error::{Error, Result};
pub use geometry::{
    compose, pq_curve, rotation_about_axis, screw_motion, torus_coords_of, torus_point, Circle3,
    RigidMotion, TorusCoords, TorusSpec, Vec3,
};
pub use kinematics::{
    is_simple, relative_motion, ring_movement, trace_point, CompoundMovement, MotionTrace,
};
pub use linking::{link_report, linking_number, LinkReport, LinkingNumber};
pub use mesh::{helical_sweep, triangulate, triangulate_polygon, validate, MeshReport, TriMesh};
pub use paradox::{
    contact_normal_report, involute_profile, paradox_screws, InvoluteProfile, ParadoxScrews,
};
pub use profile::{master_tooth_profile, offset_profile, Curve2, MasterProfile, ToothProfile};
pub use spline::HermiteSpline;
pub use stl::{read_stl, write_stl, StlFormat};
