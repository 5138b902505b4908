//! Exact tools for hyperbolic integral lattices: vector enumeration, orbit
//! decomposition, wall-and-chamber structure, hyperbolic geometry probes and
//! lattice-theoretic checks for Picard lattices.

#![allow(clippy::needless_range_loop)]

pub mod arith;
pub mod chambers;
pub mod enumeration;
pub mod error;
pub mod hyperbolic;
pub mod io;
pub mod lattice;
pub mod lp;
pub mod orbits;
pub mod period;
pub mod report;

pub use arith::{BigVec, IntMatrix, Rational};
pub use chambers::{build_arrangement, Arrangement, Chamber, FaceCheck, FaceOrbitReport, Wall};
pub use enumeration::{enum_isotropic_primitive, enum_negative_primitive, height, EnumWindow};
pub use error::{Error, Result};
pub use hyperbolic::{
    closed_geodesic_length, cusp_clearance, density_probe, h_distance, sample_ball, wall_distance,
    DensityConfig, DensityReport, GeodesicReport, HPoint,
};
pub use lattice::{Complement, Isometry, LatticeVec, QuadLattice, Signature};
pub use orbits::{
    orbit_decompose, reflection_group, stabilizer_search, ClosurePolicy, GroupSpec, OrbitReport,
    OrbitStatus,
};
pub use period::{deformation_target, is_projective_type, picard_closure, PicardSpec};
pub use report::{revalidate, Report, RunConfig, Validation};
