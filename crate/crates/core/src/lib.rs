//! Numerical workbench for framed representations of the enhanced ADHM
//! quiver: data and their equations, stability, deformation cohomology,
//! quotient and fiber maps, moment maps and the 2-form Ω.

pub mod acceptance;
pub mod datum;
pub mod deformation;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod moduli_maps;
pub mod rng;
pub mod stability;

pub use datum::{
    act, generate_stable, AdhmDatum, DimVector, EnhancedDatum, EnhancedMaps, GaugeElement, GenerationStyle,
    Residuals, StabilityParameter,
};
pub use deformation::{
    build_complex, cohomology_dims, stabilizer_dim, tangent_basis, CohomologyReport, DeformationComplex,
    TangentVector, Variant,
};
pub use error::{Error, Result};
pub use geometry::{
    ambient_residuals, ambient_tangent_dim, balance_flow, degeneracy_scan, moment_map, omega_on_h1, omega_pair,
    FlowOptions, FlowOutcome, MomentLevel, MomentValue, OmegaMatrix, OmegaOptions,
};
pub use linalg::{CMat, C64};
pub use moduli_maps::{
    fiber_lift, nested_hilbert_datum, nested_hilbert_points, quotient_rep, quotient_support, vandermonde_frame,
    MonadPencil, PointConfiguration,
};
pub use stability::{chamber_check, chi_character, destabilizer_search, invariant_closure, is_stable, StabilityReport};
