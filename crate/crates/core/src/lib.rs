//! Wilson-loop holonomies of Abelian and SU(N) gauge fields, and numerical
//! checks of the surface-term decomposition of their first-order phase.
//!
//! Potentials are stored per color as the 1-form components
//! `A[a] = (A_t, A_x, A_y, A_z)` with `A_t = -φ`; see [`gaugefield`].

pub mod error;
pub mod gaugefield;
pub mod geometry;
pub mod holonomy;
pub mod identity_lab;
pub mod liealg;
pub mod numeric;
pub mod scenario_cli;

pub use error::{LabError, Result};
pub use gaugefield::{build_field, Couplings, FieldConfig, FieldKind, GaugeField, Ramp, SpacetimePoint};
pub use geometry::{build_loop, build_surface, Circle, LoopKind, Plane, Resolution, SurfaceKind, TwoTimeAssembly};
pub use holonomy::{abelian_phase, expansion_terms, wilson_loop, HolonomyResult, Mode};
pub use identity_lab::{
    convergence_study, first_order_decomposition, higher_order_probe, quantization_report, Check, IdentityReport,
};
pub use liealg::GeneratorSet;
