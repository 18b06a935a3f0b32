//! Complementary oblique projections on a space carrying a scalar product `H`
//! and a second positive-definite form `G` (the metric).
//!
//! The pipeline is
//! [`validate_projection_pair`] → [`natural_basis`] → [`MetricBlocks`] →
//! [`k_sigma_forms`] / [`bridge_matrices`] → [`verify_theorem1`] /
//! [`verify_theorem2`].
//!
//! Conventions used throughout, with `U = [V | W]` an adapted basis
//! (`V` spans the range of `P0`, `W` the range of `P1`):
//!
//! * `UᵀGU = [[L0, V_offᵀ], [V_off, L1]]`, so `V_off = WᵀGV` is `n1 × n0`;
//! * `(UᵀGU)⁻¹ = [[Γ0, Λᵀ], [Λ, Γ1]]`, so `Λ` is `n1 × n0`;
//! * `Ω = VᵀHW` is `n0 × n1`.

mod analysis;
mod natural;
mod projection;
mod theorems;

pub use analysis::{analyze_blocks, analyze_pair, PairAnalysis};
pub use natural::{natural_basis, MetricBlocks, NaturalBasis};
pub use projection::{
    dual_projections, h_adjoint, induced_metrics_full, singular_value_duality, validate_projection_pair,
    FullInducedMetrics, MetricSpace, ProjectionPair, SvdDualityReport,
};
pub use theorems::{
    bridge_matrices, k_sigma_forms, theorem1_operator_oracle, verify_theorem1, verify_theorem2, BridgeMatrices,
    FormMultiplicity, KSigmaForms, PseudodetSet, Theorem1Report, Theorem2Report,
};

/// Tolerance used when certifying projection pairs.
pub const PROJECTION_TOL: f64 = 1e-10;

/// Largest cosine allowed between the two subspaces.
pub const COMPLEMENTARITY_MARGIN: f64 = 1e-12;
