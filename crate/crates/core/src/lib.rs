//! First-order carbon model for deciding whether a reconfigurable fabric
//! (a CGRA) should replace a population of dedicated accelerators (DSAs).
//!
//! Everything is ratio based: the fabric's chip area and energy are the
//! normalization anchor (both equal to one) and each DSA is described by its
//! area and energy relative to that anchor. Chip area stands in for the
//! embodied footprint and energy for the operational footprint; the weight
//! `alpha` blends the two.
//!
//! The crate is `no_std` (it needs `alloc`) and performs no IO. Dataset
//! parsing, reports and the command line live in the `greenfabric` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod cdc;
pub mod concurrency;
pub mod dataset;
mod error;
pub mod model;
pub mod scenarios;

pub use cdc::{
    cdc, cdc_alpha_slope, cdc_limit_embodied, fit_aggregates, fit_scale, is_fabric_greener, min_dsas_to_replace,
    sweep_alpha, sweep_grid, AlphaRange, CdcQuery, SweepMetadata, SweepResult,
};
pub use concurrency::{
    average_utilization, packing_feasible, scale_factor, GridSpec, KernelAllocation, PackingResult,
    ScaleMode,
};
pub use dataset::{
    builtin_paper_dataset, validate_dataset, FabricInfo, KernelDataset, Violation, ViolationKind,
};
pub use error::ModelError;
pub use model::{
    aggregate, alpha_from_breakdown, device_preset, dsa_footprint, dsa_footprint_continuous,
    embodied_intensity, fabric_footprint, AggregateRatios, AlphaBand, DeviceBreakdown,
    DeviceClass, FootprintWeights, KernelProfile, MeanKind, TechNodeRecord, WeightSource,
};
pub use scenarios::{
    builtin_case, calibrated_aggregates, evaluate_cdc_table, hybrid_ratio,
    hybrid_retained_savings, savings_factor, savings_table, AggregateSource, CaseId,
    HybridResult, SavingsResult, ScenarioSpec,
};

pub type Result<T, E = ModelError> = core::result::Result<T, E>;
