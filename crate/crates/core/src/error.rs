use alloc::string::String;
use core::fmt;

/// Errors raised by the carbon model.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    EmptyKernelSet,
    InvalidKernel { name: String, reason: &'static str },
    ConcurrencyExceedsPopulation { concurrency: u32, population: u32 },
    InvalidConcurrency,
    InvalidScale(f64),
    InvalidAlpha(f64),
    InvalidBreakdown(&'static str),
    UnknownDeviceClass(String),
    InvalidTechNode(String),
    InvalidAggregates(&'static str),
    /// `alpha = 0` makes the critical count infinite.
    AlphaPole,
    /// The fabric footprint is never beaten, whatever the DSA population.
    DegenerateModel,
    InvalidRange(&'static str),
    SingularFit,
    InfeasibleFit { area: f64, energy: f64 },
    UnknownScenario(String),
    UnknownKernel(String),
    NoFabricWorkload { retained: usize, concurrency: u32 },
    InvalidGrid,
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EmptyKernelSet => f.write_str("kernel set is empty"),
            Self::InvalidKernel { name, reason } => write!(f, "kernel '{name}': {reason}"),
            Self::ConcurrencyExceedsPopulation {
                concurrency,
                population,
            } => write!(
                f,
                "concurrency {concurrency} exceeds the DSA population {population}"
            ),
            Self::InvalidConcurrency => f.write_str("concurrency must be at least 1"),
            Self::InvalidScale(s) => write!(f, "fabric scale factor {s} must be >= 1"),
            Self::InvalidAlpha(a) => write!(f, "alpha {a} outside [0, 1]"),
            Self::InvalidBreakdown(why) => write!(f, "invalid footprint breakdown: {why}"),
            Self::UnknownDeviceClass(c) => write!(f, "unknown device class '{c}'"),
            Self::InvalidTechNode(n) => {
                write!(f, "tech node '{n}': ratios must be finite and > 0")
            }
            Self::InvalidAggregates(why) => write!(f, "invalid aggregate ratios: {why}"),
            Self::AlphaPole => f.write_str("alpha = 0 is a pole of the critical DSA count"),
            Self::DegenerateModel => f.write_str(
                "fabric footprint is never below the DSA footprint for these parameters",
            ),
            Self::InvalidRange(why) => write!(f, "invalid range: {why}"),
            Self::SingularFit => f.write_str("calibration points share the same alpha"),
            Self::InfeasibleFit { area, energy } => write!(
                f,
                "calibration yields infeasible aggregates (A = {area}, E = {energy})"
            ),
            Self::UnknownScenario(s) => write!(f, "unknown scenario '{s}'"),
            Self::UnknownKernel(k) => write!(f, "unknown kernel '{k}'"),
            Self::NoFabricWorkload {
                retained,
                concurrency,
            } => write!(
                f,
                "{retained} retained DSA(s) leave no fabric workload at concurrency {concurrency}"
            ),
            Self::InvalidGrid => f.write_str("grid rows and columns must be >= 1"),
        }
    }
}

impl core::error::Error for ModelError {}
