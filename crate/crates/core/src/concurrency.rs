//! Fabric scaling for concurrently running kernels.
//!
//! A fabric hosting `n` kernels at once needs to grow. The conservative model
//! grows it by `n`; the utilization model grows it by `n * mean utilization`,
//! since most kernels leave part of the PE grid idle and several can share it.

use alloc::string::String;
use alloc::vec::Vec;

use crate::model::KernelProfile;
use crate::{ModelError, Result};

/// Slack used when turning fractional PE demands into whole PEs.
const PE_EPS: f64 = 1e-9;

/// How the fabric is scaled for `n` concurrent kernels.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ScaleMode {
    /// `n' = n`: every kernel occupies a whole fabric.
    #[default]
    Conservative,
    /// `n' = max(1, n * u)` with `u` the mean utilization of the kernel set.
    AverageUtilization,
    /// As `AverageUtilization`, with the mean utilization supplied directly.
    FixedUtilization(f64),
    /// `n'` given outright, independent of `n`.
    Explicit(f64),
}

impl ScaleMode {
    pub fn explicit(scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale >= 1.0) {
            return Err(ModelError::InvalidScale(scale));
        }
        Ok(ScaleMode::Explicit(scale))
    }

    pub fn fixed_utilization(utilization: f64) -> Result<Self> {
        check_utilization(utilization)?;
        Ok(ScaleMode::FixedUtilization(utilization))
    }

    /// The utilization-sharing counterpart of this mode: conservative
    /// becomes [`ScaleMode::AverageUtilization`], everything else is kept.
    pub fn sharing(self) -> Self {
        match self {
            ScaleMode::Conservative => ScaleMode::AverageUtilization,
            other => other,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ScaleMode::Conservative => "conservative",
            ScaleMode::AverageUtilization => "average_utilization",
            ScaleMode::FixedUtilization(_) => "fixed_utilization",
            ScaleMode::Explicit(_) => "explicit",
        }
    }
}

fn check_utilization(u: f64) -> Result<()> {
    if u > 0.0 && u <= 1.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidAggregates("utilization out of (0,1]"))
    }
}

/// Arithmetic mean utilization of `kernels`.
pub fn average_utilization(kernels: &[KernelProfile]) -> Result<f64> {
    if kernels.is_empty() {
        return Err(ModelError::EmptyKernelSet);
    }
    for k in kernels {
        k.validate()?;
    }
    let (lo, hi) = kernels.iter().fold((1.0f64, 0.0f64), |(lo, hi), k| {
        (lo.min(k.utilization), hi.max(k.utilization))
    });
    let mean = kernels.iter().map(|k| k.utilization).sum::<f64>() / kernels.len() as f64;
    Ok(mean.clamp(lo, hi))
}

/// Fabric scale factor `n'` for `concurrency` kernels.
///
/// `mean_utilization` is only read by [`ScaleMode::AverageUtilization`].
/// The result never drops below 1: the fabric always fits the largest kernel.
pub fn scale_factor(concurrency: u32, mode: ScaleMode, mean_utilization: f64) -> Result<f64> {
    if concurrency == 0 {
        return Err(ModelError::InvalidConcurrency);
    }
    let n = f64::from(concurrency);
    match mode {
        ScaleMode::Conservative => Ok(n),
        ScaleMode::AverageUtilization => {
            check_utilization(mean_utilization)?;
            Ok((n * mean_utilization).max(1.0))
        }
        ScaleMode::FixedUtilization(u) => {
            check_utilization(u)?;
            Ok((n * u).max(1.0))
        }
        ScaleMode::Explicit(s) => {
            if s.is_finite() && s >= 1.0 {
                Ok(s)
            } else {
                Err(ModelError::InvalidScale(s))
            }
        }
    }
}

/// Processing-element grid of one unscaled fabric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    rows: u32,
    cols: u32,
}

impl GridSpec {
    pub fn new(rows: u32, cols: u32) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(ModelError::InvalidGrid);
        }
        Ok(Self { rows, cols })
    }

    pub fn rows(&self) -> u32 {
        self.rows
    }

    pub fn cols(&self) -> u32 {
        self.cols
    }

    pub fn pe_count(&self) -> u64 {
        u64::from(self.rows) * u64::from(self.cols)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelAllocation {
    pub name: String,
    /// PEs the kernel demands (rounded up).
    pub pes: u64,
    pub placed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackingResult {
    pub feasible: bool,
    /// PEs available in the scaled fabric (rounded down).
    pub budget: u64,
    /// PEs handed out to placed kernels.
    pub used: u64,
    pub allocations: Vec<KernelAllocation>,
}

/// First-fit packing of `selected` kernels onto a fabric scaled by `scale`.
///
/// Demands round up and the budget rounds down, so a feasible answer is
/// never optimistic.
pub fn packing_feasible(
    selected: &[KernelProfile],
    grid: GridSpec,
    scale: f64,
) -> Result<PackingResult> {
    if selected.is_empty() {
        return Err(ModelError::EmptyKernelSet);
    }
    if !(scale.is_finite() && scale >= 1.0) {
        return Err(ModelError::InvalidScale(scale));
    }
    let pes = grid.pe_count() as f64;
    let budget = libm::floor(scale * pes + PE_EPS) as u64;
    let mut used = 0u64;
    let mut allocations = Vec::with_capacity(selected.len());
    for k in selected {
        k.validate()?;
        let demand = libm::ceil(k.utilization * pes - PE_EPS) as u64;
        let placed = used + demand <= budget;
        if placed {
            used += demand;
        }
        allocations.push(KernelAllocation {
            name: k.name.clone(),
            pes: demand,
            placed,
        });
    }
    Ok(PackingResult {
        feasible: allocations.iter().all(|a| a.placed),
        budget,
        used,
        allocations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::builtin_paper_dataset;

    fn k(name: &str, util: f64) -> KernelProfile {
        KernelProfile::new(name, "t", 0.3, 0.3, util, 1.0).unwrap()
    }

    #[test]
    fn average_utilization_examples() {
        let ds = builtin_paper_dataset();
        assert!((average_utilization(&ds.kernels).unwrap() - 0.64).abs() < 1e-12);
        assert_eq!(average_utilization(&[k("a", 1.0), k("b", 1.0)]).unwrap(), 1.0);
        assert!((average_utilization(&[k("a", 1.0), k("b", 0.26)]).unwrap() - 0.63).abs() < 1e-12);
        assert_eq!(average_utilization(&[]), Err(ModelError::EmptyKernelSet));
    }

    #[test]
    fn average_utilization_rejects_out_of_range() {
        let mut bad = k("bad", 0.5);
        bad.utilization = 1.5;
        assert!(matches!(
            average_utilization(&[bad]),
            Err(ModelError::InvalidKernel { .. })
        ));
    }

    #[test]
    fn scale_factor_examples() {
        let avg = ScaleMode::AverageUtilization;
        assert!((scale_factor(2, avg, 0.64).unwrap() - 1.28).abs() < 1e-12);
        assert!((scale_factor(4, avg, 0.64).unwrap() - 2.56).abs() < 1e-12);
        assert_eq!(scale_factor(1, avg, 0.64).unwrap(), 1.0);
        assert_eq!(scale_factor(3, ScaleMode::Conservative, 0.64).unwrap(), 3.0);
        assert_eq!(scale_factor(5, ScaleMode::Explicit(1.7), 0.64).unwrap(), 1.7);
        assert!((scale_factor(4, ScaleMode::FixedUtilization(0.63), 0.99).unwrap() - 2.52).abs() < 1e-12);
        assert!(ScaleMode::explicit(0.5).is_err());
        assert!(ScaleMode::fixed_utilization(0.0).is_err());
        assert_eq!(scale_factor(0, avg, 0.5), Err(ModelError::InvalidConcurrency));
    }

    #[test]
    fn packing_exact_fit() {
        let grid = GridSpec::new(8, 8).unwrap();
        let r = packing_feasible(&[k("a", 0.5), k("b", 0.5)], grid, 1.0).unwrap();
        assert!(r.feasible);
        assert_eq!(r.used, 64);
        assert_eq!(r.allocations[0].pes, 32);
        assert_eq!(r.allocations[1].pes, 32);
    }

    #[test]
    fn packing_two_full_kernels_do_not_fit() {
        let grid = GridSpec::new(8, 8).unwrap();
        let r = packing_feasible(&[k("GeMM", 1.0), k("FIR", 1.0)], grid, 1.0).unwrap();
        assert!(!r.feasible);
        assert!(r.allocations[0].placed);
        assert!(!r.allocations[1].placed);
    }

    #[test]
    fn packing_rounding_is_pessimistic() {
        let grid = GridSpec::new(8, 8).unwrap();
        let pair = [k("GeMM", 1.0), k("Conv2D", 0.45)];
        // 64 + ceil(28.8) = 93 PEs against floor(92.8) = 92.
        let r = packing_feasible(&pair, grid, 1.45).unwrap();
        assert!(!r.feasible);
        assert_eq!(r.budget, 92);
        assert_eq!(r.allocations[1].pes, 29);
        let r = packing_feasible(&pair, grid, 1.5).unwrap();
        assert!(r.feasible);
        assert_eq!((r.used, r.budget), (93, 96));
    }

    #[test]
    fn packing_preconditions() {
        let grid = GridSpec::new(8, 8).unwrap();
        assert_eq!(packing_feasible(&[], grid, 1.0), Err(ModelError::EmptyKernelSet));
        assert!(packing_feasible(&[k("a", 0.5)], grid, 0.5).is_err());
        assert_eq!(GridSpec::new(0, 8), Err(ModelError::InvalidGrid));
    }
}
