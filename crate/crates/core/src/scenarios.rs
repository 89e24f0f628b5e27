//! Replacement scenarios over a kernel dataset: which DSAs go, CDC tables,
//! footprint savings and the hybrid fabric-plus-retained-DSA variant.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::RangeInclusive;
use core::str::FromStr;

use crate::cdc::{cdc, fit_aggregates, CdcQuery, SweepMetadata, SweepResult};
use crate::concurrency::{average_utilization, scale_factor, ScaleMode};
use crate::dataset::KernelDataset;
use crate::model::{
    aggregate, dsa_footprint, fabric_footprint, AggregateRatios, FootprintWeights, KernelProfile,
    MeanKind,
};
use crate::{ModelError, Result};

pub const DEFAULT_POPULATION: u32 = 40;
pub const DEFAULT_ALPHA: f64 = 0.7;

/// The three built-in exclusion scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CaseId {
    /// Every DSA is up for replacement.
    I,
    /// All but AESEncrypt.
    II,
    /// All but AESEncrypt and Viterbi.
    III,
}

impl CaseId {
    pub const ALL: [CaseId; 3] = [CaseId::I, CaseId::II, CaseId::III];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseId::I => "CASE-I",
            CaseId::II => "CASE-II",
            CaseId::III => "CASE-III",
        }
    }

    pub fn excluded(self) -> &'static [&'static str] {
        match self {
            CaseId::I => &[],
            CaseId::II => &["AESEncrypt"],
            CaseId::III => &["AESEncrypt", "Viterbi"],
        }
    }

    /// Published serial CDC at `alpha = 0.3` and `alpha = 0.9`, used to
    /// calibrate the case's aggregates.
    pub fn calibration_points(self) -> [(f64, f64); 2] {
        match self {
            CaseId::I => [(0.3, 9.773), (0.9, 4.01)],
            CaseId::II => [(0.3, 7.66), (0.9, 3.29)],
            CaseId::III => [(0.3, 6.59), (0.9, 2.93)],
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseId {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase();
        let key = key.strip_prefix("CASE").unwrap_or(&key);
        let key = key.trim_start_matches(['-', '_', ' ']);
        match key {
            "I" | "1" => Ok(CaseId::I),
            "II" | "2" => Ok(CaseId::II),
            "III" | "3" => Ok(CaseId::III),
            _ => Err(ModelError::UnknownScenario(s.to_string())),
        }
    }
}

/// Where a scenario's `A`, `E` and utilization come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AggregateSource {
    /// Means over the scenario's included kernels.
    Mean(MeanKind),
    /// Supplied aggregates, e.g. calibrated against published curves.
    Fixed(AggregateRatios),
}

impl Default for AggregateSource {
    fn default() -> Self {
        AggregateSource::Mean(MeanKind::Arithmetic)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub name: String,
    pub excluded_kernels: Vec<String>,
    pub concurrency: u32,
    pub scale_mode: ScaleMode,
    pub dsa_population: u32,
    pub weights: FootprintWeights,
    pub aggregates: AggregateSource,
}

impl ScenarioSpec {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            excluded_kernels: Vec::new(),
            concurrency: 1,
            scale_mode: ScaleMode::Conservative,
            dsa_population: DEFAULT_POPULATION,
            weights: FootprintWeights::explicit(DEFAULT_ALPHA).expect("default alpha is in range"),
            aggregates: AggregateSource::default(),
        }
    }

    /// Kernels of `ds` left after the exclusions.
    pub fn included<'a>(&self, ds: &'a KernelDataset) -> Result<Vec<&'a KernelProfile>> {
        for name in &self.excluded_kernels {
            if ds.kernel(name).is_none() {
                return Err(ModelError::UnknownKernel(name.clone()));
            }
        }
        let kept: Vec<_> = ds
            .kernels
            .iter()
            .filter(|k| !self.excluded_kernels.contains(&k.name))
            .collect();
        if kept.is_empty() {
            return Err(ModelError::EmptyKernelSet);
        }
        Ok(kept)
    }

    fn check(&self) -> Result<()> {
        if self.concurrency == 0 {
            return Err(ModelError::InvalidConcurrency);
        }
        if self.concurrency > self.dsa_population {
            return Err(ModelError::ConcurrencyExceedsPopulation {
                concurrency: self.concurrency,
                population: self.dsa_population,
            });
        }
        Ok(())
    }

    /// Scenario aggregates over the included kernels.
    pub fn aggregates(&self, ds: &KernelDataset) -> Result<AggregateRatios> {
        let included = self.included(ds)?;
        match self.aggregates {
            AggregateSource::Mean(kind) => aggregate(included.iter().copied(), kind),
            AggregateSource::Fixed(agg) => Ok(agg),
        }
    }

    pub fn with_concurrency(mut self, concurrency: u32) -> Self {
        self.concurrency = concurrency;
        self
    }
}

/// Specification of a built-in case, with default parameters.
pub fn builtin_case(case: CaseId) -> ScenarioSpec {
    let mut spec = ScenarioSpec::new(case.as_str());
    spec.excluded_kernels = case.excluded().iter().map(|s| s.to_string()).collect();
    spec
}

/// Aggregates fitted to the case's published serial CDC endpoints, carrying
/// the mean utilization of the case's kernels in `ds`.
pub fn calibrated_aggregates(case: CaseId, ds: &KernelDataset) -> Result<AggregateRatios> {
    let spec = builtin_case(case);
    let included: Vec<KernelProfile> = spec.included(ds)?.into_iter().cloned().collect();
    fit_aggregates(case.calibration_points(), 1, 1.0)?
        .with_utilization(average_utilization(&included)?)?
        .with_kernel_count(included.len())
}

/// CDC at each alpha for the scenario's kernels, concurrency and scaling.
pub fn evaluate_cdc_table(
    spec: &ScenarioSpec,
    ds: &KernelDataset,
    alphas: &[f64],
) -> Result<SweepResult> {
    if alphas.is_empty() {
        return Err(ModelError::InvalidRange("no alpha values given"));
    }
    let agg = spec.aggregates(ds)?;
    let scale = scale_factor(spec.concurrency, spec.scale_mode, agg.utilization())?;
    let samples = alphas
        .iter()
        .map(|&alpha| {
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(ModelError::InvalidRange("alpha values must lie in (0, 1]"));
            }
            let q = CdcQuery::new(FootprintWeights::explicit(alpha)?, agg, spec.concurrency, scale)?;
            Ok((alpha, cdc(&q)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let metadata = SweepMetadata {
        area: Some(agg.area()),
        energy: Some(agg.energy()),
        concurrency: Some(spec.concurrency),
        scale: Some(scale),
        ..SweepMetadata::default()
    };
    SweepResult::new("alpha", "cdc", spec.name.clone(), samples, metadata)
}

/// Footprint improvement of the fabric over the sea of DSAs at one
/// concurrency level.
#[derive(Debug, Clone, PartialEq)]
pub struct SavingsResult {
    pub concurrency: u32,
    pub dsa_population: u32,
    pub alpha: f64,
    pub aggregates: AggregateRatios,
    /// Sea-of-DSAs footprint in fabric units.
    pub dsa_footprint: f64,
    /// Fabric scaled by `n' = n`.
    pub improvement_conservative: f64,
    /// Fabric scaled by the utilization model; absent for serial execution.
    pub improvement_avg_util: Option<f64>,
    pub scale_avg_util: Option<f64>,
}

impl SavingsResult {
    pub fn scale_conservative(&self) -> f64 {
        f64::from(self.concurrency)
    }
}

pub fn savings_factor(spec: &ScenarioSpec, ds: &KernelDataset) -> Result<SavingsResult> {
    spec.check()?;
    let agg = spec.aggregates(ds)?;
    let n = spec.concurrency;
    let dsa = dsa_footprint(spec.dsa_population, n, &spec.weights, &agg)?;
    let improvement_conservative = dsa / fabric_footprint(f64::from(n))?;
    let (improvement_avg_util, scale_avg_util) = if n > 1 {
        let scale = scale_factor(n, spec.scale_mode.sharing(), agg.utilization())?;
        (Some(dsa / fabric_footprint(scale)?), Some(scale))
    } else {
        (None, None)
    };
    Ok(SavingsResult {
        concurrency: n,
        dsa_population: spec.dsa_population,
        alpha: spec.weights.alpha(),
        aggregates: agg,
        dsa_footprint: dsa,
        improvement_conservative,
        improvement_avg_util,
        scale_avg_util,
    })
}

/// [`savings_factor`] for each concurrency in `levels`.
pub fn savings_table(
    spec: &ScenarioSpec,
    ds: &KernelDataset,
    levels: RangeInclusive<u32>,
) -> Result<Vec<SavingsResult>> {
    if levels.is_empty() || *levels.start() == 0 {
        return Err(ModelError::InvalidRange("concurrency range must be non-empty and start at >= 1"));
    }
    levels
        .map(|n| savings_factor(&spec.clone().with_concurrency(n), ds))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct HybridResult {
    pub improvement: f64,
    pub dsa_footprint: f64,
    /// Scale of the fabric hosting the non-retained concurrent kernels.
    pub fabric_scale: f64,
    /// Summed weighted footprint of the retained DSAs.
    pub retained_footprint: f64,
    pub retained: Vec<String>,
}

/// Sea-of-DSAs footprint over a smaller fabric plus the retained DSAs.
pub fn hybrid_ratio(dsa_footprint: f64, fabric_scale: f64, retained_footprint: f64) -> Result<f64> {
    if !(retained_footprint.is_finite() && retained_footprint >= 0.0) {
        return Err(ModelError::InvalidRange("retained footprint must be finite and >= 0"));
    }
    Ok(dsa_footprint / (fabric_footprint(fabric_scale)? + retained_footprint))
}

/// Keeps the `retained` kernels as dedicated DSAs next to a fabric that
/// hosts the rest.
///
/// Each retained DSA takes one concurrent slot, so the fabric is sized for
/// `n - |retained|` kernels using the utilization of the kernels it still
/// runs; each retained DSA is charged its own embodied and operational share.
pub fn hybrid_retained_savings(
    spec: &ScenarioSpec,
    ds: &KernelDataset,
    retained: &[&str],
) -> Result<HybridResult> {
    spec.check()?;
    let included = spec.included(ds)?;
    let mut kept: Vec<&KernelProfile> = Vec::new();
    for name in retained {
        let k = included
            .iter()
            .find(|k| k.name == *name)
            .ok_or_else(|| ModelError::UnknownKernel(name.to_string()))?;
        if !kept.iter().any(|o| o.name == k.name) {
            kept.push(k);
        }
    }
    let n = spec.concurrency;
    if kept.len() as u64 >= u64::from(n) {
        return Err(ModelError::NoFabricWorkload {
            retained: kept.len(),
            concurrency: n,
        });
    }
    let agg = spec.aggregates(ds)?;
    let dsa = dsa_footprint(spec.dsa_population, n, &spec.weights, &agg)?;

    let remaining: Vec<&KernelProfile> = included
        .iter()
        .copied()
        .filter(|k| !kept.iter().any(|r| r.name == k.name))
        .collect();
    if remaining.is_empty() {
        return Err(ModelError::NoFabricWorkload {
            retained: kept.len(),
            concurrency: n,
        });
    }
    let utilization = if kept.is_empty() {
        agg.utilization()
    } else {
        let kind = match spec.aggregates {
            AggregateSource::Mean(kind) => kind,
            AggregateSource::Fixed(_) => MeanKind::Arithmetic,
        };
        aggregate(remaining.iter().copied(), kind)?.utilization()
    };
    let slots = n - kept.len() as u32;
    let fabric_scale = scale_factor(slots, spec.scale_mode.sharing(), utilization)?;
    let retained_footprint: f64 = kept.iter().map(|k| k.footprint(&spec.weights)).sum();
    Ok(HybridResult {
        improvement: hybrid_ratio(dsa, fabric_scale, retained_footprint)?,
        dsa_footprint: dsa,
        fabric_scale,
        retained_footprint,
        retained: kept.iter().map(|k| k.name.clone()).collect(),
    })
}
