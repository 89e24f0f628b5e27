//! Domain types and the two footprint functions.
//!
//! Footprints are expressed in units of one unscaled fabric footprint: the
//! fabric has area 1 and energy 1, so its weighted footprint is 1 whatever
//! `alpha` is.

use alloc::string::{String, ToString};
use core::fmt;
use core::str::FromStr;

use crate::{ModelError, Result};

/// Tolerance, in percentage points, on a breakdown summing to 100.
pub const BREAKDOWN_TOLERANCE_PCT: f64 = 0.5;

/// One accelerated kernel, normalized against the fabric.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelProfile {
    pub name: String,
    pub domain: String,
    /// DSA chip area divided by fabric chip area.
    pub area_norm: f64,
    /// DSA energy divided by fabric energy for the same work.
    pub energy_norm: f64,
    /// Share of the fabric's compute resources the kernel occupies, in (0, 1].
    pub utilization: f64,
    pub memory_kb: f64,
    /// Set when a value was not read directly off a measurement.
    pub estimated: bool,
}

impl KernelProfile {
    pub fn new(
        name: impl Into<String>,
        domain: impl Into<String>,
        area_norm: f64,
        energy_norm: f64,
        utilization: f64,
        memory_kb: f64,
    ) -> Result<Self> {
        let kernel = Self {
            name: name.into(),
            domain: domain.into(),
            area_norm,
            energy_norm,
            utilization,
            memory_kb,
            estimated: false,
        };
        kernel.validate()?;
        Ok(kernel)
    }

    pub fn estimated(mut self, estimated: bool) -> Self {
        self.estimated = estimated;
        self
    }

    /// First violated invariant, if any.
    pub fn check(&self) -> Option<&'static str> {
        if !(self.area_norm.is_finite() && self.area_norm > 0.0) {
            Some("area_norm must be > 0")
        } else if !(self.energy_norm.is_finite() && self.energy_norm > 0.0) {
            Some("energy_norm must be > 0")
        } else if !(self.utilization > 0.0 && self.utilization <= 1.0) {
            Some("utilization out of (0,1]")
        } else if !(self.memory_kb.is_finite() && self.memory_kb >= 0.0) {
            Some("memory_kb must be >= 0")
        } else {
            None
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.check() {
            None => Ok(()),
            Some(reason) => Err(ModelError::InvalidKernel {
                name: self.name.clone(),
                reason,
            }),
        }
    }

    /// Weighted footprint of this kernel's DSA alone.
    pub fn footprint(&self, weights: &FootprintWeights) -> f64 {
        let alpha = weights.alpha();
        alpha * self.area_norm + (1.0 - alpha) * self.energy_norm
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeanKind {
    #[default]
    Arithmetic,
    Geometric,
}

impl MeanKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MeanKind::Arithmetic => "arithmetic",
            MeanKind::Geometric => "geometric",
        }
    }

    fn mean(self, values: impl Iterator<Item = f64> + Clone) -> f64 {
        let (mut lo, mut hi, mut count) = (f64::INFINITY, f64::NEG_INFINITY, 0usize);
        for v in values.clone() {
            lo = lo.min(v);
            hi = hi.max(v);
            count += 1;
        }
        let raw = match self {
            MeanKind::Arithmetic => values.sum::<f64>() / count as f64,
            MeanKind::Geometric => {
                libm::exp(values.map(libm::log).sum::<f64>() / count as f64)
            }
        };
        // Rounding must not push the mean outside the sample range.
        raw.clamp(lo, hi)
    }
}

impl FromStr for MeanKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "arithmetic" | "arith" => Ok(MeanKind::Arithmetic),
            "geometric" | "geo" => Ok(MeanKind::Geometric),
            _ => Err(ModelError::InvalidAggregates("mean kind must be arithmetic or geometric")),
        }
    }
}

/// Scenario-level mean area `A`, energy `E` and utilization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateRatios {
    area: f64,
    energy: f64,
    utilization: f64,
    kernel_count: usize,
    mean_kind: MeanKind,
}

impl AggregateRatios {
    pub fn new(
        area: f64,
        energy: f64,
        utilization: f64,
        kernel_count: usize,
        mean_kind: MeanKind,
    ) -> Result<Self> {
        if !(area.is_finite() && area > 0.0) {
            return Err(ModelError::InvalidAggregates("area must be > 0"));
        }
        if !(energy.is_finite() && energy > 0.0) {
            return Err(ModelError::InvalidAggregates("energy must be > 0"));
        }
        if !(utilization > 0.0 && utilization <= 1.0) {
            return Err(ModelError::InvalidAggregates("utilization out of (0,1]"));
        }
        if kernel_count == 0 {
            return Err(ModelError::InvalidAggregates("kernel count must be >= 1"));
        }
        Ok(Self {
            area,
            energy,
            utilization,
            kernel_count,
            mean_kind,
        })
    }

    /// Aggregates for a synthetic "average DSA", full utilization.
    pub fn from_area_energy(area: f64, energy: f64) -> Result<Self> {
        Self::new(area, energy, 1.0, 1, MeanKind::Arithmetic)
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn utilization(&self) -> f64 {
        self.utilization
    }

    pub fn kernel_count(&self) -> usize {
        self.kernel_count
    }

    pub fn mean_kind(&self) -> MeanKind {
        self.mean_kind
    }

    pub fn with_utilization(self, utilization: f64) -> Result<Self> {
        Self::new(
            self.area,
            self.energy,
            utilization,
            self.kernel_count,
            self.mean_kind,
        )
    }

    pub fn with_kernel_count(mut self, kernel_count: usize) -> Result<Self> {
        if kernel_count == 0 {
            return Err(ModelError::InvalidAggregates("kernel count must be >= 1"));
        }
        self.kernel_count = kernel_count;
        Ok(self)
    }
}

/// Mean area, energy and utilization over `kernels`.
pub fn aggregate<'a, I>(kernels: I, mean_kind: MeanKind) -> Result<AggregateRatios>
where
    I: IntoIterator<Item = &'a KernelProfile>,
    I::IntoIter: Clone,
{
    let kernels = kernels.into_iter();
    let mut count = 0;
    for k in kernels.clone() {
        k.validate()?;
        count += 1;
    }
    if count == 0 {
        return Err(ModelError::EmptyKernelSet);
    }
    let area = mean_kind.mean(kernels.clone().map(|k| k.area_norm));
    let energy = mean_kind.mean(kernels.clone().map(|k| k.energy_norm));
    let utilization = mean_kind.mean(kernels.map(|k| k.utilization));
    AggregateRatios::new(area, energy, utilization, count, mean_kind)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightSource {
    #[default]
    Explicit,
    DevicePreset,
    Breakdown,
}

/// The embodied-to-operational weight and where it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FootprintWeights {
    alpha: f64,
    source: WeightSource,
}

impl FootprintWeights {
    pub fn new(alpha: f64, source: WeightSource) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(ModelError::InvalidAlpha(alpha));
        }
        Ok(Self { alpha, source })
    }

    pub fn explicit(alpha: f64) -> Result<Self> {
        Self::new(alpha, WeightSource::Explicit)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn source(&self) -> WeightSource {
        self.source
    }
}

/// Sea-of-DSAs footprint `alpha*N*A + (1-alpha)*n*E`.
///
/// The embodied term counts every DSA on the chip; the operational term
/// only the `concurrency` DSAs running at the same time.
pub fn dsa_footprint(
    population: u32,
    concurrency: u32,
    weights: &FootprintWeights,
    agg: &AggregateRatios,
) -> Result<f64> {
    if concurrency == 0 {
        return Err(ModelError::InvalidConcurrency);
    }
    if concurrency > population {
        return Err(ModelError::ConcurrencyExceedsPopulation {
            concurrency,
            population,
        });
    }
    Ok(dsa_footprint_continuous(
        f64::from(population),
        f64::from(concurrency),
        weights.alpha(),
        agg.area(),
        agg.energy(),
    ))
}

/// Same as [`dsa_footprint`] with a real-valued population and no checks.
pub fn dsa_footprint_continuous(
    population: f64,
    concurrency: f64,
    alpha: f64,
    area: f64,
    energy: f64,
) -> f64 {
    alpha * population * area + (1.0 - alpha) * concurrency * energy
}

/// Fabric footprint when it is scaled up by `scale` to host concurrent
/// kernels. Area and energy both scale, so the footprint is `scale`.
pub fn fabric_footprint(scale: f64) -> Result<f64> {
    if !(scale.is_finite() && scale >= 1.0) {
        return Err(ModelError::InvalidScale(scale));
    }
    Ok(scale)
}

/// Life-cycle footprint split of a device, in percent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceBreakdown {
    production_pct: f64,
    transport_pct: f64,
    use_pct: f64,
    eol_pct: f64,
}

impl DeviceBreakdown {
    pub fn new(production_pct: f64, transport_pct: f64, use_pct: f64, eol_pct: f64) -> Result<Self> {
        let parts = [production_pct, transport_pct, use_pct, eol_pct];
        if parts.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(ModelError::InvalidBreakdown("shares must be finite and >= 0"));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 100.0).abs() > BREAKDOWN_TOLERANCE_PCT {
            return Err(ModelError::InvalidBreakdown("shares must sum to 100 +/- 0.5"));
        }
        Ok(Self {
            production_pct,
            transport_pct,
            use_pct,
            eol_pct,
        })
    }

    pub fn production_pct(&self) -> f64 {
        self.production_pct
    }

    pub fn transport_pct(&self) -> f64 {
        self.transport_pct
    }

    pub fn use_pct(&self) -> f64 {
        self.use_pct
    }

    pub fn eol_pct(&self) -> f64 {
        self.eol_pct
    }

    pub fn total_pct(&self) -> f64 {
        self.production_pct + self.transport_pct + self.use_pct + self.eol_pct
    }

    /// Share of the footprint spent in use.
    pub fn use_share(&self) -> f64 {
        self.use_pct / self.total_pct()
    }
}

/// Embodied share of a device's footprint: everything but the use phase.
pub fn alpha_from_breakdown(b: &DeviceBreakdown) -> Result<FootprintWeights> {
    let total = b.total_pct();
    if (total - 100.0).abs() > BREAKDOWN_TOLERANCE_PCT {
        return Err(ModelError::InvalidBreakdown("shares must sum to 100 +/- 0.5"));
    }
    let embodied = b.production_pct + b.transport_pct + b.eol_pct;
    FootprintWeights::new((embodied / total).clamp(0.0, 1.0), WeightSource::Breakdown)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeviceClass {
    Watch,
    Smartphone,
    Laptop,
    MediumDesktop,
    HighEndDesktop,
    Console,
}

impl DeviceClass {
    pub const ALL: [DeviceClass; 6] = [
        DeviceClass::Watch,
        DeviceClass::Smartphone,
        DeviceClass::Laptop,
        DeviceClass::MediumDesktop,
        DeviceClass::HighEndDesktop,
        DeviceClass::Console,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DeviceClass::Watch => "watch",
            DeviceClass::Smartphone => "smartphone",
            DeviceClass::Laptop => "laptop",
            DeviceClass::MediumDesktop => "medium_desktop",
            DeviceClass::HighEndDesktop => "high_end_desktop",
            DeviceClass::Console => "console",
        }
    }
}

impl fmt::Display for DeviceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DeviceClass {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        DeviceClass::ALL
            .into_iter()
            .find(|c| c.as_str() == key)
            .ok_or_else(|| ModelError::UnknownDeviceClass(s.to_string()))
    }
}

/// Range of plausible embodied shares for a device class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaBand {
    pub low: f64,
    pub high: f64,
}

impl AlphaBand {
    pub fn midpoint(&self) -> f64 {
        (self.low + self.high) / 2.0
    }

    pub fn contains(&self, alpha: f64) -> bool {
        (self.low..=self.high).contains(&alpha)
    }

    pub fn weights(&self) -> FootprintWeights {
        FootprintWeights {
            alpha: self.midpoint(),
            source: WeightSource::DevicePreset,
        }
    }
}

/// Embodied-share band reported for each device class.
pub fn device_preset(class: DeviceClass) -> AlphaBand {
    let (low, high) = match class {
        DeviceClass::Watch | DeviceClass::Smartphone => (0.80, 0.85),
        DeviceClass::Laptop => (0.70, 0.75),
        DeviceClass::MediumDesktop => (0.55, 0.60),
        DeviceClass::HighEndDesktop | DeviceClass::Console => (0.20, 0.25),
    };
    AlphaBand { low, high }
}

/// Embodied footprint and area of one standard cell at a technology node,
/// both relative to the 28 nm anchor.
#[derive(Debug, Clone, PartialEq)]
pub struct TechNodeRecord {
    pub node_name: String,
    pub rel_area_per_cell: f64,
    pub rel_embodied_per_cell: f64,
}

impl TechNodeRecord {
    pub fn new(
        node_name: impl Into<String>,
        rel_area_per_cell: f64,
        rel_embodied_per_cell: f64,
    ) -> Result<Self> {
        let rec = Self {
            node_name: node_name.into(),
            rel_area_per_cell,
            rel_embodied_per_cell,
        };
        rec.validate()?;
        Ok(rec)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if ok(self.rel_area_per_cell) && ok(self.rel_embodied_per_cell) {
            Ok(())
        } else {
            Err(ModelError::InvalidTechNode(self.node_name.clone()))
        }
    }

    pub fn is_anchor(&self) -> bool {
        self.rel_area_per_cell == 1.0 && self.rel_embodied_per_cell == 1.0
    }
}

/// Embodied footprint per unit chip area, relative to the anchor node.
pub fn embodied_intensity(rec: &TechNodeRecord) -> Result<f64> {
    rec.validate()?;
    Ok(rec.rel_embodied_per_cell / rec.rel_area_per_cell)
}
