//! Critical DSA count (CDC): the DSA population above which the fabric has
//! the smaller footprint.
//!
//! With `n` DSAs active at once and the fabric scaled by `n'`, the fabric wins
//! when `alpha*N*A + (1-alpha)*n*E > n'`, so
//!
//! ```text
//! CDC = (n' - (1 - alpha) * n * E) / (alpha * A)
//! ```
//!
//! With `n' = n` this is `n * (E/A + (1 - E) / (alpha * A))`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::concurrency::{scale_factor, ScaleMode};
use crate::model::{dsa_footprint_continuous, AggregateRatios, FootprintWeights, MeanKind};
use crate::{ModelError, Result};

/// Inputs of one CDC evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdcQuery {
    weights: FootprintWeights,
    agg: AggregateRatios,
    concurrency: u32,
    scale: f64,
}

impl CdcQuery {
    pub fn new(
        weights: FootprintWeights,
        agg: AggregateRatios,
        concurrency: u32,
        scale: f64,
    ) -> Result<Self> {
        if concurrency == 0 {
            return Err(ModelError::InvalidConcurrency);
        }
        if !(scale.is_finite() && scale >= 1.0) {
            return Err(ModelError::InvalidScale(scale));
        }
        Ok(Self {
            weights,
            agg,
            concurrency,
            scale,
        })
    }

    /// Serial execution: one DSA active, unscaled fabric.
    pub fn serial(weights: FootprintWeights, agg: AggregateRatios) -> Self {
        Self {
            weights,
            agg,
            concurrency: 1,
            scale: 1.0,
        }
    }

    /// `n` DSAs active, fabric scaled per `mode` using the aggregate
    /// utilization.
    pub fn with_mode(
        weights: FootprintWeights,
        agg: AggregateRatios,
        concurrency: u32,
        mode: ScaleMode,
    ) -> Result<Self> {
        let scale = scale_factor(concurrency, mode, agg.utilization())?;
        Self::new(weights, agg, concurrency, scale)
    }

    pub fn weights(&self) -> FootprintWeights {
        self.weights
    }

    pub fn aggregates(&self) -> AggregateRatios {
        self.agg
    }

    pub fn concurrency(&self) -> u32 {
        self.concurrency
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// DSA footprint for a real-valued population.
    pub fn dsa_footprint_at(&self, population: f64) -> f64 {
        dsa_footprint_continuous(
            population,
            f64::from(self.concurrency),
            self.weights.alpha(),
            self.agg.area(),
            self.agg.energy(),
        )
    }
}

pub fn cdc(query: &CdcQuery) -> Result<f64> {
    let alpha = query.weights.alpha();
    if alpha <= 0.0 {
        return Err(ModelError::AlphaPole);
    }
    let n = f64::from(query.concurrency);
    let numerator = query.scale - (1.0 - alpha) * n * query.agg.energy();
    if numerator.is_nan() || numerator <= 0.0 {
        return Err(ModelError::DegenerateModel);
    }
    Ok(numerator / (alpha * query.agg.area()))
}

/// `dCDC/dalpha = (n*E - n') / (alpha^2 * A)`.
pub fn cdc_alpha_slope(query: &CdcQuery) -> Result<f64> {
    let alpha = query.weights.alpha();
    if alpha <= 0.0 {
        return Err(ModelError::AlphaPole);
    }
    let n = f64::from(query.concurrency);
    Ok((n * query.agg.energy() - query.scale) / (alpha * alpha * query.agg.area()))
}

/// Limit of the CDC as the embodied footprint dominates (`alpha -> 1`).
pub fn cdc_limit_embodied(agg: &AggregateRatios, concurrency: u32) -> f64 {
    f64::from(concurrency) / agg.area()
}

/// True iff `population` DSAs have a strictly larger footprint than the
/// scaled fabric. Ties go to the DSAs.
pub fn is_fabric_greener(population: u64, query: &CdcQuery) -> bool {
    query.dsa_footprint_at(population as f64) > query.scale
}

/// Smallest integer population `N > CDC`.
pub fn min_dsas_to_replace(query: &CdcQuery) -> Result<u64> {
    let threshold = cdc(query)?;
    let mut n = libm::floor(threshold) as u64 + 1;
    // Settle rounding at the boundary against the footprint comparison itself.
    while n > 1 && is_fabric_greener(n - 1, query) {
        n -= 1;
    }
    while !is_fabric_greener(n, query) {
        n += 1;
    }
    Ok(n)
}

/// Evenly spaced alpha values `lo, lo+step, ...` up to `hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaRange {
    lo: f64,
    hi: f64,
    step: f64,
}

impl AlphaRange {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(lo > 0.0 && lo <= hi && hi <= 1.0) {
            return Err(ModelError::InvalidRange("alpha range needs 0 < lo <= hi <= 1"));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(ModelError::InvalidRange("step must be > 0"));
        }
        Ok(Self { lo, hi, step })
    }

    pub fn values(&self) -> Vec<f64> {
        let count = libm::floor((self.hi - self.lo) / self.step + 1e-9) as usize + 1;
        (0..count)
            .map(|i| (self.lo + i as f64 * self.step).min(self.hi))
            .collect()
    }
}

/// Fixed parameters of a sweep.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepMetadata {
    pub area: Option<f64>,
    pub energy: Option<f64>,
    pub alpha: Option<f64>,
    pub concurrency: Option<u32>,
    pub scale: Option<f64>,
    pub population: Option<u32>,
}

/// One sampled curve.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    axis_name: String,
    value_name: String,
    label: String,
    samples: Vec<(f64, f64)>,
    metadata: SweepMetadata,
}

impl SweepResult {
    /// Parameters must be strictly increasing; values finite and positive.
    pub fn new(
        axis_name: impl Into<String>,
        value_name: impl Into<String>,
        label: impl Into<String>,
        samples: Vec<(f64, f64)>,
        metadata: SweepMetadata,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(ModelError::InvalidRange("sweep has no samples"));
        }
        if samples.windows(2).any(|w| w[0].0.partial_cmp(&w[1].0) != Some(core::cmp::Ordering::Less)) {
            return Err(ModelError::InvalidRange("sweep parameters must strictly increase"));
        }
        if samples.iter().any(|(_, v)| !(v.is_finite() && *v > 0.0)) {
            return Err(ModelError::InvalidRange("sweep values must be finite and > 0"));
        }
        Ok(Self {
            axis_name: axis_name.into(),
            value_name: value_name.into(),
            label: label.into(),
            samples,
            metadata,
        })
    }

    pub fn axis_name(&self) -> &str {
        &self.axis_name
    }

    pub fn value_name(&self) -> &str {
        &self.value_name
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn metadata(&self) -> &SweepMetadata {
        &self.metadata
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

fn cdc_curve(
    alphas: &[f64],
    agg: AggregateRatios,
    concurrency: u32,
    scale: f64,
    label: String,
) -> Result<SweepResult> {
    let samples = alphas
        .iter()
        .map(|&alpha| {
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(ModelError::InvalidRange("alpha values must lie in (0, 1]"));
            }
            let query = CdcQuery::new(FootprintWeights::explicit(alpha)?, agg, concurrency, scale)?;
            Ok((alpha, cdc(&query)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let metadata = SweepMetadata {
        area: Some(agg.area()),
        energy: Some(agg.energy()),
        concurrency: Some(concurrency),
        scale: Some(scale),
        ..SweepMetadata::default()
    };
    SweepResult::new("alpha", "cdc", label, samples, metadata)
}

fn area_energy_label(area: f64, energy: f64) -> String {
    format!("A={area} E={energy}")
}

/// CDC as a function of alpha for fixed aggregates.
pub fn sweep_alpha(
    range: AlphaRange,
    agg: &AggregateRatios,
    concurrency: u32,
    mode: ScaleMode,
) -> Result<SweepResult> {
    let scale = scale_factor(concurrency, mode, agg.utilization())?;
    cdc_curve(
        &range.values(),
        *agg,
        concurrency,
        scale,
        area_energy_label(agg.area(), agg.energy()),
    )
}

/// One CDC-vs-alpha curve per `(A, E)` pair, areas outermost.
pub fn sweep_grid(
    alphas: &[f64],
    areas: &[f64],
    energies: &[f64],
    concurrency: u32,
    mode: ScaleMode,
    mean_utilization: f64,
) -> Result<Vec<SweepResult>> {
    if alphas.is_empty() || areas.is_empty() || energies.is_empty() {
        return Err(ModelError::InvalidRange("grid axes must be non-empty"));
    }
    let scale = scale_factor(concurrency, mode, mean_utilization)?;
    let mut curves = Vec::with_capacity(areas.len() * energies.len());
    for &area in areas {
        for &energy in energies {
            let agg = AggregateRatios::new(area, energy, mean_utilization, 1, MeanKind::Arithmetic)?;
            curves.push(cdc_curve(
                alphas,
                agg,
                concurrency,
                scale,
                area_energy_label(area, energy),
            )?);
        }
    }
    Ok(curves)
}

/// Recovers `A` and `E` from two `(alpha, CDC)` points.
///
/// `CDC * alpha = n' * x - (1 - alpha) * n * y` is linear in `x = 1/A` and
/// `y = E/A`; two distinct alphas pin both down. The returned aggregates
/// carry utilization 1 and a kernel count of 1; callers override them with
/// [`AggregateRatios::with_utilization`] as needed.
pub fn fit_aggregates(
    points: [(f64, f64); 2],
    concurrency: u32,
    scale: f64,
) -> Result<AggregateRatios> {
    if concurrency == 0 {
        return Err(ModelError::InvalidConcurrency);
    }
    if !(scale.is_finite() && scale >= 1.0) {
        return Err(ModelError::InvalidScale(scale));
    }
    for (alpha, value) in points {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(ModelError::InvalidRange("calibration alpha must lie in (0, 1]"));
        }
        if !(value.is_finite() && value > 0.0) {
            return Err(ModelError::InvalidRange("calibration CDC must be finite and > 0"));
        }
    }
    let n = f64::from(concurrency);
    let [(a1, c1), (a2, c2)] = points;
    // Rows: [n', -(1 - a_i) n] . [x, y] = c_i a_i
    let det = scale * n * (a2 - a1);
    if det.abs() < 1e-12 {
        return Err(ModelError::SingularFit);
    }
    let (r1, r2) = (c1 * a1, c2 * a2);
    let x = (-r1 * (1.0 - a2) * n + r2 * (1.0 - a1) * n) / det;
    let y = (scale * r2 - scale * r1) / det;
    let area = 1.0 / x;
    let energy = y / x;
    if !(x > 0.0 && area.is_finite() && energy > 0.0 && energy < 1.0) {
        return Err(ModelError::InfeasibleFit { area, energy });
    }
    AggregateRatios::from_area_energy(area, energy)
}

/// Least-squares fabric scale `n'` reproducing observed `(alpha, CDC)` points
/// for fixed aggregates and concurrency.
///
/// The CDC is affine in `n'` with slope `1/(alpha*A)`, so the fit is closed
/// form.
pub fn fit_scale(points: &[(f64, f64)], agg: &AggregateRatios, concurrency: u32) -> Result<f64> {
    if points.is_empty() {
        return Err(ModelError::InvalidRange("need at least one calibration point"));
    }
    if concurrency == 0 {
        return Err(ModelError::InvalidConcurrency);
    }
    let n = f64::from(concurrency);
    let (mut num, mut den) = (0.0, 0.0);
    for &(alpha, value) in points {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(ModelError::InvalidRange("calibration alpha must lie in (0, 1]"));
        }
        let slope = 1.0 / (alpha * agg.area());
        let offset = (1.0 - alpha) * n * agg.energy() * slope;
        num += slope * (value + offset);
        den += slope * slope;
    }
    let scale = num / den;
    if !(scale.is_finite() && scale >= 1.0) {
        return Err(ModelError::InvalidScale(scale));
    }
    Ok(scale)
}
