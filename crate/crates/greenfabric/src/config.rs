//! Scenario configuration documents.
//!
//! ```json
//! {
//!   "version": 1,
//!   "scenarios": [
//!     {
//!       "name": "no-crypto",
//!       "excluded_kernels": ["AESEncrypt"],
//!       "concurrency": 2,
//!       "scale_mode": { "mode": "fixed_utilization", "utilization": 0.63 },
//!       "dsa_population": 40,
//!       "alpha": 0.7,
//!       "aggregates": { "source": "arithmetic" }
//!     }
//!   ]
//! }
//! ```
//!
//! Every field except `name` has a default matching [`ScenarioSpec::new`].

use std::io::{Read, Write};

use greenfabric_core::{
    AggregateRatios, AggregateSource, FootprintWeights, MeanKind, ScaleMode, ScenarioSpec,
};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDoc {
    version: u32,
    scenarios: Vec<ScenarioDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    name: String,
    #[serde(default)]
    excluded_kernels: Vec<String>,
    #[serde(default = "one")]
    concurrency: u32,
    #[serde(default)]
    scale_mode: ScaleDoc,
    #[serde(default = "default_population")]
    dsa_population: u32,
    #[serde(default = "default_alpha")]
    alpha: f64,
    #[serde(default)]
    aggregates: AggregatesDoc,
}

fn one() -> u32 {
    1
}

fn default_population() -> u32 {
    greenfabric_core::scenarios::DEFAULT_POPULATION
}

fn default_alpha() -> f64 {
    greenfabric_core::scenarios::DEFAULT_ALPHA
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
enum ScaleDoc {
    #[default]
    Conservative,
    AverageUtilization,
    FixedUtilization { utilization: f64 },
    Explicit { scale: f64 },
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
enum AggregatesDoc {
    #[default]
    Arithmetic,
    Geometric,
    Fixed {
        area: f64,
        energy: f64,
        #[serde(default = "full_utilization")]
        utilization: f64,
    },
}

fn full_utilization() -> f64 {
    1.0
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse {
        format: "JSON",
        line: e.line() as u64,
        column: Some(e.column() as u64),
        message: e.to_string(),
    }
}

impl ScenarioDoc {
    fn into_spec(self) -> Result<ScenarioSpec> {
        let context = |e: greenfabric_core::ModelError| {
            Error::invalid("scenario config", format!("scenario '{}': {e}", self.name))
        };
        let scale_mode = match self.scale_mode {
            ScaleDoc::Conservative => ScaleMode::Conservative,
            ScaleDoc::AverageUtilization => ScaleMode::AverageUtilization,
            ScaleDoc::FixedUtilization { utilization } => {
                ScaleMode::fixed_utilization(utilization).map_err(context)?
            }
            ScaleDoc::Explicit { scale } => ScaleMode::explicit(scale).map_err(context)?,
        };
        let aggregates = match self.aggregates {
            AggregatesDoc::Arithmetic => AggregateSource::Mean(MeanKind::Arithmetic),
            AggregatesDoc::Geometric => AggregateSource::Mean(MeanKind::Geometric),
            AggregatesDoc::Fixed {
                area,
                energy,
                utilization,
            } => AggregateSource::Fixed(
                AggregateRatios::from_area_energy(area, energy)
                    .and_then(|a| a.with_utilization(utilization))
                    .map_err(context)?,
            ),
        };
        if self.concurrency == 0 {
            return Err(context(greenfabric_core::ModelError::InvalidConcurrency));
        }
        let mut spec = ScenarioSpec::new(self.name.clone());
        spec.excluded_kernels = self.excluded_kernels;
        spec.concurrency = self.concurrency;
        spec.scale_mode = scale_mode;
        spec.dsa_population = self.dsa_population;
        spec.weights = FootprintWeights::explicit(self.alpha).map_err(context)?;
        spec.aggregates = aggregates;
        Ok(spec)
    }

    fn from_spec(spec: &ScenarioSpec) -> Self {
        Self {
            name: spec.name.clone(),
            excluded_kernels: spec.excluded_kernels.clone(),
            concurrency: spec.concurrency,
            scale_mode: match spec.scale_mode {
                ScaleMode::Conservative => ScaleDoc::Conservative,
                ScaleMode::AverageUtilization => ScaleDoc::AverageUtilization,
                ScaleMode::FixedUtilization(utilization) => ScaleDoc::FixedUtilization { utilization },
                ScaleMode::Explicit(scale) => ScaleDoc::Explicit { scale },
            },
            dsa_population: spec.dsa_population,
            alpha: spec.weights.alpha(),
            aggregates: match spec.aggregates {
                AggregateSource::Mean(MeanKind::Arithmetic) => AggregatesDoc::Arithmetic,
                AggregateSource::Mean(MeanKind::Geometric) => AggregatesDoc::Geometric,
                AggregateSource::Fixed(a) => AggregatesDoc::Fixed {
                    area: a.area(),
                    energy: a.energy(),
                    utilization: a.utilization(),
                },
            },
        }
    }
}

pub fn load_scenarios(mut source: impl Read) -> Result<Vec<ScenarioSpec>> {
    let mut text = String::new();
    source.read_to_string(&mut text).map_err(|e| Error::Parse {
        format: "JSON",
        line: 1,
        column: None,
        message: e.to_string(),
    })?;
    if text.trim().is_empty() {
        return Err(Error::EmptyInput);
    }
    let doc: ConfigDoc = serde_json::from_str(&text).map_err(json_error)?;
    if doc.version == 0 || doc.version > CONFIG_VERSION {
        return Err(Error::invalid(
            "scenario config",
            format!("unsupported version {} (this build reads version {CONFIG_VERSION})", doc.version),
        ));
    }
    if doc.scenarios.is_empty() {
        return Err(Error::EmptyInput);
    }
    doc.scenarios.into_iter().map(ScenarioDoc::into_spec).collect()
}

pub fn write_scenarios(specs: &[ScenarioSpec], mut out: impl Write) -> Result<()> {
    let doc = ConfigDoc {
        version: CONFIG_VERSION,
        scenarios: specs.iter().map(ScenarioDoc::from_spec).collect(),
    };
    let io = |e: std::io::Error| Error::Io {
        path: "<output>".into(),
        source: e,
    };
    serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| io(e.into()))?;
    out.write_all(b"\n").map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use greenfabric_core::{builtin_case, CaseId};

    #[test]
    fn round_trip() {
        let mut b = builtin_case(CaseId::III).with_concurrency(3);
        b.scale_mode = ScaleMode::FixedUtilization(0.63);
        b.aggregates = AggregateSource::Fixed(
            AggregateRatios::from_area_energy(0.27, 0.3).unwrap().with_utilization(0.64).unwrap(),
        );
        let specs = vec![builtin_case(CaseId::I), b];
        let mut buf = Vec::new();
        write_scenarios(&specs, &mut buf).unwrap();
        assert_eq!(load_scenarios(buf.as_slice()).unwrap(), specs);
    }

    #[test]
    fn defaults_fill_in() {
        let specs = load_scenarios(r#"{"version":1,"scenarios":[{"name":"all"}]}"#.as_bytes()).unwrap();
        assert_eq!(specs[0], ScenarioSpec::new("all"));
    }

    #[test]
    fn rejects_bad_documents() {
        let bad_alpha = r#"{"version":1,"scenarios":[{"name":"x","alpha":1.5}]}"#;
        let err = load_scenarios(bad_alpha.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("scenario 'x'"), "{err}");
        let unknown = r#"{"version":1,"scenarios":[{"name":"x","colour":1}]}"#;
        assert!(matches!(load_scenarios(unknown.as_bytes()), Err(Error::Parse { .. })));
        let future = r#"{"version":3,"scenarios":[{"name":"x"}]}"#;
        assert!(load_scenarios(future.as_bytes()).unwrap_err().to_string().contains("version 3"));
        assert!(matches!(load_scenarios("".as_bytes()), Err(Error::EmptyInput)));
    }
}
