//! Interchange formats for kernel datasets, device breakdowns and tech-node
//! records.
//!
//! CSV files have a mandatory header with a fixed column order, dot decimal
//! separators and UTF-8 text. Dataset CSV files may open with `# key: value`
//! comment lines carrying the metadata that has no column (`version`,
//! `provenance`, `fabric`). JSON documents carry a `version` field; versions
//! newer than this build understands are rejected.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use greenfabric_core::dataset::DATASET_VERSION;
use greenfabric_core::{
    validate_dataset, DeviceBreakdown, FabricInfo, KernelDataset, KernelProfile, TechNodeRecord,
};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DATASET_COLUMNS: [&str; 7] = [
    "name",
    "domain",
    "area_norm",
    "energy_norm",
    "utilization",
    "memory_kb",
    "estimated",
];
pub const BREAKDOWN_COLUMNS: [&str; 5] =
    ["device", "production_pct", "transport_pct", "use_pct", "eol_pct"];
pub const TECH_NODE_COLUMNS: [&str; 3] = ["node", "rel_area_per_cell", "rel_embodied_per_cell"];

/// Schema version of breakdown and tech-node documents.
pub const RECORDS_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    Csv,
    Json,
}

impl DataFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase) {
            Some(ext) if ext == "csv" => Ok(DataFormat::Csv),
            Some(ext) if ext == "json" => Ok(DataFormat::Json),
            _ => Err(Error::Usage(format!(
                "cannot infer format of '{}': expected a .csv or .json extension",
                path.display()
            ))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            DataFormat::Csv => "CSV",
            DataFormat::Json => "JSON",
        }
    }
}

impl FromStr for DataFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(DataFormat::Csv),
            "json" => Ok(DataFormat::Json),
            other => Err(Error::Usage(format!("unknown data format '{other}'"))),
        }
    }
}

/// A breakdown together with the device it describes.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedBreakdown {
    pub device: String,
    pub breakdown: DeviceBreakdown,
}

fn read_text(mut source: impl Read, format: DataFormat) -> Result<String> {
    let mut text = String::new();
    source.read_to_string(&mut text).map_err(|e| Error::Parse {
        format: format.name(),
        line: 1,
        column: None,
        message: e.to_string(),
    })?;
    if text.trim().is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(text)
}

pub fn read_file(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

// ---------------------------------------------------------------- CSV helpers

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(1, |p| p.line());
    let column = match e.kind() {
        csv::ErrorKind::UnequalLengths { len, .. } => Some(*len + 1),
        _ => None,
    };
    Error::Parse {
        format: "CSV",
        line,
        column,
        message: e.to_string(),
    }
}

struct CsvRows {
    rows: Vec<(u64, csv::StringRecord)>,
}

fn read_csv(text: &str, columns: &[&str]) -> Result<CsvRows> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::Headers)
        .flexible(false)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(csv_error)?.clone();
    let got: Vec<&str> = headers.iter().collect();
    if got != columns {
        let line = reader.position().line().max(1);
        return Err(Error::Parse {
            format: "CSV",
            line,
            column: None,
            message: format!(
                "header must be '{}', found '{}'",
                columns.join(","),
                got.join(",")
            ),
        });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        rows.push((line, record));
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(CsvRows { rows })
}

fn field(record: &csv::StringRecord, index: usize) -> &str {
    record.get(index).unwrap_or("")
}

fn parse_number(record: &csv::StringRecord, line: u64, index: usize, columns: &[&str]) -> Result<f64> {
    let raw = field(record, index).trim();
    raw.parse::<f64>().map_err(|_| Error::Parse {
        format: "CSV",
        line,
        column: Some(index as u64 + 1),
        message: format!("{} '{raw}' is not a number", columns[index]),
    })
}

fn parse_flag(raw: &str, line: u64, column: u64) -> Result<bool> {
    match raw {
        "0" | "false" => Ok(false),
        "1" | "true" => Ok(true),
        _ => Err(Error::Parse {
            format: "CSV",
            line,
            column: Some(column),
            message: format!("estimated '{raw}' must be 0 or 1"),
        }),
    }
}

fn fmt_f64(v: f64) -> String {
    // `Display` for f64 prints the shortest string that parses back exactly.
    format!("{v}")
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

fn write_err(e: impl std::fmt::Display) -> Error {
    Error::Io {
        path: "<output>".into(),
        source: std::io::Error::other(e.to_string()),
    }
}

// ------------------------------------------------------------------- datasets

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetDoc {
    version: u32,
    #[serde(default)]
    provenance: String,
    #[serde(default)]
    fabric: Option<FabricDoc>,
    kernels: Vec<KernelDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FabricDoc {
    rows: u32,
    cols: u32,
    memory_banks: u32,
    memory_kb: f64,
    clock_mhz: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelDoc {
    name: String,
    #[serde(default)]
    domain: String,
    area_norm: f64,
    energy_norm: f64,
    utilization: f64,
    memory_kb: f64,
    #[serde(default)]
    estimated: bool,
}

impl From<&FabricInfo> for FabricDoc {
    fn from(f: &FabricInfo) -> Self {
        Self {
            rows: f.rows,
            cols: f.cols,
            memory_banks: f.memory_banks,
            memory_kb: f.memory_kb,
            clock_mhz: f.clock_mhz,
        }
    }
}

impl From<FabricDoc> for FabricInfo {
    fn from(f: FabricDoc) -> Self {
        Self {
            rows: f.rows,
            cols: f.cols,
            memory_banks: f.memory_banks,
            memory_kb: f.memory_kb,
            clock_mhz: f.clock_mhz,
        }
    }
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse {
        format: "JSON",
        line: e.line() as u64,
        column: Some(e.column() as u64),
        message: e.to_string(),
    }
}

fn check_version(version: u32, supported: u32, what: &'static str) -> Result<()> {
    if version == 0 || version > supported {
        return Err(Error::invalid(
            what,
            format!("unsupported version {version} (this build reads version {supported})"),
        ));
    }
    Ok(())
}

/// Parses and validates a kernel dataset.
pub fn load_dataset(source: impl Read, format: DataFormat) -> Result<KernelDataset> {
    let text = read_text(source, format)?;
    let ds = match format {
        DataFormat::Csv => dataset_from_csv(&text)?,
        DataFormat::Json => dataset_from_json(&text)?,
    };
    let violations = validate_dataset(&ds);
    if !violations.is_empty() {
        return Err(Error::Invalid {
            what: "dataset",
            violations: violations.iter().map(ToString::to_string).collect(),
        });
    }
    Ok(ds)
}

pub fn load_dataset_path(path: &Path) -> Result<KernelDataset> {
    load_dataset(read_file(path)?, DataFormat::from_path(path)?)
}

fn kernel_error(k: &KernelProfile, line: Option<u64>) -> Option<String> {
    k.check().map(|reason| match line {
        Some(line) => format!("kernel '{}' (line {line}): {reason}", k.name),
        None => format!("kernel '{}': {reason}", k.name),
    })
}

fn dataset_from_json(text: &str) -> Result<KernelDataset> {
    let doc: DatasetDoc = serde_json::from_str(text).map_err(json_error)?;
    check_version(doc.version, DATASET_VERSION, "dataset")?;
    let kernels: Vec<KernelProfile> = doc
        .kernels
        .into_iter()
        .map(|k| KernelProfile {
            name: k.name,
            domain: k.domain,
            area_norm: k.area_norm,
            energy_norm: k.energy_norm,
            utilization: k.utilization,
            memory_kb: k.memory_kb,
            estimated: k.estimated,
        })
        .collect();
    let bad: Vec<String> = kernels.iter().filter_map(|k| kernel_error(k, None)).collect();
    if !bad.is_empty() {
        return Err(Error::Invalid {
            what: "dataset",
            violations: bad,
        });
    }
    Ok(KernelDataset {
        kernels,
        fabric: doc.fabric.map(Into::into).unwrap_or_default(),
        provenance: doc.provenance,
        version: doc.version,
    })
}

fn parse_fabric(value: &str, line: u64) -> Result<FabricInfo> {
    let mut fabric = FabricInfo::default();
    for pair in value.split_whitespace() {
        let bad = || Error::Parse {
            format: "CSV",
            line,
            column: None,
            message: format!("bad fabric entry '{pair}'"),
        };
        let (key, val) = pair.split_once('=').ok_or_else(bad)?;
        match key {
            "rows" => fabric.rows = val.parse().map_err(|_| bad())?,
            "cols" => fabric.cols = val.parse().map_err(|_| bad())?,
            "memory_banks" => fabric.memory_banks = val.parse().map_err(|_| bad())?,
            "memory_kb" => fabric.memory_kb = val.parse().map_err(|_| bad())?,
            "clock_mhz" => fabric.clock_mhz = val.parse().map_err(|_| bad())?,
            _ => return Err(bad()),
        }
    }
    Ok(fabric)
}

fn dataset_from_csv(text: &str) -> Result<KernelDataset> {
    let mut version = DATASET_VERSION;
    let mut provenance = String::new();
    let mut fabric = FabricInfo::default();
    for (i, line) in text.lines().enumerate() {
        let Some(comment) = line.trim_start().strip_prefix('#') else {
            if line.trim().is_empty() {
                continue;
            }
            break;
        };
        let line_no = i as u64 + 1;
        let Some((key, value)) = comment.split_once(':') else {
            continue;
        };
        let value = value.trim();
        match key.trim() {
            "version" => {
                version = value.parse().map_err(|_| Error::Parse {
                    format: "CSV",
                    line: line_no,
                    column: None,
                    message: format!("bad version '{value}'"),
                })?;
                check_version(version, DATASET_VERSION, "dataset")?;
            }
            "provenance" => provenance = value.to_string(),
            "fabric" => fabric = parse_fabric(value, line_no)?,
            _ => {}
        }
    }

    let rows = read_csv(text, &DATASET_COLUMNS)?;
    let mut kernels = Vec::with_capacity(rows.rows.len());
    let mut bad = Vec::new();
    for (line, rec) in &rows.rows {
        let line = *line;
        let kernel = KernelProfile {
            name: field(rec, 0).to_string(),
            domain: field(rec, 1).to_string(),
            area_norm: parse_number(rec, line, 2, &DATASET_COLUMNS)?,
            energy_norm: parse_number(rec, line, 3, &DATASET_COLUMNS)?,
            utilization: parse_number(rec, line, 4, &DATASET_COLUMNS)?,
            memory_kb: parse_number(rec, line, 5, &DATASET_COLUMNS)?,
            estimated: parse_flag(field(rec, 6).trim(), line, 7)?,
        };
        if let Some(msg) = kernel_error(&kernel, Some(line)) {
            bad.push(msg);
        }
        kernels.push(kernel);
    }
    if !bad.is_empty() {
        return Err(Error::Invalid {
            what: "dataset",
            violations: bad,
        });
    }
    Ok(KernelDataset {
        kernels,
        fabric,
        provenance,
        version,
    })
}

/// Serializes a dataset; [`load_dataset`] reads the output back unchanged.
pub fn write_dataset(ds: &KernelDataset, format: DataFormat, out: impl Write) -> Result<()> {
    match format {
        DataFormat::Json => {
            let doc = DatasetDoc {
                version: ds.version,
                provenance: ds.provenance.clone(),
                fabric: Some((&ds.fabric).into()),
                kernels: ds
                    .kernels
                    .iter()
                    .map(|k| KernelDoc {
                        name: k.name.clone(),
                        domain: k.domain.clone(),
                        area_norm: k.area_norm,
                        energy_norm: k.energy_norm,
                        utilization: k.utilization,
                        memory_kb: k.memory_kb,
                        estimated: k.estimated,
                    })
                    .collect(),
            };
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, &doc).map_err(write_err)?;
            out.write_all(b"\n").map_err(write_err)
        }
        DataFormat::Csv => {
            let mut out = out;
            let f = &ds.fabric;
            let mut head = String::new();
            let _ = writeln!(head, "# version: {}", ds.version);
            if !ds.provenance.is_empty() {
                let _ = writeln!(head, "# provenance: {}", ds.provenance.replace(['\n', '\r'], " "));
            }
            let _ = writeln!(
                head,
                "# fabric: rows={} cols={} memory_banks={} memory_kb={} clock_mhz={}",
                f.rows,
                f.cols,
                f.memory_banks,
                fmt_f64(f.memory_kb),
                fmt_f64(f.clock_mhz)
            );
            out.write_all(head.as_bytes()).map_err(write_err)?;
            let mut w = csv_writer(out);
            w.write_record(DATASET_COLUMNS).map_err(write_err)?;
            for k in &ds.kernels {
                w.write_record([
                    k.name.clone(),
                    k.domain.clone(),
                    fmt_f64(k.area_norm),
                    fmt_f64(k.energy_norm),
                    fmt_f64(k.utilization),
                    fmt_f64(k.memory_kb),
                    if k.estimated { "1" } else { "0" }.to_string(),
                ])
                .map_err(write_err)?;
            }
            w.flush().map_err(write_err)
        }
    }
}

// ----------------------------------------------------------------- breakdowns

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BreakdownsDoc {
    version: u32,
    breakdowns: Vec<BreakdownDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BreakdownDoc {
    device: String,
    production_pct: f64,
    transport_pct: f64,
    use_pct: f64,
    eol_pct: f64,
}

fn build_breakdown(doc: BreakdownDoc, line: Option<u64>) -> Result<NamedBreakdown> {
    let b = DeviceBreakdown::new(doc.production_pct, doc.transport_pct, doc.use_pct, doc.eol_pct)
        .map_err(|e| {
            let sum = doc.production_pct + doc.transport_pct + doc.use_pct + doc.eol_pct;
            let at = line.map(|l| format!(" (line {l})")).unwrap_or_default();
            Error::invalid("breakdown", format!("device '{}'{at}: {e} (sum {sum})", doc.device))
        })?;
    Ok(NamedBreakdown {
        device: doc.device,
        breakdown: b,
    })
}

pub fn load_breakdowns(source: impl Read, format: DataFormat) -> Result<Vec<NamedBreakdown>> {
    let text = read_text(source, format)?;
    match format {
        DataFormat::Json => {
            let doc: BreakdownsDoc = serde_json::from_str(&text).map_err(json_error)?;
            check_version(doc.version, RECORDS_VERSION, "breakdowns")?;
            if doc.breakdowns.is_empty() {
                return Err(Error::EmptyInput);
            }
            doc.breakdowns.into_iter().map(|d| build_breakdown(d, None)).collect()
        }
        DataFormat::Csv => {
            let rows = read_csv(&text, &BREAKDOWN_COLUMNS)?;
            rows.rows
                .iter()
                .map(|(line, rec)| {
                    let num = |i| parse_number(rec, *line, i, &BREAKDOWN_COLUMNS);
                    let doc = BreakdownDoc {
                        device: field(rec, 0).to_string(),
                        production_pct: num(1)?,
                        transport_pct: num(2)?,
                        use_pct: num(3)?,
                        eol_pct: num(4)?,
                    };
                    build_breakdown(doc, Some(*line))
                })
                .collect()
        }
    }
}

pub fn write_breakdowns(records: &[NamedBreakdown], format: DataFormat, out: impl Write) -> Result<()> {
    let docs: Vec<BreakdownDoc> = records
        .iter()
        .map(|r| BreakdownDoc {
            device: r.device.clone(),
            production_pct: r.breakdown.production_pct(),
            transport_pct: r.breakdown.transport_pct(),
            use_pct: r.breakdown.use_pct(),
            eol_pct: r.breakdown.eol_pct(),
        })
        .collect();
    match format {
        DataFormat::Json => {
            let mut out = out;
            let doc = BreakdownsDoc {
                version: RECORDS_VERSION,
                breakdowns: docs,
            };
            serde_json::to_writer_pretty(&mut out, &doc).map_err(write_err)?;
            out.write_all(b"\n").map_err(write_err)
        }
        DataFormat::Csv => {
            let mut w = csv_writer(out);
            w.write_record(BREAKDOWN_COLUMNS).map_err(write_err)?;
            for d in docs {
                w.write_record([
                    d.device,
                    fmt_f64(d.production_pct),
                    fmt_f64(d.transport_pct),
                    fmt_f64(d.use_pct),
                    fmt_f64(d.eol_pct),
                ])
                .map_err(write_err)?;
            }
            w.flush().map_err(write_err)
        }
    }
}

// ----------------------------------------------------------------- tech nodes

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TechNodesDoc {
    version: u32,
    tech_nodes: Vec<TechNodeDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TechNodeDoc {
    node: String,
    rel_area_per_cell: f64,
    rel_embodied_per_cell: f64,
}

/// Parses tech-node records; exactly one must be the anchor (both ratios 1).
pub fn load_tech_nodes(source: impl Read, format: DataFormat) -> Result<Vec<TechNodeRecord>> {
    let text = read_text(source, format)?;
    let docs: Vec<(Option<u64>, TechNodeDoc)> = match format {
        DataFormat::Json => {
            let doc: TechNodesDoc = serde_json::from_str(&text).map_err(json_error)?;
            check_version(doc.version, RECORDS_VERSION, "tech nodes")?;
            doc.tech_nodes.into_iter().map(|d| (None, d)).collect()
        }
        DataFormat::Csv => {
            let rows = read_csv(&text, &TECH_NODE_COLUMNS)?;
            rows.rows
                .iter()
                .map(|(line, rec)| {
                    Ok((
                        Some(*line),
                        TechNodeDoc {
                            node: field(rec, 0).to_string(),
                            rel_area_per_cell: parse_number(rec, *line, 1, &TECH_NODE_COLUMNS)?,
                            rel_embodied_per_cell: parse_number(rec, *line, 2, &TECH_NODE_COLUMNS)?,
                        },
                    ))
                })
                .collect::<Result<_>>()?
        }
    };
    if docs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut records = Vec::with_capacity(docs.len());
    let mut bad = Vec::new();
    for (line, d) in docs {
        match TechNodeRecord::new(d.node, d.rel_area_per_cell, d.rel_embodied_per_cell) {
            Ok(r) => records.push(r),
            Err(e) => bad.push(match line {
                Some(l) => format!("line {l}: {e}"),
                None => e.to_string(),
            }),
        }
    }
    if !bad.is_empty() {
        return Err(Error::Invalid {
            what: "tech nodes",
            violations: bad,
        });
    }
    match records.iter().filter(|r| r.is_anchor()).count() {
        1 => Ok(records),
        0 => Err(Error::invalid(
            "tech nodes",
            "missing anchor record (both ratios = 1)",
        )),
        n => Err(Error::invalid(
            "tech nodes",
            format!("{n} anchor records; exactly one expected"),
        )),
    }
}

pub fn write_tech_nodes(records: &[TechNodeRecord], format: DataFormat, out: impl Write) -> Result<()> {
    let docs: Vec<TechNodeDoc> = records
        .iter()
        .map(|r| TechNodeDoc {
            node: r.node_name.clone(),
            rel_area_per_cell: r.rel_area_per_cell,
            rel_embodied_per_cell: r.rel_embodied_per_cell,
        })
        .collect();
    match format {
        DataFormat::Json => {
            let mut out = out;
            let doc = TechNodesDoc {
                version: RECORDS_VERSION,
                tech_nodes: docs,
            };
            serde_json::to_writer_pretty(&mut out, &doc).map_err(write_err)?;
            out.write_all(b"\n").map_err(write_err)
        }
        DataFormat::Csv => {
            let mut w = csv_writer(out);
            w.write_record(TECH_NODE_COLUMNS).map_err(write_err)?;
            for d in docs {
                w.write_record([d.node, fmt_f64(d.rel_area_per_cell), fmt_f64(d.rel_embodied_per_cell)])
                    .map_err(write_err)?;
            }
            w.flush().map_err(write_err)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use greenfabric_core::builtin_paper_dataset;

    const HEADER: &str = "name,domain,area_norm,energy_norm,utilization,memory_kb,estimated\n";

    fn csv_dataset(rows: &str) -> Result<KernelDataset> {
        load_dataset(format!("{HEADER}{rows}").as_bytes(), DataFormat::Csv)
    }

    #[test]
    fn csv_round_trip_builtin() {
        let ds = builtin_paper_dataset();
        let mut buf = Vec::new();
        write_dataset(&ds, DataFormat::Csv, &mut buf).unwrap();
        assert_eq!(load_dataset(buf.as_slice(), DataFormat::Csv).unwrap(), ds);
    }

    #[test]
    fn json_round_trip_builtin() {
        let ds = builtin_paper_dataset();
        let mut buf = Vec::new();
        write_dataset(&ds, DataFormat::Json, &mut buf).unwrap();
        assert_eq!(load_dataset(buf.as_slice(), DataFormat::Json).unwrap(), ds);
    }

    #[test]
    fn utilization_out_of_range() {
        let err = csv_dataset("A,x,0.5,0.5,1.2,1,0\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("utilization out of (0,1]"), "{msg}");
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn duplicate_name() {
        let err = csv_dataset("A,x,0.5,0.5,1,1,0\nA,x,0.4,0.5,1,1,0\n").unwrap_err();
        assert!(err.to_string().contains("duplicate kernel name 'A'"), "{err}");
    }

    #[test]
    fn minimal_csv_defaults_metadata() {
        let ds = csv_dataset("A,x,0.5,0.5,1,1,1\n").unwrap();
        assert_eq!(ds.fabric, FabricInfo::default());
        assert!(ds.kernels[0].estimated);
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = csv_dataset("A,x,zero,0.5,1,1,0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, column: Some(3), .. }), "{err:?}");
        let err = csv_dataset("A,x,0.5\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
        let err = load_dataset("name,area\nA,1\n".as_bytes(), DataFormat::Csv).unwrap_err();
        assert!(err.to_string().contains("header must be"), "{err}");
        let err = load_dataset("{\"version\": 1,\n \"kernels\": [}".as_bytes(), DataFormat::Json).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, column: Some(_), .. }), "{err:?}");
    }

    #[test]
    fn future_versions_rejected() {
        let err = load_dataset(
            r#"{"version": 2, "kernels": []}"#.as_bytes(),
            DataFormat::Json,
        )
        .unwrap_err();
        assert!(err.to_string().contains("unsupported version 2"), "{err}");
        let err = load_dataset(format!("# version: 9\n{HEADER}A,x,0.5,0.5,1,1,0\n").as_bytes(), DataFormat::Csv)
            .unwrap_err();
        assert!(err.to_string().contains("unsupported version 9"), "{err}");
    }

    #[test]
    fn fabric_memory_check() {
        let text = format!("# fabric: rows=8 cols=8 memory_banks=32 memory_kb=100 clock_mhz=100\n{HEADER}S,x,0.5,0.5,1,256,0\n");
        let err = load_dataset(text.as_bytes(), DataFormat::Csv).unwrap_err();
        assert!(err.to_string().contains("fabric memory below largest kernel"), "{err}");
    }

    #[test]
    fn breakdowns() {
        let ok = "device,production_pct,transport_pct,use_pct,eol_pct\nphone,80,3,15,2\n";
        let b = load_breakdowns(ok.as_bytes(), DataFormat::Csv).unwrap();
        assert_eq!(b[0].device, "phone");
        let bad = "device,production_pct,transport_pct,use_pct,eol_pct\nodd,50,10,50,2\n";
        let err = load_breakdowns(bad.as_bytes(), DataFormat::Csv).unwrap_err();
        assert!(err.to_string().contains("sum"), "{err}");
        assert!(matches!(load_breakdowns("".as_bytes(), DataFormat::Csv), Err(Error::EmptyInput)));
        assert!(matches!(load_breakdowns("  \n".as_bytes(), DataFormat::Json), Err(Error::EmptyInput)));

        let mut buf = Vec::new();
        write_breakdowns(&b, DataFormat::Json, &mut buf).unwrap();
        assert_eq!(load_breakdowns(buf.as_slice(), DataFormat::Json).unwrap(), b);
    }

    #[test]
    fn tech_nodes() {
        let anchor = "node,rel_area_per_cell,rel_embodied_per_cell\n28nm,1,1\n";
        let recs = load_tech_nodes(anchor.as_bytes(), DataFormat::Csv).unwrap();
        assert_eq!(greenfabric_core::embodied_intensity(&recs[0]).unwrap(), 1.0);

        let missing = "node,rel_area_per_cell,rel_embodied_per_cell\n7nm,0.2,0.6\n";
        let err = load_tech_nodes(missing.as_bytes(), DataFormat::Csv).unwrap_err();
        assert!(err.to_string().contains("missing anchor"), "{err}");

        let negative = "node,rel_area_per_cell,rel_embodied_per_cell\n28nm,1,1\n7nm,-0.2,0.6\n";
        let err = load_tech_nodes(negative.as_bytes(), DataFormat::Csv).unwrap_err();
        assert!(err.to_string().contains("7nm"), "{err}");

        let mut buf = Vec::new();
        write_tech_nodes(&recs, DataFormat::Json, &mut buf).unwrap();
        assert_eq!(load_tech_nodes(buf.as_slice(), DataFormat::Json).unwrap(), recs);
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(DataFormat::from_path(Path::new("a/b.CSV")).unwrap(), DataFormat::Csv);
        assert_eq!(DataFormat::from_path(Path::new("x.json")).unwrap(), DataFormat::Json);
        assert!(DataFormat::from_path(Path::new("x.txt")).is_err());
    }
}
