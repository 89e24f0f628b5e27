//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line straight to
//! stdout, so the lines show up even when libtest captures output.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::Command;

use greenfabric::io::{load_dataset, write_dataset, DataFormat};
use greenfabric_core::{
    aggregate, builtin_case, builtin_paper_dataset, calibrated_aggregates, cdc, evaluate_cdc_table,
    fit_aggregates, fit_scale, hybrid_retained_savings, min_dsas_to_replace, savings_factor,
    savings_table, scale_factor, validate_dataset, AggregateRatios, AggregateSource, CaseId,
    CdcQuery, FootprintWeights, MeanKind, ScaleMode, ScenarioSpec,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

type Check = Result<String, String>;

fn report(id: u32, title: &str, outcome: Check) {
    let line = match &outcome {
        Ok(detail) => format!("PASS criterion {id}: {title} [{detail}]"),
        Err(why) => format!("FAIL criterion {id}: {title} [{why}]"),
    };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
    if let Err(why) = outcome {
        panic!("criterion {id} failed: {why}");
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn within(what: &str, got: f64, want: f64, tol: f64) -> Result<f64, String> {
    let r = rel(got, want);
    if r <= tol {
        Ok(r)
    } else {
        Err(format!("{what}: got {got:.6}, want {want} (off by {:.2}%, limit {:.1}%)", r * 100.0, tol * 100.0))
    }
}

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_greenfabric"));
    cmd.env_remove("GREENFABRIC_DATASET");
    cmd
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn weights(alpha: f64) -> FootprintWeights {
    FootprintWeights::explicit(alpha).unwrap()
}

const ALPHAS: [f64; 4] = [0.3, 0.5, 0.7, 0.9];

#[test]
fn criterion_1_worked_cases() {
    let run = || -> Check {
        let agg = AggregateRatios::from_area_energy(0.35, 0.35).map_err(|e| e.to_string())?;
        let cases = [(1, 0.25, "8.43"), (1, 0.8, "3.32"), (3, 0.25, "25.29"), (3, 0.8, "9.96")];
        let mut shown = Vec::new();
        for (n, alpha, want) in cases {
            let q = CdcQuery::new(weights(alpha), agg, n, f64::from(n)).map_err(|e| e.to_string())?;
            let value = cdc(&q).map_err(|e| e.to_string())?;
            if format!("{value:.2}") != want {
                return Err(format!("engine n={n} alpha={alpha}: {value}"));
            }
            let out = bin()
                .args(["--format", "csv", "cdc", "--area", "0.35", "--energy", "0.35"])
                .args(["--alpha", &alpha.to_string(), "--n", &n.to_string()])
                .output()
                .map_err(|e| e.to_string())?;
            let text = String::from_utf8_lossy(&out.stdout);
            let mut rows = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
            let header = rows.headers().map_err(|e| e.to_string())?.clone();
            let col = header.iter().position(|h| h == "cdc").ok_or("no cdc column")?;
            let row = rows.records().next().ok_or("no row")?.map_err(|e| e.to_string())?;
            if &row[col] != want {
                return Err(format!("cli n={n} alpha={alpha}: shows {}", &row[col]));
            }
            shown.push(want);
        }
        Ok(shown.join(", "))
    };
    report(1, "worked cases at A=E=0.35 exact to 2 decimals", run());
}

#[test]
fn criterion_2_calibrated_case_one() {
    let run = || -> Check {
        let agg = fit_aggregates([(0.3, 9.773), (0.9, 4.01)], 1, 1.0).map_err(|e| e.to_string())?;
        if (agg.area() - 0.2687).abs() > 0.001 || (agg.energy() - 0.3032).abs() > 0.001 {
            return Err(format!("fit A={} E={}", agg.area(), agg.energy()));
        }
        let ds = builtin_paper_dataset();
        let mut spec = builtin_case(CaseId::I);
        spec.aggregates = AggregateSource::Fixed(calibrated_aggregates(CaseId::I, &ds).map_err(|e| e.to_string())?);
        let table = evaluate_cdc_table(&spec, &ds, &ALPHAS).map_err(|e| e.to_string())?;
        let mut worst = 0.0f64;
        for (&(alpha, got), want) in table.samples().iter().zip([9.77, 6.32, 4.84, 4.01]) {
            worst = worst.max(within(&format!("alpha={alpha}"), got, want, 0.005)?);
        }
        Ok(format!("A={:.4} E={:.4}, worst {:.2}%", agg.area(), agg.energy(), worst * 100.0))
    };
    report(2, "calibrated CASE-I CDC over alpha within 0.5%", run());
}

#[test]
fn criterion_3_arithmetic_cases() {
    let run = || -> Check {
        let ds = builtin_paper_dataset();
        let expected = [
            (CaseId::I, [9.773, 6.32, 4.84, 4.01]),
            (CaseId::II, [7.66, 5.04, 3.91, 3.29]),
            (CaseId::III, [6.59, 4.21, 3.39, 2.93]),
        ];
        let mut worst = 0.0f64;
        for (case, want) in expected {
            let table = evaluate_cdc_table(&builtin_case(case), &ds, &ALPHAS).map_err(|e| e.to_string())?;
            for (&(alpha, got), w) in table.samples().iter().zip(want) {
                worst = worst.max(within(&format!("{case} alpha={alpha}"), got, w, 0.10)?);
            }
        }
        Ok(format!("12 cells, worst {:.2}%", worst * 100.0))
    };
    report(3, "arithmetic-mean CASE-I/II/III tables within 10%", run());
}

fn reference_savings_spec() -> ScenarioSpec {
    let ds = builtin_paper_dataset();
    let mut spec = builtin_case(CaseId::I);
    spec.aggregates = AggregateSource::Fixed(calibrated_aggregates(CaseId::I, &ds).unwrap());
    spec.scale_mode = ScaleMode::FixedUtilization(0.63);
    spec.dsa_population = 40;
    spec.weights = weights(0.7);
    spec
}

#[test]
fn criterion_4_savings_table() {
    let run = || -> Check {
        let ds = builtin_paper_dataset();
        let rows = savings_table(&reference_savings_spec(), &ds, 1..=5).map_err(|e| e.to_string())?;
        let conservative = [7.60, 3.84, 2.59, 1.97, 1.59];
        let shared = [None, Some(6.10), Some(4.12), Some(3.12), Some(2.53)];
        let mut worst = 0.0f64;
        for ((r, c), s) in rows.iter().zip(conservative).zip(shared) {
            let n = r.concurrency;
            worst = worst.max(within(&format!("n={n} conservative"), r.improvement_conservative, c, 0.02)?);
            match (r.improvement_avg_util, s) {
                (None, None) => {}
                (Some(got), Some(want)) => {
                    worst = worst.max(within(&format!("n={n} avg util"), got, want, 0.02)?);
                }
                (got, _) => return Err(format!("n={n}: avg util cell {got:?}")),
            }
        }
        Ok(format!("9 cells plus empty n=1 cell, worst {:.2}%", worst * 100.0))
    };
    report(4, "savings table at N=40, alpha=0.7, u=0.63 within 2%", run());
}

#[test]
fn criterion_5_concurrent_cdc() {
    #[rustfmt::skip]
    const CONCURRENT_REFERENCE: [(u32, [f64; 4]); 3] = [
        (2, [10.34286399, 7.119223161, 5.737662805, 4.970129273]),
        (3, [15.51429599, 10.67883474, 8.606494207, 7.45519391]),
        (4, [20.68572799, 14.23844632, 11.47532561, 9.940258547]),
    ];
    let spots = [(2u32, 0.3, 10.343), (3, 0.9, 7.455), (4, 0.3, 20.686)];
    let run = || -> Check {
        let ds = builtin_paper_dataset();
        let agg = calibrated_aggregates(CaseId::I, &ds).map_err(|e| e.to_string())?;
        let (mut worst_fit, mut worst_closed) = (0.0f64, 0.0f64);
        let mut scales = Vec::new();
        for (n, alpha, want) in spots {
            let cells = CONCURRENT_REFERENCE.iter().find(|(m, _)| *m == n).unwrap().1;
            let points: Vec<(f64, f64)> = ALPHAS.iter().copied().zip(cells).collect();
            let fitted = fit_scale(&points, &agg, n).map_err(|e| e.to_string())?;
            scales.push(format!("{fitted:.3}"));
            let q = CdcQuery::new(weights(alpha), agg, n, fitted).map_err(|e| e.to_string())?;
            let got = cdc(&q).map_err(|e| e.to_string())?;
            worst_fit = worst_fit.max(within(&format!("fitted n={n} alpha={alpha}"), got, want, 0.03)?);

            let closed = scale_factor(n, ScaleMode::FixedUtilization(0.64), 1.0).map_err(|e| e.to_string())?;
            let q = CdcQuery::new(weights(alpha), agg, n, closed).map_err(|e| e.to_string())?;
            let got = cdc(&q).map_err(|e| e.to_string())?;
            worst_closed = worst_closed.max(within(&format!("closed n={n} alpha={alpha}"), got, want, 0.05)?);
        }
        Ok(format!(
            "fitted n' {}, worst {:.2}%; n'=0.64n worst {:.2}%",
            scales.join("/"),
            worst_fit * 100.0,
            worst_closed * 100.0
        ))
    };
    report(5, "concurrent CDC spot checks within 3% (fitted) and 5% (closed form)", run());
}

#[test]
fn criterion_6_hybrid() {
    let run = || -> Check {
        let ds = builtin_paper_dataset();
        let mut spec = builtin_case(CaseId::I).with_concurrency(4);
        spec.aggregates = AggregateSource::Fixed(calibrated_aggregates(CaseId::I, &ds).map_err(|e| e.to_string())?);
        spec.scale_mode = ScaleMode::AverageUtilization;
        let h = hybrid_retained_savings(&spec, &ds, &["AESEncrypt"]).map_err(|e| e.to_string())?;
        let r = within("improvement", h.improvement, 4.05, 0.05)?;
        Ok(format!("{:.3} ({:.2}% off)", h.improvement, r * 100.0))
    };
    report(6, "hybrid keeping AESEncrypt at n=4 near 4.05 within 5%", run());
}

fn agg(area: f64, energy: f64) -> AggregateRatios {
    AggregateRatios::from_area_energy(area, energy).unwrap()
}

fn properties() -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    });
    let inputs = (0.05f64..1.0, 0.02f64..2.0, 0.01f64..0.99, 1u32..=4);

    runner
        .run(&inputs, |(alpha, area, energy, n)| {
            let a = agg(area, energy);
            let q = CdcQuery::new(weights(alpha), a, n, f64::from(n)).unwrap();
            let c = cdc(&q).unwrap();
            let residual = (q.dsa_footprint_at(c) - q.scale()).abs() / q.scale();
            prop_assert!(residual < 1e-9, "fixed point residual {residual}");

            let bump = |alpha: f64, area: f64, energy: f64| {
                cdc(&CdcQuery::new(weights(alpha), agg(area, energy), n, f64::from(n)).unwrap()).unwrap()
            };
            prop_assert!(bump((alpha * 1.01).min(1.0), area, energy) < c || alpha * 1.01 > 1.0);
            prop_assert!(bump(alpha, area * 1.01, energy) < c);
            prop_assert!(bump(alpha, area, energy * 1.01) < c);

            let limit = bump(1.0, area, energy);
            prop_assert!(rel(limit, f64::from(n) / area) < 1e-12);

            let serial = cdc(&CdcQuery::serial(weights(alpha), a)).unwrap();
            prop_assert!(rel(c, f64::from(n) * serial) < 1e-12);

            let min = min_dsas_to_replace(&q).unwrap();
            let oracle = (1u64..).find(|&p| q.dsa_footprint_at(p as f64) > q.scale()).unwrap();
            prop_assert_eq!(min, oracle);
            Ok(())
        })
        .map_err(|e| e.to_string())?;

    runner
        .run(&(0.05f64..1.5, 0.01f64..0.95, 0.05f64..0.5, 0.55f64..1.0), |(area, energy, a1, a2)| {
            let truth = agg(area, energy);
            let point = |alpha: f64| (alpha, cdc(&CdcQuery::serial(weights(alpha), truth)).unwrap());
            let fit = fit_aggregates([point(a1), point(a2)], 1, 1.0).unwrap();
            prop_assert!(rel(fit.area(), area) < 1e-9, "area {} vs {area}", fit.area());
            prop_assert!(rel(fit.energy(), energy) < 1e-9, "energy {} vs {energy}", fit.energy());
            Ok(())
        })
        .map_err(|e| e.to_string())?;

    let ds = builtin_paper_dataset();
    runner
        .run(&(0.05f64..1.0, 0.05f64..1.0, 0.05f64..0.95, 0.05f64..1.0, 2u32..=8), |(alpha, area, energy, util, n)| {
            let mut spec = builtin_case(CaseId::I).with_concurrency(n);
            spec.weights = weights(alpha);
            spec.aggregates = AggregateSource::Fixed(agg(area, energy).with_utilization(util).unwrap());
            let s = savings_factor(&spec, &ds).unwrap();
            let ratio = s.improvement_avg_util.unwrap() / s.improvement_conservative;
            let expected = f64::from(n) / s.scale_avg_util.unwrap();
            prop_assert!(rel(ratio, expected) < 1e-14, "{ratio} vs {expected}");
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(())
}

#[test]
fn criterion_7_property_suite() {
    report(
        7,
        "randomized properties over 1000 inputs each",
        properties().map(|_| "fixed point, monotonicity, limits, oracle, fit, savings ratio".into()),
    );
}

#[test]
fn criterion_8_dataset_io() {
    let run = || -> Check {
        let ds = builtin_paper_dataset();
        let violations = validate_dataset(&ds);
        if !violations.is_empty() {
            return Err(format!("builtin violations: {violations:?}"));
        }
        for format in [DataFormat::Csv, DataFormat::Json] {
            let mut buf = Vec::new();
            write_dataset(&ds, format, &mut buf).map_err(|e| e.to_string())?;
            let back = load_dataset(buf.as_slice(), format).map_err(|e| e.to_string())?;
            if back != ds {
                return Err(format!("{format:?} round trip changed the dataset"));
            }
        }
        let mean = aggregate(&ds.kernels, MeanKind::Arithmetic).map_err(|e| e.to_string())?;
        if (mean.area() - 0.275).abs() > 1e-12
            || (mean.energy() - 0.34375).abs() > 1e-12
            || (mean.utilization() - 0.64).abs() > 1e-12
        {
            return Err(format!("means {} {} {}", mean.area(), mean.energy(), mean.utilization()));
        }

        let fixtures: [(&[&str], &str, &str); 11] = [
            (&["dataset", "validate"], "bad_utilization.csv", "utilization out of (0,1]"),
            (&["dataset", "validate"], "duplicate_name.csv", "duplicate kernel name 'GeMM'"),
            (&["dataset", "validate"], "small_fabric.csv", "fabric memory below largest kernel"),
            (&["dataset", "validate"], "zero_area.json", "area_norm must be > 0"),
            (&["dataset", "validate"], "future_version.json", "unsupported version 2"),
            (&["dataset", "validate"], "bad_number.csv", "parse error at line 2, column 3"),
            (&["dataset", "validate"], "wrong_header.csv", "header must be"),
            (&["dataset", "validate"], "empty.csv", "empty input"),
            (&["alpha", "--file"], "breakdown_sum.csv", "sum"),
            (&["dataset", "intensity"], "missing_anchor.csv", "missing anchor"),
            (&["dataset", "intensity"], "negative_ratio.csv", "7nm"),
        ];
        for (args, file, needle) in fixtures {
            let out = bin().args(args).arg(fixture(file)).output().map_err(|e| e.to_string())?;
            let stderr = String::from_utf8_lossy(&out.stderr);
            if out.status.code() != Some(1) || !stderr.contains(needle) {
                return Err(format!("{file}: exit {:?}, stderr {stderr:?}", out.status.code()));
            }
        }
        Ok(format!("round trips in CSV and JSON, {} malformed fixtures exit 1", fixtures.len()))
    };
    report(8, "builtin dataset, round trips, pinned means, malformed fixtures", run());
}
