use greenfabric::io::{load_dataset, write_dataset, DataFormat};
use greenfabric::Error;
use greenfabric_core::{FabricInfo, KernelDataset, KernelProfile};
use proptest::prelude::*;

fn kernel() -> impl Strategy<Value = KernelProfile> {
    (
        "[A-Za-z][A-Za-z0-9 _-]{0,12}",
        "[a-z ,\"]{0,16}",
        1e-6f64..10.0,
        1e-6f64..10.0,
        1e-3f64..=1.0,
        0.0f64..256.0,
        any::<bool>(),
    )
        .prop_map(|(name, domain, area_norm, energy_norm, utilization, memory_kb, estimated)| KernelProfile {
            name,
            domain,
            area_norm,
            energy_norm,
            utilization,
            memory_kb,
            estimated,
        })
}

fn dataset() -> impl Strategy<Value = KernelDataset> {
    (
        prop::collection::vec(kernel(), 1..12),
        "[ -~]{0,40}",
        1u32..32,
        1u32..32,
    )
        .prop_map(|(kernels, provenance, rows, cols)| {
            let mut seen = std::collections::HashSet::new();
            let kernels: Vec<_> = kernels.into_iter().filter(|k| seen.insert(k.name.clone())).collect();
            KernelDataset {
                kernels,
                fabric: FabricInfo {
                    rows,
                    cols,
                    ..FabricInfo::default()
                },
                provenance: provenance.trim().to_string(),
                version: 1,
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn round_trip_is_identity(ds in dataset()) {
        for format in [DataFormat::Csv, DataFormat::Json] {
            let mut buf = Vec::new();
            write_dataset(&ds, format, &mut buf).unwrap();
            let back = load_dataset(buf.as_slice(), format).unwrap();
            prop_assert_eq!(&back, &ds);
        }
    }
}

#[test]
fn estimated_flags_survive() {
    let ds = greenfabric_core::builtin_paper_dataset();
    let mut buf = Vec::new();
    write_dataset(&ds, DataFormat::Csv, &mut buf).unwrap();
    let back = load_dataset(buf.as_slice(), DataFormat::Csv).unwrap();
    let flags: Vec<bool> = back.kernels.iter().map(|k| k.estimated).collect();
    assert_eq!(flags, [false, true, true, true, true, false, true, true]);
}

#[test]
fn json_rejects_unknown_fields() {
    let doc = r#"{"version":1,"kernels":[{"name":"A","area_norm":0.5,"energy_norm":0.5,"utilization":1,"memory_kb":1,"colour":"red"}]}"#;
    assert!(matches!(load_dataset(doc.as_bytes(), DataFormat::Json), Err(Error::Parse { .. })));
}
