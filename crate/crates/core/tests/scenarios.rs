use greenfabric_core::*;

const ALPHAS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

#[test]
fn cases_order_at_every_alpha() {
    let ds = builtin_paper_dataset();
    for n in 1..=4 {
        let tables: Vec<_> = CaseId::ALL
            .iter()
            .map(|&c| {
                let mut spec = builtin_case(c).with_concurrency(n);
                spec.scale_mode = ScaleMode::AverageUtilization;
                evaluate_cdc_table(&spec, &ds, &ALPHAS).unwrap()
            })
            .collect();
        for (i, alpha) in ALPHAS.iter().enumerate() {
            let (one, two, three) = (
                tables[0].samples()[i].1,
                tables[1].samples()[i].1,
                tables[2].samples()[i].1,
            );
            assert!(one > two && two > three, "n={n} alpha={alpha}");
        }
    }
}

#[test]
fn table_cells_are_fixed_points() {
    let ds = builtin_paper_dataset();
    for case in CaseId::ALL {
        for mode in [ScaleMode::Conservative, ScaleMode::AverageUtilization] {
            let mut spec = builtin_case(case).with_concurrency(3);
            spec.scale_mode = mode;
            let agg = spec.aggregates(&ds).unwrap();
            let table = evaluate_cdc_table(&spec, &ds, &ALPHAS).unwrap();
            let scale = table.metadata().scale.unwrap();
            for &(alpha, value) in table.samples() {
                let q = CdcQuery::new(FootprintWeights::explicit(alpha).unwrap(), agg, 3, scale).unwrap();
                let residual = q.dsa_footprint_at(value) - fabric_footprint(scale).unwrap();
                assert!(residual.abs() < 1e-9);
            }
        }
    }
}

#[test]
fn savings_fall_with_concurrency() {
    let ds = builtin_paper_dataset();
    for case in CaseId::ALL {
        let mut spec = builtin_case(case);
        spec.scale_mode = ScaleMode::AverageUtilization;
        let rows = savings_table(&spec, &ds, 1..=5).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].improvement_conservative < w[0].improvement_conservative);
        }
        let avg: Vec<f64> = rows.iter().filter_map(|r| r.improvement_avg_util).collect();
        assert_eq!(avg.len(), 4);
        assert!(avg.windows(2).all(|w| w[1] < w[0]));
    }
}

#[test]
fn packing_shipped_pairs() {
    let ds = builtin_paper_dataset();
    let grid = ds.fabric.grid().unwrap();
    let pick = |names: &[&str]| -> Vec<KernelProfile> {
        names.iter().map(|n| ds.kernel(n).unwrap().clone()).collect()
    };
    assert!(!packing_feasible(&pick(&["GeMM", "FIR"]), grid, 1.0).unwrap().feasible);
    assert!(packing_feasible(&pick(&["GeMM", "FIR"]), grid, 2.0).unwrap().feasible);
    assert!(!packing_feasible(&pick(&["GeMM", "Conv2D"]), grid, 1.45).unwrap().feasible);
    assert!(packing_feasible(&pick(&["GeMM", "Conv2D"]), grid, 1.5).unwrap().feasible);
}
