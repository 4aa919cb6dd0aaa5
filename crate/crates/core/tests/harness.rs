use tensorlab_core::harness::{
    csv_rows, lower_bound_trial, rademacher_family, run_all, run_blocking_demo, run_groth_probe, run_lower_bound_probe,
    run_perm_suite, run_sharpness, sharpness_instance, BlockingConfig, GrothConfig, LowerBoundConfig, PermConfig,
    SharpnessConfig,
};
use tensorlab_core::Ordinal;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn strip_time(json: &str) -> String {
    json.lines()
        .filter(|l| !l.contains("wall_time_ms"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn reports_are_deterministic() {
    let a = run_all(3);
    let b = run_all(3);
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(strip_time(&x.to_json()), strip_time(&y.to_json()));
    }
}

#[test]
fn every_default_scenario_passes() {
    for r in run_all(7) {
        assert!(r.pass, "{}", r.to_json());
        assert!(!r.checks.is_empty());
        assert_eq!(r.pass, r.checks.iter().all(|c| c.pass));
    }
}

#[test]
fn csv_has_one_line_per_check() {
    let reports = vec![
        run_perm_suite(&PermConfig::default()),
        run_groth_probe(&GrothConfig::default()),
    ];
    let text = csv_rows(&reports).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "scenario,name,anchor,relation,value,reference,exact,pass,detail"
    );
    let checks: usize = reports.iter().map(|r| r.checks.len()).sum();
    assert_eq!(lines.count(), checks);
    assert_eq!(
        reports[0].to_csv().unwrap().lines().count(),
        reports[0].checks.len() + 1
    );
}

#[test]
fn json_carries_the_parameters() {
    let r = run_perm_suite(&PermConfig::default());
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(v["scenario"], "perm");
    assert_eq!(v["parameters"]["xi"], "1");
    assert_eq!(v["parameters"]["starts"], "3");
    assert!(v["checks"].as_array().unwrap().len() >= 2);
}

#[test]
fn budget_errors_are_failed_checks() {
    for xi in [3, 4] {
        let r = run_perm_suite(&PermConfig {
            xi: Ordinal::nat(xi),
            zeta: Ordinal::zero(),
            starts: vec![2],
            blocks: 3,
            ..PermConfig::default()
        });
        assert!(!r.pass);
        assert!(r.checks.iter().all(|c| !c.pass && c.detail.contains("budget")));
    }
}

#[test]
fn sharpness_instances() {
    for (xi, zeta, start) in [(0u64, 0u64, 3u64), (1, 0, 3), (1, 1, 2)] {
        let cfg = SharpnessConfig::new(Ordinal::nat(xi), Ordinal::nat(zeta), start);
        let out = sharpness_instance(&cfg).unwrap();
        assert!(out.pairing_is_one);
        assert!(out.coefficients_constant);
        assert_eq!(out.coefficients.len(), out.segments.len());
        assert!(out.certificate_bound <= 1.0 + 1e-9);
        assert!(out.lp_lower >= 1.0 - 1e-9);
        // segments partition the block
        let mut all: Vec<u64> = out.segments.iter().flat_map(|s| s.as_slice().to_vec()).collect();
        all.sort();
        assert_eq!(all, out.block.as_slice());
        assert!(run_sharpness(&cfg).pass);
    }
}

#[test]
fn lower_bound_trials() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..6 {
        let t = lower_bound_trial(&mut rng).unwrap();
        assert!(t.pairing_is_one);
        assert!(t.lp_lower >= 1.0 - 1e-9, "{t:?}");
    }
    assert!(run_lower_bound_probe(&LowerBoundConfig { trials: 4, seed: 1 }).pass);
}

#[test]
fn rademacher_rows() {
    let r = rademacher_family(3);
    assert_eq!(r.len(), 3);
    for row in &r {
        assert_eq!(row.len(), 8);
        assert!(row.iter().sum::<f64>().abs() < 1e-12);
    }
    let dot: f64 = r[0].iter().zip(&r[1]).map(|(a, b)| a * b).sum();
    assert!(dot.abs() < 1e-12);
}

#[test]
fn blocking_with_other_seeds() {
    for seed in [1, 2] {
        let r = run_blocking_demo(&BlockingConfig {
            seed,
            ..BlockingConfig::default()
        });
        assert!(r.pass, "{}", r.to_json());
    }
}
