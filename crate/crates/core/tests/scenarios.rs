// Copyright 2026 The chiral-core Authors
// SPDX-License-Identifier: Apache-2.0

use chiral_core::linalg::{IDX_00, IDX_10};
use chiral_core::pulse::{Protocol, StirapParams};
use chiral_core::scenario::{export_qasm, run_scenario, sweep_trotter, ScenarioConfig};
use chiral_core::Handedness;

fn checkpoint<'a>(r: &'a chiral_core::DiscriminationReport, label: &str) -> &'a chiral_core::scenario::Checkpoint {
    r.checkpoints.iter().find(|c| c.label == label).unwrap()
}

#[test]
fn default_stap_separates_enantiomers() {
    let out = run_scenario(&ScenarioConfig::default()).unwrap();
    let fin = checkpoint(&out.report, "final");
    assert!(fin.populations_l[IDX_10] >= 0.98);
    assert!(fin.populations_r[IDX_10] <= 0.02);
    assert!(out.report.d_final >= 0.96);
    // Q stage ends at 1.25 µs, so the 1.24 µs checkpoint sits on the even split.
    let c = checkpoint(&out.report, "config_1.24");
    assert!((c.populations_l[IDX_00] - 0.52).abs() < 0.05);
    assert!((c.populations_l[IDX_10] - 0.48).abs() < 0.05);
}

#[test]
fn default_stirap_q_end_is_even_split() {
    let cfg = ScenarioConfig {
        protocol: Protocol::Stirap,
        ..Default::default()
    };
    let out = run_scenario(&cfg).unwrap();
    let q = checkpoint(&out.report, "q_end");
    for p in [q.populations_l, q.populations_r] {
        assert!((p[IDX_00] - 0.5).abs() < 0.01 && (p[IDX_10] - 0.5).abs() < 0.01);
    }
    assert!(out.report.warnings.is_empty(), "{:?}", out.report.warnings);
}

#[test]
fn discrimination_stays_in_range() {
    for protocol in [Protocol::Stirap, Protocol::Stap] {
        let out = run_scenario(&ScenarioConfig {
            protocol,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(out.report.d[0], 0.0);
        assert!(out.report.d.iter().all(|d| (0.0..=1.0).contains(d)));
    }
}

#[test]
fn shorter_stirap_discriminates_worse_than_stap() {
    let stap = run_scenario(&ScenarioConfig::default()).unwrap().report.d_final;
    let fast = ScenarioConfig {
        protocol: Protocol::Stirap,
        stirap: StirapParams::default().time_scaled(0.25),
        ..Default::default()
    };
    assert!(run_scenario(&fast).unwrap().report.d_final < stap);
}

#[test]
fn trotter_deviation_reaches_oracle_floor() {
    let cfg = ScenarioConfig {
        protocol: Protocol::Stirap,
        ..Default::default()
    };
    let t = sweep_trotter(&cfg, &[20, 12800]).unwrap();
    assert!(t.rows[0].max_deviation <= 0.05);
    assert!(t.rows[1].max_deviation < 1e-4, "{}", t.rows[1].max_deviation);
}

#[test]
fn qasm_export_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ScenarioConfig::default();
    let a = export_qasm(&cfg, &dir.path().join("a"), &Handedness::BOTH).unwrap();
    let b = export_qasm(&cfg, &dir.path().join("b"), &Handedness::BOTH).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
    }
}

#[test]
fn counts_follow_the_seed() {
    let run = |seed| {
        run_scenario(&ScenarioConfig {
            seed,
            ..Default::default()
        })
        .unwrap()
        .l
        .counts
    };
    assert_eq!(run(5), run(5));
    assert_ne!(run(5).counts, run(6).counts);
}
