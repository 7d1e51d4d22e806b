//! Every shipped preset is a documented claim: it must parse, run cleanly
//! under the default conformance checks, and reach its stated target gap
//! within its iteration budget. This keeps the presets honest as living
//! documentation of what the solvers achieve.

use ahpe::harness::{preset, run_experiment, PRESETS};

#[test]
fn every_preset_meets_its_documented_target() {
    for (name, _, _) in PRESETS {
        let cfg = preset(name).unwrap_or_else(|e| panic!("preset {name} failed to parse: {e}"));
        let target = cfg
            .run
            .target_gap
            .unwrap_or_else(|| panic!("preset {name} ships without a target gap"));
        let out = run_experiment(&cfg).unwrap_or_else(|e| panic!("preset {name} failed: {e}"));
        assert!(
            out.diagnostics.stopped_at_target,
            "preset {name} missed its target {target:.1e}: final gap {:.3e} after {} iterations",
            out.records.last().unwrap().f_gap,
            out.records.last().unwrap().k,
        );
        let hit = out.records.iter().find(|r| r.f_gap <= target).unwrap().k;
        println!("preset {name}: gap {target:.1e} reached at k = {hit}");
    }
}

#[test]
fn preset_listing_is_complete_and_described() {
    assert_eq!(PRESETS.len(), 7);
    for (name, description, text) in PRESETS {
        assert!(!description.is_empty(), "preset {name} has no description");
        // Embedded copies are the files under presets/; both must stay valid.
        assert!(text.contains("[run]"), "preset {name} text looks truncated");
    }
}
