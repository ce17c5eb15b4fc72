use std::fs;
use std::path::Path;

use knf::harness::{ExperimentSpec, SuiteConfig};

fn config(name: &str) -> String {
    fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("configs")
            .join(name),
    )
    .unwrap()
}

#[test]
fn shipped_suite_config_parses() {
    let cfg = SuiteConfig::from_toml(&config("scaling.toml")).unwrap();
    let cells = cfg.cells();
    assert_eq!(cells.len(), 9);
    for c in &cells {
        c.validate().unwrap();
        assert_eq!(
            c.solver.monitor_every * 20,
            (c.solver.t_end / c.solver.dt).round() as usize
        );
    }
}

#[test]
fn shipped_cell_spec_parses() {
    let spec = ExperimentSpec::from_toml(&config("cell.toml")).unwrap();
    spec.validate().unwrap();
    assert_eq!(spec.n0, 16);
}
