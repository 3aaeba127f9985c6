//! `AQG_OUTPUT_DIR` redirection. Kept to a single test function: the variable
//! is process-global state, and the default test harness runs siblings in
//! parallel threads.

use std::env;
use std::fs;
use std::path::PathBuf;

use aqg::{parse_config, run_experiment};

struct VarGuard;

impl Drop for VarGuard {
    fn drop(&mut self) {
        env::remove_var(aqg::ENV_OUTPUT_DIR);
    }
}

fn scratch(label: &str) -> PathBuf {
    let dir = env::temp_dir().join(format!("aqg-env-{label}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    dir
}

#[test]
fn output_dir_variable_overrides_and_empty_falls_back() {
    let configured = scratch("configured");
    let redirected = scratch("redirected");
    let text = format!(
        r#"{{
            "grid": {{"n1": 16, "n2": 16, "l1": 6.283185307179586, "l2": 6.283185307179586}},
            "params": {{"mu": 1.0, "nu": 1.0, "alpha": 0.5, "beta": 0.5}},
            "solver": {{"dt": 0.001, "t_end": 0.02, "diagnostics_every": 10}},
            "diagnostics": {{"s_diag": [1.0], "p_diag": [2], "delta_list": [1]}},
            "initial_condition": {{"kind": "single_mode", "k": [1, 0], "amplitude": 1.0}},
            "output": {{"directory": {:?}, "formats": ["ndjson"]}}
        }}"#,
        configured.to_str().unwrap()
    );
    let parsed = parse_config(&text).unwrap();

    let _guard = VarGuard;
    env::set_var(aqg::ENV_OUTPUT_DIR, &redirected);
    let outcome = run_experiment(&parsed.config).unwrap();
    assert!(outcome.verdicts.all());
    assert!(redirected.join("records.ndjson").is_file());
    assert!(redirected.join("manifest.json").is_file());
    assert!(!configured.exists(), "override must fully replace the configured directory");

    // An empty value is "unset", not "write into the working directory".
    env::set_var(aqg::ENV_OUTPUT_DIR, "");
    let outcome = run_experiment(&parsed.config).unwrap();
    assert!(outcome.verdicts.all());
    assert!(configured.join("records.ndjson").is_file());

    let _ = fs::remove_dir_all(&configured);
    let _ = fs::remove_dir_all(&redirected);
}
