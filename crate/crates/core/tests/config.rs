use std::path::Path;

use motion_reasoning::io::Config;

fn shipped() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../config/default.json")
}

#[test]
fn shipped_config_equals_the_defaults() {
    assert_eq!(Config::load(&shipped()).unwrap(), Config::default());
}

#[test]
fn shipped_config_states_every_threshold() {
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(shipped()).unwrap()).unwrap();
    let r = &v["recognizer"];
    assert!(r["tau"].is_number());
    for key in ["theta_move", "window"] {
        assert!(r["segmentation"][key].is_number(), "{key}");
    }
    for key in ["prior_task", "delta_plan", "scoring_seeds"] {
        assert!(r["intent"][key].is_number(), "{key}");
    }
    for key in ["max_iterations", "step_size", "goal_bias", "rewire_radius_const", "rng_seed"] {
        assert!(r["intent"]["planner"][key].is_number(), "{key}");
    }
    assert!(v["noise"]["carry_sigma"].is_number());
    assert_eq!(v["eval"]["tau_grid"].as_array().unwrap().len(), 5);
}

#[test]
fn unknown_fields_and_wrong_schema_are_rejected() {
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(shipped()).unwrap()).unwrap();
    v["extra"] = serde_json::json!(1);
    assert!(Config::parse(&v.to_string(), Path::new("x")).is_err());
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(shipped()).unwrap()).unwrap();
    v["schema_version"] = serde_json::json!("0.1");
    assert!(Config::parse(&v.to_string(), Path::new("x")).is_err());
}
