use dualband_web::{resonator_curve, response_curve, synthesize};

const WORKED: &str = r#"{"f_low": 28e9, "f_high": 38e9, "c_p": 150e-15, "c_s": 150e-15, "l_ts": 8e-12}"#;

#[test]
fn worked_design_round_trip() {
    let d = synthesize(WORKED).unwrap();
    let r: serde_json::Value = serde_json::from_str(&response_curve(&d, 501, 20e9, 45e9).unwrap()).unwrap();
    assert_eq!(r["curve"]["values"].as_array().unwrap().len(), 501);
    assert!(r["metrics"]["suppression"].as_f64().unwrap() > 30.0);
    assert!(r["metrics"]["il_low"].as_f64().unwrap().abs() < 0.05);
}

#[test]
fn resonator_pole_at_lower_band() {
    let d = synthesize(WORKED).unwrap();
    let r: serde_json::Value = serde_json::from_str(&resonator_curve(&d, 101, 10e9, 60e9).unwrap()).unwrap();
    let poles: Vec<f64> = r["poles_hz"].as_array().unwrap().iter().map(|p| p.as_f64().unwrap()).collect();
    assert!(poles.iter().any(|p| (p - 28e9).abs() < 1e6), "{poles:?}");
}

#[test]
fn errors_are_messages() {
    assert!(synthesize(r#"{"f_low": 38e9, "f_high": 28e9, "c_p": 0, "c_s": 0}"#).is_err());
    assert!(synthesize("not json").is_err());
    let d = synthesize(WORKED).unwrap();
    assert!(response_curve(&d, 0, 20e9, 45e9).is_err());
}
