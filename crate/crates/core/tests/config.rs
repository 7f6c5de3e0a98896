use friendly_wigner::cli::parse_config;
use friendly_wigner::experiment::{parse_amplitude, ConfigError, ProtocolConfig, TimePoint};
use std::path::Path;

fn default_toml() -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/default.toml")).unwrap()
}

#[test]
fn shipped_default_matches_builtin() {
    let cfg = ProtocolConfig::from_toml_str(&default_toml()).unwrap();
    let builtin = ProtocolConfig::default();
    assert!((cfg.a_heads - builtin.a_heads).abs() < 1e-15);
    assert!((cfg.a_tails - builtin.a_tails).abs() < 1e-15);
    assert_eq!(cfg.time_labels, builtin.time_labels);
}

#[test]
fn missing_file_with_default_flag() {
    let cfg = parse_config(Some(Path::new("/nonexistent/x.toml")), true).unwrap();
    assert!((cfg.a_heads - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
    assert!(matches!(
        parse_config(Some(Path::new("/nonexistent/x.toml")), false),
        Err(ConfigError::Io { .. })
    ));
    assert_eq!(parse_config(None, false).unwrap(), ProtocolConfig::default());
}

#[test]
fn normalization_is_validated() {
    let e = ProtocolConfig::from_toml_str("[initial]\nheads = \"sqrt:0.5\"\ntails = \"sqrt:0.4\"\n").unwrap_err();
    match e {
        ConfigError::Validation { field, constraint } => {
            assert_eq!(field, "initial");
            assert!(constraint.contains("normalization"), "{constraint}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn sqrt_literal() {
    assert!((parse_amplitude("sqrt:1/3").unwrap() - 0.5773502692).abs() < 1e-9);
    assert!((parse_amplitude("-sqrt:1/2").unwrap() + 0.5f64.sqrt()).abs() < 1e-15);
    assert!(parse_amplitude("sqrt:-1").is_err());
}

#[test]
fn parse_errors_carry_position() {
    let e = ProtocolConfig::from_toml_str("[initial]\nheads = \n").unwrap_err();
    match e {
        ConfigError::Parse { line, column, .. } => {
            assert_eq!(line, 2);
            assert!(column >= 1);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn non_orthonormal_basis_names_the_field() {
    let text = "[bases.w]\nok = [1, 0]\nfails = [\"sqrt:1/2\", \"sqrt:1/2\"]\n";
    let e = ProtocolConfig::from_toml_str(text).unwrap_err();
    assert!(e.to_string().contains("orthonormal"), "{e}");
}

#[test]
fn time_labels_override() {
    let cfg = ProtocolConfig::from_toml_str("[time_labels]\nf_measures = \"t1\"\n").unwrap();
    assert_eq!(cfg.time_labels.f_measures, TimePoint::T1);
}
