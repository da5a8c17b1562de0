use std::path::Path;

use zenobox::{Config, Experiment};

#[test]
fn shipped_presets_match_builtin_defaults() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("presets");
    for e in Experiment::ALL {
        let cfg = Config::from_path(&dir.join(format!("{}.toml", e.name()))).unwrap();
        assert_eq!(cfg, Config::preset(e), "{}", e.name());
        assert_eq!(cfg.hash(), Config::preset(e).hash());
    }
}

#[test]
fn fractal_presets_avoid_rational_revival_times() {
    // omitted times fall back to an irrational fraction of the revival period
    for e in [Experiment::BerrySpatial, Experiment::ZenoCutoff] {
        let cfg = Config::preset(e);
        let period = cfg.physics.kernel(0.0).unwrap().revival_time();
        let frac = cfg.physics.irrational_time() / period;
        for q in 1..=64u32 {
            let p = (frac * q as f64).round();
            assert!((frac * q as f64 - p).abs() > 1e-3, "{frac} is near {p}/{q}");
        }
    }
}
