use std::path::PathBuf;

use ibr_core::scenarios::{ActuatorKind, ScenarioFile, ScenarioSpec};
use ibr_core::solver::SolverConfig;

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

#[test]
fn shipped_files_match_builtin_benchmarks() {
    let beam = ScenarioFile::load(&dir().join("beam_only.toml")).unwrap();
    assert_eq!(beam.actuator, None);
    assert_eq!(beam.spec, ScenarioSpec::default());
    for kind in ActuatorKind::ALL {
        let f = ScenarioFile::load(&dir().join(format!("{kind}.toml"))).unwrap();
        assert_eq!(f.actuator, Some(kind));
        assert_eq!(f.spec, ScenarioSpec::for_kind(kind), "{kind}");
        assert_eq!(f.solver, SolverConfig::default());
    }
}
