use dimlab_core::catalog::{verify_example, ExampleName, ExampleSpec, Tolerances};
use dimlab_core::estimate::{
    correlation_dim_gp, log_schedule, modified_correlation_dim, neighbour_counts, pair_counts, PointCloud,
};
use dimlab_core::{mix, Execution, SymbolicMeasure};

fn cloud(seed: u64) -> PointCloud {
    let mu = mix(&[0.1, 1.0], &[SymbolicMeasure::dirac(0.0), SymbolicMeasure::lebesgue(0.1, 1.0).unwrap()]).unwrap();
    mu.sample(5_000, seed).unwrap().into()
}

#[test]
fn samples_repeat_per_seed() {
    let mu = SymbolicMeasure::geometric_blocks(0.5, None).unwrap();
    assert_eq!(mu.sample(1000, 7).unwrap(), mu.sample(1000, 7).unwrap());
    assert_ne!(mu.sample(1000, 7).unwrap(), mu.sample(1000, 8).unwrap());
}

#[test]
fn estimators_ignore_the_execution_mode() {
    let pc = cloud(3);
    let rs = log_schedule(1e-1, 1e-5, 16).unwrap();
    assert_eq!(pair_counts(&pc, &rs, Execution::Serial).unwrap(), pair_counts(&pc, &rs, Execution::Parallel).unwrap());
    assert_eq!(
        neighbour_counts(&pc, &rs, Execution::Serial).unwrap(),
        neighbour_counts(&pc, &rs, Execution::Parallel).unwrap()
    );
    let json = |exec| serde_json::to_string(&correlation_dim_gp(&pc, &rs, None, exec).unwrap()).unwrap();
    assert_eq!(json(Execution::Serial), json(Execution::Parallel));
    let json = |exec| serde_json::to_string(&modified_correlation_dim(&pc, 0.05, &rs, None, exec).unwrap()).unwrap();
    assert_eq!(json(Execution::Serial), json(Execution::Parallel));
}

#[test]
fn reports_are_byte_identical() {
    let spec = ExampleSpec::new(ExampleName::Ex5).with_horizon(20);
    let run = || serde_json::to_string(&verify_example(&spec, &Tolerances::default()).unwrap()).unwrap();
    let first = run();
    assert_eq!(first, run());
    assert!(first.contains("\"passed\":true"));
}
