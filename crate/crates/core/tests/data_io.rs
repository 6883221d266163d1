use std::path::{Path, PathBuf};

use fair_ksupplier::data::{generate, load_tabular, GroupMode, SyntheticSpec, TabularConfig};
use fair_ksupplier::{read_instance, solve_disjoint, write_instance, Metric, SolveOptions, StartRule};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

#[test]
fn toy_fixture_matches_hand_count() {
    let data = load_tabular(&TabularConfig::from_file(fixture("toy.toml")).unwrap()).unwrap();
    let p = &data.provenance;
    // the row with a missing income is dropped
    assert_eq!((p.rows_read, p.rows_dropped, p.n), (8, 1, 7));
    // age, sex=A, sex=B, income, smoker=no, smoker=yes
    assert_eq!(p.d, 6);
    // age <= 50: 35 A, 47 B, 29 A, 50 B, 38 B
    assert_eq!(p.n_f, 5);
    assert_eq!(p.group_labels, vec!["A", "B"]);
    assert_eq!(p.group_sizes, vec![2, 3]);
    assert_eq!(data.instance.facilities(), &[0, 2, 3, 5, 6]);
    assert_eq!(data.instance.groups(), &[vec![0, 3], vec![2, 5, 6]]);
    assert_eq!(data.instance.clients().len(), 7);

    let Metric::Euclidean(ps) = data.instance.metric() else { unreachable!() };
    for i in 0..ps.len() {
        assert!(ps.point(i).iter().all(|x| (0.0..=1.0).contains(x)));
    }
    // youngest row (29) maps to 0, oldest (62) to 1
    assert_eq!(ps.point(3)[0], 0.0);
    assert_eq!(ps.point(1)[0], 1.0);
}

#[test]
fn normalized_dump_reloads_to_identical_coordinates() {
    let data = load_tabular(&TabularConfig::from_file(fixture("toy.toml")).unwrap()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("normalized.csv");
    data.write_normalized(&dump).unwrap();
    let again = load_tabular(&TabularConfig::for_source(&dump, 2)).unwrap();
    assert_eq!(data.instance.metric(), again.instance.metric());
}

#[test]
fn instance_files_round_trip_exactly() {
    let mut spec = SyntheticSpec::new(300, 4, 3, 6, 12);
    spec.group_mode = GroupMode::Overlapping { overlap_factor: 1.5 };
    let inst = generate(&spec).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("i.json");
    write_instance(&path, &inst, None).unwrap();
    let back = read_instance(&path).unwrap();
    assert_eq!(inst.metric(), back.metric());
    assert_eq!(inst.groups(), back.groups());
    assert_eq!(inst.alpha(), back.alpha());
    assert_eq!(inst.k(), back.k());
}

#[test]
fn generation_to_solution_is_deterministic() {
    let solve = || {
        let inst = generate(&SyntheticSpec::new(2000, 3, 4, 8, 99)).unwrap();
        let options = SolveOptions {
            start: StartRule::Seeded(5),
            ..SolveOptions::default()
        };
        solve_disjoint(&inst, &options).unwrap()
    };
    let (a, b) = (solve(), solve());
    assert_eq!(a.centers, b.centers);
    assert_eq!(a.cost, b.cost);
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut tabular = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        if text.contains("algorithms") {
            fair_ksupplier::bench::GridConfig::from_file(&path).unwrap();
        } else {
            TabularConfig::from_file(&path).unwrap();
            tabular += 1;
        }
    }
    assert_eq!(tabular, 15);
}
