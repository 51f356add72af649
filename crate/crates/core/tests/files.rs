use std::path::PathBuf;

use hiclust::continuation::{ModelKind, Schedule, SolveOptions};
use hiclust::dataio::{
    emit_report, parse_csv, parse_points, parse_report, parse_tsplib, read_points, write_csv, write_report, Format,
};
use hiclust::init::{multistart, radial_search, StartSpec};
use hiclust::{Error, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn data(path: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(path)
}

#[test]
fn golden_tsplib_files() {
    let square = read_points(&data("golden/square.tsp")).unwrap();
    assert_eq!(square.format, Format::Tsplib);
    assert_eq!(square.name.as_deref(), Some("square"));
    assert_eq!(square.points.shape(), (5, 2));
    assert_eq!(square.points.row(4), &[2.0, 2.0]);

    let lines = read_points(&data("golden/lines.tsp")).unwrap();
    assert_eq!(lines.points.shape(), (4, 2));
    assert_eq!(lines.points.row(0), &[15.0, -2.0]);
    assert_eq!(lines.points.row(2), &[1e-3, 3.25]);
}

#[test]
fn golden_csv_files() {
    let plain = read_points(&data("golden/plain.csv")).unwrap();
    assert_eq!(plain.format, Format::Csv);
    let square = read_points(&data("golden/square.tsp")).unwrap();
    assert_eq!(plain.points, square.points);

    let header = read_points(&data("golden/header.csv")).unwrap();
    assert_eq!(header.points.shape(), (3, 3));
    assert_eq!(header.points.row(1), &[-100.0, 0.5, 7.0]);
}

#[test]
fn stand_in_set_is_labelled_and_complete() {
    let text = std::fs::read_to_string(data("ds18_standin.tsp")).unwrap();
    assert!(text.contains("not the published"));
    assert_eq!(parse_tsplib(&text).unwrap().points.shape(), (18, 2));
}

#[test]
fn tsplib_errors_carry_line_numbers() {
    let cases = [
        ("NAME : x\nEDGE_WEIGHT_TYPE : GEO\nNODE_COORD_SECTION\n1 0 0\n", 2),
        ("NAME : x\nNODE_COORD_SECTION\n1 0 0\n3 1 1\n", 4),
        ("NAME : x\nNODE_COORD_SECTION\n1 0 0\n2 1 y\n", 4),
        ("NAME : x\nDIMENSION : 3\nNODE_COORD_SECTION\n1 0 0\n2 1 1\nEOF\n", 3),
        ("NAME : x\nDIMENSION : 3\n", 2),
        ("NAME : x\nEDGE_WEIGHT_SECTION\n", 2),
        ("NAME : x\nNODE_COORD_SECTION\n1 0\n", 3),
    ];
    for (text, want) in cases {
        match parse_tsplib(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, want, "{text:?}"),
            other => panic!("{text:?}: expected a parse error, got {other:?}"),
        }
    }
}

#[test]
fn csv_errors_carry_line_numbers() {
    match parse_csv("x,y\n1,2\n3,4,5\n") {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    match parse_csv("1,2\n3,four\n") {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse_csv("x,y\n"), Err(Error::Parse { .. })));
    assert!(matches!(parse_csv("1,inf\n"), Err(Error::Parse { .. })));
}

#[test]
fn csv_round_trip_of_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let values: Vec<f64> = (0..5000)
        .map(|_| {
            let mag = 10f64.powi(rng.random_range(-12..12));
            rng.random_range(-1.0..1.0) * mag
        })
        .collect();
    let points = Matrix::from_vec(1000, 5, values).unwrap();
    let text = write_csv(&points);
    let back = parse_points(&text).unwrap();
    assert_eq!(back.format, Format::Csv);
    assert_eq!(back.points, points);
}

#[test]
fn report_round_trip() {
    let a = read_points(&data("ds18_standin.tsp")).unwrap().points;
    let schedule = Schedule::direct(1e-6, 2.0, 50.0, 0.5, 6, 10).unwrap();
    for model in [ModelKind::One, ModelKind::Two] {
        let report = multistart(&a, model, 2, &schedule, &[3], None, &SolveOptions::default())
            .pop()
            .unwrap()
            .unwrap();
        let text = emit_report(&report, None);
        let parsed = parse_report(&text).unwrap();
        assert!(parsed.profile.is_none());
        assert_eq!(emit_report(&parsed.report, None), text);
        assert_eq!(parsed.report.final_centers, report.final_centers);
        assert_eq!(parsed.report.snapped, report.snapped);
        assert!(text.contains("snapped_cost: "));
    }
}

#[test]
fn report_with_profile_round_trip_through_a_file() {
    let a = read_points(&data("ds18_standin.tsp")).unwrap().points;
    let schedule = Schedule::direct(1e-6, 1.0, 50.0, 0.5, 5, 10).unwrap();
    let spec = StartSpec {
        n_probes: 4,
        ..StartSpec::with_seed(2)
    };
    let search = radial_search(&a, ModelKind::Two, 2, &schedule, &spec, &SolveOptions::default()).unwrap();
    let profile = search.profile();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.txt");
    write_report(&path, search.best_report().unwrap(), Some(&profile)).unwrap();
    let parsed = parse_report(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(parsed.profile.as_deref(), Some(profile.as_slice()));
}

#[test]
fn broken_reports_are_rejected() {
    let a = read_points(&data("golden/square.tsp")).unwrap().points;
    let schedule = Schedule::direct(1e-6, 1.0, 10.0, 0.5, 2, 3).unwrap();
    let report = multistart(&a, ModelKind::One, 2, &schedule, &[0], None, &SolveOptions::default())
        .pop()
        .unwrap()
        .unwrap();
    let text = emit_report(&report, None);
    let truncated: String = text.lines().take(5).map(|l| format!("{l}\n")).collect();
    assert!(matches!(parse_report(&truncated), Err(Error::Parse { .. })));
    let tampered = text.replacen("k: 2", "k: two", 1);
    assert!(matches!(parse_report(&tampered), Err(Error::Parse { .. })));
}

#[test]
fn missing_file_is_an_io_error() {
    assert!(matches!(read_points(&data("no/such/file.tsp")), Err(Error::Io { .. })));
}
