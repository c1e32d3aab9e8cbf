use std::path::PathBuf;

use pitchseq::ingest::{fetch_events, ingest, list_matches, load_tables, save_tables, Action, ActionType, DataSource};
use pitchseq::Error;

const WSL: &str = "FA Women's Super League";

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/open_data")
}

fn seasons(s: &[&str]) -> Vec<String> {
    s.iter().map(|x| x.to_string()).collect()
}

#[test]
fn lists_the_two_fixture_matches() {
    let src = DataSource::local(fixture());
    let m = list_matches(WSL, &seasons(&["2018/2019"]), &src).unwrap();
    assert_eq!(m.iter().map(|d| d.match_id).collect::<Vec<_>>(), vec![1, 2]);
    assert_eq!(m[1].home_team_id, 10);
    assert_eq!(m[1].away_team, "Away Side");
    assert!(list_matches(WSL, &[], &src).unwrap().is_empty());
}

#[test]
fn listing_errors() {
    let src = DataSource::local(fixture());
    assert!(matches!(
        list_matches("Nowhere League", &seasons(&["2018/2019"]), &src),
        Err(Error::NotFound(_))
    ));
    assert!(matches!(
        list_matches(WSL, &seasons(&["1999/2000"]), &src),
        Err(Error::NotFound(_))
    ));
    let gone = DataSource::local(fixture().join("no_such_dir"));
    assert!(matches!(
        list_matches(WSL, &seasons(&["2018/2019"]), &gone),
        Err(Error::Network { .. })
    ));
}

#[test]
fn fetch_is_cached() {
    let src = DataSource::local(fixture());
    let cache = tempfile::tempdir().unwrap();
    let first = fetch_events(1, &src, cache.path()).unwrap();
    assert_eq!(first.len(), 5);
    assert_eq!(src.request_count(), 1);
    let second = fetch_events(1, &src, cache.path()).unwrap();
    assert_eq!(first, second);
    assert_eq!(src.request_count(), 1);
    assert!(cache.path().join("events/1.json").is_file());
}

#[test]
fn absent_match_is_not_found() {
    let src = DataSource::local(fixture());
    let cache = tempfile::tempdir().unwrap();
    assert!(matches!(fetch_events(999, &src, cache.path()), Err(Error::NotFound(_))));
    assert!(!cache.path().join("events/999.json").exists());
}

#[test]
fn malformed_payload_names_the_record() {
    let root = tempfile::tempdir().unwrap();
    std::fs::create_dir_all(root.path().join("events")).unwrap();
    std::fs::write(
        root.path().join("events/7.json"),
        r#"[{"id": "ok", "index": 1, "period": 1, "timestamp": "0", "type": {"name": "Pass"}, "team": {"id": 1}},
            {"id": "broken", "index": 2, "period": 1, "timestamp": "0", "type": {"name": "Pass"}}]"#,
    )
    .unwrap();
    let cache = tempfile::tempdir().unwrap();
    match fetch_events(7, &DataSource::local(root.path()), cache.path()) {
        Err(Error::Parse { record, .. }) => assert!(record.contains("broken"), "{record}"),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

fn act(index: usize, is_home: bool, action_type: ActionType, x: f64, y: f64) -> Action {
    Action {
        match_id: 2,
        index,
        is_home,
        action_type,
        x,
        y,
    }
}

#[test]
fn ten_event_fixture_matches_hand_conversion() {
    let src = DataSource::local(fixture());
    let cache = tempfile::tempdir().unwrap();
    let listed = list_matches(WSL, &seasons(&["2018/2019"]), &src).unwrap();
    let report = ingest(&listed[1..], &src, cache.path()).unwrap();
    let table = &report.matches[0];
    let expected = vec![
        act(0, true, ActionType::Pass, 52.5, 34.0),
        act(1, true, ActionType::Receival, 42.0, 25.5),
        act(2, true, ActionType::Dribble, 42.0, 25.5),
        act(3, true, ActionType::Cross, 63.0, 6.8),
        act(4, false, ActionType::Interception, 10.5, 37.4),
        act(5, false, ActionType::ThrowIn, 0.0, 68.0),
        act(6, true, ActionType::Shot, 105.0, 68.0),
    ];
    assert_eq!(table.actions.len(), expected.len());
    for (a, e) in table.actions.iter().zip(&expected) {
        assert_eq!(
            (a.match_id, a.index, a.is_home, a.action_type),
            (e.match_id, e.index, e.is_home, e.action_type)
        );
        assert!((a.x - e.x).abs() < 1e-9 && (a.y - e.y).abs() < 1e-9, "{a:?} vs {e:?}");
    }
    assert_eq!(table.period_starts, vec![0, 5]);
    assert_eq!(report.dropped_missing_location, 1);
}

#[test]
fn tables_round_trip_through_disk() {
    let src = DataSource::local(fixture());
    let cache = tempfile::tempdir().unwrap();
    let listed = list_matches(WSL, &seasons(&["2018/2019"]), &src).unwrap();
    let report = ingest(&listed, &src, cache.path()).unwrap();
    assert_eq!(report.action_count(), 5 + 7);
    let out = tempfile::tempdir().unwrap();
    save_tables(out.path(), &report.matches).unwrap();
    let back = load_tables(out.path()).unwrap();
    assert_eq!(back.len(), 2);
    for (a, b) in back.iter().zip(&report.matches) {
        assert_eq!(a.match_id, b.match_id);
        assert_eq!(a.period_starts, b.period_starts);
        assert_eq!(a.actions.len(), b.actions.len());
        for (x, y) in a.actions.iter().zip(&b.actions) {
            assert_eq!((x.index, x.is_home, x.action_type), (y.index, y.is_home, y.action_type));
            assert!((x.x - y.x).abs() < 1e-9 && (x.y - y.y).abs() < 1e-9);
        }
    }
}
