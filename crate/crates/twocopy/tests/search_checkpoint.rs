use std::fs;

use twocopy::search::{search_all_wirings, SearchConfig, SearchError, SearchOutcome, SearchReport};

fn small(workers: usize) -> SearchConfig {
    SearchConfig {
        grid_points: 11,
        workers,
        block_size: 16,
        alice_limit: Some(200),
        ..SearchConfig::default()
    }
}

fn complete(config: &SearchConfig) -> SearchReport {
    match search_all_wirings(config).unwrap() {
        SearchOutcome::Complete(r) => r,
        SearchOutcome::Interrupted(p) => panic!("interrupted at {p:?}"),
    }
}

fn json(r: &SearchReport) -> String {
    serde_json::to_string_pretty(r).unwrap()
}

#[test]
fn first_hundred_classes_do_not_purify() {
    let r = complete(&SearchConfig {
        alice_limit: Some(100),
        ..small(2)
    });
    assert_eq!(r.total_pairs, 100 * 36_864);
    assert_eq!(r.deduped_party_count, 36_864);
    assert_eq!(r.enumerated_party_count, 65_536);
    assert!(r.no_purification(1e-12));
    assert_eq!(r.grid.len(), 11);
    assert!(r.grid.iter().all(|&p| p > 0.75 && p <= 1.0));
}

#[test]
fn report_does_not_depend_on_worker_count() {
    let one = complete(&small(1));
    let four = complete(&small(4));
    assert_eq!(json(&one), json(&four));
    assert_eq!(one.witness.alice, "0x00000000");
}

#[test]
fn resume_reproduces_full_run() {
    let full = complete(&small(3));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("search.json");
    let partial = SearchConfig {
        checkpoint: Some(path.clone()),
        max_new_blocks: Some(5),
        ..small(2)
    };
    match search_all_wirings(&partial).unwrap() {
        SearchOutcome::Interrupted(p) => {
            assert!(p.blocks_done >= 5 && p.blocks_done < p.blocks_total, "{p:?}");
        }
        SearchOutcome::Complete(_) => panic!("budget ignored"),
    }
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.contains("\"schema_version\": 1"));
    let resumed = complete(&SearchConfig {
        checkpoint: Some(path.clone()),
        ..small(1)
    });
    assert_eq!(json(&resumed), json(&full));
    // A finished checkpoint resumes to the same report without new work.
    let again = complete(&SearchConfig {
        checkpoint: Some(path),
        ..small(1)
    });
    assert_eq!(json(&again), json(&full));
}

#[test]
fn corrupt_checkpoint_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("search.json");
    fs::write(&path, "{ not json").unwrap();
    let config = SearchConfig {
        checkpoint: Some(path.clone()),
        ..small(1)
    };
    let err = search_all_wirings(&config).unwrap_err();
    assert!(matches!(err, SearchError::CorruptCheckpoint { .. }), "{err}");
    assert!(err.to_string().contains("corrupt"));

    // Valid JSON whose bitmap disagrees with the stored partial result.
    search_all_wirings(&SearchConfig {
        max_new_blocks: Some(2),
        ..SearchConfig {
            checkpoint: Some(dir.path().join("good.json")),
            ..small(1)
        }
    })
    .unwrap();
    let good = fs::read_to_string(dir.path().join("good.json")).unwrap();
    let tampered = good.replacen("\"completed\": \"11", "\"completed\": \"10", 1);
    assert_ne!(good, tampered);
    fs::write(&path, tampered).unwrap();
    let err = search_all_wirings(&config).unwrap_err();
    assert!(matches!(err, SearchError::CorruptCheckpoint { .. }), "{err}");

    let short = good.replacen("\"completed\": \"11", "\"completed\": \"1", 1);
    fs::write(&path, short).unwrap();
    assert!(matches!(
        search_all_wirings(&config).unwrap_err(),
        SearchError::CorruptCheckpoint { .. }
    ));
}

#[test]
fn checkpoint_from_other_configuration_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("search.json");
    search_all_wirings(&SearchConfig {
        checkpoint: Some(path.clone()),
        max_new_blocks: Some(1),
        ..small(1)
    })
    .unwrap();
    let err = search_all_wirings(&SearchConfig {
        checkpoint: Some(path),
        grid_points: 21,
        ..small(1)
    })
    .unwrap_err();
    assert!(matches!(err, SearchError::CheckpointMismatch { .. }), "{err}");
}

#[test]
fn invalid_configuration_is_rejected() {
    for config in [
        SearchConfig { workers: 0, ..small(1) },
        SearchConfig { grid_points: 1, ..small(1) },
        SearchConfig { block_size: 0, ..small(1) },
    ] {
        assert!(matches!(
            search_all_wirings(&config).unwrap_err(),
            SearchError::InvalidConfig(_)
        ));
    }
}
