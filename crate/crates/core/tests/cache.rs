use std::fs;

use cusp_core::{Error, GwEngine, GwQuery};
use num_bigint::BigInt;

fn quintic() -> GwQuery {
    GwQuery::new(2, 5, vec![2; 14]).unwrap()
}

#[test]
fn absent_cache_loads_as_empty() {
    let dir = tempfile::tempdir().unwrap();
    let e = GwEngine::new();
    assert_eq!(e.load(&dir.path().join("none.cache")).unwrap(), 0);
    assert_eq!(e.stats().entries, 0);
}

#[test]
fn saved_values_come_back_as_hits() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gw.cache");
    let cold = GwEngine::new();
    assert_eq!(cold.gw_pr(&quintic()), BigInt::from(87304));
    let saved = cold.save(&path).unwrap();
    assert_eq!(saved, cold.stats().entries);

    let warm = GwEngine::new();
    assert_eq!(warm.load(&path).unwrap(), saved);
    let before = warm.stats();
    assert_eq!(warm.gw_pr(&quintic()), BigInt::from(87304));
    let after = warm.stats();
    assert_eq!(after.misses, before.misses);
    assert!(after.hits > before.hits);
    assert_eq!(warm.entries(), cold.entries());
    // no temporary files left behind
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn saving_merges_with_existing_records() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gw.cache");
    let a = GwEngine::new();
    a.gw_pr(&GwQuery::new(3, 2, vec![2; 8]).unwrap());
    a.save(&path).unwrap();
    let b = GwEngine::new();
    b.gw_pr(&GwQuery::new(2, 3, vec![2; 8]).unwrap());
    let total = b.save(&path).unwrap();
    assert_eq!(total, a.stats().entries + b.stats().entries);
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.contains("3,2,2,2,2,2,2,2,2,2=92"));
    assert!(text.contains("2,3,2,2,2,2,2,2,2,2=12"));
}

#[test]
fn corrupt_line_is_reported_and_file_kept() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gw.cache");
    let body = "2,1,2,2=1\n2,3,2,2,2,2,2,2,2,2=twelve\n";
    fs::write(&path, body).unwrap();
    let e = GwEngine::new();
    match e.load(&path) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("expected a parse error, got {other:?}"),
    }
    assert_eq!(e.stats().entries, 0);
    assert!(e.save(&path).is_err());
    assert_eq!(fs::read_to_string(&path).unwrap(), body);
}
