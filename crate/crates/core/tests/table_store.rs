use latpoly::enumeration::{count, Constraint, EnsembleSpec};
use latpoly::io::{CountTable, TableKey, TableStore};
use latpoly::Error;

fn tree_table(max_n: usize) -> CountTable {
    let mut t = CountTable::default();
    for n in 1..=max_n {
        let s = EnsembleSpec::trees(2, n, Constraint::TranslationClasses);
        t.insert(TableKey::from(&s), count(&s).unwrap()).unwrap();
    }
    t
}

#[test]
fn tree_table_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trees.txt");
    let t = tree_table(8);
    t.save(&path).unwrap();
    assert_eq!(CountTable::load(&path).unwrap(), t);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("tree site 2 8 translation-classes 6986\n"), "{text}");
}

#[test]
fn edited_file_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trees.txt");
    tree_table(4).save(&path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap().replace(" 22\n", " 23\n");
    std::fs::write(&path, text).unwrap();
    assert!(matches!(CountTable::load(&path), Err(Error::Table(_))));
    assert!(TableStore::open(&path).is_err());
}

#[test]
fn missing_entries_are_computed_then_persisted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("store.txt");
    let spec = EnsembleSpec::walks(2, 5, Constraint::ContainsOrigin);
    let mut store = TableStore::open(&path).unwrap();
    assert!(store.table().get(&spec).is_none());
    assert_eq!(store.get_or_compute(&spec).unwrap(), 284u32.into());
    let reopened = CountTable::load(&path).unwrap();
    assert_eq!(reopened.get(&spec), Some(&284u32.into()));
}

#[test]
fn merge_of_conflicting_tables_fails() {
    let mut a = tree_table(3);
    let mut b = CountTable::default();
    let key = TableKey::from(&EnsembleSpec::trees(2, 3, Constraint::TranslationClasses));
    b.insert(key, 7u32.into()).unwrap();
    assert!(matches!(a.merge(&b), Err(Error::Table(_))));
}
