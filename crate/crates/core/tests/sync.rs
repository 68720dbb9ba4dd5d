mod common;

use std::fs;
use std::thread;
use std::time::Duration;

use common::write_files;
use kfc_core::ingest::{
    compute_file_signature, sync_directory, watch_directory, Modality, StopSignal, SyncConfig,
};
use kfc_core::{search, Container, Mode, SearchOptions};

fn setup() -> (tempfile::TempDir, std::path::PathBuf, Container) {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("docs");
    fs::create_dir(&root).unwrap();
    let c = Container::create(dir.path().join("kb.kfc")).unwrap();
    (dir, root, c)
}

#[test]
fn cold_then_noop_then_single_edit() {
    let (_dir, root, mut c) = setup();
    write_files(
        &root,
        &[("a.txt", "alpha report"), ("b.md", "# beta\n\nnotes"), ("sub/c.txt", "gamma")],
    );
    let cfg = SyncConfig::default();

    let cold = sync_directory(&mut c, &root, &cfg).unwrap();
    assert_eq!((cold.scanned, cold.added, cold.updated, cold.skipped), (3, 3, 0, 0));
    assert!(cold.failed.is_empty());
    assert!(c.document("sub/c.txt").unwrap().is_some());

    let commits = c.commit_count();
    let again = sync_directory(&mut c, &root, &cfg).unwrap();
    assert_eq!((again.added, again.updated, again.skipped), (0, 0, 3));
    assert_eq!(c.commit_count(), commits);

    fs::write(root.join("a.txt"), "alpha report, revised").unwrap();
    let edit = sync_directory(&mut c, &root, &cfg).unwrap();
    assert_eq!((edit.added, edit.updated, edit.skipped), (0, 1, 2));
    assert_eq!(c.commit_count(), commits + 1);
    assert_eq!(c.documents().unwrap().len(), 3);
    c.verify().unwrap();
}

#[test]
fn stored_signature_matches_file_hash() {
    let (_dir, root, mut c) = setup();
    write_files(&root, &[("a.txt", "abc")]);
    sync_directory(&mut c, &root, &SyncConfig::default()).unwrap();
    let rec = c.document("a.txt").unwrap().unwrap();
    assert_eq!(rec.signature, compute_file_signature(&root.join("a.txt")).unwrap());
    assert_eq!(
        rec.signature.to_hex(),
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
    );
    assert_eq!(rec.modality, Modality::PlainText);
    assert_eq!(rec.size_bytes, 3);
}

#[test]
fn touch_without_content_change_is_skipped_and_one_byte_is_not() {
    let (_dir, root, mut c) = setup();
    write_files(&root, &[("a.txt", "same bytes here")]);
    let cfg = SyncConfig::default();
    sync_directory(&mut c, &root, &cfg).unwrap();

    // Rewrite identical bytes: new mtime, same hash.
    thread::sleep(Duration::from_millis(20));
    fs::write(root.join("a.txt"), "same bytes here").unwrap();
    let r = sync_directory(&mut c, &root, &cfg).unwrap();
    assert_eq!((r.updated, r.skipped), (0, 1));

    fs::write(root.join("a.txt"), "same bytes herf").unwrap();
    let r = sync_directory(&mut c, &root, &cfg).unwrap();
    assert_eq!((r.updated, r.skipped), (1, 0));
}

#[test]
fn k_mutations_commit_exactly_k() {
    let (_dir, root, mut c) = setup();
    let files: Vec<(String, String)> = (0..40)
        .map(|i| (format!("f{i:02}.txt"), format!("file number {i} body text")))
        .collect();
    for (p, b) in &files {
        fs::write(root.join(p), b).unwrap();
    }
    let cfg = SyncConfig::default();
    sync_directory(&mut c, &root, &cfg).unwrap();
    for (round, k) in [1usize, 7, 13].into_iter().enumerate() {
        for (p, b) in files.iter().take(k) {
            fs::write(root.join(p), format!("{b} edit {round}")).unwrap();
        }
        let before = c.commit_count();
        let r = sync_directory(&mut c, &root, &cfg).unwrap();
        assert_eq!(r.updated, k as u64);
        assert_eq!(r.skipped, 40 - k as u64);
        assert_eq!(c.commit_count() - before, k as u64);
    }
}

#[test]
fn deleted_files_are_kept_unless_pruning() {
    let (_dir, root, mut c) = setup();
    write_files(&root, &[("keep.txt", "keep"), ("gone.txt", "gone soon")]);
    sync_directory(&mut c, &root, &SyncConfig::default()).unwrap();
    fs::remove_file(root.join("gone.txt")).unwrap();

    let r = sync_directory(&mut c, &root, &SyncConfig::default()).unwrap();
    assert_eq!(r.removed, 0);
    assert!(c.document("gone.txt").unwrap().is_some());

    let prune = SyncConfig {
        prune: true,
        ..SyncConfig::default()
    };
    let r = sync_directory(&mut c, &root, &prune).unwrap();
    assert_eq!((r.removed, r.skipped), (1, 1));
    assert!(c.document("gone.txt").unwrap().is_none());
    assert!(c.vocabulary().unwrap().iter().all(|v| v.term != "soon"));
    c.verify().unwrap();
}

#[test]
fn filters_hidden_and_oversize_files() {
    let (_dir, root, mut c) = setup();
    write_files(
        &root,
        &[
            ("a.txt", "visible"),
            ("notes/b.md", "markdown"),
            ("skip/c.txt", "excluded"),
            (".hidden/d.txt", "hidden dir"),
            (".e.txt", "hidden file"),
            ("big.txt", &"x".repeat(500)),
        ],
    );
    let cfg = SyncConfig {
        include_globs: vec!["**/*.txt".into(), "**/*.md".into()],
        exclude_globs: vec!["skip/**".into()],
        max_file_bytes: 100,
        ..SyncConfig::default()
    };
    let r = sync_directory(&mut c, &root, &cfg).unwrap();
    let mut paths: Vec<String> = c.documents().unwrap().into_iter().map(|d| d.source_path).collect();
    paths.sort();
    assert_eq!(paths, vec!["a.txt", "notes/b.md"]);
    assert_eq!(r.scanned, 2);

    let with_hidden = SyncConfig {
        include_hidden: true,
        ..SyncConfig::default()
    };
    sync_directory(&mut c, &root, &with_hidden).unwrap();
    assert!(c.document(".hidden/d.txt").unwrap().is_some());
    assert!(c.document("big.txt").unwrap().is_some());
}

#[test]
fn bad_glob_is_rejected() {
    let (_dir, root, mut c) = setup();
    let cfg = SyncConfig {
        include_globs: vec!["a[".into()],
        ..SyncConfig::default()
    };
    assert!(sync_directory(&mut c, &root, &cfg).unwrap_err().is_usage());
}

#[test]
fn missing_root_is_an_io_error() {
    let (dir, _root, mut c) = setup();
    let err = sync_directory(&mut c, &dir.path().join("nope"), &SyncConfig::default()).unwrap_err();
    assert!(!err.is_usage());
}

#[test]
fn per_file_failures_do_not_stop_the_pass() {
    let (_dir, root, mut c) = setup();
    write_files(
        &root,
        &[
            ("bad.json", "{\"unterminated\": "),
            ("scan.pdf", "%PDF-1.7 binary"),
            ("good.txt", "fine"),
        ],
    );
    let r = sync_directory(&mut c, &root, &SyncConfig::default()).unwrap();
    assert_eq!(r.added, 1);
    assert_eq!(r.scanned, 3);
    let mut failed: Vec<&str> = r.failed.iter().map(|f| f.path.as_str()).collect();
    failed.sort();
    assert_eq!(failed, vec!["bad.json", "scan.pdf"]);
    assert!(r.failed.iter().all(|f| !f.reason.is_empty()));
}

#[test]
fn structured_files_keep_their_keys_searchable() {
    let (_dir, root, mut c) = setup();
    write_files(
        &root,
        &[
            ("orders.csv", "customer,total\nAcme,120\nGlobex,75\n"),
            ("cfg.json", r#"{"service": {"region": "north-east"}}"#),
        ],
    );
    sync_directory(&mut c, &root, &SyncConfig::default()).unwrap();
    let hits = search(&c, "customer: Globex", &SearchOptions::default()).unwrap();
    assert_eq!(hits[0].source_path, "orders.csv");
    assert!(hits[0].boosted);
    let hits = search(&c, "service.region: north-east", &SearchOptions::default()).unwrap();
    assert_eq!(hits[0].source_path, "cfg.json");
    assert!(hits[0].boosted);
}

#[test]
fn watch_runs_passes_until_stopped() {
    let (dir, root, c) = setup();
    write_files(&root, &[("a.txt", "first")]);
    drop(c);
    let path = dir.path().join("kb.kfc");
    let stop = StopSignal::new();

    let watcher_stop = stop.clone();
    let watcher_path = path.clone();
    let watcher_root = root.clone();
    let handle = thread::spawn(move || {
        let mut c = Container::open(&watcher_path, Mode::ReadWrite).unwrap();
        let mut reports = Vec::new();
        let mut w = watch_directory(
            &mut c,
            &watcher_root,
            SyncConfig::default(),
            Duration::from_millis(40),
            watcher_stop,
        );
        for r in &mut w {
            reports.push(r.unwrap());
        }
        (reports, w.passes())
    });

    let reader = Container::open(&path, Mode::ReadOnly).unwrap();
    let wait_for = |n: u64| {
        for _ in 0..200 {
            if reader.stats().unwrap().documents == n {
                return;
            }
            thread::sleep(Duration::from_millis(10));
        }
        panic!("container never reached {n} documents");
    };
    wait_for(1);
    write_files(&root, &[("b.txt", "second")]);
    wait_for(2);
    stop.stop();

    let (reports, passes) = handle.join().unwrap();
    assert_eq!(reports.len() as u64, passes);
    assert!(passes >= 2);
    assert_eq!(reports[0].added, 1);
    assert_eq!(reports.iter().map(|r| r.added).sum::<u64>(), 2);
}

#[test]
fn stop_before_first_pass_yields_nothing() {
    let (_dir, root, mut c) = setup();
    let stop = StopSignal::new();
    stop.stop();
    let mut w = watch_directory(&mut c, &root, SyncConfig::default(), Duration::from_secs(60), stop);
    assert!(w.next().is_none());
}
