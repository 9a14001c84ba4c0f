#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

pub fn cli(config: &Path, run_id: &str, args: &[&str]) -> (i32, String) {
    let mut argv = vec![
        "helpcom",
        "--config",
        config.to_str().unwrap(),
        "--run-id",
        run_id,
    ];
    argv.extend_from_slice(args);
    let mut out = Vec::new();
    let code = helpcom::run(argv, &mut out);
    (code, String::from_utf8(out).unwrap())
}

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(rel)
}

/// Writes `helpcom.toml` into `dir` with one Java repository and `extra` appended.
pub fn write_config(dir: &Path, repo_root: &Path, extra: &str) -> PathBuf {
    let path = dir.join("helpcom.toml");
    let text = format!(
        "[[repos]]\nname = \"demo\"\nroot = {:?}\nlanguage = \"java\"\n\n[store]\nruns_dir = \"runs\"\n\n{extra}",
        repo_root.to_str().unwrap()
    );
    std::fs::write(&path, text).unwrap();
    path
}

pub fn run_dir(config: &Path, run_id: &str) -> PathBuf {
    config.parent().unwrap().join("runs").join(run_id)
}

pub fn lines(path: &Path) -> usize {
    std::fs::read_to_string(path).unwrap().lines().count()
}

pub fn git(dir: &Path, args: &[&str], email: &str) {
    let status = Command::new("git")
        .current_dir(dir)
        .args(args)
        .env("GIT_AUTHOR_NAME", email)
        .env("GIT_AUTHOR_EMAIL", email)
        .env("GIT_COMMITTER_NAME", email)
        .env("GIT_COMMITTER_EMAIL", email)
        .env("GIT_AUTHOR_DATE", "2024-01-01T00:00:00Z")
        .env("GIT_COMMITTER_DATE", "2024-01-01T00:00:00Z")
        .env("GIT_CONFIG_GLOBAL", "/dev/null")
        .env("GIT_CONFIG_NOSYSTEM", "1")
        .status()
        .unwrap();
    assert!(status.success(), "git {args:?} failed");
}

pub fn commit_all(dir: &Path, email: &str, message: &str) {
    git(dir, &["add", "-A"], email);
    git(dir, &["commit", "-q", "-m", message], email);
}

/// Copies a fixture tree into `dst` and commits it as a single-commit repository.
pub fn git_copy(src: &Path, dst: &Path) {
    copy_tree(src, dst);
    git(dst, &["init", "-q", "-b", "main"], "dev@example.com");
    commit_all(dst, "dev@example.com", "import");
}

fn copy_tree(src: &Path, dst: &Path) {
    std::fs::create_dir_all(dst).unwrap();
    for entry in std::fs::read_dir(src).unwrap() {
        let entry = entry.unwrap();
        let target = dst.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            copy_tree(&entry.path(), &target);
        } else {
            std::fs::copy(entry.path(), target).unwrap();
        }
    }
}
