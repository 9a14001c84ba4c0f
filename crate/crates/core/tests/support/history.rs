//! A scripted three-commit repository with hand-verified method histories.

use std::path::Path;
use std::process::Command;

use helpcom_core::corpus::{Language, RepoDescriptor, discover_source_files};
use helpcom_core::extract::{MethodRecord, extract_file};
use helpcom_core::history::{EngagementField, engagement_summary, mine_repository};

pub const A_V1: &str = "class A {
    int one() {
        return 1;
    }

    int two() {
        return 2;
    }

    int three() {
        return 3;
    }
}
";

pub const B_V3: &str = "class B {
    int four() {
        return 4;
    }
}
";

pub fn git(dir: &Path, args: &[&str], email: &str) {
    let status = Command::new("git")
        .current_dir(dir)
        .args(args)
        .env("GIT_AUTHOR_NAME", email)
        .env("GIT_AUTHOR_EMAIL", email)
        .env("GIT_COMMITTER_NAME", email)
        .env("GIT_COMMITTER_EMAIL", email)
        .env("GIT_CONFIG_GLOBAL", "/dev/null")
        .env("GIT_CONFIG_NOSYSTEM", "1")
        .status()
        .unwrap();
    assert!(status.success(), "git {args:?}");
}

pub fn commit(dir: &Path, email: &str, message: &str) {
    git(dir, &["add", "-A"], email);
    git(dir, &["commit", "-q", "-m", message], email);
}

pub fn scripted_repo(dir: &Path) {
    git(dir, &["init", "-q", "-b", "main"], "a@example.com");
    std::fs::write(dir.join("A.java"), A_V1).unwrap();
    commit(dir, "a@example.com", "add A");
    let v2 = A_V1
        .replace("return 2;", "return 22;")
        .replace("return 3;", "return 33;");
    std::fs::write(dir.join("A.java"), &v2).unwrap();
    commit(dir, "B@Example.com", "edit two and three");
    std::fs::write(dir.join("A.java"), v2.replace("return 33;", "return 333;")).unwrap();
    std::fs::write(dir.join("B.java"), B_V3).unwrap();
    commit(dir, "a@example.com", "edit three, add B");
}

pub fn methods(repo: &RepoDescriptor) -> Vec<MethodRecord> {
    discover_source_files(repo)
        .unwrap()
        .iter()
        .flat_map(|f| {
            extract_file(f, &f.read(&repo.root).unwrap())
                .unwrap()
                .methods
        })
        .collect()
}

pub fn check_counts_commits_and_authors_per_method() {
    let dir = tempfile::tempdir().unwrap();
    scripted_repo(dir.path());
    let repo = RepoDescriptor::new("demo", dir.path(), Language::Java);
    let methods = methods(&repo);
    assert_eq!(methods.len(), 4);

    let history = mine_repository(&repo, &methods).unwrap();
    let got: Vec<(&str, usize, usize)> = methods
        .iter()
        .zip(&history)
        .map(|(m, h)| {
            assert_eq!(m.method_id, h.method_id);
            (m.name.as_str(), h.commit_count, h.author_count)
        })
        .collect();
    assert_eq!(
        got,
        [
            ("one", 1, 1),
            ("two", 2, 2),
            ("three", 3, 2),
            ("four", 1, 1)
        ]
    );

    let commits = engagement_summary(&history, EngagementField::Commits).unwrap();
    assert_eq!(
        (commits.n, commits.mean, commits.min, commits.max),
        (4, 1.75, 1.0, 3.0)
    );
    let authors = engagement_summary(&history, EngagementField::Authors).unwrap();
    assert_eq!(authors.mean, 1.5);
}

pub fn check_non_repository_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("A.java"), A_V1).unwrap();
    let repo = RepoDescriptor::new("demo", dir.path(), Language::Java);
    let methods = methods(&repo);
    assert!(mine_repository(&repo, &methods).is_err());
}
