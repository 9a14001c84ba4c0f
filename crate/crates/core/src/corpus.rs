//! Repository descriptors and source file discovery.

use std::fmt;
use std::path::{Component, Path, PathBuf};

use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::digest::sha256_hex;
use crate::extract::SourceFileRef;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub enum Language {
    Java,
    Python,
    Php,
    Other(String),
}

impl Language {
    /// File extensions of the built-in language profiles.
    pub fn default_extensions(&self) -> Option<&'static [&'static str]> {
        match self {
            Language::Java => Some(&["java"]),
            Language::Python => Some(&["py"]),
            Language::Php => Some(&["php"]),
            Language::Other(_) => None,
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            Language::Java => "java",
            Language::Python => "python",
            Language::Php => "php",
            Language::Other(s) => s,
        }
    }
}

impl From<String> for Language {
    fn from(s: String) -> Self {
        match s.to_ascii_lowercase().as_str() {
            "java" => Language::Java,
            "python" => Language::Python,
            "php" => Language::Php,
            _ => Language::Other(s),
        }
    }
}

impl From<Language> for String {
    fn from(l: Language) -> Self {
        l.as_str().to_string()
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn default_branch() -> String {
    "main".to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepoDescriptor {
    pub name: String,
    pub root: PathBuf,
    #[serde(default = "default_branch")]
    pub branch: String,
    pub language: Language,
    /// Overrides the language profile's extensions (with or without the dot).
    #[serde(default)]
    pub extensions: Option<Vec<String>>,
    /// Glob patterns, matched against `/`-separated relative paths, to skip.
    #[serde(default)]
    pub exclude: Vec<String>,
}

impl RepoDescriptor {
    pub fn new(name: impl Into<String>, root: impl Into<PathBuf>, language: Language) -> Self {
        RepoDescriptor {
            name: name.into(),
            root: root.into(),
            branch: default_branch(),
            language,
            extensions: None,
            exclude: Vec::new(),
        }
    }

    fn extensions(&self) -> Result<Vec<String>> {
        match (&self.extensions, self.language.default_extensions()) {
            (Some(exts), _) => Ok(exts
                .iter()
                .map(|e| e.trim_start_matches('.').to_string())
                .collect()),
            (None, Some(exts)) => Ok(exts.iter().map(|e| e.to_string()).collect()),
            (None, None) => Err(Error::Config(format!(
                "repository {:?}: language {:?} has no built-in profile; set repos[].extensions",
                self.name,
                self.language.as_str()
            ))),
        }
    }
}

/// `/`-joined form of a relative path; `None` if it escapes its root.
fn normalized_relative(path: &Path) -> Option<String> {
    let mut parts = Vec::new();
    for component in path.components() {
        match component {
            Component::Normal(part) => parts.push(part.to_str()?.to_string()),
            Component::CurDir => {}
            _ => return None,
        }
    }
    Some(parts.join("/"))
}

/// Lists the repository's source files in lexicographic order of their
/// relative path. Symbolic links are not followed and `.git` is skipped.
pub fn discover_source_files(repo: &RepoDescriptor) -> Result<Vec<SourceFileRef>> {
    if repo.name.trim().is_empty() {
        return Err(Error::Config("repository name must be non-empty".into()));
    }
    let meta = std::fs::metadata(&repo.root).map_err(|e| Error::io(&repo.root, e))?;
    if !meta.is_dir() {
        return Err(Error::Data(format!(
            "{} is not a directory",
            repo.root.display()
        )));
    }
    let extensions = repo.extensions()?;
    let excludes = repo
        .exclude
        .iter()
        .map(|p| glob::Pattern::new(p).map_err(|e| Error::Config(format!("exclude {p:?}: {e}"))))
        .collect::<Result<Vec<_>>>()?;

    let walker = WalkDir::new(&repo.root)
        .follow_links(false)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(|e| e.depth() == 0 || e.file_name() != ".git");

    let mut files = Vec::new();
    for entry in walker {
        let entry = entry.map_err(|e| {
            let path = e
                .path()
                .map(Path::to_path_buf)
                .unwrap_or_else(|| repo.root.clone());
            Error::io(path, e.into())
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let matches_ext = entry
            .path()
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| extensions.iter().any(|x| x == e));
        if !matches_ext {
            continue;
        }
        let relative = entry
            .path()
            .strip_prefix(&repo.root)
            .ok()
            .and_then(normalized_relative)
            .ok_or_else(|| {
                Error::Data(format!(
                    "{} lies outside {}",
                    entry.path().display(),
                    repo.root.display()
                ))
            })?;
        if excludes.iter().any(|p| p.matches(&relative)) {
            continue;
        }
        let bytes = std::fs::read(entry.path()).map_err(|e| Error::io(entry.path(), e))?;
        files.push(SourceFileRef {
            repo: repo.name.clone(),
            path: relative,
            content_hash: sha256_hex(&bytes),
            language: repo.language.clone(),
        });
    }
    // walkdir sorts per directory by file name; a global sort on the joined
    // path gives the documented order regardless of separator placement.
    files.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn touch(root: &Path, rel: &str) {
        let p = root.join(rel);
        fs::create_dir_all(p.parent().unwrap()).unwrap();
        fs::write(p, format!("// {rel}\n")).unwrap();
    }

    fn paths(files: &[SourceFileRef]) -> Vec<&str> {
        files.iter().map(|f| f.path.as_str()).collect()
    }

    #[test]
    fn extension_filter() {
        let dir = tempfile::tempdir().unwrap();
        for f in ["B.java", "A.java", "readme.md"] {
            touch(dir.path(), f);
        }
        let repo = RepoDescriptor::new("demo", dir.path(), Language::Java);
        let files = discover_source_files(&repo).unwrap();
        assert_eq!(paths(&files), ["A.java", "B.java"]);
        assert!(
            files
                .iter()
                .all(|f| f.repo == "demo" && f.content_hash.len() == 64)
        );
    }

    #[test]
    fn empty_directory() {
        let dir = tempfile::tempdir().unwrap();
        let repo = RepoDescriptor::new("demo", dir.path(), Language::Java);
        assert!(discover_source_files(&repo).unwrap().is_empty());
    }

    #[test]
    fn nested_sorted_and_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), "src/y/B.java");
        touch(dir.path(), "src/x/A.java");
        touch(dir.path(), "src/x.java");
        touch(dir.path(), ".git/objects/C.java");
        let repo = RepoDescriptor::new("demo", dir.path(), Language::Java);
        let first = discover_source_files(&repo).unwrap();
        assert_eq!(
            paths(&first),
            ["src/x.java", "src/x/A.java", "src/y/B.java"]
        );
        assert_eq!(first, discover_source_files(&repo).unwrap());
    }

    #[test]
    fn excludes_and_overrides() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), "src/A.kt");
        touch(dir.path(), "test/T.kt");
        let mut repo = RepoDescriptor::new("demo", dir.path(), Language::Other("kotlin".into()));
        assert!(matches!(
            discover_source_files(&repo),
            Err(Error::Config(_))
        ));
        repo.extensions = Some(vec![".kt".into()]);
        repo.exclude = vec!["test/**".into()];
        assert_eq!(paths(&discover_source_files(&repo).unwrap()), ["src/A.kt"]);
    }

    #[test]
    fn python_and_php_profiles() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), "a.py");
        touch(dir.path(), "b.php");
        let py = RepoDescriptor::new("p", dir.path(), Language::Python);
        let php = RepoDescriptor::new("p", dir.path(), Language::Php);
        assert_eq!(paths(&discover_source_files(&py).unwrap()), ["a.py"]);
        assert_eq!(paths(&discover_source_files(&php).unwrap()), ["b.php"]);
    }

    #[cfg(unix)]
    #[test]
    fn symlinks_not_followed() {
        let outside = tempfile::tempdir().unwrap();
        touch(outside.path(), "Secret.java");
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), "A.java");
        std::os::unix::fs::symlink(outside.path(), dir.path().join("link")).unwrap();
        std::os::unix::fs::symlink(
            outside.path().join("Secret.java"),
            dir.path().join("S.java"),
        )
        .unwrap();
        let repo = RepoDescriptor::new("demo", dir.path(), Language::Java);
        assert_eq!(paths(&discover_source_files(&repo).unwrap()), ["A.java"]);
    }

    #[test]
    fn unreadable_root() {
        let repo = RepoDescriptor::new("demo", "/no/such/root", Language::Java);
        assert!(matches!(
            discover_source_files(&repo),
            Err(Error::Io { .. })
        ));
        let file = tempfile::NamedTempFile::new().unwrap();
        let repo = RepoDescriptor::new("demo", file.path(), Language::Java);
        assert!(matches!(discover_source_files(&repo), Err(Error::Data(_))));
    }

    #[test]
    fn language_serde() {
        let l: Language = serde_json::from_str("\"PHP\"").unwrap();
        assert_eq!(l, Language::Php);
        assert_eq!(serde_json::to_string(&Language::Java).unwrap(), "\"java\"");
    }

    #[test]
    fn relative_normalization() {
        assert_eq!(
            normalized_relative(Path::new("a/./b.java")).as_deref(),
            Some("a/b.java")
        );
        assert_eq!(normalized_relative(Path::new("../b.java")), None);
    }
}
