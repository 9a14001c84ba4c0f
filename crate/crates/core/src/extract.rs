//! Method, doc comment and invocation extraction on top of tree-sitter.
//!
//! Each supported language has a [`GrammarProfile`] naming the grammar node
//! kinds that are consumed. Parsing is error tolerant: a syntax error in one
//! region does not prevent extraction of well-formed methods elsewhere.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tree_sitter::{Node, Parser, Tree};

use crate::corpus::Language;
use crate::digest::{sha256_fields, sha256_hex};
use crate::{Error, Result};

/// Grammar node kinds consumed per language.
#[derive(Debug, Clone, Copy)]
pub struct GrammarProfile {
    pub language: &'static str,
    pub method_nodes: &'static [&'static str],
    pub invocation_nodes: &'static [&'static str],
    pub comment_nodes: &'static [&'static str],
    /// Method names treated as constructors and skipped.
    pub constructor_names: &'static [&'static str],
}

pub const GRAMMAR_PROFILES: &[GrammarProfile] = &[
    GrammarProfile {
        language: "java",
        method_nodes: &["method_declaration"],
        invocation_nodes: &["method_invocation"],
        comment_nodes: &["block_comment"],
        // Java constructors are `constructor_declaration` nodes and never match.
        constructor_names: &[],
    },
    GrammarProfile {
        language: "python",
        method_nodes: &["function_definition"],
        invocation_nodes: &["call"],
        // Docstring: leading string statement of the function body.
        comment_nodes: &["string"],
        constructor_names: &["__init__"],
    },
    GrammarProfile {
        language: "php",
        method_nodes: &["method_declaration", "function_definition"],
        invocation_nodes: &[
            "function_call_expression",
            "member_call_expression",
            "nullsafe_member_call_expression",
            "scoped_call_expression",
        ],
        // Only `/* ... */` comments qualify.
        comment_nodes: &["comment"],
        constructor_names: &["__construct"],
    },
];

pub fn grammar_profile(language: &Language) -> Option<&'static GrammarProfile> {
    GRAMMAR_PROFILES
        .iter()
        .find(|p| p.language == language.as_str())
}

fn ts_language(language: &Language) -> Option<tree_sitter::Language> {
    match language {
        Language::Java => Some(tree_sitter_java::LANGUAGE.into()),
        Language::Python => Some(tree_sitter_python::LANGUAGE.into()),
        Language::Php => Some(tree_sitter_php::LANGUAGE_PHP.into()),
        Language::Other(_) => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MethodId(pub String);

impl MethodId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for MethodId {
    fn from(s: &str) -> Self {
        MethodId(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceFileRef {
    pub repo: String,
    /// `/`-separated path relative to the repository root.
    pub path: String,
    pub content_hash: String,
    pub language: Language,
}

impl SourceFileRef {
    /// Reads the file below `root`, failing if it changed since discovery.
    pub fn read(&self, root: &Path) -> Result<String> {
        let full = root.join(&self.path);
        let bytes = std::fs::read(&full).map_err(|e| Error::io(&full, e))?;
        if sha256_hex(&bytes) != self.content_hash {
            return Err(Error::Data(format!(
                "{} changed since it was discovered",
                self.path
            )));
        }
        String::from_utf8(bytes).map_err(|_| Error::Parse {
            path: self.path.clone(),
            message: "file is not valid UTF-8".into(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodRecord {
    pub method_id: MethodId,
    pub repo: String,
    pub file: String,
    pub name: String,
    pub param_count: usize,
    pub start_line: usize,
    pub end_line: usize,
    /// Lines `start_line..=end_line` of the file, joined with `\n`.
    pub body_text: String,
    pub doc_comment: Option<String>,
    pub language: Language,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvocationRecord {
    pub caller_id: MethodId,
    pub callee_name: String,
    pub arg_count: usize,
    pub site_line: usize,
    pub site_column: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FileExtraction {
    pub methods: Vec<MethodRecord>,
    pub invocations: Vec<InvocationRecord>,
}

/// `repo ∥ path ∥ name ∥ param_count ∥ start_line ∥ start_column`, truncated to 16 hex digits.
pub fn method_id(
    repo: &str,
    path: &str,
    name: &str,
    param_count: usize,
    start_line: usize,
    start_column: usize,
) -> MethodId {
    let digest = sha256_fields([
        repo,
        path,
        name,
        &param_count.to_string(),
        &start_line.to_string(),
        &start_column.to_string(),
    ]);
    MethodId(digest[..16].to_string())
}

/// Lines `start..=end` (1-based) of `content`, split on `\n` only.
pub fn line_slice(content: &str, start: usize, end: usize) -> String {
    content
        .split('\n')
        .skip(start.saturating_sub(1))
        .take(end + 1 - start)
        .collect::<Vec<_>>()
        .join("\n")
}

fn parse(language: &Language, path: &str, content: &str) -> Result<Tree> {
    let grammar = ts_language(language).ok_or_else(|| Error::Parse {
        path: path.to_string(),
        message: format!("no grammar available for language {language}"),
    })?;
    let mut parser = Parser::new();
    parser.set_language(&grammar).map_err(|e| Error::Parse {
        path: path.to_string(),
        message: e.to_string(),
    })?;
    parser.parse(content, None).ok_or_else(|| Error::Parse {
        path: path.to_string(),
        message: "parser returned no tree".into(),
    })
}

fn text<'s>(node: Node<'_>, src: &'s str) -> &'s str {
    &src[node.byte_range()]
}

fn is_comment(node: Node<'_>) -> bool {
    matches!(node.kind(), "comment" | "block_comment" | "line_comment")
}

/// Pre-order walk of `root`'s subtree.
fn for_each_descendant<'t>(root: Node<'t>, mut visit: impl FnMut(Node<'t>)) {
    let mut stack = vec![root];
    while let Some(node) = stack.pop() {
        visit(node);
        let mut cursor = node.walk();
        let children: Vec<_> = node.children(&mut cursor).collect();
        stack.extend(children.into_iter().rev());
    }
}

fn param_count(node: Node<'_>, src: &str, language: &Language) -> usize {
    let Some(params) = node.child_by_field_name("parameters") else {
        return 0;
    };
    let mut cursor = params.walk();
    let named: Vec<_> = params.named_children(&mut cursor).collect();
    match language {
        Language::Java => named
            .iter()
            .filter(|n| matches!(n.kind(), "formal_parameter" | "spread_parameter"))
            .count(),
        Language::Python => {
            let mut params: Vec<_> = named
                .iter()
                .filter(|n| {
                    !is_comment(**n)
                        && !matches!(n.kind(), "keyword_separator" | "positional_separator")
                })
                .collect();
            // The receiver is implicit at call sites.
            if params.first().is_some_and(|p| {
                p.kind() == "identifier" && matches!(text(**p, src), "self" | "cls")
            }) {
                params.remove(0);
            }
            params.len()
        }
        Language::Php => named
            .iter()
            .filter(|n| {
                matches!(
                    n.kind(),
                    "simple_parameter" | "variadic_parameter" | "property_promotion_parameter"
                )
            })
            .count(),
        Language::Other(_) => 0,
    }
}

/// Simple callee name and argument count of an invocation node.
fn invocation_target(node: Node<'_>, src: &str, language: &Language) -> Option<(String, usize)> {
    let (name_node, args) = match language {
        Language::Java => (
            node.child_by_field_name("name")?,
            node.child_by_field_name("arguments"),
        ),
        Language::Python => {
            let function = node.child_by_field_name("function")?;
            let name = match function.kind() {
                "identifier" => function,
                "attribute" => function.child_by_field_name("attribute")?,
                _ => return None,
            };
            (name, node.child_by_field_name("arguments"))
        }
        Language::Php => {
            let name = if node.kind() == "function_call_expression" {
                let function = node.child_by_field_name("function")?;
                match function.kind() {
                    "name" => function,
                    "qualified_name" => {
                        let mut cursor = function.walk();
                        function
                            .named_children(&mut cursor)
                            .filter(|c| c.kind() == "name")
                            .last()?
                    }
                    _ => return None,
                }
            } else {
                node.child_by_field_name("name")?
            };
            if name.kind() != "name" {
                return None;
            }
            (name, node.child_by_field_name("arguments"))
        }
        Language::Other(_) => return None,
    };
    let arg_count = match args {
        None => 0,
        // `f(x for x in xs)`: the generator is the single argument.
        Some(a) if a.kind() == "generator_expression" => 1,
        Some(a) => {
            let mut cursor = a.walk();
            a.named_children(&mut cursor)
                .filter(|c| !is_comment(*c))
                .count()
        }
    };
    Some((text(name_node, src).to_string(), arg_count))
}

/// Strips `/* */` delimiters and leading `*` decoration from each line.
pub fn clean_block_comment(raw: &str) -> String {
    let inner = raw.trim();
    let inner = inner.strip_suffix("*/").unwrap_or(inner);
    let inner = inner
        .strip_prefix("/**")
        .or_else(|| inner.strip_prefix("/*"))
        .unwrap_or(inner);
    tidy_lines(
        inner
            .lines()
            .map(|l| l.trim().trim_start_matches('*').trim()),
    )
}

fn clean_docstring(raw: &str) -> String {
    let s = raw.trim_start_matches(|c: char| c.is_ascii_alphabetic());
    let inner = ["\"\"\"", "'''", "\"", "'"]
        .iter()
        .find_map(|q| s.strip_prefix(q).and_then(|r| r.strip_suffix(q)))
        .unwrap_or(s);
    tidy_lines(inner.lines().map(str::trim))
}

fn tidy_lines<'a>(lines: impl Iterator<Item = &'a str>) -> String {
    let lines: Vec<&str> = lines.collect();
    let start = lines
        .iter()
        .position(|l| !l.is_empty())
        .unwrap_or(lines.len());
    let end = lines
        .iter()
        .rposition(|l| !l.is_empty())
        .map_or(start, |e| e + 1);
    lines[start..end].join("\n")
}

fn doc_comment_for(node: Node<'_>, src: &str, language: &Language) -> Option<String> {
    let cleaned = match language {
        Language::Python => {
            let body = node.child_by_field_name("body")?;
            let first = body.named_child(0)?;
            if first.kind() != "expression_statement" || first.named_child_count() != 1 {
                return None;
            }
            let string = first.named_child(0)?;
            if string.kind() != "string" {
                return None;
            }
            clean_docstring(text(string, src))
        }
        Language::Java | Language::Php => {
            let prev = node.prev_sibling()?;
            let raw = text(prev, src);
            let qualifies = match language {
                Language::Java => prev.kind() == "block_comment",
                _ => prev.kind() == "comment" && raw.starts_with("/*"),
            };
            let gap = &src[prev.end_byte()..node.start_byte()];
            if !qualifies || !gap.trim().is_empty() {
                return None;
            }
            clean_block_comment(raw)
        }
        Language::Other(_) => return None,
    };
    (!cleaned.is_empty()).then_some(cleaned)
}

fn is_method_node(node: Node<'_>, src: &str, profile: &GrammarProfile) -> Option<String> {
    if !profile.method_nodes.contains(&node.kind()) {
        return None;
    }
    let name = text(node.child_by_field_name("name")?, src);
    if name.is_empty() || profile.constructor_names.contains(&name) {
        return None;
    }
    Some(name.to_string())
}

fn grammar_for(file_path: &str, language: &Language) -> Result<&'static GrammarProfile> {
    grammar_profile(language).ok_or_else(|| Error::Parse {
        path: file_path.to_string(),
        message: format!("no grammar available for language {language}"),
    })
}

/// Extracts every method of the file together with the invocations in its body.
pub fn extract_file(file: &SourceFileRef, content: &str) -> Result<FileExtraction> {
    let profile = grammar_for(&file.path, &file.language)?;
    let tree = parse(&file.language, &file.path, content)?;
    let mut out = FileExtraction::default();
    for_each_descendant(tree.root_node(), |node| {
        let Some(name) = is_method_node(node, content, profile) else {
            return;
        };
        let start = node.start_position();
        let start_line = start.row + 1;
        let end_line = node.end_position().row + 1;
        let param_count = param_count(node, content, &file.language);
        let record = MethodRecord {
            method_id: method_id(
                &file.repo,
                &file.path,
                &name,
                param_count,
                start_line,
                start.column,
            ),
            repo: file.repo.clone(),
            file: file.path.clone(),
            name,
            param_count,
            start_line,
            end_line,
            body_text: line_slice(content, start_line, end_line),
            doc_comment: doc_comment_for(node, content, &file.language),
            language: file.language.clone(),
        };
        out.invocations
            .extend(extract_invocations(&record, node, content, profile));
        out.methods.push(record);
    });
    Ok(out)
}

/// One record per method declaration, in source order. Constructors are skipped.
pub fn extract_methods(file: &SourceFileRef, content: &str) -> Result<Vec<MethodRecord>> {
    Ok(extract_file(file, content)?.methods)
}

/// The block comment directly above `method` (whitespace only in between),
/// with delimiters and per-line decoration removed.
pub fn extract_doc_comment(content: &str, method: &MethodRecord) -> Option<String> {
    let profile = grammar_profile(&method.language)?;
    let tree = parse(&method.language, &method.file, content).ok()?;
    let mut found = None;
    for_each_descendant(tree.root_node(), |node| {
        if found.is_none()
            && node.start_position().row + 1 == method.start_line
            && is_method_node(node, content, profile).as_deref() == Some(method.name.as_str())
        {
            found = Some(doc_comment_for(node, content, &method.language));
        }
    });
    found.flatten()
}

/// Invocations anywhere in `subtree` (nested lambdas and anonymous classes
/// included), ordered by line then column.
pub fn extract_invocations(
    method: &MethodRecord,
    subtree: Node<'_>,
    src: &str,
    profile: &GrammarProfile,
) -> Vec<InvocationRecord> {
    let mut calls = Vec::new();
    for_each_descendant(subtree, |node| {
        if !profile.invocation_nodes.contains(&node.kind()) {
            return;
        }
        if let Some((callee_name, arg_count)) = invocation_target(node, src, &method.language) {
            let pos = node.start_position();
            calls.push(InvocationRecord {
                caller_id: method.method_id.clone(),
                callee_name,
                arg_count,
                site_line: pos.row + 1,
                site_column: pos.column,
            });
        }
    });
    calls.sort_by_key(|c| (c.site_line, c.site_column));
    calls
}
