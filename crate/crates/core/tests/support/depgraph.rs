//! Hand-derived ground truth for the dependency fixture repository.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use helpcom_core::corpus::{Language, RepoDescriptor, discover_source_files};
use helpcom_core::extract::{InvocationRecord, MethodId, MethodRecord, extract_file};
use helpcom_core::graph::{
    ClosureMode, DepClass, DependencyGraph, ResolutionStatus, build_index, dependency_stats,
};
use serde_json::Value;

pub fn fixture() -> PathBuf {
    super::core_dir().join("tests/fixtures/depgraph")
}

pub fn load() -> (Vec<MethodRecord>, Vec<InvocationRecord>) {
    let repo = RepoDescriptor::new("demo", fixture(), Language::Java);
    let mut methods = Vec::new();
    let mut invocations = Vec::new();
    for file in discover_source_files(&repo).unwrap() {
        let content = file.read(&repo.root).unwrap();
        let fx = extract_file(&file, &content).unwrap();
        methods.extend(fx.methods);
        invocations.extend(fx.invocations);
    }
    (methods, invocations)
}

pub fn key(m: &MethodRecord) -> String {
    format!("{}:{}/{}", m.file, m.name, m.param_count)
}

pub fn expected() -> Value {
    let text = std::fs::read_to_string(fixture().join("expected.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

pub fn check_classification_and_closures_match_ground_truth() {
    let (methods, invocations) = load();
    let keys: BTreeMap<MethodId, String> = methods
        .iter()
        .map(|m| (m.method_id.clone(), key(m)))
        .collect();
    let by_key: BTreeMap<String, MethodId> =
        keys.iter().map(|(id, k)| (k.clone(), id.clone())).collect();
    let exp = expected();

    assert_eq!(methods.len() as u64, exp["methods"].as_u64().unwrap());
    assert_eq!(by_key.len(), methods.len(), "fixture keys must be unique");

    let graph = DependencyGraph::build(build_index(methods.clone()), &invocations).unwrap();
    let classes = graph.classify();
    let got: BTreeMap<String, &str> = classes
        .iter()
        .map(|(id, c)| {
            let label = match c {
                DepClass::Dependent => "dependent",
                DepClass::Independent => "independent",
            };
            (keys[id].clone(), label)
        })
        .collect();
    let want: BTreeMap<String, &str> = exp["classes"]
        .as_object()
        .unwrap()
        .iter()
        .map(|(k, v)| (k.clone(), v.as_str().unwrap()))
        .collect();
    assert_eq!(got, want);

    let stats = dependency_stats(&classes).unwrap();
    assert_eq!(
        stats.n_dependent as u64,
        exp["n_dependent"].as_u64().unwrap()
    );
    assert_eq!(
        stats.n_independent as u64,
        exp["n_independent"].as_u64().unwrap()
    );
    assert!((stats.pct_dependent - exp["pct_dependent"].as_f64().unwrap()).abs() <= 0.01);
    assert!((stats.pct_independent - exp["pct_independent"].as_f64().unwrap()).abs() <= 0.01);

    for (mode, field, amb_field) in [
        (
            ClosureMode::Immediate,
            "immediate",
            "immediate_has_ambiguity",
        ),
        (ClosureMode::Full, "full", "full_has_ambiguity"),
    ] {
        let ambiguous: BTreeSet<&str> = exp[amb_field]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_str().unwrap())
            .collect();
        let want = exp[field].as_object().unwrap();
        let dependent: Vec<&MethodId> = classes
            .iter()
            .filter(|(_, c)| **c == DepClass::Dependent)
            .map(|(id, _)| id)
            .collect();
        assert_eq!(
            dependent.len(),
            want.len(),
            "{field}: one chain per dependent method"
        );
        for id in dependent {
            let chain = graph.helper_closure(id, mode).unwrap();
            let got: Vec<(String, u64, String)> = chain
                .entries
                .iter()
                .map(|e| {
                    (
                        keys[&e.helper_id].clone(),
                        e.depth as u64,
                        keys[&e.parent_id].clone(),
                    )
                })
                .collect();
            let want: Vec<(String, u64, String)> = want[&keys[id]]
                .as_array()
                .unwrap()
                .iter()
                .map(|e| {
                    (
                        e[0].as_str().unwrap().to_string(),
                        e[1].as_u64().unwrap(),
                        e[2].as_str().unwrap().to_string(),
                    )
                })
                .collect();
            assert_eq!(got, want, "{field} chain of {}", keys[id]);
            assert_eq!(
                chain.has_ambiguity,
                ambiguous.contains(keys[id].as_str()),
                "{field} {}",
                keys[id]
            );
        }
    }

    for id in classes
        .iter()
        .filter(|(_, c)| **c == DepClass::Independent)
        .map(|(id, _)| id)
    {
        assert!(graph.helper_closure(id, ClosureMode::Full).is_err());
    }
}

pub fn check_resolutions_match_ground_truth() {
    let (methods, invocations) = load();
    let keys: BTreeMap<MethodId, String> = methods
        .iter()
        .map(|m| (m.method_id.clone(), key(m)))
        .collect();
    let graph = DependencyGraph::build(build_index(methods), &invocations).unwrap();
    let got: BTreeMap<String, String> = graph
        .resolutions()
        .iter()
        .map(|r| {
            let k = format!(
                "{} -> {}/{}",
                keys[&r.invocation.caller_id], r.invocation.callee_name, r.invocation.arg_count
            );
            let v = match &r.status {
                ResolutionStatus::Resolved { target } => format!("resolved:{}", keys[target]),
                ResolutionStatus::Unresolved => "unresolved".to_string(),
                ResolutionStatus::SelfCall => "self_call".to_string(),
                ResolutionStatus::Ambiguous { candidates } => format!(
                    "ambiguous:{}",
                    candidates
                        .iter()
                        .map(|c| keys[c].as_str())
                        .collect::<Vec<_>>()
                        .join(",")
                ),
            };
            (k, v)
        })
        .collect();
    for (k, v) in expected()["resolutions"].as_object().unwrap() {
        assert_eq!(got.get(k).map(String::as_str), v.as_str(), "{k}");
    }
}

pub fn check_constructor_calls_are_not_attributed() {
    let (methods, invocations) = load();
    assert!(!methods.iter().any(|m| m.name == "Util"));
    let ids: BTreeSet<&MethodId> = methods.iter().map(|m| &m.method_id).collect();
    assert!(invocations.iter().all(|i| ids.contains(&i.caller_id)));
    // The only call to `log` is inside the constructor.
    assert!(!invocations.iter().any(|i| i.callee_name == "log"));
}
