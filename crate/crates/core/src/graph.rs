//! Helper resolution, dependency classification and helper chains.
//!
//! Invocations are matched against project methods by simple name and
//! argument count only; receiver types are never resolved. When several
//! methods share a signature, a candidate in the caller's own file wins.
//! Remaining ties are recorded as [`ResolutionStatus::Ambiguous`] and, for
//! classification and chain building, follow the first candidate in
//! `(file, start_line)` order with the chain flagged `has_ambiguity`.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::extract::{InvocationRecord, MethodId, MethodRecord};
use crate::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct MethodIndex {
    by_signature: BTreeMap<(String, usize), Vec<MethodId>>,
    methods: BTreeMap<MethodId, MethodRecord>,
}

impl MethodIndex {
    /// Candidates for `(name, param_count)`, ordered by `(file, start_line)`.
    pub fn lookup(&self, name: &str, param_count: usize) -> &[MethodId] {
        self.by_signature
            .get(&(name.to_string(), param_count))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn get(&self, id: &MethodId) -> Option<&MethodRecord> {
        self.methods.get(id)
    }

    pub fn len(&self) -> usize {
        self.methods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.methods.is_empty()
    }

    pub fn signature_count(&self) -> usize {
        self.by_signature.len()
    }

    pub fn methods(&self) -> impl Iterator<Item = &MethodRecord> {
        self.methods.values()
    }
}

pub fn build_index(methods: impl IntoIterator<Item = MethodRecord>) -> MethodIndex {
    let mut index = MethodIndex::default();
    for m in methods {
        index
            .by_signature
            .entry((m.name.clone(), m.param_count))
            .or_default()
            .push(m.method_id.clone());
        index.methods.insert(m.method_id.clone(), m);
    }
    let methods = &index.methods;
    for ids in index.by_signature.values_mut() {
        ids.sort_by(|a, b| {
            let (ma, mb) = (&methods[a], &methods[b]);
            (&ma.file, ma.start_line, a).cmp(&(&mb.file, mb.start_line, b))
        });
        ids.dedup();
    }
    index
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ResolutionStatus {
    Resolved {
        target: MethodId,
    },
    /// No project method matches; treated as a library or built-in call.
    Unresolved,
    /// Several non-caller candidates remain after the same-file preference.
    Ambiguous {
        candidates: Vec<MethodId>,
    },
    SelfCall,
}

impl ResolutionStatus {
    /// The helper this call contributes to chains, if any.
    pub fn effective_target(&self) -> Option<&MethodId> {
        match self {
            ResolutionStatus::Resolved { target } => Some(target),
            ResolutionStatus::Ambiguous { candidates } => candidates.first(),
            _ => None,
        }
    }

    pub fn is_ambiguous(&self) -> bool {
        matches!(self, ResolutionStatus::Ambiguous { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub invocation: InvocationRecord,
    #[serde(flatten)]
    pub status: ResolutionStatus,
}

pub fn resolve_invocation(index: &MethodIndex, inv: &InvocationRecord) -> Result<Resolution> {
    let caller = index
        .get(&inv.caller_id)
        .ok_or_else(|| Error::Data(format!("invocation from unknown method {}", inv.caller_id)))?;
    let candidates = index.lookup(&inv.callee_name, inv.arg_count);
    let status = if candidates.is_empty() {
        ResolutionStatus::Unresolved
    } else {
        let same_file: Vec<&MethodId> = candidates
            .iter()
            .filter(|id| index.methods[*id].file == caller.file)
            .collect();
        let pool: Vec<&MethodId> = if same_file.is_empty() {
            candidates.iter().collect()
        } else {
            same_file
        };
        let includes_caller = pool.contains(&&caller.method_id);
        let others: Vec<MethodId> = pool
            .into_iter()
            .filter(|id| **id != caller.method_id)
            .cloned()
            .collect();
        match (others.len(), includes_caller) {
            (0, _) => ResolutionStatus::SelfCall,
            (1, false) => ResolutionStatus::Resolved {
                target: others.into_iter().next().unwrap(),
            },
            _ => ResolutionStatus::Ambiguous { candidates: others },
        }
    };
    Ok(Resolution {
        invocation: inv.clone(),
        status,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepClass {
    Dependent,
    Independent,
}

pub type DependencyClass = BTreeMap<MethodId, DepClass>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureMode {
    /// Direct helpers only.
    Immediate,
    /// Every helper reachable through resolved edges.
    Full,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainEntry {
    pub helper_id: MethodId,
    pub depth: usize,
    pub parent_id: MethodId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HelperChain {
    pub root_id: MethodId,
    pub mode: ClosureMode,
    pub entries: Vec<ChainEntry>,
    pub max_depth: usize,
    pub has_ambiguity: bool,
}

impl HelperChain {
    pub fn helper_ids(&self) -> impl Iterator<Item = &MethodId> {
        self.entries.iter().map(|e| &e.helper_id)
    }
}

#[derive(Debug, Clone, Copy)]
struct Edge {
    target: usize,
    ambiguous: bool,
}

/// Frozen call graph over one repository snapshot.
#[derive(Debug, Clone)]
pub struct DependencyGraph {
    index: MethodIndex,
    resolutions: Vec<Resolution>,
    ids: Vec<MethodId>,
    position: HashMap<MethodId, usize>,
    edges: Vec<Vec<Edge>>,
}

impl DependencyGraph {
    /// Resolves every invocation against `index` and builds the helper graph.
    pub fn build(index: MethodIndex, invocations: &[InvocationRecord]) -> Result<Self> {
        let resolutions = invocations
            .iter()
            .map(|inv| resolve_invocation(&index, inv))
            .collect::<Result<Vec<_>>>()?;
        let ids: Vec<MethodId> = index.methods.keys().cloned().collect();
        let position: HashMap<MethodId, usize> = ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i))
            .collect();
        let mut edges: Vec<Vec<Edge>> = vec![Vec::new(); ids.len()];
        let mut seen: Vec<HashSet<usize>> = vec![HashSet::new(); ids.len()];
        for r in &resolutions {
            let Some(target) = r.status.effective_target() else {
                continue;
            };
            let from = position[&r.invocation.caller_id];
            let to = position[target];
            if seen[from].insert(to) {
                edges[from].push(Edge {
                    target: to,
                    ambiguous: r.status.is_ambiguous(),
                });
            } else if r.status.is_ambiguous() {
                // Keep the flag if any call along this edge was ambiguous.
                if let Some(e) = edges[from].iter_mut().find(|e| e.target == to) {
                    e.ambiguous = true;
                }
            }
        }
        Ok(DependencyGraph {
            index,
            resolutions,
            ids,
            position,
            edges,
        })
    }

    pub fn index(&self) -> &MethodIndex {
        &self.index
    }

    pub fn resolutions(&self) -> &[Resolution] {
        &self.resolutions
    }

    pub fn is_dependent(&self, id: &MethodId) -> bool {
        self.position
            .get(id)
            .is_some_and(|&i| !self.edges[i].is_empty())
    }

    pub fn classify(&self) -> DependencyClass {
        self.ids
            .iter()
            .enumerate()
            .map(|(i, id)| {
                let class = if self.edges[i].is_empty() {
                    DepClass::Independent
                } else {
                    DepClass::Dependent
                };
                (id.clone(), class)
            })
            .collect()
    }

    /// Breadth-first helper traversal from `root`. Entries are ordered by
    /// depth, then by first encounter.
    pub fn helper_closure(&self, root: &MethodId, mode: ClosureMode) -> Result<HelperChain> {
        let &root_pos = self
            .position
            .get(root)
            .ok_or_else(|| Error::Data(format!("unknown method {root}")))?;
        if self.edges[root_pos].is_empty() {
            return Err(Error::Data(format!(
                "method {root} is independent and has no helper chain"
            )));
        }
        let mut visited = vec![false; self.ids.len()];
        visited[root_pos] = true;
        let mut queue = VecDeque::from([(root_pos, 0usize)]);
        let mut entries = Vec::new();
        let mut has_ambiguity = false;
        while let Some((node, depth)) = queue.pop_front() {
            if mode == ClosureMode::Immediate && depth >= 1 {
                continue;
            }
            for edge in &self.edges[node] {
                if visited[edge.target] {
                    continue;
                }
                visited[edge.target] = true;
                has_ambiguity |= edge.ambiguous;
                entries.push(ChainEntry {
                    helper_id: self.ids[edge.target].clone(),
                    depth: depth + 1,
                    parent_id: self.ids[node].clone(),
                });
                queue.push_back((edge.target, depth + 1));
            }
        }
        let max_depth = entries.iter().map(|e| e.depth).max().unwrap_or(0);
        Ok(HelperChain {
            root_id: root.clone(),
            mode,
            entries,
            max_depth,
            has_ambiguity,
        })
    }
}

/// Free-function form of [`DependencyGraph::classify`] over precomputed resolutions.
pub fn classify(index: &MethodIndex, resolutions: &[Resolution]) -> DependencyClass {
    let mut classes: DependencyClass = index
        .methods()
        .map(|m| (m.method_id.clone(), DepClass::Independent))
        .collect();
    for r in resolutions {
        if r.status.effective_target().is_some()
            && let Some(c) = classes.get_mut(&r.invocation.caller_id)
        {
            *c = DepClass::Dependent;
        }
    }
    classes
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DependencyStats {
    pub n_dependent: usize,
    pub n_independent: usize,
    pub pct_dependent: f64,
    pub pct_independent: f64,
}

pub(crate) fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Counts and percentages (2 decimals); the independent share is `100 − pct_dependent`.
pub fn dependency_stats(classes: &DependencyClass) -> Result<DependencyStats> {
    let n_dependent = classes
        .values()
        .filter(|c| **c == DepClass::Dependent)
        .count();
    dependency_stats_from_counts(n_dependent, classes.len() - n_dependent)
}

pub fn dependency_stats_from_counts(
    n_dependent: usize,
    n_independent: usize,
) -> Result<DependencyStats> {
    let total = n_dependent + n_independent;
    if total == 0 {
        return Err(Error::Data("no methods to classify".into()));
    }
    let pct_dependent = round2(100.0 * n_dependent as f64 / total as f64);
    Ok(DependencyStats {
        n_dependent,
        n_independent,
        pct_dependent,
        pct_independent: round2(100.0 - pct_dependent),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Language;

    fn method(id: &str, name: &str, params: usize, file: &str, line: usize) -> MethodRecord {
        MethodRecord {
            method_id: MethodId::from(id),
            repo: "r".into(),
            file: file.into(),
            name: name.into(),
            param_count: params,
            start_line: line,
            end_line: line + 2,
            body_text: format!("void {name}() {{}}"),
            doc_comment: None,
            language: Language::Java,
        }
    }

    fn call(caller: &str, callee: &str, args: usize) -> InvocationRecord {
        InvocationRecord {
            caller_id: MethodId::from(caller),
            callee_name: callee.into(),
            arg_count: args,
            site_line: 1,
            site_column: 0,
        }
    }

    fn ids(chain: &HelperChain) -> Vec<(&str, usize)> {
        chain
            .entries
            .iter()
            .map(|e| (e.helper_id.as_str(), e.depth))
            .collect()
    }

    #[test]
    fn index_keys() {
        let idx = build_index([method("a", "foo", 1, "A", 1), method("b", "bar", 0, "A", 5)]);
        assert_eq!(idx.signature_count(), 2);
        assert_eq!(idx.lookup("foo", 1), [MethodId::from("a")]);
        assert!(idx.lookup("foo", 2).is_empty());

        let idx = build_index([method("a", "foo", 1, "A", 1), method("b", "foo", 2, "A", 5)]);
        assert_eq!(idx.signature_count(), 2);

        let idx = build_index([method("b", "foo", 1, "B", 1), method("a", "foo", 1, "A", 9)]);
        assert_eq!(idx.signature_count(), 1);
        assert_eq!(
            idx.lookup("foo", 1),
            [MethodId::from("a"), MethodId::from("b")]
        );
    }

    #[test]
    fn resolution_cases() {
        let idx = build_index([
            method("main", "main", 0, "A", 1),
            method("helper", "helper", 1, "A", 5),
            method("fib", "fib", 1, "A", 9),
            method("fooA", "foo", 1, "A", 13),
            method("fooB", "foo", 1, "B", 1),
            method("barB", "bar", 0, "B", 5),
            method("barC", "bar", 0, "C", 5),
        ]);
        let status = |c, n, a| resolve_invocation(&idx, &call(c, n, a)).unwrap().status;
        assert_eq!(
            status("main", "helper", 1),
            ResolutionStatus::Resolved {
                target: "helper".into()
            }
        );
        assert_eq!(status("main", "println", 1), ResolutionStatus::Unresolved);
        assert_eq!(status("fib", "fib", 1), ResolutionStatus::SelfCall);
        assert_eq!(
            status("main", "foo", 1),
            ResolutionStatus::Resolved {
                target: "fooA".into()
            }
        );
        // fooA recursing: the same-file candidate is itself.
        assert_eq!(status("fooA", "foo", 1), ResolutionStatus::SelfCall);
        assert_eq!(
            status("main", "bar", 0),
            ResolutionStatus::Ambiguous {
                candidates: vec!["barB".into(), "barC".into()]
            }
        );
        assert!(resolve_invocation(&idx, &call("ghost", "bar", 0)).is_err());
    }

    #[test]
    fn same_file_overload_with_caller_is_ambiguous() {
        let idx = build_index([method("p", "put", 1, "A", 1), method("q", "put", 1, "A", 5)]);
        let r = resolve_invocation(&idx, &call("p", "put", 1)).unwrap();
        assert_eq!(
            r.status,
            ResolutionStatus::Ambiguous {
                candidates: vec!["q".into()]
            }
        );
    }

    fn chain_graph() -> DependencyGraph {
        let idx = build_index([
            method("m1", "m1", 0, "A", 1),
            method("m2", "m2", 0, "A", 5),
            method("m3", "m3", 0, "A", 9),
            method("lib", "lib", 0, "A", 13),
            method("c1", "c1", 0, "A", 17),
            method("c2", "c2", 0, "A", 21),
            method("rec", "rec", 0, "A", 25),
        ]);
        let calls = [
            call("m1", "m2", 0),
            call("m1", "m2", 0),
            call("m2", "m3", 0),
            call("lib", "println", 1),
            call("c1", "c2", 0),
            call("c2", "c1", 0),
            call("rec", "rec", 0),
        ];
        DependencyGraph::build(idx, &calls).unwrap()
    }

    #[test]
    fn classification() {
        let g = chain_graph();
        let classes = g.classify();
        use DepClass::*;
        let expect = [
            ("m1", Dependent),
            ("m2", Dependent),
            ("m3", Independent),
            ("lib", Independent),
            ("c1", Dependent),
            ("c2", Dependent),
            ("rec", Independent),
        ];
        for (id, class) in expect {
            assert_eq!(classes[&MethodId::from(id)], class, "{id}");
        }
        assert_eq!(classify(g.index(), g.resolutions()), classes);
    }

    #[test]
    fn closures() {
        let g = chain_graph();
        let m1 = MethodId::from("m1");
        let immediate = g.helper_closure(&m1, ClosureMode::Immediate).unwrap();
        assert_eq!(ids(&immediate), [("m2", 1)]);
        assert_eq!(immediate.max_depth, 1);
        let full = g.helper_closure(&m1, ClosureMode::Full).unwrap();
        assert_eq!(ids(&full), [("m2", 1), ("m3", 2)]);
        assert_eq!(full.max_depth, 2);
        assert_eq!(full.entries[1].parent_id, MethodId::from("m2"));
        assert!(!full.has_ambiguity);

        let cyc = g.helper_closure(&"c1".into(), ClosureMode::Full).unwrap();
        assert_eq!(ids(&cyc), [("c2", 1)]);

        assert!(g.helper_closure(&"m3".into(), ClosureMode::Full).is_err());
        assert!(
            g.helper_closure(&"rec".into(), ClosureMode::Immediate)
                .is_err()
        );
    }

    #[test]
    fn ambiguity_flag_propagates_to_chain() {
        let idx = build_index([
            method("root", "root", 0, "A", 1),
            method("x1", "x", 0, "B", 1),
            method("x2", "x", 0, "C", 1),
        ]);
        let g = DependencyGraph::build(idx, &[call("root", "x", 0)]).unwrap();
        let chain = g.helper_closure(&"root".into(), ClosureMode::Full).unwrap();
        assert_eq!(ids(&chain), [("x1", 1)]);
        assert!(chain.has_ambiguity);
    }

    #[test]
    fn stats() {
        let s = dependency_stats_from_counts(448_572, 199_197).unwrap();
        assert_eq!((s.pct_dependent, s.pct_independent), (69.25, 30.75));
        let s = dependency_stats_from_counts(1, 0).unwrap();
        assert_eq!((s.pct_dependent, s.pct_independent), (100.0, 0.0));
        let s = dependency_stats_from_counts(1, 3).unwrap();
        assert_eq!((s.pct_dependent, s.pct_independent), (25.0, 75.0));
        assert!(dependency_stats(&DependencyClass::new()).is_err());
        let s = dependency_stats_from_counts(1, 2).unwrap();
        assert_eq!((s.pct_dependent, s.pct_independent), (33.33, 66.67));
        assert_eq!(s.pct_dependent + s.pct_independent, 100.0);
    }
}
