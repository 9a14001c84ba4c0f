use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;
use std::path::Path;
use std::time::Duration;

use anyhow::{Context, Result, bail};
use helpcom_core::Error as CoreError;
use helpcom_core::config::{PipelineConfig, load_config};
use helpcom_core::corpus::{RepoDescriptor, discover_source_files};
use helpcom_core::extract::{InvocationRecord, MethodId, MethodRecord, extract_file};
use helpcom_core::graph::{
    ClosureMode, DepClass, DependencyGraph, HelperChain, Resolution, build_index, dependency_stats,
};
use helpcom_core::history::{
    EngagementField, HistoryRecord, commit_share, engagement_summary, mine_repository,
};
use helpcom_core::metrics::{
    CIDER_SCALE, ScoreCard, ScoreComponents, bleu4_smoothed, build_scorecard, cider,
    embedding_cosine, llm_judge, meteor, rouge_l, side_score, tokenize,
};
use helpcom_core::prompt::{
    GeneratedComment, PromptTemplate, Strategy, generate_comment, helpers_from_chain, render_prompt,
};
use helpcom_core::provider::{
    AlignmentProvider, CompletionProvider, EmbeddingAlignment, EmbeddingProvider, HashingEmbedder,
    HttpAlignmentProvider, HttpCompletionProvider, HttpEmbeddingProvider, MockCompletionProvider,
    RateLimiter, RetryPolicy, run_bounded,
};
use helpcom_core::report::build_report;
use helpcom_core::stats::cochran_sample_size;
use helpcom_core::store::{
    AlignedMethod, RecordKind, RunManifest, RunStore, filter_by_alignment, filter_commented,
    stratified_sample, write_atomic,
};
use serde::Deserialize;

use crate::{Cli, Command};

const FILTERED: &str = "filtered";
const SAMPLE: &str = "sample";
const IMPORTED_MODEL: &str = "imported";

struct Ctx {
    config: PipelineConfig,
    store: RunStore,
    manifest: RunManifest,
}

impl Ctx {
    fn open(cli: &Cli) -> Result<Self> {
        if !cli.config.is_file() {
            bail!(CoreError::Config(format!(
                "configuration file {} not found",
                cli.config.display()
            )));
        }
        let config = load_config(&cli.config)
            .with_context(|| format!("loading configuration {}", cli.config.display()))?;
        let store = RunStore::new(&config.store.runs_dir, &cli.run_id)?;
        let manifest = match store.load_manifest()? {
            Some(m) => {
                if m.config_digest != config.digest {
                    log::warn!(
                        "run {} was created with a different configuration",
                        cli.run_id
                    );
                }
                m
            }
            None => RunManifest::new(&cli.run_id, &config.digest),
        };
        Ok(Ctx {
            config,
            store,
            manifest,
        })
    }

    fn finish(&mut self, stage: &str) -> Result<()> {
        self.manifest.record_stage(stage);
        self.store.save_manifest(&self.manifest)?;
        Ok(())
    }

    fn repos(&self, name: Option<&str>) -> Result<Vec<&RepoDescriptor>> {
        if self.config.repos.is_empty() {
            return Err(CoreError::Config("no repositories configured".into()).into());
        }
        match name {
            None => Ok(self.config.repos.iter().collect()),
            Some(n) => self
                .config
                .repos
                .iter()
                .find(|r| r.name == n)
                .map(|r| vec![r])
                .ok_or_else(|| {
                    CoreError::Config(format!("no repository named {n:?} in the configuration"))
                        .into()
                }),
        }
    }

    fn policy(&self) -> RetryPolicy {
        RetryPolicy::from_config(&self.config.generation)
    }

    fn methods_for(&self, selection: Option<&str>) -> Result<Vec<MethodRecord>> {
        Ok(match selection {
            Some(name) => self.store.read_selection(name)?,
            None => self.store.read()?,
        })
    }
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let mut ctx = Ctx::open(cli)?;
    match &cli.command {
        Command::Extract { repo } => run_extract(&mut ctx, repo.as_deref(), out),
        Command::Graph => run_graph(&mut ctx, out),
        Command::History { repo } => run_history(&mut ctx, repo.as_deref(), out),
        Command::Filter { threshold } => run_filter(&mut ctx, *threshold, out),
        Command::Sample {
            n_per_class,
            seed,
            selection,
        } => run_sample(&mut ctx, *n_per_class, *seed, selection.as_deref(), out),
        Command::Generate {
            strategy,
            mock_provider,
            selection,
        } => run_generate(
            &mut ctx,
            *strategy,
            mock_provider.as_deref(),
            selection.as_deref(),
            out,
        ),
        Command::Score { mock_provider } => run_score(&mut ctx, mock_provider.as_deref(), out),
        Command::Report { reference_strategy } => run_report(&mut ctx, reference_strategy, out),
        Command::ImportComments { strategy, path } => {
            run_import_comments(&mut ctx, path, strategy, out)
        }
    }
}

fn run_extract(ctx: &mut Ctx, repo: Option<&str>, out: &mut dyn Write) -> Result<()> {
    let mut methods = Vec::new();
    let mut invocations = Vec::new();
    let mut files_parsed = 0u64;
    for repo in ctx.repos(repo)? {
        if !repo.root.is_dir() {
            bail!(CoreError::Data(format!(
                "repository {:?}: {} is not a directory",
                repo.name,
                repo.root.display()
            )));
        }
        let files = discover_source_files(repo)?;
        let extracted = run_bounded(&files, ctx.config.generation.concurrency, |file| {
            let content = file.read(&repo.root)?;
            extract_file(file, &content)
        });
        for (file, result) in files.iter().zip(extracted) {
            let fx = result.with_context(|| format!("extracting {}/{}", repo.name, file.path))?;
            methods.extend(fx.methods);
            invocations.extend(fx.invocations);
        }
        files_parsed += files.len() as u64;
    }
    ctx.store.write(&methods)?;
    ctx.store.write(&invocations)?;
    let c = &mut ctx.manifest.counts;
    c.files_parsed = files_parsed;
    c.methods = methods.len() as u64;
    c.invocations = invocations.len() as u64;
    c.dependent = 0;
    c.independent = 0;
    ctx.finish("extract")?;
    writeln!(
        out,
        "extracted {} methods and {} invocations from {files_parsed} files",
        methods.len(),
        invocations.len()
    )?;
    Ok(())
}

fn run_graph(ctx: &mut Ctx, out: &mut dyn Write) -> Result<()> {
    let methods: Vec<MethodRecord> = ctx.store.read()?;
    let invocations: Vec<InvocationRecord> = ctx.store.read()?;
    let repo_of: HashMap<&MethodId, &str> = methods
        .iter()
        .map(|m| (&m.method_id, m.repo.as_str()))
        .collect();

    let mut by_repo: BTreeMap<&str, (Vec<MethodRecord>, Vec<InvocationRecord>)> = BTreeMap::new();
    for m in &methods {
        by_repo
            .entry(m.repo.as_str())
            .or_default()
            .0
            .push(m.clone());
    }
    for inv in &invocations {
        let repo = repo_of.get(&inv.caller_id).ok_or_else(|| {
            CoreError::Data(format!("invocation from unknown method {}", inv.caller_id))
        })?;
        by_repo
            .get_mut(repo)
            .expect("repo has methods")
            .1
            .push(inv.clone());
    }

    let mut resolutions: Vec<Resolution> = Vec::new();
    let mut chains: Vec<HelperChain> = Vec::new();
    let mut classes = BTreeMap::new();
    for (ms, invs) in by_repo.into_values() {
        let graph = DependencyGraph::build(build_index(ms), &invs)?;
        resolutions.extend_from_slice(graph.resolutions());
        let repo_classes = graph.classify();
        for (id, class) in &repo_classes {
            if *class == DepClass::Dependent {
                chains.push(graph.helper_closure(id, ClosureMode::Immediate)?);
                chains.push(graph.helper_closure(id, ClosureMode::Full)?);
            }
        }
        classes.extend(repo_classes);
    }
    ctx.store.write(&resolutions)?;
    ctx.store.write(&chains)?;

    let dependent = classes
        .values()
        .filter(|c| **c == DepClass::Dependent)
        .count();
    let c = &mut ctx.manifest.counts;
    c.dependent = dependent as u64;
    c.independent = (classes.len() - dependent) as u64;
    ctx.finish("graph")?;

    writeln!(
        out,
        "resolved {} invocations over {} methods",
        resolutions.len(),
        classes.len()
    )?;
    if !classes.is_empty() {
        let s = dependency_stats(&classes)?;
        writeln!(
            out,
            "dependent: {} ({:.2}%)  independent: {} ({:.2}%)",
            s.n_dependent, s.pct_dependent, s.n_independent, s.pct_independent
        )?;
    }
    Ok(())
}

/// Dependent method ids according to the stored helper chains.
fn dependent_ids(store: &RunStore) -> Result<BTreeSet<MethodId>> {
    let chains: Vec<HelperChain> = store.read()?;
    Ok(chains.into_iter().map(|c| c.root_id).collect())
}

fn write_engagement(out: &mut dyn Write, label: &str, records: &[HistoryRecord]) -> Result<()> {
    if records.is_empty() {
        return Ok(writeln!(out, "{label}: no methods")?);
    }
    for (field, name) in [
        (EngagementField::Commits, "commits"),
        (EngagementField::Authors, "authors"),
    ] {
        let s = engagement_summary(records, field)?;
        writeln!(
            out,
            "{label} {name}: n={} mean={:.2} min={} q1={:.2} median={:.2} q3={:.2} max={}",
            s.n, s.mean, s.min, s.q1, s.median, s.q3, s.max
        )?;
    }
    Ok(())
}

fn run_history(ctx: &mut Ctx, repo: Option<&str>, out: &mut dyn Write) -> Result<()> {
    let methods: Vec<MethodRecord> = ctx.store.read()?;
    let mut records = Vec::new();
    for repo in ctx.repos(repo)? {
        let ms: Vec<MethodRecord> = methods
            .iter()
            .filter(|m| m.repo == repo.name)
            .cloned()
            .collect();
        records
            .extend(mine_repository(repo, &ms).with_context(|| format!("mining {}", repo.name))?);
    }
    ctx.store.write(&records)?;
    ctx.manifest.counts.history_records = records.len() as u64;
    ctx.finish("history")?;

    writeln!(out, "mined history for {} methods", records.len())?;
    if ctx.store.exists(RecordKind::Chain) {
        let dependent = dependent_ids(&ctx.store)?;
        let (dep, indep): (Vec<HistoryRecord>, Vec<HistoryRecord>) = records
            .iter()
            .cloned()
            .partition(|r| dependent.contains(&r.method_id));
        write_engagement(out, "dependent", &dep)?;
        write_engagement(out, "independent", &indep)?;
        if let Ok((d, i)) = commit_share(&dep, &indep) {
            writeln!(out, "commit share: dependent {d:.2}%  independent {i:.2}%")?;
        }
    } else {
        write_engagement(out, "all", &records)?;
    }
    Ok(())
}

fn alignment_provider(config: &PipelineConfig) -> Result<Box<dyn AlignmentProvider>> {
    Ok(match &config.provider.alignment {
        Some(endpoint) => Box::new(HttpAlignmentProvider::new(endpoint).map_err(CoreError::from)?),
        None => {
            log::warn!(
                "no alignment endpoint configured; using the offline embedding-cosine fallback"
            );
            Box::new(EmbeddingAlignment::new(HashingEmbedder::sbert_role()))
        }
    })
}

fn run_filter(ctx: &mut Ctx, threshold: Option<f64>, out: &mut dyn Write) -> Result<()> {
    let threshold = threshold.unwrap_or(ctx.config.eval.side_threshold);
    let methods: Vec<MethodRecord> = ctx.store.read()?;
    let commented = filter_commented(&methods);
    let aligner = alignment_provider(&ctx.config)?;
    let scored: Vec<Result<AlignedMethod, CoreError>> =
        run_bounded(&commented, ctx.config.generation.concurrency, |m| {
            let comment = m.doc_comment.as_deref().unwrap_or_default();
            Ok(AlignedMethod {
                method: m.clone(),
                side: Some(side_score(aligner.as_ref(), &m.body_text, comment)?),
            })
        });
    let scored = scored.into_iter().collect::<Result<Vec<_>, _>>()?;
    let kept: Vec<MethodRecord> = filter_by_alignment(&scored, threshold)?
        .into_iter()
        .map(|a| a.method)
        .collect();
    ctx.store.write_selection(FILTERED, &kept)?;
    ctx.manifest.counts.selected = kept.len() as u64;
    ctx.finish("filter")?;
    writeln!(
        out,
        "{} methods, {} commented, {} with alignment >= {threshold} (selection {FILTERED:?})",
        methods.len(),
        commented.len(),
        kept.len()
    )?;
    Ok(())
}

fn run_sample(
    ctx: &mut Ctx,
    n_per_class: Option<usize>,
    seed: Option<u64>,
    selection: Option<&str>,
    out: &mut dyn Write,
) -> Result<()> {
    let pool = ctx.methods_for(selection)?;
    let dependent = dependent_ids(&ctx.store)?;
    let class_of = |m: &MethodRecord| {
        if dependent.contains(&m.method_id) {
            DepClass::Dependent
        } else {
            DepClass::Independent
        }
    };
    let n = match n_per_class {
        Some(n) => n,
        None => {
            let n_dep = pool
                .iter()
                .filter(|m| class_of(m) == DepClass::Dependent)
                .count();
            let smaller = n_dep.min(pool.len() - n_dep);
            if smaller == 0 {
                bail!(CoreError::Data(
                    "a class is empty; nothing to sample".into()
                ));
            }
            cochran_sample_size(smaller as u64, 0.95, 0.05).map_err(CoreError::from)? as usize
        }
    };
    let seed = seed.unwrap_or(ctx.config.sampling.seed);
    let sample = stratified_sample(&pool, class_of, n, seed)?;
    ctx.store.write_selection(SAMPLE, &sample)?;
    ctx.manifest.counts.selected = sample.len() as u64;
    ctx.finish("sample")?;
    writeln!(
        out,
        "sampled {n} dependent and {n} independent methods (seed {seed}, selection {SAMPLE:?})"
    )?;
    Ok(())
}

fn completion_provider(
    config: &PipelineConfig,
    mock: Option<&Path>,
) -> Result<Box<dyn CompletionProvider>> {
    if let Some(path) = mock {
        return Ok(Box::new(MockCompletionProvider::from_file(path)?));
    }
    let endpoint = config.provider.completion.as_ref().ok_or_else(|| {
        CoreError::Config(
            "no provider.completion configured; set it or pass --mock-provider".into(),
        )
    })?;
    Ok(Box::new(
        HttpCompletionProvider::new(endpoint).map_err(CoreError::from)?,
    ))
}

/// Replaces `strategy`'s comments in the run and keeps the others.
fn merge_comments(store: &RunStore, strategy: &str, new: Vec<GeneratedComment>) -> Result<usize> {
    let mut all: Vec<GeneratedComment> = if store.exists(RecordKind::GeneratedComment) {
        store.read()?
    } else {
        Vec::new()
    };
    all.retain(|c| c.strategy != strategy);
    all.extend(new);
    all.sort_by(|a, b| (&a.strategy, &a.method_id).cmp(&(&b.strategy, &b.method_id)));
    store.write(&all)?;
    Ok(all.len())
}

fn run_generate(
    ctx: &mut Ctx,
    strategy: Strategy,
    mock: Option<&Path>,
    selection: Option<&str>,
    out: &mut dyn Write,
) -> Result<()> {
    let all: Vec<MethodRecord> = ctx.store.read()?;
    let targets = ctx.methods_for(selection)?;
    let chains: Vec<HelperChain> = ctx.store.read()?;
    let full: HashMap<&MethodId, &HelperChain> = chains
        .iter()
        .filter(|c| c.mode == ClosureMode::Full)
        .map(|c| (&c.root_id, c))
        .collect();
    let index = build_index(all);
    let template = PromptTemplate::comment_generation();
    let budget = ctx.config.generation.context_token_budget;

    let mut prompts = Vec::new();
    for m in &targets {
        let helpers = match (strategy, full.get(&m.method_id)) {
            (Strategy::Baseline, _) => Vec::new(),
            (_, Some(chain)) => helpers_from_chain(chain, &index)?,
            (_, None) => continue,
        };
        prompts.push(render_prompt(m, &helpers, strategy, &template, budget)?);
    }
    let skipped = targets.len() - prompts.len();

    let provider = completion_provider(&ctx.config, mock)?;
    let limiter = RateLimiter::new(Duration::from_millis(ctx.config.generation.min_interval_ms));
    let policy = ctx.policy();
    let temperature = ctx.config.generation.temperature;
    let generated = run_bounded(&prompts, ctx.config.generation.concurrency, |p| {
        limiter.acquire();
        generate_comment(provider.as_ref(), p, temperature, &policy)
    });
    let mut comments = Vec::with_capacity(generated.len());
    for (p, g) in prompts.iter().zip(generated) {
        comments.push(
            g.with_context(|| format!("generating a comment for {}", p.method_id))?
                .comment,
        );
    }
    let dropped: usize = prompts.iter().map(|p| p.dropped_helpers.len()).sum();
    let n = comments.len();
    let total = merge_comments(&ctx.store, strategy.as_str(), comments)?;
    ctx.manifest.counts.comments_generated = total as u64;
    ctx.finish(&format!("generate:{strategy}"))?;
    writeln!(
        out,
        "generated {n} comments with strategy {strategy} using {}",
        provider.model()
    )?;
    if skipped > 0 {
        writeln!(out, "skipped {skipped} independent methods (no helpers)")?;
    }
    if dropped > 0 {
        writeln!(out, "dropped {dropped} helpers to fit the context budget")?;
    }
    Ok(())
}

struct Scorers {
    sbert: Box<dyn EmbeddingProvider>,
    usenc: Box<dyn EmbeddingProvider>,
    aligner: Box<dyn AlignmentProvider>,
    judges: Vec<Box<dyn CompletionProvider>>,
}

impl Scorers {
    fn from_config(config: &PipelineConfig, mock: Option<&Path>) -> Result<Self> {
        let (sbert, usenc): (Box<dyn EmbeddingProvider>, Box<dyn EmbeddingProvider>) = match &config
            .provider
            .embedding
        {
            Some(e) => {
                let (a, b) = HttpEmbeddingProvider::pair(e).map_err(CoreError::from)?;
                (Box::new(a), Box::new(b))
            }
            None => {
                log::warn!("no embedding endpoint configured; using offline hashing embeddings");
                (
                    Box::new(HashingEmbedder::sbert_role()),
                    Box::new(HashingEmbedder::usenc_role()),
                )
            }
        };
        let mock = mock.map(MockCompletionProvider::from_file).transpose()?;
        let mut judges: Vec<Box<dyn CompletionProvider>> = Vec::new();
        for judge in &config.provider.judges {
            judges.push(match &mock {
                Some(m) => Box::new(m.clone().with_model(judge.model.clone())),
                None => Box::new(HttpCompletionProvider::new(judge).map_err(CoreError::from)?),
            });
        }
        Ok(Scorers {
            sbert,
            usenc,
            aligner: alignment_provider(config)?,
            judges,
        })
    }
}

fn run_score(ctx: &mut Ctx, mock: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let comments: Vec<GeneratedComment> = ctx.store.read()?;
    let methods: Vec<MethodRecord> = ctx.store.read()?;
    let by_id: HashMap<&MethodId, &MethodRecord> =
        methods.iter().map(|m| (&m.method_id, m)).collect();

    let mut groups: BTreeMap<&str, Vec<(&GeneratedComment, &MethodRecord, &str)>> = BTreeMap::new();
    let mut unreferenced = 0;
    for c in &comments {
        let m = by_id.get(&c.method_id).ok_or_else(|| {
            CoreError::Data(format!("comment for unknown method {}", c.method_id))
        })?;
        match m.doc_comment.as_deref().filter(|d| !d.trim().is_empty()) {
            Some(reference) => groups
                .entry(c.strategy.as_str())
                .or_default()
                .push((c, m, reference)),
            None => unreferenced += 1,
        }
    }

    let scorers = Scorers::from_config(&ctx.config, mock)?;
    let rubric = PromptTemplate::judge_rubric();
    let rubric_digest = (!scorers.judges.is_empty()).then(|| rubric.digest());
    let policy = ctx.policy();
    let weights = ctx.config.eval.weights;

    let mut cards: Vec<ScoreCard> = Vec::new();
    for (strategy, rows) in &groups {
        let cands: Vec<_> = rows.iter().map(|(c, _, _)| tokenize(&c.text)).collect();
        let refs: Vec<_> = rows.iter().map(|(_, _, r)| tokenize(r)).collect();
        let ciders = cider(&cands, &refs)
            .map_err(CoreError::from)
            .with_context(|| format!("scoring strategy {strategy}"))?;
        let idx: Vec<usize> = (0..rows.len()).collect();
        let scored = run_bounded(
            &idx,
            ctx.config.generation.concurrency,
            |&i| -> Result<ScoreCard, CoreError> {
                let (c, m, reference) = rows[i];
                let mut llm_scores = BTreeMap::new();
                for judge in &scorers.judges {
                    let score =
                        llm_judge(judge.as_ref(), &m.body_text, &c.text, &rubric, 0.0, &policy)?;
                    llm_scores.insert(judge.model().to_string(), score);
                }
                let comps = ScoreComponents {
                    bleu: Some(bleu4_smoothed(&cands[i], &refs[i])?),
                    meteor: Some(meteor(&cands[i], &refs[i])?),
                    rouge_l: Some(rouge_l(&cands[i], &refs[i])?),
                    cider: Some(ciders[i] / CIDER_SCALE),
                    sbert_cos: Some(embedding_cosine(
                        scorers.sbert.as_ref(),
                        &c.text,
                        reference,
                    )?),
                    usenc_cos: Some(embedding_cosine(
                        scorers.usenc.as_ref(),
                        &c.text,
                        reference,
                    )?),
                    side: Some(side_score(scorers.aligner.as_ref(), &m.body_text, &c.text)?),
                    llm_scores,
                };
                Ok(build_scorecard(
                    c.method_id.clone(),
                    *strategy,
                    &comps,
                    &weights,
                    rubric_digest.clone(),
                )?)
            },
        );
        for (row, card) in rows.iter().zip(scored) {
            cards.push(card.with_context(|| format!("scoring {} [{strategy}]", row.0.method_id))?);
        }
    }
    cards.sort_by(|a, b| (&a.strategy, &a.method_id).cmp(&(&b.strategy, &b.method_id)));
    ctx.store.write(&cards)?;
    ctx.manifest.counts.cards_scored = cards.len() as u64;
    ctx.finish("score")?;
    writeln!(
        out,
        "scored {} comments across {} strategies",
        cards.len(),
        groups.len()
    )?;
    if unreferenced > 0 {
        writeln!(
            out,
            "skipped {unreferenced} comments whose method has no reference comment"
        )?;
    }
    Ok(())
}

fn run_report(ctx: &mut Ctx, reference: &str, out: &mut dyn Write) -> Result<()> {
    let cards: Vec<ScoreCard> = ctx.store.read()?;
    let report = build_report(&cards, reference, &ctx.config.eval.weights)?;
    let text = report.render_text();
    let mut jsonl = String::new();
    for doc in report.documents() {
        jsonl.push_str(&serde_json::to_string(&doc)?);
        jsonl.push('\n');
    }
    write_atomic(&ctx.store.dir().join("report.txt"), text.as_bytes())?;
    write_atomic(&ctx.store.dir().join("report.jsonl"), jsonl.as_bytes())?;
    ctx.finish("report")?;
    out.write_all(text.as_bytes())?;
    if !report.consistency.consistent {
        bail!(CoreError::Data(format!(
            "stored OMS values do not recompute from their components (max deviation {})",
            report.consistency.max_deviation
        )));
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ImportRow {
    method_id: MethodId,
    text: String,
}

fn run_import_comments(ctx: &mut Ctx, path: &Path, label: &str, out: &mut dyn Write) -> Result<()> {
    if label.trim().is_empty() {
        bail!(CoreError::Config(
            "import strategy label must be non-empty".into()
        ));
    }
    let known: BTreeSet<MethodId> = ctx
        .store
        .read::<MethodRecord>()?
        .into_iter()
        .map(|m| m.method_id)
        .collect();
    let text = std::fs::read_to_string(path).map_err(|e| CoreError::io(path, e))?;
    let mut seen = BTreeSet::new();
    let mut comments = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| CoreError::MalformedRecord {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        let row: ImportRow = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
        if !known.contains(&row.method_id) {
            return Err(bad(format!("unknown method_id {}", row.method_id)).into());
        }
        if !seen.insert(row.method_id.clone()) {
            return Err(bad(format!("duplicate method_id {}", row.method_id)).into());
        }
        let text = row.text.trim();
        if text.is_empty() {
            return Err(bad(format!("empty comment for {}", row.method_id)).into());
        }
        comments.push(GeneratedComment {
            method_id: row.method_id,
            strategy: label.to_string(),
            provider_model: IMPORTED_MODEL.to_string(),
            text: text.to_string(),
            prompt_digest: String::new(),
            temperature: 0.0,
        });
    }
    let n = comments.len();
    let total = merge_comments(&ctx.store, label, comments)?;
    ctx.manifest.counts.comments_generated = total as u64;
    ctx.finish(&format!("import-comments:{label}"))?;
    writeln!(out, "imported {n} comments as strategy {label:?}")?;
    Ok(())
}
