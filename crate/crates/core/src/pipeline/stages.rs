use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::config::PipelineConfig;
use super::manifest::{hash_bytes, hash_file};
use super::Stage;
use crate::align::{
    align_all, build_trajectories, mean_origin_distance, oblimin_criterion, oblimin_rotate,
    select_baseline, write_rotation, TrajectorySet,
};
use crate::btm::{extract_biterms, run_btm_gibbs, TopicDistribution, TopicWordMatrix};
use crate::corpus::{
    build_tokenized_corpus, expand_vocabulary, ingest_documents, normalize_keywords,
    train_embeddings, TokenizedCorpus, Vocabulary,
};
use crate::error::{Error, Result};
use crate::io;
use crate::lsirm::{extract_positions, run_lsirm_mcmc, PositionMatrix};
use crate::render::{render_distance_plot, render_histograms, render_report, render_trajectory_plot};
use crate::rng::derive_seed;
use crate::wordselect::{
    generate_matrix_sequence, logprob_histogram, row_statistics, write_histograms, write_scores,
    TopicHistogram,
};

const DOCUMENTS: &str = "documents.jsonl";
const TOKENS: &str = "tokens.txt";
const VOCABULARY: &str = "vocabulary.txt";
const KEYWORDS: &str = "keywords.txt";
const INGEST_REPORT: &str = "ingest_report.json";
const EMBEDDINGS: &str = "embeddings.csv";
const BTM_CORPUS: &str = "btm_corpus.txt";
const BTM_VOCABULARY: &str = "btm_vocabulary.txt";
const EXPANSION: &str = "expansion.json";
const PHI: &str = "X.csv";
const THETA: &str = "theta.csv";
const SCORES: &str = "word_scores.csv";
const HISTOGRAMS: &str = "histograms.csv";
const SELECTION: &str = "selection_sizes.csv";
const ROTATION: &str = "R.csv";
const TRAJECTORIES: &str = "trajectories.csv";
const DISTANCES: &str = "distances.csv";
const BASELINE: &str = "baseline.json";
const DISTANCE_PLOT: &str = "distance_plot.svg";
const TRAJECTORY_PLOT: &str = "trajectory_plot.svg";
const HISTOGRAM_PLOT: &str = "histograms.svg";
const REPORT_CSV: &str = "report.csv";
const REPORT_TXT: &str = "report.txt";

fn x_file(level: u32) -> String {
    format!("X_{level}.csv")
}

fn a_file(level: u32) -> String {
    format!("A_{level}.csv")
}

fn config_hash<T: Serialize>(section: &T) -> String {
    hash_bytes(
        serde_json::to_string(section)
            .expect("config sections serialize")
            .as_bytes(),
    )
}

fn hash_outputs(out: &Path, names: &[String], map: &mut BTreeMap<String, String>) -> Result<()> {
    for name in names {
        map.insert(name.clone(), hash_file(&out.join(name))?);
    }
    Ok(())
}

/// Hashes of everything a stage will read. Fails with the missing path when
/// a predecessor artifact is absent.
pub(super) fn input_hashes(stage: Stage, cfg: &PipelineConfig) -> Result<BTreeMap<String, String>> {
    let out = &cfg.paths.output;
    let levels = cfg.wordselect.levels()?;
    let mut map = BTreeMap::new();
    let owned = |names: &[&str]| names.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    match stage {
        Stage::Ingest => {
            map.insert("input".into(), hash_file(&cfg.paths.input)?);
            if let Some(stop) = &cfg.paths.stoplist {
                map.insert("stoplist".into(), hash_file(stop)?);
            }
            let c = &cfg.corpus;
            map.insert(
                "config".into(),
                config_hash(&(&c.filter, &c.keywords, c.use_document_keywords)),
            );
        }
        Stage::Embed => {
            hash_outputs(out, &owned(&[TOKENS, VOCABULARY, KEYWORDS]), &mut map)?;
            map.insert(
                "config".into(),
                config_hash(&(&cfg.corpus.embedding, cfg.corpus.neighbors, cfg.threads)),
            );
        }
        Stage::Btm => {
            hash_outputs(out, &owned(&[BTM_CORPUS, BTM_VOCABULARY]), &mut map)?;
            map.insert("config".into(), config_hash(&cfg.btm));
        }
        Stage::Select => {
            hash_outputs(out, &owned(&[PHI]), &mut map)?;
            map.insert("config".into(), config_hash(&cfg.wordselect));
        }
        Stage::Lsirm => {
            let names: Vec<String> = levels.iter().map(|&l| x_file(l)).collect();
            hash_outputs(out, &names, &mut map)?;
            map.insert("config".into(), config_hash(&cfg.lsirm));
        }
        Stage::Align => {
            let names: Vec<String> = levels.iter().map(|&l| a_file(l)).collect();
            hash_outputs(out, &names, &mut map)?;
            map.insert("config".into(), config_hash(&cfg.align));
        }
        Stage::Render => {
            let mut names = owned(&[TRAJECTORIES, BASELINE, PHI, THETA, HISTOGRAMS]);
            names.extend(levels.iter().map(|&l| a_file(l)));
            hash_outputs(out, &names, &mut map)?;
            map.insert(
                "config".into(),
                config_hash(&(&cfg.render, cfg.wordselect.log_cutoff)),
            );
        }
    }
    Ok(map)
}

/// Run one stage; returns the names of the files it wrote.
pub(super) fn execute(stage: Stage, cfg: &PipelineConfig) -> Result<Vec<String>> {
    match stage {
        Stage::Ingest => ingest(cfg),
        Stage::Embed => embed(cfg),
        Stage::Btm => btm(cfg),
        Stage::Select => select(cfg),
        Stage::Lsirm => lsirm(cfg),
        Stage::Align => align(cfg),
        Stage::Render => render(cfg),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Input(format!("cannot serialize {}: {e}", path.display())))?;
    io::write_text(path, &(text + "\n"))
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    if !path.exists() {
        return Err(Error::MissingArtifact(path.to_path_buf()));
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text.lines().filter(|l| !l.is_empty()).map(String::from).collect())
}

fn ingest(cfg: &PipelineConfig) -> Result<Vec<String>> {
    let out = &cfg.paths.output;
    let (docs, report) = ingest_documents(&cfg.paths.input)?;
    let mut filter = cfg.corpus.filter.clone();
    if let Some(stop) = &cfg.paths.stoplist {
        filter = filter.load_stoplist(stop)?;
    }
    let corpus = build_tokenized_corpus(&docs, &filter)?;

    let mut raw: Vec<&str> = cfg.corpus.keywords.iter().map(String::as_str).collect();
    if cfg.corpus.use_document_keywords {
        raw.extend(docs.iter().flat_map(|d| d.keywords.iter().map(String::as_str)));
    }
    let keywords = normalize_keywords(raw, &filter);

    docs.write_jsonl(&out.join(DOCUMENTS))?;
    corpus.write(&out.join(TOKENS))?;
    corpus.vocabulary.write(&out.join(VOCABULARY))?;
    io::write_text(&out.join(KEYWORDS), &keywords.iter().map(|k| format!("{k}\n")).collect::<String>())?;
    write_json(
        &out.join(INGEST_REPORT),
        &serde_json::json!({
            "lines_read": report.lines_read,
            "documents": docs.len(),
            "dropped_empty_abstract": report.dropped_empty_abstract,
            "malformed_lines": report.malformed_lines,
            "duplicate_ids": report.duplicate_ids,
            "tokenized_documents": corpus.num_documents(),
            "vocabulary_size": corpus.vocab_size(),
            "tokens": corpus.num_tokens(),
            "keywords": keywords.len(),
        }),
    )?;
    Ok([DOCUMENTS, TOKENS, VOCABULARY, KEYWORDS, INGEST_REPORT]
        .map(String::from)
        .to_vec())
}

fn embed(cfg: &PipelineConfig) -> Result<Vec<String>> {
    let out = &cfg.paths.output;
    let vocabulary = Vocabulary::read(&out.join(VOCABULARY))?;
    let corpus = TokenizedCorpus::read(&out.join(TOKENS), vocabulary)?;
    let keywords = read_lines(&out.join(KEYWORDS))?;

    let mut emb_cfg = cfg.corpus.embedding.clone();
    emb_cfg.threads = cfg.threads;
    let model = train_embeddings(&corpus, &emb_cfg, derive_seed(cfg.seed, "embed"))?;
    let (expanded, report) = expand_vocabulary(&model, &keywords, cfg.corpus.neighbors);
    let vocab = if report.keywords_found == 0 {
        log::warn!("no keyword found in the embedding vocabulary; keeping the full vocabulary");
        corpus.vocabulary.clone()
    } else {
        expanded
    };
    let restricted = corpus.restrict_to(&vocab)?;

    model.write_csv(&out.join(EMBEDDINGS))?;
    restricted.vocabulary.write(&out.join(BTM_VOCABULARY))?;
    restricted.write(&out.join(BTM_CORPUS))?;
    write_json(
        &out.join(EXPANSION),
        &serde_json::json!({
            "keywords": keywords.len(),
            "keywords_found": report.keywords_found,
            "missing_keywords": report.missing_keywords,
            "vocabulary_size": restricted.vocab_size(),
            "documents": restricted.num_documents(),
        }),
    )?;
    Ok([EMBEDDINGS, BTM_VOCABULARY, BTM_CORPUS, EXPANSION]
        .map(String::from)
        .to_vec())
}

fn btm(cfg: &PipelineConfig) -> Result<Vec<String>> {
    let out = &cfg.paths.output;
    let vocabulary = Vocabulary::read(&out.join(BTM_VOCABULARY))?;
    let corpus = TokenizedCorpus::read(&out.join(BTM_CORPUS), vocabulary)?;
    let mut btm_cfg = cfg.btm.clone();
    btm_cfg.seed = derive_seed(cfg.seed, "btm");
    let biterms = extract_biterms(&corpus, btm_cfg.token_cap)?;
    log::info!(
        "btm: {} biterms over {} words, {} sweeps",
        biterms.total(),
        biterms.vocab_size(),
        btm_cfg.burn_in + btm_cfg.iterations
    );
    let fit = run_btm_gibbs(&biterms, &btm_cfg)?;
    fit.phi.write_csv(&out.join(PHI))?;
    fit.theta.write_csv(&out.join(THETA))?;
    Ok(vec![PHI.into(), THETA.into()])
}

fn select(cfg: &PipelineConfig) -> Result<Vec<String>> {
    let out = &cfg.paths.output;
    let x = TopicWordMatrix::read_csv(&out.join(PHI))?;
    let seq = generate_matrix_sequence(&x, &cfg.wordselect)?;
    let scores = row_statistics(&x)?;
    let hists = logprob_histogram(&x, cfg.wordselect.histogram_bins, cfg.wordselect.log_cutoff)?;

    let mut written = Vec::new();
    for (level, m) in seq.levels.iter().zip(&seq.matrices) {
        let name = x_file(*level);
        m.write_csv(&out.join(&name))?;
        written.push(name);
    }
    write_scores(&out.join(SCORES), &x, &scores)?;
    write_histograms(&out.join(HISTOGRAMS), &hists)?;
    io::write_csv(
        &out.join(SELECTION),
        &["level".to_string(), "words".to_string()],
        seq.levels
            .iter()
            .zip(&seq.matrices)
            .map(|(l, m)| [l.to_string(), m.n_words().to_string()]),
    )?;
    written.extend([SCORES, HISTOGRAMS, SELECTION].map(String::from));
    Ok(written)
}

fn lsirm(cfg: &PipelineConfig) -> Result<Vec<String>> {
    let out = &cfg.paths.output;
    let levels = cfg.wordselect.levels()?;
    let inputs = levels
        .iter()
        .map(|&l| Ok((l, TopicWordMatrix::read_csv(&out.join(x_file(l)))?)))
        .collect::<Result<Vec<_>>>()?;

    let fit_level = |(level, x): &(u32, TopicWordMatrix)| -> Result<Vec<String>> {
        let mut c = cfg.lsirm.clone();
        c.seed = derive_seed(cfg.seed, &format!("lsirm/{level}"));
        let chain = run_lsirm_mcmc(&x.values, &c)
            .map_err(|e| Error::Input(format!("level {level}: {e}")))?;
        let a = extract_positions(&chain, *level, c.reference)?;
        let names = [
            a_file(*level),
            format!("lsirm_trace_{level}.csv"),
            format!("lsirm_acceptance_{level}.csv"),
        ];
        a.write_csv(&out.join(&names[0]))?;
        chain.write_trace(&out.join(&names[1]))?;
        chain.write_acceptance(&out.join(&names[2]))?;
        let acc = chain.acceptance;
        log::info!(
            "lsirm {level}%: {}x{} acceptance theta {:.2} beta {:.2} u {:.2} v {:.2}",
            x.n_words(),
            x.n_topics(),
            acc.theta.rate(),
            acc.beta.rate(),
            acc.u.rate(),
            acc.v.rate()
        );
        Ok(names.to_vec())
    };

    let results: Vec<Result<Vec<String>>> = if cfg.threads <= 1 {
        inputs.iter().map(fit_level).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::Config(format!("cannot start thread pool: {e}")))?;
        pool.install(|| inputs.par_iter().map(fit_level).collect())
    };
    let mut written = Vec::new();
    for r in results {
        written.extend(r?);
    }
    Ok(written)
}

fn read_positions(cfg: &PipelineConfig) -> Result<Vec<PositionMatrix>> {
    cfg.wordselect
        .levels()?
        .into_iter()
        .map(|l| PositionMatrix::read_csv(&super::artifact(cfg, &a_file(l)), l))
        .collect()
}

fn align(cfg: &PipelineConfig) -> Result<Vec<String>> {
    let out = &cfg.paths.output;
    let matrices = read_positions(cfg)?;
    let baseline = select_baseline(&matrices)
        .ok_or_else(|| Error::Input("no position matrices to align".into()))?;
    let aligned = align_all(&matrices, baseline)?;
    let base = aligned
        .iter()
        .find(|m| m.level == baseline)
        .expect("baseline is present");
    let rotation = oblimin_rotate(&base.coords, &cfg.align)?;
    let (rotated, trajectories) = build_trajectories(&aligned, &rotation.rotation)?;

    let mut written = Vec::new();
    for m in &aligned {
        let name = format!("Astar_{}.csv", m.level);
        m.write_csv(&out.join(&name))?;
        written.push(name);
    }
    for m in &rotated {
        let name = format!("B_{}.csv", m.level);
        m.write_csv(&out.join(&name))?;
        written.push(name);
    }
    write_rotation(&out.join(ROTATION), &rotation.rotation)?;
    trajectories.write_csv(&out.join(TRAJECTORIES))?;
    io::write_csv(
        &out.join(DISTANCES),
        &["level".to_string(), "mean_distance".to_string()],
        matrices
            .iter()
            .map(|m| [m.level.to_string(), io::fmt_f64(mean_origin_distance(m))]),
    )?;
    write_json(
        &out.join(BASELINE),
        &serde_json::json!({
            "baseline": baseline,
            "oblimin_converged": rotation.converged,
            "oblimin_iterations": rotation.iterations,
            "criterion_before": io::fmt_f64(oblimin_criterion(&base.coords, cfg.align.gamma).0),
            "criterion_after": io::fmt_f64(*rotation.criterion_trace.last().unwrap_or(&f64::NAN)),
        }),
    )?;
    written.extend([ROTATION, TRAJECTORIES, DISTANCES, BASELINE].map(String::from));
    Ok(written)
}

fn render(cfg: &PipelineConfig) -> Result<Vec<String>> {
    let out = &cfg.paths.output;
    let matrices = read_positions(cfg)?;
    let trajectories = TrajectorySet::read_csv(&out.join(TRAJECTORIES))?;
    let x = TopicWordMatrix::read_csv(&out.join(PHI))?;
    let theta = TopicDistribution::read_csv(&out.join(THETA))?;
    let hists = read_histograms(&out.join(HISTOGRAMS), cfg)?;

    io::write_text(&out.join(DISTANCE_PLOT), &render_distance_plot(&matrices))?;
    io::write_text(
        &out.join(TRAJECTORY_PLOT),
        &render_trajectory_plot(&trajectories, &cfg.render.topic_labels),
    )?;
    io::write_text(
        &out.join(HISTOGRAM_PLOT),
        &render_histograms(&hists, cfg.wordselect.log_cutoff),
    )?;
    let k = cfg.render.top_k.min(x.n_words());
    let report = render_report(&x, &theta, k)?;
    report.write_csv(&out.join(REPORT_CSV))?;
    io::write_text(&out.join(REPORT_TXT), &report.to_text())?;
    Ok([DISTANCE_PLOT, TRAJECTORY_PLOT, HISTOGRAM_PLOT, REPORT_CSV, REPORT_TXT]
        .map(String::from)
        .to_vec())
}

/// Rebuild histograms from their CSV; above-cutoff counts are not stored
/// there, so they are recomputed from X.
fn read_histograms(path: &Path, cfg: &PipelineConfig) -> Result<Vec<TopicHistogram>> {
    let (_, rows) = io::read_csv(path)?;
    let x = TopicWordMatrix::read_csv(&cfg.paths.output.join(PHI))?;
    let fresh = logprob_histogram(&x, cfg.wordselect.histogram_bins, cfg.wordselect.log_cutoff)?;
    let mut hists: Vec<TopicHistogram> = Vec::new();
    for row in &rows {
        let topic: usize = row[0]
            .parse::<usize>()
            .map_err(|_| Error::Input(format!("{}: bad topic `{}`", path.display(), row[0])))?;
        let left = io::parse_f64(&row[1], path)?;
        let right = io::parse_f64(&row[2], path)?;
        let count: usize = row[3]
            .parse()
            .map_err(|_| Error::Input(format!("{}: bad count `{}`", path.display(), row[3])))?;
        match hists.last_mut() {
            Some(h) if h.topic + 1 == topic => {
                h.edges.push(right);
                h.counts.push(count);
            }
            _ => hists.push(TopicHistogram {
                topic: topic - 1,
                edges: vec![left, right],
                counts: vec![count],
                above_cutoff: fresh.get(topic - 1).map_or(0, |h| h.above_cutoff),
            }),
        }
    }
    Ok(hists)
}
