//! End-to-end generation into a dataset directory, plus the manifest,
//! split assignment and corpus statistics built on top of it.

mod config;
mod stats;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use chrono::Duration;
use log::{debug, info};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::answer::solve;
use crate::chart::{build_chart, format_chart_id, ChartFamily, ChartInfo, ChartOptions, ChartSubtype, ColorCatalog};
use crate::debias::{debias, BiasReport};
use crate::document::{compose_page, write_annotation, Annotation, FillerText, ImagePool, PageInputs, QaPair};
use crate::hierarchy::{build_hierarchy, bundled_hierarchy, parse_edge_list, EntityHierarchy};
use crate::question::{bundled_registry, fill_values, instantiate, load_registry, QuestionInfo, QuestionType, QuestionTemplate, Split};
use crate::render::render;
use crate::rng::{derive_seed, hash_key, stage_rng};
use crate::table::{bundled_real_pool, ingest_csv, pick_table, DataTable};

pub use config::{GenConfig, InputPaths, QuestionTarget, SplitRatios};
pub use stats::{stats, CountTable, StatsReport};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const STATS_FILE: &str = "stats.json";
pub const BIAS_REPORT_FILE: &str = "bias_report.json";
pub const SPLITS_FILE: &str = "splits.json";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("document {index}: {message}")]
    Doc { index: usize, message: String },
    #[error("manifest mismatch: {0}")]
    ManifestMismatch(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io { path: path.to_path_buf(), source }
}

fn input_err(path: &Path, message: impl ToString) -> PipelineError {
    PipelineError::Input { path: path.to_path_buf(), message: message.to_string() }
}

pub(crate) fn write_file(root: &Path, rel: &str, bytes: &[u8]) -> Result<(), PipelineError> {
    let path = root.join(rel);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    fs::write(&path, bytes).map_err(io_err(&path))
}

pub(crate) fn read_file(root: &Path, rel: &str) -> Result<String, PipelineError> {
    let path = root.join(rel);
    fs::read_to_string(&path).map_err(io_err(&path))
}

/// Loaded generation inputs.
pub struct Inputs {
    pub hierarchy: EntityHierarchy,
    pub catalog: ColorCatalog,
    pub registry: Vec<QuestionTemplate>,
    pub pool: ImagePool,
    /// Pool file contents by name, copied into the dataset.
    pub pool_files: Vec<(String, String)>,
    pub real_tables: Vec<DataTable>,
}

impl Inputs {
    pub fn load(paths: &InputPaths) -> Result<Inputs, PipelineError> {
        let read = |p: &Path| fs::read_to_string(p).map_err(io_err(p));
        let hierarchy = match &paths.hierarchy {
            None => bundled_hierarchy(),
            Some(p) if p.extension().is_some_and(|e| e == "json") => EntityHierarchy::from_json(&read(p)?).map_err(|e| input_err(p, e))?,
            Some(p) => {
                let edges = parse_edge_list(&read(p)?).map_err(|e| input_err(p, e))?;
                build_hierarchy(&edges).map_err(|e| input_err(p, e))?
            }
        };
        let catalog = match &paths.color_catalog {
            None => ColorCatalog::bundled(),
            Some(p) => ColorCatalog::parse(&read(p)?).map_err(|e| input_err(p, e))?,
        };
        let registry = match &paths.registry {
            None => bundled_registry(),
            Some(p) => load_registry(&read(p)?).map_err(|e| input_err(p, e))?,
        };
        let (pool, pool_files) = match &paths.image_pool {
            None => (
                ImagePool::bundled(),
                crate::bundled::IMAGE_POOL.iter().map(|(n, t)| (n.to_string(), t.to_string())).collect(),
            ),
            Some(dir) => {
                let pool = ImagePool::from_dir(dir).map_err(|e| input_err(dir, e))?;
                let files = pool
                    .images
                    .iter()
                    .map(|i| Ok((i.name.clone(), read(&dir.join(&i.name))?)))
                    .collect::<Result<Vec<_>, PipelineError>>()?;
                (pool, files)
            }
        };
        let real_tables = match &paths.real_tables {
            None => bundled_real_pool(),
            Some(dir) => {
                let mut files: Vec<PathBuf> = fs::read_dir(dir)
                    .map_err(io_err(dir))?
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|p| p.extension().is_some_and(|e| e == "csv"))
                    .collect();
                files.sort();
                files
                    .iter()
                    .map(|p| ingest_csv(fs::File::open(p).map_err(io_err(p))?).map_err(|e| input_err(p, e)))
                    .collect::<Result<Vec<_>, _>>()?
            }
        };
        Ok(Inputs { hierarchy, catalog, registry, pool, pool_files, real_tables })
    }
}

/// Weyl step of the split sequence (golden ratio conjugate).
const SPLIT_STEP: f64 = 0.618_033_988_749_894_9;
/// Weyl step of the family sequence; rationally independent of [`SPLIT_STEP`]
/// so split and family stay uncorrelated.
const FAMILY_STEP: f64 = std::f64::consts::SQRT_2 - 1.0;

fn unit(h: u64) -> f64 {
    (h >> 11) as f64 / (1u64 << 53) as f64
}

/// Point `k` of the seeded Weyl sequence `frac(offset + k * step)`. Any run
/// of consecutive indices covers `[0, 1)` evenly, so proportions drawn from
/// it hold to within a few documents at every corpus size.
fn weyl(k: u64, step: f64, master_seed: u64, stream: &str) -> f64 {
    (unit(hash_key(master_seed, stream)) + (k as f64 * step).fract()).fract()
}

/// Sequence position of a document: the numeric suffix of its id, or a hash
/// of the id when it has none.
fn doc_position(doc_id: &str) -> u64 {
    let digits = doc_id.trim_start_matches(|c: char| !c.is_ascii_digit());
    digits.parse().unwrap_or_else(|_| hash_key(0, doc_id))
}

/// Split of a document, stable for a given `(doc_id, master_seed)`.
pub fn assign_split(doc_id: &str, ratios: &SplitRatios, master_seed: u64) -> Split {
    let u = weyl(doc_position(doc_id), SPLIT_STEP, master_seed, "split");
    if u < ratios.train {
        Split::Train
    } else if u < ratios.train + ratios.val {
        Split::Val
    } else {
        Split::Test
    }
}

pub fn doc_id(index: usize) -> String {
    format!("doc_{index:06}")
}

pub fn chart_path(chart_id: &str) -> String {
    format!("charts/{chart_id}.svg")
}

pub fn chart_info_path(chart_id: &str) -> String {
    format!("charts/{chart_id}.json")
}

pub fn table_path(table_id: &str) -> String {
    format!("tables/{table_id}.csv")
}

pub fn page_path(doc_id: &str) -> String {
    format!("docs/{doc_id}.svg")
}

pub fn annotation_path(doc_id: &str) -> String {
    format!("annotations/{doc_id}.xml")
}

pub fn qa_path(split: Split) -> String {
    format!("qa/{split}.jsonl")
}

/// Questions for one chart: a shuffled walk over the applicable templates,
/// taking each one whose fills solve, until the drawn target is met.
pub fn questions_for_chart<R: Rng + ?Sized>(
    info: &ChartInfo,
    registry: &[QuestionTemplate],
    target: QuestionTarget,
    rng: &mut R,
) -> Vec<QuestionInfo> {
    let mut candidates: Vec<&QuestionTemplate> = registry
        .iter()
        .filter(|t| t.applies_to(info.chart_type) && (t.question_type != QuestionType::CommonSense || info.has_taxonomy()))
        .collect();
    candidates.shuffle(rng);
    let want = rng.gen_range(target.min..=target.max);
    let mut out = Vec::with_capacity(want);
    for t in candidates {
        if out.len() == want {
            break;
        }
        for _ in 0..3 {
            let Ok(mut q) = instantiate(t, info, rng) else { break };
            if let Ok(answer) = solve(&t.program, &fill_values(t, &q.fills), info) {
                q.answer = Some(answer);
                out.push(q);
                break;
            }
        }
    }
    out.sort_by_key(|q| q.template_id);
    out
}

/// Per-document output kept in memory until the corpus is merged.
struct DocOutput {
    doc_id: String,
    split: Split,
    info: ChartInfo,
    table_rows: Vec<Vec<String>>,
    table_csv: String,
    questions: Vec<QuestionInfo>,
    record: crate::document::DocumentRecord,
}

/// Family of document `index`, read off the family sequence through the
/// cumulative weights.
fn pick_family(index: usize, cfg: &GenConfig) -> ChartFamily {
    let weights: Vec<f64> = ChartFamily::ALL.iter().map(|f| cfg.family_weights.get(f).copied().unwrap_or(0.0)).collect();
    let target = weyl(index as u64, FAMILY_STEP, cfg.master_seed, "family") * weights.iter().sum::<f64>();
    let mut acc = 0.0;
    for (f, w) in ChartFamily::ALL.iter().zip(&weights) {
        acc += w;
        if target < acc && *w > 0.0 {
            return *f;
        }
    }
    *ChartFamily::ALL.iter().zip(&weights).rev().find(|(_, w)| **w > 0.0).unwrap().0
}

fn generate_doc(index: usize, cfg: &GenConfig, inputs: &Inputs, out: &Path) -> Result<DocOutput, PipelineError> {
    let doc_id = doc_id(index);
    let family = pick_family(index, cfg);
    let clock = cfg.clock()? + Duration::seconds(index as i64);
    let mut last_error = String::new();
    for attempt in 0..cfg.doc_attempts {
        let mut rng = stage_rng(cfg.master_seed, index as u64, &format!("doc/{attempt}"));
        let subtype = ChartSubtype::sample_in(family, &mut rng);
        let table = match pick_table(&inputs.real_tables, &inputs.hierarchy, subtype.row_rule(), &cfg.shape, &mut rng) {
            Ok(t) => t,
            Err(e) => {
                last_error = format!("table: {e}");
                continue;
            }
        };
        let chart_id = format_chart_id(cfg.machine, clock, rng.gen_range(0..10), subtype);
        let (spec, info) = match build_chart(table.clone(), subtype, chart_id, &ChartOptions::default(), &inputs.catalog, &mut rng) {
            Ok(x) => x,
            Err(e) => {
                last_error = format!("chart: {e}");
                continue;
            }
        };
        let svg = match render(&spec) {
            Ok(s) => s,
            Err(e) => {
                last_error = format!("render: {e}");
                continue;
            }
        };
        let mut questions = questions_for_chart(&info, &inputs.registry, cfg.questions_per_chart, &mut rng);
        if questions.is_empty() {
            last_error = "no template produced a solvable question".into();
            continue;
        }
        let chart_file = chart_path(&info.chart_id);
        let page_inputs = PageInputs {
            doc_id: &doc_id,
            chart: &svg,
            chart_path: &chart_file,
            info: &info,
            pool: &inputs.pool,
            text: &FillerText,
            link_prefix: "../",
        };
        let (mut record, page) = match compose_page(&page_inputs, &cfg.layout, &mut rng) {
            Ok(x) => x,
            Err(e) => {
                last_error = format!("layout: {e}");
                continue;
            }
        };
        if attempt > 0 {
            debug!("{doc_id}: accepted on attempt {}", attempt + 1);
        }
        let split = assign_split(&doc_id, &cfg.splits, cfg.master_seed);
        for q in &mut questions {
            q.split = split;
        }
        record.question_ids = questions.iter().map(|q| q.question_id.clone()).collect();
        write_file(out, &chart_file, svg.to_svg_string().as_bytes())?;
        write_file(out, &page_path(&doc_id), page.as_bytes())?;
        return Ok(DocOutput {
            doc_id,
            split,
            table_rows: table.to_rows(),
            table_csv: table.to_csv(),
            info,
            questions,
            record,
        });
    }
    Err(PipelineError::Doc { index, message: format!("gave up after {} attempts; last error: {last_error}", cfg.doc_attempts) })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactCounts {
    pub charts: usize,
    pub tables: usize,
    pub docs: usize,
    pub annotations: usize,
    pub questions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format_version: u32,
    pub config: GenConfig,
    pub counts: ArtifactCounts,
    /// Every corpus file except the manifest itself, sorted by path.
    pub files: Vec<FileEntry>,
    /// SHA-256 over the sorted `path sha256` lines of `files`.
    pub digest: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn list_files(root: &Path) -> Result<Vec<String>, PipelineError> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<String>) -> Result<(), PipelineError> {
        for entry in fs::read_dir(dir).map_err(io_err(dir))? {
            let path = entry.map_err(io_err(dir))?.path();
            if path.is_dir() {
                walk(root, &path, out)?;
            } else {
                let rel = path.strip_prefix(root).unwrap().components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
                if rel != MANIFEST_FILE {
                    out.push(rel);
                }
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    walk(root, root, &mut out)?;
    out.sort();
    Ok(out)
}

fn digest_of(files: &[FileEntry]) -> String {
    let mut h = Sha256::new();
    for f in files {
        h.update(format!("{} {}\n", f.path, f.sha256));
    }
    hex::encode(h.finalize())
}

fn count_files(files: &[FileEntry], questions: usize) -> ArtifactCounts {
    let n = |prefix: &str, ext: &str| files.iter().filter(|f| f.path.starts_with(prefix) && f.path.ends_with(ext)).count();
    ArtifactCounts {
        charts: n("charts/", ".svg"),
        tables: n("tables/", ".csv"),
        docs: n("docs/", ".svg"),
        annotations: n("annotations/", ".xml"),
        questions,
    }
}

/// Lists and hashes every file under `root` and writes the manifest.
pub fn write_manifest(root: &Path, config: &GenConfig) -> Result<DatasetManifest, PipelineError> {
    let paths = list_files(root)?;
    let files = paths
        .par_iter()
        .map(|rel| {
            let path = root.join(rel);
            let bytes = fs::read(&path).map_err(io_err(&path))?;
            Ok(FileEntry { path: rel.clone(), bytes: bytes.len() as u64, sha256: sha256_hex(&bytes) })
        })
        .collect::<Result<Vec<_>, PipelineError>>()?;
    let questions = read_corpus(root)?.len();
    let manifest = DatasetManifest {
        format_version: 1,
        config: config.clone(),
        counts: count_files(&files, questions),
        digest: digest_of(&files),
        files,
    };
    write_file(root, MANIFEST_FILE, to_json(&manifest).as_bytes())?;
    Ok(manifest)
}

pub fn read_manifest(root: &Path) -> Result<DatasetManifest, PipelineError> {
    let text = fs::read_to_string(root.join(MANIFEST_FILE))
        .map_err(|e| PipelineError::ManifestMismatch(format!("cannot read {}: {e}", root.join(MANIFEST_FILE).display())))?;
    serde_json::from_str(&text).map_err(|e| PipelineError::ManifestMismatch(format!("{MANIFEST_FILE}: {e}")))
}

/// Checks the manifest against the files on disk: same listing, same
/// digests, same counts.
pub fn verify_manifest(root: &Path) -> Result<DatasetManifest, PipelineError> {
    let m = read_manifest(root)?;
    let on_disk = list_files(root)?;
    let listed: Vec<&str> = m.files.iter().map(|f| f.path.as_str()).collect();
    if on_disk.iter().map(String::as_str).ne(listed.iter().copied()) {
        let a: BTreeSet<&str> = on_disk.iter().map(String::as_str).collect();
        let b: BTreeSet<&str> = listed.iter().copied().collect();
        let extra: Vec<_> = a.difference(&b).take(3).collect();
        let missing: Vec<_> = b.difference(&a).take(3).collect();
        return Err(PipelineError::ManifestMismatch(format!("unlisted files {extra:?}, missing files {missing:?}")));
    }
    let bad = m.files.par_iter().find_any(|f| fs::read(root.join(&f.path)).map(|b| sha256_hex(&b) != f.sha256).unwrap_or(true));
    if let Some(f) = bad {
        return Err(PipelineError::ManifestMismatch(format!("{} does not match its digest", f.path)));
    }
    if digest_of(&m.files) != m.digest {
        return Err(PipelineError::ManifestMismatch("manifest digest does not match its file list".into()));
    }
    let counts = count_files(&m.files, read_corpus(root)?.len());
    if counts != m.counts {
        return Err(PipelineError::ManifestMismatch(format!("counts {:?} differ from files on disk {counts:?}", m.counts)));
    }
    Ok(m)
}

pub(crate) fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn write_qa(root: &Path, corpus: &[QuestionInfo]) -> Result<(), PipelineError> {
    for split in Split::ALL {
        let mut text = String::new();
        for q in corpus.iter().filter(|q| q.split == *split) {
            text.push_str(&serde_json::to_string(q).expect("serializable"));
            text.push('\n');
        }
        write_file(root, &qa_path(*split), text.as_bytes())?;
    }
    Ok(())
}

/// All questions of a dataset, in split then file order.
pub fn read_corpus(root: &Path) -> Result<Vec<QuestionInfo>, PipelineError> {
    let mut out = Vec::new();
    for split in Split::ALL {
        let rel = qa_path(*split);
        let path = root.join(&rel);
        if !path.exists() {
            continue;
        }
        for (n, line) in read_file(root, &rel)?.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let q: QuestionInfo = serde_json::from_str(line).map_err(|e| input_err(&path, format!("line {}: {e}", n + 1)))?;
            out.push(q);
        }
    }
    Ok(out)
}

pub fn read_chart_info(root: &Path, chart_id: &str) -> Result<ChartInfo, PipelineError> {
    let rel = chart_info_path(chart_id);
    serde_json::from_str(&read_file(root, &rel)?).map_err(|e| input_err(&root.join(rel), e))
}

/// Writes one annotation per document from its record, table and the current
/// answers in `corpus`.
fn write_annotations(
    root: &Path,
    records: &[(crate::document::DocumentRecord, Vec<Vec<String>>)],
    corpus: &[QuestionInfo],
) -> Result<(), PipelineError> {
    let by_id: BTreeMap<&str, &QuestionInfo> = corpus.iter().map(|q| (q.question_id.as_str(), q)).collect();
    records.par_iter().try_for_each(|(record, table)| {
        let qa = record
            .question_ids
            .iter()
            .filter_map(|id| by_id.get(id.as_str()))
            .map(|q| QaPair {
                question_id: q.question_id.clone(),
                question: q.question.clone(),
                answer: q.answer.as_ref().map(|a| a.to_string()).unwrap_or_default(),
            })
            .collect();
        let a = Annotation { record: record.clone(), table: table.clone(), qa };
        write_file(root, &annotation_path(&record.doc_id), write_annotation(&a).as_bytes())
    })
}

/// Runs the whole pipeline into `out`, which must exist and be empty.
pub fn generate(cfg: &GenConfig, out: &Path) -> Result<DatasetManifest, PipelineError> {
    generate_with(cfg, &Inputs::load(&cfg.inputs)?, out)
}

pub fn generate_with(cfg: &GenConfig, inputs: &Inputs, out: &Path) -> Result<DatasetManifest, PipelineError> {
    cfg.validate()?;
    fs::create_dir_all(out).map_err(io_err(out))?;
    info!("generating {} documents into {}", cfg.doc_count, out.display());
    let docs = (0..cfg.doc_count)
        .into_par_iter()
        .map(|i| generate_doc(i, cfg, inputs, out))
        .collect::<Result<Vec<DocOutput>, PipelineError>>()?;

    let mut charts = BTreeMap::new();
    let mut corpus = Vec::new();
    let mut splits: BTreeMap<Split, Vec<String>> = Split::ALL.iter().map(|s| (*s, Vec::new())).collect();
    let mut records = Vec::with_capacity(docs.len());
    for d in docs {
        write_file(out, &table_path(&d.info.table_id), d.table_csv.as_bytes())?;
        write_file(out, &chart_info_path(&d.info.chart_id), to_json(&d.info).as_bytes())?;
        splits.get_mut(&d.split).unwrap().push(d.doc_id.clone());
        corpus.extend(d.questions);
        records.push((d.record, d.table_rows));
        charts.insert(d.info.chart_id.clone(), d.info);
    }
    for (name, text) in &inputs.pool_files {
        write_file(out, &format!("{}/{name}", inputs.pool.dir), text.as_bytes())?;
    }
    write_file(out, SPLITS_FILE, to_json(&splits).as_bytes())?;

    info!("debiasing {} questions", corpus.len());
    let (corpus, report) = debias(corpus, &charts, &inputs.registry, derive_seed(cfg.master_seed, 0, "debias"), cfg.debias_max_attempts);
    write_outputs(out, cfg, &records, &corpus, &report)
}

fn write_outputs(
    out: &Path,
    cfg: &GenConfig,
    records: &[(crate::document::DocumentRecord, Vec<Vec<String>>)],
    corpus: &[QuestionInfo],
    report: &BiasReport,
) -> Result<DatasetManifest, PipelineError> {
    write_qa(out, corpus)?;
    write_annotations(out, records, corpus)?;
    write_file(out, BIAS_REPORT_FILE, to_json(report).as_bytes())?;
    // The stats file is listed in the manifest, so it is computed from the
    // corpus files before the manifest is written.
    let _ = fs::remove_file(out.join(STATS_FILE));
    let report = stats::compute(out)?;
    write_file(out, STATS_FILE, to_json(&report).as_bytes())?;
    write_manifest(out, cfg)
}

/// Re-runs debiasing over an existing dataset and rewrites the question
/// files, annotations, reports and manifest in place.
pub fn debias_dataset(root: &Path, max_attempts: Option<usize>) -> Result<(DatasetManifest, BiasReport), PipelineError> {
    let manifest = verify_manifest(root)?;
    let cfg = manifest.config;
    let inputs = Inputs::load(&cfg.inputs)?;
    let corpus = read_corpus(root)?;
    let chart_ids: BTreeSet<&str> = corpus.iter().map(|q| q.chart_id.as_str()).collect();
    let charts = chart_ids
        .into_iter()
        .map(|id| Ok((id.to_string(), read_chart_info(root, id)?)))
        .collect::<Result<BTreeMap<_, _>, PipelineError>>()?;
    let attempts = max_attempts.unwrap_or(cfg.debias_max_attempts);
    let (corpus, report) = debias(corpus, &charts, &inputs.registry, derive_seed(cfg.master_seed, 1, "debias"), attempts);
    let records = read_records(root)?;
    let manifest = write_outputs(root, &cfg, &records, &corpus, &report)?;
    Ok((manifest, report))
}

fn read_records(root: &Path) -> Result<Vec<(crate::document::DocumentRecord, Vec<Vec<String>>)>, PipelineError> {
    let dir = root.join("annotations");
    let mut files: Vec<String> = fs::read_dir(&dir)
        .map_err(io_err(&dir))?
        .filter_map(|e| e.ok().map(|e| e.file_name().to_string_lossy().into_owned()))
        .filter(|n| n.ends_with(".xml"))
        .collect();
    files.sort();
    files
        .iter()
        .map(|name| {
            let rel = format!("annotations/{name}");
            let a = crate::document::parse_annotation(&read_file(root, &rel)?).map_err(|e| input_err(&root.join(&rel), e))?;
            Ok((a.record, a.table))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_assignment_is_stable_and_proportional() {
        let r = SplitRatios::default();
        let mut counts = BTreeMap::new();
        for i in 0..20_000 {
            let id = doc_id(i);
            let s = assign_split(&id, &r, 3);
            assert_eq!(s, assign_split(&id, &r, 3));
            *counts.entry(s).or_insert(0usize) += 1;
        }
        let frac = |s| counts[&s] as f64 / 20_000.0;
        assert!((frac(Split::Train) - 0.8).abs() < 0.01);
        assert!((frac(Split::Val) - 0.1).abs() < 0.01);
        let all_train = SplitRatios { train: 1.0, val: 0.0, test: 0.0 };
        assert!((0..500).all(|i| assign_split(&doc_id(i), &all_train, 9) == Split::Train));
    }

    #[test]
    fn small_run_writes_a_consistent_dataset() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = GenConfig { doc_count: 3, master_seed: 5, ..GenConfig::default() };
        let m = generate(&cfg, dir.path()).unwrap();
        assert_eq!(m.counts.docs, 3);
        assert_eq!(m.counts.charts, 3);
        assert_eq!(m.counts.annotations, 3);
        assert!(m.counts.questions >= 3);
        verify_manifest(dir.path()).unwrap();
    }
}
