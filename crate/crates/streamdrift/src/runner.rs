//! Executes resolved experiment configs and writes their artifacts.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use streamdrift_core::eval::{prequential_run, Clock, RunOutput};
use streamdrift_core::generators::{HyperplaneConfig, HyperplaneStream, RandomTreeStream, RtgConfig};
use streamdrift_core::normalize::{normalize, Normalization};
use streamdrift_core::rng::RNG_NAME;
use streamdrift_core::StreamSource;

use crate::config::{ExperimentConfig, NormalizationName, StreamSpec};
use crate::error::{Error, Result};
use crate::ingest::{load_dataset, Dataset, DatasetStream};
use crate::learners::build_learner;
use crate::output::{emit_csv, emit_trajectory, SummaryFile};
use crate::plot::{emit_plot, PlotSpec, Series};

/// Monotonic wall clock.
#[derive(Debug, Clone, Copy)]
pub struct StdClock(Instant);

impl StdClock {
    pub fn new() -> Self {
        StdClock(Instant::now())
    }
}

impl Default for StdClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for StdClock {
    fn now_ns(&mut self) -> u64 {
        self.0.elapsed().as_nanos() as u64
    }
}

pub type BoxedStream = Box<dyn StreamSource + Send>;

/// Builds the stream for one run. Dataset streams replay `data`.
pub fn build_stream(spec: &StreamSpec, seed: u64, data: Option<&Arc<Dataset>>) -> Result<BoxedStream> {
    Ok(match spec {
        StreamSpec::Hyperplane(h) => Box::new(HyperplaneStream::new(HyperplaneConfig {
            d: h.d,
            kind: h.kind(),
            schedule: spec.schedule()?,
            seed,
        })?),
        StreamSpec::Rtg(r) => Box::new(RandomTreeStream::new(RtgConfig {
            d: r.d,
            classes: r.classes,
            depth: r.depth,
            total: r.total,
            seed,
        })?),
        StreamSpec::Dataset(ds) => {
            let data = data.ok_or_else(|| Error::invalid("stream.dataset", "dataset not loaded"))?;
            let stream = DatasetStream::new(Arc::clone(data));
            Box::new(match ds.limit {
                Some(n) => stream.with_limit(n as usize),
                None => stream,
            })
        }
    })
}

/// Loads the dataset behind a dataset stream, if any.
pub fn load_stream_data(spec: &StreamSpec) -> Result<Option<Arc<Dataset>>> {
    match spec {
        StreamSpec::Dataset(ds) => Ok(Some(Arc::new(load_dataset(&ds.dataset)?))),
        _ => Ok(None),
    }
}

/// Result of one (learner, seed) run.
#[derive(Debug)]
pub struct RunResult {
    pub learner_index: usize,
    pub seed: u64,
    pub output: RunOutput,
    pub meta: Vec<(String, String)>,
}

impl RunResult {
    pub fn learner(&self) -> &str {
        &self.output.summary.learner
    }

    pub fn file_stem(&self) -> String {
        let id: String = self
            .learner()
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
            .collect();
        format!("{:02}-{}-seed{}", self.learner_index, id.trim_end_matches('_'), self.seed)
    }
}

fn stream_meta(config: &ExperimentConfig, seed: u64) -> Vec<(String, String)> {
    let mut meta = vec![
        ("experiment".to_string(), config.name.clone()),
        ("seed".to_string(), seed.to_string()),
        ("rng".to_string(), RNG_NAME.to_string()),
    ];
    match &config.stream {
        StreamSpec::Hyperplane(h) => {
            meta.push(("drift".into(), format!("{:?}", h.drift).to_lowercase()));
            meta.push(("d".into(), h.d.to_string()));
            meta.push(("angle".into(), h.angle.to_string()));
            meta.push(("rotation_plane".into(), "0,1".into()));
        }
        StreamSpec::Rtg(r) => {
            meta.push(("rtg_depth".into(), r.depth.to_string()));
            meta.push(("d".into(), r.d.to_string()));
        }
        StreamSpec::Dataset(ds) => {
            meta.push(("dataset".into(), ds.dataset.path.display().to_string()));
        }
    }
    if let Ok(s) = config.stream.schedule() {
        meta.push(("tau0".into(), s.tau0.to_string()));
        meta.push(("tau1".into(), s.tau1.to_string()));
        meta.push(("tau2".into(), s.tau2.to_string()));
    }
    meta
}

/// One prequential run of learner `index` with `seed`.
pub fn run_one(config: &ExperimentConfig, index: usize, seed: u64, data: Option<&Arc<Dataset>>) -> Result<RunResult> {
    let spec = &config.learners[index];
    let stream = build_stream(&config.stream, seed, data)?;
    let (d, classes) = (stream.dim(), stream.classes());
    let mut learner = build_learner(spec, d, classes)?;
    let norm: Normalization = spec.normalization.unwrap_or(NormalizationName::None).into();
    let mut stream = normalize(stream, norm);
    let mut eval = config.eval_config()?;
    // trajectories only exist for learners exposing input-space weights
    eval.record_trajectory &= learner.weights().is_some() && stream.true_theta().is_ok();
    let output = prequential_run(&mut learner, &mut stream, &eval, &mut StdClock::new())?;
    let mut meta = stream_meta(config, seed);
    meta.push(("normalization".into(), norm.name().to_string()));
    meta.push(("window".into(), eval.window.to_string()));
    meta.push(("timing".into(), eval.timing.to_string()));
    for w in data.map(|d| d.warnings.as_slice()).unwrap_or_default() {
        meta.push(("warning".into(), w.clone()));
    }
    Ok(RunResult {
        learner_index: index,
        seed,
        output,
        meta,
    })
}

/// Runs every (learner, seed) pair, in parallel when `jobs != 1`
/// (`0` lets the thread pool pick). Results come back in config order.
pub fn run_all(config: &ExperimentConfig, jobs: usize) -> Result<Vec<RunResult>> {
    let data = load_stream_data(&config.stream)?;
    let pairs: Vec<(usize, u64)> = config
        .seeds
        .iter()
        .flat_map(|&s| (0..config.learners.len()).map(move |i| (i, s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::invalid("jobs", e.to_string()))?;
    pool.install(|| {
        pairs
            .par_iter()
            .map(|&(i, s)| run_one(config, i, s, data.as_ref()))
            .collect()
    })
}

/// Files produced for one experiment.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub csvs: Vec<PathBuf>,
    pub plots: Vec<PathBuf>,
    pub config: PathBuf,
}

/// Writes per-run CSVs and summaries, per-seed plots and the resolved config.
pub fn write_artifacts(config: &ExperimentConfig, results: &[RunResult], dir: &Path) -> Result<Artifacts> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut artifacts = Artifacts {
        config: dir.join("config.toml"),
        ..Artifacts::default()
    };
    fs::write(&artifacts.config, config.to_toml()).map_err(|e| Error::io(&artifacts.config, e))?;
    for r in results {
        let path = dir.join(format!("{}.csv", r.file_stem()));
        let summary = SummaryFile {
            summary: r.output.summary.clone(),
            meta: r.meta.clone(),
        };
        emit_csv(&r.output.records, &summary, &path)?;
        if !r.output.trajectory.is_empty() {
            emit_trajectory(&r.output.trajectory, &dir.join(format!("{}.trajectory.csv", r.file_stem())))?;
        }
        artifacts.csvs.push(path);
    }
    for &seed in &config.seeds {
        let runs: Vec<&RunResult> = results.iter().filter(|r| r.seed == seed).collect();
        let accuracy: Vec<Series> = runs
            .iter()
            .filter(|r| !r.output.records.is_empty())
            .map(|r| Series {
                label: r.learner().to_string(),
                points: r.output.records.iter().map(|x| (x.t as f64, x.window_accuracy)).collect(),
            })
            .collect();
        if !accuracy.is_empty() {
            let path = dir.join(format!("accuracy-seed{seed}.svg"));
            emit_plot(&PlotSpec::accuracy(format!("{} (seed {seed})", config.name)), &accuracy, &path)?;
            artifacts.plots.push(path);
        }
        let tracking: Vec<Series> = runs
            .iter()
            .filter(|r| r.output.records.iter().any(|x| x.tracking_error.is_some()))
            .map(|r| Series {
                label: r.learner().to_string(),
                points: r
                    .output
                    .records
                    .iter()
                    .filter_map(|x| x.tracking_error.map(|e| (x.t as f64, e)))
                    .collect(),
            })
            .collect();
        if !tracking.is_empty() {
            let path = dir.join(format!("tracking-seed{seed}.svg"));
            emit_plot(&PlotSpec::tracking(format!("{} tracking error (seed {seed})", config.name)), &tracking, &path)?;
            artifacts.plots.push(path);
        }
    }
    Ok(artifacts)
}

/// Resolves, runs and writes one experiment into `dir`.
pub fn execute(config: ExperimentConfig, dir: &Path, jobs: usize) -> Result<(ExperimentConfig, Vec<RunResult>, Artifacts)> {
    let config = config.resolve()?;
    let results = run_all(&config, jobs)?;
    let artifacts = write_artifacts(&config, &results, dir)?;
    Ok((config, results, artifacts))
}

/// Plain-text table of overall accuracy and time per run.
pub fn summary_table(results: &[RunResult]) -> String {
    let mut out = format!("{:<16} {:>6} {:>10} {:>12} {:>8}\n", "learner", "seed", "accuracy", "total_ms", "size");
    for r in results {
        let s = &r.output.summary;
        out.push_str(&format!(
            "{:<16} {:>6} {:>10.4} {:>12.3} {:>8}\n",
            s.learner,
            r.seed,
            s.overall_accuracy,
            s.total_ns as f64 / 1e6,
            s.final_model_size
        ));
    }
    out
}

