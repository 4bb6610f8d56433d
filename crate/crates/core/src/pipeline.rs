//! End-to-end runs that write the published tables as CSV, with JSON
//! checkpoints between the stages of the line problem and a manifest per run.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::FactorConfig;
use crate::fixtures;
use crate::line_problem::{
    bucket_counts, cutoff_row, enumerate_candidates, floor_u, interval_rows, sieve_cascade, Candidate,
    CutoffRow, FixtureDiff, IntervalRow,
};
use crate::sieves::ModifiedForm;
use crate::sum_problem::{
    exception_pairs, grid_matrix, trivial_grid, witness_grid, CellStatus, Endpoint, GridCell, WitnessFilter,
    MAX_N,
};

/// Environment variable that overrides the checkpoint directory.
pub const CACHE_ENV: &str = "OMEGA_BOUNDS_CACHE";

/// Degree of the line problem handled by `line5`.
pub const LINE_DEGREE: u64 = 5;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub output_dir: PathBuf,
    pub checkpoint_dir: PathBuf,
    pub workers: usize,
    pub rho_seed: Option<u64>,
    pub effort_cap: u64,
    pub modified_form: ModifiedForm,
    pub endpoint: Endpoint,
    pub witness_filter: WitnessFilter,
    /// Wall-clock timings make manifests differ between runs, so they are
    /// only recorded on request.
    pub record_timings: bool,
}

impl RunConfig {
    /// Defaults for `output_dir`; checkpoints go to `$OMEGA_BOUNDS_CACHE` if
    /// set, else `output_dir/checkpoints`.
    pub fn new(output_dir: impl Into<PathBuf>) -> Self {
        let output_dir = output_dir.into();
        let checkpoint_dir = std::env::var_os(CACHE_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| output_dir.join("checkpoints"));
        RunConfig {
            output_dir,
            checkpoint_dir,
            workers: 1,
            rho_seed: None,
            effort_cap: FactorConfig::default().effort_cap,
            modified_form: ModifiedForm::default(),
            endpoint: Endpoint::default(),
            witness_filter: WitnessFilter::default(),
            record_timings: false,
        }
    }

    pub fn factor_config(&self) -> FactorConfig {
        FactorConfig {
            effort_cap: self.effort_cap,
            seed: self.rho_seed,
        }
    }

    /// Runs `f` on a rayon pool with `workers` threads.
    pub fn install<T: Send>(&self, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(f)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub config: serde_json::Value,
    /// Seconds per stage; `None` unless timings were requested.
    pub timings: Option<BTreeMap<String, f64>>,
    pub row_counts: BTreeMap<String, usize>,
    pub fixture_diffs: BTreeMap<String, FixtureDiff>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
}

impl Manifest {
    fn new(command: &str, cfg: &RunConfig) -> Result<Self> {
        // Paths vary between otherwise identical runs; keep them out.
        let mut config = serde_json::to_value(cfg)?;
        if let Some(obj) = config.as_object_mut() {
            obj.remove("output_dir");
            obj.remove("checkpoint_dir");
        }
        Ok(Manifest {
            command: command.to_string(),
            config,
            timings: cfg.record_timings.then(BTreeMap::new),
            ..Manifest::default()
        })
    }

    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f()?;
        if let Some(t) = &mut self.timings {
            t.insert(stage.to_string(), start.elapsed().as_secs_f64());
        }
        Ok(out)
    }

    /// Whether every fixture comparison came out empty.
    pub fn fixtures_match(&self) -> bool {
        self.fixture_diffs.values().all(FixtureDiff::is_empty)
    }

    fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(&path, text)?;
        Ok(path)
    }
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidArgument(format!("csv: {other:?}")),
    }
}

// ---------------------------------------------------------------------------
// Table 1

pub const TABLE1_HEADER: [&str; 6] = [
    "n",
    "ω_n ≤ # Trivial",
    "ω_n ≤ # Hybrid",
    "q ≤ # Trivial",
    "q ≤ # Hybrid",
    "search space",
];

/// `q` columns are `⌊S⌋`; the search space is a whole percentage, rounded
/// half up, with a `%` sign.
pub fn table1_rows(rows: &[CutoffRow]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.trivial_cutoff.to_string(),
                r.hybrid_cutoff.to_string(),
                floor_u(&r.trivial_qmax).to_string(),
                floor_u(&r.hybrid_qmax).to_string(),
                format!("{}%", r.search_percent()),
            ]
        })
        .collect()
}

pub fn run_table1(cfg: &RunConfig, ns: std::ops::RangeInclusive<u64>) -> Result<Manifest> {
    if *ns.start() < 2 {
        return Err(Error::InvalidArgument("table 1 needs n >= 2".into()));
    }
    fs::create_dir_all(&cfg.output_dir)?;
    let mut manifest = Manifest::new("table1", cfg)?;
    let ns: Vec<u64> = ns.collect();
    let rows = manifest.time("table1", || {
        cfg.install(|| crate::line_problem::cutoff_table(ns.iter().copied()))
    })?;
    write_csv(&cfg.output_dir.join("table1.csv"), &TABLE1_HEADER, &table1_rows(&rows))?;
    manifest.row_counts.insert("table1".into(), rows.len());
    manifest.write(&cfg.output_dir)?;
    Ok(manifest)
}

// ---------------------------------------------------------------------------
// Line problem, n = 5

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Cutoff,
    Intervals,
    Enumerate,
    Sieve,
    All,
}

impl Stage {
    fn covers(self, s: Stage) -> bool {
        self == Stage::All || self == s
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct CutoffCheckpoint {
    n: u64,
    trivial_cutoff: usize,
    hybrid_cutoff: usize,
    trivial_qmax: String,
    hybrid_qmax: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct IntervalsCheckpoint {
    n: u64,
    rows: Vec<IntervalRow>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct CandidatesCheckpoint {
    n: u64,
    max_omega: usize,
    candidates: Vec<Candidate>,
}

fn checkpoint_path(cfg: &RunConfig, stage: &str) -> PathBuf {
    cfg.checkpoint_dir.join(format!("line{LINE_DEGREE}-{stage}.json"))
}

fn save_checkpoint<T: Serialize>(cfg: &RunConfig, stage: &str, value: &T) -> Result<()> {
    fs::create_dir_all(&cfg.checkpoint_dir)?;
    fs::write(checkpoint_path(cfg, stage), serde_json::to_vec(value)?)?;
    Ok(())
}

fn load_checkpoint<T: DeserializeOwned>(cfg: &RunConfig, stage: &str, producer: &str) -> Result<T> {
    let path = checkpoint_path(cfg, stage);
    let bytes = match fs::read(&path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(Error::MissingCheckpoint {
                path,
                hint: format!("run `line5 --stage {producer}` first (or `--stage all`)"),
            });
        }
        Err(e) => return Err(e.into()),
    };
    serde_json::from_slice(&bytes).map_err(|e| Error::BadCheckpoint {
        path,
        reason: e.to_string(),
    })
}

fn check_degree(n: u64, cfg: &RunConfig, stage: &str) -> Result<()> {
    if n == LINE_DEGREE {
        Ok(())
    } else {
        Err(Error::BadCheckpoint {
            path: checkpoint_path(cfg, stage),
            reason: format!("checkpoint is for n = {n}"),
        })
    }
}

pub const TABLE2_HEADER: [&str; 3] = ["ω_5", "# ≤ q", "q ≤ #"];
pub const TABLE3_HEADER: [&str; 2] = ["ω_5", "# of options"];
pub const TABLE4_HEADER: [&str; 4] = ["ω_5", "Prime sieve", "Modified sieve", "General sieve"];

/// Runs one stage (or all) of the degree-5 line problem. Each stage reads
/// the previous one's checkpoint, so `All` and a stage-by-stage run agree.
pub fn run_line5(cfg: &RunConfig, stage: Stage) -> Result<Manifest> {
    fs::create_dir_all(&cfg.output_dir)?;
    let mut manifest = Manifest::new("line5", cfg)?;
    let n = LINE_DEGREE;

    if stage.covers(Stage::Cutoff) {
        let row = manifest.time("cutoff", || cutoff_row(n))?;
        let ck = CutoffCheckpoint {
            n,
            trivial_cutoff: row.trivial_cutoff,
            hybrid_cutoff: row.hybrid_cutoff,
            trivial_qmax: row.trivial_qmax.to_string(),
            hybrid_qmax: row.hybrid_qmax.to_string(),
        };
        save_checkpoint(cfg, "cutoff", &ck)?;
        manifest.row_counts.insert("cutoff".into(), 1);
    }

    if stage.covers(Stage::Intervals) {
        let ck: CutoffCheckpoint = load_checkpoint(cfg, "cutoff", "cutoff")?;
        check_degree(ck.n, cfg, "cutoff")?;
        let rows = manifest.time("intervals", || interval_rows(n, ck.hybrid_cutoff))?;
        let csv_rows: Vec<Vec<String>> = rows
            .iter()
            .rev()
            .map(|r| vec![r.omega.to_string(), r.lower.to_string(), r.upper.to_string()])
            .collect();
        write_csv(&cfg.output_dir.join("table2.csv"), &TABLE2_HEADER, &csv_rows)?;
        manifest.row_counts.insert("table2".into(), rows.len());
        save_checkpoint(cfg, "intervals", &IntervalsCheckpoint { n, rows })?;
    }

    if stage.covers(Stage::Enumerate) {
        let ck: IntervalsCheckpoint = load_checkpoint(cfg, "intervals", "intervals")?;
        check_degree(ck.n, cfg, "intervals")?;
        let factor = cfg.factor_config();
        let candidates = manifest.time("enumerate", || cfg.install(|| enumerate_candidates(n, &ck.rows, &factor)))?;
        let max_omega = ck.rows.len();
        let counts = bucket_counts(&candidates, max_omega);
        let mut csv_rows: Vec<Vec<String>> = counts
            .iter()
            .map(|(w, c)| vec![w.to_string(), c.to_string()])
            .collect();
        csv_rows.push(vec!["Total".into(), candidates.len().to_string()]);
        write_csv(&cfg.output_dir.join("table3.csv"), &TABLE3_HEADER, &csv_rows)?;
        manifest.row_counts.insert("table3".into(), counts.len());
        manifest.row_counts.insert("candidates".into(), candidates.len());
        save_checkpoint(
            cfg,
            "candidates",
            &CandidatesCheckpoint {
                n,
                max_omega,
                candidates,
            },
        )?;
    }

    if stage.covers(Stage::Sieve) {
        let ck: CandidatesCheckpoint = load_checkpoint(cfg, "candidates", "enumerate")?;
        check_degree(ck.n, cfg, "candidates")?;
        let cascade = manifest.time("sieve", || {
            cfg.install(|| Ok(sieve_cascade(n, &ck.candidates, ck.max_omega, cfg.modified_form)))
        })?;
        let (p, m, g) = cascade.totals();
        let mut csv_rows: Vec<Vec<String>> = cascade
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.omega.to_string(),
                    r.prime.to_string(),
                    r.modified.to_string(),
                    r.general.to_string(),
                ]
            })
            .collect();
        csv_rows.push(vec!["Totals".into(), p.to_string(), m.to_string(), g.to_string()]);
        write_csv(&cfg.output_dir.join("table4.csv"), &TABLE4_HEADER, &csv_rows)?;
        let mut e5 = String::new();
        for q in cascade.exceptions() {
            e5.push_str(&q.to_string());
            e5.push('\n');
        }
        fs::write(cfg.output_dir.join("e5.txt"), e5)?;
        manifest.row_counts.insert("table4".into(), cascade.rows.len());
        manifest.row_counts.insert("e5".into(), cascade.exceptions().len());
        let diff = FixtureDiff::of(cascade.exceptions(), &fixtures::e5()?);
        manifest.fixture_diffs.insert("e5".into(), diff);
    }

    manifest.write(&cfg.output_dir)?;
    Ok(manifest)
}

// ---------------------------------------------------------------------------
// Primitive-element sums

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairReport {
    pub n: u64,
    pub omega: usize,
    pub q_lower: u64,
    pub q_upper: u64,
    pub witness_count: usize,
    pub coprime_witness_count: usize,
    pub witnesses: Vec<u64>,
}

impl From<&GridCell> for PairReport {
    fn from(c: &GridCell) -> Self {
        PairReport {
            n: c.n,
            omega: c.omega,
            q_lower: c.q_lower,
            q_upper: c.q_upper,
            witness_count: c.witness_count,
            coprime_witness_count: c.coprime_witness_count,
            witnesses: c.witnesses.clone(),
        }
    }
}

/// Everything the sums command computes, for callers that want more than
/// the files.
pub struct SumsOutcome {
    pub manifest: Manifest,
    pub trivial: Option<Vec<GridCell>>,
    pub hybrid: Option<Vec<GridCell>>,
    pub pairs: Option<Vec<(u64, usize)>>,
}

fn grid_rows(cells: &[GridCell]) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header = vec!["ω_n".to_string()];
    header.extend((2..=MAX_N).map(|n| n.to_string()));
    let rows = grid_matrix(cells)
        .into_iter()
        .enumerate()
        .map(|(i, codes)| {
            let mut row = vec![(i + 1).to_string()];
            row.extend(codes.iter().map(u8::to_string));
            row
        })
        .collect();
    (header, rows)
}

fn write_grid(path: &Path, cells: &[GridCell]) -> Result<()> {
    let (header, rows) = grid_rows(cells);
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv(path, &header, &rows)
}

/// Writes `fig1.csv` (trivial intervals) and `fig2.csv` (hybrid intervals)
/// with `grids`, and `fig3.csv` plus `pairs.txt` with `pairs`. In `fig3`,
/// code 2 marks cells holding a witness.
pub fn run_sums(cfg: &RunConfig, grids: bool, pairs: bool) -> Result<SumsOutcome> {
    fs::create_dir_all(&cfg.output_dir)?;
    let mut manifest = Manifest::new("sums", cfg)?;
    let mut out = SumsOutcome {
        manifest: Manifest::default(),
        trivial: None,
        hybrid: None,
        pairs: None,
    };
    if grids {
        let trivial = manifest.time("trivial_grid", || cfg.install(trivial_grid))?;
        let hybrid = manifest.time("hybrid_grid", || {
            cfg.install(|| crate::sum_problem::hybrid_grid(cfg.endpoint))
        })?;
        write_grid(&cfg.output_dir.join("fig1.csv"), &trivial)?;
        write_grid(&cfg.output_dir.join("fig2.csv"), &hybrid)?;
        let nonempty = |cells: &[GridCell]| cells.iter().filter(|c| c.status != CellStatus::Empty).count();
        manifest.row_counts.insert("fig1_nonempty".into(), nonempty(&trivial));
        manifest.row_counts.insert("fig2_nonempty".into(), nonempty(&hybrid));
        out.trivial = Some(trivial);
        out.hybrid = Some(hybrid);
    }
    if pairs {
        let factor = cfg.factor_config();
        let cells = manifest.time("pairs", || cfg.install(|| witness_grid(cfg.endpoint, &factor)))?;
        write_grid(&cfg.output_dir.join("fig3.csv"), &cells)?;
        let found = exception_pairs(&cells, cfg.witness_filter);
        let mut text = String::new();
        for (n, w) in &found {
            text.push_str(&format!("{n} {w}\n"));
        }
        fs::write(cfg.output_dir.join("pairs.txt"), text)?;
        let reports: Vec<PairReport> = cells
            .iter()
            .filter(|c| c.witness_count > 0)
            .map(PairReport::from)
            .collect();
        manifest.details = Some(serde_json::json!({ "pairs": reports }));
        manifest.row_counts.insert("pairs".into(), found.len());
        let as_text = |v: &[(u64, usize)]| -> Vec<String> { v.iter().map(|(n, w)| format!("{n} {w}")).collect() };
        let diff = FixtureDiff::of(&as_text(&found), &as_text(&fixtures::eu_pairs()?));
        manifest.fixture_diffs.insert("eu_pairs".into(), diff);
        out.hybrid.get_or_insert(cells);
        out.pairs = Some(found);
    }
    manifest.write(&cfg.output_dir)?;
    out.manifest = manifest;
    Ok(out)
}
