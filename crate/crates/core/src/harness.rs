//! Parameter sweeps over crossover and mutation rates, the per-experiment
//! tables behind each plot, and the trend summary.
//!
//! Output files (comma-delimited, header row, LF line endings):
//!
//! - `sweep_cells.csv`: one row per GA run
//! - `experiment_<k>.csv` / `experiment_<k>.dat`: one table per
//!   (instance, crossover rate), rows are mutation rates, columns are runs
//! - `summary.csv`: mean solutions per (crossover rate, mutation rate)

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ga::{run_ga, GaParams};
use crate::problem::{Instance, SolutionSet};
use crate::seed::derive_seed;

pub const PAPER_CROSSOVER_RATES: [f64; 4] = [2.0, 3.0, 4.0, 5.0];
pub const PAPER_MUTATION_RATES: [f64; 4] = [0.5, 0.6, 0.7, 0.8];
pub const PAPER_REPEATS: usize = 5;

/// The five benchmark sets and their target sums.
pub fn paper_instances() -> Vec<Instance> {
    let sets: [(&[u64], u128); 5] = [
        (&[2, 4, 6, 8, 10, 12], 20),
        (&[1, 3, 5, 7, 9, 11], 20),
        (&[5, 7, 21, 33, 37, 91], 112),
        (&[2, 9, 21, 33, 77, 101], 79),
        (&[7, 10, 13, 20, 27, 30], 57),
    ];
    sets.iter()
        .map(|&(w, m)| Instance::new(w.to_vec(), m).expect("benchmark sets are valid"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub instances: Vec<Instance>,
    pub crossover_rates: Vec<f64>,
    pub mutation_rates: Vec<f64>,
    pub repeats: usize,
    /// Population, generation cap and base seed. Its rates are overridden
    /// per cell.
    #[serde(default)]
    pub base_params: GaParams,
}

impl SweepConfig {
    /// The full benchmark grid: 5 instances x 4 crossover rates x
    /// 4 mutation rates x 5 repeats.
    pub fn paper(base_params: GaParams) -> Self {
        Self {
            instances: paper_instances(),
            crossover_rates: PAPER_CROSSOVER_RATES.to_vec(),
            mutation_rates: PAPER_MUTATION_RATES.to_vec(),
            repeats: PAPER_REPEATS,
            base_params,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.instances.is_empty() {
            problems.push("instances must not be empty".to_string());
        }
        if self.crossover_rates.is_empty() {
            problems.push("crossover_rates must not be empty".to_string());
        }
        if self.mutation_rates.is_empty() {
            problems.push("mutation_rates must not be empty".to_string());
        }
        if self.repeats < 1 {
            problems.push("repeats must be >= 1".to_string());
        }
        if has_duplicates(&self.crossover_rates) {
            problems.push("crossover_rates contains duplicates".to_string());
        }
        if has_duplicates(&self.mutation_rates) {
            problems.push("mutation_rates contains duplicates".to_string());
        }
        for &cx in &self.crossover_rates {
            for &mu in &self.mutation_rates {
                if let Err(e) = self.cell_params(cx, mu, 0).validate() {
                    problems.push(format!("cx_rate={cx} mut_rate={mu}: {e}"));
                }
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidSweep(problems.join("; ")))
        }
    }

    pub fn cell_count(&self) -> usize {
        self.instances.len() * self.crossover_rates.len() * self.mutation_rates.len() * self.repeats
    }

    fn cell_params(&self, crossover_rate: f64, mutation_rate: f64, seed: u64) -> GaParams {
        GaParams { crossover_rate, mutation_rate, seed, ..self.base_params.clone() }
    }
}

fn has_duplicates(values: &[f64]) -> bool {
    let unique: BTreeSet<u64> = values.iter().map(|v| v.to_bits()).collect();
    unique.len() != values.len()
}

/// One GA run of the sweep. `instance_id` and `run` are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub instance_id: usize,
    pub cx_rate: f64,
    pub mut_rate: f64,
    pub run: usize,
    pub solutions: usize,
    pub success: bool,
    pub generations: usize,
}

/// A cell plus the distinct solutions its run found.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub cell: SweepCell,
    pub found: SolutionSet,
}

/// Position of a cell in the grid. Used to derive its RNG seed.
fn cell_stream(config: &SweepConfig, inst: usize, cx: usize, mu: usize, run: usize) -> u64 {
    let per_inst = config.crossover_rates.len() * config.mutation_rates.len() * config.repeats;
    let per_cx = config.mutation_rates.len() * config.repeats;
    (inst * per_inst + cx * per_cx + mu * config.repeats + run) as u64
}

/// Runs every cell of the grid on at most `jobs` worker threads. Output is
/// ordered by (instance, crossover, mutation, run) regardless of `jobs`.
pub fn run_sweep(config: &SweepConfig, jobs: usize) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    let mut coords = Vec::with_capacity(config.cell_count());
    for inst in 0..config.instances.len() {
        for cx in 0..config.crossover_rates.len() {
            for mu in 0..config.mutation_rates.len() {
                for run in 0..config.repeats {
                    coords.push((inst, cx, mu, run));
                }
            }
        }
    }
    let run_cell = |&(inst, cx, mu, run): &(usize, usize, usize, usize)| -> Result<SweepRecord> {
        let cx_rate = config.crossover_rates[cx];
        let mut_rate = config.mutation_rates[mu];
        let seed = derive_seed(config.base_params.seed, cell_stream(config, inst, cx, mu, run));
        let result = run_ga(&config.instances[inst], &config.cell_params(cx_rate, mut_rate, seed))?;
        Ok(SweepRecord {
            cell: SweepCell {
                instance_id: inst + 1,
                cx_rate,
                mut_rate,
                run: run + 1,
                solutions: result.solutions.len(),
                success: !result.solutions.is_empty(),
                generations: result.generations_executed,
            },
            found: result.solutions,
        })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("failed to build sweep worker pool");
    pool.install(|| coords.par_iter().map(run_cell).collect())
}

pub fn cells(records: &[SweepRecord]) -> Vec<SweepCell> {
    records.iter().map(|r| r.cell.clone()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendEntry {
    pub cx_rate: f64,
    pub mut_rate: f64,
    pub mean_solutions: f64,
    pub cells: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendSummary {
    /// Sorted by crossover rate, then mutation rate.
    pub entries: Vec<TrendEntry>,
    pub argmax: TrendEntry,
    /// Another coordinate shares the maximal mean.
    pub tied: bool,
    /// Every mean is zero, so the argmax carries no information.
    pub degenerate: bool,
}

impl TrendSummary {
    pub fn crossover_rates(&self) -> Vec<f64> {
        sorted_axis(self.entries.iter().map(|e| e.cx_rate))
    }

    pub fn mutation_rates(&self) -> Vec<f64> {
        sorted_axis(self.entries.iter().map(|e| e.mut_rate))
    }

    pub fn mean(&self, cx_rate: f64, mut_rate: f64) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.cx_rate == cx_rate && e.mut_rate == mut_rate)
            .map(|e| e.mean_solutions)
    }
}

// Same rendering serde uses in sweep_cells.csv: always a decimal point.
fn fmt_rate(x: f64) -> String {
    format!("{x:?}")
}

fn sorted_axis(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut axis: Vec<f64> = values.collect();
    axis.sort_by(f64::total_cmp);
    axis.dedup_by(|a, b| a.to_bits() == b.to_bits());
    axis
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct RateKey(u64, u64);

fn order_key(x: f64) -> u64 {
    // monotone map from f64 total order to u64
    let bits = x.to_bits();
    if bits >> 63 == 1 {
        !bits
    } else {
        bits | (1 << 63)
    }
}

impl RateKey {
    fn new(cx: f64, mu: f64) -> Self {
        Self(order_key(cx), order_key(mu))
    }
}

/// Mean distinct solutions per (crossover, mutation) across all instances
/// and repeats. Ties on the maximum resolve toward the lower crossover rate,
/// then the lower mutation rate.
pub fn summarize(cells: &[SweepCell]) -> Result<TrendSummary> {
    if cells.is_empty() {
        return Err(Error::EmptySummary);
    }
    let mut groups: BTreeMap<RateKey, (f64, f64, usize, usize)> = BTreeMap::new();
    for c in cells {
        let entry = groups.entry(RateKey::new(c.cx_rate, c.mut_rate)).or_insert((c.cx_rate, c.mut_rate, 0, 0));
        entry.2 += c.solutions;
        entry.3 += 1;
    }
    let entries: Vec<TrendEntry> = groups
        .into_values()
        .map(|(cx_rate, mut_rate, total, count)| TrendEntry {
            cx_rate,
            mut_rate,
            mean_solutions: total as f64 / count as f64,
            cells: count,
        })
        .collect();
    let mut argmax = &entries[0];
    for e in &entries[1..] {
        if e.mean_solutions > argmax.mean_solutions {
            argmax = e;
        }
    }
    let best = argmax.mean_solutions;
    let tied = entries.iter().filter(|e| e.mean_solutions == best).count() > 1;
    let degenerate = best == 0.0;
    Ok(TrendSummary { argmax: argmax.clone(), entries, tied, degenerate })
}

/// Solutions per run for one (instance, crossover rate) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentTable {
    /// 1-based, instance-major then crossover rate.
    pub number: usize,
    pub instance_id: usize,
    pub cx_rate: f64,
    pub rows: Vec<ExperimentRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub mut_rate: f64,
    /// `solutions` of runs 1..=R, in run order.
    pub runs: Vec<usize>,
    pub successes: usize,
    /// Distinct solutions across all runs of this configuration. `None`
    /// when built from cells alone.
    pub cumulative_distinct: Option<usize>,
}

struct Grid {
    instance_ids: Vec<usize>,
    cx_rates: Vec<f64>,
    mut_rates: Vec<f64>,
    runs: Vec<usize>,
}

fn cell_key(c: &SweepCell) -> (usize, u64, u64, usize) {
    (c.instance_id, order_key(c.cx_rate), order_key(c.mut_rate), c.run)
}

fn complete_grid(cells: &[SweepCell]) -> Result<Grid> {
    if cells.is_empty() {
        return Err(Error::InvalidSweep("no cells to tabulate".into()));
    }
    let mut instance_ids: Vec<usize> = cells.iter().map(|c| c.instance_id).collect();
    instance_ids.sort_unstable();
    instance_ids.dedup();
    let mut runs: Vec<usize> = cells.iter().map(|c| c.run).collect();
    runs.sort_unstable();
    runs.dedup();
    let grid = Grid {
        instance_ids,
        cx_rates: sorted_axis(cells.iter().map(|c| c.cx_rate)),
        mut_rates: sorted_axis(cells.iter().map(|c| c.mut_rate)),
        runs,
    };

    let mut seen: HashMap<(usize, u64, u64, usize), usize> = HashMap::new();
    for c in cells {
        *seen.entry(cell_key(c)).or_default() += 1;
    }
    if let Some((k, _)) = seen.iter().find(|(_, &n)| n > 1) {
        return Err(Error::InvalidSweep(format!(
            "duplicate cell instance={} run={}",
            k.0, k.3
        )));
    }
    let mut missing = Vec::new();
    for &inst in &grid.instance_ids {
        for &cx in &grid.cx_rates {
            for &mu in &grid.mut_rates {
                for &run in &grid.runs {
                    let key = (inst, order_key(cx), order_key(mu), run);
                    if !seen.contains_key(&key) {
                        missing.push(format!(
                            "(instance={inst}, cx={}, mut={}, run={run})",
                            fmt_rate(cx),
                            fmt_rate(mu)
                        ));
                    }
                }
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingCells(missing));
    }
    Ok(grid)
}

/// Groups cells into one table per (instance, crossover rate). Fails with
/// [`Error::MissingCells`] if the grid is not a full cross product.
pub fn experiment_tables(cells: &[SweepCell]) -> Result<Vec<ExperimentTable>> {
    build_tables(cells, None)
}

/// Like [`experiment_tables`], with the cumulative distinct-solution column.
pub fn experiment_tables_from_records(records: &[SweepRecord]) -> Result<Vec<ExperimentTable>> {
    build_tables(&cells(records), Some(records))
}

fn build_tables(cells: &[SweepCell], records: Option<&[SweepRecord]>) -> Result<Vec<ExperimentTable>> {
    let grid = complete_grid(cells)?;
    let by_key: HashMap<_, &SweepCell> = cells.iter().map(|c| (cell_key(c), c)).collect();
    let mut found: HashMap<(usize, u64, u64), SolutionSet> = HashMap::new();
    for r in records.unwrap_or_default() {
        let (inst, cx, mu, _) = cell_key(&r.cell);
        let set = found.entry((inst, cx, mu)).or_default();
        for c in &r.found {
            set.insert(c.clone());
        }
    }

    let mut tables = Vec::new();
    for &inst in &grid.instance_ids {
        for &cx in &grid.cx_rates {
            let rows = grid
                .mut_rates
                .iter()
                .map(|&mu| {
                    let runs: Vec<usize> = grid
                        .runs
                        .iter()
                        .map(|&run| by_key[&(inst, order_key(cx), order_key(mu), run)].solutions)
                        .collect();
                    let successes = runs.iter().filter(|&&s| s > 0).count();
                    let cumulative_distinct = records.map(|_| {
                        found.get(&(inst, order_key(cx), order_key(mu))).map_or(0, SolutionSet::len)
                    });
                    ExperimentRow { mut_rate: mu, runs, successes, cumulative_distinct }
                })
                .collect();
            tables.push(ExperimentTable {
                number: tables.len() + 1,
                instance_id: inst,
                cx_rate: cx,
                rows,
            });
        }
    }
    Ok(tables)
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file))
}

pub fn write_cells_csv(cells: &[SweepCell], path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    for c in cells {
        w.serialize(c)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_cells_csv(path: &Path) -> Result<Vec<SweepCell>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<Vec<SweepCell>, _>>()?)
}

pub fn write_summary_csv(summary: &TrendSummary, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["cx_rate", "mut_rate", "mean_solutions"])?;
    for e in &summary.entries {
        w.write_record([fmt_rate(e.cx_rate), fmt_rate(e.mut_rate), e.mean_solutions.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_table_csv(table: &ExperimentTable, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    let run_count = table.rows.first().map_or(0, |r| r.runs.len());
    let with_cumulative = table.rows.iter().any(|r| r.cumulative_distinct.is_some());
    let mut header = vec!["mut_rate".to_string()];
    header.extend((1..=run_count).map(|i| format!("run_{i}")));
    header.push("successes".into());
    if with_cumulative {
        header.push("cumulative_distinct".into());
    }
    w.write_record(&header)?;
    for row in &table.rows {
        let mut record = vec![fmt_rate(row.mut_rate)];
        record.extend(row.runs.iter().map(usize::to_string));
        record.push(row.successes.to_string());
        if let Some(c) = row.cumulative_distinct {
            record.push(c.to_string());
        }
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

// Whitespace-separated xy data: x = mutation rate, one series per run.
fn write_plot_data(table: &ExperimentTable, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!(
        "# experiment {}: instance {}, crossover rate {}\n",
        table.number,
        table.instance_id,
        fmt_rate(table.cx_rate)
    ));
    let run_count = table.rows.first().map_or(0, |r| r.runs.len());
    out.push_str("# mut_rate");
    for i in 1..=run_count {
        out.push_str(&format!(" run_{i}"));
    }
    out.push('\n');
    for row in &table.rows {
        out.push_str(&fmt_rate(row.mut_rate));
        for v in &row.runs {
            out.push_str(&format!(" {v}"));
        }
        out.push('\n');
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Parses an `experiment_<k>.csv` back into rows.
pub fn read_table_csv(path: &Path) -> Result<Vec<ExperimentRow>> {
    let malformed = |reason: String| Error::MalformedTable { path: path.to_path_buf(), reason };
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    let run_count = header.iter().filter(|h| h.starts_with("run_")).count();
    let with_cumulative = header.iter().any(|h| h == "cumulative_distinct");
    let expected = 2 + run_count + usize::from(with_cumulative);
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record?;
        if record.len() != expected {
            return Err(malformed(format!("expected {expected} fields, found {}", record.len())));
        }
        let num = |i: usize| -> Result<usize> {
            record[i].parse().map_err(|e| malformed(format!("field {i}: {e}")))
        };
        let mut_rate = record[0].parse().map_err(|e| malformed(format!("mut_rate: {e}")))?;
        let runs = (1..=run_count).map(num).collect::<Result<Vec<_>>>()?;
        let successes = num(run_count + 1)?;
        let cumulative_distinct = if with_cumulative { Some(num(run_count + 2)?) } else { None };
        rows.push(ExperimentRow { mut_rate, runs, successes, cumulative_distinct });
    }
    Ok(rows)
}

pub fn experiment_csv_path(dir: &Path, number: usize) -> PathBuf {
    dir.join(format!("experiment_{number}.csv"))
}

pub fn experiment_plot_path(dir: &Path, number: usize) -> PathBuf {
    dir.join(format!("experiment_{number}.dat"))
}

/// Writes `experiment_<k>.csv` and `experiment_<k>.dat` for every table.
pub fn emit_experiment_tables(tables: &[ExperimentTable], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for table in tables {
        write_table_csv(table, &experiment_csv_path(dir, table.number))?;
        write_plot_data(table, &experiment_plot_path(dir, table.number))?;
    }
    Ok(())
}

/// Everything a sweep produces, written under `dir`.
pub fn write_sweep_outputs(records: &[SweepRecord], dir: &Path) -> Result<(Vec<ExperimentTable>, TrendSummary)> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let cells = cells(records);
    let tables = experiment_tables_from_records(records)?;
    let summary = summarize(&cells)?;
    write_cells_csv(&cells, &dir.join("sweep_cells.csv"))?;
    emit_experiment_tables(&tables, dir)?;
    write_summary_csv(&summary, &dir.join("summary.csv"))?;
    Ok((tables, summary))
}
