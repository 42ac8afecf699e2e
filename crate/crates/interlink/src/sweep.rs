//! Sweep harness: run many (interlink count, realization) cells at
//! `alpha = 1`, collect per-row metrics, aggregate means and fluctuations,
//! detect the partition transition, and read/write the CSV artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coupling::{CoupledSystem, InterlinkSequence, Strategy};
use crate::error::{Error, Result};
use crate::gen::{GenSpec, Model};
use crate::graph::Graph;
use crate::metrics::partition_report;
use crate::rng::mix_seed;
use crate::spectral::{fiedler_pair_with, Solver, DEFAULT_TOL};
use crate::theory::MeanFieldPrediction;

/// Evenly spaced count grid, inclusive of both ends, deduplicated.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CountGrid {
    pub min: usize,
    pub max: usize,
    pub points: usize,
}

impl CountGrid {
    pub fn expand(&self) -> Vec<usize> {
        if self.points <= 1 || self.min == self.max {
            return vec![self.min];
        }
        let span = (self.max - self.min) as f64;
        let mut counts: Vec<usize> = (0..self.points)
            .map(|i| self.min + (span * i as f64 / (self.points - 1) as f64).round() as usize)
            .collect();
        counts.dedup();
        counts
    }
}

/// One sweep experiment: a layer source, an interlink strategy, a count
/// grid, and how many independent realizations to average over.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Layer model; omit when `layer` points at an edge-list file.
    #[serde(default)]
    pub model: Option<Model>,
    /// Fixed layer from an edge list, reused across realizations.
    #[serde(default)]
    pub layer: Option<PathBuf>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub side: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    pub strategy: Strategy,
    /// Explicit interlink counts; overrides `count_grid` and the default
    /// grid when present.
    #[serde(default)]
    pub counts: Option<Vec<usize>>,
    #[serde(default)]
    pub count_grid: Option<CountGrid>,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default)]
    pub solver: Solver,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_realizations() -> usize {
    30
}

/// Number of counts in the default grids.
pub const DEFAULT_GRID_POINTS: usize = 50;

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SweepConfig = serde_json::from_str(text)
            .map_err(|e| Error::Parameter(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.strategy.is_mean_field() {
            return Err(Error::Parameter(
                "sweeps use explicit strategies (diagonal or general)".into(),
            ));
        }
        if self.model.is_none() && self.layer.is_none() {
            return Err(Error::Parameter("config needs `model` or `layer`".into()));
        }
        if self.realizations == 0 {
            return Err(Error::Parameter("realizations must be positive".into()));
        }
        Ok(())
    }

    fn gen_spec(&self) -> Result<GenSpec> {
        let model = self
            .model
            .ok_or_else(|| Error::Parameter("config needs `model` or `layer`".into()))?;
        Ok(GenSpec {
            model,
            n: self.n,
            k: self.k,
            m: self.m,
            p: self.p,
            side: self.side,
            seed: self.seed,
        })
    }

    /// Resolves the count list for a layer of `n1` nodes. Defaults: 50
    /// counts in `[1, N1]` (diagonal) or `[1, 4 N1]` (general).
    pub fn resolve_counts(&self, n1: usize) -> Result<Vec<usize>> {
        let mut counts = if let Some(c) = &self.counts {
            c.clone()
        } else if let Some(g) = self.count_grid {
            g.expand()
        } else {
            let max = match self.strategy {
                Strategy::Diagonal => n1,
                _ => 4 * n1,
            };
            CountGrid {
                min: 1,
                max,
                points: DEFAULT_GRID_POINTS.min(max),
            }
            .expand()
        };
        counts.sort_unstable();
        counts.dedup();
        if counts.is_empty() {
            return Err(Error::Parameter("empty count list".into()));
        }
        let limit = match self.strategy {
            Strategy::Diagonal => n1,
            _ => n1 * n1,
        };
        if let Some(&c) = counts.iter().find(|&&c| c > limit) {
            return Err(Error::Parameter(format!(
                "count {c} exceeds the {} limit {limit} for N1 = {n1}",
                self.strategy.as_str()
            )));
        }
        Ok(counts)
    }
}

/// One (count, realization) cell. Metric fields are `None` when the row's
/// `error` column is set.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub model: String,
    pub n1: usize,
    pub strategy: Strategy,
    pub count: usize,
    pub realization: usize,
    pub mu: Option<f64>,
    pub mu_gap: Option<f64>,
    pub cut_size: Option<f64>,
    pub interlink_cut_fraction: Option<f64>,
    pub angle: Option<f64>,
    pub entropy: Option<f64>,
    pub degenerate: bool,
    pub wall_ms: f64,
    pub error: Option<String>,
}

/// Per-count mean and fluctuation over the clean rows (no error, not
/// degenerate). `samples = 0` marks an empty aggregate.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRecord {
    pub count: usize,
    pub samples: usize,
    /// Degenerate or failed rows dropped at this count.
    pub excluded: usize,
    pub mu_mean: Option<f64>,
    pub mu_var: Option<f64>,
    pub cut_size_mean: Option<f64>,
    pub cut_size_var: Option<f64>,
    pub interlink_cut_fraction_mean: Option<f64>,
    pub interlink_cut_fraction_var: Option<f64>,
    pub angle_mean: Option<f64>,
    pub angle_var: Option<f64>,
    pub entropy_mean: Option<f64>,
    pub entropy_var: Option<f64>,
}

/// Runs the sweep. Realizations execute in parallel; records come back
/// sorted by `(count, realization)` so output never depends on scheduling.
///
/// Per-row failures (generation retries exhausted, solver non-convergence)
/// land in the `error` column instead of aborting the run.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    let fixed_layer = match &cfg.layer {
        Some(path) => {
            let g = Graph::load_edge_list(path)?;
            if !g.is_connected() {
                return Err(Error::Parameter("layer graph is not connected".into()));
            }
            Some(g)
        }
        None => None,
    };
    let model_name = match (&fixed_layer, cfg.model) {
        (Some(_), _) => "custom".to_string(),
        (None, Some(m)) => m.as_str().to_string(),
        (None, None) => unreachable!(),
    };
    // probe one layer to size the count grid
    let probe_n1 = match &fixed_layer {
        Some(g) => g.n(),
        None => cfg
            .gen_spec()?
            .with_seed(mix_seed(cfg.seed, 0))
            .generate()?
            .n(),
    };
    let counts = cfg.resolve_counts(probe_n1)?;
    let max_count = *counts.iter().max().expect("nonempty");

    let mut records: Vec<SweepRecord> = (0..cfg.realizations)
        .into_par_iter()
        .flat_map(|r| {
            run_realization(cfg, &fixed_layer, &model_name, &counts, max_count, r)
        })
        .collect();
    records.sort_by_key(|rec| (rec.count, rec.realization));
    Ok(records)
}

fn run_realization(
    cfg: &SweepConfig,
    fixed_layer: &Option<Graph>,
    model_name: &str,
    counts: &[usize],
    max_count: usize,
    realization: usize,
) -> Vec<SweepRecord> {
    let layer_seed = mix_seed(cfg.seed, 2 * realization as u64);
    let seq_seed = mix_seed(cfg.seed, 2 * realization as u64 + 1);
    let blank = |n1: usize| SweepRecord {
        model: model_name.to_string(),
        n1,
        strategy: cfg.strategy,
        count: 0,
        realization,
        mu: None,
        mu_gap: None,
        cut_size: None,
        interlink_cut_fraction: None,
        angle: None,
        entropy: None,
        degenerate: false,
        wall_ms: 0.0,
        error: None,
    };
    let layer = match fixed_layer {
        Some(g) => Ok(g.clone()),
        None => cfg
            .gen_spec()
            .and_then(|spec| spec.with_seed(layer_seed).generate()),
    };
    let layer = match layer {
        Ok(g) => g,
        Err(e) => {
            // one error row per count so the grid stays rectangular
            return counts
                .iter()
                .map(|&c| SweepRecord {
                    count: c,
                    error: Some(e.to_string()),
                    ..blank(0)
                })
                .collect();
        }
    };
    let n1 = layer.n();
    let seq = match cfg.strategy {
        Strategy::Diagonal => Ok(InterlinkSequence::diagonal(layer, seq_seed)),
        _ => InterlinkSequence::general(layer, max_count, seq_seed),
    };
    let seq = match seq {
        Ok(s) => s,
        Err(e) => {
            return counts
                .iter()
                .map(|&c| SweepRecord {
                    count: c,
                    error: Some(e.to_string()),
                    ..blank(n1)
                })
                .collect();
        }
    };
    counts
        .iter()
        .map(|&count| {
            let start = Instant::now();
            let mut rec = SweepRecord {
                count,
                ..blank(n1)
            };
            match evaluate_cell(&seq, count, cfg.solver) {
                Ok((sys, fiedler)) => {
                    let rep = partition_report(&sys, &fiedler);
                    rec.mu = Some(fiedler.mu);
                    rec.mu_gap = fiedler.gap;
                    rec.cut_size = Some(rep.cut_size);
                    rec.interlink_cut_fraction = Some(rep.interlink_cut_fraction);
                    rec.angle = Some(rep.angle);
                    rec.entropy = Some(rep.entropy);
                    rec.degenerate = rep.degenerate;
                }
                Err(e) => rec.error = Some(e.to_string()),
            }
            rec.wall_ms = start.elapsed().as_secs_f64() * 1e3;
            rec
        })
        .collect()
}

fn evaluate_cell(
    seq: &InterlinkSequence,
    count: usize,
    solver: Solver,
) -> Result<(CoupledSystem, crate::spectral::SpectralResult)> {
    let sys = seq.system(count)?;
    let q = sys.supra_laplacian();
    let fiedler = fiedler_pair_with(&q, solver, DEFAULT_TOL)?;
    Ok((sys, fiedler))
}

/// Groups records by count and reduces clean rows to mean and population
/// variance per metric.
pub fn aggregate(records: &[SweepRecord]) -> Vec<AggregateRecord> {
    let mut counts: Vec<usize> = records.iter().map(|r| r.count).collect();
    counts.sort_unstable();
    counts.dedup();
    counts
        .iter()
        .map(|&count| {
            let rows: Vec<&SweepRecord> =
                records.iter().filter(|r| r.count == count).collect();
            let clean: Vec<&&SweepRecord> = rows
                .iter()
                .filter(|r| r.error.is_none() && !r.degenerate)
                .collect();
            let excluded = rows.len() - clean.len();
            let stat = |f: fn(&SweepRecord) -> Option<f64>| -> (Option<f64>, Option<f64>) {
                let vals: Vec<f64> = clean.iter().filter_map(|r| f(r)).collect();
                if vals.is_empty() {
                    return (None, None);
                }
                let n = vals.len() as f64;
                let mean = vals.iter().sum::<f64>() / n;
                let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
                (Some(mean), Some(var))
            };
            let (mu_mean, mu_var) = stat(|r| r.mu);
            let (cut_size_mean, cut_size_var) = stat(|r| r.cut_size);
            let (icf_mean, icf_var) = stat(|r| r.interlink_cut_fraction);
            let (angle_mean, angle_var) = stat(|r| r.angle);
            let (entropy_mean, entropy_var) = stat(|r| r.entropy);
            AggregateRecord {
                count,
                samples: clean.len(),
                excluded,
                mu_mean,
                mu_var,
                cut_size_mean,
                cut_size_var,
                interlink_cut_fraction_mean: icf_mean,
                interlink_cut_fraction_var: icf_var,
                angle_mean,
                angle_var,
                entropy_mean,
                entropy_var,
            }
        })
        .collect()
}

/// Where the mean interdependence angle jumps hardest.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionEstimate {
    /// Count at the upper end of the steepest angle increase.
    pub count: usize,
    /// Size of that increase, radians.
    pub jump: f64,
    /// Set when the largest jump is under 0.3 rad — a featureless curve
    /// rather than a flip.
    pub low_confidence: bool,
    /// Closed-form threshold `l_I` or `l_J` when a prediction is supplied.
    pub theory_threshold: Option<f64>,
}

/// Jump size below which the detected transition is flagged low-confidence.
pub const TRANSITION_CONFIDENCE_JUMP: f64 = 0.3;

/// Locates the transition as the argmax of the first difference of the
/// mean-angle curve over counts.
pub fn detect_transition(
    aggregates: &[AggregateRecord],
    prediction: Option<&MeanFieldPrediction>,
) -> Result<TransitionEstimate> {
    let curve: Vec<(usize, f64)> = aggregates
        .iter()
        .filter_map(|a| a.angle_mean.map(|m| (a.count, m)))
        .collect();
    if curve.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "transition detection needs >= 3 counts with data, got {}",
            curve.len()
        )));
    }
    let mut best = (curve[1].0, curve[1].1 - curve[0].1);
    for w in curve.windows(2).skip(1) {
        let jump = w[1].1 - w[0].1;
        if jump > best.1 {
            best = (w[1].0, jump);
        }
    }
    Ok(TransitionEstimate {
        count: best.0,
        jump: best.1,
        low_confidence: best.1 < TRANSITION_CONFIDENCE_JUMP,
        theory_threshold: prediction.map(|p| p.link_threshold),
    })
}

// --- CSV ---------------------------------------------------------------

pub const RECORD_HEADER: &str = "model,n1,strategy,count,realization,mu,mu_gap,cut_size,\
interlink_cut_fraction,angle,entropy,degenerate,wall_ms,error";

pub const AGGREGATE_HEADER: &str = "count,samples,excluded,mu_mean,mu_var,cut_size_mean,\
cut_size_var,interlink_cut_fraction_mean,interlink_cut_fraction_var,angle_mean,angle_var,\
entropy_mean,entropy_var";

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn records_to_csv(records: &[SweepRecord]) -> String {
    let mut out = String::from(RECORD_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            csv_escape(&r.model),
            r.n1,
            r.strategy.as_str(),
            r.count,
            r.realization,
            fmt_opt(r.mu),
            fmt_opt(r.mu_gap),
            fmt_opt(r.cut_size),
            fmt_opt(r.interlink_cut_fraction),
            fmt_opt(r.angle),
            fmt_opt(r.entropy),
            r.degenerate,
            fmt_f64(r.wall_ms),
            csv_escape(r.error.as_deref().unwrap_or("")),
        );
    }
    out
}

pub fn aggregates_to_csv(aggregates: &[AggregateRecord]) -> String {
    let mut out = String::from(AGGREGATE_HEADER);
    out.push('\n');
    for a in aggregates {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            a.count,
            a.samples,
            a.excluded,
            fmt_opt(a.mu_mean),
            fmt_opt(a.mu_var),
            fmt_opt(a.cut_size_mean),
            fmt_opt(a.cut_size_var),
            fmt_opt(a.interlink_cut_fraction_mean),
            fmt_opt(a.interlink_cut_fraction_var),
            fmt_opt(a.angle_mean),
            fmt_opt(a.angle_var),
            fmt_opt(a.entropy_mean),
            fmt_opt(a.entropy_var),
        );
    }
    out
}

/// Aggregate rows joined with the mean-field curve: adds `mu_theory`
/// (prediction at each count) and the constant `l_threshold` column.
pub fn comparison_to_csv(
    aggregates: &[AggregateRecord],
    prediction: &MeanFieldPrediction,
) -> String {
    let mut out = String::from(AGGREGATE_HEADER);
    out.push_str(",mu_theory,l_threshold\n");
    let body = aggregates_to_csv(aggregates);
    for (line, a) in body.lines().skip(1).zip(aggregates) {
        let _ = writeln!(
            out,
            "{line},{},{}",
            fmt_f64(prediction.mu_at_count(a.count)),
            fmt_f64(prediction.link_threshold),
        );
    }
    out
}

pub fn write_records_csv(records: &[SweepRecord], path: impl AsRef<std::path::Path>) -> Result<()> {
    fs::write(path, records_to_csv(records))?;
    Ok(())
}

pub fn write_aggregates_csv(
    aggregates: &[AggregateRecord],
    path: impl AsRef<std::path::Path>,
) -> Result<()> {
    fs::write(path, aggregates_to_csv(aggregates))?;
    Ok(())
}

/// Splits one CSV line into fields, honoring double-quote escaping.
fn split_csv_line(line: &str) -> Vec<String> {
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut chars = line.chars().peekable();
    let mut quoted = false;
    while let Some(c) = chars.next() {
        if quoted {
            match c {
                '"' if chars.peek() == Some(&'"') => {
                    chars.next();
                    cur.push('"');
                }
                '"' => quoted = false,
                _ => cur.push(c),
            }
        } else {
            match c {
                '"' => quoted = true,
                ',' => fields.push(std::mem::take(&mut cur)),
                _ => cur.push(c),
            }
        }
    }
    fields.push(cur);
    fields
}

pub fn parse_records_csv(text: &str) -> Result<Vec<SweepRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == RECORD_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: "missing or unexpected record header".into(),
            })
        }
    }
    let mut out = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let f = split_csv_line(line);
        let err = |message: String| Error::Parse {
            line: idx + 1,
            message,
        };
        if f.len() != 14 {
            return Err(err(format!("expected 14 fields, got {}", f.len())));
        }
        let p_usize = |s: &str| s.parse::<usize>().map_err(|e| err(e.to_string()));
        let p_opt = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse::<f64>().map(Some).map_err(|e| err(e.to_string()))
            }
        };
        let strategy = match f[2].as_str() {
            "diagonal" => Strategy::Diagonal,
            "general" => Strategy::General,
            other => return Err(err(format!("unknown strategy {other}"))),
        };
        out.push(SweepRecord {
            model: f[0].clone(),
            n1: p_usize(&f[1])?,
            strategy,
            count: p_usize(&f[3])?,
            realization: p_usize(&f[4])?,
            mu: p_opt(&f[5])?,
            mu_gap: p_opt(&f[6])?,
            cut_size: p_opt(&f[7])?,
            interlink_cut_fraction: p_opt(&f[8])?,
            angle: p_opt(&f[9])?,
            entropy: p_opt(&f[10])?,
            degenerate: f[11]
                .parse::<bool>()
                .map_err(|e| err(e.to_string()))?,
            wall_ms: f[12].parse::<f64>().map_err(|e| err(e.to_string()))?,
            error: if f[13].is_empty() {
                None
            } else {
                Some(f[13].clone())
            },
        });
    }
    Ok(out)
}
