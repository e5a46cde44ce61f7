use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::task::Task;

use super::matrices::{efficiency_curves, significance_matrix, winrate_matrix, CurveEntry, Roster, SignificanceCell};
use super::plot::{render_svg, Chart, PlotKind, Series};
use super::score::EvalRun;

pub const METRICS_FILE: &str = "metrics.csv";
pub const PARSE_COUNTS_FILE: &str = "parse_counts.csv";
pub const SIGNIFICANCE_FILE: &str = "significance.json";
pub const WINRATE_FILE: &str = "winrate.csv";
pub const CURVES_FILE: &str = "curves.json";
pub const PLOTS_DIR: &str = "plots";

fn csv_bytes<I, R>(header: &[&str], rows: I) -> Result<Vec<u8>>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let fail = |e: csv::Error| Error::Validation(format!("csv encoding: {e}"));
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(row).map_err(fail)?;
    }
    w.into_inner().map_err(|e| Error::Validation(format!("csv encoding: {e}")))
}

fn size_cell(size: Option<u32>) -> String {
    size.map(|s| s.to_string()).unwrap_or_default()
}

pub fn metrics_csv(run: &EvalRun) -> Result<Vec<u8>> {
    let rows = run.aggregates.iter().map(|a| {
        vec![
            run.run_id.clone(),
            run.config_digest.clone(),
            a.task.to_string(),
            a.system.model.clone(),
            size_cell(a.system.train_size),
            a.n.to_string(),
            a.rouge1_f1.to_string(),
            a.rouge2_f1.to_string(),
            a.rouge_l_precision.to_string(),
            a.rouge_l_recall.to_string(),
            a.rouge_l_f1.to_string(),
            a.cosine.to_string(),
        ]
    });
    csv_bytes(
        &[
            "run_id", "config_digest", "task", "model", "train_size", "n", "rouge1_f1", "rouge2_f1",
            "rouge_l_precision", "rouge_l_recall", "rouge_l_f1", "cosine",
        ],
        rows,
    )
}

pub fn parse_counts_csv(run: &EvalRun) -> Result<Vec<u8>> {
    let rows = run.aggregates.iter().filter(|a| a.task == Task::JsonExtract).map(|a| {
        vec![
            run.run_id.clone(),
            run.config_digest.clone(),
            a.system.model.clone(),
            size_cell(a.system.train_size),
            a.n.to_string(),
            a.parse_count.unwrap_or(0).to_string(),
            a.flat_count.unwrap_or(0).to_string(),
        ]
    });
    csv_bytes(
        &["run_id", "config_digest", "model", "train_size", "n", "parse_count", "flat_count"],
        rows,
    )
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    run_id: &'a str,
    config_digest: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    roster: Option<&'a Roster>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    cells: &'a T,
}

fn json_bytes<T: Serialize>(value: &T, what: &str) -> Result<Vec<u8>> {
    crate::forge::to_json_bytes(value, what)
}

pub fn significance_json(run: &EvalRun, roster: &Roster, cells: &[SignificanceCell]) -> Result<Vec<u8>> {
    json_bytes(
        &Envelope {
            run_id: &run.run_id,
            config_digest: &run.config_digest,
            roster: Some(roster),
            alpha: Some(run.config.alpha),
            cells: &cells,
        },
        SIGNIFICANCE_FILE,
    )
}

pub fn winrate_csv(run: &EvalRun, roster: &Roster) -> Result<Vec<u8>> {
    let cells = winrate_matrix(run, roster)?;
    let rows = cells.iter().map(|c| {
        let won: Vec<&str> = c.comparisons.iter().filter(|(_, w)| *w).map(|(m, _)| m.as_str()).collect();
        vec![
            run.run_id.clone(),
            run.config_digest.clone(),
            c.task.to_string(),
            c.subject.model.clone(),
            size_cell(c.subject.train_size),
            c.baseline.model.clone(),
            c.tally.wins.to_string(),
            c.tally.denominator.to_string(),
            c.tally.percent().to_string(),
            c.tally.to_string(),
            won.join(";"),
        ]
    });
    csv_bytes(
        &[
            "run_id", "config_digest", "task", "subject", "train_size", "baseline", "wins", "denominator",
            "percent", "cell", "metrics_won",
        ],
        rows,
    )
}

pub fn curves_json(run: &EvalRun, curves: &[CurveEntry]) -> Result<Vec<u8>> {
    json_bytes(
        &Envelope {
            run_id: &run.run_id,
            config_digest: &run.config_digest,
            roster: None,
            alpha: None,
            cells: &curves,
        },
        CURVES_FILE,
    )
}

fn slug(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
        .collect()
}

/// Charts that go with a run: per-task metric bars, parse counts and one
/// line chart per efficiency curve.
pub fn report_charts(run: &EvalRun, curves: &[CurveEntry]) -> Vec<(String, Chart)> {
    let mut charts = Vec::new();
    let tasks: Vec<Task> = Task::ALL
        .into_iter()
        .filter(|t| run.aggregates.iter().any(|a| a.task == *t))
        .collect();
    for (file, label, pick) in [
        ("rouge_l_f1.svg", "ROUGE-L F1", (|a: &super::Aggregate| a.rouge_l_f1) as fn(&super::Aggregate) -> f64),
        ("cosine.svg", "Cosine similarity", |a| a.cosine),
    ] {
        let series: Vec<Series> = tasks
            .iter()
            .map(|t| {
                let pts = run
                    .aggregates
                    .iter()
                    .filter(|a| a.task == *t)
                    .map(|a| (a.system.to_string(), pick(a)))
                    .collect();
                Series::new(t.as_str(), pts)
            })
            .collect();
        if !series.is_empty() {
            charts.push((
                file.to_string(),
                Chart {
                    title: label.to_string(),
                    y_label: label.to_string(),
                    kind: PlotKind::Bar,
                    series,
                },
            ));
        }
    }
    let parse: Vec<(String, f64)> = run
        .aggregates
        .iter()
        .filter(|a| a.task == Task::JsonExtract)
        .map(|a| (a.system.to_string(), a.parse_count.unwrap_or(0) as f64))
        .collect();
    if !parse.is_empty() {
        charts.push((
            "parse_counts.svg".to_string(),
            Chart {
                title: "Parseable JSON outputs".to_string(),
                y_label: "count".to_string(),
                kind: PlotKind::Bar,
                series: vec![Series::new("json-extract", parse)],
            },
        ));
    }
    for c in curves {
        let pts = c.curve.points.iter().map(|(s, v)| (s.to_string(), *v)).collect();
        charts.push((
            format!("curve-{}-{}-{}.svg", slug(&c.family), c.task, c.curve.metric),
            Chart {
                title: format!("{} {} {} by train size", c.family, c.task, c.curve.metric),
                y_label: c.curve.metric.clone(),
                kind: PlotKind::Line,
                series: vec![Series::new(c.family.clone(), pts)],
            },
        ));
    }
    charts
}

/// Writes the five report files and `plots/` into `dir`. Returns the written
/// paths in write order.
pub fn build_report(run: &EvalRun, roster: &Roster, dir: &Path) -> Result<Vec<PathBuf>> {
    let sig = significance_matrix(run, roster, &run.config.methods)?;
    let curves = efficiency_curves(run)?;
    let files: Vec<(PathBuf, Vec<u8>)> = vec![
        (dir.join(METRICS_FILE), metrics_csv(run)?),
        (dir.join(PARSE_COUNTS_FILE), parse_counts_csv(run)?),
        (dir.join(SIGNIFICANCE_FILE), significance_json(run, roster, &sig)?),
        (dir.join(WINRATE_FILE), winrate_csv(run, roster)?),
        (dir.join(CURVES_FILE), curves_json(run, &curves)?),
    ];
    let plots_dir = dir.join(PLOTS_DIR);
    let mut plots = Vec::new();
    for (name, chart) in report_charts(run, &curves) {
        plots.push((plots_dir.join(name), render_svg(&chart)?.into_bytes()));
    }
    fs::create_dir_all(&plots_dir).map_err(|e| Error::io(&plots_dir, e))?;
    let mut written = Vec::new();
    for (path, bytes) in files.into_iter().chain(plots) {
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
