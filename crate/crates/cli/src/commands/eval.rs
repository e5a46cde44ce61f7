use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use log::warn;
use siex_core::eval::{
    build_report, efficiency_curves, emit_plot, load_predictions, load_run, score_run, significance_matrix,
    winrate_matrix, write_run, Chart, EmbeddingTable, EvalRun, PlotKind, Roster, RunLock, ScoreConfig, Series,
    PLOTS_DIR, REPORTS_DIR,
};
use siex_core::stats::{efficiency_curve, two_prop_z, ZTestOptions, DEFAULT_ALPHA};
use siex_core::{Error, SignificanceResultF64};

use crate::args::{CurveArgs, KindArg, PlotArgs, ReportArgs, RosterArgs, ScoreArgs, SigtestArgs, WinrateArgs};
use crate::exit::Failure;

fn roster(run: &EvalRun, args: &RosterArgs) -> Result<Roster> {
    Ok(match (&args.subject, args.baselines.first()) {
        (Some(subject), _) => Roster::resolve(run, subject, &args.baselines)?,
        (None, Some(first)) => Roster {
            subjects: Roster::default_for(run).subjects,
            baselines: Roster::resolve(run, first, &args.baselines)?.baselines,
        },
        (None, None) => Roster::default_for(run),
    })
}

/// Writes reports into `dir`, clearing stale plots first.
fn write_reports(run: &EvalRun, roster: &Roster, dir: &Path) -> Result<()> {
    let plots = dir.join(PLOTS_DIR);
    if plots.is_dir() {
        fs::remove_dir_all(&plots).with_context(|| format!("clearing {}", plots.display()))?;
    }
    let written = build_report(run, roster, dir)?;
    eprintln!("wrote {} report files to {}", written.len(), dir.display());
    Ok(())
}

pub fn score(args: &ScoreArgs) -> Result<()> {
    let loaded = load_predictions(&args.predictions, false)?;
    for r in &loaded.rejections {
        warn!("{}:{}: {}", args.predictions.display(), r.line, r.reason);
    }
    if !loaded.rejections.is_empty() {
        let err = Error::Rejected {
            rejected: loaded.rejections.len(),
            total: loaded.total_lines,
        };
        if !args.no_strict {
            for r in &loaded.rejections {
                eprintln!("line {}: {}", r.line, r.reason);
            }
            return Err(err.into());
        }
        warn!("{err}; continuing without them");
    }
    let config = ScoreConfig {
        tokenizer: args.tokenizer.into(),
        extract_json: args.extract_json,
        methods: args.methods.iter().map(|&m| m.into()).collect(),
        alpha: args.alpha,
        continuity_correction: args.continuity_correction,
        resamples: args.resamples,
        seed: args.seed,
        epsilon_unit: args.epsilon_unit,
        epsilon_count: args.epsilon_count,
        embeddings_digest: None,
    };
    let embeddings = args.embeddings.as_deref().map(EmbeddingTable::load).transpose()?;
    let run = score_run(&loaded.records, &config, embeddings.as_ref())?;
    let roster = roster(&run, &args.roster)?;

    let lock = RunLock::acquire(&args.out)?;
    write_run(&run, &args.out, Some(&lock))?;
    if !args.no_report {
        write_reports(&run, &roster, &args.out.join(REPORTS_DIR))?;
    }
    drop(lock);
    eprintln!(
        "scored {} records in {} groups into {}",
        run.scores.len(),
        run.aggregates.len(),
        args.out.display()
    );
    out!("{}", run.run_id);
    Ok(())
}

fn result_row(r: &SignificanceResultF64) -> String {
    format!(
        "{}\t{:.6}\t{:.4e}\t{:.6}\t{}",
        r.method, r.statistic, r.p_two_tailed, r.log10_p, r.significant
    )
}

pub fn sigtest(args: &SigtestArgs) -> Result<()> {
    if let Some(c) = &args.counts {
        let opts = ZTestOptions {
            alpha: args.alpha.unwrap_or(DEFAULT_ALPHA),
            continuity_correction: args.continuity_correction,
        };
        let r: SignificanceResultF64 = two_prop_z(c[0], c[1], c[2], c[3], &opts)?;
        if args.json {
            out!("{}", serde_json::to_string_pretty(&r)?);
        } else {
            out!("method\tstatistic\tp\tlog10_p\tsignificant");
            out!("{}", result_row(&r));
        }
        return Ok(());
    }
    let dir = args.run.as_deref().expect("clap requires --run without --counts");
    let mut run = load_run(dir)?;
    if let Some(alpha) = args.alpha {
        run.config.alpha = alpha;
    }
    if args.continuity_correction {
        run.config.continuity_correction = true;
    }
    if !args.methods.is_empty() {
        run.config.methods = args.methods.iter().map(|&m| m.into()).collect();
    }
    let roster = roster(&run, &args.roster)?;
    let cells = significance_matrix(&run, &roster, &run.config.methods)?;
    if args.json {
        out!("{}", serde_json::to_string_pretty(&cells)?);
        return Ok(());
    }
    out!("task\tsubject\tbaseline\tmetric\tmethod\tstatistic\tp\tlog10_p\tsignificant");
    for c in &cells {
        out!("{}\t{}\t{}\t{}\t{}", c.task, c.subject, c.baseline, c.metric, result_row(&c.result));
    }
    let n_sig = cells.iter().filter(|c| c.result.significant).count();
    eprintln!("{n_sig} of {} cells significant at alpha = {}", cells.len(), run.config.alpha);
    Ok(())
}

pub fn winrate(args: &WinrateArgs) -> Result<()> {
    let run = load_run(&args.run)?;
    let roster = roster(&run, &args.roster)?;
    let cells = winrate_matrix(&run, &roster)?;
    if args.json {
        out!("{}", serde_json::to_string_pretty(&cells)?);
        return Ok(());
    }
    out!("task\tsubject\ttrain_size\tbaseline\tcell\tmetrics_won");
    for c in &cells {
        let won: Vec<&str> = c.comparisons.iter().filter(|(_, w)| *w).map(|(m, _)| m.as_str()).collect();
        out!(
            "{}\t{}\t{}\t{}\t{}\t{}",
            c.task,
            c.subject.model,
            c.subject.train_size.map(|s| s.to_string()).unwrap_or_default(),
            c.baseline.model,
            c.tally,
            won.join(";")
        );
    }
    Ok(())
}

fn parse_point(s: &str) -> Result<(u32, f64)> {
    let bad = || Failure::Usage(format!("--points entry `{s}` is not SIZE:VALUE"));
    let (size, value) = s.split_once(':').ok_or_else(bad)?;
    Ok((size.trim().parse().map_err(|_| bad())?, value.trim().parse().map_err(|_| bad())?))
}

pub fn curve(args: &CurveArgs) -> Result<()> {
    if !args.points.is_empty() {
        let points = args.points.iter().map(|p| parse_point(p)).collect::<Result<Vec<_>>>()?;
        let c = efficiency_curve(args.metric.clone(), &points, args.epsilon)?;
        match c.plateau_size {
            Some(s) => eprintln!("{}: plateau at {s}", c.metric),
            None => eprintln!("{}: no plateau", c.metric),
        }
        out!("{}", serde_json::to_string_pretty(&c)?);
        return Ok(());
    }
    let dir = args.run.as_deref().expect("clap requires --run without --points");
    let run = load_run(dir)?;
    let curves: Vec<_> = efficiency_curves(&run)?
        .into_iter()
        .filter(|c| args.family.as_deref().is_none_or(|f| f == c.family))
        .collect();
    for c in &curves {
        let plateau = c.curve.plateau_size.map_or("none".to_string(), |s| s.to_string());
        eprintln!("{} {} {}: plateau {plateau}", c.family, c.task, c.curve.metric);
    }
    out!("{}", serde_json::to_string_pretty(&curves)?);
    Ok(())
}

pub fn report(args: &ReportArgs) -> Result<()> {
    let run = load_run(&args.run)?;
    let roster = roster(&run, &args.roster)?;
    let out = args.out.clone().unwrap_or_else(|| args.run.join(REPORTS_DIR));
    let _lock = RunLock::acquire(&args.run)?;
    write_reports(&run, &roster, &out)
}

pub fn plot(args: &PlotArgs) -> Result<()> {
    let mut rdr = csv::Reader::from_path(&args.data).with_context(|| format!("reading {}", args.data.display()))?;
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(["series", "x", "y"]) {
        return Err(Failure::Validation(format!("{}: header must be series,x,y", args.data.display())).into());
    }
    let mut order: Vec<String> = Vec::new();
    let mut points: BTreeMap<String, Vec<(String, f64)>> = BTreeMap::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let y: f64 = row[2]
            .parse()
            .map_err(|_| Failure::Validation(format!("{}: row {}: bad y `{}`", args.data.display(), i + 2, &row[2])))?;
        if !points.contains_key(&row[0]) {
            order.push(row[0].to_string());
        }
        points.entry(row[0].to_string()).or_default().push((row[1].to_string(), y));
    }
    let series = order
        .into_iter()
        .map(|name| {
            let pts = points.remove(&name).unwrap_or_default();
            Series::new(name, pts)
        })
        .collect();
    let chart = Chart {
        title: args.title.clone(),
        y_label: args.y_label.clone(),
        kind: match args.kind {
            KindArg::Bar => PlotKind::Bar,
            KindArg::Line => PlotKind::Line,
        },
        series,
    };
    emit_plot(&chart, &args.out)?;
    eprintln!("wrote {}", args.out.display());
    Ok(())
}
