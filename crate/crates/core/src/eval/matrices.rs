use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::{efficiency_curve, paired_test, two_prop_z, winning_rate, TestMethod, WinTally};
use crate::task::{Metric, Task};
use crate::{EfficiencyCurveF64, SignificanceResultF64};

use super::predictions::SystemId;
use super::score::{Aggregate, EvalRun, MetricVector};

/// Who is compared against whom.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Roster {
    pub subjects: Vec<SystemId>,
    pub baselines: Vec<SystemId>,
}

impl Roster {
    /// Tuned systems (those with a train size) against off-the-shelf ones.
    pub fn default_for(run: &EvalRun) -> Self {
        let (subjects, baselines) = run.systems().into_iter().partition(|s| s.train_size.is_some());
        Roster { subjects, baselines }
    }

    /// Resolves names against the run. A name matches a system by model name
    /// or, failing that, by family, so `ETLCH` selects every tuned size.
    pub fn resolve(run: &EvalRun, subject: &str, baselines: &[String]) -> Result<Self> {
        let systems = run.systems();
        let pick = |name: &str| -> Result<Vec<SystemId>> {
            let exact: Vec<SystemId> = systems.iter().filter(|s| s.model == name).cloned().collect();
            if !exact.is_empty() {
                return Ok(exact);
            }
            let family: Vec<SystemId> = systems.iter().filter(|s| s.family() == name).cloned().collect();
            if family.is_empty() {
                let known: Vec<String> = systems.iter().map(|s| s.model.clone()).collect();
                return Err(Error::invalid(format!(
                    "no model `{name}` in run (known: {})",
                    known.join(", ")
                )));
            }
            Ok(family)
        };
        let subjects = pick(subject)?;
        let baselines = if baselines.is_empty() {
            systems.iter().filter(|s| s.train_size.is_none() && !subjects.contains(s)).cloned().collect()
        } else {
            let mut out = Vec::new();
            for b in baselines {
                out.extend(pick(b)?);
            }
            out.sort();
            out.dedup();
            out
        };
        Ok(Roster { subjects, baselines })
    }

    fn pairs(&self) -> impl Iterator<Item = (&SystemId, &SystemId)> {
        self.subjects
            .iter()
            .flat_map(move |s| self.baselines.iter().filter(move |b| *b != s).map(move |b| (s, b)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignificanceCell {
    pub task: Task,
    pub subject: SystemId,
    pub baseline: SystemId,
    pub metric: Metric,
    pub result: SignificanceResultF64,
}

fn per_example(group: &BTreeMap<&str, &MetricVector>, metric: Metric) -> Vec<f64> {
    group
        .values()
        .map(|m| match metric {
            Metric::RougeLF1 => m.rouge_l.f1,
            Metric::Cosine => m.cosine,
            Metric::ParseValidity => f64::from(u8::from(m.parses())),
        })
        .collect()
}

fn tasks_of(run: &EvalRun, system: &SystemId) -> BTreeSet<Task> {
    run.aggregates.iter().filter(|a| &a.system == system).map(|a| a.task).collect()
}

fn require<'r>(run: &'r EvalRun, task: Task, system: &SystemId) -> Result<&'r Aggregate> {
    run.aggregate_for(task, system)
        .ok_or_else(|| Error::MissingAggregate(format!("{system} on {task}")))
}

/// Per-example paired tests on ROUGE-L F1 and cosine for each requested
/// method, plus a two-proportion z-test on JSON parse counts. Subject and
/// baseline must cover the same example ids in every task the subject has.
pub fn significance_matrix(
    run: &EvalRun,
    roster: &Roster,
    methods: &[TestMethod],
) -> Result<Vec<SignificanceCell>> {
    let paired: Vec<TestMethod> = methods.iter().copied().filter(|m| *m != TestMethod::TwoPropZ).collect();
    let opts = run.config.paired_options();
    let mut cells = Vec::new();
    for (subject, baseline) in roster.pairs() {
        for task in tasks_of(run, subject) {
            let a = run.group(task, subject);
            let b = run.group(task, baseline);
            if b.is_empty() {
                return Err(Error::MissingAggregate(format!("{baseline} on {task}")));
            }
            let missing: Vec<String> = a
                .keys()
                .filter(|id| !b.contains_key(*id))
                .map(|id| format!("{id} (absent for {baseline})"))
                .chain(b.keys().filter(|id| !a.contains_key(*id)).map(|id| format!("{id} (absent for {subject})")))
                .collect();
            if !missing.is_empty() {
                return Err(Error::Alignment {
                    context: format!("{task}: {subject} vs {baseline}"),
                    missing,
                });
            }
            for &metric in task.applicable_metrics() {
                if metric == Metric::ParseValidity {
                    let (sa, sb) = (require(run, task, subject)?, require(run, task, baseline)?);
                    let result = two_prop_z(
                        sa.parse_count.unwrap_or(0),
                        sa.n,
                        sb.parse_count.unwrap_or(0),
                        sb.n,
                        &run.config.z_options(),
                    )?;
                    cells.push(SignificanceCell {
                        task,
                        subject: subject.clone(),
                        baseline: baseline.clone(),
                        metric,
                        result,
                    });
                    continue;
                }
                let (xa, xb) = (per_example(&a, metric), per_example(&b, metric));
                for &method in &paired {
                    cells.push(SignificanceCell {
                        task,
                        subject: subject.clone(),
                        baseline: baseline.clone(),
                        metric,
                        result: paired_test(&xa, &xb, method, &opts)?,
                    });
                }
            }
        }
    }
    Ok(cells)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WinRateCell {
    pub task: Task,
    pub subject: SystemId,
    pub baseline: SystemId,
    pub comparisons: Vec<(Metric, bool)>,
    pub tally: WinTally,
}

/// Strict comparison of aggregates; parse rates compare by cross-multiplying
/// counts so that group sizes may differ without rounding.
pub fn beats(subject: &Aggregate, baseline: &Aggregate, metric: Metric) -> bool {
    match metric {
        Metric::RougeLF1 => subject.rouge_l_f1 > baseline.rouge_l_f1,
        Metric::Cosine => subject.cosine > baseline.cosine,
        Metric::ParseValidity => {
            let (ka, kb) = (subject.parse_count.unwrap_or(0), baseline.parse_count.unwrap_or(0));
            ka * baseline.n > kb * subject.n
        }
    }
}

/// One cell per (task, subject, baseline) over the task's applicable metrics.
pub fn winrate_matrix(run: &EvalRun, roster: &Roster) -> Result<Vec<WinRateCell>> {
    let mut cells = Vec::new();
    for (subject, baseline) in roster.pairs() {
        for task in tasks_of(run, subject) {
            let sa = require(run, task, subject)?;
            let sb = require(run, task, baseline)?;
            let comparisons: Vec<(Metric, bool)> = task
                .applicable_metrics()
                .iter()
                .map(|&m| (m, beats(sa, sb, m)))
                .collect();
            let tally = winning_rate(&comparisons, task)?;
            cells.push(WinRateCell {
                task,
                subject: subject.clone(),
                baseline: baseline.clone(),
                comparisons,
                tally,
            });
        }
    }
    Ok(cells)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveEntry {
    pub family: String,
    pub task: Task,
    pub curve: EfficiencyCurveF64,
}

/// Metric against train size for every model family with at least two sizes.
pub fn efficiency_curves(run: &EvalRun) -> Result<Vec<CurveEntry>> {
    let mut by_family: BTreeMap<(String, Task), Vec<&Aggregate>> = BTreeMap::new();
    for a in run.aggregates.iter().filter(|a| a.system.train_size.is_some()) {
        by_family.entry((a.system.family().to_string(), a.task)).or_default().push(a);
    }
    let mut out = Vec::new();
    for ((family, task), mut group) in by_family {
        if group.len() < 2 {
            continue;
        }
        group.sort_by_key(|a| a.system.train_size);
        let sizes: Vec<u32> = group.iter().map(|a| a.system.train_size.unwrap_or(0)).collect();
        if sizes.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!(
                "family {family} has two models at the same train size on {task}"
            )));
        }
        let series = |f: &dyn Fn(&Aggregate) -> f64| -> Vec<(u32, f64)> {
            group.iter().map(|a| (a.system.train_size.unwrap_or(0), f(a))).collect()
        };
        let eps = run.config.epsilon_unit;
        let mut curves = vec![
            efficiency_curve("rouge-l-f1", &series(&|a| a.rouge_l_f1), eps)?,
            efficiency_curve("cosine", &series(&|a| a.cosine), eps)?,
        ];
        if task == Task::JsonExtract {
            curves.push(efficiency_curve(
                "parse-count",
                &series(&|a| a.parse_count.unwrap_or(0) as f64),
                run.config.epsilon_count,
            )?);
        }
        out.extend(curves.into_iter().map(|curve| CurveEntry {
            family: family.clone(),
            task,
            curve,
        }));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{score_run, PredictionRecord, ScoreConfig};

    fn rec(id: &str, task: Task, model: &str, size: Option<u32>, out: &str, reference: &str) -> PredictionRecord {
        PredictionRecord {
            schema_version: None,
            example_id: id.into(),
            task,
            model: model.into(),
            train_size: size,
            output_text: out.into(),
            reference_text: reference.into(),
        }
    }

    #[test]
    fn ties_are_not_wins() {
        let records = vec![
            rec("1", Task::Kge, "T-100", Some(100), "甲－是－乙", "甲－是－乙"),
            rec("1", Task::Kge, "B", None, "甲－是－乙", "甲－是－乙"),
        ];
        let run = score_run(&records, &ScoreConfig::default(), None).unwrap();
        let cells = winrate_matrix(&run, &Roster::default_for(&run)).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].tally.to_string(), "0/2 = 0%");
    }

    #[test]
    fn identical_vectors_not_significant() {
        let records: Vec<PredictionRecord> = (0..5)
            .flat_map(|i| {
                let id = i.to_string();
                let out = "a".repeat(i + 1);
                [
                    rec(&id, Task::Ner, "T-100", Some(100), &out, "aaa"),
                    rec(&id, Task::Ner, "B", None, &out, "aaa"),
                ]
            })
            .collect();
        let run = score_run(&records, &ScoreConfig::default(), None).unwrap();
        let cells = significance_matrix(&run, &Roster::default_for(&run), &[TestMethod::PairedT]).unwrap();
        assert_eq!(cells.len(), 2);
        for c in cells {
            assert_eq!(c.result.p_two_tailed, 1.0);
            assert!(!c.result.significant);
        }
    }

    #[test]
    fn misaligned_ids_are_listed() {
        let records = vec![
            rec("1", Task::Ner, "T-100", Some(100), "a", "a"),
            rec("2", Task::Ner, "T-100", Some(100), "a", "a"),
            rec("1", Task::Ner, "B", None, "a", "a"),
            rec("3", Task::Ner, "B", None, "a", "a"),
        ];
        let run = score_run(&records, &ScoreConfig::default(), None).unwrap();
        match significance_matrix(&run, &Roster::default_for(&run), &[TestMethod::PairedT]) {
            Err(Error::Alignment { missing, .. }) => {
                assert_eq!(missing, ["2 (absent for B)", "3 (absent for T-100@100)"]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_baseline_task_is_a_gap() {
        let records = vec![
            rec("1", Task::Ner, "T-100", Some(100), "a", "a"),
            rec("1", Task::Kge, "B", None, "a", "a"),
        ];
        let run = score_run(&records, &ScoreConfig::default(), None).unwrap();
        let roster = Roster::default_for(&run);
        assert!(matches!(winrate_matrix(&run, &roster), Err(Error::MissingAggregate(_))));
    }

    #[test]
    fn resolve_by_family() {
        let records = vec![
            rec("1", Task::Ner, "T-100", Some(100), "a", "a"),
            rec("1", Task::Ner, "T-300", Some(300), "a", "a"),
            rec("1", Task::Ner, "B", None, "a", "a"),
        ];
        let run = score_run(&records, &ScoreConfig::default(), None).unwrap();
        let r = Roster::resolve(&run, "T", &[]).unwrap();
        assert_eq!(r.subjects.len(), 2);
        assert_eq!(r.baselines, [SystemId::new("B", None)]);
        assert_eq!(Roster::resolve(&run, "T-300", &["B".into()]).unwrap().subjects.len(), 1);
        assert!(Roster::resolve(&run, "nope", &[]).is_err());
        let curves = efficiency_curves(&run).unwrap();
        assert_eq!(curves.len(), 2);
        assert!(curves.iter().all(|c| c.curve.points.len() == 2));
    }
}
