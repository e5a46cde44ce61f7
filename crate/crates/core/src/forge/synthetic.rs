//! Deterministic placeholder corpus for exercising the pipeline offline.
//!
//! Every sample passes [`validate_gold`](super::validate_gold); the text is
//! templated filler and carries no meaning.

use crate::task::Task;

use super::sample::Sample;
use super::templates::{instruction_template, Language, SchemaField};

/// `per_task` samples for each task, ids `<task>-<5-digit index>`.
pub fn synthetic_samples(per_task: usize) -> Vec<Sample> {
    let fields = [SchemaField::named("authors"), SchemaField::named("year")];
    let instruction = |task| instruction_template(task, &fields, Language::Zh).expect("static template");
    let templates: Vec<(Task, String)> = Task::ALL.iter().map(|&t| (t, instruction(t))).collect();
    let mut out = Vec::with_capacity(per_task * 3);
    for (task, instruction) in &templates {
        for i in 0..per_task {
            let year = 2000 + i % 25;
            let context = format!(
                "第{i}篇文章：研究團隊於{year}年發表第{i}號成果，作者為王{i}與李{i}，主題為量子計算。"
            );
            let (gold, schema) = match task {
                Task::JsonExtract => (
                    format!("{{\"authors\": [\"王{i}\", \"李{i}\"], \"year\": [{year}]}}"),
                    vec!["authors".to_owned(), "year".to_owned()],
                ),
                Task::Kge => (
                    format!(
                        "【一、三元組格式（主詞－關係－受詞）】\n第{i}號成果－發表於－{year}年\n王{i}－撰寫－第{i}號成果\n第{i}號成果－主題為－量子計算"
                    ),
                    Vec::new(),
                ),
                Task::Ner => (
                    format!("{{\"PERSON\": [\"王{i}\", \"李{i}\"], \"DATE\": [\"{year}年\"]}}"),
                    Vec::new(),
                ),
            };
            out.push(Sample {
                id: format!("{task}-{i:05}"),
                task: *task,
                context,
                instruction: instruction.clone(),
                gold_output: gold,
                topic: "synthetic".to_owned(),
                schema_fields: schema,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forge::validate_gold;

    #[test]
    fn all_synthetic_samples_validate() {
        let samples = synthetic_samples(30);
        assert_eq!(samples.len(), 90);
        for s in &samples {
            let v = validate_gold(s);
            assert!(v.passed, "{}: {:?}", s.id, v.problems);
        }
    }
}
