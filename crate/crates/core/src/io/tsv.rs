//! Tab-separated report writers. Every table starts with one `#`-prefixed
//! header row; numbers use fixed six-decimal formatting.

use std::fmt::Write as _;

use super::plot::PlotSeries;
use crate::classifier::Posterior;
use crate::data::{AttributeKind, Dataset, Schema};
use crate::evaluation::{EvalReport, LearningCurve};
use crate::scalar::Scalar;

/// Formats a number with six decimals (`inf`/`-inf` pass through).
pub fn num(x: f64) -> String {
    format!("{x:.6}")
}

fn row(out: &mut String, fields: &[String]) {
    let _ = writeln!(out, "{}", fields.join("\t"));
}

fn header(out: &mut String, fields: &[String]) {
    let _ = writeln!(out, "#{}", fields.join("\t"));
}

/// Per-fold accuracy of each method; `absent_class` is 1 when the fold's
/// training part lacked a declared class.
pub fn cv_folds(report: &EvalReport) -> String {
    let mut out = String::new();
    let mut cols = vec!["fold".to_string(), "n_test".into()];
    cols.extend(report.methods.iter().map(|m| format!("acc_{}", m.choice.name())));
    if report.comparison.is_some() {
        cols.push("difference".into());
    }
    cols.push("absent_class".into());
    header(&mut out, &cols);
    for (f, &size) in report.fold_sizes.iter().enumerate() {
        let mut fields = vec![f.to_string(), size.to_string()];
        fields.extend(report.methods.iter().map(|m| num(m.per_fold_accuracy[f])));
        if let Some(c) = &report.comparison {
            let acc = |choice| {
                report
                    .method(choice)
                    .map(|m| m.per_fold_accuracy[f])
                    .unwrap_or(f64::NAN)
            };
            fields.push(num(acc(c.challenger) - acc(c.baseline)));
        }
        fields.push(u8::from(report.absent_class_folds.contains(&f)).to_string());
        row(&mut out, &fields);
    }
    out
}

/// Shape of a dataset as listed beside cross-validation results.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetSummary {
    pub name: String,
    pub size: usize,
    pub classes: usize,
    pub nominal: usize,
    pub continuous: usize,
}

impl DatasetSummary {
    pub fn of<T: Scalar>(name: impl Into<String>, dataset: &Dataset<T>) -> Self {
        let schema: &Schema = dataset.schema();
        let nominal = schema
            .attributes()
            .iter()
            .filter(|a| matches!(a.kind, AttributeKind::Nominal(_)))
            .count();
        DatasetSummary {
            name: name.into(),
            size: dataset.len(),
            classes: schema.num_classes(),
            nominal,
            continuous: schema.len() - nominal,
        }
    }
}

/// One row per dataset: its shape, mean/std/stderr accuracy per method, and
/// the paired t-test of the first two methods.
pub fn cv_summary(rows: &[(DatasetSummary, EvalReport)]) -> String {
    let mut out = String::new();
    let Some((_, first)) = rows.first() else {
        return out;
    };
    let mut cols: Vec<String> = ["dataset", "size", "classes", "nominal", "continuous"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for m in &first.methods {
        for stat in ["mean", "std", "stderr"] {
            cols.push(format!("{}_{stat}", m.choice.name()));
        }
    }
    cols.extend(["t", "dof", "significance", "winner"].iter().map(|s| s.to_string()));
    header(&mut out, &cols);
    for (summary, report) in rows {
        let mut fields = vec![
            summary.name.clone(),
            summary.size.to_string(),
            summary.classes.to_string(),
            summary.nominal.to_string(),
            summary.continuous.to_string(),
        ];
        for m in &report.methods {
            fields.extend([num(m.mean), num(m.std), num(m.std_error)]);
        }
        match &report.comparison {
            Some(c) => fields.extend([
                num(c.test.t),
                c.test.dof.to_string(),
                num(c.test.significance),
                c.winner.map_or("none", |w| w.name()).to_string(),
            ]),
            None => fields.extend(["-", "-", "-", "-"].iter().map(|s| s.to_string())),
        }
        row(&mut out, &fields);
    }
    out
}

pub fn learning_curves(curves: &[LearningCurve]) -> String {
    let mut out = String::new();
    header(
        &mut out,
        &["method", "train_size", "mean", "std", "stderr", "runs"].map(String::from),
    );
    for curve in curves {
        for p in &curve.points {
            let stderr = if p.runs > 0 {
                p.std_accuracy / (p.runs as f64).sqrt()
            } else {
                f64::NAN
            };
            row(
                &mut out,
                &[
                    curve.choice.name().to_string(),
                    p.train_size.to_string(),
                    num(p.mean_accuracy),
                    num(p.std_accuracy),
                    num(stderr),
                    p.runs.to_string(),
                ],
            );
        }
    }
    out
}

/// One row per instance: index, given label (`?` if none), predicted label,
/// degenerate flag and the posterior of every class.
pub fn predictions<T: Scalar>(schema: &Schema, rows: &[(Option<&str>, &Posterior<T>)]) -> String {
    let mut out = String::new();
    let mut cols = vec![
        "index".to_string(),
        "actual".into(),
        "predicted".into(),
        "degenerate".into(),
    ];
    cols.extend(schema.labels().iter().map(|l| format!("p_{l}")));
    header(&mut out, &cols);
    for (i, (actual, post)) in rows.iter().enumerate() {
        let mut fields = vec![
            i.to_string(),
            actual.unwrap_or("?").to_string(),
            post.predicted_label(schema).to_string(),
            u8::from(post.degenerate).to_string(),
        ];
        fields.extend(post.probabilities.iter().map(|p| num(p.as_f64())));
        row(&mut out, &fields);
    }
    out
}

pub fn plot_series<T: Scalar>(series: &[PlotSeries<T>]) -> String {
    let mut out = String::new();
    header(&mut out, &["series", "x", "y"].map(String::from));
    for s in series {
        for (x, y) in &s.points {
            row(&mut out, &[s.name.clone(), num(x.as_f64()), num(y.as_f64())]);
        }
    }
    out
}
