use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{Map, Value};

use crate::args::Format;

pub const WATERMARK: &str = "unverified hypothesis";

/// A command result: the JSON document plus optional hand-written text and CSV forms.
#[derive(Debug, Default)]
pub struct Report {
    pub json: Value,
    pub text: Option<String>,
    pub csv: Option<Vec<Vec<String>>>,
    /// The chain context was forced past a failed locality guard.
    pub watermark: bool,
    /// Some verification claim failed.
    pub failed: bool,
}

impl Report {
    pub fn new(json: Value) -> Self {
        Report { json, ..Report::default() }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn text_lines(map: &Map<String, Value>) -> String {
    let mut out = String::new();
    for (k, v) in map {
        out.push_str(&format!("{k}: {}\n", scalar(v)));
    }
    out
}

fn render_text(report: &Report) -> String {
    let body = match (&report.text, &report.json) {
        (Some(t), _) => t.clone(),
        (None, Value::Object(map)) => text_lines(map),
        (None, other) => format!("{}\n", scalar(other)),
    };
    if report.watermark {
        format!("WARNING: {WATERMARK} (locality guard bypassed with --force)\n{body}")
    } else {
        body
    }
}

fn render_json(report: &Report) -> Result<String> {
    let mut json = report.json.clone();
    if report.watermark {
        if let Value::Object(map) = &mut json {
            map.insert("watermark".into(), Value::String(WATERMARK.into()));
        }
    }
    Ok(serde_json::to_string_pretty(&json)? + "\n")
}

fn render_csv(report: &Report) -> Result<String> {
    let rows: Vec<Vec<String>> = match (&report.csv, &report.json) {
        (Some(rows), _) => rows.clone(),
        (None, Value::Object(map)) => {
            let mut rows = vec![vec!["key".to_string(), "value".to_string()]];
            rows.extend(map.iter().map(|(k, v)| vec![k.clone(), scalar(v)]));
            rows
        }
        (None, other) => vec![vec![scalar(other)]],
    };
    let mut writer = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    if report.watermark {
        writer.write_record(["watermark", WATERMARK])?;
    }
    for row in rows {
        writer.write_record(&row)?;
    }
    Ok(String::from_utf8(writer.into_inner()?)?)
}

pub fn emit(report: &Report, format: Format, out: Option<&Path>) -> Result<()> {
    let rendered = match format {
        Format::Text => render_text(report),
        Format::Json => render_json(report)?,
        Format::Csv => render_csv(report)?,
    };
    match out {
        Some(path) => fs::write(path, rendered).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(rendered.as_bytes())?;
            Ok(())
        }
    }
}
