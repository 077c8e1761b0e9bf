//! Score tables shared by the walk and heuristic scorers.

use std::io::Write;

use serde_json::{Map, Number, Value};

use crate::error::{Error, Result};
use crate::graph::Pair;

/// Renders a float with 17 significant digits.
pub fn format_score(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with header `source,target,score`, preceded by `# ` comment lines.
pub fn write_score_csv<W: Write>(pairs: &[Pair], scores: &[f64], comments: &[String], mut out: W) -> Result<()> {
    check_lengths(pairs, scores)?;
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "source,target,score")?;
    for (&(u, v), &s) in pairs.iter().zip(scores) {
        writeln!(out, "{u},{v},{}", format_score(s))?;
    }
    Ok(())
}

/// JSON object `{"meta": ..., "scores": {"u,v": score, ...}}`. Later
/// duplicates of a pair overwrite earlier ones.
pub fn score_json(pairs: &[Pair], scores: &[f64], meta: Value) -> Result<Value> {
    check_lengths(pairs, scores)?;
    let mut table = Map::new();
    for (&(u, v), &s) in pairs.iter().zip(scores) {
        let n = Number::from_f64(s).ok_or_else(|| Error::NonFinite(format!("score of ({u}, {v})")))?;
        table.insert(format!("{u},{v}"), Value::Number(n));
    }
    let mut root = Map::new();
    root.insert("meta".into(), meta);
    root.insert("scores".into(), Value::Object(table));
    Ok(Value::Object(root))
}

fn check_lengths(pairs: &[Pair], scores: &[f64]) -> Result<()> {
    if pairs.len() != scores.len() {
        return Err(Error::DimensionMismatch {
            expected: pairs.len(),
            actual: scores.len(),
        });
    }
    Ok(())
}

/// Parses a CSV score table written by [`write_score_csv`].
pub fn read_score_csv(text: &str) -> Result<Vec<(Pair, f64)>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == "source,target,score" {
            continue;
        }
        let bad = || Error::MalformedLine {
            line: i + 1,
            content: line.to_string(),
        };
        let mut it = line.split(',');
        let u = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let v = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let s = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        rows.push(((u, v), s));
    }
    Ok(rows)
}
