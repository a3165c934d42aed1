//! SVMlight-style learning-to-rank features:
//! `grade qid:Q i:v j:w ... [# docid = D]` with strictly ascending 1-based
//! indices. Missing features are 0.

use std::io::{Read, Write};

use super::{parse_err, read_lines};
use crate::dataset::{LtrDataset, LtrQuery};
use crate::error::Result;

/// Feature indices above this are rejected rather than allocated.
pub const MAX_FEATURE_INDEX: usize = 1 << 16;

/// A parsed feature file plus the ids of queries dropped because none of
/// their lines carried features.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureParse {
    pub dataset: LtrDataset,
    pub dropped_queries: Vec<String>,
}

struct Line {
    grade: u32,
    doc: Option<String>,
    pairs: Vec<(usize, f64)>,
}

fn parse_line(ln: usize, line: &str) -> Result<Option<(String, Line)>> {
    let (body, comment) = match line.split_once('#') {
        Some((b, c)) => (b, Some(c)),
        None => (line, None),
    };
    let mut tokens = body.split_whitespace();
    let Some(grade_tok) = tokens.next() else {
        return Ok(None);
    };
    let grade: u32 = grade_tok.parse().map_err(|_| {
        parse_err(
            ln,
            format!("grade `{grade_tok}` is not a nonnegative integer"),
        )
    })?;
    let qid = tokens
        .next()
        .and_then(|t| t.strip_prefix("qid:"))
        .filter(|q| !q.is_empty())
        .ok_or_else(|| parse_err(ln, "missing `qid:` field"))?;
    let mut pairs: Vec<(usize, f64)> = Vec::new();
    for tok in tokens {
        let (i, v) = tok
            .split_once(':')
            .ok_or_else(|| parse_err(ln, format!("expected index:value, found `{tok}`")))?;
        let i: usize = i
            .parse()
            .map_err(|_| parse_err(ln, format!("bad feature index `{i}`")))?;
        if i == 0 || i > MAX_FEATURE_INDEX {
            return Err(parse_err(ln, format!("feature index {i} out of range")));
        }
        let v: f64 = v
            .parse()
            .map_err(|_| parse_err(ln, format!("bad feature value `{v}`")))?;
        if !v.is_finite() {
            return Err(parse_err(ln, format!("feature {i} is not finite")));
        }
        if pairs.last().is_some_and(|&(prev, _)| prev >= i) {
            return Err(parse_err(
                ln,
                format!("feature indices not strictly ascending at {i}"),
            ));
        }
        pairs.push((i, v));
    }
    let doc = comment.and_then(|c| {
        let c = c.trim();
        let rest = c.strip_prefix("docid")?.trim_start().strip_prefix('=')?;
        rest.split_whitespace().next().map(str::to_string)
    });
    Ok(Some((qid.to_string(), Line { grade, doc, pairs })))
}

/// Parses a feature file into dense per-query matrices. The dimension is the
/// largest index seen. Lines without feature pairs are dropped, and a query
/// left with no lines is dropped with a warning. Documents without a
/// `# docid = D` comment are named `{query}-{k}` by position.
pub fn parse_features<R: Read>(reader: R) -> Result<FeatureParse> {
    let mut order: Vec<String> = Vec::new();
    let mut lines: std::collections::HashMap<String, Vec<Line>> = Default::default();
    let mut n_features = 0usize;
    for (ln, raw) in read_lines(reader)? {
        let Some((qid, line)) = parse_line(ln, &raw)? else {
            continue;
        };
        if !lines.contains_key(&qid) {
            order.push(qid.clone());
        }
        let entry = lines.entry(qid).or_default();
        if line.pairs.is_empty() {
            continue;
        }
        n_features = n_features.max(line.pairs.last().map_or(0, |p| p.0));
        entry.push(line);
    }
    let mut dropped = Vec::new();
    let mut queries = Vec::new();
    for qid in order {
        let docs = lines.remove(&qid).unwrap_or_default();
        if docs.is_empty() {
            log::warn!("query `{qid}` has no feature lines; dropped");
            dropped.push(qid);
            continue;
        }
        let mut features = vec![0.0; docs.len() * n_features];
        for (k, l) in docs.iter().enumerate() {
            for &(i, v) in &l.pairs {
                features[k * n_features + i - 1] = v;
            }
        }
        queries.push(LtrQuery {
            doc_ids: docs
                .iter()
                .enumerate()
                .map(|(k, l)| l.doc.clone().unwrap_or_else(|| format!("{qid}-{k}")))
                .collect(),
            grades: docs.iter().map(|l| l.grade).collect(),
            query_id: qid,
            features,
            groups: None,
        });
    }
    Ok(FeatureParse {
        dataset: LtrDataset::new(n_features, queries)?,
        dropped_queries: dropped,
    })
}

/// Writes every feature (zeros included) so the dimension survives a round
/// trip.
pub fn write_features<W: Write>(mut w: W, dataset: &LtrDataset) -> Result<()> {
    let f = dataset.n_features();
    for q in dataset.queries() {
        for d in 0..q.n_docs() {
            write!(w, "{} qid:{}", q.grades[d], q.query_id)?;
            for (i, v) in q.row(d, f).iter().enumerate() {
                write!(w, " {}:{}", i + 1, v)?;
            }
            writeln!(w, " # docid = {}", q.doc_ids[d])?;
        }
    }
    Ok(())
}
