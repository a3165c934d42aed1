//! Group-attribute files: `query doc group` per line.

use std::io::{Read, Write};

use super::{parse_err, read_lines};
use crate::dataset::LtrDataset;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRow {
    pub query: String,
    pub doc: String,
    pub group: String,
}

/// PageRank thresholds of the reference discretization: `<1000`,
/// `1000–10000`, `≥10000`.
pub const PAGERANK_THRESHOLDS: [f64; 2] = [1000.0, 10000.0];

/// Group index of `value` given ascending `thresholds`: the number of
/// thresholds it reaches.
pub fn discretize(value: f64, thresholds: &[f64]) -> usize {
    thresholds.iter().filter(|&&t| value >= t).count()
}

pub fn parse_groups<R: Read>(reader: R) -> Result<Vec<GroupRow>> {
    let mut rows = Vec::new();
    for (ln, line) in read_lines(reader)? {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = t.split_whitespace().collect();
        if cols.len() != 3 {
            return Err(parse_err(
                ln,
                format!("expected 3 columns, found {}", cols.len()),
            ));
        }
        rows.push(GroupRow {
            query: cols[0].into(),
            doc: cols[1].into(),
            group: cols[2].into(),
        });
    }
    Ok(rows)
}

pub fn write_groups<'a, W, I>(mut w: W, rows: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a GroupRow>,
{
    for r in rows {
        writeln!(w, "{} {} {}", r.query, r.doc, r.group)?;
    }
    Ok(())
}

/// Group rows of a dataset whose queries carry labels; unlabeled queries
/// are skipped.
pub fn dataset_group_rows(dataset: &LtrDataset) -> Vec<GroupRow> {
    let names = dataset.group_names();
    dataset
        .queries()
        .iter()
        .filter_map(|q| q.groups.as_ref().map(|g| (q, g)))
        .flat_map(|(q, g)| {
            q.doc_ids.iter().zip(g).map(|(d, &gi)| GroupRow {
                query: q.query_id.clone(),
                doc: d.clone(),
                group: names.get(gi).cloned().unwrap_or_else(|| gi.to_string()),
            })
        })
        .collect()
}

/// Labels every document by discretizing raw feature `feature` (0-based),
/// optionally read as `log10` of the attribute.
pub fn discretize_feature(
    dataset: &mut LtrDataset,
    feature: usize,
    thresholds: &[f64],
    log10: bool,
) {
    let f = dataset.n_features();
    for q in dataset.queries_mut() {
        let labels = (0..q.n_docs())
            .map(|d| {
                let v = q.row(d, f)[feature];
                discretize(if log10 { 10f64.powf(v) } else { v }, thresholds)
            })
            .collect();
        q.groups = Some(labels);
    }
}
