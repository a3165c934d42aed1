//! CSV result files. Floats are written with 6 significant digits; macro
//! averages use the query id `ALL`.

use std::io::{Read, Write};

use super::{fmt_sig6, parse_err};
use crate::error::Result;
use crate::metrics::EEBreakdown;

pub const EVAL_HEADER: [&str; 8] = [
    "query", "policy", "param", "ee_l", "ee_d", "ee_r", "d_norm", "r_norm",
];
pub const AUC_HEADER: [&str; 3] = ["query", "policy", "ee_auc"];
pub const STATIC_HEADER: [&str; 5] = ["query", "policy", "param", "rbp", "err"];

pub const ALL_QUERIES: &str = "ALL";

/// One curve point (or single policy evaluation) for one query.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub query: String,
    pub policy: String,
    pub param: Option<f64>,
    pub ee_l: f64,
    pub ee_d: f64,
    pub ee_r: f64,
    pub d_norm: f64,
    pub r_norm: f64,
}

impl EvalRow {
    pub fn new(
        query: impl Into<String>,
        policy: impl Into<String>,
        param: Option<f64>,
        ee: &EEBreakdown,
        d_norm: f64,
        r_norm: f64,
    ) -> Self {
        EvalRow {
            query: query.into(),
            policy: policy.into(),
            param,
            ee_l: ee.ee_l,
            ee_d: ee.ee_d,
            ee_r: ee.ee_r,
            d_norm,
            r_norm,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AucRow {
    pub query: String,
    pub policy: String,
    pub ee_auc: f64,
}

/// Expected static RBP and ERR of one policy setting.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticRow {
    pub query: String,
    pub policy: String,
    pub param: Option<f64>,
    pub rbp: f64,
    pub err: f64,
}

fn fmt_param(p: Option<f64>) -> String {
    p.map(fmt_sig6).unwrap_or_default()
}

fn writer<W: Write>(w: W, header: &[&str]) -> Result<csv::Writer<W>> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    out.write_record(header)?;
    Ok(out)
}

pub fn write_eval_rows<W: Write>(w: W, rows: &[EvalRow]) -> Result<()> {
    let mut out = writer(w, &EVAL_HEADER)?;
    for r in rows {
        out.write_record([
            r.query.clone(),
            r.policy.clone(),
            fmt_param(r.param),
            fmt_sig6(r.ee_l),
            fmt_sig6(r.ee_d),
            fmt_sig6(r.ee_r),
            fmt_sig6(r.d_norm),
            fmt_sig6(r.r_norm),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_auc_rows<W: Write>(w: W, rows: &[AucRow]) -> Result<()> {
    let mut out = writer(w, &AUC_HEADER)?;
    for r in rows {
        out.write_record([r.query.clone(), r.policy.clone(), fmt_sig6(r.ee_auc)])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_static_rows<W: Write>(w: W, rows: &[StaticRow]) -> Result<()> {
    let mut out = writer(w, &STATIC_HEADER)?;
    for r in rows {
        out.write_record([
            r.query.clone(),
            r.policy.clone(),
            fmt_param(r.param),
            fmt_sig6(r.rbp),
            fmt_sig6(r.err),
        ])?;
    }
    out.flush()?;
    Ok(())
}

fn read_records<R: Read>(r: R, header: &[&str]) -> Result<Vec<(usize, csv::StringRecord)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(r);
    let mut records = rdr.records();
    match records.next() {
        Some(h) => {
            let h = h?;
            if h.iter().ne(header.iter().copied()) {
                return Err(parse_err(
                    1,
                    format!("expected header `{}`", header.join(",")),
                ));
            }
        }
        None => return Err(parse_err(1, "missing header")),
    }
    records
        .map(|rec| {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            if rec.len() != header.len() {
                return Err(parse_err(
                    line,
                    format!("expected {} fields, found {}", header.len(), rec.len()),
                ));
            }
            Ok((line, rec))
        })
        .collect()
}

fn float(line: usize, s: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| parse_err(line, format!("`{s}` is not a number")))
}

fn opt_float(line: usize, s: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        Ok(None)
    } else {
        float(line, s).map(Some)
    }
}

pub fn read_eval_rows<R: Read>(r: R) -> Result<Vec<EvalRow>> {
    read_records(r, &EVAL_HEADER)?
        .into_iter()
        .map(|(ln, rec)| {
            Ok(EvalRow {
                query: rec[0].to_string(),
                policy: rec[1].to_string(),
                param: opt_float(ln, &rec[2])?,
                ee_l: float(ln, &rec[3])?,
                ee_d: float(ln, &rec[4])?,
                ee_r: float(ln, &rec[5])?,
                d_norm: float(ln, &rec[6])?,
                r_norm: float(ln, &rec[7])?,
            })
        })
        .collect()
}

pub fn read_auc_rows<R: Read>(r: R) -> Result<Vec<AucRow>> {
    read_records(r, &AUC_HEADER)?
        .into_iter()
        .map(|(ln, rec)| {
            Ok(AucRow {
                query: rec[0].to_string(),
                policy: rec[1].to_string(),
                ee_auc: float(ln, &rec[2])?,
            })
        })
        .collect()
}

fn param_key(p: Option<f64>) -> Option<u64> {
    p.map(f64::to_bits)
}

/// One `ALL` row per (policy, param), in order of first appearance, holding
/// the mean of each metric over queries. Existing `ALL` rows are ignored.
pub fn macro_average_eval(rows: &[EvalRow]) -> Vec<EvalRow> {
    let mut groups: Vec<(EvalRow, usize)> = Vec::new();
    for r in rows.iter().filter(|r| r.query != ALL_QUERIES) {
        let slot = groups
            .iter_mut()
            .find(|(g, _)| g.policy == r.policy && param_key(g.param) == param_key(r.param));
        match slot {
            Some((g, n)) => {
                g.ee_l += r.ee_l;
                g.ee_d += r.ee_d;
                g.ee_r += r.ee_r;
                g.d_norm += r.d_norm;
                g.r_norm += r.r_norm;
                *n += 1;
            }
            None => groups.push((
                EvalRow {
                    query: ALL_QUERIES.into(),
                    ..r.clone()
                },
                1,
            )),
        }
    }
    groups
        .into_iter()
        .map(|(mut g, n)| {
            let n = n as f64;
            g.ee_l /= n;
            g.ee_d /= n;
            g.ee_r /= n;
            g.d_norm /= n;
            g.r_norm /= n;
            g
        })
        .collect()
}

/// One `ALL` row per policy with the mean EE-AUC over queries.
pub fn macro_average_auc(rows: &[AucRow]) -> Vec<AucRow> {
    let mut groups: Vec<(String, f64, usize)> = Vec::new();
    for r in rows.iter().filter(|r| r.query != ALL_QUERIES) {
        match groups.iter_mut().find(|(p, _, _)| *p == r.policy) {
            Some((_, s, n)) => {
                *s += r.ee_auc;
                *n += 1;
            }
            None => groups.push((r.policy.clone(), r.ee_auc, 1)),
        }
    }
    groups
        .into_iter()
        .map(|(policy, s, n)| AucRow {
            query: ALL_QUERIES.into(),
            policy,
            ee_auc: s / n as f64,
        })
        .collect()
}
