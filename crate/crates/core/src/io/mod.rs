//! Text formats: TREC runs and qrels, SVMlight features, group files and
//! CSV results. All formats are UTF-8 and newline-delimited.

pub mod features;
pub mod groups;
pub mod results;
pub mod trec;

pub use features::{parse_features, write_features, FeatureParse};
pub use groups::{parse_groups, write_groups, GroupRow};
pub use results::{
    macro_average_auc, macro_average_eval, read_auc_rows, read_eval_rows, write_auc_rows,
    write_eval_rows, write_static_rows, AucRow, EvalRow, StaticRow, AUC_HEADER, EVAL_HEADER,
    STATIC_HEADER,
};
pub use trec::{parse_qrels, parse_run, write_qrels, write_run, QrelsParse};

use std::io::Read;

use crate::error::{Error, Result};

/// Renders `x` with 6 significant digits in the style of C's `%g`.
pub fn fmt_sig6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        trim_zeros(&format!("{:.*}", (5 - exp) as usize, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Reads all input and yields `(line_number, line)` pairs, 1-based. Invalid
/// UTF-8 is reported with its line number rather than panicking.
pub(crate) fn read_lines<R: Read>(mut reader: R) -> Result<Vec<(usize, String)>> {
    let mut buf = Vec::new();
    reader.read_to_end(&mut buf)?;
    buf.split(|&b| b == b'\n')
        .enumerate()
        .map(|(i, raw)| {
            let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
            std::str::from_utf8(raw)
                .map(|s| (i + 1, s.to_string()))
                .map_err(|_| Error::Parse {
                    line: i + 1,
                    msg: "invalid UTF-8".into(),
                })
        })
        .collect()
}

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}
