//! TREC run and qrels files.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};

use super::{parse_err, read_lines};
use crate::error::{Error, Result};
use crate::judgments::RelevanceJudgments;
use crate::policies::ScoredRun;

fn is_skipped(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#')
}

/// Parses a six-column run file `query Q0 doc rank score tag`.
///
/// Entries are ordered by descending score with ties broken by ascending
/// document id; the rank column is checked to be an integer but otherwise
/// ignored. Each query takes the tag of its first line.
pub fn parse_run<R: Read>(reader: R) -> Result<BTreeMap<String, ScoredRun>> {
    let mut by_query: BTreeMap<String, (String, Vec<(String, f64)>)> = BTreeMap::new();
    let mut seen: HashMap<(String, String), usize> = HashMap::new();
    for (ln, line) in read_lines(reader)? {
        if is_skipped(&line) {
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 6 {
            return Err(parse_err(
                ln,
                format!("expected 6 columns, found {}", cols.len()),
            ));
        }
        let (q, d) = (cols[0], cols[2]);
        cols[3]
            .parse::<i64>()
            .map_err(|_| parse_err(ln, format!("rank `{}` is not an integer", cols[3])))?;
        let score: f64 = cols[4]
            .parse()
            .map_err(|_| parse_err(ln, format!("score `{}` is not a number", cols[4])))?;
        if !score.is_finite() {
            return Err(parse_err(ln, format!("score `{}` is not finite", cols[4])));
        }
        if let Some(first) = seen.insert((q.to_string(), d.to_string()), ln) {
            return Err(parse_err(
                ln,
                format!("duplicate document `{d}` for query `{q}` (first on line {first})"),
            ));
        }
        by_query
            .entry(q.to_string())
            .or_insert_with(|| (cols[5].to_string(), Vec::new()))
            .1
            .push((d.to_string(), score));
    }
    by_query
        .into_iter()
        .map(|(q, (tag, mut entries))| {
            entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            let run = ScoredRun::new(q.clone(), tag, entries)?;
            Ok((q, run))
        })
        .collect()
}

/// Writes runs in TREC format with 1-based ranks and shortest round-trip
/// scores.
pub fn write_run<'a, W, I>(mut w: W, runs: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a ScoredRun>,
{
    for run in runs {
        for (rank, (d, s)) in run.entries().iter().enumerate() {
            writeln!(
                w,
                "{} Q0 {} {} {} {}",
                run.query_id(),
                d,
                rank + 1,
                s,
                run.tag()
            )?;
        }
    }
    Ok(())
}

/// Parsed qrels plus the number of negative grades clamped to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct QrelsParse {
    pub judgments: BTreeMap<String, RelevanceJudgments>,
    pub clamped: usize,
}

/// Parses a four-column qrels file `query iteration doc grade`. Negative
/// grades become 0 and are counted in [`QrelsParse::clamped`].
pub fn parse_qrels<R: Read>(reader: R) -> Result<QrelsParse> {
    let mut by_query: BTreeMap<String, Vec<(String, u32)>> = BTreeMap::new();
    let mut seen: HashMap<(String, String), usize> = HashMap::new();
    let mut clamped = 0;
    for (ln, line) in read_lines(reader)? {
        if is_skipped(&line) {
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 4 {
            return Err(parse_err(
                ln,
                format!("expected 4 columns, found {}", cols.len()),
            ));
        }
        let (q, d) = (cols[0], cols[2]);
        let raw: i64 = cols[3]
            .parse()
            .map_err(|_| parse_err(ln, format!("grade `{}` is not an integer", cols[3])))?;
        let grade = if raw < 0 {
            clamped += 1;
            0
        } else {
            u32::try_from(raw).map_err(|_| parse_err(ln, format!("grade {raw} out of range")))?
        };
        if let Some(first) = seen.insert((q.to_string(), d.to_string()), ln) {
            return Err(parse_err(
                ln,
                format!("duplicate judgment of `{d}` for query `{q}` (first on line {first})"),
            ));
        }
        by_query
            .entry(q.to_string())
            .or_default()
            .push((d.to_string(), grade));
    }
    if clamped > 0 {
        log::warn!("clamped {clamped} negative grades to 0");
    }
    let judgments = by_query
        .into_iter()
        .map(|(q, docs)| Ok((q.clone(), RelevanceJudgments::new(q, docs)?)))
        .collect::<Result<_>>()?;
    Ok(QrelsParse { judgments, clamped })
}

pub fn write_qrels<'a, W, I>(mut w: W, judgments: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a RelevanceJudgments>,
{
    for j in judgments {
        for (d, g) in j.pool().iter().zip(j.grades()) {
            writeln!(w, "{} 0 {} {}", j.query_id(), d, g)?;
        }
    }
    Ok(())
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        match e.position() {
            Some(p) => Error::Parse {
                line: p.line() as usize,
                msg: e.to_string(),
            },
            None => Error::Io(e.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_line_maps_to_entry() {
        let runs = parse_run("q1 Q0 d3 0 12.5 sys\n".as_bytes()).unwrap();
        assert_eq!(runs["q1"].entries(), &[("d3".to_string(), 12.5)]);
        assert_eq!(runs["q1"].tag(), "sys");
    }

    #[test]
    fn run_sorted_by_score_then_id() {
        let text = "q1 Q0 a 1 2.0 t\nq1 Q0 c 2 3.0 t\n# note\n\nq1 Q0 b 3 3.0 t\n";
        let runs = parse_run(text.as_bytes()).unwrap();
        let ids: Vec<&str> = runs["q1"].doc_ids().collect();
        assert_eq!(ids, ["b", "c", "a"]);
    }

    #[test]
    fn run_duplicate_names_query_doc_line() {
        let err = parse_run("q1 Q0 d3 1 1 t\nq1 Q0 d3 2 0.5 t\n".as_bytes()).unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("line 2") && msg.contains("d3") && msg.contains("q1"),
            "{msg}"
        );
    }

    #[test]
    fn run_rejects_bad_lines() {
        assert!(matches!(
            parse_run("q1 Q0 d3 1 1\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(parse_run("q1 Q0 d3 1 NaN t\n".as_bytes()).is_err());
        assert!(parse_run("q1 Q0 d3 1 inf t\n".as_bytes()).is_err());
        assert!(parse_run("q1 Q0 d3 x 1 t\n".as_bytes()).is_err());
    }

    #[test]
    fn qrels_grades_and_clamp() {
        let p = parse_qrels("q1 0 d3 2\nq1 0 d4 -1\n".as_bytes()).unwrap();
        let j = &p.judgments["q1"];
        assert_eq!(j.grade(j.index_of("d3").unwrap()), 2);
        assert_eq!(j.grade(j.index_of("d4").unwrap()), 0);
        assert_eq!(p.clamped, 1);
    }

    #[test]
    fn qrels_duplicate_is_error() {
        assert!(parse_qrels("q1 0 d3 2\nq1 0 d3 1\n".as_bytes()).is_err());
        assert!(parse_qrels("q1 0 d3\n".as_bytes()).is_err());
    }

    #[test]
    fn round_trip() {
        let text = "q1 Q0 a 1 0.1 t\nq1 Q0 b 2 -3e-7 t\nq2 Q0 z 1 5 u\n";
        let runs = parse_run(text.as_bytes()).unwrap();
        let mut out = Vec::new();
        write_run(&mut out, runs.values()).unwrap();
        assert_eq!(parse_run(&out[..]).unwrap(), runs);

        let qrels = parse_qrels("q1 0 a 1\nq1 0 b 0\nq2 0 z 3\n".as_bytes()).unwrap();
        let mut out = Vec::new();
        write_qrels(&mut out, qrels.judgments.values()).unwrap();
        assert_eq!(parse_qrels(&out[..]).unwrap(), qrels);
    }
}
