//! Text formats for instances, label sets and experiment summaries.
//!
//! Instance files are line oriented; `#` starts a comment.
//!
//! ```text
//! instance <N> <M>
//! task <j> <beta> <+1|-1>
//! requester <j> <value> <bid>
//! worker <i> <cost> <bid> : <task> <task> ...
//! theta <i> <θ_i0> ... <θ_i(M-1)>
//! ```
//!
//! Every task, requester, worker and theta row appears exactly once.
//! [`write_instance`] emits the canonical layout, which parses back to an
//! identical file.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::aggregation::{AggregatedResult, LabelMatrix};
use crate::error::{Error, Result};
use crate::model::{AuctionOutcome, Instance, Label, ReliabilityMatrix, Requester, Task, Worker};
use crate::sim::SummaryRow;

fn label_str(l: Label) -> &'static str {
    match l {
        Label::Positive => "+1",
        Label::Negative => "-1",
    }
}

fn parse_label(tok: &str, line: usize) -> Result<Label> {
    match tok {
        "+1" | "1" => Ok(Label::Positive),
        "-1" => Ok(Label::Negative),
        _ => Err(Error::parse(line, format!("label `{tok}` is not +1 or -1"))),
    }
}

fn num<T: std::str::FromStr>(tok: Option<&str>, what: &str, line: usize) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| Error::parse(line, format!("malformed {what} `{tok}`")))
}

fn finite(x: f64, what: &str, line: usize) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::parse(line, format!("{what} must be finite")))
    }
}

fn slot<T>(slots: &mut [Option<T>], idx: usize, value: T, what: &str, line: usize) -> Result<()> {
    match slots.get_mut(idx) {
        None => Err(Error::parse(line, format!("{what} {idx} out of range"))),
        Some(Some(_)) => Err(Error::parse(line, format!("duplicate {what} {idx}"))),
        Some(s) => {
            *s = Some(value);
            Ok(())
        }
    }
}

fn content(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut dims: Option<(usize, usize)> = None;
    let mut tasks: Vec<Option<(f64, Label)>> = Vec::new();
    let mut requesters: Vec<Option<(f64, f64)>> = Vec::new();
    let mut workers: Vec<Option<(f64, f64, Vec<usize>)>> = Vec::new();
    let mut theta: Vec<Option<Vec<f64>>> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let body = content(raw);
        if body.is_empty() {
            continue;
        }
        let mut toks = body.split_whitespace();
        let kind = toks.next().expect("non-empty line");
        if kind == "instance" {
            if dims.is_some() {
                return Err(Error::parse(line, "duplicate `instance` header"));
            }
            let n: usize = num(toks.next(), "worker count", line)?;
            let m: usize = num(toks.next(), "task count", line)?;
            dims = Some((n, m));
            tasks = vec![None; m];
            requesters = vec![None; m];
            workers = vec![None; n];
            theta = vec![None; n];
        } else {
            let Some((_, m)) = dims else {
                return Err(Error::parse(line, "expected `instance <N> <M>` first"));
            };
            match kind {
                "task" => {
                    let j: usize = num(toks.next(), "task id", line)?;
                    let beta: f64 = num(toks.next(), "beta", line)?;
                    if !(beta > 0.0 && beta < 1.0) {
                        return Err(Error::parse(line, format!("beta {beta} of task {j} outside (0, 1)")));
                    }
                    let label = parse_label(toks.next().unwrap_or(""), line)?;
                    slot(&mut tasks, j, (beta, label), "task", line)?;
                }
                "requester" => {
                    let j: usize = num(toks.next(), "requester id", line)?;
                    let v = finite(num(toks.next(), "value", line)?, "value", line)?;
                    let b = finite(num(toks.next(), "bid", line)?, "bid", line)?;
                    if v < 0.0 || b < 0.0 {
                        return Err(Error::parse(line, "values and bids must be non-negative"));
                    }
                    slot(&mut requesters, j, (v, b), "requester", line)?;
                }
                "worker" => {
                    let i: usize = num(toks.next(), "worker id", line)?;
                    let c = finite(num(toks.next(), "cost", line)?, "cost", line)?;
                    let b = finite(num(toks.next(), "bid", line)?, "bid", line)?;
                    if c < 0.0 || b < 0.0 {
                        return Err(Error::parse(line, "costs and bids must be non-negative"));
                    }
                    if toks.next() != Some(":") {
                        return Err(Error::parse(line, "expected `:` before the interested tasks"));
                    }
                    let mut interested = Vec::new();
                    for t in toks.by_ref() {
                        let j: usize = num(Some(t), "task id", line)?;
                        if j >= m {
                            return Err(Error::parse(line, format!("worker {i} names unknown task {j}")));
                        }
                        interested.push(j);
                    }
                    if interested.is_empty() {
                        return Err(Error::parse(line, format!("worker {i} has no interested tasks")));
                    }
                    slot(&mut workers, i, (c, b, interested), "worker", line)?;
                }
                "theta" => {
                    let i: usize = num(toks.next(), "worker id", line)?;
                    let row: Vec<f64> = toks
                        .by_ref()
                        .map(|t| num(Some(t), "reliability", line))
                        .collect::<Result<_>>()?;
                    if row.len() != m {
                        return Err(Error::parse(line, format!("theta row {i} has {} entries, expected {m}", row.len())));
                    }
                    if let Some(col) = row.iter().position(|t| !(0.0..=1.0).contains(t)) {
                        return Err(Error::parse(
                            line,
                            format!("theta row {i} column {col} = {} outside [0, 1]", row[col]),
                        ));
                    }
                    slot(&mut theta, i, row, "theta row", line)?;
                }
                other => return Err(Error::parse(line, format!("unknown record `{other}`"))),
            }
            if let Some(extra) = toks.next() {
                return Err(Error::parse(line, format!("unexpected trailing `{extra}`")));
            }
        }
    }
    let Some((n, m)) = dims else {
        return Err(Error::parse(0, "missing `instance <N> <M>` header"));
    };
    let missing = |what: &str, idx: usize| Error::input(format!("{what} {idx} is not defined"));
    let mut t = Vec::with_capacity(m);
    let mut r = Vec::with_capacity(m);
    let mut betas = Vec::with_capacity(m);
    for j in 0..m {
        let (beta, label) = tasks[j].ok_or_else(|| missing("task", j))?;
        let (value, bid) = requesters[j].ok_or_else(|| missing("requester", j))?;
        betas.push(beta);
        t.push(Task {
            id: j,
            true_label: label,
            accuracy_target: beta,
        });
        r.push(Requester { id: j, task: j, value, bid });
    }
    let mut w = Vec::with_capacity(n);
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let (cost, bid, interested) = workers[i].take().ok_or_else(|| missing("worker", i))?;
        rows.push(theta[i].take().ok_or_else(|| missing("theta row", i))?);
        w.push(Worker {
            id: i,
            interested,
            cost,
            bid,
        });
    }
    let rel = ReliabilityMatrix::new(rows, &betas)?;
    Instance::new(t, r, w, rel)
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_instance(&text)
}

pub fn write_instance(instance: &Instance) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "instance {} {}", instance.n_workers(), instance.n_tasks());
    for t in instance.tasks() {
        let _ = writeln!(s, "task {} {} {}", t.id, t.accuracy_target, label_str(t.true_label));
    }
    for r in instance.requesters() {
        let _ = writeln!(s, "requester {} {} {}", r.id, r.value, r.bid);
    }
    for w in instance.workers() {
        let _ = write!(s, "worker {} {} {} :", w.id, w.cost, w.bid);
        for j in &w.interested {
            let _ = write!(s, " {j}");
        }
        s.push('\n');
    }
    for i in 0..instance.n_workers() {
        let _ = write!(s, "theta {i}");
        for t in instance.reliability().theta_row(i) {
            let _ = write!(s, " {t}");
        }
        s.push('\n');
    }
    s
}

/// Reported labels for aggregation.
///
/// ```text
/// winners <i> <i> ...
/// tasks <j> <j> ...
/// label <i> <j> <+1|-1>
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct LabelFile {
    pub winning_workers: Vec<usize>,
    pub executed_tasks: Vec<usize>,
    pub labels: LabelMatrix,
}

pub fn parse_labels(text: &str, instance: &Instance) -> Result<LabelFile> {
    let (n, m) = (instance.n_workers(), instance.n_tasks());
    let mut winners = None;
    let mut tasks = None;
    let mut labels = LabelMatrix::new(n, m);
    let ids = |toks: std::str::SplitWhitespace, bound: usize, what: &str, line: usize| -> Result<Vec<usize>> {
        let mut v: Vec<usize> = toks.map(|t| num(Some(t), what, line)).collect::<Result<_>>()?;
        if let Some(bad) = v.iter().find(|&&x| x >= bound) {
            return Err(Error::parse(line, format!("{what} {bad} out of range")));
        }
        v.sort_unstable();
        v.dedup();
        Ok(v)
    };
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let body = content(raw);
        if body.is_empty() {
            continue;
        }
        let mut toks = body.split_whitespace();
        match toks.next().expect("non-empty line") {
            "winners" => winners = Some(ids(toks, n, "worker", line)?),
            "tasks" => tasks = Some(ids(toks, m, "task", line)?),
            "label" => {
                let i: usize = num(toks.next(), "worker id", line)?;
                let j: usize = num(toks.next(), "task id", line)?;
                if i >= n || j >= m {
                    return Err(Error::parse(line, format!("label ({i}, {j}) out of range")));
                }
                if !instance.workers()[i].is_interested_in(j) {
                    return Err(Error::parse(line, format!("worker {i} is not interested in task {j}")));
                }
                labels.set(i, j, Some(parse_label(toks.next().unwrap_or(""), line)?));
            }
            other => return Err(Error::parse(line, format!("unknown record `{other}`"))),
        }
    }
    let winning_workers = winners.ok_or_else(|| Error::input("label file has no `winners` line"))?;
    let executed_tasks = tasks.ok_or_else(|| Error::input("label file has no `tasks` line"))?;
    labels.check_consistent(instance.workers(), &winning_workers)?;
    Ok(LabelFile {
        winning_workers,
        executed_tasks,
        labels,
    })
}

pub fn write_labels(file: &LabelFile) -> String {
    let mut s = String::from("winners");
    for i in &file.winning_workers {
        let _ = write!(s, " {i}");
    }
    s.push_str("\ntasks");
    for j in &file.executed_tasks {
        let _ = write!(s, " {j}");
    }
    s.push('\n');
    for i in 0..file.labels.workers() {
        for j in 0..file.labels.tasks() {
            if let Some(l) = file.labels.get(i, j) {
                let _ = writeln!(s, "label {i} {j} {}", label_str(l));
            }
        }
    }
    s
}

/// `{:.9e}`: ten significant digits.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.9e}")
    }
}

pub const CSV_HEADER: &str = "setting,axis,axis_value,metric,subject,mean,std,count";

/// Writes `# key=value` metadata lines, the header and one line per row.
pub fn write_summary_csv<W: Write>(mut out: W, metadata: &[(&str, String)], rows: &[SummaryRow]) -> Result<()> {
    for (k, v) in metadata {
        writeln!(out, "# {k}={v}")?;
    }
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.setting,
            r.axis,
            r.axis_value,
            r.metric,
            r.subject,
            format_float(r.mean),
            format_float(r.std),
            r.count
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn emit_csv(path: &Path, metadata: &[(&str, String)], rows: &[SummaryRow]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_summary_csv(std::io::BufWriter::new(file), metadata, rows)
}

/// Human-readable auction result.
pub fn format_outcome(outcome: &AuctionOutcome, welfare: f64) -> String {
    let list = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let mut s = String::new();
    let _ = writeln!(s, "winning_requesters {}", list(&outcome.winning_requesters));
    let _ = writeln!(s, "winning_workers {}", list(&outcome.winning_workers));
    for &j in &outcome.winning_requesters {
        let _ = writeln!(s, "requester_payment {j} {}", outcome.requester_payments[j]);
    }
    for &i in &outcome.winning_workers {
        let _ = writeln!(s, "worker_payment {i} {}", outcome.worker_payments[i]);
    }
    let _ = writeln!(s, "welfare {welfare}");
    s
}

pub fn format_aggregate(result: &AggregatedResult) -> String {
    let mut s = String::new();
    for (j, l) in result.labels.iter().enumerate() {
        if let Some(l) = l {
            let _ = write!(s, "task {j} {}", label_str(*l));
            if let Some(b) = result.bounds[j] {
                let _ = write!(s, " bound {}", format_float(b));
            }
            s.push('\n');
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures;

    const SAMPLE: &str = "\
instance 2 2
task 0 0.9 +1
task 1 0.25 -1
requester 0 10 10
requester 1 8.5 7
worker 0 3 3 : 0 1
worker 1 2.25 4 : 1
theta 0 1 0.5
theta 1 0.5 0.875
";

    #[test]
    fn canonical_round_trip() {
        let inst = parse_instance(SAMPLE).unwrap();
        assert_eq!(write_instance(&inst), SAMPLE);
        let again = parse_instance(&write_instance(&fixtures::single(10.0, 6.0))).unwrap();
        assert_eq!(again, fixtures::single(10.0, 6.0));
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = format!("# hello\n\n{}", SAMPLE.replace("task 0 0.9 +1", "task 0 0.9 +1  # gold"));
        assert_eq!(parse_instance(&text).unwrap(), parse_instance(SAMPLE).unwrap());
    }

    #[test]
    fn theta_out_of_range_names_row_and_column() {
        let bad = SAMPLE.replace("theta 1 0.5 0.875", "theta 1 0.5 1.5");
        match parse_instance(&bad).unwrap_err() {
            Error::Parse { line, message } => {
                assert_eq!(line, 9);
                assert!(message.contains("row 1 column 1"), "{message}");
            }
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn rejects_invalid_records() {
        for (from, to) in [
            ("task 1 0.25 -1", "task 1 1.0 -1"),
            ("worker 1 2.25 4 : 1", "worker 1 2.25 4 : 2"),
            ("worker 1 2.25 4 : 1", "worker 1 2.25 4 1"),
            ("requester 1 8.5 7", "requester 1 x 7"),
            ("requester 1 8.5 7", "requester 0 8.5 7"),
            ("theta 0 1 0.5", "theta 0 1"),
        ] {
            let err = parse_instance(&SAMPLE.replace(from, to)).unwrap_err();
            assert!(matches!(err, Error::Parse { .. }), "{to}: {err:?}");
        }
        assert!(parse_instance(&SAMPLE.replace("requester 1 8.5 7\n", "")).is_err());
        assert!(parse_instance("task 0 0.5 +1").is_err());
    }

    #[test]
    fn labels_round_trip() {
        let inst = parse_instance(SAMPLE).unwrap();
        let text = "winners 0 1\ntasks 1\nlabel 0 0 +1\nlabel 0 1 -1\nlabel 1 1 -1\n";
        let file = parse_labels(text, &inst).unwrap();
        assert_eq!(write_labels(&file), text);
        assert!(parse_labels("winners 0\ntasks 1\nlabel 1 0 +1\n", &inst).is_err());
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_summary_csv(&mut buf, &[("seed", "7".into())], &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("# seed=7\n{CSV_HEADER}\n"));
        assert_eq!(format_float(0.1), "1.000000000e-1");
        assert_eq!(format_float(1234.5), "1.234500000e3");
        assert_eq!(format_float(f64::NAN), "nan");
    }
}
