//! Plain-text instance and schedule files.
//!
//! Instance: a header line `m k n`, then `n` rows of `k` times.
//! Schedule: a header line `makespan <t>`, then one `job shop stage start duration`
//! row per operation. Rationals are written `a/b`, integers plainly.

use std::fmt::Write as _;

use crate::error::ParseError;
use crate::model::{Instance, Schedule, ScheduledOp};
use crate::rational::{self, Rat};

/// Lines that carry content, numbered from 1. Trailing blank lines are ignored.
fn content_lines(text: &str) -> Vec<(usize, &str)> {
    let mut lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .collect();
    while matches!(lines.last(), Some((_, l)) if l.is_empty()) {
        lines.pop();
    }
    lines
}

fn parse_count(line: usize, field: &str, name: &str) -> Result<usize, ParseError> {
    field
        .parse::<usize>()
        .map_err(|_| ParseError::new(line, format!("{name}: expected a nonnegative integer, found {field:?}")))
}

fn parse_time(line: usize, field: &str, name: &str) -> Result<Rat, ParseError> {
    let value = rational::parse(field)
        .ok_or_else(|| ParseError::new(line, format!("{name}: malformed rational {field:?}")))?;
    if !rational::is_nonnegative(&value) {
        return Err(ParseError::new(line, format!("{name}: negative value {field}")));
    }
    Ok(value)
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let lines = content_lines(text);
    let Some(&(hline, header)) = lines.first() else {
        return Err(ParseError::new(1, "missing header \"m k n\""));
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(ParseError::new(
            hline,
            format!("header must be \"m k n\", found {} fields", fields.len()),
        ));
    }
    let m = parse_count(hline, fields[0], "m")?;
    let k = parse_count(hline, fields[1], "k")?;
    let n = parse_count(hline, fields[2], "n")?;
    if m == 0 || k == 0 {
        return Err(ParseError::new(hline, "m and k must be positive"));
    }
    let rows = &lines[1..];
    if rows.len() != n {
        let line = rows.last().map_or(hline, |r| r.0);
        return Err(ParseError::new(
            line,
            format!("expected {n} job rows, found {}", rows.len()),
        ));
    }
    let mut jobs = Vec::with_capacity(n);
    for &(line, row) in rows {
        let fields: Vec<&str> = row.split_whitespace().collect();
        if fields.len() != k {
            return Err(ParseError::new(
                line,
                format!("expected {k} times, found {}", fields.len()),
            ));
        }
        let times = fields
            .iter()
            .map(|f| parse_time(line, f, "time"))
            .collect::<Result<Vec<_>, _>>()?;
        jobs.push(times);
    }
    Instance::new(m, k, jobs).map_err(|e| ParseError::new(hline, e.to_string()))
}

pub fn serialize_instance(instance: &Instance) -> String {
    let mut out = format!("{} {} {}\n", instance.m(), instance.k(), instance.n());
    for job in instance.jobs() {
        let row: Vec<String> = job.times.iter().map(rational::render).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_schedule(text: &str) -> Result<Schedule, ParseError> {
    let lines = content_lines(text);
    let Some(&(hline, header)) = lines.first() else {
        return Err(ParseError::new(1, "missing header \"makespan <t>\""));
    };
    let declared = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["makespan", t] => parse_time(hline, t, "makespan")?,
        _ => return Err(ParseError::new(hline, "header must be \"makespan <t>\"")),
    };
    let mut ops = Vec::with_capacity(lines.len() - 1);
    for &(line, row) in &lines[1..] {
        let fields: Vec<&str> = row.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(ParseError::new(
                line,
                format!(
                    "expected \"job shop stage start duration\", found {} fields",
                    fields.len()
                ),
            ));
        }
        ops.push(ScheduledOp {
            job: parse_count(line, fields[0], "job")?,
            shop: parse_count(line, fields[1], "shop")?,
            stage: parse_count(line, fields[2], "stage")?,
            start: parse_time(line, fields[3], "start")?,
            duration: parse_time(line, fields[4], "duration")?,
        });
    }
    let schedule = Schedule::new(ops);
    let actual = schedule.makespan();
    if actual != declared {
        return Err(ParseError::new(
            hline,
            format!("declared makespan {declared} but operations end at {actual}"),
        ));
    }
    Ok(schedule)
}

pub fn serialize_schedule(schedule: &Schedule) -> String {
    let mut out = format!("makespan {}\n", rational::render(&schedule.makespan()));
    for op in &schedule.ops {
        let _ = writeln!(
            out,
            "{} {} {} {} {}",
            op.job,
            op.shop,
            op.stage,
            rational::render(&op.start),
            rational::render(&op.duration)
        );
    }
    out
}
