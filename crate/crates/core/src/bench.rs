//! Running several algorithms over a set of instances and writing the
//! comparison as CSV.

use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use num_traits::Zero;

use crate::bounds::{list_scheduling_baseline, opt_bounds};
use crate::eptas::{self, SolveConfig};
use crate::error::{Error, Result};
use crate::model::{Instance, Schedule};
use crate::oracle::{exact_small, OracleLimits};
use crate::rational::{self, Rat};
use crate::validate::validate;

#[derive(Debug, Clone)]
pub enum Algo {
    Eptas(SolveConfig),
    Baseline,
    Oracle(OracleLimits),
}

impl Algo {
    pub fn name(&self) -> &'static str {
        match self {
            Algo::Eptas(_) => "eptas",
            Algo::Baseline => "baseline",
            Algo::Oracle(_) => "oracle",
        }
    }

    pub fn run(&self, instance: &Instance) -> Result<Schedule> {
        match self {
            Algo::Eptas(cfg) => eptas::solve(instance, cfg).map(|(s, _)| s),
            Algo::Baseline => Ok(list_scheduling_baseline(instance)),
            Algo::Oracle(limits) => exact_small(instance, *limits).map(|r| r.witness),
        }
    }
}

/// Algorithm names accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgoName {
    Eptas,
    Baseline,
    Oracle,
}

impl FromStr for AlgoName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "eptas" => Ok(AlgoName::Eptas),
            "baseline" => Ok(AlgoName::Baseline),
            "oracle" => Ok(AlgoName::Oracle),
            other => Err(format!("unknown algorithm {other:?}")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AlgoOutcome {
    pub makespan: Option<Rat>,
    /// Error message, or the first validation failure.
    pub error: Option<String>,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub name: String,
    pub m: usize,
    pub k: usize,
    pub n: usize,
    pub lower_bound: Rat,
    pub upper_bound: Rat,
    pub oracle_opt: Option<Rat>,
    /// One entry per algorithm, in the order they were requested.
    pub results: Vec<(&'static str, AlgoOutcome)>,
}

impl BenchRow {
    /// `makespan / opt`, when both are known and opt is positive.
    pub fn ratio(&self, outcome: &AlgoOutcome) -> Option<Rat> {
        let opt = self.oracle_opt.as_ref()?;
        let ms = outcome.makespan.as_ref()?;
        if opt.is_zero() {
            return ms.is_zero().then(rational::one);
        }
        Some(ms / opt)
    }
}

pub fn bench_instance(name: &str, instance: &Instance, algos: &[Algo]) -> BenchRow {
    let (lower_bound, upper_bound) = opt_bounds(instance);
    let mut results = Vec::with_capacity(algos.len());
    let mut oracle_opt = None;
    for algo in algos {
        let t = Instant::now();
        let outcome = match algo.run(instance) {
            Ok(s) => {
                let violations = validate(instance, &s, true);
                AlgoOutcome {
                    makespan: Some(s.makespan()),
                    error: violations.first().map(|v| format!("invalid schedule: {v}")),
                    seconds: t.elapsed().as_secs_f64(),
                }
            }
            Err(e) => AlgoOutcome {
                makespan: None,
                error: Some(e.to_string()),
                seconds: t.elapsed().as_secs_f64(),
            },
        };
        if matches!(algo, Algo::Oracle(_)) && outcome.error.is_none() {
            oracle_opt = outcome.makespan.clone();
        }
        results.push((algo.name(), outcome));
    }
    BenchRow {
        name: name.to_string(),
        m: instance.m(),
        k: instance.k(),
        n: instance.n(),
        lower_bound,
        upper_bound,
        oracle_opt,
        results,
    }
}

fn opt_cell(v: &Option<Rat>) -> (String, String) {
    match v {
        Some(r) => (rational::render(r), rational::decimal(r)),
        None => (String::new(), String::new()),
    }
}

/// Writes the header and one row per entry of `rows`, sorted by name. With
/// `timing`, wall times and a trailing timestamp column are included; without
/// it the output depends only on the inputs.
pub fn write_csv<W: Write>(rows: &[BenchRow], algos: &[&str], timing: bool, timestamp: &str, out: W) -> Result<()> {
    let mut sorted: Vec<&BenchRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.name.cmp(&b.name));

    let mut header: Vec<String> = [
        "instance",
        "m",
        "k",
        "n",
        "lower_bound",
        "lower_bound_decimal",
        "upper_bound",
        "upper_bound_decimal",
        "oracle_opt",
        "oracle_opt_decimal",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for a in algos {
        for col in ["makespan", "makespan_decimal", "ratio", "ratio_decimal", "status"] {
            header.push(format!("{a}_{col}"));
        }
        if timing {
            header.push(format!("{a}_seconds"));
        }
    }
    if timing {
        header.push("timestamp".into());
    }

    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Internal(format!("writing CSV: {e}"));
    w.write_record(&header).map_err(csv_err)?;
    for row in sorted {
        let (lb, lbd) = (rational::render(&row.lower_bound), rational::decimal(&row.lower_bound));
        let (ub, ubd) = (rational::render(&row.upper_bound), rational::decimal(&row.upper_bound));
        let (opt, optd) = opt_cell(&row.oracle_opt);
        let mut rec = vec![
            row.name.clone(),
            row.m.to_string(),
            row.k.to_string(),
            row.n.to_string(),
            lb,
            lbd,
            ub,
            ubd,
            opt,
            optd,
        ];
        for a in algos {
            match row.results.iter().find(|(name, _)| name == a) {
                Some((_, o)) => {
                    let (ms, msd) = opt_cell(&o.makespan);
                    let (r, rd) = opt_cell(&row.ratio(o));
                    let status = o.error.clone().unwrap_or_else(|| "ok".into());
                    rec.extend([ms, msd, r, rd, status]);
                    if timing {
                        rec.push(format!("{:.6}", o.seconds));
                    }
                }
                None => rec.extend(std::iter::repeat_n(String::new(), if timing { 6 } else { 5 })),
            }
        }
        if timing {
            rec.push(timestamp.to_string());
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Internal(format!("writing CSV: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn rows_sorted_and_ratios_present() {
        let inst = Instance::from_ints(2, 2, &[&[2, 2]; 4]).unwrap();
        let algos = [Algo::Baseline, Algo::Oracle(OracleLimits::default())];
        let rows = vec![
            bench_instance("b", &inst, &algos),
            bench_instance("a", &inst, &algos),
        ];
        assert_eq!(rows[0].oracle_opt, Some(rational::int(4)));
        let mut buf = Vec::new();
        write_csv(&rows, &["baseline", "oracle"], false, "", &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("a,") && lines[2].starts_with("b,"));
        assert!(lines[1].contains(",4,4.00000,1,1.00000,ok"));
        assert!(!lines[0].contains("timestamp"));
    }

    #[test]
    fn eptas_row() {
        let inst = Instance::from_ints(2, 2, &[&[1, 1]; 2]).unwrap();
        let row = bench_instance("x", &inst, &[Algo::Eptas(SolveConfig::desk(frac(1, 4)))]);
        assert!(row.results[0].1.error.is_none());
        assert!(row.ratio(&row.results[0].1).is_none());
    }

    #[test]
    fn names_parse() {
        assert_eq!("oracle".parse::<AlgoName>(), Ok(AlgoName::Oracle));
        assert!("greedy".parse::<AlgoName>().is_err());
    }
}
