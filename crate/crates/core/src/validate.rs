//! Schedule feasibility checks.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::model::{Instance, Schedule, ScheduledOp};
use crate::rational::Rat;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UnknownJob { op: usize, job: usize },
    StageOutOfRange { op: usize, stage: usize },
    ShopOutOfRange { op: usize, shop: usize },
    NegativeTime { op: usize },
    DurationMismatch { job: usize, stage: usize, expected: Rat, found: Rat },
    /// (a) the same operation is scheduled twice.
    Duplicate { job: usize, stage: usize },
    /// (b) a job's operations span more than one shop.
    SplitJob { job: usize, shops: (usize, usize) },
    /// (c) two operations overlap on one machine.
    MachineOverlap { shop: usize, stage: usize, jobs: (usize, usize) },
    /// (d) two operations of one job overlap in time.
    JobOverlap { job: usize, stages: (usize, usize) },
    Missing { job: usize, stage: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownJob { op, job } => write!(f, "op #{op}: unknown job {job}"),
            Violation::StageOutOfRange { op, stage } => {
                write!(f, "op #{op}: stage {stage} out of range")
            }
            Violation::ShopOutOfRange { op, shop } => {
                write!(f, "op #{op}: shop {shop} out of range")
            }
            Violation::NegativeTime { op } => write!(f, "op #{op}: negative start or duration"),
            Violation::DurationMismatch {
                job,
                stage,
                expected,
                found,
            } => write!(
                f,
                "operation (job {job}, stage {stage}): duration {found}, expected {expected}"
            ),
            Violation::Duplicate { job, stage } => {
                write!(f, "operation (job {job}, stage {stage}) scheduled more than once")
            }
            Violation::SplitJob { job, shops } => {
                write!(f, "job {job} runs on shops {} and {}", shops.0, shops.1)
            }
            Violation::MachineOverlap { shop, stage, jobs } => write!(
                f,
                "machine (shop {shop}, stage {stage}): jobs {} and {} overlap",
                jobs.0, jobs.1
            ),
            Violation::JobOverlap { job, stages } => write!(
                f,
                "job {job}: stages {} and {} overlap",
                stages.0, stages.1
            ),
            Violation::Missing { job, stage } => {
                write!(f, "operation (job {job}, stage {stage}) is not scheduled")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DurationCheck {
    /// Durations must equal the instance's processing times.
    Exact,
    /// Durations are taken as given (intermediate pipelines with rounded or zeroed times).
    Ignore,
}

/// Checks the schedule invariants. With `require_complete`, every operation
/// with positive processing time must appear.
pub fn validate(instance: &Instance, schedule: &Schedule, require_complete: bool) -> Vec<Violation> {
    validate_with(instance, schedule, require_complete, DurationCheck::Exact)
}

pub fn validate_with(
    instance: &Instance,
    schedule: &Schedule,
    require_complete: bool,
    durations: DurationCheck,
) -> Vec<Violation> {
    let mut violations = Vec::new();
    let mut usable: Vec<&ScheduledOp> = Vec::with_capacity(schedule.ops.len());

    for (idx, op) in schedule.ops.iter().enumerate() {
        let mut ok = true;
        if op.job >= instance.n() {
            violations.push(Violation::UnknownJob { op: idx, job: op.job });
            ok = false;
        }
        if op.stage >= instance.k() {
            violations.push(Violation::StageOutOfRange {
                op: idx,
                stage: op.stage,
            });
            ok = false;
        }
        if op.shop >= instance.m() {
            violations.push(Violation::ShopOutOfRange {
                op: idx,
                shop: op.shop,
            });
        }
        if op.start.is_negative() || op.duration.is_negative() {
            violations.push(Violation::NegativeTime { op: idx });
        }
        if ok {
            let expected = instance.time(op.job, op.stage);
            if durations == DurationCheck::Exact && *expected != op.duration {
                violations.push(Violation::DurationMismatch {
                    job: op.job,
                    stage: op.stage,
                    expected: expected.clone(),
                    found: op.duration.clone(),
                });
            }
            usable.push(op);
        }
    }

    let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut job_shop: BTreeMap<usize, usize> = BTreeMap::new();
    let mut by_job: BTreeMap<usize, Vec<&ScheduledOp>> = BTreeMap::new();
    let mut by_machine: BTreeMap<(usize, usize), Vec<&ScheduledOp>> = BTreeMap::new();
    for op in &usable {
        let count = seen.entry((op.job, op.stage)).or_insert(0);
        *count += 1;
        if *count == 2 {
            violations.push(Violation::Duplicate {
                job: op.job,
                stage: op.stage,
            });
        }
        match job_shop.get(&op.job) {
            Some(&shop) if shop != op.shop => violations.push(Violation::SplitJob {
                job: op.job,
                shops: (shop, op.shop),
            }),
            Some(_) => {}
            None => {
                job_shop.insert(op.job, op.shop);
            }
        }
        by_job.entry(op.job).or_default().push(op);
        by_machine.entry((op.shop, op.stage)).or_default().push(op);
    }

    for (&(shop, stage), ops) in &by_machine {
        for (a, b) in overlapping_pairs(ops) {
            violations.push(Violation::MachineOverlap {
                shop,
                stage,
                jobs: (a.job, b.job),
            });
        }
    }
    for (&job, ops) in &by_job {
        for (a, b) in overlapping_pairs(ops) {
            violations.push(Violation::JobOverlap {
                job,
                stages: (a.stage, b.stage),
            });
        }
    }

    if require_complete {
        for job in instance.jobs() {
            for (stage, t) in job.times.iter().enumerate() {
                if !t.is_zero() && !seen.contains_key(&(job.id, stage)) {
                    violations.push(Violation::Missing { job: job.id, stage });
                }
            }
        }
    }
    violations
}

/// All overlapping pairs, found by a sweep over start-sorted intervals.
fn overlapping_pairs<'a>(ops: &[&'a ScheduledOp]) -> Vec<(&'a ScheduledOp, &'a ScheduledOp)> {
    let mut sorted: Vec<&ScheduledOp> = ops
        .iter()
        .copied()
        .filter(|op| op.duration.is_positive())
        .collect();
    sorted.sort_by(|a, b| a.start.cmp(&b.start));
    let mut pairs = Vec::new();
    for (i, a) in sorted.iter().enumerate() {
        let a_end = a.end();
        for b in &sorted[i + 1..] {
            if b.start >= a_end {
                break;
            }
            pairs.push((*a, *b));
        }
    }
    pairs
}

pub fn is_feasible(instance: &Instance, schedule: &Schedule, require_complete: bool) -> bool {
    validate(instance, schedule, require_complete).is_empty()
}
