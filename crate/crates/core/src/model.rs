//! Instances and schedules for `m` identical `k`-stage open shops.
//!
//! Job `i` is a `k`-tuple of processing times; operation `(i, j)` must run on
//! the stage-`j` machine of whichever shop job `i` is assigned to, and all of a
//! job's operations stay on that shop.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Job {
    pub id: usize,
    pub times: Vec<Rat>,
}

impl Job {
    pub fn total(&self) -> Rat {
        self.times.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    m: usize,
    k: usize,
    jobs: Vec<Job>,
}

impl Instance {
    /// Builds an instance from per-job time rows. Job ids are row positions.
    pub fn new(m: usize, k: usize, rows: Vec<Vec<Rat>>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInstance("m must be at least 1".into()));
        }
        if k == 0 {
            return Err(Error::InvalidInstance("k must be at least 1".into()));
        }
        let mut jobs = Vec::with_capacity(rows.len());
        for (id, times) in rows.into_iter().enumerate() {
            if times.len() != k {
                return Err(Error::InvalidInstance(format!(
                    "job {id} has {} times, expected {k}",
                    times.len()
                )));
            }
            if let Some(t) = times.iter().find(|t| t.is_negative()) {
                return Err(Error::InvalidInstance(format!(
                    "job {id} has negative time {t}"
                )));
            }
            jobs.push(Job { id, times });
        }
        Ok(Instance { m, k, jobs })
    }

    /// Convenience constructor from integer times.
    pub fn from_ints<R: AsRef<[i64]>>(m: usize, k: usize, rows: &[R]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&t| rational::int(t)).collect())
            .collect();
        Instance::new(m, k, rows)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.jobs.len()
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn job(&self, id: usize) -> &Job {
        &self.jobs[id]
    }

    pub fn time(&self, job: usize, stage: usize) -> &Rat {
        &self.jobs[job].times[stage]
    }

    /// Same shape, times replaced by `f(job, stage, time)`.
    pub fn map_times(&self, mut f: impl FnMut(usize, usize, &Rat) -> Rat) -> Instance {
        let jobs = self
            .jobs
            .iter()
            .map(|job| Job {
                id: job.id,
                times: job
                    .times
                    .iter()
                    .enumerate()
                    .map(|(j, t)| f(job.id, j, t))
                    .collect(),
            })
            .collect();
        Instance {
            m: self.m,
            k: self.k,
            jobs,
        }
    }

    /// Sub-instance with the given jobs, re-indexed from zero in the given order.
    pub fn restrict(&self, m: usize, ids: &[usize]) -> Instance {
        let jobs = ids
            .iter()
            .enumerate()
            .map(|(new_id, &id)| Job {
                id: new_id,
                times: self.jobs[id].times.clone(),
            })
            .collect();
        Instance {
            m,
            k: self.k,
            jobs,
        }
    }
}

/// Total work `P`, per-job totals `P_i`, and `max_i P_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Loads {
    pub total: Rat,
    pub per_job: Vec<Rat>,
    pub max_job: Rat,
}

pub fn loads(instance: &Instance) -> Loads {
    let per_job: Vec<Rat> = instance.jobs.iter().map(Job::total).collect();
    let total = per_job.iter().sum();
    let max_job = per_job.iter().max().cloned().unwrap_or_else(Rat::zero);
    Loads {
        total,
        per_job,
        max_job,
    }
}

/// One operation placed on machine `(shop, stage)` over `[start, start + duration)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduledOp {
    pub job: usize,
    pub stage: usize,
    pub shop: usize,
    pub start: Rat,
    pub duration: Rat,
}

impl ScheduledOp {
    pub fn end(&self) -> Rat {
        &self.start + &self.duration
    }

    /// Half-open overlap test; zero-length intervals overlap nothing.
    pub fn overlaps(&self, other: &ScheduledOp) -> bool {
        intervals_overlap(&self.start, &self.end(), &other.start, &other.end())
    }
}

pub fn intervals_overlap(a_start: &Rat, a_end: &Rat, b_start: &Rat, b_end: &Rat) -> bool {
    a_start < a_end && b_start < b_end && a_start < b_end && b_start < a_end
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schedule {
    pub ops: Vec<ScheduledOp>,
}

impl Schedule {
    pub fn new(ops: Vec<ScheduledOp>) -> Self {
        Schedule { ops }
    }

    pub fn makespan(&self) -> Rat {
        makespan(self)
    }

    pub fn push(&mut self, op: ScheduledOp) {
        self.ops.push(op);
    }

    /// Completion time of `shop` (latest end over its machines, 0 if idle).
    pub fn shop_completion(&self, shop: usize) -> Rat {
        self.ops
            .iter()
            .filter(|op| op.shop == shop)
            .map(ScheduledOp::end)
            .max()
            .unwrap_or_else(Rat::zero)
    }

    /// Shop on which each job's first listed operation runs.
    pub fn job_shops(&self, n: usize) -> Vec<Option<usize>> {
        let mut shops = vec![None; n];
        for op in &self.ops {
            if op.job < n && shops[op.job].is_none() {
                shops[op.job] = Some(op.shop);
            }
        }
        shops
    }

    /// Sorted by (shop, stage, start, job) for stable output.
    pub fn canonicalize(&mut self) {
        self.ops.sort_by(|a, b| {
            (a.shop, a.stage, &a.start, a.job).cmp(&(b.shop, b.stage, &b.start, b.job))
        });
    }

    pub fn scaled(&self, factor: &Rat) -> Schedule {
        Schedule {
            ops: self
                .ops
                .iter()
                .map(|op| ScheduledOp {
                    start: &op.start * factor,
                    duration: &op.duration * factor,
                    ..op.clone()
                })
                .collect(),
        }
    }
}

pub fn makespan(schedule: &Schedule) -> Rat {
    schedule
        .ops
        .iter()
        .map(ScheduledOp::end)
        .max()
        .unwrap_or_else(Rat::zero)
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::format::serialize_schedule(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn loads_of_four_equal_jobs() {
        let inst = Instance::from_ints(2, 2, &[&[2, 2], &[2, 2], &[2, 2], &[2, 2]]).unwrap();
        let l = loads(&inst);
        assert_eq!(l.total, int(16));
        assert_eq!(l.per_job, vec![int(4); 4]);
        assert_eq!(l.max_job, int(4));
    }

    #[test]
    fn loads_of_empty_instance() {
        let inst = Instance::new(2, 2, vec![]).unwrap();
        let l = loads(&inst);
        assert_eq!(l.total, int(0));
        assert_eq!(l.max_job, int(0));
    }

    #[test]
    fn loads_of_single_job() {
        let inst = Instance::from_ints(2, 2, &[&[3, 1]]).unwrap();
        let l = loads(&inst);
        assert_eq!((l.total, l.max_job), (int(4), int(4)));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Instance::from_ints::<[i64; 2]>(0, 2, &[]).is_err());
        assert!(Instance::from_ints::<[i64; 0]>(1, 0, &[]).is_err());
        assert!(Instance::from_ints(1, 2, &[&[1]]).is_err());
        assert!(Instance::from_ints(1, 1, &[&[-1]]).is_err());
    }

    fn op(start: Rat, duration: Rat) -> ScheduledOp {
        ScheduledOp {
            job: 0,
            stage: 0,
            shop: 0,
            start,
            duration,
        }
    }

    #[test]
    fn makespan_examples() {
        let s = Schedule::new(vec![op(int(0), int(4)), op(int(2), int(3))]);
        assert_eq!(s.makespan(), int(5));
        assert_eq!(Schedule::default().makespan(), int(0));
        let s = Schedule::new(vec![op(frac(1, 8), frac(1, 4))]);
        assert_eq!(s.makespan(), frac(3, 8));
    }

    #[test]
    fn half_open_overlap() {
        assert!(!op(int(5), int(0)).overlaps(&op(int(5), int(1))));
        assert!(!op(int(0), int(1)).overlaps(&op(int(1), int(1))));
        assert!(op(int(0), int(2)).overlaps(&op(int(1), int(1))));
    }
}
