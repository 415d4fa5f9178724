//! Makespan bounds, the list-scheduling baseline, and normalization.
//!
//! For `m` shops and total work `P` with largest job total `Pmax`:
//! `max{P/(mk), Pmax} <= OPT <= P/m + Pmax`. Dividing every time by
//! `2 max{P/m, Pmax}` puts the optimum in `[1/(2k), 1]`.

use num_traits::Zero;

use crate::model::{loads, Instance, Schedule, ScheduledOp};
use crate::rational::{self, Rat};

/// `(lower, upper)` bounds on the optimal makespan; `(0, 0)` for an empty instance.
pub fn opt_bounds(instance: &Instance) -> (Rat, Rat) {
    let l = loads(instance);
    if instance.n() == 0 {
        return (Rat::zero(), Rat::zero());
    }
    let m = rational::int(instance.m() as i64);
    let mk = rational::int((instance.m() * instance.k()) as i64);
    let lb = rational::max(&(&l.total / &mk), &l.max_job).clone();
    let ub = &l.total / &m + &l.max_job;
    (lb, ub)
}

/// Jobs in id order, each run as one block (stages `0..k` back to back) on
/// the shop that frees up first; ties go to the lowest shop index.
pub fn list_scheduling_baseline(instance: &Instance) -> Schedule {
    let mut free = vec![Rat::zero(); instance.m()];
    let mut schedule = Schedule::default();
    for job in instance.jobs() {
        let shop = (0..free.len())
            .min_by(|&a, &b| free[a].cmp(&free[b]).then(a.cmp(&b)))
            .expect("at least one shop");
        let mut t = free[shop].clone();
        for (stage, p) in job.times.iter().enumerate() {
            schedule.push(ScheduledOp {
                job: job.id,
                stage,
                shop,
                start: t.clone(),
                duration: p.clone(),
            });
            t += p;
        }
        free[shop] = t;
    }
    schedule
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedInstance {
    pub scaled: Instance,
    /// Divisor applied to every time; 1 for an all-zero instance.
    pub factor: Rat,
    /// Set when the instance had no positive time and was left unscaled.
    pub degenerate: bool,
}

pub fn normalization_factor(instance: &Instance) -> Rat {
    let l = loads(instance);
    let m = rational::int(instance.m() as i64);
    rational::int(2) * rational::max(&(&l.total / &m), &l.max_job)
}

pub fn normalize(instance: &Instance) -> NormalizedInstance {
    let factor = normalization_factor(instance);
    if factor.is_zero() {
        return NormalizedInstance {
            scaled: instance.clone(),
            factor: rational::one(),
            degenerate: true,
        };
    }
    NormalizedInstance {
        scaled: instance.map_times(|_, _, t| t / &factor),
        factor,
        degenerate: false,
    }
}

/// Maps a schedule of the scaled instance back to original time units.
pub fn denormalize(schedule: &Schedule, factor: &Rat) -> Schedule {
    schedule.scaled(factor)
}
