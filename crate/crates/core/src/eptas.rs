//! The full approximation pipeline: normalize, reduce, enumerate big-job
//! placements, and for each one run the LP assignment, the dense gap filler
//! and the sequential append of fractionally assigned jobs. The cheapest
//! candidate gets the removed operations appended and is mapped back to the
//! original time scale.
//!
//! Candidates are compared by makespan with ties going to the earliest
//! placement in enumeration order. The search skips placements whose big
//! operations alone already end after the best candidate so far (or after a
//! greedily seeded candidate); such placements can never win, so the result
//! equals that of visiting every placement.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use num_traits::{Signed, Zero};

use crate::assign::{self, AssignOutcome, AssignOutput};
use crate::bigjobs::{enumerate_with, AssignmentSet, AssignmentVisitor, BigJobs, Visit};
use crate::bounds::{denormalize, normalize, NormalizedInstance};
use crate::dense::{self, DenseOutput};
use crate::error::{Error, Result};
use crate::model::{Instance, Schedule, ScheduledOp};
use crate::rational::{self, Rat};
use crate::reduce::{self, ReduceOutput, RemovedOp};
use crate::validate::{validate, validate_with, DurationCheck};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Threshold chosen by the reduction from `epsilon`.
    Theoretical,
    /// Fixed threshold from `gamma_override`.
    Desk,
}

#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub epsilon: Rat,
    pub mode: Mode,
    pub gamma_override: Option<Rat>,
    pub enumeration_budget: u64,
}

pub const DEFAULT_BUDGET: u64 = 10_000_000;

impl SolveConfig {
    pub fn theoretical(epsilon: Rat) -> Self {
        SolveConfig {
            epsilon,
            mode: Mode::Theoretical,
            gamma_override: None,
            enumeration_budget: DEFAULT_BUDGET,
        }
    }

    /// Desk mode with the bisection run at `epsilon = 1/2`.
    pub fn desk(gamma: Rat) -> Self {
        SolveConfig {
            epsilon: rational::frac(1, 2),
            mode: Mode::Desk,
            gamma_override: Some(gamma),
            enumeration_budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.enumeration_budget = budget;
        self
    }

    fn check(&self) -> Result<()> {
        if !self.epsilon.is_positive() {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        match (self.mode, &self.gamma_override) {
            (Mode::Theoretical, None) => Ok(()),
            (Mode::Theoretical, Some(_)) => Err(Error::InvalidParameter(
                "gamma override is only allowed in desk mode".into(),
            )),
            (Mode::Desk, None) => Err(Error::InvalidParameter("desk mode needs a gamma".into())),
            (Mode::Desk, Some(g)) if g.is_positive() && *g < rational::one() => Ok(()),
            (Mode::Desk, Some(g)) => Err(Error::InvalidParameter(format!(
                "gamma must lie strictly between 0 and 1, got {g}"
            ))),
        }
    }

    /// The additive error handed to the reduction and the bisection:
    /// `1 / ceil(2k / epsilon)` in theoretical mode, `epsilon` itself in desk mode.
    pub fn working_epsilon(&self, k: usize) -> Rat {
        match self.mode {
            Mode::Theoretical => {
                let denom = (rational::int(2 * k as i64) / &self.epsilon).ceil();
                rational::one() / denom
            }
            Mode::Desk => self.epsilon.clone(),
        }
    }
}

/// Makespan accounting of the returned schedule, all on the normalized scale
/// unless noted.
#[derive(Debug, Clone, Default)]
pub struct SolveReport {
    /// Final makespan in original time units.
    pub makespan: Rat,
    pub scaled_makespan: Rat,
    pub factor: Rat,
    pub epsilon: Rat,
    pub working_epsilon: Rat,
    pub gamma: Rat,
    pub delta: Rat,
    pub x_found: Option<u32>,
    /// Estimate `C` of the winning placement.
    pub c: Rat,
    /// Makespan of big jobs plus integrally assigned small jobs.
    pub dense_makespan: Rat,
    /// `C + m k^3 gamma + k^2 gamma^2`.
    pub dense_bound: Rat,
    pub fractional_increase: Rat,
    /// `ceil(|S^f| / m) k gamma^2`.
    pub fractional_bound: Rat,
    pub removed_increase: Rat,
    pub l_gamma: Rat,
    /// `2 m k^2 gamma`, the combined loss of rounding and of restricting big
    /// jobs to the grid.
    pub restriction_loss: Rat,
    pub big: usize,
    pub small: usize,
    pub s_one: usize,
    pub s_fractional: usize,
    /// Candidate cells examined by the enumeration.
    pub assignments_examined: u64,
    /// Complete placements evaluated.
    pub assignments_evaluated: u64,
    pub lp_solves: u64,
    pub wall_seconds: f64,
}

impl SolveReport {
    fn fields(&self) -> Vec<(&'static str, String)> {
        let r = rational::render;
        vec![
            ("makespan", r(&self.makespan)),
            ("scaled_makespan", r(&self.scaled_makespan)),
            ("factor", r(&self.factor)),
            ("epsilon", r(&self.epsilon)),
            ("working_epsilon", r(&self.working_epsilon)),
            ("gamma", r(&self.gamma)),
            ("delta", r(&self.delta)),
            (
                "x_found",
                self.x_found.map_or_else(|| "none".to_string(), |x| x.to_string()),
            ),
            ("c", r(&self.c)),
            ("dense_makespan", r(&self.dense_makespan)),
            ("dense_bound", r(&self.dense_bound)),
            ("fractional_increase", r(&self.fractional_increase)),
            ("fractional_bound", r(&self.fractional_bound)),
            ("removed_increase", r(&self.removed_increase)),
            ("l_gamma", r(&self.l_gamma)),
            ("restriction_loss", r(&self.restriction_loss)),
            ("big", self.big.to_string()),
            ("small", self.small.to_string()),
            ("s_one", self.s_one.to_string()),
            ("s_fractional", self.s_fractional.to_string()),
            ("assignments_examined", self.assignments_examined.to_string()),
            ("assignments_evaluated", self.assignments_evaluated.to_string()),
            ("lp_solves", self.lp_solves.to_string()),
            ("wall_seconds", format!("{:.6}", self.wall_seconds)),
        ]
    }

    /// One `key = value` line per field.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.fields() {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    pub fn csv_header() -> Vec<&'static str> {
        SolveReport::default().fields().into_iter().map(|(k, _)| k).collect()
    }

    pub fn csv_record(&self) -> Vec<String> {
        self.fields().into_iter().map(|(_, v)| v).collect()
    }
}

/// Internals of the winning candidate, kept for invariant checks.
#[derive(Debug, Clone)]
pub struct Winner {
    pub set: AssignmentSet,
    pub assign: AssignOutput,
    pub dense: DenseOutput,
    /// Candidate schedule on the reduced instance, before removed operations.
    pub candidate: Schedule,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub schedule: Schedule,
    pub report: SolveReport,
    pub normalized: NormalizedInstance,
    pub reduced: Option<ReduceOutput>,
    pub big: Option<BigJobs>,
    pub winner: Option<Winner>,
}

pub fn solve(instance: &Instance, config: &SolveConfig) -> Result<(Schedule, SolveReport)> {
    let s = solve_detailed(instance, config)?;
    Ok((s.schedule, s.report))
}

struct Search<'a> {
    epsilon: &'a Rat,
    big: &'a BigJobs,
    special: &'a Instance,
    small: &'a [usize],
    /// Makespan of some evaluated candidate; anything strictly worse is cut.
    seed: Option<Rat>,
    /// No candidate can beat this.
    floor: Rat,
    best: Option<(Rat, Box<Winner>)>,
    lp_solves: u64,
    error: Option<Error>,
}

struct Candidate {
    makespan: Rat,
    winner: Winner,
}

fn evaluate(
    epsilon: &Rat,
    big: &BigJobs,
    special: &Instance,
    small: &[usize],
    set: &AssignmentSet,
    lp_solves: &mut u64,
) -> Result<Option<Candidate>> {
    let AssignOutcome::Assigned(a) = assign::assign(epsilon, big, set, special, small) else {
        return Ok(None);
    };
    *lp_solves += u64::from(a.lp_solves);
    let d = dense::dense(big, set, &a.s_one, &a.c, special)?;
    let candidate = schedule_fractional(&d.schedule, &a.s_fractional, special);
    Ok(Some(Candidate {
        makespan: candidate.makespan(),
        winner: Winner {
            set: set.clone(),
            assign: *a,
            dense: d,
            candidate,
        },
    }))
}

impl AssignmentVisitor for Search<'_> {
    fn prune(&self, partial_end: &Rat) -> bool {
        if let Some((best, _)) = &self.best {
            // Later placements lose ties.
            return partial_end >= best;
        }
        self.seed.as_ref().is_some_and(|s| partial_end > s)
    }

    fn visit(&mut self, set: &AssignmentSet) -> Result<Visit> {
        let found = evaluate(self.epsilon, self.big, self.special, self.small, set, &mut self.lp_solves);
        let found = match found {
            Ok(f) => f,
            Err(e) => {
                self.error = Some(e);
                return Ok(Visit::Stop);
            }
        };
        if let Some(c) = found {
            if self.best.as_ref().is_none_or(|(b, _)| c.makespan < *b) {
                log::debug!("eptas: new best {} at {:?}", c.makespan, set.assignments);
                let done = c.makespan <= self.floor;
                self.best = Some((c.makespan, Box::new(c.winner)));
                if done {
                    return Ok(Visit::Stop);
                }
            }
        }
        Ok(Visit::Continue)
    }
}

/// A lower bound on the makespan of any schedule of `instance`.
fn trivial_lower_bound(instance: &Instance) -> Rat {
    let mut lb = Rat::zero();
    for job in instance.jobs() {
        lb = rational::max(&lb, &job.total()).clone();
    }
    let m = rational::int(instance.m() as i64);
    for stage in 0..instance.k() {
        let load: Rat = instance.jobs().iter().map(|j| &j.times[stage]).sum();
        lb = rational::max(&lb, &(load / &m)).clone();
    }
    lb
}

pub fn solve_detailed(instance: &Instance, config: &SolveConfig) -> Result<Solution> {
    let started = Instant::now();
    config.check()?;
    let (m, k) = (instance.m(), instance.k());
    let normalized = normalize(instance);
    let scaled = &normalized.scaled;
    let working_epsilon = config.working_epsilon(k);

    let mut report = SolveReport {
        factor: normalized.factor.clone(),
        epsilon: config.epsilon.clone(),
        working_epsilon: working_epsilon.clone(),
        ..SolveReport::default()
    };
    if instance.n() == 0 {
        report.wall_seconds = started.elapsed().as_secs_f64();
        return Ok(Solution {
            schedule: Schedule::default(),
            report,
            normalized,
            reduced: None,
            big: None,
            winner: None,
        });
    }

    let reduced = match (&config.mode, &config.gamma_override) {
        (Mode::Desk, Some(gamma)) => {
            reduce::reduce_with_gamma(scaled, gamma, reduce::delta_for(&working_epsilon, m, k))
        }
        _ => reduce::reduce(scaled, &working_epsilon)?,
    };
    let special = &reduced.special;
    let big = BigJobs::new(special, &reduced.big_ids, &reduced.gamma);
    log::debug!(
        "eptas: gamma = {}, {} big / {} small jobs, {} removed ops",
        reduced.gamma,
        reduced.big_ids.len(),
        reduced.small_ids.len(),
        reduced.removed_ops.len()
    );

    let mut lp_solves = 0;
    let seed = match big.greedy_assignment() {
        Some(set) => evaluate(
            &working_epsilon,
            &big,
            special,
            &reduced.small_ids,
            &set,
            &mut lp_solves,
        )?
        .map(|c| c.makespan),
        None => None,
    };
    let mut search = Search {
        epsilon: &working_epsilon,
        big: &big,
        special,
        small: &reduced.small_ids,
        seed,
        floor: trivial_lower_bound(special),
        best: None,
        lp_solves,
        error: None,
    };
    let stats = enumerate_with(&big, config.enumeration_budget, &mut search)?;
    if let Some(e) = search.error.take() {
        return Err(e);
    }
    report.assignments_examined = stats.expansions;
    report.assignments_evaluated = stats.yielded;
    report.lp_solves = search.lp_solves;
    let Some((_, winner)) = search.best.take() else {
        return Err(Error::Internal("every big-job placement was discarded".into()));
    };
    let winner = *winner;

    // Accounting chain on the reduced instance.
    let a = &winner.assign;
    let gamma = &reduced.gamma;
    let gamma_sq = reduced.gamma_sq();
    let dense_makespan = winner.dense.schedule.makespan();
    let dense_bound = dense::makespan_bound(&a.c, m, k, gamma);
    if dense_makespan > dense_bound {
        return Err(Error::Internal(format!(
            "dense makespan {dense_makespan} exceeds its bound {dense_bound}"
        )));
    }
    let candidate_makespan = winner.candidate.makespan();
    let fractional_increase = &candidate_makespan - &dense_makespan;
    let per_shop = a.s_fractional.len().div_ceil(m);
    let fractional_bound = rational::int((per_shop * k) as i64) * &gamma_sq;
    if fractional_increase > fractional_bound {
        return Err(Error::Internal(format!(
            "fractional append grew the makespan by {fractional_increase} > {fractional_bound}"
        )));
    }

    let shops = winner.candidate.job_shops(special.n());
    let appended = append_removed_ops(&winner.candidate, &reduced.removed_ops, &shops, m)?;
    let removed_increase = appended.makespan() - &candidate_makespan;
    if removed_increase > reduced.l_gamma {
        return Err(Error::Internal(format!(
            "removed operations grew the makespan by {removed_increase} > {}",
            reduced.l_gamma
        )));
    }

    let restored = restore_durations(&appended, scaled);
    let mut schedule = denormalize(&restored, &normalized.factor);
    schedule.canonicalize();
    let violations = validate(instance, &schedule, true);
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(Error::Internal(format!(
            "final schedule is infeasible: {}",
            list.join("; ")
        )));
    }

    report.makespan = schedule.makespan();
    report.scaled_makespan = restored.makespan();
    report.gamma = gamma.clone();
    report.delta = reduced.delta.clone();
    report.x_found = reduced.x_found;
    report.c = a.c.clone();
    report.dense_makespan = dense_makespan;
    report.dense_bound = dense_bound;
    report.fractional_increase = fractional_increase;
    report.fractional_bound = fractional_bound;
    report.removed_increase = removed_increase;
    report.l_gamma = reduced.l_gamma.clone();
    report.restriction_loss = rational::int((2 * m * k * k) as i64) * gamma;
    report.big = reduced.big_ids.len();
    report.small = reduced.small_ids.len();
    report.s_one = a.s_one.len();
    report.s_fractional = a.s_fractional.len();
    report.wall_seconds = started.elapsed().as_secs_f64();

    Ok(Solution {
        schedule,
        report,
        normalized,
        reduced: Some(reduced),
        big: Some(big),
        winner: Some(winner),
    })
}

/// Deals the fractional jobs round-robin to the shops by id and appends each
/// shop's share after its completion time, one job at a time with the job's
/// operations back to back in stage order.
pub fn schedule_fractional(partial: &Schedule, s_fractional: &[usize], special: &Instance) -> Schedule {
    let m = special.m();
    let mut jobs = s_fractional.to_vec();
    jobs.sort_unstable();
    let mut clock: Vec<Rat> = (0..m).map(|s| partial.shop_completion(s)).collect();
    let mut out = partial.clone();
    for (i, &job) in jobs.iter().enumerate() {
        let shop = i % m;
        for (stage, p) in special.job(job).times.iter().enumerate() {
            out.push(ScheduledOp {
                job,
                stage,
                shop,
                start: clock[shop].clone(),
                duration: p.clone(),
            });
            clock[shop] += p;
        }
    }
    out
}

/// Replaces the zero-length placeholders of removed operations by the real
/// operations, appended per shop after its completion time in (job, stage)
/// order.
///
/// A job with no positive work in `schedule` occupies no machine time, so
/// its shop is free: such jobs are rebound in id order to the shop that
/// would finish earliest with the removed work bound so far.
pub fn append_removed_ops(
    schedule: &Schedule,
    removed: &[RemovedOp],
    job_shop: &[Option<usize>],
    m: usize,
) -> Result<Schedule> {
    if removed.is_empty() {
        return Ok(schedule.clone());
    }
    let mut out = Schedule::new(
        schedule
            .ops
            .iter()
            .filter(|o| {
                !(o.duration.is_zero() && removed.iter().any(|r| r.job == o.job && r.stage == o.stage))
            })
            .cloned()
            .collect(),
    );
    let mut work: BTreeMap<usize, Rat> = BTreeMap::new();
    for op in removed {
        *work.entry(op.job).or_insert_with(Rat::zero) += &op.duration;
    }
    let mut finish: Vec<Rat> = (0..m).map(|s| out.shop_completion(s)).collect();
    let mut shop_of: BTreeMap<usize, usize> = BTreeMap::new();
    for (&job, w) in &work {
        let shop = job_shop.get(job).copied().flatten().ok_or_else(|| {
            Error::Internal(format!("removed operation of unscheduled job {job}"))
        })?;
        let floating = out.ops.iter().all(|o| o.job != job || o.duration.is_zero());
        let shop = if floating {
            (0..m).min_by(|&a, &b| finish[a].cmp(&finish[b]).then(a.cmp(&b))).unwrap_or(shop)
        } else {
            shop
        };
        finish[shop] += w;
        shop_of.insert(job, shop);
    }
    for op in out.ops.iter_mut() {
        if let Some(&shop) = shop_of.get(&op.job) {
            op.shop = shop;
        }
    }

    let mut per_shop: BTreeMap<usize, Vec<&RemovedOp>> = BTreeMap::new();
    for op in removed {
        per_shop.entry(shop_of[&op.job]).or_default().push(op);
    }
    for (shop, mut ops) in per_shop {
        ops.sort_by_key(|o| (o.job, o.stage));
        let mut t = out.shop_completion(shop);
        for op in ops {
            out.push(ScheduledOp {
                job: op.job,
                stage: op.stage,
                shop,
                start: t.clone(),
                duration: op.duration.clone(),
            });
            t += &op.duration;
        }
    }
    Ok(out)
}

/// Gives every operation its duration from `original`, keeping start times.
/// Only big-job times differ, and those only shrink.
pub fn restore_durations(schedule: &Schedule, original: &Instance) -> Schedule {
    Schedule::new(
        schedule
            .ops
            .iter()
            .map(|o| ScheduledOp {
                duration: original.time(o.job, o.stage).clone(),
                ..o.clone()
            })
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub holds: bool,
    pub detail: String,
}

/// Re-checks the LP and gap-filling invariants on the winning candidate.
pub fn check_invariants(solution: &Solution) -> Vec<InvariantCheck> {
    let (Some(reduced), Some(big), Some(w)) = (&solution.reduced, &solution.big, &solution.winner) else {
        return Vec::new();
    };
    let special = &reduced.special;
    let (m, k) = (special.m(), special.k());
    let a = &w.assign;
    let gamma = &reduced.gamma;
    let mut checks = Vec::new();
    let mut push = |name, holds, detail: String| checks.push(InvariantCheck { name, holds, detail });

    let support = a.vertex.positive_support();
    let limit = a.lp.jobs.len() + a.gaps.count();
    push(
        "vertex_support",
        support <= limit,
        format!("{support} <= {} jobs + {} gaps", a.lp.jobs.len(), a.gaps.count()),
    );

    let frac_limit =
        rational::int((m * m * k * k) as i64) / gamma + rational::int((k * m) as i64);
    let nf = rational::int(a.s_fractional.len() as i64);
    push(
        "fractional_count",
        nf <= frac_limit,
        format!("{nf} <= {frac_limit}"),
    );

    let loads = assign::integral_loads(&a.lp, &a.s_one, special);
    let over: Vec<String> = loads
        .iter()
        .zip(&a.lp.capacities)
        .filter(|(l, row)| **l > row.capacity)
        .map(|(l, row)| format!("({},{}) gap {}: {l} > {}", row.shop, row.stage, row.gap, row.capacity))
        .collect();
    push("integral_capacity", over.is_empty(), over.join("; "));

    let later = &a.c + rational::frac(1, 16);
    let at_c = assign::probe(big, &w.set, special, &reduced.small_ids, &a.c).vertex.is_some();
    let at_later = assign::probe(big, &w.set, special, &reduced.small_ids, &later)
        .vertex
        .is_some();
    push(
        "lp_monotone",
        at_c && at_later,
        format!("feasible at C = {}: {at_c}, at C + 1/16: {at_later}", a.c),
    );

    let most = w.dense.max_leftovers_per_gap();
    push("leftovers_below_k", most < k, format!("{most} < {k}"));

    let dm = w.dense.schedule.makespan();
    let bound = dense::makespan_bound(&a.c, m, k, gamma);
    push("dense_bound", dm <= bound, format!("{dm} <= {bound}"));

    let ok = validate_with(special, &w.dense.schedule, false, DurationCheck::Exact).is_empty();
    push("dense_feasible", ok, String::new());
    push(
        "zero_ops_placed",
        dense::zero_ops_never_left_over(&w.dense, special),
        String::new(),
    );
    checks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn grid_aligned_two_jobs() {
        let inst = Instance::new(2, 2, vec![vec![frac(1, 4), frac(1, 4)]; 2]).unwrap();
        let (s, report) = solve(&inst, &SolveConfig::desk(frac(1, 4))).unwrap();
        assert_eq!(s.makespan(), frac(1, 2));
        assert_eq!(report.big, 2);
        assert!(validate(&inst, &s, true).is_empty());
    }

    #[test]
    fn single_job_meets_its_length() {
        let inst = Instance::from_ints(3, 3, &[&[2, 5, 1]]).unwrap();
        let (s, _) = solve(&inst, &SolveConfig::desk(frac(1, 4))).unwrap();
        assert_eq!(s.makespan(), int(8));
    }

    #[test]
    fn four_equal_jobs_are_sandwiched() {
        let inst = Instance::from_ints(2, 2, &[&[2, 2]; 4]).unwrap();
        let (s, _) = solve(&inst, &SolveConfig::desk(frac(1, 4))).unwrap();
        assert!(validate(&inst, &s, true).is_empty());
        assert!(s.makespan() >= int(4) && s.makespan() <= int(12));
    }

    #[test]
    fn empty_and_all_zero_instances() {
        let empty = Instance::new(2, 2, vec![]).unwrap();
        let (s, _) = solve(&empty, &SolveConfig::desk(frac(1, 4))).unwrap();
        assert!(s.ops.is_empty());
        let zeros = Instance::from_ints(2, 2, &[&[0, 0], &[0, 0]]).unwrap();
        let (s, _) = solve(&zeros, &SolveConfig::desk(frac(1, 4))).unwrap();
        assert_eq!(s.makespan(), int(0));
        assert!(validate(&zeros, &s, true).is_empty());
    }

    #[test]
    fn config_validation() {
        let inst = Instance::from_ints(1, 1, &[&[1]]).unwrap();
        for g in [frac(0, 1), frac(1, 1), frac(3, 2)] {
            assert!(matches!(
                solve(&inst, &SolveConfig::desk(g)),
                Err(Error::InvalidParameter(_))
            ));
        }
        let mut c = SolveConfig::theoretical(frac(1, 2));
        c.gamma_override = Some(frac(1, 4));
        assert!(matches!(solve(&inst, &c), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn working_epsilon_conversion() {
        assert_eq!(SolveConfig::theoretical(frac(1, 2)).working_epsilon(2), frac(1, 8));
        assert_eq!(SolveConfig::theoretical(frac(1, 3)).working_epsilon(1), frac(1, 6));
        assert_eq!(SolveConfig::theoretical(frac(2, 5)).working_epsilon(3), frac(1, 15));
    }

    #[test]
    fn theoretical_mode_exceeds_budget() {
        let inst = Instance::from_ints(2, 2, &[&[2, 2]; 4]).unwrap();
        let cfg = SolveConfig::theoretical(frac(1, 2)).with_budget(5);
        assert!(matches!(solve(&inst, &cfg), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn fractional_append_is_sequential() {
        let inst = Instance::new(1, 2, vec![vec![frac(1, 32), frac(1, 32)]]).unwrap();
        let partial = Schedule::new(vec![]);
        let s = schedule_fractional(&partial, &[0], &inst);
        assert_eq!(s.ops[0].start, frac(0, 1));
        assert_eq!(s.ops[1].start, frac(1, 32));
        assert_eq!(schedule_fractional(&partial, &[], &inst), partial);
    }

    #[test]
    fn removed_op_goes_after_the_shop() {
        let partial = Schedule::new(vec![
            ScheduledOp {
                job: 0,
                stage: 0,
                shop: 0,
                start: frac(0, 1),
                duration: frac(1, 4),
            },
            ScheduledOp {
                job: 0,
                stage: 1,
                shop: 0,
                start: frac(0, 1),
                duration: frac(0, 1),
            },
        ]);
        let removed = [RemovedOp {
            job: 0,
            stage: 1,
            duration: frac(1, 8),
        }];
        let out = append_removed_ops(&partial, &removed, &[Some(0)], 1).unwrap();
        assert_eq!(out.ops.len(), 2);
        let op = out.ops.iter().find(|o| o.stage == 1).unwrap();
        assert_eq!((&op.start, &op.duration), (&frac(1, 4), &frac(1, 8)));
        assert!(matches!(
            append_removed_ops(&partial, &removed, &[None], 1),
            Err(Error::Internal(_))
        ));
    }
}
