//! Dense filling of gaps with integrally assigned small-job operations.
//!
//! The clock always sits at the earliest instant, over all machines, that
//! lies in an unscanned gap and follows the operations already placed there.
//! At that instant the machine takes the lowest-id pending operation of the
//! gap that still fits before the gap ends and whose job is not running on
//! another machine of the shop. When nothing qualifies the gap is scanned and
//! its pending operations become leftovers, which run back to back after `C`
//! under one shared clock.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::bigjobs::{compute_gaps, AssignmentSet, BigJobs, GapTable};
use crate::error::{Error, Result};
use crate::lp::Candidate;
use crate::model::{intervals_overlap, Instance, Schedule, ScheduledOp};
use crate::rational::{self, Rat};

/// Operations of one gap that were not placed during the scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Leftovers {
    pub shop: usize,
    pub stage: usize,
    pub gap: usize,
    pub jobs: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct DenseOutput {
    /// Big operations plus every operation of the integrally placed small jobs.
    pub schedule: Schedule,
    /// One entry per gap, in the order the gaps were scanned.
    pub leftovers: Vec<Leftovers>,
    pub gaps: GapTable,
    /// Operations placed inside gaps during the scan.
    pub placed_in_gaps: usize,
}

impl DenseOutput {
    pub fn max_leftovers_per_gap(&self) -> usize {
        self.leftovers.iter().map(|l| l.jobs.len()).max().unwrap_or(0)
    }
}

/// `C + m k^3 gamma + k^2 gamma^2`.
pub fn makespan_bound(c: &Rat, m: usize, k: usize, gamma: &Rat) -> Rat {
    let mk3 = rational::int((m * k * k * k) as i64);
    let k2 = rational::int((k * k) as i64);
    c + mk3 * gamma + k2 * gamma * gamma
}

/// Checks that the integral assignment respects every gap's length.
pub fn check_capacities(
    gaps: &GapTable,
    s_one: &BTreeMap<usize, Candidate>,
    special: &Instance,
) -> Result<()> {
    let mut load: BTreeMap<(usize, usize, usize), Rat> = BTreeMap::new();
    for (&job, x) in s_one {
        for (stage, &g) in x.gaps.iter().enumerate() {
            if x.shop >= gaps.m() || g >= gaps.on(x.shop, stage).len() {
                return Err(Error::CapacityViolated {
                    shop: x.shop,
                    stage,
                    gap: g,
                });
            }
            *load.entry((x.shop, stage, g)).or_insert_with(Rat::zero) += special.time(job, stage);
        }
    }
    for ((shop, stage, gap), l) in load {
        if l > gaps.get(shop, stage, gap).len() {
            return Err(Error::CapacityViolated { shop, stage, gap });
        }
    }
    Ok(())
}

struct Machine {
    shop: usize,
    stage: usize,
    /// First gap not yet scanned.
    current: usize,
    /// Next free instant inside the current gap.
    cursor: Rat,
    /// Pending jobs per gap, by id.
    pending: Vec<BTreeSet<usize>>,
}

pub fn dense(
    big: &BigJobs,
    set: &AssignmentSet,
    s_one: &BTreeMap<usize, Candidate>,
    c: &Rat,
    special: &Instance,
) -> Result<DenseOutput> {
    let gaps = compute_gaps(big, set, c);
    check_capacities(&gaps, s_one, special)?;
    let (m, k) = (special.m(), special.k());

    let big_schedule = big.schedule(set);
    let mut machines: Vec<Machine> = (0..m * k)
        .map(|idx| {
            let (shop, stage) = (idx / k, idx % k);
            let on = gaps.on(shop, stage);
            Machine {
                shop,
                stage,
                current: 0,
                cursor: on.first().map_or_else(Rat::zero, |g| g.start.clone()),
                pending: vec![BTreeSet::new(); on.len()],
            }
        })
        .collect();
    for (&job, x) in s_one {
        for (stage, &g) in x.gaps.iter().enumerate() {
            machines[x.shop * k + stage].pending[g].insert(job);
        }
    }

    let mut schedule = big_schedule.clone();
    // Placed small-job intervals per job, for the sibling test.
    let mut running: BTreeMap<usize, Vec<(Rat, Rat)>> = BTreeMap::new();
    let mut leftovers = Vec::new();
    let mut placed_in_gaps = 0;

    loop {
        let next = machines
            .iter()
            .enumerate()
            .filter(|(_, mc)| mc.current < mc.pending.len())
            .min_by(|(a, x), (b, y)| x.cursor.cmp(&y.cursor).then(a.cmp(b)))
            .map(|(idx, _)| idx);
        let Some(idx) = next else {
            break;
        };
        let mc = &mut machines[idx];
        let t = mc.cursor.clone();
        let gap = gaps.get(mc.shop, mc.stage, mc.current);
        let room = &gap.end - &t;
        let stage = mc.stage;

        let pick = mc.pending[mc.current].iter().copied().find(|&job| {
            let p = special.time(job, stage);
            let end = &t + p;
            p <= &room
                && !running
                    .get(&job)
                    .is_some_and(|iv| iv.iter().any(|(s, e)| intervals_overlap(&t, &end, s, e)))
        });

        match pick {
            Some(job) => {
                let p = special.time(job, stage).clone();
                log::trace!(
                    "dense: T = {t}, machine ({}, {stage}) gap {}: job {job} for {p}",
                    mc.shop,
                    mc.current
                );
                mc.pending[mc.current].remove(&job);
                mc.cursor = &t + &p;
                running.entry(job).or_default().push((t.clone(), &t + &p));
                schedule.push(ScheduledOp {
                    job,
                    stage,
                    shop: mc.shop,
                    start: t,
                    duration: p,
                });
                placed_in_gaps += 1;
            }
            None => {
                let rest: Vec<usize> = std::mem::take(&mut mc.pending[mc.current]).into_iter().collect();
                log::trace!(
                    "dense: T = {t}, machine ({}, {stage}) gap {} scanned, {} left over",
                    mc.shop,
                    mc.current,
                    rest.len()
                );
                leftovers.push(Leftovers {
                    shop: mc.shop,
                    stage,
                    gap: mc.current,
                    jobs: rest,
                });
                mc.current += 1;
                if mc.current < mc.pending.len() {
                    mc.cursor = gaps.get(mc.shop, stage, mc.current).start.clone();
                }
            }
        }
    }

    // Post-processing: one clock from C across every leftover set.
    let mut sets: Vec<&Leftovers> = leftovers.iter().filter(|l| !l.jobs.is_empty()).collect();
    sets.sort_by_key(|l| (l.shop, l.stage, l.gap));
    let mut t = c.clone();
    for set in sets {
        for &job in &set.jobs {
            let p = special.time(job, set.stage).clone();
            // Only reachable when C undercuts a big operation on this machine.
            while let Some(blocker) = big_schedule.ops.iter().find(|op| {
                op.shop == set.shop
                    && op.stage == set.stage
                    && intervals_overlap(&t, &(&t + &p), &op.start, &op.end())
            }) {
                t = blocker.end();
            }
            log::trace!("dense: leftover job {job} stage {} at {t}", set.stage);
            schedule.push(ScheduledOp {
                job,
                stage: set.stage,
                shop: set.shop,
                start: t.clone(),
                duration: p.clone(),
            });
            t += p;
        }
    }

    Ok(DenseOutput {
        schedule,
        leftovers,
        gaps,
        placed_in_gaps,
    })
}

/// Whether every zero-length operation was placed during the scan.
pub fn zero_ops_never_left_over(out: &DenseOutput, special: &Instance) -> bool {
    out.leftovers
        .iter()
        .all(|l| l.jobs.iter().all(|&j| !special.time(j, l.stage).is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigjobs::BigAssignment;
    use crate::rational::frac;
    use crate::validate::{validate_with, DurationCheck};

    fn one_big(shop: usize, tau: Vec<u128>) -> AssignmentSet {
        AssignmentSet {
            assignments: vec![BigAssignment { job: 0, shop, tau }],
        }
    }

    #[test]
    fn no_small_jobs_returns_big_schedule() {
        let inst = Instance::new(1, 2, vec![vec![frac(1, 4), frac(1, 4)]]).unwrap();
        let big = BigJobs::new(&inst, &[0], &frac(1, 4));
        let set = one_big(0, vec![0, 4]);
        let out = dense(&big, &set, &BTreeMap::new(), &frac(1, 2), &inst).unwrap();
        assert_eq!(out.schedule, big.schedule(&set));
    }

    #[test]
    fn hand_simulated_example() {
        // Big job 0 at stage 0 [0,1/4), stage 1 [1/4,1/2). Small job 1 (1/8,1/8)
        // goes to the stage-0 gap [1/4,3/4) and stage-1 gap [1/2,3/4).
        let inst = Instance::new(
            1,
            2,
            vec![vec![frac(1, 4), frac(1, 4)], vec![frac(1, 8), frac(1, 8)]],
        )
        .unwrap();
        let big = BigJobs::new(&inst, &[0], &frac(1, 4));
        let set = one_big(0, vec![0, 4]);
        let c = frac(3, 4);
        let gaps = compute_gaps(&big, &set, &c);
        assert_eq!(gaps.on(0, 0).len(), 1);
        assert_eq!(gaps.on(0, 1).len(), 2);
        let x = Candidate {
            job: 1,
            shop: 0,
            gaps: vec![0, 1],
        };
        let s_one = BTreeMap::from([(1, x)]);
        let out = dense(&big, &set, &s_one, &c, &inst).unwrap();
        let small: Vec<_> = out.schedule.ops.iter().filter(|o| o.job == 1).collect();
        assert_eq!(small.len(), 2);
        assert_eq!((small[0].stage, &small[0].start), (0, &frac(1, 4)));
        assert_eq!((small[1].stage, &small[1].start), (1, &frac(1, 2)));
        assert_eq!(out.schedule.makespan(), frac(5, 8));
        assert!(out.leftovers.iter().all(|l| l.jobs.is_empty()));
        assert!(validate_with(&inst, &out.schedule, true, DurationCheck::Exact).is_empty());
    }

    #[test]
    fn sibling_blocking_creates_leftovers() {
        // No big jobs, one shop, two stages, C = 1/4. Jobs 0 and 1 are (1/8, 1/8).
        // At T = 0 machine (0,0) takes job 0 and machine (0,1) takes job 1; at
        // 1/8 they swap. Everything fits, nothing is left over.
        let inst = Instance::new(1, 2, vec![vec![frac(1, 8), frac(1, 8)]; 2]).unwrap();
        let big = BigJobs::new(&inst, &[], &frac(1, 4));
        let set = AssignmentSet::default();
        let s_one: BTreeMap<usize, Candidate> = (0..2)
            .map(|j| {
                (
                    j,
                    Candidate {
                        job: j,
                        shop: 0,
                        gaps: vec![0, 0],
                    },
                )
            })
            .collect();
        let out = dense(&big, &set, &s_one, &frac(1, 4), &inst).unwrap();
        assert_eq!(out.schedule.makespan(), frac(1, 4));
        assert_eq!(out.placed_in_gaps, 4);
        assert!(validate_with(&inst, &out.schedule, true, DurationCheck::Exact).is_empty());
    }

    #[test]
    fn leftover_serialization_after_c() {
        // One job (1/8, 1/8); both stages get gap [0, 1/8). Stage 0 runs first,
        // stage 1 is blocked by its sibling for the whole gap and is left over.
        let inst = Instance::new(1, 2, vec![vec![frac(1, 8), frac(1, 8)]]).unwrap();
        let big = BigJobs::new(&inst, &[], &frac(1, 4));
        let s_one = BTreeMap::from([(
            0,
            Candidate {
                job: 0,
                shop: 0,
                gaps: vec![0, 0],
            },
        )]);
        let c = frac(1, 8);
        let out = dense(&big, &AssignmentSet::default(), &s_one, &c, &inst).unwrap();
        assert_eq!(out.max_leftovers_per_gap(), 1);
        assert_eq!(out.schedule.makespan(), frac(1, 4));
        assert!(validate_with(&inst, &out.schedule, true, DurationCheck::Exact).is_empty());
        assert!(out.schedule.makespan() <= makespan_bound(&c, 1, 2, &frac(1, 4)));
    }

    #[test]
    fn zero_length_ops_are_placed_in_their_gap() {
        let inst = Instance::new(1, 2, vec![vec![frac(1, 8), frac(0, 1)]]).unwrap();
        let big = BigJobs::new(&inst, &[], &frac(1, 4));
        let s_one = BTreeMap::from([(
            0,
            Candidate {
                job: 0,
                shop: 0,
                gaps: vec![0, 0],
            },
        )]);
        let out = dense(&big, &AssignmentSet::default(), &s_one, &frac(1, 8), &inst).unwrap();
        assert!(zero_ops_never_left_over(&out, &inst));
        assert_eq!(out.schedule.ops.len(), 2);
    }

    #[test]
    fn capacity_violation_is_rejected() {
        let inst = Instance::new(1, 1, vec![vec![frac(1, 4)]]).unwrap();
        let big = BigJobs::new(&inst, &[], &frac(1, 4));
        let s_one = BTreeMap::from([(
            0,
            Candidate {
                job: 0,
                shop: 0,
                gaps: vec![0],
            },
        )]);
        assert!(matches!(
            dense(&big, &AssignmentSet::default(), &s_one, &frac(1, 8), &inst),
            Err(Error::CapacityViolated { .. })
        ));
    }
}
