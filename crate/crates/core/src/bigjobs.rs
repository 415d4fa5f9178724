//! Restricted placements of big jobs and the idle gaps they leave.
//!
//! Time `[0, 2)` is cut into cells of length `gamma^2`. A big job's assignment
//! picks a shop and, per stage, the cell in which that operation starts.
//! Overlap and horizon tests are done in whole cells: with grid-aligned starts,
//! an operation of length `p` behaves exactly like one of `ceil(p / gamma^2)`
//! cells for both.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::{Instance, Schedule, ScheduledOp};
use crate::rational::{self, Rat};

pub type Cell = u128;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BigAssignment {
    pub job: usize,
    pub shop: usize,
    /// Starting cell per stage.
    pub tau: Vec<Cell>,
}

/// One assignment per big job, in job-id order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AssignmentSet {
    pub assignments: Vec<BigAssignment>,
}

impl AssignmentSet {
    pub fn get(&self, job: usize) -> Option<&BigAssignment> {
        self.assignments.iter().find(|a| a.job == job)
    }
}

fn to_cell(v: &BigInt) -> Cell {
    v.to_u128().unwrap_or(Cell::MAX / 4).min(Cell::MAX / 4)
}

/// Big jobs of a reduced instance, with their grid geometry precomputed.
#[derive(Debug, Clone)]
pub struct BigJobs {
    pub ids: Vec<usize>,
    pub times: Vec<Vec<Rat>>,
    pub gamma: Rat,
    m: usize,
    k: usize,
    unit: Rat,
    /// Number of cells in `[0, 2)`, i.e. the valid `tau` range is `0..grid`.
    grid: Cell,
    cells: Vec<Vec<Cell>>,
    /// Largest start cell per operation that still ends by time 2.
    last_start: Vec<Vec<Option<Cell>>>,
}

impl BigJobs {
    pub fn new(special: &Instance, ids: &[usize], gamma: &Rat) -> Self {
        let unit = gamma * gamma;
        let two = rational::int(2);
        let grid = to_cell(&rational::ceil_div(&two, &unit));
        let times: Vec<Vec<Rat>> = ids.iter().map(|&i| special.job(i).times.clone()).collect();
        let cells = times
            .iter()
            .map(|ts| ts.iter().map(|t| to_cell(&rational::ceil_div(t, &unit))).collect())
            .collect();
        let last_start = times
            .iter()
            .map(|ts| {
                ts.iter()
                    .map(|t| {
                        let room = &two - t;
                        if room < Rat::zero() || grid == 0 {
                            None
                        } else {
                            Some(to_cell(&(room / &unit).floor().to_integer()).min(grid - 1))
                        }
                    })
                    .collect()
            })
            .collect();
        BigJobs {
            ids: ids.to_vec(),
            times,
            gamma: gamma.clone(),
            m: special.m(),
            k: special.k(),
            unit,
            grid,
            cells,
            last_start,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn grid(&self) -> Cell {
        self.grid
    }

    pub fn unit(&self) -> &Rat {
        &self.unit
    }

    fn position(&self, job: usize) -> Option<usize> {
        self.ids.iter().position(|&i| i == job)
    }

    pub fn start_time(&self, tau: Cell) -> Rat {
        Rat::from_integer(BigInt::from(tau)) * &self.unit
    }

    /// The big operations placed by `set`, with their (reduced) durations.
    pub fn schedule(&self, set: &AssignmentSet) -> Schedule {
        let mut s = Schedule::default();
        for a in &set.assignments {
            let pos = self.position(a.job).expect("assignment for a known big job");
            for (stage, &tau) in a.tau.iter().enumerate() {
                s.push(ScheduledOp {
                    job: a.job,
                    stage,
                    shop: a.shop,
                    start: self.start_time(tau),
                    duration: self.times[pos][stage].clone(),
                });
            }
        }
        s
    }

    /// A placement built greedily: jobs in id order, each on the shop where
    /// it finishes first, every stage in order at its earliest free cell.
    pub fn greedy_assignment(&self) -> Option<AssignmentSet> {
        let mut machines: Vec<Vec<(Cell, Cell)>> = vec![Vec::new(); self.m * self.k];
        let mut assignments = Vec::with_capacity(self.len());
        for pos in 0..self.len() {
            let mut best: Option<(Cell, BigAssignment)> = None;
            for shop in 0..self.m {
                let mut own: Vec<(Cell, Cell)> = Vec::with_capacity(self.k);
                let mut tau_all = Vec::with_capacity(self.k);
                let mut end: Cell = 0;
                for stage in 0..self.k {
                    let len = self.cells[pos][stage];
                    let machine = &machines[shop * self.k + stage];
                    let mut tau: Cell = 0;
                    while let Some(&(t, l)) = own
                        .iter()
                        .chain(machine.iter())
                        .find(|&&(t, l)| cells_overlap(tau, len, t, l))
                    {
                        tau = t + l;
                    }
                    match self.last_start[pos][stage] {
                        Some(last) if tau <= last => {}
                        _ => {
                            tau_all.clear();
                            break;
                        }
                    }
                    own.push((tau, len));
                    tau_all.push(tau);
                    end = end.max(tau + len);
                }
                if tau_all.len() == self.k && best.as_ref().is_none_or(|(e, _)| end < *e) {
                    best = Some((
                        end,
                        BigAssignment {
                            job: self.ids[pos],
                            shop,
                            tau: tau_all,
                        },
                    ));
                }
            }
            let (_, a) = best?;
            for (stage, &tau) in a.tau.iter().enumerate() {
                machines[a.shop * self.k + stage].push((tau, self.cells[pos][stage]));
            }
            assignments.push(a);
        }
        Some(AssignmentSet { assignments })
    }

    /// Latest end time over the placed big operations.
    pub fn horizon(&self, set: &AssignmentSet) -> Rat {
        self.schedule(set).makespan()
    }
}

fn cells_overlap(a: Cell, a_len: Cell, b: Cell, b_len: Cell) -> bool {
    a_len > 0 && b_len > 0 && a < b.saturating_add(b_len) && b < a.saturating_add(a_len)
}

/// Whether the big-job placement is feasible: every `tau` in range, every
/// operation done by time 2, no two operations of a job overlapping, and no
/// two big operations overlapping on a machine.
pub fn assignment_feasible(big: &BigJobs, set: &AssignmentSet) -> bool {
    if set.assignments.len() != big.len() {
        return false;
    }
    let mut placed: Vec<(usize, usize, Cell, Cell)> = Vec::new();
    for a in &set.assignments {
        let Some(pos) = big.position(a.job) else {
            return false;
        };
        if a.shop >= big.m || a.tau.len() != big.k {
            return false;
        }
        for (stage, &tau) in a.tau.iter().enumerate() {
            match big.last_start[pos][stage] {
                Some(last) if tau <= last => {}
                _ => return false,
            }
            let len = big.cells[pos][stage];
            for other in 0..stage {
                if cells_overlap(tau, len, a.tau[other], big.cells[pos][other]) {
                    return false;
                }
            }
            if placed
                .iter()
                .any(|&(shop, st, t, l)| shop == a.shop && st == stage && cells_overlap(tau, len, t, l))
            {
                return false;
            }
        }
        for (stage, &tau) in a.tau.iter().enumerate() {
            placed.push((a.shop, stage, tau, big.cells[pos][stage]));
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Visit {
    Continue,
    Stop,
}

/// Consumer of the enumeration. `prune` receives the latest end time of a
/// partial placement each time an operation is added; returning `true` drops
/// every completion of it. It must be monotone in its argument.
pub trait AssignmentVisitor {
    fn prune(&self, _partial_end: &Rat) -> bool {
        false
    }

    fn visit(&mut self, set: &AssignmentSet) -> Result<Visit>;
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EnumerationStats {
    /// Candidate (job, shop, stage, cell) choices examined.
    pub expansions: u64,
    /// Complete feasible assignment sets handed to the visitor.
    pub yielded: u64,
    pub stopped_early: bool,
}

struct Enumerator<'a, V> {
    big: &'a BigJobs,
    budget: u64,
    visitor: &'a mut V,
    stats: EnumerationStats,
    /// Occupied (start, len) cells per machine `shop * k + stage`.
    machines: Vec<Vec<(Cell, Cell)>>,
    current: Vec<BigAssignment>,
}

impl<V: AssignmentVisitor> Enumerator<'_, V> {
    fn tick(&mut self) -> Result<()> {
        self.stats.expansions += 1;
        if self.stats.expansions > self.budget {
            return Err(Error::BudgetExceeded {
                budget: self.budget,
                examined: self.stats.expansions,
            });
        }
        Ok(())
    }

    /// Returns `Visit::Stop` to unwind the whole search.
    fn job(&mut self, pos: usize, prefix_end: &Rat) -> Result<Visit> {
        if pos == self.big.len() {
            self.stats.yielded += 1;
            let set = AssignmentSet {
                assignments: self.current.clone(),
            };
            return self.visitor.visit(&set);
        }
        for shop in 0..self.big.m {
            self.current.push(BigAssignment {
                job: self.big.ids[pos],
                shop,
                tau: Vec::with_capacity(self.big.k),
            });
            let flow = self.stage(pos, shop, 0, prefix_end)?;
            self.current.pop();
            if flow == Visit::Stop {
                return Ok(Visit::Stop);
            }
        }
        Ok(Visit::Continue)
    }

    fn stage(&mut self, pos: usize, shop: usize, stage: usize, prefix_end: &Rat) -> Result<Visit> {
        if stage == self.big.k {
            return self.job(pos + 1, prefix_end);
        }
        let Some(last) = self.big.last_start[pos][stage] else {
            return Ok(Visit::Continue);
        };
        let len = self.big.cells[pos][stage];
        let duration = self.big.times[pos][stage].clone();
        let machine = shop * self.big.k + stage;
        let mut tau: Cell = 0;
        while tau <= last {
            self.tick()?;
            // Jump past the first conflicting interval, if any.
            let own = self.current.last().expect("current job");
            let conflict = own
                .tau
                .iter()
                .enumerate()
                .map(|(s, &t)| (t, self.big.cells[pos][s]))
                .chain(self.machines[machine].iter().copied())
                .find(|&(t, l)| cells_overlap(tau, len, t, l));
            if let Some((t, l)) = conflict {
                tau = t.saturating_add(l);
                continue;
            }
            let end = self.big.start_time(tau) + &duration;
            let partial_end = rational::max(prefix_end, &end).clone();
            if self.visitor.prune(&partial_end) {
                break;
            }
            self.current.last_mut().expect("current job").tau.push(tau);
            self.machines[machine].push((tau, len));
            let flow = self.stage(pos, shop, stage + 1, &partial_end);
            self.machines[machine].pop();
            self.current.last_mut().expect("current job").tau.pop();
            if flow? == Visit::Stop {
                return Ok(Visit::Stop);
            }
            tau += 1;
        }
        Ok(Visit::Continue)
    }
}

/// Visits every feasible assignment set in lexicographic order of
/// (job id, shop, tau), skipping subtrees the visitor prunes. Fails once more
/// than `budget` candidate choices have been examined.
pub fn enumerate_with<V: AssignmentVisitor>(
    big: &BigJobs,
    budget: u64,
    visitor: &mut V,
) -> Result<EnumerationStats> {
    let machines = vec![Vec::new(); big.m * big.k];
    let mut e = Enumerator {
        big,
        budget,
        visitor,
        stats: EnumerationStats::default(),
        machines,
        current: Vec::with_capacity(big.len()),
    };
    let flow = e.job(0, &Rat::zero())?;
    e.stats.stopped_early = flow == Visit::Stop;
    Ok(e.stats)
}

/// Every feasible assignment set, in canonical order.
pub fn enumerate_assignments(big: &BigJobs, budget: u64) -> Result<Vec<AssignmentSet>> {
    struct Collect(Vec<AssignmentSet>);
    impl AssignmentVisitor for Collect {
        fn visit(&mut self, set: &AssignmentSet) -> Result<Visit> {
            self.0.push(set.clone());
            Ok(Visit::Continue)
        }
    }
    let mut c = Collect(Vec::new());
    enumerate_with(big, budget, &mut c)?;
    Ok(c.0)
}

/// Upper bound on the number of assignment sets for `count` big jobs:
/// `(m * (2/gamma^2)^k)^count`.
pub fn assignment_count_bound(m: usize, k: usize, grid: Cell, count: usize) -> BigInt {
    let per_job = BigInt::from(m) * BigInt::from(grid).pow(k as u32);
    per_job.pow(count as u32)
}

/// A maximal idle interval `[start, end)` on machine `(shop, stage)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gap {
    pub shop: usize,
    pub stage: usize,
    /// Position along the machine, left to right from 0.
    pub index: usize,
    pub start: Rat,
    pub end: Rat,
}

impl Gap {
    pub fn len(&self) -> Rat {
        &self.end - &self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }
}

/// Gaps of every machine, grouped per machine in (shop, stage) order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapTable {
    k: usize,
    machines: Vec<Vec<Gap>>,
}

impl GapTable {
    pub fn on(&self, shop: usize, stage: usize) -> &[Gap] {
        &self.machines[shop * self.k + stage]
    }

    pub fn get(&self, shop: usize, stage: usize, index: usize) -> &Gap {
        &self.machines[shop * self.k + stage][index]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Gap> {
        self.machines.iter().flatten()
    }

    pub fn count(&self) -> usize {
        self.machines.iter().map(Vec::len).sum()
    }

    pub fn max_per_machine(&self) -> usize {
        self.machines.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.machines.len() / self.k.max(1)
    }
}

/// Idle intervals below `c` left by the big operations on each machine.
/// Big operations starting at or after `c` still cap the trailing gap.
pub fn compute_gaps(big: &BigJobs, set: &AssignmentSet, c: &Rat) -> GapTable {
    let k = big.k;
    let mut busy: Vec<Vec<(Rat, Rat)>> = vec![Vec::new(); big.m * k];
    for op in big.schedule(set).ops {
        if op.duration > Rat::zero() {
            let end = op.end();
            busy[op.shop * k + op.stage].push((op.start, end));
        }
    }
    let machines = busy
        .into_iter()
        .enumerate()
        .map(|(idx, mut intervals)| {
            let (shop, stage) = (idx / k, idx % k);
            intervals.sort();
            let mut gaps = Vec::new();
            let mut cursor = Rat::zero();
            let push = |start: &Rat, end: &Rat, gaps: &mut Vec<Gap>| {
                if start < end {
                    gaps.push(Gap {
                        shop,
                        stage,
                        index: gaps.len(),
                        start: start.clone(),
                        end: end.clone(),
                    });
                }
            };
            let mut capped = false;
            for (s, e) in &intervals {
                if s >= c {
                    push(&cursor, c, &mut gaps);
                    capped = true;
                    break;
                }
                push(&cursor, s, &mut gaps);
                if e > &cursor {
                    cursor = e.clone();
                }
            }
            if !capped {
                push(&cursor, c, &mut gaps);
            }
            gaps
        })
        .collect();
    GapTable { k, machines }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn one_big_job(m: usize, times: Vec<Rat>) -> BigJobs {
        let k = times.len();
        let inst = Instance::new(m, k, vec![times]).unwrap();
        BigJobs::new(&inst, &[0], &frac(1, 4))
    }

    fn set(items: &[(usize, usize, &[Cell])]) -> AssignmentSet {
        AssignmentSet {
            assignments: items
                .iter()
                .map(|&(job, shop, tau)| BigAssignment {
                    job,
                    shop,
                    tau: tau.to_vec(),
                })
                .collect(),
        }
    }

    #[test]
    fn feasibility_examples() {
        let g2 = frac(1, 16);
        let big = one_big_job(1, vec![g2.clone(), g2.clone()]);
        assert_eq!(big.grid(), 32);
        assert!(assignment_feasible(&big, &set(&[(0, 0, &[0, 1])])));
        assert!(!assignment_feasible(&big, &set(&[(0, 0, &[0, 0])])));
        assert!(!assignment_feasible(&big, &set(&[(0, 0, &[0, 32])])));

        let inst = Instance::new(
            1,
            2,
            vec![vec![frac(1, 8), frac(0, 1)], vec![frac(1, 8), frac(0, 1)]],
        )
        .unwrap();
        let two = BigJobs::new(&inst, &[0, 1], &frac(1, 4));
        assert!(!assignment_feasible(&two, &set(&[(0, 0, &[0, 0]), (1, 0, &[0, 0])])));
        assert!(assignment_feasible(&two, &set(&[(0, 0, &[0, 0]), (1, 0, &[2, 0])])));
    }

    #[test]
    fn horizon_limits_last_start() {
        // A 1/2-long op may start no later than cell 24 (24/16 + 1/2 = 2).
        let big = one_big_job(1, vec![frac(1, 2)]);
        let all = enumerate_assignments(&big, 1_000).unwrap();
        assert_eq!(all.len(), 25);
        assert_eq!(all.last().unwrap().assignments[0].tau, vec![24]);
    }

    #[test]
    fn no_big_jobs_yields_one_empty_set() {
        let inst = Instance::new(2, 2, vec![]).unwrap();
        let big = BigJobs::new(&inst, &[], &frac(1, 4));
        assert_eq!(enumerate_assignments(&big, 10).unwrap(), vec![AssignmentSet::default()]);
    }

    #[test]
    fn single_job_two_cells_counts_992() {
        let g2 = frac(1, 16);
        let big = one_big_job(1, vec![g2.clone(), g2]);
        let all = enumerate_assignments(&big, 1_000_000).unwrap();
        assert_eq!(all.len(), 992);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, all, "canonical order");
    }

    #[test]
    fn budget_is_enforced() {
        let g2 = frac(1, 16);
        let big = one_big_job(1, vec![g2.clone(), g2]);
        match enumerate_assignments(&big, 100) {
            Err(Error::BudgetExceeded { budget: 100, examined }) => assert_eq!(examined, 101),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    fn single_machine_gaps(ops: &[(Cell, Rat)], c: Rat) -> Vec<(Rat, Rat)> {
        // One big job per op, all on machine (0, 0).
        let rows = ops.iter().map(|(_, p)| vec![p.clone()]).collect();
        let inst = Instance::new(1, 1, rows).unwrap();
        let ids: Vec<usize> = (0..ops.len()).collect();
        let big = BigJobs::new(&inst, &ids, &frac(1, 4));
        let s = AssignmentSet {
            assignments: ops
                .iter()
                .enumerate()
                .map(|(i, (tau, _))| BigAssignment {
                    job: i,
                    shop: 0,
                    tau: vec![*tau],
                })
                .collect(),
        };
        let table = compute_gaps(&big, &s, &c);
        table.on(0, 0).iter().map(|g| (g.start.clone(), g.end.clone())).collect()
    }

    #[test]
    fn gap_examples() {
        assert_eq!(
            single_machine_gaps(&[(4, frac(1, 4))], frac(1, 1)),
            vec![(frac(0, 1), frac(1, 4)), (frac(1, 2), frac(1, 1))]
        );
        assert_eq!(
            single_machine_gaps(&[], frac(3, 4)),
            vec![(frac(0, 1), frac(3, 4))]
        );
        assert_eq!(single_machine_gaps(&[(0, frac(1, 2))], frac(1, 2)), vec![]);
        // An op beyond C still caps nothing below C; the trailing gap ends at C.
        assert_eq!(
            single_machine_gaps(&[(0, frac(1, 4)), (12, frac(1, 4))], frac(1, 2)),
            vec![(frac(1, 4), frac(1, 2))]
        );
        // C inside a big op: nothing after it.
        assert_eq!(
            single_machine_gaps(&[(4, frac(1, 2))], frac(1, 2)),
            vec![(frac(0, 1), frac(1, 4))]
        );
    }
}
