//! Choosing the makespan estimate `C` for one big-job placement and splitting
//! the LP vertex at that `C` into integrally and fractionally placed small jobs.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::bigjobs::{compute_gaps, AssignmentSet, BigJobs, GapTable};
use crate::lp::{build_lp, find_vertex, AssignmentLP, Candidate, VertexSolution};
use crate::model::Instance;
use crate::rational::{self, Rat};

#[derive(Debug, Clone)]
pub struct AssignOutput {
    pub c: Rat,
    /// Integrally placed small jobs and their candidate.
    pub s_one: BTreeMap<usize, Candidate>,
    pub s_fractional: Vec<usize>,
    pub vertex: VertexSolution,
    pub lp: AssignmentLP,
    pub gaps: GapTable,
    /// Final bisection bracket `(lo, hi)`; `hi == c`.
    pub bracket: (Rat, Rat),
    pub lp_solves: u32,
}

#[derive(Debug, Clone)]
pub enum AssignOutcome {
    Assigned(Box<AssignOutput>),
    /// No schedule with makespan at most 2 uses this big-job placement.
    Discard,
}

/// The LP for a given estimate `c`, with its vertex if feasible.
pub struct LpProbe {
    pub gaps: GapTable,
    pub lp: AssignmentLP,
    pub vertex: Option<VertexSolution>,
}

pub fn probe(big: &BigJobs, set: &AssignmentSet, special: &Instance, small: &[usize], c: &Rat) -> LpProbe {
    let gaps = compute_gaps(big, set, c);
    let lp = build_lp(small, special, &gaps);
    let vertex = find_vertex(&lp);
    LpProbe { gaps, lp, vertex }
}

/// Number of halvings of `(0, 2]` that bring the bracket to width `<= eps/4`,
/// i.e. the least `t` with `2^t >= 8/eps`.
pub fn bisection_steps(epsilon: &Rat) -> u32 {
    let target = rational::int(8) / epsilon;
    let mut t = 0;
    let mut pow = Rat::one();
    while pow < target {
        pow *= rational::int(2);
        t += 1;
    }
    t
}

/// Bisects `C` over `(0, 2]`. An estimate is accepted when it covers every
/// big operation and the small-job LP at that estimate is feasible; both
/// conditions are monotone in `C`.
pub fn assign(
    epsilon: &Rat,
    big: &BigJobs,
    set: &AssignmentSet,
    special: &Instance,
    small: &[usize],
) -> AssignOutcome {
    let horizon = big.horizon(set);
    let mut lp_solves = 0;
    let mut test = |c: &Rat| -> Option<LpProbe> {
        if c < &horizon {
            return None;
        }
        lp_solves += 1;
        let p = probe(big, set, special, small, c);
        p.vertex.is_some().then_some(p)
    };

    let mut lo = Rat::zero();
    let mut hi = rational::int(2);
    let Some(mut best) = test(&hi) else {
        return AssignOutcome::Discard;
    };
    for _ in 0..bisection_steps(epsilon) {
        let mid = (&lo + &hi) / rational::int(2);
        match test(&mid) {
            Some(p) => {
                hi = mid;
                best = p;
            }
            None => lo = mid,
        }
    }
    log::trace!("assign: C = {hi} after bracket ({lo}, {hi}]");

    let vertex = best.vertex.take().expect("accepted probe has a vertex");
    let (s_one, s_fractional) = split_vertex(&best.lp, &vertex);
    AssignOutcome::Assigned(Box::new(AssignOutput {
        c: hi.clone(),
        s_one,
        s_fractional,
        vertex,
        lp: best.lp,
        gaps: best.gaps,
        bracket: (lo, hi),
        lp_solves,
    }))
}

/// Jobs with some variable exactly 1 are integral; the rest are fractional.
pub fn split_vertex(lp: &AssignmentLP, vertex: &VertexSolution) -> (BTreeMap<usize, Candidate>, Vec<usize>) {
    let mut s_one = BTreeMap::new();
    for (var, y) in vertex.values.iter().enumerate() {
        if y.is_one() {
            let c = &lp.variables[var];
            s_one.insert(c.job, c.clone());
        }
    }
    let s_fractional = lp
        .jobs
        .iter()
        .copied()
        .filter(|j| !s_one.contains_key(j))
        .collect();
    (s_one, s_fractional)
}

/// Per-gap work of the integrally placed jobs, indexed like `lp.capacities`.
pub fn integral_loads(lp: &AssignmentLP, s_one: &BTreeMap<usize, Candidate>, special: &Instance) -> Vec<Rat> {
    let mut loads = vec![Rat::zero(); lp.capacities.len()];
    for (job, c) in s_one {
        for (stage, &g) in c.gaps.iter().enumerate() {
            loads[lp.capacity_row(c.shop, stage, g)] += special.time(*job, stage);
        }
    }
    loads
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigjobs::BigAssignment;
    use crate::rational::frac;

    #[test]
    fn steps_for_common_epsilons() {
        assert_eq!(bisection_steps(&frac(1, 1)), 3);
        assert_eq!(bisection_steps(&frac(1, 2)), 4);
        assert_eq!(bisection_steps(&frac(1, 3)), 5);
        assert_eq!(bisection_steps(&frac(1, 4)), 5);
    }

    #[test]
    fn split_examples() {
        let inst = Instance::new(2, 1, vec![vec![frac(1, 8)]]).unwrap();
        let big = BigJobs::new(&inst, &[], &frac(1, 4));
        let p = probe(&big, &AssignmentSet::default(), &inst, &[0], &frac(1, 1));
        assert_eq!(p.lp.variables.len(), 2);
        let whole = VertexSolution {
            values: vec![frac(1, 1), frac(0, 1)],
            basis: vec![0],
        };
        let (one, frac_jobs) = split_vertex(&p.lp, &whole);
        assert_eq!(one.keys().copied().collect::<Vec<_>>(), vec![0]);
        assert!(frac_jobs.is_empty());
        let halves = VertexSolution {
            values: vec![frac(1, 2), frac(1, 2)],
            basis: vec![0, 1],
        };
        let (one, frac_jobs) = split_vertex(&p.lp, &halves);
        assert!(one.is_empty());
        assert_eq!(frac_jobs, vec![0]);
    }

    #[test]
    fn no_small_jobs_bisects_to_the_bottom() {
        let inst = Instance::new(1, 1, vec![]).unwrap();
        let big = BigJobs::new(&inst, &[], &frac(1, 4));
        let AssignOutcome::Assigned(out) = assign(&frac(1, 1), &big, &AssignmentSet::default(), &inst, &[]) else {
            panic!("expected an assignment");
        };
        assert_eq!(out.c, frac(1, 4));
        assert!(out.s_one.is_empty() && out.s_fractional.is_empty());
    }

    #[test]
    fn threshold_instance() {
        // One shop, one stage. Big job 0 (1/2) at [0, 1/2); small job 1 (1/8)
        // fits only after it, so C must reach 5/8.
        let inst = Instance::new(1, 1, vec![vec![frac(1, 2)], vec![frac(1, 8)]]).unwrap();
        let big = BigJobs::new(&inst, &[0], &frac(1, 4));
        let set = AssignmentSet {
            assignments: vec![BigAssignment {
                job: 0,
                shop: 0,
                tau: vec![0],
            }],
        };
        for (c, ok) in [(frac(9, 16), false), (frac(5, 8), true), (frac(3, 4), true)] {
            assert_eq!(probe(&big, &set, &inst, &[1], &c).vertex.is_some(), ok, "C = {c}");
        }
        let eps = frac(1, 2);
        let AssignOutcome::Assigned(out) = assign(&eps, &big, &set, &inst, &[1]) else {
            panic!("expected an assignment");
        };
        assert!(out.c >= frac(5, 8));
        assert!(out.c <= frac(5, 8) + &eps / rational::int(4));
        assert_eq!(&out.bracket.1 - &out.bracket.0, frac(1, 8));
        assert_eq!(out.s_one.len(), 1);
    }

    #[test]
    fn unplaceable_small_job_discards() {
        // A small job of length 1 needs gap length 1, but big job fills [0, 3/2)
        // on the only machine.
        let inst = Instance::new(1, 1, vec![vec![frac(3, 2)], vec![frac(1, 1)]]).unwrap();
        let big = BigJobs::new(&inst, &[0], &frac(1, 4));
        let set = AssignmentSet {
            assignments: vec![BigAssignment {
                job: 0,
                shop: 0,
                tau: vec![0],
            }],
        };
        assert!(matches!(
            assign(&frac(1, 1), &big, &set, &inst, &[1]),
            AssignOutcome::Discard
        ));
    }
}
