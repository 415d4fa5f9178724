//! Instance reduction: pick the threshold `gamma`, split jobs into big and
//! small, strip the `gamma^2`-big operations of small jobs, and round big-job
//! times up to multiples of `gamma^2`.
//!
//! Candidates are `gamma_x = delta^(2^x)` with `delta = eps / (14 m k^3)`.
//! An operation can be `gamma_x^2`-big for at most one `x`, so the total work
//! of normalized instances (at most `mk`) forces some `x < mk/delta` whose
//! `gamma_x^2`-big operations weigh at most `delta`.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::{loads, Instance};
use crate::rational::{self, Rat};

/// A `gamma^2`-big operation of a small job, with its original duration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemovedOp {
    pub job: usize,
    pub stage: usize,
    pub duration: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReduceOutput {
    pub gamma: Rat,
    pub delta: Rat,
    /// Index of the accepted candidate; `None` when `gamma` was supplied.
    pub x_found: Option<u32>,
    pub big_ids: Vec<usize>,
    pub small_ids: Vec<usize>,
    pub removed_ops: Vec<RemovedOp>,
    /// Reduced instance: removed operations zeroed, big-job times rounded up.
    pub special: Instance,
    /// Total original duration of `removed_ops`.
    pub l_gamma: Rat,
}

impl ReduceOutput {
    pub fn gamma_sq(&self) -> Rat {
        &self.gamma * &self.gamma
    }

    pub fn is_big(&self, job: usize) -> bool {
        self.big_ids.binary_search(&job).is_ok()
    }
}

/// Big jobs have some operation `>= gamma`; the rest are small.
pub fn categorize(instance: &Instance, gamma: &Rat) -> (Vec<usize>, Vec<usize>) {
    instance
        .jobs()
        .iter()
        .map(|j| j.id)
        .partition(|&id| instance.job(id).times.iter().any(|t| t >= gamma))
}

/// Operations of `gamma`-small jobs whose time is at least `gamma^2`.
pub fn square_big_ops(instance: &Instance, gamma: &Rat) -> Vec<(usize, usize)> {
    let gamma_sq = gamma * gamma;
    let (_, small) = categorize(instance, gamma);
    small
        .into_iter()
        .flat_map(|id| {
            instance
                .job(id)
                .times
                .iter()
                .enumerate()
                .filter(|(_, t)| **t >= gamma_sq)
                .map(move |(stage, _)| (id, stage))
                .collect::<Vec<_>>()
        })
        .collect()
}

/// `eps / (14 m k^3)`.
pub fn delta_for(epsilon: &Rat, m: usize, k: usize) -> Rat {
    epsilon / rational::int((14 * m * k * k * k) as i64)
}

/// The largest candidate index the search may visit, `mk/delta`.
pub fn max_candidate_index(m: usize, k: usize, delta: &Rat) -> BigInt {
    (rational::int((m * k) as i64) / delta).floor().to_integer()
}

fn check_normalized(instance: &Instance) -> Result<()> {
    let l = loads(instance);
    for (job, total) in l.per_job.into_iter().enumerate() {
        if total > rational::one() {
            return Err(Error::NotNormalized { job, total });
        }
    }
    Ok(())
}

pub fn reduce(instance: &Instance, epsilon: &Rat) -> Result<ReduceOutput> {
    if !rational::has_integer_reciprocal(epsilon) {
        return Err(Error::InvalidParameter(format!(
            "1/epsilon must be a positive integer, got epsilon = {epsilon}"
        )));
    }
    check_normalized(instance)?;
    let delta = delta_for(epsilon, instance.m(), instance.k());
    let last = max_candidate_index(instance.m(), instance.k(), &delta);

    let mut gamma = delta.clone();
    let mut x: u32 = 0;
    loop {
        let ops = square_big_ops(instance, &gamma);
        let l: Rat = ops.iter().map(|&(i, j)| instance.time(i, j)).sum();
        log::debug!("reduce: x = {x}, L = {l}");
        if l <= delta {
            return Ok(apply(instance, gamma, delta, Some(x)));
        }
        if BigInt::from(x) >= last {
            return Err(Error::Internal(format!(
                "no candidate threshold found up to x = {last}"
            )));
        }
        gamma = &gamma * &gamma;
        x += 1;
    }
}

/// Reduction at a fixed threshold (desk mode). The removed weight is not
/// guaranteed to be at most `delta` here.
pub fn reduce_with_gamma(instance: &Instance, gamma: &Rat, delta: Rat) -> ReduceOutput {
    apply(instance, gamma.clone(), delta, None)
}

fn apply(instance: &Instance, gamma: Rat, delta: Rat, x_found: Option<u32>) -> ReduceOutput {
    let gamma_sq = &gamma * &gamma;
    let (big_ids, small_ids) = categorize(instance, &gamma);
    let removed_ops: Vec<RemovedOp> = square_big_ops(instance, &gamma)
        .into_iter()
        .map(|(job, stage)| RemovedOp {
            job,
            stage,
            duration: instance.time(job, stage).clone(),
        })
        .collect();
    let l_gamma = removed_ops.iter().map(|op| &op.duration).sum();

    let special = instance.map_times(|job, stage, t| {
        if big_ids.binary_search(&job).is_ok() {
            Rat::from_integer(rational::ceil_div(t, &gamma_sq)) * &gamma_sq
        } else if removed_ops.iter().any(|o| o.job == job && o.stage == stage) {
            Rat::zero()
        } else {
            t.clone()
        }
    });

    ReduceOutput {
        gamma,
        delta,
        x_found,
        big_ids,
        small_ids,
        removed_ops,
        special,
        l_gamma,
    }
}

/// Candidate indices `x` (up to `max_x`) at which operation `(job, stage)`
/// is `gamma_x^2`-big.
pub fn big_indices(instance: &Instance, delta: &Rat, job: usize, stage: usize, max_x: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut gamma = delta.clone();
    for x in 0..=max_x {
        let times = &instance.job(job).times;
        let small = times.iter().all(|t| t < &gamma);
        if small && times[stage] >= &gamma * &gamma {
            out.push(x);
        }
        gamma = &gamma * &gamma;
    }
    out
}

/// First candidate index at which every job with a positive time is big,
/// after which no operation can be `gamma_x^2`-big any more.
pub fn saturation_index(instance: &Instance, delta: &Rat) -> u32 {
    let min_positive = instance
        .jobs()
        .iter()
        .flat_map(|j| j.times.iter())
        .filter(|t| !t.is_zero())
        .min();
    let Some(min_positive) = min_positive else {
        return 0;
    };
    let mut gamma = delta.clone();
    let mut x = 0;
    while &gamma > min_positive {
        gamma = &gamma * &gamma;
        x += 1;
    }
    x
}

/// Upper bound `mk/gamma` on the number of big jobs of a normalized instance.
pub fn big_job_bound(m: usize, k: usize, gamma: &Rat) -> Rat {
    rational::int((m * k) as i64) / gamma
}

pub fn x_as_u64(x: &BigInt) -> u64 {
    x.to_u64().unwrap_or(u64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::normalize;
    use crate::rational::frac;

    #[test]
    fn categorize_boundaries() {
        let g = frac(1, 4);
        let inst = Instance::new(
            1,
            2,
            vec![
                vec![frac(1, 8), frac(1, 8)],
                vec![frac(1, 2), frac(1, 16)],
                vec![frac(1, 4), frac(0, 1)],
            ],
        )
        .unwrap();
        assert_eq!(categorize(&inst, &g), (vec![1, 2], vec![0]));
    }

    #[test]
    fn theoretical_reduce_on_four_equal_jobs() {
        let inst = Instance::from_ints(2, 2, &[&[2, 2], &[2, 2], &[2, 2], &[2, 2]]).unwrap();
        let scaled = normalize(&inst).scaled;
        let out = reduce(&scaled, &frac(1, 1)).unwrap();
        assert_eq!(out.delta, frac(1, 224));
        assert_eq!(out.gamma, frac(1, 224));
        assert_eq!(out.x_found, Some(0));
        assert_eq!(out.big_ids, vec![0, 1, 2, 3]);
        assert!(out.small_ids.is_empty());
        assert!(out.l_gamma.is_zero());
        assert_eq!(frac(1, 8) / out.gamma_sq(), frac(6272, 1));
        assert_eq!(out.special, scaled);
    }

    #[test]
    fn empty_instance_reduces_trivially() {
        let inst = Instance::new(2, 2, vec![]).unwrap();
        let out = reduce(&inst, &frac(1, 2)).unwrap();
        assert_eq!(out.gamma, out.delta);
        assert!(out.big_ids.is_empty() && out.small_ids.is_empty());
    }

    #[test]
    fn desk_override_example() {
        let inst = Instance::new(
            1,
            2,
            vec![vec![frac(1, 2), frac(1, 16)], vec![frac(1, 8), frac(1, 32)]],
        )
        .unwrap();
        let out = reduce_with_gamma(&inst, &frac(1, 4), frac(1, 1));
        assert_eq!(out.big_ids, vec![0]);
        assert_eq!(out.small_ids, vec![1]);
        assert_eq!(
            out.removed_ops,
            vec![RemovedOp {
                job: 1,
                stage: 0,
                duration: frac(1, 8)
            }]
        );
        assert_eq!(out.l_gamma, frac(1, 8));
        assert_eq!(out.special.job(0).times, vec![frac(1, 2), frac(1, 16)]);
        assert_eq!(out.special.job(1).times, vec![frac(0, 1), frac(1, 32)]);
    }

    #[test]
    fn rounding_goes_up() {
        let inst = Instance::new(1, 2, vec![vec![frac(3, 10), frac(1, 100)]]).unwrap();
        let out = reduce_with_gamma(&inst, &frac(1, 4), frac(1, 1));
        assert_eq!(out.special.job(0).times, vec![frac(5, 16), frac(1, 16)]);
    }

    #[test]
    fn rejects_bad_inputs() {
        let inst = Instance::from_ints(1, 1, &[&[2]]).unwrap();
        assert!(matches!(
            reduce(&inst, &frac(1, 1)),
            Err(Error::NotNormalized { .. })
        ));
        let ok = Instance::new(1, 1, vec![vec![frac(1, 2)]]).unwrap();
        assert!(matches!(
            reduce(&ok, &frac(2, 3)),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn search_advances_past_heavy_candidates() {
        // delta = 1/14 for m = k = 1, eps = 1. A job of 1/20 is small at
        // gamma_0 = 1/14 and 1/20 >= 1/196, so L(gamma_0) = 1/20 <= 1/14 is
        // accepted immediately; add weight to force x = 1.
        let inst = Instance::new(
            1,
            1,
            vec![vec![frac(1, 20)], vec![frac(1, 20)], vec![frac(1, 20)]],
        )
        .unwrap();
        let out = reduce(&inst, &frac(1, 1)).unwrap();
        assert_eq!(out.x_found, Some(1));
        assert_eq!(out.gamma, frac(1, 196));
        assert_eq!(out.big_ids, vec![0, 1, 2]);
        assert_eq!(saturation_index(&inst, &frac(1, 14)), 1);
    }
}
