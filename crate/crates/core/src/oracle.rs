//! Exact optimum for tiny instances.
//!
//! Jobs are distributed over shops as restricted-growth strings (a job opens
//! at most the next unused shop, since shops are identical). Each shop is
//! then solved exactly: k = 1 is a plain sum, k = 2 uses the two-machine
//! closed form, and larger k searches semi-active schedules. A semi-active
//! schedule is built by appending operations at the earliest time allowed by
//! their machine and job; appends are restricted to non-decreasing
//! (start, operation index), so each semi-active schedule is generated once.

use std::collections::HashMap;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{Instance, Schedule, ScheduledOp};
use crate::rational::{self, Rat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_jobs: usize,
    pub max_shops: usize,
    pub max_stages: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_jobs: 6,
            max_shops: 2,
            max_stages: 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub opt: Rat,
    pub witness: Schedule,
    /// Search nodes over all per-shop searches.
    pub nodes_explored: u64,
}

/// `max(sum p1, sum p2, max_i (p1 + p2))`.
pub fn o2_shop_makespan(jobs: &[(Rat, Rat)]) -> Rat {
    let a: Rat = jobs.iter().map(|(p, _)| p).sum();
    let b: Rat = jobs.iter().map(|(_, q)| q).sum();
    let mut best = rational::max(&a, &b).clone();
    for (p, q) in jobs {
        let t = p + q;
        if t > best {
            best = t;
        }
    }
    best
}

/// Load bound for a single shop: the longest machine or job.
fn shop_lower_bound(times: &[Vec<Rat>], k: usize) -> Rat {
    let mut lb = Rat::zero();
    for stage in 0..k {
        let load: Rat = times.iter().map(|t| &t[stage]).sum();
        if load > lb {
            lb = load;
        }
    }
    for t in times {
        let total: Rat = t.iter().sum();
        if total > lb {
            lb = total;
        }
    }
    lb
}

struct ShopSearch<'a> {
    times: &'a [Vec<Rat>],
    k: usize,
    /// Positive operations as (job, stage).
    ops: Vec<(usize, usize)>,
    lower: Rat,
    best: Option<Rat>,
    best_starts: Vec<Rat>,
    starts: Vec<Option<Rat>>,
    machine_end: Vec<Rat>,
    job_end: Vec<Rat>,
    machine_left: Vec<Rat>,
    job_left: Vec<Rat>,
    nodes: u64,
}

impl ShopSearch<'_> {
    fn bound(&self, makespan: &Rat) -> Rat {
        let mut lb = makespan.clone();
        for s in 0..self.k {
            let v = &self.machine_end[s] + &self.machine_left[s];
            if v > lb {
                lb = v;
            }
        }
        for (j, end) in self.job_end.iter().enumerate() {
            let v = end + &self.job_left[j];
            if v > lb {
                lb = v;
            }
        }
        lb
    }

    /// Returns true once the global lower bound is reached.
    fn dfs(&mut self, placed: usize, last: Option<(Rat, usize)>, makespan: Rat) -> bool {
        self.nodes += 1;
        if placed == self.ops.len() {
            if self.best.as_ref().is_none_or(|b| makespan < *b) {
                self.best_starts = self.starts.iter().map(|s| s.clone().unwrap_or_default()).collect();
                self.best = Some(makespan.clone());
            }
            return self.best.as_ref() == Some(&self.lower);
        }
        if self.best.as_ref().is_some_and(|b| self.bound(&makespan) >= *b) {
            return false;
        }
        for idx in 0..self.ops.len() {
            if self.starts[idx].is_some() {
                continue;
            }
            let (job, stage) = self.ops[idx];
            let start = rational::max(&self.machine_end[stage], &self.job_end[job]).clone();
            if let Some((ls, li)) = &last {
                if (&start, idx) < (ls, *li) {
                    continue;
                }
            }
            let p = self.times[job][stage].clone();
            let end = &start + &p;
            let saved = (self.machine_end[stage].clone(), self.job_end[job].clone());
            self.machine_end[stage] = end.clone();
            self.job_end[job] = end.clone();
            self.machine_left[stage] -= &p;
            self.job_left[job] -= &p;
            self.starts[idx] = Some(start.clone());
            let next = rational::max(&makespan, &end).clone();
            let done = self.dfs(placed + 1, Some((start, idx)), next);
            self.starts[idx] = None;
            self.machine_left[stage] += &p;
            self.job_left[job] += &p;
            self.machine_end[stage] = saved.0;
            self.job_end[job] = saved.1;
            if done {
                return true;
            }
        }
        false
    }
}

/// Optimal single-shop schedule by search. Returns the makespan, the start
/// time of every operation (indexed `[job][stage]`), and the node count.
pub fn shop_search(times: &[Vec<Rat>], k: usize) -> (Rat, Vec<Vec<Rat>>, u64) {
    let ops: Vec<(usize, usize)> = (0..times.len())
        .flat_map(|j| (0..k).map(move |s| (j, s)))
        .filter(|&(j, s)| times[j][s].is_positive())
        .collect();
    let machine_left = (0..k).map(|s| times.iter().map(|t| &t[s]).sum()).collect();
    let job_left = times.iter().map(|t| t.iter().sum()).collect();
    let mut search = ShopSearch {
        times,
        k,
        lower: shop_lower_bound(times, k),
        best: None,
        best_starts: Vec::new(),
        starts: vec![None; ops.len()],
        machine_end: vec![Rat::zero(); k],
        job_end: vec![Rat::zero(); times.len()],
        machine_left,
        job_left,
        nodes: 0,
        ops,
    };
    search.dfs(0, None, Rat::zero());
    let mut starts = vec![vec![Rat::zero(); k]; times.len()];
    for (idx, &(j, s)) in search.ops.iter().enumerate() {
        starts[j][s] = search.best_starts[idx].clone();
    }
    (search.best.unwrap_or_default(), starts, search.nodes)
}

/// Minimum makespan over every acyclic orientation of the disjunctive graph:
/// one permutation per machine times one permutation per job, each evaluated
/// by longest path. Only usable for a handful of operations.
pub fn disjunctive_makespan(times: &[Vec<Rat>], k: usize) -> Rat {
    let n = times.len();
    if n == 0 {
        return Rat::zero();
    }
    let machine_perms = permutations(n);
    let job_perms = permutations(k);
    let mut best: Option<Rat> = None;
    let mut machine_choice = vec![0usize; k];
    let mut job_choice = vec![0usize; n];
    loop {
        let machine_order: Vec<&Vec<usize>> = machine_choice.iter().map(|&c| &machine_perms[c]).collect();
        loop {
            let job_order: Vec<&Vec<usize>> = job_choice.iter().map(|&c| &job_perms[c]).collect();
            if let Some(v) = longest_path(times, k, &machine_order, &job_order) {
                if best.as_ref().is_none_or(|b| v < *b) {
                    best = Some(v);
                }
            }
            if !advance(&mut job_choice, job_perms.len()) {
                break;
            }
        }
        if !advance(&mut machine_choice, machine_perms.len()) {
            break;
        }
    }
    best.expect("some orientation is acyclic")
}

fn advance(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Longest path through the orientation, or `None` if it has a cycle.
fn longest_path(
    times: &[Vec<Rat>],
    k: usize,
    machine_order: &[&Vec<usize>],
    job_order: &[&Vec<usize>],
) -> Option<Rat> {
    let n = times.len();
    let node = |j: usize, s: usize| j * k + s;
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n * k];
    let mut indeg = vec![0usize; n * k];
    for (s, order) in machine_order.iter().enumerate() {
        for w in order.windows(2) {
            succ[node(w[0], s)].push(node(w[1], s));
            indeg[node(w[1], s)] += 1;
        }
    }
    for (j, order) in job_order.iter().enumerate() {
        for w in order.windows(2) {
            succ[node(j, w[0])].push(node(j, w[1]));
            indeg[node(j, w[1])] += 1;
        }
    }
    let mut start = vec![Rat::zero(); n * k];
    let mut ready: Vec<usize> = (0..n * k).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    let mut makespan = Rat::zero();
    while let Some(v) = ready.pop() {
        seen += 1;
        let end = &start[v] + &times[v / k][v % k];
        if end > makespan {
            makespan = end.clone();
        }
        for &w in &succ[v] {
            if end > start[w] {
                start[w] = end.clone();
            }
            indeg[w] -= 1;
            if indeg[w] == 0 {
                ready.push(w);
            }
        }
    }
    (seen == n * k).then_some(makespan)
}

type ShopSolution = (Rat, Vec<Vec<Rat>>);

struct Memo<'a> {
    instance: &'a Instance,
    cache: HashMap<Vec<usize>, ShopSolution>,
    nodes: u64,
}

impl Memo<'_> {
    fn shop(&mut self, jobs: &[usize]) -> Result<ShopSolution> {
        if let Some(s) = self.cache.get(jobs) {
            return Ok(s.clone());
        }
        let k = self.instance.k();
        let times: Vec<Vec<Rat>> = jobs.iter().map(|&j| self.instance.job(j).times.clone()).collect();
        let solved = match k {
            1 => {
                let mut t = Rat::zero();
                let mut starts = Vec::with_capacity(times.len());
                for row in &times {
                    starts.push(vec![t.clone()]);
                    t += &row[0];
                }
                (t, starts)
            }
            _ => {
                let (value, starts, nodes) = shop_search(&times, k);
                self.nodes += nodes;
                if k == 2 {
                    let pairs: Vec<(Rat, Rat)> = times.iter().map(|t| (t[0].clone(), t[1].clone())).collect();
                    let closed = o2_shop_makespan(&pairs);
                    if closed != value {
                        return Err(Error::Internal(format!(
                            "two-machine search found {value}, closed form gives {closed}"
                        )));
                    }
                }
                (value, starts)
            }
        };
        self.cache.insert(jobs.to_vec(), solved.clone());
        Ok(solved)
    }
}

pub fn exact_small(instance: &Instance, limits: OracleLimits) -> Result<OracleResult> {
    let (n, m, k) = (instance.n(), instance.m(), instance.k());
    if n > limits.max_jobs || m > limits.max_shops || k > limits.max_stages {
        return Err(Error::CapsExceeded(format!(
            "instance has n = {n}, m = {m}, k = {k}; limits are n <= {}, m <= {}, k <= {}",
            limits.max_jobs, limits.max_shops, limits.max_stages
        )));
    }
    let mut memo = Memo {
        instance,
        cache: HashMap::new(),
        nodes: 0,
    };
    let mut best: Option<(Rat, Vec<usize>)> = None;
    let mut shop_of = vec![0usize; n];
    // Restricted-growth strings: job i takes a shop at most one past the
    // largest used by jobs before it.
    loop {
        let mut makespan = Rat::zero();
        for shop in 0..m {
            let jobs: Vec<usize> = (0..n).filter(|&j| shop_of[j] == shop).collect();
            let (v, _) = memo.shop(&jobs)?;
            if v > makespan {
                makespan = v;
            }
        }
        if best.as_ref().is_none_or(|(b, _)| makespan < *b) {
            best = Some((makespan, shop_of.clone()));
        }
        if !next_growth_string(&mut shop_of, m) {
            break;
        }
    }
    let (opt, assignment) = best.expect("at least one assignment");

    let mut witness = Schedule::default();
    for shop in 0..m {
        let jobs: Vec<usize> = (0..n).filter(|&j| assignment[j] == shop).collect();
        let (_, starts) = memo.shop(&jobs)?;
        for (row, &job) in jobs.iter().enumerate() {
            for stage in 0..k {
                witness.push(ScheduledOp {
                    job,
                    stage,
                    shop,
                    start: starts[row][stage].clone(),
                    duration: instance.time(job, stage).clone(),
                });
            }
        }
    }
    witness.canonicalize();
    if witness.makespan() != opt {
        return Err(Error::Internal(format!(
            "witness makespan {} differs from optimum {opt}",
            witness.makespan()
        )));
    }
    Ok(OracleResult {
        opt,
        witness,
        nodes_explored: memo.nodes,
    })
}

/// Advances to the next restricted-growth string with values below `m`.
fn next_growth_string(s: &mut [usize], m: usize) -> bool {
    for i in (1..s.len()).rev() {
        let cap = s[..i].iter().max().copied().unwrap_or(0) + 1;
        if s[i] < cap && s[i] + 1 < m {
            s[i] += 1;
            for v in &mut s[i + 1..] {
                *v = 0;
            }
            return true;
        }
    }
    false
}
