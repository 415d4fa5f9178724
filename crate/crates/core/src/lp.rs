//! The small-job assignment LP and an exact phase-1 simplex.
//!
//! Variables `y[i, X]` give the fraction of small job `i` placed by candidate
//! `X = (shop, gap index per stage)`. Each small job sums to one; each gap's
//! assigned work stays within its length. The LP has no objective: any basic
//! feasible solution will do, and such a solution has at most one positive
//! variable per constraint.

use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use crate::bigjobs::GapTable;
use crate::model::Instance;
use crate::rational::{self, Rat};

/// Candidate placement of one small job.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Candidate {
    pub job: usize,
    pub shop: usize,
    /// Gap index per stage, on machine `(shop, stage)`.
    pub gaps: Vec<usize>,
}

/// Capacity row of one gap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapacityRow {
    pub shop: usize,
    pub stage: usize,
    pub gap: usize,
    pub capacity: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentLP {
    /// Small job ids, one equality row each.
    pub jobs: Vec<usize>,
    pub variables: Vec<Candidate>,
    pub capacities: Vec<CapacityRow>,
    /// Processing time of each variable's job per stage.
    times: Vec<Vec<Rat>>,
    /// A small job left with no candidate after pruning.
    pub no_candidates: Option<usize>,
    k: usize,
    /// Offset of machine `(shop, stage)` into `capacities`.
    machine_offset: Vec<usize>,
}

impl AssignmentLP {
    pub fn trivially_infeasible(&self) -> bool {
        self.no_candidates.is_some()
    }

    /// `|S| + #gaps`.
    pub fn nontrivial_constraints(&self) -> usize {
        self.jobs.len() + self.capacities.len()
    }

    pub fn capacity_row(&self, shop: usize, stage: usize, gap: usize) -> usize {
        self.machine_offset[shop * self.k + stage] + gap
    }

    fn job_row(&self, job: usize) -> usize {
        self.jobs.binary_search(&job).expect("small job in LP")
    }

    /// Nonzero coefficients of a variable as (row, coefficient); equality rows
    /// come first, capacity rows are offset by `jobs.len()`.
    pub fn column(&self, var: usize) -> Vec<(usize, Rat)> {
        let c = &self.variables[var];
        let mut col = vec![(self.job_row(c.job), Rat::one())];
        for (stage, &g) in c.gaps.iter().enumerate() {
            let p = &self.times[var][stage];
            if !p.is_zero() {
                col.push((self.jobs.len() + self.capacity_row(c.shop, stage, g), p.clone()));
            }
        }
        col
    }

    /// Dense `[A | I_slack] x = b` over variables followed by one slack per gap.
    pub fn standard_form(&self) -> (Vec<Vec<Rat>>, Vec<Rat>) {
        let rows = self.nontrivial_constraints();
        let cols = self.variables.len() + self.capacities.len();
        let mut a = vec![vec![Rat::zero(); cols]; rows];
        for var in 0..self.variables.len() {
            for (r, v) in self.column(var) {
                a[r][var] = v;
            }
        }
        for g in 0..self.capacities.len() {
            a[self.jobs.len() + g][self.variables.len() + g] = Rat::one();
        }
        let mut b = vec![Rat::one(); self.jobs.len()];
        b.extend(self.capacities.iter().map(|c| c.capacity.clone()));
        (a, b)
    }

    /// Whether `values` satisfies every constraint exactly.
    pub fn satisfied_by(&self, values: &[Rat]) -> bool {
        if values.len() != self.variables.len() || values.iter().any(Signed::is_negative) {
            return false;
        }
        let mut row_sums = vec![Rat::zero(); self.nontrivial_constraints()];
        for (var, y) in values.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            for (r, coef) in self.column(var) {
                row_sums[r] += coef * y;
            }
        }
        let n = self.jobs.len();
        row_sums[..n].iter().all(One::is_one)
            && row_sums[n..]
                .iter()
                .zip(&self.capacities)
                .all(|(sum, cap)| sum <= &cap.capacity)
    }

    /// CPLEX LP text, each row scaled to integer coefficients.
    pub fn to_lp_format(&self) -> String {
        let mut out = String::from("\\ small-job assignment LP (feasibility only)\nMinimize\n obj: 0 y0\nSubject To\n");
        let (a, b) = self.standard_form();
        let n = self.variables.len();
        for (r, (row, rhs)) in a.iter().zip(&b).enumerate() {
            let scale = Rat::from_integer(rational::common_denominator(
                row[..n].iter().chain(std::iter::once(rhs)),
            ));
            let terms: Vec<String> = row[..n]
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(j, v)| format!("{} y{j}", (v * &scale).to_integer()))
                .collect();
            let lhs = if terms.is_empty() {
                "0 y0".to_string()
            } else {
                terms.join(" + ")
            };
            let rhs = (rhs * &scale).to_integer();
            if r < self.jobs.len() {
                let _ = writeln!(out, " job{}: {lhs} = {rhs}", self.jobs[r]);
            } else {
                let cap = &self.capacities[r - self.jobs.len()];
                let _ = writeln!(out, " gap_{}_{}_{}: {lhs} <= {rhs}", cap.shop, cap.stage, cap.gap);
            }
        }
        out.push_str("End\n");
        out
    }
}

/// One variable per (small job, shop, gap per stage) whose operations each
/// fit in their target gap, one equality per small job, one capacity per gap.
pub fn build_lp(small_jobs: &[usize], special: &Instance, gaps: &GapTable) -> AssignmentLP {
    let k = gaps.k();
    let m = gaps.m();
    let mut jobs = small_jobs.to_vec();
    jobs.sort_unstable();

    let mut capacities = Vec::with_capacity(gaps.count());
    let mut machine_offset = Vec::with_capacity(m * k);
    for shop in 0..m {
        for stage in 0..k {
            machine_offset.push(capacities.len());
            capacities.extend(gaps.on(shop, stage).iter().map(|g| CapacityRow {
                shop,
                stage,
                gap: g.index,
                capacity: g.len(),
            }));
        }
    }

    let mut variables = Vec::new();
    let mut times = Vec::new();
    let mut no_candidates = None;
    for &job in &jobs {
        let p = &special.job(job).times;
        let before = variables.len();
        for shop in 0..m {
            // Gaps each operation fits in, per stage.
            let options: Vec<Vec<usize>> = (0..k)
                .map(|stage| {
                    gaps.on(shop, stage)
                        .iter()
                        .filter(|g| g.len() >= p[stage])
                        .map(|g| g.index)
                        .collect()
                })
                .collect();
            if options.iter().any(Vec::is_empty) {
                continue;
            }
            // Odometer, last stage fastest: lexicographic order of gap tuples.
            let mut choice = vec![0usize; k];
            'tuples: loop {
                variables.push(Candidate {
                    job,
                    shop,
                    gaps: (0..k).map(|s| options[s][choice[s]]).collect(),
                });
                times.push(p.clone());
                for s in (0..k).rev() {
                    choice[s] += 1;
                    if choice[s] < options[s].len() {
                        continue 'tuples;
                    }
                    choice[s] = 0;
                }
                break;
            }
        }
        if variables.len() == before && no_candidates.is_none() {
            no_candidates = Some(job);
        }
    }

    AssignmentLP {
        jobs,
        variables,
        capacities,
        times,
        no_candidates,
        k,
        machine_offset,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSolution {
    /// Value per LP variable.
    pub values: Vec<Rat>,
    /// Basic columns among variables (`< n`) and slacks (`n + gap`).
    pub basis: Vec<usize>,
}

impl VertexSolution {
    pub fn positive_support(&self) -> usize {
        self.values.iter().filter(|v| v.is_positive()).count()
    }
}

/// Phase-1 simplex with Bland's rule. Returns a basic feasible solution, or
/// `None` when the LP is infeasible.
pub fn find_vertex(lp: &AssignmentLP) -> Option<VertexSolution> {
    if lp.trivially_infeasible() {
        return None;
    }
    let n = lp.variables.len();
    let rows_eq = lp.jobs.len();
    let gaps = lp.capacities.len();
    let rows = rows_eq + gaps;
    // Columns: variables, slacks, artificials (one per equality row), rhs.
    let art0 = n + gaps;
    let cols = art0 + rows_eq;
    let rhs = cols;

    let mut t: Vec<Vec<Rat>> = vec![vec![Rat::zero(); cols + 1]; rows];
    for var in 0..n {
        for (r, v) in lp.column(var) {
            t[r][var] = v;
        }
    }
    for r in 0..rows_eq {
        t[r][art0 + r] = Rat::one();
        t[r][rhs] = Rat::one();
    }
    for g in 0..gaps {
        t[rows_eq + g][n + g] = Rat::one();
        t[rows_eq + g][rhs] = lp.capacities[g].capacity.clone();
    }
    let mut basis: Vec<usize> = (0..rows)
        .map(|r| if r < rows_eq { art0 + r } else { n + (r - rows_eq) })
        .collect();

    // Phase-1 cost row: minimize the sum of artificials, expressed over nonbasics.
    let mut cost = vec![Rat::zero(); cols + 1];
    for row in t.iter().take(rows_eq) {
        for (c, v) in row.iter().enumerate() {
            if c < art0 || c == rhs {
                cost[c] -= v;
            }
        }
    }

    while let Some(enter) = (0..cols).find(|&c| cost[c].is_negative()) {
        let mut leave: Option<(usize, Rat)> = None;
        for r in 0..rows {
            if t[r][enter].is_positive() {
                let ratio = &t[r][rhs] / &t[r][enter];
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        // Phase 1 is bounded below by zero, so a ratio always exists.
        let (row, _) = leave?;
        pivot(&mut t, &mut cost, row, enter);
        basis[row] = enter;
    }

    if !cost[rhs].is_zero() {
        return None;
    }

    // Drive zero-valued artificials out of the basis where possible.
    for r in 0..rows {
        if basis[r] >= art0 {
            if let Some(c) = (0..art0).find(|&c| !t[r][c].is_zero()) {
                pivot(&mut t, &mut cost, r, c);
                basis[r] = c;
            }
        }
    }

    let mut values = vec![Rat::zero(); n];
    for (r, &b) in basis.iter().enumerate() {
        if b < n {
            values[b] = t[r][rhs].clone();
        }
    }
    let mut basis: Vec<usize> = basis.into_iter().filter(|&b| b < art0).collect();
    basis.sort_unstable();
    Some(VertexSolution { values, basis })
}

fn pivot(t: &mut [Vec<Rat>], cost: &mut [Rat], row: usize, col: usize) {
    let p = t[row][col].clone();
    if !p.is_one() {
        for v in t[row].iter_mut() {
            if !v.is_zero() {
                *v /= &p;
            }
        }
    }
    let nonzero: Vec<(usize, Rat)> = t[row]
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(c, v)| (c, v.clone()))
        .collect();
    let eliminate = |target: &mut [Rat]| {
        let f = target[col].clone();
        if f.is_zero() {
            return;
        }
        for (c, v) in &nonzero {
            target[*c] -= &f * v;
        }
    };
    for (r, target) in t.iter_mut().enumerate() {
        if r != row {
            eliminate(target);
        }
    }
    eliminate(cost);
}
