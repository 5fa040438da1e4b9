//! Shortest augmenting turnpaths, plain and with capacity scaling.

use crate::error::{Error, Result};
use crate::flow::{CapacityMap, FlowClass};
use crate::grid::TriangleGrid;
use crate::partition::Instance;
use crate::residual::{build_r, BfsScratch, Mode, TurnPath};
use crate::scalar::Int;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Plain,
    Scaling,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Plain => "plain",
            Algorithm::Scaling => "scaling",
        }
    }
}

/// How much of `f + pi(p) in B` is re-checked after each augmentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Borders,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub check: Check,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { check: if cfg!(debug_assertions) { Check::Full } else { Check::Borders } }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseStats<T> {
    /// Augmentations in this phase move `2^ell` units.
    pub ell: u32,
    pub augmentations: usize,
    /// Overall throughput when the phase ended.
    pub throughput: T,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport<T> {
    pub positive: bool,
    pub final_flow: FlowClass<T>,
    pub throughput: T,
    pub target: T,
    pub phases: Vec<PhaseStats<T>>,
    pub bfs_calls: usize,
    pub algorithm: Algorithm,
}

impl<T: Int> SolveReport<T> {
    pub fn augmentations_per_phase(&self) -> Vec<usize> {
        self.phases.iter().map(|p| p.augmentations).collect()
    }

    pub fn total_augmentations(&self) -> usize {
        self.phases.iter().map(|p| p.augmentations).sum()
    }
}

/// Adds `s * pi(p)` to `f`.
pub fn augment<T: Int>(f: &mut FlowClass<T>, p: &TurnPath, s: T) {
    let grid = f.grid().clone();
    let delta = f.deltas_mut();
    for &k in &p.turns {
        let t = grid.turn(k);
        if grid.is_upright(t.triangle) {
            delta[t.in_edge] = delta[t.in_edge] + s;
            delta[t.out_edge] = delta[t.out_edge] - s;
        }
    }
}

/// `ceil(log2(x))` for `x >= 1`.
pub fn ceil_log2(x: u64) -> u32 {
    assert!(x >= 1);
    64 - (x - 1).leading_zeros()
}

struct Run<T> {
    caps: CapacityMap<T>,
    f: FlowClass<T>,
    bfs_calls: usize,
    check: Check,
}

impl<T: Int> Run<T> {
    fn new(inst: &Instance, opts: SolveOptions) -> Result<Self> {
        let grid = Arc::new(TriangleGrid::new(inst.n())?);
        let caps = CapacityMap::new(&grid, inst)?;
        Ok(Run { f: FlowClass::zero(&grid), caps, bfs_calls: 0, check: opts.check })
    }

    /// Augments by `2^ell` along shortest turnpaths until none is left.
    fn phase(&mut self, mode: Mode, step: T) -> Result<usize> {
        let mut r = build_r(self.f.grid());
        let mut scratch = BfsScratch::default();
        let mut count = 0;
        loop {
            r.refresh(&self.f, &self.caps, mode);
            self.bfs_calls += 1;
            let Some(p) = r.shortest_st_turnpath_with(&mut scratch) else { return Ok(count) };
            augment(&mut self.f, &p, step);
            count += 1;
            let ok = match self.check {
                Check::Full => self.f.in_b(&self.caps),
                Check::Borders => self.f.within_borders(&self.caps),
            };
            if !ok {
                return Err(Error::Inconsistent(format!(
                    "augmentation {count} along a shortest turnpath left the capacity polytope"
                )));
            }
        }
    }

    fn report(self, phases: Vec<PhaseStats<T>>, algorithm: Algorithm) -> Result<SolveReport<T>> {
        let throughput = self.f.overall_throughput()?;
        let target = self.caps.target();
        Ok(SolveReport {
            positive: throughput == target,
            final_flow: self.f,
            throughput,
            target,
            phases,
            bfs_calls: self.bfs_calls,
            algorithm,
        })
    }
}

/// Augments along shortest turnpaths of `R_f` until none exists.
pub fn decide_plain<T: Int>(inst: &Instance) -> Result<SolveReport<T>> {
    decide_plain_with(inst, SolveOptions::default())
}

pub fn decide_plain_with<T: Int>(inst: &Instance, opts: SolveOptions) -> Result<SolveReport<T>> {
    let mut run = Run::<T>::new(inst, opts)?;
    let augmentations = run.phase(Mode::Flow, T::one())?;
    let throughput = run.f.overall_throughput()?;
    run.report(vec![PhaseStats { ell: 0, augmentations, throughput }], Algorithm::Plain)
}

/// Capacity scaling: phases `l = ceil(log2 nu_1), ..., 0`, each augmenting by `2^l`
/// along shortest turnpaths of `R_f^l`.
pub fn decide_scaling<T: Int>(inst: &Instance) -> Result<SolveReport<T>> {
    decide_scaling_with(inst, SolveOptions::default())
}

pub fn decide_scaling_with<T: Int>(inst: &Instance, opts: SolveOptions) -> Result<SolveReport<T>> {
    let run = Run::<T>::new(inst, opts)?;
    let nu1 = inst.nu.first();
    if inst.target() == 0 {
        return run.report(Vec::new(), Algorithm::Scaling);
    }
    let mut run = run;
    let n = inst.n();
    let top = ceil_log2(nu1);
    let mut phases = Vec::with_capacity(top as usize + 1);
    for ell in (0..=top).rev() {
        let step = T::pow2(ell).ok_or(Error::Overflow { limit: nu1 })?;
        let augmentations = run.phase(Mode::Scaled(ell), step)?;
        let throughput = run.f.overall_throughput()?;
        phases.push(PhaseStats { ell, augmentations, throughput });
    }
    let report = run.report(phases, Algorithm::Scaling)?;
    check_phase_bounds(inst, &report, n)?;
    Ok(report)
}

/// Phase bounds that hold on every run: the first phase can only saturate left-border
/// edges of capacity exactly `2^l`, each later phase needs at most `6n` augmentations,
/// and on positive instances the gap after phase `l` is below `3n 2^l`.
fn check_phase_bounds<T: Int>(inst: &Instance, report: &SolveReport<T>, n: usize) -> Result<()> {
    let Some(first) = report.phases.first() else { return Ok(()) };
    let full = inst.nu.parts().iter().filter(|&&x| x == 1u64 << first.ell).count();
    if first.augmentations > full {
        return Err(Error::Inconsistent(format!(
            "first phase used {} augmentations, only {full} left edges can take 2^{}",
            first.augmentations, first.ell
        )));
    }
    for p in &report.phases[1..] {
        if p.augmentations > 6 * n {
            return Err(Error::Inconsistent(format!(
                "phase {} used {} > 6n = {} augmentations",
                p.ell,
                p.augmentations,
                6 * n
            )));
        }
    }
    if report.positive {
        let target = report.target.to_i128();
        for p in &report.phases {
            let gap = target - p.throughput.to_i128();
            if gap >= 3 * n as i128 * (1i128 << p.ell) {
                return Err(Error::Inconsistent(format!("gap {gap} after phase {} is not below 3n 2^l", p.ell)));
            }
        }
    }
    Ok(())
}

pub fn decide<T: Int>(inst: &Instance, algorithm: Algorithm) -> Result<SolveReport<T>> {
    match algorithm {
        Algorithm::Plain => decide_plain(inst),
        Algorithm::Scaling => decide_scaling(inst),
    }
}

/// Independent re-check of a report against the capacities.
pub fn verify_certificate<T: Int>(report: &SolveReport<T>, caps: &CapacityMap<T>) -> bool {
    let f = &report.final_flow;
    if f.n() != caps.grid().n() || !f.in_b(caps) || report.target != caps.target() {
        return false;
    }
    let Ok(throughput) = f.overall_throughput() else { return false };
    throughput == report.throughput
        && report.positive == (throughput == report.target)
        && (!report.positive || f.in_p(caps))
}
