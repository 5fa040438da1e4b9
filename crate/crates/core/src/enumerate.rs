//! Exact desk-scale machinery: integer points of `P`, secure cycles, the neighbour graph
//! on `P_Z`, and the multiplicity-freeness test.

use crate::error::{Error, Result};
use crate::flow::FlowClass;
use crate::grid::{Contribution, TriangleGrid};
use crate::hives::HiveLabel;
use crate::partition::Instance;
use crate::solver::decide_scaling;
use std::collections::VecDeque;
use std::sync::Arc;

pub const DEFAULT_LIMIT: usize = 1_000_000;

struct HiveSearch<'a> {
    grid: &'a TriangleGrid,
    fixed: Vec<Option<i64>>,
    /// Per vertex: rhombi whose largest vertex index is this vertex.
    closing: Vec<Vec<usize>>,
    lo: i64,
    hi: i64,
    values: Vec<i64>,
    out: Vec<Vec<i64>>,
    limit: usize,
}

impl HiveSearch<'_> {
    /// Range for `h(v)` allowed by the rhombi completed at `v`.
    fn range(&self, v: usize) -> (i64, i64) {
        let (mut lo, mut hi) = (self.lo, self.hi);
        for &rho in &self.closing[v] {
            let r = self.grid.rhombus(rho);
            let h = &self.values;
            // slack = h(l) + h(r) - h(t) - h(b) >= 0, linear in h(v)
            let (plus, rest) = if v == r.left || v == r.right {
                let other = if v == r.left { r.right } else { r.left };
                (true, h[other] - h[r.top] - h[r.bottom])
            } else {
                let other = if v == r.top { r.bottom } else { r.top };
                (false, h[r.left] + h[r.right] - h[other])
            };
            if plus {
                lo = lo.max(-rest);
            } else {
                hi = hi.min(rest);
            }
        }
        (lo, hi)
    }

    fn run(&mut self, v: usize) -> Result<()> {
        if v == self.values.len() {
            if self.out.len() == self.limit {
                return Err(Error::CapExceeded(self.limit));
            }
            self.out.push(self.values.clone());
            return Ok(());
        }
        let (lo, hi) = self.range(v);
        match self.fixed[v] {
            Some(x) => {
                if lo <= x && x <= hi {
                    self.values[v] = x;
                    self.run(v + 1)?;
                }
            }
            None => {
                for x in lo..=hi {
                    self.values[v] = x;
                    self.run(v + 1)?;
                }
            }
        }
        Ok(())
    }
}

/// All integral hives with the boundary forced by the instance.
pub fn enumerate_hives(inst: &Instance, limit: usize) -> Result<Vec<HiveLabel<i64>>> {
    let grid = Arc::new(TriangleGrid::new(inst.n())?);
    let fixed = HiveLabel::<i64>::forced_boundary(&grid, inst)?;
    let mut closing = vec![Vec::new(); grid.num_vertices()];
    for (rho, r) in grid.rhombi().iter().enumerate() {
        let last = [r.top, r.bottom, r.left, r.right].into_iter().max().expect("four corners");
        closing[last].push(rho);
    }
    let boundary: Vec<i64> = fixed.iter().flatten().copied().collect();
    let lo = *boundary.iter().min().expect("nonempty boundary");
    let hi = *boundary.iter().max().expect("nonempty boundary") * inst.n() as i64;
    let mut s = HiveSearch {
        grid: &grid,
        fixed,
        closing,
        lo,
        hi,
        values: vec![0; grid.num_vertices()],
        out: Vec::new(),
        limit,
    };
    s.run(0)?;
    s.out.into_iter().map(|v| HiveLabel::new(&grid, v)).collect()
}

/// The integer points of `P(lambda, mu, nu)` as flow classes; their number is the LR
/// coefficient.
pub fn enumerate_p(inst: &Instance, limit: usize) -> Result<Vec<FlowClass<i64>>> {
    Ok(enumerate_hives(inst, limit)?.iter().map(HiveLabel::to_flow).collect())
}

pub fn count_p(inst: &Instance, limit: usize) -> Result<usize> {
    Ok(enumerate_hives(inst, limit)?.len())
}

/// A proper simple cycle in the honeycomb graph, visiting distinct triangles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GCycle {
    /// Triangles in traversal order.
    pub triangles: Vec<usize>,
    /// `turns[j]` is the turn taken inside `triangles[j]`.
    pub turns: Vec<usize>,
    pub flow: FlowClass<i64>,
}

impl GCycle {
    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Builds the cycle from a turn sequence; `None` unless it closes up, stays off the
    /// border and visits each triangle once.
    pub fn from_turns(grid: &Arc<TriangleGrid>, turns: &[usize]) -> Option<GCycle> {
        if turns.is_empty() {
            return None;
        }
        let mut seen = vec![false; grid.num_triangles()];
        let mut delta = vec![0i64; grid.num_edges()];
        for (j, &k) in turns.iter().enumerate() {
            let t = grid.turn(k);
            if std::mem::replace(&mut seen[t.triangle], true) || grid.is_border(t.out_edge) {
                return None;
            }
            if !grid.concatenable(k, turns[(j + 1) % turns.len()]) {
                return None;
            }
            // leaving t through out_edge
            delta[t.out_edge] += if grid.is_upright(t.triangle) { -1 } else { 1 };
        }
        let flow = FlowClass::from_delta(grid, delta).ok()?;
        let triangles = turns.iter().map(|&k| grid.turn(k).triangle).collect();
        Some(GCycle { triangles, turns: turns.to_vec(), flow })
    }

    /// Recognises `d` as a single proper cycle: throughputs in `{-1, 0, 1}`, zero on the
    /// border, and a support forming one closed walk.
    pub fn from_flow(d: &FlowClass<i64>) -> Option<GCycle> {
        let g = d.grid();
        if d.deltas().iter().any(|x| x.abs() > 1) || g.border_edges().any(|e| d.delta(e) != 0) {
            return None;
        }
        let start = (0..g.num_triangles()).find(|&t| g.triangle_sides(t).iter().any(|&e| d.delta(e) != 0))?;
        let mut turns = Vec::new();
        let mut t = start;
        loop {
            let sides = g.triangle_sides(t);
            let ins: Vec<usize> = sides.iter().copied().filter(|&e| d.inflow(t, e) > 0).collect();
            let outs: Vec<usize> = sides.iter().copied().filter(|&e| d.inflow(t, e) < 0).collect();
            if ins.len() != 1 || outs.len() != 1 {
                return None;
            }
            turns.push(g.turn_of(t, ins[0], outs[0]));
            t = g.across(t, outs[0])?;
            if t == start {
                break;
            }
            if turns.len() > g.num_triangles() {
                return None;
            }
        }
        let c = GCycle::from_turns(g, &turns)?;
        (c.flow == *d).then_some(c)
    }
}

/// `c` keeps every `f`-flat rhombus at nonnegative slack, i.e. `f + eps c` stays in `B`
/// for small `eps > 0`.
pub fn is_f_hive_preserving(f: &FlowClass<i64>, c: &GCycle) -> bool {
    (0..f.grid().num_rhombi()).all(|rho| f.slack(rho) != 0 || c.flow.slack(rho) >= 0)
}

/// Same test in doubled integers: `2f + c` against twice the capacities is the point
/// `f + c/2`, checked rhombus by rhombus.
pub fn is_f_hive_preserving_doubled(f: &FlowClass<i64>, c: &GCycle) -> bool {
    let doubled = f.scaled(2).add_scaled(&c.flow, 1).expect("same grid");
    doubled.is_hive_flow()
}

/// Hive preserving, and no nearly `f`-flat rhombus has both of its acute-angle turns
/// (the single-turn negative contributions) on `c`.
pub fn is_f_secure(f: &FlowClass<i64>, c: &GCycle) -> bool {
    if !is_f_hive_preserving(f, c) {
        return false;
    }
    let g = f.grid();
    g.rhombi().iter().enumerate().all(|(rho, r)| {
        if f.slack(rho) != 1 {
            return true;
        }
        let acute: Vec<usize> = r
            .contributions
            .negative
            .iter()
            .filter_map(|c| match c {
                Contribution::Turn(k) => Some(*k),
                Contribution::Pair(..) => None,
            })
            .collect();
        !acute.iter().all(|k| c.turns.contains(k))
    })
}

struct CycleSearch<'a> {
    grid: &'a Arc<TriangleGrid>,
    flat: Vec<bool>,
    /// Per triangle, the rhombi it belongs to.
    tri_rhombi: Vec<Vec<usize>>,
    chosen: Vec<Option<usize>>,
    path: Vec<usize>,
    start: usize,
    /// Distance in triangles back to `start`, ignoring constraints.
    dist: Vec<usize>,
}

impl CycleSearch<'_> {
    /// Slack of the cycle in `rho` is nonnegative; undecided while only one of its
    /// triangles has a turn, unless the cycle is closed.
    fn rhombus_ok(&self, rho: usize, closed: bool) -> bool {
        let r = self.grid.rhombus(rho);
        if !closed && (self.chosen[r.upright].is_none() || self.chosen[r.downright].is_none()) {
            return true;
        }
        let used = |c: &Contribution| match *c {
            Contribution::Turn(k) => self.path.contains(&k),
            Contribution::Pair(a, b) => self.path.contains(&a) && self.path.contains(&b),
        };
        let pos = r.contributions.positive.iter().filter(|c| used(c)).count();
        let neg = r.contributions.negative.iter().filter(|c| used(c)).count();
        pos >= neg
    }

    fn dfs(&mut self, budget: usize) -> Option<Vec<usize>> {
        let last = *self.path.last().expect("path starts with a turn");
        let t = self.grid.turn(last);
        let next = self.grid.across(t.triangle, t.out_edge)?;
        if next == self.start {
            let first = self.grid.turn(self.path[0]);
            if first.in_edge == t.out_edge && self.closing_ok() {
                return Some(self.path.clone());
            }
            return None;
        }
        if self.chosen[next].is_some() || next < self.start || self.path.len() + self.dist[next] > budget {
            return None;
        }
        for k in self.grid.turns_from(next, t.out_edge) {
            let out = self.grid.turn(k).out_edge;
            if self.grid.is_border(out) {
                continue;
            }
            self.chosen[next] = Some(k);
            self.path.push(k);
            let ok = self.tri_rhombi[next].iter().all(|&rho| !self.flat[rho] || self.rhombus_ok(rho, false));
            if ok {
                if let Some(found) = self.dfs(budget) {
                    return Some(found);
                }
            }
            self.path.pop();
            self.chosen[next] = None;
        }
        None
    }

    fn closing_ok(&self) -> bool {
        (0..self.grid.num_rhombi()).all(|rho| !self.flat[rho] || self.rhombus_ok(rho, true))
    }
}

/// A shortest `f`-hive preserving proper cycle, found by iterative deepening over simple
/// turn cycles. Such a cycle is always `f`-secure; a violation is reported as an error.
pub fn find_secure_cycle(f: &FlowClass<i64>) -> Result<Option<GCycle>> {
    if let Some(rho) = f.negative_rhombus() {
        return Err(Error::NotHiveFlow(rho));
    }
    let g = f.grid();
    let nt = g.num_triangles();
    let mut tri_rhombi = vec![Vec::new(); nt];
    for (rho, r) in g.rhombi().iter().enumerate() {
        tri_rhombi[r.upright].push(rho);
        tri_rhombi[r.downright].push(rho);
    }
    let flat: Vec<bool> = (0..g.num_rhombi()).map(|rho| f.slack(rho) == 0).collect();
    let interior_nbrs = |t: usize| -> Vec<usize> {
        g.triangle_sides(t).iter().filter_map(|&e| g.across(t, e)).collect()
    };
    for len in (2..=nt).step_by(2) {
        for start in 0..nt {
            // distances to start within triangles >= start
            let mut dist = vec![usize::MAX / 2; nt];
            dist[start] = 0;
            let mut q = VecDeque::from([start]);
            while let Some(t) = q.pop_front() {
                for u in interior_nbrs(t) {
                    if u >= start && dist[u] > dist[t] + 1 {
                        dist[u] = dist[t] + 1;
                        q.push_back(u);
                    }
                }
            }
            for k in 6 * start..6 * start + 6 {
                let t = g.turn(k);
                if g.is_border(t.in_edge) || g.is_border(t.out_edge) {
                    continue;
                }
                let mut s = CycleSearch {
                    grid: g,
                    flat: flat.clone(),
                    tri_rhombi: tri_rhombi.clone(),
                    chosen: vec![None; nt],
                    path: vec![k],
                    start,
                    dist: dist.clone(),
                };
                s.chosen[start] = Some(k);
                if let Some(turns) = s.dfs(len) {
                    if turns.len() != len {
                        continue;
                    }
                    let c = GCycle::from_turns(g, &turns).expect("search yields simple proper cycles");
                    debug_assert!(is_f_hive_preserving(f, &c));
                    if !is_f_secure(f, &c) {
                        return Err(Error::Inconsistent("a shortest hive preserving cycle is not secure".into()));
                    }
                    return Ok(Some(c));
                }
            }
        }
    }
    Ok(None)
}

/// `P_Z` with `f ~ g` iff `g - f` is a single proper cycle.
#[derive(Debug, Clone)]
pub struct PzGraph {
    pub points: Vec<FlowClass<i64>>,
    /// `(i, j)` with `i < j`.
    pub edges: Vec<(usize, usize)>,
    /// Edges whose difference failed the security test from either endpoint.
    pub insecure: Vec<(usize, usize)>,
}

impl PzGraph {
    pub fn neighbours(&self, i: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| if a == i { Some(b) } else if b == i { Some(a) } else { None })
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.points.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.points.len()];
        seen[0] = true;
        let mut q = VecDeque::from([0]);
        while let Some(i) = q.pop_front() {
            for j in self.neighbours(i) {
                if !std::mem::replace(&mut seen[j], true) {
                    q.push_back(j);
                }
            }
        }
        seen.into_iter().all(|x| x)
    }
}

pub fn build_pz_graph(points: Vec<FlowClass<i64>>) -> Result<PzGraph> {
    let mut edges = Vec::new();
    let mut insecure = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = points[j].add_scaled(&points[i], -1)?;
            let Some(c) = GCycle::from_flow(&d) else { continue };
            edges.push((i, j));
            let back = GCycle::from_flow(&d.scaled(-1)).expect("reversed cycle");
            if !is_f_secure(&points[i], &c) || !is_f_secure(&points[j], &back) {
                insecure.push((i, j));
            }
        }
    }
    Ok(PzGraph { points, edges, insecure })
}

/// `c = 1`, decided from the solver's witness: true iff it admits no hive preserving cycle.
pub fn multiplicity_free(inst: &Instance) -> Result<bool> {
    let report = decide_scaling::<i64>(inst)?;
    if !report.positive {
        return Err(Error::NotPositive);
    }
    Ok(find_secure_cycle(&report.final_flow)?.is_none())
}
