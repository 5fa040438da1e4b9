//! Flow classes on the honeycomb graph, stored as throughput vectors on the triangular graph.

use crate::error::{Error, Result};
use crate::grid::{Contribution, Side, TriangleGrid};
use crate::partition::Instance;
use crate::scalar::Int;
use std::sync::Arc;

/// Integral throughput function: `delta[e]` is the net flow into the upright triangle
/// containing edge `e`. Closed on every hive triangle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowClass<T> {
    grid: Arc<TriangleGrid>,
    delta: Vec<T>,
}

impl<T: std::hash::Hash> std::hash::Hash for FlowClass<T> {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.grid.n().hash(state);
        self.delta.hash(state);
    }
}

/// Border capacities `b(k)` together with the target `|nu|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapacityMap<T> {
    grid: Arc<TriangleGrid>,
    caps: Vec<Option<T>>,
    target: T,
}

impl<T: Int> CapacityMap<T> {
    /// Capacities for `inst`; the instance's `n` must match the grid.
    pub fn new(grid: &Arc<TriangleGrid>, inst: &Instance) -> Result<Self> {
        if inst.n() != grid.n() {
            return Err(Error::GridMismatch(inst.n(), grid.n()));
        }
        let conv = |x: u64| T::from_u64(x).ok_or(Error::Overflow { limit: x });
        let mut caps = vec![None; grid.num_edges()];
        for e in grid.border_edges() {
            let b = grid.border(e).expect("border edge");
            let part = match b.side {
                Side::Right => &inst.lambda,
                Side::Bottom => &inst.mu,
                Side::Left => &inst.nu,
            };
            caps[e] = Some(conv(part.get(b.index - 1))?);
        }
        Ok(CapacityMap { grid: grid.clone(), caps, target: conv(inst.target())? })
    }

    pub fn grid(&self) -> &Arc<TriangleGrid> {
        &self.grid
    }

    pub fn cap(&self, e: usize) -> Option<T> {
        self.caps[e]
    }

    /// `|nu|`, the largest achievable overall throughput.
    pub fn target(&self) -> T {
        self.target
    }

    /// Remaining room at border edge `e` before it saturates under `f`.
    pub fn residual(&self, f: &FlowClass<T>, e: usize) -> Option<T> {
        let b = self.caps[e]?;
        let used = match self.grid.border(e)?.side {
            Side::Left => -f.delta[e],
            _ => f.delta[e],
        };
        Some(b - used)
    }
}

/// A vertex of the honeycomb graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GNode {
    Source,
    Sink,
    /// Midpoint of an edge of the triangular graph.
    White(usize),
    /// Center of a hive triangle.
    Black(usize),
}

/// A walk in the honeycomb graph produced by [`FlowClass::decompose`]. Closed walks repeat
/// their first node at the end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk {
    pub nodes: Vec<GNode>,
}

impl Walk {
    /// The turns `(triangle, entry edge, exit edge)` traversed by the walk.
    pub fn turns(&self, grid: &TriangleGrid) -> Vec<usize> {
        let mut nodes = self.nodes.clone();
        if self.is_closed() {
            // rotate so the walk starts at a white vertex, keeping the wrap-around turn
            let mut open: Vec<GNode> = nodes[..nodes.len() - 1].to_vec();
            if let Some(p) = open.iter().position(|v| matches!(v, GNode::White(_))) {
                open.rotate_left(p);
            }
            open.push(open[0]);
            nodes = open;
        }
        nodes
            .windows(3)
            .filter_map(|w| match *w {
                [GNode::White(a), GNode::Black(t), GNode::White(b)] => Some(grid.turn_of(t, a, b)),
                _ => None,
            })
            .collect()
    }

    pub fn is_closed(&self) -> bool {
        self.nodes.len() > 1 && self.nodes.first() == self.nodes.last()
    }
}

fn check_same_grid(a: &TriangleGrid, b: &TriangleGrid) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::GridMismatch(a.n(), b.n()));
    }
    Ok(())
}

impl<T: Int> FlowClass<T> {
    pub fn zero(grid: &Arc<TriangleGrid>) -> Self {
        FlowClass { grid: grid.clone(), delta: vec![T::zero(); grid.num_edges()] }
    }

    /// Validates length and closedness.
    pub fn from_delta(grid: &Arc<TriangleGrid>, delta: Vec<T>) -> Result<Self> {
        if delta.len() != grid.num_edges() {
            return Err(Error::WrongLength { expected: grid.num_edges(), got: delta.len() });
        }
        let f = FlowClass { grid: grid.clone(), delta };
        match f.closedness_violation() {
            Some(t) => Err(Error::NotClosed(t)),
            None => Ok(f),
        }
    }

    /// No closedness check; for building deliberately broken inputs.
    pub fn from_delta_unchecked(grid: &Arc<TriangleGrid>, delta: Vec<T>) -> Self {
        assert_eq!(delta.len(), grid.num_edges());
        FlowClass { grid: grid.clone(), delta }
    }

    pub fn grid(&self) -> &Arc<TriangleGrid> {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn delta(&self, e: usize) -> T {
        self.delta[e]
    }

    pub fn deltas(&self) -> &[T] {
        &self.delta
    }

    pub(crate) fn deltas_mut(&mut self) -> &mut [T] {
        &mut self.delta
    }

    pub fn into_deltas(self) -> Vec<T> {
        self.delta
    }

    /// Net flow into triangle `tri` through its side `e`.
    pub fn inflow(&self, tri: usize, e: usize) -> T {
        if self.grid.is_upright(tri) {
            self.delta[e]
        } else {
            -self.delta[e]
        }
    }

    /// First triangle whose inflows do not sum to zero.
    pub fn closedness_violation(&self) -> Option<usize> {
        (0..self.grid.num_triangles()).find(|&t| {
            let [a, b, c] = self.grid.triangle_sides(t);
            self.delta[a] + self.delta[b] + self.delta[c] != T::zero()
        })
    }

    pub fn is_closed(&self) -> bool {
        self.closedness_violation().is_none()
    }

    /// Slack of rhombus `rho`: flow leaving through the upper-left side plus flow leaving
    /// through the lower-right side.
    pub fn slack(&self, rho: usize) -> T {
        let r = self.grid.rhombus(rho);
        let s = self.delta[r.lr] - self.delta[r.ul];
        debug_assert!(
            !self.is_closed_at(rho) || self.slack_forms(rho).iter().all(|&x| x == s),
            "slack forms disagree on rhombus {rho}"
        );
        s
    }

    fn is_closed_at(&self, rho: usize) -> bool {
        let r = self.grid.rhombus(rho);
        let sum = |t: usize| self.grid.triangle_sides(t).iter().fold(T::zero(), |a, &e| a + self.delta[e]);
        sum(r.upright).is_zero() && sum(r.downright).is_zero()
    }

    /// Four expressions for the slack that coincide whenever the flow is closed.
    pub fn slack_forms(&self, rho: usize) -> [T; 4] {
        let r = self.grid.rhombus(rho);
        let d = |e: usize| self.delta[e];
        [
            d(r.lr) - d(r.ul),
            d(r.ur) - d(r.ll),
            -d(r.ul) - d(r.ll) - d(r.diag),
            d(r.ur) + d(r.lr) + d(r.diag),
        ]
    }

    pub fn slacks(&self) -> Vec<T> {
        (0..self.grid.num_rhombi()).map(|r| self.slack(r)).collect()
    }

    pub fn negative_rhombus(&self) -> Option<usize> {
        (0..self.grid.num_rhombi()).find(|&r| self.slack(r) < T::zero())
    }

    pub fn is_hive_flow(&self) -> bool {
        self.negative_rhombus().is_none()
    }

    /// Border bounds only: `0 <= delta <= b` on the right and bottom, `0 <= -delta <= b` on the left.
    pub fn within_borders(&self, caps: &CapacityMap<T>) -> bool {
        self.grid.border_edges().all(|e| {
            let b = caps.cap(e).expect("capacity on border edge");
            let r = caps.residual(self, e).expect("capacity on border edge");
            r >= T::zero() && r <= b
        })
    }

    pub fn in_b(&self, caps: &CapacityMap<T>) -> bool {
        self.grid.n() == caps.grid().n() && self.is_closed() && self.within_borders(caps) && self.is_hive_flow()
    }

    pub fn in_p(&self, caps: &CapacityMap<T>) -> bool {
        self.in_b(caps) && self.grid.border_edges().all(|e| caps.residual(self, e) == Some(T::zero()))
    }

    /// Flow entering through the right and bottom borders; equals the flow leaving
    /// through the left border.
    pub fn overall_throughput(&self) -> Result<T> {
        let (mut inward, mut outward) = (T::zero(), T::zero());
        for e in self.grid.border_edges() {
            match self.grid.border(e).expect("border edge").side {
                Side::Left => outward = outward - self.delta[e],
                _ => inward = inward + self.delta[e],
            }
        }
        if inward != outward {
            return Err(Error::Inconsistent(format!(
                "border sums differ: {inward} in, {outward} out"
            )));
        }
        Ok(inward)
    }

    pub fn norm(&self) -> T {
        self.delta.iter().fold(T::zero(), |acc, d| acc + d.abs())
    }

    pub fn distance(&self, other: &FlowClass<T>) -> Result<T> {
        Ok(other.add_scaled(self, -T::one())?.norm())
    }

    /// `self + s * d`.
    pub fn add_scaled(&self, d: &FlowClass<T>, s: T) -> Result<FlowClass<T>> {
        let mut out = self.clone();
        out.add_scaled_in_place(d, s)?;
        Ok(out)
    }

    pub fn add_scaled_in_place(&mut self, d: &FlowClass<T>, s: T) -> Result<()> {
        check_same_grid(&self.grid, &d.grid)?;
        for (x, &y) in self.delta.iter_mut().zip(&d.delta) {
            *x = *x + s * y;
        }
        Ok(())
    }

    pub fn scaled(&self, s: T) -> FlowClass<T> {
        FlowClass { grid: self.grid.clone(), delta: self.delta.iter().map(|&x| x * s).collect() }
    }

    /// Whether every throughput is a multiple of `m`.
    pub fn is_multiple_of(&self, m: T) -> bool {
        self.delta.iter().all(|&x| (x % m).is_zero())
    }

    pub fn cast<U: Int>(&self) -> Option<FlowClass<U>> {
        let delta = self.delta.iter().map(|&x| U::from(x)).collect::<Option<Vec<_>>>()?;
        Some(FlowClass { grid: self.grid.clone(), delta })
    }

    /// Whether the turn lies in the support of the reduced representative: flow enters
    /// its triangle through the entry edge and leaves through the exit edge.
    pub fn supports_turn(&self, k: usize) -> bool {
        let t = self.grid.turn(k);
        self.inflow(t.triangle, t.in_edge) > T::zero() && self.inflow(t.triangle, t.out_edge) < T::zero()
    }

    pub fn supports(&self, c: Contribution) -> bool {
        match c {
            Contribution::Turn(k) => self.supports_turn(k),
            Contribution::Pair(a, b) => self.supports_turn(a) && self.supports_turn(b),
        }
    }

    /// Signed edges of the reduced representative on the honeycomb graph.
    fn reduced_edges(&self) -> Vec<(GNode, GNode, T)> {
        let g = &self.grid;
        let mut out = Vec::new();
        for t in 0..g.num_triangles() {
            for e in g.triangle_sides(t) {
                let v = self.inflow(t, e);
                if v > T::zero() {
                    out.push((GNode::White(e), GNode::Black(t), v));
                } else if v < T::zero() {
                    out.push((GNode::Black(t), GNode::White(e), -v));
                }
            }
        }
        for e in g.border_edges() {
            let outer = match g.border(e).expect("border edge").side {
                Side::Left => GNode::Sink,
                _ => GNode::Source,
            };
            let d = self.delta[e];
            if d > T::zero() {
                out.push((outer, GNode::White(e), d));
            } else if d < T::zero() {
                out.push((GNode::White(e), outer, -d));
            }
        }
        out
    }

    /// Splits the reduced representative into weighted walks from `Source` or `Sink`
    /// and closed walks, whose weighted turn sum projects back to `self`.
    pub fn decompose(&self) -> Vec<(Walk, T)> {
        use std::collections::BTreeMap;
        let mut adj: BTreeMap<GNode, Vec<(GNode, T)>> = BTreeMap::new();
        for (a, b, w) in self.reduced_edges() {
            adj.entry(a).or_default().push((b, w));
        }
        let mut out = Vec::new();
        loop {
            let start = [GNode::Source, GNode::Sink]
                .into_iter()
                .find(|v| adj.get(v).is_some_and(|l| !l.is_empty()))
                .or_else(|| adj.iter().find(|(_, l)| !l.is_empty()).map(|(v, _)| *v));
            let Some(start) = start else { break };
            let mut nodes = vec![start];
            let mut pos: BTreeMap<GNode, usize> = BTreeMap::from([(start, 0)]);
            let walk = loop {
                let cur = *nodes.last().expect("nonempty walk");
                let next = adj.get(&cur).and_then(|l| l.first()).map(|&(v, _)| v);
                let Some(next) = next else { break nodes.clone() };
                if let Some(&p) = pos.get(&next) {
                    let mut cyc = nodes[p..].to_vec();
                    cyc.push(next);
                    break cyc;
                }
                pos.insert(next, nodes.len());
                nodes.push(next);
                if matches!(next, GNode::Source | GNode::Sink) {
                    break nodes.clone();
                }
            };
            let edge_weight = |adj: &BTreeMap<GNode, Vec<(GNode, T)>>, a: GNode, b: GNode| {
                adj[&a].iter().find(|(v, _)| *v == b).map(|&(_, w)| w).expect("edge present")
            };
            let w = walk
                .windows(2)
                .map(|p| edge_weight(&adj, p[0], p[1]))
                .min()
                .expect("walk has an edge");
            for p in walk.windows(2) {
                let list = adj.get_mut(&p[0]).expect("edge present");
                let i = list.iter().position(|(v, _)| *v == p[1]).expect("edge present");
                list[i].1 = list[i].1 - w;
                if list[i].1.is_zero() {
                    list.remove(i);
                }
            }
            out.push((Walk { nodes: walk }, w));
        }
        out
    }
}
