//! The turn digraph `R`, its residual subgraphs `R_f` and `R_f^l`, shortest turnpaths,
//! and the projection of turn flows to flow classes.

use crate::error::{Error, Result};
use crate::flow::{CapacityMap, FlowClass};
use crate::grid::{Contribution, Link, Side, TriangleGrid};
use crate::scalar::Int;
use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Source,
    Sink,
    Turn(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Full,
    Flow,
    /// Gates also need room for an augmentation by `2^l`.
    Scaled(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PathKind {
    SourceToSink,
    SinkToSource,
    Cycle,
}

/// A sequence of turnvertices; the source/sink endpoints are implied by `kind`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TurnPath {
    pub turns: Vec<usize>,
    pub kind: PathKind,
}

impl TurnPath {
    pub fn st(turns: Vec<usize>) -> Self {
        TurnPath { turns, kind: PathKind::SourceToSink }
    }

    /// Number of digraph edges, counting the source and sink gates.
    pub fn len_edges(&self) -> usize {
        match self.kind {
            PathKind::Cycle => self.turns.len(),
            _ => self.turns.len() + 1,
        }
    }

    /// Consecutive turn pairs (turnedges), wrapping around for cycles.
    pub fn turnedges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = self.turns.windows(2).map(|w| (w[0], w[1])).collect();
        if self.kind == PathKind::Cycle && self.turns.len() > 1 {
            out.push((self.turns[self.turns.len() - 1], self.turns[0]));
        }
        out
    }
}

/// `R` with deletions applied as filters over the grid's static turn tables.
#[derive(Debug, Clone)]
pub struct ResidualDigraph {
    grid: Arc<TriangleGrid>,
    mode: Mode,
    deleted_turns: Vec<bool>,
    /// Two slots per turn, one per continuation turn of [`TriangleGrid::next`].
    deleted_edges: Vec<bool>,
    closed_gates: Vec<bool>,
}

/// Reusable buffers for breadth-first search.
#[derive(Debug, Default, Clone)]
pub struct BfsScratch {
    stamp: u32,
    seen: Vec<u32>,
    parent: Vec<usize>,
    queue: VecDeque<usize>,
}

const FROM_SOURCE: usize = usize::MAX;

/// The full digraph `R`.
pub fn build_r(grid: &Arc<TriangleGrid>) -> ResidualDigraph {
    let k = grid.num_turns();
    ResidualDigraph {
        grid: grid.clone(),
        mode: Mode::Full,
        deleted_turns: vec![false; k],
        deleted_edges: vec![false; 2 * k],
        closed_gates: vec![false; grid.num_edges()],
    }
}

/// `R_f`: drops negative slack contributions of `f`-flat rhombi and the gates at
/// saturated border edges.
pub fn restrict_to_f<T: Int>(f: &FlowClass<T>, caps: &CapacityMap<T>) -> Result<ResidualDigraph> {
    if !f.in_b(caps) {
        return Err(Error::NotInB);
    }
    let mut d = build_r(f.grid());
    d.refresh(f, caps, Mode::Flow);
    Ok(d)
}

/// `R_f^l`: additionally closes gates with less than `2^l` residual capacity.
pub fn restrict_scaled<T: Int>(f: &FlowClass<T>, caps: &CapacityMap<T>, ell: u32) -> Result<ResidualDigraph> {
    let step = T::pow2(ell).ok_or(Error::Overflow { limit: u64::MAX })?;
    if !f.is_multiple_of(step) {
        return Err(Error::NotIntegral(1u64 << ell.min(63)));
    }
    if !f.in_b(caps) {
        return Err(Error::NotInB);
    }
    let mut d = build_r(f.grid());
    d.refresh(f, caps, Mode::Scaled(ell));
    Ok(d)
}

impl ResidualDigraph {
    pub fn grid(&self) -> &Arc<TriangleGrid> {
        &self.grid
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Recomputes deletions for `f` in place, without validating `f`.
    pub fn refresh<T: Int>(&mut self, f: &FlowClass<T>, caps: &CapacityMap<T>, mode: Mode) {
        self.mode = mode;
        self.deleted_turns.fill(false);
        self.deleted_edges.fill(false);
        self.closed_gates.fill(false);
        if mode == Mode::Full {
            return;
        }
        let g = self.grid.clone();
        for rho in 0..g.num_rhombi() {
            if !f.slack(rho).is_zero() {
                continue;
            }
            for &c in &g.rhombus(rho).contributions.negative {
                match c {
                    Contribution::Turn(k) => self.deleted_turns[k] = true,
                    Contribution::Pair(a, b) => {
                        let slot = self.edge_slot(a, b);
                        self.deleted_edges[slot] = true;
                    }
                }
            }
        }
        let need = match mode {
            Mode::Scaled(ell) => T::pow2(ell).unwrap_or_else(T::max_value),
            _ => T::one(),
        };
        for e in g.border_edges() {
            let room = caps.residual(f, e).expect("capacity on border edge");
            self.closed_gates[e] = room < need;
        }
    }

    fn edge_slot(&self, a: usize, b: usize) -> usize {
        match self.grid.next(a) {
            Link::Turns([x, _]) if x == b => 2 * a,
            Link::Turns([_, y]) if y == b => 2 * a + 1,
            _ => panic!("turns {a} and {b} are not concatenable"),
        }
    }

    pub fn has_turn(&self, k: usize) -> bool {
        !self.deleted_turns[k]
    }

    pub fn gate_open(&self, e: usize) -> bool {
        self.grid.is_border(e) && !self.closed_gates[e]
    }

    pub fn has_turnedge(&self, a: usize, b: usize) -> bool {
        self.grid.concatenable(a, b) && self.has_turn(a) && self.has_turn(b) && !self.deleted_edges[self.edge_slot(a, b)]
    }

    fn is_gate_side(&self, e: usize, left: bool) -> bool {
        self.grid.border(e).is_some_and(|b| (b.side == Side::Left) == left) && !self.closed_gates[e]
    }

    pub fn has_edge(&self, u: Node, v: Node) -> bool {
        let g = &self.grid;
        match (u, v) {
            (Node::Turn(a), Node::Turn(b)) => self.has_turnedge(a, b),
            (Node::Source, Node::Turn(k)) => self.has_turn(k) && self.is_gate_side(g.turn(k).in_edge, false),
            (Node::Turn(k), Node::Source) => self.has_turn(k) && self.is_gate_side(g.turn(k).out_edge, false),
            (Node::Sink, Node::Turn(k)) => self.has_turn(k) && self.is_gate_side(g.turn(k).in_edge, true),
            (Node::Turn(k), Node::Sink) => self.has_turn(k) && self.is_gate_side(g.turn(k).out_edge, true),
            _ => false,
        }
    }

    /// Out-neighbours in grid order.
    pub fn successors(&self, u: Node) -> Vec<Node> {
        let g = &self.grid;
        match u {
            Node::Source | Node::Sink => {
                let left = u == Node::Sink;
                let mut out: Vec<Node> = g
                    .border_edges()
                    .filter(|&e| self.is_gate_side(e, left))
                    .flat_map(|e| g.turns_from(g.edge_triangles(e).0, e))
                    .filter(|&k| self.has_turn(k))
                    .map(Node::Turn)
                    .collect();
                out.sort();
                out
            }
            Node::Turn(k) if !self.has_turn(k) => Vec::new(),
            Node::Turn(k) => match g.next(k) {
                Link::Turns(next) => next.into_iter().filter(|&b| self.has_turnedge(k, b)).map(Node::Turn).collect(),
                Link::Source if self.is_gate_side(g.turn(k).out_edge, false) => vec![Node::Source],
                Link::Target if self.is_gate_side(g.turn(k).out_edge, true) => vec![Node::Sink],
                _ => Vec::new(),
            },
        }
    }

    pub fn edges(&self) -> Vec<(Node, Node)> {
        let nodes = [Node::Source, Node::Sink].into_iter().chain((0..self.grid.num_turns()).map(Node::Turn));
        nodes.flat_map(|u| self.successors(u).into_iter().map(move |v| (u, v))).collect()
    }

    /// A shortest source-to-sink turnpath, found by breadth-first search.
    pub fn shortest_st_turnpath(&self) -> Option<TurnPath> {
        self.shortest_st_turnpath_with(&mut BfsScratch::default())
    }

    pub fn shortest_st_turnpath_with(&self, s: &mut BfsScratch) -> Option<TurnPath> {
        let g = &self.grid;
        let k = g.num_turns();
        if s.seen.len() != k {
            s.seen = vec![0; k];
            s.parent = vec![0; k];
            s.stamp = 0;
        }
        s.stamp = s.stamp.wrapping_add(1);
        if s.stamp == 0 {
            s.seen.fill(0);
            s.stamp = 1;
        }
        let stamp = s.stamp;
        s.queue.clear();
        for v in self.successors(Node::Source) {
            let Node::Turn(t) = v else { continue };
            s.seen[t] = stamp;
            s.parent[t] = FROM_SOURCE;
            s.queue.push_back(t);
        }
        while let Some(a) = s.queue.pop_front() {
            match g.next(a) {
                Link::Target => {
                    if !self.closed_gates[g.turn(a).out_edge] {
                        let mut turns = vec![a];
                        let mut cur = a;
                        while s.parent[cur] != FROM_SOURCE {
                            cur = s.parent[cur];
                            turns.push(cur);
                        }
                        turns.reverse();
                        return Some(TurnPath::st(turns));
                    }
                }
                Link::Source => {}
                Link::Turns(next) => {
                    for (j, b) in next.into_iter().enumerate() {
                        if s.seen[b] != stamp && !self.deleted_turns[b] && !self.deleted_edges[2 * a + j] {
                            s.seen[b] = stamp;
                            s.parent[b] = a;
                            s.queue.push_back(b);
                        }
                    }
                }
            }
        }
        None
    }

    /// Whether `p` is a simple path or cycle of this digraph.
    pub fn contains_path(&self, p: &TurnPath) -> bool {
        let distinct: HashSet<_> = p.turns.iter().collect();
        if distinct.len() != p.turns.len() || p.turns.is_empty() {
            return false;
        }
        let ends_ok = match p.kind {
            PathKind::SourceToSink => {
                self.has_edge(Node::Source, Node::Turn(p.turns[0]))
                    && self.has_edge(Node::Turn(*p.turns.last().unwrap()), Node::Sink)
            }
            PathKind::SinkToSource => {
                self.has_edge(Node::Sink, Node::Turn(p.turns[0]))
                    && self.has_edge(Node::Turn(*p.turns.last().unwrap()), Node::Source)
            }
            PathKind::Cycle => true,
        };
        ends_ok && p.turnedges().iter().all(|&(a, b)| self.has_turnedge(a, b))
    }
}

/// Projection of a weighted multiset of turns: each turn of an upright triangle carries
/// its weight into that triangle through the entry edge and out through the exit edge.
/// Turns of downright triangles are accounted for by their upright neighbours.
pub fn project_turns<T: Int>(grid: &Arc<TriangleGrid>, turns: impl IntoIterator<Item = (usize, T)>) -> FlowClass<T> {
    let mut delta = vec![T::zero(); grid.num_edges()];
    for (k, w) in turns {
        let t = grid.turn(k);
        if grid.is_upright(t.triangle) {
            delta[t.in_edge] = delta[t.in_edge] + w;
            delta[t.out_edge] = delta[t.out_edge] - w;
        }
    }
    FlowClass::from_delta_unchecked(grid, delta)
}

pub fn project<T: Int>(grid: &Arc<TriangleGrid>, p: &TurnPath) -> FlowClass<T> {
    project_turns(grid, p.turns.iter().map(|&k| (k, T::one())))
}

/// Projection of an integer-weighted family of turnpaths.
pub fn project_weighted<T: Int>(grid: &Arc<TriangleGrid>, paths: &[(TurnPath, T)]) -> FlowClass<T> {
    project_turns(grid, paths.iter().flat_map(|(p, w)| p.turns.iter().map(move |&k| (k, *w))))
}

/// Positive minus negative slack contributions used by `p` in rhombus `rho`.
pub fn turnpath_slack(grid: &TriangleGrid, p: &TurnPath, rho: usize) -> i64 {
    let turns: HashSet<usize> = p.turns.iter().copied().collect();
    let pairs: HashSet<(usize, usize)> = p.turnedges().into_iter().collect();
    let used = |c: &Contribution| match *c {
        Contribution::Turn(k) => turns.contains(&k),
        Contribution::Pair(a, b) => pairs.contains(&(a, b)),
    };
    let t = &grid.rhombus(rho).contributions;
    t.positive.iter().filter(|c| used(c)).count() as i64 - t.negative.iter().filter(|c| used(c)).count() as i64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::Instance;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(n: usize) -> Arc<TriangleGrid> {
        Arc::new(TriangleGrid::new(n).unwrap())
    }

    /// Random simple source-to-sink path by randomized depth-first search.
    pub(crate) fn random_st_path(d: &ResidualDigraph, rng: &mut ChaCha8Rng) -> Option<TurnPath> {
        fn go(d: &ResidualDigraph, rng: &mut ChaCha8Rng, path: &mut Vec<usize>, seen: &mut HashSet<usize>) -> bool {
            let cur = *path.last().unwrap();
            let mut next = d.successors(Node::Turn(cur));
            for i in (1..next.len()).rev() {
                next.swap(i, rng.gen_range(0..=i));
            }
            for v in next {
                match v {
                    Node::Sink => return true,
                    Node::Turn(b) if !seen.contains(&b) => {
                        seen.insert(b);
                        path.push(b);
                        if go(d, rng, path, seen) {
                            return true;
                        }
                        path.pop();
                    }
                    _ => {}
                }
            }
            false
        }
        let mut starts = d.successors(Node::Source);
        for i in (1..starts.len()).rev() {
            starts.swap(i, rng.gen_range(0..=i));
        }
        for s in starts {
            let Node::Turn(s) = s else { continue };
            let mut path = vec![s];
            let mut seen = HashSet::from([s]);
            if go(d, rng, &mut path, &mut seen) {
                return Some(TurnPath::st(path));
            }
        }
        None
    }

    #[test]
    fn single_triangle() {
        let g = grid(1);
        let r = build_r(&g);
        assert_eq!(r.successors(Node::Source).len(), 4);
        assert_eq!(r.successors(Node::Sink).len(), 2);
        let edges = r.edges();
        let into_source = edges.iter().filter(|(_, v)| *v == Node::Source).count();
        let into_sink = edges.iter().filter(|(_, v)| *v == Node::Sink).count();
        assert_eq!((into_source, into_sink), (4, 2));
        assert_eq!(edges.len(), 12);
    }

    /// Each interior edge is crossed by the two turns arriving on one side times the two
    /// leaving on the other, in both directions.
    #[test]
    fn turnedges_per_interior_edge() {
        for n in 1..=4 {
            let g = grid(n);
            let r = build_r(&g);
            let mut count = vec![0; g.num_edges()];
            for (u, v) in r.edges() {
                if let (Node::Turn(a), Node::Turn(_)) = (u, v) {
                    count[g.turn(a).out_edge] += 1;
                }
            }
            for e in 0..g.num_edges() {
                assert_eq!(count[e], if g.is_border(e) { 0 } else { 8 });
            }
            // four gate edges per border edge
            for e in g.border_edges() {
                let gates = r
                    .edges()
                    .into_iter()
                    .filter(|&(u, v)| match (u, v) {
                        (Node::Turn(k), Node::Source | Node::Sink) => g.turn(k).out_edge == e,
                        (Node::Source | Node::Sink, Node::Turn(k)) => g.turn(k).in_edge == e,
                        _ => false,
                    })
                    .count();
                assert_eq!(gates, 4);
            }
        }
    }

    /// Apart from the gate pair at the corner turn from the last right-border edge to the
    /// first bottom-border edge, no edge of R appears together with its reverse.
    #[test]
    fn no_antiparallel_edges_except_corner() {
        for n in 1..=4 {
            let g = grid(n);
            let edges: HashSet<_> = build_r(&g).edges().into_iter().collect();
            let right = g.border_edge(Side::Right, n).unwrap();
            let bottom = g.border_edge(Side::Bottom, 1).unwrap();
            let corner = g.edge_triangles(right).0;
            let both: Vec<_> = edges.iter().filter(|&&(u, v)| u < v && edges.contains(&(v, u))).collect();
            let exempt = [g.turn_of(corner, right, bottom), g.turn_of(corner, bottom, right)];
            for &&(u, v) in &both {
                assert_eq!(u, Node::Source);
                assert!(matches!(v, Node::Turn(k) if exempt.contains(&k)), "{u:?} {v:?}");
            }
            assert_eq!(both.len(), 2);
        }
    }

    #[test]
    fn zero_caps_block_everything() {
        let g = grid(3);
        let caps = CapacityMap::new(&g, &Instance::parse("0,0,0", "", "").unwrap()).unwrap();
        let r = restrict_to_f(&FlowClass::<i64>::zero(&g), &caps).unwrap();
        assert!(r.shortest_st_turnpath().is_none());
    }

    #[test]
    fn zero_flow_removes_all_negative_contributions() {
        let g = grid(2);
        let caps = CapacityMap::new(&g, &Instance::parse("1,0", "1,0", "1,1").unwrap()).unwrap();
        let r = restrict_to_f(&FlowClass::<i64>::zero(&g), &caps).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let p = random_st_path(&r, &mut rng).unwrap();
            for (rho, rh) in g.rhombi().iter().enumerate() {
                for c in rh.contributions.negative {
                    match c {
                        Contribution::Turn(k) => assert!(!p.turns.contains(&k)),
                        Contribution::Pair(a, b) => assert!(!p.turnedges().contains(&(a, b))),
                    }
                }
                assert!(turnpath_slack(&g, &p, rho) >= 0);
            }
        }
    }

    #[test]
    fn scaled_gates() {
        let g = grid(3);
        let inst = Instance::parse("4", "", "4").unwrap();
        let inst = Instance::with_n(inst.lambda, inst.mu, inst.nu, 3).unwrap();
        let caps = CapacityMap::new(&g, &inst).unwrap();
        let f = FlowClass::<i64>::zero(&g);
        let r = restrict_scaled(&f, &caps, 2).unwrap();
        assert!(r.gate_open(g.border_edge(Side::Left, 1).unwrap()));
        for i in 2..=3 {
            assert!(!r.gate_open(g.border_edge(Side::Left, i).unwrap()));
        }
        let r3 = restrict_scaled(&f, &caps, 3).unwrap();
        assert!((1..=3).all(|i| !r3.gate_open(g.border_edge(Side::Left, i).unwrap())));
        assert!(r3.shortest_st_turnpath().is_none());
        let r0 = restrict_scaled(&f, &caps, 0).unwrap();
        let rf = restrict_to_f(&f, &caps).unwrap();
        assert_eq!(r0.edges(), rf.edges());
        let odd = project::<i64>(&g, &rf.shortest_st_turnpath().unwrap());
        assert_eq!(restrict_scaled(&odd, &caps, 1).unwrap_err(), Error::NotIntegral(2));
    }

    #[test]
    fn single_triangle_path() {
        let g = grid(1);
        let caps = CapacityMap::new(&g, &Instance::parse("1", "", "1").unwrap()).unwrap();
        let p = restrict_to_f(&FlowClass::<i64>::zero(&g), &caps).unwrap().shortest_st_turnpath().unwrap();
        assert_eq!(p.turns.len(), 1);
        assert_eq!(p.len_edges(), 2);
        let t = g.turn(p.turns[0]);
        assert_eq!(g.border(t.in_edge).unwrap().side, Side::Right);
        assert_eq!(g.border(t.out_edge).unwrap().side, Side::Left);
        let f = project::<i64>(&g, &p);
        assert_eq!(f.overall_throughput(), Ok(1));
    }

    /// Exhaustive layering: no source-to-sink path is shorter than the one found.
    #[test]
    fn bfs_is_shortest() {
        fn shortest_by_layers(d: &ResidualDigraph) -> Option<usize> {
            let mut frontier: HashSet<Node> = HashSet::from([Node::Source]);
            let mut seen = frontier.clone();
            for len in 1..=d.grid().num_turns() + 1 {
                let next: HashSet<Node> = frontier.iter().flat_map(|&u| d.successors(u)).collect();
                if next.contains(&Node::Sink) {
                    return Some(len);
                }
                frontier = next.difference(&seen).copied().filter(|v| *v != Node::Source).collect();
                seen.extend(frontier.iter().copied());
                if frontier.is_empty() {
                    return None;
                }
            }
            None
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=3 {
            let g = grid(n);
            for _ in 0..40 {
                let nu: Vec<u64> = {
                    let mut v: Vec<u64> = (0..n).map(|_| rng.gen_range(0..4)).collect();
                    v.sort_unstable_by(|a, b| b.cmp(a));
                    v
                };
                let inst = Instance::with_n(crate::Partition::zero(), crate::Partition::new(nu.clone()).unwrap(), crate::Partition::new(nu).unwrap(), n).unwrap();
                let caps = CapacityMap::new(&g, &inst).unwrap();
                let r = restrict_to_f(&FlowClass::<i64>::zero(&g), &caps).unwrap();
                let p = r.shortest_st_turnpath();
                assert_eq!(p.as_ref().map(|p| p.len_edges()), shortest_by_layers(&r));
                if let Some(p) = p {
                    assert!(r.contains_path(&p));
                }
            }
        }
    }

    #[test]
    fn projections() {
        let g = grid(3);
        let empty: FlowClass<i64> = project_weighted(&g, &[]);
        assert_eq!(empty, FlowClass::zero(&g));
        let r = build_r(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let p = random_st_path(&r, &mut rng).unwrap();
            let f = project::<i64>(&g, &p);
            assert!(f.is_closed());
            assert_eq!(f.overall_throughput(), Ok(1));
            for rho in 0..g.num_rhombi() {
                let s = turnpath_slack(&g, &p, rho);
                assert_eq!(s, f.slack(rho));
                assert!((-4..=4).contains(&s));
            }
        }
    }

    #[test]
    fn turncycle_has_zero_throughput() {
        // the six turns around an interior vertex form a cycle
        let g = grid(3);
        let v = crate::grid::vertex_index(2, 1);
        let around: Vec<usize> = (0..g.num_turns()).filter(|&k| g.turn(k).corner == v && g.turn(k).clockwise).collect();
        assert_eq!(around.len(), 6);
        let mut cycle = vec![around[0]];
        while cycle.len() < 6 {
            let last = *cycle.last().unwrap();
            let next = around.iter().copied().find(|&b| g.concatenable(last, b)).unwrap();
            cycle.push(next);
        }
        assert!(g.concatenable(cycle[5], cycle[0]));
        let c = TurnPath { turns: cycle, kind: PathKind::Cycle };
        let f = project::<i64>(&g, &c);
        assert!(f.is_closed());
        assert_eq!(f.overall_throughput(), Ok(0));
        for rho in 0..g.num_rhombi() {
            assert_eq!(turnpath_slack(&g, &c, rho), f.slack(rho));
        }
    }
}
