//! Hives, their correspondence with flow classes, and flatspace decompositions.

use crate::error::{Error, Result};
use crate::flow::FlowClass;
use crate::grid::{vertex_index, Side, TriangleGrid};
use crate::partition::Instance;
use crate::scalar::Int;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Integer labels on the vertices with `h(top) = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HiveLabel<T> {
    grid: Arc<TriangleGrid>,
    values: Vec<T>,
}

impl<T: Int> HiveLabel<T> {
    pub fn new(grid: &Arc<TriangleGrid>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.num_vertices() {
            return Err(Error::WrongLength { expected: grid.num_vertices(), got: values.len() });
        }
        if !values[0].is_zero() {
            return Err(Error::Inconsistent("hive label at the top vertex must be 0".into()));
        }
        Ok(HiveLabel { grid: grid.clone(), values })
    }

    pub fn grid(&self) -> &Arc<TriangleGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn at(&self, m: usize, i: usize) -> T {
        self.values[vertex_index(m, i)]
    }

    /// Obtuse corners minus acute corners.
    pub fn slack(&self, rho: usize) -> T {
        let r = self.grid.rhombus(rho);
        let h = &self.values;
        h[r.left] + h[r.right] - h[r.top] - h[r.bottom]
    }

    pub fn is_hive(&self) -> bool {
        (0..self.grid.num_rhombi()).all(|r| self.slack(r) >= T::zero())
    }

    /// Vertices on the boundary of the big triangle, in index order.
    pub fn boundary_vertices(grid: &TriangleGrid) -> Vec<usize> {
        (0..grid.num_vertices())
            .filter(|&v| {
                let x = grid.vertex(v);
                x.i == 0 || x.i == x.m || x.m == grid.n()
            })
            .collect()
    }

    /// `min over the boundary <= h <= n * max over the boundary`.
    pub fn within_bounds(&self) -> bool {
        let b = Self::boundary_vertices(&self.grid);
        let lo = b.iter().map(|&v| self.values[v]).min().expect("nonempty boundary");
        let hi = b.iter().map(|&v| self.values[v]).max().expect("nonempty boundary");
        let n = T::from(self.grid.n()).expect("grid size fits");
        self.values.iter().all(|&x| x >= lo && x <= n * hi)
    }

    /// Coboundary: `delta(k) = h(head) - h(tail)` with upright triangles oriented clockwise.
    pub fn to_flow(&self) -> FlowClass<T> {
        let delta = self
            .grid
            .edges()
            .iter()
            .map(|e| {
                let (r, c) = (e.row, e.col);
                match e.side {
                    Side::Right => self.at(r + 1, c + 1) - self.at(r, c),
                    Side::Bottom => self.at(r + 1, c) - self.at(r + 1, c + 1),
                    Side::Left => self.at(r, c) - self.at(r + 1, c),
                }
            })
            .collect();
        FlowClass::from_delta_unchecked(&self.grid, delta)
    }

    /// Inverse of [`HiveLabel::to_flow`]: accumulates throughputs down the left border,
    /// then along each row.
    pub fn from_flow(f: &FlowClass<T>) -> Result<Self> {
        if let Some(t) = f.closedness_violation() {
            return Err(Error::NotClosed(t));
        }
        let g = f.grid();
        let e = |r, c, side| g.edge_index(crate::grid::EdgeId { row: r, col: c, side }).expect("edge in grid");
        let mut values = vec![T::zero(); g.num_vertices()];
        for m in 1..=g.n() {
            values[vertex_index(m, 0)] = values[vertex_index(m - 1, 0)] - f.delta(e(m - 1, 0, Side::Left));
            for i in 1..=m {
                values[vertex_index(m, i)] = values[vertex_index(m, i - 1)] - f.delta(e(m - 1, i - 1, Side::Bottom));
            }
        }
        if cfg!(debug_assertions) {
            // down the right border, then leftwards along each row
            let mut other = vec![T::zero(); g.num_vertices()];
            for m in 1..=g.n() {
                other[vertex_index(m, m)] = other[vertex_index(m - 1, m - 1)] + f.delta(e(m - 1, m - 1, Side::Right));
                for i in (0..m).rev() {
                    other[vertex_index(m, i)] = other[vertex_index(m, i + 1)] + f.delta(e(m - 1, i, Side::Bottom));
                }
            }
            debug_assert_eq!(values, other, "accumulation depends on the path");
        }
        Ok(HiveLabel { grid: g.clone(), values })
    }

    /// Boundary labels forced on every hive of the capacity-achieving polytope:
    /// partial sums of `lambda` down the right border, of `nu` down the left border,
    /// and `|lambda|` plus partial sums of `mu` leftwards along the bottom.
    pub fn forced_boundary(grid: &TriangleGrid, inst: &Instance) -> Result<Vec<Option<T>>> {
        let n = grid.n();
        let conv = |x: u64| T::from_u64(x).ok_or(Error::Overflow { limit: x });
        let mut out = vec![None; grid.num_vertices()];
        let (mut right, mut left) = (0u64, 0u64);
        out[0] = Some(T::zero());
        for m in 1..=n {
            right += inst.lambda.get(m - 1);
            left += inst.nu.get(m - 1);
            out[vertex_index(m, m)] = Some(conv(right)?);
            out[vertex_index(m, 0)] = Some(conv(left)?);
        }
        let mut bottom = inst.lambda.weight();
        for j in 1..n {
            bottom += inst.mu.get(j - 1);
            out[vertex_index(n, n - j)] = Some(conv(bottom)?);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    Triangle,
    Parallelogram,
    Trapezoid,
    Pentagon,
    Hexagon,
}

/// A maximal straight piece of a flatspace boundary, edges listed clockwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatSide {
    pub edges: Vec<usize>,
    pub on_border: bool,
    /// Flatspaces across this side, in clockwise order.
    pub neighbors: Vec<usize>,
}

impl FlatSide {
    pub fn entrance(&self) -> usize {
        self.edges[0]
    }

    pub fn exit(&self) -> usize {
        *self.edges.last().expect("sides are nonempty")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flatspace {
    pub triangles: Vec<usize>,
    pub shape: Shape,
    pub sides: Vec<FlatSide>,
    /// Boundary vertices in clockwise order.
    pub boundary: Vec<usize>,
}

impl Flatspace {
    /// The side containing edge `e`, if `e` is on the boundary.
    pub fn side_of(&self, e: usize) -> Option<usize> {
        self.sides.iter().position(|s| s.edges.contains(&e))
    }

    /// Triangles with at least one corner on the boundary.
    pub fn border_triangles(&self, grid: &TriangleGrid) -> Vec<usize> {
        self.triangles
            .iter()
            .copied()
            .filter(|&t| grid.triangle_vertices(t).iter().any(|v| self.boundary.contains(v)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flatspaces {
    pub spaces: Vec<Flatspace>,
    /// Flatspace index of every triangle.
    pub of_triangle: Vec<usize>,
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut x = x;
    while parent[x] != r {
        let next = parent[x];
        parent[x] = r;
        x = next;
    }
    r
}

/// Direction of the unit step `a -> b`, as a multiple of 60 degrees counterclockwise.
fn direction(grid: &TriangleGrid, a: usize, b: usize) -> usize {
    let (va, vb) = (grid.vertex(a), grid.vertex(b));
    match (vb.i as i64 - va.i as i64, vb.m as i64 - va.m as i64) {
        (1, 0) => 0,
        (0, -1) => 1,
        (-1, -1) => 2,
        (-1, 0) => 3,
        (0, 1) => 4,
        (1, 1) => 5,
        d => panic!("not a unit step: {d:?}"),
    }
}

/// Connected components of triangles glued along flat rhombi, with their shapes and
/// clockwise sides.
pub fn flatspaces<T: Int>(f: &FlowClass<T>) -> Result<Flatspaces> {
    if let Some(rho) = f.negative_rhombus() {
        return Err(Error::NotHiveFlow(rho));
    }
    let g = f.grid();
    let mut parent: Vec<usize> = (0..g.num_triangles()).collect();
    for (rho, r) in g.rhombi().iter().enumerate() {
        if f.slack(rho).is_zero() {
            let (a, b) = (find(&mut parent, r.upright), find(&mut parent, r.downright));
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut label: BTreeMap<usize, usize> = BTreeMap::new();
    let mut of_triangle = vec![0; g.num_triangles()];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for t in 0..g.num_triangles() {
        let root = find(&mut parent, t);
        let id = *label.entry(root).or_insert_with(|| {
            members.push(Vec::new());
            members.len() - 1
        });
        of_triangle[t] = id;
        members[id].push(t);
    }
    let mut spaces = Vec::with_capacity(members.len());
    for (id, tris) in members.into_iter().enumerate() {
        spaces.push(trace(g, id, tris, &of_triangle)?);
    }
    Ok(Flatspaces { spaces, of_triangle })
}

fn trace(g: &TriangleGrid, id: usize, triangles: Vec<usize>, of_triangle: &[usize]) -> Result<Flatspace> {
    // clockwise boundary steps: tail -> (head, edge)
    let mut step: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for &t in &triangles {
        let vs = g.triangle_vertices(t);
        for j in 0..3 {
            let (a, b) = (vs[j], vs[(j + 1) % 3]);
            let e = g.edge_between(a, b).expect("triangle side");
            if g.across(t, e).is_none_or(|o| of_triangle[o] != id) && step.insert(a, (b, e)).is_some() {
                return Err(Error::Inconsistent(format!("flatspace {id} is not convex")));
            }
        }
    }
    let start = *step.keys().next().expect("boundary is nonempty");
    let mut cycle = Vec::with_capacity(step.len());
    let mut v = start;
    loop {
        let (w, e) = step[&v];
        cycle.push((v, w, e));
        v = w;
        if v == start {
            break;
        }
    }
    if cycle.len() != step.len() {
        return Err(Error::Inconsistent(format!("flatspace {id} has a disconnected boundary")));
    }
    let dirs: Vec<usize> = cycle.iter().map(|&(a, b, _)| direction(g, a, b)).collect();
    let k = cycle.len();
    let first_corner = (0..k).find(|&j| dirs[j] != dirs[(j + k - 1) % k]).expect("polygon has corners");
    cycle.rotate_left(first_corner);
    let dirs: Vec<usize> = cycle.iter().map(|&(a, b, _)| direction(g, a, b)).collect();

    let mut sides: Vec<FlatSide> = Vec::new();
    let mut side_dirs = Vec::new();
    for (j, &(_, _, e)) in cycle.iter().enumerate() {
        if j == 0 || dirs[j] != dirs[j - 1] {
            sides.push(FlatSide { edges: Vec::new(), on_border: true, neighbors: Vec::new() });
            side_dirs.push(dirs[j]);
        }
        let side = sides.last_mut().expect("side started");
        side.edges.push(e);
        if !g.is_border(e) {
            side.on_border = false;
            let inside = triangles.iter().copied().find(|&t| g.triangle_sides(t).contains(&e)).expect("owner");
            let other = of_triangle[g.across(inside, e).expect("interior edge")];
            if side.neighbors.last() != Some(&other) {
                side.neighbors.push(other);
            }
        }
    }
    // clockwise traversal turns right by one (obtuse corner) or two (acute corner) steps
    let acute: Vec<bool> = (0..sides.len())
        .map(|j| {
            let (prev, cur) = (side_dirs[(j + sides.len() - 1) % sides.len()], side_dirs[j]);
            (prev + 6 - cur) % 6 == 2
        })
        .collect();
    let shape = match sides.len() {
        3 => Shape::Triangle,
        4 if (0..4).any(|j| acute[j] && acute[(j + 1) % 4]) => Shape::Trapezoid,
        4 => Shape::Parallelogram,
        5 => Shape::Pentagon,
        6 => Shape::Hexagon,
        s => return Err(Error::Inconsistent(format!("flatspace {id} has {s} sides"))),
    };
    let boundary = cycle.iter().map(|&(a, _, _)| a).collect();
    Ok(Flatspace { triangles, shape, sides, boundary })
}

/// Flow into `space` through each edge of its side `side`, clockwise.
pub fn side_throughputs<T: Int>(f: &FlowClass<T>, space: &Flatspace, side: usize) -> Vec<T> {
    let g = f.grid();
    space.sides[side]
        .edges
        .iter()
        .map(|&e| {
            let t = space
                .triangles
                .iter()
                .copied()
                .find(|&t| g.triangle_sides(t).contains(&e))
                .expect("side edge belongs to a triangle of the flatspace");
            f.inflow(t, e)
        })
        .collect()
}
