//! The triangular graph with its hive triangles, rhombi, turns and slack-contribution tables.
//!
//! Vertices are `x(m,i)` with `0 <= i <= m <= n`, rows counted from the top. Every edge is
//! keyed by the unique upright triangle containing it. Throughputs are signed as flow into
//! that upright triangle.

use crate::error::{Error, Result};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId {
    pub m: usize,
    pub i: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orient {
    Upright,
    Downright,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TriangleId {
    pub row: usize,
    pub col: usize,
    pub orient: Orient,
}

/// Side of an upright triangle; also names the three borders of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
    Bottom,
}

impl Side {
    pub const ALL: [Side; 3] = [Side::Left, Side::Right, Side::Bottom];

    fn slot(self) -> usize {
        match self {
            Side::Left => 0,
            Side::Right => 1,
            Side::Bottom => 2,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Side::Left => 'L',
            Side::Right => 'R',
            Side::Bottom => 'B',
        }
    }
}

/// An edge keyed by its upright triangle `(row, col)` and the side it forms there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId {
    pub row: usize,
    pub col: usize,
    pub side: Side,
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U:{},{}:{}", self.row, self.col, self.side.letter())
    }
}

impl std::str::FromStr for EdgeId {
    type Err = Error;

    /// Parses the `U:r,c:S` key format.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Inconsistent(format!("malformed edge key {s:?}"));
        let rest = s.strip_prefix("U:").ok_or_else(bad)?;
        let (rc, side) = rest.split_once(':').ok_or_else(bad)?;
        let (r, c) = rc.split_once(',').ok_or_else(bad)?;
        let side = match side {
            "L" => Side::Left,
            "R" => Side::Right,
            "B" => Side::Bottom,
            _ => return Err(bad()),
        };
        Ok(EdgeId { row: r.parse().map_err(|_| bad())?, col: c.parse().map_err(|_| bad())?, side })
    }
}

/// Position of a border edge: right border counted top to bottom (carries lambda_i),
/// bottom border right to left (mu_i), left border top to bottom (nu_i). `index` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BorderSide {
    pub side: Side,
    pub index: usize,
}

/// A path white -> black -> white inside one hive triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Turn {
    pub triangle: usize,
    pub in_edge: usize,
    pub out_edge: usize,
    /// The vertex shared by the entry and exit edges.
    pub corner: usize,
    pub clockwise: bool,
}

/// A slack contribution: a single turn at an acute angle, or two concatenated turns
/// passing the diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Contribution {
    Turn(usize),
    Pair(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlackContributions {
    pub positive: [Contribution; 4],
    pub negative: [Contribution; 4],
    pub neutral: [Contribution; 4],
}

/// Union of an upright and a downright triangle sharing the interior edge `diag`.
///
/// Corner and side names refer to the picture rotated (by 0, 120 or 240 degrees) so that
/// the upright half sits on top: `top`/`bottom` are the acute corners, `left`/`right`
/// the obtuse ones, and `ul, ur` (resp. `ll, lr`) the outer sides of the upright
/// (resp. downright) half.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rhombus {
    pub diag: usize,
    pub upright: usize,
    pub downright: usize,
    pub top: usize,
    pub bottom: usize,
    pub left: usize,
    pub right: usize,
    pub ul: usize,
    pub ur: usize,
    pub ll: usize,
    pub lr: usize,
    /// Which side of the upright triangle the diagonal is; one class per orientation.
    pub orientation: Side,
    pub contributions: SlackContributions,
}

impl Rhombus {
    pub fn acute(&self) -> [usize; 2] {
        [self.top, self.bottom]
    }

    pub fn obtuse(&self) -> [usize; 2] {
        [self.left, self.right]
    }

    pub fn triangles(&self) -> [usize; 2] {
        [self.upright, self.downright]
    }

    pub fn outer_sides(&self) -> [usize; 4] {
        [self.ul, self.ur, self.ll, self.lr]
    }
}

/// Where a turn leads: two continuation turns across an interior edge, or a gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Link {
    Turns([usize; 2]),
    Source,
    Target,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleGrid {
    n: usize,
    vertices: Vec<VertexId>,
    triangles: Vec<TriangleId>,
    edges: Vec<EdgeId>,
    edge_ends: Vec<[usize; 2]>,
    tri_vertices: Vec<[usize; 3]>,
    tri_sides: Vec<[usize; 3]>,
    edge_tris: Vec<(usize, Option<usize>)>,
    border: Vec<Option<BorderSide>>,
    edge_rhombus: Vec<Option<usize>>,
    rhombi: Vec<Rhombus>,
    turns: Vec<Turn>,
}

pub fn vertex_index(m: usize, i: usize) -> usize {
    m * (m + 1) / 2 + i
}

fn upright_index(r: usize, c: usize) -> usize {
    r * (r + 1) / 2 + c
}

/// Doubled lattice coordinates; an orientation preserving affine image of the plane picture.
fn xy(v: VertexId) -> (i64, i64) {
    (2 * v.i as i64 - v.m as i64, -(v.m as i64))
}

fn cross(a: (i64, i64), b: (i64, i64)) -> i64 {
    a.0 * b.1 - a.1 * b.0
}

impl TriangleGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGrid);
        }
        let mut vertices = Vec::with_capacity((n + 1) * (n + 2) / 2);
        for m in 0..=n {
            for i in 0..=m {
                vertices.push(VertexId { m, i });
            }
        }

        let mut edges = Vec::with_capacity(3 * n * (n + 1) / 2);
        let mut edge_ends = Vec::with_capacity(3 * n * (n + 1) / 2);
        for r in 0..n {
            for c in 0..=r {
                for side in Side::ALL {
                    edges.push(EdgeId { row: r, col: c, side });
                    edge_ends.push(match side {
                        Side::Left => [vertex_index(r, c), vertex_index(r + 1, c)],
                        Side::Right => [vertex_index(r, c), vertex_index(r + 1, c + 1)],
                        Side::Bottom => [vertex_index(r + 1, c), vertex_index(r + 1, c + 1)],
                    });
                }
            }
        }
        let eix = |r: usize, c: usize, s: Side| 3 * upright_index(r, c) + s.slot();

        let mut triangles = Vec::with_capacity(n * n);
        let mut tri_vertices = Vec::with_capacity(n * n);
        let mut tri_sides = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..=r {
                triangles.push(TriangleId { row: r, col: c, orient: Orient::Upright });
                tri_vertices.push([vertex_index(r, c), vertex_index(r + 1, c + 1), vertex_index(r + 1, c)]);
                tri_sides.push([eix(r, c, Side::Left), eix(r, c, Side::Right), eix(r, c, Side::Bottom)]);
            }
            for c in 0..r {
                triangles.push(TriangleId { row: r, col: c, orient: Orient::Downright });
                tri_vertices.push([vertex_index(r, c), vertex_index(r, c + 1), vertex_index(r + 1, c + 1)]);
                tri_sides.push([eix(r - 1, c, Side::Bottom), eix(r, c, Side::Right), eix(r, c + 1, Side::Left)]);
            }
        }
        let up_tri = |r: usize, c: usize| r * r + c;
        let down_tri = |r: usize, c: usize| r * r + r + 1 + c;

        let mut edge_tris = Vec::with_capacity(edges.len());
        let mut border = Vec::with_capacity(edges.len());
        for e in &edges {
            let (r, c) = (e.row, e.col);
            let (down, b) = match e.side {
                Side::Left if c == 0 => (None, Some(BorderSide { side: Side::Left, index: r + 1 })),
                Side::Left => (Some(down_tri(r, c - 1)), None),
                Side::Right if c == r => (None, Some(BorderSide { side: Side::Right, index: r + 1 })),
                Side::Right => (Some(down_tri(r, c)), None),
                Side::Bottom if r == n - 1 => (None, Some(BorderSide { side: Side::Bottom, index: n - c })),
                Side::Bottom => (Some(down_tri(r + 1, c)), None),
            };
            edge_tris.push((up_tri(r, c), down));
            border.push(b);
        }

        let mut turns = Vec::with_capacity(6 * n * n);
        for (t, sides) in tri_sides.iter().enumerate() {
            for a in 0..3 {
                for b in (0..3).filter(|&b| b != a) {
                    let (ea, eb) = (sides[a], sides[b]);
                    let corner = *edge_ends[ea]
                        .iter()
                        .find(|v| edge_ends[eb].contains(v))
                        .expect("two sides of a triangle share a corner");
                    let mid = |e: usize| {
                        let (p, q) = (xy(vertices[edge_ends[e][0]]), xy(vertices[edge_ends[e][1]]));
                        (p.0 + q.0, p.1 + q.1)
                    };
                    let v = xy(vertices[corner]);
                    let (ma, mb) = (mid(ea), mid(eb));
                    let turn = cross((ma.0 - 2 * v.0, ma.1 - 2 * v.1), (mb.0 - 2 * v.0, mb.1 - 2 * v.1));
                    turns.push(Turn { triangle: t, in_edge: ea, out_edge: eb, corner, clockwise: turn < 0 });
                }
            }
        }

        let mut grid = TriangleGrid {
            n,
            vertices,
            triangles,
            edges,
            edge_ends,
            tri_vertices,
            tri_sides,
            edge_tris,
            border,
            edge_rhombus: Vec::new(),
            rhombi: Vec::new(),
            turns,
        };
        grid.build_rhombi();
        Ok(grid)
    }

    fn build_rhombi(&mut self) {
        let mut rhombi = Vec::with_capacity(3 * self.n * (self.n - 1) / 2);
        let mut edge_rhombus = vec![None; self.edges.len()];
        for diag in 0..self.edges.len() {
            let (up, Some(down)) = self.edge_tris[diag] else { continue };
            let [p, q] = self.edge_ends[diag];
            let apex = |t: usize| *self.tri_vertices[t].iter().find(|&&v| v != p && v != q).unwrap();
            let (top, bottom) = (apex(up), apex(down));
            let pos = |v: usize| xy(self.vertices[v]);
            let (t, pp, b) = (pos(top), pos(p), pos(bottom));
            let clockwise_via_p = cross((pp.0 - t.0, pp.1 - t.1), (b.0 - t.0, b.1 - t.1)) < 0;
            let (left, right) = if clockwise_via_p { (q, p) } else { (p, q) };
            let side_of = |tri: usize, a: usize, b: usize| self.side_between(tri, a, b);
            let (ul, ur) = (side_of(up, top, left), side_of(up, top, right));
            let (ll, lr) = (side_of(down, bottom, left), side_of(down, bottom, right));
            let contributions = self.contribution_table(up, down, diag, ul, ur, ll, lr);
            edge_rhombus[diag] = Some(rhombi.len());
            rhombi.push(Rhombus {
                diag,
                upright: up,
                downright: down,
                top,
                bottom,
                left,
                right,
                ul,
                ur,
                ll,
                lr,
                orientation: self.edges[diag].side,
                contributions,
            });
        }
        self.rhombi = rhombi;
        self.edge_rhombus = edge_rhombus;
    }

    fn side_between(&self, tri: usize, a: usize, b: usize) -> usize {
        *self.tri_sides[tri]
            .iter()
            .find(|&&e| {
                let [x, y] = self.edge_ends[e];
                (x == a && y == b) || (x == b && y == a)
            })
            .expect("vertices span a side of the triangle")
    }

    #[allow(clippy::too_many_arguments)]
    fn contribution_table(
        &self,
        up: usize,
        down: usize,
        diag: usize,
        ul: usize,
        ur: usize,
        ll: usize,
        lr: usize,
    ) -> SlackContributions {
        use Contribution::{Pair, Turn};
        let tu = |a, b| self.turn_of(up, a, b);
        let td = |a, b| self.turn_of(down, a, b);
        SlackContributions {
            positive: [
                Turn(tu(ur, ul)),
                Turn(td(ll, lr)),
                Pair(tu(ur, diag), td(diag, lr)),
                Pair(td(ll, diag), tu(diag, ul)),
            ],
            negative: [
                Turn(td(lr, ll)),
                Turn(tu(ul, ur)),
                Pair(tu(ul, diag), td(diag, ll)),
                Pair(td(lr, diag), tu(diag, ur)),
            ],
            neutral: [
                Pair(tu(ul, diag), td(diag, lr)),
                Pair(tu(ur, diag), td(diag, ll)),
                Pair(td(ll, diag), tu(diag, ur)),
                Pair(td(lr, diag), tu(diag, ul)),
            ],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_rhombi(&self) -> usize {
        self.rhombi.len()
    }

    pub fn num_turns(&self) -> usize {
        self.turns.len()
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> VertexId {
        self.vertices[v]
    }

    pub fn triangles(&self) -> &[TriangleId] {
        &self.triangles
    }

    pub fn triangle(&self, t: usize) -> TriangleId {
        self.triangles[t]
    }

    pub fn is_upright(&self, t: usize) -> bool {
        self.triangles[t].orient == Orient::Upright
    }

    pub fn triangle_index(&self, id: TriangleId) -> Option<usize> {
        let TriangleId { row: r, col: c, orient } = id;
        match orient {
            Orient::Upright if r < self.n && c <= r => Some(r * r + c),
            Orient::Downright if r < self.n && c < r => Some(r * r + r + 1 + c),
            _ => None,
        }
    }

    /// Corners in clockwise order.
    pub fn triangle_vertices(&self, t: usize) -> [usize; 3] {
        self.tri_vertices[t]
    }

    /// Sides in slot order: upright `[left, right, bottom]`, downright `[top, left, right]`.
    pub fn triangle_sides(&self, t: usize) -> [usize; 3] {
        self.tri_sides[t]
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> EdgeId {
        self.edges[e]
    }

    pub fn edge_index(&self, id: EdgeId) -> Option<usize> {
        (id.row < self.n && id.col <= id.row).then(|| 3 * upright_index(id.row, id.col) + id.side.slot())
    }

    pub fn edge_ends(&self, e: usize) -> [usize; 2] {
        self.edge_ends[e]
    }

    /// The upright triangle containing `e`, and the downright one if `e` is interior.
    pub fn edge_triangles(&self, e: usize) -> (usize, Option<usize>) {
        self.edge_tris[e]
    }

    /// The triangle across `e` from `t`, if any.
    pub fn across(&self, t: usize, e: usize) -> Option<usize> {
        match self.edge_tris[e] {
            (u, d) if u == t => d,
            (u, Some(d)) if d == t => Some(u),
            _ => None,
        }
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        let (va, vb) = (self.vertices[a], self.vertices[b]);
        let (top, low) = if (va.m, va.i) <= (vb.m, vb.i) { (va, vb) } else { (vb, va) };
        let id = if low.m == top.m + 1 && low.i == top.i && top.i <= top.m {
            EdgeId { row: top.m, col: top.i, side: Side::Left }
        } else if low.m == top.m + 1 && low.i == top.i + 1 {
            EdgeId { row: top.m, col: top.i, side: Side::Right }
        } else if low.m == top.m && low.i == top.i + 1 && top.m >= 1 {
            EdgeId { row: top.m - 1, col: top.i, side: Side::Bottom }
        } else {
            return None;
        };
        self.edge_index(id)
    }

    pub fn border(&self, e: usize) -> Option<BorderSide> {
        self.border[e]
    }

    pub fn is_border(&self, e: usize) -> bool {
        self.border[e].is_some()
    }

    /// Border edges in grid order.
    pub fn border_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edges.len()).filter(|&e| self.border[e].is_some())
    }

    /// The `index`-th (1-based) edge of a border, per the counting conventions of [`BorderSide`].
    pub fn border_edge(&self, side: Side, index: usize) -> Option<usize> {
        let n = self.n;
        if index == 0 || index > n {
            return None;
        }
        let id = match side {
            Side::Right => EdgeId { row: index - 1, col: index - 1, side },
            Side::Bottom => EdgeId { row: n - 1, col: n - index, side },
            Side::Left => EdgeId { row: index - 1, col: 0, side },
        };
        self.edge_index(id)
    }

    pub fn rhombi(&self) -> &[Rhombus] {
        &self.rhombi
    }

    pub fn rhombus(&self, r: usize) -> &Rhombus {
        &self.rhombi[r]
    }

    /// The rhombus whose diagonal is `e`.
    pub fn rhombus_of(&self, e: usize) -> Option<usize> {
        self.edge_rhombus[e]
    }

    pub fn rhombi_overlap(&self, a: usize, b: usize) -> bool {
        let (ra, rb) = (&self.rhombi[a], &self.rhombi[b]);
        a != b && ra.triangles().iter().any(|t| rb.triangles().contains(t))
    }

    pub fn turns(&self) -> &[Turn] {
        &self.turns
    }

    pub fn turn(&self, k: usize) -> Turn {
        self.turns[k]
    }

    pub fn turn_of(&self, tri: usize, in_edge: usize, out_edge: usize) -> usize {
        (6 * tri..6 * tri + 6)
            .find(|&k| self.turns[k].in_edge == in_edge && self.turns[k].out_edge == out_edge)
            .expect("edges are distinct sides of the triangle")
    }

    fn slot(&self, tri: usize, e: usize) -> usize {
        self.tri_sides[tri].iter().position(|&s| s == e).expect("edge is a side of the triangle")
    }

    /// The two turns of `tri` entering through `e`.
    pub fn turns_from(&self, tri: usize, e: usize) -> [usize; 2] {
        let base = 6 * tri + 2 * self.slot(tri, e);
        [base, base + 1]
    }

    /// The two turns of `tri` leaving through `e`, in index order.
    pub fn turns_into(&self, tri: usize, e: usize) -> [usize; 2] {
        let mut out = [0; 2];
        let mut j = 0;
        for k in 6 * tri..6 * tri + 6 {
            if self.turns[k].out_edge == e {
                out[j] = k;
                j += 1;
            }
        }
        out
    }

    /// Successors of a turn in the turn digraph.
    pub fn next(&self, k: usize) -> Link {
        let Turn { triangle, out_edge, .. } = self.turns[k];
        match self.border[out_edge] {
            Some(BorderSide { side: Side::Left, .. }) => Link::Target,
            Some(_) => Link::Source,
            None => {
                let other = self.across(triangle, out_edge).expect("interior edge");
                Link::Turns(self.turns_from(other, out_edge))
            }
        }
    }

    /// Predecessors of a turn in the turn digraph.
    pub fn prev(&self, k: usize) -> Link {
        let Turn { triangle, in_edge, .. } = self.turns[k];
        match self.border[in_edge] {
            Some(BorderSide { side: Side::Left, .. }) => Link::Target,
            Some(_) => Link::Source,
            None => {
                let other = self.across(triangle, in_edge).expect("interior edge");
                Link::Turns(self.turns_into(other, in_edge))
            }
        }
    }

    /// Whether `a` followed by `b` is a turnedge.
    pub fn concatenable(&self, a: usize, b: usize) -> bool {
        let (ta, tb) = (self.turns[a], self.turns[b]);
        ta.out_edge == tb.in_edge && ta.triangle != tb.triangle
    }

    /// Antipodal contribution: reverse, then rotate the rhombus by 180 degrees.
    pub fn antipodal(&self, rho: usize, c: Contribution) -> Contribution {
        let r = &self.rhombi[rho];
        let rot_edge = |e: usize| match e {
            e if e == r.ul => r.lr,
            e if e == r.lr => r.ul,
            e if e == r.ur => r.ll,
            e if e == r.ll => r.ur,
            e if e == r.diag => r.diag,
            _ => panic!("edge {e} is not part of rhombus {rho}"),
        };
        let rev_rot = |k: usize| {
            let t = self.turns[k];
            let tri = if t.triangle == r.upright { r.downright } else { r.upright };
            self.turn_of(tri, rot_edge(t.out_edge), rot_edge(t.in_edge))
        };
        match c {
            Contribution::Turn(k) => Contribution::Turn(rev_rot(k)),
            Contribution::Pair(a, b) => Contribution::Pair(rev_rot(b), rev_rot(a)),
        }
    }
}
