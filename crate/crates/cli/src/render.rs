//! DOT and TikZ drawings of a flow: the lattice, throughput arrows across edges, and
//! shaded flatspaces. Output is a pure function of the flow.

use hiveflow::{flatspaces, Flow, TriangleGrid};
use std::fmt::Write;

const H: f64 = 0.866_025_403_784_438_6;

fn num(x: f64) -> String {
    // avoid "-0.000"
    format!("{:.3}", x + 0.0).replace("-0.000", "0.000")
}

fn vertex_xy(g: &TriangleGrid, v: usize) -> (f64, f64) {
    let x = g.vertex(v);
    (x.i as f64 - x.m as f64 / 2.0, -(x.m as f64) * H)
}

fn centroid(g: &TriangleGrid, t: usize) -> (f64, f64) {
    let vs = g.triangle_vertices(t).map(|v| vertex_xy(g, v));
    ((vs[0].0 + vs[1].0 + vs[2].0) / 3.0, (vs[0].1 + vs[1].1 + vs[2].1) / 3.0)
}

fn midpoint(g: &TriangleGrid, e: usize) -> (f64, f64) {
    let [a, b] = g.edge_ends(e).map(|v| vertex_xy(g, v));
    ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0)
}

/// Arrow across edge `e` in the direction of its throughput: `(from, to)`, each either a
/// triangle centroid or a point just outside the border.
fn arrow(f: &Flow, e: usize) -> Option<((f64, f64), (f64, f64))> {
    let g = f.grid();
    let d = f.delta(e);
    if d == 0 {
        return None;
    }
    let (t, other) = g.edge_triangles(e);
    let here = centroid(g, t);
    let there = match other {
        Some(o) => centroid(g, o),
        None => {
            let m = midpoint(g, e);
            (2.0 * m.0 - here.0, 2.0 * m.1 - here.1)
        }
    };
    // positive inflow into t means the arrow points at t
    Some(if f.inflow(t, e) > 0 { (there, here) } else { (here, there) })
}

/// Flatspace index per triangle and a shade per flatspace, from a greedy colouring of the
/// adjacency between flatspaces. `None` when the flow is not a hive flow.
fn shading(f: &Flow) -> Option<(Vec<usize>, Vec<usize>)> {
    let fs = flatspaces(f).ok()?;
    let g = f.grid();
    let k = fs.spaces.len();
    let mut adjacent = vec![Vec::new(); k];
    for e in 0..g.num_edges() {
        if let (t, Some(o)) = g.edge_triangles(e) {
            let (a, b) = (fs.of_triangle[t], fs.of_triangle[o]);
            if a != b {
                adjacent[a].push(b);
                adjacent[b].push(a);
            }
        }
    }
    let mut shade = vec![usize::MAX; k];
    for s in 0..k {
        shade[s] = (0..).find(|c| adjacent[s].iter().all(|&o| shade[o] != *c)).expect("some colour is free");
    }
    Some((fs.of_triangle, shade))
}

const DOT_FILLS: [&str; 6] = ["gray92", "gray80", "gray68", "gray86", "gray74", "gray62"];
const TIKZ_FILLS: [&str; 6] = ["black!8", "black!20", "black!32", "black!14", "black!26", "black!38"];

pub fn dot(f: &Flow) -> String {
    let g = f.grid();
    let shades = shading(f);
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "digraph hive {{").unwrap();
    writeln!(w, "  graph [layout=neato, splines=false, outputorder=edgesfirst, label=\"n = {}\"];", g.n()).unwrap();
    writeln!(w, "  node [shape=point, width=0.04];").unwrap();
    for v in 0..g.num_vertices() {
        let (x, y) = vertex_xy(g, v);
        writeln!(w, "  v{v} [pos=\"{},{}!\"];", num(2.0 * x), num(2.0 * y)).unwrap();
    }
    for t in 0..g.num_triangles() {
        let (x, y) = centroid(g, t);
        let fill = match &shades {
            Some((of, shade)) => format!(", style=filled, fillcolor={}, tooltip=\"flatspace {}\"", DOT_FILLS[shade[of[t]] % 6], of[t]),
            None => String::new(),
        };
        writeln!(w, "  t{t} [shape=circle, width=0.3, label=\"\", color=gray50{fill}, pos=\"{},{}!\"];", num(2.0 * x), num(2.0 * y))
            .unwrap();
    }
    for e in 0..g.num_edges() {
        let [a, b] = g.edge_ends(e);
        writeln!(w, "  v{a} -> v{b} [dir=none, color=gray40, label=\"{}\", fontsize=9];", f.delta(e).abs()).unwrap();
    }
    for e in 0..g.num_edges() {
        let Some((from, to)) = arrow(f, e) else { continue };
        let (t, other) = g.edge_triangles(e);
        let (a, b) = match other {
            Some(o) => (format!("t{t}"), format!("t{o}")),
            None => {
                let outside = format!("x{e}");
                let p = if f.inflow(t, e) > 0 { from } else { to };
                writeln!(w, "  {outside} [shape=none, label=\"\", width=0, pos=\"{},{}!\"];", num(2.0 * p.0), num(2.0 * p.1)).unwrap();
                (format!("t{t}"), outside)
            }
        };
        let (tail, head) = if f.inflow(t, e) > 0 { (b, a) } else { (a, b) };
        writeln!(w, "  {tail} -> {head} [color=blue, penwidth=1.2];").unwrap();
    }
    writeln!(w, "}}").unwrap();
    out
}

pub fn tikz(f: &Flow) -> String {
    let g = f.grid();
    let shades = shading(f);
    let scale = (12.0 / g.n() as f64).min(1.2);
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "\\documentclass[tikz,border=4pt]{{standalone}}").unwrap();
    writeln!(w, "\\begin{{document}}").unwrap();
    writeln!(w, "\\begin{{tikzpicture}}[scale={}, >=stealth]", num(scale)).unwrap();
    let pt = |p: (f64, f64)| format!("({},{})", num(p.0), num(p.1));
    if let Some((of, shade)) = &shades {
        writeln!(w, "% flatspaces").unwrap();
        for t in 0..g.num_triangles() {
            let [a, b, c] = g.triangle_vertices(t).map(|v| pt(vertex_xy(g, v)));
            writeln!(w, "\\fill[{}] {a} -- {b} -- {c} -- cycle; % flatspace {}", TIKZ_FILLS[shade[of[t]] % 6], of[t]).unwrap();
        }
    }
    writeln!(w, "% lattice").unwrap();
    for e in 0..g.num_edges() {
        let [a, b] = g.edge_ends(e).map(|v| pt(vertex_xy(g, v)));
        let style = match (&shades, g.edge_triangles(e)) {
            (Some((of, _)), (t, Some(o))) if of[t] != of[o] => "black, thick",
            (_, (_, None)) => "black, thick",
            _ => "black!40",
        };
        writeln!(w, "\\draw[{style}] {a} -- {b};").unwrap();
    }
    writeln!(w, "% throughputs").unwrap();
    for e in 0..g.num_edges() {
        let label = f.delta(e).abs();
        match arrow(f, e) {
            Some((from, to)) => {
                // a short arrow through the edge midpoint
                let m = midpoint(g, e);
                let a = (m.0 + 0.7 * (from.0 - m.0), m.1 + 0.7 * (from.1 - m.1));
                let b = (m.0 + 0.7 * (to.0 - m.0), m.1 + 0.7 * (to.1 - m.1));
                writeln!(
                    w,
                    "\\draw[->, blue] {} -- {} node[pos=0.5, font=\\tiny, fill=white, inner sep=0.5pt] {{{label}}};",
                    pt(a),
                    pt(b)
                )
                .unwrap();
            }
            None => {
                writeln!(w, "\\node[font=\\tiny, fill=white, inner sep=0.5pt] at {} {{0}};", pt(midpoint(g, e))).unwrap();
            }
        }
    }
    writeln!(w, "\\end{{tikzpicture}}").unwrap();
    writeln!(w, "\\end{{document}}").unwrap();
    out
}
