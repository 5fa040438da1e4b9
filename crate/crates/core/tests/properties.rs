//! Property tests. Random objects come from a proptest-chosen seed fed to the samplers,
//! so failures shrink to a small `(n, seed)` pair.

use hiveflow::checks::{antipodal_violations, hexagon_violations};
use hiveflow::residual::Node;
use hiveflow::sample::{random_flow, random_hive, random_labels, random_near_positive_instance};
use hiveflow::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

fn grid(n: usize) -> Arc<TriangleGrid> {
    Arc::new(TriangleGrid::new(n).unwrap())
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Slack straight from vertex labels: obtuse corners minus acute corners.
fn label_slack(h: &HiveLabel<i64>, r: &Rhombus) -> i64 {
    let v = h.values();
    v[r.left] + v[r.right] - v[r.top] - v[r.bottom]
}

/// Up to `steps` unit augmentations along shortest turnpaths, returning every flow visited.
fn partial_run(inst: &Instance, steps: usize) -> (Capacities, Vec<Flow>) {
    let g = grid(inst.n());
    let caps = Capacities::new(&g, inst).unwrap();
    let mut f = Flow::zero(&g);
    let mut seen = vec![f.clone()];
    for _ in 0..steps {
        let r = restrict_to_f(&f, &caps).unwrap();
        let Some(p) = r.shortest_st_turnpath() else { break };
        f = f.add_scaled(&project(&g, &p), 1).unwrap();
        seen.push(f.clone());
    }
    (caps, seen)
}

/// The six-turn cycle around interior vertex `v`.
fn cycle_around(g: &Arc<TriangleGrid>, v: usize, clockwise: bool) -> Option<GCycle> {
    let start = (0..g.num_turns()).find(|&k| g.turn(k).corner == v && g.turn(k).clockwise == clockwise)?;
    let mut turns = vec![start];
    loop {
        let t = g.turn(*turns.last().unwrap());
        let nx = g.across(t.triangle, t.out_edge)?;
        let next = g.turns_from(nx, t.out_edge).into_iter().find(|&j| g.turn(j).corner == v)?;
        if next == start {
            break;
        }
        turns.push(next);
        if turns.len() > 6 {
            return None;
        }
    }
    GCycle::from_turns(g, &turns)
}

fn interior_vertices(g: &TriangleGrid) -> Vec<usize> {
    (0..g.num_vertices())
        .filter(|&v| {
            let x = g.vertex(v);
            x.i > 0 && x.i < x.m && x.m < g.n()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hexagon_equality(n in 2usize..=6, seed: u64, hive: bool) {
        let g = grid(n);
        let mut r = rng(seed);
        let f = if hive { random_hive(&mut r, &g, 6).to_flow() } else { random_flow(&mut r, &g, 10) };
        prop_assert_eq!(hexagon_violations(&f), Vec::<String>::new());
    }

    #[test]
    fn antipodal_contributions(n in 2usize..=6, seed: u64, hive: bool) {
        let g = grid(n);
        let mut r = rng(seed);
        let f = if hive { random_hive(&mut r, &g, 6).to_flow() } else { random_flow(&mut r, &g, 10) };
        prop_assert_eq!(antipodal_violations(&f), Vec::<String>::new());
    }

    #[test]
    fn slack_is_linear(n in 1usize..=6, seed: u64, s in -5i64..=5) {
        let g = grid(n);
        let mut r = rng(seed);
        let (a, b) = (random_flow(&mut r, &g, 10), random_flow(&mut r, &g, 10));
        let c = a.add_scaled(&b, s).unwrap();
        for rho in 0..g.num_rhombi() {
            prop_assert_eq!(c.slack(rho), a.slack(rho) + s * b.slack(rho));
            prop_assert!(c.slack_forms(rho).iter().all(|&x| x == c.slack(rho)));
        }
    }

    #[test]
    fn labels_and_flows_round_trip(n in 1usize..=6, seed: u64) {
        let g = grid(n);
        let h = random_labels(&mut rng(seed), &g, 20);
        let f = h.to_flow();
        prop_assert!(f.is_closed());
        prop_assert_eq!(&HiveLabel::from_flow(&f).unwrap(), &h);
        for (rho, r) in g.rhombi().iter().enumerate() {
            prop_assert_eq!(f.slack(rho), label_slack(&h, r));
            prop_assert_eq!(h.slack(rho), label_slack(&h, r));
        }
        prop_assert_eq!(h.is_hive(), f.is_hive_flow());
    }

    #[test]
    fn decomposition_reproduces_throughputs(n in 1usize..=6, seed: u64) {
        let g = grid(n);
        let f = random_flow(&mut rng(seed), &g, 6);
        let mut acc = vec![0i64; g.num_edges()];
        for (walk, w) in f.decompose() {
            prop_assert!(w > 0);
            for k in walk.turns(&g) {
                let t = g.turn(k);
                if g.is_upright(t.triangle) {
                    acc[t.in_edge] += w;
                    acc[t.out_edge] -= w;
                }
            }
        }
        prop_assert_eq!(acc.as_slice(), f.deltas());
    }

    /// Every flow met while augmenting stays in `B` with throughput at most `|nu|`, and
    /// a shortest turnpath of `R_f` only raises the slack of `f`-flat rhombi.
    #[test]
    fn augmenting_stays_in_b(n in 1usize..=5, seed: u64, max_part in 1u64..=6) {
        let inst = random_near_positive_instance(&mut rng(seed), n, max_part);
        let (caps, flows) = partial_run(&inst, 40);
        let g = caps.grid().clone();
        for f in &flows {
            prop_assert!(f.in_b(&caps));
            prop_assert!(f.overall_throughput().unwrap() <= caps.target());
            if let Some(p) = restrict_to_f(f, &caps).unwrap().shortest_st_turnpath() {
                let d: Flow = project(&g, &p);
                for rho in 0..g.num_rhombi() {
                    if f.slack(rho) == 0 {
                        prop_assert!(d.slack(rho) >= 0, "flat rhombus {} gets slack {}", rho, d.slack(rho));
                    }
                    prop_assert!(f.scaled(2).add_scaled(&d, 1).unwrap().slack(rho) >= 0);
                }
            }
        }
    }

    #[test]
    fn residual_subgraphs_nest(n in 1usize..=5, seed: u64, max_part in 1u64..=12, steps in 0usize..20) {
        let inst = random_near_positive_instance(&mut rng(seed), n, max_part);
        let (_, flows) = partial_run(&inst, steps);
        // scaled by 16 so every R_f^l with l <= 4 is defined
        let f = &flows.last().unwrap().scaled(16);
        let caps = Capacities::new(f.grid(), &inst.scaled(16).unwrap()).unwrap();
        prop_assert!(f.in_b(&caps));
        let full: HashSet<(Node, Node)> = build_r(caps.grid()).edges().into_iter().collect();
        let rf: HashSet<(Node, Node)> = restrict_to_f(f, &caps).unwrap().edges().into_iter().collect();
        prop_assert!(rf.is_subset(&full));
        let mut prev = rf.clone();
        for ell in 0..=4 {
            let scaled: HashSet<(Node, Node)> = restrict_scaled(f, &caps, ell).unwrap().edges().into_iter().collect();
            prop_assert!(scaled.is_subset(&rf));
            prop_assert!(scaled.is_subset(&prev), "R_f^{} not inside R_f^{}", ell, ell.saturating_sub(1));
            prev = scaled;
        }
    }

    /// At the end of a run no turnpath is left, both solvers agree, and the verdict
    /// matches the tableau oracle.
    #[test]
    fn optimality(n in 1usize..=5, seed: u64, max_part in 1u64..=8) {
        let inst = random_near_positive_instance(&mut rng(seed), n, max_part);
        let (a, b) = (decide_plain::<i64>(&inst).unwrap(), decide_scaling::<i64>(&inst).unwrap());
        let caps = Capacities::new(a.final_flow.grid(), &inst).unwrap();
        for r in [&a, &b] {
            prop_assert!(restrict_to_f(&r.final_flow, &caps).unwrap().shortest_st_turnpath().is_none());
            prop_assert!(verify_certificate(r, &caps));
        }
        prop_assert_eq!(a.throughput, b.throughput);
        prop_assert_eq!(a.positive, lr_positive(&inst.lambda, &inst.mu, &inst.nu));
    }

    #[test]
    fn flatspaces_partition_and_sides(n in 1usize..=5, seed: u64) {
        let g = grid(n);
        let f = random_hive(&mut rng(seed), &g, 4).to_flow();
        let fs = flatspaces(&f).unwrap();

        // components by an independent flood fill over flat rhombi
        let mut comp = vec![usize::MAX; g.num_triangles()];
        let mut next = 0;
        for s in 0..g.num_triangles() {
            if comp[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            comp[s] = next;
            while let Some(t) = stack.pop() {
                for (rho, r) in g.rhombi().iter().enumerate() {
                    let [a, b] = r.triangles();
                    let o = if a == t { b } else if b == t { a } else { continue };
                    if f.slack(rho) == 0 && comp[o] == usize::MAX {
                        comp[o] = next;
                        stack.push(o);
                    }
                }
            }
            next += 1;
        }
        prop_assert_eq!(fs.spaces.len(), next);
        for a in 0..g.num_triangles() {
            for b in 0..g.num_triangles() {
                prop_assert_eq!(comp[a] == comp[b], fs.of_triangle[a] == fs.of_triangle[b]);
            }
        }

        for (id, space) in fs.spaces.iter().enumerate() {
            let expected_sides = match space.shape {
                Shape::Triangle => 3,
                Shape::Parallelogram | Shape::Trapezoid => 4,
                Shape::Pentagon => 5,
                Shape::Hexagon => 6,
            };
            prop_assert_eq!(space.sides.len(), expected_sides);
            prop_assert!(space.triangles.iter().all(|&t| fs.of_triangle[t] == id));

            // boundary edges: on the grid border or between two flatspaces
            let mut boundary = BTreeSet::new();
            for &t in &space.triangles {
                for e in g.triangle_sides(t) {
                    match g.edge_triangles(e) {
                        (_, None) => { boundary.insert(e); }
                        (a, Some(b)) if fs.of_triangle[a] != fs.of_triangle[b] => { boundary.insert(e); }
                        _ => {}
                    }
                }
            }
            let listed: BTreeSet<usize> = space.sides.iter().flat_map(|s| s.edges.iter().copied()).collect();
            prop_assert_eq!(&listed, &boundary);
            prop_assert_eq!(space.boundary.len(), boundary.len());

            for (k, side) in space.sides.iter().enumerate() {
                let slots: HashSet<Side> = side.edges.iter().map(|&e| g.edge(e).side).collect();
                prop_assert_eq!(slots.len(), 1, "side {} of flatspace {} bends", k, id);
                prop_assert_eq!(side.on_border, side.edges.iter().all(|&e| g.is_border(e)));
                // the label is affine on a flatspace, so a side carries one throughput
                let tp = side_throughputs(&f, space, k);
                prop_assert!(tp.windows(2).all(|w| w[0] == w[1]), "side throughputs {:?}", tp);
                prop_assert_eq!(tp[0], f.inflow(space.triangles.iter().copied().find(|&t| g.triangle_sides(t).contains(&side.entrance())).unwrap(), side.entrance()));
                for &other in &side.neighbors {
                    // what leaves one flatspace enters its neighbour
                    let ns = &fs.spaces[other];
                    for &e in &side.edges {
                        if let Some(j) = ns.side_of(e) {
                            let pos = ns.sides[j].edges.iter().position(|&x| x == e).unwrap();
                            prop_assert_eq!(side_throughputs(&f, ns, j)[pos], -tp[0]);
                        }
                    }
                }
            }
        }
    }

    /// Hive preservation only looks at flat rhombi, so it is scale invariant and agrees
    /// with `N f + c` being a hive flow once `N` beats the slack of `c`.
    #[test]
    fn hive_preservation_forms(n in 3usize..=6, seed: u64, which: usize, clockwise: bool) {
        let g = grid(n);
        let mut r = rng(seed);
        let f = random_hive(&mut r, &g, 3).to_flow();
        let inner = interior_vertices(&g);
        let v = inner[which % inner.len()];
        let c = cycle_around(&g, v, clockwise).expect("interior vertices have a turn cycle");
        prop_assert_eq!(c.len(), 6);
        let pres = is_f_hive_preserving(&f, &c);
        for k in 2..=4 {
            prop_assert_eq!(pres, is_f_hive_preserving(&f.scaled(k), &c));
        }
        let big = 1 + (0..g.num_rhombi()).map(|rho| c.flow.slack(rho).abs()).max().unwrap();
        prop_assert_eq!(pres, f.scaled(big).add_scaled(&c.flow, 1).unwrap().is_hive_flow());
        if hiveflow::enumerate::is_f_hive_preserving_doubled(&f, &c) {
            prop_assert!(pres);
        }
        if is_f_secure(&f, &c) {
            prop_assert!(pres);
        }
    }

    #[test]
    fn enumeration_is_consistent(n in 1usize..=4, seed: u64, max_part in 1u64..=3) {
        let inst = random_near_positive_instance(&mut rng(seed), n, max_part);
        let hives = enumerate_hives(&inst, DEFAULT).unwrap();
        let points = enumerate_p(&inst, DEFAULT).unwrap();
        prop_assert_eq!(hives.len(), points.len());
        prop_assert_eq!(hives.len() as u64, lr_count(&inst.lambda, &inst.mu, &inst.nu));
        let g = grid(inst.n());
        let caps = Capacities::new(&g, &inst).unwrap();
        let forced = HiveLabel::<i64>::forced_boundary(&g, &inst).unwrap();
        let distinct: HashSet<Vec<i64>> = hives.iter().map(|h| h.values().to_vec()).collect();
        prop_assert_eq!(distinct.len(), hives.len());
        for (h, p) in hives.iter().zip(&points) {
            prop_assert!(h.is_hive() && h.within_bounds());
            for (v, x) in forced.iter().enumerate() {
                if let Some(x) = x {
                    prop_assert_eq!(h.values()[v], *x);
                }
            }
            prop_assert!(p.in_p(&caps));
        }
    }

    #[test]
    fn shortest_path_theorem(seed: u64) {
        let o = checks::shortest_path_theorem(&mut rng(seed), 200, 6);
        prop_assert!(o.passed(), "{}", o);
    }

    #[test]
    fn saturation(seed: u64) {
        let o = checks::saturation(&mut rng(seed), 20, &[2, 3]);
        prop_assert!(o.passed(), "{}", o);
    }
}

const DEFAULT: usize = hiveflow::enumerate::DEFAULT_LIMIT;

/// For `n = 2` every vertex is on the border, so `B_Z` is a finite box of labels. The
/// largest throughput over it must be what the solvers find.
#[test]
fn integral_optimum_matches_brute_force_on_two_rows() {
    let g = grid(2);
    let parts = |max: u64| {
        let mut v = Vec::new();
        for a in 0..=max {
            for b in 0..=a {
                v.push(Partition::new(vec![a, b]).unwrap());
            }
        }
        v
    };
    let mut checked = 0;
    for l in parts(1) {
        for m in parts(1) {
            for nu in parts(2) {
                let Ok(inst) = Instance::with_n(l.clone(), m.clone(), nu.clone(), 2) else { continue };
                let caps = Capacities::new(&g, &inst).unwrap();
                let s = nu.weight() as i64;
                let mut best = None;
                let mut vals = [0i64; 6];
                let mut idx = [-s; 5];
                'outer: loop {
                    vals[1..].copy_from_slice(&idx);
                    let f = HiveLabel::new(&g, vals.to_vec()).unwrap().to_flow();
                    if f.in_b(&caps) {
                        let t = f.overall_throughput().unwrap();
                        best = Some(best.map_or(t, |b: i64| b.max(t)));
                    }
                    for k in 0..5 {
                        if idx[k] < s {
                            idx[k] += 1;
                            continue 'outer;
                        }
                        idx[k] = -s;
                    }
                    break;
                }
                let best = best.expect("the zero flow is in B");
                for alg in [Algorithm::Plain, Algorithm::Scaling] {
                    let r = decide::<i64>(&inst, alg).unwrap();
                    assert_eq!(r.throughput, best, "{inst} {alg:?}");
                }
                checked += 1;
            }
        }
    }
    assert!(checked >= 5, "only {checked} instances");
}
