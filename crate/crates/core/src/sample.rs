//! Random partitions, instances, hives and flows for property tests.

use crate::flow::FlowClass;
use crate::grid::TriangleGrid;
use crate::hives::HiveLabel;
use crate::partition::{Instance, Partition};
use rand::seq::SliceRandom;
use rand::Rng;
use std::sync::Arc;

/// Every partition with at most `len` parts, each at most `max_part`, padded to `len`.
pub fn all_partitions(len: usize, max_part: u64) -> Vec<Partition> {
    let mut out: Vec<Vec<u64>> = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|p| {
                let cap = p.last().copied().unwrap_or(max_part);
                (0..=cap).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out.into_iter().map(|p| Partition::new(p).expect("weakly decreasing")).collect()
}

pub fn random_partition<R: Rng>(rng: &mut R, len: usize, max_part: u64) -> Partition {
    let mut parts: Vec<u64> = (0..len).map(|_| rng.gen_range(0..=max_part)).collect();
    parts.sort_unstable_by(|a, b| b.cmp(a));
    Partition::new(parts).expect("sorted")
}

/// A partition of `weight` with at most `len` parts, each at most `max_part`, or `None`
/// if none exists.
pub fn random_partition_of<R: Rng>(rng: &mut R, weight: u64, len: usize, max_part: u64) -> Option<Partition> {
    if weight > len as u64 * max_part {
        return None;
    }
    let mut parts = vec![0u64; len];
    for _ in 0..weight {
        let open: Vec<usize> = (0..len).filter(|&i| parts[i] < max_part).collect();
        parts[*open.choose(rng)?] += 1;
    }
    parts.sort_unstable_by(|a, b| b.cmp(a));
    Partition::new(parts).ok()
}

/// Uniform `lambda, mu`; `nu` a random partition of the right weight. Mostly negative.
pub fn random_instance<R: Rng>(rng: &mut R, n: usize, max_part: u64) -> Instance {
    loop {
        let lambda = random_partition(rng, n, max_part);
        let mu = random_partition(rng, n, max_part);
        let w = lambda.weight() + mu.weight();
        if let Some(nu) = random_partition_of(rng, w, n, 2 * max_part) {
            return Instance::with_n(lambda, mu, nu, n).expect("weights match");
        }
    }
}

/// `nu` = sorted `lambda + w(mu)` for a random permutation `w`, then possibly one unit moved
/// between two parts. Positive and negative verdicts both occur often.
pub fn random_near_positive_instance<R: Rng>(rng: &mut R, n: usize, max_part: u64) -> Instance {
    let lambda = random_partition(rng, n, max_part);
    let mu = random_partition(rng, n, max_part);
    let mut perm: Vec<u64> = mu.parts().to_vec();
    perm.shuffle(rng);
    let mut nu: Vec<u64> = lambda.parts().iter().zip(&perm).map(|(a, b)| a + b).collect();
    nu.sort_unstable_by(|a, b| b.cmp(a));
    if n > 1 && rng.gen_bool(0.5) {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let mut moved = nu.clone();
        if moved[j] > 0 && i != j {
            moved[j] -= 1;
            moved[i] += 1;
            moved.sort_unstable_by(|a, b| b.cmp(a));
            nu = moved;
        }
    }
    Instance::with_n(lambda, mu, Partition::new(nu).expect("sorted"), n).expect("weights match")
}

/// Arbitrary labels in `-range..=range`, top fixed at 0.
pub fn random_labels<R: Rng>(rng: &mut R, grid: &Arc<TriangleGrid>, range: i64) -> HiveLabel<i64> {
    let mut v: Vec<i64> = (0..grid.num_vertices()).map(|_| rng.gen_range(-range..=range)).collect();
    v[0] = 0;
    HiveLabel::new(grid, v).expect("sized to the grid")
}

/// A closed flow class with throughputs of size about `range`.
pub fn random_flow<R: Rng>(rng: &mut R, grid: &Arc<TriangleGrid>, range: i64) -> FlowClass<i64> {
    random_labels(rng, grid, range).to_flow()
}

/// A random integral hive: a nonnegative combination of concave folds along lattice lines,
/// a multiple of the strictly concave `-(i^2 - im + m^2)` and a linear part, followed by
/// a few slack-preserving local moves. Flat regions of every shape show up.
pub fn random_hive<R: Rng>(rng: &mut R, grid: &Arc<TriangleGrid>, scale: i64) -> HiveLabel<i64> {
    let n = grid.n() as i64;
    let verts = grid.vertices();
    let mut h = vec![0i64; verts.len()];
    let forms: [fn(i64, i64) -> i64; 3] = [|m, _| m, |_, i| i, |m, i| m - i];
    for _ in 0..rng.gen_range(0..=3 * grid.n()) {
        let form = forms[rng.gen_range(0..3)];
        let c = rng.gen_range(0..=n);
        let a = rng.gen_range(1..=scale.max(1));
        let up = rng.gen_bool(0.5);
        for (k, x) in verts.iter().enumerate() {
            let l = form(x.m as i64, x.i as i64);
            let d = if up { l - c } else { c - l };
            h[k] -= a * d.max(0);
        }
    }
    let b = rng.gen_range(0..=scale / 2);
    let (p, q) = (rng.gen_range(-scale..=scale), rng.gen_range(-scale..=scale));
    for (k, x) in verts.iter().enumerate() {
        let (m, i) = (x.m as i64, x.i as i64);
        h[k] += -b * (i * i - i * m + m * m) + p * m + q * i;
    }
    let top = h[0];
    h.iter_mut().for_each(|x| *x -= top);
    let mut hive = HiveLabel::new(grid, h).expect("sized to the grid");
    debug_assert!(hive.is_hive());
    let interior: Vec<usize> =
        (0..verts.len()).filter(|&k| verts[k].i > 0 && verts[k].i < verts[k].m && verts[k].m < grid.n()).collect();
    if !interior.is_empty() {
        let mut values = hive.values().to_vec();
        for _ in 0..rng.gen_range(0..=2 * interior.len()) {
            let v = *interior.choose(rng).expect("nonempty");
            let step = if rng.gen_bool(0.5) { 1 } else { -1 };
            values[v] += step;
            let candidate = HiveLabel::new(grid, values.clone()).expect("sized to the grid");
            if candidate.is_hive() {
                hive = candidate;
            } else {
                values[v] -= step;
            }
        }
    }
    hive
}
