//! Invariant suites shared by the `selftest` command and the acceptance tests.
//!
//! Every suite returns an [`Outcome`]: how many cases ran and a description of each
//! violation found.

use crate::enumerate::{build_pz_graph, count_p, enumerate_p, DEFAULT_LIMIT};
use crate::flow::{CapacityMap, FlowClass};
use crate::grid::{vertex_index, TriangleGrid};
use crate::lr_oracle::{lr_count, lr_positive};
use crate::partition::Instance;
use crate::residual::{build_r, BfsScratch, Mode};
use crate::sample::{all_partitions, random_flow, random_hive, random_near_positive_instance};
use crate::solver::{augment, ceil_log2, decide_plain, decide_scaling, decide_scaling_with, Check, SolveOptions};
use rand::Rng;
use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

#[derive(Debug, Clone)]
pub struct Outcome {
    pub name: String,
    pub cases: usize,
    pub failures: Vec<String>,
    pub elapsed: Duration,
    /// Free-form measurements shown next to the verdict.
    pub detail: String,
}

impl Outcome {
    fn new(name: &str) -> Self {
        Outcome { name: name.to_string(), cases: 0, failures: Vec::new(), elapsed: Duration::ZERO, detail: String::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, msg: String) {
        if self.failures.len() < 20 {
            self.failures.push(msg);
        } else if self.failures.len() == 20 {
            self.failures.push("...".into());
        }
    }

    fn timed<F: FnOnce(&mut Outcome)>(name: &str, body: F) -> Outcome {
        let mut o = Outcome::new(name);
        let start = Instant::now();
        body(&mut o);
        o.elapsed = start.elapsed();
        o
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}: {} cases, {:.2?}", self.name, self.cases, self.elapsed)?;
        if !self.detail.is_empty() {
            write!(f, "; {}", self.detail)?;
        }
        if let Some(first) = self.failures.first() {
            write!(f, "; first violation: {first}")?;
        }
        Ok(())
    }
}

/// All instances on grids of size `1..=max_n` whose three partitions have parts at most
/// `max_part` and matching weights.
pub fn small_instances(max_n: usize, max_part: u64) -> Vec<Instance> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let ps = all_partitions(n, max_part);
        for l in &ps {
            for m in &ps {
                for nu in ps.iter().filter(|p| p.weight() == l.weight() + m.weight()) {
                    out.push(Instance::with_n(l.clone(), m.clone(), nu.clone(), n).expect("valid by construction"));
                }
            }
        }
    }
    out
}

/// Scaling verdicts against the tableau oracle; plain agreement is checked on the side.
pub fn positivity_oracle(instances: &[Instance]) -> Outcome {
    Outcome::timed("positivity oracle", |o| {
        for inst in instances {
            o.cases += 1;
            match decide_scaling::<i64>(inst) {
                Ok(r) if r.positive == lr_positive(&inst.lambda, &inst.mu, &inst.nu) => {}
                Ok(r) => o.fail(format!("{inst}: solver says {}", r.positive)),
                Err(e) => o.fail(format!("{inst}: {e}")),
            }
        }
    })
}

pub fn plain_scaling_agreement(instances: &[Instance]) -> Outcome {
    Outcome::timed("plain/scaling agreement", |o| {
        for inst in instances {
            o.cases += 1;
            match (decide_plain::<i64>(inst), decide_scaling::<i64>(inst)) {
                (Ok(a), Ok(b)) if a.positive == b.positive && a.throughput == b.throughput => {}
                (a, b) => o.fail(format!("{inst}: {:?} vs {:?}", a.map(|r| r.throughput), b.map(|r| r.throughput))),
            }
        }
    })
}

/// Hive enumeration against the tableau oracle. Returns the counts for reuse.
pub fn counting_oracle(instances: &[Instance]) -> (Outcome, Vec<(Instance, usize)>) {
    let mut counts = Vec::new();
    let o = Outcome::timed("counting oracle", |o| {
        for inst in instances {
            o.cases += 1;
            match count_p(inst, DEFAULT_LIMIT) {
                Ok(c) => {
                    let expected = lr_count(&inst.lambda, &inst.mu, &inst.nu);
                    if c as u64 != expected {
                        o.fail(format!("{inst}: {c} hives, oracle {expected}"));
                    }
                    counts.push((inst.clone(), c));
                }
                Err(e) => o.fail(format!("{inst}: {e}")),
            }
        }
        let max = counts.iter().map(|x| x.1).max().unwrap_or(0);
        o.detail = format!("largest coefficient {max}");
    });
    (o, counts)
}

/// The neighbour graph on `P_Z` is connected and every edge is a secure cycle from both ends.
pub fn connectedness(counts: &[(Instance, usize)]) -> Outcome {
    Outcome::timed("P_Z connectedness", |o| {
        let mut edges = 0;
        for (inst, _) in counts.iter().filter(|x| x.1 >= 2) {
            o.cases += 1;
            let g = match enumerate_p(inst, DEFAULT_LIMIT).and_then(build_pz_graph) {
                Ok(g) => g,
                Err(e) => {
                    o.fail(format!("{inst}: {e}"));
                    continue;
                }
            };
            edges += g.edges.len();
            if !g.is_connected() {
                o.fail(format!("{inst}: neighbour graph is disconnected"));
            }
            if let Some(&(a, b)) = g.insecure.first() {
                o.fail(format!("{inst}: difference of points {a} and {b} is not secure"));
            }
        }
        o.detail = format!("{edges} neighbour pairs");
    })
}

/// Multiplicity-free instances stay multiplicity-free under stretching.
pub fn fulton(counts: &[(Instance, usize)], factors: &[u64]) -> Outcome {
    Outcome::timed("Fulton stretching", |o| {
        for (inst, _) in counts.iter().filter(|x| x.1 == 1) {
            for &k in factors {
                o.cases += 1;
                match inst.scaled(k).and_then(|s| count_p(&s, DEFAULT_LIMIT)) {
                    Ok(1) => {}
                    Ok(c) => o.fail(format!("{inst} scaled by {k}: {c} hives")),
                    Err(e) => o.fail(format!("{inst} scaled by {k}: {e}")),
                }
            }
        }
    })
}

pub fn worked_instance() -> Instance {
    Instance::parse("5,5,5,5,3,2,1,1,1,0,0", "8,8,7,5,3,3,3,3,0,0,0", "10,9,9,9,7,4,4,4,4,4,4")
        .expect("valid instance")
}

pub fn worked_example(time_limit: Duration) -> Outcome {
    Outcome::timed("worked example", |o| {
        o.cases = 1;
        let start = Instant::now();
        match decide_scaling::<i64>(&worked_instance()) {
            Ok(r) => {
                let t = start.elapsed();
                o.detail = format!("throughput {} of {}, {t:.2?}", r.throughput, r.target);
                if !r.positive || r.throughput != 68 {
                    o.fail(format!("verdict {} with throughput {}", r.positive, r.throughput));
                }
                if t > time_limit {
                    o.fail(format!("took {t:.2?}"));
                }
            }
            Err(e) => o.fail(e.to_string()),
        }
    })
}

/// Augmentation counts of one scaling run.
#[derive(Debug, Clone)]
pub struct PhaseCounts {
    pub instance: Instance,
    pub per_phase: Vec<usize>,
}

impl PhaseCounts {
    pub fn total(&self) -> usize {
        self.per_phase.iter().sum()
    }

    /// `6n ceil(log2 nu_1) + 1`.
    pub fn literal_bound(&self) -> usize {
        let nu1 = self.instance.nu.first();
        if nu1 == 0 {
            return 1;
        }
        6 * self.instance.n() * ceil_log2(nu1) as usize + 1
    }

    /// `6n ceil(log2 nu_1)` for the later phases plus the number of parts equal to `2^l`
    /// for the first one.
    pub fn corrected_bound(&self) -> usize {
        let nu1 = self.instance.nu.first();
        if nu1 == 0 {
            return 1;
        }
        let top = ceil_log2(nu1);
        let full = self.instance.nu.parts().iter().filter(|&&x| x == 1u64 << top).count();
        6 * self.instance.n() * top as usize + full.max(1)
    }
}

pub fn phase_counts(instances: &[Instance]) -> Vec<PhaseCounts> {
    instances
        .iter()
        .filter_map(|i| {
            decide_scaling::<i64>(i)
                .ok()
                .map(|r| PhaseCounts { instance: i.clone(), per_phase: r.augmentations_per_phase() })
        })
        .collect()
}

/// Phases after the first use at most `6n` augmentations.
pub fn phase_bound(runs: &[PhaseCounts]) -> Outcome {
    Outcome::timed("augmentations per later phase <= 6n", |o| {
        let mut worst = 0.0f64;
        for r in runs {
            o.cases += 1;
            let n = r.instance.n();
            for (k, &a) in r.per_phase.iter().enumerate().skip(1) {
                worst = worst.max(a as f64 / (6 * n) as f64);
                if a > 6 * n {
                    o.fail(format!("{}: phase {k} used {a} > {}", r.instance, 6 * n));
                }
            }
        }
        o.detail = format!("largest ratio to 6n: {worst:.3}");
    })
}

pub fn total_bound_literal(runs: &[PhaseCounts]) -> Outcome {
    Outcome::timed("total augmentations <= 6n ceil(log2 nu_1) + 1", |o| {
        for r in runs {
            o.cases += 1;
            if r.total() > r.literal_bound() {
                o.fail(format!("{}: {} augmentations > {}", r.instance, r.total(), r.literal_bound()));
            }
        }
    })
}

pub fn total_bound_corrected(runs: &[PhaseCounts]) -> Outcome {
    Outcome::timed("total augmentations <= 6n ceil(log2 nu_1) + #{i : nu_i = 2^top}", |o| {
        for r in runs {
            o.cases += 1;
            if r.total() > r.corrected_bound() {
                o.fail(format!("{}: {} augmentations > {}", r.instance, r.total(), r.corrected_bound()));
            }
        }
    })
}

/// A positive instance of size `n` with `nu_1` close to `big`: `nu` is the sorted sum of
/// `lambda` and a shuffled `mu`.
pub fn large_instance<R: Rng>(rng: &mut R, n: usize, big: u64) -> Instance {
    loop {
        let inst = random_near_positive_instance(rng, n, big / 2);
        if inst.nu.first() >= big * 4 / 5 {
            return inst;
        }
    }
}

/// Wall time of scaling runs, with only the border checks after each augmentation.
pub fn timing<R: Rng>(rng: &mut R, n: usize, big: u64, runs: usize, limit: Duration) -> Outcome {
    Outcome::timed(&format!("wall time n={n}, nu_1 ~ {big}"), |o| {
        let mut times = Vec::new();
        for _ in 0..runs {
            let inst = large_instance(rng, n, big);
            o.cases += 1;
            let start = Instant::now();
            let r = decide_scaling_with::<i64>(&inst, SolveOptions { check: Check::Borders });
            let t = start.elapsed();
            match r {
                Ok(r) => times.push(format!("{t:.2?} ({} aug, nu_1={})", r.total_augmentations(), inst.nu.first())),
                Err(e) => o.fail(format!("nu_1={}: {e}", inst.nu.first())),
            }
            if t > limit {
                o.fail(format!("run with nu_1={} took {t:.2?}", inst.nu.first()));
            }
        }
        o.detail = times.join(", ");
    })
}

/// Repeated shortest-turnpath augmentation on random instances; after every step the flow
/// must stay in `B`.
pub fn shortest_path_theorem<R: Rng>(rng: &mut R, steps: usize, max_n: usize) -> Outcome {
    Outcome::timed("shortest path theorem", |o| {
        let mut instances = 0;
        while o.cases < steps {
            let n = rng.gen_range(1..=max_n);
            let max_part = rng.gen_range(1..=8);
            let inst = random_near_positive_instance(rng, n, max_part);
            instances += 1;
            let grid = Arc::new(TriangleGrid::new(n).expect("n >= 1"));
            let caps = CapacityMap::<i64>::new(&grid, &inst).expect("valid instance");
            let mut f = FlowClass::zero(&grid);
            let mut r = build_r(&grid);
            let mut scratch = BfsScratch::default();
            loop {
                r.refresh(&f, &caps, Mode::Flow);
                let Some(p) = r.shortest_st_turnpath_with(&mut scratch) else { break };
                augment(&mut f, &p, 1);
                o.cases += 1;
                if !f.in_b(&caps) {
                    o.fail(format!("{inst}: left B after {} turns", p.turns.len()));
                    break;
                }
            }
        }
        o.detail = format!("{instances} instances");
    })
}

/// `positive(N lambda, N mu, N nu) <=> positive(lambda, mu, nu)`.
pub fn saturation<R: Rng>(rng: &mut R, triples: usize, factors: &[u64]) -> Outcome {
    Outcome::timed("saturation", |o| {
        let mut positives = 0;
        for _ in 0..triples {
            let n = rng.gen_range(1..=6);
            let max_part = rng.gen_range(1..=6);
            let inst = random_near_positive_instance(rng, n, max_part);
            let base = match decide_scaling::<i64>(&inst) {
                Ok(r) => r.positive,
                Err(e) => {
                    o.fail(format!("{inst}: {e}"));
                    continue;
                }
            };
            positives += base as usize;
            for &k in factors {
                o.cases += 1;
                match inst.scaled(k).and_then(|s| decide_scaling::<i64>(&s)) {
                    Ok(r) if r.positive == base => {}
                    Ok(r) => o.fail(format!("{inst} scaled by {k}: {} vs {base}", r.positive)),
                    Err(e) => o.fail(format!("{inst} scaled by {k}: {e}")),
                }
            }
        }
        o.detail = format!("{positives} of {triples} base triples positive");
    })
}

/// The six neighbours of an interior vertex in cyclic order.
fn ring(grid: &TriangleGrid, v: usize) -> [usize; 6] {
    let x = grid.vertex(v);
    let (m, i) = (x.m, x.i);
    [
        vertex_index(m, i + 1),
        vertex_index(m + 1, i + 1),
        vertex_index(m + 1, i),
        vertex_index(m, i - 1),
        vertex_index(m - 1, i - 1),
        vertex_index(m - 1, i),
    ]
}

/// For every hexagon and each of its three splits into trapezoids, the two slack sums agree;
/// both rhombi of one half flat forces both of the other half flat.
pub fn hexagon_violations(f: &FlowClass<i64>) -> Vec<String> {
    let g = f.grid();
    let mut out = Vec::new();
    for v in 0..g.num_vertices() {
        let x = g.vertex(v);
        if x.i == 0 || x.i == x.m || x.m == g.n() {
            continue;
        }
        let nb = ring(g, v);
        let rho = |j: usize| {
            let e = g.edge_between(v, nb[j % 6]).expect("ring neighbour");
            g.rhombus_of(e).expect("interior edge")
        };
        for k in 0..3 {
            let (a, b) = ((rho(k + 1), rho(k + 2)), (rho(k + 4), rho(k + 5)));
            let (sa, sb) = (f.slack(a.0) + f.slack(a.1), f.slack(b.0) + f.slack(b.1));
            if sa != sb {
                out.push(format!("hexagon at {v}, split {k}: {sa} != {sb}"));
            }
            let flat = |p: (usize, usize)| f.slack(p.0) == 0 && f.slack(p.1) == 0;
            if f.is_hive_flow() && flat(a) != flat(b) {
                out.push(format!("hexagon at {v}, split {k}: flatness differs"));
            }
        }
    }
    out
}

/// Negative contributions in the support come with their antipodal positive ones,
/// wherever the rhombus has nonnegative slack.
pub fn antipodal_violations(d: &FlowClass<i64>) -> Vec<String> {
    let g = d.grid();
    let mut out = Vec::new();
    for (rho, r) in g.rhombi().iter().enumerate() {
        if d.slack(rho) < 0 {
            continue;
        }
        for &c in &r.contributions.negative {
            if d.supports(c) && !d.supports(g.antipodal(rho, c)) {
                out.push(format!("rhombus {rho}: {c:?} without its antipode"));
            }
        }
    }
    out
}

pub fn hexagon_suite<R: Rng>(rng: &mut R, per_n: usize, sizes: &[usize]) -> Outcome {
    Outcome::timed("hexagon equality", |o| {
        for &n in sizes {
            let g = Arc::new(TriangleGrid::new(n).expect("n >= 1"));
            for j in 0..per_n {
                o.cases += 1;
                let f = if j % 2 == 0 { random_hive(rng, &g, 6).to_flow() } else { random_flow(rng, &g, 8) };
                if let Some(v) = hexagon_violations(&f).into_iter().next() {
                    o.fail(format!("n={n}: {v}"));
                }
            }
        }
    })
}

pub fn antipodal_suite<R: Rng>(rng: &mut R, per_n: usize, sizes: &[usize]) -> Outcome {
    Outcome::timed("antipodal lemma", |o| {
        let mut negatives = 0;
        for &n in sizes {
            let g = Arc::new(TriangleGrid::new(n).expect("n >= 1"));
            for j in 0..per_n {
                o.cases += 1;
                // hive flows, and arbitrary flows where only some rhombi qualify
                let d = if j % 2 == 0 { random_hive(rng, &g, 6).to_flow() } else { random_flow(rng, &g, 3) };
                negatives += g
                    .rhombi()
                    .iter()
                    .enumerate()
                    .filter(|(rho, r)| d.slack(*rho) >= 0 && r.contributions.negative.iter().any(|&c| d.supports(c)))
                    .count();
                if let Some(v) = antipodal_violations(&d).into_iter().next() {
                    o.fail(format!("n={n}: {v}"));
                }
            }
        }
        o.detail = format!("{negatives} rhombi with a negative contribution in the support");
    })
}

/// `c(N lambda, N mu, N nu) = N + 1` for the given `c = 2` instance.
pub fn ktt(inst: &Instance, max_factor: u64) -> Outcome {
    Outcome::timed("KTT stretching", |o| {
        let mut counts = Vec::new();
        for k in 1..=max_factor {
            o.cases += 1;
            match inst.scaled(k).and_then(|s| count_p(&s, DEFAULT_LIMIT)) {
                Ok(c) => {
                    counts.push(c);
                    if c as u64 != k + 1 {
                        o.fail(format!("N={k}: {c} hives"));
                    }
                }
                Err(e) => o.fail(format!("N={k}: {e}")),
            }
        }
        o.detail = format!("counts {counts:?}");
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn quick_suites_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let small = small_instances(2, 2);
        assert!(positivity_oracle(&small).passed());
        let (o, counts) = counting_oracle(&small);
        assert!(o.passed());
        assert!(connectedness(&counts).passed());
        assert!(fulton(&counts, &[2]).passed());
        assert!(shortest_path_theorem(&mut rng, 200, 4).passed());
        assert!(hexagon_suite(&mut rng, 20, &[3, 4]).passed());
        assert!(antipodal_suite(&mut rng, 20, &[3, 4]).passed());
        let i = Instance::parse("2,1,0", "2,1,0", "3,2,1").unwrap();
        assert!(ktt(&i, 2).passed());
    }

    #[test]
    fn literal_total_bound_fails_on_unit_columns() {
        let runs = phase_counts(&[Instance::parse("1", "1", "1,1").unwrap()]);
        assert_eq!(runs[0].per_phase, vec![2]);
        assert!(!total_bound_literal(&runs).passed());
        assert!(total_bound_corrected(&runs).passed());
    }
}
