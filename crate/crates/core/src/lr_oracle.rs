//! Littlewood-Richardson tableaux counted by direct backtracking.
//!
//! Cells of the skew shape `nu/lambda` are filled in reverse reading order (rows top to
//! bottom, each row right to left), so the lattice condition is a prefix condition that
//! can be checked in O(1) per placement.

use crate::partition::Partition;

struct Search<'a> {
    /// `(row, col)` in reverse reading order.
    cells: Vec<(usize, usize)>,
    lambda: &'a Partition,
    nu: &'a Partition,
    content: Vec<u64>,
    count: Vec<u64>,
    filling: Vec<Vec<u32>>,
    stop_at_first: bool,
}

impl Search<'_> {
    fn in_shape(&self, r: usize, c: usize) -> bool {
        (c as u64) >= self.lambda.get(r) && (c as u64) < self.nu.get(r)
    }

    fn run(&mut self, idx: usize) -> u64 {
        if idx == self.cells.len() {
            return 1;
        }
        let (r, c) = self.cells[idx];
        let mut hi = self.content.len() as u32;
        if self.in_shape(r, c + 1) {
            hi = hi.min(self.filling[r][c + 1]);
        }
        let lo = if r > 0 && self.in_shape(r - 1, c) { self.filling[r - 1][c] + 1 } else { 1 };
        let mut total = 0;
        for v in lo..=hi {
            let i = (v - 1) as usize;
            if self.count[i] >= self.content[i] || (i > 0 && self.count[i] + 1 > self.count[i - 1]) {
                continue;
            }
            self.count[i] += 1;
            self.filling[r][c] = v;
            total += self.run(idx + 1);
            self.count[i] -= 1;
            if self.stop_at_first && total > 0 {
                break;
            }
        }
        total
    }
}

fn search(lambda: &Partition, mu: &Partition, nu: &Partition, stop_at_first: bool) -> u64 {
    if lambda.weight().checked_add(mu.weight()) != Some(nu.weight()) || !nu.contains(lambda) {
        return 0;
    }
    let rows = nu.length();
    let mut cells = Vec::new();
    for r in 0..rows {
        for c in (lambda.get(r)..nu.get(r)).rev() {
            cells.push((r, c as usize));
        }
    }
    let content: Vec<u64> = mu.parts()[..mu.length()].to_vec();
    let filling = (0..rows).map(|r| vec![0; nu.get(r) as usize]).collect();
    let mut s = Search {
        cells,
        lambda,
        nu,
        count: vec![0; content.len()],
        content,
        filling,
        stop_at_first,
    };
    s.run(0)
}

/// Number of LR tableaux of shape `nu/lambda` and content `mu`; zero unless
/// `lambda` fits in `nu` and the weights add up.
pub fn lr_count(lambda: &Partition, mu: &Partition, nu: &Partition) -> u64 {
    search(lambda, mu, nu, false)
}

pub fn lr_positive(lambda: &Partition, mu: &Partition, nu: &Partition) -> bool {
    search(lambda, mu, nu, true) > 0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    /// All fillings of the skew shape with entries in 1..=len(mu), filtered by every
    /// tableau condition at once.
    fn brute(lambda: &Partition, mu: &Partition, nu: &Partition) -> u64 {
        if !nu.contains(lambda) || lambda.weight() + mu.weight() != nu.weight() {
            return 0;
        }
        let cells: Vec<(usize, usize)> = (0..nu.len())
            .flat_map(|r| (lambda.get(r)..nu.get(r)).map(move |c| (r, c as usize)))
            .collect();
        let k = mu.length().max(1) as u32;
        let mut total = 0;
        let mut vals = vec![1u32; cells.len()];
        loop {
            let at = |r: usize, c: usize| cells.iter().position(|&x| x == (r, c)).map(|i| vals[i]);
            let rows_ok = cells.iter().all(|&(r, c)| at(r, c + 1).is_none_or(|w| at(r, c).unwrap() <= w));
            let cols_ok = cells.iter().all(|&(r, c)| at(r + 1, c).is_none_or(|w| at(r, c).unwrap() < w));
            let mut word: Vec<(usize, usize)> = cells.clone();
            word.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
            let mut cnt = vec![0u64; k as usize + 1];
            let mut lattice = true;
            for (r, c) in word {
                let v = at(r, c).unwrap() as usize;
                cnt[v] += 1;
                if v > 1 && cnt[v] > cnt[v - 1] {
                    lattice = false;
                }
            }
            let content_ok = (1..=k as usize).all(|v| cnt[v] == mu.get(v - 1));
            if rows_ok && cols_ok && lattice && content_ok {
                total += 1;
            }
            let mut i = 0;
            loop {
                if i == vals.len() {
                    return total;
                }
                if vals[i] < k {
                    vals[i] += 1;
                    break;
                }
                vals[i] = 1;
                i += 1;
            }
        }
    }

    #[test]
    fn documented_values() {
        assert_eq!(lr_count(&p("1"), &p("1"), &p("1,1")), 1);
        assert_eq!(lr_count(&p("2,1"), &p("2,1"), &p("3,2,1")), 2);
        assert_eq!(lr_count(&p("2"), &p("1,1"), &p("2,2")), 0);
        assert_eq!(lr_count(&p("4,2"), &p("4,2"), &p("6,4,2")), 3);
        assert!(lr_positive(&p(""), &p(""), &p("")));
        assert_eq!(lr_count(&p("2"), &p("1"), &p("1,1,1")), 0);
    }

    #[test]
    fn matches_brute_force() {
        let parts: Vec<Partition> = {
            let mut v = Vec::new();
            for a in 0..=3u64 {
                for b in 0..=a {
                    for c in 0..=b {
                        v.push(Partition::new(vec![a, b, c]).unwrap());
                    }
                }
            }
            v
        };
        for l in &parts {
            for m in &parts {
                for n in &parts {
                    if l.weight() + m.weight() != n.weight() || n.weight() > 6 {
                        continue;
                    }
                    let c = lr_count(l, m, n);
                    assert_eq!(c, brute(l, m, n), "{l} {m} {n}");
                    assert_eq!(c, lr_count(m, l, n));
                    assert_eq!(lr_positive(l, m, n), c > 0);
                }
            }
        }
    }
}
