use crate::error::{Error, Result};
use std::fmt;
use std::str::FromStr;

/// Weakly decreasing tuple of nonnegative integers. Trailing zeros are kept as given.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Partition {
    parts: Vec<u64>,
    weight: u64,
}

impl Partition {
    pub fn new(parts: Vec<u64>) -> Result<Self> {
        if let Some(w) = parts.windows(2).find(|w| w[0] < w[1]) {
            return Err(Error::NotAPartition(format!(
                "parts must be weakly decreasing, found {} before {}",
                w[0], w[1]
            )));
        }
        let weight = parts
            .iter()
            .try_fold(0u64, |acc, &p| acc.checked_add(p))
            .ok_or_else(|| Error::NotAPartition("weight overflows u64".into()))?;
        Ok(Partition { parts, weight })
    }

    pub fn zero() -> Self {
        Partition::default()
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Number of nonzero parts.
    pub fn length(&self) -> usize {
        self.parts.iter().take_while(|&&p| p > 0).count()
    }

    pub fn weight(&self) -> u64 {
        self.weight
    }

    /// 0-based part, zero past the end.
    pub fn get(&self, i: usize) -> u64 {
        self.parts.get(i).copied().unwrap_or(0)
    }

    pub fn first(&self) -> u64 {
        self.get(0)
    }

    pub fn padded(&self, n: usize) -> Partition {
        let mut parts = self.parts.clone();
        if parts.len() < n {
            parts.resize(n, 0);
        }
        Partition { parts, weight: self.weight }
    }

    pub fn trimmed(&self) -> Partition {
        let parts = self.parts[..self.length()].to_vec();
        Partition { parts, weight: self.weight }
    }

    pub fn scaled(&self, factor: u64) -> Result<Partition> {
        let parts = self
            .parts
            .iter()
            .map(|&p| p.checked_mul(factor))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::NotAPartition("scaled part overflows u64".into()))?;
        Partition::new(parts)
    }

    /// Cellwise containment of Young diagrams.
    pub fn contains(&self, inner: &Partition) -> bool {
        (0..inner.len().max(self.len())).all(|i| inner.get(i) <= self.get(i))
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Comma-separated list; the empty string is the empty partition.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Partition::zero());
        }
        let parts = s
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::NotAPartition(format!("bad part {tok:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// A validated triple padded to a common length `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    pub lambda: Partition,
    pub mu: Partition,
    pub nu: Partition,
    n: usize,
}

impl Instance {
    pub fn new(lambda: Partition, mu: Partition, nu: Partition) -> Result<Self> {
        let n = lambda.len().max(mu.len()).max(nu.len()).max(1);
        Self::with_n(lambda, mu, nu, n)
    }

    /// Like [`Instance::new`] but with an explicit grid size (at least the longest input).
    pub fn with_n(lambda: Partition, mu: Partition, nu: Partition, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGrid);
        }
        for p in [&lambda, &mu, &nu] {
            if p.length() > n {
                return Err(Error::NotAPartition(format!("{p} has more than {n} nonzero parts")));
            }
        }
        let sum = lambda.weight().checked_add(mu.weight()).ok_or(Error::Overflow { limit: u64::MAX })?;
        if sum != nu.weight() {
            return Err(Error::WeightMismatch { nu: nu.weight(), sum });
        }
        let limit = (1u64 << 60) / n as u64;
        if nu.weight() > limit {
            return Err(Error::Overflow { limit });
        }
        let fit = |p: &Partition| {
            let mut q = p.trimmed().padded(n);
            q.parts.truncate(n);
            q
        };
        Ok(Instance { lambda: fit(&lambda), mu: fit(&mu), nu: fit(&nu), n })
    }

    pub fn parse(lambda: &str, mu: &str, nu: &str) -> Result<Self> {
        Instance::new(lambda.parse()?, mu.parse()?, nu.parse()?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn target(&self) -> u64 {
        self.nu.weight()
    }

    pub fn scaled(&self, factor: u64) -> Result<Instance> {
        Instance::with_n(
            self.lambda.scaled(factor)?,
            self.mu.scaled(factor)?,
            self.nu.scaled(factor)?,
            self.n,
        )
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "lambda={} mu={} nu={}", self.lambda, self.mu, self.nu)
    }
}
