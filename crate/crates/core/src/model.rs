//! Network model: library, users, demand and caching distributions.
//!
//! Indices are 0-based in the API (file `f` of `m`, user `u` of `n`, packet
//! `index` of `B`). Everything rendered for humans or written to disk is
//! 1-based.

use std::fmt;

use rand::Rng;

use crate::{Error, Result};

/// Row-sum tolerance for probability columns.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Slack allowed on `M_u·p_{f,u} ≤ 1` so that `p = 1/M` survives rounding.
const MASS_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub users: usize,
    pub files: usize,
    pub packets: usize,
    /// Per-user cache size in files.
    pub cache: Vec<f64>,
}

impl SystemConfig {
    pub fn new(users: usize, files: usize, packets: usize, cache: Vec<f64>) -> Result<Self> {
        let config = Self {
            users,
            files,
            packets,
            cache,
        };
        config.check()?;
        Ok(config)
    }

    /// Every user gets the same cache size `m_cache`.
    pub fn homogeneous(users: usize, files: usize, packets: usize, m_cache: f64) -> Result<Self> {
        Self::new(users, files, packets, vec![m_cache; users])
    }

    pub fn check(&self) -> Result<()> {
        if self.users == 0 || self.files == 0 || self.packets == 0 {
            return Err(Error::Config(format!(
                "n, m and B must be positive (n={}, m={}, B={})",
                self.users, self.files, self.packets
            )));
        }
        if self.cache.len() != self.users {
            return Err(Error::Dimension(format!(
                "{} cache sizes for {} users",
                self.cache.len(),
                self.users
            )));
        }
        for (u, &mu) in self.cache.iter().enumerate() {
            if !(0.0..=self.files as f64).contains(&mu) {
                return Err(Error::Config(format!(
                    "cache size of user {} is {mu}, must lie in [0, {}]",
                    u + 1,
                    self.files
                )));
            }
        }
        Ok(())
    }

    /// Cache budget of user `u` in packets, `⌊M_u·B⌋`.
    pub fn packet_budget(&self, u: usize) -> usize {
        // The epsilon keeps e.g. 0.3·10 = 2.9999999999999996 from losing a packet.
        (self.cache[u] * self.packets as f64 + 1e-9).floor() as usize
    }

    pub fn is_homogeneous(&self) -> bool {
        self.cache.windows(2).all(|w| w[0] == w[1])
    }
}

/// Column-stochastic matrix: one probability vector over files per user.
#[derive(Debug, Clone, PartialEq)]
struct Columns {
    cols: Vec<Vec<f64>>,
}

impl Columns {
    fn files(&self) -> usize {
        self.cols.first().map_or(0, Vec::len)
    }

    fn is_homogeneous(&self) -> bool {
        self.cols.windows(2).all(|w| w[0] == w[1])
    }

    fn check(&self) -> Result<()> {
        let m = self.files();
        if self.cols.is_empty() || m == 0 {
            return Err(Error::Dimension("empty probability matrix".into()));
        }
        for (u, col) in self.cols.iter().enumerate() {
            if col.len() != m {
                return Err(Error::Dimension(format!(
                    "user {} has {} entries, expected {m}",
                    u + 1,
                    col.len()
                )));
            }
            for (f, &p) in col.iter().enumerate() {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::ProbabilityRange {
                        file: f + 1,
                        user: u + 1,
                        value: p,
                    });
                }
            }
            let sum: f64 = col.iter().sum();
            if (sum - 1.0).abs() > SUM_TOLERANCE {
                return Err(Error::RowSum { user: u + 1, sum });
            }
        }
        Ok(())
    }
}

/// Demand distribution `Q = [q_{f,u}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandDistribution(Columns);

impl DemandDistribution {
    /// Build from per-user columns (`columns[u][f] = q_{f,u}`).
    pub fn from_columns(columns: Vec<Vec<f64>>) -> Result<Self> {
        let q = Self(Columns { cols: columns });
        q.0.check()?;
        Ok(q)
    }

    /// Same popularity vector for every user.
    pub fn homogeneous(q: Vec<f64>, users: usize) -> Result<Self> {
        Self::from_columns(vec![q; users])
    }

    pub fn users(&self) -> usize {
        self.0.cols.len()
    }

    pub fn files(&self) -> usize {
        self.0.files()
    }

    pub fn prob(&self, file: usize, user: usize) -> f64 {
        self.0.cols[user][file]
    }

    pub fn column(&self, user: usize) -> &[f64] {
        &self.0.cols[user]
    }

    pub fn is_homogeneous(&self) -> bool {
        self.0.is_homogeneous()
    }
}

/// Caching distribution `P = [p_{f,u}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CachingDistribution(Columns);

impl CachingDistribution {
    pub fn from_columns(columns: Vec<Vec<f64>>) -> Result<Self> {
        let p = Self(Columns { cols: columns });
        p.0.check()?;
        Ok(p)
    }

    pub fn homogeneous(p: Vec<f64>, users: usize) -> Result<Self> {
        Self::from_columns(vec![p; users])
    }

    pub fn uniform(files: usize, users: usize) -> Result<Self> {
        Self::homogeneous(vec![1.0 / files as f64; files], users)
    }

    /// `p_f = 1/cutoff` on the first `cutoff` files of each user's
    /// popularity order, zero elsewhere.
    pub fn truncated_uniform(q: &DemandDistribution, cutoffs: &[usize]) -> Result<Self> {
        let cols = (0..q.users())
            .map(|u| {
                let order = popularity_order(q.column(u));
                let k = cutoffs[u].clamp(1, q.files());
                let mut col = vec![0.0; q.files()];
                for &f in &order[..k] {
                    col[f] = 1.0 / k as f64;
                }
                col
            })
            .collect();
        Self::from_columns(cols)
    }

    pub fn users(&self) -> usize {
        self.0.cols.len()
    }

    pub fn files(&self) -> usize {
        self.0.files()
    }

    pub fn prob(&self, file: usize, user: usize) -> f64 {
        self.0.cols[user][file]
    }

    pub fn column(&self, user: usize) -> &[f64] {
        &self.0.cols[user]
    }

    pub fn is_homogeneous(&self) -> bool {
        self.0.is_homogeneous()
    }
}

/// Files sorted by non-increasing probability, ties by smaller index.
pub fn popularity_order(col: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..col.len()).collect();
    order.sort_by(|&a, &b| col[b].total_cmp(&col[a]).then(a.cmp(&b)));
    order
}

/// Request vector: `files[u]` is the file requested by user `u`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DemandVector {
    pub files: Vec<usize>,
}

impl DemandVector {
    pub fn new(files: Vec<usize>) -> Self {
        Self { files }
    }

    pub fn users(&self) -> usize {
        self.files.len()
    }

    /// Stable 64-bit digest (FNV-1a), used to tag trials in reports.
    pub fn digest(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for &f in &self.files {
            for b in (f as u64).to_le_bytes() {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        }
        h
    }
}

/// A packet: `(file, index)`, both 0-based. Displays as 1-based `file:index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PacketId {
    pub file: u32,
    pub index: u32,
}

impl PacketId {
    pub fn new(file: usize, index: usize) -> Self {
        Self {
            file: file as u32,
            index: index as u32,
        }
    }

    /// Dense id in `0..m·B`.
    pub fn linear(self, packets: usize) -> usize {
        self.file as usize * packets + self.index as usize
    }

    /// Parse a 1-based `file:index` token.
    pub fn parse(token: &str) -> Option<Self> {
        let (f, i) = token.split_once(':')?;
        let f: u32 = f.trim().parse().ok()?;
        let i: u32 = i.trim().parse().ok()?;
        (f >= 1 && i >= 1).then(|| Self {
            file: f - 1,
            index: i - 1,
        })
    }
}

impl fmt::Display for PacketId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.file + 1, self.index + 1)
    }
}

/// Outcome of one delivery: color count and the induced rate in file units.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSample {
    pub colors: usize,
    pub rate: f64,
    pub scheme: String,
}

impl RateSample {
    pub fn new(scheme: impl Into<String>, colors: usize, packets: usize) -> Self {
        Self {
            colors,
            rate: colors as f64 / packets as f64,
            scheme: scheme.into(),
        }
    }
}

/// Zipf popularity `q_f ∝ f^{-alpha}`, identical for all users.
pub fn zipf_distribution(files: usize, alpha: f64, users: usize) -> Result<DemandDistribution> {
    DemandDistribution::homogeneous(zipf_weights(files, alpha)?, users)
}

/// The normalized Zipf probability vector over `files` items.
pub fn zipf_weights(files: usize, alpha: f64) -> Result<Vec<f64>> {
    if files == 0 {
        return Err(Error::Config("zipf needs at least one file".into()));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::Config(format!(
            "zipf exponent must be >= 0, got {alpha}"
        )));
    }
    let w: Vec<f64> = (1..=files).map(|f| (f as f64).powf(-alpha)).collect();
    // Sum smallest-first for accuracy.
    let total: f64 = w.iter().rev().sum();
    Ok(w.into_iter().map(|x| x / total).collect())
}

/// Draw each user's request independently from its column of `q`.
pub fn sample_demand<R: Rng + ?Sized>(q: &DemandDistribution, rng: &mut R) -> DemandVector {
    let files = (0..q.users())
        .map(|u| sample_index(q.column(u), rng))
        .collect();
    DemandVector { files }
}

fn sample_index<R: Rng + ?Sized>(col: &[f64], rng: &mut R) -> usize {
    let x: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (f, &p) in col.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last_positive = f;
            if x < acc {
                return f;
            }
        }
    }
    last_positive
}

/// Check that `config`, `q` and `p` describe a consistent instance.
pub fn validate(
    config: &SystemConfig,
    q: &DemandDistribution,
    p: &CachingDistribution,
) -> Result<()> {
    config.check()?;
    for (name, users, files) in [
        ("demand", q.users(), q.files()),
        ("caching", p.users(), p.files()),
    ] {
        if users != config.users || files != config.files {
            return Err(Error::Dimension(format!(
                "{name} distribution is {files}x{users}, expected {}x{}",
                config.files, config.users
            )));
        }
    }
    q.0.check()?;
    p.0.check()?;
    for u in 0..config.users {
        for f in 0..config.files {
            let mass = config.cache[u] * p.prob(f, u);
            if mass > 1.0 + MASS_SLACK {
                return Err(Error::CacheMass {
                    file: f + 1,
                    user: u + 1,
                    value: mass,
                });
            }
        }
    }
    Ok(())
}
