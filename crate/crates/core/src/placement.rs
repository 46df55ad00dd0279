//! Cache placement: random popularity-based caching and the LFU baseline.

use std::fmt::Write as _;

use rand::seq::index;
use rand::Rng;

use crate::model::{popularity_order, validate, CachingDistribution, DemandDistribution};
use crate::{Error, PacketId, Result, SystemConfig};

/// Realized cache contents: for each user, the sorted set of cached packets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CachePlacement {
    packets: usize,
    cached: Vec<Vec<PacketId>>,
}

impl CachePlacement {
    /// Build from explicit per-user packet lists; duplicates are dropped.
    pub fn from_sets(packets: usize, mut cached: Vec<Vec<PacketId>>) -> Self {
        for set in &mut cached {
            set.sort_unstable();
            set.dedup();
        }
        Self { packets, cached }
    }

    pub fn empty(users: usize, packets: usize) -> Self {
        Self::from_sets(packets, vec![Vec::new(); users])
    }

    pub fn users(&self) -> usize {
        self.cached.len()
    }

    pub fn packets_per_file(&self) -> usize {
        self.packets
    }

    pub fn cached(&self, user: usize) -> &[PacketId] {
        &self.cached[user]
    }

    pub fn contains(&self, user: usize, packet: PacketId) -> bool {
        self.cached[user].binary_search(&packet).is_ok()
    }

    /// Number of packets of `file` held by `user`.
    pub fn count_of_file(&self, user: usize, file: usize) -> usize {
        let set = &self.cached[user];
        let lo = set.partition_point(|p| (p.file as usize) < file);
        let hi = set.partition_point(|p| (p.file as usize) <= file);
        hi - lo
    }

    /// Add a packet to a user's cache. Returns false if it was already there.
    pub fn insert(&mut self, user: usize, packet: PacketId) -> bool {
        match self.cached[user].binary_search(&packet) {
            Ok(_) => false,
            Err(pos) => {
                self.cached[user].insert(pos, packet);
                true
            }
        }
    }

    /// One line per user, space-separated 1-based `file:index` tokens.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for set in &self.cached {
            for (i, p) in set.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{p}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str, packets: usize) -> Result<Self> {
        let mut cached = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let mut set = Vec::new();
            for tok in line.split_whitespace() {
                let p = PacketId::parse(tok).ok_or_else(|| Error::Parse {
                    line: lineno + 1,
                    msg: format!("bad packet token {tok:?}"),
                })?;
                if p.index as usize >= packets {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        msg: format!("packet index in {tok} exceeds B={packets}"),
                    });
                }
                set.push(p);
            }
            cached.push(set);
        }
        Ok(Self::from_sets(packets, cached))
    }
}

/// Per-file packet counts for one user: floors of `p·M·B`, with the
/// leftover budget handed out by largest fractional remainder.
pub fn packet_counts(
    config: &SystemConfig,
    p: &CachingDistribution,
    user: usize,
) -> Result<Vec<usize>> {
    let b = config.packets;
    let budget = config.packet_budget(user);
    let targets: Vec<f64> = p
        .column(user)
        .iter()
        .map(|&pf| pf * config.cache[user] * b as f64)
        .collect();
    let mut counts: Vec<usize> = targets
        .iter()
        .map(|&t| (t + 1e-9).floor() as usize)
        .collect();
    if let Some((f, &count)) = counts.iter().enumerate().find(|(_, &c)| c > b) {
        return Err(Error::InfeasibleBudget {
            user: user + 1,
            file: f + 1,
            count,
            available: b,
        });
    }
    let assigned: usize = counts.iter().sum();
    let mut leftover = budget.saturating_sub(assigned);
    if leftover > 0 {
        let rem: Vec<f64> = targets
            .iter()
            .zip(&counts)
            .map(|(&t, &c)| t - c as f64)
            .collect();
        let mut order: Vec<usize> = (0..targets.len()).collect();
        order.sort_by(|&a, &c| rem[c].total_cmp(&rem[a]).then(a.cmp(&c)));
        for f in order {
            if leftover == 0 {
                break;
            }
            if counts[f] < b && rem[f] > 1e-9 {
                counts[f] += 1;
                leftover -= 1;
            }
        }
        if leftover > 0 {
            return Err(Error::Config(format!(
                "user {}: caching distribution cannot fill a budget of {budget} packets",
                user + 1
            )));
        }
    }
    Ok(counts)
}

/// Random caching: each user caches, for every file, a uniformly random
/// subset of its packets sized by `p_{f,u}·M_u·B`.
pub fn rap_place<R: Rng + ?Sized>(
    config: &SystemConfig,
    p: &CachingDistribution,
    rng: &mut R,
) -> Result<CachePlacement> {
    let b = config.packets;
    let mut cached = Vec::with_capacity(config.users);
    for u in 0..config.users {
        let counts = packet_counts(config, p, u)?;
        let mut set = Vec::with_capacity(counts.iter().sum());
        for (f, &k) in counts.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let mut picked: Vec<usize> = index::sample(rng, b, k).into_vec();
            picked.sort_unstable();
            set.extend(picked.into_iter().map(|i| PacketId::new(f, i)));
        }
        cached.push(set);
    }
    Ok(CachePlacement::from_sets(b, cached))
}

/// Validating wrapper over [`rap_place`].
pub fn rap_place_checked<R: Rng + ?Sized>(
    config: &SystemConfig,
    q: &DemandDistribution,
    p: &CachingDistribution,
    rng: &mut R,
) -> Result<CachePlacement> {
    validate(config, q, p)?;
    rap_place(config, p, rng)
}

/// Number of whole files an LFU cache of user `u` holds.
pub fn lfu_file_count(config: &SystemConfig, user: usize) -> usize {
    ((config.cache[user] + 1e-9).floor() as usize).min(config.files)
}

/// Files cached by user `u` under LFU steady state.
pub fn lfu_files(config: &SystemConfig, q: &DemandDistribution, user: usize) -> Vec<usize> {
    let mut files = popularity_order(q.column(user));
    files.truncate(lfu_file_count(config, user));
    files.sort_unstable();
    files
}

/// LFU steady state: every user holds all packets of its `⌊M_u⌋` most
/// popular files.
pub fn lfu_place(config: &SystemConfig, q: &DemandDistribution) -> CachePlacement {
    let b = config.packets;
    let cached = (0..config.users)
        .map(|u| {
            lfu_files(config, q, u)
                .into_iter()
                .flat_map(|f| (0..b).map(move |i| PacketId::new(f, i)))
                .collect()
        })
        .collect();
    CachePlacement::from_sets(b, cached)
}
