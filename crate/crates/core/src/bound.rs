//! Large-packetization rate bound for random caching with chromatic delivery.
//!
//! `r_ub = min(ψ, m̄)` where `m̄` is the expected number of distinct
//! requested files and
//!
//! ```text
//! ψ = Σ_ℓ Σ_{|U|=ℓ} Σ_f Σ_{u∈U} ρ(f,u,U) · λ(u,f)
//! λ(u,f) = (1 − p_{f,u}M_u) · Π_{k∈U∖u} p_{f,k}M_k · Π_{k∉U} (1 − p_{f,k}M_k)
//! ```
//!
//! with `ρ(f,u,U)` the probability that `f` maximizes `λ(u,·)` over the
//! files requested by the users of `U`. Ties in the argmax split the event
//! mass equally. The per-subset-max aggregation replaces the inner sum over
//! `u ∈ U` by a maximum; in the homogeneous uniform case it reduces to
//! `((1−γ)/γ)(1−(1−γ)^n)` with `γ = M/m`, while the literal sum reduces to
//! `n(1−γ)`.

use rand::Rng;

use crate::model::{popularity_order, CachingDistribution, DemandDistribution};
use crate::{rng, Error, Result, SystemConfig};

/// Exact ρ enumerates at most this many demand tuples per subset.
pub const EXACT_TUPLE_CAP: u64 = 1_000_000;
/// Subset enumeration limit for general (heterogeneous) instances.
pub const GENERAL_MAX_USERS: usize = 12;
/// User limit for the homogeneous fast path.
pub const HOMOGENEOUS_MAX_USERS: usize = 20;
/// Above this many users, λ products are accumulated in log space.
const LOG_PRODUCT_USERS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundResult {
    pub psi: f64,
    pub m_bar: f64,
    pub r_ub: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhoMethod {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregation {
    /// Sum over the users of each subset.
    #[default]
    Literal,
    /// Maximum over the users of each subset.
    PerSubsetMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PsiOptions {
    pub rho: RhoMethod,
    pub aggregation: Aggregation,
    /// Use the closed-form symmetric evaluation when the instance is
    /// homogeneous.
    pub fast_path: bool,
}

impl Default for PsiOptions {
    fn default() -> Self {
        Self {
            rho: RhoMethod::Exact,
            aggregation: Aggregation::Literal,
            fast_path: true,
        }
    }
}

impl PsiOptions {
    pub fn aggregation(mut self, aggregation: Aggregation) -> Self {
        self.aggregation = aggregation;
        self
    }

    pub fn rho(mut self, rho: RhoMethod) -> Self {
        self.rho = rho;
        self
    }

    pub fn direct(mut self) -> Self {
        self.fast_path = false;
        self
    }
}

/// Expected number of distinct requested files.
pub fn m_bar(q: &DemandDistribution) -> f64 {
    (0..q.files())
        .map(|f| 1.0 - (0..q.users()).map(|u| 1.0 - q.prob(f, u)).product::<f64>())
        .sum()
}

/// `λ(u, f)` for subset `subset` (which must contain `u`).
pub fn lambda_term(
    u: usize,
    f: usize,
    subset: &[usize],
    p: &CachingDistribution,
    cache: &[f64],
) -> f64 {
    debug_assert!(subset.contains(&u));
    let n = cache.len();
    let mass = |k: usize| (p.prob(f, k) * cache[k]).clamp(0.0, 1.0);
    let factor = |k: usize| {
        if k == u {
            1.0 - mass(k)
        } else if subset.contains(&k) {
            mass(k)
        } else {
            1.0 - mass(k)
        }
    };
    if n > LOG_PRODUCT_USERS {
        let mut log = 0.0;
        for k in 0..n {
            let x = factor(k);
            if x <= 0.0 {
                return 0.0;
            }
            log += x.ln();
        }
        log.exp()
    } else {
        (0..n).map(factor).product()
    }
}

fn lambdas(u: usize, subset: &[usize], p: &CachingDistribution, cache: &[f64]) -> Vec<f64> {
    (0..p.files())
        .map(|f| lambda_term(u, f, subset, p, cache))
        .collect()
}

/// Add `weight` split evenly over the argmax of `lambda` among `requested`.
fn credit_argmax(
    requested: &[usize],
    lambda: &[f64],
    weight: f64,
    rho: &mut [f64],
    scratch: &mut Vec<usize>,
) {
    let best = requested
        .iter()
        .map(|&f| lambda[f])
        .fold(f64::NEG_INFINITY, f64::max);
    scratch.clear();
    for &f in requested {
        if lambda[f] == best && !scratch.contains(&f) {
            scratch.push(f);
        }
    }
    let share = weight / scratch.len() as f64;
    for &f in scratch.iter() {
        rho[f] += share;
    }
}

fn tuple_count(files: usize, users: usize) -> u64 {
    (files as u64).saturating_pow(users as u32)
}

/// ρ over all files for each user of `subset` (rows follow `subset`).
fn rho_table(
    subset: &[usize],
    lambda: &[Vec<f64>],
    q: &DemandDistribution,
    method: RhoMethod,
    stream_label: u64,
) -> Result<Vec<Vec<f64>>> {
    let m = q.files();
    let ell = subset.len();
    let mut rho = vec![vec![0.0; m]; ell];
    let mut scratch = Vec::new();
    match method {
        RhoMethod::Exact => {
            let count = tuple_count(m, ell);
            if count > EXACT_TUPLE_CAP {
                return Err(Error::SizeCap {
                    what: "exact rho enumeration",
                    detail: format!("{m}^{ell} = {count} demand tuples, cap {EXACT_TUPLE_CAP}; use Monte Carlo rho"),
                });
            }
            let mut tuple = vec![0usize; ell];
            loop {
                let weight: f64 = subset
                    .iter()
                    .zip(&tuple)
                    .map(|(&k, &f)| q.prob(f, k))
                    .product();
                if weight > 0.0 {
                    for (row, lam) in rho.iter_mut().zip(lambda) {
                        credit_argmax(&tuple, lam, weight, row, &mut scratch);
                    }
                }
                // Odometer increment.
                let mut pos = 0;
                while pos < ell {
                    tuple[pos] += 1;
                    if tuple[pos] < m {
                        break;
                    }
                    tuple[pos] = 0;
                    pos += 1;
                }
                if pos == ell {
                    break;
                }
            }
        }
        RhoMethod::MonteCarlo { samples, seed } => {
            assert!(samples > 0, "Monte Carlo rho needs samples");
            let mut stream = rng::derive(seed, &[stream_label]);
            let cdfs: Vec<Vec<f64>> = subset
                .iter()
                .map(|&k| {
                    let mut acc = 0.0;
                    q.column(k)
                        .iter()
                        .map(|&x| {
                            acc += x;
                            acc
                        })
                        .collect()
                })
                .collect();
            let w = 1.0 / samples as f64;
            let mut tuple = vec![0usize; ell];
            for _ in 0..samples {
                for (slot, cdf) in tuple.iter_mut().zip(&cdfs) {
                    let x: f64 = stream.gen::<f64>() * cdf[m - 1];
                    *slot = cdf.partition_point(|&c| c <= x).min(m - 1);
                }
                for (row, lam) in rho.iter_mut().zip(lambda) {
                    credit_argmax(&tuple, lam, w, row, &mut scratch);
                }
            }
        }
    }
    Ok(rho)
}

fn subset_label(subset: &[usize]) -> u64 {
    subset.iter().fold(0u64, |acc, &k| acc | 1 << k)
}

/// `ρ(f, u, U)`.
pub fn rho_probability(
    f: usize,
    u: usize,
    subset: &[usize],
    p: &CachingDistribution,
    q: &DemandDistribution,
    cache: &[f64],
    method: RhoMethod,
) -> Result<f64> {
    let row = subset
        .iter()
        .position(|&k| k == u)
        .expect("user must belong to the subset");
    let lambda: Vec<Vec<f64>> = subset
        .iter()
        .map(|&k| lambdas(k, subset, p, cache))
        .collect();
    let table = rho_table(subset, &lambda, q, method, subset_label(subset))?;
    Ok(table[row][f])
}

/// `E[max_f λ_f]` over the distinct files requested by `draws` independent
/// users with popularity `q`.
fn expected_max(lambda: &[f64], q: &[f64], draws: i32) -> f64 {
    let mut order: Vec<usize> = (0..lambda.len()).collect();
    order.sort_by(|&a, &b| lambda[b].total_cmp(&lambda[a]));
    let mut total = 0.0;
    let mut below = 1.0f64; // P(no draw hits a file at or above the current level)
    let mut i = 0;
    while i < order.len() {
        let level = lambda[order[i]];
        let mut mass = 0.0;
        while i < order.len() && lambda[order[i]] == level {
            mass += q[order[i]];
            i += 1;
        }
        let next = (below - mass).max(0.0);
        total += level * (below.powi(draws) - next.powi(draws));
        below = next;
    }
    total
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn is_homogeneous(p: &CachingDistribution, q: &DemandDistribution, config: &SystemConfig) -> bool {
    p.is_homogeneous() && q.is_homogeneous() && config.is_homogeneous()
}

fn psi_homogeneous(
    p: &CachingDistribution,
    q: &DemandDistribution,
    config: &SystemConfig,
    agg: Aggregation,
) -> f64 {
    let n = config.users;
    let mc = config.cache[0];
    let mass: Vec<f64> = p
        .column(0)
        .iter()
        .map(|&x| (x * mc).clamp(0.0, 1.0))
        .collect();
    let qs = q.column(0);
    (1..=n)
        .map(|ell| {
            let lambda: Vec<f64> = mass
                .iter()
                .map(|&a| (1.0 - a).powi((n - ell + 1) as i32) * a.powi(ell as i32 - 1))
                .collect();
            let per_user = expected_max(&lambda, qs, ell as i32);
            let users = match agg {
                Aggregation::Literal => ell as f64,
                Aggregation::PerSubsetMax => 1.0,
            };
            binomial(n, ell) * users * per_user
        })
        .sum()
}

fn psi_subsets(
    p: &CachingDistribution,
    q: &DemandDistribution,
    config: &SystemConfig,
    opts: PsiOptions,
) -> Result<f64> {
    let n = config.users;
    let mut total = 0.0;
    let mut subset = Vec::with_capacity(n);
    // Masks in increasing order give a fixed summation order.
    for mask in 1u64..(1u64 << n) {
        subset.clear();
        subset.extend((0..n).filter(|&k| mask >> k & 1 == 1));
        let lambda: Vec<Vec<f64>> = subset
            .iter()
            .map(|&u| lambdas(u, &subset, p, &config.cache))
            .collect();
        let rho = rho_table(&subset, &lambda, q, opts.rho, mask)?;
        let per_user = rho
            .iter()
            .zip(&lambda)
            .map(|(r, l)| r.iter().zip(l).map(|(a, b)| a * b).sum::<f64>());
        total += match opts.aggregation {
            Aggregation::Literal => per_user.sum::<f64>(),
            Aggregation::PerSubsetMax => per_user.fold(0.0, f64::max),
        };
    }
    Ok(total)
}

/// `ψ(P, Q)`.
pub fn psi(
    p: &CachingDistribution,
    q: &DemandDistribution,
    config: &SystemConfig,
    opts: PsiOptions,
) -> Result<f64> {
    let n = config.users;
    if opts.fast_path && is_homogeneous(p, q, config) {
        if n > HOMOGENEOUS_MAX_USERS {
            return Err(Error::SizeCap {
                what: "homogeneous bound evaluation",
                detail: format!("{n} users, at most {HOMOGENEOUS_MAX_USERS}"),
            });
        }
        return Ok(psi_homogeneous(p, q, config, opts.aggregation));
    }
    if n > GENERAL_MAX_USERS {
        return Err(Error::SizeCap {
            what: "subset enumeration",
            detail: format!(
                "{n} users, at most {GENERAL_MAX_USERS} (at most {HOMOGENEOUS_MAX_USERS} for homogeneous instances)"
            ),
        });
    }
    psi_subsets(p, q, config, opts)
}

pub fn rate_upper_bound(
    p: &CachingDistribution,
    q: &DemandDistribution,
    config: &SystemConfig,
    opts: PsiOptions,
) -> Result<BoundResult> {
    let psi = psi(p, q, config, opts)?;
    let m_bar = m_bar(q);
    Ok(BoundResult {
        psi,
        m_bar,
        r_ub: psi.min(m_bar),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizedDistribution {
    pub p: CachingDistribution,
    pub bound: BoundResult,
    /// Cutoff chosen by the truncated-uniform scan.
    pub cutoff: usize,
    /// `r_ub` at every scanned cutoff, ascending cutoff.
    pub scan: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SearchOptions {
    pub psi: PsiOptions,
    /// Refine the best truncated-uniform point by coordinate descent.
    pub refine: bool,
}

/// Search for the caching distribution minimizing `r_ub`.
///
/// Stage one scans truncated-uniform distributions over every feasible
/// cutoff; stage two (optional) moves probability mass between files that
/// are adjacent in popularity order, halving the step when a sweep gains
/// less than `1e-6`.
pub fn optimize_caching_distribution(
    q: &DemandDistribution,
    config: &SystemConfig,
    opts: SearchOptions,
) -> Result<OptimizedDistribution> {
    let m = config.files;
    let biggest = config.cache.iter().copied().fold(0.0, f64::max);
    let first = ((biggest - 1e-9).ceil().max(1.0) as usize).min(m);
    let mut scan = Vec::with_capacity(m + 1 - first);
    let mut best: Option<(usize, CachingDistribution, BoundResult)> = None;
    for cutoff in first..=m {
        let p = CachingDistribution::truncated_uniform(q, &vec![cutoff; config.users])?;
        let bound = rate_upper_bound(&p, q, config, opts.psi)?;
        scan.push((cutoff, bound.r_ub));
        if best.as_ref().is_none_or(|(_, _, b)| bound.r_ub < b.r_ub) {
            best = Some((cutoff, p, bound));
        }
    }
    let (cutoff, mut p, mut bound) = best.expect("at least one cutoff");
    if opts.refine {
        (p, bound) = refine(p, bound, q, config, opts.psi)?;
    }
    Ok(OptimizedDistribution {
        p,
        bound,
        cutoff,
        scan,
    })
}

fn refine(
    start: CachingDistribution,
    start_bound: BoundResult,
    q: &DemandDistribution,
    config: &SystemConfig,
    psi_opts: PsiOptions,
) -> Result<(CachingDistribution, BoundResult)> {
    const MIN_STEP: f64 = 1e-6;
    const MAX_SWEEPS: usize = 200;
    let m = config.files;
    let users = config.users;
    let caps: Vec<f64> = config
        .cache
        .iter()
        .map(|&c| if c > 0.0 { (1.0 / c).min(1.0) } else { 1.0 })
        .collect();
    let orders: Vec<Vec<usize>> = (0..users).map(|u| popularity_order(q.column(u))).collect();
    let mut cols: Vec<Vec<f64>> = (0..users).map(|u| start.column(u).to_vec()).collect();
    let mut best = (start, start_bound);
    let mut step = 0.5 / m as f64;
    let mut sweeps = 0;
    while step >= MIN_STEP && sweeps < MAX_SWEEPS {
        sweeps += 1;
        let sweep_start = best.1.r_ub;
        for rank in 0..m.saturating_sub(1) {
            for dir in [1.0, -1.0] {
                // Move `step` of mass from one file to its popularity neighbor,
                // clipped to the box [0, 1/M_u].
                let mut trial = cols.clone();
                let mut moved = false;
                for u in 0..users {
                    let (a, b) = (orders[u][rank], orders[u][rank + 1]);
                    let (to, from) = if dir > 0.0 { (a, b) } else { (b, a) };
                    let delta = step.min(trial[u][from]).min(caps[u] - trial[u][to]);
                    if delta > 0.0 {
                        trial[u][to] += delta;
                        trial[u][from] -= delta;
                        moved = true;
                    }
                }
                if !moved {
                    continue;
                }
                for col in &mut trial {
                    let s: f64 = col.iter().sum();
                    col.iter_mut().for_each(|x| *x /= s);
                }
                let Ok(p) = CachingDistribution::from_columns(trial.clone()) else {
                    continue;
                };
                let bound = rate_upper_bound(&p, q, config, psi_opts)?;
                if bound.r_ub < best.1.r_ub - 1e-15 {
                    best = (p, bound);
                    cols = trial;
                }
            }
        }
        if sweep_start - best.1.r_ub < 1e-6 {
            step /= 2.0;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::zipf_distribution;

    fn setup(
        n: usize,
        m: usize,
        mc: f64,
        alpha: f64,
    ) -> (SystemConfig, DemandDistribution, CachingDistribution) {
        let config = SystemConfig::homogeneous(n, m, 10, mc).unwrap();
        let q = zipf_distribution(m, alpha, n).unwrap();
        let p = CachingDistribution::uniform(m, n).unwrap();
        (config, q, p)
    }

    #[test]
    fn m_bar_anchors() {
        let (_, q, _) = setup(1, 5, 0.0, 0.7);
        assert!((m_bar(&q) - 1.0).abs() < 1e-12);
        let point = DemandDistribution::homogeneous(vec![1.0, 0.0, 0.0], 4).unwrap();
        assert!((m_bar(&point) - 1.0).abs() < 1e-12);
        // Four equiprobable pairs with 1, 2, 2, 1 distinct files.
        let (_, q, _) = setup(2, 2, 0.0, 0.0);
        assert!((m_bar(&q) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn lambda_anchors() {
        let config = SystemConfig::homogeneous(2, 2, 4, 1.0).unwrap();
        let full = CachingDistribution::from_columns(vec![vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(lambda_term(0, 0, &[0], &full, &config.cache), 0.0);
        let none = [0.0, 0.0];
        let p = CachingDistribution::uniform(2, 2).unwrap();
        assert_eq!(lambda_term(0, 1, &[0], &p, &none), 1.0);
        assert!((lambda_term(0, 0, &[0, 1], &p, &config.cache) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn lambda_log_space_matches_product() {
        let n = 40;
        let config = SystemConfig::homogeneous(n, 3, 4, 1.0).unwrap();
        let p = CachingDistribution::homogeneous(vec![0.5, 0.3, 0.2], n).unwrap();
        let subset = [0, 3, 7];
        let direct: f64 = (0..n)
            .map(|k| match k {
                0 => 0.5,
                3 | 7 => 0.5,
                _ => 0.5,
            })
            .product();
        let got = lambda_term(0, 0, &subset, &p, &config.cache);
        assert!(
            (got - direct).abs() <= 1e-12 * direct.abs().max(1e-300),
            "{got} vs {direct}"
        );
    }

    #[test]
    fn rho_singleton_is_demand() {
        let (config, q, _) = setup(3, 4, 1.0, 0.9);
        let p = CachingDistribution::homogeneous(vec![0.4, 0.3, 0.2, 0.1], 3).unwrap();
        for f in 0..4 {
            let r = rho_probability(f, 1, &[1], &p, &q, &config.cache, RhoMethod::Exact).unwrap();
            assert!((r - q.prob(f, 1)).abs() < 1e-12);
        }
    }

    #[test]
    fn rho_symmetric_ties_split() {
        let (config, q, p) = setup(2, 2, 1.0, 0.0);
        for f in 0..2 {
            let r =
                rho_probability(f, 0, &[0, 1], &p, &q, &config.cache, RhoMethod::Exact).unwrap();
            assert!((r - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn rho_sums_to_one() {
        let (config, q, _) = setup(4, 3, 1.0, 0.6);
        let p = CachingDistribution::homogeneous(vec![0.6, 0.3, 0.1], 4).unwrap();
        let subset = [0, 2, 3];
        for &u in &subset {
            let s: f64 = (0..3)
                .map(|f| {
                    rho_probability(f, u, &subset, &p, &q, &config.cache, RhoMethod::Exact).unwrap()
                })
                .sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_rho_is_capped() {
        let (config, q, p) = setup(8, 10, 1.0, 0.5);
        let subset: Vec<usize> = (0..7).collect();
        let err =
            rho_probability(0, 0, &subset, &p, &q, &config.cache, RhoMethod::Exact).unwrap_err();
        assert!(matches!(err, Error::SizeCap { .. }));
    }

    #[test]
    fn psi_without_caches_is_n() {
        for n in 1..=5 {
            let (config, q, p) = setup(n, 3, 0.0, 0.8);
            for opts in [PsiOptions::default(), PsiOptions::default().direct()] {
                assert_eq!(psi(&p, &q, &config, opts).unwrap(), n as f64);
            }
        }
    }

    #[test]
    fn psi_two_users_two_files() {
        let (config, q, p) = setup(2, 2, 1.0, 0.0);
        assert_eq!(
            psi(&p, &q, &config, PsiOptions::default().direct()).unwrap(),
            1.0
        );
        assert_eq!(psi(&p, &q, &config, PsiOptions::default()).unwrap(), 1.0);
        let b = rate_upper_bound(&p, &q, &config, PsiOptions::default()).unwrap();
        assert_eq!((b.psi, b.m_bar, b.r_ub), (1.0, 1.5, 1.0));
    }

    #[test]
    fn literal_uniform_closed_form() {
        for n in 1..=8 {
            for (m, mc) in [(4, 1.0), (5, 2.0), (3, 0.5)] {
                let (config, q, p) = setup(n, m, mc, 0.0);
                let want = n as f64 * (1.0 - mc / m as f64);
                let got = psi(&p, &q, &config, PsiOptions::default()).unwrap();
                assert!((got - want).abs() < 1e-12, "n={n} m={m}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn per_subset_max_uniform_closed_form() {
        for n in 1..=8 {
            let (config, q, p) = setup(n, 4, 1.0, 0.0);
            let g: f64 = 0.25;
            let want = (1.0 - g) / g * (1.0 - (1.0 - g).powi(n as i32));
            let opts = PsiOptions::default().aggregation(Aggregation::PerSubsetMax);
            let fast = psi(&p, &q, &config, opts).unwrap();
            let direct = psi(&p, &q, &config, opts.direct()).unwrap();
            assert!((fast - want).abs() < 1e-12);
            assert!((direct - want).abs() < 1e-9);
        }
    }

    #[test]
    fn full_cache_needs_nothing() {
        let (config, q, p) = setup(3, 4, 4.0, 0.5);
        let b = rate_upper_bound(&p, &q, &config, PsiOptions::default()).unwrap();
        assert_eq!(b.psi, 0.0);
        assert_eq!(b.r_ub, 0.0);
    }

    #[test]
    fn empty_cache_bound_is_m_bar() {
        let (config, q, p) = setup(4, 6, 0.0, 1.1);
        let b = rate_upper_bound(&p, &q, &config, PsiOptions::default()).unwrap();
        assert_eq!(b.r_ub, b.m_bar);
    }

    #[test]
    fn heterogeneous_cap() {
        let config = SystemConfig::new(13, 2, 2, vec![0.5; 13]).unwrap();
        let q = zipf_distribution(2, 0.0, 13).unwrap();
        let mut cols = vec![vec![0.5, 0.5]; 13];
        cols[0] = vec![0.6, 0.4];
        let p = CachingDistribution::from_columns(cols).unwrap();
        assert!(matches!(
            psi(&p, &q, &config, PsiOptions::default()),
            Err(Error::SizeCap { .. })
        ));
    }

    #[test]
    fn single_file_optimum() {
        let config = SystemConfig::homogeneous(3, 1, 5, 0.5).unwrap();
        let q = zipf_distribution(1, 0.0, 3).unwrap();
        let best = optimize_caching_distribution(&q, &config, SearchOptions::default()).unwrap();
        assert_eq!(best.p.column(0), &[1.0]);
    }

    #[test]
    fn point_mass_demand_is_free() {
        for mc in [1.0, 2.0] {
            let config = SystemConfig::homogeneous(3, 4, 5, mc).unwrap();
            let q = DemandDistribution::homogeneous(vec![1.0, 0.0, 0.0, 0.0], 3).unwrap();
            let best =
                optimize_caching_distribution(&q, &config, SearchOptions::default()).unwrap();
            assert!((best.p.prob(0, 0) * mc - 1.0).abs() < 1e-12);
            assert_eq!(best.bound.r_ub, 0.0);
        }
    }

    #[test]
    fn uniform_demand_scan_is_minimal() {
        for agg in [Aggregation::Literal, Aggregation::PerSubsetMax] {
            let config = SystemConfig::homogeneous(4, 6, 5, 2.0).unwrap();
            let q = zipf_distribution(6, 0.0, 4).unwrap();
            let opts = SearchOptions {
                psi: PsiOptions::default().aggregation(agg),
                refine: false,
            };
            let best = optimize_caching_distribution(&q, &config, opts).unwrap();
            assert_eq!(best.scan.first().unwrap().0, 2);
            assert_eq!(best.scan.last().unwrap().0, 6);
            for &(_, r) in &best.scan {
                assert!(best.bound.r_ub <= r);
            }
            let uniform = CachingDistribution::uniform(6, 4).unwrap();
            let at_full = rate_upper_bound(&uniform, &q, &config, opts.psi).unwrap();
            assert!(best.bound.r_ub <= at_full.r_ub);
        }
        // With the per-subset maximum, caching the whole library uniformly wins.
        let config = SystemConfig::homogeneous(4, 6, 5, 2.0).unwrap();
        let q = zipf_distribution(6, 0.0, 4).unwrap();
        let opts = SearchOptions {
            psi: PsiOptions::default().aggregation(Aggregation::PerSubsetMax),
            refine: false,
        };
        assert_eq!(
            optimize_caching_distribution(&q, &config, opts)
                .unwrap()
                .cutoff,
            6
        );
    }

    #[test]
    fn refinement_never_hurts() {
        let config = SystemConfig::homogeneous(3, 5, 5, 1.5).unwrap();
        let q = zipf_distribution(5, 1.2, 3).unwrap();
        let psi_opts = PsiOptions::default().aggregation(Aggregation::PerSubsetMax);
        let plain = optimize_caching_distribution(
            &q,
            &config,
            SearchOptions {
                psi: psi_opts,
                refine: false,
            },
        )
        .unwrap();
        let refined = optimize_caching_distribution(
            &q,
            &config,
            SearchOptions {
                psi: psi_opts,
                refine: true,
            },
        )
        .unwrap();
        assert!(refined.bound.r_ub <= plain.bound.r_ub);
        crate::model::validate(&config, &q, &refined.p).unwrap();
    }
}
