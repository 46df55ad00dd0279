use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::bound::Aggregation;
use crate::model::zipf_distribution;
use crate::{DemandDistribution, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlacementPolicy {
    /// Random caching with the bound-minimizing distribution.
    RapOptimal,
    RapUniform,
    Lfu,
}

impl PlacementPolicy {
    pub fn name(self) -> &'static str {
        match self {
            Self::RapOptimal => "rap-optimal",
            Self::RapUniform => "rap-uniform",
            Self::Lfu => "lfu",
        }
    }
}

impl FromStr for PlacementPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rap-optimal" | "rap" => Ok(Self::RapOptimal),
            "rap-uniform" | "uniform" => Ok(Self::RapUniform),
            "lfu" => Ok(Self::Lfu),
            _ => Err(format!(
                "unknown placement `{s}` (rap-optimal, rap-uniform, lfu)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    Lfu,
    Gcc,
    Grasp,
    Oracle,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Self::Lfu => "lfu",
            Self::Gcc => "gcc",
            Self::Grasp => "grasp",
            Self::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "lfu" => Ok(Self::Lfu),
            "gcc" => Ok(Self::Gcc),
            "grasp" => Ok(Self::Grasp),
            "oracle" => Ok(Self::Oracle),
            _ => Err(format!("unknown scheme `{s}` (lfu, gcc, grasp, oracle)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DemandSpec {
    Zipf(f64),
    /// Explicit popularity shared by all users; normalized on use.
    Popularity(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub users: usize,
    pub files: usize,
    pub packets: usize,
    pub cache_sizes: Vec<f64>,
    pub demand: DemandSpec,
    pub placement: PlacementPolicy,
    pub schemes: Vec<Scheme>,
    pub grasp_iterations: usize,
    pub trials: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub export_dimacs: Option<PathBuf>,
    pub bound_only: bool,
    pub fix_placement: bool,
    /// Emit the timestamp comment and wall-clock runtimes.
    pub timestamp: bool,
    pub bound: Aggregation,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            users: 10,
            files: 250,
            packets: 100,
            cache_sizes: vec![50.0, 100.0],
            demand: DemandSpec::Zipf(0.2),
            placement: PlacementPolicy::RapOptimal,
            schemes: vec![Scheme::Lfu, Scheme::Gcc, Scheme::Grasp],
            grasp_iterations: 100,
            trials: 200,
            seed: 1,
            output: None,
            export_dimacs: None,
            bound_only: false,
            fix_placement: false,
            timestamp: true,
            bound: Aggregation::PerSubsetMax,
        }
    }
}

pub const KEYS: &[&str] = &[
    "users",
    "files",
    "packets",
    "cache_sizes",
    "alpha",
    "popularity",
    "placement",
    "schemes",
    "grasp_iterations",
    "trials",
    "seed",
    "output",
    "export_dimacs",
    "bound_only",
    "fix_placement",
    "timestamp",
    "bound",
];

fn integer(v: &str) -> Result<usize, String> {
    v.parse().map_err(|_| "expected integer".to_string())
}

fn real(v: &str) -> Result<f64, String> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err("expected real".to_string()),
    }
}

fn boolean(v: &str) -> Result<bool, String> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err("expected boolean".to_string()),
    }
}

fn list<T>(v: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(item)
        .collect()
}

impl ExperimentConfig {
    /// Set one key. Errors are bare messages; callers attach location.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let value = value.trim();
        match key {
            "users" => self.users = integer(value)?,
            "files" => self.files = integer(value)?,
            "packets" => self.packets = integer(value)?,
            "cache_sizes" => self.cache_sizes = list(value, real)?,
            "alpha" => self.demand = DemandSpec::Zipf(real(value)?),
            "popularity" => self.demand = DemandSpec::Popularity(list(value, real)?),
            "placement" => self.placement = value.parse()?,
            "schemes" => self.schemes = list(value, |s| s.parse())?,
            "grasp_iterations" => self.grasp_iterations = integer(value)?,
            "trials" => self.trials = integer(value)?,
            "seed" => self.seed = value.parse().map_err(|_| "expected integer".to_string())?,
            "output" => self.output = (!value.is_empty()).then(|| PathBuf::from(value)),
            "export_dimacs" => {
                self.export_dimacs = (!value.is_empty()).then(|| PathBuf::from(value))
            }
            "bound_only" => self.bound_only = boolean(value)?,
            "fix_placement" => self.fix_placement = boolean(value)?,
            "timestamp" => self.timestamp = boolean(value)?,
            "bound" => {
                self.bound = match value {
                    "literal" => Aggregation::Literal,
                    "max" | "per-subset-max" => Aggregation::PerSubsetMax,
                    _ => return Err("expected `literal` or `max`".to_string()),
                }
            }
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.users == 0 || self.files == 0 || self.packets == 0 {
            return bad("users, files and packets must be positive".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.grasp_iterations == 0 {
            return bad("grasp_iterations must be at least 1".into());
        }
        if self.cache_sizes.is_empty() {
            return bad("cache_sizes is empty".into());
        }
        for &m in &self.cache_sizes {
            if !(0.0..=self.files as f64).contains(&m) {
                return bad(format!("cache size {m} outside [0, {}]", self.files));
            }
        }
        if self.schemes.is_empty() && !self.bound_only {
            return bad("no schemes selected".into());
        }
        if let DemandSpec::Popularity(w) = &self.demand {
            if w.len() != self.files {
                return bad(format!(
                    "popularity has {} entries for {} files",
                    w.len(),
                    self.files
                ));
            }
        }
        Ok(())
    }

    pub fn demand_distribution(&self) -> Result<DemandDistribution> {
        match &self.demand {
            DemandSpec::Zipf(alpha) => zipf_distribution(self.files, *alpha, self.users),
            DemandSpec::Popularity(w) => {
                if w.iter().any(|&x| x < 0.0) {
                    return Err(Error::Config(
                        "popularity weights must be non-negative".into(),
                    ));
                }
                let total: f64 = w.iter().sum();
                if total <= 0.0 {
                    return Err(Error::Config("popularity weights sum to zero".into()));
                }
                DemandDistribution::homogeneous(w.iter().map(|x| x / total).collect(), self.users)
            }
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match self.demand {
            DemandSpec::Zipf(a) => Some(a),
            DemandSpec::Popularity(_) => None,
        }
    }

    /// The effective configuration as `key=value` lines, in key order.
    pub fn to_lines(&self) -> Vec<String> {
        let join = |xs: &[f64]| {
            xs.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let path = |p: &Option<PathBuf>| {
            p.as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default()
        };
        let mut out = vec![
            format!("users={}", self.users),
            format!("files={}", self.files),
            format!("packets={}", self.packets),
            format!("cache_sizes={}", join(&self.cache_sizes)),
        ];
        match &self.demand {
            DemandSpec::Zipf(a) => out.push(format!("alpha={a}")),
            DemandSpec::Popularity(w) => out.push(format!("popularity={}", join(w))),
        }
        out.extend([
            format!("placement={}", self.placement.name()),
            format!(
                "schemes={}",
                self.schemes
                    .iter()
                    .map(|s| s.name())
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            format!("grasp_iterations={}", self.grasp_iterations),
            format!("trials={}", self.trials),
            format!("seed={}", self.seed),
            format!("output={}", path(&self.output)),
            format!("export_dimacs={}", path(&self.export_dimacs)),
            format!("bound_only={}", self.bound_only),
            format!("fix_placement={}", self.fix_placement),
            format!("timestamp={}", self.timestamp),
            format!(
                "bound={}",
                match self.bound {
                    Aggregation::Literal => "literal",
                    Aggregation::PerSubsetMax => "max",
                }
            ),
        ]);
        out
    }
}

/// Parse `key=value` text, then apply `overrides` (flags win).
///
/// Blank lines and lines starting with `#` are ignored.
pub fn parse_config(text: &str, overrides: &[(String, String)]) -> Result<ExperimentConfig> {
    let mut config = ExperimentConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            msg: "expected key=value".into(),
        })?;
        config
            .set(key.trim(), value)
            .map_err(|msg| Error::Parse { line: i + 1, msg })?;
    }
    for (key, value) in overrides {
        config
            .set(key, value)
            .map_err(|msg| Error::Config(format!("{key}: {msg}")))?;
    }
    config.check()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_config() {
        let c = parse_config("users=10\nfiles=250\npackets=100\nalpha=0.2", &[]).unwrap();
        assert_eq!((c.users, c.files, c.packets), (10, 250, 100));
        assert_eq!(c.alpha(), Some(0.2));
        assert_eq!((c.trials, c.grasp_iterations), (200, 100));
    }

    #[test]
    fn overrides_win() {
        let text = "grasp_iterations=20\ntrials=3\n";
        let over = vec![("grasp_iterations".to_string(), "100".to_string())];
        let c = parse_config(text, &over).unwrap();
        assert_eq!(c.grasp_iterations, 100);
        assert_eq!(c.trials, 3);
    }

    #[test]
    fn bad_real_names_line() {
        let err = parse_config("users=10\nfiles=250\npackets=100\nalpha=x", &[]).unwrap_err();
        assert_eq!(err.to_string(), "line 4: expected real");
    }

    #[test]
    fn unknown_key_rejected() {
        let err = parse_config("# comment\n\ncolour=red\n", &[]).unwrap_err();
        assert_eq!(err.to_string(), "line 3: unknown key `colour`");
    }

    #[test]
    fn missing_equals() {
        let err = parse_config("users 10", &[]).unwrap_err();
        assert_eq!(err.to_string(), "line 1: expected key=value");
    }

    #[test]
    fn sweep_bounds_checked() {
        assert!(parse_config("files=10\ncache_sizes=0,11", &[]).is_err());
        assert!(parse_config("trials=0", &[]).is_err());
        assert!(parse_config("files=10\ncache_sizes=0,10", &[]).is_ok());
    }

    #[test]
    fn lists_and_enums() {
        let c = parse_config(
            "files=3\ncache_sizes=0, 1.5,3\nschemes=gcc,oracle\nplacement=lfu\npopularity=3,2,1\nbound=literal",
            &[],
        )
        .unwrap();
        assert_eq!(c.cache_sizes, vec![0.0, 1.5, 3.0]);
        assert_eq!(c.schemes, vec![Scheme::Gcc, Scheme::Oracle]);
        assert_eq!(c.placement, PlacementPolicy::Lfu);
        assert_eq!(c.bound, Aggregation::Literal);
        let q = c.demand_distribution().unwrap();
        assert!((q.prob(0, 0) - 0.5).abs() < 1e-15);
        assert!(parse_config("schemes=gcc,fast", &[]).is_err());
    }

    #[test]
    fn lines_round_trip() {
        let c = parse_config("users=3\nfiles=7\ncache_sizes=1,2\nschemes=lfu,gcc", &[]).unwrap();
        let text = c.to_lines().join("\n");
        assert_eq!(parse_config(&text, &[]).unwrap(), c);
    }
}
