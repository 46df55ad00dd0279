use std::collections::HashMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;

use super::config::{ExperimentConfig, PlacementPolicy, Scheme};
use crate::bound::{self, BoundResult, PsiOptions, SearchOptions};
use crate::conflict_graph::{build, user_sets};
use crate::grasp::{grasp, GraspParams};
use crate::model::{sample_demand, validate};
use crate::placement::{lfu_files, lfu_place, rap_place};
use crate::{gcc, oracle, rng};
use crate::{
    CachePlacement, CachingDistribution, DemandDistribution, DemandVector, RateSample, Result,
    SystemConfig,
};

pub const CSV_HEADER: &str =
    "scheme,n,m,B,alpha,M,trials,avg_rate,std_rate,avg_colors,r_ub,seed,runtime_ms";

/// Uncoded delivery under LFU: one full file per distinct request that some
/// requester does not hold.
pub fn lfu_rate(
    config: &SystemConfig,
    q: &DemandDistribution,
    demand: &DemandVector,
) -> RateSample {
    let held: Vec<Vec<usize>> = (0..config.users).map(|u| lfu_files(config, q, u)).collect();
    let mut missing: Vec<usize> = demand
        .files
        .iter()
        .enumerate()
        .filter(|&(u, f)| held[u].binary_search(f).is_err())
        .map(|(_, &f)| f)
        .collect();
    missing.sort_unstable();
    missing.dedup();
    RateSample::new("lfu", missing.len() * config.packets, config.packets)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeOutcome {
    pub scheme: Scheme,
    /// Value used for reporting: `min(lfu, raw)` for the coded schemes.
    pub reported: f64,
    pub raw: RateSample,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub cache_size: f64,
    pub trial: usize,
    pub outcomes: Vec<SchemeOutcome>,
    pub demand_digest: u64,
    pub vertices: usize,
    pub wall: Duration,
}

impl TrialResult {
    pub fn outcome(&self, scheme: Scheme) -> Option<&SchemeOutcome> {
        self.outcomes.iter().find(|o| o.scheme == scheme)
    }
}

/// Per-cache-size state shared by every trial at that size.
#[derive(Debug, Clone)]
pub struct Point {
    pub system: SystemConfig,
    pub caching: Option<CachingDistribution>,
    pub bound: Option<BoundResult>,
    /// Placement reused by every trial when placements are fixed.
    pub fixed: Option<CachePlacement>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSummary {
    pub scheme: String,
    pub cache_size: f64,
    pub trials: usize,
    pub avg_rate: f64,
    pub std_rate: f64,
    pub avg_colors: Option<f64>,
    pub r_ub: Option<f64>,
    pub runtime: Duration,
}

impl PointSummary {
    pub fn std_error(&self) -> f64 {
        self.std_rate / (self.trials.max(1) as f64).sqrt()
    }
}

pub struct Experiment {
    pub config: ExperimentConfig,
    pub demand: DemandDistribution,
    points: Mutex<HashMap<u64, Arc<Point>>>,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.check()?;
        let demand = config.demand_distribution()?;
        Ok(Self {
            config,
            demand,
            points: Mutex::new(HashMap::new()),
        })
    }

    fn system(&self, cache_size: f64) -> Result<SystemConfig> {
        let c = &self.config;
        SystemConfig::homogeneous(c.users, c.files, c.packets, cache_size)
    }

    /// Caching distribution and bound at one cache size, computed once.
    pub fn point(&self, cache_size: f64) -> Result<Arc<Point>> {
        let key = cache_size.to_bits();
        if let Some(p) = self.points.lock().expect("point cache").get(&key) {
            return Ok(p.clone());
        }
        let system = self.system(cache_size)?;
        let psi = PsiOptions::default().aggregation(self.config.bound);
        let (caching, bound) = match self.config.placement {
            PlacementPolicy::RapOptimal => {
                let search = SearchOptions { psi, refine: false };
                let best = bound::optimize_caching_distribution(&self.demand, &system, search)?;
                (Some(best.p), Some(best.bound))
            }
            PlacementPolicy::RapUniform => {
                let p = CachingDistribution::uniform(system.files, system.users)?;
                let b = bound::rate_upper_bound(&p, &self.demand, &system, psi)?;
                (Some(p), Some(b))
            }
            PlacementPolicy::Lfu => (None, None),
        };
        if let Some(p) = &caching {
            validate(&system, &self.demand, p)?;
        }
        let mut point = Point {
            system,
            caching,
            bound,
            fixed: None,
        };
        if self.config.fix_placement {
            let mut stream = rng::derive(self.config.seed, &[key, u64::MAX]);
            point.fixed = Some(self.place(&point, &mut stream)?);
        }
        let point = Arc::new(point);
        self.points
            .lock()
            .expect("point cache")
            .insert(key, point.clone());
        Ok(point)
    }

    fn place(&self, point: &Point, stream: &mut rng::Stream) -> Result<CachePlacement> {
        match &point.caching {
            Some(p) => rap_place(&point.system, p, stream),
            None => Ok(lfu_place(&point.system, &self.demand)),
        }
    }

    pub fn run_trial(&self, cache_size: f64, trial: usize) -> Result<TrialResult> {
        let point = self.point(cache_size)?;
        let start = Instant::now();
        let labels = |part: u64| [cache_size.to_bits(), trial as u64, part];
        let seed = self.config.seed;
        let system = &point.system;

        let placement = match &point.fixed {
            Some(fixed) => fixed.clone(),
            None => self.place(&point, &mut rng::derive(seed, &labels(0)))?,
        };
        let demand = sample_demand(&self.demand, &mut rng::derive(seed, &labels(1)));
        let graph = build(&placement, &demand, system);

        if let Some(dir) = &self.config.export_dimacs {
            let name = format!("trial_{}_{}.col", cache_size, trial + 1);
            let mut sink = BufWriter::new(File::create(dir.join(name))?);
            graph.export_dimacs(&mut sink)?;
            sink.flush()?;
        }

        let lfu = lfu_rate(system, &self.demand, &demand);
        let b = system.packets;
        let mut outcomes = Vec::with_capacity(self.config.schemes.len());
        for &scheme in &self.config.schemes {
            let raw = match scheme {
                Scheme::Lfu => lfu.clone(),
                Scheme::Gcc => {
                    let k = user_sets(&graph, &placement, &demand);
                    let c = gcc::gcc(&graph, &k, &mut rng::derive(seed, &labels(2)));
                    RateSample::new("gcc", c.color_count(), b)
                }
                Scheme::Grasp => {
                    let params = GraspParams::default()
                        .with_iterations(self.config.grasp_iterations)
                        .with_seed(rng::derive_seed(seed, &labels(3)));
                    let run = grasp(graph.graph(), &params);
                    RateSample::new("grasp", run.best.color_count(), b)
                }
                Scheme::Oracle => {
                    let r = oracle::chromatic_number(graph.graph())?;
                    RateSample::new("oracle", r.chi, b)
                }
            };
            let reported = match scheme {
                Scheme::Gcc | Scheme::Grasp => raw.rate.min(lfu.rate),
                Scheme::Lfu | Scheme::Oracle => raw.rate,
            };
            outcomes.push(SchemeOutcome {
                scheme,
                reported,
                raw,
            });
        }
        Ok(TrialResult {
            cache_size,
            trial,
            outcomes,
            demand_digest: demand.digest(),
            vertices: graph.len(),
            wall: start.elapsed(),
        })
    }

    /// All trials at one cache size, in trial order.
    pub fn run_point(&self, cache_size: f64) -> Result<Vec<TrialResult>> {
        self.point(cache_size)?;
        (0..self.config.trials)
            .into_par_iter()
            .map(|t| self.run_trial(cache_size, t))
            .collect()
    }

    /// Reduce the trials at one cache size into summary rows.
    pub fn summarize(&self, cache_size: f64, trials: &[TrialResult]) -> Result<Vec<PointSummary>> {
        let point = self.point(cache_size)?;
        let r_ub = point.bound.map(|b| b.r_ub);
        let runtime: Duration = trials.iter().map(|t| t.wall).sum();
        let mut rows = Vec::new();
        for &scheme in &self.config.schemes {
            let pick = |f: &dyn Fn(&SchemeOutcome) -> f64| -> Vec<f64> {
                trials
                    .iter()
                    .map(|t| f(t.outcome(scheme).expect("scheme present")))
                    .collect()
            };
            let reported = pick(&|o| o.reported);
            let raw = pick(&|o| o.raw.rate);
            let colors = pick(&|o| o.raw.colors as f64);
            let (avg_colors, _) = mean_std(&colors);
            let coded = matches!(scheme, Scheme::Gcc | Scheme::Grasp);
            let mut push = |name: String, xs: &[f64]| {
                let (avg, std) = mean_std(xs);
                rows.push(PointSummary {
                    scheme: name,
                    cache_size,
                    trials: trials.len(),
                    avg_rate: avg,
                    std_rate: std,
                    avg_colors: Some(avg_colors),
                    r_ub: if scheme == Scheme::Lfu { None } else { r_ub },
                    runtime,
                });
            };
            push(scheme.name().to_string(), &reported);
            if coded {
                push(format!("{}_raw", scheme.name()), &raw);
            }
        }
        Ok(rows)
    }

    /// Reference row: the large-packetization bound at this cache size.
    pub fn bound_row(&self, cache_size: f64) -> Result<Option<PointSummary>> {
        let point = self.point(cache_size)?;
        Ok(point.bound.map(|b| PointSummary {
            scheme: "bound".into(),
            cache_size,
            trials: 0,
            avg_rate: b.r_ub,
            std_rate: 0.0,
            avg_colors: None,
            r_ub: Some(b.r_ub),
            runtime: Duration::ZERO,
        }))
    }

    pub fn csv_row(&self, row: &PointSummary) -> String {
        let c = &self.config;
        let opt = |x: Option<f64>| x.map(|v| format!("{v:.6}")).unwrap_or_default();
        let runtime = if c.timestamp {
            row.runtime.as_millis().to_string()
        } else {
            String::new()
        };
        format!(
            "{},{},{},{},{},{},{},{:.6},{:.6},{},{},{},{}",
            row.scheme,
            c.users,
            c.files,
            c.packets,
            c.alpha().map(|a| a.to_string()).unwrap_or_default(),
            row.cache_size,
            row.trials,
            row.avg_rate,
            row.std_rate,
            opt(row.avg_colors),
            opt(row.r_ub),
            c.seed,
            runtime
        )
    }

    fn write_preamble<W: Write>(&self, sink: &mut W) -> Result<()> {
        for line in self.config.to_lines() {
            writeln!(sink, "# {line}")?;
        }
        if self.config.timestamp {
            let now = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            writeln!(sink, "# generated unix={now}")?;
        }
        writeln!(sink, "{CSV_HEADER}")?;
        Ok(())
    }

    /// Run the sweep, writing CSV to `sink`; rows are flushed after each
    /// cache size.
    pub fn run<W: Write>(&self, sink: &mut W) -> Result<Vec<PointSummary>> {
        if let Some(dir) = &self.config.export_dimacs {
            fs::create_dir_all(dir)?;
        }
        self.write_preamble(sink)?;
        let mut all = Vec::new();
        for &m in &self.config.cache_sizes {
            let mut rows = Vec::new();
            if !self.config.bound_only {
                let trials = self.run_point(m)?;
                rows = self.summarize(m, &trials)?;
            }
            rows.extend(self.bound_row(m)?);
            for row in &rows {
                writeln!(sink, "{}", self.csv_row(row))?;
            }
            sink.flush()?;
            all.extend(rows);
        }
        Ok(all)
    }
}

/// Run `config`, writing CSV to its output path or to `fallback`.
pub fn run_experiment<W: Write>(
    config: ExperimentConfig,
    fallback: &mut W,
) -> Result<Vec<PointSummary>> {
    let experiment = Experiment::new(config)?;
    match experiment.config.output.clone() {
        Some(path) => {
            let mut sink = BufWriter::new(create(&path)?);
            let rows = experiment.run(&mut sink)?;
            sink.flush()?;
            Ok(rows)
        }
        None => experiment.run(fallback),
    }
}

fn create(path: &Path) -> Result<File> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    Ok(File::create(path)?)
}
