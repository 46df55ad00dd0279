//! Fixtures shared by the benchmarks.

use codedcache::bound::{optimize_caching_distribution, Aggregation, PsiOptions, SearchOptions};
use codedcache::conflict_graph::{build, user_sets};
use codedcache::model::{sample_demand, zipf_distribution};
use codedcache::placement::rap_place;
use codedcache::{
    rng, CachePlacement, ConflictGraph, DemandDistribution, DemandVector, SystemConfig, UserSet,
};

pub struct Instance {
    pub config: SystemConfig,
    pub demand_dist: DemandDistribution,
    pub placement: CachePlacement,
    pub demand: DemandVector,
    pub graph: ConflictGraph,
    pub k: Vec<UserSet>,
}

/// One trial of a sweep point, placed with the bound-minimizing distribution.
pub fn instance(
    users: usize,
    files: usize,
    packets: usize,
    alpha: f64,
    cache: f64,
    seed: u64,
) -> Instance {
    let config = SystemConfig::homogeneous(users, files, packets, cache).expect("config");
    let demand_dist = zipf_distribution(files, alpha, users).expect("zipf");
    let search = SearchOptions {
        psi: PsiOptions::default().aggregation(Aggregation::PerSubsetMax),
        refine: false,
    };
    let p = optimize_caching_distribution(&demand_dist, &config, search)
        .expect("P*")
        .p;
    let mut stream = rng::stream(seed);
    let placement = rap_place(&config, &p, &mut stream).expect("placement");
    let demand = sample_demand(&demand_dist, &mut stream);
    let graph = build(&placement, &demand, &config);
    let k = user_sets(&graph, &placement, &demand);
    Instance {
        config,
        demand_dist,
        placement,
        demand,
        graph,
        k,
    }
}

/// The n=10, m=250, B=100, alpha=0.2 point at cache size 50.
pub fn mid_library_point(seed: u64) -> Instance {
    instance(10, 250, 100, 0.2, 50.0, seed)
}
