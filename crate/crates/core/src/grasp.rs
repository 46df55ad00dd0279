//! GRASP for graph coloring.
//!
//! Each iteration builds a coloring greedily with a randomized restricted
//! candidate list (RCL), then runs a redundant-color local search; the best
//! coloring over all iterations wins. Vertices are sorted once by
//! non-ascending degree and that order is the tie-break order everywhere.
//!
//! Iteration `k` draws from its own stream derived from `(seed, k)`, so the
//! sequential and parallel drivers return the same result.

use rand::Rng;
use rayon::prelude::*;

use crate::graph::Graph;
use crate::rng;
use crate::Coloring;

const UNCOLORED: usize = usize::MAX;

/// How β is chosen per iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaMode {
    /// Uniform in `[0, 1]`, redrawn every iteration.
    Random,
    Fixed(f64),
}

/// Greedy value of a candidate vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Greedy {
    /// Degree counted over still-uncolored neighbors, updated as the
    /// construction proceeds.
    #[default]
    Adaptive,
    /// Degree in the full graph.
    Static,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraspParams {
    pub max_iterations: usize,
    pub beta: BetaMode,
    pub greedy: Greedy,
    pub seed: u64,
}

impl Default for GraspParams {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            beta: BetaMode::Random,
            greedy: Greedy::Adaptive,
            seed: 0,
        }
    }
}

impl GraspParams {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_iterations(mut self, iterations: usize) -> Self {
        self.max_iterations = iterations;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RclState {
    pub g_min: f64,
    pub g_max: f64,
    pub tau: f64,
    pub rcl: Vec<usize>,
}

/// RCL over `uncolored`: candidates whose greedy value reaches
/// `τ = g_min + β·(g_max − g_min)`, in the order given.
///
/// Panics if `uncolored` is empty.
pub fn make_rcl(beta: f64, uncolored: &[usize], greedy: &[f64]) -> RclState {
    assert!(!uncolored.is_empty(), "RCL needs at least one candidate");
    debug_assert!((0.0..=1.0).contains(&beta));
    let (mut g_min, mut g_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in uncolored {
        g_min = g_min.min(greedy[v]);
        g_max = g_max.max(greedy[v]);
    }
    let tau = (g_min + beta * (g_max - g_min)).min(g_max);
    let rcl = uncolored
        .iter()
        .copied()
        .filter(|&v| greedy[v] >= tau)
        .collect();
    RclState {
        g_min,
        g_max,
        tau,
        rcl,
    }
}

/// Color for uncolored vertex `i`: the lowest palette color missing from
/// its neighborhood, or a fresh one when every palette color is taken.
///
/// `colors[v]` is `None` for uncolored vertices; `palette` lists the colors
/// in use in ascending order. Fresh colors are `max(palette) + 1`.
pub fn get_color(graph: &Graph, i: usize, colors: &[Option<usize>], palette: &[usize]) -> usize {
    let mut seen = vec![false; palette.len()];
    for &j in graph.neighbors(i) {
        if let Some(c) = colors[j as usize] {
            if let Ok(pos) = palette.binary_search(&c) {
                seen[pos] = true;
            }
        }
    }
    match seen.iter().position(|&s| !s) {
        Some(pos) => palette[pos],
        None => palette.last().map_or(0, |&c| c + 1),
    }
}

/// Scratch buffers reused across iterations of one GRASP run.
struct Workspace {
    colors: Vec<usize>,
    greedy: Vec<f64>,
    uncolored: Vec<usize>,
    stamp: Vec<u32>,
    epoch: u32,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            colors: vec![UNCOLORED; n],
            greedy: vec![0.0; n],
            uncolored: Vec::with_capacity(n),
            stamp: vec![0; n + 1],
            epoch: 0,
        }
    }

    fn next_epoch(&mut self) -> u32 {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
        self.epoch
    }

    /// Stamp the colors present around `i`.
    fn mark_neighbors(&mut self, graph: &Graph, i: usize) -> u32 {
        let e = self.next_epoch();
        for &j in graph.neighbors(i) {
            let c = self.colors[j as usize];
            if c != UNCOLORED {
                self.stamp[c] = e;
            }
        }
        e
    }

    fn construct<R: Rng + ?Sized>(
        &mut self,
        graph: &Graph,
        beta: f64,
        greedy: Greedy,
        rng: &mut R,
    ) -> Coloring {
        let n = graph.vertex_count();
        self.colors.fill(UNCOLORED);
        self.uncolored.clear();
        self.uncolored.extend(0..n);
        for v in 0..n {
            self.greedy[v] = graph.degree(v) as f64;
        }
        let mut palette_len = 0usize;
        for _ in 0..n {
            let (mut g_min, mut g_max) = (f64::INFINITY, f64::NEG_INFINITY);
            for &v in &self.uncolored {
                g_min = g_min.min(self.greedy[v]);
                g_max = g_max.max(self.greedy[v]);
            }
            let tau = (g_min + beta * (g_max - g_min)).min(g_max);
            let size = self
                .uncolored
                .iter()
                .filter(|&&v| self.greedy[v] >= tau)
                .count();
            let pick = rng.gen_range(0..size);
            let (pos, i) = self
                .uncolored
                .iter()
                .copied()
                .enumerate()
                .filter(|&(_, v)| self.greedy[v] >= tau)
                .nth(pick)
                .expect("RCL holds a maximum-value vertex");
            self.uncolored.remove(pos);

            // Palette is dense 0..palette_len during construction.
            let e = self.mark_neighbors(graph, i);
            let c = (0..palette_len)
                .find(|&c| self.stamp[c] != e)
                .unwrap_or(palette_len);
            if c == palette_len {
                palette_len += 1;
            }
            self.colors[i] = c;
            if greedy == Greedy::Adaptive {
                for &j in graph.neighbors(i) {
                    self.greedy[j as usize] -= 1.0;
                }
            }
        }
        Coloring::new(self.colors.clone())
    }

    fn local_search(&mut self, graph: &Graph, coloring: &Coloring) -> Coloring {
        let n = graph.vertex_count();
        self.colors.clear();
        self.colors.extend_from_slice(coloring.as_slice());
        let top = self.colors.iter().copied().max().map_or(0, |c| c + 1);
        if self.stamp.len() < top {
            self.stamp.resize(top, 0);
        }
        let mut palette: Vec<usize> = coloring.palette().into_iter().collect();
        loop {
            let before = palette.len();
            let mut idx = 0;
            while idx < palette.len() {
                let c = palette[idx];
                let class: Vec<usize> = (0..n).filter(|&v| self.colors[v] == c).collect();
                let mut moved = 0;
                for &i in &class {
                    let e = self.mark_neighbors(graph, i);
                    if let Some(&target) = palette
                        .iter()
                        .find(|&&other| other != c && self.stamp[other] != e)
                    {
                        self.colors[i] = target;
                        moved += 1;
                    }
                }
                if moved == class.len() {
                    palette.remove(idx);
                } else {
                    idx += 1;
                }
            }
            if palette.len() == before {
                break;
            }
        }
        Coloring::new(self.colors.clone())
    }
}

/// One greedy randomized adaptive construction.
pub fn construct_solution<R: Rng + ?Sized>(
    beta: f64,
    graph: &Graph,
    greedy: Greedy,
    rng: &mut R,
) -> Coloring {
    let c = Workspace::new(graph.vertex_count()).construct(graph, beta, greedy, rng);
    debug_assert!(c.is_proper(graph));
    c
}

/// Redundant-color local search. For each color in ascending order, every
/// vertex of the class moves to the lowest other palette color absent from
/// its neighborhood, if one exists; the color is dropped once its class is
/// empty. Passes repeat until a pass drops no color.
///
/// Panics if `coloring` is not a proper coloring of `graph`.
pub fn local_search(graph: &Graph, coloring: &Coloring) -> Coloring {
    assert!(
        coloring.is_proper(graph),
        "local search needs a proper coloring"
    );
    let c = Workspace::new(graph.vertex_count()).local_search(graph, coloring);
    debug_assert!(c.is_proper(graph));
    c
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub beta: f64,
    pub constructed: usize,
    pub improved: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraspRun {
    /// Best coloring, colors renumbered densely.
    pub best: Coloring,
    /// Iteration (0-based) that first reached the best count.
    pub best_iteration: usize,
    pub iterations: Vec<IterationRecord>,
}

impl GraspRun {
    /// Best color count after each iteration.
    pub fn best_so_far(&self) -> Vec<usize> {
        let mut best = usize::MAX;
        self.iterations
            .iter()
            .map(|r| {
                best = best.min(r.improved);
                best
            })
            .collect()
    }
}

/// Sort vertices by non-ascending degree (stable) and relabel the graph so
/// that position in the order is the vertex id.
fn canonical(graph: &Graph) -> (Vec<usize>, Graph) {
    let mut order: Vec<usize> = (0..graph.vertex_count()).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(graph.degree(v)));
    let mut rank = vec![0; order.len()];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }
    let edges: Vec<(usize, usize)> = graph.edges().map(|(a, b)| (rank[a], rank[b])).collect();
    (order, Graph::from_edges(graph.vertex_count(), &edges))
}

fn run_iteration(
    ws: &mut Workspace,
    graph: &Graph,
    params: &GraspParams,
    k: usize,
) -> (Coloring, IterationRecord) {
    let mut stream = rng::derive(params.seed, &[k as u64]);
    let beta = match params.beta {
        BetaMode::Random => stream.gen_range(0.0..=1.0),
        BetaMode::Fixed(b) => b,
    };
    let built = ws.construct(graph, beta, params.greedy, &mut stream);
    debug_assert!(built.is_proper(graph));
    let improved = ws.local_search(graph, &built);
    debug_assert!(improved.is_proper(graph));
    let record = IterationRecord {
        beta,
        constructed: built.color_count(),
        improved: improved.color_count(),
    };
    (improved, record)
}

fn finish(
    order: &[usize],
    best: Coloring,
    best_iteration: usize,
    iterations: Vec<IterationRecord>,
) -> GraspRun {
    let mut colors = vec![0; order.len()];
    for (r, &v) in order.iter().enumerate() {
        colors[v] = best.color(r);
    }
    GraspRun {
        best: Coloring::new(colors).renumbered(),
        best_iteration,
        iterations,
    }
}

/// Full GRASP run; iterations execute in order on the calling thread.
pub fn grasp(graph: &Graph, params: &GraspParams) -> GraspRun {
    assert!(
        params.max_iterations >= 1,
        "GRASP needs at least one iteration"
    );
    let (order, sorted) = canonical(graph);
    let mut ws = Workspace::new(sorted.vertex_count());
    let mut best: Option<(Coloring, usize)> = None;
    let mut records = Vec::with_capacity(params.max_iterations);
    for k in 0..params.max_iterations {
        let (c, record) = run_iteration(&mut ws, &sorted, params, k);
        if best
            .as_ref()
            .is_none_or(|(b, _)| c.color_count() < b.color_count())
        {
            best = Some((c, k));
        }
        records.push(record);
    }
    let (best, at) = best.expect("at least one iteration");
    finish(&order, best, at, records)
}

/// Same result as [`grasp`], with iterations spread over the rayon pool.
pub fn grasp_parallel(graph: &Graph, params: &GraspParams) -> GraspRun {
    assert!(
        params.max_iterations >= 1,
        "GRASP needs at least one iteration"
    );
    let (order, sorted) = canonical(graph);
    let results: Vec<(Coloring, IterationRecord)> = (0..params.max_iterations)
        .into_par_iter()
        .map_init(
            || Workspace::new(sorted.vertex_count()),
            |ws, k| run_iteration(ws, &sorted, params, k),
        )
        .collect();
    let (at, _) = results
        .iter()
        .enumerate()
        .min_by_key(|(k, (c, _))| (c.color_count(), *k))
        .expect("at least one iteration");
    let records = results.iter().map(|(_, r)| r.clone()).collect();
    let best = results[at].0.clone();
    finish(&order, best, at, records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named;

    #[test]
    fn rcl_threshold() {
        let greedy = [1.0, 3.0, 5.0];
        let s = make_rcl(0.5, &[0, 1, 2], &greedy);
        assert_eq!((s.g_min, s.g_max, s.tau), (1.0, 5.0, 3.0));
        assert_eq!(s.rcl, vec![1, 2]);
        assert_eq!(make_rcl(1.0, &[0, 1, 2], &greedy).rcl, vec![2]);
        assert_eq!(make_rcl(0.0, &[0, 1, 2], &greedy).rcl, vec![0, 1, 2]);
    }

    #[test]
    fn rcl_ties_at_max() {
        let greedy = [4.0, 4.0, 2.0];
        assert_eq!(make_rcl(1.0, &[0, 1, 2], &greedy).rcl, vec![0, 1]);
    }

    #[test]
    #[should_panic]
    fn rcl_rejects_empty_candidates() {
        make_rcl(0.5, &[], &[]);
    }

    #[test]
    fn get_color_scenarios() {
        // i: nothing colored yet.
        let g = named::path(3);
        assert_eq!(get_color(&g, 0, &[None, None, None], &[]), 0);
        // ii: isolated vertex reuses the first palette color.
        let iso = Graph::new(2);
        assert_eq!(get_color(&iso, 1, &[Some(0), None], &[0]), 0);
        // iii: triangle with two colored vertices needs a third color.
        let tri = named::complete(3);
        assert_eq!(get_color(&tri, 2, &[Some(0), Some(1), None], &[0, 1]), 2);
        // iv: path a-b-c with a=0, b=1; c only sees b.
        assert_eq!(get_color(&g, 2, &[Some(0), Some(1), None], &[0, 1]), 0);
    }

    #[test]
    fn edgeless_graph_gets_one_color() {
        let g = Graph::new(6);
        for beta in [0.0, 0.3, 1.0] {
            for seed in 0..5 {
                let c = construct_solution(beta, &g, Greedy::Adaptive, &mut rng::stream(seed));
                assert_eq!(c.color_count(), 1);
            }
        }
    }

    #[test]
    fn complete_graph_needs_all_colors() {
        let g = named::complete(5);
        let c = construct_solution(0.4, &g, Greedy::Adaptive, &mut rng::stream(2));
        assert_eq!(c.color_count(), 5);
        assert!(c.is_proper(&g));
    }

    #[test]
    fn construction_is_seed_deterministic() {
        let g = named::petersen();
        let a = construct_solution(0.5, &g, Greedy::Adaptive, &mut rng::stream(9));
        let b = construct_solution(0.5, &g, Greedy::Adaptive, &mut rng::stream(9));
        assert_eq!(a, b);
    }

    #[test]
    fn local_search_drops_redundant_color_on_path() {
        let g = named::path(3);
        let out = local_search(&g, &Coloring::new(vec![0, 1, 2]));
        assert!(out.is_proper(&g));
        assert_eq!(out.color_count(), 2);
    }

    #[test]
    fn local_search_keeps_optimal_colorings() {
        let tri = named::complete(3);
        let c = Coloring::new(vec![0, 1, 2]);
        assert_eq!(local_search(&tri, &c), c);
        let even = named::cycle(6);
        let c = Coloring::new(vec![0, 1, 0, 1, 0, 1]);
        assert_eq!(local_search(&even, &c), c);
    }

    #[test]
    #[should_panic]
    fn local_search_rejects_improper_input() {
        local_search(&named::path(2), &Coloring::new(vec![0, 0]));
    }

    #[test]
    fn single_iteration_is_construct_then_search() {
        let g = named::petersen();
        let params = GraspParams::default().with_iterations(1).with_seed(4);
        let run = grasp(&g, &params);
        assert_eq!(run.iterations.len(), 1);
        assert_eq!(run.best.color_count(), run.iterations[0].improved);
        assert!(run.iterations[0].improved <= run.iterations[0].constructed);
    }

    #[test]
    fn best_so_far_never_increases() {
        let g = named::petersen();
        let run = grasp(&g, &GraspParams::default().with_iterations(30).with_seed(1));
        let trace = run.best_so_far();
        assert!(trace.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*trace.last().unwrap(), run.best.color_count());
        assert!(run.best.is_proper(&g));
    }

    #[test]
    fn parallel_matches_sequential() {
        let g = named::petersen();
        let params = GraspParams::default().with_iterations(25).with_seed(77);
        assert_eq!(grasp(&g, &params), grasp_parallel(&g, &params));
    }

    #[test]
    fn empty_graph() {
        let run = grasp(&Graph::new(0), &GraspParams::default().with_iterations(3));
        assert_eq!(run.best.color_count(), 0);
    }
}
