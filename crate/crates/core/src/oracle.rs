//! Exact chromatic number for tiny graphs, used as a reference in tests.

use crate::graph::Graph;
use crate::{Coloring, Error, Result};

/// Largest graph the oracle accepts.
pub const MAX_VERTICES: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub chi: usize,
    pub witness: Coloring,
}

/// Branch and bound over vertices in descending-degree order.
pub fn chromatic_number(graph: &Graph) -> Result<OracleResult> {
    let n = graph.vertex_count();
    if n > MAX_VERTICES {
        return Err(Error::SizeCap {
            what: "chromatic oracle",
            detail: format!("{n} vertices, at most {MAX_VERTICES}"),
        });
    }
    if n == 0 {
        return Ok(OracleResult {
            chi: 0,
            witness: Coloring::empty(),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(graph.degree(v)));

    let upper = first_fit(graph, &order);
    let lower = greedy_clique(graph, &order);

    let mut search = Search {
        graph,
        order: &order,
        colors: vec![usize::MAX; n],
        best: upper.clone(),
        best_count: upper.color_count(),
        lower,
    };
    if search.best_count > lower {
        search.branch(0, 0);
    }
    let witness = search.best;
    debug_assert!(witness.is_proper(graph));
    Ok(OracleResult {
        chi: search.best_count,
        witness,
    })
}

fn first_fit(graph: &Graph, order: &[usize]) -> Coloring {
    let mut colors = vec![usize::MAX; graph.vertex_count()];
    for &v in order {
        let mut c = 0;
        while graph.neighbors(v).iter().any(|&j| colors[j as usize] == c) {
            c += 1;
        }
        colors[v] = c;
    }
    Coloring::new(colors)
}

/// Size of a clique grown greedily from each vertex in turn; the largest wins.
fn greedy_clique(graph: &Graph, order: &[usize]) -> usize {
    let mut best = 1;
    for &seed in order {
        let mut clique = vec![seed];
        for &v in order {
            if v != seed && clique.iter().all(|&u| graph.has_edge(u, v)) {
                clique.push(v);
            }
        }
        best = best.max(clique.len());
    }
    best
}

struct Search<'a> {
    graph: &'a Graph,
    order: &'a [usize],
    colors: Vec<usize>,
    best: Coloring,
    best_count: usize,
    lower: usize,
}

impl Search<'_> {
    /// Returns true once the lower bound is met and the search can stop.
    fn branch(&mut self, depth: usize, used: usize) -> bool {
        if depth == self.order.len() {
            self.best_count = used;
            self.best = Coloring::new(self.colors.clone());
            return used <= self.lower;
        }
        let v = self.order[depth];
        // A new color only makes sense if it still beats the incumbent.
        let limit = (used + 1).min(self.best_count - 1);
        for c in 0..limit {
            if self
                .graph
                .neighbors(v)
                .iter()
                .any(|&j| self.colors[j as usize] == c)
            {
                continue;
            }
            self.colors[v] = c;
            let now_used = used.max(c + 1);
            if now_used < self.best_count && self.branch(depth + 1, now_used) {
                return true;
            }
            self.colors[v] = usize::MAX;
        }
        false
    }
}
