//! Plain undirected graph with adjacency lists and a bit matrix.

use std::io::{self, BufRead, Write};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<u32>>,
    words: usize,
    bits: Vec<u64>,
    edges: usize,
}

impl Graph {
    pub fn new(vertices: usize) -> Self {
        let words = vertices.div_ceil(64);
        Self {
            adj: vec![Vec::new(); vertices],
            words,
            bits: vec![0; words * vertices],
            edges: 0,
        }
    }

    /// Build from an edge list over `0..vertices`. Self-loops and repeated
    /// edges are ignored.
    pub fn from_edges(vertices: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::new(vertices);
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g.finish();
        g
    }

    /// Insert `{a, b}`. Call [`Graph::finish`] once all edges are in.
    pub fn add_edge(&mut self, a: usize, b: usize) -> bool {
        if a == b || self.has_edge(a, b) {
            return false;
        }
        self.bits[a * self.words + b / 64] |= 1 << (b % 64);
        self.bits[b * self.words + a / 64] |= 1 << (a % 64);
        self.adj[a].push(b as u32);
        self.adj[b].push(a as u32);
        self.edges += 1;
        true
    }

    /// Sort adjacency lists.
    pub fn finish(&mut self) {
        for list in &mut self.adj {
            list.sort_unstable();
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    #[inline]
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.bits[a * self.words + b / 64] >> (b % 64) & 1 == 1
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Iterate edges as `(i, j)` with `i < j`, ordered by `i` then `j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(i, list)| {
            list.iter()
                .map(move |&j| (i, j as usize))
                .filter(|&(i, j)| i < j)
        })
    }

    /// DIMACS `edge` format: optional comment lines, the `p edge` header and
    /// one `e i j` line per edge with 1-based `i < j`. Returns bytes written.
    pub fn write_dimacs<W: Write>(&self, comments: &[String], sink: &mut W) -> io::Result<usize> {
        let mut out = String::new();
        for c in comments {
            out.push_str("c ");
            out.push_str(c);
            out.push('\n');
        }
        out.push_str(&format!(
            "p edge {} {}\n",
            self.vertex_count(),
            self.edge_count()
        ));
        for (i, j) in self.edges() {
            out.push_str(&format!("e {} {}\n", i + 1, j + 1));
        }
        sink.write_all(out.as_bytes())?;
        Ok(out.len())
    }

    pub fn read_dimacs<R: BufRead>(reader: R) -> Result<Self> {
        let mut graph: Option<Graph> = None;
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let mut parts = line.split_whitespace();
            match parts.next() {
                None | Some("c") => {}
                Some("p") => {
                    let _format = parts.next();
                    let n: usize = parse_field(parts.next(), lineno)?;
                    graph = Some(Graph::new(n));
                }
                Some("e") => {
                    let g = graph.as_mut().ok_or_else(|| Error::Parse {
                        line: lineno,
                        msg: "edge before problem line".into(),
                    })?;
                    let a: usize = parse_field(parts.next(), lineno)?;
                    let b: usize = parse_field(parts.next(), lineno)?;
                    let n = g.vertex_count();
                    if a == 0 || b == 0 || a > n || b > n {
                        return Err(Error::Parse {
                            line: lineno,
                            msg: format!("vertex out of range in edge {a} {b}"),
                        });
                    }
                    g.add_edge(a - 1, b - 1);
                }
                Some(other) => {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("unknown record {other:?}"),
                    })
                }
            }
        }
        let mut g = graph.ok_or_else(|| Error::Parse {
            line: 0,
            msg: "missing problem line".into(),
        })?;
        g.finish();
        Ok(g)
    }
}

fn parse_field(tok: Option<&str>, line: usize) -> Result<usize> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Parse {
            line,
            msg: "expected integer".into(),
        })
}

/// Named graphs used throughout the tests.
pub mod named {
    use super::Graph;

    pub fn complete(k: usize) -> Graph {
        let edges: Vec<_> = (0..k)
            .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
            .collect();
        Graph::from_edges(k, &edges)
    }

    pub fn cycle(k: usize) -> Graph {
        let edges: Vec<_> = (0..k).map(|i| (i, (i + 1) % k)).collect();
        Graph::from_edges(k, &edges)
    }

    pub fn path(k: usize) -> Graph {
        let edges: Vec<_> = (1..k).map(|i| (i - 1, i)).collect();
        Graph::from_edges(k, &edges)
    }

    pub fn petersen() -> Graph {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((i + 5, (i + 2) % 5 + 5));
        }
        Graph::from_edges(10, &edges)
    }
}
