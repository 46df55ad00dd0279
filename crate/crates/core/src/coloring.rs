//! Vertex colorings and their checks.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::graph::Graph;
use crate::{Error, Result};

/// Total assignment of a color id to each vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coloring {
    colors: Vec<usize>,
}

impl Coloring {
    pub fn new(colors: Vec<usize>) -> Self {
        Self { colors }
    }

    pub fn empty() -> Self {
        Self { colors: Vec::new() }
    }

    pub fn color(&self, v: usize) -> usize {
        self.colors[v]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.colors
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// Set of colors in use.
    pub fn palette(&self) -> BTreeSet<usize> {
        self.colors.iter().copied().collect()
    }

    /// Objective `f(c) = |palette|`.
    pub fn color_count(&self) -> usize {
        self.palette().len()
    }

    /// Color classes in ascending color order; members ascending.
    pub fn classes(&self) -> Vec<(usize, Vec<usize>)> {
        let mut by_color: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for (v, &c) in self.colors.iter().enumerate() {
            by_color.entry(c).or_default().push(v);
        }
        by_color.into_iter().collect()
    }

    pub fn is_proper(&self, graph: &Graph) -> bool {
        self.colors.len() == graph.vertex_count()
            && graph.edges().all(|(a, b)| self.colors[a] != self.colors[b])
    }

    /// First monochromatic edge, if any.
    pub fn conflict(&self, graph: &Graph) -> Option<(usize, usize)> {
        graph
            .edges()
            .find(|&(a, b)| self.colors[a] == self.colors[b])
    }

    /// Relabel colors densely as `0..k`, in order of first appearance.
    pub fn renumbered(&self) -> Self {
        let mut map = std::collections::HashMap::new();
        let colors = self
            .colors
            .iter()
            .map(|&c| {
                let next = map.len();
                *map.entry(c).or_insert(next)
            })
            .collect();
        Self { colors }
    }

    /// One line per vertex: 1-based vertex index and dense 1-based color.
    pub fn to_text(&self) -> String {
        let dense = self.renumbered();
        let mut out = String::new();
        for (v, &c) in dense.colors.iter().enumerate() {
            let _ = writeln!(out, "{} {}", v + 1, c + 1);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut colors = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::Parse {
                line: i + 1,
                msg: msg.into(),
            };
            let mut parts = line.split_whitespace();
            let v: usize = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| bad("expected vertex index"))?;
            let c: usize = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| bad("expected color"))?;
            if v != colors.len() + 1 || c == 0 {
                return Err(bad(
                    "vertices must be listed in order from 1, colors from 1",
                ));
            }
            colors.push(c - 1);
        }
        Ok(Self { colors })
    }
}
