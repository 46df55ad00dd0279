//! Index-coding conflict graph.
//!
//! One vertex per (user, requested packet missing from that user's cache).
//! `v1` interferes with `v2` when the packet of `v1` is not cached by the
//! user of `v2` and the two vertices carry different packets; vertices are
//! adjacent when either interferes with the other. Packets a user already
//! holds produce no vertex.

use std::collections::HashMap;
use std::io::Write;

use crate::graph::Graph;
use crate::{CachePlacement, DemandVector, PacketId, Result, SystemConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex {
    pub packet: PacketId,
    pub user: usize,
}

/// A set of user ids stored as a bitset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UserSet {
    words: Vec<u64>,
}

impl UserSet {
    pub fn new(users: usize) -> Self {
        Self {
            words: vec![0; users.div_ceil(64).max(1)],
        }
    }

    pub fn insert(&mut self, user: usize) {
        self.words[user / 64] |= 1 << (user % 64);
    }

    #[inline]
    pub fn contains(&self, user: usize) -> bool {
        self.words[user / 64] >> (user % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            (0..64)
                .filter(move |b| w >> b & 1 == 1)
                .map(move |b| i * 64 + b)
        })
    }
}

#[derive(Debug, Clone)]
pub struct ConflictGraph {
    users: usize,
    vertices: Vec<Vertex>,
    graph: Graph,
}

impl ConflictGraph {
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> Vertex {
        self.vertices[i]
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Number of distinct packets among the vertices.
    pub fn distinct_packets(&self) -> usize {
        let mut p: Vec<PacketId> = self.vertices.iter().map(|v| v.packet).collect();
        p.sort_unstable();
        p.dedup();
        p.len()
    }

    /// Vertices of user `u`.
    pub fn vertices_of(&self, user: usize) -> impl Iterator<Item = usize> + '_ {
        self.vertices
            .iter()
            .enumerate()
            .filter(move |(_, v)| v.user == user)
            .map(|(i, _)| i)
    }

    /// DIMACS export with a `c vertex k = user:file:index` comment per vertex.
    pub fn export_dimacs<W: Write>(&self, sink: &mut W) -> Result<usize> {
        let comments: Vec<String> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(k, v)| format!("vertex {} = {}:{}", k + 1, v.user + 1, v.packet))
            .collect();
        Ok(self.graph.write_dimacs(&comments, sink)?)
    }
}

/// Whether `v1` interferes with `v2` under placement `cache`.
pub fn interferes(v1: &Vertex, v2: &Vertex, cache: &CachePlacement) -> bool {
    v1.packet != v2.packet && !cache.contains(v2.user, v1.packet)
}

/// Build the conflict graph for `cache` and `demand`.
pub fn build(
    cache: &CachePlacement,
    demand: &DemandVector,
    config: &SystemConfig,
) -> ConflictGraph {
    let mut vertices = Vec::new();
    for (u, &f) in demand.files.iter().enumerate() {
        for i in 0..config.packets {
            let p = PacketId::new(f, i);
            if !cache.contains(u, p) {
                vertices.push(Vertex { packet: p, user: u });
            }
        }
    }

    // Users caching each distinct vertex packet.
    let mut slot: HashMap<PacketId, usize> = HashMap::new();
    let mut holders: Vec<UserSet> = Vec::new();
    let packet_slot: Vec<usize> = vertices
        .iter()
        .map(|v| {
            *slot.entry(v.packet).or_insert_with(|| {
                let mut set = UserSet::new(config.users);
                for u in 0..config.users {
                    if cache.contains(u, v.packet) {
                        set.insert(u);
                    }
                }
                holders.push(set);
                holders.len() - 1
            })
        })
        .collect();

    let mut graph = Graph::new(vertices.len());
    for a in 0..vertices.len() {
        let (pa, ua) = (packet_slot[a], vertices[a].user);
        for b in a + 1..vertices.len() {
            let (pb, ub) = (packet_slot[b], vertices[b].user);
            if pa != pb && (!holders[pa].contains(ub) || !holders[pb].contains(ua)) {
                graph.add_edge(a, b);
            }
        }
    }
    graph.finish();
    ConflictGraph {
        users: config.users,
        vertices,
        graph,
    }
}

/// `K_v`: users caching or requesting the packet of each vertex.
pub fn user_sets(
    graph: &ConflictGraph,
    cache: &CachePlacement,
    demand: &DemandVector,
) -> Vec<UserSet> {
    let n = graph.users();
    let mut memo: HashMap<PacketId, UserSet> = HashMap::new();
    graph
        .vertices()
        .iter()
        .map(|v| {
            memo.entry(v.packet)
                .or_insert_with(|| {
                    let mut set = UserSet::new(n);
                    for u in 0..n {
                        if demand.files[u] == v.packet.file as usize || cache.contains(u, v.packet)
                        {
                            set.insert(u);
                        }
                    }
                    set
                })
                .clone()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(file: usize, index: usize) -> PacketId {
        PacketId::new(file, index)
    }

    /// Two users, two files A,B of two packets; user 1 holds the first half
    /// of both files, user 2 the second half.
    fn man_instance() -> (SystemConfig, CachePlacement, DemandVector) {
        let config = SystemConfig::homogeneous(2, 2, 2, 1.0).unwrap();
        let cache =
            CachePlacement::from_sets(2, vec![vec![p(0, 0), p(1, 0)], vec![p(0, 1), p(1, 1)]]);
        (config, cache, DemandVector::new(vec![0, 1]))
    }

    #[test]
    fn interference_rule() {
        let cache = CachePlacement::from_sets(2, vec![vec![p(1, 0)], vec![]]);
        let a = Vertex {
            packet: p(0, 0),
            user: 0,
        };
        let b = Vertex {
            packet: p(0, 0),
            user: 1,
        };
        assert!(!interferes(&a, &b, &cache));
        let c = Vertex {
            packet: p(1, 0),
            user: 1,
        };
        let d = Vertex {
            packet: p(0, 1),
            user: 0,
        };
        assert!(!interferes(&c, &d, &cache));
        assert!(interferes(&d, &c, &cache));
    }

    #[test]
    fn man_instance_has_no_edges() {
        let (config, cache, demand) = man_instance();
        let g = build(&cache, &demand, &config);
        assert_eq!(
            g.vertices(),
            &[
                Vertex {
                    packet: p(0, 1),
                    user: 0
                },
                Vertex {
                    packet: p(1, 0),
                    user: 1
                }
            ]
        );
        assert_eq!(g.graph().edge_count(), 0);
        let k = user_sets(&g, &cache, &demand);
        assert_eq!(k[0], k[1]);
        assert_eq!(k[0].len(), 2);
    }

    #[test]
    fn empty_caches_distinct_requests() {
        let config = SystemConfig::homogeneous(2, 2, 1, 0.0).unwrap();
        let cache = CachePlacement::empty(2, 1);
        let g = build(&cache, &DemandVector::new(vec![0, 1]), &config);
        assert_eq!(g.len(), 2);
        assert_eq!(g.graph().edge_count(), 1);
    }

    #[test]
    fn same_file_copies_are_independent() {
        let config = SystemConfig::homogeneous(3, 2, 4, 0.0).unwrap();
        let cache = CachePlacement::empty(3, 4);
        let g = build(&cache, &DemandVector::new(vec![1, 1, 1]), &config);
        assert_eq!(g.len(), 12);
        for a in 0..12 {
            for b in 0..12 {
                let same = g.vertex(a).packet == g.vertex(b).packet;
                assert_eq!(g.graph().has_edge(a, b), a != b && !same);
            }
        }
    }

    #[test]
    fn dimacs_export() {
        let (config, cache, demand) = man_instance();
        let g = build(&cache, &demand, &config);
        let mut out = Vec::new();
        let n = g.export_dimacs(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(n, text.len());
        assert_eq!(text, "c vertex 1 = 1:1:2\nc vertex 2 = 2:2:1\np edge 2 0\n");

        let config = SystemConfig::homogeneous(2, 2, 1, 0.0).unwrap();
        let g = build(
            &CachePlacement::empty(2, 1),
            &DemandVector::new(vec![0, 1]),
            &config,
        );
        let mut out = Vec::new();
        g.export_dimacs(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.ends_with("p edge 2 1\ne 1 2\n"), "{text}");
    }

    #[test]
    fn edgeless_export() {
        let g = Graph::new(3);
        let mut out = Vec::new();
        g.write_dimacs(&[], &mut out).unwrap();
        assert_eq!(out, b"p edge 3 0\n");
    }
}
