//! XOR codewords from a coloring, and per-user decoding.
//!
//! Every color class becomes one transmission: the XOR of the distinct
//! packets in the class. A user recovers a missing packet from the codeword
//! that carries it by XOR-ing out the other members, all of which a proper
//! coloring guarantees the user has cached.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::RngCore;

use crate::{
    CachePlacement, Coloring, ConflictGraph, DemandVector, Error, PacketId, Result, SystemConfig,
};

pub const DEFAULT_PAYLOAD_LEN: usize = 64;

/// Payload bytes for the whole library, `len` bytes per packet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Payloads {
    packets: usize,
    len: usize,
    data: Vec<u8>,
}

impl Payloads {
    pub fn zeroed(files: usize, packets: usize, len: usize) -> Self {
        Self {
            packets,
            len,
            data: vec![0; files * packets * len],
        }
    }

    pub fn random<R: RngCore + ?Sized>(
        files: usize,
        packets: usize,
        len: usize,
        rng: &mut R,
    ) -> Self {
        let mut p = Self::zeroed(files, packets, len);
        rng.fill_bytes(&mut p.data);
        p
    }

    pub fn payload_len(&self) -> usize {
        self.len
    }

    pub fn get(&self, id: PacketId) -> &[u8] {
        let at = id.linear(self.packets) * self.len;
        &self.data[at..at + self.len]
    }

    pub fn set(&mut self, id: PacketId, bytes: &[u8]) -> Result<()> {
        if bytes.len() != self.len {
            return Err(Error::PayloadLength {
                packet: id.to_string(),
                expected: self.len,
                got: bytes.len(),
            });
        }
        let at = id.linear(self.packets) * self.len;
        self.data[at..at + self.len].copy_from_slice(bytes);
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword {
    pub color: usize,
    /// Distinct packets of the class, ascending.
    pub members: Vec<PacketId>,
    pub bytes: Vec<u8>,
}

fn xor_into(acc: &mut [u8], other: &[u8]) {
    for (a, b) in acc.iter_mut().zip(other) {
        *a ^= b;
    }
}

/// One codeword per color, in ascending color order. Colors are renumbered
/// densely from 0.
pub fn encode(coloring: &Coloring, graph: &ConflictGraph, payloads: &Payloads) -> Vec<Codeword> {
    assert_eq!(coloring.len(), graph.len(), "coloring must cover the graph");
    coloring
        .renumbered()
        .classes()
        .into_iter()
        .map(|(color, vertices)| {
            let mut members: Vec<PacketId> =
                vertices.iter().map(|&v| graph.vertex(v).packet).collect();
            members.sort_unstable();
            members.dedup();
            let mut bytes = vec![0u8; payloads.payload_len()];
            for &m in &members {
                xor_into(&mut bytes, payloads.get(m));
            }
            Codeword {
                color,
                members,
                bytes,
            }
        })
        .collect()
}

/// Recover `requests` for `user` from `codewords`, using `cache` as the
/// user's side information (only packets the user holds may be read).
///
/// A packet may travel in several codewords when copies requested by
/// different users got different colors; the first codeword whose other
/// members are all cached is used.
pub fn decode(
    codewords: &[Codeword],
    user: usize,
    placement: &CachePlacement,
    cache: &Payloads,
    requests: &[PacketId],
) -> Result<HashMap<PacketId, Vec<u8>>> {
    let mut carriers: HashMap<PacketId, Vec<usize>> = HashMap::new();
    for (i, cw) in codewords.iter().enumerate() {
        for &m in &cw.members {
            carriers.entry(m).or_default().push(i);
        }
    }
    let mut out = HashMap::with_capacity(requests.len());
    for &want in requests {
        let found = carriers.get(&want).ok_or_else(|| Error::Decode {
            user: user + 1,
            color: 0,
            detail: format!("no codeword carries {want}"),
        })?;
        let blocker = |cw: &Codeword| {
            cw.members
                .iter()
                .copied()
                .find(|&m| m != want && !placement.contains(user, m))
        };
        let Some(cw) = found
            .iter()
            .map(|&i| &codewords[i])
            .find(|cw| blocker(cw).is_none())
        else {
            let cw = &codewords[found[0]];
            let m = blocker(cw).expect("undecodable codeword has a blocker");
            return Err(Error::Decode {
                user: user + 1,
                color: cw.color + 1,
                detail: format!("{m} interferes with {want} and is not cached"),
            });
        };
        let mut bytes = cw.bytes.clone();
        for &m in &cw.members {
            if m != want {
                xor_into(&mut bytes, cache.get(m));
            }
        }
        out.insert(want, bytes);
    }
    Ok(out)
}

/// Encode with random payloads, decode at every user and compare.
pub fn verify_round_trip<R: RngCore + ?Sized>(
    config: &SystemConfig,
    placement: &CachePlacement,
    demand: &DemandVector,
    graph: &ConflictGraph,
    coloring: &Coloring,
    payload_len: usize,
    rng: &mut R,
) -> Result<()> {
    let payloads = Payloads::random(config.files, config.packets, payload_len, rng);
    let codewords = encode(coloring, graph, &payloads);
    debug_assert_eq!(codewords.len(), coloring.color_count());
    for u in 0..demand.users() {
        let requests: Vec<PacketId> = graph
            .vertices_of(u)
            .map(|v| graph.vertex(v).packet)
            .collect();
        let got = decode(&codewords, u, placement, &payloads, &requests)?;
        for p in requests {
            if got[&p] != payloads.get(p) {
                return Err(Error::Decode {
                    user: u + 1,
                    color: 0,
                    detail: format!("recovered bytes of {p} differ from the source"),
                });
            }
        }
    }
    Ok(())
}

/// Text form: per codeword a `color k: file:index,...` header line and a
/// hex payload line. Colors are 1-based.
pub fn codewords_to_text(codewords: &[Codeword]) -> String {
    let mut out = String::new();
    for cw in codewords {
        let members: Vec<String> = cw.members.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "color {}: {}", cw.color + 1, members.join(","));
        let _ = writeln!(out, "{}", hex::encode(&cw.bytes));
    }
    out
}

pub fn codewords_from_text(text: &str) -> Result<Vec<Codeword>> {
    let mut out = Vec::new();
    let mut lines = text.lines().enumerate();
    while let Some((i, header)) = lines.next() {
        if header.trim().is_empty() {
            continue;
        }
        let bad = |line: usize, msg: String| Error::Parse {
            line: line + 1,
            msg,
        };
        let rest = header
            .strip_prefix("color ")
            .ok_or_else(|| bad(i, "expected `color k: ...`".into()))?;
        let (k, members) = rest
            .split_once(':')
            .ok_or_else(|| bad(i, "missing ':' after color".into()))?;
        let color: usize = k
            .trim()
            .parse()
            .ok()
            .filter(|&c: &usize| c >= 1)
            .ok_or_else(|| bad(i, format!("bad color {k:?}")))?;
        let members = members
            .trim()
            .split(',')
            .filter(|t| !t.is_empty())
            .map(|t| PacketId::parse(t).ok_or_else(|| bad(i, format!("bad packet {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let (j, payload) = lines
            .next()
            .ok_or_else(|| bad(i, "missing payload line".into()))?;
        let bytes = hex::decode(payload.trim()).map_err(|e| bad(j, e.to_string()))?;
        out.push(Codeword {
            color: color - 1,
            members,
            bytes,
        });
    }
    Ok(out)
}
