//! Host graphs and edge sets.
//!
//! Every other module speaks edge *indices*: a host graph fixes a canonical
//! order on its edges (lexicographic by `(min endpoint, max endpoint)`) and an
//! [`EdgeSet`] is a bitmask over those indices.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Largest edge count for APIs that enumerate all `2^m` states.
pub const MAX_ENUM_EDGES: usize = 63;

/// Immutable host graph with 0-based vertices and canonically indexed edges.
#[derive(Clone, Debug)]
pub struct HostGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    edge_index: HashMap<(usize, usize), usize>,
    incident: Vec<Vec<usize>>,
}

impl PartialEq for HostGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl Eq for HostGraph {}

impl HostGraph {
    pub fn from_edge_list<I>(n: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n == 0 {
            return Err(Error::InvalidArgument("host graph needs at least one vertex".into()));
        }
        let mut edges = Vec::new();
        for (u, v) in pairs {
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            edges.push((u.min(v), u.max(v)));
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }
        Ok(Self::from_sorted(n, edges))
    }

    fn from_sorted(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut incident = vec![Vec::new(); n];
        let mut edge_index = HashMap::with_capacity(edges.len());
        for (i, &(u, v)) in edges.iter().enumerate() {
            edge_index.insert((u, v), i);
            incident[u].push(i);
            incident[v].push(i);
        }
        Self { n, edges, edge_index, incident }
    }

    /// `K_n`.
    pub fn complete(n: usize) -> Self {
        assert!(n >= 1, "complete graph needs n >= 1");
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Self::from_sorted(n, edges)
    }

    /// `K_{a,b}` with parts `0..a` and `a..a+b`. Edge `{v, a+u}` has index
    /// `v*b + u`.
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        assert!(a >= 1 && b >= 1, "complete bipartite graph needs a, b >= 1");
        let edges = (0..a).flat_map(|v| (0..b).map(move |u| (v, a + u))).collect();
        Self::from_sorted(a + b, edges)
    }

    /// Cycle on `n >= 3` vertices (and `n` edges).
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidArgument(format!("cycle needs n >= 3, got {n}")));
        }
        Self::from_edge_list(n, (0..n).map(|v| (v, (v + 1) % n)))
    }

    /// Path on `n >= 1` vertices.
    pub fn path(n: usize) -> Result<Self> {
        Self::from_edge_list(n, (1..n).map(|v| (v - 1, v)))
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> Option<(usize, usize)> {
        self.edges.get(i).copied()
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.edge_index.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn degree(&self, v: usize) -> Result<usize> {
        self.check_vertex(v)?;
        Ok(self.incident[v].len())
    }

    pub fn min_degree(&self) -> usize {
        self.incident.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Edges incident to `v` (the set `N(v)`).
    pub fn neighborhood_edges(&self, v: usize) -> Result<EdgeSet> {
        self.check_vertex(v)?;
        EdgeSet::from_indices(self.edge_count(), self.incident[v].iter().copied())
    }

    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn empty_set(&self) -> EdgeSet {
        EdgeSet::empty(self.edge_count())
    }

    pub fn full_set(&self) -> EdgeSet {
        EdgeSet::full(self.edge_count())
    }

    /// True when the subgraph spanned by `set` has no cycle.
    pub fn is_forest(&self, set: &EdgeSet) -> bool {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in set.iter() {
            let (u, v) = self.edges[e];
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru == rv {
                return false;
            }
            parent[ru] = rv;
        }
        true
    }

    /// Vertex pairs of the edges in `set`.
    pub fn edge_pairs(&self, set: &EdgeSet) -> Vec<(usize, usize)> {
        set.iter().map(|e| self.edges[e]).collect()
    }

    /// Human-readable edge list such as `{0-1,1-2}`.
    pub fn describe(&self, set: &EdgeSet) -> String {
        let parts: Vec<String> = set
            .iter()
            .map(|e| {
                let (u, v) = self.edges[e];
                format!("{u}-{v}")
            })
            .collect();
        format!("{{{}}}", parts.join(","))
    }

    /// Hex SHA-256 prefix of the canonical edge list; stable across runs.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(format!("n={};", self.n).as_bytes());
        for (u, v) in &self.edges {
            hasher.update(format!("{u},{v};").as_bytes());
        }
        let bytes = hasher.finalize();
        hex::encode(&bytes[..8])
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        } else {
            Ok(())
        }
    }
}

/// JSON host description: either an explicit edge list or a preset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HostSpec {
    Explicit { n: usize, edges: Vec<[usize; 2]> },
    Preset { preset: HostPreset, #[serde(default)] params: Vec<usize> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HostPreset {
    Complete,
    Bipartite,
    Cycle,
    Path,
}

impl HostSpec {
    pub fn build(&self) -> Result<HostGraph> {
        match self {
            HostSpec::Explicit { n, edges } => {
                HostGraph::from_edge_list(*n, edges.iter().map(|&[u, v]| (u, v)))
            }
            HostSpec::Preset { preset, params } => {
                let want = if *preset == HostPreset::Bipartite { 2 } else { 1 };
                if params.len() != want || params.contains(&0) {
                    return Err(Error::InvalidArgument(format!(
                        "preset {preset:?} takes {want} positive parameter(s), got {params:?}"
                    )));
                }
                match preset {
                    HostPreset::Complete => Ok(HostGraph::complete(params[0])),
                    HostPreset::Bipartite => Ok(HostGraph::complete_bipartite(params[0], params[1])),
                    HostPreset::Cycle => HostGraph::cycle(params[0]),
                    HostPreset::Path => HostGraph::path(params[0]),
                }
            }
        }
    }
}

/// A subset of host edges, addressed by edge index.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EdgeSet {
    bits: FixedBitSet,
}

impl EdgeSet {
    pub fn empty(m: usize) -> Self {
        Self { bits: FixedBitSet::with_capacity(m) }
    }

    pub fn full(m: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(m);
        bits.insert_range(..);
        Self { bits }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(m: usize, indices: I) -> Result<Self> {
        let mut set = Self::empty(m);
        for e in indices {
            if e >= m {
                return Err(Error::EdgeOutOfRange { edge: e, m });
            }
            set.bits.insert(e);
        }
        Ok(set)
    }

    /// Set from a bitmask (bit `i` = edge `i`); bits at or above `m` are an error.
    pub fn from_mask(m: usize, mask: u64) -> Result<Self> {
        if m < 64 && mask >> m != 0 {
            return Err(Error::EdgeOutOfRange { edge: 63 - mask.leading_zeros() as usize, m });
        }
        let mut set = Self::empty(m);
        let mut rest = mask;
        while rest != 0 {
            set.bits.insert(rest.trailing_zeros() as usize);
            rest &= rest - 1;
        }
        Ok(set)
    }

    pub fn try_mask(&self) -> Result<u64> {
        if self.universe() > 64 {
            return Err(Error::CapExceeded {
                what: "edges for bitmask state indexing",
                needed: self.universe() as u128,
                cap: 64,
            });
        }
        Ok(self.iter().fold(0u64, |acc, e| acc | (1 << e)))
    }

    /// Bitmask of the set. Panics for hosts with more than 64 edges.
    pub fn mask(&self) -> u64 {
        self.try_mask().expect("edge set too large for a u64 mask")
    }

    /// Host edge count `m`.
    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn contains(&self, e: usize) -> bool {
        self.bits.contains(e)
    }

    /// Panics when `e >= m`.
    pub fn insert(&mut self, e: usize) {
        assert!(e < self.universe(), "edge {e} out of range");
        self.bits.insert(e);
    }

    pub fn remove(&mut self, e: usize) {
        if e < self.universe() {
            self.bits.set(e, false);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        Self { bits }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        Self { bits }
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut bits = self.bits.clone();
        bits.difference_with(&other.bits);
        Self { bits }
    }

    pub fn symmetric_difference(&self, other: &Self) -> Self {
        let mut bits = self.bits.clone();
        bits.symmetric_difference_with(&other.bits);
        Self { bits }
    }

    pub fn complement(&self) -> Self {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        Self { bits }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.bits.is_disjoint(&other.bits)
    }

    pub(crate) fn check_same_host(&self, other: &Self) -> Result<()> {
        if self.universe() != other.universe() {
            return Err(Error::HostMismatch { left: self.universe(), right: other.universe() });
        }
        Ok(())
    }

    /// `0x`-prefixed big-endian hex of the bitmask, any `m`.
    pub fn to_hex(&self) -> String {
        let m = self.universe();
        let mut nibbles = vec![0u8; m.div_ceil(4).max(1)];
        for e in self.iter() {
            nibbles[e / 4] |= 1 << (e % 4);
        }
        let digits: String = nibbles
            .iter()
            .rev()
            .skip_while(|&&d| d == 0)
            .map(|&d| char::from_digit(d as u32, 16).unwrap())
            .collect();
        if digits.is_empty() {
            "0x0".to_string()
        } else {
            format!("0x{digits}")
        }
    }

    pub fn from_hex(m: usize, text: &str) -> Result<Self> {
        let digits = text
            .trim()
            .strip_prefix("0x")
            .or_else(|| text.trim().strip_prefix("0X"))
            .unwrap_or(text.trim());
        if digits.is_empty() {
            return Err(Error::Parse(format!("empty hex edge set {text:?}")));
        }
        let mut set = Self::empty(m);
        for (pos, ch) in digits.chars().rev().enumerate() {
            let d = ch.to_digit(16).ok_or_else(|| Error::Parse(format!("bad hex digit in {text:?}")))?;
            for bit in 0..4 {
                if d >> bit & 1 == 1 {
                    let e = pos * 4 + bit;
                    if e >= m {
                        return Err(Error::EdgeOutOfRange { edge: e, m });
                    }
                    set.bits.insert(e);
                }
            }
        }
        Ok(set)
    }
}

impl Ord for EdgeSet {
    /// Numeric order of the bitmask, then by host size.
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (self.bits.as_slice(), other.bits.as_slice());
        let len = a.len().max(b.len());
        for i in (0..len).rev() {
            let (x, y) = (a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0));
            match x.cmp(&y) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.universe().cmp(&other.universe())
    }
}

impl PartialOrd for EdgeSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EdgeSet{self}/{}", self.universe())
    }
}

impl Serialize for EdgeSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}
