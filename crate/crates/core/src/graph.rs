//! Signed directed graph storage, edge-list I/O and sign masking.
//!
//! Nodes are remapped to dense ids `0..n` at load time, in order of first
//! appearance. The original labels are kept so that every file written back
//! out uses the caller's ids. Topology (endpoints and adjacency) is shared
//! behind an `Arc`, so masking or re-signing a graph only copies the sign
//! vector.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::sync::Arc;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = u32;
pub type EdgeId = usize;

/// Sign of a directed edge. `Hidden` means the edge exists but its sign is
/// not observed.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Positive,
    Negative,
    Hidden,
}

impl Sign {
    pub fn parse(token: &str) -> Option<Sign> {
        match token {
            "1" | "+1" | "+" => Some(Sign::Positive),
            "-1" | "-" => Some(Sign::Negative),
            "?" => Some(Sign::Hidden),
            _ => None,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Sign::Positive => "1",
            Sign::Negative => "-1",
            Sign::Hidden => "?",
        }
    }

    #[inline]
    pub fn is_observed(self) -> bool {
        self != Sign::Hidden
    }

    /// +1 / -1 for observed signs.
    pub fn value(self) -> Option<i8> {
        match self {
            Sign::Positive => Some(1),
            Sign::Negative => Some(-1),
            Sign::Hidden => None,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub source: NodeId,
    pub target: NodeId,
    pub sign: Sign,
}

/// Per-node edge counts split by direction and sign.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DegreeTally {
    pub in_pos: u32,
    pub in_neg: u32,
    /// Incoming edges with hidden sign.
    pub in_hidden: u32,
    pub out_pos: u32,
    pub out_neg: u32,
    /// Outgoing edges with hidden sign.
    pub out_hidden: u32,
}

impl DegreeTally {
    pub fn in_degree(&self) -> u32 {
        self.in_pos + self.in_neg + self.in_hidden
    }

    pub fn out_degree(&self) -> u32 {
        self.out_pos + self.out_neg + self.out_hidden
    }

    pub fn is_fully_observed(&self) -> bool {
        self.in_hidden == 0 && self.out_hidden == 0
    }

    fn add_in(&mut self, sign: Sign) {
        match sign {
            Sign::Positive => self.in_pos += 1,
            Sign::Negative => self.in_neg += 1,
            Sign::Hidden => self.in_hidden += 1,
        }
    }

    fn add_out(&mut self, sign: Sign) {
        match sign {
            Sign::Positive => self.out_pos += 1,
            Sign::Negative => self.out_neg += 1,
            Sign::Hidden => self.out_hidden += 1,
        }
    }

    /// The tally after one hidden outgoing edge is revealed with `sign`.
    /// Saturates when there is no hidden outgoing edge to reveal.
    pub fn reveal_out(mut self, sign: Sign) -> DegreeTally {
        if sign.is_observed() && self.out_hidden > 0 {
            self.out_hidden -= 1;
            self.add_out(sign);
        }
        self
    }

    /// The tally after one hidden incoming edge is revealed with `sign`.
    pub fn reveal_in(mut self, sign: Sign) -> DegreeTally {
        if sign.is_observed() && self.in_hidden > 0 {
            self.in_hidden -= 1;
            self.add_in(sign);
        }
        self
    }
}

/// Compressed adjacency: `entries[offsets[v]..offsets[v + 1]]`.
#[derive(Debug)]
struct Csr<T> {
    offsets: Vec<usize>,
    entries: Vec<T>,
}

impl<T> Csr<T> {
    #[inline]
    fn row(&self, v: NodeId) -> &[T] {
        let v = v as usize;
        &self.entries[self.offsets[v]..self.offsets[v + 1]]
    }
}

#[derive(Debug)]
struct Topology {
    labels: Vec<String>,
    ends: Vec<(NodeId, NodeId)>,
    /// (target, edge) sorted by target
    out: Csr<(NodeId, EdgeId)>,
    /// (source, edge) sorted by source
    inc: Csr<(NodeId, EdgeId)>,
    /// direction-agnostic neighbour set, sorted, deduplicated
    nbrs: Csr<NodeId>,
}

impl Topology {
    fn build(labels: Vec<String>, ends: Vec<(NodeId, NodeId)>) -> Topology {
        let n = labels.len();
        let mut out_deg = vec![0usize; n + 1];
        let mut in_deg = vec![0usize; n + 1];
        for &(s, t) in &ends {
            out_deg[s as usize + 1] += 1;
            in_deg[t as usize + 1] += 1;
        }
        for v in 0..n {
            out_deg[v + 1] += out_deg[v];
            in_deg[v + 1] += in_deg[v];
        }
        let mut out_entries = vec![(0, 0); ends.len()];
        let mut in_entries = vec![(0, 0); ends.len()];
        let mut out_fill = out_deg.clone();
        let mut in_fill = in_deg.clone();
        for (e, &(s, t)) in ends.iter().enumerate() {
            out_entries[out_fill[s as usize]] = (t, e);
            out_fill[s as usize] += 1;
            in_entries[in_fill[t as usize]] = (s, e);
            in_fill[t as usize] += 1;
        }
        for v in 0..n {
            out_entries[out_deg[v]..out_deg[v + 1]].sort_unstable();
            in_entries[in_deg[v]..in_deg[v + 1]].sort_unstable();
        }
        let out = Csr {
            offsets: out_deg,
            entries: out_entries,
        };
        let inc = Csr {
            offsets: in_deg,
            entries: in_entries,
        };

        let mut nbr_offsets = Vec::with_capacity(n + 1);
        let mut nbr_entries = Vec::with_capacity(2 * ends.len());
        nbr_offsets.push(0);
        for v in 0..n as NodeId {
            let (a, b) = (out.row(v), inc.row(v));
            let (mut i, mut j) = (0, 0);
            while i < a.len() || j < b.len() {
                let next = match (a.get(i), b.get(j)) {
                    (Some(&(x, _)), Some(&(y, _))) if x == y => {
                        i += 1;
                        j += 1;
                        x
                    }
                    (Some(&(x, _)), Some(&(y, _))) if x < y => {
                        i += 1;
                        x
                    }
                    (Some(_), Some(&(y, _))) => {
                        j += 1;
                        y
                    }
                    (Some(&(x, _)), None) => {
                        i += 1;
                        x
                    }
                    (None, Some(&(y, _))) => {
                        j += 1;
                        y
                    }
                    (None, None) => unreachable!(),
                };
                nbr_entries.push(next);
            }
            nbr_offsets.push(nbr_entries.len());
        }
        Topology {
            labels,
            ends,
            out,
            inc,
            nbrs: Csr {
                offsets: nbr_offsets,
                entries: nbr_entries,
            },
        }
    }
}

/// Immutable signed directed graph with at most one edge per ordered pair
/// and no self-loops.
#[derive(Clone, Debug)]
pub struct SignedDigraph {
    topo: Arc<Topology>,
    signs: Vec<Sign>,
}

/// Options for [`load_edge_list_with`].
#[derive(Clone, Debug)]
pub struct LoadOptions {
    /// Accept `?` as a sign token.
    pub allow_hidden: bool,
    /// Drop self-loops instead of failing.
    pub skip_self_loops: bool,
    /// Keep the first of several lines for the same ordered pair instead of
    /// failing.
    pub skip_duplicates: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            allow_hidden: true,
            skip_self_loops: false,
            skip_duplicates: false,
        }
    }
}

/// What [`load_edge_list_with`] dropped under lenient options.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LoadSummary {
    pub data_lines: usize,
    pub skipped_self_loops: usize,
    pub skipped_duplicates: usize,
}

/// Parse a whitespace-separated `source target sign` edge list.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<SignedDigraph> {
    load_edge_list_with(reader, &LoadOptions::default()).map(|(g, _)| g)
}

pub fn load_edge_list_with<R: BufRead>(
    reader: R,
    opts: &LoadOptions,
) -> Result<(SignedDigraph, LoadSummary)> {
    let mut ids: HashMap<String, NodeId> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut ends = Vec::new();
    let mut signs = Vec::new();
    let mut seen: HashMap<(NodeId, NodeId), usize> = HashMap::new();
    let mut summary = LoadSummary::default();

    let mut intern = |label: &str, labels: &mut Vec<String>| -> NodeId {
        if let Some(&id) = ids.get(label) {
            return id;
        }
        let id = labels.len() as NodeId;
        ids.insert(label.to_owned(), id);
        labels.push(label.to_owned());
        id
    };

    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        summary.data_lines += 1;
        let mut fields = trimmed.split_whitespace();
        let (src, dst, tok) = match (fields.next(), fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), Some(c), None) => (a, b, c),
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected `source target sign`, got {trimmed:?}"),
                })
            }
        };
        let sign = match Sign::parse(tok) {
            Some(Sign::Hidden) if !opts.allow_hidden => None,
            other => other,
        }
        .ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("invalid sign {tok:?}"),
        })?;
        if src == dst {
            if opts.skip_self_loops {
                summary.skipped_self_loops += 1;
                continue;
            }
            return Err(Error::SelfLoop {
                line: line_no,
                label: src.to_owned(),
            });
        }
        let s = intern(src, &mut labels);
        let t = intern(dst, &mut labels);
        match seen.entry((s, t)) {
            Entry::Occupied(_) if opts.skip_duplicates => {
                summary.skipped_duplicates += 1;
                continue;
            }
            Entry::Occupied(_) => {
                return Err(Error::DuplicateEdge {
                    line: line_no,
                    source_label: src.to_owned(),
                    target_label: dst.to_owned(),
                })
            }
            Entry::Vacant(v) => {
                v.insert(line_no);
            }
        }
        ends.push((s, t));
        signs.push(sign);
    }

    let topo = Topology::build(labels, ends);
    Ok((
        SignedDigraph {
            topo: Arc::new(topo),
            signs,
        },
        summary,
    ))
}

impl SignedDigraph {
    /// Build from dense node ids. Labels are the decimal ids.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<SignedDigraph>
    where
        I: IntoIterator<Item = (NodeId, NodeId, Sign)>,
    {
        let mut ends = Vec::new();
        let mut signs = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (i, (s, t, sign)) in edges.into_iter().enumerate() {
            for v in [s, t] {
                if v as usize >= node_count {
                    return Err(Error::UnknownNode(v));
                }
            }
            if s == t {
                return Err(Error::SelfLoop {
                    line: i + 1,
                    label: s.to_string(),
                });
            }
            if !seen.insert((s, t)) {
                return Err(Error::DuplicateEdge {
                    line: i + 1,
                    source_label: s.to_string(),
                    target_label: t.to_string(),
                });
            }
            ends.push((s, t));
            signs.push(sign);
        }
        let labels = (0..node_count).map(|v| v.to_string()).collect();
        Ok(SignedDigraph {
            topo: Arc::new(Topology::build(labels, ends)),
            signs,
        })
    }

    /// Write in the canonical edge-list format using the original labels.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        for e in self.edges() {
            writeln!(
                w,
                "{} {} {}",
                self.label(e.source),
                self.label(e.target),
                e.sign
            )?;
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.topo.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.signs.len()
    }

    pub fn label(&self, v: NodeId) -> &str {
        &self.topo.labels[v as usize]
    }

    pub fn node_by_label(&self, label: &str) -> Option<NodeId> {
        // Linear; only used by file readers that already hold a lookup.
        self.topo
            .labels
            .iter()
            .position(|l| l == label)
            .map(|p| p as NodeId)
    }

    /// Label to id map, for bulk lookups.
    pub fn label_index(&self) -> HashMap<&str, NodeId> {
        self.topo
            .labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i as NodeId))
            .collect()
    }

    #[inline]
    pub fn edge(&self, e: EdgeId) -> Edge {
        let (source, target) = self.topo.ends[e];
        Edge {
            source,
            target,
            sign: self.signs[e],
        }
    }

    #[inline]
    pub fn sign(&self, e: EdgeId) -> Sign {
        self.signs[e]
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.edge_count()).map(move |e| self.edge(e))
    }

    /// Ids of the edges whose sign is observed (training edges).
    pub fn observed_edges(&self) -> Vec<EdgeId> {
        (0..self.edge_count())
            .filter(|&e| self.signs[e].is_observed())
            .collect()
    }

    pub fn hidden_edges(&self) -> Vec<EdgeId> {
        (0..self.edge_count())
            .filter(|&e| !self.signs[e].is_observed())
            .collect()
    }

    /// (positive, negative, hidden) edge counts.
    pub fn sign_counts(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for s in &self.signs {
            match s {
                Sign::Positive => c.0 += 1,
                Sign::Negative => c.1 += 1,
                Sign::Hidden => c.2 += 1,
            }
        }
        c
    }

    pub fn is_fully_observed(&self) -> bool {
        self.signs.iter().all(|s| s.is_observed())
    }

    /// Outgoing `(target, edge)` pairs sorted by target.
    #[inline]
    pub fn out_edges(&self, v: NodeId) -> &[(NodeId, EdgeId)] {
        self.topo.out.row(v)
    }

    /// Incoming `(source, edge)` pairs sorted by source.
    #[inline]
    pub fn in_edges(&self, v: NodeId) -> &[(NodeId, EdgeId)] {
        self.topo.inc.row(v)
    }

    /// Direction-agnostic neighbours, sorted.
    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        self.topo.nbrs.row(v)
    }

    pub fn find_edge(&self, source: NodeId, target: NodeId) -> Option<EdgeId> {
        if source as usize >= self.node_count() {
            return None;
        }
        let row = self.out_edges(source);
        row.binary_search_by_key(&target, |&(t, _)| t)
            .ok()
            .map(|i| row[i].1)
    }

    fn check_node(&self, v: NodeId) -> Result<()> {
        if (v as usize) < self.node_count() {
            Ok(())
        } else {
            Err(Error::UnknownNode(v))
        }
    }

    pub fn degree_tally(&self, v: NodeId) -> Result<DegreeTally> {
        self.check_node(v)?;
        Ok(self.tally_unchecked(v))
    }

    #[inline]
    pub(crate) fn tally_unchecked(&self, v: NodeId) -> DegreeTally {
        let mut t = DegreeTally::default();
        for &(_, e) in self.in_edges(v) {
            t.add_in(self.signs[e]);
        }
        for &(_, e) in self.out_edges(v) {
            t.add_out(self.signs[e]);
        }
        t
    }

    /// Tallies for every node, indexed by node id.
    pub fn tallies(&self) -> Vec<DegreeTally> {
        let mut t = vec![DegreeTally::default(); self.node_count()];
        for (e, &(s, d)) in self.topo.ends.iter().enumerate() {
            t[s as usize].add_out(self.signs[e]);
            t[d as usize].add_in(self.signs[e]);
        }
        t
    }

    /// Nodes other than `x` and `y` linked to both by an edge in either
    /// direction, of any sign. Sorted by id.
    pub fn common_neighbors(&self, x: NodeId, y: NodeId) -> Result<Vec<NodeId>> {
        self.check_node(x)?;
        self.check_node(y)?;
        if x == y {
            return Err(Error::SameEndpoints(x));
        }
        let mut out = Vec::new();
        self.for_each_common_neighbor(x, y, |z| out.push(z));
        Ok(out)
    }

    /// Number of common neighbours (embeddedness) of `x` and `y`.
    pub fn embeddedness(&self, x: NodeId, y: NodeId) -> Result<usize> {
        self.check_node(x)?;
        self.check_node(y)?;
        if x == y {
            return Err(Error::SameEndpoints(x));
        }
        Ok(self.embeddedness_unchecked(x, y))
    }

    pub(crate) fn embeddedness_unchecked(&self, x: NodeId, y: NodeId) -> usize {
        let mut n = 0;
        self.for_each_common_neighbor(x, y, |_| n += 1);
        n
    }

    #[inline]
    pub(crate) fn for_each_common_neighbor<F: FnMut(NodeId)>(&self, x: NodeId, y: NodeId, mut f: F) {
        let (a, b) = (self.neighbors(x), self.neighbors(y));
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    let z = a[i];
                    if z != x && z != y {
                        f(z);
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
    }

    /// Same topology, one edge re-signed.
    pub fn with_edge_sign(&self, e: EdgeId, sign: Sign) -> SignedDigraph {
        let mut signs = self.signs.clone();
        signs[e] = sign;
        SignedDigraph {
            topo: Arc::clone(&self.topo),
            signs,
        }
    }

    /// Put the true signs of a holdout back.
    pub fn restore(&self, holdout: &Holdout) -> SignedDigraph {
        let mut signs = self.signs.clone();
        for h in &holdout.edges {
            signs[h.edge] = h.sign;
        }
        SignedDigraph {
            topo: Arc::clone(&self.topo),
            signs,
        }
    }

    /// Hide the signs of a holdout's edges.
    pub fn hide(&self, holdout: &Holdout) -> SignedDigraph {
        let mut signs = self.signs.clone();
        for h in &holdout.edges {
            signs[h.edge] = Sign::Hidden;
        }
        SignedDigraph {
            topo: Arc::clone(&self.topo),
            signs,
        }
    }

    /// True when both graphs share node labels, endpoints and signs.
    pub fn same_as(&self, other: &SignedDigraph) -> bool {
        (Arc::ptr_eq(&self.topo, &other.topo)
            || (self.topo.labels == other.topo.labels && self.topo.ends == other.topo.ends))
            && self.signs == other.signs
    }
}

/// An edge whose sign was masked, with its true sign.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeldOutEdge {
    pub edge: EdgeId,
    pub sign: Sign,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Holdout {
    pub seed: u64,
    pub fraction: f64,
    /// Sorted by edge id.
    pub edges: Vec<HeldOutEdge>,
}

/// Number of edges masked for `fraction` of `m`: nearest integer, ties up.
pub fn mask_count(fraction: f64, m: usize) -> usize {
    ((fraction * m as f64 + 0.5).floor() as usize).min(m)
}

/// Hide the signs of `round(fraction * m)` edges chosen uniformly without
/// replacement. The choice depends only on `m`, `fraction` and `seed`.
pub fn mask_edges(g: &SignedDigraph, fraction: f64, seed: u64) -> Result<(SignedDigraph, Holdout)> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidFraction(fraction));
    }
    if !g.is_fully_observed() {
        return Err(Error::NotFullyObserved);
    }
    let m = g.edge_count();
    let k = mask_count(fraction, m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, m, k).into_vec();
    picked.sort_unstable();

    let mut signs = g.signs.clone();
    let edges = picked
        .into_iter()
        .map(|e| {
            let sign = signs[e];
            signs[e] = Sign::Hidden;
            HeldOutEdge { edge: e, sign }
        })
        .collect();
    let masked = SignedDigraph {
        topo: Arc::clone(&g.topo),
        signs,
    };
    Ok((
        masked,
        Holdout {
            seed,
            fraction,
            edges,
        },
    ))
}

impl Holdout {
    /// Holdout file: header comment with seed and fraction, then the masked
    /// edges with their true signs in edge-list format.
    pub fn write<W: Write>(&self, g: &SignedDigraph, mut w: W) -> Result<()> {
        writeln!(
            w,
            "# holdout seed={} fraction={} count={}",
            self.seed,
            self.fraction,
            self.edges.len()
        )?;
        for h in &self.edges {
            let e = g.edge(h.edge);
            writeln!(w, "{} {} {}", g.label(e.source), g.label(e.target), h.sign)?;
        }
        Ok(())
    }

    /// Read a holdout file against the graph it was drawn from.
    pub fn read<R: BufRead>(reader: R, g: &SignedDigraph) -> Result<Holdout> {
        let index = g.label_index();
        let mut seed = 0;
        let mut fraction = f64::NAN;
        let mut edges = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let line = line?;
            let trimmed = line.trim();
            if let Some(rest) = trimmed.strip_prefix('#') {
                for kv in rest.split_whitespace() {
                    if let Some(v) = kv.strip_prefix("seed=") {
                        seed = v.parse().unwrap_or(0);
                    } else if let Some(v) = kv.strip_prefix("fraction=") {
                        fraction = v.parse().unwrap_or(f64::NAN);
                    }
                }
                continue;
            }
            if trimmed.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let f: Vec<&str> = trimmed.split_whitespace().collect();
            if f.len() != 3 {
                return Err(parse_err(format!("expected `source target sign`, got {trimmed:?}")));
            }
            let sign = match Sign::parse(f[2]) {
                Some(s) if s.is_observed() => s,
                _ => return Err(parse_err(format!("invalid holdout sign {:?}", f[2]))),
            };
            let lookup = |l: &str| {
                index
                    .get(l)
                    .copied()
                    .ok_or_else(|| parse_err(format!("unknown node {l:?}")))
            };
            let (s, t) = (lookup(f[0])?, lookup(f[1])?);
            let edge = g.find_edge(s, t).ok_or(Error::EdgeNotFound(s, t))?;
            edges.push(HeldOutEdge { edge, sign });
        }
        edges.sort_by_key(|h| h.edge);
        Ok(Holdout {
            seed,
            fraction,
            edges,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<SignedDigraph> {
        load_edge_list(s.as_bytes())
    }

    #[test]
    fn loads_simple_list() {
        let g = parse("0 1 1\n1 2 -1").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.sign_counts(), (1, 1, 0));
    }

    #[test]
    fn empty_stream() {
        let g = parse("").unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (0, 0));
        let g = parse("# only a comment\n\n").unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse("0 0 1"), Err(Error::SelfLoop { line: 1, .. })));
        assert!(matches!(
            parse("0 1 1\n0 1 -1"),
            Err(Error::DuplicateEdge { line: 2, .. })
        ));
        assert!(matches!(parse("# c\n0 1 2"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse("0 1"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("0 1 1 7"), Err(Error::Parse { .. })));
    }

    #[test]
    fn reciprocal_edges_are_distinct() {
        let g = parse("a b 1\nb a -1").unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.neighbors(0), &[1]);
    }

    #[test]
    fn lenient_load_counts_skips() {
        let opts = LoadOptions {
            skip_self_loops: true,
            skip_duplicates: true,
            ..Default::default()
        };
        let (g, s) = load_edge_list_with("1 1 1\n1 2 1\n1 2 -1\n2 3 -1".as_bytes(), &opts).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(s.skipped_self_loops, 1);
        assert_eq!(s.skipped_duplicates, 1);
        assert_eq!(s.data_lines, 4);
    }

    #[test]
    fn tally_counts() {
        // a->x +, b->x -, x->c hidden
        let g = parse("a x 1\nb x -1\nx c ?").unwrap();
        let x = g.node_by_label("x").unwrap();
        let t = g.degree_tally(x).unwrap();
        assert_eq!(
            (t.in_pos, t.in_neg, t.in_hidden, t.out_pos, t.out_neg, t.out_hidden),
            (1, 1, 0, 0, 0, 1)
        );
        assert!(matches!(g.degree_tally(99), Err(Error::UnknownNode(99))));

        let g = parse("s a 1\ns b 1\ns c 1\nq r 1").unwrap();
        let t = g.degree_tally(0).unwrap();
        assert_eq!(t.out_pos, 3);
        assert_eq!(t.in_degree() + t.out_neg + t.out_hidden, 0);
        assert_eq!(g.tallies()[0], t);
    }

    #[test]
    fn isolated_node_tally() {
        let g = SignedDigraph::from_edges(3, [(0, 1, Sign::Positive)]).unwrap();
        assert_eq!(g.degree_tally(2).unwrap(), DegreeTally::default());
    }

    #[test]
    fn common_neighbor_cases() {
        let g = parse("x z 1\nz y 1\nz x -1\nx y 1\nw q 1").unwrap();
        let id = |l| g.node_by_label(l).unwrap();
        assert_eq!(g.common_neighbors(id("x"), id("y")).unwrap(), vec![id("z")]);
        assert_eq!(g.common_neighbors(id("w"), id("x")).unwrap(), Vec::<NodeId>::new());
        assert!(matches!(
            g.common_neighbors(id("x"), id("x")),
            Err(Error::SameEndpoints(_))
        ));
    }

    #[test]
    fn masking() {
        let edges: Vec<_> = (0..100u32).map(|i| (i, i + 1, Sign::Positive)).collect();
        let g = SignedDigraph::from_edges(101, edges).unwrap();
        let (m, h) = mask_edges(&g, 0.1, 7).unwrap();
        assert_eq!(m.sign_counts().2, 10);
        assert_eq!(h.edges.len(), 10);
        let (m2, h2) = mask_edges(&g, 0.1, 7).unwrap();
        assert!(m.same_as(&m2));
        assert_eq!(h, h2);
        assert!(m.restore(&h).same_as(&g));

        let (m0, h0) = mask_edges(&g, 0.0, 3).unwrap();
        assert!(m0.same_as(&g));
        assert!(h0.edges.is_empty());

        assert!(matches!(mask_edges(&g, 1.5, 1), Err(Error::InvalidFraction(_))));
        assert!(matches!(mask_edges(&m, 0.1, 1), Err(Error::NotFullyObserved)));
    }

    #[test]
    fn mask_count_rounds_half_up() {
        assert_eq!(mask_count(0.5, 3), 2);
        assert_eq!(mask_count(0.1, 15), 2);
        assert_eq!(mask_count(0.1, 14), 1);
        assert_eq!(mask_count(1.0, 9), 9);
    }

    #[test]
    fn holdout_file_round_trip() {
        let g = parse("# header\nu v 1\nv w -1\nw u 1\nu w -1").unwrap();
        let (m, h) = mask_edges(&g, 0.5, 11).unwrap();
        let mut buf = Vec::new();
        h.write(&m, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# holdout seed=11 fraction=0.5 count=2"));
        let back = Holdout::read(&buf[..], &m).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn write_and_reload() {
        let g = parse("10 20 1\n20 30 ?\n30 10 -1").unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let g2 = load_edge_list(&buf[..]).unwrap();
        assert!(g.same_as(&g2));
    }
}
