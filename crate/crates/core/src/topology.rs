//! Star-family graph construction with edge-orbit (stratum) labels.
//!
//! Node layout: central nodes take the lowest indices `0..k` (one for the
//! symmetric star, `k` for the k-cored star, none for the complete-cored
//! star), followed by the tail nodes branch by branch, innermost first.
//!
//! Stratum labels: `0` marks complete-core edges; `1` marks the edges that
//! attach a tail to the centre (symmetric and k-cored stars) or the first
//! tail edge (complete-cored star); labels grow by one per step outwards.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Simple undirected graph with optional per-edge stratum labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    node_count: usize,
    edges: Vec<(usize, usize)>,
    strata: Option<Vec<usize>>,
}

impl Graph {
    /// Builds a graph, normalising every edge to `(min, max)`.
    ///
    /// Self-loops, duplicate edges and out-of-range indices are rejected.
    /// Connectivity is not required here; see [`validate`].
    pub fn new(node_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::InvalidGraph("graph needs at least one node".into()));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut normalised = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u >= node_count || v >= node_count {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) out of range for {node_count} nodes")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at node {u}")));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({}, {})", e.0, e.1)));
            }
            normalised.push(e);
        }
        Ok(Graph { node_count, edges: normalised, strata: None })
    }

    /// Attaches one stratum label per edge, in edge order.
    pub fn with_strata(mut self, strata: Vec<usize>) -> Result<Self> {
        if strata.len() != self.edges.len() {
            return Err(Error::InvalidGraph(format!("{} stratum labels for {} edges", strata.len(), self.edges.len())));
        }
        self.strata = Some(strata);
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn strata(&self) -> Option<&[usize]> {
        self.strata.as_deref()
    }

    /// Number of edges carrying each stratum label.
    pub fn stratum_sizes(&self) -> BTreeMap<usize, usize> {
        let mut sizes = BTreeMap::new();
        if let Some(strata) = &self.strata {
            for &s in strata {
                *sizes.entry(s).or_insert(0) += 1;
            }
        }
        sizes
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.node_count];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        let adj = self.neighbours();
        let mut seen = vec![false; self.node_count];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.node_count
    }

    pub(crate) fn require_connected(&self) -> Result<()> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(Error::Disconnected)
        }
    }

    /// Edge list as CSV `u,v,stratum` (stratum left empty when unlabelled).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["u", "v", "stratum"])?;
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            let s = self.strata.as_ref().map(|s| s[i].to_string()).unwrap_or_default();
            w.write_record([u.to_string(), v.to_string(), s])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads an edge list written by [`Graph::write_csv`]. The node count is
    /// one more than the largest index seen. Strata are kept only when every
    /// row carries one.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let mut edges = Vec::new();
        let mut strata = Vec::new();
        let mut all_labelled = true;
        for rec in r.records() {
            let rec = rec?;
            let parse = |i: usize| -> Result<usize> {
                rec.get(i)
                    .unwrap_or("")
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidGraph(format!("bad field in row {:?}", rec)))
            };
            edges.push((parse(0)?, parse(1)?));
            match rec.get(2).map(str::trim) {
                Some(s) if !s.is_empty() => {
                    strata.push(s.parse().map_err(|_| Error::InvalidGraph(format!("bad stratum {s:?}")))?)
                }
                _ => all_labelled = false,
            }
        }
        let n = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(1);
        let g = Graph::new(n, edges)?;
        if all_labelled && !strata.is_empty() {
            g.with_strata(strata)
        } else {
            Ok(g)
        }
    }
}

/// The graph families handled by the toolkit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Topology {
    /// One centre with `n` tails of `m` edges each.
    SymmetricStar {
        m: usize,
        n: usize,
    },
    /// `n` tails of `m` edges whose inner ends form a complete graph.
    CcsStar {
        m: usize,
        n: usize,
    },
    /// `n` tails of `m` nodes; each inner node is joined to all `k` centres.
    KcsStar {
        m: usize,
        n: usize,
        k: usize,
    },
    Custom {
        graph: Graph,
    },
}

impl Topology {
    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::ParameterBounds(msg));
        match *self {
            Topology::SymmetricStar { m, n } if m < 1 || n < 1 => {
                bad(format!("symmetric star needs m >= 1 and n >= 1 (got m={m}, n={n})"))
            }
            Topology::CcsStar { m, n } if m < 1 || n < 2 => {
                bad(format!("CCS star needs m >= 1 and n >= 2 (got m={m}, n={n})"))
            }
            Topology::KcsStar { m, n, k } if m < 1 || n < 1 || k < 1 => {
                bad(format!("KCS star needs m, n, k >= 1 (got m={m}, n={n}, k={k})"))
            }
            _ => Ok(()),
        }
    }

    /// `(m, n)` for the star families.
    pub fn star_params(&self) -> Option<(usize, usize)> {
        match *self {
            Topology::SymmetricStar { m, n } | Topology::CcsStar { m, n } | Topology::KcsStar { m, n, .. } => {
                Some((m, n))
            }
            Topology::Custom { .. } => None,
        }
    }

    /// Number of central nodes at the start of the index layout.
    pub fn central_count(&self) -> usize {
        match *self {
            Topology::SymmetricStar { .. } => 1,
            Topology::KcsStar { k, .. } => k,
            _ => 0,
        }
    }

    /// Nodes per branch in the index layout.
    pub fn branch_len(&self) -> Option<usize> {
        match *self {
            Topology::SymmetricStar { m, .. } | Topology::KcsStar { m, .. } => Some(m),
            Topology::CcsStar { m, .. } => Some(m + 1),
            Topology::Custom { .. } => None,
        }
    }

    /// Index of the node at position `pos` (0 = innermost) of `branch`.
    pub fn tail_node(&self, branch: usize, pos: usize) -> Option<usize> {
        let len = self.branch_len()?;
        let (_, n) = self.star_params()?;
        (branch < n && pos < len).then(|| self.central_count() + branch * len + pos)
    }

    /// Node permutation exchanging branches `a` and `b` (an automorphism).
    pub fn branch_swap(&self, a: usize, b: usize) -> Result<Vec<usize>> {
        let (_, n) = self.star_params().ok_or_else(|| Error::Unsupported("custom graphs have no branches".into()))?;
        if a >= n || b >= n {
            return Err(Error::ParameterBounds(format!("branch index out of range 0..{n}")));
        }
        let len = self.branch_len().unwrap_or(0);
        let c = self.central_count();
        let total = c + n * len;
        let mut perm: Vec<usize> = (0..total).collect();
        for pos in 0..len {
            perm.swap(c + a * len + pos, c + b * len + pos);
        }
        Ok(perm)
    }
}

/// Builds the graph of a topology, with stratum labels for the star families.
pub fn build(topology: &Topology) -> Result<Graph> {
    topology.check()?;
    match *topology {
        Topology::SymmetricStar { m, n } => build_cored_star(m, n, 1),
        Topology::KcsStar { m, n, k } => build_cored_star(m, n, k),
        Topology::CcsStar { m, n } => {
            let len = m + 1;
            let mut edges = Vec::new();
            let mut strata = Vec::new();
            for a in 0..n {
                for b in (a + 1)..n {
                    edges.push((a * len, b * len));
                    strata.push(0);
                }
            }
            for b in 0..n {
                for p in 0..m {
                    edges.push((b * len + p, b * len + p + 1));
                    strata.push(p + 1);
                }
            }
            Graph::new(n * len, edges)?.with_strata(strata)
        }
        Topology::Custom { ref graph } => Ok(graph.clone()),
    }
}

fn build_cored_star(m: usize, n: usize, k: usize) -> Result<Graph> {
    let mut edges = Vec::with_capacity(n * (m - 1 + k));
    let mut strata = Vec::with_capacity(edges.capacity());
    for b in 0..n {
        let base = k + b * m;
        for c in 0..k {
            edges.push((c, base));
            strata.push(1);
        }
        for p in 0..(m - 1) {
            edges.push((base + p, base + p + 1));
            strata.push(p + 2);
        }
    }
    Graph::new(k + n * m, edges)?.with_strata(strata)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub node_count: usize,
    pub edge_count: usize,
    pub connected: bool,
    pub simple: bool,
    pub degrees: Vec<usize>,
}

/// Structural report for a graph. Never fails.
pub fn validate(graph: &Graph) -> ValidationReport {
    ValidationReport {
        node_count: graph.node_count(),
        edge_count: graph.edge_count(),
        connected: graph.is_connected(),
        // Graph::new rejects loops and duplicates
        simple: true,
        degrees: graph.degrees(),
    }
}

/// Report for a raw edge list, which may contain loops or duplicates.
pub fn validate_edges(node_count: usize, edges: &[(usize, usize)]) -> ValidationReport {
    match Graph::new(node_count, edges.to_vec()) {
        Ok(g) => validate(&g),
        Err(_) => {
            let mut degrees = vec![0; node_count];
            for &(u, v) in edges {
                if u < node_count {
                    degrees[u] += 1;
                }
                if v < node_count {
                    degrees[v] += 1;
                }
            }
            ValidationReport { node_count, edge_count: edges.len(), connected: false, simple: false, degrees }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<usize>) -> Vec<usize> {
        v.sort_unstable();
        v
    }

    #[test]
    fn symmetric_star_three_five() {
        let g = build(&Topology::SymmetricStar { m: 3, n: 5 }).unwrap();
        assert_eq!(g.node_count(), 16);
        assert_eq!(g.edge_count(), 15);
        let sizes = g.stratum_sizes();
        assert_eq!(sizes.into_iter().collect::<Vec<_>>(), vec![(1, 5), (2, 5), (3, 5)]);
        let report = validate(&g);
        assert!(report.connected);
        assert_eq!(report.degrees[0], 5);
    }

    #[test]
    fn single_edge_star() {
        let g = build(&Topology::SymmetricStar { m: 1, n: 1 }).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (2, 1));
        assert_eq!(validate(&g).degrees, vec![1, 1]);
    }

    #[test]
    fn ccs_two_five() {
        let g = build(&Topology::CcsStar { m: 2, n: 5 }).unwrap();
        assert_eq!(g.node_count(), 15);
        assert_eq!(g.edge_count(), 20);
        let sizes = g.stratum_sizes();
        assert_eq!(sizes[&0], 10);
        assert_eq!(sizes[&1], 5);
        assert_eq!(sizes[&2], 5);
        // core edges come first, lexicographic
        assert_eq!(&g.edges()[..2], &[(0, 3), (0, 6)]);
    }

    #[test]
    fn kcs_three_five_two() {
        let g = build(&Topology::KcsStar { m: 3, n: 5, k: 2 }).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (17, 20));
        // first branch: attachments to both centres, then inner-to-outer
        assert_eq!(&g.edges()[..4], &[(0, 2), (1, 2), (2, 3), (3, 4)]);
        assert_eq!(sorted(g.degrees())[..2], [1, 1]);
    }

    #[test]
    fn parameter_bounds() {
        for t in [
            Topology::SymmetricStar { m: 0, n: 3 },
            Topology::CcsStar { m: 2, n: 1 },
            Topology::KcsStar { m: 2, n: 3, k: 0 },
        ] {
            assert!(matches!(build(&t), Err(Error::ParameterBounds(_))), "{t:?}");
        }
    }

    #[test]
    fn disconnected_pair() {
        let g = Graph::new(2, vec![]).unwrap();
        assert!(!validate(&g).connected);
    }

    #[test]
    fn rejects_loops_and_duplicates() {
        assert!(Graph::new(3, vec![(0, 0)]).is_err());
        assert!(Graph::new(3, vec![(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(3, vec![(0, 3)]).is_err());
        let r = validate_edges(3, &[(0, 1), (1, 0)]);
        assert!(!r.simple);
    }

    #[test]
    fn csv_round_trip_keeps_strata() {
        let g = build(&Topology::KcsStar { m: 2, n: 3, k: 2 }).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        assert!(buf.starts_with(b"u,v,stratum\n"));
        assert_eq!(Graph::read_csv(buf.as_slice()).unwrap(), g);
    }

    #[test]
    fn custom_csv_has_empty_stratum() {
        let g = Graph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "u,v,stratum\n0,1,\n1,2,\n");
    }
}
