//! Edge weights and symmetric stochastic weight matrices.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::spectral;
use crate::topology::{build, Graph, Topology};

/// Tolerance on `|row sum - 1|` for an assembled matrix.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// Weights keyed by stratum label, or one weight per edge (in edge order).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightAssignment {
    PerStratum(BTreeMap<usize, f64>),
    PerEdge(Vec<f64>),
}

impl WeightAssignment {
    pub fn uniform_per_stratum(graph: &Graph, w: f64) -> Self {
        WeightAssignment::PerStratum(graph.stratum_sizes().keys().map(|&s| (s, w)).collect())
    }

    /// Resolves the assignment to one weight per edge of `graph`.
    pub fn edge_weights(&self, graph: &Graph) -> Result<Vec<f64>> {
        match self {
            WeightAssignment::PerEdge(w) => {
                if w.len() < graph.edge_count() {
                    let (u, v) = graph.edges()[w.len()];
                    return Err(Error::IncompleteAssignment { u, v });
                }
                if w.len() > graph.edge_count() {
                    return Err(Error::DimensionMismatch { expected: graph.edge_count(), found: w.len() });
                }
                Ok(w.clone())
            }
            WeightAssignment::PerStratum(map) => {
                let strata = graph
                    .strata()
                    .ok_or_else(|| Error::Unsupported("per-stratum weights need a stratum-labelled graph".into()))?;
                graph
                    .edges()
                    .iter()
                    .zip(strata)
                    .map(|(&(u, v), s)| map.get(s).copied().ok_or(Error::IncompleteAssignment { u, v }))
                    .collect()
            }
        }
    }

    /// Weight of stratum `s`, if the assignment is per stratum.
    pub fn stratum(&self, s: usize) -> Option<f64> {
        match self {
            WeightAssignment::PerStratum(map) => map.get(&s).copied(),
            WeightAssignment::PerEdge(_) => None,
        }
    }

    /// Reads per-stratum weights back off a matrix; fails if two edges of one
    /// stratum differ by more than `tol`.
    pub fn per_stratum_from_matrix(graph: &Graph, w: &WeightMatrix, tol: f64) -> Result<Self> {
        let strata = graph.strata().ok_or_else(|| Error::Unsupported("graph has no stratum labels".into()))?;
        let mut map: BTreeMap<usize, f64> = BTreeMap::new();
        for (&(u, v), &s) in graph.edges().iter().zip(strata) {
            let x = w.get(u, v);
            match map.get(&s) {
                Some(&prev) if (prev - x).abs() > tol => {
                    return Err(Error::Unsupported(format!("weights within stratum {s} differ ({prev} vs {x})")))
                }
                Some(_) => {}
                None => {
                    map.insert(s, x);
                }
            }
        }
        Ok(WeightAssignment::PerStratum(map))
    }
}

/// Closed-form weights together with whether their optimality is guaranteed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimalWeights {
    pub assignment: WeightAssignment,
    /// False for k-cored stars whose discarded central eigenvalue exceeds
    /// the closed-form SLEM, and for single-branch stars (a path, where
    /// uniform 1/2 weights do better); the weights are still returned.
    pub optimality_guaranteed: bool,
}

/// Closed-form optimal weights of a star family.
///
/// * symmetric star: `w1 = 2/(n+2)`, all further tail edges `1/2`;
/// * CCS star: core edges `1/n`, tail edges `1/2`;
/// * KCS star: attachment edges `2/(n+2k)`, tail edges `1/2`.
pub fn optimal_weights(topology: &Topology) -> Result<OptimalWeights> {
    topology.check()?;
    let mut map = BTreeMap::new();
    let mut guaranteed = true;
    match *topology {
        Topology::SymmetricStar { m, n } => {
            map.insert(1, 2.0 / (n as f64 + 2.0));
            for s in 2..=m {
                map.insert(s, 0.5);
            }
            guaranteed = n >= 2;
        }
        Topology::CcsStar { m, n } => {
            map.insert(0, 1.0 / n as f64);
            for s in 1..=m {
                map.insert(s, 0.5);
            }
        }
        Topology::KcsStar { m, n, k } => {
            map.insert(1, 2.0 / (n as f64 + 2.0 * k as f64));
            for s in 2..=m {
                map.insert(s, 0.5);
            }
            guaranteed = n >= 2 && spectral::kcs_closed_form_holds(m, n, k)?;
        }
        Topology::Custom { .. } => {
            return Err(Error::Unsupported("no closed-form optimal weights for custom graphs".into()))
        }
    }
    Ok(OptimalWeights { assignment: WeightAssignment::PerStratum(map), optimality_guaranteed: guaranteed })
}

/// Symmetric matrix with unit row sums and the sparsity of its graph.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightMatrix {
    matrix: DenseMatrix,
}

impl WeightMatrix {
    /// Wraps a dense matrix after checking symmetry and unit row sums.
    pub fn from_dense(matrix: DenseMatrix) -> Result<Self> {
        let asym = matrix.max_asymmetry();
        if asym > STOCHASTIC_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        let dev = row_sum_deviation(&matrix);
        if dev > STOCHASTIC_TOL {
            return Err(Error::NotStochastic(dev));
        }
        Ok(WeightMatrix { matrix })
    }

    pub fn order(&self) -> usize {
        self.matrix.order()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    pub fn as_dense(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn into_dense(self) -> DenseMatrix {
        self.matrix
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.order()).map(|i| self.get(i, i)).collect()
    }

    /// Negative self-weights are legitimate (the optimal symmetric star has
    /// one at the centre) but worth flagging.
    pub fn has_negative_diagonal(&self) -> bool {
        self.diagonal().iter().any(|&d| d < 0.0)
    }

    pub fn max_row_sum_deviation(&self) -> f64 {
        row_sum_deviation(&self.matrix)
    }

    /// Dense CSV, row-major, 17 significant digits, no header.
    pub fn write_dense_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let n = self.order();
        for i in 0..n {
            let row: Vec<String> = self.matrix.row(i).iter().map(|x| fmt_full(*x)).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// `u,v,weight` rows followed by a `node,self_weight` section.
    pub fn write_weights_csv<W: Write>(&self, graph: &Graph, mut out: W) -> Result<()> {
        writeln!(out, "u,v,weight")?;
        for &(u, v) in graph.edges() {
            writeln!(out, "{u},{v},{}", fmt_full(self.get(u, v)))?;
        }
        writeln!(out, "node,self_weight")?;
        for (i, d) in self.diagonal().into_iter().enumerate() {
            writeln!(out, "{i},{}", fmt_full(d))?;
        }
        Ok(())
    }

    pub fn weights_json(&self, graph: &Graph) -> serde_json::Value {
        let edges: Vec<_> = graph
            .edges()
            .iter()
            .map(|&(u, v)| serde_json::json!({ "u": u, "v": v, "weight": self.get(u, v) }))
            .collect();
        let diag: Vec<_> = self
            .diagonal()
            .into_iter()
            .enumerate()
            .map(|(i, d)| serde_json::json!({ "node": i, "self_weight": d }))
            .collect();
        serde_json::json!({ "edges": edges, "diag": diag })
    }
}

/// Formats with 17 significant digits.
pub fn fmt_full(x: f64) -> String {
    format!("{x:.16e}")
}

fn row_sum_deviation(m: &DenseMatrix) -> f64 {
    (0..m.order()).map(|i| (m.row(i).iter().sum::<f64>() - 1.0).abs()).fold(0.0, f64::max)
}

/// Off-diagonal entries from the edge weights; each diagonal entry is one
/// minus the incident weights.
pub fn assemble_matrix(graph: &Graph, assignment: &WeightAssignment) -> Result<WeightMatrix> {
    let w = assignment.edge_weights(graph)?;
    Ok(assemble_from_edge_weights(graph, &w))
}

pub(crate) fn assemble_from_edge_weights(graph: &Graph, w: &[f64]) -> WeightMatrix {
    let n = graph.node_count();
    let mut m = DenseMatrix::zeros(n);
    let mut incident = vec![0.0; n];
    for (&(u, v), &x) in graph.edges().iter().zip(w) {
        m.set(u, v, x);
        m.set(v, u, x);
        incident[u] += x;
        incident[v] += x;
    }
    for (i, s) in incident.into_iter().enumerate() {
        m.set(i, i, 1.0 - s);
    }
    WeightMatrix { matrix: m }
}

/// `1 / (1 + max(d_i, d_j))` on every edge.
pub fn metropolis_weights(graph: &Graph) -> Result<WeightMatrix> {
    graph.require_connected()?;
    let deg = graph.degrees();
    let w: Vec<f64> = graph.edges().iter().map(|&(u, v)| 1.0 / (1.0 + deg[u].max(deg[v]) as f64)).collect();
    Ok(assemble_from_edge_weights(graph, &w))
}

/// `1 / max_k d_k` on every edge.
pub fn max_degree_weights(graph: &Graph) -> Result<WeightMatrix> {
    graph.require_connected()?;
    let dmax = graph.degrees().into_iter().max().unwrap_or(0).max(1) as f64;
    Ok(assemble_from_edge_weights(graph, &vec![1.0 / dmax; graph.edge_count()]))
}

/// Constant edge weight `2 / (λ_1(L) + λ_{N-1}(L))` with `L = D - A`.
pub fn best_constant_weights(graph: &Graph) -> Result<WeightMatrix> {
    graph.require_connected()?;
    Ok(assemble_from_edge_weights(graph, &vec![best_constant_alpha(graph)?; graph.edge_count()]))
}

/// The best-constant step `α*`; zero for a single node.
pub fn best_constant_alpha(graph: &Graph) -> Result<f64> {
    let n = graph.node_count();
    if n < 2 {
        return Ok(0.0);
    }
    let spectrum = spectral::eig_symmetric(&laplacian(graph))?;
    let ev = spectrum.values();
    Ok(2.0 / (ev[0] + ev[n - 2]))
}

/// Graph Laplacian `D - A`.
pub fn laplacian(graph: &Graph) -> DenseMatrix {
    let n = graph.node_count();
    let mut l = DenseMatrix::zeros(n);
    for &(u, v) in graph.edges() {
        l.add(u, u, 1.0);
        l.add(v, v, 1.0);
        l.set(u, v, -1.0);
        l.set(v, u, -1.0);
    }
    l
}

/// Weighting scheme selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    Metropolis,
    MaxDegree,
    BestConstant,
    Optimal,
}

impl Weighting {
    pub const ALL: [Weighting; 4] =
        [Weighting::Metropolis, Weighting::MaxDegree, Weighting::BestConstant, Weighting::Optimal];

    pub fn name(self) -> &'static str {
        match self {
            Weighting::Metropolis => "metropolis",
            Weighting::MaxDegree => "max-degree",
            Weighting::BestConstant => "best-constant",
            Weighting::Optimal => "optimal",
        }
    }

    pub fn matrix_for_graph(self, graph: &Graph, topology: &Topology) -> Result<WeightMatrix> {
        match self {
            Weighting::Metropolis => metropolis_weights(graph),
            Weighting::MaxDegree => max_degree_weights(graph),
            Weighting::BestConstant => best_constant_weights(graph),
            Weighting::Optimal => assemble_matrix(graph, &optimal_weights(topology)?.assignment),
        }
    }

    /// Builds the topology and returns its weight matrix under this scheme.
    pub fn matrix(self, topology: &Topology) -> Result<WeightMatrix> {
        let g = build(topology)?;
        self.matrix_for_graph(&g, topology)
    }
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Weighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Weighting::ALL
            .into_iter()
            .find(|w| w.name() == s)
            .ok_or_else(|| Error::ParameterBounds(format!("unknown weighting {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star_k1_3() -> Graph {
        Graph::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-14
    }

    #[test]
    fn optimal_symmetric_star() {
        let w = optimal_weights(&Topology::SymmetricStar { m: 3, n: 5 }).unwrap();
        assert!(w.optimality_guaranteed);
        assert_eq!(w.assignment.stratum(1), Some(2.0 / 7.0));
        assert_eq!(w.assignment.stratum(2), Some(0.5));
        assert_eq!(w.assignment.stratum(3), Some(0.5));
    }

    #[test]
    fn optimal_ccs_and_kcs() {
        let ccs = optimal_weights(&Topology::CcsStar { m: 2, n: 5 }).unwrap();
        assert_eq!(ccs.assignment.stratum(0), Some(0.2));
        assert_eq!(ccs.assignment.stratum(2), Some(0.5));
        let kcs = optimal_weights(&Topology::KcsStar { m: 3, n: 5, k: 2 }).unwrap();
        assert_eq!(kcs.assignment.stratum(1), Some(2.0 / 9.0));
        assert_eq!(kcs.assignment.stratum(3), Some(0.5));
        assert!(kcs.optimality_guaranteed);
    }

    #[test]
    fn kcs_with_one_centre_matches_symmetric_star() {
        for m in 1..=6 {
            for n in 1..=8 {
                let a = optimal_weights(&Topology::KcsStar { m, n, k: 1 }).unwrap().assignment;
                let b = optimal_weights(&Topology::SymmetricStar { m, n }).unwrap().assignment;
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn custom_has_no_closed_form() {
        let t = Topology::Custom { graph: star_k1_3() };
        assert!(matches!(optimal_weights(&t), Err(Error::Unsupported(_))));
    }

    #[test]
    fn single_branch_is_flagged() {
        assert!(!optimal_weights(&Topology::SymmetricStar { m: 1, n: 1 }).unwrap().optimality_guaranteed);
        assert!(!optimal_weights(&Topology::KcsStar { m: 2, n: 1, k: 1 }).unwrap().optimality_guaranteed);
        assert!(optimal_weights(&Topology::SymmetricStar { m: 1, n: 2 }).unwrap().optimality_guaranteed);
    }

    #[test]
    fn kcs_far_beyond_boundary_is_flagged() {
        let w = optimal_weights(&Topology::KcsStar { m: 3, n: 2, k: 40 }).unwrap();
        assert!(!w.optimality_guaranteed);
        assert_eq!(w.assignment.stratum(1), Some(2.0 / 82.0));
    }

    #[test]
    fn metropolis_examples() {
        let edge = Graph::new(2, vec![(0, 1)]).unwrap();
        let w = metropolis_weights(&edge).unwrap();
        assert_eq!((w.get(0, 1), w.get(0, 0), w.get(1, 1)), (0.5, 0.5, 0.5));

        let w = metropolis_weights(&star_k1_3()).unwrap();
        assert!(close(w.get(0, 1), 0.25));
        assert!(close(w.get(0, 0), 0.25));
        assert!(close(w.get(1, 1), 0.75));

        let w = Weighting::Metropolis.matrix(&Topology::SymmetricStar { m: 2, n: 3 }).unwrap();
        assert!(close(w.get(0, 1), 0.25));
    }

    #[test]
    fn max_degree_examples() {
        let edge = Graph::new(2, vec![(0, 1)]).unwrap();
        let w = max_degree_weights(&edge).unwrap();
        assert_eq!((w.get(0, 1), w.get(0, 0)), (1.0, 0.0));

        let w = max_degree_weights(&star_k1_3()).unwrap();
        assert!(close(w.get(0, 2), 1.0 / 3.0));
        assert!(close(w.get(0, 0), 0.0));
        assert!(close(w.get(3, 3), 2.0 / 3.0));

        let t = Topology::SymmetricStar { m: 2, n: 3 };
        let g = build(&t).unwrap();
        let w = Weighting::MaxDegree.matrix(&t).unwrap();
        for &(u, v) in g.edges() {
            assert!(close(w.get(u, v), 1.0 / 3.0));
        }
    }

    #[test]
    fn best_constant_examples() {
        let edge = Graph::new(2, vec![(0, 1)]).unwrap();
        assert!(close(best_constant_alpha(&edge).unwrap(), 0.5));
        let tri = Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!((best_constant_alpha(&tri).unwrap() - 1.0 / 3.0).abs() < 1e-12);

        let w = Weighting::BestConstant.matrix(&Topology::SymmetricStar { m: 2, n: 3 }).unwrap();
        assert!(w.max_row_sum_deviation() < 1e-12);
    }

    #[test]
    fn assembled_diagonals() {
        let t = Topology::SymmetricStar { m: 3, n: 5 };
        let w = Weighting::Optimal.matrix(&t).unwrap();
        assert!((w.get(0, 0) + 3.0 / 7.0).abs() < 1e-14);
        assert!(w.has_negative_diagonal());

        let t = Topology::CcsStar { m: 2, n: 5 };
        let w = Weighting::Optimal.matrix(&t).unwrap();
        assert!((w.get(0, 0) + 0.3).abs() < 1e-14);
    }

    #[test]
    fn zero_weights_give_identity() {
        let g = build(&Topology::KcsStar { m: 3, n: 2, k: 2 }).unwrap();
        let w = assemble_matrix(&g, &WeightAssignment::uniform_per_stratum(&g, 0.0)).unwrap();
        assert_eq!(w.as_dense(), &DenseMatrix::identity(g.node_count()));
    }

    #[test]
    fn incomplete_assignment() {
        let g = build(&Topology::SymmetricStar { m: 2, n: 2 }).unwrap();
        let partial = WeightAssignment::PerStratum(BTreeMap::from([(1, 0.5)]));
        assert!(matches!(assemble_matrix(&g, &partial), Err(Error::IncompleteAssignment { .. })));
        let short = WeightAssignment::PerEdge(vec![0.1]);
        assert!(matches!(assemble_matrix(&g, &short), Err(Error::IncompleteAssignment { u: 1, v: 2 })));
    }

    #[test]
    fn rejects_asymmetric_dense() {
        let m = DenseMatrix::from_rows(&[vec![0.5, 0.5], vec![0.4, 0.6]]).unwrap();
        assert!(matches!(WeightMatrix::from_dense(m), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn weights_csv_layout() {
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let w = metropolis_weights(&g).unwrap();
        let mut buf = Vec::new();
        w.write_weights_csv(&g, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(
            s,
            "u,v,weight\n0,1,5.0000000000000000e-1\nnode,self_weight\n0,5.0000000000000000e-1\n1,5.0000000000000000e-1\n"
        );
    }
}
