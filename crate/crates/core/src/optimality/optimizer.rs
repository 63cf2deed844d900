//! Numerical SLEM minimization by subgradient descent.
//!
//! Weights are parametrized per class (edges sharing a label share one
//! weight), so `W = I - Σ_c x_c Σ_{(i,j)∈c} (e_i - e_j)(e_i - e_j)ᵀ` is always
//! symmetric with unit row sums. For a unit eigenvector `u` of the top
//! eigenvalue of `W - 11ᵀ/N`, `-Σ_{(i,j)∈c} (u_i - u_j)²` is a subgradient
//! component; the bottom eigenvalue contributes the mirrored term.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, DenseMatrix};
use crate::topology::Graph;
use crate::weights::{fmt_full, metropolis_weights, WeightAssignment};

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizeConfig {
    /// One label per edge; edges with equal labels share a weight.
    pub classes: Option<Vec<usize>>,
    /// Classes held at a fixed weight.
    pub pinned: BTreeMap<usize, f64>,
    pub max_iters: usize,
    /// `c` in the step rule `c / √t` applied to the normalized subgradient.
    pub step: f64,
    /// Stop once the best value has improved by at most `stall_tol` over
    /// the last `stall_window` iterations.
    pub stall_window: usize,
    pub stall_tol: f64,
    /// Top and bottom branches closer than this are treated as tied.
    pub tie_tol: f64,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig {
            classes: None,
            pinned: BTreeMap::new(),
            max_iters: 5_000,
            step: 0.1,
            stall_window: 500,
            stall_tol: 1e-7,
            tie_tol: 1e-12,
        }
    }
}

impl OptimizeConfig {
    pub fn with_classes(classes: Vec<usize>) -> Self {
        OptimizeConfig { classes: Some(classes), ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizeResult {
    pub weights: WeightAssignment,
    pub class_weights: BTreeMap<usize, f64>,
    pub slem: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Best SLEM seen after each iteration.
    pub history: Vec<f64>,
}

impl OptimizeResult {
    pub fn write_history_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "iteration,best_slem")?;
        for (i, v) in self.history.iter().enumerate() {
            writeln!(out, "{},{}", i + 1, fmt_full(*v))?;
        }
        Ok(())
    }
}

/// Minimizes the SLEM over weights on `graph`, tying weights within each
/// symmetry class when labels are given. Starts from Metropolis weights.
pub fn minimize_slem(graph: &Graph, symmetry_classes: Option<&[usize]>) -> Result<OptimizeResult> {
    let config = OptimizeConfig { classes: symmetry_classes.map(<[usize]>::to_vec), ..Default::default() };
    minimize_slem_with(graph, &config)
}

struct Problem {
    nodes: usize,
    /// Edges of each class.
    members: Vec<Vec<(usize, usize)>>,
    labels: Vec<usize>,
}

impl Problem {
    fn matrix(&self, x: &[f64]) -> DenseMatrix {
        let n = self.nodes;
        let mut w = DenseMatrix::identity(n);
        for (c, edges) in self.members.iter().enumerate() {
            for &(i, j) in edges {
                w.add(i, j, x[c]);
                w.add(j, i, x[c]);
                w.add(i, i, -x[c]);
                w.add(j, j, -x[c]);
            }
        }
        w
    }

    /// SLEM and a subgradient at `x`.
    fn evaluate(&self, x: &[f64], tie_tol: f64) -> Result<(f64, Vec<f64>)> {
        let n = self.nodes;
        let mut m = self.matrix(x);
        let j = 1.0 / n as f64;
        for r in 0..n {
            for c in 0..n {
                m.add(r, c, -j);
            }
        }
        let (values, vectors) = symmetric_eigen(&m)?;
        let top = values[0];
        let bottom = values[n - 1];
        let spread = |col: usize, sign: f64| -> Vec<f64> {
            self.members
                .iter()
                .map(|edges| {
                    sign * edges.iter().map(|&(i, j)| (vectors.get(i, col) - vectors.get(j, col)).powi(2)).sum::<f64>()
                })
                .collect()
        };
        let f = top.max(-bottom);
        let g = if (top + bottom).abs() <= tie_tol {
            spread(0, -1.0).iter().zip(spread(n - 1, 1.0)).map(|(a, b)| 0.5 * (a + b)).collect()
        } else if top > -bottom {
            spread(0, -1.0)
        } else {
            spread(n - 1, 1.0)
        };
        Ok((f, g))
    }
}

pub fn minimize_slem_with(graph: &Graph, config: &OptimizeConfig) -> Result<OptimizeResult> {
    graph.require_connected()?;
    let labels: Vec<usize> = match &config.classes {
        Some(c) if c.len() != graph.edge_count() => {
            return Err(Error::DimensionMismatch { expected: graph.edge_count(), found: c.len() })
        }
        Some(c) => c.clone(),
        None => (0..graph.edge_count()).collect(),
    };
    let mut distinct: Vec<usize> = labels.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let index: BTreeMap<usize, usize> = distinct.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let mut members = vec![Vec::new(); distinct.len()];
    for (e, &l) in graph.edges().iter().zip(&labels) {
        members[index[&l]].push(*e);
    }
    for l in config.pinned.keys() {
        if !index.contains_key(l) {
            return Err(Error::ParameterBounds(format!("pinned class {l} does not exist")));
        }
    }
    let problem = Problem { nodes: graph.node_count(), members, labels: distinct };

    let metro = metropolis_weights(graph)?;
    let mut x: Vec<f64> = problem
        .members
        .iter()
        .map(|edges| edges.iter().map(|&(i, j)| metro.get(i, j)).sum::<f64>() / edges.len() as f64)
        .collect();
    let free: Vec<bool> = problem.labels.iter().map(|l| !config.pinned.contains_key(l)).collect();
    for (c, l) in problem.labels.iter().enumerate() {
        if let Some(&v) = config.pinned.get(l) {
            x[c] = v;
        }
    }

    let mut best = f64::INFINITY;
    let mut best_x = x.clone();
    let mut history = Vec::with_capacity(config.max_iters);
    let mut converged = false;
    for t in 1..=config.max_iters {
        let (f, mut g) = problem.evaluate(&x, config.tie_tol)?;
        if f < best {
            best = f;
            best_x.clone_from(&x);
        }
        history.push(best);
        if t > config.stall_window && history[t - 1 - config.stall_window] - best <= config.stall_tol {
            converged = true;
            break;
        }
        for (gc, &fr) in g.iter_mut().zip(&free) {
            if !fr {
                *gc = 0.0;
            }
        }
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            converged = true;
            break;
        }
        let h = config.step / (t as f64).sqrt() / norm;
        for (xc, gc) in x.iter_mut().zip(&g) {
            *xc -= h * gc;
        }
    }

    let class_weights: BTreeMap<usize, f64> = problem.labels.iter().copied().zip(best_x.iter().copied()).collect();
    let per_edge = labels.iter().map(|l| class_weights[l]).collect();
    Ok(OptimizeResult {
        weights: WeightAssignment::PerEdge(per_edge),
        class_weights,
        slem: best,
        iterations: history.len(),
        converged,
        history,
    })
}
