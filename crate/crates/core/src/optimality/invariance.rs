//! Central weights of stars whose path tails are replaced by other graphs.
//!
//! Branches hang either off a single centre node or off a complete core
//! (the attachment nodes themselves form the core). The closed forms for
//! paths, `2/(n+2)` for centre edges and `1/n` for core edges, are compared
//! with the numerically optimal weights of the composite graph.

use std::collections::BTreeMap;

use serde::Serialize;

use super::optimizer::{minimize_slem_with, OptimizeConfig};
use crate::error::{Error, Result};
use crate::topology::Graph;

/// A connected graph together with the node that joins the centre.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub name: String,
    pub graph: Graph,
    pub attach: usize,
}

impl Branch {
    pub fn new(name: impl Into<String>, graph: Graph, attach: usize) -> Result<Self> {
        graph.require_connected()?;
        if attach >= graph.node_count() {
            return Err(Error::ParameterBounds(format!("attachment node {attach} out of range")));
        }
        Ok(Branch { name: name.into(), graph, attach })
    }

    /// Path of `len` nodes attached at one end.
    pub fn path(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::ParameterBounds("path branch needs at least one node".into()));
        }
        let edges = (1..len).map(|i| (i - 1, i)).collect();
        Branch::new(format!("path{len}"), Graph::new(len, edges)?, 0)
    }

    pub fn triangle() -> Result<Self> {
        Branch::new("triangle", Graph::new(3, vec![(0, 1), (0, 2), (1, 2)])?, 0)
    }

    /// Star with three leaves attached at its centre.
    pub fn claw() -> Result<Self> {
        Branch::new("claw", Graph::new(4, vec![(0, 1), (0, 2), (0, 3)])?, 0)
    }

    /// Star with three leaves attached at a leaf.
    pub fn claw_by_leaf() -> Result<Self> {
        Branch::new("claw-leaf", Graph::new(4, vec![(0, 1), (1, 2), (1, 3)])?, 0)
    }

    pub fn complete(k: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                edges.push((a, b));
            }
        }
        Branch::new(format!("complete{k}"), Graph::new(k, edges)?, 0)
    }

    /// Path of `len` nodes whose far end carries a triangle.
    pub fn lollipop(len: usize) -> Result<Self> {
        let mut edges: Vec<(usize, usize)> = (1..len).map(|i| (i - 1, i)).collect();
        let tip = len - 1;
        edges.extend([(tip, len), (tip, len + 1), (len, len + 1)]);
        Branch::new(format!("lollipop{len}"), Graph::new(len + 2, edges)?, 0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Core {
    /// One extra node joined to every attachment node.
    Centre,
    /// Attachment nodes joined pairwise.
    Complete,
}

impl Core {
    pub fn closed_form(self, branches: usize) -> f64 {
        let n = branches as f64;
        match self {
            Core::Centre => 2.0 / (n + 2.0),
            Core::Complete => 1.0 / n,
        }
    }
}

/// Composite graph with edge classes: central edges of a given pair of
/// branch kinds share a class, and so do corresponding edges of identical
/// branches.
#[derive(Clone, Debug, PartialEq)]
pub struct Composite {
    pub graph: Graph,
    pub classes: Vec<usize>,
    /// Classes of the centre or core edges.
    pub central_classes: Vec<usize>,
}

pub fn compose(core: Core, branches: &[Branch]) -> Result<Composite> {
    if branches.len() < 2 {
        return Err(Error::ParameterBounds("need at least two branches".into()));
    }
    // Kind of a branch: index of the first identical branch.
    let kinds: Vec<usize> = branches
        .iter()
        .map(|b| branches.iter().position(|o| o.graph == b.graph && o.attach == b.attach).unwrap())
        .collect();

    let mut class_of: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
    let mut class = |key: (usize, usize, usize)| {
        let next = class_of.len();
        *class_of.entry(key).or_insert(next)
    };
    const CENTRAL: usize = usize::MAX;

    let offset = usize::from(core == Core::Centre);
    let mut starts = Vec::with_capacity(branches.len());
    let mut total = offset;
    for b in branches {
        starts.push(total);
        total += b.graph.node_count();
    }

    let mut edges = Vec::new();
    let mut classes = Vec::new();
    let mut central = Vec::new();
    match core {
        Core::Centre => {
            for (i, b) in branches.iter().enumerate() {
                edges.push((0, starts[i] + b.attach));
                let c = class((CENTRAL, kinds[i], kinds[i]));
                classes.push(c);
                central.push(c);
            }
        }
        Core::Complete => {
            for i in 0..branches.len() {
                for j in i + 1..branches.len() {
                    edges.push((starts[i] + branches[i].attach, starts[j] + branches[j].attach));
                    let (lo, hi) = (kinds[i].min(kinds[j]), kinds[i].max(kinds[j]));
                    let c = class((CENTRAL, lo, hi));
                    classes.push(c);
                    central.push(c);
                }
            }
        }
    }
    for (i, b) in branches.iter().enumerate() {
        for (e, &(u, v)) in b.graph.edges().iter().enumerate() {
            edges.push((starts[i] + u, starts[i] + v));
            classes.push(class((kinds[i], e, 0)));
        }
    }
    central.sort_unstable();
    central.dedup();
    Ok(Composite { graph: Graph::new(total, edges)?, classes, central_classes: central })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub core: Core,
    pub branches: Vec<String>,
    pub expected: f64,
    /// Optimal weight of each central edge class.
    pub recovered: Vec<f64>,
    pub max_deviation: f64,
    pub slem: f64,
    pub converged: bool,
}

impl InvarianceReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.max_deviation <= tol
    }
}

/// Optimizes the composite graph and compares its central weights with the
/// path closed form.
pub fn central_weight_invariance(core: Core, branches: &[Branch]) -> Result<InvarianceReport> {
    let comp = compose(core, branches)?;
    let res = minimize_slem_with(&comp.graph, &OptimizeConfig::with_classes(comp.classes.clone()))?;
    let expected = core.closed_form(branches.len());
    let recovered: Vec<f64> = comp.central_classes.iter().map(|c| res.class_weights[c]).collect();
    let max_deviation = recovered.iter().map(|w| (w - expected).abs()).fold(0.0, f64::max);
    Ok(InvarianceReport {
        core,
        branches: branches.iter().map(|b| b.name.clone()).collect(),
        expected,
        recovered,
        max_deviation,
        slem: res.slem,
        converged: res.converged,
    })
}

/// Whether holding every central class at the closed form still reaches
/// the freely optimized SLEM.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PinnedCentralCheck {
    pub core: Core,
    pub branches: Vec<String>,
    pub pinned_weight: f64,
    pub free_slem: f64,
    pub pinned_slem: f64,
    /// `pinned_slem - free_slem`.
    pub gap: f64,
}

impl PinnedCentralCheck {
    pub fn passed(&self, tol: f64) -> bool {
        self.gap <= tol
    }
}

pub fn pinned_central_check(core: Core, branches: &[Branch]) -> Result<PinnedCentralCheck> {
    let comp = compose(core, branches)?;
    let free = minimize_slem_with(&comp.graph, &OptimizeConfig::with_classes(comp.classes.clone()))?;
    let w = core.closed_form(branches.len());
    let pinned_cfg = OptimizeConfig {
        classes: Some(comp.classes.clone()),
        pinned: comp.central_classes.iter().map(|&c| (c, w)).collect(),
        ..Default::default()
    };
    let pinned = minimize_slem_with(&comp.graph, &pinned_cfg)?;
    Ok(PinnedCentralCheck {
        core,
        branches: branches.iter().map(|b| b.name.clone()).collect(),
        pinned_weight: w,
        free_slem: free.slem,
        pinned_slem: pinned.slem,
        gap: pinned.slem - free.slem,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{build, Topology};

    #[test]
    fn paths_on_centre_is_symmetric_star() {
        let b = vec![Branch::path(2).unwrap(); 3];
        let c = compose(Core::Centre, &b).unwrap();
        let s = build(&Topology::SymmetricStar { m: 2, n: 3 }).unwrap();
        assert_eq!(c.graph.node_count(), s.node_count());
        assert_eq!(c.graph.edge_count(), s.edge_count());
        assert_eq!(c.central_classes.len(), 1);
        let r = central_weight_invariance(Core::Centre, &b).unwrap();
        assert!(r.passed(1e-2), "{r:?}");
    }

    #[test]
    fn paths_on_complete_core_is_ccs() {
        let b = vec![Branch::path(3).unwrap(); 4];
        let c = compose(Core::Complete, &b).unwrap();
        let s = build(&Topology::CcsStar { m: 2, n: 4 }).unwrap();
        assert_eq!(c.graph.node_count(), s.node_count());
        assert_eq!(c.graph.edge_count(), s.edge_count());
    }

    #[test]
    fn mixed_kinds_get_separate_classes() {
        let b = vec![Branch::path(2).unwrap(), Branch::triangle().unwrap(), Branch::path(2).unwrap()];
        let c = compose(Core::Complete, &b).unwrap();
        // path-path, path-triangle
        assert_eq!(c.central_classes.len(), 2);
    }

    #[test]
    fn branch_validation() {
        let g = Graph::new(3, vec![(0, 1)]).unwrap();
        assert!(Branch::new("x", g, 0).is_err());
        assert!(Branch::new("y", Graph::new(2, vec![(0, 1)]).unwrap(), 5).is_err());
    }
}
