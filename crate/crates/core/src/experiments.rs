//! Reference tables and figures assembled from the library.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::optimality::{kcs_slem_curve, CurvePoint};
use crate::reference::{self, QuantizedCell, QuantizedTable, K_MAX_BRANCHES, K_MAX_TAIL_NODES};
use crate::simulate::{
    monte_carlo, sample_initial, trajectory, trial_rng, QuantizerSpec, Scheme, Trajectory, TrialStats,
};
use crate::spectral::{k_max, slem, slem_closed_form};
use crate::topology::Topology;
use crate::weights::{fmt_full, Weighting};

/// `k_max` over the published grid: `rows[r][c]` for `r + 2` branches and
/// tails of `c + 1` nodes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KMaxTable {
    pub rows: Vec<Vec<usize>>,
}

impl KMaxTable {
    pub fn mismatches(&self) -> Vec<(usize, usize, usize, usize)> {
        let mut out = Vec::new();
        for (r, n) in K_MAX_BRANCHES.enumerate() {
            for (c, m) in K_MAX_TAIL_NODES.enumerate() {
                let want = reference::K_MAX_GRID[r][c];
                if self.rows[r][c] != want {
                    out.push((m, n, self.rows[r][c], want));
                }
            }
        }
        out
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let cols: Vec<String> = K_MAX_TAIL_NODES.map(|m| format!("m={m}")).collect();
        writeln!(out, "n,{}", cols.join(","))?;
        for (n, row) in K_MAX_BRANCHES.zip(&self.rows) {
            let vals: Vec<String> = row.iter().map(usize::to_string).collect();
            writeln!(out, "{n},{}", vals.join(","))?;
        }
        Ok(())
    }
}

pub fn k_max_table() -> Result<KMaxTable> {
    let rows = K_MAX_BRANCHES
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&n| K_MAX_TAIL_NODES.map(|m| k_max(m, n)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(KMaxTable { rows })
}

/// One family of the SLEM comparison, by closed form and by eigensolve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlemComparisonRow {
    pub n: usize,
    pub family: &'static str,
    pub topology: Topology,
    pub closed_form: f64,
    pub eigen: f64,
    pub reference: f64,
}

pub fn slem_comparison() -> Result<Vec<SlemComparisonRow>> {
    let mut rows = Vec::new();
    for &(n, sym, ccs, kcs) in &reference::SLEM_COMPARISON {
        for (family, topology, reference) in [
            ("symmetric-star", Topology::SymmetricStar { m: 3, n }, sym),
            ("ccs-star", Topology::CcsStar { m: 2, n }, ccs),
            ("kcs-star", Topology::KcsStar { m: 3, n, k: 2 }, kcs),
        ] {
            let closed_form = slem_closed_form(&topology)?.slem;
            let eigen = slem(&Weighting::Optimal.matrix(&topology)?)?;
            rows.push(SlemComparisonRow { n, family, topology, closed_form, eigen, reference });
        }
    }
    Ok(rows)
}

pub fn write_slem_comparison_csv<W: Write>(rows: &[SlemComparisonRow], mut out: W) -> Result<()> {
    writeln!(out, "n,family,closed_form,eigen,reference,delta")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n,
            r.family,
            fmt_full(r.closed_form),
            fmt_full(r.eigen),
            r.reference,
            fmt_full(r.closed_form - r.reference)
        )?;
    }
    Ok(())
}

/// Which quantized-consensus table to reproduce.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum QuantizedSetup {
    Symmetric,
    Ccs,
    Kcs,
}

impl QuantizedSetup {
    pub fn from_table_id(id: u32) -> Result<Self> {
        match id {
            3 => Ok(QuantizedSetup::Symmetric),
            4 => Ok(QuantizedSetup::Ccs),
            5 => Ok(QuantizedSetup::Kcs),
            _ => Err(Error::ParameterBounds(format!("no quantized table {id}"))),
        }
    }

    pub fn topology(self) -> Topology {
        match self {
            QuantizedSetup::Symmetric => Topology::SymmetricStar { m: 2, n: 3 },
            QuantizedSetup::Ccs => Topology::CcsStar { m: 2, n: 3 },
            QuantizedSetup::Kcs => Topology::KcsStar { m: 2, n: 3, k: 2 },
        }
    }

    pub fn reference(self) -> &'static QuantizedTable {
        match self {
            QuantizedSetup::Symmetric => &reference::QUANTIZED_SYMMETRIC,
            QuantizedSetup::Ccs => &reference::QUANTIZED_CCS,
            QuantizedSetup::Kcs => &reference::QUANTIZED_KCS,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuantizedRow {
    pub bits: u32,
    pub weighting: Weighting,
    pub stats: TrialStats,
    #[serde(skip)]
    pub reference: Option<QuantizedCell>,
}

/// Probabilistic-quantization statistics for each requested `(bits,
/// weighting)` cell, in the given order.
pub fn quantized_table(
    setup: QuantizedSetup,
    bits: &[u32],
    weightings: &[Weighting],
    trials: usize,
    seed: u64,
    max_iters: usize,
) -> Result<Vec<QuantizedRow>> {
    let topology = setup.topology();
    let mut rows = Vec::new();
    for &b in bits {
        let spec = QuantizerSpec::new(b, Scheme::Probabilistic)?;
        for &w in weightings {
            let stats = monte_carlo(&topology, w, &spec, trials, seed, max_iters)?;
            rows.push(QuantizedRow {
                bits: b,
                weighting: w,
                stats,
                reference: reference::quantized_cell(setup.reference(), b, w),
            });
        }
    }
    Ok(rows)
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_full).unwrap_or_default()
}

pub fn write_quantized_csv<W: Write>(rows: &[QuantizedRow], mut out: W) -> Result<()> {
    writeln!(
        out,
        "bits,weighting,psi,eta,mu,rho,ref_psi,ref_eta,ref_mu,ref_rho,delta_psi,delta_eta,delta_mu,delta_rho"
    )?;
    for r in rows {
        let s = &r.stats;
        let (refs, deltas) = match r.reference {
            Some(c) => {
                let d = |x: Option<f64>, y: f64| opt(x.map(|x| x - y));
                (
                    format!("{},{},{},{}", c.psi, c.eta, c.mu, c.rho),
                    format!("{},{},{},{}", fmt_full(s.psi - c.psi), d(s.eta, c.eta), d(s.mu, c.mu), d(s.rho, c.rho)),
                )
            }
            None => (",,,".to_string(), ",,,".to_string()),
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.bits,
            r.weighting,
            fmt_full(s.psi),
            opt(s.eta),
            opt(s.mu),
            opt(s.rho),
            refs,
            deltas
        )?;
    }
    Ok(())
}

/// Tail nodes and branch count of the k-cored curve.
pub const CURVE_TAIL_NODES: usize = 3;
pub const CURVE_BRANCHES: usize = 2;

/// Optimal SLEM of the k-cored star versus the number of centres.
pub fn kcs_curve(k_end: usize) -> Result<Vec<CurvePoint>> {
    kcs_slem_curve(CURVE_TAIL_NODES, CURVE_BRANCHES, 1..=k_end)
}

pub fn kcs_curve_k_max() -> Result<usize> {
    k_max(CURVE_TAIL_NODES, CURVE_BRANCHES)
}

/// Uniform and probabilistic 6-bit runs from the same initial states on the
/// optimally weighted symmetric star with `n = 3`, `m = 2`.
pub fn quantized_trajectories(seed: u64, steps: usize) -> Result<(Trajectory, Trajectory)> {
    let w = Weighting::Optimal.matrix(&Topology::SymmetricStar { m: 2, n: 3 })?;
    let x0 = sample_initial(w.order(), &mut trial_rng(seed, 0));
    let uniform = trajectory(&w, &x0, &QuantizerSpec::new(6, Scheme::Uniform)?, steps, &mut trial_rng(seed, 1))?;
    let prob = trajectory(&w, &x0, &QuantizerSpec::new(6, Scheme::Probabilistic)?, steps, &mut trial_rng(seed, 2))?;
    Ok((uniform, prob))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparison_matches_reference() {
        let rows = slem_comparison().unwrap();
        assert_eq!(rows.len(), 6);
        for r in &rows {
            assert!((r.closed_form - r.reference).abs() < 1e-5, "{r:?}");
            assert!((r.closed_form - r.eigen).abs() < 1e-8, "{r:?}");
        }
    }

    #[test]
    fn quantized_rows_in_order() {
        let rows =
            quantized_table(QuantizedSetup::Kcs, &[4], &[Weighting::Optimal, Weighting::Metropolis], 20, 1, 10_000)
                .unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].weighting, Weighting::Optimal);
        assert_eq!(rows[0].reference.unwrap().eta, 24.58);
        let mut buf = Vec::new();
        write_quantized_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert_eq!(text.lines().nth(1).unwrap().split(',').count(), 14);
    }

    #[test]
    fn setups() {
        assert!(QuantizedSetup::from_table_id(2).is_err());
        assert_eq!(QuantizedSetup::from_table_id(4).unwrap(), QuantizedSetup::Ccs);
    }

    #[test]
    fn trajectories_share_initial_draw() {
        let (u, p) = quantized_trajectories(7, 300).unwrap();
        assert_eq!(u.states[0].len(), p.states[0].len());
        assert!(p.consensus_at.is_some());
    }
}
