//! Independent checks of the closed forms: dual-certificate residuals, a
//! numerical SLEM minimizer and the branch-invariance of central weights.

pub mod invariance;
pub mod optimizer;
pub mod slackness;

use std::io::Write;
use std::ops::RangeInclusive;

use serde::Serialize;

pub use invariance::{central_weight_invariance, pinned_central_check, Branch, Core, InvarianceReport};
pub use optimizer::{minimize_slem, minimize_slem_with, OptimizeConfig, OptimizeResult};
pub use slackness::{slackness_residuals, SlacknessReport, SlacknessResiduals};

use crate::error::{Error, Result};
use crate::spectral::{k_max, slem, slem_closed_form};
use crate::topology::{build, Topology};
use crate::weights::Weighting;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveMethod {
    ClosedForm,
    Optimizer,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub k: usize,
    pub slem: f64,
    pub method: CurveMethod,
    /// SLEM actually achieved by the closed-form weights at this `k`.
    pub closed_form_weights_slem: f64,
}

/// Optimal SLEM of the k-cored star with `n` tails of `m` nodes as a
/// function of `k`: closed form up to `k_max`, numerical beyond.
pub fn kcs_slem_curve(m: usize, n: usize, ks: RangeInclusive<usize>) -> Result<Vec<CurvePoint>> {
    let kmax = k_max(m, n)?;
    if *ks.start() < 1 || *ks.end() > 3 * kmax {
        return Err(Error::ParameterBounds(format!("k range must lie within [1, {}] for m={m}, n={n}", 3 * kmax)));
    }
    ks.map(|k| {
        let t = Topology::KcsStar { m, n, k };
        let achieved = slem(&Weighting::Optimal.matrix(&t)?)?;
        if k <= kmax {
            Ok(CurvePoint {
                k,
                slem: slem_closed_form(&t)?.slem,
                method: CurveMethod::ClosedForm,
                closed_form_weights_slem: achieved,
            })
        } else {
            let g = build(&t)?;
            let r = minimize_slem(&g, g.strata())?;
            Ok(CurvePoint { k, slem: r.slem, method: CurveMethod::Optimizer, closed_form_weights_slem: achieved })
        }
    })
    .collect()
}

/// Index of the smallest SLEM on a curve (first one on ties).
pub fn curve_argmin(curve: &[CurvePoint]) -> Option<usize> {
    curve.iter().min_by(|a, b| a.slem.total_cmp(&b.slem)).map(|p| p.k)
}

pub fn write_curve_csv<W: Write>(curve: &[CurvePoint], mut out: W) -> Result<()> {
    use crate::weights::fmt_full;
    writeln!(out, "k,slem,method,closed_form_weights_slem")?;
    for p in curve {
        let method = match p.method {
            CurveMethod::ClosedForm => "closed-form",
            CurveMethod::Optimizer => "optimizer",
        };
        writeln!(out, "{},{},{},{}", p.k, fmt_full(p.slem), method, fmt_full(p.closed_form_weights_slem))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::theta_root_symmetric;

    #[test]
    fn curve_starts_at_symmetric_star() {
        let c = kcs_slem_curve(2, 3, 1..=3).unwrap();
        let sym = theta_root_symmetric(2, 3).unwrap().cos();
        assert!((c[0].slem - sym).abs() < 1e-10);
        assert!(c.windows(2).all(|w| w[1].slem <= w[0].slem));
    }

    #[test]
    fn range_checked() {
        assert!(kcs_slem_curve(3, 2, 0..=3).is_err());
        assert!(kcs_slem_curve(3, 2, 1..=46).is_err());
    }
}
