//! Dual-certificate check for the symmetric-star closed form.
//!
//! With `s = cos θ`, `W1 = I - Σ w_i α_i α_iᵀ` and `W0 = I - Σ w_i β_i β_iᵀ`,
//! the optimal dual variable is built from `z1 = Σ a_i α_i` and
//! `z2 = Σ b_i β_i` where
//!
//! ```text
//! a_i = sin((m-i+1)θ) / sin θ,   b_i = sin((m-i+1)(π-θ)) / sin(π-θ).
//! ```
//!
//! The checker evaluates the coordinate recursions both as printed
//! coefficient formulas and as the eigenvector equations
//! `(sI - W1) z1 = 0`, `(sI + W0) z2 = 0`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{char_symmetric, stratify, theta_root_symmetric};
use crate::topology::Topology;
use crate::weights::WeightAssignment;

/// Largest absolute violation of each optimality condition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct SlacknessResiduals {
    /// `(α_iᵀ z1)² = (β_iᵀ z2)²`, with `z2` scaled so that the `i = m` term matches.
    pub dual_constraint: f64,
    /// `(a_i/a_j)² = (b_i/b_j)²` over all pairs.
    pub coordinate_ratio: f64,
    /// `(1-s) a_1 = w_1 (a_1 - a_2)`.
    pub a_first: f64,
    /// `(1-s) a_i = w_i (-a_{i-1} + 2a_i - a_{i+1})`, `1 < i < m`.
    pub a_interior: f64,
    /// `(1-s) a_m = w_m (-a_{m-1} + 2a_m)`.
    pub a_last: f64,
    /// `(1+s) b_1 = w_1 ((n+1) b_1 - b_2)`.
    pub b_first: f64,
    pub b_interior: f64,
    /// `(1+s) b_m = w_m (-b_{m-1} + 2b_m)`.
    pub b_last: f64,
    /// `‖(sI - W1) z1‖∞`.
    pub w1_eigenvector: f64,
    /// `‖(sI + W0) z2‖∞`.
    pub w0_eigenvector: f64,
    /// Characteristic function at θ.
    pub characteristic: f64,
}

impl SlacknessResiduals {
    pub fn max(&self) -> f64 {
        self.named().iter().map(|&(_, v)| v).fold(0.0, f64::max)
    }

    pub fn named(&self) -> [(&'static str, f64); 11] {
        [
            ("dual_constraint", self.dual_constraint),
            ("coordinate_ratio", self.coordinate_ratio),
            ("a_first", self.a_first),
            ("a_interior", self.a_interior),
            ("a_last", self.a_last),
            ("b_first", self.b_first),
            ("b_interior", self.b_interior),
            ("b_last", self.b_last),
            ("w1_eigenvector", self.w1_eigenvector),
            ("w0_eigenvector", self.w0_eigenvector),
            ("characteristic", self.characteristic),
        ]
    }
}

/// The last-row recursions read with coefficient 1 on the final coordinate,
/// i.e. from the diagonal entry `1 - w_m` of `W1` alone. Not an optimality
/// condition; kept to show that the coefficient 2 is the consistent one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UnitLastCoefficient {
    pub a_last: f64,
    pub b_last: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlacknessReport {
    pub m: usize,
    pub n: usize,
    pub theta: f64,
    pub s: f64,
    pub weights: Vec<f64>,
    pub a_coords: Vec<f64>,
    pub b_coords: Vec<f64>,
    pub residuals: SlacknessResiduals,
    /// Present when `m >= 2`.
    pub unit_last_coefficient: Option<UnitLastCoefficient>,
}

impl SlacknessReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.residuals.max() <= tol
    }
}

/// Residuals of every optimality condition at the closed-form solution,
/// normalized to `a_m = b_m = 1`.
pub fn slackness_residuals(m: usize, n: usize) -> Result<SlacknessReport> {
    let theta = theta_root_symmetric(m, n)?;
    if theta.sin().abs() < 1e-12 {
        return Err(Error::Numerical(format!("degenerate root θ = {theta}")));
    }
    let a = (1..=m).map(|i| ((m - i + 1) as f64 * theta).sin() / theta.sin()).collect();
    let b = (1..=m).map(|i| ((m - i + 1) as f64 * (PI - theta)).sin() / (PI - theta).sin()).collect();
    evaluate(m, n, theta, a, b)
}

/// Residuals for arbitrary coordinates at a given θ, with the closed-form
/// weights. The conditions are homogeneous in `a` and in `b`.
pub fn evaluate(m: usize, n: usize, theta: f64, a: Vec<f64>, b: Vec<f64>) -> Result<SlacknessReport> {
    if a.len() != m || b.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: a.len().min(b.len()) });
    }
    let s = theta.cos();
    let nf = n as f64;
    let mut w = vec![0.5; m];
    w[0] = 2.0 / (nf + 2.0);

    let at = |v: &[f64], i: isize| if i < 0 || i as usize >= m { 0.0 } else { v[i as usize] };
    let mut r = SlacknessResiduals { characteristic: char_symmetric(m, n, theta).abs(), ..Default::default() };

    r.a_first = ((1.0 - s) * a[0] - w[0] * (a[0] - at(&a, 1))).abs();
    r.b_first = ((1.0 + s) * b[0] - w[0] * ((nf + 1.0) * b[0] - at(&b, 1))).abs();
    for i in 1..m.saturating_sub(1) {
        let ii = i as isize;
        let ga = -at(&a, ii - 1) + 2.0 * a[i] - at(&a, ii + 1);
        let gb = -at(&b, ii - 1) + 2.0 * b[i] - at(&b, ii + 1);
        r.a_interior = r.a_interior.max(((1.0 - s) * a[i] - w[i] * ga).abs());
        r.b_interior = r.b_interior.max(((1.0 + s) * b[i] - w[i] * gb).abs());
    }
    let mut unit = None;
    if m >= 2 {
        let l = m - 1;
        r.a_last = ((1.0 - s) * a[l] - w[l] * (-a[l - 1] + 2.0 * a[l])).abs();
        r.b_last = ((1.0 + s) * b[l] - w[l] * (-b[l - 1] + 2.0 * b[l])).abs();
        unit = Some(UnitLastCoefficient {
            a_last: ((1.0 - s) * a[l] - w[l] * (-a[l - 1] + a[l])).abs(),
            b_last: ((1.0 + s) * b[l] - w[l] * (-b[l - 1] + b[l])).abs(),
        });
    }

    // a_i² b_j² = b_i² a_j² is the cross-multiplied ratio condition.
    for i in 0..m {
        for j in 0..m {
            let den = a[j] * a[j] * b[j] * b[j];
            if den > 1e-24 {
                let v = ((a[i] * b[j]).powi(2) - (b[i] * a[j]).powi(2)).abs() / den;
                r.coordinate_ratio = r.coordinate_ratio.max(v);
            }
        }
    }

    // Basis vectors and the assembled blocks.
    let alpha = |i: usize| -> Vec<f64> {
        let mut v = vec![0.0; m];
        if i == 0 {
            v[0] = -1.0;
        } else {
            v[i - 1] = 1.0;
            v[i] = -1.0;
        }
        v
    };
    let beta = |i: usize| -> Vec<f64> {
        let mut v = vec![0.0; m + 1];
        v[i] = if i == 0 { nf.sqrt() } else { 1.0 };
        v[i + 1] = -1.0;
        v
    };
    let mut z1 = vec![0.0; m];
    let mut z2 = vec![0.0; m + 1];
    for i in 0..m {
        for (z, x) in z1.iter_mut().zip(alpha(i)) {
            *z += a[i] * x;
        }
        for (z, x) in z2.iter_mut().zip(beta(i)) {
            *z += b[i] * x;
        }
    }
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>();
    let pa: Vec<f64> = (0..m).map(|i| dot(&alpha(i), &z1)).collect();
    let pb: Vec<f64> = (0..m).map(|i| dot(&beta(i), &z2)).collect();
    let kappa = if pb[m - 1] != 0.0 { (pa[m - 1] / pb[m - 1]).abs() } else { 1.0 };
    for i in 0..m {
        let v = (pa[i] * pa[i] - (kappa * pb[i]).powi(2)).abs();
        r.dual_constraint = r.dual_constraint.max(v);
    }

    let topology = Topology::SymmetricStar { m, n };
    let assignment = WeightAssignment::PerStratum((1..=m).map(|i| (i, w[i - 1])).collect());
    let blocks = stratify(&topology, &assignment)?;
    let w1z = blocks.w1_block.mul_vec(&z1)?;
    let w0z = blocks.w0_block.mul_vec(&z2)?;
    r.w1_eigenvector = z1.iter().zip(&w1z).map(|(z, wz)| (s * z - wz).abs()).fold(0.0, f64::max);
    r.w0_eigenvector = z2.iter().zip(&w0z).map(|(z, wz)| (s * z + wz).abs()).fold(0.0, f64::max);

    Ok(SlacknessReport {
        m,
        n,
        theta,
        s,
        weights: w,
        a_coords: a,
        b_coords: b,
        residuals: r,
        unit_last_coefficient: unit,
    })
}
