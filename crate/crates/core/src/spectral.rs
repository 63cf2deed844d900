//! Spectra, SLEM, the two-block reduction of the symmetric star and the
//! characteristic equations whose smallest roots give the closed-form SLEM.

use std::f64::consts::PI;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{jacobi_eigen, sort_decreasing, tridiagonal_eigen, DenseMatrix};
use crate::topology::Topology;
use crate::weights::{assemble_matrix, fmt_full, WeightAssignment, WeightMatrix};

/// Symmetry tolerance accepted by [`eig_symmetric`].
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Row-sum tolerance accepted by [`slem`].
pub const SLEM_STOCHASTIC_TOL: f64 = 1e-9;
/// Grid used to bracket the first root on `(0, π)`.
pub const ROOT_SCAN_STEPS: usize = 10_000;
/// Bracket width at which bisection stops.
pub const ROOT_TOL: f64 = 1e-12;
/// Slack in the discarded-eigenvalue comparison for k-cored stars.
pub const KCS_BOUNDARY_TOL: f64 = 1e-9;

/// Eigenvalues in decreasing order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    pub fn from_values(mut values: Vec<f64>) -> Self {
        sort_decreasing(&mut values);
        Spectrum { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn largest(&self) -> f64 {
        self.values[0]
    }

    pub fn smallest(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Largest elementwise difference to another spectrum of equal length.
    pub fn max_abs_diff(&self, other: &Spectrum) -> f64 {
        if self.len() != other.len() {
            return f64::INFINITY;
        }
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// One eigenvalue per line after an `eigenvalue` header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "eigenvalue")?;
        for v in &self.values {
            writeln!(out, "{}", fmt_full(*v))?;
        }
        Ok(())
    }
}

/// All eigenvalues of a symmetric matrix, decreasing.
///
/// Tridiagonal input goes through implicit QL; anything else through cyclic
/// Jacobi.
pub fn eig_symmetric(matrix: &DenseMatrix) -> Result<Spectrum> {
    let asym = matrix.max_asymmetry();
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric(asym));
    }
    if matrix.order() == 0 {
        return Ok(Spectrum { values: Vec::new() });
    }
    let values = match matrix.tridiagonal_parts() {
        Some((d, e)) => tridiagonal_eigen(&d, &e)?,
        None => jacobi_eigen(matrix, false)?.0,
    };
    Ok(Spectrum { values })
}

/// Second largest eigenvalue modulus `max(λ_2, -λ_N)`.
pub fn slem(w: &WeightMatrix) -> Result<f64> {
    slem_dense(w.as_dense())
}

/// [`slem`] for a raw matrix; rejects rows that do not sum to one.
pub fn slem_dense(m: &DenseMatrix) -> Result<f64> {
    let dev = (0..m.order()).map(|i| (m.row(i).iter().sum::<f64>() - 1.0).abs()).fold(0.0, f64::max);
    if dev > SLEM_STOCHASTIC_TOL {
        return Err(Error::NotStochastic(dev));
    }
    let s = eig_symmetric(m)?;
    Ok(slem_of_spectrum(&s))
}

pub fn slem_of_spectrum(s: &Spectrum) -> f64 {
    match s.len() {
        0 | 1 => 0.0,
        _ => s.values[1].max(-s.smallest()),
    }
}

/// The symmetric-star weight matrix in the branch-Fourier basis: one block
/// `W0` of order `m + 1` and `n - 1` copies of `W1` of order `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct StratifiedBlocks {
    pub w0_block: DenseMatrix,
    pub w1_block: DenseMatrix,
    pub w1_multiplicity: usize,
    /// Spectrum of the assembled full matrix, for the union check.
    pub full_spectrum: Spectrum,
}

impl StratifiedBlocks {
    pub fn w0_spectrum(&self) -> Result<Spectrum> {
        eig_symmetric(&self.w0_block)
    }

    pub fn w1_spectrum(&self) -> Result<Spectrum> {
        eig_symmetric(&self.w1_block)
    }

    /// `spec(W0) ∪ (n-1) × spec(W1)`, decreasing.
    pub fn union_spectrum(&self) -> Result<Spectrum> {
        let mut v = self.w0_spectrum()?.values;
        let w1 = self.w1_spectrum()?;
        for _ in 0..self.w1_multiplicity {
            v.extend_from_slice(w1.values());
        }
        Ok(Spectrum::from_values(v))
    }

    /// Largest elementwise gap between the union spectrum and the full one.
    pub fn union_error(&self) -> Result<f64> {
        Ok(self.union_spectrum()?.max_abs_diff(&self.full_spectrum))
    }
}

/// Two-block reduction of a weighted symmetric star.
///
/// The assignment must be per stratum (strata `1..=m`).
pub fn stratify(topology: &Topology, assignment: &WeightAssignment) -> Result<StratifiedBlocks> {
    let (m, n) = match *topology {
        Topology::SymmetricStar { m, n } => (m, n),
        _ => return Err(Error::Unsupported("block reduction is implemented for the symmetric star only".into())),
    };
    topology.check()?;
    let graph = crate::topology::build(topology)?;
    let full = assemble_matrix(&graph, assignment)?;
    let w: Vec<f64> = (1..=m)
        .map(|s| {
            assignment.stratum(s).ok_or_else(|| Error::Unsupported(format!("stratum {s} has no per-stratum weight")))
        })
        .collect::<Result<_>>()?;

    let nf = n as f64;
    let mut diag = Vec::with_capacity(m + 1);
    diag.push(1.0 - nf * w[0]);
    for j in 0..m {
        let next = w.get(j + 1).copied().unwrap_or(0.0);
        diag.push(1.0 - w[j] - next);
    }
    let mut off = Vec::with_capacity(m);
    off.push(nf.sqrt() * w[0]);
    off.extend_from_slice(&w[1..]);
    let w0 = DenseMatrix::tridiagonal(&diag, &off);
    let w1 = w0.trailing(1);
    Ok(StratifiedBlocks {
        w0_block: w0,
        w1_block: w1,
        w1_multiplicity: n - 1,
        full_spectrum: eig_symmetric(full.as_dense())?,
    })
}

/// Symmetric-star characteristic function
/// `(n-2) cos((m-1/2)θ) - (n+2) cos((m+1/2)θ)`.
pub fn char_symmetric(m: usize, n: usize, theta: f64) -> f64 {
    let (m, n) = (m as f64, n as f64);
    (n - 2.0) * ((m - 0.5) * theta).cos() - (n + 2.0) * ((m + 0.5) * theta).cos()
}

/// K-cored characteristic function for tails of `m` nodes:
/// `(cos θ (n+2k) - n) sin(mθ) - 2k sin((m-1)θ)`.
pub fn char_kcs(m: usize, n: usize, k: usize, theta: f64) -> f64 {
    let inner = (m - 1) as f64;
    let (n, k) = (n as f64, k as f64);
    (theta.cos() * (n + 2.0 * k) - n) * ((inner + 1.0) * theta).sin() - 2.0 * k * (inner * theta).sin()
}

/// Smallest root of `f` on `(0, π)`: scan for the first sign change on a
/// grid of `ROOT_SCAN_STEPS` cells, then bisect to `ROOT_TOL`.
pub fn smallest_root(f: impl Fn(f64) -> f64) -> Result<f64> {
    let h = PI / ROOT_SCAN_STEPS as f64;
    let mut lo = h;
    let mut f_lo = f(lo);
    for i in 2..ROOT_SCAN_STEPS {
        if f_lo == 0.0 {
            return Ok(lo);
        }
        let hi = i as f64 * h;
        let f_hi = f(hi);
        if f_lo.signum() != f_hi.signum() {
            return Ok(bisect(&f, lo, hi, f_lo));
        }
        lo = hi;
        f_lo = f_hi;
    }
    Err(Error::Numerical("no sign change of the characteristic function on (0, π)".into()))
}

fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut f_lo: f64) -> f64 {
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn check_mn(m: usize, n: usize) -> Result<()> {
    if m < 1 || n < 1 {
        return Err(Error::ParameterBounds(format!("need m >= 1 and n >= 1 (got m={m}, n={n})")));
    }
    Ok(())
}

/// θ whose cosine is the SLEM of the optimally weighted symmetric star.
pub fn theta_root_symmetric(m: usize, n: usize) -> Result<f64> {
    check_mn(m, n)?;
    smallest_root(|t| char_symmetric(m, n, t))
}

/// θ whose cosine is the closed-form SLEM of the k-cored star with tails of
/// `m` nodes. For `k = 1` this coincides with [`theta_root_symmetric`].
pub fn theta_root_kcs(m: usize, n: usize, k: usize) -> Result<f64> {
    check_mn(m, n)?;
    if k < 1 {
        return Err(Error::ParameterBounds("k must be at least 1".into()));
    }
    smallest_root(|t| char_kcs(m, n, k, t))
}

/// Whether the discarded central eigenvalue `1 - n w1 = (2k-n)/(2k+n)`
/// stays within the closed-form SLEM, i.e. the closed form is optimal.
pub fn kcs_closed_form_holds(m: usize, n: usize, k: usize) -> Result<bool> {
    let s = theta_root_kcs(m, n, k)?.cos();
    Ok(discarded_eigenvalue(n, k) <= s + KCS_BOUNDARY_TOL)
}

/// `(2k - n) / (2k + n)`.
pub fn discarded_eigenvalue(n: usize, k: usize) -> f64 {
    let (n, k) = (n as f64, k as f64);
    (2.0 * k - n) / (2.0 * k + n)
}

/// Boundary number of centres for a k-cored star with `n` tails of `m`
/// nodes: the first `k` at which the discarded eigenvalue `(2k-n)/(2k+n)`
/// is no longer strictly below the closed-form SLEM.
///
/// Below this value the closed-form weights are optimal. At the boundary
/// they are optimal only in the tie case (`m = 1`, where the two sides are
/// equal at `k = n`); the closed-form SLEM curve bottoms out here.
pub fn k_max(m: usize, n: usize) -> Result<usize> {
    check_mn(m, n)?;
    const K_CAP: usize = 1_000_000;
    for k in 1..=K_CAP {
        let s = theta_root_kcs(m, n, k)?.cos();
        if discarded_eigenvalue(n, k) >= s - KCS_BOUNDARY_TOL {
            return Ok(k);
        }
    }
    Err(Error::Numerical(format!("k_max search exceeded {K_CAP}")))
}

/// Closed-form SLEM of a star family under its optimal weights.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClosedFormSlem {
    pub slem: f64,
    /// Root of the characteristic equation (absent for the CCS star).
    pub theta: Option<f64>,
    /// False for a single branch and for k-cored stars past the boundary.
    pub optimality_guaranteed: bool,
}

pub fn slem_closed_form(topology: &Topology) -> Result<ClosedFormSlem> {
    topology.check()?;
    match *topology {
        Topology::SymmetricStar { m, n } => {
            let t = theta_root_symmetric(m, n)?;
            Ok(ClosedFormSlem { slem: t.cos(), theta: Some(t), optimality_guaranteed: n >= 2 })
        }
        Topology::CcsStar { m, .. } => {
            Ok(ClosedFormSlem { slem: (PI / (2.0 * (m as f64 + 1.0))).cos(), theta: None, optimality_guaranteed: true })
        }
        Topology::KcsStar { m, n, k } => {
            let t = theta_root_kcs(m, n, k)?;
            let s = t.cos();
            Ok(ClosedFormSlem {
                slem: s,
                theta: Some(t),
                optimality_guaranteed: n >= 2 && discarded_eigenvalue(n, k) <= s + KCS_BOUNDARY_TOL,
            })
        }
        Topology::Custom { .. } => Err(Error::Unsupported("no closed-form SLEM for custom graphs".into())),
    }
}

/// Outcome of the interlacing and eigenvalue-location checks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterlacingReport {
    /// `λ_j(W0) ≤ λ_j(W1) ≤ λ_{j+1}(W0)` in ascending order, for all `j`.
    pub interlacing_holds: bool,
    pub max_interlacing_violation: f64,
    /// `λ_2(W) = λ_1(W1)`; `None` when there is a single branch.
    pub lambda2_is_w1_max: Option<bool>,
    pub lambda2_error: f64,
    /// `λ_min(W) = λ_min(W0)`.
    pub min_is_w0_min: bool,
    pub min_w0_error: f64,
    /// `λ_min(W) = λ_min(W1)`; generally false, reported for reference.
    pub min_is_w1_min: Option<bool>,
    pub tolerance: f64,
}

impl InterlacingReport {
    pub fn passed(&self) -> bool {
        self.interlacing_holds && self.lambda2_is_w1_max.unwrap_or(true) && self.min_is_w0_min
    }
}

pub fn interlacing_check(blocks: &StratifiedBlocks) -> Result<InterlacingReport> {
    const TOL: f64 = 1e-10;
    let mut a = blocks.w0_spectrum()?.values;
    let mut b = blocks.w1_spectrum()?.values;
    a.reverse();
    b.reverse();
    let mut worst = 0.0f64;
    for j in 0..b.len() {
        worst = worst.max(a[j] - b[j]).max(b[j] - a[j + 1]);
    }
    let full = blocks.full_spectrum.values();
    let w1_max = *b.last().unwrap_or(&f64::NAN);
    let w1_min = *b.first().unwrap_or(&f64::NAN);
    let w0_min = a[0];
    let full_min = *full.last().unwrap();
    let has_copies = blocks.w1_multiplicity > 0 && !b.is_empty();
    let lambda2_error = if has_copies { (full[1] - w1_max).abs() } else { 0.0 };
    let min_w0_error = (full_min - w0_min).abs();
    Ok(InterlacingReport {
        interlacing_holds: worst <= TOL,
        max_interlacing_violation: worst.max(0.0),
        lambda2_is_w1_max: has_copies.then_some(lambda2_error <= TOL),
        lambda2_error,
        min_is_w0_min: min_w0_error <= TOL,
        min_w0_error,
        min_is_w1_min: has_copies.then(|| (full_min - w1_min).abs() <= TOL),
        tolerance: TOL,
    })
}

/// Characteristic-function residuals on a uniform θ grid over `(0, π)`, as
/// CSV `theta,residual`.
pub fn write_characteristic_csv<W: Write>(f: impl Fn(f64) -> f64, points: usize, mut out: W) -> Result<()> {
    writeln!(out, "theta,residual")?;
    for i in 1..=points {
        let t = PI * i as f64 / (points + 1) as f64;
        writeln!(out, "{},{}", fmt_full(t), fmt_full(f(t)))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{optimal_weights, Weighting};

    #[test]
    fn trivial_spectra() {
        let s = eig_symmetric(&DenseMatrix::identity(3)).unwrap();
        assert_eq!(s.values(), &[1.0, 1.0, 1.0]);
        let s = eig_symmetric(&DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()).unwrap();
        assert!((s.values()[0] - 1.0).abs() < 1e-15 && (s.values()[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn asymmetric_rejected() {
        let m = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![0.5, 0.0]]).unwrap();
        assert!(matches!(eig_symmetric(&m), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn slem_examples() {
        assert_eq!(slem_dense(&DenseMatrix::identity(3)).unwrap(), 1.0);
        let half = DenseMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert!(slem_dense(&half).unwrap().abs() < 1e-15);
        let bad = DenseMatrix::from_rows(&[vec![0.5, 0.4], vec![0.4, 0.5]]).unwrap();
        assert!(matches!(slem_dense(&bad), Err(Error::NotStochastic(_))));
    }

    #[test]
    fn symmetric_star_reference_slem() {
        let w = Weighting::Optimal.matrix(&Topology::SymmetricStar { m: 3, n: 3 }).unwrap();
        assert!((slem(&w).unwrap() - 0.91294).abs() < 1e-5);
        let t = theta_root_symmetric(3, 3).unwrap();
        assert!((t.cos() - 0.91294).abs() < 1e-5);
        let t = theta_root_symmetric(3, 40).unwrap();
        assert!((t.cos() - 0.984946).abs() < 1e-6);
    }

    #[test]
    fn kcs_reference_roots() {
        assert!((theta_root_kcs(3, 3, 2).unwrap().cos() - 0.893816).abs() < 1e-6);
        assert!((theta_root_kcs(3, 40, 2).unwrap().cos() - 0.972613).abs() < 1e-6);
    }

    #[test]
    fn kcs_one_centre_reduces_to_symmetric() {
        for m in 1..=8 {
            for n in 1..=8 {
                let a = theta_root_kcs(m, n, 1).unwrap().cos();
                let b = theta_root_symmetric(m, n).unwrap().cos();
                assert!((a - b).abs() < 1e-10, "m={m} n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn ccs_closed_form() {
        let c = slem_closed_form(&Topology::CcsStar { m: 2, n: 9 }).unwrap();
        assert!((c.slem - 0.866_025_403_784_438_6).abs() < 1e-15);
        let c = slem_closed_form(&Topology::CcsStar { m: 1, n: 4 }).unwrap();
        assert!((c.slem - 0.707_106_781_186_547_5).abs() < 1e-15);
    }

    #[test]
    fn stratify_m1_n2() {
        let w1 = 0.3;
        let a = WeightAssignment::PerStratum([(1, w1)].into_iter().collect());
        let b = stratify(&Topology::SymmetricStar { m: 1, n: 2 }, &a).unwrap();
        let s2 = 2f64.sqrt();
        let expect = DenseMatrix::from_rows(&[vec![1.0 - 2.0 * w1, s2 * w1], vec![s2 * w1, 1.0 - w1]]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((b.w0_block.get(i, j) - expect.get(i, j)).abs() < 1e-15);
            }
        }
        assert_eq!(b.w1_block.as_slice(), &[1.0 - w1]);
        assert!(b.union_error().unwrap() < 1e-12);
    }

    #[test]
    fn stratify_optimal_three_five() {
        let t = Topology::SymmetricStar { m: 3, n: 5 };
        let a = optimal_weights(&t).unwrap().assignment;
        let b = stratify(&t, &a).unwrap();
        let w1 = 2.0 / 7.0;
        assert!((b.w0_block.get(0, 0) - (1.0 - 5.0 * w1)).abs() < 1e-15);
        assert!((b.w0_block.get(0, 1) - 5f64.sqrt() * w1).abs() < 1e-15);
        assert!(b.union_error().unwrap() < 1e-10);
        // λ1(W1) is the closed-form SLEM
        let top = b.w1_spectrum().unwrap().largest();
        assert!((top - theta_root_symmetric(3, 5).unwrap().cos()).abs() < 1e-9);
        let r = interlacing_check(&b).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.min_is_w1_min, Some(false));
    }

    #[test]
    fn zero_weights_give_identity_blocks() {
        let t = Topology::SymmetricStar { m: 3, n: 4 };
        let g = crate::topology::build(&t).unwrap();
        let b = stratify(&t, &WeightAssignment::uniform_per_stratum(&g, 0.0)).unwrap();
        assert_eq!(b.w0_block, DenseMatrix::identity(4));
        assert_eq!(b.w1_block, DenseMatrix::identity(3));
        assert!(interlacing_check(&b).unwrap().passed());
    }

    #[test]
    fn stratify_rejects_other_families() {
        let t = Topology::CcsStar { m: 2, n: 3 };
        let a = optimal_weights(&t).unwrap().assignment;
        assert!(matches!(stratify(&t, &a), Err(Error::Unsupported(_))));
    }

    #[test]
    fn k_max_examples() {
        assert_eq!(k_max(3, 2).unwrap(), 15);
        assert_eq!(k_max(4, 5).unwrap(), 64);
        assert_eq!(k_max(1, 2).unwrap(), 2);
    }

    #[test]
    fn k_max_boundary() {
        for &(m, n) in &[(3, 2), (2, 3), (4, 5), (5, 7)] {
            let k = k_max(m, n).unwrap();
            let below = theta_root_kcs(m, n, k - 1).unwrap().cos();
            assert!(discarded_eigenvalue(n, k - 1) < below);
            let at = theta_root_kcs(m, n, k).unwrap().cos();
            assert!(discarded_eigenvalue(n, k) >= at - KCS_BOUNDARY_TOL);
        }
    }

    #[test]
    fn characteristic_csv_header() {
        let mut buf = Vec::new();
        write_characteristic_csv(|t| char_symmetric(3, 3, t), 4, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().count(), 5);
        assert!(s.starts_with("theta,residual\n"));
    }
}
