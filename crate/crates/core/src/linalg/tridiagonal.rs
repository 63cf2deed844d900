use super::{sort_decreasing, DenseMatrix};
use crate::error::{Error, Result};

const MAX_QL_ITERATIONS: usize = 60;

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (`off[i]` couples rows `i` and `i + 1`), in decreasing
/// order. Implicit-shift QL.
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if off.len() + 1 != n && !(n == 0 && off.is_empty()) {
        return Err(Error::DimensionMismatch { expected: n.saturating_sub(1), found: off.len() });
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    ql_implicit(&mut d, &mut e, None)?;
    sort_decreasing(&mut d);
    Ok(d)
}

/// Full eigen-decomposition via Householder reduction and implicit QL.
///
/// Eigenvalues are returned in decreasing order; column `j` of the returned
/// matrix is the unit eigenvector of eigenvalue `j`.
pub fn symmetric_eigen(a: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    let n = a.order();
    if n == 0 {
        return Ok((Vec::new(), DenseMatrix::zeros(0)));
    }
    let (mut d, off, mut q) = householder_tridiagonalize(a);
    let mut e = off;
    e.push(0.0);
    ql_implicit(&mut d, &mut e, Some(&mut q))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = DenseMatrix::from_fn(n, |r, c| q.get(r, order[c]));
    Ok((values, vectors))
}

/// Orthogonal reduction `a = Q T Qᵀ` with `T` tridiagonal.
///
/// Returns `(diag(T), offdiag(T), Q)`. Reads the lower triangle of `a`.
pub fn householder_tridiagonalize(a: &DenseMatrix) -> (Vec<f64>, Vec<f64>, DenseMatrix) {
    let n = a.order();
    let mut v = DenseMatrix::from_fn(n, |i, j| if i >= j { a.get(i, j) } else { a.get(j, i) });
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    if n == 0 {
        return (d, Vec::new(), v);
    }

    for j in 0..n {
        d[j] = v.get(n - 1, j);
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v.get(i - 1, j);
                v.set(i, j, 0.0);
                v.set(j, i, 0.0);
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v.set(j, i, f);
                g = e[j] + v.get(j, j) * f;
                for k in (j + 1)..i {
                    g += v.get(k, j) * d[k];
                    e[k] += v.get(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    let val = v.get(k, j) - (f * e[k] + g * d[k]);
                    v.set(k, j, val);
                }
                d[j] = v.get(i - 1, j);
                v.set(i, j, 0.0);
            }
        }
        d[i] = h;
    }

    // accumulate the transformations
    for i in 0..(n - 1) {
        v.set(n - 1, i, v.get(i, i));
        v.set(i, i, 1.0);
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v.get(k, i + 1) / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v.get(k, i + 1) * v.get(k, j);
                }
                for k in 0..=i {
                    let val = v.get(k, j) - g * d[k];
                    v.set(k, j, val);
                }
            }
        }
        for k in 0..=i {
            v.set(k, i + 1, 0.0);
        }
    }
    for j in 0..n {
        d[j] = v.get(n - 1, j);
        v.set(n - 1, j, 0.0);
    }
    v.set(n - 1, n - 1, 1.0);

    // e[i] couples i-1 and i; shift so that off[i] couples i and i+1
    let off = e[1..].to_vec();
    (d, off, v)
}

/// In-place implicit QL. `e[i]` couples `i` and `i + 1`; `e[n-1]` is scratch.
/// When `z` is given, the rotations are accumulated into its columns.
fn ql_implicit(d: &mut [f64], e: &mut [f64], mut z: Option<&mut DenseMatrix>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return Err(Error::Numerical("implicit QL did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m as isize - 1;
            while i >= l as isize {
                let iu = i as usize;
                let f = s * e[iu];
                let b = c * e[iu];
                r = f.hypot(g);
                e[iu + 1] = r;
                if r == 0.0 {
                    d[iu + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[iu + 1] - p;
                r = (d[iu] - g) * s + 2.0 * c * b;
                p = s * r;
                d[iu + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let zf = z.get(k, iu + 1);
                        let zi = z.get(k, iu);
                        z.set(k, iu + 1, s * zi + c * zf);
                        z.set(k, iu, c * zi - s * zf);
                    }
                }
                i -= 1;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_laplacian_spectrum() {
        // L of the path on 4 nodes: eigenvalues 2 - 2cos(k pi / 4)
        let vals = tridiagonal_eigen(&[1.0, 2.0, 2.0, 1.0], &[-1.0, -1.0, -1.0]).unwrap();
        let mut expected: Vec<f64> =
            (0..4).map(|k| 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / 4.0).cos()).collect();
        sort_decreasing(&mut expected);
        for (a, b) in vals.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-14, "{a} vs {b}");
        }
    }

    #[test]
    fn single_entry() {
        assert_eq!(tridiagonal_eigen(&[0.25], &[]).unwrap(), vec![0.25]);
    }

    #[test]
    fn off_length_checked() {
        assert!(tridiagonal_eigen(&[1.0, 2.0], &[]).is_err());
    }

    #[test]
    fn reduction_reconstructs_input() {
        let a = DenseMatrix::from_fn(5, |i, j| 1.0 / (1.0 + i as f64 + j as f64) + if i == j { 0.3 } else { 0.0 });
        let (d, off, q) = householder_tridiagonalize(&a);
        let t = DenseMatrix::tridiagonal(&d, &off);
        for i in 0..5 {
            for j in 0..5 {
                let mut s = 0.0;
                for k in 0..5 {
                    for l in 0..5 {
                        s += q.get(i, k) * t.get(k, l) * q.get(j, l);
                    }
                }
                assert!((s - a.get(i, j)).abs() < 1e-13);
            }
        }
    }
}
