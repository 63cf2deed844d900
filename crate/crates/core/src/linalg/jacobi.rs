use super::DenseMatrix;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix.
///
/// Returns the eigenvalues in decreasing order and, when requested, the
/// matrix whose columns are the matching orthonormal eigenvectors. Only the
/// upper triangle of `a` is read.
pub fn jacobi_eigen(a: &DenseMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<DenseMatrix>)> {
    let n = a.order();
    let mut m = DenseMatrix::from_fn(n, |i, j| if i <= j { a.get(i, j) } else { a.get(j, i) });
    let mut v = want_vectors.then(|| DenseMatrix::identity(n));

    let mut converged = n < 2;
    for sweep in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m.get(p, q).abs();
            }
        }
        if off == 0.0 {
            converged = true;
            break;
        }
        // skip small rotations in the first sweeps
        let threshold = if sweep < 3 { 0.2 * off / (n * n) as f64 } else { 0.0 };

        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                let g = 100.0 * apq.abs();
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    m.set(p, q, 0.0);
                    m.set(q, p, 0.0);
                    continue;
                }
                if apq.abs() <= threshold || apq == 0.0 {
                    continue;
                }
                let h = aqq - app;
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                m.set(p, p, app - t * apq);
                m.set(q, q, aqq + t * apq);
                m.set(p, q, 0.0);
                m.set(q, p, 0.0);
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = m.get(r, p);
                    let arq = m.get(r, q);
                    let np = c * arp - s * arq;
                    let nq = s * arp + c * arq;
                    m.set(r, p, np);
                    m.set(p, r, np);
                    m.set(r, q, nq);
                    m.set(q, r, nq);
                }
                if let Some(v) = v.as_mut() {
                    for r in 0..n {
                        let vrp = v.get(r, p);
                        let vrq = v.get(r, q);
                        v.set(r, p, c * vrp - s * vrq);
                        v.set(r, q, s * vrp + c * vrq);
                    }
                }
            }
        }
    }
    if !converged {
        return Err(Error::Numerical(format!("Jacobi did not converge in {MAX_SWEEPS} sweeps")));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(j, j).total_cmp(&m.get(i, i)));
    let values = order.iter().map(|&i| m.get(i, i)).collect();
    let vectors = v.map(|v| DenseMatrix::from_fn(n, |r, c| v.get(r, order[c])));
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cycle() {
        let a = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let (vals, vecs) = jacobi_eigen(&a, true).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-15);
        assert!((vals[1] + 1.0).abs() < 1e-15);
        let v = vecs.unwrap().column(0);
        assert!((v[0] - v[1]).abs() < 1e-15);
    }

    #[test]
    fn diagonal_input_is_sorted() {
        let a = DenseMatrix::tridiagonal(&[0.5, 3.0, -2.0], &[0.0, 0.0]);
        let (vals, _) = jacobi_eigen(&a, false).unwrap();
        assert_eq!(vals, vec![3.0, 0.5, -2.0]);
    }
}
