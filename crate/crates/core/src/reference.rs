//! Published reference values that the experiments are compared against.

use crate::weights::Weighting;

/// `k_max` grid: row `r` is for `r + 2` branches, column `c` for tails of
/// `c + 1` nodes.
pub const K_MAX_GRID: [[usize; 8]; 10] = [
    [2, 7, 15, 26, 41, 58, 79, 104],
    [3, 10, 22, 39, 61, 87, 119, 155],
    [4, 13, 29, 52, 81, 116, 158, 207],
    [5, 16, 36, 64, 101, 145, 198, 259],
    [6, 20, 43, 77, 121, 174, 237, 310],
    [7, 23, 50, 90, 141, 203, 277, 362],
    [8, 26, 58, 103, 161, 232, 316, 413],
    [9, 29, 65, 115, 181, 261, 356, 465],
    [10, 32, 72, 128, 201, 290, 395, 517],
    [11, 36, 79, 141, 221, 319, 435, 568],
];
pub const K_MAX_BRANCHES: std::ops::RangeInclusive<usize> = 2..=11;
pub const K_MAX_TAIL_NODES: std::ops::RangeInclusive<usize> = 1..=8;

/// SLEM comparison of the three families built from two-edge paths:
/// `(branches, symmetric star m=3, CCS star m=2, KCS star m=3 k=2)`.
pub const SLEM_COMPARISON: [(usize, f64, f64, f64); 2] =
    [(3, 0.91294, 0.866025, 0.893816), (40, 0.984946, 0.866025, 0.972613)];

/// One published cell of a quantized-consensus table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuantizedCell {
    pub psi: f64,
    pub eta: f64,
    pub mu: f64,
    pub rho: f64,
}

const fn c(psi: f64, eta: f64, mu: f64, rho: f64) -> QuantizedCell {
    QuantizedCell { psi, eta, mu, rho }
}

pub const QUANTIZED_BITS: [u32; 3] = [4, 8, 16];

/// Cells indexed `[bits row][weighting]` with weightings in
/// [`Weighting::ALL`] order (Metropolis, max-degree, best-constant, optimal).
pub type QuantizedTable = [[QuantizedCell; 4]; 3];

/// Symmetric star, `n = 3`, `m = 2`.
pub const QUANTIZED_SYMMETRIC: QuantizedTable = [
    [
        c(100.0, 31.25, 4.7e-3, 0.48),
        c(100.0, 27.17, 1.4e-2, 0.43),
        c(100.0, 31.18, 3.1e-3, 0.594),
        c(100.0, 30.78, 3.7e-3, 0.563),
    ],
    [
        c(100.0, 56.71, 1.46e-2, 1.022),
        c(100.0, 46.98, 2.54e-3, 0.86),
        c(100.0, 47.22, 2.34e-3, 1.04),
        c(100.0, 46.0, 1.21e-2, 0.9),
    ],
    [
        c(100.0, 107.94, 3.4e-3, 2.16),
        c(100.0, 87.43, 9.23e-3, 1.73),
        c(100.0, 78.98, 1.2, 4.7e3),
        c(100.0, 77.72, 0.6, 1.57e3),
    ],
];

/// CCS star, `n = 3`, `m = 2`.
pub const QUANTIZED_CCS: QuantizedTable = [
    [
        c(100.0, 41.0, 4e-3, 0.464),
        c(100.0, 34.76, 5.18e-4, 0.42),
        c(99.0, 55.3, 5.3e-3, 0.81),
        c(99.7, 42.88, 2.4e-3, 0.654),
    ],
    [
        c(100.0, 73.86, 1.14e-3, 1.02),
        c(100.0, 60.56, 2.45e-2, 0.82),
        c(98.52, 75.57, 1.58e-2, 1.36),
        c(99.31, 67.94, 1.06e-2, 0.97),
    ],
    [
        c(97.6, 139.7, 6.1e-3, 2.215),
        c(100.0, 112.98, 1.82e-3, 1.71),
        c(94.95, 112.8, -0.66, 1.4e4),
        c(100.0, 104.6, 0.576, 2.14e3),
    ],
];

/// KCS star, `n = 3`, `m = 2`, `k = 2`.
pub const QUANTIZED_KCS: QuantizedTable = [
    [
        c(100.0, 24.98, 4.62e-4, 0.4),
        c(100.0, 27.2, 3.93e-3, 0.402),
        c(100.0, 24.8, 4.8e-3, 0.39),
        c(100.0, 24.58, 4.23e-3, 0.41),
    ],
    [
        c(100.0, 42.17, 8.25e-4, 0.72),
        c(100.0, 42.77, 18e-3, 0.68),
        c(100.0, 37.96, 2.67e-3, 0.66),
        c(100.0, 36.0, 13.7e-3, 0.62),
    ],
    [
        c(100.0, 77.04, 8.27e-3, 1.4),
        c(100.0, 76.08, 15.4e-3, 1.32),
        c(100.0, 64.08, 2.53e-3, 1.2),
        c(100.0, 59.41, 93.9e-3, 52.7),
    ],
];

/// Published `k_max` for `branches` tails of `tail_nodes` nodes, if tabulated.
pub fn k_max_reference(tail_nodes: usize, branches: usize) -> Option<usize> {
    if !K_MAX_BRANCHES.contains(&branches) || !K_MAX_TAIL_NODES.contains(&tail_nodes) {
        return None;
    }
    Some(K_MAX_GRID[branches - 2][tail_nodes - 1])
}

pub fn quantized_cell(table: &QuantizedTable, bits: u32, weighting: Weighting) -> Option<QuantizedCell> {
    let row = QUANTIZED_BITS.iter().position(|&b| b == bits)?;
    let col = Weighting::ALL.iter().position(|&w| w == weighting)?;
    Some(table[row][col])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookups() {
        assert_eq!(k_max_reference(3, 2), Some(15));
        assert_eq!(k_max_reference(4, 5), Some(64));
        assert_eq!(k_max_reference(1, 2), Some(2));
        assert_eq!(k_max_reference(9, 2), None);
        let cell = quantized_cell(&QUANTIZED_SYMMETRIC, 4, Weighting::Optimal).unwrap();
        assert_eq!(cell.eta, 30.78);
        assert_eq!(quantized_cell(&QUANTIZED_KCS, 4, Weighting::Optimal).unwrap().eta, 24.58);
        assert!(quantized_cell(&QUANTIZED_CCS, 5, Weighting::Optimal).is_none());
    }
}
