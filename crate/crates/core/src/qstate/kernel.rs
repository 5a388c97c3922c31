//! In-place application of small matrices to selected bits of a dense
//! vector. A density matrix of `n` qubits is handled as a vector over `2n`
//! bits: column index in the low `n` bits, row index in the high `n` bits.

use super::Matrix;
use crate::C64;

/// Replaces `data` with `(m ⊗ 1) data`, where bit `j` of the local index of
/// `m` addresses bit `targets[j]` of the global index.
pub(crate) fn apply(data: &mut [C64], m: &Matrix, targets: &[usize]) {
    let k = targets.len();
    let local = 1usize << k;
    debug_assert_eq!(m.nrows(), local);
    let mask: usize = targets.iter().map(|&t| 1usize << t).sum();
    let offsets: Vec<usize> = (0..local)
        .map(|l| {
            (0..k)
                .filter(|j| l >> j & 1 == 1)
                .map(|j| 1usize << targets[j])
                .sum()
        })
        .collect();
    let mut buf = vec![C64::default(); local];
    for base in 0..data.len() {
        if base & mask != 0 {
            continue;
        }
        for (b, &off) in buf.iter_mut().zip(&offsets) {
            *b = data[base | off];
        }
        for (row, &off) in offsets.iter().enumerate() {
            let mut acc = C64::default();
            for (col, b) in buf.iter().enumerate() {
                acc += m[(row, col)] * b;
            }
            data[base | off] = acc;
        }
    }
}

/// `rho -> m rho m^dag` on a row-major `2^n x 2^n` matrix.
pub(crate) fn conjugate(data: &mut [C64], n: usize, m: &Matrix, targets: &[usize]) {
    let rows: Vec<usize> = targets.iter().map(|t| t + n).collect();
    apply(data, m, &rows);
    apply(data, &m.map(|z| z.conj()), targets);
}

/// Embeds each local index of `targets` into a global index.
pub(crate) fn scatter_bits(local: usize, targets: &[usize]) -> usize {
    targets
        .iter()
        .enumerate()
        .filter(|(j, _)| local >> j & 1 == 1)
        .map(|(_, &t)| 1usize << t)
        .sum()
}

/// Extracts the bits at `targets` from a global index into a local index.
pub(crate) fn gather_bits(global: usize, targets: &[usize]) -> usize {
    targets
        .iter()
        .enumerate()
        .map(|(j, &t)| (global >> t & 1) << j)
        .sum()
}
