//! Flooding sum-product decoding against a target syndrome.

use super::matrix::ParityCheckMatrix;

pub const DEFAULT_MAX_ITER: usize = 60;

/// Message magnitude cap; keeps `atanh` finite.
const LLR_CAP: f64 = 40.0;

#[derive(Debug, Clone, PartialEq)]
pub struct BpOutcome {
    pub bits: Vec<u8>,
    pub converged: bool,
    pub iterations: usize,
}

/// Edge layout shared by every frame decoded with the same matrix.
#[derive(Debug, Clone)]
pub struct BpDecoder<'h> {
    h: &'h ParityCheckMatrix,
    /// Start offset of each check's edges; edges are numbered row by row.
    row_start: Vec<usize>,
    edge_var: Vec<u32>,
    /// Edge ids incident to each variable.
    var_edges: Vec<Vec<u32>>,
}

impl<'h> BpDecoder<'h> {
    pub fn new(h: &'h ParityCheckMatrix) -> Self {
        let mut row_start = Vec::with_capacity(h.n_checks() + 1);
        let mut edge_var = Vec::with_capacity(h.n_edges());
        let mut var_edges = vec![Vec::new(); h.n_vars()];
        row_start.push(0);
        for row in h.rows() {
            for &v in row {
                var_edges[v as usize].push(edge_var.len() as u32);
                edge_var.push(v);
            }
            row_start.push(edge_var.len());
        }
        Self { h, row_start, edge_var, var_edges }
    }

    /// Hard decisions; returns false if any belief is exactly zero, which
    /// counts as an erasure rather than a decision.
    fn hard(total: &[f64], bits: &mut [u8]) -> bool {
        let mut decided = true;
        for (b, &t) in bits.iter_mut().zip(total) {
            *b = (t < 0.0) as u8;
            decided &= t != 0.0;
        }
        decided
    }

    fn satisfied(&self, bits: &[u8], syndrome: &[u8]) -> bool {
        self.h
            .rows()
            .iter()
            .zip(syndrome)
            .all(|(row, &s)| row.iter().fold(0u8, |acc, &v| acc ^ bits[v as usize]) == s)
    }

    /// Decodes `llr` (positive favours bit 0) towards `H·bits = syndrome`.
    pub fn decode(&self, llr: &[f64], syndrome: &[u8], max_iter: usize) -> BpOutcome {
        assert_eq!(llr.len(), self.h.n_vars(), "llr length must equal n_vars");
        assert_eq!(syndrome.len(), self.h.n_checks(), "syndrome length must equal n_checks");
        let n_edges = self.edge_var.len();
        let mut bits = vec![0u8; llr.len()];
        let mut total = llr.to_vec();
        if Self::hard(&total, &mut bits) && self.satisfied(&bits, syndrome) {
            return BpOutcome { bits, converged: true, iterations: 0 };
        }

        let mut v2c: Vec<f64> = self.edge_var.iter().map(|&v| llr[v as usize]).collect();
        let mut c2v = vec![0.0; n_edges];
        let mut tanhs = Vec::new();
        for iter in 1..=max_iter {
            for c in 0..self.h.n_checks() {
                let (lo, hi) = (self.row_start[c], self.row_start[c + 1]);
                tanhs.clear();
                tanhs.extend(v2c[lo..hi].iter().map(|&m| (0.5 * m).tanh()));
                let sign = if syndrome[c] == 1 { -1.0 } else { 1.0 };
                // Leave-one-out products via a prefix pass and a suffix pass.
                let mut prefix = 1.0;
                for (k, e) in (lo..hi).enumerate() {
                    c2v[e] = prefix;
                    prefix *= tanhs[k];
                }
                let mut suffix = 1.0;
                for (k, e) in (lo..hi).enumerate().rev() {
                    let p = (c2v[e] * suffix * sign).clamp(-1.0, 1.0);
                    c2v[e] = (2.0 * p.atanh()).clamp(-LLR_CAP, LLR_CAP);
                    suffix *= tanhs[k];
                }
            }
            total.copy_from_slice(llr);
            for (v, edges) in self.var_edges.iter().enumerate() {
                for &e in edges {
                    total[v] += c2v[e as usize];
                }
            }
            for (e, &v) in self.edge_var.iter().enumerate() {
                v2c[e] = (total[v as usize] - c2v[e]).clamp(-LLR_CAP, LLR_CAP);
            }
            if Self::hard(&total, &mut bits) && self.satisfied(&bits, syndrome) {
                return BpOutcome { bits, converged: true, iterations: iter };
            }
        }
        BpOutcome { bits, converged: false, iterations: max_iter }
    }
}

/// Decodes towards the all-zero syndrome.
pub fn bp_decode(h: &ParityCheckMatrix, llr: &[f64], max_iter: usize) -> BpOutcome {
    BpDecoder::new(h).decode(llr, &vec![0; h.n_checks()], max_iter)
}

pub fn bp_decode_syndrome(h: &ParityCheckMatrix, llr: &[f64], syndrome: &[u8], max_iter: usize) -> BpOutcome {
    BpDecoder::new(h).decode(llr, syndrome, max_iter)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hamming() -> ParityCheckMatrix {
        ParityCheckMatrix::new("hamming", 7, vec![vec![0, 1, 2, 4], vec![1, 2, 3, 5], vec![0, 2, 3, 6]]).unwrap()
    }

    #[test]
    fn corrects_single_error() {
        let h = hamming();
        let word = [1u8, 1, 1, 0, 1, 0, 0];
        let mut llr: Vec<f64> = word.iter().map(|&b| if b == 0 { 2.0 } else { -2.0 }).collect();
        llr[3] = -0.5;
        let out = bp_decode(&h, &llr, 60);
        assert!(out.converged);
        assert_eq!(out.bits, word);
    }

    #[test]
    fn zero_llrs_never_converge() {
        let h = hamming();
        let out = bp_decode(&h, &[0.0; 7], 60);
        assert!(!out.converged);
        assert_eq!(out.iterations, 60);
        assert!(!bp_decode_syndrome(&h, &[0.0; 7], &[1, 0, 0], 60).converged);
    }
}
