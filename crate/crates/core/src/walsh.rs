//! Sylvester-Hadamard (Walsh) codes and the index-bit mapping.

use crate::error::{Error, Result};

/// Walsh code of order `N` in natural Hadamard order; row 1 is all ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalshMatrix {
    order: usize,
    entries: Vec<i8>,
}

impl WalshMatrix {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Row `a` (1-based, as index symbols are).
    pub fn row(&self, a: usize) -> &[i8] {
        assert!((1..=self.order).contains(&a), "walsh row {a} out of range");
        let start = (a - 1) * self.order;
        &self.entries[start..start + self.order]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i8]> {
        self.entries.chunks_exact(self.order)
    }

    /// Applies the matrix to `v`: `out[m] = sum_n w[m][n] * v[n]`.
    pub fn transform(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.order);
        self.rows()
            .map(|row| row.iter().zip(v).map(|(&w, &x)| f64::from(w) * x).sum())
            .collect()
    }
}

pub fn walsh_matrix(order: usize) -> Result<WalshMatrix> {
    if order < 2 || !order.is_power_of_two() {
        return Err(Error::WalshOrder(order));
    }
    // H[i][j] = (-1)^popcount(i & j) is the Sylvester recursion unrolled.
    let entries = (0..order)
        .flat_map(|i| (0..order).map(move |j| if (i & j).count_ones() % 2 == 0 { 1 } else { -1 }))
        .collect();
    Ok(WalshMatrix { order, entries })
}

/// Number of index bits carried by a Walsh code of order `N = 2^m_c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexMapping {
    m_c: u32,
}

impl IndexMapping {
    pub fn new(m_c: u32) -> Result<Self> {
        if m_c == 0 || m_c > 16 {
            return Err(Error::WalshOrder(1usize.checked_shl(m_c).unwrap_or(0)));
        }
        Ok(Self { m_c })
    }

    pub fn for_order(order: usize) -> Result<Self> {
        if order < 2 || !order.is_power_of_two() {
            return Err(Error::WalshOrder(order));
        }
        Self::new(order.trailing_zeros())
    }

    pub fn bits(&self) -> u32 {
        self.m_c
    }

    pub fn order(&self) -> usize {
        1 << self.m_c
    }
}

/// MSB-first bits to a 1-based index symbol: all zeros map to 1, all ones to N.
pub fn bits_to_index(bits: &[u8], mapping: IndexMapping) -> Result<usize> {
    let m_c = mapping.bits() as usize;
    if bits.len() != m_c {
        return Err(Error::BitLength { expected: m_c, actual: bits.len() });
    }
    Ok(1 + bits.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b & 1)))
}

pub fn index_to_bits(a: usize, mapping: IndexMapping) -> Result<Vec<u8>> {
    let order = mapping.order();
    if !(1..=order).contains(&a) {
        return Err(Error::IndexOutOfRange { index: a, order });
    }
    let value = a - 1;
    let m_c = mapping.bits();
    Ok((0..m_c).rev().map(|shift| ((value >> shift) & 1) as u8).collect())
}

/// Hamming distance between the bit patterns of two index symbols.
pub fn index_bit_errors(sent: usize, detected: usize) -> u32 {
    ((sent - 1) ^ (detected - 1)).count_ones()
}
