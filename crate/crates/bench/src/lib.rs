//! Workloads shared by the criterion benches.

use sierpinski_core::gf4::g;
use sierpinski_core::{QuaternaryFunction, TruthTable};

/// Symmetric function that is 1 when the input weight lies in `lo..=hi`.
pub fn weight_band(n: usize, lo: u32, hi: u32) -> TruthTable {
    TruthTable::from_fn(n, |idx| (lo..=hi).contains(&idx.count_ones()))
        .expect("n within the dense limit")
}

pub fn parity(n: usize) -> TruthTable {
    TruthTable::from_fn(n, |idx| idx.count_ones() % 2 == 1).expect("n within the dense limit")
}

/// Product of all inputs plus the sum of their squares, over GF(4).
pub fn quaternary_mix(n: usize) -> QuaternaryFunction {
    QuaternaryFunction::from_fn(n, |x| {
        let prod = x.iter().fold(g(1), |acc, &v| acc * v);
        let sum = x.iter().fold(g(0), |acc, &v| acc + v * v);
        prod + sum
    })
    .expect("n within the dense limit")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn workloads_have_expected_sizes() {
        assert_eq!(weight_band(9, 3, 6).count_ones(), 420);
        assert_eq!(parity(5).count_ones(), 16);
        assert_eq!(quaternary_mix(2).values().len(), 16);
    }
}
