//! Fixtures shared by the benchmarks.

use polynotope_core::mixedenc::{encode, EncodingSpec};
use polynotope_core::Polynotope;

/// A two-dimensional set whose coordinates are each encoded on `level` signed bits.
pub fn encoded_pair(level: u32) -> Polynotope {
    let a = encode(EncodingSpec::signed(level), 14.0, 16.0).expect("valid bounds");
    let b = encode(EncodingSpec::signed(level), 14.0, 16.0).expect("valid bounds");
    a.poly.vcat(&b.poly)
}

/// Repeatedly squares and re-adds `x` to grow a dense polynomial set.
pub fn grown(x: &Polynotope, rounds: usize) -> Polynotope {
    let mut y = x.clone();
    for _ in 0..rounds {
        y = y.multiply(x).expect("matching dims").add(x).expect("matching dims");
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_have_expected_shape() {
        let x = encoded_pair(3);
        assert_eq!(x.dim(), 2);
        assert_eq!(x.ids().len(), 8);
        assert!(grown(&x, 2).max_degree() >= 3);
    }
}
