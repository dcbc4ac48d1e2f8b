//! Bitmask bookkeeping for exterior monomials `θ^{k1} ∧ … ∧ θ^{kp}`.
//!
//! A strictly increasing index tuple is stored as a `u64` with bit `k` set for
//! each index `k`, so at most 64 generators are supported.

pub type Mask = u64;

/// Largest number of exterior generators a mask can hold.
pub const MAX_GENERATORS: usize = 64;

#[inline]
pub fn degree(mask: Mask) -> usize {
    mask.count_ones() as usize
}

/// Indices of a mask in increasing order.
pub fn indices(mask: Mask) -> Vec<usize> {
    let mut out = Vec::with_capacity(degree(mask));
    let mut m = mask;
    while m != 0 {
        let k = m.trailing_zeros() as usize;
        out.push(k);
        m &= m - 1;
    }
    out
}

pub fn from_indices(idx: &[usize]) -> Mask {
    idx.iter().fold(0, |m, &k| m | (1u64 << k))
}

/// Sign of the permutation sorting the concatenation of `a` then `b`, or
/// `None` if they share an index (the product vanishes).
#[inline]
pub fn merge_sign(a: Mask, b: Mask) -> Option<f64> {
    if a & b != 0 {
        return None;
    }
    // Each index of `b` must move past every larger index of `a`.
    let mut swaps = 0u32;
    let mut m = b;
    while m != 0 {
        let k = m.trailing_zeros();
        swaps += (a >> k).count_ones();
        m &= m - 1;
    }
    Some(if swaps % 2 == 0 { 1.0 } else { -1.0 })
}

/// Sign picked up by moving generator `k` to the front of `mask`
/// (`(-1)^{#indices of mask below k}`).
#[inline]
pub fn position_sign(k: usize, mask: Mask) -> f64 {
    let below = mask & ((1u64 << k) - 1);
    if below.count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// All masks of the given degree over `dim` generators, in increasing numeric
/// order.
pub fn masks_of_degree(dim: usize, p: usize) -> Vec<Mask> {
    if p > dim {
        return Vec::new();
    }
    if p == 0 {
        return vec![0];
    }
    let limit: u128 = 1u128 << dim;
    let mut out = Vec::with_capacity(binomial(dim, p));
    let mut m: u128 = (1u128 << p) - 1;
    while m < limit {
        out.push(m as Mask);
        // Gosper's hack: next integer with the same number of set bits.
        let c = m & m.wrapping_neg();
        let r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
    }
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Sign of the permutation taking `seq` (distinct entries) to sorted order.
pub fn permutation_sign(seq: &[usize]) -> f64 {
    let mut inv = 0usize;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_are_complete_and_ordered() {
        for dim in 0..7 {
            for p in 0..=dim {
                let ms = masks_of_degree(dim, p);
                assert_eq!(ms.len(), binomial(dim, p));
                assert!(ms.iter().all(|&m| degree(m) == p && m >> dim == 0));
            }
        }
        assert_eq!(masks_of_degree(3, 2), vec![0b011, 0b101, 0b110]);
    }

    #[test]
    fn merge_sign_matches_permutation_sign() {
        // θ^2 θ^0 = -θ^0 θ^2
        assert_eq!(merge_sign(0b100, 0b001), Some(-1.0));
        assert_eq!(merge_sign(0b001, 0b100), Some(1.0));
        assert_eq!(merge_sign(0b011, 0b010), None);
        let a = [1usize, 4, 6];
        let b = [0usize, 3, 5];
        let seq: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
        assert_eq!(
            merge_sign(from_indices(&a), from_indices(&b)),
            Some(permutation_sign(&seq))
        );
    }
}
