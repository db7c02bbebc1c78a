use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::binomial;
use crate::error::{Error, Result};

/// Largest `L` for the pair enumerations.
pub const COUNT_MAX_L: usize = 12;

/// Per-mask multiplicity of bitstring pairs, by formula and by enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct DuplicationCount {
    pub l: usize,
    pub n: usize,
    pub formula_value: BigRational,
    pub enumeration_value: u64,
}

impl DuplicationCount {
    pub fn agrees(&self) -> bool {
        self.formula_value.is_integer()
            && self.formula_value.to_integer() == BigInt::from(self.enumeration_value)
    }
}

fn big_binom(n: usize, k: usize) -> BigInt {
    BigInt::from(binomial::exact(n, k).expect("binomial within exact range"))
}

fn check_l(l: usize) -> Result<()> {
    if l % 2 == 1 || l == 0 {
        return Err(Error::OddQubitCount(l));
    }
    if l > COUNT_MAX_L {
        return Err(Error::Capacity {
            what: "pair enumeration",
            requested: l,
            cap: COUNT_MAX_L,
        });
    }
    Ok(())
}

fn with_weight(l: usize, w: u32) -> Vec<u32> {
    (0u32..1 << l).filter(|m| m.count_ones() == w).collect()
}

fn count_pairs(first: &[u32], second: &[u32], mask: u32) -> u64 {
    first
        .par_iter()
        .map(|&a| second.iter().filter(|&&b| a ^ b == mask).count() as u64)
        .sum()
}

/// Pairs of weight-`L/2` strings whose XOR is the weight-`2n` mask `0..01..1`.
pub fn count_balanced_pairs(l: usize, n: usize) -> Result<DuplicationCount> {
    check_l(l)?;
    let h = l / 2;
    if n > h {
        return Err(Error::IndexOutOfRange { k: n, l });
    }
    let balanced = with_weight(l, h as u32);
    let mask = (1u32 << (2 * n)) - 1;
    let formula_value = BigRational::new(
        big_binom(l, h) * big_binom(h, n) * big_binom(h, n),
        big_binom(l, 2 * n),
    );
    Ok(DuplicationCount {
        l,
        n,
        formula_value,
        enumeration_value: count_pairs(&balanced, &balanced, mask),
    })
}

/// Pairs (weight `L/2`, weight `L/2 + 1`) whose XOR is the weight-`(2n - 1)` mask.
pub fn count_mixed_pairs(l: usize, n: usize) -> Result<DuplicationCount> {
    check_l(l)?;
    let h = l / 2;
    if n == 0 {
        return Err(Error::Domain("mixed pairs need n >= 1".into()));
    }
    if n > h {
        return Err(Error::IndexOutOfRange { k: n, l });
    }
    let balanced = with_weight(l, h as u32);
    let raised = with_weight(l, h as u32 + 1);
    let mask = (1u32 << (2 * n - 1)) - 1;
    let formula_value = BigRational::new(
        big_binom(l, h) * big_binom(h, n - 1) * big_binom(h, n),
        big_binom(l, 2 * n - 1),
    );
    Ok(DuplicationCount {
        l,
        n,
        formula_value,
        enumeration_value: count_pairs(&balanced, &raised, mask),
    })
}

/// `(sum_n C(L/2, n)^2, C(L, L/2))`.
pub fn binomial_square_sum(l: usize) -> Result<(BigInt, BigInt)> {
    check_l(l)?;
    let h = l / 2;
    let lhs = (0..=h).map(|n| big_binom(h, n) * big_binom(h, n)).sum();
    Ok((lhs, big_binom(l, h)))
}
