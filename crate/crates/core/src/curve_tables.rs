//! Genus bands and hyperelliptic status of X0(N) (Ogg's classification), and
//! the dimension counts used by the monomial method.

use serde::{Deserialize, Serialize};

const GENUS_ZERO: &[u64] = &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 13, 16, 18, 25];
const GENUS_ONE: &[u64] = &[11, 14, 15, 17, 19, 20, 21, 24, 27, 32, 36, 49];
// Non-hyperelliptic levels below 72; every N >= 72 is non-hyperelliptic.
const NON_HYPERELLIPTIC_BELOW_72: &[u64] = &[
    34, 38, 42, 43, 44, 45, 51, 52, 53, 54, 55, 56, 57, 58, 60, 61, 62, 63, 64, 65, 66, 67, 68, 69,
    70,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenusBand {
    Zero,
    One,
    AtLeastTwo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CurveClass {
    pub level: u64,
    pub genus_band: GenusBand,
    /// Only meaningful for `GenusBand::AtLeastTwo`.
    pub nonhyperelliptic: bool,
}

impl CurveClass {
    pub fn is_hyperelliptic(&self) -> bool {
        self.genus_band == GenusBand::AtLeastTwo && !self.nonhyperelliptic
    }
}

pub fn classify(level: u64) -> CurveClass {
    assert!(level >= 1, "level must be positive");
    let genus_band = if GENUS_ZERO.contains(&level) {
        GenusBand::Zero
    } else if GENUS_ONE.contains(&level) {
        GenusBand::One
    } else {
        GenusBand::AtLeastTwo
    };
    let nonhyperelliptic = genus_band == GenusBand::AtLeastTwo
        && (level >= 72 || NON_HYPERELLIPTIC_BELOW_72.contains(&level));
    CurveClass {
        level,
        genus_band,
        nonhyperelliptic,
    }
}

/// Dimension of the space of cusp forms of weight `m` corresponding to
/// holomorphic `m/2`-differentials.
pub fn dim_smh(genus: usize, m: u32) -> usize {
    assert!(m >= 2 && m.is_multiple_of(2), "weight must be even and at least 2");
    match (genus, m) {
        (0, _) => 0,
        (g, 2) => g,
        (1, _) => 1,
        (g, m) => (m as usize - 1) * (g - 1),
    }
}

/// Number of degree-`m/2` monomials in `genus` generators.
pub fn monomial_count(genus: usize, m: u32) -> usize {
    assert!(genus >= 1, "monomials need at least one generator");
    assert!(m >= 2 && m.is_multiple_of(2), "weight must be even and at least 2");
    binomial(genus + m as usize / 2 - 1, m as usize / 2)
}

fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}
