//! Integer fast path: tuples whose entries are `count / denominator`.
//! Each rational threshold `T` is replaced by the exact floor or ceiling of
//! `T * denominator`, so every comparison is one integer comparison.

use num_traits::ToPrimitive;

use super::lemmas::LemmaBounds;
use crate::error::{Error, Result};
use crate::rational::{int, Rational};

/// Longest tuple the fast path accepts.
pub const GRID_MAX_LEN: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridBounds {
    pub denominator: u64,
    /// `x < cap` iff `count < largest_ceil`.
    largest_ceil: u64,
    /// In band iff `band_lo_ceil <= count <= band_hi_floor`.
    band_lo_ceil: u64,
    band_hi_floor: u64,
    /// `x >= 1/5 - 2η` iff `count >= small_ceil`.
    small_ceil: u64,
    second_cap_ceil: u64,
    third_floor: u64,
    /// Width of the boundary layer in counts.
    near: u64,
}

fn scaled(x: &Rational, d: u64) -> Result<(u64, u64)> {
    let y = x * int(d as i64);
    let f = y.floor().to_integer().to_u64();
    let c = y.ceil().to_integer().to_u64();
    match (f, c) {
        (Some(f), Some(c)) => Ok((f, c)),
        _ => Err(Error::Input(format!("threshold {x} out of grid range"))),
    }
}

/// Result of the fast premise check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct GridVerdict {
    pub premises_hold: bool,
    pub conclusion_holds: bool,
    /// Some nonempty subset sum, or the largest entry, lies within the
    /// boundary layer outside an excluded region.
    pub near_boundary: bool,
}

impl GridBounds {
    /// `near_width` is the boundary-layer width as a fraction of 1.
    pub fn new(eta: &Rational, denominator: u64, near_width: &Rational) -> Result<Self> {
        let b = LemmaBounds::new(eta);
        let d = denominator;
        Ok(GridBounds {
            denominator: d,
            largest_ceil: scaled(&b.largest_cap, d)?.1,
            band_lo_ceil: scaled(&b.band_lo, d)?.1,
            band_hi_floor: scaled(&b.band_hi, d)?.0,
            small_ceil: scaled(&b.small, d)?.1,
            second_cap_ceil: scaled(&b.second_cap, d)?.1,
            third_floor: d / 3,
            near: scaled(near_width, d)?.0,
        })
    }

    /// `gamma` sorted nonincreasing, at most [`GRID_MAX_LEN`] entries.
    pub(crate) fn sorted_premises(&self, gamma: &[u64]) -> (bool, bool) {
        let at = |j: usize| gamma.get(j - 1).copied().unwrap_or(0);
        let near_cap = at(1) < self.largest_ceil && at(1) + self.near >= self.largest_ceil;
        if at(1) >= self.largest_ceil {
            return (false, near_cap);
        }
        if !(at(3) < self.small_ceil || at(2) + at(3) < self.band_lo_ceil) {
            return (false, near_cap);
        }
        let mut near = near_cap;
        let t = gamma.len();
        let mut sums = [0u64; 1 << GRID_MAX_LEN];
        for mask in 1usize..1 << t {
            let low = mask.trailing_zeros() as usize;
            let s = sums[mask & (mask - 1)] + gamma[low];
            sums[mask] = s;
            if self.band_lo_ceil <= s && s <= self.band_hi_floor {
                return (false, near);
            }
            near |= s + self.near >= self.band_lo_ceil && s < self.band_lo_ceil
                || s > self.band_hi_floor && s <= self.band_hi_floor + self.near;
        }
        (true, near)
    }

    pub(crate) fn sorted_tuple(&self, gamma: &[u64]) -> GridVerdict {
        let (premises_hold, near_boundary) = self.sorted_premises(gamma);
        let t = gamma.len();
        let conclusion_holds = t >= 5 && gamma[4] >= self.small_ceil && {
            let rest: u64 = gamma[5..].iter().sum();
            gamma[0] + gamma[1] + rest < self.band_lo_ceil
        };
        GridVerdict {
            premises_hold,
            conclusion_holds,
            near_boundary,
        }
    }

    /// `None` when the block sums violate the ordering hypotheses.
    pub(crate) fn split_tuple(&self, blocks: [&[u64]; 3]) -> Option<GridVerdict> {
        let a1: u64 = blocks[0].iter().sum();
        let a2: u64 = blocks[1].iter().sum();
        let valid = self.small_ceil <= a2 && a2 < a1 && a1 < self.band_lo_ceil && a2 <= self.third_floor;
        if !valid {
            return None;
        }
        let mut merged: Vec<u64> = blocks.iter().flat_map(|b| b.iter().copied()).collect();
        merged.sort_unstable_by(|a, b| b.cmp(a));
        let (premises_hold, near_boundary) = self.sorted_premises(&merged);
        let pair = a1 + a2;
        let conclusion_holds =
            pair < self.band_lo_ceil || (pair > self.band_hi_floor && a2 < self.second_cap_ceil);
        Some(GridVerdict {
            premises_hold,
            conclusion_holds,
            near_boundary,
        })
    }
}
