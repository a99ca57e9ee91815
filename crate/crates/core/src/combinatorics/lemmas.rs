use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{is_positive, rat, Rational};

/// Largest tuple length accepted by the subset-sum enumeration.
pub const MAX_SUBSET_LEN: usize = 20;

/// Upper end of the open η range on which the lemmas are stated.
pub fn lemma_eta_cap() -> Rational {
    rat(82, 5395)
}

/// Positive values sorted nonincreasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedTuple {
    values: Vec<Rational>,
}

impl OrderedTuple {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Input("empty tuple".into()));
        }
        if values.iter().any(|v| !is_positive(v)) {
            return Err(Error::Input("tuple entries must be positive".into()));
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Input("tuple must be sorted nonincreasing".into()));
        }
        Ok(OrderedTuple { values })
    }

    /// Sorts then validates.
    pub fn from_unsorted(mut values: Vec<Rational>) -> Result<Self> {
        values.sort_by(|a, b| b.cmp(a));
        Self::new(values)
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> Rational {
        self.values.iter().fold(Rational::zero(), |a, v| a + v)
    }

    /// 1-based; entries past the end read as zero.
    pub fn get(&self, j: usize) -> Rational {
        self.values.get(j - 1).cloned().unwrap_or_else(Rational::zero)
    }
}

/// Three consecutive nonincreasing blocks whose sums are the two leading
/// parts and the remainder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionedTuple {
    beta: Vec<Rational>,
    r: usize,
    s: usize,
}

impl PartitionedTuple {
    /// Checks the structural invariants: nonempty blocks of positive,
    /// internally nonincreasing entries summing to 1.
    pub fn new(first: Vec<Rational>, second: Vec<Rational>, rest: Vec<Rational>) -> Result<Self> {
        for (name, block) in [("first", &first), ("second", &second), ("rest", &rest)] {
            if block.is_empty() {
                return Err(Error::Input(format!("{name} block is empty")));
            }
            if block.iter().any(|v| !is_positive(v)) {
                return Err(Error::Input(format!("{name} block has a nonpositive entry")));
            }
            if block.windows(2).any(|w| w[0] < w[1]) {
                return Err(Error::Input(format!("{name} block is not nonincreasing")));
            }
        }
        let r = first.len();
        let s = r + second.len();
        let mut beta = first;
        beta.extend(second);
        beta.extend(rest);
        let pt = PartitionedTuple { beta, r, s };
        if pt.total() != Rational::one() {
            return Err(Error::Input("blocks must sum to 1".into()));
        }
        Ok(pt)
    }

    pub fn beta(&self) -> &[Rational] {
        &self.beta
    }

    /// Block boundaries: the first block is `beta[..r]`, the second `beta[r..s]`.
    pub fn boundaries(&self) -> (usize, usize) {
        (self.r, self.s)
    }

    pub fn blocks(&self) -> [&[Rational]; 3] {
        [&self.beta[..self.r], &self.beta[self.r..self.s], &self.beta[self.s..]]
    }

    pub fn alpha1(&self) -> Rational {
        sum(&self.beta[..self.r])
    }

    pub fn alpha2(&self) -> Rational {
        sum(&self.beta[self.r..self.s])
    }

    fn total(&self) -> Rational {
        sum(&self.beta)
    }

    /// All entries merged and sorted nonincreasing.
    pub fn merged(&self) -> OrderedTuple {
        let mut v = self.beta.clone();
        v.sort_by(|a, b| b.cmp(a));
        OrderedTuple { values: v }
    }
}

fn sum(v: &[Rational]) -> Rational {
    v.iter().fold(Rational::zero(), |a, x| a + x)
}

/// The η-dependent constants that appear in the lemmas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaBounds {
    /// Strict cap on the largest entry.
    pub largest_cap: Rational,
    /// Closed forbidden band `[band_lo, band_hi]` for subset sums.
    pub band_lo: Rational,
    pub band_hi: Rational,
    /// `1/5 - 2η`.
    pub small: Rational,
    /// Strict cap on the second part in the upper branch of the
    /// partitioned conclusion.
    pub second_cap: Rational,
}

impl LemmaBounds {
    pub fn new(eta: &Rational) -> Self {
        LemmaBounds {
            largest_cap: rat(199, 600) + rat(119, 240) * eta,
            band_lo: rat(2, 5) + eta,
            band_hi: rat(3, 5) - eta,
            small: rat(1, 5) - rat(2, 1) * eta,
            second_cap: rat(1, 5) + rat(4, 3) * eta,
        }
    }

    pub fn in_band(&self, x: &Rational) -> bool {
        &self.band_lo <= x && x <= &self.band_hi
    }
}

fn check_eta(eta: &Rational) -> Result<()> {
    if eta <= &Rational::zero() || eta >= &lemma_eta_cap() {
        return Err(Error::Input(format!("eta = {eta} outside (0, 82/5395)")));
    }
    Ok(())
}

fn gap_free(values: &[Rational], bounds: &LemmaBounds) -> Result<bool> {
    let t = values.len();
    if t > MAX_SUBSET_LEN {
        return Err(Error::Input(format!("tuple length {t} exceeds {MAX_SUBSET_LEN}")));
    }
    let mut sums = vec![Rational::zero(); 1 << t];
    for mask in 1usize..1 << t {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = &sums[mask & (mask - 1)] + &values[low];
        if bounds.in_band(&sums[mask]) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff no nonempty subset sum lies in `[2/5 + η, 3/5 - η]`.
pub fn subset_sum_gap_free(gamma: &OrderedTuple, eta: &Rational) -> Result<bool> {
    gap_free(gamma.values(), &LemmaBounds::new(eta))
}

/// Outcome of an instance check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub premises_hold: bool,
    pub conclusion_holds: bool,
}

impl Verdict {
    pub fn is_counterexample(&self) -> bool {
        self.premises_hold && !self.conclusion_holds
    }
}

fn premises(g: &OrderedTuple, b: &LemmaBounds) -> Result<bool> {
    if g.get(1) >= b.largest_cap {
        return Ok(false);
    }
    let third_clause = g.get(3) < b.small || g.get(2) + g.get(3) < b.band_lo;
    if !third_clause {
        return Ok(false);
    }
    gap_free(g.values(), b)
}

/// Evaluates the sorted-tuple lemma on one instance.
pub fn lemma2_check(gamma: &OrderedTuple, eta: &Rational) -> Result<Verdict> {
    check_eta(eta)?;
    if gamma.sum() != Rational::one() {
        return Err(Error::Input("tuple must sum to 1".into()));
    }
    let b = LemmaBounds::new(eta);
    let premises_hold = premises(gamma, &b)?;
    let t = gamma.len();
    let conclusion_holds = t >= 5 && gamma.get(5) >= b.small && {
        let head = gamma.get(1) + gamma.get(2);
        let tail = sum(&gamma.values()[5.min(t)..]);
        head + tail < b.band_lo
    };
    Ok(Verdict {
        premises_hold,
        conclusion_holds,
    })
}

/// Evaluates the partitioned lemma on one instance.
pub fn lemma3_check(pt: &PartitionedTuple, eta: &Rational) -> Result<Verdict> {
    check_eta(eta)?;
    let b = LemmaBounds::new(eta);
    let a1 = pt.alpha1();
    let a2 = pt.alpha2();
    if !(b.small <= a2 && a2 < a1 && a1 < b.band_lo) {
        return Err(Error::Input(format!(
            "need 1/5 - 2eta <= alpha2 < alpha1 < 2/5 + eta, got alpha1 = {a1}, alpha2 = {a2}"
        )));
    }
    if a2 > rat(1, 3) {
        return Err(Error::Input(format!("alpha2 = {a2} exceeds 1/3")));
    }
    let premises_hold = premises(&pt.merged(), &b)?;
    let pair = &a1 + &a2;
    let conclusion_holds = pair < b.band_lo || (pair > b.band_hi && a2 < b.second_cap);
    Ok(Verdict {
        premises_hold,
        conclusion_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use proptest::prelude::*;

    fn tuple(v: &[(i64, i64)]) -> OrderedTuple {
        OrderedTuple::new(v.iter().map(|&(p, q)| rat(p, q)).collect()).unwrap()
    }

    #[test]
    fn gap_free_examples() {
        let eta = rat(1, 100);
        assert!(!subset_sum_gap_free(&tuple(&[(1, 2), (1, 2)]), &eta).unwrap());
        assert!(subset_sum_gap_free(&tuple(&[(1, 1)]), &eta).unwrap());
        assert!(subset_sum_gap_free(&tuple(&[(1, 1)]), &rat(99, 1000)).unwrap());
        assert!(subset_sum_gap_free(&tuple(&[(39, 100), (31, 100), (30, 100)]), &eta).unwrap());
    }

    #[test]
    fn band_is_closed() {
        // 41/100 sits exactly on the lower edge at eta = 1/100.
        let g = tuple(&[(41, 100), (30, 100), (29, 100)]);
        assert!(!subset_sum_gap_free(&g, &rat(1, 100)).unwrap());
    }

    #[test]
    fn length_guard() {
        let g = OrderedTuple::new(vec![rat(1, 21); 21]).unwrap();
        assert!(subset_sum_gap_free(&g, &rat(1, 100)).is_err());
    }

    #[test]
    fn tuple_validation() {
        assert!(OrderedTuple::new(vec![]).is_err());
        assert!(OrderedTuple::new(vec![rat(1, 3), rat(2, 3)]).is_err());
        assert!(OrderedTuple::new(vec![int(1), int(0)]).is_err());
        let t = OrderedTuple::from_unsorted(vec![rat(1, 3), rat(2, 3)]).unwrap();
        assert_eq!(t.values(), &[rat(2, 3), rat(1, 3)]);
        assert_eq!(t.get(3), int(0));
    }

    #[test]
    fn sorted_tuple_examples() {
        let eta = rat(1, 1000);
        let fifths = tuple(&[(1, 5); 5]);
        let v = lemma2_check(&fifths, &eta).unwrap();
        assert!(v.premises_hold && v.conclusion_holds);
        let halves = tuple(&[(1, 2), (1, 2)]);
        assert!(!lemma2_check(&halves, &eta).unwrap().premises_hold);
    }

    #[test]
    fn sorted_tuple_preconditions() {
        let fifths = tuple(&[(1, 5); 5]);
        assert!(lemma2_check(&fifths, &int(0)).is_err());
        assert!(lemma2_check(&fifths, &rat(82, 5395)).is_err());
        assert!(lemma2_check(&fifths, &rat(1, 1000)).is_ok());
        assert!(lemma2_check(&tuple(&[(1, 5); 4]), &rat(1, 1000)).is_err());
    }

    #[test]
    fn sorted_tuple_needs_five_parts() {
        // Premise (a) fails for every short tuple, but the conclusion is
        // evaluated independently and must be false.
        let g = tuple(&[(1, 4); 4]);
        let v = lemma2_check(&g, &rat(1, 1000)).unwrap();
        assert!(!v.conclusion_holds);
    }

    #[test]
    fn sorted_tuple_pair_and_tail_premise() {
        let eta = rat(1, 1000);
        // Six parts of 1/6: (a) holds, no subset sum of k/6 hits
        // [0.401, 0.599] except 3/6, so (b) fails.
        let sixths = OrderedTuple::new(vec![rat(1, 6); 6]).unwrap();
        assert!(!lemma2_check(&sixths, &eta).unwrap().premises_hold);
    }

    #[test]
    fn split_tuple_examples() {
        let eta = rat(1, 1000);
        let bad = PartitionedTuple::new(vec![rat(1, 5)], vec![rat(1, 5)], vec![rat(3, 5)]).unwrap();
        assert!(matches!(lemma3_check(&bad, &eta), Err(Error::Input(_))));

        let pt = PartitionedTuple::new(
            vec![rat(21, 100)],
            vec![rat(1, 5)],
            vec![rat(3, 10), rat(29, 100)],
        )
        .unwrap();
        let v = lemma3_check(&pt, &eta).unwrap();
        // 21/100 + 29/100 = 1/2 lies in the band, so (b) fails.
        assert!(!v.premises_hold);
        // alpha1 + alpha2 = 41/100 >= 2/5 + eta and <= 3/5 - eta.
        assert!(!v.conclusion_holds);
        assert!(!v.is_counterexample());
    }

    #[test]
    fn split_tuple_positive_instance() {
        let eta = rat(1, 1000);
        // Five near-fifths: {1/5 + 1/2000}, {1/5 - 1/2000}, three fifths.
        let pt = PartitionedTuple::new(
            vec![rat(2005, 10000)],
            vec![rat(1995, 10000)],
            vec![rat(1, 5), rat(1, 5), rat(1, 5)],
        )
        .unwrap();
        let v = lemma3_check(&pt, &eta).unwrap();
        assert!(v.premises_hold);
        assert!(v.conclusion_holds);
    }

    #[test]
    fn partition_structure() {
        assert!(PartitionedTuple::new(vec![], vec![rat(1, 2)], vec![rat(1, 2)]).is_err());
        assert!(PartitionedTuple::new(vec![rat(1, 5), rat(1, 4)], vec![rat(1, 5)], vec![rat(7, 20)]).is_err());
        assert!(PartitionedTuple::new(vec![rat(1, 5)], vec![rat(1, 5)], vec![rat(1, 2)]).is_err());
        let pt = PartitionedTuple::new(
            vec![rat(1, 4), rat(1, 8)],
            vec![rat(1, 4)],
            vec![rat(3, 8)],
        )
        .unwrap();
        assert_eq!(pt.boundaries(), (2, 3));
        assert_eq!(pt.alpha1(), rat(3, 8));
        assert_eq!(pt.merged().values()[0], rat(3, 8));
    }

    #[test]
    fn split_tuple_second_lead_cap() {
        let eta = rat(1, 100);
        // alpha2 = 17/50 > 1/3 but alpha1 = 41/100 - 1/1000 keeps the rest valid.
        let pt = PartitionedTuple::new(vec![rat(409, 1000)], vec![rat(340, 1000)], vec![rat(251, 1000)]).unwrap();
        assert!(lemma3_check(&pt, &eta).is_err());
    }

    fn gap_free_brute(v: &[Rational], lo: &Rational, hi: &Rational) -> bool {
        // Independent enumeration by explicit subsets.
        let t = v.len();
        (1u32..(1 << t)).all(|m| {
            let s = (0..t).filter(|i| m >> i & 1 == 1).fold(Rational::zero(), |a, i| a + &v[i]);
            !(lo <= &s && &s <= hi)
        })
    }

    proptest! {
        #[test]
        fn gap_free_monotone_in_band(
            raw in proptest::collection::vec(1i64..1000, 1..9),
            e1 in 1i64..99, de in 0i64..50,
        ) {
            let total: i64 = raw.iter().sum();
            let g = OrderedTuple::from_unsorted(raw.iter().map(|&x| rat(x, total)).collect()).unwrap();
            let eta = rat(e1, 1000);
            let eta2 = rat(e1 + de, 1000);
            let b = LemmaBounds::new(&eta);
            prop_assert_eq!(subset_sum_gap_free(&g, &eta).unwrap(), gap_free_brute(g.values(), &b.band_lo, &b.band_hi));
            if subset_sum_gap_free(&g, &eta).unwrap() {
                prop_assert!(subset_sum_gap_free(&g, &eta2).unwrap());
            }
        }
    }
}
