use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::grid::{GridBounds, GridVerdict, GRID_MAX_LEN};
use super::lemmas::{
    lemma2_check, lemma3_check, lemma_eta_cap, LemmaBounds, OrderedTuple, PartitionedTuple, Verdict,
};
use crate::error::{Error, Result};
use crate::polytope::montecarlo::sharded;
use crate::rational::{rat, to_exact_string, to_f64, Rational};

/// Samples are snapped to multiples of `1 / GRID_DENOMINATOR`.
pub const GRID_DENOMINATOR: u64 = 1_000_000;

/// Boundary layer width used for stratified draws and for counting
/// near-boundary hits.
const NEAR: f64 = 1e-3;

/// Per-shard draw budget, as a multiple of the shard's hit target.
const DRAWS_PER_HIT: u64 = 400;

const MAX_BLOCK_PARTS: usize = 3;

/// A premise-satisfying instance whose conclusion fails, confirmed with
/// exact arithmetic. Entries are exact `p/q` strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub gamma: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<Vec<String>>>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FalsifyReport {
    pub lemma: u8,
    pub eta: String,
    pub seed: u64,
    /// Requested number of premise-satisfying samples.
    pub target: u64,
    pub draws: u64,
    pub premise_hits: u64,
    /// Premise-satisfying samples with the largest entry or some subset sum
    /// within `1e-3` of an excluded region.
    pub boundary_hits: u64,
    pub counterexample: Option<Counterexample>,
}

impl FalsifyReport {
    pub fn reached_target(&self) -> bool {
        self.premise_hits >= self.target
    }

    pub fn passed(&self) -> bool {
        self.counterexample.is_none() && self.reached_target()
    }
}

#[derive(Default)]
struct Tally {
    draws: u64,
    hits: u64,
    boundary: u64,
    counterexample: Option<Counterexample>,
}

fn merge(eta: &Rational, lemma: u8, seed: u64, target: u64, shards: Vec<Result<Tally>>) -> Result<FalsifyReport> {
    let mut report = FalsifyReport {
        lemma,
        eta: to_exact_string(eta),
        seed,
        target,
        draws: 0,
        premise_hits: 0,
        boundary_hits: 0,
        counterexample: None,
    };
    for shard in shards {
        let s = shard?;
        report.draws += s.draws;
        report.premise_hits += s.hits;
        report.boundary_hits += s.boundary;
        if report.counterexample.is_none() {
            report.counterexample = s.counterexample;
        }
    }
    Ok(report)
}

fn check_eta(eta: &Rational) -> Result<()> {
    if eta <= &rat(0, 1) || eta >= &lemma_eta_cap() {
        return Err(Error::Input(format!("eta = {eta} outside (0, 82/5395)")));
    }
    Ok(())
}

fn grid_bounds(eta: &Rational) -> Result<GridBounds> {
    GridBounds::new(eta, GRID_DENOMINATOR, &rat(1, 1000))
}

fn on_grid(counts: &[u64]) -> Vec<Rational> {
    counts
        .iter()
        .map(|&c| rat(c as i64, GRID_DENOMINATOR as i64))
        .collect()
}

/// Largest-remainder rounding of `weights` onto counts summing to `total`.
/// `None` if any count would be zero.
pub(crate) fn snap(weights: &[f64], total: u64) -> Option<Vec<u64>> {
    let w: f64 = weights.iter().sum();
    if !(w.is_finite() && w > 0.0) {
        return None;
    }
    let raw: Vec<f64> = weights.iter().map(|x| x / w * total as f64).collect();
    let mut counts: Vec<u64> = raw.iter().map(|x| x.floor() as u64).collect();
    let assigned: u64 = counts.iter().sum();
    if assigned > total {
        return None;
    }
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = raw[a] - raw[a].floor();
        let fb = raw[b] - raw[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().cycle().take((total - assigned) as usize) {
        counts[i] += 1;
    }
    if counts.contains(&0) {
        return None;
    }
    Some(counts)
}

/// Float copies of the thresholds, used only to steer sampling.
struct Steer {
    eta: f64,
    cap: f64,
    lo: f64,
    hi: f64,
    small: f64,
}

impl Steer {
    fn new(eta: &Rational) -> Self {
        let b = LemmaBounds::new(eta);
        Steer {
            eta: to_f64(eta),
            cap: to_f64(&b.largest_cap),
            lo: to_f64(&b.band_lo),
            hi: to_f64(&b.band_hi),
            small: to_f64(&b.small),
        }
    }

    fn uniform(&self, rng: &mut ChaCha8Rng, t: usize) -> Vec<f64> {
        (0..t).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect()
    }

    /// Five entries near 1/5 (first) plus a light tail; short tuples are
    /// near-equal. Premise-satisfying tuples all have this shape: five
    /// nearly equal parts whose top pair plus tail stays under the band.
    fn near_fifths(&self, rng: &mut ChaCha8Rng, t: usize) -> Vec<f64> {
        if t < 5 {
            return (0..t).map(|_| 1.0 / t as f64 + rng.gen_range(-0.02..0.02)).collect();
        }
        let tail_mass = if t > 5 { rng.gen_range(0.0..1.2 * self.eta) } else { 0.0 };
        let d: Vec<f64> = (0..5).map(|_| rng.gen_range(-0.75..0.75)).collect();
        let mean = d.iter().sum::<f64>() / 5.0;
        let mut v: Vec<f64> = d
            .iter()
            .map(|x| (1.0 - tail_mass) / 5.0 + self.eta * (x - mean))
            .collect();
        let tail = self.uniform(rng, t - 5);
        let tail_sum: f64 = tail.iter().sum();
        v.extend(tail.iter().map(|x| x / tail_sum * tail_mass));
        v
    }

    /// Rescales so that the two largest of the five leading parts plus the
    /// whole tail sit just below the lower band edge.
    fn pair_to_band_edge(&self, rng: &mut ChaCha8Rng, v: &mut [f64]) {
        if v.len() < 5 {
            return self.random_to_band_edge(rng, v);
        }
        let mut lead: Vec<usize> = (0..5).collect();
        lead.sort_by(|&a, &b| v[b].total_cmp(&v[a]));
        let mut mask: u32 = (1 << lead[0]) | (1 << lead[1]);
        for i in 5..v.len() {
            mask |= 1 << i;
        }
        let target = self.lo - rng.gen_range(0.0..NEAR);
        rescale(v, mask, target);
    }

    /// Rescales a random subset so its sum sits just outside one band edge.
    fn random_to_band_edge(&self, rng: &mut ChaCha8Rng, v: &mut [f64]) {
        let t = v.len();
        let mask = rng.gen_range(1u32..(1 << t) - 1);
        let delta = rng.gen_range(0.0..NEAR);
        let target = if rng.gen_bool(0.5) { self.lo - delta } else { self.hi + delta };
        rescale(v, mask, target);
    }

    /// Largest entry just below its cap, the rest uniform.
    fn largest_at_cap(&self, rng: &mut ChaCha8Rng, t: usize) -> Vec<f64> {
        let top = self.cap - rng.gen_range(0.0..NEAR);
        let rest = self.uniform(rng, t - 1);
        let rs: f64 = rest.iter().sum();
        std::iter::once(top).chain(rest.iter().map(|x| x / rs * (1.0 - top))).collect()
    }

    /// The two leading block sums drawn directly from their ranges.
    fn leading_sums(&self, rng: &mut ChaCha8Rng) -> [f64; 3] {
        let a2 = rng.gen_range(self.small..(1.0 / 3.0f64).min(self.lo));
        let a1 = rng.gen_range(a2..self.lo);
        [a1, a2, 1.0 - a1 - a2]
    }
}

fn rescale(v: &mut [f64], mask: u32, target: f64) {
    let s: f64 = (0..v.len()).filter(|i| mask >> i & 1 == 1).map(|i| v[i]).sum();
    for (i, x) in v.iter_mut().enumerate() {
        *x *= if mask >> i & 1 == 1 { target / s } else { (1.0 - target) / (1.0 - s) };
    }
}

fn sorted_desc(mut v: Vec<u64>) -> Vec<u64> {
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

fn sorted_draw(steer: &Steer, rng: &mut ChaCha8Rng, k: u64, t_min: usize, t_max: usize) -> Option<Vec<u64>> {
    let t = rng.gen_range(t_min..=t_max);
    let w = match k % 8 {
        0 => steer.uniform(rng, t),
        1..=3 => steer.near_fifths(rng, t),
        4..=5 => {
            let mut v = steer.near_fifths(rng, t);
            steer.pair_to_band_edge(rng, &mut v);
            v
        }
        6 => {
            let mut v = steer.near_fifths(rng, t);
            steer.random_to_band_edge(rng, &mut v);
            v
        }
        _ => steer.largest_at_cap(rng, t),
    };
    snap(&w, GRID_DENOMINATOR).map(sorted_desc)
}

fn split_blocks(rng: &mut ChaCha8Rng, mut counts: Vec<u64>) -> Option<[Vec<u64>; 3]> {
    let t = counts.len();
    counts.shuffle(rng);
    let (s1, s2) = loop {
        let s1 = rng.gen_range(1..=MAX_BLOCK_PARTS);
        let s2 = rng.gen_range(1..=MAX_BLOCK_PARTS);
        if s1 + s2 < t && t - s1 - s2 <= MAX_BLOCK_PARTS {
            break (s1, s2);
        }
    };
    let rest = counts.split_off(s1 + s2);
    let second = counts.split_off(s1);
    let mut blocks = [sorted_desc(counts), sorted_desc(second), sorted_desc(rest)];
    if blocks[0].iter().sum::<u64>() < blocks[1].iter().sum::<u64>() {
        blocks.swap(0, 1);
    }
    Some(blocks)
}

/// Puts one or two of the five leading parts in the first block, one in
/// the second, the rest in the third, and scatters the tail so that no
/// block exceeds three parts.
fn structured_blocks(rng: &mut ChaCha8Rng, counts: &[u64]) -> [Vec<u64>; 3] {
    let mut lead: Vec<u64> = counts[..5].to_vec();
    lead.shuffle(rng);
    let first_lead = rng.gen_range(1..=2);
    let mut blocks = [
        lead[..first_lead].to_vec(),
        lead[first_lead..first_lead + 1].to_vec(),
        lead[first_lead + 1..].to_vec(),
    ];
    for &c in &counts[5..] {
        let open: Vec<usize> = (0..3).filter(|&b| blocks[b].len() < MAX_BLOCK_PARTS).collect();
        blocks[*open.choose(rng).expect("tail fits in three blocks of three")].push(c);
    }
    blocks.map(sorted_desc)
}

fn split_draw(steer: &Steer, rng: &mut ChaCha8Rng, k: u64) -> Option<[Vec<u64>; 3]> {
    match k % 4 {
        0 => {
            let sums = snap(&steer.leading_sums(rng), GRID_DENOMINATOR)?;
            let mut blocks: [Vec<u64>; 3] = Default::default();
            for (b, &total) in blocks.iter_mut().zip(&sums) {
                let parts = rng.gen_range(1..=MAX_BLOCK_PARTS);
                *b = sorted_desc(snap(&steer.uniform(rng, parts), total)?);
            }
            Some(blocks)
        }
        1 | 2 => {
            let t = rng.gen_range(5..=3 * MAX_BLOCK_PARTS);
            let mut w = steer.near_fifths(rng, t);
            if k % 4 == 2 {
                steer.pair_to_band_edge(rng, &mut w);
            }
            let mut blocks = structured_blocks(rng, &snap(&w, GRID_DENOMINATOR)?);
            if blocks[0].iter().sum::<u64>() < blocks[1].iter().sum::<u64>() {
                blocks.swap(0, 1);
            }
            Some(blocks)
        }
        _ => {
            let t = rng.gen_range(3..=3 * MAX_BLOCK_PARTS);
            let mut w = steer.near_fifths(rng, t);
            steer.random_to_band_edge(rng, &mut w);
            split_blocks(rng, snap(&w, GRID_DENOMINATOR)?)
        }
    }
}

fn confirm_sorted(gamma: &[u64], eta: &Rational) -> Result<Counterexample> {
    let tuple = OrderedTuple::new(on_grid(gamma))?;
    let verdict = lemma2_check(&tuple, eta)?;
    if !verdict.is_counterexample() {
        return Err(Error::Certification(
            "fast path flagged an instance the exact check rejects".into(),
        ));
    }
    Ok(Counterexample {
        gamma: tuple.values().iter().map(to_exact_string).collect(),
        blocks: None,
        verdict,
    })
}

fn confirm_split(blocks: &[Vec<u64>; 3], eta: &Rational) -> Result<Counterexample> {
    let pt = PartitionedTuple::new(on_grid(&blocks[0]), on_grid(&blocks[1]), on_grid(&blocks[2]))?;
    let verdict = lemma3_check(&pt, eta)?;
    if !verdict.is_counterexample() {
        return Err(Error::Certification(
            "fast path flagged an instance the exact check rejects".into(),
        ));
    }
    Ok(Counterexample {
        gamma: pt.merged().values().iter().map(to_exact_string).collect(),
        blocks: Some(
            pt.blocks()
                .iter()
                .map(|b| b.iter().map(to_exact_string).collect())
                .collect(),
        ),
        verdict,
    })
}

fn run_shard<S, D, C>(rng: &mut ChaCha8Rng, target: u64, draw: D, confirm: C) -> Result<Tally>
where
    D: Fn(&mut ChaCha8Rng, u64) -> Option<(S, GridVerdict)>,
    C: Fn(&S) -> Result<Counterexample>,
{
    let mut tally = Tally::default();
    let budget = target.saturating_mul(DRAWS_PER_HIT);
    while tally.hits < target && tally.draws < budget {
        let k = tally.draws;
        tally.draws += 1;
        let Some((sample, v)) = draw(rng, k) else { continue };
        if !v.premises_hold {
            continue;
        }
        tally.hits += 1;
        tally.boundary += u64::from(v.near_boundary);
        if !v.conclusion_holds {
            tally.counterexample = Some(confirm(&sample)?);
            break;
        }
    }
    Ok(tally)
}

/// Randomized search for a sorted tuple satisfying the premises of the
/// sorted-tuple lemma but not its conclusion. Runs until `n_samples`
/// premise-satisfying tuples have been checked, a counterexample is found,
/// or the draw budget is spent.
pub fn falsify_lemma2(
    eta: &Rational,
    t_min: usize,
    t_max: usize,
    n_samples: u64,
    seed: u64,
) -> Result<FalsifyReport> {
    check_eta(eta)?;
    if !(3 <= t_min && t_min <= t_max && t_max <= GRID_MAX_LEN) {
        return Err(Error::Input(format!(
            "need 3 <= t_min <= t_max <= {GRID_MAX_LEN}, got {t_min}..{t_max}"
        )));
    }
    let grid = grid_bounds(eta)?;
    let steer = Steer::new(eta);
    let shards = sharded(n_samples, seed, |rng, target| {
        run_shard(
            rng,
            target,
            |rng, k| {
                let g = sorted_draw(&steer, rng, k, t_min, t_max)?;
                let v = grid.sorted_tuple(&g);
                Some((g, v))
            },
            |g| confirm_sorted(g, eta),
        )
    });
    merge(eta, 2, seed, n_samples, shards)
}

/// Randomized search for a three-block partition satisfying the premises
/// of the partitioned lemma but not its conclusion. Blocks are refined into
/// at most three parts each.
pub fn falsify_lemma3(eta: &Rational, n_samples: u64, seed: u64) -> Result<FalsifyReport> {
    check_eta(eta)?;
    let grid = grid_bounds(eta)?;
    let steer = Steer::new(eta);
    let shards = sharded(n_samples, seed, |rng, target| {
        run_shard(
            rng,
            target,
            |rng, k| {
                let b = split_draw(&steer, rng, k)?;
                let v = grid.split_tuple([&b[0], &b[1], &b[2]])?;
                Some((b, v))
            },
            |b| confirm_split(b, eta),
        )
    });
    merge(eta, 3, seed, n_samples, shards)
}
