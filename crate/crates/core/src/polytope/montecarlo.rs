//! Rejection-sampling volume estimate, the independent oracle for
//! [`super::exact_volume`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{enumerate_vertices, HPolytope};
use crate::error::{Error, Result};
use crate::rational::{to_f64, Rational};

/// Fixed shard count: results are independent of the worker count.
pub(crate) const SHARDS: u64 = 64;

/// Runs `f` once per shard with a per-shard stream of the seeded generator;
/// results come back in shard order.
pub(crate) fn sharded<T, F>(n_samples: u64, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    (0..SHARDS)
        .into_par_iter()
        .map(|shard| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard);
            let count = n_samples / SHARDS + u64::from(shard < n_samples % SHARDS);
            f(&mut rng, count)
        })
        .collect()
}

/// Axis-aligned box spanned by the exact vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundingBox {
    pub lo: Vec<Rational>,
    pub hi: Vec<Rational>,
}

impl BoundingBox {
    pub fn volume(&self) -> Rational {
        self.lo
            .iter()
            .zip(&self.hi)
            .fold(Rational::from_integer(1.into()), |acc, (l, h)| acc * (h - l))
    }

    pub(crate) fn sampler(&self) -> BoxSampler {
        BoxSampler {
            lo: self.lo.iter().map(to_f64).collect(),
            span: self.lo.iter().zip(&self.hi).map(|(l, h)| to_f64(&(h - l))).collect(),
        }
    }
}

pub(crate) struct BoxSampler {
    lo: Vec<f64>,
    span: Vec<f64>,
}

impl BoxSampler {
    pub(crate) fn draw(&self, rng: &mut impl Rng, out: &mut [f64]) {
        for ((o, l), s) in out.iter_mut().zip(&self.lo).zip(&self.span) {
            *o = l + s * rng.gen::<f64>();
        }
    }
}

/// Float copy of the half-spaces for fast approximate membership.
pub(crate) struct FloatHalfSpaces(Vec<(Vec<f64>, f64)>);

impl FloatHalfSpaces {
    pub(crate) fn new(p: &HPolytope) -> Self {
        FloatHalfSpaces(
            p.halfspaces()
                .iter()
                .map(|h| (h.normal.iter().map(to_f64).collect(), to_f64(&h.offset)))
                .collect(),
        )
    }

    pub(crate) fn contains(&self, x: &[f64]) -> bool {
        self.0
            .iter()
            .all(|(a, b)| a.iter().zip(x).map(|(ai, xi)| ai * xi).sum::<f64>() <= *b)
    }
}

/// `None` for an empty polytope.
pub fn bounding_box(p: &HPolytope) -> Result<Option<BoundingBox>> {
    let verts = enumerate_vertices(p)?;
    let Some(first) = verts.first() else {
        return Ok(None);
    };
    let mut lo = first.coords.clone();
    let mut hi = first.coords.clone();
    for v in &verts[1..] {
        for (i, x) in v.coords.iter().enumerate() {
            if x < &lo[i] {
                lo[i] = x.clone();
            }
            if x > &hi[i] {
                hi[i] = x.clone();
            }
        }
    }
    Ok(Some(BoundingBox { lo, hi }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub standard_error: f64,
    pub samples: u64,
    pub hits: u64,
}

impl McEstimate {
    pub fn zero(samples: u64) -> Self {
        McEstimate {
            estimate: 0.0,
            standard_error: 0.0,
            samples,
            hits: 0,
        }
    }

    /// `|estimate - target|` in units of standard error; 0/0 counts as 0.
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = (self.estimate - target).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.standard_error
        }
    }
}

/// Rejection sampling over the vertex bounding box. Deterministic for a fixed
/// seed regardless of thread count.
pub fn mc_volume(p: &HPolytope, n_samples: u64, seed: u64) -> Result<McEstimate> {
    if n_samples == 0 {
        return Err(Error::Input("n_samples must be at least 1".into()));
    }
    let Some(bbox) = bounding_box(p)? else {
        return Ok(McEstimate::zero(n_samples));
    };
    let box_volume = to_f64(&bbox.volume());
    if box_volume == 0.0 {
        return Ok(McEstimate::zero(n_samples));
    }
    let sampler = bbox.sampler();
    let hs = FloatHalfSpaces::new(p);
    let dim = p.dim();
    let hits: u64 = sharded(n_samples, seed, |rng, count| {
        let mut x = vec![0.0; dim];
        let mut hits = 0u64;
        for _ in 0..count {
            sampler.draw(rng, &mut x);
            if hs.contains(&x) {
                hits += 1;
            }
        }
        hits
    })
    .into_iter()
    .sum();
    let n = n_samples as f64;
    let rate = hits as f64 / n;
    Ok(McEstimate {
        estimate: box_volume * rate,
        standard_error: box_volume * (rate * (1.0 - rate) / n).sqrt(),
        samples: n_samples,
        hits,
    })
}
