use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use super::linalg;
use super::{HPolytope, Vertex};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Visits every `k`-subset of `0..n` in lexicographic order.
pub(crate) fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Errors with [`Error::Unbounded`] unless the recession cone
/// `{x : A x <= 0}` is `{0}`.
///
/// First the cheap necessary condition (each coordinate is bounded above and
/// below by some normal), then the exact test: the cone must be pointed
/// (`rank A = d`) and have no extreme ray, where candidate rays are the null
/// vectors of every rank-`(d-1)` subsystem.
pub fn check_bounded(p: &HPolytope) -> Result<()> {
    let d = p.dim();
    let hs = p.halfspaces();
    for i in 0..d {
        let up = hs.iter().any(|h| h.normal[i].is_positive());
        let down = hs.iter().any(|h| h.normal[i].is_negative());
        if !(up && down) {
            return Err(Error::Unbounded);
        }
    }
    let normals: Vec<Vec<Rational>> = hs.iter().map(|h| h.normal.clone()).collect();
    if linalg::rank(&normals) < d {
        return Err(Error::Unbounded);
    }
    if d == 1 {
        return Ok(());
    }
    let mut unbounded = false;
    for_each_subset(normals.len(), d - 1, |idx| {
        if unbounded {
            return;
        }
        let rows: Vec<Vec<Rational>> = idx.iter().map(|&i| normals[i].clone()).collect();
        let Some(ray) = linalg::null_vector(&rows) else {
            return;
        };
        for sign in [1i64, -1] {
            let r: Vec<Rational> = ray.iter().map(|x| x * Rational::from_integer(sign.into())).collect();
            if normals.iter().all(|a| !linalg::dot(a, &r).is_positive()) {
                unbounded = true;
            }
        }
    });
    if unbounded {
        Err(Error::Unbounded)
    } else {
        Ok(())
    }
}

/// All extreme points, by solving every `d`-subset of the bounding
/// hyperplanes and keeping feasible solutions. Duplicates are merged by exact
/// equality; the result is sorted.
pub fn enumerate_vertices(p: &HPolytope) -> Result<Vec<Vertex>> {
    check_bounded(p)?;
    let d = p.dim();
    let hs = p.halfspaces();
    let mut found = BTreeSet::new();
    for_each_subset(hs.len(), d, |idx| {
        let a: Vec<Vec<Rational>> = idx.iter().map(|&i| hs[i].normal.clone()).collect();
        let b: Vec<Rational> = idx.iter().map(|&i| hs[i].offset.clone()).collect();
        if let Some(x) = linalg::solve(&a, &b) {
            if hs.iter().all(|h| h.satisfied_by(&x)) {
                found.insert(Vertex::new(x));
            }
        }
    });
    Ok(found.into_iter().collect())
}

/// Indices of the half-spaces tight at `v`.
pub(crate) fn active_set(p: &HPolytope, v: &Vertex) -> Vec<usize> {
    p.halfspaces()
        .iter()
        .enumerate()
        .filter(|(_, h)| h.slack(&v.coords).is_zero())
        .map(|(i, _)| i)
        .collect()
}
