//! Independent exact oracles shared by the integration tests. Nothing here
//! calls into the library's geometry code.

#![allow(dead_code)]

use std::collections::BTreeSet;

use gapcert::Rational;
use num_traits::{One, Signed, Zero};

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// `(normal, offset)` meaning `normal · x <= offset`.
pub type Row = (Vec<Rational>, Rational);

/// The discarded region, written out directly from its defining inequalities.
pub fn e_rows(eta: &Rational) -> Vec<Row> {
    let z = || q(0, 1);
    let o = || q(1, 1);
    let m = || q(-1, 1);
    let lo = q(2, 5) + eta;
    let small = q(1, 5) - q(2, 1) * eta;
    let hi = q(3, 5) - eta;
    vec![
        (vec![o(), z(), z(), z()], lo.clone()),
        (vec![m(), o(), z(), z()], z()),
        (vec![z(), m(), o(), z()], z()),
        (vec![z(), z(), m(), o()], z()),
        (vec![z(), z(), z(), m()], -small),
        (vec![o(), o(), o(), q(2, 1)], o()),
        (vec![o(), o(), z(), z()], lo),
        (vec![z(), m(), m(), m()], -hi),
    ]
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |s, (x, y)| s + x * y)
}

/// Determinant by cofactor expansion along the first row.
pub fn det(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    if n == 0 {
        return Rational::one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut total = Rational::zero();
    for col in 0..n {
        if m[0][col].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Rational>> = m[1..]
            .iter()
            .map(|r| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = &m[0][col] * det(&minor);
        if col % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// Rank by row reduction.
#[allow(clippy::needless_range_loop)]
pub fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = &rows[i][c] / &rows[r][c];
                for j in c..cols {
                    let d = &f * &rows[r][j];
                    rows[i][j] -= d;
                }
            }
        }
        r += 1;
    }
    r
}

fn affine_dim(points: &[&Vec<Rational>]) -> isize {
    match points.split_first() {
        None => -1,
        Some((p0, rest)) => rank(
            rest.iter()
                .map(|p| p.iter().zip(p0.iter()).map(|(a, b)| a - b).collect())
                .collect(),
        ) as isize,
    }
}

/// Cramer's rule on `d` chosen rows.
fn intersect(rows: &[&Row]) -> Option<Vec<Rational>> {
    let a: Vec<Vec<Rational>> = rows.iter().map(|r| r.0.clone()).collect();
    let d = det(&a);
    if d.is_zero() {
        return None;
    }
    Some(
        (0..a.len())
            .map(|c| {
                let mut ac = a.clone();
                for (i, r) in rows.iter().enumerate() {
                    ac[i][c] = r.1.clone();
                }
                det(&ac) / &d
            })
            .collect(),
    )
}

fn choose(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = choose(n - 1, k);
    for mut c in choose(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

pub fn vertices(rows: &[Row]) -> Vec<Vec<Rational>> {
    let d = rows[0].0.len();
    let mut set = BTreeSet::new();
    for idx in choose(rows.len(), d) {
        let pick: Vec<&Row> = idx.iter().map(|&i| &rows[i]).collect();
        if let Some(x) = intersect(&pick) {
            if rows.iter().all(|r| dot(&r.0, &x) <= r.1) {
                set.insert(x);
            }
        }
    }
    set.into_iter().collect()
}

/// Pulling triangulation: cone from the lexicographically smallest vertex
/// of each face over the facets that avoid it.
pub fn pulling_simplices(rows: &[Row]) -> Vec<Vec<Vec<Rational>>> {
    let verts = vertices(rows);
    let d = rows[0].0.len() as isize;
    let all: Vec<usize> = (0..verts.len()).collect();
    let refs: Vec<&Vec<Rational>> = verts.iter().collect();
    if affine_dim(&refs) != d {
        return vec![];
    }
    let tight: Vec<BTreeSet<usize>> = rows
        .iter()
        .map(|r| (0..verts.len()).filter(|&v| dot(&r.0, &verts[v]) == r.1).collect())
        .collect();
    fn rec(
        face: &[usize],
        k: isize,
        verts: &[Vec<Rational>],
        tight: &[BTreeSet<usize>],
    ) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![face.to_vec()];
        }
        let apex = face[0];
        let mut facets = BTreeSet::new();
        for t in tight {
            let sub: Vec<usize> = face.iter().copied().filter(|v| t.contains(v)).collect();
            if sub.contains(&apex) || sub.len() == face.len() {
                continue;
            }
            let pts: Vec<&Vec<Rational>> = sub.iter().map(|&i| &verts[i]).collect();
            if affine_dim(&pts) == k - 1 {
                facets.insert(sub);
            }
        }
        let mut out = Vec::new();
        for f in facets {
            for mut s in rec(&f, k - 1, verts, tight) {
                s.insert(0, apex);
                out.push(s);
            }
        }
        out
    }
    rec(&all, d, &verts, &tight)
        .into_iter()
        .map(|s| s.into_iter().map(|i| verts[i].clone()).collect())
        .collect()
}

pub fn simplex_volume(s: &[Vec<Rational>]) -> Rational {
    let d = s.len() - 1;
    let m: Vec<Vec<Rational>> = s[1..]
        .iter()
        .map(|p| p.iter().zip(&s[0]).map(|(a, b)| a - b).collect())
        .collect();
    let fact: i64 = (1..=d as i64).product();
    det(&m).abs() / Rational::from_integer(fact.into())
}

pub fn volume(rows: &[Row]) -> Rational {
    pulling_simplices(rows)
        .iter()
        .fold(Rational::zero(), |a, s| a + simplex_volume(s))
}

/// `1 / (a1 a2 a3 a4 (1 - a1 - a2 - a3 - a4))`.
pub fn integrand(a: &[Rational]) -> Rational {
    let rest = Rational::one() - a.iter().fold(Rational::zero(), |s, x| s + x);
    let prod = a.iter().fold(rest, |p, x| p * x);
    Rational::one() / prod
}

#[test]
fn oracle_self_checks() {
    // unit 4-cube and unit 4-simplex
    let mut cube = Vec::new();
    let mut simplex = Vec::new();
    for i in 0..4 {
        let mut e = vec![q(0, 1); 4];
        e[i] = q(1, 1);
        cube.push((e.clone(), q(1, 1)));
        let neg: Vec<Rational> = e.iter().map(|x| -x).collect();
        cube.push((neg.clone(), q(0, 1)));
        simplex.push((neg, q(0, 1)));
    }
    simplex.push((vec![q(1, 1); 4], q(1, 1)));
    assert_eq!(volume(&cube), q(1, 1));
    assert_eq!(volume(&simplex), q(1, 24));
    assert_eq!(vertices(&cube).len(), 16);
}
