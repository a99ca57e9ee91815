//! Exact H-representation polytopes, with the discard region E(η) as the main
//! instance.
//!
//! Everything here is exact: no epsilons, no floating point outside the Monte
//! Carlo estimator.

pub mod linalg;
pub(crate) mod montecarlo;
mod triangulate;
mod vertices;

use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, parse_rational, rat, to_exact_string, Rational};

pub use montecarlo::{bounding_box, mc_volume, BoundingBox, McEstimate};
pub use triangulate::triangulate;
pub use vertices::{check_bounded, enumerate_vertices};

/// Closed half-space `normal · x <= offset`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HalfSpace {
    pub normal: Vec<Rational>,
    pub offset: Rational,
}

impl HalfSpace {
    pub fn new(normal: Vec<Rational>, offset: Rational) -> Result<Self> {
        if normal.iter().all(Zero::is_zero) {
            return Err(Error::Input("half-space normal is the zero vector".into()));
        }
        Ok(HalfSpace { normal, offset })
    }

    /// `normal · x - offset`; nonpositive means satisfied.
    pub fn slack(&self, x: &[Rational]) -> Rational {
        linalg::dot(&self.normal, x) - &self.offset
    }

    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        !self.slack(x).is_positive()
    }

    pub fn strictly_satisfied_by(&self, x: &[Rational]) -> bool {
        self.slack(x).is_negative()
    }

    pub fn scaled(&self, s: &Rational) -> HalfSpace {
        HalfSpace {
            normal: self.normal.iter().map(|a| a * s).collect(),
            offset: &self.offset * s,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HPolytope {
    dim: usize,
    halfspaces: Vec<HalfSpace>,
}

impl HPolytope {
    pub fn new(dim: usize, halfspaces: Vec<HalfSpace>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Input("polytope dimension must be at least 1".into()));
        }
        for h in &halfspaces {
            if h.normal.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: h.normal.len(),
                });
            }
        }
        Ok(HPolytope { dim, halfspaces })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[HalfSpace] {
        &self.halfspaces
    }

    /// Axis-aligned box `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: Rational, hi: Rational) -> Result<Self> {
        let mut hs = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            let mut up = vec![int(0); dim];
            up[i] = int(1);
            hs.push(HalfSpace::new(up, hi.clone())?);
            let mut down = vec![int(0); dim];
            down[i] = int(-1);
            hs.push(HalfSpace::new(down, -lo.clone())?);
        }
        HPolytope::new(dim, hs)
    }

    /// `x_i >= 0`, `Σ x_i <= 1`.
    pub fn unit_simplex(dim: usize) -> Result<Self> {
        let mut hs = Vec::with_capacity(dim + 1);
        for i in 0..dim {
            let mut n = vec![int(0); dim];
            n[i] = int(-1);
            hs.push(HalfSpace::new(n, int(0))?);
        }
        hs.push(HalfSpace::new(vec![int(1); dim], int(1))?);
        HPolytope::new(dim, hs)
    }

    fn check_dim(&self, point: &[Rational]) -> Result<()> {
        if point.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: point.len(),
            });
        }
        Ok(())
    }

    /// Closed membership.
    pub fn contains(&self, point: &[Rational]) -> Result<bool> {
        self.check_dim(point)?;
        Ok(self.halfspaces.iter().all(|h| h.satisfied_by(point)))
    }

    /// Open membership: every inequality strict. This is the region the
    /// original strict inequalities describe.
    pub fn contains_strict(&self, point: &[Rational]) -> Result<bool> {
        self.check_dim(point)?;
        Ok(self.halfspaces.iter().all(|h| h.strictly_satisfied_by(point)))
    }

    pub fn with_halfspaces(&self, halfspaces: Vec<HalfSpace>) -> Result<Self> {
        HPolytope::new(self.dim, halfspaces)
    }

    /// Plain-text H-representation, one line per half-space:
    /// `a1 a2 ... ad <= b` with every number as `p/q`.
    pub fn to_hrep(&self) -> String {
        let mut out = String::new();
        for h in &self.halfspaces {
            for a in &h.normal {
                out.push_str(&to_exact_string(a));
                out.push(' ');
            }
            out.push_str("<= ");
            out.push_str(&to_exact_string(&h.offset));
            out.push('\n');
        }
        out
    }

    pub fn from_hrep(text: &str) -> Result<Self> {
        let mut dim = None;
        let mut hs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (lhs, rhs) = line.split_once("<=").ok_or_else(|| {
                Error::Input(format!("hrep line {}: missing '<='", lineno + 1))
            })?;
            let normal = lhs
                .split_whitespace()
                .map(parse_rational)
                .collect::<Result<Vec<_>>>()?;
            let offset = parse_rational(rhs)?;
            match dim {
                None => dim = Some(normal.len()),
                Some(d) if d != normal.len() => {
                    return Err(Error::Dimension {
                        expected: d,
                        got: normal.len(),
                    })
                }
                _ => {}
            }
            hs.push(HalfSpace::new(normal, offset)?);
        }
        let dim = dim.ok_or_else(|| Error::Input("empty hrep".into()))?;
        HPolytope::new(dim, hs)
    }
}

impl fmt::Display for HPolytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hrep())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub coords: Vec<Rational>,
}

impl Vertex {
    pub fn new(coords: Vec<Rational>) -> Self {
        Vertex { coords }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    pub vertices: Vec<Vertex>,
}

impl Simplex {
    pub fn new(vertices: Vec<Vertex>) -> Self {
        Simplex { vertices }
    }

    pub fn dim(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    /// Rows `v_i - v_0`.
    pub fn edge_matrix(&self) -> Vec<Vec<Rational>> {
        let v0 = &self.vertices[0].coords;
        self.vertices[1..]
            .iter()
            .map(|v| v.coords.iter().zip(v0).map(|(a, b)| a - b).collect())
            .collect()
    }

    /// `|det(edge matrix)| / d!`.
    pub fn volume(&self) -> Rational {
        let d = self.dim();
        let det = linalg::determinant(&self.edge_matrix());
        det.abs() / factorial(d)
    }

    pub fn centroid(&self) -> Vec<Rational> {
        centroid(self.vertices.iter().map(|v| v.coords.as_slice()))
    }

    /// Barycentric coordinates of `p`; `None` for a degenerate simplex.
    pub fn barycentric(&self, p: &[Rational]) -> Option<Vec<Rational>> {
        let edges = self.edge_matrix();
        let d = self.dim();
        // Solve Σ λ_i (v_i - v_0) = p - v_0 with the transposed edge matrix.
        let a: Vec<Vec<Rational>> = (0..d)
            .map(|row| edges.iter().map(|e| e[row].clone()).collect())
            .collect();
        let rhs: Vec<Rational> = p
            .iter()
            .zip(&self.vertices[0].coords)
            .map(|(x, y)| x - y)
            .collect();
        let lambda = linalg::solve(&a, &rhs)?;
        let l0 = lambda
            .iter()
            .fold(int(1), |acc, l| acc - l);
        let mut out = Vec::with_capacity(d + 1);
        out.push(l0);
        out.extend(lambda);
        Some(out)
    }
}

/// Certified interval `[lo, hi]` containing a real quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct Enclosure {
    lo: Rational,
    hi: Rational,
}

impl Enclosure {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::Input(format!(
                "enclosure lower end {} exceeds upper end {}",
                to_exact_string(&lo),
                to_exact_string(&hi)
            )));
        }
        Ok(Enclosure { lo, hi })
    }

    pub fn point(x: Rational) -> Self {
        Enclosure {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_enclosure(&self, other: &Enclosure) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn scale(&self, s: &Rational) -> Enclosure {
        debug_assert!(!s.is_negative());
        Enclosure {
            lo: &self.lo * s,
            hi: &self.hi * s,
        }
    }
}

pub fn factorial(n: usize) -> Rational {
    (1..=n as i64).fold(int(1), |acc, k| acc * int(k))
}

pub fn centroid<'a>(points: impl Iterator<Item = &'a [Rational]>) -> Vec<Rational> {
    let mut sum: Vec<Rational> = Vec::new();
    let mut n = 0i64;
    for p in points {
        if sum.is_empty() {
            sum = p.to_vec();
        } else {
            for (s, x) in sum.iter_mut().zip(p) {
                *s += x;
            }
        }
        n += 1;
    }
    let n = int(n.max(1));
    sum.into_iter().map(|s| s / &n).collect()
}

/// Upper limit on η accepted by [`build_e`].
pub fn eta_sanity_cap() -> Rational {
    rat(1, 10)
}

/// Closure of the discard region E(η) ⊂ R⁴:
///
/// ```text
/// α1 <= 2/5 + η,  α2 <= α1,  α3 <= α2,  α4 <= α3,  α4 >= 1/5 - 2η,
/// α1 + α2 + α3 + 2α4 <= 1,  α1 + α2 <= 2/5 + η,  α2 + α3 + α4 >= 3/5 - η
/// ```
pub fn build_e(eta: &Rational) -> Result<HPolytope> {
    if eta.is_negative() || eta >= &eta_sanity_cap() {
        return Err(Error::Input(format!(
            "eta = {} outside [0, 1/10)",
            to_exact_string(eta)
        )));
    }
    let n = |v: [i64; 4]| v.iter().map(|&x| int(x)).collect::<Vec<_>>();
    let two_fifths = rat(2, 5) + eta;
    let rows = vec![
        (n([1, 0, 0, 0]), two_fifths.clone()),
        (n([-1, 1, 0, 0]), int(0)),
        (n([0, -1, 1, 0]), int(0)),
        (n([0, 0, -1, 1]), int(0)),
        (n([0, 0, 0, -1]), -(rat(1, 5) - eta * int(2))),
        (n([1, 1, 1, 2]), int(1)),
        (n([1, 1, 0, 0]), two_fifths),
        (n([0, -1, -1, -1]), -(rat(3, 5) - eta)),
    ];
    let hs = rows
        .into_iter()
        .map(|(a, b)| HalfSpace::new(a, b))
        .collect::<Result<Vec<_>>>()?;
    HPolytope::new(4, hs)
}

/// Exact volume: Σ over the centroid-cone triangulation of `|det|/d!`.
/// Flat or empty polytopes have volume 0.
pub fn exact_volume(p: &HPolytope) -> Result<Rational> {
    let simplices = triangulate(p)?;
    Ok(simplices
        .iter()
        .map(Simplex::volume)
        .fold(Rational::zero(), |acc, v| acc + v))
}
