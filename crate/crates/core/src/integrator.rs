//! The integrand `f(α) = 1 / (α1 α2 α3 α4 (1 - α1 - α2 - α3 - α4))` and
//! certified enclosures of `c1(η) = 6 ∫_{E(η)} f`.
//!
//! Certification rests on two facts about `f` on a simplex where all five
//! affine factors are positive:
//!
//! * each factor attains its extremes at the vertices, so the product of the
//!   reciprocal factor ranges bounds `f` pointwise;
//! * `f = exp(-Σ log L_i)` is log-convex, hence convex, so the centroid value
//!   times the volume is a lower bound (Jensen) and the mean of the vertex
//!   values times the volume an upper bound (Hermite-Hadamard).
//!
//! The per-cell enclosure is the intersection of the two. All arithmetic in
//! the certified path is exact.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, PoleKind, Result};
use crate::polytope::montecarlo::{sharded, FloatHalfSpaces};
use crate::polytope::{
    bounding_box, build_e, eta_sanity_cap, exact_volume, triangulate, Enclosure, McEstimate,
    Simplex,
};
use crate::rational::{int, pow, rat, round_outward, to_exact_string, to_f64, Rational};

/// The five affine factors `α1, α2, α3, α4, 1 - Σα`.
pub fn factors(alpha: &[Rational]) -> Result<[Rational; 5]> {
    if alpha.len() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            got: alpha.len(),
        });
    }
    let rest = alpha.iter().fold(int(1), |acc, a| acc - a);
    Ok([
        alpha[0].clone(),
        alpha[1].clone(),
        alpha[2].clone(),
        alpha[3].clone(),
        rest,
    ])
}

fn check_positive(fs: &[Rational; 5]) -> Result<()> {
    for (i, x) in fs.iter().enumerate() {
        if x.is_zero() {
            return Err(Error::Pole {
                factor: i,
                kind: PoleKind::Zero,
            });
        }
        if x.is_negative() {
            return Err(Error::Pole {
                factor: i,
                kind: PoleKind::Negative,
            });
        }
    }
    Ok(())
}

pub fn eval_f(alpha: &[Rational]) -> Result<Rational> {
    let fs = factors(alpha)?;
    check_positive(&fs)?;
    let prod = fs.iter().fold(int(1), |acc, x| acc * x);
    Ok(prod.recip())
}

/// `(1/5 - 2η)^-5`, an upper bound for `f` on the closure of E(η): every
/// factor there is at least `1/5 - 2η` (for `1 - Σα` because
/// `α1 + α2 + α3 + 2α4 <= 1` gives `1 - Σα >= α4`).
pub fn f_max_bound(eta: &Rational) -> Result<Rational> {
    if eta >= &eta_sanity_cap() {
        return Err(Error::Input(format!(
            "eta = {} leaves no positive factor bound",
            to_exact_string(eta)
        )));
    }
    Ok(pow(&(rat(1, 5) - eta * int(2)), -5))
}

/// Pointwise bound of `f` over a simplex from the vertex ranges of the five
/// factors.
pub fn f_enclosure_on_simplex(s: &Simplex) -> Result<Enclosure> {
    let mut mins: Option<[Rational; 5]> = None;
    let mut maxs: Option<[Rational; 5]> = None;
    for v in &s.vertices {
        let fs = factors(&v.coords)?;
        check_positive(&fs)?;
        match (&mut mins, &mut maxs) {
            (Some(lo), Some(hi)) => {
                for i in 0..5 {
                    if fs[i] < lo[i] {
                        lo[i] = fs[i].clone();
                    }
                    if fs[i] > hi[i] {
                        hi[i] = fs[i].clone();
                    }
                }
            }
            _ => {
                mins = Some(fs.clone());
                maxs = Some(fs);
            }
        }
    }
    let (Some(lo), Some(hi)) = (mins, maxs) else {
        return Err(Error::Input("simplex has no vertices".into()));
    };
    let prod = |xs: &[Rational; 5]| xs.iter().fold(int(1), |acc, x| acc * x);
    Enclosure::new(prod(&hi).recip(), prod(&lo).recip())
}

/// `6 · vol(E(η)) · (1/5 - 2η)^-5`.
pub fn c1_coarse_upper(eta: &Rational) -> Result<Rational> {
    let bound = f_max_bound(eta)?;
    let vol = exact_volume(&build_e(eta)?)?;
    Ok(int(6) * vol * bound)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Coarse,
    SimplexEnclosure,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegralResult {
    pub enclosure: Enclosure,
    pub point_estimate: f64,
    pub method: Method,
    /// Number of leaf cells in the final subdivision.
    pub work: u64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnclosureOptions {
    pub tol: Rational,
    pub max_depth: u32,
    /// Per-cell bounds are rounded outward onto the grid
    /// `2^-denominator_bits`, which keeps the running sums small.
    pub denominator_bits: u64,
}

impl Default for EnclosureOptions {
    fn default() -> Self {
        EnclosureOptions {
            tol: crate::rational::pow10_neg(8),
            max_depth: 24,
            denominator_bits: 160,
        }
    }
}

/// Certified bounds on `∫_S f` for one cell.
#[derive(Debug, Clone)]
pub struct CellBound {
    pub simplex: Simplex,
    pub depth: u32,
    pub integral: Enclosure,
}

fn certify(e: Error) -> Error {
    match e {
        Error::Pole { factor, kind } => Error::Certification(format!(
            "integrand factor {factor} is {kind} inside a cell"
        )),
        other => other,
    }
}

/// Enclosure of `∫_S f` as described in the module docs.
pub fn cell_integral_bound(s: &Simplex, denominator_bits: u64) -> Result<Enclosure> {
    let pointwise = f_enclosure_on_simplex(s).map_err(certify)?;
    let vol = s.volume();
    let at_centroid = eval_f(&s.centroid()).map_err(certify)?;
    let mut vertex_sum = Rational::zero();
    for v in &s.vertices {
        vertex_sum += eval_f(&v.coords).map_err(certify)?;
    }
    let vertex_mean = vertex_sum / int(s.vertices.len() as i64);
    let lo = std::cmp::max(at_centroid, pointwise.lo().clone()) * &vol;
    let hi = std::cmp::min(vertex_mean, pointwise.hi().clone()) * &vol;
    if lo > hi {
        return Err(Error::Certification(
            "cell lower bound exceeds upper bound".into(),
        ));
    }
    let (lo, hi) = round_outward(&lo, &hi, denominator_bits);
    Enclosure::new(lo, hi)
}

/// Longest edge by exact squared length; ties go to the first pair.
fn longest_edge(s: &Simplex) -> (usize, usize) {
    let n = s.vertices.len();
    let mut best = (0, 1);
    let mut best_len = Rational::zero();
    for i in 0..n {
        for j in i + 1..n {
            let len = s.vertices[i]
                .coords
                .iter()
                .zip(&s.vertices[j].coords)
                .fold(Rational::zero(), |acc, (a, b)| {
                    let d = a - b;
                    acc + &d * &d
                });
            if len > best_len {
                best_len = len;
                best = (i, j);
            }
        }
    }
    best
}

pub fn bisect(s: &Simplex) -> [Simplex; 2] {
    let (i, j) = longest_edge(s);
    let mid: Vec<Rational> = s.vertices[i]
        .coords
        .iter()
        .zip(&s.vertices[j].coords)
        .map(|(a, b)| (a + b) / int(2))
        .collect();
    let mut left = s.clone();
    left.vertices[i].coords = mid.clone();
    let mut right = s.clone();
    right.vertices[j].coords = mid;
    [left, right]
}

#[derive(PartialEq, Eq)]
struct Queued {
    width: Rational,
    id: Reverse<usize>,
}

impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        self.width
            .cmp(&other.width)
            .then_with(|| self.id.cmp(&other.id))
    }
}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Worst-first refinement of the cells of a triangulation until the total
/// width of `scale · Σ ∫_cell f` is at most `tol`. Returns the final leaf
/// cells and whether the tolerance was reached.
pub fn refine_cells(
    initial: Vec<Simplex>,
    scale: &Rational,
    opts: &EnclosureOptions,
) -> Result<(Vec<CellBound>, bool)> {
    let mut cells: Vec<Option<CellBound>> = Vec::with_capacity(initial.len());
    let mut heap = BinaryHeap::new();
    let mut lo = Rational::zero();
    let mut hi = Rational::zero();
    let push = |cell: CellBound,
                    cells: &mut Vec<Option<CellBound>>,
                    heap: &mut BinaryHeap<Queued>,
                    lo: &mut Rational,
                    hi: &mut Rational| {
        *lo += cell.integral.lo();
        *hi += cell.integral.hi();
        heap.push(Queued {
            width: cell.integral.width(),
            id: Reverse(cells.len()),
        });
        cells.push(Some(cell));
    };
    for s in initial {
        let integral = cell_integral_bound(&s, opts.denominator_bits)?;
        push(
            CellBound {
                simplex: s,
                depth: 0,
                integral,
            },
            &mut cells,
            &mut heap,
            &mut lo,
            &mut hi,
        );
    }
    let mut converged = true;
    while scale * (&hi - &lo) > opts.tol {
        let Some(top) = heap.pop() else {
            converged = false;
            break;
        };
        let id = top.id.0;
        let depth = cells[id].as_ref().expect("queued cell is live").depth;
        if depth >= opts.max_depth {
            // Leave it in place; other cells may still refine.
            continue;
        }
        let cell = cells[id].take().expect("queued cell is live");
        lo -= cell.integral.lo();
        hi -= cell.integral.hi();
        for child in bisect(&cell.simplex) {
            let integral = cell_integral_bound(&child, opts.denominator_bits)?;
            push(
                CellBound {
                    simplex: child,
                    depth: cell.depth + 1,
                    integral,
                },
                &mut cells,
                &mut heap,
                &mut lo,
                &mut hi,
            );
        }
    }
    Ok((cells.into_iter().flatten().collect(), converged))
}

pub fn c1_enclosure(eta: &Rational, tol: &Rational, max_depth: u32) -> Result<IntegralResult> {
    c1_enclosure_with(
        eta,
        &EnclosureOptions {
            tol: tol.clone(),
            max_depth,
            ..EnclosureOptions::default()
        },
    )
}

pub fn c1_enclosure_with(eta: &Rational, opts: &EnclosureOptions) -> Result<IntegralResult> {
    if !opts.tol.is_positive() {
        return Err(Error::Input("tol must be positive".into()));
    }
    let simplices = triangulate(&build_e(eta)?)?;
    let six = int(6);
    let (cells, converged) = refine_cells(simplices, &six, opts)?;
    let (lo, hi) = cells.iter().fold(
        (Rational::zero(), Rational::zero()),
        |(lo, hi), c| (lo + c.integral.lo(), hi + c.integral.hi()),
    );
    let enclosure = Enclosure::new(&six * lo, &six * hi)?;
    Ok(IntegralResult {
        point_estimate: to_f64(&enclosure.midpoint()),
        enclosure,
        method: Method::SimplexEnclosure,
        work: cells.len() as u64,
        converged,
    })
}

/// `6 · box_volume · mean(f · 1_E)` over uniform samples in the vertex
/// bounding box, in floating point.
pub fn c1_monte_carlo(eta: &Rational, n_samples: u64, seed: u64) -> Result<McEstimate> {
    if n_samples == 0 {
        return Err(Error::Input("n_samples must be at least 1".into()));
    }
    let e = build_e(eta)?;
    let Some(bbox) = bounding_box(&e)? else {
        return Ok(McEstimate::zero(n_samples));
    };
    let box_volume = to_f64(&bbox.volume());
    if box_volume == 0.0 {
        return Ok(McEstimate::zero(n_samples));
    }
    let sampler = bbox.sampler();
    let hs = FloatHalfSpaces::new(&e);
    let shards = sharded(n_samples, seed, |rng, count| {
        let mut x = [0.0f64; 4];
        let (mut sum, mut sum_sq, mut hits) = (0.0f64, 0.0f64, 0u64);
        for _ in 0..count {
            sampler.draw(rng, &mut x);
            if hs.contains(&x) {
                let rest = 1.0 - x[0] - x[1] - x[2] - x[3];
                let f = 1.0 / (x[0] * x[1] * x[2] * x[3] * rest);
                sum += f;
                sum_sq += f * f;
                hits += 1;
            }
        }
        (sum, sum_sq, hits)
    });
    let (sum, sum_sq, hits) = shards
        .into_iter()
        .fold((0.0, 0.0, 0u64), |(a, b, c), (x, y, z)| (a + x, b + y, c + z));
    let n = n_samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    let scale = 6.0 * box_volume;
    Ok(McEstimate {
        estimate: scale * mean,
        standard_error: scale * (var / n).sqrt(),
        samples: n_samples,
        hits,
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x.ln(), b + y.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        let dx = x.ln() - mx;
        (a + dx * (y.ln() - my), b + dx * dx)
    });
    num / den
}

/// `c1` midpoints over `etas`, each certified to a relative width of
/// `10^-6` of its coarse bound, and the log-log slope through them.
pub fn c1_scaling_slope(etas: &[Rational]) -> Result<(Vec<(Rational, IntegralResult)>, f64)> {
    let mut rows = Vec::with_capacity(etas.len());
    for eta in etas {
        let coarse = c1_coarse_upper(eta)?;
        let tol = if coarse.is_zero() {
            Rational::one()
        } else {
            coarse * crate::rational::pow10_neg(6)
        };
        let res = c1_enclosure_with(
            eta,
            &EnclosureOptions {
                tol,
                ..EnclosureOptions::default()
            },
        )?;
        rows.push((eta.clone(), res));
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|(e, r)| (to_f64(e), r.point_estimate))
        .collect();
    Ok((rows, loglog_slope(&pts)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{enumerate_vertices, Vertex};
    use crate::rational::pow10_neg;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v4(a: [(i64, i64); 4]) -> Vec<Rational> {
        a.iter().map(|&(n, d)| rat(n, d)).collect()
    }

    #[test]
    fn eval_f_examples() {
        assert_eq!(eval_f(&[rat(1, 5), rat(1, 5), rat(1, 5), rat(1, 5)]).unwrap(), int(3125));
        let x = v4([(21, 100), (1, 5), (1, 5), (19, 100)]);
        let exact = eval_f(&x).unwrap();
        // 1/(0.21 · 0.2 · 0.2 · 0.19 · 0.2) = 10^9 / 319200
        assert_eq!(exact, rat(1_000_000_000, 319_200));
        let float = 1.0 / (0.21 * 0.2 * 0.2 * 0.19 * 0.2);
        assert!((to_f64(&exact) - float).abs() < 1e-9);
    }

    #[test]
    fn eval_f_poles() {
        let q = rat(1, 4);
        assert_eq!(
            eval_f(&[q.clone(), q.clone(), q.clone(), q]),
            Err(Error::Pole { factor: 4, kind: PoleKind::Zero })
        );
        assert_eq!(
            eval_f(&v4([(1, 5), (-1, 5), (1, 5), (1, 5)])),
            Err(Error::Pole { factor: 1, kind: PoleKind::Negative })
        );
        assert!(matches!(eval_f(&[int(1)]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn f_max_bound_values() {
        let b = f_max_bound(&rat(22, 3295)).unwrap();
        assert_eq!(b, pow(&rat(659, 123), 5));
        assert!(b <= int(4415));
        assert_eq!(f_max_bound(&int(0)).unwrap(), int(3125));
        assert!(f_max_bound(&rat(1, 10)).is_err());
    }

    fn random_point_in_e(eta: &Rational, rng: &mut ChaCha8Rng) -> Vec<Rational> {
        let e = build_e(eta).unwrap();
        let bbox = bounding_box(&e).unwrap().unwrap();
        loop {
            let p: Vec<Rational> = bbox
                .lo
                .iter()
                .zip(&bbox.hi)
                .map(|(l, h)| l + (h - l) * rat(rng.gen_range(0..=1 << 20), 1 << 20))
                .collect();
            if e.contains(&p).unwrap() {
                return p;
            }
        }
    }

    #[test]
    fn f_below_max_bound_on_e() {
        let eta = rat(22, 3295);
        let bound = f_max_bound(&eta).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let p = random_point_in_e(&eta, &mut rng);
            assert!(eval_f(&p).unwrap() <= bound);
        }
        for v in enumerate_vertices(&build_e(&eta).unwrap()).unwrap() {
            assert!(eval_f(&v.coords).unwrap() <= bound);
        }
    }

    #[test]
    fn point_simplex_enclosure_is_exact() {
        let p = Vertex::new(vec![rat(1, 5); 4]);
        let s = Simplex::new(vec![p; 5]);
        let e = f_enclosure_on_simplex(&s).unwrap();
        assert_eq!((e.lo(), e.hi()), (&int(3125), &int(3125)));
    }

    #[test]
    fn simplex_enclosures_on_e() {
        let eta = rat(22, 3295);
        let bound = f_max_bound(&eta).unwrap();
        let cells = triangulate(&build_e(&eta).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for s in &cells {
            let enc = f_enclosure_on_simplex(s).unwrap();
            assert!(enc.hi() <= &bound);
            assert!(enc.contains(&eval_f(&s.centroid()).unwrap()));
            for _ in 0..100 {
                // random convex combination with positive weights
                let w: Vec<Rational> = (0..5).map(|_| rat(rng.gen_range(1..1000), 1)).collect();
                let total = w.iter().fold(Rational::zero(), |a, x| a + x);
                let p: Vec<Rational> = (0..4)
                    .map(|k| {
                        s.vertices
                            .iter()
                            .zip(&w)
                            .fold(Rational::zero(), |a, (v, wi)| a + &v.coords[k] * wi)
                            / &total
                    })
                    .collect();
                assert!(enc.contains(&eval_f(&p).unwrap()));
            }
        }
    }

    #[test]
    fn pole_at_vertex_is_reported() {
        let s = Simplex::new(vec![
            Vertex::new(v4([(1, 4), (1, 4), (1, 4), (1, 4)])),
            Vertex::new(v4([(1, 5), (1, 5), (1, 5), (1, 5)])),
            Vertex::new(v4([(1, 6), (1, 5), (1, 5), (1, 5)])),
            Vertex::new(v4([(1, 5), (1, 6), (1, 5), (1, 5)])),
            Vertex::new(v4([(1, 5), (1, 5), (1, 6), (1, 5)])),
        ]);
        assert!(matches!(f_enclosure_on_simplex(&s), Err(Error::Pole { .. })));
        assert!(matches!(
            cell_integral_bound(&s, 160),
            Err(Error::Certification(_))
        ));
    }

    #[test]
    fn coarse_bound_values() {
        let c = c1_coarse_upper(&rat(22, 3295)).unwrap();
        assert!(c < int(8) * pow10_neg(6));
        assert_eq!(c1_coarse_upper(&int(0)).unwrap(), int(0));
        assert!(c1_coarse_upper(&rat(11, 3295)).unwrap() <= c);
    }

    #[test]
    fn enclosure_at_zero_is_zero() {
        let r = c1_enclosure(&int(0), &pow10_neg(8), 10).unwrap();
        assert_eq!(r.enclosure, Enclosure::point(int(0)));
        assert_eq!(r.work, 0);
    }

    #[test]
    fn enclosure_tightens_and_nests() {
        let eta = rat(22, 3295);
        let coarse = c1_coarse_upper(&eta).unwrap();
        let wide = c1_enclosure(&eta, &pow10_neg(7), 24).unwrap();
        let tight = c1_enclosure(&eta, &pow10_neg(9), 24).unwrap();
        assert!(wide.converged && tight.converged);
        assert!(tight.enclosure.width() <= pow10_neg(9));
        assert!(wide.enclosure.contains_enclosure(&tight.enclosure));
        assert!(wide.enclosure.hi() <= &coarse);
        assert!(wide.enclosure.lo().is_positive());
        let (lo, hi) = (to_f64(tight.enclosure.lo()), to_f64(tight.enclosure.hi()));
        assert!(lo <= tight.point_estimate && tight.point_estimate <= hi);
    }

    #[test]
    fn refinement_width_is_monotone() {
        let eta = rat(22, 3295);
        let mut last: Option<Rational> = None;
        for k in 7..=10 {
            let r = c1_enclosure(&eta, &pow10_neg(k), 24).unwrap();
            let w = r.enclosure.width();
            if let Some(prev) = &last {
                assert!(&w <= prev);
            }
            last = Some(w);
        }
    }

    #[test]
    fn cells_contain_centroid_value() {
        let eta = rat(22, 3295);
        let cells = triangulate(&build_e(&eta).unwrap()).unwrap();
        let (leaves, _) = refine_cells(
            cells,
            &int(6),
            &EnclosureOptions {
                tol: pow10_neg(10),
                ..EnclosureOptions::default()
            },
        )
        .unwrap();
        for c in &leaves {
            let vol = c.simplex.volume();
            let per_vol = Enclosure::new(c.integral.lo() / &vol, c.integral.hi() / &vol).unwrap();
            assert!(per_vol.contains(&eval_f(&c.simplex.centroid()).unwrap()));
        }
    }

    #[test]
    fn bisection_preserves_volume() {
        let cells = triangulate(&build_e(&rat(22, 3295)).unwrap()).unwrap();
        for s in &cells {
            let [a, b] = bisect(s);
            assert_eq!(a.volume() + b.volume(), s.volume());
        }
    }

    #[test]
    fn monte_carlo_determinism_and_zero() {
        let eta = rat(22, 3295);
        let a = c1_monte_carlo(&eta, 100_000, 5).unwrap();
        let b = c1_monte_carlo(&eta, 100_000, 5).unwrap();
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        assert_eq!(c1_monte_carlo(&int(0), 1000, 1).unwrap(), McEstimate::zero(1000));
    }

    #[test]
    fn slope_of_a_power_law() {
        let pts: Vec<(f64, f64)> = [1.0, 2.0, 4.0, 8.0].iter().map(|&x| (x, 3.0 * x * x * x)).collect();
        assert!((loglog_slope(&pts) - 3.0).abs() < 1e-12);
    }
}
