//! Acceptance gate. Each test prints one `criterion N ... PASS|FAIL` line
//! and then asserts it.

mod common;

use std::time::{Duration, Instant};

use gapcert::combinatorics::{count_pattern_permutations, falsify_lemma2, falsify_lemma3, lemma_eta_cap, Pattern};
use gapcert::constants::{even_grid, scan_eta, theta0, verify_main_theorem, C1Method};
use gapcert::integrator::{c1_coarse_upper, c1_enclosure, c1_monte_carlo, c1_scaling_slope, f_max_bound, EnclosureOptions};
use gapcert::ledger::{builtin_claims, verify_all};
use gapcert::polytope::{bounding_box, build_e, exact_volume, mc_volume, triangulate, HPolytope};
use gapcert::rational::{int, pow10_neg, rat, to_decimal_string, to_f64};
use gapcert::Rational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::q;

fn cap() -> Rational {
    rat(22, 3295)
}

fn verdict(n: u32, name: &str, pass: bool, detail: String) {
    println!(
        "criterion {n:>2} {name:<28} {}  {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {n} ({name}) failed: {detail}");
}

#[test]
fn criterion_01_volume_bound() {
    let start = Instant::now();
    let vol = exact_volume(&build_e(&cap()).unwrap()).unwrap();
    let elapsed = start.elapsed();
    let oracle = common::volume(&common::e_rows(&cap()));
    let bound = rat(3, 10_000_000_000);
    let pass = vol > Rational::zero() && vol <= bound && vol == oracle && elapsed < Duration::from_secs(10);
    verdict(
        1,
        "exact volume <= 3e-10",
        pass,
        format!(
            "vol = {} ({}), oracle agrees: {}, {:.2?}",
            vol,
            to_decimal_string(&vol),
            vol == oracle,
            elapsed
        ),
    );
}

#[test]
fn criterion_02_integrand_max() {
    let bound = f_max_bound(&cap()).unwrap();
    // (1/5 - 2η)^-5 with 1/5 - 44/3295 = 123/659
    let oracle = (0..5).fold(Rational::one(), |a, _| a * q(659, 123));
    // the integrand peaks at the vertex with every coordinate at its floor
    let small = q(1, 5) - q(2, 1) * cap();
    let corner_values: Vec<Rational> = common::vertices(&common::e_rows(&cap()))
        .iter()
        .map(|v| common::integrand(v))
        .collect();
    let max_at_vertices = corner_values.iter().max().unwrap().clone();
    let pass = bound == oracle
        && bound <= int(4415)
        && max_at_vertices <= bound
        && common::integrand(&vec![small.clone(); 4]) <= bound;
    verdict(
        2,
        "integrand max <= 4415",
        pass,
        format!("f_max = {} ({})", bound, to_decimal_string(&bound)),
    );
}

#[test]
fn criterion_03_coarse_c1() {
    let coarse = c1_coarse_upper(&cap()).unwrap();
    let oracle_vol = common::volume(&common::e_rows(&cap()));
    let oracle = q(6, 1) * oracle_vol * (0..5).fold(Rational::one(), |a, _| a * q(659, 123));
    let pass = coarse == oracle && coarse < rat(8, 1_000_000);
    verdict(
        3,
        "coarse c1 < 8e-6",
        pass,
        format!("6 vol f_max = {}", to_decimal_string(&coarse)),
    );
}

#[test]
fn criterion_04_certified_c1() {
    let start = Instant::now();
    let r = c1_enclosure(&cap(), &pow10_neg(8), 24).unwrap();
    let mc = c1_monte_carlo(&cap(), 100_000_000, 20_240_601).unwrap();
    let elapsed = start.elapsed();
    let mid = to_f64(&r.enclosure.midpoint());
    let z = mc.z_score(mid);
    let pass = r.converged
        && r.enclosure.hi() < &rat(8, 1_000_000)
        && r.enclosure.width() <= pow10_neg(8)
        && z < 4.0
        && elapsed < Duration::from_secs(300);
    verdict(
        4,
        "certified c1 + MC",
        pass,
        format!(
            "[{}, {}] width {} over {} cells; MC {:e} +- {:e} (z = {z:.2}); {:.2?}",
            to_decimal_string(r.enclosure.lo()),
            to_decimal_string(r.enclosure.hi()),
            to_decimal_string(&r.enclosure.width()),
            r.work,
            mc.estimate,
            mc.standard_error,
            elapsed
        ),
    );
}

#[test]
fn criterion_05_theorem_chain() {
    let mut details = Vec::new();
    let mut pass = true;
    for eta in [cap(), cap() - pow10_neg(6)] {
        let c1 = c1_enclosure(&eta, &pow10_neg(8), 24).unwrap();
        let upper = c1.enclosure.hi().clone();
        let report = verify_main_theorem(&eta, &upper).unwrap();
        // recomputed from the stated formula for the exponent of distribution
        let theta = q(1, 2) + q(7, 300) + q(17, 120) * &eta;
        let product = &theta * (Rational::one() - &upper);
        let oracle_ok = product > q(52427, 100000) && q(2, 1) / q(52427, 100000) < q(3815, 1000);
        pass &= report.overall && report.checks.iter().all(|c| c.pass) && oracle_ok && theta == theta0(&eta);
        details.push(format!("eta {}: product {}", eta, to_decimal_string(&product)));
    }
    verdict(5, "theorem chain", pass, details.join("; "));
}

#[test]
fn criterion_06_ledger() {
    let expected = [
        q(82, 2395),
        q(82, 3395),
        q(46, 685),
        q(2, 95),
        q(62, 1445),
        q(22, 3295),
        q(82, 5395),
        q(1, 60),
        q(1, 35),
    ];
    let results = verify_all();
    let claims = builtin_claims();
    let mut pass = results.len() == 9 && claims.len() == 9;
    for ((r, c), want) in results.iter().zip(&claims).zip(&expected) {
        // threshold where the two affine sides meet
        let oracle = (&c.rhs_const - &c.lhs_const) / (&c.lhs_eta_coeff - &c.rhs_eta_coeff);
        pass &= r.pass && r.computed_threshold.0 == *want && oracle == *want;
    }
    verdict(
        6,
        "ledger thresholds",
        pass,
        format!("{}/9 claims verified", results.iter().filter(|r| r.pass).count()),
    );
}

fn oracle_pattern_count(v: &[f64; 5], pattern: Pattern) -> usize {
    let mut n = 0;
    for a in 0..5 {
        for b in 0..5 {
            for c in 0..5 {
                for d in 0..5 {
                    for e in 0..5 {
                        let idx = [a, b, c, d, e];
                        let mut seen = [false; 5];
                        if idx.iter().any(|&i| std::mem::replace(&mut seen[i], true)) {
                            continue;
                        }
                        let x = idx.map(|i| v[i]);
                        let chain = x[0] > x[1] && x[1] > x[2] && x[2] > x[3];
                        let hit = match pattern {
                            Pattern::P1 => chain && x[3] < x[4],
                            Pattern::P2 => x[0] > x[1] && x[1] < x[2] && x[3] < x[4],
                            _ => unreachable!(),
                        };
                        n += usize::from(hit);
                    }
                }
            }
        }
    }
    n
}

#[test]
fn criterion_07_permutation_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut agree = 0;
    for _ in 0..1000 {
        let v: [f64; 5] = std::array::from_fn(|_| rng.gen_range(-1e6..1e6));
        let p1 = count_pattern_permutations(&v, Pattern::P1).unwrap();
        let p2 = count_pattern_permutations(&v, Pattern::P2).unwrap();
        if (p1, p2) == (4, 20)
            && p1 == oracle_pattern_count(&v, Pattern::P1)
            && p2 == oracle_pattern_count(&v, Pattern::P2)
        {
            agree += 1;
        }
    }
    verdict(7, "permutation counts", agree == 1000, format!("{agree}/1000 tuples give (4, 20)"));
}

#[test]
fn criterion_08_falsifiers() {
    let start = Instant::now();
    let mut pass = true;
    let mut details = Vec::new();
    for eta in [rat(1, 1000), lemma_eta_cap() - pow10_neg(9)] {
        let r2 = falsify_lemma2(&eta, 3, 8, 1_000_000, 11).unwrap();
        let r3 = falsify_lemma3(&eta, 1_000_000, 13).unwrap();
        for r in [&r2, &r3] {
            pass &= r.passed() && r.premise_hits >= 1_000_000 && r.boundary_hits > 0;
            details.push(format!(
                "{} eta {}: {} hits ({} near boundary) in {} draws, counterexample {}",
                if r.lemma == 2 { "sorted" } else { "split" },
                to_decimal_string(&eta),
                r.premise_hits,
                r.boundary_hits,
                r.draws,
                if r.counterexample.is_some() { "FOUND" } else { "none" }
            ));
        }
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(600);
    details.push(format!("{elapsed:.2?}"));
    verdict(8, "tuple falsifiers", pass, details.join("; "));
}

fn partition_check(e: &HPolytope, rows: &[common::Row], n: usize, seed: u64) -> (bool, String) {
    let cells = triangulate(e).unwrap();
    let verts = common::vertices(rows);
    let bbox = bounding_box(e).unwrap().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let denom: i64 = 1 << 30;
    let (mut inside, mut bad) = (0usize, 0usize);
    for k in 0..n {
        let p: Vec<Rational> = if k % 2 == 0 {
            (0..4)
                .map(|i| {
                    let u = q(rng.gen_range(0..=denom), denom);
                    &bbox.lo[i] + u * (&bbox.hi[i] - &bbox.lo[i])
                })
                .collect()
        } else {
            let w: Vec<i64> = verts.iter().map(|_| rng.gen_range(0..1000)).collect();
            let total: i64 = w.iter().sum::<i64>().max(1);
            (0..4)
                .map(|i| {
                    verts
                        .iter()
                        .zip(&w)
                        .fold(Rational::zero(), |a, (v, &wi)| a + &v[i] * q(wi, total))
                })
                .collect()
        };
        let in_e = rows
            .iter()
            .all(|(a, b)| a.iter().zip(&p).fold(Rational::zero(), |s, (x, y)| s + x * y) <= *b);
        let mut covering = 0;
        let mut interior = 0;
        for c in &cells {
            let lam = c.barycentric(&p).expect("cells are nondegenerate");
            if lam.iter().all(|l| l >= &Rational::zero()) {
                covering += 1;
                if lam.iter().all(|l| l > &Rational::zero()) {
                    interior += 1;
                }
            }
        }
        inside += usize::from(in_e);
        if in_e != (covering > 0) || interior > 1 || (interior == 1 && covering != 1) {
            bad += 1;
        }
    }
    (bad == 0, format!("{n} points, {inside} inside, {bad} violations, {} cells", cells.len()))
}

#[test]
fn criterion_09_property_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let e = build_e(&cap()).unwrap();
    let vol = exact_volume(&e).unwrap();

    // constraint scaling
    let mut scaling_ok = true;
    for _ in 0..5 {
        let scaled: Vec<_> = e
            .halfspaces()
            .iter()
            .map(|h| h.scaled(&q(rng.gen_range(1..10_000), rng.gen_range(1..10_000))))
            .collect();
        scaling_ok &= exact_volume(&e.with_halfspaces(scaled).unwrap()).unwrap() == vol;
    }

    // monotone in eta
    let grid = even_grid(8);
    let vols: Vec<Rational> = grid.iter().map(|x| exact_volume(&build_e(x).unwrap()).unwrap()).collect();
    let monotone_ok = vols.windows(2).all(|w| w[0] <= w[1]);

    // Monte Carlo against exact values
    let mc_e = mc_volume(&e, 10_000_000, 91).unwrap();
    let cube = HPolytope::cube(4, int(0), int(1)).unwrap();
    let simplex = HPolytope::unit_simplex(4).unwrap();
    let mc_cube = mc_volume(&cube, 1_000_000, 92).unwrap();
    let mc_simplex = mc_volume(&simplex, 1_000_000, 93).unwrap();
    let z = [
        mc_e.z_score(to_f64(&vol)),
        mc_cube.z_score(1.0),
        mc_simplex.z_score(1.0 / 24.0),
    ];
    let mc_ok = z.iter().all(|&x| x < 4.0)
        && exact_volume(&cube).unwrap() == int(1)
        && exact_volume(&simplex).unwrap() == rat(1, 24);

    let (partition_ok, partition) = partition_check(&e, &common::e_rows(&cap()), 10_000, 94);

    let pass = scaling_ok && monotone_ok && mc_ok && partition_ok;
    verdict(
        9,
        "property suite",
        pass,
        format!(
            "scaling {scaling_ok}, monotone {monotone_ok}, MC z = [{:.2}, {:.2}, {:.2}], partition: {partition}",
            z[0], z[1], z[2]
        ),
    );
}

#[test]
fn criterion_10_scaling() {
    let etas = [rat(1, 2000), rat(1, 1000), rat(1, 500), rat(1, 250)];
    let (rows, slope) = c1_scaling_slope(&etas).unwrap();
    let converged = rows.iter().all(|(_, r)| r.converged);
    let scan = scan_eta(&even_grid(8), C1Method::Enclosure, &EnclosureOptions::default()).unwrap();
    let decreasing = scan.windows(2).all(|w| w[1].c0 < w[0].c0);
    let pass = (3.5..=4.5).contains(&slope) && converged && decreasing;
    verdict(
        10,
        "c1 scaling and c0 trend",
        pass,
        format!(
            "slope {slope:.4}; c0 from {} to {}",
            to_decimal_string(&scan[0].c0),
            to_decimal_string(&scan[scan.len() - 1].c0)
        ),
    );
}
