//! θ0(η), ζ(η), the gap exponent `2 / (θ (1 - c1))`, and the end-to-end
//! theorem chain at a given η.

use std::io::Write;

use num_traits::{One, Signed};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrator::{c1_coarse_upper, c1_enclosure_with, EnclosureOptions};
use crate::ledger::eta_cap;
use crate::polytope::{build_e, exact_volume};
use crate::rational::{int, rat, to_decimal_string, to_exact_string, ExactValue, Rational};

/// `1/2 + 7/300 + 17η/120`.
pub fn theta0(eta: &Rational) -> Rational {
    rat(1, 2) + rat(7, 300) + rat(17, 120) * eta
}

/// `161/600 - 359η/240`.
pub fn zeta_cut(eta: &Rational) -> Rational {
    rat(161, 600) - rat(359, 240) * eta
}

/// `2 / (θ (1 - c1))`: any exponent above this is admissible in
/// `H_m << exp(c0 m)`.
pub fn c0_exponent(theta: &Rational, c1_upper: &Rational) -> Result<Rational> {
    if !theta.is_positive() || theta >= &Rational::one() {
        return Err(Error::Input(format!(
            "theta = {} outside (0, 1)",
            to_exact_string(theta)
        )));
    }
    if c1_upper.is_negative() || c1_upper >= &Rational::one() {
        return Err(Error::Input(format!(
            "c1 = {} outside [0, 1)",
            to_exact_string(c1_upper)
        )));
    }
    Ok(int(2) / (theta * (Rational::one() - c1_upper)))
}

/// The product bound `θ (1 - c1) > 0.52427`.
pub fn product_threshold() -> Rational {
    rat(52427, 100000)
}

/// The headline exponent 3.815.
pub fn exponent_target() -> Rational {
    rat(3815, 1000)
}

/// The coarse bound on `c1(22/3295)`: `8 × 10^-6`.
pub fn c1_target() -> Rational {
    rat(8, 1_000_000)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub lhs: ExactValue,
    pub relation: &'static str,
    pub rhs: ExactValue,
    pub quote: &'static str,
}

impl Check {
    fn less(name: &'static str, lhs: Rational, rhs: Rational, quote: &'static str) -> Self {
        Check {
            name,
            pass: lhs < rhs,
            lhs: lhs.into(),
            relation: "<",
            rhs: rhs.into(),
            quote,
        }
    }

    fn less_eq(name: &'static str, lhs: Rational, rhs: Rational, quote: &'static str) -> Self {
        Check {
            name,
            pass: lhs <= rhs,
            lhs: lhs.into(),
            relation: "<=",
            rhs: rhs.into(),
            quote,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub eta: ExactValue,
    /// η sits exactly on the cap 22/3295 rather than strictly inside.
    pub eta_at_boundary: bool,
    pub theta0: ExactValue,
    pub c1_upper: ExactValue,
    pub product_lower: ExactValue,
    pub c0_upper: ExactValue,
    pub checks: Vec<Check>,
    pub overall: bool,
}

impl TheoremReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs the five exact checks of the final chain at `eta` with the given
/// certified upper bound on `c1(eta)`.
pub fn verify_main_theorem(eta: &Rational, c1_upper: &Rational) -> Result<TheoremReport> {
    if eta.is_negative() {
        return Err(Error::Input("eta must be nonnegative".into()));
    }
    let cap = eta_cap();
    let theta = theta0(eta);
    let product = &theta * (Rational::one() - c1_upper);
    let c0 = c0_exponent(&theta, c1_upper)?;
    let checks = vec![
        Check::less_eq(
            "eta-in-range",
            eta.clone(),
            cap.clone(),
            "We assume for the remainder of this work that eta<22/3295",
        ),
        Check::less(
            "c1-bound",
            c1_upper.clone(),
            c1_target(),
            "c_1(22/3295)<6x3x10^{-10}x4415<8x10^{-6}",
        ),
        Check::less(
            "product-bound",
            product_threshold(),
            product.clone(),
            "theta(eta)(1-c_1(eta))>...>0.52427",
        ),
        Check::less(
            "exponent-from-product",
            int(2) / product_threshold(),
            exponent_target(),
            "since 2/0.52427<3.815",
        ),
        Check::less(
            "c0-bound",
            c0.clone(),
            exponent_target(),
            "H_m << exp(3.815m)",
        ),
    ];
    let overall = checks.iter().all(|c| c.pass);
    Ok(TheoremReport {
        eta: eta.clone().into(),
        eta_at_boundary: eta == &cap,
        theta0: theta.into(),
        c1_upper: c1_upper.clone().into(),
        product_lower: product.into(),
        c0_upper: c0.into(),
        checks,
        overall,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum C1Method {
    Coarse,
    Enclosure,
}

/// Certified upper bound on `c1(eta)` by the chosen method.
pub fn c1_upper(eta: &Rational, method: C1Method, opts: &EnclosureOptions) -> Result<Rational> {
    match method {
        C1Method::Coarse => c1_coarse_upper(eta),
        C1Method::Enclosure => {
            let r = c1_enclosure_with(eta, opts)?;
            Ok(r.enclosure.hi().clone())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub eta: Rational,
    pub volume: Rational,
    pub c1_upper: Rational,
    pub theta0: Rational,
    pub c0: Rational,
}

/// `n` evenly spaced points on `[0, 22/3295]`, both ends included.
pub fn even_grid(n: usize) -> Vec<Rational> {
    let cap = eta_cap();
    match n {
        0 => Vec::new(),
        1 => vec![cap],
        _ => (0..n)
            .map(|k| &cap * rat(k as i64, (n - 1) as i64))
            .collect(),
    }
}

pub fn scan_eta(grid: &[Rational], method: C1Method, opts: &EnclosureOptions) -> Result<Vec<ScanRow>> {
    let cap = eta_cap();
    for eta in grid {
        if eta.is_negative() || eta > &cap {
            return Err(Error::Input(format!(
                "grid point {} outside [0, 22/3295]",
                to_exact_string(eta)
            )));
        }
    }
    grid.iter()
        .map(|eta| {
            let volume = exact_volume(&build_e(eta)?)?;
            let c1 = c1_upper(eta, method, opts)?;
            let theta = theta0(eta);
            let c0 = c0_exponent(&theta, &c1)?;
            Ok(ScanRow {
                eta: eta.clone(),
                volume,
                c1_upper: c1,
                theta0: theta,
                c0,
            })
        })
        .collect()
}

pub const SCAN_CSV_HEADER: &str = "eta,volume,c1_upper,theta0,c0";

/// Plot data: decimal renderings, one row per grid point.
pub fn write_scan_csv(rows: &[ScanRow], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{SCAN_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            to_decimal_string(&r.eta),
            to_decimal_string(&r.volume),
            to_decimal_string(&r.c1_upper),
            to_decimal_string(&r.theta0),
            to_decimal_string(&r.c0),
        )?;
    }
    Ok(())
}
