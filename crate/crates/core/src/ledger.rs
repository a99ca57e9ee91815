//! Affine-in-η threshold claims and their exact verification.
//!
//! Every claim has the shape `lhs_const + lhs_eta·η  <  rhs_const + rhs_eta·η`
//! (or `<=`), which holds exactly for η below a single rational threshold.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{rat, to_exact_string, ExactValue, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    Strict,
    NonStrict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdClaim {
    pub name: &'static str,
    pub lhs_const: Rational,
    pub lhs_eta_coeff: Rational,
    pub rhs_const: Rational,
    pub rhs_eta_coeff: Rational,
    pub comparison: Comparison,
    pub claimed_threshold: Rational,
    pub source: &'static str,
}

impl ThresholdClaim {
    pub fn lhs_at(&self, eta: &Rational) -> Rational {
        &self.lhs_const + &self.lhs_eta_coeff * eta
    }

    pub fn rhs_at(&self, eta: &Rational) -> Rational {
        &self.rhs_const + &self.rhs_eta_coeff * eta
    }

    /// Exact evaluation of the inequality at `eta`.
    pub fn holds_at(&self, eta: &Rational) -> bool {
        let (l, r) = (self.lhs_at(eta), self.rhs_at(eta));
        match self.comparison {
            Comparison::Strict => l < r,
            Comparison::NonStrict => l <= r,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.lhs_eta_coeff == self.rhs_eta_coeff {
            return Err(Error::NoThreshold);
        }
        if !self.claimed_threshold.is_positive() {
            return Err(Error::Input(format!(
                "claim {}: claimed threshold must be positive",
                self.name
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationResult {
    pub name: &'static str,
    pub pass: bool,
    pub computed_threshold: ExactValue,
    pub claimed_threshold: ExactValue,
    /// Inequality holds just below the computed threshold.
    pub holds_below: bool,
    /// Inequality fails just above the computed threshold.
    pub fails_above: bool,
    pub comparison: Comparison,
    pub source: &'static str,
}

/// The exact η below which `lhs_const + lhs_eta·η < rhs_const + rhs_eta·η`.
///
/// Requires `lhs_eta_coeff > rhs_eta_coeff`, i.e. the inequality tightens as η
/// grows.
pub fn solve_affine_threshold(
    lhs_const: &Rational,
    lhs_eta_coeff: &Rational,
    rhs_const: &Rational,
    rhs_eta_coeff: &Rational,
) -> Result<Rational> {
    let slope = lhs_eta_coeff - rhs_eta_coeff;
    if slope.is_zero() {
        return Err(Error::NoThreshold);
    }
    if slope.is_negative() {
        return Err(Error::Input(
            "inequality loosens as eta grows; no upper threshold".into(),
        ));
    }
    Ok((rhs_const - lhs_const) / slope)
}

pub fn verify_claim(claim: &ThresholdClaim) -> Result<VerificationResult> {
    claim.validate()?;
    let tau = solve_affine_threshold(
        &claim.lhs_const,
        &claim.lhs_eta_coeff,
        &claim.rhs_const,
        &claim.rhs_eta_coeff,
    )?;
    let nudge = rat(1, 1000);
    let below = &tau * (Rational::one() - &nudge);
    let above = &tau * (Rational::one() + &nudge);
    // With tau <= 0 both probes sit on the same side; the flip check still
    // tells the truth about them.
    let holds_below = claim.holds_at(&below);
    let fails_above = !claim.holds_at(&above);
    let pass = tau == claim.claimed_threshold && holds_below && fails_above;
    Ok(VerificationResult {
        name: claim.name,
        pass,
        computed_threshold: tau.into(),
        claimed_threshold: claim.claimed_threshold.clone().into(),
        holds_below,
        fails_above,
        comparison: claim.comparison,
        source: claim.source,
    })
}

/// Static table: name, (lhs_const, lhs_eta), (rhs_const, rhs_eta), comparison,
/// claimed threshold, source quote. Auxiliary parameters (δ) are at their
/// δ → 0 limit.
type ClaimRow = (
    &'static str,
    (i64, i64),
    (i64, i64),
    (i64, i64),
    (i64, i64),
    Comparison,
    (i64, i64),
    &'static str,
);

const CLAIMS: [ClaimRow; 9] = [
    (
        "alpha3-below-zeta",
        (1, 5),
        (1, 2),
        (161, 600),
        (-359, 240),
        Comparison::Strict,
        (82, 2395),
        "1/5 + eta/2 < 161/600 - 359 eta/240, \"that is eta<82/2395\"",
    ),
    (
        "alpha2-below-zeta",
        (1, 5),
        (4, 3),
        (161, 600),
        (-359, 240),
        Comparison::Strict,
        (82, 3395),
        "1/5 + 4 eta/3 < 161/600 - 359 eta/240 \"<-> eta < 82/3395\"",
    ),
    (
        "type0-range",
        (157, 300),
        (17, 120),
        (3, 5),
        (-1, 1),
        Comparison::Strict,
        (46, 685),
        "1/2 + 7/300 + 17 eta/120 < 3/5 - eta, \"that is if eta<46/685\"",
    ),
    (
        "type2-part-iii",
        (7, 600),
        (17, 240),
        (1, 80),
        (1, 32),
        Comparison::NonStrict,
        (2, 95),
        "7/600 + 17 eta/240 <= 1/80 + eta/32, \"provided that eta<2/95\"",
    ),
    (
        "type2-part-iv",
        (7, 600),
        (17, 240),
        (1, 68),
        (0, 1),
        Comparison::NonStrict,
        (62, 1445),
        "7/600 + 17 eta/240 <= 1/68, \"provided that eta<62/1445\"",
    ),
    (
        "type3",
        // 1/18 + (28/9)(7/600) and (28/9)(17/240)
        (62, 675),
        (119, 540),
        (1, 10),
        (-1, 1),
        Comparison::Strict,
        (22, 3295),
        "1/10 - eta > 1/18 + (28/9)(7/600 + 17 eta/240), \"that is eta<22/3295\"",
    ),
    (
        "lem2-bound",
        (199, 600),
        (119, 240),
        (2, 5),
        (-4, 1),
        Comparison::NonStrict,
        (82, 5395),
        "2/5 - 4 eta >= 199/600 + 119 eta/240, \"Since eta<82/5395 this contradicts\"",
    ),
    (
        "rho3-prime",
        (1, 1),
        (0, 1),
        (6, 5),
        (-12, 1),
        Comparison::Strict,
        (1, 60),
        "6/5 - 12 eta > 1, \"since eta<1/60\"",
    ),
    (
        "rho4-prime",
        (1, 1),
        (0, 1),
        (6, 5),
        (-7, 1),
        Comparison::Strict,
        (1, 35),
        "6/5 - 7 eta > 1, \"greater than 1 if eta<1/35\"",
    ),
];

pub fn builtin_claims() -> Vec<ThresholdClaim> {
    CLAIMS
        .iter()
        .map(|&(name, lc, le, rc, re, comparison, thr, source)| ThresholdClaim {
            name,
            lhs_const: rat(lc.0, lc.1),
            lhs_eta_coeff: rat(le.0, le.1),
            rhs_const: rat(rc.0, rc.1),
            rhs_eta_coeff: rat(re.0, re.1),
            comparison,
            claimed_threshold: rat(thr.0, thr.1),
            source,
        })
        .collect()
}

/// The global η cap: the Type III threshold.
pub fn eta_cap() -> Rational {
    rat(22, 3295)
}

pub fn verify_all() -> Vec<VerificationResult> {
    builtin_claims()
        .iter()
        .map(|c| verify_claim(c).expect("builtin claims are well-formed"))
        .collect()
}

/// Pretty-printed JSON array of results.
pub fn results_to_json(results: &[VerificationResult]) -> String {
    serde_json::to_string_pretty(results).expect("results serialize")
}

impl std::fmt::Display for VerificationResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{:<20} {} computed {} claimed {}",
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            to_exact_string(&self.computed_threshold.0),
            to_exact_string(&self.claimed_threshold.0),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, pow10_neg};
    use proptest::prelude::*;

    #[test]
    fn threshold_examples() {
        let z0 = rat(161, 600);
        let z1 = rat(-359, 240);
        assert_eq!(
            solve_affine_threshold(&rat(1, 5), &rat(1, 2), &z0, &z1).unwrap(),
            rat(82, 2395)
        );
        assert_eq!(
            solve_affine_threshold(&rat(1, 5), &rat(4, 3), &z0, &z1).unwrap(),
            rat(82, 3395)
        );
        assert_eq!(
            solve_affine_threshold(&int(0), &int(1), &int(1), &int(0)).unwrap(),
            int(1)
        );
    }

    #[test]
    fn equal_coefficients_have_no_threshold() {
        let r = solve_affine_threshold(&int(0), &rat(1, 2), &int(1), &rat(1, 2));
        assert_eq!(r, Err(Error::NoThreshold));
    }

    #[test]
    fn nine_claims_all_verify() {
        let claims = builtin_claims();
        assert_eq!(claims.len(), 9);
        for c in &claims {
            let v = verify_claim(c).unwrap();
            assert!(v.pass, "{v}");
        }
        let type3 = claims.iter().find(|c| c.name == "type3").unwrap();
        assert_eq!(type3.claimed_threshold, eta_cap());
    }

    #[test]
    fn type3_constants_expand_correctly() {
        let w0 = rat(7, 600);
        let w1 = rat(17, 240);
        let k = rat(28, 9);
        let type3 = &builtin_claims()[5];
        assert_eq!(type3.lhs_const, rat(1, 18) + &k * w0);
        assert_eq!(type3.lhs_eta_coeff, k * w1);
    }

    #[test]
    fn perturbed_claim_fails() {
        let mut c = builtin_claims()[0].clone();
        c.claimed_threshold = rat(82, 2396);
        assert!(!verify_claim(&c).unwrap().pass);
    }

    #[test]
    fn malformed_claims_rejected() {
        let mut c = builtin_claims()[0].clone();
        c.rhs_eta_coeff = c.lhs_eta_coeff.clone();
        assert_eq!(verify_claim(&c), Err(Error::NoThreshold));
        let mut c = builtin_claims()[0].clone();
        c.claimed_threshold = int(0);
        assert!(matches!(verify_claim(&c), Err(Error::Input(_))));
    }

    #[test]
    fn boundary_flips_within_a_millionth() {
        let eps = pow10_neg(6);
        for c in builtin_claims() {
            let t = &c.claimed_threshold;
            assert!(c.holds_at(&(t - &eps)), "{}", c.name);
            assert!(!c.holds_at(&(t + &eps)), "{}", c.name);
        }
    }

    #[test]
    fn type2_binding_threshold_is_2_over_95() {
        let c = builtin_claims();
        assert!(c[3].claimed_threshold < c[4].claimed_threshold);
    }

    fn small_rat() -> impl Strategy<Value = Rational> {
        (-1000i64..1000, 1i64..500).prop_map(|(n, d)| rat(n, d))
    }

    proptest! {
        #[test]
        fn threshold_is_scale_invariant(
            a in small_rat(), b in small_rat(), c in small_rat(), d in small_rat(),
            sn in 1i64..1000, sd in 1i64..1000,
        ) {
            prop_assume!(b > d);
            let s = rat(sn, sd);
            let t1 = solve_affine_threshold(&a, &b, &c, &d).unwrap();
            let t2 = solve_affine_threshold(&(&a * &s), &(&b * &s), &(&c * &s), &(&d * &s)).unwrap();
            prop_assert_eq!(t1, t2);
        }
    }
}
