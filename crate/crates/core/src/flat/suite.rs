//! Randomized sweep over the flat-model identities.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{
    curvature_at, equivariance_check, field_with_zero_at, random_field, random_point, weyl_section_check,
    ConformalModel, FlatConformalField,
};
use crate::algebra::Element;
use crate::classifier::exp_ad;
use crate::constants::{FIELD_BRACKET_SIGN, IDENTITY_TOLERANCE, KILLING_TOLERANCE};
use crate::error::Result;
use crate::rational::{self, rat, ratio, Rat};
use crate::sampling;

pub const SUITE_TIMES: [f64; 3] = [0.1, -0.1, 0.05];

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport {
    pub signature: (usize, usize),
    pub fields: usize,
    pub max_tractor_derivative: f64,
    pub curvature_zero: bool,
    pub max_killing_residual: f64,
    pub killing_exact: bool,
    pub bracket_sign_holds: bool,
    pub max_equivariance: f64,
    pub max_weyl: f64,
    pub weyl_cases: usize,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.max_tractor_derivative < IDENTITY_TOLERANCE
            && self.curvature_zero
            && self.killing_exact
            && self.max_killing_residual < KILLING_TOLERANCE
            && self.bracket_sign_holds
            && self.max_equivariance < IDENTITY_TOLERANCE
            && self.max_weyl < IDENTITY_TOLERANCE
    }

    pub fn to_json(&self) -> Value {
        json!({
            "signature": [self.signature.0, self.signature.1],
            "fields": self.fields,
            "max_tractor_derivative": self.max_tractor_derivative,
            "curvature_exact_zero": self.curvature_zero,
            "max_killing_residual": self.max_killing_residual,
            "killing_exact_zero": self.killing_exact,
            "bracket_sign": FIELD_BRACKET_SIGN,
            "bracket_sign_holds": self.bracket_sign_holds,
            "max_equivariance_residual": self.max_equivariance,
            "max_weyl_residual": self.max_weyl,
            "weyl_cases": self.weyl_cases,
            "tolerance": IDENTITY_TOLERANCE,
            "passed": self.passed(),
        })
    }
}

fn small_direction<R: Rng>(model: &ConformalModel, rng: &mut R) -> Element {
    sampling::random_element(model.algebra(), -1..=-1, 0.0, rng).scale(&ratio(1, 4))
}

/// A holonomy in `p` conjugate into `g_0`, with `λ' = 0` half the time.
pub fn reducible_holonomy<R: Rng>(model: &ConformalModel, rng: &mut R) -> Element {
    let algebra = model.algebra();
    let mut x0 = sampling::random_element(algebra, 0..=0, 0.3, rng).scale(&ratio(1, 2));
    if rng.gen_bool(0.5) {
        let d = algebra.index_of("D").expect("conformal basis");
        x0 = &x0 - &algebra.basis_element(d).scale(&x0.coeffs()[d].clone());
    }
    let z = sampling::random_element(algebra, 1..=1, 0.3, rng).scale(&ratio(1, 4));
    exp_ad(&-&z, &x0).expect("p_+ acts nilpotently")
}

pub fn run_identity_suite(model: &ConformalModel, fields: usize, seed: u64) -> Result<IdentityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let algebra = model.algebra();
    let mut report = IdentityReport {
        signature: model.signature(),
        fields,
        max_tractor_derivative: 0.0,
        curvature_zero: true,
        max_killing_residual: 0.0,
        killing_exact: true,
        bracket_sign_holds: true,
        max_equivariance: 0.0,
        max_weyl: 0.0,
        weyl_cases: 0,
    };
    for _ in 0..fields {
        let f = random_field(model, &mut rng);
        let x = random_point(model, &mut rng);
        let xf: Vec<f64> = x.iter().map(rational::to_f64).collect();

        let y = sampling::random_element(algebra, -1..=-1, 0.0, &mut rng);
        let d = f.tractor_derivative(&y, &x)?;
        report.max_tractor_derivative = d.iter().fold(report.max_tractor_derivative, |m, v| m.max(v.abs()));

        let y2 = sampling::random_element(algebra, -1..=-1, 0.0, &mut rng);
        report.curvature_zero &= curvature_at(model, &y, &y2, &x)?.is_zero();

        report.killing_exact &= f.killing_residual(&x)?.is_zero();
        report.max_killing_residual = report.max_killing_residual.max(f.killing_residual_f64(&xf)?);

        let g = random_field(model, &mut rng);
        let fg = FlatConformalField::from_element(f.element().bracket(g.element())?)?;
        let comm: Vec<Rat> = f.field_commutator(&g, &x)?.iter().map(|c| c * rat(FIELD_BRACKET_SIGN)).collect();
        report.bracket_sign_holds &= fg.evaluate(&x)? == comm;

        // singular field with arbitrary holonomy for the equivariance identity
        let hol = sampling::random_element(algebra, 0..=1, 0.3, &mut rng).scale(&ratio(1, 2));
        let singular = field_with_zero_at(model, &x, &hol)?;
        let dir = small_direction(model, &mut rng);
        for t in SUITE_TIMES {
            report.max_equivariance = report.max_equivariance.max(equivariance_check(&singular, &x, &dir, t)?);
        }

        let reducible = field_with_zero_at(model, &x, &reducible_holonomy(model, &mut rng))?;
        report.max_weyl = report.max_weyl.max(weyl_section_check(&reducible, &x, SUITE_TIMES[0])?);
        report.weyl_cases += 1;
    }
    Ok(report)
}
