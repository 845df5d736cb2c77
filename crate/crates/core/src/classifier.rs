//! Deciding whether a holonomy datum `X ∈ p` is conjugate under `exp(p_+)`
//! into `g_0`, and whether its grade-0 part lies in `Ker(λ')`.
//!
//! `G_0`-conjugation is never searched: it preserves every grade and
//! `Ker(λ')`, and `P = G_0 ⋉ P_+`, so an `exp(p_+)` search is complete.

use nalgebra::DMatrix;
use num_traits::Zero;
use serde_json::{json, Map, Value};

use crate::algebra::{Algebra, Element};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::quadratic::{Feasibility, QuadraticSystem, Solution};
use crate::rational::{self, Rat};
use crate::scales::{default_scale, ScaleData};

/// `e^{ad z}(x)` for nilpotent `z` of strictly positive or strictly
/// negative grades; the series is finite.
pub fn exp_ad(z: &Element, x: &Element) -> Result<Element> {
    z.algebra().owns(x)?;
    let k = z.algebra().depth();
    if !z.supported_in(1..=k) && !z.supported_in(-k..=-1) {
        return Err(Error::Domain(format!("{z} is not supported in a single sign of grades")));
    }
    let mut term = x.clone();
    let mut sum = x.clone();
    for m in 1..=(2 * k + 1) {
        term = z.bracket(&term)?.scale(&Rat::new(1.into(), m.into()));
        if term.is_zero() {
            return Ok(sum);
        }
        sum = &sum + &term;
    }
    Err(Error::Invariant(format!("ad({z}) is not nilpotent")))
}

/// `e^{ad z}(x)` for `z ∈ p_+`.
pub fn conjugate_by_exp(z: &Element, x: &Element) -> Result<Element> {
    let k = z.algebra().depth();
    if !z.supported_in(1..=k) {
        return Err(Error::Domain(format!("conjugating element {z} must lie in p_+")));
    }
    exp_ad(z, x)
}

#[derive(Clone, Debug)]
pub struct HolonomyDatum {
    x: Element,
    scale: ScaleData,
}

impl HolonomyDatum {
    pub fn new(x: Element, scale: ScaleData) -> Result<Self> {
        scale.algebra().owns(&x)?;
        let k = x.algebra().depth();
        if !x.supported_in(0..=k) {
            return Err(Error::Domain(format!("holonomy {x} has components of negative grade")));
        }
        Ok(Self { x, scale })
    }

    pub fn with_default_scale(x: Element) -> Result<Self> {
        let scale = default_scale(x.algebra());
        Self::new(x, scale)
    }

    pub fn x(&self) -> &Element {
        &self.x
    }

    pub fn scale(&self) -> &ScaleData {
        &self.scale
    }

    pub fn algebra(&self) -> &Algebra {
        self.x.algebra()
    }

    /// The same datum in the gauge changed by `exp(z)`, `z ∈ p_+`.
    pub fn conjugated(&self, z: &Element) -> Result<Self> {
        Ok(Self { x: conjugate_by_exp(z, &self.x)?, scale: self.scale.clone() })
    }

    /// `λ'` of the grade-0 part, invariant under all of `P`.
    pub fn lambda(&self) -> Rat {
        self.scale.lambda_prime_unchecked(self.x.coeffs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Inessential,
    /// Conjugate into `g_0` but with `λ' != 0`: still essential.
    WeylReducible,
    Essential,
}

impl Verdict {
    pub fn is_essential(self) -> bool {
        !matches!(self, Verdict::Inessential)
    }

    pub fn name(self) -> &'static str {
        match self {
            Verdict::Inessential => "Inessential",
            Verdict::WeylReducible => "WeylReducible",
            Verdict::Essential => "Essential",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    LambdaNonzero(Rat),
    DegreeUnkillable(i32),
    QuadraticInfeasible(QuadraticSystem),
    /// The numeric search over the quadratic stage found no root.
    QuadraticUnresolved { system: QuadraticSystem, best_residual: f64 },
}

impl Certificate {
    pub fn to_json(&self) -> Value {
        match self {
            Certificate::LambdaNonzero(l) => json!({ "lambda_nonzero": rational::to_json(l) }),
            Certificate::DegreeUnkillable(d) => json!({ "degree_unkillable": d }),
            Certificate::QuadraticInfeasible(s) => json!({ "quadratic_infeasible": s.to_json() }),
            Certificate::QuadraticUnresolved { system, best_residual } => json!({
                "quadratic_unresolved": { "system": system.to_json(), "best_residual": best_residual }
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exactness {
    Exact,
    Numeric { residual: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub verdict: Verdict,
    pub witness: Option<Element>,
    pub certificate: Option<Certificate>,
    pub exactness: Exactness,
    /// `λ'` of the grade-0 part.
    pub lambda: Rat,
}

impl Classification {
    pub fn is_exact(&self) -> bool {
        self.exactness == Exactness::Exact
    }

    /// `verdict` reports essentiality; `reduction` says how far the datum
    /// could be conjugated.
    pub fn to_json(&self) -> Value {
        let k = self.lambda_algebra_depth();
        let mut map = Map::new();
        let verdict = if self.verdict.is_essential() { "Essential" } else { "Inessential" };
        map.insert("verdict".into(), json!(verdict));
        let reduction = match self.verdict {
            Verdict::Inessential => "ker_lambda",
            Verdict::WeylReducible => "g0",
            Verdict::Essential => "none",
        };
        map.insert("reduction".into(), json!(reduction));
        map.insert(
            "witness".into(),
            self.witness.as_ref().map_or(Value::Null, |w| w.to_named_json_in(1..=k)),
        );
        map.insert("certificate".into(), self.certificate.as_ref().map_or(Value::Null, Certificate::to_json));
        map.insert("lambda".into(), rational::to_json(&self.lambda));
        map.insert("exact".into(), json!(self.is_exact()));
        if let Exactness::Numeric { residual } = self.exactness {
            map.insert("residual".into(), json!(residual));
        }
        Value::Object(map)
    }

    fn lambda_algebra_depth(&self) -> i32 {
        self.witness.as_ref().map_or(0, |w| w.algebra().depth())
    }
}

/// Result of the `exp(p_+)` elimination.
#[derive(Clone, Debug, PartialEq)]
pub enum Elimination {
    Killed { z: Element, exactness: Exactness },
    Obstructed(Certificate),
}

/// `Z ∈ p_+` with `e^{ad Z} X ∈ g_0`, if one exists.
///
/// Undecided numeric searches are reported as `None`.
pub fn kill_positive_part(datum: &HolonomyDatum) -> Result<Option<Element>> {
    Ok(match eliminate(datum)? {
        Elimination::Killed { z, .. } => Some(z),
        Elimination::Obstructed(_) => None,
    })
}

/// Grade-by-grade elimination of the positive part, with certificates.
pub fn eliminate(datum: &HolonomyDatum) -> Result<Elimination> {
    let algebra = datum.algebra();
    let k = algebra.depth();
    if k > 2 {
        return Err(Error::UnsupportedDepth { k });
    }
    let x = datum.x();
    let x0 = x.component(0)?;
    let x1 = x.component(1)?;

    // degree 1: [X_0, Z_1] = X_1
    let a1 = algebra.ad_block(x0.coeffs(), 1, 1);
    let g1 = algebra.grade_indices(1);
    let rhs1 = restrict(x1.coeffs(), g1);
    let Some(z1_star) = a1.solve_min_norm(&rhs1) else {
        return Ok(Elimination::Obstructed(Certificate::DegreeUnkillable(1)));
    };
    let z1_star = extend(algebra, g1, &z1_star);
    if k == 1 {
        return finish(datum, z1_star, Exactness::Exact);
    }

    // degree 2 over the affine family Z_1(t) = Z_1* + Σ t_j N_j
    let kernel: Vec<Element> = a1.kernel().iter().map(|v| extend(algebra, g1, v)).collect();
    let g2 = algebra.grade_indices(2);
    let a2 = algebra.ad_block(x0.coeffs(), 2, 2);
    let cokernel = a2.left_kernel();
    let z1_at = |t: &[Rat]| -> Element {
        kernel.iter().zip(t).fold(z1_star.clone(), |acc, (n, tj)| &acc + &n.scale(tj))
    };
    let residual_at = |t: &[Rat]| -> Vec<Rat> {
        let conj = conjugate_by_exp(&z1_at(t), x).expect("grade-1 element");
        restrict(conj.coeffs(), g2)
    };
    let system = QuadraticSystem::interpolate(kernel.len(), cokernel.len(), |t| {
        let r = residual_at(t);
        cokernel.iter().map(|w| rational::dot(w, &r)).collect()
    })?;

    let (t, exactness) = match system.decide() {
        Feasibility::Feasible(Solution::Exact(t)) => (t, Exactness::Exact),
        Feasibility::Feasible(Solution::Numeric { point, residual }) => {
            let t = point.iter().map(|&v| rational::from_f64(v).unwrap_or_default()).collect();
            (t, Exactness::Numeric { residual })
        }
        Feasibility::Infeasible => return Ok(Elimination::Obstructed(Certificate::QuadraticInfeasible(system))),
        Feasibility::Undecided { best_residual } => {
            return Ok(Elimination::Obstructed(Certificate::QuadraticUnresolved { system, best_residual }))
        }
    };
    let z1 = z1_at(&t);
    let r = residual_at(&t);
    // [X_0, Z_2] = r
    let z2 = match a2.solve_min_norm(&r) {
        Some(z2) => z2,
        None if exactness != Exactness::Exact => least_squares(&a2, &r),
        None => return Err(Error::Invariant("degree-2 residual left the image after a feasible solve".into())),
    };
    let z = &z1 + &extend(algebra, g2, &z2);
    finish(datum, z, exactness)
}

fn finish(datum: &HolonomyDatum, z: Element, exactness: Exactness) -> Result<Elimination> {
    let conj = conjugate_by_exp(&z, datum.x())?;
    let k = datum.algebra().depth();
    match exactness {
        Exactness::Exact if !conj.components(1..=k).is_zero() => {
            Err(Error::Invariant(format!("witness {z} leaves a positive part")))
        }
        Exactness::Exact => Ok(Elimination::Killed { z, exactness }),
        Exactness::Numeric { .. } => {
            let residual = conj.components(1..=k).to_f64().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            Ok(Elimination::Killed { z, exactness: Exactness::Numeric { residual } })
        }
    }
}

/// Minimum-norm least-squares solution through the normal equations.
fn least_squares(a: &Matrix, b: &[Rat]) -> Vec<Rat> {
    let at = a.transpose();
    at.mul(a).solve_min_norm(&at.mul_vec(b)).expect("normal equations are consistent")
}

fn restrict(coeffs: &[Rat], indices: &[usize]) -> Vec<Rat> {
    indices.iter().map(|&i| coeffs[i].clone()).collect()
}

fn extend(algebra: &Algebra, indices: &[usize], v: &[Rat]) -> Element {
    let mut coeffs = vec![Rat::zero(); algebra.dim()];
    for (&i, c) in indices.iter().zip(v) {
        coeffs[i] = c.clone();
    }
    algebra.element(coeffs).expect("dimension matches")
}

pub fn classify(datum: &HolonomyDatum) -> Result<Classification> {
    let lambda = datum.lambda();
    Ok(match eliminate(datum)? {
        Elimination::Killed { z, exactness } if lambda.is_zero() => Classification {
            verdict: Verdict::Inessential,
            witness: Some(z),
            certificate: None,
            exactness,
            lambda,
        },
        Elimination::Killed { z, exactness } => Classification {
            verdict: Verdict::WeylReducible,
            witness: Some(z),
            certificate: Some(Certificate::LambdaNonzero(lambda.clone())),
            exactness,
            lambda,
        },
        Elimination::Obstructed(certificate) => {
            let exactness = match &certificate {
                Certificate::QuadraticUnresolved { best_residual, .. } => {
                    Exactness::Numeric { residual: *best_residual }
                }
                _ => Exactness::Exact,
            };
            Classification { verdict: Verdict::Essential, witness: None, certificate: Some(certificate), exactness, lambda }
        }
    })
}

/// `h^t = exp(t ρ(x))` in the matrix realization.
pub fn holonomy_flow(datum: &HolonomyDatum, t: f64) -> Result<DMatrix<f64>> {
    let rho = datum.algebra().realize_f64(&datum.x().to_f64())?;
    Ok((rho * t).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_conformal, build_cr};
    use crate::rational::{rat, ratio};

    fn conformal3() -> Algebra {
        build_conformal(3, 0).unwrap()
    }

    fn datum(a: &Algebra, terms: &[(&str, Rat)]) -> HolonomyDatum {
        HolonomyDatum::with_default_scale(a.combination(terms).unwrap()).unwrap()
    }

    #[test]
    fn conjugation_by_zero_is_identity() {
        let a = conformal3();
        let x = a.combination(&[("D", rat(2)), ("K_1", rat(3))]).unwrap();
        assert_eq!(conjugate_by_exp(&a.zero(), &x).unwrap(), x);
    }

    #[test]
    fn conjugation_rejects_non_positive_z() {
        let a = conformal3();
        let x = a.named("D").unwrap();
        assert!(matches!(conjugate_by_exp(&a.named("M_12").unwrap(), &x), Err(Error::Domain(_))));
        assert!(matches!(conjugate_by_exp(&a.named("P_1").unwrap(), &x), Err(Error::Domain(_))));
    }

    #[test]
    fn conjugating_d_by_k() {
        // e^{ad K_1} D = D + [K_1, D] = D - K_1
        let a = conformal3();
        let c = conjugate_by_exp(&a.named("K_1").unwrap(), &a.named("D").unwrap()).unwrap();
        assert_eq!(c, a.combination(&[("D", rat(1)), ("K_1", rat(-1))]).unwrap());
    }

    #[test]
    fn datum_rejects_negative_grades() {
        let a = conformal3();
        let err = HolonomyDatum::with_default_scale(a.named("P_1").unwrap()).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn catalog() {
        let a = conformal3();
        let d = classify(&datum(&a, &[("D", rat(1))])).unwrap();
        assert_eq!(d.verdict, Verdict::WeylReducible);
        assert_eq!(d.certificate, Some(Certificate::LambdaNonzero(rat(6))));

        let m = classify(&datum(&a, &[("M_12", rat(1))])).unwrap();
        assert_eq!(m.verdict, Verdict::Inessential);
        assert!(m.witness.unwrap().is_zero());

        let k = classify(&datum(&a, &[("K_1", rat(1))])).unwrap();
        assert_eq!(k.verdict, Verdict::Essential);
        assert_eq!(k.certificate, Some(Certificate::DegreeUnkillable(1)));
    }

    #[test]
    fn rotation_plus_special_has_explicit_witness() {
        // [M_12, K_1] = -K_2 and [M_12, K_2] = K_1, so Z = K_2 solves [M_12, Z] = K_1
        let a = conformal3();
        let m = a.named("M_12").unwrap();
        assert_eq!(m.bracket(&a.named("K_2").unwrap()).unwrap(), a.named("K_1").unwrap());
        let dat = datum(&a, &[("M_12", rat(1)), ("K_1", rat(1))]);
        let c = classify(&dat).unwrap();
        assert_eq!(c.verdict, Verdict::Inessential);
        let z = c.witness.unwrap();
        assert_eq!(z, a.named("K_2").unwrap());
        assert_eq!(conjugate_by_exp(&z, dat.x()).unwrap(), m);
    }

    #[test]
    fn rotation_plus_k3_is_unkillable() {
        // K_3 is fixed by M_12, so it is not in the image of ad(M_12)
        let a = conformal3();
        let c = classify(&datum(&a, &[("M_12", rat(1)), ("K_3", rat(1))])).unwrap();
        assert_eq!(c.certificate, Some(Certificate::DegreeUnkillable(1)));
    }

    #[test]
    fn json_shape() {
        let a = conformal3();
        let j = classify(&datum(&a, &[("D", rat(1))])).unwrap().to_json();
        assert_eq!(j["verdict"], "Essential");
        assert_eq!(j["certificate"], json!({"lambda_nonzero": 6}));
        assert_eq!(j["reduction"], "g0");
        let j = classify(&datum(&a, &[("M_12", rat(1))])).unwrap().to_json();
        assert_eq!(j["verdict"], "Inessential");
        assert_eq!(j["witness"], json!({"K_1": 0, "K_2": 0, "K_3": 0}));
    }

    #[test]
    fn su21_grade_two_obstruction() {
        let a = build_cr(1).unwrap();
        // pure T cannot be removed: ad(0) has zero image
        let c = classify(&datum(&a, &[("T", rat(1))])).unwrap();
        assert_eq!(c.verdict, Verdict::Essential);
        assert!(matches!(c.certificate, Some(Certificate::QuadraticInfeasible(_))));
        assert!(c.is_exact());
        // E + T: ad(E) is 2 on g_2, so T is killed by Z = T/2
        let c = classify(&datum(&a, &[("E", rat(1)), ("T", rat(1))])).unwrap();
        assert_eq!(c.verdict, Verdict::WeylReducible);
        assert_eq!(c.witness.unwrap(), a.combination(&[("T", ratio(1, 2))]).unwrap());
    }

    #[test]
    fn su21_degree_two_needs_the_kernel() {
        // X = J + K_1: ad(J) is invertible on g_1, and the induced grade-2
        // residual is either killed or certified; either way the witness checks out
        let a = build_cr(1).unwrap();
        let dat = datum(&a, &[("J", rat(1)), ("K_1", rat(1)), ("T", rat(3))]);
        let c = classify(&dat).unwrap();
        if let Some(z) = &c.witness {
            assert!(conjugate_by_exp(z, dat.x()).unwrap().components(1..=2).is_zero());
        }
        assert!(c.is_exact());
    }

    #[test]
    fn weyl_reducible_counts_as_essential() {
        assert!(Verdict::WeylReducible.is_essential());
        assert!(!Verdict::Inessential.is_essential());
    }

    #[test]
    fn flow_is_a_one_parameter_group() {
        let a = conformal3();
        let dat = datum(&a, &[("D", rat(1)), ("M_12", rat(2)), ("K_1", rat(1))]);
        let id = holonomy_flow(&dat, 0.0).unwrap();
        assert!((id - DMatrix::identity(5, 5)).amax() < 1e-14);
        let (s, t) = (0.3, -0.7);
        let lhs = holonomy_flow(&dat, s + t).unwrap();
        let rhs = holonomy_flow(&dat, s).unwrap() * holonomy_flow(&dat, t).unwrap();
        assert!((lhs - rhs).amax() < 1e-10);
    }

    #[test]
    fn nilpotent_flow_is_quadratic_in_t() {
        let a = conformal3();
        let dat = datum(&a, &[("K_1", rat(1))]);
        let rho = a.realize(dat.x().coeffs()).unwrap();
        assert!(!rho.mul(&rho).is_zero());
        assert!(rho.mul(&rho).mul(&rho).is_zero());
        // exp(tρ) = I + tρ + t²ρ²/2 exactly
        let t = 1.5;
        let r = rho.to_f64();
        let poly = DMatrix::identity(5, 5) + &r * t + &r * &r * (t * t / 2.0);
        assert!((holonomy_flow(&dat, t).unwrap() - poly).amax() < 1e-12);
    }
}
