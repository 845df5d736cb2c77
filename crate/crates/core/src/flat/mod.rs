//! The flat conformal model in the chart `x ↦ [ℓ(x)]`, `ℓ(x) = (1, x, -<x,x>/2)`.
//!
//! An element `ξ` of so(p+1, q+1) acts on null lines by the defining
//! representation; its field on the chart is
//! `X(x) = a + A x + s x + <x,x> b - 2 <b,x> x` with
//! `a = coeff(P)`, `s = -coeff(D)`, `A_ab = η_b coeff(M_ab)`, `b = coeff(K)`.
//!
//! The chart is covered by the gauge `u(x) = exp(P_x)`, in which the
//! Maurer-Cartan form pulls back to `dx ↦ P_dx` and the adjoint tractor of
//! `ξ` is `s(x) = e^{-ad P_x} ξ`.

mod integrate;
pub mod suite;

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde_json::{json, Value};

pub use integrate::{block_ldu, equivariance_check, rk4_flow, weyl_section_check, BlockLdu};

use crate::algebra::{build_conformal, Algebra, Element, Family};
use crate::classifier::{classify, exp_ad, Classification, HolonomyDatum};
use crate::constants::FD_STEP;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rational::{self, rat, ratio, Rat};
use crate::sampling;

#[derive(Clone, Debug)]
pub struct ConformalModel {
    algebra: Algebra,
    p: usize,
    q: usize,
}

impl ConformalModel {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        Self::from_algebra(&build_conformal(p, q)?)
    }

    pub fn from_algebra(algebra: &Algebra) -> Result<Self> {
        let d = algebra.descriptor();
        if d.family != Family::Conformal || d.params.len() != 2 {
            return Err(Error::Unsupported(format!("no flat model is realized for {d}")));
        }
        Ok(Self { algebra: algebra.clone(), p: d.params[0] as usize, q: d.params[1] as usize })
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.p + self.q
    }

    pub fn signature(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    /// `η_i` for the 0-based coordinate `i`.
    pub fn eta(&self, i: usize) -> i64 {
        if i < self.p {
            1
        } else {
            -1
        }
    }

    pub fn inner(&self, x: &[Rat], y: &[Rat]) -> Rat {
        x.iter().zip(y).enumerate().fold(Rat::zero(), |acc, (i, (a, b))| acc + a * b * rat(self.eta(i)))
    }

    pub fn inner_f64(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter().zip(y).enumerate().map(|(i, (a, b))| a * b * self.eta(i) as f64).sum()
    }

    pub fn check_point<T>(&self, x: &[T]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Domain(format!("point has {} coordinates, expected {}", x.len(), self.dim())));
        }
        Ok(())
    }

    fn p_index(&self, i: usize) -> usize {
        self.algebra.grade_indices(-1)[i]
    }

    /// `P_x = Σ x_i P_{i+1}`.
    pub fn translation(&self, x: &[Rat]) -> Element {
        let mut coeffs = vec![Rat::zero(); self.algebra.dim()];
        for (i, c) in x.iter().enumerate() {
            coeffs[self.p_index(i)] = c.clone();
        }
        self.algebra.element(coeffs).expect("dimension matches")
    }

    fn translation_f64(&self, x: &[f64]) -> Vec<f64> {
        let mut coeffs = vec![0.0; self.algebra.dim()];
        for (i, &c) in x.iter().enumerate() {
            coeffs[self.p_index(i)] = c;
        }
        coeffs
    }

    /// Chart direction of `Y ∈ g_-`.
    pub fn direction(&self, y: &Element) -> Result<Vec<Rat>> {
        self.algebra.owns(y)?;
        if !y.supported_in(-1..=-1) {
            return Err(Error::Domain(format!("{y} does not lie in g_-")));
        }
        Ok((0..self.dim()).map(|i| y.coeffs()[self.p_index(i)].clone()).collect())
    }

    /// `u(x) = exp(ρ(P_x)) = I + ρ + ρ²/2`.
    pub fn gauge(&self, x: &[Rat]) -> Matrix {
        let r = self.algebra.realize(self.translation(x).coeffs()).expect("conformal algebras are realized");
        Matrix::identity(r.rows()).add(&r).add(&r.mul(&r).scale(&ratio(1, 2)))
    }

    pub fn gauge_f64(&self, x: &[f64]) -> DMatrix<f64> {
        let r = self.algebra.realize_f64(&self.translation_f64(x)).expect("conformal algebras are realized");
        DMatrix::identity(r.nrows(), r.ncols()) + &r + &r * &r * 0.5
    }

    /// The null vector `ℓ(x)`.
    pub fn null_vector(&self, x: &[Rat]) -> Vec<Rat> {
        let mut v = vec![Rat::one()];
        v.extend(x.iter().cloned());
        v.push(-self.inner(x, x) / rat(2));
        v
    }

    /// Chart coordinates of the line through `v`, if it meets the chart.
    pub fn chart_of(&self, v: &[f64]) -> Option<Vec<f64>> {
        let v0 = v[0];
        let norm = v.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if v0.abs() <= crate::constants::CHART_ESCAPE * norm.max(1.0) {
            return None;
        }
        Some(v[1..=self.dim()].iter().map(|c| c / v0).collect())
    }

    /// Pulled-back Maurer-Cartan form `u(x)^{-1} ∂_v u(x)`, with the
    /// derivative taken by a five-point stencil, exact on the polynomial gauge.
    pub fn pulled_back_form(&self, x: &[Rat], v: &[Rat]) -> Result<Element> {
        let du = stencil(|s| self.gauge(&shift(x, v, s)), |m, c| m.scale(c), Matrix::add);
        let form = self.gauge(&negate(x)).mul(&du);
        let coeffs = self
            .algebra
            .coordinates_of(&form)?
            .ok_or_else(|| Error::Invariant("pulled-back form left the algebra".into()))?;
        self.algebra.element(coeffs)
    }
}

fn shift(x: &[Rat], v: &[Rat], s: &Rat) -> Vec<Rat> {
    x.iter().zip(v).map(|(a, b)| a + b * s).collect()
}

fn negate(x: &[Rat]) -> Vec<Rat> {
    x.iter().map(|c| -c).collect()
}

/// `(-f(2) + 8 f(1) - 8 f(-1) + f(-2)) / 12`, the derivative at 0 of any
/// polynomial of degree at most 4.
fn stencil<T, F, S, A>(f: F, scale: S, add: A) -> T
where
    F: Fn(&Rat) -> T,
    S: Fn(&T, &Rat) -> T,
    A: Fn(&T, &T) -> T,
{
    let terms = [(2, -1), (1, 8), (-1, -8), (-2, 1)];
    let mut acc: Option<T> = None;
    for (s, w) in terms {
        let v = scale(&f(&rat(s)), &ratio(w, 12));
        acc = Some(match acc {
            None => v,
            Some(a) => add(&a, &v),
        });
    }
    acc.expect("four stencil terms")
}

/// Parameters `(a, A, s, b)` of a field.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldParams {
    pub a: Vec<Rat>,
    pub rotation: Matrix,
    pub s: Rat,
    pub b: Vec<Rat>,
}

#[derive(Clone, Debug)]
pub struct FlatConformalField {
    model: ConformalModel,
    xi: Element,
}

/// Outcome of classifying a field at a point.
#[derive(Clone, Debug)]
pub enum PointVerdict {
    /// `X(x) != 0`: locally inessential without further work.
    NonSingular { value: Vec<Rat> },
    Singular { datum: HolonomyDatum, classification: Classification },
}

impl FlatConformalField {
    pub fn from_element(xi: Element) -> Result<Self> {
        let model = ConformalModel::from_algebra(xi.algebra())?;
        Ok(Self { model, xi })
    }

    pub fn from_params(model: &ConformalModel, params: &FieldParams) -> Result<Self> {
        let n = model.dim();
        if params.a.len() != n || params.b.len() != n {
            return Err(Error::Domain(format!("a and b need {n} components")));
        }
        let r = &params.rotation;
        if r.rows() != n || r.cols() != n {
            return Err(Error::Domain(format!("A must be {n}x{n}")));
        }
        for i in 0..n {
            for j in 0..n {
                // η A is antisymmetric
                if r[(i, j)].clone() * rat(model.eta(i)) != -(r[(j, i)].clone() * rat(model.eta(j))) {
                    return Err(Error::Domain(format!("A is not in so({},{}) at ({i},{j})", model.p, model.q)));
                }
            }
        }
        let algebra = model.algebra();
        let mut coeffs = vec![Rat::zero(); algebra.dim()];
        let idx = |name: String| algebra.index_of(&name).expect("standard basis names");
        for i in 0..n {
            coeffs[idx(format!("P_{}", i + 1))] = params.a[i].clone();
            coeffs[idx(format!("K_{}", i + 1))] = params.b[i].clone();
            for j in (i + 1)..n {
                let name = crate::algebra::rotation_name(n, i + 1, j + 1);
                coeffs[idx(name)] = &r[(i, j)] * rat(model.eta(j));
            }
        }
        coeffs[idx("D".into())] = -params.s.clone();
        Ok(Self { model: model.clone(), xi: algebra.element(coeffs)? })
    }

    pub fn params(&self) -> FieldParams {
        let n = self.model.dim();
        let c = |name: String| self.xi.coeff(&name).expect("standard basis names").clone();
        let mut rotation = Matrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let m = c(crate::algebra::rotation_name(n, i + 1, j + 1));
                rotation[(i, j)] = &m * rat(self.model.eta(j));
                rotation[(j, i)] = -(&m * rat(self.model.eta(i)));
            }
        }
        FieldParams {
            a: (1..=n).map(|i| c(format!("P_{i}"))).collect(),
            rotation,
            s: -c("D".into()),
            b: (1..=n).map(|i| c(format!("K_{i}"))).collect(),
        }
    }

    pub fn model(&self) -> &ConformalModel {
        &self.model
    }

    pub fn element(&self) -> &Element {
        &self.xi
    }

    pub fn to_json(&self) -> Value {
        let p = self.params();
        let rows: Vec<Value> = (0..p.rotation.rows()).map(|r| rational::vec_to_json(p.rotation.row(r))).collect();
        let (sp, sq) = self.model.signature();
        json!({
            "a": rational::vec_to_json(&p.a),
            "A": rows,
            "s": rational::to_json(&p.s),
            "b": rational::vec_to_json(&p.b),
            "signature": [sp, sq],
        })
    }

    /// `X(x)` from the closed formula.
    pub fn evaluate(&self, x: &[Rat]) -> Result<Vec<Rat>> {
        self.model.check_point(x)?;
        let p = self.params();
        let xx = self.model.inner(x, x);
        let bx = self.model.inner(&p.b, x);
        let ax = p.rotation.mul_vec(x);
        Ok((0..x.len())
            .map(|i| &p.a[i] + &ax[i] + &p.s * &x[i] + &xx * &p.b[i] - rat(2) * &bx * &x[i])
            .collect())
    }

    pub fn evaluate_f64(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.model.check_point(x)?;
        let p = self.params();
        let f = |v: &[Rat]| v.iter().map(rational::to_f64).collect::<Vec<_>>();
        let (a, b, s) = (f(&p.a), f(&p.b), rational::to_f64(&p.s));
        let rot = p.rotation.to_f64();
        let xx = self.model.inner_f64(x, x);
        let bx = self.model.inner_f64(&b, x);
        Ok((0..x.len())
            .map(|i| {
                let ax: f64 = (0..x.len()).map(|j| rot[(i, j)] * x[j]).sum();
                a[i] + ax + s * x[i] + xx * b[i] - 2.0 * bx * x[i]
            })
            .collect())
    }

    /// `X(x)` from the action on null lines: `(ρ(ξ) ℓ)_mid - x (ρ(ξ) ℓ)_0`.
    pub fn evaluate_by_action(&self, x: &[Rat]) -> Result<Vec<Rat>> {
        self.model.check_point(x)?;
        let v = self.model.algebra().realize(self.xi.coeffs())?.mul_vec(&self.model.null_vector(x));
        Ok((0..x.len()).map(|i| &v[i + 1] - &x[i] * &v[0]).collect())
    }

    pub fn is_singular_at(&self, x: &[Rat]) -> Result<bool> {
        Ok(rational::is_zero_vec(&self.evaluate(x)?))
    }

    /// Adjoint tractor `s(x) = e^{-ad P_x} ξ` in the standard gauge.
    pub fn tractor(&self, x: &[Rat]) -> Result<Element> {
        self.model.check_point(x)?;
        exp_ad(&-&self.model.translation(x), &self.xi)
    }

    pub fn tractor_f64(&self, x: &[f64]) -> Vec<f64> {
        let algebra = self.model.algebra();
        let z: Vec<f64> = self.model.translation_f64(x).iter().map(|c| -c).collect();
        let mut sum = self.xi.to_f64();
        let mut term = sum.clone();
        for m in 1..=2 {
            term = algebra.bracket_f64(&z, &term).iter().map(|c| c / m as f64).collect();
            for (s, t) in sum.iter_mut().zip(&term) {
                *s += t;
            }
        }
        sum
    }

    pub fn holonomy_at(&self, x: &[Rat]) -> Result<HolonomyDatum> {
        if !self.is_singular_at(x)? {
            return Err(Error::Precondition(
                "the field does not vanish here; non-singular points are locally inessential".into(),
            ));
        }
        let s = self.tractor(x)?;
        if !s.component(-1)?.is_zero() {
            return Err(Error::Invariant("tractor has a g_-1 part at a zero of the field".into()));
        }
        HolonomyDatum::with_default_scale(s.components(0..=1))
    }

    pub fn classify_at(&self, x: &[Rat]) -> Result<PointVerdict> {
        let value = self.evaluate(x)?;
        if !rational::is_zero_vec(&value) {
            return Ok(PointVerdict::NonSingular { value });
        }
        let datum = self.holonomy_at(x)?;
        let classification = classify(&datum)?;
        Ok(PointVerdict::Singular { datum, classification })
    }

    /// `∇_Y s(x) = ∂_y s(x) + [Y, s(x)]`, the derivative by central
    /// differences of step `FD_STEP`, the bracket exact.
    pub fn tractor_derivative(&self, y: &Element, x: &[Rat]) -> Result<Vec<f64>> {
        self.model.check_point(x)?;
        let d: Vec<f64> = self.model.direction(y)?.iter().map(rational::to_f64).collect();
        let xf: Vec<f64> = x.iter().map(rational::to_f64).collect();
        let derivative = central_difference(|p| self.tractor_f64(p), &xf, &d);
        let bracket = y.bracket(&self.tractor(x)?)?.to_f64();
        Ok(derivative.iter().zip(&bracket).map(|(a, b)| a + b).collect())
    }

    /// `max |(η J + Jᵀ η) - (2/n) tr(J) η|` for the Jacobian `J` of the
    /// field; the central differences are exact on quadratic fields.
    pub fn killing_residual(&self, x: &[Rat]) -> Result<Rat> {
        let j = self.jacobian(x)?;
        let n = self.model.dim();
        let trace = j.trace();
        let mut worst = Rat::zero();
        for r in 0..n {
            for c in 0..n {
                let mut v = rat(self.model.eta(r)) * &j[(r, c)] + rat(self.model.eta(c)) * &j[(c, r)];
                if r == c {
                    v -= rat(2) * &trace * rat(self.model.eta(r)) / rat(n as i64);
                }
                worst = worst.max(v.abs());
            }
        }
        Ok(worst)
    }

    pub fn killing_residual_f64(&self, x: &[f64]) -> Result<f64> {
        self.model.check_point(x)?;
        let n = self.model.dim();
        let mut jac = DMatrix::zeros(n, n);
        for c in 0..n {
            let mut e = vec![0.0; n];
            e[c] = 1.0;
            let col = central_difference(|p| self.evaluate_f64(p).expect("checked"), x, &e);
            for r in 0..n {
                jac[(r, c)] = col[r];
            }
        }
        let trace = jac.trace();
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in 0..n {
                let mut v = self.model.eta(r) as f64 * jac[(r, c)] + self.model.eta(c) as f64 * jac[(c, r)];
                if r == c {
                    v -= 2.0 * trace * self.model.eta(r) as f64 / n as f64;
                }
                worst = worst.max(v.abs());
            }
        }
        Ok(worst)
    }

    /// Exact Jacobian, column `c` the derivative along `e_c`.
    pub fn jacobian(&self, x: &[Rat]) -> Result<Matrix> {
        self.model.check_point(x)?;
        let n = self.model.dim();
        let mut jac = Matrix::zeros(n, n);
        for c in 0..n {
            let mut plus = x.to_vec();
            let mut minus = x.to_vec();
            plus[c] += Rat::one();
            minus[c] -= Rat::one();
            let (fp, fm) = (self.evaluate(&plus)?, self.evaluate(&minus)?);
            for r in 0..n {
                jac[(r, c)] = (&fp[r] - &fm[r]) / rat(2);
            }
        }
        Ok(jac)
    }

    /// Vector-field commutator `[X, Y](x) = DY(x) X(x) - DX(x) Y(x)`.
    pub fn field_commutator(&self, other: &FlatConformalField, x: &[Rat]) -> Result<Vec<Rat>> {
        let (vx, vy) = (self.evaluate(x)?, other.evaluate(x)?);
        let lhs = other.jacobian(x)?.mul_vec(&vx);
        let rhs = self.jacobian(x)?.mul_vec(&vy);
        Ok(lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect())
    }
}

fn central_difference<F: Fn(&[f64]) -> Vec<f64>>(f: F, x: &[f64], d: &[f64]) -> Vec<f64> {
    let h = FD_STEP;
    let plus: Vec<f64> = x.iter().zip(d).map(|(a, b)| a + h * b).collect();
    let minus: Vec<f64> = x.iter().zip(d).map(|(a, b)| a - h * b).collect();
    f(&plus).iter().zip(f(&minus)).map(|(a, b)| (a - b) / (2.0 * h)).collect()
}

/// `∇_Y s(x)` for an arbitrary section given in the standard gauge.
pub fn tractor_derivative_of<F>(model: &ConformalModel, section: F, y: &Element, x: &[f64]) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    model.check_point(x)?;
    let d: Vec<f64> = model.direction(y)?.iter().map(rational::to_f64).collect();
    let derivative = central_difference(&section, x, &d);
    let bracket = model.algebra().bracket_f64(&y.to_f64(), &section(x));
    Ok(derivative.iter().zip(&bracket).map(|(a, b)| a + b).collect())
}

/// `dω(Ŷ_1, Ŷ_2) + [ω(Ŷ_1), ω(Ŷ_2)]` at `x` for constant fields `Ŷ_i`.
pub fn curvature_at(model: &ConformalModel, y1: &Element, y2: &Element, x: &[Rat]) -> Result<Element> {
    model.check_point(x)?;
    let (v1, v2) = (model.direction(y1)?, model.direction(y2)?);
    let zero = model.algebra().zero();
    let derivative = |along: &[Rat], of: &[Rat]| -> Result<Element> {
        let mut acc = zero.clone();
        for (s, w) in [(2, -1), (1, 8), (-1, -8), (-2, 1)] {
            let form = model.pulled_back_form(&shift(x, along, &rat(s)), of)?;
            acc = &acc + &form.scale(&ratio(w, 12));
        }
        Ok(acc)
    };
    let d_omega = &derivative(&v1, &v2)? - &derivative(&v2, &v1)?;
    let bracket = model.pulled_back_form(x, &v1)?.bracket(&model.pulled_back_form(x, &v2)?)?;
    Ok(&d_omega + &bracket)
}

/// Structure equation at the origin of the chart.
pub fn curvature_check(model: &ConformalModel, y1: &Element, y2: &Element) -> Result<Element> {
    curvature_at(model, y1, y2, &vec![Rat::zero(); model.dim()])
}

/// Random field with small rational coefficients.
pub fn random_field<R: Rng>(model: &ConformalModel, rng: &mut R) -> FlatConformalField {
    let k = model.algebra().depth();
    let xi = sampling::random_element(model.algebra(), -k..=k, 0.2, rng);
    FlatConformalField { model: model.clone(), xi }
}

/// Field vanishing at `x` with holonomy `hol ∈ p` there.
pub fn field_with_zero_at(model: &ConformalModel, x: &[Rat], hol: &Element) -> Result<FlatConformalField> {
    model.check_point(x)?;
    let xi = exp_ad(&model.translation(x), hol)?;
    FlatConformalField::from_element(xi)
}

/// Random point with coordinates `p/q`, `|p| <= 3`, `q <= 4`.
pub fn random_point<R: Rng>(model: &ConformalModel, rng: &mut R) -> Vec<Rat> {
    (0..model.dim()).map(|_| ratio(rng.gen_range(-3..=3), rng.gen_range(1..=4))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::FIELD_BRACKET_SIGN;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn model(p: i64, q: i64) -> ConformalModel {
        ConformalModel::new(p, q).unwrap()
    }

    fn point(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&c| rat(c)).collect()
    }

    fn field(m: &ConformalModel, terms: &[(&str, Rat)]) -> FlatConformalField {
        FlatConformalField::from_element(m.algebra().combination(terms).unwrap()).unwrap()
    }

    #[test]
    fn special_conformal_value() {
        let m = model(2, 0);
        let f = field(&m, &[("K_1", rat(1))]);
        assert_eq!(f.evaluate(&point(&[1, 0])).unwrap(), point(&[-1, 0]));
    }

    #[test]
    fn translation_and_dilation() {
        let m = model(3, 0);
        let t = field(&m, &[("P_2", rat(3))]);
        assert_eq!(t.evaluate(&point(&[4, -1, 7])).unwrap(), point(&[0, 3, 0]));
        assert!(!t.is_singular_at(&point(&[0, 0, 0])).unwrap());
        // s = 1 is ξ = -D
        let params = FieldParams { a: point(&[0, 0, 0]), rotation: Matrix::zeros(3, 3), s: rat(1), b: point(&[0, 0, 0]) };
        let euler = FlatConformalField::from_params(&m, &params).unwrap();
        assert_eq!(euler.element(), &-&m.algebra().named("D").unwrap());
        assert_eq!(euler.evaluate(&point(&[1, 2, 3])).unwrap(), point(&[1, 2, 3]));
        assert!(euler.is_singular_at(&point(&[0, 0, 0])).unwrap());
    }

    #[test]
    fn formula_matches_the_action_on_null_lines() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (p, q) in [(2, 0), (3, 0), (1, 1), (2, 1)] {
            let m = model(p, q);
            for _ in 0..10 {
                let f = random_field(&m, &mut rng);
                let x = random_point(&m, &mut rng);
                assert_eq!(f.evaluate(&x).unwrap(), f.evaluate_by_action(&x).unwrap());
            }
        }
    }

    #[test]
    fn params_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = model(2, 1);
        for _ in 0..10 {
            let f = random_field(&m, &mut rng);
            let g = FlatConformalField::from_params(&m, &f.params()).unwrap();
            assert_eq!(f.element(), g.element());
        }
        let mut bad = field(&m, &[]).params();
        bad.rotation[(0, 1)] = rat(1);
        assert!(matches!(FlatConformalField::from_params(&m, &bad), Err(Error::Domain(_))));
    }

    #[test]
    fn conformal_killing_equation_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (p, q) in [(2, 0), (3, 0), (2, 1)] {
            let m = model(p, q);
            for _ in 0..10 {
                let f = random_field(&m, &mut rng);
                let x = random_point(&m, &mut rng);
                assert!(f.killing_residual(&x).unwrap().is_zero());
                let xf: Vec<f64> = x.iter().map(rational::to_f64).collect();
                assert!(f.killing_residual_f64(&xf).unwrap() < 1e-8);
            }
        }
    }

    #[test]
    fn algebra_to_field_is_an_anti_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = model(2, 1);
        for _ in 0..10 {
            let f = random_field(&m, &mut rng);
            let g = random_field(&m, &mut rng);
            let fg = FlatConformalField::from_element(f.element().bracket(g.element()).unwrap()).unwrap();
            let x = random_point(&m, &mut rng);
            let comm = f.field_commutator(&g, &x).unwrap();
            let signed: Vec<Rat> = comm.iter().map(|c| c * rat(FIELD_BRACKET_SIGN)).collect();
            assert_eq!(fg.evaluate(&x).unwrap(), signed);
        }
    }

    #[test]
    fn holonomy_examples() {
        let m = model(3, 0);
        let origin = point(&[0, 0, 0]);
        let d = field(&m, &[("D", rat(1))]).holonomy_at(&origin).unwrap();
        assert_eq!(d.x(), &m.algebra().named("D").unwrap());
        let r = field(&m, &[("M_12", rat(1))]).holonomy_at(&origin).unwrap();
        assert_eq!(r.x(), &m.algebra().named("M_12").unwrap());
        let mk = field(&m, &[("M_12", rat(1)), ("K_1", rat(1))]);
        assert!(mk.is_singular_at(&origin).unwrap());
        let err = field(&m, &[("P_1", rat(1))]).holonomy_at(&origin).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn planted_zero_is_found() {
        let m = model(2, 1);
        let x = vec![ratio(1, 2), rat(-1), ratio(3, 4)];
        let hol = m.algebra().combination(&[("D", rat(2)), ("M_12", rat(1)), ("K_3", rat(1))]).unwrap();
        let f = field_with_zero_at(&m, &x, &hol).unwrap();
        assert!(f.is_singular_at(&x).unwrap());
        assert_eq!(f.holonomy_at(&x).unwrap().x(), &hol);
    }

    #[test]
    fn tractor_is_parallel() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = model(3, 0);
        for _ in 0..5 {
            let f = random_field(&m, &mut rng);
            let x = random_point(&m, &mut rng);
            let y = sampling::random_element(m.algebra(), -1..=-1, 0.0, &mut rng);
            let d = f.tractor_derivative(&y, &x).unwrap();
            assert!(d.iter().all(|v| v.abs() < 1e-6), "{d:?}");
        }
    }

    #[test]
    fn constant_section_gives_the_bracket() {
        let m = model(2, 0);
        let s = m.algebra().named("D").unwrap();
        let y = m.algebra().named("P_1").unwrap();
        let constant = s.to_f64();
        let d = tractor_derivative_of(&m, |_| constant.clone(), &y, &[0.5, 0.25]).unwrap();
        assert_eq!(d, y.bracket(&s).unwrap().to_f64());
        assert!(d.iter().any(|v| *v != 0.0));
    }

    #[test]
    fn flat_curvature_vanishes() {
        let m = model(2, 1);
        let a = m.algebra();
        let (y1, y2) = (a.named("P_1").unwrap(), a.combination(&[("P_2", rat(2)), ("P_3", ratio(-1, 3))]).unwrap());
        assert!(curvature_check(&m, &y1, &y2).unwrap().is_zero());
        assert!(curvature_at(&m, &y1, &y2, &[ratio(1, 2), rat(2), rat(-1)]).unwrap().is_zero());
        assert!(matches!(curvature_check(&m, &a.named("D").unwrap(), &y2), Err(Error::Domain(_))));
    }

    #[test]
    fn pulled_back_form_is_translation() {
        let m = model(2, 0);
        let x = [ratio(1, 3), rat(2)];
        let v = [rat(1), ratio(-1, 2)];
        assert_eq!(m.pulled_back_form(&x, &v).unwrap(), m.translation(&v));
    }

    #[test]
    fn cr_has_no_flat_model() {
        let a = crate::algebra::build_cr(1).unwrap();
        assert!(matches!(FlatConformalField::from_element(a.zero()), Err(Error::Unsupported(_))));
    }
}
