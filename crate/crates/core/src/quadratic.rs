//! Real solvability of small systems `c + L t + (tᵀ Q_i t)_i = 0`.
//!
//! Three regimes:
//!
//! * every `Q_i` vanishes: the system is affine and solved exactly
//!   (minimum-norm solution);
//! * a single equation: decided exactly from the inertia of `Q` and the
//!   extrema of the quadratic, with a rational root when one exists;
//! * several genuinely quadratic equations: multi-start damped
//!   Gauss-Newton in floating point, reported as numeric.

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rational::{self, rat, ratio, Rat};

pub const NUMERIC_RESIDUAL_THRESHOLD: f64 = 1e-9;
const NUMERIC_STARTS: usize = 32;
const NUMERIC_ITERATIONS: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticSystem {
    vars: usize,
    constant: Vec<Rat>,
    linear: Matrix,
    quadratic: Vec<Matrix>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Solution {
    Exact(Vec<Rat>),
    Numeric { point: Vec<f64>, residual: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Feasibility {
    Feasible(Solution),
    /// No real solution; exact.
    Infeasible,
    /// The numeric search found nothing below the threshold.
    Undecided { best_residual: f64 },
}

impl QuadraticSystem {
    pub fn new(constant: Vec<Rat>, linear: Matrix, quadratic: Vec<Matrix>) -> Result<Self> {
        let m = constant.len();
        let vars = linear.cols();
        if linear.rows() != m || quadratic.len() != m {
            return Err(Error::Domain("quadratic system components disagree in size".into()));
        }
        if quadratic.iter().any(|q| q.rows() != vars || q.cols() != vars || !q.is_symmetric()) {
            return Err(Error::Domain("quadratic parts must be symmetric and square".into()));
        }
        Ok(Self { vars, constant, linear, quadratic })
    }

    /// Recovers the coefficients of a quadratic map from exact evaluations,
    /// then checks the fit at an extra point.
    pub fn interpolate<F>(vars: usize, equations: usize, f: F) -> Result<Self>
    where
        F: Fn(&[Rat]) -> Vec<Rat>,
    {
        let zero = vec![Rat::zero(); vars];
        let unit = |i: usize, s: i64| {
            let mut v = zero.clone();
            v[i] = rat(s);
            v
        };
        let c = f(&zero);
        let half = ratio(1, 2);
        let mut linear = Matrix::zeros(equations, vars);
        let mut quadratic = vec![Matrix::zeros(vars, vars); equations];
        let plus: Vec<Vec<Rat>> = (0..vars).map(|i| f(&unit(i, 1))).collect();
        let minus: Vec<Vec<Rat>> = (0..vars).map(|i| f(&unit(i, -1))).collect();
        for i in 0..vars {
            for e in 0..equations {
                linear[(e, i)] = (&plus[i][e] - &minus[i][e]) * &half;
                quadratic[e][(i, i)] = (&plus[i][e] + &minus[i][e]) * &half - &c[e];
            }
        }
        for i in 0..vars {
            for j in (i + 1)..vars {
                let mut t = zero.clone();
                t[i] = Rat::one();
                t[j] = Rat::one();
                let v = f(&t);
                for e in 0..equations {
                    let q = (&v[e]
                        - &c[e]
                        - &linear[(e, i)]
                        - &linear[(e, j)]
                        - &quadratic[e][(i, i)]
                        - &quadratic[e][(j, j)])
                        * &half;
                    quadratic[e][(i, j)] = q.clone();
                    quadratic[e][(j, i)] = q;
                }
            }
        }
        let system = Self::new(c, linear, quadratic)?;
        let probe: Vec<Rat> = (0..vars).map(|i| ratio(2 * i as i64 + 3, 7)).collect();
        if system.evaluate(&probe) != f(&probe) {
            return Err(Error::Invariant("residual map is not quadratic".into()));
        }
        Ok(system)
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn equations(&self) -> usize {
        self.constant.len()
    }

    pub fn is_affine(&self) -> bool {
        self.quadratic.iter().all(Matrix::is_zero)
    }

    pub fn evaluate(&self, t: &[Rat]) -> Vec<Rat> {
        let lt = self.linear.mul_vec(t);
        (0..self.equations())
            .map(|e| &self.constant[e] + &lt[e] + rational::dot(t, &self.quadratic[e].mul_vec(t)))
            .collect()
    }

    fn evaluate_f64(&self, t: &DVector<f64>, parts: &Parts) -> DVector<f64> {
        let lt = &parts.linear * t;
        DVector::from_fn(self.equations(), |e, _| parts.constant[e] + lt[e] + t.dot(&(&parts.quadratic[e] * t)))
    }

    pub fn decide(&self) -> Feasibility {
        if self.equations() == 0 {
            return Feasibility::Feasible(Solution::Exact(vec![Rat::zero(); self.vars]));
        }
        if self.vars == 0 {
            return if rational::is_zero_vec(&self.constant) {
                Feasibility::Feasible(Solution::Exact(Vec::new()))
            } else {
                Feasibility::Infeasible
            };
        }
        if self.is_affine() {
            let rhs: Vec<Rat> = self.constant.iter().map(|c| -c).collect();
            return match self.linear.solve_min_norm(&rhs) {
                Some(t) => Feasibility::Feasible(Solution::Exact(t)),
                None => Feasibility::Infeasible,
            };
        }
        if self.equations() == 1 {
            return self.decide_single();
        }
        self.search_numeric()
    }

    fn single(&self) -> SingleQuadratic {
        SingleQuadratic {
            c: self.constant[0].clone(),
            l: self.linear.row(0).to_vec(),
            q: self.quadratic[0].clone(),
        }
    }

    fn decide_single(&self) -> Feasibility {
        let q = self.single();
        // along a kernel direction of Q with l·v != 0 the form is affine
        if let Some(v) = q.q.kernel().into_iter().find(|v| !rational::dot(&q.l, v).is_zero()) {
            let lambda = -(&q.c) / rational::dot(&q.l, &v);
            return Feasibility::Feasible(Solution::Exact(v.iter().map(|x| x * &lambda).collect()));
        }
        let (Some(lo), Some(hi)) = (q.reach(false), q.reach(true)) else {
            return Feasibility::Infeasible;
        };
        Feasibility::Feasible(q.root_between(&lo, &hi))
    }

    fn search_numeric(&self) -> Feasibility {
        let parts = Parts::from(self);
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut best = f64::INFINITY;
        for start in 0..NUMERIC_STARTS {
            let t0 = if start == 0 {
                DVector::zeros(self.vars)
            } else {
                let spread = (start as f64).sqrt();
                DVector::from_fn(self.vars, |_, _| rng.gen_range(-spread..spread))
            };
            let (t, residual) = self.gauss_newton(t0, &parts);
            if residual < NUMERIC_RESIDUAL_THRESHOLD {
                return Feasibility::Feasible(Solution::Numeric { point: t.iter().copied().collect(), residual });
            }
            best = best.min(residual);
        }
        Feasibility::Undecided { best_residual: best }
    }

    fn gauss_newton(&self, mut t: DVector<f64>, parts: &Parts) -> (DVector<f64>, f64) {
        let mut damping = 1e-3;
        let mut f = self.evaluate_f64(&t, parts);
        for _ in 0..NUMERIC_ITERATIONS {
            if f.amax() < NUMERIC_RESIDUAL_THRESHOLD * 1e-2 {
                break;
            }
            let mut jac = parts.linear.clone();
            for e in 0..self.equations() {
                let grad = (&parts.quadratic[e] * &t) * 2.0;
                for v in 0..self.vars {
                    jac[(e, v)] += grad[v];
                }
            }
            let jt = jac.transpose();
            let normal = &jt * &jac + DMatrix::identity(self.vars, self.vars) * damping;
            let Some(step) = normal.lu().solve(&(-(&jt * &f))) else {
                break;
            };
            let candidate = &t + step;
            let fc = self.evaluate_f64(&candidate, parts);
            if fc.norm() < f.norm() {
                t = candidate;
                f = fc;
                damping = (damping * 0.3).max(1e-12);
            } else {
                damping *= 10.0;
                if damping > 1e12 {
                    break;
                }
            }
        }
        let residual = f.amax();
        (t, residual)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "equations": self.equations(),
            "vars": self.vars,
            "constant": rational::vec_to_json(&self.constant),
            "linear": (0..self.linear.rows()).map(|r| rational::vec_to_json(self.linear.row(r))).collect::<Vec<_>>(),
            "quadratic": self.quadratic.iter()
                .map(|q| (0..q.rows()).map(|r| rational::vec_to_json(q.row(r))).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

struct Parts {
    constant: Vec<f64>,
    linear: DMatrix<f64>,
    quadratic: Vec<DMatrix<f64>>,
}

impl From<&QuadraticSystem> for Parts {
    fn from(s: &QuadraticSystem) -> Self {
        Parts {
            constant: s.constant.iter().map(rational::to_f64).collect(),
            linear: s.linear.to_f64(),
            quadratic: s.quadratic.iter().map(Matrix::to_f64).collect(),
        }
    }
}

/// `q(t) = c + l·t + tᵀ Q t`.
struct SingleQuadratic {
    c: Rat,
    l: Vec<Rat>,
    q: Matrix,
}

impl SingleQuadratic {
    fn eval(&self, t: &[Rat]) -> Rat {
        &self.c + rational::dot(&self.l, t) + rational::dot(t, &self.q.mul_vec(t))
    }

    /// A point where `q >= 0` (`upper`) or `q <= 0` (otherwise), if any.
    fn reach(&self, upper: bool) -> Option<Vec<Rat>> {
        let sign = if upper { Rat::one() } else { -Rat::one() };
        let g = |t: &[Rat]| self.eval(t) * &sign;
        let n = self.l.len();
        let origin = vec![Rat::zero(); n];
        if !g(&origin).is_negative() {
            return Some(origin);
        }
        let sq = self.q.scale(&sign);
        let sl: Vec<Rat> = self.l.iter().map(|x| x * &sign).collect();

        let (diag, congruence) = congruence_diagonalize(&sq);
        if let Some(i) = diag.iter().position(|d| d.is_positive()) {
            // g grows quadratically along this direction
            let v = congruence.row(i).to_vec();
            let mut lambda = Rat::one();
            loop {
                let t: Vec<Rat> = v.iter().map(|x| x * &lambda).collect();
                if !g(&t).is_negative() {
                    return Some(t);
                }
                lambda *= rat(2);
            }
        }
        // g is concave: its supremum is attained at a stationary point, if any
        let rhs: Vec<Rat> = sl.iter().map(|x| -x).collect();
        if let Some(t) = sq.scale(&rat(2)).solve(&rhs) {
            return (!g(&t).is_negative()).then_some(t);
        }
        // unbounded along a kernel direction not orthogonal to the linear part
        let v = sq.kernel().into_iter().find(|v| !rational::dot(&sl, v).is_zero())?;
        let slope = rational::dot(&sl, &v);
        let lambda = (g(&origin).abs() + Rat::one()) / slope;
        Some(v.iter().map(|x| x * &lambda).collect())
    }

    /// Root on the segment from `lo` (q <= 0) to `hi` (q >= 0).
    fn root_between(&self, lo: &[Rat], hi: &[Rat]) -> Solution {
        let gamma = self.eval(lo);
        if gamma.is_zero() {
            return Solution::Exact(lo.to_vec());
        }
        if self.eval(hi).is_zero() {
            return Solution::Exact(hi.to_vec());
        }
        let d: Vec<Rat> = hi.iter().zip(lo).map(|(h, l)| h - l).collect();
        let qd = self.q.mul_vec(&d);
        let alpha = rational::dot(&d, &qd);
        let beta = rational::dot(&self.l, &d) + rat(2) * rational::dot(lo, &qd);
        let point_at = |s: &Rat| -> Vec<Rat> { lo.iter().zip(&d).map(|(l, di)| l + di * s).collect() };
        if alpha.is_zero() {
            return Solution::Exact(point_at(&(-&gamma / &beta)));
        }
        let disc = &beta * &beta - rat(4) * &alpha * &gamma;
        let in_unit = |s: &Rat| !s.is_negative() && *s <= Rat::one();
        if let Some(root) = rational::exact_sqrt(&disc) {
            let two_a = rat(2) * &alpha;
            let candidates = [(-&beta + &root) / &two_a, (-&beta - &root) / &two_a];
            let s = candidates.iter().find(|s| in_unit(s)).expect("sign change brackets a root");
            return Solution::Exact(point_at(s));
        }
        let (a, b, disc) = (rational::to_f64(&alpha), rational::to_f64(&beta), rational::to_f64(&disc));
        let roots = [(-b + disc.sqrt()) / (2.0 * a), (-b - disc.sqrt()) / (2.0 * a)];
        let s = roots
            .iter()
            .copied()
            .min_by(|x, y| dist_to_unit(*x).total_cmp(&dist_to_unit(*y)))
            .expect("two candidates");
        let point: Vec<f64> =
            lo.iter().zip(&d).map(|(l, di)| rational::to_f64(l) + rational::to_f64(di) * s).collect();
        let exact_point: Vec<Rat> = point.iter().map(|&x| rational::from_f64(x).unwrap_or_default()).collect();
        let residual = rational::to_f64(&self.eval(&exact_point)).abs();
        Solution::Numeric { point, residual }
    }
}

fn dist_to_unit(s: f64) -> f64 {
    if s < 0.0 {
        -s
    } else if s > 1.0 {
        s - 1.0
    } else {
        0.0
    }
}

/// Returns `(d, C)` with `C A Cᵀ = diag(d)` for symmetric `A`.
pub fn congruence_diagonalize(a: &Matrix) -> (Vec<Rat>, Matrix) {
    let n = a.rows();
    let mut m = a.clone();
    let mut c = Matrix::identity(n);
    for i in 0..n {
        if m[(i, i)].is_zero() {
            if let Some(j) = ((i + 1)..n).find(|&j| !m[(j, j)].is_zero()) {
                swap_sym(&mut m, &mut c, i, j);
            } else if let Some(j) = ((i + 1)..n).find(|&j| !m[(i, j)].is_zero()) {
                // row/col i += row/col j makes the pivot 2 m_ij
                add_sym(&mut m, &mut c, i, j, &Rat::one());
            } else {
                continue;
            }
        }
        let pivot = m[(i, i)].clone();
        for j in (i + 1)..n {
            if m[(j, i)].is_zero() {
                continue;
            }
            let f = -(&m[(j, i)] / &pivot);
            add_sym(&mut m, &mut c, j, i, &f);
        }
    }
    ((0..n).map(|i| m[(i, i)].clone()).collect(), c)
}

/// `row_i += f row_j`, `col_i += f col_j` on `m`, and `row_i += f row_j` on `c`.
fn add_sym(m: &mut Matrix, c: &mut Matrix, i: usize, j: usize, f: &Rat) {
    let n = m.rows();
    for k in 0..n {
        let v = &m[(j, k)] * f;
        m[(i, k)] += v;
    }
    for k in 0..n {
        let v = &m[(k, j)] * f;
        m[(k, i)] += v;
    }
    for k in 0..n {
        let v = &c[(j, k)] * f;
        c[(i, k)] += v;
    }
}

fn swap_sym(m: &mut Matrix, c: &mut Matrix, i: usize, j: usize) {
    let n = m.rows();
    for k in 0..n {
        let t = m[(i, k)].clone();
        m[(i, k)] = m[(j, k)].clone();
        m[(j, k)] = t;
    }
    for k in 0..n {
        let t = m[(k, i)].clone();
        m[(k, i)] = m[(k, j)].clone();
        m[(k, j)] = t;
    }
    for k in 0..n {
        let t = c[(i, k)].clone();
        c[(i, k)] = c[(j, k)].clone();
        c[(j, k)] = t;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(c: i64, l: &[i64], q: &[i64]) -> QuadraticSystem {
        let n = l.len();
        QuadraticSystem::new(vec![rat(c)], Matrix::from_i64(1, n, l), vec![Matrix::from_i64(n, n, q)]).unwrap()
    }

    fn check_exact_root(s: &QuadraticSystem) {
        match s.decide() {
            Feasibility::Feasible(Solution::Exact(t)) => assert!(rational::is_zero_vec(&s.evaluate(&t))),
            other => panic!("expected exact root, got {other:?}"),
        }
    }

    #[test]
    fn congruence_gives_diagonal() {
        let a = Matrix::from_i64(3, 3, &[0, 1, 2, 1, 0, 3, 2, 3, 0]);
        let (d, c) = congruence_diagonalize(&a);
        let diag = c.mul(&a).mul(&c.transpose());
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    assert_eq!(diag[(i, i)], d[i]);
                } else {
                    assert!(diag[(i, j)].is_zero());
                }
            }
        }
        // indefinite with nonzero determinant: signs must mix
        assert!(d.iter().any(|x| x.is_positive()) && d.iter().any(|x| x.is_negative()));
    }

    #[test]
    fn positive_definite_without_root() {
        // 1 + t² + s² > 0
        assert_eq!(single(1, &[0, 0], &[1, 0, 0, 1]).decide(), Feasibility::Infeasible);
    }

    #[test]
    fn concave_with_root() {
        // 4 - t² - s² has rational roots
        check_exact_root(&single(4, &[0, 0], &[-1, 0, 0, -1]));
    }

    #[test]
    fn irrational_root_is_reported_numeric() {
        // t² - 2
        match single(-2, &[0], &[1]).decide() {
            Feasibility::Feasible(Solution::Numeric { point, residual }) => {
                assert!((point[0].abs() - 2f64.sqrt()).abs() < 1e-12);
                assert!(residual < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn degenerate_quadratic_with_linear_escape() {
        // 5 - t² + s: unbounded in s
        check_exact_root(&single(5, &[0, 1], &[-1, 0, 0, 0]));
        // -5 - t² has no root
        assert_eq!(single(-5, &[0], &[-1]).decide(), Feasibility::Infeasible);
    }

    #[test]
    fn affine_systems_are_exact() {
        let s = QuadraticSystem::new(
            vec![rat(1), rat(2)],
            Matrix::from_i64(2, 2, &[1, 0, 0, 1]),
            vec![Matrix::zeros(2, 2), Matrix::zeros(2, 2)],
        )
        .unwrap();
        assert_eq!(s.decide(), Feasibility::Feasible(Solution::Exact(vec![rat(-1), rat(-2)])));
        let inconsistent = QuadraticSystem::new(
            vec![rat(1), rat(2)],
            Matrix::from_i64(2, 1, &[1, 1]),
            vec![Matrix::zeros(1, 1), Matrix::zeros(1, 1)],
        )
        .unwrap();
        assert_eq!(inconsistent.decide(), Feasibility::Infeasible);
    }

    #[test]
    fn interpolation_recovers_coefficients() {
        let s = single(3, &[1, -2], &[2, 1, 1, -1]);
        let fitted = QuadraticSystem::interpolate(2, 1, |t| s.evaluate(t)).unwrap();
        assert_eq!(fitted, s);
        let cubic = QuadraticSystem::interpolate(1, 1, |t| vec![&t[0] * &t[0] * &t[0]]);
        assert!(matches!(cubic, Err(Error::Invariant(_))));
    }

    #[test]
    fn numeric_fallback_for_two_quadratics() {
        // t² + s² = 1, t = s  ->  t = s = ±1/√2
        let s = QuadraticSystem::new(
            vec![rat(-1), rat(0)],
            Matrix::from_i64(2, 2, &[0, 0, 1, -1]),
            vec![Matrix::from_i64(2, 2, &[1, 0, 0, 1]), Matrix::zeros(2, 2)],
        )
        .unwrap();
        match s.decide() {
            Feasibility::Feasible(Solution::Numeric { residual, point }) => {
                assert!(residual < NUMERIC_RESIDUAL_THRESHOLD);
                assert!((point[0] - point[1]).abs() < 1e-8);
            }
            other => panic!("unexpected {other:?}"),
        }
        // t² + s² = -1 twice: nothing to find
        let s = QuadraticSystem::new(
            vec![rat(1), rat(1)],
            Matrix::zeros(2, 2),
            vec![Matrix::from_i64(2, 2, &[1, 0, 0, 1]), Matrix::from_i64(2, 2, &[2, 0, 0, 1])],
        )
        .unwrap();
        assert!(matches!(s.decide(), Feasibility::Undecided { .. }));
    }
}
