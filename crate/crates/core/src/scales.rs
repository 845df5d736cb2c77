//! Scale elements `E_λ`, the functional `λ'(A) = B(E_λ, A)` on `g_0`, and
//! its kernel.
//!
//! Only the Lie algebra data is represented; the group homomorphism
//! `λ: G_0 -> R_+` and the scale bundle never appear.

use num_traits::Zero;
use serde_json::{json, Value};

use crate::algebra::{Algebra, Element};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rational::{self, Rat};

#[derive(Clone, Debug)]
pub struct ScaleData {
    algebra: Algebra,
    e_lambda: Element,
    /// Coefficients of `λ'` against the grade-0 basis, in basis order.
    lambda_prime: Vec<Rat>,
    kernel_basis: Vec<Element>,
    /// `(i, a_i)` with `ad(E_λ)` acting as `a_i` on `g_i`.
    component_weights: Vec<(i32, Rat)>,
}

/// Scale data for `E_λ = E`, the grading element.
pub fn default_scale(algebra: &Algebra) -> ScaleData {
    scale_from_element(algebra, &algebra.grading_element())
        .expect("the grading element is always an admissible scale element")
}

/// Validates `e` as a scale element and derives `λ'` and its kernel.
pub fn scale_from_element(algebra: &Algebra, e: &Element) -> Result<ScaleData> {
    algebra.owns(e)?;
    if !e.supported_in(0..=0) {
        return Err(Error::Domain(format!("scale element {e} is not of pure grade 0")));
    }
    let k = algebra.depth();
    let mut component_weights = Vec::with_capacity((2 * k + 1) as usize);
    for grade in -k..=k {
        let indices = algebra.grade_indices(grade);
        let mut weight: Option<Rat> = None;
        for &i in indices {
            let image = algebra.bracket_coeffs(e.coeffs(), &algebra.basis_element(i).into_coeffs());
            let a = image[i].clone();
            let scalar = image.iter().enumerate().all(|(j, c)| if j == i { true } else { c.is_zero() });
            if !scalar || weight.as_ref().is_some_and(|w| *w != a) {
                return Err(Error::InvalidScale { component: grade });
            }
            weight = Some(a);
        }
        component_weights.push((grade, weight.unwrap_or_else(Rat::zero)));
    }
    // central in g_0 means the grade-0 weight vanishes
    if component_weights.iter().any(|(g, a)| *g == 0 && !a.is_zero()) {
        return Err(Error::InvalidScale { component: 0 });
    }

    let g0 = algebra.grade_indices(0);
    let lambda_prime: Vec<Rat> = g0
        .iter()
        .map(|&i| algebra.killing_coeffs(e.coeffs(), &algebra.basis_element(i).into_coeffs()))
        .collect();
    let self_pairing = algebra.killing_coeffs(e.coeffs(), e.coeffs());
    if self_pairing.is_zero() {
        return Err(Error::InvalidScale { component: 0 });
    }
    let kernel_basis = Matrix::from_rows(vec![lambda_prime.clone()])
        .kernel()
        .into_iter()
        .map(|v| {
            let mut coeffs = vec![Rat::zero(); algebra.dim()];
            for (&i, c) in g0.iter().zip(v) {
                coeffs[i] = c;
            }
            algebra.element(coeffs).expect("dimension matches")
        })
        .collect();

    Ok(ScaleData {
        algebra: algebra.clone(),
        e_lambda: e.clone(),
        lambda_prime,
        kernel_basis,
        component_weights,
    })
}

impl ScaleData {
    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn e_lambda(&self) -> &Element {
        &self.e_lambda
    }

    pub fn lambda_prime_covector(&self) -> &[Rat] {
        &self.lambda_prime
    }

    pub fn kernel_basis(&self) -> &[Element] {
        &self.kernel_basis
    }

    pub fn component_weights(&self) -> &[(i32, Rat)] {
        &self.component_weights
    }

    pub fn weight(&self, grade: i32) -> Option<&Rat> {
        self.component_weights.iter().find(|(g, _)| *g == grade).map(|(_, a)| a)
    }

    /// `λ'(A) = B(E_λ, A)` for `A ∈ g_0`.
    pub fn lambda_prime(&self, a: &Element) -> Result<Rat> {
        self.algebra.owns(a)?;
        if !a.supported_in(0..=0) {
            return Err(Error::Domain(format!("λ' is only defined on g_0, got {a}")));
        }
        Ok(self.lambda_prime_unchecked(a.coeffs()))
    }

    /// `λ'` of the grade-0 part of arbitrary coefficients.
    pub(crate) fn lambda_prime_unchecked(&self, coeffs: &[Rat]) -> Rat {
        self.algebra
            .grade_indices(0)
            .iter()
            .zip(&self.lambda_prime)
            .fold(Rat::zero(), |acc, (&i, l)| acc + &coeffs[i] * l)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "e_lambda": rational::vec_to_json(self.e_lambda.coeffs()),
            "lambda_prime": rational::vec_to_json(&self.lambda_prime),
            "kernel": self.kernel_basis.iter().map(|k| rational::vec_to_json(k.coeffs())).collect::<Vec<_>>(),
        })
    }
}
