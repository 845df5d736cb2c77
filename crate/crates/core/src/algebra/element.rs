use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};
use serde_json::{Map, Value};

use super::{Algebra, GradedLieAlgebra};
use crate::error::{Error, Result};
use crate::rational::{self, Rat};

/// A vector of an algebra in its fixed basis, with exact coefficients.
#[derive(Clone)]
pub struct Element {
    algebra: Algebra,
    coeffs: Vec<Rat>,
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .zip(self.algebra.names())
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, n)| format!("{}*{}", rational::format(c), n))
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.algebra.is_same(&other.algebra) && self.coeffs == other.coeffs
    }
}

impl Eq for Element {}

impl GradedLieAlgebra {
    pub fn zero(self: &Arc<Self>) -> Element {
        Element { algebra: Arc::clone(self), coeffs: vec![Rat::zero(); self.dim()] }
    }

    pub fn element(self: &Arc<Self>, coeffs: Vec<Rat>) -> Result<Element> {
        if coeffs.len() != self.dim() {
            return Err(Error::Domain(format!(
                "expected {} coefficients, got {}",
                self.dim(),
                coeffs.len()
            )));
        }
        Ok(Element { algebra: Arc::clone(self), coeffs })
    }

    pub fn basis_element(self: &Arc<Self>, index: usize) -> Element {
        let mut coeffs = vec![Rat::zero(); self.dim()];
        coeffs[index] = Rat::one();
        Element { algebra: Arc::clone(self), coeffs }
    }

    pub fn named(self: &Arc<Self>, name: &str) -> Result<Element> {
        let i = self.index_of(name).ok_or_else(|| Error::UnknownBasis(name.to_string()))?;
        Ok(self.basis_element(i))
    }

    /// Linear combination of named basis vectors.
    pub fn combination(self: &Arc<Self>, terms: &[(&str, Rat)]) -> Result<Element> {
        let mut coeffs = vec![Rat::zero(); self.dim()];
        for (name, c) in terms {
            let i = self.index_of(name).ok_or_else(|| Error::UnknownBasis(name.to_string()))?;
            coeffs[i] += c;
        }
        Ok(Element { algebra: Arc::clone(self), coeffs })
    }

    /// The element acting by `j` on every grade-`j` vector.
    pub fn grading_element(self: &Arc<Self>) -> Element {
        Element { algebra: Arc::clone(self), coeffs: self.grading_element.clone() }
    }

    pub fn killing_form(&self, x: &Element, y: &Element) -> Result<Rat> {
        self.owns(x)?;
        self.owns(y)?;
        Ok(self.killing_coeffs(&x.coeffs, &y.coeffs))
    }

    pub(crate) fn owns(&self, x: &Element) -> Result<()> {
        if self.is_same(&x.algebra) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch {
                left: self.descriptor.to_string(),
                right: x.algebra.descriptor.to_string(),
            })
        }
    }
}

impl Element {
    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rat> {
        self.coeffs
    }

    pub fn coeff(&self, name: &str) -> Result<&Rat> {
        let i = self.algebra.index_of(name).ok_or_else(|| Error::UnknownBasis(name.to_string()))?;
        Ok(&self.coeffs[i])
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(rational::to_f64).collect()
    }

    pub fn is_zero(&self) -> bool {
        rational::is_zero_vec(&self.coeffs)
    }

    fn check_same(&self, other: &Element) -> Result<()> {
        self.algebra.owns(other)
    }

    pub fn with_coeffs(&self, coeffs: Vec<Rat>) -> Element {
        assert_eq!(coeffs.len(), self.coeffs.len(), "coefficient length mismatch");
        Element { algebra: Arc::clone(&self.algebra), coeffs }
    }

    pub fn bracket(&self, other: &Element) -> Result<Element> {
        self.check_same(other)?;
        Ok(self.with_coeffs(self.algebra.bracket_coeffs(&self.coeffs, &other.coeffs)))
    }

    pub fn killing(&self, other: &Element) -> Result<Rat> {
        self.algebra.killing_form(self, other)
    }

    /// Projection onto the grade-`grade` basis vectors.
    pub fn component(&self, grade: i32) -> Result<Element> {
        self.algebra.check_grade(grade)?;
        let mut coeffs = vec![Rat::zero(); self.coeffs.len()];
        for &i in self.algebra.grade_indices(grade) {
            coeffs[i] = self.coeffs[i].clone();
        }
        Ok(self.with_coeffs(coeffs))
    }

    /// Sum of the components with grade in `range`.
    pub fn components(&self, range: std::ops::RangeInclusive<i32>) -> Element {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| if range.contains(&self.algebra.grade_of(i)) { c.clone() } else { Rat::zero() })
            .collect();
        self.with_coeffs(coeffs)
    }

    /// Whether all non-zero coefficients sit in grades within `range`.
    pub fn supported_in(&self, range: std::ops::RangeInclusive<i32>) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| c.is_zero() || range.contains(&self.algebra.grade_of(i)))
    }

    /// The unique grade if the element is non-zero and homogeneous.
    pub fn pure_grade(&self) -> Option<i32> {
        let mut grades = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| self.algebra.grade_of(i));
        let first = grades.next()?;
        grades.all(|g| g == first).then_some(first)
    }

    pub fn scale(&self, s: &Rat) -> Element {
        self.with_coeffs(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn try_add(&self, other: &Element) -> Result<Element> {
        self.check_same(other)?;
        Ok(self.with_coeffs(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect()))
    }

    pub fn try_sub(&self, other: &Element) -> Result<Element> {
        self.check_same(other)?;
        Ok(self.with_coeffs(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect()))
    }

    /// Coefficients keyed by basis name, in basis order.
    pub fn to_named_json(&self) -> Value {
        let mut map = Map::new();
        for (name, c) in self.algebra.names().iter().zip(&self.coeffs) {
            map.insert(name.clone(), rational::to_json(c));
        }
        Value::Object(map)
    }

    /// Like [`Element::to_named_json`] but restricted to grades in `range`.
    pub fn to_named_json_in(&self, range: std::ops::RangeInclusive<i32>) -> Value {
        let mut map = Map::new();
        for (i, (name, c)) in self.algebra.names().iter().zip(&self.coeffs).enumerate() {
            if range.contains(&self.algebra.grade_of(i)) {
                map.insert(name.clone(), rational::to_json(c));
            }
        }
        Value::Object(map)
    }
}

// Operator forms panic on mismatched algebras; use the `try_*` methods when
// the operands come from untrusted input.
impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.try_add(rhs).expect("adding elements of different algebras")
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.try_sub(rhs).expect("subtracting elements of different algebras")
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.with_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul<&Element> for &Rat {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        rhs.scale(self)
    }
}
