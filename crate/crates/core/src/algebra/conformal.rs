//! so(p+1, q+1) with its |1|-grading.
//!
//! The realization acts on `R^{n+2}` with coordinates `(e_0, x_1..x_n, e_inf)`
//! and preserves the form `2 u_0 v_inf + <u, v>_{p,q}`. Basis:
//!
//! * `P_a = E_{a,0} - η_a E_{inf,a}` (grade -1, translations of the flat chart)
//! * `D = E_{0,0} - E_{inf,inf}` (grade 0, the grading element)
//! * `M_ab = η_b E_{a,b} - η_a E_{b,a}`, `a < b` (grade 0, so(p,q))
//! * `K_a = 2 η_a E_{0,a} - 2 E_{a,inf}` (grade 1, special conformal)

use super::{Algebra, Descriptor, Family, GradedLieAlgebra};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rational::rat;

pub(crate) fn rotation_name(n: usize, a: usize, b: usize) -> String {
    if n <= 9 {
        format!("M_{a}{b}")
    } else {
        format!("M_{a}_{b}")
    }
}

pub fn build_conformal(p: i64, q: i64) -> Result<Algebra> {
    if p < 0 || q < 0 {
        return Err(Error::Unsupported(format!("negative signature ({p}, {q})")));
    }
    let n = (p + q) as usize;
    if n < 2 {
        return Err(Error::Unsupported(format!("conformal structures need p + q >= 2, got {n}")));
    }
    let size = n + 2;
    let inf = n + 1;
    let eta = |a: usize| if a <= p as usize { 1 } else { -1 };
    let unit = |r: usize, c: usize, v: i64| {
        let mut m = Matrix::zeros(size, size);
        m[(r, c)] = rat(v);
        m
    };

    let mut names = Vec::new();
    let mut grades = Vec::new();
    let mut matrices = Vec::new();

    for a in 1..=n {
        names.push(format!("P_{a}"));
        grades.push(-1);
        matrices.push(unit(a, 0, 1).add(&unit(inf, a, -eta(a))));
    }
    names.push("D".to_string());
    grades.push(0);
    matrices.push(unit(0, 0, 1).add(&unit(inf, inf, -1)));
    for a in 1..=n {
        for b in (a + 1)..=n {
            names.push(rotation_name(n, a, b));
            grades.push(0);
            matrices.push(unit(a, b, eta(b)).add(&unit(b, a, -eta(a))));
        }
    }
    for a in 1..=n {
        names.push(format!("K_{a}"));
        grades.push(1);
        matrices.push(unit(0, a, 2 * eta(a)).add(&unit(a, inf, -2)));
    }

    GradedLieAlgebra::from_realization(
        Descriptor { family: Family::Conformal, params: vec![p, q] },
        names,
        grades,
        matrices,
    )
}
