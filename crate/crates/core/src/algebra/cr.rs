//! su(n+1, 1) with its contact |2|-grading, as a real Lie algebra.
//!
//! The complex realization preserves the Hermitian form with matrix
//! `h = E_{0,inf} + E_{inf,0} + Σ E_{k,k}` of signature `(n+1, 1)`; complex
//! matrices are stored in real `2(n+2) x 2(n+2)` form `[[Re, -Im], [Im, Re]]`.
//!
//! Basis (indices `0, 1..n, inf`):
//!
//! * `R = i E_{inf,0}` (grade -2)
//! * `P_k = E_{k,0} - E_{inf,k}`, `Q_k = i (E_{k,0} + E_{inf,k})` (grade -1)
//! * `E = E_{0,0} - E_{inf,inf}` (the grading element),
//!   `J = i (E_{0,0} + E_{inf,inf}) - (2/n) i Σ E_{k,k}`,
//!   `A_kl`, `S_kl`, `H_k` spanning su(n) (grade 0)
//! * `K_k = E_{0,k} - E_{k,inf}`, `L_k = i (E_{0,k} + E_{k,inf})` (grade 1)
//! * `T = i E_{0,inf}` (grade 2)

use super::{Algebra, Descriptor, Family, GradedLieAlgebra};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rational::{rat, ratio, Rat};

struct Complex {
    re: Matrix,
    im: Matrix,
}

impl Complex {
    fn zeros(n: usize) -> Self {
        Self { re: Matrix::zeros(n, n), im: Matrix::zeros(n, n) }
    }

    fn real(mut self, r: usize, c: usize, v: Rat) -> Self {
        self.re[(r, c)] += v;
        self
    }

    fn imag(mut self, r: usize, c: usize, v: Rat) -> Self {
        self.im[(r, c)] += v;
        self
    }

    fn realify(&self) -> Matrix {
        let n = self.re.rows();
        let mut m = Matrix::zeros(2 * n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                m[(r, c)] = self.re[(r, c)].clone();
                m[(n + r, n + c)] = self.re[(r, c)].clone();
                m[(r, n + c)] = -self.im[(r, c)].clone();
                m[(n + r, c)] = self.im[(r, c)].clone();
            }
        }
        m
    }
}

pub fn build_cr(n: i64) -> Result<Algebra> {
    if n < 1 {
        return Err(Error::Unsupported(format!("CR structures need n >= 1, got {n}")));
    }
    let n = n as usize;
    let size = n + 2;
    let inf = n + 1;
    let one = || rat(1);
    let z = || Complex::zeros(size);

    let mut basis: Vec<(String, i32, Complex)> = Vec::new();
    basis.push(("R".into(), -2, z().imag(inf, 0, one())));
    for k in 1..=n {
        basis.push((format!("P_{k}"), -1, z().real(k, 0, one()).real(inf, k, rat(-1))));
        basis.push((format!("Q_{k}"), -1, z().imag(k, 0, one()).imag(inf, k, one())));
    }
    basis.push(("E".into(), 0, z().real(0, 0, one()).real(inf, inf, rat(-1))));
    let mut j = z().imag(0, 0, one()).imag(inf, inf, one());
    for k in 1..=n {
        j = j.imag(k, k, ratio(-2, n as i64));
    }
    basis.push(("J".into(), 0, j));
    for k in 1..=n {
        for l in (k + 1)..=n {
            basis.push((format!("A_{k}{l}"), 0, z().real(k, l, one()).real(l, k, rat(-1))));
            basis.push((format!("S_{k}{l}"), 0, z().imag(k, l, one()).imag(l, k, one())));
        }
    }
    for k in 1..n {
        basis.push((format!("H_{k}"), 0, z().imag(k, k, one()).imag(k + 1, k + 1, rat(-1))));
    }
    for k in 1..=n {
        basis.push((format!("K_{k}"), 1, z().real(0, k, one()).real(k, inf, rat(-1))));
        basis.push((format!("L_{k}"), 1, z().imag(0, k, one()).imag(k, inf, one())));
    }
    basis.push(("T".into(), 2, z().imag(0, inf, one())));

    let names = basis.iter().map(|(name, _, _)| name.clone()).collect();
    let grades = basis.iter().map(|(_, g, _)| *g).collect();
    let matrices = basis.iter().map(|(_, _, m)| m.realify()).collect();
    GradedLieAlgebra::from_realization(
        Descriptor { family: Family::Cr, params: vec![n as i64] },
        names,
        grades,
        matrices,
    )
}
