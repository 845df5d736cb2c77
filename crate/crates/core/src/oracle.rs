//! Brute-force cross-check for the classifier.
//!
//! Shares nothing with [`crate::classifier`] beyond the raw structure
//! constants: brackets, conjugation series, the Killing trace and ranks are
//! recomputed here, ranks by fraction-free integer elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::algebra::{Algebra, Element};
use crate::classifier::{HolonomyDatum, Verdict};
use crate::error::{Error, Result};
use crate::rational::{self, Rat};

pub const MAX_PLUS_DIM: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMethod {
    /// Degree-1 rank test decided the instance (always the case for k = 1).
    RankCertificate,
    /// A lattice point conjugated the positive part away.
    Lattice,
    /// Nothing on the lattice and no rank obstruction.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub verdict: Option<Verdict>,
    pub witness: Option<Element>,
    pub method: OracleMethod,
    pub lambda: Rat,
}

impl OracleReport {
    pub fn to_json(&self) -> Value {
        let method = match self.method {
            OracleMethod::RankCertificate => "rank_certificate",
            OracleMethod::Lattice => "lattice",
            OracleMethod::Inconclusive => "inconclusive",
        };
        json!({
            "verdict": self.verdict.map(Verdict::name),
            "method": method,
            "witness": self.witness.as_ref().map(|w| w.to_named_json_in(1..=w.algebra().depth())),
            "lambda": rational::to_json(&self.lambda),
        })
    }
}

pub fn brute_force_oracle(datum: &HolonomyDatum, grid_radius: &Rat, grid_steps: u32) -> Result<OracleReport> {
    let algebra = datum.algebra();
    let k = algebra.depth();
    let plus: Vec<usize> = (0..algebra.dim()).filter(|&i| algebra.grade_of(i) > 0).collect();
    if k > 2 {
        return Err(Error::OracleRefused(format!("depth {k} exceeds 2")));
    }
    if plus.len() > MAX_PLUS_DIM {
        return Err(Error::OracleRefused(format!("dim p_+ = {} exceeds {MAX_PLUS_DIM}", plus.len())));
    }
    if grid_steps == 0 || !grid_radius.is_positive() {
        return Err(Error::OracleRefused("grid needs a positive radius and at least one step".into()));
    }
    let x = datum.x().coeffs().to_vec();
    let lambda = trace_pairing(algebra, datum.scale().e_lambda().coeffs(), &grade_part(algebra, &x, 0));
    let verdict_for = |killable: bool| match (killable, lambda.is_zero()) {
        (false, _) => Verdict::Essential,
        (true, true) => Verdict::Inessential,
        (true, false) => Verdict::WeylReducible,
    };

    let degree_one_ok = degree_one_solvable(algebra, &x);
    if !degree_one_ok {
        return Ok(OracleReport { verdict: Some(Verdict::Essential), witness: None, method: OracleMethod::RankCertificate, lambda });
    }

    if k == 1 {
        // the rank test is a complete certificate in depth one
        return Ok(OracleReport { verdict: Some(verdict_for(true)), witness: None, method: OracleMethod::RankCertificate, lambda });
    }
    if let Some(z) = lattice_search(algebra, &x, &plus, grid_radius, grid_steps) {
        let witness = algebra.element(z)?;
        return Ok(OracleReport { verdict: Some(verdict_for(true)), witness: Some(witness), method: OracleMethod::Lattice, lambda });
    }
    Ok(OracleReport { verdict: None, witness: None, method: OracleMethod::Inconclusive, lambda })
}

fn grade_part(algebra: &Algebra, x: &[Rat], grade: i32) -> Vec<Rat> {
    x.iter()
        .enumerate()
        .map(|(i, c)| if algebra.grade_of(i) == grade { c.clone() } else { Rat::zero() })
        .collect()
}

fn bracket(algebra: &Algebra, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
    let n = algebra.dim();
    let mut out = vec![Rat::zero(); n];
    for i in 0..n {
        if x[i].is_zero() {
            continue;
        }
        for j in 0..n {
            if y[j].is_zero() {
                continue;
            }
            for (l, c) in algebra.structure_constants(i, j) {
                out[*l] += &x[i] * &y[j] * c;
            }
        }
    }
    out
}

fn unit(n: usize, i: usize) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); n];
    v[i] = Rat::one();
    v
}

/// `trace(ad a ∘ ad b)`.
fn trace_pairing(algebra: &Algebra, a: &[Rat], b: &[Rat]) -> Rat {
    let n = algebra.dim();
    (0..n).fold(Rat::zero(), |acc, l| {
        let image = bracket(algebra, a, &bracket(algebra, b, &unit(n, l)));
        acc + &image[l]
    })
}

/// `X_1 ∈ ad(X_0)(g_1)`, by comparing ranks with and without `X_1`.
fn degree_one_solvable(algebra: &Algebra, x: &[Rat]) -> bool {
    let n = algebra.dim();
    let x0 = grade_part(algebra, x, 0);
    let g1: Vec<usize> = (0..n).filter(|&i| algebra.grade_of(i) == 1).collect();
    let columns: Vec<Vec<Rat>> = g1
        .iter()
        .map(|&j| {
            let image = bracket(algebra, &x0, &unit(n, j));
            g1.iter().map(|&r| image[r].clone()).collect()
        })
        .collect();
    let target: Vec<Rat> = g1.iter().map(|&r| x[r].clone()).collect();
    let mut augmented = columns.clone();
    augmented.push(target);
    integer_rank(&columns) == integer_rank(&augmented)
}

/// Rank of a family of rational vectors via Bareiss elimination on
/// integer-scaled copies.
pub fn integer_rank(vectors: &[Vec<Rat>]) -> usize {
    let mut rows: Vec<Vec<BigInt>> = vectors
        .iter()
        .map(|v| {
            let l = v.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            v.iter().map(|c| c.numer() * (&l / c.denom())).collect()
        })
        .collect();
    let Some(cols) = rows.first().map(Vec::len) else {
        return 0;
    };
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        for r in (rank + 1)..rows.len() {
            for c in (col + 1)..cols {
                let v = (&rows[rank][col] * &rows[r][c] - &rows[r][col] * &rows[rank][c]) / &prev;
                rows[r][c] = v;
            }
            rows[r][col] = BigInt::zero();
        }
        prev = rows[rank][col].clone();
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// `Σ_m ad(z)^m x / m!` until the terms vanish.
fn conjugate(algebra: &Algebra, z: &[Rat], x: &[Rat]) -> Vec<Rat> {
    let mut sum = x.to_vec();
    let mut term = x.to_vec();
    let mut m = 1i64;
    loop {
        term = bracket(algebra, z, &term).into_iter().map(|c| c / Rat::from_integer(m.into())).collect();
        if rational::is_zero_vec(&term) {
            return sum;
        }
        for (s, t) in sum.iter_mut().zip(&term) {
            *s += t;
        }
        m += 1;
    }
}

fn lattice_search(algebra: &Algebra, x: &[Rat], plus: &[usize], radius: &Rat, steps: u32) -> Option<Vec<Rat>> {
    let n = algebra.dim();
    let steps = steps as i64;
    let spacing = radius / Rat::from_integer(steps.into());
    let values: Vec<Rat> = (-steps..=steps).map(|j| &spacing * Rat::from_integer(j.into())).collect();
    let killed = |z: &[Rat]| {
        let c = conjugate(algebra, z, x);
        (0..n).all(|i| algebra.grade_of(i) <= 0 || c[i].is_zero())
    };
    let zero = vec![Rat::zero(); n];
    if killed(&zero) {
        return Some(zero);
    }
    // odometer over (2 steps + 1)^dim lattice points
    let base = values.len();
    let mut digits = vec![0usize; plus.len()];
    loop {
        let mut z = vec![Rat::zero(); n];
        for (d, &i) in digits.iter().zip(plus) {
            z[i] = values[*d].clone();
        }
        if killed(&z) {
            return Some(z);
        }
        let mut pos = 0;
        loop {
            if pos == digits.len() {
                return None;
            }
            digits[pos] += 1;
            if digits[pos] < base {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_conformal, build_cr};
    use crate::rational::{rat, ratio};

    fn report(a: &Algebra, terms: &[(&str, Rat)]) -> OracleReport {
        let d = HolonomyDatum::with_default_scale(a.combination(terms).unwrap()).unwrap();
        brute_force_oracle(&d, &rat(2), 2).unwrap()
    }

    #[test]
    fn bareiss_rank() {
        let v = |xs: &[i64]| xs.iter().map(|&x| rat(x)).collect::<Vec<_>>();
        assert_eq!(integer_rank(&[v(&[1, 2, 3]), v(&[2, 4, 6]), v(&[0, 1, 1])]), 2);
        assert_eq!(integer_rank(&[vec![ratio(1, 2), ratio(1, 3)], vec![rat(3), rat(2)]]), 1);
        assert_eq!(integer_rank(&[v(&[0, 0]), v(&[0, 0])]), 0);
        assert_eq!(integer_rank(&[v(&[0, 1]), v(&[1, 0]), v(&[1, 1])]), 2);
    }

    #[test]
    fn zero_is_inessential() {
        let a = build_conformal(3, 0).unwrap();
        let r = report(&a, &[]);
        assert_eq!(r.verdict, Some(Verdict::Inessential));
        assert_eq!(r.method, OracleMethod::RankCertificate);
        let r = report(&build_cr(1).unwrap(), &[]);
        assert_eq!(r.method, OracleMethod::Lattice);
        assert!(r.witness.unwrap().is_zero());
    }

    #[test]
    fn conformal_catalog() {
        let a = build_conformal(3, 0).unwrap();
        assert_eq!(report(&a, &[("D", rat(1))]).verdict, Some(Verdict::WeylReducible));
        assert_eq!(report(&a, &[("D", rat(1))]).lambda, rat(6));
        assert_eq!(report(&a, &[("M_12", rat(1))]).verdict, Some(Verdict::Inessential));
        assert_eq!(report(&a, &[("K_1", rat(1))]).verdict, Some(Verdict::Essential));
        let r = report(&a, &[("M_12", rat(1)), ("K_1", rat(1))]);
        assert_eq!(r.verdict, Some(Verdict::Inessential));
        assert_eq!(r.method, OracleMethod::RankCertificate);
    }

    #[test]
    fn su21_lattice_and_inconclusive() {
        let a = build_cr(1).unwrap();
        // Z = X_2 / 2 = T lies on the unit lattice
        let r = report(&a, &[("E", rat(1)), ("T", rat(2))]);
        assert_eq!(r.verdict, Some(Verdict::WeylReducible));
        assert_eq!(r.method, OracleMethod::Lattice);
        assert_eq!(r.witness.unwrap(), a.named("T").unwrap());
        // Z = T/2 is not on the unit lattice
        assert_eq!(report(&a, &[("E", rat(1)), ("T", rat(1))]).method, OracleMethod::Inconclusive);
        assert_eq!(report(&a, &[("T", rat(1))]).method, OracleMethod::Inconclusive);
        assert_eq!(report(&a, &[("K_1", rat(1))]).method, OracleMethod::RankCertificate);
    }

    #[test]
    fn refuses_bad_grids() {
        let a = build_conformal(3, 0).unwrap();
        let d = HolonomyDatum::with_default_scale(a.zero()).unwrap();
        assert!(matches!(brute_force_oracle(&d, &rat(0), 2), Err(Error::OracleRefused(_))));
        assert!(matches!(brute_force_oracle(&d, &rat(1), 0), Err(Error::OracleRefused(_))));
        let big = build_cr(4).unwrap();
        let d = HolonomyDatum::with_default_scale(big.zero()).unwrap();
        assert!(matches!(brute_force_oracle(&d, &rat(1), 1), Err(Error::OracleRefused(_))));
    }
}
