//! |k|-graded semisimple Lie algebras with exact structure constants.
//!
//! An algebra is built once (usually from a matrix realization), checked
//! against every structural axiom, and then shared immutably behind an
//! [`Arc`]. Elements carry a handle to their algebra so that mixing
//! elements of different algebras is caught at run time.

mod conformal;
mod cr;
mod element;

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

pub use conformal::build_conformal;
pub(crate) use conformal::rotation_name;
pub use cr::build_cr;
pub use element::Element;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::rational::{self, Rat};

pub type Algebra = Arc<GradedLieAlgebra>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Conformal,
    Cr,
    Custom(String),
}

impl Family {
    pub fn name(&self) -> &str {
        match self {
            Family::Conformal => "conformal",
            Family::Cr => "cr",
            Family::Custom(name) => name,
        }
    }
}

/// Identifies an algebra: the constructor family and its parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Descriptor {
    pub family: Family,
    pub params: Vec<i64>,
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params.iter().map(i64::to_string).collect();
        write!(f, "{}({})", self.family.name(), params.join(","))
    }
}

/// Sparse structure constants: `table[i][j]` lists `(l, c)` with
/// `[e_i, e_j] = Σ c e_l`.
type SparseTable = Vec<Vec<Vec<(usize, Rat)>>>;

pub struct GradedLieAlgebra {
    descriptor: Descriptor,
    names: Vec<String>,
    grades: Vec<i32>,
    k: i32,
    table: SparseTable,
    table_f64: Vec<Vec<Vec<(usize, f64)>>>,
    by_grade: Vec<Vec<usize>>,
    killing: Matrix,
    grading_element: Vec<Rat>,
    realization: Option<Vec<Matrix>>,
    realization_f64: Option<Vec<nalgebra::DMatrix<f64>>>,
    coordinatizer: Option<Coordinatizer>,
}

impl fmt::Debug for GradedLieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GradedLieAlgebra")
            .field("descriptor", &self.descriptor.to_string())
            .field("dim", &self.dim())
            .field("k", &self.k)
            .field("grade_dims", &self.grade_dims())
            .finish()
    }
}

/// Outcome of checking every structural axiom exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct AxiomReport {
    pub dim: usize,
    /// Number of `(i, j, l)` with `c[i][j][l] + c[j][i][l] != 0`.
    pub antisymmetry_violations: usize,
    /// Largest absolute coefficient of any Jacobiator of basis triples.
    pub jacobi_residual: Rat,
    /// Number of brackets with support outside grade `a + b`.
    pub grading_violations: usize,
    pub generated_by_minus_one: bool,
    pub killing_rank: usize,
    /// `(j, rank of B on g_j x g_-j, dim g_j)` for `j = 1..=k`.
    pub pairing_ranks: Vec<(i32, usize, usize)>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.antisymmetry_violations == 0
            && self.jacobi_residual.is_zero()
            && self.grading_violations == 0
            && self.generated_by_minus_one
            && self.killing_rank == self.dim
            && self.pairing_ranks.iter().all(|(_, r, d)| r == d)
    }

    fn first_failure(&self) -> Option<String> {
        if self.antisymmetry_violations > 0 {
            return Some(format!("{} antisymmetry violations", self.antisymmetry_violations));
        }
        if !self.jacobi_residual.is_zero() {
            return Some(format!("Jacobi residual {}", rational::format(&self.jacobi_residual)));
        }
        if self.grading_violations > 0 {
            return Some(format!("{} brackets violate the grading", self.grading_violations));
        }
        if !self.generated_by_minus_one {
            return Some("negative part is not generated by grade -1".into());
        }
        if self.killing_rank != self.dim {
            return Some(format!("Killing form has rank {} < {}", self.killing_rank, self.dim));
        }
        self.pairing_ranks
            .iter()
            .find(|(_, r, d)| r != d)
            .map(|(j, r, d)| format!("Killing pairing of grades {j} and -{j} has rank {r} < {d}"))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dim": self.dim,
            "antisymmetry_violations": self.antisymmetry_violations,
            "jacobi_residual": rational::to_json(&self.jacobi_residual),
            "grading_violations": self.grading_violations,
            "generated_by_minus_one": self.generated_by_minus_one,
            "killing_rank": self.killing_rank,
            "pairing_ranks": self.pairing_ranks.iter()
                .map(|(j, r, d)| json!({"grade": j, "rank": r, "dim": d}))
                .collect::<Vec<_>>(),
            "passed": self.passed(),
        })
    }
}

impl GradedLieAlgebra {
    /// Builds and validates an algebra from explicit structure constants.
    pub fn from_structure_constants(
        descriptor: Descriptor,
        names: Vec<String>,
        grades: Vec<i32>,
        table: Vec<Vec<Vec<(usize, Rat)>>>,
    ) -> Result<Algebra> {
        Self::assemble(descriptor, names, grades, table, None)
    }

    /// Builds the algebra spanned by the given matrices, which must be
    /// linearly independent and closed under the commutator.
    pub fn from_realization(
        descriptor: Descriptor,
        names: Vec<String>,
        grades: Vec<i32>,
        matrices: Vec<Matrix>,
    ) -> Result<Algebra> {
        let coords = Coordinatizer::new(&matrices)?;
        let dim = matrices.len();
        let mut table = vec![vec![Vec::new(); dim]; dim];
        for i in 0..dim {
            for j in (i + 1)..dim {
                let c = coords
                    .coordinates(&matrices[i].commutator(&matrices[j]))
                    .ok_or_else(|| {
                        Error::Structural(format!("[{}, {}] leaves the span of the basis", names[i], names[j]))
                    })?;
                let sparse: Vec<(usize, Rat)> =
                    c.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect();
                table[j][i] = sparse.iter().map(|(l, v)| (*l, -v.clone())).collect();
                table[i][j] = sparse;
            }
        }
        Self::assemble(descriptor, names, grades, table, Some((matrices, coords)))
    }

    fn assemble(
        descriptor: Descriptor,
        names: Vec<String>,
        grades: Vec<i32>,
        table: SparseTable,
        realization: Option<(Vec<Matrix>, Coordinatizer)>,
    ) -> Result<Algebra> {
        let (realization, coordinatizer) = match realization {
            Some((m, c)) => (Some(m), Some(c)),
            None => (None, None),
        };
        let dim = names.len();
        if dim == 0 {
            return Err(Error::Structural("empty basis".into()));
        }
        if grades.len() != dim || table.len() != dim || table.iter().any(|row| row.len() != dim) {
            return Err(Error::Structural("basis, grades and structure constants disagree in size".into()));
        }
        if table.iter().flatten().flatten().any(|(l, _)| *l >= dim) {
            return Err(Error::Structural("structure constant index out of range".into()));
        }
        let k = grades.iter().map(|g| g.abs()).max().unwrap_or(0);
        if k == 0 {
            return Err(Error::Structural("grading is trivial".into()));
        }
        let by_grade: Vec<Vec<usize>> =
            (-k..=k).map(|g| (0..dim).filter(|&i| grades[i] == g).collect()).collect();
        let table_f64 = table
            .iter()
            .map(|row| {
                row.iter()
                    .map(|entries| entries.iter().map(|(l, c)| (*l, rational::to_f64(c))).collect())
                    .collect()
            })
            .collect();
        let mut algebra = GradedLieAlgebra {
            descriptor,
            names,
            grades,
            k,
            table,
            table_f64,
            by_grade,
            killing: Matrix::zeros(dim, dim),
            grading_element: vec![Rat::zero(); dim],
            realization_f64: realization.as_ref().map(|ms| ms.iter().map(Matrix::to_f64).collect()),
            realization,
            coordinatizer,
        };
        algebra.killing = algebra.compute_killing_matrix();
        let report = algebra.verify_axioms();
        if let Some(failure) = report.first_failure() {
            return Err(Error::Structural(format!("{}: {failure}", algebra.descriptor)));
        }
        algebra.grading_element = algebra.solve_grading_element()?;
        Ok(Arc::new(algebra))
    }

    pub fn descriptor(&self) -> &Descriptor {
        &self.descriptor
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    /// Grading depth `k`.
    pub fn depth(&self) -> i32 {
        self.k
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn grades(&self) -> &[i32] {
        &self.grades
    }

    pub fn grade_of(&self, index: usize) -> i32 {
        self.grades[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Basis indices of the given grade (empty when `|grade| > k`).
    pub fn grade_indices(&self, grade: i32) -> &[usize] {
        if grade.abs() > self.k {
            return &[];
        }
        &self.by_grade[(grade + self.k) as usize]
    }

    /// Dimensions of `g_-k, ..., g_k`.
    pub fn grade_dims(&self) -> Vec<usize> {
        self.by_grade.iter().map(Vec::len).collect()
    }

    pub fn realization(&self) -> Option<&[Matrix]> {
        self.realization.as_deref()
    }

    /// Basis coordinates of a matrix in the span of the realization.
    pub fn coordinates_of(&self, m: &Matrix) -> Result<Option<Vec<Rat>>> {
        let coords =
            self.coordinatizer.as_ref().ok_or_else(|| Error::NoRealization(self.descriptor.to_string()))?;
        if m.entries().len() != coords.basis.rows() {
            return Err(Error::Domain(format!("a {}x{} matrix does not fit the realization", m.rows(), m.cols())));
        }
        Ok(coords.coordinates(m))
    }

    /// `ρ(x)` in the registered matrix realization.
    pub fn realize(&self, x: &[Rat]) -> Result<Matrix> {
        let basis = self.realization.as_ref().ok_or_else(|| Error::NoRealization(self.descriptor.to_string()))?;
        let size = basis[0].rows();
        let mut m = Matrix::zeros(size, size);
        for (c, b) in x.iter().zip(basis) {
            if !c.is_zero() {
                m = m.add(&b.scale(c));
            }
        }
        Ok(m)
    }

    pub fn realize_f64(&self, x: &[f64]) -> Result<nalgebra::DMatrix<f64>> {
        let basis =
            self.realization_f64.as_ref().ok_or_else(|| Error::NoRealization(self.descriptor.to_string()))?;
        let size = basis[0].nrows();
        let mut m = nalgebra::DMatrix::zeros(size, size);
        for (&c, b) in x.iter().zip(basis) {
            if c != 0.0 {
                m += b * c;
            }
        }
        Ok(m)
    }

    /// Gram matrix of the Killing form in the chosen basis.
    pub fn killing_matrix(&self) -> &Matrix {
        &self.killing
    }

    /// `(l, c)` pairs with `[e_i, e_j] = Σ c e_l`.
    pub fn structure_constants(&self, i: usize, j: usize) -> &[(usize, Rat)] {
        &self.table[i][j]
    }

    pub fn is_same(&self, other: &GradedLieAlgebra) -> bool {
        std::ptr::eq(self, other) || (self.descriptor == other.descriptor && self.names == other.names)
    }

    pub(crate) fn check_grade(&self, grade: i32) -> Result<()> {
        if grade.abs() > self.k {
            Err(Error::GradeOutOfRange { grade, k: self.k })
        } else {
            Ok(())
        }
    }

    pub fn bracket_coeffs(&self, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.dim()];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() || i == j {
                    continue;
                }
                let w = xi * yj;
                for (l, c) in &self.table[i][j] {
                    out[*l] += &w * c;
                }
            }
        }
        out
    }

    pub fn bracket_f64(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj == 0.0 || i == j {
                    continue;
                }
                for &(l, c) in &self.table_f64[i][j] {
                    out[l] += xi * yj * c;
                }
            }
        }
        out
    }

    /// Matrix of `ad(x)`: column `l` holds the coordinates of `[x, e_l]`.
    pub fn ad_matrix(&self, x: &[Rat]) -> Matrix {
        let n = self.dim();
        let mut m = Matrix::zeros(n, n);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for l in 0..n {
                for (r, c) in &self.table[i][l] {
                    m[(*r, l)] += xi * c;
                }
            }
        }
        m
    }

    /// `ad(x)` restricted to `g_from`, followed by projection onto `g_to`,
    /// in the grade-adapted bases.
    pub fn ad_block(&self, x: &[Rat], from: i32, to: i32) -> Matrix {
        let cols = self.grade_indices(from);
        let rows = self.grade_indices(to);
        let mut m = Matrix::zeros(rows.len(), cols.len());
        for (c, &l) in cols.iter().enumerate() {
            let mut e = vec![Rat::zero(); self.dim()];
            e[l] = Rat::one();
            let image = self.bracket_coeffs(x, &e);
            for (r, &row) in rows.iter().enumerate() {
                m[(r, c)] = image[row].clone();
            }
        }
        m
    }

    /// `B(e_i, e_j) = Σ_l Σ_m c[i][m][l] c[j][l][m]`, read off the sparse table.
    fn compute_killing_matrix(&self) -> Matrix {
        let n = self.dim();
        // dense[i][m][l] = c[i][m][l]
        let dense: Vec<Vec<Vec<Rat>>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|m| {
                        let mut row = vec![Rat::zero(); n];
                        for (l, c) in &self.table[i][m] {
                            row[*l] = c.clone();
                        }
                        row
                    })
                    .collect()
            })
            .collect();
        let mut gram = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut t = Rat::zero();
                for l in 0..n {
                    for (m, c) in &self.table[j][l] {
                        let a = &dense[i][*m][l];
                        if !a.is_zero() {
                            t += a * c;
                        }
                    }
                }
                gram[(j, i)] = t.clone();
                gram[(i, j)] = t;
            }
        }
        gram
    }

    pub fn killing_coeffs(&self, x: &[Rat], y: &[Rat]) -> Rat {
        rational::dot(x, &self.killing.mul_vec(y))
    }

    pub fn verify_axioms(&self) -> AxiomReport {
        let n = self.dim();
        let mut antisymmetry_violations = 0;
        for i in 0..n {
            for j in 0..n {
                let mut sum = vec![Rat::zero(); n];
                for (l, c) in &self.table[i][j] {
                    sum[*l] += c;
                }
                for (l, c) in &self.table[j][i] {
                    sum[*l] += c;
                }
                antisymmetry_violations += sum.iter().filter(|v| !v.is_zero()).count();
            }
        }

        let unit = |i: usize| {
            let mut e = vec![Rat::zero(); n];
            e[i] = Rat::one();
            e
        };
        let mut jacobi_residual = Rat::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                for l in (j + 1)..n {
                    let (ei, ej, el) = (unit(i), unit(j), unit(l));
                    let a = self.bracket_coeffs(&ei, &self.bracket_coeffs(&ej, &el));
                    let b = self.bracket_coeffs(&ej, &self.bracket_coeffs(&el, &ei));
                    let c = self.bracket_coeffs(&el, &self.bracket_coeffs(&ei, &ej));
                    for m in 0..n {
                        let r = (&a[m] + &b[m] + &c[m]).abs();
                        if r > jacobi_residual {
                            jacobi_residual = r;
                        }
                    }
                }
            }
        }

        let mut grading_violations = 0;
        for i in 0..n {
            for j in 0..n {
                let target = self.grades[i] + self.grades[j];
                grading_violations += self.table[i][j]
                    .iter()
                    .filter(|(l, c)| !c.is_zero() && self.grades[*l] != target)
                    .count();
            }
        }

        let generated_by_minus_one = self.check_generation();
        let killing_rank = self.killing.rank();
        let pairing_ranks = (1..=self.k)
            .map(|j| {
                let pos = self.grade_indices(j);
                let neg = self.grade_indices(-j);
                let mut block = Matrix::zeros(pos.len(), neg.len());
                for (r, &a) in pos.iter().enumerate() {
                    for (c, &b) in neg.iter().enumerate() {
                        block[(r, c)] = self.killing[(a, b)].clone();
                    }
                }
                let dim = pos.len().max(neg.len());
                (j, block.rank(), dim)
            })
            .collect();

        AxiomReport {
            dim: n,
            antisymmetry_violations,
            jacobi_residual,
            grading_violations,
            generated_by_minus_one,
            killing_rank,
            pairing_ranks,
        }
    }

    /// Iterated brackets of grade -1 vectors span every `g_-j`.
    fn check_generation(&self) -> bool {
        let n = self.dim();
        let generators: Vec<Vec<Rat>> = self
            .grade_indices(-1)
            .iter()
            .map(|&i| {
                let mut e = vec![Rat::zero(); n];
                e[i] = Rat::one();
                e
            })
            .collect();
        if generators.is_empty() {
            return false;
        }
        let mut layer = generators.clone();
        for j in 2..=self.k {
            let spanning: Vec<Vec<Rat>> = generators
                .iter()
                .flat_map(|g| layer.iter().map(move |v| (g, v)))
                .map(|(g, v)| self.bracket_coeffs(g, v))
                .collect();
            // keep an independent subset to bound the next layer
            let rref = Matrix::from_rows(spanning.clone()).transpose().rref();
            layer = rref.pivots.iter().map(|&p| spanning[p].clone()).collect();
            if layer.len() != self.grade_indices(-j).len() {
                return false;
            }
        }
        true
    }

    /// Solves `[E, e_i] = grade(i) e_i` for all basis vectors.
    pub fn solve_grading_element(&self) -> Result<Vec<Rat>> {
        let n = self.dim();
        let mut system = Matrix::zeros(n * n, n);
        let mut rhs = vec![Rat::zero(); n * n];
        for i in 0..n {
            rhs[i * n + i] = rational::rat(self.grades[i] as i64);
            for j in 0..n {
                for (m, c) in &self.table[j][i] {
                    system[(i * n + m, j)] += c;
                }
            }
        }
        let solution = system
            .solve(&rhs)
            .ok_or_else(|| Error::Structural("no element acts by the grading".into()))?;
        if !system.kernel().is_empty() {
            return Err(Error::Structural("grading element is not unique".into()));
        }
        Ok(solution)
    }

    /// JSON description: family, parameters, basis names and grades.
    pub fn describe(&self) -> Value {
        json!({
            "family": self.descriptor.family.name(),
            "params": self.descriptor.params,
            "basis": self.names,
            "grades": self.grades,
        })
    }

    /// Non-zero structure constants as `[i, j, l, c]` with `i < j`.
    pub fn structure_triples(&self) -> Value {
        let mut out = Vec::new();
        for i in 0..self.dim() {
            for j in (i + 1)..self.dim() {
                for (l, c) in &self.table[i][j] {
                    out.push(json!([i, j, l, rational::to_json(c)]));
                }
            }
        }
        Value::Array(out)
    }
}

/// Expresses matrices in the coordinates of a linearly independent family.
struct Coordinatizer {
    basis: Matrix,
    pivot_rows: Vec<usize>,
    inverse: Matrix,
}

impl Coordinatizer {
    fn new(matrices: &[Matrix]) -> Result<Self> {
        let Some(first) = matrices.first() else {
            return Err(Error::Structural("empty realization".into()));
        };
        let size = first.rows() * first.cols();
        if matrices.iter().any(|m| m.rows() != first.rows() || m.cols() != first.cols()) {
            return Err(Error::Structural("realization matrices differ in shape".into()));
        }
        let columns: Vec<Vec<Rat>> = matrices.iter().map(|m| m.entries().to_vec()).collect();
        let basis = Matrix::from_columns(size, &columns);
        let pivot_rows = basis.transpose().rref().pivots;
        if pivot_rows.len() != matrices.len() {
            return Err(Error::Structural("realization matrices are linearly dependent".into()));
        }
        let square = Matrix::from_rows(pivot_rows.iter().map(|&r| basis.row(r).to_vec()).collect());
        let inverse = square.inverse().expect("pivot rows form an invertible block");
        Ok(Self { basis, pivot_rows, inverse })
    }

    fn coordinates(&self, m: &Matrix) -> Option<Vec<Rat>> {
        let picked: Vec<Rat> = self.pivot_rows.iter().map(|&r| m.entries()[r].clone()).collect();
        let c = self.inverse.mul_vec(&picked);
        (self.basis.mul_vec(&c) == m.entries()).then_some(c)
    }
}

/// Rank of the span of the given elements' coefficient vectors.
pub fn rank_of(elements: &[Element]) -> usize {
    linalg::span_rank(&elements.iter().map(|e| e.coeffs().to_vec()).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn sl2() -> Result<Algebra> {
        // basis f (grade -1), h (grade 0), e (grade 1) with [h,e]=2e, [h,f]=-2f, [e,f]=h
        let mut t = vec![vec![Vec::new(); 3]; 3];
        t[1][2] = vec![(2, rat(2))];
        t[2][1] = vec![(2, rat(-2))];
        t[1][0] = vec![(0, rat(-2))];
        t[0][1] = vec![(0, rat(2))];
        t[2][0] = vec![(1, rat(1))];
        t[0][2] = vec![(1, rat(-1))];
        GradedLieAlgebra::from_structure_constants(
            Descriptor { family: Family::Custom("sl2".into()), params: vec![] },
            vec!["f".into(), "h".into(), "e".into()],
            vec![-1, 0, 1],
            t,
        )
    }

    #[test]
    fn sl2_from_structure_constants() {
        let a = sl2().unwrap();
        assert_eq!(a.grade_dims(), vec![1, 1, 1]);
        // grading element is h/2
        assert_eq!(a.grading_element, vec![rat(0), crate::rational::ratio(1, 2), rat(0)]);
        // B(h, h) = 8
        assert_eq!(a.killing_matrix()[(1, 1)], rat(8));
    }

    #[test]
    fn broken_antisymmetry_is_rejected() {
        let mut t = vec![vec![Vec::new(); 3]; 3];
        t[1][2] = vec![(2, rat(2))];
        let err = GradedLieAlgebra::from_structure_constants(
            Descriptor { family: Family::Custom("bad".into()), params: vec![] },
            vec!["f".into(), "h".into(), "e".into()],
            vec![-1, 0, 1],
            t,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Structural(msg) if msg.contains("antisymmetry")));
    }

    #[test]
    fn abelian_algebra_fails_nondegeneracy() {
        let t = vec![vec![Vec::new(); 2]; 2];
        let err = GradedLieAlgebra::from_structure_constants(
            Descriptor { family: Family::Custom("abelian".into()), params: vec![] },
            vec!["a".into(), "b".into()],
            vec![-1, 1],
            t,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Structural(_)));
    }
}
