//! Exact integer/rational linear algebra and lattice bookkeeping.
//!
//! Everything here is arbitrary precision; there is no floating point
//! anywhere in the pipeline. Hermite normal form is the canonical form
//! for all basis-valued answers, so results are deterministic across runs.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Int = BigInt;
pub type Rat = BigRational;
pub type IntVec = Vec<Int>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactlatError {
    #[error("zero vector has no primitive part")]
    ZeroVector,
    #[error("quotient by the given sublattice has torsion")]
    NotSaturated,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("lattice map is not well-defined on the quotient presentations")]
    IllDefinedMap,
}

pub fn int(n: i64) -> Int {
    Int::from(n)
}

pub fn vec_i64(v: &[i64]) -> IntVec {
    v.iter().map(|&x| Int::from(x)).collect()
}

pub fn is_zero_vec(v: &[Int]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn dot(a: &[Int], b: &[Int]) -> Int {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn add_vec(a: &[Int], b: &[Int]) -> IntVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_vec(a: &[Int], b: &[Int]) -> IntVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn neg_vec(a: &[Int]) -> IntVec {
    a.iter().map(|x| -x).collect()
}

pub fn scale_vec(c: &Int, a: &[Int]) -> IntVec {
    a.iter().map(|x| c * x).collect()
}

/// `a + c*b`, the workhorse of all row operations.
pub fn add_scaled(a: &[Int], c: &Int, b: &[Int]) -> IntVec {
    a.iter().zip(b).map(|(x, y)| x + c * y).collect()
}

pub fn gcd_vec(v: &[Int]) -> Int {
    let mut g = Int::zero();
    for x in v {
        g = g.gcd(x);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Divides a nonzero vector by the gcd of its components, preserving direction.
pub fn primitive(v: &[Int]) -> Result<IntVec, ExactlatError> {
    if is_zero_vec(v) {
        return Err(ExactlatError::ZeroVector);
    }
    let g = gcd_vec(v);
    Ok(v.iter().map(|x| x / &g).collect())
}

/// Dense integer matrix, row major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Int>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat {
            rows,
            cols,
            data: vec![Int::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Int::one();
        }
        m
    }

    pub fn from_rows(rows: &[IntVec]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
        }
        IntMat {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().cloned().collect(),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let v: Vec<IntVec> = rows.iter().map(|r| vec_i64(r)).collect();
        Self::from_rows(&v)
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> IntVec {
        self.row(i).to_vec()
    }

    pub fn to_rows(&self) -> Vec<IntVec> {
        (0..self.rows).map(|i| self.row_vec(i)).collect()
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(
            self.cols, other.rows,
            "dimension mismatch in matrix product"
        );
        let mut out = IntMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = a * &other[(k, j)];
                    out[(i, j)] += t;
                }
            }
        }
        out
    }

    /// Column-convention action: `v ↦ A·v`.
    pub fn mul_vec(&self, v: &[Int]) -> IntVec {
        assert_eq!(
            self.cols,
            v.len(),
            "dimension mismatch in matrix-vector product"
        );
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self[(i, j)].clone();
            self[(i, j)] = v;
        }
    }

    /// row_i += c * row_j
    fn add_row_multiple(&mut self, i: usize, c: &Int, j: usize) {
        for col in 0..self.cols {
            let t = c * &self[(j, col)];
            self[(i, col)] += t;
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// col_a += c * col_b
    fn add_col_multiple(&mut self, a: usize, c: &Int, b: usize) {
        for i in 0..self.rows {
            let t = c * &self[(i, b)];
            self[(i, a)] += t;
        }
    }

    /// Rank over the rationals, fraction-free elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        let mut row = 0;
        for col in 0..m.cols {
            let pivot = (row..m.rows).find(|&i| !m[(i, col)].is_zero());
            let Some(p) = pivot else { continue };
            m.swap_rows(row, p);
            for i in row + 1..m.rows {
                if m[(i, col)].is_zero() {
                    continue;
                }
                let a = m[(row, col)].clone();
                let b = m[(i, col)].clone();
                for j in col..m.cols {
                    let v = &a * &m[(i, j)] - &b * &m[(row, j)];
                    m[(i, j)] = v;
                }
            }
            row += 1;
            rank += 1;
            if row == m.rows {
                break;
            }
        }
        rank
    }

    /// Determinant of a square matrix (Bareiss).
    pub fn det(&self) -> Int {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut m = self.clone();
        let mut sign = 1i32;
        let mut prev = Int::one();
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !m[(i, k)].is_zero()) else {
                    return Int::zero();
                };
                m.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&m[(k, k)] * &m[(i, j)] - &m[(i, k)] * &m[(k, j)]) / &prev;
                    m[(i, j)] = v;
                }
            }
            prev = m[(k, k)].clone();
        }
        let d = m[(n - 1, n - 1)].clone();
        if sign < 0 {
            -d
        } else {
            d
        }
    }

    /// Exact inverse of a matrix with determinant ±1.
    pub fn inverse_unimodular(&self) -> Option<IntMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        // Gauss-Jordan over Q; entries of the result are integral iff det = ±1.
        let mut a: Vec<Vec<Rat>> = (0..n)
            .map(|i| self.row(i).iter().map(|x| Rat::from(x.clone())).collect())
            .collect();
        let mut inv: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                    .collect()
            })
            .collect();
        for col in 0..n {
            let p = (col..n).find(|&i| !a[i][col].is_zero())?;
            a.swap(col, p);
            inv.swap(col, p);
            let piv = a[col][col].clone();
            for j in 0..n {
                a[col][j] /= piv.clone();
                inv[col][j] /= piv.clone();
            }
            for i in 0..n {
                if i == col || a[i][col].is_zero() {
                    continue;
                }
                let f = a[i][col].clone();
                for j in 0..n {
                    let av = a[col][j].clone() * f.clone();
                    a[i][j] -= av;
                    let iv = inv[col][j].clone() * f.clone();
                    inv[i][j] -= iv;
                }
            }
        }
        let mut out = IntMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if !inv[i][j].denom().is_one() {
                    return None;
                }
                out[(i, j)] = inv[i][j].numer().clone();
            }
        }
        Some(out)
    }
}

impl std::ops::Index<(usize, usize)> for IntMat {
    type Output = Int;
    fn index(&self, (i, j): (usize, usize)) -> &Int {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Int {
        &mut self.data[i * self.cols + j]
    }
}

/// Row-style Hermite normal form: returns `(h, u)` with `h = u·m`, `u`
/// unimodular, pivots positive, entries above each pivot reduced into
/// `[0, pivot)`. Zero rows sink to the bottom.
pub fn hermite_normal_form(m: &IntMat) -> (IntMat, IntMat) {
    let mut h = m.clone();
    let mut u = IntMat::identity(m.rows);
    let mut pivot_row = 0;
    for col in 0..h.cols {
        if pivot_row == h.rows {
            break;
        }
        // Euclidean reduction within the column until one nonzero entry remains.
        loop {
            let mut best: Option<usize> = None;
            for i in pivot_row..h.rows {
                if h[(i, col)].is_zero() {
                    continue;
                }
                best = match best {
                    None => Some(i),
                    Some(b) => {
                        if h[(i, col)].abs() < h[(b, col)].abs() {
                            Some(i)
                        } else {
                            Some(b)
                        }
                    }
                };
            }
            let Some(b) = best else { break };
            h.swap_rows(pivot_row, b);
            u.swap_rows(pivot_row, b);
            let mut done = true;
            for i in pivot_row + 1..h.rows {
                if h[(i, col)].is_zero() {
                    continue;
                }
                let q = -h[(i, col)].div_floor(&h[(pivot_row, col)]);
                h.add_row_multiple(i, &q, pivot_row);
                u.add_row_multiple(i, &q, pivot_row);
                if !h[(i, col)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[(pivot_row, col)].is_zero() {
            continue;
        }
        if h[(pivot_row, col)].is_negative() {
            h.negate_row(pivot_row);
            u.negate_row(pivot_row);
        }
        for i in 0..pivot_row {
            let q = -h[(i, col)].div_floor(&h[(pivot_row, col)]);
            if !q.is_zero() {
                h.add_row_multiple(i, &q, pivot_row);
                u.add_row_multiple(i, &q, pivot_row);
            }
        }
        pivot_row += 1;
    }
    (h, u)
}

/// Smith normal form: returns `(s, left, right)` with `s = left·m·right`
/// diagonal, nonnegative, and satisfying the divisibility chain; `left`
/// and `right` are unimodular.
pub fn smith_normal_form(m: &IntMat) -> (IntMat, IntMat, IntMat) {
    let mut s = m.clone();
    let mut left = IntMat::identity(m.rows);
    let mut right = IntMat::identity(m.cols);
    let n = m.rows.min(m.cols);
    let mut k = 0;
    while k < n {
        // Move a nonzero entry of minimal absolute value to (k, k).
        let mut best: Option<(usize, usize)> = None;
        for i in k..s.rows {
            for j in k..s.cols {
                if s[(i, j)].is_zero() {
                    continue;
                }
                best = match best {
                    None => Some((i, j)),
                    Some((bi, bj)) => {
                        if s[(i, j)].abs() < s[(bi, bj)].abs() {
                            Some((i, j))
                        } else {
                            Some((bi, bj))
                        }
                    }
                };
            }
        }
        let Some((bi, bj)) = best else { break };
        s.swap_rows(k, bi);
        left.swap_rows(k, bi);
        s.swap_cols(k, bj);
        right.swap_cols(k, bj);

        let mut clean = true;
        for i in k + 1..s.rows {
            if s[(i, k)].is_zero() {
                continue;
            }
            let q = -s[(i, k)].div_floor(&s[(k, k)]);
            s.add_row_multiple(i, &q, k);
            left.add_row_multiple(i, &q, k);
            if !s[(i, k)].is_zero() {
                clean = false;
            }
        }
        for j in k + 1..s.cols {
            if s[(k, j)].is_zero() {
                continue;
            }
            let q = -s[(k, j)].div_floor(&s[(k, k)]);
            s.add_col_multiple(j, &q, k);
            right.add_col_multiple(j, &q, k);
            if !s[(k, j)].is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // Enforce divisibility: fold any non-multiple into row k and redo.
        let mut redo = false;
        'outer: for i in k + 1..s.rows {
            for j in k + 1..s.cols {
                if !(&s[(i, j)] % &s[(k, k)]).is_zero() {
                    let one = Int::one();
                    s.add_row_multiple(k, &one, i);
                    left.add_row_multiple(k, &one, i);
                    redo = true;
                    break 'outer;
                }
            }
        }
        if redo {
            continue;
        }
        if s[(k, k)].is_negative() {
            s.negate_row(k);
            left.negate_row(k);
        }
        k += 1;
    }
    (s, left, right)
}

/// Basis of `{v : m·v = 0}` in Hermite normal form. Kernels of integer
/// matrices are saturated, so the quotient by the span is torsion free.
pub fn kernel_basis(m: &IntMat) -> Vec<IntVec> {
    let (h, u) = hermite_normal_form(&m.transpose());
    let mut out = Vec::new();
    for i in 0..h.rows {
        if is_zero_vec(h.row(i)) {
            out.push(u.row_vec(i));
        }
    }
    hnf_rows(&out)
}

/// Canonicalizes a list of vectors as the HNF basis of their row span.
pub fn hnf_rows(rows: &[IntVec]) -> Vec<IntVec> {
    if rows.is_empty() {
        return Vec::new();
    }
    let (h, _) = hermite_normal_form(&IntMat::from_rows(rows));
    (0..h.rows)
        .filter(|&i| !is_zero_vec(h.row(i)))
        .map(|i| h.row_vec(i))
        .collect()
}

/// Rank of a rational matrix given as rows.
pub fn rational_rank(rows: &[Vec<Rat>]) -> usize {
    let mut rows = rows.to_vec();
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(row, p);
        for i in row + 1..rows.len() {
            if rows[i][col].is_zero() {
                continue;
            }
            let f = rows[i][col].clone() / rows[row][col].clone();
            let pivot_row = rows[row].clone();
            for (entry, pv) in rows[i][col..].iter_mut().zip(&pivot_row[col..]) {
                *entry -= pv * &f;
            }
        }
        row += 1;
        rank += 1;
        if row == rows.len() {
            break;
        }
    }
    rank
}

/// Basis of a complement of the saturated sublattice spanned by `sub`:
/// the union of the two bases is a basis of the ambient lattice.
pub fn lattice_complement(
    sub: &[IntVec],
    ambient_rank: usize,
) -> Result<Vec<IntVec>, ExactlatError> {
    for v in sub {
        if v.len() != ambient_rank {
            return Err(ExactlatError::DimensionMismatch {
                expected: ambient_rank,
                got: v.len(),
            });
        }
    }
    if sub.is_empty() {
        return Ok(IntMat::identity(ambient_rank).to_rows());
    }
    let b = IntMat::from_rows(sub);
    let (s, _, r) = smith_normal_form(&b);
    let k = sub.len();
    for i in 0..k {
        if i >= s.cols || !s[(i, i)].is_one() {
            return Err(ExactlatError::NotSaturated);
        }
    }
    let r_inv = r
        .inverse_unimodular()
        .expect("SNF right factor is unimodular");
    let comp: Vec<IntVec> = (k..ambient_rank).map(|i| r_inv.row_vec(i)).collect();
    Ok(hnf_rows(&comp))
}

/// A free lattice of finite rank, possibly presented as a torsion-free
/// quotient of an ambient `ℤ^n`. Quotient presentations fix a section
/// (complement basis) once, so every element has canonical integer
/// coordinates of length `rank` and equality is plain vector equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    rank: usize,
    presentation: Presentation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Presentation {
    Free,
    Quotient {
        ambient_rank: usize,
        kernel: Vec<IntVec>,
        section: Vec<IntVec>,
        /// Inverse of the basis [kernel; section] stacked as rows; used to
        /// extract coordinates and to lift dual functionals.
        basis_inv: IntMat,
    },
}

impl Lattice {
    pub fn standard(rank: usize) -> Self {
        Lattice {
            rank,
            presentation: Presentation::Free,
        }
    }

    /// Quotient of `ℤ^ambient_rank` by the span of `kernel_basis`.
    /// Fails with `NotSaturated` if the quotient has torsion.
    pub fn quotient(ambient_rank: usize, kernel: &[IntVec]) -> Result<Self, ExactlatError> {
        let kernel = hnf_rows(kernel);
        let section = lattice_complement(&kernel, ambient_rank)?;
        let mut rows = kernel.clone();
        rows.extend(section.iter().cloned());
        let basis = IntMat::from_rows(&rows);
        let basis_inv = basis
            .inverse_unimodular()
            .expect("kernel + complement is a basis");
        Ok(Lattice {
            rank: ambient_rank - kernel.len(),
            presentation: Presentation::Quotient {
                ambient_rank,
                kernel,
                section,
                basis_inv,
            },
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ambient_rank(&self) -> usize {
        match &self.presentation {
            Presentation::Free => self.rank,
            Presentation::Quotient { ambient_rank, .. } => *ambient_rank,
        }
    }

    pub fn kernel(&self) -> &[IntVec] {
        match &self.presentation {
            Presentation::Free => &[],
            Presentation::Quotient { kernel, .. } => kernel,
        }
    }

    /// Canonical coordinates of the class of an ambient vector.
    pub fn project(&self, v: &[Int]) -> Result<IntVec, ExactlatError> {
        match &self.presentation {
            Presentation::Free => {
                if v.len() != self.rank {
                    return Err(ExactlatError::DimensionMismatch {
                        expected: self.rank,
                        got: v.len(),
                    });
                }
                Ok(v.to_vec())
            }
            Presentation::Quotient {
                ambient_rank,
                kernel,
                basis_inv,
                ..
            } => {
                if v.len() != *ambient_rank {
                    return Err(ExactlatError::DimensionMismatch {
                        expected: *ambient_rank,
                        got: v.len(),
                    });
                }
                // v = y·B with B = [kernel; section]; coordinates are the
                // section part of y, i.e. (vᵀ·B⁻¹) restricted to section slots.
                let y = basis_inv.transpose().mul_vec(v);
                Ok(y[kernel.len()..].to_vec())
            }
        }
    }

    /// Lift of quotient coordinates through the fixed section.
    pub fn lift(&self, coords: &[Int]) -> Result<IntVec, ExactlatError> {
        if coords.len() != self.rank {
            return Err(ExactlatError::DimensionMismatch {
                expected: self.rank,
                got: coords.len(),
            });
        }
        match &self.presentation {
            Presentation::Free => Ok(coords.to_vec()),
            Presentation::Quotient {
                ambient_rank,
                section,
                ..
            } => {
                let mut out = vec![Int::zero(); *ambient_rank];
                for (c, s) in coords.iter().zip(section) {
                    out = add_scaled(&out, c, s);
                }
                Ok(out)
            }
        }
    }

    /// Coordinates of a dual functional. The ambient functional must vanish
    /// on the kernel (for `ℤ^I/ℤ·1` this means coordinate sum zero).
    pub fn dual_coords(&self, functional: &[Int]) -> Result<IntVec, ExactlatError> {
        match &self.presentation {
            Presentation::Free => {
                if functional.len() != self.rank {
                    return Err(ExactlatError::DimensionMismatch {
                        expected: self.rank,
                        got: functional.len(),
                    });
                }
                Ok(functional.to_vec())
            }
            Presentation::Quotient {
                ambient_rank,
                kernel,
                section,
                ..
            } => {
                if functional.len() != *ambient_rank {
                    return Err(ExactlatError::DimensionMismatch {
                        expected: *ambient_rank,
                        got: functional.len(),
                    });
                }
                for k in kernel {
                    if !dot(k, functional).is_zero() {
                        return Err(ExactlatError::IllDefinedMap);
                    }
                }
                Ok(section.iter().map(|s| dot(s, functional)).collect())
            }
        }
    }

    /// Ambient representative of a dual functional given by its coordinates:
    /// the unique functional vanishing on the kernel that pairs with the
    /// section basis as prescribed.
    pub fn dual_lift(&self, coords: &[Int]) -> Result<IntVec, ExactlatError> {
        if coords.len() != self.rank {
            return Err(ExactlatError::DimensionMismatch {
                expected: self.rank,
                got: coords.len(),
            });
        }
        match &self.presentation {
            Presentation::Free => Ok(coords.to_vec()),
            Presentation::Quotient {
                ambient_rank,
                kernel,
                basis_inv,
                ..
            } => {
                // Solve B·a = (0, coords) for a, with B = [kernel; section].
                let mut rhs = vec![Int::zero(); *ambient_rank];
                rhs[kernel.len()..].clone_from_slice(coords);
                Ok(basis_inv.mul_vec(&rhs))
            }
        }
    }
}

/// An integer-linear map between lattices, acting on canonical coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeMap {
    pub source: Lattice,
    pub target: Lattice,
    pub matrix: IntMat,
}

impl LatticeMap {
    pub fn new(source: Lattice, target: Lattice, matrix: IntMat) -> Result<Self, ExactlatError> {
        if matrix.rows != target.rank() || matrix.cols != source.rank() {
            return Err(ExactlatError::DimensionMismatch {
                expected: target.rank() * source.rank(),
                got: matrix.rows * matrix.cols,
            });
        }
        Ok(LatticeMap {
            source,
            target,
            matrix,
        })
    }

    /// Map defined on ambient coordinates; checks that the source kernel
    /// lands in the target kernel, then descends to the sections.
    pub fn from_ambient(
        source: Lattice,
        target: Lattice,
        ambient_matrix: &IntMat,
    ) -> Result<Self, ExactlatError> {
        if ambient_matrix.cols != source.ambient_rank()
            || ambient_matrix.rows != target.ambient_rank()
        {
            return Err(ExactlatError::DimensionMismatch {
                expected: source.ambient_rank(),
                got: ambient_matrix.cols,
            });
        }
        for k in source.kernel() {
            let img = ambient_matrix.mul_vec(k);
            // Well-defined iff the image lies in the target kernel span.
            let mut rows = target.kernel().to_vec();
            let before = hnf_rows(&rows);
            rows.push(img);
            if hnf_rows(&rows) != before {
                return Err(ExactlatError::IllDefinedMap);
            }
        }
        let cols: Vec<IntVec> = (0..source.rank())
            .map(|j| {
                let mut e = vec![Int::zero(); source.rank()];
                e[j] = Int::one();
                let amb = source.lift(&e).expect("rank checked");
                target
                    .project(&ambient_matrix.mul_vec(&amb))
                    .expect("rank checked")
            })
            .collect();
        let mut matrix = IntMat::zeros(target.rank(), source.rank());
        for (j, col) in cols.iter().enumerate() {
            for i in 0..target.rank() {
                matrix[(i, j)] = col[i].clone();
            }
        }
        Ok(LatticeMap {
            source,
            target,
            matrix,
        })
    }

    pub fn apply(&self, v: &[Int]) -> Result<IntVec, ExactlatError> {
        if v.len() != self.source.rank() {
            return Err(ExactlatError::DimensionMismatch {
                expected: self.source.rank(),
                got: v.len(),
            });
        }
        Ok(self.matrix.mul_vec(v))
    }

    pub fn compose(&self, inner: &LatticeMap) -> Result<LatticeMap, ExactlatError> {
        if inner.target != self.source {
            return Err(ExactlatError::IllDefinedMap);
        }
        Ok(LatticeMap {
            source: inner.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.mul(&inner.matrix),
        })
    }

    /// Surjective as a map of lattices, i.e. the cokernel is trivial.
    pub fn is_surjective(&self) -> bool {
        if self.matrix.rows == 0 {
            return true;
        }
        let (s, _, _) = smith_normal_form(&self.matrix);
        (0..self.matrix.rows).all(|i| i < s.cols && s[(i, i)].is_one())
    }
}

/// Basis of the saturation of the kernel of a lattice map.
pub fn saturated_kernel(f: &LatticeMap) -> Vec<IntVec> {
    kernel_basis(&f.matrix)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> IntMat {
        IntMat::from_i64(rows)
    }

    #[test]
    fn hnf_identity_is_fixed() {
        let m = mat(&[&[1, 0], &[0, 1]]);
        let (h, u) = hermite_normal_form(&m);
        assert_eq!(h, m);
        assert_eq!(u, IntMat::identity(2));
    }

    #[test]
    fn hnf_hand_reduction_oracle() {
        // [[2,4],[0,3]]: pivot 2 in col 0; entry 4 above pivot 3 reduces to 1.
        let m = mat(&[&[2, 4], &[0, 3]]);
        let (h, u) = hermite_normal_form(&m);
        assert_eq!(h, mat(&[&[2, 1], &[0, 3]]));
        assert_eq!(u.mul(&m), h);
        assert!(u.det().abs().is_one());
    }

    #[test]
    fn hnf_zero_matrix_fixed() {
        let m = mat(&[&[0, 0]]);
        let (h, _) = hermite_normal_form(&m);
        assert_eq!(h, m);
    }

    #[test]
    fn snf_divisibility_oracle() {
        // diag(2,3) reduces to diag(1,6) by manual row/column operations.
        let m = mat(&[&[2, 0], &[0, 3]]);
        let (s, l, r) = smith_normal_form(&m);
        assert_eq!(s, mat(&[&[1, 0], &[0, 6]]));
        assert_eq!(l.mul(&m).mul(&r), s);
        assert!(l.det().abs().is_one());
        assert!(r.det().abs().is_one());
    }

    #[test]
    fn snf_identity() {
        let m = IntMat::identity(3);
        let (s, _, _) = smith_normal_form(&m);
        assert_eq!(s, m);
    }

    #[test]
    fn snf_row_vector() {
        // Brute-force column ops turn [1,1,1] into [1,0,0].
        let m = mat(&[&[1, 1, 1]]);
        let (s, l, r) = smith_normal_form(&m);
        assert_eq!(s, mat(&[&[1, 0, 0]]));
        assert_eq!(l.mul(&m).mul(&r), s);
    }

    #[test]
    fn primitive_examples() {
        assert_eq!(primitive(&vec_i64(&[4, 6])).unwrap(), vec_i64(&[2, 3]));
        assert_eq!(
            primitive(&vec_i64(&[1, 0, 0])).unwrap(),
            vec_i64(&[1, 0, 0])
        );
        assert_eq!(primitive(&vec_i64(&[-2, -4])).unwrap(), vec_i64(&[-1, -2]));
        assert_eq!(primitive(&vec_i64(&[0, 0])), Err(ExactlatError::ZeroVector));
    }

    #[test]
    fn kernel_of_sum_map() {
        // (a,b,c) ↦ a+b+c: kernel is the rank-2 sum-zero sublattice.
        let m = mat(&[&[1, 1, 1]]);
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(dot(v, &vec_i64(&[1, 1, 1])).is_zero());
        }
    }

    #[test]
    fn kernel_injective_and_zero() {
        assert!(kernel_basis(&IntMat::identity(2)).is_empty());
        let z = IntMat::zeros(2, 2);
        let k = kernel_basis(&z);
        assert_eq!(hnf_rows(&k), IntMat::identity(2).to_rows());
    }

    #[test]
    fn complement_of_diagonal_vector() {
        let sub = vec![vec_i64(&[1, 1])];
        let comp = lattice_complement(&sub, 2).unwrap();
        assert_eq!(comp.len(), 1);
        let mut rows = sub.clone();
        rows.extend(comp);
        assert!(IntMat::from_rows(&rows).det().abs().is_one());
    }

    #[test]
    fn complement_edge_cases() {
        let full: Vec<IntVec> = IntMat::identity(2).to_rows();
        assert!(lattice_complement(&full, 2).unwrap().is_empty());
        let torsion = vec![vec_i64(&[2, 0])];
        assert_eq!(
            lattice_complement(&torsion, 2),
            Err(ExactlatError::NotSaturated)
        );
    }

    #[test]
    fn quotient_lattice_coordinates() {
        // ℤ³/ℤ·1, the ambient lattice of the matroid fans.
        let lat = Lattice::quotient(3, &[vec_i64(&[1, 1, 1])]).unwrap();
        assert_eq!(lat.rank(), 2);
        let e0 = lat.project(&vec_i64(&[1, 0, 0])).unwrap();
        let e1 = lat.project(&vec_i64(&[0, 1, 0])).unwrap();
        let e2 = lat.project(&vec_i64(&[0, 0, 1])).unwrap();
        // The three classes sum to zero and pairwise differ.
        assert!(is_zero_vec(&add_vec(&add_vec(&e0, &e1), &e2)));
        assert_ne!(e0, e1);
        // Projection kills the kernel.
        assert!(is_zero_vec(&lat.project(&vec_i64(&[5, 5, 5])).unwrap()));
        // project ∘ lift is the identity on coordinates.
        assert_eq!(lat.project(&lat.lift(&e0).unwrap()).unwrap(), e0);
    }

    #[test]
    fn dual_coords_pair_with_projection() {
        let lat = Lattice::quotient(3, &[vec_i64(&[1, 1, 1])]).unwrap();
        // ω = (1,-1,0) is a functional on the quotient.
        let w = vec_i64(&[1, -1, 0]);
        let wc = lat.dual_coords(&w).unwrap();
        for amb in [
            vec_i64(&[1, 0, 0]),
            vec_i64(&[0, 1, 0]),
            vec_i64(&[2, -3, 1]),
        ] {
            let vc = lat.project(&amb).unwrap();
            assert_eq!(dot(&wc, &vc), dot(&w, &amb));
        }
        // dual_lift inverts dual_coords.
        let back = lat.dual_lift(&wc).unwrap();
        assert_eq!(lat.dual_coords(&back).unwrap(), wc);
        assert!(dot(&back, &vec_i64(&[1, 1, 1])).is_zero());
    }

    #[test]
    fn saturated_kernel_of_lattice_map() {
        let src = Lattice::standard(3);
        let tgt = Lattice::standard(1);
        let f = LatticeMap::new(src, tgt, mat(&[&[1, 1, 1]])).unwrap();
        let k = saturated_kernel(&f);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(f.apply(v).unwrap()[0].is_zero());
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn small_matrix() -> impl Strategy<Value = IntMat> {
            (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| {
                proptest::collection::vec(-9i64..=9, r * c).prop_map(move |data| {
                    let rows: Vec<IntVec> = data
                        .chunks(c)
                        .map(|chunk| chunk.iter().map(|&x| Int::from(x)).collect())
                        .collect();
                    IntMat::from_rows(&rows)
                })
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn hnf_reconstructs_and_is_unimodular(m in small_matrix()) {
                let (h, u) = hermite_normal_form(&m);
                prop_assert_eq!(u.mul(&m), h);
                prop_assert!(u.det().abs().is_one());
            }

            #[test]
            fn snf_reconstructs_with_divisibility(m in small_matrix()) {
                let (s, l, r) = smith_normal_form(&m);
                prop_assert_eq!(l.mul(&m).mul(&r), s.clone());
                prop_assert!(l.det().abs().is_one());
                prop_assert!(r.det().abs().is_one());
                let n = m.rows.min(m.cols);
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            prop_assert!(s[(i, j)].is_zero());
                        }
                    }
                    prop_assert!(!s[(i, i)].is_negative());
                    if i + 1 < n && !s[(i + 1, i + 1)].is_zero() {
                        prop_assert!(!s[(i, i)].is_zero());
                        prop_assert!((&s[(i + 1, i + 1)] % &s[(i, i)]).is_zero());
                    }
                }
            }

            #[test]
            fn snf_diagonal_product_is_minor_gcd(m in small_matrix()) {
                // Product of the nonzero invariant factors = ±gcd of the
                // maximal (rank-sized) minors.
                let (s, _, _) = smith_normal_form(&m);
                let rank = m.rank();
                prop_assume!(rank > 0);
                let mut product = Int::one();
                for i in 0..rank {
                    product *= &s[(i, i)];
                }
                let mut gcd = Int::zero();
                for rows in subsets_of_size(m.rows, rank) {
                    for cols in subsets_of_size(m.cols, rank) {
                        let sub: Vec<IntVec> = rows
                            .iter()
                            .map(|&i| cols.iter().map(|&j| m[(i, j)].clone()).collect())
                            .collect();
                        gcd = gcd.gcd(&IntMat::from_rows(&sub).det());
                    }
                }
                prop_assert_eq!(product, gcd);
            }

            #[test]
            fn primitive_is_idempotent(v in proptest::collection::vec(-20i64..=20, 1..=5)) {
                let v = vec_i64(&v);
                prop_assume!(!is_zero_vec(&v));
                let p = primitive(&v).unwrap();
                prop_assert_eq!(primitive(&p).unwrap(), p.clone());
                prop_assert!(gcd_vec(&p).is_one());
            }

            #[test]
            fn complement_completes_to_unimodular_basis(m in small_matrix()) {
                // Kernels are saturated, so they always admit complements.
                let kernel = kernel_basis(&m);
                let n = m.cols;
                let comp = lattice_complement(&kernel, n).unwrap();
                let mut rows = kernel.clone();
                rows.extend(comp);
                prop_assert_eq!(rows.len(), n);
                prop_assert!(IntMat::from_rows(&rows).det().abs().is_one());
            }
        }

        fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
            let mut out = Vec::new();
            let mut current = Vec::new();
            fn rec(
                n: usize,
                k: usize,
                start: usize,
                current: &mut Vec<usize>,
                out: &mut Vec<Vec<usize>>,
            ) {
                if current.len() == k {
                    out.push(current.clone());
                    return;
                }
                for i in start..n {
                    current.push(i);
                    rec(n, k, i + 1, current, out);
                    current.pop();
                }
            }
            rec(n, k, 0, &mut current, &mut out);
            out
        }
    }

    #[test]
    fn surjectivity_detection() {
        let f =
            LatticeMap::new(Lattice::standard(2), Lattice::standard(1), mat(&[&[1, 0]])).unwrap();
        assert!(f.is_surjective());
        let g = LatticeMap::new(Lattice::standard(1), Lattice::standard(1), mat(&[&[2]])).unwrap();
        assert!(!g.is_surjective());
    }
}
