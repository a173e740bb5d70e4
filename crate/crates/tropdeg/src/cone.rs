//! Rational polyhedral convex cones with dual generator/inequality
//! representations.
//!
//! Conversion between the two representations uses the double description
//! method with exact integer arithmetic. Cones that are not strongly convex
//! are quotiented by their lineality space, processed as pointed cones, and
//! lifted back through a fixed complement section, so every cone has one
//! canonical form: lineality basis in HNF plus primitive extreme rays sorted
//! lexicographically.

use crate::exactlat::{
    add_scaled, dot, gcd_vec, hnf_rows, is_zero_vec, kernel_basis, lattice_complement, primitive,
    smith_normal_form, Int, IntMat, IntVec,
};
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConeError {
    #[error("dimension mismatch: expected ambient rank {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operation requires a strongly convex cone")]
    NotStronglyConvex,
}

/// Fixed-width bitset used for incidence bookkeeping in the double
/// description method and in face enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Bits {
    words: Vec<u64>,
}

impl Bits {
    pub fn new(len: usize) -> Self {
        Bits {
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn and(&self, other: &Bits) -> Bits {
        Bits {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn is_superset(&self, other: &Bits) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & b == *b)
    }
}

pub fn cmp_vec(a: &[Int], b: &[Int]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Extreme rays and lineality of `{x : ⟨row, x⟩ ≥ 0 for all rows}`.
///
/// The lineality basis comes back in HNF; the rays are primitive canonical
/// lifts through the fixed complement of the lineality space, sorted.
pub fn dual_description(rows: &[IntVec], rank: usize) -> (Vec<IntVec>, Vec<IntVec>) {
    let nonzero: Vec<IntVec> = rows.iter().filter(|r| !is_zero_vec(r)).cloned().collect();
    let lineality = if nonzero.is_empty() {
        hnf_rows(&IntMat::identity(rank).to_rows())
    } else {
        kernel_basis(&IntMat::from_rows(&nonzero))
    };
    let quotient_rank = rank - lineality.len();
    if quotient_rank == 0 {
        return (Vec::new(), lineality);
    }
    let section = lattice_complement(&lineality, rank).expect("kernel is saturated");
    let reduced: Vec<IntVec> = nonzero
        .iter()
        .map(|a| section.iter().map(|s| dot(a, s)).collect::<IntVec>())
        .collect();
    let quotient_rays = pointed_dual_description(&reduced, quotient_rank);
    let mut rays: Vec<IntVec> = quotient_rays
        .iter()
        .map(|q| {
            let mut v = vec![Int::zero(); rank];
            for (c, s) in q.iter().zip(&section) {
                v = add_scaled(&v, c, s);
            }
            v
        })
        .collect();
    rays.sort_by(|a, b| cmp_vec(a, b));
    (rays, lineality)
}

/// Double description for a pointed cone: `rows` must have trivial kernel.
fn pointed_dual_description(rows: &[IntVec], rank: usize) -> Vec<IntVec> {
    debug_assert!(rows.iter().all(|r| r.len() == rank));
    let basis_idx = greedy_row_basis(rows, rank);
    debug_assert_eq!(
        basis_idx.len(),
        rank,
        "pointed cone needs full-rank inequality matrix"
    );

    let b = IntMat::from_rows(
        &basis_idx
            .iter()
            .map(|&i| rows[i].clone())
            .collect::<Vec<_>>(),
    );
    let det = b.det();
    let adj = adjugate(&b, &det);
    let mut rays: Vec<IntVec> = (0..rank)
        .map(|j| {
            let col: IntVec = (0..rank).map(|i| adj[(i, j)].clone()).collect();
            let col = if det.is_negative() {
                col.iter().map(|x| -x).collect()
            } else {
                col
            };
            primitive(&col).expect("adjugate column of invertible matrix is nonzero")
        })
        .collect();

    // Process rows in input order; zero sets are tracked over processed rows.
    let mut processed: Vec<usize> = basis_idx.clone();
    let zero_set = |v: &IntVec, processed: &[usize]| {
        let mut z = Bits::new(rows.len());
        for &i in processed {
            if dot(&rows[i], v).is_zero() {
                z.set(i);
            }
        }
        z
    };
    let mut zeros: Vec<Bits> = rays.iter().map(|r| zero_set(r, &processed)).collect();

    for (idx, row) in rows.iter().enumerate() {
        if basis_idx.contains(&idx) {
            continue;
        }
        let vals: Vec<Int> = rays.iter().map(|r| dot(row, r)).collect();
        let has_neg = vals.iter().any(|v| v.is_negative());
        if !has_neg {
            processed.push(idx);
            for (z, v) in zeros.iter_mut().zip(&vals) {
                if v.is_zero() {
                    z.set(idx);
                }
            }
            continue;
        }
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        let mut new_rays: Vec<IntVec> = Vec::new();
        for &p in &pos {
            for &n in &neg {
                if !adjacent(&zeros, p, n) {
                    continue;
                }
                // Positive combination of the pair that lands on the hyperplane.
                let mut w: IntVec = rays[p]
                    .iter()
                    .zip(&rays[n])
                    .map(|(rp, rn)| &vals[p] * rn - &vals[n] * rp)
                    .collect();
                w = primitive(&w).expect("combination of distinct extreme rays is nonzero");
                new_rays.push(w);
            }
        }
        let mut kept: Vec<IntVec> = Vec::new();
        for (i, r) in rays.iter().enumerate() {
            if !vals[i].is_negative() {
                kept.push(r.clone());
            }
        }
        kept.extend(new_rays);
        processed.push(idx);
        rays = kept;
        zeros = rays.iter().map(|r| zero_set(r, &processed)).collect();
    }

    rays.sort_by(|a, b| cmp_vec(a, b));
    rays.dedup();
    rays
}

/// Combinatorial adjacency test: two extreme rays of a pointed cone are
/// adjacent iff no third ray is tight on everything they are both tight on.
fn adjacent(zeros: &[Bits], p: usize, n: usize) -> bool {
    let common = zeros[p].and(&zeros[n]);
    for (i, z) in zeros.iter().enumerate() {
        if i != p && i != n && z.is_superset(&common) {
            return false;
        }
    }
    true
}

fn greedy_row_basis(rows: &[IntVec], rank: usize) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut current = 0usize;
    for i in 0..rows.len() {
        if chosen.len() == rank {
            break;
        }
        let mut candidate: Vec<IntVec> = chosen.iter().map(|&j| rows[j].clone()).collect();
        candidate.push(rows[i].clone());
        let r = IntMat::from_rows(&candidate).rank();
        if r > current {
            chosen.push(i);
            current = r;
        }
    }
    chosen
}

/// Classical adjugate via cofactors: `M·adj(M) = det(M)·I`.
fn adjugate(m: &IntMat, det: &Int) -> IntMat {
    let n = m.rows;
    let mut out = IntMat::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let minor = minor_det(m, j, i);
            out[(i, j)] = if (i + j) % 2 == 0 { minor } else { -minor };
        }
    }
    debug_assert!({
        let mut expected = IntMat::zeros(n, n);
        for i in 0..n {
            expected[(i, i)] = det.clone();
        }
        m.mul(&out) == expected
    });
    out
}

fn minor_det(m: &IntMat, skip_row: usize, skip_col: usize) -> Int {
    let n = m.rows;
    let rows: Vec<IntVec> = (0..n)
        .filter(|&i| i != skip_row)
        .map(|i| {
            (0..n)
                .filter(|&j| j != skip_col)
                .map(|j| m[(i, j)].clone())
                .collect::<IntVec>()
        })
        .collect();
    if rows.is_empty() {
        return Int::one();
    }
    IntMat::from_rows(&rows).det()
}

/// A rational polyhedral convex cone in canonical form.
#[derive(Debug, Clone)]
pub struct Cone {
    ambient_rank: usize,
    /// HNF basis of the largest linear subspace contained in the cone.
    lineality: Vec<IntVec>,
    /// Primitive extreme rays (canonical lifts modulo lineality), sorted.
    rays: Vec<IntVec>,
    /// Irredundant facet normals, canonical modulo `equations`, sorted.
    ineqs: Vec<IntVec>,
    /// HNF basis of the annihilator of the cone's linear span.
    equations: Vec<IntVec>,
}

impl PartialEq for Cone {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_rank == other.ambient_rank
            && self.lineality == other.lineality
            && self.rays == other.rays
    }
}

impl Eq for Cone {}

impl std::hash::Hash for Cone {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ambient_rank.hash(state);
        self.lineality.hash(state);
        self.rays.hash(state);
    }
}

impl PartialOrd for Cone {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cone {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dim()
            .cmp(&other.dim())
            .then_with(|| cmp_vec_list(&self.lineality, &other.lineality))
            .then_with(|| cmp_vec_list(&self.rays, &other.rays))
    }
}

pub(crate) fn cmp_vec_list(a: &[IntVec], b: &[IntVec]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        for (x, y) in a.iter().zip(b) {
            match cmp_vec(x, y) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    })
}

impl Cone {
    /// Canonical cone spanned by the given generators; redundant generators
    /// are dropped by the conversion round trip.
    pub fn from_generators(ambient_rank: usize, gens: &[IntVec]) -> Result<Cone, ConeError> {
        for g in gens {
            if g.len() != ambient_rank {
                return Err(ConeError::DimensionMismatch {
                    expected: ambient_rank,
                    got: g.len(),
                });
            }
        }
        let (ineqs, equations) = dual_description(gens, ambient_rank);
        let cone = Self::from_h_rep_parts(ambient_rank, ineqs, equations);
        debug_assert!(
            gens.iter().all(|g| cone.contains(g)),
            "generator escaped its own cone"
        );
        Ok(cone)
    }

    /// Canonical cone `{x : ⟨w,x⟩ ≥ 0, ⟨e,x⟩ = 0}`.
    pub fn from_inequalities(
        ambient_rank: usize,
        ineqs: &[IntVec],
        equations: &[IntVec],
    ) -> Result<Cone, ConeError> {
        for v in ineqs.iter().chain(equations) {
            if v.len() != ambient_rank {
                return Err(ConeError::DimensionMismatch {
                    expected: ambient_rank,
                    got: v.len(),
                });
            }
        }
        let mut rows = ineqs.to_vec();
        for e in equations {
            rows.push(e.clone());
            rows.push(e.iter().map(|x| -x).collect());
        }
        let (ineqs, equations) = core_h_rep(&rows, ambient_rank);
        Ok(Self::from_h_rep_parts(ambient_rank, ineqs, equations))
    }

    fn from_h_rep_parts(ambient_rank: usize, ineqs: Vec<IntVec>, equations: Vec<IntVec>) -> Cone {
        let mut rows = ineqs.clone();
        for e in &equations {
            rows.push(e.clone());
            rows.push(e.iter().map(|x| -x).collect());
        }
        let (rays, lineality) = dual_description(&rows, ambient_rank);
        Cone {
            ambient_rank,
            lineality,
            rays,
            ineqs,
            equations,
        }
    }

    /// Rebuilds a face from a subset of this cone's extreme rays. The rays of
    /// a face are exactly the rays of the cone lying on it, so only the dual
    /// data needs recomputing.
    fn face_from_ray_subset(&self, ray_idx: &[usize]) -> Cone {
        let rays: Vec<IntVec> = ray_idx.iter().map(|&i| self.rays[i].clone()).collect();
        let mut gens = rays.clone();
        for l in &self.lineality {
            gens.push(l.clone());
            gens.push(l.iter().map(|x| -x).collect());
        }
        let (ineqs, equations) = dual_description(&gens, self.ambient_rank);
        Cone {
            ambient_rank: self.ambient_rank,
            lineality: self.lineality.clone(),
            rays,
            ineqs,
            equations,
        }
    }

    pub fn zero(ambient_rank: usize) -> Cone {
        Cone::from_generators(ambient_rank, &[]).expect("zero cone")
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rays(&self) -> &[IntVec] {
        &self.rays
    }

    pub fn lineality(&self) -> &[IntVec] {
        &self.lineality
    }

    pub fn inequalities(&self) -> &[IntVec] {
        &self.ineqs
    }

    pub fn equations(&self) -> &[IntVec] {
        &self.equations
    }

    /// All generators: rays plus ± lineality basis.
    pub fn generators(&self) -> Vec<IntVec> {
        let mut g = self.rays.clone();
        for l in &self.lineality {
            g.push(l.clone());
            g.push(l.iter().map(|x| -x).collect());
        }
        g
    }

    pub fn dim(&self) -> usize {
        self.ambient_rank - self.equations.len()
    }

    pub fn is_strongly_convex(&self) -> bool {
        self.lineality.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.rays.is_empty() && self.lineality.is_empty()
    }

    /// The dual cone, free of charge: extreme rays and facet normals swap.
    pub fn dual(&self) -> Cone {
        Cone {
            ambient_rank: self.ambient_rank,
            lineality: self.equations.clone(),
            rays: self.ineqs.clone(),
            ineqs: self.rays.clone(),
            equations: self.lineality.clone(),
        }
    }

    pub fn contains(&self, v: &[Int]) -> bool {
        self.ineqs.iter().all(|w| !dot(w, v).is_negative())
            && self.equations.iter().all(|e| dot(e, v).is_zero())
    }

    pub fn contains_cone(&self, other: &Cone) -> bool {
        other.generators().iter().all(|g| self.contains(g))
    }

    pub fn in_relative_interior(&self, v: &[Int]) -> bool {
        self.ineqs.iter().all(|w| dot(w, v).is_positive())
            && self.equations.iter().all(|e| dot(e, v).is_zero())
    }

    /// Sum of the primitive extreme rays: always in the relative interior
    /// (the zero vector for the cone `{0}` and for pure lineality spaces).
    pub fn relative_interior_point(&self) -> IntVec {
        let mut p = vec![Int::zero(); self.ambient_rank];
        for r in &self.rays {
            p = add_scaled(&p, &Int::one(), r);
        }
        p
    }

    pub fn intersect(&self, other: &Cone) -> Result<Cone, ConeError> {
        if self.ambient_rank != other.ambient_rank {
            return Err(ConeError::DimensionMismatch {
                expected: self.ambient_rank,
                got: other.ambient_rank,
            });
        }
        let mut ineqs = self.ineqs.clone();
        ineqs.extend(other.ineqs.iter().cloned());
        let mut eqs = self.equations.clone();
        eqs.extend(other.equations.iter().cloned());
        Cone::from_inequalities(self.ambient_rank, &ineqs, &eqs)
    }

    /// Image under the linear map given by `matrix` (target_rank × ambient).
    pub fn image(&self, matrix: &IntMat) -> Result<Cone, ConeError> {
        if matrix.cols != self.ambient_rank {
            return Err(ConeError::DimensionMismatch {
                expected: self.ambient_rank,
                got: matrix.cols,
            });
        }
        let gens: Vec<IntVec> = self
            .generators()
            .iter()
            .map(|g| matrix.mul_vec(g))
            .collect();
        Cone::from_generators(matrix.rows, &gens)
    }

    /// Preimage under the linear map given by `matrix` (ambient × source_rank).
    pub fn preimage(&self, matrix: &IntMat) -> Result<Cone, ConeError> {
        if matrix.rows != self.ambient_rank {
            return Err(ConeError::DimensionMismatch {
                expected: self.ambient_rank,
                got: matrix.rows,
            });
        }
        let t = matrix.transpose();
        let ineqs: Vec<IntVec> = self.ineqs.iter().map(|w| t.mul_vec(w)).collect();
        let eqs: Vec<IntVec> = self.equations.iter().map(|e| t.mul_vec(e)).collect();
        Cone::from_inequalities(matrix.cols, &ineqs, &eqs)
    }

    /// Ray-index sets of all faces: the combinatorial skeleton of the face
    /// lattice, computed by intersecting facet incidence sets. No dual
    /// conversions happen here.
    pub fn face_ray_subsets(&self) -> Vec<Vec<usize>> {
        let nrays = self.rays.len();
        // Incidence: for each facet, the set of rays it vanishes on.
        let facet_zeros: Vec<Vec<bool>> = self
            .ineqs
            .iter()
            .map(|w| self.rays.iter().map(|r| dot(w, r).is_zero()).collect())
            .collect();
        let full: Vec<usize> = (0..nrays).collect();
        let mut seen = std::collections::HashSet::new();
        let mut queue = vec![full.clone()];
        seen.insert(full);
        let mut subsets: Vec<Vec<usize>> = Vec::new();
        while let Some(s) = queue.pop() {
            subsets.push(s.clone());
            for fz in &facet_zeros {
                let child: Vec<usize> = s.iter().copied().filter(|&i| fz[i]).collect();
                if child.len() < s.len() && seen.insert(child.clone()) {
                    queue.push(child);
                }
            }
        }
        // The minimal face (all facets tight) is reached whenever there is at
        // least one facet; the zero-facet case is the cone itself only.
        if self.ineqs.is_empty() {
            subsets = vec![(0..nrays).collect()];
        } else if !subsets.iter().any(|s| s.is_empty()) && nrays > 0 {
            // Defensive: BFS always reaches it, since every ray misses some facet.
            subsets.push(Vec::new());
        }
        subsets
    }

    /// Dimension of the face spanned by a ray subset, without building it.
    pub fn face_dim(&self, ray_idx: &[usize]) -> usize {
        if ray_idx.is_empty() {
            return self.lineality.len();
        }
        let rows: Vec<IntVec> = ray_idx.iter().map(|&i| self.rays[i].clone()).collect();
        // Canonical ray lifts live in a complement of the lineality space,
        // so dimensions just add.
        self.lineality.len() + IntMat::from_rows(&rows).rank()
    }

    /// All faces, including the minimal face and the cone itself, sorted
    /// canonically. Faces are closures of extreme-ray subsets tight on
    /// facet subsets; only the dual data of each face needs a conversion.
    pub fn faces(&self) -> Vec<Cone> {
        let subsets = self.face_ray_subsets();
        let mut faces: Vec<Cone> = subsets
            .iter()
            .map(|s| self.face_from_ray_subset(s))
            .collect();
        faces.sort();
        faces.dedup();
        faces
    }

    /// A cone is simplicial when its extreme rays are linearly independent.
    pub fn is_simplicial(&self) -> Result<bool, ConeError> {
        if !self.is_strongly_convex() {
            return Err(ConeError::NotStronglyConvex);
        }
        Ok(self.rays.len() == self.dim())
    }

    /// Simplicial with ray matrix extendable to a lattice basis (all Smith
    /// invariant factors 1).
    pub fn is_unimodular(&self) -> Result<bool, ConeError> {
        if !self.is_simplicial()? {
            return Ok(false);
        }
        if self.rays.is_empty() {
            return Ok(true);
        }
        let (s, _, _) = smith_normal_form(&IntMat::from_rows(&self.rays));
        Ok((0..self.rays.len()).all(|i| s[(i, i)].is_one()))
    }

    /// Multiplicity of a simplicial cone: the lattice index of the span of
    /// its rays inside its saturation (1 for unimodular cones).
    pub fn simplicial_index(&self) -> Result<Int, ConeError> {
        if !self.is_simplicial()? {
            return Err(ConeError::NotStronglyConvex);
        }
        if self.rays.is_empty() {
            return Ok(Int::one());
        }
        let (s, _, _) = smith_normal_form(&IntMat::from_rows(&self.rays));
        let mut idx = Int::one();
        for i in 0..self.rays.len() {
            idx *= &s[(i, i)];
        }
        Ok(idx.abs())
    }

    /// Applies an invertible-over-ℝ linear map to the generators and
    /// re-canonicalizes. Used for the scaling maps ψ_l.
    pub fn map_generators(&self, matrix: &IntMat) -> Result<Cone, ConeError> {
        self.image(matrix)
    }
}

fn core_h_rep(rows: &[IntVec], rank: usize) -> (Vec<IntVec>, Vec<IntVec>) {
    let (rays, lineality) = dual_description(rows, rank);
    let mut gens = rays;
    for l in &lineality {
        gens.push(l.clone());
        gens.push(l.iter().map(|x| -x).collect());
    }
    dual_description(&gens, rank)
}

/// Primitive vector helper for callers that know their input is nonzero.
pub fn primitive_or_zero(v: &[Int]) -> IntVec {
    if is_zero_vec(v) {
        v.to_vec()
    } else {
        let g = gcd_vec(v);
        v.iter().map(|x| x / &g).collect()
    }
}
