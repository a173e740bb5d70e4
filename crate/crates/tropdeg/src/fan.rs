//! Finite fans: validation, refinement, products, pullbacks, scaling, and
//! subdivision (stellar, simplicial, unimodular).
//!
//! Fans store all cones explicitly, not just maximal ones; everything
//! downstream quantifies over faces. Cones are kept sorted in canonical
//! order so fan equality is list equality.

use crate::cone::{Cone, ConeError};
use crate::exactlat::{dot, primitive, Int, IntMat, IntVec, LatticeMap};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FanError {
    #[error("dimension mismatch: expected ambient rank {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("the given cones do not form a fan")]
    NotAFan,
    #[error("lattice map is not surjective")]
    NotSurjective,
    #[error("subdivision ray lies outside the support of the fan")]
    RayOutsideSupport,
    #[error("unimodular subdivision budget of {0} exceeded")]
    BudgetExceeded(usize),
    #[error("scaling factor must be positive")]
    InvalidScale,
    #[error("operation requires a strongly convex fan")]
    NotStronglyConvex,
    #[error(transparent)]
    Cone(#[from] ConeError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    ambient_rank: usize,
    cones: Vec<Cone>,
}

/// Outcome of checking the two fan axioms; empty report means valid.
#[derive(Debug, Clone, Default)]
pub struct FanValidationReport {
    /// (cone index, missing face)
    pub missing_faces: Vec<(usize, Cone)>,
    /// pairs whose intersection is not a common face
    pub bad_pairs: Vec<(usize, usize)>,
    pub duplicates: Vec<(usize, usize)>,
}

impl FanValidationReport {
    pub fn is_valid(&self) -> bool {
        self.missing_faces.is_empty() && self.bad_pairs.is_empty() && self.duplicates.is_empty()
    }
}

/// Is `face` a face of `of`? Decided through the minimal face of `of`
/// containing a relative interior point of `face`.
pub fn is_face_of(face: &Cone, of: &Cone) -> bool {
    if face.ambient_rank() != of.ambient_rank() || !of.contains_cone(face) {
        return false;
    }
    if face.lineality() != of.lineality() {
        return false;
    }
    let p = face.relative_interior_point();
    let tight: Vec<&IntVec> = of
        .inequalities()
        .iter()
        .filter(|w| dot(w, &p).is_zero())
        .collect();
    let rays: Vec<IntVec> = of
        .rays()
        .iter()
        .filter(|r| tight.iter().all(|w| dot(w, r).is_zero()))
        .cloned()
        .collect();
    rays == face.rays()
}

impl Fan {
    /// Builds the smallest fan containing the given cones; fails if their
    /// pairwise intersections are not common faces.
    pub fn face_closure(ambient_rank: usize, cones: &[Cone]) -> Result<Fan, FanError> {
        for c in cones {
            if c.ambient_rank() != ambient_rank {
                return Err(FanError::DimensionMismatch {
                    expected: ambient_rank,
                    got: c.ambient_rank(),
                });
            }
        }
        let fan = Self::close_and_sort(ambient_rank, cones);
        if !fan.validate().is_valid() {
            return Err(FanError::NotAFan);
        }
        Ok(fan)
    }

    /// Face closure without the pairwise validity check, for constructions
    /// guaranteed to produce fans (refinements, preimages, subdivisions).
    pub(crate) fn close_and_sort(ambient_rank: usize, cones: &[Cone]) -> Fan {
        let mut all: Vec<Cone> = Vec::new();
        for c in cones {
            all.extend(c.faces());
        }
        if all.is_empty() {
            all.push(Cone::zero(ambient_rank));
        }
        all.sort();
        all.dedup();
        Fan {
            ambient_rank,
            cones: all,
        }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn contains(&self, c: &Cone) -> bool {
        self.cones.binary_search(c).is_ok()
    }

    pub fn is_strongly_convex(&self) -> bool {
        self.cones.iter().all(|c| c.is_strongly_convex())
    }

    /// First lineality vector found, as a witness for error reporting.
    pub fn lineality_witness(&self) -> Option<IntVec> {
        self.cones
            .iter()
            .find_map(|c| c.lineality().first().cloned())
    }

    pub fn rays(&self) -> Vec<IntVec> {
        let mut out: Vec<IntVec> = self
            .cones
            .iter()
            .filter(|c| c.dim() == 1 && c.is_strongly_convex())
            .map(|c| c.rays()[0].clone())
            .collect();
        out.sort_by(|a, b| crate::cone::cmp_vec(a, b));
        out.dedup();
        out
    }

    pub fn maximal_cones(&self) -> Vec<&Cone> {
        self.cones
            .iter()
            .filter(|c| {
                !self
                    .cones
                    .iter()
                    .any(|other| *other != **c && other.contains_cone(c))
            })
            .collect()
    }

    /// Checks both fan axioms; the report lists every violation.
    pub fn validate(&self) -> FanValidationReport {
        let mut report = FanValidationReport::default();
        for i in 0..self.cones.len() {
            for j in i + 1..self.cones.len() {
                if self.cones[i] == self.cones[j] {
                    report.duplicates.push((i, j));
                }
            }
        }
        for (i, c) in self.cones.iter().enumerate() {
            for f in c.faces() {
                if !self.contains(&f) {
                    report.missing_faces.push((i, f));
                }
            }
        }
        for i in 0..self.cones.len() {
            for j in i + 1..self.cones.len() {
                let t = match self.cones[i].intersect(&self.cones[j]) {
                    Ok(t) => t,
                    Err(_) => {
                        report.bad_pairs.push((i, j));
                        continue;
                    }
                };
                if !is_face_of(&t, &self.cones[i]) || !is_face_of(&t, &self.cones[j]) {
                    report.bad_pairs.push((i, j));
                }
            }
        }
        report
    }

    pub fn contains_point(&self, v: &[Int]) -> bool {
        self.cones.iter().any(|c| c.contains(v))
    }

    /// The unique cone whose relative interior contains `v`, if `v` is in
    /// the support.
    pub fn cone_through(&self, v: &[Int]) -> Option<&Cone> {
        self.cones
            .iter()
            .filter(|c| c.contains(v))
            .min_by_key(|c| c.dim())
    }
}

/// The convex fan `{{0}, [0,∞), (−∞,0]}` in rank 1.
pub fn line_fan() -> Fan {
    let zero = Cone::zero(1);
    let plus = Cone::from_generators(1, &[vec![Int::one()]]).unwrap();
    let minus = Cone::from_generators(1, &[vec![-Int::one()]]).unwrap();
    Fan::close_and_sort(1, &[zero, plus, minus])
}

/// Product fan: cones are products, so the size is the product of sizes.
pub fn product_fan(a: &Fan, b: &Fan) -> Fan {
    let rank = a.ambient_rank + b.ambient_rank;
    let mut cones = Vec::with_capacity(a.cones.len() * b.cones.len());
    for ca in &a.cones {
        for cb in &b.cones {
            let mut gens: Vec<IntVec> = Vec::new();
            for g in ca.generators() {
                let mut v = g.clone();
                v.extend(std::iter::repeat_with(Int::zero).take(b.ambient_rank));
                gens.push(v);
            }
            for g in cb.generators() {
                let mut v: IntVec = std::iter::repeat_with(Int::zero)
                    .take(a.ambient_rank)
                    .collect();
                v.extend(g.clone());
                gens.push(v);
            }
            cones.push(Cone::from_generators(rank, &gens).expect("rank checked"));
        }
    }
    cones.sort();
    cones.dedup();
    debug_assert_eq!(cones.len(), a.cones.len() * b.cones.len());
    Fan {
        ambient_rank: rank,
        cones,
    }
}

/// All pairwise intersections, face closed. Refines both inputs on the
/// intersection of their supports.
pub fn common_refinement(a: &Fan, b: &Fan) -> Result<Fan, FanError> {
    if a.ambient_rank != b.ambient_rank {
        return Err(FanError::DimensionMismatch {
            expected: a.ambient_rank,
            got: b.ambient_rank,
        });
    }
    // Every pairwise intersection is a face of an intersection of maximal
    // cones, so intersecting maximal pairs and face-closing is enough.
    let mut tops: Vec<Cone> = Vec::new();
    for ca in a.maximal_cones() {
        for cb in b.maximal_cones() {
            tops.push(ca.intersect(cb)?);
        }
    }
    Ok(Fan::close_and_sort(a.ambient_rank, &tops))
}

/// Preimage fan under a surjective lattice map; cones acquire lineality
/// of rank equal to the kernel rank.
pub fn preimage_fan(pi: &LatticeMap, f: &Fan) -> Result<Fan, FanError> {
    if f.ambient_rank != pi.target.rank() {
        return Err(FanError::DimensionMismatch {
            expected: pi.target.rank(),
            got: f.ambient_rank,
        });
    }
    if !pi.is_surjective() {
        return Err(FanError::NotSurjective);
    }
    let mut cones = Vec::with_capacity(f.cones.len());
    for c in &f.cones {
        cones.push(c.preimage(&pi.matrix)?);
    }
    cones.sort();
    cones.dedup();
    debug_assert_eq!(cones.len(), f.cones.len());
    Ok(Fan {
        ambient_rank: pi.source.rank(),
        cones,
    })
}

/// True iff the supports agree and every cone of `fine` lies in a cone of
/// `coarse`. Support equality is decided exactly by wall counting: inside
/// each maximal coarse cone, every interior wall of the covering must be
/// shared by exactly two full-dimensional members.
pub fn is_refinement(fine: &Fan, coarse: &Fan) -> bool {
    if fine.ambient_rank != coarse.ambient_rank {
        return false;
    }
    for t in &fine.cones {
        if !coarse.cones.iter().any(|s| s.contains_cone(t)) {
            return false;
        }
    }
    for sigma in coarse.maximal_cones() {
        let d = sigma.dim();
        let members: Vec<&Cone> = fine
            .cones
            .iter()
            .filter(|t| t.dim() == d && sigma.contains_cone(t))
            .collect();
        if members.is_empty() {
            return false;
        }
        // Walls are identified by their extreme rays: cones of one fan share
        // a single lineality space, so the ray vectors pin the face down.
        let mut wall_counts: HashMap<Vec<IntVec>, usize> = HashMap::new();
        for m in &members {
            for subset in m.face_ray_subsets() {
                if m.face_dim(&subset) + 1 != d {
                    continue;
                }
                let rays: Vec<IntVec> = subset.iter().map(|&i| m.rays()[i].clone()).collect();
                *wall_counts.entry(rays).or_insert(0) += 1;
            }
        }
        let lineality = members[0].lineality();
        for (rays, count) in &wall_counts {
            let on_boundary = sigma.inequalities().iter().any(|nu| {
                rays.iter().all(|g| dot(nu, g).is_zero())
                    && lineality.iter().all(|g| dot(nu, g).is_zero())
            });
            if !on_boundary && *count != 2 {
                return false;
            }
        }
    }
    true
}

/// For each cone of `fine`, the index in `coarse` of the unique cone whose
/// relative interior contains its relative interior.
pub fn refinement_map(fine: &Fan, coarse: &Fan) -> Result<Vec<usize>, FanError> {
    if !is_refinement(fine, coarse) {
        return Err(FanError::NotAFan);
    }
    refinement_map_unchecked(fine, coarse)
}

/// The interior-to-interior map for fans already known to refine.
pub(crate) fn refinement_map_unchecked(fine: &Fan, coarse: &Fan) -> Result<Vec<usize>, FanError> {
    fine.cones
        .iter()
        .map(|t| {
            let p = t.relative_interior_point();
            coarse
                .cones
                .iter()
                .enumerate()
                .filter(|(_, s)| s.contains(&p))
                .min_by_key(|(_, s)| s.dim())
                .map(|(i, _)| i)
                .ok_or(FanError::NotAFan)
        })
        .collect()
}

/// Standard stellar subdivision at a primitive ray inside the support.
pub fn stellar_subdivide(f: &Fan, ray: &[Int]) -> Result<Fan, FanError> {
    if ray.len() != f.ambient_rank {
        return Err(FanError::DimensionMismatch {
            expected: f.ambient_rank,
            got: ray.len(),
        });
    }
    let ray = primitive(ray).map_err(|_| FanError::RayOutsideSupport)?;
    if !f.contains_point(&ray) {
        return Err(FanError::RayOutsideSupport);
    }
    // Cones avoiding the ray survive unchanged, and their faces avoid the
    // ray too, so that part stays face closed on its own. Replacement cones
    // over the faces of the starred cones are new and need closing.
    let mut kept: Vec<Cone> = Vec::new();
    let mut fresh: Vec<Cone> = Vec::new();
    for c in &f.cones {
        if !c.contains(&ray) {
            kept.push(c.clone());
            continue;
        }
        for face in c.faces() {
            if face.contains(&ray) {
                continue;
            }
            let mut gens = face.generators();
            gens.push(ray.clone());
            fresh.push(Cone::from_generators(f.ambient_rank, &gens)?);
        }
    }
    let mut cones = kept;
    for c in Fan::close_and_sort(f.ambient_rank, &fresh).cones {
        cones.push(c);
    }
    cones.sort();
    cones.dedup();
    Ok(Fan {
        ambient_rank: f.ambient_rank,
        cones,
    })
}

/// Scales the non-distinguished block: on generators, `(v, n) ↦ (l·v, n)`
/// with the last coordinate distinguished.
pub fn psi_scale(f: &Fan, l: u64) -> Result<Fan, FanError> {
    if l == 0 {
        return Err(FanError::InvalidScale);
    }
    let n = f.ambient_rank;
    assert!(n >= 1, "psi_scale needs a distinguished last coordinate");
    let mut m = IntMat::zeros(n, n);
    for i in 0..n - 1 {
        m[(i, i)] = Int::from(l);
    }
    m[(n - 1, n - 1)] = Int::one();
    let mut cones = Vec::with_capacity(f.cones.len());
    for c in &f.cones {
        cones.push(c.image(&m)?);
    }
    cones.sort();
    cones.dedup();
    assert_eq!(cones.len(), f.cones.len(), "scaling is bijective on cones");
    Ok(Fan {
        ambient_rank: n,
        cones,
    })
}

/// A refinement all of whose cones are unimodular: first simplicialize by
/// stellar subdivisions at existing extreme rays, then repeatedly subdivide
/// non-unimodular simplicial cones at a primitive lattice point of minimal
/// positive height in the fundamental parallelepiped (ties broken
/// lexicographically). Gives up after `budget` subdivisions.
pub fn unimodularize(f: &Fan, budget: usize) -> Result<Fan, FanError> {
    if !f.is_strongly_convex() {
        return Err(FanError::NotStronglyConvex);
    }
    let mut fan = f.clone();
    let mut steps = 0usize;

    // Phase 1: subdividing at every ray of the fan, in canonical order,
    // leaves a simplicial fan; repeat in case new passes are needed.
    while fan.cones.iter().any(|c| !c.is_simplicial().unwrap_or(true)) {
        let before = fan.clone();
        for ray in fan.clone().rays() {
            steps += 1;
            if steps > budget {
                return Err(FanError::BudgetExceeded(budget));
            }
            fan = stellar_subdivide(&fan, &ray)?;
        }
        if fan == before {
            return Err(FanError::BudgetExceeded(budget));
        }
    }

    // Phase 2: resolve non-unimodular simplicial cones.
    loop {
        let bad = fan
            .cones
            .iter()
            .find(|c| !c.is_unimodular().unwrap_or(true))
            .cloned();
        let Some(cone) = bad else { break };
        let point = subdivision_point(&cone);
        steps += 1;
        if steps > budget {
            return Err(FanError::BudgetExceeded(budget));
        }
        fan = stellar_subdivide(&fan, &point)?;
    }
    Ok(fan)
}

/// Primitive lattice point of minimal positive height in the half-open
/// fundamental parallelepiped of a non-unimodular simplicial cone.
fn subdivision_point(cone: &Cone) -> IntVec {
    use crate::exactlat::{add_scaled, smith_normal_form, IntMat};
    let rays = cone.rays();
    let k = rays.len();
    let n = cone.ambient_rank();
    let v = IntMat::from_rows(rays);
    let (s, _, r) = smith_normal_form(&v);
    let r_inv = r
        .inverse_unimodular()
        .expect("SNF right factor is unimodular");
    // Saturation basis b_i; the ray span has basis s_i·b_i.
    let basis: Vec<IntVec> = (0..k).map(|i| r_inv.row_vec(i)).collect();
    let orders: Vec<Int> = (0..k).map(|i| s[(i, i)].clone()).collect();

    // Rational coordinates of w in the ray basis, via an invertible column
    // submatrix of the ray matrix.
    let cols = independent_columns(&v, k);
    let sub = sub_matrix(&v, &cols);
    let sub_inv = rational_inverse(&sub);

    let mut best: Option<(BigRational, IntVec)> = None;
    let mut counters = vec![Int::zero(); k];
    loop {
        // Advance the mixed-radix counter over ⊕ ℤ/s_i.
        let mut idx = 0;
        loop {
            if idx == k {
                return best
                    .expect("non-unimodular cone has a parallelepiped point")
                    .1;
            }
            counters[idx] += 1;
            if counters[idx] < orders[idx] {
                break;
            }
            counters[idx] = Int::zero();
            idx += 1;
        }
        let mut w = vec![Int::zero(); n];
        for (c, b) in counters.iter().zip(&basis) {
            w = add_scaled(&w, c, b);
        }
        // Reduce into the fundamental parallelepiped: w ← w − Σ ⌊t_i⌋ v_i.
        let t = ray_coordinates(&w, &cols, &sub_inv);
        let mut reduced = w.clone();
        let mut height = BigRational::zero();
        for (ti, ray) in t.iter().zip(rays) {
            let fl = ti.floor().to_integer();
            reduced = add_scaled(&reduced, &(-fl.clone()), ray);
            height += ti - BigRational::from(fl);
        }
        if reduced.iter().all(|x| x.is_zero()) {
            continue;
        }
        let p = primitive(&reduced).expect("nonzero");
        let g = BigRational::new(
            reduced.iter().find(|x| !x.is_zero()).unwrap().clone(),
            p.iter().find(|x| !x.is_zero()).unwrap().clone(),
        )
        .abs();
        let h = height / g;
        let better = match &best {
            None => true,
            Some((bh, bp)) => {
                h < *bh || (h == *bh && crate::cone::cmp_vec(&p, bp) == std::cmp::Ordering::Less)
            }
        };
        if better {
            best = Some((h, p));
        }
    }
}

fn independent_columns(m: &IntMat, target: usize) -> Vec<usize> {
    let t = m.transpose();
    let mut chosen: Vec<usize> = Vec::new();
    let mut current = 0usize;
    for j in 0..m.cols {
        if chosen.len() == target {
            break;
        }
        let mut rows: Vec<IntVec> = chosen.iter().map(|&c| t.row_vec(c)).collect();
        rows.push(t.row_vec(j));
        if IntMat::from_rows(&rows).rank() > current {
            chosen.push(j);
            current += 1;
        }
    }
    chosen
}

fn sub_matrix(m: &IntMat, cols: &[usize]) -> Vec<Vec<BigRational>> {
    (0..m.rows)
        .map(|i| {
            cols.iter()
                .map(|&j| BigRational::from(m[(i, j)].clone()))
                .collect()
        })
        .collect()
}

fn rational_inverse(a: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a.to_vec();
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let p = (col..n)
            .find(|&i| !m[i][col].is_zero())
            .expect("invertible");
        m.swap(col, p);
        inv.swap(col, p);
        let piv = m[col][col].clone();
        for j in 0..n {
            m[col][j] /= piv.clone();
            inv[col][j] /= piv.clone();
        }
        for i in 0..n {
            if i == col || m[i][col].is_zero() {
                continue;
            }
            let f = m[i][col].clone();
            for j in 0..n {
                let mv = m[col][j].clone() * f.clone();
                m[i][j] -= mv;
                let iv = inv[col][j].clone() * f.clone();
                inv[i][j] -= iv;
            }
        }
    }
    inv
}

/// Solves `w = Σ t_i v_i` for the rational coefficients `t`.
fn ray_coordinates(w: &[Int], cols: &[usize], sub_inv: &[Vec<BigRational>]) -> Vec<BigRational> {
    let k = cols.len();
    // t·V = w restricted to the chosen columns: t = w_J · (V_J)⁻¹.
    let wj: Vec<BigRational> = cols
        .iter()
        .map(|&j| BigRational::from(w[j].clone()))
        .collect();
    (0..k)
        .map(|i| {
            let mut acc = BigRational::zero();
            for (l, wl) in wj.iter().enumerate() {
                acc += wl * &sub_inv[l][i];
            }
            acc
        })
        .collect()
}
