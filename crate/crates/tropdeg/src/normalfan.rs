//! Normal fans of weighted point configurations via the lifted-cone
//! construction, the refined fan Σ(Δ,u), and per-cone placement data
//! (ω_σ, S^σ, u^σ).
//!
//! The convention throughout is the minimizer (inner normal) one: the cone
//! attached to a face of the point polytope consists of the linear forms
//! minimized on that face. Getting this wrong silently flips which cones
//! have bounded slices downstream.

use crate::cone::Cone;
use crate::exactlat::{dot, sub_vec, Int, IntMat, IntVec};
use crate::fan::{common_refinement, Fan};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormalFanError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point configurations have different label sets")]
    LabelMismatch,
    #[error("a point configuration needs at least one point")]
    EmptyConfiguration,
    #[error("cone is not contained in a single normal cone of the configuration")]
    NotInSingleNormalCone,
    #[error(transparent)]
    Cone(#[from] crate::cone::ConeError),
    #[error(transparent)]
    Fan(#[from] crate::fan::FanError),
}

/// A finite labeled family of lattice points `u: S → M`, with an optional
/// integer weight `κ: S → ℤ`. The weight is folded in as an extra last
/// coordinate by [`PointConfiguration::weighted`], so weighted and
/// unweighted configurations share one code path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointConfiguration {
    m_rank: usize,
    points: BTreeMap<String, IntVec>,
    kappa: Option<BTreeMap<String, Int>>,
}

impl PointConfiguration {
    pub fn new(m_rank: usize, points: BTreeMap<String, IntVec>) -> Result<Self, NormalFanError> {
        if points.is_empty() {
            return Err(NormalFanError::EmptyConfiguration);
        }
        for v in points.values() {
            if v.len() != m_rank {
                return Err(NormalFanError::DimensionMismatch {
                    expected: m_rank,
                    got: v.len(),
                });
            }
        }
        Ok(PointConfiguration {
            m_rank,
            points,
            kappa: None,
        })
    }

    pub fn with_kappa(
        m_rank: usize,
        points: BTreeMap<String, IntVec>,
        kappa: BTreeMap<String, Int>,
    ) -> Result<Self, NormalFanError> {
        let mut config = Self::new(m_rank, points)?;
        if kappa.keys().ne(config.points.keys()) {
            return Err(NormalFanError::LabelMismatch);
        }
        config.kappa = Some(kappa);
        Ok(config)
    }

    pub fn m_rank(&self) -> usize {
        self.m_rank
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &String> {
        self.points.keys()
    }

    pub fn get(&self, label: &str) -> Option<&IntVec> {
        self.points.get(label)
    }

    pub fn points(&self) -> &BTreeMap<String, IntVec> {
        &self.points
    }

    pub fn kappa(&self) -> Option<&BTreeMap<String, Int>> {
        self.kappa.as_ref()
    }

    /// The configuration `(u, l·κ)` in `M ⊕ ℤ^∨`: each point gains `l·κ(i)`
    /// as a new last coordinate. Unweighted configurations get weight zero.
    pub fn weighted(&self, l: u64) -> PointConfiguration {
        let l = Int::from(l);
        let points = self
            .points
            .iter()
            .map(|(label, v)| {
                let mut w = v.clone();
                let k = self
                    .kappa
                    .as_ref()
                    .and_then(|k| k.get(label))
                    .cloned()
                    .unwrap_or_else(Int::zero);
                w.push(&l * k);
                (label.clone(), w)
            })
            .collect();
        PointConfiguration {
            m_rank: self.m_rank + 1,
            points,
            kappa: None,
        }
    }

    /// Translates every point by `omega`.
    pub fn translate(&self, omega: &[Int]) -> Result<PointConfiguration, NormalFanError> {
        if omega.len() != self.m_rank {
            return Err(NormalFanError::DimensionMismatch {
                expected: self.m_rank,
                got: omega.len(),
            });
        }
        let points = self
            .points
            .iter()
            .map(|(label, v)| (label.clone(), crate::exactlat::add_vec(v, omega)))
            .collect();
        Ok(PointConfiguration {
            m_rank: self.m_rank,
            points,
            kappa: self.kappa.clone(),
        })
    }
}

/// True iff `u − v` is a single constant vector, i.e. the configurations
/// agree up to translation.
pub fn config_equivalent(
    u: &PointConfiguration,
    v: &PointConfiguration,
) -> Result<bool, NormalFanError> {
    if u.points.keys().ne(v.points.keys()) {
        return Err(NormalFanError::LabelMismatch);
    }
    let mut diff: Option<IntVec> = None;
    for (label, uv) in &u.points {
        let d = sub_vec(uv, &v.points[label]);
        match &diff {
            None => diff = Some(d),
            Some(prev) => {
                if *prev != d {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The lifted cone `C(u)` (or `C(τ,u)` when `tau` is given): the dual of the
/// cone spanned by `{(u(i), 1)} ∪ {(ω, 0) : ω ∈ τ^∨}` in one rank higher.
pub fn lifted_cone(u: &PointConfiguration, tau: Option<&Cone>) -> Result<Cone, NormalFanError> {
    let rank = u.m_rank + 1;
    let mut gens: Vec<IntVec> = Vec::with_capacity(u.points.len());
    for v in u.points.values() {
        let mut g = v.clone();
        g.push(Int::one());
        gens.push(g);
    }
    if let Some(tau) = tau {
        if tau.ambient_rank() != u.m_rank {
            return Err(NormalFanError::DimensionMismatch {
                expected: u.m_rank,
                got: tau.ambient_rank(),
            });
        }
        for w in tau.dual().generators() {
            let mut g = w.clone();
            g.push(Int::zero());
            gens.push(g);
        }
    }
    let d = Cone::from_generators(rank, &gens)?;
    Ok(d.dual())
}

fn last_unit(rank: usize) -> IntVec {
    let mut e = vec![Int::zero(); rank];
    e[rank - 1] = Int::one();
    e
}

fn drop_last_projection(rank: usize) -> IntMat {
    let mut m = IntMat::zeros(rank - 1, rank);
    for i in 0..rank - 1 {
        m[(i, i)] = Int::one();
    }
    m
}

/// The normal fan Σ(u): projections of the faces of the lifted cone `C(u)`
/// not containing `(0,1)`. Complete, with the minimizer convention.
pub fn normal_fan(u: &PointConfiguration) -> Result<Fan, NormalFanError> {
    let c = lifted_cone(u, None)?;
    let rank = u.m_rank + 1;
    let e = last_unit(rank);
    let proj = drop_last_projection(rank);
    let mut cones = Vec::new();
    for face in c.faces() {
        if face.contains(&e) {
            continue;
        }
        cones.push(face.image(&proj)?);
    }
    cones.sort();
    cones.dedup();
    Ok(Fan::close_and_sort(u.m_rank, &cones))
}

/// The refined fan Σ(Δ,u), computed two independent ways that must agree:
/// as the common refinement of `delta` with Σ(u), and through faces of the
/// per-cone lifted cones `C(τ,u)` over the maximal cones of `delta`.
pub fn refined_normal_fan(delta: &Fan, u: &PointConfiguration) -> Result<Fan, NormalFanError> {
    if delta.ambient_rank() != u.m_rank {
        return Err(NormalFanError::DimensionMismatch {
            expected: u.m_rank,
            got: delta.ambient_rank(),
        });
    }
    let by_refinement = common_refinement(delta, &normal_fan(u)?)?;

    let rank = u.m_rank + 1;
    let e = last_unit(rank);
    let proj = drop_last_projection(rank);
    let per_tau: Vec<Result<Vec<Cone>, NormalFanError>> =
        crate::par::par_map(delta.maximal_cones(), |tau| {
            let c = lifted_cone(u, Some(tau))?;
            let mut local = Vec::new();
            for face in c.faces() {
                if face.contains(&e) {
                    continue;
                }
                local.push(face.image(&proj)?);
            }
            Ok(local)
        });
    let mut cones = Vec::new();
    for batch in per_tau {
        cones.extend(batch?);
    }
    cones.sort();
    cones.dedup();
    let by_lifting = Fan::close_and_sort(u.m_rank, &cones);
    assert_eq!(
        by_refinement, by_lifting,
        "refined normal fan: common-refinement and lifted-cone routes disagree"
    );
    Ok(by_refinement)
}

/// Per-cone placement data: a translating exponent ω_σ, the labels S^σ that
/// realize the face minimum, and the translated exponents u^σ in σ^⊥ ∩ M.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacePlacement {
    pub cone: Cone,
    pub omega: IntVec,
    /// Sorted labels of S^σ.
    pub support: Vec<String>,
    /// `i ↦ u(i) − ω_σ` on the support.
    pub reduced: BTreeMap<String, IntVec>,
}

/// Locates `sigma` against the configuration's normal fan. `sigma` must lie
/// inside a single cone of Σ(u), which is verified exactly; ties in the
/// minimizing label are broken lexicographically.
pub fn placement(sigma: &Cone, u: &PointConfiguration) -> Result<FacePlacement, NormalFanError> {
    if sigma.ambient_rank() != u.m_rank {
        return Err(NormalFanError::DimensionMismatch {
            expected: u.m_rank,
            got: sigma.ambient_rank(),
        });
    }
    let w = sigma.relative_interior_point();
    let mut best: Option<(&String, Int)> = None;
    for (label, v) in &u.points {
        let val = dot(&w, v);
        best = match best {
            None => Some((label, val)),
            Some((bl, bv)) => {
                if val < bv {
                    Some((label, val))
                } else {
                    Some((bl, bv))
                }
            }
        };
    }
    let (i0, min_val) = best.expect("configuration is nonempty");
    let omega = u.points[i0].clone();

    // ω_σ must satisfy u(i) − ω ∈ σ^∨ for every label; otherwise σ straddles
    // two normal cones and no placement exists.
    let gens = sigma.generators();
    for v in u.points.values() {
        let d = sub_vec(v, &omega);
        for g in &gens {
            if dot(&d, g).is_negative() {
                return Err(NormalFanError::NotInSingleNormalCone);
            }
        }
    }

    let mut support = Vec::new();
    let mut reduced = BTreeMap::new();
    for (label, v) in &u.points {
        let d = sub_vec(v, &omega);
        let in_perp = gens.iter().all(|g| dot(&d, g).is_zero());
        if in_perp {
            support.push(label.clone());
            reduced.insert(label.clone(), d);
        }
    }
    // Cross-check: on a single normal cone the perp set is exactly the
    // argmin set at any relative interior point.
    debug_assert!(support.iter().any(|l| l == i0));
    debug_assert!(u
        .points
        .iter()
        .all(|(l, v)| (dot(&w, v) == min_val) == support.contains(l)));
    Ok(FacePlacement {
        cone: sigma.clone(),
        omega,
        support,
        reduced,
    })
}
