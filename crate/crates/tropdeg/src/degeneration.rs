//! Degeneration fans Σ_{l,+}: the zero/spe/bdd classification of their
//! cones, the three model-fan hypotheses (generically unimodular,
//! specifically reduced, compactly arranged), semistable preparation by
//! scaling, and slice Euler characteristics.

use crate::cone::Cone;
use crate::exactlat::{Int, IntVec};
use crate::fan::{
    common_refinement, line_fan, product_fan, psi_scale, unimodularize, Fan, FanError,
};
use crate::normalfan::{refined_normal_fan, NormalFanError, PointConfiguration};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DegenError {
    #[error("fan is not strongly convex; offending lineality vector {0:?}")]
    NotStronglyConvex(IntVec),
    #[error("cone is not a member of the degeneration fan")]
    UnknownCone,
    #[error("configuration rank {config} does not match base fan rank {fan}")]
    RankMismatch { config: usize, fan: usize },
    #[error("prepared fan fails the {0} hypothesis")]
    PropertyFailed(&'static str),
    #[error(transparent)]
    Cone(#[from] crate::cone::ConeError),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    NormalFan(#[from] NormalFanError),
}

/// Per-cone classification against the distinguished last coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConeFlags {
    /// σ ⊂ N_ℝ × {0}
    pub zero: bool,
    /// σ meets height one, i.e. not in the zero fiber
    pub spe: bool,
    /// spe with bounded height-one slice
    pub bdd: bool,
}

/// A fan in `N ⊕ ℤ` with the last coordinate distinguished as the
/// t-direction, supported in the nonnegative halfspace, together with the
/// weighted configuration it came from and the per-cone flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegenerationFan {
    fan: Fan,
    flags: Vec<ConeFlags>,
    config: PointConfiguration,
}

fn last_coord(v: &[Int]) -> &Int {
    v.last()
        .expect("vectors in a degeneration fan are nonempty")
}

/// Zero/spe/bdd flags of a single cone against the last coordinate.
pub fn classify_cone(c: &Cone) -> ConeFlags {
    let zero = c.generators().iter().all(|g| last_coord(g).is_zero());
    let spe = !zero;
    // Boundedness by the recession criterion: the slice at height one is
    // bounded iff no ray (and no lineality direction) stays at height zero.
    let bdd =
        spe && c.lineality().is_empty() && c.rays().iter().all(|r| last_coord(r).is_positive());
    ConeFlags { zero, spe, bdd }
}

impl DegenerationFan {
    /// Classifies an existing fan. The fan must be strongly convex and
    /// supported in `N_ℝ × ℝ_{≥0}`.
    pub fn from_fan(fan: Fan, config: PointConfiguration) -> Result<Self, DegenError> {
        if config.m_rank() != fan.ambient_rank() {
            return Err(DegenError::RankMismatch {
                config: config.m_rank(),
                fan: fan.ambient_rank(),
            });
        }
        if let Some(witness) = fan.lineality_witness() {
            return Err(DegenError::NotStronglyConvex(witness));
        }
        for c in fan.cones() {
            for g in c.generators() {
                assert!(
                    !last_coord(&g).is_negative(),
                    "degeneration fan must live in the nonnegative halfspace"
                );
            }
        }
        let flags = fan.cones().iter().map(classify_cone).collect();
        Ok(DegenerationFan { fan, flags, config })
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn config(&self) -> &PointConfiguration {
        &self.config
    }

    pub fn flags(&self) -> &[ConeFlags] {
        &self.flags
    }

    pub fn flags_of(&self, cone: &Cone) -> Result<ConeFlags, DegenError> {
        let idx = self
            .fan
            .cones()
            .iter()
            .position(|c| c == cone)
            .ok_or(DegenError::UnknownCone)?;
        Ok(self.flags[idx])
    }

    pub fn cones_with(&self, pick: impl Fn(&ConeFlags) -> bool) -> Vec<&Cone> {
        self.fan
            .cones()
            .iter()
            .zip(&self.flags)
            .filter(|(_, f)| pick(f))
            .map(|(c, _)| c)
            .collect()
    }

    pub fn bdd_cones(&self) -> Vec<&Cone> {
        self.cones_with(|f| f.bdd)
    }

    pub fn spe_cones(&self) -> Vec<&Cone> {
        self.cones_with(|f| f.spe)
    }

    /// `(−1)^(dim σ − 1)` on bounded-slice cones, 0 otherwise.
    pub fn slice_euler(&self, cone: &Cone) -> Result<i64, DegenError> {
        let flags = self.flags_of(cone)?;
        if !flags.bdd {
            return Ok(0);
        }
        Ok(if cone.dim() % 2 == 1 { 1 } else { -1 })
    }

    /// Every zero-fiber cone unimodular.
    pub fn is_generically_unimodular(&self) -> bool {
        self.fan
            .cones()
            .iter()
            .zip(&self.flags)
            .filter(|(_, f)| f.zero)
            .all(|(c, _)| c.is_unimodular().unwrap_or(false))
    }

    /// Every bounded ray carries a lattice point at height exactly one,
    /// i.e. its primitive generator has last coordinate 1.
    pub fn is_specifically_reduced(&self) -> bool {
        self.fan
            .cones()
            .iter()
            .zip(&self.flags)
            .filter(|(c, f)| f.bdd && c.dim() == 1)
            .all(|(c, _)| last_coord(&c.rays()[0]).is_one())
    }

    /// For every pair of bounded cones jointly contained in some cone of the
    /// fan, some bounded cone contains both. Checked by brute force; the
    /// definition quantifies over triples and no smarter certificate exists.
    pub fn is_compactly_arranged(&self) -> bool {
        let bdd = self.bdd_cones();
        for (i, s1) in bdd.iter().enumerate() {
            for s2 in bdd.iter().skip(i) {
                let jointly_contained = self
                    .fan
                    .cones()
                    .iter()
                    .any(|t| t.contains_cone(s1) && t.contains_cone(s2));
                if !jointly_contained {
                    continue;
                }
                let witnessed = bdd
                    .iter()
                    .any(|s3| s3.contains_cone(s1) && s3.contains_cone(s2));
                if !witnessed {
                    return false;
                }
            }
        }
        true
    }
}

/// Builds Σ_{l,+}: refines Δ × Δ_! by the normal fan of the weighted
/// configuration `(u, l·κ)`, restricts to the nonnegative halfspace, and
/// classifies the cones.
pub fn build_degeneration(
    delta: &Fan,
    u_kappa: &PointConfiguration,
    l: u64,
) -> Result<DegenerationFan, DegenError> {
    if delta.ambient_rank() != u_kappa.m_rank() {
        return Err(DegenError::RankMismatch {
            config: u_kappa.m_rank(),
            fan: delta.ambient_rank(),
        });
    }
    let base = product_fan(delta, &line_fan());
    let weighted = u_kappa.weighted(l);
    let sigma_l = refined_normal_fan(&base, &weighted)?;
    if let Some(witness) = sigma_l.lineality_witness() {
        return Err(DegenError::NotStronglyConvex(witness));
    }
    let kept: Vec<Cone> = sigma_l
        .cones()
        .iter()
        .filter(|c| c.rays().iter().all(|r| !last_coord(r).is_negative()))
        .cloned()
        .collect();
    let fan = restricted_fan(sigma_l.ambient_rank(), kept);
    DegenerationFan::from_fan(fan, weighted)
}

/// A subfan restriction: the kept cones are already face closed because
/// faces of halfspace cones stay in the halfspace.
fn restricted_fan(ambient_rank: usize, cones: Vec<Cone>) -> Fan {
    Fan::close_and_sort(ambient_rank, &cones)
}

/// Semistable preparation: unimodularize Σ_{1,+}, then scale by the least
/// common multiple of the heights of the special rays so that every bounded
/// ray hits height one. Returns the scale factor and the prepared fan,
/// which passes all three model hypotheses.
pub fn prepare_model(
    delta: &Fan,
    u_kappa: &PointConfiguration,
    budget: usize,
) -> Result<(u64, DegenerationFan), DegenError> {
    let df1 = build_degeneration(delta, u_kappa, 1)?;
    let uni = unimodularize(df1.fan(), budget)?;
    let mut m0 = Int::one();
    for c in uni.cones() {
        if c.dim() != 1 {
            continue;
        }
        let h = last_coord(&c.rays()[0]);
        if h.is_positive() {
            m0 = m0.lcm(h);
        }
    }
    let l0 = u64::try_from(&m0).expect("ray heights stay in machine range");
    let scaled = psi_scale(&uni, l0)?;
    let df = DegenerationFan::from_fan(scaled, u_kappa.weighted(l0))?;
    if !df.is_generically_unimodular() {
        return Err(DegenError::PropertyFailed("generically unimodular"));
    }
    if !df.is_specifically_reduced() {
        return Err(DegenError::PropertyFailed("specifically reduced"));
    }
    if !df.is_compactly_arranged() {
        return Err(DegenError::PropertyFailed("compactly arranged"));
    }
    Ok((l0, df))
}

/// Checks the Euler-characteristic bookkeeping of a refinement: for every
/// special cone σ of `coarse`, the signed count of bounded cones of `fine`
/// with relative interior inside σ° equals the slice Euler characteristic
/// of σ. The fine fan must refine the coarse one.
pub fn euler_refinement_check(
    coarse: &DegenerationFan,
    fine: &DegenerationFan,
) -> Result<bool, DegenError> {
    if !crate::fan::is_refinement(fine.fan(), coarse.fan()) {
        return Err(DegenError::Fan(FanError::NotAFan));
    }
    let map = crate::fan::refinement_map_unchecked(fine.fan(), coarse.fan())?;
    for (ci, sigma) in coarse.fan().cones().iter().enumerate() {
        if !coarse.flags()[ci].spe {
            continue;
        }
        let mut signed = 0i64;
        for (ti, tau) in fine.fan().cones().iter().enumerate() {
            if map[ti] == ci && fine.flags()[ti].bdd {
                signed += if tau.dim() % 2 == 1 { 1 } else { -1 };
            }
        }
        if signed != coarse.slice_euler(sigma)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Cone-set equality `{ψ_l(σ) : σ ∈ Σ(Δ×Δ_!, (u,κ))} = Σ(Δ×Δ_!, (u,lκ))`
/// together with flag preservation, as a checkable property.
pub fn psi_conjugation_check(
    delta: &Fan,
    u_kappa: &PointConfiguration,
    l: u64,
) -> Result<bool, DegenError> {
    let df1 = build_degeneration(delta, u_kappa, 1)?;
    let dfl = build_degeneration(delta, u_kappa, l)?;
    let scaled = psi_scale(df1.fan(), l)?;
    if &scaled != dfl.fan() {
        return Ok(false);
    }
    for (c, f) in df1.fan().cones().iter().zip(df1.flags()) {
        let image = c.image(&psi_matrix(c.ambient_rank(), l))?;
        let g = dfl.flags_of(&image)?;
        if *f != g {
            return Ok(false);
        }
    }
    Ok(true)
}

fn psi_matrix(rank: usize, l: u64) -> crate::exactlat::IntMat {
    let mut m = crate::exactlat::IntMat::zeros(rank, rank);
    for i in 0..rank - 1 {
        m[(i, i)] = Int::from(l);
    }
    m[(rank - 1, rank - 1)] = Int::one();
    m
}

/// The common refinement of a degeneration fan with an arbitrary
/// strongly convex refinement of its support, reclassified.
pub fn refine_degeneration(
    df: &DegenerationFan,
    refinement: &Fan,
) -> Result<DegenerationFan, DegenError> {
    let fan = common_refinement(df.fan(), refinement)?;
    DegenerationFan::from_fan(fan, df.config().clone())
}
