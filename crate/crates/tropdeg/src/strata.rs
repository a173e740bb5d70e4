//! Stratum descriptors, the d_Z ≥ 2 membership test via randomized span
//! dimension, and the signed volume ledger over bounded cones.
//!
//! Span dimensions are computed Schwartz–Zippel style: ranks of exact
//! rational evaluation matrices at seeded random sample points. A sampled
//! rank can only undershoot the true span dimension, never overshoot, so
//! two agreeing seeds make the result correct almost surely; disagreement
//! is retried and surfaced through a `probabilistic` flag, never hidden.

use crate::cone::Cone;
use crate::degeneration::{DegenError, DegenerationFan};
use crate::exactlat::{Int, IntMat, IntVec, Rat};
use crate::normalfan::{placement, FacePlacement, NormalFanError, PointConfiguration};
use num_traits::{One, Zero};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StrataError {
    #[error("evaluator failed to produce nondegenerate samples")]
    EvaluationDegenerate,
    #[error("span dimension needs at least one exponent")]
    NoExponents,
    #[error("fine fan does not refine the coarse fan")]
    NotARefinement,
    #[error(transparent)]
    NormalFan(#[from] NormalFanError),
    #[error(transparent)]
    Degeneration(#[from] DegenError),
}

/// An evaluator-specific sample point.
pub type SamplePoint = Vec<Rat>;

/// Abstract capability: evaluate the restricted characters ι*(χ^ω) at
/// deterministic random sample points of Z, with every sampled value
/// well-defined and nonzero. Multiplicativity in ω is part of the contract.
pub trait UnitEvaluator: Sync {
    /// Length of the exponent vectors this evaluator accepts.
    fn exponent_len(&self) -> usize;

    /// Deterministic sample points; the same `(count, seed_mix)` always
    /// yields the same points.
    fn draw_samples(&self, count: usize, seed_mix: u64) -> Result<Vec<SamplePoint>, StrataError>;

    /// Value of the character with the given exponent at a sample point.
    fn evaluate(&self, point: &SamplePoint, exponent: &[Int]) -> Rat;

    /// Whether span dimensions on a stratum are exact for this evaluator:
    /// always for torus strata, and evaluator-specific for product splits.
    fn stratum_exact(&self, product_split: bool) -> bool;
}

/// `base^e` for a (possibly negative) machine-size exponent.
pub fn rat_pow(base: &Rat, e: &Int) -> Rat {
    let exp = i64::try_from(e).expect("exponents stay in machine range");
    let mag = exp.unsigned_abs() as u32;
    let p = Rat::new(base.numer().pow(mag), base.denom().pow(mag));
    if exp < 0 {
        p.recip()
    } else {
        p
    }
}

/// Pure-torus evaluator: Z is the whole torus and characters are Laurent
/// monomials in the sampled coordinates.
#[derive(Debug, Clone)]
pub struct TorusEvaluator {
    rank: usize,
    seed: u64,
}

impl TorusEvaluator {
    pub fn new(rank: usize, seed: u64) -> Self {
        TorusEvaluator { rank, seed }
    }
}

/// Deterministic stream of nonzero integers in a large range.
pub(crate) struct SampleRng(rand_chacha::ChaCha20Rng);

impl SampleRng {
    pub fn new(seed: u64, mix: u64) -> Self {
        use rand::SeedableRng;
        let mut h = Sha256::new();
        h.update(seed.to_le_bytes());
        h.update(mix.to_le_bytes());
        SampleRng(rand_chacha::ChaCha20Rng::from_seed(h.finalize().into()))
    }

    pub fn nonzero_int(&mut self) -> Int {
        use rand::Rng;
        let mag: u32 = self.0.gen_range(1..=1_000_000);
        let sign: bool = self.0.gen();
        if sign {
            Int::from(mag)
        } else {
            -Int::from(mag)
        }
    }
}

impl UnitEvaluator for TorusEvaluator {
    fn exponent_len(&self) -> usize {
        self.rank
    }

    fn draw_samples(&self, count: usize, seed_mix: u64) -> Result<Vec<SamplePoint>, StrataError> {
        let mut rng = SampleRng::new(self.seed, seed_mix);
        Ok((0..count)
            .map(|_| {
                (0..self.rank)
                    .map(|_| Rat::from(rng.nonzero_int()))
                    .collect()
            })
            .collect())
    }

    fn evaluate(&self, point: &SamplePoint, exponent: &[Int]) -> Rat {
        let mut acc = Rat::one();
        for (x, e) in point.iter().zip(exponent) {
            if e.is_zero() {
                continue;
            }
            acc *= rat_pow(x, e);
        }
        acc
    }

    fn stratum_exact(&self, _product_split: bool) -> bool {
        true
    }
}

/// Result of a randomized span-dimension computation. The dimension is a
/// certified lower bound and almost surely exact; `probabilistic` is set
/// when independent seeds disagreed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpanDim {
    pub dim: usize,
    pub probabilistic: bool,
}

const SPAN_MARGIN: usize = 4;
const SPAN_RETRIES: u64 = 6;

/// Rank of the k-linear span of the given characters, evaluated at random
/// sample points of Z.
pub fn span_dimension(
    exponents: &[IntVec],
    ev: &dyn UnitEvaluator,
    seed_mix: u64,
) -> Result<SpanDim, StrataError> {
    if exponents.is_empty() {
        return Err(StrataError::NoExponents);
    }
    let samples = exponents.len() + SPAN_MARGIN;
    let rank_at = |mix: u64| -> Result<usize, StrataError> {
        let points = ev.draw_samples(samples, mix)?;
        let rows: Vec<Vec<Rat>> = points
            .iter()
            .map(|p| exponents.iter().map(|e| ev.evaluate(p, e)).collect())
            .collect();
        Ok(crate::exactlat::rational_rank(&rows))
    };
    let r1 = rank_at(seed_mix.wrapping_add(1))?;
    let r2 = rank_at(seed_mix.wrapping_add(2))?;
    if r1 == r2 {
        return Ok(SpanDim {
            dim: r1,
            probabilistic: false,
        });
    }
    let mut best = r1.max(r2);
    for k in 3..=SPAN_RETRIES {
        best = best.max(rank_at(seed_mix.wrapping_add(k))?);
    }
    Ok(SpanDim {
        dim: best,
        probabilistic: true,
    })
}

/// Deterministic per-cone seed: hash of the canonical form, mixed with the
/// global seed so independent runs agree cone by cone.
pub fn cone_seed(cone: &Cone, global_seed: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(cone.ambient_rank().to_le_bytes());
    for part in [cone.lineality(), cone.rays()] {
        for v in part {
            for x in v {
                h.update(x.to_str_radix(10).as_bytes());
                h.update(b",");
            }
            h.update(b";");
        }
        h.update(b"|");
    }
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is long enough")) ^ global_seed
}

/// The symbolic record of one stratum: where the cone sits against the
/// configuration, the product-split witness when the N-projection
/// vanishes, and the computed span data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratumDescriptor {
    pub cone: Cone,
    pub placement: FacePlacement,
    /// The projected cone σ₀ when the stratum splits as O_{σ₀} × Z.
    pub product_split: Option<Cone>,
    pub span_dim: usize,
    pub exact: bool,
    pub probabilistic: bool,
}

/// Membership of a cone in Σ_Y together with its descriptor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Membership {
    pub member: bool,
    pub descriptor: StratumDescriptor,
}

/// Projection of a cone onto the coordinates after the first `n_rank`;
/// `Some` exactly when the first block of every generator vanishes.
fn product_split(sigma: &Cone, n_rank: usize) -> Option<Cone> {
    let gens = sigma.generators();
    if !gens.iter().all(|g| g[..n_rank].iter().all(|x| x.is_zero())) {
        return None;
    }
    let rest = sigma.ambient_rank() - n_rank;
    let mut proj = IntMat::zeros(rest, sigma.ambient_rank());
    for i in 0..rest {
        proj[(i, n_rank + i)] = Int::one();
    }
    Some(sigma.image(&proj).expect("rank checked"))
}

/// The membership test of Σ_Y: the span of the reduced characters over S^σ
/// must have dimension at least 2. Exactness covers torus strata and
/// product-split strata; other cases are a sufficient criterion only and
/// are flagged as such through `exact`.
pub fn sigma_y_member(
    sigma: &Cone,
    config: &PointConfiguration,
    ev: &dyn UnitEvaluator,
    n_rank: usize,
    global_seed: u64,
) -> Result<Membership, StrataError> {
    let pl = placement(sigma, config)?;
    let mut exponents: Vec<IntVec> = pl.reduced.values().cloned().collect();
    exponents.sort();
    exponents.dedup();
    let sd = span_dimension(&exponents, ev, cone_seed(sigma, global_seed))?;
    let split = product_split(sigma, n_rank);
    let exact = ev.stratum_exact(split.is_some());
    Ok(Membership {
        member: sd.dim >= 2,
        descriptor: StratumDescriptor {
            cone: sigma.clone(),
            placement: pl,
            product_split: split,
            span_dim: sd.dim,
            exact,
            probabilistic: sd.probabilistic,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LedgerEntry {
    /// `(−1)^(dim σ − 1)`
    pub sign: i64,
    pub stratum: StratumDescriptor,
}

/// The signed multiset of stratum descriptors over bounded Σ_Y-cones: the
/// combinatorial shadow of the stable birational volume formula.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VolumeLedger {
    pub entries: Vec<LedgerEntry>,
}

impl VolumeLedger {
    pub fn signed_count(&self) -> i64 {
        self.entries.iter().map(|e| e.sign).sum()
    }
}

/// One signed entry per bounded cone passing the Σ_Y membership test,
/// in canonical cone order.
pub fn volume_ledger(
    df: &DegenerationFan,
    ev: &dyn UnitEvaluator,
    n_rank: usize,
    global_seed: u64,
) -> Result<VolumeLedger, StrataError> {
    let memberships: Vec<Result<Membership, StrataError>> =
        crate::par::par_map(df.bdd_cones(), |sigma| {
            sigma_y_member(sigma, df.config(), ev, n_rank, global_seed)
        });
    let mut entries = Vec::new();
    for m in memberships {
        let m = m?;
        if !m.member {
            continue;
        }
        let sign = if m.descriptor.cone.dim() % 2 == 1 {
            1
        } else {
            -1
        };
        entries.push(LedgerEntry {
            sign,
            stratum: m.descriptor,
        });
    }
    Ok(VolumeLedger { entries })
}

/// Refinement invariance of the ledger: over every coarse bounded Σ_Y cone
/// the signed count of fine bounded cones with interior inside it collapses
/// to the coarse sign, and over special unbounded cones it collapses to 0.
pub fn ledger_refinement_check(
    coarse: &DegenerationFan,
    fine: &DegenerationFan,
    ev: &dyn UnitEvaluator,
    n_rank: usize,
    global_seed: u64,
) -> Result<bool, StrataError> {
    if !crate::fan::is_refinement(fine.fan(), coarse.fan()) {
        return Err(StrataError::NotARefinement);
    }
    let map = crate::fan::refinement_map_unchecked(fine.fan(), coarse.fan())
        .map_err(|_| StrataError::NotARefinement)?;
    for (ci, sigma) in coarse.fan().cones().iter().enumerate() {
        let flags = coarse.flags()[ci];
        if !flags.spe {
            continue;
        }
        let expected = if flags.bdd {
            let m = sigma_y_member(sigma, coarse.config(), ev, n_rank, global_seed)?;
            if !m.member {
                continue;
            }
            coarse.slice_euler(sigma)?
        } else {
            0
        };
        let mut signed = 0i64;
        for (ti, tau) in fine.fan().cones().iter().enumerate() {
            if map[ti] == ci && fine.flags()[ti].bdd {
                signed += if tau.dim() % 2 == 1 { 1 } else { -1 };
            }
        }
        if signed != expected {
            return Ok(false);
        }
    }
    Ok(true)
}
