//! Matroids of hyperplane arrangements and the associated fan Δ(ℬ) on
//! chains of flats, supported on the tropicalization of the arrangement
//! complement.

use crate::cone::Cone;
use crate::exactlat::{Int, Lattice};
use crate::fan::Fan;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArrangementError {
    #[error("form index {0} out of range")]
    BadIndex(usize),
    #[error("forms must be nonzero")]
    ZeroForm,
    #[error("forms must span the full space of linear forms")]
    NotSpanning,
    #[error("chain-to-cone data failed fan validation")]
    NotAFan,
}

/// Linear forms `f_0, …, f_d` in the homogeneous coordinates of ℙⁿ,
/// assumed to span the full `(n+1)`-dimensional space of forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearForms {
    projective_dim: usize,
    forms: Vec<Vec<BigRational>>,
}

/// A flat of the arrangement matroid: a rank-closed index subset.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Flat {
    pub indices: Vec<usize>,
    pub rank: usize,
}

/// A strictly increasing chain of nonzero flats ending at the full flat.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ChainOfFlats {
    pub flats: Vec<Flat>,
}

impl LinearForms {
    pub fn new(
        projective_dim: usize,
        forms: Vec<Vec<BigRational>>,
    ) -> Result<Self, ArrangementError> {
        let width = projective_dim + 1;
        for f in &forms {
            if f.len() != width || f.iter().all(|c| c.is_zero()) {
                return Err(ArrangementError::ZeroForm);
            }
        }
        let lf = LinearForms {
            projective_dim,
            forms,
        };
        if lf.rank_of(&(0..lf.len()).collect::<Vec<_>>())? != width {
            return Err(ArrangementError::NotSpanning);
        }
        Ok(lf)
    }

    pub fn from_i64(projective_dim: usize, forms: &[&[i64]]) -> Result<Self, ArrangementError> {
        let rows = forms
            .iter()
            .map(|f| f.iter().map(|&c| BigRational::from(Int::from(c))).collect())
            .collect();
        Self::new(projective_dim, rows)
    }

    /// Number of forms, `d + 1`.
    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn projective_dim(&self) -> usize {
        self.projective_dim
    }

    pub fn forms(&self) -> &[Vec<BigRational>] {
        &self.forms
    }

    /// The matroid rank function: dimension of the span of the selected forms.
    pub fn rank_of(&self, subset: &[usize]) -> Result<usize, ArrangementError> {
        let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(subset.len());
        for &i in subset {
            if i >= self.forms.len() {
                return Err(ArrangementError::BadIndex(i));
            }
            rows.push(self.forms[i].clone());
        }
        Ok(crate::exactlat::rational_rank(&rows))
    }

    /// Closure test: a subset is flat iff adding any outside form raises the rank.
    pub fn is_flat(&self, subset: &[usize]) -> Result<bool, ArrangementError> {
        let r = self.rank_of(subset)?;
        for i in 0..self.forms.len() {
            if subset.contains(&i) {
                continue;
            }
            let mut with = subset.to_vec();
            with.push(i);
            if self.rank_of(&with)? == r {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// All flats, enumerated by the closure test over every subset.
    /// Exponential in the number of forms by design; the instances in scope
    /// stay at desk scale.
    pub fn flats(&self) -> Vec<Flat> {
        let d1 = self.forms.len();
        let mut out = Vec::new();
        for mask in 0u64..(1 << d1) {
            let subset: Vec<usize> = (0..d1).filter(|&i| mask >> i & 1 == 1).collect();
            if self.is_flat(&subset).expect("indices in range") {
                let rank = self.rank_of(&subset).expect("indices in range");
                out.push(Flat {
                    indices: subset,
                    rank,
                });
            }
        }
        out.sort();
        out
    }

    /// All strictly increasing chains of nonzero flats ending at the full flat.
    pub fn chains(&self) -> Vec<ChainOfFlats> {
        let flats: Vec<Flat> = self
            .flats()
            .into_iter()
            .filter(|f| !f.indices.is_empty())
            .collect();
        let full: Flat = flats
            .iter()
            .find(|f| f.indices.len() == self.forms.len())
            .expect("the full set is always a flat")
            .clone();
        let mut out = Vec::new();
        let mut stack: Vec<Vec<Flat>> = vec![vec![]];
        while let Some(prefix) = stack.pop() {
            let last = prefix.last();
            for f in &flats {
                if *f == full {
                    continue;
                }
                let ok = match last {
                    None => true,
                    Some(l) => strictly_contains(&f.indices, &l.indices),
                };
                if ok {
                    let mut next = prefix.clone();
                    next.push(f.clone());
                    stack.push(next);
                }
            }
            let mut chain = prefix;
            chain.push(full.clone());
            out.push(ChainOfFlats { flats: chain });
        }
        out.sort();
        out
    }

    /// The ambient lattice `N = ℤ^{d+1}/ℤ·1` of the fan Δ(ℬ).
    pub fn fan_lattice(&self) -> Lattice {
        let ones = vec![vec![Int::one(); self.forms.len()]];
        Lattice::quotient(self.forms.len(), &ones).expect("1 is primitive")
    }

    /// Canonical coordinates of `e_V = Σ_{i ∈ V} e_i` in the quotient lattice.
    pub fn flat_vector(&self, lattice: &Lattice, flat: &Flat) -> Vec<Int> {
        let mut ambient = vec![Int::zero(); self.forms.len()];
        for &i in &flat.indices {
            ambient[i] = Int::one();
        }
        lattice.project(&ambient).expect("rank checked")
    }

    /// The cone σ_c spanned by the flat vectors of a chain.
    pub fn chain_cone(&self, lattice: &Lattice, chain: &ChainOfFlats) -> Cone {
        let gens: Vec<Vec<Int>> = chain
            .flats
            .iter()
            .map(|f| self.flat_vector(lattice, f))
            .collect();
        Cone::from_generators(lattice.rank(), &gens).expect("rank checked")
    }

    /// The fan Δ(ℬ) on chains of flats, validated as a strongly convex
    /// simplicial fan with the chain-to-cone map injective.
    pub fn bergman_fan(&self) -> Result<(Lattice, Fan), ArrangementError> {
        let lattice = self.fan_lattice();
        let chains = self.chains();
        let mut cones = Vec::with_capacity(chains.len());
        for c in &chains {
            cones.push(self.chain_cone(&lattice, c));
        }
        // Chain → cone must be injective (the full flat contributes the zero
        // vector, so distinct chains must already differ elsewhere).
        let mut sorted = cones.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != chains.len() {
            return Err(ArrangementError::NotAFan);
        }
        let fan =
            Fan::face_closure(lattice.rank(), &cones).map_err(|_| ArrangementError::NotAFan)?;
        if fan.cones().len() != cones.len() {
            // The chain cones are already face closed.
            return Err(ArrangementError::NotAFan);
        }
        for c in fan.cones() {
            if !c.is_strongly_convex() || !c.is_simplicial().unwrap_or(false) {
                return Err(ArrangementError::NotAFan);
            }
        }
        Ok((lattice, fan))
    }
}

fn strictly_contains(sup: &[usize], sub: &[usize]) -> bool {
    sup.len() > sub.len() && sub.iter().all(|i| sup.contains(i))
}
