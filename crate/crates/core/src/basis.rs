//! Basis of the conserved subspace carrying the protocol dynamics.
//!
//! The Hamiltonians in this crate commute with the total magnetization, so a
//! state prepared as a superposition of the all-up configuration and a single
//! two-spin-flip configuration never leaves the span of
//!
//!   { |0…0⟩ } ∪ { |j,j′⟩ : 1 ≤ j < j′ ≤ N },
//!
//! where |j,j′⟩ has the spins at sites j and j′ flipped down. This module
//! enumerates that subspace (dimension 1 + N(N−1)/2), provides the
//! index ↔ configuration bijection, and classifies each flip pair by which
//! chain ends it touches — the classification that drives the reduced density
//! matrix of the end qubits.

use crate::error::{Error, Result};

/// A two-spin-flip configuration: spins at sites `j < jp` point down,
/// all others up. Site labels are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlipPair {
    j: usize,
    jp: usize,
}

impl FlipPair {
    /// Build a pair, requiring `1 <= j < jp`. The upper bound `jp <= N`
    /// is checked by [`SectorBasis`] methods, which know the chain length.
    pub fn new(j: usize, jp: usize) -> Result<Self> {
        if j < 1 || jp <= j {
            return Err(Error::domain(format!(
                "flip pair requires 1 <= j < jp, got ({j}, {jp})"
            )));
        }
        Ok(FlipPair { j, jp })
    }

    /// Lower site index (1-based).
    pub fn first(&self) -> usize {
        self.j
    }

    /// Higher site index (1-based).
    pub fn second(&self) -> usize {
        self.jp
    }
}

/// One element of the sector basis: the all-up vacuum or a flip pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectorElement {
    Vacuum,
    Pair(FlipPair),
}

/// Which chain ends hold a flipped spin. Tracing out the interior sites
/// maps each class to a definite end-qubit product state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairClass {
    /// (1, N): both end qubits flipped; partial trace yields |11⟩.
    BothEnds,
    /// j = 1, jp < N: only the first end flipped; yields |10⟩.
    FirstEnd,
    /// j > 1, jp = N: only the last end flipped; yields |01⟩.
    LastEnd,
    /// Neither end flipped; yields |00⟩.
    Bulk,
}

/// Indexed basis of the {vacuum ⊕ two-flip} subspace for an even chain.
///
/// Index 0 is the vacuum; flip pairs follow in lexicographic order by
/// (j, jp). Immutable after construction.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    n_sites: usize,
    pairs: Vec<FlipPair>,
}

impl SectorBasis {
    /// Enumerate the basis for a chain of `n_sites` spins.
    ///
    /// `n_sites` must be even and at least 4: the protocol injects the Bell
    /// pair at sites N/2 and N/2+1, which requires a well-defined middle.
    pub fn new(n_sites: usize) -> Result<Self> {
        if n_sites < 4 || n_sites % 2 != 0 {
            return Err(Error::domain(format!(
                "chain length must be even and >= 4, got {n_sites}"
            )));
        }
        let mut pairs = Vec::with_capacity(n_sites * (n_sites - 1) / 2);
        for j in 1..=n_sites {
            for jp in (j + 1)..=n_sites {
                pairs.push(FlipPair { j, jp });
            }
        }
        Ok(SectorBasis { n_sites, pairs })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Total dimension, 1 + N(N−1)/2.
    pub fn dim(&self) -> usize {
        1 + self.pairs.len()
    }

    fn check_pair(&self, p: FlipPair) -> Result<()> {
        if p.jp > self.n_sites {
            return Err(Error::domain(format!(
                "pair ({}, {}) out of range for chain of {} sites",
                p.j, p.jp, self.n_sites
            )));
        }
        Ok(())
    }

    /// Position of `elem` in the total order; the vacuum maps to 0.
    pub fn index_of(&self, elem: SectorElement) -> Result<usize> {
        match elem {
            SectorElement::Vacuum => Ok(0),
            SectorElement::Pair(p) => self.pair_index(p),
        }
    }

    /// Position of a flip pair (always >= 1).
    pub fn pair_index(&self, p: FlipPair) -> Result<usize> {
        self.check_pair(p)?;
        let n = self.n_sites;
        // pairs with lower first element: sum_{a<j} (N - a)
        let before = (p.j - 1) * n - p.j * (p.j - 1) / 2;
        Ok(1 + before + (p.jp - p.j - 1))
    }

    /// Inverse of [`index_of`](Self::index_of).
    pub fn element_at(&self, index: usize) -> Result<SectorElement> {
        if index == 0 {
            return Ok(SectorElement::Vacuum);
        }
        self.pairs
            .get(index - 1)
            .map(|&p| SectorElement::Pair(p))
            .ok_or_else(|| {
                Error::domain(format!(
                    "index {index} out of range for sector of dimension {}",
                    self.dim()
                ))
            })
    }

    /// Classify a pair by which chain ends it occupies.
    pub fn classify(&self, p: FlipPair) -> Result<PairClass> {
        self.check_pair(p)?;
        let n = self.n_sites;
        Ok(match (p.j == 1, p.jp == n) {
            (true, true) => PairClass::BothEnds,
            (true, false) => PairClass::FirstEnd,
            (false, true) => PairClass::LastEnd,
            (false, false) => PairClass::Bulk,
        })
    }

    /// All flip pairs with their basis indices, in index order (starting at 1).
    pub fn pairs(&self) -> impl Iterator<Item = (usize, FlipPair)> + '_ {
        self.pairs.iter().enumerate().map(|(i, &p)| (i + 1, p))
    }

    /// Index of the Bell-injection pair (N/2, N/2+1).
    pub fn injection_index(&self) -> usize {
        let mid = FlipPair {
            j: self.n_sites / 2,
            jp: self.n_sites / 2 + 1,
        };
        self.pair_index(mid).expect("mid pair always in range")
    }

    /// Index of the end-to-end pair (1, N).
    pub fn end_pair_index(&self) -> usize {
        let ends = FlipPair {
            j: 1,
            jp: self.n_sites,
        };
        self.pair_index(ends).expect("end pair always in range")
    }
}
