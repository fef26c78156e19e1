//! Sector-restricted operators of the frustrated J1–J2 chain.
//!
//! The chain couples ferromagnetic nearest-neighbour and antiferromagnetic
//! next-nearest-neighbour Heisenberg exchange with an electric field acting
//! on the z component of the vector chirality:
//!
//!   H0 = −Σ J1·κ₁ᵢ S_i·S_{i+1} − Σ J2·κ₂ᵢ S_i·S_{i+2} + E0·D,
//!   D  = Σ (S_i × S_{i+1})^z = Σ (i/2)(S_i⁺S_{i+1}⁻ − S_i⁻S_{i+1}⁺),
//!
//! with open boundaries, spin-1/2 operators (S = σ/2), energies in units of
//! J1 and ħ = 1. The per-bond factors κ come from a [`BondProfile`], which
//! models lattice impurities that stretch or compress individual bonds.
//! All matrices are assembled directly in the {vacuum ⊕ two-flip} sector:
//! every term either counts z-alignments on a bond or moves a single flipped
//! spin between the two bond sites, so the sector is closed by construction.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::basis::{FlipPair, SectorBasis};
use crate::error::{Error, Result};

/// Multiplicative per-bond overrides for the exchange couplings.
///
/// Keys are the lower site of a bond: `nn[i]` scales the (i, i+1) coupling,
/// `nnn[i]` scales (i, i+2). Unlisted bonds keep factor 1. Factors from
/// overlapping impurity neighbourhoods compose multiplicatively.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BondProfile {
    nn: BTreeMap<usize, f64>,
    nnn: BTreeMap<usize, f64>,
}

impl BondProfile {
    /// The identity profile: every factor 1.
    pub fn identity() -> Self {
        Self::default()
    }

    /// Factor on the nearest-neighbour bond (i, i+1).
    pub fn nn_factor(&self, i: usize) -> f64 {
        self.nn.get(&i).copied().unwrap_or(1.0)
    }

    /// Factor on the next-nearest-neighbour bond (i, i+2).
    pub fn nnn_factor(&self, i: usize) -> f64 {
        self.nnn.get(&i).copied().unwrap_or(1.0)
    }

    /// Multiply the factor on NN bond (i, i+1).
    pub fn scale_nn(&mut self, i: usize, factor: f64) -> Result<()> {
        check_factor(factor)?;
        *self.nn.entry(i).or_insert(1.0) *= factor;
        Ok(())
    }

    /// Multiply the factor on NNN bond (i, i+2).
    pub fn scale_nnn(&mut self, i: usize, factor: f64) -> Result<()> {
        check_factor(factor)?;
        *self.nnn.entry(i).or_insert(1.0) *= factor;
        Ok(())
    }

    /// Compose with another profile, bond by bond.
    pub fn compose(&mut self, other: &BondProfile) -> Result<()> {
        for (&i, &f) in &other.nn {
            self.scale_nn(i, f)?;
        }
        for (&i, &f) in &other.nnn {
            self.scale_nnn(i, f)?;
        }
        Ok(())
    }

    /// True when every stored factor is exactly 1.
    pub fn is_identity(&self) -> bool {
        self.nn.values().chain(self.nnn.values()).all(|&f| f == 1.0)
    }

    fn check_range(&self, n_sites: usize) -> Result<()> {
        for &i in self.nn.keys() {
            if i < 1 || i + 1 > n_sites {
                return Err(Error::domain(format!(
                    "NN bond ({}, {}) outside chain of {} sites",
                    i,
                    i + 1,
                    n_sites
                )));
            }
        }
        for &i in self.nnn.keys() {
            if i < 1 || i + 2 > n_sites {
                return Err(Error::domain(format!(
                    "NNN bond ({}, {}) outside chain of {} sites",
                    i,
                    i + 2,
                    n_sites
                )));
            }
        }
        Ok(())
    }
}

fn check_factor(factor: f64) -> Result<()> {
    if !(factor > 0.0) || !factor.is_finite() {
        return Err(Error::domain(format!(
            "bond factors must be strictly positive and finite, got {factor}"
        )));
    }
    Ok(())
}

/// Couplings of the multiferroic chain. `e0` is the product of the
/// magnetoelectric constant and the static field strength.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    pub n_sites: usize,
    pub j1: f64,
    pub j2: f64,
    pub e0: f64,
    pub bonds: BondProfile,
}

impl ChainSpec {
    /// The base system: J1 = 1, J2 = −1 (the LiCu2O2 regime), E0 = 0.01,
    /// clean bonds.
    pub fn new(n_sites: usize) -> Self {
        ChainSpec {
            n_sites,
            j1: 1.0,
            j2: -1.0,
            e0: 0.01,
            bonds: BondProfile::identity(),
        }
    }

    pub fn with_couplings(mut self, j1: f64, j2: f64, e0: f64) -> Self {
        self.j1 = j1;
        self.j2 = j2;
        self.e0 = e0;
        self
    }

    pub fn with_static_field(mut self, e0: f64) -> Self {
        self.e0 = e0;
        self
    }

    /// Embed an impurity, composing its bond factors into the profile.
    pub fn with_impurity(mut self, imp: &ImpuritySpec) -> Result<Self> {
        let profile = impurity_profile(imp, self.n_sites)?;
        self.bonds.compose(&profile)?;
        Ok(self)
    }
}

/// The two lattice-defect models. Both stretch the NNN bond behind the
/// impurity site and compress the one in front; they differ in whether the
/// NN bond at the site stretches (type I) or compresses (type II).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ImpurityKind {
    TypeI,
    TypeII,
}

/// An impurity at `site` = k with strength κ >= 1 (κ = 1 is no impurity).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpuritySpec {
    pub site: usize,
    pub kind: ImpurityKind,
    pub strength: f64,
}

/// Bond factors induced by a single impurity at site k:
///
/// * type I:  NN(k, k+1) ×κ, NNN(k−1, k+1) ×κ, NNN(k, k+2) ×1/κ
/// * type II: NN(k, k+1) ×1/κ, NNN(k−1, k+1) ×κ, NNN(k, k+2) ×1/κ
///
/// Each factor scales the magnitude of its own clean coupling, preserving
/// sign. Requires 2 <= k <= N−2 so that all three affected bonds exist.
pub fn impurity_profile(spec: &ImpuritySpec, n_sites: usize) -> Result<BondProfile> {
    let k = spec.site;
    let kappa = spec.strength;
    if !(kappa >= 1.0) || !kappa.is_finite() {
        return Err(Error::domain(format!(
            "impurity strength must be >= 1, got {kappa}"
        )));
    }
    if k < 2 || k + 2 > n_sites {
        return Err(Error::domain(format!(
            "impurity site {k} must satisfy 2 <= k <= N-2 so bonds (k-1,k+1) and (k,k+2) \
             exist in a chain of {n_sites} sites"
        )));
    }
    let mut p = BondProfile::identity();
    match spec.kind {
        ImpurityKind::TypeI => p.scale_nn(k, kappa)?,
        ImpurityKind::TypeII => p.scale_nn(k, 1.0 / kappa)?,
    }
    p.scale_nnn(k - 1, kappa)?;
    p.scale_nnn(k, 1.0 / kappa)?;
    Ok(p)
}

/// Nearest-neighbour XXZ chain with open boundaries:
/// H = Jx Σ (SˣSˣ + SʸSʸ) + Jz Σ SᶻSᶻ. `jz = 0` is the XX model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XxzSpec {
    pub n_sites: usize,
    pub jx: f64,
    pub jz: f64,
}

/// Two-flip configuration helper for sector assembly.
#[derive(Clone, Copy)]
struct Config {
    j: usize,
    jp: usize,
}

impl Config {
    fn contains(&self, site: usize) -> bool {
        site == self.j || site == self.jp
    }

    /// z eigenvalue (±1/2) of the spin at `site`.
    fn z(&self, site: usize) -> f64 {
        if self.contains(site) {
            -0.5
        } else {
            0.5
        }
    }

    /// Configuration with the flip at `from` moved to `to`.
    fn moved(&self, from: usize, to: usize) -> FlipPair {
        let other = if self.j == from { self.jp } else { self.j };
        let (a, b) = if to < other { (to, other) } else { (other, to) };
        FlipPair::new(a, b).expect("moved flips stay distinct")
    }
}

/// Accumulates bond terms into a sector matrix, column by column.
struct SectorBuilder<'b> {
    basis: &'b SectorBasis,
    matrix: DMatrix<Complex64>,
}

impl<'b> SectorBuilder<'b> {
    fn new(basis: &'b SectorBasis) -> Self {
        let d = basis.dim();
        SectorBuilder {
            basis,
            matrix: DMatrix::zeros(d, d),
        }
    }

    /// Add `coupling · S_a·S_b` over the whole sector.
    ///
    /// On the vacuum column only the diagonal z·z term survives (+1/4 per
    /// bond); on a flip-pair column the transverse part moves a single flip
    /// across the bond when exactly one bond site is flipped.
    fn add_heisenberg_bond(&mut self, a: usize, b: usize, coupling: f64) {
        self.matrix[(0, 0)] += Complex64::new(coupling * 0.25, 0.0);
        for (col, pair) in self.basis.pairs() {
            let c = Config {
                j: pair.first(),
                jp: pair.second(),
            };
            self.matrix[(col, col)] += Complex64::new(coupling * c.z(a) * c.z(b), 0.0);
            for (from, to) in [(a, b), (b, a)] {
                if c.contains(from) && !c.contains(to) {
                    let dest = self
                        .basis
                        .pair_index(c.moved(from, to))
                        .expect("hop target stays in range");
                    self.matrix[(dest, col)] += Complex64::new(coupling * 0.5, 0.0);
                }
            }
        }
    }

    /// Add `(S_a × S_{a+1})^z = (i/2)(S_a⁺S_{a+1}⁻ − S_a⁻S_{a+1}⁺)`,
    /// scaled by `strength`. Annihilates the vacuum; moves a flip rightward
    /// with amplitude +i/2 and leftward with −i/2.
    fn add_chirality_bond(&mut self, a: usize, strength: f64) {
        let half_i = Complex64::new(0.0, 0.5 * strength);
        for (col, pair) in self.basis.pairs() {
            let c = Config {
                j: pair.first(),
                jp: pair.second(),
            };
            if c.contains(a) && !c.contains(a + 1) {
                let dest = self
                    .basis
                    .pair_index(c.moved(a, a + 1))
                    .expect("hop target stays in range");
                self.matrix[(dest, col)] += half_i;
            }
            if c.contains(a + 1) && !c.contains(a) {
                let dest = self
                    .basis
                    .pair_index(c.moved(a + 1, a))
                    .expect("hop target stays in range");
                self.matrix[(dest, col)] -= half_i;
            }
        }
    }
}

fn check_sites(spec_sites: usize, basis: &SectorBasis) -> Result<()> {
    if spec_sites != basis.n_sites() {
        return Err(Error::domain(format!(
            "spec is for {} sites but basis covers {}",
            spec_sites,
            basis.n_sites()
        )));
    }
    Ok(())
}

/// Sector matrix of the static Hamiltonian H0, including the E0·D field
/// term. The vacuum decouples: row and column 0 are zero off the diagonal,
/// and the (0,0) entry is the vacuum energy E⁰.
pub fn build_h0_sector(spec: &ChainSpec, basis: &SectorBasis) -> Result<DMatrix<Complex64>> {
    check_sites(spec.n_sites, basis)?;
    spec.bonds.check_range(spec.n_sites)?;
    let n = spec.n_sites;
    let mut builder = SectorBuilder::new(basis);
    for i in 1..n {
        builder.add_heisenberg_bond(i, i + 1, -spec.j1 * spec.bonds.nn_factor(i));
    }
    for i in 1..(n - 1) {
        builder.add_heisenberg_bond(i, i + 2, -spec.j2 * spec.bonds.nnn_factor(i));
    }
    if spec.e0 != 0.0 {
        for i in 1..n {
            builder.add_chirality_bond(i, spec.e0);
        }
    }
    Ok(builder.matrix)
}

/// Sector matrix of the chirality operator D = Σ (S_i × S_{i+1})^z.
///
/// The magnetoelectric coupling is taken uniform along the chain, so
/// impurity bond factors do not enter here.
pub fn build_chirality_sector(spec: &ChainSpec, basis: &SectorBasis) -> Result<DMatrix<Complex64>> {
    check_sites(spec.n_sites, basis)?;
    let mut builder = SectorBuilder::new(basis);
    for i in 1..spec.n_sites {
        builder.add_chirality_bond(i, 1.0);
    }
    Ok(builder.matrix)
}

/// Sector matrix of the XXZ chain.
pub fn build_xxz_sector(spec: &XxzSpec, basis: &SectorBasis) -> Result<DMatrix<Complex64>> {
    check_sites(spec.n_sites, basis)?;
    let d = basis.dim();
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    let n = spec.n_sites;
    for i in 1..n {
        // Jz SᶻSᶻ: diagonal in the flip basis
        m[(0, 0)] += Complex64::new(spec.jz * 0.25, 0.0);
        for (col, pair) in basis.pairs() {
            let c = Config {
                j: pair.first(),
                jp: pair.second(),
            };
            m[(col, col)] += Complex64::new(spec.jz * c.z(i) * c.z(i + 1), 0.0);
            // Jx (SˣSˣ + SʸSʸ) = (Jx/2)(S⁺S⁻ + S⁻S⁺): moves one flip
            for (from, to) in [(i, i + 1), (i + 1, i)] {
                if c.contains(from) && !c.contains(to) {
                    let dest = basis
                        .pair_index(c.moved(from, to))
                        .expect("hop target stays in range");
                    m[(dest, col)] += Complex64::new(spec.jx * 0.5, 0.0);
                }
            }
        }
    }
    Ok(m)
}

/// Analytic vacuum energy of H0: −J1 Σ κ₁ᵢ/4 − J2 Σ κ₂ᵢ/4.
pub fn vacuum_energy(spec: &ChainSpec) -> f64 {
    let n = spec.n_sites;
    let nn: f64 = (1..n).map(|i| spec.bonds.nn_factor(i)).sum();
    let nnn: f64 = (1..(n - 1)).map(|i| spec.bonds.nnn_factor(i)).sum();
    -spec.j1 * nn / 4.0 - spec.j2 * nnn / 4.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
        (m - m.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn vacuum_diagonal_matches_analytic_form() {
        // apply the analytic form E0 = -J1(N-1)/4 - J2(N-2)/4 for clean bonds
        let basis = SectorBasis::new(4).unwrap();
        let spec = ChainSpec::new(4).with_couplings(1.0, -1.0, 0.0);
        let h = build_h0_sector(&spec, &basis).unwrap();
        assert_abs_diff_eq!(h[(0, 0)].re, -0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(h[(0, 0)].re, vacuum_energy(&spec), epsilon = 1e-15);
        assert_eq!(h[(0, 0)].im, 0.0);
    }

    #[test]
    fn vacuum_block_decouples_exactly() {
        let basis = SectorBasis::new(8).unwrap();
        let spec = ChainSpec::new(8);
        let h = build_h0_sector(&spec, &basis).unwrap();
        for i in 1..basis.dim() {
            assert_eq!(h[(0, i)], Complex64::new(0.0, 0.0));
            assert_eq!(h[(i, 0)], Complex64::new(0.0, 0.0));
        }
        let d = build_chirality_sector(&spec, &basis).unwrap();
        for i in 0..basis.dim() {
            assert_eq!(d[(0, i)], Complex64::new(0.0, 0.0));
            assert_eq!(d[(i, 0)], Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn builders_are_hermitian() {
        let basis = SectorBasis::new(10).unwrap();
        let spec = ChainSpec::new(10)
            .with_impurity(&ImpuritySpec {
                site: 4,
                kind: ImpurityKind::TypeI,
                strength: 1.7,
            })
            .unwrap();
        let h = build_h0_sector(&spec, &basis).unwrap();
        assert!(hermiticity_defect(&h) < 1e-13);
        let d = build_chirality_sector(&spec, &basis).unwrap();
        assert!(hermiticity_defect(&d) < 1e-13);
        let xxz = XxzSpec {
            n_sites: 10,
            jx: 1.0,
            jz: 0.5,
        };
        assert!(hermiticity_defect(&build_xxz_sector(&xxz, &basis).unwrap()) < 1e-13);
    }

    #[test]
    fn chirality_moves_flip_rightward_with_positive_imaginary_amplitude() {
        // two-site building block embedded in a pair state: D takes the flip
        // at site i to site i+1 with amplitude +i/2 (partner flip far away)
        let basis = SectorBasis::new(8).unwrap();
        let spec = ChainSpec::new(8);
        let d = build_chirality_sector(&spec, &basis).unwrap();
        let src = basis.pair_index(FlipPair::new(3, 8).unwrap()).unwrap();
        let dst = basis.pair_index(FlipPair::new(4, 8).unwrap()).unwrap();
        assert_eq!(d[(dst, src)], Complex64::new(0.0, 0.5));
        assert_eq!(d[(src, dst)], Complex64::new(0.0, -0.5));
    }

    #[test]
    fn impurity_strength_one_is_identity() {
        let p = impurity_profile(
            &ImpuritySpec {
                site: 4,
                kind: ImpurityKind::TypeI,
                strength: 1.0,
            },
            16,
        )
        .unwrap();
        assert!(p.is_identity());

        // and the Hamiltonian is reproduced bit for bit
        let basis = SectorBasis::new(16).unwrap();
        let clean = ChainSpec::new(16);
        let neutral = ChainSpec::new(16)
            .with_impurity(&ImpuritySpec {
                site: 4,
                kind: ImpurityKind::TypeII,
                strength: 1.0,
            })
            .unwrap();
        let h_clean = build_h0_sector(&clean, &basis).unwrap();
        let h_neutral = build_h0_sector(&neutral, &basis).unwrap();
        assert_eq!(h_clean, h_neutral);
    }

    #[test]
    fn type_i_profile_values() {
        let p = impurity_profile(
            &ImpuritySpec {
                site: 4,
                kind: ImpurityKind::TypeI,
                strength: 1.4,
            },
            16,
        )
        .unwrap();
        assert_abs_diff_eq!(p.nn_factor(4), 1.4, epsilon = 1e-15);
        assert_abs_diff_eq!(p.nnn_factor(3), 1.4, epsilon = 1e-15);
        assert_abs_diff_eq!(p.nnn_factor(4), 1.0 / 1.4, epsilon = 1e-15);
        assert_abs_diff_eq!(p.nnn_factor(4), 0.7143, epsilon = 1e-4);
        // untouched bonds stay at 1
        assert_eq!(p.nn_factor(5), 1.0);
        assert_eq!(p.nnn_factor(5), 1.0);
    }

    #[test]
    fn type_ii_profile_values() {
        let p = impurity_profile(
            &ImpuritySpec {
                site: 4,
                kind: ImpurityKind::TypeII,
                strength: 1.9,
            },
            16,
        )
        .unwrap();
        assert_abs_diff_eq!(p.nn_factor(4), 1.0 / 1.9, epsilon = 1e-15);
        assert_abs_diff_eq!(p.nn_factor(4), 0.5263, epsilon = 1e-4);
        assert_abs_diff_eq!(p.nnn_factor(3), 1.9, epsilon = 1e-15);
        assert_abs_diff_eq!(p.nnn_factor(4), 0.5263, epsilon = 1e-4);
    }

    #[test]
    fn overlapping_impurities_compose_multiplicatively() {
        let spec = ChainSpec::new(16)
            .with_impurity(&ImpuritySpec {
                site: 4,
                kind: ImpurityKind::TypeI,
                strength: 1.4,
            })
            .unwrap()
            .with_impurity(&ImpuritySpec {
                site: 5,
                kind: ImpurityKind::TypeI,
                strength: 1.5,
            })
            .unwrap();
        // NNN(4,6) gets 1/1.4 from site 4 and 1.5 from site 5
        assert_abs_diff_eq!(
            spec.bonds.nnn_factor(4),
            1.5 / 1.4,
            epsilon = 1e-15
        );
    }

    #[test]
    fn impurity_site_bounds_enforced() {
        for bad in [0usize, 1, 15, 16, 17] {
            let r = impurity_profile(
                &ImpuritySpec {
                    site: bad,
                    kind: ImpurityKind::TypeI,
                    strength: 1.2,
                },
                16,
            );
            assert!(r.is_err(), "site {bad} should be rejected");
        }
    }

    #[test]
    fn xxz_reduces_to_xx_when_jz_zero() {
        let basis = SectorBasis::new(6).unwrap();
        let xx = build_xxz_sector(
            &XxzSpec {
                n_sites: 6,
                jx: 1.0,
                jz: 0.0,
            },
            &basis,
        )
        .unwrap();
        // no zz part: diagonal vanishes entirely
        for i in 0..basis.dim() {
            assert_eq!(xx[(i, i)], Complex64::new(0.0, 0.0));
        }
        // pure Ising: jx = 0 leaves only the diagonal
        let ising = build_xxz_sector(
            &XxzSpec {
                n_sites: 6,
                jx: 0.0,
                jz: 0.7,
            },
            &basis,
        )
        .unwrap();
        for i in 0..basis.dim() {
            for j in 0..basis.dim() {
                if i != j {
                    assert_eq!(ising[(i, j)], Complex64::new(0.0, 0.0));
                }
            }
        }
        assert_abs_diff_eq!(ising[(0, 0)].re, 0.7 * 5.0 / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let basis = SectorBasis::new(6).unwrap();
        let spec = ChainSpec::new(8);
        assert!(build_h0_sector(&spec, &basis).is_err());
        assert!(build_chirality_sector(&spec, &basis).is_err());
    }

    #[test]
    fn out_of_range_bond_override_rejected() {
        let mut bonds = BondProfile::identity();
        bonds.scale_nnn(5, 2.0).unwrap(); // bond (5,7) does not exist for N=6
        let spec = ChainSpec {
            bonds,
            ..ChainSpec::new(6)
        };
        let basis = SectorBasis::new(6).unwrap();
        assert!(build_h0_sector(&spec, &basis).is_err());
    }
}
