//! Teleportation quality of the evolved chain state.
//!
//! The end qubits (sites 1 and N) carry the entanglement to be consumed by
//! teleportation. Their reduced density matrix follows from the flip-pair
//! amplitudes alone: pairs touching neither end contribute to |00⟩⟨00|, pairs
//! touching one end to |10⟩⟨10| or |01⟩⟨01|, and the (1,N) pair both to
//! |11⟩⟨11| and to the |11⟩⟨00| coherence that interferes with the vacuum
//! branch. The singlet fraction is the overlap of that matrix with the Bell
//! pair |Ω⁰⁰⟩ = (|00⟩+|11⟩)/√2, and the average teleportation fidelity is
//! F = (2f+1)/3.
//!
//! A dephasing bath of P spins coupled diagonally to the chain multiplies
//! the coherence by r(t) = Σ_m |c_m|² e^{2itB_m} with
//! B_m = Σ_k ½(−1)^{m_k} g_k; for the all-up bath with uniform coupling g
//! this closes to r(t) = e^{iPgt}. Only the coherence feels the bath — the
//! flip-pair weights are bath-independent because the coupling commutes
//! with the chain magnetization.

use nalgebra::{DVector, Matrix4, Vector4};
use num_complex::Complex64;

use crate::basis::SectorBasis;
use crate::error::{Error, Result};
use crate::propagator::SectorState;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Uniform dephasing bath: P spins, all initially up, each coupled to the
/// chain's total magnetization with the same constant g.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvironmentSpec {
    pub p_sites: usize,
    pub g: f64,
}

impl EnvironmentSpec {
    pub fn new(p_sites: usize, g: f64) -> Result<Self> {
        if p_sites < 1 {
            return Err(Error::domain("environment needs at least one site"));
        }
        if !g.is_finite() {
            return Err(Error::domain(format!("environment coupling must be finite, got {g}")));
        }
        Ok(EnvironmentSpec { p_sites, g })
    }
}

/// Singlet fraction and companions at one time point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingletResult {
    pub time: f64,
    /// Overlap ⟨Ω⁰⁰|ρ_out|Ω⁰⁰⟩ ∈ [0,1].
    pub f: f64,
    /// Average teleportation fidelity (2f+1)/3.
    pub fidelity: f64,
    /// End-to-end transfer probability |⟨1,N|G|N/2,N/2+1⟩|².
    pub transfer_prob: f64,
    /// Total weight on pairs touching neither end.
    pub type4_weight: f64,
}

/// Weights of the evolved flip-pair amplitudes, grouped by end class.
/// All in the ⟨j,j′|G|mid⟩ normalization (preparation factor removed).
struct EndWeights {
    first_only: f64,
    last_only: f64,
    bulk: f64,
    /// ⟨1,N|G|mid⟩
    transfer: Complex64,
}

fn end_weights(amps: &DVector<Complex64>, basis: &SectorBasis) -> Result<EndWeights> {
    if amps.len() != basis.dim() {
        return Err(Error::domain(format!(
            "state dimension {} does not match basis dimension {}",
            amps.len(),
            basis.dim()
        )));
    }
    let norm = amps.norm();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::integrity(format!(
            "state norm {norm} deviates from 1 by more than 1e-6; evolution is broken upstream"
        )));
    }
    let n = basis.n_sites();
    let mut w = EndWeights {
        first_only: 0.0,
        last_only: 0.0,
        bulk: 0.0,
        transfer: Complex64::new(0.0, 0.0),
    };
    for (idx, pair) in basis.pairs() {
        // |A|² = 2·|amplitude|²: the state carries the 1/√2 preparation factor
        let p2 = 2.0 * amps[idx].norm_sqr();
        match (pair.first() == 1, pair.second() == n) {
            (true, true) => {
                w.transfer = amps[idx] * Complex64::new(std::f64::consts::SQRT_2, 0.0)
            }
            (true, false) => w.first_only += p2,
            (false, true) => w.last_only += p2,
            (false, false) => w.bulk += p2,
        }
    }
    Ok(w)
}

fn score(
    amps: &DVector<Complex64>,
    vacuum_energy: f64,
    t: f64,
    basis: &SectorBasis,
    r: Complex64,
) -> Result<SingletResult> {
    let w = end_weights(amps, basis)?;
    let transfer_prob = w.transfer.norm_sqr();
    let cross = (Complex64::from_polar(1.0, vacuum_energy * t) * w.transfer * r).re;
    let f = 0.25 + 0.25 * w.bulk + 0.25 * transfer_prob + 0.5 * cross;
    Ok(SingletResult {
        time: t,
        f,
        fidelity: (2.0 * f + 1.0) / 3.0,
        transfer_prob,
        type4_weight: w.bulk,
    })
}

/// Singlet fraction of the evolved state at time `t` with no environment:
///
///   f = ¼ + ¼ Σ_bulk |A|² + ¼ |A₁ₙ|² + ½ Re[e^{iE⁰t} A₁ₙ].
pub fn singlet_fraction(
    state: &SectorState,
    vacuum_energy: f64,
    t: f64,
    basis: &SectorBasis,
) -> Result<SingletResult> {
    score(state.amplitudes(), vacuum_energy, t, basis, ONE)
}

/// Singlet fraction with the bath's dephasing factor on the coherence:
/// the cross term becomes ½ Re[e^{iE⁰t} A₁ₙ r(t)].
pub fn singlet_fraction_env(
    state: &SectorState,
    vacuum_energy: f64,
    t: f64,
    basis: &SectorBasis,
    env: &EnvironmentSpec,
) -> Result<SingletResult> {
    score(
        state.amplitudes(),
        vacuum_energy,
        t,
        basis,
        env_phase_factor(env, t),
    )
}

pub(crate) fn score_raw(
    amps: &DVector<Complex64>,
    vacuum_energy: f64,
    t: f64,
    basis: &SectorBasis,
    env: Option<&EnvironmentSpec>,
) -> Result<SingletResult> {
    let r = env.map_or(ONE, |e| env_phase_factor(e, t));
    score(amps, vacuum_energy, t, basis, r)
}

/// Dephasing factor r(t) = e^{iPgt} of the all-up uniform bath.
pub fn env_phase_factor(env: &EnvironmentSpec, t: f64) -> Complex64 {
    Complex64::from_polar(1.0, env.p_sites as f64 * env.g * t)
}

/// General diagonal-ensemble dephasing factor
/// r(t) = Σ_m w_m e^{2itB_m},  B_m = Σ_k ½(−1)^{m_k} g_k,
/// for arbitrary per-site couplings and eigenstate weights. Each ensemble
/// entry is (bitmask, weight) with bath site k mapped to bit P−k (site 1
/// most significant); weights must sum to 1.
pub fn env_phase_factor_general(
    couplings: &[f64],
    ensemble: &[(u64, f64)],
    t: f64,
) -> Result<Complex64> {
    let p = couplings.len();
    if p == 0 || p > 63 {
        return Err(Error::domain(format!(
            "bath must have between 1 and 63 sites, got {p}"
        )));
    }
    let total: f64 = ensemble.iter().map(|&(_, w)| w).sum();
    if (total - 1.0).abs() > 1e-6 || ensemble.iter().any(|&(_, w)| w < 0.0) {
        return Err(Error::domain(
            "ensemble weights must be non-negative and sum to 1",
        ));
    }
    let mut r = Complex64::new(0.0, 0.0);
    for &(m, weight) in ensemble {
        if m >> p != 0 {
            return Err(Error::domain(format!(
                "eigenstate mask {m:#b} exceeds the {p}-site bath"
            )));
        }
        let b_m: f64 = couplings
            .iter()
            .enumerate()
            .map(|(k0, &g)| {
                let bit = (m >> (p - 1 - k0)) & 1;
                if bit == 0 {
                    0.5 * g
                } else {
                    -0.5 * g
                }
            })
            .sum();
        r += Complex64::from_polar(weight, 2.0 * t * b_m);
    }
    Ok(r)
}

/// Reduced density matrix of the end qubits in the basis
/// {|00⟩, |01⟩, |10⟩, |11⟩} (|0⟩ = spin up).
///
/// Diagonal from the classified pair weights; the |11⟩⟨00| coherence
/// ½e^{iE⁰t}A₁ₙ·r(t) interferes the transferred pair with the vacuum
/// branch and is the only entry the bath dephases. The partial trace also
/// leaves a |10⟩⟨01| coherence Σⱼ a₍₁,ⱼ₎a*₍ⱼ,ₙ₎ between single-end pairs
/// sharing the same interior flip; it is bath-blind (both branches carry
/// the same magnetization) and drops out of the singlet fraction, but it
/// belongs to the exact reduced state. Hermitian, trace 1, positive
/// semidefinite.
pub fn rho_out(
    state: &SectorState,
    vacuum_energy: f64,
    t: f64,
    basis: &SectorBasis,
    env: Option<&EnvironmentSpec>,
) -> Result<Matrix4<Complex64>> {
    let amps = state.amplitudes();
    let w = end_weights(amps, basis)?;
    let r = env.map_or(ONE, |e| env_phase_factor(e, t));
    let zero = Complex64::new(0.0, 0.0);
    let mut rho = Matrix4::from_element(zero);
    rho[(0, 0)] = Complex64::new(0.5 + 0.5 * w.bulk, 0.0);
    rho[(1, 1)] = Complex64::new(0.5 * w.last_only, 0.0);
    rho[(2, 2)] = Complex64::new(0.5 * w.first_only, 0.0);
    rho[(3, 3)] = Complex64::new(0.5 * w.transfer.norm_sqr(), 0.0);
    let coherence = Complex64::from_polar(0.5, vacuum_energy * t) * w.transfer * r;
    rho[(3, 0)] = coherence;
    rho[(0, 3)] = coherence.conj();
    let n = basis.n_sites();
    let mut single_end = zero;
    for j in 2..n {
        let first = amps[basis.pair_index(crate::basis::FlipPair::new(1, j)?)?];
        let last = amps[basis.pair_index(crate::basis::FlipPair::new(j, n)?)?];
        single_end += first * last.conj();
    }
    rho[(2, 1)] = single_end;
    rho[(1, 2)] = single_end.conj();
    Ok(rho)
}

/// Overlap of a two-qubit density matrix with |Ω⁰⁰⟩ = (|00⟩+|11⟩)/√2.
pub fn bell_overlap(rho: &Matrix4<Complex64>) -> f64 {
    let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let omega = Vector4::new(amp, zero, zero, amp);
    (omega.adjoint() * rho * omega)[(0, 0)].re
}

/// Diagnostic: the best overlap over all four Bell states. Not used by the
/// reported singlet fraction, which is defined against |Ω⁰⁰⟩ alone.
pub fn max_bell_fraction(rho: &Matrix4<Complex64>) -> f64 {
    let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let bells = [
        Vector4::new(a, zero, zero, a),
        Vector4::new(a, zero, zero, -a),
        Vector4::new(zero, a, a, zero),
        Vector4::new(zero, a, -a, zero),
    ];
    bells
        .iter()
        .map(|b| (b.adjoint() * rho * b)[(0, 0)].re)
        .fold(f64::NEG_INFINITY, f64::max)
}
