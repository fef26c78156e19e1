//! Brute-force validation path over the full Hilbert space.
//!
//! Everything here is built the slow, unarguable way: operators as explicit
//! Kronecker products over all 2^N (or 2^{N+P}) dimensions, evolution by
//! dense eigendecomposition, reduced states by explicit partial traces.
//! This is the ground truth the sector-restricted fast path is checked
//! against at small N; none of it shares assembly code with the sector
//! builders.
//!
//! Bit convention: site 1 is the most significant bit, and bit value 1
//! means the spin at that site is flipped (|1⟩ = down). A dedicated
//! round-trip check (`embed` then `project`) pins this convention, since a
//! silent ordering mismatch is the classic failure mode of partial traces.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::basis::{SectorBasis, SectorElement};
use crate::error::{Error, Result};
use crate::hamiltonian::{ChainSpec, XxzSpec};
use crate::metrics::EnvironmentSpec;
use crate::propagator::SectorState;

/// Dense tractability bound on the total spin count (system + bath).
pub const MAX_FULL_SPINS: usize = 14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn check_spins(n: usize) -> Result<()> {
    if n == 0 || n > MAX_FULL_SPINS {
        return Err(Error::resource(format!(
            "full-space construction limited to 1..={MAX_FULL_SPINS} spins, got {n}"
        )));
    }
    Ok(())
}

/// A state over the full 2^n computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FullState {
    amplitudes: DVector<Complex64>,
    n_spins: usize,
}

impl FullState {
    pub fn new(amplitudes: DVector<Complex64>, n_spins: usize) -> Result<Self> {
        check_spins(n_spins)?;
        if amplitudes.len() != 1 << n_spins {
            return Err(Error::domain(format!(
                "state over {n_spins} spins needs {} amplitudes, got {}",
                1 << n_spins,
                amplitudes.len()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::integrity(format!(
                "full state norm {norm} deviates from 1"
            )));
        }
        Ok(FullState { amplitudes, n_spins })
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }
}

/// Full-space index of the basis state with flips at the given 1-based
/// sites: site i occupies bit (n − i).
fn flip_mask(sites: &[usize], n_spins: usize) -> usize {
    sites.iter().map(|&s| 1usize << (n_spins - s)).sum()
}

// 2x2 building blocks (row/column order |0⟩ = up, |1⟩ = down)
fn pauli_blocks() -> [DMatrix<Complex64>; 5] {
    let id = DMatrix::identity(2, 2);
    let sz = DMatrix::from_row_slice(2, 2, &[
        Complex64::new(0.5, 0.0), ZERO,
        ZERO, Complex64::new(-0.5, 0.0),
    ]);
    let sp = DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
    let sm = DMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ONE, ZERO]);
    let sx = (&sp + &sm) * Complex64::new(0.5, 0.0);
    let sy = (&sp - &sm) * Complex64::new(0.0, -0.5);
    [id, sz, sx, sy, sp]
}

/// Embed 2x2 operators at the listed (1-based) sites into the full space,
/// identity elsewhere.
fn embed_ops(ops: &[(usize, &DMatrix<Complex64>)], n_spins: usize) -> DMatrix<Complex64> {
    let id = DMatrix::<Complex64>::identity(2, 2);
    let mut out = DMatrix::<Complex64>::identity(1, 1);
    for site in 1..=n_spins {
        let op = ops
            .iter()
            .find(|&&(s, _)| s == site)
            .map(|&(_, m)| m)
            .unwrap_or(&id);
        out = out.kronecker(op);
    }
    out
}

/// Full-space Heisenberg bond coupling·S_a·S_b.
fn heisenberg_bond(a: usize, b: usize, coupling: f64, n: usize) -> DMatrix<Complex64> {
    let [_, sz, sx, sy, _] = pauli_blocks();
    let term = embed_ops(&[(a, &sx), (b, &sx)], n)
        + embed_ops(&[(a, &sy), (b, &sy)], n)
        + embed_ops(&[(a, &sz), (b, &sz)], n);
    term * Complex64::new(coupling, 0.0)
}

/// Full-space chirality operator Σ (S_i × S_{i+1})^z = Σ (SˣSʸ − SʸSˣ).
pub fn full_chirality(n_sites: usize) -> Result<DMatrix<Complex64>> {
    check_spins(n_sites)?;
    let [_, _, sx, sy, _] = pauli_blocks();
    let dim = 1 << n_sites;
    let mut d = DMatrix::<Complex64>::zeros(dim, dim);
    for i in 1..n_sites {
        d += embed_ops(&[(i, &sx), (i + 1, &sy)], n_sites);
        d -= embed_ops(&[(i, &sy), (i + 1, &sx)], n_sites);
    }
    Ok(d)
}

/// Full-space total magnetization M = Σ Sᶻ.
pub fn full_magnetization(n_sites: usize) -> Result<DMatrix<Complex64>> {
    check_spins(n_sites)?;
    let [_, sz, ..] = pauli_blocks();
    let dim = 1 << n_sites;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for i in 1..=n_sites {
        m += embed_ops(&[(i, &sz)], n_sites);
    }
    Ok(m)
}

/// Full-space multiferroic Hamiltonian H0 over the chain only.
pub fn full_h0(spec: &ChainSpec) -> Result<DMatrix<Complex64>> {
    check_spins(spec.n_sites)?;
    let n = spec.n_sites;
    let dim = 1 << n;
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for i in 1..n {
        h += heisenberg_bond(i, i + 1, -spec.j1 * spec.bonds.nn_factor(i), n);
    }
    for i in 1..(n - 1) {
        h += heisenberg_bond(i, i + 2, -spec.j2 * spec.bonds.nnn_factor(i), n);
    }
    if spec.e0 != 0.0 {
        h += full_chirality(n)? * Complex64::new(spec.e0, 0.0);
    }
    Ok(h)
}

/// Full-space XXZ Hamiltonian.
pub fn full_xxz(spec: &XxzSpec) -> Result<DMatrix<Complex64>> {
    check_spins(spec.n_sites)?;
    let [_, sz, sx, sy, _] = pauli_blocks();
    let n = spec.n_sites;
    let dim = 1 << n;
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for i in 1..n {
        h += (embed_ops(&[(i, &sx), (i + 1, &sx)], n)
            + embed_ops(&[(i, &sy), (i + 1, &sy)], n))
            * Complex64::new(spec.jx, 0.0);
        h += embed_ops(&[(i, &sz), (i + 1, &sz)], n) * Complex64::new(spec.jz, 0.0);
    }
    Ok(h)
}

/// Full Hamiltonian of chain plus (optionally) the dephasing bath:
/// H_total = H_F ⊗ I + (Σᵢ Sᶻᵢ) ⊗ (Σₖ g Sᶻₖ), the bath itself inert.
///
/// The chain couples through its total magnetization, un-doubled: the
/// magnetization drops by 2 between the vacuum and two-flip branches, so
/// this coupling is what produces the inter-branch dephasing factor
/// r(t) = Σ_m |c_m|² e^{2itB_m} (e^{iPgt} for the all-up bath) that the
/// metrics path uses. A doubled coupling would dephase twice as fast.
pub fn full_hamiltonian(
    spec: &ChainSpec,
    env: Option<&EnvironmentSpec>,
) -> Result<DMatrix<Complex64>> {
    let h_chain = full_h0(spec)?;
    let Some(env) = env else {
        return Ok(h_chain);
    };
    check_spins(spec.n_sites + env.p_sites)?;
    let [_, sz, ..] = pauli_blocks();
    let env_dim = 1 << env.p_sites;
    let mut bath_field = DMatrix::<Complex64>::zeros(env_dim, env_dim);
    for k in 1..=env.p_sites {
        bath_field += embed_ops(&[(k, &sz)], env.p_sites) * Complex64::new(env.g, 0.0);
    }
    let chain_m = full_magnetization(spec.n_sites)?;
    let id_env = DMatrix::<Complex64>::identity(env_dim, env_dim);
    Ok(h_chain.kronecker(&id_env) + chain_m.kronecker(&bath_field))
}

/// Protocol initial state over the chain alone:
/// (|0…0⟩ + |N/2,N/2+1⟩)/√2.
pub fn protocol_initial_state(n_sites: usize) -> Result<FullState> {
    check_spins(n_sites)?;
    if n_sites % 2 != 0 || n_sites < 4 {
        return Err(Error::domain(format!(
            "protocol needs an even chain of >= 4 sites, got {n_sites}"
        )));
    }
    let mut amps = DVector::zeros(1 << n_sites);
    let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[0] = amp;
    amps[flip_mask(&[n_sites / 2, n_sites / 2 + 1], n_sites)] = amp;
    FullState::new(amps, n_sites)
}

/// Product of the protocol state with an all-up bath of P spins.
pub fn joint_initial_state(n_sites: usize, p_sites: usize) -> Result<FullState> {
    check_spins(n_sites + p_sites)?;
    let chain = protocol_initial_state(n_sites)?;
    let mut amps = DVector::zeros(1 << (n_sites + p_sites));
    for (i, &a) in chain.amplitudes().iter().enumerate() {
        amps[i << p_sites] = a;
    }
    FullState::new(amps, n_sites + p_sites)
}

/// Dense evolution engine: one eigendecomposition, then phases.
pub struct FullPropagator {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<Complex64>,
    n_spins: usize,
}

impl FullPropagator {
    pub fn new(h: &DMatrix<Complex64>) -> Result<Self> {
        let dim = h.nrows();
        if dim != h.ncols() || !dim.is_power_of_two() {
            return Err(Error::domain(format!(
                "expected a square 2^n matrix, got {}x{}",
                h.nrows(),
                h.ncols()
            )));
        }
        let n_spins = dim.trailing_zeros() as usize;
        check_spins(n_spins)?;
        let defect = (h - h.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if defect > 1e-12 {
            return Err(Error::domain(format!(
                "matrix is not Hermitian (defect {defect:.3e})"
            )));
        }
        let eig = h.clone().symmetric_eigen();
        Ok(FullPropagator {
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
            n_spins,
        })
    }

    pub fn evolve(&self, state: &FullState, t: f64) -> Result<FullState> {
        if state.n_spins != self.n_spins {
            return Err(Error::domain(format!(
                "state covers {} spins but the propagator covers {}",
                state.n_spins, self.n_spins
            )));
        }
        let mut coeffs = self.eigenvectors.adjoint() * &state.amplitudes;
        for (j, c) in coeffs.iter_mut().enumerate() {
            *c *= Complex64::from_polar(1.0, -self.eigenvalues[j] * t);
        }
        Ok(FullState {
            amplitudes: &self.eigenvectors * coeffs,
            n_spins: self.n_spins,
        })
    }

    /// Dense unitary e^{−iHt}.
    pub fn unitary(&self, t: f64) -> DMatrix<Complex64> {
        let mut scaled = self.eigenvectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= Complex64::from_polar(1.0, -self.eigenvalues[j] * t);
        }
        scaled * self.eigenvectors.adjoint()
    }
}

/// Apply a dense unitary to a full state.
pub fn apply_unitary(u: &DMatrix<Complex64>, state: &FullState) -> Result<FullState> {
    if u.ncols() != state.dim() {
        return Err(Error::domain("unitary and state dimensions differ"));
    }
    Ok(FullState {
        amplitudes: u * &state.amplitudes,
        n_spins: state.n_spins,
    })
}

/// Lift a sector state into the full space.
pub fn embed_sector_state(basis: &SectorBasis, state: &SectorState) -> Result<FullState> {
    let n = basis.n_sites();
    check_spins(n)?;
    let mut amps = DVector::zeros(1 << n);
    for idx in 0..basis.dim() {
        let full_idx = match basis.element_at(idx)? {
            SectorElement::Vacuum => 0,
            SectorElement::Pair(p) => flip_mask(&[p.first(), p.second()], n),
        };
        amps[full_idx] = state.amplitude(idx);
    }
    FullState::new(amps, n)
}

/// Restrict a full state to the sector amplitudes (no renormalization).
pub fn project_to_sector(full: &FullState, basis: &SectorBasis) -> Result<DVector<Complex64>> {
    if full.n_spins != basis.n_sites() {
        return Err(Error::domain(format!(
            "full state covers {} spins but the basis covers {}",
            full.n_spins,
            basis.n_sites()
        )));
    }
    let mut out = DVector::zeros(basis.dim());
    for idx in 0..basis.dim() {
        let full_idx = match basis.element_at(idx)? {
            SectorElement::Vacuum => 0,
            SectorElement::Pair(p) => flip_mask(&[p.first(), p.second()], full.n_spins),
        };
        out[idx] = full.amplitudes[full_idx];
    }
    Ok(out)
}

/// Sector restriction ⟨a|O|b⟩ of a full-space operator.
pub fn project_operator(op: &DMatrix<Complex64>, basis: &SectorBasis) -> Result<DMatrix<Complex64>> {
    let n = basis.n_sites();
    check_spins(n)?;
    if op.nrows() != 1 << n || op.ncols() != 1 << n {
        return Err(Error::domain(format!(
            "operator of dimension {} does not cover {n} spins",
            op.nrows()
        )));
    }
    let full_indices: Vec<usize> = (0..basis.dim())
        .map(|idx| match basis.element_at(idx).expect("index in range") {
            SectorElement::Vacuum => 0,
            SectorElement::Pair(p) => flip_mask(&[p.first(), p.second()], n),
        })
        .collect();
    let d = basis.dim();
    let mut out = DMatrix::zeros(d, d);
    for (row, &fr) in full_indices.iter().enumerate() {
        for (col, &fc) in full_indices.iter().enumerate() {
            out[(row, col)] = op[(fr, fc)];
        }
    }
    Ok(out)
}

/// Density matrix |ψ⟩⟨ψ| of a full state.
pub fn density_matrix(state: &FullState) -> DMatrix<Complex64> {
    let v = &state.amplitudes;
    v * v.adjoint()
}

/// Partial trace keeping the listed (1-based, strictly ascending) spins.
///
/// The reduced matrix is indexed by the kept spins' bits in their listed
/// order, most significant first.
pub fn partial_trace(
    rho: &DMatrix<Complex64>,
    n_spins: usize,
    keep: &[usize],
) -> Result<DMatrix<Complex64>> {
    check_spins(n_spins)?;
    if rho.nrows() != 1 << n_spins || rho.ncols() != 1 << n_spins {
        return Err(Error::domain(format!(
            "density matrix of dimension {} does not cover {n_spins} spins",
            rho.nrows()
        )));
    }
    if keep.is_empty()
        || keep.windows(2).any(|w| w[0] >= w[1])
        || keep.iter().any(|&s| s < 1 || s > n_spins)
    {
        return Err(Error::domain(format!(
            "kept sites must be strictly ascending within 1..={n_spins}, got {keep:?}"
        )));
    }
    let k = keep.len();
    let traced: Vec<usize> = (1..=n_spins).filter(|s| !keep.contains(s)).collect();
    let m = traced.len();
    // full index from (kept bits, traced bits)
    let compose = |kept_bits: usize, traced_bits: usize| -> usize {
        let mut idx = 0usize;
        for (pos, &site) in keep.iter().enumerate() {
            if kept_bits >> (k - 1 - pos) & 1 == 1 {
                idx |= 1 << (n_spins - site);
            }
        }
        for (pos, &site) in traced.iter().enumerate() {
            if traced_bits >> (m - 1 - pos) & 1 == 1 {
                idx |= 1 << (n_spins - site);
            }
        }
        idx
    };
    let mut out = DMatrix::zeros(1 << k, 1 << k);
    for a in 0..1usize << k {
        for b in 0..1usize << k {
            let mut sum = ZERO;
            for e in 0..1usize << m {
                sum += rho[(compose(a, e), compose(b, e))];
            }
            out[(a, b)] = sum;
        }
    }
    Ok(out)
}

/// Reduced density matrix of the chain's end qubits, tracing the bath
/// first (if present) and then the interior sites.
pub fn end_pair_density(state: &FullState, n_sites: usize) -> Result<DMatrix<Complex64>> {
    if state.n_spins < n_sites {
        return Err(Error::domain(format!(
            "state covers {} spins, fewer than the chain's {n_sites}",
            state.n_spins
        )));
    }
    let rho_full = density_matrix(state);
    let rho_chain = if state.n_spins > n_sites {
        // bath occupies sites n_sites+1 ..= n_spins; keep the chain
        let chain_sites: Vec<usize> = (1..=n_sites).collect();
        partial_trace(&rho_full, state.n_spins, &chain_sites)?
    } else {
        rho_full
    };
    partial_trace(&rho_chain, n_sites, &[1, n_sites])
}

/// ⟨Ω⁰⁰| ρ_ends |Ω⁰⁰⟩ by explicit partial trace.
pub fn oracle_singlet_fraction(state: &FullState, n_sites: usize) -> Result<f64> {
    let rho = end_pair_density(state, n_sites)?;
    let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut omega = DVector::zeros(4);
    omega[0] = amp;
    omega[3] = amp;
    Ok((omega.adjoint() * rho * omega)[(0, 0)].re)
}
