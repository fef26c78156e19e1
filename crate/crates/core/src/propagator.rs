//! Time evolution inside the sector.
//!
//! Everything runs off one spectral decomposition per Hamiltonian: the
//! continuous propagator is V e^{−iΛt} V†, and the kicked drive is the
//! stroboscopic map (U1·U0)^r with U0 = e^{−iH0τ} and U1 = e^{−iE1·D}.
//! The vacuum component is handled exactly — it decouples from the flip
//! block, so its eigenpair is embedded analytically rather than recovered
//! from the iterative eigensolver.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::basis::SectorBasis;
use crate::error::{Error, Result};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Eigenpairs of a sector Hamiltonian, the engine for all time evolution.
///
/// Index 0 of the spectrum is the vacuum energy E⁰, exact because the
/// vacuum row and column vanish off the diagonal; the remaining pairs come
/// from diagonalizing the flip block.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<Complex64>,
    vacuum_energy: f64,
}

impl SpectralDecomposition {
    /// Decompose a Hermitian sector matrix with a decoupled vacuum.
    ///
    /// Fails with a domain error if the matrix is not square, not Hermitian
    /// (to 1e−12), or couples the vacuum to the flip block; fails with an
    /// integrity error if the eigensolver cannot reconstruct the input to
    /// 1e−10.
    pub fn new(h: &DMatrix<Complex64>) -> Result<Self> {
        let d = h.nrows();
        if d != h.ncols() || d < 2 {
            return Err(Error::domain(format!(
                "expected a square sector matrix of dimension >= 2, got {}x{}",
                h.nrows(),
                h.ncols()
            )));
        }
        let herm_defect = (h - h.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm_defect > 1e-12 {
            return Err(Error::domain(format!(
                "matrix is not Hermitian (defect {herm_defect:.3e})"
            )));
        }
        let vac_coupling = (1..d)
            .flat_map(|i| [h[(0, i)].norm(), h[(i, 0)].norm()])
            .fold(0.0, f64::max);
        if vac_coupling > 1e-12 {
            return Err(Error::domain(format!(
                "vacuum couples to the flip block (max |H[0,i]| = {vac_coupling:.3e})"
            )));
        }

        let vacuum_energy = h[(0, 0)].re;
        let block = h.view((1, 1), (d - 1, d - 1)).into_owned();
        let eig = block.symmetric_eigen();

        let mut eigenvalues = DVector::zeros(d);
        eigenvalues[0] = vacuum_energy;
        eigenvalues.rows_mut(1, d - 1).copy_from(&eig.eigenvalues);
        let mut eigenvectors = DMatrix::zeros(d, d);
        eigenvectors[(0, 0)] = ONE;
        eigenvectors
            .view_mut((1, 1), (d - 1, d - 1))
            .copy_from(&eig.eigenvectors);

        let decomp = SpectralDecomposition {
            eigenvalues,
            eigenvectors,
            vacuum_energy,
        };
        let resid = decomp.reconstruction_defect(h);
        if resid > 1e-10 {
            return Err(Error::integrity(format!(
                "eigendecomposition failed to reconstruct the matrix (defect {resid:.3e})"
            )));
        }
        Ok(decomp)
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    /// The vacuum diagonal entry E⁰.
    pub fn vacuum_energy(&self) -> f64 {
        self.vacuum_energy
    }

    /// Max-norm of VΛV† − H.
    pub fn reconstruction_defect(&self, h: &DMatrix<Complex64>) -> f64 {
        let mut scaled = self.eigenvectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= Complex64::new(self.eigenvalues[j], 0.0);
        }
        let recon = &scaled * self.eigenvectors.adjoint();
        (&recon - h).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Unitary propagator e^{−iHt} = V e^{−iΛt} V†.
    pub fn propagator(&self, t: f64) -> DMatrix<Complex64> {
        let mut scaled = self.eigenvectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= Complex64::from_polar(1.0, -self.eigenvalues[j] * t);
        }
        scaled * self.eigenvectors.adjoint()
    }

    /// Evolve a state for time `t` (continuous, unkicked).
    pub fn evolve(&self, state: &SectorState, t: f64) -> SectorState {
        if t == 0.0 {
            return state.clone();
        }
        let mut coeffs = self.eigenvectors.adjoint() * &state.amplitudes;
        for (j, c) in coeffs.iter_mut().enumerate() {
            *c *= Complex64::from_polar(1.0, -self.eigenvalues[j] * t);
        }
        SectorState {
            amplitudes: &self.eigenvectors * coeffs,
        }
    }
}

/// Parameters of the delta-kick train: period τ, kick amplitude E1
/// (magnetoelectric constant times pulse field), and the number of kicks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KickSchedule {
    pub tau: f64,
    pub e1: f64,
    pub n_max: usize,
}

impl KickSchedule {
    pub fn new(tau: f64, e1: f64, n_max: usize) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::domain(format!("kick period must be positive, got {tau}")));
        }
        if !e1.is_finite() {
            return Err(Error::domain(format!("kick amplitude must be finite, got {e1}")));
        }
        Ok(KickSchedule { tau, e1, n_max })
    }

    /// Schedule with as many kicks as fit in `t_max`.
    pub fn bounded(tau: f64, e1: f64, t_max: f64) -> Result<Self> {
        if !(t_max > 0.0) {
            return Err(Error::domain(format!("time horizon must be positive, got {t_max}")));
        }
        // tolerate representation error in tau grids (e.g. 1000/0.05)
        let n_max = (t_max / tau + 1e-9).floor() as usize;
        Self::new(tau, e1, n_max)
    }
}

/// A normalized state over a [`SectorBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct SectorState {
    amplitudes: DVector<Complex64>,
}

impl SectorState {
    /// Wrap an amplitude vector, requiring unit norm to 1e−6.
    pub fn from_amplitudes(amplitudes: DVector<Complex64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::integrity(format!(
                "state norm {norm} deviates from 1 by more than 1e-6"
            )));
        }
        Ok(SectorState { amplitudes })
    }

    #[cfg(test)]
    pub(crate) fn from_raw(amplitudes: DVector<Complex64>) -> Self {
        SectorState { amplitudes }
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }
}

/// The protocol's initial state: a Bell pair injected at mid-chain,
/// (|0…0⟩ + |N/2, N/2+1⟩)/√2.
pub fn initial_state(basis: &SectorBasis) -> SectorState {
    let mut amplitudes = DVector::zeros(basis.dim());
    let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amplitudes[0] = amp;
    amplitudes[basis.injection_index()] = amp;
    SectorState { amplitudes }
}

/// Kick unitary e^{−i·e1·D} from the sector chirality matrix.
///
/// `e1 = 0` returns the exact identity.
pub fn kick_operator(chirality: &DMatrix<Complex64>, e1: f64) -> Result<DMatrix<Complex64>> {
    if e1 == 0.0 {
        return Ok(DMatrix::identity(chirality.nrows(), chirality.ncols()));
    }
    Ok(SpectralDecomposition::new(chirality)?.propagator(e1))
}

/// Iterates the Floquet map F = U1·U0 one kick at a time.
///
/// The composed map is formed once; each step is a single matrix-vector
/// product, so walking n kicks costs O(d³ + n·d²).
pub struct KickedWalker {
    floquet: DMatrix<Complex64>,
    state: DVector<Complex64>,
    scratch: DVector<Complex64>,
    kicks: usize,
}

impl KickedWalker {
    pub fn new(
        u0: &DMatrix<Complex64>,
        u1: &DMatrix<Complex64>,
        state0: &SectorState,
    ) -> Result<Self> {
        let d = state0.dim();
        if u0.nrows() != d || u0.ncols() != d || u1.nrows() != d || u1.ncols() != d {
            return Err(Error::domain(format!(
                "propagator dimensions do not match the state (dim {d})"
            )));
        }
        Ok(KickedWalker {
            floquet: u1 * u0,
            state: state0.amplitudes.clone(),
            scratch: DVector::zeros(d),
            kicks: 0,
        })
    }

    /// Apply one full period followed by a kick; returns the kick count.
    pub fn step(&mut self) -> usize {
        self.scratch.gemv(ONE, &self.floquet, &self.state, ZERO);
        std::mem::swap(&mut self.state, &mut self.scratch);
        self.kicks += 1;
        self.kicks
    }

    pub fn kicks(&self) -> usize {
        self.kicks
    }

    /// Raw amplitudes after the last kick.
    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.state
    }

    pub fn state(&self) -> SectorState {
        SectorState {
            amplitudes: self.state.clone(),
        }
    }
}

/// State after `r` kicks: (U1·U0)^r |ψ₀⟩. `r = 0` returns the input.
pub fn evolve_kicked(
    u0: &DMatrix<Complex64>,
    u1: &DMatrix<Complex64>,
    state0: &SectorState,
    r: usize,
) -> Result<SectorState> {
    let mut walker = KickedWalker::new(u0, u1, state0)?;
    for _ in 0..r {
        walker.step();
    }
    Ok(walker.state())
}

/// Mid-to-ends transfer amplitude ⟨1,N| e^{−iHt} |N/2,N/2+1⟩, read off the
/// evolved state with the 1/√2 preparation factor removed.
pub fn transfer_amplitude(state: &SectorState, basis: &SectorBasis) -> Complex64 {
    state.amplitude(basis.end_pair_index()) * Complex64::new(std::f64::consts::SQRT_2, 0.0)
}
