//! The optimization hierarchy over drive parameters.
//!
//! Three nested maxima of the singlet fraction:
//!
//! * `f_max`   — over evolution time (equivalently kick count) at fixed
//!   (τ, E1), bounded by the horizon t_max;
//! * `f_maxx`  — additionally over the kick period τ;
//! * `f_maxxx` — additionally over the kick amplitude E1 ∈ (0, 5].
//!
//! Grid points are independent work items sharing one spectral
//! decomposition; evaluation parallelizes over E1 (each worker builds its
//! kick unitary once and walks every τ row), and the final reduction runs
//! in a fixed grid order with deterministic tie-breaking, so results do not
//! depend on thread count.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::basis::SectorBasis;
use crate::error::{Error, Result};
use crate::hamiltonian::{
    build_chirality_sector, build_h0_sector, build_xxz_sector, ChainSpec, ImpurityKind,
    ImpuritySpec, XxzSpec,
};
use crate::metrics::{score_raw, EnvironmentSpec};
use crate::propagator::{initial_state, KickedWalker, SpectralDecomposition};

/// The chain model a sweep runs on. Only the multiferroic chain couples to
/// the electric field, so kicked sweeps reject the XXZ comparison model.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Multiferroic(ChainSpec),
    Xxz(XxzSpec),
}

impl Model {
    pub fn n_sites(&self) -> usize {
        match self {
            Model::Multiferroic(spec) => spec.n_sites,
            Model::Xxz(spec) => spec.n_sites,
        }
    }
}

/// Sweep parameters: models, grids, horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub model: Model,
    pub env: Option<EnvironmentSpec>,
    /// Evolution horizon, default 1000 (units of 1/J1).
    pub t_max: f64,
    /// Sampling step for unkicked evolution.
    pub dt_unkicked: f64,
    pub tau_values: Vec<f64>,
    pub e1_values: Vec<f64>,
}

/// Kick periods scanned by default: 0.05 to 2.00 in steps of 0.05.
/// Periods beyond 2 were scanned during development and never came close
/// to the small-period optima.
pub fn default_tau_grid() -> Vec<f64> {
    (1..=40).map(|k| k as f64 * 0.05).collect()
}

/// Kick amplitudes scanned by default: 0.01 to 5.00 in steps of 0.01.
/// The f_max landscape is sharp in the kick amplitude (a 0.05 lattice
/// misses the best N=16 peaks), so the default grid is fine in E1 and
/// coarser in τ.
pub fn default_e1_grid() -> Vec<f64> {
    (1..=500).map(|k| k as f64 * 0.01).collect()
}

impl SweepGrid {
    /// Default grids and the paper-scale horizon for a given model.
    pub fn new(model: Model) -> Self {
        SweepGrid {
            model,
            env: None,
            t_max: 1000.0,
            dt_unkicked: 0.05,
            tau_values: default_tau_grid(),
            e1_values: default_e1_grid(),
        }
    }

    pub fn with_env(mut self, env: EnvironmentSpec) -> Self {
        self.env = Some(env);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_max > 0.0) {
            return Err(Error::domain(format!("t_max must be positive, got {}", self.t_max)));
        }
        if !(self.dt_unkicked > 0.0) {
            return Err(Error::domain(format!(
                "dt_unkicked must be positive, got {}",
                self.dt_unkicked
            )));
        }
        if self.tau_values.iter().any(|&t| !(t > 0.0)) {
            return Err(Error::domain("all kick periods must be positive"));
        }
        if self.e1_values.iter().any(|&e| !(e > 0.0 && e <= 5.0)) {
            return Err(Error::domain("kick amplitudes must lie in (0, 5]"));
        }
        Ok(())
    }
}

/// Where a maximum was attained. `tau`, `e1`, `kicks` are unset for
/// unkicked results.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArgMax {
    /// Evolution time of the maximum (r·τ for kicked runs).
    pub time: f64,
    pub tau: Option<f64>,
    pub e1: Option<f64>,
    pub kicks: Option<usize>,
}

/// Result of one (possibly nested) maximization. The three levels coincide
/// where the corresponding grid is a single point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepResult {
    pub f_max: f64,
    pub f_maxx: f64,
    pub f_maxxx: f64,
    pub argmax: ArgMax,
    /// f_max(kicked) − f_max(unkicked) under the same horizon and bath.
    pub delta_vs_unkicked: Option<f64>,
}

/// One point of the (τ, E1) surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub tau: f64,
    pub e1: f64,
    pub f_max: f64,
    pub argmax_kicks: usize,
    pub argmax_time: f64,
}

/// Full kicked surface plus the unkicked baseline and the global summary.
#[derive(Debug, Clone)]
pub struct SweepSurface {
    /// Points in row-major (τ outer, E1 inner) grid order.
    pub points: Vec<SweepPoint>,
    pub unkicked: SweepResult,
    pub summary: SweepResult,
}

/// Shared immutable per-model data: basis, Hamiltonian spectrum, and (for
/// the multiferroic chain) the chirality spectrum driving the kicks.
struct SectorSetup {
    basis: SectorBasis,
    h_decomp: SpectralDecomposition,
    d_decomp: Option<SpectralDecomposition>,
}

fn setup(model: &Model) -> Result<SectorSetup> {
    let basis = SectorBasis::new(model.n_sites())?;
    let (h, d_decomp) = match model {
        Model::Multiferroic(spec) => {
            let h = build_h0_sector(spec, &basis)?;
            let chi = build_chirality_sector(spec, &basis)?;
            (h, Some(SpectralDecomposition::new(&chi)?))
        }
        Model::Xxz(spec) => (build_xxz_sector(spec, &basis)?, None),
    };
    let h_decomp = SpectralDecomposition::new(&h)?;
    Ok(SectorSetup {
        basis,
        h_decomp,
        d_decomp,
    })
}

fn sample_count(t_max: f64, dt: f64) -> usize {
    (t_max / dt + 1e-9).floor() as usize
}

/// Best f over the unkicked time grid {dt, 2dt, …}; ties go to the
/// earliest time.
fn unkicked_scan(
    setup: &SectorSetup,
    env: Option<&EnvironmentSpec>,
    t_max: f64,
    dt: f64,
) -> Result<(f64, f64)> {
    let psi0 = initial_state(&setup.basis);
    let coeffs0 = setup.h_decomp.eigenvectors().adjoint() * psi0.amplitudes();
    let mut phased = coeffs0.clone();
    let mut state = psi0.amplitudes().clone();
    let mut best = f64::NEG_INFINITY;
    let mut best_t = dt;
    let evals = setup.h_decomp.eigenvalues();
    let vecs = setup.h_decomp.eigenvectors();
    for k in 1..=sample_count(t_max, dt) {
        let t = dt * k as f64;
        for (j, c) in phased.iter_mut().enumerate() {
            *c = coeffs0[j] * Complex64::from_polar(1.0, -evals[j] * t);
        }
        state.gemv(
            Complex64::new(1.0, 0.0),
            vecs,
            &phased,
            Complex64::new(0.0, 0.0),
        );
        let f = score_raw(&state, setup.h_decomp.vacuum_energy(), t, &setup.basis, env)?.f;
        if f > best {
            best = f;
            best_t = t;
        }
    }
    Ok((best, best_t))
}

/// Best f over kick counts for one (τ, E1) pair; ties go to fewest kicks.
fn kicked_scan(
    setup: &SectorSetup,
    env: Option<&EnvironmentSpec>,
    u0: &DMatrix<Complex64>,
    u1: &DMatrix<Complex64>,
    tau: f64,
    e1: f64,
    t_max: f64,
) -> Result<SweepPoint> {
    let n_max = (t_max / tau + 1e-9).floor() as usize;
    let psi0 = initial_state(&setup.basis);
    let mut walker = KickedWalker::new(u0, u1, &psi0)?;
    let mut best = f64::NEG_INFINITY;
    let mut best_r = 1;
    for _ in 0..n_max {
        let r = walker.step();
        let t = tau * r as f64;
        let f = score_raw(
            walker.amplitudes(),
            setup.h_decomp.vacuum_energy(),
            t,
            &setup.basis,
            env,
        )?
        .f;
        if f > best {
            best = f;
            best_r = r;
        }
    }
    if n_max == 0 {
        return Err(Error::domain(format!(
            "kick period {tau} exceeds the horizon {t_max}; no kicks fit"
        )));
    }
    Ok(SweepPoint {
        tau,
        e1,
        f_max: best,
        argmax_kicks: best_r,
        argmax_time: tau * best_r as f64,
    })
}

/// Maximize f over unkicked evolution times.
pub fn fmax_unkicked(grid: &SweepGrid) -> Result<SweepResult> {
    grid.validate()?;
    let setup = setup(&grid.model)?;
    let (best, best_t) = unkicked_scan(&setup, grid.env.as_ref(), grid.t_max, grid.dt_unkicked)?;
    Ok(SweepResult {
        f_max: best,
        f_maxx: best,
        f_maxxx: best,
        argmax: ArgMax {
            time: best_t,
            tau: None,
            e1: None,
            kicks: None,
        },
        delta_vs_unkicked: None,
    })
}

fn require_chirality(setup: &SectorSetup) -> Result<&SpectralDecomposition> {
    setup.d_decomp.as_ref().ok_or_else(|| {
        Error::domain("kicked sweeps need the chirality drive; the XXZ model is unkicked")
    })
}

/// Maximize f over kick counts at fixed (τ, E1), reporting the gain over
/// the unkicked baseline.
pub fn fmax_kicked(grid: &SweepGrid, tau: f64, e1: f64) -> Result<SweepResult> {
    grid.validate()?;
    if !(tau > 0.0) {
        return Err(Error::domain(format!("kick period must be positive, got {tau}")));
    }
    let setup = setup(&grid.model)?;
    let d_decomp = require_chirality(&setup)?;
    let u0 = setup.h_decomp.propagator(tau);
    let u1 = if e1 == 0.0 {
        DMatrix::identity(setup.basis.dim(), setup.basis.dim())
    } else {
        d_decomp.propagator(e1)
    };
    let point = kicked_scan(&setup, grid.env.as_ref(), &u0, &u1, tau, e1, grid.t_max)?;
    let (unkicked, _) = unkicked_scan(&setup, grid.env.as_ref(), grid.t_max, grid.dt_unkicked)?;
    Ok(SweepResult {
        f_max: point.f_max,
        f_maxx: point.f_max,
        f_maxxx: point.f_max,
        argmax: ArgMax {
            time: point.argmax_time,
            tau: Some(tau),
            e1: Some(e1),
            kicks: Some(point.argmax_kicks),
        },
        delta_vs_unkicked: Some(point.f_max - unkicked),
    })
}

/// Evaluate the whole (τ, E1) surface, in parallel over E1 columns.
fn surface_points(
    setup: &SectorSetup,
    env: Option<&EnvironmentSpec>,
    tau_values: &[f64],
    e1_values: &[f64],
    t_max: f64,
) -> Result<Vec<Vec<SweepPoint>>> {
    let d_decomp = require_chirality(setup)?;
    let u0s: Vec<DMatrix<Complex64>> = tau_values
        .iter()
        .map(|&tau| setup.h_decomp.propagator(tau))
        .collect();
    e1_values
        .par_iter()
        .map(|&e1| {
            let u1 = d_decomp.propagator(e1);
            tau_values
                .iter()
                .zip(&u0s)
                .map(|(&tau, u0)| kicked_scan(setup, env, u0, &u1, tau, e1, t_max))
                .collect::<Result<Vec<SweepPoint>>>()
        })
        .collect()
}

/// Reduce a set of points to the nested maxima with the deterministic
/// tie-break (largest f; then smallest E1, smallest τ, fewest kicks).
fn reduce_points(points: &[SweepPoint], unkicked_f: f64) -> SweepResult {
    let mut ordered: Vec<&SweepPoint> = points.iter().collect();
    ordered.sort_by(|a, b| {
        a.e1.partial_cmp(&b.e1)
            .unwrap()
            .then(a.tau.partial_cmp(&b.tau).unwrap())
            .then(a.argmax_kicks.cmp(&b.argmax_kicks))
    });
    let mut best: Option<&SweepPoint> = None;
    for p in ordered {
        if best.map_or(true, |b| p.f_max > b.f_max) {
            best = Some(p);
        }
    }
    let best = best.expect("reduce_points requires at least one point");
    SweepResult {
        f_max: best.f_max,
        f_maxx: best.f_max,
        f_maxxx: best.f_max,
        argmax: ArgMax {
            time: best.argmax_time,
            tau: Some(best.tau),
            e1: Some(best.e1),
            kicks: Some(best.argmax_kicks),
        },
        delta_vs_unkicked: Some(best.f_max - unkicked_f),
    }
}

/// Maximize over τ (and kicks) at fixed E1.
pub fn fmaxx(grid: &SweepGrid, e1: f64) -> Result<SweepResult> {
    grid.validate()?;
    if grid.tau_values.is_empty() {
        return Err(Error::domain("fmaxx needs a non-empty tau grid"));
    }
    let setup = setup(&grid.model)?;
    let points = surface_points(
        &setup,
        grid.env.as_ref(),
        &grid.tau_values,
        &[e1],
        grid.t_max,
    )?;
    let flat: Vec<SweepPoint> = points.into_iter().flatten().collect();
    let (unkicked, _) = unkicked_scan(&setup, grid.env.as_ref(), grid.t_max, grid.dt_unkicked)?;
    Ok(reduce_points(&flat, unkicked))
}

/// Maximize over E1, τ, and kick count: the top of the hierarchy.
pub fn fmaxxx(grid: &SweepGrid) -> Result<SweepResult> {
    Ok(sweep_surface(grid)?.summary)
}

/// Evaluate the full surface and its reductions. The workhorse behind the
/// CSV/JSON emitters.
pub fn sweep_surface(grid: &SweepGrid) -> Result<SweepSurface> {
    grid.validate()?;
    if grid.tau_values.is_empty() || grid.e1_values.is_empty() {
        return Err(Error::domain("sweep needs non-empty tau and E1 grids"));
    }
    let setup = setup(&grid.model)?;
    let by_e1 = surface_points(
        &setup,
        grid.env.as_ref(),
        &grid.tau_values,
        &grid.e1_values,
        grid.t_max,
    )?;
    let (unkicked_f, unkicked_t) =
        unkicked_scan(&setup, grid.env.as_ref(), grid.t_max, grid.dt_unkicked)?;
    // reorder to row-major (τ outer, E1 inner) for emission
    let mut points = Vec::with_capacity(grid.tau_values.len() * grid.e1_values.len());
    for ti in 0..grid.tau_values.len() {
        for row in &by_e1 {
            points.push(row[ti]);
        }
    }
    let summary = reduce_points(&points, unkicked_f);
    Ok(SweepSurface {
        points,
        unkicked: SweepResult {
            f_max: unkicked_f,
            f_maxx: unkicked_f,
            f_maxxx: unkicked_f,
            argmax: ArgMax {
                time: unkicked_t,
                tau: None,
                e1: None,
                kicks: None,
            },
            delta_vs_unkicked: None,
        },
        summary,
    })
}

/// One impurity strength in a sweep over κ.
#[derive(Debug, Clone)]
pub struct ImpurityPoint {
    pub kappa: f64,
    pub unkicked: SweepResult,
    pub kicked: SweepResult,
}

/// For each κ, embed impurities of `kind` at `sites` into the grid's base
/// chain and report the unkicked f_max alongside the kicked f_maxxx.
pub fn impurity_sweep(
    grid: &SweepGrid,
    kind: ImpurityKind,
    kappa_values: &[f64],
    sites: &[usize],
) -> Result<Vec<ImpurityPoint>> {
    grid.validate()?;
    let base = match &grid.model {
        Model::Multiferroic(spec) => spec.clone(),
        Model::Xxz(_) => {
            return Err(Error::domain("impurity sweeps apply to the multiferroic chain"))
        }
    };
    if kappa_values.iter().any(|&k| !(k >= 1.0)) {
        return Err(Error::domain("impurity strengths must be >= 1"));
    }
    kappa_values
        .iter()
        .map(|&kappa| {
            let mut spec = base.clone();
            for &site in sites {
                spec = spec.with_impurity(&ImpuritySpec {
                    site,
                    kind,
                    strength: kappa,
                })?;
            }
            let sub = SweepGrid {
                model: Model::Multiferroic(spec),
                ..grid.clone()
            };
            let surface = sweep_surface(&sub)?;
            Ok(ImpurityPoint {
                kappa,
                unkicked: surface.unkicked,
                kicked: surface.summary,
            })
        })
        .collect()
}
