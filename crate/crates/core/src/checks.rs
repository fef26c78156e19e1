//! Cross-validation of the sector fast path against the full-space oracle.
//!
//! Each check compares two independently built routes to the same quantity
//! and reports the worst residual with its tolerance. The standard suite
//! covers matrix assembly, continuous and kicked evolution, the singlet
//! fraction with and without a bath, and the reduced end-pair state, at
//! chain lengths small enough for the dense oracle.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::basis::SectorBasis;
use crate::error::Result;
use crate::hamiltonian::{
    build_chirality_sector, build_h0_sector, build_xxz_sector, ChainSpec, ImpurityKind,
    ImpuritySpec, XxzSpec,
};
use crate::metrics::{
    env_phase_factor, rho_out, singlet_fraction, singlet_fraction_env, EnvironmentSpec,
};
use crate::oracle::{
    apply_unitary, end_pair_density, full_chirality, full_h0, full_hamiltonian,
    full_magnetization, full_xxz, joint_initial_state, oracle_singlet_fraction,
    project_operator, project_to_sector, protocol_initial_state, FullPropagator,
};
use crate::propagator::{initial_state, kick_operator, KickedWalker, SpectralDecomposition};

/// Outcome of one residual check.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.residual.is_finite() && self.residual < self.tolerance
    }
}

fn report(name: impl Into<String>, residual: f64, tolerance: f64) -> CheckReport {
    CheckReport {
        name: name.into(),
        residual,
        tolerance,
    }
}

fn max_entry(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn sample_times(count: usize, t_max: f64) -> Vec<f64> {
    (1..=count).map(|k| t_max * k as f64 / count as f64).collect()
}

/// Matrix-assembly agreement for one chain length: every sector builder
/// against the projected full-space operator, plus the magnetization
/// commutator.
pub fn assembly_checks(n: usize) -> Result<Vec<CheckReport>> {
    let basis = SectorBasis::new(n)?;
    let clean = ChainSpec::new(n);
    let impure = ChainSpec::new(n).with_impurity(&ImpuritySpec {
        site: 2,
        kind: ImpurityKind::TypeI,
        strength: 1.4,
    })?;
    let xxz = XxzSpec {
        n_sites: n,
        jx: 1.0,
        jz: 0.5,
    };

    let mut out = Vec::new();
    let h_resid = max_entry(
        &(build_h0_sector(&clean, &basis)? - project_operator(&full_h0(&clean)?, &basis)?),
    );
    out.push(report(format!("H0 sector vs projection (N={n})"), h_resid, 1e-12));

    let d_resid = max_entry(
        &(build_chirality_sector(&clean, &basis)?
            - project_operator(&full_chirality(n)?, &basis)?),
    );
    out.push(report(
        format!("chirality sector vs projection (N={n})"),
        d_resid,
        1e-12,
    ));

    let x_resid = max_entry(
        &(build_xxz_sector(&xxz, &basis)? - project_operator(&full_xxz(&xxz)?, &basis)?),
    );
    out.push(report(
        format!("XXZ sector vs projection (N={n}, jz/jx=0.5)"),
        x_resid,
        1e-12,
    ));

    let i_resid = max_entry(
        &(build_h0_sector(&impure, &basis)? - project_operator(&full_h0(&impure)?, &basis)?),
    );
    out.push(report(
        format!("impure H0 sector vs projection (N={n}, TypeI k=1.4)"),
        i_resid,
        1e-12,
    ));

    let h_full = full_h0(&clean)?;
    let m_full = full_magnetization(n)?;
    let comm = &h_full * &m_full - &m_full * &h_full;
    out.push(report(
        format!("[M, H] commutator (N={n})"),
        max_entry(&comm),
        1e-12,
    ));

    Ok(out)
}

/// Continuous-evolution agreement: sector states against projected
/// full-space states over `times`.
pub fn continuous_evolution_check(
    spec: &ChainSpec,
    times: &[f64],
    label: &str,
) -> Result<CheckReport> {
    let basis = SectorBasis::new(spec.n_sites)?;
    let decomp = SpectralDecomposition::new(&build_h0_sector(spec, &basis)?)?;
    let prop = FullPropagator::new(&full_h0(spec)?)?;
    let s0 = initial_state(&basis);
    let f0 = protocol_initial_state(spec.n_sites)?;
    let mut worst: f64 = 0.0;
    for &t in times {
        let sector = decomp.evolve(&s0, t);
        let projected = project_to_sector(&prop.evolve(&f0, t)?, &basis)?;
        worst = worst.max((sector.amplitudes() - projected).norm());
    }
    Ok(report(label, worst, 1e-8))
}

/// Kicked-evolution and singlet-fraction agreement between the sector
/// Floquet walk and the full-space one. The kick amplitudes for the two
/// routes are separate arguments so a deliberately corrupted drive can be
/// used as a negative control.
pub fn kicked_agreement_check(
    spec: &ChainSpec,
    tau: f64,
    e1_sector: f64,
    e1_full: f64,
    kick_samples: &[usize],
    label: &str,
) -> Result<CheckReport> {
    let basis = SectorBasis::new(spec.n_sites)?;
    let decomp = SpectralDecomposition::new(&build_h0_sector(spec, &basis)?)?;
    let chi = build_chirality_sector(spec, &basis)?;
    let u0 = decomp.propagator(tau);
    let u1 = kick_operator(&chi, e1_sector)?;
    let mut walker = KickedWalker::new(&u0, &u1, &initial_state(&basis))?;

    let full_prop = FullPropagator::new(&full_h0(spec)?)?;
    let u0_full = full_prop.unitary(tau);
    let u1_full = FullPropagator::new(&full_chirality(spec.n_sites)?)?.unitary(e1_full);
    let mut full = protocol_initial_state(spec.n_sites)?;

    let mut worst: f64 = 0.0;
    let last = *kick_samples.iter().max().unwrap_or(&0);
    for r in 1..=last {
        walker.step();
        full = apply_unitary(&u1_full, &apply_unitary(&u0_full, &full)?)?;
        if kick_samples.contains(&r) {
            let projected = project_to_sector(&full, &basis)?;
            worst = worst.max((walker.amplitudes() - projected).norm());

            let t = tau * r as f64;
            let f_sector =
                singlet_fraction(&walker.state(), decomp.vacuum_energy(), t, &basis)?.f;
            let f_oracle = oracle_singlet_fraction(&full, spec.n_sites)?;
            worst = worst.max((f_sector - f_oracle).abs());
        }
    }
    Ok(report(label, worst, 1e-8))
}

/// Formula-path singlet fraction and end-pair density against the oracle's
/// explicit partial traces, continuous evolution.
pub fn singlet_fraction_check(spec: &ChainSpec, times: &[f64], label: &str) -> Result<CheckReport> {
    let basis = SectorBasis::new(spec.n_sites)?;
    let decomp = SpectralDecomposition::new(&build_h0_sector(spec, &basis)?)?;
    let prop = FullPropagator::new(&full_h0(spec)?)?;
    let s0 = initial_state(&basis);
    let f0 = protocol_initial_state(spec.n_sites)?;
    let mut worst: f64 = 0.0;
    for &t in times {
        let sector = decomp.evolve(&s0, t);
        let full = prop.evolve(&f0, t)?;
        let f_formula = singlet_fraction(&sector, decomp.vacuum_energy(), t, &basis)?.f;
        let f_oracle = oracle_singlet_fraction(&full, spec.n_sites)?;
        worst = worst.max((f_formula - f_oracle).abs());

        let rho_formula = rho_out(&sector, decomp.vacuum_energy(), t, &basis, None)?;
        let rho_oracle = end_pair_density(&full, spec.n_sites)?;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((rho_formula[(i, j)] - rho_oracle[(i, j)]).norm());
            }
        }
    }
    Ok(report(label, worst, 1e-8))
}

/// End-to-end bath validation: the closed-form dephasing factor inside the
/// sector formula against the joint chain+bath simulation with explicit
/// traces over the bath and the interior.
pub fn environment_check(
    spec: &ChainSpec,
    env: &EnvironmentSpec,
    times: &[f64],
    label: &str,
) -> Result<CheckReport> {
    let basis = SectorBasis::new(spec.n_sites)?;
    let decomp = SpectralDecomposition::new(&build_h0_sector(spec, &basis)?)?;
    let s0 = initial_state(&basis);
    let joint_prop = FullPropagator::new(&full_hamiltonian(spec, Some(env))?)?;
    let joint0 = joint_initial_state(spec.n_sites, env.p_sites)?;
    let mut worst: f64 = 0.0;
    for &t in times {
        let sector = decomp.evolve(&s0, t);
        let f_formula =
            singlet_fraction_env(&sector, decomp.vacuum_energy(), t, &basis, env)?.f;
        let joint = joint_prop.evolve(&joint0, t)?;
        let f_oracle = oracle_singlet_fraction(&joint, spec.n_sites)?;
        worst = worst.max((f_formula - f_oracle).abs());
    }
    Ok(report(label, worst, 1e-8))
}

/// A bath with g = 0 must be inert: the bath-aware singlet fraction
/// reduces to the plain one exactly, not just to tolerance.
pub fn inert_bath_check(spec: &ChainSpec, times: &[f64]) -> Result<CheckReport> {
    let basis = SectorBasis::new(spec.n_sites)?;
    let decomp = SpectralDecomposition::new(&build_h0_sector(spec, &basis)?)?;
    let s0 = initial_state(&basis);
    let env = EnvironmentSpec::new(20, 0.0)?;
    let mut worst: f64 = 0.0;
    for &t in times {
        let state = decomp.evolve(&s0, t);
        let plain = singlet_fraction(&state, decomp.vacuum_energy(), t, &basis)?;
        let bathy = singlet_fraction_env(&state, decomp.vacuum_energy(), t, &basis, &env)?;
        worst = worst.max((plain.f - bathy.f).abs());
    }
    Ok(report(
        format!("inert bath reduction (N={}, g=0)", spec.n_sites),
        worst,
        1e-15,
    ))
}

/// The closed form r(t) = e^{iPgt} for the all-up uniform bath, against
/// the general diagonal-ensemble expression restricted to that bath.
pub fn dephasing_closed_form_check(p_sites: usize, g: f64, times: &[f64]) -> Result<CheckReport> {
    let env = EnvironmentSpec::new(p_sites, g)?;
    let couplings = vec![g; p_sites];
    let mut worst: f64 = 0.0;
    for &t in times {
        let closed = env_phase_factor(&env, t);
        let general = crate::metrics::env_phase_factor_general(&couplings, &[(0, 1.0)], t)?;
        worst = worst.max((closed - general).norm());
        worst = worst.max((closed.norm() - 1.0).abs());
    }
    Ok(report(
        format!("dephasing closed form vs general ensemble (P={p_sites}, g={g})"),
        worst,
        1e-12,
    ))
}

/// The full standard suite: assembly, evolution, metrics, and bath checks
/// at N ∈ {4, 6, 8}, with the joint-bath validation at N=6, P=4.
pub fn standard_suite() -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let times = sample_times(20, 50.0);
    for n in [4usize, 6, 8] {
        out.extend(assembly_checks(n)?);
        let clean = ChainSpec::new(n);
        out.push(continuous_evolution_check(
            &clean,
            &times,
            &format!("continuous evolution agreement (N={n})"),
        )?);
        out.push(singlet_fraction_check(
            &clean,
            &times,
            &format!("singlet fraction vs partial trace (N={n})"),
        )?);
        let impure = ChainSpec::new(n).with_impurity(&ImpuritySpec {
            site: 2,
            kind: ImpurityKind::TypeI,
            strength: 1.4,
        })?;
        out.push(singlet_fraction_check(
            &impure,
            &times,
            &format!("impure singlet fraction vs partial trace (N={n}, TypeI k=1.4)"),
        )?);
        let kick_samples: Vec<usize> = (1..=10).map(|k| k * 50).collect();
        out.push(kicked_agreement_check(
            &clean,
            0.1,
            0.1,
            0.1,
            &kick_samples,
            &format!("kicked evolution agreement (N={n}, tau=0.1, E1=0.1)"),
        )?);
    }
    let env = EnvironmentSpec::new(4, 0.3)?;
    out.push(environment_check(
        &ChainSpec::new(6),
        &env,
        &times,
        "joint-bath singlet fraction agreement (N=6, P=4, g=0.3)",
    )?);
    out.push(inert_bath_check(&ChainSpec::new(6), &times)?);
    out.push(dephasing_closed_form_check(20, 0.05, &times)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_suite_passes() {
        for check in standard_suite().unwrap() {
            assert!(
                check.passed(),
                "{}: residual {:.3e} exceeds {:.1e}",
                check.name,
                check.residual,
                check.tolerance
            );
        }
    }

    #[test]
    fn corrupted_kick_sign_fails_the_agreement_check() {
        // negative control: flip the kick sign on the full-space side only
        let spec = ChainSpec::new(6);
        let samples: Vec<usize> = (1..=5).map(|k| k * 20).collect();
        let check = kicked_agreement_check(
            &spec,
            0.1,
            0.1,
            -0.1,
            &samples,
            "corrupted kick sign (negative control)",
        )
        .unwrap();
        assert!(
            !check.passed(),
            "sign corruption must be caught, residual {:.3e}",
            check.residual
        );
    }
}
