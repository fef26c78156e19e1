//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line with the measured numbers.
//!
//! The grid sweeps (criteria 4–7) are compute-heavy: the full suite does
//! several complete (τ, E1) surfaces at N=16 and takes tens of minutes on
//! two cores. Heavy surfaces are computed once and shared between
//! criteria through lazies.

use once_cell::sync::Lazy;
use num_complex::Complex64;

use helichain::checks::{
    continuous_evolution_check, environment_check, kicked_agreement_check, singlet_fraction_check,
};
use helichain::oracle::{full_h0, full_magnetization};
use helichain::{
    build_h0_sector, env_phase_factor, env_phase_factor_general, fmax_unkicked, fmaxx,
    impurity_sweep, initial_state, rho_out, singlet_fraction, singlet_fraction_env, sweep_surface,
    ChainSpec, EnvironmentSpec, ImpurityKind, ImpuritySpec, Model, SectorBasis,
    SpectralDecomposition, SweepGrid, SweepSurface, XxzSpec,
};

fn default_grid(model: Model) -> SweepGrid {
    SweepGrid::new(model)
}

static N10_SURFACE: Lazy<SweepSurface> = Lazy::new(|| {
    sweep_surface(&default_grid(Model::Multiferroic(ChainSpec::new(10)))).unwrap()
});

static N16_SURFACE: Lazy<SweepSurface> = Lazy::new(|| {
    sweep_surface(&default_grid(Model::Multiferroic(ChainSpec::new(16)))).unwrap()
});

fn times(count: usize, t_max: f64) -> Vec<f64> {
    (1..=count).map(|k| t_max * k as f64 / count as f64).collect()
}

#[test]
fn criterion_1_oracle_equivalence() {
    let times100 = times(100, 50.0);
    let mut worst: f64 = 0.0;
    for n in [4usize, 6, 8] {
        let clean = ChainSpec::new(n);
        let impure = ChainSpec::new(n)
            .with_impurity(&ImpuritySpec {
                site: 2,
                kind: ImpurityKind::TypeI,
                strength: 1.4,
            })
            .unwrap();

        for (spec, label) in [(&clean, "clean"), (&impure, "TypeI k=1.4")] {
            let evo = continuous_evolution_check(spec, &times100, label).unwrap();
            assert!(evo.passed(), "N={n} {label} evolution residual {:.3e}", evo.residual);
            let sf = singlet_fraction_check(spec, &times100, label).unwrap();
            assert!(sf.passed(), "N={n} {label} f residual {:.3e}", sf.residual);
            worst = worst.max(evo.residual).max(sf.residual);
        }

        // kicked: tau = 0.1, E1 = 0.1, 100 samples spanning t in (0, 50]
        let samples: Vec<usize> = (1..=100).map(|k| 5 * k).collect();
        let kicked =
            kicked_agreement_check(&clean, 0.1, 0.1, 0.1, &samples, "kicked").unwrap();
        assert!(kicked.passed(), "N={n} kicked residual {:.3e}", kicked.residual);
        worst = worst.max(kicked.residual);
    }

    let env = EnvironmentSpec::new(4, 0.3).unwrap();
    let bath = environment_check(&ChainSpec::new(6), &env, &times100, "bath").unwrap();
    assert!(bath.passed(), "bath residual {:.3e}", bath.residual);
    worst = worst.max(bath.residual);

    println!(
        "criterion 1 (oracle equivalence, N in {{4,6,8}}, clean/kicked/impure/bath): \
         PASS - worst residual {worst:.3e} < 1e-8"
    );
}

#[test]
fn criterion_2_trivial_anchors() {
    // f(0) = 1/2 and F(0) = 2/3 for every even N in [4, 20]
    let mut worst_f0: f64 = 0.0;
    for n in (4..=20).step_by(2) {
        let basis = SectorBasis::new(n).unwrap();
        let s0 = initial_state(&basis);
        let r = singlet_fraction(&s0, 0.0, 0.0, &basis).unwrap();
        worst_f0 = worst_f0.max((r.f - 0.5).abs()).max((r.fidelity - 2.0 / 3.0).abs());
        assert!((r.f - 0.5).abs() < 1e-12, "f(0) off at N={n}");
        assert!((r.fidelity - 2.0 / 3.0).abs() < 1e-12, "F(0) off at N={n}");
    }

    // rho_out stays trace-1 and PSD along clean, kicked, and bath runs
    let n = 6;
    let basis = SectorBasis::new(n).unwrap();
    let spec = ChainSpec::new(n);
    let decomp = SpectralDecomposition::new(&build_h0_sector(&spec, &basis).unwrap()).unwrap();
    let env = EnvironmentSpec::new(20, 0.7).unwrap();
    let s0 = initial_state(&basis);
    let mut worst_trace: f64 = 0.0;
    let mut min_eig = f64::INFINITY;
    for &t in &times(50, 50.0) {
        let state = decomp.evolve(&s0, t);
        for env_opt in [None, Some(&env)] {
            let rho = rho_out(&state, decomp.vacuum_energy(), t, &basis, env_opt).unwrap();
            let trace: f64 = (0..4).map(|i| rho[(i, i)].re).sum();
            worst_trace = worst_trace.max((trace - 1.0).abs());
            let eig = rho.symmetric_eigen();
            min_eig = min_eig.min(eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min));
        }
    }
    assert!(worst_trace < 1e-10, "trace defect {worst_trace:.3e}");
    assert!(min_eig > -1e-10, "rho_out not PSD: {min_eig:.3e}");

    // [M, H] = 0 in the full space, clean and impure
    let mut worst_comm: f64 = 0.0;
    for n in [4usize, 6, 8] {
        for spec in [
            ChainSpec::new(n),
            ChainSpec::new(n)
                .with_impurity(&ImpuritySpec {
                    site: 2,
                    kind: ImpurityKind::TypeII,
                    strength: 1.9,
                })
                .unwrap(),
        ] {
            let h = full_h0(&spec).unwrap();
            let m = full_magnetization(n).unwrap();
            let comm = &h * &m - &m * &h;
            let resid = comm.iter().map(|z: &Complex64| z.norm()).fold(0.0, f64::max);
            worst_comm = worst_comm.max(resid);
            assert!(resid < 1e-12, "[M,H] residual {resid:.3e} at N={n}");
        }
    }

    println!(
        "criterion 2 (trivial anchors): PASS - |f(0)-1/2| <= {worst_f0:.1e}, \
         trace defect <= {worst_trace:.1e}, min eig >= {min_eig:.1e}, [M,H] <= {worst_comm:.1e}"
    );
}

#[test]
fn criterion_3_environment_closed_form() {
    // r(t) = e^{iPgt} to 1e-12 for the all-up bath
    let mut worst: f64 = 0.0;
    for &g in &[0.05, 0.3, 1.0] {
        let env = EnvironmentSpec::new(20, g).unwrap();
        let couplings = vec![g; 20];
        for &t in &times(100, 100.0) {
            let r = env_phase_factor(&env, t);
            let expected = Complex64::from_polar(1.0, 20.0 * g * t);
            worst = worst.max((r - expected).norm());
            let general = env_phase_factor_general(&couplings, &[(0, 1.0)], t).unwrap();
            worst = worst.max((r - general).norm());
        }
    }
    assert!(worst < 1e-12, "closed form residual {worst:.3e}");

    // g = 0 reduces the bath formula to the plain one exactly
    let basis = SectorBasis::new(8).unwrap();
    let spec = ChainSpec::new(8);
    let decomp = SpectralDecomposition::new(&build_h0_sector(&spec, &basis).unwrap()).unwrap();
    let env0 = EnvironmentSpec::new(20, 0.0).unwrap();
    let s0 = initial_state(&basis);
    for &t in &times(50, 80.0) {
        let state = decomp.evolve(&s0, t);
        let plain = singlet_fraction(&state, decomp.vacuum_energy(), t, &basis).unwrap();
        let bathed =
            singlet_fraction_env(&state, decomp.vacuum_energy(), t, &basis, &env0).unwrap();
        assert_eq!(plain.f, bathed.f, "g=0 reduction must be exact at t={t}");
        assert_eq!(plain.fidelity, bathed.fidelity);
    }

    println!(
        "criterion 3 (environment closed form): PASS - |r - e^(iPgt)| <= {worst:.1e}, \
         g=0 reduction exact"
    );
}

#[test]
fn criterion_4_clean_sweep_numbers() {
    let n10 = N10_SURFACE.summary.f_maxxx;
    let n16 = N16_SURFACE.summary.f_maxxx;
    let ok10 = n10 >= 0.74;
    let ok16 = n16 >= 0.68;
    println!(
        "criterion 4 (clean sweeps, default grids, t_max=1000): {} - \
         N=10 f_maxxx = {n10:.4} (need >= 0.74, paper 0.7552); \
         N=16 f_maxxx = {n16:.4} (need >= 0.68, paper 0.6922)",
        if ok10 && ok16 { "PASS" } else { "FAIL" }
    );
    assert!(ok10, "N=10 f_maxxx = {n10:.4} < 0.74");
    assert!(ok16, "N=16 f_maxxx = {n16:.4} < 0.68");
}

#[test]
fn criterion_5_models_comparison() {
    let xxz_grid = |jz: f64| SweepGrid {
        model: Model::Xxz(XxzSpec {
            n_sites: 10,
            jx: 1.0,
            jz,
        }),
        env: None,
        t_max: 1000.0,
        dt_unkicked: 0.05,
        tau_values: vec![1.0],
        e1_values: vec![1.0],
    };

    let xx = fmax_unkicked(&xxz_grid(0.0)).unwrap().f_max;
    let xx_ok = (xx - 0.70).abs() <= 0.02;

    let jz_grid = [0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.5, 2.0];
    let mut xxz_best = f64::NEG_INFINITY;
    let mut xxz_ok = true;
    let mut xxz_values = Vec::new();
    for &jz in &jz_grid {
        let f = fmax_unkicked(&xxz_grid(jz)).unwrap().f_max;
        xxz_best = xxz_best.max(f);
        xxz_ok &= (0.55..=0.67).contains(&f);
        xxz_values.push(format!("{jz}:{f:.4}"));
    }

    let mf = N10_SURFACE.summary.f_maxxx;
    let exceeds = mf > xx && mf > xxz_best;

    let all_ok = xx_ok && xxz_ok && exceeds;
    println!(
        "criterion 5 (models comparison, N=10): {} - \
         XX f_max = {xx:.4} (need 0.70 +/- 0.02) -> {}; \
         XXZ f_max in [0.55, 0.67] across jz/jx {{{}}} -> {}; \
         multiferroic f_maxxx = {mf:.4} exceeds both -> {}",
        if all_ok { "PASS" } else { "FAIL" },
        if xx_ok { "ok" } else { "FAIL" },
        xxz_values.join(", "),
        if xxz_ok { "ok" } else { "FAIL" },
        if exceeds { "ok" } else { "FAIL" },
    );
    assert!(
        xx_ok,
        "XX f_max = {xx:.4} outside 0.70 +/- 0.02 at t_max=1000, dt=0.05"
    );
    assert!(xxz_ok, "XXZ band violated: {}", xxz_values.join(", "));
    assert!(exceeds, "multiferroic {mf:.4} does not exceed XX {xx:.4} / XXZ {xxz_best:.4}");
}

#[test]
fn criterion_6_impurity_numbers() {
    let base_grid = default_grid(Model::Multiferroic(ChainSpec::new(16)));

    // paper-number checks at the quoted strengths, full default grids
    let type_i = impurity_sweep(&base_grid, ImpurityKind::TypeI, &[1.4], &[4, 13]).unwrap();
    let f_i = type_i[0].kicked.f_maxxx;
    let ok_i = (f_i - 0.6953).abs() <= 0.03;

    let type_ii = impurity_sweep(&base_grid, ImpurityKind::TypeII, &[1.9], &[4, 13]).unwrap();
    let f_ii = type_ii[0].kicked.f_maxxx;
    let ok_ii = (f_ii - 0.6812).abs() <= 0.03;

    // qualitative claims over a strength grid; the kicked side may use a
    // coarse grid (a subgrid maximum already witnesses kicked >= unkicked)
    let kappas = [1.0, 1.2, 1.4, 1.6, 1.9];
    let coarse = SweepGrid {
        tau_values: (1..=20).map(|k| k as f64 * 0.1).collect(),
        e1_values: (1..=20).map(|k| k as f64 * 0.25).collect(),
        ..base_grid.clone()
    };
    let scan_i = impurity_sweep(&coarse, ImpurityKind::TypeI, &kappas, &[4, 13]).unwrap();
    let scan_ii = impurity_sweep(&coarse, ImpurityKind::TypeII, &kappas, &[4, 13]).unwrap();

    let spread = |points: &[helichain::ImpurityPoint]| {
        let max = points.iter().map(|p| p.unkicked.f_max).fold(f64::MIN, f64::max);
        let min = points.iter().map(|p| p.unkicked.f_max).fold(f64::MAX, f64::min);
        max - min
    };
    let spread_i = spread(&scan_i);
    let spread_ii = spread(&scan_ii);
    let spread_ok = spread_i > spread_ii;

    let mut kicked_wins = true;
    for p in scan_i.iter().chain(&scan_ii) {
        kicked_wins &= p.kicked.f_maxxx >= p.unkicked.f_max;
    }

    let all_ok = ok_i && ok_ii && spread_ok && kicked_wins;
    println!(
        "criterion 6 (impurities, N=16, sites 4&13): {} - \
         TypeI k=1.4 f_maxxx = {f_i:.4} (need 0.6953 +/- 0.03) -> {}; \
         TypeII k=1.9 f_maxxx = {f_ii:.4} (need 0.6812 +/- 0.03) -> {}; \
         unkicked spread TypeI {spread_i:.4} > TypeII {spread_ii:.4} -> {}; \
         kicked >= unkicked for every kappa -> {}",
        if all_ok { "PASS" } else { "FAIL" },
        if ok_i { "ok" } else { "FAIL" },
        if ok_ii { "ok" } else { "FAIL" },
        if spread_ok { "ok" } else { "FAIL" },
        if kicked_wins { "ok" } else { "FAIL" },
    );
    assert!(ok_i, "TypeI k=1.4 f_maxxx = {f_i:.4} outside 0.6953 +/- 0.03");
    assert!(ok_ii, "TypeII k=1.9 f_maxxx = {f_ii:.4} outside 0.6812 +/- 0.03");
    assert!(spread_ok, "TypeI spread {spread_i:.4} <= TypeII spread {spread_ii:.4}");
    assert!(kicked_wins, "kicking failed to mitigate some impurity strength");
}

// Not a numbered criterion: documented sweep behaviours that ride on the
// surfaces the criteria already compute.
#[test]
fn op_examples_kick_gain_shrinks_with_chain_length() {
    // the shorter chain gains more from kicking, and more so at large E1
    let gain10 = N10_SURFACE.summary.f_maxxx - N10_SURFACE.unkicked.f_max;
    let gain16 = N16_SURFACE.summary.f_maxxx - N16_SURFACE.unkicked.f_max;
    assert!(
        gain10 > gain16,
        "kick gain should shrink with length: N10 {gain10:.4} vs N16 {gain16:.4}"
    );
    let top_e1_gain = |surface: &SweepSurface, n_e1: usize| {
        let top: f64 = surface
            .points
            .iter()
            .skip(n_e1 - 1)
            .step_by(n_e1)
            .fold(f64::NEG_INFINITY, |acc, p| acc.max(p.f_max));
        top - surface.unkicked.f_max
    };
    let n_e1 = 500;
    assert!(
        top_e1_gain(&N10_SURFACE, n_e1) > top_e1_gain(&N16_SURFACE, n_e1),
        "the length contrast should persist at the top kick amplitude"
    );

    // even a small kick amplitude lifts f_maxx above the zero-drive limit
    let grid = SweepGrid::new(Model::Multiferroic(ChainSpec::new(10)));
    let onset = fmaxx(&grid, 0.05).unwrap().f_maxx;
    let zero_drive = fmaxx(&grid, 0.0).unwrap().f_maxx;
    assert!(
        onset > zero_drive,
        "E1 = 0.05 should already beat the unkicked stroboscopic maximum \
         ({onset:.4} vs {zero_drive:.4})"
    );
    println!(
        "op examples (sweep): PASS - gains N10 {gain10:.4} > N16 {gain16:.4}, \
         small-E1 onset {onset:.4} > {zero_drive:.4}"
    );
}

#[test]
fn criterion_7_kicking_gain() {
    // max over the grid of the gain vs the unkicked chain
    let gain = N16_SURFACE.summary.f_maxxx - N16_SURFACE.unkicked.f_max;
    let gain_ok = (0.05..=0.15).contains(&gain);

    // bath insensitivity of the gain at the canonical kick amplitude
    // E1 = 0.1 (the E0/0.1 value the time-series figures use)
    let e1 = 0.1;
    let delta = |g: f64| {
        let mut grid = default_grid(Model::Multiferroic(ChainSpec::new(16)));
        if g != 0.0 {
            grid = grid.with_env(EnvironmentSpec::new(20, g).unwrap());
        }
        fmaxx(&grid, e1).unwrap().delta_vs_unkicked.unwrap()
    };
    let delta0 = delta(0.0);
    let mut bath_ok = true;
    let mut details = Vec::new();
    for &g in &[0.05, 0.1, 1.0] {
        let d = delta(g);
        bath_ok &= (d - delta0).abs() < 0.05;
        details.push(format!("g={g}: {d:.4}"));
    }

    let all_ok = gain_ok && bath_ok;
    println!(
        "criterion 7 (kicking gain, N=16): {} - max gain = {gain:.4} (need in [0.05, 0.15]); \
         delta_f_maxx(0) = {delta0:.4}, {{{}}}, all within 0.05 of g=0 -> {}",
        if all_ok { "PASS" } else { "FAIL" },
        details.join(", "),
        if bath_ok { "ok" } else { "FAIL" },
    );
    assert!(gain_ok, "kicking gain {gain:.4} outside [0.05, 0.15]");
    assert!(bath_ok, "bath shifts delta_f_maxx by >= 0.05");
}
