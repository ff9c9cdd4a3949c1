//! Mode solver and kinetic-oracle tests.

mod common;

use common::maxwellian_table;
use num_complex::Complex64 as C64;
use std::sync::Arc;
use std::sync::OnceLock;
use vm_landau::dispersion::Dispersion;
use vm_landau::equilibrium::{build_equilibrium, EquilibriumSpec};
use vm_landau::green::{self, TimeGrid};
use vm_landau::kernels::KernelTable;
use vm_landau::numerics::fftutil::dominant_frequency;
use vm_landau::numerics::quad;
use vm_landau::solver::{self, ModeInitialData, ProfileKind, SeparableData};

/// A near-vacuum equilibrium: kernels are ~1e-20, so the self-consistent
/// coupling is switched off to machine precision.
fn vacuum_table() -> &'static KernelTable {
    static T: OnceLock<KernelTable> = OnceLock::new();
    T.get_or_init(|| {
        let eq = build_equilibrium(&EquilibriumSpec::maxwellian(1e-20)).unwrap();
        KernelTable::build(&eq).unwrap()
    })
}

fn bump_data(table: &KernelTable, k: f64) -> ModeInitialData {
    ModeInitialData::from_profile(table, k, ProfileKind::Bump)
}

#[test]
fn source_at_t0_is_profile_integral() {
    let table = maxwellian_table();
    let data = bump_data(table, 0.7);
    let s0 = solver::source_s(&data, 0.0).unwrap();
    // int (1-u^2)^4 du = 256/315
    assert!((s0.re - 256.0 / 315.0).abs() < 1e-12 && s0.im.abs() < 1e-14);
}

#[test]
fn source_real_for_even_real_profile() {
    let table = maxwellian_table();
    let data = ModeInitialData::from_profile(table, 0.5, ProfileKind::Kappa);
    for &t in &[0.5, 3.0, 40.0, 200.0] {
        let s = solver::source_s(&data, t).unwrap();
        assert!(s.im.abs() < 1e-12, "t={t}: {s}");
    }
}

#[test]
fn source_matches_fft_oracle() {
    // FFT of the sampled profile on a fine uniform grid, compared at the
    // FFT's own frequency lattice: omega_m = pi m / L maps to t = pi m / k
    let table = maxwellian_table();
    let k = 0.5;
    let data = ModeInitialData::from_profile(table, k, ProfileKind::Kappa);
    let n = 1 << 18;
    let du = 2.0 / n as f64;
    let mut buf: Vec<C64> = (0..n)
        .map(|i| {
            let u = -1.0 + (i as f64 + 0.5) * du;
            C64::new(table.kappa_interp(u), 0.0)
        })
        .collect();
    let mut planner = rustfft::FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    // S(t_m) = int kappa(u) e^{-i k t_m u} du with k t_m = pi m:
    // the DFT bin m equals sum kappa(u_j) e^{-2 pi i j m / n}, u_j midpoint grid
    for &m in &[1usize, 5, 20, 101] {
        let t = std::f64::consts::PI * m as f64 / k;
        let s = solver::source_s(&data, t).unwrap();
        // midpoint-grid phase correction: u_j = -1 + (j + 1/2) du
        let phase = C64::new(0.0, std::f64::consts::PI * m as f64 * (1.0 - 0.5 * du)).exp();
        let oracle = buf[m] * du * phase;
        assert!((s - oracle).norm() < 1e-6, "m={m}: {s} vs {oracle}");
    }
}

#[test]
fn forced_volterra_without_kernel_returns_source() {
    // mu = 0 means K = 0 and rho = S exactly
    let n = 2000;
    let kvals = vec![0.0; n];
    let s: Vec<C64> = (0..n).map(|i| C64::new((i as f64 * 0.01).cos(), 0.1)).collect();
    let rho = green::volterra_forced(&kvals, &s, 1e-3);
    for i in 0..n {
        assert_eq!(rho[i], s[i]);
    }
}

#[test]
fn oracle_free_streaming_matches_source() {
    // coupling off (kappa ~ 0): the oracle density is the free source
    let table = vacuum_table();
    let k = 0.8;
    let data = bump_data(table, k);
    let grid = TimeGrid::for_mode(2e-3, 20.0, k, 1.0).unwrap();
    let (rho, _) = solver::kinetic_oracle_elec(table, &data, grid, 512).unwrap();
    let ts = grid.times();
    for (i, &t) in ts.iter().enumerate().step_by(500) {
        let s = solver::source_s(&data, t).unwrap();
        assert!((rho[i] - s).norm() < 1e-9, "t={t}: {} vs {s}", rho[i]);
    }
}

#[test]
fn oracle_oscillator_uncoupled_is_cosine() {
    // A0 = 1, A1 = 0, no current: A(t) = cos(omega t)
    let table = vacuum_table();
    let k = 0.8;
    let omega = (k * k + table.constants.tau0_sq).sqrt();
    let data = ModeInitialData {
        k,
        h0: Arc::new(|_| C64::new(0.0, 0.0)),
        h0_mag: Arc::new(|_| C64::new(0.0, 0.0)),
        a0: C64::new(1.0, 0.0),
        a1: C64::new(0.0, 0.0),
    };
    let dt = 1e-3;
    let grid = TimeGrid::for_mode(dt, 5.0, k, 1.0).unwrap();
    let (a, _) = solver::kinetic_oracle_mag(table, &data, grid, 64).unwrap();
    let mut worst = 0.0f64;
    for (i, v) in a.iter().enumerate() {
        let t = i as f64 * dt;
        worst = worst.max((v.re - (omega * t).cos()).abs());
    }
    assert!(worst < 1e-6, "max error {worst}");
    // energy |A|^2 + |A'|^2/omega^2 conserved at scheme order
    let mut e_min = f64::INFINITY;
    let mut e_max = 0.0f64;
    for i in 1..a.len() - 1 {
        let ap = (a[i + 1] - a[i - 1]) / (2.0 * dt);
        let e = a[i].norm_sqr() + ap.norm_sqr() / (omega * omega);
        e_min = e_min.min(e);
        e_max = e_max.max(e);
    }
    assert!(e_max / e_min < 1.01, "energy ratio {}", e_max / e_min);
}

#[test]
fn solve_a_mode_oscillator_limit() {
    // same uncoupled limit through the Green-function route
    let table = vacuum_table();
    let k = 0.8;
    let omega = (k * k + table.constants.tau0_sq).sqrt();
    let data = ModeInitialData {
        k,
        h0: Arc::new(|_| C64::new(0.0, 0.0)),
        h0_mag: Arc::new(|_| C64::new(0.0, 0.0)),
        a0: C64::new(1.0, 0.0),
        a1: C64::new(0.0, 0.0),
    };
    let dt = 1e-3;
    let grid = TimeGrid::for_mode(dt, 5.0, k, 1.0).unwrap();
    let sol = solver::solve_a_mode(table, &data, grid).unwrap();
    assert!((sol.a[0] - data.a0).norm() < 1e-14);
    let fd = (sol.a[1] - sol.a[0]) / dt;
    assert!((fd - data.a1).norm() < 5.0 * dt, "A'(0) = {fd}");
    let mut worst = 0.0f64;
    for (i, v) in sol.a.iter().enumerate() {
        let t = i as f64 * dt;
        worst = worst.max((v.re - (omega * t).cos()).abs());
    }
    assert!(worst < 1e-6, "max error {worst}");
}

#[test]
fn mode_routes_agree_and_peak_at_langmuir_frequency() {
    let table = maxwellian_table();
    let disp = Dispersion::new(table);
    let k = 0.5;
    let dt = 4e-3;
    let grid = TimeGrid::for_mode(dt, 150.0, k, disp.nu_star(k).unwrap()).unwrap();
    let data = ModeInitialData::from_profile(table, k, ProfileKind::Kappa);
    let sol = solver::solve_phi_mode(table, &data, grid).unwrap();
    assert!(sol.route_discrepancy.unwrap() < 1e-8);
    assert!((sol.rho[0] - sol.s[0]).norm() < 1e-14, "rho(0) = S(0)");
    let (peak, bin) = dominant_frequency(&sol.rho, dt);
    let tau = disp.tau_star(k).unwrap();
    assert!((peak - tau).abs() <= bin, "peak {peak} vs tau_* {tau}");
}

#[test]
fn undamped_mode_oscillates_at_residue_scale() {
    // late-window envelope within [0.1, 10] x 2|a_+| max|S|
    let table = maxwellian_table();
    let disp = Dispersion::new(table);
    let k = 0.5;
    let dt = 4e-3;
    let grid = TimeGrid::for_mode(dt, 200.0, k, disp.nu_star(k).unwrap()).unwrap();
    let data = ModeInitialData::from_profile(table, k, ProfileKind::Kappa);
    let sol = solver::solve_phi_mode(table, &data, grid).unwrap();
    let n = sol.rho.len();
    let late = &sol.rho[(3 * n) / 4..];
    let sup = late.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
    let a = disp.a_plus_closed(k).unwrap().norm();
    let smax = sol.s.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
    let scale = 2.0 * a * smax;
    assert!(
        sup > 0.1 * scale && sup < 10.0 * scale,
        "late sup {sup}, scale {scale}"
    );
}

#[test]
fn landau_damped_mode_envelope_rate() {
    // kappa0 < k < kappa0 + delta: the late envelope decays like
    // exp(Re lambda_+ t), within 20 percent
    let table = maxwellian_table();
    let disp = Dispersion::new(table);
    let k = 1.09 * disp.kappa0();
    let lam = disp.lambda_elec(k).unwrap();
    assert!(lam.re < -1e-5, "need a measurable rate, got {}", lam.re);
    let t_max = (2.0 / lam.re.abs()).min(6000.0);
    let dt = 0.025;
    let grid = TimeGrid::for_mode(dt, t_max, k, disp.nu_star(k).unwrap()).unwrap();
    let data = ModeInitialData::from_profile(table, k, ProfileKind::Kappa);
    let sol = solver::solve_phi_mode(table, &data, grid).unwrap();
    // envelope from block maxima over a few oscillation periods
    let period = 2.0 * std::f64::consts::PI / lam.im.abs();
    let block = (3.0 * period / dt).ceil() as usize;
    let mut ts = Vec::new();
    let mut env = Vec::new();
    let start = (0.2 * t_max / dt) as usize;
    let mut i = start;
    while i + block < sol.rho.len() {
        let m = sol.rho[i..i + block].iter().map(|v| v.norm()).fold(0.0f64, f64::max);
        ts.push((i + block / 2) as f64 * dt);
        env.push(m.max(1e-300).ln());
        i += block;
    }
    let (slope, _, _) = vm_landau::numerics::fit::linfit(&ts, &env);
    let ratio = slope / lam.re;
    assert!(
        (0.8..1.2).contains(&ratio),
        "fitted rate {slope:.3e} vs Re lambda {:.3e} (ratio {ratio:.3})",
        lam.re
    );
}

#[test]
fn magnetic_mode_no_secular_growth() {
    let table = maxwellian_table();
    let disp = Dispersion::new(table);
    let k = 1.0;
    let dt = 2e-3;
    let grid = TimeGrid::for_mode(dt, 200.0, k, disp.nu_star(k).unwrap()).unwrap();
    let data = ModeInitialData::from_profile(table, k, ProfileKind::Kappa);
    let sol = solver::solve_a_mode(table, &data, grid).unwrap();
    let n = sol.a.len();
    let early = sol.a[..n / 4].iter().map(|v| v.norm()).fold(0.0f64, f64::max);
    let late = sol.a[(3 * n) / 4..].iter().map(|v| v.norm()).fold(0.0f64, f64::max);
    assert!(late <= 1.1 * early, "early {early}, late {late}");
    let (peak, bin) = dominant_frequency(&sol.a, dt);
    let nu = disp.nu_star(k).unwrap();
    assert!((peak - nu).abs() <= bin);
}

#[test]
fn recurrence_time_scales_with_velocity_resolution() {
    // past the oscillatory support the density decays, so the velocity-grid
    // rebound is visible; doubling the node count roughly doubles its time
    let table = maxwellian_table();
    let k = 1.5;
    let dt = 0.02;
    let grid = TimeGrid::for_mode(dt, 450.0, k, Dispersion::new(table).nu_star(k).unwrap()).unwrap();
    let data = bump_data(table, k);
    let (_, rec64) = solver::kinetic_oracle_elec(table, &data, grid, 64).unwrap();
    let (_, rec128) = solver::kinetic_oracle_elec(table, &data, grid, 128).unwrap();
    let t64 = rec64.t_detected.expect("recurrence at n_u = 64");
    let t128 = rec128.t_detected.expect("recurrence at n_u = 128");
    let ratio = t128 / t64;
    assert!((1.4..3.0).contains(&ratio), "t64 {t64}, t128 {t128}");
    assert!((rec64.t_predicted - 2.0 * std::f64::consts::PI / (k * (2.0 / 64.0))).abs() < 1e-9);
}

#[test]
fn physical_s_initial_value() {
    // S(0, x) = rho0(x) int chi(<v>) dv
    let data = SeparableData { amp: 1.0, sigma_x: 1.0 };
    let chi_mass = 4.0
        * std::f64::consts::PI
        * quad::integrate(
            |w: f64| (-0.5 * (1.0 + w * w)).exp() * w * w,
            0.0,
            12.0,
            1e-12,
        )
        .unwrap()
        .0;
    let xs = [0.0, 0.5, 1.5];
    let s = solver::physical_s(&data, 0.0, &xs).unwrap();
    for (i, &x) in xs.iter().enumerate() {
        let expect = (-0.5 * x * x).exp() * chi_mass;
        assert!(
            ((s[i] - expect) / expect).abs() < 1e-9,
            "x={x}: {} vs {expect}",
            s[i]
        );
    }
}

#[test]
fn physical_s_rejects_negative_time() {
    let data = SeparableData { amp: 1.0, sigma_x: 1.0 };
    assert!(solver::physical_s(&data, -1.0, &[0.0]).is_err());
}
