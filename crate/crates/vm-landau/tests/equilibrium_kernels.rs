//! Equilibrium construction and reduced-kernel tests, with the closed forms
//! and high-precision reference values as independent oracles.

mod common;

use common::{maxwellian, maxwellian_table, powerlaw, powerlaw_table};
use num_complex::Complex64 as C64;
use vm_landau::equilibrium::{build_equilibrium, tau0_sq, EquilibriumSpec, Kind};
use vm_landau::kernels::{self, KernelTable};

const PI: f64 = std::f64::consts::PI;

// Reference values computed once with a 30-digit independent quadrature
// (velocity-space route of tau0^2 and the closed-form kernel moments).
const TAU0_SQ_MAXWELLIAN: f64 = 0.451_510_268_827_105_1;
const TAU1_SQ_MAXWELLIAN: f64 = 0.202_877_814_245_131_2;
const TAU0_SQ_POWERLAW: f64 = 0.689_839_837_994_077_6;
const KAPPA0_SQ_POWERLAW: f64 = 1.034_759_756_991_116_3; // 1024/(315 pi)

#[test]
fn tau0_velocity_route_matches_reference() {
    let v = tau0_sq(maxwellian()).unwrap();
    assert!((v - TAU0_SQ_MAXWELLIAN).abs() < 1e-12, "{v}");
    let p = tau0_sq(powerlaw()).unwrap();
    assert!((p - TAU0_SQ_POWERLAW).abs() < 1e-12, "{p}");
}

#[test]
fn tau0_scales_linearly_in_mass() {
    let eq2 = build_equilibrium(&EquilibriumSpec::maxwellian(2.0)).unwrap();
    let t1 = tau0_sq(maxwellian()).unwrap();
    let t2 = tau0_sq(&eq2).unwrap();
    assert!((t2 - 2.0 * t1).abs() < 1e-10 * t2);
}

#[test]
fn moment_constants_independent_route() {
    // the equilibrium-level quadrature and the kernel-table sums are
    // independent evaluations of the same moments
    use vm_landau::equilibrium::{kappa0_sq, tau1_sq};
    for (eq, table) in [
        (maxwellian(), maxwellian_table()),
        (powerlaw(), powerlaw_table()),
    ] {
        let t1 = tau1_sq(eq).unwrap();
        let k0 = kappa0_sq(eq).unwrap();
        assert!(t1 > 0.0 && k0 > 0.0);
        assert!((t1 - table.constants.tau1_sq).abs() < 1e-8 * t1);
        assert!((k0 - table.constants.kappa0_sq).abs() < 1e-8 * k0);
        // kappa0^2 = Omega(1): the dispersion module's route
        let omega1 = table.omega_big(1.0).unwrap();
        assert!((k0 - omega1).abs() < 1e-8 * k0);
    }
}

#[test]
fn table_constants_match_references() {
    let mt = maxwellian_table();
    assert!((mt.constants.tau0_sq - TAU0_SQ_MAXWELLIAN).abs() < 1e-12);
    assert!((mt.constants.tau1_sq - TAU1_SQ_MAXWELLIAN).abs() < 1e-12);
    let pt = powerlaw_table();
    assert!((pt.constants.kappa0_sq - KAPPA0_SQ_POWERLAW).abs() < 1e-12);
    assert!(mt.constants.tau1_sq > 0.0 && mt.constants.kappa0_sq > 0.0);
    assert!(pt.constants.tau1_sq > 0.0 && pt.constants.kappa0_sq > 0.0);
    assert!(mt.constants.q0_sq > 0.0 && pt.constants.q0_sq > 0.0);
}

#[test]
fn kernel_evenness_and_sign_at_nodes() {
    for table in [maxwellian_table(), powerlaw_table()] {
        let n = table.nodes.len();
        for i in 0..n / 2 {
            let j = n - 1 - i;
            assert!((table.nodes[i] + table.nodes[j]).abs() < 1e-14);
            assert!(
                (table.kappa_vals[i] - table.kappa_vals[j]).abs()
                    <= 1e-10 * table.kappa_vals[i].abs().max(1e-10)
            );
            assert!(
                (table.q_vals[i] - table.q_vals[j]).abs()
                    <= 1e-10 * table.q_vals[i].abs().max(1e-10)
            );
        }
        assert!(table.kappa_vals.iter().all(|&v| v <= 0.0));
        assert!(table.q_vals.iter().all(|&v| v <= 0.0));
    }
}

#[test]
fn kernels_vanish_at_endpoints() {
    let u = 1.0 - 1e-4;
    for eq in [maxwellian(), powerlaw()] {
        assert!(kernels::kappa(eq, u).unwrap().abs() < 1e-3);
        assert!(kernels::q_kernel(eq, u).unwrap().abs() < 1e-3);
    }
    // q(+-(1-1e-6)) within 1e-8 of zero
    let u = 1.0 - 1e-6;
    for eq in [maxwellian(), powerlaw()] {
        assert!(kernels::q_kernel(eq, u).unwrap().abs() < 1e-8);
        assert!(kernels::q_kernel(eq, -u).unwrap().abs() < 1e-8);
    }
}

#[test]
fn kappa_evenness_pointwise() {
    let u = 0.37;
    for eq in [maxwellian(), powerlaw()] {
        let a = kernels::kappa(eq, u).unwrap();
        let b = kernels::kappa(eq, -u).unwrap();
        assert!((a - b).abs() < 1e-12 * a.abs());
    }
}

#[test]
fn kappa_closed_form_spot_checks() {
    // powerlaw M = 4: kappa = -2 pi M c0 (1-u^2)^{M-1}/(M-1)
    let eq = powerlaw();
    let c0 = eq.norm_constant().unwrap();
    for &u in &[0.0f64, 0.5, 0.9] {
        let expect = -2.0 * PI * 4.0 * c0 * (1.0 - u * u).powi(3) / 3.0;
        let got = kernels::kappa(eq, u).unwrap();
        assert!(((got - expect) / expect).abs() < 1e-10, "u={u}");
    }
    // maxwellian: kappa = -2 pi c (a^2 + 2) exp(-a^2/2)
    let eq = maxwellian();
    let c = eq.norm_constant().unwrap();
    for &u in &[0.0f64, 0.5, 0.9] {
        let a2 = 1.0 / (1.0 - u * u);
        let expect = -2.0 * PI * c * (a2 + 2.0) * (-0.5 * a2).exp();
        let got = kernels::kappa(eq, u).unwrap();
        assert!(((got - expect) / expect).abs() < 1e-10, "u={u}");
        let qe = -4.0 * PI * (1.0 - u * u) * c * (-0.5 * a2).exp();
        let qg = kernels::q_kernel(eq, u).unwrap();
        assert!(((qg - qe) / qe).abs() < 1e-10, "u={u}");
    }
}

#[test]
fn kernel_domain_errors() {
    assert!(kernels::kappa(maxwellian(), 1.0).is_err());
    assert!(kernels::kappa(maxwellian(), -1.2).is_err());
    assert!(kernels::q_kernel(maxwellian(), 1.0).is_err());
}

#[test]
fn kappa_analytic_restricts_to_real() {
    for eq in [maxwellian(), powerlaw()] {
        let z = C64::new(0.4, 0.0);
        let cont = kernels::kappa_analytic(eq, z).unwrap();
        let real = kernels::kappa(eq, 0.4).unwrap();
        assert!((cont - real).norm() < 1e-12 * real.abs());
    }
}

#[test]
fn kappa_analytic_maxwellian_formula() {
    let eq = maxwellian();
    let c = eq.norm_constant().unwrap();
    let z = C64::new(0.9, 0.1);
    let zeta = 1.0 / (1.0 - z * z);
    let expect = -2.0 * PI * c * (zeta + 2.0) * (-0.5 * zeta).exp();
    let got = kernels::kappa_analytic(eq, z).unwrap();
    assert!((got - expect).norm() < 1e-12 * expect.norm());
}

#[test]
fn kappa_analytic_conjugate_symmetry_lower_half() {
    for eq in [maxwellian(), powerlaw()] {
        let z = C64::new(0.3, -0.4);
        let a = kernels::kappa_analytic(eq, z).unwrap();
        let b = kernels::kappa_analytic(eq, z.conj());
        // conj z is in the upper half here; use the hyperbola-valid point
        assert!(b.is_ok());
        assert!((a.conj() - b.unwrap()).norm() < 1e-12 * a.norm());
    }
}

#[test]
fn kappa_analytic_domain_checks() {
    // outside the holomorphy region: Im z >= 0 with 1 - Re^2 + Im^2 <= 0
    let z = C64::new(1.5, 0.2);
    assert!(kernels::kappa_analytic(maxwellian(), z).is_err());
    // tabulated equilibria are unsupported
    let table: Vec<(f64, f64)> = (0..200)
        .map(|i| {
            let s = 0.95 + i as f64 * 0.05;
            (s, (-0.5 * s * s).exp())
        })
        .collect();
    let spec = EquilibriumSpec {
        kind: Kind::Tabulated,
        n0: 1.0,
        m: None,
        table: Some(table),
    };
    let eq = build_equilibrium(&spec).unwrap();
    assert!(kernels::kappa_analytic(&eq, C64::new(0.2, -0.1)).is_err());
}

#[test]
fn memory_kernels_vanish_at_t0() {
    let table = maxwellian_table();
    for &k in &[0.1, 0.5, 2.0, 7.0] {
        assert_eq!(table.memory_k(k, 0.0).unwrap(), 0.0);
        assert_eq!(table.memory_n(k, 0.0).unwrap(), 0.0);
    }
}

#[test]
fn memory_k_slope_at_origin_is_tau0_sq() {
    let table = maxwellian_table();
    let k = 0.5;
    let h = 1e-4;
    let slope = (table.memory_k(k, h).unwrap() - table.memory_k(k, 0.0).unwrap()) / h;
    assert!(
        (slope - table.constants.tau0_sq).abs() < 1e-6,
        "slope {slope} vs tau0^2 {}",
        table.constants.tau0_sq
    );
}

#[test]
fn memory_n_slope_at_origin() {
    let table = maxwellian_table();
    let k = 0.7;
    // d/dt N_k(0) = (k^2/2) int u^2 q(u) du <= 0
    let mq2: f64 = table
        .nodes
        .iter()
        .zip(&table.weights)
        .zip(&table.q_vals)
        .map(|((u, w), q)| w * u * u * q)
        .sum();
    let expect = 0.5 * k * k * mq2;
    assert!(expect <= 0.0);
    let h = 1e-4;
    let slope = table.memory_n(k, h).unwrap() / h;
    assert!((slope - expect).abs() < 1e-6 * expect.abs().max(1.0));
}

#[test]
fn memory_kernel_envelopes() {
    // |K_k(t)| <= C k^-1 <kt>^-3 and |N_k(t)| <= C k <kt>^-3 with finite C
    let table = maxwellian_table();
    for &k in &[0.3, 1.0, 3.0] {
        let mut ck = 0.0f64;
        let mut cn = 0.0f64;
        let t_max = 200.0 / k;
        for i in 1..=400 {
            let t = t_max * i as f64 / 400.0;
            let w = (1.0 + (k * t) * (k * t)).powf(1.5);
            ck = ck.max(table.memory_k(k, t).unwrap().abs() * k * w);
            cn = cn.max(table.memory_n(k, t).unwrap().abs() / k * w);
        }
        assert!(ck.is_finite() && ck > 0.0, "k={k}: C_K = {ck}");
        assert!(cn.is_finite() && cn > 0.0, "k={k}: C_N = {cn}");
    }
}

#[test]
fn memory_k_small_k_limit() {
    // K is regular at k = 0: K ~ t tau0^2 for small k t
    let table = maxwellian_table();
    let t = 0.3;
    let small = table.memory_k(1e-6, t).unwrap();
    assert!((small - t * table.constants.tau0_sq).abs() < 1e-9);
}

#[test]
fn laplace_k_matches_time_quadrature() {
    // independent oracle: direct trapezoid quadrature of exp(-lambda t) K(t)
    let table = maxwellian_table();
    let k = 1.0;
    let lambda = C64::new(1.0, 0.0);
    let dt = 2e-4;
    let t_max = 60.0;
    let n = (t_max / dt) as usize;
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..=n {
        let t = i as f64 * dt;
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        acc += w * (-lambda * t).exp() * table.memory_k(k, t).unwrap();
    }
    acc *= dt;
    let direct = table.laplace_k(lambda, k).unwrap();
    assert!(
        (acc - direct).norm() < 1e-8,
        "time quadrature {acc}, reduced {direct}"
    );
}

#[test]
fn laplace_k_outer_axis_is_omega_route() {
    let table = maxwellian_table();
    let k = 0.7;
    let tau = 2.0 * k;
    let d = 1.0 + table.laplace_k(C64::new(0.0, tau), k).unwrap();
    let via_omega = 1.0 - table.omega_big(k * k / (tau * tau)).unwrap() / (k * k);
    assert!((d - via_omega).norm() < 1e-12);
}

#[test]
fn laplace_conjugate_symmetry() {
    let table = maxwellian_table();
    let k = 0.8;
    for &(re, im) in &[(0.5, 1.3), (0.01, 0.2), (2.0, -3.0)] {
        let l = C64::new(re, im);
        let a = table.laplace_k(l, k).unwrap();
        let b = table.laplace_k(l.conj(), k).unwrap();
        assert!((a.conj() - b).norm() < 1e-12 * a.norm().max(1e-12));
        let an = table.laplace_n(l, k).unwrap();
        let bn = table.laplace_n(l.conj(), k).unwrap();
        assert!((an.conj() - bn).norm() < 1e-12 * an.norm().max(1e-12));
    }
}

#[test]
fn laplace_route_consistency_random_samples() {
    // 20 pseudo-random (lambda, k) with Re lambda in [0.1, 2]: time quadrature
    // vs reduced integral to 1e-7
    let table = maxwellian_table();
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut rand01 = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..20 {
        let k = 0.2 + 2.0 * rand01();
        let lambda = C64::new(0.1 + 1.9 * rand01(), -2.0 + 4.0 * rand01());
        let direct = table.laplace_k(lambda, k).unwrap();
        // composite Simpson sized to the oscillation frequency
        let t_max = 46.0 / lambda.re;
        let mut n =
            ((t_max * (lambda.im.abs() + k + 2.0) * 10.0).ceil() as usize).clamp(20_000, 600_000);
        if n % 2 == 1 {
            n += 1;
        }
        let dt = t_max / n as f64;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..=n {
            let t = i as f64 * dt;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += w * (-lambda * t).exp() * table.memory_k(k, t).unwrap();
        }
        acc *= dt / 3.0;
        assert!(
            (acc - direct).norm() < 1e-7,
            "k={k}, lambda={lambda}: {acc} vs {direct}"
        );
    }
}

#[test]
fn plemelj_boundary_first_order_convergence() {
    let table = maxwellian_table();
    let k = 0.7;
    let tau = 0.4 * k;
    let boundary = table.laplace_k(C64::new(0.0, tau), k).unwrap();
    let mut prev_err = f64::INFINITY;
    for &gamma in &[1e-2, 1e-3, 1e-4] {
        let v = table.laplace_k(C64::new(gamma, tau), k).unwrap();
        let err = (v - boundary).norm();
        // O(gamma): each decade reduces the error by roughly ten
        assert!(err < prev_err * 0.2, "gamma={gamma}: {err} vs {prev_err}");
        prev_err = err;
    }
}

#[test]
fn tabulated_table_builds_and_matches_maxwellian() {
    // a dense table sampled from the Maxwellian profile reproduces its kernels
    let eqm = maxwellian();
    let table: Vec<(f64, f64)> = (0..2400)
        .map(|i| {
            let s = 0.999 + i as f64 * 0.005;
            (s, eqm.phi(s))
        })
        .collect();
    let spec = EquilibriumSpec {
        kind: Kind::Tabulated,
        n0: 1.0,
        m: None,
        table: Some(table),
    };
    let eq = build_equilibrium(&spec).unwrap();
    assert!(!eq.monotone_warning);
    let t = KernelTable::build(&eq).unwrap();
    let reference = maxwellian_table();
    assert!(
        (t.constants.tau0_sq - reference.constants.tau0_sq).abs() < 1e-6,
        "{} vs {}",
        t.constants.tau0_sq,
        reference.constants.tau0_sq
    );
    let km = kernels::kappa(&eq, 0.5).unwrap();
    let kr = kernels::kappa(eqm, 0.5).unwrap();
    assert!((km - kr).abs() < 1e-6 * kr.abs());
}
