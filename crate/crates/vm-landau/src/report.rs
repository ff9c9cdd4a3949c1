//! The acceptance suite: every criterion of the project contract, runnable
//! programmatically (`vm-landau report`) and from the integration tests.

use crate::dispersion::{Dispersion, DispersionFn};
use crate::equilibrium::{build_equilibrium, tau0_routes, Equilibrium, EquilibriumSpec, Kind};
use crate::green::{self, GreenKind, TimeGrid};
use crate::kernels::{self, KernelTable};
use crate::numerics::fit::{loglog_slope, second_differences};
use crate::numerics::fftutil::dominant_frequency;
use crate::solver::{self, ModeInitialData, ProfileKind, SeparableData};
use crate::{C64, Result};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use std::time::Instant;

const PI: f64 = std::f64::consts::PI;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    pub details: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub criteria: Vec<CriterionResult>,
    pub all_pass: bool,
}

fn run<F: FnOnce() -> Result<(bool, String)>>(id: u32, name: &str, f: F) -> CriterionResult {
    let start = Instant::now();
    let (pass, details) = match f() {
        Ok((p, d)) => (p, d),
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult {
        id,
        name: name.to_string(),
        pass,
        details,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Run the full acceptance suite. Criteria that pin an equilibrium use it;
/// the rest run on the configured one (falling back to the Maxwellian when
/// the configuration is not a built-in).
pub fn run_all(spec: &EquilibriumSpec) -> Result<Report> {
    let primary_spec = if spec.kind == Kind::Tabulated {
        EquilibriumSpec::maxwellian(1.0)
    } else {
        spec.clone()
    };
    let primary_eq = build_equilibrium(&primary_spec)?;
    let primary = KernelTable::build(&primary_eq)?;
    let maxwell_eq = build_equilibrium(&EquilibriumSpec::maxwellian(1.0))?;
    let maxwell = KernelTable::build(&maxwell_eq)?;
    let power_eq = build_equilibrium(&EquilibriumSpec::powerlaw(1.0, 4.0))?;
    let power = KernelTable::build(&power_eq)?;

    let criteria = vec![
        run(1, "tau0^2 three-route consistency", c1_tau0),
        run(2, "closed-form kernel checks", c2_closed_forms),
        run(3, "electric dispersion relation", || c3_electric(&primary)),
        run(4, "continuation past kappa0", || c4_continuation(&maxwell, &power)),
        run(5, "magnetic dispersion relation", || c5_magnetic(&primary)),
        run(6, "spectral stability winding numbers", || {
            c6_winding(&maxwell, &power)
        }),
        run(7, "Green-function residues", || c7_residues(&primary)),
        run(8, "time domain vs Bromwich", || c8_bromwich(&primary)),
        run(9, "decay scalings", || c9_decay(&primary)),
        run(10, "oracle equivalence", || c10_oracle(&primary)),
        run(11, "free transport dispersion", c11_free_transport),
        run(12, "scheme convergence order", || c12_convergence(&primary)),
    ];
    let all_pass = criteria.iter().all(|c| c.pass);
    Ok(Report { criteria, all_pass })
}

fn c1_tau0() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for n0 in [0.5, 1.0, 2.0] {
        for spec in [
            EquilibriumSpec::maxwellian(n0),
            EquilibriumSpec::powerlaw(n0, 4.0),
        ] {
            let eq = build_equilibrium(&spec)?;
            let routes = tau0_routes(&eq)?;
            worst = worst.max(routes.relative_spread());
        }
    }
    Ok((worst <= 1e-8, format!("max relative spread {worst:.3e} (tol 1e-8)")))
}

fn closed_kappa(eq: &Equilibrium, u: f64) -> f64 {
    let c = eq.norm_constant().unwrap();
    let a2 = 1.0 / (1.0 - u * u);
    if let Some(m) = eq.powerlaw_exponent() {
        -2.0 * PI * m * c * (1.0 - u * u).powf(m - 1.0) / (m - 1.0)
    } else {
        -2.0 * PI * c * (a2 + 2.0) * (-0.5 * a2).exp()
    }
}

fn closed_q(eq: &Equilibrium, u: f64) -> f64 {
    let c = eq.norm_constant().unwrap();
    let a2 = 1.0 / (1.0 - u * u);
    if let Some(m) = eq.powerlaw_exponent() {
        -2.0 * PI * c * (1.0 - u * u).powf(m) / (m - 1.0)
    } else {
        -4.0 * PI * c * (1.0 - u * u) * (-0.5 * a2).exp()
    }
}

fn c2_closed_forms() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for spec in [
        EquilibriumSpec::maxwellian(1.0),
        EquilibriumSpec::powerlaw(1.0, 4.0),
    ] {
        let eq = build_equilibrium(&spec)?;
        for i in 0..=80 {
            let u = -0.999 + 1.998 * i as f64 / 80.0;
            let kq = kernels::kappa(&eq, u)?;
            let qq = kernels::q_kernel(&eq, u)?;
            let kc = closed_kappa(&eq, u);
            let qc = closed_q(&eq, u);
            worst = worst.max(((kq - kc) / kc).abs());
            worst = worst.max(((qq - qc) / qc).abs());
        }
    }
    Ok((worst <= 1e-8, format!("max relative error {worst:.3e} on u in [-0.999, 0.999] (tol 1e-8)")))
}

fn c3_electric(table: &KernelTable) -> Result<(bool, String)> {
    let disp = Dispersion::new(table);
    let kappa0 = disp.kappa0();
    let tau0 = table.tau0();
    let tau1_sq = table.constants.tau1_sq;
    let mut pass = true;
    let mut notes = Vec::new();

    // 64-point grid: root residual, monotonicity, bounds
    let mut worst_res = 0.0f64;
    let mut prev = tau0;
    let mut monotone = true;
    let mut bounds = true;
    for i in 1..=64 {
        let k = kappa0 * i as f64 / 64.0;
        let tau = disp.tau_star(k)?;
        let d_route = disp.d_eval(C64::new(0.0, tau), k)?.norm();
        // independent rational-sum route on the same table: D = 1 + L[K]
        let mut lk = 0.0;
        for (j, &u) in table.nodes.iter().enumerate() {
            lk -= table.weights[j] * u * u * table.kappa_vals[j] / (k * k * u * u - tau * tau);
        }
        let d_raw = (1.0 + lk).abs();
        worst_res = worst_res.max(d_route.max(d_raw));
        if tau <= prev {
            monotone = false;
        }
        prev = tau;
        if i < 64 {
            let upper = (tau0 * tau0 + k * k).sqrt();
            if !(tau > tau0 && tau < kappa0 && tau > k && tau < upper) {
                bounds = false;
            }
        }
    }
    pass &= worst_res <= 1e-10 && monotone && bounds;
    notes.push(format!(
        "root residual {worst_res:.3e} (tol 1e-10), monotone {monotone}, bounds {bounds}"
    ));

    // endpoints
    let end0 = (disp.tau_star(1e-8)? - tau0).abs();
    let end1 = (disp.tau_star(kappa0)? - kappa0).abs();
    pass &= end0 <= 1e-8 && end1 <= 1e-8;
    notes.push(format!("tau_*(0)-tau0 = {end0:.3e}, tau_*(kappa0)-kappa0 = {end1:.3e} (tol 1e-8)"));

    // small-k expansion: residual slope 4 +/- 0.2
    let mut ks = Vec::new();
    let mut rs = Vec::new();
    for i in 0..20 {
        let k = 1e-3 * (1e-1f64 / 1e-3).powf(i as f64 / 19.0);
        let r = disp.tau_star(k)? - tau0 - tau1_sq * k * k / (2.0 * tau0.powi(3));
        if r.abs() > 1e-14 {
            ks.push(k);
            rs.push(r.abs());
        }
    }
    let (slope, _, r2) = loglog_slope(&ks, &rs);
    pass &= (slope - 4.0).abs() <= 0.2;
    notes.push(format!("small-k residual slope {slope:.3} (target 4 +/- 0.2, r2 {r2:.4})"));

    Ok((pass, notes.join("; ")))
}

fn c4_continuation(maxwell: &KernelTable, power: &KernelTable) -> Result<(bool, String)> {
    let mut pass = true;
    let mut notes = Vec::new();
    for (label, table) in [("maxwellian", maxwell), ("powerlaw", power)] {
        let disp = Dispersion::new(table);
        let kappa0 = disp.kappa0();
        let delta = disp.default_delta();
        // Re lambda_+ < 0 past the threshold
        let mut all_neg = true;
        let mut max_re = f64::NEG_INFINITY;
        for j in 1..=16 {
            let k = kappa0 + delta * j as f64 / 16.0;
            let lam = disp.lambda_elec(k)?;
            max_re = max_re.max(lam.re);
            if lam.re >= 0.0 {
                all_neg = false;
            }
        }
        // branch continuity at kappa0
        let h = 1e-7 * kappa0;
        let below = disp.lambda_elec(kappa0 - h)?;
        let above = disp.lambda_elec(kappa0 + h)?;
        let jump = (below - above).norm();
        pass &= all_neg && jump <= 1e-6;
        notes.push(format!(
            "{label}: Re lambda_+ < 0 on (kappa0, kappa0+delta] {all_neg} (max {max_re:.3e}), continuity jump {jump:.3e} (tol 1e-6)"
        ));
    }
    // Maxwellian near-threshold flatness: log-log slope >= 4. Re lambda_+
    // vanishes beyond all orders here, so the usable window is where it is
    // still representable; the imaginary part of the root is carried with
    // relative accuracy at any magnitude.
    let disp = Dispersion::new(maxwell);
    let kappa0 = disp.kappa0();
    let mut dks = Vec::new();
    let mut res = Vec::new();
    for i in 0..10 {
        let dk = kappa0 * (0.015 + (0.035 - 0.015) * i as f64 / 9.0);
        let lam = disp.lambda_elec(kappa0 + dk)?;
        if lam.re < 0.0 && lam.re.is_finite() && lam.re > -1.0 {
            dks.push(dk);
            res.push(-lam.re);
        }
    }
    if dks.len() < 4 {
        pass = false;
        notes.push("near-threshold window has too few resolvable points".into());
    } else {
        let (slope, _, _) = loglog_slope(&dks, &res);
        pass &= slope >= 4.0;
        notes.push(format!("maxwellian |Re lambda_+| flatness slope {slope:.2} (>= 4)"));
    }
    Ok((pass, notes.join("; ")))
}

fn c5_magnetic(table: &KernelTable) -> Result<(bool, String)> {
    let disp = Dispersion::new(table);
    let tau0 = table.tau0();
    let n = 256;
    let kmax = 50.0;
    let dk = kmax / n as f64;
    let mut nus = Vec::with_capacity(n + 1);
    let mut worst_res = 0.0f64;
    let mut nu_gt_k = true;
    for i in 0..=n {
        let k = dk * i as f64;
        let nu = disp.nu_star(k)?;
        worst_res = worst_res.max(disp.nu_star_residual(k, nu)?);
        if i > 0 && nu <= k {
            nu_gt_k = false;
        }
        nus.push(nu);
    }
    // Klein-Gordon envelopes
    let mut env1 = (f64::INFINITY, f64::NEG_INFINITY);
    let mut env2 = (f64::INFINITY, f64::NEG_INFINITY);
    for (i, &nu) in nus.iter().enumerate() {
        let k = dk * i as f64;
        let v = nu / (1.0 + k * k).sqrt();
        env1 = (env1.0.min(v), env1.1.max(v));
        if i > 0 && i < n {
            let nup = (nus[i + 1] - nus[i - 1]) / (2.0 * dk);
            let v2 = nup * (1.0 + k * k).sqrt() / k;
            env2 = (env2.0.min(v2), env2.1.max(v2));
        }
    }
    let d2 = second_differences(&nus, dk);
    let mut conv_low = f64::INFINITY;
    for (i, &s) in d2.iter().enumerate() {
        let k = dk * (i + 1) as f64;
        conv_low = conv_low.min(s * (1.0 + k * k).powf(1.5));
    }
    let nu0 = (nus[0] - tau0).abs();
    let pass = worst_res <= 1e-12
        && nu_gt_k
        && env1.0 > 0.0
        && env1.1.is_finite()
        && env2.0 > 0.0
        && env2.1.is_finite()
        && conv_low > 0.0
        && nu0 <= 1e-10;
    Ok((
        pass,
        format!(
            "fixed-point residual {worst_res:.3e} (tol 1e-12); nu_* > k {nu_gt_k}; nu/sqrt(1+k^2) in [{:.3}, {:.3}]; nu' sqrt(1+k^2)/k in [{:.3}, {:.3}]; min nu''(1+k^2)^(3/2) = {conv_low:.3}; |nu(0)-tau0| = {nu0:.3e} (tol 1e-10)",
            env1.0, env1.1, env2.0, env2.1
        ),
    ))
}

fn c6_winding(maxwell: &KernelTable, power: &KernelTable) -> Result<(bool, String)> {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut total = 0i64;
    let mut count = 0usize;
    for table in [maxwell, power] {
        let disp = Dispersion::new(table);
        for &k in &[0.3, 1.0, 5.0] {
            for _ in 0..10 {
                let re_lo = rng.gen_range(0.02..0.5);
                let re_hi = re_lo + rng.gen_range(0.5..2.5);
                let im_half = rng.gen_range(1.0..6.0);
                let wd =
                    disp.stability_winding(k, (re_lo, re_hi), (-im_half, im_half), DispersionFn::D)?;
                let wm =
                    disp.stability_winding(k, (re_lo, re_hi), (-im_half, im_half), DispersionFn::M)?;
                total += wd.abs() + wm.abs();
                count += 2;
            }
        }
    }
    Ok((
        total == 0,
        format!("{count} winding numbers over random rectangles in Re lambda > 0, all zero: {}", total == 0),
    ))
}

fn c7_residues(table: &KernelTable) -> Result<(bool, String)> {
    let disp = Dispersion::new(table);
    let tau0 = table.tau0();
    // a_+(k -> 0) -> i tau0 / 2
    let a_small = disp.a_plus_closed(1e-3)?;
    let lim_err = (a_small - C64::new(0.0, 0.5 * tau0)).norm();
    // closed vs numerical-derivative route at k = 0.3
    let a_closed = disp.a_plus_closed(0.3)?;
    let a_num = green::a_plus_numeric(table, 0.3)?;
    let route_a = (a_closed - a_num).norm();
    // b routes across k
    let mut route_b = 0.0f64;
    for &k in &[0.05, 0.3, 1.0, 5.0, 20.0] {
        let b_closed = disp.b_plus_closed(k)?;
        let b_num = green::b_plus_numeric(table, k)?;
        route_b = route_b.max((b_closed - b_num).norm());
    }
    let pass = lim_err <= 1e-4 && route_a <= 1e-8 && route_b <= 1e-7;
    Ok((
        pass,
        format!(
            "|a_+(1e-3) - i tau0/2| = {lim_err:.3e} (tol 1e-4); a routes {route_a:.3e} (tol 1e-8); b routes {route_b:.3e} (tol 1e-7)"
        ),
    ))
}

fn c8_bromwich(table: &KernelTable) -> Result<(bool, String)> {
    let disp = Dispersion::new(table);
    let mut worst = 0.0f64;
    for &k in &[0.3, 1.0, 3.0] {
        let nu = disp.nu_star(k)?;
        let t_trunc = 250.0 * nu.max(1.0);
        let dt = 1e-3;
        let grid = TimeGrid::for_mode(dt, 10.0 + dt, k, nu)?;
        let g = green::resolvent_g(table, k, grid)?;
        let h = green::greens_h(table, k, grid)?;
        for &t in &[1.0, 5.0, 10.0] {
            let i = (t / dt).round() as usize;
            let bg = green::bromwich_invert(table, GreenKind::Electric, k, t, 0.1, t_trunc)?;
            let bh = green::bromwich_invert(table, GreenKind::Magnetic, k, t, 0.1, t_trunc)?;
            worst = worst.max((g.values[i] - bg).norm());
            worst = worst.max((h.values[i] - bh).norm());
        }
    }
    // gamma0 independence and H(0) -> 0
    let t_trunc = 250.0 * disp.nu_star(1.0)?.max(1.0);
    let v1 = green::bromwich_invert(table, GreenKind::Magnetic, 1.0, 5.0, 0.1, t_trunc)?;
    let v2 = green::bromwich_invert(table, GreenKind::Magnetic, 1.0, 5.0, 0.3, t_trunc)?;
    let gamma_dep = (v1 - v2).norm();
    let h0 = green::bromwich_invert(table, GreenKind::Magnetic, 1.0, 0.0, 0.3, t_trunc)?.norm();
    let pass = worst <= 1e-4 && gamma_dep <= 1e-5 && h0 <= 1e-5;
    Ok((
        pass,
        format!(
            "max |stepped - Bromwich| = {worst:.3e} (tol 1e-4); gamma0 dependence {gamma_dep:.3e} (tol 1e-5); |H(0)| = {h0:.3e} (tol 1e-5)"
        ),
    ))
}

fn c9_decay(table: &KernelTable) -> Result<(bool, String)> {
    let mut notes = Vec::new();
    // electric: k = 0.5, regular part from the contour representation,
    // fitted against <kt> in the asymptotic window
    let k = 0.5;
    let kts: Vec<f64> = (0..24)
        .map(|i| 40.0 * (250.0f64 / 40.0).powf(i as f64 / 23.0))
        .collect();
    let times: Vec<f64> = kts.iter().map(|&x| x / k).collect();
    let vals = green::regular_part_axis(table, GreenKind::Electric, k, &times)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, v) in vals.iter().enumerate() {
        if v.abs() > 1e-11 {
            xs.push(1.0 + kts[i]);
            ys.push(v.abs());
        }
    }
    let (slope, _, r2) = loglog_slope(&xs, &ys);
    let elec_ok = slope <= -3.0 && xs.len() >= 8;
    notes.push(format!(
        "electric regular-part slope {slope:.2} over kt in [{:.0}, {:.0}] (<= -3, r2 {r2:.3})",
        xs.first().map(|v| v - 1.0).unwrap_or(0.0),
        xs.last().map(|v| v - 1.0).unwrap_or(0.0)
    ));

    // magnetic: k^3 t collapse of |H^r|/k at low k, down to the evaluator's
    // noise floor
    let ks = [0.05, 0.08, 0.12];
    let xs: Vec<f64> = (0..48)
        .map(|i| 0.3 * (30.0f64 / 0.3).powf(i as f64 / 47.0))
        .collect();
    let mut curves = Vec::new();
    for &kk in &ks {
        let times: Vec<f64> = xs.iter().map(|&x| x / (kk * kk * kk)).collect();
        let vals = green::regular_part_axis(table, GreenKind::Magnetic, kk, &times)?;
        let curve: Vec<f64> = vals.iter().map(|v| (v.abs() / kk).max(1e-300)).collect();
        curves.push(curve);
    }
    let mut sup_norm = 0.0f64;
    let mut sup_raw = 0.0f64;
    let mut x_used = 0.0f64;
    for i in 0..ks.len() {
        for j in i + 1..ks.len() {
            for m in 0..xs.len() {
                if curves[i][m] < 1e-8 || curves[j][m] < 1e-8 {
                    continue;
                }
                x_used = x_used.max(xs[m]);
                let d = (curves[i][m].ln() - curves[j][m].ln()).abs();
                sup_norm = sup_norm.max(d);
                let raw = (curves[i][m] * ks[i]).ln() - (curves[j][m] * ks[j]).ln();
                sup_raw = sup_raw.max(raw.abs());
            }
        }
    }
    let mag_ok = sup_norm <= 0.5 && x_used >= 10.0;
    notes.push(format!(
        "magnetic k^3 t collapse: pairwise sup log-distance {sup_norm:.3} over k^3 t in [0.3, {x_used:.1}] (<= 0.5 after removing the |k| prefactor; raw {sup_raw:.3})"
    ));
    Ok((elec_ok && mag_ok, notes.join("; ")))
}

fn c10_oracle(table: &KernelTable) -> Result<(bool, String)> {
    let disp = Dispersion::new(table);
    let kappa0 = disp.kappa0();
    let n_u = 512;
    let mut worst = 0.0f64;
    let mut peaks_ok = true;
    let mut notes = Vec::new();
    for &k in &[0.3, 0.8, 2.0] {
        let nu = disp.nu_star(k)?;
        let dt = (0.04 / nu.max(k.max(1.0))).min(2e-3);
        let grid = TimeGrid::for_mode(dt, 50.0, k, nu)?;
        let data = ModeInitialData::from_profile(table, k, ProfileKind::Kappa);
        let sol = solver::simulate_mode(table, &data, grid, n_u, true, true)?;
        worst = worst.max(sol.elec_discrepancy.unwrap_or(f64::INFINITY));
        worst = worst.max(sol.mag_discrepancy.unwrap_or(f64::INFINITY));
        // spectral peaks
        let (peak_a, bin) = dominant_frequency(&sol.a, dt);
        if (peak_a - nu).abs() > bin {
            peaks_ok = false;
            notes.push(format!("A-peak at {peak_a:.4} vs nu_* {nu:.4} (bin {bin:.4}, k={k})"));
        }
        if k < kappa0 {
            let tau = disp.tau_star(k)?;
            let (peak_r, bin) = dominant_frequency(&sol.rho, dt);
            if (peak_r - tau).abs() > bin {
                peaks_ok = false;
                notes.push(format!(
                    "rho-peak at {peak_r:.4} vs tau_* {tau:.4} (bin {bin:.4}, k={k})"
                ));
            }
        }
    }
    let pass = worst <= 1e-3 && peaks_ok;
    notes.insert(
        0,
        format!("max sup-norm resolvent vs oracle {worst:.3e} (tol 1e-3); spectral peaks within one bin {peaks_ok}"),
    );
    Ok((pass, notes.join("; ")))
}

fn c11_free_transport() -> Result<(bool, String)> {
    let data = SeparableData {
        amp: 1.0,
        sigma_x: 1.0,
    };
    let m0 = solver::physical_s_mass(&data, 0.0)?;
    let mut mass_dev = 0.0f64;
    for &t in &[5.0, 20.0, 50.0] {
        let m = solver::physical_s_mass(&data, t)?;
        mass_dev = mass_dev.max(((m - m0) / m0).abs());
    }
    let mut prods = Vec::new();
    for i in 0..8 {
        let t = 5.0 * (10.0f64).powf(i as f64 / 7.0);
        let sup = solver::physical_s_sup(&data, t)?;
        prods.push(sup * t * t * t);
    }
    let lo = prods.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = prods.iter().cloned().fold(0.0f64, f64::max);
    let pass = mass_dev <= 1e-6 && lo > 0.0 && hi / lo < 3.0;
    Ok((
        pass,
        format!(
            "mass drift {mass_dev:.3e} (tol 1e-6); sup|S| t^3 in [{lo:.4}, {hi:.4}] over t in [5, 50] (ratio {:.2})",
            hi / lo
        ),
    ))
}

fn c12_convergence(table: &KernelTable) -> Result<(bool, String)> {
    let disp = Dispersion::new(table);
    let k = 0.5;
    let nu = disp.nu_star(k)?;
    let omega_sq = k * k + table.constants.tau0_sq;
    let mut ratios = Vec::new();
    let t_max = 5.0;
    let res_at = |dt: f64| -> Result<(f64, f64, f64)> {
        let grid = TimeGrid::for_mode(dt, t_max, k, nu)?;
        let ts = grid.times();
        let kv = table.memory_k_grid(k, &ts)?;
        let nv = table.memory_n_grid(k, &ts)?;
        let r = green::volterra_second_kind(&kv, dt);
        let (h, _) = green::oscillator_with_memory(&nv, omega_sq, dt);
        let data = ModeInitialData::from_profile(table, k, ProfileKind::Kappa);
        let s = solver::source_grid(&data.h0, k, &ts)?;
        let rho = green::volterra_forced(&kv, &s, dt);
        let rho_re: Vec<f64> = rho.iter().map(|v| v.re).collect();
        let forcing_res = forced_residual(&rho_re, &kv, &s, dt);
        Ok((
            green::volterra_residual(&r, &kv, dt),
            green::oscillator_residual(&h, &nv, omega_sq, dt),
            forcing_res,
        ))
    };
    let coarse = res_at(1e-3)?;
    let fine = res_at(5e-4)?;
    for (c, f) in [coarse.0 / fine.0, coarse.1 / fine.1, coarse.2 / fine.2]
        .iter()
        .zip(["volterra", "oscillator", "forced"])
    {
        ratios.push(format!("{f}: {c:.2}"));
    }
    let vals = [coarse.0 / fine.0, coarse.1 / fine.1, coarse.2 / fine.2];
    let pass = vals.iter().all(|r| (*r - 4.0).abs() <= 0.8);
    Ok((
        pass,
        format!("residual reduction under dt halving (target 4 +/- 0.8): {}", ratios.join(", ")),
    ))
}

fn forced_residual(x: &[f64], kvals: &[f64], s: &[C64], dt: f64) -> f64 {
    let n = x.len();
    let mut worst = 0.0f64;
    let samples = 32.min(n / 2);
    for m in 1..=samples {
        let i = (n - 1) * m / samples;
        let i = if i % 2 == 0 { i } else { i - 1 };
        if i < 2 {
            continue;
        }
        let mut conv = 0.0;
        for j in 0..=i {
            let w = if j == 0 || j == i {
                1.0 / 3.0
            } else if j % 2 == 1 {
                4.0 / 3.0
            } else {
                2.0 / 3.0
            };
            conv += w * kvals[i - j] * x[j];
        }
        let res = (x[i] + dt * conv - s[i].re).abs();
        worst = worst.max(res);
    }
    worst
}

/// One pass/fail line per criterion, for the CLI and the acceptance test.
pub fn print_report(report: &Report) {
    for c in &report.criteria {
        println!(
            "ACCEPT-{:02} [{}] {} ({:.2}s): {}",
            c.id,
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.seconds,
            c.details
        );
    }
}
