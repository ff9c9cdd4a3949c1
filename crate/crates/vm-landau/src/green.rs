//! Temporal Green functions G_k(t) and H_k(t): time-domain steppers for the
//! resolvent Volterra equation and the memory oscillator, residues of the
//! dispersion poles, the oscillatory/regular decomposition, decay fits, and a
//! Bromwich-contour inversion used as an independent oracle.
//!
//! The Bromwich integrand is regularized before quadrature: the simple poles
//! of 1/D and 1/M are subtracted exactly (their inverse transforms are the
//! closed-form oscillatory parts) together with a decaying rational that
//! matches the large-lambda tail. What remains is smooth on the contour and
//! O(tau^-3) at infinity, so a Filon mesh independent of gamma0 and t
//! integrates it to oracle accuracy.

use crate::dispersion::Dispersion;
use crate::kernels::KernelTable;
use crate::numerics::fit::linfit;
use crate::numerics::oscillatory::{mesh, PanelSet};
use crate::numerics::par;
use crate::{C64, Error, Result};

const I: C64 = C64::new(0.0, 1.0);

/// Uniform time grid with n_steps intervals (n_steps + 1 samples).
#[derive(Debug, Clone, Copy)]
pub struct TimeGrid {
    pub dt: f64,
    pub n_steps: usize,
}

impl TimeGrid {
    pub fn new(dt: f64, n_steps: usize) -> Result<TimeGrid> {
        if !(dt > 0.0) || n_steps == 0 {
            return Err(Error::Config(format!(
                "time grid needs dt > 0 and n_steps > 0, got dt = {dt}, n_steps = {n_steps}"
            )));
        }
        Ok(TimeGrid { dt, n_steps })
    }

    /// Grid sized for a mode: dt <= min(0.05/max(1,k), 0.05/nu_*(k)).
    pub fn for_mode(dt: f64, t_max: f64, k: f64, nu_star: f64) -> Result<TimeGrid> {
        let grid = TimeGrid::new(dt, (t_max / dt).round().max(1.0) as usize)?;
        grid.validate(k, nu_star)?;
        Ok(grid)
    }

    pub fn validate(&self, k: f64, nu_star: f64) -> Result<()> {
        let cap = (0.05 / k.max(1.0)).min(0.05 / nu_star);
        if self.dt > cap * (1.0 + 1e-9) {
            return Err(Error::Config(format!(
                "time step {} violates the resolution rule dt <= {:.3e} for k = {k}, nu_* = {nu_star}",
                self.dt, cap
            )));
        }
        Ok(())
    }

    pub fn t_max(&self) -> f64 {
        self.dt * self.n_steps as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n_steps).map(|i| i as f64 * self.dt).collect()
    }
}

/// Which Green function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreenKind {
    /// 1/D; the delta part of G_k is kept symbolic (has_delta), the trace
    /// holds the remainder R_k.
    Electric,
    /// 1/M.
    Magnetic,
}

/// A computed Green-function trace with optional decomposition.
#[derive(Debug, Clone)]
pub struct GreenTrace {
    pub kind: GreenKind,
    pub k: f64,
    pub grid: TimeGrid,
    pub values: Vec<C64>,
    pub osc_part: Vec<C64>,
    pub regular_part: Vec<C64>,
    /// (residue_+, residue_-) when the oscillatory poles exist.
    pub residues: Option<(C64, C64)>,
    pub roots: Option<(C64, C64)>,
    /// Electric traces carry the symbolic delta at t = 0.
    pub has_delta: bool,
    /// Time derivative from the stepper (magnetic), for the A-mode assembly.
    pub deriv: Option<Vec<f64>>,
}

/// Solve R + K + K * R = 0 by the product trapezoidal rule (K[0] = 0).
/// The memory is truncated where |K| falls below 1e-14 of its peak.
pub fn volterra_second_kind(kvals: &[f64], dt: f64) -> Vec<f64> {
    let n = kvals.len();
    let mut r = vec![0.0; n];
    if n <= 1 {
        return r;
    }
    let n_mem = memory_span(kvals);
    for i in 1..n {
        let m = (i - 1).min(n_mem);
        let conv = if m > 0 {
            par::dot_rev(&kvals[1..=m], &r[i - m..i])
        } else {
            0.0
        };
        r[i] = -kvals[i] - dt * conv;
    }
    r
}

/// Solve x + K * x = s (complex forcing, real kernel), trapezoidal.
pub fn volterra_forced(kvals: &[f64], forcing: &[C64], dt: f64) -> Vec<C64> {
    let n = kvals.len().min(forcing.len());
    let mut x = vec![C64::new(0.0, 0.0); n];
    if n == 0 {
        return x;
    }
    x[0] = forcing[0];
    let n_mem = memory_span(kvals);
    for i in 1..n {
        let m = (i - 1).min(n_mem);
        let conv = if m > 0 {
            par::dot_rev_c(&kvals[1..=m], &x[i - m..i])
        } else {
            C64::new(0.0, 0.0)
        };
        let edge = 0.5 * kvals[i] * x[0];
        x[i] = forcing[i] - dt * (conv + edge);
    }
    x
}

/// Trapezoidal convolution (g * s)(t_i) with g[0] = 0 assumed harmless
/// (the half-weight end terms are kept).
pub fn convolve_trapezoid(g: &[f64], s: &[C64], dt: f64) -> Vec<C64> {
    let n = g.len().min(s.len());
    let mut out = vec![C64::new(0.0, 0.0); n];
    let n_mem = memory_span(g);
    for i in 1..n {
        let m = (i - 1).min(n_mem);
        let conv = if m > 0 {
            par::dot_rev_c(&g[1..=m], &s[i - m..i])
        } else {
            C64::new(0.0, 0.0)
        };
        out[i] = dt * (conv + 0.5 * g[i] * s[0] + 0.5 * g[0] * s[i]);
    }
    out
}

fn memory_span(kvals: &[f64]) -> usize {
    let peak = kvals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if peak == 0.0 {
        return 0;
    }
    let thresh = 1e-14 * peak;
    let mut last = 0;
    for (i, v) in kvals.iter().enumerate() {
        if v.abs() > thresh {
            last = i;
        }
    }
    last.max(1)
}

/// Trapezoidal (average-acceleration) stepping of
/// H'' + omega^2 H + N * H = 0, H(0) = 0, H'(0) = 1.
/// Returns (H, H').
pub fn oscillator_with_memory(nvals: &[f64], omega_sq: f64, dt: f64) -> (Vec<f64>, Vec<f64>) {
    let n = nvals.len();
    let mut h = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut acc = vec![0.0; n];
    if n == 0 {
        return (h, v);
    }
    v[0] = 1.0;
    acc[0] = 0.0;
    let n_mem = memory_span(nvals);
    let denom = 1.0 + 0.25 * dt * dt * omega_sq;
    for i in 1..n {
        let m = (i - 1).min(n_mem);
        let conv = if m > 0 {
            dt * par::dot_rev(&nvals[1..=m], &h[i - m..i])
        } else {
            0.0
        };
        let h_new = (h[i - 1] + dt * v[i - 1] + 0.25 * dt * dt * (acc[i - 1] - conv)) / denom;
        let a_new = -omega_sq * h_new - conv;
        h[i] = h_new;
        acc[i] = a_new;
        v[i] = v[i - 1] + 0.5 * dt * (acc[i - 1] + a_new);
    }
    (h, v)
}

/// Electric Green trace: R_k solving R + K_k + K_k * R = 0.
pub fn resolvent_g(table: &KernelTable, k: f64, grid: TimeGrid) -> Result<GreenTrace> {
    let disp = Dispersion::new(table);
    let nu = disp.nu_star(k)?;
    grid.validate(k, nu)?;
    let ts = grid.times();
    let kvals = table.memory_k_grid(k, &ts)?;
    let r = volterra_second_kind(&kvals, grid.dt);
    let values: Vec<C64> = r.iter().map(|&x| C64::new(x, 0.0)).collect();
    let (residues, roots) = electric_poles(&disp, k)?;
    Ok(GreenTrace {
        kind: GreenKind::Electric,
        k,
        grid,
        values,
        osc_part: Vec::new(),
        regular_part: Vec::new(),
        residues,
        roots,
        has_delta: true,
        deriv: None,
    })
}

/// Magnetic Green trace: H'' + (k^2 + tau0^2) H + N_k * H = 0.
pub fn greens_h(table: &KernelTable, k: f64, grid: TimeGrid) -> Result<GreenTrace> {
    let disp = Dispersion::new(table);
    let nu = disp.nu_star(k)?;
    grid.validate(k, nu)?;
    let ts = grid.times();
    let nvals = table.memory_n_grid(k, &ts)?;
    let omega_sq = k * k + table.constants.tau0_sq;
    let (h, v) = oscillator_with_memory(&nvals, omega_sq, grid.dt);
    let values: Vec<C64> = h.iter().map(|&x| C64::new(x, 0.0)).collect();
    let b = disp.b_plus_closed(k)?;
    Ok(GreenTrace {
        kind: GreenKind::Magnetic,
        k,
        grid,
        values,
        osc_part: Vec::new(),
        regular_part: Vec::new(),
        residues: Some((b, b.conj())),
        roots: Some((I * nu, -I * nu)),
        has_delta: false,
        deriv: Some(v),
    })
}

fn electric_poles(disp: &Dispersion, k: f64) -> Result<(Option<(C64, C64)>, Option<(C64, C64)>)> {
    let support = disp.kappa0() + disp.default_delta();
    if k >= support || !disp.table.eq.has_analytic_kernels() && k > disp.kappa0() {
        return Ok((None, None));
    }
    let lam = disp.lambda_elec(k)?;
    let a = disp.a_plus_closed(k)?;
    Ok((Some((a, a.conj())), Some((lam, lam.conj()))))
}

/// Residues a_+/- of the electric Green function; None outside the support
/// ball k < kappa0 + delta.
pub fn residue_a(table: &KernelTable, k: f64) -> Result<Option<(C64, C64)>> {
    let disp = Dispersion::new(table);
    Ok(electric_poles(&disp, k)?.0)
}

/// Residues b_+/- of the magnetic Green function.
pub fn residue_b(table: &KernelTable, k: f64) -> Result<(C64, C64)> {
    let disp = Dispersion::new(table);
    let b = disp.b_plus_closed(k)?;
    Ok((b, b.conj()))
}

/// Numerical-derivative route to a_+: central differences of D along the
/// imaginary axis at the root (independent of the closed Omega' form).
pub fn a_plus_numeric(table: &KernelTable, k: f64) -> Result<C64> {
    let disp = Dispersion::new(table);
    let kappa0 = disp.kappa0();
    if k > kappa0 {
        let lam = disp.lambda_elec(k)?;
        return Ok(1.0 / disp.d_ext_prime(lam, k)?);
    }
    let tau = disp.tau_star(k)?;
    let h = (1e-4 * tau.max(1.0)).min(0.2 * (tau - k).max(1e-6));
    let d = |t: f64| disp.d_eval(I * t, k);
    let (f1, f2, f3, f4) = (d(tau - 2.0 * h)?, d(tau - h)?, d(tau + h)?, d(tau + 2.0 * h)?);
    let ddt = (f1 - 8.0 * f2 + 8.0 * f3 - f4) / (12.0 * h);
    Ok(1.0 / (-I * ddt))
}

/// Numerical route to b_+ through central differences of L[N] on the axis.
pub fn b_plus_numeric(table: &KernelTable, k: f64) -> Result<C64> {
    let disp = Dispersion::new(table);
    let nu = disp.nu_star(k)?;
    let h = (1e-4 * nu.max(1.0)).min(0.2 * (nu - k).max(1e-6));
    let ln = |t: f64| table.laplace_n(I * t, k);
    let (f1, f2, f3, f4) = (ln(nu - 2.0 * h)?, ln(nu - h)?, ln(nu + h)?, ln(nu + 2.0 * h)?);
    let dln = -I * ((f1 - 8.0 * f2 + 8.0 * f3 - f4) / (12.0 * h));
    Ok(1.0 / (2.0 * I * nu + dln))
}

/// Fill osc_part and regular_part from the attached residues and roots.
pub fn decompose(trace: &mut GreenTrace) {
    let n = trace.values.len();
    let ts = trace.grid.times();
    match (trace.residues, trace.roots) {
        (Some((rp, rm)), Some((lp, lm))) => {
            trace.osc_part = (0..n)
                .map(|i| rp * (lp * ts[i]).exp() + rm * (lm * ts[i]).exp())
                .collect();
        }
        _ => {
            trace.osc_part = vec![C64::new(0.0, 0.0); n];
        }
    }
    trace.regular_part = trace
        .values
        .iter()
        .zip(&trace.osc_part)
        .map(|(v, o)| v - o)
        .collect();
}

/// Result of a decay fit of log|signal| against log(1 + k^p t).
#[derive(Debug, Clone, Copy)]
pub struct FitDecay {
    pub slope: f64,
    pub constant: f64,
    pub r2: f64,
    /// Set when the window was clamped at the noise floor.
    pub partial: bool,
    pub window: (f64, f64),
}

/// Scaling variable of the fit: <k t> or <k^3 t>.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayScaling {
    Kt,
    K3t,
}

pub fn fit_decay(
    signal: &[C64],
    ts: &[f64],
    k: f64,
    scaling: DecayScaling,
    window: (f64, f64),
    floor: f64,
) -> Result<FitDecay> {
    let p = match scaling {
        DecayScaling::Kt => 1.0,
        DecayScaling::K3t => 3.0,
    };
    let rate = k.powf(p);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut clamped = false;
    let mut t_last = window.0;
    for (i, &t) in ts.iter().enumerate() {
        if t < window.0 || t > window.1 {
            continue;
        }
        let mag = signal[i].norm();
        if mag <= floor {
            clamped = true;
            continue;
        }
        xs.push((1.0 + rate * t).ln());
        ys.push(mag.ln());
        t_last = t;
    }
    if xs.len() < 8 {
        return Err(Error::Convergence(format!(
            "decay fit has only {} usable points above the noise floor {floor:.3e}",
            xs.len()
        )));
    }
    let (slope, intercept, r2) = linfit(&xs, &ys);
    Ok(FitDecay {
        slope,
        constant: intercept.exp(),
        r2,
        partial: clamped,
        window: (window.0, t_last),
    })
}

// ---------------------------------------------------------------------------
// Bromwich inversion with exact pole subtraction
// ---------------------------------------------------------------------------

struct PoleSub {
    lam: C64,
    res: C64,
    /// Taylor coefficients of 1/F - res/(lambda - lam) at the pole.
    c0: C64,
    c1: C64,
}

struct BromwichCtx<'a> {
    disp: Dispersion<'a>,
    kind: GreenKind,
    k: f64,
    poles: Vec<PoleSub>,
    q2: f64,
    c: f64,
    nu: f64,
}

impl<'a> BromwichCtx<'a> {
    fn new(table: &'a KernelTable, kind: GreenKind, k: f64) -> Result<Self> {
        let disp = Dispersion::new(table);
        let nu = disp.nu_star(k)?;
        let tau0_sq = table.constants.tau0_sq;
        let mut poles = Vec::new();
        let leading = match kind {
            GreenKind::Electric => -tau0_sq,
            GreenKind::Magnetic => 1.0,
        };
        match kind {
            GreenKind::Electric => {
                if let (Some((rp, rm)), Some((lp, lm))) = electric_poles(&disp, k)? {
                    poles.push((lp, rp));
                    poles.push((lm, rm));
                }
            }
            GreenKind::Magnetic => {
                let b = disp.b_plus_closed(k)?;
                poles.push((I * nu, b));
                poles.push((-I * nu, b.conj()));
            }
        }
        // q2 = leading + 2 Re(res+ conj(lam+)) - (2 Re res+)(2 Re lam+)
        let q2 = if let Some(&(lp, rp)) = poles.first() {
            leading + 2.0 * (rp * lp.conj()).re - (2.0 * rp.re) * (2.0 * lp.re)
        } else {
            leading
        };
        let c = nu.max(1.0);
        let mut ctx = BromwichCtx {
            disp,
            kind,
            k,
            poles: Vec::new(),
            q2,
            c,
            nu,
        };
        let mut subs = Vec::new();
        for (lam, res) in poles {
            let (c0, c1) = ctx.pole_patch(lam, res)?;
            subs.push(PoleSub { lam, res, c0, c1 });
        }
        ctx.poles = subs;
        Ok(ctx)
    }

    /// F at lambda: D for the electric kernel, M for the magnetic one,
    /// extended across the axis when the continuation applies.
    fn f_disp(&self, lambda: C64) -> Result<C64> {
        match self.kind {
            GreenKind::Electric => {
                if lambda.re < -1e-14 * (1.0 + lambda.norm()) {
                    self.disp.d_ext(lambda, self.k)
                } else {
                    self.disp.d_eval(lambda, self.k)
                }
            }
            GreenKind::Magnetic => self.disp.m_eval(lambda, self.k),
        }
    }

    /// Taylor data for 1/F - res/(lambda - lam) at the pole: value c0 and
    /// slope c1, from one-sided derivatives of F along +Re.
    fn pole_patch(&self, lam: C64, res: C64) -> Result<(C64, C64)> {
        let h = 1e-2 * lam.norm().max(1.0);
        let f = |j: f64| self.f_disp(lam + C64::new(j * h, 0.0));
        let (f0, f1, f2, f3, f4) = (f(0.0)?, f(1.0)?, f(2.0)?, f(3.0)?, f(4.0)?);
        let fp = 1.0 / res;
        let fpp = (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3) / (h * h);
        let fppp = (-2.5 * f0 + 9.0 * f1 - 12.0 * f2 + 7.0 * f3 - 1.5 * f4) / (h * h * h);
        let c0 = -fpp / (2.0 * fp * fp);
        let c1 = fpp * fpp / (4.0 * fp * fp * fp) - fppp / (6.0 * fp * fp);
        let shift = match self.kind {
            GreenKind::Electric => C64::new(-1.0, 0.0), // R~ = 1/D - 1
            GreenKind::Magnetic => C64::new(0.0, 0.0),
        };
        Ok((c0 + shift, c1))
    }

    /// The resolvent kernel minus its poles and tail correction.
    fn w_eval(&self, lambda: C64) -> Result<C64> {
        let mut nearest: Option<(usize, f64)> = None;
        for (i, p) in self.poles.iter().enumerate() {
            let d = (lambda - p.lam).norm();
            if nearest.map(|(_, dd)| d < dd).unwrap_or(true) {
                nearest = Some((i, d));
            }
        }
        let patch_radius = 1e-5 * (1.0 + self.nu);
        let mut val;
        match nearest {
            Some((i, d)) if d < patch_radius => {
                let p = &self.poles[i];
                val = p.c0 + p.c1 * (lambda - p.lam);
                for (j, q) in self.poles.iter().enumerate() {
                    if j != i {
                        val -= q.res / (lambda - q.lam);
                    }
                }
            }
            _ => {
                let f = self.f_disp(lambda)?;
                let base = match self.kind {
                    GreenKind::Electric => 1.0 / f - 1.0,
                    GreenKind::Magnetic => 1.0 / f,
                };
                val = base;
                for p in &self.poles {
                    val -= p.res / (lambda - p.lam);
                }
            }
        }
        let shifted = lambda + self.c;
        val -= self.q2 / (shifted * shifted + self.c * self.c);
        Ok(val)
    }

    /// Panel mesh on [0, T] refined near the branch point tau = k, the pole
    /// frequencies, and (for the magnetic kernel at small k) the tau ~ 0
    /// feature of width ~ k^3 where |M| ~ k^2 -- the origin of the k^3 t
    /// decay scale.
    fn mesh(&self, t_trunc: f64) -> Vec<f64> {
        let k = self.k;
        let fine = (k / 32.0).clamp(1e-3, 0.05);
        let fine0 = ((k.min(1.0)).powi(3) / 16.0).max(1e-9);
        let inner_grading = self.kind == GreenKind::Magnetic && k < 1.0;
        let pole_ims: Vec<f64> = self.poles.iter().map(|p| p.lam.im.abs()).collect();
        let width = move |tau: f64| -> f64 {
            let mut w: f64 = (0.3 * (tau + 0.3)).min(1.2);
            w = w.min(0.4 * (tau - k).abs() + fine);
            if inner_grading && tau < 2.0 * k {
                w = w.min((tau / 8.0).max(fine0));
            }
            for &pi in &pole_ims {
                w = w.min(0.4 * (tau - pi).abs() + fine.min(0.02));
            }
            w.max(1e-10)
        };
        let mut anchors = vec![k];
        anchors.extend(self.poles.iter().map(|p| p.lam.im.abs()));
        mesh(0.0, t_trunc, width, &anchors)
    }

    /// Closed-form part of the inversion (poles plus tail correction).
    fn closed_forms(&self, t: f64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for p in &self.poles {
            acc += p.res * (p.lam * t).exp();
        }
        acc += self.q2 * (-self.c * t).exp() * (self.c * t).sin() / self.c;
        acc
    }

    /// Evaluate the inversion at the given times along Re lambda = gamma0
    /// (gamma0 = 0 integrates the boundary values on the axis).
    fn invert(&self, gamma0: f64, t_trunc: f64, times: &[f64]) -> Result<(Vec<C64>, f64)> {
        let pts = self.mesh(t_trunc);
        let mut worst: Option<Error> = None;
        let mut f = |tau: f64| -> C64 {
            match self.w_eval(C64::new(gamma0, tau)) {
                Ok(v) => v,
                Err(e) => {
                    worst = Some(e);
                    C64::new(f64::NAN, 0.0)
                }
            }
        };
        let set = PanelSet::build(&mut f, &pts);
        if let Some(e) = worst {
            return Err(e);
        }
        // tail assumes |W| ~ C/tau^3 beyond T; the Legendre truncation sum is
        // conservative by a factor of a few for oscillatory moments
        let tail = self.w_eval(C64::new(gamma0, t_trunc))?.norm() * t_trunc / 2.0;
        let err_est = tail + 0.25 * set.truncation();
        let vals = times
            .iter()
            .map(|&t| {
                let (integral, _) = set.integrate(t);
                let contour = (gamma0 * t).exp() / std::f64::consts::PI * integral.re;
                self.closed_forms(t) + contour
            })
            .collect();
        Ok((vals, err_est))
    }
}

/// Numerical Bromwich inversion of 1/D - 1 (electric, the delta part
/// subtracted) or 1/M (magnetic) at a single time. A validation oracle:
/// gamma0 must lie in [0.05, 1] and the truncation must satisfy
/// T >= 50 max(1, nu_*).
pub fn bromwich_invert(
    table: &KernelTable,
    kind: GreenKind,
    k: f64,
    t: f64,
    gamma0: f64,
    t_trunc: f64,
) -> Result<C64> {
    if !(0.05..=1.0).contains(&gamma0) {
        return Err(Error::Domain(format!(
            "bromwich contour abscissa gamma0 must lie in [0.05, 1], got {gamma0}"
        )));
    }
    let ctx = BromwichCtx::new(table, kind, k)?;
    if t_trunc < 50.0 * ctx.nu.max(1.0) {
        return Err(Error::Domain(format!(
            "bromwich truncation T = {t_trunc} is below 50 max(1, nu_*) = {}",
            50.0 * ctx.nu.max(1.0)
        )));
    }
    let (vals, err) = ctx.invert(gamma0, t_trunc, &[t])?;
    if err * (gamma0 * t).exp() / std::f64::consts::PI > 1e-5 {
        return Err(Error::Convergence(format!(
            "bromwich truncation error estimate {err:.3e} exceeds 1e-5"
        )));
    }
    Ok(vals[0])
}

/// Green-function values at many times through the same contour machinery
/// (gamma0 = 0 boundary-value form), used where time stepping cannot reach.
pub fn green_values_axis(
    table: &KernelTable,
    kind: GreenKind,
    k: f64,
    times: &[f64],
) -> Result<Vec<C64>> {
    let ctx = BromwichCtx::new(table, kind, k)?;
    let t_trunc = 400.0 * ctx.nu.max(1.0);
    Ok(ctx.invert(0.0, t_trunc, times)?.0)
}

/// Regular (non-oscillatory) part of a Green function evaluated directly
/// from the contour representation: the pole terms are omitted instead of
/// being subtracted after the fact, so no phase-coherence is required.
pub fn regular_part_axis(
    table: &KernelTable,
    kind: GreenKind,
    k: f64,
    times: &[f64],
) -> Result<Vec<f64>> {
    let ctx = BromwichCtx::new(table, kind, k)?;
    let t_trunc = 400.0 * ctx.nu.max(1.0);
    let pts = ctx.mesh(t_trunc);
    let mut worst: Option<Error> = None;
    let mut f = |tau: f64| -> C64 {
        match ctx.w_eval(C64::new(0.0, tau)) {
            Ok(v) => v,
            Err(e) => {
                worst = Some(e);
                C64::new(f64::NAN, 0.0)
            }
        }
    };
    let set = PanelSet::build(&mut f, &pts);
    if let Some(e) = worst {
        return Err(e);
    }
    Ok(times
        .iter()
        .map(|&t| {
            let (integral, _) = set.integrate(t);
            let tail = ctx.q2 * (-ctx.c * t).exp() * (ctx.c * t).sin() / ctx.c;
            tail + integral.re / std::f64::consts::PI
        })
        .collect())
}

/// Max residual of the discrete Volterra identity R + K + K*R = 0, measured
/// with composite Simpson quadrature at sampled even indices. The trapezoid
/// solution leaves an O(dt^2) residual here.
pub fn volterra_residual(r: &[f64], kvals: &[f64], dt: f64) -> f64 {
    let n = r.len();
    let mut worst = 0.0f64;
    let samples = 48.min(n / 2);
    for s in 1..=samples {
        let i = (n - 1) * s / samples;
        let i = if i % 2 == 0 { i } else { i - 1 };
        if i < 2 {
            continue;
        }
        let mut conv = 0.0;
        for j in 0..=i {
            let w = simpson_weight(j, i);
            conv += w * kvals[i - j] * r[j];
        }
        let res = r[i] + kvals[i] + dt * conv;
        worst = worst.max(res.abs());
    }
    worst
}

/// Max residual of H'' + omega^2 H + N*H = 0 with second central differences
/// and Simpson memory quadrature at sampled even interior indices.
pub fn oscillator_residual(h: &[f64], nvals: &[f64], omega_sq: f64, dt: f64) -> f64 {
    let n = h.len();
    let mut worst = 0.0f64;
    let samples = 48.min(n / 2);
    for s in 1..=samples {
        let i = (n - 2) * s / samples;
        let i = if i % 2 == 0 { i } else { i - 1 };
        if i < 2 {
            continue;
        }
        let mut conv = 0.0;
        for j in 0..=i {
            let w = simpson_weight(j, i);
            conv += w * nvals[i - j] * h[j];
        }
        let hpp = (h[i + 1] - 2.0 * h[i] + h[i - 1]) / (dt * dt);
        let res = hpp + omega_sq * h[i] + dt * conv;
        worst = worst.max(res.abs());
    }
    worst
}

fn simpson_weight(j: usize, n: usize) -> f64 {
    debug_assert!(n % 2 == 0);
    if j == 0 || j == n {
        1.0 / 3.0
    } else if j % 2 == 1 {
        4.0 / 3.0
    } else {
        2.0 / 3.0
    }
}
