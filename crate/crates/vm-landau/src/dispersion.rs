//! The electric and magnetic dispersion functions D(lambda, k), M(lambda, k),
//! their axis reductions Omega, omega, psi, the holomorphic extension of Phi,
//! and the dispersion-relation roots: the Langmuir branch tau_*, the
//! Klein-Gordon branch nu_*, and the damped continuation of the electric
//! branch past the threshold kappa_0.

use crate::kernels::{CauchyKernel, KernelTable};
use crate::numerics::par;
use crate::{C64, Error, Result};

const I: C64 = C64::new(0.0, 1.0);
const PI: f64 = std::f64::consts::PI;

/// Which dispersion function a winding scan runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DispersionFn {
    D,
    M,
}

/// Where a sample sits relative to the axis routing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Re lambda > 0
    Interior,
    /// lambda = i tau with |tau| > k
    AxisOuter,
    /// lambda = i tau with |tau| < k
    AxisInner,
    /// Re lambda < 0 (holomorphic continuation)
    Extended,
}

/// One evaluation of the dispersion functions.
#[derive(Debug, Clone, Copy)]
pub struct DispersionSample {
    pub k: f64,
    pub lambda: C64,
    pub d_val: C64,
    pub m_val: C64,
    pub branch: Branch,
}

/// Root curves over a k-grid.
#[derive(Debug, Clone)]
pub struct ModeCurves {
    pub k_grid: Vec<f64>,
    /// Langmuir frequency tau_*(k); NaN for k > kappa0.
    pub tau_star: Vec<f64>,
    /// Klein-Gordon frequency nu_*(k).
    pub nu_star: Vec<f64>,
    /// lambda_+(k) including the continuation on (kappa0, kappa0 + delta];
    /// NaN beyond.
    pub lambda_elec: Vec<C64>,
    pub a_plus: Vec<C64>,
    pub b_plus: Vec<C64>,
    pub kappa0: f64,
    pub delta: f64,
}

pub struct Dispersion<'a> {
    pub table: &'a KernelTable,
}

impl<'a> Dispersion<'a> {
    pub fn new(table: &'a KernelTable) -> Self {
        Dispersion { table }
    }

    pub fn kappa0(&self) -> f64 {
        self.table.kappa0()
    }

    pub fn tau0(&self) -> f64 {
        self.table.tau0()
    }

    /// Default continuation width past the threshold.
    pub fn default_delta(&self) -> f64 {
        0.1 * self.kappa0()
    }

    pub fn classify(&self, lambda: C64, k: f64) -> Branch {
        let eps = 1e-13 * (1.0 + lambda.norm());
        if lambda.re > eps {
            Branch::Interior
        } else if lambda.re < -eps {
            Branch::Extended
        } else if lambda.im.abs() >= k {
            Branch::AxisOuter
        } else {
            Branch::AxisInner
        }
    }

    /// D(lambda, k) = 1 + L[K_k](lambda) for Re lambda >= 0.
    pub fn d_eval(&self, lambda: C64, k: f64) -> Result<C64> {
        check_k(k)?;
        Ok(1.0 + self.table.laplace_k(lambda, k)?)
    }

    /// M(lambda, k) = lambda^2 + k^2 + tau0^2 + L[N_k](lambda) for
    /// Re lambda >= 0. On the outer axis the psi route is used and the
    /// Lambda-route identity M = lambda^2 + k^2 - Lambda(-i lambda/k) is
    /// checked against it.
    pub fn m_eval(&self, lambda: C64, k: f64) -> Result<C64> {
        check_k(k)?;
        let tau0_sq = self.table.constants.tau0_sq;
        let base = lambda * lambda + k * k + tau0_sq;
        let val = base + self.table.laplace_n(lambda, k)?;
        let eps = 1e-13 * (1.0 + lambda.norm());
        if lambda.re.abs() <= eps && lambda.im.abs() > k {
            // cross-check the psi route against the Lambda route
            let z = C64::new(lambda.im / k, 0.0);
            let lam_route =
                lambda * lambda + k * k - 0.5 * z * self.table.cauchy(CauchyKernel::Mag, z)?;
            let diff = (val - lam_route).norm();
            if diff > 1e-8 * val.norm().max(1.0) {
                return Err(Error::Convergence(format!(
                    "psi/Lambda route disagreement for M at lambda = {lambda}, k = {k}: {diff:.3e}"
                )));
            }
        }
        Ok(val)
    }

    /// Joint sample with branch tag.
    pub fn sample(&self, lambda: C64, k: f64) -> Result<DispersionSample> {
        Ok(DispersionSample {
            k,
            lambda,
            d_val: self.d_eval(lambda, k)?,
            m_val: self.m_eval(lambda, k)?,
            branch: self.classify(lambda, k),
        })
    }

    pub fn omega_big(&self, y: f64) -> Result<f64> {
        self.table.omega_big(y)
    }

    pub fn small_omega(&self, y: f64) -> Result<f64> {
        self.table.small_omega(y)
    }

    pub fn psi_eval(&self, y: f64) -> Result<f64> {
        self.table.psi(y)
    }

    /// The extension of Phi(z) = int u kappa(u)/(u+z) du: the plain integral
    /// for Im z < 0 and on the real rays |Re z| >= 1, the Plemelj boundary
    /// value on the cut, and Phi(z) - 2 i pi z kappa(z) for Im z > 0 inside
    /// the kernel's holomorphy region.
    pub fn phi_ext(&self, z: C64) -> Result<C64> {
        let real_eps = 1e-13 * (1.0 + z.norm());
        if z.im.abs() <= real_eps {
            // boundary values (Plemelj on the cut, plain integral outside);
            // works for tabulated equilibria too
            return self.table.cauchy(CauchyKernel::Elec, z);
        }
        if !self.table.eq.has_analytic_kernels() {
            return Err(Error::Unsupported(
                "the Phi extension off the real axis needs a built-in equilibrium".into(),
            ));
        }
        if z.im > 0.0 && 1.0 - z.re * z.re + z.im * z.im <= 0.0 {
            return Err(Error::Domain(format!(
                "z = {z} lies outside the holomorphy region of the Phi extension"
            )));
        }
        let plain = self.table.cauchy(CauchyKernel::Elec, z)?;
        if z.im > 0.0 {
            Ok(plain - 2.0 * PI * I * z * crate::kernels::kappa_cont(&self.table.eq, z)?)
        } else {
            Ok(plain)
        }
    }

    /// d/dz of the extension, by a five-point stencil along the real
    /// direction (which never crosses the cut).
    pub fn phi_ext_prime(&self, z: C64) -> Result<C64> {
        let h = 1e-3_f64.min(0.05 * (1.0 - z.re.abs()).abs().max(1e-3));
        let f = |x: f64| self.phi_ext(z + C64::new(x, 0.0));
        let (f1, f2, f3, f4) = (f(-2.0 * h)?, f(-h)?, f(h)?, f(2.0 * h)?);
        Ok((f1 - 8.0 * f2 + 8.0 * f3 - f4) / (12.0 * h))
    }

    /// Extended electric dispersion function
    /// D~(lambda, k) = 1 - Phi~(-i lambda / k) / k^2, defined for
    /// Re lambda >= 0 and, for Re lambda < 0, inside
    /// (Im lambda)^2 < k^2 + (Re lambda)^2.
    pub fn d_ext(&self, lambda: C64, k: f64) -> Result<C64> {
        check_k(k)?;
        if lambda.re < 0.0 && lambda.im * lambda.im >= k * k + lambda.re * lambda.re {
            return Err(Error::Domain(format!(
                "lambda = {lambda} is outside the continuation domain of D for k = {k}"
            )));
        }
        let z = -I * lambda / k;
        Ok(1.0 - self.phi_ext(z)? / (k * k))
    }

    /// Langmuir frequency tau_*(k) for 0 < k <= kappa0, from inverting
    /// Omega(y) = k^2 on [0, 1].
    pub fn tau_star(&self, k: f64) -> Result<f64> {
        check_k(k)?;
        let kappa0 = self.kappa0();
        if k > kappa0 * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "tau_* is defined for k <= kappa0 = {kappa0:.6}; use lambda_elec for the damped continuation (k = {k})"
            )));
        }
        let k = k.min(kappa0);
        let target = k * k;
        // Omega is strictly increasing with Omega(0) = 0, Omega(1) = kappa0^2.
        let mut lo = 0.0;
        let mut hi = 1.0;
        let mut y = (target / self.table.constants.tau0_sq).clamp(1e-16, 1.0);
        for _ in 0..80 {
            let f = self.table.omega_big(y)? - target;
            if f > 0.0 {
                hi = y;
            } else {
                lo = y;
            }
            let fp = self.table.omega_big_prime(y)?;
            let mut ynew = y - f / fp;
            if !(ynew > lo && ynew < hi) {
                ynew = 0.5 * (lo + hi);
            }
            if (ynew - y).abs() <= 1e-16 * y.max(1e-300) {
                y = ynew;
                break;
            }
            y = ynew;
        }
        Ok((target / y).sqrt())
    }

    /// Klein-Gordon frequency nu_*(k) for k >= 0, from the fixed point
    /// x = k^2 + psi(k^2/x).
    pub fn nu_star(&self, k: f64) -> Result<f64> {
        if !(k >= 0.0) {
            return Err(Error::Domain(format!("nu_* needs k >= 0, got {k}")));
        }
        let k2 = k * k;
        let mut x = k2 + self.table.constants.tau0_sq;
        for _ in 0..60 {
            let y = if x > 0.0 { (k2 / x).min(1.0) } else { 1.0 };
            let f = -x + k2 + self.table.psi(y)?;
            let fp = -1.0 - k2 / (x * x) * self.table.psi_prime(y)?;
            let step = f / fp;
            x -= step;
            if step.abs() <= 1e-15 * x.max(1.0) {
                break;
            }
        }
        Ok(x.sqrt())
    }

    /// Residual of the nu_* fixed point (for diagnostics and tests).
    pub fn nu_star_residual(&self, k: f64, nu: f64) -> Result<f64> {
        let x = nu * nu;
        let y = if k > 0.0 { (k * k / x).min(1.0) } else { 0.0 };
        Ok((-x + k * k + self.table.psi(y)?).abs())
    }

    /// Electric root lambda_+(k): i tau_*(k) on the imaginary axis for
    /// k <= kappa0, and the Landau-damped continuation for
    /// kappa0 < k <= kappa0 + delta. lambda_-(k) is the conjugate.
    pub fn lambda_elec(&self, k: f64) -> Result<C64> {
        check_k(k)?;
        let kappa0 = self.kappa0();
        if k <= kappa0 {
            return Ok(I * self.tau_star(k)?);
        }
        // march the seed from the threshold
        let steps = ((k - kappa0) / (0.01 * kappa0)).ceil().max(2.0) as usize;
        let mut z = C64::new(1.0, 0.0);
        for j in 1..=steps {
            let kj = kappa0 + (k - kappa0) * j as f64 / steps as f64;
            z = self.continuation_newton(kj, z)?;
        }
        Ok(I * k * z)
    }

    /// Same, seeded from a previous grid point (for sweeps).
    pub fn lambda_elec_seeded(&self, k: f64, seed: C64) -> Result<C64> {
        check_k(k)?;
        let kappa0 = self.kappa0();
        if k <= kappa0 {
            return Ok(I * self.tau_star(k)?);
        }
        let z = self.continuation_newton(k, seed)?;
        Ok(I * k * z)
    }

    /// Newton iteration on z |-> k^2 - Phi~(z), with step halving.
    fn continuation_newton(&self, k: f64, seed: C64) -> Result<C64> {
        if !self.table.eq.has_analytic_kernels() {
            return Err(Error::Unsupported(
                "the continuation past kappa0 needs analytic kernels (built-in equilibria)".into(),
            ));
        }
        let target = k * k;
        let validate = |z: C64, k: f64| -> Result<C64> {
            if z.im < -1e-9 || z.re.abs() >= 1.0 + 1e-9 {
                return Err(Error::Convergence(format!(
                    "continuation root left its branch at k = {k}: z = {z}; reduce the continuation width delta"
                )));
            }
            Ok(z)
        };
        let mut z = seed;
        let mut g = target - self.phi_ext(z)?;
        for _ in 0..60 {
            if g.norm() <= 1e-13 * target.max(1.0) {
                return validate(z, k);
            }
            let dphi = self.phi_ext_prime(z)?;
            let step = g / dphi;
            let mut scale = 1.0;
            let mut accepted = false;
            for _ in 0..25 {
                let znew = z + step * scale;
                if znew.im >= -0.5 && znew.re.abs() < 1.0 + 1e-6 {
                    if let Ok(phi_new) = self.phi_ext(znew) {
                        let gnew = target - phi_new;
                        if gnew.norm() < g.norm() {
                            z = znew;
                            g = gnew;
                            accepted = true;
                            break;
                        }
                    }
                }
                scale *= 0.5;
            }
            if !accepted {
                // stalled at the evaluation noise floor; the root residual
                // contract is |D~| <= 1e-9
                if g.norm() <= 1e-9 * target.max(1.0) {
                    return validate(z, k);
                }
                return Err(Error::Convergence(format!(
                    "continuation Newton stalled at k = {k} (|residual| = {:.3e}); reduce the continuation width delta",
                    g.norm()
                )));
            }
        }
        Err(Error::Convergence(format!(
            "continuation Newton did not converge at k = {k}; reduce the continuation width delta"
        )))
    }

    /// d/dlambda D at a purely imaginary outer-axis point, via the closed
    /// Omega form: dD/dtau = 2 Omega'(y)/tau^3, d/dlambda = -i d/dtau.
    pub fn d_prime_outer(&self, tau: f64, k: f64) -> Result<C64> {
        check_k(k)?;
        if tau.abs() <= k {
            return Err(Error::Domain("outer-axis derivative needs |tau| > k".into()));
        }
        let y = k * k / (tau * tau);
        Ok(-I * 2.0 * self.table.omega_big_prime(y)? / (tau * tau * tau))
    }

    /// d/dlambda of the extended D at any continuation point, via the chain
    /// rule through Phi~'.
    pub fn d_ext_prime(&self, lambda: C64, k: f64) -> Result<C64> {
        let z = -I * lambda / k;
        Ok(I * self.phi_ext_prime(z)? / (k * k * k))
    }

    /// Closed-form residue a_+(k) = 1/d_lambda D at the root.
    pub fn a_plus_closed(&self, k: f64) -> Result<C64> {
        check_k(k)?;
        let kappa0 = self.kappa0();
        if k <= kappa0 {
            let tau = self.tau_star(k)?;
            let y = k * k / (tau * tau);
            Ok(I * tau * tau * tau / (2.0 * self.table.omega_big_prime(y)?))
        } else {
            let lambda = self.lambda_elec(k)?;
            Ok(1.0 / self.d_ext_prime(lambda, k)?)
        }
    }

    /// Closed-form residue b_+(k) = 1/(2 nu + d_lambda L[N])(i nu_*).
    pub fn b_plus_closed(&self, k: f64) -> Result<C64> {
        let nu = self.nu_star(k)?;
        let k2 = k * k;
        let y = if k > 0.0 { (k2 / (nu * nu)).min(1.0) } else { 0.0 };
        let psi_p = self.table.psi_prime(y)?;
        Ok(-I * nu.powi(3) / (2.0 * (nu.powi(4) + k2 * psi_p)))
    }

    /// Winding number of the chosen dispersion function around a rectangle
    /// strictly inside Re lambda > 0: the zero count it encloses.
    pub fn stability_winding(
        &self,
        k: f64,
        re: (f64, f64),
        im: (f64, f64),
        which: DispersionFn,
    ) -> Result<i64> {
        if !(re.0 > 0.0) {
            return Err(Error::Domain(format!(
                "the stability rectangle must sit strictly inside Re lambda > 0, got Re in [{}, {}]",
                re.0, re.1
            )));
        }
        match which {
            DispersionFn::D => Self::winding(&|z| self.d_eval(z, k), re, im),
            DispersionFn::M => Self::winding(&|z| self.m_eval(z, k), re, im),
        }
    }

    /// Winding number of f around the boundary of a rectangle
    /// [re_lo, re_hi] x [im_lo, im_hi], by trapezoidal argument tracking with
    /// adaptive refinement.
    pub fn winding<F: Fn(C64) -> Result<C64>>(
        f: &F,
        re: (f64, f64),
        im: (f64, f64),
    ) -> Result<i64> {
        let corners = [
            C64::new(re.0, im.0),
            C64::new(re.1, im.0),
            C64::new(re.1, im.1),
            C64::new(re.0, im.1),
            C64::new(re.0, im.0),
        ];
        let mut total = 0.0;
        for edge in corners.windows(2) {
            total += Self::edge_arg_change(f, edge[0], edge[1], 0)?;
        }
        let w = total / (2.0 * std::f64::consts::PI);
        let rounded = w.round();
        if (w - rounded).abs() > 0.2 {
            return Err(Error::Convergence(format!(
                "winding number did not settle onto an integer: {w:.4}"
            )));
        }
        Ok(rounded as i64)
    }

    fn edge_arg_change<F: Fn(C64) -> Result<C64>>(
        f: &F,
        a: C64,
        b: C64,
        depth: u32,
    ) -> Result<f64> {
        const N: usize = 32;
        let mut prev = f(a)?;
        check_away_from_zero(prev, a)?;
        let mut change = 0.0;
        let mut start = a;
        for i in 1..=N {
            let t = i as f64 / N as f64;
            let zpt = a + (b - a) * t;
            let cur = f(zpt)?;
            check_away_from_zero(cur, zpt)?;
            let dphi = (cur / prev).arg();
            if dphi.abs() > std::f64::consts::FRAC_PI_2 {
                if depth >= 12 {
                    return Err(Error::Convergence(format!(
                        "argument tracking failed near {zpt}: phase step {dphi:.3}"
                    )));
                }
                change += Self::edge_arg_change(f, start, zpt, depth + 1)?;
            } else {
                change += dphi;
            }
            prev = cur;
            start = zpt;
        }
        Ok(change)
    }

    /// Root curves, residues and the continuation over a k-grid (parallel
    /// when the `parallel` feature is on).
    pub fn mode_curves(&self, kmax: f64, n: usize, delta: Option<f64>) -> Result<ModeCurves> {
        self.curves_impl(kmax, n, delta, true)
    }

    /// Sequential variant (kept callable for the benches).
    pub fn mode_curves_seq(&self, kmax: f64, n: usize, delta: Option<f64>) -> Result<ModeCurves> {
        self.curves_impl(kmax, n, delta, false)
    }

    fn curves_impl(
        &self,
        kmax: f64,
        n: usize,
        delta: Option<f64>,
        parallel: bool,
    ) -> Result<ModeCurves> {
        if !(kmax > 0.0) || n < 2 {
            return Err(Error::Config("mode_curves needs kmax > 0 and n >= 2".into()));
        }
        let kappa0 = self.kappa0();
        let delta = delta.unwrap_or_else(|| self.default_delta());
        let k_grid: Vec<f64> = (1..=n).map(|i| kmax * i as f64 / n as f64).collect();

        // coarse sequential pre-pass for the continuation seeds
        let cont_max = (kappa0 + delta).min(kmax);
        let mut seeds: Vec<(f64, C64)> = vec![(kappa0, C64::new(1.0, 0.0))];
        if self.table.eq.has_analytic_kernels() && cont_max > kappa0 {
            let coarse = 16;
            let mut z = C64::new(1.0, 0.0);
            for j in 1..=coarse {
                let kj = kappa0 + (cont_max - kappa0) * j as f64 / coarse as f64;
                z = self.continuation_newton(kj, z)?;
                seeds.push((kj, z));
            }
        }
        let seeds = &seeds;

        let eval = |i: usize| -> Result<(f64, f64, C64, C64, C64)> {
            let k = k_grid[i];
            let tau = if k <= kappa0 * (1.0 + 1e-12) {
                self.tau_star(k.min(kappa0))?
            } else {
                f64::NAN
            };
            let nu = self.nu_star(k)?;
            let b = self.b_plus_closed(k)?;
            let (lam, a) = if k <= kappa0 {
                (I * tau, self.a_plus_closed(k)?)
            } else if k <= kappa0 + delta && self.table.eq.has_analytic_kernels() {
                let seed = seeds
                    .iter()
                    .rev()
                    .find(|(ks, _)| *ks <= k)
                    .map(|(_, z)| *z)
                    .unwrap_or(C64::new(1.0, 0.0));
                let lam = self.lambda_elec_seeded(k, seed)?;
                (lam, 1.0 / self.d_ext_prime(lam, k)?)
            } else {
                (C64::new(f64::NAN, f64::NAN), C64::new(f64::NAN, f64::NAN))
            };
            Ok((tau, nu, lam, a, b))
        };

        let rows: Vec<Result<(f64, f64, C64, C64, C64)>> = if parallel {
            par::map_indexed(n, eval)
        } else {
            (0..n).map(eval).collect()
        };

        let mut curves = ModeCurves {
            k_grid,
            tau_star: Vec::with_capacity(n),
            nu_star: Vec::with_capacity(n),
            lambda_elec: Vec::with_capacity(n),
            a_plus: Vec::with_capacity(n),
            b_plus: Vec::with_capacity(n),
            kappa0,
            delta,
        };
        for row in rows {
            let (tau, nu, lam, a, b) = row?;
            curves.tau_star.push(tau);
            curves.nu_star.push(nu);
            curves.lambda_elec.push(lam);
            curves.a_plus.push(a);
            curves.b_plus.push(b);
        }
        Ok(curves)
    }
}

fn check_away_from_zero(v: C64, at: C64) -> Result<()> {
    if v.norm() < 1e-8 {
        return Err(Error::Convergence(format!(
            "contour passes within 1e-8 of a zero at lambda = {at}"
        )));
    }
    Ok(())
}

fn check_k(k: f64) -> Result<()> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("wavenumber k must be positive, got {k}")));
    }
    Ok(())
}
