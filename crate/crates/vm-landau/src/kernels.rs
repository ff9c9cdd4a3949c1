//! Reduction of the 3-D velocity integrals to the 1-D kernels kappa(u), q(u),
//! the time-domain memory kernels K_k(t), N_k(t), and their Laplace
//! transforms.
//!
//! The workhorse is a Cauchy-integral evaluator with analytic subtraction:
//! int g(u)/(u+z) du is computed as the smooth difference quotient
//! int (g(u) - g(u0))/(u - u0) du plus g(u0) Log((u0-1)/(u0+1)) with u0 = -z.
//! Because the difference quotient of an analytic g is analytic, the rule
//! keeps spectral accuracy arbitrarily close to the cut, and the principal
//! branch of the logarithm reproduces both the Plemelj boundary value on the
//! cut and the holomorphic continuation across it.

use crate::equilibrium::{Equilibrium, ModelConstants, Tau0Routes};
use crate::numerics::gauss::SegmentedRule;
use crate::numerics::interp::Pchip;
use crate::numerics::oscillatory::{self, PanelSet};
use crate::numerics::par;
use crate::{C64, Error, Result};
use std::sync::Arc;

const PI: f64 = std::f64::consts::PI;
/// |k|t beyond which the memory kernels switch to Filon quadrature.
const FILON_SWITCH: f64 = 50.0;
/// k below which the memory kernels use the small-k moment series.
const SMALL_K: f64 = 1e-4;

/// kappa(u) = 2 pi int_{1/sqrt(1-u^2)}^inf phi'(s) s^2 ds, u in (-1, 1).
pub fn kappa(eq: &Equilibrium, u: f64) -> Result<f64> {
    check_u(u)?;
    let a = 1.0 / (1.0 - u * u).sqrt();
    Ok(2.0 * PI * eq.tail_phi_prime_s2(a, 1e-11)?)
}

/// q(u) = -4 pi (1-u^2) int_{1/sqrt(1-u^2)}^inf phi(s) s ds.
pub fn q_kernel(eq: &Equilibrium, u: f64) -> Result<f64> {
    check_u(u)?;
    let a = 1.0 / (1.0 - u * u).sqrt();
    Ok(-4.0 * PI * (1.0 - u * u) * eq.tail_phi_s(a, 1e-11)?)
}

/// d kappa / du, from differentiating the lower limit of the tail integral.
pub fn kappa_prime(eq: &Equilibrium, u: f64) -> Result<f64> {
    check_u(u)?;
    let a = 1.0 / (1.0 - u * u).sqrt();
    Ok(-2.0 * PI * u * a.powi(5) * eq.phi_prime(a))
}

/// d q / du.
pub fn q_prime(eq: &Equilibrium, u: f64) -> Result<f64> {
    check_u(u)?;
    let a = 1.0 / (1.0 - u * u).sqrt();
    let qv = q_kernel(eq, u)?;
    Ok(2.0 * u * a * a * (2.0 * PI * eq.phi(a) - qv))
}

fn check_u(u: f64) -> Result<()> {
    if !(u.abs() < 1.0) {
        return Err(Error::Domain(format!(
            "kernel argument must satisfy |u| < 1, got {u}"
        )));
    }
    Ok(())
}

/// Holomorphic continuation of kappa. Valid on {Im z < 0} and on
/// {Im z >= 0, 1 - (Re z)^2 + (Im z)^2 > 0}; built-in equilibria only.
pub fn kappa_analytic(eq: &Equilibrium, z: C64) -> Result<C64> {
    if z.im >= 0.0 && 1.0 - z.re * z.re + z.im * z.im <= 0.0 {
        return Err(Error::Domain(format!(
            "kappa continuation not defined at z = {z} (outside the holomorphy region)"
        )));
    }
    kappa_cont(eq, z)
}

/// Continuation formula without the public-domain restriction; the closed
/// forms are analytic everywhere off the real rays |z| >= 1.
pub(crate) fn kappa_cont(eq: &Equilibrium, z: C64) -> Result<C64> {
    let c = eq.norm_constant().ok_or_else(unsupported_tabulated)?;
    if let Some(m) = eq.powerlaw_exponent() {
        let beta = 1.0 - z * z;
        Ok(-2.0 * PI * m * c / (m - 1.0) * beta.powf(m - 1.0))
    } else {
        let zeta = 1.0 / (1.0 - z * z);
        Ok(-2.0 * PI * c * (zeta + 2.0) * (-0.5 * zeta).exp())
    }
}

pub(crate) fn kappa_cont_prime(eq: &Equilibrium, z: C64) -> Result<C64> {
    let c = eq.norm_constant().ok_or_else(unsupported_tabulated)?;
    if let Some(m) = eq.powerlaw_exponent() {
        let beta = 1.0 - z * z;
        Ok(4.0 * PI * m * c * z * beta.powf(m - 2.0))
    } else {
        let zeta = 1.0 / (1.0 - z * z);
        Ok(2.0 * PI * c * z * zeta.powi(3) * (-0.5 * zeta).exp())
    }
}

pub(crate) fn q_cont(eq: &Equilibrium, z: C64) -> Result<C64> {
    let c = eq.norm_constant().ok_or_else(unsupported_tabulated)?;
    let beta = 1.0 - z * z;
    if let Some(m) = eq.powerlaw_exponent() {
        Ok(-2.0 * PI * c / (m - 1.0) * beta.powf(m))
    } else {
        let zeta = 1.0 / beta;
        Ok(-4.0 * PI * c * beta * (-0.5 * zeta).exp())
    }
}

pub(crate) fn q_cont_prime(eq: &Equilibrium, z: C64) -> Result<C64> {
    let c = eq.norm_constant().ok_or_else(unsupported_tabulated)?;
    if let Some(m) = eq.powerlaw_exponent() {
        let beta = 1.0 - z * z;
        Ok(4.0 * PI * m * c / (m - 1.0) * z * beta.powf(m - 1.0))
    } else {
        let zeta = 1.0 / (1.0 - z * z);
        Ok(4.0 * PI * c * z * (zeta + 2.0) * (-0.5 * zeta).exp())
    }
}

fn unsupported_tabulated() -> Error {
    Error::Unsupported(
        "analytic kernel continuation requires a built-in equilibrium (tabulated profiles cannot certify holomorphy)"
            .into(),
    )
}

/// Which reduced kernel a Cauchy integral runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CauchyKernel {
    /// g(u) = u kappa(u)  (electric dispersion function)
    Elec,
    /// g(u) = q(u)  (magnetic dispersion function)
    Mag,
}

/// Sampled kernels on a segmented Gauss rule, with derived constants.
#[derive(Debug, Clone)]
pub struct KernelTable {
    pub eq: Equilibrium,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub kappa_vals: Vec<f64>,
    pub q_vals: Vec<f64>,
    g_elec: Vec<f64>,
    pub constants: ModelConstants,
    pub tau0: Tau0Routes,
    /// even kappa moments m_{2j} = -int u^{2j} kappa du, j = 1..4
    moments: [f64; 4],
    kappa_pchip: Pchip,
    q_pchip: Pchip,
    /// Filon amplitude projections of u kappa(u) and u q(u), with the
    /// kernels evaluated by quadrature at the panel nodes.
    filon_uk: Arc<PanelSet>,
    filon_uq: Arc<PanelSet>,
}

const BREAKPOINTS: [f64; 17] = [
    -1.0, -0.995, -0.98, -0.95, -0.9, -0.8, -0.6, -0.3, 0.0, 0.3, 0.6, 0.8, 0.9, 0.95, 0.98,
    0.995, 1.0,
];

impl KernelTable {
    /// Build at the default resolution (256 nodes), doubling until the
    /// three-route tau0^2 identity holds to 1e-8.
    pub fn build(eq: &Equilibrium) -> Result<KernelTable> {
        let velocity_routes = crate::equilibrium::tau0_routes(eq)?;
        let mut per_segment = 16;
        loop {
            let table = Self::build_with(eq, per_segment, velocity_routes.velocity)?;
            if table.tau0.relative_spread() <= 1e-8 || per_segment >= 128 {
                if table.tau0.relative_spread() > 1e-8 {
                    return Err(Error::Convergence(format!(
                        "tau0^2 three-route check failed at maximum kernel resolution: spread {:.3e}",
                        table.tau0.relative_spread()
                    )));
                }
                return Ok(table);
            }
            per_segment *= 2;
        }
    }

    fn build_with(eq: &Equilibrium, per_segment: usize, tau0_velocity: f64) -> Result<KernelTable> {
        let rule = SegmentedRule::new(&BREAKPOINTS, per_segment);
        let n = rule.len();
        let kappa_vals: Vec<f64> =
            par::map_indexed(n, |i| kappa(eq, rule.nodes[i]).unwrap_or(f64::NAN));
        let q_vals: Vec<f64> =
            par::map_indexed(n, |i| q_kernel(eq, rule.nodes[i]).unwrap_or(f64::NAN));
        if kappa_vals.iter().chain(&q_vals).any(|v| !v.is_finite()) {
            return Err(Error::Convergence(
                "kernel quadrature failed at a table node".into(),
            ));
        }
        let g_elec: Vec<f64> = rule
            .nodes
            .iter()
            .zip(&kappa_vals)
            .map(|(u, k)| u * k)
            .collect();

        let mut m = [0.0; 4];
        let mut tau0_q = 0.0;
        let mut kappa0 = 0.0;
        let mut q0 = 0.0;
        for i in 0..n {
            let (u, w) = (rule.nodes[i], rule.weights[i]);
            let u2 = u * u;
            m[0] -= w * u2 * kappa_vals[i];
            m[1] -= w * u2 * u2 * kappa_vals[i];
            m[2] -= w * u2 * u2 * u2 * kappa_vals[i];
            m[3] -= w * u2 * u2 * u2 * u2 * kappa_vals[i];
            tau0_q -= 0.5 * w * q_vals[i];
            kappa0 -= w * u2 / (1.0 - u2) * kappa_vals[i];
            q0 -= 0.5 * w / (1.0 - u2) * q_vals[i];
        }

        let constants = ModelConstants {
            tau0_sq: m[0],
            tau1_sq: m[1],
            kappa0_sq: kappa0,
            q0_sq: q0,
        };
        let tau0 = Tau0Routes {
            velocity: tau0_velocity,
            from_q: tau0_q,
            from_kappa: m[0],
        };

        // interpolants on a dense endpoint-clustered grid with the exact
        // endpoint zeros (the quadrature nodes are too sparse mid-interval
        // for interpolation-grade accuracy)
        let n_dense = 1024;
        let xs: Vec<f64> = (0..=n_dense)
            .map(|j| -(std::f64::consts::PI * j as f64 / n_dense as f64).cos())
            .collect();
        let kv: Vec<f64> = par::map_indexed(xs.len(), |j| {
            if j == 0 || j == n_dense {
                0.0
            } else {
                kappa(eq, xs[j]).unwrap_or(0.0)
            }
        });
        let qv: Vec<f64> = par::map_indexed(xs.len(), |j| {
            if j == 0 || j == n_dense {
                0.0
            } else {
                q_kernel(eq, xs[j]).unwrap_or(0.0)
            }
        });
        let kappa_pchip = Pchip::new(xs.clone(), kv);
        let q_pchip = Pchip::new(xs, qv);

        let filon_pts = oscillatory::mesh_symmetric(
            1.0,
            |u| (0.06_f64).min(0.02 + 0.15 * (1.0 - u.abs())),
            &BREAKPOINTS,
        );
        let filon_uk = Arc::new(PanelSet::build(
            &mut |u: f64| C64::new(u * kappa(eq, u).unwrap_or(0.0), 0.0),
            &filon_pts,
        ));
        let filon_uq = Arc::new(PanelSet::build(
            &mut |u: f64| C64::new(u * q_kernel(eq, u).unwrap_or(0.0), 0.0),
            &filon_pts,
        ));

        Ok(KernelTable {
            eq: eq.clone(),
            nodes: rule.nodes,
            weights: rule.weights,
            kappa_vals,
            q_vals,
            g_elec,
            constants,
            tau0,
            moments: m,
            kappa_pchip,
            q_pchip,
            filon_uk,
            filon_uq,
        })
    }

    pub fn kappa0(&self) -> f64 {
        self.constants.kappa0_sq.sqrt()
    }

    pub fn tau0(&self) -> f64 {
        self.constants.tau0_sq.sqrt()
    }

    /// Fast interpolated kernel values (table accuracy).
    pub fn kappa_interp(&self, u: f64) -> f64 {
        self.kappa_pchip.eval(u)
    }

    pub fn q_interp(&self, u: f64) -> f64 {
        self.q_pchip.eval(u)
    }

    fn g_vals(&self, kind: CauchyKernel) -> &[f64] {
        match kind {
            CauchyKernel::Elec => &self.g_elec,
            CauchyKernel::Mag => &self.q_vals,
        }
    }

    /// g on the real interval, by direct quadrature (not interpolation): the
    /// Plemelj jump terms inherit this accuracy.
    fn g_real(&self, kind: CauchyKernel, u: f64) -> Result<f64> {
        match kind {
            CauchyKernel::Elec => Ok(u * kappa(&self.eq, u)?),
            CauchyKernel::Mag => q_kernel(&self.eq, u),
        }
    }

    fn g_complex(&self, kind: CauchyKernel, z: C64) -> Result<C64> {
        match kind {
            CauchyKernel::Elec => Ok(z * kappa_cont(&self.eq, z)?),
            CauchyKernel::Mag => q_cont(&self.eq, z),
        }
    }

    fn g_complex_prime(&self, kind: CauchyKernel, z: C64) -> Result<C64> {
        match kind {
            CauchyKernel::Elec => Ok(kappa_cont(&self.eq, z)? + z * kappa_cont_prime(&self.eq, z)?),
            CauchyKernel::Mag => q_cont_prime(&self.eq, z),
        }
    }

    /// int_{-1}^{1} g(u)/(u + z) du.
    ///
    /// For real z in (-1, 1) this returns the boundary value from Re lambda > 0
    /// (principal value plus the +i pi g(-z) jump); for complex z it returns the
    /// holomorphic continuation, which coincides with the plain integral on
    /// {Im z < 0} and continues it across the cut for Im z > 0.
    pub fn cauchy(&self, kind: CauchyKernel, z: C64) -> Result<C64> {
        let u0 = -z;
        let g = self.g_vals(kind);
        let real_eps = 1e-13 * (1.0 + z.norm());
        if z.im.abs() <= real_eps {
            let x = z.re;
            if x.abs() >= 1.0 - 1e-12 && x.abs() <= 1.0 + 1e-12 {
                // endpoint: g vanishes there, the integral is a finite limit
                let mut acc = 0.0;
                for i in 0..g.len() {
                    acc += self.weights[i] * g[i] / (self.nodes[i] + x);
                }
                return Ok(C64::new(acc, 0.0));
            }
            if x.abs() < 1.0 {
                // P.V. + i pi jump (limit from Re lambda > 0)
                let u0x = -x;
                let g0 = self.g_real(kind, u0x)?;
                let g0p = self.g_real_prime(kind, u0x)?;
                let mut acc = 0.0;
                for i in 0..g.len() {
                    let du = self.nodes[i] - u0x;
                    acc += self.weights[i]
                        * if du.abs() < 1e-9 {
                            g0p
                        } else {
                            (g[i] - g0) / du
                        };
                }
                let log_term = ((1.0 - u0x) / (1.0 + u0x)).ln();
                return Ok(C64::new(acc + g0 * log_term, PI * g0));
            }
            // real |z| > 1: plain integral, no singularity inside
            let mut acc = 0.0;
            for i in 0..g.len() {
                acc += self.weights[i] * g[i] / (self.nodes[i] + x);
            }
            return Ok(C64::new(acc, 0.0));
        }

        // The pivot subtraction is only needed (and only well-conditioned)
        // near the cut; far away the plain sum is spectrally accurate and
        // the continued g may grow without bound.
        let dx = (u0.re.abs() - 1.0).max(0.0);
        let dist = (dx * dx + u0.im * u0.im).sqrt();
        let g_scale = g.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if dist <= 0.5 && self.eq.has_analytic_kernels() {
            let g0 = self.g_complex(kind, u0)?;
            if g0.is_finite() && g0.norm() <= 1e3 * g_scale.max(1e-300) {
                let g0p = self.g_complex_prime(kind, u0)?;
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..g.len() {
                    let du = self.nodes[i] - u0;
                    acc += self.weights[i]
                        * if du.norm() < 1e-9 {
                            g0p
                        } else {
                            (g[i] - g0) / du
                        };
                }
                let log_term = ((u0 - 1.0) / (u0 + 1.0)).ln();
                return Ok(acc + g0 * log_term);
            }
        }
        if dist <= 0.5 && !self.eq.has_analytic_kernels() {
            // tabulated fallback: subtract the real-axis pivot
            let xr = u0.re.clamp(-1.0 + 1e-9, 1.0 - 1e-9);
            let g0 = self.g_real(kind, xr)?;
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..g.len() {
                acc += self.weights[i] * (g[i] - g0) / (self.nodes[i] - u0);
            }
            let log_term = ((u0 - 1.0) / (u0 + 1.0)).ln();
            return Ok(acc + g0 * log_term);
        }
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..g.len() {
            acc += self.weights[i] * g[i] / (self.nodes[i] - u0);
        }
        Ok(acc)
    }

    fn g_real_prime(&self, kind: CauchyKernel, u: f64) -> Result<f64> {
        match kind {
            CauchyKernel::Elec => Ok(kappa(&self.eq, u)? + u * kappa_prime(&self.eq, u)?),
            CauchyKernel::Mag => q_prime(&self.eq, u),
        }
    }

    /// Omega(y) = -int y u^2 kappa / (1 - y u^2) du on [0, 1].
    pub fn omega_big(&self, y: f64) -> Result<f64> {
        check_y(y)?;
        let mut acc = 0.0;
        for i in 0..self.nodes.len() {
            let u2 = self.nodes[i] * self.nodes[i];
            acc -= self.weights[i] * y * u2 * self.kappa_vals[i] / (1.0 - y * u2);
        }
        Ok(acc)
    }

    /// omega(y) = Omega(y)/y = -int u^2 kappa / (1 - y u^2) du.
    pub fn small_omega(&self, y: f64) -> Result<f64> {
        check_y(y)?;
        let mut acc = 0.0;
        for i in 0..self.nodes.len() {
            let u2 = self.nodes[i] * self.nodes[i];
            acc -= self.weights[i] * u2 * self.kappa_vals[i] / (1.0 - y * u2);
        }
        Ok(acc)
    }

    /// Omega'(y) = -int u^2 kappa / (1 - y u^2)^2 du.
    pub fn omega_big_prime(&self, y: f64) -> Result<f64> {
        check_y(y)?;
        let mut acc = 0.0;
        for i in 0..self.nodes.len() {
            let u2 = self.nodes[i] * self.nodes[i];
            let d = 1.0 - y * u2;
            acc -= self.weights[i] * u2 * self.kappa_vals[i] / (d * d);
        }
        Ok(acc)
    }

    /// psi(y) = -1/2 int q / (1 - y u^2) du on [0, 1].
    pub fn psi(&self, y: f64) -> Result<f64> {
        check_y(y)?;
        let mut acc = 0.0;
        for i in 0..self.nodes.len() {
            let u2 = self.nodes[i] * self.nodes[i];
            acc -= 0.5 * self.weights[i] * self.q_vals[i] / (1.0 - y * u2);
        }
        Ok(acc)
    }

    /// psi'(y) = -1/2 int u^2 q / (1 - y u^2)^2 du.
    pub fn psi_prime(&self, y: f64) -> Result<f64> {
        check_y(y)?;
        let mut acc = 0.0;
        for i in 0..self.nodes.len() {
            let u2 = self.nodes[i] * self.nodes[i];
            let d = 1.0 - y * u2;
            acc -= 0.5 * self.weights[i] * u2 * self.q_vals[i] / (d * d);
        }
        Ok(acc)
    }

    /// Memory kernel K_k(t) = -(1/k) int u kappa(u) sin(k u t) du.
    ///
    /// K is regular at k = 0; below `SMALL_K` the even-moment series is used.
    pub fn memory_k(&self, k: f64, t: f64) -> Result<f64> {
        check_kt(k, t)?;
        if k < SMALL_K {
            // sum_m (-1)^m k^{2m} t^{2m+1} m_{2m+2} / (2m+1)!
            let kt = k * t;
            return Ok(t
                * (self.moments[0] - kt * kt / 6.0 * self.moments[1]
                    + kt.powi(4) / 120.0 * self.moments[2]
                    - kt.powi(6) / 5040.0 * self.moments[3]));
        }
        let omega = k * t;
        if omega <= FILON_SWITCH {
            let mut acc = 0.0;
            for i in 0..self.nodes.len() {
                acc += self.weights[i] * self.g_elec[i] * (omega * self.nodes[i]).sin();
            }
            Ok(-acc / k)
        } else {
            let (val, err) = self.filon_sin(CauchyKernel::Elec, omega)?;
            if err > 1e-8 {
                return Err(Error::Convergence(format!(
                    "oscillatory quadrature for K_k at |k|t = {omega:.3e}: achieved error {err:.3e}"
                )));
            }
            Ok(-val / k)
        }
    }

    /// Memory kernel N_k(t) = (k/2) int u q(u) sin(k u t) du.
    pub fn memory_n(&self, k: f64, t: f64) -> Result<f64> {
        check_kt(k, t)?;
        if k < SMALL_K {
            // N = (k^2/2) [ t m^q_2 - k^2 t^3 m^q_4 / 6 + ... ] with
            // m^q_{2j} = int u^{2j} q du; at this order use the leading term.
            let mq2: f64 = self
                .nodes
                .iter()
                .zip(&self.weights)
                .zip(&self.q_vals)
                .map(|((u, w), q)| w * u * u * q)
                .sum();
            return Ok(0.5 * k * k * t * mq2);
        }
        let omega = k * t;
        if omega <= FILON_SWITCH {
            let mut acc = 0.0;
            for i in 0..self.nodes.len() {
                acc += self.weights[i] * self.nodes[i] * self.q_vals[i] * (omega * self.nodes[i]).sin();
            }
            Ok(0.5 * k * acc)
        } else {
            let (val, err) = self.filon_sin(CauchyKernel::Mag, omega)?;
            if err > 1e-8 {
                return Err(Error::Convergence(format!(
                    "oscillatory quadrature for N_k at |k|t = {omega:.3e}: achieved error {err:.3e}"
                )));
            }
            Ok(0.5 * k * val)
        }
    }

    /// int u kappa(u) sin(omega u) du (Elec) or int u q(u) sin(omega u) du
    /// (Mag). The amplitudes are odd, so the sine projection is the
    /// imaginary part of the cached oscillatory integral.
    fn filon_sin(&self, kind: CauchyKernel, omega: f64) -> Result<(f64, f64)> {
        let set = match kind {
            CauchyKernel::Elec => &self.filon_uk,
            CauchyKernel::Mag => &self.filon_uq,
        };
        let (val, err) = set.integrate(omega);
        Ok((val.im, err))
    }

    /// K_k on a whole time grid (parallel over nodes).
    pub fn memory_k_grid(&self, k: f64, ts: &[f64]) -> Result<Vec<f64>> {
        let vals = par::map_indexed(ts.len(), |i| self.memory_k(k, ts[i]));
        vals.into_iter().collect()
    }

    pub fn memory_n_grid(&self, k: f64, ts: &[f64]) -> Result<Vec<f64>> {
        let vals = par::map_indexed(ts.len(), |i| self.memory_n(k, ts[i]));
        vals.into_iter().collect()
    }

    /// Laplace transform of K_k at lambda (Re lambda >= 0).
    ///
    /// Interior points use the Cauchy evaluator; on the imaginary axis the
    /// closed Omega form applies for |Im lambda| > k and the principal-value
    /// form for |Im lambda| < k. The branch points are one-sided limits.
    pub fn laplace_k(&self, lambda: C64, k: f64) -> Result<C64> {
        check_k(k)?;
        let axis_eps = 1e-13 * (1.0 + lambda.norm());
        if lambda.re < -axis_eps {
            return Err(Error::Domain(format!(
                "laplace_k requires Re lambda >= 0, got {lambda}"
            )));
        }
        if lambda.re > axis_eps {
            let z = -C64::new(0.0, 1.0) * lambda / k;
            return Ok(-self.cauchy(CauchyKernel::Elec, z)? / (k * k));
        }
        let tau = lambda.im;
        if tau.abs() >= k {
            let y = (k * k / (tau * tau)).min(1.0);
            Ok(C64::new(-self.omega_big(y)? / (k * k), 0.0))
        } else {
            let z = C64::new(tau / k, 0.0);
            Ok(-self.cauchy(CauchyKernel::Elec, z)? / (k * k))
        }
    }

    /// Laplace transform of N_k at lambda (Re lambda >= 0); same routing,
    /// with the psi form on the outer axis.
    pub fn laplace_n(&self, lambda: C64, k: f64) -> Result<C64> {
        check_k(k)?;
        let axis_eps = 1e-13 * (1.0 + lambda.norm());
        if lambda.re < -axis_eps {
            return Err(Error::Domain(format!(
                "laplace_n requires Re lambda >= 0, got {lambda}"
            )));
        }
        let tau0_sq = self.constants.tau0_sq;
        if lambda.re > axis_eps {
            let z = -C64::new(0.0, 1.0) * lambda / k;
            let lam_fn = 0.5 * z * self.cauchy(CauchyKernel::Mag, z)?;
            return Ok(-tau0_sq - lam_fn);
        }
        let tau = lambda.im;
        if tau.abs() >= k {
            let y = (k * k / (tau * tau)).min(1.0);
            Ok(C64::new(self.psi(y)? - tau0_sq, 0.0))
        } else {
            let z = C64::new(tau / k, 0.0);
            let lam_fn = 0.5 * z * self.cauchy(CauchyKernel::Mag, z)?;
            Ok(-tau0_sq - lam_fn)
        }
    }

}

fn check_y(y: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::Domain(format!("axis argument y must lie in [0, 1], got {y}")));
    }
    Ok(())
}

fn check_k(k: f64) -> Result<()> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("wavenumber k must be positive, got {k}")));
    }
    Ok(())
}

fn check_kt(k: f64, t: f64) -> Result<()> {
    if !(k >= 0.0) || !(t >= 0.0) {
        return Err(Error::Domain(format!(
            "memory kernels need k >= 0 and t >= 0, got k = {k}, t = {t}"
        )));
    }
    Ok(())
}
