//! Radial equilibria mu(v) = phi(<v>) = F(<v>^2) and their scalar invariants.
//!
//! Built-in profiles: a relativistic Maxwellian and an algebraic power law,
//! both normalized to a prescribed mass n0. Tabulated profiles interpolate
//! (s, phi) samples with a monotone cubic and are rescaled so the mass
//! invariant holds by construction; features that need analytic continuation
//! of the kernels are disabled for them.

use crate::numerics::interp::Pchip;
use crate::numerics::quad;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

const TWO_PI_CUBED_SQRT: f64 = 15.749_609_945_722_419; // (2 pi)^(3/2)

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Maxwellian,
    Powerlaw,
    Tabulated,
}

/// User-facing description of an equilibrium.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquilibriumSpec {
    pub kind: Kind,
    /// Total mass of the distribution.
    pub n0: f64,
    /// Power-law exponent (mu ~ <v>^-2M); required for `Kind::Powerlaw`.
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    /// Samples (s, phi(s)) for `Kind::Tabulated`, s ascending from <= 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<(f64, f64)>>,
}

impl EquilibriumSpec {
    pub fn maxwellian(n0: f64) -> Self {
        EquilibriumSpec {
            kind: Kind::Maxwellian,
            n0,
            m: None,
            table: None,
        }
    }

    pub fn powerlaw(n0: f64, m: f64) -> Self {
        EquilibriumSpec {
            kind: Kind::Powerlaw,
            n0,
            m: Some(m),
            table: None,
        }
    }
}

#[derive(Debug, Clone)]
enum Profile {
    /// phi(s) = c exp(-s^2/2), c = n0 e^{1/2} / (2 pi)^{3/2}
    Maxwellian { c: f64 },
    /// phi(s) = c0 s^{-2M}
    Powerlaw { c0: f64, m: f64 },
    Tabulated {
        interp: Pchip,
        scale: f64,
        s_max: f64,
    },
}

/// A validated equilibrium with evaluable profile and derivative.
#[derive(Debug, Clone)]
pub struct Equilibrium {
    pub spec: EquilibriumSpec,
    profile: Profile,
    /// Set when tabulated input fails the monotone-decrease check.
    pub monotone_warning: bool,
}

/// Scalar invariants derived from the reduced kernels.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ModelConstants {
    /// Effective plasma frequency squared.
    pub tau0_sq: f64,
    /// Fourth-moment constant controlling the small-k Langmuir curvature.
    pub tau1_sq: f64,
    /// Threshold wavenumber squared for the electric branch.
    pub kappa0_sq: f64,
    /// psi(1); upper Klein-Gordon envelope constant.
    pub q0_sq: f64,
}

/// Build and validate an equilibrium from its spec.
pub fn build_equilibrium(spec: &EquilibriumSpec) -> Result<Equilibrium> {
    if !(spec.n0 > 0.0) || !spec.n0.is_finite() {
        return Err(Error::Config(format!(
            "equilibrium mass n0 must be positive and finite, got {}",
            spec.n0
        )));
    }
    let (profile, monotone_warning) = match spec.kind {
        Kind::Maxwellian => {
            let c = spec.n0 * (0.5f64).exp() / TWO_PI_CUBED_SQRT;
            (Profile::Maxwellian { c }, false)
        }
        Kind::Powerlaw => {
            let m = spec.m.ok_or_else(|| {
                Error::Config("powerlaw equilibrium requires the exponent M".into())
            })?;
            if !(m > 3.0) {
                return Err(Error::Config(format!(
                    "powerlaw exponent must satisfy M > 3 (finite mass and finite tau0^2, tau1^2); got M = {m}"
                )));
            }
            // Mass is linear in c0: one Newton step is exact.
            let unit = Equilibrium {
                spec: spec.clone(),
                profile: Profile::Powerlaw { c0: 1.0, m },
                monotone_warning: false,
            };
            let c0 = spec.n0 / mass(&unit)?;
            (Profile::Powerlaw { c0, m }, false)
        }
        Kind::Tabulated => {
            let table = spec
                .table
                .as_ref()
                .ok_or_else(|| Error::Config("tabulated equilibrium requires samples".into()))?;
            if table.len() < 4 {
                return Err(Error::Config(
                    "tabulated equilibrium needs at least 4 samples".into(),
                ));
            }
            if table[0].0 > 1.0 {
                return Err(Error::Config(
                    "tabulated samples must cover s = 1 (first abscissa <= 1)".into(),
                ));
            }
            let xs: Vec<f64> = table.iter().map(|p| p.0).collect();
            let ys: Vec<f64> = table.iter().map(|p| p.1).collect();
            if ys.iter().any(|&v| v < 0.0) {
                return Err(Error::Config("tabulated phi values must be nonnegative".into()));
            }
            let warn = ys.windows(2).any(|w| w[1] > w[0] + 1e-14);
            let s_max = *xs.last().unwrap();
            let interp = Pchip::new(xs, ys);
            let unit = Equilibrium {
                spec: spec.clone(),
                profile: Profile::Tabulated {
                    interp: interp.clone(),
                    scale: 1.0,
                    s_max,
                },
                monotone_warning: warn,
            };
            let m0 = mass(&unit)?;
            if !(m0 > 0.0) {
                return Err(Error::Config("tabulated profile has zero mass".into()));
            }
            (
                Profile::Tabulated {
                    interp,
                    scale: spec.n0 / m0,
                    s_max,
                },
                warn,
            )
        }
    };
    Ok(Equilibrium {
        spec: spec.clone(),
        profile,
        monotone_warning,
    })
}

impl Equilibrium {
    /// phi(s) for s >= 1.
    pub fn phi(&self, s: f64) -> f64 {
        match &self.profile {
            Profile::Maxwellian { c } => c * (-0.5 * s * s).exp(),
            Profile::Powerlaw { c0, m } => c0 * s.powf(-2.0 * m),
            Profile::Tabulated { interp, scale, s_max } => {
                if s > *s_max {
                    0.0
                } else {
                    scale * interp.eval(s).max(0.0)
                }
            }
        }
    }

    /// phi'(s) for s >= 1.
    pub fn phi_prime(&self, s: f64) -> f64 {
        match &self.profile {
            Profile::Maxwellian { c } => -c * s * (-0.5 * s * s).exp(),
            Profile::Powerlaw { c0, m } => -2.0 * m * c0 * s.powf(-2.0 * m - 1.0),
            Profile::Tabulated { interp, scale, s_max } => {
                if s > *s_max {
                    0.0
                } else {
                    scale * interp.eval_deriv(s)
                }
            }
        }
    }

    /// Whether the reduced kernels admit the closed-form analytic
    /// continuation needed past the electric threshold.
    pub fn has_analytic_kernels(&self) -> bool {
        !matches!(self.profile, Profile::Tabulated { .. })
    }

    /// Normalization constant of the built-in profile (c for the Maxwellian,
    /// c0 for the power law).
    pub fn norm_constant(&self) -> Option<f64> {
        match &self.profile {
            Profile::Maxwellian { c } => Some(*c),
            Profile::Powerlaw { c0, .. } => Some(*c0),
            Profile::Tabulated { .. } => None,
        }
    }

    pub fn powerlaw_exponent(&self) -> Option<f64> {
        match &self.profile {
            Profile::Powerlaw { m, .. } => Some(*m),
            _ => None,
        }
    }

    /// Largest s with any support (used to bound tail integrals).
    fn s_cut(&self) -> Option<f64> {
        match &self.profile {
            Profile::Tabulated { s_max, .. } => Some(*s_max),
            _ => None,
        }
    }

    /// int_a^inf phi(s) s ds
    pub fn tail_phi_s(&self, a: f64, rel_tol: f64) -> Result<f64> {
        match self.s_cut() {
            Some(s_max) if a >= s_max => Ok(0.0),
            Some(s_max) => Ok(quad::integrate(|s| self.phi(s) * s, a, s_max, rel_tol)?.0),
            None => Ok(quad::integrate_tail(|s| self.phi(s) * s, a, rel_tol)?.0),
        }
    }

    /// int_a^inf phi'(s) s^2 ds
    pub fn tail_phi_prime_s2(&self, a: f64, rel_tol: f64) -> Result<f64> {
        match self.s_cut() {
            Some(s_max) if a >= s_max => Ok(0.0),
            Some(s_max) => {
                Ok(quad::integrate(|s| self.phi_prime(s) * s * s, a, s_max, rel_tol)?.0)
            }
            None => Ok(quad::integrate_tail(|s| self.phi_prime(s) * s * s, a, rel_tol)?.0),
        }
    }
}

/// Total mass 4 pi int_0^inf phi(sqrt(1+r^2)) r^2 dr.
pub fn mass(eq: &Equilibrium) -> Result<f64> {
    let f = |r: f64| eq.phi((1.0 + r * r).sqrt()) * r * r;
    let (head, _) = quad::integrate(f, 0.0, 2.0, 1e-12)?;
    let (tail, _) = quad::integrate_tail(f, 2.0, 1e-12)?;
    Ok(4.0 * std::f64::consts::PI * (head + tail))
}

/// tau0^2 by the velocity-space formula
/// int (1 + (2/3)|v|^2) / (1+|v|^2)^{3/2} mu(v) dv.
///
/// Also evaluates the two kernel-route identities (-1/2 int q and
/// -int u^2 kappa) and fails if the three disagree beyond 1e-8 relative.
pub fn tau0_sq(eq: &Equilibrium) -> Result<f64> {
    let routes = tau0_routes(eq)?;
    let spread = routes.relative_spread();
    if spread > 1e-8 {
        return Err(Error::Convergence(format!(
            "tau0^2 route disagreement: velocity {:.15e}, -1/2 int q {:.15e}, -int u^2 kappa {:.15e} (spread {:.3e})",
            routes.velocity, routes.from_q, routes.from_kappa, spread
        )));
    }
    Ok(routes.velocity)
}

/// The three independent evaluations of tau0^2.
#[derive(Debug, Clone, Copy)]
pub struct Tau0Routes {
    pub velocity: f64,
    pub from_q: f64,
    pub from_kappa: f64,
}

impl Tau0Routes {
    pub fn relative_spread(&self) -> f64 {
        let vals = [self.velocity, self.from_q, self.from_kappa];
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (hi - lo) / hi.abs().max(1e-300)
    }
}

/// tau1^2 = -int u^4 kappa(u) du > 0, by direct nested quadrature.
pub fn tau1_sq(eq: &Equilibrium) -> Result<f64> {
    let k_at = kappa_closure(eq);
    let (v, _) = quad::integrate(|u| u.powi(4) * k_at(u), -1.0, 1.0, 1e-11)?;
    Ok(-v)
}

/// kappa0^2 = -int u^2 kappa(u) / (1 - u^2) du > 0, by direct nested
/// quadrature (the same integral the dispersion module evaluates as
/// Omega(1) on the kernel table).
pub fn kappa0_sq(eq: &Equilibrium) -> Result<f64> {
    let k_at = kappa_closure(eq);
    let (v, _) = quad::integrate(|u| u * u / (1.0 - u * u) * k_at(u), -1.0, 1.0, 1e-11)?;
    Ok(-v)
}

fn kappa_closure(eq: &Equilibrium) -> impl Fn(f64) -> f64 + '_ {
    move |u: f64| {
        let a = 1.0 / (1.0 - u * u).sqrt();
        2.0 * std::f64::consts::PI * eq.tail_phi_prime_s2(a, 1e-11).unwrap_or(0.0)
    }
}

pub fn tau0_routes(eq: &Equilibrium) -> Result<Tau0Routes> {
    let f = |r: f64| {
        let s2 = 1.0 + r * r;
        (1.0 + 2.0 / 3.0 * r * r) / s2.powf(1.5) * eq.phi(s2.sqrt()) * r * r
    };
    let (head, _) = quad::integrate(f, 0.0, 2.0, 1e-12)?;
    let (tail, _) = quad::integrate_tail(f, 2.0, 1e-12)?;
    let velocity = 4.0 * std::f64::consts::PI * (head + tail);

    // -1/2 int_{-1}^{1} q(u) du, q(u) = -4 pi (1-u^2) int_a^inf phi s ds
    let q_at = |u: f64| -> f64 {
        let a = 1.0 / (1.0 - u * u).sqrt();
        -4.0 * std::f64::consts::PI * (1.0 - u * u) * eq.tail_phi_s(a, 1e-11).unwrap_or(0.0)
    };
    let (iq, _) = quad::integrate(q_at, -1.0, 1.0, 1e-11)?;
    let from_q = -0.5 * iq;

    // -int_{-1}^{1} u^2 kappa(u) du, kappa(u) = 2 pi int_a^inf phi' s^2 ds
    let k_at = |u: f64| -> f64 {
        let a = 1.0 / (1.0 - u * u).sqrt();
        2.0 * std::f64::consts::PI * eq.tail_phi_prime_s2(a, 1e-11).unwrap_or(0.0)
    };
    let (ik, _) = quad::integrate(|u| u * u * k_at(u), -1.0, 1.0, 1e-11)?;
    let from_kappa = -ik;

    Ok(Tau0Routes {
        velocity,
        from_q,
        from_kappa,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maxwellian_phi_at_one() {
        // phi(1) = n0 / (2 pi)^{3/2}
        let eq = build_equilibrium(&EquilibriumSpec::maxwellian(1.0)).unwrap();
        assert!((eq.phi(1.0) - 0.063_493_635_934_240_97).abs() < 1e-12);
    }

    #[test]
    fn powerlaw_phi_at_one_is_c0() {
        let eq = build_equilibrium(&EquilibriumSpec::powerlaw(1.0, 4.0)).unwrap();
        let c0 = eq.norm_constant().unwrap();
        assert!((eq.phi(1.0) - c0).abs() < 1e-15);
        // closed form at M = 4: c0 = 8 n0 / pi^2
        assert!((c0 - 8.0 / std::f64::consts::PI.powi(2)).abs() < 1e-9);
    }

    #[test]
    fn mass_normalization_all_builtins() {
        for n0 in [0.5, 1.0, 2.0] {
            for spec in [
                EquilibriumSpec::maxwellian(n0),
                EquilibriumSpec::powerlaw(n0, 4.0),
            ] {
                let eq = build_equilibrium(&spec).unwrap();
                let m = mass(&eq).unwrap();
                assert!(
                    ((m - n0) / n0).abs() < 1e-8,
                    "{:?} n0={n0}: mass {m}",
                    spec.kind
                );
            }
        }
    }

    #[test]
    fn rejects_bad_exponent() {
        let err = build_equilibrium(&EquilibriumSpec::powerlaw(1.0, 2.0)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("M > 3"), "diagnostic should name the invariant: {msg}");
    }

    #[test]
    fn phi_prime_nonpositive() {
        for spec in [
            EquilibriumSpec::maxwellian(1.0),
            EquilibriumSpec::powerlaw(1.0, 4.0),
        ] {
            let eq = build_equilibrium(&spec).unwrap();
            for i in 0..200 {
                let s = 1.0 + i as f64 * 0.05;
                assert!(eq.phi_prime(s) <= 0.0);
                assert!(eq.phi(s) >= 0.0);
            }
        }
    }

    #[test]
    fn tau0_linear_in_mass() {
        let eq1 = build_equilibrium(&EquilibriumSpec::maxwellian(1.0)).unwrap();
        let eq2 = build_equilibrium(&EquilibriumSpec::maxwellian(2.0)).unwrap();
        let t1 = tau0_sq(&eq1).unwrap();
        let t2 = tau0_sq(&eq2).unwrap();
        assert!((t2 - 2.0 * t1).abs() < 1e-9 * t2);
    }

    #[test]
    fn tabulated_warns_on_nonmonotone() {
        let mut table: Vec<(f64, f64)> = (0..200)
            .map(|i| {
                let s = 0.9 + i as f64 * 0.05;
                (s, (-0.5 * s * s).exp())
            })
            .collect();
        table[40].1 *= 1.5; // inject a bump
        let spec = EquilibriumSpec {
            kind: Kind::Tabulated,
            n0: 1.0,
            m: None,
            table: Some(table),
        };
        let eq = build_equilibrium(&spec).unwrap();
        assert!(eq.monotone_warning);
        assert!(!eq.has_analytic_kernels());
    }

    #[test]
    fn tabulated_mass_rescaled() {
        let table: Vec<(f64, f64)> = (0..400)
            .map(|i| {
                let s = 0.95 + i as f64 * 0.025;
                (s, (-0.5 * s * s).exp())
            })
            .collect();
        let spec = EquilibriumSpec {
            kind: Kind::Tabulated,
            n0: 0.7,
            m: None,
            table: Some(table),
        };
        let eq = build_equilibrium(&spec).unwrap();
        let m = mass(&eq).unwrap();
        assert!(((m - 0.7) / 0.7).abs() < 1e-6, "mass {m}");
    }
}
