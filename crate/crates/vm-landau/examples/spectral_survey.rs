//! Survey of the spectral quantities for a built-in equilibrium: kernel
//! constants, dispersion roots on both branches, the damped continuation,
//! and a cross-check of the time-stepped Green functions against the
//! Bromwich inversion.

use num_complex::Complex64 as C64;
use vm_landau::dispersion::Dispersion;
use vm_landau::equilibrium::{build_equilibrium, EquilibriumSpec};
use vm_landau::green::{self, GreenKind, TimeGrid};
use vm_landau::kernels::KernelTable;

fn main() -> vm_landau::Result<()> {
    for spec in [
        EquilibriumSpec::maxwellian(1.0),
        EquilibriumSpec::powerlaw(1.0, 4.0),
    ] {
        println!("=== {:?}, n0 = {} ===", spec.kind, spec.n0);
        let eq = build_equilibrium(&spec)?;
        let table = KernelTable::build(&eq)?;
        println!(
            "tau0 = {:.9}, tau1^2 = {:.9}, kappa0 = {:.9}, q0^2 = {:.9}",
            table.tau0(),
            table.constants.tau1_sq,
            table.kappa0(),
            table.constants.q0_sq
        );
        let disp = Dispersion::new(&table);
        let kappa0 = table.kappa0();
        for frac in [0.25, 0.75, 1.0] {
            let k = frac * kappa0;
            println!(
                "  k = {k:.4}: tau_* = {:.9}, nu_* = {:.9}",
                disp.tau_star(k)?,
                disp.nu_star(k)?
            );
        }
        for frac in [1.02, 1.06, 1.1] {
            let k = frac * kappa0;
            let lam = disp.lambda_elec(k)?;
            println!(
                "  k = {k:.4}: lambda_+ = {:+.6e} {:+.6e} i  (Landau-damped)",
                lam.re, lam.im
            );
        }

        let k = 0.5;
        let nu = disp.nu_star(k)?;
        let dt = 1e-3;
        let grid = TimeGrid::for_mode(dt, 10.0, k, nu)?;
        let g = green::resolvent_g(&table, k, grid)?;
        let h = green::greens_h(&table, k, grid)?;
        let t_trunc = 250.0 * nu.max(1.0);
        for t in [1.0, 5.0, 10.0] {
            let i = (t / dt).round() as usize;
            let bg = green::bromwich_invert(&table, GreenKind::Electric, k, t, 0.1, t_trunc)?;
            let bh = green::bromwich_invert(&table, GreenKind::Magnetic, k, t, 0.1, t_trunc)?;
            println!(
                "  t = {t:>4}: R = {:+.6e} (contour {:+.6e}), H = {:+.6e} (contour {:+.6e})",
                g.values[i].re, bg.re, h.values[i].re, bh.re
            );
        }
        // conjugation sanity on a complex sample
        let s = disp.sample(C64::new(0.4, 1.1), 0.8)?;
        println!("  D({}, 0.8) = {:.6e} [{:?}]", s.lambda, s.d_val, s.branch);
    }
    Ok(())
}
