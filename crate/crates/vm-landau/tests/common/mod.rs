//! Shared fixtures for the integration tests: kernel tables are expensive to
//! build, so each binary builds them once.
#![allow(dead_code)] // not every test binary uses every fixture

use std::sync::OnceLock;
use vm_landau::equilibrium::{build_equilibrium, Equilibrium, EquilibriumSpec};
use vm_landau::kernels::KernelTable;

pub fn maxwellian() -> &'static Equilibrium {
    static EQ: OnceLock<Equilibrium> = OnceLock::new();
    EQ.get_or_init(|| build_equilibrium(&EquilibriumSpec::maxwellian(1.0)).unwrap())
}

pub fn powerlaw() -> &'static Equilibrium {
    static EQ: OnceLock<Equilibrium> = OnceLock::new();
    EQ.get_or_init(|| build_equilibrium(&EquilibriumSpec::powerlaw(1.0, 4.0)).unwrap())
}

pub fn maxwellian_table() -> &'static KernelTable {
    static T: OnceLock<KernelTable> = OnceLock::new();
    T.get_or_init(|| KernelTable::build(maxwellian()).unwrap())
}

pub fn powerlaw_table() -> &'static KernelTable {
    static T: OnceLock<KernelTable> = OnceLock::new();
    T.get_or_init(|| KernelTable::build(powerlaw()).unwrap())
}
