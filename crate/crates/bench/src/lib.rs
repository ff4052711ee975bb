//! Fixtures shared by the criterion benches in `benches/`.

use stgap_core::machine::{build_benchmark, pm_benchmark, Machine, PmOptions};

/// The permanent-magnet benchmark at a given angular resolution.
pub fn pm_machine(angular_elements: usize) -> Machine {
    Machine::build(&pm_benchmark(&PmOptions {
        angular_elements,
        ..PmOptions::default()
    }))
    .expect("pm benchmark builds")
}

pub fn annulus_machine() -> Machine {
    Machine::build(&build_benchmark("annulus-harmonic").expect("known benchmark")).expect("annulus builds")
}
