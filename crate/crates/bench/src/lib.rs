//! Shared fixtures for the criterion benches.

use pure_measure_core::lattice::seeded_family;
use pure_measure_core::{DeltaSchedule, FAMeasure, Feature, ProbeSettings, Region, SampleSpec};

pub const SEED: u64 = 7;

pub fn settings(samples: usize) -> ProbeSettings {
    ProbeSettings::new(DeltaSchedule::default(), SampleSpec::new(samples, SEED))
}

/// `(A, F, Ω)` for the half-line density at the origin.
pub fn half_line() -> (Region, Feature, Region) {
    (
        Region::interval(0.0, 1.0).unwrap(),
        Feature::point(vec![0.0]).unwrap(),
        Region::interval(-1.0, 1.0).unwrap(),
    )
}

pub fn unit_disk() -> Region {
    Region::ball(vec![0.0, 0.0], 1.0).unwrap()
}

/// The measure family of the exhaustive lattice tests, restricted to
/// algebras on exactly `atoms` atoms when `atoms` is given.
pub fn measures(atoms: Option<usize>) -> Vec<FAMeasure> {
    seeded_family(200, 5, 0x5eed)
        .into_iter()
        .filter(|m| atoms.is_none_or(|n| m.algebra().universe_len() == n))
        .collect()
}
