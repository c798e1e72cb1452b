//! Process-wide capacity limits.
//!
//! Every enumeration over a group, every conductor promotion and every
//! matrix materialization is bounded. The defaults are sized so that the
//! exhaustive oracles in the test suites stay fast; the CLI `--cap` flag
//! overrides the enumeration cap.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

pub const DEFAULT_ENUMERATION_CAP: usize = 1 << 20;
pub const DEFAULT_CONDUCTOR_CAP: u64 = 10_000;
/// Largest dimension for which a representation is materialized as explicit
/// phase-monomial matrices.
pub const MONOMIAL_DIM_CAP: usize = 4096;
/// Largest dimension for dense cyclotomic matrices and float norms.
pub const DENSE_DIM_CAP: usize = 256;

static ENUMERATION_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_ENUMERATION_CAP);
static CONDUCTOR_CAP: AtomicU64 = AtomicU64::new(DEFAULT_CONDUCTOR_CAP);

pub fn enumeration_cap() -> usize {
    ENUMERATION_CAP.load(Ordering::Relaxed)
}

pub fn set_enumeration_cap(cap: usize) {
    ENUMERATION_CAP.store(cap, Ordering::Relaxed);
}

pub fn conductor_cap() -> u64 {
    CONDUCTOR_CAP.load(Ordering::Relaxed)
}

pub fn set_conductor_cap(cap: u64) {
    CONDUCTOR_CAP.store(cap, Ordering::Relaxed);
}
