//! Mixed-level orthogonal arrays and the quantum codes built from them.
//!
//! Everything here is exact integer arithmetic over small alphabets. The
//! crate is `no_std` and only needs `alloc`; file formats, the asset
//! directory and the command line live in the `mqmds` crate.

#![no_std]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod array;
pub mod code;
pub mod combin;
pub mod construct;
pub mod error;
pub mod field;
pub mod group;
pub mod scheme;
pub mod theorems;
pub mod verify;

pub use array::{Certificate, CertStatus, DistanceProfile, MixedLevelArray, StrengthWitness};

pub use code::{CodeParams, OrthogonalPartition, Provenance, QuantumCode};
pub use construct::{AssetPayload, AssetRecord, AssetRegistry, Context};
pub use error::{Error, Result};
pub use field::{Field, PrimePowerFactorization};
pub use group::Group;
pub use scheme::DifferenceScheme;
pub use verify::{Mode, VerificationReport};

/// Default number of tuple checks a construction may spend re-verifying
/// its own output before it reports the result as unverified.
pub const DEFAULT_BUDGET: u64 = 1_000_000;
