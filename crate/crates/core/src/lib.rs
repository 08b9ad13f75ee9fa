//! Infinite-depth water waves carrying point vortices.

pub mod cli_io;
pub mod diagnostics;
pub mod error;
pub mod evolution;
pub mod singular_integrals;
pub mod spectral_core;
pub mod verify;
pub mod taylor_sign;
pub mod vortex_dynamics;

pub use error::{Result, WaveError};
pub use evolution::{EvolutionConfig, Frame, HaltKind, SurfaceState};
pub use singular_integrals::{CurveOperators, CurveTrace, SecondKind};
pub use spectral_core::{GridFunction, PeriodicGrid};
pub use taylor_sign::{Classification, TaylorReport};
pub use vortex_dynamics::{SymmetricPair, VortexSet};
