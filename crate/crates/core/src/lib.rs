//! Cartan subgroups `C_{δ,φ}(m) ⊆ GL₂(ℤ/mℤ)`, their extensions `N_{δ,φ}(m)`,
//! and exhaustive checks of how the determinant behaves along the reduction
//! tower `N(p^{n+1}) → N(p^n)`.
//!
//! The arithmetic is generic over the storage word ([`Word`], implemented for
//! `u32` and `u64`). The aliases below fix that choice for callers who do not
//! care; the CLI uses the `u64` forms.

pub mod cli;
pub mod cmparams;
pub mod entangle;
pub mod error;
pub mod matgroup;
pub mod modarith;

pub use error::{Error, Result};
pub use modarith::Word;

pub type Residue32 = modarith::Residue<u32>;
pub type Residue64 = modarith::Residue<u64>;
pub type Mat2x32 = matgroup::Mat2<u32>;
pub type Mat2x64 = matgroup::Mat2<u64>;
pub type MatGroup32 = matgroup::MatGroup<u32>;
pub type MatGroup64 = matgroup::MatGroup<u64>;
pub type CartanParams64 = matgroup::CartanParams<u64>;
pub type Tower32 = entangle::Tower<u32>;
pub type Tower64 = entangle::Tower<u64>;
pub type DetLift64 = entangle::DetLift<u64>;
pub type KernelReport64 = entangle::KernelReport<u64>;
