//! Exact root-system combinatorics and spherical-function numerics for
//! shell-intersection estimates on higher-rank symmetric spaces.

pub mod error;
pub mod exact;
pub mod exponent;
pub mod geometry;
pub mod harmonic;
pub mod numeric;
pub mod rng;
pub mod root_core;
pub mod semidense;
pub mod subsystems;

pub use error::{Error, Result};
pub use exact::{Q, QVec};
pub use root_core::{CartanType, E6Model, Form, OrbitPoint, RootSystem, WeylElement, DEFAULT_CAP};
pub use subsystems::{RootSet, SubsystemMask};
