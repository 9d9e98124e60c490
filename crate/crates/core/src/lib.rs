//! Pinning control of networks of coupled chaotic oscillators.
//!
//! A network of `m` identical oscillators `ẋ_i = f(x_i)` is coupled through a
//! zero-row-sum matrix `A` and driven towards a target trajectory `s(t)` by
//! feedback applied at a single node. The crate covers:
//!
//! * [`network`]: coupling matrices, small-world and random generators,
//!   strongly connected structure and spanning trees.
//! * [`spectral`]: the pinned matrix `Ã`, its spectrum, left Perron weights,
//!   and the synchronization criteria.
//! * [`oscillators`]: Lorenz, Chen, Rössler and Chua systems with analytic
//!   Jacobians, monotone coupling functions, and QUAD estimation.
//! * [`dynamics`]: RK4 simulation of the controlled network with fixed,
//!   nonlinear and adaptive coupling.
//! * [`experiment`]: TOML experiment specs and the `run`, `check` and `gen`
//!   pipelines behind the `pinsync` binary.

pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod network;
pub mod oscillators;
mod rng;
pub mod spectral;

pub use error::{Error, Result};
