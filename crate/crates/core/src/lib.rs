//! Shortcuts to adiabaticity for driven two-level systems.
//!
//! The crate builds driving protocols with number-operator-based inverse
//! engineering (NOBIE): for a Hamiltonian `H(t) = x σx + y σy + z σz` the
//! number operator `N(t) = H(t)/f(t)`, `f = |r|`, is made an exact invariant of
//! an engineered Hamiltonian `H_N(t) = a σx + b σy + c σz`. A state prepared in
//! an eigenstate of `N(0)` then follows the instantaneous eigenstate of `H(t)`
//! for any protocol duration.
//!
//! Layout:
//!
//! - [`pauli`]: closed-form 2×2 algebra (composition, eigensystem, propagator).
//! - [`protocol`]: time-dependent controls and their midpoint digitization.
//! - [`nobie`]: number operator, invariance residuals, both solution families.
//! - [`drive`]: the driven-qubit mapping and hardware pulse schedules.
//! - [`evolve`]: sample-and-hold propagation and the adiabaticity diagnostics.
//! - [`measure`]: shot sampling, Rabi fitting and Ω_c calibration.
//! - [`io`], [`sweep`], [`verify`]: file formats and the experiment drivers
//!   behind the `nobie` command-line tool.
//!
//! Frequencies are angular (rad/s) with ħ = 1; times are seconds.

pub mod drive;
pub mod error;
pub mod evolve;
pub mod io;
pub mod measure;
pub mod nobie;
pub mod pauli;
pub mod protocol;
pub mod sweep;
pub mod verify;

pub use drive::{DriveAmplitude, DriveConfig, PulseSchedule, ScheduleFamily, ScheduleOrigin};
pub use error::{Error, Result};
pub use evolve::Trajectory;
pub use measure::{Origin, RabiFit, RunRecord, ShotConfig};
pub use nobie::{Axis, NobieSolution, SolutionFamily};
pub use pauli::{Hermitian2, Matrix2, PauliVector, QubitState, Unitary2};
pub use protocol::{ControlProtocol, DerivativeSource, SampledTrace};
