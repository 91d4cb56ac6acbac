//! Simulation library for event-triggered feedback control.
//!
//! The centerpiece is a trigger that decides sampling instants by draining a
//! countdown clock whose rate is shaped online from the state/error ratio.
//! Its design parameters map to a closed-form, guaranteed minimum inter-event
//! time ([`bounds::miet_lower_bound`]), so sampling rate becomes something you
//! dial in rather than hope for. Static and dynamic threshold triggers are
//! included as baselines, along with the plants, integrator, scenario
//! configuration, and trace tooling needed to reproduce the library's two
//! reference experiments end to end.

pub mod bounds;
pub mod error;
pub mod linalg;
pub mod plant;
pub mod scenario;
pub mod sim;
pub mod trigger;

pub use error::{Error, Result};
