//! Uncoded caching with cross-level coded delivery (CLCD) under non-uniform
//! file popularity.
//!
//! The library is organised bottom-up:
//!
//! * [`sets`]: user sets, subfile indices and subfile labels.
//! * [`combinatorics`]: 1-factorizations, near-1-factorizations, pairing
//!   plans and Hamiltonian decompositions of complete graphs.
//! * [`placement`]: library grouping into high/low/zero levels, ownership of
//!   low-level subfiles and per-user cache contents.
//! * [`schedule`]: multicast messages and delivery schedules.
//! * [`delivery_cl2`]: the constructive CL(2,1) / CL(2,1,0) delivery.
//! * [`delivery_general`]: general CL(t,1,0) delivery driven by the
//!   message-decomposition program (exact branch-and-bound and greedy).
//! * [`oracle`]: bit-exact payload simulation and peeling decoder used to
//!   verify every schedule.
//! * [`analysis`]: demand modelling, average rates, baselines and sweeps.

pub mod analysis;
pub mod combinatorics;
pub mod delivery_cl2;
pub mod delivery_general;
mod error;
pub mod oracle;
pub mod placement;
pub mod popularity;
pub mod schedule;
pub mod sets;

pub use error::{Error, Result};

pub use num_rational::Rational64;
pub use placement::{build_placement, classify_demand, DemandClassification, Level, LibraryConfig, PlacementSpec};
pub use schedule::{DeliverySchedule, MulticastMessage};
pub use sets::{binomial, FileId, SubfileIndex, SubfileLabel, UserId, UserSet};
