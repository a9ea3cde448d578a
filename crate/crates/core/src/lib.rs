//! Opportunistic jammer selection for MIMO wiretap channels.
//!
//! Bob picks `K` of `S` jammers whose channels are best aligned at his
//! receiver, filters out the aligned jamming, and keeps `N_t` clean receive
//! dimensions. Eve sees the same jammers unaligned, so her capacity saturates
//! once the jammers occupy all of her receive dimensions.
//!
//! Modules:
//! - [`channel`]: configuration and seeded Rayleigh channel draws
//! - [`grassmann`]: subspace geometry (chordal distances, alignment, covering)
//! - [`selection`]: jammer-selection schemes and Bob's receive filter
//! - [`rates`]: capacities, achievable rates, secrecy rate, DoF fits
//! - [`outage`]: Eve's saturated-rate distribution and secrecy outage
//! - [`experiments`]: config-driven sweeps that write CSV plot data

pub mod channel;
pub mod error;
pub mod experiments;
pub mod grassmann;
pub mod linalg;
pub mod outage;
pub mod rates;
pub mod selection;

pub use channel::{snr_db_to_power, ChannelRealization, SeededRng, SystemConfig};
pub use error::{OjsError, Result};
pub use grassmann::{SubspaceBasis, SubspaceCodebook};
pub use outage::OutageSamples;
pub use rates::{DofEstimate, RateReport};
pub use selection::{SchemeTag, SearchMode, SelectionResult, Selector};
