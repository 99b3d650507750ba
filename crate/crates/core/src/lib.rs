//! Combinatorics of landing dreadlocks for post-singularly finite entire
//! functions, plus a numerical companion for the exponential family.

pub mod address;
pub mod error;
pub mod expfamily;
pub mod itinerary;
mod json;
pub mod landing;
pub mod partition;
pub mod portrait;
pub mod seq;

pub use address::{between, cyclic_order, Alphabet, AddressPoint, ExtAddress, Side, Symbol};
pub use error::{Error, Result};
pub use expfamily::{ExpParam, TraceConfig, Verdict};
pub use itinerary::{adjacent, itinerary_full, itinerary_left, itinerary_right, Itinerary, ItineraryEntry};
pub use landing::{
    class_itinerary, enumerate_addresses, enumerate_classes, landing_equivalent, periodic_land_together, realize_itinerary,
    unique_realization_report, ClassLocus, Landing, LandingClass, RealizationReport,
};
pub use partition::{unlinked, ElementaryInterval, OneSide, SectorId, SectorSide};
pub use portrait::{CritGroup, GroupKind, GroupRef, Locus, Portrait, SingularEntry};
pub use seq::EventuallyPeriodic;
