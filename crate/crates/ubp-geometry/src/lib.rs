//! Exact circle geometry for two-dimensional update families.
//!
//! Directions are primitive integer vectors and every predicate is an integer
//! sign test, so stable sets and classifications are computed without
//! tolerances.

pub mod arcset;
pub mod direction;
pub mod family;
pub mod stable;

pub use arcset::{Arc, ArcSet, ArcSetJson};
pub use direction::{angle_compare, ccw_gap_at_least_pi, cross, dot, interior_direction, Direction, Site};
pub use family::{FamilyError, FamilyJson, UpdateFamily, MAX_OFFSET};
pub use stable::{
    classify, classify_stable_set, destabilized_arc_of_rule, destabilized_arc_of_site, family_from_stable_set,
    semicircle_avoiding, stable_set, strongly_stable_set, unstable_set, Classification, GeometryError, Kind,
};
