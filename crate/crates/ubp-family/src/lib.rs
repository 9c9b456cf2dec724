//! Combinatorics of an update family: parsing, breakthrough blocks, quasi-stable
//! directions and u-blocks.

pub mod alpha;
pub mod blocks;
pub mod parse;
pub mod quasi;
pub mod ublock;

pub use alpha::{alpha2, alpha_report, searched_directions, Alpha2, AlphaError, AlphaReport, DEFAULT_L_MAX};
pub use blocks::{alpha1, block_at, enumerate_breakthrough_blocks, normalize, representative, BreakthroughBlock};
pub use parse::{family_to_json, parse_family, ParseError};
pub use quasi::{
    is_isolated, pair_has_rule, quasi_stable_set, verify_quasi_stability, Isolation, NotStable, QuasiCheck,
};
pub use ublock::{
    default_window_h, default_window_w, is_u_block, Certificate, LineFrame, UBlockError, UBlockStatus, UBlockVerdict,
};
