//! Droplets, the covering algorithm and deterministic growth checks.

pub mod cover;
pub mod droplet;
pub mod growth;

pub use cover::{cover, merge_test, reference_droplet, CoverOrder, CoverReport, CoverSetup, MergeStep};
pub use droplet::{
    choose_spanning_directions, diam, diam_sq, minimal_droplet, sqrt_le_sum, Constraint, Droplet, DropletError, SqLen,
    Vertex,
};
pub use growth::{
    block_lengths, cap_directions, check_step, minimum_feasible_mu, supercritical_witness, verify_droplet_growth,
    CapSide, GrowthError, GrowthReport, GrowthStep, StripFrame, SupercriticalWitness, DEFAULT_BLOCK_MARGIN,
};
