use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;
use ubp_geometry::{classify, stable_set, Arc, ArcSet, Direction, Kind, UpdateFamily};

use crate::blocks::alpha1;
use crate::quasi::quasi_stable_set;
use crate::ublock::{is_u_block, UBlockError, UBlockStatus};

pub const DEFAULT_L_MAX: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlphaError {
    #[error("family is {0}, not critical")]
    NonCritical(Kind),
    #[error("the seed length cap must be at least 1")]
    ZeroCap,
    #[error(transparent)]
    Window(#[from] UBlockError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alpha2 {
    /// `None` when some direction needs a seed longer than the cap.
    pub value: Option<usize>,
    /// Least block length per searched direction, counterclockwise.
    pub per_direction: Vec<(Direction, Option<usize>)>,
}

/// Stable and quasi-stable directions inside the witness semicircle.
/// For a critical family the stable ones are isolated points there.
pub fn searched_directions(family: &UpdateFamily, witness: Arc) -> Vec<Direction> {
    let c = ArcSet::from_arc(witness);
    let inside = stable_set(family).intersection(&c);
    debug_assert!(inside.arcs().iter().all(|a| a.is_point()));
    let mut dirs: Vec<Direction> = inside.arcs().iter().filter(|a| a.is_point()).map(|a| a.start).collect();
    dirs.extend(quasi_stable_set(family).into_iter().filter(|&u| witness.contains(u)));
    dirs.sort();
    dirs.dedup();
    dirs
}

pub fn alpha2(
    family: &UpdateFamily,
    witness: Arc,
    l_max: usize,
    window_w: Option<usize>,
    window_h: Option<usize>,
) -> Result<Alpha2, AlphaError> {
    let kind = classify(family).kind;
    if kind != Kind::Critical {
        return Err(AlphaError::NonCritical(kind));
    }
    if l_max == 0 {
        return Err(AlphaError::ZeroCap);
    }
    let mut per_direction = Vec::new();
    for u in searched_directions(family, witness) {
        let mut least = None;
        for len in 1..=l_max {
            if is_u_block(family, u, len, window_w, window_h)?.status == UBlockStatus::Block {
                least = Some(len);
                break;
            }
        }
        per_direction.push((u, least));
    }
    let value = per_direction.iter().try_fold(0, |m, &(_, l)| l.map(|l| m.max(l)));
    Ok(Alpha2 { value, per_direction })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlphaReport {
    pub alpha1: Option<usize>,
    pub alpha2: Option<usize>,
    /// Keyed by `"(x,y)"`.
    pub per_direction: BTreeMap<String, Option<usize>>,
}

/// α₁ always; α₂ only for critical families, otherwise empty.
pub fn alpha_report(
    family: &UpdateFamily,
    l_max: usize,
    window_w: Option<usize>,
    window_h: Option<usize>,
) -> Result<AlphaReport, AlphaError> {
    let class = classify(family);
    let (alpha2, per_direction) = match (class.kind, class.witness) {
        (Kind::Critical, Some(c)) => {
            let a = alpha2(family, c, l_max, window_w, window_h)?;
            (
                a.value,
                a.per_direction.into_iter().map(|(u, l)| (u.to_string(), l)).collect(),
            )
        }
        _ => (None, BTreeMap::new()),
    };
    Ok(AlphaReport {
        alpha1: alpha1(family),
        alpha2,
        per_direction,
    })
}
