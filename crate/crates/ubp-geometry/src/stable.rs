//! Destabilised arcs, the stable set, and the three-way classification.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arcset::{Arc, ArcSet};
use crate::direction::{Direction, Site};
use crate::family::UpdateFamily;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("the zero offset has no destabilised arc")]
    ZeroOffset,
    #[error("every direction is stable; no family has an unstable complement to build from")]
    TargetIsWholeCircle,
    #[error("target is not a union of closed arcs: its complement component {0:?} is not open")]
    TargetNotClosed(Arc),
}

/// The open semicircle `{u : ⟨x,u⟩ < 0}`, centred at the antipode of `x`.
pub fn destabilized_arc_of_site(x: Site) -> Result<Arc, GeometryError> {
    let p = Direction::from_vector(x.0, x.1).ok_or(GeometryError::ZeroOffset)?;
    Ok(Arc::open(p.rot90(), p.rot_neg90()))
}

/// The directions destabilised by every site of the rule: empty or one open arc.
pub fn destabilized_arc_of_rule(rule: &[Site]) -> Result<Option<Arc>, GeometryError> {
    let set = destabilized_set_of_rule(rule)?;
    let arcs = set.arcs();
    debug_assert!(arcs.len() <= 1, "intersection of semicircles is connected");
    Ok(arcs.into_iter().next())
}

fn destabilized_set_of_rule(rule: &[Site]) -> Result<ArcSet, GeometryError> {
    let mut acc = ArcSet::full();
    for &x in rule {
        acc = acc.intersection(&ArcSet::from_arc(destabilized_arc_of_site(x)?));
        if acc.is_empty() {
            break;
        }
    }
    Ok(acc)
}

/// The union of the destabilised arcs of every rule.
pub fn unstable_set(family: &UpdateFamily) -> ArcSet {
    family.rules().iter().fold(ArcSet::empty(), |acc, rule| {
        acc.union(&destabilized_set_of_rule(rule).expect("validated family has no zero offset"))
    })
}

/// Directions `u` whose open half-plane `{⟨x,u⟩ < 0}` is closed under the dynamics.
pub fn stable_set(family: &UpdateFamily) -> ArcSet {
    unstable_set(family).complement()
}

/// Union of the interiors of the positive-length components.
pub fn strongly_stable_set(stab: &ArcSet) -> ArcSet {
    ArcSet::from_arcs(stab.arcs().into_iter().filter(|a| !a.is_point()).map(|a| {
        if a.is_whole() {
            a
        } else {
            Arc::open(a.start, a.end)
        }
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Supercritical,
    Critical,
    Subcritical,
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Kind::Supercritical => "supercritical",
            Kind::Critical => "critical",
            Kind::Subcritical => "subcritical",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub kind: Kind,
    /// Open semicircle avoiding stab (supercritical) or the strongly stable set (critical).
    pub witness: Option<Arc>,
}

/// An open semicircle disjoint from `set`, if one exists.
pub fn semicircle_avoiding(set: &ArcSet) -> Option<Arc> {
    if set.is_empty() {
        return Some(Arc::open_semicircle(Direction::EAST));
    }
    set.complement()
        .arcs()
        .into_iter()
        .find(|gap| !gap.is_whole() && gap.length_vs_pi() != Ordering::Less)
        .map(|gap| Arc::open_semicircle(gap.start))
}

pub fn classify(family: &UpdateFamily) -> Classification {
    let stab = stable_set(family);
    classify_stable_set(&stab)
}

pub fn classify_stable_set(stab: &ArcSet) -> Classification {
    if let Some(w) = semicircle_avoiding(stab) {
        return Classification {
            kind: Kind::Supercritical,
            witness: Some(w),
        };
    }
    match semicircle_avoiding(&strongly_stable_set(stab)) {
        Some(w) => Classification {
            kind: Kind::Critical,
            witness: Some(w),
        },
        None => Classification {
            kind: Kind::Subcritical,
            witness: None,
        },
    }
}

/// A family whose stable set is exactly `target`.
///
/// Each complementary open arc `(a, b)` of length at most π yields the rule
/// `{rot₋₉₀(a), rot₉₀(b)}`, whose destabilised arc is exactly `(a, b)`.
/// Longer arcs are split into overlapping pieces of length at most π. An empty
/// target uses four two-site rules destabilising overlapping 3π/4 arcs.
pub fn family_from_stable_set(target: &ArcSet) -> Result<UpdateFamily, GeometryError> {
    if target.is_full() {
        return Err(GeometryError::TargetIsWholeCircle);
    }
    let mut pieces = Vec::new();
    if target.is_empty() {
        let ring = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)];
        for k in [0, 2, 4, 6] {
            let (a, b) = (ring[k], ring[(k + 3) % 8]);
            pieces.push((dir(a), dir(b)));
        }
    } else {
        for gap in target.complement().arcs() {
            if gap.start_closed || gap.end_closed {
                return Err(GeometryError::TargetNotClosed(gap));
            }
            split_open_arc(gap.start, gap.end, &mut pieces);
        }
    }
    let rules = pieces
        .into_iter()
        .map(|(a, b)| {
            let lo = a.rot_neg90().as_site();
            let hi = b.rot90().as_site();
            if lo == hi {
                vec![lo]
            } else {
                vec![lo, hi]
            }
        })
        .collect();
    Ok(UpdateFamily::new(rules).expect("perpendiculars of primitive vectors are valid offsets"))
}

fn dir(v: Site) -> Direction {
    Direction::new(v.0, v.1).expect("primitive")
}

/// Open arcs of length at most π whose union is the open arc `(a, b)`.
fn split_open_arc(a: Direction, b: Direction, out: &mut Vec<(Direction, Direction)>) {
    if a == b {
        out.push((a, a.antipode()));
        out.push((a.antipode(), a));
        out.push((a.rot90(), a.rot_neg90()));
        return;
    }
    match Arc::open(a, b).length_vs_pi() {
        Ordering::Greater => {
            // -b lies in (a, -a); c sits between -b and -a so (c, b) is shorter than π.
            let c = Direction::from_vector(-b.x() - a.x(), -b.y() - a.y()).expect("a ≠ -b here");
            out.push((a, a.antipode()));
            out.push((c, b));
        }
        _ => out.push((a, b)),
    }
}
