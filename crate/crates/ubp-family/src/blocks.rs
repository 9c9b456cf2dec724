//! Breakthrough blocks `X ∩ {x : ⟨x,u⟩ ≥ 0}` for stable `u`, and α₁.

use serde::Serialize;
use ubp_geometry::{dot, interior_direction, stable_set, Arc, ArcSet, Direction, Site, UpdateFamily};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BreakthroughBlock {
    /// Sites translated so that the lexicographically smallest is the origin.
    pub sites: Vec<Site>,
    pub source_rule: usize,
    /// Maximal arc on which the rule's membership pattern is this block.
    pub direction_arc: Arc,
    /// A stable direction in `direction_arc` realising the block.
    pub witness: Direction,
}

/// Sorts and translates the smallest site to the origin.
pub fn normalize(sites: &[Site]) -> Vec<Site> {
    let mut v = sites.to_vec();
    v.sort();
    v.dedup();
    if let Some(&(x0, y0)) = v.first() {
        for s in &mut v {
            *s = (s.0 - x0, s.1 - y0);
        }
    }
    v
}

/// `X ∩ {x : ⟨x,u⟩ ≥ 0}` in the rule's own order.
pub fn block_at(rule: &[Site], u: Direction) -> Vec<Site> {
    rule.iter().copied().filter(|&x| dot(x, u.as_site()) >= 0).collect()
}

/// Some direction of a nonempty set, preferring closed endpoints.
pub fn representative(set: &ArcSet) -> Option<Direction> {
    let arc = set.arcs().into_iter().next()?;
    Some(if arc.is_whole() {
        Direction::EAST
    } else if arc.start_closed {
        arc.start
    } else if arc.end_closed {
        arc.end
    } else {
        interior_direction(arc.start, arc.end)
    })
}

/// Membership-pattern arcs of one rule: the perpendiculars of its sites cut
/// the circle into points and open gaps; equal neighbouring patterns merge.
fn pattern_arcs(rule: &[Site]) -> Vec<(Vec<bool>, ArcSet)> {
    let mut events: Vec<Direction> = rule
        .iter()
        .flat_map(|&(x, y)| {
            let p = Direction::from_vector(x, y).expect("nonzero offset");
            [p.rot90(), p.rot_neg90()]
        })
        .collect();
    events.sort();
    events.dedup();
    let pattern = |u: Direction| -> Vec<bool> { rule.iter().map(|&x| dot(x, u.as_site()) >= 0).collect() };
    let k = events.len();
    let mut atoms: Vec<(Vec<bool>, ArcSet)> = Vec::with_capacity(2 * k);
    for i in 0..k {
        let (a, b) = (events[i], events[(i + 1) % k]);
        atoms.push((pattern(a), ArcSet::from_arc(Arc::point(a))));
        let gap = Arc::open(a, b);
        atoms.push((pattern(interior_direction(a, b)), ArcSet::from_arc(gap)));
    }
    let mut merged: Vec<(Vec<bool>, ArcSet)> = Vec::new();
    for (p, set) in atoms {
        match merged.iter_mut().find(|(q, _)| *q == p) {
            Some((_, s)) => *s = s.union(&set),
            None => merged.push((p, set)),
        }
    }
    merged
}

/// Deduplicated breakthrough blocks of the family, in rule order.
pub fn enumerate_breakthrough_blocks(family: &UpdateFamily) -> Vec<BreakthroughBlock> {
    let stab = stable_set(family);
    let mut out: Vec<BreakthroughBlock> = Vec::new();
    if stab.is_empty() {
        return out;
    }
    for (ri, rule) in family.rules().iter().enumerate() {
        for (mask, set) in pattern_arcs(rule) {
            // A pattern can occupy several arcs; each arc is reported separately.
            for arc in set.arcs() {
                let realised = ArcSet::from_arc(arc).intersection(&stab);
                let Some(witness) = representative(&realised) else {
                    continue;
                };
                let sites: Vec<Site> = rule.iter().zip(&mask).filter(|(_, &m)| m).map(|(&s, _)| s).collect();
                let sites = normalize(&sites);
                if !out.iter().any(|b| b.sites == sites) {
                    out.push(BreakthroughBlock {
                        sites,
                        source_rule: ri,
                        direction_arc: arc,
                        witness,
                    });
                }
            }
        }
    }
    out
}

/// Smallest breakthrough block size; `None` when no direction is stable.
pub fn alpha1(family: &UpdateFamily) -> Option<usize> {
    enumerate_breakthrough_blocks(family)
        .iter()
        .map(|b| b.sites.len())
        .min()
}
