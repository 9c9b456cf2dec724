use serde::Serialize;
use thiserror::Error;
use ubp_geometry::{dot, ArcSet, Direction, UpdateFamily};

/// Both primitive perpendiculars of every offset, sorted counterclockwise.
pub fn quasi_stable_set(family: &UpdateFamily) -> Vec<Direction> {
    let mut v: Vec<Direction> = family
        .all_offsets()
        .into_iter()
        .flat_map(|(x, y)| {
            let p = Direction::from_vector(x, y).expect("nonzero offset");
            [p.rot90(), p.rot_neg90()]
        })
        .collect();
    v.sort();
    v.dedup();
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QuasiCheck {
    pub ok: bool,
    pub failing_pair: Option<(Direction, Direction)>,
}

/// Some rule lies in `{⟨x,u⟩ ≤ 0} ∩ {⟨x,v⟩ ≤ 0}`.
pub fn pair_has_rule(family: &UpdateFamily, u: Direction, v: Direction) -> bool {
    family
        .rules()
        .iter()
        .any(|r| r.iter().all(|&x| dot(x, u.as_site()) <= 0 && dot(x, v.as_site()) <= 0))
}

/// Checks every cyclically consecutive pair of `dirs` (sorted counterclockwise).
/// A single direction passes vacuously.
pub fn verify_quasi_stability(family: &UpdateFamily, dirs: &[Direction]) -> QuasiCheck {
    if dirs.len() >= 2 {
        for i in 0..dirs.len() {
            let (u, v) = (dirs[i], dirs[(i + 1) % dirs.len()]);
            if !pair_has_rule(family, u, v) {
                return QuasiCheck {
                    ok: false,
                    failing_pair: Some((u, v)),
                };
            }
        }
    }
    QuasiCheck {
        ok: true,
        failing_pair: None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("direction {0} is not stable")]
pub struct NotStable(pub Direction);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Isolation {
    /// Directions just counterclockwise of `u` are unstable.
    pub left_isolated: bool,
    /// Directions just clockwise of `u` are unstable.
    pub right_isolated: bool,
}

pub fn is_isolated(u: Direction, stab: &ArcSet) -> Result<Isolation, NotStable> {
    if !stab.contains(u) {
        return Err(NotStable(u));
    }
    if stab.is_full() {
        return Ok(Isolation {
            left_isolated: false,
            right_isolated: false,
        });
    }
    Ok(Isolation {
        left_isolated: !stab.contains_just_after(u),
        right_isolated: !stab.contains_just_before(u),
    })
}
