//! Nested droplets growing along a strip, checked by dense simulation, and
//! finite seeds with infinite closure for supercritical families.
//!
//! Write `u⁺` for the midpoint of the witness semicircle `C = (uʳ, uˡ)` and
//! use the integer coordinates `X = ⟨x,u⁺⟩`, `Y = ⟨x,uˡ⟩`. The strip is
//! `X ≥ 0, 0 ≤ Y ≤ top`. The cap sides are the directions of
//! `(stab ∪ Q) ∩ C` in counterclockwise order; side `j` runs from corner
//! `Q_j` to `Q_{j+1} = Q_j + μ·rot90(u_j)`, so it holds `μ + 1` sites.
//! `D_m` moves every cap side by one step of `u⁺`, which keeps each corner on
//! a fixed line parallel to `u⁺`.

use serde::Serialize;
use thiserror::Error;
use ubp_engine::{run_to_fixpoint, sparse_closure, Boundary, CompiledFamily, Lattice};
use ubp_family::{is_u_block, searched_directions, LineFrame, UBlockError, UBlockStatus};
use ubp_geometry::{classify, cross, dot, stable_set, Arc, Direction, Kind, Site, UpdateFamily};

use crate::droplet::{Constraint, Droplet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrowthError {
    #[error("family is {found}, expected {expected}")]
    WrongClass { found: Kind, expected: Kind },
    #[error("witness arc is not an open semicircle")]
    BadWitness,
    #[error("mu = {mu} leaves no room for suitable blocks; the minimum feasible value is {min}")]
    MuTooSmall { mu: i64, min: i64 },
    #[error("no suitable block placement for any mu up to {0}")]
    NoFeasibleMu(i64),
    #[error("no u-block of length at most {l_max} for direction {u}")]
    NoBlock { u: Direction, l_max: usize },
    #[error("no seed rectangle up to side {0} has a closure beyond the cap")]
    NoWitness(i64),
    #[error(transparent)]
    Window(#[from] UBlockError),
}

#[derive(Clone, Debug, Serialize)]
pub struct CapSide {
    pub direction: Direction,
    /// Length of the u-blocks placed on new lines; 0 for unstable directions.
    pub block_len: usize,
    /// Corners at `m = 0`.
    pub from: Site,
    pub to: Site,
}

/// The strip, cap sides and seed rectangle of the nested droplet sequence.
#[derive(Clone, Debug, Serialize)]
pub struct StripFrame {
    pub right: Direction,
    pub left: Direction,
    pub forward: Direction,
    pub mu: i64,
    pub top: i64,
    /// `R = {0 ≤ X ≤ depth, 0 ≤ Y ≤ top}`; it contains `D_0`.
    pub depth: i64,
    /// Minimum Euclidean distance from a block to the corner lines.
    pub block_margin: i64,
    pub sides: Vec<CapSide>,
}

fn semicircle_ends(witness: Arc) -> Result<(Direction, Direction), GrowthError> {
    if witness.start_closed || witness.end_closed || witness.end != witness.start.antipode() {
        return Err(GrowthError::BadWitness);
    }
    Ok((witness.start, witness.end))
}

/// `(stab ∪ Q) ∩ C`, counterclockwise from the right end of `C`.
pub fn cap_directions(family: &UpdateFamily, witness: Arc) -> Vec<Direction> {
    let mut dirs = searched_directions(family, witness);
    // Every pair lies within an open half-turn, so the cross product orders them.
    dirs.sort_by(|a, b| cross(b.as_site(), a.as_site()).cmp(&0));
    dirs
}

/// Least u-block length per cap direction; unstable directions need none.
pub fn block_lengths(family: &UpdateFamily, dirs: &[Direction], l_max: usize) -> Result<Vec<usize>, GrowthError> {
    let stab = stable_set(family);
    dirs.iter()
        .map(|&u| {
            if !stab.contains(u) {
                return Ok(0);
            }
            for len in 1..=l_max {
                if is_u_block(family, u, len, None, None)?.status == UBlockStatus::Block {
                    return Ok(len);
                }
            }
            Err(GrowthError::NoBlock { u, l_max })
        })
        .collect()
}

fn add(a: Site, b: Site) -> Site {
    (a.0 + b.0, a.1 + b.1)
}

fn scale(k: i64, a: Site) -> Site {
    (k * a.0, k * a.1)
}

impl StripFrame {
    pub fn new(
        witness: Arc,
        dirs: &[Direction],
        block_lens: &[usize],
        mu: i64,
        block_margin: i64,
    ) -> Result<StripFrame, GrowthError> {
        let (right, left) = semicircle_ends(witness)?;
        let forward = right.rot90();
        let norm = forward.norm_sq() as i64;
        let mut corners = vec![(0i64, 0i64)];
        for &u in dirs {
            let last = *corners.last().expect("nonempty");
            corners.push(add(last, scale(mu, u.rot90().as_site())));
        }
        let x_of = |p: Site| dot(p, forward.as_site()) as i64;
        let min_x = corners.iter().map(|&p| x_of(p)).min().expect("nonempty");
        let shift = scale(
            (-min_x).div_euclid(norm) + i64::from((-min_x).rem_euclid(norm) != 0),
            forward.as_site(),
        );
        let corners: Vec<Site> = corners.into_iter().map(|p| add(p, shift)).collect();
        let depth = corners.iter().map(|&p| x_of(p)).max().expect("nonempty");
        let top = dot(*corners.last().expect("nonempty"), left.as_site()) as i64;
        let sides = dirs
            .iter()
            .zip(block_lens)
            .enumerate()
            .map(|(j, (&u, &len))| CapSide {
                direction: u,
                block_len: len,
                from: corners[j],
                to: corners[j + 1],
            })
            .collect();
        Ok(StripFrame {
            right,
            left,
            forward,
            mu,
            top,
            depth,
            block_margin,
            sides,
        })
    }

    fn y(&self, p: Site) -> i64 {
        dot(p, self.left.as_site()) as i64
    }

    /// `D_m` as a droplet over `Ŝ = cap directions ∪ {uʳ, uˡ, −u⁺}`.
    pub fn droplet(&self, m: i64) -> Droplet {
        let mut cs = vec![
            Constraint {
                direction: self.forward.antipode(),
                offset: 0,
            },
            Constraint {
                direction: self.right,
                offset: 0,
            },
            Constraint {
                direction: self.left,
                offset: self.top,
            },
        ];
        for s in &self.sides {
            let u = s.direction.as_site();
            let offset = dot(s.from, u) + m as i128 * dot(self.forward.as_site(), u);
            cs.push(Constraint {
                direction: s.direction,
                offset: offset as i64,
            });
        }
        Droplet::new(cs).expect("cap directions close the strip")
    }

    pub fn seed_rectangle(&self) -> Droplet {
        Droplet::new(vec![
            Constraint {
                direction: self.forward.antipode(),
                offset: 0,
            },
            Constraint {
                direction: self.forward,
                offset: self.depth,
            },
            Constraint {
                direction: self.right,
                offset: 0,
            },
            Constraint {
                direction: self.left,
                offset: self.top,
            },
        ])
        .expect("rectangle")
    }

    /// One suitable block per new line of every stable cap side, or `None`
    /// if some block does not fit between the corner lines.
    pub fn blocks(&self, m: i64) -> Option<Vec<Vec<Site>>> {
        let mut out = Vec::new();
        for s in &self.sides {
            if s.block_len == 0 {
                continue;
            }
            let u = s.direction;
            let step = u.rot90().as_site();
            let line_step = self.y(step);
            let w = LineFrame::new(u).w;
            let (ylo, yhi) = (self.y(s.from), self.y(s.to));
            let advance = dot(self.forward.as_site(), u.as_site()) as i64;
            let base = dot(s.from, u.as_site()) as i64;
            let norm = self.left.norm_sq() as i64;
            let margin_sq = self.block_margin * self.block_margin * norm;
            for i in base + (m - 1) * advance + 1..=base + m * advance {
                let p = scale(i, w);
                // Centre the block between the corner lines.
                let len = s.block_len as i64;
                let t_mid = (ylo + yhi - 2 * self.y(p)).div_euclid(2 * line_step);
                let t0 = t_mid - (len - 1) / 2;
                let sites: Vec<Site> = (t0..t0 + len).map(|t| add(p, scale(t, step))).collect();
                let fits = sites.iter().all(|&q| {
                    let y = self.y(q);
                    y - ylo >= 0 && yhi - y >= 0 && (y - ylo).pow(2) >= margin_sq && (yhi - y).pow(2) >= margin_sq
                });
                if !fits {
                    return None;
                }
                out.push(sites);
            }
        }
        Some(out)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthStep {
    pub m: i64,
    pub passed: bool,
    pub droplet_sites: usize,
    pub missing: usize,
    pub blocks: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub frame: StripFrame,
    pub steps: Vec<GrowthStep>,
}

impl GrowthReport {
    pub fn all_passed(&self) -> bool {
        self.steps.iter().all(|s| s.passed)
    }
}

/// Checks `D_m ⊂ [R ∪ D_{m-1} ∪ blocks]` for one `m` on a finite rectangle
/// with empty boundary, which only under-approximates the closure.
pub fn check_step(frame: &StripFrame, family: &UpdateFamily, compiled: &CompiledFamily, m: i64) -> Option<GrowthStep> {
    let blocks = frame.blocks(m)?;
    let target = frame.droplet(m).sites();
    let mut seed = frame.seed_rectangle().sites();
    seed.extend(frame.droplet(m - 1).sites());
    let nblocks = blocks.len();
    seed.extend(blocks.into_iter().flatten());
    let pad = 2 * family.range() + 2;
    let all = seed.iter().chain(&target);
    let (mut x0, mut y0, mut x1, mut y1) = (i64::MAX, i64::MAX, i64::MIN, i64::MIN);
    for &(x, y) in all {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    let (w, h) = ((x1 - x0 + 1 + 2 * pad) as usize, (y1 - y0 + 1 + 2 * pad) as usize);
    let lat = Lattice::rect_with_origin(w, h, Boundary::HardEmpty, (pad - x0, pad - y0)).from_sites(seed);
    let closed = run_to_fixpoint(&lat, compiled, 4 * (w * h) as u64).lattice;
    let missing = target.iter().filter(|&&p| !closed.get(p)).count();
    Some(GrowthStep {
        m,
        passed: missing == 0,
        droplet_sites: target.len(),
        missing,
        blocks: nblocks,
    })
}

/// Smallest `μ` for which every block of steps `1..=m_max` fits.
pub fn minimum_feasible_mu(
    witness: Arc,
    dirs: &[Direction],
    block_lens: &[usize],
    block_margin: i64,
    m_max: i64,
) -> Result<i64, GrowthError> {
    const LIMIT: i64 = 4096;
    for mu in 1..=LIMIT {
        let frame = StripFrame::new(witness, dirs, block_lens, mu, block_margin)?;
        if (1..=m_max).all(|m| frame.blocks(m).is_some()) {
            return Ok(mu);
        }
    }
    Err(GrowthError::NoFeasibleMu(LIMIT))
}

pub const DEFAULT_BLOCK_MARGIN: i64 = 2;

/// Builds the droplet sequence at lateral scale `mu` (the minimum feasible
/// value when `None`) and checks each step `1..=m_max` by simulation.
pub fn verify_droplet_growth(
    family: &UpdateFamily,
    witness: Arc,
    m_max: i64,
    mu: Option<i64>,
    l_max: usize,
) -> Result<GrowthReport, GrowthError> {
    let kind = classify(family).kind;
    if kind != Kind::Critical {
        return Err(GrowthError::WrongClass {
            found: kind,
            expected: Kind::Critical,
        });
    }
    let dirs = cap_directions(family, witness);
    let lens = block_lengths(family, &dirs, l_max)?;
    let margin = DEFAULT_BLOCK_MARGIN * family.range();
    let min = minimum_feasible_mu(witness, &dirs, &lens, margin, m_max)?;
    let mu = mu.unwrap_or(min);
    if mu < min {
        return Err(GrowthError::MuTooSmall { mu, min });
    }
    let frame = StripFrame::new(witness, &dirs, &lens, mu, margin)?;
    let compiled = CompiledFamily::new(family);
    let steps = (1..=m_max)
        .map(|m| check_step(&frame, family, &compiled, m).ok_or(GrowthError::MuTooSmall { mu, min }))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GrowthReport { frame, steps })
}

#[derive(Clone, Debug, Serialize)]
pub struct SupercriticalWitness {
    pub seed: Vec<Site>,
    /// Extent of the seed rectangle along `u⁺` and `uˡ`.
    pub depth: i64,
    pub width: i64,
    pub cap: usize,
    pub exceeded_cap: bool,
    pub exceeded_double_cap: bool,
}

/// The smallest rectangle `{0 ≤ X ≤ s, 0 ≤ Y ≤ s}` whose sparse closure
/// exceeds both `cap` and `2·cap`.
pub fn supercritical_witness(
    family: &UpdateFamily,
    witness: Arc,
    cap: usize,
) -> Result<SupercriticalWitness, GrowthError> {
    let kind = classify(family).kind;
    if kind != Kind::Supercritical {
        return Err(GrowthError::WrongClass {
            found: kind,
            expected: Kind::Supercritical,
        });
    }
    let (right, left) = semicircle_ends(witness)?;
    let forward = right.rot90();
    const LIMIT: i64 = 32;
    for s in 0..=LIMIT {
        let rect = Droplet::new(vec![
            Constraint {
                direction: forward.antipode(),
                offset: 0,
            },
            Constraint {
                direction: forward,
                offset: s,
            },
            Constraint {
                direction: right,
                offset: 0,
            },
            Constraint {
                direction: left,
                offset: s,
            },
        ])
        .expect("rectangle");
        let seed = rect.sites();
        if seed.is_empty() {
            continue;
        }
        let once = sparse_closure(seed.iter().copied(), family, cap);
        if !once.exceeded_cap {
            continue;
        }
        let twice = sparse_closure(seed.iter().copied(), family, 2 * cap);
        return Ok(SupercriticalWitness {
            seed,
            depth: s,
            width: s,
            cap,
            exceeded_cap: true,
            exceeded_double_cap: twice.exceeded_cap,
        });
    }
    Err(GrowthError::NoWitness(LIMIT))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_neighbour_strip_is_a_rectangle() {
        let two = UpdateFamily::two_neighbour();
        let c = classify(&two).witness.unwrap();
        assert_eq!(cap_directions(&two, c), vec![Direction::NORTH]);
        let frame = StripFrame::new(c, &[Direction::NORTH], &[1], 12, 2).unwrap();
        assert_eq!(frame.top, 12);
        // D_0 is the bottom row segment, D_1 adds the next row.
        assert_eq!(frame.droplet(0).sites().len(), 13);
        assert_eq!(frame.droplet(1).sites().len(), 26);
        assert_eq!(frame.blocks(1).unwrap().len(), 1);
    }

    #[test]
    fn growth_examples() {
        let two = UpdateFamily::two_neighbour();
        let c = classify(&two).witness.unwrap();
        let report = verify_droplet_growth(&two, c, 10, Some(12), 20).unwrap();
        assert!(report.all_passed(), "{:?}", report.steps);
        let one = UpdateFamily::one_neighbour();
        assert!(matches!(
            verify_droplet_growth(&one, Arc::open_semicircle(Direction::EAST), 3, None, 5),
            Err(GrowthError::WrongClass { .. })
        ));
    }

    #[test]
    fn supercritical_examples() {
        for fam in [UpdateFamily::one_neighbour(), UpdateFamily::east()] {
            let c = classify(&fam).witness.unwrap();
            let w = supercritical_witness(&fam, c, 1000).unwrap();
            assert!(w.exceeded_cap && w.exceeded_double_cap);
            assert_eq!(w.seed.len(), 1);
        }
        let two = UpdateFamily::two_neighbour();
        assert!(supercritical_witness(&two, classify(&two).witness.unwrap(), 10).is_err());
    }
}
