//! u-block search by band simulation.
//!
//! Sites are relabelled as `x = s·rot90(u) + i·w` with `⟨w,u⟩ = 1`, so line
//! `i` is `{⟨x,u⟩ = i}` and `s` increases to the left when looking along `u`.
//! The band `0 ≤ i ≤ window_h·|u|²` of `window_w` columns is simulated with
//! everything below row 0 virtually infected and everything else outside the
//! window empty; that under-approximates the true closure.
//!
//! A side certificate is a subset `B` of some reached state, a period `p` and
//! a shift `k` with `B + k·side ⊆ Ψ^p(B)`, where `Ψ` is the window dynamics,
//! plus a run of at least `k` infected sites of `B` on row 0. Monotonicity and
//! translation invariance along the line then give
//! `B + n·k·side ⊆ closure` for all `n`, and the shifted runs cover a whole
//! ray of `ℓ_u`. A fixpoint without certificate proves nothing beyond the
//! window.

use serde::Serialize;
use thiserror::Error;
use ubp_engine::{Boundary, CompiledFamily, Lattice, Stepper};
use ubp_geometry::{cross, dot, Direction, Site, UpdateFamily};

/// Integer frame adapted to a direction.
#[derive(Clone, Copy, Debug)]
pub struct LineFrame {
    pub u: Direction,
    /// Unit step along `ℓ_u` to the left of `u`.
    pub left: Direction,
    /// Lattice vector with `⟨w,u⟩ = 1`.
    pub w: Site,
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a.signum() * a, a.signum(), 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

impl LineFrame {
    pub fn new(u: Direction) -> LineFrame {
        let (g, p, q) = ext_gcd(u.x(), u.y());
        debug_assert_eq!(g, 1);
        let left = u.rot90();
        let mut w = (p, q);
        let dd = left.norm_sq();
        let wd = dot(w, left.as_site());
        // Shortest representative of w modulo the line direction.
        let c = (2 * wd + dd).div_euclid(2 * dd) as i64;
        w = (w.0 - c * left.x(), w.1 - c * left.y());
        debug_assert_eq!(dot(w, u.as_site()), 1);
        LineFrame { u, left, w }
    }

    /// `(s, i)` coordinates of a lattice vector.
    pub fn to_frame(&self, x: Site) -> Site {
        (cross(self.w, x) as i64, dot(x, self.u.as_site()) as i64)
    }

    pub fn from_frame(&self, (s, i): Site) -> Site {
        (s * self.left.x() + i * self.w.0, s * self.left.y() + i * self.w.1)
    }

    pub fn transform(&self, family: &UpdateFamily) -> UpdateFamily {
        UpdateFamily::new(
            family
                .rules()
                .iter()
                .map(|r| r.iter().map(|&x| self.to_frame(x)).collect())
                .collect(),
        )
        .expect("a unimodular relabelling keeps the family valid")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum UBlockStatus {
    Block,
    LeftBlockOnly,
    RightBlockOnly,
    NotBlockWithinWindow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    /// Generation of the state `B` was cut from.
    pub start_generation: u64,
    pub period: u64,
    /// Translation in primitive steps along `ℓ_u`.
    pub shift: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct UBlockVerdict {
    pub status: UBlockStatus,
    pub window_w: usize,
    pub window_h: usize,
    pub left: Option<Certificate>,
    pub right: Option<Certificate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UBlockError {
    #[error("window width {window_w} is below 8·range·Z_length = {min}")]
    WindowTooNarrow { window_w: usize, min: usize },
    #[error("window height {window_h} is below 2·range = {min}")]
    WindowTooLow { window_h: usize, min: usize },
}

pub fn default_window_w(family: &UpdateFamily, z_length: usize) -> usize {
    64 * family.range() as usize * z_length.max(1)
}

pub fn default_window_h(family: &UpdateFamily) -> usize {
    4 * family.range() as usize
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

/// Whether `b` shifted by `k` columns (toward higher columns when `up`) lies in `target`.
fn shifted_subset(b: &Lattice, target: &Lattice, k: usize, up: bool) -> bool {
    let (w, wpr) = (b.width(), b.words_per_row());
    for (r, row) in b.words().chunks(wpr).enumerate() {
        for (j, &word) in row.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let col = 64 * j + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let c = if up { col + k } else { col.wrapping_sub(k) };
                if c >= w || !target.get_cell(c, r) {
                    return false;
                }
            }
        }
    }
    true
}

fn longest_run(lat: &Lattice, row: usize) -> usize {
    let (mut best, mut cur) = (0, 0);
    for col in 0..lat.width() {
        if lat.get_cell(col, row) {
            cur += 1;
            best = best.max(cur);
        } else {
            cur = 0;
        }
    }
    best
}

/// Lowest and highest infected column, if any.
fn column_extent(lat: &Lattice) -> Option<(usize, usize)> {
    let wpr = lat.words_per_row();
    let mut cols = vec![0u64; wpr];
    for row in lat.words().chunks(wpr) {
        for (acc, &w) in cols.iter_mut().zip(row) {
            *acc |= w;
        }
    }
    let lo = cols.iter().position(|&w| w != 0)?;
    let hi = cols.iter().rposition(|&w| w != 0)?;
    Some((
        64 * lo + cols[lo].trailing_zeros() as usize,
        64 * hi + 63 - cols[hi].leading_zeros() as usize,
    ))
}

struct Search<'a> {
    family: &'a CompiledFamily,
    margin: usize,
    max_period: u64,
}

impl Search<'_> {
    fn attempt(&self, state: &Lattice, t0: u64, want: [bool; 2], found: &mut [Option<Certificate>; 2]) {
        let mut b = state.clone();
        let w = b.width();
        for row in 0..b.height() {
            for col in (0..self.margin.min(w)).chain(w.saturating_sub(self.margin)..w) {
                b.set_cell(col, row, false);
            }
        }
        let Some((lo, hi)) = column_extent(&b) else { return };
        let run = longest_run(&b, 0);
        if run == 0 {
            return;
        }
        let mut cur = b.clone();
        let mut stepper = Stepper::new(self.family);
        for p in 1..=self.max_period {
            stepper.step(&mut cur);
            let (nlo, nhi) = column_extent(&cur).expect("monotone");
            for (idx, side) in [(0, Side::Left), (1, Side::Right)] {
                if !want[idx] || found[idx].is_some() {
                    continue;
                }
                // Left is toward higher columns; the front advance bounds the shift.
                let advance = match side {
                    Side::Left => nhi - hi,
                    Side::Right => lo - nlo,
                };
                let top = advance.min(run);
                for k in (top.saturating_sub(2).max(1)..=top).rev() {
                    if shifted_subset(&b, &cur, k, side == Side::Left) {
                        found[idx] = Some(Certificate {
                            start_generation: t0,
                            period: p,
                            shift: k as u64,
                        });
                        break;
                    }
                }
            }
            if (found[0].is_some() || !want[0]) && (found[1].is_some() || !want[1]) {
                return;
            }
        }
    }
}

/// Decides whether `z_length` consecutive sites of `ℓ_u` together with the
/// half-plane `{⟨x,u⟩ < 0}` infect a whole ray of `ℓ_u` on either side.
pub fn is_u_block(
    family: &UpdateFamily,
    u: Direction,
    z_length: usize,
    window_w: Option<usize>,
    window_h: Option<usize>,
) -> Result<UBlockVerdict, UBlockError> {
    let range = family.range() as usize;
    let window_w = window_w.unwrap_or_else(|| default_window_w(family, z_length));
    let window_h = window_h.unwrap_or_else(|| default_window_h(family));
    if window_w < 8 * range * z_length || window_w == 0 {
        return Err(UBlockError::WindowTooNarrow {
            window_w,
            min: (8 * range * z_length).max(1),
        });
    }
    if window_h < 2 * range {
        return Err(UBlockError::WindowTooLow {
            window_h,
            min: 2 * range,
        });
    }

    let frame = LineFrame::new(u);
    let banded = frame.transform(family);
    let compiled = CompiledFamily::new(&banded);
    let smax = banded
        .all_offsets()
        .iter()
        .map(|o| o.0.unsigned_abs() as usize)
        .max()
        .unwrap_or(0)
        .max(1);
    let max_period = (window_w / (4 * smax)).clamp(1, 64);
    let margin = smax * max_period;
    let rows = window_h * u.norm_sq() as usize + 1;

    let mut lat = Lattice::rect_with_origin(window_w, rows, Boundary::VirtualHalfPlane(Direction::NORTH), (0, 0));
    let c0 = (window_w - z_length) / 2;
    for c in c0..c0 + z_length {
        lat.set_cell(c, 0, true);
    }

    let search = Search {
        family: &compiled,
        margin,
        max_period: max_period as u64,
    };
    let mut found: [Option<Certificate>; 2] = [None, None];
    let mut stepper = Stepper::new(&compiled);
    let mut next_checkpoint = 0u64;
    let cap = 4 * window_w as u64 + rows as u64;
    for t in 0..=cap {
        let changed = t == 0 || stepper.step(&mut lat);
        let near_edge = column_extent(&lat).is_some_and(|(lo, hi)| lo < margin || hi + margin >= window_w);
        let last = !changed || near_edge || t == cap;
        if t == next_checkpoint || last {
            search.attempt(&lat, t, [true, true], &mut found);
            next_checkpoint = (2 * next_checkpoint).max(1);
        }
        if last || (found[0].is_some() && found[1].is_some()) {
            break;
        }
    }
    let status = match (found[0].is_some(), found[1].is_some()) {
        (true, true) => UBlockStatus::Block,
        (true, false) => UBlockStatus::LeftBlockOnly,
        (false, true) => UBlockStatus::RightBlockOnly,
        (false, false) => UBlockStatus::NotBlockWithinWindow,
    };
    Ok(UBlockVerdict {
        status,
        window_w,
        window_h,
        left: found[0],
        right: found[1],
    })
}
