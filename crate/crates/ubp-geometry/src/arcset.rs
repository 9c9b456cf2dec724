//! Arcs and finite unions of arcs on the circle.
//!
//! An [`ArcSet`] is stored as sorted breakpoints with a membership flag for
//! each breakpoint and for each open gap between consecutive breakpoints.
//! A breakpoint survives canonicalisation only if its flag differs from one
//! of its neighbouring gaps, which makes the representation unique and
//! structural equality coincide with set equality.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::direction::{sweep_vs_pi, Direction};

/// Counterclockwise arc from `start` to `end`.
///
/// With `start != end` the sweep lies strictly between `0` and `2π`.
/// With `start == end`: both ends closed is the single point, both open is
/// the circle minus that point, and mixed flags are the whole circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arc {
    pub start: Direction,
    pub end: Direction,
    pub start_closed: bool,
    pub end_closed: bool,
}

impl Arc {
    pub fn open(start: Direction, end: Direction) -> Arc {
        Arc {
            start,
            end,
            start_closed: false,
            end_closed: false,
        }
    }

    pub fn closed(start: Direction, end: Direction) -> Arc {
        Arc {
            start,
            end,
            start_closed: true,
            end_closed: true,
        }
    }

    pub fn point(u: Direction) -> Arc {
        Arc::closed(u, u)
    }

    pub fn whole() -> Arc {
        Arc {
            start: Direction::EAST,
            end: Direction::EAST,
            start_closed: true,
            end_closed: false,
        }
    }

    /// Open semicircle starting at `start`.
    pub fn open_semicircle(start: Direction) -> Arc {
        Arc::open(start, start.antipode())
    }

    pub fn is_whole(&self) -> bool {
        self.start == self.end && self.start_closed != self.end_closed
    }

    pub fn is_point(&self) -> bool {
        self.start == self.end && self.start_closed && self.end_closed
    }

    pub fn contains(&self, u: Direction) -> bool {
        ArcSet::from_arc(*self).contains(u)
    }

    /// Sweep length compared with π.
    pub fn length_vs_pi(&self) -> Ordering {
        if self.is_point() {
            Ordering::Less
        } else {
            sweep_vs_pi(self.start, self.end)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ArcSet {
    breaks: Vec<Direction>,
    point_in: Vec<bool>,
    /// `gap_in[i]`: the open gap from `breaks[i]` to the next breakpoint.
    gap_in: Vec<bool>,
    /// Membership of every direction when there are no breakpoints.
    all: bool,
}

impl ArcSet {
    pub fn empty() -> ArcSet {
        ArcSet {
            breaks: Vec::new(),
            point_in: Vec::new(),
            gap_in: Vec::new(),
            all: false,
        }
    }

    pub fn full() -> ArcSet {
        ArcSet {
            all: true,
            ..ArcSet::empty()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.breaks.is_empty() && !self.all
    }

    pub fn is_full(&self) -> bool {
        self.breaks.is_empty() && self.all
    }

    pub fn from_arc(arc: Arc) -> ArcSet {
        if arc.is_whole() {
            return ArcSet::full();
        }
        if arc.start == arc.end {
            let closed = arc.start_closed;
            return ArcSet {
                breaks: vec![arc.start],
                point_in: vec![closed],
                gap_in: vec![!closed],
                all: false,
            };
        }
        let raw = if arc.start < arc.end {
            ArcSet {
                breaks: vec![arc.start, arc.end],
                point_in: vec![arc.start_closed, arc.end_closed],
                gap_in: vec![true, false],
                all: false,
            }
        } else {
            ArcSet {
                breaks: vec![arc.end, arc.start],
                point_in: vec![arc.end_closed, arc.start_closed],
                gap_in: vec![false, true],
                all: false,
            }
        };
        raw.canonical()
    }

    pub fn from_arcs<I: IntoIterator<Item = Arc>>(arcs: I) -> ArcSet {
        arcs.into_iter()
            .fold(ArcSet::empty(), |acc, a| acc.union(&ArcSet::from_arc(a)))
    }

    pub fn points<I: IntoIterator<Item = Direction>>(dirs: I) -> ArcSet {
        ArcSet::from_arcs(dirs.into_iter().map(Arc::point))
    }

    /// Breakpoints in counterclockwise order from the positive x-axis.
    pub fn breakpoints(&self) -> &[Direction] {
        &self.breaks
    }

    pub fn contains(&self, u: Direction) -> bool {
        if self.breaks.is_empty() {
            return self.all;
        }
        match self.breaks.binary_search(&u) {
            Ok(i) => self.point_in[i],
            Err(i) => self.gap_in[(i + self.breaks.len() - 1) % self.breaks.len()],
        }
    }

    /// Membership of the directions immediately counterclockwise of `u`.
    pub fn contains_just_after(&self, u: Direction) -> bool {
        match self.breaks.binary_search(&u) {
            Ok(i) => self.gap_in[i],
            Err(_) => self.contains(u),
        }
    }

    /// Membership of the directions immediately clockwise of `u`.
    pub fn contains_just_before(&self, u: Direction) -> bool {
        let k = self.breaks.len();
        match self.breaks.binary_search(&u) {
            Ok(i) => self.gap_in[(i + k - 1) % k],
            Err(_) => self.contains(u),
        }
    }

    pub fn complement(&self) -> ArcSet {
        ArcSet {
            breaks: self.breaks.clone(),
            point_in: self.point_in.iter().map(|b| !b).collect(),
            gap_in: self.gap_in.iter().map(|b| !b).collect(),
            all: self.breaks.is_empty() && !self.all,
        }
    }

    pub fn union(&self, other: &ArcSet) -> ArcSet {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &ArcSet) -> ArcSet {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &ArcSet) -> ArcSet {
        self.combine(other, |a, b| a && !b)
    }

    pub fn is_subset(&self, other: &ArcSet) -> bool {
        self.difference(other).is_empty()
    }

    fn combine(&self, other: &ArcSet, op: impl Fn(bool, bool) -> bool) -> ArcSet {
        let mut breaks: Vec<Direction> = self.breaks.iter().chain(other.breaks.iter()).copied().collect();
        breaks.sort();
        breaks.dedup();
        if breaks.is_empty() {
            return ArcSet {
                all: op(self.all, other.all),
                ..ArcSet::empty()
            };
        }
        let point_in = breaks
            .iter()
            .map(|&d| op(self.contains(d), other.contains(d)))
            .collect();
        let gap_in = breaks
            .iter()
            .map(|&d| op(self.contains_just_after(d), other.contains_just_after(d)))
            .collect();
        ArcSet {
            breaks,
            point_in,
            gap_in,
            all: false,
        }
        .canonical()
    }

    /// Drops every breakpoint whose flag equals both neighbouring gaps.
    pub fn canonical(&self) -> ArcSet {
        let k = self.breaks.len();
        if k == 0 {
            return ArcSet {
                all: self.all,
                ..ArcSet::empty()
            };
        }
        let keep: Vec<usize> = (0..k)
            .filter(|&i| {
                let before = self.gap_in[(i + k - 1) % k];
                !(self.point_in[i] == before && self.gap_in[i] == before)
            })
            .collect();
        if keep.is_empty() {
            return ArcSet {
                all: self.point_in[0],
                ..ArcSet::empty()
            };
        }
        ArcSet {
            breaks: keep.iter().map(|&i| self.breaks[i]).collect(),
            point_in: keep.iter().map(|&i| self.point_in[i]).collect(),
            gap_in: keep.iter().map(|&i| self.gap_in[i]).collect(),
            all: false,
        }
    }

    /// Maximal connected components, sorted counterclockwise by start.
    pub fn arcs(&self) -> Vec<Arc> {
        let k = self.breaks.len();
        if k == 0 {
            return if self.all { vec![Arc::whole()] } else { Vec::new() };
        }
        // Atoms in cyclic order: 2i is breakpoint i, 2i+1 the gap after it.
        let member = |a: usize| {
            if a % 2 == 0 {
                self.point_in[a / 2]
            } else {
                self.gap_in[a / 2]
            }
        };
        let n = 2 * k;
        let first_out = (0..n)
            .find(|&a| !member(a))
            .expect("canonical non-full set has an excluded atom");
        let mut out = Vec::new();
        let mut step = 1;
        while step <= n {
            let a = (first_out + step) % n;
            if !member(a) {
                step += 1;
                continue;
            }
            let begin = a;
            let mut last = a;
            while step < n && member((first_out + step + 1) % n) {
                step += 1;
                last = (first_out + step) % n;
            }
            step += 1;
            let (start, start_closed) = if begin % 2 == 0 {
                (self.breaks[begin / 2], true)
            } else {
                (self.breaks[begin / 2], false)
            };
            let (end, end_closed) = if last % 2 == 0 {
                (self.breaks[last / 2], true)
            } else {
                (self.breaks[(last / 2 + 1) % k], false)
            };
            out.push(Arc {
                start,
                end,
                start_closed,
                end_closed,
            });
        }
        out.sort_by(|a, b| a.start.cmp(&b.start).then(b.start_closed.cmp(&a.start_closed)));
        out
    }
}

/// JSON form: component arcs plus a whole-circle flag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcSetJson {
    pub arcs: Vec<Arc>,
    pub full_circle: bool,
}

impl From<&ArcSet> for ArcSetJson {
    fn from(s: &ArcSet) -> Self {
        if s.is_full() {
            ArcSetJson {
                arcs: Vec::new(),
                full_circle: true,
            }
        } else {
            ArcSetJson {
                arcs: s.arcs(),
                full_circle: false,
            }
        }
    }
}

impl From<ArcSetJson> for ArcSet {
    fn from(j: ArcSetJson) -> Self {
        if j.full_circle {
            ArcSet::full()
        } else {
            ArcSet::from_arcs(j.arcs)
        }
    }
}

impl Serialize for ArcSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ArcSetJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ArcSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        ArcSetJson::deserialize(d).map(ArcSet::from)
    }
}
