//! Rational directions on the unit circle, stored as primitive integer vectors.
//!
//! Angular order is measured counterclockwise from the positive x-axis in
//! `[0, 2π)` and decided with half-plane classification plus a cross-product
//! sign. Products are taken in `i128`, so any coordinates fitting in `i64`
//! are safe.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A lattice offset or site.
pub type Site = (i64, i64);

/// Primitive nonzero integer vector, identified with a point of the circle.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Direction {
    x: i64,
    y: i64,
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Direction {
    pub const EAST: Direction = Direction { x: 1, y: 0 };
    pub const NORTH: Direction = Direction { x: 0, y: 1 };
    pub const WEST: Direction = Direction { x: -1, y: 0 };
    pub const SOUTH: Direction = Direction { x: 0, y: -1 };

    /// Normalises `(x, y)` to its primitive multiple. `None` for the zero vector.
    pub fn from_vector(x: i64, y: i64) -> Option<Direction> {
        if x == 0 && y == 0 {
            return None;
        }
        let g = gcd(x, y);
        Some(Direction { x: x / g, y: y / g })
    }

    /// Accepts `(x, y)` only if it is already primitive.
    pub fn new(x: i64, y: i64) -> Option<Direction> {
        if (x, y) != (0, 0) && gcd(x, y) == 1 {
            Some(Direction { x, y })
        } else {
            None
        }
    }

    pub fn x(self) -> i64 {
        self.x
    }

    pub fn y(self) -> i64 {
        self.y
    }

    pub fn as_site(self) -> Site {
        (self.x, self.y)
    }

    pub fn antipode(self) -> Direction {
        Direction { x: -self.x, y: -self.y }
    }

    /// Quarter turn counterclockwise: the left-hand side when looking along `self`.
    pub fn rot90(self) -> Direction {
        Direction { x: -self.y, y: self.x }
    }

    /// Quarter turn clockwise: the right-hand side when looking along `self`.
    pub fn rot_neg90(self) -> Direction {
        Direction { x: self.y, y: -self.x }
    }

    pub fn norm_sq(self) -> i128 {
        let (x, y) = (self.x as i128, self.y as i128);
        x * x + y * y
    }

    /// `0` for angles in `[0, π)`, `1` for `[π, 2π)`.
    fn half(self) -> u8 {
        if self.y > 0 || (self.y == 0 && self.x > 0) {
            0
        } else {
            1
        }
    }
}

pub fn cross(a: Site, b: Site) -> i128 {
    a.0 as i128 * b.1 as i128 - a.1 as i128 * b.0 as i128
}

pub fn dot(a: Site, b: Site) -> i128 {
    a.0 as i128 * b.0 as i128 + a.1 as i128 * b.1 as i128
}

/// Counterclockwise order of the angles of `a` and `b` in `[0, 2π)`.
pub fn angle_compare(a: Direction, b: Direction) -> Ordering {
    match a.half().cmp(&b.half()) {
        Ordering::Equal => {}
        other => return other,
    }
    // Same half-plane: the angular difference is below π, so the cross sign decides.
    0.cmp(&cross(a.as_site(), b.as_site()))
}

/// Whether the counterclockwise sweep from `a` to `b` is at least π.
/// `a == b` counts as a zero sweep.
pub fn ccw_gap_at_least_pi(a: Direction, b: Direction) -> bool {
    cross(a.as_site(), b.as_site()) < 0 || b == a.antipode()
}

/// Length class of the open counterclockwise arc from `a` to `b`, with `a == b`
/// read as the full turn.
pub(crate) fn sweep_vs_pi(a: Direction, b: Direction) -> Ordering {
    if a == b {
        return Ordering::Greater;
    }
    let c = cross(a.as_site(), b.as_site());
    if c > 0 {
        Ordering::Less
    } else if c < 0 {
        Ordering::Greater
    } else {
        Ordering::Equal
    }
}

/// A rational direction strictly inside the open counterclockwise arc from `a`
/// to `b` (`a == b` denotes the circle minus one point).
pub fn interior_direction(a: Direction, b: Direction) -> Direction {
    match sweep_vs_pi(a, b) {
        Ordering::Less => sum_direction(a, b),
        Ordering::Equal => a.rot90(),
        Ordering::Greater if a == b => a.antipode(),
        Ordering::Greater => sum_direction(a, b).antipode(),
    }
}

fn sum_direction(a: Direction, b: Direction) -> Direction {
    Direction::from_vector(a.x + b.x, a.y + b.y).expect("non-antipodal sum is nonzero")
}

impl PartialOrd for Direction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Direction {
    fn cmp(&self, other: &Self) -> Ordering {
        angle_compare(*self, *other)
    }
}

impl fmt::Debug for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl Serialize for Direction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.x, self.y].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Direction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [x, y] = <[i64; 2]>::deserialize(d)?;
        Direction::new(x, y).ok_or_else(|| serde::de::Error::custom(format!("({x},{y}) is not a primitive vector")))
    }
}
