//! Droplets: finite intersections of integer half-planes `{x : ⟨x,v⟩ ≤ c}`.
//!
//! All decisions are exact. Vertices are rational, so droplet diameters are
//! compared as rational squared lengths.

use serde::{Deserialize, Serialize};
use thiserror::Error;
use ubp_geometry::{cross, dot, semicircle_avoiding, Arc, ArcSet, Direction, Site};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Constraint {
    pub direction: Direction,
    pub offset: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Droplet {
    constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DropletError {
    #[error("constraint directions do not positively span the plane")]
    Unbounded,
    #[error("no directions were given")]
    NoDirections,
    #[error("cannot build a droplet around an empty set")]
    EmptySet,
    #[error("the stable set misses an open semicircle; no spanning stable directions exist")]
    Supercritical,
}

/// Sorted counterclockwise with every gap below π.
fn positively_spanning(dirs: &[Direction]) -> bool {
    let mut d = dirs.to_vec();
    d.sort();
    d.dedup();
    d.len() >= 3 && (0..d.len()).all(|i| cross(d[i].as_site(), d[(i + 1) % d.len()].as_site()) > 0)
}

/// Rational point `num / den` with `den > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub num: (i128, i128),
    pub den: i128,
}

/// Squared length `num / den` in lowest terms, `den > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SqLen {
    pub num: i128,
    pub den: i128,
}

impl SqLen {
    pub const ZERO: SqLen = SqLen { num: 0, den: 1 };

    pub fn new(num: i128, den: i128) -> SqLen {
        assert!(den > 0, "denominator must be positive");
        let g = gcd(num.abs(), den);
        SqLen {
            num: num / g,
            den: den / g,
        }
    }

    pub fn integer(n: i128) -> SqLen {
        SqLen { num: n, den: 1 }
    }

    pub fn length(self) -> f64 {
        (self.num as f64 / self.den as f64).sqrt()
    }

    /// Exact test of `√self ≤ c1·√a + c2·√b`.
    pub fn sqrt_le_sum(self, (c1, a): (i128, SqLen), (c2, b): (i128, SqLen)) -> bool {
        let l = lcm(lcm(self.den, a.den), b.den);
        sqrt_le_sum(
            self.num * (l / self.den),
            (c1, a.num * (l / a.den)),
            (c2, b.num * (l / b.den)),
        )
    }
}

impl Ord for SqLen {
    fn cmp(&self, other: &SqLen) -> std::cmp::Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

impl PartialOrd for SqLen {
    fn partial_cmp(&self, other: &SqLen) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Droplet {
    pub fn new(constraints: Vec<Constraint>) -> Result<Droplet, DropletError> {
        let dirs: Vec<Direction> = constraints.iter().map(|c| c.direction).collect();
        if !positively_spanning(&dirs) {
            return Err(DropletError::Unbounded);
        }
        Ok(Droplet { constraints })
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn directions(&self) -> Vec<Direction> {
        self.constraints.iter().map(|c| c.direction).collect()
    }

    pub fn contains(&self, p: Site) -> bool {
        self.constraints
            .iter()
            .all(|c| dot(p, c.direction.as_site()) <= c.offset as i128)
    }

    pub fn translated(&self, by: Site) -> Droplet {
        let constraints = self
            .constraints
            .iter()
            .map(|c| Constraint {
                direction: c.direction,
                offset: c.offset + dot(by, c.direction.as_site()) as i64,
            })
            .collect();
        Droplet { constraints }
    }

    /// Pushes every side outward by `by` lattice lines.
    pub fn inflated(&self, by: i64) -> Droplet {
        let constraints = self
            .constraints
            .iter()
            .map(|c| Constraint {
                direction: c.direction,
                offset: c.offset + by,
            })
            .collect();
        Droplet { constraints }
    }

    /// Vertices of the continuous polygon, unordered and deduplicated.
    pub fn vertices(&self) -> Vec<Vertex> {
        let cs = &self.constraints;
        let mut out: Vec<Vertex> = Vec::new();
        for i in 0..cs.len() {
            for j in i + 1..cs.len() {
                let (a, b) = (cs[i].direction.as_site(), cs[j].direction.as_site());
                let det = cross(a, b);
                if det == 0 {
                    continue;
                }
                let (ci, cj) = (cs[i].offset as i128, cs[j].offset as i128);
                // Cramer: a·p = ci, b·p = cj.
                let mut num = (ci * b.1 as i128 - cj * a.1 as i128, cj * a.0 as i128 - ci * b.0 as i128);
                let mut den = det;
                if den < 0 {
                    num = (-num.0, -num.1);
                    den = -den;
                }
                let inside = cs.iter().all(|c| {
                    let v = c.direction.as_site();
                    num.0 * v.0 as i128 + num.1 * v.1 as i128 <= c.offset as i128 * den
                });
                let g = gcd(gcd(num.0.abs(), num.1.abs()), den);
                let v = Vertex {
                    num: (num.0 / g, num.1 / g),
                    den: den / g,
                };
                if inside && !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }

    /// Inclusive integer bounding box of the continuous polygon, `None` if empty.
    pub fn bounding_box(&self) -> Option<(Site, Site)> {
        let vs = self.vertices();
        if vs.is_empty() {
            return None;
        }
        let lo = |n: i128, d: i128| n.div_euclid(d) as i64;
        let hi = |n: i128, d: i128| (-(-n).div_euclid(d)) as i64;
        let xmin = vs.iter().map(|v| hi(v.num.0, v.den)).min()?;
        let xmax = vs.iter().map(|v| lo(v.num.0, v.den)).max()?;
        let ymin = vs.iter().map(|v| hi(v.num.1, v.den)).min()?;
        let ymax = vs.iter().map(|v| lo(v.num.1, v.den)).max()?;
        Some(((xmin, ymin), (xmax, ymax)))
    }

    /// Lattice sites in row-major order.
    pub fn sites(&self) -> Vec<Site> {
        let Some(((x0, y0), (x1, y1))) = self.bounding_box() else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for y in y0..=y1 {
            for x in x0..=x1 {
                if self.contains((x, y)) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.sites().is_empty()
    }

    /// Offsets lowered until every side touches a lattice site.
    pub fn tightened(&self) -> Droplet {
        let dirs = self.directions();
        match minimal_droplet(&self.sites(), &dirs) {
            Ok(d) => d,
            Err(_) => self.clone(),
        }
    }

    /// Squared diameter of the continuous polygon, attained between vertices.
    pub fn diam_sq(&self) -> SqLen {
        let vs = self.vertices();
        let mut best = SqLen::ZERO;
        for (i, a) in vs.iter().enumerate() {
            for b in &vs[i + 1..] {
                let dx = a.num.0 * b.den - b.num.0 * a.den;
                let dy = a.num.1 * b.den - b.num.1 * a.den;
                let den = a.den * b.den;
                best = best.max(SqLen::new(dx * dx + dy * dy, den * den));
            }
        }
        best
    }

    pub fn diam(&self) -> f64 {
        self.diam_sq().length()
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: i128, b: i128) -> i128 {
    a / gcd(a, b) * b
}

/// Smallest droplet with the given directions containing `sites`.
pub fn minimal_droplet(sites: &[Site], dirs: &[Direction]) -> Result<Droplet, DropletError> {
    if dirs.is_empty() {
        return Err(DropletError::NoDirections);
    }
    if sites.is_empty() {
        return Err(DropletError::EmptySet);
    }
    let constraints = dirs
        .iter()
        .map(|&v| Constraint {
            direction: v,
            offset: sites.iter().map(|&p| dot(p, v.as_site())).max().expect("nonempty") as i64,
        })
        .collect();
    Droplet::new(constraints)
}

/// Exact squared Euclidean diameter of a finite site set (0 if empty).
pub fn diam_sq(sites: &[Site]) -> i128 {
    // Only the extreme sites of each row can realise the diameter.
    let mut rows: std::collections::BTreeMap<i64, (i64, i64)> = std::collections::BTreeMap::new();
    for &(x, y) in sites {
        let e = rows.entry(y).or_insert((x, x));
        e.0 = e.0.min(x);
        e.1 = e.1.max(x);
    }
    let ends: Vec<Site> = rows.iter().flat_map(|(&y, &(a, b))| [(a, y), (b, y)]).collect();
    let mut best = 0i128;
    for i in 0..ends.len() {
        for j in i + 1..ends.len() {
            let (dx, dy) = ((ends[i].0 - ends[j].0) as i128, (ends[i].1 - ends[j].1) as i128);
            best = best.max(dx * dx + dy * dy);
        }
    }
    best
}

pub fn diam(sites: &[Site]) -> f64 {
    (diam_sq(sites) as f64).sqrt()
}

/// Exact test of `√d ≤ c1·√a1 + c2·√a2` for non-negative integers.
pub fn sqrt_le_sum(d: i128, (c1, a1): (i128, i128), (c2, a2): (i128, i128)) -> bool {
    let lhs = d - c1 * c1 * a1 - c2 * c2 * a2;
    lhs <= 0 || lhs * lhs <= 4 * c1 * c1 * c2 * c2 * a1 * a2
}

/// Three or four stable directions whose positive hull is the whole plane.
///
/// The axes are used when all four are stable. Otherwise candidates are the
/// arc endpoints, one interior direction per arc and every stable primitive
/// direction with coordinates in `[-3, 3]`; the spanning triple with the
/// smallest largest coordinate wins, ties broken lexicographically.
pub fn choose_spanning_directions(stab: &ArcSet) -> Result<Vec<Direction>, DropletError> {
    if semicircle_avoiding(stab).is_some() {
        return Err(DropletError::Supercritical);
    }
    let axes = [Direction::EAST, Direction::NORTH, Direction::WEST, Direction::SOUTH];
    if axes.iter().all(|&u| stab.contains(u)) {
        return Ok(axes.to_vec());
    }
    let mut cands: Vec<Direction> = Vec::new();
    for arc in stab.arcs() {
        cands.extend(endpoint_candidates(arc).into_iter().filter(|&u| stab.contains(u)));
    }
    for x in -3i64..=3 {
        for y in -3i64..=3 {
            if let Some(u) = Direction::new(x, y) {
                if stab.contains(u) {
                    cands.push(u);
                }
            }
        }
    }
    cands.sort();
    cands.dedup();
    let size = |u: Direction| u.x().abs().max(u.y().abs());
    let mut best: Option<(i64, [Site; 3], [Direction; 3])> = None;
    for i in 0..cands.len() {
        for j in i + 1..cands.len() {
            for k in j + 1..cands.len() {
                let t = [cands[i], cands[j], cands[k]];
                if !positively_spanning(&t) {
                    continue;
                }
                let cost = t.iter().map(|&u| size(u)).max().expect("three");
                let mut key = t.map(|u| u.as_site());
                key.sort();
                if best.as_ref().is_none_or(|b| (cost, key) < (b.0, b.1)) {
                    best = Some((cost, key, t));
                }
            }
        }
    }
    best.map(|b| b.2.to_vec()).ok_or(DropletError::Supercritical)
}

fn endpoint_candidates(arc: Arc) -> Vec<Direction> {
    if arc.is_whole() {
        return vec![Direction::EAST];
    }
    let mut v = vec![arc.start, arc.end];
    if !arc.is_point() {
        v.push(ubp_geometry::interior_direction(arc.start, arc.end));
    }
    v
}
