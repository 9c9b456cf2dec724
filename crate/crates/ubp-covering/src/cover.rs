//! The covering algorithm: droplets around disjoint breakthrough blocks,
//! merged while some translate of the reference droplet meets two of them.

use std::collections::{HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use ubp_family::{block_at, enumerate_breakthrough_blocks};
use ubp_geometry::{stable_set, Direction, Site, UpdateFamily};

use crate::droplet::{choose_spanning_directions, minimal_droplet, Droplet, DropletError, SqLen};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoverOrder {
    /// Blocks by size, then anchor, then shape; merges by creation order.
    Greedy,
    /// Candidate blocks and merge partners in a seeded random order.
    Shuffled(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MergeStep {
    pub left: usize,
    pub right: usize,
    pub merged: usize,
    pub left_diam_sq: SqLen,
    pub right_diam_sq: SqLen,
    pub merged_diam_sq: SqLen,
}

impl MergeStep {
    /// The merged diameter is at most three times the larger input plus `diam(D̂)`.
    pub fn respects_scale(&self, reference_diam_sq: SqLen) -> bool {
        let larger = self.left_diam_sq.max(self.right_diam_sq);
        self.merged_diam_sq.sqrt_le_sum((3, larger), (1, reference_diam_sq))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverReport {
    /// Selected blocks as absolute site lists.
    pub blocks: Vec<Vec<Site>>,
    /// Final droplets, sorted by their constraint offsets.
    pub droplets: Vec<Droplet>,
    /// Droplet ids: `0..blocks.len()` are the initial copies, merges append.
    pub merge_trace: Vec<MergeStep>,
}

#[derive(Clone, Debug)]
struct Shape {
    sites: Vec<Site>,
    /// Smallest site of the block before normalisation, so that
    /// `sites + anchor ⊂ D̂ + anchor - raw_min`.
    raw_min: Site,
}

/// Family data shared by every cover run.
#[derive(Clone, Debug)]
pub struct CoverSetup {
    dirs: Vec<Direction>,
    reference: Droplet,
    /// `D̂ - D̂` as a set: two sites are bridged by some translate of `D̂`
    /// exactly when their difference lies here.
    bridge: HashSet<Site>,
    bridge_reach: i64,
    shapes: Vec<Shape>,
}

impl CoverSetup {
    pub fn new(family: &UpdateFamily) -> Result<CoverSetup, DropletError> {
        let dirs = choose_spanning_directions(&stable_set(family))?;
        let reference = reference_droplet(family, &dirs)?;
        let hs = reference.sites();
        let bridge: HashSet<Site> = hs
            .iter()
            .flat_map(|&a| hs.iter().map(move |&b| (a.0 - b.0, a.1 - b.1)))
            .collect();
        let bridge_reach = bridge.iter().map(|d| d.0.abs().max(d.1.abs())).max().unwrap_or(0);
        let mut shapes: Vec<Shape> = enumerate_breakthrough_blocks(family)
            .into_iter()
            .map(|b| {
                let raw = block_at(&family.rules()[b.source_rule], b.witness);
                Shape {
                    sites: b.sites,
                    raw_min: *raw.iter().min().expect("blocks are nonempty"),
                }
            })
            .collect();
        shapes.sort_by(|a, b| (a.sites.len(), &a.sites).cmp(&(b.sites.len(), &b.sites)));
        Ok(CoverSetup {
            dirs,
            reference,
            bridge,
            bridge_reach,
            shapes,
        })
    }

    pub fn directions(&self) -> &[Direction] {
        &self.dirs
    }

    pub fn reference(&self) -> &Droplet {
        &self.reference
    }

    /// Each merge adds at most one bridging copy of `D̂` plus the other droplet,
    /// so a single droplet from `k` blocks has diameter at most
    /// `k·(diam(D̂) + slack)` with slack `diam(D̂)`.
    pub fn merge_slack_sq(&self) -> SqLen {
        self.reference.diam_sq()
    }

    /// A maximal collection of disjoint translated blocks inside `k`, each
    /// paired with the translate of `D̂` that contains it.
    pub fn select_blocks(&self, k: &[Site], order: CoverOrder) -> Vec<(Vec<Site>, Site)> {
        let kset: HashSet<Site> = k.iter().copied().collect();
        let mut anchors: Vec<Site> = kset.iter().copied().collect();
        anchors.sort();
        let mut cands: Vec<(usize, Site, usize)> = Vec::new();
        for (si, shape) in self.shapes.iter().enumerate() {
            for &a in &anchors {
                if shape.sites.iter().all(|&(x, y)| kset.contains(&(x + a.0, y + a.1))) {
                    cands.push((shape.sites.len(), a, si));
                }
            }
        }
        match order {
            CoverOrder::Greedy => cands.sort(),
            CoverOrder::Shuffled(seed) => cands.shuffle(&mut ChaCha8Rng::seed_from_u64(seed)),
        }
        let placed = |si: usize, a: Site| -> Vec<Site> {
            self.shapes[si].sites.iter().map(|&(x, y)| (x + a.0, y + a.1)).collect()
        };
        let mut used: HashSet<Site> = HashSet::new();
        let mut out = Vec::new();
        for &(_, a, si) in &cands {
            let sites = placed(si, a);
            if sites.iter().all(|s| !used.contains(s)) {
                used.extend(sites.iter().copied());
                let raw = self.shapes[si].raw_min;
                out.push((sites, (a.0 - raw.0, a.1 - raw.1)));
            }
        }
        for &(_, a, si) in &cands {
            assert!(
                placed(si, a).iter().any(|s| used.contains(s)),
                "block selection is not maximal"
            );
        }
        out
    }

    pub fn cover(&self, k: &[Site], order: CoverOrder) -> CoverReport {
        let selected = self.select_blocks(k, order);
        let initial: Vec<Droplet> = selected.iter().map(|(_, x)| self.reference.translated(*x)).collect();
        let merge_seed = match order {
            CoverOrder::Greedy => None,
            CoverOrder::Shuffled(seed) => Some(seed ^ 0x9e37_79b9_7f4a_7c15),
        };
        let (droplets, merge_trace) = self.merge_all(initial, merge_seed);
        CoverReport {
            blocks: selected.into_iter().map(|(s, _)| s).collect(),
            droplets,
            merge_trace,
        }
    }

    /// Some translate of `D̂` meets both site sets.
    fn bridged(&self, a: &Entry, b: &Entry) -> bool {
        let r = self.bridge_reach;
        if a.lo.0 > b.hi.0 + r || b.lo.0 > a.hi.0 + r || a.lo.1 > b.hi.1 + r || b.lo.1 > a.hi.1 + r {
            return false;
        }
        let (small, large) = if a.sites.len() <= b.sites.len() { (a, b) } else { (b, a) };
        small.sites.iter().any(|&p| {
            p.0 >= large.lo.0 - r
                && p.0 <= large.hi.0 + r
                && p.1 >= large.lo.1 - r
                && p.1 <= large.hi.1 + r
                && self.bridge.iter().any(|d| large.set.contains(&(p.0 + d.0, p.1 + d.1)))
        })
    }

    /// Merges until no pair is bridged. The result is sorted; the trace
    /// records every merge with exact squared diameters.
    pub fn merge_all(&self, initial: Vec<Droplet>, seed: Option<u64>) -> (Vec<Droplet>, Vec<MergeStep>) {
        let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
        let mut entries: Vec<Option<Entry>> = initial.into_iter().map(|d| Some(Entry::new(d))).collect();
        let mut queue: VecDeque<usize> = (0..entries.len()).collect();
        if let Some(rng) = rng.as_mut() {
            queue.make_contiguous().shuffle(rng);
        }
        let mut trace = Vec::new();
        while let Some(i) = queue.pop_front() {
            let Some(me) = entries[i].as_ref() else {
                continue;
            };
            let mut others: Vec<usize> = (0..entries.len()).filter(|&j| j != i && entries[j].is_some()).collect();
            if let Some(rng) = rng.as_mut() {
                others.shuffle(rng);
            }
            let partner = others
                .into_iter()
                .find(|&j| self.bridged(me, entries[j].as_ref().expect("live")));
            let Some(j) = partner else { continue };
            let a = entries[i].take().expect("live");
            let b = entries[j].take().expect("live");
            let mut union = a.droplet.sites();
            union.extend(b.droplet.sites());
            let merged = minimal_droplet(&union, &self.dirs).expect("spanning directions");
            let entry = Entry::new(merged);
            trace.push(MergeStep {
                left: i.min(j),
                right: i.max(j),
                merged: entries.len(),
                left_diam_sq: if i < j { a.diam_sq } else { b.diam_sq },
                right_diam_sq: if i < j { b.diam_sq } else { a.diam_sq },
                merged_diam_sq: entry.diam_sq,
            });
            queue.push_back(entries.len());
            entries.push(Some(entry));
        }
        let mut out: Vec<Droplet> = entries.into_iter().flatten().map(|e| e.droplet).collect();
        out.sort_by_key(|d| d.constraints().iter().map(|c| c.offset).collect::<Vec<_>>());
        (out, trace)
    }

    /// `D` is the single output of the greedy cover run on `D ∩ A`.
    pub fn is_covered(&self, d: &Droplet, a: &[Site], order: CoverOrder) -> bool {
        let inside: Vec<Site> = a.iter().copied().filter(|&p| d.contains(p)).collect();
        let report = self.cover(&inside, order);
        report.droplets.len() == 1 && report.droplets[0].sites() == d.sites()
    }
}

#[derive(Clone, Debug)]
struct Entry {
    droplet: Droplet,
    sites: Vec<Site>,
    set: HashSet<Site>,
    lo: Site,
    hi: Site,
    diam_sq: SqLen,
}

impl Entry {
    fn new(droplet: Droplet) -> Entry {
        let sites = droplet.sites();
        let lo = (
            sites.iter().map(|p| p.0).min().unwrap_or(0),
            sites.iter().map(|p| p.1).min().unwrap_or(0),
        );
        let hi = (
            sites.iter().map(|p| p.0).max().unwrap_or(-1),
            sites.iter().map(|p| p.1).max().unwrap_or(-1),
        );
        let diam_sq = droplet.diam_sq();
        let set = sites.iter().copied().collect();
        Entry {
            droplet,
            sites,
            set,
            lo,
            hi,
            diam_sq,
        }
    }
}

/// Minimal droplet around every rule offset, pushed out by one line per side.
pub fn reference_droplet(family: &UpdateFamily, dirs: &[Direction]) -> Result<Droplet, DropletError> {
    Ok(minimal_droplet(&family.all_offsets(), dirs)?.inflated(1))
}

/// Some integer translate of `reference` meets both droplets.
pub fn merge_test(d1: &Droplet, d2: &Droplet, reference: &Droplet) -> bool {
    let hs = reference.sites();
    let s2: HashSet<Site> = d2.sites().into_iter().collect();
    d1.sites().iter().any(|&p| {
        hs.iter().any(|&h| {
            // Translate placing reference site h on p, then look for a site of d2.
            let x = (p.0 - h.0, p.1 - h.1);
            hs.iter().any(|&g| s2.contains(&(g.0 + x.0, g.1 + x.1)))
        })
    })
}

pub fn cover(k: &[Site], family: &UpdateFamily, order: CoverOrder) -> Result<CoverReport, DropletError> {
    Ok(CoverSetup::new(family)?.cover(k, order))
}
