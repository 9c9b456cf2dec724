//! Closure of a finite seed on the unbounded lattice.

use std::collections::{HashSet, VecDeque};

use ubp_geometry::{Site, UpdateFamily};

#[derive(Clone, Debug)]
pub struct SparseClosure {
    pub infected: HashSet<Site>,
    /// Set when the infected set grew past the cap; `infected` is then partial.
    pub exceeded_cap: bool,
}

/// Frontier-driven closure: every newly infected site queues all sites within
/// Chebyshev distance `range` for re-examination.
pub fn sparse_closure<I: IntoIterator<Item = Site>>(seed: I, family: &UpdateFamily, cap: usize) -> SparseClosure {
    let mut infected: HashSet<Site> = seed.into_iter().collect();
    let r = family.range();
    let mut queued: HashSet<Site> = HashSet::new();
    let mut frontier: VecDeque<Site> = VecDeque::new();
    let enqueue_around =
        |p: Site, queued: &mut HashSet<Site>, frontier: &mut VecDeque<Site>, infected: &HashSet<Site>| {
            for dx in -r..=r {
                for dy in -r..=r {
                    let q = (p.0 + dx, p.1 + dy);
                    if !infected.contains(&q) && queued.insert(q) {
                        frontier.push_back(q);
                    }
                }
            }
        };
    let mut seeds: Vec<Site> = infected.iter().copied().collect();
    seeds.sort();
    for p in seeds {
        enqueue_around(p, &mut queued, &mut frontier, &infected);
    }
    if infected.len() > cap {
        return SparseClosure {
            infected,
            exceeded_cap: true,
        };
    }
    while let Some(q) = frontier.pop_front() {
        queued.remove(&q);
        if infected.contains(&q) {
            continue;
        }
        let fires = family
            .rules()
            .iter()
            .any(|rule| rule.iter().all(|&(dx, dy)| infected.contains(&(q.0 + dx, q.1 + dy))));
        if fires {
            infected.insert(q);
            if infected.len() > cap {
                return SparseClosure {
                    infected,
                    exceeded_cap: true,
                };
            }
            enqueue_around(q, &mut queued, &mut frontier, &infected);
        }
    }
    SparseClosure {
        infected,
        exceeded_cap: false,
    }
}
