use crate::kernel::{CompiledFamily, Stepper};
use crate::lattice::{Lattice, Mode};

#[derive(Clone, Debug)]
pub struct FixpointRun {
    pub lattice: Lattice,
    /// Generations that infected at least one site.
    pub steps_taken: u64,
    pub reached_fixpoint: bool,
}

/// Steps until a generation changes nothing or `max_steps` generations have run.
/// The returned lattice's generation counts only the productive steps.
pub fn run_to_fixpoint(lat: &Lattice, family: &CompiledFamily, max_steps: u64) -> FixpointRun {
    let mut cur = lat.clone();
    let start = cur.generation();
    let mut stepper = Stepper::new(family);
    let mut steps_taken = 0;
    let mut reached_fixpoint = false;
    for _ in 0..max_steps {
        if !stepper.step(&mut cur) {
            reached_fixpoint = true;
            break;
        }
        steps_taken += 1;
    }
    cur.set_generation(start + steps_taken);
    FixpointRun {
        lattice: cur,
        steps_taken,
        reached_fixpoint,
    }
}

/// Default percolation budget `2n²`: every non-final generation infects a new site.
pub fn percolation_budget(n: usize) -> u64 {
    2 * (n as u64) * (n as u64)
}

/// Whether the torus closure is the full torus.
pub fn percolates(lat: &Lattice, family: &CompiledFamily) -> bool {
    let n = match lat.mode() {
        Mode::Torus(n) => n,
        Mode::Rect { .. } => panic!("percolation is defined on the torus"),
    };
    percolates_within(lat, family, percolation_budget(n)).0
}

/// Percolation with an explicit budget; also returns the number of productive steps.
pub fn percolates_within(lat: &Lattice, family: &CompiledFamily, max_steps: u64) -> (bool, u64) {
    let mut cur = lat.clone();
    let mut stepper = Stepper::new(family);
    let mut steps = 0;
    while !cur.is_full() && steps < max_steps {
        if !stepper.step(&mut cur) {
            break;
        }
        steps += 1;
    }
    (cur.is_full(), steps)
}

/// First generation at which the origin is infected; `None` if a fixpoint or the budget comes first.
pub fn tau(lat: &Lattice, family: &CompiledFamily, max_steps: u64) -> Option<u64> {
    let (c, r) = lat.cell_of((0, 0)).expect("origin must lie on the lattice");
    if lat.get_cell(c, r) {
        return Some(0);
    }
    let mut cur = lat.clone();
    let mut stepper = Stepper::new(family);
    for t in 1..=max_steps {
        let changed = stepper.step(&mut cur);
        if cur.get_cell(c, r) {
            return Some(t);
        }
        if !changed {
            return None;
        }
    }
    None
}
