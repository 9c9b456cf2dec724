//! Per-site evaluator used as the differential oracle for the word kernel.

use ubp_geometry::UpdateFamily;

use crate::lattice::Lattice;

/// One synchronous generation, checking every rule at every site through [`Lattice::get`].
pub fn reference_step(lat: &Lattice, family: &UpdateFamily) -> Lattice {
    let mut out = lat.clone();
    for row in 0..lat.height() {
        for col in 0..lat.width() {
            if lat.get_cell(col, row) {
                continue;
            }
            let p = lat.point_of(col, row);
            let fires = family
                .rules()
                .iter()
                .any(|rule| rule.iter().all(|&(dx, dy)| lat.get((p.0 + dx, p.1 + dy))));
            if fires {
                out.set_cell(col, row, true);
            }
        }
    }
    out.set_generation(lat.generation() + 1);
    out
}

/// Iterates [`reference_step`] until nothing changes or the budget runs out.
pub fn reference_closure(lat: &Lattice, family: &UpdateFamily, max_steps: u64) -> Lattice {
    let mut cur = lat.clone();
    for _ in 0..max_steps {
        let next = reference_step(&cur, family);
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}
