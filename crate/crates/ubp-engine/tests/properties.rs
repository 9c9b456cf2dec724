use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ubp_engine::*;
use ubp_geometry::{Direction, Site, UpdateFamily};

fn random_family(rng: &mut impl Rng, reach: i64) -> UpdateFamily {
    let nrules = rng.gen_range(1..=5);
    let rules = (0..nrules)
        .map(|_| {
            let size = rng.gen_range(1..=4);
            let mut r: Vec<Site> = Vec::new();
            while r.len() < size {
                let s = (rng.gen_range(-reach..=reach), rng.gen_range(-reach..=reach));
                if s != (0, 0) && !r.contains(&s) {
                    r.push(s);
                }
            }
            r
        })
        .collect();
    UpdateFamily::new(rules).unwrap()
}

fn random_fill(lat: &mut Lattice, rng: &mut impl Rng, p: f64) {
    for row in 0..lat.height() {
        for col in 0..lat.width() {
            if rng.gen_bool(p) {
                lat.set_cell(col, row, true);
            }
        }
    }
}

#[test]
fn kernel_matches_reference_on_torus_64() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for case in 0..500 {
        let fam = random_family(&mut rng, 3);
        let cf = CompiledFamily::new(&fam);
        let mut lat = Lattice::torus(64);
        let p = rng.gen_range(0.05..0.9);
        random_fill(&mut lat, &mut rng, p);
        assert_eq!(
            step(&lat, &cf),
            reference_step(&lat, &fam),
            "case {case}: {:?}",
            fam.rules()
        );
    }
}

#[test]
fn kernel_matches_reference_on_odd_shapes() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for case in 0..300 {
        let reach = rng.gen_range(1..=4);
        let fam = random_family(&mut rng, reach);
        let cf = CompiledFamily::new(&fam);
        let (w, h) = (rng.gen_range(1..150), rng.gen_range(1..40));
        let mut lat = match case % 3 {
            0 => Lattice::torus(rng.gen_range(1..140)),
            1 => Lattice::rect(w, h, Boundary::HardEmpty),
            _ => {
                let u = loop {
                    if let Some(d) = Direction::new(rng.gen_range(-4..=4), rng.gen_range(-4..=4)) {
                        break d;
                    }
                };
                let origin = (rng.gen_range(-5..w as i64 + 5), rng.gen_range(-5..h as i64 + 5));
                Lattice::rect_with_origin(w, h, Boundary::VirtualHalfPlane(u), origin)
            }
        };
        let p = rng.gen_range(0.0..0.8);
        random_fill(&mut lat, &mut rng, p);
        let mut a = lat.clone();
        let mut b = lat.clone();
        let mut stepper = Stepper::new(&cf);
        for _ in 0..3 {
            stepper.step(&mut a);
            b = reference_step(&b, &fam);
            assert_eq!(a, b, "case {case} mode {:?}", lat.mode());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closure_is_monotone(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = random_family(&mut rng, 2);
        let cf = CompiledFamily::new(&fam);
        let mut a = Lattice::torus(40);
        random_fill(&mut a, &mut rng, 0.1);
        let mut b = a.clone();
        random_fill(&mut b, &mut rng, 0.05);
        let ca = run_to_fixpoint(&a, &cf, 10_000).lattice;
        let cb = run_to_fixpoint(&b, &cf, 10_000).lattice;
        prop_assert!(ca.is_subset(&cb));
    }

    #[test]
    fn torus_step_commutes_with_shift(seed in any::<u64>(), dx in -50i64..50, dy in -50i64..50) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = random_family(&mut rng, 3);
        let cf = CompiledFamily::new(&fam);
        let mut lat = Lattice::torus(37);
        random_fill(&mut lat, &mut rng, 0.3);
        prop_assert_eq!(step(&lat.shifted(dx, dy), &cf), step(&lat, &cf).shifted(dx, dy));
    }

    #[test]
    fn fixpoints_are_stable(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = random_family(&mut rng, 2);
        let cf = CompiledFamily::new(&fam);
        let mut lat = Lattice::torus(30);
        random_fill(&mut lat, &mut rng, 0.15);
        let run = run_to_fixpoint(&lat, &cf, 100_000);
        prop_assert!(run.reached_fixpoint);
        prop_assert_eq!(step(&run.lattice, &cf), run.lattice.clone());
    }

    #[test]
    fn tau_precedes_full_infection(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = random_family(&mut rng, 2);
        let cf = CompiledFamily::new(&fam);
        let mut lat = Lattice::torus(24);
        random_fill(&mut lat, &mut rng, 0.2);
        let (full, steps) = percolates_within(&lat, &cf, percolation_budget(24));
        if full {
            let t = tau(&lat, &cf, percolation_budget(24));
            prop_assert!(t.is_some_and(|t| t <= steps));
        }
    }

    #[test]
    fn sparse_agrees_with_dense_inside_margin(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = random_family(&mut rng, 2);
        let r = fam.range();
        let seed_sites: Vec<Site> = (0..rng.gen_range(1..25))
            .map(|_| (rng.gen_range(-6..=6), rng.gen_range(-6..=6)))
            .collect();
        let sparse = sparse_closure(seed_sites.iter().copied(), &fam, 400);
        if !sparse.exceeded_cap {
            let reach = sparse.infected.iter().map(|p| p.0.abs().max(p.1.abs())).max().unwrap();
            let half = (reach + 2 * r + 1) as usize;
            let lat = Lattice::rect(2 * half + 1, 2 * half + 1, Boundary::HardEmpty).from_sites(seed_sites);
            let dense = run_to_fixpoint(&lat, &CompiledFamily::new(&fam), 100_000).lattice;
            let mut a: Vec<Site> = sparse.infected.into_iter().collect();
            let mut b = dense.sites();
            a.sort();
            b.sort();
            prop_assert_eq!(a, b);
        }
    }
}
