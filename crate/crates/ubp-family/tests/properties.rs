use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ubp_family::*;
use ubp_geometry::{classify, stable_set, Direction, Kind, Site, UpdateFamily};

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

fn sweep_directions() -> Vec<Direction> {
    let mut v: Vec<Direction> = (-2i64..=2)
        .flat_map(|x| (-2i64..=2).map(move |y| (x, y)))
        .filter_map(|(x, y)| Direction::new(x, y))
        .collect();
    v.extend([(3, 1), (-1, 3), (-3, -1), (1, -3)].map(|(x, y)| Direction::new(x, y).unwrap()));
    v
}

fn canonical() -> Vec<(&'static str, UpdateFamily)> {
    vec![
        ("twonbr", UpdateFamily::two_neighbour()),
        ("threenbr", UpdateFamily::three_neighbour()),
        ("onenbr", UpdateFamily::one_neighbour()),
        ("duarte", UpdateFamily::duarte()),
        ("east", UpdateFamily::east()),
    ]
}

#[test]
fn empty_seed_blocks_exactly_unstable_directions() {
    let dirs = sweep_directions();
    assert_eq!(dirs.len(), 20);
    for (name, fam) in canonical() {
        let stab = stable_set(&fam);
        for &u in &dirs {
            let v = is_u_block(&fam, u, 0, None, None).unwrap();
            assert_eq!(v.status == UBlockStatus::Block, !stab.contains(u), "{name} {u}");
        }
    }
}

#[test]
fn block_verdicts_carry_certificates() {
    for (_, fam) in canonical() {
        for u in sweep_directions().into_iter().take(8) {
            for len in 0..3 {
                let v = is_u_block(&fam, u, len, None, None).unwrap();
                let (left, right) = (v.left.is_some(), v.right.is_some());
                let expected = match v.status {
                    UBlockStatus::Block => (true, true),
                    UBlockStatus::LeftBlockOnly => (true, false),
                    UBlockStatus::RightBlockOnly => (false, true),
                    UBlockStatus::NotBlockWithinWindow => (false, false),
                };
                assert_eq!((left, right), expected);
                for c in v.left.iter().chain(v.right.iter()) {
                    assert!(c.period >= 1 && c.shift >= 1);
                }
            }
        }
    }
}

#[test]
fn alpha2_searches_are_monotone_in_seed_length() {
    for fam in [UpdateFamily::two_neighbour(), UpdateFamily::duarte()] {
        let c = classify(&fam).witness.unwrap();
        let a = alpha2(&fam, c, DEFAULT_L_MAX, None, None).unwrap();
        for &(u, least) in &a.per_direction {
            let least = least.expect("two-neighbour and Duarte blocks are short");
            for len in least..least + 6 {
                assert_eq!(
                    is_u_block(&fam, u, len, None, None).unwrap().status,
                    UBlockStatus::Block,
                    "{u} {len}"
                );
            }
        }
    }
}

#[test]
fn duarte_north_has_only_a_right_certificate() {
    let v = is_u_block(&UpdateFamily::duarte(), Direction::NORTH, 1, None, None).unwrap();
    assert_eq!(v.status, UBlockStatus::RightBlockOnly);
    // Wider seeds do not help on the stable-semicircle side.
    for len in 2..6 {
        let v = is_u_block(&UpdateFamily::duarte(), Direction::NORTH, len, None, None).unwrap();
        assert!(v.left.is_none() && v.right.is_some());
    }
}

#[test]
fn parse_error_codes_name_the_rule() {
    let cases: [(&str, &str, Option<usize>); 6] = [
        ("{", "malformed_json", None),
        (r#"{"rules":[]}"#, "no_rules", None),
        (r#"{"rules":[[[1,0]],[[0,0]]]}"#, "origin_in_rule", Some(1)),
        (r#"{"rules":[[[1,0]],[]]}"#, "empty_rule", Some(1)),
        (r#"{"rules":[[[1,0],[1,0]]]}"#, "duplicate_offset", Some(0)),
        (r#"{"rules":[[[1,0]],[[2000000000,0]]]}"#, "offset_overflow", Some(1)),
    ];
    for (text, code, rule) in cases {
        let e = parse_family(text.as_bytes()).unwrap_err();
        assert_eq!((e.code(), e.rule_index()), (code, rule), "{text}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn blocks_pass_the_sign_test(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = random_family(&mut rng, 3);
        let stab = stable_set(&fam);
        for b in enumerate_breakthrough_blocks(&fam) {
            prop_assert!(stab.contains(b.witness));
            prop_assert!(b.direction_arc.contains(b.witness));
            let rule = &fam.rules()[b.source_rule];
            let direct = normalize(&block_at(rule, b.witness));
            prop_assert!(!direct.is_empty());
            prop_assert_eq!(&direct, &b.sites);
        }
    }

    #[test]
    fn alpha1_is_reflection_invariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = random_family(&mut rng, 3);
        prop_assert_eq!(alpha1(&fam.reflected()), alpha1(&fam));
    }

    #[test]
    fn quasi_pairs_with_unstable_gaps_have_a_rule(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = random_family(&mut rng, 3);
        let stab = stable_set(&fam);
        let mut dirs: Vec<Direction> = stab.breakpoints().to_vec();
        dirs.extend(quasi_stable_set(&fam));
        dirs.sort();
        dirs.dedup();
        for i in 0..dirs.len() {
            let (u, v) = (dirs[i], dirs[(i + 1) % dirs.len()]);
            if u == v || !stab.contains(u) || !stab.contains(v) {
                continue;
            }
            let gap = ubp_geometry::ArcSet::from_arc(ubp_geometry::Arc::open(u, v));
            if gap.intersection(&stab).is_empty() {
                prop_assert!(pair_has_rule(&fam, u, v), "{:?} {} {}", fam.rules(), u, v);
            }
        }
    }

    #[test]
    fn searched_directions_lie_in_the_witness(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = random_family(&mut rng, 2);
        let class = classify(&fam);
        if class.kind == Kind::Critical {
            let c = class.witness.unwrap();
            let dirs = searched_directions(&fam, c);
            prop_assert!(dirs.iter().all(|&u| c.contains(u)));
            // Every stable direction in the witness is listed.
            for arc in stable_set(&fam).intersection(&ubp_geometry::ArcSet::from_arc(c)).arcs() {
                prop_assert!(arc.is_point() && dirs.contains(&arc.start));
            }
        }
    }

    #[test]
    fn stable_directions_never_block_with_empty_seed(seed in any::<u64>(), x in -3i64..=3, y in -3i64..=3) {
        prop_assume!(Direction::new(x, y).is_some());
        let u = Direction::new(x, y).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = random_family(&mut rng, 2);
        let blocked = is_u_block(&fam, u, 0, None, None).unwrap().status == UBlockStatus::Block;
        prop_assert_eq!(blocked, !stable_set(&fam).contains(u));
    }
}

/// Certified sides really fill: a much wider band run to its fixpoint
/// infects the line for a long way on each certified side.
fn check_certificate_in_wide_band(fam: &UpdateFamily, u: Direction, len: usize) -> Result<(), TestCaseError> {
    use ubp_engine::{run_to_fixpoint, Boundary, CompiledFamily, Lattice};
    let v = is_u_block(fam, u, len, None, None).unwrap();
    let frame = LineFrame::new(u);
    let banded = frame.transform(fam);
    let width = 8 * v.window_w;
    let rows = v.window_h * u.norm_sq() as usize + 1;
    let mut lat = Lattice::rect_with_origin(width, rows, Boundary::VirtualHalfPlane(Direction::NORTH), (0, 0));
    let c0 = (width - len) / 2;
    for c in c0..c0 + len {
        lat.set_cell(c, 0, true);
    }
    let closed = run_to_fixpoint(&lat, &CompiledFamily::new(&banded), 100 * width as u64).lattice;
    let reach = 2 * v.window_w;
    if v.left.is_some() {
        prop_assert!((c0..c0 + reach).all(|c| closed.get_cell(c, 0)), "left {u} {len}");
    }
    if v.right.is_some() {
        prop_assert!(
            (c0 + len - reach..c0 + len).all(|c| closed.get_cell(c, 0)),
            "right {u} {len}"
        );
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn certificates_are_sound(seed in any::<u64>(), x in -2i64..=2, y in -2i64..=2, len in 0usize..4) {
        prop_assume!(Direction::new(x, y).is_some());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = random_family(&mut rng, 2);
        check_certificate_in_wide_band(&fam, Direction::new(x, y).unwrap(), len)?;
    }
}

#[test]
fn canonical_certificates_are_sound() {
    for (_, fam) in canonical() {
        for u in sweep_directions() {
            for len in 0..3 {
                check_certificate_in_wide_band(&fam, u, len).unwrap();
            }
        }
    }
}
