mod common;

use std::f64::consts::{FRAC_PI_3, TAU};

use bast::geom::{angular_span, basic_cone, can_cover, classify_region, ConeKind, Direction, Point, Region};
use common::{claim_behind_x, claim_behind_y, claim_sides_opposite, depth, run_claim, sample_in};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MARGIN: f64 = 1e-6;

fn coord() -> impl Strategy<Value = f64> {
    -100.0..100.0f64
}

fn point() -> impl Strategy<Value = Point> {
    (coord(), coord()).prop_map(|(x, y)| Point::new(x, y))
}

fn segment() -> impl Strategy<Value = (Point, Point)> {
    (point(), point()).prop_filter("distinct", |(u, v)| u.dist(v) > 1e-3)
}

proptest! {
    #![proptest_config(common::proptest_config(1000))]

    #[test]
    fn relabel_swaps_regions((u, v) in segment(), q in point()) {
        prop_assume!(q != u && q != v);
        let a = classify_region(u, v, q).unwrap();
        let b = classify_region(v, u, q).unwrap();
        prop_assert_eq!(b, a.swapped());
    }

    #[test]
    fn classifier_agrees_with_depth((u, v) in segment(), q in point()) {
        prop_assume!(q != u && q != v);
        let r = classify_region(u, v, q).unwrap();
        for other in [Region::R1, Region::R2, Region::R3, Region::R4] {
            if depth(u, v, other, q) >= MARGIN {
                prop_assert_eq!(r, other);
            }
        }
    }

    #[test]
    fn basic_cones_contain_their_regions(seed in any::<u64>(), (u, v) in segment()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (kind, region) in [(ConeKind::Center, Region::R3), (ConeKind::Up, Region::R2), (ConeKind::Down, Region::R4)] {
            let cone = basic_cone(u, v, kind).unwrap();
            prop_assert!(cone.contains(v).unwrap());
            for _ in 0..20 {
                let q = sample_in(&mut rng, u, v, region, MARGIN);
                prop_assert!(cone.contains(q).unwrap(), "{:?} misses {:?}", kind, q);
            }
        }
    }

    #[test]
    fn coverage_is_complement_of_back_wedge((a, partner) in segment(), q in point()) {
        prop_assume!(q != a);
        let inside_back = depth(a, partner, Region::R1, q);
        let covered = can_cover(a, partner, q).unwrap();
        if inside_back >= MARGIN {
            prop_assert!(!covered);
        } else if inside_back <= -MARGIN {
            prop_assert!(covered);
        }
        let any_cone = [ConeKind::Center, ConeKind::Up, ConeKind::Down]
            .iter()
            .any(|&k| basic_cone(a, partner, k).unwrap().contains(q).unwrap());
        if inside_back.abs() >= MARGIN {
            prop_assert_eq!(covered, any_cone);
        }
    }

    #[test]
    fn span_is_permutation_invariant(mut dirs in prop::collection::vec(0.0..TAU, 1..12), shift in -10.0..10.0f64, seed in any::<u64>()) {
        let base = angular_span(&dirs.iter().map(|&t| Direction::new(t)).collect::<Vec<_>>()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        use rand::seq::SliceRandom;
        dirs.shuffle(&mut rng);
        let shuffled = angular_span(&dirs.iter().map(|&t| Direction::new(t)).collect::<Vec<_>>()).unwrap();
        let rotated = angular_span(&dirs.iter().map(|&t| Direction::new(t + shift)).collect::<Vec<_>>()).unwrap();
        prop_assert!((base - shuffled).abs() <= 1e-12);
        prop_assert!((base - rotated).abs() <= 1e-9);
        prop_assert!((base - common::span(&dirs)).abs() <= 1e-9);
    }

    #[test]
    fn region_claims(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, e) = run_claim(&mut rng, 20, 2000, MARGIN, claim_sides_opposite);
        prop_assert!(e.is_none(), "{:?}", e);
        let (_, e) = run_claim(&mut rng, 20, 2000, MARGIN, claim_behind_x);
        prop_assert!(e.is_none(), "{:?}", e);
        let (_, e) = run_claim(&mut rng, 20, 2000, MARGIN, claim_behind_y);
        prop_assert!(e.is_none(), "{:?}", e);
    }
}

#[test]
fn up_cone_is_unique() {
    // nudging the bisector lets some point of the region escape
    let (u, v) = (Point::new(0.0, 0.0), Point::new(1.0, 0.0));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let samples: Vec<Point> = (0..10_000)
        .map(|_| sample_in(&mut rng, u, v, Region::R2, 0.0))
        .collect();
    let up = basic_cone(u, v, ConeKind::Up).unwrap();
    assert!(samples.iter().all(|&q| up.contains(q).unwrap()));
    assert!((up.bisector.radians() - FRAC_PI_3).abs() < 1e-12);
    for delta in [1e-3, -1e-3] {
        let nudged = up.rotated(delta);
        let escaped = samples.iter().any(|&q| !nudged.contains(q).unwrap()) || !nudged.contains(v).unwrap();
        assert!(escaped, "delta {delta}");
    }
}

#[test]
fn down_cone_is_unique() {
    let (u, v) = (Point::new(0.0, 0.0), Point::new(1.0, 0.0));
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let samples: Vec<Point> = (0..10_000)
        .map(|_| sample_in(&mut rng, u, v, Region::R4, 0.0))
        .collect();
    let down = basic_cone(u, v, ConeKind::Down).unwrap();
    assert!(samples.iter().all(|&q| down.contains(q).unwrap()));
    assert!((down.bisector.radians() - (TAU - FRAC_PI_3)).abs() < 1e-12);
    for delta in [1e-3, -1e-3] {
        let nudged = down.rotated(delta);
        let escaped = samples.iter().any(|&q| !nudged.contains(q).unwrap()) || !nudged.contains(v).unwrap();
        assert!(escaped, "delta {delta}");
    }
}

#[test]
fn relabel_symmetry_bulk() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100_000 {
        let (u, v) = common::random_segment(&mut rng);
        let q = common::random_point(&mut rng, 10.0);
        let a = classify_region(u, v, q).unwrap();
        let b = classify_region(v, u, q).unwrap();
        assert_eq!(a == Region::R1, b == Region::R3);
        assert_eq!(b, a.swapped());
    }
}
