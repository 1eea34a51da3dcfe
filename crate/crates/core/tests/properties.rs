//! Property suites: structural invariants on randomized instances, plus a
//! few proptest generators for the scalar layer.

mod common;

use common::*;
use proptest::prelude::*;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use spongedim::cubes::{approximate_cube, weight_table};
use spongedim::dimension::{all_projections, bound_table, similarity_dimension};
use spongedim::model::{AffineMapSpec, RawSponge, SpongeSystem};
use spongedim::orderings::{
    certified_strict_chain, compute_ordering_sets, cube_ordering, cylinder_membership,
    lyapunov_profile, scan_feasibility, search_cube_witnesses, OrderingCertificate, SearchConfig,
};
use spongedim::projection::{exact_overlap, overlap_depth, Perm};
use spongedim::rational::{format_rational, parse_rational, rat, rat_to_f64, Rat};
use spongedim::separation::check_separation;
use spongedim::synth::{grid_sponge, nondegenerate_sponge, random_weights, SynthConfig};
use spongedim::weights::uniform_weights;
use spongedim::words::{evaluate_projection_point, stopping_time, WordSpec};
use std::collections::BTreeSet;

proptest! {
    #[test]
    fn rational_strings_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
        let r = rat(n, d);
        let s = format_rational(&r);
        prop_assert_eq!(parse_rational(&s).unwrap(), r);
    }

    #[test]
    fn stopping_times_grow_as_scales_shrink(seed in 0u64..500, num in 1i64..64) {
        let sys = bm_2x4();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let letters: Vec<usize> = (0..12).map(|_| rng.random_range(0..3)).collect();
        let w = WordSpec::cycle_of(letters);
        let r = rat(num, 128);
        let r2 = &r / rat(3, 2);
        for coord in 0..2 {
            let l1 = stopping_time(&sys, &w, &r, coord);
            let l2 = stopping_time(&sys, &w, &r2, coord);
            prop_assert!(l2 >= l1);
        }
    }

    #[test]
    fn similarity_dimension_monotone_in_ratios(a in 5u32..90, b in 5u32..90, bump in 1u32..8) {
        // growing one contraction ratio grows the root, as does adding a piece
        let a1 = a as f64 / 100.0;
        let b1 = b as f64 / 100.0;
        prop_assume!(a1 + b1 < 0.98);
        let s = similarity_dimension(&[a1, b1]).unwrap();
        let bumped = (a1 + bump as f64 / 100.0).min(0.97 - b1);
        prop_assume!(bumped > a1);
        let s2 = similarity_dimension(&[bumped, b1]).unwrap();
        prop_assert!(s2 >= s);
        if a1 + b1 + 0.01 < 0.98 {
            let s3 = similarity_dimension(&[a1, b1, 0.01]).unwrap();
            prop_assert!(s3 >= s);
        }
    }
}

#[test]
fn projection_idempotence_and_overlap_monotonicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for case in 0..50 {
        let cfg = SynthConfig::new(2 + case % 2, 2 + case % 3);
        let sys = grid_sponge(&cfg, &mut rng);
        let d = sys.dimension();
        for sigma in Perm::all(d) {
            let proj = spongedim::projection::ProjectionStructure::build(&sys, sigma.clone());
            for n in 1..=d {
                for m in n..=d {
                    for j in 0..sys.map_count() {
                        assert_eq!(
                            proj.project(n, proj.project(m, j)),
                            proj.project(n, j),
                            "idempotence fails at case {case}"
                        );
                    }
                }
            }
            for i in 0..sys.map_count() {
                for j in 0..sys.map_count() {
                    let depth = overlap_depth(&sys, i, j, &sigma);
                    for n in 1..=d {
                        assert_eq!(exact_overlap(&sys, i, j, &sigma, n), n <= depth);
                    }
                }
            }
        }
    }
}

#[test]
fn domination_orders_stopping_times_and_lyapunov_exponents() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut dominated_seen = 0usize;
    for case in 0..60 {
        let cfg = SynthConfig {
            dominated_pair: Some((0, 1)),
            allow_overlaps: false,
            ..SynthConfig::new(2 + case % 2, 2 + case % 3)
        };
        let sys = grid_sponge(&cfg, &mut rng);
        assert!(sys.dominates(0, 1));
        dominated_seen += 1;
        for _ in 0..10 {
            let letters: Vec<usize> =
                (0..10).map(|_| rng.random_range(0..sys.map_count())).collect();
            let w = WordSpec::cycle_of(letters);
            let r = rat(rng.random_range(1..200), 4096);
            assert!(stopping_time(&sys, &w, &r, 1) <= stopping_time(&sys, &w, &r, 0));
        }
        let p = vec![1.0 / sys.map_count() as f64; sys.map_count()];
        let prof = lyapunov_profile(&sys, &p);
        assert!(prof.chi.iter().all(|&x| x > 0.0));
        assert!(prof.chi[0] <= prof.chi[1]);
        let strict_witness = (0..sys.map_count()).any(|i| sys.ratio(i, 1) < sys.ratio(i, 0));
        if strict_witness {
            assert!(prof.chi[0] < prof.chi[1]);
        }
    }
    assert_eq!(dominated_seen, 60);
}

#[test]
fn separation_levels_are_monotone_on_random_systems() {
    // raw systems with arbitrary placements: the very strong form must imply
    // the open form on every instance
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut valid = 0usize;
    for _ in 0..1000 {
        let d = 2 + (rng.random_range(0..2) as usize);
        let n = 2 + (rng.random_range(0..3) as usize);
        let maps: Vec<AffineMapSpec> = (0..n)
            .map(|_| {
                let ratios: Vec<Rat> =
                    (0..d).map(|_| rat(rng.random_range(1..10), 20)).collect();
                let translation: Vec<Rat> = ratios
                    .iter()
                    .map(|lam| {
                        let head = Rat::from_integer(1.into()) - lam;
                        let num = rng.random_range(0..40);
                        head * rat(num, 40)
                    })
                    .collect();
                AffineMapSpec::new(ratios, translation)
            })
            .collect();
        let raw = RawSponge { dimension: d, maps, weights: None };
        let Ok(sys) = SpongeSystem::validate(&raw) else {
            continue;
        };
        valid += 1;
        let rep = check_separation(&sys, &Perm::all(d));
        if rep.very_strong {
            assert!(rep.sppc, "very strong without the open form");
            assert!(rep.delta0.is_some() || sys.map_count() == 1);
        }
        if !rep.sppc {
            assert!(!rep.very_strong);
        }
    }
    assert!(valid >= 500, "generator starved: {valid}");
}

#[test]
fn certificates_reverify_under_higher_precision() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for case in 0..40 {
        let cfg = SynthConfig {
            distinct_ratios_within_map: true,
            ..SynthConfig::new(2 + case % 2, 2 + case % 2)
        };
        let sys = nondegenerate_sponge(&cfg, &mut rng, 0.1);
        let sets = compute_ordering_sets(&sys, &SearchConfig::default()).unwrap();
        for (sigma, cert) in &sets.cylinder {
            assert_eq!(
                certified_strict_chain(&sys, &cert.p, sigma),
                Some(true),
                "certificate fails re-verification"
            );
        }
        for (sigma, cert) in &sets.cube_lower {
            if let OrderingCertificate::Cube { word, scale } = cert {
                assert_eq!(&cube_ordering(&sys, word, scale), sigma);
            }
        }
    }
}

#[test]
fn weak_chains_do_not_enlarge_the_cylinder_set() {
    // scanning with non-strict inequalities finds an ordering iff the strict
    // feasibility certificate exists
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    for case in 0..40 {
        let cfg = SynthConfig {
            distinct_ratios_within_map: true,
            ..SynthConfig::new(2 + case % 2, 2 + case % 2)
        };
        let sys = nondegenerate_sponge(&cfg, &mut rng, 0.1);
        for sigma in Perm::all(sys.dimension()) {
            let strict = cylinder_membership(&sys, &sigma).unwrap().is_some();
            let p = vec![1.0 / sys.map_count() as f64; sys.map_count()];
            let prof = lyapunov_profile(&sys, &p);
            let mut weak_found = (0..sigma.len() - 1)
                .all(|k| prof.chi[sigma.coord(k)] <= prof.chi[sigma.coord(k + 1)]);
            if !weak_found {
                weak_found = scan_feasibility(&sys, &sigma, 40).is_some();
            }
            if weak_found {
                assert!(strict, "weak witness without strict certificate for {}", sigma.display());
            }
        }
    }
}

#[test]
fn bounds_invariant_under_relabeling() {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    for case in 0..20 {
        let cfg = SynthConfig::new(2, 3);
        let sys = grid_sponge(&cfg, &mut rng);
        let p = random_weights(3, 24, &mut rng);
        let projections = all_projections(&sys);
        let sets = compute_ordering_sets(&sys, &SearchConfig::default()).unwrap();
        let bounds = bound_table(&sys, &projections, &sets, &p);

        // permute map labels together with the weights
        let order = [2usize, 0, 1];
        let raw = RawSponge {
            dimension: 2,
            maps: order
                .iter()
                .map(|&i| sys.maps()[i].clone())
                .collect(),
            weights: None,
        };
        let relabeled = SpongeSystem::validate(&raw).unwrap();
        let p2: Vec<Rat> = order.iter().map(|&i| p[i].clone()).collect();
        let projections2 = all_projections(&relabeled);
        let sets2 = compute_ordering_sets(&relabeled, &SearchConfig::default()).unwrap();
        let bounds2 = bound_table(&relabeled, &projections2, &sets2, &p2);
        assert!((bounds.assouad_lo - bounds2.assouad_lo).abs() < 1e-12, "case {case}");
        assert!((bounds.lower_hi - bounds2.lower_hi).abs() < 1e-12);

        // swap coordinate labels together with all inputs
        let raw = RawSponge {
            dimension: 2,
            maps: sys
                .maps()
                .iter()
                .map(|m| {
                    AffineMapSpec::new(
                        vec![m.ratios[1].clone(), m.ratios[0].clone()],
                        vec![m.translation[1].clone(), m.translation[0].clone()],
                    )
                })
                .collect(),
            weights: None,
        };
        let swapped = SpongeSystem::validate(&raw).unwrap();
        let projections3 = all_projections(&swapped);
        let sets3 = compute_ordering_sets(&swapped, &SearchConfig::default()).unwrap();
        let bounds3 = bound_table(&swapped, &projections3, &sets3, &p);
        assert!((bounds.assouad_lo - bounds3.assouad_lo).abs() < 1e-12);
        assert!((bounds.assouad_hi - bounds3.assouad_hi).abs() < 1e-12);
    }
}

#[test]
fn coordinate_ordering_condition_pins_the_sets() {
    // a single permutation sorting all maps forces singleton ordering sets
    let sys = shrunk_carpet();
    assert!(sys.coordinate_ordering_condition().is_some());
    let sets = compute_ordering_sets(&sys, &SearchConfig::default()).unwrap();
    assert_eq!(sets.cylinder_perms(), vec![Perm::new(vec![0, 1]).unwrap()]);
    assert_eq!(sets.cube_upper, vec![Perm::new(vec![0, 1]).unwrap()]);
    assert!(sets.exact);
}

#[test]
fn low_dimension_search_never_exceeds_the_cylinder_set() {
    // the cube-witness search, run despite the low-dimensional shortcut,
    // finds exactly the cylinder orderings
    let mut rng = ChaCha8Rng::seed_from_u64(81);
    let light = SearchConfig {
        max_prefix_len: 9,
        scale_grid_size: 8,
        raw_word_budget: 128,
        eval_budget: 60_000,
    };
    for case in 0..1000 {
        let cfg = SynthConfig {
            distinct_ratios_within_map: true,
            ..SynthConfig::new(2 + case % 2, 2 + case % 2)
        };
        let sys = nondegenerate_sponge(&cfg, &mut rng, 0.05);
        let cyl: BTreeSet<Perm> = Perm::all(sys.dimension())
            .into_iter()
            .filter(|s| matches!(cylinder_membership(&sys, s), Ok(Some(_))))
            .collect();
        let found: BTreeSet<Perm> = search_cube_witnesses(&sys, &light).into_keys().collect();
        assert!(
            found.is_subset(&cyl),
            "case {case}: search found {:?} beyond {:?}",
            found,
            cyl
        );
    }
}

#[test]
fn sandwich_bounds_hold_at_desk_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    for case in 0..25 {
        let cfg = SynthConfig::new(2 + case % 2, 2 + case % 3);
        let sys = grid_sponge(&cfg, &mut rng);
        let projections = all_projections(&sys);
        let sep = check_separation(&sys, &Perm::all(sys.dimension()));
        assert!(sep.very_strong);
        let Some(delta0) = sep.delta0.clone() else {
            continue;
        };
        for _ in 0..10 {
            let letters: Vec<usize> =
                (0..12).map(|_| rng.random_range(0..sys.map_count())).collect();
            let w = WordSpec::cycle_of(letters);
            let coord = rng.random_range(0..sys.dimension());
            let len = rng.random_range(1..5);
            let r = spongedim::words::coordinate_product(&sys, &w, coord, len);
            let cube = approximate_cube(&sys, &projections, &w, &r);

            // diameter: any member of the cube stays within r per coordinate
            let depth = cube.len() + 30;
            let (p0, e0) = evaluate_projection_point(&sys, &w, depth);
            let mut other = w.unroll(cube.len());
            other.extend(std::iter::repeat(0).take(4));
            let w2 = WordSpec::new(other, vec![0]);
            let (p1, e1) = evaluate_projection_point(&sys, &w2, depth);
            for c in 0..sys.dimension() {
                let dist = if p0[c] >= p1[c] { &p0[c] - &p1[c] } else { &p1[c] - &p0[c] };
                assert!(dist <= &r + &e0[c] + &e1[c], "cube diameter exceeds the scale");
            }

            // separation: change one constrained position to a different
            // projected symbol and the points split by delta0 * r somewhere
            let proj = &projections[&cube.sigma];
            let level_sets = proj.index_set(1);
            if level_sets.len() < 2 {
                continue;
            }
            let base = proj.project(1, w.letter(0));
            let Some(&alt) = level_sets.iter().find(|&&i| i != base) else {
                continue;
            };
            let mut mutated = w.unroll(cube.len());
            mutated[0] = alt;
            let wm = WordSpec::new(mutated, vec![alt]);
            let (pm, em) = evaluate_projection_point(&sys, &wm, depth);
            let needed = &delta0 * &r;
            let mut separated = false;
            for c in 0..sys.dimension() {
                let dist = if p0[c] >= pm[c] { &p0[c] - &pm[c] } else { &pm[c] - &p0[c] };
                if dist > &needed + &e0[c] + &em[c] {
                    separated = true;
                    break;
                }
            }
            assert!(separated, "distinct cubes closer than delta0 * r");
        }
    }
}

#[test]
fn uniform_weights_sum_exactly() {
    let w = uniform_weights(7);
    let total: Rat = w.iter().cloned().sum();
    assert_eq!(total, rat(1, 1));
    assert!(rat_to_f64(&total) == 1.0);
}
