//! Shared fixtures for the integration suites.

use spongedim::model::{AffineMapSpec, RawSponge, SpongeSystem};
use spongedim::rational::{rat, Rat};

pub fn carpet(maps: Vec<(Vec<Rat>, Vec<Rat>)>) -> SpongeSystem {
    let dimension = maps[0].0.len();
    let raw = RawSponge {
        dimension,
        maps: maps
            .into_iter()
            .map(|(r, t)| AffineMapSpec::new(r, t))
            .collect(),
        weights: None,
    };
    SpongeSystem::validate(&raw).expect("fixture is valid")
}

/// Three-map grid carpet on a 2x4 division: two maps share the left column.
pub fn bm_2x4() -> SpongeSystem {
    carpet(vec![
        (vec![rat(1, 2), rat(1, 4)], vec![rat(0, 1), rat(0, 1)]),
        (vec![rat(1, 2), rat(1, 4)], vec![rat(0, 1), rat(1, 2)]),
        (vec![rat(1, 2), rat(1, 4)], vec![rat(1, 2), rat(0, 1)]),
    ])
}

/// Shrunken variant with strict gaps (very strong separation, gap 1/10).
pub fn shrunk_carpet() -> SpongeSystem {
    carpet(vec![
        (vec![rat(9, 20), rat(1, 5)], vec![rat(0, 1), rat(0, 1)]),
        (vec![rat(9, 20), rat(1, 5)], vec![rat(0, 1), rat(1, 2)]),
        (vec![rat(9, 20), rat(1, 5)], vec![rat(11, 20), rat(0, 1)]),
    ])
}

/// Two-map genuinely non-dominated carpet without axis overlaps.
pub fn cross_carpet() -> SpongeSystem {
    carpet(vec![
        (vec![rat(1, 2), rat(1, 5)], vec![rat(0, 1), rat(0, 1)]),
        (vec![rat(1, 5), rat(1, 2)], vec![rat(3, 5), rat(1, 2)]),
    ])
}

/// The four-dimensional two-map system whose maps are (2,1,3,4)- and
/// (1,2,4,3)-ordered.
pub fn four_dim_two_map() -> SpongeSystem {
    carpet(vec![
        (
            vec![rat(1, 5), rat(2, 5), rat(2, 25), rat(1, 50)],
            vec![rat(0, 1), rat(0, 1), rat(0, 1), rat(0, 1)],
        ),
        (
            vec![rat(3, 5), rat(3, 10), rat(1, 10), rat(1, 5)],
            vec![rat(2, 5), rat(3, 5), rat(1, 2), rat(1, 2)],
        ),
    ])
}

/// One-parameter three-map family: two stacked rows of width `a1` on the
/// right, one taller block of width `1 - a1` on the left (the degenerate
/// limit of the family with the touching columns).
pub fn three_map_family(a1: Rat) -> SpongeSystem {
    let left = Rat::from_integer(1.into()) - &a1;
    carpet(vec![
        (vec![a1.clone(), rat(1, 4)], vec![left.clone(), rat(0, 1)]),
        (vec![left.clone(), rat(1, 2)], vec![rat(0, 1), rat(1, 4)]),
        (vec![a1.clone(), rat(1, 4)], vec![left, rat(3, 4)]),
    ])
}

/// Spec-file text for the shrunken carpet, with uniform weights.
pub const SHRUNK_SPEC: &str = r#"{
    "dimension": 2,
    "maps": [
        { "ratios": ["9/20", "1/5"], "translation": ["0", "0"] },
        { "ratios": ["9/20", "1/5"], "translation": ["0", "1/2"] },
        { "ratios": ["9/20", "1/5"], "translation": ["11/20", "0"] }
    ],
    "weights": ["1/3", "1/3", "1/3"]
}"#;

pub const FOUR_DIM_SPEC: &str = r#"{
    "dimension": 4,
    "maps": [
        { "ratios": ["1/5", "2/5", "2/25", "1/50"], "translation": ["0", "0", "0", "0"] },
        { "ratios": ["3/5", "3/10", "1/10", "1/5"], "translation": ["2/5", "3/5", "1/2", "1/2"] }
    ]
}"#;
