//! Symbolic approximate cubes on the shift space and their exact Bernoulli
//! measures, with a brute-force enumeration oracle.

use crate::model::SpongeSystem;
use crate::orderings::cube_ordering;
use crate::projection::{exact_overlap, Perm, ProjectionStructure};
use crate::rational::Rat;
use crate::weights::WeightSystem;
use crate::words::{stopping_vector, WordSpec};
use num_traits::One;
use std::collections::BTreeMap;

#[derive(Debug, Clone, thiserror::Error)]
pub enum CubeError {
    #[error("enumeration cap exceeded: {words} words of length {len}")]
    CapExceeded { words: u128, len: usize },
}

/// A symbolic r-approximate cube: the set of words agreeing with the base
/// word on each level's projection up to that level's stopping time.
#[derive(Debug, Clone)]
pub struct ApproximateCube {
    pub word: WordSpec,
    pub scale: Rat,
    pub sigma: Perm,
    /// `stops[k]` is the stopping time of the coordinate at position `k`;
    /// non-increasing in `k` by construction of the ordering.
    pub stops: Vec<usize>,
    /// `blocks[n-1]` holds the level-n projected symbols at positions
    /// `(stops[n], stops[n-1]]` (positions 1-based, level d innermost).
    pub blocks: Vec<Vec<usize>>,
}

impl ApproximateCube {
    /// Total symbolic length, i.e. the deepest stopping time.
    pub fn len(&self) -> usize {
        self.stops[0]
    }
}

/// Build the cube containing a word at a scale: ordering, stopping vector and
/// the block representation.
pub fn approximate_cube(
    sys: &SpongeSystem,
    projections: &BTreeMap<Perm, ProjectionStructure>,
    w: &WordSpec,
    r: &Rat,
) -> ApproximateCube {
    let d = sys.dimension();
    let sigma = cube_ordering(sys, w, r);
    let raw = stopping_vector(sys, w, r);
    let stops: Vec<usize> = (0..d).map(|k| raw[sigma.coord(k)]).collect();
    let proj = &projections[&sigma];
    let mut blocks = Vec::with_capacity(d);
    for n in 1..=d {
        // positions (stops[n], stops[n-1]] in 1-based terms
        let from = if n == d { 0 } else { stops[n] };
        let to = stops[n - 1];
        let block: Vec<usize> = (from..to).map(|pos| proj.project(n, w.letter(pos))).collect();
        blocks.push(block);
    }
    debug_assert_eq!(blocks.iter().map(|b| b.len()).sum::<usize>(), stops[0]);
    ApproximateCube {
        word: w.clone(),
        scale: r.clone(),
        sigma,
        stops,
        blocks,
    }
}

/// Exact measure of a cube under projected weights. Both product forms (the
/// block form over projected weights and the full form over conditional
/// weights) are evaluated and must agree exactly.
pub fn cube_measure(
    sys: &SpongeSystem,
    projections: &BTreeMap<Perm, ProjectionStructure>,
    weights: &BTreeMap<Perm, WeightSystem<Rat>>,
    cube: &ApproximateCube,
) -> Rat {
    let d = sys.dimension();
    let proj = &projections[&cube.sigma];
    let w = &weights[&cube.sigma];

    let mut by_blocks = Rat::one();
    for n in 1..=d {
        for &sym in &cube.blocks[n - 1] {
            by_blocks *= w.level_weight(proj, n, sym);
        }
    }
    let mut by_conditionals = Rat::one();
    for n in 1..=d {
        for pos in 0..cube.stops[n - 1] {
            let sym = proj.project(n, cube.word.letter(pos));
            by_conditionals *= w.conditional(proj, n, sym);
        }
    }
    assert_eq!(by_blocks, by_conditionals, "measure product forms disagree");
    by_blocks
}

/// Caps for the enumeration oracle.
#[derive(Debug, Clone, Copy)]
pub struct BruteForceCaps {
    pub max_len: usize,
    pub max_words: u128,
}

impl Default for BruteForceCaps {
    fn default() -> Self {
        BruteForceCaps { max_len: 14, max_words: 1 << 22 }
    }
}

/// Independent oracle: enumerate every word of the cube's symbolic length
/// whose projections agree with the base word within each stopping time, and
/// sum the plain Bernoulli products. Uses only the raw overlap predicate,
/// not the projected-weight machinery.
pub fn brute_force_cube_measure(
    sys: &SpongeSystem,
    p: &[Rat],
    w: &WordSpec,
    r: &Rat,
    caps: BruteForceCaps,
) -> Result<Rat, CubeError> {
    let d = sys.dimension();
    let count = sys.map_count();
    let sigma = cube_ordering(sys, w, r);
    let raw = stopping_vector(sys, w, r);
    let stops: Vec<usize> = (0..d).map(|k| raw[sigma.coord(k)]).collect();
    let len = stops[0];
    if len > caps.max_len {
        return Err(CubeError::CapExceeded { words: 0, len });
    }
    // Candidates per position: letters overlapping the base letter exactly on
    // every principal subspace whose stopping time reaches the position.
    let mut candidates: Vec<Vec<usize>> = Vec::with_capacity(len);
    let mut total: u128 = 1;
    for pos in 0..len {
        let base = w.letter(pos);
        let cand: Vec<usize> = (0..count)
            .filter(|&j| {
                (1..=d).all(|n| {
                    if stops[n - 1] > pos {
                        exact_overlap(sys, j, base, &sigma, n)
                    } else {
                        true
                    }
                })
            })
            .collect();
        total = total.saturating_mul(cand.len() as u128);
        if total > caps.max_words {
            return Err(CubeError::CapExceeded { words: total, len });
        }
        candidates.push(cand);
    }
    let mut sum = Rat::from_integer(0.into());
    let mut stack: Vec<Rat> = vec![Rat::one()];
    enumerate(&candidates, p, 0, &mut stack, &mut sum);
    Ok(sum)
}

fn enumerate(candidates: &[Vec<usize>], p: &[Rat], pos: usize, stack: &mut Vec<Rat>, sum: &mut Rat) {
    if pos == candidates.len() {
        *sum += stack.last().unwrap();
        return;
    }
    for &j in &candidates[pos] {
        let next = stack.last().unwrap() * &p[j];
        stack.push(next);
        enumerate(candidates, p, pos + 1, stack, sum);
        stack.pop();
    }
}

/// Per-ordering weight systems for exact rational weights.
pub fn weight_table(
    sys: &SpongeSystem,
    projections: &BTreeMap<Perm, ProjectionStructure>,
    p: &[Rat],
) -> BTreeMap<Perm, WeightSystem<Rat>> {
    projections
        .iter()
        .map(|(s, proj)| (s.clone(), WeightSystem::build(sys, proj, p)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimension::all_projections;
    use crate::model::{AffineMapSpec, RawSponge};
    use crate::rational::rat;
    use crate::weights::uniform_weights;

    fn bm_2x4() -> SpongeSystem {
        let m = |tx: Rat, ty: Rat| AffineMapSpec::new(vec![rat(1, 2), rat(1, 4)], vec![tx, ty]);
        SpongeSystem::validate(&RawSponge {
            dimension: 2,
            maps: vec![
                m(rat(0, 1), rat(0, 1)),
                m(rat(0, 1), rat(1, 2)),
                m(rat(1, 2), rat(0, 1)),
            ],
            weights: None,
        })
        .unwrap()
    }

    #[test]
    fn block_representation_of_grid_cube() {
        let sys = bm_2x4();
        let projections = all_projections(&sys);
        let cube = approximate_cube(&sys, &projections, &WordSpec::constant(0), &rat(1, 4));
        assert_eq!(cube.sigma, Perm::identity(2));
        assert_eq!(cube.stops, vec![2, 1]);
        assert_eq!(cube.blocks, vec![vec![0], vec![0]]);
    }

    #[test]
    fn cube_measure_equals_enumeration() {
        let sys = bm_2x4();
        let projections = all_projections(&sys);
        let p = uniform_weights(3);
        let weights = weight_table(&sys, &projections, &p);
        let w = WordSpec::constant(0);
        let cube = approximate_cube(&sys, &projections, &w, &rat(1, 4));
        let m = cube_measure(&sys, &projections, &weights, &cube);
        assert_eq!(m, rat(2, 9));
        let bf = brute_force_cube_measure(&sys, &p, &w, &rat(1, 4), BruteForceCaps::default()).unwrap();
        assert_eq!(bf, m);
    }

    #[test]
    fn single_map_cube_has_full_measure() {
        let sys = SpongeSystem::validate(&RawSponge {
            dimension: 2,
            maps: vec![AffineMapSpec::new(vec![rat(1, 2), rat(1, 3)], vec![rat(0, 1), rat(0, 1)])],
            weights: None,
        })
        .unwrap();
        let p = uniform_weights(1);
        let bf = brute_force_cube_measure(&sys, &p, &WordSpec::constant(0), &rat(1, 7), BruteForceCaps::default())
            .unwrap();
        assert_eq!(bf, rat(1, 1));
    }

    #[test]
    fn cap_is_enforced() {
        let sys = bm_2x4();
        let p = uniform_weights(3);
        let caps = BruteForceCaps { max_len: 3, max_words: 1 << 22 };
        let err = brute_force_cube_measure(&sys, &p, &WordSpec::constant(0), &rat(1, 1024), caps);
        assert!(matches!(err, Err(CubeError::CapExceeded { .. })));
    }

    #[test]
    fn measure_nonincreasing_in_scale() {
        let sys = bm_2x4();
        let projections = all_projections(&sys);
        let p = uniform_weights(3);
        let weights = weight_table(&sys, &projections, &p);
        let w = WordSpec::new(vec![2, 0, 1], vec![0, 2]);
        let mut r = rat(1, 2);
        let mut last = rat(2, 1);
        for _ in 0..8 {
            let cube = approximate_cube(&sys, &projections, &w, &r);
            let m = cube_measure(&sys, &projections, &weights, &cube);
            assert!(m <= last);
            last = m;
            r /= rat(2, 1);
        }
    }
}
