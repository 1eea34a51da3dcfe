//! Separation of principal projections: the SPPC and its very strong form,
//! plus the minimal projected gap used by the geometric sandwich.

use crate::model::SpongeSystem;
use crate::projection::Perm;
use crate::rational::Rat;
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationFailure {
    /// Coordinates of the principal subspace where the open projections meet.
    pub coords: Vec<usize>,
    pub first: usize,
    pub second: usize,
}

#[derive(Debug, Clone)]
pub struct SeparationReport {
    pub sppc: bool,
    pub very_strong: bool,
    /// Minimum positive coordinatewise distance between non-overlapping
    /// projected pieces; only meaningful under the very strong condition
    /// and absent when no pair is constrained.
    pub delta0: Option<Rat>,
    pub failures: Vec<SeparationFailure>,
}

/// Checks the separation condition over every principal subspace spanned by a
/// prefix of one of the given orderings. Projections either overlap exactly
/// or must have disjoint open (resp. closed) images; all interval arithmetic
/// is exact.
pub fn check_separation(sys: &SpongeSystem, orderings: &[Perm]) -> SeparationReport {
    let d = sys.dimension();
    let count = sys.map_count();
    // distinct coordinate sets arising as prefixes; order within a prefix is
    // irrelevant for box disjointness
    let mut prefix_sets: BTreeSet<Vec<usize>> = BTreeSet::new();
    for sigma in orderings {
        for n in 1..=d {
            let mut set: Vec<usize> = sigma.coords()[..n].to_vec();
            set.sort_unstable();
            prefix_sets.insert(set);
        }
    }

    let mut sppc = true;
    let mut very_strong = true;
    let mut delta0: Option<Rat> = None;
    let mut failures = Vec::new();

    for set in &prefix_sets {
        for i in 0..count {
            for j in (i + 1)..count {
                let overlap = set.iter().all(|&c| {
                    sys.ratio(i, c) == sys.ratio(j, c)
                        && sys.translation(i, c) == sys.translation(j, c)
                });
                if overlap {
                    continue;
                }
                // per-coordinate gaps between the projected closed boxes
                let mut max_gap: Option<Rat> = None;
                let mut open_disjoint = false;
                for &c in set {
                    let a1 = sys.translation(i, c).clone();
                    let b1 = &a1 + sys.ratio(i, c);
                    let a2 = sys.translation(j, c).clone();
                    let b2 = &a2 + sys.ratio(j, c);
                    if b1 <= a2 || b2 <= a1 {
                        open_disjoint = true;
                        let gap = if b1 <= a2 { &a2 - &b1 } else { &a1 - &b2 };
                        if max_gap.as_ref().map_or(true, |g| gap > *g) {
                            max_gap = Some(gap);
                        }
                    }
                }
                if !open_disjoint {
                    sppc = false;
                    very_strong = false;
                    failures.push(SeparationFailure {
                        coords: set.iter().map(|c| c + 1).collect(),
                        first: i + 1,
                        second: j + 1,
                    });
                    continue;
                }
                let gap = max_gap.expect("open-disjoint pair has a gap");
                if gap == Rat::from_integer(0.into()) {
                    // closed boxes touch: open form holds, very strong fails
                    very_strong = false;
                } else if delta0.as_ref().map_or(true, |d0| gap < *d0) {
                    delta0 = Some(gap);
                }
            }
        }
    }
    if !very_strong {
        delta0 = None;
    }
    SeparationReport { sppc, very_strong, delta0, failures }
}
