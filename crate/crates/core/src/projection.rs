//! Coordinate permutations and the principal-projection index structure.

use crate::model::SpongeSystem;
use std::fmt;

/// A permutation of the coordinates `0..d`. Position 0 carries the slowest
/// (longest-side) coordinate of an ordering.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn new(coords: Vec<usize>) -> Option<Perm> {
        let d = coords.len();
        let mut seen = vec![false; d];
        for &c in &coords {
            if c >= d || seen[c] {
                return None;
            }
            seen[c] = true;
        }
        Some(Perm(coords))
    }

    pub fn identity(d: usize) -> Perm {
        Perm((0..d).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Coordinate occupying position `k` (0-based; position 0 is first).
    pub fn coord(&self, k: usize) -> usize {
        self.0[k]
    }

    pub fn coords(&self) -> &[usize] {
        &self.0
    }

    /// Position of coordinate `c` within the ordering.
    pub fn position(&self, c: usize) -> usize {
        self.0.iter().position(|&x| x == c).expect("coordinate in range")
    }

    /// All permutations of `0..d` in lexicographic order.
    pub fn all(d: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut cur = (0..d).collect::<Vec<_>>();
        loop {
            out.push(Perm(cur.clone()));
            // next lexicographic permutation
            let mut i = d.saturating_sub(1);
            while i > 0 && cur[i - 1] >= cur[i] {
                i -= 1;
            }
            if i == 0 {
                return out;
            }
            let mut j = d - 1;
            while cur[j] <= cur[i - 1] {
                j -= 1;
            }
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
    }

    /// 1-based display form, e.g. `(1,2,4,3)`.
    pub fn display(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(|c| (c + 1).to_string()).collect();
        format!("({})", parts.join(","))
    }

    /// Parse a 1-based form like `1,2` or `(1,2)`.
    pub fn parse(s: &str) -> Option<Perm> {
        let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
        let coords: Option<Vec<usize>> = trimmed
            .split(',')
            .map(|p| p.trim().parse::<usize>().ok().and_then(|v| v.checked_sub(1)))
            .collect();
        Perm::new(coords?)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display())
    }
}

/// Exact overlap of maps `i` and `j` on the span of the first `n` coordinates
/// of `sigma`: ratio and translation data agree there exactly.
pub fn exact_overlap(sys: &SpongeSystem, i: usize, j: usize, sigma: &Perm, n: usize) -> bool {
    debug_assert!(n >= 1 && n <= sys.dimension());
    (0..n).all(|k| {
        let c = sigma.coord(k);
        sys.ratio(i, c) == sys.ratio(j, c) && sys.translation(i, c) == sys.translation(j, c)
    })
}

/// Length of the longest sigma-prefix on which `i` and `j` overlap exactly
/// (0 when they do not overlap on any principal subspace).
pub fn overlap_depth(sys: &SpongeSystem, i: usize, j: usize, sigma: &Perm) -> usize {
    let d = sys.dimension();
    let mut n = 0;
    while n < d {
        let c = sigma.coord(n);
        if sys.ratio(i, c) == sys.ratio(j, c) && sys.translation(i, c) == sys.translation(j, c) {
            n += 1;
        } else {
            break;
        }
    }
    n
}

/// Nested index sets `I_d ⊇ … ⊇ I_1` and the projection maps onto them for a
/// fixed ordering.
#[derive(Debug, Clone)]
pub struct ProjectionStructure {
    sigma: Perm,
    /// `index_chain[n-1]` is `I_n`, sorted ascending.
    index_chain: Vec<Vec<usize>>,
    /// `project[n-1][j]` is the representative of `j` in `I_n`.
    project: Vec<Vec<usize>>,
}

impl ProjectionStructure {
    /// The pair-scan procedure: for each pair `i < j` in lexicographic order,
    /// remove `j` from every level at and below the deepest exact overlap, so
    /// the surviving representative is always the smallest index.
    pub fn build(sys: &SpongeSystem, sigma: Perm) -> ProjectionStructure {
        let d = sys.dimension();
        let count = sys.map_count();
        let mut alive = vec![vec![true; count]; d];
        for i in 0..count {
            for j in (i + 1)..count {
                let depth = overlap_depth(sys, i, j, &sigma);
                // depth == d would mean duplicate maps, excluded by validation
                for level in 0..depth {
                    alive[level][j] = false;
                }
            }
        }
        let mut index_chain = Vec::with_capacity(d);
        let mut project = Vec::with_capacity(d);
        for n in 1..=d {
            let members: Vec<usize> = (0..count).filter(|&j| alive[n - 1][j]).collect();
            let mut proj = vec![usize::MAX; count];
            for j in 0..count {
                let rep = members
                    .iter()
                    .copied()
                    .find(|&i| exact_overlap(sys, i, j, &sigma, n))
                    .expect("every map has a representative");
                proj[j] = rep;
            }
            index_chain.push(members);
            project.push(proj);
        }
        ProjectionStructure { sigma, index_chain, project }
    }

    pub fn sigma(&self) -> &Perm {
        &self.sigma
    }

    pub fn dimension(&self) -> usize {
        self.index_chain.len()
    }

    /// `I_n` for `n` in `1..=d`, sorted ascending.
    pub fn index_set(&self, n: usize) -> &[usize] {
        &self.index_chain[n - 1]
    }

    /// Representative of map `j` at level `n` (`1..=d`).
    pub fn project(&self, n: usize, j: usize) -> usize {
        self.project[n - 1][j]
    }

    /// Maps of `I_{n+1}` sitting above `i ∈ I_n`; for `n = 0` the whole `I_1`.
    pub fn fibre(&self, n: usize, i: usize) -> Vec<usize> {
        if n == 0 {
            self.index_chain[0].clone()
        } else {
            self.index_chain[n]
                .iter()
                .copied()
                .filter(|&j| self.project[n - 1][j] == i)
                .collect()
        }
    }
}
