//! Eventually periodic words over the map alphabet, stopping times and the
//! natural projection to the attractor.

use crate::model::SpongeSystem;
use crate::rational::Rat;
use num_traits::{One, Zero};
use std::fmt;

/// Finite encoding `prefix . cycle^inf` of an infinite word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordSpec {
    prefix: Vec<usize>,
    cycle: Vec<usize>,
}

impl WordSpec {
    pub fn new(prefix: Vec<usize>, cycle: Vec<usize>) -> WordSpec {
        assert!(!cycle.is_empty(), "cycle must be nonempty");
        WordSpec { prefix, cycle }
    }

    pub fn constant(letter: usize) -> WordSpec {
        WordSpec { prefix: Vec::new(), cycle: vec![letter] }
    }

    pub fn cycle_of(word: Vec<usize>) -> WordSpec {
        WordSpec::new(Vec::new(), word)
    }

    pub fn prefix(&self) -> &[usize] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[usize] {
        &self.cycle
    }

    /// Letter at 0-based position `pos`.
    pub fn letter(&self, pos: usize) -> usize {
        if pos < self.prefix.len() {
            self.prefix[pos]
        } else {
            self.cycle[(pos - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// The first `len` letters, unrolled.
    pub fn unroll(&self, len: usize) -> Vec<usize> {
        (0..len).map(|p| self.letter(p)).collect()
    }
}

impl fmt::Display for WordSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |w: &[usize]| {
            w.iter()
                .map(|c| (c + 1).to_string())
                .collect::<Vec<_>>()
                .join("")
        };
        if self.prefix.is_empty() {
            write!(f, "({})^inf", show(&self.cycle))
        } else {
            write!(f, "{}({})^inf", show(&self.prefix), show(&self.cycle))
        }
    }
}

/// Exact product of the first `len` contraction ratios in one coordinate.
pub fn coordinate_product(sys: &SpongeSystem, w: &WordSpec, coord: usize, len: usize) -> Rat {
    let mut prod = Rat::one();
    for pos in 0..len {
        prod *= sys.ratio(w.letter(pos), coord);
    }
    prod
}

/// The r-stopping in a coordinate: the unique length `L` with
/// `prod_{l<=L} lambda <= r < prod_{l<=L-1} lambda`, decided in exact
/// rational arithmetic.
pub fn stopping_time(sys: &SpongeSystem, w: &WordSpec, r: &Rat, coord: usize) -> usize {
    debug_assert!(r > &Rat::zero() && r < &Rat::one());
    let mut prod = Rat::one();
    let mut len = 0;
    loop {
        prod *= sys.ratio(w.letter(len), coord);
        len += 1;
        if prod <= *r {
            return len;
        }
    }
}

/// Stopping times for all `d` coordinates in one pass over the word.
pub fn stopping_vector(sys: &SpongeSystem, w: &WordSpec, r: &Rat) -> Vec<usize> {
    let d = sys.dimension();
    let mut prods = vec![Rat::one(); d];
    let mut out = vec![0usize; d];
    let mut remaining = d;
    let mut pos = 0;
    while remaining > 0 {
        let letter = w.letter(pos);
        pos += 1;
        for c in 0..d {
            if out[c] == 0 {
                prods[c] *= sys.ratio(letter, c);
                if prods[c] <= *r {
                    out[c] = pos;
                    remaining -= 1;
                }
            }
        }
    }
    out
}

/// Finite-depth image of the origin under the composed maps, together with
/// the per-coordinate contraction products bounding the distance to the
/// limit point of the word.
pub fn evaluate_projection_point(
    sys: &SpongeSystem,
    w: &WordSpec,
    depth: usize,
) -> (Vec<Rat>, Vec<Rat>) {
    assert!(depth >= 1);
    let d = sys.dimension();
    let mut point = vec![Rat::zero(); d];
    let mut err = vec![Rat::one(); d];
    for pos in (0..depth).rev() {
        let i = w.letter(pos);
        for c in 0..d {
            point[c] = sys.ratio(i, c) * &point[c] + sys.translation(i, c);
        }
    }
    for pos in 0..depth {
        let i = w.letter(pos);
        for c in 0..d {
            err[c] *= sys.ratio(i, c);
        }
    }
    (point, err)
}
