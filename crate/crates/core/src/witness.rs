//! Extremal witness words: for an ordering in the strict-cylinder set, build
//! scale pairs and words whose measure ratio realizes the upper (or lower)
//! bound exponent up to a uniform constant.

use crate::dimension::{s_lower, s_upper};
use crate::model::SpongeSystem;
use crate::projection::{Perm, ProjectionStructure};
use crate::rational::{ln_rat_f64, rat_exp, Rat};
use crate::weights::{WeightScalar, WeightSystem};
use crate::words::{stopping_vector, WordSpec};

#[derive(Debug, Clone, thiserror::Error)]
pub enum WitnessError {
    #[error("no strictly ordered letter up to iterate {max_iterate}")]
    NoStrictLetter { max_iterate: usize },
    #[error("admissible scale range is empty; decrease the outer scale")]
    RangeEmpty,
    #[error("stopping times failed the interleaving check")]
    InterleavingFailed,
}

/// Which bound the witness is built to realize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessSide {
    Upper,
    Lower,
}

/// One verified triple: both stopping vectors interleave as required.
#[derive(Debug, Clone)]
pub struct WitnessTriple {
    pub big_r: Rat,
    pub small_r: Rat,
    pub word: WordSpec,
    /// stopping times of `big_r` by ordering position
    pub stops_big: Vec<usize>,
    /// stopping times of `small_r` by ordering position
    pub stops_small: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct ExtremalWitness {
    pub sigma: Perm,
    /// the strictly ordered letter, as a word of the iterate length
    pub strict_word: Vec<usize>,
    pub side: WitnessSide,
    pub triples: Vec<WitnessTriple>,
}

/// Log-ratio exponent table: `theta(a, b, v) = ln lambda_v^(a) / ln lambda_v^(b)`.
fn theta(sys: &SpongeSystem, a: usize, b: usize, v: usize) -> f64 {
    ln_rat_f64(sys.ratio(v, a)) / ln_rat_f64(sys.ratio(v, b))
}

fn theta_word(sys: &SpongeSystem, a: usize, b: usize, word: &[usize]) -> f64 {
    let num: f64 = word.iter().map(|&v| ln_rat_f64(sys.ratio(v, a))).sum();
    let den: f64 = word.iter().map(|&v| ln_rat_f64(sys.ratio(v, b))).sum();
    num / den
}

/// Find a word (iterate length <= `max_iterate`) whose side products are
/// strictly sorted along `sigma`, preferring the largest worst-pair margin
/// `min_n (1 - theta_n)`: barely-strict letters force the scale descent of
/// the witness construction absurdly deep. Deterministic (first maximizer in
/// enumeration order).
pub fn find_strict_letter(
    sys: &SpongeSystem,
    sigma: &Perm,
    max_iterate: usize,
) -> Result<Vec<usize>, WitnessError> {
    let n = sys.map_count();
    let d = sys.dimension();
    let mut best: Option<(f64, Vec<usize>)> = None;
    for len in 1..=max_iterate {
        let mut word = vec![0usize; len];
        loop {
            let prods: Vec<Rat> = (0..d)
                .map(|c| {
                    let mut acc: Rat = num_traits::One::one();
                    for &v in &word {
                        acc *= sys.ratio(v, c);
                    }
                    acc
                })
                .collect();
            let strict =
                (0..d.saturating_sub(1)).all(|k| prods[sigma.coord(k)] > prods[sigma.coord(k + 1)]);
            if strict {
                let margin = (0..d.saturating_sub(1))
                    .map(|k| {
                        1.0 - ln_rat_f64(&prods[sigma.coord(k)])
                            / ln_rat_f64(&prods[sigma.coord(k + 1)])
                    })
                    .fold(f64::INFINITY, f64::min);
                if best.as_ref().map_or(true, |(m, _)| margin > *m) {
                    best = Some((margin, word.clone()));
                }
            }
            let mut pos = len;
            let mut done = true;
            while pos > 0 {
                pos -= 1;
                word[pos] += 1;
                if word[pos] < n {
                    done = false;
                    break;
                }
                word[pos] = 0;
            }
            if done {
                break;
            }
        }
    }
    match best {
        Some((_, word)) => Ok(word),
        None => Err(WitnessError::NoStrictLetter { max_iterate }),
    }
}

/// Worst-pair margin of the strict letter found for an ordering, when any.
pub fn strict_letter_margin(sys: &SpongeSystem, sigma: &Perm, max_iterate: usize) -> Option<f64> {
    let word = find_strict_letter(sys, sigma, max_iterate).ok()?;
    let d = sys.dimension();
    let prods: Vec<f64> = (0..d)
        .map(|c| word.iter().map(|&v| ln_rat_f64(sys.ratio(v, c))).sum())
        .collect();
    Some(
        (0..d.saturating_sub(1))
            .map(|k| 1.0 - prods[sigma.coord(k)] / prods[sigma.coord(k + 1)])
            .fold(f64::INFINITY, f64::min),
    )
}

/// Admissible inner-scale range for an outer scale (given as a natural log):
/// returns `(ln_lo, ln_hi)` of the open interval, or `None` when it is empty
/// (outer scale too large).
fn admissible_ln_range(
    sys: &SpongeSystem,
    sigma: &Perm,
    strict_word: &[usize],
    ln_r: f64,
) -> Option<(f64, f64)> {
    let d = sys.dimension();
    let ln_min = ln_rat_f64(&sys.lambda_min());
    let hi = ln_min + ln_r;
    if d == 1 {
        return Some((hi + ln_min, hi));
    }
    let mut lo = f64::NEG_INFINITY;
    for n in 2..=d {
        let a = sigma.coord(n - 2); // the (n-1)-st coordinate of the ordering
        let b = sigma.coord(n - 1); // the n-th
        let theta_j = theta_word(sys, a, b, strict_word);
        debug_assert!(theta_j < 1.0, "strict letter gives theta < 1");
        for v in 0..sys.map_count() {
            let s: f64 = (n..=d).map(|l| theta(sys, a, sigma.coord(l - 1), v)).sum();
            let x = (1.0 - theta_j) / s;
            let y = theta_j / s;
            let cand = (1.0 + x) * ln_r - (1.0 + y) * ln_min;
            if cand > lo {
                lo = cand;
            }
        }
    }
    if lo < hi {
        Some((lo, hi))
    } else {
        None
    }
}

/// Build a verified witness triple for one outer scale. The word carries the
/// per-level extremal maps on the block between the two stopping times of
/// each level and the strict letter everywhere else; the stopping vectors of
/// the result are re-derived and must interleave.
pub fn witness_triple<T: WeightScalar>(
    sys: &SpongeSystem,
    proj: &ProjectionStructure,
    weights: &WeightSystem<T>,
    strict_word: &[usize],
    big_r: &Rat,
    side: WitnessSide,
) -> Result<WitnessTriple, WitnessError> {
    let d = sys.dimension();
    let sigma = proj.sigma();
    let profile = match side {
        WitnessSide::Upper => s_upper(sys, proj, weights),
        WitnessSide::Lower => s_lower(sys, proj, weights),
    };
    let fills: Vec<usize> = profile.terms.iter().map(|t| t.map).collect();

    let ln_outer = ln_rat_f64(big_r);
    let (lo, hi) =
        admissible_ln_range(sys, sigma, strict_word, ln_outer).ok_or(WitnessError::RangeEmpty)?;
    // prefer a power of two inside the window: for dyadic systems this keeps
    // every stopping product on one lattice and the ratio estimates sharp
    let ln2 = std::f64::consts::LN_2;
    let b = (-(lo + hi) / 2.0 / ln2).round();
    let candidate = -b * ln2;
    let ln_small = if candidate > lo && candidate < hi {
        candidate
    } else {
        (lo + hi) / 2.0
    };
    let small_r = rat_exp(ln_small).ok_or(WitnessError::RangeEmpty)?;
    if !(small_r > Rat::from_integer(0.into()) && small_r < *big_r) {
        return Err(WitnessError::RangeEmpty);
    }

    // Build left to right, innermost level outwards: strict letters until the
    // level's outer stopping triggers, then the level's extremal map until
    // its inner stopping triggers.
    let mut letters: Vec<usize> = Vec::new();
    let one: Rat = num_traits::One::one();
    let mut prods = vec![one; d];
    let mut j_cursor = 0usize;
    let append = |letters: &mut Vec<usize>, prods: &mut Vec<Rat>, letter: usize| {
        letters.push(letter);
        for c in 0..d {
            prods[c] *= sys.ratio(letter, c);
        }
    };
    let mut stops_big = vec![0usize; d];
    let mut stops_small = vec![0usize; d];
    for k in (0..d).rev() {
        let c = sigma.coord(k);
        while prods[c] > *big_r {
            append(&mut letters, &mut prods, strict_word[j_cursor % strict_word.len()]);
            j_cursor += 1;
        }
        stops_big[k] = letters.len();
        while prods[c] > small_r {
            append(&mut letters, &mut prods, fills[k]);
        }
        stops_small[k] = letters.len();
    }
    let word = WordSpec::new(letters, strict_word.to_vec());

    let raw_big = stopping_vector(sys, &word, big_r);
    let raw_small = stopping_vector(sys, &word, &small_r);
    let by_pos = |raw: &[usize]| -> Vec<usize> { (0..d).map(|k| raw[sigma.coord(k)]).collect() };
    let big = by_pos(&raw_big);
    let small = by_pos(&raw_small);
    if big != stops_big || small != stops_small {
        return Err(WitnessError::InterleavingFailed);
    }
    for k in 0..d {
        if small[k] <= big[k] {
            return Err(WitnessError::InterleavingFailed);
        }
        if k + 1 < d && big[k] <= small[k + 1] {
            return Err(WitnessError::InterleavingFailed);
        }
    }
    Ok(WitnessTriple {
        big_r: big_r.clone(),
        small_r,
        word,
        stops_big: big,
        stops_small: small,
    })
}

/// Build the witness for a sequence of outer scales. Scales whose admissible
/// range is empty are halved until the range opens; every emitted triple is
/// verified.
pub fn extremal_witness<T: WeightScalar>(
    sys: &SpongeSystem,
    proj: &ProjectionStructure,
    weights: &WeightSystem<T>,
    side: WitnessSide,
    outer_scales: &[Rat],
    max_iterate: usize,
) -> Result<ExtremalWitness, WitnessError> {
    let sigma = proj.sigma().clone();
    let strict_word = find_strict_letter(sys, &sigma, max_iterate)?;
    let mut triples = Vec::new();
    for big_r in outer_scales {
        let mut r = big_r.clone();
        let mut attempts = 0;
        loop {
            match witness_triple(sys, proj, weights, &strict_word, &r, side) {
                Ok(t) => {
                    triples.push(t);
                    break;
                }
                Err(WitnessError::NoStrictLetter { .. }) => unreachable!(),
                Err(e) if attempts < 64 => {
                    let _ = e;
                    r /= Rat::from_integer(2.into());
                    attempts += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(ExtremalWitness { sigma, strict_word, side, triples })
}

#[cfg(test)]
mod tests {
    use super::*;
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
    fn strict_letter_found_at_first_iterate() {
        let sys = bm_2x4();
        let j = find_strict_letter(&sys, &Perm::identity(2), 3).unwrap();
        assert_eq!(j, vec![0]);
    }

    #[test]
    fn strict_letter_requires_second_iterate_on_tied_maps() {
        // each map ties one coordinate pair; mixed two-letter words are strict
        let sys = SpongeSystem::validate(&RawSponge {
            dimension: 3,
            maps: vec![
                AffineMapSpec::new(
                    vec![rat(1, 2), rat(1, 2), rat(1, 4)],
                    vec![rat(0, 1), rat(0, 1), rat(0, 1)],
                ),
                AffineMapSpec::new(
                    vec![rat(1, 3), rat(1, 5), rat(1, 5)],
                    vec![rat(1, 2), rat(1, 2), rat(1, 2)],
                ),
            ],
            weights: None,
        })
        .unwrap();
        let sigma = Perm::identity(3);
        let j = find_strict_letter(&sys, &sigma, 3).unwrap();
        assert_eq!(j.len(), 2);
        let p = |c: usize| j.iter().map(|&v| sys.ratio(v, c).clone()).product::<Rat>();
        assert!(p(0) > p(1) && p(1) > p(2));
    }

    #[test]
    fn witness_triples_interleave() {
        let sys = bm_2x4();
        let proj = ProjectionStructure::build(&sys, Perm::identity(2));
        let w = WeightSystem::build(&sys, &proj, &uniform_weights(3));
        let scales: Vec<Rat> = (4..8).map(|k| rat(1, 1i64 << k)).collect();
        let wit = extremal_witness(&sys, &proj, &w, WitnessSide::Upper, &scales, 3).unwrap();
        assert_eq!(wit.triples.len(), 4);
        for t in &wit.triples {
            for k in 0..2 {
                assert!(t.stops_small[k] > t.stops_big[k]);
            }
            assert!(t.stops_big[0] > t.stops_small[1]);
        }
    }
}
