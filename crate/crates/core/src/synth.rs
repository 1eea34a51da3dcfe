//! Seeded synthetic instance generation for the verification suites.
//!
//! Instances are grid-aligned: each axis carries a pool of pairwise disjoint
//! closed intervals with positive gaps, and every map picks one interval per
//! axis. Distinct intervals never touch, so projections of any two maps onto
//! any principal subspace either overlap exactly or are separated — the very
//! strong separation condition holds by construction.

use crate::lp::max_min_slack;
use crate::model::{AffineMapSpec, RawSponge, SpongeSystem};
use crate::projection::Perm;
use crate::rational::{ln_rat_f64, rat, Rat};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub dimension: usize,
    pub maps: usize,
    /// allow two maps to share an axis interval (creates exact overlaps)
    pub allow_overlaps: bool,
    /// force one coordinate to dominate another (0-based indices)
    pub dominated_pair: Option<(usize, usize)>,
    /// reject maps with a tied ratio pair inside one map
    pub distinct_ratios_within_map: bool,
    /// draw contraction ratios from powers of two (keeps stopping phases on
    /// a lattice, which the exponent sampler needs for tight estimates)
    pub dyadic_ratios: bool,
}

impl SynthConfig {
    pub fn new(dimension: usize, maps: usize) -> SynthConfig {
        SynthConfig {
            dimension,
            maps,
            allow_overlaps: true,
            dominated_pair: None,
            distinct_ratios_within_map: false,
            dyadic_ratios: false,
        }
    }
}

/// One random grid sponge. Retries internally until validation passes.
pub fn grid_sponge(cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> SpongeSystem {
    for _ in 0..10_000 {
        if let Some(sys) = try_grid_sponge(cfg, rng) {
            return sys;
        }
    }
    panic!("instance generation failed to produce a valid system");
}

fn try_grid_sponge(cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> Option<SpongeSystem> {
    let d = cfg.dimension;
    let n = cfg.maps;
    let slots = 2 * n as i64;
    let share_allowed = cfg.allow_overlaps && cfg.dominated_pair.is_none() && n >= 2;

    // per axis: interval pool and per-map assignment
    let mut ratios = vec![vec![Rat::from_integer(0.into()); d]; n];
    let mut translations = vec![vec![Rat::from_integer(0.into()); d]; n];
    for c in 0..d {
        let distinct = if share_allowed && rng.random_bool(0.4) { n - 1 } else { n };
        // widths and offsets with small denominators
        let pool: Vec<(Rat, Rat)> = (0..distinct)
            .map(|j| {
                let width = if cfg.dyadic_ratios {
                    // largest power of two fitting strictly inside a slot
                    let mut k = 1i64;
                    while rat(1, 1 << k) * rat(8, 7) > rat(1, slots) {
                        k += 1;
                    }
                    rat(1, 1 << (k + rng.random_range(0..3) as i64))
                } else {
                    let num = rng.random_range(1..3) as i64;
                    let k = rng.random_range((2 * num).max(3)..12) as i64;
                    rat(num, slots * k)
                };
                let off_den = rng.random_range(8..16) as i64;
                let offset = rat(2 * j as i64, slots) + rat(1, slots * off_den);
                (width, offset)
            })
            .collect();
        // surjective assignment of maps to intervals
        let mut assign: Vec<usize> = (0..distinct).collect();
        while assign.len() < n {
            assign.push(rng.random_range(0..distinct));
        }
        assign.shuffle(rng);
        for i in 0..n {
            let (w, off) = &pool[assign[i]];
            ratios[i][c] = w.clone();
            translations[i][c] = off.clone();
        }
    }
    if let Some((x, y)) = cfg.dominated_pair {
        // make x dominate y by swapping widths within each map when needed;
        // every map owns its intervals here, so the swap is local
        for i in 0..n {
            if ratios[i][y] > ratios[i][x] {
                ratios[i].swap(x, y);
                translations[i].swap(x, y);
            }
        }
    }
    if cfg.distinct_ratios_within_map {
        for row in &ratios {
            for a in 0..d {
                for b in (a + 1)..d {
                    if row[a] == row[b] {
                        return None;
                    }
                }
            }
        }
    }
    let raw = RawSponge {
        dimension: d,
        maps: (0..n)
            .map(|i| AffineMapSpec::new(ratios[i].clone(), translations[i].clone()))
            .collect(),
        weights: None,
    };
    SpongeSystem::validate(&raw).ok()
}

/// Largest-margin check: the feasibility slack of every ordering is at least
/// `margin` in absolute value, so float decisions and lattice scans agree.
pub fn is_nondegenerate(sys: &SpongeSystem, margin: f64) -> bool {
    let d = sys.dimension();
    for sigma in Perm::all(d) {
        let rows: Vec<Vec<f64>> = (0..d - 1)
            .map(|k| {
                let a = sigma.coord(k);
                let b = sigma.coord(k + 1);
                (0..sys.map_count())
                    .map(|i| ln_rat_f64(sys.ratio(i, a)) - ln_rat_f64(sys.ratio(i, b)))
                    .collect()
            })
            .collect();
        match max_min_slack(&rows) {
            Ok(sol) => {
                if sol.slack.abs() < margin {
                    return false;
                }
            }
            Err(_) => return false,
        }
    }
    true
}

/// A grid sponge whose feasibility margins are bounded away from zero.
pub fn nondegenerate_sponge(cfg: &SynthConfig, rng: &mut ChaCha8Rng, margin: f64) -> SpongeSystem {
    for _ in 0..10_000 {
        let sys = grid_sponge(cfg, rng);
        if is_nondegenerate(&sys, margin) {
            return sys;
        }
    }
    panic!("no nondegenerate instance found at margin {margin}");
}

/// Random positive rational probability vector with the given denominator.
pub fn random_weights(n: usize, denom: i64, rng: &mut ChaCha8Rng) -> Vec<Rat> {
    loop {
        let mut cuts: Vec<i64> = (0..n - 1).map(|_| rng.random_range(1..denom)).collect();
        cuts.sort_unstable();
        cuts.dedup();
        if cuts.len() != n - 1 {
            continue;
        }
        let mut parts = Vec::with_capacity(n);
        let mut prev = 0i64;
        for &c in &cuts {
            parts.push(c - prev);
            prev = c;
        }
        parts.push(denom - prev);
        if parts.iter().any(|&p| p == 0) {
            continue;
        }
        return parts.into_iter().map(|p| rat(p, denom)).collect();
    }
}
