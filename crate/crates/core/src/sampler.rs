//! Measure-ratio sampling over approximate cubes: empirical exponent
//! brackets, same-ordering constant verification and the subdivision bound.
//!
//! Ratios here are consumed through logarithms, so the sampler works with
//! precomputed log-weights per ordering level; the exact rational measure in
//! `cubes` remains the oracle for equality checks.

use crate::dimension::{s_lower, s_upper};
use crate::model::SpongeSystem;
use crate::orderings::{cube_ordering, OrderingSets};
use crate::projection::{Perm, ProjectionStructure};
use crate::rational::{ln_rat_f64, rat_to_f64, Rat};
use crate::weights::WeightSystem;
use crate::witness::{find_strict_letter, witness_triple, WitnessSide};
use crate::words::{stopping_vector, WordSpec};
use num_traits::One;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Precomputed `ln p_n(i)` per ordering, aligned with the index chains.
pub struct LogWeightTable {
    per_sigma: BTreeMap<Perm, Vec<Vec<f64>>>,
}

impl LogWeightTable {
    pub fn build(
        sys: &SpongeSystem,
        projections: &BTreeMap<Perm, ProjectionStructure>,
        weights: &BTreeMap<Perm, WeightSystem<Rat>>,
    ) -> LogWeightTable {
        let d = sys.dimension();
        let per_sigma = projections
            .iter()
            .map(|(sigma, _proj)| {
                let w = &weights[sigma];
                let levels: Vec<Vec<f64>> = (1..=d)
                    .map(|n| w.level_slice(n).iter().map(ln_rat_f64).collect())
                    .collect();
                (sigma.clone(), levels)
            })
            .collect();
        LogWeightTable { per_sigma }
    }

    /// `ln mu(B_w(r))` from the block form of the cube measure.
    pub fn log_cube_measure(
        &self,
        sys: &SpongeSystem,
        projections: &BTreeMap<Perm, ProjectionStructure>,
        w: &WordSpec,
        r: &Rat,
    ) -> f64 {
        let d = sys.dimension();
        let sigma = cube_ordering(sys, w, r);
        let raw = stopping_vector(sys, w, r);
        let stops: Vec<usize> = (0..d).map(|k| raw[sigma.coord(k)]).collect();
        let proj = &projections[&sigma];
        let logs = &self.per_sigma[&sigma];
        let mut acc = 0.0;
        for n in 1..=d {
            let from = if n == d { 0 } else { stops[n] };
            for pos in from..stops[n - 1] {
                let sym = proj.project(n, w.letter(pos));
                let k = proj
                    .index_set(n)
                    .iter()
                    .position(|&x| x == sym)
                    .expect("symbol in level set");
                acc += logs[n - 1][k];
            }
        }
        acc
    }
}

#[derive(Debug, Clone)]
pub struct SamplerConfig {
    pub seed: u64,
    pub random_words: usize,
    pub ladder_points: usize,
    /// natural log of the largest scale ratio sampled
    pub max_log_ratio: f64,
    pub max_iterate: usize,
}

impl SamplerConfig {
    pub fn quick(seed: u64) -> SamplerConfig {
        SamplerConfig {
            seed,
            random_words: 48,
            ladder_points: 10,
            max_log_ratio: (1e5f64).ln(),
            max_iterate: 3,
        }
    }

    pub fn full(seed: u64) -> SamplerConfig {
        SamplerConfig {
            seed,
            random_words: 96,
            ladder_points: 24,
            max_log_ratio: (1e6f64).ln(),
            max_iterate: 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FamilySlope {
    pub label: String,
    pub slope: f64,
    /// standard error of the fitted slope
    pub se: f64,
    pub points: usize,
}

#[derive(Debug, Clone)]
pub struct SamplerReport {
    pub sup_estimate: f64,
    pub inf_estimate: f64,
    /// per cylinder-set ordering: fitted upper and lower witness slopes
    pub witness_slopes: Vec<(Perm, f64, f64)>,
    pub families: Vec<FamilySlope>,
    pub max_exponent: f64,
    pub min_exponent: f64,
    pub sample_count: usize,
}

fn ols_slope(points: &[(f64, f64)]) -> f64 {
    ols_fit(points).0
}

/// Least-squares slope and its standard error.
fn ols_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let xm = points.iter().map(|p| p.0).sum::<f64>() / n;
    let ym = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in points {
        num += (x - xm) * (y - ym);
        den += (x - xm) * (x - xm);
    }
    let slope = num / den;
    if points.len() <= 2 {
        return (slope, 0.0);
    }
    let intercept = ym - slope * xm;
    let ss_res: f64 = points
        .iter()
        .map(|(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum();
    let se = (ss_res / (n - 2.0) / den).sqrt();
    (slope, se)
}

/// Exact prefix products of one coordinate, deep enough to cover a target
/// log-scale drop.
fn endpoint_ladder(sys: &SpongeSystem, w: &WordSpec, coord: usize, depth: usize) -> Vec<Rat> {
    let mut out = Vec::with_capacity(depth);
    let mut acc = Rat::one();
    for pos in 0..depth {
        acc *= sys.ratio(w.letter(pos), coord);
        out.push(acc.clone());
    }
    out
}

/// Scale pairs for a word: an outer scale early in the word's endpoint
/// ladder and every distinct stopping endpoint (union over coordinates) down
/// to the configured ratio.
fn family_points(
    sys: &SpongeSystem,
    projections: &BTreeMap<Perm, ProjectionStructure>,
    logs: &LogWeightTable,
    w: &WordSpec,
    cfg: &SamplerConfig,
) -> Vec<(f64, f64)> {
    let lam_max = rat_to_f64(&sys.lambda_max());
    let depth_needed = ((cfg.max_log_ratio + 16.0) / -lam_max.ln()).ceil() as usize + 8;
    let depth = depth_needed.min(4000);
    let ladder = endpoint_ladder(sys, w, 0, depth);
    let big_idx = 2.min(ladder.len() - 1);
    let big_r = ladder[big_idx].clone();
    let ln_big = ln_rat_f64(&big_r);
    let mu_big = logs.log_cube_measure(sys, projections, w, &big_r);
    let lam_min_ln = -ln_rat_f64(&sys.lambda_min());
    let mut scales: std::collections::BTreeSet<Rat> = std::collections::BTreeSet::new();
    for c in 0..sys.dimension() {
        for r in endpoint_ladder(sys, w, c, depth) {
            let x = ln_big - ln_rat_f64(&r);
            if x >= lam_min_ln + 0.2 && x <= cfg.max_log_ratio {
                scales.insert(r);
            }
        }
    }
    let mut points = Vec::new();
    for small in scales.iter().rev() {
        let x = ln_big - ln_rat_f64(small);
        let mu_small = logs.log_cube_measure(sys, projections, w, small);
        points.push((x, mu_big - mu_small));
        if points.len() >= 16 * cfg.ladder_points {
            break;
        }
    }
    points
}

/// Draw exponent samples from structured and random word families and fit
/// per-family slopes; the extremal witnesses provide families converging to
/// the bound values.
#[allow(clippy::too_many_arguments)]
pub fn sample_ratio_exponents(
    sys: &SpongeSystem,
    projections: &BTreeMap<Perm, ProjectionStructure>,
    weights: &BTreeMap<Perm, WeightSystem<Rat>>,
    sets: &OrderingSets,
    cfg: &SamplerConfig,
) -> SamplerReport {
    let logs = LogWeightTable::build(sys, projections, weights);
    let n = sys.map_count();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut families: Vec<FamilySlope> = Vec::new();
    let mut witness_slopes = Vec::new();
    let mut max_exp = f64::NEG_INFINITY;
    let mut min_exp = f64::INFINITY;
    let mut samples = 0usize;

    let mut record = |label: String, points: Vec<(f64, f64)>, families: &mut Vec<FamilySlope>| -> Option<f64> {
        if points.len() < 2 {
            return None;
        }
        let (slope, se) = ols_fit(&points);
        samples += points.len();
        for (x, y) in &points {
            let e = y / x;
            if *x >= (1e4f64).ln() {
                max_exp = max_exp.max(e);
                min_exp = min_exp.min(e);
            }
        }
        families.push(FamilySlope { label, slope, se, points: points.len() });
        Some(slope)
    };

    // extremal witnesses per cylinder-set ordering; the outer scale descends
    // adaptively because the admissible range can demand very deep scales
    // when the strict letter's side ratios are close
    for (sigma, _) in &sets.cylinder {
        let proj = &projections[sigma];
        let w = &weights[sigma];
        let lam_min_ln = -ln_rat_f64(&sys.lambda_min());
        let mut slopes = (f64::NAN, f64::NAN);
        for side in [WitnessSide::Upper, WitnessSide::Lower] {
            let Ok(strict_word) = find_strict_letter(sys, sigma, cfg.max_iterate) else {
                continue;
            };
            // ascend the outer scale geometrically and keep every verified
            // triple up to the configured ratio; the dense ladder averages
            // out the letter-quantization noise in the regression
            let mut pts = Vec::new();
            let mut a: u64 = 4;
            let _ = lam_min_ln;
            while a <= 60_000 && pts.len() < 24 * cfg.ladder_points {
                let big_r = Rat::new(1.into(), num_bigint::BigInt::from(1u8) << a as usize);
                if let Ok(t) = witness_triple(sys, proj, w, &strict_word, &big_r, side) {
                    let x = ln_rat_f64(&t.big_r) - ln_rat_f64(&t.small_r);
                    if x > cfg.max_log_ratio {
                        break;
                    }
                    let mb = logs.log_cube_measure(sys, projections, &t.word, &t.big_r);
                    let ms = logs.log_cube_measure(sys, projections, &t.word, &t.small_r);
                    pts.push((x, mb - ms));
                }
                a += 1;
            }
            let label = format!(
                "witness{}{}",
                if side == WitnessSide::Upper { "+" } else { "-" },
                sigma.display()
            );
            if let Some(s) = record(label, pts, &mut families) {
                if side == WitnessSide::Upper {
                    slopes.0 = s;
                } else {
                    slopes.1 = s;
                }
            }
        }
        witness_slopes.push((sigma.clone(), slopes.0, slopes.1));
    }

    // constant words
    for letter in 0..n {
        let w = WordSpec::constant(letter);
        let pts = family_points(sys, projections, &logs, &w, cfg);
        record(format!("const{}", letter + 1), pts, &mut families);
    }
    // cylinder-certificate frequency cycles
    for (sigma, cert) in &sets.cylinder {
        let mut letters = Vec::new();
        for (i, q) in cert.p.iter().enumerate() {
            let m = (rat_to_f64(q) * 24.0).round() as usize;
            letters.extend(std::iter::repeat(i).take(m.max(1)));
        }
        let w = WordSpec::cycle_of(letters);
        let pts = family_points(sys, projections, &logs, &w, cfg);
        record(format!("freq{}", sigma.display()), pts, &mut families);
    }
    // random words
    for fam in 0..cfg.random_words {
        let len = 64;
        let letters: Vec<usize> = (0..len).map(|_| rng.random_range(0..n)).collect();
        let w = WordSpec::cycle_of(letters);
        let pts = family_points(sys, projections, &logs, &w, cfg);
        record(format!("rand{fam}"), pts, &mut families);
    }

    // one-sided shrinkage by the fit's own uncertainty: noisy families must
    // not fake extremes that the aligned witness families did not reach
    let sup_estimate = families
        .iter()
        .map(|f| f.slope - f.se)
        .fold(f64::NEG_INFINITY, f64::max);
    let inf_estimate = families
        .iter()
        .map(|f| f.slope + f.se)
        .fold(f64::INFINITY, f64::min);
    SamplerReport {
        sup_estimate,
        inf_estimate,
        witness_slopes,
        families,
        max_exponent: max_exp,
        min_exponent: min_exp,
        sample_count: samples,
    }
}

#[derive(Debug, Clone)]
pub struct SameOrderingReport {
    pub sigma: Perm,
    pub fitted_c: f64,
    pub explicit_bound: f64,
    pub trend_slope: f64,
    pub trials: usize,
}

/// Sample scale pairs whose cubes share one ordering and fit the smallest
/// constant making the two-sided same-ordering bound hold; the constant must
/// stay below the explicit bound and show no growth trend in the ratio.
pub fn verify_same_ordering_bounds(
    sys: &SpongeSystem,
    projections: &BTreeMap<Perm, ProjectionStructure>,
    weights: &BTreeMap<Perm, WeightSystem<Rat>>,
    sigma: &Perm,
    trials: usize,
    seed: u64,
) -> SameOrderingReport {
    let logs = LogWeightTable::build(sys, projections, weights);
    let proj = &projections[sigma];
    let wsys = &weights[sigma];
    let up = s_upper(sys, proj, wsys).total;
    let lo = s_lower(sys, proj, wsys).total;
    let lam_min = rat_to_f64(&sys.lambda_min());
    let explicit_bound = (-lam_min.ln() * (up + lo)).exp();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = sys.map_count();
    // uniform letters plus rejection on the orderings of both cubes
    let mut points: Vec<(f64, f64)> = Vec::new();
    let mut attempts = 0usize;
    while points.len() < trials && attempts < trials * 200 {
        attempts += 1;
        let letters: Vec<usize> = (0..96).map(|_| rng.random_range(0..n)).collect();
        let w = WordSpec::cycle_of(letters);
        let depth = 1200.min(((16.0 + 10.0) / -rat_to_f64(&sys.lambda_max()).ln()) as usize + 16);
        let ladder = endpoint_ladder(sys, &w, rng.random_range(0..sys.dimension()), depth);
        let bi = rng.random_range(1..5.min(ladder.len()));
        let big_r = ladder[bi].clone();
        let target = rng.random_range((-lam_min.ln() + 0.05)..8.0);
        let ln_big = ln_rat_f64(&big_r);
        let Some(small_r) = ladder[bi + 1..]
            .iter()
            .find(|p| ln_big - ln_rat_f64(p) >= target)
        else {
            continue;
        };
        if cube_ordering(sys, &w, &big_r) != *sigma || cube_ordering(sys, &w, small_r) != *sigma {
            continue;
        }
        let x = ln_big - ln_rat_f64(small_r);
        let y = logs.log_cube_measure(sys, projections, &w, &big_r)
            - logs.log_cube_measure(sys, projections, &w, small_r);
        // ln C needed to satisfy both sides
        let need = (y - up * x).max(lo * x - y).max(0.0);
        points.push((x, need));
    }
    let fitted_c = points.iter().map(|p| p.1).fold(0.0f64, f64::max).exp();
    let trend_slope = if points.len() >= 2 { ols_slope(&points) } else { 0.0 };
    SameOrderingReport {
        sigma: sigma.clone(),
        fitted_c,
        explicit_bound,
        trend_slope,
        trials: points.len(),
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum SamplerError {
    #[error("epsilon violates the subdivision hypothesis 1 - eps > max ratio")]
    InvalidEpsilon,
}

#[derive(Debug, Clone)]
pub struct SubdivisionReport {
    pub explicit_bound: f64,
    pub max_ratio: f64,
    /// fitted slope of the log-ratio against the scale depth; bounded ratios
    /// show no growth trend
    pub trend_slope: f64,
    pub trials: usize,
}

/// Ratio of cube measures under a slight shrinking of the scale stays
/// bounded by the explicit conditional-weight bound.
pub fn verify_subdivision_bound(
    sys: &SpongeSystem,
    projections: &BTreeMap<Perm, ProjectionStructure>,
    weights: &BTreeMap<Perm, WeightSystem<Rat>>,
    eps: &Rat,
    trials: usize,
    seed: u64,
) -> Result<SubdivisionReport, SamplerError> {
    let one_minus = Rat::one() - eps;
    if !(one_minus > sys.lambda_max()) {
        return Err(SamplerError::InvalidEpsilon);
    }
    let d = sys.dimension();
    // largest inverse conditional weight over all orderings and levels
    let mut c_max = 1.0f64;
    for (sigma, w) in weights {
        let proj = &projections[sigma];
        for n in 1..=d {
            for &i in proj.index_set(n) {
                let c = 1.0 / rat_to_f64(w.conditional(proj, n, i));
                c_max = c_max.max(c);
            }
        }
    }
    let explicit_bound = c_max.powi((d * d) as i32);
    let logs = LogWeightTable::build(sys, projections, weights);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = sys.map_count();
    let mut max_ratio = 1.0f64;
    let mut points: Vec<(f64, f64)> = Vec::with_capacity(trials);
    for _ in 0..trials {
        let letters: Vec<usize> = (0..64).map(|_| rng.random_range(0..n)).collect();
        let w = WordSpec::cycle_of(letters);
        let ladder = endpoint_ladder(sys, &w, rng.random_range(0..d), 64);
        let big_r = ladder[rng.random_range(0..ladder.len())].clone();
        let small_r = &big_r * &one_minus;
        let y = logs.log_cube_measure(sys, projections, &w, &big_r)
            - logs.log_cube_measure(sys, projections, &w, &small_r);
        max_ratio = max_ratio.max(y.exp());
        points.push((-ln_rat_f64(&big_r), y));
    }
    let trend_slope = if points.len() >= 2 { ols_slope(&points) } else { 0.0 };
    Ok(SubdivisionReport { explicit_bound, max_ratio, trend_slope, trials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubes::weight_table;
    use crate::dimension::all_projections;
    use crate::model::{AffineMapSpec, RawSponge};
    use crate::orderings::{compute_ordering_sets, SearchConfig};
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
    fn log_measure_matches_exact_measure() {
        let sys = bm_2x4();
        let projections = all_projections(&sys);
        let p = uniform_weights(3);
        let weights = weight_table(&sys, &projections, &p);
        let logs = LogWeightTable::build(&sys, &projections, &weights);
        let w = WordSpec::constant(0);
        let lm = logs.log_cube_measure(&sys, &projections, &w, &rat(1, 4));
        assert!((lm - (2.0f64 / 9.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn sampler_brackets_grid_carpet() {
        let sys = bm_2x4();
        let projections = all_projections(&sys);
        let p = uniform_weights(3);
        let weights = weight_table(&sys, &projections, &p);
        let sets = compute_ordering_sets(&sys, &SearchConfig::default()).unwrap();
        let cfg = SamplerConfig { random_words: 8, ..SamplerConfig::quick(7) };
        let report = sample_ratio_exponents(&sys, &projections, &weights, &sets, &cfg);
        let expected = 3f64.ln() / 2f64.ln() + 0.5;
        assert!(
            (report.sup_estimate - expected).abs() < 0.05,
            "sup {} vs {}",
            report.sup_estimate,
            expected
        );
        let expected_lo = (1.5f64).ln() / 2f64.ln();
        assert!(
            (report.inf_estimate - expected_lo).abs() < 0.05,
            "inf {} vs {}",
            report.inf_estimate,
            expected_lo
        );
    }

    #[test]
    fn subdivision_bound_holds_on_grid_carpet() {
        let sys = bm_2x4();
        let projections = all_projections(&sys);
        let p = uniform_weights(3);
        let weights = weight_table(&sys, &projections, &p);
        let rep =
            verify_subdivision_bound(&sys, &projections, &weights, &rat(1, 10), 80, 3).unwrap();
        assert!(rep.max_ratio <= rep.explicit_bound + 1e-9);
        assert!((rep.explicit_bound - 81.0).abs() < 1e-6);

        let err = verify_subdivision_bound(&sys, &projections, &weights, &rat(3, 5), 10, 3);
        assert!(matches!(err, Err(SamplerError::InvalidEpsilon)));
    }

    #[test]
    fn same_ordering_constant_is_bounded() {
        let sys = bm_2x4();
        let projections = all_projections(&sys);
        let p = uniform_weights(3);
        let weights = weight_table(&sys, &projections, &p);
        let rep = verify_same_ordering_bounds(
            &sys,
            &projections,
            &weights,
            &Perm::identity(2),
            60,
            11,
        );
        assert!(rep.trials >= 30);
        assert!(rep.fitted_c <= rep.explicit_bound, "{} vs {}", rep.fitted_c, rep.explicit_bound);
    }
}
