//! Minimizing the upper bound over the probability simplex and the explicit
//! dimension-gap certificate for planar carpets without axis overlaps.

use crate::dimension::{s_upper, similarity_dimension, DimensionError};
use crate::model::SpongeSystem;
use crate::orderings::OrderingSets;
use crate::projection::{Perm, ProjectionStructure};
use crate::rational::rat_to_f64;
use crate::weights::WeightSystem;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

#[derive(Debug, Clone, thiserror::Error)]
pub enum GapError {
    #[error("not applicable: {0}")]
    NotApplicable(String),
}

#[derive(Debug, Clone)]
pub struct GapBudget {
    /// simplex grid resolution for up to three maps
    pub grid: usize,
    /// sample count when the map count rules out a full grid
    pub samples: usize,
    pub refine_rounds: usize,
    pub seed: u64,
}

impl Default for GapBudget {
    fn default() -> Self {
        GapBudget { grid: 200, samples: 20_000, refine_rounds: 40, seed: 1 }
    }
}

/// Objective: the largest upper-bound profile over the cylinder set.
fn objective(
    sys: &SpongeSystem,
    projections: &BTreeMap<Perm, ProjectionStructure>,
    cylinder: &[Perm],
    p: &[f64],
) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for sigma in cylinder {
        let proj = &projections[sigma];
        let w = WeightSystem::build(sys, proj, p);
        worst = worst.max(s_upper(sys, proj, &w).total);
    }
    worst
}

/// Deterministic grid (or seeded Dirichlet sampling) followed by coordinate
/// pair descent with shrinking steps.
pub fn minimize_assouad_over_p(
    sys: &SpongeSystem,
    projections: &BTreeMap<Perm, ProjectionStructure>,
    sets: &OrderingSets,
    budget: &GapBudget,
) -> (Vec<f64>, f64) {
    let n = sys.map_count();
    let cylinder = sets.cylinder_perms();
    assert!(!cylinder.is_empty(), "cylinder set cannot be empty");
    let eval = |p: &[f64]| objective(sys, projections, &cylinder, p);

    let mut best_p = vec![1.0 / n as f64; n];
    let mut best_v = eval(&best_p);

    if n == 1 {
        return (best_p, best_v);
    }
    if n <= 3 {
        let g = budget.grid;
        let mut counts = vec![0usize; n];
        grid_scan(g, 0, g, &mut counts, &mut |c: &[usize]| {
            if c.iter().any(|&x| x == 0) {
                return;
            }
            let p: Vec<f64> = c.iter().map(|&x| x as f64 / g as f64).collect();
            let v = eval(&p);
            if v < best_v {
                best_v = v;
                best_p = p;
            }
        });
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        for _ in 0..budget.samples {
            // Dirichlet(1): normalized exponentials
            let mut p: Vec<f64> = (0..n)
                .map(|_| -(rng.random::<f64>().max(1e-12)).ln())
                .collect();
            let s: f64 = p.iter().sum();
            p.iter_mut().for_each(|x| *x /= s);
            let v = eval(&p);
            if v < best_v {
                best_v = v;
                best_p = p;
            }
        }
    }

    // coordinatewise mass-transfer refinement
    let mut step = 1.0 / budget.grid as f64;
    for _ in 0..budget.refine_rounds {
        let mut improved = false;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                if best_p[j] <= step + 1e-12 {
                    continue;
                }
                let mut cand = best_p.clone();
                cand[i] += step;
                cand[j] -= step;
                let v = eval(&cand);
                if v < best_v - 1e-15 {
                    best_v = v;
                    best_p = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
            if step < 1e-7 {
                break;
            }
        }
    }
    (best_p, best_v)
}

fn grid_scan(total: usize, pos: usize, left: usize, counts: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    let n = counts.len();
    let _ = total;
    if pos == n - 1 {
        counts[pos] = left;
        f(counts);
        return;
    }
    for take in 0..=left {
        counts[pos] = take;
        grid_scan(total, pos + 1, left - take, counts, f);
    }
}

/// The explicit gap certificate for a planar carpet without axis overlaps.
#[derive(Debug, Clone)]
pub struct GapCertificate {
    /// similarity dimension of the dominant-axis projection (the attractor's
    /// Assouad dimension for this class)
    pub s: f64,
    /// similarity dimension of the other axis projection
    pub t: f64,
    pub epsilon: f64,
    /// 1-based index of the map with the cross-axis excess
    pub ell: usize,
    /// per-map second terms of the minimum (1-based indices)
    pub second_terms: Vec<(usize, f64)>,
    pub delta_f: f64,
    pub p_star: Vec<f64>,
    pub inf_estimate: f64,
    /// whether the axes were swapped to make the primary the larger one
    pub axes_swapped: bool,
}

/// Computes the positive dimension gap for a planar carpet that is not of the
/// dominated kind and has no exact overlap on either axis: every self-affine
/// measure's upper bound exceeds the axis similarity dimension by the
/// certificate's margin.
pub fn gap_certificate(
    sys: &SpongeSystem,
    projections: &BTreeMap<Perm, ProjectionStructure>,
    sets: &OrderingSets,
    budget: &GapBudget,
) -> Result<GapCertificate, GapError> {
    if sys.dimension() != 2 {
        return Err(GapError::NotApplicable("needs a planar carpet".into()));
    }
    let n = sys.map_count();
    for sigma in Perm::all(2) {
        if projections[&sigma].index_set(1).len() != n {
            return Err(GapError::NotApplicable(
                "axis projections must be free of exact overlaps".into(),
            ));
        }
    }
    if sys.coordinate_ordering_condition().is_some() {
        return Err(GapError::NotApplicable(
            "one axis dominates the other; no gap for the dominated class".into(),
        ));
    }
    let ratios = |c: usize| -> Vec<f64> {
        (0..n).map(|i| rat_to_f64(sys.ratio(i, c))).collect()
    };
    let to_gap = |e: DimensionError| GapError::NotApplicable(e.to_string());
    let s_x = similarity_dimension(&ratios(0)).map_err(to_gap)?;
    let s_y = similarity_dimension(&ratios(1)).map_err(to_gap)?;
    let axes_swapped = s_y > s_x;
    let (a, b, s, t) = if axes_swapped {
        (ratios(1), ratios(0), s_y, s_x)
    } else {
        (ratios(0), ratios(1), s_x, s_y)
    };

    // the map with the largest cross-axis excess at exponent s
    let mut ell = None;
    let mut excess = 0.0;
    for i in 0..n {
        let e = b[i].powf(s) - a[i].powf(s);
        if e > excess {
            excess = e;
            ell = Some(i);
        }
    }
    let ell = ell.ok_or_else(|| {
        GapError::NotApplicable("no map has a cross-axis excess; gap argument void".into())
    })?;
    let epsilon = excess / 2.0;

    let term1 = (a[ell].powf(s) + epsilon).ln() / b[ell].ln() - s;
    let mut second_terms = Vec::new();
    let mut term2 = f64::INFINITY;
    for k in 0..n {
        let arg = 1.0 - epsilon * a[k].powf(-s) / (n as f64 - 1.0);
        if arg <= 0.0 {
            // the pigeonhole can never select such a map
            continue;
        }
        let v = arg.ln() / a[k].ln();
        second_terms.push((k + 1, v));
        term2 = term2.min(v);
    }
    let delta_f = term1.min(term2);
    let (p_star, inf_estimate) = minimize_assouad_over_p(sys, projections, sets, budget);
    debug_assert!(delta_f > 0.0);
    debug_assert!(inf_estimate >= s + delta_f - 1e-6);
    Ok(GapCertificate {
        s,
        t,
        epsilon,
        ell: ell + 1,
        second_terms,
        delta_f,
        p_star,
        inf_estimate,
        axes_swapped,
    })
}
