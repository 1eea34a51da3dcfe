//! Fibre similarity dimensions, coordinate-wise natural measures and the
//! upper/lower dimension bound formulas.

use crate::model::SpongeSystem;
use crate::projection::{Perm, ProjectionStructure};
use crate::rational::ln_rat_f64;
use crate::separation::SeparationReport;
use crate::orderings::OrderingSets;
use crate::weights::{WeightScalar, WeightSystem};
use std::collections::BTreeMap;

#[derive(Debug, Clone, thiserror::Error)]
pub enum DimensionError {
    #[error("fibre similarity equation has its root above 1 (separation must be violated upstream)")]
    RootOutOfUnitInterval,
    #[error("very strong separation not verified; Assouad/lower bounds are not claimed")]
    SeparationNotVerified,
}

/// The unique `s` with `sum r_i^s = 1`, bracketed in `[0,1]`.
///
/// The left side is strictly decreasing in `s`, so plain bisection is exact
/// enough: the returned root has residual at most 1e-12.
pub fn similarity_dimension(ratios: &[f64]) -> Result<f64, DimensionError> {
    assert!(!ratios.is_empty());
    let g = |s: f64| ratios.iter().map(|r| r.powf(s)).sum::<f64>() - 1.0;
    if ratios.len() == 1 {
        return Ok(0.0);
    }
    if g(1.0) > 1e-15 {
        return Err(DimensionError::RootOutOfUnitInterval);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if g(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    debug_assert!(g(root).abs() <= 1e-12);
    Ok(root)
}

/// Similarity dimensions of every fibre along a projection chain:
/// `per_level[n]` holds `s_n(i)` for `i` in `I_n` (level 0 is the root fibre).
#[derive(Debug, Clone)]
pub struct FibreDimensions {
    pub s0: f64,
    /// levels `n = 1..d-1`, aligned with `index_set(n)`.
    pub per_level: Vec<Vec<f64>>,
}

impl FibreDimensions {
    /// `s_n(i)` where `i` must lie in `I_n`; `n = 0` ignores `i`.
    pub fn value(&self, proj: &ProjectionStructure, n: usize, i: usize) -> f64 {
        if n == 0 {
            self.s0
        } else {
            let k = proj
                .index_set(n)
                .iter()
                .position(|&x| x == i)
                .expect("index in level set");
            self.per_level[n - 1][k]
        }
    }
}

pub fn fibre_dimensions(
    sys: &SpongeSystem,
    proj: &ProjectionStructure,
) -> Result<FibreDimensions, DimensionError> {
    let d = sys.dimension();
    let sigma = proj.sigma();
    let fibre_root = |n: usize, i: usize| -> Result<f64, DimensionError> {
        let coord = sigma.coord(n);
        let ratios: Vec<f64> = proj
            .fibre(n, i)
            .iter()
            .map(|&j| crate::rational::rat_to_f64(sys.ratio(j, coord)))
            .collect();
        similarity_dimension(&ratios)
    };
    let s0 = fibre_root(0, usize::MAX)?;
    let mut per_level = Vec::new();
    for n in 1..d {
        let level: Result<Vec<f64>, _> = proj
            .index_set(n)
            .iter()
            .map(|&i| fibre_root(n, i))
            .collect();
        per_level.push(level?);
    }
    Ok(FibreDimensions { s0, per_level })
}

/// The coordinate-wise natural measure for one ordering: each map's weight is
/// the product over levels of its projected side length raised to the fibre
/// dimension above its parent.
pub fn natural_measure(
    sys: &SpongeSystem,
    proj: &ProjectionStructure,
) -> Result<(Vec<f64>, FibreDimensions), DimensionError> {
    let d = sys.dimension();
    let fd = fibre_dimensions(sys, proj)?;
    let sigma = proj.sigma();
    let q: Vec<f64> = (0..sys.map_count())
        .map(|i| {
            let mut acc = 1.0;
            for n in 1..=d {
                let rep = proj.project(n, i);
                let lam = crate::rational::rat_to_f64(sys.ratio(rep, sigma.coord(n - 1)));
                let s = if n == 1 {
                    fd.s0
                } else {
                    fd.value(proj, n - 1, proj.project(n - 1, i))
                };
                acc *= lam.powf(s);
            }
            acc
        })
        .collect();
    let total: f64 = q.iter().sum();
    debug_assert!((total - 1.0).abs() < 1e-9, "natural measure sums to {total}");
    Ok((q, fd))
}

/// One level term of the bound formula: the extremal conditional-weight
/// exponent and the map attaining it.
#[derive(Debug, Clone)]
pub struct LevelTerm {
    pub level: usize,
    pub map: usize,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct SumProfile {
    pub total: f64,
    pub terms: Vec<LevelTerm>,
}

fn level_exponent<T: WeightScalar>(
    sys: &SpongeSystem,
    proj: &ProjectionStructure,
    w: &WeightSystem<T>,
    n: usize,
    i: usize,
) -> f64 {
    let cond = w.conditional(proj, n, i);
    if cond == &T::one() {
        return 0.0;
    }
    let lam = sys.ratio(i, proj.sigma().coord(n - 1));
    cond.ln64() / ln_rat_f64(lam)
}

fn sum_profile<T: WeightScalar>(
    sys: &SpongeSystem,
    proj: &ProjectionStructure,
    w: &WeightSystem<T>,
    maximize: bool,
) -> SumProfile {
    let d = sys.dimension();
    let mut terms = Vec::with_capacity(d);
    let mut total = 0.0;
    for n in 1..=d {
        let mut best: Option<(usize, f64)> = None;
        for &i in proj.index_set(n) {
            let v = level_exponent(sys, proj, w, n, i);
            let take = match best {
                None => true,
                Some((_, bv)) => {
                    if maximize {
                        v > bv
                    } else {
                        v < bv
                    }
                }
            };
            if take {
                best = Some((i, v));
            }
        }
        let (map, value) = best.expect("level sets are nonempty");
        total += value;
        terms.push(LevelTerm { level: n, map, value });
    }
    SumProfile { total, terms }
}

/// Upper bound profile: sum over levels of the largest conditional-weight
/// exponent (with its attaining map, used by the extremal witness builder).
pub fn s_upper<T: WeightScalar>(
    sys: &SpongeSystem,
    proj: &ProjectionStructure,
    w: &WeightSystem<T>,
) -> SumProfile {
    sum_profile(sys, proj, w, true)
}

/// Lower bound profile: sum of the smallest exponent per level.
pub fn s_lower<T: WeightScalar>(
    sys: &SpongeSystem,
    proj: &ProjectionStructure,
    w: &WeightSystem<T>,
) -> SumProfile {
    sum_profile(sys, proj, w, false)
}

#[derive(Debug, Clone)]
pub struct PerSigma {
    pub sigma: Perm,
    pub upper: SumProfile,
    pub lower: SumProfile,
    pub in_cylinder_set: bool,
}

#[derive(Debug, Clone)]
pub struct DimensionBounds {
    pub assouad_lo: f64,
    pub assouad_hi: f64,
    pub lower_lo: f64,
    pub lower_hi: f64,
    pub exact: bool,
    pub per_sigma: Vec<PerSigma>,
}

/// Evaluate the bound formulas per ordering and aggregate:
/// Assouad between the cylinder-set max and the cube-set max, lower dimension
/// between the cube-set min and the cylinder-set min. Requires the very
/// strong separation; use `bound_table` for bare formula values.
pub fn dimension_bounds<T: WeightScalar>(
    sys: &SpongeSystem,
    projections: &BTreeMap<Perm, ProjectionStructure>,
    sets: &OrderingSets,
    separation: &SeparationReport,
    p: &[T],
) -> Result<DimensionBounds, DimensionError> {
    if !separation.very_strong {
        return Err(DimensionError::SeparationNotVerified);
    }
    Ok(bound_table(sys, projections, sets, p))
}

/// The same aggregation without the separation gate (diagnostic use).
pub fn bound_table<T: WeightScalar>(
    sys: &SpongeSystem,
    projections: &BTreeMap<Perm, ProjectionStructure>,
    sets: &OrderingSets,
    p: &[T],
) -> DimensionBounds {
    let upper_set = sets.effective_upper();
    let cylinder: Vec<Perm> = sets.cylinder_perms();
    let mut per_sigma = Vec::new();
    for sigma in &upper_set {
        let proj = &projections[sigma];
        let w = WeightSystem::build(sys, proj, p);
        per_sigma.push(PerSigma {
            sigma: sigma.clone(),
            upper: s_upper(sys, proj, &w),
            lower: s_lower(sys, proj, &w),
            in_cylinder_set: cylinder.contains(sigma),
        });
    }
    let fold = |iter: &mut dyn Iterator<Item = f64>, max: bool| -> f64 {
        let init = if max { f64::NEG_INFINITY } else { f64::INFINITY };
        iter.fold(init, |a, b| if max { a.max(b) } else { a.min(b) })
    };
    let assouad_lo = fold(
        &mut per_sigma
            .iter()
            .filter(|t| t.in_cylinder_set)
            .map(|t| t.upper.total),
        true,
    );
    let assouad_hi = fold(&mut per_sigma.iter().map(|t| t.upper.total), true);
    let lower_lo = fold(&mut per_sigma.iter().map(|t| t.lower.total), false);
    let lower_hi = fold(
        &mut per_sigma
            .iter()
            .filter(|t| t.in_cylinder_set)
            .map(|t| t.lower.total),
        false,
    );
    let exact = sets.exact
        || ((assouad_hi - assouad_lo).abs() <= 1e-9 && (lower_hi - lower_lo).abs() <= 1e-9);
    DimensionBounds {
        assouad_lo,
        assouad_hi,
        lower_lo,
        lower_hi,
        exact,
        per_sigma,
    }
}

/// The natural-measure identity: for its own ordering, the conditional-weight
/// exponent at every level equals the fibre dimension above the parent.
pub fn natural_measure_identity_check(
    sys: &SpongeSystem,
    proj: &ProjectionStructure,
    q: &[f64],
    fd: &FibreDimensions,
) -> bool {
    let d = sys.dimension();
    let w = WeightSystem::build(sys, proj, q);
    let total: f64 = q.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return false;
    }
    for n in 1..=d {
        for &i in proj.index_set(n) {
            let lhs = level_exponent(sys, proj, &w, n, i);
            let rhs = if n == 1 {
                fd.s0
            } else {
                fd.value(proj, n - 1, proj.project(n - 1, i))
            };
            if (lhs - rhs).abs() > 1e-12 {
                return false;
            }
        }
    }
    true
}

/// Natural-measure special case of the bound formulas:
/// `S_upper = s_0 + sum_n max_i s_n(i)` and dually for the minimum.
pub fn natural_profile_closed_form(fd: &FibreDimensions) -> (f64, f64) {
    let mut up = fd.s0;
    let mut lo = fd.s0;
    for level in &fd.per_level {
        up += level.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        lo += level.iter().copied().fold(f64::INFINITY, f64::min);
    }
    (up, lo)
}

/// Projections for every ordering of the coordinates.
pub fn all_projections(sys: &SpongeSystem) -> BTreeMap<Perm, ProjectionStructure> {
    assert!(sys.dimension() <= 6, "factorial projection table needs d <= 6");
    Perm::all(sys.dimension())
        .into_iter()
        .map(|s| (s.clone(), ProjectionStructure::build(sys, s)))
        .collect()
}
