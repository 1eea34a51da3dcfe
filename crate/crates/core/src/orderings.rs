//! Orderings witnessed by cubes and cylinders: the sets usually written as
//! script-A (cube orderings) and script-B (strict cylinder orderings),
//! feasibility certificates, domination pruning and the bounded witness
//! search.

use crate::hiprec::{ln_interval, RatInterval};
use crate::lp::{max_min_slack, LpError};
use crate::model::SpongeSystem;
use crate::projection::Perm;
use crate::rational::{dyadic_from_f64, ln_rat_f64, Rat};
use crate::words::{stopping_vector, WordSpec};
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// Borderline band for the log-linear feasibility decision.
pub const SLACK_BAND: f64 = 1e-9;

#[derive(Debug, Clone, thiserror::Error)]
pub enum OrderingError {
    #[error("ordering {sigma} is borderline (max slack {slack:.3e}); the instance needs higher precision or is degenerate")]
    Borderline { sigma: String, slack: f64 },
    #[error("system too large for exact feasibility enumeration")]
    TooLarge,
    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl From<LpError> for OrderingError {
    fn from(_: LpError) -> Self {
        OrderingError::TooLarge
    }
}

/// Lyapunov exponents of a probability vector: `chi[c] = -sum p_i ln lambda_i^(c)`.
#[derive(Debug, Clone)]
pub struct LyapunovProfile {
    pub p: Vec<f64>,
    pub chi: Vec<f64>,
}

pub fn lyapunov_profile(sys: &SpongeSystem, p: &[f64]) -> LyapunovProfile {
    let d = sys.dimension();
    let chi = (0..d)
        .map(|c| {
            -(0..sys.map_count())
                .map(|i| p[i] * ln_rat_f64(sys.ratio(i, c)))
                .sum::<f64>()
        })
        .collect();
    LyapunovProfile { p: p.to_vec(), chi }
}

/// Certificate that an ordering is witnessed.
#[derive(Debug, Clone)]
pub enum OrderingCertificate {
    /// A rational probability vector whose Lyapunov exponents form the strict
    /// chain; re-verified in certified interval arithmetic.
    CylinderStrict { p: Vec<Rat>, slack: f64 },
    /// A word and an exact scale at which the cube ordering equals the claim.
    Cube { word: WordSpec, scale: Rat },
}

#[derive(Debug, Clone)]
pub struct CylinderCertificate {
    pub p: Vec<Rat>,
    pub slack: f64,
}

/// Computed ordering sets with certificates.
#[derive(Debug, Clone)]
pub struct OrderingSets {
    /// Strict-cylinder orderings with their Lyapunov certificates.
    pub cylinder: Vec<(Perm, CylinderCertificate)>,
    /// Certified lower set of cube orderings.
    pub cube_lower: Vec<(Perm, OrderingCertificate)>,
    /// Pruned upper set: survivors of domination pruning.
    pub cube_upper: Vec<Perm>,
    /// Whether the cube ordering set is known exactly.
    pub exact: bool,
}

impl OrderingSets {
    pub fn cylinder_perms(&self) -> Vec<Perm> {
        self.cylinder.iter().map(|(s, _)| s.clone()).collect()
    }

    pub fn cube_lower_perms(&self) -> Vec<Perm> {
        self.cube_lower.iter().map(|(s, _)| s.clone()).collect()
    }

    /// The set over which upper dimension bounds are taken: the exact cube
    /// set when it is pinned, otherwise the pruned upper set.
    pub fn effective_upper(&self) -> Vec<Perm> {
        if self.exact {
            self.cube_lower_perms()
        } else {
            self.cube_upper.clone()
        }
    }
}

/// The cube ordering of a word at a scale: stopping times sorted decreasingly
/// from the front, ties broken by the exact side-product comparison and then
/// by coordinate index.
pub fn cube_ordering(sys: &SpongeSystem, w: &WordSpec, r: &Rat) -> Perm {
    let stops = stopping_vector(sys, w, r);
    let d = sys.dimension();
    let max_l = *stops.iter().max().unwrap();
    // prefix products per coordinate up to the deepest stopping time
    let mut prods = vec![Vec::with_capacity(max_l); d];
    let mut cur = vec![Rat::one(); d];
    for pos in 0..max_l {
        let letter = w.letter(pos);
        for c in 0..d {
            cur[c] *= sys.ratio(letter, c);
            prods[c].push(cur[c].clone());
        }
    }
    let mut coords: Vec<usize> = (0..d).collect();
    coords.sort_by(|&a, &b| {
        stops[b]
            .cmp(&stops[a])
            .then_with(|| {
                let l = stops[a];
                prods[b][l - 1].cmp(&prods[a][l - 1])
            })
            .then(a.cmp(&b))
    });
    Perm::new(coords).expect("sorted coordinates form a permutation")
}

/// The strict cylinder ordering at scale r, if any: side products at the
/// first stopping length, strictly sorted. Returns `None` on any tie.
pub fn strict_cylinder_ordering(sys: &SpongeSystem, w: &WordSpec, r: &Rat) -> Option<Perm> {
    let stops = stopping_vector(sys, w, r);
    let k = *stops.iter().min().unwrap();
    let d = sys.dimension();
    let mut prods = vec![Rat::one(); d];
    for pos in 0..k {
        let letter = w.letter(pos);
        for c in 0..d {
            prods[c] *= sys.ratio(letter, c);
        }
    }
    let mut coords: Vec<usize> = (0..d).collect();
    coords.sort_by(|&a, &b| prods[b].cmp(&prods[a]));
    for win in coords.windows(2) {
        if prods[win[0]] == prods[win[1]] {
            return None;
        }
    }
    Perm::new(coords)
}

/// Certified strict Lyapunov chain check for a rational probability vector.
/// `Some(true)`: chain strictly increasing along sigma; `Some(false)`: some
/// pair certified non-increasing; `None`: undecided at the precision ladder.
pub fn certified_strict_chain(sys: &SpongeSystem, p: &[Rat], sigma: &Perm) -> Option<bool> {
    for prec in [64u32, 128, 512] {
        let chis: Vec<RatInterval> = sigma
            .coords()
            .iter()
            .map(|&c| {
                let mut acc = RatInterval::point(Rat::zero());
                for i in 0..sys.map_count() {
                    if p[i].is_zero() {
                        continue;
                    }
                    let term = ln_interval(sys.ratio(i, c), prec).neg().scale(&p[i]);
                    acc = acc.add(&term);
                }
                acc
            })
            .collect();
        let mut undecided = false;
        let mut ok = true;
        for k in 0..chis.len().saturating_sub(1) {
            match chis[k].strictly_less(&chis[k + 1]) {
                Some(true) => {}
                Some(false) => {
                    ok = false;
                    break;
                }
                None => {
                    undecided = true;
                    break;
                }
            }
        }
        if !undecided {
            return Some(ok);
        }
    }
    None
}

/// Rows of the feasibility problem for sigma: row k has entries
/// `ln lambda_i^(sigma_k) - ln lambda_i^(sigma_{k+1})`, so `row_k . p` is the
/// Lyapunov gap `chi_{sigma_{k+1}} - chi_{sigma_k}`.
fn chain_rows(sys: &SpongeSystem, sigma: &Perm) -> Vec<Vec<f64>> {
    let n = sys.map_count();
    (0..sigma.len().saturating_sub(1))
        .map(|k| {
            let a = sigma.coord(k);
            let b = sigma.coord(k + 1);
            (0..n)
                .map(|i| ln_rat_f64(sys.ratio(i, a)) - ln_rat_f64(sys.ratio(i, b)))
                .collect()
        })
        .collect()
}

/// Round a float vector to a positive rational probability vector with the
/// given denominator; the largest entry absorbs the rounding residue.
fn rationalize_probability(p: &[f64], denom: i64) -> Vec<Rat> {
    let n = p.len();
    let mut counts: Vec<i64> = p
        .iter()
        .map(|&x| ((x * denom as f64).round() as i64).max(1))
        .collect();
    let total: i64 = counts.iter().sum();
    let argmax = (0..n).max_by(|&a, &b| p[a].total_cmp(&p[b])).unwrap();
    counts[argmax] += denom - total;
    if counts[argmax] < 1 {
        // pathological rounding; fall back to uniform-ish
        let base = denom / n as i64;
        counts = vec![base; n];
        counts[0] += denom - base * n as i64;
    }
    counts.iter().map(|&c| Rat::new(c.into(), denom.into())).collect()
}

/// Decide strict-cylinder membership of an ordering via max-slack feasibility
/// of the Lyapunov chain, returning a re-verified rational witness.
pub fn cylinder_membership(
    sys: &SpongeSystem,
    sigma: &Perm,
) -> Result<Option<CylinderCertificate>, OrderingError> {
    let d = sys.dimension();
    let n = sys.map_count();
    if d == 1 {
        let p = vec![Rat::new(1.into(), n.into() ); n];
        return Ok(Some(CylinderCertificate { p, slack: f64::INFINITY }));
    }
    // exact infeasibility: a dominated coordinate placed before its dominating
    // one can never open a strict exponent gap
    for k in 0..d {
        for l in (k + 1)..d {
            if sys.dominates(sigma.coord(l), sigma.coord(k)) {
                return Ok(None);
            }
        }
    }
    let rows = chain_rows(sys, sigma);
    let sol = max_min_slack(&rows)?;
    if sol.slack < -SLACK_BAND {
        return Ok(None);
    }
    if sol.slack <= SLACK_BAND {
        return Err(OrderingError::Borderline {
            sigma: sigma.display(),
            slack: sol.slack,
        });
    }
    // Pull the optimum slightly into the interior so every entry is positive,
    // then rationalize and re-verify with certified interval logs.
    let row_scale: f64 = rows
        .iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(1.0, f64::max);
    let mu = (sol.slack / (4.0 * row_scale)).min(1e-3);
    let mixed: Vec<f64> = sol
        .p
        .iter()
        .map(|&x| (1.0 - mu) * x + mu / n as f64)
        .collect();
    for denom in [3600i64, 1_000_000, 1_000_000_000] {
        let q = rationalize_probability(&mixed, denom);
        if q.iter().any(|x| !(x > &Rat::zero())) {
            continue;
        }
        if certified_strict_chain(sys, &q, sigma) == Some(true) {
            return Ok(Some(CylinderCertificate { p: q, slack: sol.slack }));
        }
    }
    Err(OrderingError::Borderline {
        sigma: sigma.display(),
        slack: sol.slack,
    })
}

/// Brute-force feasibility scan over all rational probability vectors with
/// common denominator up to `max_denom`: the independent oracle for
/// `cylinder_membership`. Returns the first witness found.
pub fn scan_feasibility(sys: &SpongeSystem, sigma: &Perm, max_denom: u32) -> Option<Vec<Rat>> {
    let rows = chain_rows(sys, sigma);
    let n = sys.map_count();
    let mut counts = vec![0u32; n];
    for denom in 1..=max_denom {
        if scan_rec(&rows, n, denom, 0, denom, &mut counts) {
            return Some(
                counts
                    .iter()
                    .map(|&c| Rat::new(c.into(), denom.into()))
                    .collect(),
            );
        }
    }
    None
}

fn scan_rec(rows: &[Vec<f64>], n: usize, denom: u32, pos: usize, left: u32, counts: &mut [u32]) -> bool {
    if pos == n - 1 {
        counts[pos] = left;
        let feasible = rows.iter().all(|row| {
            let s: f64 = row
                .iter()
                .zip(counts.iter())
                .map(|(c, &a)| c * a as f64)
                .sum();
            s > 0.0
        });
        return feasible;
    }
    for a in 0..=left {
        counts[pos] = a;
        if scan_rec(rows, n, denom, pos + 1, left - a, counts) {
            return true;
        }
    }
    false
}

/// Domination pruning. `x` is forced before `y` in every cube ordering when
/// `x` dominates `y`, unless some map ties the two ratios exactly and `y` has
/// the smaller coordinate index (the one case where the tie conventions can
/// place `y` first).
pub fn forced_before(sys: &SpongeSystem, x: usize, y: usize) -> bool {
    sys.dominates(x, y) && (x < y || !sys.has_tied_ratio_pair(x, y))
}

/// All orderings consistent with the forced-precedence relation.
pub fn domination_upper_set(sys: &SpongeSystem) -> Vec<Perm> {
    let d = sys.dimension();
    let mut forced = Vec::new();
    for x in 0..d {
        for y in 0..d {
            if x != y && forced_before(sys, x, y) {
                forced.push((x, y));
            }
        }
    }
    Perm::all(d)
        .into_iter()
        .filter(|sigma| {
            forced
                .iter()
                .all(|&(x, y)| sigma.position(x) < sigma.position(y))
        })
        .collect()
}

/// Bounded witness-search configuration.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Longest prefix enumerated (and multiset size for frequency words).
    pub max_prefix_len: usize,
    /// Geometric grid points added between the extreme stopping endpoints.
    pub scale_grid_size: usize,
    /// Cap on the raw word enumeration (N^len <= budget chooses len).
    pub raw_word_budget: usize,
    /// Cap on (word, scale) ordering evaluations.
    pub eval_budget: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_prefix_len: 12,
            scale_grid_size: 64,
            raw_word_budget: 4096,
            eval_budget: 2_000_000,
        }
    }
}

/// Deterministic bounded search for cube-ordering witnesses. Candidate words
/// are raw cycles, two-letter `a^m b^inf` families and letter-frequency
/// cycles; candidate scales are the exact stopping-interval endpoints of each
/// word plus a dyadic geometric grid. Every hit is re-verified through
/// `cube_ordering` before being recorded.
pub fn search_cube_witnesses(
    sys: &SpongeSystem,
    cfg: &SearchConfig,
) -> BTreeMap<Perm, (WordSpec, Rat)> {
    let n = sys.map_count();
    let mut words: Vec<WordSpec> = Vec::new();

    // raw cycles of the longest affordable length
    let mut len_raw = 0usize;
    while len_raw < cfg.max_prefix_len && n.pow(len_raw as u32 + 1) <= cfg.raw_word_budget {
        len_raw += 1;
    }
    if len_raw > 0 {
        let mut word = vec![0usize; len_raw];
        loop {
            words.push(WordSpec::cycle_of(word.clone()));
            let mut pos = len_raw;
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
    // a^m b^inf transients
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            for m in 1..=cfg.max_prefix_len {
                words.push(WordSpec::new(vec![a; m], vec![b]));
            }
        }
    }
    // letter-frequency cycles (all compositions of sizes up to the cap)
    for k in 1..=cfg.max_prefix_len {
        let mut counts = vec![0usize; n];
        compositions(k, 0, &mut counts, &mut |c: &[usize]| {
            let mut letters = Vec::with_capacity(k);
            for (letter, &m) in c.iter().enumerate() {
                letters.extend(std::iter::repeat(letter).take(m));
            }
            words.push(WordSpec::cycle_of(letters));
        });
    }

    let mut found: BTreeMap<Perm, (WordSpec, Rat)> = BTreeMap::new();
    let mut evals = 0usize;
    let depth_cap = cfg.max_prefix_len + 24;
    let d = sys.dimension();

    'outer: for w in &words {
        // prefix products to the depth cap
        let mut prods: Vec<Vec<Rat>> = vec![Vec::with_capacity(depth_cap); d];
        let mut cur = vec![Rat::one(); d];
        for pos in 0..depth_cap {
            let letter = w.letter(pos);
            for c in 0..d {
                cur[c] *= sys.ratio(letter, c);
                prods[c].push(cur[c].clone());
            }
        }
        // candidate scales: every endpoint product, plus a dyadic grid
        let mut scales: BTreeSet<Rat> = BTreeSet::new();
        for c in 0..d {
            for pr in &prods[c] {
                scales.insert(pr.clone());
            }
        }
        let lo = ln_rat_f64(scales.iter().next().unwrap());
        let hi = ln_rat_f64(scales.iter().next_back().unwrap());
        for g in 0..cfg.scale_grid_size {
            let t = (g as f64 + 0.5) / cfg.scale_grid_size as f64;
            let x = (hi + t * (lo - hi)).exp();
            if let Some(rx) = dyadic_from_f64(x) {
                if rx > Rat::zero() && rx < Rat::one() {
                    scales.insert(rx);
                }
            }
        }
        for r in scales.iter().rev() {
            evals += 1;
            if evals > cfg.eval_budget {
                break 'outer;
            }
            let Some(sigma) = ordering_from_products(&prods, r) else {
                continue;
            };
            found
                .entry(sigma)
                .or_insert_with(|| (w.clone(), r.clone()));
        }
    }
    // re-verify every certificate through the primary path
    found.retain(|sigma, (w, r)| &cube_ordering(sys, w, r) == sigma);
    found
}

fn compositions(total: usize, pos: usize, counts: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    let n = counts.len();
    if pos == n - 1 {
        counts[pos] = total;
        f(counts);
        return;
    }
    for take in 0..=total {
        counts[pos] = take;
        compositions(total - take, pos + 1, counts, f);
    }
}

/// Cube ordering from precomputed prefix products; `None` when some
/// coordinate does not stop within the cached depth.
fn ordering_from_products(prods: &[Vec<Rat>], r: &Rat) -> Option<Perm> {
    let d = prods.len();
    let mut stops = vec![0usize; d];
    for c in 0..d {
        // products are strictly decreasing; find first index with prod <= r
        let list = &prods[c];
        if list.last()? > r {
            return None;
        }
        let (mut lo, mut hi) = (0usize, list.len() - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if list[mid] <= *r {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        stops[c] = lo + 1;
    }
    let mut coords: Vec<usize> = (0..d).collect();
    coords.sort_by(|&a, &b| {
        stops[b]
            .cmp(&stops[a])
            .then_with(|| {
                let l = stops[a];
                prods[b][l - 1].cmp(&prods[a][l - 1])
            })
            .then(a.cmp(&b))
    });
    Perm::new(coords)
}

/// Compute the full ordering-set report.
pub fn compute_ordering_sets(
    sys: &SpongeSystem,
    cfg: &SearchConfig,
) -> Result<OrderingSets, OrderingError> {
    let d = sys.dimension();
    let upper = domination_upper_set(sys);
    let mut cylinder = Vec::new();
    for sigma in &upper {
        if let Some(cert) = cylinder_membership(sys, sigma)? {
            cylinder.push((sigma.clone(), cert));
        }
    }
    let mut cube_lower: Vec<(Perm, OrderingCertificate)> = cylinder
        .iter()
        .map(|(s, c)| {
            (
                s.clone(),
                OrderingCertificate::CylinderStrict { p: c.p.clone(), slack: c.slack },
            )
        })
        .collect();
    let exact;
    if d <= 3 {
        exact = true;
    } else {
        let found = search_cube_witnesses(sys, cfg);
        for (sigma, (word, scale)) in found {
            if !cube_lower.iter().any(|(s, _)| s == &sigma) {
                cube_lower.push((sigma, OrderingCertificate::Cube { word, scale }));
            }
        }
        cube_lower.sort_by(|(a, _), (b, _)| a.cmp(b));
        let lower_perms: BTreeSet<&Perm> = cube_lower.iter().map(|(s, _)| s).collect();
        exact = upper.iter().all(|s| lower_perms.contains(s));
    }
    debug_assert!(cube_lower.iter().all(|(s, _)| upper.contains(s)));
    Ok(OrderingSets { cylinder, cube_lower, cube_upper: upper, exact })
}

/// Result of the two-map four-dimensional membership criterion.
#[derive(Debug, Clone)]
pub struct TwoMapCriterion {
    /// The strict log-ratio inequality between the two maps' side gaps.
    pub condition_holds: bool,
    /// `(1,2,3,4)` is a strict-cylinder ordering.
    pub forward_feasible: bool,
    /// `(2,1,4,3)` is a strict-cylinder ordering.
    pub reverse_feasible: bool,
    pub lhs: f64,
    pub rhs: f64,
    /// Open interval of first-map weights witnessing the forward ordering
    /// (empty when the condition fails).
    pub p_interval: (f64, f64),
}

/// Exact evaluation of the two-map criterion: for a four-dimensional system
/// of two maps ordered `(2,1,3,4)` and `(1,2,4,3)`, the forward ordering
/// `(1,2,3,4)` is feasible iff
/// `ln(l1^(2)/l1^(1)) / ln(l1^(3)/l1^(4)) < ln(l2^(1)/l2^(2)) / ln(l2^(4)/l2^(3))`,
/// and the reverse ordering `(2,1,4,3)` is feasible iff the inequality is
/// reversed. Decided in certified interval arithmetic.
pub fn two_map_four_dim_criterion(sys: &SpongeSystem) -> Result<TwoMapCriterion, OrderingError> {
    if sys.dimension() != 4 || sys.map_count() != 2 {
        return Err(OrderingError::Precondition(
            "criterion needs a four-dimensional system with exactly two maps".into(),
        ));
    }
    let strictly_ordered = |map: usize, order: [usize; 4]| -> bool {
        (0..3).all(|k| sys.ratio(map, order[k]) > sys.ratio(map, order[k + 1]))
    };
    if !strictly_ordered(0, [1, 0, 2, 3]) || !strictly_ordered(1, [0, 1, 3, 2]) {
        return Err(OrderingError::Precondition(
            "maps must be strictly (2,1,3,4)- and (1,2,4,3)-ordered".into(),
        ));
    }
    let q = |m: usize, a: usize, b: usize| sys.ratio(m, a) / sys.ratio(m, b);
    let a = q(0, 1, 0); // l1^(2)/l1^(1) > 1
    let b = q(0, 2, 3); // l1^(3)/l1^(4) > 1
    let c = q(1, 0, 1); // l2^(1)/l2^(2) > 1
    let e = q(1, 3, 2); // l2^(4)/l2^(3) > 1
    let mut decided = None;
    for prec in [64u32, 128, 512] {
        let lhs = ln_interval(&a, prec).mul(&ln_interval(&e, prec));
        let rhs = ln_interval(&c, prec).mul(&ln_interval(&b, prec));
        match lhs.strictly_less(&rhs) {
            Some(v) => {
                decided = Some(v);
                break;
            }
            None => continue,
        }
    }
    let Some(condition_holds) = decided else {
        return Err(OrderingError::Borderline {
            sigma: "(1,2,3,4)".into(),
            slack: 0.0,
        });
    };
    let lhs = ln_rat_f64(&a) / ln_rat_f64(&b);
    let rhs = ln_rat_f64(&c) / ln_rat_f64(&e);
    // open p-interval for the forward ordering, from the two strict gaps
    let lo = ln_rat_f64(&e) / ln_rat_f64(&(q(1, 3, 2) * q(0, 2, 3)));
    let hi = ln_rat_f64(&c) / ln_rat_f64(&(q(1, 0, 1) * q(0, 1, 0)));
    Ok(TwoMapCriterion {
        condition_holds,
        forward_feasible: condition_holds,
        reverse_feasible: !condition_holds,
        lhs,
        rhs,
        p_interval: (lo, hi),
    })
}

/// Closure property on dominated three-dimensional systems: whenever
/// `(x,y,z)` and `(z,x,y)` are cube orderings and `x` dominates `y`, then
/// `(x,z,y)` must be one as well. Returns whether every applicable instance
/// holds (vacuously true when none applies).
pub fn dominated_triple_closure(sys: &SpongeSystem, sets: &OrderingSets) -> Result<bool, OrderingError> {
    if sys.dimension() != 3 {
        return Err(OrderingError::Precondition(
            "closure check applies to three-dimensional systems".into(),
        ));
    }
    let perms: BTreeSet<Perm> = sets.cube_lower_perms().into_iter().collect();
    let has = |coords: [usize; 3]| perms.contains(&Perm::new(coords.to_vec()).unwrap());
    for x in 0..3 {
        for y in 0..3 {
            if x == y || !sys.dominates(x, y) {
                continue;
            }
            let z = 3 - x - y;
            if has([x, y, z]) && has([z, x, y]) && !has([x, z, y]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AffineMapSpec, RawSponge};
    use crate::rational::rat;

    fn sys_from(ratios: Vec<Vec<Rat>>) -> SpongeSystem {
        // stack maps along the main diagonal so separation never fails validation
        let n = ratios.len();
        let d = ratios[0].len();
        let maps = ratios
            .into_iter()
            .enumerate()
            .map(|(i, rs)| {
                let t = (0..d)
                    .map(|_| Rat::new(i.into(), n.into()) * rat(1, 2))
                    .collect();
                AffineMapSpec::new(rs, t)
            })
            .collect();
        SpongeSystem::validate(&RawSponge { dimension: d, maps, weights: None }).unwrap()
    }

    fn four_dim() -> SpongeSystem {
        sys_from(vec![
            vec![rat(1, 5), rat(2, 5), rat(2, 25), rat(1, 50)],
            vec![rat(3, 5), rat(3, 10), rat(1, 10), rat(1, 5)],
        ])
    }

    #[test]
    fn cube_ordering_of_four_dim_witness() {
        let sys = four_dim();
        let w = WordSpec::new(vec![0, 0, 0, 0], vec![1]);
        let sigma = cube_ordering(&sys, &w, &rat(1, 20000));
        assert_eq!(sigma, Perm::new(vec![0, 1, 2, 3]).unwrap());
    }

    #[test]
    fn cube_ordering_breaks_ties_by_product_then_index() {
        // constant word with lambda = (1/2, 1/2, 1/4); distinguishability via a second map
        let sys = sys_from(vec![
            vec![rat(1, 2), rat(1, 2), rat(1, 4)],
            vec![rat(1, 3), rat(1, 5), rat(1, 7)],
        ]);
        let sigma = cube_ordering(&sys, &WordSpec::constant(0), &rat(1, 4));
        assert_eq!(sigma, Perm::new(vec![0, 1, 2]).unwrap());
    }

    #[test]
    fn strict_cylinder_ordering_of_second_map() {
        let sys = four_dim();
        let w = WordSpec::constant(1);
        let r = rat(3, 20); // 0.15: products at K=1 are (0.6, 0.3, 0.1, 0.2)
        let sigma = strict_cylinder_ordering(&sys, &w, &r).unwrap();
        assert_eq!(sigma, Perm::new(vec![0, 1, 3, 2]).unwrap());
    }

    #[test]
    fn strict_cylinder_rejects_ties() {
        let sys = sys_from(vec![
            vec![rat(1, 2), rat(1, 2), rat(1, 4)],
            vec![rat(1, 3), rat(1, 5), rat(1, 7)],
        ]);
        assert_eq!(strict_cylinder_ordering(&sys, &WordSpec::constant(0), &rat(1, 4)), None);
    }

    #[test]
    fn forward_ordering_is_feasible_for_four_dim_example() {
        let sys = four_dim();
        let crit = two_map_four_dim_criterion(&sys).unwrap();
        assert!(crit.condition_holds);
        assert!((crit.lhs - 0.5).abs() < 1e-12);
        assert!((crit.rhs - 1.0).abs() < 1e-12);
        assert!((crit.p_interval.0 - 1.0 / 3.0).abs() < 1e-9);
        assert!((crit.p_interval.1 - 0.5).abs() < 1e-9);

        let sigma = Perm::new(vec![0, 1, 2, 3]).unwrap();
        let cert = cylinder_membership(&sys, &sigma).unwrap().unwrap();
        assert!(cert.slack > 0.0);
        let p0 = crate::rational::rat_to_f64(&cert.p[0]);
        assert!(p0 > 1.0 / 3.0 && p0 < 0.5, "witness p(1) = {p0}");
        assert_eq!(certified_strict_chain(&sys, &cert.p, &sigma), Some(true));

        // reversed ordering is infeasible
        let rev = Perm::new(vec![1, 0, 3, 2]).unwrap();
        assert!(cylinder_membership(&sys, &rev).unwrap().is_none());
    }

    #[test]
    fn domination_prunes_upper_set() {
        let sys = four_dim();
        let upper = domination_upper_set(&sys);
        // coordinates 3 and 4 are dominated by 1 and 2
        let expected: BTreeSet<Perm> = [
            vec![1, 0, 2, 3],
            vec![0, 1, 3, 2],
            vec![1, 0, 3, 2],
            vec![0, 1, 2, 3],
        ]
        .into_iter()
        .map(|v| Perm::new(v).unwrap())
        .collect();
        let got: BTreeSet<Perm> = upper.into_iter().collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn ordering_sets_on_four_dim_example() {
        let sys = four_dim();
        let sets = compute_ordering_sets(&sys, &SearchConfig::default()).unwrap();
        let lower = sets.cube_lower_perms();
        assert!(lower.contains(&Perm::new(vec![0, 1, 2, 3]).unwrap()));
        assert!(sets.cube_upper.len() == 4);
        for (s, _) in &sets.cube_lower {
            assert!(sets.cube_upper.contains(s));
        }
    }

    #[test]
    fn scan_agrees_with_lp_on_small_system() {
        let sys = sys_from(vec![
            vec![rat(1, 2), rat(1, 5)],
            vec![rat(1, 5), rat(1, 2)],
        ]);
        for sigma in Perm::all(2) {
            let lp = cylinder_membership(&sys, &sigma).unwrap();
            let scan = scan_feasibility(&sys, &sigma, 50);
            assert_eq!(lp.is_some(), scan.is_some(), "sigma {}", sigma);
        }
    }
}
