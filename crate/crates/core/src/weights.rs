//! Projected and conditional weights along a projection chain.
//!
//! Weight arithmetic is generic over the scalar: exact rationals for given
//! probability vectors (where the consistency identity must hold exactly)
//! and f64 for the coordinate-wise natural measures, whose entries are
//! algebraic but not rational.

use crate::model::SpongeSystem;
use crate::projection::ProjectionStructure;
use crate::rational::{format_rational, ln_rat_f64, rat_to_f64, Rat};
use num_traits::{One, Zero};

pub trait WeightScalar: Clone + PartialEq + PartialOrd + std::fmt::Debug {
    const EXACT: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn from_rat(r: &Rat) -> Self;
    fn ln64(&self) -> f64;
    fn is_pos(&self) -> bool;
    fn close_to(&self, other: &Self, tol: f64) -> bool;
    /// JSON form: exact scalars as `p/q` strings, floats as rounded numbers.
    fn json_value(&self) -> serde_json::Value;
}

impl WeightScalar for Rat {
    const EXACT: bool = true;
    fn zero() -> Self {
        <Rat as Zero>::zero()
    }
    fn one() -> Self {
        <Rat as One>::one()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
    fn ln64(&self) -> f64 {
        ln_rat_f64(self)
    }
    fn is_pos(&self) -> bool {
        self > &<Rat as Zero>::zero()
    }
    fn close_to(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
    fn json_value(&self) -> serde_json::Value {
        serde_json::Value::String(format_rational(self))
    }
}

impl WeightScalar for f64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn from_rat(r: &Rat) -> Self {
        rat_to_f64(r)
    }
    fn ln64(&self) -> f64 {
        self.ln()
    }
    fn is_pos(&self) -> bool {
        *self > 0.0
    }
    fn close_to(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }
    fn json_value(&self) -> serde_json::Value {
        match serde_json::Number::from_f64(crate::report::round12(*self)) {
            Some(n) => serde_json::Value::Number(n),
            None => serde_json::Value::Null,
        }
    }
}

/// Weights projected along one ordering's index chain, with the conditional
/// fibre weights.
#[derive(Debug, Clone)]
pub struct WeightSystem<T: WeightScalar> {
    p: Vec<T>,
    /// `levels[n-1][k]` = projected weight of `index_set(n)[k]`.
    levels: Vec<Vec<T>>,
    /// `conditional[n-1][k]` = weight of `index_set(n)[k]` within its fibre
    /// at level `n-1`.
    conditional: Vec<Vec<T>>,
}

impl<T: WeightScalar> WeightSystem<T> {
    /// Projects a positive probability vector along the chain. The direct sum
    /// over preimages and the fibre-recursive form are both computed and must
    /// agree (exactly for exact scalars, to 1e-12 otherwise).
    pub fn build(sys: &SpongeSystem, proj: &ProjectionStructure, p: &[T]) -> WeightSystem<T> {
        let d = sys.dimension();
        let count = sys.map_count();
        assert_eq!(p.len(), count);
        let mut levels: Vec<Vec<T>> = Vec::with_capacity(d);
        for n in 1..=d {
            let members = proj.index_set(n);
            let direct: Vec<T> = members
                .iter()
                .map(|&i| {
                    let mut acc = T::zero();
                    for j in 0..count {
                        if proj.project(n, j) == i {
                            acc = acc.add(&p[j]);
                        }
                    }
                    acc
                })
                .collect();
            levels.push(direct);
        }
        // fibre-recursive consistency: p_n(i) = sum over the fibre above i
        for n in 1..d {
            let members = proj.index_set(n);
            for (k, &i) in members.iter().enumerate() {
                let mut acc = T::zero();
                for (k2, &j) in proj.index_set(n + 1).iter().enumerate() {
                    if proj.project(n, j) == i {
                        acc = acc.add(&levels[n][k2]);
                    }
                }
                assert!(
                    acc.close_to(&levels[n - 1][k], 1e-12),
                    "projected-weight consistency failed at level {n}"
                );
            }
        }
        let mut conditional: Vec<Vec<T>> = Vec::with_capacity(d);
        for n in 1..=d {
            let members = proj.index_set(n);
            let cond = members
                .iter()
                .enumerate()
                .map(|(k, &i)| {
                    if n == 1 {
                        levels[0][k].clone()
                    } else {
                        let parent = proj.project(n - 1, i);
                        let kp = proj
                            .index_set(n - 1)
                            .iter()
                            .position(|&x| x == parent)
                            .expect("parent in chain");
                        levels[n - 1][k].div(&levels[n - 2][kp])
                    }
                })
                .collect();
            conditional.push(cond);
        }
        WeightSystem { p: p.to_vec(), levels, conditional }
    }

    pub fn base(&self) -> &[T] {
        &self.p
    }

    /// Projected weight `p_n(i)` for `i` in `I_n` (given as a map index).
    pub fn level_weight(&self, proj: &ProjectionStructure, n: usize, i: usize) -> &T {
        let k = proj
            .index_set(n)
            .iter()
            .position(|&x| x == i)
            .expect("index in level set");
        &self.levels[n - 1][k]
    }

    /// Conditional weight `P_{n-1}(i)` for `i` in `I_n`.
    pub fn conditional(&self, proj: &ProjectionStructure, n: usize, i: usize) -> &T {
        let k = proj
            .index_set(n)
            .iter()
            .position(|&x| x == i)
            .expect("index in level set");
        &self.conditional[n - 1][k]
    }

    pub fn level_slice(&self, n: usize) -> &[T] {
        &self.levels[n - 1]
    }

    pub fn conditional_slice(&self, n: usize) -> &[T] {
        &self.conditional[n - 1]
    }
}

/// Uniform rational weights on the maps.
pub fn uniform_weights(count: usize) -> Vec<Rat> {
    vec![Rat::new(1.into(), count.into()); count]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AffineMapSpec, RawSponge};
    use crate::projection::Perm;
    use crate::rational::rat;

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
    fn uniform_weights_project_onto_columns() {
        let sys = bm_2x4();
        let proj = ProjectionStructure::build(&sys, Perm::identity(2));
        let w = WeightSystem::build(&sys, &proj, &uniform_weights(3));
        assert_eq!(w.level_weight(&proj, 1, 0), &rat(2, 3));
        assert_eq!(w.level_weight(&proj, 1, 2), &rat(1, 3));
        assert_eq!(w.conditional(&proj, 2, 0), &rat(1, 2));
        assert_eq!(w.conditional(&proj, 2, 1), &rat(1, 2));
        assert_eq!(w.conditional(&proj, 2, 2), &rat(1, 1));
        assert_eq!(w.conditional(&proj, 1, 0), &rat(2, 3));
    }

    #[test]
    fn single_map_weights_are_all_one() {
        let sys = SpongeSystem::validate(&RawSponge {
            dimension: 2,
            maps: vec![AffineMapSpec::new(vec![rat(1, 2), rat(1, 3)], vec![rat(0, 1), rat(0, 1)])],
            weights: None,
        })
        .unwrap();
        let proj = ProjectionStructure::build(&sys, Perm::identity(2));
        let w = WeightSystem::build(&sys, &proj, &uniform_weights(1));
        assert_eq!(w.level_weight(&proj, 1, 0), &rat(1, 1));
        assert_eq!(w.conditional(&proj, 2, 0), &rat(1, 1));
    }

    #[test]
    fn float_weights_follow_the_same_chain() {
        let sys = bm_2x4();
        let proj = ProjectionStructure::build(&sys, Perm::identity(2));
        let w = WeightSystem::build(&sys, &proj, &[0.25f64, 0.25, 0.5]);
        assert!((w.level_weight(&proj, 1, 0) - 0.5).abs() < 1e-15);
        assert!((w.conditional(&proj, 2, 1) - 0.5).abs() < 1e-15);
    }
}
