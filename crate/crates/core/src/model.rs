//! The sponge model: diagonal affine maps on the unit cube with exact data.

use crate::rational::{format_rational, Rat};
use num_traits::Zero;
use serde::Serialize;

/// One diagonal affine contraction `x -> diag(ratios) * x + translation`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMapSpec {
    pub ratios: Vec<Rat>,
    pub translation: Vec<Rat>,
}

impl AffineMapSpec {
    pub fn new(ratios: Vec<Rat>, translation: Vec<Rat>) -> Self {
        AffineMapSpec { ratios, translation }
    }
}

/// Unvalidated sponge description as read from a spec file.
#[derive(Debug, Clone)]
pub struct RawSponge {
    pub dimension: usize,
    pub maps: Vec<AffineMapSpec>,
    pub weights: Option<Vec<Rat>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error, Serialize)]
pub enum ValidationError {
    #[error("system has no maps")]
    EmptySystem,
    #[error("map {map}: ratio in coordinate {coord} is outside (0,1)")]
    RatioOutOfRange { map: usize, coord: usize },
    #[error("map {map}: image escapes the unit cube in coordinate {coord}")]
    EscapesUnitCube { map: usize, coord: usize },
    #[error("maps {first} and {second} are identical affine maps")]
    DuplicateMap { first: usize, second: usize },
    #[error("coordinates {a} and {b} are indistinguishable (equal ratios in every map)")]
    IndistinguishableCoordinates { a: usize, b: usize },
    #[error("map {map}: expected {expected} components, found {found}")]
    WrongArity { map: usize, expected: usize, found: usize },
}

/// A validated sponge system. Immutable after construction; all derived
/// structures borrow it freely across threads.
#[derive(Debug, Clone)]
pub struct SpongeSystem {
    dimension: usize,
    maps: Vec<AffineMapSpec>,
}

impl SpongeSystem {
    /// Validates every invariant and returns either the system or the full
    /// list of violations. Map and coordinate indices in errors are 1-based
    /// to match the spec-file layout.
    pub fn validate(raw: &RawSponge) -> Result<SpongeSystem, Vec<ValidationError>> {
        let mut errors = Vec::new();
        let d = raw.dimension;
        if raw.maps.is_empty() || d == 0 {
            errors.push(ValidationError::EmptySystem);
            return Err(errors);
        }
        for (i, m) in raw.maps.iter().enumerate() {
            if m.ratios.len() != d || m.translation.len() != d {
                errors.push(ValidationError::WrongArity {
                    map: i + 1,
                    expected: d,
                    found: m.ratios.len().max(m.translation.len()),
                });
                continue;
            }
            for n in 0..d {
                let lam = &m.ratios[n];
                let t = &m.translation[n];
                if !(lam > &Rat::zero() && lam < &Rat::from_integer(1.into())) {
                    errors.push(ValidationError::RatioOutOfRange { map: i + 1, coord: n + 1 });
                } else if t < &Rat::zero() || t + lam > Rat::from_integer(1.into()) {
                    errors.push(ValidationError::EscapesUnitCube { map: i + 1, coord: n + 1 });
                }
            }
        }
        if !errors.is_empty() {
            return Err(errors);
        }
        for i in 0..raw.maps.len() {
            for j in (i + 1)..raw.maps.len() {
                if raw.maps[i] == raw.maps[j] {
                    errors.push(ValidationError::DuplicateMap { first: i + 1, second: j + 1 });
                }
            }
        }
        for a in 0..d {
            for b in (a + 1)..d {
                let distinguishable = raw.maps.iter().any(|m| m.ratios[a] != m.ratios[b]);
                if !distinguishable {
                    errors.push(ValidationError::IndistinguishableCoordinates { a: a + 1, b: b + 1 });
                }
            }
        }
        if errors.is_empty() {
            Ok(SpongeSystem {
                dimension: d,
                maps: raw.maps.clone(),
            })
        } else {
            Err(errors)
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn map_count(&self) -> usize {
        self.maps.len()
    }

    pub fn maps(&self) -> &[AffineMapSpec] {
        &self.maps
    }

    pub fn ratio(&self, map: usize, coord: usize) -> &Rat {
        &self.maps[map].ratios[coord]
    }

    pub fn translation(&self, map: usize, coord: usize) -> &Rat {
        &self.maps[map].translation[coord]
    }

    /// Smallest contraction ratio over all maps and coordinates.
    pub fn lambda_min(&self) -> Rat {
        self.maps
            .iter()
            .flat_map(|m| m.ratios.iter())
            .min()
            .expect("validated system is nonempty")
            .clone()
    }

    /// Largest contraction ratio over all maps and coordinates.
    pub fn lambda_max(&self) -> Rat {
        self.maps
            .iter()
            .flat_map(|m| m.ratios.iter())
            .max()
            .expect("validated system is nonempty")
            .clone()
    }

    /// Coordinate `x` dominates coordinate `y`: every map contracts `y` at
    /// least as strongly as `x`.
    pub fn dominates(&self, x: usize, y: usize) -> bool {
        debug_assert_ne!(x, y);
        self.maps.iter().all(|m| m.ratios[y] <= m.ratios[x])
    }

    /// True when some map has equal ratios in coordinates `x` and `y`.
    /// Such maps let stopping times and side products tie exactly, which is
    /// the one case where domination does not pin the cube-ordering of a pair.
    pub fn has_tied_ratio_pair(&self, x: usize, y: usize) -> bool {
        self.maps.iter().any(|m| m.ratios[x] == m.ratios[y])
    }

    /// The coordinate ordering condition: a single permutation sorts the
    /// ratio vector of every map simultaneously (weakly).
    pub fn coordinate_ordering_condition(&self) -> Option<crate::projection::Perm> {
        for sigma in crate::projection::Perm::all(self.dimension) {
            let ok = self.maps.iter().all(|m| {
                (0..self.dimension.saturating_sub(1))
                    .all(|k| m.ratios[sigma.coord(k)] >= m.ratios[sigma.coord(k + 1)])
            });
            if ok {
                return Some(sigma);
            }
        }
        None
    }

    /// Power system whose maps are all `len`-fold compositions, ordered
    /// lexicographically by the composing word. Exact-overlap duplicates are
    /// expected and deliberately kept (index `k` corresponds to the word with
    /// digits of `k` in base `N`).
    pub fn power_system(&self, len: usize) -> SpongeSystem {
        assert!(len >= 1);
        let d = self.dimension;
        let n = self.map_count();
        let mut maps = Vec::with_capacity(n.pow(len as u32));
        let mut word = vec![0usize; len];
        loop {
            let mut ratios = vec![Rat::from_integer(1.into()); d];
            let mut translation = vec![Rat::zero(); d];
            // f_{w1} o ... o f_{wk}: fold from the right
            for &letter in word.iter().rev() {
                for c in 0..d {
                    translation[c] = &self.maps[letter].ratios[c] * &translation[c]
                        + &self.maps[letter].translation[c];
                    ratios[c] = &ratios[c] * &self.maps[letter].ratios[c];
                }
            }
            maps.push(AffineMapSpec::new(ratios, translation));
            // next word
            let mut pos = len;
            loop {
                if pos == 0 {
                    return SpongeSystem { dimension: d, maps };
                }
                pos -= 1;
                word[pos] += 1;
                if word[pos] < n {
                    break;
                }
                word[pos] = 0;
            }
        }
    }

    /// Human-readable echo of the map table, used in text reports.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        for (i, m) in self.maps.iter().enumerate() {
            let ratios: Vec<String> = m.ratios.iter().map(format_rational).collect();
            let trans: Vec<String> = m.translation.iter().map(format_rational).collect();
            out.push_str(&format!(
                "map {}: ratios ({}) translation ({})\n",
                i + 1,
                ratios.join(", "),
                trans.join(", ")
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn map(rs: &[(i64, i64)], ts: &[(i64, i64)]) -> AffineMapSpec {
        AffineMapSpec::new(
            rs.iter().map(|&(n, d)| rat(n, d)).collect(),
            ts.iter().map(|&(n, d)| rat(n, d)).collect(),
        )
    }

    pub(crate) fn shrunk_carpet() -> RawSponge {
        RawSponge {
            dimension: 2,
            maps: vec![
                map(&[(9, 20), (1, 5)], &[(0, 1), (0, 1)]),
                map(&[(9, 20), (1, 5)], &[(0, 1), (1, 2)]),
                map(&[(9, 20), (1, 5)], &[(11, 20), (0, 1)]),
            ],
            weights: None,
        }
    }

    #[test]
    fn accepts_valid_three_map_system() {
        assert!(SpongeSystem::validate(&shrunk_carpet()).is_ok());
    }

    #[test]
    fn rejects_indistinguishable_coordinates() {
        let raw = RawSponge {
            dimension: 2,
            maps: vec![
                map(&[(1, 2), (1, 2)], &[(0, 1), (0, 1)]),
                map(&[(1, 3), (1, 3)], &[(1, 2), (1, 2)]),
            ],
            weights: None,
        };
        let errs = SpongeSystem::validate(&raw).unwrap_err();
        assert_eq!(
            errs,
            vec![ValidationError::IndistinguishableCoordinates { a: 1, b: 2 }]
        );
    }

    #[test]
    fn rejects_escaping_map() {
        let raw = RawSponge {
            dimension: 1,
            maps: vec![map(&[(1, 2)], &[(3, 4)])],
            weights: None,
        };
        let errs = SpongeSystem::validate(&raw).unwrap_err();
        assert!(errs.contains(&ValidationError::EscapesUnitCube { map: 1, coord: 1 }));
    }

    #[test]
    fn rejects_duplicates_and_empty() {
        let raw = RawSponge {
            dimension: 2,
            maps: vec![
                map(&[(1, 2), (1, 3)], &[(0, 1), (0, 1)]),
                map(&[(1, 2), (1, 3)], &[(0, 1), (0, 1)]),
            ],
            weights: None,
        };
        let errs = SpongeSystem::validate(&raw).unwrap_err();
        assert!(errs.contains(&ValidationError::DuplicateMap { first: 1, second: 2 }));

        let empty = RawSponge { dimension: 2, maps: vec![], weights: None };
        assert_eq!(
            SpongeSystem::validate(&empty).unwrap_err(),
            vec![ValidationError::EmptySystem]
        );
    }

    #[test]
    fn domination_matches_examples() {
        // Bedford-McMullen style 2x4 grid carpet
        let raw = RawSponge {
            dimension: 2,
            maps: vec![
                map(&[(1, 2), (1, 4)], &[(0, 1), (0, 1)]),
                map(&[(1, 2), (1, 4)], &[(0, 1), (1, 2)]),
                map(&[(1, 2), (1, 4)], &[(1, 2), (0, 1)]),
            ],
            weights: None,
        };
        let sys = SpongeSystem::validate(&raw).unwrap();
        assert!(sys.dominates(0, 1));
        assert!(!sys.dominates(1, 0));

        let baranski = RawSponge {
            dimension: 2,
            maps: vec![
                map(&[(1, 2), (1, 5)], &[(0, 1), (0, 1)]),
                map(&[(1, 5), (1, 2)], &[(1, 2), (1, 2)]),
            ],
            weights: None,
        };
        let sys = SpongeSystem::validate(&baranski).unwrap();
        assert!(!sys.dominates(0, 1));
        assert!(!sys.dominates(1, 0));
    }

    #[test]
    fn power_system_composes_affine_maps() {
        let sys = SpongeSystem::validate(&shrunk_carpet()).unwrap();
        let sq = sys.power_system(2);
        assert_eq!(sq.map_count(), 9);
        // word (3,1): f_3 o f_1 at index 2*3+0 = 6
        let m = &sq.maps()[6];
        assert_eq!(m.ratios[0], rat(81, 400));
        // t = lambda_3^(1) * t_1^(1) + t_3^(1) = (9/20)*0 + 11/20
        assert_eq!(m.translation[0], rat(11, 20));
    }
}
