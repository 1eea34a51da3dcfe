//! Command orchestration shared by the CLI and the C ABI: parse, validate,
//! orderings, weights, bounds, oracle, report.

use crate::cubes::{brute_force_cube_measure, cube_measure, weight_table, BruteForceCaps};
use crate::dimension::{
    all_projections, bound_table, natural_measure, natural_measure_identity_check, DimensionBounds,
};
use crate::gap::{gap_certificate, minimize_assouad_over_p, GapBudget, GapError};
use crate::model::{RawSponge, SpongeSystem};
use crate::orderings::{
    compute_ordering_sets, two_map_four_dim_criterion, OrderingCertificate, OrderingError,
    OrderingSets, SearchConfig,
};
use crate::projection::{Perm, ProjectionStructure};
use crate::rational::{format_rational, Rat};
use crate::render::{render_svg, RenderError};
use crate::report::*;
use crate::sampler::{sample_ratio_exponents, SamplerConfig};
use crate::separation::{check_separation, SeparationReport};
use crate::spec_io::{file_from_raw, parse_spec};
use crate::weights::{uniform_weights, WeightScalar, WeightSystem};
use crate::words::WordSpec;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeasureChoice {
    Given,
    Uniform,
    Natural(Perm),
}

impl MeasureChoice {
    pub fn parse(s: &str) -> Option<MeasureChoice> {
        match s {
            "given" => Some(MeasureChoice::Given),
            "uniform" => Some(MeasureChoice::Uniform),
            other => {
                let rest = other.strip_prefix("natural:")?;
                Perm::parse(rest).map(MeasureChoice::Natural)
            }
        }
    }

    fn label(&self) -> String {
        match self {
            MeasureChoice::Given => "given".into(),
            MeasureChoice::Uniform => "uniform".into(),
            MeasureChoice::Natural(s) => format!("natural:{}", s.display()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    Off,
    Quick,
    Full,
}

impl OracleMode {
    pub fn parse(s: &str) -> Option<OracleMode> {
        match s {
            "off" => Some(OracleMode::Off),
            "quick" => Some(OracleMode::Quick),
            "full" => Some(OracleMode::Full),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DimsOptions {
    pub measure: MeasureChoice,
    pub seed: u64,
    pub oracle: OracleMode,
    pub formula_only: bool,
}

impl Default for DimsOptions {
    fn default() -> Self {
        DimsOptions {
            measure: MeasureChoice::Uniform,
            seed: 0,
            oracle: OracleMode::Quick,
            formula_only: false,
        }
    }
}

/// A finished command: the report plus its process exit code.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: RunReport,
    pub exit: i32,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_SEPARATION: i32 = 4;
pub const EXIT_NOT_APPLICABLE: i32 = 5;

fn parse_stage(command: &str, text: &str) -> Result<(RawSponge, RunReport), Outcome> {
    let mut report = RunReport::new(command);
    match parse_spec(text) {
        Ok(raw) => {
            report.input = Some(file_from_raw(&raw));
            Ok((raw, report))
        }
        Err(e) => {
            report.validation.errors.push(e.to_string());
            Err(Outcome { report, exit: EXIT_PARSE })
        }
    }
}

fn validate_stage(mut report: RunReport, raw: &RawSponge) -> Result<(SpongeSystem, RunReport), Outcome> {
    match SpongeSystem::validate(raw) {
        Ok(sys) => {
            report.validation.valid = true;
            Ok((sys, report))
        }
        Err(errors) => {
            report.validation.errors = errors.iter().map(|e| e.to_string()).collect();
            Err(Outcome { report, exit: EXIT_VALIDATION })
        }
    }
}

fn separation_section(sep: &SeparationReport) -> SeparationSection {
    SeparationSection {
        sppc: sep.sppc,
        very_strong: sep.very_strong,
        delta0: sep.delta0.as_ref().map(format_rational),
        failures: sep
            .failures
            .iter()
            .map(|f| {
                format!(
                    "maps {} and {} meet on the subspace of coordinates {:?}",
                    f.first, f.second, f.coords
                )
            })
            .collect(),
    }
}

fn ordering_section(sets: &OrderingSets) -> OrderingSection {
    OrderingSection {
        cylinder: sets
            .cylinder
            .iter()
            .map(|(s, c)| CylinderEntry {
                sigma: s.display(),
                witness_p: c.p.iter().map(format_rational).collect(),
                slack: Real(c.slack),
            })
            .collect(),
        cube_lower: sets
            .cube_lower
            .iter()
            .map(|(s, cert)| match cert {
                OrderingCertificate::CylinderStrict { .. } => CubeEntry {
                    sigma: s.display(),
                    kind: "cylinder-strict".into(),
                    word: None,
                    scale: None,
                },
                OrderingCertificate::Cube { word, scale } => CubeEntry {
                    sigma: s.display(),
                    kind: "cube".into(),
                    word: Some(word.to_string()),
                    scale: Some(format_rational(scale)),
                },
            })
            .collect(),
        cube_upper: sets.cube_upper.iter().map(|s| s.display()).collect(),
        exact: sets.exact,
    }
}

fn ordering_stage(
    mut report: RunReport,
    sys: &SpongeSystem,
) -> Result<(OrderingSets, RunReport), Outcome> {
    match compute_ordering_sets(sys, &SearchConfig::default()) {
        Ok(sets) => {
            report.orderings = Some(ordering_section(&sets));
            Ok((sets, report))
        }
        Err(e) => {
            report.notes.push(e.to_string());
            let exit = match e {
                OrderingError::Borderline { .. } => EXIT_INTERNAL,
                _ => EXIT_INTERNAL,
            };
            Err(Outcome { report, exit })
        }
    }
}

pub fn run_validate(text: &str) -> Outcome {
    let (raw, report) = match parse_stage("validate", text) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let (sys, mut report) = match validate_stage(report, &raw) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let sep = check_separation(&sys, &crate::orderings::domination_upper_set(&sys));
    report.separation = Some(separation_section(&sep));
    Outcome { report, exit: EXIT_OK }
}

pub fn run_orderings(text: &str) -> Outcome {
    let (raw, report) = match parse_stage("orderings", text) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let (sys, report) = match validate_stage(report, &raw) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let (sets, mut report) = match ordering_stage(report, &sys) {
        Ok(v) => v,
        Err(o) => return o,
    };
    attach_two_map_section(&mut report, &sys, &sets);
    Outcome { report, exit: EXIT_OK }
}

fn resolve_weights(
    sys: &SpongeSystem,
    projections: &BTreeMap<Perm, ProjectionStructure>,
    raw: &RawSponge,
    choice: &MeasureChoice,
) -> Result<ResolvedMeasure, String> {
    match choice {
        MeasureChoice::Uniform => Ok(ResolvedMeasure::Exact(uniform_weights(sys.map_count()))),
        MeasureChoice::Given => {
            let Some(ws) = &raw.weights else {
                return Err("measure `given` needs a weights array in the spec file".into());
            };
            if ws.len() != sys.map_count() {
                return Err("weights array length must match the number of maps".into());
            }
            let zero: Rat = num_traits::Zero::zero();
            if ws.iter().any(|w| !(w > &zero)) {
                return Err("weights must be strictly positive".into());
            }
            let total: Rat = ws.iter().cloned().sum();
            let one: Rat = num_traits::One::one();
            if total != one {
                return Err("weights must sum to exactly 1".into());
            }
            Ok(ResolvedMeasure::Exact(ws.clone()))
        }
        MeasureChoice::Natural(sigma) => {
            if sigma.len() != sys.dimension() {
                return Err("natural measure ordering has the wrong length".into());
            }
            let proj = &projections[sigma];
            match natural_measure(sys, proj) {
                Ok((q, _)) => Ok(ResolvedMeasure::Float(q)),
                Err(e) => Err(e.to_string()),
            }
        }
    }
}

enum ResolvedMeasure {
    Exact(Vec<Rat>),
    Float(Vec<f64>),
}

fn attach_two_map_section(report: &mut RunReport, sys: &SpongeSystem, sets: &OrderingSets) {
    let crit = match two_map_four_dim_criterion(sys) {
        Ok(c) => c,
        Err(OrderingError::Borderline { .. }) => {
            report
                .notes
                .push("two-map criterion is borderline for these parameters".into());
            return;
        }
        Err(_) => return,
    };
    let cyl = sets.cylinder_perms();
    let forward = Perm::new(vec![0, 1, 2, 3]).unwrap();
    let reverse = Perm::new(vec![1, 0, 3, 2]).unwrap();
    let agrees = (crit.forward_feasible == cyl.contains(&forward))
        && (crit.reverse_feasible == cyl.contains(&reverse));
    report.two_map_criterion = Some(TwoMapSection {
        lhs: Real(crit.lhs),
        rhs: Real(crit.rhs),
        condition_holds: crit.condition_holds,
        forward_feasible: crit.forward_feasible,
        reverse_feasible: crit.reverse_feasible,
        p_interval: (Real(crit.p_interval.0), Real(crit.p_interval.1)),
        agrees_with_feasibility: agrees,
    });
    if crit.forward_feasible {
        report.notes.push(format!(
            "two-map criterion: the log-ratio condition holds ({:.6} < {:.6}), so ordering (1,2,3,4) \
             admits a strict-cylinder witness with first-map weight in ({:.6}, {:.6}); the feasibility \
             solver {}. This parameter family is sometimes quoted with the opposite membership; the \
             embedded certificate is machine-checkable and decides it.",
            crit.lhs,
            crit.rhs,
            crit.p_interval.0,
            crit.p_interval.1,
            if agrees { "agrees" } else { "DISAGREES" }
        ));
    }
    if !agrees {
        report
            .notes
            .push("two-map criterion and feasibility solver disagree; inspect certificates".into());
    }
}

fn sigma_tables(
    sys: &SpongeSystem,
    projections: &BTreeMap<Perm, ProjectionStructure>,
    sets: &OrderingSets,
    measure: &ResolvedMeasure,
) -> Vec<SigmaTable> {
    let d = sys.dimension();
    sets.cube_upper
        .iter()
        .map(|sigma| {
            let proj = &projections[sigma];
            let (proj_w, cond_w): (Vec<LevelTable>, Vec<LevelTable>) = match measure {
                ResolvedMeasure::Exact(p) => {
                    let w = WeightSystem::build(sys, proj, p);
                    weight_level_tables(proj, &w, d)
                }
                ResolvedMeasure::Float(q) => {
                    let w = WeightSystem::build(sys, proj, q);
                    weight_level_tables(proj, &w, d)
                }
            };
            let (fibre_tables, nat_entries, identity) = match natural_measure(sys, proj) {
                Ok((q, fd)) => {
                    let identity = natural_measure_identity_check(sys, proj, &q, &fd);
                    let mut fibre_tables = vec![LevelTable {
                        level: 0,
                        entries: vec![(0, serde_json::json!(crate::report::round12(fd.s0)))],
                    }];
                    for n in 1..d {
                        fibre_tables.push(LevelTable {
                            level: n,
                            entries: proj
                                .index_set(n)
                                .iter()
                                .map(|&i| {
                                    (i + 1, serde_json::json!(crate::report::round12(fd.value(proj, n, i))))
                                })
                                .collect(),
                        });
                    }
                    let entries = q.iter().enumerate().map(|(i, &v)| (i + 1, Real(v))).collect();
                    (fibre_tables, entries, identity)
                }
                Err(_) => (Vec::new(), Vec::new(), false),
            };
            SigmaTable {
                sigma: sigma.display(),
                projected_weights: proj_w,
                conditional_weights: cond_w,
                fibre_dimensions: fibre_tables,
                natural_measure: nat_entries,
                natural_identity_holds: identity,
            }
        })
        .collect()
}

fn weight_level_tables<T: WeightScalar>(
    proj: &ProjectionStructure,
    w: &WeightSystem<T>,
    d: usize,
) -> (Vec<LevelTable>, Vec<LevelTable>) {
    let mut projected = Vec::new();
    let mut conditional = Vec::new();
    for n in 1..=d {
        projected.push(LevelTable {
            level: n,
            entries: proj
                .index_set(n)
                .iter()
                .zip(w.level_slice(n))
                .map(|(&i, x)| (i + 1, x.json_value()))
                .collect(),
        });
        conditional.push(LevelTable {
            level: n,
            entries: proj
                .index_set(n)
                .iter()
                .zip(w.conditional_slice(n))
                .map(|(&i, x)| (i + 1, x.json_value()))
                .collect(),
        });
    }
    (projected, conditional)
}

fn bounds_section<T: WeightScalar>(
    sys: &SpongeSystem,
    projections: &BTreeMap<Perm, ProjectionStructure>,
    sets: &OrderingSets,
    p: &[T],
    label: String,
    weights_repr: Vec<String>,
    formula_only: bool,
) -> (DimensionBounds, BoundsSection) {
    let bounds = bound_table(sys, projections, sets, p);
    let section = BoundsSection {
        measure: label,
        weights: weights_repr,
        assouad_lo: Real(bounds.assouad_lo),
        assouad_hi: Real(bounds.assouad_hi),
        lower_lo: Real(bounds.lower_lo),
        lower_hi: Real(bounds.lower_hi),
        exact: bounds.exact,
        formula_only,
        per_sigma: bounds
            .per_sigma
            .iter()
            .map(|t| PerSigmaBounds {
                sigma: t.sigma.display(),
                upper_value: Real(t.upper.total),
                lower_value: Real(t.lower.total),
                upper_terms: t
                    .upper
                    .terms
                    .iter()
                    .map(|lt| (lt.level, lt.map + 1, Real(lt.value)))
                    .collect(),
                lower_terms: t
                    .lower
                    .terms
                    .iter()
                    .map(|lt| (lt.level, lt.map + 1, Real(lt.value)))
                    .collect(),
                in_cylinder_set: t.in_cylinder_set,
            })
            .collect(),
    };
    (bounds, section)
}

pub fn run_dims(text: &str, opts: &DimsOptions) -> Outcome {
    let (raw, report) = match parse_stage("dims", text) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let (sys, mut report) = match validate_stage(report, &raw) {
        Ok(v) => v,
        Err(o) => return o,
    };
    report.seed = Some(opts.seed);
    let projections = all_projections(&sys);
    let (sets, mut report) = match ordering_stage(report, &sys) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let sep = check_separation(&sys, &sets.cube_upper);
    report.separation = Some(separation_section(&sep));
    attach_two_map_section(&mut report, &sys, &sets);

    let measure = match resolve_weights(&sys, &projections, &raw, &opts.measure) {
        Ok(m) => m,
        Err(msg) => {
            report.validation.errors.push(msg);
            return Outcome { report, exit: EXIT_VALIDATION };
        }
    };
    if !sep.very_strong && !opts.formula_only {
        report.notes.push(
            "very strong separation does not hold; pass --formula-only for formula values only"
                .into(),
        );
        return Outcome { report, exit: EXIT_SEPARATION };
    }
    let formula_only = !sep.very_strong;
    if formula_only {
        report
            .notes
            .push("formula values only: the separation hypothesis for the dimension bounds is not met".into());
    }
    let (bounds, section) = match &measure {
        ResolvedMeasure::Exact(p) => bounds_section(
            &sys,
            &projections,
            &sets,
            p,
            opts.measure.label(),
            p.iter().map(format_rational).collect(),
            formula_only,
        ),
        ResolvedMeasure::Float(q) => bounds_section(
            &sys,
            &projections,
            &sets,
            q,
            opts.measure.label(),
            q.iter().map(|x| format!("{}", crate::report::round12(*x))).collect(),
            formula_only,
        ),
    };
    report.bounds = Some(section);
    report.tables = Some(sigma_tables(&sys, &projections, &sets, &measure));

    if opts.oracle != OracleMode::Off {
        let (rational_p, approx_note) = match &measure {
            ResolvedMeasure::Exact(p) => (p.clone(), false),
            ResolvedMeasure::Float(q) => {
                let denom = 1_000_000i64;
                let mut counts: Vec<i64> =
                    q.iter().map(|&x| ((x * denom as f64).round() as i64).max(1)).collect();
                let drift: i64 = denom - counts.iter().sum::<i64>();
                counts[0] += drift;
                (
                    counts.iter().map(|&c| Rat::new(c.into(), denom.into())).collect(),
                    true,
                )
            }
        };
        if approx_note {
            report.notes.push(
                "oracle runs on a rational approximation of the requested measure (denominator 1e6)"
                    .into(),
            );
        }
        let weights = weight_table(&sys, &projections, &rational_p);
        let cfg = match opts.oracle {
            OracleMode::Quick => SamplerConfig::quick(opts.seed),
            OracleMode::Full => SamplerConfig::full(opts.seed),
            OracleMode::Off => unreachable!(),
        };
        let sampler = sample_ratio_exponents(&sys, &projections, &weights, &sets, &cfg);
        // exact-vs-enumeration spot checks
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(17));
        let mut checks = 0usize;
        let mut all_equal = true;
        let caps = BruteForceCaps { max_len: 12, max_words: 1 << 18 };
        let mut guard = 0;
        while checks < 25 && guard < 400 {
            guard += 1;
            let letters: Vec<usize> =
                (0..12).map(|_| rng.random_range(0..sys.map_count())).collect();
            let w = WordSpec::cycle_of(letters);
            let coord = rng.random_range(0..sys.dimension());
            let len = rng.random_range(1..6);
            let r = crate::words::coordinate_product(&sys, &w, coord, len);
            match brute_force_cube_measure(&sys, &rational_p, &w, &r, caps) {
                Ok(bf) => {
                    let cube = crate::cubes::approximate_cube(&sys, &projections, &w, &r);
                    let exact = cube_measure(&sys, &projections, &weights, &cube);
                    if exact != bf {
                        all_equal = false;
                    }
                    checks += 1;
                }
                Err(_) => continue,
            }
        }
        let against_formula = if bounds.exact && !formula_only {
            let tol = match opts.oracle {
                OracleMode::Full => 0.05,
                _ => 0.1,
            };
            let disagreement = (sampler.sup_estimate - bounds.assouad_lo).abs() > tol
                || (sampler.inf_estimate - bounds.lower_hi).abs() > tol;
            Some(OracleComparison {
                formula_sup: Real(bounds.assouad_lo),
                formula_inf: Real(bounds.lower_hi),
                disagreement,
            })
        } else {
            None
        };
        if let Some(cmp) = &against_formula {
            if cmp.disagreement {
                report
                    .notes
                    .push("oracle exponent estimates disagree with the formula values".into());
            }
        }
        if !all_equal {
            report
                .notes
                .push("cube measure and enumeration oracle disagree; this is a defect".into());
        }
        report.oracle = Some(OracleSection {
            mode: match opts.oracle {
                OracleMode::Quick => "quick".into(),
                OracleMode::Full => "full".into(),
                OracleMode::Off => unreachable!(),
            },
            sup_estimate: Real(sampler.sup_estimate),
            inf_estimate: Real(sampler.inf_estimate),
            witness_slopes: sampler
                .witness_slopes
                .iter()
                .map(|(s, a, b)| (s.display(), Real(*a), Real(*b)))
                .collect(),
            sample_count: sampler.sample_count,
            cube_checks: checks,
            cube_checks_equal: all_equal,
            against_formula,
        });
    }
    Outcome { report, exit: EXIT_OK }
}

pub fn run_gap(text: &str, seed: u64) -> Outcome {
    let (raw, report) = match parse_stage("gap", text) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let (sys, mut report) = match validate_stage(report, &raw) {
        Ok(v) => v,
        Err(o) => return o,
    };
    report.seed = Some(seed);
    if sys.dimension() != 2 {
        report
            .notes
            .push("gap analysis needs a planar carpet".into());
        return Outcome { report, exit: EXIT_NOT_APPLICABLE };
    }
    let projections = all_projections(&sys);
    let (sets, mut report) = match ordering_stage(report, &sys) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let sep = check_separation(&sys, &sets.cube_upper);
    report.separation = Some(separation_section(&sep));
    if !sep.very_strong {
        report
            .notes
            .push("very strong separation does not hold; gap analysis is not claimed".into());
        return Outcome { report, exit: EXIT_SEPARATION };
    }
    let budget = GapBudget { seed, ..GapBudget::default() };
    match gap_certificate(&sys, &projections, &sets, &budget) {
        Ok(cert) => {
            report.gap = Some(GapSection {
                s: Real(cert.s),
                t: Real(cert.t),
                epsilon: Real(cert.epsilon),
                ell: cert.ell,
                second_terms: cert
                    .second_terms
                    .iter()
                    .map(|(k, v)| (*k, Real(*v)))
                    .collect(),
                delta_f: Real(cert.delta_f),
                p_star: cert.p_star.iter().map(|&x| Real(x)).collect(),
                inf_estimate: Real(cert.inf_estimate),
                axes_swapped: cert.axes_swapped,
            });
            Outcome { report, exit: EXIT_OK }
        }
        Err(GapError::NotApplicable(reason)) => {
            // still report the minimizer output
            let (p_star, inf) = minimize_assouad_over_p(&sys, &projections, &sets, &budget);
            report.notes.push(format!("gap certificate not applicable: {reason}"));
            report.gap = Some(GapSection {
                s: Real(f64::NAN),
                t: Real(f64::NAN),
                epsilon: Real(f64::NAN),
                ell: 0,
                second_terms: Vec::new(),
                delta_f: Real(f64::NAN),
                p_star: p_star.iter().map(|&x| Real(x)).collect(),
                inf_estimate: Real(inf),
                axes_swapped: false,
            });
            Outcome { report, exit: EXIT_OK }
        }
    }
}

pub enum RenderOutcome {
    Svg(String),
    Failed(Outcome),
}

pub fn run_render(text: &str, depth: usize) -> RenderOutcome {
    let (raw, report) = match parse_stage("render", text) {
        Ok(v) => v,
        Err(o) => return RenderOutcome::Failed(o),
    };
    let (sys, mut report) = match validate_stage(report, &raw) {
        Ok(v) => v,
        Err(o) => return RenderOutcome::Failed(o),
    };
    match render_svg(&sys, depth) {
        Ok(svg) => RenderOutcome::Svg(svg),
        Err(e @ RenderError::UnsupportedDimension(_)) | Err(e @ RenderError::DepthTooLarge(_)) => {
            report.notes.push(e.to_string());
            RenderOutcome::Failed(Outcome { report, exit: EXIT_NOT_APPLICABLE })
        }
    }
}
