//! Machine-readable run reports: versioned JSON, rationals as `p/q` strings,
//! reals rounded to twelve significant digits so repeated runs are
//! byte-identical.

use crate::spec_io::SpecFile;
use serde::{Serialize, Serializer};

/// A real number serialized as a JSON number with 12 significant digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let exp = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(11 - exp);
    (x * scale).round() / scale
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let r = round12(self.0);
        match serde_json::Number::from_f64(r) {
            Some(n) => n.serialize(serializer),
            None => serializer.serialize_none(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationSection {
    pub valid: bool,
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeparationSection {
    pub sppc: bool,
    pub very_strong: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta0: Option<String>,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CylinderEntry {
    pub sigma: String,
    pub witness_p: Vec<String>,
    pub slack: Real,
}

#[derive(Debug, Clone, Serialize)]
pub struct CubeEntry {
    pub sigma: String,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderingSection {
    pub cylinder: Vec<CylinderEntry>,
    pub cube_lower: Vec<CubeEntry>,
    pub cube_upper: Vec<String>,
    pub exact: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelTable {
    pub level: usize,
    /// map index (1-based) to value; rationals as strings, reals as numbers
    pub entries: Vec<(usize, serde_json::Value)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SigmaTable {
    pub sigma: String,
    pub projected_weights: Vec<LevelTable>,
    pub conditional_weights: Vec<LevelTable>,
    pub fibre_dimensions: Vec<LevelTable>,
    pub natural_measure: Vec<(usize, Real)>,
    pub natural_identity_holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PerSigmaBounds {
    pub sigma: String,
    pub upper_value: Real,
    pub lower_value: Real,
    pub upper_terms: Vec<(usize, usize, Real)>,
    pub lower_terms: Vec<(usize, usize, Real)>,
    pub in_cylinder_set: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsSection {
    pub measure: String,
    pub weights: Vec<String>,
    pub assouad_lo: Real,
    pub assouad_hi: Real,
    pub lower_lo: Real,
    pub lower_hi: Real,
    pub exact: bool,
    pub formula_only: bool,
    pub per_sigma: Vec<PerSigmaBounds>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapSection {
    pub s: Real,
    pub t: Real,
    pub epsilon: Real,
    pub ell: usize,
    pub second_terms: Vec<(usize, Real)>,
    pub delta_f: Real,
    pub p_star: Vec<Real>,
    pub inf_estimate: Real,
    pub axes_swapped: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleSection {
    pub mode: String,
    pub sup_estimate: Real,
    pub inf_estimate: Real,
    pub witness_slopes: Vec<(String, Real, Real)>,
    pub sample_count: usize,
    pub cube_checks: usize,
    pub cube_checks_equal: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub against_formula: Option<OracleComparison>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleComparison {
    pub formula_sup: Real,
    pub formula_inf: Real,
    pub disagreement: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TwoMapSection {
    pub lhs: Real,
    pub rhs: Real,
    pub condition_holds: bool,
    pub forward_feasible: bool,
    pub reverse_feasible: bool,
    pub p_interval: (Real, Real),
    pub agrees_with_feasibility: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<SpecFile>,
    pub validation: ValidationSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separation: Option<SeparationSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orderings: Option<OrderingSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tables: Option<Vec<SigmaTable>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub two_map_criterion: Option<TwoMapSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<GapSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
    pub notes: Vec<String>,
}

impl RunReport {
    pub fn new(command: &str) -> RunReport {
        RunReport {
            schema_version: 1,
            command: command.to_string(),
            seed: None,
            input: None,
            validation: ValidationSection { valid: false, errors: Vec::new() },
            separation: None,
            orderings: None,
            tables: None,
            bounds: None,
            two_map_criterion: None,
            gap: None,
            oracle: None,
            notes: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }

    /// Compact human-readable rendering of the same content.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command: {}\n", self.command));
        out.push_str(&format!(
            "valid: {}{}\n",
            self.validation.valid,
            if self.validation.errors.is_empty() {
                String::new()
            } else {
                format!(" ({})", self.validation.errors.join("; "))
            }
        ));
        if let Some(sep) = &self.separation {
            out.push_str(&format!(
                "separation: sppc={} very_strong={} delta0={}\n",
                sep.sppc,
                sep.very_strong,
                sep.delta0.as_deref().unwrap_or("-")
            ));
        }
        if let Some(ord) = &self.orderings {
            let cyl: Vec<&str> = ord.cylinder.iter().map(|c| c.sigma.as_str()).collect();
            let low: Vec<&str> = ord.cube_lower.iter().map(|c| c.sigma.as_str()).collect();
            out.push_str(&format!(
                "cylinder set: {{{}}}\ncube set: lower {{{}}} upper {{{}}} exact={}\n",
                cyl.join(" "),
                low.join(" "),
                ord.cube_upper.join(" "),
                ord.exact
            ));
        }
        if let Some(b) = &self.bounds {
            out.push_str(&format!(
                "measure {}: assouad in [{:.6}, {:.6}] lower in [{:.6}, {:.6}] exact={}{}\n",
                b.measure,
                b.assouad_lo.0,
                b.assouad_hi.0,
                b.lower_lo.0,
                b.lower_hi.0,
                b.exact,
                if b.formula_only { " (formula values only)" } else { "" }
            ));
        }
        if let Some(g) = &self.gap {
            out.push_str(&format!(
                "gap: s={:.6} t={:.6} delta_f={:.6} inf={:.6} at p={:?}\n",
                g.s.0,
                g.t.0,
                g.delta_f.0,
                g.inf_estimate.0,
                g.p_star.iter().map(|r| round12(r.0)).collect::<Vec<_>>()
            ));
        }
        if let Some(o) = &self.oracle {
            out.push_str(&format!(
                "oracle[{}]: exponent range [{:.4}, {:.4}] over {} samples; cube checks {}/{} equal\n",
                o.mode,
                o.inf_estimate.0,
                o.sup_estimate.0,
                o.sample_count,
                if o.cube_checks_equal { o.cube_checks } else { 0 },
                o.cube_checks
            ));
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digit_rounding() {
        assert_eq!(round12(1.5), 1.5);
        assert_eq!(round12(0.0), 0.0);
        assert_eq!(round12(2.0849625007211563), 2.08496250072);
        assert_eq!(round12(-2.0849625007211563), -2.08496250072);
        assert_eq!(round12(1234567890123456.0), 1234567890120000.0);
    }

    #[test]
    fn report_serializes_deterministically() {
        let mut r = RunReport::new("dims");
        r.validation.valid = true;
        r.notes.push("hello".into());
        assert_eq!(r.to_json(), r.to_json());
        assert!(r.to_json().contains("schema_version"));
    }
}
