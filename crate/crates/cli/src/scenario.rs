//! The scenario file format: a structured text (JSON) description of a
//! finite space, named measures, sigma-algebras, random variables, an
//! optional filtration, and a list of checks to run. All numbers are exact
//! rationals encoded as `"p/q"` strings; `-inf` marks the extended value.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use qsure::measure::{ExtendedValue, Measure, MeasureFamily, RandomVariable};
use qsure::rational::Rational;
use qsure::space::{EventSet, SampleSpace, SigmaAlgebra};
use qsure::Filtration;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub atoms: usize,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub measures: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sigma_algebras: BTreeMap<String, Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filtration: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub random_variables: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckRequest>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "kind",
    content = "params",
    rename_all = "snake_case",
    deny_unknown_fields
)]
pub enum CheckRequest {
    Axioms {
        family: Vec<String>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        samples: Vec<String>,
    },
    /// Without `phi`: build a dominating partition and verify it. With
    /// `phi`: check the countable-cover criterion for that sub-family.
    Hahn {
        family: Vec<String>,
        sigma_algebra: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phi: Option<Vec<String>>,
    },
    /// The conditional battery for one variable; with `measure`, the linear
    /// conditional under that measure is checked instead of the envelope.
    Condexp {
        family: Vec<String>,
        sigma_algebra: String,
        variable: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        measure: Option<String>,
    },
    Dominance {
        family: Vec<String>,
        sigma_algebra: String,
        variable: String,
    },
    Consistency {
        family: Vec<String>,
        sigma_algebra: String,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        samples: Vec<String>,
    },
    /// Tower property across every level pair of the scenario filtration.
    Recursivity {
        family: Vec<String>,
        variable: String,
    },
    /// Classifies the conditional chain of the variable; `expect` defaults
    /// to `martingale`.
    Martingale {
        family: Vec<String>,
        variable: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<String>,
    },
    /// Recomputes every other check by definition-level brute force and
    /// reports divergences.
    Oracle,
}

impl CheckRequest {
    pub fn kind(&self) -> &'static str {
        match self {
            CheckRequest::Axioms { .. } => "axioms",
            CheckRequest::Hahn { .. } => "hahn",
            CheckRequest::Condexp { .. } => "condexp",
            CheckRequest::Dominance { .. } => "dominance",
            CheckRequest::Consistency { .. } => "consistency",
            CheckRequest::Recursivity { .. } => "recursivity",
            CheckRequest::Martingale { .. } => "martingale",
            CheckRequest::Oracle => "oracle",
        }
    }

    /// A compact deterministic label for reports.
    pub fn label(&self) -> String {
        match self {
            CheckRequest::Axioms { family, samples } => {
                format!("axioms[{};{}]", family.join(","), samples.join(","))
            }
            CheckRequest::Hahn {
                family,
                sigma_algebra,
                phi,
            } => match phi {
                Some(phi) => format!(
                    "hahn-cover[{};{};phi={}]",
                    family.join(","),
                    sigma_algebra,
                    phi.join(",")
                ),
                None => format!("hahn[{};{}]", family.join(","), sigma_algebra),
            },
            CheckRequest::Condexp {
                family,
                sigma_algebra,
                variable,
                measure,
            } => match measure {
                Some(m) => format!(
                    "condexp[{};{};{};under={}]",
                    family.join(","),
                    sigma_algebra,
                    variable,
                    m
                ),
                None => format!(
                    "condexp[{};{};{}]",
                    family.join(","),
                    sigma_algebra,
                    variable
                ),
            },
            CheckRequest::Dominance {
                family,
                sigma_algebra,
                variable,
            } => format!(
                "dominance[{};{};{}]",
                family.join(","),
                sigma_algebra,
                variable
            ),
            CheckRequest::Consistency {
                family,
                sigma_algebra,
                samples,
            } => format!(
                "consistency[{};{};{}]",
                family.join(","),
                sigma_algebra,
                samples.join(",")
            ),
            CheckRequest::Recursivity { family, variable } => {
                format!("recursivity[{};{}]", family.join(","), variable)
            }
            CheckRequest::Martingale {
                family,
                variable,
                expect,
            } => format!(
                "martingale[{};{};expect={}]",
                family.join(","),
                variable,
                expect.as_deref().unwrap_or("martingale")
            ),
            CheckRequest::Oracle => "oracle".to_string(),
        }
    }
}

/// A scenario with every name resolved into engine values.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub space: SampleSpace,
    pub measures: BTreeMap<String, Measure>,
    pub sigma_algebras: BTreeMap<String, SigmaAlgebra>,
    pub filtration: Option<Filtration>,
    pub filtration_names: Vec<String>,
    pub variables: BTreeMap<String, RandomVariable>,
}

impl Resolved {
    pub fn measure(&self, name: &str) -> Result<&Measure, CliError> {
        self.measures
            .get(name)
            .ok_or_else(|| CliError::input(format!("unknown measure {name:?}")))
    }

    pub fn sigma_algebra(&self, name: &str) -> Result<&SigmaAlgebra, CliError> {
        self.sigma_algebras
            .get(name)
            .ok_or_else(|| CliError::input(format!("unknown sigma-algebra {name:?}")))
    }

    pub fn variable(&self, name: &str) -> Result<&RandomVariable, CliError> {
        self.variables
            .get(name)
            .ok_or_else(|| CliError::input(format!("unknown random variable {name:?}")))
    }

    pub fn family(&self, names: &[String]) -> Result<MeasureFamily, CliError> {
        if names.is_empty() {
            return Err(CliError::input("a check names an empty measure family"));
        }
        let named = names
            .iter()
            .map(|n| Ok((n.clone(), self.measure(n)?.clone())))
            .collect::<Result<Vec<_>, CliError>>()?;
        MeasureFamily::with_names(named).map_err(CliError::from_engine)
    }

    /// Looks up a display name for a measure, falling back to its weights.
    pub fn measure_label(&self, measure: &Measure) -> String {
        for (name, m) in &self.measures {
            if m == measure {
                return name.clone();
            }
        }
        format!(
            "({})",
            measure
                .weights()
                .iter()
                .map(|w| w.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
    }
}

pub fn parse_rational(text: &str, context: &str) -> Result<Rational, CliError> {
    Rational::from_str(text.trim())
        .map_err(|e| CliError::input(format!("{context}: bad rational {text:?}: {e}")))
}

pub fn parse_extended(text: &str, context: &str) -> Result<ExtendedValue, CliError> {
    if text.trim() == "-inf" {
        return Ok(ExtendedValue::NegInf);
    }
    Ok(ExtendedValue::Finite(parse_rational(text, context)?))
}

pub fn format_extended(value: &ExtendedValue) -> String {
    value.to_string()
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::input(format!("scenario schema: {e}")))
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("scenario serializes");
        out.push('\n');
        out
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Validates the scenario and resolves all names to engine values.
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let space = SampleSpace::new(self.atoms)
            .map_err(|e| CliError::input(format!("atoms: {e}")))?;

        let mut measures = BTreeMap::new();
        for (name, weights) in &self.measures {
            if weights.len() != self.atoms {
                return Err(CliError::input(format!(
                    "measure {name:?} has {} weights for {} atoms",
                    weights.len(),
                    self.atoms
                )));
            }
            let parsed = weights
                .iter()
                .map(|w| parse_rational(w, &format!("measure {name:?}")))
                .collect::<Result<Vec<_>, _>>()?;
            let measure = Measure::new(parsed)
                .map_err(|e| CliError::input(format!("measure {name:?}: {e}")))?;
            measures.insert(name.clone(), measure);
        }

        let mut sigma_algebras = BTreeMap::new();
        for (name, blocks) in &self.sigma_algebras {
            let events = blocks
                .iter()
                .map(|b| EventSet::new(space, b.iter().copied()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::input(format!("sigma-algebra {name:?}: {e}")))?;
            let sigma = SigmaAlgebra::new(space, events)
                .map_err(|e| CliError::input(format!("sigma-algebra {name:?}: {e}")))?;
            sigma_algebras.insert(name.clone(), sigma);
        }

        let mut variables = BTreeMap::new();
        for (name, values) in &self.random_variables {
            if values.len() != self.atoms {
                return Err(CliError::input(format!(
                    "random variable {name:?} has {} values for {} atoms",
                    values.len(),
                    self.atoms
                )));
            }
            let parsed = values
                .iter()
                .map(|v| parse_extended(v, &format!("random variable {name:?}")))
                .collect::<Result<Vec<_>, _>>()?;
            let variable = RandomVariable::new(parsed)
                .map_err(|e| CliError::input(format!("random variable {name:?}: {e}")))?;
            variables.insert(name.clone(), variable);
        }

        let (filtration, filtration_names) = match &self.filtration {
            None => (None, Vec::new()),
            Some(names) => {
                let levels = names
                    .iter()
                    .map(|n| {
                        sigma_algebras.get(n).cloned().ok_or_else(|| {
                            CliError::input(format!("filtration names unknown sigma-algebra {n:?}"))
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let filtration = Filtration::new(levels)
                    .map_err(|e| CliError::input(format!("filtration: {e}")))?;
                (Some(filtration), names.clone())
            }
        };

        let resolved = Resolved {
            space,
            measures,
            sigma_algebras,
            filtration,
            filtration_names,
            variables,
        };
        self.validate_check_names(&resolved)?;
        Ok(resolved)
    }

    fn validate_check_names(&self, resolved: &Resolved) -> Result<(), CliError> {
        for check in &self.checks {
            match check {
                CheckRequest::Axioms { family, samples } => {
                    resolved.family(family)?;
                    for s in samples {
                        resolved.variable(s)?;
                    }
                }
                CheckRequest::Hahn {
                    family,
                    sigma_algebra,
                    phi,
                } => {
                    resolved.family(family)?;
                    resolved.sigma_algebra(sigma_algebra)?;
                    if let Some(phi) = phi {
                        resolved.family(phi)?;
                    }
                }
                CheckRequest::Condexp {
                    family,
                    sigma_algebra,
                    variable,
                    measure,
                } => {
                    resolved.family(family)?;
                    resolved.sigma_algebra(sigma_algebra)?;
                    resolved.variable(variable)?;
                    if let Some(m) = measure {
                        resolved.measure(m)?;
                    }
                }
                CheckRequest::Dominance {
                    family,
                    sigma_algebra,
                    variable,
                } => {
                    resolved.family(family)?;
                    resolved.sigma_algebra(sigma_algebra)?;
                    resolved.variable(variable)?;
                }
                CheckRequest::Consistency {
                    family,
                    sigma_algebra,
                    samples,
                } => {
                    resolved.family(family)?;
                    resolved.sigma_algebra(sigma_algebra)?;
                    for s in samples {
                        resolved.variable(s)?;
                    }
                }
                CheckRequest::Recursivity { family, variable }
                | CheckRequest::Martingale {
                    family, variable, ..
                } => {
                    resolved.family(family)?;
                    resolved.variable(variable)?;
                    if resolved.filtration.is_none() {
                        return Err(CliError::input(format!(
                            "{} check requires a filtration",
                            check.kind()
                        )));
                    }
                }
                CheckRequest::Oracle => {}
            }
        }
        Ok(())
    }
}

/// Renders an engine variable back into the scenario value encoding.
pub fn variable_strings(x: &RandomVariable) -> Vec<String> {
    x.values().iter().map(format_extended).collect()
}

/// Renders an engine measure back into the scenario weight encoding.
pub fn measure_strings(m: &Measure) -> Vec<String> {
    m.weights().iter().map(|w| w.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_scenario() -> Scenario {
        Scenario::from_json(
            r#"{
                "atoms": 4,
                "measures": {
                    "U": ["1/4", "1/4", "1/4", "1/4"],
                    "d0": ["1", "0", "0", "0"]
                },
                "sigma_algebras": {
                    "G2": [[0, 1], [2, 3]],
                    "full": [[0], [1], [2], [3]],
                    "triv": [[0, 1, 2, 3]]
                },
                "filtration": ["triv", "G2", "full"],
                "random_variables": {
                    "X": ["2", "0", "4", "4"],
                    "M": ["1", "-inf", "0", "1/3"]
                },
                "checks": [
                    {"kind": "consistency", "params": {"family": ["U", "d0"], "sigma_algebra": "G2", "samples": ["X"]}},
                    {"kind": "oracle"}
                ]
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_identity() {
        let scenario = sample_scenario();
        let emitted = scenario.to_json();
        let parsed = Scenario::from_json(&emitted).unwrap();
        assert_eq!(parsed, scenario);
    }

    #[test]
    fn resolve_builds_engine_values() {
        let resolved = sample_scenario().resolve().unwrap();
        assert_eq!(resolved.space.atom_count(), 4);
        assert_eq!(resolved.measures.len(), 2);
        assert!(resolved.filtration.is_some());
        let m = resolved.variable("M").unwrap();
        assert_eq!(m.value(1), &ExtendedValue::NegInf);
    }

    #[test]
    fn bad_weights_are_schema_errors() {
        let bad = Scenario::from_json(
            r#"{"atoms": 2, "measures": {"m": ["9/8", "1/4"]}}"#,
        )
        .unwrap();
        let err = bad.resolve().unwrap_err();
        assert!(err.to_string().contains("measure \"m\""), "{err}");
    }

    #[test]
    fn unknown_names_are_schema_errors() {
        let bad = Scenario::from_json(
            r#"{"atoms": 2,
                "measures": {"m": ["1/2", "1/2"]},
                "checks": [{"kind": "axioms", "params": {"family": ["nope"]}}]}"#,
        )
        .unwrap();
        assert!(bad.resolve().is_err());
    }

    #[test]
    fn filtration_must_reference_known_algebras() {
        let bad = Scenario::from_json(
            r#"{"atoms": 2, "filtration": ["missing"]}"#,
        )
        .unwrap();
        assert!(bad.resolve().is_err());
    }
}
