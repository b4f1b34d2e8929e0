//! Runs the checks a scenario requests against the engine and renders
//! verdicts with witnesses.

use std::time::Instant;

use num_traits::Zero;

use qsure::expectation::{
    check_axioms, check_conditional_axioms, check_consistency, check_dominance, cond_exp_qs,
    cond_sublinear, StabilityStatus,
};
use qsure::hahn::{build_dominating_partition, check_countable_cover, verify_hahn, Condition};
use qsure::measure::RandomVariable;
use qsure::{classify_martingale, check_recursivity, conditional_chain, MartingaleClass};

use crate::gen::{random_block_variable, random_variable, Rng};
use crate::oracle;
use crate::report::{CheckResult, Report, Verdict};
use crate::scenario::{CheckRequest, Resolved, Scenario};
use crate::CliError;

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Member cap for stabilisation closures.
    pub budget: usize,
    /// Seed for generated sample variables.
    pub seed: u64,
    /// Exhaustive sweeps run only up to this many atoms.
    pub exhaustive_limit: usize,
    /// Record per-check wall time (breaks byte-identical reports).
    pub timings: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            budget: 500,
            seed: 0,
            exhaustive_limit: 12,
            timings: false,
        }
    }
}

/// Runs every check in the scenario and assembles the report.
pub fn run_scenario(scenario: &Scenario, opts: &RunOptions) -> Result<Report, CliError> {
    let resolved = scenario.resolve()?;
    let mut results = Vec::new();
    for request in &scenario.checks {
        let started = Instant::now();
        match request {
            CheckRequest::Oracle => {
                let mut oracle_results = oracle::oracle_check(scenario, &resolved, opts)?;
                if opts.timings {
                    let micros = started.elapsed().as_micros() as u64;
                    for r in &mut oracle_results {
                        r.micros = Some(micros);
                    }
                }
                results.extend(oracle_results);
            }
            other => {
                let mut result = run_check(&resolved, other, opts)?;
                if opts.timings {
                    result.micros = Some(started.elapsed().as_micros() as u64);
                }
                results.push(result);
            }
        }
    }
    Ok(Report::new(scenario, results))
}

/// Runs a single non-oracle check.
pub fn run_check(
    resolved: &Resolved,
    request: &CheckRequest,
    opts: &RunOptions,
) -> Result<CheckResult, CliError> {
    let label = request.label();
    match request {
        CheckRequest::Axioms { family, samples } => {
            let family = resolved.family(family)?;
            let mut variables: Vec<RandomVariable> = samples
                .iter()
                .map(|s| resolved.variable(s).cloned())
                .collect::<Result<_, _>>()?;
            let mut rng = Rng::new(opts.seed);
            while variables.len() < 2 {
                variables.push(random_variable(&mut rng, resolved.space));
            }
            let report = check_axioms(&family, &variables).map_err(CliError::from_engine)?;
            let witnesses = report
                .outcomes
                .iter()
                .filter_map(|o| {
                    o.violation.as_ref().map(|v| {
                        format!(
                            "{}: {} (lhs={}, rhs={})",
                            o.axiom.name(),
                            v.description,
                            v.lhs,
                            v.rhs
                        )
                    })
                })
                .collect();
            Ok(CheckResult::new(label, Verdict::from_bool(report.passed()))
                .with_witnesses(witnesses))
        }

        CheckRequest::Hahn {
            family,
            sigma_algebra,
            phi,
        } => {
            let family = resolved.family(family)?;
            let sigma = resolved.sigma_algebra(sigma_algebra)?;
            match phi {
                None => {
                    let dp =
                        build_dominating_partition(&family, sigma).map_err(CliError::from_engine)?;
                    let report = verify_hahn(&dp).map_err(CliError::from_engine)?;
                    let mut witnesses = Vec::new();
                    for (name, condition) in [
                        ("polar-sets", &report.same_polar_sets),
                        ("completion", &report.same_completion),
                        ("supports", &report.supports),
                    ] {
                        if let Condition::Fail { detail, .. } = condition {
                            witnesses.push(format!("{name}: {detail}"));
                        }
                    }
                    witnesses.push(format!("parts={}", dp.parts().len()));
                    Ok(CheckResult::new(label, Verdict::from_bool(report.passed()))
                        .with_witnesses(witnesses))
                }
                Some(phi) => {
                    let sub = resolved.family(phi)?;
                    let report = check_countable_cover(&sub, &family, sigma)
                        .map_err(CliError::from_engine)?;
                    let mut witnesses = Vec::new();
                    for mc in &report.per_member {
                        if let Some(failure) = &mc.failure {
                            witnesses.push(format!(
                                "member {} ({}): {failure:?}",
                                mc.member,
                                family
                                    .name(mc.member)
                                    .unwrap_or("?"),
                            ));
                        }
                    }
                    Ok(
                        CheckResult::new(label, Verdict::from_bool(report.satisfied))
                            .with_witnesses(witnesses),
                    )
                }
            }
        }

        CheckRequest::Condexp {
            family,
            sigma_algebra,
            variable,
            measure,
        } => {
            let family = resolved.family(family)?;
            let sigma = resolved.sigma_algebra(sigma_algebra)?;
            let x = resolved.variable(variable)?;
            let dp = build_dominating_partition(&family, sigma).map_err(CliError::from_engine)?;
            match measure {
                Some(name) => {
                    let theta = resolved.measure(name)?;
                    let cond = cond_exp_qs(x, theta, &dp).map_err(CliError::from_engine)?;
                    // defining property: block integrals agree exactly
                    let mut ok = true;
                    let mut witnesses = Vec::new();
                    for block in sigma.blocks() {
                        if theta.prob(block).is_zero() {
                            continue;
                        }
                        let lhs = theta
                            .expect(&x.mask(block))
                            .map_err(CliError::from_engine)?;
                        let rhs = theta
                            .expect(&cond.value().mask(block))
                            .map_err(CliError::from_engine)?;
                        if lhs != rhs {
                            ok = false;
                            witnesses.push(format!("block {block}: {lhs} vs {rhs}"));
                        }
                    }
                    witnesses.push(format!("value={}", cond.value()));
                    Ok(CheckResult::new(label, Verdict::from_bool(ok)).with_witnesses(witnesses))
                }
                None => {
                    let cond = cond_sublinear(x, &dp).map_err(CliError::from_engine)?;
                    let mut rng = Rng::new(opts.seed);
                    let extras =
                        vec![random_block_variable(&mut rng, dp.universal_completion())];
                    let report = check_conditional_axioms(x, &dp, &extras)
                        .map_err(CliError::from_engine)?;
                    let mut witnesses: Vec<String> = report
                        .violations
                        .iter()
                        .map(|v| {
                            format!("{} at atom {}: {}", v.axiom.name(), v.atom, v.description)
                        })
                        .collect();
                    witnesses.push(format!("value={}", cond.value()));
                    witnesses.push(format!("polar_mask={}", cond.polar_mask()));
                    Ok(CheckResult::new(label, Verdict::from_bool(report.passed()))
                        .with_witnesses(witnesses))
                }
            }
        }

        CheckRequest::Dominance {
            family,
            sigma_algebra,
            variable,
        } => {
            let family = resolved.family(family)?;
            let sigma = resolved.sigma_algebra(sigma_algebra)?;
            let x = resolved.variable(variable)?;
            let dp = build_dominating_partition(&family, sigma).map_err(CliError::from_engine)?;
            let report = check_dominance(x, &dp).map_err(CliError::from_engine)?;
            let witnesses = report
                .violations
                .iter()
                .map(|v| {
                    format!(
                        "member {} atom {}: {} <= {} <= {} fails",
                        v.member, v.atom, v.lower, v.conditional, v.upper
                    )
                })
                .collect();
            Ok(CheckResult::new(label, Verdict::from_bool(report.passed()))
                .with_witnesses(witnesses))
        }

        CheckRequest::Consistency {
            family,
            sigma_algebra,
            samples,
        } => {
            let family = resolved.family(family)?;
            let sigma = resolved.sigma_algebra(sigma_algebra)?;
            let mut variables: Vec<RandomVariable> = samples
                .iter()
                .map(|s| resolved.variable(s).cloned())
                .collect::<Result<_, _>>()?;
            if variables.is_empty() {
                let mut rng = Rng::new(opts.seed);
                variables.push(random_variable(&mut rng, resolved.space));
            }
            let report = check_consistency(&family, sigma, &variables, opts.budget)
                .map_err(CliError::from_engine)?;
            let mut witnesses = Vec::new();
            match &report.stability {
                StabilityStatus::Stable => witnesses.push("stability: fixpoint".to_string()),
                StabilityStatus::Enlarged { added } => {
                    witnesses.push(format!("stability: enlarged by {added}"));
                    for member in report.stabilized.members() {
                        if !family.contains(member) {
                            witnesses.push(format!(
                                "pasted measure {}",
                                resolved.measure_label(member)
                            ));
                        }
                    }
                }
                StabilityStatus::Inconclusive { reached } => {
                    witnesses.push(format!("stability: budget exhausted at {reached}"));
                }
            }
            for case in report.recursivity.iter().filter(|c| !c.passed()) {
                witnesses.push(format!(
                    "recursivity gap on {}: E(X)={} but E(E(X|G))={}",
                    report.samples[case.sample].0, case.direct, case.tower
                ));
            }
            if let Some(v) = &report.regularity {
                witnesses.push(format!(
                    "regularity fails on {} at event {} atom {}",
                    report.samples[v.sample].0, v.event, v.atom
                ));
            }
            for case in report.representation.iter().filter(|c| !c.passed()) {
                witnesses.push(format!(
                    "representation gap on {}: sup over closure {} vs tower {}",
                    report.samples[case.sample].0, case.stabilized, case.tower
                ));
            }
            let verdict = match report.consistent() {
                None => Verdict::Inconclusive,
                Some(ok) => {
                    Verdict::from_bool(ok && report.representation_passed() == Some(true))
                }
            };
            Ok(CheckResult::new(label, verdict).with_witnesses(witnesses))
        }

        CheckRequest::Recursivity { family, variable } => {
            let family = resolved.family(family)?;
            let x = resolved.variable(variable)?;
            let filtration = resolved
                .filtration
                .as_ref()
                .ok_or_else(|| CliError::input("recursivity check requires a filtration"))?;
            let report =
                check_recursivity(x, &family, filtration).map_err(CliError::from_engine)?;
            let witnesses = report
                .failures
                .iter()
                .map(|f| {
                    format!(
                        "levels ({},{}) atom {}: nested={} direct={}",
                        f.earlier, f.later, f.atom, f.lhs, f.rhs
                    )
                })
                .collect();
            Ok(CheckResult::new(label, Verdict::from_bool(report.passed()))
                .with_witnesses(witnesses))
        }

        CheckRequest::Martingale {
            family,
            variable,
            expect,
        } => {
            let family = resolved.family(family)?;
            let x = resolved.variable(variable)?;
            let filtration = resolved
                .filtration
                .as_ref()
                .ok_or_else(|| CliError::input("martingale check requires a filtration"))?;
            let expected: MartingaleClass = expect
                .as_deref()
                .unwrap_or("martingale")
                .parse()
                .map_err(CliError::input)?;
            let chain =
                conditional_chain(x, &family, filtration).map_err(CliError::from_engine)?;
            let class =
                classify_martingale(&chain, &family, filtration).map_err(CliError::from_engine)?;
            let witnesses = vec![format!("classified: {}", class.name())];
            Ok(
                CheckResult::new(label, Verdict::from_bool(class == expected))
                    .with_witnesses(witnesses),
            )
        }

        CheckRequest::Oracle => Err(CliError::input(
            "oracle checks are dispatched by the scenario runner",
        )),
    }
}

/// Runs one ad-hoc check (used by the single-purpose subcommands).
pub fn run_single(
    scenario: &Scenario,
    request: CheckRequest,
    opts: &RunOptions,
) -> Result<Report, CliError> {
    let mut shadowed = scenario.clone();
    shadowed.checks = vec![request];
    run_scenario(&shadowed, opts)
}

/// Runs the oracle against every check the scenario declares.
pub fn run_oracle(scenario: &Scenario, opts: &RunOptions) -> Result<Report, CliError> {
    let resolved = scenario.resolve()?;
    let results = oracle::oracle_check(scenario, &resolved, opts)?;
    Ok(Report::new(scenario, results))
}

/// Stabilisation as a report: informational members plus the closure flag.
pub fn run_stabilize(
    scenario: &Scenario,
    family_names: &[String],
    sigma_name: &str,
    opts: &RunOptions,
) -> Result<Report, CliError> {
    let resolved = scenario.resolve()?;
    let family = resolved.family(family_names)?;
    let sigma = resolved.sigma_algebra(sigma_name)?;
    let (closed, outcome) =
        qsure::measure::stabilize(&family, sigma, opts.budget).map_err(CliError::from_engine)?;
    let mut witnesses = vec![format!("members={}", closed.len())];
    for member in closed.members() {
        witnesses.push(resolved.measure_label(member));
    }
    let verdict = match outcome {
        qsure::measure::StabilizeOutcome::Fixpoint => Verdict::Pass,
        qsure::measure::StabilizeOutcome::BudgetExhausted => Verdict::Inconclusive,
    };
    let label = format!("stabilize[{};{}]", family_names.join(","), sigma_name);
    Ok(Report::new(
        scenario,
        vec![CheckResult::new(label, verdict).with_witnesses(witnesses)],
    ))
}

