//! The brute-force oracle: recomputes every claim the engine makes straight
//! from the definitions — completion membership by null-set difference,
//! polar sets by summation, supports by intersecting all full-mass
//! measurable sets, conditional envelopes by per-block maximisation — and
//! reports any divergence. Exhaustive sweeps enumerate all subsets of the
//! space and are gated by the exhaustive limit; direct recomputations always
//! run.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use qsure::hahn::build_dominating_partition;
use qsure::measure::{ExtendedValue, Measure, MeasureFamily, RandomVariable};
use qsure::rational::Rational;
use qsure::space::{EventSet, SigmaAlgebra};

use crate::checks::{run_check, RunOptions};
use crate::report::{CheckResult, Verdict};
use crate::scenario::{CheckRequest, Resolved, Scenario};
use crate::CliError;

/// Every subset of `0..n`; callers gate `n`.
fn all_subsets(n: usize) -> Vec<EventSet> {
    (0u64..(1 << n))
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect()
}

fn raw_prob(theta: &Measure, a: &EventSet) -> Rational {
    a.iter().map(|atom| theta.weight(atom)).sum()
}

fn raw_is_polar(a: &EventSet, family: &MeasureFamily) -> bool {
    family.members().iter().all(|t| raw_prob(t, a).is_zero())
}

/// Union of the null blocks of `g` under `theta`.
fn raw_null_union(g: &SigmaAlgebra, theta: &Measure) -> EventSet {
    g.blocks()
        .iter()
        .filter(|b| raw_prob(theta, b).is_zero())
        .fold(EventSet::empty(), |acc, b| acc.union(b))
}

/// Membership in the completion, by definition: `a` differs from some union
/// of blocks by a subset of a null measurable set.
fn raw_in_completion(a: &EventSet, g: &SigmaAlgebra, theta: &Measure) -> bool {
    let null_union = raw_null_union(g, theta);
    (0u64..(1 << g.block_count())).any(|mask| {
        let b = g
            .blocks()
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .fold(EventSet::empty(), |acc, (_, blk)| acc.union(blk));
        a.difference(&b).union(&b.difference(a)).is_subset(&null_union)
    })
}

fn raw_in_universal(a: &EventSet, g: &SigmaAlgebra, family: &MeasureFamily) -> bool {
    family
        .members()
        .iter()
        .all(|theta| raw_in_completion(a, g, theta))
}

/// The expectation as a plain dot product; `None` when `-inf` is charged.
fn raw_expect(theta: &Measure, values: &[Option<Rational>]) -> Option<Rational> {
    let mut acc = Rational::zero();
    for (atom, w) in theta.weights().iter().enumerate() {
        if w.is_zero() {
            continue;
        }
        acc += w * values[atom].as_ref()?;
    }
    Some(acc)
}

fn raw_sup_expect(family: &MeasureFamily, values: &[Option<Rational>]) -> Option<Rational> {
    let mut best: Option<Rational> = None;
    for theta in family.members() {
        let e = raw_expect(theta, values)?;
        best = Some(match best {
            None => e,
            Some(b) => b.max(e),
        });
    }
    best
}

fn option_values(x: &RandomVariable) -> Vec<Option<Rational>> {
    x.values()
        .iter()
        .map(|v| v.as_rational().cloned())
        .collect()
}

/// Per-atom worst-case conditional: the maximum over members charging the
/// atom's block of their direct block averages; `None` where no member
/// charges the block.
fn raw_cond_envelope(
    values: &[Option<Rational>],
    family: &MeasureFamily,
    g: &SigmaAlgebra,
) -> Option<Vec<Option<Rational>>> {
    let mut out: Vec<Option<Rational>> = vec![None; values.len()];
    for block in g.blocks() {
        let mut best: Option<Rational> = None;
        for theta in family.members() {
            let mass = raw_prob(theta, block);
            if mass.is_zero() {
                continue;
            }
            let mut acc = Rational::zero();
            for atom in block.iter() {
                let w = theta.weight(atom);
                if w.is_zero() {
                    continue;
                }
                acc += w * values[atom].as_ref()?;
            }
            let avg = acc / mass;
            best = Some(match best {
                None => avg,
                Some(b) => b.max(avg),
            });
        }
        if let Some(value) = best {
            for atom in block.iter() {
                out[atom] = Some(value.clone());
            }
        }
    }
    Some(out)
}

/// The smallest universally measurable full-mass set: the intersection of
/// every measurable support.
fn raw_minimal_support(
    theta: &Measure,
    g: &SigmaAlgebra,
    family: &MeasureFamily,
    subsets: &[EventSet],
) -> EventSet {
    let one = Rational::one();
    let mut acc: Option<EventSet> = None;
    for a in subsets {
        if raw_prob(theta, a) == one && raw_in_universal(a, g, family) {
            acc = Some(match acc {
                None => a.clone(),
                Some(s) => s.intersection(a),
            });
        }
    }
    acc.unwrap_or_else(EventSet::empty)
}

/// The pasting formula evaluated directly, with no admissibility logic.
fn raw_paste(
    theta: &Measure,
    theta_prime: &Measure,
    a: &EventSet,
    g: &SigmaAlgebra,
) -> Option<Measure> {
    let n = theta.atom_count();
    let mut weights = Vec::with_capacity(n);
    for atom in 0..n {
        if a.contains(atom) {
            let block = g.block_of(atom);
            let denom = raw_prob(theta_prime, block);
            if denom.is_zero() {
                weights.push(Rational::zero());
            } else {
                weights
                    .push(raw_prob(theta, &a.intersection(block)) * theta_prime.weight(atom) / denom);
            }
        } else {
            weights.push(theta.weight(atom).clone());
        }
    }
    Measure::new(weights).ok()
}

struct Sweep {
    label: String,
    verdict: Verdict,
    witnesses: Vec<String>,
}

impl Sweep {
    fn pass(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            verdict: Verdict::Pass,
            witnesses: Vec::new(),
        }
    }

    fn gate(label: impl Into<String>, atoms: usize, limit: usize) -> Self {
        Self {
            label: label.into(),
            verdict: Verdict::Inconclusive,
            witnesses: vec![format!("size guard: {atoms} atoms exceed limit {limit}")],
        }
    }

    fn fail(&mut self, witness: String) {
        self.verdict = Verdict::Fail;
        self.witnesses.push(witness);
    }

    fn into_result(self) -> CheckResult {
        CheckResult::new(self.label, self.verdict).with_witnesses(self.witnesses)
    }
}

/// Recomputes everything the scenario's checks claim and reports
/// divergences between the engine and the definitions.
pub fn oracle_check(
    scenario: &Scenario,
    resolved: &Resolved,
    opts: &RunOptions,
) -> Result<Vec<CheckResult>, CliError> {
    let mut results = Vec::new();
    let n = resolved.space.atom_count();
    let exhaustive = n <= opts.exhaustive_limit;
    let subsets = if exhaustive { all_subsets(n) } else { Vec::new() };

    // contexts referenced by the checks: (family names, sigma name)
    let mut contexts: BTreeSet<(Vec<String>, String)> = BTreeSet::new();
    for check in &scenario.checks {
        match check {
            CheckRequest::Hahn {
                family,
                sigma_algebra,
                ..
            }
            | CheckRequest::Condexp {
                family,
                sigma_algebra,
                ..
            }
            | CheckRequest::Dominance {
                family,
                sigma_algebra,
                ..
            }
            | CheckRequest::Consistency {
                family,
                sigma_algebra,
                ..
            } => {
                contexts.insert((family.clone(), sigma_algebra.clone()));
            }
            CheckRequest::Recursivity { family, .. }
            | CheckRequest::Martingale { family, .. } => {
                for level in &resolved.filtration_names {
                    contexts.insert((family.clone(), level.clone()));
                }
            }
            CheckRequest::Axioms { .. } | CheckRequest::Oracle => {}
        }
    }

    for (family_names, sigma_name) in &contexts {
        let family = resolved.family(family_names)?;
        let g = resolved.sigma_algebra(sigma_name)?;
        let tag = format!("{};{}", family_names.join(","), sigma_name);
        results.push(
            completion_sweep(&family, g, &subsets, exhaustive, opts, &tag).into_result(),
        );
        results.push(polar_sweep(&family, &subsets, exhaustive, opts, &tag).into_result());
        results.push(hahn_sweep(&family, g, &subsets, exhaustive, opts, &tag)?.into_result());
        results.push(support_sweep(&family, g, &subsets, exhaustive, opts, &tag).into_result());
    }

    // engine/oracle verdict agreement per requested check
    for check in &scenario.checks {
        if matches!(check, CheckRequest::Oracle) {
            continue;
        }
        let engine = run_check(resolved, check, opts)?;
        let oracle_verdict = recompute_verdict(resolved, check, opts)?;
        let label = format!("oracle:agree[{}]", check.label());
        let mut sweep = Sweep::pass(label);
        match oracle_verdict {
            None => {
                sweep.verdict = Verdict::Inconclusive;
                sweep
                    .witnesses
                    .push("oracle recomputation gated by size".to_string());
            }
            Some(expected) => {
                if engine.verdict != expected {
                    sweep.fail(format!(
                        "engine verdict {:?} but definitions give {:?}",
                        engine.verdict, expected
                    ));
                }
            }
        }
        results.push(sweep.into_result());
    }

    Ok(results)
}

fn completion_sweep(
    family: &MeasureFamily,
    g: &SigmaAlgebra,
    subsets: &[EventSet],
    exhaustive: bool,
    opts: &RunOptions,
    tag: &str,
) -> Sweep {
    let label = format!("oracle:completion[{tag}]");
    if !exhaustive {
        return Sweep::gate(label, family.atom_count(), opts.exhaustive_limit);
    }
    let mut sweep = Sweep::pass(label);
    for theta in family.members() {
        let engine = g.complete(theta).expect("dimensions agree");
        for a in subsets {
            let engine_says = engine.is_measurable(a).expect("in range");
            let definition_says = raw_in_completion(a, g, theta);
            if engine_says != definition_says {
                sweep.fail(format!(
                    "completion membership of {a} diverges (engine {engine_says})"
                ));
            }
        }
    }
    let engine_universal = g.universal_complete(family).expect("dimensions agree");
    for a in subsets {
        let engine_says = engine_universal.is_measurable(a).expect("in range");
        if engine_says != raw_in_universal(a, g, family) {
            sweep.fail(format!("universal membership of {a} diverges"));
        }
    }
    sweep
}

fn polar_sweep(
    family: &MeasureFamily,
    subsets: &[EventSet],
    exhaustive: bool,
    opts: &RunOptions,
    tag: &str,
) -> Sweep {
    let label = format!("oracle:polar[{tag}]");
    if !exhaustive {
        return Sweep::gate(label, family.atom_count(), opts.exhaustive_limit);
    }
    let mut sweep = Sweep::pass(label);
    for a in subsets {
        if family.is_polar(a) != raw_is_polar(a, family) {
            sweep.fail(format!("polar status of {a} diverges"));
        }
    }
    sweep
}

fn hahn_sweep(
    family: &MeasureFamily,
    g: &SigmaAlgebra,
    subsets: &[EventSet],
    exhaustive: bool,
    opts: &RunOptions,
    tag: &str,
) -> Result<Sweep, CliError> {
    let label = format!("oracle:hahn[{tag}]");
    if !exhaustive {
        return Ok(Sweep::gate(label, family.atom_count(), opts.exhaustive_limit));
    }
    let mut sweep = Sweep::pass(label);
    let dp = build_dominating_partition(family, g).map_err(CliError::from_engine)?;
    let engine_verdict = qsure::verify_hahn(&dp).map_err(CliError::from_engine)?.passed();
    let parts = MeasureFamily::new(dp.parts().iter().map(|p| p.measure.clone()).collect())
        .map_err(CliError::from_engine)?;

    let mut definition_holds = true;
    // same completed sets and same polar sets among them
    for a in subsets {
        let in_family = raw_in_universal(a, g, family);
        let in_parts = raw_in_universal(a, g, &parts);
        if in_family != in_parts {
            definition_holds = false;
            sweep
                .witnesses
                .push(format!("{a} measurable on one side only"));
        }
        if (in_family || in_parts) && raw_is_polar(a, family) != raw_is_polar(a, &parts) {
            definition_holds = false;
            sweep.witnesses.push(format!("{a} polar on one side only"));
        }
    }
    // disjoint measurable supports of full part mass, jointly carrying the
    // family
    let mut union = EventSet::empty();
    for (i, part) in dp.parts().iter().enumerate() {
        if !raw_in_universal(&part.support, g, family) {
            definition_holds = false;
            sweep
                .witnesses
                .push(format!("support {} not measurable", part.support));
        }
        if raw_prob(&part.measure, &part.support) != Rational::one() {
            definition_holds = false;
            sweep
                .witnesses
                .push(format!("support {} not fully charged", part.support));
        }
        for other in dp.parts().iter().skip(i + 1) {
            if !part.support.is_disjoint(&other.support) {
                definition_holds = false;
                sweep.witnesses.push(format!(
                    "supports {} and {} overlap",
                    part.support, other.support
                ));
            }
        }
        union = union.union(&part.support);
    }
    if !raw_is_polar(&union.complement_in(family.space()), family) {
        definition_holds = false;
        sweep.witnesses.push("uncovered mass".to_string());
    }

    if definition_holds != engine_verdict {
        sweep.fail(format!(
            "engine verdict {engine_verdict} but definitions give {definition_holds}"
        ));
    } else if !definition_holds {
        sweep.fail("construction violates the definition".to_string());
    }
    Ok(sweep)
}

fn support_sweep(
    family: &MeasureFamily,
    g: &SigmaAlgebra,
    subsets: &[EventSet],
    exhaustive: bool,
    opts: &RunOptions,
    tag: &str,
) -> Sweep {
    let label = format!("oracle:supports[{tag}]");
    if !exhaustive {
        return Sweep::gate(label, family.atom_count(), opts.exhaustive_limit);
    }
    let mut sweep = Sweep::pass(label);
    let dp = build_dominating_partition(family, g).expect("dimensions agree");
    for theta in family.members() {
        let engine_support = qsure::minimal_support(theta, &dp);
        let raw_support = raw_minimal_support(theta, g, family, subsets);
        if engine_support != raw_support {
            sweep.fail(format!(
                "minimal support diverges: engine {engine_support} vs intersection {raw_support}"
            ));
            continue;
        }
        if raw_prob(theta, &engine_support) != Rational::one() {
            sweep.fail(format!("support {engine_support} misses mass"));
        }
        // every measurable null subset of the support is polar
        for a in subsets {
            if a.is_subset(&engine_support)
                && raw_in_universal(a, g, family)
                && raw_prob(theta, a).is_zero()
                && !raw_is_polar(a, family)
            {
                sweep.fail(format!("null subset {a} of the support is not polar"));
            }
        }
    }
    sweep
}

/// Recomputes the verdict of a check from the definitions; `None` when the
/// recomputation is size-gated.
fn recompute_verdict(
    resolved: &Resolved,
    check: &CheckRequest,
    opts: &RunOptions,
) -> Result<Option<Verdict>, CliError> {
    let n = resolved.space.atom_count();
    match check {
        CheckRequest::Axioms { family, samples } => {
            let family = resolved.family(family)?;
            let mut variables: Vec<Vec<Option<Rational>>> = samples
                .iter()
                .map(|s| Ok(option_values(resolved.variable(s)?)))
                .collect::<Result<_, CliError>>()?;
            let mut rng = crate::gen::Rng::new(opts.seed);
            while variables.len() < 2 {
                variables.push(option_values(&crate::gen::random_variable(
                    &mut rng,
                    resolved.space,
                )));
            }
            Ok(Some(Verdict::from_bool(raw_axioms_hold(
                &family, &variables,
            ))))
        }
        CheckRequest::Hahn {
            family,
            sigma_algebra,
            phi,
        } => {
            if n > opts.exhaustive_limit {
                return Ok(None);
            }
            let family = resolved.family(family)?;
            let g = resolved.sigma_algebra(sigma_algebra)?;
            let subsets = all_subsets(n);
            match phi {
                None => {
                    let sweep = hahn_sweep(&family, g, &subsets, true, opts, "re")?;
                    Ok(Some(sweep.verdict))
                }
                Some(phi) => {
                    let sub = resolved.family(phi)?;
                    Ok(Some(Verdict::from_bool(raw_cover_holds(
                        &sub, &family, g, &subsets,
                    ))))
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
            let g = resolved.sigma_algebra(sigma_algebra)?;
            let x = option_values(resolved.variable(variable)?);
            match measure {
                Some(name) => {
                    let theta = resolved.measure(name)?;
                    let dp =
                        build_dominating_partition(&family, g).map_err(CliError::from_engine)?;
                    let engine = qsure::cond_exp_qs(resolved.variable(variable)?, theta, &dp)
                        .map_err(CliError::from_engine)?;
                    Ok(Some(Verdict::from_bool(raw_linear_conditional_consistent(
                        engine.value(),
                        theta,
                        &x,
                        g,
                    ))))
                }
                None => {
                    // the envelope pins the conditional at charged atoms;
                    // compare against the engine's reported value
                    let dp =
                        build_dominating_partition(&family, g).map_err(CliError::from_engine)?;
                    let engine = qsure::cond_sublinear(resolved.variable(variable)?, &dp)
                        .map_err(CliError::from_engine)?;
                    let Some(envelope) = raw_cond_envelope(&x, &family, g) else {
                        return Ok(Some(Verdict::Fail));
                    };
                    let mut ok = true;
                    for atom in family.charged_atoms().iter() {
                        let engine_value = engine.value().value(atom).as_rational();
                        if engine_value != envelope[atom].as_ref() {
                            ok = false;
                        }
                    }
                    Ok(Some(Verdict::from_bool(ok)))
                }
            }
        }
        CheckRequest::Dominance {
            family,
            sigma_algebra,
            variable,
        } => {
            let family = resolved.family(family)?;
            let g = resolved.sigma_algebra(sigma_algebra)?;
            let x = option_values(resolved.variable(variable)?);
            Ok(Some(Verdict::from_bool(raw_dominance_holds(&family, g, &x))))
        }
        CheckRequest::Consistency {
            family,
            sigma_algebra,
            samples,
        } => {
            let family = resolved.family(family)?;
            let g = resolved.sigma_algebra(sigma_algebra)?;
            let mut variables: Vec<Vec<Option<Rational>>> = samples
                .iter()
                .map(|s| Ok(option_values(resolved.variable(s)?)))
                .collect::<Result<_, CliError>>()?;
            if variables.is_empty() {
                let mut rng = crate::gen::Rng::new(opts.seed);
                variables.push(option_values(&crate::gen::random_variable(
                    &mut rng,
                    resolved.space,
                )));
            }
            raw_consistency_verdict(&family, g, &variables, opts.budget)
        }
        CheckRequest::Recursivity { family, variable } => {
            let family = resolved.family(family)?;
            let x = option_values(resolved.variable(variable)?);
            let levels: Vec<&SigmaAlgebra> = resolved
                .filtration_names
                .iter()
                .map(|name| resolved.sigma_algebra(name))
                .collect::<Result<_, _>>()?;
            Ok(Some(Verdict::from_bool(raw_recursivity_holds(
                &family, &levels, &x,
            ))))
        }
        CheckRequest::Martingale {
            family,
            variable,
            expect,
        } => {
            let family = resolved.family(family)?;
            let x = option_values(resolved.variable(variable)?);
            let levels: Vec<&SigmaAlgebra> = resolved
                .filtration_names
                .iter()
                .map(|name| resolved.sigma_algebra(name))
                .collect::<Result<_, _>>()?;
            let class = raw_chain_classification(&family, &levels, &x);
            let expected = expect.as_deref().unwrap_or("martingale");
            Ok(Some(Verdict::from_bool(class.as_deref() == Some(expected))))
        }
        CheckRequest::Oracle => Ok(Some(Verdict::Pass)),
    }
}

fn raw_axioms_hold(family: &MeasureFamily, samples: &[Vec<Option<Rational>>]) -> bool {
    let sup = |values: &[Option<Rational>]| raw_sup_expect(family, values);
    let values: Vec<Rational> = match samples.iter().map(|s| sup(s)).collect() {
        Some(v) => v,
        None => return false,
    };
    // monotone
    for (i, x) in samples.iter().enumerate() {
        for (j, y) in samples.iter().enumerate() {
            let pointwise_ge = x.iter().zip(y).all(|(a, b)| match (a, b) {
                (Some(a), Some(b)) => a >= b,
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => true,
            });
            if pointwise_ge && values[i] < values[j] {
                return false;
            }
        }
    }
    // constants, cash additivity, homogeneity, sublinearity
    let n = family.atom_count();
    for c in [Rational::one(), -Rational::one(), Rational::new(5.into(), 2.into())] {
        let constant = vec![Some(c.clone()); n];
        if sup(&constant) != Some(c.clone()) {
            return false;
        }
        for (i, x) in samples.iter().enumerate() {
            let shifted: Vec<Option<Rational>> = x
                .iter()
                .map(|v| v.as_ref().map(|q| q + &c))
                .collect();
            if sup(&shifted) != Some(&values[i] + &c) {
                return false;
            }
        }
    }
    for (i, x) in samples.iter().enumerate() {
        let two = Rational::new(2.into(), 1.into());
        let doubled: Vec<Option<Rational>> =
            x.iter().map(|v| v.as_ref().map(|q| q * &two)).collect();
        if sup(&doubled) != Some(&values[i] * &two) {
            return false;
        }
        for (j, y) in samples.iter().enumerate() {
            let added: Vec<Option<Rational>> = x
                .iter()
                .zip(y)
                .map(|(a, b)| match (a, b) {
                    (Some(a), Some(b)) => Some(a + b),
                    _ => None,
                })
                .collect();
            match sup(&added) {
                Some(e) if e <= &values[i] + &values[j] => {}
                _ => return false,
            }
        }
    }
    true
}

fn raw_cover_holds(
    sub: &MeasureFamily,
    family: &MeasureFamily,
    g: &SigmaAlgebra,
    subsets: &[EventSet],
) -> bool {
    let supports: Vec<EventSet> = sub
        .members()
        .iter()
        .map(|phi| raw_minimal_support(phi, g, family, subsets))
        .collect();
    for (i, si) in supports.iter().enumerate() {
        for sj in supports.iter().skip(i + 1) {
            if !si.is_disjoint(sj) {
                return false;
            }
        }
    }
    let one = Rational::one();
    for theta in family.members() {
        let covering: Vec<usize> = (0..supports.len())
            .filter(|&i| !raw_prob(theta, &supports[i]).is_zero())
            .collect();
        let covered: Rational = covering.iter().map(|&i| raw_prob(theta, &supports[i])).sum();
        if covered != one {
            return false;
        }
        for &i in &covering {
            for block in g.blocks() {
                let bs = block.intersection(&supports[i]);
                if !bs.is_empty()
                    && !raw_prob(theta, &bs).is_zero()
                    && raw_prob(sub.get(i), &bs).is_zero()
                {
                    return false;
                }
            }
        }
    }
    true
}

/// Checks an engine conditional against the direct block averages at every
/// charged atom, with the defining integral identity per block.
fn raw_linear_conditional_consistent(
    engine: &RandomVariable,
    theta: &Measure,
    values: &[Option<Rational>],
    g: &SigmaAlgebra,
) -> bool {
    for block in g.blocks() {
        let mass = raw_prob(theta, block);
        if mass.is_zero() {
            continue;
        }
        let mut acc = Rational::zero();
        for atom in block.iter() {
            let w = theta.weight(atom);
            if w.is_zero() {
                continue;
            }
            match &values[atom] {
                Some(q) => acc += w * q,
                None => return false,
            }
        }
        let average = acc / &mass;
        // the engine's value must be the block average at charged atoms, so
        // the block integral identity E[1_b x] = E[1_b E[x|g]] holds exactly
        for atom in block.iter() {
            if theta.weight(atom).is_zero() {
                continue;
            }
            if engine.value(atom).as_rational() != Some(&average) {
                return false;
            }
        }
    }
    true
}

fn raw_dominance_holds(
    family: &MeasureFamily,
    g: &SigmaAlgebra,
    values: &[Option<Rational>],
) -> bool {
    let Some(upper) = raw_cond_envelope(values, family, g) else {
        return false;
    };
    let negated: Vec<Option<Rational>> = values.iter().map(|v| v.as_ref().map(|q| -q)).collect();
    let Some(lower_inner) = raw_cond_envelope(&negated, family, g) else {
        return false;
    };
    for theta in family.members() {
        for (atom, w) in theta.weights().iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            let block = g.block_of(atom);
            let mass = raw_prob(theta, block);
            let mut acc = Rational::zero();
            for a in block.iter() {
                let wa = theta.weight(a);
                if wa.is_zero() {
                    continue;
                }
                match &values[a] {
                    Some(q) => acc += wa * q,
                    None => return false,
                }
            }
            let middle = acc / mass;
            let (Some(u), Some(li)) = (&upper[atom], &lower_inner[atom]) else {
                return false;
            };
            let lower = -li;
            if !(lower <= middle && middle <= *u) {
                return false;
            }
        }
    }
    true
}

fn raw_recursivity_holds(
    family: &MeasureFamily,
    levels: &[&SigmaAlgebra],
    values: &[Option<Rational>],
) -> bool {
    let conditionals: Vec<Vec<Option<Rational>>> = match levels
        .iter()
        .map(|g| raw_cond_envelope(values, family, g))
        .collect()
    {
        Some(c) => c,
        None => return false,
    };
    let charged = family.charged_atoms();
    for s in 0..levels.len() {
        for t in s..levels.len() {
            let Some(nested) = raw_cond_envelope(&conditionals[t], family, levels[s]) else {
                return false;
            };
            for atom in charged.iter() {
                if nested[atom] != conditionals[s][atom] {
                    return false;
                }
            }
        }
    }
    true
}

fn raw_chain_classification(
    family: &MeasureFamily,
    levels: &[&SigmaAlgebra],
    values: &[Option<Rational>],
) -> Option<String> {
    let chain: Vec<Vec<Option<Rational>>> = levels
        .iter()
        .map(|g| raw_cond_envelope(values, family, g))
        .collect::<Option<_>>()?;
    let charged = family.charged_atoms();
    let mut sub_ok = true;
    let mut super_ok = true;
    for t in 0..levels.len().saturating_sub(1) {
        let continuation = raw_cond_envelope(&chain[t + 1], family, levels[t])?;
        for atom in charged.iter() {
            let (Some(cur), Some(next)) = (&chain[t][atom], &continuation[atom]) else {
                return None;
            };
            if cur > next {
                sub_ok = false;
            }
            if cur < next {
                super_ok = false;
            }
        }
    }
    Some(
        match (sub_ok, super_ok) {
            (true, true) => "martingale",
            (true, false) => "submartingale",
            (false, true) => "supermartingale",
            (false, false) => "none",
        }
        .to_string(),
    )
}

fn raw_consistency_verdict(
    family: &MeasureFamily,
    g: &SigmaAlgebra,
    samples: &[Vec<Option<Rational>>],
    budget: usize,
) -> Result<Option<Verdict>, CliError> {
    let (stabilized, outcome) =
        qsure::measure::stabilize(family, g, budget).map_err(CliError::from_engine)?;
    if outcome == qsure::measure::StabilizeOutcome::BudgetExhausted {
        return Ok(None);
    }
    // closure verification: originals kept, single pastes stay inside
    for theta in family.members() {
        if !stabilized.contains(theta) {
            return Ok(Some(Verdict::Fail));
        }
    }
    let charged_blocks = |m: &Measure| -> Vec<EventSet> {
        g.blocks()
            .iter()
            .filter(|b| !raw_prob(m, b).is_zero() && !raw_is_polar(b, family))
            .cloned()
            .collect()
    };
    for theta in stabilized.members() {
        for theta_prime in stabilized.members() {
            let shared: Vec<EventSet> = charged_blocks(theta)
                .into_iter()
                .filter(|b| !raw_prob(theta_prime, b).is_zero())
                .collect();
            for mask in 1u64..(1 << shared.len().min(12)) {
                let a = shared
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .fold(EventSet::empty(), |acc, (_, b)| acc.union(b));
                match raw_paste(theta, theta_prime, &a, g) {
                    Some(psi) => {
                        if !stabilized.contains(&psi) {
                            return Ok(Some(Verdict::Fail));
                        }
                    }
                    None => return Ok(Some(Verdict::Fail)),
                }
            }
        }
    }
    let stable = stabilized.len() == family.len();
    // tower property on the samples, by direct envelopes
    let mut recursive = true;
    let mut representation = true;
    for values in samples {
        let Some(direct) = raw_sup_expect(family, values) else {
            return Ok(Some(Verdict::Fail));
        };
        let Some(envelope) = raw_cond_envelope(values, family, g) else {
            return Ok(Some(Verdict::Fail));
        };
        let Some(tower) = raw_sup_expect(family, &envelope) else {
            return Ok(Some(Verdict::Fail));
        };
        if direct != tower {
            recursive = false;
        }
        let Some(closure_sup) = raw_sup_expect(&stabilized, values) else {
            return Ok(Some(Verdict::Fail));
        };
        if closure_sup != tower {
            representation = false;
        }
    }
    Ok(Some(Verdict::from_bool(stable && recursive && representation)))
}

/// Compares an engine conditional value against the blockwise envelope;
/// `Some(description)` on divergence. Exposed for harness self-tests.
pub fn conditional_divergence(
    engine_value: &RandomVariable,
    x: &RandomVariable,
    family: &MeasureFamily,
    g: &SigmaAlgebra,
) -> Option<String> {
    let values = option_values(x);
    let envelope = raw_cond_envelope(&values, family, g)?;
    for atom in family.charged_atoms().iter() {
        let engine = engine_value.value(atom);
        let expected = envelope[atom]
            .clone()
            .map(ExtendedValue::Finite)
            .unwrap_or(ExtendedValue::NegInf);
        if engine != &expected {
            return Some(format!(
                "atom {atom}: engine {engine} vs definition {expected}"
            ));
        }
    }
    None
}
