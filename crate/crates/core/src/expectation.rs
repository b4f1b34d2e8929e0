//! The sublinear expectation and its conditional counterpart under a family
//! of possibly mutually singular measures.
//!
//! The unconditional operator is the maximum of the linear expectations over
//! the family. Conditioning works quasi-surely: per-measure conditional
//! expectations are pinned down on the measure's minimal support, set to
//! `-inf` off it, and combined through the quasi-sure essential supremum over
//! a dominating partition. All equalities between conditional objects are
//! "equal off a polar set", never raw pointwise equality.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::hahn::{minimal_support, DominatingPartition};
use crate::measure::{
    stabilize, ExtendedValue, Measure, MeasureFamily, RandomVariable, StabilizeOutcome,
};
use crate::par;
use crate::rational::{int, rat, Rational};
use crate::space::{EventSet, SigmaAlgebra};

/// Regularity and stabilisation sweeps enumerate all unions of completion
/// blocks up to this block count.
const EXHAUSTIVE_BLOCK_LIMIT: usize = 12;

/// The worst-case expectation over the family: `max` of the member
/// expectations, exact. `-inf` is only tolerated on atoms no member charges.
pub fn sublinear_expectation(x: &RandomVariable, family: &MeasureFamily) -> Result<Rational> {
    let mut best: Option<Rational> = None;
    for theta in family.members() {
        let value = theta.expect(x)?;
        best = Some(match best {
            None => value,
            Some(b) if value > b => value,
            Some(b) => b,
        });
    }
    Ok(best.expect("family is nonempty"))
}

/// A coherent sublinear expectation represented by a measure family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SublinearExpectation {
    family: MeasureFamily,
}

impl SublinearExpectation {
    pub fn new(family: MeasureFamily) -> Self {
        Self { family }
    }

    pub fn family(&self) -> &MeasureFamily {
        &self.family
    }

    pub fn evaluate(&self, x: &RandomVariable) -> Result<Rational> {
        sublinear_expectation(x, &self.family)
    }

    pub fn check_axioms(&self, samples: &[RandomVariable]) -> Result<AxiomReport> {
        check_axioms(&self.family, samples)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    Monotone,
    ConstantInvariant,
    CashAdditive,
    PositivelyHomogeneous,
    Sublinear,
    MonotoneContinuous,
}

impl Axiom {
    pub fn name(&self) -> &'static str {
        match self {
            Axiom::Monotone => "monotone",
            Axiom::ConstantInvariant => "constant-invariant",
            Axiom::CashAdditive => "cash-additive",
            Axiom::PositivelyHomogeneous => "positively-homogeneous",
            Axiom::Sublinear => "sublinear",
            Axiom::MonotoneContinuous => "monotone-continuous",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomViolation {
    pub description: String,
    pub lhs: Rational,
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomOutcome {
    pub axiom: Axiom,
    pub cases: usize,
    pub violation: Option<AxiomViolation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub outcomes: Vec<AxiomOutcome>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.violation.is_none())
    }
}

/// Verifies the defining axioms of a coherent sublinear expectation on the
/// given samples: monotonicity and sublinearity over all sample pairs,
/// constant invariance, cash additivity, positive homogeneity over a fixed
/// constant set, and monotone continuity along increasing nonnegative chains
/// (which on a finite space reach their limit).
pub fn check_axioms(family: &MeasureFamily, samples: &[RandomVariable]) -> Result<AxiomReport> {
    if samples.len() < 2 {
        return Err(Error::NotEnoughSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    let values: Vec<Rational> = samples
        .iter()
        .map(|x| sublinear_expectation(x, family))
        .collect::<Result<_>>()?;

    let constants = [int(1), int(-1), int(5), rat(5, 2)];
    let space = family.space();
    let mut outcomes = Vec::new();

    // monotone: X >= Y pointwise forces E(X) >= E(Y)
    let mut cases = 0;
    let mut violation = None;
    for (i, x) in samples.iter().enumerate() {
        for (j, y) in samples.iter().enumerate() {
            if i == j || !dominates(x, y) {
                continue;
            }
            cases += 1;
            if values[i] < values[j] && violation.is_none() {
                violation = Some(AxiomViolation {
                    description: format!("samples {i} >= {j} pointwise but E is not monotone"),
                    lhs: values[i].clone(),
                    rhs: values[j].clone(),
                });
            }
        }
    }
    outcomes.push(AxiomOutcome {
        axiom: Axiom::Monotone,
        cases,
        violation,
    });

    // constant invariance
    let mut cases = 0;
    let mut violation = None;
    for c in &constants {
        cases += 1;
        let e = sublinear_expectation(&RandomVariable::constant(space, c.clone()), family)?;
        if e != *c && violation.is_none() {
            violation = Some(AxiomViolation {
                description: format!("E({c}) differs from {c}"),
                lhs: e,
                rhs: c.clone(),
            });
        }
    }
    outcomes.push(AxiomOutcome {
        axiom: Axiom::ConstantInvariant,
        cases,
        violation,
    });

    // cash additivity
    let mut cases = 0;
    let mut violation = None;
    for (i, x) in samples.iter().enumerate() {
        for c in &constants {
            cases += 1;
            let shifted = sublinear_expectation(&x.add_constant(c), family)?;
            let expected = &values[i] + c;
            if shifted != expected && violation.is_none() {
                violation = Some(AxiomViolation {
                    description: format!("E(sample {i} + {c}) is not E + {c}"),
                    lhs: shifted,
                    rhs: expected,
                });
            }
        }
    }
    outcomes.push(AxiomOutcome {
        axiom: Axiom::CashAdditive,
        cases,
        violation,
    });

    // positive homogeneity
    let mut cases = 0;
    let mut violation = None;
    for (i, x) in samples.iter().enumerate() {
        for c in [int(2), rat(7, 3)] {
            cases += 1;
            let scaled = sublinear_expectation(&x.scale(&c)?, family)?;
            let expected = &values[i] * &c;
            if scaled != expected && violation.is_none() {
                violation = Some(AxiomViolation {
                    description: format!("E({c} * sample {i}) is not {c} * E"),
                    lhs: scaled,
                    rhs: expected,
                });
            }
        }
    }
    outcomes.push(AxiomOutcome {
        axiom: Axiom::PositivelyHomogeneous,
        cases,
        violation,
    });

    // sublinearity over all pairs
    let mut cases = 0;
    let mut violation = None;
    for (i, x) in samples.iter().enumerate() {
        for (j, y) in samples.iter().enumerate() {
            cases += 1;
            let together = sublinear_expectation(&x.add(y)?, family)?;
            let apart = &values[i] + &values[j];
            if together > apart && violation.is_none() {
                violation = Some(AxiomViolation {
                    description: format!("E(sample {i} + sample {j}) exceeds the sum"),
                    lhs: together,
                    rhs: apart,
                });
            }
        }
    }
    outcomes.push(AxiomOutcome {
        axiom: Axiom::Sublinear,
        cases,
        violation,
    });

    // monotone continuity along nonnegative prefix chains, which attain
    // their pointwise limit on a finite space
    let polar = family.charged_atoms().complement_in(space);
    let mut cases = 0;
    let mut violation = None;
    for x in samples {
        let nonneg = x.fill_neg_inf_on(&polar, &Rational::zero()).abs()?;
        let limit = sublinear_expectation(&nonneg, family)?;
        let mut previous = sublinear_expectation(
            &nonneg.mask(&EventSet::empty()),
            family,
        )?;
        for k in 1..=space.atom_count() {
            cases += 1;
            let prefix: EventSet = (0..k).collect();
            let step = sublinear_expectation(&nonneg.mask(&prefix), family)?;
            if step < previous && violation.is_none() {
                violation = Some(AxiomViolation {
                    description: "expectation decreased along an increasing chain".to_string(),
                    lhs: step.clone(),
                    rhs: previous.clone(),
                });
            }
            previous = step;
        }
        if previous != limit && violation.is_none() {
            violation = Some(AxiomViolation {
                description: "chain limit does not reach the expectation".to_string(),
                lhs: previous,
                rhs: limit,
            });
        }
    }
    outcomes.push(AxiomOutcome {
        axiom: Axiom::MonotoneContinuous,
        cases,
        violation,
    });

    Ok(AxiomReport { outcomes })
}

fn dominates(x: &RandomVariable, y: &RandomVariable) -> bool {
    x.values().iter().zip(y.values()).all(|(a, b)| a >= b)
}

/// The classical essential supremum of a family under one measure. The
/// canonical version returned here is the pointwise maximum; any variable
/// agreeing with it almost surely is an equally valid version.
pub fn classical_esssup(
    members: &[RandomVariable],
    theta: &Measure,
) -> Result<RandomVariable> {
    let first = members.first().ok_or(Error::NotEnoughSamples {
        needed: 1,
        got: 0,
    })?;
    if first.atom_count() != theta.atom_count() {
        return Err(Error::SpaceMismatch {
            left: first.atom_count(),
            right: theta.atom_count(),
        });
    }
    pointwise_sup(members)
}

fn pointwise_sup(members: &[RandomVariable]) -> Result<RandomVariable> {
    let mut it = members.iter();
    let mut acc = it
        .next()
        .ok_or(Error::NotEnoughSamples {
            needed: 1,
            got: 0,
        })?
        .clone();
    for m in it {
        acc = acc.pointwise_max(m)?;
    }
    Ok(acc)
}

/// The quasi-sure essential supremum over the family of the partition:
/// per-part classical essential suprema glued along the part supports, with
/// the pointwise supremum as the canonical value on the leftover polar set.
/// For the canonical classical version this collapses to the global
/// pointwise maximum, which the minimality contract is tested against.
pub fn qs_esssup(
    members: &[RandomVariable],
    dp: &DominatingPartition,
) -> Result<RandomVariable> {
    let sup = pointwise_sup(members)?;
    if sup.atom_count() != dp.atom_count() {
        return Err(Error::SpaceMismatch {
            left: sup.atom_count(),
            right: dp.atom_count(),
        });
    }
    Ok(sup)
}

/// Aggregates a per-measure family of variables into one variable agreeing
/// with each member almost surely under its measure.
///
/// `per_member[i]` belongs to `dp.family().get(i)`. Each variable must be
/// measurable up to null modification under its measure (constant across the
/// charged atoms of each block), and any two must agree at charged atoms of
/// their support intersection. The aggregate is the quasi-sure essential
/// supremum of the variables masked to their supports; on the polar set
/// outside every support it takes the pointwise supremum of the raw inputs.
pub fn aggregate(
    per_member: &[RandomVariable],
    dp: &DominatingPartition,
) -> Result<RandomVariable> {
    let family = dp.family();
    let g = dp.sigma_algebra();
    if per_member.len() != family.len() {
        return Err(Error::NotEnoughSamples {
            needed: family.len(),
            got: per_member.len(),
        });
    }
    for x in per_member {
        if x.atom_count() != dp.atom_count() {
            return Err(Error::SpaceMismatch {
                left: x.atom_count(),
                right: dp.atom_count(),
            });
        }
    }

    // per-measure measurability up to null sets
    for (i, x) in per_member.iter().enumerate() {
        let theta = family.get(i);
        for block in g.blocks() {
            let mut charged = block.iter().filter(|&a| !theta.weight(a).is_zero());
            if let Some(first) = charged.next() {
                for atom in charged {
                    if x.value(atom) != x.value(first) {
                        return Err(Error::NotMeasurableAlmostSurely {
                            member: i,
                            atom_a: first,
                            atom_b: atom,
                        });
                    }
                }
            }
        }
    }

    let supports: Vec<EventSet> = family
        .members()
        .iter()
        .map(|theta| minimal_support(theta, dp))
        .collect();

    // pairwise consistency at charged atoms of support intersections
    for (i, x) in per_member.iter().enumerate() {
        for (j, y) in per_member.iter().enumerate().skip(i + 1) {
            let shared = supports[i].intersection(&supports[j]);
            for atom in shared.iter() {
                let charged = !family.get(i).weight(atom).is_zero()
                    || !family.get(j).weight(atom).is_zero();
                if charged && x.value(atom) != y.value(atom) {
                    return Err(Error::InconsistentFamily {
                        left: i,
                        right: j,
                        atom,
                    });
                }
            }
        }
    }

    let masked: Vec<RandomVariable> = per_member
        .iter()
        .zip(&supports)
        .map(|(x, s)| x.mask_to_support(s))
        .collect();
    let stitched = qs_esssup(&masked, dp)?;
    let covered = supports
        .iter()
        .fold(EventSet::empty(), |acc, s| acc.union(s));
    let uncovered = covered.complement_in(g.space());
    let raw_sup = pointwise_sup(per_member)?;
    let values = (0..dp.atom_count())
        .map(|atom| {
            if uncovered.contains(atom) {
                raw_sup.value(atom).clone()
            } else {
                stitched.value(atom).clone()
            }
        })
        .collect();
    RandomVariable::new(values)
}

/// A conditional expectation value together with the atoms where it is only
/// pinned down up to polar modification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalResult {
    value: RandomVariable,
    polar_mask: EventSet,
}

impl ConditionalResult {
    pub fn new(value: RandomVariable, polar_mask: EventSet) -> Self {
        Self { value, polar_mask }
    }

    pub fn value(&self) -> &RandomVariable {
        &self.value
    }

    pub fn into_value(self) -> RandomVariable {
        self.value
    }

    pub fn polar_mask(&self) -> &EventSet {
        &self.polar_mask
    }

    /// Equality off a polar set, the only meaningful comparison between
    /// conditional results.
    pub fn qs_eq(&self, other: &ConditionalResult, family: &MeasureFamily) -> bool {
        self.value.qs_eq(&other.value, family)
    }
}

/// The minimal quasi-sure version of the conditional expectation of `x`
/// under `theta`: block averages on the minimal support, `-inf` off it.
///
/// A null block inside the support would be polar; it receives the canonical
/// value 0 and is recorded in the polar mask. Requires `x` finite at
/// theta-charged atoms.
pub fn cond_exp_qs(
    x: &RandomVariable,
    theta: &Measure,
    dp: &DominatingPartition,
) -> Result<ConditionalResult> {
    let n = dp.atom_count();
    if x.atom_count() != n || theta.atom_count() != n {
        return Err(Error::SpaceMismatch {
            left: x.atom_count(),
            right: n,
        });
    }
    let g = dp.sigma_algebra();
    let support = minimal_support(theta, dp);
    let mut values = vec![ExtendedValue::NegInf; n];
    let mut polar_mask = EventSet::empty();
    for block in g.blocks() {
        let on_support = block.intersection(&support);
        if on_support.is_empty() {
            continue;
        }
        let mass = theta.prob(block);
        if mass.is_zero() {
            for atom in on_support.iter() {
                values[atom] = ExtendedValue::zero();
                polar_mask.insert(atom);
            }
            continue;
        }
        let mut acc = Rational::zero();
        for atom in block.iter() {
            let w = theta.weight(atom);
            if w.is_zero() {
                continue;
            }
            match x.value(atom) {
                ExtendedValue::Finite(q) => acc += w * q,
                ExtendedValue::NegInf => return Err(Error::NotIntegrable { atom }),
            }
        }
        let average = acc / mass;
        for atom in on_support.iter() {
            values[atom] = ExtendedValue::Finite(average.clone());
        }
    }
    Ok(ConditionalResult::new(
        RandomVariable::new(values)?,
        polar_mask,
    ))
}

/// The conditional sublinear expectation: the quasi-sure essential supremum
/// of the per-measure conditional expectations. Atoms outside every support
/// carry a conventional value and are flagged in the polar mask.
pub fn cond_sublinear(x: &RandomVariable, dp: &DominatingPartition) -> Result<ConditionalResult> {
    let family = dp.family();
    let indexed: Vec<usize> = (0..family.len()).collect();
    let conditionals: Vec<Result<ConditionalResult>> =
        par::map_collect(indexed, |i| cond_exp_qs(x, family.get(i), dp));
    let conditionals = conditionals.into_iter().collect::<Result<Vec<_>>>()?;

    let mut mask = EventSet::empty();
    for c in &conditionals {
        mask = mask.union(c.polar_mask());
    }
    let values: Vec<RandomVariable> = conditionals.iter().map(|c| c.value().clone()).collect();
    let sup = qs_esssup(&values, dp)?;
    for atom in 0..dp.atom_count() {
        if values.iter().all(|v| !v.value(atom).is_finite()) {
            mask.insert(atom);
        }
    }
    Ok(ConditionalResult::new(sup, mask))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominanceViolation {
    pub member: usize,
    pub atom: usize,
    pub lower: Rational,
    pub conditional: Rational,
    pub upper: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominanceReport {
    pub members_checked: usize,
    pub violations: Vec<DominanceViolation>,
}

impl DominanceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the sandwich `-E(-X|G) <= E_theta[X|G] <= E(X|G)` at every atom
/// each member charges.
pub fn check_dominance(x: &RandomVariable, dp: &DominatingPartition) -> Result<DominanceReport> {
    let family = dp.family();
    let canonical = finite_quasi_surely(x, family)?;
    let upper = cond_sublinear(&canonical, dp)?;
    let lower_inner = cond_sublinear(&canonical.negate()?, dp)?;

    let mut violations = Vec::new();
    for (i, theta) in family.members().iter().enumerate() {
        let middle = cond_exp_qs(&canonical, theta, dp)?;
        for atom in theta.charged_atoms().iter() {
            let m = middle
                .value()
                .value(atom)
                .as_rational()
                .expect("conditional finite at charged atom")
                .clone();
            let u = upper
                .value()
                .value(atom)
                .as_rational()
                .expect("upper envelope finite at charged atom")
                .clone();
            let l = -lower_inner
                .value()
                .value(atom)
                .as_rational()
                .expect("lower envelope finite at charged atom");
            if !(l <= m && m <= u) {
                violations.push(DominanceViolation {
                    member: i,
                    atom,
                    lower: l,
                    conditional: m,
                    upper: u,
                });
            }
        }
    }
    Ok(DominanceReport {
        members_checked: family.len(),
        violations,
    })
}

/// Replaces `-inf` on polar atoms by 0 and rejects `-inf` anywhere a member
/// charges.
fn finite_quasi_surely(x: &RandomVariable, family: &MeasureFamily) -> Result<RandomVariable> {
    let polar = family.charged_atoms().complement_in(family.space());
    let filled = x.fill_neg_inf_on(&polar, &Rational::zero());
    if let Some(atom) = filled.neg_inf_atoms().min_atom() {
        return Err(Error::NotIntegrable { atom });
    }
    Ok(filled)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CondAxiom {
    Regularity,
    Monotonicity,
    Triviality,
    CashAdditivity,
    Sublinearity,
    Coherence,
}

impl CondAxiom {
    pub fn name(&self) -> &'static str {
        match self {
            CondAxiom::Regularity => "regularity",
            CondAxiom::Monotonicity => "monotonicity",
            CondAxiom::Triviality => "triviality",
            CondAxiom::CashAdditivity => "cash-additivity",
            CondAxiom::Sublinearity => "sublinearity",
            CondAxiom::Coherence => "coherence",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CondAxiomViolation {
    pub axiom: CondAxiom,
    pub atom: usize,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CondAxiomReport {
    pub cases: usize,
    pub violations: Vec<CondAxiomViolation>,
}

impl CondAxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verifies the defining properties of the conditional operator quasi-surely
/// on `x` and the extra samples: regularity against every universally
/// measurable set, conditional monotonicity, triviality on conditionally
/// measurable variables, cash additivity, sublinearity, and coherence with
/// measurable coefficients.
pub fn check_conditional_axioms(
    x: &RandomVariable,
    dp: &DominatingPartition,
    extras: &[RandomVariable],
) -> Result<CondAxiomReport> {
    let family = dp.family();
    let ucomp = dp.universal_completion();
    let xc = finite_quasi_surely(x, family)?;
    let base = cond_sublinear(&xc, dp)?;
    let mut cases = 0;
    let mut violations = Vec::new();

    let mut push = |axiom: CondAxiom, diff: EventSet, description: String| {
        if let Some(atom) = diff.min_atom() {
            violations.push(CondAxiomViolation {
                axiom,
                atom,
                description,
            });
        }
    };
    let qs_diff = |a: &RandomVariable, b: &RandomVariable| {
        let diff = a.difference_set(b);
        if family.is_polar(&diff) {
            EventSet::empty()
        } else {
            diff
        }
    };
    // atoms where a > b, ignoring polar differences
    let qs_exceeds = |a: &RandomVariable, b: &RandomVariable| {
        let over: EventSet = (0..a.atom_count())
            .filter(|&atom| a.value(atom) > b.value(atom))
            .collect();
        if family.is_polar(&over) {
            EventSet::empty()
        } else {
            over
        }
    };

    // regularity: conditioning commutes with universally measurable masks
    if ucomp.block_count() <= EXHAUSTIVE_BLOCK_LIMIT {
        let masks: Vec<u64> = (0..(1u64 << ucomp.block_count())).collect();
        let worst = par::min_filter_map(masks, |mask| {
            let event = ucomp
                .blocks()
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .fold(EventSet::empty(), |acc, (_, b)| acc.union(b));
            let lhs = match cond_sublinear(&xc.mask(&event), dp) {
                Ok(c) => c.into_value(),
                Err(_) => return None,
            };
            let rhs = base.value().mask(&event);
            let diff = qs_diff(&lhs, &rhs);
            diff.min_atom().map(|atom| (atom, event))
        });
        cases += 1 << ucomp.block_count();
        if let Some((atom, event)) = worst {
            push(
                CondAxiom::Regularity,
                EventSet::singleton(atom),
                format!("masking by {event} does not commute"),
            );
        }
    }

    // monotonicity: lowering the argument cannot raise the conditional
    for lower in [
        xc.add_constant(&int(-1)),
        xc.add(&RandomVariable::indicator(family.space(), &ucomp.blocks()[0].clone())?.negate()?)?,
    ] {
        cases += 1;
        let cond = cond_sublinear(&lower, dp)?;
        let over = qs_exceeds(cond.value(), base.value());
        push(
            CondAxiom::Monotonicity,
            over,
            "conditional increased under a pointwise-smaller argument".to_string(),
        );
    }

    // triviality: conditioning fixes conditionally measurable variables
    cases += 1;
    let repeated = cond_sublinear(base.value(), dp)?;
    push(
        CondAxiom::Triviality,
        qs_diff(repeated.value(), base.value()),
        "conditioning moved an already conditional value".to_string(),
    );
    for block in ucomp.blocks().iter().take(2) {
        cases += 1;
        let ind = RandomVariable::indicator(family.space(), block)?;
        let cond = cond_sublinear(&ind, dp)?;
        push(
            CondAxiom::Triviality,
            qs_diff(cond.value(), &ind),
            format!("indicator of {block} not fixed"),
        );
    }

    // cash additivity by measurable summands
    for yg in measurable_test_variables(ucomp, family.space())? {
        cases += 1;
        let lhs = cond_sublinear(&xc.add(&yg)?, dp)?;
        let rhs = base.value().add(&yg)?;
        push(
            CondAxiom::CashAdditivity,
            qs_diff(lhs.value(), &rhs),
            "measurable summand did not pass through".to_string(),
        );
    }

    // sublinearity over pairs
    let mut others: Vec<RandomVariable> = vec![xc.scale(&int(2))?];
    for e in extras {
        others.push(finite_quasi_surely(e, family)?);
    }
    for z in &others {
        cases += 1;
        let together = cond_sublinear(&xc.add(z)?, dp)?;
        let apart = base.value().add(cond_sublinear(z, dp)?.value())?;
        push(
            CondAxiom::Sublinearity,
            qs_exceeds(together.value(), &apart),
            "conditional of a sum exceeded the sum of conditionals".to_string(),
        );
    }

    // coherence with measurable coefficients, split by sign
    let neg_base = cond_sublinear(&xc.negate()?, dp)?;
    for lambda in measurable_test_variables(ucomp, family.space())? {
        cases += 1;
        let lhs = cond_sublinear(&xc.mul_pointwise(&lambda)?, dp)?;
        let plus = base.value().mul_pointwise(&lambda.positive_part()?)?;
        let minus = neg_base.value().mul_pointwise(&lambda.negative_part()?)?;
        let rhs = plus.add(&minus)?;
        push(
            CondAxiom::Coherence,
            qs_diff(lhs.value(), &rhs),
            "sign-split coherence identity failed".to_string(),
        );
    }

    Ok(CondAxiomReport { cases, violations })
}

/// Block-valued coefficients cycling through a fixed sign pattern, used as
/// measurable summands and multipliers.
fn measurable_test_variables(
    ucomp: &SigmaAlgebra,
    space: crate::space::SampleSpace,
) -> Result<Vec<RandomVariable>> {
    let pattern = [int(2), int(-1), Rational::zero(), int(3), int(-2)];
    let mut lambda_values = vec![ExtendedValue::zero(); space.atom_count()];
    for (i, block) in ucomp.blocks().iter().enumerate() {
        let c = &pattern[i % pattern.len()];
        for atom in block.iter() {
            lambda_values[atom] = ExtendedValue::Finite(c.clone());
        }
    }
    let cycling = RandomVariable::new(lambda_values)?;
    let first_block = RandomVariable::indicator(space, &ucomp.blocks()[0])?;
    Ok(vec![cycling, first_block])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StabilityStatus {
    /// The family is already closed under pasting.
    Stable,
    /// Stabilisation added members.
    Enlarged { added: usize },
    /// The budget ran out before the closure completed.
    Inconclusive { reached: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecursivityCase {
    pub sample: usize,
    /// E(X)
    pub direct: Rational,
    /// E(E(X|G))
    pub tower: Rational,
}

impl RecursivityCase {
    pub fn passed(&self) -> bool {
        self.direct == self.tower
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularityViolation {
    pub sample: usize,
    pub event: EventSet,
    pub atom: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepresentationCase {
    pub sample: usize,
    /// sup over the original family
    pub original: Rational,
    /// sup over the stabilised family
    pub stabilized: Rational,
    /// E(E(X|G))
    pub tower: Rational,
}

impl RepresentationCase {
    /// The stabilised supremum must reproduce the tower value; when the
    /// family was already consistent this equals the original supremum.
    pub fn passed(&self) -> bool {
        self.stabilized == self.tower
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub stability: StabilityStatus,
    pub stabilized: MeasureFamily,
    /// The samples actually tested: caller samples plus generated
    /// indicators, constants and negations.
    pub samples: Vec<(String, RandomVariable)>,
    pub recursivity: Vec<RecursivityCase>,
    pub regularity: Option<RegularityViolation>,
    pub regularity_events: usize,
    pub representation: Vec<RepresentationCase>,
}

impl ConsistencyReport {
    pub fn recursivity_passed(&self) -> bool {
        self.recursivity.iter().all(RecursivityCase::passed)
    }

    pub fn regularity_passed(&self) -> bool {
        self.regularity.is_none()
    }

    /// `None` while the stabilisation budget is exhausted.
    pub fn representation_passed(&self) -> Option<bool> {
        match self.stability {
            StabilityStatus::Inconclusive { .. } => None,
            _ => Some(self.representation.iter().all(RepresentationCase::passed)),
        }
    }

    /// Whether the family is consistent with conditioning on `g`: stable
    /// under pasting with the tower property on every sample. `None` while
    /// stability is inconclusive.
    pub fn consistent(&self) -> Option<bool> {
        match self.stability {
            StabilityStatus::Inconclusive { .. } => None,
            StabilityStatus::Stable => {
                Some(self.recursivity_passed() && self.regularity_passed())
            }
            StabilityStatus::Enlarged { .. } => Some(false),
        }
    }
}

/// Runs the consistency battery for a family against a sub-sigma-algebra:
/// pasting stability, the tower property on every sample, regularity against
/// measurable masks, and the equivalence of the representation over the
/// stabilised family.
pub fn check_consistency(
    family: &MeasureFamily,
    g: &SigmaAlgebra,
    samples: &[RandomVariable],
    budget: usize,
) -> Result<ConsistencyReport> {
    if samples.is_empty() {
        return Err(Error::NotEnoughSamples { needed: 1, got: 0 });
    }
    let dp = crate::hahn::build_dominating_partition(family, g)?;
    let ucomp = dp.universal_completion();
    let space = family.space();

    let mut augmented: Vec<(String, RandomVariable)> = Vec::new();
    for (i, x) in samples.iter().enumerate() {
        augmented.push((format!("sample {i}"), finite_quasi_surely(x, family)?));
    }
    for block in ucomp.blocks() {
        augmented.push((
            format!("indicator {block}"),
            RandomVariable::indicator(space, block)?,
        ));
    }
    for c in [Rational::zero(), Rational::one()] {
        augmented.push((format!("constant {c}"), RandomVariable::constant(space, c)));
    }
    for (i, x) in samples.iter().enumerate() {
        augmented.push((
            format!("negated sample {i}"),
            finite_quasi_surely(x, family)?.negate()?,
        ));
    }

    let (stabilized, outcome) = stabilize(family, g, budget)?;
    let stability = match outcome {
        StabilizeOutcome::BudgetExhausted => StabilityStatus::Inconclusive {
            reached: stabilized.len(),
        },
        StabilizeOutcome::Fixpoint if &stabilized == family => StabilityStatus::Stable,
        StabilizeOutcome::Fixpoint => StabilityStatus::Enlarged {
            added: stabilized.len() - family.len(),
        },
    };

    let mut recursivity = Vec::new();
    let mut representation = Vec::new();
    let mut regularity = None;
    let mut regularity_events = 0;
    for (i, (_, x)) in augmented.iter().enumerate() {
        let conditional = cond_sublinear(x, &dp)?;
        let direct = sublinear_expectation(x, family)?;
        let tower = sublinear_expectation(conditional.value(), family)?;
        recursivity.push(RecursivityCase {
            sample: i,
            direct: direct.clone(),
            tower: tower.clone(),
        });
        representation.push(RepresentationCase {
            sample: i,
            original: direct,
            stabilized: sublinear_expectation(x, &stabilized)?,
            tower,
        });

        if ucomp.block_count() <= EXHAUSTIVE_BLOCK_LIMIT && regularity.is_none() {
            let masks: Vec<u64> = (0..(1u64 << ucomp.block_count())).collect();
            regularity_events += masks.len();
            let blocks = ucomp.blocks().to_vec();
            let base = conditional.value().clone();
            let worst = par::min_filter_map(masks, |mask| {
                let event = blocks
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask & (1 << k) != 0)
                    .fold(EventSet::empty(), |acc, (_, b)| acc.union(b));
                let lhs = match cond_sublinear(&x.mask(&event), &dp) {
                    Ok(c) => c.into_value(),
                    Err(_) => return None,
                };
                let diff = lhs.difference_set(&base.mask(&event));
                if family.is_polar(&diff) {
                    None
                } else {
                    diff.min_atom().map(|atom| (atom, event))
                }
            });
            if let Some((atom, event)) = worst {
                regularity = Some(RegularityViolation {
                    sample: i,
                    event,
                    atom,
                });
            }
        }
    }

    Ok(ConsistencyReport {
        stability,
        stabilized,
        samples: augmented,
        recursivity,
        regularity,
        regularity_events,
        representation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hahn::build_dominating_partition;
    use crate::testutil::*;

    fn dp_for(members: &[Measure]) -> DominatingPartition {
        build_dominating_partition(&fam(members), &g2()).unwrap()
    }

    #[test]
    fn dual_representation_examples() {
        let x = x1234();
        assert_eq!(
            sublinear_expectation(&x, &fam(&[delta(0), delta(1), delta(2), delta(3)])).unwrap(),
            int(4)
        );
        assert_eq!(
            sublinear_expectation(&x, &fam(&[m01(), m23()])).unwrap(),
            rat(7, 2)
        );
        let c = RandomVariable::constant(omega4(), rat(-3, 7));
        assert_eq!(
            sublinear_expectation(&c, &fam(&[m01(), m23()])).unwrap(),
            rat(-3, 7)
        );
    }

    #[test]
    fn evaluation_rejects_neg_inf_on_charged_atom() {
        let x = rv_ext(&[Some(int(1)), None, Some(int(0)), Some(int(0))]);
        assert_eq!(
            sublinear_expectation(&x, &fam(&[uniform4()])).unwrap_err(),
            Error::NotIntegrable { atom: 1 }
        );
        // tolerated where nothing charges
        assert_eq!(
            sublinear_expectation(&x, &fam(&[delta(0)])).unwrap(),
            int(1)
        );
    }

    #[test]
    fn axioms_hold_on_fixtures() {
        let family = fam(&[m01(), m23()]);
        let report = check_axioms(&family, &[x1234(), rv_int(&[1, 0, 0, 0])]).unwrap();
        assert!(report.passed(), "{:?}", report.outcomes);
        // cash additivity fixture: E(X + 5) = 7/2 + 5
        let shifted = sublinear_expectation(&x1234().add_constant(&int(5)), &family).unwrap();
        assert_eq!(shifted, rat(17, 2));
        // sublinearity fixture on indicators
        let family = fam(&[delta(0), delta(1)]);
        let x = rv_int(&[1, 0, 0, 0]);
        let y = rv_int(&[0, 1, 0, 0]);
        let together = sublinear_expectation(&x.add(&y).unwrap(), &family).unwrap();
        assert_eq!(together, int(1));
        assert!(together <= int(2));
    }

    #[test]
    fn axioms_need_two_samples() {
        assert!(check_axioms(&fam(&[uniform4()]), &[x1234()]).is_err());
    }

    #[test]
    fn expectation_type_wraps_family() {
        let e = SublinearExpectation::new(fam(&[m01(), m23()]));
        assert_eq!(e.evaluate(&x1234()).unwrap(), rat(7, 2));
        assert!(e
            .check_axioms(&[x1234(), rv_int(&[0, 1, 0, -1])])
            .unwrap()
            .passed());
        assert_eq!(e.family().len(), 2);
    }

    #[test]
    fn classical_esssup_examples() {
        let sup = classical_esssup(
            &[rv_int(&[1, 0, 0, 0]), rv_int(&[0, 2, 0, 5])],
            &delta(0),
        )
        .unwrap();
        assert_eq!(sup, rv_int(&[1, 2, 0, 5]));
        let single = classical_esssup(&[x1234()], &uniform4()).unwrap();
        assert_eq!(single, x1234());
        let consts = classical_esssup(
            &[
                RandomVariable::constant(omega4(), int(2)),
                RandomVariable::constant(omega4(), int(5)),
            ],
            &uniform4(),
        )
        .unwrap();
        assert_eq!(consts, RandomVariable::constant(omega4(), int(5)));
    }

    #[test]
    fn qs_esssup_examples() {
        let dp = dp_for(&[delta(0), delta(1)]);
        let sup = qs_esssup(&[rv_int(&[1, 1, 0, 0]), rv_int(&[2, 2, 0, 0])], &dp).unwrap();
        assert_eq!(sup, rv_int(&[2, 2, 0, 0]));
        let single = qs_esssup(&[x1234()], &dp).unwrap();
        assert_eq!(single, x1234());
        // {x, -x} for a block-constant x gives |x| pointwise
        let x = rv_int(&[3, 3, -2, -2]);
        let sup = qs_esssup(&[x.clone(), x.negate().unwrap()], &dp).unwrap();
        assert_eq!(sup, rv_int(&[3, 3, 2, 2]));
    }

    #[test]
    fn aggregate_example_with_polar_block() {
        let dp = dp_for(&[delta(0), delta(1)]);
        // family order is canonical: delta1 sorts before delta0
        let family = dp.family().clone();
        let i0 = family.index_of(&delta(0)).unwrap();
        let mut per_member = vec![RandomVariable::constant(omega4(), int(0)); 2];
        per_member[i0] = rv_int(&[7, 9, 0, 0]);
        per_member[1 - i0] = rv_int(&[7, 9, 3, 4]);
        let y = aggregate(&per_member, &dp).unwrap();
        assert_eq!(y, rv_int(&[7, 9, 3, 4]));
        // the aggregate agrees with each member almost surely
        for (i, x) in per_member.iter().enumerate() {
            let diff = y.difference_set(x);
            assert!(family.get(i).is_null_on(&diff));
        }
    }

    #[test]
    fn aggregate_identical_members() {
        let dp = dp_for(&[m01(), m23()]);
        let x = rv(&[rat(3, 2), rat(3, 2), rat(7, 2), rat(7, 2)]);
        let per_member = vec![x.clone(), x.clone()];
        assert_eq!(aggregate(&per_member, &dp).unwrap(), x);
    }

    #[test]
    fn aggregate_rejects_inconsistent() {
        let dp = dp_for(&[delta(0), delta(1)]);
        let family = dp.family().clone();
        let i0 = family.index_of(&delta(0)).unwrap();
        let mut per_member = vec![RandomVariable::constant(omega4(), int(0)); 2];
        per_member[i0] = rv_int(&[7, 9, 0, 0]);
        per_member[1 - i0] = rv_int(&[8, 9, 0, 0]);
        let err = aggregate(&per_member, &dp).unwrap_err();
        match err {
            Error::InconsistentFamily { atom, .. } => assert_eq!(atom, 0),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn aggregate_masks_off_support_junk() {
        // members with disjoint supports and large junk values off them must
        // not leak into each other's almost-sure identity
        let dp = dp_for(&[delta(0), delta(2)]);
        let family = dp.family().clone();
        let i0 = family.index_of(&delta(0)).unwrap();
        let mut per_member = vec![RandomVariable::constant(omega4(), int(0)); 2];
        per_member[i0] = rv_int(&[7, 7, 99, 99]);
        per_member[1 - i0] = rv_int(&[55, 55, 3, 3]);
        let y = aggregate(&per_member, &dp).unwrap();
        for (i, x) in per_member.iter().enumerate() {
            let diff = y.difference_set(x);
            assert!(
                family.get(i).is_null_on(&diff),
                "aggregate differs from member {i} on a charged set"
            );
        }
        assert_eq!(y, rv_int(&[7, 7, 3, 3]));
    }

    #[test]
    fn cond_exp_block_averages() {
        let dp = dp_for(&[uniform4()]);
        let cond = cond_exp_qs(&x1234(), &uniform4(), &dp).unwrap();
        assert_eq!(
            cond.value(),
            &rv(&[rat(3, 2), rat(3, 2), rat(7, 2), rat(7, 2)])
        );
        assert!(cond.polar_mask().is_empty());
    }

    #[test]
    fn cond_exp_masks_off_support() {
        let dp = dp_for(&[m01(), m23()]);
        let cond = cond_exp_qs(&x1234(), &m01(), &dp).unwrap();
        assert_eq!(
            cond.value(),
            &rv_ext(&[Some(rat(3, 2)), Some(rat(3, 2)), None, None])
        );
    }

    #[test]
    fn cond_exp_discrete_is_identity_on_support() {
        let space = omega4();
        let full = SigmaAlgebra::discrete(space);
        let family = fam(&[m01()]);
        let dp = crate::hahn::build_dominating_partition(&family, &full).unwrap();
        let cond = cond_exp_qs(&x1234(), &m01(), &dp).unwrap();
        assert_eq!(cond.value(), &rv_ext(&[Some(int(1)), Some(int(2)), None, None]));
    }

    #[test]
    fn cond_sublinear_examples() {
        let dp = dp_for(&[m01(), m23()]);
        let cond = cond_sublinear(&x1234(), &dp).unwrap();
        assert_eq!(
            cond.value(),
            &rv(&[rat(3, 2), rat(3, 2), rat(7, 2), rat(7, 2)])
        );
        assert!(cond.polar_mask().is_empty());

        let dp = dp_for(&[delta(0), delta(1)]);
        let cond = cond_sublinear(&x1234(), &dp).unwrap();
        assert_eq!(cond.value().value(0), &ExtendedValue::Finite(int(2)));
        assert_eq!(cond.value().value(1), &ExtendedValue::Finite(int(2)));
        assert_eq!(cond.polar_mask(), &ev([2, 3]));

        let full = SigmaAlgebra::discrete(omega4());
        let family = fam(&[m01(), m23()]);
        let dp = crate::hahn::build_dominating_partition(&family, &full).unwrap();
        let cond = cond_sublinear(&x1234(), &dp).unwrap();
        assert!(cond.value().qs_eq(&x1234(), &family));
    }

    #[test]
    fn dominance_sandwich() {
        let dp = dp_for(&[delta(0), m01()]);
        let report = check_dominance(&x1234(), &dp).unwrap();
        assert!(report.passed(), "{:?}", report.violations);
        // fixture values at the first block for the point mass
        let family = dp.family().clone();
        let i = family.index_of(&delta(0)).unwrap();
        let mid = cond_exp_qs(&x1234(), family.get(i), &dp).unwrap();
        assert_eq!(mid.value().value(0), &ExtendedValue::Finite(int(1)));
        let upper = cond_sublinear(&x1234(), &dp).unwrap();
        assert_eq!(upper.value().value(0), &ExtendedValue::Finite(rat(3, 2)));

        // singleton family: equality throughout
        let dp = dp_for(&[uniform4()]);
        let report = check_dominance(&x1234(), &dp).unwrap();
        assert!(report.passed());

        // constants: all three terms coincide
        let c = RandomVariable::constant(omega4(), rat(9, 4));
        let report = check_dominance(&c, &dp).unwrap();
        assert!(report.passed());
    }

    #[test]
    fn conditional_axioms_on_fixtures() {
        for members in [
            vec![m01(), m23()],
            vec![delta(0), delta(1)],
            vec![uniform4(), delta(0)],
        ] {
            let dp = dp_for(&members);
            let report =
                check_conditional_axioms(&x1234(), &dp, &[rv_int(&[2, 0, 4, 4])]).unwrap();
            assert!(report.passed(), "{:?}", report.violations);
        }
    }

    #[test]
    fn consistency_stable_family() {
        let family = fam(&[delta(0), delta(1), delta(2), delta(3)]);
        let report = check_consistency(&family, &g2(), &[x1234()], 100).unwrap();
        assert_eq!(report.stability, StabilityStatus::Stable);
        assert!(report.recursivity_passed());
        assert!(report.regularity_passed());
        assert_eq!(report.representation_passed(), Some(true));
        assert_eq!(report.consistent(), Some(true));
        // E(E(X|G)) = E(X) = 4 on the base sample
        assert_eq!(report.recursivity[0].direct, int(4));
        assert_eq!(report.recursivity[0].tower, int(4));
    }

    #[test]
    fn consistency_detects_pasting_gap() {
        let family = fam(&[uniform4(), delta(0)]);
        let x = rv_int(&[2, 0, 4, 4]);
        let report = check_consistency(&family, &g2(), &[x], 100).unwrap();
        assert_eq!(report.stability, StabilityStatus::Enlarged { added: 2 });
        assert_eq!(report.consistent(), Some(false));
        // the base sample shows the tower gap 5/2 vs 3
        let case = &report.recursivity[0];
        assert_eq!(case.direct, rat(5, 2));
        assert_eq!(case.tower, int(3));
        assert!(!case.passed());
        // stabilisation repairs the representation: the pasted measure
        // (1/2, 0, 1/4, 1/4) reaches the tower value
        let psi = measure(&[(1, 2), (0, 1), (1, 4), (1, 4)]);
        assert!(report.stabilized.contains(&psi));
        assert_eq!(psi.expect(&rv_int(&[2, 0, 4, 4])).unwrap(), int(3));
        let rep = &report.representation[0];
        assert_eq!(rep.stabilized, int(3));
        assert!(rep.passed());
    }

    #[test]
    fn consistency_disjoint_supports() {
        let family = fam(&[m01(), m23()]);
        let report = check_consistency(&family, &g2(), &[x1234()], 100).unwrap();
        assert_eq!(report.stability, StabilityStatus::Stable);
        assert_eq!(report.consistent(), Some(true));
    }

    #[test]
    fn consistency_budget_is_inconclusive() {
        let family = fam(&[uniform4(), delta(0)]);
        let report = check_consistency(&family, &g2(), &[x1234()], 2).unwrap();
        assert!(matches!(
            report.stability,
            StabilityStatus::Inconclusive { .. }
        ));
        assert_eq!(report.consistent(), None);
        assert_eq!(report.representation_passed(), None);
    }
}
