//! Discrete-time filtrations: conditional chains, recursivity across
//! levels, martingale classification, and integrability checks at a finite
//! horizon.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::expectation::{cond_sublinear, sublinear_expectation};
use crate::hahn::{build_dominating_partition, DominatingPartition};
use crate::measure::{ExtendedValue, MeasureFamily, RandomVariable};
use crate::rational::Rational;
use crate::space::{EventSet, SigmaAlgebra};

/// An increasing sequence of sigma-algebras: each level refines the one
/// before it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filtration {
    levels: Vec<SigmaAlgebra>,
}

impl Filtration {
    pub fn new(levels: Vec<SigmaAlgebra>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::NotEnoughSamples { needed: 1, got: 0 });
        }
        for (t, pair) in levels.windows(2).enumerate() {
            if !pair[1].refines(&pair[0]) {
                return Err(Error::FiltrationNotRefining { level: t + 1 });
            }
        }
        Ok(Self { levels })
    }

    pub fn levels(&self) -> &[SigmaAlgebra] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn horizon(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn atom_count(&self) -> usize {
        self.levels[0].atom_count()
    }

    fn partitions_for(&self, family: &MeasureFamily) -> Result<Vec<DominatingPartition>> {
        self.levels
            .iter()
            .map(|g| build_dominating_partition(family, g))
            .collect()
    }
}

/// Variables indexed by filtration level, each measurable (up to polar
/// modification) for the universal completion of its level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptedProcess {
    variables: Vec<RandomVariable>,
}

impl AdaptedProcess {
    pub fn new(
        variables: Vec<RandomVariable>,
        family: &MeasureFamily,
        filtration: &Filtration,
    ) -> Result<Self> {
        if variables.len() != filtration.len() {
            return Err(Error::ProcessLengthMismatch {
                got: variables.len(),
                expected: filtration.len(),
            });
        }
        for (t, (x, level)) in variables.iter().zip(filtration.levels()).enumerate() {
            let ucomp = level.universal_complete(family)?;
            if let Some((a, b)) = qs_measurability_gap(x, &ucomp, family) {
                return Err(Error::NotAdapted {
                    level: t,
                    atom_a: a,
                    atom_b: b,
                });
            }
        }
        Ok(Self { variables })
    }

    pub fn variables(&self) -> &[RandomVariable] {
        &self.variables
    }

    pub fn at(&self, t: usize) -> &RandomVariable {
        &self.variables[t]
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }
}

/// Two charged atoms of one block carrying different values, if any.
fn qs_measurability_gap(
    x: &RandomVariable,
    sigma: &SigmaAlgebra,
    family: &MeasureFamily,
) -> Option<(usize, usize)> {
    let charged = family.charged_atoms();
    for block in sigma.blocks() {
        let mut witness: Option<usize> = None;
        for atom in block.iter().filter(|&a| charged.contains(a)) {
            match witness {
                None => witness = Some(atom),
                Some(first) => {
                    if x.value(atom) != x.value(first) {
                        return Some((first, atom));
                    }
                }
            }
        }
    }
    None
}

/// The chain of conditional sublinear expectations of `x` down the
/// filtration, one dominating partition per level. When the last level is
/// discrete the chain ends at `x` itself (quasi-surely).
pub fn conditional_chain(
    x: &RandomVariable,
    family: &MeasureFamily,
    filtration: &Filtration,
) -> Result<AdaptedProcess> {
    let partitions = filtration.partitions_for(family)?;
    let mut variables = Vec::with_capacity(partitions.len());
    for dp in &partitions {
        variables.push(cond_sublinear(x, dp)?.into_value());
    }
    AdaptedProcess::new(variables, family, filtration)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecursivityFailure {
    pub earlier: usize,
    pub later: usize,
    pub atom: usize,
    pub lhs: ExtendedValue,
    pub rhs: ExtendedValue,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecursivityReport {
    pub pairs_checked: usize,
    pub failures: Vec<RecursivityFailure>,
}

impl RecursivityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Verifies the tower property across every pair of levels: conditioning at
/// `s` after conditioning at `t >= s` must reproduce conditioning at `s`,
/// quasi-surely.
pub fn check_recursivity(
    x: &RandomVariable,
    family: &MeasureFamily,
    filtration: &Filtration,
) -> Result<RecursivityReport> {
    let partitions = filtration.partitions_for(family)?;
    let conditionals: Vec<RandomVariable> = partitions
        .iter()
        .map(|dp| cond_sublinear(x, dp).map(|c| c.into_value()))
        .collect::<Result<_>>()?;

    let mut failures = Vec::new();
    let mut pairs_checked = 0;
    for s in 0..partitions.len() {
        for t in s..partitions.len() {
            pairs_checked += 1;
            let nested = cond_sublinear(&conditionals[t], &partitions[s])?.into_value();
            let diff = nested.difference_set(&conditionals[s]);
            if !family.is_polar(&diff) {
                let atom = diff
                    .iter()
                    .find(|&a| !family.is_polar(&EventSet::singleton(a)))
                    .expect("non-polar difference has a charged atom");
                failures.push(RecursivityFailure {
                    earlier: s,
                    later: t,
                    atom,
                    lhs: nested.value(atom).clone(),
                    rhs: conditionals[s].value(atom).clone(),
                });
            }
        }
    }
    Ok(RecursivityReport {
        pairs_checked,
        failures,
    })
}

/// How a process relates to its own one-step conditional expectations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MartingaleClass {
    /// Equality at every step: both inequalities hold.
    Martingale,
    /// The process never exceeds its conditional continuation.
    Submartingale,
    /// The process never falls below its conditional continuation.
    Supermartingale,
    /// Neither inequality holds at every step.
    NotAMartingale,
}

impl MartingaleClass {
    pub fn name(&self) -> &'static str {
        match self {
            MartingaleClass::Martingale => "martingale",
            MartingaleClass::Submartingale => "submartingale",
            MartingaleClass::Supermartingale => "supermartingale",
            MartingaleClass::NotAMartingale => "none",
        }
    }
}

impl std::str::FromStr for MartingaleClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "martingale" => Ok(MartingaleClass::Martingale),
            "submartingale" => Ok(MartingaleClass::Submartingale),
            "supermartingale" => Ok(MartingaleClass::Supermartingale),
            "none" => Ok(MartingaleClass::NotAMartingale),
            other => Err(format!("unknown martingale class {other:?}")),
        }
    }
}

/// Classifies a process by comparing each variable with the conditional
/// expectation of its successor, quasi-surely at every step.
pub fn classify_martingale(
    process: &AdaptedProcess,
    family: &MeasureFamily,
    filtration: &Filtration,
) -> Result<MartingaleClass> {
    if process.len() != filtration.len() {
        return Err(Error::ProcessLengthMismatch {
            got: process.len(),
            expected: filtration.len(),
        });
    }
    let mut sub_ok = true;
    let mut super_ok = true;
    for t in 0..process.len().saturating_sub(1) {
        let dp = build_dominating_partition(family, &filtration.levels()[t])?;
        let continuation = cond_sublinear(process.at(t + 1), &dp)?.into_value();
        let current = process.at(t);
        let above: EventSet = (0..current.atom_count())
            .filter(|&a| current.value(a) > continuation.value(a))
            .collect();
        let below: EventSet = (0..current.atom_count())
            .filter(|&a| current.value(a) < continuation.value(a))
            .collect();
        sub_ok &= family.is_polar(&above);
        super_ok &= family.is_polar(&below);
    }
    Ok(match (sub_ok, super_ok) {
        (true, true) => MartingaleClass::Martingale,
        (true, false) => MartingaleClass::Submartingale,
        (false, true) => MartingaleClass::Supermartingale,
        (false, false) => MartingaleClass::NotAMartingale,
    })
}

/// The uniform-integrability profile of a set of variables: for each cutoff
/// `c`, the worst-case expectation of `|X|` on `{|X| >= c}` over the set.
/// Nonincreasing in `c` and exactly 0 once `c` exceeds every `|X|`.
pub fn uniform_integrability_profile(
    variables: &[RandomVariable],
    family: &MeasureFamily,
    cutoffs: &[Rational],
) -> Result<BTreeMap<Rational, Rational>> {
    if variables.is_empty() {
        return Err(Error::NotEnoughSamples { needed: 1, got: 0 });
    }
    let mut profile = BTreeMap::new();
    for c in cutoffs {
        let mut worst = Rational::zero();
        for x in variables {
            let magnitude = x.abs()?;
            let tail: EventSet = (0..x.atom_count())
                .filter(|&a| {
                    magnitude
                        .value(a)
                        .as_rational()
                        .is_some_and(|q| q >= c)
                })
                .collect();
            let clipped = magnitude.mask(&tail);
            let value = sublinear_expectation(&clipped, family)?;
            if value > worst {
                worst = value;
            }
        }
        profile.insert(c.clone(), worst);
    }
    Ok(profile)
}

/// Membership in the closure of the bounded variables under the p-norm of
/// the sublinear expectation. On a finite space this reduces to finiteness
/// off a polar set, for every exponent `p >= 1`.
pub fn lpb_membership(
    x: &RandomVariable,
    p: &Rational,
    family: &MeasureFamily,
) -> Result<bool> {
    if p < &Rational::one() {
        return Err(Error::ExponentBelowOne { p: p.clone() });
    }
    Ok(family.is_polar(&x.neg_inf_atoms()))
}
