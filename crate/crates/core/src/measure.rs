//! Exact rational probability measures, measure families, and random
//! variables with values in `Q ∪ {-inf}`.
//!
//! The pasting operation composes two measures through a conditional
//! expectation on a set, and [`stabilize`] closes a family under all
//! admissible pastings; a family fixed under pasting is exactly one whose
//! sublinear expectation is consistent with conditioning.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::par;
use crate::rational::Rational;
use crate::space::{EventSet, SampleSpace, SigmaAlgebra};

/// A value of a random variable: a finite rational or negative infinity.
///
/// `NegInf` orders below every finite value. Arithmetic with `NegInf` is
/// restricted to the contexts where it is used: max/essential-supremum,
/// adding a finite constant (stays `NegInf`), scaling by a positive constant
/// (stays `NegInf`), and masking by an indicator (`0 * NegInf = 0`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtendedValue {
    NegInf,
    Finite(Rational),
}

impl ExtendedValue {
    pub fn zero() -> Self {
        ExtendedValue::Finite(Rational::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedValue::Finite(_))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            ExtendedValue::Finite(q) => Some(q),
            ExtendedValue::NegInf => None,
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl From<Rational> for ExtendedValue {
    fn from(q: Rational) -> Self {
        ExtendedValue::Finite(q)
    }
}

impl fmt::Display for ExtendedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedValue::NegInf => write!(f, "-inf"),
            ExtendedValue::Finite(q) => write!(f, "{q}"),
        }
    }
}

/// An exact probability measure: one nonnegative weight per atom, summing to
/// exactly 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Measure {
    weights: Vec<Rational>,
}

impl Measure {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        for (atom, w) in weights.iter().enumerate() {
            if w.is_negative() {
                return Err(Error::NegativeWeight {
                    atom,
                    weight: w.clone(),
                });
            }
        }
        let sum: Rational = weights.iter().sum();
        if !sum.is_one() {
            return Err(Error::WeightSum { sum });
        }
        Ok(Self { weights })
    }

    pub fn point_mass(space: SampleSpace, atom: usize) -> Result<Self> {
        if atom >= space.atom_count() {
            return Err(Error::AtomOutOfRange {
                atom,
                atom_count: space.atom_count(),
            });
        }
        let mut weights = vec![Rational::zero(); space.atom_count()];
        weights[atom] = Rational::one();
        Ok(Self { weights })
    }

    pub fn uniform(space: SampleSpace) -> Self {
        let n = space.atom_count();
        let w = Rational::new(1.into(), (n as i64).into());
        Self {
            weights: vec![w; n],
        }
    }

    pub fn atom_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, atom: usize) -> &Rational {
        &self.weights[atom]
    }

    pub fn prob(&self, event: &EventSet) -> Rational {
        event.iter().map(|a| &self.weights[a]).sum()
    }

    pub fn is_null_on(&self, event: &EventSet) -> bool {
        event.iter().all(|a| self.weights[a].is_zero())
    }

    /// Atoms carrying strictly positive mass.
    pub fn charged_atoms(&self) -> EventSet {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| !w.is_zero())
            .map(|(a, _)| a)
            .collect()
    }

    /// The linear expectation. `-inf` is only tolerated on atoms this
    /// measure does not charge (they contribute no mass).
    pub fn expect(&self, x: &RandomVariable) -> Result<Rational> {
        self.check_len(x.atom_count())?;
        let mut total = Rational::zero();
        for (atom, w) in self.weights.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            match x.value(atom) {
                ExtendedValue::Finite(q) => total += w * q,
                ExtendedValue::NegInf => return Err(Error::NotIntegrable { atom }),
            }
        }
        Ok(total)
    }

    /// The restriction to a sub-sigma-algebra: mass per block, in block
    /// order. Sums to 1.
    pub fn restrict(&self, g: &SigmaAlgebra) -> Result<Vec<Rational>> {
        self.check_len(g.atom_count())?;
        Ok(g.blocks().iter().map(|b| self.prob(b)).collect())
    }

    fn check_len(&self, other: usize) -> Result<()> {
        if self.atom_count() != other {
            return Err(Error::SpaceMismatch {
                left: self.atom_count(),
                right: other,
            });
        }
        Ok(())
    }
}

/// A finite family of probability measures, deduplicated by exact weight
/// equality and kept in a canonical order, with optional member names.
///
/// Equality compares the member weights only; names are presentation
/// metadata.
#[derive(Debug, Clone)]
pub struct MeasureFamily {
    members: Vec<Measure>,
    names: Vec<Option<String>>,
}

impl PartialEq for MeasureFamily {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members
    }
}

impl Eq for MeasureFamily {}

impl MeasureFamily {
    pub fn new(members: Vec<Measure>) -> Result<Self> {
        let named = members.into_iter().map(|m| (None, m)).collect();
        Self::build(named)
    }

    pub fn with_names(members: Vec<(String, Measure)>) -> Result<Self> {
        let named = members.into_iter().map(|(n, m)| (Some(n), m)).collect();
        Self::build(named)
    }

    fn build(named: Vec<(Option<String>, Measure)>) -> Result<Self> {
        if named.is_empty() {
            return Err(Error::EmptyFamily);
        }
        let n = named[0].1.atom_count();
        for (_, m) in &named {
            if m.atom_count() != n {
                return Err(Error::SpaceMismatch {
                    left: n,
                    right: m.atom_count(),
                });
            }
        }
        let mut sorted = named;
        sorted.sort_by(|a, b| a.1.cmp(&b.1));
        let mut members: Vec<Measure> = Vec::new();
        let mut names: Vec<Option<String>> = Vec::new();
        for (name, m) in sorted {
            if members.last() == Some(&m) {
                // duplicate weights: keep the first name seen
                let last = names.last_mut().expect("nonempty");
                if last.is_none() {
                    *last = name;
                }
            } else {
                members.push(m);
                names.push(name);
            }
        }
        Ok(Self { members, names })
    }

    pub fn members(&self) -> &[Measure] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, index: usize) -> &Measure {
        &self.members[index]
    }

    pub fn name(&self, index: usize) -> Option<&str> {
        self.names[index].as_deref()
    }

    pub fn atom_count(&self) -> usize {
        self.members[0].atom_count()
    }

    pub fn space(&self) -> SampleSpace {
        SampleSpace::new(self.atom_count()).expect("members are nonempty")
    }

    pub fn contains(&self, measure: &Measure) -> bool {
        self.members.binary_search(measure).is_ok()
    }

    pub fn index_of(&self, measure: &Measure) -> Option<usize> {
        self.members.binary_search(measure).ok()
    }

    /// Whether every member assigns probability zero to the event.
    pub fn is_polar(&self, event: &EventSet) -> bool {
        self.members.iter().all(|m| m.is_null_on(event))
    }

    /// Atoms charged by at least one member; the complement is the maximal
    /// polar set.
    pub fn charged_atoms(&self) -> EventSet {
        let mut atoms = BTreeSet::new();
        for m in &self.members {
            atoms.extend(m.charged_atoms().iter());
        }
        atoms.into_iter().collect()
    }
}

/// An atom-indexed variable with values in `Q ∪ {-inf}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RandomVariable {
    values: Vec<ExtendedValue>,
}

impl RandomVariable {
    pub fn new(values: Vec<ExtendedValue>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyVariable);
        }
        Ok(Self { values })
    }

    pub fn from_rationals(values: Vec<Rational>) -> Result<Self> {
        Self::new(values.into_iter().map(ExtendedValue::Finite).collect())
    }

    pub fn constant(space: SampleSpace, c: Rational) -> Self {
        Self {
            values: vec![ExtendedValue::Finite(c); space.atom_count()],
        }
    }

    pub fn indicator(space: SampleSpace, event: &EventSet) -> Result<Self> {
        let e = EventSet::new(space, event.iter())?;
        Ok(Self {
            values: space
                .atoms()
                .map(|a| {
                    ExtendedValue::Finite(if e.contains(a) {
                        Rational::one()
                    } else {
                        Rational::zero()
                    })
                })
                .collect(),
        })
    }

    pub fn atom_count(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[ExtendedValue] {
        &self.values
    }

    pub fn value(&self, atom: usize) -> &ExtendedValue {
        &self.values[atom]
    }

    pub fn is_finite_everywhere(&self) -> bool {
        self.values.iter().all(ExtendedValue::is_finite)
    }

    /// Atoms where the value is `-inf`.
    pub fn neg_inf_atoms(&self) -> EventSet {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_finite())
            .map(|(a, _)| a)
            .collect()
    }

    pub fn pointwise_max(&self, other: &Self) -> Result<Self> {
        self.check_len(other.atom_count())?;
        Ok(Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.clone().max(b.clone()))
                .collect(),
        })
    }

    /// Adds a finite constant; `-inf + c = -inf`.
    pub fn add_constant(&self, c: &Rational) -> Self {
        Self {
            values: self
                .values
                .iter()
                .map(|v| match v {
                    ExtendedValue::Finite(q) => ExtendedValue::Finite(q + c),
                    ExtendedValue::NegInf => ExtendedValue::NegInf,
                })
                .collect(),
        }
    }

    /// Pointwise sum; `-inf` absorbs.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_len(other.atom_count())?;
        Ok(Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| match (a, b) {
                    (ExtendedValue::Finite(x), ExtendedValue::Finite(y)) => {
                        ExtendedValue::Finite(x + y)
                    }
                    _ => ExtendedValue::NegInf,
                })
                .collect(),
        })
    }

    /// Scales by a constant. A zero factor masks everything to 0 (including
    /// `-inf`); a positive factor keeps `-inf`; a negative factor is only
    /// defined on finite values.
    pub fn scale(&self, c: &Rational) -> Result<Self> {
        if c.is_zero() {
            return Ok(Self {
                values: vec![ExtendedValue::zero(); self.values.len()],
            });
        }
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(atom, v)| match v {
                ExtendedValue::Finite(q) => Ok(ExtendedValue::Finite(q * c)),
                ExtendedValue::NegInf if c.is_positive() => Ok(ExtendedValue::NegInf),
                ExtendedValue::NegInf => Err(Error::ScaleNegInf { atom }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { values })
    }

    /// Multiplies by the indicator of `event`: values keep on the event and
    /// mask to 0 off it (`0 * -inf = 0`).
    pub fn mask(&self, event: &EventSet) -> Self {
        Self {
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(a, v)| {
                    if event.contains(a) {
                        v.clone()
                    } else {
                        ExtendedValue::zero()
                    }
                })
                .collect(),
        }
    }

    /// Replaces values outside `support` by `-inf`.
    pub fn mask_to_support(&self, support: &EventSet) -> Self {
        Self {
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(a, v)| {
                    if support.contains(a) {
                        v.clone()
                    } else {
                        ExtendedValue::NegInf
                    }
                })
                .collect(),
        }
    }

    /// Pointwise product with a finite multiplier. `-inf` times a positive
    /// factor stays `-inf`; times zero it masks to 0; a negative factor on
    /// `-inf` is undefined.
    pub fn mul_pointwise(&self, multiplier: &Self) -> Result<Self> {
        self.check_len(multiplier.atom_count())?;
        let values = self
            .values
            .iter()
            .zip(&multiplier.values)
            .enumerate()
            .map(|(atom, (v, m))| {
                let m = match m {
                    ExtendedValue::Finite(q) => q,
                    ExtendedValue::NegInf => return Err(Error::NegateNegInf { atom }),
                };
                match v {
                    ExtendedValue::Finite(q) => Ok(ExtendedValue::Finite(q * m)),
                    ExtendedValue::NegInf if m.is_zero() => Ok(ExtendedValue::zero()),
                    ExtendedValue::NegInf if m.is_positive() => Ok(ExtendedValue::NegInf),
                    ExtendedValue::NegInf => Err(Error::ScaleNegInf { atom }),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { values })
    }

    /// Pointwise `max(x, 0)`; requires finite values.
    pub fn positive_part(&self) -> Result<Self> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(atom, v)| match v {
                ExtendedValue::Finite(q) if q.is_positive() => {
                    Ok(ExtendedValue::Finite(q.clone()))
                }
                ExtendedValue::Finite(_) => Ok(ExtendedValue::zero()),
                ExtendedValue::NegInf => Err(Error::NegateNegInf { atom }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { values })
    }

    /// Pointwise `max(-x, 0)`; requires finite values.
    pub fn negative_part(&self) -> Result<Self> {
        self.negate()?.positive_part()
    }

    pub fn negate(&self) -> Result<Self> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(atom, v)| match v {
                ExtendedValue::Finite(q) => Ok(ExtendedValue::Finite(-q)),
                ExtendedValue::NegInf => Err(Error::NegateNegInf { atom }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { values })
    }

    pub fn abs(&self) -> Result<Self> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(atom, v)| match v {
                ExtendedValue::Finite(q) => Ok(ExtendedValue::Finite(q.abs())),
                ExtendedValue::NegInf => Err(Error::NegateNegInf { atom }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { values })
    }

    /// Atoms where the two variables differ.
    pub fn difference_set(&self, other: &Self) -> EventSet {
        self.values
            .iter()
            .zip(&other.values)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(atom, _)| atom)
            .collect()
    }

    /// Whether the two variables agree off a polar set of the family.
    pub fn qs_eq(&self, other: &Self, family: &MeasureFamily) -> bool {
        family.is_polar(&self.difference_set(other))
    }

    /// A copy with `-inf` replaced by `fill` on the given atoms.
    pub fn fill_neg_inf_on(&self, atoms: &EventSet, fill: &Rational) -> Self {
        Self {
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(a, v)| match v {
                    ExtendedValue::NegInf if atoms.contains(a) => {
                        ExtendedValue::Finite(fill.clone())
                    }
                    other => other.clone(),
                })
                .collect(),
        }
    }

    fn check_len(&self, other: usize) -> Result<()> {
        if self.atom_count() != other {
            return Err(Error::SpaceMismatch {
                left: self.atom_count(),
                right: other,
            });
        }
        Ok(())
    }
}

impl fmt::Display for RandomVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// The minimal measurable support of `theta` relative to `g`, computed by
/// block positivity: the union of the non-polar blocks of `g` charged by
/// `theta`. Agrees with the support derived from a dominating partition.
pub(crate) fn block_support(
    theta: &Measure,
    g: &SigmaAlgebra,
    family: &MeasureFamily,
) -> EventSet {
    let mut support = EventSet::empty();
    for block in g.blocks() {
        if !theta.prob(block).is_zero() && !family.is_polar(block) {
            support = support.union(block);
        }
    }
    support
}

/// The Radon-Nikodym derivative of `theta` with respect to `phi`, both
/// restricted to `g`, cut off outside `s`.
///
/// On each block `b` of `g` with `phi(b ∩ s) > 0` the value is
/// `theta(b ∩ s) / phi(b ∩ s)` across `b ∩ s`; the value is 0 outside `s`
/// and on the phi-null parts of `s`. Requires `theta` restricted to `g` to
/// be absolutely continuous with respect to `phi` on `s`.
pub fn radon_nikodym(
    theta: &Measure,
    phi: &Measure,
    g: &SigmaAlgebra,
    s: &EventSet,
) -> Result<RandomVariable> {
    let n = g.atom_count();
    check_counts(&[theta.atom_count(), phi.atom_count(), n])?;
    let s = EventSet::new(g.space(), s.iter())?;
    let mut values = vec![ExtendedValue::zero(); n];
    for block in g.blocks() {
        let bs = block.intersection(&s);
        if bs.is_empty() {
            continue;
        }
        let t = theta.prob(&bs);
        let p = phi.prob(&bs);
        if p.is_zero() {
            if !t.is_zero() {
                return Err(Error::NotAbsolutelyContinuous {
                    atom: bs.min_atom().expect("nonempty"),
                });
            }
            continue;
        }
        let ratio = t / p;
        for atom in bs.iter() {
            values[atom] = ExtendedValue::Finite(ratio.clone());
        }
    }
    RandomVariable::new(values)
}

/// Pastes `theta` with `theta_prime` over `a`: the result follows `theta`
/// outside `a` and, inside `a`, keeps the `g`-block masses of `theta` while
/// adopting the within-block conditional distribution of `theta_prime`.
///
/// `a` must be measurable in the universal completion of `g` under `family`
/// and lie inside the support intersection of the two measures. The
/// conditional of `theta_prime` on one of its null blocks is taken as 0.
pub fn paste(
    theta: &Measure,
    theta_prime: &Measure,
    a: &EventSet,
    g: &SigmaAlgebra,
    family: &MeasureFamily,
) -> Result<Measure> {
    let n = g.atom_count();
    check_counts(&[theta.atom_count(), theta_prime.atom_count(), n, family.atom_count()])?;
    let ucomp = g.universal_complete(family)?;
    if !ucomp.is_measurable(a)? {
        return Err(Error::PasteSetNotMeasurable);
    }
    let support = block_support(theta, g, family);
    let support_prime = block_support(theta_prime, g, family);
    let allowed = support.intersection(&support_prime);
    if let Some(atom) = a.iter().find(|atom| !allowed.contains(*atom)) {
        return Err(Error::PasteSetOutsideSupports { atom });
    }
    paste_formula(theta, theta_prime, a, g)
}

/// The pasting formula itself; admissibility of `a` is the caller's business.
fn paste_formula(
    theta: &Measure,
    theta_prime: &Measure,
    a: &EventSet,
    g: &SigmaAlgebra,
) -> Result<Measure> {
    let mut weights: Vec<Rational> = theta.weights().to_vec();
    for block in g.blocks() {
        let cut = a.intersection(block);
        if cut.is_empty() {
            continue;
        }
        let block_mass_prime = theta_prime.prob(block);
        if block_mass_prime.is_zero() {
            for atom in cut.iter() {
                weights[atom] = Rational::zero();
            }
            continue;
        }
        let theta_on = theta.prob(&cut);
        for atom in cut.iter() {
            weights[atom] = &theta_on * theta_prime.weight(atom) / &block_mass_prime;
        }
    }
    Measure::new(weights)
}

/// Why a stabilisation run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilizeOutcome {
    /// The family is closed under admissible pastings.
    Fixpoint,
    /// The closure exceeded the member budget and was cut short.
    BudgetExhausted,
}

/// Closes a family under pasting over `g`: a breadth-first sweep over all
/// admissible triples `(theta, theta_prime, a)`, with `a` ranging over the
/// unions of universal-completion blocks inside the support intersection.
/// Stops at a fixpoint or once the member count would exceed `budget`.
pub fn stabilize(
    family: &MeasureFamily,
    g: &SigmaAlgebra,
    budget: usize,
) -> Result<(MeasureFamily, StabilizeOutcome)> {
    if budget < family.len() {
        return Err(Error::BudgetTooSmall {
            budget,
            family_len: family.len(),
        });
    }
    if family.atom_count() != g.atom_count() {
        return Err(Error::SpaceMismatch {
            left: family.atom_count(),
            right: g.atom_count(),
        });
    }

    // The polar structure is invariant under pasting, so the admissible
    // blocks can be fixed against the original family once.
    let non_polar: Vec<bool> = g.blocks().iter().map(|b| !family.is_polar(b)).collect();
    let charged_blocks = |m: &Measure| -> Vec<bool> {
        g.blocks()
            .iter()
            .zip(&non_polar)
            .map(|(b, &keep)| keep && !m.prob(b).is_zero())
            .collect()
    };

    let mut members: Vec<Measure> = family.members().to_vec();
    let mut blocks_of: Vec<Vec<bool>> = members.iter().map(&charged_blocks).collect();
    let mut seen: BTreeSet<Measure> = members.iter().cloned().collect();
    let mut frontier: Vec<usize> = (0..members.len()).collect();
    let mut outcome = StabilizeOutcome::Fixpoint;

    'closure: while !frontier.is_empty() {
        let mut tasks: Vec<(usize, usize)> = Vec::new();
        for &new in &frontier {
            for old in 0..members.len() {
                if new != old {
                    tasks.push((new, old));
                    tasks.push((old, new));
                }
            }
        }
        tasks.sort_unstable();
        tasks.dedup();

        let member_view = &members;
        let blocks_view = &blocks_of;
        let produced: Vec<Vec<Measure>> = par::map_collect(tasks, |(lhs, rhs)| {
            admissible_pastes(
                &member_view[lhs],
                &member_view[rhs],
                &blocks_view[lhs],
                &blocks_view[rhs],
                g,
            )
        });

        let mut added: Vec<Measure> = Vec::new();
        for candidate in produced.into_iter().flatten() {
            if seen.contains(&candidate) {
                continue;
            }
            if members.len() + added.len() + 1 > budget {
                outcome = StabilizeOutcome::BudgetExhausted;
                members.extend(added);
                break 'closure;
            }
            seen.insert(candidate.clone());
            added.push(candidate);
        }
        added.sort_unstable();
        frontier = (members.len()..members.len() + added.len()).collect();
        blocks_of.extend(added.iter().map(&charged_blocks));
        members.extend(added);
    }

    let stabilized = MeasureFamily::new(members)?;
    Ok((stabilized, outcome))
}

/// All pastes of an ordered pair over the nonempty unions of blocks both
/// measures charge.
fn admissible_pastes(
    theta: &Measure,
    theta_prime: &Measure,
    theta_blocks: &[bool],
    theta_prime_blocks: &[bool],
    g: &SigmaAlgebra,
) -> Vec<Measure> {
    let shared: Vec<&EventSet> = g
        .blocks()
        .iter()
        .enumerate()
        .filter(|(i, _)| theta_blocks[*i] && theta_prime_blocks[*i])
        .map(|(_, b)| b)
        .collect();
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << shared.len()) {
        let mut a = EventSet::empty();
        for (i, block) in shared.iter().enumerate() {
            if mask & (1 << i) != 0 {
                a = a.union(block);
            }
        }
        let pasted =
            paste_formula(theta, theta_prime, &a, g).expect("admissible paste cannot fail");
        out.push(pasted);
    }
    out
}

fn check_counts(counts: &[usize]) -> Result<()> {
    for pair in counts.windows(2) {
        if pair[0] != pair[1] {
            return Err(Error::SpaceMismatch {
                left: pair[0],
                right: pair[1],
            });
        }
    }
    Ok(())
}
