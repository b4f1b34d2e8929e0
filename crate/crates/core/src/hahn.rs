//! Dominating partitions: a family of mutually singular measures with
//! pairwise-disjoint measurable supports that generates the same polar sets
//! and the same completed sets as the ambient family restricted to a
//! sub-sigma-algebra. On a finite space such a partition always exists; the
//! canonical construction here takes the connected components of the
//! incidence between measures and the completion blocks they charge.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::measure::{block_support, Measure, MeasureFamily};
use crate::par;
use crate::rational::Rational;
use crate::space::{EventSet, SigmaAlgebra};

/// Exhaustive subset enumeration is used up to this many generator blocks.
const EXHAUSTIVE_BLOCK_LIMIT: usize = 16;

/// One part of a dominating partition: a measure together with the set that
/// supports it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominatingPart {
    pub measure: Measure,
    pub support: EventSet,
}

/// A candidate dominating partition for a family over a sub-sigma-algebra.
///
/// Construction only validates dimensions; whether the candidate actually
/// dominates is the business of [`verify_hahn`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominatingPartition {
    g: SigmaAlgebra,
    family: MeasureFamily,
    ucomp: SigmaAlgebra,
    parts: Vec<DominatingPart>,
}

impl DominatingPartition {
    pub fn from_parts(
        g: SigmaAlgebra,
        family: MeasureFamily,
        parts: Vec<DominatingPart>,
    ) -> Result<Self> {
        let n = g.atom_count();
        if family.atom_count() != n {
            return Err(Error::SpaceMismatch {
                left: n,
                right: family.atom_count(),
            });
        }
        for part in &parts {
            if part.measure.atom_count() != n {
                return Err(Error::SpaceMismatch {
                    left: n,
                    right: part.measure.atom_count(),
                });
            }
            if let Some(atom) = part.support.iter().find(|&a| a >= n) {
                return Err(Error::AtomOutOfRange {
                    atom,
                    atom_count: n,
                });
            }
        }
        let ucomp = g.universal_complete(&family)?;
        Ok(Self {
            g,
            family,
            ucomp,
            parts,
        })
    }

    pub fn sigma_algebra(&self) -> &SigmaAlgebra {
        &self.g
    }

    pub fn family(&self) -> &MeasureFamily {
        &self.family
    }

    /// The universal completion of the sigma-algebra under the family.
    pub fn universal_completion(&self) -> &SigmaAlgebra {
        &self.ucomp
    }

    pub fn parts(&self) -> &[DominatingPart] {
        &self.parts
    }

    pub fn atom_count(&self) -> usize {
        self.g.atom_count()
    }

    /// The union of the part supports; its complement is polar when the
    /// partition verifies.
    pub fn covered_atoms(&self) -> EventSet {
        self.parts
            .iter()
            .fold(EventSet::empty(), |acc, p| acc.union(&p.support))
    }
}

/// Builds the finest dominating partition for `family` over `g`.
///
/// Blocks of the universal completion are joined whenever one member charges
/// both; each connected component becomes a part whose support is the union
/// of its blocks and whose measure is the equal-weight average of the
/// component members' restrictions, spread uniformly over the atoms of each
/// block of `g`.
pub fn build_dominating_partition(
    family: &MeasureFamily,
    g: &SigmaAlgebra,
) -> Result<DominatingPartition> {
    if family.atom_count() != g.atom_count() {
        return Err(Error::SpaceMismatch {
            left: family.atom_count(),
            right: g.atom_count(),
        });
    }
    let ucomp = g.universal_complete(family)?;
    let blocks = ucomp.blocks();

    // incidence: which completion blocks each member charges
    let charged: Vec<Vec<usize>> = family
        .members()
        .iter()
        .map(|theta| {
            blocks
                .iter()
                .enumerate()
                .filter(|(_, b)| !theta.prob(b).is_zero())
                .map(|(j, _)| j)
                .collect()
        })
        .collect();

    // connected components over blocks, joined through measures
    let mut component = (0..blocks.len()).collect::<Vec<usize>>();
    fn root(component: &mut [usize], mut j: usize) -> usize {
        while component[j] != j {
            component[j] = component[component[j]];
            j = component[j];
        }
        j
    }
    for hit in &charged {
        if let Some((&first, rest)) = hit.split_first() {
            for &j in rest {
                let (a, b) = (root(&mut component, first), root(&mut component, j));
                if a != b {
                    component[a.max(b)] = a.min(b);
                }
            }
        }
    }

    // group members by the component of their charged blocks
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for (i, hit) in charged.iter().enumerate() {
        let comp = root(&mut component, hit[0]);
        match groups.iter_mut().find(|(c, _)| *c == comp) {
            Some((_, members)) => members.push(i),
            None => groups.push((comp, vec![i])),
        }
    }
    groups.sort_by_key(|(c, _)| *c);

    let n = g.atom_count();
    let mut parts = Vec::with_capacity(groups.len());
    for (comp, member_ids) in groups {
        let support: EventSet = charged
            .iter()
            .enumerate()
            .filter(|(i, _)| member_ids.contains(i))
            .flat_map(|(_, hit)| hit.iter())
            .filter(|&&j| root(&mut component, j) == comp)
            .flat_map(|&j| blocks[j].iter())
            .collect();
        // equal-weight average of the members' block masses, spread uniformly
        // over the atoms of each block of g
        let k = Rational::from_integer((member_ids.len() as i64).into());
        let mut weights = vec![Rational::zero(); n];
        for &i in &member_ids {
            let theta = family.get(i);
            for block in g.blocks() {
                let mass = theta.prob(block);
                if mass.is_zero() {
                    continue;
                }
                let share = mass / Rational::from_integer((block.len() as i64).into()) / &k;
                for atom in block.iter() {
                    weights[atom] += &share;
                }
            }
        }
        parts.push(DominatingPart {
            measure: Measure::new(weights)?,
            support,
        });
    }
    parts.sort_by_key(|p| p.support.min_atom());

    DominatingPartition::from_parts(g.clone(), family.clone(), parts)
}

/// Outcome of a single verification condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Condition {
    Pass,
    Fail { witness: EventSet, detail: String },
}

impl Condition {
    pub fn passed(&self) -> bool {
        matches!(self, Condition::Pass)
    }

    fn fail(witness: EventSet, detail: impl Into<String>) -> Self {
        Condition::Fail {
            witness,
            detail: detail.into(),
        }
    }
}

/// Per-condition verdicts for a candidate dominating partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HahnReport {
    /// The part measures and the family generate the same polar sets.
    pub same_polar_sets: Condition,
    /// The part measures induce the same universal completion.
    pub same_completion: Condition,
    /// Supports are disjoint, measurable, fully charged, and jointly carry
    /// every member.
    pub supports: Condition,
}

impl HahnReport {
    pub fn passed(&self) -> bool {
        self.same_polar_sets.passed() && self.same_completion.passed() && self.supports.passed()
    }
}

/// Checks a candidate dominating partition against its family, enumerating
/// measurable sets exhaustively at desk scale.
pub fn verify_hahn(candidate: &DominatingPartition) -> Result<HahnReport> {
    let g = candidate.sigma_algebra();
    let family = candidate.family();
    let ucomp_family = candidate.universal_completion();

    let supports = verify_supports(candidate, ucomp_family);

    if candidate.parts.is_empty() {
        let witness = family.charged_atoms();
        let detail = "no parts: the family's charged atoms are uncovered".to_string();
        return Ok(HahnReport {
            same_polar_sets: Condition::fail(witness.clone(), detail.clone()),
            same_completion: Condition::fail(witness, detail),
            supports,
        });
    }

    let phi_family = MeasureFamily::new(
        candidate
            .parts
            .iter()
            .map(|p| p.measure.clone())
            .collect(),
    )?;
    let ucomp_phi = g.universal_complete(&phi_family)?;

    // enumerate over unions of blocks of the common refinement of the two
    // completions, so every set of either completion is covered; coarse
    // sets are scanned first so the witness reported is the coarsest one
    let refinement = common_refinement(ucomp_family, &ucomp_phi);
    let same_polar_sets;
    let same_completion;
    if refinement.block_count() <= EXHAUSTIVE_BLOCK_LIMIT {
        let polar_witness = [g, &refinement].into_iter().find_map(|partition| {
            let masks: Vec<u64> = (0..(1u64 << partition.block_count())).collect();
            par::min_filter_map(masks, |mask| {
                let a = union_of_blocks(partition, mask);
                (family.is_polar(&a) != phi_family.is_polar(&a)).then_some((mask, a))
            })
        });
        same_polar_sets = match polar_witness {
            None => Condition::Pass,
            Some((_, a)) => {
                let detail = if phi_family.is_polar(&a) {
                    format!("{a} is polar for the parts but not for the family")
                } else {
                    format!("{a} is polar for the family but not for the parts")
                };
                Condition::fail(a, detail)
            }
        };
        let masks: Vec<u64> = (0..(1u64 << refinement.block_count())).collect();
        let completion_witness = par::min_filter_map(masks, |mask| {
            let a = union_of_blocks(&refinement, mask);
            let in_family = ucomp_family.is_measurable(&a).expect("in range");
            let in_phi = ucomp_phi.is_measurable(&a).expect("in range");
            (in_family != in_phi).then_some((mask, a))
        });
        same_completion = match completion_witness {
            None => Condition::Pass,
            Some((_, a)) => Condition::fail(
                a.clone(),
                format!("{a} is measurable in only one of the two completions"),
            ),
        };
    } else {
        // blockwise equivalents of the same two conditions
        same_polar_sets = match refinement
            .blocks()
            .iter()
            .find(|b| family.is_polar(b) != phi_family.is_polar(b))
        {
            None => Condition::Pass,
            Some(b) => Condition::fail(b.clone(), format!("{b} is polar on one side only")),
        };
        same_completion = if ucomp_family == &ucomp_phi {
            Condition::Pass
        } else {
            Condition::fail(EventSet::empty(), "completions differ".to_string())
        };
    }

    Ok(HahnReport {
        same_polar_sets,
        same_completion,
        supports,
    })
}

fn verify_supports(candidate: &DominatingPartition, ucomp: &SigmaAlgebra) -> Condition {
    let parts = candidate.parts();
    for (i, a) in parts.iter().enumerate() {
        for b in parts.iter().skip(i + 1) {
            let overlap = a.support.intersection(&b.support);
            if !overlap.is_empty() {
                return Condition::fail(overlap.clone(), format!("supports overlap on {overlap}"));
            }
        }
    }
    for part in parts {
        if !ucomp.is_measurable(&part.support).unwrap_or(false) {
            return Condition::fail(
                part.support.clone(),
                format!("support {} is not universally measurable", part.support),
            );
        }
        let mass = part.measure.prob(&part.support);
        if mass != Rational::from_integer(1.into()) {
            return Condition::fail(
                part.support.clone(),
                format!("part measure carries mass {mass} on its support"),
            );
        }
    }
    let uncovered = candidate
        .covered_atoms()
        .complement_in(candidate.sigma_algebra().space());
    if !candidate.family().is_polar(&uncovered) {
        return Condition::fail(
            uncovered.clone(),
            format!("uncovered set {uncovered} is not polar"),
        );
    }
    Condition::Pass
}

fn common_refinement(a: &SigmaAlgebra, b: &SigmaAlgebra) -> SigmaAlgebra {
    let mut blocks = Vec::new();
    for ba in a.blocks() {
        for bb in b.blocks() {
            let meet = ba.intersection(bb);
            if !meet.is_empty() {
                blocks.push(meet);
            }
        }
    }
    SigmaAlgebra::new(a.space(), blocks).expect("intersections partition the space")
}

fn union_of_blocks(partition: &SigmaAlgebra, mask: u64) -> EventSet {
    partition
        .blocks()
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .fold(EventSet::empty(), |acc, (_, b)| acc.union(b))
}

/// The minimal measurable support of `theta` relative to the partition: the
/// atoms of each part support whose block carries theta-mass.
pub fn minimal_support(theta: &Measure, dp: &DominatingPartition) -> EventSet {
    let g = dp.sigma_algebra();
    let mut support = EventSet::empty();
    for part in dp.parts() {
        for block in g.blocks() {
            let bs = block.intersection(&part.support);
            if !bs.is_empty() && !theta.prob(&bs).is_zero() {
                support = support.union(&bs);
            }
        }
    }
    support
}

/// How one family member fares in a countable-cover check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemberCover {
    pub member: usize,
    /// Sub-family indices whose supports carry the member.
    pub covering: Vec<usize>,
    pub failure: Option<CoverFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverFailure {
    /// The covering supports only carry this much of the member's mass.
    MassShortfall { covered: Rational },
    /// The member charges part of a support where the dominating measure
    /// vanishes.
    NotAbsolutelyContinuous { part: usize, atom: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverReport {
    pub satisfied: bool,
    pub per_member: Vec<MemberCover>,
}

/// Checks the countable-cover criterion: a sub-family with pairwise-disjoint
/// supports dominates the whole family if every member is carried by the
/// supports of some sub-list, absolutely continuously on each.
///
/// On a finite space the covering sub-list is forced: exactly the sub-family
/// members whose supports the measure charges.
pub fn check_countable_cover(
    sub: &MeasureFamily,
    family: &MeasureFamily,
    g: &SigmaAlgebra,
) -> Result<CoverReport> {
    if sub.atom_count() != family.atom_count() {
        return Err(Error::SpaceMismatch {
            left: sub.atom_count(),
            right: family.atom_count(),
        });
    }
    for (i, phi) in sub.members().iter().enumerate() {
        if !family.contains(phi) {
            return Err(Error::NotASubfamily { member: i });
        }
    }

    let supports: Vec<EventSet> = sub
        .members()
        .iter()
        .map(|phi| block_support(phi, g, family))
        .collect();
    for (i, si) in supports.iter().enumerate() {
        for (j, sj) in supports.iter().enumerate().skip(i + 1) {
            let overlap = si.intersection(sj);
            if let Some(atom) = overlap.min_atom() {
                return Err(Error::SupportsNotDisjoint {
                    left: i,
                    right: j,
                    atom,
                });
            }
        }
    }

    let one = Rational::from_integer(1.into());
    let mut per_member = Vec::with_capacity(family.len());
    let mut satisfied = true;
    for (m, theta) in family.members().iter().enumerate() {
        let covering: Vec<usize> = supports
            .iter()
            .enumerate()
            .filter(|(_, s)| !theta.prob(s).is_zero())
            .map(|(i, _)| i)
            .collect();
        let covered: Rational = covering.iter().map(|&i| theta.prob(&supports[i])).sum();
        let mut failure = None;
        if covered != one {
            failure = Some(CoverFailure::MassShortfall { covered });
        } else {
            'outer: for &i in &covering {
                for block in g.blocks() {
                    let bs = block.intersection(&supports[i]);
                    if bs.is_empty() {
                        continue;
                    }
                    if !theta.prob(&bs).is_zero() && sub.get(i).prob(&bs).is_zero() {
                        failure = Some(CoverFailure::NotAbsolutelyContinuous {
                            part: i,
                            atom: bs.min_atom().expect("nonempty"),
                        });
                        break 'outer;
                    }
                }
            }
        }
        satisfied &= failure.is_none();
        per_member.push(MemberCover {
            member: m,
            covering,
            failure,
        });
    }

    Ok(CoverReport {
        satisfied,
        per_member,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::radon_nikodym;
    use crate::rational::rat;
    use crate::testutil::*;

    fn lifted_block_mass(block_weights: &[(i64, i64)]) -> Measure {
        // spreads the given g2 block masses uniformly inside each block
        let (a, b) = (block_weights[0], block_weights[1]);
        measure(&[(a.0, a.1 * 2), (a.0, a.1 * 2), (b.0, b.1 * 2), (b.0, b.1 * 2)])
    }

    #[test]
    fn build_separates_point_masses() {
        let family = fam(&[delta(0), delta(1), delta(2), delta(3)]);
        let dp = build_dominating_partition(&family, &g2()).unwrap();
        assert_eq!(dp.parts().len(), 2);
        assert_eq!(dp.parts()[0].support, ev([0, 1]));
        assert_eq!(dp.parts()[0].measure, lifted_block_mass(&[(1, 1), (0, 1)]));
        assert_eq!(dp.parts()[1].support, ev([2, 3]));
        assert_eq!(dp.parts()[1].measure, lifted_block_mass(&[(0, 1), (1, 1)]));
        assert!(verify_hahn(&dp).unwrap().passed());
    }

    #[test]
    fn build_single_measure() {
        let family = fam(&[uniform4()]);
        let dp = build_dominating_partition(&family, &g2()).unwrap();
        assert_eq!(dp.parts().len(), 1);
        assert_eq!(dp.parts()[0].support, ev([0, 1, 2, 3]));
        assert_eq!(dp.parts()[0].measure, uniform4());
        assert!(verify_hahn(&dp).unwrap().passed());
    }

    #[test]
    fn build_mixed_family() {
        let family = fam(&[delta(0), m23()]);
        let dp = build_dominating_partition(&family, &g2()).unwrap();
        assert_eq!(dp.parts().len(), 2);
        assert_eq!(dp.parts()[0].support, ev([0, 1]));
        assert_eq!(dp.parts()[1].support, ev([2, 3]));
        assert!(verify_hahn(&dp).unwrap().passed());
    }

    #[test]
    fn verify_rejects_missing_part() {
        // a single part built from delta0 cannot dominate {delta0, delta2}
        let family = fam(&[delta(0), delta(2)]);
        let candidate = DominatingPartition::from_parts(
            g2(),
            family,
            vec![DominatingPart {
                measure: m01(),
                support: ev([0, 1]),
            }],
        )
        .unwrap();
        let report = verify_hahn(&candidate).unwrap();
        assert!(!report.passed());
        match &report.same_polar_sets {
            Condition::Fail { witness, .. } => assert_eq!(*witness, ev([2, 3])),
            Condition::Pass => panic!("polar condition should fail"),
        }
    }

    #[test]
    fn verify_rejects_wrong_completion() {
        // a single uniform part over {delta0, delta1}: the family's
        // completion splits the null block {2,3}, the part's does not
        let family = fam(&[delta(0), delta(1)]);
        let candidate = DominatingPartition::from_parts(
            g2(),
            family,
            vec![DominatingPart {
                measure: uniform4(),
                support: ev([0, 1, 2, 3]),
            }],
        )
        .unwrap();
        let report = verify_hahn(&candidate).unwrap();
        match &report.same_polar_sets {
            Condition::Fail { witness, .. } => assert_eq!(*witness, ev([2, 3])),
            Condition::Pass => panic!("polar condition should fail"),
        }
        assert!(!report.same_completion.passed());
        assert!(report.supports.passed());
    }

    #[test]
    fn verify_rejects_overlapping_supports() {
        let family = fam(&[delta(0), delta(2)]);
        let candidate = DominatingPartition::from_parts(
            g2(),
            family,
            vec![
                DominatingPart {
                    measure: m01(),
                    support: ev([0, 1]),
                },
                DominatingPart {
                    measure: m23(),
                    support: ev([0, 1, 2, 3]),
                },
            ],
        )
        .unwrap();
        let report = verify_hahn(&candidate).unwrap();
        match &report.supports {
            Condition::Fail { witness, .. } => assert_eq!(*witness, ev([0, 1])),
            Condition::Pass => panic!("support condition should fail"),
        }
    }

    #[test]
    fn verify_large_space_uses_blockwise_fallback() {
        // 20 singleton blocks exceed the subset-enumeration cap; the
        // blockwise equivalents must still verify the canonical build
        let space = crate::space::SampleSpace::new(20).unwrap();
        let g = crate::space::SigmaAlgebra::discrete(space);
        let family = crate::measure::MeasureFamily::new(vec![
            crate::measure::Measure::uniform(space),
            crate::measure::Measure::point_mass(space, 3).unwrap(),
        ])
        .unwrap();
        let dp = build_dominating_partition(&family, &g).unwrap();
        assert!(verify_hahn(&dp).unwrap().passed());
    }

    #[test]
    fn minimal_support_examples() {
        let dp = build_dominating_partition(&fam(&[uniform4()]), &g2()).unwrap();
        assert_eq!(minimal_support(&uniform4(), &dp), ev([0, 1, 2, 3]));

        let dp = build_dominating_partition(&fam(&[uniform4(), m01_skew()]), &g2()).unwrap();
        assert_eq!(minimal_support(&m01_skew(), &dp), ev([0, 1]));

        let dp = build_dominating_partition(&fam(&[delta(0), delta(2)]), &g2()).unwrap();
        // the completion atom containing 0 is the whole block {0,1}
        assert_eq!(minimal_support(&delta(0), &dp), ev([0, 1]));
    }

    #[test]
    fn support_agrees_with_esssup_route() {
        // the support by block positivity must match the set where some
        // Radon-Nikodym derivative against a part measure is positive
        for family in [
            fam(&[delta(0), delta(2)]),
            fam(&[uniform4(), m01_skew()]),
            fam(&[m01(), m23(), delta(3)]),
        ] {
            let dp = build_dominating_partition(&family, &g2()).unwrap();
            for theta in family.members() {
                let by_blocks = minimal_support(theta, &dp);
                let mut by_density = EventSet::empty();
                for part in dp.parts() {
                    let lambda =
                        radon_nikodym(theta, &part.measure, &g2(), &part.support).unwrap();
                    for atom in part.support.iter() {
                        if lambda.value(atom).as_rational().is_some_and(|q| !q.is_zero()) {
                            by_density.insert(atom);
                        }
                    }
                }
                assert_eq!(by_blocks, by_density);
            }
        }
    }

    #[test]
    fn cover_with_shadow_member() {
        // delta1 restricted to g2 looks exactly like delta0, so {delta0,
        // delta2} covers all three
        let family = fam(&[delta(0), delta(1), delta(2)]);
        let sub = fam(&[delta(0), delta(2)]);
        let report = check_countable_cover(&sub, &family, &g2()).unwrap();
        assert!(report.satisfied);
        let member = family.index_of(&delta(1)).unwrap();
        let covering = &report.per_member[member].covering;
        assert_eq!(covering.len(), 1);
        assert_eq!(sub.get(covering[0]), &delta(0));
    }

    #[test]
    fn cover_detects_shortfall() {
        let family = fam(&[delta(0), delta(2)]);
        let sub = fam(&[delta(0)]);
        let report = check_countable_cover(&sub, &family, &g2()).unwrap();
        assert!(!report.satisfied);
        let member = family.index_of(&delta(2)).unwrap();
        assert_eq!(
            report.per_member[member].failure,
            Some(CoverFailure::MassShortfall {
                covered: rat(0, 1)
            })
        );
    }

    #[test]
    fn cover_self() {
        let family = fam(&[uniform4()]);
        let report = check_countable_cover(&family, &family, &g2()).unwrap();
        assert!(report.satisfied);
    }

    #[test]
    fn cover_rejects_non_subfamily() {
        let family = fam(&[delta(0), delta(2)]);
        let sub = fam(&[uniform4()]);
        assert_eq!(
            check_countable_cover(&sub, &family, &g2()).unwrap_err(),
            Error::NotASubfamily { member: 0 }
        );
    }

    #[test]
    fn cover_rejects_overlapping_supports() {
        let family = fam(&[uniform4(), m01()]);
        let err = check_countable_cover(&family, &family, &g2()).unwrap_err();
        assert!(matches!(err, Error::SupportsNotDisjoint { .. }));
    }

    #[test]
    fn dominating_lemmas_exhaustive() {
        // on each fixture family: polar iff part-null inside each support;
        // theta-null measurable subsets of the minimal support are polar;
        // members are equivalent on support intersections
        for family in [
            fam(&[delta(0), delta(1), delta(2), delta(3)]),
            fam(&[uniform4(), delta(0)]),
            fam(&[m01(), m23(), m01_skew()]),
        ] {
            let dp = build_dominating_partition(&family, &g2()).unwrap();
            let ucomp = dp.universal_completion().clone();
            let all_measurable: Vec<EventSet> = (0u64..(1 << ucomp.block_count()))
                .map(|mask| union_of_blocks(&ucomp, mask))
                .collect();
            for part in dp.parts() {
                for a in &all_measurable {
                    if !a.is_subset(&part.support) {
                        continue;
                    }
                    assert_eq!(
                        family.is_polar(a),
                        part.measure.prob(a).is_zero(),
                        "polar iff part-null fails at {a}"
                    );
                }
            }
            for theta in family.members() {
                let support = minimal_support(theta, &dp);
                for a in &all_measurable {
                    if a.is_subset(&support) && theta.prob(a).is_zero() {
                        assert!(family.is_polar(a), "null subset {a} of support not polar");
                    }
                }
                for psi in family.members() {
                    let shared = support.intersection(&minimal_support(psi, &dp));
                    for a in &all_measurable {
                        if a.is_subset(&shared) {
                            assert_eq!(
                                theta.prob(a).is_zero(),
                                psi.prob(a).is_zero(),
                                "members not equivalent on {a}"
                            );
                        }
                    }
                }
            }
        }
    }
}
