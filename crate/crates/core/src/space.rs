//! Finite measurable spaces: atoms, events, and sigma-algebras.
//!
//! A sigma-algebra on a finite space is encoded by its partition into atoms
//! (blocks). The encoding is canonical: blocks are stored sorted by smallest
//! member, so equality of sigma-algebras is structural equality. Set
//! membership is derived from the partition, never stored.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::measure::{Measure, MeasureFamily};

/// A finite sample space of `atom_count` atoms labelled `0..atom_count`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleSpace {
    atom_count: usize,
}

impl SampleSpace {
    pub fn new(atom_count: usize) -> Result<Self> {
        if atom_count == 0 {
            return Err(Error::EmptySpace);
        }
        Ok(Self { atom_count })
    }

    pub fn atom_count(&self) -> usize {
        self.atom_count
    }

    pub fn atoms(&self) -> std::ops::Range<usize> {
        0..self.atom_count
    }

    /// The event containing every atom.
    pub fn full_event(&self) -> EventSet {
        self.atoms().collect()
    }
}

/// A subset of the atoms of a sample space.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventSet {
    atoms: BTreeSet<usize>,
}

impl EventSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Range-checked constructor against a space.
    pub fn new(space: SampleSpace, atoms: impl IntoIterator<Item = usize>) -> Result<Self> {
        let set: BTreeSet<usize> = atoms.into_iter().collect();
        if let Some(&atom) = set.iter().find(|&&a| a >= space.atom_count()) {
            return Err(Error::AtomOutOfRange {
                atom,
                atom_count: space.atom_count(),
            });
        }
        Ok(Self { atoms: set })
    }

    pub fn singleton(atom: usize) -> Self {
        std::iter::once(atom).collect()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn contains(&self, atom: usize) -> bool {
        self.atoms.contains(&atom)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.atoms.iter().copied()
    }

    pub fn min_atom(&self) -> Option<usize> {
        self.atoms.first().copied()
    }

    pub fn max_atom(&self) -> Option<usize> {
        self.atoms.last().copied()
    }

    pub fn union(&self, other: &Self) -> Self {
        self.atoms.union(&other.atoms).copied().collect()
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.atoms.intersection(&other.atoms).copied().collect()
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.atoms.difference(&other.atoms).copied().collect()
    }

    pub fn complement_in(&self, space: SampleSpace) -> Self {
        space.atoms().filter(|a| !self.contains(*a)).collect()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.atoms.is_subset(&other.atoms)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.atoms.is_disjoint(&other.atoms)
    }

    pub fn insert(&mut self, atom: usize) {
        self.atoms.insert(atom);
    }
}

impl FromIterator<usize> for EventSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        Self {
            atoms: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for EventSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, atom) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{atom}")?;
        }
        write!(f, "}}")
    }
}

/// A sigma-algebra on a finite space, encoded by its atom partition.
///
/// Invariants enforced at construction: blocks are nonempty, pairwise
/// disjoint, cover every atom, and are kept sorted by smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SigmaAlgebra {
    atom_count: usize,
    blocks: Vec<EventSet>,
    block_of_atom: Vec<usize>,
}

impl SigmaAlgebra {
    pub fn new(space: SampleSpace, blocks: Vec<EventSet>) -> Result<Self> {
        let n = space.atom_count();
        let mut block_of_atom = vec![usize::MAX; n];
        for (i, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::NotAPartition {
                    reason: "empty block".into(),
                });
            }
            for atom in block.iter() {
                if atom >= n {
                    return Err(Error::AtomOutOfRange {
                        atom,
                        atom_count: n,
                    });
                }
                if block_of_atom[atom] != usize::MAX {
                    return Err(Error::NotAPartition {
                        reason: format!("atom {atom} appears in two blocks"),
                    });
                }
                block_of_atom[atom] = i;
            }
        }
        if let Some(atom) = block_of_atom.iter().position(|&b| b == usize::MAX) {
            return Err(Error::NotAPartition {
                reason: format!("atom {atom} is not covered"),
            });
        }
        Ok(Self::canonicalize(n, blocks))
    }

    /// Sorts blocks by smallest member and rebuilds the atom lookup.
    fn canonicalize(atom_count: usize, mut blocks: Vec<EventSet>) -> Self {
        blocks.sort_by_key(|b| b.min_atom());
        let mut block_of_atom = vec![0; atom_count];
        for (i, block) in blocks.iter().enumerate() {
            for atom in block.iter() {
                block_of_atom[atom] = i;
            }
        }
        Self {
            atom_count,
            blocks,
            block_of_atom,
        }
    }

    /// The trivial sigma-algebra: one block holding every atom.
    pub fn trivial(space: SampleSpace) -> Self {
        Self::canonicalize(space.atom_count(), vec![space.full_event()])
    }

    /// The discrete sigma-algebra (full power set): one block per atom.
    pub fn discrete(space: SampleSpace) -> Self {
        let blocks = space.atoms().map(EventSet::singleton).collect();
        Self::canonicalize(space.atom_count(), blocks)
    }

    pub fn space(&self) -> SampleSpace {
        SampleSpace {
            atom_count: self.atom_count,
        }
    }

    pub fn atom_count(&self) -> usize {
        self.atom_count
    }

    pub fn blocks(&self) -> &[EventSet] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_index_of(&self, atom: usize) -> usize {
        self.block_of_atom[atom]
    }

    pub fn block_of(&self, atom: usize) -> &EventSet {
        &self.blocks[self.block_of_atom[atom]]
    }

    pub fn is_discrete(&self) -> bool {
        self.blocks.len() == self.atom_count
    }

    /// Whether `event` belongs to this sigma-algebra, i.e. is a union of
    /// blocks.
    pub fn is_measurable(&self, event: &EventSet) -> Result<bool> {
        if let Some(atom) = event.iter().find(|&a| a >= self.atom_count) {
            return Err(Error::AtomOutOfRange {
                atom,
                atom_count: self.atom_count,
            });
        }
        Ok(self
            .blocks
            .iter()
            .all(|b| b.is_subset(event) || b.is_disjoint(event)))
    }

    /// Whether every block of `coarser` is a union of blocks of `self`.
    pub fn refines(&self, coarser: &SigmaAlgebra) -> bool {
        self.atom_count == coarser.atom_count
            && coarser
                .blocks
                .iter()
                .all(|b| self.is_measurable(b).unwrap_or(false))
    }

    /// The completion of this sigma-algebra under `theta`.
    ///
    /// Every null block splits into singletons; charged blocks stay whole.
    /// On a finite space this is exactly the classical completion: a set is
    /// measurable in the completion iff it differs from a measurable set by a
    /// subset of a null measurable set.
    pub fn complete(&self, theta: &Measure) -> Result<SigmaAlgebra> {
        self.check_same_space(theta.atom_count())?;
        let mut blocks = Vec::new();
        for block in &self.blocks {
            if theta.prob(block).is_zero() {
                blocks.extend(block.iter().map(EventSet::singleton));
            } else {
                blocks.push(block.clone());
            }
        }
        Ok(Self::canonicalize(self.atom_count, blocks))
    }

    /// The universal completion: the intersection over the family of the
    /// per-measure completions, computed as their finest common coarsening
    /// (union-find merge of overlapping blocks). A block splits into
    /// singletons iff it is null for every member.
    pub fn universal_complete(&self, family: &MeasureFamily) -> Result<SigmaAlgebra> {
        self.check_same_space(family.atom_count())?;
        let completions = family
            .members()
            .iter()
            .map(|theta| self.complete(theta))
            .collect::<Result<Vec<_>>>()?;
        Ok(finest_common_coarsening(self.atom_count, &completions))
    }

    fn check_same_space(&self, other: usize) -> Result<()> {
        if self.atom_count != other {
            return Err(Error::SpaceMismatch {
                left: self.atom_count,
                right: other,
            });
        }
        Ok(())
    }
}

/// The finest partition coarsened by every input: atoms merge whenever some
/// input holds them in one block.
pub fn finest_common_coarsening(atom_count: usize, parts: &[SigmaAlgebra]) -> SigmaAlgebra {
    let mut uf = UnionFind::new(atom_count);
    for part in parts {
        for block in part.blocks() {
            let mut it = block.iter();
            if let Some(first) = it.next() {
                for atom in it {
                    uf.union(first, atom);
                }
            }
        }
    }
    let mut grouped: Vec<EventSet> = vec![EventSet::empty(); atom_count];
    for atom in 0..atom_count {
        grouped[uf.find(atom)].insert(atom);
    }
    grouped.retain(|b| !b.is_empty());
    SigmaAlgebra::canonicalize(atom_count, grouped)
}

/// Disjoint-set forest with path compression and union by size.
struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        let (big, small) = if self.size[rx] >= self.size[ry] {
            (rx, ry)
        } else {
            (ry, rx)
        };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::testutil::*;

    #[test]
    fn measurable_union_of_blocks() {
        let g = g2();
        assert!(g.is_measurable(&ev([0, 1])).unwrap());
        assert!(!g.is_measurable(&ev([0])).unwrap());
        assert!(g.is_measurable(&EventSet::empty()).unwrap());
        assert!(g.is_measurable(&ev([0, 1, 2, 3])).unwrap());
    }

    #[test]
    fn measurable_rejects_out_of_range() {
        let g = g2();
        let err = g.is_measurable(&ev([0, 7])).unwrap_err();
        assert_eq!(
            err,
            Error::AtomOutOfRange {
                atom: 7,
                atom_count: 4
            }
        );
    }

    #[test]
    fn partition_validation() {
        let sp = omega4();
        assert!(SigmaAlgebra::new(sp, vec![ev([0, 1]), ev([1, 2, 3])]).is_err());
        assert!(SigmaAlgebra::new(sp, vec![ev([0, 1]), ev([2])]).is_err());
        assert!(SigmaAlgebra::new(sp, vec![ev([0, 1, 2, 3]), EventSet::empty()]).is_err());
    }

    #[test]
    fn canonical_block_order() {
        let sp = omega4();
        let a = SigmaAlgebra::new(sp, vec![ev([2, 3]), ev([0, 1])]).unwrap();
        let b = SigmaAlgebra::new(sp, vec![ev([0, 1]), ev([2, 3])]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.blocks()[0], ev([0, 1]));
    }

    /// Membership in the classical completion, straight from the definition:
    /// A is measurable iff it differs from a union of blocks by a subset of a
    /// null measurable set.
    fn completion_member_oracle(g: &SigmaAlgebra, theta: &Measure, a: &EventSet) -> bool {
        let null_union: EventSet = g
            .blocks()
            .iter()
            .filter(|b| theta.prob(b).is_zero())
            .flat_map(|b| b.iter())
            .collect();
        for mask in 0u32..(1 << g.block_count()) {
            let b: EventSet = g
                .blocks()
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .flat_map(|(_, blk)| blk.iter())
                .collect();
            let sym = a.difference(&b).union(&b.difference(a));
            if sym.is_subset(&null_union) {
                return true;
            }
        }
        false
    }

    fn all_subsets(n: usize) -> impl Iterator<Item = EventSet> {
        (0u32..(1 << n)).map(move |mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
    }

    #[test]
    fn complete_splits_null_blocks() {
        let g = g2();
        let completed = g.complete(&delta(0)).unwrap();
        assert_eq!(
            completed,
            sa(&[&[0, 1], &[2], &[3]]),
            "null block {{2,3}} splits"
        );
        // exhaustive cross-check against the definition, all 16 subsets
        for a in all_subsets(4) {
            assert_eq!(
                completed.is_measurable(&a).unwrap(),
                completion_member_oracle(&g, &delta(0), &a),
                "disagreement at {a}"
            );
        }
    }

    #[test]
    fn complete_keeps_charged_blocks() {
        let g = g2();
        assert_eq!(g.complete(&uniform4()).unwrap(), g);
    }

    #[test]
    fn complete_discrete_is_fixed() {
        let full = SigmaAlgebra::discrete(omega4());
        assert_eq!(full.complete(&delta(1)).unwrap(), full);
    }

    #[test]
    fn universal_complete_examples() {
        let g = g2();
        // completions under delta0 and delta2 pull in opposite directions
        let u = g.universal_complete(&fam(&[delta(0), delta(2)])).unwrap();
        assert_eq!(u, g);
        let u = g.universal_complete(&fam(&[delta(0), delta(1)])).unwrap();
        assert_eq!(u, sa(&[&[0, 1], &[2], &[3]]));
        // singleton family reduces to the plain completion
        let u = g.universal_complete(&fam(&[uniform4()])).unwrap();
        assert_eq!(u, g.complete(&uniform4()).unwrap());
    }

    #[test]
    fn universal_complete_is_intersection() {
        // A is a union of universal-completion blocks iff it is measurable in
        // every per-measure completion; exhaustive over all subsets.
        let g = g2();
        for family in [
            fam(&[delta(0), delta(2)]),
            fam(&[delta(0), delta(1)]),
            fam(&[delta(3), m01()]),
        ] {
            let u = g.universal_complete(&family).unwrap();
            for a in all_subsets(4) {
                let in_all = family
                    .members()
                    .iter()
                    .all(|th| g.complete(th).unwrap().is_measurable(&a).unwrap());
                assert_eq!(u.is_measurable(&a).unwrap(), in_all, "at {a}");
            }
        }
    }

    #[test]
    fn refinement_of_completions() {
        let g = g2();
        for theta in [delta(0), delta(2), m01(), uniform4()] {
            let completed = g.complete(&theta).unwrap();
            assert!(completed.refines(&g));
            // idempotent
            assert_eq!(completed.complete(&theta).unwrap(), completed);
        }
    }

    #[test]
    fn polar_examples() {
        assert!(fam(&[delta(0), delta(1)]).is_polar(&ev([3])));
        assert!(!fam(&[delta(3)]).is_polar(&ev([3])));
        assert!(fam(&[delta(3)]).is_polar(&EventSet::empty()));
    }

    #[test]
    fn event_set_algebra() {
        let sp = omega4();
        let a = ev([0, 1]);
        let b = ev([1, 2]);
        assert_eq!(a.union(&b), ev([0, 1, 2]));
        assert_eq!(a.intersection(&b), ev([1]));
        assert_eq!(a.difference(&b), ev([0]));
        assert_eq!(a.complement_in(sp), ev([2, 3]));
        assert!(ev([1]).is_subset(&a));
        assert!(a.is_disjoint(&ev([2, 3])));
        assert!(EventSet::new(sp, [9]).is_err());
    }

    #[test]
    fn restriction_masses() {
        let g = g2();
        assert_eq!(
            delta(0).restrict(&g).unwrap(),
            vec![rat(1, 1), rat(0, 1)]
        );
        assert_eq!(
            uniform4().restrict(&g).unwrap(),
            vec![rat(1, 2), rat(1, 2)]
        );
        assert_eq!(
            m01_skew().restrict(&g).unwrap(),
            vec![rat(1, 1), rat(0, 1)]
        );
    }
}
