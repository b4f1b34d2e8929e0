//! Deterministic instance generation for sample variables and test sweeps.
//! A fixed seed always produces the same spaces, partitions, measures and
//! variables, on every platform.

use qsure::measure::{Measure, MeasureFamily, RandomVariable};
use qsure::rational::Rational;
use qsure::space::{EventSet, SampleSpace, SigmaAlgebra};

/// SplitMix64; small, stable, and good enough for sweep generation.
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform draw from `0..bound` (`bound >= 1`).
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }

    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as u64) as i64
    }

    /// A rational with numerator in `lo..=hi` and denominator in `1..=max_den`.
    pub fn rational(&mut self, lo: i64, hi: i64, max_den: i64) -> Rational {
        let numer = self.range(lo, hi);
        let denom = self.range(1, max_den);
        Rational::new(numer.into(), denom.into())
    }
}

/// A random partition of the space with roughly `max_blocks` blocks.
pub fn random_partition(rng: &mut Rng, space: SampleSpace, max_blocks: usize) -> SigmaAlgebra {
    let n = space.atom_count();
    let k = 1 + rng.below(max_blocks.min(n) as u64) as usize;
    let mut assignment: Vec<usize> = (0..n).map(|_| rng.below(k as u64) as usize).collect();
    // keep every label in use so the block count is exactly k when possible
    for (label, slot) in assignment.iter_mut().take(k).enumerate() {
        if rng.below(2) == 0 {
            *slot = label;
        }
    }
    let mut blocks: Vec<EventSet> = Vec::new();
    let mut labels: Vec<usize> = Vec::new();
    for (atom, &label) in assignment.iter().enumerate() {
        match labels.iter().position(|&l| l == label) {
            Some(i) => blocks[i].insert(atom),
            None => {
                labels.push(label);
                blocks.push(EventSet::singleton(atom));
            }
        }
    }
    SigmaAlgebra::new(space, blocks).expect("assignment covers every atom")
}

/// A random measure with a sparse support and small exact weights.
pub fn random_measure(rng: &mut Rng, space: SampleSpace) -> Measure {
    let n = space.atom_count();
    let mut scores = vec![0i64; n];
    let support_size = 1 + rng.below(n as u64) as usize;
    for _ in 0..support_size {
        let atom = rng.below(n as u64) as usize;
        scores[atom] += rng.range(1, 6);
    }
    let total: i64 = scores.iter().sum();
    Measure::new(
        scores
            .iter()
            .map(|&s| Rational::new(s.into(), total.into()))
            .collect(),
    )
    .expect("scores normalize")
}

pub fn random_family(rng: &mut Rng, space: SampleSpace, max_members: usize) -> MeasureFamily {
    let k = 1 + rng.below(max_members as u64) as usize;
    let members = (0..k).map(|_| random_measure(rng, space)).collect();
    MeasureFamily::new(members).expect("nonempty")
}

/// A finite-valued variable with small rational values.
pub fn random_variable(rng: &mut Rng, space: SampleSpace) -> RandomVariable {
    RandomVariable::from_rationals(
        (0..space.atom_count())
            .map(|_| rng.rational(-8, 8, 3))
            .collect(),
    )
    .expect("nonempty")
}

/// A variable constant on the blocks of a partition.
pub fn random_block_variable(rng: &mut Rng, sigma: &SigmaAlgebra) -> RandomVariable {
    let block_values: Vec<Rational> = (0..sigma.block_count())
        .map(|_| rng.rational(-6, 6, 2))
        .collect();
    RandomVariable::from_rationals(
        (0..sigma.atom_count())
            .map(|a| block_values[sigma.block_index_of(a)].clone())
            .collect(),
    )
    .expect("nonempty")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let space = SampleSpace::new(6).unwrap();
        let mut a = Rng::new(42);
        let mut b = Rng::new(42);
        assert_eq!(
            random_partition(&mut a, space, 3),
            random_partition(&mut b, space, 3)
        );
        assert_eq!(random_measure(&mut a, space), random_measure(&mut b, space));
        assert_eq!(
            random_variable(&mut a, space),
            random_variable(&mut b, space)
        );
    }

    #[test]
    fn different_seeds_differ() {
        let space = SampleSpace::new(8).unwrap();
        let mut a = Rng::new(1);
        let mut b = Rng::new(2);
        let va = random_variable(&mut a, space);
        let vb = random_variable(&mut b, space);
        assert_ne!(va, vb);
    }
}
