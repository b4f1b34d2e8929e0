//! Shared fixtures for unit tests: a four-atom space, the coarse two-block
//! algebra, and the measures used throughout.

use crate::measure::{ExtendedValue, Measure, MeasureFamily, RandomVariable};
use crate::rational::{int, rat, Rational};
use crate::space::{EventSet, SampleSpace, SigmaAlgebra};

pub fn omega4() -> SampleSpace {
    SampleSpace::new(4).unwrap()
}

pub fn ev(atoms: impl IntoIterator<Item = usize>) -> EventSet {
    atoms.into_iter().collect()
}

/// Builds a sigma-algebra from block slices; the atom count is the total
/// number of atoms covered.
pub fn sa(blocks: &[&[usize]]) -> SigmaAlgebra {
    let n: usize = blocks.iter().map(|b| b.len()).sum();
    let space = SampleSpace::new(n).unwrap();
    SigmaAlgebra::new(
        space,
        blocks.iter().map(|b| b.iter().copied().collect()).collect(),
    )
    .unwrap()
}

/// The two-block algebra {{0,1},{2,3}} on four atoms.
pub fn g2() -> SigmaAlgebra {
    sa(&[&[0, 1], &[2, 3]])
}

/// Point mass at `atom` on four atoms.
pub fn delta(atom: usize) -> Measure {
    Measure::point_mass(omega4(), atom).unwrap()
}

pub fn uniform4() -> Measure {
    Measure::uniform(omega4())
}

/// (1/2, 1/2, 0, 0)
pub fn m01() -> Measure {
    measure(&[(1, 2), (1, 2), (0, 1), (0, 1)])
}

/// (0, 0, 1/2, 1/2)
pub fn m23() -> Measure {
    measure(&[(0, 1), (0, 1), (1, 2), (1, 2)])
}

/// (2/3, 1/3, 0, 0)
pub fn m01_skew() -> Measure {
    measure(&[(2, 3), (1, 3), (0, 1), (0, 1)])
}

pub fn measure(weights: &[(i64, i64)]) -> Measure {
    Measure::new(weights.iter().map(|&(n, d)| rat(n, d)).collect()).unwrap()
}

pub fn fam(members: &[Measure]) -> MeasureFamily {
    MeasureFamily::new(members.to_vec()).unwrap()
}

/// The variable (1, 2, 3, 4).
pub fn x1234() -> RandomVariable {
    rv_int(&[1, 2, 3, 4])
}

pub fn rv_int(values: &[i64]) -> RandomVariable {
    RandomVariable::from_rationals(values.iter().map(|&v| int(v)).collect()).unwrap()
}

pub fn rv(values: &[Rational]) -> RandomVariable {
    RandomVariable::from_rationals(values.to_vec()).unwrap()
}

/// A variable from finite values and `None` for -inf.
pub fn rv_ext(values: &[Option<Rational>]) -> RandomVariable {
    RandomVariable::new(
        values
            .iter()
            .map(|v| match v {
                Some(q) => ExtendedValue::Finite(q.clone()),
                None => ExtendedValue::NegInf,
            })
            .collect(),
    )
    .unwrap()
}
