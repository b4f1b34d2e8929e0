//! Benchmarks for the closure, verification and conditioning hot paths.
//!
//! Group names carry the execution mode, so running once with the default
//! features and once with `--no-default-features` produces directly
//! comparable `parallel/...` and `sequential/...` entries:
//!
//! ```text
//! cargo bench -p qsure
//! cargo bench -p qsure --no-default-features
//! ```

use criterion::{criterion_group, criterion_main, Criterion};

use qsure::expectation::{check_conditional_axioms, check_consistency};
use qsure::hahn::{build_dominating_partition, verify_hahn};
use qsure::measure::{stabilize, Measure, MeasureFamily, RandomVariable};
use qsure::rational::{int, Rational};
use qsure::space::{EventSet, SampleSpace, SigmaAlgebra};

fn mode() -> &'static str {
    if cfg!(feature = "parallel") {
        "parallel"
    } else {
        "sequential"
    }
}

fn blocks_of(space: SampleSpace, size: usize) -> SigmaAlgebra {
    let blocks: Vec<EventSet> = (0..space.atom_count() / size)
        .map(|b| (b * size..(b + 1) * size).collect())
        .collect();
    SigmaAlgebra::new(space, blocks).unwrap()
}

fn point_mass(space: SampleSpace, atom: usize) -> Measure {
    Measure::point_mass(space, atom).unwrap()
}

fn ramp(space: SampleSpace) -> RandomVariable {
    RandomVariable::from_rationals(
        (0..space.atom_count())
            .map(|a| Rational::new((a as i64 % 7 - 3).into(), (1 + a as i64 % 3).into()))
            .collect(),
    )
    .unwrap()
}

/// A family whose pasting closure is strictly larger than itself.
fn mixing_family(space: SampleSpace) -> MeasureFamily {
    let n = space.atom_count() as i64;
    let skew = Measure::new(
        (0..space.atom_count())
            .map(|a| {
                if a < space.atom_count() / 2 {
                    Rational::new(2.into(), n.into())
                } else {
                    Rational::new(0.into(), 1.into())
                }
            })
            .collect(),
    )
    .unwrap();
    MeasureFamily::new(vec![
        Measure::uniform(space),
        point_mass(space, 0),
        skew,
    ])
    .unwrap()
}

fn bench_stabilize(c: &mut Criterion) {
    let space = SampleSpace::new(8).unwrap();
    let g = blocks_of(space, 2);
    let family = mixing_family(space);
    c.bench_function(&format!("{}/stabilize/8-atoms", mode()), |b| {
        b.iter(|| stabilize(&family, &g, 200).unwrap())
    });
}

fn bench_verify_hahn(c: &mut Criterion) {
    let space = SampleSpace::new(12).unwrap();
    let g = blocks_of(space, 3);
    let family = MeasureFamily::new(vec![
        Measure::uniform(space),
        point_mass(space, 0),
        point_mass(space, 5),
        point_mass(space, 11),
    ])
    .unwrap();
    let dp = build_dominating_partition(&family, &g).unwrap();
    c.bench_function(&format!("{}/verify-hahn/12-atoms", mode()), |b| {
        b.iter(|| verify_hahn(&dp).unwrap())
    });
}

fn bench_conditional_battery(c: &mut Criterion) {
    let space = SampleSpace::new(10).unwrap();
    let g = blocks_of(space, 2);
    let family = mixing_family(space);
    let dp = build_dominating_partition(&family, &g).unwrap();
    let x = ramp(space);
    let extras = [RandomVariable::constant(space, int(1))];
    c.bench_function(&format!("{}/conditional-axioms/10-atoms", mode()), |b| {
        b.iter(|| check_conditional_axioms(&x, &dp, &extras).unwrap())
    });
}

fn bench_consistency(c: &mut Criterion) {
    let space = SampleSpace::new(8).unwrap();
    let g = blocks_of(space, 2);
    let family = mixing_family(space);
    let x = ramp(space);
    c.bench_function(&format!("{}/consistency/8-atoms", mode()), |b| {
        b.iter(|| check_consistency(&family, &g, std::slice::from_ref(&x), 200).unwrap())
    });
}

criterion_group!(
    engine,
    bench_stabilize,
    bench_verify_hahn,
    bench_conditional_battery,
    bench_consistency
);
criterion_main!(engine);
