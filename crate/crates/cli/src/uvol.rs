//! Scenario generator for a discrete tree with uncertain step volatility.
//!
//! The space is the set of all increment paths over `steps` steps, each
//! increment being `±v` for a volatility `v` from a finite set. The measure
//! family consists of every one-step predictable switcher: signs are fair
//! coin flips and the next volatility is any function of the sign history.
//! The deterministic-volatility paths form the generating class; restricted
//! to a filtration level, representatives of distinct volatility prefixes
//! have disjoint supports and carry every switcher, which is exactly the
//! countable-cover criterion the emitted checks exercise.

use std::collections::BTreeMap;

use num_traits::Signed;

use qsure::rational::Rational;

use crate::scenario::{CheckRequest, Scenario};
use crate::CliError;

const MAX_ATOMS: usize = 4096;
const MAX_SWITCHERS: usize = 4096;

pub fn gen_uncertain_vol(steps: usize, vols: &[Rational]) -> Result<Scenario, CliError> {
    if steps == 0 {
        return Err(CliError::input("steps must be at least 1"));
    }
    let mut vols: Vec<Rational> = vols.to_vec();
    vols.sort();
    vols.dedup();
    if vols.len() < 2 {
        return Err(CliError::input("need at least 2 distinct volatilities"));
    }
    if vols.iter().any(|v| !v.is_positive()) {
        return Err(CliError::input("volatilities must be positive"));
    }
    let k = vols.len();
    let branching = 2 * k;
    let atoms = branching
        .checked_pow(steps as u32)
        .filter(|&n| n <= MAX_ATOMS)
        .ok_or_else(|| {
            CliError::input(format!(
                "size guard: (2*{k})^{steps} exceeds {MAX_ATOMS} atoms"
            ))
        })?;
    let rule_slots = (1usize << steps) - 1;
    let switcher_count = k
        .checked_pow(rule_slots as u32)
        .filter(|&c| c <= MAX_SWITCHERS)
        .ok_or_else(|| {
            CliError::input(format!(
                "size guard: {k}^{rule_slots} switchers exceed {MAX_SWITCHERS}"
            ))
        })?;

    // step choices in increasing increment order: -v_max .. -v_min, +v_min ..
    // +v_max; a choice is (positive sign, volatility index)
    let choices: Vec<(bool, usize)> = (0..k)
        .rev()
        .map(|i| (false, i))
        .chain((0..k).map(|i| (true, i)))
        .collect();
    let choice_index = |positive: bool, vol: usize| -> usize {
        if positive {
            k + vol
        } else {
            k - 1 - vol
        }
    };
    let atom_of = |path: &[usize]| -> usize {
        path.iter().fold(0, |acc, &c| acc * branching + c)
    };

    let half_pow = Rational::new(1.into(), (1i64 << steps).into());
    let weights_for = |vol_of_history: &dyn Fn(usize, usize) -> usize| -> Vec<String> {
        let mut weights = vec![Rational::new(0.into(), 1.into()); atoms];
        for signs in 0..(1usize << steps) {
            let mut path = Vec::with_capacity(steps);
            for t in 0..steps {
                let history = signs >> (steps - t);
                let positive = (signs >> (steps - 1 - t)) & 1 == 1;
                path.push(choice_index(positive, vol_of_history(t, history)));
            }
            weights[atom_of(&path)] = half_pow.clone();
        }
        weights.iter().map(|w| w.to_string()).collect()
    };

    let digit_name = |prefix: &str, digits: &[usize]| -> String {
        let body: Vec<String> = digits.iter().map(|d| d.to_string()).collect();
        if k <= 10 {
            format!("{prefix}{}", body.join(""))
        } else {
            format!("{prefix}{}", body.join("-"))
        }
    };

    let mut measures: BTreeMap<String, Vec<String>> = BTreeMap::new();

    // the generating class: one measure per deterministic volatility path
    let vol_paths: Vec<Vec<usize>> = mixed_radix(k, steps);
    for v in &vol_paths {
        let name = digit_name("gen", v);
        measures.insert(name, weights_for(&|t, _| v[t]));
    }

    // every one-step predictable switcher; histories are ordered by step
    // then binary history value
    let slot_of = |t: usize, history: usize| -> usize { (1usize << t) - 1 + history };
    let mut switcher_names = Vec::with_capacity(switcher_count);
    for rule_digits in mixed_radix(k, rule_slots) {
        let name = digit_name("sw", &rule_digits);
        measures.insert(
            name.clone(),
            weights_for(&|t, history| rule_digits[slot_of(t, history)]),
        );
        switcher_names.push(name);
    }

    // filtration levels: partitions by increment-path prefix
    let mut sigma_algebras: BTreeMap<String, Vec<Vec<usize>>> = BTreeMap::new();
    let mut level_names = Vec::with_capacity(steps + 1);
    for t in 0..=steps {
        let name = format!("F{t}");
        let prefix_count = branching.pow(t as u32);
        let span = atoms / prefix_count;
        let blocks: Vec<Vec<usize>> = (0..prefix_count)
            .map(|p| (p * span..(p + 1) * span).collect())
            .collect();
        sigma_algebras.insert(name.clone(), blocks);
        level_names.push(name);
    }

    // terminal value: the sum of increments along the path
    let terminal: Vec<String> = (0..atoms)
        .map(|mut atom| {
            let mut digits = vec![0usize; steps];
            for t in (0..steps).rev() {
                digits[t] = atom % branching;
                atom /= branching;
            }
            let total: Rational = digits
                .iter()
                .map(|&c| {
                    let (positive, vol) = choices[c];
                    if positive {
                        vols[vol].clone()
                    } else {
                        -vols[vol].clone()
                    }
                })
                .sum();
            total.to_string()
        })
        .collect();
    let mut random_variables = BTreeMap::new();
    random_variables.insert("terminal".to_string(), terminal);

    // per level: the cover criterion with prefix representatives of the
    // generating class, and the pasting-consistency battery
    let mut checks = Vec::new();
    for (t, level) in level_names.iter().enumerate() {
        let mut reps: Vec<String> = mixed_radix(k, t)
            .into_iter()
            .map(|prefix| {
                let mut digits = prefix;
                digits.resize(steps, 0);
                digit_name("gen", &digits)
            })
            .collect();
        reps.sort();
        reps.dedup();
        checks.push(CheckRequest::Hahn {
            family: switcher_names.clone(),
            sigma_algebra: level.clone(),
            phi: Some(reps),
        });
        checks.push(CheckRequest::Consistency {
            family: switcher_names.clone(),
            sigma_algebra: level.clone(),
            samples: vec!["terminal".to_string()],
        });
    }
    checks.push(CheckRequest::Martingale {
        family: switcher_names.clone(),
        variable: "terminal".to_string(),
        expect: None,
    });
    checks.push(CheckRequest::Recursivity {
        family: switcher_names.clone(),
        variable: "terminal".to_string(),
    });
    checks.push(CheckRequest::Oracle);

    Ok(Scenario {
        atoms,
        measures,
        sigma_algebras,
        filtration: Some(level_names),
        random_variables,
        checks,
    })
}

/// All digit strings of the given length in base `k`, in lexicographic
/// order. Length zero yields the single empty string.
fn mixed_radix(k: usize, len: usize) -> Vec<Vec<usize>> {
    let total = k.pow(len as u32);
    (0..total)
        .map(|mut value| {
            let mut digits = vec![0usize; len];
            for slot in (0..len).rev() {
                digits[slot] = value % k;
                value /= k;
            }
            digits
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use qsure::rational::int;

    #[test]
    fn one_step_structure() {
        let scenario = gen_uncertain_vol(1, &[int(1), int(2)]).unwrap();
        assert_eq!(scenario.atoms, 4);
        // two deterministic generators, which are also the two switchers
        assert_eq!(
            scenario.measures.keys().filter(|n| n.starts_with("gen")).count(),
            2
        );
        assert_eq!(
            scenario.measures.keys().filter(|n| n.starts_with("sw")).count(),
            2
        );
        // increments in ascending order: -2, -1, +1, +2
        assert_eq!(
            scenario.random_variables["terminal"],
            vec!["-2", "-1", "1", "2"]
        );
        let resolved = scenario.resolve().unwrap();
        assert_eq!(resolved.filtration.as_ref().unwrap().len(), 2);
    }

    #[test]
    fn two_step_counts() {
        let scenario = gen_uncertain_vol(2, &[int(1), int(2)]).unwrap();
        assert_eq!(scenario.atoms, 16);
        assert_eq!(
            scenario.measures.keys().filter(|n| n.starts_with("gen")).count(),
            4
        );
        assert_eq!(
            scenario.measures.keys().filter(|n| n.starts_with("sw")).count(),
            8
        );
        scenario.resolve().unwrap();
    }

    #[test]
    fn guards() {
        assert!(gen_uncertain_vol(1, &[int(1)]).is_err());
        assert!(gen_uncertain_vol(0, &[int(1), int(2)]).is_err());
        assert!(gen_uncertain_vol(9, &[int(1), int(2)]).is_err());
        assert!(gen_uncertain_vol(4, &[int(1), int(2)]).is_err());
    }
}
