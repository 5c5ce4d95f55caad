//! Exhaustive generation of admissible compositions.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Composition, Morphology};

pub const DEFAULT_CAP: usize = 1_000_000;

/// Cap taken from `MORPHSYNTH_CAP` when set and parseable, else `default`.
pub fn cap_from_env(default: usize) -> usize {
    std::env::var("MORPHSYNTH_CAP").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(default)
}

/// Compositions of `scope` whose declared pairs all reach `min_level`,
/// in lexicographic order of (part order, alternative order).
pub fn enumerate_admissible(m: &Morphology, scope: &str, min_level: u8) -> Result<Vec<Composition>> {
    enumerate_admissible_capped(m, scope, min_level, DEFAULT_CAP)
}

pub fn enumerate_admissible_capped(m: &Morphology, scope: &str, min_level: u8, cap: usize) -> Result<Vec<Composition>> {
    if min_level < 1 || min_level > m.scales.l {
        return Err(Error::OutOfRange(format!("min level {min_level} (scale 1..={})", m.scales.l)));
    }
    search(m, scope, min_level, cap)
}

/// Depth-first search with pruning on the first sub-threshold pair.
/// `min_level = 0` yields the whole Cartesian product.
pub(crate) fn search(m: &Morphology, scope: &str, min_level: u8, cap: usize) -> Result<Vec<Composition>> {
    let parts = m.scope_parts(scope)?.to_vec();
    let n = parts.len();
    let declared: Vec<Vec<bool>> =
        (0..n).map(|d| (0..d).map(|e| m.parts_declared(parts[e], parts[d])).collect()).collect();
    let ranges: Vec<_> = parts.iter().map(|&p| m.part_das(p)).collect();
    let emitted = AtomicUsize::new(0);
    let over = AtomicBool::new(false);

    let emit = |out: &mut Vec<Vec<usize>>, das: Vec<usize>| -> bool {
        if emitted.fetch_add(1, Ordering::Relaxed) >= cap {
            over.store(true, Ordering::Relaxed);
            return false;
        }
        out.push(das);
        true
    };

    let branch = |first: usize| -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        if n == 1 {
            emit(&mut out, vec![first]);
            return out;
        }
        let mut stack = vec![first];
        let mut cursor = vec![0usize; n];
        cursor[1] = ranges[1].start;
        while !stack.is_empty() {
            if over.load(Ordering::Relaxed) {
                return Vec::new();
            }
            let d = stack.len();
            if cursor[d] == ranges[d].end {
                stack.pop();
                continue;
            }
            let g = cursor[d];
            cursor[d] += 1;
            let ok = stack
                .iter()
                .enumerate()
                .all(|(e, &h)| !declared[d][e] || m.level(h, g).is_some_and(|v| v >= min_level));
            if !ok {
                continue;
            }
            if d + 1 == n {
                let mut das = stack.clone();
                das.push(g);
                if !emit(&mut out, das) {
                    return Vec::new();
                }
            } else {
                stack.push(g);
                cursor[d + 1] = ranges[d + 1].start;
            }
        }
        out
    };

    let firsts: Vec<usize> = ranges[0].clone().collect();
    let chunks: Vec<Vec<Vec<usize>>> = firsts.into_par_iter().map(branch).collect();
    if over.load(Ordering::Relaxed) {
        return Err(Error::CapExceeded { what: "enumeration", cap: cap as u64 });
    }
    Ok(chunks.into_iter().flatten().map(|das| Composition { scope: scope.to_string(), das }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::binarize_compatibility;

    fn labels(m: &Morphology, cs: &[Composition]) -> Vec<String> {
        cs.iter().map(|c| c.label(m)).collect()
    }

    #[test]
    fn gsm_subsystems() {
        let m = fixtures::gsm();
        // M4★L4 is level 3 in the table and is therefore admissible
        assert_eq!(
            labels(&m, &enumerate_admissible(&m, "A", 3).unwrap()),
            ["M1★L1", "M1★L4", "M2★L2", "M3★L3", "M4★L2", "M4★L3", "M4★L4", "M5★L1", "M5★L2", "M5★L4"]
        );
        assert_eq!(
            labels(&m, &enumerate_admissible(&m, "B", 3).unwrap()),
            ["V1★U5★T1", "V2★U2★T4", "V2★U3★T4", "V3★U2★T4", "V3★U3★T4"]
        );
        assert_eq!(enumerate_admissible(&m, "S", 3).unwrap().len(), 50);
    }

    #[test]
    fn binarized_equals_threshold_three() {
        let m = fixtures::gsm();
        let b = m.with_compat(binarize_compatibility(&m.compat, 3).unwrap()).unwrap();
        assert_eq!(enumerate_admissible(&b, "S", 1).unwrap(), enumerate_admissible(&m, "S", 3).unwrap());
    }

    #[test]
    fn ma_demo_tables() {
        let m = fixtures::ma_demo();
        assert_eq!(labels(&m, &enumerate_admissible(&m, "S", 1).unwrap()), ["X1_2★Xi_3★Xm_1"]);
        let m = fixtures::load("ma_demo_ideal").unwrap();
        assert_eq!(labels(&m, &enumerate_admissible(&m, "S", 1).unwrap()), ["X1_2★Xi_3★Xm_1", "X1_5★Xi_3★Xm_3"]);
        let m = fixtures::load("ma_demo_pareto").unwrap();
        assert_eq!(
            labels(&m, &enumerate_admissible(&m, "S", 1).unwrap()),
            ["X1_2★Xi_3★Xm_1", "X1_5★Xi_3★Xm_3", "X1_5★Xi_5★Xm_3"]
        );
    }

    #[test]
    fn all_zero_table_yields_nothing() {
        let m = fixtures::gsm();
        let mut zero = fixtures::gsm_document();
        for entries in zero.compatibility.values_mut() {
            for e in entries {
                e.level = Some(0);
            }
        }
        let z = crate::model::validate_morphology(&zero).unwrap();
        assert!(enumerate_admissible(&z, "S", 1).unwrap().is_empty());
        assert_eq!(search(&m, "S", 0, DEFAULT_CAP).unwrap().len(), 3000);
    }

    #[test]
    fn cap_and_errors() {
        let m = fixtures::gsm();
        assert!(matches!(enumerate_admissible_capped(&m, "S", 1, 10), Err(Error::CapExceeded { .. })));
        assert_eq!(enumerate_admissible_capped(&m, "S", 3, 50).unwrap().len(), 50);
        assert!(matches!(enumerate_admissible(&m, "Q", 1), Err(Error::Unknown { .. })));
        assert!(matches!(enumerate_admissible(&m, "S", 0), Err(Error::OutOfRange(_))));
        assert!(matches!(enumerate_admissible(&m, "S", 4), Err(Error::OutOfRange(_))));
    }
}
