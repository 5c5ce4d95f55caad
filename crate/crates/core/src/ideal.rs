//! Closeness to an ideal point.

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Composition, Direction, Morphology};
use crate::rational::{to_f64, Q};

/// What the components of an estimate vector stand for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keying {
    /// One priority per part.
    Priority,
    /// Every criterion of every part, flattened in part order.
    Criteria,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateVector {
    pub keying: Keying,
    pub components: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum IdealStrategy {
    BestOfAlternatives,
    BestOfScale,
    ExpertSupplied(Vec<Q>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    L2,
    L1,
    Chebyshev,
    Hamming,
}

pub fn estimate_vector(m: &Morphology, c: &Composition, keying: Keying) -> Result<EstimateVector> {
    let mut components = Vec::new();
    for &g in &c.das {
        match keying {
            Keying::Priority => components.push(Q::from_integer(m.priority(g)? as i64)),
            Keying::Criteria => {
                let da = m.da(g);
                let criteria = &m.parts[m.part_of(g)].criteria;
                if da.estimates.len() != criteria.len() {
                    return Err(Error::MissingEstimate { da: da.id.clone(), criterion: criteria[0].id.clone() });
                }
                components.extend_from_slice(&da.estimates);
            }
        }
    }
    Ok(EstimateVector { keying, components })
}

/// Optimization sense of each component.
pub fn component_directions(m: &Morphology, scope: &str, keying: Keying) -> Result<Vec<Direction>> {
    let parts = m.scope_parts(scope)?;
    Ok(match keying {
        Keying::Priority => vec![Direction::Minimize; parts.len()],
        Keying::Criteria => parts.iter().flat_map(|&p| m.parts[p].criteria.iter().map(|c| c.direction)).collect(),
    })
}

fn pick(values: impl Iterator<Item = Q>, d: Direction) -> Option<Q> {
    match d {
        Direction::Maximize => values.max(),
        Direction::Minimize => values.min(),
    }
}

pub fn generate_ideal(m: &Morphology, scope: &str, keying: Keying, strategy: &IdealStrategy) -> Result<EstimateVector> {
    let parts = m.scope_parts(scope)?;
    let dims = component_directions(m, scope, keying)?.len();
    let mut components = Vec::with_capacity(dims);
    match strategy {
        IdealStrategy::ExpertSupplied(v) => {
            if v.len() != dims {
                return Err(Error::Dimension { expected: dims, found: v.len() });
            }
            components = v.clone();
        }
        IdealStrategy::BestOfAlternatives => {
            for &p in parts {
                let das = m.part_das(p);
                match keying {
                    Keying::Priority => {
                        let best = das.map(|g| m.priority(g)).collect::<Result<Vec<_>>>()?.into_iter().min().unwrap();
                        components.push(Q::from_integer(best as i64));
                    }
                    Keying::Criteria => {
                        for (ci, c) in m.parts[p].criteria.iter().enumerate() {
                            let mut vals = Vec::new();
                            for g in das.clone() {
                                let da = m.da(g);
                                let v = da.estimates.get(ci).ok_or_else(|| Error::MissingEstimate {
                                    da: da.id.clone(),
                                    criterion: c.id.clone(),
                                })?;
                                vals.push(*v);
                            }
                            components.push(pick(vals.into_iter(), c.direction).unwrap());
                        }
                    }
                }
            }
        }
        IdealStrategy::BestOfScale => {
            for &p in parts {
                match keying {
                    Keying::Priority => components.push(Q::from_integer(1)),
                    Keying::Criteria => {
                        for c in &m.parts[p].criteria {
                            let (lo, hi) = c
                                .range
                                .ok_or_else(|| Error::Malformed(format!("criterion `{}` declares no range", c.id)))?;
                            components.push(match c.direction {
                                Direction::Maximize => hi,
                                Direction::Minimize => lo,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(EstimateVector { keying, components })
}

/// Composition of each part's best-priority alternative, first on ties.
pub fn ideal_composition(m: &Morphology, scope: &str) -> Result<Composition> {
    let mut das = Vec::new();
    for &p in m.scope_parts(scope)? {
        let mut best: Option<(u8, usize)> = None;
        for g in m.part_das(p) {
            let r = m.priority(g)?;
            if best.is_none_or(|(b, _)| r < b) {
                best = Some((r, g));
            }
        }
        das.push(best.unwrap().1);
    }
    Ok(Composition { scope: scope.to_string(), das })
}

fn check(a: &EstimateVector, b: &EstimateVector) -> Result<()> {
    if a.keying != b.keying {
        return Err(Error::Malformed("estimate vectors use different keyings".into()));
    }
    if a.components.len() != b.components.len() {
        return Err(Error::Dimension { expected: a.components.len(), found: b.components.len() });
    }
    Ok(())
}

/// Exact ordering key of the distance: the squared distance for l2.
pub fn distance_key(a: &EstimateVector, b: &EstimateVector, metric: Metric) -> Result<Q> {
    check(a, b)?;
    let diffs = a.components.iter().zip(&b.components).map(|(x, y)| (x - y).abs());
    Ok(match metric {
        Metric::L2 => diffs.map(|d| d * d).sum(),
        Metric::L1 => diffs.sum(),
        Metric::Chebyshev => diffs.max().unwrap_or_else(Q::zero),
        Metric::Hamming => Q::from_integer(diffs.filter(|d| !d.is_zero()).count() as i64),
    })
}

pub fn proximity(a: &EstimateVector, b: &EstimateVector, metric: Metric) -> Result<f64> {
    let key = to_f64(&distance_key(a, b, metric)?);
    Ok(if metric == Metric::L2 { key.sqrt() } else { key })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ranked {
    pub composition: Composition,
    pub vector: EstimateVector,
    pub distance: f64,
    pub key: Q,
    /// Another candidate sits at exactly the same distance.
    pub tied: bool,
}

/// Candidates by ascending distance; equal distances keep input order.
pub fn select_closest(
    candidates: &[Composition],
    m: &Morphology,
    ideal: &EstimateVector,
    metric: Metric,
) -> Result<Vec<Ranked>> {
    if candidates.is_empty() {
        return Err(Error::Empty("candidate set"));
    }
    let mut ranked: Vec<Ranked> = candidates
        .par_iter()
        .map(|c| {
            let vector = estimate_vector(m, c, ideal.keying)?;
            let key = distance_key(&vector, ideal, metric)?;
            let distance = proximity(&vector, ideal, metric)?;
            Ok(Ranked { composition: c.clone(), vector, distance, key, tied: false })
        })
        .collect::<Result<_>>()?;
    ranked.sort_by(|a, b| a.key.cmp(&b.key));
    for i in 0..ranked.len() {
        let prev = i > 0 && ranked[i - 1].key == ranked[i].key;
        let next = i + 1 < ranked.len() && ranked[i + 1].key == ranked[i].key;
        ranked[i].tied = prev || next;
    }
    Ok(ranked)
}

/// Union of the minimizers for each ideal, in candidate order.
pub fn closest_to_any(
    candidates: &[Composition],
    m: &Morphology,
    ideals: &[EstimateVector],
    metric: Metric,
) -> Result<Vec<Composition>> {
    let mut hit = vec![false; candidates.len()];
    for ideal in ideals {
        let ranked = select_closest(candidates, m, ideal, metric)?;
        let best = ranked[0].key;
        for r in ranked.iter().take_while(|r| r.key == best) {
            for (i, c) in candidates.iter().enumerate() {
                if *c == r.composition {
                    hit[i] = true;
                }
            }
        }
    }
    Ok(candidates.iter().zip(hit).filter_map(|(c, h)| h.then(|| c.clone())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::q;

    fn pv(xs: &[i64]) -> EstimateVector {
        EstimateVector { keying: Keying::Priority, components: xs.iter().map(|&x| q(x)).collect() }
    }

    #[test]
    fn proximity_examples() {
        let ideal = pv(&[1, 1, 1, 1, 1]);
        assert!((proximity(&pv(&[1, 1, 2, 2, 2]), &ideal, Metric::L2).unwrap() - 1.7321).abs() < 1e-4);
        assert!((proximity(&pv(&[2, 1, 2, 2, 2]), &ideal, Metric::L2).unwrap() - 2.0).abs() < 1e-4);
        for metric in [Metric::L2, Metric::L1, Metric::Chebyshev, Metric::Hamming] {
            assert_eq!(proximity(&ideal, &ideal, metric).unwrap(), 0.0);
        }
        assert_eq!(proximity(&pv(&[1, 3]), &pv(&[2, 1]), Metric::L1).unwrap(), 3.0);
        assert_eq!(proximity(&pv(&[1, 3]), &pv(&[2, 1]), Metric::Chebyshev).unwrap(), 2.0);
        assert!(proximity(&pv(&[1]), &pv(&[1, 1]), Metric::L2).is_err());
    }

    #[test]
    fn gsm_ideals() {
        let m = fixtures::gsm();
        let ideal = generate_ideal(&m, "S", Keying::Priority, &IdealStrategy::BestOfAlternatives).unwrap();
        assert_eq!(ideal, pv(&[1, 1, 1, 1, 1]));
        assert_eq!(generate_ideal(&m, "S", Keying::Priority, &IdealStrategy::BestOfScale).unwrap(), ideal);
        let crit = generate_ideal(&m, "A", Keying::Criteria, &IdealStrategy::BestOfAlternatives).unwrap();
        assert_eq!(crit.components.len(), 9);
        assert_eq!(crit.components[0], Q::new(41, 10));
        assert!(generate_ideal(&m, "A", Keying::Criteria, &IdealStrategy::BestOfScale).is_err());
        let bad = IdealStrategy::ExpertSupplied(vec![q(1); 4]);
        assert!(matches!(generate_ideal(&m, "S", Keying::Priority, &bad), Err(Error::Dimension { .. })));
    }

    #[test]
    fn demo_ideal_composition() {
        let m = fixtures::load("ma_demo_ideal").unwrap();
        assert_eq!(ideal_composition(&m, "S").unwrap().label(&m), "X1_1★Xi_3★Xm_3");
        let cands = crate::enumerate::enumerate_admissible(&m, "S", 1).unwrap();
        let ideal = generate_ideal(&m, "S", Keying::Priority, &IdealStrategy::BestOfAlternatives).unwrap();
        let ranked = select_closest(&cands, &m, &ideal, Metric::L2).unwrap();
        assert_eq!(ranked[0].composition.label(&m), "X1_5★Xi_3★Xm_3");
    }

    #[test]
    fn ties_are_flagged_in_input_order() {
        let m = fixtures::toy();
        let c = crate::enumerate::enumerate_admissible(&m, "S", 1).unwrap();
        let single = select_closest(&c[..1], &m, &pv(&[3, 3, 3]), Metric::L2).unwrap();
        assert!(!single[0].tied);
        let same = vec![c[0].clone(), c[0].clone()];
        let v = estimate_vector(&m, &c[0], Keying::Priority).unwrap();
        let r = select_closest(&same, &m, &v, Metric::L1).unwrap();
        assert!(r.iter().all(|x| x.tied && x.distance == 0.0));
        assert!(select_closest(&[], &m, &v, Metric::L1).is_err());
    }
}
