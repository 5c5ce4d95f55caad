//! Priorities from multicriteria estimates.

use indexmap::IndexMap;
use num_traits::Zero;
use petgraph::algo::condensation;
use petgraph::graph::DiGraph;
use petgraph::Direction as Edge;

use crate::error::{Error, Result};
use crate::model::{Direction, Part};
use crate::pareto::pareto_scan;
use crate::rational::{fmt_q, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankingMethod {
    /// Peel non-dominated sets one after another.
    DominanceLayers,
    /// Concordance digraph, layered over its strongly connected components.
    WeightedOutranking,
}

#[derive(Debug, Clone)]
pub struct RankingConfig {
    pub method: RankingMethod,
    /// Weight share needed for `x` to outrank `y`; in (1/2, 1].
    pub concordance_threshold: Q,
    /// Number of priority levels.
    pub k: u8,
}

impl Default for RankingConfig {
    fn default() -> Self {
        RankingConfig { method: RankingMethod::DominanceLayers, concordance_threshold: Q::new(2, 3), k: 3 }
    }
}

/// Estimates with minimized criteria negated, so larger is always better.
fn normalized(part: &Part) -> Result<Vec<Vec<Q>>> {
    part.alternatives
        .iter()
        .map(|a| {
            if a.estimates.len() != part.criteria.len() || part.criteria.is_empty() {
                let criterion = part.criteria.first().map_or_else(|| "(none)".to_string(), |c| c.id.clone());
                return Err(Error::MissingEstimate { da: a.id.clone(), criterion });
            }
            Ok(a
                .estimates
                .iter()
                .zip(&part.criteria)
                .map(|(v, c)| if c.direction == Direction::Minimize { -*v } else { *v })
                .collect())
        })
        .collect()
}

fn dominance_layers(vectors: &[Vec<Q>]) -> Result<Vec<usize>> {
    let dirs = vec![Direction::Maximize; vectors[0].len()];
    let mut layer = vec![0usize; vectors.len()];
    let mut left: Vec<usize> = (0..vectors.len()).collect();
    let mut current = 0;
    while !left.is_empty() {
        current += 1;
        let subset: Vec<&Vec<Q>> = left.iter().map(|&i| &vectors[i]).collect();
        let front = pareto_scan(&subset, &dirs)?;
        for &f in &front {
            layer[left[f]] = current;
        }
        left = left.into_iter().enumerate().filter(|(i, _)| !front.contains(i)).map(|(_, v)| v).collect();
    }
    Ok(layer)
}

fn outranking_layers(vectors: &[Vec<Q>], weights: &[Q], threshold: Q) -> Vec<usize> {
    let n = vectors.len();
    let total: Q = weights.iter().copied().sum();
    let mut g = DiGraph::<usize, ()>::new();
    let nodes: Vec<_> = (0..n).map(|i| g.add_node(i)).collect();
    for x in 0..n {
        for y in 0..n {
            if x == y {
                continue;
            }
            let agree: Q = vectors[x].iter().zip(&vectors[y]).zip(weights).filter(|((a, b), _)| a >= b).map(|(_, w)| *w).sum();
            if agree >= threshold * total {
                g.add_edge(nodes[x], nodes[y], ());
            }
        }
    }
    let dag = condensation(g, true);
    let mut depth = vec![0usize; dag.node_count()];
    let order = petgraph::algo::toposort(&dag, None).expect("condensation is acyclic");
    for v in order {
        let d = dag.neighbors_directed(v, Edge::Incoming).map(|u| depth[u.index()]).max().map_or(1, |m| m + 1);
        depth[v.index()] = d;
    }
    let mut layer = vec![0usize; n];
    for v in dag.node_indices() {
        for &i in &dag[v] {
            layer[i] = depth[v.index()];
        }
    }
    layer
}

/// Map of alternative id to priority; 1 is best and the levels used are contiguous.
pub fn rank_alternatives(part: &Part, cfg: &RankingConfig) -> Result<IndexMap<String, u8>> {
    if cfg.k < 1 {
        return Err(Error::OutOfRange("k = 0".into()));
    }
    if part.alternatives.is_empty() {
        return Err(Error::EmptyPart(part.id.clone()));
    }
    if part.alternatives.len() == 1 {
        return Ok(IndexMap::from([(part.alternatives[0].id.clone(), 1)]));
    }
    let vectors = normalized(part)?;
    let layer = match cfg.method {
        RankingMethod::DominanceLayers => dominance_layers(&vectors)?,
        RankingMethod::WeightedOutranking => {
            let t = cfg.concordance_threshold;
            if t <= Q::new(1, 2) || t > Q::from_integer(1) {
                return Err(Error::OutOfRange(format!("concordance threshold {}", fmt_q(&t))));
            }
            let weights: Vec<Q> = part.criteria.iter().map(|c| c.weight).collect();
            if weights.iter().copied().sum::<Q>().is_zero() {
                return Err(Error::OutOfRange(format!("weights of part `{}`", part.id)));
            }
            outranking_layers(&vectors, &weights, t)
        }
    };
    let layers = *layer.iter().max().unwrap();
    let k = cfg.k as usize;
    Ok(part
        .alternatives
        .iter()
        .zip(&layer)
        .map(|(a, &l)| {
            let p = if layers > k { (l * k).div_ceil(layers) } else { l };
            (a.id.clone(), p as u8)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{Criterion, DesignAlternative};
    use crate::rational::q;

    fn part(rows: &[&[i64]], dirs: &[Direction]) -> Part {
        let criteria = dirs
            .iter()
            .enumerate()
            .map(|(i, d)| Criterion {
                id: format!("c{i}"),
                weight: Q::new(1, dirs.len() as i64),
                direction: *d,
                scale_note: String::new(),
                range: None,
            })
            .collect();
        let alternatives = rows
            .iter()
            .enumerate()
            .map(|(i, r)| DesignAlternative {
                id: format!("d{}", i + 1),
                part_id: "P".into(),
                label: String::new(),
                estimates: r.iter().map(|&x| q(x)).collect(),
                priority: None,
                fuzzy_priority: None,
            })
            .collect();
        Part { id: "P".into(), label: String::new(), criteria, alternatives }
    }

    fn values(m: &IndexMap<String, u8>) -> Vec<u8> {
        m.values().copied().collect()
    }

    #[test]
    fn singleton_and_chain() {
        let cfg = RankingConfig::default();
        assert_eq!(values(&rank_alternatives(&part(&[&[1, 2]], &[Direction::Maximize; 2]), &cfg).unwrap()), [1]);
        let chain = part(&[&[3, 3], &[2, 2], &[1, 1]], &[Direction::Maximize; 2]);
        assert_eq!(values(&rank_alternatives(&chain, &cfg).unwrap()), [1, 2, 3]);
    }

    #[test]
    fn minimize_flips() {
        let cfg = RankingConfig::default();
        let p = part(&[&[3, 3], &[2, 2], &[1, 1]], &[Direction::Minimize; 2]);
        assert_eq!(values(&rank_alternatives(&p, &cfg).unwrap()), [3, 2, 1]);
    }

    #[test]
    fn compresses_to_k() {
        let cfg = RankingConfig { k: 2, ..Default::default() };
        let p = part(&[&[4], &[3], &[2], &[1]], &[Direction::Maximize]);
        assert_eq!(values(&rank_alternatives(&p, &cfg).unwrap()), [1, 1, 2, 2]);
    }

    #[test]
    fn outranking_is_dominance_consistent_on_m() {
        let m = fixtures::gsm();
        let cfg = RankingConfig { method: RankingMethod::WeightedOutranking, ..Default::default() };
        let part = &m.parts[0];
        let r = rank_alternatives(part, &cfg).unwrap();
        let v = normalized(part).unwrap();
        let dirs = vec![Direction::Maximize; v[0].len()];
        for (i, a) in part.alternatives.iter().enumerate() {
            for (j, b) in part.alternatives.iter().enumerate() {
                if crate::pareto::dominates(&v[i], &v[j], &dirs).unwrap() {
                    assert!(r[&a.id] <= r[&b.id]);
                }
            }
        }
        let mut levels: Vec<u8> = r.values().copied().collect();
        levels.sort();
        levels.dedup();
        assert_eq!(levels, (1..=levels.len() as u8).collect::<Vec<_>>());
    }

    #[test]
    fn threshold_checked() {
        let m = fixtures::gsm();
        let cfg = RankingConfig { method: RankingMethod::WeightedOutranking, concordance_threshold: Q::new(1, 2), k: 3 };
        assert!(rank_alternatives(&m.parts[0], &cfg).is_err());
    }
}
