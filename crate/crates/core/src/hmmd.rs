//! Hierarchical morphological design over ordinal quality vectors.
//!
//! A composition's quality is `N(S) = (w; n1,..,nk)`: `w` is the minimum
//! compatibility over its declared pairs and `n_r` counts selected
//! alternatives of priority `r`. Censuses are ordered by prefix sums
//! (`n1`, `n1+n2`, ..), which makes the space of quality vectors a lattice.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::enumerate::{self, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::model::{Composition, Morphology, SystemNode};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QualityVector {
    pub w: u8,
    pub n: Vec<u32>,
}

impl QualityVector {
    pub fn new(w: u8, n: Vec<u32>) -> Self {
        QualityVector { w, n }
    }

    /// Neutral element of integration: an empty scope at top compatibility.
    pub fn neutral(l: u8, k: u8) -> Self {
        QualityVector { w: l, n: vec![0; k as usize] }
    }

    pub fn parts(&self) -> u32 {
        self.n.iter().sum()
    }

    fn prefix(&self) -> impl Iterator<Item = u32> + '_ {
        self.n.iter().scan(0u32, |acc, &v| {
            *acc += v;
            Some(*acc)
        })
    }
}

impl fmt::Display for QualityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n: Vec<String> = self.n.iter().map(u32::to_string).collect();
        write!(f, "({}; {})", self.w, n.join(","))
    }
}

impl FromStr for QualityVector {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let bad = || format!("not a quality vector: `{s}`");
        let body = s.trim().strip_prefix('(').and_then(|b| b.strip_suffix(')')).ok_or_else(bad)?;
        let (w, n) = body.split_once(';').ok_or_else(bad)?;
        let w = w.trim().parse().map_err(|_| bad())?;
        let n = n.split(',').map(|x| x.trim().parse()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
        Ok(QualityVector { w, n })
    }
}

impl Serialize for QualityVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Minimum level over the declared pairs among `das`, or `l` when none are declared.
pub fn min_compatibility(m: &Morphology, das: &[usize]) -> u8 {
    let mut w = m.scales.l;
    for (i, &a) in das.iter().enumerate() {
        for &b in &das[i + 1..] {
            if m.parts_declared(m.part_of(a), m.part_of(b)) {
                if let Some(v) = m.level(a, b) {
                    w = w.min(v);
                }
            }
        }
    }
    w
}

pub fn census(m: &Morphology, das: &[usize]) -> Result<Vec<u32>> {
    let mut n = vec![0u32; m.scales.k as usize];
    for &g in das {
        n[m.priority(g)? as usize - 1] += 1;
    }
    Ok(n)
}

pub fn quality_vector(m: &Morphology, c: &Composition) -> Result<QualityVector> {
    Ok(QualityVector { w: min_compatibility(m, &c.das), n: census(m, &c.das)? })
}

fn check_shape(a: &QualityVector, b: &QualityVector) -> Result<()> {
    if a.n.len() != b.n.len() {
        return Err(Error::Dimension { expected: a.n.len(), found: b.n.len() });
    }
    if a.parts() != b.parts() {
        return Err(Error::Dimension { expected: a.parts() as usize, found: b.parts() as usize });
    }
    Ok(())
}

/// Weak prefix-sum dominance of censuses.
pub fn census_at_least(a: &[u32], b: &[u32]) -> bool {
    let (mut sa, mut sb) = (0u32, 0u32);
    a.iter().zip(b).all(|(x, y)| {
        sa += x;
        sb += y;
        sa >= sb
    })
}

/// `a.w >= b.w` and every prefix sum of `a.n` reaches that of `b.n`, with `a != b`.
pub fn quality_dominates(a: &QualityVector, b: &QualityVector) -> Result<bool> {
    check_shape(a, b)?;
    Ok(a != b && a.w >= b.w && census_at_least(&a.n, &b.n))
}

/// `a` dominates `b` with nothing in between: one unit of `w` or of one prefix sum.
pub fn quality_covers(a: &QualityVector, b: &QualityVector) -> Result<bool> {
    if !quality_dominates(a, b)? {
        return Ok(false);
    }
    let gap: u32 = u32::from(a.w - b.w) + a.prefix().zip(b.prefix()).map(|(x, y)| x - y).sum::<u32>();
    Ok(gap == 1)
}

/// `(min w, n + n')`.
pub fn integrate_quality(a: &QualityVector, b: &QualityVector) -> Result<QualityVector> {
    if a.n.len() != b.n.len() {
        return Err(Error::Dimension { expected: a.n.len(), found: b.n.len() });
    }
    Ok(QualityVector { w: a.w.min(b.w), n: a.n.iter().zip(&b.n).map(|(x, y)| x + y).collect() })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Solution {
    pub composition: Composition,
    pub quality: QualityVector,
}

/// Members not dominated by any other, in input order; equal vectors all survive.
pub fn quality_frontier(items: Vec<Solution>) -> Vec<Solution> {
    let keep: Vec<bool> = items
        .par_iter()
        .map(|s| !items.iter().any(|t| quality_dominates(&t.quality, &s.quality).unwrap_or(false)))
        .collect();
    items.into_iter().zip(keep).filter_map(|(s, k)| k.then_some(s)).collect()
}

#[derive(Debug, Clone, Copy)]
pub struct HmmdOptions {
    /// Least admissible `w`.
    pub min_w: u8,
    /// Keep only efficient child solutions before crossing.
    pub prune: bool,
    pub cap: usize,
}

impl Default for HmmdOptions {
    fn default() -> Self {
        HmmdOptions { min_w: 1, prune: true, cap: DEFAULT_CAP }
    }
}

fn check_min_w(m: &Morphology, min_w: u8) -> Result<()> {
    if min_w < 1 || min_w > m.scales.l {
        return Err(Error::OutOfRange(format!("min w {min_w} (scale 1..={})", m.scales.l)));
    }
    Ok(())
}

fn admissible(m: &Morphology, scope: &str, opts: &HmmdOptions) -> Result<Vec<Solution>> {
    enumerate::search(m, scope, opts.min_w, opts.cap)?
        .into_iter()
        .map(|c| quality_vector(m, &c).map(|q| Solution { composition: c, quality: q }))
        .collect()
}

/// Efficient compositions of all leaves under `scope`, searched flat.
pub fn solve_morphological_clique(m: &Morphology, scope: &str, opts: &HmmdOptions) -> Result<Vec<Solution>> {
    check_min_w(m, opts.min_w)?;
    Ok(quality_frontier(admissible(m, scope, opts)?))
}

/// Bottom-up composition over the system tree.
pub fn solve_hierarchical(m: &Morphology, opts: &HmmdOptions) -> Result<Vec<Solution>> {
    check_min_w(m, opts.min_w)?;
    Ok(quality_frontier(solve_node(m, &m.root, opts)?))
}

fn solve_node(m: &Morphology, node: &SystemNode, opts: &HmmdOptions) -> Result<Vec<Solution>> {
    let SystemNode::Internal { id, children, .. } = node else {
        return admissible(m, m.node_id(node), opts);
    };
    if children.iter().all(|c| matches!(c, SystemNode::Leaf(_))) {
        return admissible(m, id, opts);
    }
    let groups: Vec<&[usize]> = children.iter().map(|c| m.scope_parts(m.node_id(c))).collect::<Result<_>>()?;
    let mut cross = false;
    for (i, a) in groups.iter().enumerate() {
        for b in &groups[i + 1..] {
            cross |= a.iter().any(|&pa| b.iter().any(|&pb| m.parts_declared(pa, pb)));
        }
    }
    // pruning children is exact only when no table links them
    let prune = opts.prune && !cross;
    let mut lists = Vec::with_capacity(children.len());
    for c in children {
        let sols = solve_node(m, c, opts)?;
        lists.push(if prune { quality_frontier(sols) } else { sols });
    }
    let total: u128 = lists.iter().map(|l| l.len() as u128).product();
    if total > opts.cap as u128 {
        return Err(Error::CapExceeded { what: "hierarchical cross product", cap: opts.cap as u64 });
    }

    let combine = |head: &Solution| -> Result<Vec<Solution>> {
        let mut acc = vec![head.clone()];
        for list in &lists[1..] {
            let mut next = Vec::with_capacity(acc.len() * list.len());
            for a in &acc {
                for b in list {
                    let mut das = a.composition.das.clone();
                    das.extend_from_slice(&b.composition.das);
                    let mut q = integrate_quality(&a.quality, &b.quality)?;
                    if cross {
                        q.w = q.w.min(cross_min(m, &a.composition.das, &b.composition.das));
                    }
                    if q.w >= opts.min_w {
                        next.push(Solution { composition: Composition { scope: id.clone(), das }, quality: q });
                    }
                }
            }
            acc = next;
        }
        Ok(acc)
    };
    let parts: Vec<Vec<Solution>> = lists[0].par_iter().map(combine).collect::<Result<_>>()?;
    Ok(parts.into_iter().flatten().collect())
}

fn cross_min(m: &Morphology, left: &[usize], right: &[usize]) -> u8 {
    let mut w = m.scales.l;
    for &a in left {
        for &b in right {
            if m.parts_declared(m.part_of(a), m.part_of(b)) {
                if let Some(v) = m.level(a, b) {
                    w = w.min(v);
                }
            }
        }
    }
    w
}

/// Admissible compositions one lattice step below some efficient one.
pub fn neighborhood(m: &Morphology, scope: &str, opts: &HmmdOptions) -> Result<Vec<(Solution, QualityVector)>> {
    check_min_w(m, opts.min_w)?;
    let all = admissible(m, scope, opts)?;
    let front: Vec<QualityVector> = quality_frontier(all.clone()).into_iter().map(|s| s.quality).collect();
    let mut out = Vec::new();
    for s in all {
        if front.contains(&s.quality) {
            continue;
        }
        if let Some(f) = front.iter().find(|f| quality_covers(f, &s.quality).unwrap_or(false)) {
            out.push((s, f.clone()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn qv(s: &str) -> QualityVector {
        s.parse().unwrap()
    }

    fn shown(m: &Morphology, v: &[Solution]) -> Vec<String> {
        v.iter().map(|s| format!("{} {}", s.composition.label(m), s.quality)).collect()
    }

    #[test]
    fn toy_vectors() {
        let m = fixtures::toy();
        let s1 = m.composition("S", &["X2", "Y2", "Z2"]).unwrap();
        let s3 = m.composition("S", &["X1", "Y1", "Z3"]).unwrap();
        assert_eq!(quality_vector(&m, &s1).unwrap(), qv("(1;2,1,0)"));
        assert_eq!(quality_vector(&m, &s3).unwrap(), qv("(3;0,2,1)"));
    }

    #[test]
    fn gsm_b_vector() {
        let m = fixtures::gsm();
        let b = m.composition("B", &["V1", "U5", "T1"]).unwrap();
        assert_eq!(quality_vector(&m, &b).unwrap().to_string(), "(3; 1,1,1)");
    }

    #[test]
    fn dominance_examples() {
        assert!(quality_dominates(&qv("(2;2,1,0)"), &qv("(2;1,2,0)")).unwrap());
        assert!(!quality_dominates(&qv("(2;2,0,1)"), &qv("(2;1,2,0)")).unwrap());
        assert!(!quality_dominates(&qv("(2;1,2,0)"), &qv("(2;2,0,1)")).unwrap());
        assert!(!quality_dominates(&qv("(2;1,2,0)"), &qv("(2;1,2,0)")).unwrap());
        assert!(quality_dominates(&qv("(2;1,2,0)"), &qv("(2;1,1,0)")).is_err());
        assert!(quality_dominates(&qv("(2;1,2)"), &qv("(2;1,2,0)")).is_err());
    }

    #[test]
    fn integration() {
        assert_eq!(integrate_quality(&qv("(3;2,0,0)"), &qv("(2;3,0,0)")).unwrap(), qv("(2;5,0,0)"));
        assert_eq!(integrate_quality(&qv("(3;2,0,0)"), &qv("(3;1,1,1)")).unwrap(), qv("(3;3,1,1)"));
        let x = qv("(2;1,0,3)");
        assert_eq!(integrate_quality(&x, &QualityVector::neutral(3, 3)).unwrap(), x);
    }

    #[test]
    fn clique_fixtures() {
        let m = fixtures::toy();
        let o = HmmdOptions::default();
        assert_eq!(
            shown(&m, &solve_morphological_clique(&m, "S", &o).unwrap()),
            ["X1★Y1★Z3 (3; 0,2,1)", "X1★Y2★Z2 (2; 1,2,0)", "X2★Y2★Z2 (1; 2,1,0)"]
        );
        let m = fixtures::gsm();
        assert_eq!(shown(&m, &solve_morphological_clique(&m, "A", &o).unwrap()), ["M4★L2 (3; 2,0,0)", "M4★L4 (3; 2,0,0)"]);
        // V1 ties V5 here: both have priority 1 and the V-U, V-T levels stay at 2
        assert_eq!(
            shown(&m, &solve_morphological_clique(&m, "B", &o).unwrap()),
            [
                "V1★U1★T5 (2; 3,0,0)",
                "V1★U4★T2 (2; 3,0,0)",
                "V1★U5★T1 (3; 1,1,1)",
                "V2★U3★T4 (3; 0,3,0)",
                "V5★U1★T5 (2; 3,0,0)",
                "V5★U4★T2 (2; 3,0,0)"
            ]
        );
    }

    #[test]
    fn hierarchical_gsm() {
        let m = fixtures::gsm();
        let pruned = solve_hierarchical(&m, &HmmdOptions::default()).unwrap();
        let full = solve_hierarchical(&m, &HmmdOptions { prune: false, ..Default::default() }).unwrap();
        let flat = solve_morphological_clique(&m, "S", &HmmdOptions::default()).unwrap();
        assert_eq!(pruned.len(), 12);
        assert_eq!(full, flat);
        // pruning keeps every efficient vector but may drop ties reached through dominated children
        assert!(pruned.iter().all(|s| full.contains(s)));
        let vectors = |v: &[Solution]| v.iter().map(|s| s.quality.clone()).collect::<std::collections::BTreeSet<_>>();
        assert_eq!(vectors(&pruned), vectors(&full));
    }

    #[test]
    fn single_leaf_tree() {
        let doc = crate::instance::InstanceDocument::from_json(
            r#"{"system":{"part":"P"},"alternatives":{"P":[{"id":"p1","priority":2},{"id":"p2","priority":1},{"id":"p3","priority":1}]}}"#,
        )
        .unwrap();
        let m = crate::model::validate_morphology(&doc).unwrap();
        let s = solve_hierarchical(&m, &HmmdOptions::default()).unwrap();
        assert_eq!(shown(&m, &s), ["p2 (3; 1,0,0)", "p3 (3; 1,0,0)"]);
    }

    #[test]
    fn neighborhood_is_one_step_below() {
        let m = fixtures::toy();
        let o = HmmdOptions::default();
        for (s, above) in neighborhood(&m, "S", &o).unwrap() {
            assert!(quality_covers(&above, &s.quality).unwrap());
        }
    }

    #[test]
    fn covers() {
        assert!(quality_covers(&qv("(1;3,0,0)"), &qv("(1;2,1,0)")).unwrap());
        assert!(!quality_covers(&qv("(1;3,0,0)"), &qv("(1;1,2,0)")).unwrap());
        assert!(quality_covers(&qv("(2;1,1,1)"), &qv("(1;1,1,1)")).unwrap());
    }

    #[test]
    fn parse_and_print() {
        assert_eq!(qv(" (2; 5,0,0) ").to_string(), "(2; 5,0,0)");
        assert!("2;5".parse::<QualityVector>().is_err());
    }
}
