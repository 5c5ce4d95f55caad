//! Fuzzy priorities and compatibilities.
//!
//! Crisp aggregation takes the level of largest membership and resolves ties
//! toward the worse level. Joint membership of a composition follows the
//! extension principle with `min`; identical quality vectors keep the `max`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::enumerate::{self, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::hmmd::{census_at_least, quality_dominates, QualityVector};
use crate::model::{Composition, Morphology};
use crate::rational::Q;

/// `mu[r-1]` is the membership of priority `r`; ties go to the larger `r`.
pub fn aggregate_priority(mu: &[Q]) -> Result<u8> {
    let i = argmax_last(mu)?;
    Ok(i as u8 + 1)
}

/// `mu[0]` is the membership of level `l`, `mu[l]` of level 0; ties go to the lower level.
pub fn aggregate_compatibility(mu: &[Q]) -> Result<u8> {
    let i = argmax_last(mu)?;
    Ok((mu.len() - 1 - i) as u8)
}

fn argmax_last(mu: &[Q]) -> Result<usize> {
    let best = mu.iter().max().ok_or(Error::Empty("membership vector"))?;
    if !positive(best) {
        return Err(Error::Empty("membership vector has no positive entry"));
    }
    Ok(mu.iter().rposition(|v| v == best).unwrap())
}

fn positive(v: &Q) -> bool {
    *v > Q::zero()
}

/// Which estimates stay fuzzy; the rest are aggregated first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FuzzyCase {
    /// Both aggregated.
    Crisp = 1,
    /// Priorities aggregated, compatibilities fuzzy.
    FuzzyCompatibility = 2,
    /// Compatibilities aggregated, priorities fuzzy.
    FuzzyPriority = 3,
    /// Both fuzzy.
    Full = 4,
}

impl FuzzyCase {
    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(FuzzyCase::Crisp),
            2 => Ok(FuzzyCase::FuzzyCompatibility),
            3 => Ok(FuzzyCase::FuzzyPriority),
            4 => Ok(FuzzyCase::Full),
            _ => Err(Error::OutOfRange(format!("case {n} (1..=4)"))),
        }
    }

    fn fuzzy_priorities(self) -> bool {
        matches!(self, FuzzyCase::FuzzyPriority | FuzzyCase::Full)
    }

    fn fuzzy_compatibilities(self) -> bool {
        matches!(self, FuzzyCase::FuzzyCompatibility | FuzzyCase::Full)
    }
}

/// `(level, membership)` pairs with positive membership.
fn priority_levels(m: &Morphology, g: usize, case: FuzzyCase) -> Result<Vec<(u8, Q)>> {
    let da = m.da(g);
    match (&da.fuzzy_priority, case.fuzzy_priorities()) {
        (Some(mu), true) => Ok(mu
            .iter()
            .enumerate()
            .filter(|(_, v)| positive(v))
            .map(|(i, v)| (i as u8 + 1, *v))
            .collect()),
        _ => Ok(vec![(m.priority(g)?, Q::one())]),
    }
}

fn pair_levels(m: &Morphology, a: usize, b: usize, case: FuzzyCase) -> Option<Vec<(u8, Q)>> {
    let crisp = m.level(a, b)?;
    match (m.compat.fuzzy(a, b), case.fuzzy_compatibilities()) {
        (Some(mu), true) => {
            let top = mu.len() - 1;
            Some(
                mu.iter()
                    .enumerate()
                    .filter(|(_, v)| positive(v))
                    .map(|(i, v)| ((top - i) as u8, *v))
                    .collect(),
            )
        }
        _ => Some(vec![(crisp, Q::one())]),
    }
}

fn modal_priority(m: &Morphology, g: usize, case: FuzzyCase) -> Result<u8> {
    match (&m.da(g).fuzzy_priority, case.fuzzy_priorities()) {
        (Some(mu), true) => aggregate_priority(mu),
        _ => m.priority(g),
    }
}

fn modal_level(m: &Morphology, a: usize, b: usize, case: FuzzyCase) -> Result<u8> {
    match (m.compat.fuzzy(a, b), case.fuzzy_compatibilities()) {
        (Some(mu), true) => aggregate_compatibility(mu),
        _ => Ok(m.level(a, b).expect("declared pair")),
    }
}

fn declared_pairs(m: &Morphology, das: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, &a) in das.iter().enumerate() {
        for &b in &das[i + 1..] {
            if m.parts_declared(m.part_of(a), m.part_of(b)) && m.level(a, b).is_some() {
                out.push((a, b));
            }
        }
    }
    out
}

/// Quality vectors reachable with positive membership, each with its membership,
/// cut at `alpha`, best vectors first.
pub fn quality_support(m: &Morphology, c: &Composition, case: FuzzyCase, alpha: Q) -> Result<Vec<(QualityVector, Q)>> {
    if alpha < Q::zero() || alpha > Q::one() {
        return Err(Error::OutOfRange("alpha".into()));
    }
    let l = m.scales.l;
    let k = m.scales.k as usize;

    // w factor: some pair sits exactly at w while the others stay at or above it
    let pairs: Vec<Vec<(u8, Q)>> =
        declared_pairs(m, &c.das).iter().map(|&(a, b)| pair_levels(m, a, b, case).expect("declared")).collect();
    let mut mu_w: BTreeMap<u8, Q> = BTreeMap::new();
    if pairs.is_empty() {
        mu_w.insert(l, Q::one());
    } else {
        let at_least = |p: &[(u8, Q)], t: u8| p.iter().filter(|(v, _)| *v >= t).map(|(_, mu)| *mu).max();
        for w in 0..=l {
            let mut best: Option<Q> = None;
            for (i, p) in pairs.iter().enumerate() {
                let Some(exact) = p.iter().find(|(v, _)| *v == w).map(|(_, mu)| *mu) else { continue };
                let mut joint = exact;
                let mut ok = true;
                for (j, o) in pairs.iter().enumerate() {
                    if i != j {
                        match at_least(o, w) {
                            Some(mu) => joint = joint.min(mu),
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                }
                if ok {
                    best = Some(best.map_or(joint, |b| b.max(joint)));
                }
            }
            if let Some(b) = best {
                mu_w.insert(w, b);
            }
        }
    }

    // census factor by dynamic programming over the selected alternatives
    let mut mu_n: BTreeMap<Vec<u32>, Q> = BTreeMap::from([(vec![0u32; k], Q::one())]);
    for &g in &c.das {
        let levels = priority_levels(m, g, case)?;
        let mut next: BTreeMap<Vec<u32>, Q> = BTreeMap::new();
        for (n, mu) in &mu_n {
            for (r, v) in &levels {
                let mut n2 = n.clone();
                n2[*r as usize - 1] += 1;
                let joint = (*mu).min(*v);
                let e = next.entry(n2).or_insert(joint);
                if joint > *e {
                    *e = joint;
                }
            }
        }
        mu_n = next;
    }

    let mut out = Vec::new();
    for (w, a) in mu_w.iter().rev() {
        for (n, b) in mu_n.iter().rev() {
            let mu = (*a).min(*b);
            if positive(&mu) && mu >= alpha {
                out.push((QualityVector::new(*w, n.clone()), mu));
            }
        }
    }
    if out.is_empty() {
        return Err(Error::EmptySupport);
    }
    Ok(out)
}

/// Quality vector of the aggregated estimates.
pub fn modal_quality(m: &Morphology, c: &Composition, case: FuzzyCase) -> Result<QualityVector> {
    let mut w = m.scales.l;
    for (a, b) in declared_pairs(m, &c.das) {
        w = w.min(modal_level(m, a, b, case)?);
    }
    let mut n = vec![0u32; m.scales.k as usize];
    for &g in &c.das {
        n[modal_priority(m, g, case)? as usize - 1] += 1;
    }
    Ok(QualityVector::new(w, n))
}

/// Worst `w` of the support with the meet of its censuses.
pub fn pessimistic_corner(support: &[(QualityVector, Q)]) -> QualityVector {
    let w = support.iter().map(|(q, _)| q.w).min().unwrap_or(0);
    let k = support.first().map_or(0, |(q, _)| q.n.len());
    let mut prefix = vec![u32::MAX; k];
    for (q, _) in support {
        let mut s = 0;
        for (i, v) in q.n.iter().enumerate() {
            s += v;
            prefix[i] = prefix[i].min(s);
        }
    }
    let mut prev = 0;
    let n = prefix
        .iter()
        .map(|&p| {
            let d = p - prev;
            prev = p;
            d
        })
        .collect();
    QualityVector::new(w, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preference {
    /// Compare maximal-membership vectors; pessimistic corners break ties.
    MaxMembership,
    /// Compare pessimistic corners; maximal-membership vectors break ties.
    Pessimistic,
}

#[derive(Debug, Clone)]
pub struct FuzzyOptions {
    pub case: FuzzyCase,
    pub alpha: Q,
    pub preference: Preference,
    pub min_w: u8,
    pub cap: usize,
}

impl Default for FuzzyOptions {
    fn default() -> Self {
        FuzzyOptions {
            case: FuzzyCase::Crisp,
            alpha: Q::zero(),
            preference: Preference::MaxMembership,
            min_w: 1,
            cap: DEFAULT_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyDecision {
    pub composition: Composition,
    pub support: Vec<(QualityVector, Q)>,
    pub modal: QualityVector,
    pub pessimistic: QualityVector,
}

fn preferred(a: &FuzzyDecision, b: &FuzzyDecision, pref: Preference) -> bool {
    let (pa, sa, pb, sb) = match pref {
        Preference::MaxMembership => (&a.modal, &a.pessimistic, &b.modal, &b.pessimistic),
        Preference::Pessimistic => (&a.pessimistic, &a.modal, &b.pessimistic, &b.modal),
    };
    quality_dominates(pa, pb).unwrap_or(false) || (pa == pb && quality_dominates(sa, sb).unwrap_or(false))
}

/// Feasible decisions (pessimistic `w >= min_w`) not beaten under the preference rule.
pub fn solve_fuzzy(m: &Morphology, scope: &str, opts: &FuzzyOptions) -> Result<Vec<FuzzyDecision>> {
    if opts.min_w < 1 || opts.min_w > m.scales.l {
        return Err(Error::OutOfRange(format!("min w {}", opts.min_w)));
    }
    let comps = enumerate::search(m, scope, 0, opts.cap)?;
    let decisions: Vec<FuzzyDecision> = comps
        .into_par_iter()
        .map(|c| {
            let support = quality_support(m, &c, opts.case, opts.alpha)?;
            let modal = modal_quality(m, &c, opts.case)?;
            let pessimistic = pessimistic_corner(&support);
            Ok(FuzzyDecision { composition: c, support, modal, pessimistic })
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|d| d.pessimistic.w >= opts.min_w)
        .collect();
    let keep: Vec<bool> = decisions
        .iter()
        .map(|d| !decisions.iter().any(|e| preferred(e, d, opts.preference)))
        .collect();
    Ok(decisions.into_iter().zip(keep).filter_map(|(d, k)| k.then_some(d)).collect())
}

/// Support membership at `q`, zero when absent.
pub fn membership(support: &[(QualityVector, Q)], q: &QualityVector) -> Q {
    support.iter().find(|(p, _)| p == q).map_or(Q::zero(), |(_, mu)| *mu)
}

/// True when every support point has a census at least as good as `n`.
pub fn census_floor(support: &[(QualityVector, Q)], n: &[u32]) -> bool {
    support.iter().all(|(q, _)| census_at_least(&q.n, n))
}
