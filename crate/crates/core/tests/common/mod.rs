//! Brute-force oracles and random instance generators shared by the
//! integration tests. Nothing here calls a solver from the library.
#![allow(dead_code)]

use std::collections::BTreeMap;

use morphsynth::mcp::{McpGroup, McpInstance, McpItem};
use morphsynth::model::{Direction, Morphology, ValidateOptions};
use morphsynth::qap::QapInstance;
use morphsynth::Q;
use num_traits::Zero;
use rand::Rng;
use serde_json::{json, Value};

/// Every index tuple over `sizes`, first position slowest.
pub fn tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &n in sizes {
        let mut next = Vec::with_capacity(out.len() * n);
        for t in &out {
            for i in 0..n {
                let mut u = t.clone();
                u.push(i);
                next.push(u);
            }
        }
        out = next;
    }
    out
}

/// Global alternative indices of every composition of `scope`, in product order.
pub fn all_compositions(m: &Morphology, scope: &str) -> Vec<Vec<usize>> {
    let parts = m.scope_parts(scope).unwrap().to_vec();
    let sizes: Vec<usize> = parts.iter().map(|&p| m.part_das(p).len()).collect();
    tuples(&sizes)
        .into_iter()
        .map(|t| t.iter().zip(&parts).map(|(&i, &p)| m.part_das(p).start + i).collect())
        .collect()
}

/// Least declared level among the pairs; `l` when no pair is declared.
pub fn oracle_w(m: &Morphology, das: &[usize]) -> u8 {
    let mut w = m.scales.l;
    for (i, &a) in das.iter().enumerate() {
        for &b in &das[i + 1..] {
            if let Some(l) = m.level(a, b) {
                w = w.min(l);
            }
        }
    }
    w
}

pub fn oracle_census(m: &Morphology, das: &[usize]) -> Vec<u32> {
    let mut n = vec![0u32; m.scales.k as usize];
    for &g in das {
        n[m.da(g).priority.unwrap() as usize - 1] += 1;
    }
    n
}

pub fn brute_admissible(m: &Morphology, scope: &str, min_level: u8) -> Vec<Vec<usize>> {
    all_compositions(m, scope).into_iter().filter(|c| oracle_w(m, c) >= min_level).collect()
}

/// `a` at least as good as `b`: larger `w` and every prefix count at least as large.
pub fn oracle_weakly_better(a: &(u8, Vec<u32>), b: &(u8, Vec<u32>)) -> bool {
    if a.0 < b.0 {
        return false;
    }
    let (mut sa, mut sb) = (0, 0);
    for (x, y) in a.1.iter().zip(&b.1) {
        sa += x;
        sb += y;
        if sa < sb {
            return false;
        }
    }
    true
}

pub fn oracle_dominates(a: &(u8, Vec<u32>), b: &(u8, Vec<u32>)) -> bool {
    a != b && oracle_weakly_better(a, b)
}

/// Compositions with `w >= 1` that no other such composition dominates.
pub fn brute_clique(m: &Morphology, scope: &str) -> Vec<(Vec<usize>, (u8, Vec<u32>))> {
    let all: Vec<(Vec<usize>, (u8, Vec<u32>))> = brute_admissible(m, scope, 1)
        .into_iter()
        .map(|c| {
            let q = (oracle_w(m, &c), oracle_census(m, &c));
            (c, q)
        })
        .collect();
    all.iter()
        .filter(|(_, q)| !all.iter().any(|(_, r)| oracle_dominates(r, q)))
        .cloned()
        .collect()
}

pub fn brute_pareto<T: PartialOrd>(vectors: &[Vec<T>], dirs: &[Direction]) -> Vec<usize> {
    let better = |a: &[T], b: &[T]| {
        let mut strict = false;
        for ((x, y), d) in a.iter().zip(b).zip(dirs) {
            let (x, y) = if *d == Direction::Maximize { (x, y) } else { (y, x) };
            if x < y {
                return false;
            }
            if x > y {
                strict = true;
            }
        }
        strict
    };
    (0..vectors.len()).filter(|&i| !vectors.iter().any(|v| better(v, &vectors[i]))).collect()
}

/// Best profit, then least weight, then first in product order.
pub fn brute_mcp(inst: &McpInstance) -> Option<(Vec<usize>, Q, Q)> {
    let sizes: Vec<usize> = inst.groups.iter().map(|g| g.items.len()).collect();
    let mut best: Option<(Vec<usize>, Q, Q)> = None;
    for t in tuples(&sizes) {
        let (mut p, mut w) = (Q::zero(), Q::zero());
        for (g, &j) in t.iter().enumerate() {
            p += inst.groups[g].items[j].profits[0];
            w += inst.groups[g].items[j].weight;
        }
        if w > inst.budget {
            continue;
        }
        let wins = match &best {
            None => true,
            Some((_, bp, bw)) => p > *bp || (p == *bp && w < *bw),
        };
        if wins {
            best = Some((t, p, w));
        }
    }
    best
}

/// Every feasible selection with its profit vector and weight.
pub fn mcp_feasible(inst: &McpInstance) -> Vec<(Vec<usize>, Vec<Q>, Q)> {
    let sizes: Vec<usize> = inst.groups.iter().map(|g| g.items.len()).collect();
    let dims = inst.groups[0].items[0].profits.len();
    tuples(&sizes)
        .into_iter()
        .filter_map(|t| {
            let mut p = vec![Q::zero(); dims];
            let mut w = Q::zero();
            for (g, &j) in t.iter().enumerate() {
                let it = &inst.groups[g].items[j];
                for (a, b) in p.iter_mut().zip(&it.profits) {
                    *a += b;
                }
                w += it.weight;
            }
            (w <= inst.budget).then_some((t, p, w))
        })
        .collect()
}

/// Best objective over all feasible selections; `None` entries allowed when `at_most_one`.
pub fn brute_qap(inst: &QapInstance) -> Option<Q> {
    let extra = inst.at_most_one as usize;
    let sizes: Vec<usize> = inst.groups.iter().map(|g| g.items.len() + extra).collect();
    let mut best: Option<Q> = None;
    for t in tuples(&sizes) {
        let sel: Vec<Option<usize>> =
            t.iter().zip(&inst.groups).map(|(&j, g)| (j < g.items.len()).then_some(j)).collect();
        let mut w = Q::zero();
        let mut v = Q::zero();
        let picks: Vec<(usize, usize)> = sel.iter().enumerate().filter_map(|(g, s)| s.map(|j| (g, j))).collect();
        for &(g, j) in &picks {
            w += inst.groups[g].items[j].weight;
            v += inst.groups[g].items[j].profits[0];
        }
        for (x, &a) in picks.iter().enumerate() {
            for &b in &picks[x + 1..] {
                v += inst.pair_profit.get(&(a, b)).copied().unwrap_or_else(Q::zero);
            }
        }
        if w <= inst.budget && best.is_none_or(|b| v > b) {
            best = Some(v);
        }
    }
    best
}

fn small_rational(rng: &mut impl Rng, max: i64) -> Q {
    let den = [1, 2, 4, 5, 10][rng.gen_range(0..5)];
    Q::new(rng.gen_range(0..=max * den), den)
}

/// Up to 5 groups and at most 10^4 selections.
pub fn random_mcp(rng: &mut impl Rng) -> McpInstance {
    let groups = rng.gen_range(1..=5);
    let mut left = 10_000usize;
    let mut out = Vec::new();
    for g in 0..groups {
        let n = rng.gen_range(1..=8usize.min(left));
        left /= n;
        let items = (0..n)
            .map(|j| McpItem {
                id: format!("g{g}i{j}"),
                profits: vec![Q::from_integer(rng.gen_range(0..=9))],
                weight: small_rational(rng, 6),
                priority: None,
            })
            .collect();
        out.push(McpGroup { id: format!("g{g}"), items });
    }
    let budget = small_rational(rng, 4 * groups as i64);
    McpInstance { groups: out, budget }
}

fn one_hot(len: usize, at: usize) -> Vec<String> {
    (0..len).map(|i| if i == at { "1".into() } else { "0".into() }).collect()
}

/// Flat instance with 2..=4 parts, every cross pair declared, at most 10^4
/// compositions. With `singleton_fuzzy` every estimate is given only as a
/// one-hot membership vector.
pub fn random_morphology(rng: &mut impl Rng, singleton_fuzzy: bool) -> Morphology {
    let (k, l) = (3usize, 3usize);
    let parts = rng.gen_range(2..=4usize);
    let mut ids: Vec<Vec<String>> = Vec::new();
    let mut left = 10_000usize;
    let mut alternatives = serde_json::Map::new();
    for p in 0..parts {
        let n = rng.gen_range(1..=6usize.min(left));
        left /= n;
        let names: Vec<String> = (0..n).map(|j| format!("P{p}_{j}")).collect();
        let list: Vec<Value> = names
            .iter()
            .map(|id| {
                let r = rng.gen_range(1..=k);
                if singleton_fuzzy {
                    json!({"id": id, "fuzzy_priority": one_hot(k, r - 1)})
                } else {
                    json!({"id": id, "priority": r})
                }
            })
            .collect();
        alternatives.insert(format!("P{p}"), Value::Array(list));
        ids.push(names);
    }
    let mut entries = Vec::new();
    for p in 0..parts {
        for q in p + 1..parts {
            for a in &ids[p] {
                for b in &ids[q] {
                    let level = if rng.gen_bool(0.2) { 0 } else { rng.gen_range(1..=l) };
                    entries.push(if singleton_fuzzy {
                        json!({"a": a, "b": b, "fuzzy": one_hot(l + 1, l - level)})
                    } else {
                        json!({"a": a, "b": b, "level": level})
                    });
                }
            }
        }
    }
    let children: Vec<Value> = (0..parts).map(|p| json!({"part": format!("P{p}")})).collect();
    let doc = json!({
        "scales": {"k": k, "l": l},
        "system": {"id": "S", "children": children},
        "alternatives": alternatives,
        "compatibility": {"S": entries},
    });
    Morphology::from_json(&doc.to_string(), &ValidateOptions::default()).expect("generated instance is valid")
}

pub fn random_vectors(rng: &mut impl Rng) -> (Vec<Vec<i64>>, Vec<Direction>) {
    let dims = rng.gen_range(1..=4);
    let n = rng.gen_range(1..=40);
    let dirs = (0..dims).map(|_| if rng.gen_bool(0.5) { Direction::Maximize } else { Direction::Minimize }).collect();
    let vs = (0..n).map(|_| (0..dims).map(|_| rng.gen_range(0..=5)).collect()).collect();
    (vs, dirs)
}

pub fn sorted<T: Ord>(mut v: Vec<T>) -> Vec<T> {
    v.sort();
    v
}

pub fn as_map<K: Ord, V>(items: impl IntoIterator<Item = (K, V)>) -> BTreeMap<K, V> {
    items.into_iter().collect()
}
