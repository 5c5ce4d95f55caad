//! Multiple-choice knapsack: exactly one item per group under a shared budget.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::instance::ResourceOverride;
use crate::model::Morphology;
use crate::rational::{common_denominator, Q};

pub const DP_CELL_CAP: usize = 10_000_000;
pub const LABEL_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct McpItem {
    pub id: String,
    /// First entry is the scalar profit; further entries extend it to a vector.
    pub profits: Vec<Q>,
    pub weight: Q,
    /// Source priority, kept for reporting.
    pub priority: Option<u8>,
}

impl McpItem {
    pub fn profit(&self) -> Q {
        self.profits[0]
    }

    /// Profit per unit weight, `None` for weightless items.
    pub fn ratio(&self) -> Option<Q> {
        (!self.weight.is_zero()).then(|| self.profit() / self.weight)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McpGroup {
    pub id: String,
    pub items: Vec<McpItem>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McpInstance {
    pub groups: Vec<McpGroup>,
    pub budget: Q,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McpSolution {
    /// Item index per group.
    pub selection: Vec<usize>,
    pub profit: Vec<Q>,
    pub weight: Q,
}

impl McpInstance {
    pub fn check(&self) -> Result<()> {
        if self.groups.is_empty() {
            return Err(Error::Empty("knapsack groups"));
        }
        let dims = self.groups.first().and_then(|g| g.items.first()).map_or(1, |i| i.profits.len());
        for g in &self.groups {
            if g.items.is_empty() {
                return Err(Error::EmptyPart(g.id.clone()));
            }
            for it in &g.items {
                if it.weight.is_negative() {
                    return Err(Error::OutOfRange(format!("weight of `{}`", it.id)));
                }
                if it.profits.len() != dims || dims == 0 {
                    return Err(Error::Dimension { expected: dims, found: it.profits.len() });
                }
            }
        }
        Ok(())
    }

    pub fn dims(&self) -> usize {
        self.groups[0].items[0].profits.len()
    }

    pub fn evaluate(&self, selection: &[usize]) -> McpSolution {
        let dims = self.dims();
        let mut profit = vec![Q::zero(); dims];
        let mut weight = Q::zero();
        for (g, &j) in self.groups.iter().zip(selection) {
            let it = &g.items[j];
            for (p, v) in profit.iter_mut().zip(&it.profits) {
                *p += v;
            }
            weight += it.weight;
        }
        McpSolution { selection: selection.to_vec(), profit, weight }
    }

    pub fn ids(&self, s: &McpSolution) -> Vec<&str> {
        self.groups.iter().zip(&s.selection).map(|(g, &j)| g.items[j].id.as_str()).collect()
    }

    pub fn selections(&self) -> u128 {
        self.groups.iter().map(|g| g.items.len() as u128).product()
    }
}

fn derive(m: &Morphology, budget: Q, vector: bool) -> Result<McpInstance> {
    let cfg = m.mcp.as_ref().ok_or_else(|| Error::Malformed("instance has no `mcp` section".into()))?;
    let base = cfg.profit_base.map_or(Q::from_integer(m.scales.k as i64 + 1), |d| d.0);
    let resource_base = cfg.resource_base.0;
    let mut groups = Vec::with_capacity(m.parts.len());
    for part in &m.parts {
        let rule = cfg
            .parts
            .get(&part.id)
            .ok_or_else(|| Error::Malformed(format!("no resource rule for part `{}`", part.id)))?;
        let crit = match (&rule.resource_override, &rule.criterion) {
            (Some(_), _) => None,
            (None, Some(c)) => Some(
                part.criteria
                    .iter()
                    .position(|x| &x.id == c)
                    .ok_or_else(|| Error::Unknown { kind: "criterion", id: c.clone() })?,
            ),
            (None, None) => return Err(Error::Malformed(format!("resource rule of `{}` is empty", part.id))),
        };
        let mut items = Vec::with_capacity(part.alternatives.len());
        for da in &part.alternatives {
            let r = da.priority.ok_or_else(|| Error::MissingPriority(da.id.clone()))?;
            let weight = match (&rule.resource_override, crit) {
                (Some(ResourceOverride::Uniform(v)), _) => v.0,
                (Some(ResourceOverride::PerAlternative(map)), _) => {
                    map.get(&da.id)
                        .ok_or_else(|| Error::MissingEstimate { da: da.id.clone(), criterion: "resource_override".into() })?
                        .0
                }
                (None, Some(ci)) => {
                    let z = da.estimates.get(ci).ok_or_else(|| Error::MissingEstimate {
                        da: da.id.clone(),
                        criterion: part.criteria[ci].id.clone(),
                    })?;
                    resource_base - z
                }
                (None, None) => unreachable!(),
            };
            let mut profits = vec![base - Q::from_integer(r as i64)];
            if vector {
                profits.push(resource_base - weight);
            }
            items.push(McpItem { id: da.id.clone(), profits, weight, priority: Some(r) });
        }
        groups.push(McpGroup { id: part.id.clone(), items });
    }
    let inst = McpInstance { groups, budget };
    inst.check()?;
    Ok(inst)
}

/// Profit `base - priority`, weight `resource_base - estimate` or the override.
pub fn derive_mcp_instance(m: &Morphology, budget: Q) -> Result<McpInstance> {
    derive(m, budget, false)
}

/// As [`derive_mcp_instance`] with the profit vector `(base - priority, resource_base - weight)`.
pub fn derive_mcp_multicriteria(m: &Morphology, budget: Q) -> Result<McpInstance> {
    derive(m, budget, true)
}

/// Starts from the lightest item of every group, then keeps applying the
/// single-group upgrade with the largest profit gain that still fits.
pub fn solve_mcp_greedy(inst: &McpInstance) -> Result<McpSolution> {
    inst.check()?;
    let mut sel: Vec<usize> = inst
        .groups
        .iter()
        .map(|g| {
            (0..g.items.len())
                .min_by(|&a, &b| {
                    let (x, y) = (&g.items[a], &g.items[b]);
                    x.weight.cmp(&y.weight).then(y.profit().cmp(&x.profit()))
                })
                .unwrap()
        })
        .collect();
    let mut weight: Q = inst.groups.iter().zip(&sel).map(|(g, &j)| g.items[j].weight).sum();
    if weight > inst.budget {
        return Err(Error::Infeasible(format!("lightest selection weighs {}", crate::rational::fmt_q(&weight))));
    }
    loop {
        let mut best: Option<(Q, Q, usize, usize)> = None;
        for (gi, g) in inst.groups.iter().enumerate() {
            let cur = &g.items[sel[gi]];
            for (j, it) in g.items.iter().enumerate() {
                let dp = it.profit() - cur.profit();
                let dw = it.weight - cur.weight;
                if dp <= Q::zero() || weight + dw > inst.budget {
                    continue;
                }
                let wins = match &best {
                    None => true,
                    Some((bp, bw, _, _)) => dp > *bp || (dp == *bp && dw < *bw),
                };
                if wins {
                    best = Some((dp, dw, gi, j));
                }
            }
        }
        match best {
            Some((_, dw, gi, j)) => {
                sel[gi] = j;
                weight += dw;
            }
            None => break,
        }
    }
    Ok(inst.evaluate(&sel))
}

fn scaled(values: &[Q], lcd: i64) -> Result<Vec<i64>> {
    values
        .iter()
        .map(|v| {
            v.numer()
                .checked_mul(lcd / v.denom())
                .ok_or(Error::CapExceeded { what: "weight grid", cap: i64::MAX as u64 })
        })
        .collect()
}

pub fn solve_mcp_exact(inst: &McpInstance) -> Result<McpSolution> {
    solve_mcp_exact_capped(inst, DP_CELL_CAP)
}

/// Dynamic program over the integer weight grid. Among optimal profits the
/// lightest selection wins, then the lexicographically first.
pub fn solve_mcp_exact_capped(inst: &McpInstance, cap: usize) -> Result<McpSolution> {
    inst.check()?;
    if inst.budget.is_negative() {
        return Err(Error::Infeasible("negative budget".into()));
    }
    let all_w: Vec<Q> = inst.groups.iter().flat_map(|g| g.items.iter().map(|i| i.weight)).collect();
    let all_p: Vec<Q> = inst.groups.iter().flat_map(|g| g.items.iter().map(|i| i.profit())).collect();
    let lw = common_denominator(all_w.iter().chain([&inst.budget]));
    let lp = common_denominator(&all_p);
    let wint = scaled(&all_w, lw)?;
    let pint = scaled(&all_p, lp)?;
    let cap_b = (inst.budget * Q::from_integer(lw)).floor().to_integer();
    let width = usize::try_from(cap_b).map_err(|_| Error::CapExceeded { what: "weight grid", cap: cap as u64 })? + 1;
    let groups = inst.groups.len();
    if width.saturating_mul(groups + 1) > cap {
        return Err(Error::CapExceeded { what: "knapsack DP cells", cap: cap as u64 });
    }

    let mut offsets = Vec::with_capacity(groups);
    let mut acc = 0;
    for g in &inst.groups {
        offsets.push(acc);
        acc += g.items.len();
    }
    const NONE: i64 = i64::MIN;
    // suf[g][w]: best profit of groups g.. at exact total weight w
    let mut suf = vec![NONE; (groups + 1) * width];
    suf[groups * width] = 0;
    for g in (0..groups).rev() {
        let (row, next) = suf.split_at_mut((g + 1) * width);
        let row = &mut row[g * width..];
        for (j, _) in inst.groups[g].items.iter().enumerate() {
            let (w, p) = (wint[offsets[g] + j] as usize, pint[offsets[g] + j]);
            for rest in 0..width.saturating_sub(w) {
                let v = next[rest];
                if v != NONE && v + p > row[rest + w] {
                    row[rest + w] = v + p;
                }
            }
        }
    }
    let mut best: Option<(i64, usize)> = None;
    for w in 0..width {
        let v = suf[w];
        if v != NONE && best.is_none_or(|(bp, _)| v > bp) {
            best = Some((v, w));
        }
    }
    let (mut target, mut rem) = best.ok_or_else(|| Error::Infeasible("no selection fits the budget".into()))?;
    let mut sel = Vec::with_capacity(groups);
    for g in 0..groups {
        let next = &suf[(g + 1) * width..(g + 2) * width];
        let j = (0..inst.groups[g].items.len())
            .find(|&j| {
                let (w, p) = (wint[offsets[g] + j] as usize, pint[offsets[g] + j]);
                w <= rem && next[rem - w] != NONE && next[rem - w] == target - p
            })
            .expect("reconstruction follows the table");
        sel.push(j);
        rem -= wint[offsets[g] + j] as usize;
        target -= pint[offsets[g] + j];
    }
    Ok(inst.evaluate(&sel))
}

pub fn solve_mcp_multicriteria(inst: &McpInstance) -> Result<Vec<McpSolution>> {
    solve_mcp_multicriteria_capped(inst, LABEL_CAP)
}

struct Label {
    weight: Q,
    profit: Vec<Q>,
    picks: Vec<usize>,
}

fn covers(a: &Label, b: &Label) -> bool {
    a.weight <= b.weight && a.profit.iter().zip(&b.profit).all(|(x, y)| x >= y)
}

/// Exact Pareto frontier of profit vectors, one lightest selection per vector.
pub fn solve_mcp_multicriteria_capped(inst: &McpInstance, cap: usize) -> Result<Vec<McpSolution>> {
    inst.check()?;
    let dims = inst.dims();
    let mut labels = vec![Label { weight: Q::zero(), profit: vec![Q::zero(); dims], picks: Vec::new() }];
    for g in &inst.groups {
        let mut kept: Vec<Label> = Vec::new();
        for l in &labels {
            for (j, it) in g.items.iter().enumerate() {
                let weight = l.weight + it.weight;
                if weight > inst.budget {
                    continue;
                }
                let profit: Vec<Q> = l.profit.iter().zip(&it.profits).map(|(a, b)| a + b).collect();
                let mut picks = l.picks.clone();
                picks.push(j);
                let cand = Label { weight, profit, picks };
                if kept.iter().any(|k| covers(k, &cand)) {
                    continue;
                }
                kept.retain(|k| !covers(&cand, k));
                kept.push(cand);
                if kept.len() > cap {
                    return Err(Error::CapExceeded { what: "knapsack labels", cap: cap as u64 });
                }
            }
        }
        kept.sort_by(|a, b| a.picks.cmp(&b.picks));
        labels = kept;
        if labels.is_empty() {
            return Err(Error::Infeasible("no selection fits the budget".into()));
        }
    }
    let dirs = vec![crate::model::Direction::Maximize; dims];
    let vectors: Vec<&[Q]> = labels.iter().map(|l| l.profit.as_slice()).collect();
    let front = crate::pareto::pareto_indices(&vectors, &dirs)?;
    let mut out: Vec<McpSolution> = Vec::new();
    for i in front {
        let l = &labels[i];
        match out.iter_mut().find(|s| s.profit == l.profit) {
            Some(s) if l.weight < s.weight => {
                s.weight = l.weight;
                s.selection = l.picks.clone();
            }
            Some(_) => {}
            None => out.push(McpSolution { selection: l.picks.clone(), profit: l.profit.clone(), weight: l.weight }),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::q;

    fn item(id: &str, p: &[i64], w: i64) -> McpItem {
        McpItem { id: id.into(), profits: p.iter().map(|&x| q(x)).collect(), weight: q(w), priority: None }
    }

    #[test]
    fn derivation_rows() {
        let m = fixtures::gsm();
        let inst = derive_mcp_instance(&m, q(15)).unwrap();
        let m1 = &inst.groups[0].items[0];
        assert_eq!((m1.profit(), m1.weight), (q(2), q(5)));
        let t2 = &inst.groups[4].items[1];
        assert_eq!((t2.profit(), t2.weight), (q(3), q(8)));
        assert!(inst.groups[1].items.iter().all(|i| i.weight == q(1)));
    }

    #[test]
    fn greedy_budgets() {
        let m = fixtures::gsm();
        for (b, ids, w, p) in [(14, ["M4", "L1", "V6", "U3", "T1"], 14, 10), (15, ["M4", "L1", "V6", "U1", "T1"], 15, 11)] {
            let inst = derive_mcp_instance(&m, q(b)).unwrap();
            let s = solve_mcp_greedy(&inst).unwrap();
            assert_eq!(inst.ids(&s), ids);
            assert_eq!((s.weight, s.profit[0]), (q(w), q(p)));
        }
    }

    #[test]
    fn greedy_ample_budget_reaches_group_maxima() {
        let m = fixtures::gsm();
        let inst = derive_mcp_instance(&m, q(1000)).unwrap();
        let s = solve_mcp_greedy(&inst).unwrap();
        let top: Q = inst.groups.iter().map(|g| g.items.iter().map(|i| i.profit()).max().unwrap()).sum();
        assert_eq!(s.profit[0], top);
    }

    #[test]
    fn exact_small_cases() {
        let one = McpInstance { groups: vec![McpGroup { id: "g".into(), items: vec![item("a", &[5], 4), item("b", &[3], 2), item("c", &[4], 3)] }], budget: q(3) };
        assert_eq!(one.ids(&solve_mcp_exact(&one).unwrap()), ["c"]);
        let zero = McpInstance { budget: q(0), ..one.clone() };
        assert!(matches!(solve_mcp_exact(&zero), Err(Error::Infeasible(_))));
        assert!(matches!(solve_mcp_greedy(&zero), Err(Error::Infeasible(_))));
        assert!(matches!(solve_mcp_exact_capped(&one, 2), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn exact_prefers_lighter_then_first() {
        let inst = McpInstance {
            groups: vec![
                McpGroup { id: "g".into(), items: vec![item("a", &[2], 2), item("b", &[2], 1), item("c", &[2], 1)] },
                McpGroup { id: "h".into(), items: vec![item("d", &[1], 0)] },
            ],
            budget: q(5),
        };
        assert_eq!(inst.ids(&solve_mcp_exact(&inst).unwrap()), ["b", "d"]);
    }

    #[test]
    fn multicriteria_shapes() {
        let inst = McpInstance {
            groups: vec![
                McpGroup { id: "g".into(), items: vec![item("a", &[1, 0], 1), item("b", &[0, 1], 1)] },
                McpGroup { id: "h".into(), items: vec![item("c", &[1, 0], 1), item("d", &[0, 1], 1)] },
            ],
            budget: q(10),
        };
        assert!(solve_mcp_multicriteria(&inst).unwrap().len() >= 2);
        let m = fixtures::gsm();
        let scalar = derive_mcp_instance(&m, q(15)).unwrap();
        let f = solve_mcp_multicriteria(&scalar).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].profit[0], solve_mcp_exact(&scalar).unwrap().profit[0]);
    }
}
