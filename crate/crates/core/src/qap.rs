//! Quadratic assignment: item profits plus pairwise profits between chosen
//! items of different groups.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::enumerate::cap_from_env;
use crate::error::{Error, Result};
use crate::mcp::{self, McpGroup, McpInstance};
use crate::model::{Direction, Morphology};
use crate::rational::Q;

pub const DEFAULT_SPACE_CAP: usize = 1_000_000;

/// `(group, item)`.
pub type Slot = (usize, usize);

#[derive(Debug, Clone, PartialEq)]
pub struct QapInstance {
    pub groups: Vec<McpGroup>,
    /// Keys are normalized so the first slot has the lower group index.
    pub pair_profit: BTreeMap<(Slot, Slot), Q>,
    pub budget: Q,
    /// Allow a group to stay empty.
    pub at_most_one: bool,
}

/// `None` means the group is left empty.
pub type Selection = Vec<Option<usize>>;

#[derive(Debug, Clone, PartialEq)]
pub struct QapSolution {
    pub selection: Selection,
    pub objective: Q,
    pub weight: Q,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QapParetoPoint {
    pub selection: Selection,
    /// Item-profit sums per component, then the pair-profit sum.
    pub vector: Vec<Q>,
    pub weight: Q,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QapPareto {
    pub front: Vec<QapParetoPoint>,
    /// Best value of every vector component on its own.
    pub extremes: Vec<Q>,
}

fn norm(a: Slot, b: Slot) -> (Slot, Slot) {
    if a.0 <= b.0 { (a, b) } else { (b, a) }
}

impl QapInstance {
    pub fn from_mcp(inst: &McpInstance, at_most_one: bool) -> Self {
        QapInstance { groups: inst.groups.clone(), pair_profit: BTreeMap::new(), budget: inst.budget, at_most_one }
    }

    pub fn set_pair(&mut self, a: Slot, b: Slot, d: Q) {
        self.pair_profit.insert(norm(a, b), d);
    }

    pub fn pair(&self, a: Slot, b: Slot) -> Q {
        self.pair_profit.get(&norm(a, b)).copied().unwrap_or_else(Q::zero)
    }

    pub fn check(&self) -> Result<()> {
        McpInstance { groups: self.groups.clone(), budget: self.budget }.check()?;
        for (&((g, j), (h, k)), d) in &self.pair_profit {
            if g >= h {
                return Err(Error::SamePart(format!("{g}"), format!("{h}")));
            }
            if h >= self.groups.len() || j >= self.groups[g].items.len() || k >= self.groups[h].items.len() {
                return Err(Error::OutOfRange(format!("pair ({g},{j})-({h},{k})")));
            }
            if d.is_negative() {
                return Err(Error::OutOfRange(format!("negative pair profit ({g},{j})-({h},{k})")));
            }
        }
        Ok(())
    }

    pub fn space(&self) -> u128 {
        self.groups.iter().map(|g| g.items.len() as u128 + self.at_most_one as u128).product()
    }

    pub fn ids(&self, sel: &[Option<usize>]) -> Vec<&str> {
        self.groups.iter().zip(sel).filter_map(|(g, s)| s.map(|j| g.items[j].id.as_str())).collect()
    }

    fn weight_of(&self, sel: &[Option<usize>]) -> Q {
        self.groups.iter().zip(sel).filter_map(|(g, s)| s.map(|j| g.items[j].weight)).sum()
    }
}

/// Linear term plus every selected cross-group pair.
pub fn qap_objective(inst: &QapInstance, picks: &[Slot]) -> Result<Q> {
    let mut seen = vec![false; inst.groups.len()];
    for &(g, j) in picks {
        if g >= inst.groups.len() || j >= inst.groups[g].items.len() {
            return Err(Error::OutOfRange(format!("slot ({g},{j})")));
        }
        if std::mem::replace(&mut seen[g], true) {
            return Err(Error::SamePart(inst.groups[g].id.clone(), inst.groups[g].id.clone()));
        }
    }
    let mut total: Q = picks.iter().map(|&(g, j)| inst.groups[g].items[j].profit()).sum();
    for (x, &a) in picks.iter().enumerate() {
        for &b in &picks[x + 1..] {
            total += inst.pair(a, b);
        }
    }
    Ok(total)
}

fn picks(sel: &[Option<usize>]) -> Vec<Slot> {
    sel.iter().enumerate().filter_map(|(g, s)| s.map(|j| (g, j))).collect()
}

/// Profits `base - priority`, weights as for the knapsack derivation and
/// pair profits equal to the declared compatibility level.
pub fn derive_qap_instance(m: &Morphology, budget: Q, at_most_one: bool) -> Result<QapInstance> {
    qap_from(m, mcp::derive_mcp_instance(m, budget)?, at_most_one)
}

/// As [`derive_qap_instance`] with the two-component item profits of
/// [`mcp::derive_mcp_multicriteria`].
pub fn derive_qap_multicriteria(m: &Morphology, budget: Q, at_most_one: bool) -> Result<QapInstance> {
    qap_from(m, mcp::derive_mcp_multicriteria(m, budget)?, at_most_one)
}

fn qap_from(m: &Morphology, base: McpInstance, at_most_one: bool) -> Result<QapInstance> {
    let mut inst = QapInstance::from_mcp(&base, at_most_one);
    for g in 0..m.parts.len() {
        for h in g + 1..m.parts.len() {
            for (j, a) in m.part_das(g).enumerate() {
                for (k, b) in m.part_das(h).enumerate() {
                    if let Some(l) = m.level(a, b).filter(|&l| l > 0) {
                        inst.set_pair((g, j), (h, k), Q::from_integer(l as i64));
                    }
                }
            }
        }
    }
    Ok(inst)
}

struct Dense {
    offsets: Vec<usize>,
    profit: Vec<Q>,
    weight: Vec<Q>,
    d: Vec<Q>,
    n: usize,
    /// `maxd[item * groups + h]`: best pair profit of an item with any item of group `h`.
    maxd: Vec<Q>,
    min_weight_suffix: Vec<Q>,
}

impl Dense {
    fn new(inst: &QapInstance, component: Option<usize>) -> Self {
        let mut offsets = Vec::new();
        let mut profit = Vec::new();
        let mut weight = Vec::new();
        for g in &inst.groups {
            offsets.push(profit.len());
            for it in &g.items {
                profit.push(match component {
                    None => it.profit(),
                    Some(c) if c < it.profits.len() => it.profits[c],
                    Some(_) => Q::zero(),
                });
                weight.push(it.weight);
            }
        }
        let n = profit.len();
        let use_pairs = component.is_none_or(|c| c >= inst.groups[0].items[0].profits.len());
        let mut d = vec![Q::zero(); n * n];
        if use_pairs {
            for (&((g, j), (h, k)), v) in &inst.pair_profit {
                let (a, b) = (offsets[g] + j, offsets[h] + k);
                d[a * n + b] = *v;
                d[b * n + a] = *v;
            }
        }
        let gs = inst.groups.len();
        let mut maxd = vec![Q::zero(); n * gs];
        for a in 0..n {
            for h in 0..gs {
                let end = offsets.get(h + 1).copied().unwrap_or(n);
                maxd[a * gs + h] = (offsets[h]..end).map(|b| d[a * n + b]).max().unwrap_or_else(Q::zero);
            }
        }
        let mut min_weight_suffix = vec![Q::zero(); gs + 1];
        for g in (0..gs).rev() {
            let least = if inst.at_most_one {
                Q::zero()
            } else {
                inst.groups[g].items.iter().map(|i| i.weight).min().unwrap()
            };
            min_weight_suffix[g] = min_weight_suffix[g + 1] + least;
        }
        Dense { offsets, profit, weight, d, n, maxd, min_weight_suffix }
    }
}

struct Search<'a> {
    inst: &'a QapInstance,
    dense: &'a Dense,
    sel: Vec<Option<usize>>,
    best: Option<(Q, Selection)>,
}

impl Search<'_> {
    fn options(&self, g: usize) -> impl Iterator<Item = Option<usize>> {
        (0..self.inst.groups[g].items.len()).map(Some).chain(self.inst.at_most_one.then_some(None))
    }

    /// Each pair among unfixed groups is charged to its earlier group.
    fn bound(&self, g: usize) -> Q {
        let dn = self.dense;
        let gs = self.inst.groups.len();
        let mut total = Q::zero();
        for h in g..gs {
            let mut best = if self.inst.at_most_one { Some(Q::zero()) } else { None };
            for j in 0..self.inst.groups[h].items.len() {
                let a = dn.offsets[h] + j;
                let mut v = dn.profit[a];
                for (f, s) in self.sel[..g].iter().enumerate() {
                    if let Some(i) = s {
                        v += dn.d[a * dn.n + dn.offsets[f] + i];
                    }
                }
                for later in h + 1..gs {
                    v += dn.maxd[a * gs + later];
                }
                if best.is_none_or(|b| v > b) {
                    best = Some(v);
                }
            }
            total += best.unwrap_or_else(Q::zero);
        }
        total
    }

    fn run(&mut self, g: usize, value: Q, weight: Q) {
        let gs = self.inst.groups.len();
        if g == gs {
            if self.best.as_ref().is_none_or(|(b, _)| value > *b) {
                self.best = Some((value, self.sel.clone()));
            }
            return;
        }
        if let Some((b, _)) = &self.best {
            if value + self.bound(g) <= *b {
                return;
            }
        }
        let dn = self.dense;
        let opts: Vec<_> = self.options(g).collect();
        for o in opts {
            let (nv, nw) = match o {
                Some(j) => {
                    let a = dn.offsets[g] + j;
                    let mut v = value + dn.profit[a];
                    for (f, s) in self.sel[..g].iter().enumerate() {
                        if let Some(i) = s {
                            v += dn.d[a * dn.n + dn.offsets[f] + i];
                        }
                    }
                    (v, weight + dn.weight[a])
                }
                None => (value, weight),
            };
            if nw + dn.min_weight_suffix[g + 1] > self.inst.budget {
                continue;
            }
            self.sel[g] = o;
            self.run(g + 1, nv, nw);
        }
        self.sel[g] = None;
    }
}

fn exact_on(inst: &QapInstance, dense: &Dense) -> Option<(Q, Selection)> {
    let first: Vec<Option<usize>> = (0..inst.groups[0].items.len()).map(Some).chain(inst.at_most_one.then_some(None)).collect();
    let results: Vec<Option<(Q, Selection)>> = first
        .par_iter()
        .map(|&o| {
            let mut s = Search { inst, dense, sel: vec![None; inst.groups.len()], best: None };
            let (v, w) = match o {
                Some(j) => (dense.profit[j], dense.weight[j]),
                None => (Q::zero(), Q::zero()),
            };
            if w + dense.min_weight_suffix[1] > inst.budget {
                return None;
            }
            s.sel[0] = o;
            s.run(1, v, w);
            s.best
        })
        .collect();
    let mut best: Option<(Q, Selection)> = None;
    for r in results.into_iter().flatten() {
        if best.as_ref().is_none_or(|(b, _)| r.0 > *b) {
            best = Some(r);
        }
    }
    best
}

fn guard(inst: &QapInstance, cap: usize) -> Result<()> {
    inst.check()?;
    if inst.space() > cap as u128 {
        return Err(Error::CapExceeded { what: "assignment space", cap: cap as u64 });
    }
    Ok(())
}

pub fn solve_qap_exact(inst: &QapInstance) -> Result<QapSolution> {
    solve_qap_exact_capped(inst, cap_from_env(DEFAULT_SPACE_CAP))
}

/// Branch and bound in lexicographic order, items before the empty choice;
/// the first optimum found wins ties.
pub fn solve_qap_exact_capped(inst: &QapInstance, cap: usize) -> Result<QapSolution> {
    guard(inst, cap)?;
    let dense = Dense::new(inst, None);
    let (objective, selection) =
        exact_on(inst, &dense).ok_or_else(|| Error::Infeasible("no selection fits the budget".into()))?;
    let weight = inst.weight_of(&selection);
    Ok(QapSolution { selection, objective, weight })
}

/// Groups are filled in order, each with the item of best marginal gain per
/// unit weight that keeps the remaining groups fillable.
pub fn solve_qap_greedy(inst: &QapInstance) -> Result<QapSolution> {
    inst.check()?;
    let dense = Dense::new(inst, None);
    if dense.min_weight_suffix[0] > inst.budget {
        return Err(Error::Infeasible("lightest selection exceeds the budget".into()));
    }
    let mut sel: Selection = vec![None; inst.groups.len()];
    let mut weight = Q::zero();
    for (g, group) in inst.groups.iter().enumerate() {
        // (zero weight, gain per weight or gain, weight, index)
        let mut best: Option<(bool, Q, Q, usize)> = None;
        for (j, it) in group.items.iter().enumerate() {
            if weight + it.weight + dense.min_weight_suffix[g + 1] > inst.budget {
                continue;
            }
            let mut gain = it.profit();
            for (f, s) in sel[..g].iter().enumerate() {
                if let Some(i) = s {
                    gain += inst.pair((f, *i), (g, j));
                }
            }
            if inst.at_most_one && gain <= Q::zero() {
                continue;
            }
            let free = it.weight.is_zero();
            let score = if free { gain } else { gain / it.weight };
            let wins = match &best {
                None => true,
                Some((bf, bs, bw, _)) => {
                    (free, score) > (*bf, *bs) || ((free, score) == (*bf, *bs) && it.weight < *bw)
                }
            };
            if wins {
                best = Some((free, score, it.weight, j));
            }
        }
        match best {
            Some((_, _, w, j)) => {
                sel[g] = Some(j);
                weight += w;
            }
            None if inst.at_most_one => {}
            None => return Err(Error::Infeasible(format!("group `{}` cannot be filled", group.id))),
        }
    }
    let objective = qap_objective(inst, &picks(&sel))?;
    Ok(QapSolution { selection: sel, objective, weight })
}

fn for_each_feasible(inst: &QapInstance, f: &mut dyn FnMut(&[Option<usize>], Q)) {
    fn rec(inst: &QapInstance, g: usize, sel: &mut Selection, w: Q, f: &mut dyn FnMut(&[Option<usize>], Q)) {
        if w > inst.budget {
            return;
        }
        if g == inst.groups.len() {
            f(sel, w);
            return;
        }
        for j in 0..inst.groups[g].items.len() {
            sel[g] = Some(j);
            rec(inst, g + 1, sel, w + inst.groups[g].items[j].weight, f);
        }
        sel[g] = None;
        if inst.at_most_one {
            rec(inst, g + 1, sel, w, f);
        }
    }
    let mut sel = vec![None; inst.groups.len()];
    rec(inst, 0, &mut sel, Q::zero(), f);
}

/// Component vector of a selection: item-profit sums, then the pair sum.
pub fn qap_vector(inst: &QapInstance, sel: &[Option<usize>]) -> Vec<Q> {
    let dims = inst.groups[0].items[0].profits.len();
    let mut v = vec![Q::zero(); dims + 1];
    let p = picks(sel);
    for &(g, j) in &p {
        for (c, x) in inst.groups[g].items[j].profits.iter().enumerate() {
            v[c] += x;
        }
    }
    for (x, &a) in p.iter().enumerate() {
        for &b in &p[x + 1..] {
            v[dims] += inst.pair(a, b);
        }
    }
    v
}

pub fn solve_qap_pareto(inst: &QapInstance) -> Result<QapPareto> {
    solve_qap_pareto_capped(inst, cap_from_env(DEFAULT_SPACE_CAP))
}

/// Exhaustive Pareto front of [`qap_vector`], one lightest selection per
/// vector, with the per-component optima from the exact solver.
pub fn solve_qap_pareto_capped(inst: &QapInstance, cap: usize) -> Result<QapPareto> {
    guard(inst, cap)?;
    let dims = inst.groups[0].items[0].profits.len() + 1;
    let mut extremes = Vec::with_capacity(dims);
    for c in 0..dims {
        let dense = Dense::new(inst, Some(c));
        let (v, _) = exact_on(inst, &dense).ok_or_else(|| Error::Infeasible("no selection fits the budget".into()))?;
        extremes.push(v);
    }
    let mut all: Vec<(Selection, Vec<Q>, Q)> = Vec::new();
    for_each_feasible(inst, &mut |s, w| all.push((s.to_vec(), qap_vector(inst, s), w)));
    let vectors: Vec<&[Q]> = all.iter().map(|x| x.1.as_slice()).collect();
    let idx = crate::pareto::pareto_indices(&vectors, &vec![Direction::Maximize; dims])?;
    let mut front: Vec<QapParetoPoint> = Vec::new();
    for i in idx {
        let (s, v, w) = &all[i];
        match front.iter_mut().find(|p| &p.vector == v) {
            Some(p) if *w < p.weight => {
                p.selection = s.clone();
                p.weight = *w;
            }
            Some(_) => {}
            None => front.push(QapParetoPoint { selection: s.clone(), vector: v.clone(), weight: *w }),
        }
    }
    Ok(QapPareto { front, extremes })
}
