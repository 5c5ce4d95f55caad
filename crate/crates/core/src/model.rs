//! Validated morphology: the part tree, design alternatives, criteria and the
//! pairwise compatibility table.
//!
//! Design alternatives are addressed by a global index (`usize`) in leaf order,
//! so a composition is a plain vector of indices.

use std::collections::{BTreeMap, HashMap};
use std::ops::Range;

use indexmap::IndexMap;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::fuzzy;
use crate::instance::{
    AlternativeDoc, CompatDoc, CriterionDoc, InstanceDocument, McpConfigDoc, NodeDoc,
};
pub use crate::instance::{Direction, Scales};
use crate::rational::{fmt_q, Dec, Q};

#[derive(Debug, Clone, PartialEq)]
pub struct Criterion {
    pub id: String,
    pub weight: Q,
    pub direction: Direction,
    pub scale_note: String,
    pub range: Option<(Q, Q)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignAlternative {
    pub id: String,
    pub part_id: String,
    pub label: String,
    /// Aligned with the owning part's criteria; empty when not given.
    pub estimates: Vec<Q>,
    pub priority: Option<u8>,
    pub fuzzy_priority: Option<Vec<Q>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Part {
    pub id: String,
    pub label: String,
    pub criteria: Vec<Criterion>,
    pub alternatives: Vec<DesignAlternative>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SystemNode {
    /// Index into `Morphology::parts`.
    Leaf(usize),
    Internal {
        id: String,
        label: String,
        children: Vec<SystemNode>,
    },
}

/// Symmetric ordinal compatibility between design alternatives of distinct parts.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatibilityTable {
    max_level: u8,
    ids: Vec<String>,
    part_of: Vec<usize>,
    levels: Vec<Option<u8>>,
    fuzzy: BTreeMap<(usize, usize), Vec<Q>>,
}

impl CompatibilityTable {
    fn new(max_level: u8, ids: Vec<String>, part_of: Vec<usize>) -> Self {
        let n = ids.len();
        CompatibilityTable { max_level, ids, part_of, levels: vec![None; n * n], fuzzy: BTreeMap::new() }
    }

    pub fn max_level(&self) -> u8 {
        self.max_level
    }

    pub fn level(&self, a: usize, b: usize) -> Option<u8> {
        self.levels[a * self.ids.len() + b]
    }

    pub fn get(&self, a: &str, b: &str) -> Option<u8> {
        let ia = self.ids.iter().position(|x| x == a)?;
        let ib = self.ids.iter().position(|x| x == b)?;
        self.level(ia, ib)
    }

    /// Fuzzy memberships of levels `l..=0` for the pair, when declared.
    pub fn fuzzy(&self, a: usize, b: usize) -> Option<&[Q]> {
        self.fuzzy.get(&(a.min(b), a.max(b))).map(Vec::as_slice)
    }

    /// Declared pairs `(a, b, level)` with `a < b`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, u8)> + '_ {
        let n = self.ids.len();
        (0..n).flat_map(move |a| ((a + 1)..n).filter_map(move |b| self.level(a, b).map(|l| (a, b, l))))
    }

    pub fn len(&self) -> usize {
        self.entries().count()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.iter().all(Option::is_none)
    }

    fn set(&mut self, a: usize, b: usize, level: u8) {
        let n = self.ids.len();
        self.levels[a * n + b] = Some(level);
        self.levels[b * n + a] = Some(level);
    }
}

/// Maps every declared level to 1 if it reaches `threshold`, else 0.
pub fn binarize_compatibility(t: &CompatibilityTable, threshold: u8) -> Result<CompatibilityTable> {
    if threshold < 1 || threshold > t.max_level {
        return Err(Error::OutOfRange(format!("threshold {threshold} (scale 1..={})", t.max_level)));
    }
    Ok(CompatibilityTable {
        max_level: 1,
        ids: t.ids.clone(),
        part_of: t.part_of.clone(),
        levels: t.levels.iter().map(|l| l.map(|v| u8::from(v >= threshold))).collect(),
        fuzzy: BTreeMap::new(),
    })
}

/// One design alternative per part under `scope`, in the scope's part order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition {
    pub scope: String,
    pub das: Vec<usize>,
}

impl Composition {
    pub fn ids<'m>(&self, m: &'m Morphology) -> Vec<&'m str> {
        self.das.iter().map(|&g| m.da(g).id.as_str()).collect()
    }

    pub fn label(&self, m: &Morphology) -> String {
        self.ids(m).join("★")
    }

    pub fn selection(&self, m: &Morphology) -> IndexMap<String, String> {
        self.das.iter().map(|&g| (m.da(g).part_id.clone(), m.da(g).id.clone())).collect()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ValidateOptions {
    /// Level assumed for undeclared entries of required pairs; `None` rejects them.
    pub fill_missing: Option<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Morphology {
    pub name: String,
    pub scales: Scales,
    pub root: SystemNode,
    pub parts: Vec<Part>,
    pub compat: CompatibilityTable,
    pub mcp: Option<McpConfigDoc>,
    da_part: Vec<usize>,
    part_offset: Vec<usize>,
    da_index: HashMap<String, usize>,
    part_index: HashMap<String, usize>,
    scopes: IndexMap<String, Vec<usize>>,
    declared: Vec<bool>,
}

struct TreeBuild<'d> {
    doc: &'d InstanceDocument,
    parts: Vec<Part>,
    scopes: IndexMap<String, Vec<usize>>,
    siblings: Vec<(usize, usize)>,
}

impl TreeBuild<'_> {
    fn node(&mut self, n: &NodeDoc) -> Result<SystemNode> {
        match n {
            NodeDoc::Leaf { part, label } => {
                if self.scopes.contains_key(part) {
                    return Err(Error::DuplicateId(part.clone()));
                }
                let idx = self.parts.len();
                let p = build_part(self.doc, part, label)?;
                self.parts.push(p);
                self.scopes.insert(part.clone(), vec![idx]);
                Ok(SystemNode::Leaf(idx))
            }
            NodeDoc::Internal { id, label, children } => {
                if self.scopes.contains_key(id) {
                    return Err(Error::DuplicateId(id.clone()));
                }
                if children.len() < 2 {
                    return Err(Error::Malformed(format!("internal node `{id}` needs at least two children")));
                }
                self.scopes.insert(id.clone(), Vec::new());
                let start = self.parts.len();
                let mut kids = Vec::with_capacity(children.len());
                for c in children {
                    kids.push(self.node(c)?);
                }
                let leaves: Vec<usize> =
                    kids.iter().filter_map(|k| if let SystemNode::Leaf(p) = k { Some(*p) } else { None }).collect();
                for (i, &a) in leaves.iter().enumerate() {
                    for &b in &leaves[i + 1..] {
                        self.siblings.push((a, b));
                    }
                }
                self.scopes[id] = (start..self.parts.len()).collect();
                Ok(SystemNode::Internal { id: id.clone(), label: label.clone(), children: kids })
            }
        }
    }
}

fn tolerance() -> Q {
    Q::new(1, 1_000_000_000)
}

fn build_part(doc: &InstanceDocument, id: &str, label: &str) -> Result<Part> {
    let k = doc.scales.k;
    let criteria: Vec<Criterion> = doc
        .criteria
        .get(id)
        .map(|cs| cs.iter().map(criterion_from_doc).collect())
        .unwrap_or_default();
    for (i, c) in criteria.iter().enumerate() {
        if criteria[..i].iter().any(|d| d.id == c.id) {
            return Err(Error::DuplicateId(c.id.clone()));
        }
        if c.weight < Q::zero() || c.weight > Q::one() {
            return Err(Error::OutOfRange(format!("weight {} of criterion `{}`", fmt_q(&c.weight), c.id)));
        }
    }
    if !criteria.is_empty() {
        let sum: Q = criteria.iter().map(|c| c.weight).sum();
        let diff = if sum > Q::one() { sum - Q::one() } else { Q::one() - sum };
        if diff > tolerance() {
            return Err(Error::WeightSum { part: id.to_string(), sum: fmt_q(&sum) });
        }
    }
    let docs = doc.alternatives.get(id).map(Vec::as_slice).unwrap_or(&[]);
    if docs.is_empty() {
        return Err(Error::EmptyPart(id.to_string()));
    }
    let mut alternatives = Vec::with_capacity(docs.len());
    for a in docs {
        alternatives.push(alternative_from_doc(a, id, &criteria, k)?);
    }
    Ok(Part { id: id.to_string(), label: label.to_string(), criteria, alternatives })
}

fn criterion_from_doc(c: &CriterionDoc) -> Criterion {
    Criterion {
        id: c.id.clone(),
        weight: c.weight.0,
        direction: c.direction,
        scale_note: c.scale.clone(),
        range: c.range.map(|[lo, hi]| (lo.0, hi.0)),
    }
}

fn alternative_from_doc(a: &AlternativeDoc, part: &str, criteria: &[Criterion], k: u8) -> Result<DesignAlternative> {
    let mut estimates = Vec::new();
    if !a.estimates.is_empty() {
        for key in a.estimates.keys() {
            if !criteria.iter().any(|c| &c.id == key) {
                return Err(Error::Unknown { kind: "criterion", id: format!("{key} (in {})", a.id) });
            }
        }
        for c in criteria {
            match a.estimates.get(&c.id) {
                Some(v) => estimates.push(v.0),
                None => return Err(Error::MissingEstimate { da: a.id.clone(), criterion: c.id.clone() }),
            }
        }
    }
    if let Some(p) = a.priority {
        if p < 1 || p > k {
            return Err(Error::OutOfRange(format!("priority {p} of `{}` (scale 1..={k})", a.id)));
        }
    }
    let fuzzy_priority = match &a.fuzzy_priority {
        Some(v) => {
            if v.len() != k as usize {
                return Err(Error::Dimension { expected: k as usize, found: v.len() });
            }
            let v: Vec<Q> = v.iter().map(|d| d.0).collect();
            check_memberships(&v, &a.id)?;
            Some(v)
        }
        None => None,
    };
    let priority = match (a.priority, &fuzzy_priority) {
        (Some(p), _) => Some(p),
        (None, Some(f)) => Some(fuzzy::aggregate_priority(f)?),
        (None, None) => None,
    };
    Ok(DesignAlternative {
        id: a.id.clone(),
        part_id: part.to_string(),
        label: a.label.clone(),
        estimates,
        priority,
        fuzzy_priority,
    })
}

fn check_memberships(v: &[Q], owner: &str) -> Result<()> {
    if v.iter().any(|m| *m < Q::zero() || *m > Q::one()) {
        return Err(Error::OutOfRange(format!("membership of `{owner}`")));
    }
    Ok(())
}

impl Morphology {
    pub fn from_json(text: &str, opts: &ValidateOptions) -> Result<Self> {
        Self::from_document(&InstanceDocument::from_json(text)?, opts)
    }

    pub fn from_document(doc: &InstanceDocument, opts: &ValidateOptions) -> Result<Self> {
        let Scales { k, l } = doc.scales;
        if k < 1 || l < 1 {
            return Err(Error::OutOfRange(format!("scales k={k}, l={l}")));
        }
        let mut tb = TreeBuild { doc, parts: Vec::new(), scopes: IndexMap::new(), siblings: Vec::new() };
        let root = tb.node(&doc.system)?;
        let TreeBuild { parts, scopes, siblings, .. } = tb;
        for key in doc.alternatives.keys().chain(doc.criteria.keys()) {
            if !parts.iter().any(|p| &p.id == key) {
                return Err(Error::Unknown { kind: "part", id: key.clone() });
            }
        }

        let mut da_part = Vec::new();
        let mut part_offset = Vec::with_capacity(parts.len() + 1);
        let mut da_index = HashMap::new();
        let mut ids = Vec::new();
        for (pi, p) in parts.iter().enumerate() {
            part_offset.push(da_part.len());
            for a in &p.alternatives {
                if da_index.insert(a.id.clone(), da_part.len()).is_some() {
                    return Err(Error::DuplicateId(a.id.clone()));
                }
                ids.push(a.id.clone());
                da_part.push(pi);
            }
        }
        part_offset.push(da_part.len());
        let part_index: HashMap<String, usize> = parts.iter().enumerate().map(|(i, p)| (p.id.clone(), i)).collect();

        let np = parts.len();
        let mut declared = vec![false; np * np];
        let mut compat = CompatibilityTable::new(l, ids, da_part.clone());
        for (node, entries) in &doc.compatibility {
            let scope = scopes.get(node).ok_or_else(|| Error::Unknown { kind: "node", id: node.clone() })?;
            for e in entries {
                let (a, b) = resolve_pair(&da_index, &da_part, e)?;
                let (pa, pb) = (da_part[a], da_part[b]);
                if !scope.contains(&pa) || !scope.contains(&pb) {
                    return Err(Error::Malformed(format!("pair ({}, {}) is not under node `{node}`", e.a, e.b)));
                }
                if compat.level(a, b).is_some() {
                    return Err(Error::DuplicateId(format!("{}/{}", e.a, e.b)));
                }
                let level = compat_level(e, l)?;
                compat.set(a, b, level);
                if let Some(f) = &e.fuzzy {
                    compat.fuzzy.insert((a.min(b), a.max(b)), f.iter().map(|d| d.0).collect());
                }
                declared[pa * np + pb] = true;
                declared[pb * np + pa] = true;
            }
        }
        for (a, b) in siblings {
            declared[a * np + b] = true;
            declared[b * np + a] = true;
        }
        for pa in 0..np {
            for pb in (pa + 1)..np {
                if !declared[pa * np + pb] {
                    continue;
                }
                for a in part_offset[pa]..part_offset[pa + 1] {
                    for b in part_offset[pb]..part_offset[pb + 1] {
                        if compat.level(a, b).is_none() {
                            match opts.fill_missing {
                                Some(v) if v <= l => compat.set(a, b, v),
                                Some(v) => return Err(Error::OutOfRange(format!("fill level {v}"))),
                                None => {
                                    return Err(Error::MissingCompatibility(
                                        compat.ids[a].clone(),
                                        compat.ids[b].clone(),
                                    ))
                                }
                            }
                        }
                    }
                }
            }
        }

        Ok(Morphology {
            name: doc.name.clone().unwrap_or_default(),
            scales: doc.scales,
            root,
            parts,
            compat,
            mcp: doc.mcp.clone(),
            da_part,
            part_offset,
            da_index,
            part_index,
            scopes,
            declared,
        })
    }

    pub fn to_document(&self) -> InstanceDocument {
        let mut criteria = IndexMap::new();
        let mut alternatives = IndexMap::new();
        for p in &self.parts {
            if !p.criteria.is_empty() {
                criteria.insert(
                    p.id.clone(),
                    p.criteria
                        .iter()
                        .map(|c| CriterionDoc {
                            id: c.id.clone(),
                            weight: Dec(c.weight),
                            direction: c.direction,
                            scale: c.scale_note.clone(),
                            range: c.range.map(|(lo, hi)| [Dec(lo), Dec(hi)]),
                        })
                        .collect(),
                );
            }
            alternatives.insert(
                p.id.clone(),
                p.alternatives
                    .iter()
                    .map(|a| AlternativeDoc {
                        id: a.id.clone(),
                        label: a.label.clone(),
                        estimates: p.criteria.iter().zip(&a.estimates).map(|(c, v)| (c.id.clone(), Dec(*v))).collect(),
                        priority: a.priority,
                        fuzzy_priority: a.fuzzy_priority.as_ref().map(|v| v.iter().map(|x| Dec(*x)).collect()),
                    })
                    .collect(),
            );
        }
        let mut compatibility: IndexMap<String, Vec<CompatDoc>> = IndexMap::new();
        for (a, b, level) in self.compat.entries() {
            let node = self.lowest_common_scope(self.da_part[a], self.da_part[b]);
            compatibility.entry(node).or_default().push(CompatDoc {
                a: self.compat.ids[a].clone(),
                b: self.compat.ids[b].clone(),
                level: Some(level),
                fuzzy: self.compat.fuzzy(a, b).map(|v| v.iter().map(|x| Dec(*x)).collect()),
            });
        }
        InstanceDocument {
            name: (!self.name.is_empty()).then(|| self.name.clone()),
            scales: self.scales,
            system: self.node_doc(&self.root),
            criteria,
            alternatives,
            compatibility,
            mcp: self.mcp.clone(),
        }
    }

    fn node_doc(&self, n: &SystemNode) -> NodeDoc {
        match n {
            SystemNode::Leaf(p) => NodeDoc::Leaf { part: self.parts[*p].id.clone(), label: self.parts[*p].label.clone() },
            SystemNode::Internal { id, label, children } => NodeDoc::Internal {
                id: id.clone(),
                label: label.clone(),
                children: children.iter().map(|c| self.node_doc(c)).collect(),
            },
        }
    }

    fn lowest_common_scope(&self, pa: usize, pb: usize) -> String {
        // scopes are stored in preorder, so the last match is the deepest
        self.scopes
            .iter()
            .filter(|(_, ps)| ps.contains(&pa) && ps.contains(&pb))
            .last()
            .map(|(id, _)| id.clone())
            .unwrap_or_else(|| self.root_id().to_string())
    }

    pub fn root_id(&self) -> &str {
        self.node_id(&self.root)
    }

    pub fn node_id<'a>(&'a self, n: &'a SystemNode) -> &'a str {
        match n {
            SystemNode::Leaf(p) => &self.parts[*p].id,
            SystemNode::Internal { id, .. } => id,
        }
    }

    /// Node with the given id, leaf or internal.
    pub fn node(&self, id: &str) -> Result<&SystemNode> {
        fn find<'a>(m: &'a Morphology, n: &'a SystemNode, id: &str) -> Option<&'a SystemNode> {
            if m.node_id(n) == id {
                return Some(n);
            }
            match n {
                SystemNode::Leaf(_) => None,
                SystemNode::Internal { children, .. } => children.iter().find_map(|c| find(m, c, id)),
            }
        }
        find(self, &self.root, id).ok_or_else(|| Error::Unknown { kind: "scope", id: id.to_string() })
    }

    /// Leaf parts under `scope`, in tree order.
    pub fn scope_parts(&self, scope: &str) -> Result<&[usize]> {
        self.scopes
            .get(scope)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::Unknown { kind: "scope", id: scope.to_string() })
    }

    pub fn space_size(&self) -> u128 {
        self.parts.iter().map(|p| p.alternatives.len() as u128).product()
    }

    pub fn scope_size(&self, scope: &str) -> Result<u128> {
        Ok(self.scope_parts(scope)?.iter().map(|&p| self.parts[p].alternatives.len() as u128).product())
    }

    pub fn da_count(&self) -> usize {
        self.da_part.len()
    }

    pub fn da(&self, g: usize) -> &DesignAlternative {
        let p = self.da_part[g];
        &self.parts[p].alternatives[g - self.part_offset[p]]
    }

    pub fn da_global(&self, id: &str) -> Result<usize> {
        self.da_index.get(id).copied().ok_or_else(|| Error::Unknown { kind: "design alternative", id: id.to_string() })
    }

    pub fn part_index(&self, id: &str) -> Result<usize> {
        self.part_index.get(id).copied().ok_or_else(|| Error::Unknown { kind: "part", id: id.to_string() })
    }

    pub fn part_of(&self, g: usize) -> usize {
        self.da_part[g]
    }

    /// Global indices of a part's design alternatives.
    pub fn part_das(&self, p: usize) -> Range<usize> {
        self.part_offset[p]..self.part_offset[p + 1]
    }

    pub fn priority(&self, g: usize) -> Result<u8> {
        self.da(g).priority.ok_or_else(|| Error::MissingPriority(self.da(g).id.clone()))
    }

    /// Whether a compatibility table relates the two parts.
    pub fn parts_declared(&self, pa: usize, pb: usize) -> bool {
        self.declared[pa * self.parts.len() + pb]
    }

    pub fn level(&self, a: usize, b: usize) -> Option<u8> {
        self.compat.level(a, b)
    }

    pub fn compatibility(&self, a: &str, b: &str) -> Result<u8> {
        let (ia, ib) = (self.da_global(a)?, self.da_global(b)?);
        if self.da_part[ia] == self.da_part[ib] {
            return Err(Error::SamePart(a.to_string(), b.to_string()));
        }
        self.compat.level(ia, ib).ok_or_else(|| Error::Unknown { kind: "compatibility pair", id: format!("{a}/{b}") })
    }

    /// Same morphology over a replacement table, e.g. a binarized one.
    pub fn with_compat(&self, compat: CompatibilityTable) -> Result<Morphology> {
        if compat.ids != self.compat.ids {
            return Err(Error::Malformed("table does not match the morphology".into()));
        }
        let mut m = self.clone();
        m.scales.l = compat.max_level;
        m.compat = compat;
        Ok(m)
    }

    /// Composition from design alternative ids, one per part of `scope` in any order.
    pub fn composition(&self, scope: &str, ids: &[&str]) -> Result<Composition> {
        let parts = self.scope_parts(scope)?;
        if ids.len() != parts.len() {
            return Err(Error::Dimension { expected: parts.len(), found: ids.len() });
        }
        let mut das = vec![usize::MAX; parts.len()];
        for id in ids {
            let g = self.da_global(id)?;
            let slot = parts
                .iter()
                .position(|&p| p == self.da_part[g])
                .ok_or_else(|| Error::Malformed(format!("`{id}` is not under `{scope}`")))?;
            if das[slot] != usize::MAX {
                return Err(Error::SamePart(self.da(das[slot]).id.clone(), id.to_string()));
            }
            das[slot] = g;
        }
        Ok(Composition { scope: scope.to_string(), das })
    }
}

fn resolve_pair(index: &HashMap<String, usize>, da_part: &[usize], e: &CompatDoc) -> Result<(usize, usize)> {
    let a = *index.get(&e.a).ok_or_else(|| Error::Unknown { kind: "design alternative", id: e.a.clone() })?;
    let b = *index.get(&e.b).ok_or_else(|| Error::Unknown { kind: "design alternative", id: e.b.clone() })?;
    if da_part[a] == da_part[b] {
        return Err(Error::SamePart(e.a.clone(), e.b.clone()));
    }
    Ok((a, b))
}

fn compat_level(e: &CompatDoc, l: u8) -> Result<u8> {
    if let Some(f) = &e.fuzzy {
        if f.len() != l as usize + 1 {
            return Err(Error::Dimension { expected: l as usize + 1, found: f.len() });
        }
        let v: Vec<Q> = f.iter().map(|d| d.0).collect();
        check_memberships(&v, &format!("{}/{}", e.a, e.b))?;
    }
    match (e.level, &e.fuzzy) {
        (Some(v), _) if v > l => Err(Error::OutOfRange(format!("level {v} of ({}, {})", e.a, e.b))),
        (Some(v), _) => Ok(v),
        (None, Some(f)) => fuzzy::aggregate_compatibility(&f.iter().map(|d| d.0).collect::<Vec<_>>()),
        (None, None) => Err(Error::Malformed(format!("entry ({}, {}) has neither level nor fuzzy", e.a, e.b))),
    }
}

/// Validates with default options.
pub fn validate_morphology(doc: &InstanceDocument) -> Result<Morphology> {
    Morphology::from_document(doc, &ValidateOptions::default())
}
