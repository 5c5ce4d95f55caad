//! 0-1 formulations in LP file format, plus a small parser for checking them.
//!
//! Item variables are named `x_<part>_<da>`, product variables of the
//! linearized quadratic objective `y_<part>_<da>_<part>_<da>`. Every row is
//! scaled by the common denominator of its coefficients so all numbers are
//! integers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::Write;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::mcp::McpInstance;
use crate::model::Morphology;
use crate::qap::QapInstance;
use crate::rational::{common_denominator, fmt_q, parse_q, Q};

const TERMS_PER_LINE: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpKind {
    Ma,
    Mcp,
    Qap,
}

impl std::str::FromStr for LpKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ma" => Ok(LpKind::Ma),
            "mcp" => Ok(LpKind::Mcp),
            "qap" => Ok(LpKind::Qap),
            _ => Err(Error::Malformed(format!("unsupported LP kind `{s}`"))),
        }
    }
}

pub enum LpInput<'a> {
    /// Admissible compositions of `scope`: declared pairs below `threshold` are excluded.
    Ma { m: &'a Morphology, scope: &'a str, threshold: u8 },
    Mcp(&'a McpInstance),
    Qap(&'a QapInstance),
}

impl LpInput<'_> {
    pub fn kind(&self) -> LpKind {
        match self {
            LpInput::Ma { .. } => LpKind::Ma,
            LpInput::Mcp(_) => LpKind::Mcp,
            LpInput::Qap(_) => LpKind::Qap,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSummary {
    pub x_vars: Vec<String>,
    pub y_vars: Vec<String>,
    pub constraints: usize,
}

impl LpSummary {
    pub fn variables(&self) -> usize {
        self.x_vars.len() + self.y_vars.len()
    }
}

fn clean(id: &str) -> String {
    id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '.' { c } else { '_' }).collect()
}

pub fn x_name(part: &str, da: &str) -> String {
    format!("x_{}_{}", clean(part), clean(da))
}

pub fn y_name(pa: &str, a: &str, pb: &str, b: &str) -> String {
    format!("y_{}_{}_{}_{}", clean(pa), clean(a), clean(pb), clean(b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn text(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub terms: Vec<(Q, String)>,
    pub sense: Sense,
    pub rhs: Q,
}

impl Row {
    fn new(name: impl Into<String>, terms: Vec<(Q, String)>, sense: Sense, rhs: Q) -> Self {
        Row { name: name.into(), terms, sense, rhs }
    }

    fn scaled(mut self) -> Self {
        let l = Q::from_integer(common_denominator(self.terms.iter().map(|t| &t.0).chain([&self.rhs])));
        for t in &mut self.terms {
            t.0 *= l;
        }
        self.rhs *= l;
        self
    }
}

fn write_terms(buf: &mut String, terms: &[(Q, String)]) {
    for (i, (c, v)) in terms.iter().enumerate() {
        if i > 0 && i % TERMS_PER_LINE == 0 {
            buf.push_str("\n   ");
        }
        let neg = c.is_negative();
        let mag = c.abs();
        if i == 0 {
            if neg {
                buf.push_str(" -");
            }
        } else {
            buf.push_str(if neg { " - " } else { " + " });
        }
        if i == 0 && !neg {
            buf.push(' ');
        }
        if mag.is_one() {
            buf.push_str(v);
        } else {
            let _ = write!(buf, "{} {}", fmt_q(&mag), v);
        }
    }
}

struct Formulation {
    objective: Vec<(Q, String)>,
    rows: Vec<Row>,
    x_vars: Vec<String>,
    y_vars: Vec<String>,
}

fn groups_formulation(groups: &[crate::mcp::McpGroup], budget: Q, one_sense: Sense) -> Formulation {
    let mut objective = Vec::new();
    let mut rows = Vec::new();
    let mut x_vars = Vec::new();
    let mut budget_terms = Vec::new();
    for g in groups {
        let mut terms = Vec::new();
        for it in &g.items {
            let x = x_name(&g.id, &it.id);
            objective.push((it.profit(), x.clone()));
            terms.push((Q::one(), x.clone()));
            if !it.weight.is_zero() {
                budget_terms.push((it.weight, x.clone()));
            }
            x_vars.push(x);
        }
        rows.push(Row::new(format!("one_{}", clean(&g.id)), terms, one_sense, Q::one()));
    }
    if !budget_terms.is_empty() {
        rows.push(Row::new("budget", budget_terms, Sense::Le, budget));
    }
    Formulation { objective, rows, x_vars, y_vars: Vec::new() }
}

fn ma_formulation(m: &Morphology, scope: &str, threshold: u8) -> Result<Formulation> {
    if threshold == 0 || threshold > m.scales.l {
        return Err(Error::OutOfRange(format!("threshold {threshold} outside 1..={}", m.scales.l)));
    }
    let parts = m.scope_parts(scope)?.to_vec();
    let k = m.scales.k as i64;
    let mut objective = Vec::new();
    let mut rows = Vec::new();
    let mut x_vars = Vec::new();
    let mut names = BTreeMap::new();
    for &p in &parts {
        let part = &m.parts[p];
        let mut terms = Vec::new();
        for g in m.part_das(p) {
            let da = m.da(g);
            let x = x_name(&part.id, &da.id);
            let c = da.priority.map_or(Q::zero(), |r| Q::from_integer(k + 1 - r as i64));
            objective.push((c, x.clone()));
            terms.push((Q::one(), x.clone()));
            names.insert(g, x.clone());
            x_vars.push(x);
        }
        rows.push(Row::new(format!("one_{}", clean(&part.id)), terms, Sense::Eq, Q::one()));
    }
    let mut n = 0;
    for (i, &pa) in parts.iter().enumerate() {
        for &pb in &parts[i + 1..] {
            for a in m.part_das(pa) {
                for b in m.part_das(pb) {
                    if m.level(a, b).is_some_and(|l| l < threshold) {
                        n += 1;
                        rows.push(Row::new(
                            format!("inc_{n}"),
                            vec![(Q::one(), names[&a].clone()), (Q::one(), names[&b].clone())],
                            Sense::Le,
                            Q::one(),
                        ));
                    }
                }
            }
        }
    }
    Ok(Formulation { objective, rows, x_vars, y_vars: Vec::new() })
}

fn qap_formulation(inst: &QapInstance) -> Formulation {
    let sense = if inst.at_most_one { Sense::Le } else { Sense::Eq };
    let mut f = groups_formulation(&inst.groups, inst.budget, sense);
    for (n, (&((g, j), (h, k)), d)) in inst.pair_profit.iter().filter(|(_, d)| d.is_positive()).enumerate() {
        let (gi, hi) = (&inst.groups[g], &inst.groups[h]);
        let xa = x_name(&gi.id, &gi.items[j].id);
        let xb = x_name(&hi.id, &hi.items[k].id);
        let y = y_name(&gi.id, &gi.items[j].id, &hi.id, &hi.items[k].id);
        let one = Q::one();
        f.objective.push((*d, y.clone()));
        f.rows.push(Row::new(format!("mc_{}_a", n + 1), vec![(one, y.clone()), (-one, xa.clone())], Sense::Le, Q::zero()));
        f.rows.push(Row::new(format!("mc_{}_b", n + 1), vec![(one, y.clone()), (-one, xb.clone())], Sense::Le, Q::zero()));
        f.rows.push(Row::new(format!("mc_{}_c", n + 1), vec![(one, y.clone()), (-one, xa), (-one, xb)], Sense::Ge, -one));
        f.y_vars.push(y);
    }
    f
}

fn render(kind: LpKind, f: Formulation) -> (String, LpSummary) {
    let tag = match kind {
        LpKind::Ma => "ma",
        LpKind::Mcp => "mcp",
        LpKind::Qap => "qap",
    };
    let obj = Row::new("obj", f.objective, Sense::Eq, Q::zero()).scaled();
    let mut s = String::new();
    let _ = writeln!(s, "\\ morphsynth {tag}");
    s.push_str("Maximize\n obj:");
    write_terms(&mut s, &obj.terms);
    s.push_str("\nSubject To\n");
    let count = f.rows.len();
    for row in f.rows {
        let row = row.scaled();
        let _ = write!(s, " {}:", row.name);
        write_terms(&mut s, &row.terms);
        let _ = writeln!(s, " {} {}", row.sense.text(), fmt_q(&row.rhs));
    }
    s.push_str("Bounds\n");
    for y in &f.y_vars {
        let _ = writeln!(s, " 0 <= {y} <= 1");
    }
    s.push_str("Binary\n");
    for chunk in f.x_vars.chunks(TERMS_PER_LINE) {
        let _ = writeln!(s, " {}", chunk.join(" "));
    }
    s.push_str("End\n");
    (s, LpSummary { x_vars: f.x_vars, y_vars: f.y_vars, constraints: count })
}

/// LP text and its summary without writing anywhere.
pub fn lp_text(input: &LpInput) -> Result<(String, LpSummary)> {
    let f = match input {
        LpInput::Ma { m, scope, threshold } => ma_formulation(m, scope, *threshold)?,
        LpInput::Mcp(inst) => {
            inst.check()?;
            groups_formulation(&inst.groups, inst.budget, Sense::Eq)
        }
        LpInput::Qap(inst) => {
            inst.check()?;
            qap_formulation(inst)
        }
    };
    Ok(render(input.kind(), f))
}

pub fn export_lp(input: &LpInput, out: &mut dyn Write) -> Result<LpSummary> {
    let (text, summary) = lp_text(input)?;
    out.write_all(text.as_bytes())?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LpModel {
    pub objective: Vec<(Q, String)>,
    pub rows: Vec<Row>,
    /// `(lower, var, upper)`.
    pub bounds: Vec<(Q, String, Q)>,
    pub binaries: Vec<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Section {
    Head,
    Objective,
    Constraints,
    Bounds,
    Binary,
    End,
}

fn lp_err(line: usize, msg: impl Into<String>) -> Error {
    Error::LpParse { line, msg: msg.into() }
}

fn is_var(tok: &str) -> bool {
    let mut c = tok.chars();
    c.next().is_some_and(|f| f.is_ascii_alphabetic() || f == '_') && c.all(|ch| ch.is_ascii_alphanumeric() || ch == '_' || ch == '.')
}

fn parse_expr(tokens: &[&str], line: usize) -> Result<Vec<(Q, String)>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let mut sign = Q::one();
        if tokens[i] == "+" || tokens[i] == "-" {
            if tokens[i] == "-" {
                sign = -sign;
            }
            i += 1;
        } else if !out.is_empty() {
            return Err(lp_err(line, format!("expected sign before `{}`", tokens[i])));
        }
        let mut coef = Q::one();
        if let Some(c) = tokens.get(i).and_then(|t| parse_q(t)) {
            coef = c;
            i += 1;
        }
        match tokens.get(i) {
            Some(v) if is_var(v) => out.push((sign * coef, v.to_string())),
            Some(v) => return Err(lp_err(line, format!("bad variable `{v}`"))),
            None => return Err(lp_err(line, "dangling term")),
        }
        i += 1;
    }
    Ok(out)
}

fn tokenize(s: &str) -> Vec<String> {
    let mut spaced = String::with_capacity(s.len() + 8);
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '<' | '>' | '=' => {
                spaced.push(' ');
                spaced.push(c);
                if chars.peek() == Some(&'=') {
                    spaced.push(chars.next().unwrap());
                }
                spaced.push(' ');
            }
            '+' => spaced.push_str(" + "),
            '-' => spaced.push_str(" - "),
            _ => spaced.push(c),
        }
    }
    // rejoin a leading sign with the number that follows a relation
    let raw: Vec<&str> = spaced.split_whitespace().collect();
    let mut out: Vec<String> = Vec::new();
    let mut i = 0;
    while i < raw.len() {
        let after_rel = out.last().is_some_and(|t| matches!(t.as_str(), "<=" | ">=" | "=" | "<" | ">"));
        if after_rel && raw[i] == "-" && i + 1 < raw.len() {
            out.push(format!("-{}", raw[i + 1]));
            i += 2;
        } else {
            out.push(raw[i].to_string());
            i += 1;
        }
    }
    out
}

fn parse_statement(section: Section, text: &str, line: usize, model: &mut LpModel) -> Result<()> {
    let (name, body) = match text.split_once(':') {
        Some((n, b)) => (n.trim().to_string(), b),
        None => (String::new(), text),
    };
    let toks = tokenize(body);
    let toks: Vec<&str> = toks.iter().map(String::as_str).collect();
    match section {
        Section::Objective => model.objective = parse_expr(&toks, line)?,
        Section::Constraints => {
            let pos = toks
                .iter()
                .position(|t| matches!(*t, "<=" | ">=" | "=" | "<" | ">" | "=<" | "=>"))
                .ok_or_else(|| lp_err(line, "constraint without relation"))?;
            let sense = match toks[pos] {
                "<=" | "<" | "=<" => Sense::Le,
                ">=" | ">" | "=>" => Sense::Ge,
                _ => Sense::Eq,
            };
            if toks.len() != pos + 2 {
                return Err(lp_err(line, "right-hand side must be one number"));
            }
            let rhs = parse_q(toks[pos + 1]).ok_or_else(|| lp_err(line, "non-numeric right-hand side"))?;
            let terms = parse_expr(&toks[..pos], line)?;
            if terms.is_empty() {
                return Err(lp_err(line, "empty constraint"));
            }
            model.rows.push(Row { name, terms, sense, rhs });
        }
        _ => unreachable!(),
    }
    Ok(())
}

/// Parses the LP dialect written by [`export_lp`].
pub fn parse_lp(text: &str) -> Result<LpModel> {
    let mut model = LpModel::default();
    let mut section = Section::Head;
    let mut pending: Option<(usize, String)> = None;
    let flush = |section: Section, pending: &mut Option<(usize, String)>, model: &mut LpModel| -> Result<()> {
        match pending.take() {
            Some((line, stmt)) => parse_statement(section, &stmt, line, model),
            None => Ok(()),
        }
    };
    for (n, raw) in text.split('\n').enumerate() {
        let line = n + 1;
        if raw.contains('\r') {
            return Err(lp_err(line, "carriage return"));
        }
        let t = raw.trim();
        if t.is_empty() || t.starts_with('\\') {
            continue;
        }
        let next = match t.to_ascii_lowercase().as_str() {
            "maximize" | "maximise" | "max" => Some(Section::Objective),
            "subject to" | "st" | "s.t." => Some(Section::Constraints),
            "bounds" => Some(Section::Bounds),
            "binary" | "binaries" | "bin" => Some(Section::Binary),
            "end" => Some(Section::End),
            _ => None,
        };
        if let Some(s) = next {
            flush(section, &mut pending, &mut model)?;
            if s <= section {
                return Err(lp_err(line, format!("section `{t}` out of order")));
            }
            section = s;
            continue;
        }
        match section {
            Section::Head => return Err(lp_err(line, "content before objective")),
            Section::End => return Err(lp_err(line, "content after End")),
            Section::Objective | Section::Constraints => {
                if t.contains(':') || pending.is_none() {
                    flush(section, &mut pending, &mut model)?;
                    pending = Some((line, t.to_string()));
                } else if let Some((_, s)) = &mut pending {
                    s.push(' ');
                    s.push_str(t);
                }
            }
            Section::Bounds => {
                let toks = tokenize(t);
                match toks.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
                    [lo, "<=", v, "<=", hi] if is_var(v) => {
                        let lo = parse_q(lo).ok_or_else(|| lp_err(line, "bad lower bound"))?;
                        let hi = parse_q(hi).ok_or_else(|| lp_err(line, "bad upper bound"))?;
                        model.bounds.push((lo, v.to_string(), hi));
                    }
                    _ => return Err(lp_err(line, "unsupported bound")),
                }
            }
            Section::Binary => {
                for v in t.split_whitespace() {
                    if !is_var(v) {
                        return Err(lp_err(line, format!("bad variable `{v}`")));
                    }
                    model.binaries.push(v.to_string());
                }
            }
        }
    }
    flush(section, &mut pending, &mut model)?;
    if section != Section::End {
        return Err(lp_err(text.lines().count(), "missing End"));
    }
    let declared: BTreeSet<&str> =
        model.binaries.iter().map(String::as_str).chain(model.bounds.iter().map(|b| b.1.as_str())).collect();
    for (_, v) in model.objective.iter().chain(model.rows.iter().flat_map(|r| r.terms.iter())) {
        if !declared.contains(v.as_str()) {
            return Err(lp_err(0, format!("undeclared variable `{v}`")));
        }
    }
    Ok(model)
}

impl LpModel {
    pub fn variables(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.binaries.iter().map(String::as_str).collect();
        v.extend(self.bounds.iter().map(|b| b.1.as_str()));
        v
    }

    /// Unlisted variables count as zero.
    pub fn is_satisfied(&self, values: &BTreeMap<String, Q>) -> bool {
        let val = |v: &str| values.get(v).copied().unwrap_or_else(Q::zero);
        let rows_ok = self.rows.iter().all(|r| {
            let lhs: Q = r.terms.iter().map(|(c, v)| c * val(v)).sum();
            match r.sense {
                Sense::Le => lhs <= r.rhs,
                Sense::Ge => lhs >= r.rhs,
                Sense::Eq => lhs == r.rhs,
            }
        });
        let bounds_ok = self.bounds.iter().all(|(lo, v, hi)| *lo <= val(v) && val(v) <= *hi);
        let bin_ok = self.binaries.iter().all(|v| val(v).is_zero() || val(v).is_one());
        rows_ok && bounds_ok && bin_ok
    }

    pub fn objective_value(&self, values: &BTreeMap<String, Q>) -> Q {
        self.objective.iter().map(|(c, v)| c * values.get(v).copied().unwrap_or_else(Q::zero)).sum()
    }
}
