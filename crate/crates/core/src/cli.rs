//! The `morphsynth` command.
//!
//! Exit codes: 0 success, 2 invalid instance, 3 infeasible or over a cap,
//! 64 usage.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::enumerate::{cap_from_env, enumerate_admissible_capped, DEFAULT_CAP};
use crate::error::Error;
use crate::fuzzy::{self, FuzzyCase, FuzzyOptions, Preference};
use crate::hmmd::{self, HmmdOptions, Solution};
use crate::ideal::{self, IdealStrategy, Keying, Metric};
use crate::lp::{self, LpInput, LpKind};
use crate::mcp;
use crate::model::{Composition, Morphology, ValidateOptions};
use crate::pareto;
use crate::qap;
use crate::ranking::{rank_alternatives, RankingConfig, RankingMethod};
use crate::rational::{fmt_q, fmt_round, fmt_trunc, parse_q, Q};

#[derive(Parser, Debug)]
#[command(name = "morphsynth", version, about = "Combinatorial synthesis of modular systems")]
struct Cli {
    /// Print JSON instead of text tables
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads (default: available parallelism)
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Fill undeclared compatibility entries with this level
    #[arg(long, global = true, value_name = "LEVEL")]
    fill_missing: Option<u8>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Input {
    /// Instance file (JSON)
    #[arg(short = 'f', long = "file", value_name = "INSTANCE")]
    file: PathBuf,
}

#[derive(Args, Debug)]
struct ScopeArgs {
    /// System node to compose (default: root)
    #[arg(long)]
    scope: Option<String>,
    /// Least compatibility level between linked alternatives
    #[arg(long, value_name = "LEVEL")]
    min_level: Option<u8>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RankArg {
    Layers,
    Outranking,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MetricArg {
    L2,
    L1,
    Chebyshev,
    Hamming,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KeyingArg {
    Priority,
    Criteria,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    Alternatives,
    Scale,
    Expert,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum McpSolver {
    Greedy,
    Exact,
    Pareto,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum QapSolver {
    Exact,
    Greedy,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PreferenceArg {
    Modal,
    Pessimistic,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Ma,
    Mcp,
    Qap,
}

fn rational_arg(s: &str) -> Result<Q, String> {
    parse_q(s).ok_or_else(|| format!("`{s}` is not a decimal or p/q number"))
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check an instance and print its size
    Validate(Input),
    /// Recompute priorities from criterion estimates
    Rank {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "layers")]
        method: RankArg,
        /// Concordance threshold for outranking
        #[arg(long, value_parser = rational_arg, default_value = "2/3")]
        concordance: Q,
    },
    /// List admissible compositions
    Enumerate {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        scope: ScopeArgs,
    },
    /// Rank admissible compositions by distance to an ideal point
    Ideal {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        scope: ScopeArgs,
        #[arg(long, value_enum, default_value = "l2")]
        metric: MetricArg,
        #[arg(long, value_enum, default_value = "priority")]
        keying: KeyingArg,
        #[arg(long, value_enum, default_value = "alternatives")]
        strategy: StrategyArg,
        /// Components of an expert ideal, comma separated
        #[arg(long, value_delimiter = ',', value_parser = rational_arg)]
        ideal: Vec<Q>,
        /// Print only the first N rows
        #[arg(long)]
        top: Option<usize>,
    },
    /// Efficient admissible compositions
    Pareto {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        scope: ScopeArgs,
        #[arg(long, value_enum, default_value = "priority")]
        keying: KeyingArg,
    },
    /// Multiple-choice knapsack over the instance
    Mcp {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_parser = rational_arg)]
        budget: Q,
        #[arg(long, value_enum, default_value = "greedy")]
        solver: McpSolver,
    },
    /// Quadratic assignment with compatibility as pair profit
    Qap {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_parser = rational_arg)]
        budget: Q,
        #[arg(long, value_enum, default_value = "exact")]
        solver: QapSolver,
        /// Print the Pareto front of the vector objective
        #[arg(long)]
        pareto: bool,
        /// Let a part stay unassigned
        #[arg(long)]
        at_most_one: bool,
    },
    /// Quality-lattice synthesis
    Hmmd {
        #[command(flatten)]
        input: Input,
        /// Solve one node directly instead of the whole tree
        #[arg(long)]
        scope: Option<String>,
        #[arg(long, default_value_t = 1)]
        min_w: u8,
        /// Cross every child solution, not only efficient ones
        #[arg(long)]
        no_prune: bool,
    },
    /// Quality-lattice synthesis with fuzzy estimates
    HmmdFuzzy {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        scope: Option<String>,
        /// 1 crisp, 2 fuzzy compatibility, 3 fuzzy priority, 4 both
        #[arg(long, default_value_t = 4)]
        case: u8,
        #[arg(long, value_parser = rational_arg, default_value = "0")]
        alpha: Q,
        #[arg(long, value_enum, default_value = "modal")]
        preference: PreferenceArg,
        #[arg(long, default_value_t = 1)]
        min_w: u8,
    },
    /// Write a 0-1 program in LP format
    ExportLp {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Output file (default: stdout)
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
        #[arg(long, value_parser = rational_arg)]
        budget: Option<Q>,
        #[command(flatten)]
        scope: ScopeArgs,
        #[arg(long)]
        at_most_one: bool,
    },
    /// Run every method and print a side-by-side table
    Report {
        /// Bundled instance name
        #[arg(long, conflicts_with = "file")]
        fixture: Option<String>,
        #[arg(short = 'f', long = "file")]
        file: Option<PathBuf>,
        /// Knapsack budgets
        #[arg(long, value_delimiter = ',', value_parser = rational_arg, default_value = "14,15")]
        budgets: Vec<Q>,
    },
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Out = Result<(String, Value), Failure>;

fn table(head: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = head.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut s = String::new();
    let mut line = |cells: Vec<&str>| {
        let mut l = String::new();
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                l.push_str("  ");
            }
            l.push_str(c);
            l.extend(std::iter::repeat_n(' ', width[i] - c.chars().count()));
        }
        s.push_str(l.trim_end());
        s.push('\n');
    };
    line(head.to_vec());
    for r in rows {
        line(r.iter().map(String::as_str).collect());
    }
    s
}

fn load(input: &Input, fill: Option<u8>) -> Result<Morphology, Failure> {
    let text = std::fs::read_to_string(&input.file).map_err(Error::from)?;
    Ok(Morphology::from_json(&text, &ValidateOptions { fill_missing: fill })?)
}

fn scope_of<'a>(m: &'a Morphology, s: &'a Option<String>) -> &'a str {
    s.as_deref().unwrap_or(m.root_id())
}

fn ids_json(m: &Morphology, c: &Composition) -> Value {
    json!(c.ids(m))
}

fn qs(v: &[Q]) -> String {
    v.iter().map(fmt_q).collect::<Vec<_>>().join(",")
}

fn candidates(m: &Morphology, s: &ScopeArgs, default_top: bool) -> Result<(String, u8, Vec<Composition>), Failure> {
    let scope = scope_of(m, &s.scope).to_string();
    let level = s.min_level.unwrap_or(if default_top { m.scales.l } else { 1 });
    let comps = enumerate_admissible_capped(m, &scope, level, cap_from_env(DEFAULT_CAP))?;
    Ok((scope, level, comps))
}

fn cmd_validate(m: &Morphology) -> Out {
    let text = format!("valid; {} parts; {} combinations\n", m.parts.len(), m.space_size());
    let j = json!({"valid": true, "parts": m.parts.len(), "combinations": m.space_size().to_string(), "instance": m.to_document()});
    Ok((text, j))
}

fn cmd_rank(m: &Morphology, method: RankArg, concordance: Q) -> Out {
    let cfg = RankingConfig {
        method: match method {
            RankArg::Layers => RankingMethod::DominanceLayers,
            RankArg::Outranking => RankingMethod::WeightedOutranking,
        },
        concordance_threshold: concordance,
        k: m.scales.k,
    };
    let mut rows = Vec::new();
    let mut parts = serde_json::Map::new();
    for part in &m.parts {
        let ranks = rank_alternatives(part, &cfg)?;
        let mut list = Vec::new();
        for da in &part.alternatives {
            let given = da.priority.map_or("-".to_string(), |r| r.to_string());
            rows.push(vec![part.id.clone(), da.id.clone(), given, ranks[&da.id].to_string()]);
            list.push(json!({"id": da.id, "priority": da.priority, "computed": ranks[&da.id]}));
        }
        parts.insert(part.id.clone(), Value::Array(list));
    }
    Ok((table(&["part", "alternative", "priority", "computed"], &rows), json!({"parts": parts})))
}

fn cmd_enumerate(m: &Morphology, s: &ScopeArgs) -> Out {
    let (scope, level, comps) = candidates(m, s, false)?;
    let rows: Vec<Vec<String>> = comps.iter().enumerate().map(|(i, c)| vec![(i + 1).to_string(), c.label(m)]).collect();
    let text = format!("{} admissible compositions of {scope} at level >= {level}\n{}", comps.len(), table(&["#", "composition"], &rows));
    let j = json!({"scope": scope, "min_level": level, "count": comps.len(), "compositions": comps.iter().map(|c| ids_json(m, c)).collect::<Vec<_>>()});
    Ok((text, j))
}

fn keying(k: KeyingArg) -> Keying {
    match k {
        KeyingArg::Priority => Keying::Priority,
        KeyingArg::Criteria => Keying::Criteria,
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_ideal(m: &Morphology, s: &ScopeArgs, metric: MetricArg, k: KeyingArg, strategy: StrategyArg, expert: &[Q], top: Option<usize>) -> Out {
    let (scope, level, comps) = candidates(m, s, true)?;
    let metric = match metric {
        MetricArg::L2 => Metric::L2,
        MetricArg::L1 => Metric::L1,
        MetricArg::Chebyshev => Metric::Chebyshev,
        MetricArg::Hamming => Metric::Hamming,
    };
    let strategy = match strategy {
        StrategyArg::Alternatives => IdealStrategy::BestOfAlternatives,
        StrategyArg::Scale => IdealStrategy::BestOfScale,
        StrategyArg::Expert if expert.is_empty() => return Err(Failure::Usage("--strategy expert needs --ideal".into())),
        StrategyArg::Expert => IdealStrategy::ExpertSupplied(expert.to_vec()),
    };
    let target = ideal::generate_ideal(m, &scope, keying(k), &strategy)?;
    let ranked = ideal::select_closest(&comps, m, &target, metric)?;
    let shown = &ranked[..top.unwrap_or(ranked.len()).min(ranked.len())];
    let rows: Vec<Vec<String>> = shown
        .iter()
        .enumerate()
        .map(|(i, r)| {
            vec![
                (i + 1).to_string(),
                r.composition.label(m),
                format!("({})", qs(&r.vector.components)),
                format!("{:.4}", r.distance),
                if r.tied { "tie".into() } else { String::new() },
            ]
        })
        .collect();
    let text = format!(
        "ideal ({}) over {} compositions at level >= {level}\n{}",
        qs(&target.components),
        comps.len(),
        table(&["#", "composition", "vector", "distance", ""], &rows)
    );
    let j = json!({
        "ideal": target.components.iter().map(fmt_q).collect::<Vec<_>>(),
        "min_level": level,
        "ranked": shown.iter().map(|r| json!({
            "composition": ids_json(m, &r.composition),
            "vector": r.vector.components.iter().map(fmt_q).collect::<Vec<_>>(),
            "distance": r.distance,
            "tied": r.tied,
        })).collect::<Vec<_>>(),
    });
    Ok((text, j))
}

fn pareto_set(m: &Morphology, scope: &str, comps: &[Composition], k: Keying) -> Result<Vec<(Composition, Vec<Q>)>, Failure> {
    let dirs = ideal::component_directions(m, scope, k)?;
    let items: Vec<(usize, Vec<Q>)> = comps
        .iter()
        .enumerate()
        .map(|(i, c)| Ok((i, ideal::estimate_vector(m, c, k)?.components)))
        .collect::<crate::Result<_>>()?;
    let keep = pareto::pareto_filter(&items, &dirs)?;
    Ok(keep.into_iter().map(|i| (comps[i].clone(), items[i].1.clone())).collect())
}

fn cmd_pareto(m: &Morphology, s: &ScopeArgs, k: KeyingArg) -> Out {
    let (scope, level, comps) = candidates(m, s, true)?;
    let front = pareto_set(m, &scope, &comps, keying(k))?;
    let rows: Vec<Vec<String>> = front.iter().map(|(c, v)| vec![c.label(m), format!("({})", qs(v))]).collect();
    let text = format!(
        "{} efficient of {} compositions at level >= {level}\n{}",
        front.len(),
        comps.len(),
        table(&["composition", "vector"], &rows)
    );
    let j = json!({"min_level": level, "candidates": comps.len(), "front": front.iter().map(|(c, v)| json!({
        "composition": ids_json(m, c),
        "vector": v.iter().map(fmt_q).collect::<Vec<_>>(),
    })).collect::<Vec<_>>()});
    Ok((text, j))
}

fn cmd_mcp(m: &Morphology, budget: Q, solver: McpSolver) -> Out {
    let inst = match solver {
        McpSolver::Pareto => mcp::derive_mcp_multicriteria(m, budget)?,
        _ => mcp::derive_mcp_instance(m, budget)?,
    };
    let solutions = match solver {
        McpSolver::Greedy => vec![mcp::solve_mcp_greedy(&inst)?],
        McpSolver::Exact => vec![mcp::solve_mcp_exact(&inst)?],
        McpSolver::Pareto => mcp::solve_mcp_multicriteria(&inst)?,
    };
    let mut rows = Vec::new();
    for (g, group) in inst.groups.iter().enumerate() {
        for (j, it) in group.items.iter().enumerate() {
            let marks: String = solutions.iter().map(|s| if s.selection[g] == j { '*' } else { '.' }).collect();
            rows.push(vec![
                format!("({},{})", g + 1, j + 1),
                it.id.clone(),
                it.priority.map_or("-".into(), |r| r.to_string()),
                fmt_round(&it.weight, 1),
                qs(&it.profits),
                it.ratio().map_or("-".into(), |r| fmt_trunc(&r, 2)),
                marks,
            ]);
        }
    }
    let mut text = table(&["(i,j)", "item", "r", "a", "c", "c/a", "selected"], &rows);
    for s in &solutions {
        text.push_str(&format!(
            "selection {}: profit ({}), weight {} <= {}\n",
            inst.ids(s).join("*"),
            qs(&s.profit),
            fmt_q(&s.weight),
            fmt_q(&budget)
        ));
    }
    let j = json!({
        "budget": fmt_q(&budget),
        "items": inst.groups.iter().flat_map(|g| g.items.iter().map(move |it| json!({
            "group": g.id, "id": it.id, "priority": it.priority,
            "weight": fmt_q(&it.weight), "profit": it.profits.iter().map(fmt_q).collect::<Vec<_>>(),
        }))).collect::<Vec<_>>(),
        "solutions": solutions.iter().map(|s| json!({
            "selection": inst.ids(s), "profit": s.profit.iter().map(fmt_q).collect::<Vec<_>>(), "weight": fmt_q(&s.weight),
        })).collect::<Vec<_>>(),
    });
    Ok((text, j))
}

fn cmd_qap(m: &Morphology, budget: Q, solver: QapSolver, front: bool, at_most_one: bool) -> Out {
    if front {
        let inst = qap::derive_qap_multicriteria(m, budget, at_most_one)?;
        let p = qap::solve_qap_pareto(&inst)?;
        let rows: Vec<Vec<String>> =
            p.front.iter().map(|x| vec![inst.ids(&x.selection).join("*"), format!("({})", qs(&x.vector)), fmt_q(&x.weight)]).collect();
        let text = format!(
            "{} efficient selections; component optima ({})\n{}",
            p.front.len(),
            qs(&p.extremes),
            table(&["selection", "vector", "weight"], &rows)
        );
        let j = json!({"extremes": p.extremes.iter().map(fmt_q).collect::<Vec<_>>(), "front": p.front.iter().map(|x| json!({
            "selection": inst.ids(&x.selection), "vector": x.vector.iter().map(fmt_q).collect::<Vec<_>>(), "weight": fmt_q(&x.weight),
        })).collect::<Vec<_>>()});
        return Ok((text, j));
    }
    let inst = qap::derive_qap_instance(m, budget, at_most_one)?;
    let s = match solver {
        QapSolver::Exact => qap::solve_qap_exact(&inst)?,
        QapSolver::Greedy => qap::solve_qap_greedy(&inst)?,
    };
    let text = format!(
        "selection {}: objective {}, weight {} <= {}\n",
        inst.ids(&s.selection).join("*"),
        fmt_q(&s.objective),
        fmt_q(&s.weight),
        fmt_q(&budget)
    );
    let j = json!({"selection": inst.ids(&s.selection), "objective": fmt_q(&s.objective), "weight": fmt_q(&s.weight)});
    Ok((text, j))
}

fn solutions_out(m: &Morphology, head: String, sols: &[Solution]) -> (String, Value) {
    let rows: Vec<Vec<String>> =
        sols.iter().enumerate().map(|(i, s)| vec![(i + 1).to_string(), s.composition.label(m), s.quality.to_string()]).collect();
    let text = format!("{head}\n{}", table(&["#", "composition", "quality"], &rows));
    let j = json!({"solutions": sols.iter().map(|s| json!({
        "composition": ids_json(m, &s.composition), "quality": s.quality,
    })).collect::<Vec<_>>()});
    (text, j)
}

fn cmd_hmmd(m: &Morphology, scope: &Option<String>, min_w: u8, no_prune: bool) -> Out {
    let opts = HmmdOptions { min_w, prune: !no_prune, cap: cap_from_env(DEFAULT_CAP) };
    let sols = match scope {
        Some(s) => hmmd::solve_morphological_clique(m, s, &opts)?,
        None => hmmd::solve_hierarchical(m, &opts)?,
    };
    Ok(solutions_out(m, format!("{} solutions", sols.len()), &sols))
}

fn cmd_fuzzy(m: &Morphology, scope: &Option<String>, case: u8, alpha: Q, pref: PreferenceArg, min_w: u8) -> Out {
    let opts = FuzzyOptions {
        case: FuzzyCase::from_number(case)?,
        alpha,
        preference: match pref {
            PreferenceArg::Modal => Preference::MaxMembership,
            PreferenceArg::Pessimistic => Preference::Pessimistic,
        },
        min_w,
        cap: cap_from_env(DEFAULT_CAP),
    };
    let decisions = fuzzy::solve_fuzzy(m, scope_of(m, scope), &opts)?;
    let rows: Vec<Vec<String>> = decisions
        .iter()
        .map(|d| vec![d.composition.label(m), d.modal.to_string(), d.pessimistic.to_string(), d.support.len().to_string()])
        .collect();
    let text = format!("{} decisions (case {case})\n{}", decisions.len(), table(&["composition", "modal", "pessimistic", "support"], &rows));
    let j = json!({"case": case, "decisions": decisions.iter().map(|d| json!({
        "composition": ids_json(m, &d.composition),
        "modal": d.modal,
        "pessimistic": d.pessimistic,
        "support": d.support.iter().map(|(q, mu)| json!([q, fmt_q(mu)])).collect::<Vec<_>>(),
    })).collect::<Vec<_>>()});
    Ok((text, j))
}

fn cmd_export(
    m: &Morphology,
    kind: KindArg,
    output: &Option<PathBuf>,
    budget: Option<Q>,
    s: &ScopeArgs,
    at_most_one: bool,
) -> Out {
    let need_budget = || budget.ok_or_else(|| Failure::Usage("--budget is required for this kind".into()));
    let mcp_inst;
    let qap_inst;
    let input = match kind {
        KindArg::Ma => LpInput::Ma { m, scope: scope_of(m, &s.scope), threshold: s.min_level.unwrap_or(1) },
        KindArg::Mcp => {
            mcp_inst = mcp::derive_mcp_instance(m, need_budget()?)?;
            LpInput::Mcp(&mcp_inst)
        }
        KindArg::Qap => {
            qap_inst = qap::derive_qap_instance(m, need_budget()?, at_most_one)?;
            LpInput::Qap(&qap_inst)
        }
    };
    let (lp_text, summary) = lp::lp_text(&input)?;
    let kind_name = match input.kind() {
        LpKind::Ma => "ma",
        LpKind::Mcp => "mcp",
        LpKind::Qap => "qap",
    };
    let j = json!({"kind": kind_name, "variables": summary.variables(), "constraints": summary.constraints});
    match output {
        Some(path) => {
            std::fs::write(path, &lp_text).map_err(Error::from)?;
            let text = format!(
                "wrote {}: {} variables, {} constraints\n",
                path.display(),
                summary.variables(),
                summary.constraints
            );
            Ok((text, j))
        }
        None => Ok((lp_text, j)),
    }
}

fn cmd_report(m: &Morphology, budgets: &[Q]) -> Out {
    let root = m.root_id();
    let level = m.scales.l;
    let comps = enumerate_admissible_capped(m, root, level, cap_from_env(DEFAULT_CAP))?;
    let mut groups: Vec<(String, Vec<Composition>)> = Vec::new();

    if !comps.is_empty() {
        let target = ideal::generate_ideal(m, root, Keying::Priority, &IdealStrategy::BestOfAlternatives)?;
        let ranked = ideal::select_closest(&comps, m, &target, Metric::L2)?;
        let mut keys: Vec<Q> = ranked.iter().map(|r| r.key).collect();
        keys.dedup();
        let cut = keys.get(1).copied().unwrap_or(keys[0]);
        groups.push(("ideal point".into(), ranked.iter().filter(|r| r.key <= cut).map(|r| r.composition.clone()).collect()));
        let front = pareto_set(m, root, &comps, Keying::Priority)?;
        groups.push(("Pareto-based".into(), front.into_iter().map(|x| x.0).collect()));
    }
    if m.mcp.is_some() {
        let mut picked = Vec::new();
        for &b in budgets {
            let inst = mcp::derive_mcp_instance(m, b)?;
            let s = mcp::solve_mcp_greedy(&inst)?;
            picked.push(Composition { scope: root.to_string(), das: s.selection.iter().enumerate().map(|(p, &j)| m.part_das(p).start + j).collect() });
        }
        groups.push(("multiple choice".into(), picked));
    }
    let hier = hmmd::solve_hierarchical(m, &HmmdOptions { cap: cap_from_env(DEFAULT_CAP), ..HmmdOptions::default() })?;
    groups.push(("HMMD".into(), hier.into_iter().map(|s| s.composition).collect()));

    let mut rows = vec![vec!["basic MA".to_string(), format!("{} admissible at level >= {level}", comps.len()), String::new()]];
    let mut methods = vec![json!({"method": "basic MA", "admissible": comps.len(), "min_level": level})];
    for (name, list) in &groups {
        let mut entries = Vec::new();
        for (i, c) in list.iter().enumerate() {
            let qv = hmmd::quality_vector(m, c)?;
            rows.push(vec![if i == 0 { name.clone() } else { String::new() }, c.label(m), qv.to_string()]);
            entries.push(json!({"composition": ids_json(m, c), "quality": qv}));
        }
        methods.push(json!({"method": name, "solutions": entries}));
    }
    Ok((table(&["method", "composite DAs", "quality vector"], &rows), json!({"methods": methods})))
}

fn dispatch(cli: &Cli) -> Out {
    let fill = cli.fill_missing;
    match &cli.cmd {
        Cmd::Validate(i) => cmd_validate(&load(i, fill)?),
        Cmd::Rank { input, method, concordance } => cmd_rank(&load(input, fill)?, *method, *concordance),
        Cmd::Enumerate { input, scope } => cmd_enumerate(&load(input, fill)?, scope),
        Cmd::Ideal { input, scope, metric, keying, strategy, ideal, top } => {
            cmd_ideal(&load(input, fill)?, scope, *metric, *keying, *strategy, ideal, *top)
        }
        Cmd::Pareto { input, scope, keying } => cmd_pareto(&load(input, fill)?, scope, *keying),
        Cmd::Mcp { input, budget, solver } => cmd_mcp(&load(input, fill)?, *budget, *solver),
        Cmd::Qap { input, budget, solver, pareto, at_most_one } => {
            cmd_qap(&load(input, fill)?, *budget, *solver, *pareto, *at_most_one)
        }
        Cmd::Hmmd { input, scope, min_w, no_prune } => cmd_hmmd(&load(input, fill)?, scope, *min_w, *no_prune),
        Cmd::HmmdFuzzy { input, scope, case, alpha, preference, min_w } => {
            cmd_fuzzy(&load(input, fill)?, scope, *case, *alpha, *preference, *min_w)
        }
        Cmd::ExportLp { input, kind, output, budget, scope, at_most_one } => {
            cmd_export(&load(input, fill)?, *kind, output, *budget, scope, *at_most_one)
        }
        Cmd::Report { fixture, file, budgets } => {
            let m = match (fixture, file) {
                (Some(name), _) => {
                    let text = crate::fixtures::text(name)?;
                    Morphology::from_json(text, &ValidateOptions { fill_missing: fill })?
                }
                (None, Some(f)) => load(&Input { file: f.clone() }, fill)?,
                (None, None) => return Err(Failure::Usage("report needs --fixture or -f".into())),
            };
            cmd_report(&m, budgets)
        }
    }
}

/// Runs one invocation and returns its exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    64
                }
            };
        }
    };
    let result = match cli.threads {
        Some(0) => Err(Failure::Usage("--threads must be positive".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(Failure::Usage(e.to_string())),
        },
        None => dispatch(&cli),
    };
    match result {
        Ok((text, j)) => {
            let written = if cli.json {
                serde_json::to_string_pretty(&j).map(|s| writeln!(out, "{s}"))
            } else {
                Ok(write!(out, "{text}"))
            };
            match written {
                Ok(Ok(())) => 0,
                _ => 2,
            }
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            64
        }
        Err(Failure::Lib(e)) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn main_with_stdio<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(args, &mut stdout.lock(), &mut stderr.lock())
}
