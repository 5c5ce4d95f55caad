mod common;

use std::collections::{BTreeMap, BTreeSet};

use morphsynth::enumerate::enumerate_admissible;
use morphsynth::hmmd::{integrate_quality, quality_covers, quality_dominates, solve_morphological_clique, HmmdOptions, QualityVector};
use morphsynth::lp::{lp_text, parse_lp, x_name, LpInput};
use morphsynth::mcp::{solve_mcp_exact, solve_mcp_greedy, solve_mcp_multicriteria, McpInstance};
use morphsynth::model::{Criterion, DesignAlternative, Direction, Morphology, Part, ValidateOptions};
use morphsynth::pareto::{dominates, pareto_indices, pareto_scan};
use morphsynth::qap::{qap_objective, solve_qap_exact, solve_qap_greedy, solve_qap_pareto, QapInstance};
use morphsynth::ranking::{rank_alternatives, RankingConfig, RankingMethod};
use morphsynth::rational::{fmt_q, parse_q};
use morphsynth::{Error, Q};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn with_second_profit(inst: &mut McpInstance, r: &mut ChaCha8Rng) {
    for g in &mut inst.groups {
        for it in &mut g.items {
            it.profits.push(Q::from_integer(r.gen_range(0..=9)));
        }
    }
}

fn with_pairs(inst: &McpInstance, r: &mut ChaCha8Rng, at_most_one: bool) -> QapInstance {
    let mut qi = QapInstance::from_mcp(inst, at_most_one);
    for g in 0..inst.groups.len() {
        for h in g + 1..inst.groups.len() {
            for j in 0..inst.groups[g].items.len() {
                for k in 0..inst.groups[h].items.len() {
                    if r.gen_bool(0.4) {
                        qi.set_pair((g, j), (h, k), Q::from_integer(r.gen_range(1..=3)));
                    }
                }
            }
        }
    }
    qi
}

fn census(k: usize, parts: u32) -> impl Strategy<Value = Vec<u32>> {
    proptest::collection::vec(0..=parts, k).prop_filter_map("census", move |mut v| {
        let s: u32 = v.iter().sum();
        if s > parts {
            return None;
        }
        v[0] += parts - s;
        Some(v)
    })
}

fn quality(k: usize, parts: u32) -> impl Strategy<Value = QualityVector> {
    (1u8..=3, census(k, parts)).prop_map(|(w, n)| QualityVector::new(w, n))
}

fn pair(v: &QualityVector) -> (u8, Vec<u32>) {
    (v.w, v.n.clone())
}

fn ranking_part(rows: &[Vec<i64>], dirs: &[Direction]) -> Part {
    Part {
        id: "P".into(),
        label: String::new(),
        criteria: dirs
            .iter()
            .enumerate()
            .map(|(i, d)| Criterion {
                id: format!("c{i}"),
                weight: Q::new(1, dirs.len() as i64),
                direction: *d,
                scale_note: String::new(),
                range: None,
            })
            .collect(),
        alternatives: rows
            .iter()
            .enumerate()
            .map(|(i, r)| DesignAlternative {
                id: format!("d{i}"),
                part_id: "P".into(),
                label: String::new(),
                estimates: r.iter().map(|&x| Q::from_integer(x)).collect(),
                priority: None,
                fuzzy_priority: None,
            })
            .collect(),
    }
}

fn direction() -> impl Strategy<Value = Direction> {
    prop_oneof![Just(Direction::Maximize), Just(Direction::Minimize)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn greedy_is_feasible_and_bounded_by_exact(seed in any::<u64>()) {
        let inst = common::random_mcp(&mut rng(seed));
        match (solve_mcp_greedy(&inst), solve_mcp_exact(&inst)) {
            (Ok(g), Ok(e)) => {
                prop_assert!(g.weight <= inst.budget);
                prop_assert!(e.weight <= inst.budget);
                prop_assert!(g.profit[0] <= e.profit[0]);
                prop_assert_eq!(inst.evaluate(&g.selection), g.clone());
            }
            (Err(Error::Infeasible(_)), Err(Error::Infeasible(_))) => {
                prop_assert!(common::mcp_feasible(&inst).is_empty());
            }
            (Err(Error::Infeasible(_)), Ok(_)) => {}
            (g, e) => prop_assert!(false, "greedy {:?} exact {:?}", g, e),
        }
    }

    #[test]
    fn multicriteria_front_matches_feasible_front(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut inst = common::random_mcp(&mut r);
        with_second_profit(&mut inst, &mut r);
        let feasible = common::mcp_feasible(&inst);
        match solve_mcp_multicriteria(&inst) {
            Ok(front) => {
                let got: BTreeSet<Vec<Q>> = front.iter().map(|s| s.profit.clone()).collect();
                prop_assert_eq!(got.len(), front.len());
                for s in &front {
                    prop_assert!(s.weight <= inst.budget);
                    prop_assert_eq!(&inst.evaluate(&s.selection), s);
                }
                let vectors: Vec<Vec<Q>> = feasible.iter().map(|f| f.1.clone()).collect();
                let dirs = [Direction::Maximize; 2];
                let want: BTreeSet<Vec<Q>> =
                    common::brute_pareto(&vectors, &dirs).into_iter().map(|i| vectors[i].clone()).collect();
                prop_assert_eq!(got, want);
            }
            Err(Error::Infeasible(_)) => prop_assert!(feasible.is_empty()),
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn qap_exact_matches_brute_force(seed in any::<u64>(), at_most_one in any::<bool>()) {
        let mut r = rng(seed);
        let inst = common::random_mcp(&mut r);
        let qi = with_pairs(&inst, &mut r, at_most_one);
        let oracle = common::brute_qap(&qi);
        match solve_qap_exact(&qi) {
            Ok(s) => {
                prop_assert_eq!(Some(s.objective), oracle);
                prop_assert!(s.weight <= qi.budget);
                let picks: Vec<(usize, usize)> =
                    s.selection.iter().enumerate().filter_map(|(g, j)| j.map(|j| (g, j))).collect();
                prop_assert_eq!(qap_objective(&qi, &picks).unwrap(), s.objective);
                if !at_most_one {
                    prop_assert!(s.selection.iter().all(Option::is_some));
                }
                if let Ok(g) = solve_qap_greedy(&qi) {
                    prop_assert!(g.weight <= qi.budget);
                    prop_assert!(g.objective <= s.objective);
                }
            }
            Err(Error::Infeasible(_)) => prop_assert_eq!(oracle, None),
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn qap_pareto_members_are_feasible_and_undominated(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut inst = common::random_mcp(&mut r);
        inst.groups.truncate(3);
        let qi = with_pairs(&inst, &mut r, false);
        if let Ok(p) = solve_qap_pareto(&qi) {
            let dirs = vec![Direction::Maximize; p.front[0].vector.len()];
            for a in &p.front {
                prop_assert!(a.weight <= qi.budget);
                for b in &p.front {
                    prop_assert!(!dominates(&b.vector, &a.vector, &dirs).unwrap());
                }
                for (c, e) in a.vector.iter().zip(&p.extremes) {
                    prop_assert!(c <= e);
                }
            }
        }
    }

    #[test]
    fn enumeration_matches_brute_force(seed in any::<u64>(), min_level in 1u8..=3) {
        let m = common::random_morphology(&mut rng(seed), false);
        let got: Vec<Vec<usize>> =
            enumerate_admissible(&m, "S", min_level).unwrap().into_iter().map(|c| c.das).collect();
        prop_assert_eq!(common::sorted(got), common::sorted(common::brute_admissible(&m, "S", min_level)));
    }

    #[test]
    fn clique_members_are_mutually_incomparable(seed in any::<u64>()) {
        let m = common::random_morphology(&mut rng(seed), false);
        let sols = solve_morphological_clique(&m, "S", &HmmdOptions::default()).unwrap();
        for a in &sols {
            prop_assert_eq!(pair(&a.quality), (common::oracle_w(&m, &a.composition.das), common::oracle_census(&m, &a.composition.das)));
            for b in &sols {
                prop_assert!(!quality_dominates(&a.quality, &b.quality).unwrap());
            }
        }
    }

    #[test]
    fn instance_json_round_trips(seed in any::<u64>(), fuzzy in any::<bool>()) {
        let m = common::random_morphology(&mut rng(seed), fuzzy);
        let text = m.to_document().to_json();
        let back = Morphology::from_json(&text, &ValidateOptions::default()).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn mcp_lp_feasible_set_is_the_budget_set(seed in any::<u64>()) {
        let mut inst = common::random_mcp(&mut rng(seed));
        inst.groups.truncate(3);
        let (text, summary) = lp_text(&LpInput::Mcp(&inst)).unwrap();
        let model = parse_lp(&text).unwrap();
        prop_assert_eq!(model.variables().len(), summary.variables());
        let sizes: Vec<usize> = inst.groups.iter().map(|g| g.items.len()).collect();
        let mut best: Option<(Q, Q)> = None;
        for t in common::tuples(&sizes) {
            let values: BTreeMap<String, Q> = t
                .iter()
                .enumerate()
                .map(|(g, &j)| (x_name(&inst.groups[g].id, &inst.groups[g].items[j].id), Q::from_integer(1)))
                .collect();
            let s = inst.evaluate(&t);
            prop_assert_eq!(model.is_satisfied(&values), s.weight <= inst.budget);
            if s.weight <= inst.budget {
                let obj = model.objective_value(&values);
                if let Some((bo, bp)) = best {
                    prop_assert_eq!(obj.cmp(&bo), s.profit[0].cmp(&bp));
                }
                best = Some((obj, s.profit[0]));
            }
        }
    }
}

proptest! {
    #[test]
    fn dominance_is_a_strict_partial_order(a in quality(3, 4), b in quality(3, 4), c in quality(3, 4)) {
        let d = |x: &QualityVector, y: &QualityVector| quality_dominates(x, y).unwrap();
        prop_assert!(!d(&a, &a));
        prop_assert!(!(d(&a, &b) && d(&b, &a)));
        if d(&a, &b) && d(&b, &c) {
            prop_assert!(d(&a, &c));
        }
        prop_assert_eq!(d(&a, &b), common::oracle_dominates(&pair(&a), &pair(&b)));
        if quality_covers(&a, &b).unwrap() {
            prop_assert!(d(&a, &b));
        }
    }

    #[test]
    fn integration_is_monotone(a in quality(3, 3), b in quality(3, 3), c in quality(3, 2)) {
        let ac = integrate_quality(&a, &c).unwrap();
        let bc = integrate_quality(&b, &c).unwrap();
        prop_assert_eq!(&ac, &integrate_quality(&c, &a).unwrap());
        prop_assert_eq!(ac.parts(), a.parts() + c.parts());
        if common::oracle_weakly_better(&pair(&a), &pair(&b)) {
            prop_assert!(common::oracle_weakly_better(&pair(&ac), &pair(&bc)));
        }
    }

    #[test]
    fn decimal_text_round_trips(n in -100_000i64..100_000, d in 1i64..2_000) {
        let v = Q::new(n, d);
        prop_assert_eq!(parse_q(&fmt_q(&v)), Some(v));
    }

    #[test]
    fn pareto_routes_agree(vs in proptest::collection::vec(proptest::collection::vec(0i64..6, 3), 1..30), dirs in proptest::collection::vec(direction(), 3)) {
        let fast = pareto_indices(&vs, &dirs).unwrap();
        prop_assert_eq!(&fast, &pareto_scan(&vs, &dirs).unwrap());
        prop_assert_eq!(fast, common::brute_pareto(&vs, &dirs));
    }

    #[test]
    fn pareto_2d_route_agrees(vs in proptest::collection::vec(proptest::collection::vec(0i64..8, 2), 1..40), dirs in proptest::collection::vec(direction(), 2)) {
        prop_assert_eq!(pareto_indices(&vs, &dirs).unwrap(), common::brute_pareto(&vs, &dirs));
    }

    #[test]
    fn ranking_respects_dominance(
        rows in proptest::collection::vec(proptest::collection::vec(0i64..5, 3), 2..8),
        dirs in proptest::collection::vec(direction(), 3),
        k in 1u8..=4,
        outranking in any::<bool>(),
    ) {
        let part = ranking_part(&rows, &dirs);
        let method = if outranking { RankingMethod::WeightedOutranking } else { RankingMethod::DominanceLayers };
        let cfg = RankingConfig { method, k, ..RankingConfig::default() };
        let ranks = rank_alternatives(&part, &cfg).unwrap();
        let r: Vec<u8> = ranks.values().copied().collect();
        prop_assert!(r.iter().all(|&x| (1..=k).contains(&x)));
        prop_assert!(r.contains(&1));
        for a in 0..rows.len() {
            for b in 0..rows.len() {
                if dominates(&rows[a], &rows[b], &dirs).unwrap() {
                    prop_assert!(r[a] <= r[b]);
                    if !outranking && r.iter().all(|&x| x < k) {
                        prop_assert!(r[a] < r[b]);
                    }
                }
            }
        }
    }
}
