use morphsynth::fixtures;
use morphsynth::fuzzy::{aggregate_priority, solve_fuzzy, FuzzyCase, FuzzyOptions, Preference};
use morphsynth::rational::{fmt_q, Q};

fn main() -> morphsynth::Result<()> {
    let m = fixtures::fuzzy_abc();
    for da in &m.parts[0].alternatives {
        if let Some(mu) = &da.fuzzy_priority {
            println!("{} aggregates to priority {}", da.id, aggregate_priority(mu)?);
        }
    }

    for case in [FuzzyCase::Crisp, FuzzyCase::FuzzyCompatibility, FuzzyCase::FuzzyPriority, FuzzyCase::Full] {
        for preference in [Preference::MaxMembership, Preference::Pessimistic] {
            let opts = FuzzyOptions { case, preference, alpha: Q::new(1, 10), ..FuzzyOptions::default() };
            let out = solve_fuzzy(&m, m.root_id(), &opts)?;
            println!("{case:?} / {preference:?}: {} decisions", out.len());
            for d in out.iter().take(3) {
                let top = d.support.first().map(|(v, mu)| format!("{v} @ {}", fmt_q(mu))).unwrap_or_default();
                println!("  {} modal {} pessimistic {} [{top}]", d.composition.label(&m), d.modal, d.pessimistic);
            }
        }
    }
    Ok(())
}
