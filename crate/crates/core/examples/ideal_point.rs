use morphsynth::enumerate::enumerate_admissible;
use morphsynth::fixtures;
use morphsynth::ideal::{generate_ideal, select_closest, IdealStrategy, Keying, Metric};

fn main() -> morphsynth::Result<()> {
    let m = fixtures::gsm();
    let candidates = enumerate_admissible(&m, "S", 3)?;
    let ideal = generate_ideal(&m, "S", Keying::Priority, &IdealStrategy::BestOfAlternatives)?;

    for metric in [Metric::L2, Metric::L1, Metric::Chebyshev] {
        let ranked = select_closest(&candidates, &m, &ideal, metric)?;
        println!("{metric:?}");
        for r in ranked.iter().take(4) {
            println!("  {:<16} {:.4}{}", r.composition.label(&m), r.distance, if r.tied { " (tie)" } else { "" });
        }
    }

    // criteria keying: every estimate of every part, best value per component
    let by_criteria = generate_ideal(&m, "S", Keying::Criteria, &IdealStrategy::BestOfScale)?;
    let best = &select_closest(&candidates, &m, &by_criteria, Metric::L2)?[0];
    println!("closest on raw criteria: {}", best.composition.label(&m));
    Ok(())
}
