use morphsynth::fixtures;
use morphsynth::qap::{derive_qap_instance, derive_qap_multicriteria, solve_qap_exact, solve_qap_greedy, solve_qap_pareto};
use morphsynth::rational::{fmt_q, q};

fn main() -> morphsynth::Result<()> {
    let m = fixtures::gsm();
    let inst = derive_qap_instance(&m, q(15), false)?;
    for (name, s) in [("exact", solve_qap_exact(&inst)?), ("greedy", solve_qap_greedy(&inst)?)] {
        println!("{name:<6} {} objective {}", inst.ids(&s.selection).join(" "), fmt_q(&s.objective));
    }

    let multi = derive_qap_multicriteria(&m, q(15), true)?;
    let p = solve_qap_pareto(&multi)?;
    println!("{} efficient selections, component optima {:?}", p.front.len(), p.extremes.iter().map(fmt_q).collect::<Vec<_>>());
    Ok(())
}
