//! Efficient compositions under priority-vector dominance.

use morphsynth::enumerate::enumerate_admissible;
use morphsynth::fixtures;
use morphsynth::ideal::{component_directions, estimate_vector, Keying};
use morphsynth::pareto::pareto_filter;

fn main() -> morphsynth::Result<()> {
    let m = fixtures::gsm();
    let listed = fixtures::gsm_listed(&m)?;
    let found = enumerate_admissible(&m, "S", 3)?;
    let dirs = component_directions(&m, "S", Keying::Priority)?;

    for (name, set) in [("listed 45", &listed), ("enumerated", &found)] {
        let items: Vec<_> = set
            .iter()
            .map(|c| Ok((c.label(&m), estimate_vector(&m, c, Keying::Priority)?.components)))
            .collect::<morphsynth::Result<_>>()?;
        println!("{name}: {:?}", pareto_filter(&items, &dirs)?);
    }
    Ok(())
}
