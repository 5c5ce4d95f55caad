//! Quality-vector synthesis: a flat clique on a toy system and the
//! bottom-up run over the GSM tree.

use morphsynth::fixtures;
use morphsynth::hmmd::{integrate_quality, solve_hierarchical, solve_morphological_clique, HmmdOptions};

fn main() -> morphsynth::Result<()> {
    let opts = HmmdOptions::default();

    let toy = fixtures::toy();
    for s in solve_morphological_clique(&toy, toy.root_id(), &opts)? {
        println!("toy {} {}", s.composition.label(&toy), s.quality);
    }

    let gsm = fixtures::gsm();
    let a = solve_morphological_clique(&gsm, "A", &opts)?;
    let b = solve_morphological_clique(&gsm, "B", &opts)?;
    println!("A: {} solutions, B: {} solutions", a.len(), b.len());
    println!("A1 + B1 integrates to {}", integrate_quality(&a[0].quality, &b[0].quality)?);
    for s in solve_hierarchical(&gsm, &opts)? {
        println!("S {} {}", s.composition.label(&gsm), s.quality);
    }
    Ok(())
}
