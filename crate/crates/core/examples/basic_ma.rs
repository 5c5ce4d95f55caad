//! Admissible compositions of a small binary-compatibility instance, then the
//! GSM network before and after binarization at level 3.

use morphsynth::enumerate::enumerate_admissible;
use morphsynth::fixtures;
use morphsynth::model::binarize_compatibility;

fn main() -> morphsynth::Result<()> {
    let demo = fixtures::ma_demo();
    for c in enumerate_admissible(&demo, demo.root_id(), 1)? {
        println!("demo: {}", c.label(&demo));
    }

    let gsm = fixtures::gsm();
    let binary = gsm.with_compat(binarize_compatibility(&gsm.compat, 3)?)?;
    for scope in ["A", "B", "S"] {
        let n = enumerate_admissible(&binary, scope, 1)?.len();
        println!("{scope}: {n} admissible of {}", gsm.scope_size(scope)?);
    }
    Ok(())
}
