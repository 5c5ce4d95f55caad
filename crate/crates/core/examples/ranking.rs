use morphsynth::fixtures;
use morphsynth::ranking::{rank_alternatives, RankingConfig, RankingMethod};

fn main() -> morphsynth::Result<()> {
    let m = fixtures::gsm();
    let layers = RankingConfig::default();
    let outrank = RankingConfig { method: RankingMethod::WeightedOutranking, ..RankingConfig::default() };
    for part in &m.parts {
        let a = rank_alternatives(part, &layers)?;
        let b = rank_alternatives(part, &outrank)?;
        for da in &part.alternatives {
            println!("{:<3} given {:?} layers {} outranking {}", da.id, da.priority.unwrap_or(0), a[&da.id], b[&da.id]);
        }
    }
    Ok(())
}
