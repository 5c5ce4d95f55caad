//! Bundled instances.

use crate::error::{Error, Result};
use crate::instance::InstanceDocument;
use crate::model::{validate_morphology, Composition, Morphology};

/// GSM network: five parts, 3000 compositions.
pub const GSM: &str = include_str!("../fixtures/gsm.json");
/// Three parts X, Y, Z with 3, 2, 3 alternatives.
pub const TOY_XYZ: &str = include_str!("../fixtures/toy_xyz.json");
/// A, B, C with fuzzy priorities and compatibilities.
pub const FUZZY_ABC: &str = include_str!("../fixtures/fuzzy_abc.json");
/// Binary compatibility demo with a single admissible composition.
pub const MA_DEMO: &str = include_str!("../fixtures/ma_demo.json");
/// Demo variant with two admissible compositions and illustrative priorities.
pub const MA_DEMO_IDEAL: &str = include_str!("../fixtures/ma_demo_ideal.json");
/// Demo variant with three admissible compositions.
pub const MA_DEMO_PARETO: &str = include_str!("../fixtures/ma_demo_pareto.json");

pub const NAMES: [&str; 6] = ["gsm", "toy_xyz", "fuzzy_abc", "ma_demo", "ma_demo_ideal", "ma_demo_pareto"];

pub fn text(name: &str) -> Result<&'static str> {
    Ok(match name {
        "gsm" => GSM,
        "toy_xyz" | "toy" => TOY_XYZ,
        "fuzzy_abc" | "fuzzy" => FUZZY_ABC,
        "ma_demo" => MA_DEMO,
        "ma_demo_ideal" => MA_DEMO_IDEAL,
        "ma_demo_pareto" => MA_DEMO_PARETO,
        _ => return Err(Error::Unknown { kind: "fixture", id: name.to_string() }),
    })
}

pub fn document(name: &str) -> Result<InstanceDocument> {
    InstanceDocument::from_json(text(name)?)
}

pub fn load(name: &str) -> Result<Morphology> {
    validate_morphology(&document(name)?)
}

pub fn gsm_document() -> InstanceDocument {
    document("gsm").expect("bundled fixture parses")
}

pub fn gsm() -> Morphology {
    load("gsm").expect("bundled fixture is valid")
}

pub fn toy() -> Morphology {
    load("toy_xyz").expect("bundled fixture is valid")
}

pub fn fuzzy_abc() -> Morphology {
    load("fuzzy_abc").expect("bundled fixture is valid")
}

pub fn ma_demo() -> Morphology {
    load("ma_demo").expect("bundled fixture is valid")
}

/// Part-A compositions admitted at level 3 in the worked GSM analysis.
pub const GSM_LISTED_A: [[&str; 2]; 9] = [
    ["M1", "L1"],
    ["M1", "L4"],
    ["M2", "L2"],
    ["M3", "L3"],
    ["M4", "L2"],
    ["M4", "L3"],
    ["M5", "L1"],
    ["M5", "L2"],
    ["M5", "L4"],
];

/// Part-B compositions admitted at level 3 in the worked GSM analysis.
pub const GSM_LISTED_B: [[&str; 3]; 5] = [
    ["V1", "U5", "T1"],
    ["V2", "U2", "T4"],
    ["V2", "U3", "T4"],
    ["V3", "U2", "T4"],
    ["V3", "U3", "T4"],
];

/// The 45 crossings of the listed A and B compositions, `S1..S45` with
/// `S(9(b-1) + a) = Aa * Bb`.
pub fn gsm_listed(m: &Morphology) -> Result<Vec<Composition>> {
    let mut out = Vec::with_capacity(45);
    for b in &GSM_LISTED_B {
        for a in &GSM_LISTED_A {
            let ids: Vec<&str> = a.iter().chain(b.iter()).copied().collect();
            out.push(m.composition(m.root_id(), &ids)?);
        }
    }
    Ok(out)
}
