//! Writes the three LP formulations of the GSM network to the system temp
//! directory and reads each back through the parser.

use std::fs::File;

use morphsynth::fixtures;
use morphsynth::lp::{export_lp, parse_lp, LpInput};
use morphsynth::mcp::derive_mcp_instance;
use morphsynth::qap::derive_qap_instance;
use morphsynth::rational::q;

fn main() -> morphsynth::Result<()> {
    let m = fixtures::gsm();
    let mcp = derive_mcp_instance(&m, q(15))?;
    let qap = derive_qap_instance(&m, q(15), false)?;
    let dir = std::env::temp_dir();

    let inputs = [
        ("gsm_ma.lp", LpInput::Ma { m: &m, scope: "S", threshold: 3 }),
        ("gsm_mcp.lp", LpInput::Mcp(&mcp)),
        ("gsm_qap.lp", LpInput::Qap(&qap)),
    ];
    for (name, input) in &inputs {
        let path = dir.join(name);
        let summary = export_lp(input, &mut File::create(&path)?)?;
        let model = parse_lp(&std::fs::read_to_string(&path)?)?;
        println!("{}: {} vars, {} rows (parsed {})", path.display(), summary.variables(), summary.constraints, model.rows.len());
    }
    Ok(())
}
