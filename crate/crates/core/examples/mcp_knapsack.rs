//! Knapsack view of the GSM network: greedy against exact, then the
//! two-criteria frontier.

use morphsynth::fixtures;
use morphsynth::mcp::{
    derive_mcp_instance, derive_mcp_multicriteria, solve_mcp_exact, solve_mcp_greedy, solve_mcp_multicriteria,
};
use morphsynth::rational::{fmt_q, q};

fn main() -> morphsynth::Result<()> {
    let m = fixtures::gsm();
    for b in [12, 14, 15, 20] {
        let inst = derive_mcp_instance(&m, q(b))?;
        let g = solve_mcp_greedy(&inst)?;
        let e = solve_mcp_exact(&inst)?;
        println!(
            "b={b:>2}  greedy {} p={} w={}  exact {} p={} w={}",
            inst.ids(&g).join(" "),
            fmt_q(&g.profit[0]),
            fmt_q(&g.weight),
            inst.ids(&e).join(" "),
            fmt_q(&e.profit[0]),
            fmt_q(&e.weight)
        );
    }

    let inst = derive_mcp_multicriteria(&m, q(15))?;
    for s in solve_mcp_multicriteria(&inst)? {
        let p: Vec<_> = s.profit.iter().map(fmt_q).collect();
        println!("front {} ({})", inst.ids(&s).join(" "), p.join(", "));
    }
    Ok(())
}
