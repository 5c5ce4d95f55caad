//! Combinatorial synthesis of modular systems.
//!
//! A system is a tree of parts; each part offers design alternatives, and
//! pairs of alternatives carry ordinal compatibility levels. The crate selects
//! one alternative per part with several methods that can be run side by side:
//!
//! * [`enumerate`]: all admissible compositions
//! * [`ideal`]: closeness to an ideal estimate vector
//! * [`pareto`]: efficient compositions under vector dominance
//! * [`mcp`]: multiple-choice knapsack (greedy, exact, multicriteria)
//! * [`qap`]: quadratic assignment with pairwise profits
//! * [`hmmd`]: hierarchical design over quality lattices
//! * [`fuzzy`]: the same with fuzzy estimates
//! * [`lp`]: 0-1 programs in LP text format
//!
//! ```
//! use morphsynth::{enumerate::enumerate_admissible, fixtures};
//!
//! let m = fixtures::toy();
//! assert_eq!(m.space_size(), 18);
//! assert!(!enumerate_admissible(&m, "S", 1).unwrap().is_empty());
//! ```

pub mod cli;
pub mod enumerate;
pub mod error;
pub mod fixtures;
pub mod fuzzy;
pub mod hmmd;
pub mod ideal;
pub mod instance;
pub mod lp;
pub mod mcp;
pub mod model;
pub mod pareto;
pub mod qap;
pub mod ranking;
pub mod rational;

pub use error::{Error, Result};
pub use model::{Composition, Morphology};
pub use rational::Q;
