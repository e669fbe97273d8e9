//! Location choice among firms that differ in production inefficiency,
//! solved by iterated elimination of never-best responses.
//!
//! * [`market`]: consumer allocation and market shares for a location profile.
//! * [`reaction`]: closed-form best responses for two firms and three symmetric firms.
//! * [`elimination`]: the round-by-round rationalizable sets and their limits.
//! * [`oracle`]: brute-force grid counterparts used to cross-check the above.
//! * [`cli`]: the `hotelling` command line front end.

pub mod cli;
pub mod elimination;
pub mod exec;
pub mod market;
pub mod oracle;
pub mod reaction;

pub use exec::Exec;
pub use market::{solve_cuts, LocationProfile, MarketError, MarketOutcome, ModelParams};
