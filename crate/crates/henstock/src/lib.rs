//! Computable gauge integration on the unit interval.

pub mod bairefun;
pub mod cantor;
pub mod cli;
pub mod codings;
pub mod exactreal;
pub mod contfun;
pub mod cousin;
pub mod dsl;
pub mod intervals;
pub mod logic;
pub mod machine;
pub mod partition;
