//! Graph-concatenated codes over certified dispersers: construction,
//! unique and list decoding, plurality analysis and a trial harness.

pub mod bigraph;
pub mod error;
pub mod extremal;
pub mod field;
pub mod graphcode;
pub mod harness;
pub mod mothercode;
pub mod plurality;
pub mod rng;

pub use bigraph::BipartiteGraph;
pub use error::{Error, Result};
pub use extremal::{Certificate, DisperserKind, DisperserSpec, Verdict};
pub use field::Symbol;
pub use graphcode::{FoldedCode, GraphCode, LeftWord, ReceivedWord};
pub use mothercode::{ExpanderCode, LinearCode, MotherCode};
