//! Succinct ordered sets of integers built on Elias-Fano encoding.
//!
//! * [`EliasFano`]: static compressed sequence with O(1) access and
//!   predecessor search inside a high-bit bucket.
//! * [`SampledPredecessor`]: static set with a y-fast trie over block heads.
//! * [`SmallSetTree`]: dynamic set of EF mini-blocks under a constant-height
//!   counted tree, for sets of polylogarithmic size.
//! * [`DynSet`]: the full dynamic set, a forest of small-set trees with a rank
//!   tree and a y-fast router on top.
//! * [`AppendOnlySet`]: append-only set sealed into differential EF blocks.
//!
//! All sets hold values in `[0, m]` for a universe bound `m` and answer
//! strict predecessor queries (`max { y : y < x }`).

pub mod append;
pub mod bits;
pub mod bitvec;
mod codec;
pub mod counted;
pub mod dynset;
pub mod ef;
pub mod error;
pub mod oracle;
pub mod packed;
pub mod sampled;
pub mod small_set;
pub mod space;
pub mod storage;
pub mod yfast;

pub use append::AppendOnlySet;
pub use bitvec::BitVector;
pub use dynset::DynSet;
pub use ef::EliasFano;
pub use sampled::SampledPredecessor;
pub use small_set::{SmallSetTree, TreeParams};
pub use error::{Error, Result};
pub use oracle::SortedOracle;
pub use space::{b_bits, ef_bits, SpaceReport};
pub use yfast::YFastTrie;
