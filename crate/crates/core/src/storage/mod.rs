//! Storage substrates for the dynamic structures: a tiered array for low
//! parts and a block arena for the variable-length high parts.

mod blocks;
mod tiered;

pub use blocks::{BlockAddr, BlockId, BlockStore};
pub use tiered::TieredArray;
