//! The guide in `book/` as doc-tests: one module per chapter, so a failing
//! listing is easy to place.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/loops.md")]
pub mod loops {}
#[doc = include_str!("../../../book/src/subloops.md")]
pub mod subloops {}
#[doc = include_str!("../../../book/src/structure.md")]
pub mod structure {}
#[doc = include_str!("../../../book/src/multiplication-groups.md")]
pub mod multiplication_groups {}
#[doc = include_str!("../../../book/src/minimum-condition.md")]
pub mod minimum_condition {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
