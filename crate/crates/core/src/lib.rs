//! Tensor invariants of polynomial vector fields.

pub mod dsl;
pub mod error;
pub mod grading;
pub mod invsearch;
pub mod kovalevskaya;
pub mod linalg;
pub mod oracle;
pub mod poly;
pub mod report;
pub mod resonance;
pub mod spectrum;
pub mod tensor;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/systems.md")]
    mod systems {}
    #[doc = include_str!("../../../book/src/polynomials.md")]
    mod polynomials {}
    #[doc = include_str!("../../../book/src/tensors.md")]
    mod tensors {}
    #[doc = include_str!("../../../book/src/grading.md")]
    mod grading {}
    #[doc = include_str!("../../../book/src/kovalevskaya.md")]
    mod kovalevskaya {}
    #[doc = include_str!("../../../book/src/resonances.md")]
    mod resonances {}
    #[doc = include_str!("../../../book/src/search.md")]
    mod search {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
