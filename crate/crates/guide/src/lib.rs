//! Keeps the book honest: every Rust code block under `book/src` compiles and
//! runs as a doctest of this crate, via `cargo test -p spheremax-guide --doc`.
//! One module per chapter so a failing snippet names its chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/operators.md")]
pub mod operators {}

#[doc = include_str!("../../../book/src/resolvent.md")]
pub mod resolvent {}

#[doc = include_str!("../../../book/src/boundary.md")]
pub mod boundary {}

#[doc = include_str!("../../../book/src/spherical.md")]
pub mod spherical {}

#[doc = include_str!("../../../book/src/curves.md")]
pub mod curves {}

#[doc = include_str!("../../../book/src/dirichlet.md")]
pub mod dirichlet {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
