#![doc = include_str!("../../../book/src/introduction.md")]

#[doc = include_str!("../../../book/src/leakage.md")]
pub mod leakage {}

#[doc = include_str!("../../../book/src/detector.md")]
pub mod detector {}

#[doc = include_str!("../../../book/src/forging.md")]
pub mod forging {}

#[doc = include_str!("../../../book/src/evaluation.md")]
pub mod evaluation {}

#[doc = include_str!("../../../book/src/formats.md")]
pub mod formats {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

#[doc = include_str!("../../../book/src/reproducing.md")]
pub mod reproducing {}
