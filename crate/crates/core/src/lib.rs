//! Fidelity bounds for cloning and teleporting continuous-variable states,
//! with the non-Gaussianity measures that go with them.

pub mod cloner;
pub mod error;
pub mod input;
pub mod iteration;
pub mod lanczos;
pub mod qng;
pub mod specfun;
pub mod states;
pub mod teleport;

pub use error::{Error, Result};
pub use input::{Descriptor, InputState};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/conventions.md")]
    pub mod conventions {}
    #[doc = include_str!("../../../book/src/cloning.md")]
    pub mod cloning {}
    #[doc = include_str!("../../../book/src/teleportation.md")]
    pub mod teleportation {}
    #[doc = include_str!("../../../book/src/non_gaussianity.md")]
    pub mod non_gaussianity {}
    #[doc = include_str!("../../../book/src/iteration.md")]
    pub mod iteration {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
    #[doc = include_str!("../../../book/src/numerics.md")]
    pub mod numerics {}
}
