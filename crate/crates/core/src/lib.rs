//! Exact arithmetic, certification and enumeration tools for congruence
//! covers of arithmetic hyperbolic manifolds.
//!
//! The crate is organised bottom-up:
//!
//! * [`quadfield`]: ℚ and quadratic fields, rings of integers.
//! * [`clifford`]: Clifford algebras of diagonal forms and spin elements.
//! * [`congruence`]: principal congruence subgroups and displacement bounds.
//! * [`salem`]: quartic Salem units and level certification for surfaces.
//! * [`kleinian`]: traces, lengths and holonomies in `PSL(2, 𝒪_k)`.
//! * [`census`]: trace censuses and growth tables at bounded height.
//!
//! Enumeration is data-parallel when the `parallel` feature is on; see
//! [`exec::ExecPolicy`].

pub mod census;
pub mod clifford;
pub mod congruence;
pub mod error;
pub mod exec;
pub mod kleinian;
pub mod quadfield;
pub mod report;
pub mod salem;

pub use error::{Error, Result};
pub use quadfield::{FieldDescriptor, FieldElement, IntegerRingElement};
