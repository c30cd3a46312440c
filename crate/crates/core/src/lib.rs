//! Exact symbolic kernel for Chern–Simons forms, transgression forms, the
//! Cartan homotopy operator and gauged Wess–Zumino–Witten decompositions of
//! Poincaré and AdS gauge theories, with an independent jet-evaluation
//! oracle.

pub mod coset;
pub mod form;
pub mod gravity;
pub mod homotopy;
pub mod indexed;
pub mod jet;
pub mod lie;
pub mod lieform;
pub mod scalar;
pub mod tensor;
pub mod verify;

mod error;

pub use error::Error;
