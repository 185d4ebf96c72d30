//! Exact symbolic kernel for germs of regular holonomic distributions in one
//! complex variable: V-bifiltration, Mellin pole ledgers, the `L_alpha`
//! functionals, nearby/vanishing cycle quivers, sesquilinear pairings and
//! pole orders of `|f|^(2s)` for monomial `f`.

pub mod barlet;
pub mod error;
pub mod gen;
pub mod germ;
pub mod io;
pub mod mellin;
pub mod nilalg;
pub mod parse;
pub mod quiver;
pub mod scalar;
pub mod selftest;
pub mod sesqui;
pub mod vfilt;

pub use error::{Error, Result};
pub use germ::{make_u, DeltaTerm, Germ, ModMonomial, Side};
pub use mellin::PoleLedger;
pub use nilalg::{Filtration, Mat, Subspace};
pub use quiver::{ExtendedModule, VGradedModule};
pub use scalar::{cx_cmp, cx_floor, GaussianRational, Scalar};
pub use sesqui::{DistPairing, GradedPairing};
pub use vfilt::BiOrder;
