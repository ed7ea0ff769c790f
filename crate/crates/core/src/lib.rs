//! Exact arithmetic in the quantum matrix algebra `O_q(M_n)`, its quantum
//! torus, the deleting-derivations tower linking them, and the first
//! Hochschild cohomology of `O_q(M_n)`, `O_q(GL_n)` and `O_q(SL_n)`.
//!
//! Scalars live in `Q(q)` with `q` transcendental; see [`RationalFunction`].

pub mod check;
pub mod derivations;
pub mod error;
pub mod kernel;
pub mod qmatrix;
pub mod qtorus;
pub mod terms;
pub mod tower;

pub use derivations::{DerivationSpec, MatrixDerivation, TorusDerivation};
pub use error::{QmatError, Result};
pub use kernel::{build_context, AlgebraContext, GeneratorIndex, IntPoly, RationalFunction, StepIndex};
pub use qmatrix::{qdet, qminor, ymul, MatrixAlgebraElement, MinorSpec};
pub use qtorus::{torus_mul, TorusElement};
pub use terms::ExponentVector;
pub use tower::{ExponentBox, StepExpansion, Tower};
