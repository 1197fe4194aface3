//! Locally recoverable codes from Deligne-Lusztig curves and their cyclic
//! extensions: point enumeration, function spaces, evaluation codes, recovery
//! structures and parameter analysis.

pub mod analysis;
pub mod codes;
pub mod construct;
pub mod curves;
pub mod error;
pub mod funcspace;
pub mod gf;
pub mod locality;
pub mod matrix;

pub use analysis::{DistanceReport, ParamRecord};
pub use codes::{evaluate_code, product_code, LinearCode};
pub use construct::{build, Built, Construction, ConstructionSpec};
pub use curves::{CurveParams, CurvePointSet};
pub use error::{Error, Result};
pub use funcspace::{FunctionSet, FunctionTerm, GoodKind, GoodPolynomial, Var};
pub use gf::{Elem, Field, FieldElement, FieldRef};
pub use locality::{InterpBasis, RecoverySet, RecoveryStructure};
pub use matrix::Matrix;
