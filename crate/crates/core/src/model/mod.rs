//! Coefficient fields Q±, color functions, the composed field Q_l and the
//! interface geometry.

pub mod interface;
pub mod material;
pub mod profile;

pub use interface::{color, DomainSpec, InterfacePath, PathNode};
pub use material::{refine_extremum, MaterialPair, QlValue, Side, SideProfiles, DEFAULT_SAMPLES};
pub use profile::{smoothstep, CoefficientProfile, Piece, PiecewisePolynomial, Polynomial};
