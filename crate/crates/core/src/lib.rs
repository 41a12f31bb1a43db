//! Recurrent fractal interpolation curves with function vertical scaling
//! factors, surfaces composed from them, and their box-counting dimension.
//!
//! ```
//! use fractalis::catalog::{lagrange_from_nodes, ScalarFunctionSpec};
//! use fractalis::rifs::{build_model, refine_attractor, DomainSpec, InterpolationData, ModelSpec,
//!     RegionDomainAssignment};
//!
//! let nodes = vec![(0.0, 20.0), (0.25, 30.0), (0.5, 10.0), (0.75, 50.0), (1.0, 10.0)];
//! let poly = lagrange_from_nodes(&nodes).unwrap();
//! let model = build_model(ModelSpec {
//!     data: InterpolationData::new(nodes).unwrap(),
//!     domains: DomainSpec::new(vec![(0, 2).into(), (2, 4).into()]),
//!     gamma: RegionDomainAssignment::from_one_based(&[1, 2, 1, 2]).unwrap(),
//!     scaling: vec![ScalarFunctionSpec::constant(0.9)],
//!     ordinate_map: ScalarFunctionSpec::identity(),
//!     base: poly.clone(),
//!     interpolant: poly,
//!     flip: vec![],
//! })
//! .unwrap();
//! let curve = refine_attractor(&model, 6).points();
//! assert_eq!(curve.len(), 4 * 64 + 1);
//! assert_eq!(curve[0], (0.0, 20.0));
//! ```

pub mod catalog;
pub mod dimension;
mod error;
mod par;
pub mod rifs;
pub mod surface;

pub use error::{Error, Result};
