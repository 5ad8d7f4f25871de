//! Variational search for the super-eight four-body choreography.
//!
//! The planar equal-mass four-body problem is reduced to parallelogram
//! configurations `(q1, q2, -q1, -q2)`. Loops fixed by a 16-element symmetry
//! group are represented by truncated Fourier series, the strong-force
//! regularized action is minimized by Sobolev gradient descent with an
//! `eps -> 0` continuation, and the result is checked against direct
//! integration of Newton's equations.
//!
//! Module map:
//!
//! - [`dynamics`]: force function, accelerations, conserved quantities
//! - [`symmetry`]: the group, its action on loops, projection, boundary values
//! - [`pathspace`]: Fourier loops, sampling grids, quadrature, random starts
//! - [`action`]: action values and H^1 gradients
//! - [`minimizer`]: descent, continuation, multi-start driver
//! - [`bounds`]: collision bounds and the explicit test path
//! - [`collision`]: blow-up scaling ODE and Levi-Civita regularization
//! - [`verify`]: Newton integration and residual reports
//! - [`cli`]: orbit files, exports and the command implementations

pub mod action;
pub mod bounds;
pub mod cli;
pub mod collision;
pub mod dynamics;
pub mod error;
pub mod minimizer;
pub mod ode;
pub mod pathspace;
pub mod symmetry;
pub mod verify;

pub use error::{Error, Result};
