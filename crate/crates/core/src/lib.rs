//! Elliptical Radon transform over ellipses whose foci lie on the line
//! `x_n = 0`, its reduction to the regular Radon transform, and three
//! inversion routes: reduction followed by filtered backprojection, a
//! band-limited closed-form inversion, and a Fourier-slice diagnostic.

pub mod container;
pub mod error;
pub mod forward;
pub mod geometry;
pub mod grid;
pub mod inversion;
pub mod metrics;
pub mod pgm;
pub mod phantom;
pub mod radon;

pub use error::{Error, Result};
pub use forward::{EllipticalSinogram, NodeCount};
pub use geometry::AnisotropyParams;
pub use grid::{Axis, GridImage, ImageGeometry, Interval};
pub use phantom::{Disk, Phantom};
pub use radon::RadonSinogram;
