//! Continuous frames over measured index sets.
//!
//! The crate discretizes a continuous frame `F: Omega -> H` by quadrature
//! and works with it as a finite family of weighted vectors: frame-operator
//! application and inversion, bound certification through Hermitian
//! eigenvalues, the step-frame constructions over partitions of `Omega`,
//! and the continuous wavelet and short-time Fourier transforms viewed as
//! tight frames.
//!
//! Fourier transforms use the kernel `exp(-2 pi i x gamma)` throughout; see
//! [`hilbert`].

pub mod construct;
pub mod error;
mod fft;
pub mod field;
pub mod frame;
pub mod gabor;
pub mod hilbert;
pub mod io;
pub mod measure;
pub mod suite;
pub mod wavelet;

pub use error::{Error, Result};
pub use frame::{DiscretizedFrame, FrameReport, Node, Verdict};
pub use hilbert::{Space, Vector};
pub use measure::Partition;

pub use num_complex::Complex64;
