//! Single-photon transport through a Möbius ring of coupled cavities.
//!
//! The ring is a two-leg ladder of `2N` cavities closed with a half twist
//! (`a_N = b_0`, `b_N = a_0`). Two semi-infinite cavity chains attach to
//! upper-layer cavities, and an optional two-level atom sits in one cavity.
//! Transmission is computed from the retarded Green function of the open
//! device and cross-checked against a mode-matching scattering solver.
//!
//! Everything is generic over the scalar type ([`Real`], implemented for `f32`
//! and `f64`). The `*64` aliases below fix `f64`, which is what the tolerances
//! in the test-suite assume.

pub mod bands;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod model;
pub mod negf;
pub mod oracle;
pub mod scalar;

pub use bands::{band_edges, lead_momentum, ring_dispersion, BandId};
pub use error::{Error, Result};
pub use experiments::{nonreciprocity, preset, sweep, Direction, Scenario, Sweep, TransmissionCurve};
pub use model::{
    build_ring, embed_atom, validate_attachments, AtomSpec, Device, DeviceMatrix, Layer, LeadSpec,
    RingSpec, SelfEnergyConvention, SiteIndex,
};
pub use negf::{broadening, green_function, self_energy, transmission};
pub use num_complex::Complex;
pub use oracle::{solve_scattering, ScatteringSolution};
pub use scalar::Real;

pub type RingSpec64 = RingSpec<f64>;
pub type LeadSpec64 = LeadSpec<f64>;
pub type AtomSpec64 = AtomSpec<f64>;
pub type DeviceMatrix64 = DeviceMatrix<f64>;
pub type Device64 = Device<f64>;
pub type Scenario64 = Scenario<f64>;
pub type TransmissionCurve64 = TransmissionCurve<f64>;
pub type ScatteringSolution64 = ScatteringSolution<f64>;
pub type Complex64 = Complex<f64>;
