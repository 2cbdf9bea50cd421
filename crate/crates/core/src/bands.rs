//! Closed-form dispersions of the ring and the chain leads.

use num_complex::Complex;

use crate::model::{LeadSpec, RingSpec};
use crate::scalar::Real;

/// Ring band after the local gauge transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BandId {
    /// `ε + V − 2ξ cos(k − π/N)`, symmetric about `k = π/N`.
    Upper,
    /// `ε − V − 2ξ cos k`, symmetric about `k = 0`.
    Lower,
}

impl BandId {
    pub fn name(self) -> &'static str {
        match self {
            BandId::Upper => "upper",
            BandId::Lower => "lower",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionSample<T> {
    pub k: T,
    pub energy: T,
}

pub fn ring_dispersion<T: Real>(spec: &RingSpec<T>, band: BandId, k: T) -> T {
    let two_xi = T::lit(2.0) * spec.xi;
    match band {
        BandId::Upper => spec.epsilon + spec.v - two_xi * (k - symmetry_axis(spec, band)).cos(),
        BandId::Lower => spec.epsilon - spec.v - two_xi * k.cos(),
    }
}

/// Momentum about which the band is mirror symmetric.
pub fn symmetry_axis<T: Real>(spec: &RingSpec<T>, band: BandId) -> T {
    match band {
        BandId::Upper => T::PI() / T::from(spec.n).unwrap(),
        BandId::Lower => T::zero(),
    }
}

/// `(min, max)` energy of a ring band.
pub fn band_edges<T: Real>(spec: &RingSpec<T>, band: BandId) -> (T, T) {
    let centre = band_centre(spec, band);
    let half = T::lit(2.0) * spec.xi.abs();
    (centre - half, centre + half)
}

pub fn band_centre<T: Real>(spec: &RingSpec<T>, band: BandId) -> T {
    match band {
        BandId::Upper => spec.epsilon + spec.v,
        BandId::Lower => spec.epsilon - spec.v,
    }
}

/// Samples `points` momenta uniformly over `(−π, π]`.
pub fn sample_band<T: Real>(spec: &RingSpec<T>, band: BandId, points: usize) -> Vec<DispersionSample<T>> {
    let two_pi = T::lit(2.0) * T::PI();
    let count = T::from(points).unwrap();
    (1..=points)
        .map(|i| {
            let k = -T::PI() + two_pi * T::from(i).unwrap() / count;
            DispersionSample {
                k,
                energy: ring_dispersion(spec, band, k),
            }
        })
        .collect()
}

/// Eigenvalues of the closed ring from the dispersion, ascending.
///
/// The gauge-transformed operators are periodic, so both bands are sampled at
/// `k = 2πm/N`. The `π/N` shift inside the upper band already carries the
/// twist: its levels sit at `ε + V − 2ξ cos((2m−1)π/N)`, the antiperiodic
/// spectrum of the antisymmetric rung mode.
pub fn quantized_spectrum<T: Real>(spec: &RingSpec<T>) -> Vec<T> {
    let n = T::from(spec.n).unwrap();
    let mut out: Vec<T> = (0..spec.n)
        .flat_map(|m| {
            let m = T::from(m).unwrap();
            let two = T::lit(2.0);
            [
                ring_dispersion(spec, BandId::Upper, two * m * T::PI() / n),
                ring_dispersion(spec, BandId::Lower, two * m * T::PI() / n),
            ]
        })
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite energies"));
    out
}

pub fn lead_dispersion<T: Real>(lead: &LeadSpec<T>, k: T) -> T {
    lead.omega - T::lit(2.0) * lead.zeta * k.cos()
}

/// Solves `energy = ω − 2ζ cos k'` for the lead momentum.
///
/// Inside the band `k' ∈ [0, π]` is real. Below the band `k' = i·acosh(..)`,
/// above it `k' = π + i·acosh(..)`; in both cases `Im k' > 0`, so the lead
/// wave decays away from the device.
pub fn lead_momentum<T: Real>(lead: &LeadSpec<T>, energy: T) -> Complex<T> {
    let x = (energy - lead.omega) / (T::lit(2.0) * lead.zeta);
    if x.abs() <= T::one() {
        Complex::new((-x).acos(), T::zero())
    } else if x < T::zero() {
        Complex::new(T::zero(), (-x).acosh())
    } else {
        Complex::new(T::PI(), x.acosh())
    }
}

/// `e^{ik'}` for the lead momentum at `energy`, with exactly zero imaginary
/// part outside the band and `Im ≥ 0` inside.
pub fn lead_phase<T: Real>(lead: &LeadSpec<T>, energy: T) -> Complex<T> {
    let c = (lead.omega - energy) / (T::lit(2.0) * lead.zeta);
    if c.abs() <= T::one() {
        Complex::new(c, (T::one() - c * c).max(T::zero()).sqrt())
    } else {
        // c = ±cosh(a), e^{ik'} = ±e^{−a} = c − sign(c)·sqrt(c² − 1)
        Complex::new(c - c.signum() * (c * c - T::one()).sqrt(), T::zero())
    }
}
