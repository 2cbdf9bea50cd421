//! Figure scenarios, sweep drivers and the non-reciprocity metric.
//!
//! A momentum `k` in `(0, π)` and its mirror `−k` select two incident energies
//! on a ring band; the two directions are the `+` and `−` columns of a
//! [`TransmissionCurve`]. Non-reciprocity is `T(E(+k)) − T(E(−k))`.

use rayon::prelude::*;

use crate::bands::{band_centre, ring_dispersion, sample_band, BandId, DispersionSample};
use crate::error::{Error, Result};
use crate::model::{AtomSpec, Device, LeadSpec, RingSpec, SelfEnergyConvention};
use crate::negf::transmission;
use crate::oracle::solve_scattering;
use crate::scalar::Real;

/// Ring–lead coupling used by every figure preset.
pub const DEFAULT_KAPPA: f64 = 3.0;
/// Atom–cavity coupling used by the atom presets.
pub const DEFAULT_GAMMA: f64 = 1.0;
pub const DEFAULT_K_POINTS: usize = 601;
pub const DEFAULT_DELTA_POINTS: usize = 801;
/// Detuning grid half-width in units of ξ.
pub const DEFAULT_DELTA_SPAN: f64 = 10.0;
pub const DEFAULT_BAND_POINTS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sweep<T> {
    /// `points` momenta `k_i = iπ/(points+1)`, strictly inside `(0, π)`.
    Momentum { points: usize },
    /// Fixed incident `|k|`, detuning `Δ` on an inclusive uniform grid.
    Detuning {
        k: T,
        delta_min: T,
        delta_max: T,
        points: usize,
    },
    /// Dispersion table of both ring bands over `(−π, π]`.
    Bands { points: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Plus,
    Minus,
}

impl Direction {
    pub fn sign<T: Real>(self) -> T {
        match self {
            Direction::Plus => T::one(),
            Direction::Minus => -T::one(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    pub label: String,
    pub ring: RingSpec<T>,
    pub left: LeadSpec<T>,
    pub right: LeadSpec<T>,
    pub atom: Option<AtomSpec<T>>,
    pub band: BandId,
    pub sweep: Sweep<T>,
    pub eta: Option<T>,
}

impl<T: Real> Scenario<T> {
    /// Atom-free momentum sweep with default leads on `a_left`, `a_right`.
    pub fn momentum(label: &str, ring: RingSpec<T>, left: usize, right: usize, band: BandId) -> Result<Self> {
        let (l, r) = default_leads(&ring, band, left, right)?;
        let s = Self {
            label: label.to_string(),
            ring,
            left: l,
            right: r,
            atom: None,
            band,
            sweep: Sweep::Momentum {
                points: DEFAULT_K_POINTS,
            },
            eta: None,
        };
        s.validate()?;
        Ok(s)
    }

    /// Upper-band detuning sweep at incident `|k|` with an atom on `a_host`.
    pub fn detuning(
        label: &str,
        ring: RingSpec<T>,
        left: usize,
        right: usize,
        host: usize,
        k: T,
    ) -> Result<Self> {
        let (l, r) = default_leads(&ring, BandId::Upper, left, right)?;
        let span = T::lit(DEFAULT_DELTA_SPAN) * ring.xi.abs();
        let s = Self {
            label: label.to_string(),
            ring,
            left: l,
            right: r,
            atom: Some(AtomSpec::new(
                ring_dispersion(&ring, BandId::Upper, k),
                T::lit(DEFAULT_GAMMA),
                host,
            )),
            band: BandId::Upper,
            sweep: Sweep::Detuning {
                k,
                delta_min: -span,
                delta_max: span,
                points: DEFAULT_DELTA_POINTS,
            },
            eta: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        Device::new(self.ring, self.left, self.right, self.atom)?;
        match self.sweep {
            Sweep::Momentum { points } | Sweep::Bands { points } if points == 0 => {
                Err(Error::InvalidSpec {
                    field: "points",
                    constraint: "grid needs at least one point".into(),
                })
            }
            Sweep::Detuning {
                k,
                delta_min,
                delta_max,
                points,
            } => {
                if self.atom.is_none() {
                    return Err(Error::WrongSweep("an atom for a detuning sweep"));
                }
                if points == 0 || !(delta_min <= delta_max) || !k.is_finite() {
                    return Err(Error::InvalidSpec {
                        field: "sweep",
                        constraint: "detuning grid needs points ≥ 1, delta_min ≤ delta_max, finite k"
                            .into(),
                    });
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// The device with the atom as configured.
    pub fn device(&self) -> Result<Device<T>> {
        Ok(Device::new(self.ring, self.left, self.right, self.atom)?.with_eta(self.eta))
    }

    /// Sweep variable values in grid order.
    pub fn grid(&self) -> Vec<T> {
        match self.sweep {
            Sweep::Momentum { points } => {
                let denom = T::from(points + 1).unwrap();
                (1..=points)
                    .map(|i| T::PI() * T::from(i).unwrap() / denom)
                    .collect()
            }
            Sweep::Detuning {
                delta_min,
                delta_max,
                points,
                ..
            } => {
                if points == 1 {
                    return vec![delta_min];
                }
                let step = (delta_max - delta_min) / T::from(points - 1).unwrap();
                (0..points)
                    .map(|i| delta_min + step * T::from(i).unwrap())
                    .collect()
            }
            Sweep::Bands { .. } => Vec::new(),
        }
    }

    /// Device and incident energy for one sweep value and direction.
    ///
    /// In a detuning sweep the atom frequency is `Ω_A = E± − Δ`, so each
    /// direction sees the atom detuned by `Δ` from its own photon.
    pub fn sample_point(&self, x: T, dir: Direction) -> Result<(Device<T>, T)> {
        match self.sweep {
            Sweep::Momentum { .. } => {
                let e = ring_dispersion(&self.ring, self.band, dir.sign::<T>() * x);
                Ok((self.device()?, e))
            }
            Sweep::Detuning { k, .. } => {
                let e = ring_dispersion(&self.ring, self.band, dir.sign::<T>() * k);
                let atom = self
                    .atom
                    .map(|a| AtomSpec { omega_a: e - x, ..a })
                    .ok_or(Error::WrongSweep("an atom for a detuning sweep"))?;
                let d = Device::new(self.ring, self.left, self.right, Some(atom))?.with_eta(self.eta);
                Ok((d, e))
            }
            Sweep::Bands { .. } => Err(Error::WrongSweep("a momentum or detuning sweep")),
        }
    }

    pub fn set_convention(&mut self, c: SelfEnergyConvention) {
        self.left.convention = c;
        self.right.convention = c;
    }

    pub fn set_lead_omega(&mut self, omega: T) {
        self.left.omega = omega;
        self.right.omega = omega;
    }

    pub fn set_lead_zeta(&mut self, zeta: T) {
        self.left.zeta = zeta;
        self.right.zeta = zeta;
    }

    pub fn set_kappa(&mut self, kappa: T) {
        self.left.kappa = kappa;
        self.right.kappa = kappa;
    }

    /// Replaces the number of grid points of the active sweep.
    pub fn set_points(&mut self, k_points: Option<usize>, delta_points: Option<usize>) {
        match &mut self.sweep {
            Sweep::Momentum { points } | Sweep::Bands { points } => {
                if let Some(p) = k_points {
                    *points = p;
                }
            }
            Sweep::Detuning { points, .. } => {
                if let Some(p) = delta_points {
                    *points = p;
                }
            }
        }
    }
}

/// Leads with `ω` at the band centre and `ζ = 2ξ`, so the lead band covers
/// the ring band twice over.
pub fn default_leads<T: Real>(
    ring: &RingSpec<T>,
    band: BandId,
    left: usize,
    right: usize,
) -> Result<(LeadSpec<T>, LeadSpec<T>)> {
    let omega = band_centre(ring, band);
    let zeta = T::lit(2.0) * ring.xi.abs();
    let kappa = T::lit(DEFAULT_KAPPA);
    Ok((
        LeadSpec::new(omega, zeta, kappa, left)?,
        LeadSpec::new(omega, zeta, kappa, right)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample<T> {
    pub sweep_value: T,
    pub energy_plus: T,
    pub energy_minus: T,
    pub t_plus: T,
    pub t_minus: T,
    pub propagating_plus: bool,
    pub propagating_minus: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionCurve<T> {
    pub samples: Vec<Sample<T>>,
}

fn propagating<T: Real>(d: &Device<T>, e: T) -> bool {
    d.left.propagates(e) && d.right.propagates(e)
}

fn evaluate<T: Real>(s: &Scenario<T>, x: T) -> Result<Sample<T>> {
    let (dp, ep) = s.sample_point(x, Direction::Plus)?;
    let (dm, em) = s.sample_point(x, Direction::Minus)?;
    Ok(Sample {
        sweep_value: x,
        energy_plus: ep,
        energy_minus: em,
        t_plus: transmission(&dp, ep)?,
        t_minus: transmission(&dm, em)?,
        propagating_plus: propagating(&dp, ep),
        propagating_minus: propagating(&dm, em),
    })
}

fn run_grid<T: Real>(s: &Scenario<T>) -> Result<TransmissionCurve<T>> {
    s.validate()?;
    let samples = s
        .grid()
        .into_par_iter()
        .map(|x| evaluate(s, x))
        .collect::<Result<Vec<_>>>()?;
    Ok(TransmissionCurve { samples })
}

/// `T(E(±k))` over the momentum grid.
pub fn sweep_momentum<T: Real>(s: &Scenario<T>) -> Result<TransmissionCurve<T>> {
    match s.sweep {
        Sweep::Momentum { .. } => run_grid(s),
        _ => Err(Error::WrongSweep("a momentum sweep")),
    }
}

/// `T(E(±k))` over the detuning grid at fixed `|k|`.
pub fn sweep_detuning<T: Real>(s: &Scenario<T>) -> Result<TransmissionCurve<T>> {
    match s.sweep {
        Sweep::Detuning { .. } => run_grid(s),
        _ => Err(Error::WrongSweep("a detuning sweep")),
    }
}

/// Dispatches to the momentum or detuning driver.
pub fn sweep<T: Real>(s: &Scenario<T>) -> Result<TransmissionCurve<T>> {
    match s.sweep {
        Sweep::Momentum { .. } => sweep_momentum(s),
        Sweep::Detuning { .. } => sweep_detuning(s),
        Sweep::Bands { .. } => Err(Error::WrongSweep("a momentum or detuning sweep")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandRow<T> {
    pub k: T,
    pub upper: T,
    pub lower: T,
}

pub fn band_table<T: Real>(s: &Scenario<T>) -> Result<Vec<BandRow<T>>> {
    let points = match s.sweep {
        Sweep::Bands { points } => points,
        _ => return Err(Error::WrongSweep("a band sweep")),
    };
    let up = sample_band(&s.ring, BandId::Upper, points);
    let lo = sample_band(&s.ring, BandId::Lower, points);
    Ok(up
        .iter()
        .zip(&lo)
        .map(|(u, l): (&DispersionSample<T>, &DispersionSample<T>)| BandRow {
            k: u.k,
            upper: u.energy,
            lower: l.energy,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonReciprocity<T> {
    /// `T₊ − T₋` per sample.
    pub values: Vec<T>,
    pub max_abs: T,
    pub argmax_index: Option<usize>,
    /// Sweep value at the largest `|NR|`.
    pub argmax: Option<T>,
}

pub fn nonreciprocity<T: Real>(curve: &TransmissionCurve<T>) -> NonReciprocity<T> {
    let values: Vec<T> = curve.samples.iter().map(|s| s.t_plus - s.t_minus).collect();
    let mut best: Option<(usize, T)> = None;
    for (i, v) in values.iter().enumerate() {
        if best.is_none_or(|(_, b)| v.abs() > b) {
            best = Some((i, v.abs()));
        }
    }
    NonReciprocity {
        max_abs: best.map_or(T::zero(), |b| b.1),
        argmax_index: best.map(|b| b.0),
        argmax: best.map(|b| curve.samples[b.0].sweep_value),
        values,
    }
}

/// One NEGF-vs-oracle comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleRow<T> {
    pub sweep_value: T,
    pub direction: Direction,
    pub energy: T,
    pub t_negf: T,
    pub t_oracle: T,
}

impl<T: Real> OracleRow<T> {
    pub fn abs_diff(&self) -> T {
        (self.t_negf - self.t_oracle).abs()
    }
}

/// Oracle transmission for every curve sample whose energy lies strictly
/// inside the lead band.
pub fn oracle_rows<T: Real>(s: &Scenario<T>, curve: &TransmissionCurve<T>) -> Result<Vec<OracleRow<T>>> {
    let jobs: Vec<(T, Direction, T, T)> = curve
        .samples
        .iter()
        .flat_map(|p| {
            [
                (p.sweep_value, Direction::Plus, p.energy_plus, p.t_plus),
                (p.sweep_value, Direction::Minus, p.energy_minus, p.t_minus),
            ]
        })
        .collect();
    let rows = jobs
        .into_par_iter()
        .map(|(x, dir, e, t_negf)| -> Result<Option<OracleRow<T>>> {
            let (d, _) = s.sample_point(x, dir)?;
            let (lo, hi) = d.left.band();
            if !(e > lo && e < hi) {
                return Ok(None);
            }
            Ok(Some(OracleRow {
                sweep_value: x,
                direction: dir,
                energy: e,
                t_negf,
                t_oracle: solve_scattering(&d, e)?.transmission,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// Shipped preset identifiers with a one-line description.
pub const PRESETS: &[(&str, &str)] = &[
    ("fig2bands", "band diagram, N=7 V=10 xi=3"),
    ("fig3a1", "N=3 V=20 xi=1, leads a0/a1, upper band, k sweep"),
    ("fig3a2", "N=5 V=20 xi=1, leads a0/a2, upper band, k sweep"),
    ("fig3a3", "N=7 V=20 xi=1, leads a0/a3, upper band, k sweep"),
    ("fig3b1", "N=4 V=20 xi=1, leads a0/a2, upper band, k sweep"),
    ("fig3b2", "N=6 V=20 xi=1, leads a0/a3, upper band, k sweep"),
    ("fig3b3", "N=6 V=20 xi=1, leads a0/a2, upper band, k sweep"),
    ("fig4a", "N=3 V=20 xi=1, leads a0/a1, lower band, k sweep"),
    ("fig4b", "N=4 V=20 xi=1, leads a0/a2, lower band, k sweep"),
    ("fig5a", "N=7 (or -nN), atom at a_(N-1)/2 = right lead, k=(N-1)pi/N, detuning sweep"),
    ("fig5b", "N=7 (or -nN), atom at a1, right lead a_(N-1)/2, detuning sweep"),
    ("fig5c", "N=7 (or -nN), atom at a_(N-1)/2, right lead a_(N+1)/2, detuning sweep"),
    ("fig6", "N=6, atom at a2, leads a0/a3, k=4pi/6, detuning sweep"),
    ("fig6inset", "N=6, atom at a3, leads a0/a3, k=4pi/6, detuning sweep"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fig5Panel {
    /// Atom on the right attachment site.
    A,
    /// Atom moved to `a_1`.
    B,
    /// Right attachment moved to `a_{(N+1)/2}`.
    C,
}

/// Odd-`N` atom scenario at `k = (N−1)π/N`, `V = 20`, `ξ = 1`.
pub fn fig5_scenario<T: Real>(panel: Fig5Panel, n: usize) -> Result<Scenario<T>> {
    if n % 2 == 0 || n < 3 {
        return Err(Error::InvalidSpec {
            field: "N",
            constraint: format!("fig5 scenarios need odd N ≥ 3, got {n}"),
        });
    }
    let ring = RingSpec::new(n, T::lit(20.0), T::one())?;
    let mid = (n - 1) / 2;
    let (right, host, tag) = match panel {
        Fig5Panel::A => (mid, mid, "a"),
        Fig5Panel::B => (mid, 1, "b"),
        Fig5Panel::C => ((n + 1) / 2, mid, "c"),
    };
    let k = T::from(n - 1).unwrap() * T::PI() / T::from(n).unwrap();
    Scenario::detuning(&format!("fig5{tag}-n{n}"), ring, 0, right, host, k)
}

/// Looks up a figure preset by name.
pub fn preset<T: Real>(name: &str) -> Result<Scenario<T>> {
    let ring = |n: usize, v: f64, xi: f64| RingSpec::new(n, T::lit(v), T::lit(xi));
    let up = BandId::Upper;
    let lo = BandId::Lower;
    let scenario = match name {
        "fig2bands" => {
            let r = ring(7, 10.0, 3.0)?;
            let mut s = Scenario::momentum(name, r, 0, 3, up)?;
            s.sweep = Sweep::Bands {
                points: DEFAULT_BAND_POINTS,
            };
            s
        }
        "fig3a1" => Scenario::momentum(name, ring(3, 20.0, 1.0)?, 0, 1, up)?,
        "fig3a2" => Scenario::momentum(name, ring(5, 20.0, 1.0)?, 0, 2, up)?,
        "fig3a3" => Scenario::momentum(name, ring(7, 20.0, 1.0)?, 0, 3, up)?,
        "fig3b1" => Scenario::momentum(name, ring(4, 20.0, 1.0)?, 0, 2, up)?,
        "fig3b2" => Scenario::momentum(name, ring(6, 20.0, 1.0)?, 0, 3, up)?,
        "fig3b3" => Scenario::momentum(name, ring(6, 20.0, 1.0)?, 0, 2, up)?,
        "fig4a" => Scenario::momentum(name, ring(3, 20.0, 1.0)?, 0, 1, lo)?,
        "fig4b" => Scenario::momentum(name, ring(4, 20.0, 1.0)?, 0, 2, lo)?,
        "fig6" | "fig6inset" => {
            let host = if name == "fig6" { 2 } else { 3 };
            let k = T::lit(4.0) * T::PI() / T::lit(6.0);
            Scenario::detuning(name, ring(6, 20.0, 1.0)?, 0, 3, host, k)?
        }
        _ => return fig5_preset(name),
    };
    Ok(scenario)
}

fn fig5_preset<T: Real>(name: &str) -> Result<Scenario<T>> {
    let unknown = || Error::UnknownPreset(name.to_string());
    let rest = name.strip_prefix("fig5").ok_or_else(unknown)?;
    let (panel, n) = match rest.split_once("-n") {
        Some((p, n)) => (p, n.parse::<usize>().map_err(|_| unknown())?),
        None => (rest, 7),
    };
    let panel = match panel {
        "a" => Fig5Panel::A,
        "b" => Fig5Panel::B,
        "c" => Fig5Panel::C,
        _ => return Err(unknown()),
    };
    let mut s = fig5_scenario(panel, n)?;
    s.label = name.to_string();
    Ok(s)
}
