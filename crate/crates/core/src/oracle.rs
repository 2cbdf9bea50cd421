//! Mode-matching scattering solver, independent of the Green-function route.
//!
//! A unit-amplitude wave comes in along the left chain. Left chain sites
//! `l ≤ −1` carry `e^{ik'(l+1)} + r e^{−ik'(l+1)}`, right chain sites `l ≥ 1`
//! carry `t e^{ik'(l−1)}`. The bulk chain equations hold identically for
//! `E = ω − 2ζ cos k'`, so only the device rows and the two chain sites
//! touching the device remain. That leaves `dim + 2` equations for the
//! unknowns `(ψ_device, r, t)`.

use num_complex::Complex;

use crate::bands::lead_phase;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::model::{Device, DeviceMatrix, LeadSpec};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringSolution<T> {
    pub r: Complex<T>,
    pub t: Complex<T>,
    pub device_amplitudes: Vec<Complex<T>>,
    /// `|t|²`
    pub transmission: T,
}

impl<T: Real> ScatteringSolution<T> {
    pub fn reflection(&self) -> T {
        self.r.norm_sqr()
    }

    /// `|r|² + |t|² − 1`
    pub fn flux_defect(&self) -> T {
        self.r.norm_sqr() + self.t.norm_sqr() - T::one()
    }
}

pub fn solve_scattering<T: Real>(device: &Device<T>, energy: T) -> Result<ScatteringSolution<T>> {
    solve_scattering_between(device.hamiltonian(), &device.left, &device.right, energy)
}

/// Scattering solution for any device matrix. Both leads must share ω and ζ
/// and `energy` must lie strictly inside their band.
pub fn solve_scattering_between<T: Real>(
    h: &DeviceMatrix<T>,
    left: &LeadSpec<T>,
    right: &LeadSpec<T>,
    energy: T,
) -> Result<ScatteringSolution<T>> {
    if left.omega != right.omega || left.zeta != right.zeta {
        return Err(Error::MismatchedLeads);
    }
    let (lo, hi) = left.band();
    if !(energy > lo && energy < hi) {
        return Err(Error::NotPropagating {
            energy: energy.to_f64_lossy(),
            band_min: lo.to_f64_lossy(),
            band_max: hi.to_f64_lossy(),
        });
    }

    let zero = Complex::new(T::zero(), T::zero());
    let real = |x: T| Complex::new(x, T::zero());
    let phase = lead_phase(left, energy);
    let detune = real(energy - left.omega);
    let zeta = real(left.zeta);

    let n = h.ring_size();
    let dim = h.dim();
    let (lrow, rrow) = (left.attach.row(n), right.attach.row(n));
    let (r_col, t_col) = (dim, dim + 1);
    let size = dim + 2;
    let mut a = ComplexMatrix::zeros(size);
    let mut rhs = vec![zero; size];

    // device rows: (E − H)ψ − κ_L ψ_{−1} e_L − κ_R ψ_{+1} e_R = 0
    for i in 0..dim {
        for j in 0..dim {
            a[(i, j)] = real(-h.get(i, j));
        }
        a[(i, i)] += real(energy);
    }
    a[(lrow, r_col)] -= real(left.kappa);
    rhs[lrow] += real(left.kappa);
    a[(rrow, t_col)] -= real(right.kappa);

    // chain site −1: (E − ω)ψ_{−1} + ζ ψ_{−2} − κ_L ψ_L = 0
    a[(r_col, r_col)] = detune + zeta * phase;
    a[(r_col, lrow)] = real(-left.kappa);
    rhs[r_col] = -(detune + zeta * phase.conj());

    // chain site +1: (E − ω)ψ_{1} + ζ ψ_{2} − κ_R ψ_R = 0
    a[(t_col, t_col)] = detune + zeta * phase;
    a[(t_col, rrow)] = real(-right.kappa);

    let x = match a.solve(&rhs) {
        Some(x) => x,
        None => {
            // a device eigenstate with no weight on either lead site makes
            // ψ non-unique but leaves r and t fixed; a tiny loss selects one
            let eta = T::lit(1e-9) * h.max_abs().max(T::one());
            for i in 0..dim {
                a[(i, i)] += Complex::new(T::zero(), eta);
            }
            a.solve(&rhs).ok_or(Error::Pole {
                energy: energy.to_f64_lossy(),
            })?
        }
    };
    let t = x[t_col];
    Ok(ScatteringSolution {
        r: x[r_col],
        t,
        device_amplitudes: x[..dim].to_vec(),
        transmission: t.norm_sqr(),
    })
}
