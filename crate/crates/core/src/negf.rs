//! Lead self-energies, the retarded Green function of the open device, and
//! the two-terminal transmission `T = Tr[Γ_L G Γ_R G†]`.
//!
//! Each lead couples to a single device site, so Σ and Γ are diagonal with one
//! nonzero entry and the trace collapses to `Γ_L Γ_R |G_{LR}|²`. That reduction
//! is what [`transmission`] computes, from one column solve. The dense trace
//! is kept in [`transmission_trace`] for checking.

use num_complex::Complex;

use crate::bands::lead_phase;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::model::{Device, DeviceMatrix, LeadSpec, RingSpec, SelfEnergyConvention, SiteIndex};
use crate::scalar::Real;

/// Retarded self-energy of one lead, living on its attachment site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfEnergy<T> {
    pub value: Complex<T>,
    pub site: SiteIndex,
    pub convention: SelfEnergyConvention,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Broadening<T> {
    pub value: T,
    pub site: SiteIndex,
}

/// Self-energy of a semi-infinite chain lead at a real energy.
///
/// `Im Σ ≤ 0` always. `Σ` is exactly real outside the lead band.
pub fn self_energy<T: Real>(lead: &LeadSpec<T>, energy: T) -> SelfEnergy<T> {
    let phase = lead_phase(lead, energy);
    let prefactor = match lead.convention {
        SelfEnergyConvention::Surface => lead.kappa * lead.kappa / lead.zeta,
        SelfEnergyConvention::Literal => lead.kappa,
    };
    SelfEnergy {
        value: -phase * prefactor,
        site: lead.attach,
        convention: lead.convention,
    }
}

/// `Γ = i(Σ − Σ*) = −2 Im Σ`.
pub fn broadening<T: Real>(sigma: &SelfEnergy<T>) -> Broadening<T> {
    let g = -T::lit(2.0) * sigma.value.im;
    Broadening {
        // avoid -0.0 for real Σ
        value: if g == T::zero() { T::zero() } else { g },
        site: sigma.site,
    }
}

/// Regulator used when neither lead broadens the device.
pub fn default_eta<T: Real>(ring: &RingSpec<T>) -> T {
    T::lit(1e-9) * ring.v.abs().max(ring.xi.abs()).max(T::one())
}

/// η for a device at given self-energies: the override if set, otherwise 0
/// when any lead broadens, else [`default_eta`].
pub fn resolve_eta<T: Real>(device: &Device<T>, left: &SelfEnergy<T>, right: &SelfEnergy<T>) -> T {
    if let Some(eta) = device.eta {
        return eta;
    }
    if broadening(left).value > T::zero() || broadening(right).value > T::zero() {
        T::zero()
    } else {
        default_eta(&device.ring)
    }
}

/// `(E + iη)I − H − Σ_L − Σ_R`.
pub fn system_matrix<T: Real>(
    h: &DeviceMatrix<T>,
    energy: T,
    left: &SelfEnergy<T>,
    right: &SelfEnergy<T>,
    eta: T,
) -> ComplexMatrix<T> {
    let dim = h.dim();
    let n = h.ring_size();
    let mut a = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            a[(i, j)] = Complex::new(-h.get(i, j), T::zero());
        }
        a[(i, i)] += Complex::new(energy, eta);
    }
    for s in [left, right] {
        let r = s.site.row(n);
        a[(r, r)] -= s.value;
    }
    a
}

/// Full retarded Green function, for diagnostics and trace checks.
#[derive(Debug, Clone)]
pub struct GreenFunction<T> {
    pub matrix: ComplexMatrix<T>,
}

impl<T: Real> GreenFunction<T> {
    /// `max_i |(A G − I)_i| / max|A|`.
    pub fn relative_residual(&self, system: &ComplexMatrix<T>) -> T {
        let prod = system.mul(&self.matrix);
        let n = prod.dim();
        let mut worst = T::zero();
        for i in 0..n {
            let row: T = (0..n)
                .map(|j| {
                    let id = if i == j { T::one() } else { T::zero() };
                    (prod[(i, j)] - Complex::new(id, T::zero())).norm()
                })
                .fold(T::zero(), T::max);
            worst = worst.max(row);
        }
        worst / system.max_abs()
    }
}

pub fn green_function<T: Real>(
    h: &DeviceMatrix<T>,
    energy: T,
    left: &SelfEnergy<T>,
    right: &SelfEnergy<T>,
    eta: T,
) -> Result<GreenFunction<T>> {
    let a = system_matrix(h, energy, left, right, eta);
    a.inverse()
        .map(|matrix| GreenFunction { matrix })
        .ok_or(Error::Pole {
            energy: energy.to_f64_lossy(),
        })
}

/// Column `col` of G, from a single linear solve.
pub fn green_column<T: Real>(
    h: &DeviceMatrix<T>,
    energy: T,
    left: &SelfEnergy<T>,
    right: &SelfEnergy<T>,
    eta: T,
    col: usize,
) -> Result<Vec<Complex<T>>> {
    let a = system_matrix(h, energy, left, right, eta);
    let mut e = vec![Complex::new(T::zero(), T::zero()); a.dim()];
    e[col] = Complex::new(T::one(), T::zero());
    a.solve(&e).ok_or(Error::Pole {
        energy: energy.to_f64_lossy(),
    })
}

/// Transmission probability at a real incident energy.
///
/// Zero without solving when either lead has no propagating states at
/// `energy`. A bound state hidden from both leads is regularized with a
/// small η instead of being reported as a pole.
pub fn transmission<T: Real>(device: &Device<T>, energy: T) -> Result<T> {
    transmission_between(
        device.hamiltonian(),
        &device.left,
        &device.right,
        energy,
        device.eta.unwrap_or_else(T::zero),
    )
}

/// [`transmission`] for any device matrix and pair of leads. The leads may
/// share a site (a single-site device between two chains).
///
/// Sites with no bonds and no lead are separate blocks of the resolvent and
/// are left out of the solve, so a decoupled atom tuned exactly to the
/// incident energy is not reported as a pole.
pub fn transmission_between<T: Real>(
    h: &DeviceMatrix<T>,
    left: &LeadSpec<T>,
    right: &LeadSpec<T>,
    energy: T,
    eta: T,
) -> Result<T> {
    let sl = self_energy(left, energy);
    let sr = self_energy(right, energy);
    let (gl, gr) = (broadening(&sl).value, broadening(&sr).value);
    if gl == T::zero() || gr == T::zero() {
        return Ok(T::zero());
    }
    match column_transmission(h, left, right, energy, eta, &sl, &sr) {
        Err(Error::Pole { .. }) if eta == T::zero() => {
            column_transmission(h, left, right, energy, bound_state_eta(h), &sl, &sr)
        }
        other => other,
    }
}

/// Regulator for a bound state in the continuum: an eigenvector of H with
/// no weight on either lead site leaves `E − H − Σ` singular at η = 0 while
/// contributing nothing to `G_LR`.
fn bound_state_eta<T: Real>(h: &DeviceMatrix<T>) -> T {
    T::lit(1e-9) * h.max_abs().max(T::one())
}

fn column_transmission<T: Real>(
    h: &DeviceMatrix<T>,
    left: &LeadSpec<T>,
    right: &LeadSpec<T>,
    energy: T,
    eta: T,
    sl: &SelfEnergy<T>,
    sr: &SelfEnergy<T>,
) -> Result<T> {
    let (gl, gr) = (broadening(sl).value, broadening(sr).value);
    let n = h.ring_size();
    let (lrow, rrow) = (left.attach.row(n), right.attach.row(n));
    let dim = h.dim();
    let rows: Vec<usize> = (0..dim)
        .filter(|&i| i == lrow || i == rrow || (0..dim).any(|j| j != i && h.get(i, j) != T::zero()))
        .collect();
    if rows.len() == dim {
        let col = green_column(h, energy, sl, sr, eta, rrow)?;
        return Ok(gl * gr * col[lrow].norm_sqr());
    }

    let full = system_matrix(h, energy, sl, sr, eta);
    let mut a = ComplexMatrix::zeros(rows.len());
    for (p, &i) in rows.iter().enumerate() {
        for (q, &j) in rows.iter().enumerate() {
            a[(p, q)] = full[(i, j)];
        }
    }
    let pos = |r: usize| rows.iter().position(|&x| x == r).expect("lead rows kept");
    let mut e = vec![Complex::new(T::zero(), T::zero()); rows.len()];
    e[pos(rrow)] = Complex::new(T::one(), T::zero());
    let col = a.solve(&e).ok_or(Error::Pole {
        energy: energy.to_f64_lossy(),
    })?;
    Ok(gl * gr * col[pos(lrow)].norm_sqr())
}

/// Which lead plays the role of `Γ_1` in the trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceOrder {
    /// `Tr[Γ_L G Γ_R G†]`
    LeftRight,
    /// `Tr[Γ_R G Γ_L G†]`
    RightLeft,
}

/// Transmission from the dense trace formula with full matrices.
pub fn transmission_trace<T: Real>(device: &Device<T>, energy: T, order: TraceOrder) -> Result<T> {
    let sl = self_energy(&device.left, energy);
    let sr = self_energy(&device.right, energy);
    let eta = resolve_eta(device, &sl, &sr);
    let h = device.hamiltonian();
    let g = match green_function(h, energy, &sl, &sr, eta) {
        Err(Error::Pole { .. }) if eta == T::zero() => {
            green_function(h, energy, &sl, &sr, bound_state_eta(h))
        }
        other => other,
    }?
    .matrix;
    let dim = g.dim();
    let gamma = |s: &SelfEnergy<T>, row: usize| {
        let mut m = ComplexMatrix::zeros(dim);
        m[(row, row)] = Complex::new(broadening(s).value, T::zero());
        m
    };
    let gl = gamma(&sl, device.left_row());
    let gr = gamma(&sr, device.right_row());
    let (g1, g2) = match order {
        TraceOrder::LeftRight => (gl, gr),
        TraceOrder::RightLeft => (gr, gl),
    };
    Ok(g1.mul(&g).mul(&g2).mul(&g.adjoint()).trace().re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AtomSpec, RingSpec};

    fn lead(omega: f64, zeta: f64, kappa: f64, j: usize) -> LeadSpec<f64> {
        LeadSpec::new(omega, zeta, kappa, j).unwrap()
    }

    fn device(n: usize, kappa: f64) -> Device<f64> {
        let ring = RingSpec::new(n, 20.0, 1.0).unwrap();
        Device::new(ring, lead(20.0, 2.0, kappa, 0), lead(20.0, 2.0, kappa, n / 2), None).unwrap()
    }

    #[test]
    fn surface_self_energy_at_band_centre() {
        let s = self_energy(&lead(0.0, 1.0, 1.0, 0), 0.0);
        assert!((s.value - Complex::new(0.0, -1.0)).norm() < 1e-15);
        assert_eq!(broadening(&s).value, 2.0);
        let s3 = self_energy(&lead(0.0, 1.0, 3.0, 0), 0.0);
        assert!((broadening(&s3).value - 18.0).abs() < 1e-13);
    }

    #[test]
    fn evanescent_self_energy_matches_closed_form() {
        let (omega, zeta, kappa) = (0.5, 1.3, 0.8);
        let l = lead(omega, zeta, kappa, 0);
        for e in [omega + 10.0 * zeta, omega + 2.7, omega - 3.0, omega - 100.0] {
            let s = self_energy(&l, e);
            assert_eq!(s.value.im, 0.0);
            assert_eq!(broadening(&s).value, 0.0);
            let x: f64 = e - omega;
            let g = (x - x.signum() * (x * x - 4.0 * zeta * zeta).sqrt()) / (2.0 * zeta * zeta);
            assert!((s.value.re - kappa * kappa * g).abs() < 1e-12, "E={e}");
            assert!(s.value.re.abs() < kappa * kappa / zeta);
        }
        let far = self_energy(&l, 1e8).value.re.abs();
        assert!(far < 1e-7);
    }

    #[test]
    fn literal_convention_magnitude() {
        let l = lead(0.0, 2.0, 3.0, 0).with_convention(SelfEnergyConvention::Literal);
        let s = self_energy(&l, 0.0);
        assert!((s.value - Complex::new(0.0, -3.0)).norm() < 1e-15);
    }

    #[test]
    fn im_sigma_nonpositive_everywhere() {
        let l = lead(0.0, 1.0, 2.0, 0);
        for i in -500..=500 {
            let e = i as f64 * 0.01;
            assert!(self_energy(&l, e).value.im <= 0.0);
        }
    }

    #[test]
    fn zero_coupling_gives_zero() {
        let l = lead(0.0, 1.0, 0.0, 0);
        assert_eq!(self_energy(&l, 0.3).value.norm(), 0.0);
        let d = device(4, 0.0);
        for e in [18.5, 19.0, 20.0, 21.7] {
            assert_eq!(transmission(&d, e).unwrap(), 0.0);
        }
    }

    #[test]
    fn closed_resolvent_is_hermitian() {
        let d = device(3, 0.0);
        let e = 20.3; // spectrum is {-22, -19, -19, 19, 19, 22}
        let sl = self_energy(&d.left, e);
        let sr = self_energy(&d.right, e);
        let g = green_function(d.hamiltonian(), e, &sl, &sr, 0.0).unwrap().matrix;
        let adj = g.adjoint();
        for i in 0..g.dim() {
            for j in 0..g.dim() {
                assert!((g[(i, j)] - adj[(i, j)]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn pole_reported_for_closed_device_on_eigenvalue() {
        let d = device(3, 0.0);
        let sl = self_energy(&d.left, 22.0);
        let sr = self_energy(&d.right, 22.0);
        assert!(matches!(
            green_function(d.hamiltonian(), 22.0, &sl, &sr, 0.0),
            Err(Error::Pole { .. })
        ));
        assert!(green_function(d.hamiltonian(), 22.0, &sl, &sr, default_eta(&d.ring)).is_ok());
    }

    #[test]
    fn residual_on_seven_rung_device() {
        let d = device(7, 3.0);
        let e = 20.0;
        let sl = self_energy(&d.left, e);
        let sr = self_energy(&d.right, e);
        let a = system_matrix(d.hamiltonian(), e, &sl, &sr, 0.0);
        let g = green_function(d.hamiltonian(), e, &sl, &sr, 0.0).unwrap();
        assert!(g.relative_residual(&a) < 1e-10);
    }

    #[test]
    fn column_solve_matches_full_inverse() {
        let d = device(5, 1.5);
        let e = 19.3;
        let sl = self_energy(&d.left, e);
        let sr = self_energy(&d.right, e);
        let full = green_function(d.hamiltonian(), e, &sl, &sr, 0.0).unwrap().matrix;
        let col = green_column(d.hamiltonian(), e, &sl, &sr, 0.0, d.right_row()).unwrap();
        for (i, z) in col.iter().enumerate() {
            assert!((z - full[(i, d.right_row())]).norm() < 1e-13);
        }
        let t = transmission(&d, e).unwrap();
        let lr = transmission_trace(&d, e, TraceOrder::LeftRight).unwrap();
        let rl = transmission_trace(&d, e, TraceOrder::RightLeft).unwrap();
        assert!((t - lr).abs() < 1e-12);
        assert!((lr - rl).abs() < 1e-12);
    }

    #[test]
    fn single_site_resonance() {
        // ε₀ = ω = 0, symmetric leads, E = 0: Γ = 2κ²/ζ, G = ζ/(2iκ²), T = 1
        let (zeta, kappa) = (1.7, 0.9);
        let h = DeviceMatrix::from_symmetric(1, vec![0.0]).unwrap();
        let l = lead(0.0, zeta, kappa, 0);
        let sl = self_energy(&l, 0.0);
        let g = green_function(&h, 0.0, &sl, &sl, 0.0).unwrap().matrix[(0, 0)];
        let expect = Complex::new(zeta, 0.0) / Complex::new(0.0, 2.0 * kappa * kappa);
        assert!((g - expect).norm() < 1e-14);
        let gamma = broadening(&sl).value;
        assert!((gamma - 2.0 * kappa * kappa / zeta).abs() < 1e-14);
        let t = transmission_between(&h, &l, &l, 0.0, 0.0).unwrap();
        assert!((t - 1.0).abs() < 1e-14);
    }

    #[test]
    fn outside_lead_band_is_exactly_zero() {
        let d = device(3, 3.0);
        for e in [15.99, 24.01, -5.0, 100.0] {
            assert_eq!(transmission(&d, e).unwrap(), 0.0);
        }
    }

    #[test]
    fn decoupled_atom_is_invisible() {
        let d = device(5, 3.0);
        let with = d.with_atom(Some(AtomSpec::new(19.5, 0.0, 1))).unwrap();
        for i in 0..40 {
            let e = 16.1 + i as f64 * 0.195;
            let a = transmission(&d, e).unwrap();
            let b = transmission(&with, e).unwrap();
            assert!((a - b).abs() < 1e-12, "E={e}: {a} vs {b}");
        }
    }

    #[test]
    fn bound_state_in_continuum_is_regularized() {
        let ring = RingSpec::new(4, 20.0, 1.0).unwrap();
        let d = Device::new(ring, lead(-20.0, 2.0, 3.0, 0), lead(-20.0, 2.0, 3.0, 2), None).unwrap();
        let sl = self_energy(&d.left, -20.0);
        let sr = self_energy(&d.right, -20.0);
        assert!(green_function(d.hamiltonian(), -20.0, &sl, &sr, 0.0).is_err());
        let t = transmission(&d, -20.0).unwrap();
        let near = transmission(&d, -20.0 + 1e-6).unwrap();
        assert!((t - near).abs() < 1e-6, "{t} vs {near}");
        let lr = transmission_trace(&d, -20.0, TraceOrder::LeftRight).unwrap();
        assert!((t - lr).abs() < 1e-9);
    }
}
